"""Stratonovich-Weyl phase spaces and quantum speed limits.

Submodules:

- :mod:`phaseqsl.sun_algebra`: generalized Gell-Mann bases and structure constants
- :mod:`phaseqsl.cv`: single-mode s-parametrized kernels and coherent-state bounds
- :mod:`phaseqsl.sun_phase_space`: SU(N) kernels, measures and closed-form bounds
- :mod:`phaseqsl.discrete`: the four-point qubit lattice
- :mod:`phaseqsl.dynamics`: von Neumann evolution, purity rates and star products
- :mod:`phaseqsl.qsl`: bound assembly and QSL times
- :mod:`phaseqsl.cli`: command-line front end
"""

from . import cv, discrete, dynamics, qsl, sun_algebra, sun_phase_space
from .cv import V_qsl_cv, chi_cv, optimal_s_cv, v_qsl_cv
from .dynamics import EvolutionSpec, evolve, moyal_bracket_numeric, purity_rate
from .exceptions import *  # noqa: F401,F403
from .qsl import hilbert_bound, qsl_report_coherent, qsl_report_sun, tau_qsl, tightest_s
from .sun_algebra import build_basis, decompose, reconstruct
from .sun_phase_space import V_qsl_sun, build_measure, chi_sun, ratio_pure, v_qsl_sun

__version__ = "0.1.0"
