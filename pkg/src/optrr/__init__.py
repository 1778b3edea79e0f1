"""Variational spectral solver for 1D and radial anharmonic oscillators.

Bound-state energies and wavefunction moments come from diagonalizing the
truncated Hamiltonian in an adjustable-parameter basis whose nonlinear
parameters are fixed, order by order, by minimizing the matrix trace.  All
arithmetic runs at a configurable decimal precision; built-in closed-form
solutions of four quasi-solvable oscillator families serve as independent
references.
"""

from .precision import PrecisionConfig, as_mpf, workdps
from .linalg import EigenDecomposition, EighConvergenceError, SymMatrix, eigh
from .optimize import Min2DResult, NoMinimumError, minimize_2d, minimize_scalar
from .rootfind import RootScan, continuant_det, poly_roots_real
from .quadrature import FULL_LINE, HALF_LINE, QuadratureError, integrate
from .potentials import (Potential, double_well, harmonium, power_mix,
                         quartic, radial_oscillator, radial_sextic_qes,
                         sextic_1d, sextic_1d_qes, spiked)
from .basis import (BasisSpec, GammaBoundError, OperatorMatrix, assemble,
                    assemble_1d, assemble_radial, ho_power_matrix,
                    pho_power_matrix)
from .traceopt import (OptimizedParams, TraceObjective, optimize,
                       strategy_presets, trace_value)
from .solver import (ConvergenceReport, MomentTable, SpectralResult,
                     SplittingResult, level_splitting, moments,
                     reduced_coupling, reduced_frequency, reduced_omega_sq,
                     scaling_transport, solve, sweep, virial_residual)
from . import qes

__all__ = [
    "PrecisionConfig", "as_mpf", "workdps",
    "EigenDecomposition", "EighConvergenceError", "SymMatrix", "eigh",
    "Min2DResult", "NoMinimumError", "minimize_2d", "minimize_scalar",
    "RootScan", "continuant_det", "poly_roots_real",
    "FULL_LINE", "HALF_LINE", "QuadratureError", "integrate",
    "Potential", "double_well", "harmonium", "power_mix", "quartic",
    "radial_oscillator", "radial_sextic_qes", "sextic_1d", "sextic_1d_qes",
    "spiked",
    "BasisSpec", "GammaBoundError", "OperatorMatrix", "assemble",
    "assemble_1d", "assemble_radial", "ho_power_matrix", "pho_power_matrix",
    "OptimizedParams", "TraceObjective", "optimize", "strategy_presets",
    "trace_value",
    "ConvergenceReport", "MomentTable", "SpectralResult", "SplittingResult",
    "level_splitting", "moments", "reduced_coupling", "reduced_frequency",
    "reduced_omega_sq", "scaling_transport", "solve", "sweep",
    "virial_residual",
    "qes",
]

__version__ = "0.1.0"
