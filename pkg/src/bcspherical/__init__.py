"""Spherical functions of BC type over R, C and H by reduction to type A.

Modules
-------
numfield  matrices over the field of dimension d in {1, 2, 4}
rootdata  BC_q / A_{q-1} root data and finite-difference Dunkl operators
polytope  Weyl-orbit polytopes and the ball profile maps
hermite   distinct-root counting from Newton power sums
quad      quadrature, block-seeded samplers and estimators
sphfun    spherical functions, dual Abel measures, kernels, support reports
cli       ``bcsph`` command-line front end
"""

from .quad import EstimateWithError, WeightedSample
from .rootdata import MultiplicityData, rho_a, rho_bc
from .sphfun import (
    EvalConfig,
    kernel_histogram,
    kernel_pointwise_q1,
    phi_a,
    phi_bc,
    psi_a,
    psi_bc,
    rational_limit_check,
    sample_dual_abel_a,
    sample_dual_abel_bc,
    support_report,
)

__version__ = "0.1.0"

__all__ = [
    "EstimateWithError",
    "EvalConfig",
    "MultiplicityData",
    "WeightedSample",
    "kernel_histogram",
    "kernel_pointwise_q1",
    "phi_a",
    "phi_bc",
    "psi_a",
    "psi_bc",
    "rational_limit_check",
    "rho_a",
    "rho_bc",
    "sample_dual_abel_a",
    "sample_dual_abel_bc",
    "support_report",
]
