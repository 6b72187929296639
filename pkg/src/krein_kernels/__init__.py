"""Indefinite reproducing kernels, generalized Schur realizations and their quaternionic analogues."""

from .errors import *  # noqa: F401,F403
from .indefinite_linalg import (  # noqa: F401
    Inertia,
    Metric,
    MetricMap,
    defect_factorization,
    direct_sum,
    herm_eig,
    indef_adjoint,
    inertia,
    is_coisometric,
)
from .rng import SplitMix64  # noqa: F401

__version__ = "0.1.0"
