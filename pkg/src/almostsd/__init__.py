"""2DSD index, minimum violation ratio and bootstrap tests for almost stochastic dominance."""

from .bootstrap import (BootstrapConfig, BootstrapDistribution, case1_mvr_distribution,
                        case2_derivative_distribution, quantile, rate_and_bandwidth)
from .dominance import (Index2DSD, MVREstimate, Region, classify, index, mvr, phi, phi_hat_derivative,
                        tail_diagnostics)
from .empirical import OrderKind, Sample, gini, targets
from .errors import AlmostSDError
from .piecewise import PiecewiseFunction, integrate, restricted_integrals
from .testing import TestResult, TestSpec, min_rejected_epsilon, run_both, run_test

__version__ = "0.1.0"

__all__ = [
    "AlmostSDError",
    "BootstrapConfig",
    "BootstrapDistribution",
    "Index2DSD",
    "MVREstimate",
    "OrderKind",
    "PiecewiseFunction",
    "Region",
    "Sample",
    "TestResult",
    "TestSpec",
    "case1_mvr_distribution",
    "case2_derivative_distribution",
    "classify",
    "gini",
    "index",
    "integrate",
    "min_rejected_epsilon",
    "mvr",
    "phi",
    "phi_hat_derivative",
    "quantile",
    "rate_and_bandwidth",
    "restricted_integrals",
    "run_both",
    "run_test",
    "tail_diagnostics",
    "targets",
]
