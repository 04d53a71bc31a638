"""Bootstrap tests for almost stochastic dominance.

Null hypotheses on the minimum violation ratio ``eps0`` of "sample 1 is
dominated by sample 2" (swap with ``direction="21"``):

* variant ``a``: ``H0: eps0 >= eps`` (rejecting establishes eps-almost dominance)
* variant ``b``: ``H0: eps0 <= eps``
* variant ``c``: ``H0: eps0 == eps``

``case1`` uses bootstrap quantiles of the MVR and assumes the two target
functions touch on a null set.  ``case2`` uses the estimated directional
derivative with an enlarged contact set and is available for variant ``a``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Literal

import numpy as np

from .bootstrap import (BootstrapConfig, BootstrapDistribution, case1_mvr_distribution,
                        case2_derivative_distribution, quantile)
from .dominance import Index2DSD, index, mvr, phi
from .empirical import OrderKind, as_sample
from .errors import ComputationError, ParameterError

Variant = Literal["a", "b", "c"]
Method = Literal["case1", "case2"]
Direction = Literal["12", "21"]


@dataclass(frozen=True)
class TestSpec:
    variant: Variant = "a"
    epsilon: float = 0.05
    alpha: float = 0.05
    method: Method = "case1"
    order: OrderKind = OrderKind.FIRST
    direction: Direction = "12"

    __test__ = False  # not a pytest class

    def __post_init__(self):
        object.__setattr__(self, "order", OrderKind.parse(self.order))
        if self.variant not in ("a", "b", "c"):
            raise ParameterError(f"unknown variant {self.variant!r}")
        if self.method not in ("case1", "case2"):
            raise ParameterError(f"unknown method {self.method!r}")
        if self.direction not in ("12", "21"):
            raise ParameterError(f"direction must be '12' or '21', got {self.direction!r}")
        if not (0.0 <= self.epsilon < 0.5):
            raise ParameterError(f"epsilon must lie in [0, 0.5), got {self.epsilon!r}")
        if not (0.0 < self.alpha < 1.0):
            raise ParameterError(f"alpha must lie in (0, 1), got {self.alpha!r}")
        if self.method == "case2" and self.variant != "a":
            raise ParameterError(f"unsupported combination: case2 with variant {self.variant!r} "
                                 "(only variant 'a' has a contact-set rejection rule)")


@dataclass(frozen=True, eq=False)
class TestResult:
    reject: bool
    epsilon_hat0: float
    index: Index2DSD
    boot_quantiles: dict
    ci: tuple[float, float] | None
    statistic: float | None
    diagnostics: dict
    spec: TestSpec
    distribution: BootstrapDistribution = field(repr=False, default=None)

    __test__ = False


def confidence_interval(dist: BootstrapDistribution, alpha: float) -> tuple[float, float]:
    if not (0.0 < alpha < 1.0):
        raise ParameterError(f"alpha must lie in (0, 1), got {alpha!r}")
    return quantile(dist, alpha / 2.0), quantile(dist, 1.0 - alpha / 2.0)


def _oriented(sample1, sample2, direction):
    s1, s2 = as_sample(sample1, "1"), as_sample(sample2, "2")
    return (s1, s2) if direction == "12" else (s2, s1)


def case1_decision(dist: BootstrapDistribution, variant: str, epsilon: float, alpha: float):
    lo_q = quantile(dist, alpha)
    hi_q = quantile(dist, 1.0 - alpha)
    ci = confidence_interval(dist, alpha)
    if variant == "a":
        reject = epsilon >= hi_q
    elif variant == "b":
        reject = epsilon <= lo_q
    else:
        reject = not (ci[0] <= epsilon <= ci[1])
    quantiles = {"alpha": lo_q, "1-alpha": hi_q, "alpha/2": ci[0], "1-alpha/2": ci[1]}
    return bool(reject), quantiles, ci


def case2_decision(dist: BootstrapDistribution, idx: Index2DSD, epsilon: float, alpha: float):
    d = dist if dist.epsilon == epsilon else dist.at_epsilon(epsilon)
    c_hat = quantile(d, 1.0 - alpha)
    stat = dist.meta["r_n"] * phi(idx, epsilon)
    return bool(stat > c_hat), stat, c_hat


def run_test(sample1, sample2, spec: TestSpec, cfg: BootstrapConfig | None = None) -> TestResult:
    cfg = cfg or BootstrapConfig()
    x1, x2 = _oriented(sample1, sample2, spec.direction)
    idx = index(x1, x2, spec.order)
    est = mvr(idx, spec.direction)
    diagnostics = {"B": int(cfg.B), "seed": int(cfg.seed), "degenerate_index": est.degenerate}
    if spec.method == "case1":
        dist = case1_mvr_distribution(x1, x2, spec.order, cfg)
        reject, quantiles, ci = case1_decision(dist, spec.variant, spec.epsilon, spec.alpha)
        diagnostics["degenerate_replicates"] = dist.degenerate_count
        return TestResult(reject, est.epsilon0, idx, quantiles, ci, None, diagnostics, spec, dist)

    dist = case2_derivative_distribution(x1, x2, spec.order, spec.epsilon, cfg)
    reject, stat, c_hat = case2_decision(dist, idx, spec.epsilon, spec.alpha)
    diagnostics.update(r_n=dist.meta["r_n"], a_n=dist.meta["a_n"], c=cfg.case2_c)
    return TestResult(reject, est.epsilon0, idx, {"1-alpha": c_hat}, None, stat, diagnostics, spec, dist)


def run_both(sample1, sample2, spec: TestSpec, cfg: BootstrapConfig | None = None) -> dict[str, TestResult]:
    """Run the test in both directions; results are reported separately."""
    return {d: run_test(sample1, sample2, replace(spec, direction=d), cfg) for d in ("12", "21")}


def min_rejected_epsilon(sample1, sample2, spec: TestSpec, cfg: BootstrapConfig | None = None,
                         resolution: float = 1e-4) -> float:
    """Smallest ``eps`` at which the variant-``a`` test rejects.

    Case 1: the bootstrap ``(1 - alpha)``-quantile of the MVR.  Case 2:
    bisection over ``[0, 0.5)`` on the reject/accept boundary, all probes
    sharing the same bootstrap draws.  Returns 0.5 if no ``eps < 0.5`` rejects.
    """
    if spec.variant != "a":
        raise ParameterError("min_rejected_epsilon is defined for variant 'a' only")
    cfg = cfg or BootstrapConfig()
    x1, x2 = _oriented(sample1, sample2, spec.direction)
    if spec.method == "case1":
        dist = case1_mvr_distribution(x1, x2, spec.order, cfg)
        return quantile(dist, 1.0 - spec.alpha)

    idx = index(x1, x2, spec.order)
    dist = case2_derivative_distribution(x1, x2, spec.order, 0.0, cfg)
    return _bisect_case2(dist, idx, spec.alpha, resolution)


def _bisect_case2(dist, idx, alpha, resolution):
    top = 0.5 - resolution / 2.0

    def rejects(eps):
        return case2_decision(dist, idx, eps, alpha)[0]

    probes = [0.0, 0.25, top]
    decisions = [rejects(e) for e in probes]
    if any(a and not b for a, b in zip(decisions, decisions[1:])):
        raise ComputationError(f"case2 decision is not monotone in epsilon (probes {probes} -> {decisions})")
    if decisions[0]:
        return 0.0
    if not decisions[-1]:
        return 0.5
    lo, hi = (0.0, 0.25) if decisions[1] else (0.25, top)
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        if rejects(mid):
            hi = mid
        else:
            lo = mid
    return hi


def decisions_over_grid(dist: BootstrapDistribution, idx: Index2DSD, epsilons, alpha: float,
                        method: str = "case1") -> np.ndarray:
    """Variant-``a`` decisions for several ``eps`` from a single bootstrap run."""
    eps = np.asarray(epsilons, dtype=np.float64)
    if method == "case1":
        return eps >= quantile(dist, 1.0 - alpha)
    out = np.empty(eps.size, dtype=bool)
    for i, e in enumerate(eps.tolist()):
        out[i] = case2_decision(dist, idx, e, alpha)[0]
    return out
