"""2DSD index, minimum violation ratio and the functionals built on them.

The 2DSD index of a pair of target functions ``(s1, s2)`` over a domain ``D``
is ``(int_D (s1 - s2), int_D |s1 - s2|)``.  It always lies in the triangle
``|x| <= y``; it sits on the ray ``x = y`` exactly when ``s1 >= s2``
everywhere, and the minimum violation ratio is ``(1 - x/y) / 2``.

Domain conventions used for samples:

* ``first``: pooled ``[min, max]``; the ECDF difference vanishes outside,
  so this is the integral over the whole line.
* ``second`` / ``stop_loss``: pooled ``[min, max]`` (compact support).  With
  unequal means the difference does not vanish outside this range, see
  :func:`tail_diagnostics`.
* ``lorenz``: ``[0, 1]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .empirical import OrderKind, Sample, as_sample, targets
from .errors import ParameterError
from .piecewise import PiecewiseFunction, integrate, restricted_integrals, subtract

__all__ = [
    "Index2DSD",
    "MVREstimate",
    "Region",
    "Classification",
    "TailDiagnostics",
    "index",
    "index_from_diff",
    "target_difference",
    "index_domain",
    "mvr",
    "mvr_value",
    "classify",
    "phi",
    "phi_hat_derivative",
    "tail_diagnostics",
]


@dataclass(frozen=True)
class Index2DSD:
    signed: float
    abs: float
    order: OrderKind
    domain: tuple[float, float]

    def reversed(self) -> "Index2DSD":
        return Index2DSD(-self.signed, self.abs, self.order, self.domain)

    def as_tuple(self) -> tuple[float, float]:
        return (self.signed, self.abs)


@dataclass(frozen=True)
class MVREstimate:
    epsilon0: float
    direction: str
    degenerate: bool

    def reversed(self) -> "MVREstimate":
        flipped = {"12": "21", "21": "12"}.get(self.direction, self.direction)
        return MVREstimate(self.epsilon0 if self.degenerate else 1.0 - self.epsilon0, flipped, self.degenerate)


class Region(str, Enum):
    ON_L1 = "on_L1"
    ON_L2 = "on_L2"
    IN_R1_EPS = "in_R1_eps"
    IN_R2_EPS = "in_R2_eps"
    INTERIOR = "interior"


@dataclass(frozen=True)
class Classification:
    region: Region
    epsilon_used: float


@dataclass(frozen=True)
class TailDiagnostics:
    lambda21: tuple[float, float]
    lambda42: tuple[float, float]
    tail_constant: float
    truncation_ratio: dict = field(default_factory=dict)
    warnings: tuple[str, ...] = ()


def index_domain(s1: Sample, s2: Sample, order: OrderKind) -> tuple[float, float]:
    if order is OrderKind.LORENZ:
        return (0.0, 1.0)
    return (min(s1.min, s2.min), max(s1.max, s2.max))


def target_difference(sample1, sample2, order) -> tuple[PiecewiseFunction, tuple[float, float]]:
    """``s1_hat - s2_hat`` on the union grid, and the integration domain."""
    order = OrderKind.parse(order)
    s1, s2 = as_sample(sample1, "1"), as_sample(sample2, "2")
    s1.check_order(order)
    s2.check_order(order)
    domain = index_domain(s1, s2, order)
    upper = domain[1] if order in (OrderKind.SECOND, OrderKind.STOP_LOSS) else None
    t1 = targets(s1, order, upper).s_hat
    t2 = targets(s2, order, upper).s_hat
    return subtract(t1, t2), domain


def index_from_diff(diff: PiecewiseFunction, domain, order) -> Index2DSD:
    lo, hi = domain
    if hi <= lo:
        return Index2DSD(0.0, 0.0, OrderKind.parse(order), (lo, hi))
    r = integrate(diff, (lo, hi))
    return Index2DSD(r.signed, r.absolute, OrderKind.parse(order), (float(lo), float(hi)))


def index(sample1, sample2, order="first") -> Index2DSD:
    """Empirical 2DSD index of ``sample1`` against ``sample2``."""
    diff, domain = target_difference(sample1, sample2, order)
    return index_from_diff(diff, domain, order)


def mvr_value(signed: float, absolute: float) -> float:
    """``(1 - signed/abs) / 2``, or 0.5 when ``abs == 0``."""
    if absolute <= 0.0:
        return 0.5
    return min(1.0, max(0.0, 0.5 * (1.0 - signed / absolute)))


def mvr(idx: Index2DSD, direction: str = "12") -> MVREstimate:
    """MVR for 'sample 1 is dominated by sample 2' (``direction='12'``)."""
    if idx.abs <= 0.0:
        return MVREstimate(0.5, direction, True)
    return MVREstimate(mvr_value(idx.signed, idx.abs), direction, False)


def _check_epsilon(epsilon: float) -> float:
    epsilon = float(epsilon)
    if not (0.0 <= epsilon < 0.5):
        raise ParameterError(f"epsilon must lie in [0, 0.5), got {epsilon!r}")
    return epsilon


def default_tolerance(idx: Index2DSD) -> float:
    return 1e-9 * (1.0 + idx.abs)


def classify(idx: Index2DSD, epsilon: float = 0.0, tol: float | None = None) -> Classification:
    epsilon = _check_epsilon(epsilon)
    if tol is None:
        tol = default_tolerance(idx)
    x, y = idx.signed, idx.abs
    if abs(x - y) <= tol:
        region = Region.ON_L1
    elif abs(x + y) <= tol:
        region = Region.ON_L2
    elif y <= x / (1.0 - 2.0 * epsilon) + tol:
        region = Region.IN_R1_EPS
    elif y <= -x / (1.0 - 2.0 * epsilon) + tol:
        region = Region.IN_R2_EPS
    else:
        region = Region.INTERIOR
    return Classification(region, epsilon)


def phi(h, epsilon: float, domain=None) -> float:
    """``int h - (1 - 2 eps) ||h||`` for an index or a piecewise function."""
    epsilon = _check_epsilon(epsilon)
    if isinstance(h, PiecewiseFunction):
        r = integrate(h, domain)
        signed, absolute = r.signed, r.absolute
    elif isinstance(h, Index2DSD):
        signed, absolute = h.signed, h.abs
    else:
        signed, absolute = h
    return signed - (1.0 - 2.0 * epsilon) * absolute


def phi_hat_derivative(h: PiecewiseFunction, theta_hat: PiecewiseFunction, epsilon: float,
                       a_n: float, domain=None) -> float:
    """Estimated directional derivative of ``phi`` at ``theta_hat`` in direction ``h``."""
    epsilon = _check_epsilon(epsilon)
    linear, delta = derivative_components(h, theta_hat, a_n, domain)
    return linear - (1.0 - 2.0 * epsilon) * delta


def derivative_components(h: PiecewiseFunction, theta_hat: PiecewiseFunction, a_n: float,
                          domain=None) -> tuple[float, float]:
    """``(int h, delta_hat'(h))``; ``phi_hat' = int h - (1-2 eps) delta_hat'``."""
    on, off = restricted_integrals(h, theta_hat, a_n, domain)
    linear = integrate(h, domain).signed
    return linear, on + off


def _sqrt_survival_integrals(sample: Sample) -> tuple[float, float]:
    """Plug-in ``int_0^inf sqrt(P(|X|>x)) dx`` and ``int_0^inf x sqrt(P(|X|>x)) dx``."""
    a = np.abs(sample.sorted_values)
    support, counts = np.unique(a, return_counts=True)
    n = a.size
    # survival of |X| on [support[k-1], support[k]) is #{|X| > support[k-1]} / n
    knots = np.concatenate(([0.0], support)) if support[0] > 0 else support
    if support[0] > 0:
        counts = np.concatenate(([0], counts))
    tail = n - np.cumsum(counts)
    surv = tail[:-1] / n
    root = np.sqrt(surv)
    lo, hi = knots[:-1], knots[1:]
    l21 = math.fsum((root * (hi - lo)).tolist())
    l42 = math.fsum((root * (hi * hi - lo * lo) / 2.0).tolist())
    return l21, l42


def tail_diagnostics(sample1, sample2, order=None, threshold: float = 0.01) -> TailDiagnostics:
    """Plug-in tail integrability constants and the truncation caveat check.

    ``tail_constant`` is ``mean2 - mean1``: the limit of ``s1 - s2`` at
    ``+inf`` for the second order (and at ``-inf`` for stop-loss), i.e. the
    height of the part of the difference cut off by the compact domain.
    ``truncation_ratio`` relates it to the absolute index component.
    """
    s1, s2 = as_sample(sample1, "1"), as_sample(sample2, "2")
    l1, m1 = _sqrt_survival_integrals(s1)
    l2, m2 = _sqrt_survival_integrals(s2)
    tail_constant = s2.mean - s1.mean
    orders = [OrderKind.SECOND, OrderKind.STOP_LOSS] if order is None else [OrderKind.parse(order)]
    ratios, warns = {}, []
    for o in orders:
        if o not in (OrderKind.SECOND, OrderKind.STOP_LOSS):
            continue
        if s1.min < 0 or s2.min < 0:
            continue
        idx = index(s1, s2, o)
        ratio = math.inf if idx.abs == 0 and tail_constant != 0 else (
            0.0 if tail_constant == 0 else abs(tail_constant) / idx.abs)
        ratios[o.value] = ratio
        if ratio > threshold:
            warns.append(f"{o.value}: |mean2 - mean1| = {abs(tail_constant):.6g} is "
                         f"{ratio:.2%} of the absolute index; the difference of targets is not "
                         f"integrable outside the pooled range and the index is truncated there")
    return TailDiagnostics((l1, l2), (m1, m2), tail_constant, ratios, tuple(warns))
