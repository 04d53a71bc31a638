"""Empirical target functions built from raw samples.

Four orders are supported; each maps a sample to a piecewise function:

=============  ==========================================  ========
order          target                                      kind
=============  ==========================================  ========
``first``      ECDF ``F(x) = #{X_i <= x} / n``             step
``second``     ``int_{-inf}^t F``                          linear
``stop_loss``  ``int_t^inf (1 - F)``                       linear
``lorenz``     ``(1/mean) int_0^t F^{-1}``                 linear
=============  ==========================================  ========

Samples are kept as unique sorted values plus multiplicities, which is also
how bootstrap resamples are represented (see :func:`values_on_grid`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import PreconditionError
from .piecewise import PiecewiseFunction


class OrderKind(str, Enum):
    FIRST = "first"
    SECOND = "second"
    STOP_LOSS = "stop_loss"
    LORENZ = "lorenz"

    @classmethod
    def parse(cls, value) -> "OrderKind":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "_")
        aliases = {"stoploss": "stop_loss", "usual": "first", "1": "first", "2": "second"}
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise PreconditionError(f"unknown order {value!r}; expected one of "
                                    f"{', '.join(o.value for o in cls)}") from None

    @property
    def kind(self) -> str:
        return "step" if self is OrderKind.FIRST else "linear"

    @property
    def needs_positive(self) -> bool:
        return self is not OrderKind.FIRST


@dataclass(frozen=True, eq=False)
class Sample:
    """A finite univariate sample, stored as unique sorted values with counts."""

    support: np.ndarray
    counts: np.ndarray
    name: str = ""
    _mean: float = field(default=math.nan, repr=False)

    def __post_init__(self):
        for arr in (self.support, self.counts):
            arr.setflags(write=False)
        if math.isnan(self._mean):
            object.__setattr__(self, "_mean", _weighted_mean(self.support, self.counts))

    @classmethod
    def from_values(cls, values, name: str = "") -> "Sample":
        x = np.asarray(values, dtype=np.float64).ravel()
        if x.size == 0:
            raise PreconditionError("empty sample")
        if not np.all(np.isfinite(x)):
            raise PreconditionError("sample contains NaN or infinite values")
        support, counts = np.unique(x, return_counts=True)
        return cls(support, counts.astype(np.int64), name)

    @classmethod
    def from_counts(cls, support, counts, name: str = "") -> "Sample":
        """Build from a sorted support and nonnegative counts (zeros dropped)."""
        support = np.asarray(support, dtype=np.float64)
        counts = np.asarray(counts, dtype=np.int64)
        keep = counts > 0
        if not keep.any():
            raise PreconditionError("empty sample")
        return cls(support[keep], counts[keep], name)

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    @property
    def mean(self) -> float:
        return self._mean

    @property
    def min(self) -> float:
        return float(self.support[0])

    @property
    def max(self) -> float:
        return float(self.support[-1])

    @property
    def sorted_values(self) -> np.ndarray:
        return np.repeat(self.support, self.counts)

    def __len__(self):
        return self.n

    def check_order(self, order: OrderKind) -> None:
        order = OrderKind.parse(order)
        if order.needs_positive and self.support[0] < 0:
            raise PreconditionError(f"{order.value} order requires nonnegative values "
                                    f"(sample {self.name or '?'} has min {self.min:g})")
        if order is OrderKind.LORENZ and not self.mean > 0:
            raise PreconditionError("Lorenz order requires a positive mean")


def as_sample(x, name: str = "") -> Sample:
    return x if isinstance(x, Sample) else Sample.from_values(x, name)


def _weighted_mean(support, counts) -> float:
    n = int(counts.sum())
    # fsum keeps the mean independent of summation order
    return math.fsum((support * counts).tolist()) / n


@dataclass(frozen=True)
class EmpiricalTargets:
    order: OrderKind
    s_hat: PiecewiseFunction
    mean: float
    domain_hint: tuple[float, float]


def ecdf(sample) -> EmpiricalTargets:
    s = as_sample(sample)
    cum = np.cumsum(s.counts)
    values = cum[:-1] / s.n
    f = PiecewiseFunction(s.support, values, "step", left=0.0, right=1.0)
    return EmpiricalTargets(OrderKind.FIRST, f, s.mean, (s.min, s.max))


def integrated_cdf(sample, upper: float | None = None) -> EmpiricalTargets:
    """``t -> int_{-inf}^t F_n``; grid spans ``[0, max]``, or ``[0, upper]``."""
    s = as_sample(sample)
    s.check_order(OrderKind.SECOND)
    knots = s.support
    F = np.cumsum(s.counts) / s.n
    if knots[0] > 0:
        knots = np.concatenate(([0.0], knots))
        F = np.concatenate(([0.0], F))
    if upper is not None and upper > knots[-1]:
        knots = np.concatenate((knots, [float(upper)]))
        F = np.concatenate((F, [1.0]))
    # slope on [x_k, x_{k+1}) is F(x_k)
    values = np.concatenate(([0.0], np.cumsum(F[:-1] * np.diff(knots))))
    f = PiecewiseFunction(knots, values, "linear", left=0.0, right=None)
    return EmpiricalTargets(OrderKind.SECOND, f, s.mean, (0.0, float(knots[-1])))


def integrated_survival(sample, upper: float | None = None) -> EmpiricalTargets:
    """``t -> int_t^inf (1 - F_n)``; grid spans ``[0, max]`` (or ``upper``), zero beyond."""
    s = as_sample(sample)
    s.check_order(OrderKind.STOP_LOSS)
    knots = s.support
    F = np.cumsum(s.counts) / s.n
    if knots[0] > 0:
        knots = np.concatenate(([0.0], knots))
        F = np.concatenate(([0.0], F))
    if upper is not None and upper > knots[-1]:
        knots = np.concatenate((knots, [float(upper)]))
        F = np.concatenate((F, [1.0]))
    pieces = (1.0 - F[:-1]) * np.diff(knots)
    values = np.concatenate((np.cumsum(pieces[::-1])[::-1], [0.0]))
    f = PiecewiseFunction(knots, values, "linear", left=None, right=0.0)
    return EmpiricalTargets(OrderKind.STOP_LOSS, f, s.mean, (0.0, float(knots[-1])))


def lorenz(sample) -> EmpiricalTargets:
    s = as_sample(sample)
    s.check_order(OrderKind.LORENZ)
    n = s.n
    partial = np.concatenate(([0.0], np.cumsum(s.sorted_values)))
    values = partial / partial[-1]
    values[-1] = 1.0
    knots = np.arange(n + 1) / n
    f = PiecewiseFunction(knots, values, "linear")
    return EmpiricalTargets(OrderKind.LORENZ, f, s.mean, (0.0, 1.0))


def gini(sample) -> float:
    """Sample Gini index, ``sum_i (2i - n - 1) x_(i) / (n^2 mean)``.

    Algebraically identical to ``1 - 2 * int_0^1 L_n`` for the empirical
    Lorenz curve ``L_n``, but computed from order statistics directly.
    """
    s = as_sample(sample)
    s.check_order(OrderKind.LORENZ)
    x = s.sorted_values
    n = x.size
    ranks = np.arange(1, n + 1, dtype=np.float64)
    num = math.fsum(((2.0 * ranks - n - 1.0) * x).tolist())
    return num / (n * math.fsum(x.tolist()))


_BUILDERS = {
    OrderKind.FIRST: lambda s, upper: ecdf(s),
    OrderKind.SECOND: integrated_cdf,
    OrderKind.STOP_LOSS: integrated_survival,
    OrderKind.LORENZ: lambda s, upper: lorenz(s),
}


def targets(sample, order, upper: float | None = None) -> EmpiricalTargets:
    order = OrderKind.parse(order)
    return _BUILDERS[order](as_sample(sample), upper)


class GridEvaluator:
    """Evaluate a sample's target function on a fixed grid, for any reweighting.

    A bootstrap resample only ever takes values from the original sample, so
    its target function has knots inside the original pooled grid and can be
    written down exactly on that grid from the resampling counts alone.
    """

    def __init__(self, sample: Sample, order: OrderKind, grid: np.ndarray):
        self.sample = sample
        self.order = OrderKind.parse(order)
        self.grid = np.asarray(grid, dtype=np.float64)
        n = sample.n
        if self.order is OrderKind.LORENZ:
            self._own_knots = np.arange(n + 1) / n
        else:
            # F at grid point g is cum[pos] with pos = #{support <= g}
            self._pos = np.searchsorted(sample.support, self.grid, side="right")
            self._widths = np.diff(self.grid)

    def __call__(self, counts: np.ndarray) -> np.ndarray:
        n = self.sample.n
        if self.order is OrderKind.LORENZ:
            vals = np.repeat(self.sample.support, counts)
            partial = np.concatenate(([0.0], np.cumsum(vals)))
            own = partial / partial[-1]
            own[-1] = 1.0
            if self.grid.size == own.size and np.array_equal(self.grid, self._own_knots):
                return own
            return np.interp(self.grid, self._own_knots, own)
        cum = np.concatenate(([0], np.cumsum(counts)))
        F = cum[self._pos] / n
        if self.order is OrderKind.FIRST:
            return F[:-1]
        if self.order is OrderKind.SECOND:
            return np.concatenate(([0.0], np.cumsum(F[:-1] * self._widths)))
        pieces = (1.0 - F[:-1]) * self._widths
        return np.concatenate((np.cumsum(pieces[::-1])[::-1], [0.0]))
