"""Seeded, parallel bootstrap for the MVR and the contact-set statistic.

Every replicate ``b`` draws sample ``j`` from its own generator, keyed by
``(seed, b, j)``.  Replicates can therefore be computed in any order, on any
number of worker processes, and the merged distribution is bitwise identical.

A resample only reuses values of the original sample, so its target
function has all its knots on the pooled grid of the original data.  The
engine therefore fixes that grid once and evaluates each replicate's targets
on it from the resampling counts (:class:`~almostsd.empirical.GridEvaluator`).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Literal

import numpy as np

from .dominance import index_domain, mvr_value
from .empirical import GridEvaluator, OrderKind, Sample, as_sample
from .errors import ParameterError
from .piecewise import PiecewiseFunction, _integrate_arrays, _restricted_arrays

Resampler = Callable[[Sample, np.random.Generator], np.ndarray]


def available_cpus() -> int:
    try:
        return len(os.sched_getaffinity(0)) or 1
    except AttributeError:
        return os.cpu_count() or 1


@dataclass(frozen=True)
class BootstrapConfig:
    B: int = 2000
    seed: int = 0
    case2_c: float = 0.01
    parallelism: int | str = 1

    def __post_init__(self):
        if int(self.B) < 1:
            raise ParameterError(f"B must be a positive integer, got {self.B!r}")
        if not self.case2_c > 0:
            raise ParameterError(f"case2_c must be positive, got {self.case2_c!r}")
        if self.parallelism != "auto" and int(self.parallelism) < 1:
            raise ParameterError(f"parallelism must be >= 1 or 'auto', got {self.parallelism!r}")

    @property
    def workers(self) -> int:
        if self.parallelism == "auto":
            return available_cpus()
        return int(self.parallelism)


@dataclass(frozen=True)
class RateAndBandwidth:
    r_n: float
    a_n: float


def rate_and_bandwidth(n1: int, n2: int, c: float) -> RateAndBandwidth:
    """``r_n = sqrt(n1 n2 / (n1 + n2))`` and ``a_n = c log(n1 n2 / (n1 + n2)) / r_n``."""
    m = n1 * n2 / (n1 + n2)
    r = math.sqrt(m)
    a = c * math.log(m) / r
    if not a > 0:
        raise ParameterError(f"invalid enlargement: a_n = {a!r} for n1={n1}, n2={n2}, c={c}; "
                             "needs n1 n2 / (n1 + n2) > 1 and c > 0")
    return RateAndBandwidth(r, a)


@dataclass(frozen=True, eq=False)
class BootstrapDistribution:
    """Bootstrap replicates of one statistic.

    ``statistic_kind == "mvr"``: ``values`` are the MVRs of the replicates and
    ``signed`` / ``absolute`` their 2DSD indices.

    ``statistic_kind == "derivative"``: ``values`` are
    ``linear - (1 - 2 eps) * delta`` where ``linear = int h`` and ``delta`` is
    the estimated derivative of the L1 norm in direction
    ``h = r_n (theta* - theta_hat)``.  Neither component depends on ``eps``,
    so :meth:`at_epsilon` re-targets the distribution without resampling.
    """

    values: np.ndarray
    degenerate_count: int
    statistic_kind: Literal["mvr", "derivative"]
    signed: np.ndarray | None = None
    absolute: np.ndarray | None = None
    linear: np.ndarray | None = None
    delta: np.ndarray | None = None
    epsilon: float | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        for arr in (self.values, self.signed, self.absolute, self.linear, self.delta):
            if arr is not None:
                arr.setflags(write=False)

    @property
    def B(self) -> int:
        return int(self.values.size)

    def __len__(self):
        return self.B

    def quantile(self, q: float) -> float:
        return quantile(self, q)

    def at_epsilon(self, epsilon: float) -> "BootstrapDistribution":
        if self.statistic_kind != "derivative":
            raise ParameterError("only derivative distributions can be re-targeted in epsilon")
        values = self.linear - (1.0 - 2.0 * epsilon) * self.delta
        return BootstrapDistribution(values, self.degenerate_count, "derivative",
                                     linear=self.linear, delta=self.delta, epsilon=float(epsilon),
                                     meta=self.meta)


def order_statistic_index(B: int, q: float) -> int:
    """1-based rank ``ceil(B q)`` of the ``q``-quantile, clamped to ``[1, B]``."""
    if not (0.0 < q < 1.0):
        raise ParameterError(f"quantile level must lie in (0, 1), got {q!r}")
    # round away representation noise such as 2000 * 0.95 = 1900.0000000000002
    k = math.ceil(round(B * q, 9))
    return min(max(k, 1), B)


def quantile(dist: BootstrapDistribution | np.ndarray, q: float) -> float:
    values = dist.values if isinstance(dist, BootstrapDistribution) else np.asarray(dist)
    k = order_statistic_index(values.size, q)
    return float(np.partition(values, k - 1)[k - 1])


def replicate_rng(seed: int, replicate: int, sample_id: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(replicate), int(sample_id)))
    return np.random.Generator(np.random.Philox(ss))


def _uniform_counts(sample: Sample, rng: np.random.Generator) -> np.ndarray:
    n = sample.n
    draws = rng.integers(0, n, size=n)
    if sample.support.size == n:
        return np.bincount(draws, minlength=n)
    owner = np.repeat(np.arange(sample.support.size), sample.counts)
    return np.bincount(owner[draws], minlength=sample.support.size)


def resample(sample, rng: np.random.Generator) -> Sample:
    """``n`` draws with replacement from the empirical distribution of ``sample``."""
    s = as_sample(sample)
    return Sample.from_counts(s.support, _uniform_counts(s, rng), s.name)


def pooled_grid(s1: Sample, s2: Sample, order: OrderKind) -> np.ndarray:
    if order is OrderKind.LORENZ:
        return np.union1d(np.arange(s1.n + 1) / s1.n, np.arange(s2.n + 1) / s2.n)
    return np.union1d(s1.support, s2.support)


class _Engine:
    """Everything a worker needs to compute a block of replicates."""

    def __init__(self, s1: Sample, s2: Sample, order: OrderKind, seed: int,
                 resampler: Resampler | None = None):
        for s in (s1, s2):
            s.check_order(order)
        self.s1, self.s2, self.order, self.seed = s1, s2, order, int(seed)
        self.kind = order.kind
        self.grid = pooled_grid(s1, s2, order)
        self.domain = index_domain(s1, s2, order)
        self.ev1 = GridEvaluator(s1, order, self.grid)
        self.ev2 = GridEvaluator(s2, order, self.grid)
        self.resampler = resampler
        self.theta = self.ev1(s1.counts) - self.ev2(s2.counts)
        self.rate: RateAndBandwidth | None = None

    def counts(self, b: int):
        draw = self.resampler or _uniform_counts
        c1 = draw(self.s1, replicate_rng(self.seed, b, 1))
        c2 = draw(self.s2, replicate_rng(self.seed, b, 2))
        return c1, c2

    def theta_star(self, b: int) -> np.ndarray:
        c1, c2 = self.counts(b)
        return self.ev1(c1) - self.ev2(c2)

    def degenerate_grid(self) -> bool:
        return self.grid.size < 2

    def mvr_block(self, start: int, stop: int):
        m = stop - start
        signed = np.zeros(m)
        absolute = np.zeros(m)
        if not self.degenerate_grid():
            for i, b in enumerate(range(start, stop)):
                r = _integrate_arrays(self.grid, self.theta_star(b), self.kind)
                signed[i], absolute[i] = r.signed, r.absolute
        return signed, absolute

    def derivative_block(self, start: int, stop: int):
        m = stop - start
        linear = np.zeros(m)
        delta = np.zeros(m)
        if self.degenerate_grid():
            return linear, delta
        r_n, a_n = self.rate.r_n, self.rate.a_n
        for i, b in enumerate(range(start, stop)):
            h = r_n * (self.theta_star(b) - self.theta)
            on, off = _restricted_arrays(self.grid, h, self.theta, a_n, self.kind)
            linear[i] = _integrate_arrays(self.grid, h, self.kind).signed
            delta[i] = on + off
        return linear, delta

    def theta_function(self) -> PiecewiseFunction:
        if self.degenerate_grid():
            return PiecewiseFunction(self.grid, np.empty(0), "step", 0.0, 0.0)
        return PiecewiseFunction(self.grid, self.theta, self.kind, check=False)


def _call_block(engine: _Engine, method: str, start: int, stop: int):
    return getattr(engine, method)(start, stop)


def _blocks(B: int, workers: int) -> list[tuple[int, int]]:
    size = max(1, math.ceil(B / (4 * workers)))
    return [(s, min(s + size, B)) for s in range(0, B, size)]


def _run(engine: _Engine, method: str, cfg: BootstrapConfig):
    B, workers = int(cfg.B), cfg.workers
    if engine.resampler is not None or workers <= 1 or B < 2:
        return getattr(engine, method)(0, B)
    blocks = _blocks(B, workers)
    with ProcessPoolExecutor(max_workers=min(workers, len(blocks))) as pool:
        parts = list(pool.map(_call_block, [engine] * len(blocks), [method] * len(blocks),
                              [b[0] for b in blocks], [b[1] for b in blocks]))
    return tuple(np.concatenate([p[k] for p in parts]) for k in range(2))


def case1_mvr_distribution(sample1, sample2, order, cfg: BootstrapConfig,
                           resampler: Resampler | None = None) -> BootstrapDistribution:
    """Standard bootstrap distribution of the MVR estimator."""
    order = OrderKind.parse(order)
    engine = _Engine(as_sample(sample1, "1"), as_sample(sample2, "2"), order, cfg.seed, resampler)
    signed, absolute = _run(engine, "mvr_block", cfg)
    degenerate = absolute <= 0.0
    values = np.array([mvr_value(s, a) for s, a in zip(signed.tolist(), absolute.tolist())])
    return BootstrapDistribution(values, int(degenerate.sum()), "mvr", signed=signed, absolute=absolute,
                                 meta={"domain": engine.domain, "grid_size": int(engine.grid.size)})


def case2_derivative_distribution(sample1, sample2, order, epsilon: float, cfg: BootstrapConfig,
                                  resampler: Resampler | None = None) -> BootstrapDistribution:
    """Bootstrap distribution of ``phi_hat'(r_n (theta* - theta_hat))`` at ``epsilon``.

    ``theta_hat`` and ``a_n`` come from the original samples and are shared
    by all replicates.
    """
    if not (0.0 <= epsilon < 0.5):
        raise ParameterError(f"epsilon must lie in [0, 0.5), got {epsilon!r}")
    order = OrderKind.parse(order)
    engine = case2_engine(sample1, sample2, order, cfg, resampler)
    linear, delta = _run(engine, "derivative_block", cfg)
    values = linear - (1.0 - 2.0 * epsilon) * delta
    return BootstrapDistribution(values, 0, "derivative", linear=linear, delta=delta,
                                 epsilon=float(epsilon),
                                 meta={"r_n": engine.rate.r_n, "a_n": engine.rate.a_n,
                                       "c": cfg.case2_c, "domain": engine.domain,
                                       "grid_size": int(engine.grid.size)})


def case2_engine(sample1, sample2, order, cfg: BootstrapConfig,
                 resampler: Resampler | None = None) -> _Engine:
    s1, s2 = as_sample(sample1, "1"), as_sample(sample2, "2")
    engine = _Engine(s1, s2, OrderKind.parse(order), cfg.seed, resampler)
    engine.rate = rate_and_bandwidth(s1.n, s2.n, cfg.case2_c)
    return engine
