"""Simulation scenarios, population-level MVR oracles and power curves.

The oracle works from closed-form CDFs only (error function, regularized
incomplete beta) and never touches the empirical code path: it locates the
crossings of the two population target functions by root-finding and then
integrates each signed piece by adaptive quadrature.
"""

from __future__ import annotations

import json
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy import integrate, optimize, special

from .bootstrap import (BootstrapConfig, available_cpus, case1_mvr_distribution, case2_derivative_distribution,
                        quantile)
from .dominance import index, mvr
from .empirical import OrderKind, Sample
from .errors import ComputationError, ParameterError, PreconditionError
from .testing import decisions_over_grid

TAIL_PROB = 1e-10


# --------------------------------------------------------------------------
# distribution families


@dataclass(frozen=True)
class LogNormal:
    mu: float
    sigma: float
    family = "lognormal"
    positive = True

    def __post_init__(self):
        if not self.sigma > 0:
            raise ParameterError(f"lognormal sigma must be positive, got {self.sigma}")

    def cdf(self, x: float) -> float:
        if x <= 0:
            return 0.0
        return float(special.ndtr((math.log(x) - self.mu) / self.sigma))

    def sf(self, x: float) -> float:
        if x <= 0:
            return 1.0
        return float(special.ndtr(-(math.log(x) - self.mu) / self.sigma))

    def ppf(self, u: float) -> float:
        return math.exp(self.mu + self.sigma * float(special.ndtri(u)))

    @property
    def mean(self) -> float:
        return math.exp(self.mu + 0.5 * self.sigma ** 2)

    def partial_moment(self, x: float) -> float:
        """``E[X; X <= x]``."""
        if x <= 0:
            return 0.0
        return self.mean * float(special.ndtr((math.log(x) - self.mu - self.sigma ** 2) / self.sigma))

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return np.exp(self.mu + self.sigma * rng.standard_normal(n))

    def to_dict(self):
        return {"family": self.family, "mu": self.mu, "sigma": self.sigma}


@dataclass(frozen=True)
class Normal:
    mu: float
    sigma: float
    family = "normal"
    positive = False

    def __post_init__(self):
        if not self.sigma > 0:
            raise ParameterError(f"normal sigma must be positive, got {self.sigma}")

    def cdf(self, x: float) -> float:
        return float(special.ndtr((x - self.mu) / self.sigma))

    def sf(self, x: float) -> float:
        return float(special.ndtr(-(x - self.mu) / self.sigma))

    def ppf(self, u: float) -> float:
        return self.mu + self.sigma * float(special.ndtri(u))

    @property
    def mean(self) -> float:
        return self.mu

    def partial_moment(self, x: float) -> float:
        z = (x - self.mu) / self.sigma
        return self.mu * float(special.ndtr(z)) - self.sigma * math.exp(-0.5 * z * z) / math.sqrt(2 * math.pi)

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return self.mu + self.sigma * rng.standard_normal(n)

    def to_dict(self):
        return {"family": self.family, "mu": self.mu, "sigma": self.sigma}


def gb2_unit_mean_scale(a: float, p: float, q: float) -> float:
    """Scale ``b`` making the GB2(a, b, p, q) mean equal to one."""
    if not (a > 0 and p > 0 and q > 0):
        raise ParameterError("GB2 shape parameters must be positive")
    if not q > 1.0 / a:
        raise ParameterError(f"infinite mean: GB2 needs q > 1/a (q={q}, a={a})")
    return math.exp(special.betaln(p, q) - special.betaln(p + 1.0 / a, q - 1.0 / a))


@dataclass(frozen=True)
class GB2:
    """Generalized beta of the second kind, density ``a x^{ap-1} / (b^{ap} B(p,q) (1+(x/b)^a)^{p+q})``."""

    a: float
    b: float
    p: float
    q: float
    family = "gb2"
    positive = True

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0 and self.p > 0 and self.q > 0):
            raise ParameterError("GB2 parameters must be positive")
        if not self.q > 1.0 / self.a:
            raise ParameterError(f"infinite mean: GB2 needs q > 1/a (q={self.q}, a={self.a})")

    @classmethod
    def unit_mean(cls, a: float, p: float, q: float) -> "GB2":
        return cls(a, gb2_unit_mean_scale(a, p, q), p, q)

    def _z(self, x: float) -> float:
        # (x/b)^a / (1 + (x/b)^a) without overflow
        t = self.a * (math.log(x) - math.log(self.b))
        return float(special.expit(t))

    def cdf(self, x: float) -> float:
        if x <= 0:
            return 0.0
        return float(special.betainc(self.p, self.q, self._z(x)))

    def sf(self, x: float) -> float:
        if x <= 0:
            return 1.0
        return float(special.betaincc(self.p, self.q, self._z(x)))

    def ppf(self, u: float) -> float:
        z = float(special.betaincinv(self.p, self.q, u))
        return self.b * (z / (1.0 - z)) ** (1.0 / self.a)

    @property
    def mean(self) -> float:
        return self.b * math.exp(special.betaln(self.p + 1 / self.a, self.q - 1 / self.a)
                                 - special.betaln(self.p, self.q))

    def partial_moment(self, x: float) -> float:
        if x <= 0:
            return 0.0
        return self.mean * float(special.betainc(self.p + 1 / self.a, self.q - 1 / self.a, self._z(x)))

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        gp = rng.standard_gamma(self.p, n)
        gq = rng.standard_gamma(self.q, n)
        return self.b * (gp / gq) ** (1.0 / self.a)

    def to_dict(self):
        return {"family": self.family, "a": self.a, "b": self.b, "p": self.p, "q": self.q}


@dataclass(frozen=True)
class Piece:
    lo: float
    hi: float
    weight: float
    dist: object


@dataclass(frozen=True)
class Composite:
    """Weighted combination of components truncated to intervals ``(lo, hi]``.

    ``F(x) = sum_k w_k * P(X_k <= x | lo_k < X_k <= hi_k)``.  With disjoint
    intervals this splices distributions together; with overlapping ones it
    is an ordinary mixture.
    """

    pieces: tuple[Piece, ...]
    family = "composite"

    def __post_init__(self):
        w = [p.weight for p in self.pieces]
        if not self.pieces or any(x < 0 for x in w) or abs(sum(w) - 1.0) > 1e-12:
            raise ParameterError("composite weights must be nonnegative and sum to one")
        for p in self.pieces:
            if not p.hi > p.lo:
                raise ParameterError(f"empty composite interval ({p.lo}, {p.hi}]")

    @property
    def positive(self) -> bool:
        return all(p.lo >= 0 or getattr(p.dist, "positive", False) for p in self.pieces)

    def _mass(self, p: Piece) -> tuple[float, float]:
        lo = p.dist.cdf(p.lo) if math.isfinite(p.lo) else 0.0
        hi = p.dist.cdf(p.hi) if math.isfinite(p.hi) else 1.0
        return lo, hi - lo

    def cdf(self, x: float) -> float:
        total = 0.0
        for p in self.pieces:
            if x <= p.lo:
                continue
            if x >= p.hi:
                total += p.weight
                continue
            lo, mass = self._mass(p)
            total += p.weight * (p.dist.cdf(x) - lo) / mass
        return min(total, 1.0)

    def sf(self, x: float) -> float:
        total = 0.0
        for p in self.pieces:
            if x >= p.hi:
                continue
            if x <= p.lo:
                total += p.weight
                continue
            hi_sf = p.dist.sf(p.hi) if math.isfinite(p.hi) else 0.0
            _, mass = self._mass(p)
            total += p.weight * (p.dist.sf(x) - hi_sf) / mass
        return min(total, 1.0)

    def ppf(self, u: float) -> float:
        return _quantile_by_root(self, u)

    @property
    def mean(self) -> float:
        return sum(p.weight * self._piece_moment(p, p.hi) for p in self.pieces)

    def _piece_moment(self, p: Piece, x: float) -> float:
        """``E[X_k; lo_k < X_k <= x] / P(lo_k < X_k <= hi_k)``."""
        x = min(x, p.hi)
        if x <= p.lo:
            return 0.0
        lo_m = p.dist.partial_moment(p.lo) if math.isfinite(p.lo) else 0.0
        hi_m = p.dist.partial_moment(x) if math.isfinite(x) else p.dist.mean
        return (hi_m - lo_m) / self._mass(p)[1]

    def partial_moment(self, x: float) -> float:
        return sum(p.weight * self._piece_moment(p, x) for p in self.pieces)

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        w = np.array([p.weight for p in self.pieces])
        which = rng.choice(len(self.pieces), size=n, p=w / w.sum())
        u = rng.random(n)
        out = np.empty(n)
        for k, p in enumerate(self.pieces):
            sel = which == k
            lo, mass = self._mass(p)
            uu = lo + u[sel] * mass
            out[sel] = [p.dist.ppf(v) for v in uu.tolist()]
            np.clip(out[sel], p.lo, p.hi, out=out[sel])
        return out

    def to_dict(self):
        return {"family": self.family,
                "pieces": [{"lo": p.lo, "hi": p.hi, "weight": p.weight, "dist": p.dist.to_dict()}
                           for p in self.pieces]}


def scenario4_substitute(cut: float = 1.0, tail=None) -> Composite:
    """Population 2 of the contact-set scenario.

    Equal to LN(1, 1) on ``(0, cut]`` (same mass, same shape), and a
    truncated ``tail`` lognormal beyond ``cut``.  The two CDFs therefore
    coincide on ``[0, cut]`` exactly and cross once further right.
    """
    base = LogNormal(1.0, 1.0)
    tail = tail or LogNormal(-0.6, 2.0)
    w = base.cdf(cut)
    return Composite((Piece(0.0, cut, w, base), Piece(cut, math.inf, 1.0 - w, tail)))


def distribution_from_dict(d: dict):
    family = str(d.get("family", "")).lower()
    if family == "lognormal":
        return LogNormal(float(d["mu"]), float(d["sigma"]))
    if family == "normal":
        return Normal(float(d["mu"]), float(d["sigma"]))
    if family == "gb2":
        a, p, q = float(d["a"]), float(d["p"]), float(d["q"])
        if d.get("b") is None or d.get("unit_mean"):
            return GB2.unit_mean(a, p, q)
        return GB2(a, float(d["b"]), p, q)
    if family == "composite":
        pieces = tuple(Piece(float(x.get("lo", -math.inf)), float(x.get("hi", math.inf)),
                             float(x["weight"]), distribution_from_dict(x["dist"]))
                       for x in d["pieces"])
        return Composite(pieces)
    raise ParameterError(f"unknown distribution family {d.get('family')!r}")


def sample_from(spec, n: int, rng: np.random.Generator, name: str = "") -> Sample:
    if n < 1:
        raise ParameterError(f"sample size must be >= 1, got {n}")
    return Sample.from_values(spec.sample(int(n), rng), name)


# --------------------------------------------------------------------------
# scenarios


@dataclass(frozen=True)
class ScenarioSpec:
    """A pair of populations and the direction under test.

    ``direction="12"`` tests "population 1 is dominated by population 2";
    ``"21"`` the reverse.  ``reference_mvr`` is the published reference MVR for
    that direction, when there is one.
    """

    id: str
    pop1: object
    pop2: object
    order: OrderKind
    direction: str
    reference_mvr: float | None = None

    def oriented(self):
        return (self.pop1, self.pop2) if self.direction == "12" else (self.pop2, self.pop1)

    def to_dict(self):
        return {"id": self.id, "pop1": self.pop1.to_dict(), "pop2": self.pop2.to_dict(),
                "order": self.order.value, "direction": self.direction, "reference_mvr": self.reference_mvr}


def builtin_scenarios() -> dict[str, ScenarioSpec]:
    return {
        "1": ScenarioSpec("1", LogNormal(2.0, 1.0), LogNormal(1.0, 1.5), OrderKind.FIRST, "21", 0.127290),
        "2": ScenarioSpec("2", LogNormal(1.0, 1.0), LogNormal(1.0, 1.5), OrderKind.FIRST, "12", 0.036160),
        "3": ScenarioSpec("3", GB2.unit_mean(2.0, 0.8, 1.5), GB2.unit_mean(9.0, 0.1, 7.0),
                          OrderKind.LORENZ, "21", 0.063151),
        "4sub": ScenarioSpec("4sub", LogNormal(1.0, 1.0), scenario4_substitute(), OrderKind.FIRST, "12", None),
    }


def get_scenario(key) -> ScenarioSpec:
    key = str(key)
    table = builtin_scenarios()
    if key in table:
        return table[key]
    if key == "4":
        return table["4sub"]
    path = Path(key)
    if path.exists():
        return scenario_from_file(path)
    raise ParameterError(f"unknown scenario {key!r}; use 1, 2, 3, 4sub or a JSON file")


def scenario_from_file(path) -> ScenarioSpec:
    with open(path, encoding="utf-8") as fh:
        d = json.load(fh)
    return ScenarioSpec(str(d.get("id", Path(path).stem)), distribution_from_dict(d["pop1"]),
                        distribution_from_dict(d["pop2"]), OrderKind.parse(d.get("order", "first")),
                        str(d.get("direction", "12")), d.get("reference_mvr"))


# --------------------------------------------------------------------------
# population oracle


@dataclass(frozen=True)
class OracleResult:
    epsilon0: float
    signed: float
    abs: float
    crossings: tuple[float, ...]
    domain: tuple[float, float]
    truncation_bound: float
    degenerate: bool


def _quantile_by_root(dist, u: float) -> float:
    """Quantile by bracketing root search on the CDF."""
    if u <= 0.0:
        return 0.0 if getattr(dist, "positive", False) else -math.inf
    if u >= 1.0:
        return math.inf
    if getattr(dist, "positive", False):
        lo, hi = -1.0, 1.0
        while dist.cdf(math.exp(lo)) > u:
            lo *= 2.0
            if lo < -745:
                return 0.0
        while dist.cdf(math.exp(hi)) < u:
            hi *= 2.0
            if hi > 709:
                raise ComputationError(f"quantile {u} beyond floating range")
        f = lambda t: dist.cdf(math.exp(t)) - u
        if f(lo) == 0.0:
            return math.exp(lo)
        return math.exp(optimize.brentq(f, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=500))
    lo, hi = -1.0, 1.0
    while dist.cdf(lo) > u:
        lo *= 2.0
    while dist.cdf(hi) < u:
        hi *= 2.0
    return optimize.brentq(lambda x: dist.cdf(x) - u, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps,
                           maxiter=500)


def _lower_quantile(dist, u):
    return dist.ppf(u) if hasattr(dist, "ppf") else _quantile_by_root(dist, u)


def _support_box(d1, d2) -> tuple[float, float, bool]:
    positive = getattr(d1, "positive", False) and getattr(d2, "positive", False)
    lo = min(_lower_quantile(d1, TAIL_PROB), _lower_quantile(d2, TAIL_PROB))
    hi = max(_lower_quantile(d1, 1 - TAIL_PROB), _lower_quantile(d2, 1 - TAIL_PROB))
    return lo, hi, positive


def _cells(lo, hi, positive, count):
    if positive and lo > 0:
        return np.geomspace(lo, hi, count)
    return np.linspace(lo, hi, count)


def _signed_pieces(func, grid, quad_cell, xtol=1e-12, zero_tol=1e-14):
    """Integrate ``func`` over ``grid`` split at its sign changes.

    Returns (signed, absolute, roots).  ``quad_cell(a, b)`` integrates func on a
    subinterval; it receives pieces on which func has constant sign.  Grid
    values below ``zero_tol`` in magnitude count as contact, not crossings.
    """
    vals = np.array([func(x) for x in grid.tolist()])
    vals[np.abs(vals) <= zero_tol] = 0.0
    roots = []
    pieces = []  # (a, b, sign)
    for a, b, fa, fb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if fa * fb < 0:
            r = optimize.brentq(func, a, b, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=500)
            roots.append(r)
            pieces.append((a, r))
            pieces.append((r, b))
        else:
            pieces.append((a, b))
    signed = 0.0
    absolute = 0.0
    run_sign, run_total = 0.0, 0.0
    for a, b in pieces:
        part = quad_cell(a, b)
        mid_sign = math.copysign(1.0, part) if part != 0.0 else 0.0
        if mid_sign != run_sign and run_sign != 0.0:
            absolute += abs(run_total)
            run_total = 0.0
        if mid_sign != 0.0:
            run_sign = mid_sign
        run_total += part
        signed += part
    absolute += abs(run_total)
    return signed, absolute, tuple(roots)


def _quad(f, a, b):
    with warnings.catch_warnings():
        # roundoff warnings come from cells where the integrand is ~0
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, _err = integrate.quad(f, a, b, limit=200, epsabs=1e-15, epsrel=1e-12)
    return float(val)


def _oracle_first(d1, d2):
    lo, hi, positive = _support_box(d1, d2)
    if positive:
        lo = max(lo, 1e-300)
    diff = lambda x: d1.cdf(x) - d2.cdf(x)
    grid = _cells(lo, hi, positive, 4001)
    signed, absolute, roots = _signed_pieces(diff, grid, lambda a, b: _quad(diff, a, b))
    # Beyond the extreme quantiles F1 - F2 is integrated in one piece each
    # side (via survival functions on the right to avoid cancellation).  This
    # is exact unless the difference changes sign out there; the reported
    # bound is the total tail mass, which caps the error in that case.
    left_start = 0.0 if positive else -math.inf
    right_tail = _quad(lambda x: d2.sf(x) - d1.sf(x), hi, math.inf)
    left_tail = _quad(diff, left_start, lo) if lo > left_start else 0.0
    signed += right_tail + left_tail
    absolute += abs(right_tail) + abs(left_tail)
    right = _quad(lambda x: d1.sf(x) + d2.sf(x), hi, math.inf)
    left = _quad(lambda x: d1.cdf(x) + d2.cdf(x), left_start, lo) if lo > left_start else 0.0
    return signed, absolute, roots, (lo, hi), right + left


def _oracle_integrated(d1, d2, survival: bool):
    """Second-order / stop-loss differences on the truncated support box."""
    lo, hi, positive = _support_box(d1, d2)
    if positive:
        lo = max(lo, 1e-300)
    d = lambda x: d1.cdf(x) - d2.cdf(x)
    grid = _cells(lo, hi, positive, 1501)
    cell = np.array([_quad(d, a, b) for a, b in zip(grid[:-1], grid[1:])])
    if not survival:
        # D(t) = int_lo^t (F1 - F2)
        base = np.concatenate(([0.0], np.cumsum(cell)))

        def D(t):
            i = min(max(int(np.searchsorted(grid, t, side="right")) - 1, 0), grid.size - 2)
            return base[i] + _quad(d, grid[i], t)

        def piece(a, b):
            i = min(max(int(np.searchsorted(grid, a, side="right")) - 1, 0), grid.size - 2)
            # int_a^b D = (b - a) D(a) + int_a^b (b - x) d(x) dx
            return (b - a) * D(a) + _quad(lambda x: (b - x) * d(x), a, b)
    else:
        # S(t) = int_t^hi (F2 - F1)
        base = np.concatenate((np.cumsum(-cell[::-1])[::-1], [0.0]))

        def D(t):
            i = min(max(int(np.searchsorted(grid, t, side="left")), 1), grid.size - 1)
            return base[i] - _quad(d, t, grid[i])

        def piece(a, b):
            # int_a^b S = (b - a) S(b) + int_a^b (x - a)(F2 - F1)(x) dx
            return (b - a) * D(b) - _quad(lambda x: (x - a) * d(x), a, b)

    signed, absolute, roots = _signed_pieces(D, grid, piece)
    right = _quad(lambda x: d1.sf(x) + d2.sf(x), hi, math.inf)
    return signed, absolute, roots, (lo, hi), right


def _lorenz_curve(dist):
    mu = dist.mean

    def ell(t):
        if t <= 0.0:
            return 0.0
        if t >= 1.0:
            return 1.0
        return dist.partial_moment(_quantile_by_root(dist, t)) / mu
    return ell


def _oracle_lorenz(d1, d2):
    for d in (d1, d2):
        if not getattr(d, "positive", False):
            raise PreconditionError("Lorenz oracle needs positive distributions")
    l1, l2 = _lorenz_curve(d1), _lorenz_curve(d2)
    diff = lambda t: l1(t) - l2(t)
    grid = np.union1d(np.linspace(0.0, 1.0, 161), 1.0 - np.geomspace(1e-12, 1e-2, 25))
    signed, absolute, roots = _signed_pieces(diff, grid, lambda a, b: _quad(diff, a, b))
    return signed, absolute, roots, (0.0, 1.0), 0.0


def oracle_index(spec1, spec2, order="first") -> OracleResult:
    """Population 2DSD index and MVR of ``spec1`` against ``spec2``."""
    order = OrderKind.parse(order)
    if order is OrderKind.FIRST:
        signed, absolute, roots, dom, trunc = _oracle_first(spec1, spec2)
    elif order is OrderKind.LORENZ:
        signed, absolute, roots, dom, trunc = _oracle_lorenz(spec1, spec2)
    else:
        signed, absolute, roots, dom, trunc = _oracle_integrated(spec1, spec2, order is OrderKind.STOP_LOSS)
    if not (math.isfinite(signed) and math.isfinite(absolute)):
        raise ComputationError("oracle quadrature did not converge")
    signed, absolute, trunc = float(signed), float(absolute), float(trunc)
    roots = tuple(float(r) for r in roots)
    dom = (float(dom[0]), float(dom[1]))
    if absolute <= 1e-14:
        return OracleResult(0.5, signed, absolute, roots, dom, trunc, True)
    eps0 = 0.5 * (1.0 - signed / absolute)
    return OracleResult(min(max(eps0, 0.0), 1.0), signed, absolute, roots, dom, trunc, False)


def oracle_mvr(spec1, spec2, order="first") -> float:
    return oracle_index(spec1, spec2, order).epsilon0


def scenario_oracle(scenario: ScenarioSpec) -> OracleResult:
    a, b = scenario.oriented()
    return oracle_index(a, b, scenario.order)


# --------------------------------------------------------------------------
# Monte Carlo


@dataclass(frozen=True, eq=False)
class PowerCurveResult:
    scenario: str
    epsilon_grid: np.ndarray
    rejection_rate: np.ndarray
    n: int
    N: int
    B: int
    alpha: float
    method: str
    c: float | None
    seed: int
    epsilon_hat0: np.ndarray = field(default=None, repr=False)
    critical: np.ndarray = field(default=None, repr=False)

    def to_rows(self):
        return [{"epsilon": float(e), "rejection_rate": float(r)}
                for e, r in zip(self.epsilon_grid.tolist(), self.rejection_rate.tolist())]


def _run_seed(seed: int, run: int) -> int:
    state = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(run), 0)).generate_state(2, np.uint32)
    return int(state[0]) << 32 | int(state[1])


def simulate_pair(scenario: ScenarioSpec, n: int, seed: int, run: int) -> tuple[Sample, Sample]:
    """Population samples of Monte Carlo run ``run``, oriented for the test."""
    d1, d2 = scenario.oriented()
    rngs = [np.random.Generator(np.random.Philox(
        np.random.SeedSequence(entropy=int(seed), spawn_key=(int(run), k)))) for k in (1, 2)]
    return sample_from(d1, n, rngs[0], "1"), sample_from(d2, n, rngs[1], "2")


def _power_run(scenario, n, B, alpha, eps_grid, method, c, seed, run):
    x1, x2 = simulate_pair(scenario, n, seed, run)
    cfg = BootstrapConfig(B=B, seed=_run_seed(seed, run), case2_c=c if c else 0.01, parallelism=1)
    idx = index(x1, x2, scenario.order)
    est = mvr(idx).epsilon0
    if method == "case1":
        dist = case1_mvr_distribution(x1, x2, scenario.order, cfg)
        crit = quantile(dist, 1.0 - alpha)
    else:
        dist = case2_derivative_distribution(x1, x2, scenario.order, 0.0, cfg)
        crit = math.nan
    return decisions_over_grid(dist, idx, eps_grid, alpha, method), est, crit


def power_curve(scenario: ScenarioSpec, n: int, N: int, B: int, alpha: float = 0.05,
                epsilon_grid: Sequence[float] = (0.01, 0.02, 0.05, 0.1, 0.15, 0.2, 0.3),
                method: str = "case1", c: float | None = None, seed: int = 0,
                workers: int | str = 1) -> PowerCurveResult:
    """Rejection rate of the variant-``a`` test over ``N`` Monte Carlo runs."""
    if method not in ("case1", "case2"):
        raise ParameterError(f"unknown method {method!r}")
    if method == "case2" and not (c and c > 0):
        raise ParameterError("case2 power curves need a positive c")
    if not (0.0 < alpha < 1.0):
        raise ParameterError(f"alpha must lie in (0, 1), got {alpha!r}")
    grid = np.asarray(sorted(float(e) for e in epsilon_grid))
    if method == "case2" and (grid.min() < 0.0 or grid.max() >= 0.5):
        raise ParameterError("case2 epsilon grid must lie in [0, 0.5)")
    nw = available_cpus() if workers == "auto" else int(workers)
    args = [(scenario, int(n), int(B), float(alpha), grid, method, c, int(seed), r) for r in range(int(N))]
    if nw <= 1:
        results = [_power_run(*a) for a in args]
    else:
        with ProcessPoolExecutor(max_workers=nw) as pool:
            results = list(pool.map(_power_run, *zip(*args), chunksize=max(1, len(args) // (4 * nw))))
    decisions = np.array([r[0] for r in results], dtype=float).reshape(int(N), grid.size)
    return PowerCurveResult(scenario.id, grid, decisions.mean(axis=0), int(n), int(N), int(B), float(alpha),
                            method, c, int(seed),
                            np.array([r[1] for r in results]), np.array([r[2] for r in results]))
