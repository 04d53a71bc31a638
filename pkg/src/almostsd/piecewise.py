"""Exact arithmetic and integration of step and piecewise-linear functions.

A :class:`PiecewiseFunction` lives on a strictly increasing grid of knots.
``step`` functions carry one value per inter-knot interval and are
right-continuous; ``linear`` functions carry one value per knot and are
interpolated linearly in between.  Outside the grid a function is extended
by a constant tail, or the tail is ``None`` and the function is simply not
defined there.

Everything the package computes about target functions (2DSD indices,
restricted integrals for the contact-set bootstrap) reduces to
:func:`integrate` and :func:`restricted_integrals` below.  Integrals are
closed form per segment; a linear segment whose end values have opposite
signs is split at its root before taking absolute values.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import DomainError, KindMismatchError, ParameterError

Kind = Literal["step", "linear"]

__all__ = [
    "PiecewiseFunction",
    "SignedAbsIntegrals",
    "align",
    "subtract",
    "integrate",
    "restricted_integrals",
]


@dataclass(frozen=True)
class SignedAbsIntegrals:
    signed: float
    absolute: float


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=np.float64)
    a.setflags(write=False)
    return a


class PiecewiseFunction:
    """Immutable step or piecewise-linear function on a finite grid."""

    __slots__ = ("knots", "values", "kind", "left", "right")

    def __init__(self, knots, values, kind: Kind, left=None, right=None, *, check=True):
        knots = _frozen(knots)
        values = _frozen(values)
        if check:
            if kind not in ("step", "linear"):
                raise ValueError(f"unknown kind {kind!r}")
            if knots.ndim != 1 or values.ndim != 1:
                raise ValueError("knots and values must be one-dimensional")
            if not np.all(np.isfinite(knots)):
                raise ValueError("knots must be finite")
            min_knots = 1 if kind == "step" else 2
            if knots.size < min_knots:
                raise ValueError(f"{kind} function needs at least {min_knots} knots")
            if np.any(np.diff(knots) <= 0):
                raise ValueError("knots must be strictly increasing")
            expected = knots.size - 1 if kind == "step" else knots.size
            if values.size != expected:
                raise ValueError(f"{kind} function on {knots.size} knots needs {expected} values, got {values.size}")
            if np.any(np.isnan(values)):
                raise ValueError("values must not be NaN")
            if kind == "linear":
                # constant tails must continue the boundary value, otherwise
                # extending the grid would change the function
                if left is not None and left != values[0]:
                    raise ValueError("linear left tail must equal the first knot value")
                if right is not None and right != values[-1]:
                    raise ValueError("linear right tail must equal the last knot value")
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "left", None if left is None else float(left))
        object.__setattr__(self, "right", None if right is None else float(right))

    def __setattr__(self, name, value):
        raise AttributeError("PiecewiseFunction is immutable")

    def __repr__(self):
        return (f"PiecewiseFunction(kind={self.kind!r}, knots={self.knots.size}, "
                f"support=[{self.knots[0]:g}, {self.knots[-1]:g}], left={self.left}, right={self.right})")

    @property
    def lower(self) -> float:
        return float(self.knots[0])

    @property
    def upper(self) -> float:
        return float(self.knots[-1])

    def covers(self, lo: float, hi: float) -> bool:
        return ((lo >= self.lower or self.left is not None)
                and (hi <= self.upper or self.right is not None))

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        scalar = x.ndim == 0
        x = np.atleast_1d(x)
        below = x < self.knots[0]
        above = x > self.knots[-1] if self.kind == "linear" else x >= self.knots[-1]
        if (below.any() and self.left is None) or (above.any() and self.right is None):
            raise DomainError("domain exceeds representation")
        if self.kind == "step":
            idx = np.searchsorted(self.knots, x, side="right") - 1
            inside = ~(below | above)
            out = np.empty_like(x)
            out[inside] = self.values[idx[inside]]
        else:
            out = np.interp(x, self.knots, self.values)
        if below.any():
            out[below] = self.left
        if above.any():
            out[above] = self.right
        return float(out[0]) if scalar else out

    def _on_grid(self, grid: np.ndarray) -> "PiecewiseFunction":
        """Same function re-expressed on a finer grid that contains ``self.knots``."""
        if self.kind == "step":
            values = self(grid[:-1]) if grid.size > 1 else np.empty(0)
        else:
            values = self(grid)
        return PiecewiseFunction(grid, values, self.kind, self.left, self.right, check=False)

    def restrict(self, lo: float, hi: float) -> "PiecewiseFunction":
        """The function on ``[lo, hi]`` only, with ``lo`` and ``hi`` as end knots."""
        if not (np.isfinite(lo) and np.isfinite(hi)):
            raise DomainError("integration domain must be finite")
        if hi <= lo:
            raise DomainError(f"empty or reversed domain [{lo}, {hi}]")
        if not self.covers(lo, hi):
            raise DomainError("domain exceeds representation")
        k = self.knots
        inner = k[(k > lo) & (k < hi)]
        grid = np.concatenate(([lo], inner, [hi]))
        if self.kind == "step":
            values = self(grid[:-1])
        else:
            values = self(grid)
        return PiecewiseFunction(grid, values, self.kind, None, None, check=False)

    def __neg__(self):
        return PiecewiseFunction(self.knots, -self.values, self.kind,
                                 None if self.left is None else -self.left,
                                 None if self.right is None else -self.right, check=False)

    def __mul__(self, c):
        c = float(c)
        return PiecewiseFunction(self.knots, c * self.values, self.kind,
                                 None if self.left is None else c * self.left,
                                 None if self.right is None else c * self.right, check=False)

    __rmul__ = __mul__

    def __add__(self, other):
        if not isinstance(other, PiecewiseFunction):
            return NotImplemented
        f, g = align(self, other)
        return PiecewiseFunction(f.knots, f.values + g.values, f.kind,
                                 _tail_op(f.left, g.left, 1.0), _tail_op(f.right, g.right, 1.0),
                                 check=False)

    def __sub__(self, other):
        if not isinstance(other, PiecewiseFunction):
            return NotImplemented
        return subtract(self, other)


def _tail_op(a, b, sign):
    if a is None or b is None:
        return None
    return a + sign * b


def align(f: PiecewiseFunction, g: PiecewiseFunction) -> tuple[PiecewiseFunction, PiecewiseFunction]:
    """Re-express ``f`` and ``g`` on the union of their knots.

    Both must have the same kind.  Where the union grid reaches beyond one
    function's own grid, that function's tail must be defined.
    """
    if f.kind != g.kind:
        raise KindMismatchError(f"kind mismatch: {f.kind} vs {g.kind}")
    if f.knots.size == g.knots.size and np.array_equal(f.knots, g.knots):
        return f, g
    grid = np.union1d(f.knots, g.knots)
    return f._on_grid(grid), g._on_grid(grid)


def subtract(f: PiecewiseFunction, g: PiecewiseFunction) -> PiecewiseFunction:
    f, g = align(f, g)
    return PiecewiseFunction(f.knots, f.values - g.values, f.kind,
                             _tail_op(f.left, g.left, -1.0), _tail_op(f.right, g.right, -1.0),
                             check=False)


def _linear_segment_integrals(va: np.ndarray, vb: np.ndarray, w: np.ndarray):
    """Per-segment signed and absolute integrals of linear pieces."""
    signed = 0.5 * (va + vb) * w
    absolute = np.abs(signed)
    cross = (va * vb) < 0
    if cross.any():
        a, b, ww = va[cross], vb[cross], w[cross]
        # root at t = w*|a|/(|a|+|b|): two triangles of areas |a| t/2 and |b| (w-t)/2
        absolute[cross] = ww * (a * a + b * b) / (2.0 * (np.abs(a) + np.abs(b)))
    return signed, absolute


def _integrate_arrays(knots: np.ndarray, values: np.ndarray, kind: str) -> SignedAbsIntegrals:
    w = np.diff(knots)
    if kind == "step":
        signed = float(np.sum(values * w))
        absolute = float(np.sum(np.abs(values) * w))
    else:
        s, a = _linear_segment_integrals(values[:-1], values[1:], w)
        signed = float(np.sum(s))
        absolute = float(np.sum(a))
    # summation rounding can push |signed| a hair above absolute
    absolute = max(absolute, abs(signed))
    return SignedAbsIntegrals(signed, absolute)


def integrate(f: PiecewiseFunction, domain: tuple[float, float] | None = None) -> SignedAbsIntegrals:
    """Signed and absolute integral of ``f`` over ``domain`` (default: its grid)."""
    if domain is None:
        lo, hi = f.lower, f.upper
    else:
        lo, hi = float(domain[0]), float(domain[1])
    if hi == lo:
        return SignedAbsIntegrals(0.0, 0.0)
    if lo == f.lower and hi == f.upper:
        if f.knots.size < 2:
            return SignedAbsIntegrals(0.0, 0.0)
        return _integrate_arrays(f.knots, f.values, f.kind)
    r = f.restrict(lo, hi)
    return _integrate_arrays(r.knots, r.values, r.kind)


def restricted_integrals(h: PiecewiseFunction, theta: PiecewiseFunction, a_n: float,
                         domain: tuple[float, float] | None = None) -> tuple[float, float]:
    """Split the integral of ``h`` along the estimated contact set of ``theta``.

    Returns ``(int_{|theta| <= a_n} |h|, int_{|theta| > a_n} h * sign(theta))``.
    Points where ``|theta| == a_n`` count as contact.  For linear functions the
    grid is first refined at every crossing of ``theta`` with ``+a_n`` and
    ``-a_n``, so each resulting segment lies entirely on one side.
    """
    if not (a_n > 0) or not np.isfinite(a_n):
        raise ParameterError(f"invalid enlargement a_n={a_n!r}; must be a positive finite number")
    h, theta = align(h, theta)
    if domain is not None:
        lo, hi = float(domain[0]), float(domain[1])
        if hi == lo:
            return 0.0, 0.0
        if lo != h.lower or hi != h.upper:
            h, theta = h.restrict(lo, hi), theta.restrict(lo, hi)
    return _restricted_arrays(h.knots, h.values, theta.values, a_n, h.kind)


def _restricted_arrays(knots, hv, tv, a_n, kind):
    if knots.size < 2:
        return 0.0, 0.0
    if kind == "step":
        w = np.diff(knots)
        contact = np.abs(tv) <= a_n
        on = float(np.sum(np.abs(hv[contact]) * w[contact]))
        off = float(np.sum(hv[~contact] * np.sign(tv[~contact]) * w[~contact]))
        return on, off

    ta, tb = tv[:-1], tv[1:]
    ka, w = knots[:-1], np.diff(knots)
    extra = []
    for level in (a_n, -a_n):
        da, db = ta - level, tb - level
        cross = (da * db) < 0
        if cross.any():
            t = ka[cross] + w[cross] * (da[cross] / (da[cross] - db[cross]))
            extra.append(t)
    if extra:
        grid = np.union1d(knots, np.concatenate(extra))
        hv = np.interp(grid, knots, hv)
        tv = np.interp(grid, knots, tv)
        knots = grid
    w = np.diff(knots)
    t_mid = 0.5 * (tv[:-1] + tv[1:])
    contact = np.abs(t_mid) <= a_n
    signed, absolute = _linear_segment_integrals(hv[:-1], hv[1:], w)
    on = float(np.sum(absolute[contact]))
    off = float(np.sum(signed[~contact] * np.sign(t_mid[~contact])))
    return on, off
