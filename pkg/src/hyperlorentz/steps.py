"""Distribution functions, decreasing rearrangements and maximal functions.

On a finite measure space all three objects are piecewise elementary, so
everything here is exact: step functions are integrated piece by piece and
``f**`` is stored through the piecewise-linear primitive ``I(t) = int_0^t f*``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .hypergroup import HaarWeights


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class StepFunction:
    """Right-continuous nonincreasing step function on ``[0, inf)``.

    ``values[i]`` holds on ``[breakpoints[i], breakpoints[i+1])`` and the last
    value extends to infinity.  Adjacent pieces with equal values are merged,
    so two equal functions have identical arrays.
    """

    breakpoints: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        t = np.atleast_1d(np.asarray(self.breakpoints, dtype=float))
        v = np.atleast_1d(np.asarray(self.values, dtype=float))
        if t.ndim != 1 or t.shape != v.shape or t.size == 0:
            raise ValueError("breakpoints and values must be non-empty 1-D arrays of equal length")
        if t[0] != 0.0:
            raise ValueError("the first breakpoint must be 0")
        if np.any(np.diff(t) <= 0) or not np.all(np.isfinite(t)):
            raise ValueError("breakpoints must be finite and strictly increasing")
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise ValueError("values must be finite and nonnegative")
        if np.any(np.diff(v) > 0):
            raise ValueError("values must be nonincreasing")
        keep = np.concatenate([[True], np.diff(v) != 0])
        object.__setattr__(self, "breakpoints", _frozen(t[keep]))
        object.__setattr__(self, "values", _frozen(v[keep]))

    @classmethod
    def zero(cls) -> "StepFunction":
        return cls([0.0], [0.0])

    def __len__(self) -> int:
        return self.values.size

    def __eq__(self, other) -> bool:
        if not isinstance(other, StepFunction):
            return NotImplemented
        return np.array_equal(self.breakpoints, other.breakpoints) and np.array_equal(self.values, other.values)

    __hash__ = None

    @property
    def is_zero(self) -> bool:
        return bool(self.values[0] == 0.0)

    @property
    def finite_support(self) -> bool:
        return bool(self.values[-1] == 0.0)

    @property
    def support_end(self) -> float:
        """Left end of the final zero piece (inf if the function never vanishes)."""
        if not self.finite_support:
            return math.inf
        return float(self.breakpoints[-1])

    def piece_index(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if np.any(t < 0):
            raise ValueError("step functions live on [0, inf)")
        return np.searchsorted(self.breakpoints, t, side="right") - 1

    def __call__(self, t):
        return self.values[self.piece_index(t)]

    def _piece_integrals(self) -> np.ndarray:
        widths = np.diff(self.breakpoints)
        return self.values[:-1] * widths

    def cumulative(self, t):
        """``int_0^t F`` elementwise."""
        t = np.asarray(t, dtype=float)
        j = self.piece_index(t)
        head = np.concatenate([[0.0], np.cumsum(self._piece_integrals())])
        out = head[j] + self.values[j] * (t - self.breakpoints[j])
        return out

    def tail(self, t):
        """``int_t^inf F`` elementwise, computed from the right without cancellation."""
        t = np.asarray(t, dtype=float)
        j = self.piece_index(t)
        if not self.finite_support:
            return np.full(t.shape, math.inf) if t.ndim else math.inf
        suffix = np.concatenate([np.cumsum(self._piece_integrals()[::-1])[::-1], [0.0]])
        nxt = np.append(self.breakpoints[1:], self.breakpoints[-1])
        out = suffix[np.minimum(j + 1, len(self) - 1)] + self.values[j] * (nxt[j] - t)
        out = np.where(j == len(self) - 1, 0.0, out)
        return out

    @property
    def total(self) -> float:
        if not self.finite_support:
            return math.inf
        return float(self._piece_integrals().sum())

    def measure_above(self, s):
        """Lebesgue measure of ``{t : F(t) > s}``."""
        s = np.asarray(s, dtype=float)
        # first piece whose value is <= s; values are strictly decreasing
        j = np.searchsorted(-self.values, -s, side="left")
        ends = np.append(self.breakpoints, math.inf)
        return ends[j]

    def power_integral(self, p: float) -> float:
        """``int_0^inf F(t)**p dt``."""
        if self.is_zero:
            return 0.0
        if not self.finite_support:
            return math.inf
        return float(np.sum(self.values[:-1] ** p * np.diff(self.breakpoints)))

    def to_dict(self) -> dict:
        return {"breakpoints": self.breakpoints.tolist(), "values": self.values.tolist()}

    @classmethod
    def from_dict(cls, doc: dict) -> "StepFunction":
        return cls(doc["breakpoints"], doc["values"])


def distribution(f, haar: HaarWeights) -> StepFunction:
    """``lambda_f(s) = sum of w(x) over {x : |f(x)| > s}``.

    The breakpoints are 0 and the distinct nonzero values of ``|f|``.
    """
    a = np.abs(np.asarray(f, dtype=float))
    w = haar.weights
    if a.shape != w.shape:
        raise ValueError(f"function has {a.size} values but the measure has {w.size} atoms")
    levels, owner = np.unique(a, return_inverse=True)
    mass = np.bincount(owner, weights=w, minlength=levels.size)
    # accumulate from the top level down so small tails are not swamped
    at_or_above = np.cumsum(mass[::-1])[::-1]
    above = np.append(at_or_above[1:], 0.0)
    if levels[0] > 0:
        levels = np.insert(levels, 0, 0.0)
        above = np.insert(above, 0, at_or_above[0])
    return StepFunction(levels, above)


def rearrangement(dist: StepFunction) -> StepFunction:
    """``f*(t) = inf{s > 0 : lambda_f(s) <= t}``.

    For a finitely supported step distribution this is the reflection of the
    graph across the diagonal: breakpoints and values swap roles.
    """
    if not dist.finite_support:
        raise ValueError("distribution must vanish for large s (f bounded)")
    if math.isinf(dist.values[0]):
        raise ValueError("distribution must be finite")
    return StepFunction(dist.values[::-1], dist.breakpoints[::-1])


def decreasing_rearrangement(f, haar: HaarWeights) -> StepFunction:
    return rearrangement(distribution(f, haar))


@dataclass(frozen=True, eq=False)
class MaximalFunction:
    """``f**(t) = I(t) / t`` with ``I(t) = intercepts[i] + slopes[i] * t`` on piece i."""

    breakpoints: np.ndarray
    intercepts: np.ndarray
    slopes: np.ndarray
    at_zero: float

    @property
    def total_mass(self) -> float:
        if self.slopes[-1] != 0.0:
            return math.inf
        return float(self.intercepts[-1])

    @property
    def is_zero(self) -> bool:
        return bool(self.at_zero == 0.0)

    def piece_index(self, t) -> np.ndarray:
        return np.searchsorted(self.breakpoints, np.asarray(t, dtype=float), side="right") - 1

    def primitive(self, t):
        """``I(t) = int_0^t f*``."""
        t = np.asarray(t, dtype=float)
        j = self.piece_index(t)
        return self.intercepts[j] + self.slopes[j] * t

    def __call__(self, t):
        """``f**(t)``; at t = 0 the limit ``f*(0)`` is returned."""
        t = np.asarray(t, dtype=float)
        if np.any(t < 0):
            raise ValueError("f** is defined for t >= 0")
        j = self.piece_index(t)
        safe = np.where(t > 0, t, 1.0)
        out = self.intercepts[j] / safe + self.slopes[j]
        return np.where(t > 0, out, self.at_zero)

    def to_dict(self) -> dict:
        return {
            "breakpoints": self.breakpoints.tolist(),
            "intercepts": self.intercepts.tolist(),
            "slopes": self.slopes.tolist(),
            "total_mass": self.total_mass,
        }


def maximal(fstar: StepFunction) -> MaximalFunction:
    t, v = fstar.breakpoints, fstar.values
    at_bp = np.concatenate([[0.0], np.cumsum(v[:-1] * np.diff(t))])
    a = at_bp - v * t
    a[0] = 0.0
    return MaximalFunction(_frozen(t), _frozen(a), _frozen(v), float(v[0]))


def maximal_of(f, haar: HaarWeights) -> MaximalFunction:
    return maximal(decreasing_rearrangement(f, haar))


def _merged_pieces(bp1: np.ndarray, bp2: np.ndarray) -> np.ndarray:
    return np.union1d(bp1, bp2)


def tail_product_integral(A, B, t, mode: str = "star_star"):
    """``int_t^inf A(s) B(s) ds`` in closed form.

    ``mode="star_star"`` takes two :class:`StepFunction` (``f* phi*``);
    ``mode="maximal_maximal"`` takes two :class:`MaximalFunction`
    (``f** phi**``), whose product is ``(a + b s)(c + d s) / s**2`` per piece.
    Divergent tails give ``inf``.
    """
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    if np.any(t < 0):
        raise ValueError("t must be nonnegative")
    if mode == "star_star":
        if not (isinstance(A, StepFunction) and isinstance(B, StepFunction)):
            raise TypeError("star_star mode takes two StepFunction arguments")
        if A.is_zero or B.is_zero:
            out = np.zeros(t.shape)
            return float(out[0]) if scalar else out
        edges = _merged_pieces(A.breakpoints, B.breakpoints)
        prod = A(edges) * B(edges)

        def piece(j, lo, hi):
            return prod[j] * (hi - lo)

        unbounded_inf = prod[-1] > 0
    elif mode == "maximal_maximal":
        if not (isinstance(A, MaximalFunction) and isinstance(B, MaximalFunction)):
            raise TypeError("maximal_maximal mode takes two MaximalFunction arguments")
        if A.is_zero or B.is_zero:
            out = np.zeros(t.shape)
            return float(out[0]) if scalar else out
        edges = _merged_pieces(A.breakpoints, B.breakpoints)
        ja, jb = A.piece_index(edges), B.piece_index(edges)
        a, b = A.intercepts[ja], A.slopes[ja]
        c, d = B.intercepts[jb], B.slopes[jb]
        lin = a * d + b * c

        def piece(j, lo, hi):
            # antiderivative b d s + (a d + b c) ln s - a c / s
            val = b[j] * d[j] * (hi - lo)
            with np.errstate(divide="ignore", invalid="ignore"):
                val = val + np.where(lin[j] != 0, lin[j] * np.log(hi / lo), 0.0)
                val = val + np.where(a[j] * c[j] != 0, a[j] * c[j] * (1.0 / lo - 1.0 / hi), 0.0)
            return val

        unbounded_inf = (b[-1] * d[-1] > 0) or (lin[-1] > 0)
    else:
        raise ValueError(f"unknown mode {mode!r}")

    k = edges.size
    idx = np.arange(k - 1)
    finite_pieces = piece(idx, edges[:-1], edges[1:]) if k > 1 else np.zeros(0)
    suffix = np.concatenate([np.cumsum(finite_pieces[::-1])[::-1], [0.0]])
    j = np.searchsorted(edges, t, side="right") - 1
    inner = j < k - 1
    out = np.empty(t.shape)
    if inner.any():
        ji = j[inner]
        out[inner] = piece(ji, t[inner], edges[ji + 1]) + suffix[ji + 1]
    # the unbounded last piece
    if unbounded_inf:
        out[:] = math.inf
    else:
        last_from = np.where(inner, edges[-1], t)
        if mode == "maximal_maximal":
            tail = a[-1] * c[-1] / last_from
        else:
            tail = np.zeros(t.shape)
        out[~inner] = tail[~inner]
        out[inner] += tail[inner]
    return float(out[0]) if scalar else out
