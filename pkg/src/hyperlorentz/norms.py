"""Lebesgue and Lorentz norms of functions on a finite measure space.

The Lorentz functional is built on the maximal function::

    ||f||_{p,q} = ( int_0^inf (t^{1/p} f**(t))^q dt/t )^{1/q}     (q < inf)
    ||f||_{p,inf} = sup_{t>0} t^{1/p} f**(t)

``+inf`` is a legitimate return value: for ``p = 1`` and finite ``q`` the
tail ``t^{1/p} f**(t) ~ ||f||_1`` is not square-integrable against dt/t.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._quadrature import binomial_power_integral, power_integral
from .hypergroup import HaarWeights
from .steps import MaximalFunction, maximal_of


@dataclass(frozen=True)
class LorentzParams:
    p: float
    q: float

    def __post_init__(self):
        p, q = float(self.p), float(self.q)
        if math.isnan(p) or math.isnan(q) or p < 1 or q < 1:
            raise ValueError(f"Lorentz exponents must satisfy p, q >= 1 (got p={p}, q={q})")
        if math.isinf(p) and not math.isinf(q):
            raise ValueError("p = inf is only admissible with q = inf")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)


def conjugate(p: float) -> float:
    """Hoelder conjugate ``p' = p / (p - 1)``, with ``inf' = 1``."""
    if math.isinf(p):
        return 1.0
    if p <= 1:
        return math.inf
    return p / (p - 1.0)


def lebesgue_norm(f, haar: HaarWeights, p: float) -> float:
    a = np.abs(np.asarray(f, dtype=float))
    if p < 1:
        raise ValueError("p must be >= 1")
    if math.isinf(p):
        return float(a.max()) if a.size else 0.0
    return float(np.sum(a**p * haar.weights) ** (1.0 / p))


def lorentz_norm(f, haar: HaarWeights, p: float, q: float) -> float:
    return maximal_lorentz_norm(maximal_of(f, haar), LorentzParams(p, q))


def maximal_lorentz_norm(mf: MaximalFunction, params: LorentzParams) -> float:
    """Lorentz norm from a precomputed maximal function."""
    if mf.is_zero:
        return 0.0
    p, q = params.p, params.q
    if math.isinf(q):
        return _weak_sup(mf, p)
    inv_p = 1.0 / p
    lo = mf.breakpoints
    hi = np.append(mf.breakpoints[1:], math.inf)
    # the norm is homogeneous, so integrate f** / f*(0) to keep tiny functions away from underflow
    scale = mf.at_zero
    # integrand t^{q/p - q - 1} (a + b t)^q on each piece
    pieces = binomial_power_integral(mf.intercepts / scale, mf.slopes / scale, q, q * inv_p - q - 1.0, lo, hi)
    total = float(np.sum(pieces))
    if math.isinf(total):
        return math.inf
    return total ** (1.0 / q) * scale


def _weak_sup(mf: MaximalFunction, p: float) -> float:
    """``sup_t t^{1/p - 1} (a + b t)`` maximized exactly piece by piece."""
    a, b = mf.intercepts, mf.slopes
    if math.isinf(p):
        return float(mf.at_zero)
    if b[-1] > 0:
        return math.inf
    s = 1.0 / p
    lo = mf.breakpoints
    hi = np.append(mf.breakpoints[1:], math.inf)

    def g(t, j):
        return t ** (s - 1.0) * (a[j] + b[j] * t)

    idx = np.arange(a.size)
    cands = []
    inner = idx[lo > 0]
    cands.append(g(lo[inner], inner))
    fin = idx[np.isfinite(hi)]
    cands.append(g(hi[fin], fin))
    with np.errstate(divide="ignore", invalid="ignore"):
        crit = np.where((a > 0) & (b > 0), a * (p - 1.0) / b, np.nan)
    ok = idx[(crit > lo) & (crit < hi)]
    cands.append(g(crit[ok], ok))
    best = max((float(c.max()) for c in cands if c.size), default=0.0)
    if p == 1.0:
        # t^0 (a + b t) on the last piece is the constant total mass
        best = max(best, float(a[-1]))
    return best


def embedding_gap(f, haar: HaarWeights, p: float, q: float, r: float) -> dict:
    """Both sides of ``||f||_p <= ||f||_{p,p} <= p' ||f||_p`` and of the
    Lorentz embedding ``||f||_{p,r} <= (q/p)^{1/q - 1/p} ||f||_{p,q}``.

    Each entry is ``{"lhs", "rhs", "ratio"}``; the caller decides the slack.
    """
    if not (1 < p < math.inf):
        raise ValueError("embedding checks need 1 < p < inf")
    if not (1 < q < r < math.inf):
        raise ValueError("embedding checks need 1 < q < r < inf")
    mf = maximal_of(f, haar)
    lp = lebesgue_norm(f, haar, p)
    lpp = maximal_lorentz_norm(mf, LorentzParams(p, p))
    lpr = maximal_lorentz_norm(mf, LorentzParams(p, r))
    lpq = maximal_lorentz_norm(mf, LorentzParams(p, q))
    const = (q / p) ** (1.0 / q - 1.0 / p)
    return {
        "lebesgue_le_lorentz": _side(lp, lpp),
        "lorentz_le_conjugate_lebesgue": _side(lpp, conjugate(p) * lp),
        "embedding": _side(lpr, const * lpq),
    }


def ratio(lhs: float, rhs: float) -> float:
    if lhs == 0.0:
        return 0.0
    if rhs == 0.0:
        return math.inf
    if math.isinf(rhs):
        return 0.0
    return lhs / rhs


def _side(lhs: float, rhs: float) -> dict:
    return {"lhs": lhs, "rhs": rhs, "ratio": ratio(lhs, rhs)}


__all__ = [
    "LorentzParams",
    "conjugate",
    "lebesgue_norm",
    "lorentz_norm",
    "maximal_lorentz_norm",
    "embedding_gap",
    "ratio",
    "power_integral",
]
