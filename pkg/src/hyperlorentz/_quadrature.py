"""Closed-form and Gauss-Legendre integrals of ``(c + v s)**k * s**m`` over pieces.

Every integral that the step-function calculus cannot do in closed form has
this shape, so this module is the only place where quadrature happens.
"""
from __future__ import annotations

import math

import numpy as np
from scipy import integrate

_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(16)

# Each Gauss-Legendre panel spans at most this much log-length; the integrands
# are analytic in a strip of half-width pi around the real axis.
_PANEL = 1.0
_MAX_DOUBLINGS = 6
RTOL = 1e-13


def power_integral(m, lo, hi):
    """Exact ``int_lo^hi s**m ds`` elementwise, with ``lo >= 0`` and ``hi <= inf``."""
    m, lo, hi = np.broadcast_arrays(
        np.asarray(m, dtype=float), np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)
    )
    out = np.zeros(m.shape)
    for idx in np.ndindex(m.shape):
        out[idx] = _power_integral_scalar(m[idx], lo[idx], hi[idx])
    return out


def _power_integral_scalar(m: float, lo: float, hi: float) -> float:
    if hi <= lo:
        return 0.0
    if lo == 0.0 and m <= -1.0:
        return math.inf
    if math.isinf(hi):
        if m >= -1.0:
            return math.inf
        return lo ** (m + 1.0) / -(m + 1.0)
    if m == -1.0:
        return math.log(hi / lo)
    return (hi ** (m + 1.0) - lo ** (m + 1.0)) / (m + 1.0)


def scaled(coef, integral):
    """``coef * integral`` where a positive coefficient keeps a divergent integral infinite
    even if the coefficient underflowed to zero."""
    coef, integral = np.broadcast_arrays(np.asarray(coef, dtype=float), np.asarray(integral, dtype=float))
    with np.errstate(invalid="ignore"):
        return np.where(np.isinf(integral), np.inf, coef * integral)


def binomial_power_integral(c, v, k: float, m: float, lo, hi) -> np.ndarray:
    """``int_lo^hi (c + v s)**k s**m ds`` for each piece.

    ``c + v s`` must be nonnegative on every piece and ``v >= 0``.  Pieces with
    ``c == 0`` or ``v == 0`` are integrated in closed form; the rest use
    panel Gauss-Legendre in a logarithmic variable, refined by panel doubling
    until two successive estimates agree to ``RTOL``.
    """
    c, v, lo, hi = (np.atleast_1d(np.asarray(a, dtype=float)) for a in (c, v, lo, hi))
    c, v, lo, hi = np.broadcast_arrays(c, v, lo, hi)
    out = np.zeros(c.shape)
    live = (hi > lo) & ~((c == 0.0) & (v == 0.0))

    only_v = live & (c == 0.0)
    if only_v.any():
        out[only_v] = scaled(v[only_v] ** k, power_integral(k + m, lo[only_v], hi[only_v]))
    only_c = live & (v == 0.0) & (c != 0.0)
    if only_c.any():
        out[only_c] = scaled(c[only_c] ** k, power_integral(m, lo[only_c], hi[only_c]))

    both = live & (c != 0.0) & (v != 0.0)
    if not both.any():
        return out

    unbounded = both & np.isinf(hi)
    for i in np.flatnonzero(unbounded):
        out[i] = _quad_piece(c[i], v[i], k, m, lo[i], hi[i])

    bounded = both & ~unbounded
    with np.errstate(over="ignore", divide="ignore"):
        root = -c / np.where(v == 0.0, 1.0, v)
    at_root = bounded & (c < 0.0) & np.isclose(root, lo, rtol=1e-14, atol=0.0)
    for i in np.flatnonzero(at_root):
        out[i] = _quad_piece(c[i], v[i], k, m, lo[i], hi[i])

    positive = bounded & (c > 0.0)
    if positive.any():
        # s = exp(u): (c + v e^u)^k e^{(m+1) u}
        cc, vv = c[positive], v[positive]
        out[positive] = _log_panels(
            np.log(lo[positive]),
            np.log(hi[positive]),
            lambda u, j: (cc[j] + vv[j] * np.exp(u)) ** k * np.exp((m + 1.0) * u),
        )
    shifted = bounded & (c < 0.0) & ~at_root
    if shifted.any():
        # s = s0 + e^w with s0 the root of c + v s below the piece.
        s0, vv = root[shifted], v[shifted]
        out[shifted] = _log_panels(
            np.log(lo[shifted] - s0),
            np.log(hi[shifted] - s0),
            lambda w, j: vv[j] ** k * np.exp((k + 1.0) * w) * (s0[j] + np.exp(w)) ** m,
        )
    return out


def _quad_piece(c: float, v: float, k: float, m: float, lo: float, hi: float) -> float:
    if math.isinf(hi):
        if k + m >= -1.0:
            return math.inf
        val, _ = integrate.quad(lambda s: (c + v * s) ** k * s**m, lo, hi, epsabs=0.0, epsrel=1e-12, limit=200)
        return val
    # (c + v s)^k = v^k (s - lo)^k: algebraic weight at the left endpoint.
    val, _ = integrate.quad(
        lambda s: v**k * s**m, lo, hi, weight="alg", wvar=(k, 0.0), epsabs=0.0, epsrel=1e-13, limit=200
    )
    return val


def _log_panels(u0: np.ndarray, u1: np.ndarray, g) -> np.ndarray:
    panels = np.maximum(1, np.ceil((u1 - u0) / _PANEL)).astype(int)
    est = _panel_sum(u0, u1, panels, g, np.arange(u0.size))
    todo = np.arange(u0.size)
    for _ in range(_MAX_DOUBLINGS):
        panels[todo] *= 2
        fine = _panel_sum(u0[todo], u1[todo], panels[todo], g, todo)
        scale = np.maximum(np.abs(fine), np.finfo(float).tiny)
        done = np.abs(fine - est[todo]) <= RTOL * scale
        est[todo] = fine
        todo = todo[~done]
        if todo.size == 0:
            break
    return est


def _panel_sum(u0, u1, panels, g, index) -> np.ndarray:
    owner = np.repeat(np.arange(u0.size), panels)
    offsets = np.arange(owner.size) - np.repeat(np.cumsum(panels) - panels, panels)
    width = ((u1 - u0) / panels)[owner]
    left = u0[owner] + offsets * width
    nodes = left[:, None] + 0.5 * width[:, None] * (_NODES[None, :] + 1.0)
    vals = g(nodes, index[owner][:, None]) * (0.5 * width)[:, None] * _WEIGHTS[None, :]
    return np.bincount(owner, weights=vals.sum(axis=1), minlength=u0.size)
