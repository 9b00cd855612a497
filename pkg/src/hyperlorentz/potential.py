"""Quasi-metrics, ball growth, Riesz kernels and the fractional integral."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .hypergroup import HaarWeights, HypergroupTable, convolve, translation_matrix
from .norms import lorentz_norm


@dataclass(frozen=True)
class RieszParams:
    alpha: float
    N: float

    def __post_init__(self):
        if not (0 < self.alpha < self.N):
            raise ValueError(f"need 0 < alpha < N, got alpha={self.alpha}, N={self.N}")

    @property
    def exponent(self) -> float:
        return self.alpha - self.N

    @property
    def weak_index(self) -> float:
        """The Lorentz index ``N / (N - alpha)`` in which the kernel is weak-type."""
        return self.N / (self.N - self.alpha)

    def target_index(self, p: float) -> float:
        """``r`` with ``1/r = 1/p - alpha/N``."""
        inv = 1.0 / p - self.alpha / self.N
        if inv <= 0:
            raise ValueError(f"need alpha < N/p (alpha={self.alpha}, N={self.N}, p={p})")
        return 1.0 / inv

    def continuum_weak_norm(self, A: float) -> float:
        """``(N/alpha) A^{(N-alpha)/N}``, the weak norm of ``rho(e,.)^{alpha-N}`` under exact growth."""
        return self.N / self.alpha * A ** ((self.N - self.alpha) / self.N)


@dataclass
class QuasiMetricReport:
    quasi_constant: float
    passed: bool
    failures: list[str]

    def to_dict(self) -> dict:
        return {"quasi_constant": self.quasi_constant, "pass": self.passed, "failures": list(self.failures)}


def validate_quasimetric(dist) -> QuasiMetricReport:
    """Check ``rho(x,y) = 0 <=> x = y`` and symmetry, and find the smallest
    ``c >= 1`` with ``rho(x,y) <= c (rho(x,z) + rho(z,y))`` by scanning all triples."""
    rho = np.asarray(dist, dtype=float)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"distance matrix must be square, got shape {rho.shape}")
    n = rho.shape[0]
    fails = []
    if not np.all(np.isfinite(rho)) or np.any(rho < 0):
        fails.append("nonnegativity")
    off = ~np.eye(n, dtype=bool)
    if np.any(np.diag(rho) != 0) or np.any(rho[off] == 0):
        fails.append("identity_of_indiscernibles")
    if not np.array_equal(rho, rho.T):
        fails.append("symmetry")
    if fails:
        return QuasiMetricReport(math.nan, False, fails)
    via = rho[:, :, None] + rho[None, :, :]  # via[x, z, y] = rho(x,z) + rho(z,y)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = rho[:, None, :] / via
    ratios = np.where(np.isfinite(ratios), ratios, 0.0)
    c = max(1.0, float(ratios.max())) if n > 1 else 1.0
    return QuasiMetricReport(c, True, [])


def riesz_kernel(radii, params: RieszParams, center_value_policy: str = "zero", cap_radius: float | None = None):
    """``k(y) = rho(e,y)^{alpha - N}`` from the radii ``rho(e, .)``.

    The element of radius zero (the centre, if present) gets 0 under
    ``"zero"`` and ``cap_radius^{alpha-N}`` under ``"cap"``; the cap radius
    defaults to the smallest positive radius.
    """
    r = np.asarray(radii, dtype=float)
    if np.any(~np.isfinite(r)) or np.any(r < 0):
        raise ValueError("radii must be finite and nonnegative")
    centre = r == 0
    if centre.sum() > 1:
        raise ValueError("only the centre may have radius 0")
    k = np.zeros(r.shape)
    k[~centre] = r[~centre] ** params.exponent
    if centre.any():
        if center_value_policy == "zero":
            pass
        elif center_value_policy == "cap":
            cap = cap_radius if cap_radius is not None else float(r[~centre].min())
            if not cap > 0:
                raise ValueError("cap radius must be positive")
            k[centre] = cap ** params.exponent
        else:
            raise ValueError(f"unknown centre policy {center_value_policy!r}")
    return k


def riesz_potential(table: HypergroupTable, haar: HaarWeights, f, kernel) -> np.ndarray:
    """``I_alpha f(x) = sum_y T^x k(y) f(y~) w(y)``.

    Evaluated from the definition (translates of the kernel) and cross-checked
    against ``f * k`` computed by translating ``f`` instead.
    """
    f = np.asarray(f, dtype=float)
    direct = translation_matrix(table, kernel) @ (f[table.involution] * haar.weights)
    other = convolve(table, haar, f, kernel)
    scale = max(1.0, float(np.abs(direct).max()))
    if not np.allclose(direct, other, rtol=1e-12, atol=1e-12 * scale):
        raise RuntimeError("Riesz potential disagrees with the commuted convolution")
    return direct


@dataclass(frozen=True, eq=False)
class GrowthSpace:
    """Radii ``rho(e, .)`` and weights with ``lambda B(e, r_i) = A r_i^N`` at the stored radii.

    Ball measures here use the closed ball ``{rho(e, y) <= r}``.  When the space
    is attached to a hypergroup, ``table`` and the weights are its own.
    """

    radii: np.ndarray
    weights: np.ndarray
    A: float
    N: float
    table: HypergroupTable | None = None

    @property
    def haar(self) -> HaarWeights:
        return HaarWeights(self.weights)

    def ball_measure(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        order = np.argsort(self.radii, kind="stable")
        sr = self.radii[order]
        cum = np.cumsum(self.weights[order])
        j = np.searchsorted(sr, r, side="right")
        return np.where(j > 0, cum[np.maximum(j - 1, 0)], 0.0)

    def growth_residual(self) -> float:
        """Largest relative gap between ``lambda B(e, r)`` and ``A r^N`` over nonzero stored radii."""
        r = self.radii[self.radii > 0]
        target = self.A * r**self.N
        return float(np.max(np.abs(self.ball_measure(r) - target) / target))

    def rho(self) -> np.ndarray:
        """An ultrametric with ``rho(e, .) = radii``: ``rho(x, y) = max(r_x, r_y)`` off the diagonal."""
        r = self.radii
        m = np.maximum(r[:, None], r[None, :])
        np.fill_diagonal(m, 0.0)
        return m

    def kernel(self, params: RieszParams, center_value_policy: str = "zero") -> np.ndarray:
        return riesz_kernel(self.radii, params, center_value_policy)

    def kernel_weak_norm(self, params: RieszParams) -> float:
        return lorentz_norm(self.kernel(params), self.haar, params.weak_index, math.inf)

    def to_dict(self) -> dict:
        return {"radii": self.radii.tolist(), "weights": self.weights.tolist(), "A": self.A, "N": self.N}


def geometric_grid(r_min: float, r_max: float, M: int) -> np.ndarray:
    if M < 2 or not (0 < r_min < r_max):
        raise ValueError("need M >= 2 and 0 < r_min < r_max")
    return np.geomspace(r_min, r_max, M)


def synth_growth_space(A: float, N: float, radii_grid) -> GrowthSpace:
    """One atom per radius, weighted so that the ball up to ``r_i`` has measure ``A r_i^N``."""
    if not (A > 0 and N > 0):
        raise ValueError("A and N must be positive")
    r = np.asarray(radii_grid, dtype=float)
    if r.ndim != 1 or r.size < 2:
        raise ValueError("the grid needs at least two radii")
    if r[0] <= 0 or np.any(np.diff(r) <= 0):
        raise ValueError("the grid must be positive and strictly increasing")
    cum = A * r**N
    w = np.diff(cum, prepend=0.0)
    return GrowthSpace(radii=r, weights=w, A=float(A), N=float(N))


def growth_space_on(table: HypergroupTable, haar: HaarWeights, A: float, N: float, order=None) -> GrowthSpace:
    """Give the elements of a hypergroup radii so that ``lambda B(e, r) = A r^N`` at each of them.

    ``order`` lists the non-identity elements from the centre outwards
    (default: index order).  The identity sits at radius 0.
    """
    e = table.identity
    others = [x for x in range(table.n) if x != e]
    order = others if order is None else [int(x) for x in order]
    if sorted(order) != others:
        raise ValueError("order must be a permutation of the non-identity elements")
    w = haar.weights
    cum = w[e] + np.cumsum(w[order]) if order else np.zeros(0)
    radii = np.zeros(table.n)
    radii[order] = (cum / A) ** (1.0 / N)
    return GrowthSpace(radii=radii, weights=np.array(w), A=float(A), N=float(N), table=table)


def mass_geometric_grid(A: float, N: float, M: int, mass_range=(2.0**-12, 2.0**12)) -> np.ndarray:
    """Geometric radii whose ball masses ``A r^N`` span ``mass_range``.

    Fixing the mass range rather than the radius range makes the refinement
    behave the same for every ``N``; the span matters because the core
    ``r < r_min`` of the continuous kernel is cut off.
    """
    m_lo, m_hi = mass_range
    return geometric_grid((m_lo / A) ** (1.0 / N), (m_hi / A) ** (1.0 / N), M)
