"""Finite commutative hypergroups: structure tensors, axioms, Haar measure, convolution.

A finite hypergroup on ``{0, ..., n-1}`` is stored as its structure tensor
``c[x, y, z] = (delta_x * delta_y)({z})``.  Builders for four instance
families live at the bottom of the module.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg


class StructureError(ValueError):
    """Array shapes or index ranges are inconsistent with the element count."""


class AxiomError(ValueError):
    """The table is structurally sound but violates a hypergroup axiom."""


class GroupTableError(ValueError):
    """A multiplication table handed to the conjugacy builder is not a group."""


def _frozen(a, dtype) -> np.ndarray:
    arr = np.array(a, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class HypergroupTable:
    n: int
    identity: int
    involution: np.ndarray
    tensor: np.ndarray
    name: str = ""

    def __post_init__(self):
        n = self.n
        if not isinstance(n, (int, np.integer)) or n < 1:
            raise StructureError(f"element count must be a positive integer, got {n!r}")
        tensor = np.asarray(self.tensor, dtype=float)
        if tensor.shape != (n, n, n):
            raise StructureError(f"tensor has shape {tensor.shape}, expected {(n, n, n)}")
        if not np.all(np.isfinite(tensor)):
            raise StructureError("tensor contains non-finite entries")
        inv = np.asarray(self.involution)
        if inv.shape != (n,):
            raise StructureError(f"involution has length {inv.size}, expected {n}")
        if not np.issubdtype(inv.dtype, np.integer):
            if not np.all(np.equal(np.mod(inv, 1), 0)):
                raise StructureError("involution entries must be integers")
        inv = inv.astype(int)
        if inv.min() < 0 or inv.max() >= n:
            raise StructureError("involution entries out of range")
        if not 0 <= int(self.identity) < n:
            raise StructureError(f"identity {self.identity} out of range")
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "identity", int(self.identity))
        object.__setattr__(self, "involution", _frozen(inv, int))
        object.__setattr__(self, "tensor", _frozen(tensor, float))

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "identity": self.identity,
            "involution": self.involution.tolist(),
            "tensor": self.tensor.tolist(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "HypergroupTable":
        missing = [k for k in ("n", "identity", "involution", "tensor") if k not in doc]
        if missing:
            raise StructureError(f"missing field(s): {', '.join(missing)}")
        try:
            tensor = np.array(doc["tensor"], dtype=float)
        except (TypeError, ValueError) as exc:
            raise StructureError(f"tensor is not a rectangular numeric array: {exc}") from None
        return cls(n=doc["n"], identity=doc["identity"], involution=doc["involution"], tensor=tensor)


@dataclass(frozen=True, eq=False)
class HaarWeights:
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise AxiomError("Haar weights must be finite and strictly positive")
        object.__setattr__(self, "weights", _frozen(w, float))

    def __len__(self) -> int:
        return self.weights.size

    @property
    def total(self) -> float:
        return float(self.weights.sum())


@dataclass
class AxiomReport:
    """Largest violation of each axiom, together with where it happens."""

    residuals: dict[str, float]
    tol: float
    min_identity_mass: float
    locations: dict[str, tuple] = field(default_factory=dict)

    @property
    def failures(self) -> list[str]:
        bad = [k for k, r in self.residuals.items() if not r <= self.tol]
        if not self.min_identity_mass > self.tol:
            bad.append("identity_mass")
        return bad

    @property
    def passed(self) -> bool:
        return not self.failures

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values())

    def to_dict(self) -> dict:
        return {
            "pass": self.passed,
            "tol": self.tol,
            "residuals": dict(self.residuals),
            "min_identity_mass": self.min_identity_mass,
            "locations": {k: list(v) for k, v in self.locations.items()},
            "failures": self.failures,
        }


def _assoc_residual(c: np.ndarray) -> tuple[float, tuple]:
    # (delta_x * delta_y) * delta_z versus delta_x * (delta_y * delta_z), one x at a time.
    n = c.shape[0]
    by_first = c.reshape(n, n * n)  # [w, (z, v)]
    by_pair = c.reshape(n * n, n)  # [(y, z), w]
    worst, where = 0.0, (0, 0, 0, 0)
    for x in range(n):
        left = (c[x] @ by_first).reshape(n, n, n)  # sum_w c[x,y,w] c[w,z,v]
        right = (by_pair @ c[x]).reshape(n, n, n)  # sum_w c[y,z,w] c[x,w,v]
        diff = np.abs(left - right)
        k = int(np.argmax(diff))
        if diff.flat[k] > worst:
            worst = float(diff.flat[k])
            y, z, v = np.unravel_index(k, diff.shape)
            where = (x, int(y), int(z), int(v))
    return worst, where


def validate_hypergroup(table: HypergroupTable, tol: float = 1e-12) -> AxiomReport:
    c = table.tensor
    n, e, inv = table.n, table.identity, table.involution
    eye = np.eye(n)
    res: dict[str, float] = {}
    loc: dict[str, tuple] = {}

    sums = c.sum(axis=2)
    res["probability"] = float(max(0.0, -c.min(), np.abs(sums - 1.0).max()))
    comm = np.abs(c - c.transpose(1, 0, 2))
    res["commutativity"] = float(comm.max())
    loc["commutativity"] = tuple(int(i) for i in np.unravel_index(np.argmax(comm), comm.shape))
    res["identity"] = float(max(np.abs(c[e] - eye).max(), np.abs(c[:, e, :] - eye).max()))

    # (delta_x * delta_y)~ = delta_{y~} * delta_{x~}
    lhs = c[:, :, inv]
    rhs = c[inv][:, inv].transpose(1, 0, 2)
    invol = np.abs(lhs - rhs)
    res["involution"] = float(invol.max())
    loc["involution"] = tuple(int(i) for i in np.unravel_index(np.argmax(invol), invol.shape))

    at_e = c[:, :, e]
    partner = np.zeros((n, n), dtype=bool)
    partner[np.arange(n), inv] = True
    res["support"] = float(at_e[~partner].max()) if (~partner).any() else 0.0
    min_mass = float(at_e[partner].min())

    perm_bad = 0
    if sorted(inv.tolist()) != list(range(n)):
        perm_bad += 1
    perm_bad += int(np.count_nonzero(inv[inv] != np.arange(n)))
    perm_bad += int(inv[e] != e)
    res["involutive_permutation"] = float(perm_bad)

    res["associativity"], loc["associativity"] = _assoc_residual(c)
    return AxiomReport(residuals=res, tol=tol, min_identity_mass=min_mass, locations=loc)


def invariance_residual(table: HypergroupTable, weights: np.ndarray) -> float:
    """max over x, z of |sum_y c[x,y,z] w(y) - w(z)|, relative to max w."""
    w = np.asarray(weights, dtype=float)
    lhs = np.einsum("xyz,y->xz", table.tensor, w)
    return float(np.abs(lhs - w[None, :]).max() / w.max())


def compute_haar(table: HypergroupTable, check_tol: float = 1e-12) -> HaarWeights:
    """Haar weights ``w(x) = 1 / c[x, x~, e]``, normalized so ``w(e) = 1``.

    The closed form is checked against translation invariance; a residual above
    ``check_tol`` raises :class:`AxiomError`.
    """
    inv, e = table.involution, table.identity
    mass = table.tensor[np.arange(table.n), inv, e]
    if np.any(mass <= 0):
        bad = int(np.flatnonzero(mass <= 0)[0])
        raise AxiomError(f"c[{bad}][{int(inv[bad])}][{e}] = 0 contradicts the involution axiom")
    w = 1.0 / mass
    w = w / w[e]
    resid = invariance_residual(table, w)
    if resid > check_tol:
        raise AxiomError(f"closed-form Haar weights fail translation invariance (residual {resid:.3g})")
    return HaarWeights(w)


def haar_from_invariance(table: HypergroupTable) -> np.ndarray:
    """Solve ``sum_y c[x,y,z] w(y) = w(z)`` for all x, z as a null-space problem."""
    n = table.n
    c = table.tensor
    # rows indexed by (x, z): sum_y c[x,y,z] w_y - w_z
    system = c.transpose(0, 2, 1).reshape(n * n, n) - np.tile(np.eye(n), (n, 1))
    null = linalg.null_space(system, rcond=1e-10)
    if null.shape[1] != 1:
        raise AxiomError(f"invariance system has a {null.shape[1]}-dimensional solution space")
    w = null[:, 0]
    return w / w[table.identity]


def _check_function(table: HypergroupTable, f) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    if f.shape != (table.n,):
        raise StructureError(f"function has {f.size} values, expected {table.n}")
    if not np.all(np.isfinite(f)):
        raise StructureError("function values must be finite")
    return f


def translate(table: HypergroupTable, f, x: int) -> np.ndarray:
    """Generalized translate ``T^x f(y) = sum_z c[x,y,z] f(z)``."""
    if not 0 <= x < table.n:
        raise StructureError(f"element {x} out of range")
    return table.tensor[x] @ _check_function(table, f)


def translation_matrix(table: HypergroupTable, f) -> np.ndarray:
    """All translates at once: row x is ``T^x f``."""
    return table.tensor @ _check_function(table, f)


def convolve(table: HypergroupTable, haar: HaarWeights, f, g) -> np.ndarray:
    """``(f * g)(x) = sum_y T^x f(y) g(y~) w(y)``."""
    g = _check_function(table, g)
    return translation_matrix(table, f) @ (g[table.involution] * haar.weights)


def identity_density(table: HypergroupTable, haar: HaarWeights) -> np.ndarray:
    d = np.zeros(table.n)
    d[table.identity] = 1.0 / haar.weights[table.identity]
    return d


# ---------------------------------------------------------------------------
# Instance families
# ---------------------------------------------------------------------------

def _point_table(mul: np.ndarray, identity: int, inverse: np.ndarray, name: str) -> HypergroupTable:
    n = mul.shape[0]
    c = np.zeros((n, n, n))
    x, y = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    c[x, y, mul] = 1.0
    return HypergroupTable(n=n, identity=identity, involution=inverse, tensor=c, name=name)


def product_of_cyclics(dims) -> HypergroupTable:
    """The group Z_{d1} x ... x Z_{dk} with mixed-radix element indices."""
    dims = [int(d) for d in dims]
    if not dims or any(d < 1 for d in dims):
        raise ValueError(f"cyclic factors must be positive, got {dims}")
    digits = np.array(list(itertools.product(*[range(d) for d in dims])), dtype=int).reshape(-1, len(dims))
    radix = np.array(dims)
    place = np.cumprod([1] + dims[::-1][:-1])[::-1]
    summed = (digits[:, None, :] + digits[None, :, :]) % radix
    mul = summed @ place
    inverse = ((-digits) % radix) @ place
    label = "x".join(f"Z{d}" for d in dims)
    return _point_table(mul, 0, inverse, label)


def cyclic(n: int) -> HypergroupTable:
    return product_of_cyclics([n])


def orbit_negation(N: int) -> HypergroupTable:
    """Orbits ``{0}, {+-1}, ..., {N}`` of Z_{2N} under negation (N + 1 elements)."""
    if N < 1:
        raise ValueError("orbit_negation needs N >= 1")
    M = 2 * N
    orbit = np.minimum(np.arange(M), M - np.arange(M))
    size = np.bincount(orbit, minlength=N + 1).astype(float)
    a, b = np.meshgrid(np.arange(M), np.arange(M), indexing="ij")
    c = np.zeros((N + 1, N + 1, N + 1))
    np.add.at(c, (orbit[a], orbit[b], orbit[(a + b) % M]), 1.0)
    c /= (size[:, None] * size[None, :])[:, :, None]
    return HypergroupTable(n=N + 1, identity=0, involution=np.arange(N + 1), tensor=c, name=f"orbit{N}")


def validate_group_table(mul) -> tuple[int, np.ndarray]:
    """Return ``(identity, inverse)`` or raise :class:`GroupTableError` naming the failed axiom."""
    mul = np.asarray(mul)
    if mul.ndim != 2 or mul.shape[0] != mul.shape[1] or mul.shape[0] == 0:
        raise GroupTableError("closure: multiplication table must be a non-empty square array")
    n = mul.shape[0]
    if not np.issubdtype(mul.dtype, np.integer) or mul.min() < 0 or mul.max() >= n:
        raise GroupTableError("closure: products must be element indices in range")
    left = _assoc_left(mul)
    right = _assoc_right(mul)
    if not np.array_equal(left, right):
        x, y, z = np.argwhere(left != right)[0]
        raise GroupTableError(f"associativity: ({x}{y}){z} != {x}({y}{z})")
    ids = [e for e in range(n) if np.array_equal(mul[e], np.arange(n)) and np.array_equal(mul[:, e], np.arange(n))]
    if not ids:
        raise GroupTableError("identity: no two-sided identity element")
    e = ids[0]
    inverse = np.full(n, -1)
    for x in range(n):
        hits = np.flatnonzero((mul[x] == e) & (mul[:, x] == e))
        if hits.size == 0:
            raise GroupTableError(f"inverse: element {x} has no two-sided inverse")
        inverse[x] = hits[0]
    return e, inverse


def _assoc_left(mul: np.ndarray) -> np.ndarray:
    # (xy)z
    return mul[mul, :]


def _assoc_right(mul: np.ndarray) -> np.ndarray:
    # x(yz)
    n = mul.shape[0]
    x = np.arange(n)[:, None, None]
    return mul[x, mul[None, :, :]]


def conjugacy(mul, name: str = "conj") -> HypergroupTable:
    """Conjugacy-class hypergroup of a finite group.

    ``delta_Ci * delta_Cj`` is the class distribution of ``ab`` for ``a, b``
    drawn uniformly and independently from classes ``Ci`` and ``Cj``.
    """
    mul = np.asarray(mul, dtype=int)
    e, inverse = validate_group_table(mul)
    n = mul.shape[0]
    cls = np.full(n, -1)
    k = 0
    for x in [e] + [x for x in range(n) if x != e]:
        if cls[x] >= 0:
            continue
        cls[mul[mul[np.arange(n), x], inverse]] = k  # g x g^-1
        k += 1
    size = np.bincount(cls, minlength=k).astype(float)
    a, b = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    c = np.zeros((k, k, k))
    np.add.at(c, (cls[a], cls[b], cls[mul]), 1.0)
    c /= (size[:, None] * size[None, :])[:, :, None]
    class_inv = np.zeros(k, dtype=int)
    class_inv[cls] = cls[inverse]
    return HypergroupTable(n=k, identity=0, involution=class_inv, tensor=c, name=name)


def cyclic_group(n: int) -> np.ndarray:
    i = np.arange(n)
    return (i[:, None] + i[None, :]) % n


def dihedral_group(m: int) -> np.ndarray:
    """Dihedral group of order 2m; element ``s*m + r`` is ``reflection^s rotation^r``."""
    n = 2 * m
    s, r = np.divmod(np.arange(n), m)
    s1, s2 = s[:, None], s[None, :]
    r1, r2 = r[:, None], r[None, :]
    # (s1, r1)(s2, r2) = (s1 + s2, (-1)^s2 r1 + r2)
    rot = np.where(s2 == 0, r1 + r2, -r1 + r2) % m
    return ((s1 + s2) % 2) * m + rot


def symmetric_group(k: int) -> np.ndarray:
    perms = list(itertools.permutations(range(k)))
    index = {p: i for i, p in enumerate(perms)}
    n = len(perms)
    mul = np.empty((n, n), dtype=int)
    for i, p in enumerate(perms):
        for j, q in enumerate(perms):
            # (p q)(x) = p(q(x))
            mul[i, j] = index[tuple(p[q[x]] for x in range(k))]
    return mul


FAMILIES = ("cyclic", "product", "orbit", "conjugacy")


def _balanced_dims(size: int) -> list[int]:
    d = max(x for x in range(1, math.isqrt(size) + 1) if size % x == 0)
    return [size] if d == 1 else [d, size // d]


def build_family(kind: str, param) -> HypergroupTable:
    """Dispatch to a builder.

    ``param`` is ``n`` for ``cyclic``, a list of factors for ``product``,
    ``N`` for ``orbit`` and a multiplication table for ``conjugacy``.
    """
    if kind == "cyclic":
        return cyclic(int(param))
    if kind == "product":
        return product_of_cyclics(param)
    if kind == "orbit":
        return orbit_negation(int(param))
    if kind == "conjugacy":
        return conjugacy(param)
    raise ValueError(f"unknown family {kind!r}; expected one of {FAMILIES}")


def family_instance(kind: str, size: int) -> HypergroupTable:
    """A representative instance of ``kind`` with about ``size`` elements.

    ``cyclic`` and ``product`` have exactly ``size`` elements and ``orbit``
    uses ``orbit_negation(size - 1)``.  ``conjugacy`` takes the dihedral group
    of order ``2 * max(3, size // 2)``, whose class count is smaller.
    """
    if size < 1:
        raise ValueError("size must be positive")
    if kind == "cyclic":
        t = cyclic(size)
    elif kind == "product":
        t = product_of_cyclics(_balanced_dims(size))
    elif kind == "orbit":
        t = orbit_negation(max(1, size - 1))
    elif kind == "conjugacy":
        m = max(3, size // 2)
        t = conjugacy(dihedral_group(m), name=f"conjD{m}")
    else:
        raise ValueError(f"unknown family {kind!r}; expected one of {FAMILIES}")
    return t
