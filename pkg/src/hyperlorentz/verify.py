"""Numerical verification of the convolution inequalities on random instances.

Each ``check_*`` function evaluates both sides of one inequality and returns
:class:`CheckResult` records.  :func:`run_suite` draws instances from the
builder families, runs every check, and keeps the worst point of each
(check, trial) pair so that reports stay small.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from ._quadrature import binomial_power_integral, power_integral, scaled
from .hypergroup import (
    FAMILIES,
    HaarWeights,
    HypergroupTable,
    compute_haar,
    convolve,
    family_instance,
    validate_hypergroup,
)
from .norms import LorentzParams, conjugate, lebesgue_norm, maximal_lorentz_norm, ratio
from .potential import GrowthSpace, RieszParams, growth_space_on, riesz_potential
from .steps import MaximalFunction, StepFunction, decreasing_rearrangement, maximal, tail_product_integral

INF = math.inf


class ConfigError(ValueError):
    """Exponents or suite settings outside the hypotheses of a check."""


class SuiteError(RuntimeError):
    """A structural failure during a trial; ``instance`` replays it."""

    def __init__(self, message: str, instance: dict):
        super().__init__(message)
        self.instance = instance


@dataclass
class CheckResult:
    check_name: str
    trial_id: int
    lhs: float
    rhs: float
    ratio: float
    passed: bool
    vacuous: bool = False
    t: float | None = None
    evaluations: int = 1
    violations: int = 0
    vacuous_count: int = 0
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pass"] = d.pop("passed")
        return d


def _make(name, trial, lhs, rhs, slack, t=None, **params) -> CheckResult:
    lhs, rhs = float(lhs), float(rhs)
    vac = math.isinf(rhs)
    ok = vac or lhs <= rhs * (1.0 + slack)
    return CheckResult(name, trial, lhs, rhs, ratio(lhs, rhs), ok, vac, None if t is None else float(t), 1, int(not ok), int(vac), params)


def _condense(name, trial, t, lhs, rhs, slack, **params) -> CheckResult:
    """One record for many evaluation points: the worst ratio, with counts."""
    lhs = np.asarray(lhs, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    vac = np.isinf(rhs)
    ok = vac | (lhs <= rhs * (1.0 + slack))
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(lhs == 0, 0.0, np.where(rhs == 0, INF, lhs / rhs))
    r = np.where(vac, 0.0, r)
    k = int(np.argmax(r)) if r.size else 0
    res = CheckResult(
        name, trial, float(lhs[k]), float(rhs[k]), float(r[k]), bool(ok.all()), bool(vac.all()),
        None if t is None else float(np.asarray(t)[k]), int(lhs.size), int((~ok).sum()), int(vac.sum()), params,
    )
    return res


def collapse(results: list[CheckResult]) -> list[CheckResult]:
    """Merge the records of each (trial, check) into the one with the worst ratio,
    summing evaluation, violation and vacuous counts."""
    groups: dict[tuple, list[CheckResult]] = {}
    for r in results:
        groups.setdefault((r.trial_id, r.check_name), []).append(r)
    out = []
    for (tid, name), rs in groups.items():
        live = [r for r in rs if not r.vacuous] or rs
        worst = max(live, key=lambda r: r.ratio)
        out.append(CheckResult(
            name, tid, worst.lhs, worst.rhs, worst.ratio, all(r.passed for r in rs), all(r.vacuous for r in rs),
            worst.t, sum(r.evaluations for r in rs), sum(r.violations for r in rs),
            sum(r.vacuous_count for r in rs), dict(worst.params),
        ))
    return out


def _expand(name, trial, t, lhs, rhs, slack, **params) -> list[CheckResult]:
    return [_make(name, trial, a, b, slack, t=s, **params) for s, a, b in zip(t, lhs, rhs)]


def sample_times(rng: np.random.Generator, *functions, count: int = 100) -> np.ndarray:
    """All positive breakpoints of the given step/maximal functions plus
    ``count`` log-uniform points spanning a decade beyond them."""
    bps = np.concatenate([np.asarray(f.breakpoints, dtype=float) for f in functions]) if functions else np.zeros(0)
    pos = bps[bps > 0]
    lo = pos.min() / 10 if pos.size else 0.1
    hi = pos.max() * 10 if pos.size else 10.0
    rand = np.exp(rng.uniform(math.log(lo), math.log(hi), size=count)) if count else np.zeros(0)
    return np.unique(np.concatenate([pos, rand]))


# ---------------------------------------------------------------------------
# Lemmas
# ---------------------------------------------------------------------------

def _truncation_sides(table, haar, f, phi, t, support=None, beta=None):
    f = np.asarray(f, dtype=float)
    support = (f != 0) if support is None else np.asarray(support, dtype=bool)
    if np.any(f[~support] != 0):
        raise ValueError("f must vanish outside the given support")
    beta = float(np.abs(f).max()) if beta is None else float(beta)
    if np.abs(f).max() > beta:
        raise ValueError("beta must bound |f|")
    r = float(haar.weights[support].sum())
    h = convolve(table, haar, f, phi)
    hmax = maximal(decreasing_rearrangement(h, haar))
    pmax = maximal(decreasing_rearrangement(phi, haar))
    lhs = hmax(t)
    rhs1 = np.full(t.shape, beta * r * float(pmax(r))) if r > 0 else np.zeros(t.shape)
    rhs2 = beta * r * pmax(t)
    return lhs, rhs1, rhs2, {"beta": beta, "r": r}


def check_truncation_lemma(table, haar, f_bounded, phi, t_samples, *, support=None, beta=None,
                           trial_id: int = 0, slack: float = 1e-9) -> list[CheckResult]:
    """``(f*phi)**(t) <= beta r phi**(r)`` and ``<= beta r phi**(t)`` for f bounded by
    beta and vanishing off a set of measure r."""
    t = np.asarray(t_samples, dtype=float)
    lhs, r1, r2, info = _truncation_sides(table, haar, f_bounded, phi, t, support, beta)
    return _expand("truncation_at_r", trial_id, t, lhs, r1, slack, **info) + _expand("truncation_at_t", trial_id, t, lhs, r2, slack, **info)


def _oneil_sides(fs: StepFunction, ps: StepFunction, fm: MaximalFunction, pm: MaximalFunction, hm: MaximalFunction, t):
    lhs = hm(t)
    rhs1 = t * fm(t) * pm(t) + tail_product_integral(fs, ps, t, "star_star")
    rhs2 = tail_product_integral(fm, pm, t, "maximal_maximal")
    return lhs, rhs1, rhs2


def check_oneil(table, haar, f, phi, t_samples, *, trial_id: int = 0, slack: float = 1e-9) -> list[CheckResult]:
    """``(f*phi)**(t) <= t f**(t) phi**(t) + int_t^inf f* phi*`` and
    ``(f*phi)**(t) <= int_t^inf f** phi**``; the second is vacuous when its tail diverges."""
    t = np.asarray(t_samples, dtype=float)
    fs, ps = decreasing_rearrangement(f, haar), decreasing_rearrangement(phi, haar)
    hm = maximal(decreasing_rearrangement(convolve(table, haar, f, phi), haar))
    lhs, r1, r2 = _oneil_sides(fs, ps, maximal(fs), maximal(ps), hm, t)
    return _expand("oneil", trial_id, t, lhs, r1, slack) + _expand("oneil_maximal", trial_id, t, lhs, r2, slack)


class Steps(NamedTuple):
    """Nonnegative piecewise-constant function on [0, inf); need not be monotone."""

    breakpoints: np.ndarray
    values: np.ndarray


def hardy_integrals(step, p: float, q: float) -> tuple[float, float]:
    """``int (1/s int_0^s f)^p s^{p-q-1} ds`` and ``int f^p t^{p-q-1} dt``, piece by piece."""
    t = np.asarray(step.breakpoints, dtype=float)
    v = np.asarray(step.values, dtype=float)
    if t[0] != 0 or np.any(np.diff(t) <= 0) or np.any(v < 0):
        raise ValueError("step function needs breakpoints 0 = t0 < t1 < ... and nonnegative values")
    top = float(v.max()) if v.size else 0.0
    if top == 0.0:
        return 0.0, 0.0
    # both integrals are homogeneous of degree p; normalizing avoids underflow
    v = v / top
    lo, hi = t, np.append(t[1:], INF)
    live = v > 0
    rhs_pieces = np.zeros(v.shape)
    rhs_pieces[live] = scaled(v[live] ** p, power_integral(p - q - 1.0, lo[live], hi[live]))
    weighted = float(rhs_pieces.sum())
    # primitive I(s) = c + v s on each piece
    prim_at = np.concatenate([[0.0], np.cumsum(v[:-1] * np.diff(t))])
    c = prim_at - v * t
    c[0] = 0.0
    lhs = float(np.sum(binomial_power_integral(c, v, p, -q - 1.0, lo, hi)))
    factor = top**p
    return tuple(x if math.isinf(x) else x * factor for x in (lhs, weighted))


def hardy_sides(step, p: float, q: float, sharp: bool = False) -> tuple[float, float]:
    """Both sides of the averaged Hardy inequality with constant ``(p/q)^q``,
    or with ``(p/q)^p`` when ``sharp``."""
    lhs, weighted = hardy_integrals(step, p, q)
    const = (p / q) ** (p if sharp else q)
    return lhs, const * weighted if weighted else 0.0


def check_hardy(step_f, p: float, q: float, *, trial_id: int = 0, slack: float = 1e-9,
                sharp: bool = False) -> CheckResult:
    """``int (1/s int_0^s f)^p s^{p-q-1} ds <= C int f^p t^{p-q-1} dt``.

    ``C = (p/q)^q`` by default.  That constant fails whenever it is below the
    sharp value ``(p/q)^p`` (for instance every ``q < 1`` with ``p > q``), so
    ``sharp=True`` checks the inequality with ``(p/q)^p`` as ``hardy_sharp``.
    """
    if not (1 <= p < INF) or not q > 0:
        raise ConfigError(f"Hardy's inequality needs 1 <= p < inf and q > 0 (p={p}, q={q})")
    lhs, rhs = hardy_sides(step_f, p, q, sharp)
    return _make("hardy_sharp" if sharp else "hardy", trial_id, lhs, rhs, slack, p=p, q=q)


# ---------------------------------------------------------------------------
# Young and fractional integrals
# ---------------------------------------------------------------------------

def young_target(p1: float, p2: float) -> float:
    inv = 1.0 / p1 + 1.0 / p2 - 1.0
    if inv <= 0:
        raise ConfigError(f"need 1/p1 + 1/p2 > 1 (p1={p1}, p2={p2})")
    return 1.0 / inv


def _inv(q: float) -> float:
    return 0.0 if math.isinf(q) else 1.0 / q


def check_young_hypotheses(p1, q1, p2, q2, q0) -> float:
    p0 = young_target(p1, p2)
    for name, val in (("p1", p1), ("p2", p2), ("q1", q1), ("q2", q2), ("q0", q0)):
        if not val >= 1:
            raise ConfigError(f"{name} must be >= 1, got {val}")
    if _inv(q1) + _inv(q2) < _inv(q0) - 1e-15:
        raise ConfigError(f"need 1/q1 + 1/q2 >= 1/q0 (q1={q1}, q2={q2}, q0={q0})")
    return p0


class _Norms:
    """Memoized Lorentz norms of one function."""

    def __init__(self, values, haar: HaarWeights):
        self.values = np.asarray(values, dtype=float)
        self.haar = haar
        self.star = decreasing_rearrangement(self.values, haar)
        self.max = maximal(self.star)
        self._cache: dict = {}

    def lorentz(self, p: float, q: float) -> float:
        key = ("L", p, q)
        if key not in self._cache:
            self._cache[key] = maximal_lorentz_norm(self.max, LorentzParams(p, q))
        return self._cache[key]

    def lebesgue(self, p: float) -> float:
        key = ("p", p)
        if key not in self._cache:
            self._cache[key] = lebesgue_norm(self.values, self.haar, p)
        return self._cache[key]


def check_young(table, haar, f, phi, p1, q1, p2, q2, q0, *, trial_id: int = 0, slack: float = 1e-9,
                _cache=None) -> CheckResult:
    """``||f*phi||_{p0,q0} <= 3 p0 ||f||_{p1,q1} ||phi||_{p2,q2}``, ``1/p0 = 1/p1 + 1/p2 - 1``."""
    p0 = check_young_hypotheses(p1, q1, p2, q2, q0)
    if _cache is None:
        nf, nphi = _Norms(f, haar), _Norms(phi, haar)
        nh = _Norms(convolve(table, haar, f, phi), haar)
    else:
        nf, nphi, nh = _cache
    lhs = nh.lorentz(p0, q0)
    rhs = 3.0 * p0 * nf.lorentz(p1, q1) * nphi.lorentz(p2, q2)
    return _make("young", trial_id, lhs, rhs, slack, p1=p1, q1=q1, p2=p2, q2=q2, q0=q0, p0=p0)


def check_fractional(space: GrowthSpace, params: RieszParams, f, p: float, q: float, *,
                     trial_id: int = 0, slack: float = 1e-9, _cache=None) -> list[CheckResult]:
    """Lorentz and Lebesgue bounds for convolution with the Riesz kernel of ``space``.

    Returns, in order: the kernel bound with the kernel's actual weak norm, the
    same bound with the growth constant ``(N/alpha) A^{(N-alpha)/N}``, and
    (for ``1 < p < inf``) the two Lebesgue versions.  A fifth record checks that
    the discrete kernel's weak norm does not exceed the growth constant.
    """
    if space.table is None:
        raise ConfigError("fractional checks need a growth space attached to a hypergroup")
    if not 1 <= p < INF or not q >= 1:
        raise ConfigError(f"need 1 <= p < inf and q >= 1 (p={p}, q={q})")
    r = params.target_index(p)
    haar = space.haar
    kernel = space.kernel(params)
    weak = maximal_lorentz_norm(maximal(decreasing_rearrangement(kernel, haar)), LorentzParams(params.weak_index, INF))
    growth = params.continuum_weak_norm(space.A)
    nf = _Norms(f, haar) if _cache is None else _cache
    nh = _Norms(riesz_potential(space.table, haar, nf.values, kernel), haar)
    info = {"p": p, "q": q, "r": r, "alpha": params.alpha, "N": params.N, "A": space.A}
    lhs = nh.lorentz(r, q)
    out = [
        _make("kernel_lorentz", trial_id, lhs, 3.0 * r * weak * nf.lorentz(p, q), slack, **info),
        _make("riesz_lorentz", trial_id, lhs, 3.0 * r * growth * nf.lorentz(p, q), slack, **info),
    ]
    if p > 1:
        c = 3.0 * r * conjugate(p) * (p / r) ** (1.0 / p - 1.0 / r)
        lhs_r = nh.lebesgue(r)
        out.append(_make("kernel_lebesgue", trial_id, lhs_r, c * weak * nf.lebesgue(p), slack, **info))
        out.append(_make("riesz_lebesgue", trial_id, lhs_r, c * growth * nf.lebesgue(p), slack, **info))
    out.append(_make("kernel_weak_bound", trial_id, weak, growth, slack, **info))
    return out


# ---------------------------------------------------------------------------
# The suite
# ---------------------------------------------------------------------------

@dataclass
class SuiteConfig:
    seed: int = 0
    trials: int = 1000
    families: tuple = FAMILIES
    sizes: tuple = (4, 16, 64)
    slack: float = 1e-9
    t_samples: int = 100
    young_p: tuple = (4 / 3, 3 / 2, 2.0, 3.0)
    young_q: tuple = (1.0, 2.0, INF)
    hardy_p: tuple = (1.0, 1.5, 2.0, 3.0)
    hardy_q: tuple = (0.5, 1.0, 2.0)
    lebesgue_p: tuple = (1.0, 2.0, INF)
    embedding_p: tuple = (1.5, 2.0, 3.0)
    embedding_qr: tuple = ((1.5, 2.0), (1.5, 3.0), (2.0, 3.0), (2.0, 4.0), (3.0, 4.0))
    fractional_p: tuple = (1.5, 2.0, 3.0)
    fractional_q: tuple = (1.0, 2.0, INF)
    fractional_N: tuple = (1.0, 2.0)
    jobs: int = 1

    def __post_init__(self):
        if int(self.trials) < 1:
            raise ConfigError("trials must be at least 1")
        unknown = [f for f in self.families if f not in FAMILIES]
        if unknown:
            raise ConfigError(f"unknown families {unknown}")
        if not self.families or not self.sizes or any(int(s) < 1 for s in self.sizes):
            raise ConfigError("need at least one family and positive sizes")
        if not self.slack >= 0 or self.t_samples < 0:
            raise ConfigError("slack and t_samples must be nonnegative")
        self.families = tuple(self.families)
        self.sizes = tuple(int(s) for s in self.sizes)
        self.embedding_qr = tuple(tuple(float(x) for x in qr) for qr in self.embedding_qr)
        for q, r in self.embedding_qr:
            if not 1 < q < r < INF:
                raise ConfigError(f"embedding pairs need 1 < q < r < inf, got {(q, r)}")
        for p in self.embedding_p:
            if not 1 < p < INF:
                raise ConfigError("embedding exponents need 1 < p < inf")
        for p in self.fractional_p:
            if not 1 <= p < INF:
                raise ConfigError("fractional exponents need 1 <= p < inf")
        for p in self.hardy_p:
            if not 1 <= p < INF:
                raise ConfigError("Hardy exponents need 1 <= p < inf")
        if any(not q > 0 for q in self.hardy_q):
            raise ConfigError("Hardy q must be positive")

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("jobs")
        return _jsonable(d)

    @classmethod
    def from_dict(cls, doc: dict) -> "SuiteConfig":
        known = {f for f in cls.__dataclass_fields__}
        bad = set(doc) - known
        if bad:
            raise ConfigError(f"unknown suite settings: {sorted(bad)}")
        defaults = cls()
        kw = {}
        for k, v in doc.items():
            v = _unjson(v)
            kind = type(getattr(defaults, k))
            try:
                if kind is tuple:
                    if not isinstance(v, (list, tuple)):
                        raise TypeError
                    kw[k] = tuple(tuple(float(y) for y in x) if isinstance(x, (list, tuple)) else x for x in v)
                elif kind is int:
                    if isinstance(v, bool) or float(v) != int(v):
                        raise TypeError
                    kw[k] = int(v)
                else:
                    kw[k] = kind(v)
            except (TypeError, ValueError):
                raise ConfigError(f"suite setting {k!r} has the wrong type: {v!r}") from None
        return cls(**kw)


def _jsonable(x):
    if isinstance(x, float):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            return "nan"
        return x
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.generic):
        return _jsonable(x.item())
    return x


def _unjson(x):
    if isinstance(x, str) and x in ("inf", "-inf", "nan"):
        return float(x)
    if isinstance(x, list):
        return [_unjson(v) for v in x]
    if isinstance(x, dict):
        return {k: _unjson(v) for k, v in x.items()}
    return x


@lru_cache(maxsize=64)
def _instance(family: str, size: int) -> tuple[HypergroupTable, HaarWeights]:
    table = family_instance(family, size)
    report = validate_hypergroup(table)
    if not report.passed:
        raise SuiteError(f"builder produced an invalid table: {report.failures}", {"family": family, "size": size})
    return table, compute_haar(table)


def random_function(rng: np.random.Generator, n: int) -> np.ndarray:
    """Signed test functions of several shapes: dense, sparse, tied levels, spiky."""
    kind = rng.integers(4)
    if kind == 0:
        f = rng.normal(size=n)
    elif kind == 1:
        f = rng.normal(size=n) * (rng.random(n) < rng.uniform(0.1, 0.6))
    elif kind == 2:
        f = rng.integers(-3, 4, size=n).astype(float)
    else:
        f = rng.exponential(size=n) ** 3 * rng.choice([-1.0, 1.0], size=n)
    if not np.any(f):
        f[rng.integers(n)] = 1.0
    return f


def random_steps(rng: np.random.Generator) -> Steps:
    """A non-monotone nonnegative step function, sometimes starting with a zero run."""
    k = int(rng.integers(2, 9))
    widths = rng.exponential(size=k - 1) * 10.0 ** rng.uniform(-1, 1)
    t = np.concatenate([[0.0], np.cumsum(widths)])
    v = rng.uniform(0, 3, size=k) * (rng.random(k) < 0.8)
    if rng.random() < 0.5:
        v[0] = 0.0
    v[-1] = 0.0
    if not np.any(v):
        v[k // 2 if k > 2 else 0] = 1.0
        v[-1] = 0.0
    return Steps(t, v)


def trial_instance(config: SuiteConfig, trial_id: int) -> dict:
    """Everything random about one trial; the same seed and id give the same dict."""
    rng = np.random.default_rng([int(config.seed), int(trial_id)])
    family = config.families[trial_id % len(config.families)]
    size = config.sizes[(trial_id // len(config.families)) % len(config.sizes)]
    table, haar = _instance(family, size)
    n = table.n
    f = random_function(rng, n)
    phi = random_function(rng, n)
    support = rng.random(n) < rng.uniform(0.1, 1.0)
    if not support.any():
        support[rng.integers(n)] = True
    beta = float(rng.uniform(0.5, 2.0))
    bounded = np.where(support, rng.uniform(-beta, beta, size=n), 0.0)
    bounded[np.flatnonzero(support)[0]] = beta
    others = [x for x in range(n) if x != table.identity]
    N = float(rng.choice(config.fractional_N))
    A = float(rng.uniform(0.5, 2.0))
    order = [int(x) for x in rng.permutation(others)]
    alpha_frac = rng.uniform(0.1, 0.9, size=len(config.fractional_p)).tolist()
    return {
        "trial_id": int(trial_id),
        "family": family,
        "size": int(size),
        "f": f.tolist(),
        "phi": phi.tolist(),
        "bounded": bounded.tolist(),
        "support": support.tolist(),
        "beta": beta,
        "steps": [x.tolist() for x in random_steps(rng)],
        "growth": {"A": A, "N": N, "order": order, "alpha_fraction": alpha_frac},
        "t_seed": int(rng.integers(2**32)),
    }


def run_trial(config: SuiteConfig, trial_id: int) -> list[CheckResult]:
    inst = trial_instance(config, trial_id)
    try:
        return _run_trial(config, inst)
    except Exception as exc:  # noqa: BLE001 - anything structural aborts the suite with a replay record
        raise SuiteError(f"trial {trial_id} failed: {exc!r}", inst) from exc


def _run_trial(cfg: SuiteConfig, inst: dict) -> list[CheckResult]:
    tid, slack = inst["trial_id"], cfg.slack
    table, haar = _instance(inst["family"], inst["size"])
    f, phi = np.array(inst["f"]), np.array(inst["phi"])
    trng = np.random.default_rng(inst["t_seed"])
    out: list[CheckResult] = []

    nf, nphi = _Norms(f, haar), _Norms(phi, haar)
    h = convolve(table, haar, f, phi)
    nh = _Norms(h, haar)

    for p in cfg.lebesgue_p:
        out.append(_make("young_lebesgue", tid, nh.lebesgue(p), nf.lebesgue(p) * nphi.lebesgue(1.0), slack, p=p))

    # truncation lemma
    bounded = np.array(inst["bounded"])
    support = np.array(inst["support"], dtype=bool)
    pbound = _Norms(bounded, haar)
    hb = _Norms(convolve(table, haar, bounded, phi), haar)
    r = float(haar.weights[support].sum())
    t = sample_times(trng, hb.star, nphi.star, count=cfg.t_samples)
    t = np.union1d(t, [r])
    beta = inst["beta"]
    lhs = hb.max(t)
    out.append(_condense("truncation_at_r", tid, t, lhs, np.full(t.shape, beta * r * float(nphi.max(r))), slack, beta=beta, r=r))
    out.append(_condense("truncation_at_t", tid, t, lhs, beta * r * nphi.max(t), slack, beta=beta, r=r))
    del pbound

    # O'Neil
    t = sample_times(trng, nh.star, nf.star, nphi.star, count=cfg.t_samples)
    lhs, r1, r2 = _oneil_sides(nf.star, nphi.star, nf.max, nphi.max, nh.max, t)
    out.append(_condense("oneil", tid, t, lhs, r1, slack))
    out.append(_condense("oneil_maximal", tid, t, lhs, r2, slack))

    # Hardy on f* and on a non-monotone step function
    steps = Steps(*(np.array(x) for x in inst["steps"]))
    for label, sf in (("rearrangement", nf.star), ("random", steps)):
        for p in cfg.hardy_p:
            for q in cfg.hardy_q:
                lhs, weighted = hardy_integrals(sf, p, q)
                for name, power in (("hardy", q), ("hardy_sharp", p)):
                    rhs = (p / q) ** power * weighted if weighted else 0.0
                    out.append(_make(name, tid, lhs, rhs, slack, p=p, q=q, input=label))

    # Young
    for p1 in cfg.young_p:
        for p2 in cfg.young_p:
            if 1.0 / p1 + 1.0 / p2 <= 1.0:
                continue
            for q1 in cfg.young_q:
                for q2 in cfg.young_q:
                    for q0 in cfg.young_q:
                        if _inv(q1) + _inv(q2) < _inv(q0):
                            continue
                        out.append(check_young(table, haar, f, phi, p1, q1, p2, q2, q0, trial_id=tid,
                                               slack=slack, _cache=(nf, nphi, nh)))

    # embeddings
    for p in cfg.embedding_p:
        lp, lpp = nf.lebesgue(p), nf.lorentz(p, p)
        out.append(_make("lebesgue_le_lorentz", tid, lp, lpp, slack, p=p))
        out.append(_make("lorentz_le_conjugate_lebesgue", tid, lpp, conjugate(p) * lp, slack, p=p))
        for q, rr in cfg.embedding_qr:
            lpr, lpq = nf.lorentz(p, rr), nf.lorentz(p, q)
            out.append(_make("embedding", tid, lpr, (q / p) ** (1.0 / q - 1.0 / p) * lpq, slack, p=p, q=q, r=rr))
            out.append(_make("embedding_sharp", tid, lpr, (q / p) ** (1.0 / q - 1.0 / rr) * lpq, slack, p=p, q=q, r=rr))

    # fractional integrals on a growth space carried by the same hypergroup
    g = inst["growth"]
    if table.n > 1:
        space = growth_space_on(table, haar, g["A"], g["N"], g["order"])
        for p, frac in zip(cfg.fractional_p, g["alpha_fraction"]):
            params = RieszParams(alpha=frac * g["N"] / p, N=g["N"])
            for q in cfg.fractional_q:
                res = check_fractional(space, params, f, p, q, trial_id=tid, slack=slack, _cache=nf)
                if q != cfg.fractional_q[0]:
                    # Lebesgue bounds and the kernel bound do not depend on q
                    res = res[:2]
                out.extend(res)
    return collapse(out)


def _run_chunk(args) -> list[CheckResult]:
    cfg, ids = args
    out = []
    for i in ids:
        out.extend(run_trial(cfg, i))
    return out


def summarize(results: list[CheckResult]) -> dict:
    summary: dict[str, dict] = {}
    for res in results:
        s = summary.setdefault(
            res.check_name,
            {"records": 0, "trials": set(), "evaluations": 0, "violations": 0, "vacuous": 0, "max_ratio": 0.0, "worst_trial": None},
        )
        s["records"] += 1
        s["trials"].add(res.trial_id)
        s["evaluations"] += res.evaluations
        s["violations"] += res.violations
        s["vacuous"] += res.vacuous_count
        if not res.vacuous and res.ratio > s["max_ratio"]:
            s["max_ratio"] = res.ratio
            s["worst_trial"] = res.trial_id
    for s in summary.values():
        s["trials"] = len(s["trials"])
    total = sum(s["violations"] for s in summary.values())
    return {"checks": dict(sorted(summary.items())), "total_violations": total}


def run_suite(config: SuiteConfig) -> tuple[list[CheckResult], dict]:
    """Run every check on ``config.trials`` trials; deterministic for a fixed seed."""
    ids = list(range(int(config.trials)))
    if config.jobs and config.jobs > 1:
        chunks = [ids[k::config.jobs] for k in range(config.jobs)]
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            parts = list(pool.map(_run_chunk, [(config, c) for c in chunks]))
        results = [r for part in parts for r in part]
    else:
        results = _run_chunk((config, ids))
    results.sort(key=lambda r: (r.trial_id, r.check_name))
    return results, summarize(results)


def report_document(config: SuiteConfig, results: list[CheckResult], summary: dict) -> dict:
    return {
        "config": config.to_dict(),
        "summary": _jsonable(summary),
        "results": [_jsonable(r.to_dict()) for r in results],
    }


def dumps_report(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=1, allow_nan=False) + "\n"


CSV_COLUMNS = ("trial_id", "check_name", "lhs", "rhs", "ratio", "pass")


def results_csv(results: list[CheckResult]) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for r in results:
        lines.append(",".join([str(r.trial_id), r.check_name, repr(r.lhs), repr(r.rhs), repr(r.ratio), str(r.passed).lower()]))
    return "\n".join(lines) + "\n"
