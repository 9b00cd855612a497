import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperlorentz.hypergroup import compute_haar, cyclic, family_instance, identity_density, orbit_negation
from hyperlorentz.norms import lorentz_norm
from hyperlorentz.potential import (
    GrowthSpace,
    RieszParams,
    geometric_grid,
    growth_space_on,
    mass_geometric_grid,
    riesz_kernel,
    riesz_potential,
    synth_growth_space,
    validate_quasimetric,
)
from hyperlorentz.steps import distribution, maximal_of


def cycle_metric(n):
    i = np.arange(n)
    d = np.abs(i[:, None] - i[None, :])
    return np.minimum(d, n - d).astype(float)


def test_quasimetric_examples():
    assert validate_quasimetric(cycle_metric(7)).quasi_constant == 1.0
    sq = validate_quasimetric(cycle_metric(7) ** 2)
    assert sq.passed and 1.0 < sq.quasi_constant <= 2.0
    bad = cycle_metric(4)
    bad[0, 1] = bad[1, 0] = 0.0
    rep = validate_quasimetric(bad)
    assert not rep.passed and "identity_of_indiscernibles" in rep.failures
    skew = cycle_metric(4)
    skew[0, 1] = 3.0
    assert "symmetry" in validate_quasimetric(skew).failures


def test_quasi_constant_of_squared_path_is_two():
    # rho = d^2 on a path of three points: rho(0,2) = 4 = 2 (1 + 1)
    d = np.array([[0, 1, 2], [1, 0, 1], [2, 1, 0]], dtype=float)
    assert validate_quasimetric(d**2).quasi_constant == 2.0


def test_kernel_examples():
    params = RieszParams(1.0, 2.0)
    assert riesz_kernel([0.0, 1.0, 2.0], params).tolist() == [0.0, 1.0, 0.5]
    assert riesz_kernel([0.0, 1.0, 2.0], params, "cap").tolist() == [1.0, 1.0, 0.5]
    assert riesz_kernel([0.0, 3.0, 3.0, 3.0], params)[1:].tolist() == [3.0**-1] * 3
    near = riesz_kernel([0.0, 0.5, 4.0], RieszParams(2.0 - 1e-9, 2.0))
    np.testing.assert_allclose(near[1:], 1.0, rtol=1e-8)
    with pytest.raises(ValueError):
        riesz_kernel([0.0, 0.0, 1.0], params)
    with pytest.raises(ValueError):
        riesz_kernel([0.0, -1.0], params)
    with pytest.raises(ValueError):
        RieszParams(2.0, 2.0)
    with pytest.raises(ValueError):
        params.target_index(2.0)


def definition_sum(table, w, f, k):
    n = table.n
    c = table.tensor
    out = np.zeros(n)
    for x in range(n):
        for y in range(n):
            tk = sum(c[x, y, z] * k[z] for z in range(n))
            out[x] += tk * f[table.involution[y]] * w[y]
    return out


def test_potential_two_ways():
    table = orbit_negation(2)
    haar = compute_haar(table)
    k = riesz_kernel([0.0, 1.0, 2.0], RieszParams(1.0, 2.0))
    f = np.array([0.0, 1.0, 0.0])
    got = riesz_potential(table, haar, f, k)
    np.testing.assert_allclose(got, definition_sum(table, haar.weights, f, k), rtol=1e-12)
    np.testing.assert_allclose(got, [2.0, 0.5, 2.0], rtol=1e-15)


def test_potential_trivial_inputs():
    table = family_instance("conjugacy", 16)
    haar = compute_haar(table)
    space = growth_space_on(table, haar, 1.3, 2.0)
    k = space.kernel(RieszParams(0.7, 2.0))
    np.testing.assert_allclose(riesz_potential(table, haar, identity_density(table, haar), k), k, atol=1e-15)
    assert np.all(riesz_potential(table, haar, np.zeros(table.n), k) == 0.0)


def test_synth_growth_examples():
    space = synth_growth_space(1.0, 1.0, [1.0, 2.0, 4.0])
    assert space.weights.tolist() == [1.0, 1.0, 2.0]
    assert space.ball_measure(space.radii).tolist() == [1.0, 2.0, 4.0]
    two = synth_growth_space(2.0, 3.0, [0.5, 1.5])
    np.testing.assert_allclose(two.ball_measure(two.radii), [2 * 0.5**3, 2 * 1.5**3], rtol=1e-15)
    grid = geometric_grid(0.1, 7.0, 17)
    assert synth_growth_space(1.7, 2.5, grid).weights.sum() == pytest.approx(1.7 * 7.0**2.5, rel=1e-14)
    with pytest.raises(ValueError):
        synth_growth_space(1.0, 1.0, [1.0, 3.0, 2.0])
    with pytest.raises(ValueError):
        geometric_grid(1.0, 2.0, 1)


@pytest.mark.parametrize("N", [1.0, 2.0])
def test_kernel_distribution_follows_growth(N):
    A, alpha = 1.0, N / 4
    space = synth_growth_space(A, N, mass_geometric_grid(A, N, 64))
    params = RieszParams(alpha, N)
    k = space.kernel(params)
    lam = distribution(k, space.haar)
    # at the top of each level the distribution is exactly A s^{N/(alpha-N)}
    ends = lam.breakpoints[1:]
    np.testing.assert_allclose(lam(ends * (1 - 1e-12)), A * ends ** (N / (alpha - N)), rtol=1e-9)
    # and it never exceeds that curve
    s = np.geomspace(ends.min(), ends.max(), 2000)
    assert np.all(lam(s) <= A * s ** (N / (alpha - N)) * (1 + 1e-12))


@pytest.mark.parametrize("N", [1.0, 2.0])
def test_kernel_weak_norm_dense_sampling(N):
    A, params = 1.0, RieszParams(N / 4, N)
    space = synth_growth_space(A, N, mass_geometric_grid(A, N, 32))
    m = maximal_of(space.kernel(params), space.haar)
    t = np.concatenate([np.geomspace(1e-5, 1e5, 400001), m.breakpoints[1:]])
    sampled = float(np.max(t ** (1 / params.weak_index) * m(t)))
    assert space.kernel_weak_norm(params) == pytest.approx(sampled, rel=1e-6)


@pytest.mark.parametrize("N", [1.0, 2.0])
def test_weak_norm_refinement(N):
    A, params = 1.0, RieszParams(N / 4, N)
    target = params.continuum_weak_norm(A)
    errs = []
    for M in (32, 64, 128, 256):
        space = synth_growth_space(A, N, mass_geometric_grid(A, N, M))
        errs.append(abs(space.kernel_weak_norm(params) - target) / target)
    assert all(b <= a for a, b in zip(errs, errs[1:]))
    assert errs[-1] < 0.05


@settings(max_examples=40, deadline=None)
@given(
    st.sampled_from(["cyclic", "product", "orbit", "conjugacy"]),
    st.sampled_from([4, 16, 25]),
    st.floats(0.5, 2.0),
    st.sampled_from([1.0, 2.0, 3.0]),
    st.integers(0, 2**31),
)
def test_growth_space_on_hypergroup(family, size, A, N, seed):
    table = family_instance(family, size)
    haar = compute_haar(table)
    rng = np.random.default_rng(seed)
    others = [x for x in range(table.n) if x != table.identity]
    space = growth_space_on(table, haar, A, N, rng.permutation(others))
    assert space.radii[table.identity] == 0.0
    if table.n > 1:
        assert space.growth_residual() <= 1e-12
        alpha = float(rng.uniform(0.05, 0.95)) * N
        params = RieszParams(alpha, N)
        # the discrete distribution sits below the continuum one, so the weak norm does too
        assert space.kernel_weak_norm(params) <= params.continuum_weak_norm(A) * (1 + 1e-12)
    rep = validate_quasimetric(space.rho())
    assert rep.passed and rep.quasi_constant == 1.0 or table.n == 1


def test_growth_space_serialization():
    space = synth_growth_space(1.0, 2.0, [1.0, 2.0])
    d = space.to_dict()
    assert d == {"radii": [1.0, 2.0], "weights": [1.0, 3.0], "A": 1.0, "N": 2.0}
    assert isinstance(GrowthSpace(np.array(d["radii"]), np.array(d["weights"]), 1.0, 2.0), GrowthSpace)


def test_kernel_weak_norm_uses_weights():
    space = growth_space_on(cyclic(3), compute_haar(cyclic(3)), 1.0, 1.0)
    params = RieszParams(0.5, 1.0)
    assert space.kernel_weak_norm(params) == pytest.approx(
        lorentz_norm(space.kernel(params), space.haar, 2.0, math.inf), rel=1e-15
    )
