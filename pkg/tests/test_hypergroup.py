import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperlorentz.hypergroup import (
    AxiomError,
    FAMILIES,
    GroupTableError,
    HypergroupTable,
    StructureError,
    compute_haar,
    conjugacy,
    convolve,
    cyclic,
    dihedral_group,
    family_instance,
    haar_from_invariance,
    identity_density,
    invariance_residual,
    orbit_negation,
    product_of_cyclics,
    symmetric_group,
    translate,
    translation_matrix,
    validate_group_table,
    validate_hypergroup,
)


def brute_assoc(c):
    n = len(c)
    worst = 0.0
    for x, y, z, w in itertools.product(range(n), repeat=4):
        left = sum(c[x, y, u] * c[u, z, w] for u in range(n))
        right = sum(c[y, z, u] * c[x, u, w] for u in range(n))
        worst = max(worst, abs(left - right))
    return worst


def z2_perturbed():
    c = np.zeros((2, 2, 2))
    c[0, 0, 0] = c[0, 1, 1] = c[1, 0, 1] = 1.0
    c[1, 1] = [0.9, 0.1]
    return HypergroupTable(2, 0, [0, 1], c)


def orbit3_perturbed():
    c = np.array(orbit_negation(2).tensor)
    c[1, 1] = [0.5, 0.1, 0.4]
    return HypergroupTable(3, 0, [0, 1, 2], c)


def test_z2_group_passes():
    rep = validate_hypergroup(cyclic(2))
    assert rep.passed
    assert rep.max_residual == 0.0


def test_two_element_perturbation_is_still_associative():
    # any commutative two-element table with an identity is associative
    table = z2_perturbed()
    assert brute_assoc(table.tensor) == 0.0
    rep = validate_hypergroup(table)
    assert rep.residuals["associativity"] == 0.0
    assert rep.passed
    np.testing.assert_allclose(compute_haar(table).weights, [1.0, 1 / 0.9], rtol=1e-15)


def test_associativity_failure_matches_brute_force():
    table = orbit3_perturbed()
    assert brute_assoc(table.tensor) == pytest.approx(0.1, abs=1e-15)
    rep = validate_hypergroup(table)
    assert rep.failures == ["associativity"]
    assert rep.residuals["associativity"] == pytest.approx(0.1, abs=1e-15)
    x, y, z, w = rep.locations["associativity"]
    c = table.tensor
    gap = abs(c[x, y] @ c[:, z, w] - c[y, z] @ c[x, :, w])
    assert gap == pytest.approx(0.1, abs=1e-15)


def test_orbit_table_entries():
    c = orbit_negation(2).tensor
    assert c[1, 1].tolist() == [0.5, 0.0, 0.5]
    assert c[1, 2].tolist() == [0.0, 1.0, 0.0]
    assert c[2, 2].tolist() == [1.0, 0.0, 0.0]
    assert c[0].tolist() == np.eye(3).tolist()
    assert validate_hypergroup(orbit_negation(2)).passed


def test_other_axiom_failures():
    c = np.array(orbit_negation(2).tensor)
    c[1, 2] = [0.0, 0.5, 0.4]
    rep = validate_hypergroup(HypergroupTable(3, 0, [0, 1, 2], c))
    assert "probability" in rep.failures
    c = np.array(cyclic(3).tensor)
    rep = validate_hypergroup(HypergroupTable(3, 0, [0, 1, 2], c))
    # 1 + 1 = 2 in Z_3, so the involution fixing 1 misses e in the support
    assert "support" in rep.failures
    assert not rep.passed


def test_structural_errors():
    with pytest.raises(StructureError):
        HypergroupTable(2, 0, [0, 1], np.zeros((2, 2, 3)))
    with pytest.raises(StructureError):
        HypergroupTable(2, 5, [0, 1], np.zeros((2, 2, 2)))
    with pytest.raises(StructureError):
        HypergroupTable.from_dict({"n": 2, "identity": 0})
    assert not issubclass(StructureError, AxiomError)


def test_table_round_trip():
    table = orbit_negation(4)
    back = HypergroupTable.from_dict(table.to_dict())
    assert np.array_equal(back.tensor, table.tensor)
    assert np.array_equal(back.involution, table.involution)
    assert back.identity == table.identity


def test_haar_known_weights():
    assert compute_haar(cyclic(5)).weights.tolist() == [1.0] * 5
    assert compute_haar(orbit_negation(4)).weights.tolist() == [1, 2, 2, 2, 1]
    s3 = conjugacy(symmetric_group(3))
    assert s3.n == 3
    assert compute_haar(s3).weights.tolist() == [1, 3, 2]


def test_s3_classes_have_non_point_products():
    c = conjugacy(symmetric_group(3)).tensor
    assert np.count_nonzero(c > 0) > 9
    assert np.max(np.count_nonzero(c > 0, axis=2)) > 1


def test_haar_rejects_zero_identity_mass():
    c = np.array(cyclic(3).tensor)
    table = HypergroupTable(3, 0, [0, 1, 2], c)
    with pytest.raises(AxiomError):
        compute_haar(table)


@pytest.mark.parametrize("family", FAMILIES)
@pytest.mark.parametrize("size", [1, 4, 16, 64])
def test_families_valid_with_invariant_haar(family, size):
    table = family_instance(family, size)
    assert validate_hypergroup(table).max_residual <= 1e-12
    haar = compute_haar(table)
    assert invariance_residual(table, haar.weights) <= 1e-12
    np.testing.assert_allclose(haar_from_invariance(table), haar.weights, rtol=1e-10)


def test_translate_examples():
    table = orbit_negation(2)
    a, b, c = 2.0, 3.0, 7.0
    np.testing.assert_allclose(translate(table, [a, b, c], 1), [b, (a + c) / 2, b])
    f = np.array([1.0, -2.0, 5.0])
    assert np.array_equal(translate(table, f, table.identity), f)


def test_translation_on_group_is_shift():
    d4 = dihedral_group(4)
    e, inv = validate_group_table(d4)
    table = _group_table(d4, e, inv)
    f = np.arange(8.0) ** 2
    for x in range(8):
        assert np.array_equal(translate(table, f, x), f[d4[x]])
    assert np.array_equal(translation_matrix(table, f)[3], translate(table, f, 3))


def _group_table(mul, e, inv):
    n = len(mul)
    c = np.zeros((n, n, n))
    for x in range(n):
        for y in range(n):
            c[x, y, mul[x][y]] = 1.0
    return HypergroupTable(n, e, inv, c)


def test_convolution_examples():
    z2 = cyclic(2)
    h = convolve(z2, compute_haar(z2), [1.0, 2.0], [3.0, 4.0])
    assert h.tolist() == [11.0, 10.0]
    o2 = orbit_negation(2)
    g = np.array([0.3, -1.2, 4.0])
    np.testing.assert_allclose(convolve(o2, compute_haar(o2), [1.0, 0.0, 0.0], g), g, rtol=1e-15)


def test_identity_density():
    table = conjugacy(symmetric_group(3))
    haar = compute_haar(table)
    delta = identity_density(table, haar)
    g = np.array([1.0, 2.0, -3.0])
    np.testing.assert_allclose(convolve(table, haar, g, delta), g, atol=1e-15)


def test_group_table_rejections():
    with pytest.raises(GroupTableError):
        validate_group_table([[0, 1], [1, 1]])
    with pytest.raises(GroupTableError):
        validate_group_table([[0, 2], [1, 0]])
    assert validate_group_table(symmetric_group(3))[0] == 0


def test_builders_basic_shapes():
    assert cyclic(1).n == 1 and validate_hypergroup(cyclic(1)).passed
    assert product_of_cyclics([2, 3]).n == 6
    assert conjugacy(dihedral_group(32)).n == 19


def _family_and_functions():
    return st.tuples(
        st.sampled_from(FAMILIES),
        st.sampled_from([4, 9, 16]),
        st.integers(0, 2**32 - 1),
    )


@settings(max_examples=60, deadline=None)
@given(_family_and_functions())
def test_convolution_algebra_properties(args):
    family, size, seed = args
    table = family_instance(family, size)
    haar = compute_haar(table)
    rng = np.random.default_rng(seed)
    f, g, k = (rng.normal(size=table.n) for _ in range(3))
    w = haar.weights
    # generalized translation preserves the integral
    for x in range(table.n):
        assert abs(translate(table, f, x) @ w - f @ w) <= 1e-12 * (np.abs(f) @ w)
    fg = convolve(table, haar, f, g)
    np.testing.assert_allclose(fg, convolve(table, haar, g, f), rtol=0, atol=1e-12 * np.abs(fg).max())
    left = convolve(table, haar, fg, k)
    right = convolve(table, haar, f, convolve(table, haar, g, k))
    np.testing.assert_allclose(left, right, rtol=0, atol=1e-10 * max(1.0, np.abs(left).max()))
