import numpy as np
import pytest

from leafmetric.fixtures import get_fixture
from leafmetric.parser import parse_field
from leafmetric.polynomial import evaluate, linear_field
from leafmetric.projective import chart_field, infinity_singularities
from leafmetric.singular import (NonIsolatedZeroError, bezout_bound, classify, distance_to_E,
                                 find_resonance, find_singularities)


def test_example5_zero_set(example5, example5_zeros):
    assert len(example5_zeros) == 7 == bezout_bound(example5) - 2
    for s in example5_zeros:
        assert np.linalg.norm(evaluate(example5, s.coords)) <= 1e-12
        assert s.non_degenerate


def test_example5_eigenvalues(example5_zeros):
    by_point = {tuple(np.round(s.coords, 8)): s for s in example5_zeros}
    assert by_point[(0, 0)].eigenvalues == (2, 1)
    # at (sqrt 2, 0): DX = diag(2 - 3z^2, 1 - z^2) = diag(-4, -1)
    s2 = by_point[(round(2 ** 0.5, 8), 0)]
    assert np.allclose(sorted(np.real(s2.eigenvalues)), [-4, -1])


def test_random_linear_fields_have_only_origin(rng):
    for _ in range(50):
        A = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        zs = find_singularities(linear_field(A), 1.0, per_axis=5)
        assert len(zs) == 1
        assert np.linalg.norm(zs[0].coords) <= 1e-14
        assert zs[0].non_degenerate


def test_classify_is_idempotent(example5, example5_zeros):
    for s in example5_zeros:
        again = classify(example5, s.coords)
        assert again == classify(example5, again.coords)
        assert again.eigenvalues == s.eigenvalues


@pytest.mark.parametrize("eigs, witness", [
    ((2, 1), (0, (0, 2))),
    ((1, -1), (0, (2, 1))),
    ((3, 1), (0, (0, 3))),
])
def test_resonance_witnesses(eigs, witness):
    i, m = find_resonance(eigs)
    assert sum(m) >= 2
    assert eigs[i] == sum(mj * lj for mj, lj in zip(m, eigs))
    assert (i, m) == witness


def test_non_resonant_pair():
    assert find_resonance((1, np.sqrt(2))) is None


def test_degenerate_fixture_flagged():
    zs = find_singularities(get_fixture("degenerate"), 1.0, per_axis=9)
    assert len(zs) == 1 and not zs[0].non_degenerate


def test_zero_curve_raises():
    with pytest.raises(NonIsolatedZeroError):
        find_singularities(parse_field("(z*w) d/dz + (z*w^2) d/dw"), 1.0, per_axis=9)


def test_distance_to_E():
    E = [np.zeros(2), np.array([1.0, 0])]
    assert distance_to_E([0.9, 0], E) == pytest.approx(0.1)
    assert distance_to_E([0, 2j], E) == pytest.approx(2.0)


def test_chart_fields_by_hand(example5):
    # z = 1/u, w = v/u; after clearing u^2 the first chart field is
    # U = -u (2u^2 + v^2 u - 1) ... checked pointwise against the pushforward.
    f1 = chart_field(example5, "affine1")
    for u, v in [(0.3 + 0.2j, -0.4 + 0.1j), (-0.7j, 0.25)]:
        z, w = 1 / u, v / u
        Fz, Fw = evaluate(example5, [z, w])
        du = -u * u * Fz
        dv = u * Fw - u * v * Fz
        got = evaluate(f1, [u, v])
        ratio = got / np.array([du, dv])
        assert np.allclose(ratio, ratio[0])


def test_no_singularities_at_infinity(example5):
    rep = infinity_singularities(example5)
    assert rep.points == () and not rep.line_singular


def test_radial_field_has_invariant_line_at_infinity():
    rep = infinity_singularities(get_fixture("radial"))
    assert rep.top_part_radial
