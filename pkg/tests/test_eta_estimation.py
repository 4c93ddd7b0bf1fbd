import math

import numpy as np
import pytest

from leafmetric.covers import LeafCover, cover_eta, project_to_leaf
from leafmetric.disc import log_star
from leafmetric.eta import (EtaEstimate, eta_lower, eta_oracle_punctured_disc, fit_holder,
                            holder_modulus, holder_scan, leaf_path_poincare_length, radial_oracle,
                            write_holder_csv)
from leafmetric.flow import estimate_field_constants
from leafmetric.polynomial import CPoint


def test_oracle_maximized_at_rho_over_e():
    lam = np.linspace(0.01, 0.99, 981)
    vals = [eta_oracle_punctured_disc(l, 1.0).eta_lo for l in lam]
    assert lam[int(np.argmax(vals))] == pytest.approx(1 / math.e, abs=1e-3)


def test_oracle_domain():
    with pytest.raises(ValueError):
        eta_oracle_punctured_disc(1.0, 1.0)


def test_estimate_validation():
    with pytest.raises(ValueError):
        EtaEstimate(CPoint((1j,)), 2.0, 1.0, "flow-disc")


def test_brody_cap(radial):
    c = estimate_field_constants(radial, 1.0, seed=0)
    z = np.array([0.3, 0.1j])
    capped = eta_lower(radial, z, c, brody_A=0.01)
    assert capped.eta_lo == capped.eta_hi == 0.01 and capped.method == "brody-cap"
    assert eta_lower(radial, z, c, brody_A=10.0).eta_hi == 10.0


def test_eta_lower_undefined_at_singularity(radial):
    c = estimate_field_constants(radial, 1.0, seed=0)
    with pytest.raises(ValueError):
        eta_lower(radial, np.zeros(2), c)


def test_radial_cover_matches_oracle():
    z = np.array([0.2, 0.3j])
    assert cover_eta(z, 1, 1.0) == pytest.approx(radial_oracle(1.0)(z).eta_lo, rel=1e-13)


def test_cover_maps_zero_to_base_and_inverts():
    base = np.array([0.1 + 0.05j, 0.4 - 0.2j])
    u = LeafCover.through(base, 2, 1.0)
    assert np.allclose(u(0.0), base, atol=1e-15)
    zeta = np.array([0.1, -0.3j, 0.5 + 0.2j])
    assert np.allclose(u.inverse_sigma(u.sigma(zeta)), zeta, atol=1e-12)
    pts = u(zeta)
    assert np.all(np.linalg.norm(pts, axis=-1) < 1.0)


def test_cover_eta_is_derivative_norm():
    base = np.array([0.1 + 0.05j, 0.4 - 0.2j])
    u = LeafCover.through(base, 2, 1.0)
    h = 1e-6
    d = (u(h) - u(-h)) / (2 * h)
    assert np.linalg.norm(d) == pytest.approx(u.eta(), rel=1e-8)


def test_project_to_leaf_is_orthogonal():
    base = np.array([0.2, 0.5])
    u = LeafCover.through(base, 2, 1.0)
    pt = base + np.array([1e-3, -2e-3j])
    s = project_to_leaf(u, pt, base[1])
    foot = u.point(s)
    tangent = np.array([2 * u.c * s, 1.0])
    assert abs(np.vdot(tangent, pt - foot)) <= 1e-15


def test_log_ratio_bound_on_radial_leaf(rng):
    # Poincare distance on the punctured disc between radii a < b stays below
    # 0.5 + the leafwise path length along the ray
    oracle = radial_oracle(1.0)
    for _ in range(20):
        a, b = np.sort(rng.uniform(1e-3, 0.9, 2))
        path = [np.array([s, 0]) for s in np.geomspace(a, b, 2000)]
        L_lo, L_hi = leaf_path_poincare_length(path, [oracle(p) for p in path])
        lhs = abs(math.log(math.log(1 / a) / math.log(1 / b)))
        assert lhs <= 0.5 + L_lo


def test_path_length_needs_matching_estimates():
    with pytest.raises(ValueError):
        leaf_path_poincare_length([np.zeros(2), np.ones(2)], [None])


def test_holder_modulus_is_symmetric():
    assert holder_modulus(0.1, 0.2, 1e-4) == holder_modulus(0.2, 0.1, 1e-4)
    assert holder_modulus(0.1, 0.1, 1e-4) == pytest.approx(log_star(0.1) / log_star(1e-4))


def test_fit_holder_prefers_largest_alpha():
    M = np.array([0.1, 0.2, 0.4])
    C, alpha = fit_holder(2 * M, M)
    assert alpha == 1.0 and C == pytest.approx(2.0)
    C, alpha = fit_holder(2 * M ** 0.5, M, C_max=2.0001)
    assert alpha == pytest.approx(0.5, abs=1e-3)


def test_holder_scan_swap_invariant(rng):
    eta = radial_oracle(1.0)
    pairs = []
    for _ in range(50):
        x = 0.3 * (rng.normal(size=2) + 1j * rng.normal(size=2)) / 2
        pairs.append((x, x + 1e-3 * np.linalg.norm(x) * (rng.normal(size=2) + 0j)))
    a = holder_scan(pairs, [np.zeros(2)], eta)
    b = holder_scan([(y, x) for x, y in pairs], [np.zeros(2)], eta)
    assert (a.C, a.alpha) == (b.C, b.alpha)
    assert [s.delta_eta for s in a.samples] == [s.delta_eta for s in b.samples]


def test_holder_scan_skips_far_pairs(tmp_path):
    eta = radial_oracle(1.0)
    scan = holder_scan([(np.array([0.1, 0]), np.array([0.3, 0]))], [np.zeros(2)], eta)
    assert scan.samples == [] and scan.skipped[0][1] == "pair outside the mutual-chart regime"
    write_holder_csv(scan, tmp_path / "h.csv")
    assert (tmp_path / "h.csv").read_text().startswith("x,y,d_xy")
