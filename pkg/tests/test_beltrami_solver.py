import numpy as np
import pytest

from leafmetric.beltrami import (BeltramiError, BeltramiField, gaussian_mu, grid_points,
                                 mu_of_map, solve_beltrami)


def test_zero_coefficient_gives_identity():
    q = solve_beltrami(BeltramiField(np.zeros((32, 32), complex), 1.0))
    assert np.array_equal(q.values, grid_points(32, 1.0))
    assert q.iterations == 0


def test_ellipticity_bound():
    with pytest.raises(BeltramiError, match="ellipticity"):
        solve_beltrami(gaussian_mu(0.6, N=64))


def test_support_must_fit_the_square():
    with pytest.raises(ValueError):
        BeltramiField(np.zeros((16, 16), complex), 1.0, support_radius=0.95)


def test_power_of_two_grid():
    with pytest.raises(ValueError):
        BeltramiField(np.zeros((24, 24), complex), 1.0)


def test_normalization_and_injectivity():
    q = solve_beltrami(gaussian_mu(0.1))
    N = q.grid_size
    assert q.values[N // 2, N // 2] == 0
    assert q.min_separation() > 0.5 * q.h


def test_recovered_coefficient_matches_input():
    mu = gaussian_mu(0.05 + 0.05j, N=256)
    q = solve_beltrami(mu)
    back = mu_of_map(q).samples
    inner = slice(64, 192)
    assert np.nanmax(np.abs(back[inner, inner] - mu.samples[inner, inner])) <= 2e-3


def test_affine_answer_for_constant_disc_coefficient():
    # inside a disc where mu = c, dbar q - c dq vanishes; the map is close to z + c conj z there
    c = 0.1
    mu = BeltramiField.from_function(lambda Z: c + 0 * Z, N=256, L=2.0, support_radius=1.8)
    q = solve_beltrami(mu)
    Z = grid_points(256, 2.0)
    near = np.abs(Z) < 0.5
    dq = np.gradient(q.values, q.h, axis=0)
    dq_dy = np.gradient(q.values, q.h, axis=1)
    dbar = 0.5 * (dq + 1j * dq_dy)
    d = 0.5 * (dq - 1j * dq_dy)
    assert np.max(np.abs(dbar[near] / d[near] - c)) <= 1e-3


def test_translation_covariance():
    L, N = 3.2, 512
    shift = 8
    a = solve_beltrami(gaussian_mu(0.1, N=N, L=L, support_radius=2.8))
    center = shift * 2 * L / N
    b = solve_beltrami(gaussian_mu(0.1, N=N, L=L, support_radius=2.8, center=center))
    # b(z + center) - b(center) equals a(z) on the overlapping grid
    k = N // 2
    da = a.values[k - 64:k + 64, k - 64:k + 64]
    db = b.values[k - 64 + shift:k + 64 + shift, k - 64:k + 64] - b.values[k + shift, k]
    assert np.max(np.abs(da - db)) <= 1e-10


def test_grid_map_files(tmp_path):
    q = solve_beltrami(gaussian_mu(0.05, N=32, L=2.0))
    q.write(tmp_path / "g.csv", tmp_path / "g.json")
    lines = (tmp_path / "g.csv").read_text().splitlines()
    assert lines[0] == "index,re_q,im_q" and len(lines) == 32 * 32 + 1
    assert '"normalization": "principal"' in (tmp_path / "g.json").read_text()
