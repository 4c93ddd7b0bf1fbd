import numpy as np
import pytest

from leafmetric.eta import radial_oracle
from leafmetric.flow import flow
from leafmetric.polynomial import evaluate
from leafmetric.projection import (ProjectionError, arc_length, chain_projections, g_value,
                                   orthogonality_residual, phi, project_time, transverse_partner,
                                   write_chain_csv)


def unit(rng):
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    return v / np.linalg.norm(v)


def test_same_point_returns_seed(example5):
    x = np.array([0.1, 0.05j])
    pr = project_time(example5, x, x, 0.02 + 0.01j)
    assert pr.u == pr.t and pr.newton_iters == 1 and pr.g_residual == 0.0


def test_solution_solves_g(example5, rng):
    x = 0.2 * unit(rng)
    y = transverse_partner(example5, x, 0.005)
    pr = project_time(example5, x, y, 0.03j)
    assert abs(g_value(example5, x, y, pr.t, pr.u)) <= 1e-12 * np.linalg.norm(evaluate(example5, x))
    assert orthogonality_residual(example5, pr.x_t, pr.y_u) <= 1e-12


def test_uniqueness_from_spread_seeds(example5, rng):
    x = np.array([0.15, 0.1 + 0.05j])
    y = transverse_partner(example5, x, 0.002, phase=1.0)
    t = 0.01 - 0.02j
    ref = project_time(example5, x, y, t).u
    r1 = 0.09
    for k in range(16):
        u0 = t + 0.3 * r1 * np.exp(2j * np.pi * k / 16)
        assert abs(project_time(example5, x, y, t, u0=u0).u - ref) <= 1e-10


def test_time_bound_enforced(example5):
    x = np.array([0.1, 0.1])
    with pytest.raises(ProjectionError, match="time bound"):
        project_time(example5, x, x, 0.5, time_bound=0.1)


def test_radial_phi_is_line_projection(radial, rng):
    x = 0.3 * unit(rng)
    y = x + 0.01 * unit(rng)
    xp = np.exp(0.05 - 0.02j) * x
    want = np.vdot(y, xp) / np.vdot(y, y) * y
    assert np.allclose(phi(radial, x, y, xp), want, atol=1e-12)


def test_rejects_point_off_the_plaque(radial):
    x = np.array([0.3, 0.1])
    with pytest.raises(ProjectionError):
        phi(radial, x, x, np.array([0.1, 0.3]))


def test_radial_chain(radial):
    x = np.array([0.3, 0.2j])
    y = transverse_partner(radial, x, 1e-3 * np.linalg.norm(x))
    eta = lambda p: radial_oracle(1.0)(p).eta_lo
    chain = chain_projections(radial, x, y, 0.1, 3.0, [np.zeros(2)], eta, direction=-1)
    assert chain.break_index is None and chain.N >= 20
    ratios = np.array(chain.step_ratios)
    assert ratios.max() <= 3 * ratios.min()
    for j in (0, chain.N // 2, chain.N - 1):
        length = arc_length(radial, chain.x[j], chain.times[j + 1] - chain.times[j])
        assert length == pytest.approx(chain.step_lengths[j], rel=1e-6)


def test_chain_distortion_bounded(example5):
    # consecutive projected points are at most twice as far apart as the x steps
    x = np.array([0.12, 0.08 - 0.03j])
    y = transverse_partner(example5, x, 1e-3 * np.linalg.norm(x))
    eta = lambda p: float(np.linalg.norm(p))
    chain = chain_projections(example5, x, y, 0.1, 2.0, [np.zeros(2)], eta)
    dx = np.linalg.norm(np.diff(np.array(chain.x), axis=0), axis=1)
    dy = np.linalg.norm(np.diff(np.array(chain.y), axis=0), axis=1)
    assert np.max(dy / dx) <= 2


def test_chain_start_precondition(radial):
    x = np.array([0.3, 0.0])
    with pytest.raises(ProjectionError):
        chain_projections(radial, x, x + np.array([0, 0.1]), 0.1, 1.0, [np.zeros(2)], lambda p: 1.0)


def test_identical_pair_chain_has_zero_ratios(radial):
    x = np.array([0.3, 0.0])
    chain = chain_projections(radial, x, x, 0.1, 1.0, [np.zeros(2)], lambda p: radial_oracle(1.0)(p).eta_lo)
    assert max(chain.step_ratios) == 0.0


def test_chain_csv(tmp_path, radial):
    x = np.array([0.3, 0.1])
    chain = chain_projections(radial, x, x, 0.2, 0.5, [np.zeros(2)], lambda p: radial_oracle(1.0)(p).eta_lo)
    path = tmp_path / "chain.csv"
    write_chain_csv(chain, path)
    lines = path.read_text().splitlines()
    assert lines[0].startswith("j,xi,x,y")
    assert len(lines) == chain.N + 2


def test_arc_length_of_radial_ray(radial):
    x = np.array([0.2, 0.0])
    assert arc_length(radial, x, 1.0) == pytest.approx(0.2 * (np.e - 1), rel=1e-12)
    assert np.allclose(flow(radial, x, 1.0).end, x * np.e)
