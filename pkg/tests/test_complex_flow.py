import math

import numpy as np
import pytest
from scipy.linalg import expm

from leafmetric.flow import (FlowError, estimate_field_constants, flow, flow_domain_radius,
                             local_flow, write_trace_csv)
from leafmetric.parser import parse_field
from leafmetric.polynomial import evaluate, jacobian, linear_field


def test_zero_time_is_identity(example5):
    z = np.array([0.1, 0.2j])
    seg = flow(example5, z, 0)
    assert np.array_equal(seg.end, z) and seg.steps_taken == 0
    assert np.allclose(seg.first_derivative, evaluate(example5, z))


def test_linear_oracle_complex_times(rng):
    A = np.array([[1j, 2], [0, -0.5]])
    z = np.array([0.3, -1j])
    for t in (0.5, 1j, -0.7 + 0.2j):
        assert np.allclose(flow(linear_field(A), z, t).end, expm(t * A) @ z, atol=1e-12)


def test_riccati_closed_form():
    # z' = z^2 has phi_z(t) = z / (1 - t z)
    X = parse_field("z^2 d/dz", ["z"])
    z, t = 0.4 + 0.3j, 0.8 - 0.5j
    assert abs(flow(X, [z], t).end[0] - z / (1 - t * z)) <= 1e-12


def test_blow_up_in_finite_time():
    X = parse_field("z^2 d/dz", ["z"])
    with pytest.raises(FlowError):
        flow(X, [1.0], 1.5, bound=1e6)


def test_derivative_stack(example5):
    z = np.array([0.2 + 0.1j, -0.1j])
    seg = flow(example5, z, 0.3j)
    v = evaluate(example5, seg.end)
    assert np.allclose(seg.first_derivative, v, atol=1e-14)
    assert np.allclose(seg.second_derivative, jacobian(example5, seg.end) @ v, atol=1e-14)
    h = 1e-4
    fd = (flow(example5, z, 0.3j + h).second_derivative - flow(example5, z, 0.3j - h).second_derivative) / (2 * h)
    assert np.allclose(seg.third_derivative, fd, atol=1e-7)


def test_local_flow_agrees_with_adaptive(example5):
    z = np.array([0.3, 0.1 + 0.1j])
    assert np.allclose(local_flow(example5, z, 0.2 - 0.1j, 40), flow(example5, z, 0.2 - 0.1j).end, atol=1e-12)


def test_field_constants_radial(radial):
    c = estimate_field_constants(radial, 1.0, seed=0)
    assert c.C0 == pytest.approx(1.05)
    assert c.r0 == pytest.approx(math.log(1.5) / c.C0)


def test_second_singularity_rejected(example5):
    with pytest.raises(ValueError, match="second singularity"):
        estimate_field_constants(example5, 1.6, seed=0)


def test_gronwall_and_c1_bounds(example5, rng):
    c = estimate_field_constants(example5, 0.5, seed=4)
    for _ in range(200):
        z = 0.4 * (rng.normal(size=2) + 1j * rng.normal(size=2)) / 2
        if np.linalg.norm(z) >= 0.45:
            continue
        t = complex(*rng.uniform(-0.2, 0.2, 2))
        seg = flow(example5, z, t)
        assert np.linalg.norm(seg.end) <= np.linalg.norm(z) * math.exp(c.C0 * abs(t)) * (1 + 1e-12)
        if c.inside(seg.end):
            vx = np.linalg.norm(evaluate(example5, seg.end))
            assert np.linalg.norm(seg.second_derivative) <= c.C1 * vx * (1 + 1e-9)


def test_flow_domain_radius_radial(radial):
    c = estimate_field_constants(radial, 1.0, seed=0)
    for r in (0.5, 0.1, 0.01):
        z = np.array([r, 0.0]) * np.exp(0.4j)
        assert flow_domain_radius(radial, z, c) == pytest.approx(math.log(1 / r), rel=1e-8)


def test_trace_csv(tmp_path, example5):
    seg = flow(example5, [0.1, 0.1], 0.5, record_trace=True)
    path = tmp_path / "trace.csv"
    write_trace_csv(seg, path, header_comment="run 1")
    lines = path.read_text().splitlines()
    assert lines[0] == "# run 1"
    assert len(lines) == seg.steps_taken + 3
