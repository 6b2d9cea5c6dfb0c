import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nodal_atlas.extremal import ExtremalFunction, ExtremalSpec, extremal_series
from nodal_atlas.geometry import (CriticalPointError, InvalidBranchError, NodalCurve, StepCollapseError,
                                  TraceConfig, curvature_at_origin, curvature_bound, curvature_regular,
                                  curvature_report, parity_constant, polyline_curvature, tangent_angles,
                                  trace_nodal_set, uniform_curvature_scan)
from nodal_atlas.series import PowerSeries

PI = np.pi


def critical_series(n, seed, K=12):
    rng = np.random.default_rng(seed)
    c = np.zeros(K + 1, dtype=complex)
    c[n:] = rng.normal(size=K + 1 - n) + 1j * rng.normal(size=K + 1 - n)
    c[n:] /= 1.5 ** np.arange(K + 1 - n)
    return PowerSeries(c)


def test_tangent_angles_examples():
    assert np.allclose(np.sort(tangent_angles(PowerSeries([0, 1]))), [PI / 2, 3 * PI / 2])
    assert np.allclose(np.sort(tangent_angles(PowerSeries([0, 0, 1]))), [PI / 4, 3 * PI / 4, 5 * PI / 4, 7 * PI / 4])
    assert np.allclose(np.sort(tangent_angles(PowerSeries([0, 1j]))), [0, PI])


def test_tangent_directions_are_zeros_of_leading_term():
    s = critical_series(3, 1)
    for eta in tangent_angles(s):
        assert abs((s.coeffs[3] * np.exp(3j * eta)).real) < 1e-12 * abs(s.coeffs[3])


def test_regular_curvature_examples():
    assert curvature_regular(PowerSeries([0, 1]), 0.1j) == 0
    assert curvature_regular(PowerSeries.polynomial([-1, 0, 1]), 1.0) == pytest.approx(1)
    assert curvature_regular(PowerSeries.polynomial([-4, 0, 4]), 1.0) == pytest.approx(1)
    with pytest.raises(CriticalPointError):
        curvature_regular(PowerSeries([0, 0, 1]), 0)


def test_regular_curvature_hyperbola_against_implicit_formula():
    # x^2 - y^2 = 1: kappa = |F_xx F_y^2 - 2 F_xy F_x F_y + F_yy F_x^2| / |grad F|^3
    s = PowerSeries.polynomial([-1, 0, 1])
    for t in (0.0, 0.3, -0.8):
        x, y = np.cosh(t), np.sinh(t)
        Fx, Fy = 2 * x, -2 * y
        k = abs(2 * Fy**2 - 2 * Fx**2) / np.hypot(Fx, Fy) ** 3
        assert abs(curvature_regular(s, complex(x, y))) == pytest.approx(k, rel=1e-12)


def test_origin_curvature_examples():
    for n in (1, 2, 3):
        for q in range(2 * n):
            assert curvature_at_origin(PowerSeries([0] * n + [1, 0]), q) == 0
    assert curvature_at_origin(PowerSeries([0, 1, 1]), 0) == pytest.approx(2)
    assert curvature_at_origin(extremal_series(ExtremalSpec(1)), 0) == pytest.approx(8)
    with pytest.raises(InvalidBranchError):
        curvature_at_origin(PowerSeries([0, 1, 1]), 2)


def test_origin_curvature_matches_traced_curve():
    # z + z^2 has nodal curve x + x^2 - y^2 = 0 through 0
    s = PowerSeries([0, 1, 1])
    curve = trace_nodal_set(s)[0]
    i0 = int(np.argmin(np.abs(curve.vertices)))
    fd = polyline_curvature(curve.vertices[i0 - 8 : i0 + 9])
    # outward along branch 0 is +y; fd there approximates kappa_0
    assert np.allclose(fd, 2.0, atol=1e-3)


def test_bound_values():
    assert curvature_bound(1, 1) == 8
    assert curvature_bound(2, 1) == pytest.approx(3 * np.sqrt(3), abs=1e-12)
    assert curvature_bound(1, 2) == 4
    assert curvature_bound(3) == pytest.approx(16 / 3)
    assert curvature_bound(4) == pytest.approx(5 * np.cos(PI / 10))
    assert parity_constant(3) == 0 and parity_constant(2) == PI / 12
    with pytest.raises(ValueError):
        curvature_bound(0, 1)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 4), st.integers(0, 10**6))
def test_branch_antisymmetry(n, seed):
    s = critical_series(n, seed)
    for q in range(n):
        assert curvature_at_origin(s, q + n) == pytest.approx(-curvature_at_origin(s, q), abs=1e-10)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 4), st.integers(0, 10**6), st.floats(-10, 10).filter(lambda c: abs(c) > 1e-3))
def test_scaling_invariance(n, seed, c):
    s = critical_series(n, seed)
    t = c * s
    # a negative multiple turns arg w^(n) by +-pi, which relabels branches by one step
    d = 0 if c > 0 else round((np.angle(t.coeffs[n]) - np.angle(s.coeffs[n])) / np.pi)
    for q in range(2 * n):
        ref = curvature_at_origin(s, (q - d) % (2 * n))
        assert curvature_at_origin(t, q) == pytest.approx(ref, rel=1e-10, abs=1e-12)
    z = 0.3 + 0.1j
    assert abs(curvature_regular(t, z)) == pytest.approx(abs(curvature_regular(s, z)), rel=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 3), st.integers(0, 10**6), st.floats(0, 2 * PI))
def test_rotation_covariance(n, seed, alpha):
    s = critical_series(n, seed)
    r = s.rotated(alpha)
    # branch magnitudes are permuted, not changed
    a = np.sort(np.abs([curvature_at_origin(s, q) for q in range(2 * n)]))
    b = np.sort(np.abs([curvature_at_origin(r, q) for q in range(2 * n)]))
    assert np.allclose(a, b, atol=1e-8)
    z = 0.2 - 0.25j
    assert abs(curvature_regular(r, z * np.exp(-1j * alpha))) == pytest.approx(abs(curvature_regular(s, z)), rel=1e-8)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_dilation_scales_curvature(n):
    s = critical_series(n, 5)
    r = 0.6
    d = s.dilated(r)
    for q in range(2 * n):
        assert curvature_at_origin(d, q) == pytest.approx(r * curvature_at_origin(s, q), rel=1e-10)


def test_report_gap():
    rep = curvature_report(extremal_series(ExtremalSpec(2)))
    assert rep.n == 2
    assert rep.gap == pytest.approx(0, abs=1e-10)
    assert rep.to_dict()["alpha0"] == PI / 12


# -- tracing -------------------------------------------------------------------


def test_trace_square_gives_two_lines():
    curves = trace_nodal_set(PowerSeries([0, 0, 1]))
    assert len(curves) == 2
    for c in curves:
        assert c.passes_through(0)
        assert np.max(np.abs(c.curvatures)) <= 1e-6
        assert all(abs(abs(e) - 0.98) < 1e-12 for e in c.ends)


def test_trace_hyperbola_vertex():
    curves = trace_nodal_set(PowerSeries.polynomial([-1, 0, 1]), TraceConfig(stop_radius=1.5))
    assert len(curves) == 2
    right = [c for c in curves if np.max(c.vertices.real) > 0][0]
    i = int(np.argmin(np.abs(right.vertices - 1)))
    assert abs(right.vertices[i] - 1) < 1e-3
    assert abs(right.curvatures[i]) == pytest.approx(1, abs=1e-3)


def test_trace_vertices_lie_on_nodal_set():
    s = critical_series(2, 3)
    for c in trace_nodal_set(s):
        u = s.value(c.vertices).real
        g = np.abs(s.deriv(c.vertices, 1))
        assert np.all(np.abs(u) <= 1e-10 * np.maximum(g, 1e-3))
        steps = np.abs(np.diff(c.vertices))
        assert np.max(steps) <= 1.5e-3


def test_trace_extremal_n1_single_curve_through_origin():
    curves = trace_nodal_set(ExtremalFunction(ExtremalSpec(1)))
    assert len(curves) == 1
    c = curves[0]
    assert c.passes_through(0)
    assert all(abs(e - 1) < 0.05 for e in c.ends)
    assert np.max(np.abs(c.curvatures)) == pytest.approx(8, abs=1e-9)


def test_trace_ends_approach_singularity_as_stop_radius_grows():
    f = ExtremalFunction(ExtremalSpec(1))
    d = []
    for R in (0.9, 0.95, 0.98, 0.99):
        c = trace_nodal_set(f, TraceConfig(stop_radius=R))[0]
        d.append(max(abs(e - 1) for e in c.ends))
    assert all(b < a for a, b in zip(d, d[1:]))
    # ends leave the singular point along straight rays, so distance ~ (1 - R)
    assert d[-1] / (1 - 0.99) == pytest.approx(d[-2] / (1 - 0.98), rel=0.05)


def test_trace_step_collapse():
    with pytest.raises(StepCollapseError):
        trace_nodal_set(PowerSeries.polynomial([-1, 0, 1]), TraceConfig(stop_radius=1.5, min_step=0.5))


def test_uniform_scan_examples():
    k, _ = uniform_curvature_scan(PowerSeries([0, 1]), 0.5)
    assert k == 0
    s = PowerSeries([-0.01, 0, 1])
    k, z = uniform_curvature_scan(s, 0.3)
    assert k == pytest.approx(abs(curvature_regular(s, z)), abs=1e-6)
    # hyperbola x^2 - y^2 = 0.01 has vertex curvature 10
    assert k == pytest.approx(10, rel=1e-4)


def test_curve_csv():
    c = NodalCurve([0, 0.001, 0.002], [0, 0, 0], branch_q=0)
    lines = c.to_csv().splitlines()
    assert lines[0] == "x,y,arclength,curvature"
    assert len(lines) == 4
    assert c.arc_lengths[-1] == pytest.approx(0.002)


def test_polyline_curvature_on_circle():
    t = np.linspace(0, 1, 50)
    ccw = 0.5 * np.exp(1j * t)
    assert np.allclose(polyline_curvature(ccw), -2)
    assert np.allclose(polyline_curvature(ccw[::-1]), 2)
