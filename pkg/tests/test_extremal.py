import math

import numpy as np
import pytest

from nodal_atlas import boundary as bd
from nodal_atlas.extremal import (ExtremalFunction, ExtremalSpec, SingularPointError, admissible_phi0,
                                  comb_angles, comb_limit_coefficient, convergence_table, extremal_series,
                                  random_admissible, rational_extremal_eval, sharpness_member,
                                  verify_extremal_curvature)
from nodal_atlas.geometry import curvature_at_origin, curvature_bound
from nodal_atlas.series import vanishing_order

PI = np.pi


def test_admissible_angles():
    assert admissible_phi0(1) == [0]
    assert np.allclose(admissible_phi0(2), [PI / 12, 7 * PI / 12])
    assert np.allclose(admissible_phi0(3), [0, PI / 3, 2 * PI / 3])
    with pytest.raises(ValueError):
        ExtremalSpec(2, 2)


def test_series_n1_is_k_squared():
    s = extremal_series(ExtremalSpec(1), 40)
    assert np.allclose(s.coeffs, np.arange(41) ** 2, rtol=1e-15, atol=0)


def _binomial_oracle(n, phi, K):
    # independent expansion with numpy polynomial powers
    a = np.exp(-1j * phi)
    geo = a ** np.arange(K + 1)

    def inv_pow(p):
        out = np.zeros(K + 1, dtype=complex)
        out[0] = 1
        for _ in range(p):
            out = np.convolve(out, geo)[: K + 1]
        return out

    c = np.zeros(K + 1, dtype=complex)
    c[n:] += inv_pow(2 * n)[: K + 1 - n]
    c[n + 1 :] += 2 * np.exp(-1j * (n + 1) * phi) * np.cos(n * phi) * inv_pow(2 * n + 1)[: K - n]
    return c


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_series_matches_convolution_oracle(n):
    for k, phi in enumerate(admissible_phi0(n)):
        s = extremal_series(ExtremalSpec(n, k), 30)
        assert np.allclose(s.coeffs, _binomial_oracle(n, phi, 30), rtol=1e-12)
        assert s.coeffs[n] == 1
        assert s.taylor_derivative(n) == math.factorial(n)


def test_series_agrees_with_derivative_comb():
    a = extremal_series(ExtremalSpec(2, 0), 64).coeffs
    b = bd.poisson_extend(bd.solve_derivative_comb(2, PI / 12), 64).coeffs
    assert np.allclose(a, b, rtol=1e-10, atol=1e-10)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_closed_form_matches_series(n):
    f = ExtremalFunction(ExtremalSpec(n))
    s = extremal_series(ExtremalSpec(n), 400)
    for z in (0.2 + 0.1j, -0.4j, 0.5):
        for order in range(4):
            assert f.deriv(z, order) == pytest.approx(s.deriv(z, order), rel=1e-9)


def test_closed_form_singular_point():
    with pytest.raises(SingularPointError):
        ExtremalFunction(ExtremalSpec(1)).value(1.0)


@pytest.mark.parametrize("n,expected", [(1, 8), (2, 3 * np.sqrt(3)), (3, 16 / 3), (4, 5 * np.cos(PI / 10))])
def test_attainment(n, expected):
    for k in range(n):
        rep = verify_extremal_curvature(ExtremalSpec(n, k))
        assert abs(rep.kappas[rep.branch]) == pytest.approx(expected, abs=1e-8)
        # no other branch beats it
        assert rep.max_abs == pytest.approx(expected, abs=1e-8)


def test_rational_formula():
    assert rational_extremal_eval(0.5, 0) == pytest.approx(12)
    assert rational_extremal_eval(0, 0) == 0
    assert rational_extremal_eval(-1, 0) == 0
    with pytest.raises(SingularPointError):
        rational_extremal_eval(1, 0)


def _grid(r=0.8, m=50):
    x = np.linspace(-r, r, m)
    X, Y = np.meshgrid(x, x)
    keep = X**2 + Y**2 <= r * r
    return X[keep], Y[keep]


def test_corrected_rational_formula_is_twice_extremal():
    s = extremal_series(ExtremalSpec(1), 400)
    X, Y = _grid()
    a = rational_extremal_eval(X, Y, corrected=True)
    b = 2 * s.value(X + 1j * Y).real
    assert np.max(np.abs(a - b) / np.maximum(np.abs(b), 1)) <= 1e-9


def test_printed_rational_formula_only_agrees_on_real_axis():
    s = extremal_series(ExtremalSpec(1), 400)
    x = np.linspace(-0.8, 0.8, 41)
    assert np.allclose(rational_extremal_eval(x, 0 * x), 2 * s.value(x).real, rtol=1e-10)
    assert rational_extremal_eval(0, 0.5) == pytest.approx(0.768)
    assert 2 * s.value(0.5j).real == pytest.approx(-0.768)


def test_printed_rational_formula_is_not_harmonic():
    h = 1e-3
    x, y = 0.2, 0.3
    for corrected, expect_zero in ((True, True), (False, False)):
        f = lambda a, b: rational_extremal_eval(a, b, corrected)
        lap = (f(x + h, y) + f(x - h, y) + f(x, y + h) + f(x, y - h) - 4 * f(x, y)) / h**2
        assert (abs(lap) < 1e-3) == expect_zero


@pytest.mark.parametrize("n", [1, 2])
def test_sharpness_sign_changes(n):
    e0 = 1 / (4 * n)
    m = sharpness_member(n, bd.MollifierSpec(e0 / 8, e0, 1e-3))
    assert m.sign_changes == 2 * n
    assert vanishing_order(m.series) == n


def test_sharpness_convergence():
    rows = convergence_table(1, 0.25, (8, 16, 32), 1e-4)
    gaps = [g for *_, g in rows]
    assert all(g > 0 for g in gaps)
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[-1] / 8 < 0.05


def test_sharpness_limit_value():
    # as eps, lambda -> 0 the curvature tends to the comb's own value
    a = comb_angles(1, 0.25)
    lim = 2 * comb_limit_coefficient(a).real
    k = convergence_table(1, 0.25, (32,), 1e-6)[0][2]
    assert k == pytest.approx(lim, rel=1e-3)
    assert lim < 8


def test_sharpness_rejects_wide_spacing():
    with pytest.raises(ValueError):
        sharpness_member(2, bd.MollifierSpec(0.01, 0.3, 1e-3))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_random_admissible_is_admissible(n):
    rng = np.random.default_rng(11)
    for _ in range(5):
        s = random_admissible(n, rng).series
        assert vanishing_order(s) == n
        k = max(abs(curvature_at_origin(s, q)) for q in range(2 * n))
        assert k <= curvature_bound(n) + 1e-6


def test_random_admissible_is_deterministic():
    a = random_admissible(2, np.random.default_rng(3)).series
    b = random_admissible(2, np.random.default_rng(3)).series
    assert np.array_equal(a.coeffs, b.coeffs)
