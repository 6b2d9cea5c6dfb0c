"""Extremal functions and the approximating sequence that shows sharpness.

The extremal holomorphic function of order ``n`` at base angle ``phi0`` is::

    w(z) = z^n / (1 - a z)^{2n} + 2 z^{n+1} e^{-i(n+1) phi0} cos(n phi0) / (1 - a z)^{2n+1}

with ``a = e^{-i phi0}``. Its Taylor coefficients come straight from the
binomial series of ``(1 - a z)^{-p}``. Because those grow like ``k^{2n}``,
a truncated series is useless close to the singular point ``e^{i phi0}``,
so :class:`ExtremalFunction` also evaluates the closed form directly.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from . import boundary as bd
from .geometry import CurvatureReport, curvature_at_origin, curvature_bound, parity_constant, tangent_angles
from .series import OutsideSafeDiskError, PowerSeries


class SingularPointError(ValueError):
    pass


def admissible_phi0(n: int) -> list[float]:
    if n < 1:
        raise ValueError("n must be >= 1")
    l = 0 if n % 2 else 1
    return [k * math.pi / n + l * math.pi / (2 * n * (n + 1)) for k in range(n)]


@dataclass(frozen=True)
class ExtremalSpec:
    n: int
    k_index: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not 0 <= self.k_index < self.n:
            raise ValueError(f"k_index must lie in 0..{self.n - 1}")

    @property
    def l(self) -> int:
        return 0 if self.n % 2 else 1

    @property
    def phi0(self) -> float:
        return admissible_phi0(self.n)[self.k_index]

    @property
    def alpha0(self) -> float:
        return parity_constant(self.n)

    @property
    def branch(self) -> int:
        """Branch index that attains the bound."""
        n, k = self.n, self.k_index
        q = n + k - (n + 1) // 2 if n % 2 else n + k - n // 2
        return q % (2 * n)

    @classmethod
    def from_dict(cls, d: dict) -> "ExtremalSpec":
        return cls(int(d["n"]), int(d.get("phi0_index", 0)))

    def to_dict(self):
        return {"n": self.n, "phi0_index": self.k_index}


def _terms(n: int, phi0: float):
    """``w`` as a list of ``(coef, m, p)`` meaning ``coef * z^m * (1 - a z)^{-p}``."""
    second = 2 * np.exp(-1j * (n + 1) * phi0) * math.cos(n * phi0)
    return [(1.0 + 0j, n, 2 * n), (second, n + 1, 2 * n + 1)]


def extremal_series(spec: ExtremalSpec, K: int = 64) -> PowerSeries:
    n = spec.n
    if K < n + 1:
        raise ValueError("need K >= n + 1")
    a = np.exp(-1j * spec.phi0)
    c = np.zeros(K + 1, dtype=complex)
    for coef, m0, p in _terms(n, spec.phi0):
        for m in range(K - m0 + 1):
            c[m0 + m] += coef * math.comb(m + p - 1, m) * a**m
    return PowerSeries(c)


class ExtremalFunction:
    """Closed-form evaluation of the extremal ``w`` and its derivatives.

    Satisfies the holomorphic protocol used by the tracer. Valid on the
    closed disk except at the singular point ``e^{i phi0}``.
    """

    safe_radius = 1.0

    def __init__(self, spec: ExtremalSpec):
        self.spec = spec
        self.a = np.exp(-1j * spec.phi0)
        self._derivs = {0: _terms(spec.n, spec.phi0)}
        # exact low-order coefficients, enough for vanishing order and curvature at 0
        self.series = extremal_series(spec, 2 * spec.n + 4)

    def _terms_of(self, order):
        if order not in self._derivs:
            prev = self._terms_of(order - 1)
            acc = defaultdict(complex)
            for coef, m, p in prev:
                if m:
                    acc[(m - 1, p)] += coef * m
                acc[(m, p + 1)] += coef * p * self.a
            self._derivs[order] = [(c, m, p) for (m, p), c in sorted(acc.items()) if c != 0]
        return self._derivs[order]

    def _check(self, z):
        z = np.asarray(z, dtype=complex)
        if np.any(np.abs(z) > 1 + 1e-12):
            raise OutsideSafeDiskError("closed form is only used on the closed disk")
        if np.any(np.abs(1 - self.a * z) < 1e-14):
            raise SingularPointError("evaluation at the boundary singularity")
        return z

    def deriv(self, z, order: int = 1):
        z = self._check(z)
        A = 1 - self.a * z
        out = np.zeros_like(z)
        for coef, m, p in self._terms_of(order):
            out = out + coef * z**m * A ** (-p)
        return out[()] if out.ndim == 0 else out

    def value(self, z):
        return self.deriv(z, 0)

    __call__ = value

    def taylor_derivative(self, k: int) -> complex:
        return self.series.taylor_derivative(k)


def verify_extremal_curvature(spec: ExtremalSpec, K: int | None = None) -> CurvatureReport:
    """Curvature at 0 of every branch; ``report.branch`` is the attaining one."""
    if K is None:
        K = 256 if spec.n >= 4 else 64
    s = extremal_series(spec, K)
    n = spec.n
    kappas = np.array([curvature_at_origin(s, q) for q in range(2 * n)])
    return CurvatureReport(n, tangent_angles(s), kappas, curvature_bound(n, 1.0), spec.alpha0, branch=spec.branch)


def rational_extremal_eval(x, y, corrected: bool = False):
    """Published closed-form harmonic function for the ``n = 1`` comb at angle 0.

    As printed, the ``y^2`` term in the numerator carries ``+4``; that
    expression is not harmonic and only matches ``2 Re w`` on the real axis.
    ``corrected=True`` uses ``-4``, which equals ``2 Re(z(1+z)/(1-z)^3)``.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    den = (x * x - 2 * x + y * y + 1) ** 3
    if np.any(den == 0):
        raise SingularPointError("rational formula is singular at (1, 0)")
    s = -4 if corrected else 4
    num = 2 * (1 - x * x - y * y) * (x * (1 - 2 * x + x * x + y * y) + s * y * y)
    out = num / den
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# sharpness sequence


def comb_angles(n: int, eps0: float, alpha0: float = 0.0) -> np.ndarray:
    j = np.arange(1, 2 * n + 2)
    return alpha0 + (j - n - 1) * eps0


def step_breakpoints(angles) -> np.ndarray:
    a = np.asarray(angles)
    return 0.5 * (a[:-1] + a[1:])


@dataclass
class SharpnessMember:
    series: PowerSeries
    boundary: bd.SampledBoundary
    comb: bd.DiracComb
    step: bd.StepBoundary
    spec: bd.MollifierSpec

    @property
    def sign_changes(self) -> int:
        return bd.count_sign_changes(self.boundary)


def sharpness_member(n: int, spec: bd.MollifierSpec, K: int = 64, alpha0: float = 0.0,
                     angles=None, M: int | None = None) -> SharpnessMember:
    if spec.eps0 > 1 / (2 * n) + 1e-15:
        raise ValueError("comb spacing eps0 must be <= 1/(2n)")
    if angles is None:
        angles = comb_angles(n, spec.eps0, alpha0)
    comb = bd.solve_delta_comb(n, angles)
    step = bd.solve_step_function(n, step_breakpoints(angles))
    g = bd.mollify(comb, spec, M)
    h = bd.mollify(step, spec, g.M)
    total = bd.SampledBoundary(g.values + spec.lam * h.values)
    series = _clear_low_moments(bd.poisson_extend(total, K), n)
    return SharpnessMember(series, total, comb, step, spec)


RESIDUE_LIMIT = 1e-6


def _clear_low_moments(series: PowerSeries, n: int) -> PowerSeries:
    """Zero ``c_1..c_{n-1}``, which vanish exactly by construction.

    Comb weights grow like ``eps0^{-2n}``, so solving and sampling leave
    rounding residue of order 1e-10 there; left in place it would make the
    function look like it vanishes to order 1.
    """
    c = series.coeffs.copy()
    residue = np.max(np.abs(c[1:n]), initial=0.0)
    if residue > RESIDUE_LIMIT * abs(c[n]):
        raise bd.SingularSystemError(f"low moments not cancelled (residue {residue:.3g})")
    c[1:n] = 0
    return PowerSeries(c, series.safe_radius)


def sharpness_sequence(n: int, spec: bd.MollifierSpec, K: int = 64, alpha0: float = 0.0) -> PowerSeries:
    """Series of ``u_eps + lam * v_eps`` for one ``(eps, lam)``."""
    return sharpness_member(n, spec, K, alpha0).series


def comb_limit_coefficient(angles) -> complex:
    """``2 pi ghat(n+1)`` of the unmollified comb, via the interpolation identity."""
    x = np.exp(-1j * np.asarray(angles))
    return complex(np.sum(x) + np.prod(x))


def convergence_table(n: int = 1, eps0: float = 0.25, divisors=(8, 16, 32), lam: float = 1e-4, K: int = 64):
    """Rows ``(eps, lam, max |kappa|, gap)`` along a geometric eps ladder."""
    bound = curvature_bound(n)
    rows = []
    for d in divisors:
        spec = bd.MollifierSpec(eps0 / d, eps0, lam)
        s = sharpness_sequence(n, spec, K)
        k = max(abs(curvature_at_origin(s, q)) for q in range(2 * n))
        rows.append((spec.eps, lam, k, bound - k))
    return rows


# ---------------------------------------------------------------------------
# random admissible family


@dataclass
class AdmissibleSample:
    series: PowerSeries
    n: int
    center: float
    eps0: float
    eps: float
    lam: float
    angles: np.ndarray


def random_admissible(n: int, rng: np.random.Generator, K: int = 64, max_tries: int = 50) -> AdmissibleSample:
    """Mollified comb plus small step perturbation at jittered near-equispaced angles.

    Samples whose boundary does not change sign exactly ``2n`` times are
    redrawn, so every accepted sample satisfies the ``n``-curve hypothesis.
    """
    for _ in range(max_tries):
        center = rng.uniform(0, 2 * np.pi)
        eps0 = rng.uniform(0.05, 1 / (2 * n))
        jitter = rng.uniform(-0.2, 0.2, 2 * n + 1) * eps0
        angles = comb_angles(n, eps0, center) + jitter
        lam = float(np.exp(rng.uniform(np.log(1e-4), np.log(1e-2))))
        spec = bd.MollifierSpec(eps0 / 8, eps0, lam)
        try:
            m = sharpness_member(n, spec, K, angles=angles)
        except (bd.SingularSystemError, ValueError):
            continue
        if m.sign_changes == 2 * n:
            return AdmissibleSample(m.series, n, center, eps0, spec.eps, lam, angles)
    raise RuntimeError(f"no admissible sample after {max_tries} draws")
