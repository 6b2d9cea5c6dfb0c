"""Boundary values and boundary distributions on the unit circle.

Four kinds of boundary data appear in the constructions:

* :class:`DiracComb` -- ``sum_j c_j delta_{alpha_j}``
* :class:`DerivativeComb` -- ``sum_j b_j D^j delta_{phi0}``, with the
  convention ``(D^j delta)(f) = (-1)^j f^(j)(phi0)``
* :class:`StepBoundary` -- piecewise constant ``sum_j d_j 1[beta_j, beta_{j+1})``
* :class:`SampledBoundary` -- ``g`` on the uniform grid ``2 pi m / M``

All of them expose ``fourier(k)``, the normalized coefficient
``(1/2pi) int g(theta) e^{-ik theta} dtheta``, and all of them can be
Poisson-extended into a :class:`~nodal_atlas.series.PowerSeries` with
``c_k = 2 ghat(k)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.integrate
import scipy.linalg

from .series import PowerSeries

TWO_PI = 2.0 * np.pi
ZERO_MEAN_TOL = 1e-10
MAX_CONDITION = 1e13


class SingularSystemError(ValueError):
    pass


class NonzeroMeanError(ValueError):
    pass


class UnderResolvedError(ValueError):
    pass


def _wrap(theta):
    """Map angles to ``[-pi, pi)``."""
    return (np.asarray(theta) + np.pi) % TWO_PI - np.pi


# ---------------------------------------------------------------------------
# boundary types


@dataclass(frozen=True)
class DiracComb:
    angles: np.ndarray
    weights: np.ndarray
    condition: float | None = field(default=None, compare=False)

    def __post_init__(self):
        a = np.asarray(self.angles, dtype=float).ravel()
        c = np.asarray(self.weights, dtype=float).ravel()
        if a.shape != c.shape:
            raise ValueError("angles and weights differ in length")
        if not np.all(np.isfinite(c)):
            raise ValueError("non-finite comb weight")
        object.__setattr__(self, "angles", a)
        object.__setattr__(self, "weights", c)

    @property
    def atoms(self):
        return list(zip(self.angles.tolist(), self.weights.tolist()))

    def fourier(self, k):
        k = np.asarray(k)
        return np.exp(-1j * np.multiply.outer(k, self.angles)) @ self.weights / TWO_PI

    def to_dict(self):
        return {"type": "dirac_comb", "atoms": [[a, c] for a, c in self.atoms]}


@dataclass(frozen=True)
class DerivativeComb:
    phi0: float
    b: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.b, dtype=float).ravel()
        if b.size % 2:
            raise ValueError("derivative comb needs an even number of weights")
        object.__setattr__(self, "b", b)

    @property
    def n(self) -> int:
        return self.b.size // 2

    def fourier(self, k):
        k = np.asarray(k, dtype=float)
        j = np.arange(1, self.b.size + 1)
        ik = np.multiply.outer(1j * k, np.ones_like(j, dtype=float))
        return (ik**j @ self.b) * np.exp(-1j * k * self.phi0) / TWO_PI

    def to_dict(self):
        return {"type": "derivative_comb", "phi0": float(self.phi0), "b": self.b.tolist()}


@dataclass(frozen=True)
class StepBoundary:
    """``h = sum_j d_j 1[beta_j, beta_{j+1})`` with ``beta_{2n+1} = beta_1 + 2 pi``."""

    beta: np.ndarray
    d: np.ndarray
    condition: float | None = field(default=None, compare=False)

    def __post_init__(self):
        beta = np.asarray(self.beta, dtype=float).ravel()
        d = np.asarray(self.d, dtype=float).ravel()
        if beta.shape != d.shape:
            raise ValueError("beta and d differ in length")
        if np.any(np.diff(beta) <= 0) or beta[-1] >= beta[0] + TWO_PI:
            raise ValueError("breakpoints must increase within one period")
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "d", d)

    @property
    def edges(self) -> np.ndarray:
        return np.append(self.beta, self.beta[0] + TWO_PI)

    def fourier(self, k):
        k = np.atleast_1d(np.asarray(k, dtype=float))
        e = self.edges
        out = np.empty(k.shape, dtype=complex)
        zero = k == 0
        out[zero] = self.d @ np.diff(e) / TWO_PI
        kk = k[~zero][:, None]
        ex = np.exp(-1j * kk * e)
        out[~zero] = (np.diff(ex, axis=1) @ self.d) / (-1j * kk[:, 0]) / TWO_PI
        return out if out.size > 1 else out[0]

    def __call__(self, theta):
        t = (np.asarray(theta) - self.beta[0]) % TWO_PI + self.beta[0]
        idx = np.searchsorted(self.edges, t, side="right") - 1
        return self.d[np.clip(idx, 0, self.d.size - 1)]

    def sample(self, M: int) -> "SampledBoundary":
        return SampledBoundary(self(TWO_PI * np.arange(M) / M))

    def to_dict(self):
        return {"type": "step", "beta": self.beta.tolist(), "d": self.d.tolist()}


@dataclass(frozen=True)
class SampledBoundary:
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).ravel()
        M = v.size
        if M < 256 or M & (M - 1):
            raise ValueError(f"grid size {M} must be a power of two >= 256")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def M(self) -> int:
        return self.values.size

    @property
    def theta(self) -> np.ndarray:
        return TWO_PI * np.arange(self.M) / self.M

    def _spectrum(self):
        spec = self.__dict__.get("_spec")
        if spec is None:
            spec = np.fft.fft(self.values) / self.M
            object.__setattr__(self, "_spec", spec)
        return spec

    def fourier(self, k):
        k = np.asarray(k)
        if np.any(np.abs(k) >= self.M // 2):
            raise ValueError("coefficient index beyond the Nyquist limit")
        return self._spectrum()[k]

    def integral(self) -> float:
        return float(np.sum(self.values) * TWO_PI / self.M)

    def to_dict(self):
        return {"type": "sampled", "values": self.values.tolist()}


@dataclass(frozen=True)
class MollifierSpec:
    eps: float
    eps0: float
    lam: float

    def __post_init__(self):
        if not 0 < self.eps < self.eps0 / 4:
            raise ValueError(f"need 0 < eps < eps0/4, got eps={self.eps}, eps0={self.eps0}")
        if self.lam <= 0:
            raise ValueError("lambda must be positive")


Boundary = DiracComb | DerivativeComb | StepBoundary | SampledBoundary


def boundary_from_dict(d: dict):
    kind = d.get("type")
    if kind == "dirac_comb":
        atoms = np.asarray(d["atoms"], dtype=float).reshape(-1, 2)
        return DiracComb(atoms[:, 0], atoms[:, 1])
    if kind == "derivative_comb":
        return DerivativeComb(float(d["phi0"]), d["b"])
    if kind == "step":
        return StepBoundary(d["beta"], d["d"])
    if kind == "sampled":
        return SampledBoundary(d["values"])
    raise ValueError(f"unknown boundary type {kind!r}")


# ---------------------------------------------------------------------------
# operations


def fourier_coefficient(boundary, k: int) -> complex:
    if k < 0:
        raise ValueError("k must be non-negative")
    return complex(boundary.fourier(k))


def poisson_extend(boundary, K: int = 64, tol: float = ZERO_MEAN_TOL) -> PowerSeries:
    """Holomorphic series ``w`` with ``Re w`` the Poisson extension of ``boundary``.

    For a distribution ``T`` this is ``c_k = T(zeta^{-k}) / pi``.
    """
    ks = np.arange(K + 1)
    ghat = np.atleast_1d(boundary.fourier(ks))
    scale = np.max(np.abs(ghat[1:]))
    if abs(ghat[0]) > tol * scale:
        raise NonzeroMeanError(f"boundary mean {ghat[0]:.3g} is not zero (u(0) != 0)")
    c = 2.0 * ghat
    c[0] = 0.0
    return PowerSeries(c)


def restrict(series: PowerSeries, r: float, M: int = 1024) -> SampledBoundary:
    """Sample ``u(r e^{i theta})`` from the coefficients (no safe-disk check)."""
    if series.K >= M // 2:
        raise ValueError("grid too coarse for the series")
    spec = np.zeros(M, dtype=complex)
    k = np.arange(series.K + 1)
    spec[k] = series.coeffs * r**k
    return SampledBoundary(np.real(np.fft.ifft(spec) * M))


def _lu_solve(A: np.ndarray, rhs: np.ndarray):
    cond = float(np.linalg.cond(A))
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise SingularSystemError(f"linear system is singular or ill-conditioned (cond={cond:.3g})")
    lu, piv = scipy.linalg.lu_factor(A)
    return scipy.linalg.lu_solve((lu, piv), rhs), cond


def _check_distinct(angles):
    a = np.sort(np.mod(angles, TWO_PI))
    gaps = np.diff(np.append(a, a[0] + TWO_PI))
    if np.min(gaps) < 1e-12:
        raise SingularSystemError("comb angles coincide modulo 2 pi")


def delta_comb_matrix(n: int, angles) -> np.ndarray:
    """Real form of the moment system: rows 1, sin k alpha, cos k alpha (k = 1..n)."""
    a = np.asarray(angles, dtype=float)
    rows = [np.ones_like(a)]
    for k in range(1, n + 1):
        rows += [np.sin(k * a), np.cos(k * a)]
    return np.array(rows)


def solve_delta_comb(n: int, angles) -> DiracComb:
    """Weights of ``2n+1`` atoms with ``ghat(k) = 0`` for ``|k| < n`` and ``2 pi ghat(n) = 1``."""
    a = np.asarray(angles, dtype=float)
    if a.size != 2 * n + 1:
        raise ValueError(f"need {2 * n + 1} angles, got {a.size}")
    _check_distinct(a)
    rhs = np.zeros(2 * n + 1)
    rhs[-1] = 1.0
    c, cond = _lu_solve(delta_comb_matrix(n, a), rhs)
    return DiracComb(a, c, condition=cond)


def delta_comb_closed_form(n: int, angles) -> np.ndarray:
    """Weights from the explicit inverse-Vandermonde formula.

    ``e^{in alpha_j} c_j = (1 + prod_{m!=j} x_m) / prod_{m!=j} (x_j - x_m)``
    with ``x_j = e^{-i alpha_j}``.
    """
    a = np.asarray(angles, dtype=float)
    x = np.exp(-1j * a)
    c = np.empty(a.size)
    for j in range(a.size):
        others = np.delete(x, j)
        val = (1 + np.prod(others)) / np.prod(x[j] - others)
        c[j] = (val * np.exp(-1j * n * a[j])).real
    return c


def step_matrix(n: int, beta) -> np.ndarray:
    b = np.append(np.asarray(beta, dtype=float), beta[0] + TWO_PI)
    rows = [np.diff(b)]
    for k in range(1, n):
        rows += [np.diff(np.sin(k * b)), np.diff(np.cos(k * b))]
    rows.append(np.diff(np.sin(n * b)))
    return np.array(rows)


def solve_step_function(n: int, breakpoints) -> StepBoundary:
    """Levels with ``hhat(k) = 0`` for ``0 <= k < n`` and ``Re hhat(n) = 1``."""
    beta = np.asarray(breakpoints, dtype=float)
    if beta.size != 2 * n:
        raise ValueError(f"need {2 * n} breakpoints, got {beta.size}")
    rhs = np.zeros(2 * n)
    rhs[-1] = 2 * n * np.pi
    d, cond = _lu_solve(step_matrix(n, beta), rhs)
    return StepBoundary(beta, d, condition=cond)


def solve_derivative_comb(n: int, phi0: float) -> DerivativeComb:
    """``T = sum_{j=1}^{2n} b_j D^j delta_phi0`` with ``T(zeta^{-k}) = pi [k == n]``, ``1 <= k <= n``.

    Real and imaginary parts split into two Vandermonde systems in ``k^2``.
    """
    k = np.arange(1, n + 1, dtype=float)
    m = np.arange(1, n + 1)
    even = k[:, None] ** (2 * m)[None, :]
    odd = k[:, None] ** (2 * m - 1)[None, :]
    rhs_re = np.zeros(n)
    rhs_im = np.zeros(n)
    rhs_re[-1] = np.pi * np.cos(n * phi0)
    rhs_im[-1] = np.pi * np.sin(n * phi0)
    x_even, _ = _lu_solve(even, rhs_re)
    x_odd, _ = _lu_solve(odd, rhs_im)
    b = np.empty(2 * n)
    # x_even[m-1] = (-1)^m b_{2m},  x_odd[m-1] = (-1)^{m-1} b_{2m-1}
    b[1::2] = x_even * (-1.0) ** m
    b[0::2] = x_odd * (-1.0) ** (m - 1)
    return DerivativeComb(phi0, b)


# ---------------------------------------------------------------------------
# mollification


def _bump(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inside = np.abs(x) < 1
    out[inside] = np.exp(-1.0 / (1.0 - x[inside] ** 2))
    return out


@lru_cache(maxsize=None)
def _bump_mass() -> float:
    return scipy.integrate.quad(lambda x: float(_bump(x)), -1, 1, epsabs=1e-14, epsrel=1e-12, limit=200)[0]


def bump(x):
    """Unit-mass mollifier ``C exp(-1/(1-x^2))`` supported on ``[-1, 1]``."""
    return _bump(x) / _bump_mass()


@lru_cache(maxsize=None)
def _bump_cdf_table(npts: int = 200_001):
    x = np.linspace(-1.0, 1.0, npts)
    cdf = scipy.integrate.cumulative_trapezoid(bump(x), x, initial=0.0)
    return x, cdf / cdf[-1]


def bump_cdf(t):
    x, cdf = _bump_cdf_table()
    return np.interp(t, x, cdf, left=0.0, right=1.0)


def mollifier_multiplier(eps: float, k: int) -> float:
    """``2 pi hat(phi_eps)(k) = int phi(x) cos(k eps x) dx``."""
    if k == 0:
        return 1.0
    val = scipy.integrate.quad(
        lambda x: float(bump(x)) * math.cos(k * eps * x), -1, 1, epsabs=1e-15, epsrel=1e-13, limit=200
    )[0]
    return val


def required_grid(eps: float) -> int:
    """Smallest admissible grid: a power of two >= max(256, 64 * 2pi / eps)."""
    need = max(256, 64 * TWO_PI / eps)
    return 1 << math.ceil(math.log2(need))


def mollify(data, spec: MollifierSpec | float, M: int | None = None) -> SampledBoundary:
    """Sample ``phi_eps * data`` on a uniform grid of ``M`` points."""
    eps = spec.eps if isinstance(spec, MollifierSpec) else float(spec)
    need = required_grid(eps)
    if M is None:
        M = need
    elif M < need:
        raise UnderResolvedError(f"grid of {M} points does not resolve eps={eps}; need {need}")
    theta = TWO_PI * np.arange(M) / M
    if isinstance(data, DiracComb):
        vals = np.zeros(M)
        for a, c in zip(data.angles, data.weights):
            vals += c * bump(_wrap(theta - a) / eps) / eps
        return SampledBoundary(vals)
    if isinstance(data, StepBoundary):
        vals = np.array(data(theta), dtype=float)
        d_prev = np.roll(data.d, 1)
        for bj, dj, dp in zip(data.beta, data.d, d_prev):
            t = _wrap(theta - bj) / eps
            near = np.abs(t) < 1
            vals[near] = dp + (dj - dp) * bump_cdf(t[near])
        return SampledBoundary(vals)
    raise TypeError(f"cannot mollify {type(data).__name__}")


def count_sign_changes(boundary: SampledBoundary, tol: float = 1e-9) -> int:
    """Sign alternations around the circle, skipping ``|g| < tol max|g|``."""
    v = boundary.values
    vmax = np.max(np.abs(v))
    if vmax == 0:
        raise ValueError("boundary data vanishes identically")
    s = np.sign(v[np.abs(v) >= tol * vmax])
    if s.size == 0:
        raise ValueError("all samples below tolerance")
    return int(np.count_nonzero(s != np.roll(s, 1)))
