"""Disk automorphisms and how curvature at a critical point moves under them.

``psi(z) = e^{i theta} (z - p) / (1 - conj(p) z)`` sends ``p`` to 0. Every
series composition below is with a map that is analytic on a disk larger
than the unit disk, so truncated Horner composition is well behaved.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .geometry import branch_curvature, curvature_at_origin, curvature_bound, parity_constant
from .series import PowerSeries, compose, vanishing_order
from .spectral import _midpoint_grid

SLOW_CONVERGENCE = 0.7


@dataclass(frozen=True)
class MobiusMap:
    p: complex = 0j
    theta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "p", complex(self.p))
        if abs(self.p) >= 1:
            raise ValueError("|p| must be < 1")

    def forward(self, z):
        p = self.p
        return np.exp(1j * self.theta) * (z - p) / (1 - np.conj(p) * z)

    def inverse(self, zeta):
        p, b = self.p, np.exp(-1j * self.theta)
        return (b * zeta + p) / (1 + np.conj(p) * b * zeta)

    def deriv(self, z, order: int = 1):
        """``psi^(order)(z)`` for order 1 or 2."""
        p, e = self.p, np.exp(1j * self.theta)
        D = 1 - np.conj(p) * z
        if order == 1:
            return e * (1 - abs(p) ** 2) / D**2
        if order == 2:
            return 2 * e * np.conj(p) * (1 - abs(p) ** 2) / D**3
        raise ValueError("only first and second derivatives are provided")

    def inverse_series(self, K: int) -> PowerSeries:
        """Taylor coefficients of ``psi^{-1}`` at 0; the constant term is ``p``."""
        p, b = self.p, np.exp(-1j * self.theta)
        m = np.arange(1, K + 1)
        c = np.empty(K + 1, dtype=complex)
        c[0] = p
        c[1:] = (-np.conj(p)) ** (m - 1) * b**m * (1 - abs(p) ** 2)
        return PowerSeries(c, safe_radius=1.0)

    def shifted_series(self, K: int) -> PowerSeries:
        """Taylor coefficients of ``zeta -> psi(p + zeta)``, which vanishes at 0."""
        p = self.p
        s = 1 - abs(p) ** 2
        m = np.arange(1, K + 1)
        c = np.zeros(K + 1, dtype=complex)
        c[1:] = np.exp(1j * self.theta) / s * (np.conj(p) / s) ** (m - 1)
        return PowerSeries(c, safe_radius=s / max(abs(p), 1e-300))

    def to_dict(self):
        return {"p": [self.p.real, self.p.imag], "theta": self.theta}

    @classmethod
    def from_dict(cls, d):
        re, im = d["p"]
        return cls(complex(re, im), float(d.get("theta", 0.0)))


def apply(m: MobiusMap, z, direction: str = "forward"):
    if direction in ("forward", "fwd"):
        return m.forward(z)
    if direction in ("inverse", "inv"):
        return m.inverse(z)
    raise ValueError(f"unknown direction {direction!r}")


def transported_bound(n: int, p: complex, r0: float = 1.0) -> float:
    """Curvature bound at a critical point ``p`` of order ``n`` for ``u`` harmonic in ``B_{r0}``."""
    ap = abs(p)
    if ap >= r0:
        raise ValueError("|p| must be smaller than r0")
    if ap == 0:
        # same floating-point path as the untransported bound
        return curvature_bound(n, r0)
    d = r0 * r0 - ap * ap
    return 4 * (n + 1) * r0 * math.cos(n * parity_constant(n)) / (d * n) + 2 * ap / d


def equality_theta(n: int, p: complex, q: int, j: int) -> float:
    if not 0 <= q < 2 * n:
        raise ValueError(f"q must lie in 0..{2 * n - 1}")
    return -j * math.pi - np.angle(p) + (n + 1) * (q * math.pi + math.pi / 2) / n


def pullback_series(series: PowerSeries, m: MobiusMap, K: int | None = None) -> PowerSeries:
    """Coefficients at 0 of ``w1 = w o psi^{-1}``, i.e. ``w`` re-expanded around ``p``."""
    if K is None:
        K = series.K
    if K > series.K:
        raise ValueError("K exceeds the source truncation")
    if abs(m.p) > SLOW_CONVERGENCE:
        warnings.warn(f"|p| = {abs(m.p):.3g} > {SLOW_CONVERGENCE}: truncated pullback loses accuracy",
                      stacklevel=2)
    out = compose(series, m.inverse_series(K), K)
    return PowerSeries(out.coeffs, safe_radius=series.safe_radius)


def pushforward_series(series: PowerSeries, m: MobiusMap, K: int) -> PowerSeries:
    """Coefficients of ``zeta -> w(psi(p + zeta))``; exact to order ``K`` in the source coefficients."""
    out = compose(series, m.shifted_series(K), K)
    return PowerSeries(out.coeffs)


def chain_rule_derivatives(w1: PowerSeries, m: MobiusMap, n: int):
    """``w^(n)(p)`` and ``w^(n+1)(p)`` for ``w = w1 o psi`` from the Taylor data of ``w1`` at 0."""
    d1 = m.deriv(m.p, 1)
    d2 = m.deriv(m.p, 2)
    a = w1.taylor_derivative(n)
    b = w1.taylor_derivative(n + 1)
    wn = a * d1**n
    wn1 = b * d1 ** (n + 1) + math.comb(n + 1, 2) * a * d1 ** (n - 1) * d2
    return wn, wn1


def chain_rule_curvature(w1: PowerSeries, m: MobiusMap, q: int) -> float:
    """Curvature at ``p`` of branch ``q`` of ``Re(w1 o psi)``."""
    n = vanishing_order(w1)
    wn, wn1 = chain_rule_derivatives(w1, m, n)
    return branch_curvature(n, wn, wn1, q)


def shift_series(series: PowerSeries, p: complex, K: int | None = None) -> PowerSeries:
    """Taylor coefficients of ``w(p + zeta)`` at ``zeta = 0``."""
    K = series.K if K is None else K
    return compose(series, PowerSeries.polynomial([p, 1.0]), K)


def transported_curvatures(w: PowerSeries, m: MobiusMap, K: int = 128) -> np.ndarray:
    """Curvature at ``p`` of every branch of ``Re(w o psi)``."""
    s = pushforward_series(w, m, K)
    n = vanishing_order(s)
    return np.array([curvature_at_origin(s, q) for q in range(2 * n)])


@dataclass
class TransportedAreaReport:
    p: complex
    r: float
    positive: float
    negative: float
    positive_flat: float
    negative_flat: float
    factor: float

    @property
    def lower_bound_ok(self) -> bool:
        return (self.positive >= self.factor * self.positive_flat * (1 - 1e-12)
                and self.negative >= self.factor * self.negative_flat * (1 - 1e-12))

    def to_dict(self):
        return {
            "p": [self.p.real, self.p.imag], "r": self.r,
            "positive": self.positive, "negative": self.negative,
            "positive_flat": self.positive_flat, "negative_flat": self.negative_flat,
            "factor": self.factor, "lower_bound_ok": self.lower_bound_ok,
        }


def transported_areas(w, m: MobiusMap, r: float, resolution: int = 512) -> TransportedAreaReport:
    """Sign areas of ``Re(w o psi)`` over ``psi^{-1}(B_r)``.

    Integrated in ``zeta = psi(z)`` coordinates with Jacobian
    ``|(psi^{-1})'(zeta)|^2``, which is at least ``((1-|p|)/(1+|p|))^2``.
    """
    x, h = _midpoint_grid(r, resolution)
    Z = x[None, :] + 1j * x[:, None]
    Z = Z[np.abs(Z) < r]
    u = np.real(w.value(Z))
    p, b = m.p, np.exp(-1j * m.theta)
    jac = np.abs((1 - abs(p) ** 2) * b / (1 + np.conj(p) * b * Z) ** 2) ** 2
    cell = h * h
    pos, neg = u > 0, u < 0
    factor = ((1 - abs(p)) / (1 + abs(p))) ** 2
    return TransportedAreaReport(
        p, r,
        float(jac[pos].sum() * cell), float(jac[neg].sum() * cell),
        float(pos.sum() * cell), float(neg.sum() * cell),
        factor,
    )
