"""Truncated power series of holomorphic functions on the unit disk.

A harmonic function ``u`` on the disk is stored through a holomorphic
``w`` with ``u = Re w``, expanded at the origin::

    w(z) = c_0 + c_1 z + c_2 z**2 + ... + c_K z**K

Everything downstream (curvature, tracing, frequency) only needs values
and derivatives of ``w``, so :class:`PowerSeries` also implements the small
"holomorphic function" protocol used by :mod:`nodal_atlas.geometry`:
``value(z)``, ``deriv(z, order)`` and ``safe_radius``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

DEFAULT_K = 64
DELTA_BOUNDARY = 0.02
VANISHING_TOL = 1e-10
# weight used by vanishing_order; see its docstring
_ORDER_WEIGHT = 0.5


class OutsideSafeDiskError(ValueError):
    pass


class ConstantFunctionError(ValueError):
    pass


@dataclass(frozen=True)
class PowerSeries:
    """Coefficients ``c_0..c_K`` of ``w`` at 0.

    ``safe_radius`` is the largest ``|z|`` at which evaluation is allowed.
    Series built from boundary data default to ``1 - DELTA_BOUNDARY``;
    use :meth:`polynomial` for exact polynomials, which may be evaluated
    anywhere.
    """

    coeffs: np.ndarray
    safe_radius: float = 1.0 - DELTA_BOUNDARY
    _rev: np.ndarray = field(init=False, repr=False, compare=False)
    _drev: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).ravel()
        if c.size < 2:
            c = np.concatenate([c, np.zeros(2 - c.size, dtype=complex)])
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "_rev", c[::-1].copy())
        # memo of reversed derivative coefficients, filled lazily by deriv()
        object.__setattr__(self, "_drev", {})

    @classmethod
    def polynomial(cls, coeffs) -> "PowerSeries":
        return cls(coeffs, safe_radius=math.inf)

    @property
    def truncation_order(self) -> int:
        return self.coeffs.size - 1

    @property
    def K(self) -> int:
        return self.coeffs.size - 1

    @property
    def moduli(self) -> np.ndarray:
        """``a_k = |c_k|``."""
        return np.abs(self.coeffs)

    @property
    def phases(self) -> np.ndarray:
        """``theta_k = arg c_k``."""
        return np.angle(self.coeffs)

    def taylor_derivative(self, k: int) -> complex:
        """``w^(k)(0) = k! c_k``."""
        if k > self.K:
            return 0j
        return math.factorial(k) * complex(self.coeffs[k])

    # -- arithmetic ---------------------------------------------------------

    def _pad(self, other: "PowerSeries"):
        K = max(self.K, other.K)
        a = np.zeros(K + 1, dtype=complex)
        b = np.zeros(K + 1, dtype=complex)
        a[: self.K + 1] = self.coeffs
        b[: other.K + 1] = other.coeffs
        return a, b

    def __add__(self, other):
        if not isinstance(other, PowerSeries):
            return NotImplemented
        a, b = self._pad(other)
        return PowerSeries(a + b, min(self.safe_radius, other.safe_radius))

    def __sub__(self, other):
        if not isinstance(other, PowerSeries):
            return NotImplemented
        a, b = self._pad(other)
        return PowerSeries(a - b, min(self.safe_radius, other.safe_radius))

    def __mul__(self, scalar):
        if isinstance(scalar, PowerSeries):
            return NotImplemented
        return PowerSeries(self.coeffs * complex(scalar), self.safe_radius)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def truncate(self, K: int) -> "PowerSeries":
        c = np.zeros(K + 1, dtype=complex)
        m = min(K, self.K) + 1
        c[:m] = self.coeffs[:m]
        return PowerSeries(c, self.safe_radius)

    def rotated(self, alpha: float) -> "PowerSeries":
        """Series of ``w(e^{i alpha} z)``."""
        k = np.arange(self.K + 1)
        return PowerSeries(self.coeffs * np.exp(1j * alpha * k), self.safe_radius)

    def dilated(self, r: float) -> "PowerSeries":
        """Series of ``w(r z)``."""
        k = np.arange(self.K + 1)
        return PowerSeries(self.coeffs * r**k, self.safe_radius / r)

    # -- holomorphic function protocol ----------------------------------------

    def _check(self, z):
        if np.any(np.abs(z) > self.safe_radius + 1e-12):
            raise OutsideSafeDiskError(
                f"|z| = {np.max(np.abs(z)):.6g} exceeds safe radius {self.safe_radius:.6g}"
            )

    def value(self, z):
        self._check(z)
        return np.polyval(self._rev, z)

    __call__ = value

    def deriv(self, z, order: int = 1):
        """``w^(order)(z)`` evaluated directly (no truncation check on order)."""
        if order == 0:
            return self.value(z)
        self._check(z)
        if order > self.K:
            return np.zeros_like(np.asarray(z, dtype=complex))
        rev = self._drev.get(order)
        if rev is None:
            rev = self._drev[order] = derivative(self, order)._rev
        return np.polyval(rev, z)

    # -- serialization --------------------------------------------------------

    def to_dict(self) -> dict:
        return {"coeffs": [[float(c.real), float(c.imag)] for c in self.coeffs]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "PowerSeries":
        return cls([complex(re, im) for re, im in d["coeffs"]])

    @classmethod
    def from_json(cls, text: str) -> "PowerSeries":
        return cls.from_dict(json.loads(text))


def evaluate(series: PowerSeries, z):
    """Horner evaluation of ``w(z)``; ``Re`` of the result is ``u(z)``."""
    return series.value(z)


def derivative(series: PowerSeries, order: int) -> PowerSeries:
    """Series of ``w^(order)``.

    The constant term of the result is ``w^(order)(0)``.
    """
    if order < 1 or order > series.K:
        raise ValueError(f"derivative order {order} outside 1..{series.K}")
    k = np.arange(order, series.K + 1)
    # falling factorial k (k-1) ... (k-order+1)
    fall = np.ones(k.size)
    for j in range(order):
        fall *= k - j
    c = series.coeffs[order:] * fall
    return PowerSeries(c, series.safe_radius)


def vanishing_order(series: PowerSeries, tol: float = VANISHING_TOL) -> int:
    """Smallest ``k >= 1`` with ``|c_k|`` above ``tol`` times the series scale.

    The scale is ``max_j |c_j| 2^{-j}`` rather than the plain maximum:
    admissible coefficients grow like ``k^{2n}``, so the plain maximum over
    a long truncation would swamp the leading term.
    """
    a = series.moduli
    w = _ORDER_WEIGHT ** np.arange(a.size)
    scale = np.max(a[1:] * w[1:]) if a.size > 1 else 0.0
    if scale == 0.0:
        raise ConstantFunctionError("all coefficients below tolerance")
    above = np.nonzero(a[1:] > tol * scale)[0]
    return int(above[0]) + 1


def gradient(series: PowerSeries, z) -> tuple:
    """``(u_x, u_y)`` at ``z`` from ``w' = u_x - i u_y``."""
    d = series.deriv(z, 1)
    return np.real(d), -np.imag(d)


def monomial(n: int, K: int = DEFAULT_K, coeff: complex = 1.0) -> PowerSeries:
    c = np.zeros(max(K, n) + 1, dtype=complex)
    c[n] = coeff
    return PowerSeries(c)


def compose(outer: PowerSeries, inner: PowerSeries, K: int) -> PowerSeries:
    """Truncated Taylor coefficients of ``outer(inner(z))`` at 0.

    Horner's scheme carried out in truncated series arithmetic. When
    ``inner`` has a nonzero constant term every coefficient of ``outer``
    contributes to every output coefficient, so the result is only as
    good as the truncation of ``outer`` allows.
    """
    s = np.zeros(K + 1, dtype=complex)
    m = min(K, inner.K) + 1
    s[:m] = inner.coeffs[:m]
    acc = np.zeros(K + 1, dtype=complex)
    for c in outer.coeffs[::-1]:
        acc = np.convolve(acc, s)[: K + 1]
        acc[0] += c
    return PowerSeries(acc, outer.safe_radius)


def multiply(a: PowerSeries, b: PowerSeries, K: int | None = None) -> PowerSeries:
    if K is None:
        K = a.K + b.K
    c = np.convolve(a.coeffs, b.coeffs)[: K + 1]
    return PowerSeries(c, min(a.safe_radius, b.safe_radius))
