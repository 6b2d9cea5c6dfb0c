"""Tangent directions, curvature and numerical tracing of nodal curves.

Sign conventions. At a regular point ``z`` of ``{u = 0}`` the gradient is
``nu = conj(w'(z))`` (as a complex number) and we orient the curve by the
tangent ``T = i nu / |nu|``. ``curvature_regular`` is positive when the
curve turns clockwise while moving along ``T``; this matches the holomorphic
formula ``|w'| Re(w'' / w'^2)``.

At a critical point of order ``n`` at the origin there are ``2n`` branches
leaving along ``eta_q``. ``curvature_at_origin(s, q)`` is the curvature of
branch ``q`` traversed outward, again clockwise-positive. With that
orientation the two halves of one smooth curve through 0 carry opposite
signs, ``kappa_{q+n} = -kappa_q``.

Traced curves store per-vertex curvature signed with respect to their
direction of travel, so a branch launched from 0 starts at ``kappa_q``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Protocol

import numpy as np
from scipy.spatial import cKDTree

from .series import PowerSeries, vanishing_order

GRAD_TOL = 1e-12


class CriticalPointError(ValueError):
    pass


class InvalidBranchError(ValueError):
    pass


class StepCollapseError(RuntimeError):
    def __init__(self, msg, location=None):
        super().__init__(msg)
        self.location = location


class Holomorphic(Protocol):
    safe_radius: float

    def value(self, z): ...

    def deriv(self, z, order: int = 1): ...

    def taylor_derivative(self, k: int) -> complex: ...


# ---------------------------------------------------------------------------
# pointwise geometry


def _order(f) -> int:
    s = getattr(f, "series", f)
    return vanishing_order(s)


def tangent_angles(series) -> np.ndarray:
    """The ``2n`` directions ``eta_q = (q pi + pi/2 - arg w^(n)(0)) / n`` in branch order.

    Entry ``q`` is ``eta_q`` reduced to ``[0, 2pi)``. For the sorted list use
    ``np.sort``.
    """
    n = _order(series)
    arg = np.angle(series.taylor_derivative(n))
    q = np.arange(2 * n)
    return np.mod((q * np.pi + np.pi / 2 - arg) / n, 2 * np.pi)


def curvature_regular(series, z, grad_tol: float = GRAD_TOL) -> float:
    d1 = series.deriv(z, 1)
    if abs(d1) <= grad_tol:
        raise CriticalPointError(f"gradient vanishes at {z}")
    d2 = series.deriv(z, 2)
    return float(abs(d1) * (d2 / d1**2).real)


def _curvature_regular_vec(f, z):
    d1 = f.deriv(z, 1)
    d2 = f.deriv(z, 2)
    return np.abs(d1) * (d2 / d1**2).real


def curvature_at_origin(series, q: int) -> float:
    """Curvature at 0 of branch ``q``, traversed away from the origin.

    From the second-order expansion of ``w`` at the critical point::

        kappa_q = (-1)^q * (-2 / (n^2 + n)) * Re(e^{i(n+1) eta_q} w^(n+1)(0)) / |w^(n)(0)|
    """
    n = _order(series)
    return branch_curvature(n, series.taylor_derivative(n), series.taylor_derivative(n + 1), q)


def branch_curvature(n: int, wn: complex, wn1: complex, q: int) -> float:
    """Branch-``q`` curvature at a critical point from ``w^(n)`` and ``w^(n+1)`` there."""
    if not 0 <= q < 2 * n:
        raise InvalidBranchError(f"branch index {q} outside 0..{2 * n - 1}")
    if wn == 0:
        raise CriticalPointError("w^(n) vanishes")
    eta = (q * np.pi + np.pi / 2 - np.angle(wn)) / n
    raw = -2.0 / (n * n + n) * (np.exp(1j * (n + 1) * eta) * wn1).real / abs(wn)
    return float((-1) ** q * raw)


def parity_constant(n: int) -> float:
    """``alpha_0``: 0 for odd ``n``, ``pi / (2n(n+1))`` for even ``n``."""
    return 0.0 if n % 2 else math.pi / (2 * n * (n + 1))


def curvature_bound(n: int, r0: float = 1.0) -> float:
    if n < 1 or r0 <= 0:
        raise ValueError("need n >= 1 and r0 > 0")
    return 4.0 * (n + 1) / (n * r0) * math.cos(n * parity_constant(n))


@dataclass
class CurvatureReport:
    n: int
    etas: np.ndarray
    kappas: np.ndarray
    bound: float
    alpha0: float
    branch: int | None = None

    @property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.kappas)))

    @property
    def gap(self) -> float:
        return self.bound - self.max_abs

    def to_dict(self):
        return {
            "n": self.n,
            "branches": [
                {"q": q, "eta": float(e), "kappa": float(k)}
                for q, (e, k) in enumerate(zip(self.etas, self.kappas))
            ],
            "bound": self.bound,
            "alpha0": self.alpha0,
            "max_abs_kappa": self.max_abs,
            "gap": self.gap,
            "branch": self.branch,
        }


def curvature_report(series, r0: float = 1.0) -> CurvatureReport:
    n = _order(series)
    kappas = np.array([curvature_at_origin(series, q) for q in range(2 * n)])
    return CurvatureReport(n, tangent_angles(series), kappas, curvature_bound(n, r0), parity_constant(n))


# ---------------------------------------------------------------------------
# tracing


@dataclass(frozen=True)
class TraceConfig:
    base_step: float = 1e-3
    min_step: float = 1e-7
    stop_radius: float = 0.98
    launch_radius: float = 1e-4
    seed_grid: int = 64
    max_steps: int = 50_000
    newton_tol: float = 1e-12
    newton_maxiter: int = 20
    # seeds closer than this to an already traced curve are dropped
    dedup_distance: float = 5e-3
    origin_tol: float = 1e-10


@dataclass
class NodalCurve:
    vertices: np.ndarray
    curvatures: np.ndarray
    branch_q: int | None = None
    closed: bool = False
    arc_lengths: np.ndarray = field(init=False)

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=complex)
        self.curvatures = np.asarray(self.curvatures, dtype=float)
        seg = np.abs(np.diff(self.vertices))
        self.arc_lengths = np.concatenate([[0.0], np.cumsum(seg)])

    @property
    def length(self) -> float:
        return float(self.arc_lengths[-1])

    @property
    def ends(self) -> tuple[complex, complex]:
        return complex(self.vertices[0]), complex(self.vertices[-1])

    def passes_through(self, z=0j, tol=1e-9) -> bool:
        return bool(np.min(np.abs(self.vertices - z)) < tol)

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["x", "y", "arclength", "curvature"])
        for z, s, k in zip(self.vertices, self.arc_lengths, self.curvatures):
            wr.writerow([f"{z.real:.12g}", f"{z.imag:.12g}", f"{s:.12g}", f"{k:.12g}"])
        return buf.getvalue()


def polyline_curvature(vertices) -> np.ndarray:
    """Three-point (circumcircle) curvature at interior vertices, clockwise-positive."""
    v = np.asarray(vertices, dtype=complex)
    a, b, c = v[:-2], v[1:-1], v[2:]
    cross = ((b - a).conjugate() * (c - b)).imag
    denom = np.abs(b - a) * np.abs(c - b) * np.abs(c - a)
    return -2.0 * cross / denom


def _unit_tangent(f, z):
    g = np.conj(f.deriv(z, 1))
    return 1j * g / abs(g)


def _newton_gradient(f, z, cfg: TraceConfig):
    """Slide ``z`` along the gradient onto ``u = 0``."""
    for _ in range(cfg.newton_maxiter):
        u = f.value(z).real
        g = np.conj(f.deriv(z, 1))
        ag = abs(g)
        if ag == 0:
            raise StepCollapseError("gradient vanished in corrector", location=z)
        if abs(u) < cfg.newton_tol * ag:
            return z, True
        z = z - u * g / ag**2
        if abs(z) > f.safe_radius:
            return z, False
    return z, abs(f.value(z).real) < 1e-8 * abs(f.deriv(z, 1))


def _land_on_circle(f, z_in, z_out, R, cfg: TraceConfig):
    """Zero of ``u`` on ``|z| = R`` between an inside and an outside point."""
    # start from where the chord crosses the circle
    d = z_out - z_in
    A, B, C = abs(d) ** 2, 2 * (z_in.conjugate() * d).real, abs(z_in) ** 2 - R * R
    t = (-B + math.sqrt(max(B * B - 4 * A * C, 0.0))) / (2 * A)
    phi = np.angle(z_in + t * d)
    for _ in range(cfg.newton_maxiter):
        z = R * np.exp(1j * phi)
        u = f.value(z).real
        du = (f.deriv(z, 1) * 1j * z).real
        if du == 0:
            break
        step = u / du
        phi -= step
        if abs(step) < 1e-15:
            break
    return R * np.exp(1j * phi)


def _march(f, z0, direction, cfg: TraceConfig, R: float):
    """Follow the nodal curve from ``z0`` (already on it) in ``direction``.

    Returns ``(points, curvatures, closed)``; ``points[0] == z0``.
    """
    pts = [complex(z0)]
    T = _unit_tangent(f, z0)
    s = 1.0 if (T * np.conj(direction)).real >= 0 else -1.0
    k0 = curvature_regular(f, z0)
    kap = [s * k0]
    z = complex(z0)
    heading = s * T
    closed = False
    for i in range(cfg.max_steps):
        k = abs(kap[-1])
        h = cfg.base_step if k < 0.1 / cfg.base_step else 0.1 / k
        if h < cfg.min_step:
            raise StepCollapseError(f"step {h:.3g} below minimum at z={z:.6g}", location=z)
        zp = z + h * heading
        if abs(zp) >= R:
            zl = _land_on_circle(f, z, zp, R, cfg)
            pts.append(complex(zl))
            Tl = _unit_tangent(f, zl)
            kap.append(curvature_regular(f, zl) * (1.0 if (Tl * np.conj(heading)).real >= 0 else -1.0))
            break
        zc, ok = _newton_gradient(f, zp, cfg)
        if not ok or abs(zc) >= R:
            zl = _land_on_circle(f, z, zc if abs(zc) >= R else zp + 2 * h * heading, R, cfg)
            if abs(zl - z) > 10 * h:
                raise StepCollapseError("corrector failed to converge", location=zp)
            pts.append(complex(zl))
            Tl = _unit_tangent(f, zl)
            kap.append(curvature_regular(f, zl) * (1.0 if (Tl * np.conj(heading)).real >= 0 else -1.0))
            break
        Tn = _unit_tangent(f, zc)
        sgn = 1.0 if (Tn * np.conj(heading)).real >= 0 else -1.0
        heading = sgn * Tn
        kap.append(sgn * curvature_regular(f, zc))
        pts.append(complex(zc))
        z = zc
        if i >= 10 and abs(z - z0) < 2 * h:
            pts.append(complex(z0))
            kap.append(kap[0])
            closed = True
            break
    else:
        raise StepCollapseError(f"no termination after {cfg.max_steps} steps", location=z)
    return pts, kap, closed


def _launch_branch(f, eta, cfg: TraceConfig, R):
    z0 = cfg.launch_radius * np.exp(1j * eta)
    zc, ok = _newton_gradient(f, z0, cfg)
    if not ok or abs(zc - z0) > 0.5 * cfg.launch_radius:
        raise StepCollapseError("could not place branch start on the nodal set", location=z0)
    return _march(f, zc, np.exp(1j * eta), cfg, R)


def _has_origin_zero(f, cfg) -> bool:
    s = getattr(f, "series", f)
    c = np.abs(s.coeffs)
    return c[0] <= cfg.origin_tol * np.max(c[1:] * 0.5 ** np.arange(1, c.size))


def _sign_scan_seeds(f, R, N):
    """Zero crossings of ``u`` on the edges of an ``N x N`` grid over ``[-R, R]^2``."""
    x = np.linspace(-R, R, N)
    X, Y = np.meshgrid(x, x)
    Z = X + 1j * Y
    inside = np.abs(Z) < R
    U = np.full(Z.shape, np.nan)
    U[inside] = f.value(Z[inside]).real
    seeds = []
    for (a, b) in (((slice(None), slice(None, -1)), (slice(None), slice(1, None))),
                   ((slice(None, -1), slice(None)), (slice(1, None), slice(None)))):
        ua, ub = U[a], U[b]
        mask = np.isfinite(ua) & np.isfinite(ub) & (np.sign(ua) != np.sign(ub))
        za, zb = Z[a][mask], Z[b][mask]
        va = ua[mask]
        for p, q, up in zip(za, zb, va):
            seeds.append(_bisect(f, p, q, up))
    seeds.sort(key=lambda z: (round(z.real, 12), round(z.imag, 12)))
    return seeds


def _bisect(f, a, b, ua, iters=50):
    for _ in range(iters):
        m = 0.5 * (a + b)
        um = f.value(m).real
        if um == 0:
            return complex(m)
        if np.sign(um) == np.sign(ua):
            a, ua = m, um
        else:
            b = m
    return complex(0.5 * (a + b))


def trace_nodal_set(series, config: TraceConfig | None = None) -> list[NodalCurve]:
    """All nodal curves of ``Re series`` inside ``|z| <= config.stop_radius``.

    ``series`` is anything following the holomorphic protocol, e.g. a
    :class:`PowerSeries` or an exact extremal function.
    """
    cfg = config or TraceConfig()
    R = min(cfg.stop_radius, series.safe_radius)
    curves: list[NodalCurve] = []

    if _has_origin_zero(series, cfg):
        n = _order(series)
        etas = (np.arange(2 * n) * np.pi + np.pi / 2 - np.angle(series.taylor_derivative(n))) / n
        k0 = [curvature_at_origin(series, q) for q in range(2 * n)]
        for q in range(n):
            pa, ka, _ = _launch_branch(series, etas[q], cfg, R)
            pb, kb, _ = _launch_branch(series, etas[q + n], cfg, R)
            # walk in along branch q+n, then out along branch q
            verts = pb[::-1] + [0j] + pa
            kaps = [-k for k in kb[::-1]] + [k0[q]] + ka
            curves.append(NodalCurve(verts, kaps, branch_q=q))

    tree = cKDTree(_xy(curves)) if curves else None
    for seed in _sign_scan_seeds(series, R, cfg.seed_grid):
        if tree is not None and tree.query([seed.real, seed.imag])[0] < cfg.dedup_distance:
            continue
        try:
            curvature_regular(series, seed)
        except CriticalPointError:
            continue
        T = _unit_tangent(series, seed)
        pa, ka, closed = _march(series, seed, T, cfg, R)
        if closed:
            verts, kaps = pa, ka
        else:
            pb, kb, _ = _march(series, seed, -T, cfg, R)
            verts = pb[::-1] + pa[1:]
            kaps = [-k for k in kb[::-1]] + ka[1:]
        curves.append(NodalCurve(verts, kaps, closed=closed))
        tree = cKDTree(_xy(curves))
    return curves


def _xy(curves):
    v = np.concatenate([c.vertices for c in curves])
    return np.column_stack([v.real, v.imag])


def uniform_curvature_scan(series, c: float, config: TraceConfig | None = None):
    """``(max |kappa|, argmax)`` over the traced nodal set in ``0 < |z| <= c``."""
    if not 0 < c < series.safe_radius:
        raise ValueError("scan radius must lie inside the safe disk")
    base = config or TraceConfig()
    cfg = TraceConfig(**{**base.__dict__, "stop_radius": c})
    best, where = 0.0, None
    for curve in trace_nodal_set(series, cfg):
        mask = (np.abs(curve.vertices) > 0) & (np.abs(curve.vertices) <= c + 1e-12)
        if not np.any(mask):
            continue
        k = np.abs(curve.curvatures[mask])
        i = int(np.argmax(k))
        if k[i] > best:
            best, where = float(k[i]), complex(curve.vertices[mask][i])
    return best, where


def count_sign_changes(boundary, tol: float = 1e-9) -> int:
    from .boundary import count_sign_changes as _csc

    return _csc(boundary, tol)


def curves_to_csv(curves: list[NodalCurve]) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["curve", "x", "y", "arclength", "curvature"])
    for i, c in enumerate(curves):
        for z, s, k in zip(c.vertices, c.arc_lengths, c.curvatures):
            wr.writerow([i, f"{z.real:.12g}", f"{z.imag:.12g}", f"{s:.12g}", f"{k:.12g}"])
    return buf.getvalue()
