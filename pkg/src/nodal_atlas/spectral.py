"""Coefficient growth, frequency, doubling index, tail radius and sign areas."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .series import PowerSeries, vanishing_order

DOUBLING_ANGLES = 720
DOUBLING_RADII = (0.5, 0.75, 1.0)


@dataclass
class GrowthReport:
    n: int
    A_n: float
    worst_ratio: float
    worst_k: int | None
    first_failure: int | None

    @property
    def passed(self) -> bool:
        return self.worst_ratio <= 1 + 1e-9


def growth_bound_check(series: PowerSeries, K: int | None = None) -> GrowthReport:
    """Worst ``|a_k| / (2^{n+2} n A_n k^{2n})`` over ``n < k <= K``."""
    n = vanishing_order(series)
    a = series.moduli
    K = series.K if K is None else min(K, series.K)
    A_n = float(np.max(a[1 : n + 1]))
    k = np.arange(n + 1, K + 1)
    if k.size == 0:
        return GrowthReport(n, A_n, 0.0, None, None)
    # float k^{2n} is fine up to k ~ 1e4 for the n we care about
    ratio = a[n + 1 : K + 1] / (2.0 ** (n + 2) * n * A_n * k.astype(float) ** (2 * n))
    i = int(np.argmax(ratio))
    bad = np.nonzero(ratio > 1 + 1e-9)[0]
    return GrowthReport(n, A_n, float(ratio[i]), int(k[i]), int(k[bad[0]]) if bad.size else None)


def _log_weights(series: PowerSeries, r: float):
    a = series.moduli
    k = np.arange(a.size)
    live = a > 0
    live[0] = False
    if not np.any(live):
        raise ZeroDivisionError("zero series has no frequency")
    lw = 2 * np.log(a[live]) + 2 * k[live] * np.log(r)
    return k[live], np.exp(lw - lw.max())


def frequency(series: PowerSeries, r: float) -> float:
    """``beta(r) = sum k a_k^2 r^{2k} / sum a_k^2 r^{2k}``.

    Evaluated in log space so that fast-growing coefficients do not
    overflow. Only the constant term is excluded (it carries ``u(0)``).
    """
    if not 0 < r < 1:
        raise ValueError("need 0 < r < 1")
    k, w = _log_weights(series, r)
    return float(np.dot(k, w) / w.sum())


def _circle_sup(series: PowerSeries, rho: float, m: int = DOUBLING_ANGLES) -> float:
    th = 2 * np.pi * np.arange(m) / m
    z = np.concatenate([f * rho * np.exp(1j * th) for f in DOUBLING_RADII])
    return float(np.max(np.abs(series.value(z).real)))


def doubling_index(series: PowerSeries, r: float) -> float:
    """``log2(sup_{B_2r} |u| / sup_{B_r} |u|)`` from sampled circles."""
    if 2 * r > series.safe_radius:
        raise ValueError("2r exceeds the safe evaluation radius")
    return float(np.log2(_circle_sup(series, 2 * r) / _circle_sup(series, r)))


def tail_radius(series: PowerSeries, N: int, r_max: float = 0.5, iters: int = 80) -> float:
    """Largest ``r <= r_max`` with ``sum_{k>=N} k a_k^2 r^{2(k-N+1)} <= A_{N-1}^2``.

    ``A_{N-1} = max_{1<=l<=N-1} |a_l|``. The left side increases with ``r``,
    so plain bisection suffices.
    """
    if N < 2:
        raise ValueError("N must be >= 2")
    a = series.moduli
    if series.K < N:
        return r_max
    A = float(np.max(a[1:N]))
    k = np.arange(N, series.K + 1)
    tail = k * a[N:] ** 2
    if not np.any(tail):
        return r_max

    def lhs(r):
        return float(np.sum(tail * r ** (2.0 * (k - N + 1))))

    if lhs(r_max) <= A * A:
        return r_max
    if A == 0:
        return 0.0
    lo, hi = 0.0, r_max
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if lhs(mid) <= A * A:
            lo = mid
        else:
            hi = mid
    return lo


@dataclass
class AreaReport:
    r0: float
    positive: float
    negative: float
    resolution: int

    @property
    def ratio(self) -> float:
        return self.positive / self.negative if self.negative > 0 else float("inf")

    @property
    def min_fraction(self) -> float:
        """``min(area+, area-) / (pi r0^2)``: the empirical constant for this function."""
        return min(self.positive, self.negative) / (np.pi * self.r0**2)

    def to_dict(self):
        d = asdict(self)
        d.update(ratio=self.ratio, min_fraction=self.min_fraction)
        return d


def _midpoint_grid(r0: float, resolution: int):
    h = 2 * r0 / resolution
    x = -r0 + h * (np.arange(resolution) + 0.5)
    return x, h


def area_ratio(series, r0: float, resolution: int = 512, chunk: int = 64) -> AreaReport:
    """Midpoint-rule areas of ``{u > 0}`` and ``{u < 0}`` inside ``B_{r0}``."""
    if resolution < 64:
        raise ValueError("resolution must be at least 64")
    if r0 > series.safe_radius:
        raise ValueError("r0 exceeds the safe evaluation radius")
    x, h = _midpoint_grid(r0, resolution)
    pos = neg = 0
    for i in range(0, resolution, chunk):
        Z = x[None, :] + 1j * x[i : i + chunk, None]
        Z = Z[np.abs(Z) < r0]
        u = series.value(Z).real
        pos += int(np.count_nonzero(u > 0))
        neg += int(np.count_nonzero(u < 0))
    return AreaReport(r0, pos * h * h, neg * h * h, resolution)


@dataclass
class SpectralReport:
    n: int
    growth: GrowthReport
    radii: list
    betas: list
    doubling: list = field(default_factory=list)
    tail_N: int | None = None
    tail_r: float | None = None

    @property
    def beta_monotone(self) -> bool:
        return bool(np.all(np.diff(self.betas) >= -1e-12))

    def to_dict(self):
        d = asdict(self)
        d["growth"]["passed"] = self.growth.passed
        d["beta_monotone"] = self.beta_monotone
        return d


def spectral_report(series: PowerSeries, N: int | None = None, radii=None) -> SpectralReport:
    g = growth_bound_check(series)
    if radii is None:
        radii = np.linspace(0.01, 0.95, 32)
    radii = [float(r) for r in radii]
    betas = [frequency(series, r) for r in radii]
    doubling = [doubling_index(series, r) for r in radii if 2 * r <= series.safe_radius]
    rep = SpectralReport(g.n, g, radii, betas, doubling)
    if N is not None:
        rep.tail_N = N
        rep.tail_r = tail_radius(series, N)
    return rep
