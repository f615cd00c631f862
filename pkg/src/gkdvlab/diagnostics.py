"""Distances between solutions, growth-law fits, peak tracking, size-estimate checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.signal import find_peaks

from .spectral import GridMismatchError, RealField, sobolev_norms

NORM_KEYS = ("H0", "H1", "H2", "Linf")
CSV_COLUMNS = ("t", "H0", "H1", "H2", "Linf", "mass", "momentum", "peak_x", "peak_val")


class InsufficientSamplesError(ValueError):
    pass


@dataclass(frozen=True)
class DiagnosticsSample:
    """Norms, invariants and peak of one field (or field difference) at time t."""

    t: float
    H0: float
    H1: float
    H2: float
    Linf: float
    mass: float
    momentum: float
    peak_x: float
    peak_val: float

    @property
    def norms(self) -> dict[str, float]:
        return {k: getattr(self, k) for k in NORM_KEYS}

    def row(self) -> tuple[float, ...]:
        return tuple(getattr(self, k) for k in CSV_COLUMNS)


def refine_peak(x: np.ndarray, values: np.ndarray, dx: float) -> tuple[float, float]:
    """Global max refined by a parabola through the argmax and its periodic neighbours."""
    n = len(values)
    i = int(np.argmax(values))
    ym, y0, yp = values[(i - 1) % n], values[i], values[(i + 1) % n]
    denom = ym - 2.0 * y0 + yp
    if denom >= 0:
        return float(x[i]), float(y0)
    off = 0.5 * (ym - yp) / denom
    return float(x[i] + off * dx), float(y0 - 0.25 * (ym - yp) * off)


def sample(field: RealField, t: float = 0.0) -> DiagnosticsSample:
    grid = field.grid
    v = field.values
    h0, h1, h2 = sobolev_norms(v, grid, 2)
    px, pv = refine_peak(grid.x, v, grid.dx)
    return DiagnosticsSample(
        t=float(t), H0=h0, H1=h1, H2=h2,
        Linf=float(np.max(np.abs(v))),
        mass=float(np.sum(v) * grid.dx),
        momentum=float(np.sum(v * v) * grid.dx),
        peak_x=px, peak_val=pv,
    )


def distance(u: RealField, U: RealField, t: float = 0.0) -> DiagnosticsSample:
    """All diagnostics of Delta = u - U."""
    if u.grid != U.grid:
        raise GridMismatchError("distance between fields on different grids")
    return sample(u - U, t)


@dataclass
class GrowthFit:
    slope: dict[str, float]
    intercept: dict[str, float]
    r2: dict[str, float]
    window: tuple[float, float]


@dataclass
class DistanceSeries:
    samples: list[DiagnosticsSample]
    fit: GrowthFit | None = None

    def __post_init__(self) -> None:
        ts = [s.t for s in self.samples]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("samples must be strictly increasing in t")

    @property
    def t(self) -> np.ndarray:
        return np.array([s.t for s in self.samples])

    def column(self, key: str) -> np.ndarray:
        return np.array([getattr(s, key) for s in self.samples])


def fit_linear_growth(
    series: DistanceSeries,
    window: tuple[float, float] | None = None,
    keys: Sequence[str] = NORM_KEYS,
) -> GrowthFit:
    """Least-squares line per norm over ``window`` (default: first half of the run)."""
    t = series.t
    if window is None:
        window = (float(t[0]), float(t[0] + 0.5 * (t[-1] - t[0])))
    sel = (t >= window[0] - 1e-12) & (t <= window[1] + 1e-12)
    if sel.sum() < 10:
        raise InsufficientSamplesError(f"need >= 10 samples in window {window}, have {int(sel.sum())}")
    tw = t[sel]
    slope, intercept, r2 = {}, {}, {}
    for key in keys:
        y = series.column(key)[sel]
        A = np.vstack([tw, np.ones_like(tw)]).T
        (m, b), *_ = np.linalg.lstsq(A, y, rcond=None)
        ss_res = float(np.sum((y - (m * tw + b)) ** 2))
        ss_tot = float(np.sum((y - y.mean()) ** 2))
        slope[key], intercept[key] = float(m), float(b)
        r2[key] = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    fit = GrowthFit(slope, intercept, r2, (float(window[0]), float(window[1])))
    series.fit = fit
    return fit


def track_peak(snapshots: Iterable[tuple[float, RealField]]) -> list[tuple[float, float, float]]:
    out = []
    for t, f in snapshots:
        px, pv = refine_peak(f.grid.x, f.values, f.grid.dx)
        out.append((float(t), px, pv))
    return out


def unwrap_positions(t: np.ndarray, x: np.ndarray, length: float) -> np.ndarray:
    """Remove periodic jumps from a peak trajectory."""
    return np.unwrap(np.asarray(x) * (2 * np.pi / length)) * (length / (2 * np.pi))


def trajectory_slope(track: Sequence[tuple[float, float, float]], length: float | None = None) -> float:
    t = np.array([p[0] for p in track])
    x = np.array([p[1] for p in track])
    if length is not None:
        x = unwrap_positions(t, x, length)
    return float(np.polyfit(t, x, 1)[0])


def local_extrema(y: np.ndarray, order: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Indices of strict interior local maxima and minima (plateau-aware, width ``order``)."""
    y = np.asarray(y, dtype=float)
    maxima, minima = [], []
    for i in range(order, len(y) - order):
        left, right = y[i - order:i], y[i + 1:i + 1 + order]
        if y[i] > left.max() and y[i] >= right.max():
            maxima.append(i)
        elif y[i] < left.min() and y[i] <= right.min():
            minima.append(i)
    return np.array(maxima, dtype=int), np.array(minima, dtype=int)


def max_then_min(t: np.ndarray, y: np.ndarray, order: int = 3, rel_depth: float = 0.01):
    """First interior (max, min) pair where the min dips at least ``rel_depth`` below the max.

    Returns ``(t_max, t_min)`` or None.
    """
    maxima, minima = local_extrema(y, order)
    for i in maxima:
        later = minima[minima > i]
        for j in later:
            if y[j] < (1.0 - rel_depth) * y[i]:
                return float(t[i]), float(t[j])
    return None


@dataclass
class SizeEstimateReport:
    passed: bool
    s: int
    bound: float
    lifespan: float
    max_ratio: float
    first_violation: float | None = None
    checked_until: float = 0.0
    notes: list[str] = field(default_factory=list)


def size_estimate_monitor(
    samples: Sequence[DiagnosticsSample],
    s: int,
    U0_norm: float,
    lifespan: float,
) -> SizeEstimateReport:
    """Check ||U(t)||_{H^s} <= 2 ||U0||_{H^s} for every sample with t <= lifespan."""
    key = f"H{s}"
    bound = 2.0 * U0_norm
    inside = [smp for smp in samples if smp.t <= lifespan + 1e-12]
    report = SizeEstimateReport(True, s, bound, lifespan, 0.0)
    if not inside:
        report.notes.append("no samples inside the lifespan")
        return report
    if inside[-1].t < lifespan - 1e-9:
        report.notes.append(f"samples stop at t={inside[-1].t:.6g} before the lifespan {lifespan:.6g}")
    report.checked_until = inside[-1].t
    for smp in inside:
        val = getattr(smp, key)
        report.max_ratio = max(report.max_ratio, val / U0_norm if U0_norm else np.inf)
        if val > bound and report.passed:
            report.passed = False
            report.first_violation = smp.t
    return report


def peak_separation(x: np.ndarray, values: np.ndarray, rel_height: float = 0.2) -> float:
    """Distance between the two highest local maxima above ``rel_height * max``; 0 once merged."""
    peaks, _ = find_peaks(values, height=rel_height * float(np.max(values)))
    if len(peaks) < 2:
        return 0.0
    top = peaks[np.argsort(values[peaks])[::-1][:2]]
    return float(abs(x[top[0]] - x[top[1]]))


def collision_time(times: Sequence[float], fields: Sequence[np.ndarray], x: np.ndarray,
                   rel_height: float = 0.2) -> tuple[float, np.ndarray]:
    """Instant of closest approach (or merger) of the two dominant peaks.

    Returns the collision time and the separation series. Ties, such as a
    stretch where the peaks are merged, resolve to the midpoint.
    """
    sep = np.array([peak_separation(x, f, rel_height) for f in fields])
    t = np.asarray(times, dtype=float)
    at_min = np.flatnonzero(sep <= sep.min() + 1e-12)
    return float(0.5 * (t[at_min[0]] + t[at_min[-1]])), sep
