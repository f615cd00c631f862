"""Search for the rescaling factor nu that best aligns a rescaled KdV soliton with a gKdV run."""

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.optimize import minimize_scalar

from .. import __version__
from ..diagnostics import NORM_KEYS, DistanceSeries, max_then_min, sample, trajectory_slope
from ..initial_data import SolitonParams, soliton
from ..integrator import SolverRun, iterate
from ..models import BlowUpError, ModelSpec
from ..spectral import RealField
from . import io
from .config import ConfigError, Scenario, config_hash
from .scenario import resolve_dt

log = logging.getLogger(__name__)


@dataclass
class SweepResult:
    nu_star: float
    objective_star: float
    curve: np.ndarray  # columns: nu, objective (nan where excluded)
    excluded: list[float]
    window: tuple[float, float]
    distance: DistanceSeries  # against the rescaled soliton at nu_star, whole run
    pattern: tuple[float, float] | None
    primary_peak_speed: float
    wall_time: float


def _time_average(t: np.ndarray, y: np.ndarray, window: tuple[float, float]) -> float:
    sel = (t >= window[0] - 1e-12) & (t <= window[1] + 1e-12)
    tw, yw = t[sel], y[sel]
    if len(tw) < 2:
        raise ConfigError("sweep window holds fewer than two samples")
    return float(np.trapezoid(yw, tw) / (tw[-1] - tw[0]))


class _Objective:
    """Time-averaged L2 distance between the stored gKdV run and the reference at nu."""

    def __init__(self, sc: Scenario, t: np.ndarray, fields: np.ndarray, window, dt: float, threads: int):
        self.sc, self.t, self.fields, self.window, self.dt = sc, t, fields, window, dt
        self.grid = sc.grid
        self.mode = sc.sweep.reference
        self.threads = threads
        init = sc.initial
        if init.solitons:
            raise ConfigError("nu sweep needs a single-soliton initial datum")
        self.c, self.x0 = float(init.c), float(init.x0)
        self.cache: dict[float, float] = {}

    def reference_fields(self, nu: float) -> np.ndarray:
        if self.mode == "analytic":
            p = SolitonParams(c=self.c, x0=self.x0, family="rescaled_kdv", nu=nu)
            return np.array([soliton(p, self.grid, t, check=False).values for t in self.t])
        model = ModelSpec.rescaled_kdv(nu)
        U0 = RealField(self.grid, self.fields[0])
        spec = SolverRun(model, U0, float(self.t[-1]), self.dt, (), self.sc.stride_for(self.dt))
        return np.array([v for _, _, v in iterate(spec)])

    def l2_series(self, nu: float) -> np.ndarray:
        ref = self.reference_fields(nu)
        n = min(len(ref), len(self.fields))
        diff = ref[:n] - self.fields[:n]
        return np.sqrt(np.sum(diff * diff, axis=1) * self.grid.dx)

    def __call__(self, nu: float) -> float:
        nu = float(nu)
        if nu not in self.cache:
            try:
                self.cache[nu] = _time_average(self.t, self.l2_series(nu), self.window)
            except BlowUpError:
                log.warning("reference blew up at nu=%g; excluded", nu)
                self.cache[nu] = np.nan
        return self.cache[nu]

    def evaluate_many(self, nus) -> list[float]:
        if self.threads > 1 and self.mode == "simulated":
            with ThreadPoolExecutor(max_workers=self.threads) as pool:
                return list(pool.map(self, nus))
        return [self(nu) for nu in nus]


def sweep_nu(sc: Scenario, threads: int = 1) -> SweepResult:
    """Grid scan over [nu_min, nu_max] followed by bounded Brent refinement to ``tol``."""
    if sc.sweep is None:
        raise ConfigError("scenario has no [sweep] table")
    t0 = time.perf_counter()
    spec = sc.sweep
    window = spec.window or (0.0, sc.t_end)
    U0 = sc.initial_field()
    dt = resolve_dt(sc, U0)
    run_spec = SolverRun(sc.model, U0, sc.t_end, dt, (), sc.stride_for(dt))
    times, fields = [], []
    try:
        for _, t, v in iterate(run_spec):
            times.append(t)
            fields.append(v)
    except BlowUpError as exc:
        raise RuntimeError(f"primary gKdV run blew up at t={exc.t}; nothing to sweep") from exc
    t = np.array(times)
    F = np.array(fields)

    obj = _Objective(sc, t, F, window, dt, threads)
    n = int(round((spec.nu_max - spec.nu_min) / spec.step)) + 1
    grid_nu = np.linspace(spec.nu_min, spec.nu_max, n)
    values = np.array(obj.evaluate_many(grid_nu), dtype=float)
    excluded = [float(nu) for nu, v in zip(grid_nu, values) if not np.isfinite(v)]
    if np.all(~np.isfinite(values)):
        raise RuntimeError("every nu in the sweep was excluded")
    j = int(np.nanargmin(values))
    lo = grid_nu[max(j - 1, 0)]
    hi = grid_nu[min(j + 1, n - 1)]
    nu_star, f_star = float(grid_nu[j]), float(values[j])
    if hi > lo:
        res = minimize_scalar(obj, bounds=(lo, hi), method="bounded", options={"xatol": spec.tol})
        if np.isfinite(res.fun) and res.fun <= f_star:
            nu_star, f_star = float(res.x), float(res.fun)

    # distance series against the optimal rescaled soliton over the whole run
    ref = obj.reference_fields(nu_star)
    m = min(len(ref), len(F))
    samples = [sample(RealField(sc.grid, ref[i] - F[i]), t[i]) for i in range(m)]
    dist = DistanceSeries(samples)
    pattern = max_then_min(dist.t, dist.column("H0"))
    track = [(s.t, s.peak_x, s.peak_val) for s in (sample(RealField(sc.grid, f), ti) for ti, f in zip(t, F))]
    speed = trajectory_slope(track, sc.grid.length)
    curve = np.array(sorted(list(zip(grid_nu, values)) + [
        (k, v) for k, v in obj.cache.items() if k not in set(grid_nu.tolist())
    ]))
    return SweepResult(nu_star, f_star, curve, excluded, window, dist, pattern, speed,
                       time.perf_counter() - t0)


def write_sweep_artifacts(sc: Scenario, res: SweepResult, out_dir: str | Path) -> Path:
    from .. import plotting

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    io.write_table(out / "sweep.csv", ("nu", "objective"), res.curve)
    io.write_diagnostics_csv(out / "distance_nu_star.csv", res.distance.samples)
    if sc.plots:
        finite = np.isfinite(res.curve[:, 1])
        plotting.plot_sweep(out / "sweep.svg", res.curve[finite, 0], res.curve[finite, 1], res.nu_star)
        cols = {k: res.distance.column(k) for k in NORM_KEYS}
        plotting.plot_norms(out / "distance_nu_star.svg", res.distance.t, cols,
                            title=f"{sc.name}: nu* = {res.nu_star:.3f}")
    resolved = sc.resolved()
    io.write_json(out / "metadata.json", {
        "config": resolved,
        "config_hash": config_hash(resolved),
        "version": __version__,
        "nu_star": res.nu_star,
        "objective_star": res.objective_star,
        "objective": "time-averaged L2 distance to the rescaled KdV soliton",
        "window": list(res.window),
        "excluded_nu": res.excluded,
        "max_then_min_H0": None if res.pattern is None else list(res.pattern),
        "primary_peak_speed": res.primary_peak_speed,
        "wall_clock_seconds": res.wall_time,
    })
    return out
