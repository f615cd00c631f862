"""Paired runs (gKdV against a reference solution) and their artifact bundle."""

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .. import __version__
from ..bounds import BoundReport, bound_report, size_lifespan
from ..diagnostics import (
    NORM_KEYS,
    DiagnosticsSample,
    DistanceSeries,
    GrowthFit,
    InsufficientSamplesError,
    SizeEstimateReport,
    collision_time,
    fit_linear_growth,
    local_extrema,
    max_then_min,
    sample,
    size_estimate_monitor,
    trajectory_slope,
)
from ..initial_data import SolitonParams, soliton
from ..integrator import SolverRun, default_dt, iterate, schedule
from ..models import BlowUpError
from ..spectral import Grid, RealField, sobolev_norm
from .config import ConfigError, Scenario, config_hash
from . import io

log = logging.getLogger(__name__)

MAX_CONTOUR_X = 1024
MAX_CONTOUR_T = 600


@dataclass
class SeriesBundle:
    """Everything sampled during one paired run."""

    t: list[float] = field(default_factory=list)
    primary: list[DiagnosticsSample] = field(default_factory=list)
    reference: list[DiagnosticsSample] = field(default_factory=list)
    distance: list[DiagnosticsSample] = field(default_factory=list)
    # full fields are kept on a thinned time axis (field_t) to bound memory
    field_t: list[float] = field(default_factory=list)
    primary_fields: list[np.ndarray] = field(default_factory=list)
    reference_fields: list[np.ndarray] = field(default_factory=list)
    snapshots: list[tuple[float, np.ndarray, np.ndarray | None]] = field(default_factory=list)


@dataclass
class ScenarioResult:
    scenario: Scenario
    dt: float
    status: str
    last_valid_time: float
    series: SeriesBundle
    distance: DistanceSeries | None
    fit: GrowthFit | None
    bounds: BoundReport
    size_report: SizeEstimateReport
    analysis: dict
    wall_time: float
    out_dir: Path | None = None

    @property
    def t(self) -> np.ndarray:
        return np.asarray(self.series.t)

    def column(self, key: str, which: str = "distance") -> np.ndarray:
        return np.array([getattr(s, key) for s in getattr(self.series, which)])


def reference_params(sc: Scenario) -> SolitonParams:
    """Closed-form reference soliton; defaults to the initial soliton's parameters."""
    ref, init = sc.reference, sc.initial
    if init.solitons and ref.c is None:
        raise ConfigError("analytic reference needs a single soliton (set reference.c)")
    family = ref.family or init.family
    k = ref.k if ref.k is not None else {"kdv": 1, "mkdv": 2}.get(family, init.k)
    return SolitonParams(
        c=float(ref.c if ref.c is not None else init.c),
        x0=float(ref.x0 if ref.x0 is not None else init.x0),
        family=family,
        k=int(k),
        nu=ref.nu,
    )


def resolve_dt(sc: Scenario, U0: RealField | None = None) -> float:
    if sc.dt is not None:
        return sc.dt
    U0 = sc.initial_field() if U0 is None else U0
    return default_dt(sc.model, U0)


def _paired_stream(sc: Scenario, U0: RealField, dt: float, threads: int):
    """Yield (step, t, primary, reference-or-None); reference from a second run or a closed form."""
    grid = U0.grid
    prim_spec = SolverRun(sc.model, U0, sc.t_end, dt, sc.snapshots, sc.stride_for(dt))
    prim = iterate(prim_spec)
    mode = sc.reference.mode
    if mode == "simulated":
        ref_spec = SolverRun(sc.reference.model(), U0, sc.t_end, dt, sc.snapshots, sc.stride_for(dt))
        ref = iterate(ref_spec)
        if threads > 1:
            # one worker per run so each generator always resumes on the same thread
            with ThreadPoolExecutor(max_workers=1) as wp, ThreadPoolExecutor(max_workers=1) as wr:
                while True:
                    fp, fr = wp.submit(next, prim, None), wr.submit(next, ref, None)
                    a, b = fp.result(), fr.result()
                    if a is None or b is None:
                        return
                    yield a[0], a[1], a[2], b[2]
        else:
            for (i, t, u), (_, _, r) in zip(prim, ref):
                yield i, t, u, r
    elif mode == "analytic":
        p = reference_params(sc)
        for i, t, u in prim:
            yield i, t, u, soliton(p, grid, t, check=False).values
    else:
        for i, t, u in prim:
            yield i, t, u, None


def simulate(sc: Scenario, threads: int = 1) -> ScenarioResult:
    """Run the scenario in memory (no files written)."""
    t_start = time.perf_counter()
    grid = sc.grid
    U0 = sc.initial_field()
    dt = resolve_dt(sc, U0)
    _, _, diag_steps, snap_steps = schedule(SolverRun(sc.model, U0, sc.t_end, dt, sc.snapshots, sc.stride_for(dt)))
    bundle = SeriesBundle()
    field_every = max(1, -(-len(diag_steps) // MAX_CONTOUR_T))
    status, last_valid = "ok", 0.0
    try:
        for i, t, u, r in _paired_stream(sc, U0, dt, threads):
            if i in snap_steps:
                bundle.snapshots.append((t, u.copy(), None if r is None else r.copy()))
            if i not in diag_steps:
                continue
            keep_field = len(bundle.t) % field_every == 0
            bundle.t.append(t)
            bundle.primary.append(sample(RealField(grid, u), t))
            if keep_field:
                bundle.field_t.append(t)
                bundle.primary_fields.append(u)
            if r is not None:
                bundle.reference.append(sample(RealField(grid, r), t))
                bundle.distance.append(sample(RealField(grid, r - u), t))
                if keep_field:
                    bundle.reference_fields.append(r)
            last_valid = t
    except BlowUpError as exc:
        status, last_valid = "blow-up", exc.t if exc.t is not None else last_valid
        log.warning("scenario %s: %s", sc.name, exc)

    dist = DistanceSeries(bundle.distance) if bundle.distance else None
    fit = None
    if dist is not None:
        try:
            fit = fit_linear_growth(dist, sc.fit_window)
        except InsufficientSamplesError as exc:
            log.info("no growth fit: %s", exc)

    bounds, size_report = _bounds_and_size(sc, U0, bundle.primary, dt)
    analysis = _analyse(sc, grid, bundle, dist)
    res = ScenarioResult(
        scenario=sc, dt=dt, status=status, last_valid_time=last_valid, series=bundle,
        distance=dist, fit=fit, bounds=bounds, size_report=size_report,
        analysis=analysis, wall_time=time.perf_counter() - t_start,
    )
    return res


def _bounds_and_size(sc: Scenario, U0: RealField, primary: list[DiagnosticsSample], dt: float):
    nl = sc.model.nonlinearity
    norm_hs1 = sobolev_norm(U0, sc.bound_s + 1)
    # both equations start from the same datum
    bounds = bound_report(nl, norm_hs1, norm_hs1, epsilon=sobolev_norm(U0, 2), s=sc.bound_s, c_const=sc.c_sk)
    U0_size = sobolev_norm(U0, sc.size_s)
    lifespan = size_lifespan(U0_size, nl, sc.size_s, sc.c_sk) if U0_size > 0 else np.inf
    samples = primary
    horizon = min(lifespan, sc.t_end)
    spacing = (primary[1].t - primary[0].t) if len(primary) > 1 else np.inf
    if 0 < horizon < 10 * spacing and sc.size_s <= 2:
        # lifespan shorter than the sampling interval: resample it finely
        n_fine = 64
        spec = SolverRun(sc.model, U0, horizon, min(dt, horizon / n_fine), (), 1)
        samples = [sample(RealField(U0.grid, v), t) for _, t, v in _safe_iterate(spec)]
    report = size_estimate_monitor(samples, sc.size_s, U0_size, lifespan)
    return bounds, report


def _safe_iterate(spec: SolverRun):
    try:
        yield from iterate(spec)
    except BlowUpError:
        return


def _analyse(sc: Scenario, grid: Grid, bundle: SeriesBundle, dist: DistanceSeries | None) -> dict:
    """Peak trajectories, extremum pattern and collision timing."""
    out: dict = {}
    t = np.asarray(bundle.t)
    if len(t) < 2:
        return out
    track = [(s.t, s.peak_x, s.peak_val) for s in bundle.primary]
    out["primary_peak_speed"] = trajectory_slope(track, grid.length)
    if bundle.reference:
        rtrack = [(s.t, s.peak_x, s.peak_val) for s in bundle.reference]
        out["reference_peak_speed"] = trajectory_slope(rtrack, grid.length)
    if sc.reference.mode == "analytic":
        p = reference_params(sc)
        out["reference_caustic"] = {"x0": p.x0, "speed": p.speed}
    if dist is not None and len(t) >= 7:
        y = dist.column("H0")
        pair = max_then_min(t, y)
        out["max_then_min_H0"] = list(pair) if pair else None
        if len(t) >= 8:
            q = len(t) * 3 // 4
            tail = np.polyfit(t[q:], y[q:], 1)[0]
            out["final_quarter_slope_H0"] = float(tail)
    if sc.initial.solitons and len(sc.initial.solitons) >= 2 and bundle.reference_fields:
        tc, sep = collision_time(bundle.field_t, bundle.reference_fields, grid.x)
        out["collision_time"] = tc
        out["min_peak_separation"] = float(sep.min())
        if dist is not None:
            coll = {}
            for key in NORM_KEYS:
                _, minima = local_extrema(dist.column(key), 3)
                if len(minima):
                    nearest = t[minima[np.argmin(np.abs(t[minima] - tc))]]
                    coll[key] = float(nearest)
            out["distance_minimum_near_collision"] = coll
    return out


def metadata(res: ScenarioResult) -> dict:
    sc = res.scenario
    resolved = sc.resolved()
    resolved["time"]["dt"] = res.dt
    return {
        "config": resolved,
        "config_hash": config_hash(resolved),
        "version": __version__,
        "status": res.status,
        "last_valid_time": res.last_valid_time,
        "wall_clock_seconds": res.wall_time,
        "deterministic": True,
        "reference_mode": sc.reference.mode,
        "bounds": res.bounds.to_dict(),
        "size_estimate": vars(res.size_report),
        "growth_fit": None if res.fit is None else vars(res.fit),
        "analysis": res.analysis,
    }


def write_artifacts(res: ScenarioResult, out_dir: str | Path) -> Path:
    sc = res.scenario
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    grid = sc.grid
    b = res.series
    io.write_diagnostics_csv(out / "primary.csv", b.primary)
    if b.reference:
        io.write_diagnostics_csv(out / "reference.csv", b.reference)
    if b.distance:
        io.write_diagnostics_csv(out / "distance.csv", b.distance)
    if sc.write_snapshots and b.snapshots:
        ref_dir = out / "reference"
        for t, u, r in b.snapshots:
            io.write_snapshot(out, t, RealField(grid, u))
            if r is not None:
                ref_dir.mkdir(exist_ok=True)
                io.write_snapshot(ref_dir, t, RealField(grid, r))
    if sc.plots and len(b.t) > 1:
        _plots(res, out)
    res.out_dir = out
    io.write_json(out / "metadata.json", metadata(res))
    return out


def _plots(res: ScenarioResult, out: Path) -> None:
    from .. import plotting

    sc, b = res.scenario, res.series
    grid = sc.grid
    t = np.asarray(b.t)
    if b.distance:
        cols = {k: res.column(k) for k in NORM_KEYS}
        fits = None
        if res.fit is not None:
            fits = {k: (res.fit.slope[k], res.fit.intercept[k]) for k in NORM_KEYS}
        plotting.plot_norms(out / "distance_norms.svg", t, cols, title=sc.name, fits=fits)
    xs = max(1, grid.n_points // MAX_CONTOUR_X)
    U = np.array(b.primary_fields)[:, ::xs]
    track = [(s.t, s.peak_x) for s in b.primary]
    caustic = None
    if "reference_caustic" in res.analysis:
        rc = res.analysis["reference_caustic"]
        caustic = (rc["x0"], rc["speed"])
    xlim = _active_window(grid, np.array(b.primary_fields))
    plotting.plot_spacetime(out / "spacetime.svg", grid.x[::xs], np.asarray(b.field_t), U,
                            peak_track=track, caustic=caustic, xlim=xlim, title=sc.name)
    if b.snapshots:
        plotting.plot_profiles(out / "profiles.svg", grid.x, b.snapshots, xlim=xlim)


def _active_window(grid: Grid, fields: np.ndarray, frac: float = 1e-3) -> tuple[float, float]:
    env = np.max(np.abs(fields), axis=0)
    live = np.flatnonzero(env > frac * env.max()) if env.max() > 0 else np.array([0, grid.n_points - 1])
    pad = 10 * grid.dx
    return float(grid.x[live[0]] - pad), float(grid.x[live[-1]] + pad)


def run_scenario(sc: Scenario, out_dir: str | Path | None = None, threads: int = 1) -> ScenarioResult:
    """Simulate and write the artifact bundle (CSV, snapshots, SVG, metadata.json)."""
    res = simulate(sc, threads=threads)
    write_artifacts(res, out_dir if out_dir is not None else sc.out_dir)
    return res
