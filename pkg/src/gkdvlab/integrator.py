"""
Integrating-factor RK4 time stepping.

The dispersive term is propagated exactly in Fourier space: with
``w = exp(-i nu xi^3 t) U_hat`` the system ``w_t = exp(-i nu xi^3 t) N(U)``
has no stiff part and classical RK4 is applied to it (Lawson's scheme).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

import numpy as np

from .models import BLOWUP_THRESHOLD, BlowUpError, ModelSpec
from .spectral import Grid, RealField

log = logging.getLogger(__name__)


class TimeStepper:
    """Caches the half- and full-step linear propagators for one (grid, model, dt)."""

    def __init__(self, grid: Grid, model: ModelSpec, dt: float):
        if dt == 0 or not np.isfinite(dt):
            raise ValueError(f"time step must be finite and nonzero, got {dt}")
        self.grid = grid
        self.model = model
        self.dt = float(dt)
        lin = model.linear_symbol(grid.xi_r)
        self.half = np.exp(0.5 * self.dt * lin)
        self.full = self.half * self.half

    def advance_hat(self, uh: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """One step on rfft coefficients; also returns physical U at the step start."""
        dt, E, E2, grid = self.dt, self.half, self.full, self.grid
        nl = self.model.nonlinear_hat
        k1, u0 = nl(uh, grid)
        k2, _ = nl(E * (uh + 0.5 * dt * k1), grid)
        k3, _ = nl(E * uh + 0.5 * dt * k2, grid)
        k4, _ = nl(E2 * uh + dt * E * k3, grid)
        return E2 * uh + (dt / 6.0) * (E2 * k1 + 2.0 * E * (k2 + k3) + k4), u0


def step(stepper: TimeStepper, model: ModelSpec, U: RealField, t: float = 0.0) -> RealField:
    """Advance ``U`` by one step. ``t`` is unused: the equation is autonomous."""
    if model != stepper.model or U.grid != stepper.grid:
        stepper = TimeStepper(U.grid, model, stepper.dt)
    with np.errstate(over="ignore", invalid="ignore"):
        uh, _ = stepper.advance_hat(np.fft.rfft(U.values))
        vals = np.fft.irfft(uh, n=U.grid.n_points)
    if not np.all(np.isfinite(vals)) or np.max(np.abs(vals)) > BLOWUP_THRESHOLD:
        raise BlowUpError("field blew up during step", t=t)
    return RealField(U.grid, vals)


def default_dt(model: ModelSpec, U0: RealField, cfl: float = 0.5, dt_max: float = 0.05) -> float:
    """Nonlinear CFL heuristic nu_nl * xi_eff * dt * max|F(U0)| <= cfl, capped at dt_max."""
    grid = U0.grid
    xi_eff = grid.xi_max * 2.0 / 3.0
    speed = float(np.max(np.abs(model.nonlinearity.F(U0.values))))
    if speed == 0:
        return dt_max
    return min(dt_max, cfl / (model.nu_nl * xi_eff * speed))


@dataclass
class SolverRun:
    model: ModelSpec
    initial: RealField
    t_end: float
    dt: float
    snapshot_times: Sequence[float] = ()
    diagnostics_stride: int = 1

    def __post_init__(self) -> None:
        if self.t_end < 0:
            raise ValueError("t_end must be non-negative")
        if self.diagnostics_stride < 1:
            raise ValueError("diagnostics_stride must be a positive integer")
        times = sorted(float(s) for s in self.snapshot_times)
        if times and (times[0] < 0 or times[-1] > self.t_end + 1e-12):
            raise ValueError("snapshot times must lie in [0, t_end]")
        self.snapshot_times = times

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / abs(self.dt)))


@dataclass
class RunResult:
    times: np.ndarray
    snapshots: list[tuple[float, RealField]]
    samples: list = field(default_factory=list)
    status: str = "ok"
    last_valid_time: float = 0.0
    final: RealField | None = None


def schedule(spec: SolverRun) -> tuple[float, int, set[int], set[int]]:
    """Actual step size, step count, and the step indices that are sampled / snapshotted.

    The step count is ``round(t_end / dt)`` and the step is adjusted so the
    run ends exactly at ``t_end``.
    """
    n = spec.n_steps
    dt = spec.t_end / n if n else spec.dt
    diag = set(range(0, n + 1, spec.diagnostics_stride)) | {n}
    snaps = {int(round(ts / dt)) if n else 0 for ts in spec.snapshot_times}
    return dt, n, diag, snaps


def iterate(spec: SolverRun) -> Iterator[tuple[int, float, np.ndarray]]:
    """Yield ``(step, t, values)`` at every diagnostic and snapshot step.

    ``values`` is a fresh array owned by the caller. Raises
    :class:`BlowUpError` (with ``t`` set to the last valid time) when the
    field stops being finite or exceeds the blow-up threshold. Finiteness is
    checked every step; the amplitude threshold on yielded steps and every
    64th step.
    """
    grid = spec.initial.grid
    dt, n, diag, snaps = schedule(spec)
    keep = diag | snaps
    stepper = TimeStepper(grid, spec.model, dt)
    uh = np.fft.rfft(spec.initial.values)
    yield 0, 0.0, spec.initial.values.copy()
    t_prev = 0.0
    for i in range(1, n + 1):
        # errstate is scoped per step: the generator may be resumed from another thread
        with np.errstate(over="ignore", invalid="ignore"):
            uh, _ = stepper.advance_hat(uh)
            check = i in keep or i % 64 == 0
            values = np.fft.irfft(uh, n=grid.n_points) if check else None
            finite = np.isfinite(uh.real.sum())
        t = i * dt
        if check:
            peak = np.max(np.abs(values))
            if not np.isfinite(peak) or peak > BLOWUP_THRESHOLD:
                raise BlowUpError(f"blow-up detected by t={t:.6g}", t=t_prev)
            t_prev = t
            if i in keep:
                yield i, t, values
        elif not finite:
            raise BlowUpError(f"blow-up detected by t={t:.6g}", t=t_prev)


def run(
    spec: SolverRun,
    sampler: Callable[[float, np.ndarray], object] | None = None,
) -> RunResult:
    """Integrate ``spec`` from 0 to ``t_end``.

    ``sampler(t, values)`` is called every ``diagnostics_stride`` steps and at
    the final step; its return values are collected in ``RunResult.samples``.
    The default sampler records :func:`gkdvlab.diagnostics.sample`.
    Snapshots are taken at the nearest completed step and stored with that
    step's time. On blow-up the partial outputs are kept and ``status`` is
    ``"blow-up"``.
    """
    grid = spec.initial.grid
    if sampler is None:
        from .diagnostics import sample as _default

        def sampler(t, values):
            return _default(RealField(grid, values), t)

    dt, n, diag, snaps = schedule(spec)
    result = RunResult(times=dt * np.arange(n + 1), snapshots=[])
    values = None
    try:
        for i, t, values in iterate(spec):
            if i in snaps:
                result.snapshots.append((t, RealField(grid, values)))
            if i in diag:
                result.samples.append(sampler(t, values))
            result.last_valid_time = t
    except BlowUpError as exc:
        result.status = "blow-up"
        result.last_valid_time = exc.t
        log.warning("%s (last valid t=%.6g)", exc, exc.t)
    if values is not None:
        result.final = RealField(grid, values)
    return result
