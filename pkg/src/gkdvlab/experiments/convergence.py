"""Observed temporal and spatial convergence of a scenario's primary run."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..initial_data import soliton
from ..integrator import SolverRun, run
from ..spectral import Grid
from .config import Scenario
from .scenario import resolve_dt


@dataclass
class ConvergenceReport:
    dts: list[float]
    time_errors: list[float]  # |U_h - U_{h/2}|_inf for consecutive levels
    time_orders: list[float]
    Ns: list[int]
    space_errors: list[float]
    space_ratios: list[float]
    space_reference: str
    notes: list[str] = field(default_factory=list)

    @property
    def time_order(self) -> float:
        return self.time_orders[-1] if self.time_orders else math.nan


def _final(sc: Scenario, grid: Grid, dt: float, t_end: float) -> np.ndarray:
    U0 = sc.initial.build(grid)
    res = run(SolverRun(sc.model, U0, t_end, dt), sampler=lambda t, v: None)
    if res.status != "ok":
        raise RuntimeError(f"run blew up at t={res.last_valid_time} (dt={dt}, N={grid.n_points})")
    return res.final.values


def _order(e_coarse: float, e_fine: float, ratio: float = 2.0) -> float:
    if e_fine == 0 or e_coarse == 0:
        return math.nan
    return math.log(e_coarse / e_fine) / math.log(ratio)


def exact_solution_available(sc: Scenario) -> bool:
    """True when the initial datum is a travelling wave of the primary equation itself."""
    init = sc.initial
    if init.family == "zero" or init.solitons or sc.nu != 1.0 or not sc.model.nonlinearity.is_monomial:
        return False
    k = sc.model.nonlinearity.degree
    if sc.model.nonlinearity.coeffs[-1] != 1.0:
        return False
    return (init.family, init.k) in (("kdv", 1), ("mkdv", 2), ("gkdv", k)) and init.k == k


def convergence_report(
    sc: Scenario,
    dts: Sequence[float] | None = None,
    Ns: Sequence[int] | None = None,
    t_end: float | None = None,
) -> ConvergenceReport:
    """Richardson-style observed orders.

    Time: three or more step sizes on the scenario grid; the order is
    ``log2(|U_h - U_{h/2}| / |U_{h/2} - U_{h/4}|)``.
    Space: grids of increasing N at the finest step; errors are measured
    against the exact travelling wave when the datum is one, otherwise
    against the finest grid (sampled on the coarse points).
    """
    t_end = sc.t_end if t_end is None else t_end
    h = resolve_dt(sc)
    dts = list(dts) if dts is not None else [h, h / 2, h / 4]
    Ns = list(Ns) if Ns is not None else [sc.N // 4, sc.N // 2, sc.N]
    if len(dts) < 3 or len(Ns) < 3:
        raise ValueError("need at least three refinement levels")
    notes = []

    grid = sc.grid
    sols = [_final(sc, grid, dt, t_end) for dt in dts]
    t_err = [float(np.max(np.abs(a - b))) for a, b in zip(sols, sols[1:])]
    t_ord = [_order(a, b, dts[i] / dts[i + 1]) for i, (a, b) in enumerate(zip(t_err, t_err[1:]))]

    dt_fine = min(dts)
    fields = {N: _final(sc, Grid(sc.L, N), dt_fine, t_end) for N in Ns}
    if exact_solution_available(sc):
        ref_label = "exact travelling wave"
        p = sc.initial.params()
        errs = [float(np.max(np.abs(fields[N] - soliton(p, Grid(sc.L, N), t_end, check=False).values))) for N in Ns]
    else:
        ref_label = f"finest grid N={max(Ns)}"
        finest = max(Ns)
        errs = []
        for N in Ns:
            if N == finest:
                continue
            if finest % N:
                raise ValueError("grid levels must nest (finest N divisible by each level)")
            errs.append(float(np.max(np.abs(fields[N] - fields[finest][:: finest // N]))))
        notes.append("spatial errors relative to the finest level")
    ratios = [a / b if b > 0 else (math.nan if a == 0 else math.inf) for a, b in zip(errs, errs[1:])]
    return ConvergenceReport(list(dts), t_err, t_ord, list(Ns), errs, ratios, ref_label, notes)
