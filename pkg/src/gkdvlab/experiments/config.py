"""Scenario configuration: TOML files with [grid], [model], [initial], [time],
[reference], [diagnostics], [sweep] and [output] tables."""

from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from ..initial_data import SolitonParams, soliton, two_soliton_sum
from ..models import ModelSpec, PolynomialNonlinearity
from ..spectral import Grid, RealField


class ConfigError(ValueError):
    pass


@dataclass
class InitialSpec:
    family: str = "kdv"
    c: float | None = None
    x0: float = 0.0
    k: int = 1
    nu: float = 1.0
    solitons: list[tuple[float, float]] | None = None

    def params(self) -> SolitonParams:
        return SolitonParams(c=self.c, x0=self.x0, family=self.family, k=self.k, nu=self.nu)

    def build(self, grid: Grid) -> RealField:
        if self.family == "zero":
            return grid.zeros()
        if self.solitons:
            return two_soliton_sum(self.family, self.solitons, grid)
        return soliton(self.params(), grid)


@dataclass
class ReferenceSpec:
    """How the comparison solution is produced.

    ``mode`` is ``"analytic"`` (closed-form soliton of ``family``),
    ``"simulated"`` (second run with coefficients ``a`` and scale ``nu``) or
    ``"none"``.
    """

    mode: str = "none"
    a: list[float] | None = None
    nu: float = 1.0
    family: str | None = None
    c: float | None = None
    x0: float | None = None
    k: int | None = None

    def model(self) -> ModelSpec:
        if self.a is None:
            raise ConfigError("simulated reference needs coefficients 'a'")
        nl = PolynomialNonlinearity(tuple(self.a))
        return ModelSpec(nl, nu=self.nu, nu_nl=self.nu)


@dataclass
class SweepSpec:
    nu_min: float = 0.3
    nu_max: float = 1.0
    step: float = 0.02
    tol: float = 1e-3
    window: tuple[float, float] | None = None
    reference: str = "analytic"

    def __post_init__(self) -> None:
        if not 0 < self.nu_min < self.nu_max <= 1:
            raise ConfigError(f"need 0 < nu_min < nu_max <= 1, got [{self.nu_min}, {self.nu_max}]")


@dataclass
class Scenario:
    name: str
    L: float
    N: int
    a: list[float]
    nu: float
    initial: InitialSpec
    t_end: float
    dt: float | None
    snapshots: list[float]
    reference: ReferenceSpec
    stride: int = 1
    sample_every: float | None = None
    fit_window: tuple[float, float] | None = None
    size_s: int = 2
    bound_s: int = 1
    c_sk: float = 1.0
    sweep: SweepSpec | None = None
    out_dir: str = "out"
    plots: bool = True
    write_snapshots: bool = True
    raw: dict[str, Any] = field(default_factory=dict)

    @property
    def grid(self) -> Grid:
        return Grid(self.L, self.N)

    @property
    def model(self) -> ModelSpec:
        nl = PolynomialNonlinearity(tuple(self.a))
        return ModelSpec(nl, nu=self.nu, nu_nl=self.nu)

    def initial_field(self) -> RealField:
        return self.initial.build(self.grid)

    def stride_for(self, dt: float) -> int:
        """Steps between diagnostic samples; ``sample_every`` (time units) wins over ``stride``."""
        if self.sample_every is not None:
            return max(1, int(round(self.sample_every / dt)))
        return self.stride

    def resolved(self) -> dict[str, Any]:
        """Full configuration with defaults filled in, in the on-disk layout."""
        ref = {k: v for k, v in vars(self.reference).items() if v is not None}
        init = {k: v for k, v in vars(self.initial).items() if v is not None}
        if init.get("solitons"):
            init["solitons"] = [list(p) for p in init["solitons"]]
        out = {
            "name": self.name,
            "grid": {"L": self.L, "N": self.N},
            "model": {"a": list(self.a), "nu": self.nu},
            "initial": init,
            "time": {"t_end": self.t_end, "dt": self.dt, "snapshots": list(self.snapshots)},
            "reference": ref,
            "diagnostics": {
                "stride": self.stride,
                "size_s": self.size_s,
                "bound_s": self.bound_s,
                "c_sk": self.c_sk,
            },
            "output": {"dir": self.out_dir, "plots": self.plots, "snapshots": self.write_snapshots},
        }
        if self.sample_every is not None:
            out["diagnostics"]["sample_every"] = self.sample_every
        if self.fit_window is not None:
            out["diagnostics"]["fit_window"] = list(self.fit_window)
        if self.sweep is not None:
            sw = dict(vars(self.sweep))
            if sw["window"] is not None:
                sw["window"] = list(sw["window"])
            else:
                del sw["window"]
            out["sweep"] = sw
        return out


def config_hash(resolved: dict) -> str:
    """Git blob-style SHA-1 of the canonical JSON form of a resolved config."""
    body = json.dumps(resolved, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha1(b"blob %d\0" % len(body) + body).hexdigest()


def _pair(v, what):
    if v is None:
        return None
    if len(v) != 2:
        raise ConfigError(f"{what} must be a pair [start, end]")
    return (float(v[0]), float(v[1]))


def from_dict(d: dict[str, Any]) -> Scenario:
    d = copy.deepcopy(d)
    if "config" in d and "grid" not in d:
        # metadata.json produced by a previous run
        d = d["config"]
    try:
        grid = d["grid"]
        model = d["model"]
        init = d["initial"]
        tm = d["time"]
    except KeyError as exc:
        raise ConfigError(f"missing section [{exc.args[0]}]") from None
    ref = d.get("reference", {"mode": "none"})
    diag = d.get("diagnostics", {})
    out = d.get("output", {})

    solitons = init.get("solitons")
    initial = InitialSpec(
        family=init.get("family", "kdv"),
        c=init.get("c"),
        x0=float(init.get("x0", 0.0)),
        k=int(init.get("k", {"kdv": 1, "mkdv": 2}.get(init.get("family", "kdv"), 1))),
        nu=float(init.get("nu", 1.0)),
        solitons=[(float(c), float(x0)) for c, x0 in solitons] if solitons else None,
    )
    if initial.c is None and not initial.solitons and initial.family != "zero":
        raise ConfigError("[initial] needs either c or solitons")

    reference = ReferenceSpec(
        mode=ref.get("mode", "none"),
        a=ref.get("a"),
        nu=float(ref.get("nu", 1.0)),
        family=ref.get("family"),
        c=ref.get("c"),
        x0=ref.get("x0"),
        k=ref.get("k"),
    )
    if reference.mode not in ("analytic", "simulated", "none"):
        raise ConfigError(f"unknown reference mode {reference.mode!r}")

    sweep = None
    if "sweep" in d:
        sw = d["sweep"]
        sweep = SweepSpec(
            nu_min=float(sw.get("nu_min", 0.3)),
            nu_max=float(sw.get("nu_max", 1.0)),
            step=float(sw.get("step", 0.02)),
            tol=float(sw.get("tol", 1e-3)),
            window=_pair(sw.get("window"), "sweep.window"),
            reference=sw.get("reference", "analytic"),
        )

    dt = tm.get("dt")
    sc = Scenario(
        name=d.get("name", "scenario"),
        L=float(grid["L"]),
        N=int(grid["N"]),
        a=[float(x) for x in model["a"]],
        nu=float(model.get("nu", 1.0)),
        initial=initial,
        t_end=float(tm["t_end"]),
        dt=None if dt is None else float(dt),
        snapshots=[float(s) for s in tm.get("snapshots", [])],
        reference=reference,
        stride=int(diag.get("stride", 1)),
        sample_every=None if diag.get("sample_every") is None else float(diag["sample_every"]),
        fit_window=_pair(diag.get("fit_window"), "diagnostics.fit_window"),
        size_s=int(diag.get("size_s", 2)),
        bound_s=int(diag.get("bound_s", 1)),
        c_sk=float(diag.get("c_sk", 1.0)),
        sweep=sweep,
        out_dir=str(out.get("dir", "out")),
        plots=bool(out.get("plots", True)),
        write_snapshots=bool(out.get("snapshots", True)),
        raw=d,
    )
    return sc


def load(path: str | Path) -> Scenario:
    path = Path(path)
    text = path.read_text()
    if path.suffix == ".json":
        return from_dict(json.loads(text))
    return from_dict(tomllib.loads(text))
