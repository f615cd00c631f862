"""Closed-form soliton profiles and their Sobolev norms."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .spectral import Grid, RealField

BOUNDARY_TOL = 1e-13
OVERLAP_TOL = 1e-3


class BoundaryWarning(UserWarning):
    """Profile is not negligible at the edge of the periodic box."""


class OverlapWarning(UserWarning):
    """Two summed solitons are not well separated."""


@dataclass(frozen=True)
class SolitonParams:
    """Speed ``c``, phase ``x0`` and the family the profile belongs to.

    ``family`` is one of ``"kdv"``, ``"mkdv"``, ``"gkdv"`` (power ``k``) or
    ``"rescaled_kdv"`` (factor ``nu``).
    """

    c: float
    x0: float = 0.0
    family: str = "kdv"
    k: int = 1
    nu: float = 1.0

    def __post_init__(self) -> None:
        if not self.c > 0:
            raise ValueError(f"soliton speed must be positive, got {self.c}")
        if self.family not in ("kdv", "mkdv", "gkdv", "rescaled_kdv"):
            raise ValueError(f"unknown soliton family {self.family!r}")
        if self.family == "rescaled_kdv" and not 0 < self.nu <= 1:
            raise ValueError(f"rescaling factor must lie in (0, 1], got {self.nu}")
        if self.family == "kdv":
            object.__setattr__(self, "k", 1)
        elif self.family == "mkdv":
            object.__setattr__(self, "k", 2)
        if self.k < 1:
            raise ValueError(f"power must be a positive integer, got {self.k}")

    @property
    def speed(self) -> float:
        return self.nu * self.c if self.family == "rescaled_kdv" else self.c


def sech_power(z: np.ndarray, p: float) -> np.ndarray:
    """sech(z)**p via exp(p log sech z), clamped to zero for |z| > 700."""
    az = np.abs(np.asarray(z, dtype=float))
    out = np.zeros_like(az)
    live = az <= 700.0
    a = az[live]
    # log sech z = -z - log((1 + e^{-2z})/2), stable for large z
    log_sech = -a - np.log1p(np.exp(-2.0 * a)) + np.log(2.0)
    out[live] = np.exp(p * log_sech)
    return out


def soliton_amplitude(k: int, c: float) -> float:
    return (c * (k + 1) * (k + 2) / 2.0) ** (1.0 / k)


def _profile(k: int, c: float, xi: np.ndarray) -> np.ndarray:
    # exponent 2/k: reduces to 3c sech^2 for k=1 and sqrt(6c) sech for k=2
    return soliton_amplitude(k, c) * sech_power(0.5 * k * np.sqrt(c) * xi, 2.0 / k)


def _periodic_offset(x: np.ndarray, center: float, grid: Grid) -> np.ndarray:
    """x - center wrapped into [-L, L) so travelling profiles re-enter the box."""
    return (x - center + grid.half_width) % grid.length - grid.half_width


def _check_boundary(values: np.ndarray, what: str) -> None:
    edge = max(abs(values[0]), abs(values[-1]))
    if edge >= BOUNDARY_TOL:
        warnings.warn(f"{what}: |U| = {edge:.2e} at the box edge exceeds {BOUNDARY_TOL:g}",
                      BoundaryWarning, stacklevel=3)


def gkdv_soliton(k: int, p: SolitonParams, grid: Grid, t: float = 0.0, *, check: bool = True) -> RealField:
    """A sech^(2/k)((k sqrt(c)/2)(x - ct - x0)) with A = (c(k+1)(k+2)/2)^(1/k)."""
    z = _periodic_offset(grid.x, p.x0 + p.c * t, grid)
    vals = _profile(k, p.c, z)
    if check:
        _check_boundary(vals, f"gKdV(k={k}) soliton c={p.c}")
    return RealField(grid, vals)


def rescaled_soliton(p: SolitonParams, grid: Grid, t: float = 0.0, *, check: bool = True) -> RealField:
    """KdV soliton travelling at the reduced speed nu*c."""
    if not 0 < p.nu <= 1:
        raise ValueError(f"rescaling factor must lie in (0, 1], got {p.nu}")
    z = _periodic_offset(grid.x, p.x0 + p.nu * p.c * t, grid)
    vals = _profile(1, p.c, z)
    if check:
        _check_boundary(vals, f"rescaled soliton c={p.c}")
    return RealField(grid, vals)


def soliton(p: SolitonParams, grid: Grid, t: float = 0.0, *, check: bool = True) -> RealField:
    """Dispatch on ``p.family``."""
    if p.family == "rescaled_kdv":
        return rescaled_soliton(p, grid, t, check=check)
    return gkdv_soliton(p.k, p, grid, t, check=check)


def two_soliton_sum(family: str, params: Iterable[tuple[float, float]], grid: Grid) -> RealField:
    """Plain sum of one-soliton profiles at t = 0 (not an exact two-soliton)."""
    k = {"kdv": 1, "mkdv": 2}[family]
    profiles = [_profile(k, c, grid.x - x0) for c, x0 in params]
    if not profiles:
        raise ValueError("need at least one soliton")
    peaks = [pr.max() for pr in profiles]
    for i in range(len(profiles)):
        for j in range(len(profiles)):
            if i != j:
                overlap = profiles[j][np.argmax(profiles[i])]
                if overlap > OVERLAP_TOL * peaks[i]:
                    warnings.warn(f"solitons {i} and {j} overlap ({overlap:.2e} at the peak of {i})",
                                  OverlapWarning, stacklevel=2)
    vals = np.sum(profiles, axis=0)
    _check_boundary(vals, f"{family} multi-soliton")
    return RealField(grid, vals)


def closed_form_h2(family: str, c: float) -> float:
    """Exact H^2 norm of the KdV profile 3c sech^2 or the mKdV profile sqrt(6c) sech."""
    if not c > 0:
        raise ValueError(f"soliton speed must be positive, got {c}")
    if family == "kdv":
        sq = 24.0 * np.sqrt(c) * (c + c**2 / 5.0 + c**3 / 7.0)
    elif family == "mkdv":
        sq = 4.0 * np.sqrt(c) * (3.0 + c + 7.0 * c**2 / 5.0)
    else:
        raise ValueError(f"no closed form for family {family!r}")
    return float(np.sqrt(sq))


def closed_form_mass(c: float) -> float:
    """int 3c sech^2(sqrt(c) x / 2) dx = 12 sqrt(c)."""
    return 12.0 * np.sqrt(c)


def closed_form_momentum(c: float) -> float:
    """int 9c^2 sech^4(sqrt(c) x / 2) dx = 24 c^(3/2)."""
    return 24.0 * c**1.5
