"""gKdV right-hand sides for polynomial nonlinearities F(U) = sum_j a_j U^j."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .spectral import Grid, RealField, quadrature, l2_norm

BLOWUP_THRESHOLD = 1e8


class BlowUpError(RuntimeError):
    """Raised when a field becomes non-finite or exceeds the blow-up threshold."""

    def __init__(self, message: str, t: float | None = None):
        super().__init__(message)
        self.t = t


@dataclass(frozen=True)
class PolynomialNonlinearity:
    """F(U) = a_1 U + a_2 U^2 + ... + a_k U^k; there is no constant term."""

    coeffs: tuple[float, ...]

    def __post_init__(self) -> None:
        a = tuple(float(c) for c in self.coeffs)
        if not a:
            raise ValueError("nonlinearity needs at least one coefficient")
        if a[-1] == 0.0:
            raise ValueError("leading coefficient a_k must be nonzero")
        if not all(np.isfinite(a)):
            raise ValueError("coefficients must be finite")
        object.__setattr__(self, "coeffs", a)

    @classmethod
    def monomial(cls, k: int, amplitude: float = 1.0) -> "PolynomialNonlinearity":
        return cls(tuple([0.0] * (k - 1) + [amplitude]))

    @property
    def degree(self) -> int:
        return len(self.coeffs)

    @property
    def is_monomial(self) -> bool:
        return all(a == 0.0 for a in self.coeffs[:-1])

    def F(self, u):
        """Horner evaluation of F at u (scalar or array)."""
        acc = np.zeros_like(np.asarray(u, dtype=float))
        for a in reversed(self.coeffs):
            acc = (acc + a) * u
        return acc

    def dF(self, u):
        acc = np.zeros_like(np.asarray(u, dtype=float))
        for j in range(self.degree, 0, -1):
            acc = acc * u + j * self.coeffs[j - 1]
        return acc

    def G(self, u):
        """Antiderivative G(v) = sum_j a_j v^(j+1)/(j+1), so that dG/dx = F(U) U_x."""
        acc = np.zeros_like(np.asarray(u, dtype=float))
        for j in range(self.degree, 0, -1):
            acc = (acc + self.coeffs[j - 1] / (j + 1)) * u
        return acc * u


@dataclass(frozen=True)
class ModelSpec:
    """U_t + nu U_xxx + nu_nl F(U) U_x = 0.

    Standard gKdV has ``nu = nu_nl = 1``; the rescaled KdV equation uses
    ``nu = nu_nl`` below one.
    """

    nonlinearity: PolynomialNonlinearity
    nu: float = 1.0
    nu_nl: float = 1.0
    label: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        if not self.nu > 0:
            raise ValueError(f"dispersion scale must be positive, got {self.nu}")

    @classmethod
    def gkdv(cls, coeffs: Sequence[float], label: str = "") -> "ModelSpec":
        return cls(PolynomialNonlinearity(tuple(coeffs)), label=label)

    @classmethod
    def power(cls, k: int) -> "ModelSpec":
        names = {1: "KdV", 2: "mKdV"}
        return cls(PolynomialNonlinearity.monomial(k), label=names.get(k, f"gKdV(k={k})"))

    @classmethod
    def kdv(cls) -> "ModelSpec":
        return cls.power(1)

    @classmethod
    def mkdv(cls) -> "ModelSpec":
        return cls.power(2)

    @classmethod
    def rescaled_kdv(cls, nu: float) -> "ModelSpec":
        if not 0 < nu <= 1:
            raise ValueError(f"rescaling factor must lie in (0, 1], got {nu}")
        return cls(PolynomialNonlinearity((1.0,)), nu=nu, nu_nl=nu, label=f"rescaled KdV(nu={nu})")

    def linear_symbol(self, xi: np.ndarray) -> np.ndarray:
        """Fourier symbol of -nu d^3/dx^3, i.e. i nu xi^3."""
        return 1j * self.nu * xi**3

    def nonlinear_hat(self, uh: np.ndarray, grid: Grid) -> np.ndarray:
        """rfft coefficients of -nu_nl d/dx G(U) with 2/3-rule dealiasing.

        ``uh`` holds rfft coefficients of U. Returns (coefficients, physical U)
        so callers can reuse the physical samples for blow-up checks.
        """
        mask = grid.dealias_mask_r
        u = np.fft.irfft(uh * mask, n=grid.n_points)
        gh = np.fft.rfft(self.nonlinearity.G(u)) * mask
        return -self.nu_nl * 1j * grid.xi_r * gh, u


def eval_F(nl: PolynomialNonlinearity, field: RealField) -> RealField:
    with np.errstate(over="ignore", invalid="ignore"):
        vals = nl.F(field.values)
    if not np.all(np.isfinite(vals)):
        raise BlowUpError("F(U) overflowed")
    return RealField(field.grid, vals)


def rhs(model: ModelSpec, U: RealField) -> RealField:
    """-nu U_xxx - nu_nl d/dx G(U) evaluated spectrally."""
    grid = U.grid
    uh = np.fft.rfft(U.values)
    with np.errstate(over="ignore", invalid="ignore"):
        nl_hat, _ = model.nonlinear_hat(uh, grid)
        total = model.linear_symbol(grid.xi_r) * uh + nl_hat
        vals = np.fft.irfft(total, n=grid.n_points)
    if not np.all(np.isfinite(vals)):
        raise BlowUpError("non-finite right-hand side")
    return RealField(grid, vals)


def conserved_quantities(model: ModelSpec, U: RealField) -> tuple[float, float]:
    """(mass, momentum) = (int U dx, int U^2 dx); both invariants for every F."""
    return quadrature(U), l2_norm(U) ** 2
