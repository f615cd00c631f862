"""
Periodic Fourier discretization on [-L, L).

Grids, forward/inverse transforms, spectral derivatives, 2/3-rule dealiased
products and the discrete L2 / Sobolev / sup norms used by every diagnostic.

Transform convention: ``forward`` returns the Fourier-series coefficients

    c_m = (1/N) sum_i f(x_i) exp(-i xi_m x_i),   xi_m = pi m / L

so that ``f(x_i) = sum_m c_m exp(i xi_m x_i)`` and Parseval reads
``||f||_2^2 = 2L sum_m |c_m|^2``.

Sobolev norms use ``||f||_{H^s}^2 = sum_{n<=s} ||d^n f/dx^n||_2^2``, the
convention under which the closed-form soliton norms are exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np


class GridMismatchError(ValueError):
    """Two fields living on different grids were combined."""


class NonFiniteFieldError(ValueError):
    """A field contains NaN or Inf entries."""


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid ``x_i = -L + i * 2L/N`` with FFT-ordered wavenumbers."""

    half_width: float
    n_points: int

    def __post_init__(self) -> None:
        if not (np.isfinite(self.half_width) and self.half_width > 0):
            raise ValueError(f"half_width must be positive, got {self.half_width}")
        if int(self.n_points) != self.n_points or self.n_points % 2 or self.n_points < 16:
            raise ValueError(f"n_points must be an even integer >= 16, got {self.n_points}")
        object.__setattr__(self, "half_width", float(self.half_width))
        object.__setattr__(self, "n_points", int(self.n_points))

    @property
    def L(self) -> float:
        return self.half_width

    @property
    def N(self) -> int:
        return self.n_points

    @property
    def length(self) -> float:
        return 2.0 * self.half_width

    @property
    def dx(self) -> float:
        return self.length / self.n_points

    @cached_property
    def x(self) -> np.ndarray:
        return _frozen(-self.half_width + np.arange(self.n_points) * self.dx)

    @cached_property
    def mode_index(self) -> np.ndarray:
        """Integer mode numbers m in standard FFT order (0..N/2-1, -N/2..-1)."""
        return _frozen(np.fft.fftfreq(self.n_points, d=1.0 / self.n_points).round().astype(np.int64))

    @cached_property
    def xi(self) -> np.ndarray:
        return _frozen((np.pi / self.half_width) * self.mode_index.astype(float))

    @cached_property
    def xi_r(self) -> np.ndarray:
        """Non-negative wavenumbers matching ``numpy.fft.rfft`` output."""
        return _frozen((np.pi / self.half_width) * np.arange(self.n_points // 2 + 1, dtype=float))

    @property
    def xi_max(self) -> float:
        return np.pi * (self.n_points // 2) / self.half_width

    @cached_property
    def dealias_mask_r(self) -> np.ndarray:
        """2/3-rule mask on rfft modes: keeps |m| < N/3."""
        m = np.arange(self.n_points // 2 + 1)
        return _frozen(3 * m < self.n_points)

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        return _frozen(3 * np.abs(self.mode_index) < self.n_points)

    @cached_property
    def _phase(self) -> np.ndarray:
        # exp(i xi_m L) = (-1)^m accounts for the first sample sitting at -L
        return _frozen(np.where(self.mode_index % 2, -1.0, 1.0).astype(complex))

    def field(self, values) -> "RealField":
        return RealField(self, values)

    def zeros(self) -> "RealField":
        return RealField(self, np.zeros(self.n_points))

    # Array-level kernels used on hot paths (integrator, rhs). They skip
    # RealField validation.

    def rderivative(self, values: np.ndarray, order: int) -> np.ndarray:
        if order == 0:
            return np.array(values, dtype=float, copy=True)
        return np.fft.irfft((1j * self.xi_r) ** order * np.fft.rfft(values), n=self.n_points)

    def rdealias(self, values: np.ndarray) -> np.ndarray:
        return np.fft.irfft(self.dealias_mask_r * np.fft.rfft(values), n=self.n_points)


@dataclass(frozen=True, eq=False)
class RealField:
    """Samples of a real profile on a :class:`Grid`; immutable and finite."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.array(self.values, dtype=float, copy=True)
        if vals.shape != (self.grid.n_points,):
            raise ValueError(f"expected {self.grid.n_points} samples, got shape {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise NonFiniteFieldError("field contains non-finite values")
        object.__setattr__(self, "values", _frozen(vals))

    def __sub__(self, other: "RealField") -> "RealField":
        _check_same_grid(self, other)
        return RealField(self.grid, self.values - other.values)

    def __add__(self, other: "RealField") -> "RealField":
        _check_same_grid(self, other)
        return RealField(self.grid, self.values + other.values)

    def __neg__(self) -> "RealField":
        return RealField(self.grid, -self.values)

    def shifted(self, cells: int) -> "RealField":
        """Periodic translation by an integer number of grid cells."""
        return RealField(self.grid, np.roll(self.values, cells))


@dataclass(frozen=True, eq=False)
class SpectralCoeffs:
    grid: Grid
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        c = np.array(self.coeffs, dtype=complex, copy=True)
        if c.shape != (self.grid.n_points,):
            raise ValueError(f"expected {self.grid.n_points} coefficients, got shape {c.shape}")
        object.__setattr__(self, "coeffs", _frozen(c))

    def is_hermitian(self, rtol: float = 1e-12) -> bool:
        c = self.coeffs
        conj_partner = np.conj(c[(-self.grid.mode_index) % self.grid.n_points])
        scale = max(np.max(np.abs(c)), np.finfo(float).tiny)
        return bool(np.max(np.abs(c - conj_partner)) <= rtol * scale)


def _check_same_grid(a: RealField, b: RealField) -> None:
    if a.grid != b.grid:
        raise GridMismatchError(f"grid mismatch: {a.grid} vs {b.grid}")


def forward(field: RealField) -> SpectralCoeffs:
    grid = field.grid
    return SpectralCoeffs(grid, grid._phase * np.fft.fft(field.values) / grid.n_points)


def inverse(spec: SpectralCoeffs) -> RealField:
    grid = spec.grid
    vals = np.fft.ifft(spec.coeffs / grid._phase) * grid.n_points
    return RealField(grid, vals.real)


def derivative(field: RealField, order: int) -> RealField:
    """Spectral derivative of the given order; order 0 returns the field unchanged."""
    if order < 0 or int(order) != order:
        raise ValueError(f"derivative order must be a non-negative integer, got {order}")
    if order == 0:
        return field
    return RealField(field.grid, field.grid.rderivative(field.values, int(order)))


def dealiased_product(a: RealField, b: RealField) -> RealField:
    """Pointwise product with the top third of modes removed before and after."""
    _check_same_grid(a, b)
    grid = a.grid
    prod = grid.rdealias(a.values) * grid.rdealias(b.values)
    return RealField(grid, grid.rdealias(prod))


def l2_norm(field: RealField) -> float:
    return float(np.sqrt(np.sum(field.values**2) * field.grid.dx))


def l2_norm_parseval(spec: SpectralCoeffs) -> float:
    return float(np.sqrt(spec.grid.length * np.sum(np.abs(spec.coeffs) ** 2)))


def sobolev_norm(field: RealField, s: int) -> float:
    if s < 0 or s > 4 or int(s) != s:
        raise ValueError(f"Sobolev index must be an integer in [0, 4], got {s}")
    return float(np.sqrt(sum(l2_norm(derivative(field, n)) ** 2 for n in range(int(s) + 1))))


def sobolev_norms(values: np.ndarray, grid: Grid, s_max: int = 2) -> list[float]:
    """H^0..H^s_max norms of a raw sample array with a single forward FFT."""
    uh = np.fft.rfft(values)
    # rfft halves the spectrum; weight interior modes twice for the full sum
    w = np.full(uh.shape, 2.0)
    w[0] = 1.0
    if grid.n_points % 2 == 0:
        w[-1] = 1.0
    power = w * np.abs(uh) ** 2 * grid.dx / grid.n_points
    norms = []
    acc = 0.0
    for n in range(s_max + 1):
        deriv_power = power * grid.xi_r ** (2 * n)
        if n % 2 == 1:
            # odd derivatives drop the Nyquist mode (real part of iξ^n c)
            deriv_power = deriv_power.copy()
            deriv_power[-1] = 0.0
        acc += float(np.sum(deriv_power))
        norms.append(float(np.sqrt(acc)))
    return norms


def linf_norm(field: RealField) -> float:
    return float(np.max(np.abs(field.values)))


def quadrature(field: RealField) -> float:
    return float(np.sum(field.values) * field.grid.dx)
