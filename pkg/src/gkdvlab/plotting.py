"""SVG figures for experiment artifacts: distance norms, space-time contours, profiles."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

# svg.hashsalt pins the generated element ids so repeated runs write identical files
STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "lines.linewidth": 1.2,
    "svg.hashsalt": "gkdvlab",
    "svg.fonttype": "none",
}

NORM_STYLE = {
    "H0": dict(color="tab:blue", label=r"$H^0$"),
    "H1": dict(color="tab:orange", label=r"$H^1$"),
    "H2": dict(color="tab:green", label=r"$H^2$"),
    "Linf": dict(color="tab:red", linestyle="--", label=r"$L^\infty$"),
}


def _save(fig, path: Path) -> Path:
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def plot_norms(path: Path, t: np.ndarray, columns: dict[str, np.ndarray], title: str = "",
               fits: dict[str, tuple[float, float]] | None = None) -> Path:
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5.0, 3.2))
        for key, y in columns.items():
            ax.plot(t, y, **NORM_STYLE.get(key, {"label": key}))
            if fits and key in fits:
                m, b = fits[key]
                ax.plot(t, m * t + b, color=NORM_STYLE.get(key, {}).get("color", "k"),
                        linewidth=0.6, alpha=0.6)
        ax.set_xlabel("t")
        ax.set_ylabel(r"$\|\Delta(t)\|$")
        if title:
            ax.set_title(title)
        ax.legend(frameon=False)
        fig.tight_layout()
        return _save(fig, path)


def plot_spacetime(path: Path, x: np.ndarray, t: np.ndarray, U: np.ndarray,
                   peak_track: Sequence[tuple[float, float]] | None = None,
                   caustic: tuple[float, float] | None = None,
                   xlim: tuple[float, float] | None = None, title: str = "") -> Path:
    """Rasterized contour of U(x, t) with the tracked peak and a reference caustic x0 + v t."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5.0, 3.6))
        cs = ax.pcolormesh(x, t, U, shading="auto", cmap="viridis", rasterized=True)
        fig.colorbar(cs, ax=ax, label="U")
        if peak_track:
            pt = np.array(peak_track)
            ax.plot(pt[:, 1], pt[:, 0], color="w", linewidth=0.8, label="peak")
        if caustic is not None:
            x0, v = caustic
            ax.plot(x0 + v * t, t, "k--", linewidth=1.0, label="reference caustic")
        if xlim:
            ax.set_xlim(*xlim)
        ax.set_xlabel("x")
        ax.set_ylabel("t")
        if title:
            ax.set_title(title)
        if peak_track or caustic is not None:
            ax.legend(frameon=False, loc="upper left")
        fig.tight_layout()
        return _save(fig, path)


def plot_profiles(path: Path, x: np.ndarray, snapshots: Sequence[tuple[float, np.ndarray, np.ndarray | None]],
                  xlim: tuple[float, float] | None = None) -> Path:
    """Primary (solid) against reference (dashed) profiles, one panel per snapshot."""
    n = max(1, len(snapshots))
    with plt.rc_context(STYLE):
        fig, axes = plt.subplots(n, 1, figsize=(5.0, 1.6 * n + 0.4), sharex=True, squeeze=False)
        for ax, (t, u, ref) in zip(axes[:, 0], snapshots):
            ax.plot(x, u, color="tab:blue", label="gKdV")
            if ref is not None:
                ax.plot(x, ref, color="tab:red", linestyle="--", label="reference")
            ax.set_ylabel(f"t = {t:.4g}")
            if xlim:
                ax.set_xlim(*xlim)
        axes[0, 0].legend(frameon=False)
        axes[-1, 0].set_xlabel("x")
        fig.tight_layout()
        return _save(fig, path)


def plot_sweep(path: Path, nu: np.ndarray, objective: np.ndarray, nu_star: float) -> Path:
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4.5, 3.0))
        ax.plot(nu, objective, "o-", markersize=2.5)
        ax.axvline(nu_star, color="k", linestyle=":", label=rf"$\nu^* = {nu_star:.3f}$")
        ax.set_xlabel(r"$\nu$")
        ax.set_ylabel(r"mean $\|\Delta\|_{L^2}$")
        ax.legend(frameon=False)
        fig.tight_layout()
        return _save(fig, path)
