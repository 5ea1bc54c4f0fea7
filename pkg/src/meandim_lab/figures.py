"""Figure rendering for the report path.

Each renderer writes a PNG next to the delimited output and returns the
path.  The Agg backend is forced so rendering works headless.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.patches import Rectangle as MplRect  # noqa: E402

__all__ = [
    "render_field",
    "render_characteristic",
    "render_slope",
    "render_cover",
    "render_helmholtz",
]

_DPI = 150


def _save(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def render_field(xs, ys, values, path: Path, title: str,
                 marker: complex | None = None) -> Path:
    fig, ax = plt.subplots(figsize=(6.4, 5.2))
    im = ax.pcolormesh(xs, ys, values.T, shading="auto", cmap="viridis")
    fig.colorbar(im, ax=ax, label="|df|")
    if marker is not None:
        ax.plot([marker.real], [marker.imag], "r+", markersize=12,
                label="argmax")
        ax.legend(loc="upper right")
    ax.set_xlabel("Re z")
    ax.set_ylabel("Im z")
    ax.set_title(title)
    ax.set_aspect("equal")
    return _save(fig, path)


def render_characteristic(radii, t_values, ratios, mean_energy,
                          path: Path) -> Path:
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.6, 4.0))
    ax1.loglog(radii, t_values, "o-", ms=3, label="T(r)")
    bound = [math.pi * r * r / 2.0 for r in radii]
    ax1.loglog(radii, bound, "k--", lw=1, label="pi r^2 / 2")
    ax1.set_xlabel("r")
    ax1.set_ylabel("T(r)")
    ax1.legend()
    ax1.set_title("characteristic growth")

    ax2.semilogx(radii, ratios, "o-", ms=3, label="2T/(pi r^2)")
    ax2.axhline(mean_energy, color="k", ls="--", lw=1, label="mean energy")
    ax2.set_xlabel("r")
    ax2.set_ylabel("ratio")
    ax2.legend()
    ax2.set_title("mean-energy estimator")
    return _save(fig, path)


def render_slope(rows, path: Path, title: str) -> Path:
    fig, ax = plt.subplots(figsize=(5.6, 4.0))
    ns = [r.window for r in rows]
    ratios = [r.ratio for r in rows]
    exact = ["exact" if r.minimal else "bound" for r in rows]
    ax.plot(ns, ratios, "o-")
    for n, ratio, tag in zip(ns, ratios, exact):
        ax.annotate(tag, (n, ratio), textcoords="offset points",
                    xytext=(4, 4), fontsize=8)
    ax.set_xlabel("window n")
    ax.set_ylabel("widim bound / n")
    ax.set_ylim(bottom=0)
    ax.set_title(title)
    return _save(fig, path)


def render_cover(solution, extent: int, path: Path, title: str) -> Path:
    """Draw a 1D or 2D cover as translucent rectangles."""
    fig, ax = plt.subplots(figsize=(5.2, 5.2))
    cmap = plt.get_cmap("tab20")
    for k, box in enumerate(solution.boxes):
        if len(box) == 1:
            (x0, x1), (y0, y1) = box[0], (0.15 * k, 0.15 * k + 0.1)
        elif len(box) == 2:
            (x0, x1), (y0, y1) = box
        else:
            continue
        ax.add_patch(MplRect((x0, y0), x1 - x0, y1 - y0, alpha=0.35,
                             facecolor=cmap(k % 20), edgecolor="k"))
    ax.set_xlim(-0.3, extent + 0.3)
    ax.set_ylim(-0.3, (extent if len(solution.boxes[0]) > 1
                       else 0.15 * len(solution.boxes)) + 0.3)
    ax.set_title(f"{title} (multiplicity {solution.multiplicity})")
    return _save(fig, path)


def render_helmholtz(radii, w_values, lam, grid_axis, u, path: Path) -> Path:
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.6, 4.0))
    ax1.semilogy(radii, w_values, "-")
    ax1.set_xlabel("|z|")
    ax1.set_ylabel(f"w (lambda={lam:g})")
    ax1.set_title("radial barrier")

    im = ax2.pcolormesh(grid_axis, grid_axis, u.T, shading="auto",
                        cmap="magma")
    fig.colorbar(im, ax=ax2, label="u")
    ax2.set_xlabel("x")
    ax2.set_ylabel("y")
    ax2.set_aspect("equal")
    ax2.set_title("barrier demo solution")
    return _save(fig, path)
