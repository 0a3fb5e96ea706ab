"""Matplotlib figures written as deterministic SVG."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .normed_plane import Norm, sphere_points  # noqa: E402

SPHERE_SAMPLES = 1024

_RC = {
    "svg.hashsalt": "heinzconst",
    "svg.fonttype": "none",
    "font.family": "DejaVu Sans",
    "font.size": 9,
    "axes.linewidth": 0.6,
    "lines.linewidth": 1.0,
    "path.simplify": False,
}


def sphere_polyline(norm: Norm, samples: int = SPHERE_SAMPLES) -> np.ndarray:
    """Closed polyline of the unit sphere; polygon vertices are always included."""
    angles = np.arange(samples) * (2 * math.pi / samples)
    verts = norm.polygon_vertices()
    if verts is not None:
        extra = np.arctan2(verts[:, 1], verts[:, 0]) % (2 * math.pi)
        angles = np.unique(np.concatenate([angles, extra]))
    pts = sphere_points(norm, angles)
    return np.vstack([pts, pts[:1]])


def _save(fig, path) -> None:
    fig.savefig(path, format="svg", metadata={"Date": None, "Creator": None})
    plt.close(fig)


def sphere_figure(norm: Norm, path, witness=None, title: str | None = None) -> None:
    """Unit sphere with optional witness pair ``(x, y)`` and the segments ``x+y``, ``x-y``."""
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(4.5, 4.5))
        line = sphere_polyline(norm)
        ax.plot(line[:, 0], line[:, 1], color="black", label="unit sphere")
        lim = 1.15 * float(np.max(np.abs(line)))
        if witness is not None:
            x = np.asarray(witness[0], dtype=float)
            y = np.asarray(witness[1], dtype=float)
            lim = max(lim, 1.1 * float(np.max(np.abs(np.concatenate([x + y, x - y])))))
            for vec, name, colour in ((x, "x", "tab:blue"), (y, "y", "tab:red"), (-y, "-y", "tab:red")):
                ax.plot([0, vec[0]], [0, vec[1]], color=colour, linestyle="-" if name != "-y" else ":")
                ax.annotate(name, vec, textcoords="offset points", xytext=(4, 4), color=colour)
            ax.plot([y[0], x[0]], [y[1], x[1]], color="tab:green", label="x - y")
            ax.plot([-y[0], x[0]], [-y[1], x[1]], color="tab:purple", label="x + y")
        ax.axhline(0, color="0.6", linewidth=0.5)
        ax.axvline(0, color="0.6", linewidth=0.5)
        ax.set_xlim(-lim, lim)
        ax.set_ylim(-lim, lim)
        ax.set_aspect("equal")
        ax.set_title(title or norm.label)
        ax.legend(loc="lower left", frameon=False, fontsize=7)
        fig.tight_layout()
        _save(fig, path)


def sweep_figure(nus, values, path, label: str = "") -> None:
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(5.0, 3.2))
        ax.plot(nus, values, marker="o", markersize=3, color="black")
        ax.set_xlabel("nu")
        ax.set_ylabel("H_nu(X,B)")
        ax.set_xlim(0, 1)
        if label:
            ax.set_title(label)
        fig.tight_layout()
        _save(fig, path)
