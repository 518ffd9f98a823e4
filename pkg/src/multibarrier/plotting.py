"""Deterministic SVG overlays of specific-heat curves."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def overlay_svg(curves, path, title: str = "", log_T: bool = True) -> Path:
    """One polyline per curve, legend by c. Same input gives byte-identical output."""
    plt.rcParams["svg.hashsalt"] = "multibarrier"
    plt.rcParams["svg.fonttype"] = "none"
    fig, ax = plt.subplots(figsize=(8, 5))
    for cv in sorted(curves, key=lambda cv: cv.c):
        ax.plot(cv.T, cv.specific_heat, lw=0.8, label=f"c={cv.c:g}")
    if log_T:
        ax.set_xscale("log")
    ax.set_xlabel("T")
    ax.set_ylabel("C_h")
    if title:
        ax.set_title(title)
    if len(curves) <= 12:
        ax.legend(fontsize=7)
    else:
        ax.legend(fontsize=5, ncol=3)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path
