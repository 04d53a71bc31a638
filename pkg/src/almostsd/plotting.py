"""PNG figures rendered from the plot-data tables (headless, Agg backend)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "figure.figsize": (5.0, 3.6),
    "figure.dpi": 120,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 9,
    "legend.frameon": False,
}


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def power_curve_figure(epsilon, rate, path, alpha=None, title=None):
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.plot(epsilon, rate, marker="o", ms=3, lw=1.2, color="C0")
        if alpha is not None:
            ax.axhline(alpha, ls="--", lw=0.8, color="0.4", label=f"alpha = {alpha:g}")
            ax.legend(loc="lower right")
        ax.set_xlabel("epsilon")
        ax.set_ylabel("rejection rate")
        ax.set_ylim(-0.02, 1.02)
        if title:
            ax.set_title(title)
        return _save(fig, path)


def index_cloud_figure(cloud_x, cloud_y, point, path, epsilon=None, title=None):
    """Bootstrap 2DSD indices inside the triangle ``|x| <= y``."""
    cloud_x = np.asarray(cloud_x, dtype=float)
    cloud_y = np.asarray(cloud_y, dtype=float)
    top = max(float(np.max(cloud_y, initial=0.0)), float(point[1])) * 1.1 or 1.0
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4.6, 4.0))
        ys = np.array([0.0, top])
        ax.plot(ys, ys, color="k", lw=1.0, label="L1 (x = y)")
        ax.plot(-ys, ys, color="k", lw=1.0, ls=":", label="L2 (x = -y)")
        if epsilon is not None and 0.0 < epsilon < 0.5:
            k = 1.0 - 2.0 * epsilon
            ax.plot(ys * k, ys, color="C2", lw=1.0, ls="--", label=f"R1 boundary, eps = {epsilon:g}")
            ax.fill(np.array([0.0, top * k, top]), np.array([0.0, top, top]), color="C2", alpha=0.12)
        ax.scatter(cloud_x, cloud_y, s=4, alpha=0.35, color="C0", label="bootstrap", linewidths=0)
        ax.scatter([point[0]], [point[1]], s=30, color="C3", marker="x", label="estimate", zorder=3)
        ax.set_xlabel("signed component")
        ax.set_ylabel("absolute component")
        ax.set_xlim(-top, top)
        ax.set_ylim(0.0, top)
        ax.legend(loc="upper left", fontsize=7)
        if title:
            ax.set_title(title)
        return _save(fig, path)


def targets_figure(x, s1, s2, path, log_x=False, ylabel="target", labels=("sample 1", "sample 2"),
                   step=False):
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        draw = (lambda xx, yy, **kw: ax.step(xx, yy, where="post", **kw)) if step else ax.plot
        draw(x, s1, lw=1.1, label=labels[0])
        draw(x, s2, lw=1.1, label=labels[1])
        if log_x:
            ax.set_xscale("log")
        ax.set_xlabel("x (log scale)" if log_x else "x")
        ax.set_ylabel(ylabel)
        ax.legend()
        return _save(fig, path)
