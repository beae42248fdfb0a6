"""Figure rendering for report output.

Everything draws through the Agg backend into files; nothing here opens
a window.  Paths come back as strings so callers can list them in
manifests.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "plot_field",
    "plot_mask",
    "plot_moment_grid",
    "plot_rate_curves",
    "plot_sim_errorbars",
]

_RC = {
    "figure.figsize": (5.0, 4.0),
    "savefig.dpi": 200,
    "savefig.bbox": "tight",
    "font.family": "serif",
}

_META = {"Software": "momentrec"}


def _overlay_boundary(ax, region) -> None:
    for xs, ys in region.boundary_polylines():
        ax.plot(xs, ys, color="white", linewidth=1.0)


def plot_field(field, path, title: str | None = None, region=None) -> str:
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        im = ax.imshow(
            field.values.T,
            origin="lower",
            extent=(0.0, 1.0, 0.0, 1.0),
            cmap="viridis",
        )
        fig.colorbar(im, ax=ax, shrink=0.85)
        if region is not None:
            _overlay_boundary(ax, region)
        if title:
            ax.set_title(title)
        ax.set_xlabel("x")
        ax.set_ylabel("y")
        fig.savefig(path, metadata=_META)
        plt.close(fig)
    return str(path)


def plot_mask(mask, path, title: str | None = None, region=None) -> str:
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        ax.imshow(
            mask.bits.T.astype(float),
            origin="lower",
            extent=(0.0, 1.0, 0.0, 1.0),
            cmap="gray",
            vmin=0.0,
            vmax=1.0,
        )
        if region is not None:
            for xs, ys in region.boundary_polylines():
                ax.plot(xs, ys, color="red", linewidth=1.0)
        if title:
            ax.set_title(title)
        ax.set_xlabel("x")
        ax.set_ylabel("y")
        fig.savefig(path, metadata=_META)
        plt.close(fig)
    return str(path)


def plot_moment_grid(m, path, title: str | None = None) -> str:
    """log10 magnitude of the moment rectangle."""
    arr = np.abs(m.to_array())
    with np.errstate(divide="ignore"):
        logs = np.log10(arr)
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        im = ax.imshow(logs.T, origin="lower", aspect="auto")
        fig.colorbar(im, ax=ax, shrink=0.85, label="log10 |m(k, j)|")
        ax.set_xlabel("k")
        ax.set_ylabel("j")
        if title:
            ax.set_title(title)
        fig.savefig(path, metadata=_META)
        plt.close(fig)
    return str(path)


def plot_rate_curves(curves: dict, path, ylabel: str = "error") -> str:
    """Log-log error against order; curves maps label -> {order: value}."""
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        for label, points in curves.items():
            orders = sorted(points)
            ax.loglog(orders, [points[a] for a in orders], marker="o", label=label)
        ax.set_xlabel("order")
        ax.set_ylabel(ylabel)
        ax.grid(True, which="both", alpha=0.3)
        ax.legend()
        fig.savefig(path, metadata=_META)
        plt.close(fig)
    return str(path)


def plot_sim_errorbars(report, path, pinned: dict | None = None) -> str:
    """Replication means with 2-standard-error bars."""
    cfg = report.config
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        ax.errorbar(
            cfg.alphas,
            report.means,
            yerr=[2 * s for s in report.stderrs],
            marker="o",
            capsize=3,
            label=f"n = {cfg.n}",
        )
        if pinned:
            orders = sorted(pinned)
            ax.plot(
                orders,
                [pinned[a] for a in orders],
                marker="x",
                linestyle="--",
                label="pinned",
            )
        ax.set_xlabel("order")
        ax.set_ylabel("mean grid-sup error")
        ax.grid(True, alpha=0.3)
        ax.legend()
        fig.savefig(path, metadata=_META)
        plt.close(fig)
    return str(path)
