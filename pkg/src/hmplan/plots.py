"""Matplotlib rendering of the report figures, saved next to the CSV output."""

from __future__ import annotations

from pathlib import Path

import numpy as np


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def plot_constellation(constellation, path: str | Path) -> None:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5, 5))
    pts = constellation.point_array()
    ax.scatter(pts.real, pts.imag, c="tab:blue", s=40)
    for p, label in zip(pts, constellation.labels):
        ax.annotate(label, (p.real, p.imag), fontsize=7, xytext=(3, 3), textcoords="offset points")
    ax.axhline(0, color="gray", lw=0.8)
    ax.axvline(0, color="gray", lw=0.8)
    ax.set_xlabel("I")
    ax.set_ylabel("Q")
    ax.set_title(f"{constellation.kind}" + (f" (alpha={constellation.alpha:g})" if constellation.alpha else ""))
    ax.set_aspect("equal")
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def plot_region(region, classical_rate: float, hier_rate: float, path: str | Path) -> None:
    """Rate pairs, hull and the two equal-rate crosses for one receiver pair."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 5))
    classical = [p for p in region.points if p.kind == "classical"]
    hier = [p for p in region.points if p.kind == "hierarchical"]
    if classical:
        ax.scatter([p.r1 for p in classical], [p.r2 for p in classical],
                   marker="s", c="tab:gray", label="classical modcods")
    if hier:
        ax.scatter([p.r1 for p in hier], [p.r2 for p in hier],
                   marker="o", c="tab:blue", label="hierarchical 16-QAM")
    hull_x = [p.r1 for p in region.hull]
    hull_y = [p.r2 for p in region.hull]
    ax.plot(hull_x, hull_y, "k-", lw=1.2, label="time-sharing hull")
    top = max(hull_y + hull_x + [1.0])
    ax.plot([0, top], [0, top], "--", color="tab:green", lw=0.8, label="equal rate")
    ax.plot([classical_rate], [classical_rate], "x", c="tab:red", ms=10, mew=2,
            label=f"classical cross ({classical_rate:.3f})")
    ax.plot([hier_rate], [hier_rate], "+", c="tab:purple", ms=12, mew=2,
            label=f"hierarchical cross ({hier_rate:.3f})")
    ax.set_xlabel("R1 [bit/symbol]")
    ax.set_ylabel("R2 [bit/symbol]")
    ax.set_title("Achievable rate region")
    ax.legend(fontsize=8, loc="upper right")
    ax.grid(alpha=0.3)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def plot_sweep(snr_grid: np.ndarray, ratio: np.ndarray, path: str | Path) -> None:
    """Heatmap of the hierarchical-to-classical throughput ratio."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6.5, 5))
    masked = np.ma.masked_invalid(ratio)
    im = ax.imshow(
        masked,
        origin="lower",
        extent=(snr_grid[0], snr_grid[-1], snr_grid[0], snr_grid[-1]),
        aspect="auto",
        cmap="viridis",
    )
    fig.colorbar(im, ax=ax, label="R_hm / R_ts")
    ax.set_xlabel("receiver 2 SNR [dB]")
    ax.set_ylabel("receiver 1 SNR [dB]")
    ax.set_title("Throughput ratio, hierarchical vs classical time sharing")
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def plot_beam(rows: list[dict], classical_rate: float, path: str | Path) -> None:
    """Bar chart of per-strategy throughput with the classical baseline."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4))
    labels = [row["strategy"] for row in rows]
    values = [row["common_rate"] for row in rows]
    ax.bar(labels, values, color="tab:blue", width=0.5)
    ax.axhline(classical_rate, color="tab:red", ls="--", lw=1.2,
               label=f"classical ({classical_rate:.3f})")
    ax.set_ylabel("common rate [bit/symbol]")
    ax.set_title("Grouping strategies")
    ax.legend(fontsize=8)
    ax.grid(axis="y", alpha=0.3)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def plot_plan(plan, path: str | Path) -> None:
    """Stacked time-fraction bar of a plan's schedule."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(7, 2.8))
    left = 0.0
    cmap = plt.get_cmap("tab20")
    for i, entry in enumerate(plan.schedule):
        ax.barh(0, entry.time_fraction, left=left, color=cmap(i % 20))
        if entry.time_fraction > 0.04:
            label = "+".join(entry.receiver_ids)
            ax.text(left + entry.time_fraction / 2, 0, label, ha="center", va="center", fontsize=7)
        left += entry.time_fraction
    ax.set_xlim(0, 1)
    ax.set_yticks([])
    ax.set_xlabel("time fraction")
    ax.set_title(f"Schedule (common rate {plan.common_rate:.3f} bit/symbol)")
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
