"""Figure rendering for grids, paths, masks, images and reports."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _require_2d(dim: int) -> None:
    if dim != 2:
        raise ValueError(f"figures are only rendered for dimension 2, got {dim}")


def save_density_figure(grid, path) -> None:
    _require_2d(grid.dim)
    fig, ax = plt.subplots(figsize=(4, 4))
    im = ax.imshow(grid.values.T, origin="lower", extent=(0, 1, 0, 1), cmap="viridis")
    fig.colorbar(im, ax=ax, fraction=0.046)
    ax.set_title("density")
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def save_points_figure(ps, path) -> None:
    _require_2d(ps.dim)
    fig, ax = plt.subplots(figsize=(4, 4))
    ax.plot(ps.points[:, 0], ps.points[:, 1], ".", markersize=2, color="k")
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1)
    ax.set_aspect("equal")
    ax.set_title(f"{len(ps)} points")
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def save_trajectory_figure(traj, path) -> None:
    _require_2d(traj.dim)
    fig, ax = plt.subplots(figsize=(4, 4))
    ax.plot(traj.vertices[:, 0], traj.vertices[:, 1], "-", linewidth=0.4, color="k")
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1)
    ax.set_aspect("equal")
    ax.set_title(f"length {traj.total_length:.3f}")
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def save_mask_figure(mask, path) -> None:
    fig, ax = plt.subplots(figsize=(4, 4))
    ax.imshow(mask.flags, cmap="gray", interpolation="nearest")
    ax.set_title(f"{mask.sampled_count} cells")
    ax.set_xticks([])
    ax.set_yticks([])
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def save_image_figure(image, path) -> None:
    fig, ax = plt.subplots(figsize=(4, 4))
    ax.imshow(np.abs(image.pixels), cmap="gray", interpolation="nearest")
    ax.set_xticks([])
    ax.set_yticks([])
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def save_snr_figure(rows, path) -> None:
    """Per-scheme SNR scatter with the median marked."""
    schemes = []
    for row in rows:
        if row.scheme not in schemes:
            schemes.append(row.scheme)
    fig, ax = plt.subplots(figsize=(5, 4))
    for i, scheme in enumerate(schemes):
        vals = [row.snr_db for row in rows if row.scheme == scheme]
        ax.plot([i] * len(vals), vals, "o", color="tab:blue", alpha=0.6)
        med = float(np.median(vals))
        ax.hlines(med, i - 0.25, i + 0.25, color="tab:red")
        ax.annotate(f"{med:.1f}", (i + 0.28, med), fontsize=8, va="center")
    ax.set_xticks(range(len(schemes)))
    ax.set_xticklabels(schemes, rotation=15)
    ax.set_ylabel("SNR (dB)")
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
