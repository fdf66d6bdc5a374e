"""Matplotlib figure rendering for the CLI report path (Agg backend)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .geometry import Polytope, ring2d


def _closed_ring(P: Polytope) -> np.ndarray:
    r = ring2d(P)
    return np.vstack([r, r[:1]])


def plot_bodies(bodies, labels, path: str, title: str = "") -> None:
    """Outline plot of one or more 2D bodies (3D bodies: axis projections)."""
    dim = bodies[0].dim
    if dim == 2:
        fig, ax = plt.subplots(figsize=(5, 5))
        for P, lab in zip(bodies, labels):
            r = _closed_ring(P)
            ax.plot(r[:, 0], r[:, 1], label=lab, lw=1.2)
        ax.set_aspect("equal")
        ax.legend(fontsize=8)
    else:
        fig, axes = plt.subplots(1, 3, figsize=(12, 4))
        pairs = [(0, 1), (0, 2), (1, 2)]
        for ax, (i, j) in zip(axes, pairs):
            for P, lab in zip(bodies, labels):
                from scipy.spatial import ConvexHull
                proj = P.vertices[:, [i, j]]
                hull = ConvexHull(proj)
                ring = proj[np.append(hull.vertices, hull.vertices[0])]
                ax.plot(ring[:, 0], ring[:, 1], label=lab, lw=1.2)
            ax.set_aspect("equal")
            ax.set_xlabel("xyz"[i])
            ax.set_ylabel("xyz"[j])
        axes[0].legend(fontsize=8)
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def plot_profile(profile, path: str, title: str = "") -> None:
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(6, 6), sharex=True)
    ax1.plot(profile.t_grid, profile.f_values, "o-", ms=3)
    ax1.set_ylabel("f(t) = 1 / (|K| |K_t*|)")
    ax2.plot(profile.t_grid, profile.body_volumes, "s-", ms=3, color="tab:orange")
    ax2.set_ylabel("|K_t|")
    ax2.set_xlabel("t")
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def plot_flow(trace, path: str, title: str = "") -> None:
    steps = [r.step for r in trace]
    fig, ax1 = plt.subplots(figsize=(6, 4))
    ax1.plot(steps, [r.product for r in trace], "o-", ms=3, label="volume product")
    ax1.set_xlabel("step")
    ax1.set_ylabel("volume product")
    ax2 = ax1.twinx()
    ax2.plot(steps, [r.ball_distance for r in trace], "s-", ms=3,
             color="tab:red", label="distance to ball")
    ax2.set_ylabel("Hausdorff distance to matched ball")
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def plot_deviations(devs, path: str, title: str = "") -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(np.arange(len(devs)), devs)
    ax.set_xlabel("direction index")
    ax.set_ylabel("midpoint deviation / diameter")
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
