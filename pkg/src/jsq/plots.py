"""Figure rendering for the CLI report paths.

Each sweep command writes its CSV and, unless asked not to, a matplotlib
PNG next to it.  The CSV stays the machine-readable contract; the figures
are for eyeballing the same columns.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def render_compare(rows, K: int, path: str) -> None:
    """Blocking-probability ratio curves of the two comparison queues."""
    rho = [r[0] for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(rho, [r[2] for r in rows], label=r"$\nu_K(K)/\pi_K(K,K)$", color="tab:blue")
    ax.plot(rho, [r[3] for r in rows], label=r"$\nu'(2K)/\pi_K(K,K)$", color="tab:red")
    ax.axhline(1.0, color="black", ls="--", lw=0.8)
    ax.set_xlabel(r"$\rho$")
    ax.set_ylabel("ratio of blocking probabilities")
    ax.set_title(f"K = {K}")
    ax.set_ylim(0.85, 1.15)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_mean_bounds(rows, K: int, path: str) -> None:
    """Upper/lower mean-occupancy bound ratios against the exact mean."""
    rho = [r[0] for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(rho, [r[3] / r[1] for r in rows], label="upper / exact", color="tab:blue")
    ax.plot(rho, [r[2] / r[1] for r in rows], label="lower / exact", color="tab:red")
    ax.axhline(1.0, color="black", ls="--", lw=0.8)
    ax.set_xlabel(r"$\rho$")
    ax.set_ylabel("bound / exact mean")
    ax.set_title(f"K = {K}")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_mean_bounds_infinite(rows, path: str) -> None:
    rho = [r[0] for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(rho, [r[3] / r[1] for r in rows], label="upper / windowed mean", color="tab:blue")
    ax.plot(rho, [r[2] / r[1] for r in rows], label="lower / windowed mean", color="tab:red")
    ax.axhline(1.0, color="black", ls="--", lw=0.8)
    ax.set_xlabel(r"$\rho$")
    ax.set_ylabel("bound / mean")
    ax.set_title("infinite capacity")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
