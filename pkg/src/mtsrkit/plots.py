"""Figure rendering for sweep reports; every plot lands next to its CSV."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

STYLE = {
    "figure.figsize": (7.2, 4.2),
    "axes.grid": True,
    "grid.alpha": 0.3,
    "axes.labelsize": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 9,
    "ytick.labelsize": 9,
}

POLICY_COLORS = {"random": "tab:blue", "cr": "tab:orange"}


def sweep_figure(path, x_label, rows_by_policy, x_key, out_keys):
    """Two-panel line chart: robot utilization and order throughput time.

    rows_by_policy: {policy: [row dict, ...]}; each row carries analytical and
    simulated values under keys like 'rho_r_a'/'rho_r_s' (simulated optional).
    """
    with plt.rc_context(STYLE):
        fig, axes = plt.subplots(1, len(out_keys))
        if len(out_keys) == 1:
            axes = [axes]
        for ax, (key, label) in zip(axes, out_keys):
            for policy, rows in rows_by_policy.items():
                xs = [r[x_key] for r in rows]
                color = POLICY_COLORS.get(policy, None)
                ax.plot(
                    xs, [r[f"{key}_a"] for r in rows],
                    marker="o", label=f"{policy} (model)", color=color,
                )
                if rows and f"{key}_s" in rows[0]:
                    ax.plot(
                        xs, [r[f"{key}_s"] for r in rows],
                        marker="x", linestyle="--", label=f"{policy} (sim)", color=color,
                    )
            ax.set_xlabel(x_label)
            ax.set_ylabel(label)
        axes[0].legend()
        fig.tight_layout()
        fig.savefig(path, dpi=150)
        plt.close(fig)


def plan_figure(path, rows_by_policy):
    """Minimum robots and throughput time against the order arrival rate."""
    with plt.rc_context(STYLE):
        fig, axes = plt.subplots(1, 2)
        for policy, rows in rows_by_policy.items():
            xs = [r["lambda_per_min"] for r in rows]
            color = POLICY_COLORS.get(policy, None)
            axes[0].plot(xs, [r["n_robots"] for r in rows], marker="o", label=policy, color=color)
            axes[1].plot(xs, [r["tht_a"] for r in rows], marker="o", label=policy, color=color)
        axes[0].set_xlabel("orders per minute")
        axes[0].set_ylabel("minimum robots")
        axes[1].set_xlabel("orders per minute")
        axes[1].set_ylabel("order throughput time (s)")
        axes[0].legend()
        fig.tight_layout()
        fig.savefig(path, dpi=150)
        plt.close(fig)
