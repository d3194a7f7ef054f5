"""Headless matplotlib figure rendering for the report outputs."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .simkernel import COLLISION, PASSED_FIRST, STOPPED_SHORT  # noqa: E402

_OUTCOME_STYLE = {
    PASSED_FIRST: ("tab:blue", "passed first"),
    STOPPED_SHORT: ("tab:green", "stopped short"),
    COLLISION: ("tab:red", "collision"),
}


def _shade_parked(ax, scenario):
    for veh in scenario.parked:
        ax.axvspan(veh.front_s - veh.length, veh.front_s, color="0.85", zorder=0)


def plot_profile(profile, scenario, path) -> None:
    """Limit curve and planned speed over the route, parked vehicles shaded."""
    fig, ax = plt.subplots(figsize=(9, 4))
    _shade_parked(ax, scenario)
    posted = [scenario.posted.at(s) for s in profile.s]
    ax.plot(profile.s, posted, color="0.5", ls=":", label="posted limit")
    ax.plot(profile.s, profile.v_limit, color="tab:orange", label="dynamic limit")
    ax.plot(profile.s, profile.v, color="tab:blue", label="planned speed")
    ax.set_xlabel("distance along route (m)")
    ax.set_ylabel("speed (m/s)")
    ax.set_xlim(0, scenario.route_length)
    ax.set_ylim(bottom=0)
    ax.legend(loc="lower left", fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def plot_timeseries(states, profile, scenario, path) -> None:
    """Simulated speed over position with the limit curve overlaid."""
    fig, ax = plt.subplots(figsize=(9, 4))
    _shade_parked(ax, scenario)
    ax.plot(profile.s, profile.v_limit, color="tab:orange", label="dynamic limit")
    ax.plot([st.s for st in states], [st.v for st in states],
            color="tab:blue", label="simulated speed")
    ax.set_xlabel("distance along route (m)")
    ax.set_ylabel("speed (m/s)")
    ax.set_xlim(0, scenario.route_length)
    ax.set_ylim(bottom=0)
    ax.legend(loc="lower left", fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def plot_sweep(events, path) -> None:
    """Stop margins of every emergence event, colored by outcome."""
    fig, ax = plt.subplots(figsize=(9, 4))
    plotted = False
    for outcome, (color, label) in _OUTCOME_STYLE.items():
        xs = [ev.t_emerge for ev in events if ev.outcome == outcome]
        ys = [0.0 if ev.stop_margin is None else ev.stop_margin
              for ev in events if ev.outcome == outcome]
        if xs:
            ax.scatter(xs, ys, s=8, color=color, label=label)
            plotted = True
    ax.axhline(0.0, color="0.3", lw=0.8)
    ax.set_xlabel("emergence time (s)")
    ax.set_ylabel("stop margin (m)")
    if plotted:
        ax.legend(loc="best", fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def plot_param_sweep(rows, param_keys, path) -> None:
    """Metrics across a one-axis parameter grid (multi-axis grids get an
    index on the x axis instead)."""
    single = len(param_keys) == 1
    xs = [row[param_keys[0]] for row in rows] if single else list(range(len(rows)))
    xlabel = param_keys[0] if single else "grid point"
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.5))
    ax1.plot(xs, [row["travel_time_s"] for row in rows], "o-")
    ax1.set_xlabel(xlabel)
    ax1.set_ylabel("travel time (s)")
    ax1.grid(alpha=0.3)
    ax2.plot(xs, [row["min_limit_mps"] for row in rows], "o-", color="tab:orange")
    ax2.set_xlabel(xlabel)
    ax2.set_ylabel("min limit (m/s)")
    ax2.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
