"""Figures for benchmark rows, written next to ``bench.csv``."""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from intprop.bench import linear_fit  # noqa: E402

_STYLE = {
    "figure.figsize": (6.0, 3.8),
    "font.size": 10,
    "axes.labelsize": 10,
    "legend.fontsize": 8,
    "axes.grid": True,
    "grid.alpha": 0.3,
}


def _conditions(ax, rows):
    xs = [r.total_conditions for r in rows]
    ys = [r.ms for r in rows]
    ax.plot(xs, ys, "o-", ms=3, label="measured")
    if len(rows) >= 2:
        slope, icpt, r2 = linear_fit(xs, ys)
        ax.plot(xs, [slope * x + icpt for x in xs], "--", lw=1, label=f"linear fit, $R^2$={r2:.3f}")
    ax.set_xlabel("total #if conditions")
    ax.set_ylabel("preparation time [ms]")
    ax.set_title("Runtime with varying number of conditions")


def _ranges(ax, rows):
    ax.plot([r.param for r in rows], [r.ms for r in rows], "o-", ms=3, label="measured")
    ax.set_xlabel("allowed values per variable")
    ax.set_ylabel("preparation time [ms]")
    ax.set_title("Runtime with varying ranges per variable")


def render_figures(rows, out_dir, fmt="png"):
    """Draw one figure per series present in ``rows``; returns the files written."""
    paths = []
    draw = {"conditions": _conditions, "ranges": _ranges}
    with plt.rc_context(_STYLE):
        for series, fn in draw.items():
            picked = [r for r in rows if r.series == series]
            if not picked:
                continue
            fig, ax = plt.subplots()
            fn(ax, picked)
            ax.legend(loc="upper left")
            fig.tight_layout()
            path = os.path.join(out_dir, f"{series}.{fmt}")
            fig.savefig(path, dpi=150)
            plt.close(fig)
            paths.append(path)
    return paths
