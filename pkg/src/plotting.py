"""SVG plots of sweep reports and solver traces"""
import logging
import os
from typing import Dict, Optional, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .models import EvolutionTrace  # noqa: E402
from .regression import fit_loglog  # noqa: E402

logger = logging.getLogger(__name__)


def plot_loglog(
    path: str,
    x: Sequence[float],
    series: Dict[str, Sequence[float]],
    title: str,
    xlabel: str = "N",
    ylabel: str = "value",
) -> str:
    """Log-log points per series with its least-squares line; the slope goes in the legend"""
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    x = np.asarray(x, dtype=np.float64)
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for label, values in series.items():
        values = np.asarray(values, dtype=np.float64)
        points = ax.loglog(x, values, "o", markersize=3)
        if x.size >= 2 and np.all(values > 0):
            fit = fit_loglog(x, values)
            ax.loglog(x, np.exp(fit.intercept) * x ** fit.slope, "-", color=points[0].get_color(),
                      label=f"{label} (slope {fit.slope:.4f})")
        else:
            points[0].set_label(label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
    logger.info(f"Wrote plot {path}")
    return path


def plot_trace(path: str, trace: EvolutionTrace, columns: Optional[Sequence[str]] = None) -> str:
    """Relative change of each diagnostic against its initial value over time"""
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    columns = columns or ("mass", "energy", "hs", "l4")
    t = trace.column("t")
    fig, axes = plt.subplots(len(columns), 1, figsize=(6, 2 * len(columns)), sharex=True, squeeze=False)
    for ax, name in zip(axes[:, 0], columns):
        values = trace.column(name)
        scale = abs(values[0]) if values.size and values[0] != 0 else 1.0
        ax.plot(t, (values - values[0]) / scale)
        ax.set_ylabel(f"d{name}/{name}0")
        ax.grid(True, alpha=0.3)
    axes[-1, 0].set_xlabel("t")
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
    logger.info(f"Wrote plot {path}")
    return path
