"""Secrecy-rate-versus-sweep plots of a ResultsTable, written as SVG."""

from __future__ import annotations

import math
from pathlib import Path
from typing import Union

import matplotlib
matplotlib.use("Agg")  # no display in worker processes or CI
import matplotlib.pyplot as plt

from src.models.enums import SchemeName, SweepAxis
from src.models.schemas import ResultsTable


AXIS_LABELS = {
    SweepAxis.PMAX: r"Maximum transmit power $P_{\max}$ (dBm)",
    SweepAxis.EPSILON: r"Detection coefficient $\epsilon$",
}
SCHEME_LABELS = {
    SchemeName.PROPOSED: "Proposed",
    SchemeName.FPA: "FPA",
    SchemeName.RPA: "RPA",
    SchemeName.EAS: "EAS",
}
MARKERS = {SchemeName.PROPOSED: "o", SchemeName.FPA: "s", SchemeName.RPA: "^", SchemeName.EAS: "d"}

plt.rcParams.update({
    "font.size": 11,
    "axes.grid": True,
    "grid.linestyle": ":",
    "grid.alpha": 0.6,
    "svg.hashsalt": "fascovert",
})


def build_figure(table: ResultsTable):
    """One error-bar curve per scheme: mean clamped secrecy rate, bars of std / sqrt(trials)."""
    if not table.aggregates:
        raise ValueError("Cannot plot a results table without aggregates")

    fig, ax = plt.subplots(figsize=(5, 4))
    for scheme in SchemeName:
        rows = sorted((r for r in table.aggregates if r.scheme == scheme), key=lambda r: r.sweep_value)
        if not rows:
            continue
        ax.errorbar(
            [r.sweep_value for r in rows],
            [r.mean_secrecy_rate for r in rows],
            yerr=[r.std_secrecy_rate / math.sqrt(r.trials) if r.trials else 0.0 for r in rows],
            marker=MARKERS[scheme],
            capsize=3,
            label=SCHEME_LABELS[scheme],
        )
    ax.set_xlabel(AXIS_LABELS[table.sweep_axis])
    ax.set_ylabel("Secrecy rate (bits/s/Hz)")
    ax.legend()
    fig.tight_layout()
    return fig


def emit_plot(table: ResultsTable, path: Union[str, Path]) -> None:
    path = Path(path)
    fig = build_figure(table)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(path, format="svg", metadata={"Date": None})
    finally:
        plt.close(fig)
