"""Report rendering: delimited tables plus figures next to them.

Exactness lives in the JSON and CSV artifacts; the figures are visual
summaries only, so coefficients are cast to float just for plotting.
"""

from __future__ import annotations

import csv
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

# fixed metadata so repeated renders of the same data are byte-identical
_PNG_META = {"Software": "rslift"}


def write_delimited(path: Path, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def coefficient_figure(path: Path, ns: Sequence[int], values: Sequence[Fraction], title: str) -> None:
    """Stem plot of a q-expansion's coefficients against the index."""
    fig, ax = plt.subplots(figsize=(8, 4.5))
    if ns:
        ax.stem([float(n) for n in ns], [float(v) for v in values])
    ax.axhline(0.0, color="black", linewidth=0.6)
    ax.set_xlabel("n")
    ax.set_ylabel("coefficient")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata=_PNG_META)
    plt.close(fig)


def deviation_figure(path: Path, labels: Sequence[str], deviations: Sequence[float], title: str) -> None:
    """Per-class ratio deviations on a log scale, floored for plotting."""
    floor = 1e-40
    fig, ax = plt.subplots(figsize=(8, 4.5))
    xs = range(len(labels))
    ax.bar(xs, [max(abs(d), floor) for d in deviations])
    ax.set_yscale("log")
    ax.set_xticks(list(xs))
    ax.set_xticklabels(labels, rotation=30, ha="right", fontsize=8)
    ax.set_ylabel("relative deviation")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata=_PNG_META)
    plt.close(fig)
