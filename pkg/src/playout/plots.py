"""Figure rendering for CLI reports.

Every CLI subcommand can drop a PNG next to its CSV output.  The figures are
deliberately plain: one axes, labeled columns, no styling knobs.  The Agg
backend is forced so rendering works headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

__all__ = ["line_figure", "histogram_figure", "compare_figure"]

_FIGSIZE = (6.4, 4.0)


def line_figure(x, series, xlabel, ylabel, path, title=None, logy=False):
    """Render one curve per (label -> y values) entry against a shared x axis."""
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    for label, ys in series.items():
        ax.plot(x, ys, marker=".", markersize=3, linewidth=1.2, label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if logy:
        ax.set_yscale("log")
    if title:
        ax.set_title(title)
    if len(series) > 1:
        ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def histogram_figure(bins, freqs, errors, xlabel, path, title=None):
    """Render an empirical pmf as bars with error whiskers."""
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    ax.bar(bins, freqs, yerr=errors, capsize=3, color="#4878a8", alpha=0.85)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("frequency")
    if title:
        ax.set_title(title)
    ax.grid(True, axis="y", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def compare_figure(bins, analytic, recursive_vals, empirical, errors, path, title=None):
    """Overlay the two analytic pmfs on the Monte Carlo histogram."""
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    ax.bar(bins, empirical, yerr=errors, capsize=3, color="#b0b0b0", alpha=0.6,
           label="simulation")
    ax.plot(bins, analytic, "o-", markersize=4, linewidth=1.2, label="path solver")
    ax.plot(bins, recursive_vals, "s--", markersize=4, linewidth=1.0,
            label="state recursion")
    ax.set_xlabel("starvations")
    ax.set_ylabel("probability")
    if title:
        ax.set_title(title)
    ax.legend(fontsize=8)
    ax.grid(True, axis="y", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
