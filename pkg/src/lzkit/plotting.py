"""Figures written next to the CLI's JSON reports."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "figure.figsize": (6.0, 3.8),
    "font.size": 10,
    "axes.labelsize": 10,
    "axes.titlesize": 11,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.4,
    "savefig.dpi": 150,
    "savefig.bbox": "tight",
    # fixed metadata so repeated runs write identical files
    "svg.hashsalt": "lzkit",
}


# dropping timestamps and version strings keeps reruns byte-identical
_METADATA = {
    ".png": {"Software": None},
    ".pdf": {"CreationDate": None, "Producer": None, "Creator": None},
    ".svg": {"Date": None, "Creator": None},
}


def _save(fig, path) -> None:
    suffix = str(path).lower()[-4:]
    fig.savefig(path, metadata=_METADATA.get(suffix))
    plt.close(fig)


def _axes(title: str, xlabel: str, ylabel: str):
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
    ax.set_title(title)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    return fig, ax


def phrase_growth(ends: np.ndarray, n: int, path) -> None:
    """Phrase count against position, with the ``n / log2 n`` curve for scale."""
    with plt.rc_context(STYLE):
        fig, ax = _axes("Incremental parsing", "position i", "phrases completed")
        ax.step(np.concatenate([[0], ends]), np.arange(len(ends) + 1), where="post", label="c(i)")
        i = np.arange(2, max(n, 2) + 1)
        ax.plot(i, i / np.log2(i), ls="--", color="0.5", label="i / log2 i")
        ax.legend(frameon=False)
        _save(fig, path)


def rd_curve(ds, rates, path, marked: float | None = None) -> None:
    with plt.rc_context(STYLE):
        fig, ax = _axes("Universal ensemble rate", "distortion D", "rate (bits/symbol)")
        ax.plot(ds, rates, marker="o", ms=3)
        if marked is not None:
            ax.axvline(marked, color="0.5", ls=":")
        _save(fig, path)


def running_error(predictions: np.ndarray, truth: np.ndarray, path) -> None:
    errors = np.cumsum(predictions != truth)
    steps = np.arange(1, len(truth) + 1)
    with plt.rc_context(STYLE):
        fig, ax = _axes("Sequential prediction", "symbols seen", "error rate so far")
        ax.plot(steps, errors / steps)
        ax.set_ylim(0, 1)
        _save(fig, path)


def capital(trajectory: np.ndarray, path) -> None:
    with plt.rc_context(STYLE):
        fig, ax = _axes("Even-odds gambling", "round", "log2 capital")
        ax.plot(np.arange(1, len(trajectory) + 1), trajectory)
        _save(fig, path)


def decoder_errors(report: dict, path) -> None:
    names = ["ml", "ziv"]
    rates = [report[k]["error_rate"] for k in names]
    radii = [report[k]["ci95_radius"] for k in names]
    with plt.rc_context(STYLE):
        fig, ax = _axes(
            f"Decoding error, n={report['n']}, M={report['M']}, {report['trials']} trials",
            "decoder",
            "error rate",
        )
        ax.bar(["ML", "universal (LZ)"], rates, yerr=radii, capsize=4, color=["0.4", "0.7"])
        ax.set_ylim(0, max(1e-3, max(r + e for r, e in zip(rates, radii))) * 1.2)
        _save(fig, path)
