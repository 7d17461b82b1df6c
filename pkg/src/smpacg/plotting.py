"""Matplotlib figures rendered alongside the delimited reports."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .metrics import REPORT_COLUMNS  # noqa: E402


def plot_metric_report(report: dict[str, float], path: str | Path) -> None:
    """Bar chart of the seven evaluation columns."""
    fig, ax = plt.subplots(figsize=(7, 3.5))
    values = [report[c] for c in REPORT_COLUMNS]
    ax.bar(range(len(REPORT_COLUMNS)), values, color="#4878a8")
    ax.set_xticks(range(len(REPORT_COLUMNS)))
    ax.set_xticklabels(REPORT_COLUMNS, rotation=30, ha="right", fontsize=8)
    ax.set_ylabel("score")
    ax.set_ylim(0, 100)
    for i, v in enumerate(values):
        ax.text(i, v + 1, f"{v:.1f}", ha="center", fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_loss_curve(losses: list[float], path: str | Path, title: str = "training loss") -> None:
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.plot(range(1, len(losses) + 1), losses, lw=1.0)
    ax.set_xlabel("step")
    ax.set_ylabel("loss")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_approval_breakdown(report, path: str | Path) -> None:
    """Stacked counts of the enhancement verdict outcomes."""
    dropped = sum(1 for v in report.verdicts if v.forbidden == "dropped")
    no_cover = sum(
        1 for v in report.verdicts if v.forbidden != "dropped" and not v.coverage
    )
    not_creative = sum(
        1
        for v in report.verdicts
        if v.forbidden != "dropped" and v.coverage and not v.creative
    )
    approved = report.approved_count
    labels = ["approved", "forbidden", "no coverage", "too simple"]
    counts = [approved, dropped, no_cover, not_creative]
    fig, ax = plt.subplots(figsize=(5.5, 3.5))
    ax.bar(labels, counts, color=["#4a8", "#a44", "#c84", "#888"])
    ax.set_ylabel("records")
    ax.set_title(f"approval rate {report.approval_rate:.0%}")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
