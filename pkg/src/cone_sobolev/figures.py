"""Static figure renderers for reports; written to files, never shown."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_META = {"Software": "cone-sobolev"}


def _save(fig, path):
    fig.savefig(path, dpi=130, bbox_inches="tight", metadata=_META)
    plt.close(fig)
    return path


def blowdown_figure(report, path: str) -> str:
    """Scaled-norm ratios against the radius schedule, with their limits."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    R = np.asarray(report.radii)
    if report.ratio_q is not None:
        ax.loglog(R, report.ratio_q, "o-", ms=3.5, label="main-norm ratio")
        if report.limit_q is not None:
            ax.axhline(report.limit_q, color="C0", ls=":", lw=1)
    if report.ratio_r is not None:
        ax.loglog(R, report.ratio_r, "s-", ms=3.5, label="low-norm / support ratio")
        if report.limit_r is not None:
            ax.axhline(report.limit_r, color="C1", ls=":", lw=1)
    ax.loglog(R, report.ratio_p, "^-", ms=3.5, label="gradient ratio bound")
    ax.axhline(report.limit_p, color="C2", ls=":", lw=1)
    ax.set_xlabel("scaling radius R")
    ax.set_ylabel("scaled ratio")
    title = f"{report.family}: blow-down ratios"
    if report.avr_bound is not None:
        title += f"  (avr bound {report.avr_bound:.4g}, {report.verdict})"
    ax.set_title(title, fontsize=10)
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.25)
    return _save(fig, path)


def mt_divergence_figure(mt_report: dict, path: str) -> str:
    """Exponential functional along the spike schedule."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ks = np.asarray(mt_report["k_schedule"], dtype=float)
    ax.loglog(ks, mt_report["I_values"], "o-", ms=4)
    ax.set_xlabel("spike parameter k")
    ax.set_ylabel("normalized exponential integral")
    ax.set_title(
        f"n={mt_report['n']}, c={mt_report['c']:.5g} "
        f"(threshold {mt_report['threshold']:.5g}): {mt_report['verdict']}", fontsize=10)
    ax.grid(True, which="both", alpha=0.25)
    return _save(fig, path)


def rearrangement_figure(ts, g_vals, star, path: str) -> str:
    """Original radial profile next to its rearrangement on the cone."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(ts, g_vals, label="profile on space")
    ax.plot(star.grid, star.values, ".", ms=2.5, label="rearranged profile")
    ax.set_xlabel("radius")
    ax.set_ylabel("value")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.25)
    return _save(fig, path)


def criteria_figure(rows, path: str) -> str:
    """One bar per acceptance criterion: log10 of margin-to-tolerance."""
    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    labels = [r["name"] for r in rows]
    margins = []
    colors = []
    for r in rows:
        ratio = r.get("margin_ratio")
        margins.append(math.log10(ratio) if ratio and ratio > 0 else -16.0)
        colors.append("C2" if r["passed"] else "C3")
    ax.barh(range(len(rows)), margins, color=colors)
    ax.set_yticks(range(len(rows)), labels, fontsize=7)
    ax.set_xlabel("log10(measured margin / tolerance)  [<= 0 passes]")
    ax.axvline(0.0, color="k", lw=1)
    ax.grid(axis="x", alpha=0.25)
    fig.tight_layout()
    return _save(fig, path)


def constants_figure(rows, path: str) -> str:
    """Bar chart of tabulated optimal constants."""
    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    labels = [r["label"] for r in rows]
    vals = [r["k_opt"] for r in rows]
    ax.bar(range(len(rows)), vals, color="C0")
    ax.set_xticks(range(len(rows)), labels, rotation=60, ha="right", fontsize=7)
    ax.set_ylabel("optimal constant")
    ax.grid(axis="y", alpha=0.25)
    fig.tight_layout()
    return _save(fig, path)
