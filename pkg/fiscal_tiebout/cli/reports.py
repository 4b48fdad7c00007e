"""Markdown summaries written alongside the CSV outputs."""

from __future__ import annotations

import math
from typing import Iterable, Mapping, Optional, Sequence

import pandas as pd


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        if math.isnan(value):
            return ""
        return f"{value:.6g}"
    return str(value)


def markdown_table(rows: Iterable[Mapping], columns: Sequence[str]) -> str:
    lines = ["| " + " | ".join(columns) + " |", "|" + "---|" * len(columns)]
    for row in rows:
        lines.append("| " + " | ".join(_fmt(row.get(c, "")) for c in columns) + " |")
    return "\n".join(lines)


def equilibrium_summary(name: str, expenditures: pd.DataFrame, cutoffs: Mapping[str, float],
                        solver: Mapping, audit: Mapping) -> str:
    parts = [
        f"# Equilibrium: {name}",
        "",
        f"Converged in {solver['iterations']} iterations (best-response residual {_fmt(solver['br_residual'])}).",
        f"Period-2 reference residual: {_fmt(solver.get('reference_residual', 0.0))}.",
    ]
    if solver.get("multiple_equilibria"):
        parts.append("")
        parts.append("**Warning:** different starting profiles reached different fixed points.")
    parts += [
        "",
        "## Districts",
        "",
        markdown_table(expenditures.to_dict("records"), ["district", "e_star", "school_quality", "objective", "revenue"]),
        "",
        "## Allocation",
        "",
        f"- lower cutoff w_*: {_fmt(cutoffs['lower'])}",
        f"- upper cutoff w^*: {_fmt(cutoffs['upper'])}",
        "",
        "## Incentive audit",
        "",
        f"- sampled deviations: {audit['n_checked']}",
        f"- max violation: {_fmt(audit['max_violation'])} ({'passed' if audit['passed'] else 'FAILED'})",
        "",
    ]
    return "\n".join(parts)


def policy_summary(name: str, kind: str, verdict: str, rows: Sequence[Mapping], extra: Mapping[str, object]) -> str:
    columns = list(rows[0].keys()) if rows else []
    parts = [f"# Policy ({kind}): {name}", "", f"**Verdict:** {verdict}", ""]
    for key, value in extra.items():
        parts.append(f"- {key}: {_fmt(value)}")
    parts += ["", markdown_table(rows, columns) if rows else "_no districts evaluated_", ""]
    return "\n".join(parts)


def rdd_summary(name: str, estimates: pd.DataFrame, truth: Optional[Mapping[str, float]] = None) -> str:
    parts = [f"# RDD estimates: {name}", ""]
    if truth:
        parts.append("Planted parameters: " + ", ".join(f"{k}={_fmt(v)}" for k, v in truth.items()))
        parts.append("")
    columns = ["design", "spec", "outcome", "lag", "estimate", "se", "p", "n", "bandwidth"]
    parts += [markdown_table(estimates.to_dict("records"), columns), ""]
    return "\n".join(parts)


def montecarlo_summary(name: str, summary: pd.DataFrame, replications: int) -> str:
    columns = ["estimator", "truth", "mean_estimate", "bias", "mean_se", "coverage", "rejection_rate"]
    parts = [f"# Monte Carlo: {name}", "", f"{replications} replications.", "",
             markdown_table(summary.to_dict("records"), columns), ""]
    return "\n".join(parts)
