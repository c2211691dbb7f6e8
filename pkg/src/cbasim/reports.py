"""Report files and console tables.

Machine-readable files carry money with two decimals and no thousands
separators.  Dimensionless ratios (probabilities, BCR, rates) keep six
decimals so they stay meaningful.  Output is byte-for-byte reproducible.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict
from pathlib import Path
from typing import Optional, Sequence

from .cashflow import CashFlowSchedule, FinancialMetrics
from .sensitivity import CorrelationEntry, TornadoEntry
from .simulation import SimulationResult

__all__ = ["write_reports", "cashflow_rows", "format_money", "render_cashflow_table", "render_tornado_table"]

CASHFLOW_ROWS = ("Cash Inflow", "Cash Outflow", "Net Cash Flow", "Cumulative Net Cash Flow")

# Keys whose values are ratios rather than money.
_RATIO_KEYS = {"bcr", "prob_positive", "discount_rate", "tolerance", "confidence", "payback_years", "spearman_rho"}


def _fixed(x: float, places: int) -> str:
    text = f"{x:.{places}f}"
    return text[1:] if text.startswith("-") and float(text) == 0 else text


def format_money(x: float, display: bool = False) -> str:
    """``1085902.0 -> '1085902.00'``, or ``'$1,085,902'`` for display."""
    if display:
        text = f"{abs(x):,.0f}"
        return f"-${text}" if round(x) < 0 else f"${text}"
    return _fixed(x, 2)


def cashflow_rows(schedule: CashFlowSchedule) -> list[tuple[str, Sequence[float]]]:
    return list(zip(CASHFLOW_ROWS, (schedule.inflow, schedule.outflow, schedule.net, schedule.cumulative)))


class _Raw(str):
    """Pre-formatted JSON number."""


def _encode(obj, key: Optional[str] = None):
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return obj
    if isinstance(obj, float):
        return _Raw(_fixed(obj, 6 if key in _RATIO_KEYS else 2))
    if isinstance(obj, dict):
        return {k: _encode(v, k) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_encode(v, key) for v in obj]
    if hasattr(obj, "item"):  # numpy scalar
        return _encode(obj.item(), key)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _dump_json(obj, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(obj, _Raw):
        return str(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad}  {json.dumps(k)}: {_dump_json(v, indent + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        items = [f"{pad}  {_dump_json(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + f"\n{pad}]"
    return json.dumps(obj)


def to_json(obj) -> str:
    return _dump_json(_encode(obj)) + "\n"


def _write_csv(path: Path, header: Sequence[str], rows) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    path.write_text(buf.getvalue(), encoding="utf-8")


def write_reports(
    result: Optional[SimulationResult],
    schedule: CashFlowSchedule,
    metrics: FinancialMetrics,
    out_dir,
    tornado: Optional[list[TornadoEntry]] = None,
    correlations: Optional[list[CorrelationEntry]] = None,
    scenario_name: Optional[str] = None,
) -> dict[str, Path]:
    """Write ``cashflow.csv`` and ``summary.json``; with a simulation result
    also ``histogram.csv``; with sensitivity output ``tornado.csv`` and
    ``rank_correlation.csv``.  Returns the written paths by file name."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: dict[str, Path] = {}

    p = out / "cashflow.csv"
    _write_csv(
        p,
        ["row"] + [str(t) for t in range(schedule.horizon + 1)],
        [[label] + [format_money(v) for v in values] for label, values in cashflow_rows(schedule)],
    )
    written[p.name] = p

    summary: dict = {}
    if scenario_name is not None:
        summary["scenario"] = scenario_name
    summary["metrics"] = metrics.as_dict()
    if result is not None:
        summary["simulation"] = result.summary.as_dict()
        summary["iterations"] = result.iterations
        summary["config"] = asdict(result.config)
        p = out / "histogram.csv"
        _write_csv(
            p,
            ["bin_low", "bin_high", "count"],
            [[format_money(lo), format_money(hi), c] for lo, hi, c in result.summary.histogram.bins],
        )
        written[p.name] = p
    p = out / "summary.json"
    p.write_text(to_json(summary), encoding="utf-8")
    written[p.name] = p

    if tornado is not None:
        p = out / "tornado.csv"
        _write_csv(
            p,
            ["factor_id", "low_input", "high_input", "low_output", "high_output", "swing"],
            [
                [e.factor_id, format_money(e.low_input), format_money(e.high_input), format_money(e.low_output),
                 format_money(e.high_output), format_money(e.swing)]
                for e in tornado
            ],
        )
        written[p.name] = p
    if correlations is not None:
        p = out / "rank_correlation.csv"
        _write_csv(p, ["factor_id", "spearman_rho"], [[e.factor_id, _fixed(e.spearman_rho, 6)] for e in correlations])
        written[p.name] = p
    return written


def render_cashflow_table(scenario, schedule: CashFlowSchedule) -> str:
    """Per-factor rows followed by the summary rows, as aligned text."""
    h = schedule.horizon
    name_w = max([len(f.id) for f in scenario.factors] + [len(r) for r in CASHFLOW_ROWS]) + 2
    col_w = 13
    head = "".ljust(name_w) + "".join(str(t).rjust(col_w) for t in range(h + 1))
    lines = [head]

    def row(label, values, blank_zero=True):
        cells = ["".rjust(col_w) if blank_zero and v == 0 else format_money(v, display=True).rjust(col_w) for v in values]
        lines.append(label.ljust(name_w) + "".join(cells))

    for title, group in (("Costs", scenario.costs), ("Benefits", scenario.benefits)):
        lines.append(title)
        for f in group:
            row(f.id, schedule.rows[f.id])
    lines.append("")
    for label, values in cashflow_rows(schedule):
        row(label, values, blank_zero=False)
    return "\n".join(lines)


def render_tornado_table(entries: list[TornadoEntry], limit: Optional[int] = None) -> str:
    entries = entries[:limit] if limit else entries
    w = max([len(e.factor_id) for e in entries] + [6]) + 2
    lines = ["factor".ljust(w) + "low output".rjust(16) + "high output".rjust(16) + "swing".rjust(14)]
    for e in entries:
        lines.append(
            e.factor_id.ljust(w)
            + format_money(e.low_output, True).rjust(16)
            + format_money(e.high_output, True).rjust(16)
            + format_money(e.swing, True).rjust(14)
        )
    return "\n".join(lines)
