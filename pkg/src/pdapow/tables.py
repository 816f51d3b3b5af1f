"""Solver selection and the consecutive-winning tables."""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

from .baseline import AttackerParams, attacker_success
from .chain import DEFAULT_TOL, consecutive_winning_probability
from .errors import DomainError
from .model import SystemConfig
from .reduction import reduced_consecutive_probability

__all__ = [
    "AUTO_FULL_LIMIT",
    "TABLE_IDS",
    "Table",
    "consecutive_probability",
    "build_table",
    "format_value",
    "render",
]

AUTO_FULL_LIMIT = 10 ** 5
TABLE_IDS = ("table1", "table3", "table4-bitcoin", "table4")
DEFAULT_PRECISION = {"table1": 3, "table3": 3, "table4-bitcoin": 4, "table4": 4}


def consecutive_probability(config: SystemConfig, method: str = "auto", player: int = 0,
                            tol: float = DEFAULT_TOL) -> float:
    """Consecutive-winning probability with the requested solver.

    ``auto`` uses the full chain up to ``AUTO_FULL_LIMIT`` states and the
    reduced chain beyond that.
    """
    if method == "auto":
        method = "full" if config.num_states <= AUTO_FULL_LIMIT or not config.equal_powers else "reduced"
    if method == "full":
        return consecutive_winning_probability(config, player, tol=tol)
    if method == "reduced":
        return reduced_consecutive_probability(config, tol=tol)
    raise DomainError(f"unknown method {method!r}")


@dataclass
class Table:
    id: str
    title: str
    corner: str
    row_labels: List[str]
    col_labels: List[str]
    values: List[List[Optional[float]]]
    notes: List[str] = field(default_factory=list)


def _grid(fn, rows: Sequence, cols: Sequence) -> List[List[float]]:
    cells = [(r, c) for r in rows for c in cols]
    with ThreadPoolExecutor() as pool:
        flat = list(pool.map(lambda rc: fn(*rc), cells))
    return [flat[i * len(cols):(i + 1) * len(cols)] for i in range(len(rows))]


def build_table(table_id: str, tol: float = DEFAULT_TOL,
                n_range: Sequence[int] = range(1, 8), k_range: Optional[Sequence[int]] = None,
                alphas: Sequence[Optional[float]] = (None, 2.0, 5.0)) -> Table:
    """Compute one of the consecutive-winning tables.

    ``table1`` fixes five players and sweeps the difficulty function;
    ``table3`` sweeps players at ``alpha = 2`` with the reduced chain;
    ``table4-bitcoin`` is the attacker catch-up row at ``q = 0.1``.
    """
    if table_id == "table1":
        ks = list(k_range or range(2, 6))
        alphas = list(alphas)
        values = _grid(lambda a, k: consecutive_probability(SystemConfig.create(5, k, a), tol=tol),
                       alphas, ks)
        labels = ["No difficulty" if a is None or a == 1 else f"{a:g}-exponential non-ordered"
                  for a in alphas]
        return Table(table_id, "Probability of consecutive winning. n=5.", "",
                     labels, [str(k) for k in ks], values)
    if table_id == "table3":
        ks = list(k_range or range(1, 7))
        ns = list(n_range)
        values = _grid(lambda n, k: consecutive_probability(SystemConfig.create(n, k, 2.0),
                                                            method="reduced", tol=tol),
                       ns, ks)
        return Table(table_id, "Probability of consecutive winning.", "n\\k",
                     [str(n) for n in ns], [str(k) for k in ks], values)
    if table_id in ("table4-bitcoin", "table4"):
        zs = list(k_range or range(1, 7))
        row = [attacker_success(AttackerParams(0.1, z)) for z in zs]
        labels, values = ["Bitcoin PoW"], [row]
        notes = []
        if table_id == "table4":
            labels += ["PDA PoW: 2-exponential", "PDA PoW: 5-exponential"]
            values += [[None] * len(zs), [None] * len(zs)]
            notes.append("PDA rows n/a: player count, window and run length behind them are not stated")
        return Table(table_id, "Attacker has 10% computing power.", "Mechanism\\k",
                     labels, [str(z) for z in zs], values, notes)
    raise DomainError(f"unknown table {table_id!r}; choose from {', '.join(TABLE_IDS)}")


def format_value(value: Optional[float], precision: int = 3) -> str:
    """Scientific notation with ``precision`` significant digits; ``n/a`` for missing cells."""
    if value is None:
        return "n/a"
    return f"{value:.{max(precision, 1) - 1}e}"


def render(table: Table, fmt: str = "csv", precision: Optional[int] = None) -> str:
    prec = precision or DEFAULT_PRECISION.get(table.id, 3)
    cells = [[format_value(v, prec) for v in row] for row in table.values]
    if fmt == "json":
        return json.dumps({
            "table": table.id,
            "title": table.title,
            "columns": table.col_labels,
            "rows": [{"label": lab, "values": row, "formatted": fr}
                     for lab, row, fr in zip(table.row_labels, table.values, cells)],
            "notes": table.notes,
        }, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([table.corner] + table.col_labels)
        for lab, row in zip(table.row_labels, cells):
            w.writerow([lab] + row)
        for note in table.notes:
            w.writerow([f"# {note}"])
        return buf.getvalue()
    if fmt == "markdown":
        lines = [f"**{table.title}**", "",
                 "| " + " | ".join([table.corner] + table.col_labels) + " |",
                 "|" + "---|" * (len(table.col_labels) + 1)]
        for lab, row in zip(table.row_labels, cells):
            lines.append("| " + " | ".join([lab] + row) + " |")
        lines += [""] + [f"_{n}_" for n in table.notes]
        return "\n".join(lines).rstrip() + "\n"
    raise DomainError(f"unknown format {fmt!r}")
