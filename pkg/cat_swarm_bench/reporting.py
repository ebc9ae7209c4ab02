"""
Renderizado de tablas (markdown o CSV) a partir de StatReport y de
resultados crudos. Ambos formatos comparten las mismas celdas ya
formateadas; solo cambia el marco.
"""

import csv
import io
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np

from .errors import UsageError
from .harness import TrialResult, f_min_for_results
from .stats import StatReport

FORMATS = ("md", "csv")
P_VALUE_FLOOR = 1e-4


@dataclass
class Table:
    title: str
    headers: List[str]
    rows: List[List[str]]


def format_number(value: Optional[float]) -> str:
    """Notación científica fija con 6 cifras significativas (3.50000E-14)."""
    if value is None:
        return "N/A"
    return f"{float(value):.5E}"


def format_rank(value: float) -> str:
    return f"{value:g}"


def format_p_value(value: Optional[float]) -> str:
    if value is None:
        return "N/A"
    if value < P_VALUE_FLOOR:
        return "<0.0001"
    return format_number(value)


def means_table(report: StatReport) -> Table:
    headers = ["function"]
    for alg in report.algorithms:
        headers += [f"{alg} mean", f"{alg} std"]
    rows = []
    for fid in report.functions:
        row = [fid]
        for alg in report.algorithms:
            cell = report.cells.get((alg, fid))
            if cell is None or cell.missing:
                row += ["N/A", "N/A"]
            else:
                row += [format_number(cell.mean), format_number(cell.std)]
        rows.append(row)
    return Table("Media y desviación estándar", headers, rows)


def rank_table(report: StatReport) -> Table:
    table = report.rank_table
    headers = ["function"] + list(table.algorithms)
    rows = [
        [fid] + [format_rank(table.per_function_ranks[fid][alg]) for alg in table.algorithms]
        for fid in table.functions
    ]
    for name, subtotal in table.subtotals.items():
        rows.append([f"{name} SUBTOTAL"] + [format_rank(subtotal[alg]) for alg in table.algorithms])
        rows.append(
            [f"{name} RANKING"] + [f"{table.subtotal_averages[name][alg]:.6f}" for alg in table.algorithms]
        )
    rows.append(["TOTAL"] + [format_rank(table.totals[alg]) for alg in table.algorithms])
    rows.append(["OVERALL RANKING"] + [f"{table.averages[alg]:.6f}" for alg in table.algorithms])
    return Table("Ranking por función", headers, rows)


def friedman_table(report: StatReport) -> Table:
    friedman = report.friedman
    return Table(
        "Friedman",
        ["statistic", "p_value", "n_functions", "k"],
        [[format_number(friedman.statistic), format_p_value(friedman.p_value), str(friedman.n_functions), str(friedman.k)]],
    )


def wilcoxon_table(report: StatReport) -> Optional[Table]:
    if report.baseline is None:
        return None
    others = [alg for alg in report.algorithms if alg != report.baseline]
    headers = ["function"] + [f"{alg} vs {report.baseline}" for alg in others]
    rows = []
    for fid in report.functions:
        row = [fid]
        for alg in others:
            result = report.wilcoxon.get((fid, alg))
            row.append(format_p_value(result.p_value if result is not None else None))
        rows.append(row)
    return Table("Wilcoxon (valor p bilateral)", headers, rows)


def report_tables(report: StatReport) -> List[Table]:
    tables = [means_table(report), rank_table(report), friedman_table(report)]
    wilcoxon = wilcoxon_table(report)
    if wilcoxon is not None:
        tables.append(wilcoxon)
    if report.warnings:
        tables.append(Table("Advertencias", ["warning"], [[message] for message in report.warnings]))
    return tables


def convergence_tables(results: Sequence[TrialResult]) -> List[Table]:
    """
    Resumen por (algoritmo, función): mejor valor, media, brecha a f_min y
    la traza media en 0, 25, 50, 75 y 100 % de las iteraciones.

    Raises:
        UsageError: Si no hay ensayos.
    """
    if not results:
        raise UsageError("no trials: el archivo no contiene ensayos")
    f_mins = f_min_for_results(results)

    groups: Dict[tuple, List[TrialResult]] = {}
    for result in results:
        groups.setdefault((result.algorithm, result.function), []).append(result)

    gap_rows = []
    trace_rows = []
    for (alg, fid), trials in groups.items():
        ok = [t for t in trials if not t.failed]
        f_min = f_mins.get(fid)
        if not ok:
            gap_rows.append([alg, fid, "0", str(len(trials)), "N/A", "N/A", format_number(f_min), "N/A", "N/A"])
            continue
        bests = np.array([t.best_fitness for t in ok])
        gaps = bests - f_min if f_min is not None else None
        gap_rows.append([
            alg,
            fid,
            str(len(ok)),
            str(len(trials) - len(ok)),
            format_number(float(bests.min())),
            format_number(float(bests.mean())),
            format_number(f_min),
            format_number(float(gaps.min())) if gaps is not None else "N/A",
            format_number(float(gaps.mean())) if gaps is not None else "N/A",
        ])

        traces = [t.trace for t in ok if t.trace]
        if traces:
            length = min(len(trace) for trace in traces)
            checkpoints = [round(q * (length - 1)) for q in (0.0, 0.25, 0.5, 0.75, 1.0)]
            matrix = np.array([trace[:length] for trace in traces])
            trace_rows.append(
                [alg, fid] + [format_number(float(matrix[:, i].mean())) for i in checkpoints]
            )

    tables = [
        Table(
            "Brecha a f_min",
            ["algorithm", "function", "runs", "failed", "best", "mean", "f_min", "best_gap", "mean_gap"],
            gap_rows,
        )
    ]
    if trace_rows:
        tables.append(Table(
            "Convergencia (media de la traza)",
            ["algorithm", "function", "it_0%", "it_25%", "it_50%", "it_75%", "it_100%"],
            trace_rows,
        ))
    return tables


def render(tables: Sequence[Table], fmt: str = "md") -> str:
    if fmt not in FORMATS:
        raise UsageError(f"Formato desconocido '{fmt}' (válidos: {', '.join(FORMATS)})")
    if fmt == "csv":
        return _render_csv(tables)
    return _render_markdown(tables)


def _render_markdown(tables: Sequence[Table]) -> str:
    blocks = []
    for table in tables:
        lines = [f"## {table.title}", ""]
        lines.append("| " + " | ".join(table.headers) + " |")
        lines.append("|" + "|".join("---" for _ in table.headers) + "|")
        for row in table.rows:
            lines.append("| " + " | ".join(cell.replace("|", "\\|") for cell in row) + " |")
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


def _render_csv(tables: Sequence[Table]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    for index, table in enumerate(tables):
        if index:
            buffer.write("\n")
        buffer.write(f"# {table.title}\n")
        writer.writerow(table.headers)
        writer.writerows(table.rows)
    return buffer.getvalue()
