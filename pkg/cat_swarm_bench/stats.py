"""
Estadística de comparación entre algoritmos:

- Media y desviación estándar muestral por celda (algoritmo, función).
- Ranking por función, totales, promedios y subtotales por bloque.
- Estadístico de Friedman con su valor p (chi-cuadrado, k-1 g.l.).
- Prueba de Wilcoxon de rangos con signo para muestras pareadas.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy import stats as sps

from .errors import UsageError

logger = logging.getLogger(__name__)

# Por encima de este n se usa la aproximación normal
EXACT_WILCOXON_MAX_N = 25
STD_DDOF = 1


class WilcoxonMethod(str, Enum):
    EXACT = "Exact"
    NORMAL_APPROX = "NormalApprox"
    DEGENERATE = "Degenerate"


@dataclass
class CellSummary:
    algorithm: str
    function: str
    mean: Optional[float]
    std: Optional[float]
    n_runs: int
    missing: bool = False
    ddof: int = STD_DDOF


@dataclass
class RankTable:
    algorithms: List[str]
    functions: List[str]
    per_function_ranks: Dict[str, Dict[str, float]]
    totals: Dict[str, float]
    averages: Dict[str, float]
    subtotals: Dict[str, Dict[str, float]] = field(default_factory=dict)
    subtotal_averages: Dict[str, Dict[str, float]] = field(default_factory=dict)
    group_functions: Dict[str, List[str]] = field(default_factory=dict)


@dataclass
class FriedmanResult:
    statistic: float
    p_value: float
    n_functions: int
    k: int


@dataclass
class WilcoxonResult:
    n_effective: int
    w_statistic: float
    p_value: float
    method: WilcoxonMethod
    w_plus: float = 0.0
    w_minus: float = 0.0

    @property
    def favors_first(self) -> bool:
        """True si las diferencias a - b son mayormente negativas (a menor que b)."""
        return self.w_minus > self.w_plus


@dataclass
class StatReport:
    algorithms: List[str]
    functions: List[str]
    cells: Dict[Tuple[str, str], CellSummary]
    rank_table: RankTable
    friedman: FriedmanResult
    baseline: Optional[str] = None
    # (función, algoritmo) -> resultado contra el baseline; None = N/A
    wilcoxon: Dict[Tuple[str, str], Optional[WilcoxonResult]] = field(default_factory=dict)
    warnings: List[str] = field(default_factory=list)
    std_ddof: int = STD_DDOF


# -----------------------------
# Descriptivos
# -----------------------------

def summarize(best_fitnesses: Sequence[float]) -> Tuple[float, float]:
    """
    Media aritmética y desviación estándar muestral (divisor n-1).
    Con un solo valor la desviación es 0.

    Raises:
        UsageError: Si la secuencia está vacía.
    """
    values = np.asarray(best_fitnesses, dtype=float)
    if values.size == 0:
        raise UsageError("summarize requiere al menos un valor")
    mean = float(np.mean(values))
    std = float(np.std(values, ddof=STD_DDOF)) if values.size > 1 else 0.0
    return mean, std


def summarize_cell(algorithm: str, function: str, values: Sequence[Optional[float]]) -> CellSummary:
    """Resumen de una celda; las corridas fallidas (None) se ignoran."""
    present = [float(v) for v in values if v is not None]
    if not present:
        return CellSummary(algorithm, function, None, None, 0, missing=True)
    mean, std = summarize(present)
    return CellSummary(algorithm, function, mean, std, len(present))


# -----------------------------
# Rankings
# -----------------------------

def rank_row(
    means: Sequence[Tuple[str, Optional[float]]],
    minimize: bool = True,
    f_min: Optional[float] = None,
) -> Dict[str, float]:
    """
    Rangos de una fila (una función) entre k algoritmos.

    Rango 1 = mejor. Con `f_min` se ordena por el error |media - f_min|;
    sin él, por la media (menor es mejor al minimizar). Las celdas
    faltantes (None) quedan después de todas las presentes y los empates
    reciben el rango promedio.

    Raises:
        UsageError: Si hay menos de dos algoritmos o nombres repetidos.
    """
    if len(means) < 2:
        raise UsageError("rank_row requiere al menos dos algoritmos")
    names = [name for name, _ in means]
    if len(set(names)) != len(names):
        raise UsageError(f"Algoritmos repetidos en la fila: {names}")

    present = [(name, float(value)) for name, value in means if value is not None]
    missing = [name for name, value in means if value is None]

    ranks: Dict[str, float] = {}
    if present:
        values = np.array([value for _, value in present])
        if f_min is not None:
            keys = np.abs(values - f_min)
        else:
            keys = values if minimize else -values
        for (name, _), rank in zip(present, sps.rankdata(keys, method="average")):
            ranks[name] = float(rank)

    if missing:
        # las faltantes empatan entre sí en las últimas posiciones
        shared = (len(present) + 1 + len(means)) / 2.0
        for name in missing:
            ranks[name] = shared

    return {name: ranks[name] for name in names}


def default_groups(functions: Sequence[str]) -> Dict[str, List[str]]:
    """Bloques de la tabla de rankings: F1-F7, F8-F23 y CEC (si aparecen)."""
    groups: Dict[str, List[str]] = {"F1-F7": [], "F8-F23": [], "CEC": []}
    for fid in functions:
        upper = fid.upper()
        if upper.startswith("CEC"):
            groups["CEC"].append(fid)
        elif upper.startswith("F") and upper[1:].isdigit():
            groups["F1-F7" if int(upper[1:]) <= 7 else "F8-F23"].append(fid)
    return {name: members for name, members in groups.items() if members}


def aggregate_ranks(
    per_function_ranks: Mapping[str, Mapping[str, float]],
    algorithms: Optional[Sequence[str]] = None,
    groups: Optional[Mapping[str, Sequence[str]]] = None,
) -> RankTable:
    """
    Totales (suma por columna), promedios (total / número de funciones) y
    subtotales por bloque.

    Raises:
        UsageError: Si la tabla está vacía o a alguna fila le falta un algoritmo.
    """
    functions = list(per_function_ranks.keys())
    if not functions:
        raise UsageError("aggregate_ranks requiere al menos una función")
    if algorithms is None:
        algorithms = list(per_function_ranks[functions[0]].keys())
    algorithms = list(algorithms)

    for fid in functions:
        absent = [alg for alg in algorithms if alg not in per_function_ranks[fid]]
        if absent:
            raise UsageError(f"Fila {fid} sin rango para: {', '.join(absent)}")

    def column_sums(members: Sequence[str]) -> Dict[str, float]:
        return {alg: float(sum(per_function_ranks[fid][alg] for fid in members)) for alg in algorithms}

    totals = column_sums(functions)
    averages = {alg: totals[alg] / len(functions) for alg in algorithms}

    groups = dict(groups) if groups is not None else default_groups(functions)
    subtotals: Dict[str, Dict[str, float]] = {}
    subtotal_averages: Dict[str, Dict[str, float]] = {}
    for name, members in groups.items():
        members = [fid for fid in members if fid in per_function_ranks]
        if not members:
            continue
        subtotals[name] = column_sums(members)
        subtotal_averages[name] = {alg: subtotals[name][alg] / len(members) for alg in algorithms}
        groups[name] = members

    return RankTable(
        algorithms=algorithms,
        functions=functions,
        per_function_ranks={fid: dict(per_function_ranks[fid]) for fid in functions},
        totals=totals,
        averages=averages,
        subtotals=subtotals,
        subtotal_averages=subtotal_averages,
        group_functions={name: list(members) for name, members in groups.items() if name in subtotals},
    )


def friedman_statistic(totals: Sequence[float], n_functions: int, k: Optional[int] = None) -> float:
    """
    chi2_F = 12 / (N*k*(k+1)) * sum(R_j^2) - 3*N*(k+1), con R_j las sumas de rangos.

    Raises:
        UsageError: Si k < 2, N < 1 o el número de totales no coincide con k.
    """
    totals = [float(t) for t in totals]
    k = len(totals) if k is None else k
    if k < 2:
        raise UsageError(f"friedman_statistic requiere k >= 2, recibido {k}")
    if n_functions < 1:
        raise UsageError(f"friedman_statistic requiere N >= 1, recibido {n_functions}")
    if len(totals) != k:
        raise UsageError(f"Se esperaban {k} totales, recibidos {len(totals)}")
    sum_sq = sum(t * t for t in totals)
    return 12.0 / (n_functions * k * (k + 1)) * sum_sq - 3.0 * n_functions * (k + 1)


def friedman_test(totals: Sequence[float], n_functions: int, k: Optional[int] = None) -> FriedmanResult:
    k = len(totals) if k is None else k
    statistic = friedman_statistic(totals, n_functions, k)
    p_value = float(sps.chi2.sf(statistic, k - 1))
    return FriedmanResult(statistic=statistic, p_value=min(1.0, max(0.0, p_value)), n_functions=n_functions, k=k)


# -----------------------------
# Wilcoxon
# -----------------------------

def _exact_lower_tail(doubled_ranks: np.ndarray, doubled_w: int) -> float:
    """
    P(T <= W) bajo H0, con T la suma de rangos positivos. Cuenta los 2^n
    signos por programación dinámica sobre rangos duplicados (enteros).
    """
    total = int(doubled_ranks.sum())
    counts = np.zeros(total + 1, dtype=np.float64)
    counts[0] = 1.0
    for r in doubled_ranks:
        r = int(r)
        shifted = np.zeros_like(counts)
        shifted[r:] = counts[: total + 1 - r]
        counts = counts + shifted
    n = doubled_ranks.size
    return float(counts[: doubled_w + 1].sum() / (2.0 ** n))


def wilcoxon_signed_rank(a: Sequence[float], b: Sequence[float]) -> WilcoxonResult:
    """
    Prueba de Wilcoxon de rangos con signo (bilateral) sobre d_i = a_i - b_i.

    - Las diferencias nulas se descartan.
    - |d| se ordena con rango promedio en empates; W = min(W+, W-).
    - n <= 25: p exacto por enumeración de signos; n > 25: aproximación
      normal con corrección de continuidad y de empates.
    - Todas las diferencias nulas: método Degenerate con p = 1.

    Raises:
        UsageError: Si las longitudes difieren o las muestras están vacías.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise UsageError(f"Muestras de longitud distinta: {a.shape} vs {b.shape}")
    if a.size == 0:
        raise UsageError("wilcoxon_signed_rank requiere al menos un par")

    diffs = a - b
    diffs = diffs[diffs != 0.0]
    n = int(diffs.size)
    if n == 0:
        return WilcoxonResult(0, 0.0, 1.0, WilcoxonMethod.DEGENERATE)

    ranks = sps.rankdata(np.abs(diffs), method="average")
    w_plus = float(ranks[diffs > 0].sum())
    w_minus = float(ranks[diffs < 0].sum())
    w = min(w_plus, w_minus)

    if n <= EXACT_WILCOXON_MAX_N:
        doubled = np.rint(2.0 * ranks).astype(np.int64)
        p_value = min(1.0, 2.0 * _exact_lower_tail(doubled, int(round(2.0 * w))))
        method = WilcoxonMethod.EXACT
    else:
        mu = n * (n + 1) / 4.0
        _, tie_counts = np.unique(ranks, return_counts=True)
        tie_term = float(np.sum(tie_counts ** 3 - tie_counts)) / 48.0
        sigma = math.sqrt(n * (n + 1) * (2 * n + 1) / 24.0 - tie_term)
        z = (w - mu + 0.5) / sigma
        p_value = min(1.0, 2.0 * float(sps.norm.cdf(z)))
        method = WilcoxonMethod.NORMAL_APPROX

    return WilcoxonResult(
        n_effective=n,
        w_statistic=w,
        p_value=p_value,
        method=method,
        w_plus=w_plus,
        w_minus=w_minus,
    )


# -----------------------------
# Reporte completo
# -----------------------------

def build_report(
    cells: Mapping[Tuple[str, str], CellSummary],
    algorithms: Sequence[str],
    functions: Sequence[str],
    f_mins: Optional[Mapping[str, Optional[float]]] = None,
    paired: Optional[Mapping[Tuple[str, str], Mapping[int, float]]] = None,
    baseline: Optional[str] = None,
    warnings: Optional[Sequence[str]] = None,
) -> StatReport:
    """
    Arma el reporte de comparación.

    Args:
        cells: (algoritmo, función) -> CellSummary
        algorithms: Orden de columnas
        functions: Orden de filas
        f_mins: Óptimo conocido por función (ordena por error cuando existe)
        paired: (algoritmo, función) -> {run_index: best_fitness}; sin él no hay Wilcoxon
        baseline: Algoritmo de referencia para Wilcoxon
        warnings: Advertencias previas (p. ej. versión de la suite)
    """
    algorithms = list(algorithms)
    functions = list(functions)
    f_mins = f_mins or {}
    report_warnings = list(warnings or [])

    per_function: Dict[str, Dict[str, float]] = {}
    for fid in functions:
        row = []
        for alg in algorithms:
            cell = cells.get((alg, fid))
            if cell is None or cell.missing:
                report_warnings.append(f"Celda faltante: {alg}/{fid} (rango al final)")
                row.append((alg, None))
            else:
                row.append((alg, cell.mean))
        per_function[fid] = rank_row(row, minimize=True, f_min=f_mins.get(fid))

    rank_table = aggregate_ranks(per_function, algorithms)
    friedman = friedman_test([rank_table.totals[alg] for alg in algorithms], len(functions))

    wilcoxon: Dict[Tuple[str, str], Optional[WilcoxonResult]] = {}
    if baseline is not None:
        if baseline not in algorithms:
            raise UsageError(f"Baseline '{baseline}' no está entre los algoritmos: {', '.join(algorithms)}")
        for fid in functions:
            reference = (paired or {}).get((baseline, fid), {})
            for alg in algorithms:
                if alg == baseline:
                    continue
                runs = (paired or {}).get((alg, fid), {})
                shared = sorted(set(runs) & set(reference))
                if not shared:
                    wilcoxon[(fid, alg)] = None
                    report_warnings.append(f"Sin pares para Wilcoxon: {alg} vs {baseline} en {fid}")
                    continue
                wilcoxon[(fid, alg)] = wilcoxon_signed_rank(
                    [runs[i] for i in shared], [reference[i] for i in shared]
                )

    for message in report_warnings:
        logger.warning(f"⚠️ {message}")

    return StatReport(
        algorithms=algorithms,
        functions=functions,
        cells=dict(cells),
        rank_table=rank_table,
        friedman=friedman,
        baseline=baseline,
        wilcoxon=wilcoxon,
        warnings=report_warnings,
    )
