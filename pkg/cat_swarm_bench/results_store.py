"""
Persistencia de resultados.

Archivo de resultados (CSV):

    # format_version = 1
    # suite_version = 1
    # ... parámetros efectivos, una línea `# clave = valor` cada uno
    algorithm,function,run_index,seed,best_fitness,evaluations_used,best_position
    cso,F1,0,123...,3.1e-14,75030,0.1;-0.2;...
    # failure = alg|función|corrida|mensaje
    # end = <número de registros>

Las trazas van en un archivo hermano `<nombre>.trace.csv`. Los floats se
escriben con repr() para que la lectura sea exacta.
"""

import csv
import io
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Tuple, Union

import pandas as pd

from .config import RESULTS_FORMAT_VERSION, SEED_DERIVATION_VERSION, SUITE_VERSION
from .errors import ResultsParseError, UsageError
from .harness import TrialResult
from .stats import STD_DDOF, CellSummary

logger = logging.getLogger(__name__)

RESULTS_HEADER = [
    "algorithm",
    "function",
    "run_index",
    "seed",
    "best_fitness",
    "evaluations_used",
    "best_position",
]
TRACE_HEADER = ["algorithm", "function", "run_index", "iteration", "best_fitness"]
MEANS_COLUMNS = ["function", "algorithm", "mean", "std"]

PathLike = Union[str, Path]


@dataclass
class ResultSet:
    results: List[TrialResult]
    metadata: Dict[str, str] = field(default_factory=dict)
    warnings: List[str] = field(default_factory=list)


def trace_path(path: PathLike) -> Path:
    path = Path(path)
    return path.with_name(f"{path.stem}.trace.csv")


def _clean(value) -> str:
    return str(value).replace("\r", " ").replace("\n", " ")


def _format_float(value: Optional[float]) -> str:
    return "" if value is None else repr(float(value))


def render_results(results: List[TrialResult], metadata: Optional[Mapping[str, object]] = None) -> Tuple[str, Dict[str, str]]:
    header: Dict[str, str] = {
        "format_version": RESULTS_FORMAT_VERSION,
        "suite_version": SUITE_VERSION,
        "seed_derivation_version": SEED_DERIVATION_VERSION,
        "std_ddof": str(STD_DDOF),
    }
    for key, value in (metadata or {}).items():
        if key in header:
            continue
        header[_clean(key).strip()] = _clean(value).strip()

    buffer = io.StringIO()
    for key, value in header.items():
        buffer.write(f"# {key} = {value}\n")

    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(RESULTS_HEADER)
    for result in results:
        writer.writerow([
            result.algorithm,
            result.function,
            result.run_index,
            result.seed,
            "" if result.failed else _format_float(result.best_fitness),
            result.evaluations_used,
            ";".join(repr(float(v)) for v in result.best_position),
        ])
    for result in results:
        if result.failed:
            message = _clean(result.error or "sin mensaje")
            buffer.write(f"# failure = {result.algorithm}|{result.function}|{result.run_index}|{message}\n")
    buffer.write(f"# end = {len(results)}\n")
    return buffer.getvalue(), header


def render_traces(results: List[TrialResult]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(TRACE_HEADER)
    for result in results:
        for iteration, value in enumerate(result.trace):
            writer.writerow([result.algorithm, result.function, result.run_index, iteration, repr(float(value))])
    return buffer.getvalue()


def write_results(
    results: List[TrialResult],
    path: PathLike,
    metadata: Optional[Mapping[str, object]] = None,
) -> Dict[str, str]:
    """
    Escribe resultados y trazas.

    Returns:
        Dict con los metadatos efectivamente escritos.

    Raises:
        OSError: Si no se puede escribir en la ruta.
    """
    path = Path(path)
    text, header = render_results(results, metadata)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8", newline="")
    trace_path(path).write_text(render_traces(results), encoding="utf-8", newline="")
    logger.info(f"✅ {len(results)} resultados guardados en {path}")
    return header


def _parse_int(value: str, record_index: int, field_name: str, line_number: int) -> int:
    try:
        return int(value)
    except ValueError:
        raise ResultsParseError(f"Entero inválido '{value}'", record_index, field_name, line_number)


def _parse_float(value: str, record_index: int, field_name: str, line_number: int) -> float:
    try:
        return float(value)
    except ValueError:
        raise ResultsParseError(f"Número inválido '{value}'", record_index, field_name, line_number)


def parse_results(text: str) -> ResultSet:
    """
    Interpreta el contenido de un archivo de resultados.

    Raises:
        ResultsParseError: Encabezado inválido, campos mal formados o
            archivo truncado (sin `# end` o con menos registros).
    """
    metadata: Dict[str, str] = {}
    failures: Dict[Tuple[str, str, int], str] = {}
    results: List[TrialResult] = []
    header_seen = False
    expected: Optional[int] = None

    for line_number, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        if expected is not None:
            raise ResultsParseError("Contenido después de '# end'", len(results), None, line_number)

        if line.startswith("#"):
            key, sep, value = line[1:].partition("=")
            if not sep:
                raise ResultsParseError(f"Línea de metadatos sin '=': {line!r}", None, None, line_number)
            key, value = key.strip(), value.strip()
            if key == "end":
                expected = _parse_int(value, len(results), "end", line_number)
            elif key == "failure":
                parts = value.split("|", 3)
                if len(parts) != 4:
                    raise ResultsParseError("Línea de fallo mal formada", None, "failure", line_number)
                alg, fid, run, message = parts
                failures[(alg, fid, _parse_int(run, len(results), "failure", line_number))] = message
            elif header_seen:
                raise ResultsParseError(f"Metadato '{key}' después del encabezado", len(results), key, line_number)
            else:
                metadata[key] = value
            continue

        row = next(csv.reader([line]))
        if not header_seen:
            if row != RESULTS_HEADER:
                raise ResultsParseError(
                    f"Encabezado inesperado {row}; se esperaba {RESULTS_HEADER}", None, "header", line_number
                )
            header_seen = True
            continue

        record_index = len(results)
        if len(row) != len(RESULTS_HEADER):
            raise ResultsParseError(
                f"Se esperaban {len(RESULTS_HEADER)} campos, hay {len(row)}", record_index, None, line_number
            )
        algorithm, function, run_index, seed, best_fitness, evaluations_used, best_position = row
        position = [
            _parse_float(v, record_index, "best_position", line_number)
            for v in best_position.split(";")
            if v != ""
        ]
        results.append(TrialResult(
            algorithm=algorithm,
            function=function,
            run_index=_parse_int(run_index, record_index, "run_index", line_number),
            seed=_parse_int(seed, record_index, "seed", line_number),
            best_fitness=None if best_fitness == "" else _parse_float(best_fitness, record_index, "best_fitness", line_number),
            evaluations_used=_parse_int(evaluations_used, record_index, "evaluations_used", line_number),
            best_position=position,
        ))

    if not header_seen:
        raise ResultsParseError("Falta el encabezado de columnas", 0, "header")
    if expected is None:
        raise ResultsParseError("Archivo truncado: falta la línea '# end'", len(results))
    if expected != len(results):
        raise ResultsParseError(
            f"Archivo truncado: '# end' declara {expected} registros y hay {len(results)}",
            min(expected, len(results)),
        )

    for result in results:
        message = failures.get(result.key)
        if message is not None or result.best_fitness is None:
            result.error = message or "ensayo fallido"

    warnings: List[str] = []
    found = metadata.get("suite_version")
    if found != SUITE_VERSION:
        warnings.append(f"Versión de suite distinta: archivo={found}, actual={SUITE_VERSION}")
    found_format = metadata.get("format_version")
    if found_format != RESULTS_FORMAT_VERSION:
        warnings.append(f"Versión de formato distinta: archivo={found_format}, actual={RESULTS_FORMAT_VERSION}")
    return ResultSet(results=results, metadata=metadata, warnings=warnings)


def parse_traces(text: str, results: List[TrialResult]) -> None:
    by_key = {result.key: result for result in results}
    for result in results:
        result.trace = []
    reader = csv.reader(io.StringIO(text))
    for line_number, row in enumerate(reader, start=1):
        if line_number == 1:
            if row != TRACE_HEADER:
                raise ResultsParseError(f"Encabezado de trazas inesperado {row}", None, "header", line_number)
            continue
        if not row:
            continue
        if len(row) != len(TRACE_HEADER):
            raise ResultsParseError("Fila de traza incompleta", None, None, line_number)
        key = (row[0], row[1], _parse_int(row[2], None, "run_index", line_number))
        result = by_key.get(key)
        if result is None:
            raise ResultsParseError(f"Traza sin ensayo correspondiente: {key}", None, None, line_number)
        iteration = _parse_int(row[3], None, "iteration", line_number)
        if iteration != len(result.trace):
            raise ResultsParseError(f"Iteración fuera de orden ({iteration})", None, "iteration", line_number)
        result.trace.append(_parse_float(row[4], None, "best_fitness", line_number))


def load_results(path: PathLike) -> ResultSet:
    """
    Lee un archivo de resultados y su archivo de trazas (si existe).

    Raises:
        ResultsParseError: Si el archivo no existe o está mal formado.
    """
    path = Path(path)
    if not path.is_file():
        raise ResultsParseError(f"Archivo de resultados no encontrado: {path}")
    result_set = parse_results(path.read_text(encoding="utf-8"))

    traces = trace_path(path)
    if traces.is_file():
        parse_traces(traces.read_text(encoding="utf-8"), result_set.results)
    else:
        result_set.warnings.append(f"Sin archivo de trazas: {traces.name}")

    for message in result_set.warnings:
        logger.warning(f"⚠️ {message}")
    return result_set


# -----------------------------
# Tablas de medias preparadas
# -----------------------------

@dataclass
class MeansTable:
    algorithms: List[str]
    functions: List[str]
    cells: Dict[Tuple[str, str], CellSummary]
    f_mins: Dict[str, Optional[float]]


def is_means_table(path: PathLike) -> bool:
    """True si la primera línea no comentada es el encabezado de una tabla de medias."""
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            if line.strip() and not line.startswith("#"):
                columns = [c.strip() for c in line.strip().split(",")]
                return columns[:4] == MEANS_COLUMNS
    return False


def load_means_table(path: PathLike) -> MeansTable:
    """
    Lee una tabla `function, algorithm, mean, std[, f_min]` con `NA` para
    celdas faltantes.

    Raises:
        ResultsParseError: Si faltan columnas o hay valores no numéricos.
    """
    try:
        frame = pd.read_csv(
            path, comment="#", na_values=["NA", "N/A"], keep_default_na=False, dtype=str, skipinitialspace=True
        )
    except (OSError, pd.errors.ParserError) as e:
        raise ResultsParseError(f"No se pudo leer la tabla de medias: {e}")

    frame.columns = [c.strip() for c in frame.columns]
    absent = [c for c in MEANS_COLUMNS if c not in frame.columns]
    if absent:
        raise ResultsParseError(f"Faltan columnas: {', '.join(absent)}", None, absent[0], 1)

    algorithms: List[str] = []
    functions: List[str] = []
    cells: Dict[Tuple[str, str], CellSummary] = {}
    f_mins: Dict[str, Optional[float]] = {}

    for record_index, row in enumerate(frame.itertuples(index=False)):
        data = row._asdict()
        function = str(data["function"]).strip()
        algorithm = str(data["algorithm"]).strip()
        if function not in functions:
            functions.append(function)
        if algorithm not in algorithms:
            algorithms.append(algorithm)

        def number(name: str) -> Optional[float]:
            value = data.get(name)
            if value is None or pd.isna(value) or str(value).strip() == "":
                return None
            try:
                return float(value)
            except ValueError:
                raise ResultsParseError(f"Número inválido '{value}'", record_index, name, record_index + 2)

        mean, std = number("mean"), number("std")
        if mean is None:
            cells[(algorithm, function)] = CellSummary(algorithm, function, None, None, 0, missing=True)
        else:
            cells[(algorithm, function)] = CellSummary(algorithm, function, mean, std or 0.0, 1)
        if "f_min" in frame.columns:
            value = number("f_min")
            if value is not None:
                f_mins[function] = value
            else:
                f_mins.setdefault(function, None)

    if len(algorithms) < 2:
        raise UsageError("La tabla de medias debe tener al menos dos algoritmos")
    return MeansTable(algorithms=algorithms, functions=functions, cells=cells, f_mins=f_mins)
