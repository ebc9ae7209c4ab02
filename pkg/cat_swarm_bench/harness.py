"""
Orquestación de experimentos.

- Protocol: corridas x agentes x iteraciones sobre una lista de funciones
  y algoritmos, con semilla maestra.
- derive_seed: semilla por (algoritmo, función, corrida) con SHA-256.
- run_suite: ejecuta la grilla (opcionalmente en procesos) y devuelve los
  resultados en orden canónico (algoritmo, función, run_index).
- Los fallos de un plugin quedan como celdas fallidas, nunca abortan la suite.
"""

import hashlib
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, FrozenSet, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator

from .config import DEFAULTS, SEED_DERIVATION_VERSION, get_settings
from .errors import UsageError
from .objective_suite import lookup
from .stats import StatReport, build_report, summarize_cell

logger = logging.getLogger(__name__)


class Protocol(BaseModel):
    """Protocolo experimental y parámetros efectivos de todos los algoritmos."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    n_runs: int = Field(default=DEFAULTS["n_runs"], ge=1)
    n_agents: int = Field(default=DEFAULTS["n_cats"], ge=1)
    max_iters: int = Field(default=DEFAULTS["max_iters"], ge=1)
    function_ids: Tuple[str, ...] = ("F1",)
    algorithm_ids: Tuple[str, ...] = ("cso",)
    master_seed: int = Field(default=DEFAULTS["master_seed"], ge=0, lt=2 ** 64)
    # None = dimensión por defecto de cada función
    dim: Optional[int] = Field(default=None, ge=1)

    smp: int = Field(default=DEFAULTS["smp"], ge=1)
    srd: float = Field(default=DEFAULTS["srd"], gt=0.0, le=1.0)
    cdc: float = Field(default=DEFAULTS["cdc"], gt=0.0, le=1.0)
    spc: bool = DEFAULTS["spc"]
    mr: float = Field(default=DEFAULTS["mr"], ge=0.0, le=1.0)
    c1: float = Field(default=DEFAULTS["c1"], gt=0.0)
    v_max: Optional[float] = Field(default=None, gt=0.0)
    v_max_factor: float = Field(default=DEFAULTS["v_max_factor"], gt=0.0)
    w_start: float = Field(default=DEFAULTS["w_start"], gt=0.0, le=1.0)
    w_end: float = Field(default=DEFAULTS["w_end"], gt=0.0, le=1.0)
    n_groups: int = Field(default=DEFAULTS["n_groups"], ge=2)
    ech: int = Field(default=DEFAULTS["ech"], ge=1)

    @field_validator("function_ids")
    @classmethod
    def _resolve_functions(cls, value):
        if not value:
            raise ValueError("se requiere al menos una función")
        return tuple(lookup(fid).id for fid in value)

    @field_validator("algorithm_ids")
    @classmethod
    def _normalize_algorithms(cls, value):
        if not value:
            raise ValueError("se requiere al menos un algoritmo")
        ids = tuple(str(alg).strip().lower() for alg in value)
        if len(set(ids)) != len(ids):
            raise ValueError(f"algoritmos repetidos: {ids}")
        return ids

    def effective_config(self) -> Dict[str, object]:
        """Configuración completa, en el orden en que se escribe como metadatos."""
        data = self.model_dump()
        data["function_ids"] = ",".join(self.function_ids)
        data["algorithm_ids"] = ",".join(self.algorithm_ids)
        return data


@dataclass
class TrialResult:
    algorithm: str
    function: str
    run_index: int
    seed: int
    best_fitness: Optional[float]
    best_position: List[float] = field(default_factory=list)
    evaluations_used: int = 0
    trace: List[float] = field(default_factory=list)
    error: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.error is not None or self.best_fitness is None

    @property
    def key(self) -> Tuple[str, str, int]:
        return (self.algorithm, self.function, self.run_index)


@dataclass(frozen=True)
class OptimizerPlugin:
    """
    Optimizador enchufable.

    `run(protocol, objective, seed)` devuelve un TrialResult (el harness
    completa algorithm/function/run_index). `budget(protocol, objective)`
    es la cota documentada de evaluaciones.
    """

    id: str
    run: Callable
    budget: Optional[Callable] = None
    capabilities: FrozenSet[str] = frozenset({"continuous", "box-bounded", "minimization"})
    description: str = ""


PLUGINS: Dict[str, OptimizerPlugin] = {}
_defaults_loaded = False


def register_plugin(plugin: OptimizerPlugin) -> OptimizerPlugin:
    """Registra (o reemplaza) un plugin por id."""
    if "minimization" not in plugin.capabilities:
        raise UsageError(f"El plugin '{plugin.id}' debe soportar minimización")
    PLUGINS[plugin.id.lower()] = plugin
    return plugin


def _load_default_plugins() -> None:
    global _defaults_loaded
    if not _defaults_loaded:
        _defaults_loaded = True
        from .services import optimizer_plugins

        optimizer_plugins.register_defaults()


def get_plugin(algorithm_id: str) -> OptimizerPlugin:
    _load_default_plugins()
    try:
        return PLUGINS[algorithm_id.lower()]
    except KeyError:
        raise UsageError(
            f"Algoritmo desconocido: '{algorithm_id}' (disponibles: {', '.join(available_algorithms())})"
        )


def available_algorithms() -> List[str]:
    _load_default_plugins()
    return sorted(PLUGINS)


def derive_seed(master: int, algorithm: str, function: str, run_index: int) -> int:
    """
    Semilla de 64 bits: primeros 8 bytes (big-endian) del SHA-256 de
    "v<versión>|master|algoritmo|función|corrida". Estable entre versiones
    mientras SEED_DERIVATION_VERSION no cambie.
    """
    material = f"v{SEED_DERIVATION_VERSION}|{int(master)}|{algorithm.lower()}|{function.upper()}|{int(run_index)}"
    digest = hashlib.sha256(material.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def suite_objective(protocol: Protocol, function: str):
    """Objetivo de una celda: `dim` del protocolo solo aplica a funciones escalables."""
    entry = lookup(function)
    return entry.objective(None if entry.fixed_dim else protocol.dim)


def trial_grid(protocol: Protocol) -> List[Tuple[str, str, int]]:
    return [
        (alg, fid, run_index)
        for alg in protocol.algorithm_ids
        for fid in protocol.function_ids
        for run_index in range(protocol.n_runs)
    ]


def run_trial(protocol: Protocol, algorithm: str, function: str, run_index: int) -> TrialResult:
    """Ejecuta una celda de la grilla; cualquier excepción queda en `error`."""
    seed = derive_seed(protocol.master_seed, algorithm, function, run_index)
    try:
        plugin = get_plugin(algorithm)
        objective = suite_objective(protocol, function)
        result = plugin.run(protocol, objective, seed)
        return replace(result, algorithm=algorithm, function=function, run_index=run_index, seed=seed)
    except Exception as e:
        logger.error(f"❌ Falló {algorithm}/{function}/corrida {run_index}: {e}")
        return TrialResult(
            algorithm=algorithm,
            function=function,
            run_index=run_index,
            seed=seed,
            best_fitness=None,
            error=f"{type(e).__name__}: {e}",
        )


def _run_task(task) -> TrialResult:
    protocol, algorithm, function, run_index = task
    return run_trial(protocol, algorithm, function, run_index)


def run_suite(protocol: Protocol, workers: Optional[int] = None) -> List[TrialResult]:
    """
    Ejecuta |algoritmos| x |funciones| x n_runs ensayos.

    Args:
        protocol: Protocolo validado
        workers: Procesos en paralelo (default: CSO_WORKERS)

    Returns:
        Lista de TrialResult en orden (algoritmo, función, run_index),
        independiente del número de procesos.

    Raises:
        UsageError: Si algún algoritmo no está registrado.
    """
    for alg in protocol.algorithm_ids:
        get_plugin(alg)
    workers = workers or get_settings().workers
    tasks = [(protocol, alg, fid, run_index) for alg, fid, run_index in trial_grid(protocol)]

    logger.info(
        f"🚀 Suite: {len(protocol.algorithm_ids)} algoritmos x {len(protocol.function_ids)} funciones "
        f"x {protocol.n_runs} corridas ({len(tasks)} ensayos, {workers} procesos)"
    )
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            results = list(executor.map(_run_task, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    else:
        results = [_run_task(task) for task in tasks]

    failed = sum(1 for result in results if result.failed)
    if failed:
        logger.warning(f"⚠️ {failed} ensayos fallidos de {len(results)}")
    logger.info(f"✅ Suite completada: {len(results) - failed} ensayos correctos")
    return results


def trial_budget(protocol: Protocol, result: TrialResult) -> Optional[int]:
    """Cota de evaluaciones del plugin para la celda de `result`."""
    plugin = get_plugin(result.algorithm)
    if plugin.budget is None:
        return None
    return plugin.budget(protocol, suite_objective(protocol, result.function))


def check_trial(result: TrialResult, tolerance: float = 0.0) -> List[str]:
    """Problemas de un TrialResult: traza no monótona o último valor distinto del mejor."""
    problems = []
    if result.failed:
        return problems
    trace = result.trace
    for i in range(1, len(trace)):
        if trace[i] > trace[i - 1] + tolerance:
            problems.append(f"traza creciente en la iteración {i}")
            break
    if trace and trace[-1] != result.best_fitness:
        problems.append("el último valor de la traza difiere de best_fitness")
    return problems


def f_min_for_results(results: Sequence[TrialResult]) -> Dict[str, Optional[float]]:
    """f_min por función, con la dimensión observada en las posiciones."""
    f_mins: Dict[str, Optional[float]] = {}
    for result in results:
        if result.function in f_mins and f_mins[result.function] is not None:
            continue
        try:
            entry = lookup(result.function)
        except UsageError:
            f_mins[result.function] = None
            continue
        dim = len(result.best_position) or entry.default_dim
        f_mins[result.function] = entry.f_min_for(dim)
    return f_mins


def compare_results(
    results: Sequence[TrialResult],
    baseline: Optional[str] = None,
    warnings: Optional[Sequence[str]] = None,
) -> StatReport:
    """Reporte de comparación (tablas de medias, rankings, Friedman y Wilcoxon)."""
    if not results:
        raise UsageError("No hay ensayos para comparar")
    algorithms: List[str] = []
    functions: List[str] = []
    values: Dict[Tuple[str, str], List[Optional[float]]] = {}
    paired: Dict[Tuple[str, str], Dict[int, float]] = {}
    failures: List[str] = []

    for result in results:
        if result.algorithm not in algorithms:
            algorithms.append(result.algorithm)
        if result.function not in functions:
            functions.append(result.function)
        cell = (result.algorithm, result.function)
        values.setdefault(cell, []).append(result.best_fitness)
        paired.setdefault(cell, {})
        if result.failed:
            failures.append(f"Ensayo fallido {result.algorithm}/{result.function}/{result.run_index}: {result.error}")
        else:
            paired[cell][result.run_index] = result.best_fitness

    if len(algorithms) < 2:
        raise UsageError(f"Se requieren al menos dos algoritmos para comparar, hay: {', '.join(algorithms)}")

    cells = {
        (alg, fid): summarize_cell(alg, fid, values.get((alg, fid), []))
        for alg in algorithms
        for fid in functions
    }
    if baseline is None and len(algorithms) > 1:
        baseline = algorithms[-1]
    return build_report(
        cells,
        algorithms,
        functions,
        f_mins=f_min_for_results(results),
        paired=paired,
        baseline=baseline,
        warnings=list(warnings or []) + failures,
    )


def baseline_random_search(protocol: Protocol, objective, seed: int) -> TrialResult:
    from .services.random_search import baseline_random_search as _random_search

    return _random_search(protocol, objective, seed)
