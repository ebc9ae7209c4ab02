"""
Variantes de CSO:

- AICSO: inercia decreciente lineal en el rastreo (0.9 -> 0.4).
- PCSO: subgrupos con mejor local e intercambio cada ECH iteraciones.
- ICSO: estructura de PCSO con la inercia de AICSO.
"""

import logging
from typing import Callable, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .config import DEFAULTS
from .errors import NonFiniteFitnessError, UsageError
from .swarm_core import (
    BestRecord,
    CatSwarmOptimizer,
    ConvergenceTrace,
    CsoParams,
    TrackedObjective,
    assign_modes,
    best_of,
    check_invariants,
    evaluation_budget,
    init_population,
    refresh_stale,
    step_population,
)

logger = logging.getLogger(__name__)


class AicsoParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    base: CsoParams = Field(default_factory=CsoParams)
    w_start: float = Field(default=DEFAULTS["w_start"], gt=0.0, le=1.0)
    w_end: float = Field(default=DEFAULTS["w_end"], gt=0.0, le=1.0)

    @model_validator(mode="after")
    def _check_schedule(self):
        if self.w_start < self.w_end:
            raise ValueError(f"w_start ({self.w_start}) debe ser >= w_end ({self.w_end})")
        return self


class PcsoParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    base: CsoParams = Field(default_factory=CsoParams)
    n_groups: int = Field(default=DEFAULTS["n_groups"], ge=2)
    ech: int = Field(default=DEFAULTS["ech"], ge=1)

    @model_validator(mode="after")
    def _check_groups(self):
        if self.n_groups > self.base.n_cats:
            raise ValueError(
                f"n_groups ({self.n_groups}) no puede superar n_cats ({self.base.n_cats})"
            )
        return self


class IcsoParams(PcsoParams):
    w_start: float = Field(default=DEFAULTS["w_start"], gt=0.0, le=1.0)
    w_end: float = Field(default=DEFAULTS["w_end"], gt=0.0, le=1.0)

    @model_validator(mode="after")
    def _check_schedule(self):
        if self.w_start < self.w_end:
            raise ValueError(f"w_start ({self.w_start}) debe ser >= w_end ({self.w_end})")
        return self


def inertia_at(iteration: int, max_iters: int, w_start: float = 0.9, w_end: float = 0.4) -> float:
    """w = w_start - (w_start - w_end) * iteration / max_iters."""
    if max_iters < 1:
        raise UsageError(f"max_iters debe ser >= 1, recibido {max_iters}")
    if not 0 <= iteration <= max_iters:
        raise UsageError(f"iteración {iteration} fuera de [0, {max_iters}]")
    return w_start - (w_start - w_end) * (iteration / max_iters)


def _schedule(max_iters: int, w_start: float, w_end: float) -> Callable[[int], float]:
    return lambda iteration: inertia_at(iteration, max_iters, w_start, w_end)


def aicso_run(params: AicsoParams, objective, seed: Optional[int] = None):
    """
    CSO con inercia decreciente; con w_start = w_end = 1 reproduce el CSO
    original bit a bit bajo la misma semilla.
    """
    base = params.base
    optimizer = CatSwarmOptimizer(
        base, objective, inertia=_schedule(base.max_iters, params.w_start, params.w_end)
    )
    try:
        return optimizer.run(seed)
    except NonFiniteFitnessError as e:
        logger.error(f"❌ Corrida AICSO abortada: {e}")
        raise


def pcso_budget(params: PcsoParams) -> int:
    """Cota de evaluaciones: la del CSO más una re-evaluación por grupo y por intercambio."""
    exchanges = params.base.max_iters // params.ech
    return evaluation_budget(params.base) + params.n_groups * exchanges


class ParallelCatSwarmOptimizer:
    """
    PCSO: gatos repartidos round-robin en G grupos. Cada grupo corre el paso
    estándar con el rastreo atraído por su mejor local; cada ECH iteraciones
    el peor gato de cada grupo recibe una copia (posición y velocidad) del
    mejor local de otro grupo elegido al azar.
    """

    def __init__(
        self,
        params: PcsoParams,
        objective,
        inertia: Optional[Callable[[int], float]] = None,
    ):
        self.params = params
        self.objective = TrackedObjective(objective)
        self.inertia = inertia or (lambda iteration: 1.0)
        self.exchange_iterations: List[int] = []
        self.group_traces: List[List[float]] = []
        self.group_sizes: List[int] = []
        self.stats = {"exchanges": 0, "replacements": 0}

    def run(self, rng_seed: Optional[int] = None):
        base = self.params.base
        n_groups = self.params.n_groups
        seed = base.rng_seed if rng_seed is None else rng_seed
        rng = np.random.default_rng(seed)
        objective = self.objective
        v_max = base.resolve_v_max(objective)

        cats = init_population(base, objective, rng)
        groups = [[cats[i] for i in range(g, base.n_cats, n_groups)] for g in range(n_groups)]
        self.group_sizes = [len(group) for group in groups]

        local_best: List[BestRecord] = []
        local_velocity: List[np.ndarray] = []
        for group in groups:
            leader = group[best_of(group)]
            local_best.append(BestRecord(leader.position.copy(), leader.fitness, 0))
            local_velocity.append(leader.velocity.copy())
        self.group_traces = [[record.fitness] for record in local_best]

        first = int(np.argmin([record.fitness for record in local_best]))
        best = local_best[first].copy()
        for group in groups:
            assign_modes(group, base.mr, rng)

        trace = ConvergenceTrace()
        trace.record(best.fitness, objective.evaluations)

        for iteration in range(1, base.max_iters + 1):
            inertia_w = self.inertia(iteration - 1)
            for g, group in enumerate(groups):
                refresh_stale(group, objective, rng)
                step_population(group, local_best[g], base, objective, rng, inertia_w, v_max)
                leader = group[best_of(group)]
                if local_best[g].offer(leader.position, leader.fitness, iteration):
                    local_velocity[g] = leader.velocity.copy()
                best.offer(leader.position, leader.fitness, iteration)
                self.group_traces[g].append(local_best[g].fitness)
            if __debug__:
                check_invariants(cats, objective, v_max)

            if iteration % self.params.ech == 0:
                self._exchange(groups, local_best, local_velocity, rng)
                self.exchange_iterations.append(iteration)

            trace.record(best.fitness, objective.evaluations)
            for group in groups:
                assign_modes(group, base.mr, rng)

        logger.debug(
            f"✅ PCSO {objective.name}: mejor={best.fitness:.6e} "
            f"intercambios={self.stats['exchanges']} evaluaciones={objective.evaluations}"
        )
        return best, trace

    def _exchange(self, groups, local_best, local_velocity, rng: np.random.Generator) -> None:
        n_groups = len(groups)
        for g, group in enumerate(groups):
            worst = int(np.argmax([cat.fitness for cat in group]))
            others = [h for h in range(n_groups) if h != g]
            donor = others[int(rng.integers(len(others)))]
            cat = group[worst]
            cat.position = local_best[donor].position.copy()
            cat.velocity = local_velocity[donor].copy()
            cat.fitness = local_best[donor].fitness
            # se re-evalúa al inicio de la siguiente iteración
            cat.stale = True
            self.stats["replacements"] += 1
        self.stats["exchanges"] += 1


def pcso_run(params: PcsoParams, objective, seed: Optional[int] = None):
    try:
        return ParallelCatSwarmOptimizer(params, objective).run(seed)
    except NonFiniteFitnessError as e:
        logger.error(f"❌ Corrida PCSO abortada: {e}")
        raise


def icso_run(params: IcsoParams, objective, seed: Optional[int] = None):
    """PCSO con la inercia decreciente de AICSO."""
    schedule = _schedule(params.base.max_iters, params.w_start, params.w_end)
    try:
        return ParallelCatSwarmOptimizer(params, objective, inertia=schedule).run(seed)
    except NonFiniteFitnessError as e:
        logger.error(f"❌ Corrida ICSO abortada: {e}")
        raise
