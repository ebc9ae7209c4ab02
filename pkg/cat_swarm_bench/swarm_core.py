"""
Motor CSO original: población, asignación de modos, modo búsqueda
(seeking), modo rastreo (tracing) y memoria del mejor global.

Convenciones:
- Minimización.
- MR es la fracción de gatos en modo rastreo; round(MR*N) con redondeo
  a la mitad hacia arriba.
- Tras cada paso las posiciones quedan dentro de la caja y |v| <= v_max.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .config import DEFAULTS
from .errors import ConfigurationError, NonFiniteFitnessError, UsageError

logger = logging.getLogger(__name__)


class Mode(str, Enum):
    UNASSIGNED = "unassigned"
    SEEKING = "seeking"
    TRACING = "tracing"


class Variant(str, Enum):
    CSO = "cso"
    AICSO = "aicso"
    PCSO = "pcso"
    ICSO = "icso"


@dataclass
class Cat:
    position: np.ndarray
    velocity: np.ndarray
    fitness: float
    mode: Mode = Mode.UNASSIGNED
    # fitness pendiente de re-evaluar (reemplazos de PCSO)
    stale: bool = False


@dataclass
class BestRecord:
    position: np.ndarray
    fitness: float
    iteration_found: int = 0

    def offer(self, position: np.ndarray, fitness: float, iteration: int) -> bool:
        """Reemplaza el registro solo si `fitness` mejora estrictamente."""
        if fitness < self.fitness:
            self.position = np.array(position, dtype=float, copy=True)
            self.fitness = float(fitness)
            self.iteration_found = iteration
            return True
        return False

    def copy(self) -> "BestRecord":
        return BestRecord(self.position.copy(), self.fitness, self.iteration_found)


@dataclass
class ConvergenceTrace:
    """Mejor fitness y evaluaciones acumuladas por iteración (índice 0 = población inicial)."""

    best_fitness: List[float] = field(default_factory=list)
    evaluations: List[int] = field(default_factory=list)

    def record(self, best_fitness: float, evaluations: int) -> None:
        self.best_fitness.append(float(best_fitness))
        self.evaluations.append(int(evaluations))

    @property
    def evaluations_used(self) -> int:
        return self.evaluations[-1] if self.evaluations else 0


class CsoParams(BaseModel):
    """Parámetros del CSO original (y base de las variantes)."""

    model_config = ConfigDict(frozen=True)

    n_cats: int = Field(default=DEFAULTS["n_cats"], ge=1)
    smp: int = Field(default=DEFAULTS["smp"], ge=1)
    srd: float = Field(default=DEFAULTS["srd"], gt=0.0, le=1.0)
    cdc: float = Field(default=DEFAULTS["cdc"], gt=0.0, le=1.0)
    spc: bool = DEFAULTS["spc"]
    mr: float = Field(default=DEFAULTS["mr"], ge=0.0, le=1.0)
    c1: float = Field(default=DEFAULTS["c1"], gt=0.0)
    v_max: Optional[float] = Field(default=None, gt=0.0)
    v_max_factor: float = Field(default=DEFAULTS["v_max_factor"], gt=0.0)
    max_iters: int = Field(default=DEFAULTS["max_iters"], ge=0)
    rng_seed: int = Field(default=0, ge=0, lt=2 ** 64)
    variant: Variant = Variant.CSO

    def resolve_v_max(self, objective) -> np.ndarray:
        """v_max por dimensión: valor explícito o factor * (upper - lower)."""
        if self.v_max is not None:
            return np.full(objective.dim, float(self.v_max))
        return self.v_max_factor * (objective.upper - objective.lower)

    def mutated_dims(self, dim: int) -> int:
        return max(1, round_half_up(self.cdc * dim))


def round_half_up(value: float) -> int:
    """Redondeo a la mitad alejándose de cero para valores no negativos."""
    return int(math.floor(value + 0.5))


def evaluation_budget(params: CsoParams) -> int:
    """Cota superior de evaluaciones: población inicial + N*SMP por iteración."""
    return params.n_cats + params.max_iters * params.n_cats * params.smp


class TrackedObjective:
    """
    Envoltorio que cuenta evaluaciones y corta la corrida ante NaN/inf.
    Expone la misma interfaz que `Objective`.
    """

    def __init__(self, objective):
        self.objective = objective
        self.name = objective.name
        self.dim = objective.dim
        self.lower = objective.lower
        self.upper = objective.upper
        self.f_min = objective.f_min
        self.evaluations = 0

    def evaluate(self, x, rng: Optional[np.random.Generator] = None) -> float:
        value = self.objective.evaluate(x, rng=rng)
        self.evaluations += 1
        if not math.isfinite(value):
            raise NonFiniteFitnessError(self.name, x, value)
        return value

    def evaluate_many(self, xs, rng: Optional[np.random.Generator] = None) -> np.ndarray:
        values = self.objective.evaluate_many(xs, rng=rng)
        self.evaluations += len(values)
        bad = np.flatnonzero(~np.isfinite(values))
        if bad.size:
            raise NonFiniteFitnessError(self.name, np.asarray(xs)[bad[0]], float(values[bad[0]]))
        return values


# -----------------------------
# Operaciones
# -----------------------------

def init_population(params: CsoParams, objective, rng: np.random.Generator) -> List[Cat]:
    """
    Genera N gatos uniformes en la caja con velocidades uniformes en [-v_max, v_max].

    Raises:
        ConfigurationError: Si los límites del objetivo no son finitos.
    """
    lower = np.asarray(objective.lower, dtype=float)
    upper = np.asarray(objective.upper, dtype=float)
    if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
        raise ConfigurationError(f"{objective.name}: límites no finitos")

    v_max = params.resolve_v_max(objective)
    positions = rng.uniform(lower, upper, size=(params.n_cats, objective.dim))
    velocities = rng.uniform(-v_max, v_max, size=(params.n_cats, objective.dim))
    fitness = objective.evaluate_many(positions, rng=rng)

    return [
        Cat(position=positions[i].copy(), velocity=velocities[i].copy(), fitness=float(fitness[i]))
        for i in range(params.n_cats)
    ]


def assign_modes(cats: Sequence[Cat], mr: float, rng: np.random.Generator) -> Sequence[Cat]:
    """Marca exactamente round(mr*N) gatos en rastreo, elegidos sin reemplazo."""
    if not 0.0 <= mr <= 1.0:
        raise UsageError(f"mr debe estar en [0, 1], recibido {mr}")
    n = len(cats)
    n_tracing = min(n, round_half_up(mr * n))
    tracing = set(rng.choice(n, size=n_tracing, replace=False).tolist()) if n_tracing else set()
    for i, cat in enumerate(cats):
        cat.mode = Mode.TRACING if i in tracing else Mode.SEEKING
    return cats


def make_seeking_candidates(cat: Cat, params: CsoParams, objective, rng: np.random.Generator) -> np.ndarray:
    """
    Candidatos del modo búsqueda, una fila por candidato.

    Con SPC la fila 0 es la posición actual sin modificar y se generan
    SMP-1 copias mutadas; sin SPC, SMP copias mutadas. Cada copia muta
    max(1, round(CDC*D)) dimensiones distintas: x' = (1 + s*r*SRD) * x,
    con r ~ U[0,1] y s = ±1 equiprobable, y se recorta a la caja.
    """
    position = np.asarray(cat.position, dtype=float)
    dim = position.shape[0]
    n_mutated = params.smp - 1 if params.spc else params.smp

    mutated = np.tile(position, (n_mutated, 1))
    if n_mutated > 0:
        m = params.mutated_dims(dim)
        dims = np.argsort(rng.random((n_mutated, dim)), axis=1)[:, :m]
        r = rng.random((n_mutated, m))
        signs = rng.integers(0, 2, size=(n_mutated, m)) * 2.0 - 1.0
        rows = np.arange(n_mutated)[:, None]
        mutated[rows, dims] = (1.0 + signs * r * params.srd) * mutated[rows, dims]
        np.clip(mutated, objective.lower, objective.upper, out=mutated)

    if params.spc:
        return np.vstack([position[None, :], mutated])
    return mutated


def selection_weights(fitnesses: Sequence[float], minimize: bool = True) -> np.ndarray:
    """
    P_i = |FS_i - FS_b| / (FS_max - FS_min), con FS_b = FS_max al minimizar
    y FS_min al maximizar; si todos los valores son iguales, P_i = 1.

    Raises:
        UsageError: Si no hay candidatos.
    """
    fs = np.asarray(fitnesses, dtype=float)
    if fs.size == 0:
        raise UsageError("select_candidate requiere al menos un candidato")
    fs_max, fs_min = float(fs.max()), float(fs.min())
    if fs_max == fs_min:
        return np.ones_like(fs)
    fs_b = fs_max if minimize else fs_min
    return np.abs(fs - fs_b) / (fs_max - fs_min)


def select_candidate(fitnesses: Sequence[float], minimize: bool, rng: np.random.Generator) -> int:
    """Ruleta sobre selection_weights normalizados."""
    weights = selection_weights(fitnesses, minimize)
    if weights.size == 1:
        return 0

    cumulative = np.cumsum(weights)
    u = rng.random() * cumulative[-1]
    index = int(np.searchsorted(cumulative, u, side="right"))
    if index >= weights.size or weights[index] == 0.0:
        index = int(np.flatnonzero(weights)[-1])
    return index


def seeking_step(cat: Cat, params: CsoParams, objective, rng: np.random.Generator) -> Cat:
    """Mueve el gato al candidato elegido por ruleta; la velocidad no cambia."""
    candidates = make_seeking_candidates(cat, params, objective, rng)
    if params.spc:
        # el candidato actual reutiliza el fitness en caché
        fresh = objective.evaluate_many(candidates[1:], rng=rng) if len(candidates) > 1 else np.empty(0)
        fitnesses = np.concatenate([[cat.fitness], fresh])
    else:
        fitnesses = objective.evaluate_many(candidates, rng=rng)

    chosen = select_candidate(fitnesses, True, rng)
    cat.position = candidates[chosen].copy()
    cat.fitness = float(fitnesses[chosen])
    return cat


def tracing_step(
    cat: Cat,
    best: BestRecord,
    params: CsoParams,
    objective,
    rng: np.random.Generator,
    inertia_w: float = 1.0,
    v_max: Optional[np.ndarray] = None,
) -> Cat:
    """
    v' = w*v + r1*c1*(x_best - x), recortada a [-v_max, v_max];
    x' = x + v', recortada a la caja. r1 ~ U[0,1] por dimensión.
    """
    if v_max is None:
        v_max = params.resolve_v_max(objective)
    r1 = rng.random(cat.position.shape[0])
    velocity = inertia_w * cat.velocity + r1 * params.c1 * (best.position - cat.position)
    velocity = np.clip(velocity, -v_max, v_max)
    position = np.clip(cat.position + velocity, objective.lower, objective.upper)

    cat.velocity = velocity
    cat.position = position
    cat.fitness = objective.evaluate(position, rng=rng)
    return cat


def best_of(cats: Sequence[Cat]) -> int:
    """Índice del gato con menor fitness (empates: menor índice)."""
    return int(np.argmin([cat.fitness for cat in cats]))


def refresh_stale(cats: Sequence[Cat], objective, rng: np.random.Generator) -> None:
    for cat in cats:
        if cat.stale:
            cat.fitness = objective.evaluate(cat.position, rng=rng)
            cat.stale = False


def step_population(
    cats: Sequence[Cat],
    best: BestRecord,
    params: CsoParams,
    objective,
    rng: np.random.Generator,
    inertia_w: float,
    v_max: np.ndarray,
) -> None:
    for cat in cats:
        if cat.mode is Mode.TRACING:
            tracing_step(cat, best, params, objective, rng, inertia_w=inertia_w, v_max=v_max)
        else:
            seeking_step(cat, params, objective, rng)


def check_invariants(cats: Sequence[Cat], objective, v_max: np.ndarray) -> None:
    for cat in cats:
        assert np.all(cat.position >= objective.lower) and np.all(cat.position <= objective.upper), \
            "posición fuera de la caja"
        assert np.all(np.abs(cat.velocity) <= v_max), "velocidad fuera de [-v_max, v_max]"


class CatSwarmOptimizer:
    """
    Ejecuta el CSO original sobre un objetivo.

    `inertia` recibe las iteraciones ya completadas (0..max_iters-1) y devuelve el peso de
    inercia; el CSO original usa 1.0 constante.
    """

    def __init__(
        self,
        params: CsoParams,
        objective,
        inertia: Optional[Callable[[int], float]] = None,
    ):
        self.params = params
        self.objective = TrackedObjective(objective)
        self.inertia = inertia or (lambda iteration: 1.0)
        self.stats = {
            "seeking_steps": 0,
            "tracing_steps": 0,
            "improvements": 0,
        }

    def run(self, rng_seed: Optional[int] = None):
        seed = self.params.rng_seed if rng_seed is None else rng_seed
        rng = np.random.default_rng(seed)
        objective = self.objective
        params = self.params
        v_max = params.resolve_v_max(objective)

        cats = init_population(params, objective, rng)
        first = best_of(cats)
        best = BestRecord(cats[first].position.copy(), cats[first].fitness, 0)
        assign_modes(cats, params.mr, rng)

        trace = ConvergenceTrace()
        trace.record(best.fitness, objective.evaluations)

        for iteration in range(1, params.max_iters + 1):
            tracing = sum(1 for cat in cats if cat.mode is Mode.TRACING)
            self.stats["tracing_steps"] += tracing
            self.stats["seeking_steps"] += len(cats) - tracing

            step_population(cats, best, params, objective, rng, self.inertia(iteration - 1), v_max)
            if __debug__:
                check_invariants(cats, objective, v_max)

            leader = best_of(cats)
            if best.offer(cats[leader].position, cats[leader].fitness, iteration):
                self.stats["improvements"] += 1
            trace.record(best.fitness, objective.evaluations)
            assign_modes(cats, params.mr, rng)

        logger.debug(
            f"✅ CSO {objective.name}: mejor={best.fitness:.6e} "
            f"evaluaciones={objective.evaluations} stats={self.stats}"
        )
        return best, trace


def run(params: CsoParams, objective, rng_seed: Optional[int] = None):
    """
    Corre el CSO original.

    Returns:
        (BestRecord, ConvergenceTrace)

    Raises:
        NonFiniteFitnessError: Si el objetivo devuelve un valor no finito.
    """
    try:
        return CatSwarmOptimizer(params, objective).run(rng_seed)
    except NonFiniteFitnessError as e:
        logger.error(f"❌ Corrida abortada: {e}")
        raise
