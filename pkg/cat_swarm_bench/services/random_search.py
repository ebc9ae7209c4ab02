import logging

import numpy as np

from ..harness import Protocol, TrialResult

logger = logging.getLogger(__name__)


def baseline_random_search(protocol: Protocol, objective, seed: int) -> TrialResult:
    """
    Búsqueda aleatoria uniforme: n_agents muestras por iteración durante
    max_iters iteraciones. La traza guarda el mejor valor tras cada lote.
    """
    rng = np.random.default_rng(seed)
    best_fitness = np.inf
    best_position = None
    trace = []

    for _ in range(protocol.max_iters):
        batch = rng.uniform(objective.lower, objective.upper, size=(protocol.n_agents, objective.dim))
        values = objective.evaluate_many(batch, rng=rng)
        leader = int(np.argmin(values))
        if best_position is None or values[leader] < best_fitness:
            best_fitness = float(values[leader])
            best_position = batch[leader].copy()
        trace.append(best_fitness)

    logger.debug(f"✅ Búsqueda aleatoria {objective.name}: mejor={best_fitness:.6e}")
    return TrialResult(
        algorithm="random",
        function=objective.name,
        run_index=0,
        seed=seed,
        best_fitness=best_fitness,
        best_position=[float(v) for v in best_position],
        evaluations_used=protocol.n_agents * protocol.max_iters,
        trace=trace,
    )
