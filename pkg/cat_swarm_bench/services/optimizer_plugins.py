"""
Plugins por defecto del harness: cso, aicso, pcso, icso y random.

Cada plugin traduce el Protocol a los parámetros de su variante, corre
el optimizador con la semilla derivada y devuelve un TrialResult.
"""

from ..harness import OptimizerPlugin, Protocol, TrialResult, register_plugin
from ..swarm_core import CsoParams, Variant, evaluation_budget, run as cso_run
from ..variants import (
    AicsoParams,
    IcsoParams,
    PcsoParams,
    aicso_run,
    icso_run,
    pcso_budget,
    pcso_run,
)
from .random_search import baseline_random_search


def cso_params_from(protocol: Protocol, seed: int = 0, variant: Variant = Variant.CSO) -> CsoParams:
    return CsoParams(
        n_cats=protocol.n_agents,
        smp=protocol.smp,
        srd=protocol.srd,
        cdc=protocol.cdc,
        spc=protocol.spc,
        mr=protocol.mr,
        c1=protocol.c1,
        v_max=protocol.v_max,
        v_max_factor=protocol.v_max_factor,
        max_iters=protocol.max_iters,
        rng_seed=seed,
        variant=variant,
    )


def aicso_params_from(protocol: Protocol, seed: int = 0) -> AicsoParams:
    return AicsoParams(
        base=cso_params_from(protocol, seed, Variant.AICSO),
        w_start=protocol.w_start,
        w_end=protocol.w_end,
    )


def pcso_params_from(protocol: Protocol, seed: int = 0) -> PcsoParams:
    return PcsoParams(
        base=cso_params_from(protocol, seed, Variant.PCSO),
        n_groups=protocol.n_groups,
        ech=protocol.ech,
    )


def icso_params_from(protocol: Protocol, seed: int = 0) -> IcsoParams:
    return IcsoParams(
        base=cso_params_from(protocol, seed, Variant.ICSO),
        n_groups=protocol.n_groups,
        ech=protocol.ech,
        w_start=protocol.w_start,
        w_end=protocol.w_end,
    )


def _to_trial(algorithm: str, objective, seed: int, outcome) -> TrialResult:
    best, trace = outcome
    return TrialResult(
        algorithm=algorithm,
        function=objective.name,
        run_index=0,
        seed=seed,
        best_fitness=float(best.fitness),
        best_position=[float(v) for v in best.position],
        evaluations_used=trace.evaluations_used,
        trace=list(trace.best_fitness),
    )


def run_cso(protocol: Protocol, objective, seed: int) -> TrialResult:
    params = cso_params_from(protocol, seed)
    return _to_trial("cso", objective, seed, cso_run(params, objective, seed))


def run_aicso(protocol: Protocol, objective, seed: int) -> TrialResult:
    params = aicso_params_from(protocol, seed)
    return _to_trial("aicso", objective, seed, aicso_run(params, objective, seed))


def run_pcso(protocol: Protocol, objective, seed: int) -> TrialResult:
    params = pcso_params_from(protocol, seed)
    return _to_trial("pcso", objective, seed, pcso_run(params, objective, seed))


def run_icso(protocol: Protocol, objective, seed: int) -> TrialResult:
    params = icso_params_from(protocol, seed)
    return _to_trial("icso", objective, seed, icso_run(params, objective, seed))


def register_defaults() -> None:
    register_plugin(OptimizerPlugin(
        id="cso",
        run=run_cso,
        budget=lambda protocol, objective: evaluation_budget(cso_params_from(protocol)),
        description="CSO original (inercia 1)",
    ))
    register_plugin(OptimizerPlugin(
        id="aicso",
        run=run_aicso,
        budget=lambda protocol, objective: evaluation_budget(cso_params_from(protocol)),
        description="CSO con inercia decreciente lineal",
    ))
    register_plugin(OptimizerPlugin(
        id="pcso",
        run=run_pcso,
        budget=lambda protocol, objective: pcso_budget(pcso_params_from(protocol)),
        description="CSO paralelo por subgrupos con intercambio cada ECH iteraciones",
    ))
    register_plugin(OptimizerPlugin(
        id="icso",
        run=run_icso,
        budget=lambda protocol, objective: pcso_budget(icso_params_from(protocol)),
        description="PCSO con inercia decreciente",
    ))
    register_plugin(OptimizerPlugin(
        id="random",
        run=baseline_random_search,
        budget=lambda protocol, objective: protocol.n_agents * protocol.max_iters,
        description="Búsqueda aleatoria uniforme (línea base)",
    ))
