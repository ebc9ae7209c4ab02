import logging
from typing import Dict, List, Optional, Union

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field, ValidationError

from .config import DEFAULTS
from .errors import CatSwarmError, UsageError
from .harness import Protocol, TrialResult, compare_results, get_plugin
from .objective_suite import FUNCTION_IDS, REGISTRY, lookup

logger = logging.getLogger(__name__)

app = FastAPI(
    title="Cat Swarm Bench",
    description="API para correr CSO y sus variantes sobre F1-F23 y comparar resultados.",
    version="1.0.0",
)

# ✅ Configuración de CORS (puedes restringir en producción)
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


class RunRequest(BaseModel):
    algo: str = "cso"
    function: str = "F1"
    dim: Optional[int] = None
    cats: int = Field(default=DEFAULTS["n_cats"], ge=1)
    iters: int = Field(default=DEFAULTS["max_iters"], ge=1)
    seed: int = Field(default=DEFAULTS["master_seed"], ge=0)
    # parámetros opcionales del Protocol (smp, srd, mr, ech, ...)
    params: Dict[str, Union[bool, int, float]] = Field(default_factory=dict)


class CompareRequest(BaseModel):
    # algoritmo -> función -> mejores valores por corrida (null = corrida fallida)
    samples: Dict[str, Dict[str, List[Optional[float]]]]
    baseline: Optional[str] = None


# ✅ Endpoint raíz: status de la API
@app.get("/")
def read_root():
    return {
        "status": "ok",
        "message": "🚀 API de Cat Swarm Bench funcionando correctamente.",
        "endpoints": ["/functions", "/run", "/compare"],
    }


# ✅ Registro de funciones
@app.get("/functions")
def list_functions():
    functions = []
    for fid in FUNCTION_IDS:
        entry = REGISTRY[fid]
        lower, upper = entry.bounds()
        functions.append({
            "id": entry.id,
            "name": entry.name,
            "family": entry.family.value,
            "dim": entry.default_dim,
            "lower": lower.tolist(),
            "upper": upper.tolist(),
            "f_min": entry.f_min,
        })
    return {"functions": functions}


# ✅ Una corrida
@app.post("/run")
def run_endpoint(request: RunRequest):
    try:
        plugin = get_plugin(request.algo)
        function = lookup(request.function).id
        protocol = Protocol(
            n_runs=1,
            n_agents=request.cats,
            max_iters=request.iters,
            function_ids=(function,),
            algorithm_ids=(request.algo,),
            master_seed=request.seed,
            dim=request.dim,
            **request.params,
        )
        objective = lookup(function).objective(protocol.dim)
        logger.info(f"🚀 /run {request.algo} en {function}")
        result = plugin.run(protocol, objective, protocol.master_seed)
        return {
            "status": "ok",
            "algorithm": protocol.algorithm_ids[0],
            "function": function,
            "seed": protocol.master_seed,
            "best_fitness": result.best_fitness,
            "best_position": result.best_position,
            "evaluations_used": result.evaluations_used,
            "trace": result.trace,
        }
    except (UsageError, ValidationError, TypeError) as e:
        logger.warning(f"⚠️ Petición inválida en /run: {e}")
        raise HTTPException(status_code=400, detail=str(e))
    except CatSwarmError as e:
        logger.error(f"❌ Error en /run: {e}")
        raise HTTPException(status_code=500, detail=str(e))


# ✅ Comparación estadística sobre mejores valores por corrida
@app.post("/compare")
def compare_endpoint(request: CompareRequest):
    try:
        results = [
            TrialResult(
                algorithm=algorithm,
                function=function,
                run_index=run_index,
                seed=0,
                best_fitness=value,
                error=None if value is not None else "corrida fallida",
            )
            for algorithm, by_function in request.samples.items()
            for function, values in by_function.items()
            for run_index, value in enumerate(values)
        ]
        report = compare_results(results, baseline=request.baseline)
        table = report.rank_table
        return {
            "status": "ok",
            "cells": [
                {
                    "algorithm": cell.algorithm,
                    "function": cell.function,
                    "mean": cell.mean,
                    "std": cell.std,
                    "n_runs": cell.n_runs,
                    "missing": cell.missing,
                }
                for cell in report.cells.values()
            ],
            "ranks": table.per_function_ranks,
            "totals": table.totals,
            "averages": table.averages,
            "subtotals": table.subtotals,
            "friedman": {"statistic": report.friedman.statistic, "p_value": report.friedman.p_value},
            "baseline": report.baseline,
            "wilcoxon": [
                {
                    "function": fid,
                    "algorithm": alg,
                    "p_value": result.p_value if result else None,
                    "method": result.method.value if result else None,
                    "n_effective": result.n_effective if result else 0,
                }
                for (fid, alg), result in report.wilcoxon.items()
            ],
            "warnings": report.warnings,
        }
    except UsageError as e:
        logger.warning(f"⚠️ Petición inválida en /compare: {e}")
        raise HTTPException(status_code=400, detail=str(e))
    except CatSwarmError as e:
        logger.error(f"❌ Error en /compare: {e}")
        raise HTTPException(status_code=500, detail=str(e))
