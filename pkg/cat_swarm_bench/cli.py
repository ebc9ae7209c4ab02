"""
Interfaz de línea de comandos.

    python -m cat_swarm_bench run --algo cso --function F1 --seed 42
    python -m cat_swarm_bench suite --algos cso,random --functions F1-F7 --out results/suite.csv
    python -m cat_swarm_bench compare --in results/suite.csv --baseline random
    python -m cat_swarm_bench report --in results/suite.csv
    python -m cat_swarm_bench functions

Códigos de salida: 0 éxito, 1 fallo de ejecución/IO, 2 error de uso.
Precedencia de valores: defaults < archivo --config < flags.
"""

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from pydantic import ValidationError

from .config import DEFAULTS, configure_logging, get_settings, load_config_file
from .errors import CatSwarmError, UsageError
from .harness import Protocol, compare_results, get_plugin, run_suite
from .objective_suite import lookup, parse_function_list, registry_csv
from .reporting import FORMATS, convergence_tables, render, report_tables
from .results_store import is_means_table, load_means_table, load_results, render_traces, write_results
from .stats import build_report

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

PCSO_FAMILY = {"pcso", "icso"}
INERTIA_FAMILY = {"aicso", "icso"}


def parse_bool(value: str) -> bool:
    text = str(value).strip().lower()
    if text in {"1", "true", "yes", "si", "sí", "on"}:
        return True
    if text in {"0", "false", "no", "off"}:
        return False
    raise argparse.ArgumentTypeError(f"valor booleano inválido: '{value}'")


# (flag, dest, tipo, ayuda); compartidos por los flags y el archivo --config
CORE_FLAGS: List[Tuple[str, str, Callable, str]] = [
    ("--dim", "dim", int, "Dimensión (solo F1-F13)"),
    ("--cats", "cats", int, "Número de gatos / agentes"),
    ("--iters", "iters", int, "Iteraciones"),
    ("--seed", "seed", int, "Semilla"),
    ("--smp", "smp", int, "Seeking memory pool"),
    ("--srd", "srd", float, "Seeking range of selected dimension"),
    ("--cdc", "cdc", float, "Fracción de dimensiones a mutar"),
    ("--spc", "spc", parse_bool, "Self-position considering (true/false)"),
    ("--mr", "mr", float, "Fracción de gatos en rastreo"),
    ("--c1", "c1", float, "Constante de aceleración"),
    ("--vmax", "vmax", float, "Velocidad máxima por dimensión"),
]
VARIANT_FLAGS: List[Tuple[str, str, Callable, str]] = [
    ("--w-start", "w_start", float, "Inercia inicial (aicso, icso)"),
    ("--w-end", "w_end", float, "Inercia final (aicso, icso)"),
    ("--groups", "groups", int, "Número de subgrupos (pcso, icso)"),
    ("--ech", "ech", int, "Iteraciones entre intercambios (pcso, icso)"),
]
RUN_FLAGS = [("--algo", "algo", str, "Algoritmo"), ("--function", "function", str, "Función F1..F23")]
SUITE_FLAGS = [
    ("--algos", "algos", str, "Lista de algoritmos separada por comas"),
    ("--functions", "functions", str, "F1..F23, F1-F7, lista o 'all'"),
    ("--runs", "runs", int, "Corridas independientes por celda"),
    ("--workers", "workers", int, "Procesos en paralelo (default: CSO_WORKERS)"),
]


class CliParser(argparse.ArgumentParser):
    """ArgumentParser que no termina el proceso: levanta UsageError."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: {message}")


def _add_flags(parser: argparse.ArgumentParser, flags) -> None:
    for flag, dest, kind, help_text in flags:
        parser.add_argument(flag, dest=dest, type=kind, default=None, help=help_text)


def build_parser() -> argparse.ArgumentParser:
    parser = CliParser(prog="cat_swarm_bench", description="Cat Swarm Optimization y banco de pruebas F1-F23")
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING, ERROR")
    sub = parser.add_subparsers(dest="command", parser_class=CliParser)
    sub.required = True

    run = sub.add_parser("run", help="Ejecuta una corrida")
    _add_flags(run, RUN_FLAGS + CORE_FLAGS + VARIANT_FLAGS)
    run.add_argument("--out", default=None, help="Archivo CSV para la traza")
    run.add_argument("--config", default=None, help="Archivo clave = valor")

    suite = sub.add_parser("suite", help="Ejecuta la grilla algoritmos x funciones x corridas")
    _add_flags(suite, SUITE_FLAGS + CORE_FLAGS + VARIANT_FLAGS)
    suite.add_argument("--out", required=True, help="Archivo de resultados")
    suite.add_argument("--config", default=None, help="Archivo clave = valor")

    compare = sub.add_parser("compare", help="Tablas de medias, rankings, Friedman y Wilcoxon")
    compare.add_argument("--in", dest="input", required=True, help="Resultados o tabla de medias")
    compare.add_argument("--baseline", default=None, help="Algoritmo de referencia para Wilcoxon")
    compare.add_argument("--format", choices=FORMATS, default="md")
    compare.add_argument("--out", default=None, help="Escribe la salida en un archivo")

    report = sub.add_parser("report", help="Brecha a f_min y convergencia")
    report.add_argument("--in", dest="input", required=True, help="Archivo de resultados")
    report.add_argument("--format", choices=FORMATS, default="md")
    report.add_argument("--out", default=None, help="Escribe la salida en un archivo")

    sub.add_parser("functions", help="Registro de funciones en CSV")
    return parser


def merge_config(args: argparse.Namespace, flags) -> Dict[str, object]:
    """
    Valores explícitos (archivo --config y flags, los flags ganan).
    Las claves ausentes quedan fuera para que apliquen los defaults.
    """
    types = {dest: kind for _, dest, kind, _ in flags}
    values: Dict[str, object] = {}
    if getattr(args, "config", None):
        for key, raw in load_config_file(args.config, types.keys()).items():
            try:
                values[key] = types[key](raw)
            except (ValueError, argparse.ArgumentTypeError) as e:
                raise UsageError(f"Valor inválido para '{key}' en {args.config}: {e}")
    for dest in types:
        value = getattr(args, dest, None)
        if value is not None:
            values[dest] = value
    return values


def check_variant_flags(values: Dict[str, object], algorithms: Sequence[str]) -> None:
    algorithms = set(algorithms)
    for key, flag in (("groups", "--groups"), ("ech", "--ech")):
        if key in values and not algorithms & PCSO_FAMILY:
            raise UsageError(f"{flag} solo aplica a pcso/icso (algoritmos: {', '.join(sorted(algorithms))})")
    for key, flag in (("w_start", "--w-start"), ("w_end", "--w-end")):
        if key in values and not algorithms & INERTIA_FAMILY:
            raise UsageError(f"{flag} solo aplica a aicso/icso (algoritmos: {', '.join(sorted(algorithms))})")


def build_protocol(values: Dict[str, object], algorithms: Sequence[str], functions: Sequence[str]) -> Protocol:
    mapping = {
        "runs": "n_runs",
        "cats": "n_agents",
        "iters": "max_iters",
        "seed": "master_seed",
        "dim": "dim",
        "smp": "smp",
        "srd": "srd",
        "cdc": "cdc",
        "spc": "spc",
        "mr": "mr",
        "c1": "c1",
        "vmax": "v_max",
        "w_start": "w_start",
        "w_end": "w_end",
        "groups": "n_groups",
        "ech": "ech",
    }
    fields = {target: values[key] for key, target in mapping.items() if key in values}
    if "groups" not in values and PCSO_FAMILY & set(algorithms):
        # con pocos agentes el número de grupos por defecto no puede superar N
        fields["n_groups"] = min(DEFAULTS["n_groups"], max(2, int(fields.get("n_agents", DEFAULTS["n_cats"]))))
    return Protocol(function_ids=tuple(functions), algorithm_ids=tuple(algorithms), **fields)


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        logger.info(f"✅ Salida escrita en {path}")
    else:
        sys.stdout.write(text)


def cmd_run(args: argparse.Namespace) -> int:
    values = merge_config(args, RUN_FLAGS + CORE_FLAGS + VARIANT_FLAGS)
    algorithm = str(values.get("algo") or "").strip().lower()
    if not algorithm:
        raise UsageError("run requiere --algo")
    if not values.get("function"):
        raise UsageError("run requiere --function")
    function = lookup(str(values["function"])).id
    plugin = get_plugin(algorithm)
    check_variant_flags(values, [algorithm])

    values.setdefault("runs", 1)
    protocol = build_protocol(values, [algorithm], [function])
    seed = protocol.master_seed
    objective = lookup(function).objective(protocol.dim)

    logger.info(f"🚀 {algorithm} en {function} (D={objective.dim}, semilla={seed})")
    result = plugin.run(protocol, objective, seed)

    lines = [f"# {key} = {value}" for key, value in protocol.effective_config().items()]
    lines += [
        f"algorithm = {algorithm}",
        f"function = {function}",
        f"seed = {seed}",
        f"best_fitness = {result.best_fitness:.5E}",
        f"evaluations_used = {result.evaluations_used}",
    ]
    sys.stdout.write("\n".join(lines) + "\n")

    if args.out:
        result.algorithm, result.function = algorithm, function
        _emit(render_traces([result]), args.out)
    return EXIT_OK


def resolve_out(out: str) -> Path:
    path = Path(out)
    if path.parent == Path("."):
        return get_settings().results_dir / path.name
    return path


def cmd_suite(args: argparse.Namespace) -> int:
    values = merge_config(args, SUITE_FLAGS + CORE_FLAGS + VARIANT_FLAGS)
    algorithms = [a.strip().lower() for a in str(values.get("algos") or "cso").split(",") if a.strip()]
    for algorithm in algorithms:
        get_plugin(algorithm)
    functions = parse_function_list(str(values.get("functions") or "all"))
    check_variant_flags(values, algorithms)
    protocol = build_protocol(values, algorithms, functions)

    out = resolve_out(args.out)
    try:
        out.parent.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        logger.error(f"❌ No se puede escribir en {out}: {e}")
        return EXIT_FAILURE
    # el archivo no se crea hasta que la suite termina
    if out.is_dir() or not os.access(out.parent, os.W_OK) or (out.exists() and not os.access(out, os.W_OK)):
        logger.error(f"❌ No se puede escribir en {out}")
        return EXIT_FAILURE

    results = run_suite(protocol, workers=values.get("workers"))
    write_results(results, out, metadata=protocol.effective_config())

    failed = sum(1 for result in results if result.failed)
    sys.stdout.write(f"results = {out}\ntrials = {len(results)}\nfailed = {failed}\n")
    return EXIT_OK


def _is_blank(path: Path) -> bool:
    return not path.read_text(encoding="utf-8").strip()


def _no_trials() -> int:
    logger.error("❌ no trials: el archivo no contiene ensayos")
    return EXIT_FAILURE


def cmd_compare(args: argparse.Namespace) -> int:
    path = Path(args.input)
    if not path.is_file():
        logger.error(f"❌ Archivo no encontrado: {path}")
        return EXIT_FAILURE
    if _is_blank(path):
        return _no_trials()

    if is_means_table(path):
        table = load_means_table(path)
        report = build_report(
            table.cells,
            table.algorithms,
            table.functions,
            f_mins=table.f_mins,
            baseline=args.baseline,
        )
    else:
        result_set = load_results(path)
        if not result_set.results:
            return _no_trials()
        report = compare_results(result_set.results, baseline=args.baseline, warnings=result_set.warnings)

    _emit(render(report_tables(report), args.format), args.out)
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    path = Path(args.input)
    if not path.is_file():
        logger.error(f"❌ Archivo no encontrado: {path}")
        return EXIT_FAILURE
    if _is_blank(path):
        return _no_trials()
    result_set = load_results(path)
    if not result_set.results:
        return _no_trials()
    _emit(render(convergence_tables(result_set.results), args.format), args.out)
    return EXIT_OK


def cmd_functions(args: argparse.Namespace) -> int:
    sys.stdout.write(registry_csv())
    return EXIT_OK


COMMANDS = {
    "run": cmd_run,
    "suite": cmd_suite,
    "compare": cmd_compare,
    "report": cmd_report,
    "functions": cmd_functions,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv) if argv is not None else None)
    except UsageError as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_USAGE
    except SystemExit as e:
        # --help
        return int(e.code or 0)

    configure_logging(args.log_level)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ValidationError) as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_USAGE
    except (CatSwarmError, OSError) as e:
        logger.error(f"❌ {e}")
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
