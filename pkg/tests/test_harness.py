import numpy as np
import pytest
from pydantic import ValidationError

from cat_swarm_bench.errors import UsageError
from cat_swarm_bench.harness import (
    PLUGINS,
    OptimizerPlugin,
    Protocol,
    available_algorithms,
    baseline_random_search,
    check_trial,
    compare_results,
    derive_seed,
    get_plugin,
    register_plugin,
    run_suite,
    suite_objective,
    trial_budget,
    trial_grid,
)
from cat_swarm_bench.objective_suite import lookup
from cat_swarm_bench.results_store import trace_path, write_results


def test_derive_seed_known_value():
    assert derive_seed(42, "cso", "F1", 0) == 894554040674835311


def test_derive_seed_normalizes_names():
    assert derive_seed(42, "CSO", "f1", 0) == derive_seed(42, "cso", "F1", 0)


def test_derive_seed_distinguishes_cells():
    seeds = {
        derive_seed(master, alg, fid, run)
        for master in (1, 2)
        for alg in ("cso", "pcso")
        for fid in ("F1", "F2")
        for run in range(3)
    }
    assert len(seeds) == 24
    assert all(0 <= seed < 2 ** 64 for seed in seeds)


def test_derive_seed_full_grid_has_no_collisions():
    grid = [
        (alg, f"F{i}", run)
        for alg in ("cso", "aicso", "pcso", "icso", "random")
        for i in range(1, 24)
        for run in range(30)
    ]
    seeds = {derive_seed(42, alg, fid, run) for alg, fid, run in grid}

    assert len(grid) == 5 * 23 * 30
    assert len(seeds) == len(grid)


def test_protocol_validation():
    with pytest.raises(UsageError):
        Protocol(function_ids=("F99",))
    with pytest.raises(ValidationError):
        Protocol(algorithm_ids=("cso", "CSO"))
    with pytest.raises(ValidationError):
        Protocol(n_runs=0)
    with pytest.raises(ValidationError):
        Protocol(unknown_param=1)


def test_protocol_effective_config(tiny_protocol):
    config = tiny_protocol.effective_config()
    assert config["function_ids"] == "F1,F16"
    assert config["algorithm_ids"] == "cso,random"
    assert config["n_agents"] == 6


def test_protocol_dim_only_applies_to_scalable_functions():
    protocol = Protocol(dim=5)
    assert suite_objective(protocol, "F1").dim == 5
    assert suite_objective(protocol, "F16").dim == 2
    assert suite_objective(Protocol(), "F9").dim == 30


def test_default_plugins_registered():
    assert {"cso", "aicso", "pcso", "icso", "random"} <= set(available_algorithms())
    with pytest.raises(UsageError):
        get_plugin("nope")


def test_run_suite_canonical_order(tiny_protocol):
    results = run_suite(tiny_protocol, workers=1)

    assert [r.key for r in results] == trial_grid(tiny_protocol)
    for result in results:
        assert result.seed == derive_seed(7, result.algorithm, result.function, result.run_index)
        assert not result.failed
        assert check_trial(result) == []


def test_run_suite_independent_of_workers(tiny_protocol):
    serial = run_suite(tiny_protocol, workers=1)
    parallel = run_suite(tiny_protocol, workers=2)

    assert [r.best_fitness for r in serial] == [r.best_fitness for r in parallel]
    assert [r.trace for r in serial] == [r.trace for r in parallel]


def test_run_suite_unknown_algorithm():
    with pytest.raises(UsageError):
        run_suite(Protocol(algorithm_ids=("nope",), n_runs=1, max_iters=1), workers=1)


@pytest.mark.parametrize("algorithm", ["cso", "aicso", "pcso", "icso", "random"])
def test_evaluations_within_plugin_budget(algorithm):
    protocol = Protocol(
        n_runs=2, n_agents=6, max_iters=12, function_ids=("F9", "F19"), algorithm_ids=(algorithm,), dim=3, ech=4
    )
    for result in run_suite(protocol, workers=1):
        assert not result.failed
        assert result.evaluations_used <= trial_budget(protocol, result)
        assert len(result.trace) in (protocol.max_iters, protocol.max_iters + 1)
        assert check_trial(result) == []


def test_failing_plugin_becomes_failed_cell(monkeypatch):
    def boom(protocol, objective, seed):
        raise RuntimeError("boom")

    get_plugin("cso")
    monkeypatch.setitem(PLUGINS, "broken", OptimizerPlugin(id="broken", run=boom))
    protocol = Protocol(n_runs=2, n_agents=4, max_iters=3, function_ids=("F1",), algorithm_ids=("cso", "broken"))

    results = run_suite(protocol, workers=1)

    broken = [r for r in results if r.algorithm == "broken"]
    assert len(broken) == 2
    assert all(r.failed and r.error == "RuntimeError: boom" for r in broken)
    assert not any(r.failed for r in results if r.algorithm == "cso")

    report = compare_results(results, baseline="cso")
    assert report.cells[("broken", "F1")].missing
    assert report.rank_table.per_function_ranks["F1"] == {"cso": 1.0, "broken": 2.0}
    assert sum(1 for w in report.warnings if w.startswith("Ensayo fallido")) == 2


def test_plugin_must_minimize():
    with pytest.raises(UsageError):
        register_plugin(OptimizerPlugin(id="max", run=lambda *a: None, capabilities=frozenset({"continuous"})))


def test_random_search_single_sample():
    protocol = Protocol(n_agents=1, max_iters=1)
    objective = lookup("F1").objective(3)

    result = baseline_random_search(protocol, objective, 5)

    assert result.evaluations_used == 1
    assert len(result.trace) == 1
    assert result.best_fitness == pytest.approx(objective.evaluate(result.best_position))


def test_random_search_zero_width_box(zero_box):
    result = baseline_random_search(Protocol(n_agents=3, max_iters=4), zero_box, 1)

    assert result.best_fitness == 0.0
    assert result.trace == [0.0, 0.0, 0.0, 0.0]


def test_compare_results_requires_two_algorithms(tiny_protocol):
    results = [r for r in run_suite(tiny_protocol, workers=1) if r.algorithm == "cso"]
    with pytest.raises(UsageError):
        compare_results(results)
    with pytest.raises(UsageError):
        compare_results([])


def test_compare_results_defaults_to_last_algorithm(tiny_protocol):
    report = compare_results(run_suite(tiny_protocol, workers=1))

    assert report.baseline == "random"
    assert set(report.wilcoxon) == {("F1", "cso"), ("F16", "cso")}
    assert report.wilcoxon[("F1", "cso")].n_effective <= 2


def test_results_file_independent_of_workers(tmp_path, tiny_protocol):
    serial, parallel = tmp_path / "serial.csv", tmp_path / "parallel.csv"
    write_results(run_suite(tiny_protocol, workers=1), serial, metadata=tiny_protocol.effective_config())
    write_results(run_suite(tiny_protocol, workers=3), parallel, metadata=tiny_protocol.effective_config())

    assert serial.read_bytes() == parallel.read_bytes()
    assert trace_path(serial).read_bytes() == trace_path(parallel).read_bytes()


@pytest.mark.slow
def test_cso_default_bands():
    protocol = Protocol(function_ids=("F1", "F9", "F14", "F16"), algorithm_ids=("cso",))
    report_cells = {}
    for result in run_suite(protocol):
        report_cells.setdefault(result.function, []).append(result.best_fitness)
    means = {fid: float(np.mean(values)) for fid, values in report_cells.items()}

    bands = [
        means["F1"] < 1e-6,
        means["F9"] < 60.0,
        means["F14"] < 1.05,
        abs(means["F16"] - (-1.0316)) < 1e-2,
    ]
    assert sum(bands) >= 3, means


@pytest.mark.slow
def test_cso_beats_random_search():
    protocol = Protocol(function_ids=("F1", "F10"), algorithm_ids=("cso", "random"))

    report = compare_results(run_suite(protocol), baseline="random")

    for fid in protocol.function_ids:
        result = report.wilcoxon[(fid, "cso")]
        assert result.p_value < 0.05
        assert result.favors_first
        assert report.cells[("cso", fid)].mean < report.cells[("random", fid)].mean


@pytest.mark.slow
def test_full_suite_traces_are_monotone():
    protocol = Protocol(
        n_runs=1,
        n_agents=10,
        max_iters=20,
        function_ids=tuple(f"F{i}" for i in range(1, 24)),
        algorithm_ids=("cso", "aicso", "pcso", "icso", "random"),
        dim=10,
    )
    for result in run_suite(protocol):
        assert not result.failed, result.error
        assert check_trial(result) == []
        assert np.isfinite(result.best_fitness)
