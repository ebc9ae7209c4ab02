from pathlib import Path

import pytest

from cat_swarm_bench.errors import ResultsParseError, UsageError
from cat_swarm_bench.harness import TrialResult, compare_results, run_suite
from cat_swarm_bench.results_store import (
    is_means_table,
    load_means_table,
    load_results,
    parse_results,
    render_results,
    trace_path,
    write_results,
)


@pytest.fixture
def suite_results(tiny_protocol):
    return run_suite(tiny_protocol, workers=1)


def single_trial(**overrides):
    values = dict(
        algorithm="cso",
        function="F1",
        run_index=0,
        seed=11,
        best_fitness=1.5,
        best_position=[0.5],
        evaluations_used=10,
        trace=[2.0, 1.5],
    )
    values.update(overrides)
    return TrialResult(**values)


def test_trace_path():
    assert trace_path("out/suite.csv") == Path("out/suite.trace.csv")


def test_round_trip_is_exact(tmp_path, tiny_protocol, suite_results):
    path = tmp_path / "suite.csv"
    header = write_results(suite_results, path, metadata=tiny_protocol.effective_config())

    loaded = load_results(path)

    assert loaded.results == suite_results
    assert loaded.warnings == []
    assert loaded.metadata["format_version"] == header["format_version"] == "1"
    assert loaded.metadata["n_agents"] == "6"
    assert loaded.metadata["function_ids"] == "F1,F16"


def test_failed_trial_round_trip(tmp_path):
    failed = TrialResult(
        algorithm="broken", function="F2", run_index=1, seed=3, best_fitness=None,
        error="RuntimeError: fallo | con barra",
    )
    results = [single_trial(), failed]
    path = tmp_path / "mixed.csv"
    write_results(results, path)

    loaded = load_results(path).results

    assert loaded == results
    assert loaded[1].failed


def test_missing_end_line_reports_record(suite_results):
    text, _ = render_results(suite_results)
    truncated = "\n".join(text.splitlines()[:-2]) + "\n"

    with pytest.raises(ResultsParseError) as excinfo:
        parse_results(truncated)
    assert excinfo.value.record_index == len(suite_results) - 1


def test_end_count_mismatch(suite_results):
    text, _ = render_results(suite_results)
    broken = text.replace(f"# end = {len(suite_results)}", f"# end = {len(suite_results) + 1}")

    with pytest.raises(ResultsParseError) as excinfo:
        parse_results(broken)
    assert excinfo.value.record_index == len(suite_results)


def test_invalid_number_names_field_and_line():
    text, _ = render_results([single_trial()])
    broken = text.replace(",1.5,", ",abc,")

    with pytest.raises(ResultsParseError) as excinfo:
        parse_results(broken)
    assert excinfo.value.field == "best_fitness"
    assert excinfo.value.record_index == 0
    assert excinfo.value.line_number == 6


def test_unexpected_header():
    with pytest.raises(ResultsParseError) as excinfo:
        parse_results("# end = 0\n")
    assert excinfo.value.field == "header"
    with pytest.raises(ResultsParseError):
        parse_results("a,b,c\n# end = 0\n")


def test_content_after_end():
    text, _ = render_results([single_trial()])
    with pytest.raises(ResultsParseError):
        parse_results(text + "cso,F1,1,12,1.0,10,0.5\n")


def test_version_mismatch_warns():
    text, _ = render_results([single_trial()])
    result_set = parse_results(text.replace("# suite_version = 1", "# suite_version = 0"))
    assert len(result_set.results) == 1
    assert any("suite" in warning for warning in result_set.warnings)


def test_missing_trace_file_warns(tmp_path):
    path = tmp_path / "solo.csv"
    write_results([single_trial()], path)
    trace_path(path).unlink()

    loaded = load_results(path)

    assert loaded.results[0].trace == []
    assert any("trazas" in warning for warning in loaded.warnings)


def test_missing_results_file(tmp_path):
    with pytest.raises(ResultsParseError):
        load_results(tmp_path / "nada.csv")


def test_compare_after_loading_matches_in_memory(tmp_path, suite_results):
    path = tmp_path / "suite.csv"
    write_results(suite_results, path)

    in_memory = compare_results(suite_results)
    loaded = compare_results(load_results(path).results)

    assert loaded.rank_table.totals == in_memory.rank_table.totals
    assert loaded.friedman == in_memory.friedman
    assert loaded.wilcoxon == in_memory.wilcoxon


def test_load_means_table(fixtures_dir):
    path = fixtures_dir / "published_means.csv"
    table = load_means_table(path)

    assert is_means_table(path)
    assert table.algorithms == ["CSO", "DA", "BOA", "FDO"]
    assert len(table.functions) == 33
    assert table.cells[("BOA", "F8")].missing
    assert table.cells[("CSO", "F1")].mean == pytest.approx(3.5e-14)
    assert table.f_mins["F8"] == pytest.approx(-12569.487)
    assert table.f_mins["CEC01"] == 1.0


def test_results_file_is_not_means_table(tmp_path):
    path = tmp_path / "suite.csv"
    write_results([single_trial()], path)
    assert not is_means_table(path)


def test_means_table_errors(tmp_path):
    one_algorithm = tmp_path / "one.csv"
    one_algorithm.write_text("function,algorithm,mean,std\nF1,CSO,1.0,0.1\nF2,CSO,2.0,0.1\n", encoding="utf-8")
    with pytest.raises(UsageError):
        load_means_table(one_algorithm)

    no_std = tmp_path / "no_std.csv"
    no_std.write_text("function,algorithm,mean\nF1,CSO,1.0\n", encoding="utf-8")
    with pytest.raises(ResultsParseError):
        load_means_table(no_std)

    bad_number = tmp_path / "bad.csv"
    bad_number.write_text("function,algorithm,mean,std\nF1,CSO,uno,0.1\nF1,DA,2.0,0.1\n", encoding="utf-8")
    with pytest.raises(ResultsParseError):
        load_means_table(bad_number)


def test_full_grid_round_trip(tmp_path, rng):
    results = [
        TrialResult(
            algorithm="cso",
            function=f"F{f}",
            run_index=run,
            seed=int(rng.integers(0, 2 ** 63)),
            best_fitness=float(rng.normal()) * 10.0 ** int(rng.integers(-20, 5)),
            best_position=rng.uniform(-100, 100, size=3).tolist(),
            evaluations_used=4530,
            trace=sorted(rng.uniform(size=4).tolist(), reverse=True),
        )
        for f in range(1, 24)
        for run in range(30)
    ]
    path = tmp_path / "grid.csv"
    write_results(results, path)

    assert len(results) == 690
    assert load_results(path).results == results
