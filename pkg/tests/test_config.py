from pathlib import Path

import pytest

from cat_swarm_bench.config import DEFAULTS, get_settings, load_config_file
from cat_swarm_bench.errors import UsageError


def test_settings_from_environment(monkeypatch):
    monkeypatch.setenv("CSO_WORKERS", "3")
    monkeypatch.setenv("CSO_LOG_LEVEL", "debug")
    monkeypatch.setenv("CSO_RESULTS_DIR", "/tmp/cso")

    settings = get_settings()

    assert settings.workers == 3
    assert settings.log_level == "DEBUG"
    assert settings.results_dir == Path("/tmp/cso")


def test_settings_reject_bad_workers(monkeypatch):
    monkeypatch.setenv("CSO_WORKERS", "muchos")
    with pytest.raises(UsageError):
        get_settings()


def test_defaults_match_protocol():
    assert DEFAULTS["n_cats"] == 30
    assert DEFAULTS["max_iters"] == 500


def test_load_config_file(tmp_path):
    path = tmp_path / "params.env"
    path.write_text("# comentario\nsmp = 7\nw-start = 0.8\n", encoding="utf-8")

    assert load_config_file(path, {"smp", "w_start"}) == {"smp": "7", "w_start": "0.8"}


def test_load_config_file_errors(tmp_path):
    with pytest.raises(UsageError):
        load_config_file(tmp_path / "nada.env", {"smp"})

    path = tmp_path / "params.env"
    path.write_text("smp = 7\nsrd = 0.1\n", encoding="utf-8")
    with pytest.raises(UsageError):
        load_config_file(path, {"smp"})
