import os
import subprocess
import sys
from pathlib import Path

import pytest

from wplab.brackets import BracketCache, cache_load
from wplab.lab import (
    EXPERIMENTS,
    LabConfig,
    cache_warm,
    load_config_file,
    resolve_config,
    rows_to_csv,
    rows_to_json,
    run_experiment,
)


def _wplab(args, env_extra=None, cwd=None):
    env = dict(os.environ)
    env.pop("WPLAB_CACHE", None)
    if env_extra:
        env.update(env_extra)
    return subprocess.run(
        [sys.executable, "-m", "wplab.cli", *args],
        capture_output=True,
        text=True,
        env=env,
        cwd=cwd,
    )


def test_unknown_experiment_usage_error() -> None:
    proc = _wplab(["no-such-experiment"])
    assert proc.returncode == 1
    assert "valid names" in proc.stderr
    assert "identity" in proc.stderr


def test_bad_flag_usage_error() -> None:
    proc = _wplab(["identity", "--budget", "not-a-number"])
    assert proc.returncode == 1
    proc = _wplab(["identity", "--L", "2.5"])
    assert proc.returncode == 1
    proc = _wplab(["identity", "--budget", "0"])
    assert proc.returncode == 1


def test_budget_exceeded_exit_code() -> None:
    proc = _wplab(["volume-table", "--budget", "6", "--gmin", "20"])
    assert proc.returncode == 2
    assert "budget" in proc.stderr


def test_identity_experiment_and_exit_codes(tmp_path) -> None:
    proc = _wplab(["identity", "--budget", "4", "--format", "csv"])
    assert proc.returncode == 0, proc.stderr
    lines = proc.stdout.strip().splitlines()
    assert lines[0].startswith("experiment,input,")
    assert all(",PASS," in line for line in lines[1:])


def test_poisoned_cache_fails_identity(tmp_path) -> None:
    cache_dir = tmp_path / "cache"
    cache_dir.mkdir()
    # value has the right pi-degree but a wrong coefficient
    (cache_dir / "brackets.txt").write_text(
        "wpbracket v1\n0|0:4|3/1*pi^2\n", encoding="utf-8"
    )
    proc = _wplab(
        ["identity", "--budget", "4"], env_extra={"WPLAB_CACHE": str(cache_dir)}
    )
    assert proc.returncode == 3
    assert "internal check" in proc.stderr


def test_csv_byte_determinism_across_runs_and_threads() -> None:
    base = _wplab(["mz-ratio", "--budget", "5"])
    again = _wplab(["mz-ratio", "--budget", "5"])
    threaded = _wplab(["mz-ratio", "--budget", "5", "--threads", "4"])
    assert base.returncode == again.returncode == threaded.returncode == 0
    assert base.stdout == again.stdout == threaded.stdout


def test_json_output_and_out_file(tmp_path) -> None:
    out = tmp_path / "rows.json"
    proc = _wplab(["ratio-R", "--budget", "5", "--format", "json", "--out", str(out)])
    assert proc.returncode == 0
    import json

    rows = json.loads(out.read_text())
    assert rows and set(rows[0]) == {
        "experiment",
        "input",
        "exact",
        "numeric",
        "reference",
        "deviation",
        "status",
        "warnings",
    }
    assert all(r["status"] == "PASS" for r in rows)


def test_config_file_and_precedence(tmp_path) -> None:
    cfg_file = tmp_path / "lab.cfg"
    cache_a = tmp_path / "a"
    cfg_file.write_text(
        f"budget = 5\ncache_dir = {cache_a}\n# comment\nthreads = 2\n",
        encoding="utf-8",
    )
    values = load_config_file(cfg_file)
    assert values == {"budget": "5", "cache_dir": str(cache_a), "threads": "2"}

    cfg = resolve_config({"budget": None}, values)
    assert cfg.budget == 5 and cfg.threads == 2 and cfg.cache_dir == str(cache_a)

    # flag beats file
    cfg = resolve_config({"budget": 4}, values)
    assert cfg.budget == 4

    # file beats env
    os.environ["WPLAB_CACHE"] = str(tmp_path / "env")
    try:
        cfg = resolve_config({}, values)
        assert cfg.cache_dir == str(cache_a)
        cfg = resolve_config({}, None)
        assert cfg.cache_dir == str(tmp_path / "env")
    finally:
        del os.environ["WPLAB_CACHE"]

    with pytest.raises(ValueError, match="unknown config keys"):
        resolve_config({}, {"bogus": "1"})
    with pytest.raises(ValueError, match="key = value"):
        bad = tmp_path / "bad.cfg"
        bad.write_text("just some text\n", encoding="utf-8")
        load_config_file(bad)


def test_cache_warm_signature_closure(tmp_path) -> None:
    cache = BracketCache()
    cfg = LabConfig(budget=3, cache_dir=str(tmp_path / "warm"))
    stats = cache_warm(cfg, cache=cache)
    assert stats.entries_new == stats.entries_total == len(cache)
    assert stats.path and Path(stats.path).is_file()
    signatures = {(g, n) for (g, n, _) in cache.entries}
    assert signatures == {
        (0, 3),
        (0, 4),
        (1, 1),
        (0, 5),
        (1, 2),
        (0, 6),
        (1, 3),
        (2, 0),
    } | {(2, 1)}  # (2,1) brackets feed the closed-surface value at (2,0)

    again = cache_warm(cfg, cache=cache)
    assert again.entries_new == 0  # idempotent re-warm

    loaded = BracketCache()
    assert cache_load(Path(stats.path), loaded) == stats.entries_total


def test_cache_warm_budget_zero() -> None:
    cache = BracketCache()
    stats = cache_warm(LabConfig(budget=1), budget=0, cache=cache)
    assert {(g, n) for (g, n, _) in cache.entries} == {(0, 3)}
    assert stats.entries_total == 1


def test_experiment_registry_complete() -> None:
    assert set(EXPERIMENTS) == {
        "volume-table",
        "mz-ratio",
        "ratio-R",
        "identity",
        "poisson-moments",
        "second-moment",
        "cheeger-upper",
        "pvol2",
        "two-curve",
        "geometry-constants",
        "lratio",
        "cache-warm",
    }


def test_rows_render_and_sorting() -> None:
    rows = run_experiment("geometry-constants", LabConfig(budget=2))
    assert rows == sorted(rows, key=lambda r: r.input)
    csv_text = rows_to_csv(rows)
    json_text = rows_to_json(rows)
    assert csv_text.splitlines()[0] == (
        "experiment,input,exact,numeric,reference,deviation,status,warnings"
    )
    assert json_text.endswith("\n")


def test_run_experiment_unknown_name() -> None:
    with pytest.raises(KeyError):
        run_experiment("bogus", LabConfig())
