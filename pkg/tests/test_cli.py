"""CLI surface: config handling, table formats, determinism, figure export.

Solve-path commands run on a deliberately coarse contour via a temp config
so the module stays fast.
"""

import json
import os

import pytest

from tunnex.cli import (
    EXIT_CONFIG,
    EXIT_OK,
    RESULT_COLUMNS,
    default_config,
    load_config,
    main,
    read_rows,
)

CHEAP_CONTOUR = {"t_left": -16.0, "t_right": 12.0, "n_ab": 280,
                 "n_cd": 240, "h_bc": 0.06}


def _write_cfg(tmp_path, overrides):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(overrides))
    return str(path)


class TestConfig:
    def test_print_default_config_roundtrips(self, capsys):
        assert main(["--print-default-config"]) == EXIT_OK
        printed = json.loads(capsys.readouterr().out)
        assert printed == default_config()

    def test_merge_is_deep(self, tmp_path):
        path = _write_cfg(tmp_path, {"contour": {"n_ab": 99}})
        cfg = load_config(path)
        assert cfg["contour"]["n_ab"] == 99
        # untouched siblings keep their defaults
        assert cfg["contour"]["n_cd"] == default_config()["contour"]["n_cd"]

    def test_no_command_is_config_error(self, capsys):
        assert main([]) == EXIT_CONFIG
        assert "no command" in capsys.readouterr().err

    def test_bad_config_path_is_config_error(self, capsys):
        assert main(["--config", "/nonexistent.json", "solve"]) == EXIT_CONFIG


class TestOracle1d:
    def test_writes_grid(self, tmp_path):
        out = str(tmp_path / "oracle.csv")
        assert main(["oracle-1d", "--out", out]) == EXIT_OK
        lines = open(out).read().splitlines()
        assert lines[0].startswith("#")
        assert lines[1] == "E,T,F_wkb"
        assert len(lines) == 2 + default_config()["oracle1d"]["steps"]

    def test_resume_skips_existing(self, tmp_path):
        out = str(tmp_path / "oracle.csv")
        assert main(["oracle-1d", "--out", out]) == EXIT_OK
        before = open(out, "rb").read()
        os.utime(out, (0, 0))
        assert main(["oracle-1d", "--out", out, "--resume"]) == EXIT_OK
        assert open(out, "rb").read() == before
        assert os.stat(out).st_mtime == 0  # untouched, not rewritten


class TestExport:
    def test_fig6_table_and_png(self, tmp_path):
        out = str(tmp_path / "fig6.tsv")
        assert main(["export", "--out", out]) == EXIT_OK
        lines = open(out).read().splitlines()
        assert lines[1].split("\t") == ["branch", "E", "T_half"]
        assert len(lines) > 10
        assert os.path.exists(str(tmp_path / "fig6.png"))

    def test_fig6_deterministic(self, tmp_path):
        out_a = str(tmp_path / "a.tsv")
        out_b = str(tmp_path / "b.tsv")
        assert main(["export", "--out", out_a]) == EXIT_OK
        assert main(["export", "--out", out_b]) == EXIT_OK
        assert open(out_a, "rb").read() == open(out_b, "rb").read()

    def test_unknown_figure_is_config_error(self, tmp_path, capsys):
        cfg = _write_cfg(tmp_path, {"export": {"figure": "nope"}})
        out = str(tmp_path / "x.tsv")
        assert main(["export", "--config", cfg, "--out", out]) == EXIT_CONFIG


@pytest.fixture(scope="module")
def cheap_cfg(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("cli")
    return _write_cfg(tmp, {"contour": CHEAP_CONTOUR,
                            "solver": {"tol": 1e-9}})


class TestSolvePath:
    def test_solve_writes_result_row(self, cheap_cfg, tmp_path):
        out = str(tmp_path / "solve.csv")
        assert main(["solve", "--config", cheap_cfg, "--out", out]) == EXIT_OK
        rows = read_rows(out)
        assert len(rows) == 1
        assert tuple(rows[0].keys()) == RESULT_COLUMNS
        assert float(rows[0]["F"]) > 0.0
        assert rows[0]["topology"] == "Transmission"

    def test_walk_follows_waypoints(self, cheap_cfg, tmp_path):
        cfg_path = _write_cfg(tmp_path, {
            "contour": CHEAP_CONTOUR,
            "solver": {"tol": 1e-9},
            "walk": {"waypoints": [[5.6, 0.1, 0.0], [5.6, 0.2, 0.0]]},
        })
        out = str(tmp_path / "walk.csv")
        assert main(["walk", "--config", cfg_path, "--out", out]) == EXIT_OK
        rows = read_rows(out)
        assert len(rows) == 2
        assert float(rows[0]["theta"]) == pytest.approx(0.1)
        assert float(rows[1]["theta"]) == pytest.approx(0.2)

    def test_sweep_rows_sorted_and_complete(self, cheap_cfg, tmp_path):
        cfg_path = _write_cfg(tmp_path, {
            "contour": CHEAP_CONTOUR,
            "solver": {"tol": 1e-9},
            "sweep": {"start": 0.0, "stop": 0.2, "steps": 3,
                      "T_values": [5.6], "eps": 0.0},
        })
        out = str(tmp_path / "sweep.csv")
        assert main(["sweep", "--config", cfg_path, "--out", out]) == EXIT_OK
        rows = read_rows(out)
        assert len(rows) == 3
        thetas = [float(r["theta"]) for r in rows]
        assert thetas == sorted(thetas)
        assert all(r["topology"] == "Transmission" for r in rows)
