"""Unit tests for scripts/alpha_cli.py: argument parsing and config files."""

from __future__ import annotations

import json

import numpy as np
import pytest

from lib.matrix_io import write_matrix
from lib.measures import MeasureNorm


class TestParseArgs:
    def test_certify_defaults(self, alpha_cli) -> None:
        args = alpha_cli.parse_args(["certify", "--system", "thomas", "--alpha", "2.5"])
        assert args.command == "certify"
        assert args.p is MeasureNorm.L1
        assert args.grid == 9
        assert args.times.tolist() == [0.0]
        assert args.b is None

    @pytest.mark.parametrize("raw, expected", [("1", MeasureNorm.L1), ("inf", MeasureNorm.LINF)])
    def test_norm_flag(self, alpha_cli, raw: str, expected) -> None:
        args = alpha_cli.parse_args(["measure", "--input", "A.json", "--p", raw])
        assert args.p is expected

    def test_bad_norm_is_usage_error(self, alpha_cli) -> None:
        with pytest.raises(SystemExit) as excinfo:
            alpha_cli.parse_args(["measure", "--input", "A.json", "--p", "3"])
        assert excinfo.value.code == alpha_cli.EXIT_ERROR

    def test_negative_initial_state(self, alpha_cli) -> None:
        args = alpha_cli.parse_args(["simulate", "--system", "thomas", "--x0=-1,1,1", "--t", "5"])
        assert args.x0.tolist() == [-1.0, 1.0, 1.0]

    def test_bad_vector(self, alpha_cli) -> None:
        with pytest.raises(SystemExit):
            alpha_cli.parse_args(["simulate", "--x0", "a,b"])

    def test_unknown_system(self, alpha_cli) -> None:
        with pytest.raises(SystemExit) as excinfo:
            alpha_cli.parse_args(["certify", "--system", "lorenz"])
        assert excinfo.value.code == alpha_cli.EXIT_ERROR

    def test_missing_required_option_is_error(self, alpha_cli, capsys, reset_root_logger) -> None:
        assert alpha_cli.main(["certify", "--system", "thomas"]) == alpha_cli.EXIT_ERROR
        assert "missing required option(s): --alpha" in capsys.readouterr().err

    def test_help_exits_0(self, alpha_cli) -> None:
        with pytest.raises(SystemExit) as excinfo:
            alpha_cli.parse_args(["certify", "--help"])
        assert excinfo.value.code == 0


class TestConfig:
    def test_config_supplies_defaults(self, alpha_cli, tmp_path) -> None:
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"system": "thomas", "b": 0.3, "alpha": 2.5, "p": "inf", "times": [0, 1]}))
        args = alpha_cli.parse_args(["certify", "--config", str(cfg)])
        assert args.system == "thomas"
        assert args.b == 0.3
        assert args.alpha == 2.5
        assert args.p is MeasureNorm.LINF
        assert args.times.tolist() == [0.0, 1.0]

    def test_flags_win_over_config(self, alpha_cli, tmp_path) -> None:
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"alpha": 2.5, "grid": 3}))
        args = alpha_cli.parse_args(["certify", "--config", str(cfg), "--alpha", "2.9"])
        assert args.alpha == 2.9
        assert args.grid == 3

    def test_dashed_keys(self, alpha_cli, tmp_path) -> None:
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"strongly-invariant": True}))
        args = alpha_cli.parse_args(["hausdorff", "--config", str(cfg)])
        assert args.strongly_invariant is True

    @pytest.mark.parametrize(
        "content",
        ['{"nonsense": 1}', '{"p": "fro"}', "[1]", "{oops"],
        ids=["unknown-key", "bad-norm", "not-object", "invalid-json"],
    )
    def test_bad_config_is_usage_error(self, alpha_cli, tmp_path, content: str) -> None:
        cfg = tmp_path / "cfg.json"
        cfg.write_text(content)
        with pytest.raises(SystemExit) as excinfo:
            alpha_cli.parse_args(["certify", "--config", str(cfg)])
        assert excinfo.value.code == alpha_cli.EXIT_ERROR

    def test_missing_config_is_usage_error(self, alpha_cli, tmp_path) -> None:
        with pytest.raises(SystemExit) as excinfo:
            alpha_cli.parse_args(["certify", "--config", str(tmp_path / "absent.json")])
        assert excinfo.value.code == alpha_cli.EXIT_ERROR


class TestCommands:
    def test_measure(self, alpha_cli, tmp_path, capsys, reset_root_logger) -> None:
        path = tmp_path / "A.json"
        write_matrix(path, np.diag([-1.0, -2.0, -3.0]))
        assert alpha_cli.main(["measure", "--input", str(path), "--p", "2", "--alpha", "1.5"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["measure"] == pytest.approx(-2.0)
        assert payload["chain"] == pytest.approx([-1.0, -3.0, -6.0])
        assert payload["monotone_tail"] is True

    def test_domain_error_exits_1(self, alpha_cli, tmp_path, capsys, reset_root_logger) -> None:
        path = tmp_path / "A.json"
        write_matrix(path, np.diag([1.0, 0.0]))
        code = alpha_cli.main(["compound", "--input", str(path), "--kind", "mult", "--order", "1.5"])
        assert code == 1
        assert "singular" in capsys.readouterr().err

    def test_alpha_star_without_domain_uses_origin(self, alpha_cli, capsys, reset_root_logger) -> None:
        assert alpha_cli.main(["alpha-star", "--system", "laplacian-path3", "--p", "2", "--tol", "1e-4"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["system"] == "laplacian"
        assert 1.0 < payload["alpha_star"] < 1.5

    def test_integer_mult_compound_of_rectangular_matrix(self, alpha_cli, tmp_path, capsys, reset_root_logger) -> None:
        path = tmp_path / "A.json"
        write_matrix(path, [[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]])
        assert alpha_cli.main(["compound", "--input", str(path), "--kind", "mult", "--order", "2"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["shape"] == [1, 3]
        assert payload["spectrum"] is None
        assert [re for re, _ in payload["matrix"]["entries"]] == pytest.approx([-3.0, -6.0, -3.0])

    def test_refuted_and_usage_error_exit_differently(self, alpha_cli, capsys, reset_root_logger) -> None:
        refuted = alpha_cli.main(["certify", "--system", "thomas", "--b", "0.3", "--alpha", "2.1", "--grid", "3"])
        assert refuted == alpha_cli.EXIT_NOT_CERTIFIED
        assert json.loads(capsys.readouterr().out)["verdict"] == "refuted"
        with pytest.raises(SystemExit) as excinfo:
            alpha_cli.main(["certify", "--system", "bogus", "--alpha", "2.5"])
        assert excinfo.value.code == alpha_cli.EXIT_ERROR
