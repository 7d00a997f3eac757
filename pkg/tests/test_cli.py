#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Tests for the command-line interface.
"""

import os
import json
import logging
import shutil
import tempfile
from typing import Any, Dict, Generator

import pytest
from click.testing import CliRunner
from pytest_mock import MockerFixture

from faberlab import __version__
from faberlab.__main__ import EXIT_CODES, cli


@pytest.fixture
def temp_dir() -> Generator[str, None, None]:
    """
    Create a temporary directory for testing.

    Returns:
        str: Path to temporary directory
    """
    temp_dir = tempfile.mkdtemp(prefix="faberlab_test_")
    try:
        yield temp_dir
    finally:
        shutil.rmtree(temp_dir)


@pytest.fixture(autouse=True)
def restore_logging() -> Generator[None, None, None]:
    """Put back the root handlers replaced by the cli group."""
    root = logging.getLogger()
    handlers, level = root.handlers[:], root.level
    yield
    for handler in root.handlers[:]:
        root.removeHandler(handler)
        if handler not in handlers:
            handler.close()
    for handler in handlers:
        root.addHandler(handler)
    root.setLevel(level)


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner()


def _verify_result(success: bool) -> Dict[str, Any]:
    checks = [
        {"name": "alpha_family", "passed": True, "residual": 1e-12, "threshold": 1e-8},
        {"name": "weak_star", "passed": success, "residual": None, "threshold": 0.1},
    ]
    result: Dict[str, Any] = {"success": success, "report": {"checks": checks}, "files": []}
    if success:
        result["message"] = "All 2 checks passed"
    else:
        result.update(message="1 check(s) failed: weak_star", error_kind="verify")
    return result


def test_version(runner: CliRunner) -> None:
    result = runner.invoke(cli, ["--version"])
    assert result.exit_code == 0
    assert __version__ in result.output


def test_gen_writes_files(runner: CliRunner, temp_dir: str) -> None:
    """
    gen writes one file per degree.

    Args:
        runner: Click test runner
        temp_dir: Temporary directory
    """
    result = runner.invoke(cli, ["gen", "--map", "lemniscate-2", "--n", "0..2", "--out", temp_dir])

    assert result.exit_code == 0, result.output
    assert sorted(os.listdir(temp_dir)) == ["faber_n0000.json", "faber_n0001.json", "faber_n0002.json"]


def test_gen_csv(runner: CliRunner, temp_dir: str) -> None:
    result = runner.invoke(cli, ["gen", "--map", "lemniscate-3", "--n", "3", "--out", temp_dir, "--format", "csv"])

    assert result.exit_code == 0, result.output
    assert os.path.exists(os.path.join(temp_dir, "faber_n0003.csv"))


def test_gen_inline_spec(runner: CliRunner, temp_dir: str) -> None:
    result = runner.invoke(
        cli, ["gen", "--map", '{"kind": "lemniscate", "s": 4}', "--n", "4", "--out", temp_dir]
    )

    assert result.exit_code == 0, result.output
    with open(os.path.join(temp_dir, "faber_n0004.json")) as f:
        coeffs = json.load(f)["coeffs"]
    assert coeffs[0] == pytest.approx([-1.0, 0.0])


def test_unknown_map_is_spec_error(runner: CliRunner, temp_dir: str) -> None:
    result = runner.invoke(cli, ["gen", "--map", "no-such-map", "--n", "2", "--out", temp_dir])

    assert result.exit_code == EXIT_CODES["spec"] == 2
    assert "no-such-map" in result.output


@pytest.mark.parametrize(
    "args",
    [
        ["gen", "--map", "lemniscate-2", "--n", ""],
        ["gen", "--map", "lemniscate-2", "--n", "5..1"],
        ["gen", "--n", "2"],
        ["gen", "--map", "lemniscate-2"],
        ["gen", "--map", "lemniscate-2", "--n", "2", "--format", "xml"],
        ["verify", "--n", ""],
        ["zeros", "--map", "lemniscate-2", "--n", "-3"],
    ],
)
def test_usage_errors(runner: CliRunner, args: list) -> None:
    result = runner.invoke(cli, args)
    assert result.exit_code == 2


def test_numeric_failure_exit_code(runner: CliRunner, temp_dir: str, mocker: MockerFixture) -> None:
    """
    Numeric failures exit with code 3.

    Args:
        runner: Click test runner
        temp_dir: Temporary directory
        mocker: Mocker fixture
    """
    mocker.patch(
        "faberlab.__main__.FaberLabController.generate",
        return_value={"success": False, "message": "Numeric failure: tail", "error_kind": "numeric"},
    )

    result = runner.invoke(cli, ["gen", "--map", "lemniscate-2", "--n", "2", "--out", temp_dir])

    assert result.exit_code == EXIT_CODES["numeric"] == 3


def test_zeros_command(runner: CliRunner, temp_dir: str) -> None:
    result = runner.invoke(cli, ["zeros", "--map", "lemniscate-2", "--n", "1..3", "--out", temp_dir, "--tol", "1e-12"])

    assert result.exit_code == 0, result.output
    with open(os.path.join(temp_dir, "zeros.csv")) as f:
        lines = f.read().splitlines()
    assert lines[0] == "n,re,im"
    assert len(lines) == 1 + 1 + 2 + 3


def test_predict_command(runner: CliRunner, temp_dir: str) -> None:
    result = runner.invoke(
        cli,
        ["predict", "--map", "two-corner-3pi4", "--n", "50", "--out", temp_dir, "--grid", "-0.5,0.5,-0.5,0.5,2"],
    )

    assert result.exit_code == 0, result.output
    with open(os.path.join(temp_dir, "prediction.json")) as f:
        assert json.load(f)["accumulation"]["q"] == 4


def test_predict_lemniscate_warning_is_not_failure(runner: CliRunner, temp_dir: str) -> None:
    result = runner.invoke(cli, ["predict", "--map", "lemniscate-3", "--n", "30", "--out", temp_dir])

    assert result.exit_code == 0, result.output
    assert "Warning" in result.output


def test_verify_pass(runner: CliRunner, mocker: MockerFixture) -> None:
    """
    verify prints one line per check and exits 0 when all pass.

    Args:
        runner: Click test runner
        mocker: Mocker fixture
    """
    verify = mocker.patch("faberlab.__main__.FaberLabController.verify", return_value=_verify_result(True))

    result = runner.invoke(cli, ["verify", "--tol", "1e-6", "--seed", "3", "--n", "10,31"])

    assert result.exit_code == 0, result.output
    assert "PASS  alpha_family" in result.output
    assert "residual n/a" in result.output
    kwargs = verify.call_args.kwargs
    assert kwargs["tolerances"] == {"oracle": 1e-6}
    assert kwargs["seed"] == 3
    assert kwargs["degrees"] == [10, 31]
    assert kwargs["out_dir"] is None


def test_verify_fail(runner: CliRunner, mocker: MockerFixture) -> None:
    mocker.patch("faberlab.__main__.FaberLabController.verify", return_value=_verify_result(False))

    result = runner.invoke(cli, ["verify"])

    assert result.exit_code == EXIT_CODES["verify"] == 1
    assert "FAIL  weak_star" in result.output


def test_config_file(runner: CliRunner, temp_dir: str) -> None:
    """
    Settings come from the [run] table; flags override them.

    Args:
        runner: Click test runner
        temp_dir: Temporary directory
    """
    out_dir = os.path.join(temp_dir, "coeffs")
    config_path = os.path.join(temp_dir, "run.toml")
    with open(config_path, "w") as f:
        f.write(f'[run]\nmap = "lemniscate-3"\nn = "1..2"\nout = "{out_dir}"\nformat = "csv"\n')

    result = runner.invoke(cli, ["--config", config_path, "gen", "--n", "4"])

    assert result.exit_code == 0, result.output
    assert os.listdir(out_dir) == ["faber_n0004.csv"]


def test_bad_config_file(runner: CliRunner, temp_dir: str) -> None:
    config_path = os.path.join(temp_dir, "run.toml")
    with open(config_path, "w") as f:
        f.write("[run\n")

    result = runner.invoke(cli, ["--config", config_path, "gen"])

    assert result.exit_code == 2


def test_save_log(runner: CliRunner, temp_dir: str, monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv("HOME", temp_dir)
    out_dir = os.path.join(temp_dir, "coeffs")
    result = runner.invoke(cli, ["--save-log", "gen", "--map", "lemniscate-2", "--n", "1", "--out", out_dir])

    assert result.exit_code == 0, result.output
    assert os.path.exists(os.path.join(temp_dir, ".config", "faberlab", "logs", "faberlab.log"))


def test_custom_maps_dir(runner: CliRunner, temp_dir: str) -> None:
    """
    Profiles from --maps-dir are usable by id.

    Args:
        runner: Click test runner
        temp_dir: Temporary directory
    """
    maps_dir = os.path.join(temp_dir, "maps")
    os.makedirs(maps_dir)
    with open(os.path.join(maps_dir, "petals-4.json"), "w") as f:
        json.dump({"id": "petals-4", "name": "Four petals", "spec": {"kind": "lemniscate", "s": 4}}, f)
    out_dir = os.path.join(temp_dir, "coeffs")

    result = runner.invoke(cli, ["--maps-dir", maps_dir, "gen", "--map", "petals-4", "--n", "4", "--out", out_dir])

    assert result.exit_code == 0, result.output
    assert os.listdir(out_dir) == ["faber_n0004.json"]


@pytest.mark.parametrize(
    "command,extra,flag",
    [
        ("gen", ["--seed", "5"], "--seed"),
        ("gen", ["--tol", "1e-6"], "--tol"),
        ("zeros", ["--format", "csv"], "--format"),
        ("predict", ["--format", "csv"], "--format"),
    ],
)
def test_unused_options_warn(runner: CliRunner, temp_dir: str, command: str, extra: list, flag: str) -> None:
    """
    Options a command does not use are reported, not silently dropped.

    Args:
        runner: Click test runner
        temp_dir: Temporary directory
        command: Subcommand name
        extra: Options under test
        flag: Option expected in the warning
    """
    args = [command, "--map", "lemniscate-2", "--n", "2", "--out", temp_dir] + extra
    result = runner.invoke(cli, args)

    assert result.exit_code == 0, result.output
    assert f"{command} does not use {flag}; ignored" in result.output
