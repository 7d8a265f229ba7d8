"""
Tests for the command-line surface and its exit codes
"""

import pytest

import main
from config.settings import EXIT_CONFIG_ERROR, EXIT_OK


@pytest.fixture
def sandbox(monkeypatch, tmp_path):
    """Keep tables, indexes and logs out of the project tree"""
    for name in ["DATA_DIR", "PROCESSED_DATA_DIR", "REPORTS_DIR"]:
        monkeypatch.setattr(main, name, tmp_path / name.lower())
    monkeypatch.setattr("src.report_generator.PROCESSED_DATA_DIR", tmp_path / "processed_data_dir")
    monkeypatch.setattr("src.report_generator.REPORTS_DIR", tmp_path / "reports_dir")
    return tmp_path


def test_parser():
    args = main.build_parser().parse_args(["qexp", "--levels", "82", "--char", "2_1 41_40", "--prec", "20"])
    assert args.command == "qexp"
    assert args.char == ["2_1 41_40"]
    assert args.prec == "20"
    with pytest.raises(SystemExit):
        main.build_parser().parse_args(["plot"])


@pytest.mark.parametrize("argv", [
    ["dims", "--levels", "30..23"],
    ["dims", "--levels", "23", "--prec", "10"],
    ["dims", "--levels", "23", "--suspect", "9"],
    ["qexp", "--levels", "23", "--prec", "many"],
])
def test_configuration_errors_exit_with_3(argv, sandbox):
    assert main.main(argv + ["--cache", str(sandbox / "cache")]) == EXIT_CONFIG_ERROR


def test_malformed_job_file_exits_with_3(sandbox):
    job = sandbox / "broken.yaml"
    job.write_text("levels: [23,\n")
    assert main.main(["dims", "--job", str(job), "--cache", str(sandbox / "cache")]) == EXIT_CONFIG_ERROR


def test_dims_at_level_23(sandbox, capsys):
    assert main.main(["dims", "--levels", "23", "--cache", str(sandbox / "cache")]) == EXIT_OK
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "N\tcharacter\tdimension"
    assert out[1] == "23\t23_2\t1"


def test_qexp_at_level_23(sandbox, capsys):
    assert main.main(["qexp", "--levels", "23", "--prec", "10", "--cache", str(sandbox / "cache")]) == EXIT_OK
    out = capsys.readouterr().out
    assert "23_2" in out
    assert "q - q^2 - q^3 + q^6 + q^8" in out


def test_cache_status_and_verify(sandbox, capsys):
    cache = str(sandbox / "cache")
    assert main.main(["cache", "status", "--cache", cache]) == EXIT_OK
    assert main.main(["cache", "verify", "--cache", cache]) == EXIT_OK
    assert main.main(["cache", "evict", "--cache", cache]) == EXIT_OK
    assert "evicted\t0" in capsys.readouterr().out
