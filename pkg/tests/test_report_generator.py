"""
Tests for dimension, dihedral and exception tables and run summaries
"""

import pandas as pd
import pytest

from config.settings import DIMENSION_TABLE_COLUMNS, STATUS_UNRESOLVED, STATUS_ZERO_BY_DEGREE
from src.dirichlet import quadratic_character
from src.report_generator import EXCEPTION_TABLE_COLUMNS, ReportGenerator
from src.weightone import WeightOneEngine, WeightOneReport


@pytest.fixture(scope="module")
def level_23_report():
    return WeightOneEngine().compute(23, quadratic_character(-23, 23))


@pytest.fixture
def reports(level_23_report):
    zero = WeightOneReport(24, quadratic_character(-4, 24), STATUS_ZERO_BY_DEGREE, certified_dim=0, new_dim=0)
    unresolved = WeightOneReport(116, quadratic_character(-4, 116), STATUS_UNRESOLVED, class_size=2)
    return [unresolved, zero, level_23_report]


@pytest.fixture
def generator(tmp_path):
    return ReportGenerator(output_dir=tmp_path / "out", reports_dir=tmp_path / "reports")


def test_dimension_table(generator, reports):
    table = generator.dimension_table(reports)
    assert list(table.columns) == DIMENSION_TABLE_COLUMNS
    assert table["N"].tolist() == [23, 116]
    assert table["dimension"].tolist() == [1, -1]


def test_full_level_table(generator, reports):
    table = generator.full_level_table(reports).set_index("N")
    assert table.loc[23, "dimension"] == 1
    assert table.loc[24, "dimension"] == 0
    assert not table.loc[116, "resolved"]


def test_dihedral_and_exception_tables(generator, reports):
    dihedral = generator.dihedral_table(reports)
    assert dihedral["discriminant"].tolist() == [-23]
    assert dihedral["order"].tolist() == [3]
    exceptions = generator.exception_table(reports)
    assert exceptions.empty
    assert list(exceptions.columns) == EXCEPTION_TABLE_COLUMNS


def test_write_table_formats(generator, reports, tmp_path):
    path = generator.write_table(generator.dimension_table(reports), "dimension_table")
    assert path.suffix == ".tsv"
    assert pd.read_csv(path, sep="\t")["dimension"].tolist() == [1, -1]
    generator.output_format = "json"
    path = generator.write_table(generator.dimension_table(reports), "dimension_table")
    assert pd.read_json(path)["N"].tolist() == [23, 116]


def test_summary(generator, reports):
    summary = generator.create_summary(reports)
    assert summary["jobs"] == 3
    assert summary["levels"] == "23..116"
    assert summary["nonzero_rows"] == 1
    assert summary["unresolved"] == 1
    assert summary["modp_exceptions"] == 0


def test_generate_all_reports(generator, reports):
    paths = generator.generate_all_reports(reports, include_exceptions=True)
    assert set(paths) == {"dimensions", "full_level", "dihedral", "reports", "exceptions", "summary", "index"}
    assert all(path.exists() for path in paths.values())
    assert "Character classes: 3" in paths["index"].read_text()


@pytest.mark.slow
def test_dimension_table_matches_the_golden_rows(generator, fixtures_dir):
    golden = pd.read_csv(fixtures_dir / "dimension_table.tsv", sep="\t", dtype={"character": str})
    reports = WeightOneEngine().run_weight_one_pipeline(range(1, 61))
    table = generator.dimension_table(reports)
    expected = golden[golden["N"] <= 60].reset_index(drop=True)
    pd.testing.assert_frame_equal(table, expected, check_dtype=False)
