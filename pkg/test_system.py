"""
Smoke test suite for the Weight One Forms Engine
"""

import os
import sys
import pandas as pd
from pathlib import Path

# Add project root to path
sys.path.append(os.path.dirname(__file__))

def test_fixture_files_exist():
    """Test that the golden fixtures are present"""
    base_dir = Path(__file__).parent
    required_files = [
        'data/fixtures/dimension_table.tsv',
        'data/fixtures/level82_mod199.json',
        'config/default_job.yaml',
    ]

    print("Testing fixture file existence...")
    for file_path in required_files:
        full_path = base_dir / file_path
        assert full_path.exists(), f"Required file missing: {file_path}"
        print(f"✓ {file_path}")

    print("All fixture files exist!")

def test_fixture_quality():
    """Test that the golden dimension table is well formed"""
    base_dir = Path(__file__).parent

    print("\nTesting fixture quality...")

    table = pd.read_csv(base_dir / 'data/fixtures/dimension_table.tsv', sep='\t', dtype={'character': str})
    assert list(table.columns) == ['N', 'character', 'dimension'], "Unexpected columns"
    assert len(table) > 0, "Dimension table is empty"
    assert (table['dimension'] > 0).all(), "Zero rows belong out of the table"
    assert table['N'].is_monotonic_increasing, "Rows are not sorted by level"
    print("✓ Dimension table quality")

    print("All fixture quality checks passed!")

def test_level_23():
    """Test the first level with a weight one form"""
    print("\nTesting level 23...")

    from src.dirichlet import quadratic_character
    from src.weightone import WeightOneEngine

    report = WeightOneEngine().compute(23, quadratic_character(-23, 23))
    assert report.certified_dim == 1, f"dim S_1(23, chi) should be 1, got {report.certified_dim}"
    assert report.to_row() == {"N": 23, "character": "23_2", "dimension": 1}, "Unexpected table row"
    print(f"✓ S_1(23) status {report.status}")

    print("Level 23 checks passed!")

def test_system_configuration():
    """Test system configuration"""
    print("\nTesting system configuration...")

    try:
        import config.settings as settings
        assert settings.WORKING_PRECISION_MARGIN >= 0, "Invalid precision margin"
        assert settings.MAX_CERTIFICATION_ROUNDS > 0, "Invalid certification rounds"
        print("✓ Configuration loaded successfully")
    except ImportError:
        print("✗ Configuration import failed")
        raise

    print("Configuration tests passed!")

def run_all_tests():
    """Run all tests"""
    print("=" * 60)
    print("WEIGHT ONE FORMS ENGINE - TEST SUITE")
    print("=" * 60)

    try:
        test_fixture_files_exist()
        test_fixture_quality()
        test_level_23()
        test_system_configuration()

        print("\n" + "=" * 60)
        print("ALL TESTS PASSED! ✓")
        print("System is working correctly.")
        print("=" * 60)

        return True

    except Exception as e:
        print(f"\n❌ TEST FAILED: {e}")
        print("=" * 60)
        return False

if __name__ == "__main__":
    success = run_all_tests()
    sys.exit(0 if success else 1)
