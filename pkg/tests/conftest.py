"""
Shared pytest fixtures and the slow-test switch
"""

from itertools import combinations
from math import gcd
import os
import sys
from pathlib import Path

import pytest

# Add project root to path
sys.path.append(os.path.join(os.path.dirname(__file__), '..'))

from config.settings import FIXTURES_DIR
from src.linalg import determinant, rref


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run tests marked slow")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: levels whose modular symbol spaces take minutes")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES_DIR


@pytest.fixture
def cache_dir(tmp_path) -> Path:
    return tmp_path / "cache"


@pytest.fixture
def torsion_oracle():
    """[saturation : lattice] as the gcd of the maximal minors of any generating matrix"""
    def oracle(rows, ncols: int) -> int:
        rows = [list(r) for r in rows if any(r)]
        if not rows:
            return 1
        r = len(rref(rows, ncols)[1])
        g = 0
        for chosen in combinations(rows, r):
            for columns in combinations(range(ncols), r):
                g = gcd(g, int(determinant([[row[j] for j in columns] for row in chosen])))
        return abs(g)

    return oracle
