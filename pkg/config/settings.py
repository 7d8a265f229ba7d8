"""
Weight One Modular Forms Engine
Main configuration module
"""

from pathlib import Path

# Project paths
PROJECT_ROOT = Path(__file__).parent.parent
DATA_DIR = PROJECT_ROOT / "data"
FIXTURES_DIR = DATA_DIR / "fixtures"
PROCESSED_DATA_DIR = DATA_DIR / "processed"
REPORTS_DIR = PROJECT_ROOT / "reports"
LOGS_DIR = PROJECT_ROOT / "logs"
DEFAULT_CACHE_DIR = PROJECT_ROOT / ".weightone_cache"
DEFAULT_JOB_FILE = Path(__file__).parent / "default_job.yaml"

# Environment variable overriding the cache directory
CACHE_DIR_ENV_VAR = "WEIGHTONE_CACHE_DIR"

# Engine identity (bump to invalidate every cache entry)
ENGINE_VERSION = "1.0.0"

# Auxiliary weight of the multipliers; products land in weight 2
AUXILIARY_WEIGHT = 1

# Precision policy
WORKING_PRECISION_MARGIN = 2
MAX_CERTIFICATION_ROUNDS = 3
STABLE_RANK_ROUNDS = 3
FINGERPRINT_FACTOR = 4

# Torsion bookkeeping
SMALL_PRIME_BOUND = 10_000
MIN_MULTIPLIERS_PER_PRIME = 2

# Hecke data used to describe eigenvalue fields
EIGENVALUE_FIELD_PRIMES = 5

# Parallelism
DEFAULT_JOBS = 1

# Exit codes
EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_UNRESOLVED = 2
EXIT_CONFIG_ERROR = 3

# Report statuses
STATUS_ZERO_BY_DEGREE = "ZERO_BY_DEGREE"
STATUS_MATCHED_DIHEDRAL = "MATCHED_DIHEDRAL"
STATUS_CERTIFIED_EXOTIC = "CERTIFIED_EXOTIC"
STATUS_UNRESOLVED = "UNRESOLVED"

# Mod-p classifications
CHARACTER_LIFT = "CHARACTER_LIFT"
NON_LIFTABLE = "NON_LIFTABLE"

# Logging configuration
LOG_LEVEL = "INFO"
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

# Job configuration validation rules (cerberus schema)
JOB_CONFIG_SCHEMA = {
    "levels": {
        "type": "list",
        "required": True,
        "minlength": 2,
        "maxlength": 2,
        "schema": {"type": "integer", "min": 1},
    },
    "characters": {
        "type": "list",
        "default": [],
        "schema": {"type": "string", "empty": False},
    },
    "precision": {
        "type": ["integer", "string"],
        "default": "auto",
        "anyof": [{"type": "integer", "min": 1}, {"type": "string", "allowed": ["auto"]}],
    },
    "modp": {"type": "boolean", "default": False},
    "certify": {"type": "boolean", "default": True},
    "suspect_primes": {
        "type": "list",
        "default": [],
        "schema": {"type": "integer", "min": 3},
    },
    "cache_dir": {"type": "string", "nullable": True, "default": None},
    "output_format": {"type": "string", "allowed": ["json", "tsv"], "default": "tsv"},
    "jobs": {"type": "integer", "min": 1, "default": DEFAULT_JOBS},
}

# Column order of the dimension table (diffable against the golden fixture)
DIMENSION_TABLE_COLUMNS = ["N", "character", "dimension"]
