"""
Job Configuration Module
Loads, validates and normalises job descriptions from YAML files and command-line flags
"""

from dataclasses import dataclass, field
from pathlib import Path
import logging
import sys
import os

import yaml
from cerberus import Validator
from dotenv import load_dotenv
from sympy import isprime

# Add config to path
sys.path.append(os.path.join(os.path.dirname(__file__), '..'))
from config.settings import *
from src.modsym import degree_omega

# Setup logging
logging.basicConfig(level=getattr(logging, LOG_LEVEL), format=LOG_FORMAT)
logger = logging.getLogger(__name__)


class ConfigError(ValueError):
    """Invalid job description"""


def parse_levels(text: str) -> list:
    """'A..B' or 'N' -> [A, B]"""
    text = str(text).strip()
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            levels = [int(lo), int(hi)]
        else:
            levels = [int(text), int(text)]
    except ValueError:
        raise ConfigError(f"Level range '{text}' is not of the form A..B or N")
    if levels[0] > levels[1]:
        raise ConfigError(f"Level range '{text}' is empty")
    return levels


def parse_primes(text: str) -> list:
    try:
        return [int(p) for p in str(text).split(",") if p.strip()]
    except ValueError:
        raise ConfigError(f"Suspect primes '{text}' are not a comma-separated list of integers")


@dataclass
class JobConfig:
    levels: list
    characters: list = field(default_factory=list)
    precision: object = "auto"
    modp: bool = False
    certify: bool = True
    suspect_primes: list = field(default_factory=list)
    cache_dir: Path = DEFAULT_CACHE_DIR
    output_format: str = "tsv"
    jobs: int = DEFAULT_JOBS

    @property
    def level_range(self) -> range:
        return range(self.levels[0], self.levels[1] + 1)

    @property
    def minimum_precision(self) -> int:
        return int(4 * degree_omega(max(self.levels[1], 1))) + 1

    @classmethod
    def from_dict(cls, raw: dict) -> "JobConfig":
        """Validate against JOB_CONFIG_SCHEMA and fill defaults"""
        validator = Validator(JOB_CONFIG_SCHEMA)
        if not validator.validate(raw or {}):
            raise ConfigError(f"Invalid job configuration: {validator.errors}")
        document = validator.document
        lo, hi = document["levels"]
        if lo > hi:
            raise ConfigError(f"Level range {lo}..{hi} is empty")
        for p in document["suspect_primes"]:
            if not isprime(p):
                raise ConfigError(f"Suspect prime {p} is not prime")

        load_dotenv()
        cache_dir = os.environ.get(CACHE_DIR_ENV_VAR) or document["cache_dir"] or DEFAULT_CACHE_DIR
        config = cls(levels=[lo, hi], characters=list(document["characters"]), precision=document["precision"],
                     modp=document["modp"], certify=document["certify"],
                     suspect_primes=list(document["suspect_primes"]), cache_dir=Path(cache_dir),
                     output_format=document["output_format"], jobs=document["jobs"])
        config.check_precision()
        return config

    @staticmethod
    def read_job_file(path) -> dict:
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"Job file {path} does not exist")
        try:
            with open(path) as handle:
                raw = yaml.safe_load(handle) or {}
        except yaml.YAMLError as e:
            raise ConfigError(f"Job file {path} is not valid YAML: {e}")
        if not isinstance(raw, dict):
            raise ConfigError(f"Job file {path} does not hold a mapping")
        logger.info(f"Loaded job description from {path}")
        return raw

    @classmethod
    def from_yaml(cls, path) -> "JobConfig":
        return cls.from_dict(cls.read_job_file(path))

    @classmethod
    def from_args(cls, args, base: dict = None) -> "JobConfig":
        """Command-line flags override the YAML job (or the default job)"""
        raw = dict(base) if base is not None else {}
        if base is None and getattr(args, "job", None):
            raw = cls.read_job_file(args.job)
        if getattr(args, "levels", None):
            raw["levels"] = parse_levels(args.levels)
        if getattr(args, "char", None):
            raw["characters"] = list(args.char)
        if getattr(args, "prec", None):
            raw["precision"] = "auto" if args.prec == "auto" else _as_int(args.prec, "--prec")
        if getattr(args, "modp", False):
            raw["modp"] = True
        if getattr(args, "no_certify", False):
            raw["certify"] = False
        if getattr(args, "suspect", None):
            raw["suspect_primes"] = parse_primes(args.suspect)
        if getattr(args, "cache", None):
            raw["cache_dir"] = str(args.cache)
        if getattr(args, "format", None):
            raw["output_format"] = args.format
        if getattr(args, "jobs", None):
            raw["jobs"] = args.jobs
        if "levels" not in raw:
            raise ConfigError("No level range given (use --levels A..B or a job file)")
        return cls.from_dict(raw)

    def check_precision(self):
        if self.precision != "auto" and self.certify and self.precision < self.minimum_precision:
            raise ConfigError(f"Precision {self.precision} is below {self.minimum_precision} "
                              f"needed to certify level {self.levels[1]}")

    def to_dict(self) -> dict:
        return {"levels": list(self.levels), "characters": list(self.characters), "precision": self.precision,
                "modp": self.modp, "certify": self.certify, "suspect_primes": list(self.suspect_primes),
                "cache_dir": str(self.cache_dir), "output_format": self.output_format, "jobs": self.jobs}


def _as_int(value, flag: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"{flag} expects an integer or 'auto', got '{value}'")
