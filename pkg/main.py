"""
Main Orchestrator for the Weight One Forms Engine
Runs dimension tables, q-expansions, mod-p scans and cache maintenance from the command line
"""

import logging
import sys
import os
import argparse
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime

# Add src to path
sys.path.append(os.path.join(os.path.dirname(__file__), 'src'))
sys.path.append(os.path.join(os.path.dirname(__file__), 'config'))

from src.cache import ResultCache
from src.dirichlet import conjugacy_classes, from_local_label, odd_characters
from src.job_config import ConfigError, JobConfig
from src.report_generator import ReportGenerator
from src.weightone import WeightOneEngine
from config.settings import *

# Setup logging
LOGS_DIR.mkdir(parents=True, exist_ok=True)
logging.basicConfig(
    level=getattr(logging, LOG_LEVEL),
    format=LOG_FORMAT,
    handlers=[
        logging.StreamHandler(),
        logging.FileHandler(LOGS_DIR / f'weightone_log_{datetime.now().strftime("%Y%m%d")}.log')
    ]
)
logger = logging.getLogger(__name__)


class SystemOrchestrator:
    """Orchestrates weight-one jobs over a level range"""

    def __init__(self, config: JobConfig):
        logger.info("Initializing Weight One Forms Engine...")
        self.config = config
        self.cache = ResultCache(config.cache_dir)
        self.engine = WeightOneEngine(precision=config.precision, certify=config.certify, modp=config.modp,
                                      suspect_primes=config.suspect_primes, cache=self.cache)
        self.report_generator = ReportGenerator(output_format=config.output_format)
        self._setup_directories()

    def _setup_directories(self):
        """Ensure all necessary directories exist"""
        for directory in [DATA_DIR, PROCESSED_DATA_DIR, REPORTS_DIR, LOGS_DIR, self.config.cache_dir]:
            directory.mkdir(parents=True, exist_ok=True)
        logger.info("Directory structure verified")

    def _characters(self, N: int) -> list:
        """Representatives of the odd Galois classes selected by the job"""
        if self.config.characters:
            chars = {chi for label in self.config.characters for chi in from_local_label(label, N) if chi.is_odd()}
            chars = sorted(chars, key=lambda c: c.key)
        else:
            chars = odd_characters(N)
        return conjugacy_classes(chars)

    def _run_level(self, N: int) -> list:
        reports = []
        for cls in self._characters(N):
            report = self.engine.compute(N, cls.representative)
            report.class_size = cls.size
            reports.append(report)
        return reports

    def run_jobs(self) -> list:
        """One report per (N, character class); results ordered by level whatever the parallelism"""
        levels = list(self.config.level_range)
        logger.info("=" * 60)
        logger.info(f"STARTING WEIGHT ONE JOBS FOR LEVELS {levels[0]}..{levels[-1]}")
        logger.info("=" * 60)
        start_time = datetime.now()
        try:
            if self.config.jobs > 1:
                with ThreadPoolExecutor(max_workers=self.config.jobs) as pool:
                    per_level = list(pool.map(self._run_level, levels))
            else:
                per_level = [self._run_level(N) for N in levels]
            reports = [r for level_reports in per_level for r in level_reports]
            logger.info("=" * 60)
            logger.info(f"JOBS COMPLETED: {len(reports)} character classes in {datetime.now() - start_time}")
            logger.info(f"Cache hits {self.cache.hits}, misses {self.cache.misses}")
            logger.info("=" * 60)
            return reports
        except Exception as e:
            logger.error(f"Weight one jobs failed: {e}")
            raise

    def cmd_dims(self) -> tuple:
        reports = self.run_jobs()
        self.report_generator.generate_all_reports(reports, include_exceptions=self.config.modp)
        table = self.report_generator.dimension_table(reports)
        return table, reports

    def cmd_modp_scan(self) -> tuple:
        self.engine.modp = True
        reports = self.run_jobs()
        self.report_generator.generate_all_reports(reports, include_exceptions=True)
        return self.report_generator.exception_table(reports), reports

    def cmd_dihedral(self) -> tuple:
        self.engine.certify = False
        reports = self.run_jobs()
        return self.report_generator.dihedral_table(reports), reports

    def cmd_qexp(self, precision: int) -> list:
        """(character label, eigenforms) for each selected class at the first level"""
        N = self.config.levels[0]
        output = []
        for cls in self._characters(N):
            forms = self.engine.eigenforms(N, cls.representative, precision)
            output.append((cls.representative.label(), forms))
        return output


def _emit(frame, output_format: str):
    if output_format == "json":
        print(frame.to_json(orient="records", indent=2))
    else:
        print(frame.to_csv(sep="\t", index=False), end="")


def _exit_code(reports) -> int:
    return EXIT_UNRESOLVED if any(r.status == STATUS_UNRESOLVED for r in reports) else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description='Weight One Forms Engine')
    parser.add_argument('command', choices=['dims', 'qexp', 'modp', 'dihedral', 'cache'],
                        help='What to compute')
    parser.add_argument('action', nargs='?', choices=['status', 'verify', 'evict', 'warm'],
                        help='Cache action (cache command only)')
    parser.add_argument('--job', help='YAML job description (flags override it)')
    parser.add_argument('--levels', help='Level range A..B or a single level N')
    parser.add_argument('--char', action='append', help='Character label such as "2_1 41_40"; repeatable')
    parser.add_argument('--prec', help="Working precision N or 'auto'")
    parser.add_argument('--modp', action='store_true', help='Also scan for mod-p exceptions')
    parser.add_argument('--no-certify', action='store_true', help='Skip squaring certificates')
    parser.add_argument('--suspect', help='Comma-separated primes to scan in addition to torsion suspects')
    parser.add_argument('--cache', help='Cache directory')
    parser.add_argument('--format', choices=['json', 'tsv'], help='Output format')
    parser.add_argument('--jobs', type=int, help='Parallel jobs')
    parser.add_argument('--verbose', action='store_true', help='Enable verbose logging')
    return parser


def main(argv=None) -> int:
    """Main execution function with command line interface"""
    args = build_parser().parse_args(argv)

    # Set logging level
    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)

    # For qexp, --prec is the number of printed coefficients, not the working precision
    terms = None
    try:
        if args.command == 'qexp' and args.prec not in (None, 'auto'):
            terms = int(args.prec)
            args.prec = None
    except ValueError:
        logger.error(f"Configuration error: --prec expects an integer, got '{args.prec}'")
        return EXIT_CONFIG_ERROR

    try:
        if args.job is None and args.levels is None and args.command != 'cache':
            args.job = str(DEFAULT_JOB_FILE)
        if args.command == 'cache' and args.levels is None:
            config = JobConfig.from_args(args, base={"levels": [1, 1]})
        else:
            config = JobConfig.from_args(args)
    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG_ERROR

    orchestrator = SystemOrchestrator(config)

    try:
        if args.command == 'dims':
            table, reports = orchestrator.cmd_dims()
            _emit(table, config.output_format)
            return _exit_code(reports)
        if args.command == 'modp':
            table, reports = orchestrator.cmd_modp_scan()
            _emit(table, config.output_format)
            return _exit_code(reports)
        if args.command == 'dihedral':
            table, reports = orchestrator.cmd_dihedral()
            _emit(table, config.output_format)
            return EXIT_OK
        if args.command == 'qexp':
            results = orchestrator.cmd_qexp(terms)
            for label, forms in results:
                if not forms:
                    print(f"S_1({config.levels[0]}, {label}) = 0")
                for form in forms:
                    print(f"{label}  [{form.eigenvalue_field.describe()}]  multiplicity {form.multiplicity}")
                    print(f"  {form.expansion()}")
            return EXIT_OK
        # cache maintenance
        cache = orchestrator.cache
        action = args.action or 'status'
        if action == 'verify':
            corrupt = cache.verify()
            for path in corrupt:
                print(f"corrupt\t{path}")
            return EXIT_FAILURE if corrupt else EXIT_OK
        if action == 'evict':
            print(f"evicted\t{cache.evict()}")
            return EXIT_OK
        if action == 'warm':
            added = cache.warm(config.level_range, orchestrator._run_level)
            print(f"warmed\t{added}")
            return EXIT_OK
        _emit(cache.status(), config.output_format)
        return EXIT_OK

    except Exception as e:
        logger.error(f"System execution failed: {e}")
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
