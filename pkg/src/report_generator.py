"""
Automated Report Generator
Writes dimension, dihedral and mod-p exception tables plus run summaries
"""

import pandas as pd
from pathlib import Path
import json
import logging
import sys
import os
from datetime import datetime

# Add config to path
sys.path.append(os.path.join(os.path.dirname(__file__), '..'))
from config.settings import *

# Setup logging
logging.basicConfig(level=getattr(logging, LOG_LEVEL), format=LOG_FORMAT)
logger = logging.getLogger(__name__)

EXCEPTION_TABLE_COLUMNS = ["N", "p", "ideal", "character", "extra_dimension", "classification",
                           "certified", "advisory"]
DIHEDRAL_TABLE_COLUMNS = ["N", "character", "discriminant", "conductor", "order"]


class ReportGenerator:
    """Turn WeightOneReport lists into TSV / JSON tables and text summaries"""

    def __init__(self, output_dir: Path = None, reports_dir: Path = None, output_format: str = "tsv"):
        self.output_dir = Path(output_dir) if output_dir is not None else PROCESSED_DATA_DIR
        self.reports_dir = Path(reports_dir) if reports_dir is not None else REPORTS_DIR
        self.output_format = output_format
        self.report_timestamp = datetime.now().strftime('%Y-%m-%d_%H-%M-%S')

    # Tables
    def dimension_table(self, reports: list) -> pd.DataFrame:
        """Rows with nonzero newform dimension, plus unresolved rows (dimension -1)"""
        rows = [r.to_row() for r in reports if r.new_dim != 0]
        frame = pd.DataFrame(rows, columns=DIMENSION_TABLE_COLUMNS)
        return frame.sort_values(["N", "character"], kind="stable").reset_index(drop=True)

    def full_level_table(self, reports: list) -> pd.DataFrame:
        """dim S_1(N) summed over Galois classes of characters"""
        rows = [{"N": r.level, "dimension": r.full_level_dimension, "resolved": r.is_resolved} for r in reports]
        if not rows:
            return pd.DataFrame(columns=["N", "dimension", "resolved"])
        frame = pd.DataFrame(rows)
        return frame.groupby("N", as_index=False).agg(dimension=("dimension", "sum"), resolved=("resolved", "all"))

    def exception_table(self, reports: list) -> pd.DataFrame:
        rows = []
        for r in reports:
            for e in r.modp_exceptions:
                rows.append({"N": r.level, "p": e.p, "ideal": e.ideal.describe(), "character": e.character.label(),
                             "extra_dimension": e.extra_dimension, "classification": e.classification,
                             "certified": e.certified, "advisory": e.advisory or ""})
        return pd.DataFrame(rows, columns=EXCEPTION_TABLE_COLUMNS)

    def dihedral_table(self, reports: list) -> pd.DataFrame:
        rows = []
        for r in reports:
            for rep in r.dihedral:
                rows.append({"N": rep.level, "character": rep.det.label(),
                             "discriminant": rep.source.quadratic_field.D,
                             "conductor": rep.source.conductor.describe(), "order": rep.source.order})
        return pd.DataFrame(rows, columns=DIHEDRAL_TABLE_COLUMNS)

    def write_table(self, frame: pd.DataFrame, name: str) -> Path:
        """Write a table as TSV or JSON records in the output directory"""
        self.output_dir.mkdir(parents=True, exist_ok=True)
        if self.output_format == "json":
            path = self.output_dir / f"{name}.json"
            frame.to_json(path, orient="records", indent=2)
        else:
            path = self.output_dir / f"{name}.tsv"
            frame.to_csv(path, sep="\t", index=False)
        logger.info(f"Wrote {len(frame)} rows to {path}")
        return path

    def write_reports_json(self, reports: list, name: str = "weight_one_reports") -> Path:
        """Full per-(N, chi) reports following docs/report_schema.json"""
        self.output_dir.mkdir(parents=True, exist_ok=True)
        path = self.output_dir / f"{name}.json"
        document = {"engine_version": ENGINE_VERSION, "reports": [r.to_json() for r in reports]}
        with open(path, "w") as f:
            json.dump(document, f, indent=2, default=str)
        logger.info(f"Wrote {len(reports)} reports to {path}")
        return path

    # Summaries
    def create_summary(self, reports: list) -> dict:
        statuses = pd.Series([r.status for r in reports], dtype="object")
        exceptions = self.exception_table(reports)
        return {
            "report_date": datetime.now().strftime('%Y-%m-%d %H:%M'),
            "levels": f"{min(r.level for r in reports)}..{max(r.level for r in reports)}" if reports else "none",
            "jobs": len(reports),
            "status_counts": statuses.value_counts().to_dict(),
            "nonzero_rows": int(sum(1 for r in reports if r.new_dim)),
            "unresolved": int((statuses == STATUS_UNRESOLVED).sum()),
            "modp_exceptions": len(exceptions),
            "non_liftable": int((exceptions["classification"] == NON_LIFTABLE).sum()) if len(exceptions) else 0,
        }

    def write_summary(self, summary: dict, name: str = "weight_one_summary") -> Path:
        self.output_dir.mkdir(parents=True, exist_ok=True)
        path = self.output_dir / f"{name}.txt"
        with open(path, 'w') as f:
            f.write("WEIGHT ONE RUN SUMMARY\n")
            f.write("=" * 60 + "\n")
            f.write(f"Generated: {summary['report_date']}\n")
            f.write(f"Levels: {summary['levels']}\n")
            f.write(f"Character classes processed: {summary['jobs']}\n")
            for status, count in sorted(summary["status_counts"].items()):
                f.write(f"  {status}: {count}\n")
            f.write(f"Rows with nonzero newform dimension: {summary['nonzero_rows']}\n")
            f.write(f"Mod-p exceptions: {summary['modp_exceptions']} ({summary['non_liftable']} non-liftable)\n")
        logger.info(f"Summary written to {path}")
        return path

    def generate_all_reports(self, reports: list, include_exceptions: bool = False) -> dict:
        """Write every table, the summary and the run index; returns the written paths"""
        logger.info("Starting report generation...")
        try:
            paths = {
                "dimensions": self.write_table(self.dimension_table(reports), "dimension_table"),
                "full_level": self.write_table(self.full_level_table(reports), "full_level_dimensions"),
                "dihedral": self.write_table(self.dihedral_table(reports), "dihedral_forms"),
                "reports": self.write_reports_json(reports),
            }
            if include_exceptions:
                paths["exceptions"] = self.write_table(self.exception_table(reports), "modp_exceptions")
            summary = self.create_summary(reports)
            paths["summary"] = self.write_summary(summary)
            paths["index"] = self._create_report_index(summary, paths)
            logger.info("All reports generated successfully!")
            return paths
        except Exception as e:
            logger.error(f"Report generation failed: {e}")
            raise

    def _create_report_index(self, summary: dict, paths: dict) -> Path:
        """Markdown index of the files written by this run"""
        files = "\n".join(f"- **{name.replace('_', ' ').title()}**: `{path}`" for name, path in paths.items())
        index_content = f"""# Weight One Forms
## Run of {summary['report_date']}

### Summary
- **Levels**: {summary['levels']}
- **Character classes**: {summary['jobs']}
- **Nonzero rows**: {summary['nonzero_rows']}
- **Unresolved**: {summary['unresolved']}
- **Mod-p exceptions**: {summary['modp_exceptions']} ({summary['non_liftable']} non-liftable)

### Generated Files
{files}

---
*Engine version {ENGINE_VERSION}*
"""
        self.reports_dir.mkdir(parents=True, exist_ok=True)
        index_path = self.reports_dir / f'report_index_{self.report_timestamp}.md'
        with open(index_path, 'w') as f:
            f.write(index_content)
        logger.info(f"Report index created: {index_path}")
        return index_path
