"""
Output files of a study: CSV tables, JSON reports and the Markdown step log.

CSV follows RFC 4180 with LF line endings; floats are written with 17
significant digits so identical configs give byte-identical files.
"""

import csv
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence

import numpy as np
from jinja2 import Environment, FileSystemLoader, StrictUndefined
from pydantic import BaseModel

logger = logging.getLogger(__name__)

TEMPLATE_DIR = Path(__file__).parent / "templates"
RUN_REPORT_TEMPLATE = "study_report.md.j2"

_environment = Environment(
    loader=FileSystemLoader(str(TEMPLATE_DIR)),
    trim_blocks=True,
    lstrip_blocks=True,
    keep_trailing_newline=True,
    undefined=StrictUndefined,
)


def format_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


def write_csv(path: Path, columns: Sequence[str], rows: Iterable[Mapping[str, Any]]) -> Path:
    """Write rows as CSV with a header; missing keys become empty cells."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_value(row.get(column)) for column in columns])
    logger.info("wrote %s", path)
    return path


def columns_to_rows(columns: Mapping[str, Optional[Sequence[float]]]) -> List[Dict[str, Any]]:
    """Turn column arrays into row dicts; a None column stays empty."""
    length = max((len(values) for values in columns.values() if values is not None), default=0)
    return [
        {name: (None if values is None else values[i]) for name, values in columns.items()}
        for i in range(length)
    ]


def write_json(path: Path, report: BaseModel) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report.model_dump_json(indent=2) + "\n", encoding="utf-8")
    logger.info("wrote %s", path)
    return path


def render_run_report(title: str, steps: Sequence[Any], summary: Optional[Mapping[str, Any]] = None) -> str:
    """Render the study step log as Markdown."""
    template = _environment.get_template(RUN_REPORT_TEMPLATE)
    plain_steps = [step.model_dump() if isinstance(step, BaseModel) else dict(step) for step in steps]
    plain_summary = {key: format_value(value) for key, value in (summary or {}).items()}
    return template.render(title=title, steps=plain_steps, summary=plain_summary)


def write_run_report(path: Path, title: str, steps: Sequence[Any], summary: Optional[Mapping[str, Any]] = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_run_report(title, steps, summary), encoding="utf-8")
    logger.info("wrote %s", path)
    return path
