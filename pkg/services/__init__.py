from .parallel import ordered_map
from .report_writer import write_csv, write_json, write_run_report, render_run_report

__all__ = [
    "ordered_map",
    "write_csv",
    "write_json",
    "write_run_report",
    "render_run_report",
]
