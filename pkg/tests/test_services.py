"""Tests for output writers, the ordered parallel map and environment settings."""

import logging
import os

import numpy as np
import pytest

from errors import ConfigError
from schemas import StudyStep
from services.parallel import ordered_map
from services.report_writer import columns_to_rows, format_value, render_run_report, write_csv
from settings import get_log_level, get_thread_count


# =============================================================================
# Report writer
# =============================================================================

class TestFormatValue:

    @pytest.mark.parametrize(
        "value, expected",
        [
            (None, ""),
            (True, "true"),
            (np.bool_(False), "false"),
            (3, "3"),
            (np.int64(7), "7"),
            (0.1, "0.10000000000000001"),
            (np.float64(2.5), "2.5"),
            ("plane-stress", "plane-stress"),
        ],
    )
    def test_formats(self, value, expected):
        assert format_value(value) == expected


class TestWriteCsv:

    def test_header_empty_cells_and_line_endings(self, tmp_path):
        path = write_csv(tmp_path / "nested" / "table.csv", ["a", "b"], [{"a": 1.5, "b": None}, {"a": 2}])
        assert path.read_bytes() == b"a,b\n1.5,\n2,\n"

    def test_columns_to_rows_keeps_none_columns(self):
        rows = columns_to_rows({"x": np.array([0.0, 0.5]), "y": None})
        assert rows == [{"x": 0.0, "y": None}, {"x": 0.5, "y": None}]


def test_render_run_report():
    steps = [
        StudyStep(step=1, title="Reading the laminate", description="Two layers.", details=["layer 0", "layer 1"]),
        StudyStep(step=2, title="Solving", description="Done."),
    ]
    text = render_run_report("Effective constants", steps, {"layers": 2, "discrepancy": None})
    assert text.startswith("# Effective constants\n")
    assert "| layers | 2 |" in text
    assert "### Step 1: Reading the laminate" in text
    assert "- layer 1" in text
    assert "### Step 2: Solving" in text


# =============================================================================
# Parallel map and settings
# =============================================================================

class TestOrderedMap:

    def test_order_preserved_across_threads(self):
        assert ordered_map(lambda x: x * x, range(50), threads=4) == [x * x for x in range(50)]

    def test_inline_and_empty(self):
        assert ordered_map(str, [1, 2], threads=1) == ["1", "2"]
        assert ordered_map(str, [], threads=4) == []

    def test_thread_cap_from_environment(self, monkeypatch):
        monkeypatch.setenv("LAMHOM_THREADS", "3")
        assert ordered_map(abs, [-1, -2, -3, -4]) == [1, 2, 3, 4]


class TestSettings:

    def test_thread_count(self, monkeypatch):
        monkeypatch.setenv("LAMHOM_THREADS", "5")
        assert get_thread_count() == 5
        monkeypatch.delenv("LAMHOM_THREADS")
        assert get_thread_count() == (os.cpu_count() or 1)

    @pytest.mark.parametrize("raw", ["0", "-2", "many"])
    def test_bad_thread_count(self, monkeypatch, raw):
        monkeypatch.setenv("LAMHOM_THREADS", raw)
        with pytest.raises(ConfigError, match="LAMHOM_THREADS"):
            get_thread_count()

    def test_log_level(self, monkeypatch):
        monkeypatch.setenv("LAMHOM_LOG_LEVEL", "warning")
        assert get_log_level() == logging.WARNING
        assert get_log_level("debug") == logging.DEBUG
        with pytest.raises(ConfigError, match="unknown log level"):
            get_log_level("chatty")
