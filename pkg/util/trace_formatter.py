"""
CSV Formatter for the SWIPT simulator.

This module handles formatting of convergence traces, selection tables and
trial records as CSV, following the Single Responsibility Principle. Every
CSV has a header row, comma separators, LF line endings and floats written
with 9 significant digits.
"""

import csv
import dataclasses
import io
import math
from abc import ABC, abstractmethod
from typing import Any, Dict, Iterable, List, Sequence

from swipt.antenna_selection import SelectionOutcome
from swipt.errors import UnknownStrategyError
from swipt.results import SolveResult, TraceRow


def format_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return f"{value:.9g}"
    return str(value)


def to_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    return buffer.getvalue()


class TraceFormatterInterface(ABC):
    """Interface for convergence-trace formatters."""

    header: List[str] = []

    @abstractmethod
    def row(self, entry: TraceRow) -> List[Any]:
        """Cells of one trace row."""
        pass

    def format_trace(self, result: SolveResult) -> str:
        return to_csv(self.header, (self.row(entry) for entry in result.trace))


class DinkelbachTraceFormatter(TraceFormatterInterface):
    header = ["iter", "beta", "residual", "rate", "energy", "power", "ee", "event"]

    def row(self, entry: TraceRow) -> List[Any]:
        return [entry.step, entry.beta, entry.residual, entry.rate, entry.energy, entry.power,
                entry.ee, entry.event]


class AlternationTraceFormatter(TraceFormatterInterface):
    header = ["round", "ee", "rate", "energy", "power", "max_dual", "event"]

    def row(self, entry: TraceRow) -> List[Any]:
        return [entry.step, entry.ee, entry.rate, entry.energy, entry.power, entry.max_dual, entry.event]


class PhaseTraceFormatter(TraceFormatterInterface):
    header = ["phase", "ee", "rate", "energy", "power", "event"]

    def row(self, entry: TraceRow) -> List[Any]:
        return [entry.phase, entry.ee, entry.rate, entry.energy, entry.power, entry.event]


class TraceStatistics:
    """Summary figures of one convergence trace."""

    def __init__(self, result: SolveResult):
        self.result = result

    def get_iterations(self) -> int:
        return sum(1 for entry in self.result.trace if entry.event == "iterate")

    def get_rounding_drop(self) -> float:
        return self.result.rounding_drop

    def get_statistics(self) -> Dict[str, Any]:
        return {
            "iterations": self.get_iterations(),
            "relaxed_ee": None if self.result.relaxed is None else self.result.relaxed.ee,
            "rounded_ee": self.result.ee,
            "rounding_drop": self.get_rounding_drop(),
        }


def format_selection_table(outcome: SelectionOutcome) -> str:
    """Per-N table: best EE at each antenna count and the set achieving it."""
    rows = []
    for entry in outcome.per_n_table:
        metrics = None
        if entry.result is not None and entry.result.rounded is not None:
            metrics = entry.result.rounded.metrics
        rows.append([
            entry.antenna_set.size,
            entry.antenna_set.label(),
            entry.ee,
            None if metrics is None else metrics.rate,
            None if metrics is None else metrics.energy,
            None if metrics is None else metrics.total_power,
            entry.feasible,
        ])
    return to_csv(["N", "antenna_set", "ee", "rate", "energy", "power", "feasible"], rows)


def format_records(records: Sequence[Any], exclude: Sequence[str] = ()) -> str:
    """CSV of a list of dataclass records, columns in field order."""
    if not records:
        return ""
    header = [f.name for f in dataclasses.fields(records[0]) if f.name not in exclude]
    return to_csv(header, ([getattr(r, name) for name in header] for r in records))


class TraceFormatterFactory:
    """Factory class for trace formatters following the Factory Pattern."""

    @staticmethod
    def create_formatter(algorithm: str) -> TraceFormatterInterface:
        if algorithm == "dm_cvx":
            return DinkelbachTraceFormatter()
        if algorithm == "jeapa":
            return AlternationTraceFormatter()
        if algorithm == "moo_lc":
            return PhaseTraceFormatter()
        raise UnknownStrategyError(f"Unknown trace format: {algorithm}")
