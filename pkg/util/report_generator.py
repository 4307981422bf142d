"""
PDF Report Generator for the SWIPT simulator.

This module handles PDF summaries of trial-record CSV files,
following the Single Responsibility Principle.
"""

import csv
import io
import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from reportlab.lib.colors import HexColor
from reportlab.lib.enums import TA_CENTER
from reportlab.lib.pagesizes import A4
from reportlab.lib.styles import ParagraphStyle, getSampleStyleSheet
from reportlab.lib.units import inch
from reportlab.platypus import Paragraph, SimpleDocTemplate, Spacer, Table, TableStyle

logger = logging.getLogger(__name__)


@dataclass
class SchemeSummary:
    """EE statistics of one algorithm/selection pair over all records."""

    scheme: str
    records: int
    feasible: int
    mean_ee: Optional[float]
    min_ee: Optional[float]
    max_ee: Optional[float]
    mean_runtime_ms: Optional[float]

    @property
    def feasibility_rate(self) -> float:
        return self.feasible / self.records if self.records else 0.0


def _number(cell: str) -> Optional[float]:
    if cell in ("", None):
        return None
    value = float(cell)
    return None if math.isnan(value) or math.isinf(value) else value


def summarize_records(csv_text: str) -> List[SchemeSummary]:
    """Group trial records by ``algorithm/selection`` and summarise their rounded EE."""
    groups: Dict[str, List[dict]] = {}
    for row in csv.DictReader(io.StringIO(csv_text)):
        groups.setdefault(f"{row['algorithm']}/{row['selection']}", []).append(row)
    summaries = []
    for scheme, rows in groups.items():
        feasible_rows = [r for r in rows if r.get("feasible") == "true"]
        ees = [v for v in (_number(r.get("ee_rounded", "")) for r in feasible_rows) if v is not None]
        runtimes = [v for v in (_number(r.get("runtime_ms", "")) for r in rows) if v is not None]
        summaries.append(SchemeSummary(
            scheme=scheme,
            records=len(rows),
            feasible=len(feasible_rows),
            mean_ee=sum(ees) / len(ees) if ees else None,
            min_ee=min(ees) if ees else None,
            max_ee=max(ees) if ees else None,
            mean_runtime_ms=sum(runtimes) / len(runtimes) if runtimes else None,
        ))
    return summaries


class ReportGeneratorInterface(ABC):
    """Interface for report generators following the Interface Segregation Principle."""

    @abstractmethod
    def generate_report(self, csv_text: str, title: str) -> bytes:
        """Generate a PDF report from trial-record CSV text."""
        pass


class StyleManager:
    """Manages PDF styles following the Single Responsibility Principle."""

    def __init__(self):
        self.styles = getSampleStyleSheet()

    def get_title_style(self) -> ParagraphStyle:
        return ParagraphStyle(
            'ReportTitle',
            parent=self.styles['Title'],
            fontSize=18,
            spaceAfter=24,
            textColor=HexColor('#1f2937'),
            alignment=TA_CENTER
        )

    def get_body_style(self) -> ParagraphStyle:
        return ParagraphStyle(
            'ReportBody',
            parent=self.styles['Normal'],
            fontSize=10,
            spaceAfter=10,
            textColor=HexColor('#374151'),
            leading=14
        )

    def get_table_style(self) -> TableStyle:
        return TableStyle([
            ('BACKGROUND', (0, 0), (-1, 0), HexColor('#e5e7eb')),
            ('TEXTCOLOR', (0, 0), (-1, -1), HexColor('#1f2937')),
            ('FONTNAME', (0, 0), (-1, 0), 'Helvetica-Bold'),
            ('FONTSIZE', (0, 0), (-1, -1), 9),
            ('ALIGN', (1, 0), (-1, -1), 'RIGHT'),
            ('GRID', (0, 0), (-1, -1), 0.5, HexColor('#9ca3af')),
        ])


def _cell(value: Optional[float], digits: int = 4) -> str:
    return "-" if value is None else f"{value:.{digits}g}"


class SummaryReportGenerator(ReportGeneratorInterface):
    """One table row per scheme: feasibility and EE statistics."""

    header = ["scheme", "records", "feasible", "mean EE", "min EE", "max EE", "mean ms"]

    def __init__(self):
        self.style_manager = StyleManager()

    def table_rows(self, summaries: List[SchemeSummary]) -> List[List[str]]:
        rows = [list(self.header)]
        for s in summaries:
            rows.append([s.scheme, str(s.records), f"{s.feasibility_rate:.0%}", _cell(s.mean_ee),
                         _cell(s.min_ee), _cell(s.max_ee), _cell(s.mean_runtime_ms, 3)])
        return rows

    def generate_report(self, csv_text: str, title: str = "EE simulation summary") -> bytes:
        summaries = summarize_records(csv_text)
        buffer = io.BytesIO()
        doc = SimpleDocTemplate(buffer, pagesize=A4, rightMargin=0.75 * inch, leftMargin=0.75 * inch,
                                topMargin=0.75 * inch, bottomMargin=0.75 * inch)
        body = self.style_manager.get_body_style()
        story = [
            Paragraph(title, self.style_manager.get_title_style()),
            Paragraph(f"Generated {datetime.now():%Y-%m-%d %H:%M}. EE in bits/s/Hz per Watt, "
                      "statistics over feasible rounded allocations.", body),
            Spacer(1, 12),
        ]
        if summaries:
            table = Table(self.table_rows(summaries), repeatRows=1)
            table.setStyle(self.style_manager.get_table_style())
            story.append(table)
        else:
            story.append(Paragraph("No trial records found.", body))
        doc.build(story)
        logger.info("built PDF summary of %d schemes", len(summaries))
        return buffer.getvalue()


class ReportGeneratorFactory:
    """Factory class for creating report generators following the Factory Pattern."""

    @staticmethod
    def create_generator(generator_type: str = "summary") -> ReportGeneratorInterface:
        if generator_type.lower() == "summary":
            return SummaryReportGenerator()
        raise ValueError(f"Unknown generator type: {generator_type}")


def write_report(csv_path: Union[str, Path], pdf_path: Union[str, Path],
                 title: str = "EE simulation summary") -> Tuple[Path, int]:
    """Render ``csv_path`` into ``pdf_path``; returns the path and the byte count."""
    pdf = ReportGeneratorFactory.create_generator().generate_report(
        Path(csv_path).read_text(encoding="utf-8"), title)
    Path(pdf_path).write_bytes(pdf)
    return Path(pdf_path), len(pdf)
