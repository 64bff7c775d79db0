"""
Gerador de relatórios das análises de ataque
Texto orientado a linhas por padrão, exportação em PDF com reportlab
"""
import logging
import os
from typing import Any, Dict, List, Optional, Sequence

from models import AttackReport, PoolCandidate, WordDecision

logger = logging.getLogger(__name__)


def _format_stats(stats: Dict[str, Any]) -> str:
    return " ".join(f"{key}={value}" for key, value in sorted(stats.items()) if key != "normal_form")


class ReportGenerator:
    """Converte relatórios de análise em texto e, opcionalmente, em PDF"""

    def decision_line(self, decision: WordDecision) -> str:
        line = decision.verdict.value
        stats = _format_stats(decision.stats)
        if stats:
            line += f" {stats}"
        if "normal_form" in decision.stats:
            line += " normal_form=" + ",".join(str(e) for e in decision.stats["normal_form"])
        if decision.note:
            line += f" ({decision.note})"
        return line

    def attack_lines(self, report: AttackReport) -> List[str]:
        lines = [
            f"coalition: {' '.join(str(i) for i in report.coalition)}",
            f"complete: {'yes' if report.complete else 'no'}",
            f"missing-relators: {len(report.missing_indices)}",
        ]
        for word in report.words:
            exact = "exact" if word.exact_in_g_prime else "bounded"
            line = f"word {word.position}: {word.verdict.value} g-prime={word.g_prime.value} {exact}"
            stats = _format_stats(word.stats)
            lines.append(f"{line} {stats}" if stats else line)
        lines.append(f"proved-identity-rate: {report.proved_identity_rate:.4f}")
        return lines

    def pool_lines(self, candidates: Sequence[PoolCandidate], false_positive_rate: Optional[float] = None) -> List[str]:
        lines = [f"candidates: {len(candidates)}"]
        for rank, candidate in enumerate(candidates, start=1):
            if not candidate.compatible:
                lines.append(f"rank {rank}: {candidate.label} incompatible")
                continue
            offsets = ",".join(str(o) for o in candidate.offsets) or "-"
            lines.append(
                f"rank {rank}: {candidate.label} matched={'yes' if candidate.matched else 'no'} "
                f"offsets={offsets} undecided={candidate.undecided} bits={candidate.bits}"
            )
        if false_positive_rate is not None:
            lines.append(f"decoy-false-positive-rate: {false_positive_rate:.4f}")
        return lines

    def export_pdf(self, title: str, lines: Sequence[str], filepath: str) -> str:
        """
        Gera o PDF do relatório; sem reportlab grava a versão texto ao lado
        Retorna o caminho efetivamente escrito
        """
        directory = os.path.dirname(filepath)
        if directory and not os.path.exists(directory):
            os.makedirs(directory)
        try:
            from reportlab.lib import colors
            from reportlab.lib.enums import TA_CENTER
            from reportlab.lib.pagesizes import A4
            from reportlab.lib.styles import ParagraphStyle, getSampleStyleSheet
            from reportlab.platypus import Paragraph, SimpleDocTemplate, Spacer

            doc = SimpleDocTemplate(
                filepath,
                pagesize=A4,
                rightMargin=72,
                leftMargin=72,
                topMargin=72,
                bottomMargin=18,
                invariant=1,
            )
            styles = getSampleStyleSheet()
            title_style = ParagraphStyle(
                'ReportTitle',
                parent=styles['Heading1'],
                fontSize=18,
                spaceAfter=20,
                alignment=TA_CENTER,
                textColor=colors.HexColor('#2C3E50')
            )
            body_style = ParagraphStyle(
                'ReportBody',
                parent=styles['Code'],
                fontSize=8,
                spaceAfter=2,
            )
            story = [Paragraph(title, title_style), Spacer(1, 12)]
            for line in lines:
                story.append(Paragraph(line.replace("&", "&amp;").replace("<", "&lt;"), body_style))
            doc.build(story)
            logger.info(f"Relatório PDF gerado: {filepath}")
            return filepath

        except ImportError:
            logger.warning("ReportLab não instalado, gerando relatório texto")
            return self._write_text_report(title, lines, filepath)

    def _write_text_report(self, title: str, lines: Sequence[str], filepath: str) -> str:
        text_path = os.path.splitext(filepath)[0] + ".txt"
        with open(text_path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write("=" * 60 + "\n")
            handle.write(title + "\n")
            handle.write("=" * 60 + "\n")
            for line in lines:
                handle.write(line + "\n")
        logger.info(f"Relatório texto gerado: {text_path}")
        return text_path
