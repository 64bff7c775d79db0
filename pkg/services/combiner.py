"""
Combinador: une as shares de uma coalizão, reconstrói a apresentação
e decide cada palavra da mensagem, bit 1 se e somente se identidade
"""
import logging
from typing import Optional, Sequence

from models import DecodeResult, EncodedMessage, Share, SignatureReport, Verdict
from .access_structure import reconstruct
from .dealer import share_presentation
from .errors import BelowThresholdError, InconsistentSharesError, UndecidedWordError
from .word_problem import EngineBudget, WordProblemSolver

logger = logging.getLogger(__name__)


class MessageCombiner:
    """Decodificação por coalizões de t ou mais participantes, ou por um único destinatário"""

    def __init__(self, budget: Optional[EngineBudget] = None, parallel_tasks: int = 1):
        self.budget = budget or EngineBudget()
        self.parallel_tasks = parallel_tasks

    def decode_message(self, shares: Sequence[Share], msg: EncodedMessage) -> DecodeResult:
        reconstruction = reconstruct(shares)
        if reconstruction.scheme_id != msg.scheme_id:
            raise InconsistentSharesError("scheme-id da mensagem difere do das shares")
        if not reconstruction.complete:
            count, t = len(reconstruction.participants), reconstruction.params.t
            logger.error(f"Coalizão de {count} participantes abaixo do limiar t={t}")
            raise BelowThresholdError(count, t, len(reconstruction.missing_indices))

        logger.info(f"Decodificando {msg.length} palavras com {len(reconstruction.participants)} shares")
        solver = WordProblemSolver(reconstruction.presentation, self.budget)
        decisions = solver.decide_many(msg.words, self.parallel_tasks)
        undecided = [i for i, d in enumerate(decisions) if d.verdict is Verdict.UNDECIDED]
        if undecided:
            logger.error(f"{len(undecided)} palavras indefinidas dentro do orçamento de decodificação")
            raise UndecidedWordError(
                f"Palavras {undecided[:10]} indefinidas dentro do orçamento; mensagem adulterada ou corrompida"
            )
        bits = "".join(d.bit for d in decisions)
        return DecodeResult(bits=bits, per_word=decisions, complete=True)

    def decode_single(self, share: Share, msg: EncodedMessage) -> DecodeResult:
        """Decide em G' = <geradores | R_j>; palavras indefinidas saem como '?'"""
        if share.scheme_id != msg.scheme_id:
            raise InconsistentSharesError("scheme-id da mensagem difere do da share")
        complete = len(share.relators) == share.params.m
        solver = WordProblemSolver(share_presentation(share), self.budget, partial=not complete)
        decisions = solver.decide_many(msg.words, self.parallel_tasks)
        undecided = sum(1 for d in decisions if d.verdict is Verdict.UNDECIDED)
        if undecided:
            logger.warning(f"{undecided} palavras indefinidas com a share {share.participant_index}")
        return DecodeResult(bits="".join(d.bit for d in decisions), per_word=decisions, complete=complete)


def verify_signature(bits: str, signature: str) -> SignatureReport:
    """Todos os deslocamentos em que a assinatura aparece, sobreposições incluídas"""
    if not signature:
        logger.warning("Assinatura vazia: casa em qualquer posição")
        return SignatureReport(offsets=tuple(range(len(bits) + 1)), authentic=True, degenerate=True)
    offsets = []
    position = bits.find(signature)
    while position != -1:
        offsets.append(position)
        position = bits.find(signature, position + 1)
    return SignatureReport(offsets=tuple(offsets), authentic=bool(offsets))
