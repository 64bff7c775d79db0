"""
Simulações de adversário em escala de mesa: coalizões abaixo do limiar
e busca num pool de apresentações candidatas
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from models import (
    AttackReport,
    AttackVerdict,
    AttackWordResult,
    EncodedMessage,
    PoolCandidate,
    SchemeParams,
    Share,
    Verdict,
)
from .access_structure import reconstruct
from .combiner import verify_signature
from .dealer import derive_seed, generate_platform
from .errors import InconsistentSharesError, PresentationError, WordParseError
from .presentation import GroupPresentation, parse_word, serialize_word
from .word_problem import EngineBudget, WordProblemSolver

logger = logging.getLogger(__name__)

DEFAULT_POOL_BUDGET = 20_000


@dataclass
class AttackConfig:
    """Orçamentos dos ataques; o pool usa um limite menor por palavra"""
    budget: EngineBudget = field(default_factory=EngineBudget)
    pool_budget: EngineBudget = field(default_factory=lambda: EngineBudget.uniform(DEFAULT_POOL_BUDGET))
    parallel_tasks: int = 1


def message_texts(msg: EncodedMessage) -> List[str]:
    return [serialize_word(w) for w in msg.words]


class AdversarySimulator:
    """Mede o que uma coalizão ou um atacante com um pool consegue provar; nunca chuta"""

    def __init__(self, config: Optional[AttackConfig] = None):
        self.config = config or AttackConfig()

    def coalition_attack(self, shares: Sequence[Share], msg: EncodedMessage) -> AttackReport:
        """
        Decide cada palavra em G' reconstruído pela coalizão.
        Identidade em G' prova identidade em G (G é quociente de G');
        o resto só vira veredito provado quando a coalizão está completa
        """
        reconstruction = reconstruct(shares)
        if reconstruction.scheme_id != msg.scheme_id:
            raise InconsistentSharesError("scheme-id da mensagem difere do das shares")
        complete = reconstruction.complete
        logger.info(
            f"Ataque de coalizão {reconstruction.participants}: "
            f"{len(reconstruction.missing_indices)} relatores ausentes"
        )
        solver = WordProblemSolver(reconstruction.presentation, self.config.budget, partial=not complete)
        decisions = solver.decide_many(msg.words, self.config.parallel_tasks)

        words = []
        for position, decision in enumerate(decisions):
            if decision.verdict is Verdict.IDENTITY:
                verdict = AttackVerdict.PROVED_IDENTITY
            elif complete and decision.verdict is Verdict.NON_IDENTITY:
                verdict = AttackVerdict.PROVED_NON_IDENTITY
            else:
                verdict = AttackVerdict.UNDECIDED
            words.append(AttackWordResult(position, verdict, decision.verdict, decision.exact, decision.stats))
        report = AttackReport(reconstruction.participants, complete, reconstruction.missing_indices, words)
        logger.info(f"Taxa de identidades provadas: {report.proved_identity_rate:.2%}")
        return report

    def _try_candidate(self, position: int, label: str, presentation: GroupPresentation,
                       word_texts: Sequence[str], signature: str) -> PoolCandidate:
        try:
            solver = WordProblemSolver(presentation, self.config.pool_budget, assert_consistent=True)
            words = [parse_word(text, presentation.generators) for text in word_texts]
        except (PresentationError, WordParseError) as exc:
            logger.debug(f"Candidato {label} incompatível: {exc}")
            return PoolCandidate(position, label, "", (), len(word_texts), compatible=False)
        decisions = [solver.decide(w) for w in words]
        bits = "".join(d.bit for d in decisions)
        undecided = sum(1 for d in decisions if d.verdict is Verdict.UNDECIDED)
        report = verify_signature(bits, signature)
        return PoolCandidate(position, label, bits, report.offsets, undecided)

    def pool_attack(self, pool: Sequence[Tuple[str, GroupPresentation]], word_texts: Sequence[str],
                    signature: str) -> List[PoolCandidate]:
        """Decodifica a mensagem em cada candidato e ordena: assinatura encontrada primeiro"""
        if not pool:
            return []
        logger.info(f"Ataque de pool com {len(pool)} candidatos e {len(word_texts)} palavras")
        tasks = [(i, label, p) for i, (label, p) in enumerate(pool)]

        def run(task):
            return self._try_candidate(task[0], task[1], task[2], word_texts, signature)

        if self.config.parallel_tasks <= 1:
            candidates = [run(task) for task in tasks]
        else:
            with ThreadPoolExecutor(max_workers=self.config.parallel_tasks) as executor:
                candidates = list(executor.map(run, tasks))
        candidates.sort(key=lambda c: (not c.matched, not c.compatible, c.undecided, c.position))
        matched = sum(1 for c in candidates if c.matched)
        logger.info(f"{matched} de {len(candidates)} candidatos contêm a assinatura")
        return candidates


def build_decoy_pool(family: str, params: SchemeParams, count: int, seed: int) -> List[Tuple[str, GroupPresentation]]:
    """Apresentações da mesma família e do mesmo m, geradas com sementes derivadas"""
    pool = []
    for i in range(count):
        presentation = generate_platform(family, params, derive_seed(seed, f"decoy-{i}"))
        pool.append((f"decoy-{i:04d}", presentation))
    return pool


def decoy_false_positive_rate(candidates: Sequence[PoolCandidate], true_label: Optional[str] = None) -> float:
    """Fração dos candidatos compatíveis, exceto o verdadeiro, em que a assinatura aparece"""
    decoys = [c for c in candidates if c.compatible and c.label != true_label]
    if not decoys:
        return 0.0
    return sum(1 for c in decoys if c.matched) / len(decoys)
