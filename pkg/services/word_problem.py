"""
Fachada dos motores: escolhe o motor pela família da apresentação
e entrega decisões em três valores (identidade / não identidade / indefinida)
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Sequence

from models import Verdict, WordDecision
from .engine_coxeter import DEFAULT_MAX_EXPLORED, is_identity_tits, validate_coxeter
from .engine_polycyclic import DEFAULT_MAX_STEPS, collect_with_stats, from_presentation
from .errors import BudgetExhaustedError, MissingRuleError, PresentationError
from .presentation import Family, GroupPresentation, Word

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EngineBudget:
    """Limites dos motores; o combinador usa os mesmos limites que o dealer verificou"""
    max_explored: int = DEFAULT_MAX_EXPLORED
    max_rewrite_steps: int = DEFAULT_MAX_STEPS

    @classmethod
    def uniform(cls, value: int) -> "EngineBudget":
        return cls(max_explored=value, max_rewrite_steps=value)


class WordProblemSolver:
    """
    Decide w = 1 na apresentação dada.
    partial=True marca uma apresentação de coalizão abaixo do limiar: no caso policíclico
    só a prova de identidade é exata
    """

    def __init__(self, presentation: GroupPresentation, budget: EngineBudget = EngineBudget(),
                 partial: bool = False, assert_consistent: bool = False):
        self.presentation = presentation
        self.budget = budget
        self.partial = partial
        self.family = presentation.family
        if self.family is Family.COXETER:
            self.matrix = validate_coxeter(presentation)
        elif self.family is Family.POLYCYCLIC:
            self.polycyclic = from_presentation(presentation, assert_consistent=assert_consistent)
        else:
            raise PresentationError("Família 'raw' não tem motor de decisão; use coxeter ou polycyclic")

    def decide(self, w: Word) -> WordDecision:
        try:
            if self.family is Family.COXETER:
                result = is_identity_tits(self.matrix, w, self.budget.max_explored)
                verdict = Verdict.IDENTITY if result.is_identity else Verdict.NON_IDENTITY
                return WordDecision(verdict, exact=True, stats=result.stats)
            normal_form, steps = collect_with_stats(self.polycyclic, w, self.budget.max_rewrite_steps)
        except BudgetExhaustedError as exc:
            logger.warning(f"Palavra de comprimento {len(w)} indefinida: {exc}")
            return WordDecision(Verdict.UNDECIDED, exact=False, stats=exc.stats, note="budget")
        except MissingRuleError as exc:
            return WordDecision(Verdict.UNDECIDED, exact=False, note=str(exc))

        stats = {"steps": steps, "normal_form": list(normal_form.exponents)}
        if normal_form.is_identity:
            return WordDecision(Verdict.IDENTITY, exact=True, stats=stats)
        if self.partial:
            return WordDecision(Verdict.NON_IDENTITY, exact=False, stats=stats,
                                note="forma normal não nula sem garantia de consistência")
        return WordDecision(Verdict.NON_IDENTITY, exact=True, stats=stats)

    def decide_many(self, words: Sequence[Word], parallel_tasks: int = 1) -> List[WordDecision]:
        """Decisões independentes por palavra, devolvidas na ordem de entrada"""
        if parallel_tasks <= 1 or len(words) <= 1:
            return [self.decide(w) for w in words]
        with ThreadPoolExecutor(max_workers=parallel_tasks) as executor:
            return list(executor.map(self.decide, words))
