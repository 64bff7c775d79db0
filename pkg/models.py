"""
Registros compartilhados entre os serviços: parâmetros, shares, mensagens e relatórios
"""
import enum
from dataclasses import dataclass, field
from math import comb
from typing import Any, Dict, FrozenSet, List, Optional, Tuple

from services.errors import AccessStructureError
from services.presentation import (
    COXETER_INVOLUTIONS,
    POLYCYCLIC_CONSISTENT,
    Family,
    GeneratorSymbol,
    Relator,
    Word,
)


@dataclass(frozen=True)
class SchemeParams:
    """Parâmetros (n, t) e m = C(n, t-1), verificado na construção"""
    n: int
    t: int
    m: Optional[int] = None

    def __post_init__(self):
        if self.n < 2:
            raise AccessStructureError(f"n deve ser >= 2, recebido {self.n}")
        if not 2 <= self.t <= self.n:
            raise AccessStructureError(f"Limiar fora do intervalo: t={self.t}, n={self.n}")
        expected = comb(self.n, self.t - 1)
        if self.m is None:
            object.__setattr__(self, "m", expected)
        elif self.m != expected:
            raise AccessStructureError(f"m={self.m} difere de C({self.n},{self.t - 1})={expected}")


@dataclass(frozen=True)
class Share:
    """Subconjunto de relatores de um participante mais os metadados públicos"""
    scheme_id: str
    participant_index: int
    params: SchemeParams
    generators: Tuple[GeneratorSymbol, ...]
    public_facts: Tuple[str, ...]
    relators: Tuple[Relator, ...]

    @property
    def family(self) -> Family:
        if COXETER_INVOLUTIONS in self.public_facts:
            return Family.COXETER
        if POLYCYCLIC_CONSISTENT in self.public_facts:
            return Family.POLYCYCLIC
        return Family.RAW

    @property
    def relator_indices(self) -> Tuple[int, ...]:
        return tuple(r.index for r in self.relators)


@dataclass(frozen=True)
class EncodedMessage:
    """Sequência w_1..w_l; coverage e warnings não vão para o arquivo"""
    scheme_id: str
    words: Tuple[Word, ...]
    coverage: Tuple[FrozenSet[int], ...] = ()
    warnings: Tuple[str, ...] = ()

    @property
    def length(self) -> int:
        return len(self.words)


class Verdict(str, enum.Enum):
    IDENTITY = "identity"
    NON_IDENTITY = "non-identity"
    UNDECIDED = "undecided"


@dataclass
class WordDecision:
    verdict: Verdict
    exact: bool = True
    stats: Dict[str, Any] = field(default_factory=dict)
    note: str = ""

    @property
    def bit(self) -> str:
        if self.verdict is Verdict.IDENTITY:
            return "1"
        if self.verdict is Verdict.NON_IDENTITY:
            return "0"
        return "?"


@dataclass
class DecodeResult:
    bits: str
    per_word: List[WordDecision]
    complete: bool


@dataclass
class SignatureReport:
    offsets: Tuple[int, ...]
    authentic: bool
    degenerate: bool = False


@dataclass
class ThresholdReport:
    """Resultado da verificação exaustiva da estrutura de acesso"""
    is_valid: bool
    issues: List[str]
    witnesses: List[Tuple[int, ...]]
    metrics: Dict[str, Any]


class AttackVerdict(str, enum.Enum):
    PROVED_IDENTITY = "proved-identity"
    PROVED_NON_IDENTITY = "proved-non-identity"
    UNDECIDED = "undecided"


@dataclass
class AttackWordResult:
    position: int
    verdict: AttackVerdict
    g_prime: Verdict
    exact_in_g_prime: bool
    stats: Dict[str, Any] = field(default_factory=dict)


@dataclass
class AttackReport:
    coalition: Tuple[int, ...]
    complete: bool
    missing_indices: Tuple[int, ...]
    words: List[AttackWordResult]

    @property
    def proved_identity_rate(self) -> float:
        if not self.words:
            return 0.0
        proved = sum(1 for w in self.words if w.verdict is AttackVerdict.PROVED_IDENTITY)
        return proved / len(self.words)


@dataclass
class PoolCandidate:
    position: int
    label: str
    bits: str
    offsets: Tuple[int, ...]
    undecided: int
    compatible: bool = True

    @property
    def matched(self) -> bool:
        return bool(self.offsets)
