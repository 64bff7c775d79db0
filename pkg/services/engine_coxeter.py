"""
Motor do problema da palavra para grupos de Coxeter
Decisão exata pelo teorema de Tits: movimentos de trança e remoção de quadrados,
nenhum dos dois aumenta o comprimento, então o fecho é finito
"""
import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, Optional, Tuple

from sympy.combinatorics import Permutation

from .errors import BudgetExhaustedError, PresentationError
from .presentation import COXETER_INVOLUTIONS, Family, GroupPresentation, Letter, Word

logger = logging.getLogger(__name__)

DEFAULT_MAX_EXPLORED = 5_000_000


@dataclass(frozen=True)
class CoxeterMatrix:
    """
    Matriz de Coxeter guardada como triângulo superior (índices 0-based, i < j)
    Pares ausentes valem infinito: nenhum relator para o par
    """
    k: int
    entries: Dict[Tuple[int, int], int] = field(default_factory=dict)

    def __post_init__(self):
        for (i, j), value in self.entries.items():
            if not 0 <= i < j < self.k:
                raise PresentationError(f"Par ({i}, {j}) fora do triângulo superior para k={self.k}")
            if value < 2:
                raise PresentationError(f"m_{i + 1}{j + 1} = {value}; entradas fora da diagonal devem ser >= 2")

    def entry(self, i: int, j: int) -> Optional[int]:
        """m_ij, com 1 na diagonal e None para infinito"""
        if i == j:
            return 1
        return self.entries.get((min(i, j), max(i, j)))

    def with_infinite(self, pairs: Iterable[Tuple[int, int]]) -> "CoxeterMatrix":
        dropped = {(min(i, j), max(i, j)) for i, j in pairs}
        return CoxeterMatrix(self.k, {key: v for key, v in self.entries.items() if key not in dropped})

    @classmethod
    def type_a(cls, k: int) -> "CoxeterMatrix":
        """Tipo A_k: m_{i,i+1} = 3 e m_ij = 2 para |i-j| >= 2"""
        entries = {}
        for i in range(k):
            for j in range(i + 1, k):
                entries[(i, j)] = 3 if j == i + 1 else 2
        return cls(k, entries)


@dataclass
class CoxeterDecision:
    is_identity: bool
    explored: int = 0
    peak_frontier: int = 0
    reduced_length: int = 0

    @property
    def stats(self) -> Dict[str, int]:
        return {
            "explored": self.explored,
            "peak_frontier": self.peak_frontier,
            "reduced_length": self.reduced_length,
        }


def validate_coxeter(p: GroupPresentation) -> CoxeterMatrix:
    """Confere que cada relator é (s_i s_j)^m_ij e devolve a matriz (infinito nos pares livres)"""
    if p.family is not Family.COXETER:
        raise PresentationError(f"Família {p.family.value!r} não é coxeter")
    if COXETER_INVOLUTIONS not in p.public_facts:
        raise PresentationError("Fato público de involuções ausente para apresentação de Coxeter")
    entries: Dict[Tuple[int, int], int] = {}
    for relator in p.relators:
        codes = relator.word.codes()
        if any(c < 0 for c in codes):
            raise PresentationError(f"Relator {relator.index} tem letra inversa; geradores são involuções")
        indices = [c - 1 for c in codes]
        if len(indices) < 4 or len(indices) % 2:
            raise PresentationError(f"Relator {relator.index} não tem forma (s_i s_j)^m")
        a, b = indices[0], indices[1]
        if a == b or any(x != (a if pos % 2 == 0 else b) for pos, x in enumerate(indices)):
            raise PresentationError(f"Relator {relator.index} não tem forma (s_i s_j)^m")
        key = (min(a, b), max(a, b))
        if key in entries:
            raise PresentationError(
                f"Par (s{key[0] + 1}, s{key[1] + 1}) repetido no relator {relator.index}"
            )
        entries[key] = len(indices) // 2
    return CoxeterMatrix(p.k, entries)


def positive_word(w: Word) -> Word:
    """Troca s^-1 por s; válido porque os geradores são involuções"""
    return Word(tuple(Letter(letter.generator, 1) for letter in w))


def involution_reduce(w: Word) -> Word:
    stack = []
    for letter in positive_word(w):
        if stack and stack[-1] == letter:
            stack.pop()
        else:
            stack.append(letter)
    return Word(tuple(stack))


def _square_position(word: Tuple[int, ...]) -> Optional[int]:
    for position in range(len(word) - 1):
        if word[position] == word[position + 1]:
            return position
    return None


def _braid_neighbors(word: Tuple[int, ...], mat: CoxeterMatrix) -> Iterator[Tuple[int, ...]]:
    size = len(word)
    for p in range(size - 1):
        a, b = word[p], word[p + 1]
        if a == b:
            continue
        m = mat.entry(a, b)
        if m is None or p + m > size:
            continue
        if all(word[p + i] == (a if i % 2 == 0 else b) for i in range(m)):
            replacement = tuple(b if i % 2 == 0 else a for i in range(m))
            yield word[:p] + replacement + word[p + m:]


class _TitsSearch:
    """Estado por chamada: contador global de palavras exploradas e pico da fronteira"""

    def __init__(self, mat: CoxeterMatrix, max_explored: int, bound: int):
        self.mat = mat
        self.max_explored = max_explored
        self.bound = bound
        self.explored = 0
        self.peak_frontier = 0

    def find_square(self, start: Tuple[int, ...]) -> Optional[Tuple[Tuple[int, ...], int]]:
        """Busca em largura na classe de trança de `start` até achar s s adjacentes"""
        visited = {start}
        frontier = deque([start])
        while frontier:
            current = frontier.popleft()
            self.explored += 1
            if self.explored > self.max_explored:
                raise BudgetExhaustedError(
                    f"Orçamento de {self.max_explored} palavras exploradas esgotado",
                    {"explored": self.explored, "peak_frontier": self.peak_frontier},
                )
            position = _square_position(current)
            if position is not None:
                return current, position
            for neighbor in _braid_neighbors(current, self.mat):
                assert len(neighbor) <= self.bound
                if neighbor not in visited:
                    visited.add(neighbor)
                    frontier.append(neighbor)
            self.peak_frontier = max(self.peak_frontier, len(frontier))
        return None


def is_identity_tits(mat: CoxeterMatrix, w: Word, max_explored: int = DEFAULT_MAX_EXPLORED) -> CoxeterDecision:
    """
    Mantém um prefixo reduzido u e acrescenta uma letra s por vez.
    Se u s não é reduzida, sua classe de trança contém uma palavra com s s;
    removido o quadrado, o prefixo volta a ser reduzido.
    Identidade se e somente se o prefixo final é vazio
    """
    letters = tuple(abs(c) - 1 for c in w.codes())
    for index in letters:
        if index >= mat.k:
            raise PresentationError(f"Letra s{index + 1} fora dos {mat.k} geradores")
    search = _TitsSearch(mat, max_explored, len(letters))
    prefix: Tuple[int, ...] = ()
    for s in letters:
        if prefix and prefix[-1] == s:
            prefix = prefix[:-1]
            continue
        candidate = prefix + (s,)
        found = search.find_square(candidate)
        if found is None:
            prefix = candidate
        else:
            word, position = found
            prefix = word[:position] + word[position + 2:]
    decision = CoxeterDecision(
        is_identity=not prefix,
        explored=search.explored,
        peak_frontier=search.peak_frontier,
        reduced_length=len(prefix),
    )
    logger.debug(f"Tits: |w|={len(letters)} -> comprimento reduzido {len(prefix)}, {search.explored} exploradas")
    return decision


def perm_oracle_type_a(k: int, w: Word) -> bool:
    """Oráculo: no tipo A_k, s_i é a transposição (i, i+1) em S_{k+1}"""
    product = Permutation(list(range(k + 1)))
    for letter in w:
        i = letter.generator.index
        if i >= k:
            raise PresentationError(f"Letra s{i + 1} fora de s1..s{k}")
        product = product * Permutation([[i, i + 1]], size=k + 1)
    return product.is_Identity
