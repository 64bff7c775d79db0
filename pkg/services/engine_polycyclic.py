"""
Motor do problema da palavra para apresentações policíclicas consistentes
Coleta pela esquerda até a forma normal x_1^e_1 ... x_k^e_k
"""
import itertools
import logging
from dataclasses import dataclass, field, replace
from math import gcd
from typing import Callable, Dict, FrozenSet, Iterator, List, Sequence, Tuple

from sympy import Matrix, eye
from sympy.combinatorics import Permutation

from .errors import BudgetExhaustedError, MissingRuleError, PresentationError
from .presentation import (
    POLYCYCLIC_CONSISTENT,
    Family,
    GeneratorSymbol,
    GroupPresentation,
    Relator,
    Word,
    free_reduce,
    make_generators,
    word_from_codes,
)

logger = logging.getLogger(__name__)

DEFAULT_MAX_STEPS = 10_000_000

Codes = Tuple[int, ...]
Syllable = Tuple[int, int]


@dataclass(frozen=True)
class PolycyclicPresentation:
    """
    Regras de conjugação x_j^{x_i} = w_ij e x_j^{x_i^-1} = v_ij (i < j, índices 0-based)
    e regras de potência x_l^{r_l} = u_l para l em I.
    w_ij e v_ij são palavras em x_j..x_k; u_l em x_{l+1}..x_k
    """
    generators: Tuple[GeneratorSymbol, ...]
    conj_pos: Dict[Tuple[int, int], Word] = field(default_factory=dict)
    conj_neg: Dict[Tuple[int, int], Word] = field(default_factory=dict)
    power_exponents: Dict[int, int] = field(default_factory=dict)
    power_words: Dict[int, Word] = field(default_factory=dict)

    def __post_init__(self):
        k = self.k
        for table in (self.conj_pos, self.conj_neg):
            for (i, j), word in table.items():
                if not 0 <= i < j < k:
                    raise PresentationError(f"Regra de conjugação ({i + 1}, {j + 1}) fora de 1 <= i < j <= {k}")
                if any(abs(c) - 1 < j for c in word.codes()):
                    raise PresentationError(
                        f"Regra ({i + 1}, {j + 1}) usa geradores anteriores a {self.generators[j].name}"
                    )
        for l, r in self.power_exponents.items():
            if r < 1:
                raise PresentationError(f"Expoente de potência r_{l + 1} = {r} deve ser >= 1")
            if any(abs(c) - 1 <= l for c in self.power_words.get(l, Word()).codes()):
                raise PresentationError(f"u_{l + 1} deve usar apenas geradores posteriores a {self.generators[l].name}")

    @property
    def k(self) -> int:
        return len(self.generators)

    @property
    def power_index_set(self) -> Tuple[int, ...]:
        return tuple(sorted(self.power_exponents))

    def relator_words(self) -> List[Word]:
        """Relatores distribuíveis: conjugações positivas e depois potências"""
        words = []
        for (i, j) in sorted(self.conj_pos):
            x_i = word_from_codes((i + 1,), self.generators)
            x_j = word_from_codes((j + 1,), self.generators)
            inverse_rule = word_from_codes(_invert_codes(self.conj_pos[(i, j)].codes()), self.generators)
            words.append(free_reduce(word_from_codes((-(i + 1),), self.generators) * x_j * x_i * inverse_rule))
        for l in self.power_index_set:
            base = word_from_codes((l + 1,) * self.power_exponents[l], self.generators)
            tail = word_from_codes(_invert_codes(self.power_words.get(l, Word()).codes()), self.generators)
            words.append(free_reduce(base * tail))
        return words

    def to_group_presentation(self, public_facts: Sequence[str] = (POLYCYCLIC_CONSISTENT,)) -> GroupPresentation:
        relators = tuple(Relator(j, w) for j, w in enumerate(self.relator_words(), start=1))
        return GroupPresentation(self.generators, relators, Family.POLYCYCLIC, tuple(public_facts))


@dataclass(frozen=True)
class NormalForm:
    exponents: Tuple[int, ...]

    @property
    def is_identity(self) -> bool:
        return not any(self.exponents)


def _invert_codes(codes: Codes) -> Codes:
    return tuple(-c for c in reversed(codes))


def _syllables(codes: Codes) -> List[Syllable]:
    result: List[Syllable] = []
    for c in codes:
        g, s = abs(c) - 1, (1 if c > 0 else -1)
        if result and result[-1][0] == g:
            result[-1] = (g, result[-1][1] + s)
            if result[-1][1] == 0:
                result.pop()
        else:
            result.append((g, s))
    return result


def _normal_codes(exponents: Sequence[int]) -> Codes:
    codes: List[int] = []
    for g, e in enumerate(exponents):
        codes.extend([(g + 1) if e > 0 else -(g + 1)] * abs(e))
    return tuple(codes)


class _Collector:
    """Estado de trabalho por chamada; as tabelas de regras são somente leitura"""

    def __init__(self, p: PolycyclicPresentation, max_steps: int):
        self.k = p.k
        self.pos = {key: w.codes() for key, w in p.conj_pos.items()}
        self.neg = {key: w.codes() for key, w in p.conj_neg.items()}
        self.orders = dict(p.power_exponents)
        self.power_words = {l: p.power_words.get(l, Word()).codes() for l in self.orders}
        self.names = [g.name for g in p.generators]
        self.max_steps = max_steps
        self.steps = 0

    def rule(self, g: int, h: int, sign: int) -> Codes:
        table = self.pos if sign > 0 else self.neg
        try:
            return table[(g, h)]
        except KeyError:
            arrow = "" if sign > 0 else "^-1"
            raise MissingRuleError(f"Regra {self.names[h]}^({self.names[g]}{arrow}) ausente")

    def _commutes(self, g: int, h: int, sign: int) -> bool:
        return self.rule(g, h, sign) == (h + 1,)

    def _tick(self):
        self.steps += 1
        if self.steps > self.max_steps:
            raise BudgetExhaustedError(
                f"Orçamento de {self.max_steps} passos de reescrita esgotado",
                {"steps": self.steps},
            )

    def _overflow(self, g: int, exps: List[int]) -> List[Syllable]:
        """Reduz x_g^e para 0 <= e < r_g e devolve u_g^q a inserir logo após x_g"""
        if g not in self.orders:
            return []
        quotient, exps[g] = divmod(exps[g], self.orders[g])
        if quotient and self.power_words[g]:
            return _syllables(self.power_words[g]) * quotient
        return []

    def collect(self, codes: Codes) -> List[int]:
        exps = [0] * self.k
        stack: List[Syllable] = list(reversed(_syllables(codes)))
        while stack:
            g, e = stack.pop()
            self._tick()
            if e == 0:
                continue
            if e < 0 and g in self.orders:
                r, u = self.orders[g], self.power_words[g]
                if not u:
                    stack.append((g, e % r))
                else:
                    # x^-1 = x^(r-1) u^-1
                    block = [(g, r - 1)] + _syllables(_invert_codes(u))
                    stack.extend(reversed(block * abs(e)))
                continue
            tail = [(h, exps[h]) for h in range(g + 1, self.k) if exps[h]]
            sign = 1 if e > 0 else -1
            if not tail or all(self._commutes(g, h, sign) for h, _ in tail):
                exps[g] += e
                inserted = self._overflow(g, exps)
                if inserted and tail:
                    for h, _ in tail:
                        exps[h] = 0
                    inserted = inserted + tail
                stack.extend(reversed(inserted))
                continue
            exps[g] += sign
            for h, _ in tail:
                exps[h] = 0
            pending = self._overflow(g, exps)
            for h, eh in tail:
                image = self.rule(g, h, sign)
                block = image if eh > 0 else _invert_codes(image)
                pending.extend(_syllables(block) * abs(eh))
            pending.append((g, e - sign))
            stack.extend(reversed(pending))
        return exps


def collect_with_stats(p: PolycyclicPresentation, w: Word, max_steps: int = DEFAULT_MAX_STEPS) -> Tuple[NormalForm, int]:
    collector = _Collector(p, max_steps)
    exps = collector.collect(w.codes())
    logger.debug(f"Coleta: |w|={len(w)} em {collector.steps} passos")
    return NormalForm(tuple(exps)), collector.steps


def collect(p: PolycyclicPresentation, w: Word, max_steps: int = DEFAULT_MAX_STEPS) -> NormalForm:
    return collect_with_stats(p, w, max_steps)[0]


def is_identity_pc(p: PolycyclicPresentation, w: Word, max_steps: int = DEFAULT_MAX_STEPS) -> bool:
    return collect(p, w, max_steps).is_identity


def normal_word(p: PolycyclicPresentation, nf: NormalForm) -> Word:
    return word_from_codes(_normal_codes(nf.exponents), p.generators)


def _derive_one(p: PolycyclicPresentation, i: int, j: int) -> Codes:
    """v_ij = x_i x_j x_i^-1, calculado a partir das regras positivas e de potência"""
    collector = _Collector(p, DEFAULT_MAX_STEPS)
    if i in p.power_exponents:
        exps = collector.collect((i + 1, j + 1, -(i + 1)))
        if any(exps[:j]):
            raise PresentationError(f"Conjugado de {p.generators[j].name} escapou do subgrupo; apresentação inconsistente")
        return _normal_codes(exps)

    # x_i infinito: resolve conj_{x_i}(N) = x_j de forma triangular
    current = [0] * p.k
    current[j] = 1
    solution = [0] * p.k
    for h in range(j, p.k):
        a = current[h]
        if a == 0:
            continue
        rule = collector.rule(i, h, 1)
        leading = _syllables(rule)
        if not leading or leading[0][0] != h:
            raise PresentationError(f"Regra ({i + 1}, {h + 1}) não começa por {p.generators[h].name}")
        e = leading[0][1]
        if h in p.power_exponents:
            r = p.power_exponents[h]
            if gcd(e, r) != 1:
                raise PresentationError(f"Expoente {e} não invertível módulo {r}")
            c = (a * pow(e, -1, r)) % r
        else:
            if e not in (1, -1):
                raise PresentationError(f"Regra ({i + 1}, {h + 1}) com expoente {e}; não é automorfismo")
            c = a * e
        solution[h] = c
        image = collector.collect(rule * c if c > 0 else _invert_codes(rule) * (-c))
        current = collector.collect(_invert_codes(_normal_codes(image)) + _normal_codes(current))
    if any(current):
        raise PresentationError(f"Sistema triangular sem solução para ({i + 1}, {j + 1})")
    return _normal_codes(solution)


def derive_inverse_conjugates(p: PolycyclicPresentation) -> PolycyclicPresentation:
    """
    Completa conj_neg a partir de conj_pos e das potências, do último gerador para o primeiro.
    Regras que dependem de relatores ausentes ficam de fora
    """
    derived = replace(p, conj_neg=dict(p.conj_neg))
    for i in reversed(range(p.k - 1)):
        for j in range(i + 1, p.k):
            if (i, j) in derived.conj_neg or (i, j) not in derived.conj_pos:
                continue
            try:
                codes = _derive_one(derived, i, j)
            except (MissingRuleError, PresentationError) as exc:
                logger.debug(f"Regra inversa ({i + 1}, {j + 1}) não derivada: {exc}")
                continue
            derived.conj_neg[(i, j)] = word_from_codes(codes, p.generators)
    return derived


EXHAUSTIVE_SUBSET_LIMIT = 12


def _inside(word: Word, subset: FrozenSet[int]) -> bool:
    return all(abs(c) - 1 in subset for c in word.codes())


def is_closed_subset(p: PolycyclicPresentation, subset: FrozenSet[int]) -> bool:
    """
    Palavras só com geradores de subset coletam usando apenas regras presentes em p
    e nunca produzem geradores fora de subset
    """
    for g in subset:
        if g in p.power_exponents and not _inside(p.power_words.get(g, Word()), subset):
            return False
        for h in subset:
            if h <= g:
                continue
            rule = p.conj_pos.get((g, h))
            if rule is None or not _inside(rule, subset):
                return False
            # x_g^-1 com ordem finita vira potência positiva antes de conjugar
            if g not in p.power_exponents:
                inverse = p.conj_neg.get((g, h))
                if inverse is None or not _inside(inverse, subset):
                    return False
    return True


def _greedy_closed_subset(p: PolycyclicPresentation) -> FrozenSet[int]:
    subset = set(range(p.k))
    while subset and not is_closed_subset(p, frozenset(subset)):
        blame = {g: 0 for g in subset}
        for g in subset:
            if not is_closed_subset(p, frozenset({g})):
                blame[g] += 1
            for h in subset:
                if h > g and not is_closed_subset(p, frozenset({g, h})):
                    blame[g] += 1
                    blame[h] += 1
        subset.remove(max(sorted(subset), key=lambda g: (blame[g], g)))
    return frozenset(subset)


def collectable_subsets(p: PolycyclicPresentation) -> Iterator[FrozenSet[int]]:
    """
    Conjuntos fechados de geradores, maiores primeiro.
    Busca exaustiva até EXHAUSTIVE_SUBSET_LIMIT geradores, gulosa acima disso
    """
    if p.k <= EXHAUSTIVE_SUBSET_LIMIT:
        for size in range(p.k, 0, -1):
            for combo in itertools.combinations(range(p.k), size):
                if is_closed_subset(p, frozenset(combo)):
                    yield frozenset(combo)
        return
    greedy = _greedy_closed_subset(p)
    if greedy:
        yield greedy
    for g in range(p.k):
        if frozenset({g}) != greedy and is_closed_subset(p, frozenset({g})):
            yield frozenset({g})


def _classify(codes: Codes, k: int):
    if len(codes) >= 3 and codes[1] > 0 and codes[2] == -codes[0]:
        i, j = abs(codes[0]) - 1, codes[1] - 1
        rest = codes[3:]
        if i < j and all(abs(c) - 1 >= j for c in rest):
            kind = "pos" if codes[0] < 0 else "neg"
            return kind, (i, j), _invert_codes(rest)
    if codes and codes[0] > 0:
        l = codes[0] - 1
        run = 0
        while run < len(codes) and codes[run] == codes[0]:
            run += 1
        rest = codes[run:]
        if all(abs(c) - 1 > l for c in rest):
            return "power", l, (run, _invert_codes(rest))
    return None


def from_presentation(p: GroupPresentation, assert_consistent: bool = False) -> PolycyclicPresentation:
    """
    Reconhece os relatores x_i^-1 x_j x_i w^-1, x_i x_j x_i^-1 v^-1 e x_l^r u^-1.
    Consistência não é verificada: exige o fato público ou a asserção explícita
    """
    if p.family is not Family.POLYCYCLIC:
        raise PresentationError(f"Família {p.family.value!r} não é polycyclic")
    if POLYCYCLIC_CONSISTENT not in p.public_facts and not assert_consistent:
        raise PresentationError("Apresentação policíclica sem asserção de consistência (use assert-consistent)")
    pos: Dict[Tuple[int, int], Word] = {}
    neg: Dict[Tuple[int, int], Word] = {}
    orders: Dict[int, int] = {}
    power_words: Dict[int, Word] = {}
    for relator in p.relators:
        shape = _classify(relator.word.codes(), p.k)
        if shape is None:
            raise PresentationError(f"Relator {relator.index} não tem forma policíclica")
        kind, key, value = shape
        if kind == "power":
            if key in orders:
                raise PresentationError(f"Potência de {p.generators[key].name} repetida")
            orders[key] = value[0]
            power_words[key] = word_from_codes(value[1], p.generators)
            continue
        table = pos if kind == "pos" else neg
        if key in table:
            raise PresentationError(f"Regra de conjugação {key} repetida no relator {relator.index}")
        table[key] = word_from_codes(value, p.generators)
    return derive_inverse_conjugates(PolycyclicPresentation(p.generators, pos, neg, orders, power_words))


@dataclass(frozen=True)
class BuiltinPresentation:
    """Apresentação policíclica consistente com um oráculo independente para testes"""
    name: str
    presentation: PolycyclicPresentation
    oracle: Callable[[Word], bool]

    @property
    def relator_count(self) -> int:
        return len(self.presentation.conj_pos) + len(self.presentation.power_exponents)


def dihedral(q: int) -> BuiltinPresentation:
    """D_q: a reflexão, b rotação; b^a = b^(q-1), a^2 = b^q = 1"""
    if q < 3:
        raise PresentationError(f"D_q exige q >= 3, recebido {q}")
    gens = make_generators(["a", "b"])
    p = derive_inverse_conjugates(PolycyclicPresentation(
        gens,
        conj_pos={(0, 1): word_from_codes((2,) * (q - 1), gens)},
        power_exponents={0: 2, 1: q},
    ))
    images = [
        Permutation([(-i) % q for i in range(q)]),
        Permutation([(i + 1) % q for i in range(q)]),
    ]

    def oracle(w: Word) -> bool:
        product = Permutation(list(range(q)))
        for letter in w:
            image = images[letter.generator.index]
            product = product * (image if letter.sign > 0 else ~image)
        return product.is_Identity

    return BuiltinPresentation(f"dihedral-{q}", p, oracle)


def heisenberg() -> BuiltinPresentation:
    """Heisenberg discreto: [x,y] = x y x^-1 y^-1 = z central, então y^x = y z^-1"""
    gens = make_generators(["x", "y", "z"])
    p = derive_inverse_conjugates(PolycyclicPresentation(
        gens,
        conj_pos={
            (0, 1): word_from_codes((2, -3), gens),
            (0, 2): word_from_codes((3,), gens),
            (1, 2): word_from_codes((3,), gens),
        },
    ))

    def unit(row: int, col: int) -> Matrix:
        m = eye(3)
        m[row, col] = 1
        return m

    images = [unit(0, 1), unit(1, 2), unit(0, 2)]
    inverses = [m.inv() for m in images]

    def oracle(w: Word) -> bool:
        product = eye(3)
        for letter in w:
            index = letter.generator.index
            product = product * (images[index] if letter.sign > 0 else inverses[index])
        return product == eye(3)

    return BuiltinPresentation("heisenberg", p, oracle)


def abelian(orders: Sequence[int]) -> BuiltinPresentation:
    """Produto direto de cíclicos de ordens dadas, conjugação trivial"""
    if not orders or any(r < 2 for r in orders):
        raise PresentationError(f"Ordens inválidas para grupo abeliano: {list(orders)}")
    gens = make_generators([f"x{i + 1}" for i in range(len(orders))])
    k = len(orders)
    p = derive_inverse_conjugates(PolycyclicPresentation(
        gens,
        conj_pos={(i, j): word_from_codes((j + 1,), gens) for i in range(k) for j in range(i + 1, k)},
        power_exponents={l: r for l, r in enumerate(orders)},
    ))

    def oracle(w: Word) -> bool:
        sums = [0] * k
        for letter in w:
            sums[letter.generator.index] += letter.sign
        return all(s % r == 0 for s, r in zip(sums, orders))

    name = "abelian-" + "x".join(str(r) for r in orders)
    return BuiltinPresentation(name, p, oracle)


def builtin_presentations() -> Dict[str, Callable[..., BuiltinPresentation]]:
    """Catálogo das famílias embutidas, parametrizadas"""
    return {
        "dihedral": dihedral,
        "heisenberg": heisenberg,
        "abelian": abelian,
    }
