"""
Dealer do esquema: gera a apresentação plataforma com exatamente m relatores,
distribui as shares e codifica sequências de bits como palavras verificadas pelo motor
"""
import hashlib
import itertools
import logging
import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import FrozenSet, List, Optional, Sequence, Tuple

from models import EncodedMessage, SchemeParams, Share, ThresholdReport, Verdict
from .access_structure import (
    DEFAULT_MAX_RELATORS,
    AccessStructure,
    build_access_structure,
    check_threshold_property,
    make_shares,
)
from .engine_coxeter import involution_reduce
from .engine_polycyclic import BuiltinPresentation, abelian, collectable_subsets, dihedral, heisenberg
from .errors import AccessStructureError, EncodingError, PresentationError
from .file_formats import SchemeFile
from .presentation import (
    COXETER_INVOLUTIONS,
    Family,
    GeneratorSymbol,
    GroupPresentation,
    Letter,
    Relator,
    Word,
    commutator,
    conjugate,
    free_reduce,
    invert,
    make_generators,
    random_word,
    serialize_presentation,
    word_from_codes,
)
from .word_problem import EngineBudget, WordProblemSolver

logger = logging.getLogger(__name__)

PLATFORM_FAMILIES = ("coxeter", "polycyclic-builtin")
SMALL_PRIMES = (2, 3, 5, 7, 11, 13)
BIT_ALPHABET = frozenset("01")


@dataclass
class EncodingConfig:
    """Configuração de codificação"""
    coverage_fraction: float = 0.8
    commutator_count: Optional[int] = None  # None: max(m, 8)
    conjugator_length: int = 3
    max_word_length: int = 4096
    decode_budget: EngineBudget = field(default_factory=EngineBudget)
    seed: int = 0
    max_attempts: int = 100
    max_message_bits: int = 4096
    parallel_tasks: int = 4
    conjugate_whole: bool = True

    def __post_init__(self):
        if not 0 < self.coverage_fraction <= 1:
            raise EncodingError(f"coverage_fraction deve estar em (0, 1], recebido {self.coverage_fraction}")
        if self.commutator_count is not None and self.commutator_count < 1:
            raise EncodingError(f"commutator_count deve ser >= 1, recebido {self.commutator_count}")
        for name in ("conjugator_length", "max_word_length", "max_attempts", "max_message_bits", "parallel_tasks"):
            if getattr(self, name) < 1:
                raise EncodingError(f"{name} deve ser positivo, recebido {getattr(self, name)}")

    def factor_count(self, m: int) -> int:
        return self.commutator_count if self.commutator_count is not None else max(m, 8)


@dataclass(frozen=True)
class Scheme:
    """Estado mestre do dealer: parâmetros, semente e a apresentação secreta completa"""
    scheme_id: str
    params: SchemeParams
    seed: int
    presentation: GroupPresentation
    structure: AccessStructure

    def to_file(self) -> SchemeFile:
        return SchemeFile(self.scheme_id, self.params, self.seed, self.presentation)


@dataclass(frozen=True)
class RecipientPlan:
    """Como codificar para um único participante; generators None significa todos"""
    solver: WordProblemSolver
    generators: Optional[Tuple[GeneratorSymbol, ...]]
    relators: Tuple[Relator, ...]


def derive_seed(seed: int, label: str) -> int:
    """Fluxo RNG independente por rótulo: primeiros 8 bytes de sha256(seed|label)"""
    digest = hashlib.sha256(f"{seed}|{label}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def scheme_id_for(params: SchemeParams, seed: int, presentation: GroupPresentation) -> str:
    material = f"wpss|{params.n}|{params.t}|{seed}|" + serialize_presentation(presentation)
    return hashlib.sha256(material.encode("utf-8")).hexdigest()


def _coxeter_platform(m: int, rng: random.Random) -> GroupPresentation:
    k = 2
    while math.comb(k, 2) < m:
        k += 1
    gens = make_generators([f"s{i + 1}" for i in range(k)])
    pairs = sorted(rng.sample(list(itertools.combinations(range(k), 2)), m))
    relators = []
    for index, (i, j) in enumerate(pairs, start=1):
        order = rng.randint(2, 6)
        relators.append(Relator(index, word_from_codes((i + 1, j + 1) * order, gens)))
    logger.info(f"Plataforma Coxeter: k={k}, {m} de {math.comb(k, 2)} pares com relator")
    return GroupPresentation(gens, tuple(relators), Family.COXETER, (COXETER_INVOLUTIONS,))


def _polycyclic_platform(m: int, rng: random.Random) -> GroupPresentation:
    builtin: Optional[BuiltinPresentation] = None
    if m == 3:
        choice = rng.choice(["dihedral", "heisenberg", "abelian"])
        if choice == "dihedral":
            builtin = dihedral(rng.randint(3, 12))
        elif choice == "heisenberg":
            builtin = heisenberg()
        else:
            builtin = abelian([rng.choice(SMALL_PRIMES) for _ in range(2)])
    else:
        k = 2
        while math.comb(k + 1, 2) < m:
            k += 1
        if math.comb(k + 1, 2) == m:
            builtin = abelian([rng.choice(SMALL_PRIMES) for _ in range(k)])
    if builtin is None:
        raise PresentationError(
            f"Nenhuma apresentação policíclica embutida tem {m} relatores distribuíveis; "
            f"escolha (n, t) com m em 3, 6, 10, 15, ... ou use --family coxeter"
        )
    assert builtin.relator_count == m
    logger.info(f"Plataforma policíclica embutida: {builtin.name}")
    return builtin.presentation.to_group_presentation()


def generate_platform(family: str, params: SchemeParams, seed: int,
                      max_relators: int = DEFAULT_MAX_RELATORS) -> GroupPresentation:
    if params.m > max_relators:
        raise AccessStructureError(f"m={params.m} excede o limite de {max_relators} relatores")
    rng = random.Random(derive_seed(seed, "platform"))
    if family == "coxeter":
        presentation = _coxeter_platform(params.m, rng)
    elif family == "polycyclic-builtin":
        presentation = _polycyclic_platform(params.m, rng)
    else:
        raise PresentationError(f"Família de plataforma desconhecida: {family!r}; use {', '.join(PLATFORM_FAMILIES)}")
    assert presentation.m == params.m and presentation.is_contiguous()
    return presentation


def setup_scheme(n: int, t: int, family: str, seed: int,
                 max_relators: int = DEFAULT_MAX_RELATORS) -> Tuple[Scheme, List[Share], ThresholdReport]:
    """Passos de preparação: estrutura de acesso, plataforma, identificador e shares"""
    logger.info(f"Preparando esquema ({n}, {t}) com família {family}")
    structure = build_access_structure(n, t, max_relators)
    presentation = generate_platform(family, structure.params, seed, max_relators)
    scheme_id = scheme_id_for(structure.params, seed, presentation)
    shares = make_shares(presentation, structure, scheme_id)
    report = check_threshold_property(structure)
    scheme = Scheme(scheme_id, structure.params, seed, presentation, structure)
    return scheme, shares, report


def scheme_from_file(scheme_file: SchemeFile, max_relators: int = DEFAULT_MAX_RELATORS) -> Scheme:
    structure = build_access_structure(scheme_file.params.n, scheme_file.params.t, max_relators)
    return Scheme(scheme_file.scheme_id, scheme_file.params, scheme_file.seed,
                  scheme_file.presentation, structure)


def share_presentation(share: Share) -> GroupPresentation:
    return GroupPresentation(share.generators, tuple(share.relators), share.family, share.public_facts)


def validate_bits(bits: str, max_bits: int = 4096, allow_empty: bool = False):
    if not bits and not allow_empty:
        raise EncodingError("Sequência de bits vazia")
    if set(bits) - BIT_ALPHABET:
        raise EncodingError(f"Bits devem usar apenas '0' e '1': {sorted(set(bits) - BIT_ALPHABET)}")
    if len(bits) > max_bits:
        raise EncodingError(f"{len(bits)} bits excedem o limite de {max_bits}")


def embed_signature(bits: str, signature: str, rng: random.Random,
                    offset: Optional[int] = None, max_bits: int = 4096) -> str:
    """Insere a assinatura contígua num deslocamento sorteado em [0, |bits|]"""
    validate_bits(bits, max_bits, allow_empty=True)
    validate_bits(signature, max_bits, allow_empty=True)
    if len(bits) + len(signature) > max_bits:
        raise EncodingError(f"Assinatura de {len(signature)} bits não cabe no limite de {max_bits} bits")
    if not signature:
        return bits
    if offset is None:
        offset = rng.randint(0, len(bits))
    if not 0 <= offset <= len(bits):
        raise EncodingError(f"Deslocamento {offset} fora de 0..{len(bits)}")
    return bits[:offset] + signature + bits[offset:]


class SchemeDealer:
    """
    Codificador: palavras identidade como produtos de comutadores [r', w],
    palavras não identidade como um núcleo camuflado entre os mesmos comutadores.
    Toda palavra é decidida pelo motor com o orçamento do combinador antes de sair
    """

    def __init__(self, presentation: GroupPresentation, config: Optional[EncodingConfig] = None,
                 scheme_id: str = ""):
        self.presentation = presentation
        self.config = config or EncodingConfig()
        self.scheme_id = scheme_id
        self.is_coxeter = presentation.family is Family.COXETER
        self.solver = WordProblemSolver(presentation, self.config.decode_budget)

    def _normalize(self, w: Word) -> Word:
        return involution_reduce(w) if self.is_coxeter else free_reduce(w)

    def _conjugator(self, rng: random.Random, gens: Optional[Sequence[GeneratorSymbol]] = None) -> Word:
        length = self.config.conjugator_length
        gens = gens or self.presentation.generators
        if not self.is_coxeter:
            return random_word(gens, length, rng)
        letters = [Letter(rng.choice(gens), 1)]
        while len(letters) < length:
            letters.append(Letter(rng.choice([g for g in gens if g != letters[-1].generator]), 1))
        return Word(tuple(letters))

    def _factors(self, relators: Sequence[Relator], rng: random.Random,
                 gens: Optional[Sequence[GeneratorSymbol]] = None) -> List[Word]:
        order = list(relators)
        rng.shuffle(order)
        count = max(self.config.factor_count(self.presentation.m), len(order))
        if gens is not None and len(gens) == 1:
            # num só gerador todo comutador é trivial: potências do relator
            return [order[position % len(order)].word for position in range(count)]
        factors = []
        for position in range(count):
            word = order[position % len(order)].word
            if rng.random() < 0.5:
                word = invert(word)
            factors.append(commutator(word, self._conjugator(rng, gens)))
        return factors

    def _assemble(self, factors: List[Word], rng: random.Random,
                  gens: Optional[Sequence[GeneratorSymbol]] = None) -> Word:
        product = Word(tuple(letter for factor in factors for letter in factor))
        if self.config.conjugate_whole:
            product = conjugate(product, self._conjugator(rng, gens))
        return self._normalize(product)

    def _select(self, relators: Sequence[Relator], rng: random.Random) -> List[Relator]:
        needed = math.ceil(self.config.coverage_fraction * len(relators))
        return rng.sample(list(relators), needed)

    def _relators_by_index(self, indices: Sequence[int]) -> List[Relator]:
        return [self.presentation.relator(j) for j in indices]

    def _release(self, build, expected: Verdict, solvers: Sequence[WordProblemSolver], label: str) -> Word:
        """Repete a construção até todos os solvers confirmarem o veredito esperado"""
        for attempt in range(self.config.max_attempts):
            word = build()
            if len(word) == 0 or len(word) > self.config.max_word_length:
                continue
            decisions = [solver.decide(word) for solver in solvers]
            if any(d.verdict is Verdict.UNDECIDED for d in decisions):
                logger.debug(f"{label}: tentativa {attempt + 1} indefinida pelo motor")
                continue
            if all(d.verdict is expected for d in decisions):
                assert all(d.verdict is expected and len(word) > 0 for d in decisions)
                return word
            if expected is Verdict.IDENTITY and all(d.exact for d in decisions):
                raise EncodingError(f"{label}: produto de comutadores não decidido como identidade")
        raise EncodingError(
            f"{label}: {self.config.max_attempts} tentativas sem palavra verificada de até "
            f"{self.config.max_word_length} letras; ajuste max_word_length ou o orçamento"
        )

    def _identity_word(self, relators: Sequence[Relator], rng: random.Random,
                       solvers: Optional[Sequence[WordProblemSolver]] = None, label: str = "identidade",
                       gens: Optional[Sequence[GeneratorSymbol]] = None) -> Word:
        if not relators:
            raise EncodingError("Subconjunto de relatores vazio")
        return self._release(lambda: self._assemble(self._factors(relators, rng, gens), rng, gens),
                             Verdict.IDENTITY, solvers or [self.solver], label)

    def _nonidentity_word(self, relators: Sequence[Relator], rng: random.Random,
                          solvers: Optional[Sequence[WordProblemSolver]] = None,
                          label: str = "não identidade",
                          gens: Optional[Sequence[GeneratorSymbol]] = None) -> Word:
        def build() -> Word:
            factors = self._factors(relators, rng, gens)
            core_length = self.config.conjugator_length
            if gens is not None and len(gens) == 1:
                core_length = rng.randint(1, core_length)
            core = random_word(gens or self.presentation.generators, core_length, rng)
            if len(self._normalize(core)) == 0:
                return Word()
            factors.insert(rng.randint(0, len(factors)), core)
            return self._assemble(factors, rng, gens)

        return self._release(build, Verdict.NON_IDENTITY, solvers or [self.solver], label)

    def encode_identity_word(self, relator_subset: Sequence[int], rng: random.Random) -> Word:
        """Usa pelo menos coverage_fraction dos relatores pedidos"""
        chosen = self._select(self._relators_by_index(relator_subset), rng)
        return self._identity_word(chosen, rng)

    def encode_nonidentity_word(self, rng: random.Random) -> Word:
        chosen = self._select(self.presentation.relators, rng)
        return self._nonidentity_word(chosen, rng)

    def coverage_plan(self, bits: str) -> List[FrozenSet[int]]:
        """Relatores de cada palavra identidade; a primeira cobre todos os m"""
        rng = random.Random(derive_seed(self.config.seed, "coverage"))
        everything = self.presentation.relator_indices
        needed = math.ceil(self.config.coverage_fraction * len(everything))
        plan: List[FrozenSet[int]] = []
        covered_all = False
        for bit in bits:
            if bit == "1" and not covered_all:
                plan.append(frozenset(everything))
                covered_all = True
            elif bit == "1":
                plan.append(frozenset(rng.sample(everything, needed)))
            else:
                plan.append(frozenset())
        return plan

    def _encode_bit(self, position: int, bit: str, indices: FrozenSet[int]) -> Word:
        rng = random.Random(derive_seed(self.config.seed, f"bit-{position}"))
        if bit == "1":
            return self._identity_word(self._relators_by_index(sorted(indices)), rng,
                                       label=f"bit {position}")
        return self._nonidentity_word(self._select(self.presentation.relators, rng), rng,
                                      label=f"bit {position}")

    def encode_message(self, bits: str) -> EncodedMessage:
        validate_bits(bits, self.config.max_message_bits)
        logger.info(f"Codificando {len(bits)} bits com m={self.presentation.m}")
        plan = self.coverage_plan(bits)
        warnings = []
        if "1" not in bits:
            warning = "Mensagem sem bits 1: cobertura total dos relatores impossível"
            logger.warning(warning)
            warnings.append(warning)

        tasks = list(zip(range(len(bits)), bits, plan))
        if self.config.parallel_tasks <= 1 or len(tasks) <= 1:
            words = [self._encode_bit(*task) for task in tasks]
        else:
            with ThreadPoolExecutor(max_workers=self.config.parallel_tasks) as executor:
                words = list(executor.map(lambda task: self._encode_bit(*task), tasks))

        covered = set().union(*plan)
        logger.info(f"Mensagem codificada: {len(covered)}/{self.presentation.m} relatores cobertos")
        return EncodedMessage(self.scheme_id, tuple(words), tuple(plan), tuple(warnings))

    def recipient_plan(self, share: Share) -> RecipientPlan:
        """
        Solver parcial do destinatário e o alfabeto que ele sabe coletar.
        Coxeter usa todos os geradores; no caso policíclico, o maior conjunto fechado
        de geradores sob as regras de R_j que contenha algum relator da share
        """
        if share.scheme_id and self.scheme_id and share.scheme_id != self.scheme_id:
            raise EncodingError("Share de outro esquema")
        if not share.relators:
            raise EncodingError(f"Share {share.participant_index} não tem relatores")
        solver = WordProblemSolver(share_presentation(share), self.config.decode_budget, partial=True)
        if self.is_coxeter:
            return RecipientPlan(solver, None, tuple(share.relators))
        for subset in collectable_subsets(solver.polycyclic):
            usable = tuple(r for r in share.relators if all(abs(c) - 1 in subset for c in r.word.codes()))
            if usable:
                gens = tuple(self.presentation.generators[g] for g in sorted(subset))
                logger.info(
                    f"Destinatário {share.participant_index}: alfabeto "
                    f"{' '.join(g.name for g in gens)} com {len(usable)} relatores"
                )
                return RecipientPlan(solver, gens, usable)
        raise EncodingError(
            f"Share {share.participant_index}: nenhum conjunto de geradores coletável só com R_j "
            f"contém um relator da share; mensagem dirigida impossível nesta plataforma"
        )

    def encode_for_recipient(self, share: Share, bit: str, rng: random.Random,
                             plan: Optional[RecipientPlan] = None) -> Word:
        """Palavra decidível com certeza usando só os relatores de R_j"""
        if bit not in BIT_ALPHABET or len(bit) != 1:
            raise EncodingError(f"Bit inválido: {bit!r}")
        plan = plan or self.recipient_plan(share)
        chosen = self._select(plan.relators, rng)
        label = f"destinatário {share.participant_index}"
        if bit == "1":
            return self._identity_word(chosen, rng, [plan.solver, self.solver], label, plan.generators)
        return self._nonidentity_word(chosen, rng, [self.solver, plan.solver], label, plan.generators)

    def encode_targeted_message(self, share: Share, bits: str) -> EncodedMessage:
        validate_bits(bits, self.config.max_message_bits)
        logger.info(f"Codificando {len(bits)} bits para o participante {share.participant_index}")
        plan = self.recipient_plan(share)
        words = []
        for position, bit in enumerate(bits):
            rng = random.Random(derive_seed(self.config.seed, f"recipient-{share.participant_index}-{position}"))
            words.append(self.encode_for_recipient(share, bit, rng, plan))
        return EncodedMessage(self.scheme_id, tuple(words))
