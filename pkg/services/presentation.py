"""
Tipos simbólicos centrais: geradores, letras, palavras, relatores e apresentações
Inclui redução livre, álgebra de palavras e o formato texto canônico
"""
import enum
import logging
import random
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

from .errors import PresentationError, WordParseError

logger = logging.getLogger(__name__)

NAME_PATTERN = re.compile(r"^[a-z][a-z0-9]*$")
TERM_PATTERN = re.compile(r"^([a-z][a-z0-9]*)(?:\^(-?[0-9]+))?$")
RELATOR_LINE = re.compile(r"^relator ([0-9]+): ?(.*)$")

COXETER_INVOLUTIONS = "coxeter-involutions"
POLYCYCLIC_CONSISTENT = "polycyclic-consistent"


class Family(str, enum.Enum):
    COXETER = "coxeter"
    POLYCYCLIC = "polycyclic"
    RAW = "raw"


@dataclass(frozen=True)
class GeneratorSymbol:
    """Gerador nomeado; index é a posição na lista da apresentação"""
    name: str
    index: int

    def __post_init__(self):
        if not NAME_PATTERN.match(self.name):
            raise PresentationError(f"Nome de gerador inválido: {self.name!r}")
        if self.index < 0:
            raise PresentationError(f"Índice negativo para o gerador {self.name}")


@dataclass(frozen=True)
class Letter:
    generator: GeneratorSymbol
    sign: int

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise PresentationError(f"Expoente de letra deve ser ±1, recebido {self.sign}")

    @property
    def code(self) -> int:
        """Código inteiro com sinal: ±(index + 1)"""
        return self.sign * (self.generator.index + 1)

    def inverse(self) -> "Letter":
        return Letter(self.generator, -self.sign)


@dataclass(frozen=True)
class Word:
    letters: Tuple[Letter, ...] = ()

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[Letter]:
        return iter(self.letters)

    def __mul__(self, other: "Word") -> "Word":
        # concatenação pura, sem redução
        return Word(self.letters + other.letters)

    def __str__(self) -> str:
        return serialize_word(self)

    def codes(self) -> Tuple[int, ...]:
        return tuple(letter.code for letter in self.letters)

    def is_freely_reduced(self) -> bool:
        return all(a.code != -b.code for a, b in zip(self.letters, self.letters[1:]))


@dataclass(frozen=True)
class Relator:
    """Relator r_j com índice global j (1-based)"""
    index: int
    word: Word

    def __post_init__(self):
        if self.index < 1:
            raise PresentationError(f"Índice de relator deve ser >= 1, recebido {self.index}")
        if len(self.word) == 0:
            raise PresentationError(f"Relator {self.index} vazio")
        if not self.word.is_freely_reduced():
            raise PresentationError(f"Relator {self.index} não está livremente reduzido")


@dataclass(frozen=True)
class GroupPresentation:
    """
    Objeto secreto do esquema: geradores públicos + relatores indexados
    Apresentações parciais (coalizões abaixo do limiar) mantêm os índices globais
    """
    generators: Tuple[GeneratorSymbol, ...]
    relators: Tuple[Relator, ...]
    family: Family = Family.RAW
    public_facts: Tuple[str, ...] = ()

    def __post_init__(self):
        if not self.generators:
            raise PresentationError("Apresentação precisa de pelo menos um gerador")
        names = [g.name for g in self.generators]
        if len(set(names)) != len(names):
            raise PresentationError(f"Nomes de geradores repetidos: {names}")
        for position, gen in enumerate(self.generators):
            if gen.index != position:
                raise PresentationError(f"Gerador {gen.name} com índice {gen.index}, esperado {position}")
        known = set(self.generators)
        seen = set()
        for relator in self.relators:
            if relator.index in seen:
                raise PresentationError(f"Índice de relator repetido: {relator.index}")
            seen.add(relator.index)
            for letter in relator.word:
                if letter.generator not in known:
                    raise PresentationError(
                        f"Relator {relator.index} usa gerador fora da lista: {letter.generator.name}"
                    )

    @property
    def k(self) -> int:
        return len(self.generators)

    @property
    def m(self) -> int:
        return len(self.relators)

    @property
    def relator_indices(self) -> Tuple[int, ...]:
        return tuple(r.index for r in self.relators)

    def is_contiguous(self) -> bool:
        """Índices exatamente 1..m, invariante das apresentações completas"""
        return sorted(self.relator_indices) == list(range(1, self.m + 1))

    def relator(self, index: int) -> Relator:
        for relator in self.relators:
            if relator.index == index:
                return relator
        raise KeyError(index)

    def with_relators(self, relators: Iterable[Relator]) -> "GroupPresentation":
        ordered = tuple(sorted(relators, key=lambda r: r.index))
        return GroupPresentation(self.generators, ordered, self.family, self.public_facts)


def make_generators(names: Sequence[str]) -> Tuple[GeneratorSymbol, ...]:
    return tuple(GeneratorSymbol(name, i) for i, name in enumerate(names))


def word_from_codes(codes: Iterable[int], gens: Sequence[GeneratorSymbol]) -> Word:
    return Word(tuple(Letter(gens[abs(c) - 1], 1 if c > 0 else -1) for c in codes))


def free_reduce(w: Word) -> Word:
    stack: List[Letter] = []
    for letter in w.letters:
        if stack and stack[-1].code == -letter.code:
            stack.pop()
        else:
            stack.append(letter)
    return Word(tuple(stack))


def invert(w: Word) -> Word:
    return Word(tuple(letter.inverse() for letter in reversed(w.letters)))


def commutator(a: Word, b: Word) -> Word:
    """[a,b] = a b a^-1 b^-1, livremente reduzido"""
    return free_reduce(a * b * invert(a) * invert(b))


def conjugate(w: Word, g: Word) -> Word:
    """w^g = g^-1 w g, livremente reduzido"""
    return free_reduce(invert(g) * w * g)


def power(w: Word, exponent: int) -> Word:
    base = w if exponent >= 0 else invert(w)
    return free_reduce(Word(base.letters * abs(exponent)))


def parse_word(text: str, gens: Sequence[GeneratorSymbol]) -> Word:
    """
    Interpreta uma palavra da gramática term (SP term)*, com term := name | name^inteiro
    Expoentes são expandidos em letras; nenhuma redução é aplicada
    """
    by_name = {g.name: g for g in gens}
    letters: List[Letter] = []
    for match in re.finditer(r"\S+", text):
        token, position = match.group(0), match.start()
        term = TERM_PATTERN.match(token)
        if not term:
            if "^" in token and NAME_PATTERN.match(token.split("^", 1)[0]):
                raise WordParseError(f"Expoente mal formado em {token!r}", position)
            raise WordParseError(f"Termo inválido {token!r}", position)
        name, exponent_text = term.group(1), term.group(2)
        if name not in by_name:
            raise WordParseError(f"Gerador desconhecido {name!r}", position)
        exponent = int(exponent_text) if exponent_text is not None else 1
        if exponent == 0:
            raise WordParseError(f"Expoente zero em {token!r}", position)
        sign = 1 if exponent > 0 else -1
        letters.extend([Letter(by_name[name], sign)] * abs(exponent))
    return Word(tuple(letters))


def serialize_word(w: Word) -> str:
    """Forma canônica: corridas máximas da mesma letra em notação de expoente"""
    tokens: List[str] = []
    runs: List[Tuple[Letter, int]] = []
    for letter in w.letters:
        if runs and runs[-1][0] == letter:
            runs[-1] = (letter, runs[-1][1] + 1)
        else:
            runs.append((letter, 1))
    for letter, count in runs:
        exponent = letter.sign * count
        name = letter.generator.name
        tokens.append(name if exponent == 1 else f"{name}^{exponent}")
    return " ".join(tokens)


def random_word(gens: Sequence[GeneratorSymbol], target_length: int, rng: random.Random) -> Word:
    """
    Palavra reduzida de comprimento exato, uniforme entre as reduzidas:
    primeira letra entre 2k, as seguintes entre as 2k-1 que não cancelam
    """
    if target_length < 1:
        raise ValueError(f"target_length deve ser >= 1, recebido {target_length}")
    alphabet = [Letter(g, s) for g in gens for s in (1, -1)]
    letters = [rng.choice(alphabet)]
    while len(letters) < target_length:
        forbidden = letters[-1].inverse()
        letters.append(rng.choice([a for a in alphabet if a != forbidden]))
    return Word(tuple(letters))


def parse_presentation(text: str, family: Optional[Family] = None,
                       public_facts: Optional[Sequence[str]] = None) -> GroupPresentation:
    """Lê o bloco texto de apresentação (generators / relator j / family)"""
    lines = [line for line in text.split("\n") if line.strip()]
    if not lines or not lines[0].startswith("generators:"):
        raise PresentationError("Bloco de apresentação deve começar com 'generators:'")
    names = lines[0][len("generators:"):].split()
    gens = make_generators(names)
    relators: List[Relator] = []
    parsed_family = Family.RAW
    for line in lines[1:]:
        if line.startswith("family:"):
            value = line[len("family:"):].strip()
            try:
                parsed_family = Family(value)
            except ValueError:
                raise PresentationError(f"Família desconhecida: {value!r}")
            continue
        match = RELATOR_LINE.match(line)
        if not match:
            raise PresentationError(f"Linha inesperada no bloco de apresentação: {line!r}")
        relators.append(Relator(int(match.group(1)), free_reduce(parse_word(match.group(2), gens))))
    chosen = family or parsed_family
    if public_facts is None:
        public_facts = (COXETER_INVOLUTIONS,) if chosen is Family.COXETER else ()
    return GroupPresentation(gens, tuple(relators), chosen, tuple(public_facts))


def serialize_presentation(p: GroupPresentation) -> str:
    lines = ["generators: " + " ".join(g.name for g in p.generators)]
    for relator in sorted(p.relators, key=lambda r: r.index):
        lines.append(f"relator {relator.index}: {serialize_word(relator.word)}")
    lines.append(f"family: {p.family.value}")
    return "\n".join(lines) + "\n"
