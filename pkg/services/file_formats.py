"""
Formatos texto bit a bit: esquema mestre, shares, mensagens e pools de apresentações
UTF-8, quebras LF, sem espaço no fim das linhas
"""
import logging
import os
import re
from dataclasses import dataclass
from typing import List, Sequence, Tuple

from models import EncodedMessage, SchemeParams, Share
from .errors import PresentationError, ShareFormatError, WordParseError
from .presentation import (
    GeneratorSymbol,
    GroupPresentation,
    Relator,
    free_reduce,
    make_generators,
    parse_presentation,
    parse_word,
    serialize_presentation,
    serialize_word,
)

logger = logging.getLogger(__name__)

SHARE_HEADER = "WPSS-SHARE v1"
MESSAGE_HEADER = "WPSS-MSG v1"
SCHEME_HEADER = "WPSS-SCHEME v1"
SCHEME_ID_PATTERN = re.compile(r"^[0-9a-f]{64}$")
NO_FACTS = "none"


@dataclass(frozen=True)
class SchemeFile:
    """Conteúdo do arquivo mestre do dealer"""
    scheme_id: str
    params: SchemeParams
    seed: int
    presentation: GroupPresentation


class _LineReader:
    def __init__(self, text: str, kind: str):
        if "\r" in text:
            raise ShareFormatError(f"Arquivo de {kind} deve usar quebras LF")
        self.lines = text.split("\n")
        if self.lines and self.lines[-1] == "":
            self.lines.pop()
        self.position = 0
        self.kind = kind

    def header(self, expected: str):
        if not self.lines or self.lines[0] != expected:
            raise ShareFormatError(f"Cabeçalho de {self.kind} inválido; esperado {expected!r}")
        self.position = 1

    def field(self, key: str) -> str:
        if self.position >= len(self.lines):
            raise ShareFormatError(f"Campo {key!r} ausente no arquivo de {self.kind}")
        line = self.lines[self.position]
        prefix = f"{key}:"
        if not line.startswith(prefix):
            raise ShareFormatError(f"Linha {self.position + 1}: esperado {prefix!r}, encontrado {line!r}")
        self.position += 1
        return line[len(prefix):].strip()

    def integer(self, key: str) -> int:
        value = self.field(key)
        if not re.fullmatch(r"[0-9]+", value):
            raise ShareFormatError(f"Campo {key!r} não é inteiro: {value!r}")
        return int(value)

    def scheme_id(self) -> str:
        value = self.field("scheme-id")
        if not SCHEME_ID_PATTERN.match(value):
            raise ShareFormatError(f"scheme-id deve ter 64 dígitos hexadecimais: {value!r}")
        return value

    def rest(self) -> List[str]:
        remaining = self.lines[self.position:]
        self.position = len(self.lines)
        return remaining


def _facts_line(facts: Sequence[str]) -> str:
    return " ".join(facts) if facts else NO_FACTS


def _parse_facts(value: str) -> Tuple[str, ...]:
    return () if value == NO_FACTS else tuple(value.split())


def _params(reader: _LineReader) -> SchemeParams:
    n, t, m = reader.integer("n"), reader.integer("t"), reader.integer("m")
    try:
        return SchemeParams(n, t, m)
    except Exception as exc:
        raise ShareFormatError(f"Parâmetros inconsistentes: {exc}")


def serialize_share(share: Share) -> str:
    lines = [
        SHARE_HEADER,
        f"scheme-id: {share.scheme_id}",
        f"n: {share.params.n}",
        f"t: {share.params.t}",
        f"m: {share.params.m}",
        f"participant: {share.participant_index}",
        "generators: " + " ".join(g.name for g in share.generators),
        f"public-facts: {_facts_line(share.public_facts)}",
    ]
    for relator in sorted(share.relators, key=lambda r: r.index):
        lines.append(f"relator {relator.index}: {serialize_word(relator.word)}")
    return "\n".join(lines) + "\n"


def parse_share(text: str) -> Share:
    reader = _LineReader(text, "share")
    reader.header(SHARE_HEADER)
    scheme_id = reader.scheme_id()
    params = _params(reader)
    participant = reader.integer("participant")
    generators = make_generators(reader.field("generators").split())
    facts = _parse_facts(reader.field("public-facts"))
    relators = []
    for line in reader.rest():
        match = re.fullmatch(r"relator ([0-9]+): (.+)", line)
        if not match:
            raise ShareFormatError(f"Linha de relator inválida: {line!r}")
        word = parse_word(match.group(2), generators)
        if free_reduce(word) != word:
            raise ShareFormatError(f"Relator {match.group(1)} não está livremente reduzido")
        relators.append(Relator(int(match.group(1)), word))
    if not 1 <= participant <= params.n:
        raise ShareFormatError(f"Participante {participant} fora de 1..{params.n}")
    if any(not 1 <= r.index <= params.m for r in relators):
        raise ShareFormatError(f"Índices de relator fora de 1..{params.m}")
    return Share(scheme_id, participant, params, generators, facts, tuple(relators))


def serialize_message(msg: EncodedMessage) -> str:
    lines = [MESSAGE_HEADER, f"scheme-id: {msg.scheme_id}", f"count: {msg.length}"]
    for word in msg.words:
        text = serialize_word(word)
        lines.append(f"word: {text}" if text else "word:")
    return "\n".join(lines) + "\n"


def parse_message(text: str, generators: Sequence[GeneratorSymbol]) -> EncodedMessage:
    reader = _LineReader(text, "mensagem")
    reader.header(MESSAGE_HEADER)
    scheme_id = reader.scheme_id()
    count = reader.integer("count")
    words = []
    for line in reader.rest():
        if not line.startswith("word:"):
            raise ShareFormatError(f"Linha de palavra inválida: {line!r}")
        words.append(parse_word(line[len("word:"):], generators))
    if len(words) != count:
        raise ShareFormatError(f"count: {count}, mas o arquivo tem {len(words)} palavras")
    return EncodedMessage(scheme_id, tuple(words))


def message_word_texts(text: str) -> Tuple[str, List[str]]:
    """scheme-id e palavras ainda em texto, para reinterpretar com outros geradores"""
    reader = _LineReader(text, "mensagem")
    reader.header(MESSAGE_HEADER)
    scheme_id = reader.scheme_id()
    reader.integer("count")
    return scheme_id, [line[len("word:"):].strip() for line in reader.rest()]


def serialize_scheme(scheme: SchemeFile) -> str:
    lines = [
        SCHEME_HEADER,
        f"scheme-id: {scheme.scheme_id}",
        f"n: {scheme.params.n}",
        f"t: {scheme.params.t}",
        f"m: {scheme.params.m}",
        f"seed: {scheme.seed}",
        f"public-facts: {_facts_line(scheme.presentation.public_facts)}",
    ]
    return "\n".join(lines) + "\n" + serialize_presentation(scheme.presentation)


def parse_scheme(text: str) -> SchemeFile:
    reader = _LineReader(text, "esquema")
    reader.header(SCHEME_HEADER)
    scheme_id = reader.scheme_id()
    params = _params(reader)
    seed = reader.integer("seed")
    facts = _parse_facts(reader.field("public-facts"))
    presentation = parse_presentation("\n".join(reader.rest()), public_facts=facts)
    if presentation.m != params.m or not presentation.is_contiguous():
        raise ShareFormatError(f"Esquema declara m={params.m} mas a apresentação tem {presentation.m} relatores")
    return SchemeFile(scheme_id, params, seed, presentation)


def read_pool(directory: str) -> List[Tuple[str, GroupPresentation]]:
    """Carrega blocos de apresentação (ou esquemas mestres) de um diretório, em ordem de nome"""
    pool = []
    for name in sorted(os.listdir(directory)):
        path = os.path.join(directory, name)
        if not os.path.isfile(path):
            continue
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
        try:
            if text.startswith(SCHEME_HEADER):
                presentation = parse_scheme(text).presentation
            else:
                presentation = parse_presentation(text)
        except (PresentationError, ShareFormatError, WordParseError) as exc:
            logger.warning(f"Arquivo de pool ignorado {name}: {exc}")
            continue
        pool.append((name, presentation))
    logger.info(f"Pool carregado com {len(pool)} apresentações de {directory}")
    return pool


def write_text(path: str, text: str):
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(text)


def read_text(path: str) -> str:
    with open(path, encoding="utf-8", newline="") as handle:
        return handle.read()
