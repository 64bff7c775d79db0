"""
Comandos de linha de comando do esquema: setup, encode, decode, wp, attack e decoys
Arquivos para shares e mensagens; stdout só para resumos e bits decodificados
"""
import functools
import logging
import os
import random

import click
from flask import Blueprint, current_app

from services.analysis import AdversarySimulator, AttackConfig, build_decoy_pool, decoy_false_positive_rate
from services.combiner import MessageCombiner, verify_signature
from services.dealer import (
    PLATFORM_FAMILIES,
    EncodingConfig,
    SchemeDealer,
    derive_seed,
    embed_signature,
    scheme_from_file,
    setup_scheme,
)
from services.access_structure import make_shares
from services.errors import (
    AccessStructureError,
    BelowThresholdError,
    BudgetExhaustedError,
    EncodingError,
    InconsistentSharesError,
    IntegrityError,
    MissingRuleError,
    PresentationError,
    ShareFormatError,
    UndecidedWordError,
    WordParseError,
)
from services.file_formats import (
    SCHEME_HEADER,
    message_word_texts,
    parse_message,
    parse_scheme,
    parse_share,
    read_pool,
    read_text,
    serialize_message,
    serialize_scheme,
    serialize_share,
    write_text,
)
from services.presentation import Family, parse_presentation, parse_word, serialize_presentation
from services.report_generator import ReportGenerator
from services.word_problem import EngineBudget, WordProblemSolver
from models import Verdict

logger = logging.getLogger(__name__)

scheme_bp = Blueprint('scheme', __name__, cli_group=None)

EXIT_USAGE = 2
EXIT_INTEGRITY = 3
EXIT_BUDGET = 4

# ordem importa: subclasses antes das bases
EXIT_CODES = (
    ((BudgetExhaustedError, UndecidedWordError), EXIT_BUDGET),
    ((BelowThresholdError, InconsistentSharesError, IntegrityError), EXIT_INTEGRITY),
    ((WordParseError, PresentationError, AccessStructureError, ShareFormatError,
      EncodingError, MissingRuleError, OSError), EXIT_USAGE),
)


def handle_errors(command):
    """Converte erros do domínio em mensagem no stderr e código de saída"""
    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except click.ClickException:
            raise
        except Exception as e:
            for types, code in EXIT_CODES:
                if isinstance(e, types):
                    logger.error(f"{type(e).__name__}: {e}")
                    click.echo(f"erro: {e}", err=True)
                    click.get_current_context().exit(code)
            raise
    return wrapper


def _budget() -> EngineBudget:
    return EngineBudget(
        max_explored=current_app.config["WPSS_TITS_BUDGET"],
        max_rewrite_steps=current_app.config["WPSS_COLLECT_BUDGET"],
    )


def _parallel_tasks() -> int:
    return current_app.config["WPSS_PARALLEL_TASKS"]


def _load_shares(paths):
    return [parse_share(read_text(path)) for path in paths]


def _bits_argument(value: str) -> str:
    """'@caminho' lê os bits do arquivo; qualquer outro valor é literal"""
    if value.startswith("@"):
        return read_text(value[1:]).strip()
    return value


@scheme_bp.cli.command('setup')
@click.option('--n', 'n', type=int, required=True, help='Número de participantes')
@click.option('--t', 't', type=int, required=True, help='Limiar')
@click.option('--family', type=click.Choice(PLATFORM_FAMILIES), default='coxeter', show_default=True)
@click.option('--seed', type=int, default=0, show_default=True)
@click.option('--out', 'out_dir', type=click.Path(file_okay=False), required=True)
@handle_errors
def setup_command(n, t, family, seed, out_dir):
    """Gera o esquema mestre e as n shares."""
    scheme, shares, report = setup_scheme(n, t, family, seed, current_app.config["WPSS_MAX_RELATORS"])
    os.makedirs(out_dir, exist_ok=True)
    write_text(os.path.join(out_dir, "scheme.txt"), serialize_scheme(scheme.to_file()))
    for share in shares:
        write_text(os.path.join(out_dir, f"share-{share.participant_index}.txt"), serialize_share(share))

    click.echo(f"scheme-id: {scheme.scheme_id}")
    click.echo(f"m: {scheme.params.m}")
    click.echo(f"k: {scheme.presentation.k}")
    status = "ok" if report.is_valid else "FAILED"
    click.echo(
        f"threshold-property: {status} ({report.metrics['full_coalitions_checked']} coalizões de t, "
        f"{report.metrics['partial_coalitions_checked']} de t-1)"
    )
    if not report.is_valid:
        raise IntegrityError("; ".join(report.issues[:5]))


@scheme_bp.cli.command('encode')
@click.option('--scheme', 'scheme_path', type=click.Path(exists=True, dir_okay=False), required=True)
@click.option('--bits', required=True, help='Bits 0/1, ou @ARQUIVO para ler os bits de um arquivo')
@click.option('--signature', default='', help='Assinatura embutida num deslocamento secreto')
@click.option('--seed', type=int, default=0, show_default=True)
@click.option('--coverage', type=float, default=0.8, show_default=True)
@click.option('--commutators', type=int, default=None, help='Fatores por palavra (padrão max(m, 8))')
@click.option('--conjugator-length', type=int, default=3, show_default=True)
@click.option('--max-word-length', type=int, default=4096, show_default=True)
@click.option('--recipient', type=int, default=None, help='Mensagem dirigida a um único participante')
@click.option('--out', 'out_path', type=click.Path(dir_okay=False), required=True)
@handle_errors
def encode_command(scheme_path, bits, signature, seed, coverage, commutators, conjugator_length,
                   max_word_length, recipient, out_path):
    """Codifica bits como palavras do grupo secreto."""
    scheme = scheme_from_file(parse_scheme(read_text(scheme_path)), current_app.config["WPSS_MAX_RELATORS"])
    config = EncodingConfig(
        coverage_fraction=coverage,
        commutator_count=commutators,
        conjugator_length=conjugator_length,
        max_word_length=max_word_length,
        decode_budget=_budget(),
        seed=seed,
        parallel_tasks=_parallel_tasks(),
    )
    payload = _bits_argument(bits)
    if signature:
        payload = embed_signature(payload, signature, random.Random(derive_seed(seed, "signature")),
                                  max_bits=config.max_message_bits)
    dealer = SchemeDealer(scheme.presentation, config, scheme.scheme_id)

    if recipient is None:
        msg = dealer.encode_message(payload)
    else:
        if not 1 <= recipient <= scheme.params.n:
            raise click.BadParameter(f"participante fora de 1..{scheme.params.n}", param_hint='--recipient')
        share = make_shares(scheme.presentation, scheme.structure, scheme.scheme_id)[recipient - 1]
        msg = dealer.encode_targeted_message(share, payload)
    write_text(out_path, serialize_message(msg))

    click.echo(f"words: {msg.length}")
    if msg.coverage:
        covered = set().union(*msg.coverage)
        identity_words = [c for c in msg.coverage if c]
        smallest = min((len(c) for c in identity_words), default=0)
        click.echo(f"covered-relators: {len(covered)}/{scheme.params.m}")
        click.echo(f"min-relators-per-identity-word: {smallest}")
    for warning in msg.warnings:
        click.echo(f"warning: {warning}")


@scheme_bp.cli.command('decode')
@click.option('--share', 'share_paths', type=click.Path(exists=True, dir_okay=False), multiple=True, required=True)
@click.option('--message', 'message_path', type=click.Path(exists=True, dir_okay=False), required=True)
@click.option('--single', is_flag=True, help='Decodifica com uma única share (mensagem dirigida)')
@click.option('--signature', default='', help='Verifica se a assinatura aparece nos bits')
@handle_errors
def decode_command(share_paths, message_path, single, signature):
    """Reconstrói a apresentação e imprime os bits."""
    shares = _load_shares(share_paths)
    msg = parse_message(read_text(message_path), shares[0].generators)
    combiner = MessageCombiner(_budget(), _parallel_tasks())
    if single:
        if len(shares) != 1:
            raise click.UsageError("--single exige exatamente uma --share")
        result = combiner.decode_single(shares[0], msg)
    else:
        result = combiner.decode_message(shares, msg)
    click.echo(result.bits)

    if signature:
        report = verify_signature(result.bits, signature)
        if not report.authentic:
            raise IntegrityError("Assinatura não encontrada nos bits decodificados")
        click.echo(f"signature: authentic ({len(report.offsets)} ocorrências)")


@scheme_bp.cli.command('wp')
@click.option('--presentation', 'presentation_path', type=click.Path(exists=True, dir_okay=False), required=True)
@click.option('--word', required=True)
@click.option('--assert-consistent', is_flag=True, help='Aceita apresentação policíclica sem o fato público')
@handle_errors
def wp_command(presentation_path, word, assert_consistent):
    """Decide o problema da palavra numa apresentação."""
    text = read_text(presentation_path)
    if text.startswith(SCHEME_HEADER):
        presentation = parse_scheme(text).presentation
    else:
        presentation = parse_presentation(text)
    solver = WordProblemSolver(presentation, _budget(), assert_consistent=assert_consistent)
    decision = solver.decide(parse_word(word, presentation.generators))
    click.echo(ReportGenerator().decision_line(decision))
    if decision.verdict is Verdict.UNDECIDED:
        raise BudgetExhaustedError("Palavra indefinida dentro do orçamento", decision.stats)


@scheme_bp.cli.command('attack')
@click.option('--share', 'share_paths', type=click.Path(exists=True, dir_okay=False), multiple=True)
@click.option('--pool', 'pool_dir', type=click.Path(exists=True, file_okay=False), default=None)
@click.option('--message', 'message_path', type=click.Path(exists=True, dir_okay=False), required=True)
@click.option('--signature', default='', help='Assinatura conhecida procurada em cada candidato')
@click.option('--true-label', default=None, help='Candidato verdadeiro, para medir falsos positivos')
@click.option('--pdf', 'pdf_path', type=click.Path(dir_okay=False), default=None)
@handle_errors
def attack_command(share_paths, pool_dir, message_path, signature, true_label, pdf_path):
    """Simula uma coalizão abaixo do limiar ou uma busca em pool."""
    if bool(share_paths) == bool(pool_dir):
        raise click.UsageError("Informe --share (uma ou mais) ou --pool, não ambos")
    simulator = AdversarySimulator(AttackConfig(
        budget=_budget(),
        pool_budget=EngineBudget.uniform(current_app.config["WPSS_POOL_BUDGET"]),
        parallel_tasks=_parallel_tasks(),
    ))
    generator = ReportGenerator()

    if share_paths:
        shares = _load_shares(share_paths)
        msg = parse_message(read_text(message_path), shares[0].generators)
        report = simulator.coalition_attack(shares, msg)
        lines = generator.attack_lines(report)
        title = "Ataque de coalizão"
    else:
        _, word_texts = message_word_texts(read_text(message_path))
        candidates = simulator.pool_attack(read_pool(pool_dir), word_texts, signature)
        rate = decoy_false_positive_rate(candidates, true_label) if true_label else None
        lines = generator.pool_lines(candidates, rate)
        title = "Ataque de pool"

    for line in lines:
        click.echo(line)
    if pdf_path:
        written = generator.export_pdf(title, lines, pdf_path)
        click.echo(f"report: {written}")


@scheme_bp.cli.command('decoys')
@click.option('--scheme', 'scheme_path', type=click.Path(exists=True, dir_okay=False), required=True)
@click.option('--count', type=int, default=99, show_default=True)
@click.option('--seed', type=int, default=0, show_default=True)
@click.option('--out', 'out_dir', type=click.Path(file_okay=False), required=True)
@click.option('--include-true', is_flag=True, help='Insere a apresentação verdadeira numa posição sorteada')
@handle_errors
def decoys_command(scheme_path, count, seed, out_dir, include_true):
    """Gera um pool de apresentações-isca da mesma família e do mesmo m."""
    if count < 0:
        raise click.BadParameter("deve ser >= 0", param_hint='--count')
    scheme_file = parse_scheme(read_text(scheme_path))
    family = "coxeter" if scheme_file.presentation.family is Family.COXETER else "polycyclic-builtin"
    presentations = [p for _, p in build_decoy_pool(family, scheme_file.params, count, seed)]
    true_position = None
    if include_true:
        true_position = random.Random(derive_seed(seed, "true-position")).randint(0, len(presentations))
        presentations.insert(true_position, scheme_file.presentation)

    os.makedirs(out_dir, exist_ok=True)
    for i, presentation in enumerate(presentations):
        write_text(os.path.join(out_dir, f"decoy-{i:04d}.txt"), serialize_presentation(presentation))
    click.echo(f"candidates: {len(presentations)}")
    if true_position is not None:
        click.echo(f"true-candidate: decoy-{true_position:04d}.txt")
