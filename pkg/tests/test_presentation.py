import random
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from services.errors import PresentationError, WordParseError
from services.presentation import (
    COXETER_INVOLUTIONS,
    Family,
    GroupPresentation,
    Relator,
    Word,
    commutator,
    conjugate,
    free_reduce,
    invert,
    make_generators,
    parse_presentation,
    parse_word,
    power,
    random_word,
    serialize_presentation,
    serialize_word,
    word_from_codes,
)

GENS = make_generators(["s1", "s2", "s3"])


def test_parse_word_expands_exponents():
    w = parse_word("s1 s2^3 s1^-2", GENS)
    assert w.codes() == (1, 2, 2, 2, -1, -1)


def test_parse_empty_word():
    assert parse_word("", GENS) == Word()


def test_parse_rejects_zero_exponent_with_position():
    with pytest.raises(WordParseError) as exc:
        parse_word("s1 s2^0", GENS)
    assert exc.value.position == 3


def test_parse_rejects_unknown_generator():
    with pytest.raises(WordParseError) as exc:
        parse_word("s1 q", GENS)
    assert exc.value.position == 3


def test_parse_rejects_malformed_exponent():
    with pytest.raises(WordParseError):
        parse_word("s1^x", GENS)


def test_serialize_uses_maximal_runs():
    w = word_from_codes((1, 1, -2, 3), GENS)
    assert serialize_word(w) == "s1^2 s2^-1 s3"


def test_free_reduce_cancels_nested_pairs():
    w = word_from_codes((1, 2, -2, -1, 3), GENS)
    assert free_reduce(w).codes() == (3,)


def test_commutator_and_conjugate():
    a = word_from_codes((1,), GENS)
    b = word_from_codes((2,), GENS)
    assert commutator(a, b).codes() == (1, 2, -1, -2)
    assert conjugate(a, b).codes() == (-2, 1, 2)
    assert commutator(a, a) == Word()


def test_power_and_invert():
    w = word_from_codes((1, 2), GENS)
    assert power(w, 2).codes() == (1, 2, 1, 2)
    assert power(w, -1) == invert(w)
    assert invert(w).codes() == (-2, -1)


@settings(max_examples=100, deadline=None)
@given(length=st.integers(min_value=1, max_value=40), seed=st.integers(min_value=0, max_value=2 ** 32))
def test_random_word_is_reduced_with_exact_length(length, seed):
    w = random_word(GENS, length, random.Random(seed))
    assert len(w) == length
    assert w.is_freely_reduced()


def test_random_word_rejects_empty_target():
    with pytest.raises(ValueError):
        random_word(GENS, 0, random.Random(0))


@settings(max_examples=60, deadline=None)
@given(length=st.integers(min_value=1, max_value=30), seed=st.integers(min_value=0, max_value=2 ** 32))
def test_serialized_words_parse_back(length, seed):
    w = random_word(GENS, length, random.Random(seed))
    assert parse_word(serialize_word(w), GENS) == w


def test_relator_must_be_nonempty_and_reduced():
    with pytest.raises(PresentationError):
        Relator(1, Word())
    with pytest.raises(PresentationError):
        Relator(1, word_from_codes((1, -1), GENS))
    with pytest.raises(PresentationError):
        Relator(0, word_from_codes((1,), GENS))


def test_presentation_rejects_duplicate_indices():
    r = word_from_codes((1, 2, 1, 2), GENS)
    with pytest.raises(PresentationError):
        GroupPresentation(GENS, (Relator(1, r), Relator(1, r)))


def test_presentation_rejects_foreign_generator():
    other = make_generators(["a"])
    with pytest.raises(PresentationError):
        GroupPresentation(GENS[:1], (Relator(1, word_from_codes((1,), other)),))


def test_presentation_block_round_trip():
    text = "generators: s1 s2 s3\nrelator 1: s1 s2 s1 s2 s1 s2\nrelator 3: s2 s3 s2 s3\nfamily: coxeter\n"
    p = parse_presentation(text)
    assert p.family is Family.COXETER
    assert COXETER_INVOLUTIONS in p.public_facts
    assert p.relator_indices == (1, 3)
    assert not p.is_contiguous()
    assert serialize_presentation(p) == "generators: s1 s2 s3\nrelator 1: s1 s2 s1 s2 s1 s2\nrelator 3: s2 s3 s2 s3\nfamily: coxeter\n"
    assert parse_presentation(serialize_presentation(p)) == p


def test_presentation_block_defaults_to_raw():
    p = parse_presentation("generators: a b\nrelator 1: a b a^-1 b^-1\n")
    assert p.family is Family.RAW
    assert p.public_facts == ()


def test_presentation_block_rejects_unknown_family():
    with pytest.raises(PresentationError):
        parse_presentation("generators: a\nfamily: magic\n")


def _naive_reduce(codes):
    """Reescaneia do início a cada cancelamento até não sobrar par x x^-1"""
    codes = list(codes)
    changed = True
    while changed:
        changed = False
        for i in range(len(codes) - 1):
            if codes[i] == -codes[i + 1]:
                del codes[i:i + 2]
                changed = True
                break
    return tuple(codes)


def test_cascading_cancellation_matches_naive_scan():
    gens = make_generators(["a", "b"])
    w = parse_word("a b b^-1 b a^-1 a", gens)
    assert serialize_word(free_reduce(w)) == "a b"
    assert free_reduce(w).codes() == _naive_reduce(w.codes())


def _with_cancellations(seed, length):
    """Palavra aleatória com pares x x^-1 injetados em posições sorteadas"""
    rng = random.Random(seed)
    codes = list(random_word(GENS, length, rng).codes())
    for _ in range(rng.randint(1, 6)):
        c = rng.choice([1, 2, 3]) * rng.choice([1, -1])
        position = rng.randint(0, len(codes))
        codes[position:position] = [c, -c]
    return word_from_codes(codes, GENS)


@settings(max_examples=150, deadline=None)
@given(length=st.integers(min_value=1, max_value=30), seed=st.integers(min_value=0, max_value=2 ** 32))
def test_free_reduce_is_idempotent_and_matches_naive_scan(length, seed):
    w = _with_cancellations(seed, length)
    reduced = free_reduce(w)
    assert free_reduce(reduced) == reduced
    assert reduced.is_freely_reduced()
    assert reduced.codes() == _naive_reduce(w.codes())


@settings(max_examples=150, deadline=None)
@given(length=st.integers(min_value=0, max_value=30), seed=st.integers(min_value=0, max_value=2 ** 32))
def test_word_times_inverse_reduces_to_empty(length, seed):
    w = _with_cancellations(seed, length) if length else Word()
    assert free_reduce(w * invert(w)) == Word()
    assert free_reduce(invert(w) * w) == Word()


@settings(max_examples=150, deadline=None)
@given(lengths=st.tuples(st.integers(min_value=1, max_value=12), st.integers(min_value=1, max_value=12)),
       seed=st.integers(min_value=0, max_value=2 ** 32))
def test_swapped_commutators_are_mutual_inverses(lengths, seed):
    rng = random.Random(seed)
    a = random_word(GENS, lengths[0], rng)
    b = random_word(GENS, lengths[1], rng)
    assert free_reduce(commutator(a, b) * commutator(b, a)) == Word()
    assert commutator(b, a) == free_reduce(invert(commutator(a, b)))


def test_single_generator_random_word_is_uniform():
    gens = make_generators(["a"])
    rng = random.Random(2024)
    counts = Counter(random_word(gens, 1, rng).codes()[0] for _ in range(10_000))
    assert set(counts) == {1, -1}
    expected = 10_000 / 2
    chi_square = sum((counts[c] - expected) ** 2 / expected for c in (1, -1))
    # 1 grau de liberdade, p = 0.001
    assert chi_square < 10.83
