import itertools
import random

import pytest

from models import AttackVerdict, SchemeParams, Verdict
from services.analysis import (
    AdversarySimulator,
    AttackConfig,
    build_decoy_pool,
    decoy_false_positive_rate,
    message_texts,
)
from services.dealer import EncodingConfig, SchemeDealer, embed_signature, setup_scheme
from services.engine_polycyclic import dihedral
from services.word_problem import EngineBudget


def _encode(scheme, bits, seed=0, **overrides):
    config = EncodingConfig(seed=seed, parallel_tasks=1, **overrides)
    return SchemeDealer(scheme.presentation, config, scheme.scheme_id).encode_message(bits)


def test_partial_coalition_is_sound(scheme_4_3):
    scheme, shares, _ = scheme_4_3
    bits = "1101001110"
    msg = _encode(scheme, bits, seed=6)
    simulator = AdversarySimulator()
    for pair in itertools.combinations(shares, 2):
        report = simulator.coalition_attack(pair, msg)
        assert not report.complete
        assert len(report.missing_indices) == 1
        for bit, word in zip(bits, report.words):
            assert word.verdict is not AttackVerdict.PROVED_NON_IDENTITY
            if word.verdict is AttackVerdict.PROVED_IDENTITY:
                assert bit == "1"
                assert word.g_prime is Verdict.IDENTITY
        assert 0.0 <= report.proved_identity_rate <= 1.0


def test_full_coalition_behaves_as_decode(scheme_4_3):
    scheme, shares, _ = scheme_4_3
    bits = "10110"
    msg = _encode(scheme, bits, seed=8)
    report = AdversarySimulator().coalition_attack(shares[:3], msg)
    assert report.complete
    expected = [AttackVerdict.PROVED_IDENTITY if b == "1" else AttackVerdict.PROVED_NON_IDENTITY for b in bits]
    assert [w.verdict for w in report.words] == expected


def _soundness_grid(max_n, messages, length):
    rng = random.Random(99)
    simulator = AdversarySimulator()
    violations = 0
    for n in range(2, max_n + 1):
        for t in range(2, n + 1):
            scheme, shares, _ = setup_scheme(n, t, "coxeter", rng.randrange(2 ** 32))
            for _ in range(messages):
                bits = "".join(rng.choice("01") for _ in range(length))
                msg = _encode(scheme, bits, seed=rng.randrange(2 ** 32))
                for coalition in itertools.combinations(shares, t - 1):
                    report = simulator.coalition_attack(coalition, msg)
                    violations += sum(
                        1 for bit, w in zip(bits, report.words)
                        if w.verdict is AttackVerdict.PROVED_IDENTITY and bit != "1"
                    )
    return violations


def test_quotient_soundness_grid():
    assert _soundness_grid(4, 1, 6) == 0


@pytest.mark.slow
def test_quotient_soundness_grid_full():
    assert _soundness_grid(5, 20, 32) == 0


@pytest.fixture
def small_pool_setup():
    scheme, shares, _ = setup_scheme(3, 2, "coxeter", 31)
    signature = "10110011"
    bits = embed_signature("1", signature, random.Random(5))
    msg = _encode(scheme, bits, seed=2, commutator_count=1, conjugator_length=1)
    return scheme, msg, signature


def test_pool_attack_finds_true_presentation(small_pool_setup):
    scheme, msg, signature = small_pool_setup
    pool = build_decoy_pool("coxeter", scheme.params, 4, seed=77)
    pool.insert(2, ("true", scheme.presentation))
    simulator = AdversarySimulator(AttackConfig(pool_budget=EngineBudget.uniform(5000)))
    candidates = simulator.pool_attack(pool, message_texts(msg), signature)
    assert len(candidates) == 5
    true = next(c for c in candidates if c.label == "true")
    assert true.matched
    assert true.undecided == 0
    assert candidates[0].matched
    rate = decoy_false_positive_rate(candidates, "true")
    assert 0.0 <= rate <= 1.0


def test_pool_attack_empty_pool(small_pool_setup):
    _, msg, signature = small_pool_setup
    assert AdversarySimulator().pool_attack([], message_texts(msg), signature) == []


def test_pool_attack_marks_incompatible_candidates(small_pool_setup):
    _, msg, signature = small_pool_setup
    foreign = dihedral(5).presentation.to_group_presentation()
    candidates = AdversarySimulator().pool_attack([("dihedral", foreign)], message_texts(msg), signature)
    assert not candidates[0].compatible
    assert not candidates[0].matched
    assert decoy_false_positive_rate(candidates) == 0.0


def test_decoy_pool_is_deterministic():
    params = SchemeParams(4, 3)
    first = build_decoy_pool("coxeter", params, 3, seed=1)
    second = build_decoy_pool("coxeter", params, 3, seed=1)
    assert first == second
    assert [label for label, _ in first] == ["decoy-0000", "decoy-0001", "decoy-0002"]
    assert all(p.m == 6 for _, p in first)
