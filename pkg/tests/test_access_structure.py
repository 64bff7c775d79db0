import dataclasses
import itertools

import pytest

from models import SchemeParams
from services.access_structure import (
    build_access_structure,
    check_threshold_property,
    enumerate_subsets,
    make_shares,
    reconstruct,
)
from services.errors import AccessStructureError, InconsistentSharesError, TamperError
from services.presentation import Relator, word_from_codes


def test_params_compute_relator_count():
    assert SchemeParams(4, 3).m == 6
    assert SchemeParams(5, 3).m == 10
    assert SchemeParams(3, 3).m == 3


@pytest.mark.parametrize("n,t", [(4, 5), (1, 1), (4, 1)])
def test_params_reject_invalid_threshold(n, t):
    with pytest.raises(AccessStructureError):
        SchemeParams(n, t)


def test_share_sets_match_complement_rule():
    a = build_access_structure(4, 3)
    assert a.subsets == ((1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4))
    assert a.share_index_sets[0] == frozenset({4, 5, 6})
    assert a.holders_of(1) == (3, 4)


def test_enumerate_subsets_bounds():
    assert enumerate_subsets(3, 0) == [()]
    with pytest.raises(AccessStructureError):
        enumerate_subsets(3, 4)


def test_relator_cap():
    with pytest.raises(AccessStructureError):
        build_access_structure(8, 4, max_relators=10)


def _grid(limit):
    return [(n, t) for n in range(2, limit + 1) for t in range(2, n + 1)]


@pytest.mark.parametrize("n,t", _grid(6))
def test_threshold_property(n, t):
    report = check_threshold_property(build_access_structure(n, t))
    assert report.is_valid, report.issues


@pytest.mark.slow
@pytest.mark.parametrize("n,t", _grid(8))
def test_threshold_property_exhaustive(n, t):
    assert check_threshold_property(build_access_structure(n, t)).is_valid


def test_full_coalitions_reconstruct_everything(scheme_4_3):
    scheme, shares, _ = scheme_4_3
    for coalition in itertools.combinations(shares, 3):
        rebuilt = reconstruct(coalition)
        assert rebuilt.complete
        assert rebuilt.presentation == scheme.presentation


def test_partial_coalition_misses_exactly_one(scheme_4_3):
    scheme, shares, _ = scheme_4_3
    for pair in itertools.combinations(range(4), 2):
        rebuilt = reconstruct([shares[i] for i in pair])
        expected = scheme.structure.subsets.index(tuple(i + 1 for i in pair)) + 1
        assert not rebuilt.complete
        assert rebuilt.missing_indices == (expected,)
        assert rebuilt.presentation.m == 5


def test_reconstruct_detects_tampering(scheme_4_3):
    scheme, shares, _ = scheme_4_3
    original = shares[1].relators[0]
    forged = Relator(original.index, word_from_codes((1, 2, 1, 2), scheme.presentation.generators))
    if forged.word == original.word:
        forged = Relator(original.index, word_from_codes((1, 3, 1, 3), scheme.presentation.generators))
    tampered = dataclasses.replace(shares[1], relators=(forged,) + shares[1].relators[1:])
    holders = [s for s in shares if original.index in s.relator_indices and s is not shares[1]]
    with pytest.raises(TamperError):
        reconstruct([holders[0], tampered])


def test_reconstruct_rejects_mixed_or_repeated_shares(scheme_4_3, scheme_3_2):
    _, shares, _ = scheme_4_3
    _, other, _ = scheme_3_2
    with pytest.raises(InconsistentSharesError):
        reconstruct([shares[0], shares[0]])
    with pytest.raises(InconsistentSharesError):
        reconstruct([shares[0], other[0]])
    with pytest.raises(InconsistentSharesError):
        reconstruct([])


def test_make_shares_requires_matching_presentation(scheme_4_3):
    scheme, _, _ = scheme_4_3
    with pytest.raises(AccessStructureError):
        make_shares(scheme.presentation, build_access_structure(3, 2), scheme.scheme_id)
