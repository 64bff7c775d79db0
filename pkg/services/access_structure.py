"""
Estrutura combinatória do limiar: subconjuntos A_1..A_m com t-1 elementos
e conjuntos de shares R_1..R_n com r_j em R_i se e somente se i não está em A_j
"""
import itertools
import logging
from dataclasses import dataclass
from math import comb
from typing import FrozenSet, List, Sequence, Tuple

from models import SchemeParams, Share, ThresholdReport
from .errors import AccessStructureError, InconsistentSharesError, TamperError
from .presentation import GroupPresentation, Relator

logger = logging.getLogger(__name__)

DEFAULT_MAX_RELATORS = 10 ** 6


@dataclass(frozen=True)
class AccessStructure:
    params: SchemeParams
    subsets: Tuple[Tuple[int, ...], ...]
    share_index_sets: Tuple[FrozenSet[int], ...]

    def holders_of(self, j: int) -> Tuple[int, ...]:
        """Participantes que recebem r_j"""
        return tuple(i for i in range(1, self.params.n + 1) if j in self.share_index_sets[i - 1])

    def union_of(self, coalition: Sequence[int]) -> FrozenSet[int]:
        held: set = set()
        for i in coalition:
            held |= self.share_index_sets[i - 1]
        return frozenset(held)


@dataclass(frozen=True)
class Reconstruction:
    presentation: GroupPresentation
    complete: bool
    missing_indices: Tuple[int, ...]
    participants: Tuple[int, ...]
    params: SchemeParams
    scheme_id: str


def enumerate_subsets(n: int, size: int) -> List[Tuple[int, ...]]:
    """Todos os subconjuntos de {1..n} com `size` elementos, em ordem lexicográfica"""
    if size < 0 or size > n:
        raise AccessStructureError(f"Tamanho de subconjunto {size} fora de 0..{n}")
    return list(itertools.combinations(range(1, n + 1), size))


def build_access_structure(n: int, t: int, max_relators: int = DEFAULT_MAX_RELATORS) -> AccessStructure:
    params = SchemeParams(n, t)
    if params.m > max_relators:
        raise AccessStructureError(
            f"m = C({n},{t - 1}) = {params.m} excede o limite configurado de {max_relators} relatores"
        )
    subsets = enumerate_subsets(n, t - 1)
    share_sets = []
    for i in range(1, n + 1):
        share_sets.append(frozenset(j for j, a_j in enumerate(subsets, start=1) if i not in a_j))
    logger.info(f"Estrutura de acesso construída: n={n}, t={t}, m={params.m}")
    return AccessStructure(params, tuple(subsets), tuple(share_sets))


def make_shares(p: GroupPresentation, a: AccessStructure, scheme_id: str) -> List[Share]:
    if p.m != a.params.m or not p.is_contiguous():
        raise AccessStructureError(
            f"Apresentação tem {p.m} relatores indexados {p.relator_indices}; esperado 1..{a.params.m}"
        )
    shares = []
    for i, index_set in enumerate(a.share_index_sets, start=1):
        held = tuple(r for r in p.relators if r.index in index_set)
        shares.append(Share(
            scheme_id=scheme_id,
            participant_index=i,
            params=a.params,
            generators=p.generators,
            public_facts=p.public_facts,
            relators=held,
        ))
    return shares


def reconstruct(shares: Sequence[Share]) -> Reconstruction:
    """
    União dos relatores pelo índice global
    Coalizões abaixo do limiar retornam complete=False com os índices ausentes
    """
    if not shares:
        raise InconsistentSharesError("Nenhuma share fornecida")
    first = shares[0]
    seen_participants = set()
    union = {}
    for share in shares:
        if share.scheme_id != first.scheme_id:
            raise InconsistentSharesError(
                f"Shares de esquemas diferentes: {first.scheme_id[:12]}… e {share.scheme_id[:12]}…"
            )
        if share.params != first.params:
            raise InconsistentSharesError("Shares com parâmetros (n, t, m) diferentes")
        if share.generators != first.generators or share.public_facts != first.public_facts:
            raise InconsistentSharesError("Shares com geradores ou fatos públicos diferentes")
        if share.participant_index in seen_participants:
            raise InconsistentSharesError(f"Participante {share.participant_index} repetido")
        if not 1 <= share.participant_index <= first.params.n:
            raise InconsistentSharesError(f"Participante {share.participant_index} fora de 1..{first.params.n}")
        seen_participants.add(share.participant_index)
        for relator in share.relators:
            if not 1 <= relator.index <= first.params.m:
                raise TamperError(f"Relator {relator.index} fora de 1..{first.params.m}")
            known = union.get(relator.index)
            if known is not None and known.word != relator.word:
                raise TamperError(f"Relator {relator.index} difere entre shares")
            union[relator.index] = relator

    missing = tuple(j for j in range(1, first.params.m + 1) if j not in union)
    complete = not missing
    participants = tuple(sorted(seen_participants))
    if len(participants) >= first.params.t and not complete:
        logger.warning(f"{len(participants)} participantes mas {len(missing)} relatores ausentes")
    presentation = GroupPresentation(
        first.generators,
        tuple(union[j] for j in sorted(union)),
        first.family,
        first.public_facts,
    )
    return Reconstruction(presentation, complete, missing, participants, first.params, first.scheme_id)


def check_threshold_property(a: AccessStructure) -> ThresholdReport:
    """
    Verificação exaustiva: toda coalizão de t cobre 1..m e toda coalizão de t-1
    perde exatamente um relator, o j com A_j igual à coalizão
    """
    n, t, m = a.params.n, a.params.t, a.params.m
    everything = frozenset(range(1, m + 1))
    issues: List[str] = []
    witnesses: List[Tuple[int, ...]] = []

    expected_size = comb(n - 1, t - 1)
    for i, index_set in enumerate(a.share_index_sets, start=1):
        if len(index_set) != expected_size:
            issues.append(f"|R_{i}| = {len(index_set)}, esperado {expected_size}")
            witnesses.append((i,))

    full_checked = 0
    for coalition in itertools.combinations(range(1, n + 1), t):
        full_checked += 1
        if a.union_of(coalition) != everything:
            issues.append(f"Coalizão {coalition} não cobre todos os relatores")
            witnesses.append(coalition)

    partial_checked = 0
    position = {subset: j for j, subset in enumerate(a.subsets, start=1)}
    for coalition in itertools.combinations(range(1, n + 1), t - 1):
        partial_checked += 1
        missing = everything - a.union_of(coalition)
        if not missing:
            issues.append(f"Coalizão {coalition} de t-1 cobre todos os relatores")
            witnesses.append(coalition)
        elif missing != {position.get(coalition)}:
            issues.append(f"Coalizão {coalition} perde {sorted(missing)}, esperado exatamente [{position.get(coalition)}]")
            witnesses.append(coalition)

    metrics = {
        "n": n,
        "t": t,
        "m": m,
        "full_coalitions_checked": full_checked,
        "partial_coalitions_checked": partial_checked,
    }
    if issues:
        logger.warning(f"Propriedade de limiar falhou em {len(witnesses)} coalizões")
    return ThresholdReport(is_valid=not issues, issues=issues, witnesses=witnesses, metrics=metrics)
