"""Brute-force ground truth: exhaustive stable-matching enumeration.

The search assigns every man an acceptable partner or leaves him single,
prunes assignments that already contain a certain blocking pair, and
keeps exactly the leaves with no blocking pair at all.  Pairs that rank
each other first are fixed up front, so instances padded with many
mutually-first dummy pairs stay cheap; the size bound applies to the men
left over after that fixing.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from . import gs
from .instance import Instance, Matching

DEFAULT_MAX_MEN = 9


class TooLarge(ValueError):
    """The instance is beyond the factorial-time search bound."""


@dataclass(frozen=True)
class StableSet:
    """Every stable matching of an instance plus the best balance among them."""

    matchings: tuple[Matching, ...]
    bal_opt: int | None


class OracleDecision(NamedTuple):
    answer: bool
    t: int
    witness: Matching | None


def _forced_pairs(idx: gs._Indexed) -> tuple[list[tuple[int, int]], list[bool], list[bool]]:
    """Fix pairs that rank each other first; they are in every stable matching."""
    m_alive = [True] * len(idx.men)
    w_alive = [True] * len(idx.women)
    forced: list[tuple[int, int]] = []
    changed = True
    while changed:
        changed = False
        for m in range(len(idx.men)):
            if not m_alive[m]:
                continue
            top_w = next((w for w in idx.m_order[m] if w_alive[w]), None)
            if top_w is None:
                continue
            top_m = next((m2 for m2 in idx.w_order[top_w] if m_alive[m2]), None)
            if top_m == m:
                forced.append((m, top_w))
                m_alive[m] = False
                w_alive[top_w] = False
                changed = True
    return forced, m_alive, w_alive


def enumerate_stable(inst: Instance, limit: int = DEFAULT_MAX_MEN) -> StableSet:
    """All stable matchings, in a deterministic order, with the minimum balance.

    Raises ``TooLarge`` when more than ``limit`` men remain after fixing the
    mutually-first pairs.
    """
    idx = gs._Indexed(inst)
    forced, m_alive, w_alive = _forced_pairs(idx)
    free_men = [m for m in range(len(idx.men)) if m_alive[m]]
    if len(free_men) > limit:
        raise TooLarge(f"{len(free_men)} men to search exceeds the bound {limit}")

    m_rank = idx.m_rank
    w_rank = idx.w_rank
    # Candidate partners among surviving women, best first.
    options = {m: [w for w in idx.m_order[m] if w_alive[w]] for m in free_men}
    # Women whose final fate is sealed once a given man is decided.
    last_acceptor: dict[int, list[int]] = {m: [] for m in free_men}
    pos_of = {m: i for i, m in enumerate(free_men)}
    for w in range(len(idx.women)):
        if not w_alive[w]:
            continue
        acceptors = [m for m in idx.w_order[w] if m_alive[m]]
        if acceptors:
            last = max(acceptors, key=pos_of.__getitem__)
            last_acceptor[last].append(w)

    partner_of_man: dict[int, int] = {}
    partner_of_woman: dict[int, int] = {}
    found: list[tuple[tuple[int, ...], Matching]] = []

    def sealed_block(i: int) -> bool:
        # A woman none of whose acceptors comes later stays unmatched for good;
        # any decided acceptor who would rather have her certifies a blocking pair.
        for w in last_acceptor[free_men[i]]:
            if w in partner_of_woman:
                continue
            for m2 in idx.w_order[w]:
                if not m_alive[m2]:
                    continue
                p2 = partner_of_man.get(m2, -1)
                if p2 < 0 or m_rank[m2][w] < m_rank[m2][p2]:
                    return True
        return False

    def pair_blocked(m: int, w: int) -> bool:
        # Assigning (m, w): look for definite blocks against already-decided people.
        rank_m = m_rank[m]
        for w2 in options[m]:
            if rank_m[w2] >= rank_m[w]:
                break
            held = partner_of_woman.get(w2)
            if held is not None and w_rank[w2][m] < w_rank[w2][held]:
                return True
        for m2 in idx.w_order[w]:
            if w_rank[w][m2] >= w_rank[w][m]:
                break
            if not m_alive[m2] or m2 not in partner_of_man:
                continue
            p2 = partner_of_man[m2]
            if p2 < 0 or m_rank[m2][w] < m_rank[m2][p2]:
                return True
        return False

    def single_blocked(m: int) -> bool:
        # A decided-single man blocks with any woman already held by a worse man.
        for w2 in options[m]:
            held = partner_of_woman.get(w2)
            if held is not None and w_rank[w2][m] < w_rank[w2][held]:
                return True
        return False

    def is_stable_leaf() -> bool:
        for m in free_men:
            rank_m = m_rank[m]
            p = partner_of_man[m]
            bound = rank_m[p] if p >= 0 else None
            for w in options[m]:
                if bound is not None and rank_m[w] >= bound:
                    break
                held = partner_of_woman.get(w)
                if held is None or w_rank[w][m] < w_rank[w][held]:
                    return False
        return True

    def descend(i: int) -> None:
        if i == len(free_men):
            if is_stable_leaf():
                key = tuple(partner_of_man[m] for m in free_men)
                pairs = list(forced) + [(m, w) for m, w in partner_of_man.items() if w >= 0]
                found.append((key, Matching.of((idx.men[m], idx.women[w]) for m, w in pairs)))
            return
        m = free_men[i]
        for w in options[m]:
            if w in partner_of_woman:
                continue
            if pair_blocked(m, w):
                continue
            partner_of_man[m] = w
            partner_of_woman[w] = m
            if not sealed_block(i):
                descend(i + 1)
            del partner_of_man[m]
            del partner_of_woman[w]
        if not single_blocked(m):
            partner_of_man[m] = -1
            if not sealed_block(i):
                descend(i + 1)
            del partner_of_man[m]

    descend(0)
    found.sort(key=lambda item: item[0])
    matchings = tuple(mu for _, mu in found)
    bal_opt = min(
        (gs.objectives(inst, mu, idx).balance for mu in matchings), default=None
    )
    return StableSet(matchings, bal_opt)


def _decide(inst: Instance, k: int, above: str, limit: int) -> OracleDecision:
    opt = gs.optima(inst)
    guarantee = min(opt.o_m, opt.o_w) if above == "min" else max(opt.o_m, opt.o_w)
    stable = enumerate_stable(inst, limit)
    answer = stable.bal_opt is not None and stable.bal_opt <= k
    witness = None
    if answer:
        for mu in stable.matchings:
            if gs.objectives(inst, mu).balance == stable.bal_opt:
                witness = mu
                break
    return OracleDecision(answer, k - guarantee, witness)


def decide_above_min(inst: Instance, k: int, limit: int = DEFAULT_MAX_MEN) -> OracleDecision:
    """Exhaustively decide whether some stable matching has balance at most k.

    The reported parameter is ``k`` minus the smaller of the two optimal
    side costs.
    """
    return _decide(inst, k, "min", limit)


def decide_above_max(inst: Instance, k: int, limit: int = DEFAULT_MAX_MEN) -> OracleDecision:
    """Same question, parameterized above the larger of the two optima."""
    return _decide(inst, k, "max", limit)
