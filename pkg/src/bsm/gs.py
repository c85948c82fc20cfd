"""Deferred acceptance, stability checking and objective functions."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .instance import Instance, Matching, Person


class InvalidMatching(ValueError):
    """A matching uses unknown people, repeats a person, or pairs non-acceptors."""


@dataclass(frozen=True)
class Objectives:
    """Raw cost sums of a matching.

    ``men_cost`` and ``women_cost`` add each matched person's rank of their
    partner; unmatched people contribute nothing.  ``balance`` is the worse
    of the two sums, ``egalitarian`` their total, ``sex_equal`` the signed
    difference men minus women.
    """

    men_cost: int
    women_cost: int
    balance: int
    egalitarian: int
    sex_equal: int

    @staticmethod
    def from_costs(men_cost: int, women_cost: int) -> "Objectives":
        return Objectives(
            men_cost,
            women_cost,
            max(men_cost, women_cost),
            men_cost + women_cost,
            men_cost - women_cost,
        )


@dataclass(frozen=True)
class Optima:
    """The two extreme stable matchings and each side's best attainable cost."""

    mu_m: Matching
    mu_w: Matching
    o_m: int
    o_w: int


class _Indexed:
    """Integer-indexed view of an instance for the inner algorithm loops."""

    __slots__ = ("inst", "men", "women", "man_index", "woman_index",
                 "m_rank", "w_rank", "m_order", "w_order")

    def __init__(self, inst: Instance):
        self.inst = inst
        self.men = inst.men
        self.women = inst.women
        self.man_index = {p: i for i, p in enumerate(inst.men)}
        self.woman_index = {p: i for i, p in enumerate(inst.women)}
        ranks = inst.prefs.ranks
        self.m_rank: list[dict[int, int]] = []
        self.m_order: list[list[int]] = []
        for m in inst.men:
            table = {self.woman_index[w]: r for w, r in ranks[m].items()}
            self.m_rank.append(table)
            self.m_order.append(sorted(table, key=table.get))
        self.w_rank: list[dict[int, int]] = []
        self.w_order: list[list[int]] = []
        for w in inst.women:
            table = {self.man_index[m]: r for m, r in ranks[w].items()}
            self.w_rank.append(table)
            self.w_order.append(sorted(table, key=table.get))

    def matching_from_arrays(self, partner_of_man: list[int]) -> Matching:
        return Matching.of(
            (self.men[m], self.women[w])
            for m, w in enumerate(partner_of_man)
            if w >= 0
        )

    def arrays_from_matching(self, mu: Matching) -> tuple[list[int], list[int]]:
        man_to = [-1] * len(self.men)
        woman_to = [-1] * len(self.women)
        for man, woman in mu.pairs:
            man_to[self.man_index[man]] = self.woman_index[woman]
            woman_to[self.woman_index[woman]] = self.man_index[man]
        return man_to, woman_to


def _deferred_acceptance(order, responder_rank, n_resp, queue=None) -> list[int]:
    """Proposer-optimal matching; returns each proposer's partner index or -1.

    ``order[p]`` lists responder indices from best to worst, ``responder_rank[r]``
    maps proposer index to rank value.  ``queue`` overrides the processing
    order; the result is independent of it.
    """
    n_prop = len(order)
    next_choice = [0] * n_prop
    holds = [-1] * n_resp
    matched = [-1] * n_prop
    pending = deque(range(n_prop) if queue is None else queue)
    while pending:
        p = pending.popleft()
        choices = order[p]
        while next_choice[p] < len(choices):
            r = choices[next_choice[p]]
            next_choice[p] += 1
            current = holds[r]
            if current < 0:
                holds[r] = p
                matched[p] = r
                break
            rank = responder_rank[r]
            if rank[p] < rank[current]:
                holds[r] = p
                matched[p] = r
                matched[current] = -1
                pending.append(current)
                break
    return matched


def man_optimal(inst: Instance, _idx: _Indexed | None = None) -> Matching:
    """The stable matching in which every man does as well as he possibly can."""
    idx = _idx or _Indexed(inst)
    matched = _deferred_acceptance(idx.m_order, idx.w_rank, len(idx.women))
    return idx.matching_from_arrays(matched)


def woman_optimal(inst: Instance, _idx: _Indexed | None = None) -> Matching:
    """The stable matching in which every woman does as well as she possibly can."""
    idx = _idx or _Indexed(inst)
    matched = _deferred_acceptance(idx.w_order, idx.m_rank, len(idx.men))
    return Matching.of(
        (idx.men[m], idx.women[w]) for w, m in enumerate(matched) if m >= 0
    )


def validate_matching(inst: Instance, mu: Matching, _idx: _Indexed | None = None) -> None:
    idx = _idx or _Indexed(inst)
    seen_men: set[Person] = set()
    seen_women: set[Person] = set()
    for man, woman in mu.pairs:
        if man not in idx.man_index or woman not in idx.woman_index:
            raise InvalidMatching(f"({man}, {woman}) uses people outside the instance")
        if man in seen_men:
            raise InvalidMatching(f"{man} is matched twice")
        if woman in seen_women:
            raise InvalidMatching(f"{woman} is matched twice")
        seen_men.add(man)
        seen_women.add(woman)
        if woman not in inst.prefs.ranks[man]:
            raise InvalidMatching(f"({man}, {woman}) is not an acceptable pair")


def blocking_pairs(inst: Instance, mu: Matching, _idx: _Indexed | None = None) -> list[tuple[Person, Person]]:
    """All acceptable pairs both of whose members prefer each other to their lot.

    Empty exactly when ``mu`` is stable.  Pairs come out in canonical order:
    men in instance order, each man's partners in rank order.
    """
    idx = _idx or _Indexed(inst)
    validate_matching(inst, mu, idx)
    man_to, woman_to = idx.arrays_from_matching(mu)
    result: list[tuple[Person, Person]] = []
    for m, choices in enumerate(idx.m_order):
        m_rank = idx.m_rank[m]
        partner = man_to[m]
        limit = m_rank[partner] if partner >= 0 else None
        for w in choices:
            if limit is not None and m_rank[w] >= limit:
                break  # rank order: everyone from here on is no better
            held = woman_to[w]
            if held < 0 or idx.w_rank[w][m] < idx.w_rank[w][held]:
                result.append((idx.men[m], idx.women[w]))
    return result


def objectives(inst: Instance, mu: Matching, _idx: _Indexed | None = None) -> Objectives:
    """Exact integer cost sums of ``mu``; stability is not required."""
    idx = _idx or _Indexed(inst)
    validate_matching(inst, mu, idx)
    men_cost = 0
    women_cost = 0
    ranks = inst.prefs.ranks
    for man, woman in mu.pairs:
        men_cost += ranks[man][woman]
        women_cost += ranks[woman][man]
    return Objectives.from_costs(men_cost, women_cost)


def optima(inst: Instance, _idx: _Indexed | None = None) -> Optima:
    """Both extreme stable matchings with their owning side's cost sums."""
    idx = _idx or _Indexed(inst)
    mu_m = man_optimal(inst, idx)
    mu_w = woman_optimal(inst, idx)
    ranks = inst.prefs.ranks
    o_m = sum(ranks[man][woman] for man, woman in mu_m.pairs)
    o_w = sum(ranks[woman][man] for man, woman in mu_w.pairs)
    return Optima(mu_m, mu_w, o_m, o_w)
