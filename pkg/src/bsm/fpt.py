"""Single-exponential decision procedure for the above-minimum balance question.

After kernelization the search space is tiny: pick the subset of sad men
that will be moved off their man-optimal partners, enumerate for each of
them a strictly worse partner under a shared rank-increase budget
``r = k - O_M``, assemble the implied matching and keep the first one
that is stable with balance at most k.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from . import gs
from .instance import Instance, Matching, Person
from .kernel import OUTCOME_KERNEL, TRIVIAL_YES, KernelResult, kernelize


@dataclass(frozen=True)
class BranchCertificate:
    """One candidate reassignment: each selected man paired to a worse woman.

    ``cost`` is the total rank increase over the man-optimal matching.
    """

    pairs: tuple[tuple[Person, Person], ...]
    cost: int


@dataclass(frozen=True)
class SolveStats:
    subsets_tried: int
    branch_nodes: int
    max_branch_nodes: int  # largest node count spent on a single subset


@dataclass(frozen=True)
class SolveResult:
    answer: bool
    witness: Matching | None
    t: int
    r: int | None  # budget on the kernel; None when the kernel decided alone
    stats: SolveStats
    kernel: KernelResult


class _Context:
    """Precomputed kernel facts shared across all subsets."""

    def __init__(self, inst: Instance, k: int):
        self.inst = inst
        self.k = k
        self.idx = gs._Indexed(inst)
        self.optima = gs.optima(inst, self.idx)
        by_man_m = self.optima.mu_m.by_man
        by_man_w = self.optima.mu_w.by_man
        self.sad_men = tuple(
            m for m in inst.men if by_man_m.get(m) != by_man_w.get(m)
        )
        self.happy_pairs = tuple(
            (m, by_man_m[m])
            for m in inst.men
            if m in by_man_m and by_man_m[m] == by_man_w.get(m)
        )
        # Women strictly worse than a man's optimal partner, best first.
        ranks = inst.prefs.ranks
        self.worse: dict[Person, list[tuple[int, Person]]] = {}
        for m in self.sad_men:
            anchor = ranks[m][by_man_m[m]]
            cands = sorted(
                (r - anchor, w) for w, r in ranks[m].items() if r > anchor
            )
            self.worse[m] = cands


def _iter_certificates(ctx: _Context, m_prime, r: int, counter: list[int]):
    """Yield every assignment of the selected men with total offset at most r."""
    chosen: list[tuple[Person, Person]] = []

    def descend(i: int, remaining: int):
        counter[0] += 1
        if i == len(m_prime):
            yield BranchCertificate(tuple(chosen), r - remaining)
            return
        man = m_prime[i]
        for offset, woman in ctx.worse[man][:r]:
            if offset > remaining:
                break
            chosen.append((man, woman))
            yield from descend(i + 1, remaining - offset)
            chosen.pop()

    if r >= 0:
        yield from descend(0, r)


def enumerate_certificates(
    inst: Instance, m_prime, r: int, *, _ctx: _Context | None = None
) -> list[BranchCertificate]:
    """All ways to move every listed man to a strictly worse woman within budget r.

    Candidates per man are his r most-preferred strictly-worse women; the
    recursion abandons a branch as soon as the budget would go negative.
    """
    ctx = _ctx or _Context(inst, inst.target_k if inst.target_k is not None else 0)
    m_prime = tuple(m_prime)
    for m in m_prime:
        if m not in ctx.worse:
            anchor = ctx.optima.mu_m.by_man.get(m)
            if anchor is None:
                raise ValueError(f"{m} is unmatched in the man-optimal matching")
            rank = inst.prefs.ranks[m][anchor]
            ctx.worse[m] = sorted(
                (r2 - rank, w) for w, r2 in inst.prefs.ranks[m].items() if r2 > rank
            )
    return list(_iter_certificates(ctx, m_prime, r, [0]))


def _assemble(ctx: _Context, certificate: BranchCertificate, m_prime_set) -> Matching | None:
    pairs = list(certificate.pairs)
    by_man_m = ctx.optima.mu_m.by_man
    for m in ctx.sad_men:
        if m not in m_prime_set:
            pairs.append((m, by_man_m[m]))
    pairs.extend(ctx.happy_pairs)
    women = set()
    for _, w in pairs:
        if w in women:
            return None  # two men claim the same woman
        women.add(w)
    mu = Matching.of(pairs)
    if gs.objectives(ctx.inst, mu, ctx.idx).balance > ctx.k:
        return None
    if gs.blocking_pairs(ctx.inst, mu, ctx.idx):
        return None
    return mu


def assemble_and_check(
    inst: Instance,
    certificate: BranchCertificate,
    m_prime,
    *,
    k: int | None = None,
    _ctx: _Context | None = None,
) -> Matching | None:
    """Complete a certificate into a full matching and accept it only if it
    is injective, stable and has balance at most k.

    Unselected sad men keep their man-optimal partners and every happy pair
    is included; k defaults to the instance's stored target.
    """
    if k is None:
        k = inst.target_k
    if k is None:
        raise ValueError("no target k given and the instance stores none")
    ctx = _ctx or _Context(inst, k)
    return _assemble(ctx, certificate, frozenset(m_prime))


def solve_above_min(inst: Instance, k: int) -> SolveResult:
    """Decide whether some stable matching of ``inst`` has balance at most k.

    Kernelizes first; if that does not settle the answer, tries every
    subset of the kernel's sad men in increasing cardinality and accepts on
    the first assembled stable matching within target.  The witness, when
    present, is a stable matching of the *input* instance with balance at
    most k.
    """
    kres = kernelize(inst, k)
    if kres.outcome != OUTCOME_KERNEL:
        answer = kres.outcome == TRIVIAL_YES
        return SolveResult(
            answer, kres.witness, kres.t_input, None, SolveStats(0, 0, 0), kres
        )
    ctx = _Context(kres.kernel, kres.k)
    r = kres.k - ctx.optima.o_m
    subsets = 0
    nodes_total = 0
    nodes_max = 0
    if r >= 0:
        for size in range(len(ctx.sad_men) + 1):
            for m_prime in combinations(ctx.sad_men, size):
                subsets += 1
                counter = [0]
                hit = None
                m_prime_set = frozenset(m_prime)
                for certificate in _iter_certificates(ctx, m_prime, r, counter):
                    hit = _assemble(ctx, certificate, m_prime_set)
                    if hit is not None:
                        break
                nodes_total += counter[0]
                nodes_max = max(nodes_max, counter[0])
                if hit is not None:
                    stats = SolveStats(subsets, nodes_total, nodes_max)
                    return SolveResult(
                        True, kres.lift(hit), kres.t_input, r, stats, kres
                    )
    stats = SolveStats(subsets, nodes_total, nodes_max)
    return SolveResult(False, None, kres.t_input, r, stats, kres)
