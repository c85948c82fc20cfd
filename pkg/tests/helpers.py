"""Shared builders and independent brute-force oracles for the test suite."""

from __future__ import annotations

from itertools import product

from bsm.gs import optima
from bsm.instance import MAN, WOMAN, Instance, Matching, Person, make_instance, parse_instance

SAD_2X2_TEXT = """\
men: m1 m2
women: w1 w2
k: 4
m1: w1 w2
m2: w2 w1
w1: m2 m1
w2: m1 m2
"""


def sad_2x2(k: int | None = 4) -> Instance:
    inst = parse_instance(SAD_2X2_TEXT)
    if k != 4:
        from bsm.instance import with_target
        return with_target(inst, k)
    return inst


def single_pair() -> Instance:
    m, w = Person(MAN, "m1"), Person(WOMAN, "w1")
    return make_instance((m,), (w,), {m: {w: 1}, w: {m: 1}})


def empty_instance(k: int | None = 0) -> Instance:
    return make_instance((), (), {}, k)


def functional_instance(men_prefs: dict, women_prefs: dict, k: int | None = None) -> Instance:
    """Build from {'m1': {'w1': 2, ...}, ...} name dictionaries."""
    men = tuple(Person(MAN, name) for name in men_prefs)
    women = tuple(Person(WOMAN, name) for name in women_prefs)
    by_name = {p.name: p for p in men + women}
    ranks = {
        by_name[name]: {by_name[pn]: r for pn, r in table.items()}
        for side in (men_prefs, women_prefs)
        for name, table in side.items()
    }
    return make_instance(men, women, ranks, k)


def sad_rich_instance(rng, max_side: int = 6, tries: int = 400) -> Instance:
    """A random instance whose two extreme stable matchings differ.

    Balanced sides with full lists carry by far the best odds of multiple
    stable matchings, so only those are drawn.
    """
    from bsm.generate import random_instance

    for _ in range(tries):
        n = rng.randint(3, max_side)
        inst = random_instance(rng, n, n, density=1.0)
        opt = optima(inst)
        if opt.mu_m != opt.mu_w:
            return inst
    raise RuntimeError("no instance with sad people found")


def naive_stable(inst: Instance) -> set[Matching]:
    """Every stable matching, by filtering all injective partial assignments.

    Deliberately unoptimized and independent of the oracle module.
    """
    ranks = inst.prefs.ranks
    men = list(inst.men)
    results: set[Matching] = set()

    def blocked(assign: dict) -> bool:
        inverse = {w: m for m, w in assign.items() if w is not None}
        for m in men:
            for w, r in ranks[m].items():
                if assign.get(m) == w:
                    continue
                m_wants = assign.get(m) is None or r < ranks[m][assign[m]]
                held = inverse.get(w)
                w_wants = held is None or ranks[w][m] < ranks[w][held]
                if m_wants and w_wants:
                    return True
        return False

    def options(m):
        return [None] + list(ranks[m])

    for combo in product(*(options(m) for m in men)):
        taken = [w for w in combo if w is not None]
        if len(set(taken)) != len(taken):
            continue
        assign = dict(zip(men, combo))
        if not blocked(assign):
            results.add(Matching.of((m, w) for m, w in assign.items() if w is not None))
    return results


def naive_certificates(inst: Instance, m_prime, r: int) -> set[tuple]:
    """All assignments of the given men to strictly worse women with total
    rank increase at most r, as frozensets of pairs."""
    ranks = inst.prefs.ranks
    opt = optima(inst)
    per_man = []
    for m in m_prime:
        anchor = ranks[m][opt.mu_m.by_man[m]]
        per_man.append([(w, rank - anchor) for w, rank in ranks[m].items() if rank > anchor])
    out = set()
    for combo in product(*per_man):
        if sum(offset for _, offset in combo) <= r:
            out.add(frozenset((m, w) for m, (w, _) in zip(m_prime, combo)))
    return out
