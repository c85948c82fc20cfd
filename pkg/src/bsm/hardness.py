"""Generator and verifier for the clique-to-balanced-marriage reduction.

Given a graph and a clique size k, ``reduce_clique`` emits an instance in
which some stable matching has balance at most the computed target exactly
when the graph has a k-clique, and whose above-maximum parameter depends
on k alone.  ``structured_enumerate`` checks every matching of the special
shape the construction allows (a vertex subset chooses which vertex pairs
swap partners, an edge subset chooses which edge pairs swap) against the
generic stability test, which makes the equivalence verifiable at desk
scale.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import gs
from .instance import (
    MAN,
    WOMAN,
    Instance,
    Matching,
    Person,
    make_instance,
)
from .oracle import StableSet, TooLarge

STRUCTURED_CANDIDATE_LIMIT = 10**6
CLIQUE_VERTEX_LIMIT = 25


class NotAClique(ValueError):
    """The supplied vertex set is not a clique of the requested size."""


@dataclass(frozen=True)
class Graph:
    """A simple undirected graph with fixed vertex and edge orders."""

    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]

    def __post_init__(self):
        seen = set()
        for v in self.vertices:
            if v in seen:
                raise ValueError(f"duplicate vertex {v!r}")
            seen.add(v)
        index = {v: i for i, v in enumerate(self.vertices)}
        known = set()
        for u, v in self.edges:
            if u not in index or v not in index:
                raise ValueError(f"edge ({u}, {v}) uses an unknown vertex")
            if u == v:
                raise ValueError(f"loop at {u!r}")
            if index[u] > index[v]:
                raise ValueError(f"edge ({u}, {v}) must list the earlier vertex first")
            if (u, v) in known:
                raise ValueError(f"duplicate edge ({u}, {v})")
            known.add((u, v))

    @staticmethod
    def build(vertices, edges) -> "Graph":
        """Normalize edge endpoint order by vertex position and build."""
        vertices = tuple(vertices)
        index = {v: i for i, v in enumerate(vertices)}
        normalized = []
        for u, v in edges:
            if u in index and v in index and index[u] > index[v]:
                u, v = v, u
            normalized.append((u, v))
        return Graph(vertices, tuple(normalized))

    def degree(self, v: str) -> int:
        return sum(1 for e in self.edges if v in e)

    def has_edge(self, u: str, v: str) -> bool:
        return (u, v) in self.edges or (v, u) in self.edges


def parse_graph(text: str) -> Graph:
    """Read a graph from 'u v' edge lines; an optional 'vertices:' line
    declares isolated vertices and pins the vertex order."""
    declared: list[str] = []
    edges: list[tuple[str, str]] = []
    order: list[str] = []
    seen: set[str] = set()

    def note(v: str):
        if v not in seen:
            seen.add(v)
            order.append(v)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("vertices:"):
            declared = line.partition(":")[2].split()
            for v in declared:
                note(v)
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'u v'")
        note(parts[0])
        note(parts[1])
        edges.append((parts[0], parts[1]))
    return Graph.build(order, edges)


def serialize_graph(g: Graph) -> str:
    lines = ["vertices: " + " ".join(g.vertices)]
    lines.extend(f"{u} {v}" for u, v in g.edges)
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ReductionArtifact:
    """The generated instance plus the bookkeeping that ties it to the graph."""

    inst: Instance
    k_hat: int
    delta: int
    t: int
    name_maps: dict
    fallback: bool
    graph: Graph
    k: int


def _delta(n_v: int, n_e: int, k: int) -> int:
    return 2 * (n_v + n_e + n_v * n_e + n_v * n_e * n_e) - k * (
        4 + 4 * k + 2 * n_e + (k - 1) * n_v * n_e
    )


def clique_bruteforce(g: Graph, k: int) -> tuple[str, ...] | None:
    """First k-clique in lexicographic vertex order, or None."""
    if len(g.vertices) > CLIQUE_VERTEX_LIMIT:
        raise TooLarge(f"{len(g.vertices)} vertices exceeds the bound {CLIQUE_VERTEX_LIMIT}")
    if k < 1 or k > len(g.vertices):
        return None
    adjacent = {v: set() for v in g.vertices}
    for u, v in g.edges:
        adjacent[u].add(v)
        adjacent[v].add(u)
    for group in combinations(g.vertices, k):
        if all(b in adjacent[a] for a, b in combinations(group, 2)):
            return group
    return None


def _trivial_yes_instance() -> Instance:
    return make_instance((), (), {}, 0)


def _trivial_no_instance() -> Instance:
    m = Person(MAN, "m")
    w = Person(WOMAN, "w")
    return make_instance((m,), (w,), {m: {w: 1}, w: {m: 1}}, 0)


def reduce_clique(g: Graph, k: int) -> ReductionArtifact:
    """Build the full reduction, or a trivial equivalent instance when the
    graph is small enough to settle by brute force.

    The fallback fires when the dummy count would be negative or the graph
    has at most k + k(k-1)/2 vertices.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    n_v, n_e = len(g.vertices), len(g.edges)
    delta = _delta(n_v, n_e, k)
    if delta < 0 or n_v <= k + k * (k - 1) // 2:
        clique = clique_bruteforce(g, k)
        inst = _trivial_yes_instance() if clique else _trivial_no_instance()
        t = 0 if clique else -1
        return ReductionArtifact(inst, 0, delta, t, {}, True, g, k)

    V = g.vertices
    E = g.edges
    deg = {v: g.degree(v) for v in V}

    man_v = {(s, v): Person(MAN, f"m{s}_v{i + 1}") for i, v in enumerate(V) for s in (1, 2)}
    woman_v = {(s, v): Person(WOMAN, f"w{s}_v{i + 1}") for i, v in enumerate(V) for s in (1, 2)}
    man_e = {(s, j): Person(MAN, f"m{s}_e{j + 1}") for j in range(n_e) for s in (1, 2)}
    woman_e = {(s, j): Person(WOMAN, f"w{s}_e{j + 1}") for j in range(n_e) for s in (1, 2)}
    man_d = tuple(Person(MAN, f"md{i + 1}") for i in range(delta))
    woman_d = tuple(Person(WOMAN, f"wd{i + 1}") for i in range(delta))
    man_star = Person(MAN, "mstar")
    woman_star = Person(WOMAN, "wstar")

    men = (
        tuple(man_v[(1, v)] for v in V)
        + tuple(man_v[(2, v)] for v in V)
        + tuple(man_e[(1, j)] for j in range(n_e))
        + tuple(man_e[(2, j)] for j in range(n_e))
        + man_d
        + (man_star,)
    )
    women = (
        tuple(woman_v[(1, v)] for v in V)
        + tuple(woman_v[(2, v)] for v in V)
        + tuple(woman_e[(1, j)] for j in range(n_e))
        + tuple(woman_e[(2, j)] for j in range(n_e))
        + woman_d
        + (woman_star,)
    )

    ranks: dict[Person, dict[Person, int]] = {}

    # When delta is small, only the dummies that exist are referenced; the
    # rank values of everyone else stay put, so the tables may have gaps.
    # Vertex men: own partner, the two shared dummies, then the twin's partner.
    for v in V:
        for s in (1, 2):
            table = {woman_v[(s, v)]: 1, woman_v[(3 - s, v)]: 4}
            if delta >= 1:
                table[woman_d[0]] = 2
            if delta >= 2:
                table[woman_d[1]] = 3
            ranks[man_v[(s, v)]] = table

    # Edge men: own partner, both endpoint women of the same tier, twin's partner.
    for j, (u, v) in enumerate(E):
        for s in (1, 2):
            ranks[man_e[(s, j)]] = {
                woman_e[(s, j)]: 1,
                woman_v[(s, u)]: 2,
                woman_v[(s, v)]: 3,
                woman_e[(3 - s, j)]: 4,
            }

    # Low-index dummy men also rank every edge woman and a tail of vertex women.
    n_ve = n_v * n_e
    vertex_women_order = tuple(woman_v[(1, v)] for v in V) + tuple(woman_v[(2, v)] for v in V)
    accepts_dummy = {w: n_e - deg[v] for (s, v), w in woman_v.items()}
    for i, md in enumerate(man_d, start=1):
        table = {woman_d[i - 1]: 1}
        if i <= n_ve:
            for j in range(n_e):
                table[woman_e[(1, j)]] = j + 2
                table[woman_e[(2, j)]] = n_e + j + 2
            tail = [w for w in vertex_women_order if i <= accepts_dummy[w]]
            for pos, w in enumerate(tail, start=1):
                table[w] = 2 * n_e + pos + 1
        ranks[md] = table

    ranks[man_star] = {wd: i for i, wd in enumerate(woman_d, start=1)}
    ranks[man_star][woman_star] = delta + 1

    # Vertex women: the twin first, incident edge men at their edge's global
    # slot, acceptable dummies on the unused slots, own man last.
    for v in V:
        for s in (1, 2):
            w = woman_v[(s, v)]
            table = {man_v[(3 - s, v)]: 1, man_v[(s, v)]: n_e + 2}
            free_slots = []
            for j, e in enumerate(E):
                if v in e:
                    table[man_e[(s, j)]] = j + 2
                else:
                    free_slots.append(j + 2)
            for slot, i in zip(free_slots, range(1, min(n_e - deg[v], delta) + 1)):
                table[man_d[i - 1]] = slot
            ranks[w] = table

    # Edge women: the twin first, every low-index dummy man, own man last.
    for j in range(n_e):
        for s in (1, 2):
            w = woman_e[(s, j)]
            table = {man_e[(3 - s, j)]: 1, man_e[(s, j)]: n_ve + 2}
            for i in range(1, min(n_ve, delta) + 1):
                table[man_d[i - 1]] = i + 1
            ranks[w] = table

    # Dummy women: own dummy, the star man, and (for the first two) all vertex men.
    for i, wd in enumerate(woman_d, start=1):
        table = {man_d[i - 1]: 1, man_star: 2}
        if i <= 2:
            for pos, v in enumerate(V, start=1):
                table[man_v[(1, v)]] = pos + 2
                table[man_v[(2, v)]] = n_v + pos + 2
        ranks[wd] = table

    ranks[woman_star] = {man_star: 1}

    k_hat = len(men) + delta + 6 * (k + k * (k - 1) // 2)
    t = 6 * (k + k * (k - 1) // 2)
    inst = make_instance(men, women, ranks, k_hat)
    name_maps = {
        "vertices": {
            v: {
                "m1": man_v[(1, v)].name,
                "m2": man_v[(2, v)].name,
                "w1": woman_v[(1, v)].name,
                "w2": woman_v[(2, v)].name,
            }
            for v in V
        },
        "edges": {
            f"{u} {v}": {
                "m1": man_e[(1, j)].name,
                "m2": man_e[(2, j)].name,
                "w1": woman_e[(1, j)].name,
                "w2": woman_e[(2, j)].name,
            }
            for j, (u, v) in enumerate(E)
        },
        "star": {"m": man_star.name, "w": woman_star.name},
    }
    return ReductionArtifact(inst, k_hat, delta, t, name_maps, False, g, k)


# --- structure-aware enumeration ---------------------------------------------

def _artifact_people(art: ReductionArtifact):
    g = art.graph
    maps = art.name_maps
    by_name = {p.name: p for p in art.inst.people}
    man_v = {(s, v): by_name[maps["vertices"][v][f"m{s}"]] for v in g.vertices for s in (1, 2)}
    woman_v = {(s, v): by_name[maps["vertices"][v][f"w{s}"]] for v in g.vertices for s in (1, 2)}
    man_e = {(s, j): by_name[maps["edges"][f"{u} {v}"][f"m{s}"]] for j, (u, v) in enumerate(g.edges) for s in (1, 2)}
    woman_e = {(s, j): by_name[maps["edges"][f"{u} {v}"][f"w{s}"]] for j, (u, v) in enumerate(g.edges) for s in (1, 2)}
    named = {p.name for group in (man_v, woman_v, man_e, woman_e) for p in group.values()}
    named.update(maps["star"].values())
    man_star = by_name[maps["star"]["m"]]
    woman_star = by_name[maps["star"]["w"]]
    dummy_men = tuple(p for p in art.inst.men if p.name not in named)
    dummy_women = tuple(p for p in art.inst.women if p.name not in named)
    return man_v, woman_v, man_e, woman_e, dummy_men, dummy_women, man_star, woman_star


def _swap_pairs(people, g: Graph, chosen_vertices, chosen_edges):
    man_v, woman_v, man_e, woman_e, dummy_men, dummy_women, m_star, w_star = people
    pairs = []
    for v in g.vertices:
        for s in (1, 2):
            partner = woman_v[(3 - s, v)] if v in chosen_vertices else woman_v[(s, v)]
            pairs.append((man_v[(s, v)], partner))
    for j in range(len(g.edges)):
        for s in (1, 2):
            partner = woman_e[(3 - s, j)] if j in chosen_edges else woman_e[(s, j)]
            pairs.append((man_e[(s, j)], partner))
    pairs.extend(zip(dummy_men, dummy_women))
    pairs.append((m_star, w_star))
    return pairs


def _swap_matching(art: ReductionArtifact, chosen_vertices, chosen_edges) -> Matching:
    """Candidate matching: chosen vertex pairs and edge pairs swap partners,
    everyone else keeps the identity assignment."""
    people = _artifact_people(art)
    return Matching.of(_swap_pairs(people, art.graph, set(chosen_vertices), set(chosen_edges)))


def witness_matching(art: ReductionArtifact, clique) -> Matching:
    """The stable matching certified by a k-clique: its vertex pairs and all
    edge pairs inside it swap, everything else stays put."""
    if art.fallback:
        raise ValueError("fallback artifacts carry no structured matchings")
    members = tuple(clique)
    if len(set(members)) != art.k:
        raise NotAClique(f"expected {art.k} distinct vertices, got {members!r}")
    for v in members:
        if v not in art.graph.vertices:
            raise NotAClique(f"unknown vertex {v!r}")
    for u, v in combinations(members, 2):
        if not art.graph.has_edge(u, v):
            raise NotAClique(f"missing edge ({u}, {v})")
    chosen = set(members)
    edge_ids = {j for j, (u, v) in enumerate(art.graph.edges) if u in chosen and v in chosen}
    return _swap_matching(art, chosen, edge_ids)


class _CandidateChecker:
    """Vectorized stability and cost evaluation over all swap candidates.

    Every acceptable pair is classified once, from rank numbers alone, by
    when its two members prefer each other to their assigned partners; a
    candidate is then tested against the compiled conditions.  This is an
    exact algebraic restatement of the generic blocking-pair scan.
    """

    def __init__(self, art: ReductionArtifact):
        inst = art.inst
        (man_v, woman_v, man_e, woman_e,
         dummy_men, dummy_women, m_star, w_star) = _artifact_people(art)
        g = art.graph
        n_v = len(g.vertices)
        vbit = {v: 1 << i for i, v in enumerate(g.vertices)}
        ebit = {j: 1 << (n_v + j) for j in range(len(g.edges))}

        ranks = inst.prefs.ranks
        # Per person: controlling selector bit (0 = fixed), straight partner
        # rank, swapped partner rank.
        sel: dict[Person, int] = {}
        straight: dict[Person, int] = {}
        swapped: dict[Person, int] = {}
        for v in g.vertices:
            for s in (1, 2):
                m, w = man_v[(s, v)], woman_v[(s, v)]
                other_w, other_m = woman_v[(3 - s, v)], man_v[(3 - s, v)]
                sel[m] = vbit[v]
                straight[m], swapped[m] = ranks[m][w], ranks[m][other_w]
                sel[w] = vbit[v]
                straight[w], swapped[w] = ranks[w][m], ranks[w][other_m]
        for j in range(len(g.edges)):
            for s in (1, 2):
                m, w = man_e[(s, j)], woman_e[(s, j)]
                other_w, other_m = woman_e[(3 - s, j)], man_e[(3 - s, j)]
                sel[m] = ebit[j]
                straight[m], swapped[m] = ranks[m][w], ranks[m][other_w]
                sel[w] = ebit[j]
                straight[w], swapped[w] = ranks[w][m], ranks[w][other_m]
        for dm, dw in zip(dummy_men, dummy_women):
            sel[dm] = sel[dw] = 0
            straight[dm] = swapped[dm] = ranks[dm][dw]
            straight[dw] = swapped[dw] = ranks[dw][dm]
        sel[m_star] = sel[w_star] = 0
        straight[m_star] = swapped[m_star] = ranks[m_star][w_star]
        straight[w_star] = swapped[w_star] = ranks[w_star][m_star]

        def classify(rank: int, person: Person):
            # When does `person` prefer rank `rank` to their partner?
            below_straight = rank < straight[person]
            below_swapped = rank < swapped[person]
            if below_straight and below_swapped:
                return (0, 0)          # always
            if not below_straight and not below_swapped:
                return None            # never
            if below_swapped:
                return (sel[person], 0)  # only when swapped
            return (0, sel[person])     # only when straight

        need_set: list[int] = []
        need_unset: list[int] = []
        for m in inst.men:
            for w, rank_m in ranks[m].items():
                side_m = classify(rank_m, m)
                if side_m is None:
                    continue
                side_w = classify(ranks[w][m], w)
                if side_w is None:
                    continue
                s_bits = side_m[0] | side_w[0]
                u_bits = side_m[1] | side_w[1]
                if s_bits & u_bits:
                    continue  # the same selector cannot be both set and unset
                need_set.append(s_bits)
                need_unset.append(u_bits)
        self.need_set = np.array(need_set, dtype=np.int64)
        self.need_unset = np.array(need_unset, dtype=np.int64)
        self.always_blocked = bool(((self.need_set == 0) & (self.need_unset == 0)).any())

        self.men_sel = np.array([sel[m] for m in inst.men], dtype=np.int64)
        self.men_straight = np.array([straight[m] for m in inst.men], dtype=np.int64)
        self.men_swapped = np.array([swapped[m] for m in inst.men], dtype=np.int64)
        self.women_sel = np.array([sel[w] for w in inst.women], dtype=np.int64)
        self.women_straight = np.array([straight[w] for w in inst.women], dtype=np.int64)
        self.women_swapped = np.array([swapped[w] for w in inst.women], dtype=np.int64)

    def stable(self, mask: int) -> bool:
        if self.always_blocked:
            return False
        if self.need_set.size == 0:
            return True
        sat = ((mask & self.need_set) == self.need_set) & ((mask & self.need_unset) == 0)
        return not bool(sat.any())

    def stable_masks(self, n_bits: int) -> list[int]:
        """All swap masks with no blocking pair, in increasing order."""
        total = 1 << n_bits
        if self.always_blocked:
            return []
        if self.need_set.size == 0:
            return list(range(total))
        out: list[int] = []
        chunk = 1 << 16
        for start in range(0, total, chunk):
            masks = np.arange(start, min(start + chunk, total), dtype=np.int64)
            column = masks[:, None]
            sat = ((column & self.need_set) == self.need_set) & (
                (column & self.need_unset) == 0
            )
            out.extend(int(m) for m in masks[~sat.any(axis=1)])
        return out

    def balance(self, mask: int) -> int:
        men = np.where(self.men_sel & mask, self.men_swapped, self.men_straight)
        women = np.where(self.women_sel & mask, self.women_swapped, self.women_straight)
        return int(max(men.sum(), women.sum()))


def structured_enumerate(art: ReductionArtifact) -> StableSet:
    """Every stable matching of a reduced instance, by trying all 2^(|V|+|E|)
    swap candidates and keeping the ones with no blocking pair."""
    if art.fallback:
        raise ValueError("fallback artifacts carry no structured matchings")
    g = art.graph
    n_v, n_e = len(g.vertices), len(g.edges)
    if 2 ** (n_v + n_e) > STRUCTURED_CANDIDATE_LIMIT:
        raise TooLarge(f"2^{n_v + n_e} swap candidates exceed the bound")
    checker = _CandidateChecker(art)
    stable_masks = checker.stable_masks(n_v + n_e)
    people = _artifact_people(art)
    matchings = []
    bal_opt = None
    for mask in stable_masks:
        chosen_vertices = {v for i, v in enumerate(g.vertices) if mask >> i & 1}
        chosen_edges = {j for j in range(n_e) if mask >> (n_v + j) & 1}
        matchings.append(Matching.of(_swap_pairs(people, g, chosen_vertices, chosen_edges)))
        bal = checker.balance(mask)
        bal_opt = bal if bal_opt is None else min(bal_opt, bal)

    opt = gs.optima(art.inst)
    if matchings and (matchings[0] != opt.mu_m or matchings[-1] != opt.mu_w):
        raise RuntimeError("structured enumeration missed an extreme stable matching")
    return StableSet(tuple(matchings), bal_opt)


# --- end-to-end verification --------------------------------------------------

@dataclass(frozen=True)
class ReductionReport:
    clique: tuple[str, ...] | None
    clique_answer: bool
    reduction_answer: bool
    agree: bool
    fallback: bool
    delta: int
    k_hat: int
    t_expected: int
    t_actual: int | None
    optima_match: bool | None
    bal_opt: int | None

    @property
    def ok(self) -> bool:
        checks = self.t_actual is None or (
            self.t_actual == self.t_expected and bool(self.optima_match)
        )
        return self.agree and checks


def verify_reduction(g: Graph, k: int) -> ReductionReport:
    """Cross-check the reduction against clique brute force on one graph."""
    art = reduce_clique(g, k)
    clique = clique_bruteforce(g, k)
    t_expected = 6 * (k + k * (k - 1) // 2)
    if art.fallback:
        from .oracle import decide_above_min

        answer = decide_above_min(art.inst, art.inst.target_k or 0).answer
        return ReductionReport(
            clique, clique is not None, answer, (clique is not None) == answer,
            True, art.delta, art.k_hat, t_expected, None, None, None,
        )
    # Same search as structured_enumerate, kept as masks to stay light: the
    # matchings themselves are only materialized for the two extremes.
    n_bits = len(g.vertices) + len(g.edges)
    checker = _CandidateChecker(art)
    masks = checker.stable_masks(n_bits)
    bal_opt = min((checker.balance(mask) for mask in masks), default=None)
    answer = bal_opt is not None and bal_opt <= art.k_hat
    opt = gs.optima(art.inst)
    t_actual = art.k_hat - max(opt.o_m, opt.o_w)
    identity = _swap_matching(art, set(), set())
    all_swapped = _swap_matching(art, set(g.vertices), set(range(len(g.edges))))
    optima_match = (
        bool(masks)
        and masks[0] == 0
        and masks[-1] == (1 << n_bits) - 1
        and opt.mu_m == identity
        and opt.mu_w == all_swapped
    )
    return ReductionReport(
        clique, clique is not None, answer, (clique is not None) == answer,
        False, art.delta, art.k_hat, t_expected, t_actual, optima_match,
        bal_opt,
    )
