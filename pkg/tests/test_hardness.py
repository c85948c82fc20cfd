import random

import pytest

from bsm import gs
from bsm.generate import random_graph, random_triangle_free_graph
from bsm.hardness import (
    Graph,
    NotAClique,
    _CandidateChecker,
    _swap_matching,
    clique_bruteforce,
    parse_graph,
    reduce_clique,
    serialize_graph,
    structured_enumerate,
    verify_reduction,
    witness_matching,
)
from bsm.oracle import TooLarge, decide_above_min


def planted_graph_7_5():
    """Seven vertices, five edges, triangle on v1 v2 v3."""
    return Graph.build(
        tuple(f"v{i}" for i in range(1, 8)),
        [("v1", "v2"), ("v1", "v3"), ("v2", "v3"), ("v4", "v5"), ("v6", "v7")],
    )


def test_graph_validation():
    with pytest.raises(ValueError, match="loop"):
        Graph.build(("a", "b"), [("a", "a")])
    with pytest.raises(ValueError, match="duplicate edge"):
        Graph.build(("a", "b"), [("a", "b"), ("b", "a")])
    with pytest.raises(ValueError, match="unknown"):
        Graph.build(("a",), [("a", "b")])
    with pytest.raises(ValueError, match="duplicate vertex"):
        Graph.build(("a", "a"), [])


def test_graph_round_trip():
    g = planted_graph_7_5()
    assert parse_graph(serialize_graph(g)) == g
    bare = parse_graph("v2 v1\nv1 v3\n")
    assert bare.vertices == ("v2", "v1", "v3")
    assert bare.edges == (("v2", "v1"), ("v1", "v3"))


def test_clique_bruteforce():
    triangle = Graph.build(("a", "b", "c"), [("a", "b"), ("a", "c"), ("b", "c")])
    assert clique_bruteforce(triangle, 3) == ("a", "b", "c")
    path = Graph.build(("a", "b", "c"), [("a", "b"), ("b", "c")])
    assert clique_bruteforce(path, 3) is None
    assert clique_bruteforce(planted_graph_7_5(), 3) == ("v1", "v2", "v3")
    assert clique_bruteforce(path, 1) == ("a",)


def test_reduction_arithmetic_7_5_3():
    art = reduce_clique(planted_graph_7_5(), 3)
    assert not art.fallback
    assert art.delta == 156
    assert len(art.inst.men) == len(art.inst.women) == 181
    assert art.k_hat == 373
    assert art.t == 36
    assert art.inst.target_k == art.k_hat
    opt = gs.optima(art.inst)
    assert opt.o_m == 337 and opt.o_w == 181
    assert art.k_hat - max(opt.o_m, opt.o_w) == art.t


def test_closed_form_optima():
    art = reduce_clique(planted_graph_7_5(), 3)
    opt = gs.optima(art.inst)
    identity = _swap_matching(art, set(), set())
    swapped = _swap_matching(art, set(art.graph.vertices), set(range(len(art.graph.edges))))
    assert opt.mu_m == identity
    assert opt.mu_w == swapped


def test_fallback_small_graph():
    triangle = Graph.build(("a", "b", "c"), [("a", "b"), ("a", "c"), ("b", "c")])
    art = reduce_clique(triangle, 3)
    assert art.fallback
    assert len(art.inst.men) == 0 and art.inst.target_k == 0
    assert decide_above_min(art.inst, 0).answer

    path = Graph.build(("a", "b", "c", "d", "e", "f", "g"), [("a", "b")])
    art = reduce_clique(path, 3)  # delta < 0 for such a sparse graph
    assert art.fallback and art.delta < 0
    assert not decide_above_min(art.inst, 0).answer


def test_reduce_requires_positive_k():
    with pytest.raises(ValueError):
        reduce_clique(planted_graph_7_5(), 0)


def test_witness_matching_planted_triangle():
    art = reduce_clique(planted_graph_7_5(), 3)
    mu = witness_matching(art, ("v1", "v2", "v3"))
    assert gs.blocking_pairs(art.inst, mu) == []
    obj = gs.objectives(art.inst, mu)
    assert obj.men_cost == obj.women_cost == art.k_hat == 373


def test_witness_matching_rejects_non_clique():
    art = reduce_clique(planted_graph_7_5(), 3)
    with pytest.raises(NotAClique):
        witness_matching(art, ("v1", "v2", "v4"))
    with pytest.raises(NotAClique):
        witness_matching(art, ("v1", "v2"))


def test_witness_matching_k1():
    g = Graph.build(tuple(f"v{i}" for i in range(1, 6)), [("v1", "v2")])
    art = reduce_clique(g, 1)
    assert not art.fallback
    mu = witness_matching(art, ("v3",))
    identity = _swap_matching(art, set(), set())
    diff = {p for pair in (mu.pairs ^ identity.pairs) for p in pair}
    names = {p.name for p in diff}
    assert names == {"m1_v3", "m2_v3", "w1_v3", "w2_v3"}
    assert gs.blocking_pairs(art.inst, mu) == []


def test_swapped_edge_with_endpoint_outside_needs_blocking_pair():
    art = reduce_clique(planted_graph_7_5(), 3)
    # edge v1-v2 swapped but v1 not chosen: its first edge man blocks with v1's woman
    mu = _swap_matching(art, {"v2", "v3"}, {0})
    blockers = gs.blocking_pairs(art.inst, mu)
    assert blockers
    names = {(m.name, w.name) for m, w in blockers}
    assert ("m1_e1", "w1_v1") in names


def test_structured_enumerate_planted():
    art = reduce_clique(planted_graph_7_5(), 3)
    stable = structured_enumerate(art)
    opt = gs.optima(art.inst)
    assert stable.matchings[0] == opt.mu_m
    assert stable.matchings[-1] == opt.mu_w
    assert stable.bal_opt == art.k_hat  # the planted triangle is optimal
    mu = witness_matching(art, ("v1", "v2", "v3"))
    assert mu in stable.matchings
    # dummies and the star couple are together in every stable matching
    star_m = next(p for p in art.inst.men if p.name == "mstar")
    star_w = next(p for p in art.inst.women if p.name == "wstar")
    for matching in stable.matchings[:50]:
        assert matching.partner(star_m) == star_w
        for d in art.inst.men:
            if d.name.startswith("md"):
                assert matching.partner(d).name == "wd" + d.name[2:]


def test_structured_enumerate_matches_generic_scan():
    g = Graph.build(
        tuple(f"v{i}" for i in range(1, 8)),
        [("v1", "v2"), ("v1", "v3"), ("v2", "v3"), ("v4", "v5")],
    )
    art = reduce_clique(g, 3)
    checker = _CandidateChecker(art)
    idx = gs._Indexed(art.inst)
    rng = random.Random(7)
    n_bits = len(g.vertices) + len(g.edges)
    masks = list(range(1 << n_bits))
    for mask in rng.sample(masks, 300):
        chosen_v = {v for i, v in enumerate(g.vertices) if mask >> i & 1}
        chosen_e = {j for j in range(len(g.edges)) if mask >> (len(g.vertices) + j) & 1}
        mu = _swap_matching(art, chosen_v, chosen_e)
        assert checker.stable(mask) == (not gs.blocking_pairs(art.inst, mu, idx))
        if checker.stable(mask):
            assert checker.balance(mask) == gs.objectives(art.inst, mu, idx).balance


def test_structured_enumerate_equals_generic_oracle_on_small_artifact():
    # The sparsest non-fallback graph shape gives an artifact small enough
    # for the exhaustive oracle; the swap-candidate family must be complete.
    from bsm.oracle import enumerate_stable

    g = Graph.build(
        tuple(f"v{i}" for i in range(1, 9)),
        [("v1", "v2"), ("v1", "v3"), ("v2", "v3")],
    )
    art = reduce_clique(g, 3)
    assert not art.fallback and len(art.inst.men) == 27
    full = enumerate_stable(art.inst, limit=40)
    structured = structured_enumerate(art)
    assert set(full.matchings) == set(structured.matchings)
    assert full.bal_opt == structured.bal_opt


def test_structured_enumerate_guards():
    art = reduce_clique(planted_graph_7_5(), 3)
    big = random_graph(random.Random(0), 12, 12)
    with pytest.raises(TooLarge):
        structured_enumerate(reduce_clique(big, 3))
    fallback = reduce_clique(Graph.build(("a", "b", "c"), [("a", "b")]), 3)
    with pytest.raises(ValueError):
        structured_enumerate(fallback)
    del art


def test_verify_reduction_nine_vertices():
    g = random_graph(random.Random(11), 9, 10, plant_triangle=True)
    report = verify_reduction(g, 3)
    assert report.clique_answer and report.agree and report.ok


def test_verify_reduction_cases():
    planted = verify_reduction(planted_graph_7_5(), 3)
    assert planted.clique_answer and planted.reduction_answer and planted.agree
    assert planted.ok and planted.t_actual == planted.t_expected == 36

    tri_free = verify_reduction(random_triangle_free_graph(random.Random(5), 7, 9), 3)
    assert not tri_free.clique_answer and not tri_free.reduction_answer
    assert tri_free.agree and tri_free.ok

    fallback = verify_reduction(Graph.build(("a", "b", "c"), [("a", "b")]), 3)
    assert fallback.fallback and fallback.agree and fallback.ok
