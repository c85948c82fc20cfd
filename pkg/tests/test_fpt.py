import random

from bsm.fpt import BranchCertificate, assemble_and_check, enumerate_certificates, solve_above_min
from bsm.generate import mutual_first_instance, random_instance
from bsm.gs import blocking_pairs, objectives, optima
from bsm.instance import parse_instance
from bsm.kernel import OUTCOME_KERNEL, kernelize
from bsm.oracle import decide_above_min, enumerate_stable
from helpers import naive_certificates, sad_2x2, sad_rich_instance


def anchored_instance():
    """m0's optimal partner is w0; w1, w2, w3 sit strictly below at offsets 1..3."""
    text = """
men: m0 m1 m2 m3
women: w0 w1 w2 w3
m0: w0 w1 w2 w3
m1: w1 w0
m2: w2 w0
m3: w3 w0
w0: m0 m1 m2 m3
w1: m1 m0
w2: m2 m0
w3: m3 m0
"""
    return parse_instance(text)


def test_certificates_single_man():
    inst = anchored_instance()
    m0 = inst.men[0]
    certs = enumerate_certificates(inst, [m0], 2)
    assert sorted(c.cost for c in certs) == [1, 2]
    women = {c.pairs[0][1].name for c in certs}
    assert women == {"w1", "w2"}


def test_certificates_empty_selection():
    inst = anchored_instance()
    assert enumerate_certificates(inst, [], 0) == [BranchCertificate((), 0)]
    assert enumerate_certificates(inst, [], -1) == []


def test_certificates_budget_too_small_for_two_men():
    text = """
men: m1 m2
women: w1 w2 w3 w4
m1: w1 w3
m2: w2 w4
w1: m1
w2: m2
w3: m1
w4: m2
"""
    inst = parse_instance(text)
    assert enumerate_certificates(inst, list(inst.men), 1) == []
    assert len(enumerate_certificates(inst, list(inst.men), 2)) == 1


def test_certificates_match_brute_force():
    rng = random.Random(13)
    compared = 0
    for _ in range(25):
        inst = sad_rich_instance(rng)
        opt = optima(inst)
        result = kernelize(inst, max(opt.o_m, opt.o_w) + rng.randint(0, 4))
        if result.outcome != OUTCOME_KERNEL:
            continue
        kin = result.kernel
        kopt = optima(kin)
        sad = [m for m in kin.men if kopt.mu_m.by_man.get(m) != kopt.mu_w.by_man.get(m)]
        r = result.k - kopt.o_m
        for size in range(min(4, len(sad)) + 1):
            m_prime = sad[:size]
            got = {frozenset(c.pairs) for c in enumerate_certificates(kin, m_prime, r)}
            want = naive_certificates(kin, m_prime, r)
            assert got == want
            compared += 1
    assert compared > 10


def test_assemble_2x2_kernel():
    result = kernelize(sad_2x2(), 4)
    kin = result.kernel
    kopt = optima(kin)
    sad = [m for m in kin.men if kopt.mu_m.by_man.get(m) != kopt.mu_w.by_man.get(m)]
    assert len(sad) == 2
    # both men move to their second choices: the woman-optimal matching
    cert_pairs = tuple((m, kopt.mu_w.by_man[m]) for m in sad)
    cost = sum(kin.rank(m, w) - kin.rank(m, kopt.mu_m.by_man[m]) for m, w in cert_pairs)
    mu = assemble_and_check(kin, BranchCertificate(cert_pairs, cost), sad)
    assert mu is not None
    assert result.lift(mu) == optima(sad_2x2()).mu_w

    # the empty certificate assembles the man-optimal matching
    mu0 = assemble_and_check(kin, BranchCertificate((), 0), [])
    assert mu0 == kopt.mu_m
    assert objectives(kin, mu0).balance <= result.k

    # a certificate aiming two men at one woman is rejected
    w = kopt.mu_w.by_man[sad[0]]
    clash = BranchCertificate(((sad[0], w), (sad[1], w)), 2)
    assert assemble_and_check(kin, clash, sad) is None


def test_solve_examples():
    inst = sad_2x2()
    yes = solve_above_min(inst, 4)
    assert yes.answer and yes.t == 2
    assert objectives(inst, yes.witness).balance == 4
    assert not blocking_pairs(inst, yes.witness)

    no = solve_above_min(inst, 3)
    assert not no.answer and no.witness is None

    short_circuit = solve_above_min(inst, 1)
    assert not short_circuit.answer
    assert short_circuit.stats.subsets_tried == 0
    assert short_circuit.stats.branch_nodes == 0

    trivial_yes = solve_above_min(mutual_first_instance(3), 3)
    assert trivial_yes.answer and trivial_yes.stats.subsets_tried == 0


def test_solver_bounds_hold():
    rng = random.Random(55)
    for _ in range(25):
        inst = sad_rich_instance(rng)
        opt = optima(inst)
        for k in (max(opt.o_m, opt.o_w), enumerate_stable(inst).bal_opt - 1):
            result = solve_above_min(inst, k)
            if result.r is None:
                continue
            kres = result.kernel
            kopt = optima(kres.kernel)
            sad = sum(
                1 for m in kres.kernel.men
                if kopt.mu_m.by_man.get(m) != kopt.mu_w.by_man.get(m)
            )
            assert result.stats.subsets_tried <= 2 ** sad
            assert result.stats.max_branch_nodes <= 4 * 2 ** result.r


def test_solver_agrees_with_oracle():
    rng = random.Random(2024)
    for _ in range(120):
        inst = random_instance(rng, max_side=6)
        opt = optima(inst)
        bal = enumerate_stable(inst).bal_opt
        for k in (max(opt.o_m, opt.o_w) - 1, bal - 1, bal, opt.o_m + opt.o_w):
            want = decide_above_min(inst, k).answer
            got = solve_above_min(inst, k)
            assert want == got.answer
            if got.answer:
                assert not blocking_pairs(inst, got.witness)
                assert objectives(inst, got.witness).balance <= k


def test_witness_is_lifted_to_the_input_instance():
    rng = random.Random(31415)
    lifted = 0
    for _ in range(25):
        inst = sad_rich_instance(rng)
        bal = enumerate_stable(inst).bal_opt
        result = solve_above_min(inst, bal)
        assert result.answer
        people = set(inst.people)
        assert {p for pair in result.witness.pairs for p in pair} <= people
        if result.stats.subsets_tried > 0:
            lifted += 1
    assert lifted > 0
