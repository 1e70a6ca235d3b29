"""Acceptance criteria, one test each.

Run ``pytest tests/test_acceptance.py -v``; the terminal summary lists one
PASS/FAIL line per criterion.
"""

import random
import time

import pytest

from support import naive_poly_mul, random_derived, random_reduced
from towerkit.chainring import build_complex, direct_limit, homology, inclusion_maps
from towerkit.magnus import Depth, TruncatedSeries, beta, count_monomials, depth_of_word, mul
from towerkit.obstruction import REFUTED, compute_p, refute_sap_instance
from towerkit.prosequence import PLAIN, take_subsequence, verify_perfectness, verify_sequence
from towerkit.tower import ap_witness, relators, witnessed_tower
from towerkit.words import commutator, conjugate, flatten, multiply

criterion = pytest.mark.criterion


def report(n, ok, detail):
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'} ({detail})")


@criterion(1, "level-1 filtration: depths Exact(2), p_1 = 1, < 1 s")
def test_c1_level_one_filtration():
    start = time.perf_counter()
    fr = compute_p(1)
    elapsed = time.perf_counter() - start
    # oracle: multiply the four degree-1 binomials of [a_u, a_v] by hand
    for j, (u, v) in enumerate([(2, 3), (1, 3), (1, 2)], start=1):
        binomials = [{(): 1, (u,): -1}, {(): 1, (v,): -1}, {(): 1, (u,): 1}, {(): 1, (v,): 1}]
        prod = {(): 1}
        for b in binomials:
            prod = naive_poly_mul(prod, b)
        lowest = min(len(m) for m in prod if m)
        assert lowest == 2
        assert prod[(u, v)] == 1 and prod[(v, u)] == -1
        assert beta(relators(1).relator(j), 4).terms == prod
    ok = fr.depths == (Depth.Exact(2),) * 3 and fr.p == 1 and elapsed < 1.0
    report(1, ok, f"depths {[str(d) for d in fr.depths]}, p_1={fr.p}, {elapsed:.3f}s")
    assert fr.depths == (Depth.Exact(2),) * 3
    assert fr.p == 1 and fr.p_exact
    assert elapsed < 1.0


@criterion(2, "level-2 filtration: exact depths in [4, 16], p_2 reported, < 30 s at cap 16")
def test_c2_level_two_filtration():
    start = time.perf_counter()
    fr = compute_p(2, cap_ceiling=16)
    series = [beta(w, 16) for w in relators(2).words]
    elapsed = time.perf_counter() - start
    bound = 3 * 2**15
    assert count_monomials(3, 16) == bound
    widest = max(len(s.degree_part(d)) for s in series for d in range(17))
    ok = all(d.exact and 4 <= d.value <= 16 for d in fr.depths) and widest <= bound and elapsed < 30
    report(2, ok, f"depths {[str(d) for d in fr.depths]}, p_2={fr.p}, widest degree {widest}, {elapsed:.2f}s")
    assert all(d.exact and 4 <= d.value <= 16 for d in fr.depths)
    assert fr.p_exact and fr.p >= 1
    assert widest <= bound
    assert elapsed < 30


@criterion(3, "Magnus multiplicativity on 1000 random pairs (length <= 32, cap 6)")
def test_c3_multiplicativity():
    rng = random.Random(20240301)
    failures = 0
    for _ in range(1000):
        u = random_reduced(rng, 3, rng.randint(0, 32))
        v = random_reduced(rng, 3, rng.randint(0, 32))
        if beta(multiply(u, v), 6) != mul(beta(u, 6), beta(v, 6)):
            failures += 1
    report(3, failures == 0, f"{failures} failures")
    assert failures == 0


@criterion(4, "faithfulness witnesses on 500 reduced words (length <= 12)")
def test_c4_faithfulness():
    rng = random.Random(4)
    failures = 0
    for _ in range(500):
        w = random_reduced(rng, 3, rng.randint(1, 12))
        s = beta(w, len(w))
        if s == TruncatedSeries.one(len(w)):
            failures += 1
    report(4, failures == 0, f"{failures} failures")
    assert failures == 0


def _known_depth_word(rng, cap):
    """Iterated commutators of random words; the depth is then measured exactly."""
    w = random_reduced(rng, 3, rng.randint(1, 4))
    for _ in range(rng.randint(0, 2)):
        w = commutator(w, random_reduced(rng, 3, rng.randint(1, 3)))
    return w, depth_of_word(w, cap)


@criterion(5, "commutator depth additivity on 300 pairs")
def test_c5_additivity():
    rng = random.Random(5)
    cap = 8
    pairs = violations = 0
    while pairs < 300:
        w1, d1 = _known_depth_word(rng, cap)
        w2, d2 = _known_depth_word(rng, cap)
        if not (d1.exact and d2.exact and d1.value + d2.value <= cap):
            continue
        pairs += 1
        d = depth_of_word(commutator(w1, w2), cap)
        if not d.at_least(d1.value + d2.value):
            violations += 1
    report(5, violations == 0, f"{pairs} pairs, {violations} violations")
    assert violations == 0


@criterion(6, "derived-series depth: second >= 4, third >= 8 on 100 samples each")
def test_c6_derived_series():
    rng = random.Random(6)
    violations = 0
    measured = {2: 0, 3: 0}
    for level, bound, cap in ((2, 4, 6), (3, 8, 8)):
        for _ in range(100):
            w = random_derived(rng, level, base_length=3)
            d = depth_of_word(w, cap)
            measured[level] += d.exact
            if not d.at_least(bound):
                violations += 1
    report(6, violations == 0, f"{violations} violations, exact depths measured {measured}")
    assert violations == 0


@criterion(7, "AP-witness identities for 2 <= i <= 5, < 1 s")
def test_c7_ap_witnesses():
    start = time.perf_counter()
    checked = 0
    for i in range(2, 6):
        for j, e in enumerate(ap_witness(i), start=1):
            assert flatten(e) == relators(i).relator(j)
            checked += 1
    elapsed = time.perf_counter() - start
    report(7, checked == 12 and elapsed < 1.0, f"{checked} identities, {elapsed:.3f}s")
    assert checked == 12
    assert elapsed < 1.0


@criterion(8, "refutation harness (i=1, k=2, q=2): 200 samples, deterministic, < 60 s")
def test_c8_refutation():
    start = time.perf_counter()
    r = refute_sap_instance(1, 2, samples=200, seed=2024)
    elapsed = time.perf_counter() - start
    again = refute_sap_instance(1, 2, samples=200, seed=2024)
    assert 2**2 >= 2**1 + r.p
    assert r.q == 2 and r.threshold == 3 and r.cap >= 3
    assert all(d == Depth.Exact(2) for d in r.relator_depths)
    for res in r.results:
        assert res.depth.at_least(3)
        assert res.status == "ok"
    ok = r.verdict == REFUTED and r.to_json() == again.to_json() and elapsed < 60
    report(8, ok, f"verdict {r.verdict}, counts {r.counts}, {elapsed:.2f}s")
    assert r.verdict == REFUTED
    assert r.to_json() == again.to_json()
    assert elapsed < 60


@criterion(9, "chain homology (3,3) for m=1..6, iso/zero inclusions, limit (3,0), < 1 s")
def test_c9_chain_homology():
    start = time.perf_counter()
    for m in range(1, 7):
        assert homology(build_complex(m)).ranks == (3, 3)
        up, low = inclusion_maps(m)
        assert up.kind == "isomorphism" and low.kind == "zero"
    lim = direct_limit(6)
    elapsed = time.perf_counter() - start
    report(9, lim.ranks == (3, 0) and elapsed < 1.0, f"limit {lim.ranks}, {elapsed:.3f}s")
    assert lim.ranks == (3, 0)
    assert elapsed < 1.0


@criterion(10, "subsequence (1,3,5) with transported plain witnesses verifies")
def test_c10_subsequence_transport():
    sub = take_subsequence(witnessed_tower(5), [1, 3, 5], transport=True)
    problems = verify_sequence(sub)
    ok = not problems and verify_perfectness(sub, sub.witness, PLAIN)
    report(10, ok, f"levels {sub.labels}")
    assert problems == []
    assert verify_perfectness(sub, sub.witness, PLAIN)


@criterion(11, "depth conjugation invariance on 300 pairs")
def test_c11_conjugation_invariance():
    rng = random.Random(11)
    cap = 8
    pairs = violations = 0
    while pairs < 300:
        w, d = _known_depth_word(rng, cap)
        if not d.exact:
            continue
        g = random_reduced(rng, 3, rng.randint(1, 6))
        pairs += 1
        if depth_of_word(conjugate(w, g), cap) != d:
            violations += 1
    report(11, violations == 0, f"{pairs} pairs, {violations} violations")
    assert violations == 0
