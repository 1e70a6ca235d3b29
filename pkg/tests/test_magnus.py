import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from support import (
    brute_count_monomials,
    naive_beta,
    naive_depth,
    naive_poly_mul,
    random_reduced,
    random_unreduced,
    words_strategy,
)
from towerkit.errors import CapMismatchError, PreconditionError, RankError, ResourceLimitError
from towerkit.magnus import (
    Depth,
    TruncatedSeries,
    auto_depth,
    beta,
    count_monomials,
    depth,
    depth_of_word,
    format_series,
    leading_form,
    letter_image,
    mul,
)
from towerkit.tower import relators
from towerkit.words import IDENTITY, Word, commutator, conjugate, multiply, reduce

a1, a2, a3 = Word.gen(1), Word.gen(2), Word.gen(3)


def S(cap, terms):
    return TruncatedSeries(cap, terms)


# -- letter_image ---------------------------------------------------------------------


def test_letter_image_positive():
    assert letter_image(1, 1, 4) == S(4, {(): 1, (1,): 1})


def test_letter_image_negative():
    assert letter_image(1, -1, 4) == S(4, {(): 1, (1,): -1})


def test_letter_image_cap_one():
    assert letter_image(2, 1, 1) == S(1, {(): 1, (2,): 1})


def test_letter_image_out_of_range():
    with pytest.raises(RankError):
        letter_image(4, 1, 3, rank=3)
    with pytest.raises(RankError):
        letter_image(0, 1, 3)


# -- mul ---------------------------------------------------------------------------------


def test_mul_nilpotent_cancellation():
    assert mul(letter_image(1, 1, 4), letter_image(1, -1, 4)) == TruncatedSeries.one(4)


def test_mul_binomial_product():
    got = mul(letter_image(1, 1, 4), letter_image(2, 1, 4))
    assert got == S(4, {(): 1, (1,): 1, (2,): 1, (1, 2): 1})


def test_mul_four_binomials_matches_oracle():
    factors = [letter_image(1, -1, 4), letter_image(2, -1, 4), letter_image(1, 1, 4), letter_image(2, 1, 4)]
    got = TruncatedSeries.one(4)
    for f in factors:
        got = mul(got, f)
    expected = {(): 1, (1, 2): 1, (2, 1): -1, (1, 2, 1): 1, (2, 1, 2): -1, (1, 2, 1, 2): 1}
    assert got.terms == expected
    # and against the subset-expansion oracle
    assert got.terms == naive_beta([-1, -2, 1, 2])


def test_mul_cap_mismatch():
    with pytest.raises(CapMismatchError):
        mul(letter_image(1, 1, 3), letter_image(1, 1, 4))
    with pytest.raises(CapMismatchError):
        letter_image(1, 1, 3) + letter_image(1, 1, 4)


def test_mul_identity_and_truncation():
    s = beta(Word([1, 2, 3, 1]), 3)
    assert mul(s, TruncatedSeries.one(3)) == s
    assert all(len(m) <= 3 for m, _ in s.items())


def test_mul_resource_guard():
    s = beta(Word([1, 2, 3] * 4), 8)
    with pytest.raises(ResourceLimitError):
        mul(s, s, term_bound=10)


# -- beta ---------------------------------------------------------------------------------


def test_beta_identity():
    assert beta(IDENTITY, 5) == TruncatedSeries.one(5)


def test_beta_generator():
    assert beta(a1, 5) == S(5, {(): 1, (1,): 1})


def test_beta_commutator_truncated():
    assert beta(commutator(a1, a2), 2) == S(2, {(): 1, (1, 2): 1, (2, 1): -1})
    assert format_series(beta(commutator(a1, a2), 2)) == "1 + x1x2 - x2x1"


def test_beta_resource_guard():
    with pytest.raises(ResourceLimitError):
        beta(relators(3).relator(1), 16, term_bound=100)


# -- depth ---------------------------------------------------------------------------------


def test_depth_of_one():
    assert depth(TruncatedSeries.one(6)) == Depth.AtLeast(7)


def test_depth_of_commutator():
    assert depth(beta(commutator(a1, a2), 4)) == Depth.Exact(2)
    assert str(depth(beta(commutator(a1, a2), 4))) == "Exact(2)"


def test_depth_of_generator():
    assert depth(beta(a1, 4)) == Depth.Exact(1)


def test_depth_needs_unit_constant():
    with pytest.raises(PreconditionError):
        depth(S(3, {(1,): 1}))


@pytest.mark.parametrize("j", [1, 2, 3])
def test_depth_of_level_one_relators(j):
    assert depth_of_word(relators(1).relator(j), 4) == Depth.Exact(2)


def test_depth_of_word_examples():
    assert depth_of_word(Word([1, 2]), 2) == Depth.Exact(1)
    assert depth_of_word(IDENTITY, 3) == Depth.AtLeast(4)


def test_leading_form_of_commutator():
    assert leading_form(beta(commutator(a1, a2), 4)) == {(1, 2): 1, (2, 1): -1}


def test_auto_depth_escalates():
    r = relators(2).relator(1)
    assert auto_depth(r, hint=1) == Depth.Exact(4)
    assert auto_depth(r, hint=2, ceiling=3) == Depth.AtLeast(4)
    assert auto_depth(IDENTITY) == Depth.AtLeast(17)


def test_depth_predicates():
    assert Depth.Exact(3).at_least(3) and not Depth.Exact(3).at_least(4)
    assert Depth.AtLeast(5).at_least(5) and not Depth.AtLeast(5).below(9)
    assert Depth.Exact(3).below(4)


# -- count_monomials -----------------------------------------------------------------------


@pytest.mark.parametrize("n,d,expected", [(3, 1, 3), (3, 4, 24), (3, 0, 1)])
def test_count_monomials_examples(n, d, expected):
    assert count_monomials(n, d) == expected


@pytest.mark.parametrize("n", [1, 2, 3, 4])
@pytest.mark.parametrize("d", range(0, 7))
def test_count_monomials_brute_force(n, d):
    assert count_monomials(n, d) == brute_count_monomials(n, d)


# -- serialization -------------------------------------------------------------------------


def test_series_json_round_trip_is_exact():
    s = beta(relators(2).relator(3), 12)
    doc = json.loads(json.dumps(s.to_json()))
    assert all(isinstance(t["coef"], str) for t in doc["terms"])
    assert TruncatedSeries.from_json(doc) == s
    order = [(len(t["mono"]), t["mono"]) for t in doc["terms"]]
    assert order == sorted(order)


def test_big_coefficients_survive_json():
    s = beta(Word([1, 2] * 40), 16)
    assert max(abs(c) for _, c in s.items()) > 2**31
    assert TruncatedSeries.from_json(json.loads(json.dumps(s.to_json()))) == s


# -- properties ---------------------------------------------------------------------------


def test_beta_matches_subset_oracle():
    rng = random.Random(5)
    for _ in range(200):
        w = random_unreduced(rng, 3, rng.randint(0, 10))
        cap = rng.randint(1, 8)
        assert beta(w, cap).terms == naive_beta(reduce(w).letters, cap)


def test_mul_matches_naive_product():
    rng = random.Random(6)
    for _ in range(100):
        cap = rng.randint(1, 6)
        u, v = (random_reduced(rng, 3, rng.randint(0, 8)) for _ in range(2))
        got = mul(beta(u, cap), beta(v, cap)).terms
        assert got == naive_poly_mul(naive_beta(u.letters, cap), naive_beta(v.letters, cap), cap)


@settings(max_examples=300)
@given(words_strategy(max_size=32), words_strategy(max_size=32), st.integers(1, 6))
def test_multiplicativity(u, v, cap):
    assert beta(multiply(u, v), cap) == mul(beta(u, cap), beta(v, cap))


@given(words_strategy(max_size=40), st.integers(1, 8))
def test_reduction_invariance(w, cap):
    assert beta(w, cap) == beta(reduce(w), cap)


@given(words_strategy(max_size=32), st.integers(1, 8))
def test_storage_invariant(w, cap):
    assert beta(w, cap).is_valid()


@settings(max_examples=300)
@given(words_strategy(max_size=12))
def test_faithfulness_witness(w):
    w = reduce(w)
    if not w:
        return
    d = depth_of_word(w, len(w))
    assert d.exact and d.value <= len(w)


def test_faithfulness_agrees_with_naive_oracle():
    rng = random.Random(9)
    for _ in range(200):
        w = random_reduced(rng, 3, rng.randint(1, 10))
        assert depth_of_word(w, len(w)).value == naive_depth(w.letters, len(w))


def test_commutator_depth_additivity():
    rng = random.Random(12)
    checked = 0
    cap = 8
    while checked < 200:
        u = random_reduced(rng, 3, rng.randint(1, 6))
        v = random_reduced(rng, 3, rng.randint(1, 6))
        if rng.random() < 0.5:
            u = commutator(u, random_reduced(rng, 3, rng.randint(1, 3)))
        du, dv = depth_of_word(u, cap), depth_of_word(v, cap)
        if not (du.exact and dv.exact and du.value + dv.value <= cap):
            continue
        d = depth_of_word(commutator(u, v), cap)
        assert d.at_least(du.value + dv.value)
        checked += 1


@settings(max_examples=200)
@given(words_strategy(max_size=12), words_strategy(max_size=6))
def test_conjugation_invariance(w, g):
    cap = 8
    d = depth_of_word(w, cap)
    dc = depth_of_word(conjugate(w, g), cap)
    if d.exact or dc.exact:
        assert d == dc


@settings(max_examples=200)
@given(words_strategy(max_size=12), words_strategy(max_size=12))
def test_product_lower_bound(u, v):
    cap = 8
    du, dv = depth_of_word(u, cap), depth_of_word(v, cap)
    if du.exact and dv.exact:
        assert depth_of_word(multiply(u, v), cap).at_least(min(du.value, dv.value))


@given(words_strategy(max_size=20), st.integers(1, 6))
def test_associativity_of_series_product(w, cap):
    x, y, z = beta(w, cap), beta(Word([1, 2, -3]), cap), beta(Word([-2, 3]), cap)
    assert mul(mul(x, y), z) == mul(x, mul(y, z))
