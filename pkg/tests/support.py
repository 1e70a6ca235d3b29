"""Shared helpers for the test suite: independent oracles and builders."""

from __future__ import annotations

import itertools
import random

from hypothesis import strategies as st

from towerkit.prosequence import (
    STRONG,
    AugmentedSequence,
    BondingMap,
    CommutatorTerm,
    Factor,
    GeneratorWitness,
    Level,
    MembershipCertificate,
    PerfectnessWitness,
    Presentation,
)
from towerkit.words import Word, commutator, invert, multiply, reduce

# -- oracles -------------------------------------------------------------------------


def naive_beta(letters, cap=None) -> dict:
    """Expand prod (1 +- x_j) over all subsets of letter positions.

    Independent of the library: no buckets, no incremental update.
    """
    out: dict = {}
    n = len(letters)
    top = n if cap is None else min(cap, n)
    for d in range(top + 1):
        for pos in itertools.combinations(range(n), d):
            mono = tuple(abs(letters[p]) for p in pos)
            if any(a == b for a, b in zip(mono, mono[1:])):
                continue
            coef = 1
            for p in pos:
                coef *= 1 if letters[p] > 0 else -1
            out[mono] = out.get(mono, 0) + coef
    return {m: c for m, c in out.items() if c}


def naive_poly_mul(s: dict, t: dict, cap=None) -> dict:
    out: dict = {}
    for ma, ca in s.items():
        for mb, cb in t.items():
            m = ma + mb
            if cap is not None and len(m) > cap:
                continue
            if any(a == b for a, b in zip(m, m[1:])):
                continue
            out[m] = out.get(m, 0) + ca * cb
    return {m: c for m, c in out.items() if c}


def brute_count_monomials(n: int, d: int) -> int:
    return sum(
        1
        for seq in itertools.product(range(1, n + 1), repeat=d)
        if all(a != b for a, b in zip(seq, seq[1:]))
    )


def naive_depth(letters, cap):
    """Lowest nonzero degree of prod(1 +- x) - 1 up to cap, or None."""
    terms = naive_beta(letters, cap)
    degrees = [len(m) for m in terms if m]
    return min(degrees) if degrees else None


# -- random words -------------------------------------------------------------------


def random_reduced(rng: random.Random, rank: int, length: int) -> Word:
    letters: list[int] = []
    while len(letters) < length:
        x = rng.randint(1, rank) * rng.choice((1, -1))
        if letters and letters[-1] == -x:
            continue
        letters.append(x)
    return Word(letters, reduced=True)


def random_unreduced(rng: random.Random, rank: int, length: int) -> Word:
    return Word([rng.randint(1, rank) * rng.choice((1, -1)) for _ in range(length)])


def random_derived(rng: random.Random, level: int, base_length: int = 3) -> Word:
    """A nontrivial element of the ``level``-th derived subgroup of ``F_3``."""
    while True:
        if level == 0:
            w = random_reduced(rng, 3, rng.randint(1, base_length))
        else:
            w = commutator(random_derived(rng, level - 1, base_length), random_derived(rng, level - 1, base_length))
        if w:
            return w


def letters_strategy(rank=3, max_size=64):
    return st.lists(
        st.integers(min_value=1, max_value=rank).flatmap(lambda j: st.sampled_from((j, -j))),
        max_size=max_size,
    )


def words_strategy(rank=3, max_size=64):
    return letters_strategy(rank, max_size).map(Word)


# -- a sequence with genuine strong witnesses ------------------------------------------
#
# Generators c_0..c_N are a1..a_{N+1}.  G_i (label i = 0..N) has relators
#     c_l            for l > i
#     rho_m = c_m^-1 [c_m, c_{m-1}]   for 1 <= m <= i
# so c_m = [c_m, c_{m-1}] in G_i.  Bonds are identity on generators and
# ker(G_i -> G_{i-1}) = ncl(c_i).  With L_0 = G_0 and L_i = ker, each c_i is the
# strong commutator [c_i, c_{i-1}] * rho_i^-1 with c_i in K and c_{i-1} in J.


def _c(l: int) -> Word:
    return Word.gen(l + 1)


def _chain_relators(i: int, top: int) -> list[Word]:
    rels = [_c(l) for l in range(i + 1, top + 1)]
    rels += [multiply(invert(_c(m)), commutator(_c(m), _c(m - 1))) for m in range(1, i + 1)]
    return rels


def _rho_index(i: int, m: int, top: int) -> int:
    return (top - i) + (m - 1)


def _c_relator_index(i: int, l: int) -> int:
    return l - i - 1


def strong_chain(top: int = 4, padded_level: int | None = 1) -> AugmentedSequence:
    """The synthetic sequence ``G_0 <- ... <- G_top`` with a strong witness.

    ``padded_level`` gets two extra relator corrections ``c_{i+1} * c_{i+1}^-1``
    that cancel freely but stop being relators after passing to a subsequence.
    """
    rank = top + 1
    gens = tuple(Word.gen(j) for j in range(1, rank + 1))
    levels = [Level(0, Presentation(rank, _chain_relators(0, top)), augmentation=gens)]
    witness = {}
    for i in range(1, top + 1):
        rels = _chain_relators(i, top)
        prev_rels = _chain_relators(i - 1, top)
        k = _c(i)
        # previous relators, lifted (identity), as elements of ncl(c_i) in G_i
        lifts = []
        for r in prev_rels:
            if r == k:
                lifts.append(MembershipCertificate(r, (Factor(0, 1),)))
            else:
                lifts.append(MembershipCertificate(r, (), (Factor(rels.index(r), 1),)))
        levels.append(
            Level(
                label=i,
                presentation=Presentation(rank, rels),
                augmentation=(k,),
                bond=BondingMap(i, i - 1, gens),
                section=gens,
                kernel=(k,),
                small_certificates=(MembershipCertificate(k, (Factor(0, 1),)),),
                relator_lifts=tuple(lifts),
                kernel_certificates=(MembershipCertificate(k, (), (Factor(_c_relator_index(i - 1, i), 1),)),),
            )
        )
        # J pool: lifts of L_{i-1} generators, then c_i
        j_pool = list(levels[i - 1].augmentation) + [k]
        left = MembershipCertificate(k, (Factor(0, 1),))
        right = MembershipCertificate(_c(i - 1), (Factor(j_pool.index(_c(i - 1)), 1),))
        corrections = [Factor(_rho_index(i, i, top), -1)]
        if padded_level == i and i + 1 <= top:
            idx = _c_relator_index(i, i + 1)
            corrections += [Factor(idx, 1), Factor(idx, -1)]
        witness[i] = (GeneratorWitness(k, (CommutatorTerm(left, right),), tuple(corrections)),)
    return AugmentedSequence(tuple(levels), PerfectnessWitness(STRONG, witness))


def reduced_word(letters) -> Word:
    return reduce(Word(letters))
