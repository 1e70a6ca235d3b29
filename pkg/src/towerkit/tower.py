"""The relator tower on three generators.

Level 1 relators are the basic commutators ``[a2,a3], [a1,a3], [a1,a2]``;
level ``i+1`` is built from level ``i`` by

    r(i+1,1) = [r(i,2), r(i,3)]
    r(i+1,2) = [r(i,1), r(i,3)]
    r(i+1,3) = [r(i,1), r(i,2)]

``G_i`` is ``F_3`` modulo the normal closure ``A_i`` of the level-``i``
relators.  Since ``A_{i+1} <= A_i`` the bonds ``G_{i+1} -> G_i`` are induced by
the identity on generators, and ``ker(G_j -> G_i)`` is normally generated by
the level-``i`` relators.  Indices ``(i, j)`` are 1-based everywhere.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from functools import lru_cache

from towerkit.errors import PreconditionError, ResourceLimitError
from towerkit.prosequence import (
    PLAIN,
    AugmentedSequence,
    BondingMap,
    CommutatorTerm,
    Factor,
    GeneratorWitness,
    Level,
    MembershipCertificate,
    PerfectnessWitness,
    Presentation,
    kernel_certificate,
    letterwise_certificate,
)
from towerkit.words import Comm, Leaf, Word, flatten

RANK = 3
DEFAULT_LEVEL_CEILING = 6
DEFAULT_WORD_LENGTH_CEILING = 4096

# (u, v) with r(i+1, j) = [r(i, u), r(i, v)], 1-based
PAIRS = {1: (2, 3), 2: (1, 3), 3: (1, 2)}

_lock = threading.Lock()


@dataclass(frozen=True)
class TowerLevel:
    level: int
    expressions: tuple  # three Comm trees
    words: tuple[Word, Word, Word]

    @property
    def unreduced_length(self) -> int:
        return 4**self.level

    @property
    def reduced_lengths(self) -> list[int]:
        return [len(w) for w in self.words]

    def relator(self, j: int) -> Word:
        return self.words[j - 1]

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "relators": [str(w) for w in self.words],
            "unreduced_length": self.unreduced_length,
            "reduced_lengths": self.reduced_lengths,
        }


def relators(i: int, word_length_ceiling: int = DEFAULT_WORD_LENGTH_CEILING) -> TowerLevel:
    if i < 1:
        raise PreconditionError("tower levels start at 1")
    if 4**i > word_length_ceiling:
        raise ResourceLimitError(f"level {i} relators have unreduced length {4**i} > {word_length_ceiling}")
    with _lock:
        return _relators(i)


@lru_cache(maxsize=None)
def _relators(i: int) -> TowerLevel:
    if i == 1:
        exprs = tuple(Comm(Leaf(Word.gen(u)), Leaf(Word.gen(v))) for u, v in (PAIRS[1], PAIRS[2], PAIRS[3]))
    else:
        prev = _relators(i - 1).expressions
        exprs = tuple(Comm(prev[u - 1], prev[v - 1]) for u, v in (PAIRS[1], PAIRS[2], PAIRS[3]))
    return TowerLevel(i, exprs, tuple(flatten(e) for e in exprs))


def unreduced_length(expr) -> int:
    """Letter count of an expression before any free cancellation."""
    if isinstance(expr, Leaf):
        return len(expr.word)
    if isinstance(expr, Comm):
        return 2 * (unreduced_length(expr.left) + unreduced_length(expr.right))
    raise TypeError("tower expressions contain only leaves and commutators")


def relator_words(i: int) -> tuple[Word, Word, Word]:
    """Level-``i`` relator words; level 0 gives the generators themselves."""
    if i == 0:
        return (Word.gen(1), Word.gen(2), Word.gen(3))
    return relators(i).words


@dataclass(frozen=True)
class TowerPresentation:
    level: int
    presentation: Presentation

    @property
    def generators(self) -> list[Word]:
        return [Word.gen(j) for j in range(1, RANK + 1)]

    @property
    def relators(self) -> tuple[Word, ...]:
        return self.presentation.relators

    def exponent_matrix(self) -> list[list[int]]:
        return [r.exponent_sums(RANK) for r in self.relators]

    def abelianization(self) -> list[int]:
        return abelianization_invariants(self.presentation)


def abelianization_invariants(pres: Presentation) -> list[int]:
    """Invariant factors of ``H_1``: 0 stands for a copy of ``Z``; trivial factors omitted."""
    from sympy import Matrix
    from sympy.matrices.normalforms import smith_normal_form

    rows = [r.exponent_sums(pres.rank) for r in pres.relators]
    if not rows or all(x == 0 for row in rows for x in row):
        return [0] * pres.rank
    snf = smith_normal_form(Matrix(rows))
    diag = [abs(int(snf[k, k])) for k in range(min(snf.shape))]
    factors = [d for d in diag if d != 1]
    factors += [0] * (pres.rank - len(diag))
    return sorted(factors, key=lambda d: (d != 0, d))


def presentation(i: int) -> TowerPresentation:
    return TowerPresentation(i, Presentation(RANK, relators(i).words))


def kernel_generators(j: int, i: int) -> list[Word]:
    """Normal generators of ``ker(G_j -> G_i)``, as words read in ``G_j``."""
    if not 1 <= i < j:
        raise PreconditionError(f"need 1 <= i < j, got i={i}, j={j}")
    relators(j)  # enforce the length ceiling for the source level
    return list(relators(i).words)


def ap_witness(i: int) -> list:
    """``r(i,j)`` as a commutator of level-``(i-1)`` relators, for j = 1, 2, 3."""
    if i < 2:
        raise PreconditionError("AP witnesses start at level 2")
    prev = relators(i - 1).words
    return [Comm(Leaf(prev[u - 1]), Leaf(prev[v - 1])) for u, v in (PAIRS[1], PAIRS[2], PAIRS[3])]


def identity_images() -> tuple[Word, ...]:
    return tuple(Word.gen(j) for j in range(1, RANK + 1))


def tower_sequence(max_level: int, augmentation: str = "standard") -> AugmentedSequence:
    """``G_1 <- G_2 <- ... <- G_max`` with identity-on-generator bonds.

    ``augmentation`` is ``"standard"`` (``L_1 = G_1``, ``L_i = ker lambda_i``) or
    ``"maximal"`` (``L_i = G_i``).  The standard one reads ``G_1`` as the
    kernel of the map to the trivial group, so it is small.
    """
    if max_level < 1:
        raise PreconditionError("need at least one level")
    if augmentation not in ("standard", "maximal"):
        raise ValueError("augmentation must be 'standard' or 'maximal'")
    gens = identity_images()
    levels = []
    for i in range(1, max_level + 1):
        pres = Presentation(RANK, relators(i).words)
        if i == 1:
            levels.append(Level(1, pres, augmentation=gens))
            continue
        kernel = relators(i - 1).words
        trivial = tuple(MembershipCertificate(k, (Factor(s, 1),)) for s, k in enumerate(kernel))
        if augmentation == "standard":
            aug, small = kernel, trivial
        else:
            aug, small = gens, None
        levels.append(
            Level(
                label=i,
                presentation=pres,
                augmentation=aug,
                bond=BondingMap(i, i - 1, gens),
                section=gens,
                kernel=kernel,
                small_certificates=small,
                relator_lifts=trivial,
                kernel_certificates=tuple(kernel_certificate(levels[-1].presentation, k) for k in kernel),
            )
        )
    return AugmentedSequence(tuple(levels))


def tower_witness(seq: AugmentedSequence) -> PerfectnessWitness:
    """Plain perfectness witnesses ``r(i-1,j) = [r(i-2,u), r(i-2,v)]`` (no relator corrections)."""
    levels = {}
    for pos in range(1, len(seq.levels)):
        lv = seq.levels[pos]
        i = lv.label
        if i - seq.levels[pos - 1].label != 1:
            raise PreconditionError("tower witnesses are built on consecutive levels")
        j_gens = seq.j_generators(i)
        lower = relator_words(i - 2)
        entries = []
        for j, k in enumerate(lv.kernel, start=1):
            u, v = PAIRS[j]
            left = _j_certificate(lower[u - 1], j_gens)
            right = _j_certificate(lower[v - 1], j_gens)
            entries.append(GeneratorWitness(k, (CommutatorTerm(left, right),)))
        levels[i] = tuple(entries)
    return PerfectnessWitness(PLAIN, levels)


def _j_certificate(w: Word, pool) -> MembershipCertificate:
    for idx, g in enumerate(pool):
        if g == w:
            return MembershipCertificate(w, (Factor(idx, 1),))
    return letterwise_certificate(w, pool)


def witnessed_tower(max_level: int, augmentation: str = "standard") -> AugmentedSequence:
    seq = tower_sequence(max_level, augmentation)
    return AugmentedSequence(seq.levels, tower_witness(seq))
