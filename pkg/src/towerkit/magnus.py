"""Truncated Magnus embedding of a free group.

Series live in the ring of noncommutative power series in nilpotent
indeterminates ``x_1 .. x_n`` (``x_j * x_j = 0``), truncated at a degree
cap ``D``.  A monomial is a tuple of generator indices with no two equal
neighbours; the empty tuple is the constant ``1``.  Coefficients are
Python ints, so they never overflow.

The map ``beta`` sends ``a_j`` to ``1 + x_j`` and ``a_j^-1`` to ``1 - x_j``.
The depth of a group element ``w`` is the least degree of a nonzero term of
``beta(w) - 1``; membership of ``w`` in the ``k``-th lower central term
forces depth >= k, and in the ``k``-th derived term forces depth >= 2**k.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Mapping

from towerkit.errors import CapMismatchError, PreconditionError, RankError, ResourceLimitError
from towerkit.words import Word, reduce

DEFAULT_TERM_BOUND = 10**7
DEFAULT_CAP_CEILING = 16

Monomial = tuple


def count_monomials(n: int, d: int) -> int:
    """Number of degree-``d`` monomials in ``n`` nilpotent indeterminates."""
    if n < 1 or d < 0:
        raise ValueError("need n >= 1 and d >= 0")
    if d == 0:
        return 1
    return n * (n - 1) ** (d - 1)


class TruncatedSeries:
    """Sparse truncated series; terms are grouped by degree.

    ``terms[d]`` maps degree-``d`` monomials to nonzero coefficients.
    """

    __slots__ = ("cap", "_by_degree")

    def __init__(self, cap: int, terms: Mapping[Monomial, int] | None = None):
        if cap < 0:
            raise ValueError("cap must be nonnegative")
        self.cap = cap
        by_degree: list[dict] = [dict() for _ in range(cap + 1)]
        for mono, coef in (terms or {}).items():
            mono = tuple(mono)
            if len(mono) > cap or coef == 0 or not _admissible(mono):
                continue
            bucket = by_degree[len(mono)]
            c = bucket.get(mono, 0) + coef
            if c:
                bucket[mono] = c
            else:
                bucket.pop(mono, None)
        self._by_degree = by_degree

    @classmethod
    def _from_buckets(cls, cap, buckets):
        s = cls.__new__(cls)
        s.cap = cap
        s._by_degree = buckets
        return s

    @classmethod
    def one(cls, cap: int) -> "TruncatedSeries":
        return cls(cap, {(): 1})

    def degree_part(self, d: int) -> dict:
        return dict(self._by_degree[d]) if d <= self.cap else {}

    def items(self):
        """Terms in (degree, lexicographic) order."""
        for bucket in self._by_degree:
            for mono in sorted(bucket):
                yield mono, bucket[mono]

    @property
    def terms(self) -> dict:
        return dict(self.items())

    def __len__(self):
        return sum(len(b) for b in self._by_degree)

    def constant(self) -> int:
        return self._by_degree[0].get((), 0)

    def __eq__(self, other):
        return (
            isinstance(other, TruncatedSeries)
            and self.cap == other.cap
            and self._by_degree == other._by_degree
        )

    def __repr__(self):
        return f"TruncatedSeries(cap={self.cap}, {format_series(self)})"

    def __mul__(self, other):
        return mul(self, other)

    def __sub__(self, other):
        _check_caps(self, other)
        out = [dict(b) for b in self._by_degree]
        for d, bucket in enumerate(other._by_degree):
            target = out[d]
            for mono, c in bucket.items():
                v = target.get(mono, 0) - c
                if v:
                    target[mono] = v
                else:
                    target.pop(mono, None)
        return TruncatedSeries._from_buckets(self.cap, out)

    def __add__(self, other):
        _check_caps(self, other)
        out = [dict(b) for b in self._by_degree]
        for d, bucket in enumerate(other._by_degree):
            target = out[d]
            for mono, c in bucket.items():
                v = target.get(mono, 0) + c
                if v:
                    target[mono] = v
                else:
                    target.pop(mono, None)
        return TruncatedSeries._from_buckets(self.cap, out)

    def is_valid(self) -> bool:
        """Storage invariant: admissible monomials, nonzero coefficients, degree <= cap."""
        if len(self._by_degree) != self.cap + 1:
            return False
        for d, bucket in enumerate(self._by_degree):
            for mono, c in bucket.items():
                if len(mono) != d or c == 0 or not _admissible(mono):
                    return False
        return True

    def to_json(self) -> dict:
        return {
            "cap": self.cap,
            "terms": [{"mono": list(m), "coef": str(c)} for m, c in self.items()],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "TruncatedSeries":
        return cls(int(doc["cap"]), {tuple(t["mono"]): int(t["coef"]) for t in doc["terms"]})


def _admissible(mono) -> bool:
    return all(mono[k] != mono[k + 1] for k in range(len(mono) - 1)) and all(
        isinstance(i, int) and i >= 1 for i in mono
    )


def _check_caps(s, t):
    if s.cap != t.cap:
        raise CapMismatchError(f"cap mismatch: {s.cap} vs {t.cap}")


def format_series(s: TruncatedSeries) -> str:
    parts = []
    for mono, c in s.items():
        body = "".join(f"x{i}" for i in mono)
        if not body:
            parts.append(str(c))
            continue
        if c == 1:
            coef = ""
        elif c == -1:
            coef = "-"
        else:
            coef = f"{c}*"
        parts.append(f"{coef}{body}")
    if not parts:
        return "0"
    return " + ".join(parts).replace("+ -", "- ")


def letter_image(j: int, sign: int, cap: int, rank: int | None = None) -> TruncatedSeries:
    """``1 + x_j`` for sign +1, ``1 - x_j`` for sign -1."""
    if j < 1 or (rank is not None and j > rank):
        raise RankError(f"generator index {j} out of range")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if cap < 1:
        raise ValueError("cap must be >= 1")
    return TruncatedSeries(cap, {(): 1, (j,): sign})


def mul(s: TruncatedSeries, t: TruncatedSeries, term_bound: int = DEFAULT_TERM_BOUND) -> TruncatedSeries:
    _check_caps(s, t)
    cap = s.cap
    sb, tb = s._by_degree, t._by_degree
    rank = max(2, _series_rank(s), _series_rank(t))
    projected = 0
    for d in range(cap + 1):
        pairs = sum(len(sb[a]) * len(tb[d - a]) for a in range(d + 1))
        projected += min(pairs, count_monomials(rank, d))
    if projected > term_bound:
        raise ResourceLimitError(f"projected {projected} terms exceeds bound {term_bound}")
    out: list[dict] = [dict() for _ in range(cap + 1)]
    for da, abucket in enumerate(sb):
        if not abucket:
            continue
        for db in range(cap - da + 1):
            bbucket = tb[db]
            if not bbucket:
                continue
            target = out[da + db]
            for ma, ca in abucket.items():
                last = ma[-1] if ma else None
                for mb, cb in bbucket.items():
                    if last is not None and mb and mb[0] == last:
                        continue
                    m = ma + mb
                    v = target.get(m, 0) + ca * cb
                    if v:
                        target[m] = v
                    else:
                        del target[m]
    return TruncatedSeries._from_buckets(cap, out)


def _series_rank(s: TruncatedSeries) -> int:
    return max((max(m) for b in s._by_degree for m in b if m), default=0)


def _mul_letter(buckets: list[dict], x: int, cap: int) -> list[dict]:
    """Right multiplication by ``1 +- x_j`` in place; returns the buckets."""
    j = abs(x)
    negative = x < 0
    for d in range(min(cap, len(buckets) - 1) - 1, -1, -1):
        src = buckets[d]
        if not src:
            continue
        dst = buckets[d + 1]
        for mono, c in src.items():
            if mono and mono[-1] == j:
                continue
            m = mono + (j,)
            v = dst.get(m, 0) + (-c if negative else c)
            if v:
                dst[m] = v
            else:
                del dst[m]
    return buckets


def projected_terms(length: int, cap: int, rank: int) -> int:
    """Upper bound on the number of terms of ``beta(w)`` for a word of this length."""
    return sum(min(comb(length, d), count_monomials(rank, d)) for d in range(min(cap, length) + 1))


def beta(w: Word, cap: int, term_bound: int = DEFAULT_TERM_BOUND) -> TruncatedSeries:
    """Magnus image of ``w`` truncated at degree ``cap``."""
    if cap < 1:
        raise ValueError("cap must be >= 1")
    w = reduce(w)
    rank = max(w.max_index(), 1)
    need = projected_terms(len(w), cap, max(rank, 2))
    if need > term_bound:
        raise ResourceLimitError(f"projected {need} terms exceeds bound {term_bound}")
    buckets: list[dict] = [dict() for _ in range(cap + 1)]
    buckets[0][()] = 1
    for x in w.letters:
        _mul_letter(buckets, x, cap)
    return TruncatedSeries._from_buckets(cap, buckets)


@dataclass(frozen=True)
class Depth:
    """Exact(d) when ``d`` is known; AtLeast(cap+1) when the series is 1 up to the cap."""

    value: int
    exact: bool

    @classmethod
    def Exact(cls, d: int) -> "Depth":
        return cls(d, True)

    @classmethod
    def AtLeast(cls, d: int) -> "Depth":
        return cls(d, False)

    def at_least(self, k: int) -> bool:
        """True when the depth is certainly >= k."""
        return self.value >= k

    def below(self, k: int) -> bool:
        """True when the depth is certainly < k."""
        return self.exact and self.value < k

    def __str__(self):
        return f"{'Exact' if self.exact else 'AtLeast'}({self.value})"

    def to_json(self) -> dict:
        return {"kind": "exact" if self.exact else "at_least", "value": self.value}


def depth(s: TruncatedSeries) -> Depth:
    if s.constant() != 1:
        raise PreconditionError("depth needs a series with constant term 1")
    for d in range(1, s.cap + 1):
        if s._by_degree[d]:
            return Depth.Exact(d)
    return Depth.AtLeast(s.cap + 1)


def leading_form(s: TruncatedSeries) -> dict:
    """Lowest-degree homogeneous part of ``s - 1``."""
    d = depth(s)
    return s.degree_part(d.value) if d.exact else {}


def depth_of_word(w: Word, cap: int, term_bound: int = DEFAULT_TERM_BOUND) -> Depth:
    return depth(beta(reduce(w), cap, term_bound))


def auto_depth(
    w: Word,
    hint: int = 1,
    ceiling: int = DEFAULT_CAP_CEILING,
    term_bound: int = DEFAULT_TERM_BOUND,
) -> Depth:
    """Depth with an escalating cap: start at ``hint``, double up to ``ceiling``."""
    w = reduce(w)
    if not w:
        return Depth.AtLeast(ceiling + 1)
    cap = max(1, min(hint, ceiling))
    while True:
        d = depth_of_word(w, cap, term_bound)
        if d.exact or cap >= ceiling:
            return d
        cap = min(2 * cap, ceiling)
