"""Free group words, commutator expressions and their text grammar.

A letter is a nonzero signed integer: ``j`` stands for the generator
``a_j`` and ``-j`` for its inverse.  Words are immutable tuples of
letters; every group operation returns a freely reduced word.

Commutators follow the convention ``[a, b] = a^-1 b^-1 a b`` and
conjugation ``w^g = g^-1 w g``.

Text grammar (whitespace is insignificant)::

    product := factor ( '*'? factor )*
    factor  := atom ( '^-1' | '^' conj )*
    conj    := generator | '(' product ')'
    atom    := generator | '1' | '[' product ',' product ']' | '(' product ')'
    generator := 'a' digits

A run of juxtaposed generators is one word leaf; ``(u)^g`` conjugates by
``g`` and ``(u)^-1`` inverts.  ``1`` is the identity.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Union

from towerkit.errors import ParseError, RankError


class Letter(NamedTuple):
    gen: int
    sign: int

    def encode(self) -> int:
        return self.gen * self.sign


class Word:
    """An element of a free group, stored as its letter sequence."""

    __slots__ = ("letters", "reduced")

    def __init__(self, letters: Iterable[int] = (), reduced: bool | None = None):
        letters = tuple(letters)
        for x in letters:
            if not isinstance(x, int) or x == 0:
                raise ValueError(f"letters must be nonzero ints, got {x!r}")
        object.__setattr__(self, "letters", letters)
        if reduced is None:
            reduced = all(letters[k] != -letters[k + 1] for k in range(len(letters) - 1))
        object.__setattr__(self, "reduced", reduced)

    def __setattr__(self, name, value):
        raise AttributeError("Word is immutable")

    def __reduce__(self):
        return (Word, (self.letters, self.reduced))

    @classmethod
    def from_letters(cls, letters: Iterable[Letter | tuple[int, int]]) -> "Word":
        return cls(g * s for g, s in letters)

    @classmethod
    def gen(cls, j: int, sign: int = 1) -> "Word":
        return cls((j * sign,), reduced=True)

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __bool__(self):
        return bool(self.letters)

    def __eq__(self, other):
        return isinstance(other, Word) and self.letters == other.letters

    def __hash__(self):
        return hash(("Word", self.letters))

    def __repr__(self):
        return f"Word({format_word(self)!r})"

    def __str__(self):
        return format_word(self)

    def __mul__(self, other: "Word") -> "Word":
        return multiply(self, other)

    def __invert__(self) -> "Word":
        return invert(self)

    def max_index(self) -> int:
        return max((abs(x) for x in self.letters), default=0)

    def exponent_sums(self, rank: int) -> list[int]:
        sums = [0] * rank
        for x in self.letters:
            sums[abs(x) - 1] += 1 if x > 0 else -1
        return sums


IDENTITY = Word((), reduced=True)


def reduce(w: Word) -> Word:
    if w.reduced:
        return w
    return Word(_reduce_letters(w.letters), reduced=True)


def _reduce_letters(letters) -> list[int]:
    stack: list[int] = []
    for x in letters:
        if stack and stack[-1] == -x:
            stack.pop()
        else:
            stack.append(x)
    return stack


def multiply(*words: Word) -> Word:
    stack: list[int] = []
    for w in words:
        for x in w.letters:
            if stack and stack[-1] == -x:
                stack.pop()
            else:
                stack.append(x)
    return Word(stack, reduced=True)


def invert(w: Word) -> Word:
    return Word((-x for x in reversed(w.letters)), reduced=w.reduced)


def conjugate(w: Word, g: Word) -> Word:
    """``g^-1 w g``, reduced."""
    return multiply(invert(g), w, g)


def commutator(a: Word, b: Word) -> Word:
    """``a^-1 b^-1 a b``, reduced."""
    return multiply(invert(a), invert(b), a, b)


def power(w: Word, n: int) -> Word:
    base = w if n >= 0 else invert(w)
    return multiply(*([base] * abs(n)))


def substitute(w: Word, images) -> Word:
    """Apply the homomorphism sending ``a_j`` to ``images[j-1]``."""
    parts = []
    for x in w.letters:
        img = images[abs(x) - 1]
        parts.append(img if x > 0 else invert(img))
    return multiply(*parts)


class FreeGroup:
    """Ambient context: carries the rank and validates words against it."""

    def __init__(self, rank: int):
        if rank < 1:
            raise ValueError("rank must be positive")
        self.rank = rank

    def __repr__(self):
        return f"FreeGroup({self.rank})"

    def __eq__(self, other):
        return isinstance(other, FreeGroup) and other.rank == self.rank

    def __hash__(self):
        return hash(("FreeGroup", self.rank))

    def gens(self) -> list[Word]:
        return [Word.gen(j) for j in range(1, self.rank + 1)]

    def check(self, w: Word) -> Word:
        if w.max_index() > self.rank:
            raise RankError(f"generator a{w.max_index()} exceeds rank {self.rank}")
        return w

    def word(self, text: str) -> Word:
        """Parse text and evaluate it to a reduced word."""
        return as_word(parse(text, self.rank))

    def parse(self, text: str):
        return parse(text, self.rank)


# -- commutator expressions ---------------------------------------------------


@dataclass(frozen=True)
class Leaf:
    word: Word


@dataclass(frozen=True)
class Comm:
    left: "CommutatorExpr"
    right: "CommutatorExpr"


@dataclass(frozen=True)
class Prod:
    factors: tuple["CommutatorExpr", ...]

    def __init__(self, factors=()):
        object.__setattr__(self, "factors", tuple(factors))


@dataclass(frozen=True)
class Inv:
    expr: "CommutatorExpr"


@dataclass(frozen=True)
class Conj:
    expr: "CommutatorExpr"
    conjugator: Word


CommutatorExpr = Union[Leaf, Comm, Prod, Inv, Conj]


def flatten(e) -> Word:
    """Evaluate an expression tree (or word) to a reduced word."""
    if isinstance(e, Word):
        return reduce(e)
    if isinstance(e, Leaf):
        return reduce(e.word)
    if isinstance(e, Comm):
        return commutator(flatten(e.left), flatten(e.right))
    if isinstance(e, Prod):
        return multiply(*(flatten(f) for f in e.factors))
    if isinstance(e, Inv):
        return invert(flatten(e.expr))
    if isinstance(e, Conj):
        return conjugate(flatten(e.expr), reduce(e.conjugator))
    raise TypeError(f"not a commutator expression: {e!r}")


as_word = flatten


def expr_max_index(e) -> int:
    if isinstance(e, Word):
        return e.max_index()
    if isinstance(e, Leaf):
        return e.word.max_index()
    if isinstance(e, Comm):
        return max(expr_max_index(e.left), expr_max_index(e.right))
    if isinstance(e, Prod):
        return max((expr_max_index(f) for f in e.factors), default=0)
    if isinstance(e, Inv):
        return expr_max_index(e.expr)
    if isinstance(e, Conj):
        return max(expr_max_index(e.expr), e.conjugator.max_index())
    raise TypeError(f"not a commutator expression: {e!r}")


def normalize(e):
    """Canonical tree shape: reduced leaves, flattened one-level products.

    ``parse(format(e)) == normalize(e)`` for every expression ``e``.
    """
    if isinstance(e, Word):
        return reduce(e)
    if isinstance(e, Leaf):
        return Leaf(reduce(e.word))
    if isinstance(e, Comm):
        return Comm(normalize(e.left), normalize(e.right))
    if isinstance(e, Inv):
        return Inv(normalize(e.expr))
    if isinstance(e, Conj):
        return Conj(normalize(e.expr), reduce(e.conjugator))
    if isinstance(e, Prod):
        out = []
        for f in e.factors:
            f = normalize(f)
            if isinstance(f, Prod):
                out.extend(f.factors)
            else:
                out.append(f)
        if not out:
            return Leaf(IDENTITY)
        if len(out) == 1:
            return out[0]
        return Prod(out)
    raise TypeError(f"not a commutator expression: {e!r}")


# -- text format ----------------------------------------------------------------


def format_word(w: Word) -> str:
    if not w.letters:
        return "1"
    return " ".join(f"a{x}" if x > 0 else f"a{-x}^-1" for x in w.letters)


def format(x) -> str:  # noqa: A001 - mirrors the public operation name
    if isinstance(x, Word):
        return format_word(x)
    return _format_expr(x, in_product=False)


def _format_expr(e, in_product: bool) -> str:
    if isinstance(e, Leaf):
        text = format_word(e.word)
        return f"({text})" if in_product else text
    if isinstance(e, Comm):
        return f"[{_format_expr(e.left, False)},{_format_expr(e.right, False)}]"
    if isinstance(e, Prod):
        if not e.factors:
            return "1"
        if len(e.factors) == 1:
            return _format_expr(e.factors[0], in_product)
        return " ".join(_format_expr(f, True) for f in e.factors)
    if isinstance(e, Inv):
        return f"({_format_expr(e.expr, False)})^-1"
    if isinstance(e, Conj):
        g = e.conjugator
        if len(g) == 1 and g.letters[0] > 0:
            gtext = format_word(g)
        else:
            gtext = f"({format_word(g)})"
        return f"({_format_expr(e.expr, False)})^{gtext}"
    raise TypeError(f"not a commutator expression: {e!r}")


_GEN = re.compile(r"a(\d+)")


class _Parser:
    def __init__(self, text: str, rank: int | None):
        self.text = text
        self.rank = rank
        self.pos = 0

    def error(self, msg):
        raise ParseError(msg, self.text, self.pos)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        if self.pos >= len(self.text):
            return ""
        if self.text.startswith("^-1", self.pos):
            return "^-1"
        return self.text[self.pos]

    def take(self, tok: str):
        if self.peek() != tok:
            self.error(f"expected {tok!r}")
        self.pos += len(tok)

    def generator(self) -> int:
        self.skip_ws()
        m = _GEN.match(self.text, self.pos)
        if not m:
            self.error("expected generator")
        j = int(m.group(1))
        if j < 1:
            self.error("generator index must be positive")
        if self.rank is not None and j > self.rank:
            self.error(f"generator a{j} exceeds rank {self.rank}")
        self.pos = m.end()
        if self.peek() == "^-1":
            self.pos += 3
            return -j
        return j

    def product(self):
        factors = []
        letters: list[int] = []
        while True:
            tok = self.peek()
            if tok == "a":
                letters.append(self.generator())
                continue
            if tok == "*":
                self.pos += 1
                continue
            if tok in ("[", "(", "1"):
                if letters:
                    factors.append(Leaf(Word(letters)))
                    letters = []
                factors.append(self.factor())
                continue
            break
        if letters:
            factors.append(Leaf(Word(letters)))
        if not factors:
            self.error("expected a word or expression")
        if len(factors) == 1:
            return factors[0]
        return Prod(factors)

    def factor(self):
        tok = self.peek()
        if tok == "1":
            self.pos += 1
            node = Leaf(IDENTITY)
        elif tok == "[":
            self.pos += 1
            left = self.product()
            self.take(",")
            right = self.product()
            self.take("]")
            node = Comm(left, right)
        elif tok == "(":
            self.pos += 1
            node = self.product()
            self.take(")")
        else:
            self.error("unexpected token")
        while True:
            tok = self.peek()
            if tok == "^-1":
                self.pos += 3
                node = Inv(node)
            elif tok == "^":
                self.pos += 1
                node = Conj(node, self.conjugator())
            else:
                return node

    def conjugator(self) -> Word:
        tok = self.peek()
        if tok == "a":
            return Word.gen(self.generator())
        if tok == "(":
            self.pos += 1
            inner = self.product()
            self.take(")")
            return flatten(inner)
        self.error("expected conjugator")


def parse(text: str, rank: int | None = None):
    """Parse word/expression text.

    Returns a :class:`Word` when the text is a plain run of generators,
    otherwise a commutator expression tree.
    """
    p = _Parser(text, rank)
    node = p.product()
    p.skip_ws()
    if p.pos != len(text):
        p.error("unexpected trailing input")
    if isinstance(node, Leaf):
        return node.word
    return node


def parse_expr(text: str, rank: int | None = None):
    """Like :func:`parse` but always returns an expression tree."""
    node = parse(text, rank)
    return Leaf(node) if isinstance(node, Word) else node


def parse_word(text: str, rank: int | None = None) -> Word:
    """Parse and evaluate to a reduced word."""
    return flatten(parse(text, rank))
