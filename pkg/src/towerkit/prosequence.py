"""Augmented inverse sequences of finitely presented groups.

Normal-closure membership and perfectness are undecidable in general, so
this module only *checks certificates*.  A membership certificate claims

    target  =  prod_m  g_m^-1 x_m^(+-1) g_m   *   prod_t  h_t^-1 r_t^(+-1) h_t

as free words, where the ``x_m`` are normal generators of the subgroup and
the ``r_t`` are relators of the ambient presentation.  A perfectness
witness for a kernel generator ``k`` claims ``k = prod [a_m, b_m] * (relator
correction)`` with each ``a_m``, ``b_m`` carrying membership certificates.

Sequences are indexed by increasing integer labels ``i_0 < i_1 < ...``;
the bond at label ``i_t`` maps ``G_{i_t}`` onto ``G_{i_{t-1}}``.  For a level
with kernel ``K`` (normal generators listed on the level) and augmentation
``L`` on the previous level, ``J = bond^-1(L)`` is normally generated by the
section-lifts of the ``L`` generators followed by the ``K`` generators; that
ordering is what ``J``-certificates index into.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

from towerkit.errors import PreconditionError, TransportError
from towerkit.words import (
    IDENTITY,
    Comm,
    Conj,
    Leaf,
    Prod,
    Word,
    commutator,
    conjugate,
    invert,
    multiply,
    parse_word,
    reduce,
    substitute,
)

SCHEMA_VERSION = 1
PLAIN = "plain"
STRONG = "strong"


@dataclass(frozen=True)
class Presentation:
    rank: int
    relators: tuple[Word, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "relators", tuple(reduce(r) for r in self.relators))


@dataclass(frozen=True)
class BondingMap:
    """Homomorphism ``G_source -> G_target`` given by generator images."""

    source: int
    target: int
    images: tuple[Word, ...]

    def apply(self, w: Word) -> Word:
        return substitute(w, self.images)

    def is_identity(self) -> bool:
        return all(img == Word.gen(j + 1) for j, img in enumerate(self.images))


@dataclass(frozen=True)
class Factor:
    """``conjugator^-1 * pool[index]^sign * conjugator``."""

    index: int
    sign: int = 1
    conjugator: Word = IDENTITY

    def value(self, pool: Sequence[Word]) -> Word:
        x = pool[self.index]
        return conjugate(x if self.sign > 0 else invert(x), self.conjugator)


def _product(factors: Iterable[Factor], pool: Sequence[Word]) -> Word:
    return multiply(*(f.value(pool) for f in factors))


@dataclass(frozen=True)
class MembershipCertificate:
    target: Word
    factors: tuple[Factor, ...] = ()
    corrections: tuple[Factor, ...] = ()

    def evaluate(self, generators: Sequence[Word], relators: Sequence[Word]) -> Word:
        return multiply(_product(self.factors, generators), _product(self.corrections, relators))

    def expression(self, generators: Sequence[Word], relators: Sequence[Word]):
        def conj(f, pool):
            inner = Leaf(pool[f.index] if f.sign > 0 else invert(pool[f.index]))
            return Conj(inner, f.conjugator)

        return Prod(
            [conj(f, generators) for f in self.factors] + [conj(f, relators) for f in self.corrections]
        )


def _indices_ok(factors, pool) -> bool:
    return all(0 <= f.index < len(pool) and f.sign in (1, -1) for f in factors)


def verify_certificate(c: MembershipCertificate, context: Presentation, generators: Sequence[Word]) -> bool:
    """True iff the certified product free-reduces to the target word."""
    if not (_indices_ok(c.factors, generators) and _indices_ok(c.corrections, context.relators)):
        return False
    words = [c.target, *generators, *context.relators]
    words += [f.conjugator for f in c.factors + c.corrections]
    if any(w.max_index() > context.rank for w in words):
        return False
    return c.evaluate(generators, context.relators) == reduce(c.target)


def trivial_certificate(target: Word, generators: Sequence[Word]) -> MembershipCertificate:
    """Certificate for a word that literally is a generator (or its inverse) or the identity."""
    target = reduce(target)
    if not target:
        return MembershipCertificate(IDENTITY)
    for idx, g in enumerate(generators):
        if reduce(g) == target:
            return MembershipCertificate(target, (Factor(idx, 1),))
        if reduce(invert(g)) == target:
            return MembershipCertificate(target, (Factor(idx, -1),))
    raise PreconditionError(f"{target} is not literally one of the generators")


def letterwise_certificate(target: Word, generators: Sequence[Word]) -> MembershipCertificate:
    """Certificate writing ``target`` letter by letter, for pools containing every ``a_j``."""
    position = {}
    for idx, g in enumerate(generators):
        if len(g) == 1 and g.letters[0] > 0:
            position.setdefault(g.letters[0], idx)
    target = reduce(target)
    factors = []
    for x in target.letters:
        if abs(x) not in position:
            raise PreconditionError(f"generator a{abs(x)} not among the normal generators")
        factors.append(Factor(position[abs(x)], 1 if x > 0 else -1))
    return MembershipCertificate(target, tuple(factors))


@dataclass(frozen=True)
class CommutatorTerm:
    left: MembershipCertificate
    right: MembershipCertificate


@dataclass(frozen=True)
class GeneratorWitness:
    """``target = prod [left_m, right_m] * corrections`` (free identity)."""

    target: Word
    terms: tuple[CommutatorTerm, ...] = ()
    corrections: tuple[Factor, ...] = ()

    def evaluate(self, relators: Sequence[Word]) -> Word:
        comms = [commutator(reduce(t.left.target), reduce(t.right.target)) for t in self.terms]
        return multiply(*comms, _product(self.corrections, relators))

    def expression(self, relators: Sequence[Word]):
        comms = [Comm(Leaf(t.left.target), Leaf(t.right.target)) for t in self.terms]
        corr = [Conj(Leaf(relators[f.index] if f.sign > 0 else invert(relators[f.index])), f.conjugator)
                for f in self.corrections]
        return Prod(comms + corr)


@dataclass(frozen=True)
class PerfectnessWitness:
    mode: str
    levels: dict = field(default_factory=dict)  # label -> tuple[GeneratorWitness, ...]

    def __post_init__(self):
        if self.mode not in (PLAIN, STRONG):
            raise ValueError(f"mode must be {PLAIN!r} or {STRONG!r}")


@dataclass(frozen=True)
class Level:
    """One group of a sequence together with the bond to its predecessor.

    ``section`` lists, for each generator of the previous group, a word in
    this group's generators mapping onto it.  ``small_certificates`` show each
    augmentation generator lies in ``ncl(kernel)``; ``relator_lifts`` show each
    previous relator's section-lift lies in ``ncl(kernel)`` here.
    ``kernel_certificates`` show each kernel generator's bond image is a
    product of conjugates of the previous group's relators (no generators).
    """

    label: int
    presentation: Presentation
    augmentation: tuple[Word, ...] = ()
    bond: BondingMap | None = None
    section: tuple[Word, ...] | None = None
    kernel: tuple[Word, ...] = ()
    small_certificates: tuple[MembershipCertificate, ...] | None = None
    relator_lifts: tuple[MembershipCertificate, ...] | None = None
    kernel_certificates: tuple[MembershipCertificate, ...] | None = None


@dataclass(frozen=True)
class AugmentedSequence:
    levels: tuple[Level, ...]
    witness: PerfectnessWitness | None = None

    def __post_init__(self):
        labels = [lv.label for lv in self.levels]
        if any(a >= b for a, b in zip(labels, labels[1:])):
            raise PreconditionError("level labels must be strictly increasing")

    @property
    def labels(self) -> tuple[int, ...]:
        return tuple(lv.label for lv in self.levels)

    def position(self, label: int) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise PreconditionError(f"no level labelled {label}") from None

    def level(self, label: int) -> Level:
        return self.levels[self.position(label)]

    def presentation(self, label: int) -> Presentation:
        return self.level(label).presentation

    @property
    def small(self) -> bool:
        return all(lv.small_certificates is not None for lv in self.levels[1:])

    def j_generators(self, label: int) -> list[Word]:
        pos = self.position(label)
        if pos == 0:
            raise PreconditionError("the first level has no bond")
        lv, prev = self.levels[pos], self.levels[pos - 1]
        return [substitute(w, lv.section) for w in prev.augmentation] + list(lv.kernel)


def compose_bonds(seq: AugmentedSequence, i: int, j: int) -> BondingMap:
    """``lambda_i o ... o lambda_j : G_j -> G_{prev(i)}``."""
    pi, pj = seq.position(i), seq.position(j)
    if pi == 0:
        raise PreconditionError("the first level has no bond")
    if pi > pj + 1:
        raise PreconditionError(f"need i <= j, got {i} > {j}")
    target = seq.levels[pi - 1]
    if pi == pj + 1:
        return BondingMap(target.label, target.label, tuple(Word.gen(g) for g in range(1, target.presentation.rank + 1)))
    images = [Word.gen(g) for g in range(1, seq.levels[pj].presentation.rank + 1)]
    for pos in range(pj, pi - 1, -1):
        bond = seq.levels[pos].bond
        images = [bond.apply(w) for w in images]
    return BondingMap(j, target.label, tuple(images))


def _lift(seq: AugmentedSequence, w: Word, pos_from: int, pos_to: int) -> Word:
    for pos in range(pos_from + 1, pos_to + 1):
        sec = seq.levels[pos].section
        if sec is None:
            raise TransportError(f"level {seq.levels[pos].label} declares no generator section")
        w = substitute(w, sec)
    return w


def verify_sequence(seq: AugmentedSequence) -> list[str]:
    """Check every stored certificate; returns a list of problems (empty when sound)."""
    problems = []
    for pos in range(1, len(seq.levels)):
        lv, prev = seq.levels[pos], seq.levels[pos - 1]
        if lv.bond is None:
            problems.append(f"level {lv.label}: missing bond")
            continue
        if len(lv.bond.images) != lv.presentation.rank:
            problems.append(f"level {lv.label}: bond needs one image per generator")
        if lv.section is not None:
            for g, img in enumerate(lv.section, start=1):
                if reduce(lv.bond.apply(img)) != Word.gen(g):
                    problems.append(f"level {lv.label}: section of a{g} does not map back freely")
        if lv.small_certificates is not None:
            if len(lv.small_certificates) != len(lv.augmentation):
                problems.append(f"level {lv.label}: one smallness certificate per augmentation generator")
            for ell, cert in zip(lv.augmentation, lv.small_certificates):
                if reduce(cert.target) != reduce(ell) or not verify_certificate(cert, lv.presentation, lv.kernel):
                    problems.append(f"level {lv.label}: smallness certificate for {ell} fails")
        if lv.relator_lifts is not None:
            for r, cert in zip(prev.presentation.relators, lv.relator_lifts):
                if lv.section is None or reduce(cert.target) != _lift(seq, r, pos - 1, pos):
                    problems.append(f"level {lv.label}: relator lift target mismatch for {r}")
                elif not verify_certificate(cert, lv.presentation, lv.kernel):
                    problems.append(f"level {lv.label}: relator lift certificate for {r} fails")
        if lv.kernel_certificates is not None:
            for k, cert in zip(lv.kernel, lv.kernel_certificates):
                if cert.factors or reduce(cert.target) != reduce(lv.bond.apply(k)):
                    problems.append(f"level {lv.label}: kernel certificate for {k} has the wrong shape")
                elif not verify_certificate(cert, prev.presentation, ()):
                    problems.append(f"level {lv.label}: kernel certificate for {k} fails")
    return problems


def kernel_certificate(pres: Presentation, image: Word) -> MembershipCertificate:
    """Certificate that ``image`` is trivial because it literally is a relator (or inverse)."""
    image = reduce(image)
    if not image:
        return MembershipCertificate(IDENTITY)
    for idx, r in enumerate(pres.relators):
        if r == image:
            return MembershipCertificate(image, (), (Factor(idx, 1),))
        if invert(r) == image:
            return MembershipCertificate(image, (), (Factor(idx, -1),))
    raise PreconditionError(f"{image} is not literally a relator")


def check_perfectness(seq: AugmentedSequence, witness: PerfectnessWitness, mode: str | None = None) -> list[str]:
    """Detailed form of :func:`verify_perfectness`: the list of failures."""
    mode = mode or witness.mode
    if mode == STRONG and witness.mode != STRONG:
        return ["plain witness cannot certify strong perfectness"]
    failures = []
    for pos in range(1, len(seq.levels)):
        lv = seq.levels[pos]
        k_gens = list(lv.kernel)
        j_gens = seq.j_generators(lv.label)
        left_pool = k_gens if mode == STRONG else j_gens
        entries = witness.levels.get(lv.label, ())
        if len(entries) != len(k_gens):
            failures.append(f"level {lv.label}: {len(entries)} witnesses for {len(k_gens)} kernel generators")
            continue
        rels = lv.presentation.relators
        for k, gw in zip(k_gens, entries):
            if reduce(gw.target) != reduce(k):
                failures.append(f"level {lv.label}: witness target {gw.target} is not {k}")
                continue
            if not _indices_ok(gw.corrections, rels) or gw.evaluate(rels) != reduce(k):
                failures.append(f"level {lv.label}: commutator identity for {k} fails")
                continue
            for m, term in enumerate(gw.terms):
                if not verify_certificate(term.left, lv.presentation, left_pool):
                    failures.append(f"level {lv.label}: left factor {m} of {k} not certified")
                if not verify_certificate(term.right, lv.presentation, j_gens):
                    failures.append(f"level {lv.label}: right factor {m} of {k} not certified")
    return failures


def verify_perfectness(seq: AugmentedSequence, witness: PerfectnessWitness, mode: str | None = None) -> bool:
    return not check_perfectness(seq, witness, mode)


# -- subsequences and witness transport ------------------------------------------------


def take_subsequence(seq: AugmentedSequence, labels: Sequence[int], transport: bool = False) -> AugmentedSequence:
    """Restrict to the given labels, composing bonds.

    With ``transport=True`` the parent's witness is carried over by lifting
    commutator factors through the declared generator sections, and every
    relator correction that stops being a relator is rewritten with the
    witnesses of the intervening kernels.
    """
    labels = list(labels)
    if not labels:
        raise PreconditionError("need at least one index")
    if any(a >= b for a, b in zip(labels, labels[1:])):
        raise PreconditionError("subsequence indices must be strictly increasing")
    positions = [seq.position(lb) for lb in labels]
    if positions == list(range(len(seq.levels))):
        return seq if transport else replace(seq, witness=None)
    if transport and seq.witness is None:
        raise TransportError("parent sequence carries no witness to transport")

    first = seq.levels[positions[0]]
    new_levels = [Level(first.label, first.presentation, first.augmentation)]
    new_witness = {}
    for pb, pc in zip(positions, positions[1:]):
        tr = _Transport(seq, pb, pc)
        lv = seq.levels[pc]
        small = None
        if lv.small_certificates is not None:
            small = tuple(tr.reindex_kernel_certificate(c, pc) for c in lv.small_certificates)
        new_levels.append(
            Level(
                label=lv.label,
                presentation=lv.presentation,
                augmentation=lv.augmentation,
                bond=compose_bonds(seq, seq.levels[pb + 1].label, lv.label),
                section=tr.section(),
                kernel=tuple(tr.kernel),
                small_certificates=small,
                relator_lifts=tr.relator_lifts(),
                kernel_certificates=tr.kernel_certificates(),
            )
        )
        if transport:
            new_witness[lv.label] = tr.witnesses()
    witness = PerfectnessWitness(seq.witness.mode, new_witness) if transport else None
    return AugmentedSequence(tuple(new_levels), witness)


# Expansion items over the target group G_c:
#   ("K", idx, sign, conj)  new kernel generator
#   ("L", idx, sign, conj)  lifted augmentation generator of G_b
#   ("R", idx, sign, conj)  relator of G_c
#   ("C", a_items, b_items) commutator [a, b]


class _Transport:
    def __init__(self, seq: AugmentedSequence, pb: int, pc: int):
        self.seq = seq
        self.pb, self.pc = pb, pc
        self.kernel: list[Word] = []
        self.kidx: dict[tuple[int, int], int] = {}
        self.korigin: list[tuple[int, int]] = []
        for pos in range(pb + 1, pc + 1):
            for s, k in enumerate(seq.levels[pos].kernel):
                self.kidx[(pos, s)] = len(self.kernel)
                self.korigin.append((pos, s))
                self.kernel.append(self.lift(k, pos))
        self.lgens = [self.lift(ell, pb) for ell in seq.levels[pb].augmentation]
        self.relators = list(seq.levels[pc].presentation.relators)
        self._witness_cache: dict[tuple[int, int], list] = {}

    def lift(self, w: Word, pos: int) -> Word:
        return _lift(self.seq, w, pos, self.pc)

    def section(self):
        rank = self.seq.levels[self.pb].presentation.rank
        try:
            return tuple(self.lift(Word.gen(g), self.pb) for g in range(1, rank + 1))
        except TransportError:
            return None

    # item algebra

    def value(self, items) -> Word:
        parts = []
        for it in items:
            if it[0] == "C":
                parts.append(commutator(self.value(it[1]), self.value(it[2])))
                continue
            kind, idx, sign, conj = it
            pool = {"K": self.kernel, "L": self.lgens, "R": self.relators}[kind]
            x = pool[idx]
            parts.append(conjugate(x if sign > 0 else invert(x), conj))
        return multiply(*parts)

    def conj(self, items, g: Word):
        if not g:
            return list(items)
        out = []
        for it in items:
            if it[0] == "C":
                out.append(("C", self.conj(it[1], g), self.conj(it[2], g)))
            else:
                out.append((it[0], it[1], it[2], multiply(it[3], g)))
        return out

    def inverse(self, items):
        out = []
        for it in reversed(items):
            if it[0] == "C":
                # [a,b]^-1 = [b^-1 a b, b^-1]
                a, b = it[1], it[2]
                out.append(("C", self.conj(a, self.value(b)), self.inverse(b)))
            else:
                out.append((it[0], it[1], -it[2], it[3]))
        return out

    def signed(self, items, sign: int, conj: Word):
        return self.conj(items if sign > 0 else self.inverse(items), conj)

    # expansions

    def relator(self, pos: int, idx: int, sign: int, conj: Word):
        """Relator ``idx`` of level ``pos`` (lifted to G_c), as K/R items."""
        if pos == self.pc:
            return [("R", idx, sign, conj)]
        nxt = self.seq.levels[pos + 1]
        if nxt.relator_lifts is None:
            raise TransportError(f"level {nxt.label} carries no relator lift certificates")
        cert = nxt.relator_lifts[idx]
        items = []
        for f in cert.factors:
            items.append(("K", self.kidx[(pos + 1, f.index)], f.sign, self.lift(f.conjugator, pos + 1)))
        for f in cert.corrections:
            items.extend(self.relator(pos + 1, f.index, f.sign, self.lift(f.conjugator, pos + 1)))
        return self.signed(items, sign, conj)

    def membership(self, cert: MembershipCertificate, pos: int, pool: str):
        """Items for a certificate over level ``pos`` with pool ``"K"`` or ``"J"``."""
        n_aug = len(self.seq.levels[pos - 1].augmentation)
        items = []
        for f in cert.factors:
            conj = self.lift(f.conjugator, pos)
            if pool == "K":
                items.append(("K", self.kidx[(pos, f.index)], f.sign, conj))
            elif f.index >= n_aug:
                items.append(("K", self.kidx[(pos, f.index - n_aug)], f.sign, conj))
            elif pos - 1 == self.pb:
                items.append(("L", f.index, f.sign, conj))
            else:
                prev = self.seq.levels[pos - 1]
                if prev.small_certificates is None:
                    raise TransportError(
                        f"augmentation of level {prev.label} is not certified small; cannot place it in the new kernel"
                    )
                inner = self.membership(prev.small_certificates[f.index], pos - 1, "K")
                items.extend(self.signed(inner, f.sign, conj))
        for f in cert.corrections:
            items.extend(self.relator(pos, f.index, f.sign, self.lift(f.conjugator, pos)))
        return items

    def kernel_witness(self, pos: int, s: int):
        key = (pos, s)
        if key in self._witness_cache:
            return self._witness_cache[key]
        lv = self.seq.levels[pos]
        entries = self.seq.witness.levels.get(lv.label)
        if entries is None or s >= len(entries):
            raise TransportError(f"no witness for kernel generator {s} at level {lv.label}")
        gw = entries[s]
        strong = self.seq.witness.mode == STRONG
        items = []
        for term in gw.terms:
            a = self.membership(term.left, pos, "K" if strong else "J")
            b = self.membership(term.right, pos, "J")
            items.append(("C", a, b))
        for f in gw.corrections:
            for it in self.relator(pos, f.index, f.sign, self.lift(f.conjugator, pos)):
                if it[0] == "K":
                    opos, os_ = self.korigin[it[1]]
                    items.extend(self.signed(self.kernel_witness(opos, os_), it[2], it[3]))
                else:
                    items.append(it)
        self._witness_cache[key] = items
        return items

    # normal forms

    def split(self, items):
        """Move relator items to the right: ``R * Y = Y * R^Y``."""
        body = [it for it in items if it[0] != "R"]
        rels = []
        after: list = []
        for it in reversed(items):
            if it[0] == "R":
                rels.append(("R", it[1], it[2], multiply(it[3], self.value(after))))
            else:
                after.insert(0, it)
        rels.reverse()
        return body, rels

    def certificate(self, items, pool: str) -> MembershipCertificate:
        body, rels = self.split(items)
        factors = []
        for kind, idx, sign, conj in body:
            if kind == "K":
                index = idx if pool == "K" else len(self.lgens) + idx
            elif pool == "J":
                index = idx
            else:
                raise TransportError("augmentation generator met where a kernel element was required")
            factors.append(Factor(index, sign, conj))
        corrections = tuple(Factor(idx, sign, conj) for _, idx, sign, conj in rels)
        return MembershipCertificate(self.value(items), tuple(factors), corrections)

    def witnesses(self) -> tuple[GeneratorWitness, ...]:
        strong = self.seq.witness.mode == STRONG
        out = []
        for n, (pos, s) in enumerate(self.korigin):
            items = self.kernel_witness(pos, s)
            body, rels = self.split(items)
            terms = tuple(
                CommutatorTerm(self.certificate(a, "K" if strong else "J"), self.certificate(b, "J"))
                for _, a, b in body
            )
            corrections = tuple(Factor(idx, sign, conj) for _, idx, sign, conj in rels)
            out.append(GeneratorWitness(self.kernel[n], terms, corrections))
        return tuple(out)

    def reindex_kernel_certificate(self, cert: MembershipCertificate, pos: int) -> MembershipCertificate:
        factors = tuple(Factor(self.kidx[(pos, f.index)], f.sign, f.conjugator) for f in cert.factors)
        return MembershipCertificate(cert.target, factors, cert.corrections)

    def kernel_certificates(self):
        """Only kernels from the first parent bond keep a certificate over G_b."""
        first = self.seq.levels[self.pb + 1]
        if self.pc != self.pb + 1 or first.kernel_certificates is None:
            return None
        return first.kernel_certificates

    def relator_lifts(self):
        try:
            out = []
            for idx in range(len(self.seq.levels[self.pb].presentation.relators)):
                items = self.relator(self.pb, idx, 1, IDENTITY)
                out.append(self.certificate(items, "K"))
            return tuple(out)
        except TransportError:
            return None


# -- JSON ------------------------------------------------------------------------------


def _w(w: Word) -> str:
    return str(w)


def _factor_json(f: Factor) -> dict:
    return {"index": f.index, "sign": f.sign, "conjugator": _w(f.conjugator)}


def _factor_from(d: dict) -> Factor:
    return Factor(int(d["index"]), int(d["sign"]), parse_word(d["conjugator"]))


def certificate_to_json(c: MembershipCertificate) -> dict:
    return {
        "target": _w(c.target),
        "factors": [_factor_json(f) for f in c.factors],
        "corrections": [_factor_json(f) for f in c.corrections],
    }


def certificate_from_json(d: dict) -> MembershipCertificate:
    return MembershipCertificate(
        parse_word(d["target"]),
        tuple(_factor_from(f) for f in d.get("factors", ())),
        tuple(_factor_from(f) for f in d.get("corrections", ())),
    )


def witness_to_json(w: PerfectnessWitness) -> dict:
    return {
        "schema": "towerkit.witness",
        "version": SCHEMA_VERSION,
        "mode": w.mode,
        "levels": {
            str(label): [
                {
                    "target": _w(gw.target),
                    "terms": [
                        {"left": certificate_to_json(t.left), "right": certificate_to_json(t.right)}
                        for t in gw.terms
                    ],
                    "corrections": [_factor_json(f) for f in gw.corrections],
                }
                for gw in entries
            ]
            for label, entries in sorted(w.levels.items())
        },
    }


def witness_from_json(d: dict) -> PerfectnessWitness:
    _check_schema(d, "towerkit.witness")
    levels = {}
    for label, entries in d["levels"].items():
        levels[int(label)] = tuple(
            GeneratorWitness(
                parse_word(e["target"]),
                tuple(
                    CommutatorTerm(certificate_from_json(t["left"]), certificate_from_json(t["right"]))
                    for t in e.get("terms", ())
                ),
                tuple(_factor_from(f) for f in e.get("corrections", ())),
            )
            for e in entries
        )
    return PerfectnessWitness(d["mode"], levels)


def _check_schema(d: dict, name: str):
    if d.get("schema") != name:
        raise ValueError(f"expected a {name} document")
    if d.get("version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported {name} version {d.get('version')!r}")


def sequence_to_json(seq: AugmentedSequence) -> dict:
    def certs(cs):
        return None if cs is None else [certificate_to_json(c) for c in cs]

    levels = []
    for lv in seq.levels:
        levels.append(
            {
                "label": lv.label,
                "rank": lv.presentation.rank,
                "relators": [_w(r) for r in lv.presentation.relators],
                "augmentation": [_w(w) for w in lv.augmentation],
                "bond": None if lv.bond is None else [_w(w) for w in lv.bond.images],
                "section": None if lv.section is None else [_w(w) for w in lv.section],
                "kernel": [_w(w) for w in lv.kernel],
                "small_certificates": certs(lv.small_certificates),
                "relator_lifts": certs(lv.relator_lifts),
                "kernel_certificates": certs(lv.kernel_certificates),
            }
        )
    doc = {"schema": "towerkit.sequence", "version": SCHEMA_VERSION, "levels": levels}
    if seq.witness is not None:
        doc["witness"] = witness_to_json(seq.witness)
    return doc


def sequence_from_json(d: dict) -> AugmentedSequence:
    _check_schema(d, "towerkit.sequence")

    def words(xs):
        return tuple(parse_word(x) for x in xs)

    def certs(cs):
        return None if cs is None else tuple(certificate_from_json(c) for c in cs)

    levels = []
    prev_label = None
    for e in d["levels"]:
        bond = None
        if e.get("bond") is not None:
            bond = BondingMap(e["label"], prev_label, words(e["bond"]))
        levels.append(
            Level(
                label=int(e["label"]),
                presentation=Presentation(int(e["rank"]), words(e["relators"])),
                augmentation=words(e.get("augmentation", ())),
                bond=bond,
                section=None if e.get("section") is None else words(e["section"]),
                kernel=words(e.get("kernel", ())),
                small_certificates=certs(e.get("small_certificates")),
                relator_lifts=certs(e.get("relator_lifts")),
                kernel_certificates=certs(e.get("kernel_certificates")),
            )
        )
        prev_label = int(e["label"])
    witness = witness_from_json(d["witness"]) if d.get("witness") else None
    return AugmentedSequence(tuple(levels), witness)


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=False)
