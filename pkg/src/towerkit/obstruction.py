"""Filtration obstruction for the tower: why it is not strongly perfect.

For level ``i`` the relators satisfy ``depth(r(i,j)) >= 2**i``.  ``p_i`` is the
least positive integer with every ``depth(r(i,j)) < 2**i + p_i``, and ``q_i``
is chosen so that every element of ``Omega_{q_i}(A_i, F_3)`` has depth
``>= 2**i + p_i``.  Here ``Omega_1(H,G) = H`` and ``Omega_q = [Omega_{q-1}, G]``.

If ``r(i,j)`` were ``h * w`` with ``h`` in ``A_k`` (depth ``>= 2**k``) and ``w`` in
``Omega_{q_i}(A_i, F_3)``, then ``2**k >= 2**i + p_i`` would force
``depth(r(i,j)) >= 2**i + p_i``, which is false.  The refutation harness
samples such products ``h * w`` and checks their depths against the
threshold.  It is a falsification harness: the verdict only speaks for the
sampled elements.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from towerkit import tower
from towerkit.errors import PreconditionError
from towerkit.magnus import DEFAULT_CAP_CEILING, DEFAULT_TERM_BOUND, Depth, auto_depth, depth_of_word
from towerkit.words import (
    IDENTITY,
    Comm,
    Conj,
    Leaf,
    Prod,
    Word,
    flatten,
    format as format_expr,
    invert,
    multiply,
    reduce,
)

DERIVED = "derived"
LOWER_CENTRAL = "lower-central"

REFUTED = "refuted-on-samples"
NOT_REFUTED = "counterexample-found"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class FiltrationReport:
    level: int
    depths: tuple[Depth, ...]
    lower_bound: int
    p: int
    p_exact: bool
    ceiling: int

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "relator_depths": [d.to_json() for d in self.depths],
            "lower_bound": self.lower_bound,
            "p": self.p,
            "p_kind": "exact" if self.p_exact else "lower-bound",
            "ceiling": self.ceiling,
        }

    def text(self) -> str:
        lines = [f"level i = {self.level}: beta(r_{{i,j}}) - 1 in Delta^{self.lower_bound} expected"]
        for j, d in enumerate(self.depths, start=1):
            lines.append(f"  depth(r_{{{self.level},{j}}}) = {d}")
        kind = "" if self.p_exact else " (lower bound only)"
        lines.append(f"  p_{self.level} = {self.p}{kind}")
        return "\n".join(lines)


def compute_p(
    i: int,
    cap_ceiling: int = DEFAULT_CAP_CEILING,
    words: Sequence[Word] | None = None,
    term_bound: int = DEFAULT_TERM_BOUND,
) -> FiltrationReport:
    """Exact relator depths (auto-escalated cap) and the least valid ``p_i``.

    ``words`` overrides the relators, for probing; an empty relator is rejected.
    """
    if i < 1:
        raise PreconditionError("levels start at 1")
    if words is None:
        words = tower.relators(i).words
    words = [reduce(w) for w in words]
    if any(not w for w in words):
        raise PreconditionError("a relator is the empty word; depth is undefined")
    bound = 2**i
    depths = tuple(auto_depth(w, hint=bound, ceiling=cap_ceiling, term_bound=term_bound) for w in words)
    p_exact = all(d.exact for d in depths)
    # every relator must sit strictly below 2^i + p, so the deepest one decides
    p = max(d.value for d in depths) - bound + 1
    return FiltrationReport(i, depths, bound, max(p, 1), p_exact, cap_ceiling)


def derive_q(i: int, p: int) -> int:
    """``q_i = p_i + 1``: each further bracket with ``F_3`` adds at least one to the depth."""
    if p < 1:
        raise PreconditionError(f"p_{i} must be >= 1 (relator depths are >= 2^{i}), got {p}")
    return p + 1


@dataclass
class OmegaSampler:
    """Random elements of ``Omega_q(ncl(H), F_rank)`` in certified form."""

    generators: Sequence[Word]
    rank: int
    q: int
    seed: int = 0
    conjugator_length: int = 8
    bracket_length: int = 4
    product_length: int = 3
    notes: list = field(default_factory=list)

    def __post_init__(self):
        if self.q < 1:
            raise PreconditionError("q must be >= 1")
        usable = [reduce(g) for g in self.generators if reduce(g)]
        if len(usable) < len(self.generators):
            self.notes.append("skipped empty normal generator(s): they contribute nothing")
        self._usable = usable
        self._rng = random.Random(self.seed)

    def random_word(self, max_length: int, min_length: int = 0) -> Word:
        rng = self._rng
        n = rng.randint(min_length, max_length)
        letters: list[int] = []
        while len(letters) < n:
            x = rng.randint(1, self.rank) * rng.choice((1, -1))
            if letters and letters[-1] == -x:
                continue
            letters.append(x)
        return Word(letters, reduced=True)

    def draw(self):
        """One sample: ``(expression, reduced word)``."""
        if not self._usable:
            return Leaf(IDENTITY), IDENTITY
        rng = self._rng
        factors = []
        for _ in range(rng.randint(1, self.product_length)):
            h = self._usable[rng.randrange(len(self._usable))]
            if rng.random() < 0.5:
                h = invert(h)
            node = Conj(Leaf(h), self.random_word(self.conjugator_length))
            for _ in range(self.q - 1):
                node = Comm(node, Leaf(self.random_word(self.bracket_length, min_length=1)))
            factors.append(Conj(node, self.random_word(self.conjugator_length)))
        expr = Prod(factors)
        return expr, flatten(expr)


def omega_sample(sampler: OmegaSampler, count: int) -> list[tuple]:
    if count < 1:
        raise PreconditionError("count must be >= 1")
    return [sampler.draw() for _ in range(count)]


@dataclass(frozen=True)
class SampleResult:
    index: int
    expression: str
    reduced_length: int
    depth: Depth
    status: str  # "ok" | "violation" | "inconclusive"

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "expression": self.expression,
            "reduced_length": self.reduced_length,
            "depth": self.depth.to_json(),
            "status": self.status,
        }


@dataclass(frozen=True)
class RefutationReport:
    i: int
    k: int
    q: int
    samples: int
    seed: int
    cap: int
    threshold: int
    p: int
    relator_depths: tuple[Depth, ...]
    results: tuple[SampleResult, ...]
    verdict: str

    @property
    def counts(self) -> dict:
        out = {"ok": 0, "violation": 0, "inconclusive": 0}
        for r in self.results:
            out[r.status] += 1
        return out

    def to_json(self) -> dict:
        return {
            "instance": {"i": self.i, "k": self.k, "q": self.q, "samples": self.samples, "cap": self.cap},
            "seed": self.seed,
            "threshold": self.threshold,
            "derived": {
                "p_i": {"value": self.p, "provenance": "computed: least p with every relator depth < 2^i + p"},
                "q_i": {"value": self.q, "provenance": "derived: q_i = p_i + 1 from additivity of depth under brackets"},
            },
            "relator_depths": [d.to_json() for d in self.relator_depths],
            "samples": [r.to_json() for r in self.results],
            "counts": self.counts,
            "verdict": self.verdict,
        }

    def text(self) -> str:
        i, k, t = self.i, self.k, self.threshold
        c = self.counts
        weakest = max(range(3), key=lambda j: self.relator_depths[j].value) + 1
        lines = [
            f"instance i={i}, k={k}: 2^{k} = {2**k} >= 2^{i} + p_{i} = {t}",
            f"p_{i} = {self.p} (computed), q_{i} = {self.q} (derived: p_{i} + 1)",
            f"(a) depth(r_{{{i},{weakest}}}) = {self.relator_depths[weakest - 1]} < {t}, "
            f"so beta(r_{{{i},{weakest}}}) - 1 is not in Delta^{t}",
            f"(b) sampled h*w with h in A_{k}, w in Omega_{self.q}(A_{i}, F_3): "
            f"{c['ok']} with depth >= {t}, {c['violation']} below, {c['inconclusive']} inconclusive (cap {self.cap})",
            f"verdict: {self.verdict}",
        ]
        if self.verdict == REFUTED:
            lines.append(
                f"  no sampled r_{{{i},j}} = h*w: every sample lies in Delta^{t} while r_{{{i},{weakest}}} does not"
            )
        return "\n".join(lines)


def _depth_job(args):
    word, cap, term_bound = args
    return depth_of_word(word, cap, term_bound)


def refute_sap_instance(
    i: int,
    k: int,
    samples: int = 200,
    seed: int = 0,
    cap: int | None = None,
    cap_ceiling: int = DEFAULT_CAP_CEILING,
    term_bound: int = DEFAULT_TERM_BOUND,
    workers: int = 1,
) -> RefutationReport:
    """Sample ``h * w`` (``h`` in ``A_k``, ``w`` in ``Omega_{q_i}(A_i, F_3)``) and compare depths."""
    fr = compute_p(i, cap_ceiling, term_bound=term_bound)
    if not fr.p_exact:
        raise PreconditionError(f"p_{i} is only known as a lower bound below cap ceiling {cap_ceiling}")
    threshold = 2**i + fr.p
    if 2**k < threshold:
        raise PreconditionError(f"need 2^k >= 2^i + p_i, but 2^{k} = {2**k} < 2^{i} + {fr.p} = {threshold}")
    if samples < 1:
        raise PreconditionError("need at least one sample")
    q = derive_q(i, fr.p)
    cap = threshold if cap is None else cap
    master = random.Random(seed)
    omega = OmegaSampler(tower.relators(i).words, tower.RANK, q, seed=master.randrange(2**63))
    ambient = OmegaSampler(tower.relators(k).words, tower.RANK, 1, seed=master.randrange(2**63))

    drawn = []
    for _ in range(samples):
        h_expr, h = ambient.draw()
        w_expr, w = omega.draw()
        drawn.append((Prod([h_expr, w_expr]), multiply(h, w)))

    jobs = [(w, cap, term_bound) for _, w in drawn]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            depths = list(pool.map(_depth_job, jobs, chunksize=max(1, samples // (4 * workers))))
    else:
        depths = [_depth_job(j) for j in jobs]

    results = []
    for n, ((expr, w), d) in enumerate(zip(drawn, depths)):
        if d.exact:
            status = "ok" if d.value >= threshold else "violation"
        else:
            status = "ok" if cap + 1 > threshold else "inconclusive"
        results.append(SampleResult(n, format_expr(expr), len(w), d, status))

    statuses = {r.status for r in results}
    relator_below = any(d.below(threshold) for d in fr.depths)
    if "violation" in statuses:
        verdict = NOT_REFUTED
    elif "ok" in statuses and relator_below:
        verdict = REFUTED
    else:
        verdict = INCONCLUSIVE
    return RefutationReport(i, k, q, samples, seed, cap, threshold, fr.p, fr.depths, tuple(results), verdict)


def filtration_necessary(w: Word, series: str, index: int, cap: int) -> str:
    """``"refuted"`` when depth alone rules out membership, else ``"possible"``.

    ``series`` is ``"lower-central"`` (threshold ``index``) or ``"derived"``
    (threshold ``2**index``).  Never claims membership.
    """
    if series == LOWER_CENTRAL:
        threshold = index
    elif series == DERIVED:
        threshold = 2**index
    else:
        raise ValueError(f"series must be {LOWER_CENTRAL!r} or {DERIVED!r}")
    d = depth_of_word(w, cap)
    return "refuted" if d.below(threshold) else "possible"


def thinning_ok(indices: Sequence[int], cap_ceiling: int = DEFAULT_CAP_CEILING) -> list[tuple[int, int, bool]]:
    """Check ``2^{i_n} >= 2^{i_{n-1}} + p_{i_{n-1}}`` along a subsequence of levels."""
    out = []
    for a, b in zip(indices, indices[1:]):
        p = compute_p(a, cap_ceiling).p
        out.append((a, b, 2**b >= 2**a + p))
    return out
