"""Two-term chain complexes of free ``ZG``-modules with monomial boundary.

The complex for ``m`` blocks is

    0 -> (ZG)^3 (+) ... (+) (ZG)^3  --d-->  (ZG)^3 (+) ... (+) (ZG)^3 -> 0
         degree n-2, blocks s = 0..m-1      degree n-3, blocks s = 1..m

Block ``s`` of degree n-2 is the triple of handles on level ``s`` of a
stack of ``m`` levels; block ``s`` of degree n-3 the dual triple.  The
boundary sends handle ``(s, j)`` to ``+-1`` times handle ``(s, j)`` when
``1 <= s <= m-1`` (a single transverse intersection), and the bottom block
``s = 0`` to zero; nothing hits the top block ``s = m``.  So the kernel is
block 0 and the cokernel is block ``m``, each free of rank 3.  Enlarging
the stack by one level keeps block 0 as a cycle and kills the old top
block, which gives a direct limit of rank 3 in degree n-2 and 0 in n-3.

Scalars are ``0`` or ``+-g`` for a group element ``g`` (a word, read in the
group); anything else is refused.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from towerkit.errors import PreconditionError, UnsupportedMatrixError
from towerkit.words import IDENTITY, Word, format_word, invert, multiply, parse_word, reduce

RANK = 3
UPPER = "n-2"
LOWER = "n-3"


@dataclass(frozen=True)
class RingScalar:
    """``sign * element`` in ``ZG``; zero is represented by absence."""

    sign: int
    element: Word = IDENTITY

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise UnsupportedMatrixError(f"scalar coefficient {self.sign} is not a unit sign")
        object.__setattr__(self, "element", reduce(self.element))

    def __mul__(self, other: "RingScalar") -> "RingScalar":
        return RingScalar(self.sign * other.sign, multiply(self.element, other.element))

    def __neg__(self):
        return RingScalar(-self.sign, self.element)

    def inverse(self) -> "RingScalar":
        return RingScalar(self.sign, invert(self.element))

    def __str__(self):
        body = format_word(self.element)
        return ("-" if self.sign < 0 else "") + body


class MonomialMatrix:
    """Sparse ``rows x cols`` matrix over ``ZG`` with monomial entries."""

    def __init__(self, rows: int, cols: int, entries=None):
        if rows < 0 or cols < 0:
            raise ValueError("matrix shape must be nonnegative")
        self.rows, self.cols = rows, cols
        self.entries: dict[tuple[int, int], RingScalar] = {}
        for (r, c), v in (entries or {}).items():
            if not (0 <= r < rows and 0 <= c < cols):
                raise IndexError(f"entry ({r}, {c}) outside {rows}x{cols}")
            if not isinstance(v, RingScalar):
                sign, elem = v
                if sign == 0:
                    continue
                v = RingScalar(sign, elem)
            self.entries[(r, c)] = v

    def __eq__(self, other):
        return (
            isinstance(other, MonomialMatrix)
            and (self.rows, self.cols) == (other.rows, other.cols)
            and self.entries == other.entries
        )

    def __repr__(self):
        return f"MonomialMatrix({self.rows}x{self.cols}, {len(self.entries)} entries)"

    def to_json(self) -> list:
        return [
            {"row": r, "col": c, "sign": v.sign, "elem": format_word(v.element)}
            for (r, c), v in sorted(self.entries.items())
        ]


@dataclass(frozen=True)
class Handle:
    degree: str
    block: int
    j: int

    def __str__(self):
        return f"{self.degree}:s={self.block}:j={self.j}"


@dataclass
class TwoTermComplex:
    blocks: int
    boundary: MonomialMatrix

    def __post_init__(self):
        if self.blocks < 0:
            raise PreconditionError("block count must be nonnegative")
        n = RANK * self.blocks
        if (self.boundary.rows, self.boundary.cols) != (n, n):
            raise PreconditionError(f"boundary must be {n}x{n} for {self.blocks} blocks")

    # columns: degree n-2, blocks 0..m-1; rows: degree n-3, blocks 1..m
    def column_handle(self, c: int) -> Handle:
        return Handle(UPPER, c // RANK, c % RANK + 1)

    def row_handle(self, r: int) -> Handle:
        return Handle(LOWER, r // RANK + 1, r % RANK + 1)

    def column_of(self, h: Handle) -> int:
        return h.block * RANK + h.j - 1

    def row_of(self, h: Handle) -> int:
        return (h.block - 1) * RANK + h.j - 1

    def boundary_squared_zero(self) -> bool:
        # a two-term complex has no composable pair of boundaries
        return True

    def to_json(self) -> dict:
        return {
            "blocks": self.blocks,
            "rank_per_block": RANK,
            "degrees": {UPPER: "blocks 0..m-1", LOWER: "blocks 1..m"},
            "entries": self.boundary.to_json(),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "TwoTermComplex":
        m = int(doc["blocks"])
        entries = {(e["row"], e["col"]): (int(e["sign"]), parse_word(e["elem"])) for e in doc["entries"]}
        return cls(m, MonomialMatrix(RANK * m, RANK * m, entries))


def build_complex(m: int) -> TwoTermComplex:
    if m < 1:
        raise PreconditionError("need at least one block")
    entries = {}
    for s in range(1, m):
        for j in range(RANK):
            # sign alternates with the block, matching the orientation of the intersecting handles
            entries[((s - 1) * RANK + j, s * RANK + j)] = RingScalar((-1) ** s)
    return TwoTermComplex(m, MonomialMatrix(RANK * m, RANK * m, entries))


@dataclass
class HomologyReport:
    kernel_rank: int
    kernel_handles: list = field(default_factory=list)
    cokernel_rank: int = 0
    cokernel_handles: list = field(default_factory=list)
    pivots: int = 0
    multiplications: int = 0

    @property
    def ranks(self) -> tuple[int, int]:
        return (self.kernel_rank, self.cokernel_rank)

    def summary(self) -> dict:
        return {UPPER: self.kernel_rank, LOWER: self.cokernel_rank}

    def to_json(self) -> dict:
        return {
            "ranks": self.summary(),
            "kernel": {"rank": self.kernel_rank, "handles": [str(h) for h in self.kernel_handles]},
            "cokernel": {"rank": self.cokernel_rank, "handles": [str(h) for h in self.cokernel_handles]},
            "pivots": self.pivots,
            "multiplications": self.multiplications,
        }

    def text(self) -> str:
        def blocks(hs):
            return sorted({h.block for h in hs})

        return (
            f"H_{UPPER} = ker d = (ZG)^{self.kernel_rank}  (blocks {blocks(self.kernel_handles)})\n"
            f"H_{LOWER} = coker d = (ZG)^{self.cokernel_rank}  (blocks {blocks(self.cokernel_handles)})"
        )


def homology(c: TwoTermComplex) -> HomologyReport:
    """Kernel and cokernel of ``d`` by unit-pivot elimination.

    Each pivot clears its row and column.  A cell receiving a second monomial
    that does not cancel would leave the monomial regime and is refused.
    """
    m = dict(c.boundary.entries)
    live_rows, live_cols = set(range(c.boundary.rows)), set(range(c.boundary.cols))
    mults = 0
    pivots = 0

    def add(cell, value):
        old = m.get(cell)
        if old is None:
            m[cell] = value
        elif old.element == value.element and old.sign == -value.sign:
            del m[cell]
        else:
            raise UnsupportedMatrixError(f"cell {cell} would hold a sum of two monomials")

    while m:
        (r, col) = min(m, key=lambda rc: (rc[1], rc[0]))
        piv_inv = m[(r, col)].inverse()
        # clear the pivot column with row operations
        for r2 in [rr for (rr, cc) in m if cc == col and rr != r]:
            factor = -(m.pop((r2, col)) * piv_inv)
            mults += 1
            for (rr, c2), v in [(k, v) for k, v in m.items() if k[0] == r and k[1] != col]:
                add((r2, c2), factor * v)
                mults += 1
        # then the pivot row with column operations; only the pivot cell changes
        for c2 in [cc for (rr, cc) in m if rr == r and cc != col]:
            del m[(r, c2)]
            mults += 2
        del m[(r, col)]
        live_rows.discard(r)
        live_cols.discard(col)
        pivots += 1

    ker = [c.column_handle(k) for k in sorted(live_cols)]
    coker = [c.row_handle(k) for k in sorted(live_rows)]
    return HomologyReport(len(ker), ker, len(coker), coker, pivots, mults)


@dataclass
class InducedMap:
    degree: str
    source_blocks: int
    target_blocks: int
    images: dict  # source basis handle -> target basis handle, or None for zero

    @property
    def kind(self) -> str:
        values = list(self.images.values())
        if all(v is None for v in values):
            return "zero"
        if all(v is not None for v in values) and len(set(values)) == len(values):
            return "isomorphism" if self.source_blocks != self.target_blocks else "identity"
        return "other"

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "source_blocks": self.source_blocks,
            "target_blocks": self.target_blocks,
            "kind": self.kind,
            "images": {str(k): (str(v) if v is not None else 0) for k, v in self.images.items()},
        }


def inclusion_maps(m: int, m2: int | None = None) -> tuple[InducedMap, InducedMap]:
    """Maps induced on ``(H_{n-2}, H_{n-3})`` by including ``m`` blocks into ``m2`` (default ``m+1``)."""
    if m < 1:
        raise PreconditionError("need at least one block")
    m2 = m + 1 if m2 is None else m2
    if m2 < m:
        raise PreconditionError("inclusion goes from fewer blocks to more")
    small, big = build_complex(m), build_complex(m2)
    hs, hb = homology(small), homology(big)
    big_cycles = set(hb.kernel_handles)
    upper = {}
    for h in hs.kernel_handles:
        # a cycle stays a cycle; it is a basis class if it is still unpivoted
        upper[h] = h if h in big_cycles else None
    big_coker = set(hb.cokernel_handles)
    lower = {}
    for h in hs.cokernel_handles:
        if h in big_coker:
            lower[h] = h
        elif _is_boundary(big, h):
            lower[h] = None
        else:
            raise UnsupportedMatrixError(f"cannot express the class of {h} in the larger complex")
    return InducedMap(UPPER, m, m2, upper), InducedMap(LOWER, m, m2, lower)


def _is_boundary(c: TwoTermComplex, h: Handle) -> bool:
    """``h`` is +-g times the boundary of a single column."""
    row = c.row_of(h)
    for col in range(c.boundary.cols):
        cells = [k for k in c.boundary.entries if k[1] == col]
        if cells == [(row, col)]:
            return True
    return False


def compose(first: InducedMap, second: InducedMap) -> InducedMap:
    if first.degree != second.degree or first.target_blocks != second.source_blocks:
        raise PreconditionError("maps do not compose")
    images = {}
    for h, v in first.images.items():
        images[h] = None if v is None else second.images.get(v)
    return InducedMap(first.degree, first.source_blocks, second.target_blocks, images)


@dataclass
class DirectLimitReport(HomologyReport):
    stages: list = field(default_factory=list)
    stabilized: bool = False

    def to_json(self) -> dict:
        doc = super().to_json()
        doc["stages"] = self.stages
        doc["stabilized"] = self.stabilized
        return doc


def direct_limit(m_max: int) -> DirectLimitReport:
    """Colimit of ``H_*(m blocks)`` along the inclusions, ``m = 1 .. m_max``.

    A class survives in the limit when its images never die; the last map
    ``m_max -> m_max + 1`` decides, and the earlier ones are checked for the
    same kind (stabilization).
    """
    if m_max < 1:
        raise PreconditionError("need at least one block")
    stages = []
    maps = []
    for m in range(1, m_max + 1):
        h = homology(build_complex(m))
        up, low = inclusion_maps(m)
        maps.append((up, low))
        stages.append({"blocks": m, "ranks": h.summary(), "maps": {UPPER: up.kind, LOWER: low.kind}})
    up, low = maps[-1]
    survivors_up = [h for h, v in up.images.items() if v is not None]
    survivors_low = [h for h, v in low.images.items() if v is not None]
    stable = all(u.kind == up.kind and l.kind == low.kind for u, l in maps)
    return DirectLimitReport(
        kernel_rank=len(survivors_up),
        kernel_handles=survivors_up,
        cokernel_rank=len(survivors_low),
        cokernel_handles=survivors_low,
        stages=stages,
        stabilized=stable,
    )
