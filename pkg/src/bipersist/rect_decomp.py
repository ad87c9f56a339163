"""Rectangle barcodes from rank invariants by inclusion-exclusion.

On a rectangle-decomposable module the rank invariant determines the
multiset of rectangle summands; the multiplicity of each rectangle
falls out of corner differencing of the rank function.  On arbitrary
input the same formulas can go negative, which is reported instead of
silently clamped.
"""

from __future__ import annotations

from .grid_module import RankInvariant, comparable_pairs
from .ioutil import FormatError, logical_lines, parse_int


def corner_count(r: RankInvariant, s, t) -> int:
    """Summands whose support has lower-left corner exactly s and contains t."""
    sx, sy = s
    return (
        r.get(s, t)
        - r.get((sx - 1, sy), t)
        - r.get((sx, sy - 1), t)
        + r.get((sx - 1, sy - 1), t)
    )


def multiplicity(r: RankInvariant, s, t) -> int:
    """Multiplicity of the rectangle with corners s <= t.

    Corner differencing of corner counts, cross-checked against the
    direct sixteen-term expansion over both corners; out-of-range rank
    values count as zero in either form.
    """
    sx, sy = s
    tx, ty = t
    via_corners = (
        corner_count(r, s, t)
        - corner_count(r, s, (tx + 1, ty))
        - corner_count(r, s, (tx, ty + 1))
        + corner_count(r, s, (tx + 1, ty + 1))
    )
    direct = 0
    for ax, ay in ((0, 0), (1, 0), (0, 1), (1, 1)):
        for bx, by in ((0, 0), (1, 0), (0, 1), (1, 1)):
            sign = -1 if (ax + ay + bx + by) % 2 else 1
            direct += sign * r.get((sx - ax, sy - ay), (tx + bx, ty + by))
    assert direct == via_corners, "inclusion-exclusion forms disagree"
    return via_corners


class RectangleBarcode(dict):
    """Multiset of rectangles (s_x, s_y, t_x, t_y), 0-based inclusive."""

    def __init__(self, counts=()):
        super().__init__()
        for rect, mult in dict(counts).items():
            sx, sy, tx, ty = (int(v) for v in rect)
            if sx > tx or sy > ty:
                raise ValueError(f"rectangle {rect} has corners out of order")
            if int(mult) < 0:
                raise ValueError(f"rectangle {rect} has negative multiplicity")
            if mult:
                self[(sx, sy, tx, ty)] = int(mult)

    def total(self) -> int:
        return sum(self.values())

    def dim_at(self, t) -> int:
        x, y = t
        return sum(
            m for (sx, sy, tx, ty), m in self.items() if sx <= x <= tx and sy <= y <= ty
        )

    def rank_invariant(self, nx: int, ny: int) -> RankInvariant:
        """The rank invariant of the direct sum of these rectangles."""
        inv = RankInvariant(nx, ny)
        for s, t in comparable_pairs(nx, ny):
            inv.set(
                s,
                t,
                sum(
                    m
                    for (sx, sy, tx, ty), m in self.items()
                    if sx <= s[0] and sy <= s[1] and t[0] <= tx and t[1] <= ty
                ),
            )
        return inv

    def to_text(self) -> str:
        out = ["# rectangle barcode: s_x s_y t_x t_y multiplicity (1-based)"]
        for sx, sy, tx, ty in sorted(self):
            out.append(f"{sx + 1} {sy + 1} {tx + 1} {ty + 1} {self[(sx, sy, tx, ty)]}")
        return "\n".join(out) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "RectangleBarcode":
        counts = {}
        for lineno, line in logical_lines(text):
            toks = line.split()
            if len(toks) != 5:
                raise FormatError(f"line {lineno}: expected 's_x s_y t_x t_y multiplicity'")
            sx, sy, tx, ty, mult = (parse_int(t, lineno, "barcode entry") for t in toks)
            if sx < 1 or sy < 1:
                raise FormatError(f"line {lineno}: coordinates are 1-based")
            if sx > tx or sy > ty:
                raise FormatError(f"line {lineno}: corners out of order")
            if mult < 1:
                raise FormatError(f"line {lineno}: multiplicity must be positive")
            rect = (sx - 1, sy - 1, tx - 1, ty - 1)
            if rect in counts:
                raise FormatError(f"line {lineno}: duplicate rectangle")
            counts[rect] = mult
        return cls(counts)


def decompose(r: RankInvariant):
    """All rectangle multiplicities of a rank invariant.

    Returns (barcode, clean).  clean is False when some multiplicity
    came out negative, which certifies that no rectangle-decomposable
    module has this rank invariant; the barcode then keeps only the
    positive part.  A clean outcome alone does not certify
    decomposability -- that decision belongs to the checkers.
    """
    counts = {}
    clean = True
    for s, t in comparable_pairs(r.nx, r.ny):
        m = multiplicity(r, s, t)
        if m < 0:
            clean = False
        elif m > 0:
            counts[(s[0], s[1], t[0], t[1])] = m
    return RectangleBarcode(counts), clean
