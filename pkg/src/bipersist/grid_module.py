"""Persistence modules over a finite grid, given by explicit matrices.

A module assigns a vector space over F_p to every point of the grid
[0,nx) x [0,ny) and a matrix to every unit edge; commutativity of the
unit squares is the validation contract.  Composite maps, the rank
invariant, restriction/dualization, Hom computations and the
square-local invariants used by the exactness checkers all live here,
together with the .gmod/.rank file formats.

Grid points are 0-based (x, y) tuples in code; the file formats use
1-based coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from .ioutil import FormatError, logical_lines, parse_int
from .linalg import (
    Subspace,
    check_modulus,
    image_basis,
    kernel_basis,
    matmul,
    rank,
    subspace_intersect,
    subspace_sum,
)

SQUARE_LABELS = ("a", "b", "c", "d", "ab", "ac", "bd", "cd", "abc", "bcd", "abcd")

# interval types on a square that are restrictions of rectangles; the
# two missing ones ("abc", "bcd") are the hooks
RECTANGLE_LABELS = ("a", "b", "c", "d", "ab", "ac", "bd", "cd", "abcd")


class InconsistentSquareError(ValueError):
    """Square invariants admit no nonnegative interval decomposition."""


def iter_points(nx: int, ny: int) -> Iterator[tuple[int, int]]:
    for x in range(nx):
        for y in range(ny):
            yield (x, y)


def comparable_pairs(nx: int, ny: int) -> Iterator[tuple[tuple[int, int], tuple[int, int]]]:
    """All pairs s <= t in lexicographic order of (s, t)."""
    for s in iter_points(nx, ny):
        for tx in range(s[0], nx):
            for ty in range(s[1], ny):
                yield s, (tx, ty)


class GridModule:
    """Explicit grid persistence module over F_p.

    dims[x, y] is the dimension at (x, y); hmaps[(x, y)] is the matrix
    of (x,y) -> (x+1,y) with shape (dims[x+1,y], dims[x,y]); vmaps the
    vertical analogue.  Missing edges are filled with zero matrices of
    the correct shape at construction time.
    """

    def __init__(self, nx: int, ny: int, p: int, dims, hmaps=None, vmaps=None):
        if nx < 1 or ny < 1:
            raise ValueError("grid extents must be at least 1x1")
        self.nx = int(nx)
        self.ny = int(ny)
        self.p = check_modulus(p)
        self.dims = np.array(dims, dtype=np.int64).reshape(self.nx, self.ny)
        if np.any(self.dims < 0):
            raise ValueError("negative dimension")
        self.hmaps = {}
        self.vmaps = {}
        hmaps = hmaps or {}
        vmaps = vmaps or {}
        for x in range(self.nx - 1):
            for y in range(self.ny):
                self.hmaps[(x, y)] = self._edge(hmaps.get((x, y)), (x + 1, y), (x, y))
        for x in range(self.nx):
            for y in range(self.ny - 1):
                self.vmaps[(x, y)] = self._edge(vmaps.get((x, y)), (x, y + 1), (x, y))
        self._composites: dict = {}

    def _edge(self, m, tgt, src) -> np.ndarray:
        shape = (int(self.dims[tgt]), int(self.dims[src]))
        if m is None:
            return np.zeros(shape, dtype=np.int64)
        m = np.mod(np.array(m, dtype=np.int64).reshape(shape), self.p)
        return m

    def dim_at(self, t) -> int:
        return int(self.dims[t[0], t[1]])

    def points(self) -> Iterator[tuple[int, int]]:
        return iter_points(self.nx, self.ny)

    # -- validation ----------------------------------------------------

    def validate(self) -> list[str]:
        """Return a list of violations; empty means the module is valid."""
        bad = []
        for (x, y), m in list(self.hmaps.items()) + list(self.vmaps.items()):
            if np.any(m < 0) or np.any(m >= self.p):
                bad.append(f"edge at ({x},{y}): entries not reduced mod {self.p}")
        for x in range(self.nx - 1):
            for y in range(self.ny - 1):
                up_right = matmul(self.vmaps[(x + 1, y)], self.hmaps[(x, y)], self.p)
                right_up = matmul(self.hmaps[(x, y + 1)], self.vmaps[(x, y)], self.p)
                if not np.array_equal(up_right, right_up):
                    bad.append(f"square at ({x},{y}) does not commute")
        return bad

    # -- structure maps ------------------------------------------------

    def composite(self, s, t) -> np.ndarray:
        """Matrix of the structure map s -> t (requires s <= t)."""
        s, t = tuple(s), tuple(t)
        if not (0 <= s[0] <= t[0] < self.nx and 0 <= s[1] <= t[1] < self.ny):
            raise ValueError(f"incomparable or out-of-range pair {s} -> {t}")
        if s == t:
            return np.eye(self.dim_at(s), dtype=np.int64)
        key = (s, t)
        got = self._composites.get(key)
        if got is None:
            if t[1] > s[1]:
                prev = (t[0], t[1] - 1)
                got = matmul(self.vmaps[prev], self.composite(s, prev), self.p)
            else:
                prev = (t[0] - 1, t[1])
                got = matmul(self.hmaps[prev], self.composite(s, prev), self.p)
            self._composites[key] = got
        return got

    # -- constructions -------------------------------------------------

    @classmethod
    def zero(cls, nx: int, ny: int, p: int) -> "GridModule":
        return cls(nx, ny, p, np.zeros((nx, ny), dtype=np.int64))

    @classmethod
    def indicator(cls, nx: int, ny: int, support, p: int) -> "GridModule":
        """k at each point of `support`, identity maps inside the support.

        Well-defined (commutative) only when the support is convex in
        the grid order; validate() will flag anything else.
        """
        support = {tuple(t) for t in support}
        dims = np.zeros((nx, ny), dtype=np.int64)
        for t in support:
            dims[t] = 1
        hmaps = {}
        vmaps = {}
        for x in range(nx - 1):
            for y in range(ny):
                if (x, y) in support and (x + 1, y) in support:
                    hmaps[(x, y)] = np.array([[1]], dtype=np.int64)
        for x in range(nx):
            for y in range(ny - 1):
                if (x, y) in support and (x, y + 1) in support:
                    vmaps[(x, y)] = np.array([[1]], dtype=np.int64)
        return cls(nx, ny, p, dims, hmaps, vmaps)

    @classmethod
    def rectangle(cls, nx: int, ny: int, rect, p: int) -> "GridModule":
        """Indicator module of the rectangle [sx,tx] x [sy,ty] (0-based)."""
        sx, sy, tx, ty = rect
        pts = [(x, y) for x in range(sx, tx + 1) for y in range(sy, ty + 1)]
        return cls.indicator(nx, ny, pts, p)

    def direct_sum(self, other: "GridModule") -> "GridModule":
        if (self.nx, self.ny, self.p) != (other.nx, other.ny, other.p):
            raise ValueError("direct sum needs matching grids and fields")
        dims = self.dims + other.dims
        hmaps, vmaps = {}, {}
        for key in self.hmaps:
            hmaps[key] = _block_diag(self.hmaps[key], other.hmaps[key])
        for key in self.vmaps:
            vmaps[key] = _block_diag(self.vmaps[key], other.vmaps[key])
        return GridModule(self.nx, self.ny, self.p, dims, hmaps, vmaps)

    def restrict(self, xs, ys) -> "GridModule":
        """Restriction to the subgrid xs x ys (sorted 0-based indices)."""
        xs, ys = sorted(set(xs)), sorted(set(ys))
        if not xs or not ys:
            raise ValueError("restriction needs a nonempty subgrid")
        if xs[0] < 0 or xs[-1] >= self.nx or ys[0] < 0 or ys[-1] >= self.ny:
            raise ValueError("subgrid indices out of range")
        dims = self.dims[np.ix_(xs, ys)]
        hmaps, vmaps = {}, {}
        for i in range(len(xs) - 1):
            for j in range(len(ys)):
                hmaps[(i, j)] = self.composite((xs[i], ys[j]), (xs[i + 1], ys[j]))
        for i in range(len(xs)):
            for j in range(len(ys) - 1):
                vmaps[(i, j)] = self.composite((xs[i], ys[j]), (xs[i], ys[j + 1]))
        return GridModule(len(xs), len(ys), self.p, dims, hmaps, vmaps)

    def dualize(self) -> "GridModule":
        """Linear dual: grid reversed in both coordinates, matrices transposed."""
        nx, ny = self.nx, self.ny
        dims = self.dims[::-1, ::-1].copy()
        hmaps, vmaps = {}, {}
        for x in range(nx - 1):
            for y in range(ny):
                hmaps[(x, y)] = self.hmaps[(nx - 2 - x, ny - 1 - y)].T.copy()
        for x in range(nx):
            for y in range(ny - 1):
                vmaps[(x, y)] = self.vmaps[(nx - 1 - x, ny - 2 - y)].T.copy()
        return GridModule(nx, ny, self.p, dims, hmaps, vmaps)


def _block_diag(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.zeros((a.shape[0] + b.shape[0], a.shape[1] + b.shape[1]), dtype=np.int64)
    out[: a.shape[0], : a.shape[1]] = a
    out[a.shape[0] :, a.shape[1] :] = b
    return out


# -- rank invariant -----------------------------------------------------


class RankInvariant:
    """r(s, t) = rank of the structure map s -> t, for all s <= t.

    Stored as a dense 4-D table indexed [sx, sy, tx, ty]; entries at
    incomparable pairs are kept at 0 so equality is plain array equality.
    """

    def __init__(self, nx: int, ny: int, table: Optional[np.ndarray] = None):
        self.nx = int(nx)
        self.ny = int(ny)
        if table is None:
            table = np.zeros((nx, ny, nx, ny), dtype=np.int64)
        self.table = table

    def get(self, s, t) -> int:
        """r(s, t); 0 when either endpoint falls outside the grid."""
        sx, sy = s
        tx, ty = t
        if sx < 0 or sy < 0 or tx >= self.nx or ty >= self.ny or tx < 0 or ty < 0 or sx >= self.nx or sy >= self.ny:
            return 0
        if sx > tx or sy > ty:
            raise ValueError(f"rank queried at incomparable pair {s} -> {t}")
        return int(self.table[sx, sy, tx, ty])

    def set(self, s, t, value: int) -> None:
        self.table[s[0], s[1], t[0], t[1]] = value

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, RankInvariant)
            and (self.nx, self.ny) == (other.nx, other.ny)
            and bool(np.array_equal(self.table, other.table))
        )

    def __add__(self, other: "RankInvariant") -> "RankInvariant":
        if (self.nx, self.ny) != (other.nx, other.ny):
            raise ValueError("rank invariants on different grids")
        return RankInvariant(self.nx, self.ny, self.table + other.table)

    def to_text(self) -> str:
        out = [f"# rank invariant on grid {self.nx} x {self.ny} (1-based coordinates)"]
        for s, t in comparable_pairs(self.nx, self.ny):
            r = self.table[s[0], s[1], t[0], t[1]]
            out.append(f"{s[0] + 1} {s[1] + 1} {t[0] + 1} {t[1] + 1} {r}")
        return "\n".join(out) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "RankInvariant":
        entries = {}
        nx = ny = 0
        for lineno, line in logical_lines(text):
            toks = line.split()
            if len(toks) != 5:
                raise FormatError(f"line {lineno}: expected 's_x s_y t_x t_y r', got {line!r}")
            sx, sy, tx, ty, r = (parse_int(t, lineno, "coordinate") for t in toks)
            if not (1 <= sx <= tx and 1 <= sy <= ty):
                raise FormatError(f"line {lineno}: pair not comparable or not 1-based")
            if r < 0:
                raise FormatError(f"line {lineno}: negative rank")
            entries[(sx - 1, sy - 1, tx - 1, ty - 1)] = r
            nx, ny = max(nx, tx), max(ny, ty)
        inv = cls(nx, ny)
        for (sx, sy, tx, ty), r in entries.items():
            inv.table[sx, sy, tx, ty] = r
        return inv


def rank_invariant_naive(module: GridModule) -> RankInvariant:
    """Rank of every composite structure map, computed directly."""
    inv = RankInvariant(module.nx, module.ny)
    for s, t in comparable_pairs(module.nx, module.ny):
        inv.set(s, t, rank(module.composite(s, t), module.p))
    return inv


# -- Hom computations ---------------------------------------------------


def naturality_hom_basis(points, dim_a, dim_b, edges, p) -> list[dict]:
    """Basis of natural families {phi_t} for two diagrams on shared points.

    dim_a/dim_b map each point to a dimension; edges is a list of
    (src, tgt, a_mat, b_mat) with a_mat the source diagram's map and
    b_mat the target diagram's.  Unknowns are the entries of every
    component phi_t (shape dim_b x dim_a, column-stacked) and each edge
    contributes the constraint phi_tgt . a_mat = b_mat . phi_src.
    Returns a list of dicts point -> matrix, zero-size points omitted.
    """
    offset = {}
    blocks = []
    total = 0
    for t in points:
        da, db = dim_a[t], dim_b[t]
        if da > 0 and db > 0:
            offset[t] = total
            blocks.append((t, db, da))
            total += da * db
    if total == 0:
        return []
    rows = []
    for src, tgt, a_mat, b_mat in edges:
        n_rows = dim_b[tgt] * dim_a[src]
        if n_rows == 0:
            continue
        block = np.zeros((n_rows, total), dtype=np.int64)
        if tgt in offset:  # phi_tgt . a_mat, vec'd as (a^T kron I)
            block[:, offset[tgt] : offset[tgt] + dim_a[tgt] * dim_b[tgt]] = np.kron(
                a_mat.T, np.eye(dim_b[tgt], dtype=np.int64)
            )
        if src in offset:  # - b_mat . phi_src, vec'd as (I kron b)
            block[:, offset[src] : offset[src] + dim_a[src] * dim_b[src]] -= np.kron(
                np.eye(dim_a[src], dtype=np.int64), b_mat
            )
        rows.append(np.mod(block, p))
    system = np.vstack(rows) if rows else np.zeros((0, total), dtype=np.int64)
    ker = kernel_basis(system, p)
    basis = []
    for j in range(ker.dim):
        vec = ker.basis[:, j]
        comp = {}
        for t, db, da in blocks:
            o = offset[t]
            comp[t] = vec[o : o + da * db].reshape(db, da, order="F").copy()
        basis.append(comp)
    return basis


def hom_basis(a: GridModule, b: GridModule) -> list[dict]:
    """Basis of the space of module morphisms a -> b.

    Each basis element is a dict mapping grid points to matrices of
    shape (dim_b, dim_a); points where either module vanishes are
    omitted.
    """
    if (a.nx, a.ny, a.p) != (b.nx, b.ny, b.p):
        raise ValueError("hom needs matching grids and fields")
    points = list(a.points())
    dim_a = {t: a.dim_at(t) for t in points}
    dim_b = {t: b.dim_at(t) for t in points}
    edges = []
    for t, mat in a.hmaps.items():
        edges.append((t, (t[0] + 1, t[1]), mat, b.hmaps[t]))
    for t, mat in a.vmaps.items():
        edges.append((t, (t[0], t[1] + 1), mat, b.vmaps[t]))
    return naturality_hom_basis(points, dim_a, dim_b, edges, a.p)


def hom_dim(a: GridModule, b: GridModule) -> int:
    """Dimension of Hom(a, b) as an F_p vector space."""
    return len(hom_basis(a, b))


# -- square-local invariants and decomposition --------------------------


@dataclass
class SquareInvariants:
    """The eleven numbers attached to a square s <= t.

    Corners: a = s (bottom left), b = (t_x, s_y), c = (s_x, t_y), d = t.
    i_d is dim(Im(b->d) ∩ Im(c->d)); k_a is dim(Ker(a->b) + Ker(a->c)).
    """

    dim_a: int
    dim_b: int
    dim_c: int
    dim_d: int
    r_ab: int
    r_ac: int
    r_bd: int
    r_cd: int
    r_ad: int
    i_d: int
    k_a: int

    def as_vector(self) -> np.ndarray:
        return np.array(
            [
                self.dim_a,
                self.dim_b,
                self.dim_c,
                self.dim_d,
                self.r_ab,
                self.r_ac,
                self.r_bd,
                self.r_cd,
                self.r_ad,
                self.i_d,
                self.k_a,
            ],
            dtype=np.int64,
        )


class SquareBarcode(dict):
    """Multiplicities of the eleven interval types on a square."""

    def __init__(self, counts):
        super().__init__({lab: int(counts.get(lab, 0)) for lab in SQUARE_LABELS})

    @property
    def hooks(self) -> int:
        return self["abc"] + self["bcd"]

    def is_rectangular(self) -> bool:
        return self.hooks == 0


def invariants_of_square(module: GridModule, s, t) -> SquareInvariants:
    """Compute the eleven square invariants with exact linear algebra."""
    s, t = tuple(s), tuple(t)
    bpt, cpt = (t[0], s[1]), (s[0], t[1])
    p = module.p
    ab = module.composite(s, bpt)
    ac = module.composite(s, cpt)
    bd = module.composite(bpt, t)
    cd = module.composite(cpt, t)
    ad = module.composite(s, t)
    i_d = subspace_intersect(image_basis(bd, p), image_basis(cd, p)).dim
    k_a = subspace_sum(kernel_basis(ab, p), kernel_basis(ac, p)).dim
    return SquareInvariants(
        dim_a=module.dim_at(s),
        dim_b=module.dim_at(bpt),
        dim_c=module.dim_at(cpt),
        dim_d=module.dim_at(t),
        r_ab=rank(ab, p),
        r_ac=rank(ac, p),
        r_bd=rank(bd, p),
        r_cd=rank(cd, p),
        r_ad=rank(ad, p),
        i_d=i_d,
        k_a=k_a,
    )


def decompose_square(inv: SquareInvariants) -> SquareBarcode:
    """Interval multiplicities on a square from its eleven invariants.

    Solves the triangular system obtained by evaluating the invariants
    on the eleven interval types; raises InconsistentSquareError when
    any multiplicity comes out negative (the invariants then belong to
    no interval-decomposable square module).
    """
    m = {}
    m["abcd"] = inv.r_ad
    m["bcd"] = inv.i_d - m["abcd"]
    m["bd"] = inv.r_bd - m["bcd"] - m["abcd"]
    m["cd"] = inv.r_cd - m["bcd"] - m["abcd"]
    m["abc"] = inv.dim_a - inv.k_a - m["abcd"]
    m["ab"] = inv.r_ab - m["abc"] - m["abcd"]
    m["ac"] = inv.r_ac - m["abc"] - m["abcd"]
    m["a"] = inv.k_a - m["ab"] - m["ac"]
    m["b"] = inv.dim_b - m["ab"] - m["abc"] - m["bd"] - m["bcd"] - m["abcd"]
    m["c"] = inv.dim_c - m["ac"] - m["abc"] - m["cd"] - m["bcd"] - m["abcd"]
    m["d"] = inv.dim_d - m["bd"] - m["cd"] - m["bcd"] - m["abcd"]
    negative = [lab for lab in SQUARE_LABELS if m[lab] < 0]
    if negative:
        raise InconsistentSquareError(
            f"inconsistent invariants: negative multiplicity for {', '.join(negative)}"
        )
    return SquareBarcode(m)


def square_invariant_matrix() -> np.ndarray:
    """11x11 integer matrix: column j = invariants of interval type j.

    Row order matches SquareInvariants.as_vector, column order
    SQUARE_LABELS.  Used to certify that decompose_square inverts it.
    """
    cols = []
    for lab in SQUARE_LABELS:
        has = {c: (c in lab) for c in "abcd"}
        dim_a, dim_b, dim_c, dim_d = (int(has[c]) for c in "abcd")
        r_ab = int(has["a"] and has["b"])
        r_ac = int(has["a"] and has["c"])
        r_bd = int(has["b"] and has["d"])
        r_cd = int(has["c"] and has["d"])
        r_ad = int(has["a"] and has["d"])
        i_d = int(has["d"] and has["b"] and has["c"])
        # Ker(a->b) + Ker(a->c) is all of the 1-dim corner space unless
        # both legs are injective, i.e. unless b and c both lie in the type
        k_a = int(has["a"] and not (has["b"] and has["c"]))
        cols.append([dim_a, dim_b, dim_c, dim_d, r_ab, r_ac, r_bd, r_cd, r_ad, i_d, k_a])
    return np.array(cols, dtype=np.int64).T


# -- exactness checkers -------------------------------------------------


def is_weakly_exact_algebraic(module: GridModule):
    """Check Im rho_s^t = Im(b->t) ∩ Im(c->t) and the kernel-sum dual.

    Both conditions are one-sided inclusions by commutativity, so each
    is tested as a dimension equality.  Returns (True, None) or
    (False, (s, t)) with the lexicographically smallest failing pair.
    """
    p = module.p
    for s, t in comparable_pairs(module.nx, module.ny):
        bpt, cpt = (t[0], s[1]), (s[0], t[1])
        r_st = rank(module.composite(s, t), p)
        i_d = subspace_intersect(
            image_basis(module.composite(bpt, t), p),
            image_basis(module.composite(cpt, t), p),
        ).dim
        if r_st != i_d:
            return False, (s, t)
        k_a = subspace_sum(
            kernel_basis(module.composite(s, bpt), p),
            kernel_basis(module.composite(s, cpt), p),
        ).dim
        if module.dim_at(s) - r_st != k_a:
            return False, (s, t)
    return True, None


def is_weakly_exact_geometric(module: GridModule):
    """Check that no square's interval decomposition contains a hook."""
    for s, t in comparable_pairs(module.nx, module.ny):
        barcode = decompose_square(invariants_of_square(module, s, t))
        if not barcode.is_rectangular():
            return False, (s, t)
    return True, None


def is_strongly_exact(module: GridModule):
    """Middle exactness of M_s -> M_b (+) M_c -> M_t on every square.

    The image of the pairing map always sits inside the kernel of the
    difference map, so exactness is a dimension equality.
    """
    p = module.p
    for s, t in comparable_pairs(module.nx, module.ny):
        bpt, cpt = (t[0], s[1]), (s[0], t[1])
        pairing = np.vstack([module.composite(s, bpt), module.composite(s, cpt)])
        difference = np.hstack(
            [module.composite(bpt, t), (-module.composite(cpt, t)) % p]
        )
        if kernel_basis(difference, p).dim != rank(pairing, p):
            return False, (s, t)
    return True, None


# -- .gmod file format --------------------------------------------------


def write_gmod(module: GridModule) -> str:
    out = ["gridmodule", f"field {module.p}", f"grid {module.nx} {module.ny}"]
    for x in range(module.nx):
        for y in range(module.ny):
            d = int(module.dims[x, y])
            if d:
                out.append(f"dim {x + 1} {y + 1} {d}")
    def emit(kind, maps):
        for (x, y), m in sorted(maps.items()):
            if m.shape[0] and m.shape[1]:
                out.append(f"{kind} {x + 1} {y + 1}")
                for row in m:
                    out.append(" ".join(str(int(v)) for v in row))
    emit("hmap", module.hmaps)
    emit("vmap", module.vmaps)
    return "\n".join(out) + "\n"


def read_gmod(text: str) -> GridModule:
    lines = list(logical_lines(text))
    if not lines or lines[0][1] != "gridmodule":
        lineno = lines[0][0] if lines else 1
        raise FormatError(f"line {lineno}: expected 'gridmodule' header")
    i = 1
    p = nx = ny = None
    dims = {}
    hmaps, vmaps = {}, {}
    seen = set()

    def need(cond, lineno, msg):
        if not cond:
            raise FormatError(f"line {lineno}: {msg}")

    while i < len(lines):
        lineno, line = lines[i]
        toks = line.split()
        key = toks[0]
        if key == "field":
            need(p is None, lineno, "duplicate field line")
            need(len(toks) == 2, lineno, "expected 'field p'")
            p = parse_int(toks[1], lineno, "modulus")
            try:
                check_modulus(p)
            except ValueError as e:
                raise FormatError(f"line {lineno}: {e}") from None
            i += 1
        elif key == "grid":
            need(nx is None, lineno, "duplicate grid line")
            need(len(toks) == 3, lineno, "expected 'grid n m'")
            nx, ny = parse_int(toks[1], lineno, "extent"), parse_int(toks[2], lineno, "extent")
            need(nx >= 1 and ny >= 1, lineno, "grid extents must be positive")
            i += 1
        elif key == "dim":
            need(nx is not None, lineno, "dim before grid line")
            need(len(toks) == 4, lineno, "expected 'dim x y d'")
            x, y, d = (parse_int(t, lineno, "dim entry") for t in toks[1:])
            need(1 <= x <= nx and 1 <= y <= ny, lineno, f"point ({x},{y}) outside grid")
            need((x, y) not in dims, lineno, f"duplicate dim for ({x},{y})")
            need(d >= 0, lineno, "negative dimension")
            dims[(x, y)] = d
            i += 1
        elif key in ("hmap", "vmap"):
            need(nx is not None and p is not None, lineno, f"{key} before grid/field lines")
            need(len(toks) == 3, lineno, f"expected '{key} x y'")
            x, y = parse_int(toks[1], lineno, "x"), parse_int(toks[2], lineno, "y")
            tgt = (x + 1, y) if key == "hmap" else (x, y + 1)
            need(1 <= x <= nx and 1 <= y <= ny, lineno, f"point ({x},{y}) outside grid")
            need(tgt[0] <= nx and tgt[1] <= ny, lineno, f"{key} at ({x},{y}) leaves the grid")
            rows_needed = dims.get(tgt, 0)
            cols_needed = dims.get((x, y), 0)
            need(rows_needed > 0 and cols_needed > 0, lineno, f"{key} touches a zero space")
            need((key, x, y) not in seen, lineno, f"duplicate {key} at ({x},{y})")
            seen.add((key, x, y))
            i += 1
            mat = []
            for _ in range(rows_needed):
                need(i < len(lines), lineno, f"{key} at ({x},{y}): missing matrix rows")
                rlineno, rline = lines[i]
                row = [parse_int(t, rlineno, "matrix entry") for t in rline.split()]
                need(len(row) == cols_needed, rlineno,
                     f"expected {cols_needed} entries, got {len(row)}")
                mat.append(row)
                i += 1
            target = hmaps if key == "hmap" else vmaps
            target[(x - 1, y - 1)] = np.array(mat, dtype=np.int64)
        else:
            raise FormatError(f"line {lineno}: unknown directive {key!r}")
    if p is None:
        raise FormatError("line 1: missing 'field p' line")
    if nx is None:
        raise FormatError("line 1: missing 'grid n m' line")
    dims_arr = np.zeros((nx, ny), dtype=np.int64)
    for (x, y), d in dims.items():
        dims_arr[x - 1, y - 1] = d
    # every edge between two nonzero spaces must have been given
    for x in range(nx - 1):
        for y in range(ny):
            if dims_arr[x, y] and dims_arr[x + 1, y] and (x, y) not in hmaps:
                raise FormatError(f"missing hmap between nonzero spaces at ({x + 1},{y + 1})")
    for x in range(nx):
        for y in range(ny - 1):
            if dims_arr[x, y] and dims_arr[x, y + 1] and (x, y) not in vmaps:
                raise FormatError(f"missing vmap between nonzero spaces at ({x + 1},{y + 1})")
    return GridModule(nx, ny, p, dims_arr, hmaps, vmaps)
