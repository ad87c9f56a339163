"""Free bigraded modules, graded matrices, and free resolutions.

A free resolution of the graded homology of a 1-critical bifiltration
comes out of one primitive: a graded kernel basis of a column-graded
matrix, found by sweeping the grid and completing the kernel at each
point against the generators already recorded.  Generators are a graded
kernel basis of the boundary matrix, relations are boundary columns of
one dimension up rewritten in generator coordinates, and relations-on-
relations are a graded kernel basis of the relation matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .bifiltration import Bifiltration, homology_module
from .ioutil import FormatError, logical_lines, parse_int
from .linalg import (
    check_modulus,
    extend_basis,
    kernel_basis,
    matmul,
    rank,
    solve_matrix,
)


def _leq(a, b) -> bool:
    return a[0] <= b[0] and a[1] <= b[1]


@dataclass
class FreeModule:
    """A free bigraded module given by the grades of its basis."""

    grades: list

    def __post_init__(self):
        self.grades = [(int(g[0]), int(g[1])) for g in self.grades]

    def __len__(self) -> int:
        return len(self.grades)

    def count_leq(self, t) -> int:
        return sum(1 for g in self.grades if _leq(g, t))


@dataclass
class GradedMatrix:
    """Matrix of a map of free bigraded modules (rows: target basis)."""

    target: FreeModule
    source: FreeModule
    entries: np.ndarray
    p: int

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=np.int64) % self.p
        if self.entries.shape != (len(self.target), len(self.source)):
            raise ValueError(
                f"entries shape {self.entries.shape} does not match "
                f"{len(self.target)} rows x {len(self.source)} cols"
            )

    def validate_homogeneous(self) -> list[str]:
        problems = []
        for i, j in zip(*np.nonzero(self.entries)):
            if not _leq(self.target.grades[i], self.source.grades[j]):
                problems.append(
                    f"entry ({i + 1},{j + 1}) nonzero but row grade "
                    f"{self.target.grades[i]} is not below column grade {self.source.grades[j]}"
                )
        return problems


@dataclass
class FreeResolution:
    """0 -> relrels -> rels -> gens -> M -> 0 with graded matrices phi, psi."""

    gens: FreeModule
    rels: FreeModule
    relrels: FreeModule
    phi: GradedMatrix
    psi: GradedMatrix
    nx: int
    ny: int
    p: int


def evaluate(res: FreeResolution, t):
    """Dimensions and matrices of the evaluated resolution at grid point t.

    Returns ((k, l, m), phi_t, psi_t) where k/l/m count basis elements
    of grade <= t and the matrices are the corresponding submatrices.
    """
    gsel = [i for i, g in enumerate(res.gens.grades) if _leq(g, t)]
    rsel = [j for j, g in enumerate(res.rels.grades) if _leq(g, t)]
    zsel = [r for r, g in enumerate(res.relrels.grades) if _leq(g, t)]
    phi_t = res.phi.entries[np.ix_(gsel, rsel)]
    psi_t = res.psi.entries[np.ix_(rsel, zsel)]
    return (len(gsel), len(rsel), len(zsel)), phi_t, psi_t


def graded_kernel_basis(mat: np.ndarray, col_grades, nx: int, ny: int, p: int):
    """Basis of the graded kernel module of a column-graded matrix.

    Sweeps the grid in y-major order; at each point the kernel of the
    columns present so far is completed against the generators already
    found, and each genuinely new kernel vector is recorded with the
    current point as its grade.  Kernels of graded matrices over two
    parameters are free modules, so the union over the sweep restricts
    to a basis of the kernel at every single grid point.

    Returns (basis, grades): basis columns live in full column
    coordinates and vanish outside columns of grade <= their own.
    """
    cols = mat.shape[1]
    col_g = [(int(g[0]), int(g[1])) for g in col_grades]
    if len(col_g) != cols:
        raise ValueError("one grade per column required")
    found: list[np.ndarray] = []
    grades: list[tuple[int, int]] = []
    for y in range(ny):
        for x in range(nx):
            t = (x, y)
            mask = np.fromiter((_leq(g, t) for g in col_g), dtype=bool, count=cols)
            if not mask.any():
                continue
            ker = kernel_basis(mat[:, mask], p)
            if ker.dim == 0:
                continue
            emb = np.zeros((cols, ker.dim), dtype=np.int64)
            emb[mask] = ker.basis
            old = [v for v, g in zip(found, grades) if _leq(g, t)]
            base = np.column_stack(old) if old else np.zeros((cols, 0), dtype=np.int64)
            for j in extend_basis(base, emb, p):
                found.append(emb[:, j])
                grades.append(t)
    basis = np.column_stack(found) if found else np.zeros((cols, 0), dtype=np.int64)
    return basis, grades


def free_resolution(bif: Bifiltration, degree: int) -> FreeResolution:
    """A free resolution of the degree-q homology of the bifiltration.

    Generators are a graded kernel basis of the boundary matrix in the
    given degree.  Relations are the boundary columns of one dimension
    up rewritten in generator coordinates, keeping the simplex grades;
    columns that rewrite to zero are dropped (they would only feed a
    spurious cancellation into the next layer).  Relations-on-relations
    are a graded kernel basis of the relation matrix, by the same sweep.
    """
    p = bif.p
    q_list = bif.by_dim.get(degree, [])
    up_list = bif.by_dim.get(degree + 1, [])
    gen_basis, gen_grades = graded_kernel_basis(
        bif.boundary_matrix(degree), [bif.grades[s] for s in q_list], bif.nx, bif.ny, p
    )
    gens = FreeModule(gen_grades)
    d_up = bif.boundary_matrix(degree + 1)
    up_grades = [bif.grades[s] for s in up_list]
    phi_cols = []
    rel_grades = []
    for j in range(len(up_list)):
        sel = [i for i, gg in enumerate(gen_grades) if _leq(gg, up_grades[j])]
        x = solve_matrix(gen_basis[:, sel], d_up[:, j : j + 1], p)
        if x is None:  # boundaries are cycles, which the generators span gradewise
            raise AssertionError("boundary column outside the generator span")
        col = np.zeros(len(gens), dtype=np.int64)
        col[sel] = x[:, 0]
        if not col.any():
            continue
        phi_cols.append(col)
        rel_grades.append(up_grades[j])
    phi_entries = (
        np.column_stack(phi_cols)
        if phi_cols
        else np.zeros((len(gens), 0), dtype=np.int64)
    )
    rels = FreeModule(rel_grades)
    phi = GradedMatrix(gens, rels, phi_entries, p)
    psi_entries, rr_grades = graded_kernel_basis(
        phi_entries, rel_grades, bif.nx, bif.ny, p
    )
    relrels = FreeModule(rr_grades)
    psi = GradedMatrix(rels, relrels, psi_entries, p)
    return FreeResolution(gens, rels, relrels, phi, psi, bif.nx, bif.ny, p)


def validate_resolution(res: FreeResolution, bif: Bifiltration, degree: int) -> Optional[str]:
    """Check exactness of 0 -> relrels -> rels -> gens -> H_q -> 0 pointwise.

    Returns None when the evaluated sequence is exact at every grid
    point, else a message naming the first failing point (y-major
    order) and the failing slot.  The homology dimensions come from the
    brute-force oracle module.
    """
    p = res.p
    if matmul(res.phi.entries, res.psi.entries, p).any():
        return "phi . psi is not zero"
    oracle = homology_module(bif, degree)
    if (oracle.nx, oracle.ny) != (res.nx, res.ny):
        return "resolution grid does not match the bifiltration grid"
    for y in range(res.ny):
        for x in range(res.nx):
            t = (x, y)
            (k, l, m), phi_t, psi_t = evaluate(res, t)
            r_phi = rank(phi_t, p)
            if rank(psi_t, p) != m:
                return f"psi not injective at {t}"
            if l - r_phi != m:
                return f"Ker phi != Im psi at {t}"
            if k - r_phi != oracle.dim_at(t):
                return (
                    f"coker phi has dimension {k - r_phi} at {t} "
                    f"but homology has {oracle.dim_at(t)}"
                )
    return None


def lub_of_column(mat: GradedMatrix, j: int, row_grades=None):
    """Least upper bound of the grades of rows hit by column j.

    `row_grades` overrides the row module's own grades; passing each
    relation's lub yields the lub of a relation-on-relations.
    """
    if row_grades is None:
        row_grades = mat.target.grades
    rows = np.nonzero(mat.entries[:, j])[0]
    if rows.size == 0:
        raise ValueError(f"column {j} is zero and has no lub")
    return (
        max(row_grades[i][0] for i in rows),
        max(row_grades[i][1] for i in rows),
    )


# -- .fres file format -----------------------------------------------------


def write_fres(res: FreeResolution) -> str:
    out = ["resolution", f"field {res.p}", f"grid {res.nx} {res.ny}"]
    for name, fm in (("gens", res.gens), ("rels", res.rels), ("relrels", res.relrels)):
        out.append(name)
        for g in fm.grades:
            out.append(f"{g[0] + 1} {g[1] + 1}")
    for name, gm in (("phi", res.phi), ("psi", res.psi)):
        out.append(name)
        for i, j in zip(*np.nonzero(gm.entries)):
            out.append(f"{i + 1} {j + 1} {int(gm.entries[i, j])}")
    return "\n".join(out) + "\n"


def read_fres(text: str) -> FreeResolution:
    lines = list(logical_lines(text))
    if not lines or lines[0][1] != "resolution":
        lineno = lines[0][0] if lines else 1
        raise FormatError(f"line {lineno}: expected 'resolution' header")
    pos = 1

    def take(prefix, parts):
        nonlocal pos
        if pos >= len(lines):
            raise FormatError(f"line {lines[-1][0]}: missing '{prefix}' section")
        lineno, line = lines[pos]
        toks = line.split()
        if toks[0] != prefix or len(toks) != parts + 1:
            raise FormatError(f"line {lineno}: expected '{prefix}'" + " with arguments" * bool(parts))
        pos += 1
        return lineno, toks[1:]

    lineno, toks = take("field", 1)
    p = parse_int(toks[0], lineno, "modulus")
    try:
        check_modulus(p)
    except ValueError as e:
        raise FormatError(f"line {lineno}: {e}") from None
    lineno, toks = take("grid", 2)
    nx, ny = (parse_int(v, lineno, "extent") for v in toks)
    if nx < 1 or ny < 1:
        raise FormatError(f"line {lineno}: grid extents must be positive")

    def grade_block(name):
        nonlocal pos
        take(name, 0)
        grades = []
        while pos < len(lines) and lines[pos][1].split()[0] not in (
            "gens", "rels", "relrels", "phi", "psi",
        ):
            lineno, line = lines[pos]
            toks = line.split()
            if len(toks) != 2:
                raise FormatError(f"line {lineno}: expected 'g_x g_y'")
            gx, gy = (parse_int(v, lineno, "grade") for v in toks)
            if not (1 <= gx <= nx and 1 <= gy <= ny):
                raise FormatError(f"line {lineno}: grade ({gx},{gy}) outside the grid")
            grades.append((gx - 1, gy - 1))
            pos += 1
        return grades

    gens = FreeModule(grade_block("gens"))
    rels = FreeModule(grade_block("rels"))
    relrels = FreeModule(grade_block("relrels"))

    def matrix_block(name, n_rows, n_cols):
        nonlocal pos
        take(name, 0)
        mat = np.zeros((n_rows, n_cols), dtype=np.int64)
        while pos < len(lines):
            lineno, line = lines[pos]
            toks = line.split()
            if toks[0] in ("phi", "psi"):
                break
            if len(toks) != 3:
                raise FormatError(f"line {lineno}: expected 'row col value'")
            i, j, v = (parse_int(tok, lineno, "triplet entry") for tok in toks)
            if not (1 <= i <= n_rows and 1 <= j <= n_cols):
                raise FormatError(f"line {lineno}: index ({i},{j}) outside {n_rows}x{n_cols}")
            mat[i - 1, j - 1] = v % p
            pos += 1
        return mat

    phi = GradedMatrix(gens, rels, matrix_block("phi", len(gens), len(rels)), p)
    psi = GradedMatrix(rels, relrels, matrix_block("psi", len(rels), len(relrels)), p)
    for name, gm in (("phi", phi), ("psi", psi)):
        problems = gm.validate_homogeneous()
        if problems:
            raise FormatError(f"{name} not homogeneous: {problems[0]}")
    return FreeResolution(gens, rels, relrels, phi, psi, nx, ny, p)
