"""Rank invariants from free resolutions, without evaluating the module.

The rank of the structure map s -> t of the presented module is

    r(s,t) = #{generators with grade <= s}
           - dim( span{relation columns with grade <= t} cap <rows <= s> )

and the intersection dimension unfolds into two rank tables of the
relation matrix:

    r(s,t) = #{gens <= s} - rank(phi[:, cols <= t]) + rank(phi[rows not <= s, cols <= t])

which needs one echelon sweep per grid row for the middle term and one
per class of row-support for the last.  `rank_from_resolution` computes
this; it is exact for every resolution of the module.

`rank_from_resolution_counting` instead counts relation profiles: each
relation decrements the table on {lub(eta) <= s, grade(eta) <= t}, and
each relation-on-relations increments it back on the analogous window.
The two agree whenever the stored layers enumerate the window
dimensions one column per dimension (direct sums of rectangles, merges,
most small fixtures); on general inputs the profile counts can
undershoot, so the rank form is the one to trust.
"""

from __future__ import annotations

import numpy as np

from .grid_module import GridModule, RankInvariant
from .linalg import rank
from .resolution import FreeResolution, lub_of_column


def _comparable_mask(nx: int, ny: int) -> np.ndarray:
    sx = np.arange(nx)[:, None, None, None]
    sy = np.arange(ny)[None, :, None, None]
    tx = np.arange(nx)[None, None, :, None]
    ty = np.arange(ny)[None, None, None, :]
    return (sx <= tx) & (sy <= ty)


def _gen_count_table(res: FreeResolution) -> np.ndarray:
    hist = np.zeros((res.nx, res.ny), dtype=np.int64)
    for g in res.gens.grades:
        hist[g] += 1
    np.cumsum(hist, axis=0, out=hist)
    np.cumsum(hist, axis=1, out=hist)
    return hist


def _prefix_rank_table(mat: np.ndarray, col_grades: np.ndarray, nx: int, ny: int, p: int) -> np.ndarray:
    """T[x, y] = rank of the columns of grade <= (x, y), mod p.

    One reduced-echelon sweep per grid row: for fixed y the admitted
    column set only grows with x, so a single incremental reduction
    records the rank at every x threshold.
    """
    k, l = mat.shape
    out = np.zeros((nx, ny), dtype=np.int64)
    if k == 0 or l == 0:
        return out
    gx, gy = col_grades[:, 0], col_grades[:, 1]
    for ty in range(ny):
        sel = np.nonzero(gy <= ty)[0]
        if sel.size == 0:
            continue
        sel = sel[np.argsort(gx[sel], kind="stable")]
        basis = np.zeros((k, 0), dtype=np.int64)  # fully reduced echelon columns
        piv = np.zeros(0, dtype=np.int64)
        gained = np.zeros(nx, dtype=np.int64)
        for j in sel:
            v = mat[:, j] % p
            if piv.size:
                v = (v - basis @ v[piv]) % p
            nz = np.nonzero(v)[0]
            if nz.size == 0:
                continue
            r0 = int(nz[0])
            v = (v * pow(int(v[r0]), p - 2, p)) % p
            if piv.size:
                basis = (basis - np.outer(v, basis[r0])) % p
            basis = np.column_stack([basis, v])
            piv = np.append(piv, r0)
            gained[gx[j]] += 1
        out[:, ty] = np.cumsum(gained)
    return out


def rank_from_resolution(res: FreeResolution) -> RankInvariant:
    """The full rank invariant of the presented module, table-exact.

    Three passes over one signed accumulator: generator prefix counts,
    minus the column-prefix rank table of the relation matrix, plus the
    correction ranks on the rows not below s (grouped by row support,
    so grids sharing the same live generators share one sweep).
    """
    nx, ny, p = res.nx, res.ny, res.p
    table = np.zeros((nx, ny, nx, ny), dtype=np.int64)
    table += _gen_count_table(res)[:, :, None, None]
    if len(res.rels):
        col_g = np.array(res.rels.grades, dtype=np.int64).reshape(-1, 2)
        table -= _prefix_rank_table(res.phi.entries, col_g, nx, ny, p)[None, None, :, :]
        gg = np.array(res.gens.grades, dtype=np.int64).reshape(-1, 2)
        sx = np.arange(nx)[:, None, None]
        sy = np.arange(ny)[None, :, None]
        low = (gg[None, None, :, 0] <= sx) & (gg[None, None, :, 1] <= sy)
        flat = low.reshape(nx * ny, -1)
        classes, inverse = np.unique(flat, axis=0, return_inverse=True)
        for c in range(classes.shape[0]):
            high = ~classes[c]
            if not high.any():
                continue  # all generators alive below s: nothing above to correct
            sub = _prefix_rank_table(res.phi.entries[high], col_g, nx, ny, p)
            for f in np.nonzero(inverse == c)[0]:
                table[f // ny, f % ny] += sub
    mask = _comparable_mask(nx, ny)
    assert not (table[mask] < 0).any(), "rank table went negative"
    table[~mask] = 0
    return RankInvariant(nx, ny, table)


def _lub_tables(res: FreeResolution):
    rel_lubs = [lub_of_column(res.phi, j) for j in range(len(res.rels))]
    rr_lubs = [
        lub_of_column(res.psi, r, row_grades=rel_lubs) for r in range(len(res.relrels))
    ]
    return rel_lubs, rr_lubs


def rank_from_resolution_counting(res: FreeResolution) -> RankInvariant:
    """The profile-count form of the invariant, by 4-D prefix sums.

    r(s,t) = #{gens <= s} - #{rels: lub <= s, grade <= t}
                          + #{relrels: lub <= s, grade <= t}.

    Exact precisely when the stored layers hit every window dimension
    once; elsewhere individual entries can undershoot (even below
    zero), which `rank_from_resolution` never does.
    """
    nx, ny = res.nx, res.ny
    table = np.zeros((nx, ny, nx, ny), dtype=np.int64)
    table += _gen_count_table(res)[:, :, None, None]
    rel_lubs, rr_lubs = _lub_tables(res)
    hist = np.zeros((nx, ny, nx, ny), dtype=np.int64)
    for sign, lubs, grades in (
        (-1, rel_lubs, res.rels.grades),
        (+1, rr_lubs, res.relrels.grades),
    ):
        if not grades:
            continue
        hist[:] = 0
        for lub, g in zip(lubs, grades):
            hist[lub[0], lub[1], g[0], g[1]] += 1
        for axis in range(4):
            np.cumsum(hist, axis=axis, out=hist)
        if sign < 0:
            table -= hist
        else:
            table += hist
    table[~_comparable_mask(nx, ny)] = 0
    return RankInvariant(nx, ny, table)


def rank_1d(module: GridModule) -> dict:
    """Interval multiplicities of a one-parameter module (single row).

    m([s,t]) = r(s,t) - r(s-1,t) - r(s,t+1) + r(s-1,t+1), out-of-range
    ranks zero; a negative value cannot come from an actual module.
    """
    if module.ny != 1:
        raise ValueError("rank_1d expects a module on an n x 1 grid")
    n = module.nx
    r = np.zeros((n + 2, n + 2), dtype=np.int64)  # shifted by +1, zero-padded
    for s in range(n):
        for t in range(s, n):
            r[s + 1, t + 1] = rank(module.composite((s, 0), (t, 0)), module.p)
    out = {}
    for s in range(n):
        for t in range(s, n):
            m = int(r[s + 1, t + 1] - r[s, t + 1] - r[s + 1, t + 2] + r[s, t + 2])
            if m < 0:
                raise ValueError(f"negative multiplicity {m} for interval [{s}, {t}]")
            if m:
                out[(s, t)] = m
    return out
