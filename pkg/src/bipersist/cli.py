"""Command-line front end over the library pipelines.

Exit codes: 0 for success (and a "decomposable" verdict), 2 for a
negative checker verdict (or `decompose-rectangles --strict` hitting
negative multiplicities), 1 for any input or usage error.  All outputs
are deterministic given the inputs and seeds.
"""

from __future__ import annotations

import argparse
import os
import sys

from .bifiltration import Bifiltration, col_zigzag, homology_module, read_bif, row_zigzag
from .constructions import EXAMPLE_NAMES, example, indecgrid, random_rectangle_module
from .grid_module import RankInvariant, rank_invariant_naive, read_gmod, write_gmod
from .ioutil import FormatError
from .rank_dp import rank_from_resolution
from .rect_decomp import RectangleBarcode, decompose
from .resolution import free_resolution, read_fres
from .weakexact import check_bifiltration, check_module
from .zigzag import write_zbar, zigzag_barcode

# The DP materializes the full 4-D rank table; past this extent the
# table alone would outgrow desk-scale memory.
DP_GRID_CAP = 60


class CliError(Exception):
    """Usage or input problem; reported on stderr, exit code 1."""


def _read_file(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise CliError(str(e)) from None


def _write_output(text: str, path):
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as e:
        raise CliError(str(e)) from None


def _ext(path: str) -> str:
    return os.path.splitext(path)[1].lower()


def _check_field(flag_p, file_p: int):
    if flag_p is not None and flag_p != file_p:
        raise CliError(
            f"--field {flag_p} conflicts with the file's field {file_p}; "
            "re-reduction is refused"
        )


def _check_dp_cap(nx: int, ny: int):
    if max(nx, ny) > DP_GRID_CAP:
        raise CliError(
            f"grid {nx}x{ny} exceeds the {DP_GRID_CAP}x{DP_GRID_CAP} cap of the DP path"
        )


def _load_bif(path: str, field) -> Bifiltration:
    bif = read_bif(_read_file(path))
    _check_field(field, bif.p)
    problems = bif.validate()
    if problems:
        raise CliError(f"{path}: {problems[0]}")
    return bif


def _load_gmod(path: str, field):
    module = read_gmod(_read_file(path))
    _check_field(field, module.p)
    problems = module.validate()
    if problems:
        raise CliError(f"{path}: {problems[0]}")
    return module


def _load_fres(path: str, field):
    res = read_fres(_read_file(path))
    _check_field(field, res.p)
    return res


def _point_1based(raw: str, flag: str):
    parts = raw.split(",")
    if len(parts) != 2:
        raise CliError(f"{flag} expects 'x,y' (1-based)")
    try:
        x, y = (int(v) for v in parts)
    except ValueError:
        raise CliError(f"{flag} expects integers, got {raw!r}") from None
    return x - 1, y - 1


# -- subcommands -------------------------------------------------------------


def cmd_validate(args) -> int:
    ext = _ext(args.file)
    text = _read_file(args.file)
    if ext == ".bif":
        problems = read_bif(text).validate()
    elif ext == ".gmod":
        problems = read_gmod(text).validate()
    elif ext == ".fres":
        read_fres(text)  # the reader enforces shapes and homogeneity
        problems = []
    else:
        raise CliError(f"cannot validate {ext or 'extensionless'} files")
    if problems:
        for problem in problems:
            print(f"{args.file}: {problem}", file=sys.stderr)
        return 1
    print("ok")
    return 0


def _rank_of_input(args) -> RankInvariant:
    ext = _ext(args.infile)
    degree = args.degree
    if ext == ".bif":
        bif = _load_bif(args.infile, args.field)
        method = args.method or "dp"
        if method == "dp":
            _check_dp_cap(bif.nx, bif.ny)
            return rank_from_resolution(free_resolution(bif, degree or 0))
        return rank_invariant_naive(homology_module(bif, degree or 0))
    if degree is not None:
        raise CliError("--degree applies to .bif inputs only")
    if ext == ".gmod":
        if args.method == "dp":
            raise CliError("--method dp needs a .bif or .fres input")
        return rank_invariant_naive(_load_gmod(args.infile, args.field))
    if ext == ".fres":
        if args.method == "naive":
            raise CliError("--method naive needs a .bif or .gmod input")
        res = _load_fres(args.infile, args.field)
        _check_dp_cap(res.nx, res.ny)
        return rank_from_resolution(res)
    raise CliError(f"cannot compute ranks from {ext or 'extensionless'} files")


def cmd_rank(args) -> int:
    _write_output(_rank_of_input(args).to_text(), args.output)
    return 0


def cmd_decompose(args) -> int:
    ext = _ext(args.infile)
    if ext == ".rank":
        inv = RankInvariant.from_text(_read_file(args.infile))
    else:
        inv = _rank_of_input(args)
    barcode, clean = decompose(inv)
    _write_output(barcode.to_text(), args.output)
    if not clean:
        print(
            "warning: negative multiplicities encountered; no rectangle-"
            "decomposable module has this rank invariant",
            file=sys.stderr,
        )
        if args.strict:
            return 2
    return 0


def cmd_check(args) -> int:
    ext = _ext(args.infile)
    if ext == ".bif":
        method = args.method or "zigzag"
        bif = _load_bif(args.infile, args.field)
        degree = args.degree or 0
        if method == "zigzag":
            ok, witness = check_bifiltration(bif, degree, args.jobs)
        else:
            ok, witness = check_module(homology_module(bif, degree), method)
    elif ext == ".gmod":
        method = args.method or "algebraic"
        if method == "zigzag":
            raise CliError("--method zigzag needs a .bif input")
        if args.degree is not None:
            raise CliError("--degree applies to .bif inputs only")
        ok, witness = check_module(_load_gmod(args.infile, args.field), method)
    else:
        raise CliError(f"cannot check {ext or 'extensionless'} files")
    print("decomposable" if ok else "not-decomposable")
    if ok:
        return 0
    s, t, reason = witness
    print(
        f"witness: s=({s[0] + 1},{s[1] + 1}) t=({t[0] + 1},{t[1] + 1}): {reason}",
        file=sys.stderr,
    )
    return 2


def cmd_zigzag(args) -> int:
    bif = _load_bif(args.infile, args.field)
    if (args.row is None) == (args.col is None):
        raise CliError("exactly one of --row and --col is required")
    if args.row is not None:
        x, y = _point_1based(args.row, "--row")
    else:
        x, y = _point_1based(args.col, "--col")
    if not (0 <= x < bif.nx and 0 <= y < bif.ny):
        raise CliError(f"point ({x + 1},{y + 1}) outside the {bif.nx}x{bif.ny} grid")
    zz = row_zigzag(bif, (x, y)) if args.row is not None else col_zigzag(bif, (x, y))
    barcode = zigzag_barcode(zz, args.degree or 0, bif.p)
    _write_output(write_zbar([barcode]), args.output)
    return 0


def cmd_examples(args) -> int:
    p = args.field if args.field is not None else 2
    if args.name == "indecgrid":
        if args.n is None:
            raise CliError("indecgrid needs --n")
        try:
            module = indecgrid(args.n, p)
        except ValueError as e:
            raise CliError(str(e)) from None
    else:
        if args.n is not None:
            raise CliError("--n applies to indecgrid only")
        try:
            module = example(args.name, p)
        except ValueError as e:
            raise CliError(str(e)) from None
    _write_output(write_gmod(module), args.output)
    return 0


def cmd_random_rect(args) -> int:
    if args.n < 1 or args.m < 1 or args.count < 1:
        raise CliError("grid extents and summand count must be positive")
    p = args.field if args.field is not None else 2
    module, truth = random_rectangle_module(args.n, args.m, args.count, args.seed, p)
    prefix = args.output
    _write_output(write_gmod(module), f"{prefix}.gmod")
    _write_output(RectangleBarcode(truth).to_text(), f"{prefix}.barcode")
    print(f"wrote {prefix}.gmod and {prefix}.barcode")
    return 0


# -- argument parsing --------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bipersist",
        description="Two-parameter persistence over finite grids: ranks, "
        "rectangle barcodes, zigzags, decomposability checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_field(p):
        p.add_argument(
            "--field",
            type=int,
            metavar="p",
            help="field modulus; must match file headers when reading",
        )

    p = sub.add_parser("validate", help="validate a .bif/.gmod/.fres file")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("rank", help="compute a rank invariant (.rank)")
    p.add_argument("infile", help=".bif, .gmod, or .fres input")
    p.add_argument("--degree", type=int, metavar="p", help="homology degree (.bif only, default 0)")
    p.add_argument("--method", choices=["dp", "naive"], help="dp (from a free resolution) or naive (explicit matrices)")
    p.add_argument("-o", "--output", metavar="out.rank", help="output path (default stdout)")
    add_field(p)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("decompose-rectangles", help="rectangle barcode of a rank invariant")
    p.add_argument("infile", help=".rank, .bif, or .gmod input")
    p.add_argument("--degree", type=int, metavar="p", help="homology degree (.bif only, default 0)")
    p.add_argument("--method", choices=["dp", "naive"], help="rank method for .bif inputs")
    p.add_argument("--strict", action="store_true", help="exit 2 on negative multiplicities")
    p.add_argument("-o", "--output", metavar="out.barcode", help="output path (default stdout)")
    add_field(p)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("check-rectangle", help="decide rectangle-decomposability")
    p.add_argument("infile", help=".bif or .gmod input")
    p.add_argument("--method", choices=["zigzag", "algebraic", "geometric"])
    p.add_argument("--degree", type=int, metavar="p", help="homology degree (.bif only, default 0)")
    p.add_argument("--jobs", type=int, metavar="k", help="parallel zigzag sweeps (result independent of k)")
    add_field(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("zigzag-barcode", help="barcode of a row or column zigzag path")
    p.add_argument("infile", help=".bif input")
    p.add_argument("--row", metavar="j,l", help="row path through corner (j,l), 1-based")
    p.add_argument("--col", metavar="i,k", help="column path through corner (i,k), 1-based")
    p.add_argument("--degree", type=int, metavar="p", help="homology degree (default 0)")
    p.add_argument("-o", "--output", metavar="out.zbar", help="output path (default stdout)")
    add_field(p)
    p.set_defaults(func=cmd_zigzag)

    p = sub.add_parser("examples", help="emit a module from the worked-example catalogue")
    p.add_argument("name", help=f"one of {', '.join(EXAMPLE_NAMES)}, or indecgrid")
    p.add_argument("--n", type=int, help="size parameter (indecgrid only, n >= 2)")
    p.add_argument("-o", "--output", metavar="out.gmod", help="output path (default stdout)")
    add_field(p)
    p.set_defaults(func=cmd_examples)

    p = sub.add_parser("random-rect", help="random rectangle-decomposable module + ground truth")
    p.add_argument("n", type=int, help="grid width")
    p.add_argument("m", type=int, help="grid height")
    p.add_argument("count", type=int, help="maximum number of rectangle summands")
    p.add_argument("--seed", type=int, default=0, metavar="s")
    p.add_argument("-o", "--output", metavar="PREFIX", required=True, help="writes PREFIX.gmod and PREFIX.barcode")
    add_field(p)
    p.set_defaults(func=cmd_random_rect)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CliError, FormatError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
