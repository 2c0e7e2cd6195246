"""Module documents, the reconstruction round-trip, and the command line.

File format ("mpers2/1"): a JSON document carrying the field descriptor,
grid axes, nonzero fiber dimensions and nonzero edge matrices.  Matrix
entries are decimal integer strings for GF(p) and "num/den" strings for
rationals, never floating point, so exactness survives serialization.
Points with omitted dimensions read as 0 and omitted edges as zero maps;
import followed by export reconstructs the module structurally.

CSV tables have the schema a_0..a_{n-1}, b_0..b_{n-1}, value with a
mandatory header row; axis values are reported as grid coordinates, ready
for parameter-space heatmaps.  All commands are deterministic: identical
inputs produce byte-identical outputs.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path

from .bifiltration import PointCloud, build_bifiltration, homology_module
from .entropy import entropy_table, persistent_entropy
from .field_matrix import Field, Matrix
from .grid_module import (
    Box,
    GridPoset,
    NatTransform,
    PersistenceModule,
    is_equal,
    validate,
)
from .interleaving import interleaving_distance_upper, search_interleaving
from .lnti import hom_space_dim, lnti_table
from .mbi import decompose, mbi_table
from .rank_invariant import InvariantTable, rank_at, rank_table

FORMAT_VERSION = "mpers2/1"
LOG2 = 0.6931471805599453


class ModuleFormatError(ValueError):
    """Malformed module document; the message locates the offending field."""


def _field_name(field: Field) -> str:
    return "QQ" if field.p is None else f"GF({field.p})"


def _parse_field(name) -> Field:
    if name == "QQ":
        return Field()
    if isinstance(name, str) and name.startswith("GF(") and name.endswith(")"):
        try:
            return Field(int(name[3:-1]))
        except ValueError as e:
            raise ModuleFormatError(f"bad field descriptor {name!r}: {e}") from None
    raise ModuleFormatError(f"unknown field descriptor {name!r}")


def _scalar_str(field: Field, x) -> str:
    if field.p is not None:
        return str(x)
    fr = Fraction(x)
    return str(fr.numerator) if fr.denominator == 1 else f"{fr.numerator}/{fr.denominator}"


def _parse_scalar(field: Field, s, where: str):
    try:
        if field.p is not None:
            return int(s) % field.p
        if "/" in s:
            num, den = s.split("/", 1)
            return Fraction(int(num), int(den))
        return Fraction(int(s))
    except (ValueError, ZeroDivisionError) as e:
        raise ModuleFormatError(f"{where}: bad scalar {s!r} ({e})") from None


def _matrix_doc(m: Matrix, field: Field) -> dict:
    return {
        "rows": m.rows,
        "cols": m.cols,
        "entries": [_scalar_str(field, x) for row in m.data for x in row],
    }


def _parse_matrix(doc, field: Field, where: str) -> Matrix:
    try:
        rows, cols, entries = doc["rows"], doc["cols"], doc["entries"]
    except (KeyError, TypeError):
        raise ModuleFormatError(f"{where}: matrix needs rows, cols, entries") from None
    if len(entries) != rows * cols:
        raise ModuleFormatError(
            f"{where}: expected {rows * cols} entries, got {len(entries)}"
        )
    vals = [_parse_scalar(field, e, where) for e in entries]
    data = [vals[i * cols : (i + 1) * cols] for i in range(rows)]
    return Matrix(field, rows, cols, data)


def export_module(m: PersistenceModule) -> dict:
    """Module document; omits zero dims and zero edge maps (default rules)."""
    doc = {
        "version": FORMAT_VERSION,
        "field": _field_name(m.field),
        "axes": [list(ax) for ax in m.grid.axes],
        "dims": {
            ",".join(map(str, t)): d for t, d in sorted(m.dims.items()) if d > 0
        },
        "edges": [],
    }
    for (t, axis), mat in sorted(m.edge_maps.items()):
        if mat.rows == 0 or mat.cols == 0 or mat.is_zero():
            continue
        doc["edges"].append(
            {"point": list(t), "axis": axis, "matrix": _matrix_doc(mat, m.field)}
        )
    return doc


def import_module(doc: dict) -> PersistenceModule:
    """Parse and validate a module document.

    Raises ModuleFormatError with a located diagnostic for malformed input,
    including square-commutativity violations of an otherwise parseable
    document.
    """
    if not isinstance(doc, dict):
        raise ModuleFormatError("document is not a JSON object")
    version = doc.get("version")
    if version != FORMAT_VERSION:
        raise ModuleFormatError(f"unsupported format version {version!r}")
    field = _parse_field(doc.get("field"))
    try:
        grid = GridPoset(doc["axes"])
    except (KeyError, ValueError, TypeError) as e:
        raise ModuleFormatError(f"bad axes: {e}") from None
    dims = {}
    for key, d in doc.get("dims", {}).items():
        try:
            t = tuple(int(x) for x in key.split(","))
        except ValueError:
            raise ModuleFormatError(f"dims: bad point key {key!r}") from None
        if not grid.contains(t):
            raise ModuleFormatError(f"dims: point {t} is outside the grid")
        if not isinstance(d, int) or d < 0:
            raise ModuleFormatError(f"dims: bad dimension {d!r} at {t}")
        dims[t] = d
    edges = {}
    for i, e in enumerate(doc.get("edges", [])):
        where = f"edge entry {i}"
        try:
            t = tuple(int(x) for x in e["point"])
            axis = int(e["axis"])
        except (KeyError, TypeError, ValueError):
            raise ModuleFormatError(f"{where}: needs point and axis") from None
        if not grid.contains(t) or axis >= grid.n or t[axis] + 1 >= grid.shape[axis]:
            raise ModuleFormatError(f"{where}: {t} axis {axis} is not a covering edge")
        mat = _parse_matrix(e.get("matrix"), field, where)
        head = t[:axis] + (t[axis] + 1,) + t[axis + 1 :]
        want_r, want_c = dims.get(head, 0), dims.get(t, 0)
        if mat.rows != want_r or mat.cols != want_c:
            raise ModuleFormatError(
                f"{where}: matrix shape {mat.rows}x{mat.cols} does not match dims "
                f"{want_r}x{want_c} at point {t} axis {axis}"
            )
        edges[(t, axis)] = mat
    mod = PersistenceModule(grid, field, dims, edges)
    bad = validate(mod)
    if bad:
        raise ModuleFormatError("module fails validation: " + "; ".join(bad))
    return mod


def save_module(m: PersistenceModule, path):
    Path(path).write_text(json.dumps(export_module(m), indent=2, sort_keys=True) + "\n")


def load_module(path) -> PersistenceModule:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise ModuleFormatError(f"{path}: invalid JSON at line {e.lineno}: {e.msg}") from None
    return import_module(doc)


def export_transform(eta: NatTransform) -> dict:
    field = eta.target.field
    return {
        "version": FORMAT_VERSION,
        "components": [
            {"point": list(t), "matrix": _matrix_doc(mat, field)}
            for t, mat in sorted(eta.components.items())
        ],
    }


def write_table_csv(table: InvariantTable, path, value_fmt=str):
    """CSV rows in lexicographic (a, b) index order, coordinates as values."""
    g = table.grid
    header = (
        [f"a_{i}" for i in range(g.n)] + [f"b_{i}" for i in range(g.n)] + ["value"]
    )
    lines = [",".join(header)]
    for (a, b), v in table.items():
        coords = list(g.coords(a)) + list(g.coords(b))
        lines.append(",".join(str(c) for c in coords) + "," + value_fmt(v))
    Path(path).write_text("\n".join(lines) + "\n")


def _n_threads() -> int:
    try:
        return max(1, int(os.environ.get("MPERS2_THREADS", "1")))
    except ValueError:
        return 1


def _parallel_pairs(grid, box, fn):
    """Evaluate fn over comparable pairs, optionally on a thread pool.

    Results are merged into a dict in deterministic key order, so the
    output is identical regardless of the thread count.
    """
    pairs = list(grid.comparable_pairs(box))
    threads = _n_threads()
    if threads == 1:
        return {pair: fn(pair) for pair in pairs}
    with ThreadPoolExecutor(max_workers=threads) as pool:
        vals = list(pool.map(fn, pairs))
    return dict(zip(pairs, vals))


def _parse_box(grid: GridPoset, text: str) -> Box:
    try:
        lo_txt, hi_txt = text.split("..")
        lo_coords = [float(x) for x in lo_txt.split(",")]
        hi_coords = [float(x) for x in hi_txt.split(",")]
    except ValueError:
        raise ValueError(f"bad box syntax {text!r}; expected a1,a2..b1,b2") from None

    def locate(coords):
        idx = []
        for i, c in enumerate(coords):
            hits = [k for k, v in enumerate(grid.axes[i]) if abs(v - c) <= 1e-9]
            if not hits:
                raise ValueError(f"coordinate {c} is not on axis {i}")
            idx.append(hits[0])
        return tuple(idx)

    if len(lo_coords) != grid.n or len(hi_coords) != grid.n:
        raise ValueError(f"box needs {grid.n} coordinates per corner")
    return Box(locate(lo_coords), locate(hi_coords))


def _cmd_validate(args) -> int:
    try:
        load_module(args.module)
    except ModuleFormatError as e:
        print(f"INVALID: {e}")
        return 1
    print("OK")
    return 0


def _cmd_rank(args) -> int:
    m = load_module(args.module)
    box = _parse_box(m.grid, args.box) if args.box else None
    entries = _parallel_pairs(m.grid, box, lambda ab: rank_at(m, ab[0], ab[1]))
    write_table_csv(InvariantTable(m.grid, entries), args.out)
    print(f"wrote {args.out}")
    return 0


def _cmd_lnti(args) -> int:
    m = load_module(args.module)
    n = load_module(args.other) if args.other else m
    box = _parse_box(m.grid, args.box) if args.box else None
    if m.grid.n == 1:
        table = lnti_table(m, n, box)
    else:
        entries = _parallel_pairs(
            m.grid, box, lambda ab: hom_space_dim(m, n, Box(ab[0], ab[1]))
        )
        table = InvariantTable(m.grid, entries)
    write_table_csv(table, args.out)
    print(f"wrote {args.out}")
    return 0


def _cmd_mbi(args) -> int:
    m = load_module(args.module)
    table = mbi_table(m)
    sigs = []
    for (a, b), sig in table.items():
        sigs.append(
            {
                "a": list(m.grid.coords(a)),
                "b": list(m.grid.coords(b)),
                "betti_a": sig.betti_a,
                "betti_b": sig.betti_b,
                "rank": sig.rank_ab,
                "svd": sig.svd,
                "idempotent_ranks": sig.idempotent_rank_multiset,
                "complete": sig.complete,
            }
        )
    Path(args.out).write_text(
        json.dumps({"version": FORMAT_VERSION, "signatures": sigs}, indent=2) + "\n"
    )
    print(f"wrote {args.out}")
    return 0


def _cmd_decompose(args) -> int:
    m = load_module(args.module)
    result = decompose(m)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    for i, s in enumerate(result.summands):
        save_module(s, outdir / f"summand_{i:03d}.json")
    (outdir / "witness.json").write_text(
        json.dumps(export_transform(result.witness), indent=2, sort_keys=True) + "\n"
    )
    print(
        f"{len(result.summands)} summand(s), complete={result.complete}, "
        f"written to {outdir}"
    )
    return 0


def _cmd_entropy(args) -> int:
    m = load_module(args.module)
    box = _parse_box(m.grid, args.box) if args.box else None
    entries = _parallel_pairs(m.grid, box, lambda ab: persistent_entropy(m, ab[0], ab[1]))
    if args.bits:
        entries = {k: v / LOG2 for k, v in entries.items()}
    write_table_csv(InvariantTable(m.grid, entries), args.out, value_fmt=repr)
    print(f"wrote {args.out}")
    return 0


def _cmd_interleave(args) -> int:
    m = load_module(args.m)
    n = load_module(args.n)
    eps = tuple(int(x) for x in args.eps.split(","))
    if len(eps) == 1:
        eps = eps * m.grid.n
    if args.search:
        bound = interleaving_distance_upper(m, n, args.budget)
        if bound.status == "found":
            print(f"certificate at eps={list(bound.epsilon)} minimal={bound.minimal}")
        else:
            print(bound.status)
        return 0
    res = search_interleaving(m, n, eps, args.budget)
    if res.status == "found":
        print(f"found: certificate exists at eps={list(eps)}")
    elif res.status == "none":
        print(f"none: no certificate at eps={list(eps)} (search was exhaustive)")
    else:
        print("budget: candidate space exceeds the search budget")
    return 0


def _cmd_ingest(args) -> int:
    pts = []
    dens = []
    for line_no, line in enumerate(Path(args.cloud).read_text().splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            vals = [float(x) for x in line.split()]
        except ValueError:
            raise ValueError(f"{args.cloud}:{line_no}: not a whitespace-separated point")
        if args.has_density:
            pts.append(vals[:-1])
            dens.append(vals[-1])
        else:
            pts.append(vals)
    cloud = PointCloud(pts, dens if args.has_density else None)
    radii = [float(x) for x in args.radii.split(",")]
    thresholds = [float(x) for x in args.densities.split(",")]
    bif = build_bifiltration(cloud, radii, thresholds, max_dim=args.max_dim, knn_k=args.knn)
    mod = homology_module(bif, args.degree)
    save_module(mod, args.out)
    print(
        f"wrote {args.out} (grid {mod.grid.shape}; density axis stores negated "
        f"thresholds {bif.density_thresholds_desc} in superlevel order)"
    )
    return 0


def _cmd_compare(args) -> int:
    m = load_module(args.m)
    n = load_module(args.n)
    if m.grid != n.grid:
        raise ValueError("modules live on different grids; nothing to compare")
    rk_m, rk_n = rank_table(m), rank_table(n)
    ln_m, ln_n = lnti_table(m, m), lnti_table(n, n)
    en_m, en_n = entropy_table(m), entropy_table(n)
    g = m.grid
    print("a | b | rank_M rank_N | lnti_M lnti_N | H_M H_N")
    for key in rk_m.keys():
        a, b = key
        print(
            f"{list(g.coords(a))} | {list(g.coords(b))} | "
            f"{rk_m[key]} {rk_n[key]} | {ln_m[key]} {ln_n[key]} | "
            f"{en_m[key]:.6f} {en_n[key]:.6f}"
        )
    print(f"max|rank_M - rank_N| = {rk_m.max_norm_diff(rk_n)}")
    print(f"max|lnti_M - lnti_N| = {ln_m.max_norm_diff(ln_n)}")
    print(f"max|H_M - H_N| = {en_m.max_norm_diff(en_n):.12f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="mpers2",
        description="Exact invariants of multiparameter persistence modules",
    )
    ap.add_argument(
        "--seed",
        type=int,
        default=0,
        help="seed for randomized operations (all current commands are deterministic)",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a module document")
    p.add_argument("module")
    p.set_defaults(fn=_cmd_validate)

    p = sub.add_parser("rank", help="rank table as CSV")
    p.add_argument("module")
    p.add_argument("--box", help="restrict pairs to a coordinate box a1,a2..b1,b2")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_rank)

    p = sub.add_parser("lnti", help="natural-transformation dimension table as CSV")
    p.add_argument("module")
    p.add_argument("--other", help="second module (self table when absent)")
    p.add_argument("--box", help="restrict pairs to a coordinate box a1,a2..b1,b2")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_lnti)

    p = sub.add_parser("mbi", help="per-box decomposition signatures as JSON")
    p.add_argument("module")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_mbi)

    p = sub.add_parser("decompose", help="write indecomposable summands and witness")
    p.add_argument("module")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(fn=_cmd_decompose)

    p = sub.add_parser("entropy", help="per-box entropy table as CSV")
    p.add_argument("module")
    p.add_argument("--box", help="restrict pairs to a coordinate box a1,a2..b1,b2")
    p.add_argument("--bits", action="store_true", help="report entropy in bits")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_entropy)

    p = sub.add_parser("interleave", help="verify/search shift interleavings")
    p.add_argument("m")
    p.add_argument("n")
    p.add_argument("--eps", required=True, help="per-axis grid steps k or k1,k2,...")
    p.add_argument("--search", action="store_true", help="sweep eps upward for an upper bound")
    p.add_argument("--budget", type=int, default=1 << 16)
    p.set_defaults(fn=_cmd_interleave)

    p = sub.add_parser("ingest", help="point cloud -> homology persistence module")
    p.add_argument("cloud", help="text file, one point per line")
    p.add_argument("--radii", required=True, help="comma-separated increasing radii")
    p.add_argument("--densities", required=True, help="comma-separated increasing thresholds")
    p.add_argument("--degree", type=int, default=0, help="homology degree")
    p.add_argument("--max-dim", type=int, default=2, dest="max_dim")
    p.add_argument("--has-density", action="store_true", help="last column is a density score")
    p.add_argument("--knn", type=int, default=1, help="k for the default k-NN density score")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_ingest)

    p = sub.add_parser("compare", help="side-by-side rank/lnti/entropy tables")
    p.add_argument("m")
    p.add_argument("n")
    p.set_defaults(fn=_cmd_compare)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ModuleFormatError, ValueError, OSError, RuntimeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
