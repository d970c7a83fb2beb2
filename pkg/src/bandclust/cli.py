"""Command-line interface: cluster, select, compare, bench, plot.

Exit codes: 0 success, 2 bad arguments, 3 malformed input, 4 numeric failure
(NaN or infinity encountered in the data).
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from . import band, compare, engine, oracle, plotting, selection
from .errors import InputError, NonFiniteError

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_BAD_INPUT = 3
EXIT_NUMERIC = 4


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# Manifest: flat key=value text, one pair per line
# ---------------------------------------------------------------------------

def write_manifest(path, entries: dict) -> None:
    with open(path, "w") as fh:
        for key, val in entries.items():
            fh.write(f"{key}={val}\n")


def read_manifest(path) -> dict:
    entries = {}
    try:
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if not line or "=" not in line:
                    continue
                key, _, val = line.partition("=")
                entries[key] = val
    except OSError as exc:
        raise InputError(f"cannot read manifest {path}: {exc}") from exc
    return entries


# ---------------------------------------------------------------------------
# Input loading
# ---------------------------------------------------------------------------

def _load_matrix(path, fmt: str, h: int, drop_out_of_band: bool) -> band.BandMatrix:
    if fmt == "dense":
        values = band.read_dense_csv(path)
        return band.from_dense(values, h=h)
    if fmt == "coo":
        triplets, p = band.read_coo_text(path)
        return band.from_coo(triplets, p=p, h=h, drop_out_of_band=drop_out_of_band)
    if fmt == "genotype":
        g = band.read_genotype_csv(path)
        return band.build_ld_r2(g, h=h)
    if fmt == "hic":
        triplets, p = band.read_coo_text(path)
        counts = {}
        for i, j, v in triplets:
            lo, hi = (i, j) if i <= j else (j, i)
            counts[(lo, hi)] = v
        return band.build_hic_log(band.ContactMatrix(p=p, counts=counts), h=h)
    raise UsageError(f"unknown format {fmt!r}")


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_cluster(args) -> int:
    if args.from_manifest:
        m = read_manifest(args.from_manifest)
        try:
            args.input = m["input"]
            args.format = m["format"]
            args.band = int(m["h"])
            args.lam = float(m["lambda"])
            args.engine = m["engine"]
            args.backend = m.get("backend", "auto")
        except (KeyError, ValueError) as exc:
            raise InputError(f"incomplete manifest {args.from_manifest}: {exc}")
    if args.input is None or args.out is None:
        raise UsageError("cluster requires an input file and --out")
    if args.band < 1:
        raise UsageError(f"--band must be a positive integer, got {args.band}")

    mat = _load_matrix(args.input, args.format, args.band, args.drop_out_of_band)
    if args.lam != 0.0:
        mat = band.shift_diagonal(mat, args.lam)

    t0 = time.perf_counter()
    if args.engine == "naive":
        dend = oracle.cluster_naive(mat)
        stats = None
    else:
        dend, stats = engine.cluster(mat, backend=args.backend, return_stats=True)
    wall = time.perf_counter() - t0

    engine.write_merge_table(dend, f"{args.out}.merges.txt")
    with open(f"{args.out}.heights.txt", "w") as fh:
        for ht in dend.heights:
            fh.write(f"{ht:.12g}\n")
    write_manifest(f"{args.out}.manifest.txt", {
        "input": args.input,
        "format": args.format,
        "p": mat.p,
        "h": mat.h,
        "engine": args.engine,
        "backend": args.backend,
        "lambda": repr(args.lam),
        "seed": "",
        "selection_method": "",
        "selection_params": "",
        "wall_time_s": f"{wall:.6f}",
        "peak_pencil_entries": 2 * mat.p * mat.h if stats is None else stats.pencil_entries,
        "heap_max": "" if stats is None else stats.heap_max_size,
    })
    return EXIT_OK


def cmd_select(args) -> int:
    dend = engine.read_merge_table(args.merges)
    if args.method == "broken-stick":
        k = selection.select_broken_stick(dend)
        params = ""
    else:
        if args.kmax < 2:
            raise UsageError(f"--kmax must be at least 2, got {args.kmax}")
        kmax = min(args.kmax, dend.p)
        if kmax < 2:
            k = 1
        else:
            k = selection.select_slope_heuristic(dend, kmax,
                                                 multiplier=args.multiplier)
        params = f"kmax={args.kmax},multiplier={args.multiplier}"
    part = engine.cut(dend, k)
    print(f"K={k}")
    out = args.out or f"{args.merges}.labels.txt"
    with open(out, "w") as fh:
        for idx, lab in enumerate(part.labels, start=1):
            fh.write(f"{idx} {lab}\n")
    if args.manifest:
        write_manifest(args.manifest, {
            "input": args.merges, "format": "merges", "p": dend.p, "h": "",
            "engine": "", "backend": "", "lambda": "", "seed": "",
            "selection_method": args.method, "selection_params": params,
            "wall_time_s": "", "peak_pencil_entries": "", "heap_max": "",
        })
    return EXIT_OK


def _read_labels(path) -> engine.Partition:
    labels = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise InputError(f"{path}:{lineno}: expected 'index label'")
            labels.append(int(parts[1]))
    arr = np.array(labels, dtype=np.int64)
    return engine.Partition(labels=arr, k=int(arr.max()))


def cmd_compare(args) -> int:
    d1 = engine.read_merge_table(args.merges_a)
    d2 = engine.read_merge_table(args.merges_b)
    fd = compare.first_difference_index(d1, d2)
    bg = compare.bakers_gamma(d1, d2, exact_cap=args.exact_cap, seed=args.seed)
    line = f"first_diff={fd:.12g} bakers_gamma={bg.value:.12g}"
    if not bg.exact:
        line += f" bakers_gamma_seed={bg.seed} bakers_gamma_pairs={bg.n_pairs}"
    if args.labels:
        pa = _read_labels(args.labels[0])
        pb = _read_labels(args.labels[1])
        line += f" ari={compare.adjusted_rand(pa, pb):.12g}"
        if args.raw_rand:
            line += f" rand={compare.rand_index(pa, pb):.12g}"
    print(line)
    return EXIT_OK


def random_band_matrix(p: int, h: int, rng) -> band.BandMatrix:
    """Random symmetric band matrix with a row-dominant diagonal.

    In-band off-diagonal entries are i.i.d. uniform[0, 1]; the diagonal is 1
    plus the total off-diagonal mass of its row, which keeps the matrix
    positive definite.
    """
    bands = np.zeros((p, h))
    for d in range(1, h):
        if p - d > 0:
            bands[:p - d, d] = rng.uniform(size=p - d)
    rowsum = bands[:, 1:].sum(axis=1).copy() if h > 1 else np.zeros(p)
    for d in range(1, h):
        rowsum[d:] += bands[:p - d, d]
    bands[:, 0] = 1.0 + rowsum
    return band.BandMatrix(p=p, h=h, bands=bands)


def cmd_bench(args) -> int:
    try:
        p_list = [int(x) for x in args.p_list.split(",") if x.strip()]
        h_list = [int(x) for x in args.h_list.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"bad --p-list/--h-list: {exc}")
    if not p_list or not h_list:
        raise UsageError("--p-list and --h-list must be non-empty")
    if args.reps < 1:
        raise UsageError(f"--reps must be at least 1, got {args.reps}")
    backends = (["python", "compiled"] if args.backend == "both"
                else [args.backend])
    if "compiled" in backends and not engine.HAVE_COMPILED_CORE:
        raise UsageError("compiled backend requested but the extension is not built")

    rows = ["p,h,engine,backend,wall_time,peak_entries,heap_max"]
    for p in p_list:
        for h in h_list:
            hh = min(h, p)
            rng = np.random.default_rng(args.seed + 1000 * p + hh)
            mat = random_band_matrix(p, hh, rng)
            for backend in backends:
                times = []
                heap_max = 0
                entries = 0
                for _ in range(args.reps):
                    t0 = time.perf_counter()
                    if args.engine == "naive":
                        oracle.cluster_naive(mat)
                    else:
                        _, stats = engine.cluster(mat, backend=backend,
                                                  return_stats=True)
                        heap_max = stats.heap_max_size
                        entries = stats.pencil_entries
                    times.append(time.perf_counter() - t0)
                med = float(np.median(times))
                rows.append(f"{p},{hh},{args.engine},{backend},"
                            f"{med:.6f},{entries},{heap_max}")
    text = "\n".join(rows) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_plot(args) -> int:
    dend = engine.read_merge_table(args.merges)
    mat = None
    if args.matrix:
        if args.band is None:
            raise UsageError("--matrix requires --band")
        mat = _load_matrix(args.matrix, args.matrix_format, args.band, False)
    if args.format == "txt":
        text = plotting.render_text(dend)
    else:
        text = plotting.render_svg(dend, mat)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bandclust",
        description="Adjacency-constrained Ward clustering of banded similarities")
    sub = parser.add_subparsers(dest="command", required=True)

    pc = sub.add_parser("cluster", help="cluster a similarity matrix")
    pc.add_argument("input", nargs="?", help="input data file")
    pc.add_argument("--format", choices=["coo", "dense", "genotype", "hic"],
                    default="dense")
    pc.add_argument("--band", type=int, default=None, help="bandwidth h")
    pc.add_argument("--lambda", dest="lam", type=float, default=0.0,
                    help="diagonal shift applied before clustering")
    pc.add_argument("--engine", choices=["fast", "naive"], default="fast")
    pc.add_argument("--backend", choices=["auto", "python", "compiled"],
                    default="auto")
    pc.add_argument("--drop-out-of-band", action="store_true",
                    help="silently drop COO entries outside the band")
    pc.add_argument("--out", help="output file prefix")
    pc.add_argument("--from-manifest",
                    help="re-run the clustering described by a manifest file")
    pc.set_defaults(func=cmd_cluster)

    ps = sub.add_parser("select", help="choose a number of clusters")
    ps.add_argument("merges", help="merge table from 'cluster'")
    ps.add_argument("--method", choices=["broken-stick", "slope"],
                    default="broken-stick")
    ps.add_argument("--kmax", type=int, default=50)
    ps.add_argument("--multiplier", type=float, default=2.0)
    ps.add_argument("--out", help="labels output file")
    ps.add_argument("--manifest", help="manifest output file")
    ps.set_defaults(func=cmd_select)

    pm = sub.add_parser("compare", help="compare two dendrograms")
    pm.add_argument("merges_a")
    pm.add_argument("merges_b")
    pm.add_argument("--labels", nargs=2, metavar=("A", "B"),
                    help="two label files for adjusted Rand")
    pm.add_argument("--raw-rand", action="store_true",
                    help="also print the unadjusted Rand index")
    pm.add_argument("--exact-cap", type=int, default=2000)
    pm.add_argument("--seed", type=int, default=0)
    pm.set_defaults(func=cmd_compare)

    pb = sub.add_parser("bench", help="time the engines on random matrices")
    pb.add_argument("--p-list", required=True)
    pb.add_argument("--h-list", required=True)
    pb.add_argument("--reps", type=int, default=3)
    pb.add_argument("--seed", type=int, default=0)
    pb.add_argument("--engine", choices=["fast", "naive"], default="fast")
    pb.add_argument("--backend", choices=["auto", "python", "compiled", "both"],
                    default="auto")
    pb.add_argument("--out")
    pb.set_defaults(func=cmd_bench)

    pp = sub.add_parser("plot", help="draw a dendrogram")
    pp.add_argument("merges")
    pp.add_argument("--format", choices=["svg", "txt"], default="txt")
    pp.add_argument("--matrix", help="similarity file for the heat strip")
    pp.add_argument("--matrix-format", choices=["coo", "dense"], default="dense")
    pp.add_argument("--band", type=int)
    pp.add_argument("--out")
    pp.set_defaults(func=cmd_plot)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    if getattr(args, "command", None) == "cluster" and not args.from_manifest:
        if args.band is None:
            parser.error_message = "cluster requires --band"
            print("error: cluster requires --band", file=sys.stderr)
            return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NonFiniteError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except InputError as exc:
        print(f"bad input: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except OSError as exc:
        print(f"bad input: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
