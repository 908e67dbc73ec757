"""Command-line front end.

Honors MDGSP_THREADS before any numerical library spins up its thread
pools, dispatches one subcommand per pipeline stage, and writes a run
manifest next to every primary output. Exit codes are per error class:

    0 success, 2 usage, 3 malformed file or invariant violation on load,
    4 dimension mismatch, 5 solver non-convergence, 6 allocation failure,
    7 numeric domain error (kernel/spectrum/sampling).
"""

from __future__ import annotations

import os

if os.environ.get("MDGSP_THREADS"):
    _v = os.environ["MDGSP_THREADS"]
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(_var, _v)

import argparse
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .bench import bench_sizes, equality_check
from .denoise import EbemParams, ebem_minimize
from .errors import (
    DimensionError,
    FormatError,
    GraphError,
    KernelError,
    MdgspError,
    SamplingError,
    SpectrumError,
)
from .filtering import PolyKernel2D, load_kernel, polynomial_filter_vertex, spectral_filter_2d
from .graphs import cartesian_product, load_graph, matrices, save_graph
from .render import spectrum_heatmap_svg
from .spectral import default_tol_mult, eigenbasis, save_matrix, spectrum_to_csv
from .stationarity import (
    DirectionalProcess,
    FgwProcess,
    sample_directional,
    sample_fgw,
    sample_multivariate,
    test_directional_stationarity,
    test_fgw_stationarity,
)
from .transforms import (
    adjacency_gft_2d,
    aggregate_to_1d,
    aggregate_to_csv,
    gft_2d,
    load_signal,
    load_spectrum,
    save_signal,
    save_spectrum,
)
from .variation import total_directional_variation

_EXIT_CODES = [
    ((FormatError, GraphError), 3),
    ((DimensionError,), 4),
    ((MemoryError,), 6),
    ((KernelError, SpectrumError, SamplingError), 7),
    ((MdgspError,), 3),
]

EXIT_NONCONVERGENCE = 5


def _error_slug(exc: BaseException) -> str:
    return {
        "FormatError": "format",
        "GraphError": "graph",
        "DimensionError": "dimension-mismatch",
        "KernelError": "kernel",
        "SpectrumError": "spectrum",
        "SamplingError": "sampling",
        "MemoryError": "allocation",
    }.get(type(exc).__name__, "internal")


def _write_manifest(primary_out: str, command: str, args: argparse.Namespace,
                    inputs: list[str], elapsed: float) -> None:
    params = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    manifest = {
        "command": command,
        "inputs": sorted(str(p) for p in inputs if p),
        "parameters": params,
        "seed": getattr(args, "seed", None),
        "tool_version": __version__,
        "wall_seconds": elapsed,
    }
    Path(str(primary_out) + ".manifest.json").write_text(
        json.dumps(manifest, indent=2, default=str) + "\n"
    )


def _json_out(payload: dict, path: str) -> None:
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def _load_bases(args, source: str = "laplacian"):
    g1 = load_graph(args.g1)
    g2 = load_graph(args.g2)
    m1 = matrices(g1)
    m2 = matrices(g2)
    pick = (lambda m: m.L) if source == "laplacian" else (lambda m: m.W)
    return g1, g2, eigenbasis(pick(m1), source), eigenbasis(pick(m2), source)


def cmd_product(args) -> int:
    g1 = load_graph(args.g1)
    g2 = load_graph(args.g2)
    save_graph(cartesian_product(g1, g2).graph, args.out)
    return 0


def cmd_eig(args) -> int:
    g = load_graph(args.g1)
    m = matrices(g)
    basis = eigenbasis(m.L if args.source == "laplacian" else m.W, args.source)
    if args.format == "json":
        _json_out({"source": args.source, "eigenvalues": [float(v) for v in basis.values]},
                  args.out)
    else:
        Path(args.out).write_text(spectrum_to_csv(basis.values))
    if args.basis_out:
        save_matrix(basis.vectors, args.basis_out)
    return 0


def cmd_gft(args) -> int:
    _, _, b1, b2 = _load_bases(args, args.source)
    f = load_signal(args.signal)
    if args.source == "laplacian":
        s = gft_2d(f, b1, b2)
    else:
        s = adjacency_gft_2d(f, b1, b2)
    save_spectrum(s, args.out)
    if args.svg:
        Path(args.svg).write_text(spectrum_heatmap_svg(s, title=Path(args.signal).name))
    if args.aggregate_out:
        tol = args.tol_mult
        if tol is None:
            tol = default_tol_mult(np.concatenate([b1.values, b2.values]))
        Path(args.aggregate_out).write_text(aggregate_to_csv(aggregate_to_1d(s, tol)))
    return 0


def cmd_filter(args) -> int:
    g1, g2, b1, b2 = _load_bases(args)
    f = load_signal(args.signal)
    kernel = load_kernel(args.kernel)
    if isinstance(kernel, PolyKernel2D):
        out = polynomial_filter_vertex(f, kernel, matrices(g1).L, matrices(g2).L)
    else:
        out = spectral_filter_2d(f, kernel, b1, b2)
    out = np.real_if_close(out, tol=100)
    if np.iscomplexobj(out):
        raise KernelError("filter output is complex; the signal CSV stores real values")
    save_signal(out, args.out)
    return 0


def _gamma_list(text: str) -> list[float]:
    return [float(tok) for tok in str(text).split(",") if tok != ""]


def cmd_denoise(args) -> int:
    g1 = load_graph(args.g1)
    g2 = load_graph(args.g2)
    y = load_signal(args.observation)
    gammas1 = _gamma_list(args.gamma1)
    gammas2 = _gamma_list(args.gamma2)
    combos = [(a, b) for a in gammas1 for b in gammas2]

    def solve(combo):
        a, b = combo
        params = EbemParams(p=args.p, gamma1=a, gamma2=b, q1=args.q1, q2=args.q2)
        return ebem_minimize(y, g1, g2, params, max_iter=args.max_iter, tol=args.tol,
                             force_gradient=args.force_gradient)

    if len(combos) == 1:
        reports = [solve(combos[0])]
    else:
        workers = int(os.environ.get("MDGSP_THREADS", "0")) or min(len(combos), os.cpu_count() or 1)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(solve, combos))

    entries = []
    base = Path(args.out)
    for (a, b), rep in zip(combos, reports):
        if len(combos) == 1:
            out_path = base
        else:
            out_path = base.with_name(f"{base.stem}-g1_{a:g}-g2_{b:g}{base.suffix}")
        save_signal(rep.minimizer, out_path)
        entries.append({
            "gamma1": a,
            "gamma2": b,
            "out": str(out_path),
            "energy": rep.energy,
            "iterations": rep.iterations,
            "residual": rep.residual,
            "method": rep.method,
            "converged": rep.converged,
            "maybe_nonunique": rep.maybe_nonunique,
        })
    if args.report:
        _json_out({"solves": entries}, args.report)
    if not all(rep.converged for rep in reports):
        print("mdgsp: error[nonconvergence]: solver hit max_iter above tolerance", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    return 0


def cmd_variation(args) -> int:
    g1, g2, b1, b2 = _load_bases(args)
    f = load_signal(args.signal)
    directions = [1, 2] if args.direction == "both" else [int(args.direction)]
    payload = []
    for d in directions:
        rep = total_directional_variation(f, g1, g2, d, b1, b2)
        payload.append({
            "direction": rep.direction,
            "total": rep.total,
            "spectral_total": rep.spectral_total,
            "residual": rep.residual,
        })
        if args.local_csv:
            path = Path(args.local_csv)
            if len(directions) > 1:
                path = path.with_name(f"{path.stem}-d{d}{path.suffix}")
            save_signal(rep.local, path)
    _json_out(payload[0] if len(payload) == 1 else {"reports": payload}, args.out)
    return 0


def _load_coeffs(path: str, kind: str):
    try:
        payload = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid coefficients JSON: {exc}") from exc
    if kind == "fgw":
        if "h" not in payload:
            raise FormatError('fgw coefficients need key "h" (2-D array)')
        return np.asarray(payload["h"], dtype=np.float64)
    if "hs" not in payload:
        raise FormatError(f'{kind} coefficients need key "hs" (list of square matrices)')
    return np.asarray(payload["hs"], dtype=np.float64)


def cmd_stationarity(args) -> int:
    g1 = load_graph(args.g1)
    L1 = matrices(g1).L
    b1 = eigenbasis(L1, "laplacian")
    coeffs = _load_coeffs(args.coeffs, args.kind)

    if args.kind == "fgw":
        if not args.g2:
            raise FormatError("fgw stationarity needs --g2")
        g2 = load_graph(args.g2)
        L2 = matrices(g2).L
        b2 = eigenbasis(L2, "laplacian")
        samples = sample_fgw(FgwProcess(kernel=PolyKernel2D(H=coeffs)), L1, L2,
                             args.seed, args.samples, distribution=args.distribution)
    elif args.kind in ("dir1", "dir2"):
        if not args.g2:
            raise FormatError("directional stationarity needs --g2")
        g2 = load_graph(args.g2)
        L2 = matrices(g2).L
        b2 = eigenbasis(L2, "laplacian")
        direction = 1 if args.kind == "dir1" else 2
        proc = DirectionalProcess(direction=direction, Hs=coeffs)
        samples = sample_directional(proc, L1 if direction == 1 else L2,
                                     args.seed, args.samples, distribution=args.distribution)
    else:  # mv
        samples = sample_multivariate(coeffs, L1, args.seed, args.samples,
                                      distribution=args.distribution)
        b2 = None

    batch = np.asarray(samples)
    payload: dict = {
        "kind": args.kind,
        "samples": args.samples,
        "seed": args.seed,
        "shape": list(batch.shape[1:]),
    }
    if args.out:
        np.save(args.out, batch)
        payload["out"] = args.out

    if args.mode == "test":
        tol = args.tol
        if args.kind == "fgw":
            rep = test_fgw_stationarity(batch, b1, b2, tol)
            extra = [test_directional_stationarity(batch, 1, b1, tol),
                     test_directional_stationarity(batch, 2, b2, tol)]
            payload["tests"] = [rep.to_dict()] + [r.to_dict() for r in extra]
            ok = rep.verdict and all(r.verdict for r in extra)
        elif args.kind == "dir1":
            rep = test_directional_stationarity(batch, 1, b1, tol)
            payload["tests"] = [rep.to_dict()]
            ok = rep.verdict
        elif args.kind == "dir2":
            rep = test_directional_stationarity(batch, 2, b2, tol)
            payload["tests"] = [rep.to_dict()]
            ok = rep.verdict
        else:
            rep = test_directional_stationarity(batch, 1, b1, tol)
            payload["tests"] = [rep.to_dict()]
            ok = rep.verdict
        payload["verdict"] = "pass" if ok else "fail"
    _json_out(payload, args.report)
    return 0


def cmd_bench(args) -> int:
    sizes = []
    for tok in str(args.sizes).split(","):
        if "x" in tok:
            a, b = tok.split("x")
            sizes.append((int(a), int(b)))
        else:
            sizes.append((int(tok), int(tok)))
    report = bench_sizes(sizes, repetitions=args.reps, seed=args.seed, naive=not args.no_naive)
    payload = report.to_dict()
    if args.check_equality:
        payload["equality_discrepancy"] = equality_check(args.check_equality,
                                                         args.check_equality,
                                                         seed=args.seed)
    _json_out(payload, args.out)
    return 0


def cmd_render(args) -> int:
    s = load_spectrum(args.spectrum)
    Path(args.svg).write_text(spectrum_heatmap_svg(s, title=args.title))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mdgsp",
        description="Transforms, filtering, denoising, and stationarity tools "
        "for signals on Cartesian product graphs.",
    )
    parser.add_argument("--version", action="version", version=f"mdgsp {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=fn)
        return p

    p = add("product", cmd_product, "Cartesian product of two graph files")
    p.add_argument("--g1", required=True)
    p.add_argument("--g2", required=True)
    p.add_argument("--out", required=True)

    p = add("eig", cmd_eig, "eigendecomposition of one graph")
    p.add_argument("--g1", required=True)
    p.add_argument("--source", choices=["laplacian", "adjacency"], default="laplacian")
    p.add_argument("--out", required=True, help="spectrum output (index, eigenvalue)")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--basis-out", default=None, help="optional binary eigenvector matrix")

    p = add("gft", cmd_gft, "2-D spectrum of a signal on a product graph")
    p.add_argument("--g1", required=True)
    p.add_argument("--g2", required=True)
    p.add_argument("--signal", required=True)
    p.add_argument("--source", choices=["laplacian", "adjacency"], default="laplacian")
    p.add_argument("--out", required=True, help="spectrum CSV")
    p.add_argument("--svg", default=None, help="optional heatmap SVG")
    p.add_argument("--aggregate-out", default=None,
                   help="optional 1-D view CSV grouped by sum frequency")
    p.add_argument("--tol-mult", type=float, default=None,
                   help="frequency coincidence tolerance for --aggregate-out")

    p = add("filter", cmd_filter, "apply a spectral kernel file to a signal")
    p.add_argument("--g1", required=True)
    p.add_argument("--g2", required=True)
    p.add_argument("--signal", required=True)
    p.add_argument("--kernel", required=True)
    p.add_argument("--out", required=True)

    p = add("denoise", cmd_denoise, "energy-model denoising")
    p.add_argument("--g1", required=True)
    p.add_argument("--g2", required=True)
    p.add_argument("--observation", required=True)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--q1", type=float, default=2.0)
    p.add_argument("--q2", type=float, default=2.0)
    p.add_argument("--gamma1", default="0")
    p.add_argument("--gamma2", default="0", help="comma-separated values sweep a grid")
    p.add_argument("--out", required=True)
    p.add_argument("--report", default=None)
    p.add_argument("--max-iter", type=int, default=100_000)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--force-gradient", action="store_true")

    p = add("variation", cmd_variation, "directional variation report")
    p.add_argument("--g1", required=True)
    p.add_argument("--g2", required=True)
    p.add_argument("--signal", required=True)
    p.add_argument("--direction", choices=["1", "2", "both"], default="both")
    p.add_argument("--out", required=True, help="JSON report")
    p.add_argument("--local-csv", default=None, help="optional local-variation CSV")

    p = add("stationarity", cmd_stationarity, "synthesize or test stationary processes")
    p.add_argument("--mode", choices=["synthesize", "test"], required=True)
    p.add_argument("--kind", choices=["fgw", "dir1", "dir2", "mv"], required=True)
    p.add_argument("--g1", required=True)
    p.add_argument("--g2", default=None)
    p.add_argument("--coeffs", required=True, help='JSON with "h" (fgw) or "hs" (dir/mv)')
    p.add_argument("--samples", type=int, default=20_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--distribution", choices=["gaussian", "rademacher"], default="gaussian")
    p.add_argument("--out", default=None, help="optional .npy sample dump")
    p.add_argument("--report", required=True)

    p = add("bench", cmd_bench, "time the matrix-chain vs flattened transform")
    p.add_argument("--sizes", default="64,128,256", help="comma list, N or N1xN2")
    p.add_argument("--reps", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-naive", action="store_true")
    p.add_argument("--check-equality", type=int, default=None, metavar="N",
                   help="also verify grouped-power equality of both paths at NxN")
    p.add_argument("--out", required=True)

    p = add("render", cmd_render, "spectrum CSV to deterministic SVG heatmap")
    p.add_argument("--spectrum", required=True)
    p.add_argument("--svg", required=True)
    p.add_argument("--title", default="")

    return parser


def _primary_output(args) -> str | None:
    for attr in ("out", "report", "svg"):
        value = getattr(args, attr, None)
        if value:
            return str(value)
    return None


def _inputs(args) -> list[str]:
    return [str(getattr(args, attr)) for attr in
            ("g1", "g2", "signal", "observation", "kernel", "coeffs", "spectrum")
            if getattr(args, attr, None)]


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    t0 = time.perf_counter()
    try:
        rc = args.func(args)
    except (MdgspError, MemoryError) as exc:
        code = next(code for classes, code in _EXIT_CODES if isinstance(exc, classes))
        print(f"mdgsp: error[{_error_slug(exc)}]: {exc}", file=sys.stderr)
        return code
    except OSError as exc:
        print(f"mdgsp: error[io]: {exc}", file=sys.stderr)
        return 3
    elapsed = time.perf_counter() - t0
    primary = _primary_output(args)
    if primary is not None:
        _write_manifest(primary, args.command, args, _inputs(args), elapsed)
    return rc


if __name__ == "__main__":
    sys.exit(main())
