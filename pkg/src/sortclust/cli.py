"""Command-line front-end.

Subcommands: generate, cluster, explain, efficiency, evaluate, bench.
Every command is deterministic given its flags and inputs; randomness flows
only through explicit --seed values.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal invariant
violation.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
import time
from pathlib import Path

import numpy as np

from sortclust import __version__
from sortclust.data import DenseDataset, FingerprintSet
from sortclust.efficiency import evaluate_grid
from sortclust.errors import (
    DataFormatError,
    InternalInvariantError,
    InvalidInputError,
    InvalidSpecError,
)
from sortclust.evaluation import adjusted_rand_index
from sortclust.explain import explain_pair
from sortclust.io import (
    load_dense_csv,
    load_fingerprints,
    load_labels,
    save_fingerprints,
    save_labels,
)
from sortclust.merging import DEFAULT_SCALE
from sortclust.metrics import DistanceKind
from sortclust.pipeline import ClusterModel, cluster_data
from sortclust.synth import SynthSpec, generate

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that exits with code 1 on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _sha256(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


def _int_list(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def _float_list(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _write_manifest(path: str | Path, manifest: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _open_output(path: str | None):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline=""), True


# ----------------------------------------------------------------- generate


def _cmd_generate(args) -> int:
    spec = SynthSpec(
        num_clusters=args.num_clusters,
        k=args.k,
        d=args.d,
        flip_mode=args.flip_mode,
        flip_p=args.flip_p,
        seed_scores=args.seed_scores,
        alpha_min=args.alpha_min,
        beta=args.beta,
        rng_seed=args.seed,
    )
    fps, labels = generate(spec)
    save_fingerprints(args.output, fps, fmt=args.fmt)
    labels_out = args.labels_out or f"{args.output}.labels.csv"
    save_labels(labels_out, labels)
    manifest_out = args.manifest or f"{args.output}.manifest.json"
    _write_manifest(
        manifest_out,
        {
            "command": "generate",
            "parameters": {
                "num_clusters": spec.num_clusters,
                "k": spec.k,
                "d": spec.d,
                "flip_mode": spec.flip_mode,
                "flip_p": spec.flip_p,
                "seed_scores": spec.seed_scores,
                "alpha_min": spec.alpha_min,
                "beta": spec.beta,
                "rng_seed": spec.rng_seed,
                "fmt": args.fmt,
            },
            "n": fps.n,
            "d": fps.d,
            "outputs": {
                "fingerprints": str(args.output),
                "labels": str(labels_out),
            },
            "version": __version__,
        },
    )
    print(f"wrote {fps.n} fingerprints of dimension {fps.d} to {args.output}")
    return EXIT_OK


# ------------------------------------------------------------------ cluster


def _metric_from_args(parser: _Parser, args) -> DistanceKind:
    metric = DistanceKind(args.metric)
    if metric is DistanceKind.TANIMOTO and not 0 < args.radius < 1:
        parser.error(
            f"--radius {args.radius} invalid: the Tanimoto distance lies in [0, 1], "
            "so the radius must be strictly between 0 and 1"
        )
    if metric is DistanceKind.MANHATTAN and args.radius <= 0:
        parser.error(f"--radius {args.radius} invalid: must be positive")
    return metric


def _load_for_metric(args, metric: DistanceKind):
    t0 = time.perf_counter()
    if metric is DistanceKind.TANIMOTO:
        data = load_fingerprints(args.input, dims=args.dims)
    else:
        data = load_dense_csv(args.input, skip_header=args.header)
    return data, time.perf_counter() - t0


def _run_cluster(args, metric: DistanceKind) -> ClusterModel:
    data, parse_s = _load_for_metric(args, metric)
    model = cluster_data(
        data,
        metric,
        radius=args.radius,
        min_pts=args.min_pts,
        scale=args.scale,
        shift=not args.no_shift,
        prune=not args.no_prune,
        threads=args.threads,
    )
    model.stats["parse_s"] = parse_s
    return model


def _cluster_manifest(args, metric: DistanceKind, model: ClusterModel, io_write_s: float) -> dict:
    return {
        "command": "cluster",
        "parameters": {
            "input": str(args.input),
            "metric": metric.value,
            "radius": args.radius,
            "min_pts": args.min_pts,
            "scale": args.scale,
            "no_shift": args.no_shift,
            "no_prune": args.no_prune,
            "threads": args.threads,
            "header": args.header,
            "dims": args.dims,
        },
        "input_checksums": {str(args.input): _sha256(args.input)},
        "n": len(model.labels),
        "group_count": model.n_groups,
        "cluster_count": model.n_clusters,
        "minpts_fallback": model.minpts_fallback,
        "distance_evals": {
            "aggregation": model.stats["distance_evals_aggregation"],
            "merge": model.stats["distance_evals_merge"],
            "minpts": model.stats["distance_evals_minpts"],
            "total": model.stats["distance_evals_total"],
        },
        "timings_s": {
            "parse": model.stats["parse_s"],
            "sort": model.timings.sort_s,
            "aggregate": model.timings.aggregate_s,
            "merge": model.timings.merge_s,
            "minpts": model.timings.minpts_s,
            "cluster_total": model.timings.total_s,
            "io_write": io_write_s,
        },
        "version": __version__,
    }


def _write_graph(path: str | Path, model: ClusterModel) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for layer, edges in (("a1", model.explain.a1_edges), ("a2", model.explain.a2_edges)):
            for e in edges:
                fh.write(
                    json.dumps(
                        {
                            "layer": layer,
                            "u": e.u,
                            "v": e.v,
                            "kind": e.kind,
                            "distance": e.distance,
                        },
                        sort_keys=True,
                    )
                    + "\n"
                )


def _cmd_cluster(args, parser: _Parser) -> int:
    metric = _metric_from_args(parser, args)
    if args.grid_radius or args.grid_min_pts:
        return _cmd_cluster_grid(args, parser, metric)
    if args.output is None:
        args.output = "labels.csv"
    model = _run_cluster(args, metric)
    t0 = time.perf_counter()
    save_labels(args.output, model.labels)
    if args.graph_out:
        _write_graph(args.graph_out, model)
    io_write_s = time.perf_counter() - t0
    manifest_out = args.manifest or f"{args.output}.manifest.json"
    _write_manifest(manifest_out, _cluster_manifest(args, metric, model, io_write_s))
    if model.minpts_fallback:
        print(
            "warning: no cluster met the min-pts threshold; labels left unchanged",
            file=sys.stderr,
        )
    print(
        f"{len(model.labels)} points -> {model.n_groups} groups -> "
        f"{model.n_clusters} clusters ({model.stats['distance_evals_total']} distance evals)"
    )
    return EXIT_OK


def _cmd_cluster_grid(args, parser: _Parser, metric: DistanceKind) -> int:
    """Sweep radius x min_pts combinations and score each against --truth."""
    if not args.truth:
        parser.error("--grid-radius/--grid-min-pts require --truth for scoring")
    radii = _float_list(args.grid_radius) if args.grid_radius else [args.radius]
    min_pts_values = _int_list(args.grid_min_pts) if args.grid_min_pts else [args.min_pts]
    for r in radii:
        if metric is DistanceKind.TANIMOTO and not 0 < r < 1:
            parser.error(f"grid radius {r} invalid for the Tanimoto metric")
        if r <= 0:
            parser.error(f"grid radius {r} invalid: must be positive")
    truth = load_labels(args.truth)
    data, _ = _load_for_metric(args, metric)
    out, close = _open_output(args.output)
    writer = csv.writer(out)
    writer.writerow(["radius", "min_pts", "ari", "clusters", "runtime_s"])
    try:
        for r in radii:
            for mp in min_pts_values:
                t0 = time.perf_counter()
                model = cluster_data(
                    data,
                    metric,
                    radius=r,
                    min_pts=mp,
                    scale=args.scale,
                    shift=not args.no_shift,
                    prune=not args.no_prune,
                    threads=args.threads,
                )
                runtime = time.perf_counter() - t0
                ari = adjusted_rand_index(truth, model.labels)
                writer.writerow([r, mp, f"{ari:.6f}", model.n_clusters, f"{runtime:.4f}"])
    finally:
        if close:
            out.close()
    return EXIT_OK


# ------------------------------------------------------------------ explain


def _cmd_explain(args, parser: _Parser) -> int:
    metric = _metric_from_args(parser, args)
    model = _run_cluster(args, metric)
    explanation = explain_pair(model.explain, args.i, args.j)
    lines = explanation.machine_lines() if args.machine else explanation.text_lines()
    for line in lines:
        print(line)
    return EXIT_OK


# --------------------------------------------------------------- efficiency


def _format_cell(value) -> str:
    if value is None:
        return "nan"
    return repr(float(value))


def _cmd_efficiency(args) -> int:
    points = evaluate_grid(
        alpha_list=args.alpha_i,
        p_list=args.p,
        s_list=args.s,
        d=args.d,
        mode=args.mode,
        n_samples=args.n_samples,
        rng_seed=args.seed,
    )
    out, close = _open_output(args.output)
    try:
        writer = csv.writer(out)
        writer.writerow(
            ["alpha_i", "d", "p", "s", "p1", "p2", "efficiency", "simulated", "std_error"]
        )
        for pt in points:
            q = pt.query
            exact_cells = (
                [_format_cell(pt.p1), _format_cell(pt.p2), _format_cell(pt.efficiency)]
                if args.mode in ("exact", "both")
                else ["", "", ""]
            )
            sim_cells = (
                [_format_cell(pt.simulated), _format_cell(pt.std_error)]
                if args.mode in ("simulate", "both")
                else ["", ""]
            )
            writer.writerow([q.alpha_i, q.d, q.p, q.s, *exact_cells, *sim_cells])
    finally:
        if close:
            out.close()
    return EXIT_OK


# ----------------------------------------------------------------- evaluate


def _cmd_evaluate(args) -> int:
    labels_a = load_labels(args.labels_a)
    labels_b = load_labels(args.labels_b)
    print(adjusted_rand_index(labels_a, labels_b))
    return EXIT_OK


# -------------------------------------------------------------------- bench


def _bench_spec(args, sweep_value: int) -> SynthSpec:
    if args.sweep == "n":
        n = sweep_value
        if n % args.num_clusters:
            raise InvalidSpecError(
                f"sweep n={n} not divisible by num_clusters={args.num_clusters}"
            )
        return SynthSpec(
            num_clusters=args.num_clusters,
            k=n // args.num_clusters - 1,
            d=args.d,
            rng_seed=args.seed,
        )
    if args.sweep == "d":
        return SynthSpec(
            num_clusters=args.num_clusters,
            k=args.n // args.num_clusters - 1,
            d=sweep_value,
            rng_seed=args.seed,
        )
    # beta sweep: arithmetic seed scores separated by the sweep value
    return SynthSpec(
        num_clusters=args.num_clusters,
        k=args.k,
        d=args.d,
        seed_scores="arithmetic",
        alpha_min=args.alpha_min,
        beta=sweep_value,
        rng_seed=args.seed,
    )


def _cmd_bench(args, parser: _Parser) -> int:
    if args.d is None:
        args.d = 2000 if args.sweep == "beta" else 1000
    out, close = _open_output(args.output)
    try:
        writer = csv.writer(out)
        writer.writerow(
            ["sweep", "value", "n", "d", "runtime_s", "distance_evals", "groups", "clusters", "ari"]
        )
        for value in args.values:
            spec = _bench_spec(args, value)
            fps, truth = generate(spec)
            t0 = time.perf_counter()
            model = cluster_data(
                fps,
                DistanceKind.TANIMOTO,
                radius=args.radius,
                min_pts=args.min_pts,
                scale=args.scale,
                threads=args.threads,
            )
            runtime = time.perf_counter() - t0  # clustering call only
            ari = adjusted_rand_index(truth, model.labels)
            writer.writerow(
                [
                    args.sweep,
                    value,
                    fps.n,
                    fps.d,
                    f"{runtime:.4f}",
                    model.stats["distance_evals_total"],
                    model.n_groups,
                    model.n_clusters,
                    f"{ari:.6f}",
                ]
            )
    finally:
        if close:
            out.close()
    return EXIT_OK


# --------------------------------------------------------------------- main


def _add_cluster_options(p: _Parser) -> None:
    p.add_argument("input", help="input data file")
    p.add_argument("--metric", required=True, choices=["manhattan", "tanimoto"])
    p.add_argument("--radius", required=True, type=float, help="group membership distance threshold")
    p.add_argument("--min-pts", type=int, default=1, help="minimum final cluster size (default 1)")
    p.add_argument("--scale", type=float, default=DEFAULT_SCALE, help="merge threshold multiplier (default 1.5)")
    p.add_argument("--no-shift", action="store_true", help="skip orthant shifting of Manhattan data")
    p.add_argument("--no-prune", action="store_true", help="disable the score-window search cutoff (identical labels, more distance work)")
    p.add_argument("--header", action="store_true", help="skip one header line in dense CSV input")
    p.add_argument("--dims", type=int, default=None, help="vector dimension (required for hex fingerprint files)")
    p.add_argument("--threads", type=int, default=1, help="worker threads for batch distance evaluation (output is identical for every value)")


def build_parser() -> _Parser:
    parser = _Parser(prog="sortclust", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"sortclust {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", help="write a synthetic fingerprint dataset")
    p.add_argument("--num-clusters", type=int, default=10)
    p.add_argument("--k", type=int, default=100, help="samples per cluster on top of the seed")
    p.add_argument("--d", type=int, default=1000)
    p.add_argument("--flip-mode", choices=["scaled", "fixed"], default="scaled")
    p.add_argument("--flip-p", type=float, default=None, help="flip probability for --flip-mode fixed")
    p.add_argument("--seed-scores", choices=["random", "arithmetic"], default="random")
    p.add_argument("--alpha-min", type=int, default=None, help="lowest seed score (arithmetic mode)")
    p.add_argument("--beta", type=int, default=None, help="seed score increment (arithmetic mode)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--fmt", choices=["bits", "hex"], default="bits")
    p.add_argument("-o", "--output", required=True, help="fingerprint file to write")
    p.add_argument("--labels-out", default=None, help="ground-truth labels CSV (default OUTPUT.labels.csv)")
    p.add_argument("--manifest", default=None, help="manifest path (default OUTPUT.manifest.json)")
    p.set_defaults(func=lambda a: _cmd_generate(a))

    p = sub.add_parser("cluster", help="cluster a dataset and write labels")
    _add_cluster_options(p)
    p.add_argument("-o", "--output", default=None, help="labels CSV to write (default labels.csv; grid mode defaults to stdout)")
    p.add_argument("--manifest", default=None, help="manifest path (default OUTPUT.manifest.json)")
    p.add_argument("--graph-out", default=None, help="write the explain graph edges as JSON lines")
    p.add_argument("--grid-radius", default=None, help="comma-separated radii: sweep mode, scored against --truth")
    p.add_argument("--grid-min-pts", default=None, help="comma-separated min-pts values for the sweep")
    p.add_argument("--truth", default=None, help="ground-truth labels CSV for the sweep")
    sub_cluster = p
    p.set_defaults(func=lambda a: _cmd_cluster(a, sub_cluster))

    p = sub.add_parser("explain", help="explain why two points share (or do not share) a cluster")
    _add_cluster_options(p)
    p.add_argument("i", type=int)
    p.add_argument("j", type=int)
    p.add_argument("--machine", action="store_true", help="emit one JSON record per hop instead of text")
    sub_explain = p
    p.set_defaults(func=lambda a: _cmd_explain(a, sub_explain))

    p = sub.add_parser("efficiency", help="evaluate the search-termination efficiency model")
    p.add_argument("--alpha-i", type=_int_list, required=True, help="comma-separated seed scores")
    p.add_argument("--p", type=_float_list, required=True, help="comma-separated flip probabilities")
    p.add_argument("--s", type=_float_list, required=True, help="comma-separated similarity thresholds in (0,1)")
    p.add_argument("--d", type=int, default=1000)
    p.add_argument("--mode", choices=["exact", "simulate", "both"], default="exact")
    p.add_argument("--n-samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", default=None, help="CSV path (default stdout)")
    p.set_defaults(func=lambda a: _cmd_efficiency(a))

    p = sub.add_parser("evaluate", help="Adjusted Rand Index between two label files")
    p.add_argument("labels_a")
    p.add_argument("labels_b")
    p.set_defaults(func=lambda a: _cmd_evaluate(a))

    p = sub.add_parser("bench", help="synthetic benchmark sweeps with CSV output")
    p.add_argument("--sweep", choices=["n", "d", "beta"], required=True)
    p.add_argument("--values", type=_int_list, required=True, help="comma-separated sweep values")
    p.add_argument("--num-clusters", type=int, default=10)
    p.add_argument("--n", type=int, default=10_000, help="total points for the d sweep")
    p.add_argument("--d", type=int, default=None, help="dimension (default 1000; beta sweep defaults to 2000)")
    p.add_argument("--k", type=int, default=100, help="samples per cluster for the beta sweep")
    p.add_argument("--alpha-min", type=int, default=50, help="lowest seed score for the beta sweep")
    p.add_argument("--radius", type=float, default=0.4)
    p.add_argument("--min-pts", type=int, default=5)
    p.add_argument("--scale", type=float, default=DEFAULT_SCALE)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("-o", "--output", default=None, help="CSV path (default stdout)")
    sub_bench = p
    p.set_defaults(func=lambda a: _cmd_bench(a, sub_bench))

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DataFormatError, FileNotFoundError, PermissionError, IsADirectoryError) as exc:
        print(f"sortclust: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"sortclust: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (InvalidInputError, InvalidSpecError) as exc:
        print(f"sortclust: invalid arguments: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InternalInvariantError as exc:
        print(f"sortclust: internal invariant violated: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
