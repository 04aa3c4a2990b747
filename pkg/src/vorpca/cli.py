"""Command line interface: ``vorpca gen|fit|eval|repro``.

Exit codes: 0 success, 2 usage or parameter error, 3 internal invariant
violation.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, defaults
from ._errors import FormatError, MonotonicityError, ParameterError
from .baselines import (Trl21Config, e2_objective, e21_objective, pca_fit, r1pca_fit,
                        svt_shrink, trl21pca_fit)
from .datasets import (OcclusionSpec, ToyLineSpec, canonical_toy_line, gen_lowrank_blobs,
                       gen_toy_line, inject_occlusion)
from .evaluation import clustering_accuracy, kmeans, noise_free_residual, spectrum_report
from .io import atomic_write_text, read_labels, read_matrix, write_labels, write_matrix
from .recipes import RECIPES, run_recipe
from .solver import VorpcaConfig, suggest_delta, vorpca_fit


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def cmd_gen(args):
    if args.kind == "toy-line":
        spec = (ToyLineSpec.from_dict(json.loads(Path(args.config).read_text()))
                if args.config else canonical_toy_line())
        if args.seed is not None:
            spec.seed = args.seed
        if args.sigma is not None:
            spec.inlier_noise_sigma = args.sigma
        ds = gen_toy_line(spec)
        write_matrix(ds.data, args.out)
        if args.labels:
            write_labels(ds.labels, args.labels, c=ds.c)
        return 0

    missing = [f"--{f}" for f in ("p", "n", "k", "c", "sigma") if getattr(args, f) is None]
    if missing:
        raise ParameterError(f"gen blobs requires {', '.join(missing)}")
    seed = defaults.SEED if args.seed is None else args.seed
    ds, X0 = gen_lowrank_blobs(args.p, args.n, args.k, args.c, args.sigma, seed,
                               separation=args.separation, spread=args.spread)
    X = ds.data
    if args.occlude:
        rows, cols = (int(v) for v in args.occlude.lower().split("x"))
        spec = OcclusionSpec(rows, cols, args.block_rows, args.block_cols, args.fraction,
                             args.fill, seed + 1000)
        X, mask = inject_occlusion(X, spec)
        if args.mask:
            write_labels(mask.astype(int), args.mask, c=2)
    write_matrix(X, args.out)
    if args.labels:
        write_labels(ds.labels, args.labels, c=ds.c)
    if args.clean:
        write_matrix(X0, args.clean)
    return 0


def cmd_fit(args):
    X = read_matrix(args.input)
    prefix = args.out
    record = {"schema": 1, "version": __version__, "method": args.method,
              "input": str(args.input), "args": {k: v for k, v in vars(args).items()
                                                 if k not in ("func",)}}
    t0 = time.perf_counter()
    U = V = flags = None
    if args.method in ("pca", "r1pca", "vorpca") and args.k is None:
        raise ParameterError(f"fit {args.method} requires --k")
    if args.method in ("svt", "trl21") and args.beta is None:
        raise ParameterError(f"fit {args.method} requires --beta")

    if args.method == "pca":
        F = pca_fit(X, args.k)
        Z, U, V = F.product(), F.U, F.V
        record.update(e2=e2_objective(X, F), e21=e21_objective(X, F))
    elif args.method == "r1pca":
        info = r1pca_fit(X, args.k, max_iters=args.max_iters or defaults.R1PCA["max_iters"],
                         tol=args.tol or defaults.R1PCA["tol"], return_info=True)
        F = info.factors
        Z, U, V = F.product(), F.U, F.V
        record.update(e2=e2_objective(X, F), e21=e21_objective(X, F),
                      objective_trace=info.objective_trace, iterations=info.iterations,
                      converged=info.converged)
    elif args.method == "vorpca":
        if (args.delta is None) == (args.delta_quantile is None):
            raise ParameterError("fit vorpca needs exactly one of --delta, --delta-quantile")
        delta = (args.delta if args.delta is not None
                 else suggest_delta(X, args.k, args.delta_quantile))
        opts = dict(defaults.VORPCA)
        if args.tol:
            opts["rel_tol"] = args.tol
        if args.max_iters:
            opts["max_outer_iters"] = args.max_iters
        sol = vorpca_fit(X, VorpcaConfig(k=args.k, delta=delta, seed=args.seed, **opts))
        Z, U, V, flags = sol.x_tilde, sol.U, sol.V, sol.flags
        record.update(delta=delta, objective=sol.objective,
                      objective_trace=sol.objective_trace, iterations=sol.iterations,
                      converged=sol.converged, e2=e2_objective(X, sol.factors),
                      e21=e21_objective(X, sol.factors), n_outliers=int(flags.sum()))
    elif args.method == "svt":
        Z = svt_shrink(X, args.beta)
    else:
        opts = dict(defaults.TRL21)
        if args.tol:
            opts["primal_tol"] = opts["dual_tol"] = args.tol
        if args.max_iters:
            opts["max_iters"] = args.max_iters
        info = trl21pca_fit(X, Trl21Config(beta=args.beta, **opts), return_info=True)
        Z = info.Z
        record.update(objective=info.objective, objective_trace=info.objective_trace,
                      iterations=info.iterations, converged=info.converged)
    record["wall_time_s"] = time.perf_counter() - t0

    files = {"Z": f"{prefix}.Z.csv"}
    write_matrix(Z, files["Z"])
    if U is not None:
        files["U"], files["V"] = f"{prefix}.U.csv", f"{prefix}.V.csv"
        write_matrix(U, files["U"])
        write_matrix(V, files["V"])
    if flags is not None:
        files["flags"] = f"{prefix}.flags.csv"
        write_labels(flags.astype(int), files["flags"], c=2)
    record["files"] = files
    atomic_write_text(f"{prefix}.json", _dump(record))
    return 0


def cmd_eval(args):
    Z = read_matrix(args.z)
    report = {"schema": 1, "version": __version__,
              "config": {"z": str(args.z), "x0": args.x0 and str(args.x0),
                         "labels": args.labels and str(args.labels),
                         "kmeans_k": args.kmeans_k, "restarts": args.restarts,
                         "seed": args.seed}}
    if args.x0:
        X0 = read_matrix(args.x0)
        if X0.shape != Z.shape:
            raise ParameterError(f"shape mismatch Z{Z.shape} vs X0{X0.shape}")
        report["residual"] = noise_free_residual(Z, X0)
    if args.labels:
        labels, c = read_labels(args.labels)
        if labels.size != Z.shape[1]:
            raise ParameterError("labels do not match the number of columns")
        k_c = args.kmeans_k or c
        km = kmeans(Z, k_c, restarts=args.restarts, seed=args.seed)
        accs = np.array([clustering_accuracy(a, labels) for a in km.all_assignments])
        report.update(accuracy_mean=float(accs.mean()), accuracy_sd=float(accs.std()),
                      best_inertia=km.inertia,
                      majority_baseline=float(np.bincount(labels).max() / labels.size))
    spectra = args.spectra or str(Path(args.out).with_suffix("")) + ".spectra.csv"
    atomic_write_text(spectra, spectrum_report({"Z": Z}).to_csv())
    report["spectrum_file"] = str(spectra)
    atomic_write_text(args.out, _dump(report))
    return 0


def cmd_repro(args):
    run_recipe(args.figure, args.out, seed=args.seed)
    return 0


def build_parser():
    ap = argparse.ArgumentParser(prog="vorpca", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a synthetic dataset")
    g.add_argument("kind", choices=["toy-line", "blobs"])
    g.add_argument("--out", required=True, help="data matrix file")
    g.add_argument("--labels", help="labels file")
    g.add_argument("--seed", type=int)
    g.add_argument("--sigma", type=float, help="noise standard deviation")
    g.add_argument("--config", help="toy-line: JSON spec file")
    g.add_argument("--p", type=int)
    g.add_argument("--n", type=int)
    g.add_argument("--k", type=int, help="rank of the clean signal")
    g.add_argument("--c", type=int, help="number of classes")
    g.add_argument("--spread", type=float, default=1.0)
    g.add_argument("--separation", type=float, default=3.0)
    g.add_argument("--clean", help="blobs: write the clean signal X0 here")
    g.add_argument("--occlude", metavar="ROWSxCOLS", help="blobs: image shape to occlude")
    g.add_argument("--block-rows", type=int, default=defaults.OCCLUSION["block_rows"])
    g.add_argument("--block-cols", type=int, default=defaults.OCCLUSION["block_cols"])
    g.add_argument("--fraction", type=float, default=defaults.OCCLUSION["fraction"])
    g.add_argument("--fill", type=float, default=0.0)
    g.add_argument("--mask", help="blobs: write corrupted-column flags here")
    g.set_defaults(func=cmd_gen)

    f = sub.add_parser("fit", help="fit a model to a data matrix")
    f.add_argument("method", choices=["pca", "r1pca", "vorpca", "trl21", "svt"])
    f.add_argument("input")
    f.add_argument("--out", required=True, help="output prefix")
    f.add_argument("--k", type=int)
    f.add_argument("--delta", type=float)
    f.add_argument("--delta-quantile", type=float)
    f.add_argument("--beta", type=float)
    f.add_argument("--tol", type=float)
    f.add_argument("--max-iters", type=int)
    f.add_argument("--seed", type=int, default=defaults.SEED)
    f.set_defaults(func=cmd_fit)

    e = sub.add_parser("eval", help="score a reconstruction")
    e.add_argument("--z", required=True)
    e.add_argument("--x0")
    e.add_argument("--labels")
    e.add_argument("--kmeans-k", type=int)
    e.add_argument("--restarts", type=int, default=defaults.RESTARTS)
    e.add_argument("--seed", type=int, default=defaults.SEED)
    e.add_argument("--out", required=True, help="report JSON")
    e.add_argument("--spectra", help="spectrum CSV (default: next to the report)")
    e.set_defaults(func=cmd_eval)

    r = sub.add_parser("repro", help="run a figure recipe")
    r.add_argument("figure", choices=sorted(RECIPES))
    r.add_argument("--out", required=True)
    r.add_argument("--seed", type=int, default=defaults.SEED)
    r.set_defaults(func=cmd_repro)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (ParameterError, FormatError) as exc:
        print(f"vorpca {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except MonotonicityError as exc:
        print(f"vorpca {args.command}: internal error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
