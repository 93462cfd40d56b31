"""Command-line entry point: ``specphase {gen,spectral,ema,sweep,phase-diagram}``.

Exit codes: 0 success, 1 numerical failure, 2 usage or parameter error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import math
import sys
from typing import Any, Sequence

import numpy as np

from . import __version__, ema, lab
from .ensembles import (
    SBM,
    DegreeDistribution,
    PlantedSpec,
    Regular,
    generate,
    read_edge_list,
    sbm_structure,
    structure_conversions,
    write_edge_list,
)
from .errors import ConvergenceError, GenerationError, ParameterError, PhaseInfeasible, SpecPhaseError
from .spectral import second_smallest_normalized_laplacian, spectral_bisection, write_eigenvector

log = logging.getLogger("specphase")

EXIT_OK, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _global_flags(suppress: bool) -> argparse.ArgumentParser:
    # shared by the top-level parser and every subcommand, so flags work on either side
    p = argparse.ArgumentParser(add_help=False)
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--seed", type=int, default=d(0), help="base random seed")
    p.add_argument("--threads", type=int, default=d(1), help="worker processes for sweeps")
    p.add_argument("--out", "-o", default=d(None), help="output path (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default=d(None), help="output format")
    p.add_argument("-v", "--verbose", action="count", default=d(0))
    return p


def _structure_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--gamma-struct", type=float, help="structure strength Gamma in [0, 1]")
    g.add_argument("--cin-minus-cout", type=float, help="c_in - c_out")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="specphase", parents=[_global_flags(False)],
                                     description="Spectral modularity bisection on planted random graphs.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    common = _global_flags(True)

    g = sub.add_parser("gen", parents=[common], help="generate a planted graph as an edge list")
    kind = g.add_mutually_exclusive_group(required=True)
    kind.add_argument("--regular", action="store_true")
    kind.add_argument("--sbm", action="store_true")
    g.add_argument("-N", type=int, required=True, help="number of nodes")
    g.add_argument("-c", type=float, help="degree (regular) or mean degree (SBM with a structure flag)")
    g.add_argument("--p1", type=float, default=0.5)
    g.add_argument("--cin", type=float)
    g.add_argument("--cout", type=float)
    g.add_argument("--no-labels", action="store_true", help="omit planted labels from the file")
    _structure_flags(g)

    s = sub.add_parser("spectral", parents=[common], help="leading eigenpair and sign partition of a graph")
    s.add_argument("graph", help="edge-list file")
    s.add_argument("--theta", type=float, default=1.0)
    s.add_argument("--tol", type=float, default=1e-8)
    s.add_argument("--max-iter", type=int)
    s.add_argument("--eigvec", help="also dump the eigenvector to this path")
    s.add_argument("--laplacian", action="store_true", help="add the normalized-Laplacian lambda_2 and Cheeger bound")

    e = sub.add_parser("ema", parents=[common], help="effective-medium phase and eigenvalue")
    dist = e.add_mutually_exclusive_group(required=True)
    dist.add_argument("--regular", type=int, metavar="C")
    dist.add_argument("--poisson", type=float, metavar="C_BAR")
    e.add_argument("--trunc-eps", type=float, default=1e-12, help="Poisson tail mass dropped")
    e.add_argument("--theta", type=float, default=1.0)
    e.add_argument("--p1", type=float, default=0.5)
    e.add_argument("--thresholds", action="store_true", help="report thresholds only")
    e.add_argument("--tol", type=float, default=1e-8)
    _structure_flags(e)

    w = sub.add_parser("sweep", parents=[common], help="Monte Carlo sweep from a key = value config")
    w.add_argument("config", help="sweep configuration file")
    w.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override a config key")
    w.add_argument("--max-cell-seconds", type=float, help="abort a cell after this many seconds")
    w.add_argument("--max-work", type=int, default=100_000, help="budget on steps x thetas x samples")
    w.add_argument("--no-aggregates", action="store_true")

    d = sub.add_parser("phase-diagram", parents=[common], help="EMA phase label on a (structure, theta) grid")
    dd = d.add_mutually_exclusive_group(required=True)
    dd.add_argument("--regular", type=int, metavar="C")
    dd.add_argument("--poisson", type=float, metavar="C_BAR")
    d.add_argument("--trunc-eps", type=float, help="Poisson tail mass dropped (default 1e-12, or 1/N with -N)")
    d.add_argument("--p1", type=float, default=0.5)
    d.add_argument("--axis", choices=("gamma", "cin_minus_cout"), default="gamma")
    d.add_argument("--axis-min", type=float, required=True)
    d.add_argument("--axis-max", type=float, required=True)
    d.add_argument("--axis-steps", type=int, default=21)
    d.add_argument("--theta-min", type=float, required=True)
    d.add_argument("--theta-max", type=float, required=True)
    d.add_argument("--theta-steps", type=int, default=21)
    d.add_argument("--theta-log", action="store_true", help="geometric theta spacing")
    d.add_argument("--extras", action="store_true",
                   help="append cin_minus_cout, gamma_un, cheeger_lower_bound_theta (and mc_overlap)")
    d.add_argument("--mc-samples", type=int, default=0, help="Monte Carlo samples per structure value")
    d.add_argument("-N", type=int, help="graph size for Monte Carlo and sampled Cheeger bounds")
    return parser


# --------------------------------------------------------------------------------------
# output helpers
# --------------------------------------------------------------------------------------


def _open_out(path: str | None):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline="\n"), True


def _emit_record(rec: dict[str, Any], args, default_fmt: str = "json") -> None:
    fmt = args.format or default_fmt
    fh, close = _open_out(args.out)
    try:
        if fmt == "json":
            json.dump({k: lab._json_value(v) for k, v in rec.items()}, fh, indent=1)
            fh.write("\n")
        else:
            lab.write_table([rec], list(rec), fh, "csv")
    finally:
        if close:
            fh.close()


# --------------------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------------------


def cmd_gen(args) -> int:
    if args.regular:
        if args.c is None or int(args.c) != args.c:
            raise UsageError("--regular needs an integer -c")
        c = int(args.c)
        if args.cin is not None or args.cout is not None:
            raise UsageError("--cin/--cout apply to --sbm only")
        if args.gamma_struct is not None:
            gs = args.gamma_struct
        elif args.cin_minus_cout is not None:
            gs = structure_conversions(c, args.p1, cin_minus_cout=args.cin_minus_cout).gamma_struct
        else:
            raise UsageError("--regular needs --gamma-struct or --cin-minus-cout")
        spec = PlantedSpec(args.N, args.p1, Regular(c), gs, args.seed)
    else:
        if args.cin is not None and args.cout is not None:
            c_in, c_out = args.cin, args.cout
        elif args.c is not None and (args.gamma_struct is not None or args.cin_minus_cout is not None):
            key = "gamma_struct" if args.gamma_struct is not None else "cin_minus_cout"
            sv = structure_conversions(args.c, args.p1, **{key: getattr(args, key)})
            c_in, c_out = sv.c_in, sv.c_out
        else:
            raise UsageError("--sbm needs --cin and --cout, or -c with a structure flag")
        gs = sbm_structure(c_in, c_out, args.p1)[1]
        spec = PlantedSpec(args.N, args.p1, SBM(c_in, c_out), gs, args.seed)
    g = generate(spec)
    if args.out is None:
        raise UsageError("gen needs --out/-o for the edge-list file")
    write_edge_list(g, args.out, labels=not args.no_labels)
    deg = g.degrees
    summary = {"n": g.n_nodes, "k": g.total_degree, "edges": g.n_edges,
               "cross_edges": g.cross_edge_count(), "mean_degree": float(deg.mean()),
               "isolated": int(np.count_nonzero(deg == 0)), "seed": args.seed, "path": args.out}
    if (args.format or "json") == "json":
        print(json.dumps(summary))
    else:
        lab.write_table([summary], list(summary), sys.stdout, "csv")
    return EXIT_OK


def cmd_spectral(args) -> int:
    try:
        g = read_edge_list(args.graph)
    except OSError as exc:
        raise UsageError(f"cannot read {args.graph}: {exc.strerror or exc}") from None
    out = spectral_bisection(g, args.theta, tol=args.tol, seed=args.seed, max_iter=args.max_iter)
    rec = {"n": g.n_nodes, "k": g.total_degree, "theta": args.theta}
    rec.update(out.summary())
    if out.overlap is None:
        rec.pop("overlap")
    if args.laplacian:
        gap = second_smallest_normalized_laplacian(g, tol=args.tol, seed=args.seed)
        rec.update(laplacian_lambda2=gap.lambda2, cheeger_lower_bound_theta=gap.cheeger_lower_bound,
                   disconnected=gap.disconnected)
    if args.eigvec:
        write_eigenvector(args.eigvec, out.lambda1, out.residual, out.vector)
        rec["eigenvector_path"] = args.eigvec
    _emit_record(rec, args)
    return EXIT_OK


def _ema_distribution(args) -> DegreeDistribution:
    if args.regular is not None:
        if args.regular < 3:
            raise UsageError(f"--regular needs an integer degree >= 3, got {args.regular}")
        return DegreeDistribution.regular(args.regular)
    return ema.poisson_truncated(args.poisson, args.trunc_eps)


def cmd_ema(args) -> int:
    dist = _ema_distribution(args)
    c_struct = args.regular if args.regular is not None else args.poisson
    rec: dict[str, Any] = {"distribution": "regular" if args.regular is not None else "poisson",
                           "c_bar": dist.mean_degree, "theta": args.theta, "p1": args.p1}
    if args.poisson is not None:
        rec.update(trunc_eps=args.trunc_eps, t_max=dist.metadata["t_max"])
    g_star = ema.detectability_threshold(dist, args.tol)
    rec["gamma_star"] = g_star
    rec["gamma_un"] = ema.unpartitioned_boundary(dist, args.theta)
    if args.regular is not None:
        rec["theta_max"] = ema.regular_closed_forms(args.regular, 1.0, args.theta, args.p1).theta_max
    if args.poisson is not None:
        rec["dense_approximation_gamma"] = ema.dense_approximation_threshold(args.poisson)
    if not args.thresholds:
        if args.gamma_struct is not None:
            gs = args.gamma_struct
        elif args.cin_minus_cout is not None:
            gs = structure_conversions(c_struct, args.p1, cin_minus_cout=args.cin_minus_cout).gamma_struct
        else:
            raise UsageError("ema needs --gamma-struct or --cin-minus-cout (or --thresholds)")
        sol = ema.classify_phase(ema.PhaseQuery(dist, gs, args.theta, args.p1), args.tol)
        rec["gamma_struct"] = gs
        rec.update(sol.as_dict())
        rec.pop("candidates")
        for ph, phi in sol.candidates.items():
            rec[f"phi_{ph}"] = phi
        if args.regular is not None:
            rec["predicted_overlap"] = (ema.predicted_overlap_regular(args.regular, gs, args.p1)
                                        if sol.phase is ema.Phase.DETECTABLE
                                        else (0.5 if sol.phase is ema.Phase.UNDETECTABLE
                                              else max(args.p1, 1.0 - args.p1)))
    _emit_record(rec, args)
    return EXIT_OK


def cmd_sweep(args) -> int:
    try:
        with open(args.config, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {args.config}: {exc.strerror or exc}") from None
    overrides: dict[str, list[str]] = {}
    for item in args.set:
        if "=" not in item:
            raise UsageError(f"--set expects KEY=VALUE, got {item!r}")
        k, v = (s.strip() for s in item.split("=", 1))
        overrides.setdefault(k.replace("-", "_"), []).append(v)
    cfg = lab.parse_config(text)
    cfg.update(overrides)
    if "base_seed" not in cfg:
        cfg["base_seed"] = [str(args.seed)]
    spec = lab.SweepSpec.from_config("\n".join(f"{k} = {v}" for k, vs in cfg.items() for v in vs))
    rows = lab.run_sweep(spec, threads=max(1, args.threads), max_cell_seconds=args.max_cell_seconds,
                         max_work=args.max_work, aggregates=not args.no_aggregates)
    fh, close = _open_out(args.out)
    try:
        lab.write_table(rows, lab.sweep_columns(spec), fh, args.format or "csv")
    finally:
        if close:
            fh.close()
    n_err = sum(1 for r in rows if r.get("error") and r["sample_index"] != -1)
    if n_err:
        log.warning("%d of %d sample rows carry errors", n_err, sum(r["sample_index"] != -1 for r in rows))
    return EXIT_OK


def _grid(lo: float, hi: float, steps: int, geometric: bool = False) -> np.ndarray:
    if steps < 1:
        raise UsageError("grid steps must be >= 1")
    if steps == 1:
        return np.array([lo])
    if geometric:
        if lo <= 0:
            raise UsageError("geometric grid needs a positive lower end")
        return np.geomspace(lo, hi, steps)
    return np.linspace(lo, hi, steps)


def cmd_phase_diagram(args) -> int:
    if args.poisson is not None and args.trunc_eps is None:
        args.trunc_eps = 1.0 / args.N if args.N else 1e-12
    dist = _ema_distribution(args)
    c_struct = args.regular if args.regular is not None else args.poisson
    axis = _grid(args.axis_min, args.axis_max, args.axis_steps)
    thetas = _grid(args.theta_min, args.theta_max, args.theta_steps, args.theta_log)
    if args.axis == "gamma":
        gammas = [float(x) for x in axis]
    else:
        gammas = [structure_conversions(c_struct, args.p1, cin_minus_cout=float(x)).gamma_struct for x in axis]
    cheeger: dict[float, float] | None = None
    mc: dict[tuple[float, float], float] = {}
    sampled_bound = args.extras and args.poisson is not None
    if args.mc_samples or sampled_bound:
        if not args.N:
            raise UsageError("-N is required for Monte Carlo overlaps and sampled Cheeger bounds")
        base = lab.SweepSpec(
            ensemble="regular" if args.regular is not None else "sbm", n_nodes=args.N,
            degree=float(c_struct), p1=args.p1, thetas=tuple(float(t) for t in thetas),
            samples=max(1, args.mc_samples), base_seed=args.seed, cheeger=sampled_bound,
            outputs=frozenset({"overlap"}))
        cheeger = {}
        for gs in gammas:
            spec = dataclasses.replace(base, axis_min=gs, axis_max=gs)
            if not args.mc_samples:
                spec = dataclasses.replace(spec, thetas=(1.0,))
            for r in lab.run_sweep(spec, threads=max(1, args.threads)):
                if r["sample_index"] != -1:
                    continue
                if args.mc_samples:
                    mc[(gs, r["theta"])] = r.get("overlap")
                if sampled_bound:
                    cheeger[gs] = r.get("cheeger_lower_bound_theta")
    rows = lab.phase_grid(dist, gammas, [float(t) for t in thetas], args.p1, extras=args.extras, cheeger=cheeger)
    cols = list(lab.PHASE_COLUMNS)
    if args.extras:
        cols += ["cin_minus_cout", "gamma_un", "cheeger_lower_bound_theta"]
        if args.mc_samples:
            cols.append("mc_overlap")
            for r in rows:
                r["mc_overlap"] = mc.get((r["gamma_struct"], r["theta"]))
    fh, close = _open_out(args.out)
    try:
        lab.write_table(rows, cols, fh, args.format or "csv")
    finally:
        if close:
            fh.close()
    if args.out and args.out != "-":
        meta = {
            "distribution": "regular" if args.regular is not None else "poisson",
            "degree": c_struct, "p1": args.p1,
            "trunc_eps": args.trunc_eps if args.poisson is not None else None,
            "gamma_star": ema.detectability_threshold(dist),
            "cheeger_source": ("effective-medium eigenvalue (1 - phi/c)/2" if args.regular is not None
                               else "normalized Laplacian of sampled instances"),
            "phase_codes": {"D": "detectable", "U": "undetectable", "N": "unpartitioned"},
        }
        with open(args.out + ".meta.json", "w", encoding="utf-8", newline="\n") as fh:
            json.dump(meta, fh, indent=1)
            fh.write("\n")
    return EXIT_OK


COMMANDS = {
    "gen": cmd_gen,
    "spectral": cmd_spectral,
    "ema": cmd_ema,
    "sweep": cmd_sweep,
    "phase-diagram": cmd_phase_diagram,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConvergenceError, PhaseInfeasible, GenerationError) as exc:
        extra = ""
        if isinstance(exc, ConvergenceError) and not math.isnan(exc.best_residual):
            extra = f" (best residual {exc.best_residual:.3e})"
        print(f"numerical failure: {exc}{extra}", file=sys.stderr)
        return EXIT_NUMERIC
    except SpecPhaseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
