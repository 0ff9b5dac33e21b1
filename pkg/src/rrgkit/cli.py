"""Command-line interface.

Subcommands: sample, spectrum, tails, utp, switchings, ks, experiment,
render.  Vertex arguments and graph files are 1-indexed.  Exit codes:
0 = success with no bound violations, 2 = violations found, 1 = usage or
runtime error.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import experiments, ks, reports, sizebias, switchings, utp
from .graphs import AdjacencyMatrix, read_graph, write_graph
from .rng import RngStream
from .samplers import GraphModel, enumerate_regular, sample
from .spectra import spectral_summary

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VIOLATIONS = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's default 2
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        sys.exit(EXIT_ERROR)


def _emit(payload, out=None):
    text = json.dumps(payload, sort_keys=True, indent=2, default=str) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _model_from_args(args) -> GraphModel:
    return GraphModel(kind=args.model, n=args.n, d=args.d, p=getattr(args, "p", None))


def _cmd_sample(args) -> int:
    model = _model_from_args(args)
    gen = RngStream(args.seed).generator()
    out = Path(args.out)
    for i in range(args.count):
        A = sample(model, gen)
        path = out if args.count == 1 else out.with_name(f"{out.stem}_{i}{out.suffix}")
        write_graph(path, A)
    return EXIT_OK


def _cmd_spectrum(args) -> int:
    A = read_graph(args.graph)
    summ = spectral_summary(A)
    payload = {
        "n": summ.n,
        "d": summ.d,
        "lambda": summ.lam,
        "lambda_over_sqrt_d": summ.lam_over_sqrt_d,
        "vu_ref": summ.vu_ref,
        "lambda_over_vu": summ.lam_over_vu,
    }
    if args.json:
        payload["eigenvalues"] = list(summ.eigenvalues)
    _emit(payload, args.out)
    return EXIT_OK


def _cmd_tails_scenario(args) -> int:
    grid = [float(t) for t in args.grid.split(",")] if args.grid else None
    params = {"grid": grid} if grid else {}
    rep = sizebias.scenario(args.name, params, args.reps, RngStream(args.seed))
    _emit(rep.to_dict(), args.out)
    ok = rep.holds() and rep.meta.get("lower_holds", True)
    return EXIT_OK if ok else EXIT_VIOLATIONS


def _cmd_utp_params(args) -> int:
    p = utp.utp_params(_model_from_args(args))
    _emit({"c0": p.c0, "gamma0": p.gamma0})
    return EXIT_OK


def _cmd_utp_validate(args) -> int:
    model = _model_from_args(args)
    stream = RngStream(args.seed)
    q = utp.q_matrix(args.q, model.n, model.d, stream.substream(10**6))
    stats_scale = max(float(np.max(q)), 1e-12)
    grid = [float(t) for t in args.grid.split(",")] if args.grid else [
        stats_scale * model.d * f for f in (0.5, 1.0, 2.0, 4.0)
    ]
    rep = utp.mc_tail_report(model, q, grid, args.reps, stream)
    _emit(rep.to_dict(), args.out)
    ok = rep.holds() and rep.meta.get("lower_holds", True)
    return EXIT_OK if ok else EXIT_VIOLATIONS


def _cmd_switchings_count(args) -> int:
    A = read_graph(args.graph)
    counts = switchings.count_switchings(A, args.u - 1, args.v - 1)
    bounds = switchings.switching_count_bounds(A.n, int(A.a.sum(axis=0)[0]))
    _emit({"s_uv": counts.s_uv, "t_uv": counts.t_uv, "bounds": bounds})
    return EXIT_OK


def _cmd_switchings_verify(args) -> int:
    bounds = switchings.switching_count_bounds(args.n, args.d)
    graphs = enumerate_regular(args.n, args.d)
    violations = []
    for gi, A in enumerate(graphs):
        for u in range(args.n):
            for v in range(u + 1, args.n):
                c = switchings.count_switchings(A, u, v)
                if A.a[u, v] == 0:
                    ok = bounds["s_low"] <= c.s_uv <= bounds["s_high"]
                else:
                    ok = bounds["t_low"] <= c.t_uv <= bounds["t_high"]
                if not ok:
                    violations.append({"graph": gi, "u": u + 1, "v": v + 1})
    _emit({
        "n": args.n,
        "d": args.d,
        "graphs": len(graphs),
        "bounds": bounds,
        "violations": violations,
    })
    return EXIT_OK if not violations else EXIT_VIOLATIONS


def _cmd_switchings_coupling(args) -> int:
    cg = switchings.build_coupling_graph(args.n, args.d, args.u - 1, args.v - 1)
    tv = cg.marginal_tv_from_uniform()
    p_up = 1 - Fraction(args.d + 1, args.n - 1)
    p_low = 1 - Fraction(args.d + 1, args.n - args.d - 1)
    out_ok = all(cg.bounded_given_output(j) >= p_up for j in range(len(cg.right)))
    in_ok = all(cg.bounded_given_input(i) >= p_low for i in range(len(cg.left)))
    _emit({
        "n": args.n,
        "d": args.d,
        "u": args.u,
        "v": args.v,
        "left_states": len(cg.left),
        "right_states": len(cg.right),
        "left_degree": cg.left_degree_target,
        "right_degree": cg.right_degree_target,
        "marginal_tv": str(tv),
        "bounded_given_output_min": str(min(cg.bounded_given_output(j) for j in range(len(cg.right)))),
        "bounded_given_input_min": str(min(cg.bounded_given_input(i) for i in range(len(cg.left)))),
        "upcoupling_ok": out_ok,
        "downcoupling_ok": in_ok,
    })
    return EXIT_OK if tv == 0 and out_ok and in_ok else EXIT_VIOLATIONS


def _cmd_ks_dp_check(args) -> int:
    A = read_graph(args.graph)
    params = ks.DiscrepancyParams(args.delta, args.kappa1, args.kappa2)
    res = ks.dp_check(A, params, mode=args.mode, rng=RngStream(args.seed))
    witness = None
    if res.witness:
        witness = [sorted(v + 1 for v in res.witness[0]), sorted(v + 1 for v in res.witness[1])]
    _emit({"holds": res.holds, "exhaustive": res.exhaustive, "witness": witness})
    return EXIT_OK if res.holds else EXIT_VIOLATIONS


def _cmd_ks_constants(args) -> int:
    ledger = asdict(ks.alpha_constants(args.a1, args.a2, args.a3, args.c0, args.K,
                                       args.gamma0_cap))
    if args.remark_chain:
        ledger["remark_chain"] = [
            ks.certified_constant_chain(k, c0)
            for k in range(0, 6)
            for c0 in (1.0, 2.0)
        ]
    _emit(ledger, args.out)
    if args.remark_chain:
        ok = all(
            r["alpha0_certified"] and r["alpha_certified"] and r["headline_certified"]
            for r in ledger["remark_chain"]
        )
        return EXIT_OK if ok else EXIT_VIOLATIONS
    return EXIT_OK


def _cmd_ks_heavy_audit(args) -> int:
    model = GraphModel("uniform", args.n, args.d)
    stream = RngStream(args.seed)
    up = utp.utp_params(model)
    kappa1, kappa2 = ks.dp_params(up.c0, up.gamma0, args.K)
    delta = 2.0 * args.d / args.n
    params = ks.DiscrepancyParams(delta, kappa1, kappa2)
    alpha0 = ks.heavy_alpha0(2.0, kappa1, kappa2)
    gen = stream.generator()
    failures = 0
    dp_failures = 0
    checked = 0
    for _ in range(args.reps):
        A = sample(model, gen)
        if not ks.dp_check(A, params).holds:
            dp_failures += 1
            continue
        for _ in range(args.x_per_graph):
            x = gen.normal(size=args.n)
            x /= np.linalg.norm(x)
            res = ks.verify_heavy(A, x, args.d, params, alpha0)
            checked += 1
            if not res.ok or res.alpha_total > 4.0 + 1e-9:
                failures += 1
    _emit({
        "n": args.n,
        "d": args.d,
        "reps": args.reps,
        "dp_failures": dp_failures,
        "heavy_checked": checked,
        "heavy_failures": failures,
        "alpha0": alpha0,
        "kappa1": kappa1,
        "kappa2": kappa2,
    })
    return EXIT_OK if failures == 0 else EXIT_VIOLATIONS


def _cmd_experiment(args) -> int:
    cfg = experiments.ExperimentConfig.from_json(args.config)
    summary = experiments.run_experiment(cfg)
    sys.stdout.write(json.dumps({"cells": len(summary["cells"]),
                                 "skipped": len(summary["skipped"])}) + "\n")
    return EXIT_OK


def _cmd_render(args) -> int:
    src = Path(args.input)
    if src.suffix == ".csv":
        experiments.render_csv_scatter(src, args.out)
    else:
        experiments.render_tail_report(json.loads(src.read_text()), args.out)
    return EXIT_OK


def build_parser() -> _Parser:
    p = _Parser(prog="rrgkit", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def add_model_args(sp, with_p=True):
        sp.add_argument("--model", required=True,
                        choices=["uniform", "perm-uniform", "perm-involution",
                                 "perm-longcycle"] + (["er"] if with_p else []))
        sp.add_argument("--n", type=int, required=True)
        sp.add_argument("--d", type=int, default=0)
        if with_p:
            sp.add_argument("--p", type=float, default=None)

    sp = sub.add_parser("sample", help="sample graphs to files")
    add_model_args(sp)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--count", type=int, default=1)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=_cmd_sample)

    sp = sub.add_parser("spectrum", help="spectral summary of a graph file")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--json", action="store_true", help="include full spectrum")
    sp.add_argument("--out")
    sp.set_defaults(func=_cmd_spectrum)

    sp = sub.add_parser("tails", help="size-bias tail scenarios")
    tsub = sp.add_subparsers(dest="tails_command", required=True)
    ssp = tsub.add_parser("scenario")
    ssp.add_argument("--name", required=True, choices=list(sizebias.SCENARIO_NAMES))
    ssp.add_argument("--reps", type=int, default=10**4)
    ssp.add_argument("--seed", type=int, required=True)
    ssp.add_argument("--grid", default=None, help="comma-separated thresholds")
    ssp.add_argument("--out")
    ssp.set_defaults(func=_cmd_tails_scenario)

    sp = sub.add_parser("utp", help="uniform-tails parameters and validation")
    usub = sp.add_subparsers(dest="utp_command", required=True)
    usp = usub.add_parser("params")
    add_model_args(usp, with_p=False)
    usp.set_defaults(func=_cmd_utp_params)
    usp = usub.add_parser("validate")
    add_model_args(usp, with_p=False)
    usp.add_argument("--q", default="random", choices=["random", "setpair", "light"])
    usp.add_argument("--reps", type=int, default=10**4)
    usp.add_argument("--seed", type=int, required=True)
    usp.add_argument("--grid", default=None)
    usp.add_argument("--out")
    usp.set_defaults(func=_cmd_utp_validate)

    sp = sub.add_parser("switchings", help="switching counts, audits, couplings")
    wsub = sp.add_subparsers(dest="switchings_command", required=True)
    wsp = wsub.add_parser("count")
    wsp.add_argument("--graph", required=True)
    wsp.add_argument("--u", type=int, required=True, help="1-indexed")
    wsp.add_argument("--v", type=int, required=True, help="1-indexed")
    wsp.set_defaults(func=_cmd_switchings_count)
    wsp = wsub.add_parser("verify")
    wsp.add_argument("--n", type=int, required=True)
    wsp.add_argument("--d", type=int, required=True)
    wsp.set_defaults(func=_cmd_switchings_verify)
    wsp = wsub.add_parser("coupling")
    wsp.add_argument("--n", type=int, required=True)
    wsp.add_argument("--d", type=int, required=True)
    wsp.add_argument("--u", type=int, required=True, help="1-indexed")
    wsp.add_argument("--v", type=int, required=True, help="1-indexed")
    wsp.set_defaults(func=_cmd_switchings_coupling)

    sp = sub.add_parser("ks", help="discrepancy checks and explicit constants")
    ksub = sp.add_subparsers(dest="ks_command", required=True)
    ksp = ksub.add_parser("dp-check")
    ksp.add_argument("--graph", required=True)
    ksp.add_argument("--delta", type=float, required=True)
    ksp.add_argument("--kappa1", type=float, required=True)
    ksp.add_argument("--kappa2", type=float, default=0.0)
    ksp.add_argument("--mode", choices=["exact", "sampled"], default="exact")
    ksp.add_argument("--seed", type=int, default=0)
    ksp.set_defaults(func=_cmd_ks_dp_check)
    ksp = ksub.add_parser("constants")
    ksp.add_argument("--a1", type=float, default=2.0)
    ksp.add_argument("--a2", type=float, default=1.0)
    ksp.add_argument("--a3", type=float, default=10.0)
    ksp.add_argument("--c0", type=float, default=1.0 / 12.0)
    ksp.add_argument("--K", type=float, default=1.0)
    ksp.add_argument("--gamma0-cap", type=float, default=10.0)
    ksp.add_argument("--remark-chain", action="store_true",
                     help="also certify the published constant chain for K=0..5, C0 in {1,2}")
    ksp.add_argument("--out")
    ksp.set_defaults(func=_cmd_ks_constants)
    ksp = ksub.add_parser("heavy-audit")
    ksp.add_argument("--n", type=int, required=True)
    ksp.add_argument("--d", type=int, required=True)
    ksp.add_argument("--reps", type=int, default=50)
    ksp.add_argument("--x-per-graph", type=int, default=20)
    ksp.add_argument("--K", type=float, default=1.0)
    ksp.add_argument("--seed", type=int, required=True)
    ksp.set_defaults(func=_cmd_ks_heavy_audit)

    sp = sub.add_parser("experiment", help="run a config-driven experiment grid")
    sp.add_argument("--config", required=True)
    sp.set_defaults(func=_cmd_experiment)

    sp = sub.add_parser("render", help="render CSV/JSON reports to SVG")
    sp.add_argument("--input", required=True)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=_cmd_render)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BrokenPipeError:
        return EXIT_ERROR
    except Exception as exc:  # runtime errors exit 1 with a message
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
