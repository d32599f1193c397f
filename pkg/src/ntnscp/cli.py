"""Command-line driver: ``ntnscp {eval,mc,sweep,fit,verify,classify}``.

Exit codes: 0 success, 2 input error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from . import closedform, verify
from .classify import CLASSIFY_MODELS, classify
from .model import ScenarioError
from .montecarlo import McConfig, estimate_scp
from .specfun import marcum_q1
from .scenario_io import LayerFile, load_dataset, load_scenario, load_sweep
from .sweeps import rows_to_csv, run_sweep

EXIT_INPUT = 2
EXIT_NUMERIC = 3


class NumericalFailure(RuntimeError):
    pass


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def cmd_eval(args) -> int:
    scenario = load_scenario(args.scenario).build()
    report = {"models": {}, "notes": []}
    for model in closedform.MODELS:
        try:
            layers = closedform.per_layer_scp(scenario, model)
        except closedform.SingularCoefficientError as exc:
            report["models"][model] = None
            report["notes"].append(f"{model}: {exc}")
            continue
        report["models"][model] = {
            "end_to_end": math.exp(-sum(v.exponent for v in layers.values())),
            "per_layer": {lid: {"kappa": v.kappa, "scp": v.scp} for lid, v in layers.items()},
        }
    diag = {}
    for layer, hops in scenario.groups():
        s = closedform.moment_match(hops)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", closedform.FitRegimeWarning)
            c = closedform.fit_marcum_a_hat(hops, layer)
        diag[layer.id] = {"hops": len(hops), "gamma_shape": s.shape, "gamma_scale": s.scale,
                          "a_hat": c.a_hat, "b_hat_sq_coeff": c.b_hat_sq_coeff}
    report["rician_fit"] = diag
    _emit(_json(report), args.out)
    return 0


def cmd_mc(args) -> int:
    sf = load_scenario(args.scenario)
    config = McConfig(
        trials=args.trials,
        seed=sf.seed if args.seed is None else args.seed,
        mode=args.mode,
        workers=args.workers,
    )
    est = estimate_scp(sf.build(), config)
    out = est.as_dict()
    out["seed"] = config.seed
    out["mode"] = config.mode
    _emit(_json(out), args.out)
    return 0


def cmd_sweep(args) -> int:
    scenario = load_scenario(args.scenario).build()
    spec = load_sweep(args.sweep)
    rows = run_sweep(scenario, spec, trials=args.trials, seed=args.seed, mode=args.mode, workers=args.workers)
    _emit(rows_to_csv(rows), args.out)
    return 0


def cmd_fit(args) -> int:
    scenario = load_scenario(args.scenario).build()
    report = {"layers": {}}
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if args.study:
        layer = scenario.layer(args.study)
        curve = verify.marcum_product_error(layer, args.trials, (args.min_hops, args.max_hops),
                                            np.random.default_rng(args.seed))
        report["study"] = {"layer": layer.id, "trials": args.trials, "max_mean_abs_error": curve.max_error}
        if args.out:
            Path(args.out).write_text(curve.to_csv(), encoding="utf-8")
        sys.stdout.write(_json(report))
        return 0

    w.writerow(["layer_id", "grid_x", "exact", "approx", "abs_error"])
    for layer, hops in scenario.groups():
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", closedform.FitRegimeWarning)
            fit = closedform.fit_marcum_a_hat(hops, layer)
        exact = closedform.marcum_product(hops, layer)
        approx = marcum_q1(fit.a_hat, np.sqrt(fit.b_hat_sq_coeff * closedform.FIT_GRID))
        err = np.abs(exact - approx)
        notes = [str(c.message) for c in caught]
        if fit.a_hat == 0.0:
            notes.append("a_hat = 0: Rayleigh regime, the Rician coefficient is singular; use the Erlang baseline")
        report["layers"][layer.id] = {"a_hat": fit.a_hat, "b_hat_sq_coeff": fit.b_hat_sq_coeff,
                                      "max_abs_residual": float(err.max()), "warnings": notes}
        for x, e, a, r in zip(closedform.FIT_GRID, exact, approx, err):
            w.writerow([layer.id, repr(float(x)), repr(float(e)), repr(float(a)), repr(float(r))])
    if args.out:
        Path(args.out).write_text(buf.getvalue(), encoding="utf-8")
    sys.stdout.write(_json(report))
    return 0


LEMMA1_GRID = dict(m=(0.8, 1.0, 2.0, 5.0, 10.5), alpha=(2.1, 2.3, 2.5, 2.9), k=(1e-6, 1e-3, 1.0, 1e3))


def run_verification(samples=10**6, seed=0, configs=20):
    """Rows (check, detail, value, passed) for the three lemma oracles."""
    rows = []
    worst = 0.0
    for m in LEMMA1_GRID["m"]:
        for a in LEMMA1_GRID["alpha"]:
            for k in LEMMA1_GRID["k"]:
                worst = max(worst, verify.lemma1_residual(m, a, k))
    rows.append(("lemma1", "max relative residual over 80-point grid", worst, worst < 1e-6))
    for b_hat, lam_c, alpha in verify.LEMMA2_GRID:
        devs, mono = verify.lemma2_profile(b_hat, lam_c, alpha)
        rows.append(("lemma2", f"b={b_hat} lambdaC={lam_c} alpha={alpha}: |dev| at a=2..10 = "
                     + " ".join(f"{d:.3g}" for d in devs), devs[-1], mono))
    rng = np.random.default_rng(seed)
    worst_z = 0.0
    for _ in range(configs):
        n = int(rng.integers(1, 8))
        rates = rng.uniform(0.1, 5.0, n)
        c = float(rng.uniform(0.05, 5.0))
        res = verify.lemma3_check(rates, c, samples, rng)
        worst_z = max(worst_z, res.z)
    rows.append(("lemma3", f"max |z| over {configs} random configurations", worst_z, worst_z <= 3.0))
    return rows


def cmd_verify(args) -> int:
    rows = run_verification(args.samples, args.seed)
    width = max(len(r[1]) for r in rows)
    for name, detail, value, ok in rows:
        print(f"{'PASS' if ok else 'FAIL'}  {name:7s} {detail:<{width}}  {value:.3e}")
    return 0 if all(r[3] for r in rows) else EXIT_NUMERIC


def cmd_classify(args) -> int:
    raw = json.loads(Path(args.layers).read_text(encoding="utf-8"))
    if not isinstance(raw, dict) or not isinstance(raw.get("layers"), list):
        raise ScenarioError("layers file: expected an object with a 'layers' list")
    layers = [LayerFile.from_dict(l, f"layers[{i}]").build() for i, l in enumerate(raw["layers"])]
    dataset = load_dataset(args.dataset, args.adjacency)
    models = tuple(args.models.split(",")) if args.models else CLASSIFY_MODELS
    bad = [m for m in models if m not in CLASSIFY_MODELS]
    if bad:
        raise ScenarioError(f"--models: unknown {bad}")
    results = classify(dataset, layers, args.source, args.threshold, models, args.hop_bound,
                       args.beam, args.seed if args.seed is not None else raw.get("seed", 0), args.mc_trials)
    if args.out and args.out.endswith(".csv"):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["node_id", "layer", "model", "reachable", "best_scp", "passes", "path"])
        for r in results:
            w.writerow([r.node_id, r.layer_id, r.model, int(r.reachable), repr(r.best_scp), int(r.passes),
                        " ".join(r.path)])
        _emit(buf.getvalue(), args.out)
    else:
        summary = {}
        for r in results:
            summary.setdefault(r.model, 0)
            summary[r.model] += int(r.passes)
        obj = {
            "source": args.source,
            "threshold": args.threshold,
            "passing_nodes": summary,
            "nodes": [{"id": r.node_id, "layer": r.layer_id, "model": r.model, "reachable": r.reachable,
                       "best_scp": r.best_scp, "passes": r.passes, "path": list(r.path)} for r in results],
        }
        _emit(_json(obj), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ntnscp", description="Secure connection probability of multi-hop routes.")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("eval", help="closed-form SCP of a scenario (JSON)")
    e.add_argument("scenario")
    e.add_argument("--out")
    e.set_defaults(func=cmd_eval)

    m = sub.add_parser("mc", help="Monte-Carlo SCP estimate (JSON)")
    m.add_argument("scenario")
    m.add_argument("--trials", type=int, default=100_000)
    m.add_argument("--seed", type=int)
    m.add_argument("--mode", choices=("common", "exact"), default="common")
    m.add_argument("--workers", type=int, default=1)
    m.add_argument("--out")
    m.set_defaults(func=cmd_mc)

    s = sub.add_parser("sweep", help="parameter sweep (CSV)")
    s.add_argument("scenario")
    s.add_argument("sweep")
    s.add_argument("--out")
    s.add_argument("--trials", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--mode", choices=("common", "exact"))
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_sweep)

    f = sub.add_parser("fit", help="Marcum-Q collapse diagnostics")
    f.add_argument("scenario")
    f.add_argument("--out", help="residual-curve CSV path")
    f.add_argument("--study", metavar="LAYER_ID", help="random-route error study for one layer")
    f.add_argument("--trials", type=int, default=500)
    f.add_argument("--min-hops", type=int, default=2)
    f.add_argument("--max-hops", type=int, default=7)
    f.add_argument("--seed", type=int, default=0)
    f.set_defaults(func=cmd_fit)

    v = sub.add_parser("verify", help="lemma oracles pass/fail table")
    v.add_argument("--samples", type=int, default=10**6)
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("classify", help="per-node secure reachability from a source")
    c.add_argument("dataset", help="nodes CSV: id,layer,lat,lon,alt")
    c.add_argument("--adjacency", required=True, help="edges CSV: id_a,id_b")
    c.add_argument("--layers", required=True, help="JSON with a 'layers' list (scenario layer schema)")
    c.add_argument("--source", required=True)
    c.add_argument("--threshold", type=float, default=0.99)
    c.add_argument("--hop-bound", type=int, default=7)
    c.add_argument("--beam", type=int, default=8)
    c.add_argument("--models")
    c.add_argument("--mc-trials", type=int, default=0)
    c.add_argument("--seed", type=int)
    c.add_argument("--out")
    c.set_defaults(func=cmd_classify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"ntnscp {args.command}: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ArithmeticError, NumericalFailure) as exc:
        print(f"ntnscp {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
