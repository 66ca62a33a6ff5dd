"""Command-line front end: batch fitting, validation, replay, simulation,
and the HTTP service.

Exit codes: 0 success, 2 unreadable or malformed inputs, 3 fit failure
(optimizer found no finite likelihood, or prior and data are irreconcilable).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .catalog import CatalogFormatError, catalog_to_csv, load_catalog, load_injection
from .forecast import (DEFAULT_H_DAYS, forecast_counts, forecast_counts_plugin,
                       forecast_max_magnitude, forecast_to_dict)
from .inference import (EvidenceUnderflowError, FitFailureError, GridSpec,
                        bayes_average_from_mixture, compute_posterior,
                        delta_posterior, mle_fit, posterior_to_dict, summarize)
from .likelihood import LikelihoodContext
from .magnitudes import DEFAULT_M_UPPER
from .priors import load_prior_config
from .rate import RateParams, cumulative_rate
from .session import replay as replay_session
from .session import snapshots_to_jsonl
from .simulate import SimulationSpec, simulate
from .validation import validate_models, validation_to_dict

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_FIT = 3


def _params(d):
    return None if d is None else RateParams(d["a_fb"], d["b"], d["tau"])


def _write_json(path, payload):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def _context(args):
    catalog = load_catalog(args.events, m0=args.m0, t_end=args.t_end)
    profile = load_injection(args.injection)
    mode = "complete" if profile.shut_in is not None else "partial"
    ctx = LikelihoodContext(catalog=catalog, profile=profile, mu=args.mu, mode=mode)
    return catalog, profile, ctx


def cmd_fit(args):
    catalog, profile, ctx = _context(args)
    prior = load_prior_config(args.config)
    fit = mle_fit(ctx)
    n = args.grid
    grid = compute_posterior(ctx, prior, GridSpec(n, n, n))
    summary = summarize(grid, ctx, prior, mle=fit.theta)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    post = posterior_to_dict(grid, summary, catalog.m0)
    post["mle_at_bounds"] = list(fit.at_bounds)
    post["tau_identified"] = fit.tau_identified
    post["likelihood_mode"] = ctx.mode
    _write_json(out / "posterior.json", post)

    h = args.h_hours / 24.0
    t0 = catalog.t_end
    count = forecast_counts(grid, ctx, t0, h)
    maxmag = forecast_max_magnitude(grid, ctx, t0, h)
    _write_json(out / "forecast.json",
                forecast_to_dict(count, maxmag,
                                 flags={"likelihood_mode": ctx.mode, "whatif": False}))

    if args.plugin:
        theta = {"mle": fit.theta, "map": summary.map, "mean": summary.mean}[args.plugin]
        pc = forecast_counts_plugin(theta, ctx, t0, h)
        pm = forecast_max_magnitude(delta_posterior(theta), ctx, t0, h)
        _write_json(out / "forecast_plugin.json",
                    forecast_to_dict(pc, pm, flags={"plugin": args.plugin}))

    print(f"events: {catalog.n_events}  mode: {ctx.mode}")
    print(f"mle:  a_fb={fit.theta.a_fb:+.4f} b={fit.theta.b:.4f} tau={fit.theta.tau:.4f}"
          + ("" if fit.tau_identified else "  (tau not identified)"))
    print(f"mean: a_fb={summary.mean.a_fb:+.4f} b={summary.mean.b:.4f} "
          f"tau={summary.mean.tau:.4f}")
    print(f"map:  a_fb={summary.map.a_fb:+.4f} b={summary.map.b:.4f} "
          f"tau={summary.map.tau:.4f}")
    print(f"log_evidence: {grid.log_evidence:.4f}")
    print(f"wrote {out / 'posterior.json'}")
    return EXIT_OK


def cmd_validate(args):
    with open(args.posterior, "r", encoding="utf-8") as fh:
        post = json.load(fh)
    m0 = post["m0"]
    catalog = load_catalog(args.events, m0=m0, t_end=args.t_end)
    profile = load_injection(args.injection)

    cumulatives = {}
    for name in ("mle", "map", "mean"):
        theta = _params(post[name])
        if theta is not None:
            cumulatives[name] = (
                theta, lambda t, th=theta: cumulative_rate(t, th, profile, m0))
    mix = post["tau_mixture"]
    cumulatives["bayes_average"] = (
        None, bayes_average_from_mixture(mix["tau"], mix["coefficients"], profile))

    results = validate_models(catalog, cumulatives)
    _write_json(args.out, validation_to_dict(results))
    for name, v in results.items():
        print(f"{name:14s} d_n={v.ks.d_n:.4f} band95={v.ks.band_95:.4f} "
              f"pass95={v.ks.pass_95} pass99={v.ks.pass_99}")
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_replay(args):
    catalog = load_catalog(args.events, m0=args.m0, t_end=args.t_end)
    profile = load_injection(args.injection)
    prior = load_prior_config(args.config)
    n = args.grid
    snapshots, session = replay_session(
        catalog, profile, prior, cadence=args.cadence, mu=args.mu,
        grid_spec=GridSpec(n, n, n), h_days=args.h_hours / 24.0)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(snapshots_to_jsonl(snapshots))
    last = snapshots[-1]
    print(f"snapshots: {len(snapshots)}  final mode: {last.likelihood_mode}")
    print(f"final mean: a_fb={last.summary.mean.a_fb:+.4f} "
          f"b={last.summary.mean.b:.4f} tau={last.summary.mean.tau:.4f}")
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_simulate(args):
    from .magnitudes import MagnitudeModel

    profile = load_injection(args.injection)
    spec = SimulationSpec(
        theta=RateParams(args.a_fb, args.b, args.tau), profile=profile,
        mag=MagnitudeModel(b=args.b, m0=args.m0, mu=args.mu),
        t_end=args.t_end, seed=args.seed)
    catalog = simulate(spec)
    text = catalog_to_csv(catalog)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"{catalog.n_events} events -> {args.out}")
    return EXIT_OK


def cmd_serve(args):
    from .service import serve

    prior = load_prior_config(args.config) if args.config else None
    port = args.port if args.port is not None else int(os.environ.get(
        "FLUIDSEIS_PORT", "8000"))
    serve(host=args.host, port=port, data_dir=args.data_dir, prior=prior)
    return EXIT_OK


def _add_common(p, m0=True):
    p.add_argument("--events", required=True, help="events CSV")
    p.add_argument("--injection", required=True, help="injection schedule CSV")
    if m0:
        p.add_argument("--m0", type=float, required=True,
                       help="completeness magnitude")
    p.add_argument("--t-end", type=float, default=None,
                   help="observation window end in days (default: last event)")
    p.add_argument("--mu", type=float, default=DEFAULT_M_UPPER,
                   help="upper magnitude truncation")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="fluidseis",
        description="injection-driven seismicity: fitting, validation, "
                    "forecasting, online updating")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="batch MLE + posterior + forecast")
    _add_common(p)
    p.add_argument("--config", default=None, help="prior JSON (default: shipped)")
    p.add_argument("--grid", type=int, default=64, help="nodes per axis")
    p.add_argument("--h-hours", type=float, default=4.0, help="forecast window")
    p.add_argument("--plugin", choices=["mle", "map", "mean"], default=None,
                   help="also write a plug-in forecast at this point estimate")
    p.add_argument("--out", default=".", help="output directory")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("validate", help="four-model residual tests")
    _add_common(p, m0=False)
    p.add_argument("--posterior", required=True, help="posterior.json from fit")
    p.add_argument("--out", default="validation.json")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("replay", help="stream a recorded catalog through a session")
    _add_common(p)
    p.add_argument("--config", default=None)
    p.add_argument("--grid", type=int, default=48)
    p.add_argument("--cadence", type=float, default=0.1, help="tick spacing, days")
    p.add_argument("--h-hours", type=float, default=4.0)
    p.add_argument("--out", default="snapshots.jsonl")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("simulate", help="draw a synthetic catalog")
    p.add_argument("--injection", required=True)
    p.add_argument("--a-fb", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--m0", type=float, required=True)
    p.add_argument("--mu", type=float, default=DEFAULT_M_UPPER)
    p.add_argument("--t-end", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-", help="events CSV path, - for stdout")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=None,
                   help="default: FLUIDSEIS_PORT or 8000")
    p.add_argument("--data-dir", default=None,
                   help="enable per-session JSONL logs in this directory")
    p.add_argument("--config", default=None, help="prior JSON for new sessions")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CatalogFormatError, OSError, json.JSONDecodeError, KeyError,
            ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (FitFailureError, EvidenceUnderflowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FIT


if __name__ == "__main__":
    sys.exit(main())
