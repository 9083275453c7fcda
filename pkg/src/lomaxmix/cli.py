"""Command-line front end: ingest, fit, compare, gen, simulate, evolve, plotdata.

Exit codes: 0 ok, 1 input error, 2 convergence failure, 3 numeric error.
"""
from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .corpus import FrequencyHistogram, ingest_files
from .diffusion import DiffusionConfig, ks_exponential, simulate_diffusion
from .distributions import MixtureParams, sample_mixture
from .errors import ConvergenceError, LomaxMixError, NumericError
from .evolution import assess_model, compare_assessments
from .fitting import FitOptions, fit_zipf, select_model
from .gof import DEFAULT_THRESHOLD
from .serialize import load_histogram, load_params, load_report, write_json

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_CONVERGENCE = 2
EXIT_NUMERIC = 3

DEFAULT_SEED = 0


class InputError(Exception):
    pass


def _floats(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def cmd_ingest(args):
    for p in args.paths:
        if not Path(p).is_file():
            raise InputError(f"cannot read {p}")
    try:
        hist = ingest_files(args.paths, html=args.html)
    except OSError as exc:
        raise InputError(f"cannot read {exc.filename}: {exc.strerror}") from None
    write_json(args.output, hist.to_dict())
    print(f"types={hist.total_types} tokens={hist.total_tokens} distinct_k={len(hist)}")
    print(f"met once or twice: {hist.low_frequency_share(2):.1%} of word-forms")
    return EXIT_OK


def _fit_options(args):
    return FitOptions(seed=args.seed, restarts=args.restarts, threshold=args.threshold)


def cmd_fit(args):
    hist = load_histogram(args.hist)
    if args.model == "zipf":
        report = fit_zipf(hist, args.threshold)
        write_json(args.output, report.to_dict())
        print(report.table_row())
        return EXIT_OK
    sel = select_model(hist, args.max_m, args.alpha, _fit_options(args))
    write_json(args.output, sel.to_dict())
    for M in sorted(sel.reports):
        mark = "*" if M == sel.selected_M else " "
        print(mark, sel.reports[M].table_row())
    if sel.flagged:
        print(f"no M reached p >= {args.alpha}; selected the best p (M={sel.selected_M})")
    if not sel.selected.converged:
        print(f"error: M={sel.selected_M} fit did not converge; best-so-far written", file=sys.stderr)
        return EXIT_CONVERGENCE
    return EXIT_OK


def cmd_compare(args):
    hist = load_histogram(args.hist)
    sel = select_model(hist, args.max_m, args.alpha, _fit_options(args))
    write_json(args.output, sel.to_dict())
    print(f"{'model':<10}{'chi2':>14}{'dof':>8}{'p':>12}")
    rows = [("zipf", sel.zipf), (f"lomax M={sel.selected_M}", sel.selected)]
    for name, rep in rows:
        if rep is None:
            print(f"{name:<10}{'failed':>14}")
            continue
        print(f"{name:<10}{rep.chi_square:>14.2f}{rep.dof:>8d}{rep.p_value:>12.4g}")
    return EXIT_OK if sel.selected.converged else EXIT_CONVERGENCE


def _gen_params(args):
    if args.params:
        return load_params(args.params)
    if not (args.c and args.v and args.b):
        raise InputError("give --params FILE or all of --c, --v, --b")
    return MixtureParams.from_arrays(args.c, args.v, args.b)


def cmd_gen(args):
    params = _gen_params(args)
    samples = sample_mixture(params, args.n, seed=args.seed)
    hist = FrequencyHistogram.from_samples(samples, source=f"synthetic seed={args.seed}")
    write_json(args.output, hist.to_dict())
    print(f"types={hist.total_types} tokens={hist.total_tokens} distinct_k={len(hist)}")
    return EXIT_OK


def cmd_simulate(args):
    cfg = DiffusionConfig(
        N=args.n, rho=args.rho, mu=args.mu, theta=args.theta, a=args.a,
        sigma=args.sigma, dt=args.dt, burn_in=args.burn_in,
        n_samples=args.samples, sample_stride=args.stride, seed=args.seed,
    )
    res = simulate_diffusion(cfg)
    ks, n = ks_exponential(res.z_samples, res.lambda_theory)
    out = Path(args.output)
    csv_path = Path(args.samples_csv) if args.samples_csv else out.with_suffix(".csv")
    np.savetxt(csv_path, res.z_samples, fmt="%.17g")
    write_json(out, {
        "lambda_theory": res.lambda_theory,
        "lambda_empirical": res.lambda_empirical,
        "ks": ks,
        "n": n,
        "samples_file": str(csv_path),
    })
    print(f"lambda_theory={res.lambda_theory:.6g} lambda_empirical={res.lambda_empirical:.6g} ks={ks:.4f} n={n}")
    return EXIT_OK


def cmd_evolve(args):
    params = load_params(args.params)
    first = assess_model(params, args.z_fr, args.delta_zfr)
    data = first.to_dict()
    print(f"zbar={data['zbar']} delta_zbar={data['delta_zbar']} ({first.trend})")
    if args.against:
        second = assess_model(load_params(args.against), args.z_fr, args.delta_zfr)
        diff = compare_assessments(first, second)
        data = {"first": first.to_dict(), "second": second.to_dict(),
                "difference": "divergent" if diff is None else diff}
        print(f"other: zbar={second.to_dict()['zbar']} delta_zbar={second.to_dict()['delta_zbar']} ({second.trend})")
    write_json(args.output, data)
    return EXIT_OK


def cmd_plotdata(args):
    report = load_report(args.report)
    hist = load_histogram(args.hist)
    if report.sample_types != hist.total_types:
        raise InputError(
            f"report was fitted to {report.sample_types} word-forms, histogram has {hist.total_types}"
        )
    dist = report.distribution
    ks, ns = hist.arrays()
    obs_frac = ns / hist.total_types
    obs_cdf = np.cumsum(ns) / hist.total_types
    model_cdf = np.asarray(dist.cdf(ks), dtype=float)
    model_pmf = np.asarray(dist.pmf(ks), dtype=float)
    with open(args.output, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "observed_fraction", "model_pmf", "observed_cdf", "model_cdf"])
        for row in zip(ks.astype(np.int64), obs_frac, model_pmf, obs_cdf, model_cdf):
            writer.writerow([int(row[0])] + [repr(float(x)) for x in row[1:]])
    print(f"wrote {len(ks)} rows to {args.output}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="lomaxmix",
        description="Lomax-mixture and Zipf models of word-frequency data.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="tokenize files into a frequency histogram")
    p.add_argument("paths", nargs="+")
    p.add_argument("--html", action="store_true", help="strip HTML markup first")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_ingest)

    def fit_flags(p):
        p.add_argument("hist")
        p.add_argument("--max-m", type=int, default=3)
        p.add_argument("--alpha", type=float, default=0.01)
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        p.add_argument("--restarts", type=int, default=5)
        p.add_argument("--threshold", type=int, default=DEFAULT_THRESHOLD)
        p.add_argument("-o", "--output", required=True)

    p = sub.add_parser("fit", help="fit the zipf baseline or select a Lomax mixture")
    fit_flags(p)
    p.add_argument("--model", choices=("zipf", "mixture"), default="mixture")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("compare", help="fit both models and print a two-row summary")
    fit_flags(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("gen", help="sample a synthetic histogram from a Lomax mixture")
    p.add_argument("--params", help="mixture params, fit report or selection JSON")
    p.add_argument("--c", type=_floats)
    p.add_argument("--v", type=_floats)
    p.add_argument("--b", type=_floats)
    p.add_argument("-n", "--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("simulate", help="simulate the realization-rate diffusion")
    p.add_argument("--n", type=int, default=100, help="competing realizations N")
    p.add_argument("--rho", type=float, default=1.0)
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--theta", type=float, default=100.0)
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--sigma", type=float)
    p.add_argument("--dt", type=float)
    p.add_argument("--burn-in", type=int, default=10_000)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--stride", type=int)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--samples-csv")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("evolve", help="Price-equation assessment of a fitted mixture")
    p.add_argument("params", help="mixture params, fit report or selection JSON")
    p.add_argument("--z-fr", type=float, required=True)
    p.add_argument("--delta-zfr", type=float, default=0.0)
    p.add_argument("--against", help="second model to compare with")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("plotdata", help="CSV of observed vs model pmf and cdf")
    p.add_argument("report")
    p.add_argument("hist")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_plotdata)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except NumericError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (InputError, LomaxMixError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ArithmeticError, FloatingPointError) as exc:
        print(f"error: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
