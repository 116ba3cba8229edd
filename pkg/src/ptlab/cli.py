"""Command line interface: ``ptlab <subcommand> ...``.

Exit codes: 0 on success, 2 for an invalid configuration, 3 when a sampler
or eigensolver fails.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .ensembles import SamplingError, make_stream
from .experiments import (
    ConfigError,
    NumericalError,
    ScanConfig,
    canonical_ensemble,
    figure1_reproduction,
    marchenko_pastur_baseline,
    ppt_scan,
    report_json,
    sample_state,
    sampler_validation,
    semicircle_experiment,
    write_histogram_csv,
    write_scan_csv,
)
from .geometry import (
    DEFAULT_PRECISION,
    DEFAULT_RESTARTS,
    mean_width_polar_2x2,
    mean_width_separable,
    mean_width_states,
    threshold_s0_estimate,
)

log = logging.getLogger("ptlab")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3

ENSEMBLE_CHOICES = ("wishart", "trace", "mixture")


def parse_s_values(text: str) -> list[int]:
    """``"300,340,380"`` or an inclusive range ``"300:500:40"``."""
    try:
        if ":" in text:
            parts = [int(p) for p in text.split(":")]
            if len(parts) == 2:
                parts.append(1)
            a, b, step = parts
            if step < 1:
                raise ValueError
            return list(range(a, b + 1, step))
        return [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise ConfigError(f"cannot parse s values {text!r}") from None


def _u64(text):
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError(f"seed must be a 64-bit unsigned integer: {text}")
    return v


def _write_json(path, obj):
    Path(path).write_text(report_json(obj))


def cmd_sample(args):
    if args.d1 * args.d2 != args.n:
        raise ConfigError(f"d1*d2 = {args.d1 * args.d2} does not equal n = {args.n}")
    ensemble = canonical_ensemble(args.ensemble)
    rho = sample_state(ensemble, args.n, args.s, (args.d1, args.d2), make_stream(args.seed, 0))
    out = Path(args.out)
    if out.suffix == ".npy":
        np.save(out, rho.matrix)
    else:
        _write_json(out, {
            "artifact_version": __version__,
            "n": args.n, "s": args.s, "d1": args.d1, "d2": args.d2,
            "ensemble": ensemble, "seed": args.seed,
            "real": rho.matrix.real.tolist(),
            "imag": rho.matrix.imag.tolist(),
        })


def cmd_ppt_scan(args):
    cfg = ScanConfig(d=args.d, s_values=parse_s_values(args.s), trials=args.trials,
                     seed=args.seed, ensemble=args.ensemble, tol=args.tol)
    records = ppt_scan(cfg, workers=args.workers)
    write_scan_csv(records, args.out)


def cmd_semicircle(args):
    rep = semicircle_experiment(args.d, args.s, args.ensemble, args.seed, bins=args.bins)
    _write_json(args.out, rep.to_dict())
    if args.hist_csv:
        write_histogram_csv(rep.histogram, args.hist_csv)


def cmd_mp_baseline(args):
    rep = marchenko_pastur_baseline(args.d, args.s, args.seed, bins=args.bins)
    _write_json(args.out, rep.to_dict())


def cmd_figure1(args):
    figure1_reproduction(args.seed, args.outdir)


def cmd_mean_width(args):
    if args.d != 2:
        raise ConfigError("mean-width is only available for d = 2")
    sep = mean_width_separable(args.d, args.dirs, args.restarts, args.seed)
    polar = mean_width_polar_2x2(args.dirs, args.precision, args.seed)
    states = mean_width_states(args.d, args.dirs, args.seed)
    s0, s0_err = threshold_s0_estimate(polar)
    product = sep.mean * polar.mean
    product_err = float(np.hypot(sep.mean * polar.stderr, polar.mean * sep.stderr))
    _write_json(args.out, {
        "artifact_version": __version__,
        "d": args.d, "dirs": args.dirs, "restarts": args.restarts,
        "precision": args.precision, "seed": args.seed,
        "width_separable": sep.mean, "width_separable_stderr": sep.stderr,
        "restart_agreement": sep.diagnostics["restart_agreement"],
        "width_polar": polar.mean, "width_polar_stderr": polar.stderr,
        "width_states": states.mean, "width_states_stderr": states.stderr,
        "width_product": product, "width_product_stderr": product_err,
        "s0_estimate": s0, "s0_stderr": s0_err,
    })


def cmd_validate_sampler(args):
    _write_json(args.out, sampler_validation(args.n, args.s, args.samples, args.seed))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ptlab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"ptlab {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("sample", help="draw one random state")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--s", type=int, required=True)
    q.add_argument("--d1", type=int, required=True)
    q.add_argument("--d2", type=int, required=True)
    q.add_argument("--ensemble", choices=ENSEMBLE_CHOICES, default="wishart")
    q.add_argument("--seed", type=_u64, default=0)
    q.add_argument("--out", required=True, help=".npy for binary, anything else for JSON")
    q.set_defaults(func=cmd_sample)

    q = sub.add_parser("ppt-scan", help="Monte Carlo P(PPT) versus s")
    q.add_argument("--d", type=int, required=True)
    q.add_argument("--s", required=True, help="comma list or inclusive range a:b:step")
    q.add_argument("--trials", type=int, required=True)
    q.add_argument("--seed", type=_u64, default=0)
    q.add_argument("--ensemble", choices=ENSEMBLE_CHOICES, default="wishart")
    q.add_argument("--tol", type=float, default=1e-10)
    q.add_argument("--workers", type=int, default=1)
    q.add_argument("--out", required=True)
    q.set_defaults(func=cmd_ppt_scan)

    q = sub.add_parser("semicircle", help="spectrum of d^2 rho^Gamma against SC(1, 1/alpha)")
    q.add_argument("--d", type=int, required=True)
    q.add_argument("--s", type=int, required=True)
    q.add_argument("--ensemble", choices=ENSEMBLE_CHOICES, default="wishart")
    q.add_argument("--seed", type=_u64, default=0)
    q.add_argument("--bins", type=int, default=60)
    q.add_argument("--out", required=True)
    q.add_argument("--hist-csv")
    q.set_defaults(func=cmd_semicircle)

    q = sub.add_parser("mp-baseline", help="spectrum of d^2 rho against MP(alpha)")
    q.add_argument("--d", type=int, required=True)
    q.add_argument("--s", type=int, required=True)
    q.add_argument("--seed", type=_u64, default=0)
    q.add_argument("--bins", type=int, default=60)
    q.add_argument("--out", required=True)
    q.set_defaults(func=cmd_mp_baseline)

    q = sub.add_parser("figure1", help="eigenvalue histograms at d=50, alpha=1 and 4")
    q.add_argument("--seed", type=_u64, default=0)
    q.add_argument("--outdir", required=True)
    q.set_defaults(func=cmd_figure1)

    q = sub.add_parser("mean-width", help="mean widths of the separable set and its polar")
    q.add_argument("--d", type=int, default=2)
    q.add_argument("--dirs", type=int, required=True)
    q.add_argument("--restarts", type=int, default=DEFAULT_RESTARTS)
    q.add_argument("--precision", type=float, default=DEFAULT_PRECISION)
    q.add_argument("--seed", type=_u64, default=0)
    q.add_argument("--out", required=True)
    q.set_defaults(func=cmd_mean_width)

    q = sub.add_parser("validate-sampler", help="cross-check the induced-state samplers")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--s", type=int, required=True)
    q.add_argument("--samples", type=int, default=2000)
    q.add_argument("--seed", type=_u64, default=0)
    q.add_argument("--out", required=True)
    q.set_defaults(func=cmd_validate_sampler)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except (ConfigError, ValueError) as exc:
        log.error("invalid configuration: %s", exc)
        return EXIT_CONFIG
    except (NumericalError, SamplingError, ArithmeticError, np.linalg.LinAlgError) as exc:
        log.error("numerical failure: %s", exc)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
