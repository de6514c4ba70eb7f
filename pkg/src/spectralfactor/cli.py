"""Command-line interface.

    spectralfactor <subcommand> [--config FILE] [options]

Subcommands are ``factor``, ``wiener``, ``approx``, ``rate``, ``probe``,
``simulate`` and ``pipeline``.  A JSON configuration file supplies defaults
and flags override it.  Each run writes one JSON report into ``--out``.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

from .models import BUILTINS
from .pipeline import EXIT_USAGE, REPORT_NAMES, SUBCOMMANDS, ConfigError, load_config, run

__all__ = ["build_parser", "main"]

_HELP = {
    "factor": "outer function, spectral factors and whitening filter",
    "wiener": "causal Wiener filter and Toeplitz reference MMSE",
    "approx": "polynomial approximants of a causal filter",
    "rate": "approximation-rate sweep and power-law fit",
    "probe": "radial traces of v and gamma_plus near the boundary",
    "simulate": "simulated sample paths, periodogram and whiteness checks",
    "pipeline": "factor, wiener, approx, simulate and Monte Carlo MSE checks",
}


def _int_list(text: str) -> List[int]:
    try:
        return [int(t) for t in text.replace(" ", "").split(",") if t]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text: str) -> List[float]:
    try:
        return [float(t) for t in text.replace(" ", "").split(",") if t]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _param(text: str):
    key, sep, value = text.partition("=")
    if not sep or not key:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    try:
        return key, json.loads(value)
    except json.JSONDecodeError:
        return key, value


def _common(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("input")
    g.add_argument("--config", help="JSON file with default settings")
    g.add_argument("--model", choices=sorted(BUILTINS), help="builtin model name")
    g.add_argument("--param", action="append", type=_param, default=[], metavar="KEY=VALUE",
                   help="model parameter (repeatable); values are parsed as JSON when possible")
    g.add_argument("--cosine", type=_float_list, metavar="A0,A1,...",
                   help="density a0 + 2*sum_k a_k cos(k omega)")
    g.add_argument("--boundary", metavar="CSV", help="density samples as omega,re,im")
    g.add_argument("--cross", metavar="CSV", help="cross-spectrum samples as omega,re,im")
    g.add_argument("--rx0", type=float, help="variance of the desired signal (with --cross)")
    g = p.add_argument_group("numerics")
    g.add_argument("--M", type=int, help="grid size, a power of two")
    g.add_argument("--K", type=int, help="FIR truncation degree")
    g.add_argument("--tol-recon", dest="tol_recon", type=float)
    g.add_argument("--tol-causal", dest="tol_causal", type=float)
    g.add_argument("--delta-min", dest="delta_min", type=float)
    p.add_argument("--seed", type=int, help="generator seed")
    p.add_argument("--out", help="output directory (default ./out)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spectralfactor",
        description="Spectral factorization, causal Wiener filtering and FIR approximation.",
    )
    sub = parser.add_subparsers(dest="subcommand", metavar="SUBCOMMAND", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name, help=_HELP[name], description=_HELP[name])
        _common(p)
        if name in ("approx", "rate", "pipeline"):
            p.add_argument("--N", type=_int_list, metavar="N1,N2,...", help="approximant parameters")
            p.add_argument("--kind", choices=["fejer", "vp", "vallee_poussin", "trunc", "truncation"])
        if name in ("approx", "rate"):
            p.add_argument("--floor", type=float, help="error floor excluded from rate fits")
        else:
            p.add_argument("--floor", dest="density_floor", type=float, metavar="EPS",
                           help="add EPS to the density before factorizing (recorded in the report)")
        if name in ("approx", "rate"):
            p.add_argument("--series", metavar="CSV", help="causal series k,re,im to approximate")
            p.add_argument("--target", choices=["H", "HW", "HE"], help="filter to approximate")
        if name == "probe":
            p.add_argument("--radii", type=_float_list, metavar="R1,R2,...")
            p.add_argument("--theta", type=_float_list, metavar="T1,T2,...")
            p.add_argument("--terms", type=int, help="terms of the pathological series")
            p.add_argument("--construction", choices=["slow_log_modulus", "lacunary_log"])
            p.add_argument("--kind", dest="probe_kind", choices=["outer", "gamma", "both"],
                           help="which radial probe to run (default both)")
        if name in ("simulate", "pipeline"):
            p.add_argument("--n", type=int, help="samples per replica")
            p.add_argument("--replicas", type=int, help="independent replicas")
        if name == "pipeline":
            p.add_argument("--oracle-L", dest="oracle_L", type=int, help="Toeplitz reference length")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    opts = vars(args)
    path = opts.pop("config")
    params = dict(opts.pop("param"))
    opts["params"] = params
    try:
        cfg = load_config(path, opts)
    except ConfigError as exc:
        print(f"spectralfactor: {exc}", file=sys.stderr)
        return EXIT_USAGE
    code = run(cfg)
    report = f"{cfg.out}/{REPORT_NAMES[cfg.subcommand]}"
    status = {0: "ok", 1: "check failed", 2: "usage error", 3: "numerical diagnostic"}[code]
    print(f"{cfg.subcommand}: {status} ({report})", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
