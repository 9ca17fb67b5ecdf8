"""
Command-line interface.

    heomkit run <config> [--out DIR] [--jobs N] [--serial]
    heomkit fit <data.csv> --mode {spectral,correlation} --terms K
                [--terms-imag K2] [--out FILE]
    heomkit decompose --bath {dl,underdamped,lorentzian}
                --method {matsubara,pade} --n K key=value ...

``fit`` expects two columns (omega, J) in spectral mode or three columns
(t, Re C, Im C) in correlation mode.  ``decompose`` prints the coefficient
table of the requested expansion; bath parameters are passed as
``key=value`` pairs (dl: lam gamma beta; underdamped: alpha width w0 beta;
lorentzian: eta width mu beta).
"""

import argparse
import json
import sys

import numpy as np

from .baths import matsubara_drude_lorentz, matsubara_underdamped, pade_drude_lorentz
from .config import load_config
from .fermionic import pade_lorentzian_bath
from .fitting import fit_correlation, fit_spectral_meier_tannor
from .scenarios import run_scenario

__all__ = ["main"]


def _cmd_run(args):
    cfg = load_config(args.config)
    jobs = 1 if args.serial else args.jobs
    csv_path, meta_path = run_scenario(cfg, out_dir=args.out, jobs=jobs)
    print(csv_path)
    print(meta_path)
    return 0


def _cmd_fit(args):
    data = np.loadtxt(args.data, delimiter=",", skiprows=args.skip_header)
    if args.mode == "spectral":
        if data.shape[1] < 2:
            raise SystemExit("spectral mode needs columns: omega, J")
        fit = fit_spectral_meier_tannor(data[:, 0], data[:, 1], args.terms)
        payload = {
            "mode": "spectral",
            "terms": [
                {"alpha": a, "width_half": g, "resonance": w} for a, g, w in fit.terms
            ],
            "rms_residual": fit.rms_residual,
        }
    else:
        if data.shape[1] < 3:
            raise SystemExit("correlation mode needs columns: t, Re C, Im C")
        values = data[:, 1] + 1j * data[:, 2]
        k_imag = args.terms if args.terms_imag is None else args.terms_imag
        fit = fit_correlation(data[:, 0], values, args.terms, k_imag)
        payload = {
            "mode": "correlation",
            "real_terms": [
                {"coeff": c, "rate": g, "freq": w} for c, g, w in fit.real_terms
            ],
            "imag_terms": [
                {"coeff": c, "rate": g, "freq": w} for c, g, w in fit.imag_terms
            ],
            "rms_residual_real": fit.rms_residual_real,
            "rms_residual_imag": fit.rms_residual_imag,
        }
    text = json.dumps(payload, indent=2)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text + "\n")
    print(text)
    return 0


def _parse_params(pairs):
    out = {}
    for pair in pairs:
        if "=" not in pair:
            raise SystemExit(f"expected key=value, got {pair!r}")
        key, _, value = pair.partition("=")
        out[key.strip()] = float(value)
    return out


def _print_terms(terms):
    print(f"{'kind':>4}  {'coeff':>24}  {'coeff2':>24}  {'rate':>24}")
    for term in terms:
        c2 = "" if term.coeff2 is None else f"{term.coeff2:.12g}"
        print(f"{term.kind:>4}  {term.coeff:>24.12g}  {c2:>24}  {term.rate:>24.12g}")


def _cmd_decompose(args):
    params = _parse_params(args.params)
    n = args.n
    if args.bath == "dl":
        lam, gamma, beta = params["lam"], params["gamma"], params["beta"]
        if args.method == "matsubara":
            terms, gamma_t = matsubara_drude_lorentz(lam, gamma, beta, n)
            _print_terms(terms)
            print(f"terminator residue: {gamma_t:.12g}")
        else:
            _print_terms(pade_drude_lorentz(lam, gamma, beta, n))
    elif args.bath == "underdamped":
        if args.method != "matsubara":
            raise SystemExit("underdamped baths support --method matsubara only")
        terms = matsubara_underdamped(
            params["alpha"], params["width"], params["w0"], params["beta"], n
        )
        _print_terms(terms)
    else:
        if args.method != "pade":
            raise SystemExit("lorentzian reservoirs support --method pade only")
        coupling = np.array([[0.0, 1.0], [0.0, 0.0]])
        bath = pade_lorentzian_bath(
            params["eta"], params["width"], params["mu"], params["beta"], n, coupling
        )
        print(f"{'sigma':>5}  {'eta':>26}  {'rate':>26}")
        for sigma, pairs in (("+", bath.plus_terms), ("-", bath.minus_terms)):
            for eta_l, gamma_l in pairs:
                print(f"{sigma:>5}  {eta_l:>26.12g}  {gamma_l:>26.12g}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="heomkit",
        description="Hierarchical-equations-of-motion experiment runner",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario configuration")
    p_run.add_argument("config")
    p_run.add_argument("--out", default=".", help="output directory")
    p_run.add_argument("--jobs", type=int, default=1, help="parallel sweep workers")
    p_run.add_argument("--serial", action="store_true", help="force serial execution")
    p_run.set_defaults(func=_cmd_run)

    p_fit = sub.add_parser("fit", help="fit bath data from a CSV file")
    p_fit.add_argument("data")
    p_fit.add_argument("--mode", choices=("spectral", "correlation"), required=True)
    p_fit.add_argument("--terms", type=int, required=True)
    p_fit.add_argument("--terms-imag", type=int, default=None)
    p_fit.add_argument("--skip-header", type=int, default=0)
    p_fit.add_argument("--out", default=None)
    p_fit.set_defaults(func=_cmd_fit)

    p_dec = sub.add_parser("decompose", help="print a bath coefficient table")
    p_dec.add_argument("--bath", choices=("dl", "underdamped", "lorentzian"), required=True)
    p_dec.add_argument("--method", choices=("matsubara", "pade"), required=True)
    p_dec.add_argument("--n", type=int, required=True)
    p_dec.add_argument("params", nargs="+", help="bath parameters as key=value")
    p_dec.set_defaults(func=_cmd_decompose)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, FileNotFoundError, RuntimeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
