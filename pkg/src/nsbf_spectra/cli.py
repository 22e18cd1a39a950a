"""Command-line front end: ``nsbf-spectra forward | complete | invert``.

Exit codes: 0 success, 2 bad input, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from .completion import complete
from .errors import InputError, NumericalError
from .forward import (TARGET_ACCURACY, BoundaryCondition, PotentialModel, eigenvalues,
                      omega_of, potential)
from .inverse import invert_two_spectra, roundtrip_spectra
from .io import EigenvalueFile, PotentialFile, table_text, write_json, write_table

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3


def load_potential(spec: str) -> PotentialModel:
    """Builtin name, ``const(c)``, or the path of an ``x,q`` file."""
    path = Path(spec)
    if path.suffix and path.is_file():
        f = PotentialFile.read(path)
        return PotentialModel.from_table(f.x, f.q, path.stem)
    return potential(spec)


def _bc(problem: str, h, H) -> BoundaryCondition:
    if problem == "robin":
        if h is None or H is None:
            raise InputError("--problem robin needs both --h and --H")
        return BoundaryCondition.robin(h, H)
    if h is not None or H is not None:
        raise InputError("--h/--H only apply to --problem robin")
    return BoundaryCondition.dd() if problem == "dd" else BoundaryCondition.dn()


def cmd_forward(args) -> int:
    q = load_potential(args.potential)
    bc = _bc(args.problem, args.h, args.H)
    if args.count < 1:
        raise InputError("--count must be positive")
    spec = eigenvalues(q, bc, args.count)
    out = EigenvalueFile.from_spectrum(spec, potential=args.potential, tolerance=TARGET_ACCURACY)
    _emit(out.to_text(str(args.out or "").lower().endswith(".json")), args.out, out.write)
    return EXIT_OK


def _emit(text, path, writer):
    if path:
        writer(path)
    else:
        sys.stdout.write(text)


def cmd_complete(args) -> int:
    f = EigenvalueFile.read(args.inp)
    given = f.spectrum()
    rep = complete(given, args.num_coeffs, args.up_to, args.regularize)
    ks = rep.completed_indices
    lam = rep.completed_eigenvalues
    with np.errstate(invalid="ignore"):
        cols = [ks, lam, np.sqrt(lam)]
    header = ["k", "lambda", "sqrt_lambda"]
    report = {
        "problem": f.problem,
        "given": len(given),
        "N": rep.approximant.N,
        "coefficients": rep.approximant.coeffs,
        "shift": rep.approximant.shift,
        "lsq_residual_norm": rep.lsq_residual_norm,
        "condition": rep.condition,
        "slots": {"ok": int(sum(s == "ok" for s in rep.per_slot_status)),
                  "failed": [[int(k), s] for k, s in zip(ks, rep.per_slot_status) if s != "ok"]},
    }
    if rep.omega_estimate is not None:
        report["omega_estimate"] = rep.omega_estimate
    report.update({k: v for k, v in rep.extras.items()})
    if args.oracle:
        q = load_potential(args.oracle)
        bc = given.bc
        if bc.kind == "Robin" and not {"h", "H"} <= set(f.metadata):
            raise InputError("--oracle for a Robin file needs h and H in its metadata")
        ref = eigenvalues(q, bc, ks.size, int(ks[0])).eigenvalues if ks.size else np.zeros(0)
        with np.errstate(invalid="ignore"):
            cols += [ref, np.abs(lam - ref), np.abs(np.sqrt(lam) - np.sqrt(ref))]
        header += ["lambda_oracle", "lambda_error", "sqrt_lambda_error"]
        om = omega_of(q)
        oracle = {"potential": args.oracle, "omega": om}
        if bc.kind == "DN":
            oracle["omega_error"] = rep.omega_estimate - om
        elif bc.kind == "Robin":
            target = bc.h + bc.H + om - 0.5 * math.pi * given.eigenvalues[0]
            oracle["omega_bar_shifted"] = target
            oracle["omega_bar_error"] = rep.omega_estimate - target
        if ks.size:
            oracle["max_sqrt_lambda_error"] = float(np.nanmax(cols[-1])) if np.any(
                np.isfinite(cols[-1])) else math.nan
        report["oracle"] = oracle
    _emit(table_text(header, cols), args.out, lambda path: write_table(path, header, cols))
    if args.report:
        write_json(args.report, report)
    failed = report["slots"]["failed"]
    if failed:
        print(f"error: zero search failed on {len(failed)} slot(s): {failed[:5]}",
              file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_invert(args) -> int:
    dd = EigenvalueFile.read(args.dd).spectrum()
    dn = EigenvalueFile.read(args.dn).spectrum()
    if dd.bc.kind != "DD" or dn.bc.kind != "DN":
        raise InputError("--dd needs a dd file and --dn a dn file")
    sol = invert_two_spectra(dd, dn, N=args.N, Nc=args.num_coeffs, complete_to=args.complete_to,
                             M=args.grid, merge=args.merge)
    x, q = sol.potential_table()
    out = PotentialFile(x, q)
    _emit(out.to_text(), args.out, out.write)
    if args.residuals:
        got_dd, got_dn = roundtrip_spectra(sol, dd, dn)
        problem, ks, given, got = [], [], [], []
        for tag, s, g in (("dd", dd, got_dd), ("dn", dn, got_dn)):
            problem += [tag] * len(s)
            ks += [int(k) for k in s.indices]
            given.append(s.eigenvalues)
            got.append(g.eigenvalues)
        given, got = np.concatenate(given), np.concatenate(got)
        write_table(args.residuals, ["problem", "k", "lambda_given", "lambda_recovered",
                                     "relative_residual"],
                    [problem, ks, given, got, np.abs(got - given) / np.abs(given)])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nsbf-spectra",
                                description="Sturm-Liouville spectra via Neumann series of Bessel functions.")
    sub = p.add_subparsers(dest="command", required=True)

    f = sub.add_parser("forward", help="compute eigenvalues of a known potential")
    f.add_argument("--potential", required=True,
                   help="zero, const(c), exp, paine2, abs1, or a path to an x,q file")
    f.add_argument("--problem", required=True, choices=["dd", "dn", "robin"])
    f.add_argument("--h", type=float, help="Robin constant at x = 0")
    f.add_argument("--H", type=float, help="Robin constant at x = pi")
    f.add_argument("--count", type=int, required=True)
    f.add_argument("--out", help="output file (.csv or .json); stdout if omitted")
    f.set_defaults(func=cmd_forward)

    c = sub.add_parser("complete", help="extend a short list of eigenvalues")
    c.add_argument("--in", dest="inp", required=True, help="eigenvalue file")
    c.add_argument("--num-coeffs", type=int, help="number N of NSBF coefficients (default: maximum)")
    c.add_argument("--up-to", type=int, required=True, help="last index to compute")
    c.add_argument("--out", help="CSV output; stdout if omitted")
    c.add_argument("--report", help="JSON report with coefficients and diagnostics")
    c.add_argument("--oracle", help="potential used to add reference error columns")
    c.add_argument("--regularize", action="store_true",
                   help="truncate tiny singular values instead of rejecting the system")
    c.set_defaults(func=cmd_complete)

    i = sub.add_parser("invert", help="recover q from DD and DN eigenvalues")
    i.add_argument("--dd", required=True)
    i.add_argument("--dn", required=True)
    i.add_argument("--num-coeffs", type=int, default=9, help="Nc, coefficients per grid point")
    i.add_argument("--N", type=int, help="NSBF coefficients used in the completion step")
    i.add_argument("--complete-to", type=int, default=100, help="total DN eigenvalues used")
    i.add_argument("--grid", type=int, default=200, help="number of interior grid points")
    i.add_argument("--merge", choices=["split", "s", "tau"], default="split")
    i.add_argument("--out", help="x,q output file; stdout if omitted")
    i.add_argument("--residuals", help="CSV of round-trip residuals")
    i.set_defaults(func=cmd_invert)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
