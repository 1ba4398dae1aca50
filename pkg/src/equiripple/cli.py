"""Command-line entry point ``equiripple``.

Exit codes: 0 success, 1 construction error, 2 verification failure,
3 no family converged, 64 bad flags, 65 malformed band file, 66 missing file.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys

import numpy as np

from .bands import BandError, BandSystem, Mobius, normalize_bands
from .conformal import ConformalError
from .rational import FitError
from .solutions import (FAMILIES, PARAMS, DesignError, FilterSolution, _level_range,
                        classify, design, forward_construct)

EXIT_OK = 0
EXIT_CONSTRUCTION = 1
EXIT_VERIFY = 2
EXIT_NO_FAMILY = 3
EXIT_USAGE = 64
EXIT_DATA = 65
EXIT_NOINPUT = 66


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class MissingInput(Exception):
    pass


# ---------------------------------------------------------------------------
# JSON with 17 significant digits

def _encode(obj, out):
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            out.append("NaN")
        elif math.isinf(v):
            out.append("Infinity" if v > 0 else "-Infinity")
        else:
            text = format(v, ".17g")
            # keep integral values typed as floats on reload
            out.append(text if any(c in text for c in ".e") else text + ".0")
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        out.append("{")
        for i, (k, v) in enumerate(obj.items()):
            if i:
                out.append(", ")
            out.append(json.dumps(str(k)) + ": ")
            _encode(v, out)
        out.append("}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        out.append("[")
        for i, v in enumerate(obj):
            if i:
                out.append(", ")
            _encode(v, out)
        out.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    """JSON text with every float written to 17 significant digits."""
    out = []
    _encode(obj, out)
    return "".join(out)


def _write(text, path):
    if path in (None, "-"):
        sys.stdout.write(text + "\n")
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")


def _read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise MissingInput(f"no such file: {path}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid JSON ({exc})") from exc


# ---------------------------------------------------------------------------
# input parsing

def load_bands(path):
    """Bands file to ``BandSystem``; wrapping or charted input is normalized."""
    d = _read_json(path)
    try:
        raw = d["bands"]
        pairs = [tuple(float(v) for v in raw[k]) for k in ("e_minus", "e1_plus", "e2_plus")]
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"{path}: expected bands.e_minus/e1_plus/e2_plus pairs") from exc
    if any(len(p) != 2 for p in pairs) or not all(math.isfinite(v) for p in pairs for v in p):
        raise DataError(f"{path}: every band needs two finite endpoints")
    chart = d.get("chart")
    if chart is not None:
        try:
            mob = Mobius(*[float(v) for v in chart])
        except (TypeError, ValueError) as exc:
            raise DataError(f"{path}: chart must be four numbers a, b, c, d") from exc
        if not mob.det > 0:
            raise DataError(f"{path}: chart must preserve orientation")
        pairs = [tuple(mob(v) for v in p) for p in pairs]
        if not all(math.isfinite(v) for p in pairs for v in p):
            raise DataError(f"{path}: chart sends an endpoint to infinity")
    try:
        return BandSystem(*pairs)
    except BandError:
        pass
    try:
        bands, _ = normalize_bands(*pairs)
    except BandError as exc:
        raise DataError(f"{path}: bands overlap or are out of order ({exc})") from exc
    return bands


def _parse_sigma(text, n):
    try:
        sigma = tuple(int(v) for v in text.split(","))
    except ValueError as exc:
        raise UsageError("--sigma takes three integers a,b,c") from exc
    if len(sigma) != 3:
        raise UsageError("--sigma takes three integers a,b,c")
    if sum(sigma) % 2 != n % 2:
        raise UsageError(f"--sigma components must sum to n mod 2 (n={n})")
    return sigma


def _load_solution(path):
    d = _read_json(path)
    rec = d.get("solution", d) if isinstance(d, dict) else None
    try:
        return FilterSolution.from_dict(rec)
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise DataError(f"{path}: not a solution record") from exc


def _forward_args(args):
    fam = args.family
    n, m = args.n, args.m
    if n < 1:
        raise UsageError("--n must be a positive integer")
    if not args.t > 0:
        raise UsageError("--t must be positive")
    levels = _level_range(fam, n)
    if m not in levels:
        rng = f"{levels[0]}..{levels[-1]}" if levels else "empty"
        raise UsageError(f"--m={m} out of range for {fam} at n={n} (allowed: {rng})")
    extra = {}
    for name in PARAMS[fam][1:]:
        val = getattr(args, name)
        if val is None:
            raise UsageError(f"{fam} needs --{name.replace('_', '-')}")
        extra[name] = val
    return extra


# ---------------------------------------------------------------------------
# commands

def _verify(sol, bands, grid_density):
    from .verify import verify_solution

    return verify_solution(sol, bands, grid_density=grid_density)


def cmd_forward(args):
    extra = _forward_args(args)
    try:
        sol, bands = forward_construct(args.family, args.t, args.n, args.m, extra)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    report = _verify(sol, bands, args.grid_density)
    _write(dumps({"solution": sol.to_dict(), "bands": bands.to_dict(),
                  "verification": report.to_dict()}), args.out)
    return EXIT_OK if report.alternation_count == 2 * args.n + 2 else EXIT_VERIFY


def cmd_design(args):
    if args.bands is None or args.n is None or args.sigma is None:
        raise UsageError("design needs --bands, --n and --sigma")
    if args.n < 1:
        raise UsageError("--n must be a positive integer")
    sigma = _parse_sigma(args.sigma, args.n)
    bands = load_bands(args.bands)
    if not classify(bands, args.n, sigma):
        _write(dumps({"error": f"no family realizes class {list(sigma)} at n={args.n}"}), args.out)
        return EXIT_NO_FAMILY
    try:
        sol = design(bands, args.n, sigma)
    except DesignError as exc:
        _write(dumps({"error": str(exc), "residuals": {k: (v if isinstance(v, str) else float(v))
                                                       for k, v in exc.residuals.items()}}), args.out)
        return EXIT_NO_FAMILY
    report = _verify(sol, bands, args.grid_density)
    _write(dumps({"family": sol.family, "m": sol.m, "params": sol.params,
                  "solution": sol.to_dict(), "bands": bands.to_dict(),
                  "verification": report.to_dict()}), args.out)
    return EXIT_OK if report.alternation_count == 2 * args.n + 2 else EXIT_VERIFY


def cmd_verify(args):
    if args.solution is None:
        raise UsageError("verify needs a solution file")
    sol = _load_solution(args.solution)
    bands = load_bands(args.bands) if args.bands else sol.user_bands
    report = _verify(sol, bands, args.grid_density)
    _write(dumps({"family": sol.family, "n": sol.n, "verification": report.to_dict()}), args.out)
    return EXIT_OK if report.alternation_count == 2 * sol.n + 2 else EXIT_VERIFY


def cmd_oracle(args):
    from .oracle import GridProblem, differential_correction, validate_against

    sol = _load_solution(args.solution) if args.solution else None
    if args.bands:
        bands = load_bands(args.bands)
    elif sol is not None:
        bands = sol.user_bands
    else:
        raise UsageError("oracle needs --bands or a solution file")
    n = args.n if args.n is not None else (sol.n if sol is not None else None)
    if n is None or not 0 <= n <= 6:
        raise UsageError("oracle needs --n between 0 and 6")
    per_band = args.count if args.count else None
    if per_band is not None and per_band < 8 * (n + 1):
        raise UsageError(f"--count must be at least {8 * (n + 1)} points per band")
    if sol is not None:
        if n > 4:
            raise UsageError("oracle comparison supports n <= 4")
        cmp = validate_against(sol, bands, n, per_band=per_band)
        _write(dumps({"n": n, "comparison": cmp.to_dict()}), args.out)
        return EXIT_OK if cmp.consistent and cmp.local_opt else EXIT_VERIFY
    res = differential_correction(GridProblem.from_band_system(bands, n, per_band))
    _write(dumps({"n": n, "mu_grid": res.mu_grid, "deltas": res.deltas,
                  "converged": res.converged, "rational": res.rational.to_dict()}), args.out)
    return EXIT_OK if res.converged else EXIT_VERIFY


def sample_rows(sol, count):
    """``(x, R, S_E, in_band)`` rows over the bands plus a 20% margin on each side."""
    bands = sol.user_bands
    p = bands.endpoints
    width = p[-1] - p[0]
    x = np.linspace(p[0] - 0.2 * width, p[-1] + 0.2 * width, count)
    r = np.asarray(sol.approximant(x), dtype=float)
    s = bands.indicator(x)
    rows = []
    for xi, ri, si in zip(x, r, s):
        rows.append((float(xi), float(ri) if math.isfinite(ri) else None,
                     None if math.isnan(si) else float(si), not math.isnan(si)))
    return rows


def cmd_samples(args):
    if args.solution is None:
        raise UsageError("samples needs a solution file")
    if args.count < 2:
        raise UsageError("--count must be at least 2")
    sol = _load_solution(args.solution)
    rows = sample_rows(sol, args.count)
    fh = sys.stdout if args.out in (None, "-") else open(args.out, "w", newline="", encoding="utf-8")
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "R", "S_E", "in_band"])
        fmt = lambda v: "" if v is None else format(v, ".17g")
        for x, r, s, ib in rows:
            w.writerow([fmt(x), fmt(r), fmt(s), int(ib)])
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    p = _Parser(prog="equiripple", description="Three-band equiripple rational approximation.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def common(sp):
        sp.add_argument("--out", help="output file (default stdout)")
        sp.add_argument("--grid-density", type=int, default=64, help="points per band for verification")

    fw = sub.add_parser("forward", help="construct a solution from polygon parameters")
    fw.add_argument("--family", required=True, choices=FAMILIES)
    fw.add_argument("--t", type=float, required=True)
    fw.add_argument("--n", type=int, required=True)
    fw.add_argument("--m", type=int, required=True)
    for name in ("h", "h1", "h2", "v", "v1", "v2"):
        fw.add_argument(f"--{name}", type=float)
    fw.add_argument("--c-re", dest="c_re", type=float)
    fw.add_argument("--c-im", dest="c_im", type=float)
    common(fw)

    ds = sub.add_parser("design", help="find a solution for given bands")
    ds.add_argument("--bands", required=True)
    ds.add_argument("--n", type=int, required=True)
    ds.add_argument("--sigma", required=True, help="topological class a,b,c")
    common(ds)

    vf = sub.add_parser("verify", help="certify a stored solution")
    vf.add_argument("solution")
    vf.add_argument("--bands")
    common(vf)

    oc = sub.add_parser("oracle", help="grid minimax by differential correction")
    oc.add_argument("solution", nargs="?")
    oc.add_argument("--bands")
    oc.add_argument("--n", type=int)
    oc.add_argument("--count", type=int, help="grid points per band")
    common(oc)

    sm = sub.add_parser("samples", help="CSV samples of a stored solution")
    sm.add_argument("solution")
    sm.add_argument("--count", type=int, default=400)
    sm.add_argument("--out")
    return p


_COMMANDS = {"forward": cmd_forward, "design": cmd_design, "verify": cmd_verify,
             "oracle": cmd_oracle, "samples": cmd_samples}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("choose a command: " + ", ".join(_COMMANDS))
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        sys.stderr.write(parser.format_usage() + f"equiripple: error: {exc}\n")
        return EXIT_USAGE
    except DataError as exc:
        sys.stderr.write(f"equiripple: {exc}\n")
        return EXIT_DATA
    except MissingInput as exc:
        sys.stderr.write(f"equiripple: {exc}\n")
        return EXIT_NOINPUT
    except (ConformalError, FitError, BandError, FloatingPointError, ArithmeticError) as exc:
        sys.stderr.write(f"equiripple: construction failed: {exc}\n")
        return EXIT_CONSTRUCTION


if __name__ == "__main__":
    sys.exit(main())
