"""Batch driver: ``saddlekit <command> [--config FILE] [--key value ...]``.

A config file holds ``key = value`` lines (``#`` starts a comment); flags
given on the command line win. Exit codes: 0 success, 1 a verification or
limit check failed, 2 usage or input error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .errors import SaddleKitError
from .jets import ComplexJet, SaddleModel, constant_jet, monomial_jet, read_jet

STAMP = f"saddlekit {__version__}"


class UsageError(Exception):
    pass


# value parsers

def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"not a rational number: {text!r}") from exc


def _int(text: str) -> int:
    try:
        return int(text)
    except ValueError as exc:
        raise UsageError(f"not an integer: {text!r}") from exc


def _float(text: str) -> float:
    try:
        return float(text)
    except ValueError as exc:
        raise UsageError(f"not a number: {text!r}") from exc


def _int_list(text: str) -> list[int]:
    """'3', '0,2,5' or the inclusive range '0..5'."""
    text = text.strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(_int(lo), _int(hi) + 1))
    return [_int(t) for t in text.split(",") if t.strip()]


def _float_list(text: str) -> list[float]:
    """'0.1,0.01' or 'geom:start:stop:count'."""
    text = text.strip()
    if text.startswith("geom:"):
        parts = text.split(":")
        if len(parts) != 4:
            raise UsageError("geometric grids are written geom:start:stop:count")
        return [float(x) for x in np.geomspace(_float(parts[1]), _float(parts[2]), _int(parts[3]))]
    return [_float(t) for t in text.split(",") if t.strip()]


def _jet(text: str) -> ComplexJet:
    """'const' (or a number), 'monomial:i,j', or a path to a jet file."""
    text = text.strip()
    if text == "const":
        return constant_jet(1.0)
    if text.startswith("monomial:"):
        i, j = _int_list(text.split(":", 1)[1])
        return monomial_jet(i, j)
    try:
        return constant_jet(complex(text))
    except ValueError:
        pass
    try:
        return read_jet(text)
    except OSError as exc:
        raise UsageError(f"cannot read jet file {text!r}: {exc}") from exc


# command table: name -> {key: (parser, default or REQUIRED, help)}
REQUIRED = object()

COMMANDS = {
    "beta": {
        "x": (_fraction, REQUIRED, "first argument (rational, e.g. 1/2)"),
        "y": (_fraction, REQUIRED, "second argument"),
    },
    "dist": {
        "m": (_int, REQUIRED, "saddle multiplicity"),
        "k": (_int, REQUIRED, "degree"),
        "jet": (_jet, REQUIRED, "jet: const, monomial:i,j or a jet file"),
        "which": (str, "scriptC", "partial | scriptC | scriptC_direct"),
        "l": (_int_list, None, "sector indices (scriptC), e.g. 0..5"),
        "j": (_int_list, None, "indices for partial, default 0..min(k, m-1)"),
    },
    "gfun": {
        "m": (_int, REQUIRED, "saddle multiplicity"),
        "l": (_int, 0, "branch index"),
        "a1": (_int, REQUIRED, "first exponent"),
        "a2": (_int, REQUIRED, "second exponent"),
        "u": (_float, 1.0, "upper limit in [-1, 1]"),
        "s": (_float_list, REQUIRED, "heights: list or geom:start:stop:count"),
        "policy": (str, "sinh-substitution", "sinh-substitution | graded-subdivision"),
    },
    "phi": {
        "m": (_int, REQUIRED, "saddle multiplicity"),
        "l": (_int, 0, "branch index"),
        "f": (_jet, "const", "jet of f"),
        "s": (_float_list, REQUIRED, "heights: list or geom:start:stop:count"),
        "policy": (str, "sinh-substitution", "sinh-substitution | graded-subdivision"),
    },
    "limits": {
        "check": (str, REQUIRED, "thmC | glimit"),
        "m": (_int, REQUIRED, "saddle multiplicity"),
        "k": (_int, 0, "degree (thmC)"),
        "l": (_int, 0, "branch index"),
        "parity": (_int_list, "0,1", "sides: 0 for s > 0, 1 for s < 0"),
        "f": (_jet, "const", "jet of f (thmC)"),
        "a1": (_int, None, "first exponent (glimit)"),
        "a2": (_int, None, "second exponent (glimit)"),
        "tol": (_float, None, "relative tolerance"),
    },
    "decompose": {
        "m": (_int, REQUIRED, "saddle multiplicity"),
        "k": (_int, REQUIRED, "number of singular terms"),
        "l": (_int, 0, "branch index"),
        "parity": (_int, 0, "0 for s > 0, 1 for s < 0"),
        "f": (_jet, "const", "jet of f"),
    },
    "iet": {
        "spec": (str, REQUIRED, "IET spec file"),
        "action": (str, "keane", "keane | apply"),
        "depth": (_int, 1000, "orbit depth for keane"),
        "x": (_float_list, None, "points for apply"),
    },
    "flow": {
        "m": (_int, REQUIRED, "saddle multiplicity"),
        "v": (_jet, "const", "density jet"),
        "eps": (_float, 1.0, "chart size epsilon in (0, 1]"),
        "l": (_int, 0, "branch index"),
        "s": (_float_list, REQUIRED, "entry heights in [-eps, eps] minus 0"),
        "f": (_jet, "const", "integrand jet"),
        "mode": (str, "auto", "auto | time | chart"),
        "orbit": (str, None, "write the last orbit as CSV to this path"),
    },
    "verify": {
        "suite": (str, "all", "comma-separated suite names or all"),
        "jobs": (_int, 1, "worker processes"),
    },
}

DEFAULT_FORMAT = {"beta": "json", "dist": "csv", "gfun": "csv", "phi": "csv", "limits": "json",
                  "decompose": "json", "iet": "json", "flow": "json", "verify": "json"}


def read_config(path: str) -> dict[str, str]:
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path!r}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (t.strip() for t in line.split("=", 1))
        out[key] = value
    return out


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="saddlekit", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=STAMP)
    sub = ap.add_subparsers(dest="command", required=True)
    for name, keys in COMMANDS.items():
        p = sub.add_parser(name)
        p.add_argument("--config", help="file of 'key = value' lines")
        p.add_argument("--out", help="output path (default stdout)")
        p.add_argument("--format", choices=("csv", "json"), default=None)
        for key, (_, default, help_) in keys.items():
            req = " (required)" if default is REQUIRED else ""
            p.add_argument(f"--{key}", dest=f"opt_{key}", default=None, help=help_ + req)
    return ap


def resolve(command: str, args: argparse.Namespace) -> dict:
    """Merge config file and flags, parse values, and check required keys."""
    spec = COMMANDS[command]
    raw: dict[str, str] = {}
    if args.config:
        raw.update(read_config(args.config))
    for key in ("out", "format"):
        if key in raw:
            setattr(args, key, getattr(args, key) or raw.pop(key))
    unknown = sorted(set(raw) - set(spec))
    if unknown:
        raise UsageError(f"unknown key(s) for {command}: {', '.join(unknown)}")
    for key in spec:
        flag = getattr(args, f"opt_{key}")
        if flag is not None:
            raw[key] = flag
    params = {}
    for key, (parse, default, _) in spec.items():
        if key in raw:
            params[key] = parse(raw[key])
        elif default is REQUIRED:
            raise UsageError(f"{command}: missing required key {key!r}")
        elif isinstance(default, str) and parse is not str:
            params[key] = parse(default)
        else:
            params[key] = default
    return params


# output helpers

def _cplx(z: complex) -> dict:
    return {"re": float(z.real), "im": float(z.imag)}


def _emit_csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    buf.write(f"# {STAMP}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])
    return buf.getvalue()


def _emit_json(payload: dict) -> str:
    return json.dumps({"version": STAMP, **payload}, indent=2, sort_keys=False) + "\n"


def _table(fmt: str, header: list[str], rows: list[list], extra: dict | None = None) -> str:
    if fmt == "csv":
        return _emit_csv(header, rows)
    return _emit_json({**(extra or {}), "columns": header, "rows": rows})


# commands; each returns (text, exit code)

def cmd_beta(p: dict, fmt: str):
    from .specialfn import beta_branch, beta_like
    b = beta_like(p["x"], p["y"])
    row = [str(p["x"]), str(p["y"]), beta_branch(p["x"], p["y"]), b.real, b.imag]
    return _table(fmt, ["x", "y", "branch", "re", "im"], [row]), 0


def cmd_dist(p: dict, fmt: str):
    from .distributions import partial_dist, script_c, script_c_direct
    m, k, jet, which = p["m"], p["k"], p["jet"], p["which"]
    rows = []
    if which == "partial":
        for j in p["j"] or range(min(k, m - 1) + 1):
            v = partial_dist(jet, m, k, j)
            rows.append(["partial", m, k, j, v.real, v.imag])
    elif which in ("scriptC", "scriptC_direct"):
        fn = script_c if which == "scriptC" else script_c_direct
        for l in p["l"] if p["l"] is not None else range(2 * m):
            v = fn(jet, m, k, l)
            rows.append([which, m, k, l, v.real, v.imag])
    else:
        raise UsageError(f"unknown distribution {which!r}")
    return _table(fmt, ["which", "m", "k", "index", "re", "im"], rows), 0


def _quad(policy: str):
    from .quadrature import QuadSpec
    if policy not in ("sinh-substitution", "graded-subdivision"):
        raise UsageError(f"unknown policy {policy!r}")
    return QuadSpec(sing_policy=policy)


def cmd_gfun(p: dict, fmt: str):
    from .sector_integrals import g_fun_result
    q = _quad(p["policy"])
    rows = []
    for s in p["s"]:
        r = g_fun_result(p["m"], p["l"], p["a1"], p["a2"], p["u"], s, q)
        rows.append([s, r.value.real, r.value.imag, r.error])
    return _table(fmt, ["s", "re(G)", "im(G)", "est_err"], rows), 0


def cmd_phi(p: dict, fmt: str):
    from .sector_integrals import phi_result
    q = _quad(p["policy"])
    rows = []
    for s in p["s"]:
        r = phi_result(p["f"], p["m"], p["l"], s, q)
        rows.append([s, r.value.real, r.value.imag, r.error])
    return _table(fmt, ["s", "re(phi)", "im(phi)", "est_err"], rows), 0


def cmd_limits(p: dict, fmt: str):
    from .asymptotics import thm_c_limit, verify_g_limit
    reports = []
    if p["check"] == "thmC":
        for parity in p["parity"]:
            kw = {"tol": p["tol"]} if p["tol"] is not None else {}
            reports.append(thm_c_limit(p["f"], p["m"], p["l"], parity, p["k"], **kw))
    elif p["check"] == "glimit":
        if p["a1"] is None or p["a2"] is None:
            raise UsageError("glimit needs a1 and a2")
        kw = {"tol": p["tol"]} if p["tol"] is not None else {}
        plus, minus = verify_g_limit(p["m"], p["l"], p["a1"], p["a2"], **kw)
        reports = [r for parity, r in ((0, plus), (1, minus)) if parity in p["parity"]]
    else:
        raise UsageError(f"unknown check {p['check']!r}")
    ok = all(r.passed for r in reports)
    if fmt == "csv":
        rows = [[r.label, r.estimate.real, r.estimate.imag, complex(r.expected).real,
                 complex(r.expected).imag, r.rel_err, r.passed] for r in reports]
        return _emit_csv(["label", "re(estimate)", "im(estimate)", "re(expected)", "im(expected)",
                          "rel_err", "pass"], rows), 0 if ok else 1
    return _emit_json({"reports": [r.to_json() for r in reports], "pass": ok}), 0 if ok else 1


def cmd_decompose(p: dict, fmt: str):
    from .asymptotics import decompose_phi
    dec = decompose_phi(p["f"], p["m"], p["l"], p["parity"], p["k"])
    rows = [[j, c.real, c.imag, complex(e).real, complex(e).imag]
            for j, (c, e) in enumerate(zip(dec.coefficients, dec.expected))]
    header = ["j", "re(fit)", "im(fit)", "re(C^j/j!)", "im(C^j/j!)"]
    if fmt == "csv":
        return _emit_csv(header, rows), 0
    return _emit_json({"columns": header, "rows": rows,
                       "max_coefficient_error": dec.max_coefficient_error(),
                       "remainder_diag": dec.remainder_diag, "window_diag": dec.window_diag,
                       "dropped_windows": dec.dropped, "growth_ok": dec.growth_ok()}), 0


def cmd_iet(p: dict, fmt: str):
    from .iet_spaces import iet_apply, keane_check, read_iet
    try:
        spec = read_iet(p["spec"])
    except OSError as exc:
        raise UsageError(f"cannot read IET spec: {exc}") from exc
    if p["action"] == "keane":
        ok = keane_check(spec, p["depth"])
        rows = [[spec.d, p["depth"], "exact" if spec.exact else "float", ok]]
        return _table(fmt, ["d", "depth", "mode", "keane"], rows), 0
    if p["action"] == "apply":
        if not p["x"]:
            raise UsageError("apply needs x")
        rows = [[x, float(iet_apply(spec, x))] for x in p["x"]]
        return _table(fmt, ["x", "T(x)"], rows), 0
    raise UsageError(f"unknown action {p['action']!r}")


def cmd_flow(p: dict, fmt: str):
    from .saddle_flow import transit, transit_expected
    saddle = SaddleModel(p["m"], p["v"], p["eps"])
    rows, last = [], None
    for s in p["s"]:
        res = transit(saddle, p["l"], s, p["f"], p["mode"])
        res.expected = transit_expected(saddle, p["l"], s, p["f"])
        rows.append([s, res.tau, res.integral.real, res.integral.imag, res.expected.real,
                     res.expected.imag, res.rel_err, res.orbit.hamiltonian_drift, res.mode])
        last = res
    if p["orbit"] and last is not None:
        last.orbit.write_csv(p["orbit"])
    header = ["s", "tau", "re(ode)", "im(ode)", "re(quadrature)", "im(quadrature)", "rel_err",
              "drift", "mode"]
    return _table(fmt, header, rows), 0


def _run_suite(name: str) -> dict:
    from .verification import SUITES
    return SUITES[name]()


def cmd_verify(p: dict, fmt: str):
    from .verification import SUITES
    names = [n.strip() for n in p["suite"].split(",") if n.strip()]
    if names == ["all"]:
        names = list(SUITES)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise UsageError(f"unknown suite(s): {', '.join(unknown)}; known: {', '.join(SUITES)}")
    if p["jobs"] > 1 and len(names) > 1:
        with ProcessPoolExecutor(max_workers=p["jobs"]) as pool:
            results = list(pool.map(_run_suite, names))
    else:
        results = [_run_suite(n) for n in names]
    results.sort(key=lambda r: r["suite"])
    ok = all(r["pass"] for r in results)
    if fmt == "csv":
        rows = [[r["suite"], c["name"], c["err"], c["tolerance"], c["pass"]]
                for r in results for c in r["checks"]]
        return _emit_csv(["suite", "check", "err", "tolerance", "pass"], rows), 0 if ok else 1
    payload = results[0] if len(results) == 1 else {"suites": results, "pass": ok}
    return _emit_json(payload), 0 if ok else 1


HANDLERS = {"beta": cmd_beta, "dist": cmd_dist, "gfun": cmd_gfun, "phi": cmd_phi,
            "limits": cmd_limits, "decompose": cmd_decompose, "iet": cmd_iet, "flow": cmd_flow,
            "verify": cmd_verify}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        params = resolve(args.command, args)
        fmt = args.format or DEFAULT_FORMAT[args.command]
        if fmt not in ("csv", "json"):
            raise UsageError(f"unknown format {fmt!r}")
        text, code = HANDLERS[args.command](params, fmt)
    except (UsageError, SaddleKitError, ValueError) as exc:
        print(f"saddlekit: error: {exc}", file=sys.stderr)
        return 2
    if args.out:
        try:
            Path(args.out).write_text(text)
        except OSError as exc:
            print(f"saddlekit: error: {exc}", file=sys.stderr)
            return 2
    else:
        sys.stdout.write(text)
    return code
