"""
Command-line front end.

Parameter files are flat ``key = value`` text, one entry per line, ``#``
comments allowed::

    alpha  = 0.5, pi - 2.5
    tau    = 2, 1
    lambda = phi
    eta    = 1 - phi
    seed   = 0

Angles are arithmetic expressions in ``pi``; ``lambda`` and ``eta`` are
expressions in ``phi`` evaluated exactly in Q(sqrt 5) when they contain no
decimal point.  Sampling uses numpy's PCG64 generator seeded with ``seed``.
JSON reports carry ``schema_version``; floats are written with 17
significant digits so identical inputs give byte-identical files.
"""
from __future__ import annotations

import argparse
import ast
import csv
import io
import json
import math
import operator
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .bifurcation import verify_bifurcation_equivalence
from .cf import gamma_sequences, golden_index, golden_lambda
from .dynseq import DynSeqParams, closed_form, compute_dynseq, golden_dynseq_params, regime
from .numeric import PHI, GoldenRational
from .periodic import find_horizontal_orbits, reflective_indices, verify_island
from .renorm import renorm_check, rho_profile, slope_pair, y_bar_bounds
from .svg import SvgCanvas, colour, cone_rays
from .tce import TceParams, iterate_batch, orbit

SCHEMA_VERSION = 1
EXIT_USAGE = 2
EXIT_FAIL = 1


class ConfigError(ValueError):
    pass


# --- expression evaluation ---------------------------------------------

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}


def evaluate(text: str, names: dict):
    """Arithmetic on numbers and the given names; ints stay exact."""
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise ConfigError("cannot parse %r" % text) from exc

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and type(node.value) in (int, float):
            return Fraction(node.value) if isinstance(node.value, int) else node.value
        if isinstance(node, ast.Name):
            if node.id not in names:
                raise ConfigError("unknown name %r in %r" % (node.id, text))
            return names[node.id]
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            if type(node.op) in _BINOPS:
                return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
            if isinstance(node.op, ast.Pow):
                e = ev(node.right)
                if not (isinstance(e, Fraction) and e.denominator == 1):
                    raise ConfigError("only integer powers are allowed in %r" % text)
                return ev(node.left) ** int(e)
        raise ConfigError("unsupported expression %r" % text)

    return ev(tree)


def angle_value(text: str) -> float:
    return float(evaluate(text, {"pi": math.pi}))


def length_value(text: str):
    v = evaluate(text, {"phi": PHI, "pi": math.pi})
    if isinstance(v, Fraction):
        v = GoldenRational(v, 0)
    return v


# --- parameter files ----------------------------------------------------

def read_kv(path: str) -> dict:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError("%s:%d: expected key = value" % (path, lineno))
            k, v = line.split("=", 1)
            out[k.strip().lower()] = v.strip()
    return out


def params_from_kv(kv: dict) -> TceParams:
    for key in ("alpha", "tau", "lambda", "eta"):
        if key not in kv:
            raise ConfigError("%s: missing" % key)
    alpha = tuple(angle_value(s) for s in kv["alpha"].split(","))
    try:
        tau = tuple(int(s) for s in kv["tau"].split(","))
    except ValueError as exc:
        raise ConfigError("tau: expected comma-separated integers") from exc
    lam = length_value(kv["lambda"])
    eta = length_value(kv["eta"])
    if len(tau) != len(alpha):
        raise ConfigError("tau: needs %d entries to match alpha" % len(alpha))
    if sorted(tau) != list(range(1, len(tau) + 1)):
        raise ConfigError("tau: not a permutation of 1..%d" % len(tau))
    if any(not a > 0 for a in alpha):
        raise ConfigError("alpha: every angle must be positive")
    total = math.fsum(alpha)
    if not total < math.pi:
        raise ConfigError("alpha: |alpha| = %.17g violates the admissible range 0 < |alpha| < pi" % total)
    if not lam > 0:
        raise ConfigError("lambda: must be positive")
    if not (eta > 0 and eta < lam):
        raise ConfigError("eta: need 0 < eta < lambda")
    return TceParams(alpha, tau, lam, eta)


def load_params(path: str) -> tuple[TceParams, dict]:
    kv = read_kv(path)
    return params_from_kv(kv), kv


# --- output -------------------------------------------------------------

def fmt_float(x: float) -> str:
    return "%.17g" % x


def _to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_to_jsonable(v) for v in obj]
    if isinstance(obj, (GoldenRational, Fraction)):
        return str(obj)
    if isinstance(obj, complex):
        return [_to_jsonable(obj.real), _to_jsonable(obj.imag)]
    if isinstance(obj, (np.floating,)):
        return _to_jsonable(float(obj))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, set):
        return sorted(_to_jsonable(v) for v in obj)
    return obj


def _write(obj, indent: int) -> str:
    pad = "  " * (indent + 1)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if math.isfinite(obj):
            return fmt_float(obj)
        return json.dumps("inf" if obj > 0 else ("-inf" if obj < 0 else "nan"))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = ["%s%s: %s" % (pad, json.dumps(k), _write(v, indent + 1)) for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + "  " * indent + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        return "[\n" + ",\n".join(pad + _write(v, indent + 1) for v in obj) + "\n" + "  " * indent + "]"
    return json.dumps(str(obj))


def dumps_json(obj) -> str:
    body = {"schema_version": SCHEMA_VERSION}
    body.update(_to_jsonable(obj) if isinstance(obj, dict) else {"data": _to_jsonable(obj)})
    return _write(body, 0) + "\n"


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return fmt_float(v)
    return str(v)


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_cell(v) for v in r])
    return buf.getvalue()


def _emit(text: str, path: str | None):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _kind(path: str | None, default: str) -> str:
    if path:
        for ext in ("csv", "json", "svg"):
            if path.lower().endswith("." + ext):
                return ext
    return default


# --- subcommands --------------------------------------------------------

def _parse_complex(text: str) -> complex:
    parts = text.split(",")
    if len(parts) != 2:
        raise ConfigError("z: expected re,im")
    return complex(angle_value(parts[0]), angle_value(parts[1]))


def cmd_orbit(args) -> int:
    p, _ = load_params(args.params)
    z = _parse_complex(args.z)
    if not z.imag > 0:
        raise ConfigError("z: must lie in the upper half-plane")
    pts = orbit(p, z, args.steps)
    kind = _kind(args.out, "csv")
    if kind == "svg":
        xs = [w.real for w, _ in pts]
        ys = [w.imag for w, _ in pts]
        pad = 0.05 * max(max(xs) - min(xs), max(ys), 1e-9)
        box = (min(min(xs), -1.0) - pad, max(max(xs), float(p.lam_f)) + pad, 0.0, max(ys) + pad)
        cv = SvgCanvas(box)
        cone_rays(cv, p.bangles, 2 * max(ys) / math.sin(p.beta))
        for sym in sorted({s for _, s in pts}):
            cv.points([w for w, s in pts if s == sym], fill=colour(sym), r=1.2)
        _emit(cv.to_string(), args.out)
    elif kind == "json":
        _emit(dumps_json({"orbit": [{"n": n, "re": w.real, "im": w.imag, "symbol": s}
                                    for n, (w, s) in enumerate(pts)]}), args.out)
    else:
        _emit(csv_text(("n", "re", "im", "symbol"),
                       [(n, w.real, w.imag, s) for n, (w, s) in enumerate(pts)]), args.out)
    return 0


def cmd_return_map(args) -> int:
    p, _ = load_params(args.params)
    if not 1 <= args.cone <= p.d:
        raise ConfigError("cone: must be a middle cone 1..%d" % p.d)
    pair = slope_pair(p, args.mu_prime, args.cone)
    prof = rho_profile(p, pair, args.terms)
    ds = prof.dynseq
    rows = []
    for n in range(min(len(prof.breakpoints), len(prof.predicted))):
        rows.append((
            n, prof.breakpoints[n], float(prof.predicted[n]),
            prof.slopes[n] if n < len(prof.slopes) else float("nan"),
            prof.sides[n] if n < len(prof.sides) else "",
            ds.side(n),
            prof.p_empirical[n] if n < len(prof.p_empirical) else float("nan"),
            float(ds.p[n]),
        ))
    header = ("n", "y_detected", "y_dynseq", "slope", "side", "side_predicted", "p_empirical", "p_dynseq")
    kind = _kind(args.out, "csv")
    if kind == "json":
        _emit(dumps_json({"mu_prime": pair.mu_prime, "mu": pair.mu, "gamma": pair.gamma,
                          "regime": regime(ds.params), "summary": prof.summary(),
                          "rows": [dict(zip(header, r)) for r in rows]}), args.out)
    else:
        _emit(csv_text(header, rows), args.out)
    if args.svg:
        _profile_svg(p, pair, prof).save(args.svg)
    return 0


def _profile_svg(p, pair, prof) -> SvgCanvas:
    from .renorm import rho, xi_S
    ds = prof.dynseq
    top = float(ds.y[0]) * 1.3
    ys = np.geomspace(float(ds.y[min(len(ds.y) - 1, 6)]) * 1.01, top, 1500)
    pts = []
    for y in ys:
        try:
            pts.append(rho(p, pair, float(y)).point)
        except Exception:  # noqa: BLE001 - cap exceeded near the origin
            continue
    xs = [z.real for z in pts] + [xi_S(pair, top).real, 0.0]
    box = (min(xs) - 0.05, max(xs) + 0.05, 0.0, top * 1.05)
    cv = SvgCanvas(box)
    cone_rays(cv, p.bangles, top / max(math.sin(p.beta), 1e-3))
    cv.segment(0j, xi_S(pair, top), stroke="#444", dash="4,3")
    cv.points(pts, fill="#1f77b4", r=1.0)
    for n in range(len(ds.y)):
        if float(ds.y[n]) > ys[0]:
            zn = (float(ds.p[n]) - 0.5) * float(ds.params.ell(ds.y[n])) + 1j * float(ds.y[n])
            cv.circle(zn, 0.004 * (box[1] - box[0]), stroke="#d62728", fill="#d62728")
    return cv


def cmd_bifurcation(args) -> int:
    lam = golden_lambda(args.k)
    rep = verify_bifurcation_equivalence(None, args.terms, lam=lam, check_points=False)
    kind = _kind(args.out, "csv")
    if kind == "json":
        gs = gamma_sequences(lam, args.terms)
        _emit(dumps_json({
            "k": args.k, "lambda": lam, "terms": args.terms,
            "gamma_prime": list(gs.prime), "gamma_double": list(gs.double), "gamma": list(gs.merged),
            "rows": rep["rows"], "ok": rep["ok"],
        }), args.out)
    else:
        rows = [(r["n"], r["lambda_prime"], r["gamma_prime"], r["k_prime"],
                 r["lambda_double"], r["gamma_double"], r["k_double"], r["equal"]) for r in rep["rows"]]
        _emit(csv_text(("n", "Lambda_prime", "Gamma_prime", "k_prime", "Lambda_double", "Gamma_double",
                        "k_double", "equal"), rows), args.out)
    return 0 if rep["ok"] else EXIT_FAIL


def _scalar_arg(text: str):
    v = evaluate(text, {"pi": math.pi, "phi": PHI})
    return v


def cmd_dynseq(args) -> int:
    nu = _scalar_arg(args.nu)
    mu = _scalar_arg(args.mu)
    if args.k is not None:
        params = golden_dynseq_params(args.k, nu, mu)
    else:
        if args.lam is None or args.eta is None:
            raise ConfigError("lambda: give --k or both --lam and --eta")
        lam, eta = length_value(args.lam), length_value(args.eta)
        params = DynSeqParams(nu, mu, lam, eta, k=golden_index(lam, eta))
        if params.k is None and args.closed_form:
            raise ConfigError("lambda: closed-form columns need lambda = 1/(k + phi), eta = 1 - k lambda")
    if not abs(mu) > nu:
        raise ConfigError("mu: need |mu| > nu")
    ds = compute_dynseq(params, args.terms, precision=args.precision)
    with_cf = params.k is not None and regime(params) != "boundary"
    rows = []
    for n in range(len(ds.p)):
        row = [n, ds.y[n], ds.p[n], ds.kappa[n], ds.upsilon[n]]
        if with_cf:
            cp, _ = closed_form(params, n)
            if params.exact and args.precision == "exact":
                match = cp == ds.p[n]
            else:
                match = abs(float(cp) - float(ds.p[n])) <= 1e-10 * abs(float(cp))
            row += [cp, match]
        rows.append(tuple(_num(v) for v in row))
    header = ["n", "y_n", "p_n", "kappa_n", "Upsilon_n"] + (["closed_form_p_n", "match"] if with_cf else [])
    kind = _kind(args.out, "csv")
    if kind == "json":
        _emit(dumps_json({"regime": regime(params), "terminated": ds.terminated,
                          "rows": [dict(zip(header, r)) for r in rows]}), args.out)
    else:
        _emit(csv_text(header, rows), args.out)
    return 0


def _num(v):
    if isinstance(v, Fraction):
        return GoldenRational(v, 0)
    return v


def _require_golden(p: TceParams):
    if golden_index(p.lam, p.eta) is None:
        raise ConfigError("lambda: this command needs the golden family lambda = 1/(k + phi), eta = 1 - k lambda")


def cmd_renorm_check(args) -> int:
    p, kv = load_params(args.params)
    _require_golden(p)
    seed = args.seed if args.seed is not None else int(kv.get("seed", 0))
    rep = renorm_check(p, samples=args.samples, depth=args.depth, seed=seed, tol=args.tol,
                       bounds=y_bar_bounds(p))
    _emit(dumps_json(rep), args.out)
    return 0 if rep["ok"] else EXIT_FAIL


def cmd_islands(args) -> int:
    p, kv = load_params(args.params)
    if args.j not in reflective_indices(p.alpha, p.tau):
        raise ConfigError("j: cone %d is not a reflective witness" % args.j)
    rejected = []
    cands = find_horizontal_orbits(p, args.j, args.max_n, rejected=rejected)
    out = []
    for c in cands:
        v = verify_island(p, c, samples=args.samples)
        out.append({
            "n_index": c.n_index, "height": c.height, "seed": c.seed, "period": c.period,
            "epsilon": c.epsilon, "rotation_angle": c.rotation_angle,
            "middle_counts": list(c.middle_counts), "return_residual": c.return_residual,
            "max_rel_drift": v["max_rel_drift"], "max_rotation_err": v["max_rotation_err"],
            "rotation_cf": v["density"]["coeffs"], "rotation_clean_depth": v["density"]["clean_depth"],
        })
    _emit(dumps_json({"j": args.j, "candidates": out,
                      "rejected": [{"n": n, "reason": r} for n, r in rejected]}), args.out)
    if args.svg:
        seed = int(kv.get("seed", 0))
        _islands_svg(p, cands, seed, args.background).save(args.svg)
    return 0


def _islands_svg(p, cands, seed: int, background: int) -> SvgCanvas:
    if not cands:
        top = 1.0
    else:
        top = max(c.height + c.epsilon for c in cands) * 1.4
    box = (-top / p.nu - 0.05 * top, top / p.nu + 0.05 * top, 0.0, top)
    cv = SvgCanvas(box)
    cone_rays(cv, p.bangles, 2 * top / max(math.sin(p.beta), 1e-3))
    rng = np.random.default_rng(seed)
    starts = rng.uniform(0.05, 1.0, 40) * top
    zs = (rng.uniform(-1, 1, starts.size) * starts / p.nu) + 1j * starts
    trail = []

    def cb(step, cur):
        sel = cur[(cur.imag < top) & (np.abs(cur.real) <= box[1])]
        trail.extend(sel.tolist())

    iterate_batch(p, zs, background, callback=cb)
    stride = max(1, len(trail) // 20000)
    cv.points(trail[::stride], fill="#bbb", r=0.5)
    for i, c in enumerate(cands):
        for z in c.orbit_points:
            if abs(z.real) <= box[1] and z.imag < top:
                cv.circle(z, c.epsilon, stroke=colour(i), fill=colour(i), opacity=0.5)
    return cv


def cmd_verify_all(args) -> int:
    from .verify import run_all
    only = None
    if args.only:
        only = {int(s) for s in args.only.split(",")}
    res = run_all(k=args.k, only=only)
    summary = {
        "ok": res["ok"],
        "criteria": [{"criterion": r["criterion"], "name": r["name"], "ok": r["ok"]} for r in res["results"]],
        "details": res["results"],
    }
    text = dumps_json(summary)
    _emit(text, args.out)
    for r in res["results"]:
        sys.stderr.write("%-4s criterion %2d  %s\n" % ("PASS" if r["ok"] else "FAIL", r["criterion"], r["name"]))
    return 0 if res["ok"] else EXIT_FAIL


# --- parser -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tce-dyn", description="Translated cone exchange experiments.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("orbit", help="orbit of a point as CSV, JSON or SVG")
    s.add_argument("--params", required=True)
    s.add_argument("--z", required=True, help="re,im")
    s.add_argument("--steps", type=int, default=1000)
    s.add_argument("--out")
    s.set_defaults(func=cmd_orbit)

    s = sub.add_parser("return-map", help="return profile along a section line")
    s.add_argument("--params", required=True)
    s.add_argument("--mu-prime", type=float, required=True)
    s.add_argument("--cone", type=int, required=True)
    s.add_argument("--terms", type=int, default=8)
    s.add_argument("--out")
    s.add_argument("--svg")
    s.set_defaults(func=cmd_return_map)

    s = sub.add_parser("bifurcation", help="bifurcation sequences against semiconvergent errors")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--terms", type=int, default=10)
    s.add_argument("--out")
    s.set_defaults(func=cmd_bifurcation)

    s = sub.add_parser("dynseq", help="dynamical sequences for (nu, mu)")
    s.add_argument("--nu", required=True)
    s.add_argument("--mu", required=True)
    s.add_argument("--k", type=int)
    s.add_argument("--lam")
    s.add_argument("--eta")
    s.add_argument("--terms", type=int, default=25)
    s.add_argument("--precision", choices=("exact", "double"), default="exact")
    s.add_argument("--closed-form", action="store_true", help="fail unless closed forms apply")
    s.add_argument("--out")
    s.set_defaults(func=cmd_dynseq)

    s = sub.add_parser("renorm-check", help="self-similarity of the return map near the origin")
    s.add_argument("--params", required=True)
    s.add_argument("--samples", type=int, default=10_000)
    s.add_argument("--depth", type=int, default=3)
    s.add_argument("--tol", type=float, default=1e-9)
    s.add_argument("--seed", type=int)
    s.add_argument("--out")
    s.set_defaults(func=cmd_renorm_check)

    s = sub.add_parser("islands", help="horizontal periodic orbits and their invariant discs")
    s.add_argument("--params", required=True)
    s.add_argument("--j", type=int, required=True)
    s.add_argument("--max-n", type=int, default=5)
    s.add_argument("--samples", type=int, default=200)
    s.add_argument("--background", type=int, default=2000, help="steps of background orbits in the SVG")
    s.add_argument("--out")
    s.add_argument("--svg")
    s.set_defaults(func=cmd_islands)

    s = sub.add_parser("verify-all", help="run the acceptance checks")
    s.add_argument("--k", type=int)
    s.add_argument("--only", help="comma-separated criterion numbers")
    s.add_argument("--out")
    s.set_defaults(func=cmd_verify_all)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        sys.stderr.write("error: %s\n" % exc)
        return EXIT_USAGE
    except OSError as exc:
        sys.stderr.write("error: %s\n" % exc)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
