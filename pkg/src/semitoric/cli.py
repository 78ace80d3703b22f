"""Command-line entry point.

Exit codes: 0 success, 1 a validate-all criterion failed, 2 bad input,
3 infeasible operation, 4 numerical failure. Errors are reported on stderr
as one JSON object with a machine-readable reason.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
import tempfile
from dataclasses import asdict, dataclass, field
from pathlib import Path

_THREAD_VARS = ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS")


def _apply_thread_env() -> None:
    n = os.environ.get("SEMITORIC_THREADS")
    if n:
        for var in _THREAD_VARS:
            os.environ.setdefault(var, n)


_apply_thread_env()

from . import acceptance  # noqa: E402
from . import hirzebruch_pipeline as hp  # noqa: E402
from . import invariants as inv  # noqa: E402
from . import reduced_spaces as rs  # noqa: E402
from . import semitoric_polygon as sp  # noqa: E402
from . import spectral_classification as sc  # noqa: E402
from .model_systems import FAMILIES, ParameterWindowError, RootBracketError, make_system, momentum_image  # noqa: E402
from .rational_geometry import DegeneratePolygonError, NonConvexImageError, fmt_rat, rat  # noqa: E402

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_INFEASIBLE, EXIT_NUMERICAL = 0, 1, 2, 3, 4

ALIASES = {
    "coupled": "CoupledAngular",
    "hp-2param": "HP2Param",
    "w1-moving": "W1MovingAB",
    "w1-switch": "W1Switch",
    "w1-hyperbolic": "W1Hyperbolic",
    "w2-trans-b": "W2TransB",
    "w2-trans-c": "W2TransC",
    "w2-2param": "W2TwoParam",
    "degen-appearance": "DegenAppearance",
    "degen-become": "DegenBecome",
    "degen-collapse": "DegenCollapse",
}


class InputError(ValueError):
    pass


# ---------------------------------------------------------------- expressions


_TOKEN = re.compile(r"\s*(?:(\d+\.?\d*(?:[eE][-+]?\d+)?|\.\d+(?:[eE][-+]?\d+)?)|([A-Za-z_]\w*)|(\*\*|[-+*/^()]))")
_FUNCS = {"sqrt": math.sqrt, "exp": math.exp, "log": math.log}


def eval_expr(text: str, env: dict | None = None) -> float:
    """Evaluate a parameter expression such as ``9/20sqrt(2b)``.

    Juxtaposition multiplies and binds tighter than ``/``, so the example
    reads 9 / (20 sqrt(2 b)). Names come from ``env`` plus ``pi``; calls
    are limited to sqrt, exp and log.
    """
    env = {"pi": math.pi, **(env or {})}
    toks = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise InputError(f"cannot parse expression {text!r} at position {pos}")
        num, name, op = m.groups()
        toks.append(("num", float(num)) if num else ("name", name) if name else ("op", op))
        pos = m.end()
    toks.append(("end", None))
    i = 0

    def peek():
        return toks[i]

    def take(kind=None, val=None):
        nonlocal i
        t = toks[i]
        if (kind and t[0] != kind) or (val and t[1] != val):
            raise InputError(f"unexpected token {t[1]!r} in {text!r}")
        i += 1
        return t

    def expr():
        v = term()
        while peek() in (("op", "+"), ("op", "-")):
            v = v + term() if take()[1] == "+" else v - term()
        return v

    def term():
        v = chain()
        while peek() in (("op", "*"), ("op", "/")):
            if take()[1] == "*":
                v *= chain()
            else:
                d = chain()
                if d == 0:
                    raise InputError(f"division by zero in {text!r}")
                v /= d
        return v

    def starts_atom(t):
        return t[0] in ("num", "name") or t == ("op", "(")

    def chain():
        v = power()
        while starts_atom(peek()):
            v *= power()
        return v

    def power():
        v = unary()
        if peek() in (("op", "**"), ("op", "^")):
            take()
            return v ** power()
        return v

    def unary():
        if peek() == ("op", "-"):
            take()
            return -unary()
        if peek() == ("op", "+"):
            take()
            return unary()
        return atom()

    def atom():
        kind, val = take()
        if kind == "num":
            return val
        if kind == "name":
            if val in _FUNCS:
                take("op", "(")
                arg = expr()
                take("op", ")")
                try:
                    return _FUNCS[val](arg)
                except ValueError as exc:
                    raise InputError(f"{val}({arg}) undefined in {text!r}") from exc
            if val not in env:
                raise InputError(f"unknown name {val!r} in {text!r}; known: {', '.join(sorted(env))}")
            return float(env[val])
        if (kind, val) == ("op", "("):
            v = expr()
            take("op", ")")
            return v
        raise InputError(f"unexpected token {val!r} in {text!r}")

    out = expr()
    take("end")
    return float(out)


def float_list(text: str, env: dict | None = None) -> list[float]:
    return [eval_expr(p, env) for p in text.split(",") if p.strip()]


def rational_point(text: str):
    parts = text.split(",")
    if len(parts) != 2:
        raise InputError(f"expected a point 'x,y', got {text!r}")
    try:
        return (rat(parts[0].strip()), rat(parts[1].strip()))
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad rational in {text!r}: {exc}") from exc


def rational(text: str):
    try:
        return rat(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad rational {text!r}: {exc}") from exc


# ---------------------------------------------------------------- config and output


@dataclass
class RunConfig:
    subcommand: str
    system: str | None = None
    params: dict = field(default_factory=dict)
    grids: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    seed: int = 0


def config_from_args(args) -> RunConfig:
    keys = ("alpha", "beta", "gamma", "R1", "R2", "R1_s", "R2_s", "j0", "t", "s1", "s2", "n", "lambdas", "y", "j")
    params = {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}
    grids = {k: getattr(args, k) for k in ("grid", "resolution", "points", "mc") if getattr(args, k, None) is not None}
    outputs = {k: getattr(args, k) for k in ("out", "log", "csv", "json") if getattr(args, k, None)}
    return RunConfig(args.cmd, getattr(args, "system", None), params, grids, outputs, getattr(args, "seed", 0))


def atomic_write(path: str | Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n"


def _json_default(o):
    if hasattr(o, "to_json"):
        return o.to_json()
    if hasattr(o, "value"):
        return o.value
    if hasattr(o, "numerator"):
        return fmt_rat(o)
    if hasattr(o, "tolist"):
        return o.tolist()
    if isinstance(o, complex):
        return [o.real, o.imag]
    raise TypeError(f"cannot serialise {type(o).__name__}")


def emit(text: str, out: str | None) -> None:
    if out and out != "-":
        atomic_write(out, text)
    else:
        sys.stdout.write(text)


def resolve_system(name: str) -> str:
    fid = ALIASES.get(name, name)
    if fid not in FAMILIES:
        raise InputError(f"unknown system {name!r}; aliases: {', '.join(ALIASES)}")
    return fid


def build_system(args):
    fid = resolve_system(args.system)
    cls = FAMILIES[fid]
    names = [f for f in cls.__dataclass_fields__]
    raw = {k: getattr(args, k, None) for k in ("alpha", "beta", "gamma", "R1", "R2", "j0")}
    env = {}
    params = {}
    # evaluate in dependency order so gamma may mention alpha and beta
    defaults = cls()
    for key in ("alpha", "beta", "R1", "R2", "j0", "gamma"):
        if key not in names:
            if raw.get(key) is not None:
                raise InputError(f"{fid} takes no parameter {key}")
            continue
        if raw.get(key) is not None:
            params[key] = eval_expr(raw[key], env)
        else:
            params[key] = getattr(defaults, key)
        env[key] = params[key]
        if key in ("alpha", "beta"):
            env[key[0]] = params[key]
    return make_system(fid, **params), params


def family_params(args, sys) -> list[tuple]:
    """Parameter tuples requested on the command line (t or s1, s2 lists)."""
    if sys.arity == 1:
        ts = float_list(args.t) if args.t else []
        return [(t,) for t in ts]
    s1 = float_list(args.s1) if args.s1 else []
    s2 = float_list(args.s2) if args.s2 else []
    if len(s1) != len(s2):
        raise InputError("--s1 and --s2 need the same number of values")
    return list(zip(s1, s2))


# ---------------------------------------------------------------- polygon


def _load_polygon(path: str) -> sp.MarkedWeightedPolygon:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
        data = json.loads(text)
        return sp.MarkedWeightedPolygon.from_json(data)
    except FileNotFoundError as exc:
        raise InputError(f"no such file {path}") from exc
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise InputError(f"malformed polygon JSON in {path}: {exc}") from exc
    except DegeneratePolygonError as exc:
        raise InputError(f"degenerate polygon in {path}: {exc}") from exc


def _require_valid(mp: sp.MarkedWeightedPolygon) -> None:
    rep = sp.validate(mp)
    if not rep.valid:
        raise InputError("invalid marked polygon: " + "; ".join(rep.violations))


def cmd_polygon(args) -> int:
    op = args.op
    if op == "orbit-equal":
        a, b = _load_polygon(args.input), _load_polygon(args.other)
        _require_valid(a)
        _require_valid(b)
        emit(dumps(sp.orbit_equal(a, b)), args.out)
        return EXIT_OK
    mp = _load_polygon(args.input)
    if op == "validate":
        rep = sp.validate(mp)
        emit(dumps({"valid": rep.valid, "violations": rep.violations,
                    "fake_or_hidden": [[fmt_rat(x), fmt_rat(y)] for x, y in rep.fake_or_hidden()]}), args.out)
        return EXIT_OK if rep.valid else EXIT_INPUT
    _require_valid(mp)
    if op == "classify-corner":
        if not args.vertex:
            raise InputError("--vertex is required")
        emit(dumps(sp.classify_corner(mp, rational_point(args.vertex)).value), args.out)
    elif op == "chop":
        if not (args.vertex and args.lam):
            raise InputError("--vertex and --lambda are required")
        emit(dumps(sp.corner_chop(mp, rational_point(args.vertex), rational(args.lam))), args.out)
    elif op == "unchop":
        if not (args.edge and args.lam):
            raise InputError("--edge and --lambda are required")
        ends = args.edge.split(";")
        if len(ends) != 2:
            raise InputError("--edge takes 'x0,y0;x1,y1'")
        edge = (rational_point(ends[0]), rational_point(ends[1]))
        emit(dumps(sp.corner_unchop(mp, edge, rational(args.lam))), args.out)
    elif op == "flip":
        flips = tuple(int(v) for v in args.flips.split(",")) if args.flips else (-1,) * mp.s
        if any(f not in (1, -1) for f in flips):
            raise InputError("--flips takes a comma list of +1/-1")
        try:
            g = sp.GroupElement(k=args.k, shift=rational(args.shift), flips=flips)
            emit(dumps(sp.apply_group(g, mp)), args.out)
        except ValueError as exc:
            if isinstance(exc, sp.InadmissibleError):
                raise
            raise InputError(str(exc)) from exc
    elif op == "remove-cut":
        emit(dumps(sp.remove_cut(mp, args.j, args.sign)), args.out)
    elif op == "canonical":
        verts, marks = sp.canonical_form(mp)
        emit(dumps({"polygon": [[fmt_rat(x), fmt_rat(y)] for x, y in verts],
                    "marks": [{"c": [fmt_rat(c[0]), fmt_rat(c[1])], "eps": e} for c, e in marks]}), args.out)
    return EXIT_OK


# ---------------------------------------------------------------- classify


def _verdicts(sys, par) -> list[dict]:
    inv_ = sys.fixed_points(par)
    out = []
    specials = sc.special_directions(sys)
    for fp in inv_.points:
        hb = sc.hessian_bundle(sys, par, fp.point, with_fd=False)
        v = sc.classify_fixed_point(hb, specials)
        out.append({"point": fp.label, "chart": fp.point.chart, "J": fp.J, "H": fp.H,
                    "t" if sys.arity == 1 else "s": list(par) if sys.arity == 2 else par[0], **v.to_json()})
    for cs in inv_.critical_sets:
        out.append({"point": cs.description, "type": "Degenerate", "samples": len(cs.samples),
                    "max_residual": cs.max_residual})
    return out


def cmd_classify(args) -> int:
    sys_, params = build_system(args)
    report = {"system": sys_.id, "params": params, "config": asdict(args.config)}
    out_dir = Path(args.out) if args.out else None
    pars = family_params(args, sys_)
    if pars:
        report["verdicts"] = [{"params": list(p), "points": _verdicts(sys_, p)} for p in pars]
    if args.transition_times:
        tt = sc.transition_times(sys_)
        sw, _ = sc.verdict_switch_times(sys_)
        report["transition_times"] = {"closed_form": tt.closed_form, "bisection": tt.bisection,
                                      "gap": tt.gap, "verdict_switches": sw}
    if args.rank_one:
        js = float_list(args.rank_one)
        grid = pars or ([(0.5,)] if sys_.arity == 1 else [(0.5, 0.5)])
        rows, bad = acceptance.rank_one_grid(sys_, grid, js)
        report["rank_one"] = {"levels": len(rows), "non_elliptic": bad,
                              "rows": [{"params": list(p), "j": j, "types": k} for p, j, k in rows]}
    if args.grid:
        if sys_.id != "W2TwoParam":
            raise InputError("--grid (region diagram) is only defined for w2-2param")
        rd = sc.region_diagram(sys_, args.grid)
        report["regions"] = {"components": rd.components(), "grid": args.grid}
        if out_dir:
            atomic_write(out_dir / "regions.csv", rd.to_csv())
        else:
            sys.stdout.write(rd.to_csv())
    text = dumps(report)
    if out_dir:
        atomic_write(out_dir / "classify.json", text)
    elif not args.grid:
        sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------- figures


def _envelope_csv(img) -> str:
    lines = ["kind,label,J,H_lo,H_hi"]
    for j, lo, hi in zip(img.envelope_J, img.envelope_min, img.envelope_max):
        if math.isfinite(lo):
            lines.append(f"envelope,,{float(j)!r},{float(lo)!r},{float(hi)!r}")
    for fp in img.fixed:
        lines.append(f"fixed,{fp.label},{fp.J!r},{fp.H!r},{fp.H!r}")
    return "\n".join(lines) + "\n"


def _tag(par) -> str:
    return "_".join(f"{v:g}" for v in par)


def cmd_figures(args) -> int:
    out = Path(args.out or "figures")
    written = []
    if args.cut_flip:
        left, right = acceptance.cut_flip_pair()
        for name, mp in (("cut_flip_left.json", left), ("cut_flip_right.json", right)):
            atomic_write(out / name, dumps(mp))
            written.append(str(out / name))
    if args.system:
        sys_, _ = build_system(args)
        pars = family_params(args, sys_)
        if not pars:
            raise InputError("momentum images need --t (or --s1/--s2) values")
        for par in pars:
            img = momentum_image(sys_, par, resolution=args.resolution)
            p = out / f"{sys_.id}_envelope_{_tag(par)}.csv"
            atomic_write(p, _envelope_csv(img))
            written.append(str(p))
            if args.cloud:
                p = out / f"{sys_.id}_cloud_{_tag(par)}.csv"
                atomic_write(p, img.to_csv())
                written.append(str(p))
    if args.reduced:
        kind = args.reduced
        fid = {"w1": "W1MovingAB", "w2": "W2TwoParam"}.get(kind)
        if fid is None:
            raise InputError("--reduced takes w1 or w2")
        args.system = fid
        sys_, _ = build_system(args)
        pars = family_params(args, sys_) or ([(0.25,)] if sys_.arity == 1 else [(0.5, 0.5)])
        if not args.j:
            raise InputError("--reduced needs --j levels")
        for par in pars:
            for j in float_list(args.j):
                rh = rs.reduced_hamiltonian(sys_, par, j)
                tag = f"{_tag(par)}_j{j:g}"
                sec = ["R,X,theta"] + [f"{r!r},{x!r},{th!r}" for r, x, th in rs.section_curve(rh)]
                for name, text in ((f"{kind}_section_{tag}.csv", "\n".join(sec) + "\n"),
                                   (f"{kind}_profile_{tag}.csv", rs.profile_csv(rh))):
                    atomic_write(out / name, text)
                    written.append(str(out / name))
    if args.heights:
        R1, R2 = eval_expr(args.R1 or "1"), eval_expr(args.R2 or "2")
        cmp = inv.match_and_compare(R1, R2, points=args.points)
        p = out / f"heights_R{R1:g}_{R2:g}.csv"
        atomic_write(p, cmp.to_csv())
        written.append(str(p))
    if not written:
        raise InputError("nothing to emit; pass --system, --reduced, --heights or --cut-flip")
    sys.stdout.write(dumps({"written": written}))
    return EXIT_OK


# ---------------------------------------------------------------- heights


def cmd_heights(args) -> int:
    R1, R2 = args.R1_f, args.R2_f
    report = {"config": asdict(args.config)}
    if args.gamma is not None:
        a, b = inv.matched_scalings(R1, R2)
        alpha = eval_expr(args.alpha) if args.alpha else a
        beta = eval_expr(args.beta) if args.beta else b
        g = eval_expr(args.gamma, {"alpha": alpha, "beta": beta, "a": alpha, "b": beta})
        report["w2"] = inv.height_w2(alpha, beta, g, oracle_samples=args.mc, seed=args.seed, audit=args.audit).to_json()
    report["s2xs2"] = inv.height_s2xs2(R1, R2, oracle_samples=args.mc, seed=args.seed).to_json()
    if args.compare:
        alpha = eval_expr(args.alpha) if args.alpha else None
        beta = eval_expr(args.beta) if args.beta else None
        cmp = inv.match_and_compare(R1, R2, alpha=alpha, beta=beta, points=args.points, mc_samples=args.mc)
        report["comparison"] = cmp.to_json()
        if args.csv:
            atomic_write(args.csv, cmp.to_csv())
    emit(dumps(report), args.out)
    return EXIT_OK


# ---------------------------------------------------------------- pipeline


def cmd_pipeline(args) -> int:
    alpha, beta = rational(args.alpha), rational(args.beta)
    lams = [rational(v) for v in args.lambdas.split(",")] if args.lambdas else None
    y = rational(args.y) if args.y else None
    res = hp.run_pipeline(args.n, alpha, beta, lams, y)
    checks = hp.verify_against_standard(res)
    if args.log:
        atomic_write(args.log, res.log_lines())
    report = {"n": args.n, "alpha": fmt_rat(alpha), "beta": fmt_rat(beta),
              "lambdas": [fmt_rat(v) for v in res.lambdas], "alpha_prime": fmt_rat(res.alpha_prime),
              "triple": res.triple.to_json(), "checks": checks, "bracket": res.bracket.to_json(),
              "steps": len(res.steps)}
    emit(dumps(report), args.out)
    return EXIT_OK if all(checks.values()) else EXIT_NUMERICAL


# ---------------------------------------------------------------- validate-all


def cmd_validate_all(args) -> int:
    only = {int(v) for v in args.only.split(",")} if args.only else None
    results = []
    for r in acceptance.run_all(quick=args.quick, only=only):
        print(r.line(), flush=True)
        results.append(r)
    if args.json:
        atomic_write(args.json, dumps([r.to_json() for r in results]))
    failed = [r for r in results if not r.passed]
    if failed:
        print(f"first failing criterion: {failed[0].id} ({failed[0].name})")
        return EXIT_FAIL
    return EXIT_OK


# ---------------------------------------------------------------- parser


def _system_args(p, required=False):
    p.add_argument("--system", required=required, help="alias or family id: " + ", ".join(ALIASES))
    for name in ("alpha", "beta", "gamma", "R1", "R2", "j0"):
        p.add_argument(f"--{name}", help="expression; gamma may use alpha/a and beta/b")
    p.add_argument("--t", help="comma list of t values")
    p.add_argument("--s1", help="comma list of s1 values")
    p.add_argument("--s2", help="comma list of s2 values")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="semitoric", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("polygon", help="marked polygon operations on JSON input")
    p.add_argument("op", choices=["validate", "classify-corner", "chop", "unchop", "flip", "orbit-equal",
                                  "remove-cut", "canonical"])
    p.add_argument("input", help="polygon JSON file, or - for stdin")
    p.add_argument("other", nargs="?", help="second polygon for orbit-equal")
    p.add_argument("--vertex", help="x,y with rational coordinates")
    p.add_argument("--edge", help="x0,y0;x1,y1")
    p.add_argument("--lambda", dest="lam", help="rational size")
    p.add_argument("--flips", help="comma list of +1/-1, one per mark (default: flip all)")
    p.add_argument("--k", type=int, default=0, help="power of T applied after the flips")
    p.add_argument("--shift", default="0", help="vertical shift (rational)")
    p.add_argument("--j", type=int, default=0, help="mark index for remove-cut")
    p.add_argument("--sign", type=int, choices=[1, -1], default=1, help="cut sign for remove-cut")
    p.add_argument("--out")
    p.set_defaults(func=cmd_polygon)

    p = sub.add_parser("classify", help="fixed-point verdicts, transition times, rank-one sweeps")
    _system_args(p, required=True)
    p.add_argument("--transition-times", action="store_true")
    p.add_argument("--rank-one", metavar="J_LIST", help="comma list of J levels for a reduced-space sweep")
    p.add_argument("--grid", type=int, help="region diagram resolution (w2-2param)")
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("figures", help="CSV/JSON data behind the figures")
    _system_args(p)
    p.add_argument("--resolution", type=int, default=24)
    p.add_argument("--cloud", action="store_true", help="also write the sampled point cloud")
    p.add_argument("--reduced", choices=["w1", "w2"])
    p.add_argument("--j", help="comma list of J levels for --reduced")
    p.add_argument("--heights", action="store_true")
    p.add_argument("--points", type=int, default=20)
    p.add_argument("--cut-flip", action="store_true", help="the two cut-flip representatives")
    p.add_argument("--out", help="output directory (default ./figures)")
    p.set_defaults(func=cmd_figures)

    p = sub.add_parser("heights", help="height invariants and the matched comparison")
    p.add_argument("--R1", dest="R1_s", default="1")
    p.add_argument("--R2", dest="R2_s", default="2")
    p.add_argument("--alpha")
    p.add_argument("--beta")
    p.add_argument("--gamma", help="W2 coupling; omitted means S2xS2 only")
    p.add_argument("--mc", type=int, default=0, help="Monte Carlo oracle samples (0 = off)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--audit", action="store_true", help="independent h2 from the upper level")
    p.add_argument("--compare", action="store_true", help="h1 curves over the gamma window and crossing")
    p.add_argument("--points", type=int, default=20)
    p.add_argument("--csv", help="comparison CSV path")
    p.add_argument("--out")
    p.set_defaults(func=cmd_heights)

    p = sub.add_parser("pipeline", help="W0 -> Wn polygon pipeline")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alpha", required=True, help="rational")
    p.add_argument("--beta", required=True, help="rational")
    p.add_argument("--lambdas", help="comma list of n rational chop sizes")
    p.add_argument("--y", help="mark ordinate (default: middle of the interior range)")
    p.add_argument("--log", help="JSON-lines step log")
    p.add_argument("--out")
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("validate-all", help="run the acceptance suite")
    p.add_argument("--quick", action="store_true")
    p.add_argument("--only", help="comma list of criterion numbers")
    p.add_argument("--json", help="write per-criterion results here")
    p.set_defaults(func=cmd_validate_all)
    return ap


def _fail(code: int, exc: BaseException) -> int:
    sys.stderr.write(json.dumps({"error": type(exc).__name__, "reason": str(exc), "exit": code}) + "\n")
    return code


INFEASIBLE = (sp.ChopInfeasibleError, sp.UnchopInfeasibleError, sp.InadmissibleError, NonConvexImageError,
              hp.PipelineError)
NUMERICAL = (RootBracketError, sc.BracketError, sc.NotFixedError, ArithmeticError, RuntimeError)


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    args.config = config_from_args(args)
    try:
        for src, dst in (("R1_s", "R1_f"), ("R2_s", "R2_f")):
            if hasattr(args, src):
                setattr(args, dst, eval_expr(getattr(args, src)))
        return args.func(args)
    except INFEASIBLE as exc:
        return _fail(EXIT_INFEASIBLE, exc)
    except NUMERICAL as exc:
        return _fail(EXIT_NUMERICAL, exc)
    except (InputError, ParameterWindowError, inv.HeightDomainError, inv.ComparisonRefused,
            rs.ReducedDomainError) as exc:
        return _fail(EXIT_INPUT, exc)
    except (ValueError, KeyError, IndexError, OSError) as exc:
        return _fail(EXIT_INPUT, exc)


if __name__ == "__main__":
    sys.exit(main())
