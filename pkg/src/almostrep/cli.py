"""Command-line entry point: ``almostrep <command> [flags]``.

Single results are written as JSON, sweeps and tables as CSV.  Every output
starts with the command name and its full parameter set.  Exit status is 0 on
success, 1 when a computation or check fails, 2 on bad input.
"""
from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import json
import math
import sys
from fractions import Fraction

from . import __version__
from . import bundle as B
from . import catalog as C
from . import cohring as CR
from . import groups as G
from . import homology as Hm
from . import invariants as I
from . import repexpr as R
from . import reps
from .errors import AlmostRepError, InputError
from .literals import parse_element
from .matkit import Tolerances


class CheckFailed(AlmostRepError):
    """A run completed but one of its assertions did not hold."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def _frac(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _n_values(args) -> list[int]:
    if args.n_range:
        try:
            lo, hi = (int(t) for t in args.n_range.split(".."))
        except ValueError:
            raise InputError(f"--n-range must look like 3..40, got {args.n_range!r}") from None
        if lo > hi:
            raise InputError("--n-range is empty")
        return list(range(lo, hi + 1))
    if args.n is None:
        raise InputError("give --n or --n-range")
    return [args.n]


def _rep(args, n: int | None):
    name = args.rep
    if name == "lie-exp":
        e = R.LieExp(args.dim, args.scale, args.seed)
    elif name == "character":
        e = R.Character(tuple(args.thetas))
    else:
        e = C.make_rep(name, n)
    if args.group is not None and G.parse_group(args.group) != e.group:
        raise InputError(f"--rep {name} lives on {e.group}, not {args.group}")
    return e


def _tol(args) -> Tolerances:
    return Tolerances(unitary_tol=args.tol_unitary, log_branch_gap=args.tol_branch,
                      spectral_gap=args.tol_gap, integer_snap=args.tol_snap)


# --- commands -------------------------------------------------------------------
# Each returns (result, rows); rows is a (header, list) pair for CSV or None.

def cmd_appendix_verify(args):
    fx = Hm.h3_fixtures()
    boundaries = {name: Hm.is_cycle(getattr(fx, name)) for name in ("B1", "B2", "C")}
    residuals = {name: str(Hm.h3_box_residual(name, args.radius)) for name in ("beta1", "beta2")}
    pairings = {
        "<beta1,B1>": Hm.kronecker(fx.beta1, fx.B1),
        "<beta1,B2>": Hm.kronecker(fx.beta1, fx.B2),
        "<beta2,B1>": Hm.kronecker(fx.beta2, fx.B1),
        "<beta2,B2>": Hm.kronecker(fx.beta2, fx.B2),
        "<gamma,C>": Hm.kronecker(fx.gamma, fx.C),
        "<gamma11,C>": Hm.kronecker(fx.gamma11, fx.C),
        "<gamma21,C>": Hm.kronecker(fx.gamma21, fx.C),
        "<gamma22,C>": Hm.kronecker(fx.gamma22, fx.C),
    }
    expected = {"<beta1,B1>": 1, "<beta1,B2>": 0, "<beta2,B1>": 0, "<beta2,B2>": 1,
                "<gamma,C>": 1, "<gamma11,C>": 0, "<gamma21,C>": 1, "<gamma22,C>": 0}
    ok = (all(boundaries.values()) and all(v == "0" for v in residuals.values())
          and all(pairings[k] == v for k, v in expected.items()))
    result = {"cycles": boundaries, "cocycle_residual": residuals,
              "pairings": {k: _frac(v) for k, v in pairings.items()}, "ok": ok}
    if not ok:
        raise CheckFailed("H3 fixture values do not match", result)
    return result, None


def cmd_defect(args):
    rows = []
    for n in _n_values(args):
        e = _rep(args, n)
        if args.box is None:
            S = reps.generating_set(e.group)
        else:
            S = list(G.box(e.group, args.box))
        rep = reps.defect(e, S, "generators" if args.box is None else f"box {args.box}")
        ref = 2 * math.sin(math.pi / n) if isinstance(e, R.Voiculescu) else None
        rows.append((n, rep, ref))
    if args.format == "csv" or len(rows) > 1:
        table = [[n, f"{r.max_defect:.17g}", "" if ref is None else f"{ref:.17g}"]
                 for n, r, ref in rows]
        return None, (["n", "defect", "reference"], table)
    n, r, ref = rows[0]
    out = r.to_json()
    out["n"] = n
    if ref is not None:
        out["reference"] = ref
    return out, None


def cmd_omega(args):
    e = _rep(args, args.n)
    if args.a is not None or args.b is not None:
        if args.a is None or args.b is None:
            raise InputError("give both --a and --b")
        pairs = [(parse_element(e.group, args.a), parse_element(e.group, args.b))]
    else:
        S = list(G.box(e.group, args.box if args.box is not None else 1))
        pairs = [(a, b) for a in S for b in S]
    tol = _tol(args)
    values = [(a, b, I.omega_value(e, a, b, tol)) for a, b in pairs]
    if args.format == "csv" or len(values) > 1:
        table = [[G.format_element(a), G.format_element(b), f"{w:.17g}"] for a, b, w in values]
        return None, (["a", "b", "omega"], table)
    a, b, w = values[0]
    return {"a": G.format_element(a), "b": G.format_element(b), "omega": w}, None


def _word_or_cycle(args, e):
    if args.word is not None:
        return Hm.hopf_to_bar(C.hopf_word(e.group, args.word)), args.word
    return C.named_cycle(args.cycle or "torus"), args.cycle or "torus"


def cmd_pairing(args):
    e = _rep(args, args.n)
    tol = _tol(args)
    if args.word is not None and args.method == "hopf":
        res = I.pair_hopf(e, C.hopf_word(e.group, args.word), tol)
    else:
        c, _ = _word_or_cycle(args, e)
        res = I.pair_bar(e, c, tol)
    out = res.to_json()
    if res.snapped is None:
        raise CheckFailed("pairing is not integral", out)
    return out, None


def cmd_winding(args):
    e = _rep(args, args.n)
    if args.word is None:
        raise InputError("winding needs --word")
    tri = I.pairing_triangle(e, C.hopf_word(e.group, args.word), _tol(args))
    out = {"winding": tri["winding"], "hopf": tri["hopf"].to_json(),
           "bar": tri["bar"].to_json(), "agree": tri["agree"]}
    if tri["error"]:
        out["error"] = tri["error"]
    if not tri["agree"]:
        raise CheckFailed("winding number and pairings disagree", out)
    return out, None


def cmd_ch_symbolic(args):
    e = _rep(args, args.n)
    ch = CR.ch_of_expr(e)
    cs = CR.chern_from_ch(ch)
    comps = CR.ch_components(ch)
    return {"group": str(e.group), "dim": e.dim, "ch": repr(ch),
            "ch_components": [repr(x) for x in comps],
            "chern_classes": {f"c{k + 1}": repr(c) for k, c in enumerate(cs)}}, None


def _parse_pairs(text: str) -> list[tuple[int, int]]:
    out = []
    for chunk in filter(None, (t.strip() for t in text.split(","))):
        try:
            l, m = (int(t) for t in chunk.split("-"))
        except ValueError:
            raise InputError(f"pair must look like 1-2, got {chunk!r}") from None
        out.append((l, m))
    return out


def cmd_plan_zd(args):
    if args.d is None or args.n is None:
        raise InputError("plan-zd needs --d and --n")
    S = _parse_pairs(args.pairs or "")
    e = CR.plan_zd_monomial(S, args.d, args.n)
    ch = CR.ch_of_expr(e)
    ring = ch.ring
    target = ring.scalar((3 * args.n) ** len(S))
    mono = ring.one()
    for l, m in S:
        mono = mono * CR.monomial(ring, f"e{l}") * CR.monomial(ring, f"e{m}")
    ok = ch == mono + target and CR.multiplicities_nonnegative(e)
    out = {"pairs": [list(p) for p in S], "dim": e.dim, "nodes": R.count_nodes(e),
           "ch": repr(ch), "matches": ok, "expr": R.to_json(e)}
    if not ok:
        raise CheckFailed("planned expression has the wrong Chern character", out)
    return out, None


def cmd_bundle_chern(args):
    e = _rep(args, args.n)
    cover = B.TorusCover(arcs=args.arcs)
    c, f = B.bundle_chern(e, args.grid, cover, _tol(args), args.defect_limit)
    if args.format == "csv":
        rows = list(csv.reader(io.StringIO(B.curvature_csv(f))))
        return None, (rows[0], rows[1:])
    out = f.summary()
    out["chern"] = c
    pb = I.pair_bar(e, C.torus_cycle(), _tol(args)) if e.group == G.Z2 else None
    if pb is not None:
        out["pair_bar"] = pb.to_json()
        out["agrees_with_pairing"] = pb.snapped == c
    return out, None


def cmd_near_cocycle(args):
    e = _rep(args, args.n)
    cover = B.TorusCover(arcs=args.arcs)
    r = B.near_cocycle(e, cover, args.grid, _tol(args))
    out = r.to_json()
    out["within_bound"] = r.within_bound
    if not r.within_bound or r.cocycle_residual >= 1e-8:
        raise CheckFailed("near-cocycle correction outside its bounds", out)
    return out, None


COMMANDS = {
    "appendix-verify": cmd_appendix_verify,
    "defect": cmd_defect,
    "omega": cmd_omega,
    "pairing": cmd_pairing,
    "winding": cmd_winding,
    "ch-symbolic": cmd_ch_symbolic,
    "plan-zd": cmd_plan_zd,
    "bundle-chern": cmd_bundle_chern,
    "near-cocycle": cmd_near_cocycle,
}


# --- parser and output ----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--no-timestamp", action="store_true")
    common.add_argument("--tol-unitary", type=float, default=1e-9)
    common.add_argument("--tol-branch", type=float, default=1e-6)
    common.add_argument("--tol-gap", type=float, default=1e-6)
    common.add_argument("--tol-snap", type=float, default=1e-6)

    rep = _Parser(add_help=False)
    rep.add_argument("--rep", choices=C.REP_NAMES + ("lie-exp", "character"), default="voiculescu")
    rep.add_argument("--n", type=int)
    rep.add_argument("--group", help="expected group of --rep, e.g. Z2, H3, H3xZ")
    rep.add_argument("--dim", type=int, default=3, help="lie-exp dimension")
    rep.add_argument("--scale", type=float, default=0.01, help="lie-exp generator norm")
    rep.add_argument("--seed", type=int, default=0, help="lie-exp seed")
    rep.add_argument("--thetas", type=float, nargs="+", default=[0.3, -0.7],
                     help="character angles")

    p = _Parser(prog="almostrep", description="Almost representations: invariants and bundles.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("appendix-verify", parents=[common])
    s.add_argument("--radius", type=int, default=3)

    s = sub.add_parser("defect", parents=[common, rep])
    s.add_argument("--n-range")
    s.add_argument("--box", type=int)

    s = sub.add_parser("omega", parents=[common, rep])
    s.add_argument("--a")
    s.add_argument("--b")
    s.add_argument("--box", type=int)

    s = sub.add_parser("pairing", parents=[common, rep])
    s.add_argument("--cycle", choices=("torus", "B1", "B2"))
    s.add_argument("--word")
    s.add_argument("--method", choices=("bar", "hopf"), default="bar")

    s = sub.add_parser("winding", parents=[common, rep])
    s.add_argument("--word")

    sub.add_parser("ch-symbolic", parents=[common, rep])

    s = sub.add_parser("plan-zd", parents=[common])
    s.add_argument("--d", type=int)
    s.add_argument("--n", type=int)
    s.add_argument("--pairs", help="disjoint pairs such as 1-2,3-4")

    for name, grid in (("bundle-chern", 48), ("near-cocycle", 12)):
        s = sub.add_parser(name, parents=[common, rep])
        s.add_argument("--grid", type=int, default=grid)
        s.add_argument("--arcs", type=int, default=3 if name == "bundle-chern" else 2)
        if name == "bundle-chern":
            s.add_argument("--defect-limit", type=float, default=2 / 9)
    return p


def _params(args) -> dict:
    skip = {"out", "format", "no_timestamp", "command"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _header(args) -> dict:
    h = {"command": args.command, "version": __version__, "params": _params(args)}
    if not args.no_timestamp:
        h["timestamp"] = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    return h


def render(args, result, rows) -> str:
    head = _header(args)
    if rows is not None:
        buf = io.StringIO()
        for k, v in head.items():
            buf.write(f"# {k}: {json.dumps(v, sort_keys=True)}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(rows[0])
        w.writerows(rows[1])
        return buf.getvalue()
    return json.dumps({**head, "result": result}, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    args = None
    try:
        args = build_parser().parse_args(argv)
        result, rows = COMMANDS[args.command](args)
        _emit(render(args, result, rows), args.out)
        return 0
    except AlmostRepError as exc:
        code = 2 if isinstance(exc, InputError) else 1
        err = {"error": type(exc).__name__, "message": str(exc.args[0]) if exc.args else "",
               "exit_code": code}
        if isinstance(exc, CheckFailed) and len(exc.args) > 1:
            err["result"] = exc.args[1]
        if args is not None:
            err.update(_header(args))
        text = json.dumps(err, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
        if args is not None and args.out:
            _emit(text, args.out)
        sys.stderr.write(text)
        return code


if __name__ == "__main__":
    sys.exit(main())
