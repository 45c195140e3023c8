"""Command-line front end: ``quatform <subcommand> [options]``.

Exit codes: 0 success, 2 argument error, 3 hypothesis violated (p too small;
rerun with --force), 4 a checked inequality or identity failed.
"""

from __future__ import annotations

import argparse
import ast
import csv
import io
import json
import math
import sys
from fractions import Fraction
from typing import Callable

from . import __version__, _kernels
from . import bounds, family, localdens, theta
from .errors import ArgumentError, HypothesisError, QuatformError, ResourceError, VerificationError
from .exactmath import floor_monomial, max_tau
from .qform import QuadForm, from_csv, from_gram, from_json

EXIT_OK = 0
EXIT_ARGUMENT = 2
EXIT_HYPOTHESIS = 3
EXIT_VERIFICATION = 4


# -- exact limit expressions ----------------------------------------------------------

class _Monomial:
    """coef * prod(base ** exp) with rational coef, positive rational bases and exponents."""

    def __init__(self, coef: Fraction, factors: dict[Fraction, Fraction] | None = None):
        self.coef = Fraction(coef)
        self.factors = {b: e for b, e in (factors or {}).items() if e != 0 and b != 1}

    @property
    def rational(self) -> bool:
        return not self.factors

    def __mul__(self, other: "_Monomial") -> "_Monomial":
        f = dict(self.factors)
        for b, e in other.factors.items():
            f[b] = f.get(b, Fraction(0)) + e
        return _Monomial(self.coef * other.coef, f)

    def inverse(self) -> "_Monomial":
        if self.coef == 0:
            raise ArgumentError("division by zero in limit expression")
        return _Monomial(1 / self.coef, {b: -e for b, e in self.factors.items()})

    def power(self, exponent: "_Monomial") -> "_Monomial":
        if not exponent.rational:
            raise ArgumentError("exponents must be rational")
        r = exponent.coef
        if r.denominator == 1:
            out = _Monomial(Fraction(1))
            base = self if r >= 0 else self.inverse()
            for _ in range(abs(r.numerator)):
                out = out * base
            return out
        if self.coef <= 0:
            raise ArgumentError("fractional powers need a positive base")
        f = {b: e * r for b, e in self.factors.items()}
        f[self.coef] = f.get(self.coef, Fraction(0)) + r
        return _Monomial(Fraction(1), f)


def parse_limit_expr(text: str) -> int:
    """Exact floor of an expression built from numbers, + - * / ^ and parentheses."""
    source = text.replace("^", "**")
    try:
        tree = ast.parse(source, mode="eval")
    except SyntaxError as exc:
        raise ArgumentError(f"cannot parse limit expression {text!r}") from exc

    def ev(node) -> _Monomial:
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
            # decimals are read from the source text, never through a float
            return _Monomial(Fraction(ast.get_source_segment(source, node)))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return _Monomial(-v.coef, v.factors) if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            a, b = ev(node.left), ev(node.right)
            if isinstance(node.op, ast.Mult):
                return a * b
            if isinstance(node.op, ast.Div):
                return a * b.inverse()
            if isinstance(node.op, ast.Pow):
                return a.power(b)
            if isinstance(node.op, (ast.Add, ast.Sub)):
                if not (a.rational and b.rational):
                    raise ArgumentError("sums are only supported between rational terms")
                return _Monomial(a.coef + b.coef if isinstance(node.op, ast.Add) else a.coef - b.coef)
        raise ArgumentError(f"unsupported syntax in limit expression {text!r}")

    value = ev(tree)
    return floor_monomial(value.coef, value.factors)


# -- output helpers -------------------------------------------------------------------

def _jsonable(x):
    if isinstance(x, Fraction):
        return {"num": x.numerator, "den": x.denominator}
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, float) and not math.isfinite(x):
        return None
    if hasattr(x, "item"):
        return x.item()
    return x


def _cell(x) -> str:
    return repr(x) if isinstance(x, float) else str(x)


class Output:
    def __init__(self, command: str, fmt: str):
        self.command = command
        self.fmt = fmt
        self.result: dict = {}
        self.rows: list[dict] = []
        self.ok = True

    def _columns(self) -> list[str]:
        cols: dict[str, None] = {}
        for row in self.rows:
            cols.update(dict.fromkeys(row))
        return list(cols)

    def render(self) -> str:
        if self.fmt == "json":
            doc = {
                "command": self.command,
                "version": __version__,
                "ok": self.ok,
                "result": _jsonable(self.result),
                "rows": _jsonable(self.rows),
            }
            return json.dumps(doc, sort_keys=True, indent=2) + "\n"
        if self.fmt == "csv":
            buf = io.StringIO()
            if self.rows:
                w = csv.DictWriter(buf, fieldnames=self._columns(), lineterminator="\n")
                w.writeheader()
                for row in self.rows:
                    w.writerow({k: _cell(row.get(k, "")) for k in self._columns()})
            else:
                w = csv.writer(buf, lineterminator="\n")
                w.writerow(["key", "value"])
                for k, v in self.result.items():
                    w.writerow([k, _cell(v)])
            return buf.getvalue()
        lines = []
        for k, v in self.result.items():
            lines.append(f"{k:>20}: {_cell(v)}")
        if self.rows:
            keys = self._columns()
            cells = [[_cell(r.get(k, "")) for k in keys] for r in self.rows]
            widths = [max(len(k), *(len(c[i]) for c in cells)) for i, k in enumerate(keys)]
            if lines:
                lines.append("")
            lines.append("  ".join(k.rjust(w) for k, w in zip(keys, widths)))
            for c in cells:
                lines.append("  ".join(x.rjust(w) for x, w in zip(c, widths)))
        lines.append(f"{'verdict':>20}: {'ok' if self.ok else 'FAILED'}")
        return "\n".join(lines) + "\n"


# -- form source ----------------------------------------------------------------------

def _add_form_args(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--gram", help="Gram matrix as JSON: 16 integers row-major or a nested 4x4 list")
    g.add_argument("--gram-csv", help="upper triangle of the Gram matrix as 10 comma-separated integers")
    g.add_argument("--family-p", type=int, help="use the family form Q_p (p prime, p = 5 mod 8)")


def _form(args) -> QuadForm:
    if args.family_p is not None:
        return family.family_form(args.family_p).form
    if args.gram_csv is not None:
        return from_csv(args.gram_csv)
    try:
        return from_json(args.gram)
    except json.JSONDecodeError as exc:
        raise ArgumentError(f"--gram is not valid JSON: {exc}") from exc


def _positive(name: str):
    def conv(text: str) -> int:
        v = int(text)
        if v < 1:
            raise argparse.ArgumentTypeError(f"{name} must be positive")
        return v

    return conv


# -- subcommands ----------------------------------------------------------------------

def cmd_theta(args, out: Output) -> None:
    Q = _form(args)
    r = theta.representation_counts(Q, args.n_max)
    out.result = {"disc": Q.disc, "level": Q.level, "n_max": args.n_max}
    prime = Q.dim == 4 and Q.is_prime_disc
    aE = theta.eisenstein_coeffs(Q, args.n_max) if prime else None
    for n in range(args.n_max + 1):
        row = {"n": n, "r": int(r[n])}
        if aE is not None:
            row["aE"] = aE[n]
            row["aC"] = int(r[n]) - aE[n]
        out.rows.append(row)


def cmd_eisenstein(args, out: Output) -> None:
    Q = _form(args)
    p = Q.disc
    aE = theta.eisenstein_coeffs(Q, args.n_max)
    aEs = theta.eisenstein_dual_coeffs(Q, args.n_max) if args.dual else None
    out.result = {"p": p}
    for n in range(args.n_max + 1):
        row = {"n": n, "aE": aE[n]}
        if n >= 1:
            lb = theta.eisenstein_lower_bound(p, n)
            row["lower_bound"] = float(lb)
            row["bound_holds"] = lb.is_at_most(aE[n])
            out.ok &= row["bound_holds"]
        if aEs is not None:
            row["aE_dual"] = aEs[n]
        out.rows.append(row)


def cmd_local_density(args, out: Output) -> None:
    Q = _form(args)
    if args.v is not None:
        c = localdens.count_types(Q, args.q, args.v, args.n, mode=args.mode)
        out.result = {"q": c.q, "v": c.v, "n": c.n, "good": c.good, "zero": c.zero, "bad": c.bad, "total": c.total}
        return
    rep = localdens.local_density(Q, args.q, args.n)
    out.result = rep.to_dict()
    out.result["beta"] = float(rep.beta)


def cmd_siegel_check(args, out: Output) -> None:
    Q = _form(args)
    out.result = {"p": Q.disc, "cutoff": args.cutoff, "tolerance": args.tol}
    for n in args.n:
        c = localdens.siegel_product_check(Q, n, args.cutoff)
        ok = c.raw_deviation <= args.tol
        out.ok &= ok
        out.rows.append(
            {
                "n": n,
                "aE": c.a_e,
                "product": c.product,
                "tail": c.tail,
                "raw_deviation": c.raw_deviation,
                "deviation": c.deviation,
                "ok": ok,
            }
        )


def _check_rows(report: bounds.CheckReport) -> list[dict]:
    rows = []
    for name, c in sorted(report.worst().items()):
        failures = sum(1 for k in report.checks if k.name == name and not k.ok)
        rows.append({"inequality": name, "at": c.x, "lhs": c.lhs, "rhs": c.rhs, "margin": c.margin, "failures": failures, "ok": failures == 0})
    return rows


def cmd_bounds(args, out: Output) -> None:
    Q = _form(args)
    rep = bounds.bound_report(Q, force=args.force)
    p = rep.p
    out.result = rep.to_dict()
    out.result["theorem1_constant"] = bounds.theorem1_constant(p)
    rows = []
    rows.append({"inequality": "theorem1_constant", "at": p, "lhs": bounds.theorem1_constant(p), "rhs": 23.85})
    est = bounds.petersson_estimate(Q)
    rows.append({"inequality": "petersson_vs_A", "at": est.n_trunc, "lhs": est.interval.hi, "rhs": rep.A})
    rows.append({"inequality": "eisenstein_part", "at": est.n_trunc, "lhs": est.eis_head + est.tail_e, "rhs": bounds.eisenstein_part_bound(p)})
    rows.append({"inequality": "cusp_part_head", "at": est.n_trunc, "lhs": est.cusp_head_r, "rhs": bounds.cusp_part_bound(Q)})
    for r in rows:
        r["margin"] = r["rhs"] - r["lhs"]
        r["failures"] = int(r["lhs"] > r["rhs"])
        r["ok"] = r["lhs"] <= r["rhs"]
    rows += _check_rows(bounds.rqstar_sum_checks(Q, args.x_max, force=args.force))
    out.rows = rows
    out.ok = all(r["ok"] for r in rows)


def cmd_petersson(args, out: Output) -> None:
    Q = _form(args)
    est = bounds.petersson_estimate(Q, args.n_trunc)
    out.result = {
        "p": est.p,
        "n_trunc": est.n_trunc,
        "lo": est.interval.lo,
        "hi": est.interval.hi,
        "head": est.head,
        "tail_r": est.tail_r,
        "tail_e": est.tail_e,
    }
    if est.p >= bounds.THEOREM_MIN_P or args.force:
        A = bounds.theorem2_bound(Q, force=True)
        out.result["theorem2_bound"] = A
        out.ok = est.interval.hi <= A


def cmd_threshold(args, out: Output) -> None:
    Q = _form(args)
    th = bounds.sufficient_threshold(Q, force=args.force)
    spot = bounds.threshold_spot_check(Q, th.refined, args.spot, force=args.force)
    out.result = {
        "analytic": str(th.analytic),
        "refined": str(th.refined),
        "refined_log2": th.refined_exponent,
        "spot_count": args.spot,
        "spot_min_lower_bound": spot,
    }
    if args.n_max:
        worst = bounds.largest_failing_n(Q, args.n_max, force=args.force)
        out.result["largest_nonpositive_rhs_upto_n_max"] = worst
    out.ok = spot > 0


def cmd_exceptions(args, out: Output) -> None:
    Q = _form(args)
    out.result = bounds.exceptions_sum_report(Q, args.n_max).to_dict()


def cmd_family_verify(args, out: Output) -> None:
    out.result = {"n_max": args.n_max}
    for p in args.p:
        es, ok = family.verify_family(p, args.n_max)
        out.ok &= ok
        row = es.to_dict()
        del row["N"]
        out.rows.append(row)
    if len(args.p) == 1:
        out.result.update(out.rows[0])


def cmd_max_tau(args, out: Output) -> None:
    X = parse_limit_expr(args.limit_expr) if args.limit_expr else args.x
    M, witness = max_tau(X)
    out.result = {"X": str(X), "M": M, "witness": witness}


def cmd_psi_table(args, out: Output) -> None:
    from .special import PSI_SUM_LIMIT, psi, psi_sum

    n = args.points
    xs = [args.x_max * (i + 1) / n for i in range(n)] if args.x_min is None else [
        args.x_min + (args.x_max - args.x_min) * i / (n - 1) for i in range(n)
    ]
    prev = math.inf
    for x in xs:
        s = psi_sum(x)
        tail = 9 * x**1.5 * math.exp(-4 * math.pi * x)
        ok = s <= PSI_SUM_LIMIT and (x < 0.5 or s <= tail) and s < prev
        prev = s
        out.ok &= ok
        out.rows.append({"x": x, "psi": psi(x), "psi_sum": s, "limit": PSI_SUM_LIMIT, "tail_bound": tail, "ok": ok})


COMMANDS: dict[str, Callable] = {
    "theta": cmd_theta,
    "eisenstein": cmd_eisenstein,
    "local-density": cmd_local_density,
    "siegel-check": cmd_siegel_check,
    "bounds": cmd_bounds,
    "petersson": cmd_petersson,
    "threshold": cmd_threshold,
    "exceptions": cmd_exceptions,
    "family-verify": cmd_family_verify,
    "max-tau": cmd_max_tau,
    "psi-table": cmd_psi_table,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ArgumentError(message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("table", "json", "csv"), default="table")
    common.add_argument("--output", "-o", help="write to this file instead of stdout")
    common.add_argument("--threads", type=_positive("--threads"), help="worker cap (default: QUATFORM_THREADS)")
    common.add_argument("--force", action="store_true", help="evaluate constants outside their proved range")

    parser = _Parser(prog="quatform", description="Quaternary forms of prime discriminant: counts, densities, bounds.")
    parser.add_argument("--version", action="version", version=f"quatform {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("theta", parents=[common], help="r_Q(n) with the Eisenstein/cusp split")
    _add_form_args(p)
    p.add_argument("--n-max", type=int, default=50)

    p = sub.add_parser("eisenstein", parents=[common], help="a_E(n) and its lower bound")
    _add_form_args(p)
    p.add_argument("--n-max", type=int, default=50)
    p.add_argument("--dual", action="store_true", help="also list a_E*(n)")

    p = sub.add_parser("local-density", parents=[common], help="beta_q(n) or the type split mod q^v")
    _add_form_args(p)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--n", type=_positive("--n"), required=True)
    p.add_argument("--v", type=_positive("--v"))
    p.add_argument("--mode", choices=("auto", "direct", "reduction"), default="auto")

    p = sub.add_parser("siegel-check", parents=[common], help="local-density product against a_E(n)")
    _add_form_args(p)
    p.add_argument("--n", type=_positive("--n"), nargs="+", required=True)
    p.add_argument("--cutoff", type=int, default=500)
    p.add_argument("--tol", type=float, default=0.01)

    p = sub.add_parser("bounds", parents=[common], help="bound constants and every supporting inequality")
    _add_form_args(p)
    p.add_argument("--x-max", type=_positive("--x-max"), default=2000)

    p = sub.add_parser("petersson", parents=[common], help="interval for the Petersson norm of the cusp part")
    _add_form_args(p)
    p.add_argument("--n-trunc", type=_positive("--n-trunc"))

    p = sub.add_parser("threshold", parents=[common], help="explicit N0 past which r_Q(n) > 0")
    _add_form_args(p)
    p.add_argument("--spot", type=_positive("--spot"), default=1000)
    p.add_argument("--n-max", type=int, default=0, help="also report the largest n <= this with a nonpositive bound")

    p = sub.add_parser("exceptions", parents=[common], help="n <= N with r_Q(n) = 0 and their sum")
    _add_form_args(p)
    p.add_argument("--n-max", type=_positive("--n-max"), default=500)

    p = sub.add_parser("family-verify", parents=[common], help="computed vs predicted exceptions of Q_p")
    p.add_argument("--p", type=int, nargs="+", required=True)
    p.add_argument("--n-max", type=_positive("--n-max"), default=2000)

    p = sub.add_parser("max-tau", parents=[common], help="M(X) = max tau(m) for m <= X")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--limit-expr", help='exact expression, e.g. "25.09*101^(35/6)"')
    g.add_argument("--x", type=_positive("--x"))

    p = sub.add_parser("psi-table", parents=[common], help="psi and its lattice sums on a grid")
    p.add_argument("--x-min", type=float)
    p.add_argument("--x-max", type=float, default=5.0)
    p.add_argument("--points", type=_positive("--points"), default=200)
    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except ArgumentError as exc:
        print(f"quatform: error: {exc}", file=sys.stderr)
        return EXIT_ARGUMENT
    _kernels.set_threads(args.threads)
    out = Output(args.command, args.format)
    try:
        COMMANDS[args.command](args, out)
    except HypothesisError as exc:
        print(f"quatform: hypothesis violated: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except VerificationError as exc:
        print(f"quatform: verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFICATION
    except (ArgumentError, ResourceError) as exc:
        print(f"quatform: error: {exc}", file=sys.stderr)
        return EXIT_ARGUMENT
    except QuatformError as exc:  # pragma: no cover - every subclass is handled above
        print(f"quatform: error: {exc}", file=sys.stderr)
        return EXIT_ARGUMENT
    text = out.render()
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if out.ok else EXIT_VERIFICATION


def main() -> None:
    sys.exit(run())
