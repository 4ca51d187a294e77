"""Command-line surface: ``overconv <group> <command> [flags]``.

Exit status: 0 success, 1 a check failed, 2 the input did not parse,
3 precision ran out (the offending operation is named on stderr).
Result lines come first; human output ends with one ``#`` line carrying the
version and the request, ``--json`` emits a single JSON object instead.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction

from . import __version__
from .amice import amice_from_values, evaluate
from .complexes import BSComplexTemplate, TemplateError, cohomology, instantiate, utilde_fredholm
from .distributions import Distribution, act_left, amice_transform, fil_quotient, integrate_k
from .eichler_shimura import (canonical_degree_bound, es_equivariance_check, es_kernel, factor_weight_k_check)
from .fredholm import (NotSlopeAdapted, PadicMatrix, fredholm_det, newton_polygon, slope_decompose,
                       slope_factor, specialize_family)
from .monoid import MonoidMatrix, PeriodPoint
from .padic import PadicContext, PadicError, PrecisionError
from .rings import QP, CoeffRing
from .suites import SUITES
from .weights import Weight, WeightError, char_extend, integer_weight

EXIT_OK, EXIT_CHECK, EXIT_PARSE, EXIT_PRECISION = 0, 1, 2, 3


class InputError(Exception):
    """Input that does not parse under the documented grammars."""


class Report:
    def __init__(self, args):
        self.args = args
        self.lines: list[str] = []
        self.data: dict = {}
        self.passed = True

    def add(self, line: str):
        self.lines.append(line)

    def render(self) -> str:
        meta = {"version": __version__, "command": f"{self.args.group} {self.args.cmd}",
                "p": self.args.p, "N": self.args.N, "seed": self.args.seed}
        if self.args.json:
            return json.dumps({**meta, "pass": self.passed, "result": self.data}, sort_keys=True) + "\n"
        tail = " ".join(f"{k}={v}" for k, v in meta.items() if v is not None)
        return "\n".join(self.lines + [f"# overconv {tail}"]) + "\n"


# input helpers ------------------------------------------------------------------


def _read(path: str | None) -> str:
    if path is None:
        raise InputError("this command needs --in <path>")
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _load_json(path: str | None):
    try:
        return json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON: {exc}") from exc


def _parsed(what: str, fn, *a):
    try:
        return fn(*a)
    except (KeyError, TypeError, ValueError, PadicError) as exc:
        raise InputError(f"{what}: {exc}") from exc


def _check_prime(args, p: int):
    if args.p is not None and args.p != p:
        raise InputError(f"--p {args.p} does not match the input prime {p}")


def _ctx(args, default_N: int = 20) -> PadicContext:
    if args.p is None:
        raise InputError("this command needs --p")
    return _parsed("context", PadicContext, args.p, args.N or default_N)


def _weight(args, ctx: PadicContext | None = None) -> Weight:
    if args.weight:
        w = _parsed("weight", Weight.from_data, _load_json(args.weight))
        _check_prime(args, w.p)
        return w
    if args.k is None:
        raise InputError("give a weight with --k or --weight <path>")
    return integer_weight(args.k, ctx or _ctx(args))


def _distribution(args) -> Distribution:
    mu = _parsed("distribution", Distribution.from_data, _load_json(args.inp))
    _check_prime(args, mu.p)
    return mu


def _gamma(args, p: int) -> MonoidMatrix:
    if args.gamma is None:
        raise InputError("this command needs --gamma a,b,c,d")
    try:
        a, b, c, d = (int(x) for x in args.gamma.split(","))
    except ValueError as exc:
        raise InputError(f"--gamma must be four integers: {exc}") from exc
    return _parsed("gamma", MonoidMatrix, a, b, c, d, p)


def _period(args, ctx: PadicContext) -> PeriodPoint:
    if args.z is None:
        raise InputError("this command needs --z")
    return _parsed("period point", PeriodPoint.make, ctx, args.z, Fraction(args.w))


def _matrix(args) -> PadicMatrix:
    M = _parsed("matrix", PadicMatrix.from_jsonl, _read(args.inp))
    _check_prime(args, M.ring.p)
    return M


def _template(args) -> BSComplexTemplate:
    if args.p is None:
        raise InputError("templates need --p")
    return _parsed("template", BSComplexTemplate.from_data, _load_json(args.inp), args.p)


def _h(args) -> Fraction:
    if args.h is None:
        raise InputError("this command needs --h")
    return _parsed("slope", Fraction, args.h)


# rendering ------------------------------------------------------------------------


def signed_value(c):
    """The balanced representative of a Q_p element: |value| <= p^prec / 2 (times p^val)."""
    if c.val < 0:
        return c.to_fraction()
    mod = c.p ** c.prec
    r = c.residue(c.prec)
    return r - mod if 2 * r > mod else r


def format_scalar(c) -> str:
    if not hasattr(c, "unit"):
        return json.dumps(c.to_data())
    return str(signed_value(c)) if c.prec > 0 else "0"


def format_series(F, var: str = "T") -> str:
    """1 - 4*T + 3*T^2 style, zero coefficients omitted."""
    out = ""
    for i, c in enumerate(F.coeffs):
        if c.is_zero():
            continue
        v = signed_value(c)
        mono = "" if i == 0 else var + (f"^{i}" if i > 1 else "")
        mag = abs(v)
        body = str(mag) if not mono else (mono if mag == 1 else f"{mag}*{mono}")
        if not out:
            out = ("-" if v < 0 else "") + body
        else:
            out += (" - " if v < 0 else " + ") + body
    return out or "0"


# commands --------------------------------------------------------------------------


def cmd_weight_extend(args, rep: Report):
    w = _weight(args)
    if args.b is None:
        raise InputError("weight extend needs --b")
    v = char_extend(w, args.b, args.s)
    rep.add(w.ring.serialize(v) if w.ring.kind == QP else json.dumps(w.ring.serialize(v)))
    rep.data = {"value": w.ring.serialize(v), "certified_precision": v.prec}


def cmd_amice_roundtrip(args, rep: Report):
    if args.inp:
        data = _load_json(args.inp)
        try:
            s, values, p, N = int(data["s"]), [int(v) for v in data["values"]], int(data["p"]), int(data["N"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"values file: {exc}") from exc
        _check_prime(args, p)
        ctx = _parsed("context", PadicContext, p, N)
    else:
        ctx = _ctx(args)
        rng = random.Random(args.seed)
        s = args.s or 1
        values = [rng.randrange(ctx.p ** ctx.N) for _ in range(args.n or ctx.p ** (s + 1))]
    ring = CoeffRing.qp(ctx)
    f = amice_from_values(values, s, ring)
    back = [evaluate(f, x) for x in range(len(values))]
    ok = f.is_integral() and all(v.residue(v.prec) == x % ctx.p ** v.prec for v, x in zip(back, values))
    prec = min((v.prec for v in back), default=ctx.N)
    rep.passed = ok
    rep.add(f"{'PASS' if ok else 'FAIL'} roundtrip J={len(values)} s={s} certified_precision={prec}")
    rep.data = {"function": f.to_data(), "certified_precision": prec}


def cmd_dist_act(args, rep: Report):
    mu = _distribution(args)
    w = _weight(args, mu.ctx)
    out = act_left(_gamma(args, mu.p), mu, w)
    rep.data = out.to_data()
    rep.add(json.dumps(rep.data, sort_keys=True))


def cmd_dist_integrate(args, rep: Report):
    mu = _distribution(args)
    if args.k is None:
        raise InputError("dist integrate needs --k")
    P = integrate_k(mu, args.k)
    rep.data = P.to_data()
    rep.add(" + ".join(f"{format_scalar(c)}*X^{i}" for i, c in enumerate(P.coeffs)))


def cmd_dist_fil(args, rep: Report):
    mu = _distribution(args)
    if args.k is None:
        raise InputError("dist fil needs --k")
    q = fil_quotient(mu, args.k)
    rep.data = q.to_data()
    rep.add(json.dumps(rep.data, sort_keys=True))


def cmd_dist_amice_transform(args, rep: Report):
    mu = _distribution(args)
    coeffs = amice_transform(mu, args.n)
    rep.data = {"coeffs": [mu.ring.serialize(c) for c in coeffs]}
    rep.add(" + ".join(f"{format_scalar(c)}*T^{i}" for i, c in enumerate(coeffs)))


def cmd_es_kernel(args, rep: Report):
    mu = _distribution(args)
    w = _weight(args, mu.ctx)
    v = es_kernel(w, mu, _period(args, mu.ctx))
    rep.data = {"value": mu.ring.serialize(v), "certified_precision": v.prec}
    rep.add(format_scalar(v) + f"  (mod {mu.p}^{v.prec})")


def _report_check(rep: Report, r):
    rep.passed = r.passed
    rep.data = r.to_data()
    rep.add(f"{'PASS' if r.passed else 'FAIL'} {r.check} instance={r.instance} certified_precision={r.precision}")


def cmd_es_equivariance(args, rep: Report):
    mu = _distribution(args)
    w = _weight(args, mu.ctx)
    z = _period(args, mu.ctx)
    _report_check(rep, es_equivariance_check(w, mu, _gamma(args, mu.p), z))


def cmd_es_factor_k(args, rep: Report):
    mu = _distribution(args)
    if args.k is None:
        raise InputError("es factor-k needs --k")
    _report_check(rep, factor_weight_k_check(mu, args.k, _period(args, mu.ctx)))


def cmd_es_degree_bound(args, rep: Report):
    if args.p is None or args.n is None:
        raise InputError("es degree-bound needs --p and --n")
    d = _parsed("degree bound", canonical_degree_bound, args.n, args.p)
    rep.data = {"delta": str(d)}
    rep.add(str(d))


def cmd_fredholm_det(args, rep: Report):
    F = fredholm_det(_matrix(args))
    rep.data = {**F.to_data(), "certified_precision": F.precision()}
    rep.add(format_series(F) if F.ring.kind == QP else F.to_text())


def cmd_fredholm_polygon(args, rep: Report):
    poly = newton_polygon(fredholm_det(_matrix(args)))
    rep.data = poly.to_data()
    if poly.segments:
        rep.add(poly.to_text())
    if poly.resolved_below is not None:
        rep.add(f"resolved_below {poly.resolved_below}")


def cmd_fredholm_factor(args, rep: Report):
    F = fredholm_det(_matrix(args))
    fac = slope_factor(F, _h(args))
    rep.data = {"Q": fac.Q.to_data(), "S": fac.S.to_data(), "certified_precision": fac.precision}
    rep.add(f"Q = {format_series(fac.Q)}")
    rep.add(f"S = {format_series(fac.S)}")
    rep.add(f"certified_precision {fac.precision}")


def cmd_fredholm_decompose(args, rep: Report):
    M = _matrix(args)
    dec = slope_decompose(M, _h(args))
    rows = [[format_scalar(x) for x in r] for r in dec.projector.rows]
    rep.data = {"rank": dec.rank, "projector": rows, "certified_precision": dec.precision}
    rep.add(f"rank {dec.rank}")
    for r in rows:
        rep.add(" ".join(r))
    rep.add(f"certified_precision {dec.precision}")


def cmd_fredholm_specialize(args, rep: Report):
    M = _matrix(args)
    if args.point is None:
        raise InputError("fredholm specialize needs --point t1,t2,...")
    try:
        point = [M.ring.ctx(int(x)) for x in args.point.split(",")]
    except ValueError as exc:
        raise InputError(f"--point: {exc}") from exc
    F = fredholm_det(_parsed("specialization", specialize_family, M, point))
    rep.data = {**F.to_data(), "certified_precision": F.precision()}
    rep.add(format_series(F))


def _complex(args):
    t = _template(args)
    if args.k is None:
        raise InputError("complex commands need --k (filtration level)")
    # --k is the filtration level here; --weight-k picks z -> z^(k-2), default weight 2
    if args.weight:
        w = _weight(args)
    else:
        w = integer_weight(args.weight_k if args.weight_k is not None else 2, _ctx(args))
    return t, instantiate(t, w, args.k)


def cmd_complex_instantiate(args, rep: Report):
    _, C = _complex(args)
    logs = C.log_orders()
    rep.data = {"log_orders": logs}
    for i, x in enumerate(logs):
        rep.add(f"C^{i} log_p|C| = {x}")


def cmd_complex_cohomology(args, rep: Report):
    _, C = _complex(args)
    H = cohomology(C)
    rep.data = {"cohomology": H}
    for i, h in enumerate(H):
        rep.add(f"H^{i} = " + (" + ".join(f"Z/{d}" for d in h) if h else "0"))


def cmd_complex_fredholm(args, rep: Report):
    _, C = _complex(args)
    out = utilde_fredholm(C)
    rep.data = {"series": [{"degree": r.degree, **r.series.to_data(), "certified_precision": r.precision}
                           for r in out]}
    for r in out:
        rep.add(f"H^{r.degree}: {format_series(r.series)}  (mod {C.p}^{r.precision})")


def cmd_suite_all(args, rep: Report):
    if args.p is None:
        raise InputError("suite all needs --p")
    N = args.N or 12
    results = [run(args.p, N, args.seed) for _, run in SUITES]
    rep.passed = all(r.passed for r in results)
    rep.data = {"suites": [r.to_data() for r in results]}
    for r in results:
        rep.add(r.line())
    rep.add(f"{'PASS' if rep.passed else 'FAIL'}  all {len(results)} suites (seed {args.seed})")


COMMANDS = {
    "weight": {"extend": cmd_weight_extend},
    "amice": {"roundtrip": cmd_amice_roundtrip},
    "dist": {"act": cmd_dist_act, "integrate": cmd_dist_integrate, "fil": cmd_dist_fil,
             "amice-transform": cmd_dist_amice_transform},
    "es": {"kernel": cmd_es_kernel, "equivariance": cmd_es_equivariance, "factor-k": cmd_es_factor_k,
           "degree-bound": cmd_es_degree_bound},
    "fredholm": {"det": cmd_fredholm_det, "polygon": cmd_fredholm_polygon, "factor": cmd_fredholm_factor,
                 "decompose": cmd_fredholm_decompose, "specialize": cmd_fredholm_specialize},
    "complex": {"instantiate": cmd_complex_instantiate, "cohomology": cmd_complex_cohomology,
                "fredholm": cmd_complex_fredholm},
    "suite": {"all": cmd_suite_all},
}


def _common(parser: argparse.ArgumentParser):
    parser.add_argument("--p", type=int, help="the prime")
    parser.add_argument("--N", type=int, help="working precision")
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized suites (MT19937)")
    parser.add_argument("--json", action="store_true", help="machine-readable report")
    parser.add_argument("--in", dest="inp", help="input file")
    parser.add_argument("--out", help="write the report here instead of stdout")
    parser.add_argument("--k", type=int, help="integer weight or filtration level")
    parser.add_argument("--weight", help="weight file (JSON)")
    parser.add_argument("--weight-k", type=int, help="integer weight for complex commands")
    parser.add_argument("--gamma", help="monoid element a,b,c,d")
    parser.add_argument("--z", type=int, help="fundamental period (an integer multiple of p)")
    parser.add_argument("--w", default="1", help="radius of the period neighbourhood")
    parser.add_argument("--b", type=int, help="unit argument of the character")
    parser.add_argument("--s", type=int, help="radius s")
    parser.add_argument("--n", type=int, help="level, length or truncation")
    parser.add_argument("--h", help="slope bound (a rational)")
    parser.add_argument("--point", help="specialization point t1,t2,...")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="overconv", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"overconv {__version__}")
    groups = parser.add_subparsers(dest="group", required=True)
    for group, cmds in COMMANDS.items():
        gp = groups.add_parser(group)
        sub = gp.add_subparsers(dest="cmd", required=True)
        for name in cmds:
            _common(sub.add_parser(name))
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code not in (0, None) else EXIT_OK
    rep = Report(args)
    op = f"{args.group} {args.cmd}"
    try:
        COMMANDS[args.group][args.cmd](args, rep)
    except InputError as exc:
        print(f"overconv: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except PrecisionError as exc:
        print(f"overconv: precision exhausted in {op}: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except (NotSlopeAdapted, WeightError, TemplateError, PadicError, ValueError) as exc:
        print(f"overconv: {op} failed: {exc}", file=sys.stderr)
        return EXIT_CHECK
    text = rep.render()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if rep.passed else EXIT_CHECK


if __name__ == "__main__":
    raise SystemExit(main())
