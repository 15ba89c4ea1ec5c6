"""Command-line front end.

Exit codes: 0 success (TiltStable, or every check passed), 1 NotTiltStable
or a failed check, 2 Inapplicable/Inconclusive, 3 input error, 4 face
enumeration cap exceeded, 5 any other error.
"""

from __future__ import annotations

import argparse
import sys
import time
from contextlib import contextmanager
from fractions import Fraction
from typing import Optional, Sequence

from . import __version__
from .catalog import catalog, diamond, example_theta
from .chain_rules import (
    ChainRuleError,
    chain_amenable_upper,
    chain_full_rank,
    chain_partial_full_rank,
    check_first_order_qc,
    check_second_order_qc,
    direct_soc_when_available,
    first_order_chain,
    linear_map,
)
from .linalg import LinalgError, as_rational, matvec, transpose, vec, zeros
from .oracle import CoderivativeOracle
from .plq import PLQError, SupportPLQ
from .polyhedra import FaceLimitExceeded, Polyhedron, PolyhedronError
from .second_order import SecondOrderError, soc_at_zero, soc_system
from .serialization import (
    ParseError,
    Report,
    dec_inner,
    dec_mat,
    dec_problem,
    dec_theta,
    enc_chain,
    enc_polyhedron,
    enc_problem,
    enc_theta,
    enc_union,
    enc_vec,
    enc_verdict,
    load_json_file,
)
from .tilt import (
    INAPPLICABLE,
    INCONCLUSIVE,
    NOT_TILT_STABLE,
    SUFFICIENT_ONLY,
    TILT_STABLE,
    DecisionPathsDisagree,
    TiltError,
    tilt_sufficient,
    tilt_verdict_composite,
    tilt_verdict_nlp,
)

EXIT_OK, EXIT_FAIL, EXIT_UNDECIDED, EXIT_INPUT, EXIT_FACE_CAP, EXIT_ERROR = range(6)

STATUS_EXIT = {
    TILT_STABLE: EXIT_OK,
    SUFFICIENT_ONLY: EXIT_OK,
    NOT_TILT_STABLE: EXIT_FAIL,
    INAPPLICABLE: EXIT_UNDECIDED,
    INCONCLUSIVE: EXIT_UNDECIDED,
}

EXAMPLE_A = ((1, 0), (-1, 0), (0, 1), (0, -1))


class _Timer:
    def __init__(self):
        self.entries: dict[str, float] = {}

    @contextmanager
    def __call__(self, name: str):
        t0 = time.perf_counter()
        yield
        self.entries[name] = round(time.perf_counter() - t0, 6)


# -- argument helpers --------------------------------------------------------


def parse_vector(text: str, what: str) -> tuple[Fraction, ...]:
    text = text.strip()
    if not text:
        return ()
    parts = [p.strip() for p in text.split(",")]
    try:
        return tuple(as_rational(p) for p in parts)
    except ZeroDivisionError:
        raise ParseError(what, f"zero denominator in {text!r}") from None
    except (ValueError, TypeError):
        raise ParseError(what, f"not a comma-separated list of rationals: {text!r}") from None


def parse_point_pair(text: str) -> tuple[tuple, tuple]:
    """``z:v`` with comma-separated rationals on each side."""
    if text.count(":") != 1:
        raise ParseError("--at", "expected 'z:v', e.g. --at 0,0:1/2,1/2")
    z, v = text.split(":")
    return parse_vector(z, "--at (z)"), parse_vector(v, "--at (v)")


def _directions(args, m: int) -> list[tuple]:
    out = []
    if getattr(args, "directions", None):
        doc = load_json_file(args.directions)
        out += list(dec_mat(doc, args.directions, None, m))
    for u in getattr(args, "u", None) or []:
        d = parse_vector(u, "--u")
        if len(d) != m:
            raise ParseError("--u", f"expected {m} entries, got {len(d)}")
        out.append(d)
    if not out:
        raise ParseError("directions", "give --directions FILE or at least one --u")
    return out


# -- commands --------------------------------------------------------------


def cmd_analyze(args, timer: _Timer) -> Report:
    spec = dec_problem(load_json_file(args.problem))
    trace: list[str] = []
    result: dict = {}
    with timer("verdict"):
        if args.sufficient:
            verdict = tilt_sufficient(spec)
        elif spec.kind == "nlp":
            verdict = tilt_verdict_nlp(spec)
            if verdict.status != INAPPLICABLE:
                other = tilt_verdict_composite(spec)
                result["composite_path_agrees"] = other.certificate() == verdict.certificate()
                trace.append(
                    "composite (indicator encoding) path: "
                    + ("identical verdict and certificate" if result["composite_path_agrees"] else "DIFFERENT")
                )
        else:
            verdict = tilt_verdict_composite(spec)
    trace = verdict.trace + trace
    result["verdict"] = enc_verdict(verdict)
    if verdict.status == NOT_TILT_STABLE:
        trace.append("certificate: u ≠ 0 with ⟨u, H u⟩ ≤ 0 on the admissible subspace")
    return Report("analyze", verdict.status, {"problem": enc_problem(spec)}, result, trace)


def _theta_and_point(args):
    theta = dec_theta(load_json_file(args.theta))
    z, v = parse_point_pair(args.at)
    if len(z) != theta.dim or len(v) != theta.dim:
        raise ParseError("--at", f"z and v must have {theta.dim} entries")
    return theta, z, v


def cmd_soc(args, timer: _Timer) -> Report:
    theta, z, v = _theta_and_point(args)
    dirs = _directions(args, theta.dim)
    with timer("system"):
        sys_ = soc_system(theta, z, v)
    values = []
    with timer("values"):
        for u in dirs:
            values.append({"u": enc_vec(u), "value": enc_union(sys_.value(u))})
    result = {
        "critical_cone": enc_polyhedron(sys_.base_cone, generators=True),
        "faces": len(sys_.faces),
        "face_pairs": len(sys_.pairs),
        "values": values,
    }
    trace = [f"critical cone has {len(sys_.faces)} faces and {len(sys_.pairs)} face pairs"]
    inputs = {"theta": enc_theta(theta), "z": enc_vec(z), "v": enc_vec(v)}
    return Report("soc", "ok", inputs, result, trace)


def cmd_chain(args, timer: _Timer) -> Report:
    theta = dec_theta(load_json_file(args.theta))
    h = dec_inner(load_json_file(args.inner), "inner")
    if h.m != theta.dim:
        raise ParseError("inner", f"the inner map has {h.m} components but θ has dimension {theta.dim}")
    x = parse_vector(args.x, "--x")
    y = parse_vector(args.y, "--y")
    n = h.n_total - h.n_params
    dirs = _directions(args, n)
    with timer("rule"):
        if args.mode == "full-rank":
            results = {"full_rank": chain_full_rank(theta, h, x, y)}
        elif args.mode == "partial":
            par1, par2 = chain_partial_full_rank(theta, h, x, y)
            results = {"partial": par1, "extended_partial": par2}
        else:
            results = {"upper_estimate": chain_amenable_upper(theta, h, x, y, override=args.override)}
    result = {k: enc_chain(r, dirs) for k, r in results.items()}
    trace = [f"{k}: {r.kind}, {len(r.representatives)} multiplier representative(s)" for k, r in results.items()]
    inputs = {"theta": enc_theta(theta), "x": enc_vec(x), "y": enc_vec(y), "mode": args.mode}
    return Report("chain", "ok", inputs, result, trace)


def _oracle_rows(theta, z, v, dirs):
    sys_ = soc_system(theta, z, v)
    oracle = CoderivativeOracle(theta, z, v)
    rows = []
    for u in dirs:
        ok = sys_.value(u).equals(oracle.value(u))
        rows.append({"u": enc_vec(u), "agree": ok})
    return rows


def cmd_oracle_check(args, timer: _Timer) -> Report:
    entries = []
    if args.catalog:
        for inst in catalog():
            with timer(inst.name):
                entries.append({"name": inst.name, "directions": _oracle_rows(inst.theta, inst.z, inst.v, inst.directions)})
        inputs = {"catalog": True}
    else:
        if not args.theta or not args.at:
            raise ParseError("oracle-check", "give --catalog, or --theta and --at")
        theta, z, v = _theta_and_point(args)
        dirs = _directions(args, theta.dim)
        with timer("check"):
            entries.append({"name": "input", "directions": _oracle_rows(theta, z, v, dirs)})
        inputs = {"theta": enc_theta(theta), "z": enc_vec(z), "v": enc_vec(v)}
    bad = sum(1 for e in entries for r in e["directions"] if not r["agree"])
    total = sum(len(e["directions"]) for e in entries)
    trace = [f"{total - bad} of {total} directions agree"]
    return Report("oracle-check", "agree" if bad == 0 else "disagree", inputs, {"instances": entries, "disagreements": bad}, trace)


def strict_inclusion_checks(A: Sequence[Sequence] = EXAMPLE_A) -> tuple[dict, list[str]]:
    """The four checks of the strict-inclusion example, for linear h = A."""
    A = tuple(vec(r) for r in A)
    theta = example_theta()
    h = linear_map(A)
    x = y = (0, 0)
    checks, trace = {}, []

    B = first_order_chain(theta, h, x)
    checks["first_order_is_l1_ball"] = B.equals(diamond(2))
    trace.append(f"∂φ(0) has vertices {[enc_vec(p) for p in B.vertices]}")

    phi = SupportPLQ.support(B)
    at_zero = direct_soc_when_available(phi, x, y, (0, 0))
    at_u = direct_soc_when_available(phi, x, y, (0, 1))
    checks["direct_value_zero_is_plane"] = len(at_zero) == 1 and at_zero.pieces[0].equals(Polyhedron.whole(2))
    checks["direct_value_at_u_is_empty"] = at_u.is_empty()
    trace.append("∂²φ(0,0)(0) = ℝ² and ∂²φ(0,0)(0,1) = ∅ from φ = σ_B")

    upper = chain_amenable_upper(theta, h, x, y, override=True)
    target = matvec(transpose(A), (0, 0, 1, 0))
    wit = upper.witness((0, 1), target)
    checks["upper_estimate_contains_target"] = wit is not None
    if wit is not None:
        v, w = wit
        trace.append(f"upper estimate at u = (0,1) contains {enc_vec(target)} via v = {enc_vec(v)}, w = {enc_vec(w)}")

    qc2 = check_second_order_qc(theta, h, x, y)
    ok = not qc2.holds and qc2.witness is not None
    if ok:
        w, v = qc2.witness, qc2.multiplier
        ok = (
            w != zeros(4)
            and matvec(transpose(A), w) == (0, 0)
            and any(S.contains(w) for S in soc_at_zero(theta, zeros(4), v))
        )
        trace.append(f"second-order qualification fails: w = {enc_vec(w)} at v = {enc_vec(v)}")
    checks["second_order_qc_fails_with_witness"] = ok
    checks["first_order_qc_holds"] = check_first_order_qc(theta, h, x).holds
    return checks, trace


def cmd_repro(args, timer: _Timer) -> Report:
    if args.name != "strict-inclusion":
        raise ParseError("repro", f"unknown target {args.name!r}")
    with timer("checks"):
        checks, trace = strict_inclusion_checks()
    status = "pass" if all(checks.values()) else "fail"
    return Report("repro", status, {"name": args.name, "A": [enc_vec(r) for r in EXAMPLE_A]}, {"checks": checks}, trace)


# -- entry point -----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="so2calc", description="Exact second-order variational analysis of polyhedral and PLQ functions.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the JSON report here instead of standard output")
    common.add_argument("--trace", action="store_true", help="also print the derivation trace to standard error")
    common.add_argument("--timings", action="store_true", help="include wall-clock timings in the report")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", parents=[common], help="tilt-stability verdict for a problem file")
    a.add_argument("--problem", required=True)
    a.add_argument("--report", help="alias of --out")
    a.add_argument("--sufficient", action="store_true", help="use the sufficient test through the upper estimate")

    def add_dirs(q):
        q.add_argument("--directions", help="JSON file with a list of direction vectors")
        q.add_argument("--u", action="append", help="a direction, e.g. --u 1,0 (repeatable)")

    s = sub.add_parser("soc", parents=[common], help="second-order subdifferential values of θ")
    s.add_argument("--theta", required=True)
    s.add_argument("--at", required=True, help="z:v, e.g. 0,0:1/2,1/2")
    add_dirs(s)

    c = sub.add_parser("chain", parents=[common], help="second-order chain rules for θ∘h")
    c.add_argument("--theta", required=True)
    c.add_argument("--inner", required=True, help="JSON inner map")
    c.add_argument("--x", required=True)
    c.add_argument("--y", required=True)
    c.add_argument("--mode", choices=["full-rank", "partial", "upper"], default="full-rank")
    c.add_argument("--override", action="store_true", help="produce the upper estimate even if the second-order qualification fails")
    add_dirs(c)

    o = sub.add_parser("oracle-check", parents=[common], help="compare the face-pair formulas with the brute-force oracle")
    o.add_argument("--catalog", action="store_true", help="run the built-in catalog")
    o.add_argument("--theta")
    o.add_argument("--at")
    add_dirs(o)

    r = sub.add_parser("repro", parents=[common], help="reproduce an embedded worked example")
    r.add_argument("name", choices=["strict-inclusion"])
    return p


COMMANDS = {
    "analyze": cmd_analyze,
    "soc": cmd_soc,
    "chain": cmd_chain,
    "oracle-check": cmd_oracle_check,
    "repro": cmd_repro,
}


def _exit_code(report: Report) -> int:
    if report.command == "analyze":
        return STATUS_EXIT.get(report.status, EXIT_ERROR)
    return EXIT_OK if report.status in ("ok", "pass", "agree") else EXIT_FAIL


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    timer = _Timer()
    try:
        report = COMMANDS[args.command](args, timer)
    except ParseError as exc:
        print(f"so2calc: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except FaceLimitExceeded as exc:
        print(f"so2calc: {exc}", file=sys.stderr)
        return EXIT_FACE_CAP
    except DecisionPathsDisagree as exc:
        print(f"so2calc: internal defect: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (ChainRuleError, TiltError, PLQError, SecondOrderError, PolyhedronError, LinalgError, ValueError) as exc:
        print(f"so2calc: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if args.timings:
        report.timings = dict(timer.entries)
    if args.trace:
        for line in report.trace:
            print(line, file=sys.stderr)
    text = report.dumps()
    out = args.out or getattr(args, "report", None)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return _exit_code(report)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
