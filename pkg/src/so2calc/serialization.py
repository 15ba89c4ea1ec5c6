"""JSON encoding of every input and output, with rationals as "p/q" strings.

Parsers walk the document with a field path so that errors can say exactly
which entry is malformed, e.g. ``problem.objective.linear[0][1]``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional

from .chain_rules import ChainRuleResult, PointData, QuadraticMap
from .linalg import as_rational, rational_str
from .plq import Indicator, SupportPLQ
from .polyhedra import Polyhedron
from .second_order import PolyUnion
from .tilt import ProblemSpec, Verdict


class ParseError(ValueError):
    def __init__(self, path: str, message: str, line: Optional[int] = None):
        where = f"{path}: " if path else ""
        at = f" (line {line})" if line is not None else ""
        super().__init__(f"{where}{message}{at}")
        self.path = path
        self.line = line


# -- primitive values -------------------------------------------------------


def enc_q(x: Fraction) -> str:
    return rational_str(x)


def enc_vec(v) -> list[str]:
    return [enc_q(x) for x in v]


def enc_mat(M) -> list[list[str]]:
    return [enc_vec(r) for r in M]


def _field(obj: Any, key: str, path: str, default: Any = ...):
    if not isinstance(obj, dict):
        raise ParseError(path, "expected an object")
    if key not in obj:
        if default is ...:
            raise ParseError(f"{path}.{key}" if path else key, "missing field")
        return default
    return obj[key]


def dec_q(x: Any, path: str) -> Fraction:
    if isinstance(x, bool) or isinstance(x, float):
        raise ParseError(path, f"expected an exact rational (string or integer), got {x!r}")
    try:
        return as_rational(x)
    except ZeroDivisionError:
        raise ParseError(path, f"zero denominator in {x!r}") from None
    except (ValueError, TypeError):
        raise ParseError(path, f"not a rational: {x!r}") from None


def dec_vec(v: Any, path: str, length: Optional[int] = None) -> tuple[Fraction, ...]:
    if not isinstance(v, list):
        raise ParseError(path, "expected a list")
    if length is not None and len(v) != length:
        raise ParseError(path, f"expected {length} entries, got {len(v)}")
    return tuple(dec_q(x, f"{path}[{i}]") for i, x in enumerate(v))


def dec_mat(M: Any, path: str, rows: Optional[int] = None, cols: Optional[int] = None):
    if not isinstance(M, list):
        raise ParseError(path, "expected a list of rows")
    if rows is not None and len(M) != rows:
        raise ParseError(path, f"expected {rows} rows, got {len(M)}")
    out = tuple(dec_vec(r, f"{path}[{i}]", cols) for i, r in enumerate(M))
    if out and cols is None and len({len(r) for r in out}) > 1:
        raise ParseError(path, "rows have different lengths")
    return out


# -- polyhedra and functions ------------------------------------------------


def enc_polyhedron(P: Polyhedron, generators: bool = False) -> dict:
    d = {
        "dim": P.dim,
        "ineqs": [[enc_vec(a), enc_q(b)] for a, b in P.ineqs],
        "eqs": [[enc_vec(a), enc_q(b)] for a, b in P.eqs],
    }
    if generators:
        g = P.generators
        d["vertices"] = enc_mat(g.vertices)
        d["rays"] = enc_mat(g.rays)
        d["lineality"] = enc_mat(g.lineality)
    return d


def dec_polyhedron(d: Any, path: str) -> Polyhedron:
    dim = _field(d, "dim", path)
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 0:
        raise ParseError(f"{path}.dim", "expected a nonnegative integer")
    if "ineqs" in d or "eqs" in d:
        rows = {}
        for kind in ("ineqs", "eqs"):
            raw = d.get(kind, [])
            if not isinstance(raw, list):
                raise ParseError(f"{path}.{kind}", "expected a list of [a, b] pairs")
            rows[kind] = []
            for i, r in enumerate(raw):
                p = f"{path}.{kind}[{i}]"
                if not isinstance(r, list) or len(r) != 2:
                    raise ParseError(p, "expected a pair [a, b]")
                rows[kind].append((dec_vec(r[0], f"{p}[0]", dim), dec_q(r[1], f"{p}[1]")))
        return Polyhedron(dim, rows["ineqs"], rows["eqs"])
    if "vertices" in d:
        return Polyhedron.from_generators(
            dim,
            dec_mat(d["vertices"], f"{path}.vertices", None, dim),
            dec_mat(d.get("rays", []), f"{path}.rays", None, dim),
            dec_mat(d.get("lineality", []), f"{path}.lineality", None, dim),
        )
    raise ParseError(path, "a polyhedron needs ineqs/eqs or vertices")


def enc_theta(theta) -> dict:
    if isinstance(theta, Indicator):
        return {"type": "indicator", "Z": enc_polyhedron(theta.Z)}
    return {"type": "support_plq", "C": enc_polyhedron(theta.C), "Q": enc_mat(theta.Q)}


def dec_theta(d: Any, path: str = "theta"):
    kind = _field(d, "type", path)
    try:
        if kind == "indicator":
            return Indicator(dec_polyhedron(_field(d, "Z", path), f"{path}.Z"))
        if kind == "support_plq":
            C = dec_polyhedron(_field(d, "C", path), f"{path}.C")
            Q = d.get("Q")
            Q = dec_mat(Q, f"{path}.Q", C.dim, C.dim) if Q is not None else None
            return SupportPLQ(C, Q) if Q is not None else SupportPLQ.support(C)
    except ParseError:
        raise
    except ValueError as exc:
        raise ParseError(path, str(exc)) from None
    raise ParseError(f"{path}.type", f"unknown function type {kind!r}; expected 'indicator' or 'support_plq'")


def enc_inner(h) -> dict:
    if isinstance(h, QuadraticMap):
        return {
            "type": "quadratic",
            "hessians": [enc_mat(A) for A in h.hessians],
            "linear": enc_mat(h.linear),
            "constant": enc_vec(h.constant),
            "n_params": h.n_params,
        }
    return {
        "type": "point_data",
        "point": enc_vec(h.point),
        "values": enc_vec(h.values),
        "jacobian": enc_mat(h.jac),
        "hessians": [enc_mat(A) for A in h.hessians],
        "n_params": h.n_params,
    }


def dec_inner(d: Any, path: str):
    kind = _field(d, "type", path)
    n_params = _field(d, "n_params", path, 0)
    if not isinstance(n_params, int) or isinstance(n_params, bool) or n_params < 0:
        raise ParseError(f"{path}.n_params", "expected a nonnegative integer")
    try:
        if kind == "linear":
            A = dec_mat(_field(d, "A", path), f"{path}.A")
            if not A:
                raise ParseError(f"{path}.A", "a linear map needs at least one row; use 'quadratic' with n given")
            n = len(A[0])
            b = dec_vec(d.get("b", ["0"] * len(A)), f"{path}.b", len(A))
            zero = tuple(tuple(Fraction(0) for _ in range(n)) for _ in range(n))
            return QuadraticMap(tuple(zero for _ in A), A, b, n_params)
        if kind == "quadratic":
            linear = dec_mat(_field(d, "linear", path), f"{path}.linear")
            m = len(linear)
            n = len(linear[0]) if linear else _field(d, "n", path)
            hs = _field(d, "hessians", path, None)
            if hs is None:
                hs_dec = tuple(tuple(tuple(Fraction(0) for _ in range(n)) for _ in range(n)) for _ in range(m))
            else:
                if not isinstance(hs, list) or len(hs) != m:
                    raise ParseError(f"{path}.hessians", f"expected {m} matrices")
                hs_dec = tuple(dec_mat(A, f"{path}.hessians[{i}]", n, n) for i, A in enumerate(hs))
            c = dec_vec(_field(d, "constant", path, ["0"] * m), f"{path}.constant", m)
            if not linear:
                return _EmptyQuadratic(n)
            return QuadraticMap(hs_dec, linear, c, n_params)
        if kind == "point_data":
            point = dec_vec(_field(d, "point", path), f"{path}.point")
            N = len(point)
            values = dec_vec(_field(d, "values", path), f"{path}.values")
            m = len(values)
            jac = dec_mat(_field(d, "jacobian", path), f"{path}.jacobian", m, N)
            hs = _field(d, "hessians", path)
            if not isinstance(hs, list) or len(hs) != m:
                raise ParseError(f"{path}.hessians", f"expected {m} matrices")
            return PointData(point, values, jac, tuple(dec_mat(A, f"{path}.hessians[{i}]", N, N) for i, A in enumerate(hs)), n_params)
    except ParseError:
        raise
    except ValueError as exc:
        raise ParseError(path, str(exc)) from None
    raise ParseError(f"{path}.type", f"unknown map type {kind!r}; expected 'linear', 'quadratic' or 'point_data'")


def _EmptyQuadratic(n: int) -> PointData:
    """A map into Q^0 (no constraints) on n variables."""
    return PointData(tuple(Fraction(0) for _ in range(n)), (), (), (), 0)


def _rebase(h, x):
    """Point data is tied to its point; an empty map just needs the right one."""
    if isinstance(h, PointData) and h.m == 0:
        return PointData(x, (), (), (), 0)
    return h


def enc_problem(spec: ProblemSpec) -> dict:
    d = {
        "kind": spec.kind,
        "x": enc_vec(spec.x),
        "objective": enc_inner(spec.objective),
        "constraints": enc_inner(spec.constraints),
    }
    if spec.kind == "nlp":
        d["relations"] = list(spec.relations)
    else:
        d["theta"] = enc_theta(spec.theta)
    return d


def dec_problem(d: Any, path: str = "problem") -> ProblemSpec:
    kind = _field(d, "kind", path)
    if kind not in ("nlp", "composite"):
        raise ParseError(f"{path}.kind", f"expected 'nlp' or 'composite', got {kind!r}")
    x = dec_vec(_field(d, "x", path), f"{path}.x")
    objective = dec_inner(_field(d, "objective", path), f"{path}.objective")
    constraints = _rebase(dec_inner(_field(d, "constraints", path), f"{path}.constraints"), x)
    relations = ()
    theta = None
    if kind == "nlp":
        relations = _field(d, "relations", path)
        if not isinstance(relations, list):
            raise ParseError(f"{path}.relations", "expected a list of 'le'/'eq'")
    else:
        theta = dec_theta(_field(d, "theta", path), f"{path}.theta")
    try:
        return ProblemSpec(kind, x, objective, constraints, tuple(relations), theta)
    except ValueError as exc:
        raise ParseError(path, str(exc)) from None


# -- results ---------------------------------------------------------------


def enc_union(U: PolyUnion) -> dict:
    return {"dim": U.dim, "pieces": [enc_polyhedron(P, generators=True) for P in U.pieces]}


def dec_union(d: Any, path: str = "union") -> PolyUnion:
    dim = _field(d, "dim", path)
    pieces = _field(d, "pieces", path)
    if not isinstance(pieces, list):
        raise ParseError(f"{path}.pieces", "expected a list")
    return PolyUnion(dim, [dec_polyhedron(p, f"{path}.pieces[{i}]") for i, p in enumerate(pieces)])


def enc_verdict(v: Verdict) -> dict:
    return {
        "status": v.status,
        "reason": v.reason,
        "multiplier": None if v.multiplier is None else enc_vec(v.multiplier),
        "subspace": enc_mat(v.subspace),
        "direction": None if v.direction is None else enc_vec(v.direction),
        "value_witness": None if v.value_witness is None else enc_vec(v.value_witness),
        "matrix": None if v.matrix is None else enc_mat(v.matrix),
        "qc": dict(v.qc),
        "path": v.path,
        "cross_check": v.cross_check,
    }


def dec_verdict(d: Any, path: str = "verdict") -> Verdict:
    def opt(key, fn):
        x = _field(d, key, path, None)
        return None if x is None else fn(x, f"{path}.{key}")

    return Verdict(
        _field(d, "status", path),
        _field(d, "reason", path, ""),
        opt("multiplier", dec_vec),
        dec_mat(_field(d, "subspace", path, []), f"{path}.subspace"),
        opt("direction", dec_vec),
        opt("value_witness", dec_vec),
        opt("matrix", dec_mat),
        dict(_field(d, "qc", path, {})),
        _field(d, "path", path, ""),
        _field(d, "cross_check", path, None),
        [],
    )


def enc_chain(result: ChainRuleResult, directions) -> dict:
    return {
        "kind": result.kind,
        "hypotheses_verified": result.hypotheses_verified,
        "multipliers": [enc_vec(r.v) for r in result.representatives],
        "values": [{"u": enc_vec(u), "value": enc_union(result.value(u))} for u in directions],
    }


# -- reports ---------------------------------------------------------------


@dataclass
class Report:
    command: str
    status: str
    inputs: dict
    result: dict
    trace: list = field(default_factory=list)
    timings: Optional[dict] = None

    def to_dict(self) -> dict:
        d = {
            "command": self.command,
            "status": self.status,
            "inputs": self.inputs,
            "result": self.result,
            "trace": list(self.trace),
        }
        if self.timings is not None:
            d["timings"] = self.timings
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Report":
        return cls(
            _field(d, "command", "report"),
            _field(d, "status", "report"),
            _field(d, "inputs", "report"),
            _field(d, "result", "report"),
            list(_field(d, "trace", "report", [])),
            _field(d, "timings", "report", None),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    @classmethod
    def loads(cls, text: str) -> "Report":
        return cls.from_dict(load_json_text(text, "report"))


def load_json_text(text: str, source: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(source, f"invalid JSON: {exc.msg} at column {exc.colno}", exc.lineno) from None


def load_json_file(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(path, f"cannot read file: {exc.strerror}") from None
    return load_json_text(text, path)


__all__ = [
    "ParseError",
    "Report",
    "dec_inner",
    "dec_mat",
    "dec_polyhedron",
    "dec_problem",
    "dec_q",
    "dec_theta",
    "dec_union",
    "dec_vec",
    "dec_verdict",
    "enc_chain",
    "enc_inner",
    "enc_mat",
    "enc_polyhedron",
    "enc_problem",
    "enc_q",
    "enc_theta",
    "enc_union",
    "enc_vec",
    "enc_verdict",
    "load_json_file",
    "load_json_text",
]
