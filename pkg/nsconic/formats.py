"""Problem files (JSON), trace files (CSV) and the solution payload."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Sequence, Union

import numpy as np

from .central_path import ConicProblem, NeighborhoodReport
from .cones import Cone, ExponentialCone, NonnegOrthant, PowerCone, product
from .errors import DimensionMismatch, ParseError, UnknownConeType

PathLike = Union[str, Path]

TRACE_COLUMNS = [
    "iter",
    "mu_e",
    "res_norm",
    "tau",
    "kappa",
    "delta_p_norm_x",
    "alpha",
    "gamma",
    "a1",
    "a2",
    "a3",
    "a4",
    "a5",
    "verdict_failures",
    "nu",
    "beta",
    "eta",
]


def _fmt(v: float) -> str:
    return "%.17g" % float(v)


def _require(doc: dict, key: str, path: str):
    if key not in doc:
        raise ParseError("missing key", path=path, field=key)
    return doc[key]


def _as_int(value, path: str, field: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"expected an integer, got {value!r}", path=path, field=field)
    return value


def _as_float(value, path: str, field: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(f"expected a number, got {value!r}", path=path, field=field)
    out = float(value)
    if not math.isfinite(out):
        raise ParseError(f"non-finite number {value!r}", path=path, field=field)
    return out


def _vector(doc: dict, key: str, size: int, path: str) -> np.ndarray:
    raw = _require(doc, key, path)
    if not isinstance(raw, list):
        raise ParseError("expected a list", path=path, field=key)
    if len(raw) != size:
        raise DimensionMismatch(f"{key} has length {len(raw)}, expected {size}")
    return np.array([_as_float(v, path, f"{key}[{i}]") for i, v in enumerate(raw)], dtype=float)


def cone_from_dict(spec: Any, path: str = "", field: str = "cones") -> Cone:
    if not isinstance(spec, dict) or "type" not in spec:
        raise ParseError("cone entry must be an object with a 'type'", path=path, field=field)
    kind = spec["type"]
    if kind == "nonneg":
        dim = _as_int(_require(spec, "dim", path), path, f"{field}.dim")
        if dim < 1:
            raise ParseError(f"orthant dimension must be at least 1, got {dim}", path=path, field=f"{field}.dim")
        return NonnegOrthant(dim)
    if kind in ("exp", "pow"):
        if "dim" in spec and spec["dim"] != 3:
            raise DimensionMismatch(f"{kind} cone has dimension 3, file says {spec['dim']}")
        if kind == "exp":
            return ExponentialCone()
        a = _as_float(_require(spec, "alpha", path), path, f"{field}.alpha")
        if not 0.0 < a < 1.0:
            raise UnknownConeType(f"power cone exponent must lie in (0, 1), got {a}")
        return PowerCone(a)
    raise UnknownConeType(f"unknown cone type {kind!r}")


def cone_to_list(cone: Cone) -> List[dict]:
    out: List[dict] = []
    for _, leaf in cone.blocks():
        if isinstance(leaf, NonnegOrthant):
            out.append({"type": "nonneg", "dim": leaf.dim})
        elif isinstance(leaf, ExponentialCone):
            out.append({"type": "exp", "dim": 3})
        elif isinstance(leaf, PowerCone):
            out.append({"type": "pow", "dim": 3, "alpha": float(leaf.alpha)})
        else:
            raise UnknownConeType(f"cannot serialize cone {leaf!r}")
    return out


def problem_from_dict(doc: Any, path: str = "", name: str = "") -> ConicProblem:
    """Dense A from [row, col, value] triplets; duplicates are summed."""
    if not isinstance(doc, dict):
        raise ParseError("top level must be a JSON object", path=path)
    m = _as_int(_require(doc, "m", path), path, "m")
    n = _as_int(_require(doc, "n", path), path, "n")
    if m < 0 or n < 1:
        raise ParseError(f"need m >= 0 and n >= 1, got m={m}, n={n}", path=path)
    triplets = _require(doc, "A", path)
    if not isinstance(triplets, list):
        raise ParseError("expected a list of [row, col, value]", path=path, field="A")
    A = np.zeros((m, n))
    for k, t in enumerate(triplets):
        where = f"A[{k}]"
        if not isinstance(t, list) or len(t) != 3:
            raise ParseError("expected [row, col, value]", path=path, field=where)
        i = _as_int(t[0], path, where)
        j = _as_int(t[1], path, where)
        if not (0 <= i < m and 0 <= j < n):
            raise ParseError(f"index ({i}, {j}) out of range for {m}x{n}", path=path, field=where)
        A[i, j] += _as_float(t[2], path, where)
    b = _vector(doc, "b", m, path)
    c = _vector(doc, "c", n, path)
    specs = _require(doc, "cones", path)
    if not isinstance(specs, list) or not specs:
        raise ParseError("expected a non-empty list", path=path, field="cones")
    cones = [cone_from_dict(s, path, f"cones[{k}]") for k, s in enumerate(specs)]
    cone = product(cones)
    if cone.dim != n:
        raise DimensionMismatch(f"cone dimensions sum to {cone.dim}, n = {n}")
    return ConicProblem(A, b, c, cone, name=str(doc.get("name", name)))


def _read_text(p: Path) -> str:
    try:
        return p.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise ParseError(f"cannot read file: {e}", path=str(p)) from e


def parse_problem(path: PathLike) -> ConicProblem:
    p = Path(path)
    text = _read_text(p)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON at line {e.lineno} column {e.colno}: {e.msg}", path=str(p)) from e
    return problem_from_dict(doc, str(p), name=p.stem)


def serialize_problem(problem: ConicProblem) -> dict:
    """ProblemFile document; json writes floats with shortest round-trip repr."""
    rows, cols = np.nonzero(problem.A)
    doc: Dict[str, Any] = {}
    if problem.name:
        doc["name"] = problem.name
    doc.update({
        "m": problem.m,
        "n": problem.n,
        "A": [[int(i), int(j), float(problem.A[i, j])] for i, j in zip(rows, cols)],
        "b": [float(v) for v in problem.b],
        "c": [float(v) for v in problem.c],
        "cones": cone_to_list(problem.cone),
    })
    return doc


def write_problem(problem: ConicProblem, path: PathLike) -> Path:
    p = Path(path)
    p.write_text(json.dumps(serialize_problem(problem), indent=2) + "\n", encoding="utf-8")
    return p


@dataclass
class TraceRow:
    """One CSV row; carries what the trace audit reads from an iteration record."""

    iteration: int
    mu_e: float
    res_norm: float
    tau: float
    kappa: float
    delta_p_norm_x: float
    alpha: float
    gamma: float
    assumptions: NeighborhoodReport
    verdict_failures: int = 0


@dataclass
class TraceData:
    rows: List[TraceRow]
    nu: float
    beta: float
    eta: float


def write_trace(records: Sequence, path: PathLike, *, nu: float, beta: float, eta: float) -> Path:
    p = Path(path)
    with p.open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(TRACE_COLUMNS)
        for rec in records:
            flags = [int(bool(f)) for f in rec.assumptions.flags()]
            w.writerow(
                [str(int(rec.iteration))]
                + [_fmt(v) for v in (rec.mu_e, rec.res_norm, rec.tau, rec.kappa, rec.delta_p_norm_x, rec.alpha, rec.gamma)]
                + [str(f) for f in flags]
                + [str(int(rec.verdict_failures)), _fmt(nu), _fmt(beta), _fmt(eta)]
            )
    return p


def _cell_float(row: dict, key: str, where: str, field: str) -> float:
    try:
        return float(row[key])
    except (TypeError, ValueError, KeyError) as e:
        raise ParseError(f"bad value {row.get(key)!r}", path=where, field=field) from e


def _cell_int(row: dict, key: str, where: str, field: str) -> int:
    try:
        return int(row[key])
    except (TypeError, ValueError, KeyError) as e:
        raise ParseError(f"bad integer {row.get(key)!r}", path=where, field=field) from e


def read_trace(path: PathLike) -> TraceData:
    p = Path(path)
    text = _read_text(p)
    reader = csv.DictReader(io.StringIO(text, newline=""))
    header = reader.fieldnames or []
    missing = [c for c in TRACE_COLUMNS if c not in header]
    if missing:
        raise ParseError(f"missing columns {missing}", path=str(p), field="header")
    rows: List[TraceRow] = []
    meta = None
    for lineno, raw in enumerate(reader, start=2):
        field = f"line {lineno}"
        flags = [_cell_int(raw, f"a{k}", str(p), field) for k in range(1, 6)]
        row_meta = tuple(_cell_float(raw, key, str(p), field) for key in ("nu", "beta", "eta"))
        meta = meta or row_meta
        rows.append(TraceRow(
            iteration=_cell_int(raw, "iter", str(p), field),
            mu_e=_cell_float(raw, "mu_e", str(p), field),
            res_norm=_cell_float(raw, "res_norm", str(p), field),
            tau=_cell_float(raw, "tau", str(p), field),
            kappa=_cell_float(raw, "kappa", str(p), field),
            delta_p_norm_x=_cell_float(raw, "delta_p_norm_x", str(p), field),
            alpha=_cell_float(raw, "alpha", str(p), field),
            gamma=_cell_float(raw, "gamma", str(p), field),
            assumptions=NeighborhoodReport.from_flags(flags, beta=row_meta[1], eta=row_meta[2]),
            verdict_failures=_cell_int(raw, "verdict_failures", str(p), field),
        ))
    if meta is None:
        raise ParseError("trace has no rows", path=str(p))
    return TraceData(rows, *meta)


def _vec(v) -> Any:
    return None if v is None else [float(t) for t in v]


def _finite_or_none(v: float) -> Any:
    return float(v) if math.isfinite(v) else None


def solution_payload(result) -> dict:
    """JSON-ready summary of a SolveResult, including the per-check verdict counts."""
    problem = result.problem
    payload: Dict[str, Any] = {
        "problem": {"name": problem.name, "m": problem.m, "n": problem.n, "nu": problem.nu},
        "status": result.status,
        "mode": result.mode,
        "iterations": result.iterations,
        "target_reached": result.target_reached,
        "parameters": {
            "alpha": result.parameters.alpha,
            "beta": result.parameters.beta,
            "gamma": result.parameters.gamma,
            "eta": result.parameters.eta,
        },
        "mu_e": result.mu_e,
        "res_norm": result.res_norm,
        "initial_res_norm": result.initial_res_norm,
        "tau": result.point.tau,
        "kappa": result.point.kappa,
        "objective": result.objective,
        "x": _vec(result.x),
        "y": _vec(result.y),
        "s": _vec(result.s),
        "certificate": {k: _finite_or_none(v) for k, v in result.classification.details.items()},
        "mu_e_trajectory": [rec.mu_e for rec in result.trace[:: max(1, len(result.trace) // 50)]],
    }
    if result.x is not None and result.status == "Optimal":
        payload["primal_infeasibility"] = float(np.linalg.norm(problem.A @ result.x - problem.b))
    verdicts = result.verdicts
    if verdicts:
        payload["verdicts"] = {
            "failures": result.verdict_failures,
            "summary": result.verdict_summary(),
            "first_failures": [v.to_dict() for v in verdicts if v.failed][:20],
        }
    return payload


def write_json(payload: dict, path: PathLike, pretty: bool = True) -> Path:
    p = Path(path)
    p.write_text(json.dumps(payload, indent=2 if pretty else None) + "\n", encoding="utf-8")
    return p
