# utils/instance_io.py
# Instance JSON <-> ProblemInstance.
#
# {"vqfp-schema": 1, "n": int,
#  "objectives": [{"A": [[..]], "a": [..], "a0": num, "B": [[..]], "b": [..], "b0": num}],
#  "constraints": [{"type": "affine", "a": [..], "b": num}
#                | {"type": "quadratic", "Q": [[..]], "c": [..], "d": num}
#                | {"type": "box", "lo": [..], "hi": [..]}]}
import json
import logging
import os
from pathlib import Path
from typing import Any, Dict

import numpy as np

from core.errors import DimensionError, ParseError, ValidationError
from core.model import (
    AffineConstraint, BoxConstraint, ProblemInstance, QuadraticConstraint, QuadraticFunction, RatioObjective,
)
from core.validate import validate_instance
from utils.config import RunConfig, default_config

logger = logging.getLogger("vqfp.instance_io")

SCHEMA_VERSION = 1


def _matrix(raw, name: str, where: str) -> np.ndarray:
    try:
        M = np.asarray(raw, dtype=float)
    except (TypeError, ValueError) as e:
        raise ParseError(f"{where}: {name} is not a numeric matrix") from e
    if M.ndim != 2:
        raise ParseError(f"{where}: {name} must be a 2-D array, got {M.ndim}-D")
    return M


def _vector(raw, name: str, where: str) -> np.ndarray:
    try:
        v = np.asarray(raw, dtype=float)
    except (TypeError, ValueError) as e:
        raise ParseError(f"{where}: {name} is not a numeric vector") from e
    if v.ndim != 1:
        raise ParseError(f"{where}: {name} must be a 1-D array")
    return v


def _scalar(raw, name: str, where: str) -> float:
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise ParseError(f"{where}: {name} must be a number")
    return float(raw)


def _field(obj: Dict[str, Any], key: str, where: str):
    if key not in obj:
        raise ParseError(f"{where}: missing field {key!r}")
    return obj[key]


def _symmetric(M: np.ndarray, invariant_index: int, sym_tol: float, name: str) -> np.ndarray:
    if M.shape[0] != M.shape[1]:
        raise ValidationError("shape", invariant_index, f"{name} is {M.shape[0]}x{M.shape[1]}, not square")
    gap = float(np.max(np.abs(M - M.T))) if M.size else 0.0
    if gap > sym_tol:
        raise ValidationError("symmetry", invariant_index, f"{name} is asymmetric by {gap:.3e} (limit {sym_tol:g})")
    return M


def _objective(raw: Dict[str, Any], i: int, sym_tol: float) -> RatioObjective:
    where = f"objectives[{i}]"
    A = _symmetric(_matrix(_field(raw, "A", where), "A", where), i, sym_tol, "A")
    B = _symmetric(_matrix(_field(raw, "B", where), "B", where), i, sym_tol, "B")
    f = QuadraticFunction(A, _vector(_field(raw, "a", where), "a", where), _scalar(_field(raw, "a0", where), "a0", where))
    g = QuadraticFunction(B, _vector(_field(raw, "b", where), "b", where), _scalar(_field(raw, "b0", where), "b0", where))
    return RatioObjective(f, g)


def _constraint(raw: Dict[str, Any], j: int, sym_tol: float):
    where = f"constraints[{j}]"
    kind = _field(raw, "type", where)
    if kind == "affine":
        return AffineConstraint(_vector(_field(raw, "a", where), "a", where), _scalar(_field(raw, "b", where), "b", where))
    if kind == "quadratic":
        Q = _symmetric(_matrix(_field(raw, "Q", where), "Q", where), j, sym_tol, "Q")
        return QuadraticConstraint(Q, _vector(_field(raw, "c", where), "c", where), _scalar(_field(raw, "d", where), "d", where))
    if kind == "box":
        return BoxConstraint(_vector(_field(raw, "lo", where), "lo", where), _vector(_field(raw, "hi", where), "hi", where))
    raise ParseError(f"{where}: unknown constraint type {kind!r}")


def instance_from_dict(data: Dict[str, Any], cfg: RunConfig | None = None) -> ProblemInstance:
    cfg = cfg or default_config()
    if not isinstance(data, dict):
        raise ParseError("instance must be a JSON object")
    version = data.get("vqfp-schema", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ParseError(f"unsupported vqfp-schema {version!r}; expected {SCHEMA_VERSION}")
    n = _field(data, "n", "instance")
    if isinstance(n, bool) or not isinstance(n, int):
        raise ParseError("instance: n must be an integer")
    objectives = _field(data, "objectives", "instance")
    constraints = data.get("constraints", [])
    if not isinstance(objectives, list) or not isinstance(constraints, list):
        raise ParseError("instance: objectives and constraints must be lists")
    try:
        p = ProblemInstance(
            n,
            tuple(_objective(o, i, cfg.sym_tol) for i, o in enumerate(objectives)),
            tuple(_constraint(c, j, cfg.sym_tol) for j, c in enumerate(constraints)),
        )
    except DimensionError as e:
        raise ValidationError("shape", None, str(e)) from e
    return validate_instance(p, cfg.psd_tol, cfg.g_pos_tol, cfg.jacobi_sweeps)


def load_instance(path: str | os.PathLike, cfg: RunConfig | None = None) -> ProblemInstance:
    path = Path(path)
    if not path.exists():
        raise ParseError(f"instance file not found: {path}")
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}: {e}") from e
    p = instance_from_dict(data, cfg)
    logger.info("loaded %s: n=%d m=%d rows=%d", path, p.n, p.m, p.ell)
    return p


def instance_to_dict(p: ProblemInstance) -> Dict[str, Any]:
    def con(c):
        if isinstance(c, AffineConstraint):
            return {"type": "affine", "a": c.a.tolist(), "b": c.b}
        if isinstance(c, QuadraticConstraint):
            return {"type": "quadratic", "Q": c.Q.tolist(), "c": c.c.tolist(), "d": c.d}
        return {"type": "box", "lo": c.lo.tolist(), "hi": c.hi.tolist()}

    return {
        "vqfp-schema": SCHEMA_VERSION,
        "n": p.n,
        "objectives": [
            {"A": o.f.Q.tolist(), "a": o.f.c.tolist(), "a0": o.f.d,
             "B": o.g.Q.tolist(), "b": o.g.c.tolist(), "b0": o.g.d}
            for o in p.objectives
        ],
        "constraints": [con(c) for c in p.constraints],
    }


def save_instance(p: ProblemInstance, path: str | os.PathLike) -> None:
    # json writes floats with repr, which round-trips every double exactly
    with open(path, "w", encoding="utf-8") as f:
        json.dump(instance_to_dict(p), f, indent=2)
