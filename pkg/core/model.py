"""
Problem data for vector quadratic fractional programs.

Quadratics follow the convention q(x) = x^T Q x + c^T x + d with NO 1/2
factor, so the gradient is 2 Q x + c. Most QP libraries assume 1/2 x^T Q x;
instance files written for those must double Q first.

The feasible set is S = {x : h_j(x) <= 0 for all j}; the ambient open set
is all of R^n.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from core.errors import DimensionError, DomainError, ValidationError

__all__ = [
    "QuadraticFunction", "RatioObjective", "AffineConstraint", "QuadraticConstraint",
    "BoxConstraint", "Constraint", "ProblemInstance", "Feasible", "Infeasible",
    "as_vector", "evaluate_ratios", "ratio_gradient", "u_and_s", "identity_residual",
    "feasibility",
]


def as_vector(v, n: int | None = None, name: str = "vector") -> np.ndarray:
    arr = np.asarray(v, dtype=float).reshape(-1)
    if n is not None and arr.shape != (n,):
        raise DimensionError(f"{name} must have length {n}, got {arr.shape[0]}")
    return arr


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=float, copy=True)
    arr.flags.writeable = False
    return arr


def _square(M, name: str) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {M.shape}")
    return M


@dataclass(frozen=True, eq=False)
class QuadraticFunction:
    """x -> x^T Q x + c^T x + d. Q is symmetrized as (Q + Q^T) / 2."""

    Q: np.ndarray
    c: np.ndarray
    d: float = 0.0

    def __post_init__(self):
        Q = _square(self.Q, "Q")
        c = as_vector(self.c, Q.shape[0], "c")
        object.__setattr__(self, "Q", _freeze((Q + Q.T) / 2.0))
        object.__setattr__(self, "c", _freeze(c))
        object.__setattr__(self, "d", float(self.d))

    @property
    def n(self) -> int:
        return self.Q.shape[0]

    def value(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return float(x @ self.Q @ x + self.c @ x + self.d)

    def gradient(self, x) -> np.ndarray:
        return 2.0 * self.Q @ np.asarray(x, dtype=float) + self.c

    def __eq__(self, other) -> bool:
        if not isinstance(other, QuadraticFunction):
            return NotImplemented
        return (np.array_equal(self.Q, other.Q) and np.array_equal(self.c, other.c)
                and self.d == other.d)


@dataclass(frozen=True, eq=False)
class RatioObjective:
    f: QuadraticFunction
    g: QuadraticFunction

    def __post_init__(self):
        if self.f.n != self.g.n:
            raise DimensionError(f"numerator has n={self.f.n}, denominator n={self.g.n}")

    def __eq__(self, other) -> bool:
        if not isinstance(other, RatioObjective):
            return NotImplemented
        return self.f == other.f and self.g == other.g


@dataclass(frozen=True, eq=False)
class AffineConstraint:
    """a^T x + b <= 0"""

    a: np.ndarray
    b: float = 0.0
    kind = "affine"

    def __post_init__(self):
        object.__setattr__(self, "a", _freeze(as_vector(self.a, name="a")))
        object.__setattr__(self, "b", float(self.b))

    @property
    def n(self) -> int:
        return self.a.shape[0]

    def value(self, x) -> float:
        return float(self.a @ np.asarray(x, dtype=float) + self.b)

    def gradient(self, x) -> np.ndarray:
        return np.array(self.a)

    def __eq__(self, other) -> bool:
        if not isinstance(other, AffineConstraint):
            return NotImplemented
        return np.array_equal(self.a, other.a) and self.b == other.b


@dataclass(frozen=True, eq=False)
class QuadraticConstraint:
    """x^T Q x + c^T x + d <= 0 with Q positive semidefinite."""

    Q: np.ndarray
    c: np.ndarray
    d: float = 0.0
    kind = "quadratic"

    def __post_init__(self):
        q = QuadraticFunction(self.Q, self.c, self.d)
        object.__setattr__(self, "Q", q.Q)
        object.__setattr__(self, "c", q.c)
        object.__setattr__(self, "d", q.d)

    @property
    def n(self) -> int:
        return self.Q.shape[0]

    @property
    def function(self) -> QuadraticFunction:
        return QuadraticFunction(self.Q, self.c, self.d)

    def value(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return float(x @ self.Q @ x + self.c @ x + self.d)

    def gradient(self, x) -> np.ndarray:
        return 2.0 * self.Q @ np.asarray(x, dtype=float) + self.c

    def __eq__(self, other) -> bool:
        if not isinstance(other, QuadraticConstraint):
            return NotImplemented
        return self.function == other.function


@dataclass(frozen=True, eq=False)
class BoxConstraint:
    """lo <= x <= hi, expanded to 2n affine rows (all upper rows, then all lower rows)."""

    lo: np.ndarray
    hi: np.ndarray
    kind = "box"

    def __post_init__(self):
        lo = as_vector(self.lo, name="lo")
        hi = as_vector(self.hi, lo.shape[0], "hi")
        if np.any(lo > hi):
            k = int(np.argmax(lo > hi))
            raise ValidationError("box", k, f"lo[{k}]={lo[k]} exceeds hi[{k}]={hi[k]}")
        object.__setattr__(self, "lo", _freeze(lo))
        object.__setattr__(self, "hi", _freeze(hi))

    @property
    def n(self) -> int:
        return self.lo.shape[0]

    def rows(self) -> list[AffineConstraint]:
        eye = np.eye(self.n)
        upper = [AffineConstraint(eye[k], -self.hi[k]) for k in range(self.n)]
        lower = [AffineConstraint(-eye[k], self.lo[k]) for k in range(self.n)]
        return upper + lower

    def __eq__(self, other) -> bool:
        if not isinstance(other, BoxConstraint):
            return NotImplemented
        return np.array_equal(self.lo, other.lo) and np.array_equal(self.hi, other.hi)


Constraint = Union[AffineConstraint, QuadraticConstraint, BoxConstraint]
Row = Union[AffineConstraint, QuadraticConstraint]


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    """m ratio objectives and the constraint list as given; `rows` is the
    expanded list h_1..h_l that every downstream consumer indexes."""

    n: int
    objectives: tuple[RatioObjective, ...]
    constraints: tuple[Constraint, ...] = ()
    rows: tuple[Row, ...] = field(init=False)
    row_origin: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "objectives", tuple(self.objectives))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        if self.n < 1:
            raise ValidationError("shape", None, "n must be >= 1")
        if not self.objectives:
            raise ValidationError("shape", None, "at least one objective is required")
        for i, obj in enumerate(self.objectives):
            if obj.f.n != self.n:
                raise ValidationError("shape", i, f"objective has n={obj.f.n}, instance n={self.n}")
        rows: list[Row] = []
        origin: list[int] = []
        for j, con in enumerate(self.constraints):
            if con.n != self.n:
                raise ValidationError("shape", j, f"constraint has n={con.n}, instance n={self.n}")
            expanded = con.rows() if isinstance(con, BoxConstraint) else [con]
            rows.extend(expanded)
            origin.extend([j] * len(expanded))
        object.__setattr__(self, "rows", tuple(rows))
        object.__setattr__(self, "row_origin", tuple(origin))

    @property
    def m(self) -> int:
        return len(self.objectives)

    @property
    def ell(self) -> int:
        return len(self.rows)

    def h(self, x) -> np.ndarray:
        x = as_vector(x, self.n, "x")
        return np.array([r.value(x) for r in self.rows], dtype=float)

    def h_jacobian(self, x) -> np.ndarray:
        x = as_vector(x, self.n, "x")
        if not self.rows:
            return np.zeros((0, self.n))
        return np.vstack([r.gradient(x) for r in self.rows])

    def f_values(self, x) -> np.ndarray:
        return np.array([o.f.value(x) for o in self.objectives])

    def g_values(self, x) -> np.ndarray:
        return np.array([o.g.value(x) for o in self.objectives])

    def explicit_box(self) -> tuple[np.ndarray, np.ndarray] | None:
        """Intersection of the Box constraints, or None when there are none."""
        boxes = [c for c in self.constraints if isinstance(c, BoxConstraint)]
        if not boxes:
            return None
        lo = np.max([b.lo for b in boxes], axis=0)
        hi = np.min([b.hi for b in boxes], axis=0)
        return lo, hi

    def __eq__(self, other) -> bool:
        if not isinstance(other, ProblemInstance):
            return NotImplemented
        return (self.n == other.n and self.objectives == other.objectives
                and self.constraints == other.constraints)


def _positive_denominators(p: ProblemInstance, x: np.ndarray, which: Sequence[int] | None = None) -> np.ndarray:
    g = p.g_values(x)
    idx = range(p.m) if which is None else which
    bad = [i for i in idx if not g[i] > 0.0]
    if bad:
        raise DomainError(f"g_{bad[0]}(x) = {g[bad[0]]!r} <= 0 at x = {x.tolist()}")
    return g


def evaluate_ratios(p: ProblemInstance, x) -> np.ndarray:
    x = as_vector(x, p.n, "x")
    g = _positive_denominators(p, x)
    return p.f_values(x) / g


def ratio_gradient(p: ProblemInstance, x) -> np.ndarray:
    """Row i is (grad f_i * g_i - grad g_i * f_i) / g_i^2."""
    x = as_vector(x, p.n, "x")
    g = _positive_denominators(p, x)
    f = p.f_values(x)
    rows = [(o.f.gradient(x) * g[i] - o.g.gradient(x) * f[i]) / g[i] ** 2
            for i, o in enumerate(p.objectives)]
    return np.vstack(rows)


def u_and_s(p: ProblemInstance, i: int, x, xstar) -> tuple[float, float]:
    """u_i = g_i(x*)/g_i(x) and s_i = (x-x*)^T [A_i - (f_i/g_i)(x*) B_i] (x-x*) / g_i(x)."""
    x = as_vector(x, p.n, "x")
    xstar = as_vector(xstar, p.n, "xstar")
    obj = p.objectives[i]
    gx, gs = obj.g.value(x), obj.g.value(xstar)
    if not (gx > 0.0 and gs > 0.0):
        raise DomainError(f"g_{i} not positive: g(x)={gx!r}, g(x*)={gs!r}")
    alpha = obj.f.value(xstar) / gs
    d = x - xstar
    s = float(d @ (obj.f.Q - alpha * obj.g.Q) @ d) / gx
    return gs / gx, s


def identity_residual(p: ProblemInstance, i: int, x, xstar) -> float:
    x = as_vector(x, p.n, "x")
    xstar = as_vector(xstar, p.n, "xstar")
    u, s = u_and_s(p, i, x, xstar)
    obj = p.objectives[i]
    lhs = obj.f.value(x) / obj.g.value(x) - obj.f.value(xstar) / obj.g.value(xstar)
    grad = ratio_gradient(p, xstar)[i]
    return abs(lhs - u * float(grad @ (x - xstar)) - s)


@dataclass(frozen=True)
class Feasible:
    feasible = True


@dataclass(frozen=True)
class Infeasible:
    violated: tuple[int, ...]
    margins: tuple[float, ...]
    feasible = False


def feasibility(p: ProblemInstance, x, tol: float = 1e-9) -> Feasible | Infeasible:
    h = p.h(x)
    bad = np.flatnonzero(h > tol)
    if bad.size == 0:
        return Feasible()
    return Infeasible(tuple(int(j) for j in bad), tuple(float(h[j]) for j in bad))
