"""
Dense two-phase tableau simplex with Bland's rule.

Contract: maximize c^T x subject to A_eq x = b_eq, A_ineq x <= b_ineq, x >= 0.
Free variables are the caller's business (split x = x+ - x-).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from core.errors import DimensionError, NumericalError

logger = logging.getLogger("vqfp.simplex")

PIVOT_TOL = 1e-10


@dataclass(frozen=True)
class LpOptimal:
    x: np.ndarray
    objective: float
    status = "optimal"


@dataclass(frozen=True)
class LpInfeasible:
    status = "infeasible"


@dataclass(frozen=True)
class LpUnbounded:
    status = "unbounded"


LpResult = LpOptimal | LpInfeasible | LpUnbounded


def _pivot(T: np.ndarray, row: int, col: int) -> None:
    T[row, :] /= T[row, col]
    for r in range(T.shape[0]):
        if r != row and T[r, col] != 0.0:
            T[r, :] -= T[r, col] * T[row, :]


def _entering(T: np.ndarray, allowed: int) -> int:
    # Bland: lowest index with negative reduced cost
    idx = np.flatnonzero(T[-1, :allowed] < -PIVOT_TOL)
    return int(idx[0]) if idx.size else -1


def _leaving(T: np.ndarray, basis: list[int], col: int) -> int:
    best, best_ratio = -1, np.inf
    for r in range(T.shape[0] - 1):
        a = T[r, col]
        if a > PIVOT_TOL:
            ratio = T[r, -1] / a
            if ratio < best_ratio - PIVOT_TOL or (abs(ratio - best_ratio) <= PIVOT_TOL and basis[r] < basis[best]):
                best, best_ratio = r, ratio
    return best


def _run(T: np.ndarray, basis: list[int], allowed: int, max_pivots: int) -> bool:
    """Minimize the objective row in place. Returns False when unbounded."""
    for _ in range(max_pivots):
        col = _entering(T, allowed)
        if col < 0:
            return True
        row = _leaving(T, basis, col)
        if row < 0:
            return False
        _pivot(T, row, col)
        basis[row] = col
    raise NumericalError(f"simplex exceeded {max_pivots} pivots (anti-cycling guard)")


def _price_out(T: np.ndarray, basis: list[int]) -> None:
    for r, j in enumerate(basis):
        if T[-1, j] != 0.0:
            T[-1, :] -= T[-1, j] * T[r, :]


def solve_linear_program(c, A_eq=None, b_eq=None, A_ineq=None, b_ineq=None,
                         max_pivots: int | None = None) -> LpResult:
    c = np.asarray(c, dtype=float).reshape(-1)
    n = c.shape[0]

    def block(A, b, name):
        if A is None or len(A) == 0:
            return np.zeros((0, n)), np.zeros(0)
        A = np.atleast_2d(np.asarray(A, dtype=float))
        b = np.asarray(b, dtype=float).reshape(-1)
        if A.shape[1] != n or A.shape[0] != b.shape[0]:
            raise DimensionError(f"{name}: shape {A.shape} incompatible with n={n}, rhs {b.shape}")
        return A, b

    Ae, be = block(A_eq, b_eq, "A_eq")
    Ai, bi = block(A_ineq, b_ineq, "A_ineq")
    n_eq, n_in = Ae.shape[0], Ai.shape[0]
    rows = n_eq + n_in

    # columns: x (n) | slacks (n_in) | artificials (added as needed)
    A = np.zeros((rows, n + n_in))
    A[:n_eq, :n] = Ae
    A[n_eq:, :n] = Ai
    A[n_eq:, n:] = np.eye(n_in)
    b = np.concatenate([be, bi])
    neg = b < 0
    A[neg] *= -1.0
    b[neg] *= -1.0

    basis: list[int] = []
    art_rows: list[int] = []
    for r in range(rows):
        slack = n + (r - n_eq) if r >= n_eq else -1
        if slack >= 0 and A[r, slack] == 1.0:
            basis.append(slack)
        else:
            basis.append(-1)
            art_rows.append(r)

    n_art = len(art_rows)
    width = n + n_in + n_art
    T = np.zeros((rows + 1, width + 1))
    T[:rows, :n + n_in] = A
    T[:rows, -1] = b
    for a, r in enumerate(art_rows):
        T[r, n + n_in + a] = 1.0
        basis[r] = n + n_in + a

    guard = max_pivots or 50 * (rows + width + 1)

    if n_art:
        T[-1, n + n_in:width] = 1.0
        _price_out(T, basis)
        _run(T, basis, width, guard)
        infeas = -T[-1, -1]
        if infeas > 1e-9 * (1.0 + float(np.max(np.abs(b), initial=0.0))):
            logger.debug("phase 1 ended with infeasibility %.3e", infeas)
            return LpInfeasible()
        # drive artificials out; drop redundant rows
        keep = []
        for r in range(rows):
            if basis[r] >= n + n_in:
                cand = np.flatnonzero(np.abs(T[r, :n + n_in]) > PIVOT_TOL)
                if cand.size == 0:
                    continue
                _pivot(T, r, int(cand[0]))
                basis[r] = int(cand[0])
            keep.append(r)
        T = np.vstack([T[keep][:, list(range(n + n_in)) + [width]], np.zeros((1, n + n_in + 1))])
        basis = [basis[r] for r in keep]

    T[-1, :] = 0.0
    T[-1, :n] = -c
    _price_out(T, basis)
    if not _run(T, basis, n + n_in, guard):
        return LpUnbounded()

    x = np.zeros(n + n_in)
    for r, j in enumerate(basis):
        x[j] = T[r, -1]
    x = x[:n]
    return LpOptimal(x, float(c @ x))
