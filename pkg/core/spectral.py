"""
Symmetric eigendecompositions and the matrices built from them:
F_i(x), F(w, x), and the per-(i, k) rank-one data behind the H-matrix routes.

Eigenpairs of A_i and B_i are both sorted ascending and paired by sorted
position k. Certificates record that pairing.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass

import numpy as np

from core.errors import ConvergenceError, DimensionError, DomainError
from core.model import ProblemInstance, as_vector

logger = logging.getLogger("vqfp.spectral")

OFFDIAG_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class EigenDecomposition:
    eigenvalues: np.ndarray      # ascending
    eigenvectors: np.ndarray     # column k pairs with eigenvalues[k]
    sweeps: int = 0

    @property
    def n(self) -> int:
        return self.eigenvalues.shape[0]

    def reconstruct(self) -> np.ndarray:
        V = self.eigenvectors
        return V @ np.diag(self.eigenvalues) @ V.T

    def to_dict(self) -> dict:
        return {"eigenvalues": self.eigenvalues.tolist(),
                "eigenvectors": self.eigenvectors.tolist()}


def _rotate(A: np.ndarray, V: np.ndarray, p: int, q: int) -> None:
    apq = A[p, q]
    theta = (A[q, q] - A[p, p]) / (2.0 * apq)
    t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.sqrt(theta * theta + 1.0))
    c = 1.0 / np.sqrt(t * t + 1.0)
    s = t * c
    cp, cq = A[:, p].copy(), A[:, q].copy()
    A[:, p] = c * cp - s * cq
    A[:, q] = s * cp + c * cq
    rp, rq = A[p, :].copy(), A[q, :].copy()
    A[p, :] = c * rp - s * rq
    A[q, :] = s * rp + c * rq
    A[p, q] = A[q, p] = 0.0
    vp, vq = V[:, p].copy(), V[:, q].copy()
    V[:, p] = c * vp - s * vq
    V[:, q] = s * vp + c * vq


def eig_sym(M, max_sweeps: int = 30) -> EigenDecomposition:
    """Cyclic Jacobi eigendecomposition of a symmetric matrix.

    Sweeps visit (p, q) in row-major order, so identical input gives
    identical output. Eigenvectors are normalized to have their first
    nonzero component positive.
    """
    A = np.array(M, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError(f"eig_sym expects a square matrix, got {A.shape}")
    n = A.shape[0]
    A = (A + A.T) / 2.0
    V = np.eye(n)
    scale = np.linalg.norm(A)
    iu = np.triu_indices(n, k=1)

    sweeps = 0
    while True:
        off = np.sqrt(2.0 * np.sum(A[iu] ** 2))
        if off <= OFFDIAG_RTOL * scale:
            break
        if sweeps >= max_sweeps:
            raise ConvergenceError(
                f"Jacobi: off-diagonal norm {off:.3e} above {OFFDIAG_RTOL:.0e}*|M| after {sweeps} sweeps")
        for p in range(n - 1):
            for q in range(p + 1, n):
                if A[p, q] != 0.0:
                    _rotate(A, V, p, q)
        sweeps += 1

    order = np.argsort(np.diag(A), kind="stable")
    values = np.diag(A)[order].copy()
    V = V[:, order]
    for k in range(n):
        nz = np.flatnonzero(np.abs(V[:, k]) > 1e-12)
        if nz.size and V[nz[0], k] < 0:
            V[:, k] = -V[:, k]
    logger.debug("eig_sym n=%d converged in %d sweeps", n, sweeps)
    return EigenDecomposition(values, V, sweeps)


class PsdStatus(str, enum.Enum):
    POSITIVE_DEFINITE = "PositiveDefinite"
    POSITIVE_SEMIDEFINITE = "PositiveSemidefinite"
    INDEFINITE = "Indefinite"
    NEGATIVE_SEMIDEFINITE = "NegativeSemidefinite"
    NEGATIVE_DEFINITE = "NegativeDefinite"

    @property
    def is_psd(self) -> bool:
        return self in (PsdStatus.POSITIVE_DEFINITE, PsdStatus.POSITIVE_SEMIDEFINITE)


def effective_tol(eigenvalues: np.ndarray, tol: float) -> float:
    peak = float(np.max(np.abs(eigenvalues))) if eigenvalues.size else 0.0
    return tol * max(1.0, peak)


def psd_status(M, tol: float = 1e-9, eig: EigenDecomposition | None = None) -> PsdStatus:
    """Classify by extreme eigenvalues against +-tol * max(1, max|eigenvalue|)."""
    eig = eig or eig_sym(M)
    lam = eig.eigenvalues
    eps = effective_tol(lam, tol)
    lo, hi = float(lam[0]), float(lam[-1])
    if lo >= eps:
        return PsdStatus.POSITIVE_DEFINITE
    if lo >= -eps:
        return PsdStatus.POSITIVE_SEMIDEFINITE
    if hi <= -eps:
        return PsdStatus.NEGATIVE_DEFINITE
    if hi <= eps:
        return PsdStatus.NEGATIVE_SEMIDEFINITE
    return PsdStatus.INDEFINITE


def _ratio_at(p: ProblemInstance, i: int, x: np.ndarray) -> float:
    obj = p.objectives[i]
    g = obj.g.value(x)
    if not g > 0.0:
        raise DomainError(f"g_{i}(x) = {g!r} <= 0")
    return obj.f.value(x) / g


def build_Fi(p: ProblemInstance, i: int, x) -> np.ndarray:
    """A_i - (f_i(x)/g_i(x)) B_i"""
    x = as_vector(x, p.n, "x")
    obj = p.objectives[i]
    return obj.f.Q - _ratio_at(p, i, x) * obj.g.Q


def build_F(p: ProblemInstance, w, x) -> np.ndarray:
    """sum_i w_i F_i(x). With w = tau / g(x*) this is the matrix F-hat(x*)."""
    w = np.asarray(w, dtype=float).reshape(-1)
    if w.shape != (p.m,):
        raise DimensionError(f"weights must have length {p.m}, got {w.shape[0]}")
    if np.any(w <= 0):
        raise DomainError("weights must be strictly positive")
    x = as_vector(x, p.n, "x")
    return sum(w[i] * build_Fi(p, i, x) for i in range(p.m))


def objective_eigen(p: ProblemInstance, max_sweeps: int = 30) -> tuple[tuple[EigenDecomposition, EigenDecomposition], ...]:
    """Read-only table of (eig A_i, eig B_i), built once per instance before any fan-out."""
    return tuple((eig_sym(o.f.Q, max_sweeps), eig_sym(o.g.Q, max_sweeps)) for o in p.objectives)


@dataclass(frozen=True, eq=False)
class HMatrixData:
    i: int
    k: int
    mu_A: float
    mu_B: float
    ratio: float                       # f_i(x*)/g_i(x*)
    real_valued: bool
    xstar: np.ndarray | None = None
    a_plus: np.ndarray | None = None
    a_minus: np.ndarray | None = None
    alpha: np.ndarray | None = None
    beta: float | None = None
    Hbar: np.ndarray | None = None

    def value(self, x) -> float:
        """H(x) = x^T Hbar x - alpha^T x + beta"""
        x = np.asarray(x, dtype=float)
        return float(x @ self.Hbar @ x - self.alpha @ x + self.beta)

    def factored(self, x, xstar) -> float:
        d = np.asarray(x, dtype=float) - np.asarray(xstar, dtype=float)
        return float((d @ self.a_plus) * (d @ self.a_minus))

    def sym_part(self) -> np.ndarray:
        return (self.Hbar + self.Hbar.T) / 2.0

    def alpha_vanishes(self, tol: float) -> bool:
        """alpha = 0 up to tol relative to the size of a_plus a_minus^T x*."""
        scale = max(1.0, float(np.linalg.norm(self.a_plus) * np.linalg.norm(self.a_minus) * np.linalg.norm(self.xstar)))
        return float(np.max(np.abs(self.alpha))) <= tol * scale


def _clamp(v: float, tol: float) -> float:
    return 0.0 if -tol <= v < 0.0 else v


def build_H_data(p: ProblemInstance, i: int, k: int, xstar,
                 eigA: EigenDecomposition, eigB: EigenDecomposition,
                 zero_tol: float = 1e-12) -> HMatrixData:
    xstar = as_vector(xstar, p.n, "xstar")
    ratio = _ratio_at(p, i, xstar)
    mu_A = float(eigA.eigenvalues[k])
    mu_B = float(eigB.eigenvalues[k])
    ra = _clamp(mu_A, zero_tol)
    rb = _clamp(mu_B * ratio, zero_tol)
    if ra < 0.0 or rb < 0.0:
        return HMatrixData(i, k, mu_A, mu_B, ratio, real_valued=False, xstar=xstar)
    pk = eigA.eigenvectors[:, k]
    qk = eigB.eigenvectors[:, k]
    a_plus = np.sqrt(ra) * pk + np.sqrt(rb) * qk
    a_minus = np.sqrt(ra) * pk - np.sqrt(rb) * qk
    sp, sm = float(xstar @ a_plus), float(xstar @ a_minus)
    return HMatrixData(
        i, k, mu_A, mu_B, ratio, real_valued=True, xstar=xstar,
        a_plus=a_plus, a_minus=a_minus,
        alpha=sp * a_minus + sm * a_plus,
        beta=sp * sm,
        Hbar=np.outer(a_plus, a_minus),
    )


def entrywise_check(hd: HMatrixData, p: ProblemInstance, i: int, k: int, xstar,
                    eigA: EigenDecomposition, eigB: EigenDecomposition) -> float:
    """Largest gap between Hbar / alpha and their entry-by-entry expansions."""
    xstar = as_vector(xstar, p.n, "xstar")
    mu_A = max(float(eigA.eigenvalues[k]), 0.0)
    R = max(float(eigB.eigenvalues[k]) * hd.ratio, 0.0)
    pk = eigA.eigenvectors[:, k]
    qk = eigB.eigenvectors[:, k]
    cross = np.sqrt(mu_A * R)
    H_expanded = (mu_A * np.outer(pk, pk)
           + cross * (np.outer(qk, pk) - np.outer(pk, qk))
           - R * np.outer(qk, qk))
    diag_expanded = mu_A * pk ** 2 - R * qk ** 2
    alpha_expanded = 2.0 * mu_A * float(xstar @ pk) * pk - 2.0 * R * float(xstar @ qk) * qk
    return float(max(np.max(np.abs(hd.Hbar - H_expanded)),
                     np.max(np.abs(np.diag(hd.Hbar) - diag_expanded)),
                     np.max(np.abs(hd.alpha - alpha_expanded))))
