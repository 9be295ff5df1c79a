# Instance builders shared by the test modules.
import numpy as np

from core.model import BoxConstraint, ProblemInstance, QuadraticFunction, RatioObjective
from core.validate import validate_instance


def ratio(A, a, a0, B, b, b0) -> RatioObjective:
    return RatioObjective(QuadraticFunction(np.atleast_2d(A), np.atleast_1d(a), a0),
                          QuadraticFunction(np.atleast_2d(B), np.atleast_1d(b), b0))


def one_dim(f, g, lo, hi) -> ProblemInstance:
    """m = 1, n = 1 instance f/g on [lo, hi]; f and g are (Q, c, d) triples."""
    return ProblemInstance(1, (ratio(*f, *g),), (BoxConstraint([lo], [hi]),))


def trivial_instance(n: int, constraints=()) -> ProblemInstance:
    """Objective 0/1; for tests that only exercise the feasible set."""
    return ProblemInstance(n, (ratio(np.zeros((n, n)), np.zeros(n), 0.0, np.zeros((n, n)), np.zeros(n), 1.0),),
                           tuple(constraints))


def random_instance(rng: np.random.Generator, n: int, m: int, box: float = 1.0,
                    psd_numerators: bool = False) -> ProblemInstance:
    """Random validated instance on [-box, box]^n with min g_i >= 1.

    With `psd_numerators`, every A_i is PSD and f_i > 0 on the box, so every
    eigen pair gives real-valued H data.
    """
    objectives = []
    for _ in range(m):
        G = rng.standard_normal((n, n))
        if psd_numerators:
            A = G @ G.T / n
            a = rng.standard_normal(n)
            a0 = 1.0 + float(np.abs(a).sum()) * box
        else:
            A = (G + G.T) / 2.0
            a = rng.standard_normal(n)
            a0 = float(rng.standard_normal())
        L = rng.standard_normal((n, n))
        B = L @ L.T / n + 0.5 * np.eye(n)
        b = rng.standard_normal(n)
        b0 = 0.25 * float(b @ np.linalg.solve(B, b)) + 1.0 + float(rng.random())
        objectives.append(ratio(A, a, a0, B, b, b0))
    p = ProblemInstance(n, tuple(objectives), (BoxConstraint(-box * np.ones(n), box * np.ones(n)),))
    return validate_instance(p)


def random_point(rng: np.random.Generator, n: int, box: float = 1.0) -> np.ndarray:
    return rng.uniform(-box, box, n)


def dual_instance(rng: np.random.Generator, n: int, m: int):
    """Random instance on [-1, 1]^n with a dual-feasible (u, tau, lambda).

    u sits on the face x_0 = 1, whose row carries all of lambda. Numerators
    are convex and every ratio is <= 0 at u, so each F_i(u) is PSD.
    Returns (instance, u, tau, lambda).
    """
    u = rng.uniform(-1.0, 1.0, n)
    u[0] = 1.0
    tau = rng.uniform(0.2, 2.0, m)
    parts = []
    for _ in range(m):
        G = rng.standard_normal((n, n))
        L = rng.standard_normal((n, n))
        B = L @ L.T / n + 0.5 * np.eye(n)
        b = rng.standard_normal(n)
        b0 = 0.25 * float(b @ np.linalg.solve(B, b)) + 1.0 + float(rng.random())
        parts.append([G @ G.T / n, rng.standard_normal(n), B, b, b0, -float(rng.random())])
    residual = np.eye(n)[0].copy()
    for t, (A, a, B, b, _, rho) in zip(tau, parts):
        residual += t * (2.0 * A @ u + a - rho * (2.0 * B @ u + b))
    parts[0][1] = parts[0][1] - residual / tau[0]
    objectives = []
    for A, a, B, b, b0, rho in parts:
        g_u = float(u @ B @ u + b @ u + b0)
        a0 = rho * g_u - float(u @ A @ u) - float(a @ u)
        objectives.append(ratio(A, a, a0, B, b, b0))
    p = ProblemInstance(n, tuple(objectives), (BoxConstraint(-np.ones(n), np.ones(n)),))
    lam = np.zeros(2 * n)
    lam[0] = 1.0
    return validate_instance(p), u, tau, lam
