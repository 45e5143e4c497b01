"""Purpose-built toy problems used across the test suite.

These exist to give tests analytically known quantities (Lipschitz
constants, optima, zero constraints) that the shipped problem families
do not expose.
"""

from __future__ import annotations

import numpy as np

from aspen.problems import FiniteSumProblem, UnitSphereConstraint


class QuadraticProblem(FiniteSumProblem):
    """f_i(x) = 0.5 (x - t_i)^T A (x - t_i) with linear constraint h(x) = Bx - d.

    The penalty gradient is Lipschitz with constant
    lam_max(A) + mu * lam_max(B^T B) <= (1 + mu) * L for
    L = max(lam_max(A), lam_max(B^T B)), which the step-size bound tests
    rely on.
    """

    def __init__(self, A: np.ndarray, shifts: np.ndarray, B: np.ndarray, d: np.ndarray):
        self.A = np.asarray(A, dtype=float)
        self.shifts = np.asarray(shifts, dtype=float)
        self.B = np.asarray(B, dtype=float)
        self.d = np.asarray(d, dtype=float)
        self.N, self.n = self.shifts.shape
        self.m = self.B.shape[0]

    @property
    def lipschitz_bound(self) -> float:
        la = float(np.linalg.eigvalsh(self.A).max())
        lb = float(np.linalg.eigvalsh(self.B.T @ self.B).max())
        return max(la, lb)

    def component_value(self, i, x):
        r = np.asarray(x, float) - self.shifts[i]
        return 0.5 * float(r @ self.A @ r)

    def component_gradient(self, i, x):
        r = np.asarray(x, float) - self.shifts[i]
        return self.A @ r

    def constraint_value(self, x):
        return self.B @ np.asarray(x, float) - self.d

    def constraint_jtv(self, x, v):
        return self.B.T @ np.asarray(v, float)


def unconstrained_quadratic(A: np.ndarray, shifts: np.ndarray) -> QuadraticProblem:
    """Quadratic with an identically-zero constraint (h(x) = 0 for all x)."""
    n = shifts.shape[1]
    return QuadraticProblem(A, shifts, B=np.zeros((1, n)), d=np.zeros(1))


class SphereShiftProblem(UnitSphereConstraint, FiniteSumProblem):
    """Single component f(x) = ||x - e1||^2 on the unit sphere.

    The unconstrained minimizer e1 is feasible, so the constrained
    optimum is exactly e1 with multiplier zero.
    """

    N = 1

    def __init__(self, n: int):
        self.n = n
        self.target = np.zeros(n)
        self.target[0] = 1.0
        self.known_solution = self.target.copy()

    def component_value(self, i, x):
        r = np.asarray(x, float) - self.target
        return float(r @ r)

    def component_gradient(self, i, x):
        return 2.0 * (np.asarray(x, float) - self.target)


class LinearProblem(FiniteSumProblem):
    """f_i(x) = c_i^T x, unconstrained; gradients are constant vectors."""

    def __init__(self, coefs: np.ndarray):
        self.coefs = np.asarray(coefs, dtype=float)
        self.N, self.n = self.coefs.shape
        self.m = 1

    def component_value(self, i, x):
        return float(self.coefs[i] @ np.asarray(x, float))

    def component_gradient(self, i, x):
        return self.coefs[i].copy()

    def constraint_value(self, x):
        return np.zeros(1)

    def constraint_jtv(self, x, v):
        return np.zeros(self.n)
