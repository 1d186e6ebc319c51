"""Dense linear algebra used by the barrier, scaling and KKT layers.

Everything here works on small dense float64 arrays. A "symmetric matrix" is a
square ndarray that callers pass through `as_symmetric` before factorizing.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np
import scipy.linalg as sla

from .errors import DimensionMismatch, NegativeQuadratic, NotPositiveDefinite, SingularSystem

EPS = float(np.finfo(float).eps)
JACOBI_TOL = 1e-13
JACOBI_MAX_SWEEPS = 64
NEGATIVE_QUADRATIC_TOL = 1e-12


def as_symmetric(S) -> np.ndarray:
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1] or S.shape[0] < 1:
        raise DimensionMismatch(f"expected a non-empty square matrix, got shape {S.shape}")
    return 0.5 * (S + S.T)


@dataclass(frozen=True)
class CholeskyFactor:
    """Lower-triangular L with L @ L.T equal to the factorized matrix."""

    lower: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.lower.shape[0])

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        return sla.cho_solve((self.lower, True), rhs, check_finite=False)

    def whiten(self, Q: np.ndarray) -> np.ndarray:
        """Congruence L^{-1} Q L^{-T}."""
        t = sla.solve_triangular(self.lower, Q, lower=True, check_finite=False)
        m = sla.solve_triangular(self.lower, t.T, lower=True, check_finite=False).T
        return 0.5 * (m + m.T)

    def reconstruct(self) -> np.ndarray:
        return self.lower @ self.lower.T


@dataclass(frozen=True)
class LUFactor:
    lu: np.ndarray
    piv: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.lu.shape[0])

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        return sla.lu_solve((self.lu, self.piv), rhs, check_finite=False)


PDMatrix = Union[np.ndarray, CholeskyFactor]


def cholesky(S) -> CholeskyFactor:
    S = as_symmetric(S)
    if not np.all(np.isfinite(S)):
        raise NotPositiveDefinite("matrix has non-finite entries")
    n = S.shape[0]
    max_diag = float(np.max(np.diag(S)))
    if max_diag <= 0.0:
        raise NotPositiveDefinite(f"largest diagonal entry {max_diag:.3e} is not positive")
    try:
        L = sla.cholesky(S, lower=True, check_finite=False)
    except np.linalg.LinAlgError as e:
        raise NotPositiveDefinite(f"Cholesky failed: {e}") from e
    pivots = np.diag(L) ** 2
    tol = n * EPS * max_diag
    if float(np.min(pivots)) <= tol:
        raise NotPositiveDefinite(f"pivot {float(np.min(pivots)):.3e} below tolerance {tol:.3e}")
    return CholeskyFactor(np.tril(L))


def _factor(P: PDMatrix) -> CholeskyFactor:
    return P if isinstance(P, CholeskyFactor) else cholesky(P)


def solve_spd(S: PDMatrix, rhs) -> np.ndarray:
    return _factor(S).solve(np.asarray(rhs, dtype=float))


def lu_factor(M) -> LUFactor:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise SingularSystem("matrix has non-finite entries")
    n = M.shape[0]
    scale = float(np.max(np.abs(M))) if M.size else 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(M, check_finite=False)
    tol = n * EPS * scale
    smallest = float(np.min(np.abs(np.diag(lu))))
    if scale == 0.0 or smallest < tol:
        raise SingularSystem(f"pivot {smallest:.3e} below tolerance {tol:.3e}")
    return LUFactor(lu, piv)


def solve_general(M, rhs) -> np.ndarray:
    return lu_factor(M).solve(np.asarray(rhs, dtype=float))


def norm_induced(v, S) -> float:
    v = np.asarray(v, dtype=float)
    Sv = np.asarray(S, dtype=float) @ v
    q = float(v @ Sv)
    if q < -NEGATIVE_QUADRATIC_TOL * max(1.0, float(np.linalg.norm(v) * np.linalg.norm(Sv))):
        raise NegativeQuadratic(f"quadratic form is {q:.3e}")
    return math.sqrt(max(q, 0.0))


def norm_dual(v, S: PDMatrix) -> float:
    v = np.asarray(v, dtype=float)
    q = float(v @ _factor(S).solve(v))
    if q < -NEGATIVE_QUADRATIC_TOL * max(1.0, float(v @ v)):
        raise NegativeQuadratic(f"dual quadratic form is {q:.3e}")
    return math.sqrt(max(q, 0.0))


def jacobi_eigh(S, *, rel_tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS) -> Tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi eigen-decomposition of a symmetric matrix.

    Sweeps visit (p, q) pairs in row order above the diagonal, so results are
    reproducible bit for bit. Stops once the off-diagonal Frobenius mass drops
    below rel_tol times the Frobenius norm of the input. Returns eigenvalues in
    ascending order and the matching orthonormal eigenvectors as columns.
    """
    A = as_symmetric(S).copy()
    n = A.shape[0]
    V = np.eye(n)
    threshold = rel_tol * float(np.linalg.norm(A, "fro"))
    for _ in range(max_sweeps):
        off = math.sqrt(2.0 * float(np.sum(np.tril(A, -1) ** 2)))
        if off <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                phi = 0.5 * math.atan2(2.0 * apq, A[q, q] - A[p, p])
                c, s = math.cos(phi), math.sin(phi)
                R = np.array([[c, s], [-s, c]])
                idx = [p, q]
                A[:, idx] = A[:, idx] @ R
                A[idx, :] = R.T @ A[idx, :]
                A[p, q] = A[q, p] = 0.0
                V[:, idx] = V[:, idx] @ R
    eigenvalues = np.diag(A).copy()
    order = np.argsort(eigenvalues, kind="stable")
    return eigenvalues[order], V[:, order]


def congruence_eigenvalues(Q, P: PDMatrix) -> np.ndarray:
    """Eigenvalues of P^{-1/2} Q P^{-1/2}, via the Cholesky factor of P."""
    factor = _factor(P)
    Q = as_symmetric(Q)
    if Q.shape[0] != factor.dim:
        raise DimensionMismatch(f"Q is {Q.shape}, P has dimension {factor.dim}")
    eigenvalues, _ = jacobi_eigh(factor.whiten(Q))
    return eigenvalues


def operator_norm(Q, P: PDMatrix) -> float:
    """sup over ||u||_P <= 1 of ||Q u||*_P."""
    eigenvalues = congruence_eigenvalues(Q, P)
    return float(np.max(np.abs(eigenvalues)))


def loewner_between(P: PDMatrix, Q, lower: float, upper: float, slack: float = 0.0) -> bool:
    """True iff lower*P <= Q <= upper*P in the Loewner order, up to eigenvalue slack."""
    eigenvalues = congruence_eigenvalues(Q, P)
    return bool(eigenvalues[0] >= lower - slack and eigenvalues[-1] <= upper + slack)


def loewner_sandwich(P: PDMatrix, Q, eps: float, slack: float = 0.0) -> bool:
    if eps < 0:
        raise ValueError("eps must be non-negative")
    return loewner_between(P, Q, 1.0 - eps, 1.0 + eps, slack)
