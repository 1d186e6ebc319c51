from __future__ import annotations

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from nsconic.errors import DimensionMismatch, NegativeQuadratic, NotPositiveDefinite, SingularSystem
from nsconic.linalg import (
    cholesky,
    congruence_eigenvalues,
    jacobi_eigh,
    loewner_between,
    loewner_sandwich,
    norm_dual,
    norm_induced,
    operator_norm,
    solve_general,
    solve_spd,
)


def random_spd(rng, n: int) -> np.ndarray:
    B = rng.standard_normal((n, n))
    return B @ B.T + n * np.eye(n)


def test_cholesky_identity():
    assert_allclose(cholesky(np.eye(3)).lower, np.eye(3))


def test_cholesky_reconstructs():
    S = np.array([[4.0, 2.0], [2.0, 3.0]])
    f = cholesky(S)
    assert_allclose(f.reconstruct(), S, rtol=1e-14)
    assert f.lower[0, 1] == 0.0


@pytest.mark.parametrize("S", [
    np.array([[1.0, 2.0], [2.0, 1.0]]),
    np.zeros((2, 2)),
    np.array([[1.0, 0.0], [0.0, np.nan]]),
])
def test_cholesky_rejects(S):
    with pytest.raises(NotPositiveDefinite):
        cholesky(S)


def test_cholesky_rejects_non_square():
    with pytest.raises(DimensionMismatch):
        cholesky(np.ones((2, 3)))


def test_solve_spd():
    v = np.array([3.0, -1.0, 2.0])
    assert_allclose(solve_spd(np.eye(3), v), v)
    assert_allclose(solve_spd(np.diag([2.0, 4.0]), [2.0, 4.0]), [1.0, 1.0])


def test_solve_spd_residual(rng):
    S = random_spd(rng, 5)
    rhs = rng.standard_normal(5)
    u = solve_spd(S, rhs)
    assert np.linalg.norm(S @ u - rhs) <= 1e-10 * (1.0 + np.linalg.norm(rhs))


def test_solve_general():
    assert_allclose(solve_general(np.eye(2), [1.0, 2.0]), [1.0, 2.0])
    assert_allclose(solve_general(np.array([[0.0, 1.0], [1.0, 0.0]]), [3.0, 5.0]), [5.0, 3.0])


def test_solve_general_singular():
    with pytest.raises(SingularSystem):
        solve_general(np.ones((2, 2)), [1.0, 2.0])


def test_norms():
    v = np.array([3.0, 4.0])
    assert norm_induced(v, np.eye(2)) == pytest.approx(5.0)
    assert norm_induced([1.0, 1.0], np.diag([4.0, 9.0])) == pytest.approx(math.sqrt(13.0))
    assert norm_dual([1.0, 0.0], np.diag([4.0, 9.0])) == pytest.approx(0.5)


def test_norm_induced_negative_form():
    with pytest.raises(NegativeQuadratic):
        norm_induced([1.0, 0.0], np.diag([-1.0, 1.0]))


def test_jacobi_matches_dense_eigensolver(rng):
    B = rng.standard_normal((6, 6))
    S = B + B.T
    w, V = jacobi_eigh(S)
    assert_allclose(w, np.linalg.eigvalsh(S), atol=1e-10)
    assert_allclose(V.T @ V, np.eye(6), atol=1e-12)
    assert_allclose(V @ np.diag(w) @ V.T, S, atol=1e-10)


def test_jacobi_is_deterministic(rng):
    B = rng.standard_normal((4, 4))
    S = B + B.T
    w1, V1 = jacobi_eigh(S)
    w2, V2 = jacobi_eigh(S.copy())
    assert np.array_equal(w1, w2)
    assert np.array_equal(V1, V2)


def test_operator_norm(rng):
    P = random_spd(rng, 4)
    assert operator_norm(P, P) == pytest.approx(1.0, rel=1e-12)
    assert operator_norm(np.zeros((4, 4)), P) == 0.0
    B = rng.standard_normal((4, 4))
    Q = B + B.T
    assert operator_norm(Q, np.eye(4)) == pytest.approx(np.max(np.abs(np.linalg.eigvalsh(Q))), rel=1e-10)


def test_operator_norm_scales_with_p(rng):
    P = random_spd(rng, 3)
    B = rng.standard_normal((3, 3))
    Q = B + B.T
    # ||Q||_{tP} = ||Q||_P / t
    assert operator_norm(Q, 4.0 * P) == pytest.approx(operator_norm(Q, P) / 4.0, rel=1e-10)


def test_loewner_sandwich():
    assert loewner_sandwich(np.eye(2), np.eye(2), 0.0)
    Q = np.diag([0.5, 1.5])
    assert loewner_sandwich(np.eye(2), Q, 0.5, slack=1e-12)
    assert not loewner_sandwich(np.eye(2), Q, 0.4)
    with pytest.raises(ValueError):
        loewner_sandwich(np.eye(2), Q, -0.1)


def test_sandwich_agrees_with_operator_norm(rng):
    for _ in range(100):
        P = random_spd(rng, 5)
        E = rng.standard_normal((5, 5))
        Q = P + 0.1 * (E + E.T)
        eps = operator_norm(P - Q, P)
        assert loewner_sandwich(P, Q, eps * (1.0 + 1e-9) + 1e-12)
        assert not loewner_sandwich(P, Q, eps * (1.0 - 1e-6))


def test_loewner_between_and_congruence(rng):
    P = random_spd(rng, 3)
    eig = congruence_eigenvalues(2.0 * P, P)
    assert_allclose(eig, [2.0, 2.0, 2.0], rtol=1e-10)
    assert loewner_between(P, 2.0 * P, 1.9, 2.1)
    assert not loewner_between(P, 2.0 * P, 0.5, 1.5)
