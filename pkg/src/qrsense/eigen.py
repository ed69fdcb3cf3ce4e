"""Cyclic Jacobi eigenvalue solver for small complex Hermitian matrices.

Works on a stack of matrices at once (shape ``(..., k, k)``) so that the
thousands of tiny sub-Gram matrices in a Monte-Carlo sweep are rotated in
lockstep instead of one at a time.
"""

from __future__ import annotations

import numpy as np

OFF_DIAGONAL_RTOL = 1e-12
MAX_SWEEPS = 100
HERMITIAN_ATOL = 1e-10


class ConvergenceError(RuntimeError):
    pass


def _off_norm(a: np.ndarray) -> np.ndarray:
    k = a.shape[-1]
    upper = np.triu_indices(k, 1)
    return np.sqrt(2.0 * np.sum(np.abs(a[..., upper[0], upper[1]]) ** 2, axis=-1))


def jacobi_eigh(gram, *, with_vectors: bool = False):
    """Eigen-decompose Hermitian matrices by cyclic Jacobi rotations.

    Parameters
    ----------
    gram : array_like, shape (..., k, k)
        Hermitian (or real symmetric) matrices.
    with_vectors : bool
        Also accumulate the unitary eigenvector matrices.

    Returns
    -------
    eigenvalues : ndarray, shape (..., k)
        Ascending eigenvalues.
    eigenvectors : ndarray, shape (..., k, k)
        Only when ``with_vectors``; column ``i`` pairs with eigenvalue ``i``.
    """
    a = np.array(gram, dtype=complex)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise ValueError(f"expected square matrices, got shape {a.shape}")
    scale = np.linalg.norm(a, axis=(-2, -1))
    skew = np.max(np.abs(a - np.conj(np.swapaxes(a, -1, -2))), axis=(-2, -1), initial=0.0)
    if np.any(skew > HERMITIAN_ATOL * np.maximum(scale, 1.0)):
        raise ValueError("matrix is not Hermitian")

    k = a.shape[-1]
    batch = a.shape[:-2]
    a = a.reshape((-1, k, k))
    scale = scale.reshape(-1)
    v = np.broadcast_to(np.eye(k, dtype=complex), a.shape).copy() if with_vectors else None

    # converged matrices are frozen, so each result is independent of
    # whatever else shares the batch
    pending = np.arange(a.shape[0])
    for _ in range(MAX_SWEEPS + 1):
        done = _off_norm(a[pending]) <= OFF_DIAGONAL_RTOL * scale[pending]
        pending = pending[~done]
        if pending.size == 0:
            break
        sub = a[pending]
        subv = v[pending] if with_vectors else None
        for p in range(k - 1):
            for q in range(p + 1, k):
                _rotate(sub, subv, p, q)
        a[pending] = sub
        if with_vectors:
            v[pending] = subv
    else:
        raise ConvergenceError(f"Jacobi iteration did not converge in {MAX_SWEEPS} sweeps")

    w = np.einsum("...ii->...i", a).real
    order = np.argsort(w, axis=-1, kind="stable")
    w = np.take_along_axis(w, order, axis=-1).reshape(batch + (k,))
    if not with_vectors:
        return w
    v = np.take_along_axis(v, order[:, None, :], axis=-1).reshape(batch + (k, k))
    return w, v


def _rotate(a: np.ndarray, v: np.ndarray | None, p: int, q: int) -> None:
    # Unitary J = diag(1, conj(phase)) @ [[c, s], [-s, c]] acting on (p, q);
    # the phase makes a[p, q] real, the real rotation then annihilates it.
    apq = a[:, p, q]
    r = np.abs(apq)
    active = r > 0.0
    if not np.any(active):
        return
    phase = np.exp(1j * np.angle(apq))
    diff = a[:, q, q].real - a[:, p, p].real
    sign = np.where(diff >= 0.0, 1.0, -1.0)
    denom = np.abs(diff) + np.sqrt(diff * diff + 4.0 * r * r)
    t = np.where(active, 2.0 * r * sign / np.where(active, denom, 1.0), 0.0)
    c = 1.0 / np.sqrt(1.0 + t * t)
    s = t * c
    jpp = c
    jpq = s
    jqp = -s * np.conj(phase)
    jqq = c * np.conj(phase)

    col_p = a[:, :, p].copy()
    col_q = a[:, :, q].copy()
    a[:, :, p] = col_p * jpp[:, None] + col_q * jqp[:, None]
    a[:, :, q] = col_p * jpq[:, None] + col_q * jqq[:, None]
    row_p = a[:, p, :].copy()
    row_q = a[:, q, :].copy()
    a[:, p, :] = np.conj(jpp)[:, None] * row_p + np.conj(jqp)[:, None] * row_q
    a[:, q, :] = np.conj(jpq)[:, None] * row_p + np.conj(jqq)[:, None] * row_q
    a[:, p, q] = 0.0
    a[:, q, p] = 0.0
    a[:, p, p] = a[:, p, p].real
    a[:, q, q] = a[:, q, q].real

    if v is not None:
        vp = v[:, :, p].copy()
        vq = v[:, :, q].copy()
        v[:, :, p] = vp * jpp[:, None] + vq * jqp[:, None]
        v[:, :, q] = vp * jpq[:, None] + vq * jqq[:, None]


def hermitian_eigenvalues(gram) -> np.ndarray:
    """Ascending eigenvalues of one Hermitian matrix."""
    gram = np.asarray(gram)
    if gram.ndim != 2:
        raise ValueError("expected a single square matrix")
    return jacobi_eigh(gram)
