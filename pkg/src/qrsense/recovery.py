"""Greedy sparse recovery: orthogonal matching pursuit and friends.

The least-squares projection inside OMP is a QR factorization built by
modified Gram-Schmidt (with one reorthogonalization pass) and extended by
one column per iteration.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb

import numpy as np

COND_LIMIT = 1e12
DEFAULT_RELATIVE_TOL = 1e-9
# correlations within this relative margin of the maximum count as a tie
TIE_RTOL = 1e-12


class RankDeficiencyError(np.linalg.LinAlgError):
    """Selected columns are numerically dependent.

    ``partial`` holds the OMP result accumulated before the failing step
    (None when raised from plain least squares).
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


@dataclass(frozen=True)
class RecoveryConfig:
    """Stopping rules for OMP.

    ``residual_tolerance`` is an absolute l2 threshold; ``None`` means
    1e-9 * ||y||.
    """

    max_iterations: int
    residual_tolerance: float | None = None
    tie_break: str = "lowest-index"

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.residual_tolerance is not None and self.residual_tolerance < 0:
            raise ValueError("residual_tolerance must be >= 0")
        if self.tie_break != "lowest-index":
            raise ValueError(f"unknown tie-break rule {self.tie_break!r}")


@dataclass
class RecoveryResult:
    support: list[int]
    coefficients: np.ndarray
    residual_norm: float
    iterations: int
    residual_history: list[float] = field(default_factory=list)

    def as_dense(self, n: int) -> np.ndarray:
        x = np.zeros(n, dtype=self.coefficients.dtype)
        x[self.support] = self.coefficients
        return x


class _IncrementalQR:
    """Thin QR of a growing column set, Q (m x k) orthonormal, R upper triangular."""

    def __init__(self, rows: int, capacity: int, dtype):
        self.q = np.zeros((rows, capacity), dtype=dtype)
        self.r = np.zeros((capacity, capacity), dtype=dtype)
        self.size = 0

    def append(self, column: np.ndarray) -> bool:
        k = self.size
        v = column.astype(self.q.dtype, copy=True)
        q = self.q[:, :k]
        norm0 = np.linalg.norm(v)
        for _ in range(2):
            for i in range(k):
                h = np.vdot(q[:, i], v)
                self.r[i, k] += h
                v -= h * q[:, i]
        norm = np.linalg.norm(v)
        if norm0 == 0.0 or norm <= norm0 / COND_LIMIT:
            self.r[:k + 1, k] = 0.0
            return False
        self.r[k, k] = norm
        self.q[:, k] = v / norm
        self.size = k + 1
        return True

    def solve(self, y: np.ndarray) -> np.ndarray:
        k = self.size
        rhs = self.q[:, :k].conj().T @ y
        return _back_substitute(self.r[:k, :k], rhs)


def _back_substitute(r: np.ndarray, b: np.ndarray) -> np.ndarray:
    k = r.shape[0]
    x = np.zeros(k, dtype=np.result_type(r, b))
    for i in range(k - 1, -1, -1):
        x[i] = (b[i] - r[i, i + 1:] @ x[i + 1:]) / r[i, i]
    return x


def _mgs_qr(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    rows, cols = a.shape
    qr = _IncrementalQR(rows, cols, np.result_type(a, float))
    for j in range(cols):
        if not qr.append(a[:, j]):
            raise RankDeficiencyError(f"column {j} is numerically dependent on the previous ones")
    return qr.q, qr.r


def least_squares(columns, y) -> tuple[np.ndarray, np.ndarray]:
    """Minimize ||columns @ c - y||_2; returns (c, residual)."""
    a = np.asarray(columns)
    y = np.asarray(y)
    if a.ndim != 2 or a.shape[0] != y.shape[0]:
        raise ValueError(f"shape mismatch: {a.shape} vs {y.shape}")
    if a.shape[0] < a.shape[1]:
        raise ValueError("least squares needs at least as many rows as columns")
    q, r = _mgs_qr(a)
    diag = np.abs(np.diag(r))
    if diag.size and np.linalg.cond(r) > COND_LIMIT:
        raise RankDeficiencyError("columns are ill-conditioned (condition estimate > 1e12)")
    c = _back_substitute(r, q.conj().T @ y)
    return c, y - a @ c


def _pick(correlations: np.ndarray) -> int:
    best = correlations.max()
    return int(np.flatnonzero(correlations >= best * (1.0 - TIE_RTOL))[0])


def omp(matrix, y, config: RecoveryConfig) -> RecoveryResult:
    """Orthogonal matching pursuit on a unit-column dictionary.

    Stops after ``config.max_iterations`` selections or as soon as the
    residual norm drops to the tolerance. Coefficients refer to the
    (unit-norm) columns as given.
    """
    a = np.asarray(matrix)
    y = np.asarray(y)
    rows, cols = a.shape
    if y.shape != (rows,):
        raise ValueError(f"y has shape {y.shape}, expected ({rows},)")
    dtype = np.result_type(a, y, float)
    budget = min(config.max_iterations, cols, rows)
    tol = config.residual_tolerance
    if tol is None:
        tol = DEFAULT_RELATIVE_TOL * np.linalg.norm(y)

    qr = _IncrementalQR(rows, budget, dtype)
    residual = y.astype(dtype, copy=True)
    support: list[int] = []
    history = [float(np.linalg.norm(residual))]
    available = np.ones(cols, dtype=bool)

    def result() -> RecoveryResult:
        coef = qr.solve(y) if support else np.zeros(0, dtype=dtype)
        return RecoveryResult(support=list(support), coefficients=coef,
                              residual_norm=history[-1], iterations=len(support),
                              residual_history=list(history))

    while len(support) < budget and history[-1] > tol:
        corr = np.abs(a.conj().T @ residual)
        corr[~available] = -1.0
        n = _pick(corr)
        if not qr.append(a[:, n]):
            raise RankDeficiencyError(f"column {n} is dependent on the selected support", partial=result())
        support.append(n)
        available[n] = False
        q = qr.q[:, qr.size - 1]
        residual = residual - q * np.vdot(q, residual)
        history.append(float(np.linalg.norm(residual)))
    return result()


def support_match(estimated, truth) -> bool:
    return set(int(i) for i in estimated) == set(int(i) for i in truth)


def exhaustive_sparse_solve(matrix, y, k: int, budget: int = 10**6):
    """Best k-column least-squares fit over all supports.

    Returns ``(support, coefficients, residual_norm)``; among equally good
    supports the lexicographically smallest wins.
    """
    a = np.asarray(matrix)
    y = np.asarray(y)
    cols = a.shape[1]
    if comb(cols, k) > budget:
        raise ValueError(f"C({cols}, {k}) = {comb(cols, k)} exceeds the search budget {budget}")
    margin = 1e-12 * max(np.linalg.norm(y), 1.0)
    best = None
    for support in combinations(range(cols), k):
        try:
            c, res = least_squares(a[:, list(support)], y)
        except RankDeficiencyError:
            continue
        norm = float(np.linalg.norm(res))
        if best is None or norm < best[2] - margin:
            best = (list(support), c, norm)
    if best is None:
        raise RankDeficiencyError("every candidate support is rank deficient")
    return best
