"""Quadratic-residue partial Fourier sensing matrices and their diagnostics.

Matrices are plain complex numpy arrays. Functions that need unit-norm
columns check for them and raise ``ValueError`` otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .eigen import jacobi_eigh
from .numtheory import InvalidParamsError, is_valid_modulus, quadratic_residue_rows

UNIT_NORM_ATOL = 1e-10


@dataclass(frozen=True)
class SensingParams:
    """Arithmetic frame of the construction: prime N = 4z+3 and multiplier p."""

    N: int
    p: int = 1

    def __post_init__(self):
        if not is_valid_modulus(self.N):
            raise InvalidParamsError(f"N={self.N} is not a prime of the form 4z+3 (z >= 1)")
        if self.p < 1 or math.gcd(self.p, self.N) != 1:
            raise InvalidParamsError(f"p={self.p} must be a positive integer coprime to N={self.N}")

    @property
    def M(self) -> int:
        return (self.N - 1) // 2

    @property
    def z(self) -> int:
        return (self.N - 3) // 4

    @property
    def rows(self) -> list[int]:
        return quadratic_residue_rows(self.N, self.p)


@dataclass(frozen=True)
class EigenSweepRecord:
    k: int
    trials: int
    mean_max_eig: float
    mean_min_eig: float
    extreme_max_eig: float
    extreme_min_eig: float

    @property
    def spread(self) -> float:
        return self.extreme_max_eig - self.extreme_min_eig


@dataclass(frozen=True)
class RipBoundReport:
    """Left-hand sides of the statistical-RIP conditions.

    The theorem's constant c is unknown, so callers compare
    ``coherence_term`` against c*delta and ``energy_term`` against
    c*delta**2 themselves.
    """

    mu: float
    spectral_norm_sq: float
    delta: float
    epsilon: float
    coherence_term: float
    energy_term: float


def _readonly(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


def fourier_rows(N: int, rows) -> np.ndarray:
    """Rows of the N-point Fourier matrix exp(j 2 pi m n / N), n = 1..N."""
    m = np.asarray(rows, dtype=np.int64)[:, None]
    n = np.arange(1, N + 1, dtype=np.int64)[None, :]
    # exact integer reduction keeps every phase in [0, 2 pi)
    return np.exp(2j * np.pi * ((m * n) % N) / N)


def build_sensing_matrix(params: SensingParams) -> np.ndarray:
    """Raw M x N matrix with entries exp(j 2 pi p m^2 n / N).

    Row ``i`` (0-based) holds m = i + 1 and column ``c`` holds n = c + 1;
    this is the only place the 1-based indexing is translated.
    """
    return _readonly(fourier_rows(params.N, params.rows))


def random_partial_fourier(N: int, M: int, rng: np.random.Generator) -> np.ndarray:
    """M distinct rows of F_N drawn uniformly without replacement (raw scale)."""
    if not 1 <= M <= N:
        raise ValueError(f"need 1 <= M <= N, got M={M}, N={N}")
    rows = sample_without_replacement(N, M, rng) + 1
    return _readonly(fourier_rows(N, rows))


def sample_without_replacement(n: int, k: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform k-subset of range(n) in draw order (partial Fisher-Yates)."""
    if not 0 <= k <= n:
        raise ValueError(f"cannot draw {k} of {n}")
    pool = np.arange(n)
    picks = rng.integers(np.arange(k), n) if k else np.empty(0, dtype=np.int64)
    for i, j in enumerate(picks):
        pool[i], pool[j] = pool[j], pool[i]
    return pool[:k].copy()


def column_normalize(matrix) -> np.ndarray:
    matrix = np.asarray(matrix)
    norms = np.linalg.norm(matrix, axis=0)
    if np.any(norms == 0):
        raise ValueError("cannot normalize a zero column")
    return _readonly(matrix / norms)


def _require_unit_columns(matrix: np.ndarray) -> None:
    norms = np.linalg.norm(matrix, axis=0)
    if not np.allclose(norms, 1.0, rtol=0.0, atol=UNIT_NORM_ATOL):
        raise ValueError("matrix columns must have unit l2 norm; call column_normalize first")


def column_inner_product(matrix, n: int, n2: int) -> complex:
    """<phi_n, phi_n2> = phi_n^H phi_n2 for 0-based column indexes."""
    matrix = np.asarray(matrix)
    if n == n2:
        raise ValueError("inner product of a column with itself is its squared norm")
    _require_unit_columns(matrix)
    return complex(np.vdot(matrix[:, n], matrix[:, n2]))


def coherence_bruteforce(matrix) -> float:
    """Largest |<phi_n, phi_n'>| over all pairs of distinct columns."""
    matrix = np.asarray(matrix)
    if matrix.shape[1] < 2:
        raise ValueError("coherence needs at least two columns")
    _require_unit_columns(matrix)
    gram = np.abs(matrix.conj().T @ matrix)
    np.fill_diagonal(gram, 0.0)
    return float(gram.max())


def coherence_closed_form(params: SensingParams) -> float:
    M = params.M
    return math.sqrt(M + 1) / (math.sqrt(2) * M)


def sparsity_guarantee(params: SensingParams) -> float:
    """Sparsity level below which OMP/BP recovery is guaranteed: (1/mu + 1)/2."""
    return 0.5 * (1.0 / coherence_closed_form(params) + 1.0)


def spectral_norm_squared(matrix) -> float:
    """Largest eigenvalue of Phi^H Phi, computed on the smaller Gram side."""
    matrix = np.asarray(matrix)
    rows, cols = matrix.shape
    gram = matrix @ matrix.conj().T if rows <= cols else matrix.conj().T @ matrix
    return float(jacobi_eigh(gram)[-1])


def sub_gram_extreme_eigs(matrix, support) -> tuple[float, float]:
    matrix = np.asarray(matrix)
    support = np.asarray(support, dtype=np.int64)
    if support.size == 0:
        raise ValueError("support must not be empty")
    if support.min() < 0 or support.max() >= matrix.shape[1]:
        raise IndexError("support index out of range")
    _require_unit_columns(matrix)
    sub = matrix[:, support]
    w = jacobi_eigh(sub.conj().T @ sub)
    return float(w[0]), float(w[-1])


def batch_sub_gram_extreme_eigs(matrix, supports) -> tuple[np.ndarray, np.ndarray]:
    """(lambda_min, lambda_max) per row of a (trials, k) support array."""
    matrix = np.asarray(matrix)
    supports = np.asarray(supports, dtype=np.int64)
    _require_unit_columns(matrix)
    sub = matrix[:, supports]  # (rows, trials, k)
    sub = np.moveaxis(sub, 0, 1)  # (trials, rows, k)
    gram = np.conj(np.swapaxes(sub, 1, 2)) @ sub
    w = jacobi_eigh(gram)
    return w[:, 0], w[:, -1]


def summarize_sweep(k: int, lam_min: np.ndarray, lam_max: np.ndarray) -> EigenSweepRecord:
    lam_min = np.asarray(lam_min, dtype=float)
    lam_max = np.asarray(lam_max, dtype=float)
    return EigenSweepRecord(
        k=k,
        trials=int(lam_min.size),
        mean_max_eig=float(np.mean(lam_max)),
        mean_min_eig=float(np.mean(lam_min)),
        extreme_max_eig=float(np.max(lam_max)),
        extreme_min_eig=float(np.min(lam_min)),
    )


def rip_eigen_sweep(matrix, k: int, trials: int, rng: np.random.Generator) -> EigenSweepRecord:
    """Mean and extreme sub-Gram eigenvalues over random k-column subsets."""
    matrix = np.asarray(matrix)
    rows, cols = matrix.shape
    if not 1 <= k <= rows:
        raise ValueError(f"k={k} must lie in 1..{rows}")
    if trials < 1:
        raise ValueError("trials must be positive")
    supports = np.stack([sample_without_replacement(cols, k, rng) for _ in range(trials)])
    lam_min, lam_max = batch_sub_gram_extreme_eigs(matrix, supports)
    return summarize_sweep(k, lam_min, lam_max)


def exhaustive_eigen_sweep(matrix, k: int) -> EigenSweepRecord:
    """Same statistics as ``rip_eigen_sweep`` over every k-subset of columns."""
    matrix = np.asarray(matrix)
    supports = np.array(list(combinations(range(matrix.shape[1]), k)))
    lam_min, lam_max = batch_sub_gram_extreme_eigs(matrix, supports)
    return summarize_sweep(k, lam_min, lam_max)


def rip_bound_report(params: SensingParams, k: int, delta: float, epsilon: float) -> RipBoundReport:
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    if not 1 <= k <= params.N:
        raise ValueError(f"k must lie in 1..{params.N}")
    mu = coherence_closed_form(params)
    norm_sq = spectral_norm_squared(column_normalize(build_sensing_matrix(params)))
    log_term = math.log(params.N / epsilon)
    return RipBoundReport(
        mu=mu,
        spectral_norm_sq=norm_sq,
        delta=delta,
        epsilon=epsilon,
        coherence_term=mu * log_term,
        energy_term=k / params.N * norm_sq * log_term,
    )
