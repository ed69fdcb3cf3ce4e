"""Integer arithmetic behind the quadratic-residue construction.

Primality, Jacobi symbols, the quadratic-residue row set and quadratic
Gauss sums (closed form plus a brute-force summation used as an oracle).
"""

from __future__ import annotations

import cmath
import math

# Deterministic Miller-Rabin witnesses; sufficient for every n < 3.3e24.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


class InvalidParamsError(ValueError):
    """Raised when (N, p) do not describe a valid construction."""


def is_prime(n: int) -> bool:
    """Return True iff ``n`` is prime (deterministic for 64-bit inputs)."""
    if n < 2:
        return False
    for q in _MR_WITNESSES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def is_valid_modulus(n: int) -> bool:
    """True iff ``n`` is a prime of the form 4z + 3 with z >= 1."""
    return n >= 7 and n % 4 == 3 and is_prime(n)


def next_valid_modulus(n: int) -> int:
    """Smallest valid modulus ``N' >= n``.

    Used to suggest a replacement grid size; callers decide whether to use it.
    """
    candidate = max(7, n)
    candidate += (3 - candidate % 4) % 4
    while not is_prime(candidate):
        candidate += 4
    return candidate


def jacobi_symbol(k: int, n: int) -> int:
    """Jacobi symbol (k/n) for odd n >= 3, via quadratic reciprocity."""
    if n < 3 or n % 2 == 0:
        raise ValueError(f"Jacobi symbol needs an odd modulus >= 3, got {n}")
    k %= n
    result = 1
    while k:
        while k % 2 == 0:
            k //= 2
            if n % 8 in (3, 5):
                result = -result
        k, n = n, k
        if k % 4 == 3 and n % 4 == 3:
            result = -result
        k %= n
    return result if n == 1 else 0


def quadratic_residue_rows(N: int, p: int = 1) -> list[int]:
    """Row indexes ``p * m**2 mod N`` for ``m = 1..M``, in order of m.

    The values are the (p-scaled) quadratic residues of N, so they are
    pairwise distinct; this is checked rather than assumed.
    """
    if not is_valid_modulus(N):
        raise InvalidParamsError(f"N={N} is not a prime of the form 4z+3")
    if math.gcd(p, N) != 1 or p < 1:
        raise InvalidParamsError(f"p={p} must be a positive integer coprime to N={N}")
    M = (N - 1) // 2
    rows = [p * m * m % N for m in range(1, M + 1)]
    if len(set(rows)) != M:
        raise ArithmeticError(f"row indexes repeat for N={N}, p={p}")
    return rows


def gauss_sum(k: int, N: int) -> complex:
    """Closed-form quadratic Gauss sum ``(k/N) * j * sqrt(N)`` for N = 3 mod 4."""
    if N < 3 or N % 4 != 3 or not is_prime(N):
        raise InvalidParamsError(f"N={N} must be a prime congruent to 3 mod 4")
    if math.gcd(k, N) != 1:
        raise ValueError(f"k={k} is not coprime to N={N}")
    return complex(0.0, jacobi_symbol(k, N) * math.sqrt(N))


def gauss_sum_direct(k: int, N: int) -> complex:
    """Literal sum of exp(j 2 pi k m^2 / N) over m = 0..N-1."""
    if N < 1:
        raise ValueError("N must be positive")
    # reduce k m^2 mod N in integers so the float phase stays small
    return sum(cmath.exp(2j * math.pi * (k * m * m % N) / N) for m in range(N))
