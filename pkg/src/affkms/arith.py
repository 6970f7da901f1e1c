"""Exact integer arithmetic and the special functions used everywhere else.

Integers are treated as 64-bit quantities: products that would leave
[-(2^63), 2^63) raise :class:`RangeError`.  Real arithmetic is double
precision; the shared default comparison tolerance is ``DEFAULT_TOL``.
All functions here are pure; the prime table and factorization memo are
write-once caches guarded by a lock, so concurrent callers always observe
a consistent view.
"""

from __future__ import annotations

import math
import threading
from bisect import bisect_right
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping

import numpy as np

DEFAULT_TOL = 1e-10
INT64_MAX = 2**63 - 1

_SIEVE_LIMIT = 10**6

# deterministic Miller-Rabin witnesses, valid for all n < 3.3 * 10^24
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


class RangeError(ValueError):
    """An operation left the supported 64-bit / desk-scale range."""


def checked_mul(a: int, b: int) -> int:
    r = a * b
    if abs(r) > INT64_MAX:
        raise RangeError(f"product {a} * {b} leaves the 64-bit range")
    return r


_prime_lock = threading.Lock()
_prime_table: list[int] | None = None


def _primes() -> list[int]:
    """Primes up to 10^6, sieved once and immutable afterwards."""
    global _prime_table
    if _prime_table is None:
        with _prime_lock:
            if _prime_table is None:
                composite = np.zeros(_SIEVE_LIMIT + 1, dtype=bool)
                composite[:2] = True
                for i in range(2, int(_SIEVE_LIMIT**0.5) + 1):
                    if not composite[i]:
                        composite[i * i :: i] = True
                _prime_table = np.flatnonzero(~composite).tolist()
    return _prime_table


def primes_up_to(x: int) -> list[int]:
    if x > _SIEVE_LIMIT:
        raise RangeError(f"prime table covers up to {_SIEVE_LIMIT}, got {x}")
    ps = _primes()
    return ps[: bisect_right(ps, x)]


def first_primes(k: int) -> list[int]:
    ps = _primes()
    if k > len(ps):
        raise RangeError(f"only {len(ps)} primes precomputed, requested {k}")
    return ps[:k]


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for 64-bit inputs."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class Factorization:
    """A positive integer together with its ordered prime factorization."""

    value: int
    factors: tuple[tuple[int, int], ...]

    def prime_divisors(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)


@lru_cache(maxsize=200_000)
def _factor_tuple(n: int) -> tuple[tuple[int, int], ...]:
    out: list[tuple[int, int]] = []
    m = n
    for p in _primes():
        if p * p > m:
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out.append((p, e))
    if m > 1:
        # cofactor with no prime divisor <= 10^6; certify it before accepting
        if not is_prime(m):
            raise RangeError(f"{n} has a composite cofactor {m} beyond desk scale")
        out.append((m, 1))
    return tuple(out)


def factorize(n: int) -> Factorization:
    """Prime factorization of n, 1 <= n < 2^63; factorize(1) is the empty product."""
    if n < 1:
        raise ValueError(f"factorize requires n >= 1, got {n}")
    if n > INT64_MAX:
        raise RangeError(f"factorize requires n < 2^63, got {n}")
    return Factorization(n, _factor_tuple(n))


def mobius(n: int) -> int:
    f = factorize(n).factors
    if any(e > 1 for _, e in f):
        return 0
    return -1 if len(f) % 2 else 1


def totient(n: int) -> int:
    """Euler's phi, exactly, by integer arithmetic on the factorization."""
    out = 1
    for p, e in factorize(n).factors:
        out *= p ** (e - 1) * (p - 1)
    return out


def totient_beta(n: int, beta: float) -> float:
    """Generalized totient n^beta * prod_{p|n} (1 - p^-beta).

    Euler's phi at beta=1; the indicator of n=1 at beta=0.
    """
    if beta < 0:
        raise ValueError(f"totient_beta requires beta >= 0, got {beta}")
    f = factorize(n).factors
    out = float(n) ** beta
    for p, _ in f:
        out *= 1.0 - float(p) ** -beta
    return out


def divisors(n: int) -> list[int]:
    out = [1]
    for p, e in factorize(n).factors:
        out = [d * p**j for d in out for j in range(e + 1)]
    return sorted(out)


@dataclass(frozen=True)
class PrimeSet:
    """A finite sorted set of distinct primes."""

    primes: tuple[int, ...]
    label: str | None = field(default=None, compare=False)

    def __post_init__(self):
        ps = self.primes
        if list(ps) != sorted(set(ps)):
            raise ValueError("primes must be sorted and distinct")
        for p in ps:
            if not is_prime(p):
                raise ValueError(f"{p} is not prime")

    @classmethod
    def of(cls, primes: Iterable[int], label: str | None = None) -> "PrimeSet":
        return cls(tuple(sorted(set(primes))), label)

    @classmethod
    def first_n(cls, n: int) -> "PrimeSet":
        return cls(tuple(first_primes(n)), f"first {n} primes")

    @classmethod
    def dividing(cls, n: int) -> "PrimeSet":
        return cls(factorize(n).prime_divisors(), f"primes dividing {n}")

    def __iter__(self):
        return iter(self.primes)

    def __len__(self):
        return len(self.primes)

    def __contains__(self, p) -> bool:
        return p in self.primes


def smooth_numbers(F: PrimeSet, bound: int) -> list[int]:
    """All members of the multiplicative monoid generated by F in [1, bound], ascending."""
    if bound < 1:
        raise ValueError(f"bound must be >= 1, got {bound}")
    ps = F.primes
    out: list[int] = []

    def rec(val: int, i: int) -> None:
        out.append(val)
        for j in range(i, len(ps)):
            nxt = val * ps[j]
            if nxt > bound:
                if ps[j] > bound // max(val, 1):
                    break
                continue
            rec(nxt, j)

    rec(1, 0)
    out.sort()
    return out


def squarefree_products(F: PrimeSet) -> list[int]:
    """Square-free products of primes in F (the support of mu on the F-smooth monoid)."""
    out = [1]
    for p in F:
        out += [d * p for d in out]
    return sorted(out)


def partial_zeta(F: PrimeSet, beta: float) -> float:
    """Euler product prod_{p in F} (1 - p^-beta)^-1, the partition function of F."""
    if len(F) == 0:
        return 1.0
    if beta <= 0:
        raise ValueError(f"partial_zeta requires beta > 0 for nonempty F, got {beta}")
    out = 1.0
    for p in F:
        out /= 1.0 - float(p) ** -beta
    return out


def mobius_invert(g: Mapping[int, float], N: int) -> dict[int, float]:
    """Solve g(n) = sum_{d|n} f(d) on the divisor lattice of N for f.

    g must carry a value for every divisor of N.
    """
    divs = divisors(N)
    missing = [d for d in divs if d not in g]
    if missing:
        raise ValueError(f"g is missing divisor keys {missing} of {N}")
    f: dict[int, float] = {}
    for n in divs:
        f[n] = sum(mobius(n // d) * g[d] for d in divisors(n))
    return f


# Bernoulli numbers B_2, B_4, B_6, B_8 for the Euler-Maclaurin tail
_BERNOULLI = (1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0)


def hurwitz_zeta(beta: float, a: float, tol: float = 1e-12) -> float:
    """sum_{n>=0} (n+a)^-beta for beta > 1 and a in (0, 1].

    Direct summation of the head plus a 4-term Euler-Maclaurin tail; the head
    length grows like 10/(beta-1) so the correction stays below tol even
    arbitrarily close to the pole.
    """
    if beta <= 1:
        raise ValueError(f"hurwitz_zeta requires beta > 1, got {beta}")
    if not 0 < a <= 1:
        raise ValueError(f"hurwitz_zeta requires a in (0, 1], got {a}")
    N = max(50, math.ceil(10.0 / (beta - 1.0)))
    while True:
        head = _hurwitz_head(beta, a, N)
        x = N + a
        tail = x ** (1.0 - beta) / (beta - 1.0) + 0.5 * x**-beta
        rising = beta
        term = 0.0
        for j, b2j in enumerate(_BERNOULLI, start=1):
            term = b2j / math.factorial(2 * j) * rising * x ** (-beta - 2 * j + 1)
            tail += term
            rising *= (beta + 2 * j - 1) * (beta + 2 * j)
        if abs(term) <= tol or N >= 10**8:
            return head + tail
        N *= 4


def _hurwitz_head(beta: float, a: float, N: int) -> float:
    # chunked so near-pole evaluations (N ~ 10^7) stay memory-friendly
    total = 0.0
    step = 4_000_000
    for start in range(0, N, step):
        k = np.arange(start, min(start + step, N), dtype=np.float64)
        total += float(np.sum((k + a) ** -beta))
    return total


def zeta(beta: float, tol: float = 1e-12) -> float:
    """Riemann zeta for beta > 1."""
    return hurwitz_zeta(beta, 1.0, tol)
