"""Atomic measures on roots of unity and the subconformality machinery.

A measure is a finite weighted set of reduced rational points p/q of the
circle.  Phases stay exact fractions until the final trigonometric call in
:func:`fourier`.  The central objects:

* wrap-around pushforward  omega_d: z -> z^d,
* the operators  A_{beta,n} nu = sum_{d|n} mu(d) d^-beta omega_d* nu  and
  their positive inverses (dense solve on a fixed root level),
* the extremal measures  nu_{beta,n}  with atom n^-beta phi_beta(ord z)/phi(ord z)
  on each z with ord(z) | n, and the convex decomposition of an arbitrary
  non-negative measure into them,
* the normalized low-temperature series  T_beta = zeta(beta)^-1 sum_c c^-beta omega_c*.

Measures are immutable values; every operation returns a fresh measure.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from math import cos, gcd, lcm, pi, sin
from typing import Iterable, Mapping

import numpy as np

from .arith import (
    PrimeSet,
    divisors,
    factorize,
    hurwitz_zeta,
    mobius,
    primes_up_to,
    squarefree_products,
    totient,
    totient_beta,
    zeta,
)

PRUNE_TOL = 1e-14


@dataclass(frozen=True, order=True)
class RootOfUnity:
    """A reduced fraction num/den representing exp(2*pi*i*num/den); den = order."""

    num: int
    den: int

    def __post_init__(self):
        if self.den < 1 or not 0 <= self.num < self.den or gcd(self.num, self.den) != 1:
            raise ValueError(f"{self.num}/{self.den} is not a reduced circle point")

    @property
    def order(self) -> int:
        return self.den

    def pow(self, e: int) -> "RootOfUnity":
        return root(self.num * e, self.den)

    def __str__(self):
        return f"{self.num}/{self.den}"


def root(num: int, den: int) -> RootOfUnity:
    """Reduce num/den modulo 1 to the canonical representative."""
    if den < 1:
        raise ValueError(f"denominator must be positive, got {den}")
    num %= den
    g = gcd(num, den)
    return RootOfUnity(num // g, den // g)


ONE = RootOfUnity(0, 1)


class AtomicMeasure:
    """Finite weighted atoms on roots of unity; weights may be signed in intermediates."""

    __slots__ = ("_atoms", "signed", "beta_tag", "_level")

    def __init__(
        self,
        atoms: Mapping[RootOfUnity, float] | Iterable[tuple[RootOfUnity, float]] = (),
        *,
        signed: bool = False,
        beta_tag: float | None = None,
        level: int | None = None,
    ):
        acc: dict[RootOfUnity, float] = {}
        items = atoms.items() if isinstance(atoms, Mapping) else atoms
        for z, w in items:
            if w == 0.0:
                continue
            acc[z] = acc.get(z, 0.0) + w
        object.__setattr__(self, "_atoms", acc)
        object.__setattr__(self, "signed", signed)
        object.__setattr__(self, "beta_tag", beta_tag)
        if level is not None:
            bad = [z for z in acc if level % z.den != 0]
            if bad:
                raise ValueError(f"atoms {bad} do not live on the level-{level} roots")
        object.__setattr__(self, "_level", level)

    def __setattr__(self, *a):  # measures are values
        raise AttributeError("AtomicMeasure is immutable")

    def atoms(self) -> dict[RootOfUnity, float]:
        return dict(self._atoms)

    def weight(self, z: RootOfUnity) -> float:
        return self._atoms.get(z, 0.0)

    def mass(self) -> float:
        return sum(self._atoms.values())

    def min_weight(self) -> float:
        return min(self._atoms.values(), default=0.0)

    def support_level(self) -> int:
        """lcm of atom orders (declared level if one was given)."""
        if self._level is not None:
            return self._level
        out = 1
        for z in self._atoms:
            out = lcm(out, z.den)
        return out

    def is_probability(self, tol: float = 1e-10) -> bool:
        return abs(self.mass() - 1.0) <= tol and self.min_weight() >= -tol

    def cleanup(self, tol: float = PRUNE_TOL) -> "AtomicMeasure":
        """Drop atoms with |weight| <= tol (the only place pruning happens)."""
        return AtomicMeasure(
            {z: w for z, w in self._atoms.items() if abs(w) > tol},
            signed=self.signed,
            beta_tag=self.beta_tag,
            level=self._level,
        )

    def scaled(self, c: float) -> "AtomicMeasure":
        return AtomicMeasure(
            {z: c * w for z, w in self._atoms.items()},
            signed=self.signed or c < 0,
            beta_tag=self.beta_tag,
            level=self._level,
        )

    def plus(self, other: "AtomicMeasure") -> "AtomicMeasure":
        acc = self.atoms()
        for z, w in other._atoms.items():
            acc[z] = acc.get(z, 0.0) + w
        return AtomicMeasure(acc, signed=self.signed or other.signed)

    def __len__(self):
        return len(self._atoms)

    def __repr__(self):
        inner = " + ".join(f"{w:.6g}*d({z})" for z, w in sorted(self._atoms.items()))
        return f"AtomicMeasure({inner or '0'})"


def dirac(z: RootOfUnity) -> AtomicMeasure:
    return AtomicMeasure({z: 1.0})


def tv_distance(mu: AtomicMeasure, nu: AtomicMeasure) -> float:
    """Total-variation norm of mu - nu (sum of absolute atom differences)."""
    keys = set(mu.atoms()) | set(nu.atoms())
    return sum(abs(mu.weight(z) - nu.weight(z)) for z in keys)


def max_atom_diff(mu: AtomicMeasure, nu: AtomicMeasure) -> float:
    keys = set(mu.atoms()) | set(nu.atoms())
    return max((abs(mu.weight(z) - nu.weight(z)) for z in keys), default=0.0)


def pushforward(nu: AtomicMeasure, d: int) -> AtomicMeasure:
    """Image of nu under z -> z^d; mass is preserved exactly up to roundoff."""
    if d < 1:
        raise ValueError(f"pushforward requires d >= 1, got {d}")
    return _push_exp(nu, d)


def _push_exp(nu: AtomicMeasure, d: int) -> AtomicMeasure:
    # d = 0 is the constant map to 1; only used internally (series residues)
    acc: dict[RootOfUnity, float] = {}
    for z, w in nu.atoms().items():
        t = z.pow(d)
        acc[t] = acc.get(t, 0.0) + w
    return AtomicMeasure(acc, signed=nu.signed, beta_tag=nu.beta_tag)


def epsilon(n: int) -> AtomicMeasure:
    """Uniform probability measure on the primitive n-th roots of unity."""
    if n < 1:
        raise ValueError(f"epsilon requires n >= 1, got {n}")
    w = 1.0 / totient(n)
    return AtomicMeasure({RootOfUnity(j, n): w for j in range(n) if gcd(j, n) == 1})


def apply_A(nu: AtomicMeasure, n: int, beta: float) -> AtomicMeasure:
    """A_{beta,n} nu = sum_{d|n} mu(d) d^-beta omega_d* nu (a signed measure)."""
    acc: dict[RootOfUnity, float] = {}
    for d in squarefree_products(PrimeSet.dividing(n)):
        c = mobius(d) * float(d) ** -beta
        for z, w in pushforward(nu, d).atoms().items():
            acc[z] = acc.get(z, 0.0) + c * w
    return AtomicMeasure(acc, signed=True, beta_tag=beta)


def apply_A_inv(
    nu: AtomicMeasure, n: int, beta: float, level: int | None = None
) -> AtomicMeasure:
    """The unique mu on the level-K roots with A_{beta,n} mu = nu.

    Solved as a dense K x K linear system over the atoms indexed by all K-th
    roots of unity.  For beta > 0 the inverse is a positive operator, and
    prod_{p|n}(1-p^-beta) * mu is a probability measure whenever nu is.
    """
    if beta <= 0:
        raise ValueError(f"apply_A_inv requires beta > 0, got {beta}")
    K = level if level is not None else nu.support_level()
    for z in nu.atoms():
        if K % z.den != 0:
            raise ValueError(f"atom {z} is not supported on the level-{K} roots")
    roots = [root(j, K) for j in range(K)]
    index = {z: i for i, z in enumerate(roots)}
    M = np.zeros((K, K))
    for j, z in enumerate(roots):
        for d in squarefree_products(PrimeSet.dividing(n)):
            M[index[z.pow(d)], j] += mobius(d) * float(d) ** -beta
    rhs = np.array([nu.weight(z) for z in roots])
    sol = np.linalg.solve(M, rhs)
    residual = float(np.max(np.abs(M @ sol - rhs)))
    if residual > 1e-9:
        raise RuntimeError(f"A_inv solve residual {residual:.2e} exceeds 1e-9")
    return AtomicMeasure(
        {z: float(w) for z, w in zip(roots, sol) if w != 0.0},
        signed=nu.signed,
        beta_tag=beta,
    )


def fourier(nu: AtomicMeasure, k: int) -> complex:
    """Moment sum_z nu({z}) z^k with the phase reduced exactly before cos/sin."""
    re = im = 0.0
    for z, w in nu.atoms().items():
        phase = (k * z.num) % z.den
        theta = 2.0 * pi * phase / z.den
        re += w * cos(theta)
        im += w * sin(theta)
    return complex(re, im)


@dataclass(frozen=True)
class SubconformalVerdict:
    passed: bool
    witness: tuple[tuple[int, ...], RootOfUnity, float] | None
    primes_checked: tuple[int, ...]
    note: str

    def __bool__(self):
        return self.passed


def check_subconformal(
    nu: AtomicMeasure,
    beta: float,
    extra_prime_bound: int = 30,
    tol: float = 1e-9,
) -> SubconformalVerdict:
    """Bounded verifier of the positivity family A_{beta,F} nu >= 0.

    Every square-free combination F of (primes dividing the support level)
    and (primes <= extra_prime_bound coprime to it) is checked; by coprime
    multiplicativity of the operators nothing else contributes new
    inequalities inside this window.  A pass is a bounded certificate; a
    fail (with witness (F, atom, value)) is a proof of non-subconformality.
    """
    if beta < 0:
        raise ValueError(f"beta must be >= 0, got {beta}")
    if nu.signed or nu.min_weight() < 0:
        raise ValueError("check_subconformal requires a non-negative measure")
    K = nu.support_level()
    support_ps = list(factorize(K).prime_divisors())
    window = [p for p in primes_up_to(extra_prime_bound) if K % p != 0]
    ps = sorted(support_ps + window)

    # grow A_{beta,F} nu one prime at a time over all 2^|ps| subsets
    frontier: list[tuple[tuple[int, ...], AtomicMeasure]] = [((), nu)]
    for p in ps:
        fac = float(p) ** -beta
        new = []
        for F, m in frontier:
            pushed = pushforward(m, p)
            nxt = m.plus(pushed.scaled(-fac))
            new.append((F + (p,), nxt))
        frontier += new
    worst: tuple[tuple[int, ...], RootOfUnity, float] | None = None
    for F, m in frontier:
        for z, w in m.atoms().items():
            if w < -tol and (worst is None or w < worst[2]):
                worst = (F, z, w)
    if worst is not None:
        return SubconformalVerdict(False, worst, tuple(ps), "violation witnessed")
    return SubconformalVerdict(
        True, None, tuple(ps),
        f"bounded certificate: all square-free F from primes {ps} pass at tol {tol}",
    )


def restrict(nu: AtomicMeasure, k: int) -> AtomicMeasure:
    """Keep exactly the atoms whose order divides k."""
    if k < 1:
        raise ValueError(f"restrict requires k >= 1, got {k}")
    return AtomicMeasure(
        {z: w for z, w in nu.atoms().items() if k % z.den == 0},
        signed=nu.signed,
        beta_tag=nu.beta_tag,
    )


def extremal_measure(n: int, beta: float) -> AtomicMeasure:
    """nu_{beta,n}: atom n^-beta phi_beta(d)/phi(d) on each root of exact order d | n.

    A probability measure on the n-th roots; collapses to the point mass at 1
    when beta = 0.
    """
    if n < 1:
        raise ValueError(f"extremal_measure requires n >= 1, got {n}")
    scale = float(n) ** -beta
    acc: dict[RootOfUnity, float] = {}
    for d in divisors(n):
        w = scale * totient_beta(d, beta) / totient(d)
        if w == 0.0:
            continue
        for j in range(d):
            if gcd(j, d) == 1:
                acc[RootOfUnity(j, d)] = w
    return AtomicMeasure(acc, beta_tag=beta)


class NotSubconformalError(ValueError):
    """Decomposition produced a negative coefficient; carries the evidence."""

    def __init__(self, coefficients: dict[int, float], witness_n: int):
        self.coefficients = coefficients
        self.witness_n = witness_n
        super().__init__(
            f"not subconformal: coefficient at n={witness_n} is {coefficients[witness_n]:.3e}"
        )


def decompose(nu: AtomicMeasure, beta: float, tol: float = 1e-9) -> dict[int, float]:
    """Coefficients lambda_n of the unique expansion nu = sum_n lambda_n nu_{beta,n}.

    lambda_n = n^beta * sum_d mu(d) nu(Z_{nd}^*) / phi_beta(nd); the d-sum is
    finite because nu(Z_m^*) = 0 unless m divides the support level.  Raises
    :class:`NotSubconformalError` when some coefficient drops below -tol.
    """
    if not 0 < beta <= 1:
        raise ValueError(f"decompose requires 0 < beta <= 1, got {beta}")
    if nu.signed or nu.min_weight() < 0:
        raise ValueError("decompose requires a non-negative measure")
    L = nu.support_level()
    primitive_mass: dict[int, float] = {}
    for z, w in nu.atoms().items():
        primitive_mass[z.den] = primitive_mass.get(z.den, 0.0) + w
    out: dict[int, float] = {}
    for n in divisors(L):
        lam = 0.0
        for d in divisors(L // n):
            m = primitive_mass.get(n * d, 0.0)
            if m != 0.0:
                lam += mobius(d) * m / totient_beta(n * d, beta)
        lam *= float(n) ** beta
        if abs(lam) > 1e-12:
            out[n] = lam
    bad = [n for n, lam in out.items() if lam < -tol]
    if bad:
        worst = min(bad, key=lambda n: out[n])
        raise NotSubconformalError(out, worst)
    return out


def t_beta(nu: AtomicMeasure, beta: float, C: int) -> tuple[AtomicMeasure, float]:
    """Truncated low-temperature operator: zeta(beta)^-1 sum_{c<=C} c^-beta omega_c* nu.

    Returns the partial image (normalized by the full zeta(beta)) and the
    tail mass zeta(beta)^-1 sum_{c>C} c^-beta, which bounds the
    total-variation truncation error per unit of input mass.
    """
    if beta <= 1:
        raise ValueError(f"t_beta requires beta > 1, got {beta}")
    if C < 1:
        raise ValueError(f"truncation bound must be >= 1, got {C}")
    K = nu.support_level()
    z_full = zeta(beta)
    cs = np.arange(1, C + 1, dtype=np.float64)
    vals = cs**-beta
    partial = float(np.sum(vals))
    # z^c depends on c only through c mod K; fold exponent 0 onto K
    residues = (np.arange(1, C + 1) - 1) % K + 1
    by_res = np.bincount(residues, weights=vals, minlength=K + 1)
    acc: dict[RootOfUnity, float] = {}
    for r in range(1, K + 1):
        wr = float(by_res[r]) / z_full
        if wr == 0.0:
            continue
        for z, w in _push_exp(nu, r).atoms().items():
            acc[z] = acc.get(z, 0.0) + wr * w
    tail = (z_full - partial) / z_full
    return AtomicMeasure(acc, signed=nu.signed, beta_tag=beta), tail


def t_beta_exact_root(z: RootOfUnity, beta: float) -> AtomicMeasure:
    """Exact image of the point mass at z: (n^-beta/zeta(beta)) sum_k zeta(beta,k/n) d_{z^k}."""
    if beta <= 1:
        raise ValueError(f"t_beta_exact_root requires beta > 1, got {beta}")
    n = z.den
    z_full = zeta(beta)
    scale = float(n) ** -beta / z_full
    acc: dict[RootOfUnity, float] = {}
    for k in range(1, n + 1):
        acc[z.pow(k)] = scale * hurwitz_zeta(beta, k / n)
    return AtomicMeasure(acc, beta_tag=beta)


# --- JSON schema: {"level": K, "signed": bool, "atoms": [{"num","den","weight"}]} ---


def measure_to_dict(nu: AtomicMeasure) -> dict:
    atoms = sorted(nu.atoms().items(), key=lambda kv: (kv[0].den, kv[0].num))
    return {
        "level": nu.support_level(),
        "signed": nu.signed,
        "atoms": [{"num": z.num, "den": z.den, "weight": w} for z, w in atoms],
    }


def measure_from_dict(data: Mapping) -> AtomicMeasure:
    atoms = {
        RootOfUnity(int(a["num"]), int(a["den"])): float(a["weight"])
        for a in data["atoms"]
    }
    return AtomicMeasure(
        atoms, signed=bool(data.get("signed", False)), level=data.get("level")
    )


def measure_to_json(nu: AtomicMeasure) -> str:
    return json.dumps(measure_to_dict(nu), sort_keys=True)


def measure_from_json(text: str) -> AtomicMeasure:
    return measure_from_dict(json.loads(text))
