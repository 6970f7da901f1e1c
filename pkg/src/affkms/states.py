"""Evaluation of every equilibrium functional of the system on spanning monomials.

All variants share the rescaling skeleton: a monomial V_a U^k V_b^* evaluates
to delta_{a,b} a^-beta times a moment of the underlying circle measure,
so off-diagonal monomials (a != b) are killed for every spec.  The recurring
arithmetic factor is

    h_beta(c) = c^-beta * sum_{d|c} mu(d) phi_beta(d)/phi(d),

the k-th moment of the extremal measure of index c = n/gcd(n,k).

Series-backed variants (the low-temperature ones) are truncated explicitly
and always report the tail bound alongside the value; there are no hidden
convergence claims.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import cos, gcd, pi, sin
from typing import NamedTuple, Union

import numpy as np

from .arith import (
    PrimeSet,
    checked_mul,
    divisors,
    mobius,
    partial_zeta,
    smooth_numbers,
    squarefree_products,
    totient,
    totient_beta,
    zeta,
)
from .algebra import (
    AlgebraElement,
    Monomial,
    mono_mul,
    projection_eF,
    sigma_ibeta_factor,
    unitary_power,
)
from .measures import (
    AtomicMeasure,
    RootOfUnity,
    dirac,
    fourier,
    t_beta_exact_root,
    tv_distance,
)


def _check_beta(beta: float, low: float, high: float | None, variant: str) -> None:
    if beta < low or (high is not None and beta > high):
        rng = f"[{low}, {'inf' if high is None else high}]"
        raise ValueError(f"{variant} requires beta in {rng}, got {beta}")


@dataclass(frozen=True)
class FiniteN:
    """Extremal state of finite index n; the closed form is valid for all beta >= 0."""

    n: int
    beta: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"index n must be >= 1, got {self.n}")
        _check_beta(self.beta, 0.0, None, "FiniteN")


@dataclass(frozen=True)
class LebesgueInf:
    """The state of Lebesgue measure: delta_{a,b} delta_{k,0} a^-beta."""

    beta: float

    def __post_init__(self):
        _check_beta(self.beta, 0.0, None, "LebesgueInf")


@dataclass(frozen=True)
class FromMeasure:
    """The state induced by an arbitrary circle measure via its moments."""

    nu: AtomicMeasure
    beta: float

    def __post_init__(self):
        _check_beta(self.beta, 0.0, None, "FromMeasure")


@dataclass(frozen=True)
class LowTemp:
    """Low-temperature state of a base measure eta, via the normalized c^-beta series."""

    eta: AtomicMeasure
    beta: float
    truncation: int = 100_000

    def __post_init__(self):
        if self.beta <= 1:
            raise ValueError(f"LowTemp requires beta > 1, got {self.beta}")
        if self.truncation < 1:
            raise ValueError("truncation must be >= 1")


@dataclass(frozen=True)
class Quotient:
    """Finite-quotient state indexed by a divisor m of the modulus n (beta <= 1)."""

    n: int
    m: int
    beta: float

    def __post_init__(self):
        if self.n < 1 or self.n % self.m != 0:
            raise ValueError(f"m = {self.m} must divide n = {self.n}")
        _check_beta(self.beta, 0.0, 1.0, "Quotient")


@dataclass(frozen=True)
class QuotientChar:
    """Finite-quotient state of a root of unity zeta (beta > 1, truncated series)."""

    n: int
    zeta: RootOfUnity
    beta: float
    truncation: int = 100_000

    def __post_init__(self):
        if self.n < 1 or self.n % self.zeta.den != 0:
            raise ValueError(f"order of {self.zeta} must divide n = {self.n}")
        if self.beta <= 1:
            raise ValueError(f"QuotientChar requires beta > 1, got {self.beta}")


@dataclass(frozen=True)
class QZSubgroup:
    """Level-N state of the subgroup H = (1/m)Z/Z of Q/Z, for m | N (beta <= 1)."""

    level: int
    m: int
    beta: float

    def __post_init__(self):
        if self.level < 1 or self.level % self.m != 0:
            raise ValueError(f"m = {self.m} must divide the level {self.level}")
        _check_beta(self.beta, 0.0, 1.0, "QZSubgroup")


@dataclass(frozen=True)
class QZChar:
    """Level-N character state: chi(1/N) = the given root of unity (beta > 1)."""

    level: int
    chi: RootOfUnity
    beta: float
    truncation: int = 100_000

    def __post_init__(self):
        if self.level < 1 or self.level % self.chi.den != 0:
            raise ValueError(f"order of {self.chi} must divide the level {self.level}")
        if self.beta <= 1:
            raise ValueError(f"QZChar requires beta > 1, got {self.beta}")


StateSpec = Union[FiniteN, LebesgueInf, FromMeasure, LowTemp, Quotient, QuotientChar, QZSubgroup, QZChar]

INTEGER_FAMILY = (FiniteN, LebesgueInf, FromMeasure, LowTemp)


@dataclass(frozen=True)
class QZMonomial:
    """V_a R_x V_b^* with x a point of Q/Z given as a reduced fraction."""

    a: int
    x: RootOfUnity
    b: int

    def __post_init__(self):
        if self.a < 1 or self.b < 1:
            raise ValueError(f"isometry indices must be >= 1, got ({self.a}, {self.b})")


class StateValue(NamedTuple):
    value: complex
    tail: float | None = None


@lru_cache(maxsize=100_000)
def h_beta(c: int, beta: float) -> float:
    """c^-beta * sum_{d|c} mu(d) phi_beta(d)/phi(d): the order-c moment factor."""
    s = sum(
        mobius(d) * totient_beta(d, beta) / totient(d)
        for d in divisors(c)
        if mobius(d) != 0
    )
    return float(c) ** -beta * s


def _periodic_series(phase_num: int, phase_den: int, beta: float, C: int) -> tuple[complex, float]:
    """sum_{c<=C} c^-beta e^(2 pi i c num/den) / zeta(beta), with its tail bound."""
    z_full = zeta(beta)
    cs = np.arange(1, C + 1, dtype=np.float64)
    vals = cs**-beta
    partial = float(np.sum(vals))
    q = phase_den
    residues = np.arange(1, C + 1) % q
    by_res = np.bincount(residues, weights=vals, minlength=q)
    acc = 0j
    for r in range(q):
        w = float(by_res[r])
        if w == 0.0:
            continue
        theta = 2.0 * pi * ((phase_num * r) % q) / q
        acc += w * complex(cos(theta), sin(theta))
    return acc / z_full, (z_full - partial) / z_full


def _qz_exponent(x: RootOfUnity, n: int) -> int:
    """Integer k with x = k/n in Q/Z (requires ord(x) | n)."""
    if n % x.den != 0:
        raise ValueError(f"order of {x} does not divide the level {n}")
    return x.num * (n // x.den)


def eval_state(spec: StateSpec, x: Monomial | QZMonomial) -> StateValue:
    """Value of the state on a single spanning monomial (with tail bound when truncated)."""
    if isinstance(spec, INTEGER_FAMILY):
        if not isinstance(x, Monomial):
            raise TypeError(f"{type(spec).__name__} expects an integer monomial, got {type(x).__name__}")
        a, k, b = x.a, x.k, x.b
    else:
        if isinstance(x, QZMonomial):
            a, b = x.a, x.b
            n_mod = spec.n if isinstance(spec, (Quotient, QuotientChar)) else spec.level
            k = _qz_exponent(x.x, n_mod)
        elif isinstance(x, Monomial) and isinstance(spec, (Quotient, QuotientChar)):
            a, k, b = x.a, x.k, x.b
        else:
            raise TypeError(f"{type(spec).__name__} expects a Q/Z monomial, got {type(x).__name__}")

    if a != b:
        return StateValue(0j, 0.0 if _is_series(spec) else None)
    apow = float(a) ** -spec.beta

    if isinstance(spec, FiniteN):
        c = spec.n // gcd(spec.n, k)
        return StateValue(complex(apow * h_beta(c, spec.beta)), None)
    if isinstance(spec, LebesgueInf):
        return StateValue(complex(apow if k == 0 else 0.0), None)
    if isinstance(spec, FromMeasure):
        return StateValue(apow * fourier(spec.nu, k), None)
    if isinstance(spec, LowTemp):
        val, tail = _low_temp_moment(spec.eta, k, spec.beta, spec.truncation)
        return StateValue(apow * val, apow * tail)
    if isinstance(spec, Quotient):
        c = spec.m // gcd(spec.m, k)
        return StateValue(complex(apow * h_beta(c, spec.beta)), None)
    if isinstance(spec, QuotientChar):
        w = spec.zeta.pow(k)
        val, tail = _periodic_series(w.num, w.den, spec.beta, spec.truncation)
        return StateValue(apow * val, apow * tail)
    if isinstance(spec, QZSubgroup):
        q = x.x.den
        c = q // gcd(q, spec.m)
        return StateValue(complex(apow * h_beta(c, spec.beta)), None)
    if isinstance(spec, QZChar):
        w = spec.chi.pow(k)
        val, tail = _periodic_series(w.num, w.den, spec.beta, spec.truncation)
        return StateValue(apow * val, apow * tail)
    raise TypeError(f"unknown state spec {spec!r}")


def _is_series(spec: StateSpec) -> bool:
    return isinstance(spec, (LowTemp, QuotientChar, QZChar))


def _low_temp_moment(eta: AtomicMeasure, k: int, beta: float, C: int) -> tuple[complex, float]:
    # moment of eta under the normalized series: z^(kc) depends on c mod K only
    K = eta.support_level()
    z_full = zeta(beta)
    cs = np.arange(1, C + 1, dtype=np.float64)
    vals = cs**-beta
    partial = float(np.sum(vals))
    residues = np.arange(1, C + 1) % K
    by_res = np.bincount(residues, weights=vals, minlength=K)
    acc = 0j
    for r in range(K):
        w = float(by_res[r])
        if w != 0.0:
            acc += w * fourier(eta, k * r)
    mass = abs(eta.mass())
    return acc / z_full, (z_full - partial) / z_full * mass


def eval_element(spec: StateSpec, elem: AlgebraElement) -> StateValue:
    """Linear extension to finite combinations; tails accumulate with |coefficient|."""
    acc = 0j
    tail: float | None = 0.0 if _is_series(spec) else None
    for m, c in elem.terms().items():
        sv = eval_state(spec, m)
        acc += c * sv.value
        if tail is not None and sv.tail is not None:
            tail += abs(c) * sv.tail
    return StateValue(acc, tail)


def kms_residual(spec: StateSpec, x: Monomial, y: Monomial) -> float:
    """|psi(xy) - (a/b)^-beta psi(yx)|, zero exactly when psi is an equilibrium state."""
    if not isinstance(spec, (FiniteN, LebesgueInf, FromMeasure)):
        raise TypeError("kms_residual applies to the integer-monoid state family")
    lhs = eval_state(spec, mono_mul(x, y)).value
    rhs = sigma_ibeta_factor(x, spec.beta) * eval_state(spec, mono_mul(y, x)).value
    return abs(lhs - rhs)


def subconformal_witness_value(
    nu: AtomicMeasure,
    beta: float,
    F: PrimeSet,
    f_coeffs: dict[int, complex],
    grid: int = 4096,
) -> float:
    """integral of f against A_{beta,F} nu, via Fourier pairing.

    f is a trigonometric polynomial given by its coefficients; it must be
    real and verifiably non-negative on a uniform grid.  A value below
    -1e-9 certifies that nu is not beta-subconformal.
    """
    thetas = np.arange(grid) / grid
    vals = np.zeros(grid, dtype=complex)
    for j, c in f_coeffs.items():
        vals += complex(c) * np.exp(2j * pi * j * thetas)
    if float(np.max(np.abs(vals.imag))) > 1e-9:
        raise ValueError("f is not real-valued on the verification grid")
    if float(np.min(vals.real)) < -1e-9:
        raise ValueError("f is not verifiably non-negative on the verification grid")
    acc = 0j
    for d in squarefree_products(F):
        cmu = mobius(d) * float(d) ** -beta
        for j, c in f_coeffs.items():
            acc += cmu * complex(c) * fourier(nu, j * d)
    if abs(acc.imag) > 1e-9:
        raise ValueError(f"pairing produced a non-real value {acc}")
    return acc.real


def witness_element(F: PrimeSet, f_coeffs: dict[int, complex]) -> AlgebraElement:
    """e_F (V_1 f V_1^*) e_F as an algebra element, for the cross-check route."""
    ef = projection_eF(F)
    poly = AlgebraElement({Monomial(1, j, 1): complex(c) for j, c in f_coeffs.items()})
    return ef * poly * ef


def apply_kappa(b: int, x: Monomial) -> Monomial:
    """The symmetry endomorphism fixing every V_a and raising U to U^b."""
    if b < 0:
        raise ValueError(f"kappa index must be >= 0, got {b}")
    return Monomial(x.a, checked_mul(b, x.k), x.b)


def weak_star_gap(beta: float, n: int, x: Monomial) -> tuple[float, float]:
    """(|psi_{beta,n}(x) - psi_{beta,inf}(x)|, a^-beta (n/gcd(n,k))^-beta)."""
    _check_beta(beta, 0.0, 1.0, "weak_star_gap")
    fin = eval_state(FiniteN(n, beta), x).value
    inf = eval_state(LebesgueInf(beta), x).value
    gap = abs(fin - inf)
    bound = float(x.a) ** -beta * (n / gcd(n, x.k)) ** -beta
    return gap, bound


def reconstruct_check(
    spec: FiniteN | FromMeasure, F: PrimeSet, k: int, C: int
) -> tuple[float, float, float]:
    """Compare psi(U^k) against its compression series over the F-smooth monoid.

    rhs = sum_{a F-smooth, a <= C} a^-beta psi(e_F U^{ak} e_F), computed through
    the algebra product so the projection route is genuinely exercised;
    tail = (zeta_F(beta) - partial sum) / zeta_F(beta) bounds |lhs - rhs|.
    """
    beta = spec.beta
    if beta <= 0:
        raise ValueError("reconstruct_check requires beta > 0")
    lhs = eval_state(spec, Monomial(1, k, 1)).value.real
    ef = projection_eF(F)
    rhs = 0.0
    partial = 0.0
    for a in smooth_numbers(F, C):
        apow = float(a) ** -beta
        partial += apow
        compressed = ef * unitary_power(a * k) * ef
        rhs += apow * eval_element(spec, compressed).value.real
    zf = partial_zeta(F, beta)
    tail = (zf - partial) / zf
    return lhs, rhs, tail


def limit_beta1(z: RootOfUnity, betas: list[float]) -> list[tuple[float, float]]:
    """Total-variation distance of the exact series image of delta_z from uniform.

    For each beta in the given (descending toward 1) list, the distance of
    T_beta delta_z from the uniform measure on the order-n roots; the trend
    is monotone non-increasing as beta decreases to 1.
    """
    n = z.den
    uniform = AtomicMeasure({z.pow(k): 1.0 / n for k in range(1, n + 1)})
    rows = []
    for beta in betas:
        m = t_beta_exact_root(z, beta)
        rows.append((beta, tv_distance(m, uniform)))
    return rows


_SUPERPOSITION_MONOMIALS = (
    Monomial(1, 0, 1),
    Monomial(1, 1, 1),
    Monomial(2, 1, 2),
    Monomial(3, 2, 3),
    Monomial(2, -1, 2),
    Monomial(5, 3, 5),
    Monomial(4, 6, 4),
)


def superposition_check(n: int, beta: float, C: int) -> tuple[float, float]:
    """Max deviation between the closed form and the uniform superposition of
    point-mass low-temperature states over the primitive n-th roots.

    Returns (max deviation over the test monomials, the truncation tail bound).
    """
    if beta <= 1:
        raise ValueError(f"superposition_check requires beta > 1, got {beta}")
    prim = [RootOfUnity(j, n) for j in range(n) if gcd(j, n) == 1]
    phi_n = len(prim)
    specs = [LowTemp(dirac(xi), beta, C) for xi in prim]
    test = _SUPERPOSITION_MONOMIALS + (Monomial(1, n, 1),)
    max_dev = 0.0
    max_tail = 0.0
    for m in test:
        closed = eval_state(FiniteN(n, beta), m).value
        acc = 0j
        tail = 0.0
        for s in specs:
            sv = eval_state(s, m)
            acc += sv.value
            tail += sv.tail or 0.0
        dev = abs(closed - acc / phi_n)
        max_dev = max(max_dev, dev)
        max_tail = max(max_tail, tail / phi_n)
    return max_dev, max_tail


def qz_coherence(
    level: int, m: int, n: int, beta: float, x: QZMonomial
) -> tuple[complex, complex]:
    """Restriction identity: the level-N subgroup state against the modulus-n quotient state.

    H = (1/m)Z/Z meets (1/n)Z/Z in (1/gcd(m,n))Z/Z, which is the quotient
    state of divisor index n/gcd(m,n).
    """
    if level % n != 0:
        raise ValueError(f"n = {n} must divide the level {level}")
    if n % x.x.den != 0:
        raise ValueError(f"monomial order {x.x.den} must divide n = {n}")
    lhs = eval_state(QZSubgroup(level, m, beta), x).value
    rhs = eval_state(Quotient(n, n // gcd(m, n), beta), x).value
    return lhs, rhs
