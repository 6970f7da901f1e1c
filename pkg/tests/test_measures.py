import json
import math
import random
from math import gcd

import pytest

from affkms.arith import totient, totient_beta, zeta
from affkms.measures import (
    ONE,
    AtomicMeasure,
    NotSubconformalError,
    RootOfUnity,
    apply_A,
    apply_A_inv,
    check_subconformal,
    decompose,
    dirac,
    epsilon,
    extremal_measure,
    fourier,
    max_atom_diff,
    measure_from_json,
    measure_to_json,
    pushforward,
    restrict,
    root,
    t_beta,
    t_beta_exact_root,
    tv_distance,
)


def rand_signed_measure(rng, level=24, n_atoms=6):
    atoms = {}
    for _ in range(n_atoms):
        den = rng.choice([d for d in range(1, level + 1) if level % d == 0])
        num = rng.choice([j for j in range(den) if gcd(j, den) == 1])
        atoms[RootOfUnity(num, den)] = rng.uniform(-1, 1)
    return AtomicMeasure(atoms, signed=True)


class TestRootOfUnity:
    def test_reduction(self):
        assert root(8, 12) == RootOfUnity(2, 3)
        assert root(-1, 4) == RootOfUnity(3, 4)
        assert root(5, 5) == ONE

    def test_invalid_direct_construction(self):
        with pytest.raises(ValueError):
            RootOfUnity(2, 4)
        with pytest.raises(ValueError):
            RootOfUnity(3, 3)

    def test_order_and_pow(self):
        z = root(1, 6)
        assert z.order == 6
        assert z.pow(4) == RootOfUnity(2, 3)


class TestPushforward:
    def test_primitive_uniform_wraps_down(self):
        # wrapping the order-12 uniform primitive measure 8 times lands on order 3
        got = pushforward(epsilon(12), 8)
        assert max_atom_diff(got, epsilon(12 // gcd(12, 8))) < 1e-15

    def test_dirac_half(self):
        assert max_atom_diff(pushforward(dirac(root(1, 2)), 2), dirac(ONE)) == 0.0

    def test_mass_preserved_on_signed_measures(self):
        rng = random.Random(2)
        for _ in range(25):
            nu = rand_signed_measure(rng)
            for d in (1, 2, 5, 12):
                assert pushforward(nu, d).mass() == pytest.approx(nu.mass(), abs=1e-12)

    def test_rejects_nonpositive_wrap(self):
        with pytest.raises(ValueError):
            pushforward(dirac(ONE), 0)


class TestEpsilon:
    def test_order_one_is_point_mass_at_one(self):
        assert max_atom_diff(epsilon(1), dirac(ONE)) == 0.0

    def test_order_four(self):
        expected = AtomicMeasure({root(1, 4): 0.5, root(3, 4): 0.5})
        assert max_atom_diff(epsilon(4), expected) == 0.0

    def test_support_size_is_totient(self):
        for n in range(1, 201):
            assert len(epsilon(n)) == totient(n)


class TestApplyA:
    def test_trivial_index(self):
        rng = random.Random(3)
        nu = rand_signed_measure(rng)
        assert max_atom_diff(apply_A(nu, 1, 0.7), nu) == 0.0

    def test_hand_example_at_half(self):
        got = apply_A(dirac(root(1, 2)), 2, 1.0)
        expected = AtomicMeasure({root(1, 2): 1.0, ONE: -0.5}, signed=True)
        assert max_atom_diff(got, expected) < 1e-15

    def test_coprime_multiplicativity(self):
        rng = random.Random(5)
        for _ in range(20):
            nu = rand_signed_measure(rng, level=30)
            beta = rng.uniform(0.2, 1.5)
            two_then_three = apply_A(apply_A(nu, 3, beta), 2, beta)
            assert max_atom_diff(two_then_three, apply_A(nu, 6, beta)) < 1e-12

    def test_mass_bookkeeping(self):
        # total mass scales by sum_{d|n} mu(d) d^-beta
        rng = random.Random(7)
        nu = rand_signed_measure(rng)
        for n, beta in ((6, 0.5), (12, 1.0), (30, 0.8)):
            scale = sum(
                m * d**-beta
                for d, m in ((1, 1), (2, -1), (3, -1), (5, -1), (6, 1), (10, 1), (15, 1), (30, -1))
                if n % d == 0
            )
            assert apply_A(nu, n, beta).mass() == pytest.approx(scale * nu.mass(), abs=1e-12)


class TestApplyAInv:
    def test_roundtrip(self):
        rng = random.Random(11)
        for n in (2, 6, 12, 30):
            nu = rand_signed_measure(rng, level=n)
            beta = rng.uniform(0.3, 1.2)
            inv = apply_A_inv(nu, n, beta)
            assert max_atom_diff(apply_A(inv, n, beta), nu) < 1e-10

    def test_normalized_inverse_is_extremal_measure(self):
        n, beta = 6, 0.7
        scale = math.prod(1 - p**-beta for p in (2, 3))
        got = apply_A_inv(epsilon(n), n, beta).scaled(scale)
        assert max_atom_diff(got, extremal_measure(n, beta)) < 1e-10

    def test_positivity_of_inverse(self):
        rng = random.Random(13)
        for n in range(2, 31):
            atoms = {
                root(j, n): rng.uniform(0, 1) for j in range(n)
            }
            nu = AtomicMeasure(atoms)
            inv = apply_A_inv(nu, n, 0.6, level=n)
            assert inv.min_weight() >= -1e-12

    def test_level_mismatch_rejected(self):
        with pytest.raises(ValueError):
            apply_A_inv(dirac(root(1, 3)), 2, 0.5, level=4)

    def test_beta_zero_rejected(self):
        with pytest.raises(ValueError):
            apply_A_inv(epsilon(2), 2, 0.0)


class TestFourier:
    def test_zeroth_moment_is_mass(self):
        rng = random.Random(17)
        nu = rand_signed_measure(rng)
        assert fourier(nu, 0) == pytest.approx(nu.mass())

    def test_uniform_on_sixth_roots(self):
        uni = AtomicMeasure({root(j, 6): 1 / 6 for j in range(6)})
        for k in range(-12, 13):
            expected = 1.0 if k % 6 == 0 else 0.0
            assert abs(fourier(uni, k) - expected) < 1e-14

    def test_extremal_moments_closed_form(self):
        # k-th moment of the index-n extremal measure:
        #   (n/g)^-beta sum_{d | n/g} mu(d) phi_beta(d)/phi(d),  g = gcd(n, k)
        from affkms.arith import divisors, mobius

        for n, beta in ((6, 0.7), (12, 1.0), (9, 0.4)):
            nu = extremal_measure(n, beta)
            for k in range(0, 2 * n + 1):
                g = gcd(n, k)
                m = n // g
                expected = m**-beta * sum(
                    mobius(d) * totient_beta(d, beta) / totient(d) for d in divisors(m)
                )
                assert fourier(nu, k) == pytest.approx(expected, abs=1e-12)


class TestSubconformal:
    def test_extremal_measures_pass_small(self):
        for n in (1, 2, 6, 12):
            for beta in (0.3, 1.0):
                verdict = check_subconformal(extremal_measure(n, beta), beta, extra_prime_bound=10)
                assert verdict.passed, verdict

    def test_dirac_half_fails_with_witness(self):
        verdict = check_subconformal(dirac(root(1, 2)), 1.0, extra_prime_bound=10)
        assert not verdict.passed
        F, atom, value = verdict.witness
        assert F == (2,)
        assert atom == ONE
        assert value == pytest.approx(-0.5, abs=1e-12)

    def test_point_mass_at_one_always_passes(self):
        for beta in (0.0, 0.5, 1.0, 2.0):
            assert check_subconformal(dirac(ONE), beta, extra_prime_bound=15).passed

    def test_signed_input_rejected(self):
        rng = random.Random(19)
        with pytest.raises(ValueError):
            check_subconformal(rand_signed_measure(rng), 1.0)

    def test_restriction_preserves_subconformality(self):
        nu = extremal_measure(12, 0.8).scaled(0.5).plus(extremal_measure(3, 0.8).scaled(0.5))
        assert check_subconformal(nu, 0.8, extra_prime_bound=10).passed
        res = restrict(nu, 4)
        assert check_subconformal(res, 0.8, extra_prime_bound=10).passed


class TestRestrict:
    def test_drops_higher_orders(self):
        mix = epsilon(6).scaled(0.5).plus(epsilon(2).scaled(0.3)).plus(epsilon(3).scaled(0.2))
        res = restrict(mix, 2)
        assert set(res.atoms()) == set(epsilon(2).atoms()) | set()
        assert res.mass() == pytest.approx(0.3)

    def test_full_level_is_identity(self):
        rng = random.Random(23)
        nu = rand_signed_measure(rng)
        assert max_atom_diff(restrict(nu, nu.support_level()), nu) == 0.0


class TestExtremalMeasure:
    def test_index_one_is_point_mass(self):
        assert max_atom_diff(extremal_measure(1, 0.7), dirac(ONE)) == 0.0

    def test_critical_temperature_is_uniform(self):
        got = extremal_measure(6, 1.0)
        uni = AtomicMeasure({root(j, 6): 1 / 6 for j in range(6)})
        assert max_atom_diff(got, uni) < 1e-15

    def test_index_two_closed_form(self):
        for beta in (0.3, 0.9, 1.7):
            got = extremal_measure(2, beta)
            expected = AtomicMeasure({ONE: 2.0**-beta, root(1, 2): 1 - 2.0**-beta})
            assert max_atom_diff(got, expected) < 1e-15

    def test_beta_zero_collapses_to_point_mass(self):
        for n in (1, 4, 30):
            assert max_atom_diff(extremal_measure(n, 0.0), dirac(ONE)) == 0.0

    def test_probability(self):
        for n in (7, 12, 30):
            for beta in (0.2, 1.0, 2.5):
                assert extremal_measure(n, beta).is_probability()

    def test_wrap_lattice_small(self):
        for n in (6, 12):
            for k in range(1, 13):
                for beta in (0.5, 1.0):
                    got = pushforward(extremal_measure(n, beta), k)
                    want = extremal_measure(n // gcd(n, k), beta)
                    assert max_atom_diff(got, want) < 1e-12


class TestDecompose:
    def test_extremal_is_extremal(self):
        for n in (1, 2, 6, 12):
            for beta in (0.4, 1.0):
                lam = decompose(extremal_measure(n, beta), beta)
                assert set(lam) == {n}
                assert lam[n] == pytest.approx(1.0, abs=1e-12)

    def test_convex_roundtrip(self):
        beta = 0.7
        mix = extremal_measure(2, beta).scaled(0.3).plus(extremal_measure(15, beta).scaled(0.7))
        lam = decompose(mix, beta)
        assert lam[2] == pytest.approx(0.3, abs=1e-9)
        assert lam[15] == pytest.approx(0.7, abs=1e-9)
        assert set(lam) == {2, 15}

    def test_uniform_on_z4_at_critical(self):
        uni = AtomicMeasure({root(j, 4): 0.25 for j in range(4)})
        lam = decompose(uni, 1.0)
        assert set(lam) == {4}
        assert lam[4] == pytest.approx(1.0, abs=1e-12)

    def test_not_subconformal_diagnostic(self):
        with pytest.raises(NotSubconformalError) as err:
            decompose(dirac(root(1, 2)), 1.0)
        assert err.value.witness_n == 1
        assert err.value.coefficients[1] < 0

    def test_mass_additivity(self):
        rng = random.Random(29)
        beta = 0.5
        for _ in range(10):
            weights = [rng.uniform(0, 1) for _ in range(3)]
            ns = rng.sample([1, 2, 3, 4, 6, 12], 3)
            mix = AtomicMeasure()
            for w, n in zip(weights, ns):
                mix = mix.plus(extremal_measure(n, beta).scaled(w))
            lam = decompose(mix, beta)
            assert sum(lam.values()) == pytest.approx(sum(weights), abs=1e-9)


class TestTBeta:
    def test_point_mass_at_one_stays(self):
        got, tail = t_beta(dirac(ONE), 2.0, 1000)
        assert set(got.atoms()) == {ONE}
        partial = sum(c**-2.0 for c in range(1, 1001))
        assert got.weight(ONE) == pytest.approx(partial / zeta(2.0), rel=1e-12)
        assert tail == pytest.approx(1 - partial / zeta(2.0), rel=1e-9)

    def test_mass_bookkeeping(self):
        rng = random.Random(31)
        nu = rand_signed_measure(rng)
        got, tail = t_beta(nu, 1.5, 500)
        assert got.mass() + tail * nu.mass() == pytest.approx(nu.mass(), abs=1e-12)

    def test_matches_extremal_within_tail(self):
        got, tail = t_beta(epsilon(6), 2.0, 10_000)
        assert tv_distance(got, extremal_measure(6, 2.0)) <= tail + 1e-12

    def test_beta_at_or_below_one_rejected(self):
        with pytest.raises(ValueError):
            t_beta(dirac(ONE), 1.0, 10)


class TestTBetaExactRoot:
    def test_at_one(self):
        got = t_beta_exact_root(ONE, 2.0)
        assert max_atom_diff(got, dirac(ONE)) < 1e-12

    def test_probability(self):
        for beta in (1.2, 2.0, 3.5):
            got = t_beta_exact_root(root(1, 6), beta)
            assert abs(got.mass() - 1.0) < 1e-10

    def test_agrees_with_truncation(self):
        exact = t_beta_exact_root(root(1, 4), 2.0)
        approx, tail = t_beta(dirac(root(1, 4)), 2.0, 100_000)
        assert tv_distance(exact, approx) <= tail + 1e-10

    def test_atoms_positive_and_decreasing_in_phase(self):
        got = t_beta_exact_root(root(1, 5), 2.0)
        ws = [got.weight(root(j, 5)) for j in (1, 2, 3, 4)]
        assert all(w > 0 for w in ws + [got.weight(ONE)])
        assert ws == sorted(ws, reverse=True)
        assert got.weight(ONE) < ws[-1]


class TestSerialization:
    def test_roundtrip_bit_exact(self):
        nu = AtomicMeasure(
            {root(1, 3): 0.1 + 0.2, root(5, 7): -1.75, ONE: 1e-17}, signed=True
        )
        text = measure_to_json(nu)
        back = measure_from_json(text)
        assert back.signed == nu.signed
        for z, w in nu.atoms().items():
            assert back.weight(z) == w  # floats survive repr round trip exactly
        doc = json.loads(text)
        assert set(doc) == {"level", "signed", "atoms"}
        assert doc["level"] == nu.support_level()
