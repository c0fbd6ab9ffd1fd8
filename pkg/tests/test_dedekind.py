import math
import random
from fractions import Fraction

import pytest

from thetamod import (
    DomainError,
    ModularMatrix,
    S_INVERSION,
    ValidationError,
    dedekind_sum_fast,
    dedekind_sum_naive,
    eta,
    eta_multiplier,
    moebius_apply,
    principal_power,
    theta_multiplier,
    theta1_series,
)
from thetamod.transform import random_modular_matrix, random_tau, random_z


def coprime_pairs(k_max):
    for k in range(1, k_max + 1):
        for h in range(1, k) if k > 1 else [0]:
            if math.gcd(h, k) == 1:
                yield h, k


class TestDedekindSums:
    def test_denominator_one_is_zero(self):
        assert dedekind_sum_naive(5, 1) == 0
        assert dedekind_sum_fast(5, 1) == 0

    def test_one_third(self):
        # r=1: (1/3)(1/3 - 1/2) = -1/18; r=2: (2/3)(2/3 - 1/2) = 1/9
        assert dedekind_sum_naive(1, 3) == Fraction(1, 18)
        assert dedekind_sum_fast(1, 3) == Fraction(1, 18)

    def test_one_half(self):
        assert dedekind_sum_naive(1, 2) == 0

    def test_fast_matches_naive_five_sevenths(self):
        assert dedekind_sum_fast(5, 7) == dedekind_sum_naive(5, 7)

    def test_not_coprime_rejected(self):
        with pytest.raises(DomainError):
            dedekind_sum_naive(2, 4)
        with pytest.raises(DomainError):
            dedekind_sum_fast(3, 9)

    def test_bad_k_rejected(self):
        with pytest.raises(ValidationError):
            dedekind_sum_naive(1, 0)

    def test_negative_h_reduces_mod_k(self):
        assert dedekind_sum_naive(-1, 3) == dedekind_sum_naive(2, 3)
        assert dedekind_sum_fast(-4, 7) == dedekind_sum_naive(3, 7)

    def test_fast_equals_naive_exactly(self):
        for h, k in coprime_pairs(60):
            assert dedekind_sum_fast(h, k) == dedekind_sum_naive(h, k)

    def test_reciprocity(self):
        for h, k in coprime_pairs(40):
            if not 1 <= h < k:
                continue
            lhs = dedekind_sum_naive(h, k) + dedekind_sum_naive(k, h)
            rhs = Fraction(-1, 4) + Fraction(h * h + k * k + 1, 12 * h * k)
            assert lhs == rhs

    def test_oddness(self):
        for h, k in coprime_pairs(40):
            if k == 1:
                continue
            assert dedekind_sum_naive(k - h, k) == -dedekind_sum_naive(h, k)


class TestMultipliers:
    def test_inversion_eta_multiplier_is_one(self):
        eps = eta_multiplier(S_INVERSION)
        assert eps.phase == 0
        assert abs(eps.value - 1) < 1e-15

    def test_lower_triangular_eta_multiplier(self):
        eps = eta_multiplier(ModularMatrix(1, 0, 1, 1))
        assert eps.phase == Fraction(1, 6)

    def test_inversion_theta_multiplier_is_minus_i(self):
        eps1 = theta_multiplier(S_INVERSION)
        assert eps1.phase == Fraction(-1, 2)
        assert abs(eps1.value + 1j) < 1e-15

    def test_lower_triangular_theta_multiplier_is_one(self):
        # 3 * (1/6) - 1/2 = 0
        eps1 = theta_multiplier(ModularMatrix(1, 0, 1, 1))
        assert eps1.phase == 0

    def test_unit_modulus(self):
        rng = random.Random(47)
        for _ in range(100):
            mat = random_modular_matrix(rng)
            assert abs(abs(eta_multiplier(mat).value) - 1) < 1e-15
            assert abs(abs(theta_multiplier(mat).value) - 1) < 1e-15

    def test_nonpositive_c_rejected(self):
        with pytest.raises(ValidationError):
            eta_multiplier(ModularMatrix(1, 1, 0, 1))

    def test_measured_eta_multiplier(self):
        # the multiplier must reproduce the measured ratio of the eta law
        rng = random.Random(53)
        for _ in range(25):
            mat = random_modular_matrix(rng)
            tau = random_tau(rng)
            den = mat.c * tau + mat.d
            measured = eta(moebius_apply(mat, tau)) / (
                principal_power(-1j * den, 0.5) * eta(tau)
            )
            assert abs(measured - eta_multiplier(mat).value) < 1e-10

    def test_measured_theta_multiplier(self):
        import cmath

        rng = random.Random(59)
        for _ in range(25):
            mat = random_modular_matrix(rng)
            tau = random_tau(rng)
            z = random_z(rng, tau)
            den = mat.c * tau + mat.d
            lhs = theta1_series(z / den, moebius_apply(mat, tau))
            measured = lhs / (
                principal_power(-1j * den, 0.5)
                * cmath.exp(1j * math.pi * mat.c * z * z / den)
                * theta1_series(z, tau)
            )
            assert abs(measured - theta_multiplier(mat).value) < 1e-9
