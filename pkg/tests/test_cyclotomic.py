"""Exact Z[ζ_p] arithmetic: reduction, ring laws, automorphisms, Gauss sums."""

from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from app.cyclotomic import (
    CycInt,
    apply_automorphism,
    cyc_arith,
    cyc_from_root,
    gauss_sum_closed,
    quadratic_gauss_sum,
)
from app.errors import BadAutomorphism, MixedPrime, NonIntegerEntry, ParameterError


# ── Helpers ────────────────────────────────────────────────────────────

def cyc5():
    return st.lists(st.integers(-50, 50), min_size=4, max_size=4).map(lambda cs: CycInt(5, tuple(cs)))


def _zeta(p: int, j: int) -> CycInt:
    return cyc_from_root(p, j)


# ══════════════════════════════════════════════════════════════════════
# 1.  Roots of unity and reduction
# ══════════════════════════════════════════════════════════════════════

class TestRoots:

    def test_zeta_zero_is_one(self):
        assert cyc_from_root(5, 0).coeffs == (1, 0, 0, 0)

    def test_top_root_reduces(self):
        assert cyc_from_root(5, 4).coeffs == (-1, -1, -1, -1)

    def test_exponent_taken_mod_p(self):
        assert cyc_from_root(5, 7) == cyc_from_root(5, 2)
        assert cyc_from_root(5, -1) == cyc_from_root(5, 4)

    def test_sum_of_all_roots_vanishes(self):
        total = sum((_zeta(5, j) for j in range(5)), CycInt.zero(5))
        assert total == CycInt.zero(5)

    def test_from_counts_length_checked(self):
        with pytest.raises(ParameterError):
            CycInt.from_counts(5, [1, 2, 3])

    def test_root_exponent(self):
        assert cyc_from_root(7, 3).root_exponent() == 3
        assert CycInt.from_int(7, 2).root_exponent() is None

    def test_integer_views(self):
        assert CycInt.from_int(3, -9).as_integer() == -9
        with pytest.raises(NonIntegerEntry):
            cyc_from_root(3, 1).as_integer()

    def test_json_shape(self):
        assert cyc_from_root(3, 1).to_json() == {"p": 3, "coeffs": [0, 1]}

    def test_str(self):
        assert str(CycInt.zero(5)) == "0"
        assert str(CycInt(5, (2, -1, 0, 3))) == "2 - ζ + 3ζ³"


# ══════════════════════════════════════════════════════════════════════
# 2.  Ring operations
# ══════════════════════════════════════════════════════════════════════

class TestArithmetic:

    def test_root_product(self):
        assert cyc_arith(_zeta(5, 1), _zeta(5, 4), "mul") == CycInt.from_int(5, 1)

    def test_gauss_square_for_p3(self):
        g = _zeta(3, 1) - _zeta(3, 2)
        assert g * g == CycInt.from_int(3, -3)
        assert g**2 == CycInt.from_int(3, -3)

    def test_scale_and_sub(self):
        a = _zeta(5, 1)
        assert cyc_arith(a, 3, "scale") == a + a + a
        assert cyc_arith(a, a, "sub") == CycInt.zero(5)

    def test_mixed_primes_rejected(self):
        with pytest.raises(MixedPrime):
            cyc_arith(_zeta(5, 1), _zeta(3, 1), "add")
        with pytest.raises(MixedPrime):
            _zeta(5, 1) * _zeta(7, 1)

    def test_unknown_operation(self):
        with pytest.raises(ParameterError):
            cyc_arith(_zeta(5, 1), _zeta(5, 2), "div")

    def test_scale_needs_integer(self):
        with pytest.raises(ParameterError):
            cyc_arith(_zeta(5, 1), _zeta(5, 2), "scale")

    def test_exact_div(self):
        assert (CycInt.from_int(5, 10) + _zeta(5, 1) * 5).exact_div(5) == CycInt.from_int(5, 2) + _zeta(5, 1)
        assert _zeta(5, 1).exact_div(2) is None
        assert _zeta(5, 1).exact_div(0) is None

    @given(a=cyc5(), b=cyc5(), c=cyc5())
    def test_ring_laws(self, a, b, c):
        assert a * b == b * a
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a - a == CycInt.zero(5)


# ══════════════════════════════════════════════════════════════════════
# 3.  Automorphisms
# ══════════════════════════════════════════════════════════════════════

class TestAutomorphism:

    def test_identity(self):
        a = CycInt(5, (3, -1, 4, 2))
        assert apply_automorphism(a, 1) == a

    def test_sigma_2_on_zeta(self):
        assert apply_automorphism(_zeta(5, 1), 2) == _zeta(5, 2)

    def test_integers_fixed(self):
        for z in range(1, 5):
            assert apply_automorphism(CycInt.from_int(5, 17), z) == CycInt.from_int(5, 17)

    def test_zero_rejected(self):
        with pytest.raises(BadAutomorphism):
            apply_automorphism(_zeta(5, 1), 5)

    def test_conj_of_root(self):
        assert _zeta(5, 2).conj() == _zeta(5, 3)

    @given(a=cyc5(), b=cyc5(), z=st.integers(1, 4))
    def test_ring_homomorphism(self, a, b, z):
        assert apply_automorphism(a * b, z) == apply_automorphism(a, z) * apply_automorphism(b, z)
        assert apply_automorphism(a + b, z) == apply_automorphism(a, z) + apply_automorphism(b, z)


# ══════════════════════════════════════════════════════════════════════
# 4.  Gauss sums
# ══════════════════════════════════════════════════════════════════════

class TestGaussSums:

    def test_p3_m1(self):
        assert gauss_sum_closed(3, 1) == _zeta(3, 1) - _zeta(3, 2)

    def test_p5_m2(self):
        assert gauss_sum_closed(5, 2) == CycInt.from_int(5, -5)

    def test_p3_m4(self):
        assert gauss_sum_closed(3, 4) == CycInt.from_int(3, -9)

    @pytest.mark.parametrize("p", [3, 5, 7, 11, 13])
    def test_quadratic_gauss_sum_squares_to_p_star(self, p):
        p_star = p if p % 4 == 1 else -p
        g = quadratic_gauss_sum(p)
        assert g * g == CycInt.from_int(p, p_star)
        assert gauss_sum_closed(p, 1) == g

    @pytest.mark.parametrize("p, m", [(3, 3), (5, 3), (7, 5)])
    def test_odd_degree_matches_repeated_product(self, p, m):
        g = quadratic_gauss_sum(p)
        prod = CycInt.from_int(p, 1)
        for _ in range(m):
            prod = prod * g
        assert gauss_sum_closed(p, m) == prod * (-1 if (m - 1) % 2 else 1)

    def test_power_edges(self):
        g = quadratic_gauss_sum(5)
        assert g**0 == CycInt.from_int(5, 1)
        assert g**1 == g
        with pytest.raises(ValueError):
            g ** -1

    @pytest.mark.parametrize("p, m", [(3, 2), (3, 4), (5, 2), (7, 4)])
    def test_even_degree_is_galois_fixed(self, p, m):
        g = gauss_sum_closed(p, m)
        assert g.is_integer()
        for z in range(1, p):
            assert apply_automorphism(g, z) == g
