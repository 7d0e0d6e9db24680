"""
Tests for app/field.py: parameter validation, primitive polynomial search,
lookup tables and the scalar helpers built on them.
"""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from app.errors import (
    CeilingExceeded,
    EqualPrimes,
    EvenInput,
    FieldSizeOverflow,
    NotPrime,
    NotPrimitiveRoot,
    ParameterError,
    ZeroElement,
)
from app.field import (
    build_field,
    find_primitive_polynomial,
    prime_field_element,
    quad_char,
    quad_char_ext,
    require_pairs_within,
    residue_class,
    trace,
    validate_params,
)


# ── Helpers ────────────────────────────────────────────────────────────

@pytest.fixture(scope="module")
def f25():
    return build_field(validate_params(5, 3, 1))


@pytest.fixture(scope="module")
def f81():
    return build_field(validate_params(3, 5, 1))


def _element_order(tbl, x: int) -> int:
    q = tbl.q
    return (q - 1) // int(np.gcd(int(tbl.log[x]), q - 1))


# ══════════════════════════════════════════════════════════════════════
# 1.  validate_params
# ══════════════════════════════════════════════════════════════════════

class TestValidateParams:

    @pytest.mark.parametrize(
        "p, ell, k, e, q, exp_N",
        [
            (5, 3, 1, 2, 25, 4),
            (3, 5, 1, 4, 81, 8),
            (7, 5, 1, 4, 2401, 240),
            (3, 7, 1, 6, 729, 52),
        ],
    )
    def test_derived_quantities(self, p, ell, k, e, q, exp_N):
        params = validate_params(p, ell, k)

        assert (params.e, params.q, params.exp_N) == (e, q, exp_N)
        assert params.exp_N * params.two_lk == params.q - 1

    def test_equal_primes_rejected(self):
        with pytest.raises(EqualPrimes):
            validate_params(3, 3, 1)

    def test_even_input_rejected(self):
        with pytest.raises(EvenInput):
            validate_params(4, 3, 1)
        with pytest.raises(EvenInput):
            validate_params(5, 2, 1)

    def test_composite_rejected(self):
        with pytest.raises(NotPrime):
            validate_params(9, 5, 1)

    def test_p_not_primitive_mod_2lk(self):
        # ord_6(7) = 1, not φ(3) = 2
        with pytest.raises(NotPrimitiveRoot):
            validate_params(7, 3, 1)

    def test_non_positive_k(self):
        with pytest.raises(ParameterError):
            validate_params(5, 3, 0)

    def test_bool_is_not_an_integer_here(self):
        with pytest.raises(ParameterError):
            validate_params(True, 3, 1)

    def test_field_size_ceiling(self):
        with pytest.raises(FieldSizeOverflow):
            validate_params(3, 7, 1, ceiling=100)

    def test_field_size_ceiling_is_inclusive(self):
        assert validate_params(5, 3, 1, ceiling=25).q == 25
        with pytest.raises(FieldSizeOverflow):
            validate_params(5, 3, 1, ceiling=24)

    @pytest.mark.parametrize("k", [40, 10**9])
    def test_large_k_rejected_before_q_is_formed(self, k):
        with pytest.raises(FieldSizeOverflow):
            validate_params(5, 3, k)

    def test_usage_errors_are_value_errors(self):
        with pytest.raises(ValueError):
            validate_params(3, 3, 1)

    def test_derived_properties(self):
        params = validate_params(5, 3, 1)

        assert params.sqrt_q == 5
        assert params.p_star == 5
        assert params.sqrt_pstar_e == 5
        assert (params.t1, params.t2) == (2, 1)
        assert not params.ell_is_one_mod_p

    def test_p_star_for_p_3_mod_4(self):
        params = validate_params(3, 7, 1)

        assert params.p_star == -3
        assert params.sqrt_pstar_e == -27
        assert params.ell_is_one_mod_p


# ══════════════════════════════════════════════════════════════════════
# 2.  Primitive polynomial and tables
# ══════════════════════════════════════════════════════════════════════

class TestBuildField:

    def test_smallest_primitive_quadratic_over_f5(self):
        assert find_primitive_polynomial(5, 2) == (1, 1, 2)

    def test_modulus_is_monic_of_degree_e(self, f81):
        assert len(f81.modulus) == 5
        assert f81.modulus[0] == 1

    def test_alpha_is_code_p(self, f25, f81):
        assert f25.alpha == 5
        assert f81.alpha == 3

    def test_alpha_is_primitive(self, f25, f81):
        for tbl in (f25, f81):
            powers = tbl.antilog
            assert sorted(powers.tolist()) == list(range(1, tbl.q))
            assert tbl.power(tbl.q - 1) == 1

    def test_xi_order(self, f25, f81):
        assert _element_order(f25, f25.xi) == 6
        assert _element_order(f81, f81.xi) == 10

    def test_log_of_zero_is_sentinel(self, f25):
        assert f25.log[0] == -1
        with pytest.raises(ZeroElement):
            f25.log_of(0)

    def test_tables_are_read_only(self, f25):
        with pytest.raises(ValueError):
            f25.antilog[0] = 2

    def test_prime_field_is_codes_below_p(self, f25):
        for z in range(1, 5):
            assert f25.pow_elements(z, 4) == 1

    def test_ordered_elements_start_with_zero(self, f25):
        order = f25.ordered_elements()
        assert order[0] == 0
        assert order[1] == 1
        assert order[2] == f25.alpha
        assert len(order) == 25

    def test_xi_powers_span_the_field(self, f81):
        # ξ, ξ², …, ξ^e are linearly independent over F_p
        digits = np.array([f81.digits[f81.pow_elements(f81.xi, i)] for i in range(1, 5)])
        rank = 0
        m = digits.copy() % 3
        for col in range(4):
            pivot = next((r for r in range(rank, 4) if m[r, col] % 3), None)
            if pivot is None:
                continue
            m[[rank, pivot]] = m[[pivot, rank]]
            inv = pow(int(m[rank, col]), -1, 3)
            m[rank] = (m[rank] * inv) % 3
            for r in range(4):
                if r != rank:
                    m[r] = (m[r] - m[r, col] * m[rank]) % 3
            rank += 1
        assert rank == 4

    def test_table_ceiling(self):
        params = validate_params(3, 5, 1)
        with pytest.raises(FieldSizeOverflow):
            build_field(params, ceiling=50)


# ══════════════════════════════════════════════════════════════════════
# 3.  Trace, residue classes, characters
# ══════════════════════════════════════════════════════════════════════

class TestTrace:

    def test_trace_of_zero(self, f25):
        assert trace(f25, 0) == 0

    def test_trace_of_one_is_e(self, f25, f81):
        assert trace(f25, 1) == 2
        assert trace(f81, 1) == 1

    def test_trace_of_minus_one(self, f25):
        # ξ^{ℓᵏ} = −1, code 4 in F_5
        assert f25.pow_elements(f25.xi, 3) == 4
        assert trace(f25, 4) == 3

    @settings(max_examples=60, deadline=None)
    @given(x=st.integers(0, 80), y=st.integers(0, 80))
    def test_additive(self, f81, x, y):
        assert trace(f81, f81.add(x, y)) == (trace(f81, x) + trace(f81, y)) % 3

    @settings(max_examples=60, deadline=None)
    @given(x=st.integers(0, 24))
    def test_frobenius_invariant(self, f25, x):
        assert trace(f25, f25.pow_elements(x, 5)) == trace(f25, x)

    @settings(max_examples=40, deadline=None)
    @given(c=st.integers(0, 24), x=st.integers(0, 24))
    def test_trace_scaled_matches_scalar_product(self, f25, c, x):
        expected = trace(f25, f25.mul(c, x))
        assert int(f25.trace_scaled(c, np.array([x]))[0]) == expected

    def test_vectorized_trace_matches_scalar(self, f81):
        xs = f81.ordered_elements()
        assert [trace(f81, int(x)) for x in xs] == f81.trace_of(xs).tolist()


class TestResidueClass:

    def test_one(self, f25):
        assert residue_class(f25, 1) == 0

    def test_alpha(self, f25, f81):
        assert residue_class(f25, f25.alpha) == 5
        assert residue_class(f81, f81.alpha) == 9

    def test_xi(self, f25):
        assert f25.xi == f25.power(4)
        assert residue_class(f25, f25.xi) == 2

    def test_zero_rejected(self, f25):
        with pytest.raises(ZeroElement):
            residue_class(f25, 0)

    @settings(max_examples=50, deadline=None)
    @given(b=st.integers(1, 80))
    def test_defining_identity(self, f81, b):
        # ξ^{i_b} = b^{−N}
        n = f81.params.exp_N
        lhs = f81.pow_elements(f81.xi, residue_class(f81, b))
        rhs = f81.pow_elements(b, (-n) % (f81.q - 1))
        assert lhs == rhs


class TestCharacters:

    @pytest.mark.parametrize("p, z, expected", [(5, 1, 1), (5, 2, -1), (7, 2, 1), (5, 0, 0), (5, 10, 0)])
    def test_quad_char_values(self, p, z, expected):
        assert quad_char(p, z) == expected

    @given(a=st.integers(1, 12), b=st.integers(1, 12))
    def test_quad_char_multiplicative(self, a, b):
        assert quad_char(13, a * b) == quad_char(13, a) * quad_char(13, b)

    def test_quad_char_ext_on_prime_field_is_one(self, f25, f81):
        for tbl in (f25, f81):
            for z in range(1, tbl.p):
                assert quad_char_ext(tbl, z) == 1

    def test_quad_char_ext_alpha_is_minus_one(self, f25):
        assert quad_char_ext(f25, f25.alpha) == -1
        assert quad_char_ext(f25, 0) == 0

    def test_prime_field_element(self, f25):
        assert prime_field_element(f25, -1) == 4
        assert prime_field_element(f25, 7) == 2


class TestPairCeiling:

    def test_within(self):
        require_pairs_within(25, ceiling=625)

    def test_exceeded(self):
        with pytest.raises(CeilingExceeded):
            require_pairs_within(25, ceiling=624)
