"""Algebra-level tests, anchored on the left-regular matrix representation."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vekua import rng
from vekua.biquat import (
    E0,
    E1,
    E2,
    E3,
    Biquaternion,
    _left_mul_matrix,
    bq_bar,
    bq_cconj,
    bq_dagger,
    bq_inner,
    bq_mul,
    bq_norm,
    classify_zero_divisor,
)

SQRT2 = np.sqrt(2.0)


def _bq(c0=0, c1=0, c2=0, c3=0):
    return Biquaternion(c0, c1, c2, c3)


component = st.complex_numbers(
    min_magnitude=0, max_magnitude=2, allow_nan=False, allow_infinity=False
)
biquat_arrays = st.tuples(component, component, component, component).map(
    lambda t: np.array(t, dtype=complex)
)


class TestProduct:
    def test_unit_table(self):
        assert (E1 * E2).isclose(E3)
        assert (E2 * E3).isclose(E1)
        assert (E3 * E1).isclose(E2)
        assert (E2 * E1).isclose(-E3)

    def test_squares_are_minus_one(self):
        for e in (E1, E2, E3):
            assert (e * e).isclose(-E0)

    def test_identity(self):
        p = _bq(1 + 2j, -1, 0.5j, 3)
        assert (E0 * p).isclose(p)
        assert (p * E0).isclose(p)

    def test_complexified_square(self):
        # (1 + i e1)^2 = 2 + 2i e1, by direct expansion
        p = _bq(1, 1j, 0, 0)
        assert (p * p).isclose(_bq(2, 2j, 0, 0))

    @given(biquat_arrays, biquat_arrays)
    @settings(max_examples=60)
    def test_matches_matrix_representation(self, p, q):
        got = bq_mul(p, q)
        want = _left_mul_matrix(p) @ q
        assert np.allclose(got, want, atol=1e-12)

    @given(biquat_arrays, biquat_arrays, biquat_arrays)
    @settings(max_examples=60)
    def test_associative(self, p, q, r):
        left = bq_mul(bq_mul(p, q), r)
        right = bq_mul(p, bq_mul(q, r))
        scale = max(1.0, float(bq_norm(left)))
        assert float(bq_norm(left - right)) <= 1e-11 * scale

    def test_associative_many_random_triples(self):
        n = 10_000
        p = rng.random_biquats(1, n)
        q = rng.random_biquats(2, n)
        r = rng.random_biquats(3, n)
        left = bq_mul(bq_mul(p, q), r)
        right = bq_mul(p, bq_mul(q, r))
        rel = bq_norm(left - right) / np.maximum(bq_norm(left), 1e-30)
        assert rel.max() <= 1e-11

    def test_distributes(self):
        p, q, r = (rng.random_biquats(s, 50) for s in (4, 5, 6))
        assert np.allclose(bq_mul(p, q + r), bq_mul(p, q) + bq_mul(p, r))


class TestConjugations:
    def test_bar_examples(self):
        assert E0.bar().isclose(E0)
        assert E2.bar().isclose(-E2)

    def test_bar_antihomomorphism(self):
        p = rng.random_biquats(7, 200)
        q = rng.random_biquats(8, 200)
        lhs = bq_bar(bq_mul(p, q))
        rhs = bq_mul(bq_bar(q), bq_bar(p))
        assert bq_norm(lhs - rhs).max() <= 1e-12

    def test_dagger_examples(self):
        # (i e1)^dagger = i e1: the complex conjugate flips i, bar flips e1
        assert _bq(0, 1j, 0, 0).dagger().isclose(_bq(0, 1j, 0, 0))
        assert E0.dagger().isclose(E0)
        got = _bq(1 + 1j, 1, 1j, 0).dagger()
        assert got.isclose(_bq(1 - 1j, -1, 1j, 0))

    def test_dagger_is_involution(self):
        p = rng.random_biquats(9, 100)
        assert bq_norm(bq_dagger(bq_dagger(p)) - p).max() == 0.0

    def test_dagger_composition(self):
        p = rng.random_biquats(10, 100)
        assert np.array_equal(bq_dagger(p), bq_bar(bq_cconj(p)))

    def test_complex_conj_examples(self):
        real_q = _bq(1, 2, 3, 4)
        assert real_q.cconj().isclose(real_q)
        assert _bq(1j, 0, 0, 0).cconj().isclose(_bq(-1j, 0, 0, 0))


class TestInnerAndNorm:
    def test_unit_orthonormality(self):
        assert E1.inner(E1) == 1
        assert E1.inner(E2) == 0

    def test_conjugate_linearity(self):
        # <i e1, e1> = conj(i) = -i
        assert _bq(0, 1j, 0, 0).inner(E1) == -1j

    def test_hermitian(self):
        p = rng.random_biquats(11, 300)
        q = rng.random_biquats(12, 300)
        assert np.abs(bq_inner(p, q) - np.conj(bq_inner(q, p))).max() <= 1e-15

    def test_positive(self):
        p = rng.random_biquats(13, 300)
        vals = bq_inner(p, p)
        assert np.abs(vals.imag).max() <= 1e-14
        assert vals.real.min() >= 0.0

    def test_norm_examples(self):
        assert (E0 + E1 + E2 + E3).norm() == pytest.approx(2.0)
        assert _bq(1, 1j, 0, 0).norm() == pytest.approx(SQRT2)

    def test_norm_inequality_and_equality_case(self):
        p = rng.random_biquats(14, 10_000)
        q = rng.random_biquats(15, 10_000)
        defect = bq_norm(bq_mul(p, q)) - SQRT2 * bq_norm(p) * bq_norm(q)
        assert defect.max() <= 1e-11
        w = _bq(1, 1j, 0, 0)
        ratio = (w * w).norm() / w.norm() ** 2
        assert abs(ratio - SQRT2) <= 1e-12

    def test_norm_of_complexified_square(self):
        w = _bq(1, 1j, 0, 0)
        assert (w * w).norm() == pytest.approx(2 * SQRT2)


class TestScalarIdentities:
    def test_sc_cyclic(self):
        p = rng.random_biquats(16, 500)
        q = rng.random_biquats(17, 500)
        pq = bq_mul(p, q)
        qp = bq_mul(q, p)
        assert np.abs(pq[:, 0] - qp[:, 0]).max() <= 1e-13
        assert np.abs(pq[:, 0] - bq_bar(pq)[:, 0]).max() == 0.0

    def test_ek_a_ek_contraction(self):
        # sum_k e_k a e_k = -4 a_0 + a
        a = rng.random_biquats(18, 500)
        units = np.eye(4, dtype=complex)
        acc = np.zeros_like(a)
        for k in (1, 2, 3):
            e = units[k][None, :]
            acc = acc + bq_mul(e, bq_mul(a, e))
        want = a.copy()
        want[:, 0] -= 4 * a[:, 0]
        assert bq_norm(acc - want).max() == 0.0


class TestZeroDivisors:
    def test_witness(self):
        assert _bq(1, 1j, 0, 0).classify() == "zero_divisor"

    def test_product_with_bar_vanishes(self):
        w = _bq(1, 1j, 0, 0)
        assert (w * w.bar()).norm() <= 1e-15

    def test_invertible_unit(self):
        assert E1.classify() == "invertible"
        assert (E1 * -E1).isclose(E0)

    def test_zero(self):
        assert _bq().classify() == "zero"

    def test_tol_validation(self):
        with pytest.raises(ValueError):
            classify_zero_divisor(np.zeros(4, dtype=complex), tol=0.0)
