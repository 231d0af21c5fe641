"""Tests for twisted forms, the star product and the delta matrices."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings as hyp_settings
from hypothesis import strategies as st

from stratcx import linalg
from stratcx.errors import DegenerateTwistError, FormError
from stratcx.folan import fixture_contact, fixture_pencil
from stratcx.pforms import (
    RawForm,
    TwistedForm,
    basis,
    bott_dim,
    contraction_kernel_dim,
    delta_injectivity_rank,
    delta_matrix,
    dimension_report,
    ext_d,
    integrable,
    polynomial_ring,
    printed_formula_dim,
    radial_contract,
    random_form,
    star,
    wedge,
)


def _form(r, k, twist, terms):
    return TwistedForm.from_raw(RawForm.from_terms(r, k, terms), twist)


def _rotation(r=3):
    """x0 dx1 - x1 dx0."""
    x0 = tuple(1 if i == 0 else 0 for i in range(r + 1))
    x1 = tuple(1 if i == 1 else 0 for i in range(r + 1))
    return _form(r, 1, 2, [(x0, (1,), 1), (x1, (0,), -1)])


def _constant(r, value=1):
    R = polynomial_ring(r)
    return TwistedForm(r, 0, {(): R.from_dict({(0,) * (r + 1): value})}, 0)


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------

class TestTwistedForm:
    def test_rotation_descends(self):
        w = _rotation()
        assert radial_contract(w).is_zero()
        assert w.k == 1 and w.twist == 2

    def test_nonzero_contraction_rejected(self):
        with pytest.raises(FormError):
            _form(3, 1, 2, [((1, 0, 0, 0), (1,), 1)])

    def test_wrong_degree_rejected(self):
        with pytest.raises(FormError):
            _form(3, 1, 3, [((1, 0, 0, 0), (1,), 1), ((0, 1, 0, 0), (0,), -1)])

    def test_unordered_index_set_picks_up_sign(self):
        a = RawForm.from_terms(3, 2, [((0, 0, 0, 0), (1, 0), 1)])
        b = RawForm.from_terms(3, 2, [((0, 0, 0, 0), (0, 1), -1)])
        assert a == b

    def test_repeated_index_vanishes(self):
        assert RawForm.from_terms(3, 2, [((0, 0, 0, 0), (1, 1), 5)]).is_zero()

    def test_terms_are_canonical(self):
        exps = [exp for exp, _, _ in _rotation().terms()]
        assert exps == sorted(exps)


# ---------------------------------------------------------------------------
# Exterior algebra
# ---------------------------------------------------------------------------

class TestExteriorAlgebra:
    def test_ext_d_of_rotation(self):
        dw = ext_d(_rotation())
        assert dw == RawForm.from_terms(3, 2, [((0, 0, 0, 0), (0, 1), 2)])

    def test_odd_square_vanishes(self):
        w = _rotation()
        assert wedge(w, w).is_zero()

    def test_wedge_degree_bound(self):
        top = RawForm.from_terms(3, 4, [((0, 0, 0, 0), (0, 1, 2, 3), 1)])
        with pytest.raises(FormError):
            wedge(top, _rotation())

    def test_ambient_mismatch(self):
        with pytest.raises(FormError):
            wedge(_rotation(3), _rotation(4))

    @hyp_settings(max_examples=20, deadline=None)
    @given(st.integers(0, 10_000), st.integers(0, 2), st.integers(1, 3))
    def test_contraction_of_derivative(self, seed, k, extra):
        a = random_form(3, k, k + extra, np.random.default_rng(seed))
        assert radial_contract(ext_d(a)) == a.scale(a.twist)


# ---------------------------------------------------------------------------
# Star product
# ---------------------------------------------------------------------------

class TestStar:
    def test_square_of_rotation_vanishes(self):
        w = _rotation()
        assert star(w, w).is_zero()

    def test_contact_square_is_w_dw(self):
        w = fixture_contact(3)
        square = star(w, w)
        assert not square.is_zero()
        assert square == wedge(w, ext_d(w))
        assert square.k == 3 and square.twist == 4

    def test_degenerate_twist(self):
        c = _constant(3)
        with pytest.raises(DegenerateTwistError):
            star(c, c)

    def test_functions(self):
        # for 0-forms of twists p, q the product is the twisted bracket of f and g
        x0 = _form(3, 0, 1, [((1, 0, 0, 0), (), 1)])
        x1 = _form(3, 0, 1, [((0, 1, 0, 0), (), 1)])
        result = star(x0, x1)
        expected = _form(3, 1, 2, [((1, 0, 0, 0), (1,), "1/2"), ((0, 1, 0, 0), (0,), "-1/2")])
        assert result == expected

    @hyp_settings(max_examples=25, deadline=None)
    @given(st.integers(0, 10_000), st.sampled_from([3, 4]), st.integers(0, 2), st.integers(0, 2))
    def test_graded_commutativity(self, seed, r, k1, k2):
        rng = np.random.default_rng(seed)
        a = random_form(r, k1, k1 + 1 + int(rng.integers(0, 3)), rng)
        b = random_form(r, k2, k2 + 1 + int(rng.integers(0, 3)), rng)
        if k1 + k2 + 1 > r + 1:
            return
        sign = -1 if ((k1 + 1) * (k2 + 1)) % 2 else 1
        ab = star(a, b)
        assert ab == star(b, a).scale(sign)
        assert radial_contract(ab).is_zero()

    @hyp_settings(max_examples=10, deadline=None)
    @given(st.integers(0, 10_000), st.sampled_from([3, 4]))
    def test_associativity(self, seed, r):
        rng = np.random.default_rng(seed)
        ks = [0, 1, 0] if r == 3 else [1, 0, 1]
        a, b, c = (random_form(r, k, k + 1 + int(rng.integers(0, 2)), rng) for k in ks)
        assert star(star(a, b), c) == star(a, star(b, c))

    @hyp_settings(max_examples=25, deadline=None)
    @given(st.integers(0, 10_000))
    def test_square_matches_frobenius(self, seed):
        w = random_form(4, 1, 2 + seed % 2, np.random.default_rng(seed))
        assert star(w, w) == wedge(w, ext_d(w))
        assert integrable(w) == star(w, w).is_zero()


# ---------------------------------------------------------------------------
# Bases and dimensions
# ---------------------------------------------------------------------------

class TestBasis:
    def test_examples(self):
        assert basis(3, 1, 1).dimension == 0
        assert basis(3, 1, 2).dimension == 6
        assert basis(3, 0, 2).dimension == 10

    def test_rotation_is_a_basis_element(self):
        space = basis(3, 1, 2)
        coords = space.coordinates(_rotation(), check=True)
        assert sum(1 for c in coords if c) == 1

    def test_coordinates_round_trip(self):
        w = random_form(4, 2, 4, np.random.default_rng(3))
        space = basis(4, 2, 4)
        assert space.combine(space.coordinates(w)) == w

    def test_twist_mismatch(self):
        with pytest.raises(FormError):
            basis(3, 1, 3).coordinates(_rotation())

    def test_matches_contraction_kernel_and_bott(self):
        for r in range(1, 5):
            for k in range(0, r + 1):
                for e in range(0, 5):
                    computed = basis(r, k, e).dimension
                    assert computed == contraction_kernel_dim(r, k, e), (r, k, e)
                    if e > k >= 1:
                        assert computed == bott_dim(r, k, e), (r, k, e)

    def test_printed_formula_comparison(self):
        assert printed_formula_dim(3, 1, 2, 2) == 6
        report = dimension_report(3, 1, 3, d=2)
        assert report["computed"] == report["bott"] == 20
        assert report["printed_formula"] == 10
        assert report["printed_formula_matches"] is False

    def test_random_form_is_reproducible(self):
        a = random_form(3, 1, 3, np.random.default_rng(12))
        b = random_form(3, 1, 3, np.random.default_rng(12))
        assert a == b and not a.is_zero()


# ---------------------------------------------------------------------------
# delta matrices
# ---------------------------------------------------------------------------

class TestDelta:
    def test_zero_form(self):
        M = delta_matrix(TwistedForm.zero(3, 1, 2), 1, 2)
        assert M.shape == (basis(3, 3, 4).dimension, basis(3, 1, 2).dimension)
        assert linalg.is_zero(M)

    def test_linear_in_w(self):
        rng = np.random.default_rng(5)
        w1, w2 = random_form(3, 1, 2, rng), random_form(3, 1, 2, rng)
        total = delta_matrix(w1 + w2, 1, 2)
        assert linalg.equal(total, linalg.add(delta_matrix(w1, 1, 2), delta_matrix(w2, 1, 2)))

    def test_rotation_in_own_kernel(self):
        w = _rotation()
        coords = basis(3, 1, 2).coordinates(w)
        column = linalg.columns_to_matrix([coords], len(coords))
        assert linalg.is_zero(linalg.matmul(delta_matrix(w, 1, 2), column))

    def test_needs_a_one_form(self):
        with pytest.raises(FormError):
            delta_matrix(_constant(3), 0, 1)

    def test_injectivity(self):
        assert delta_injectivity_rank(3, 2, 1, 3) == basis(3, 1, 2).dimension == 6

    def test_injectivity_precondition(self):
        with pytest.raises(FormError):
            delta_injectivity_rank(3, 2, 2, 3)


class TestIntegrable:
    def test_pencil(self):
        assert integrable(fixture_pencil((1, 0, 0, 0), (0, 1, 0, 0), 1, 1))

    def test_contact(self):
        assert not integrable(fixture_contact(3))

    def test_zero(self):
        assert integrable(TwistedForm.zero(3, 1, 2))

    def test_needs_one_form(self):
        with pytest.raises(FormError):
            integrable(_constant(3))
