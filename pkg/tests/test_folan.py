"""Tests for the delta complexes of twisted 1-forms."""

from __future__ import annotations

import numpy as np
import pytest

from stratcx import linalg
from stratcx.errors import FormError, IntegrabilityError
from stratcx.folan import (
    DeltaComplex,
    build_complex,
    delta_linear_map_rank,
    fixture_contact,
    fixture_pencil,
    linear_section_dims,
    rank_profile,
    stage_degrees,
    theorem1_check,
)
from stratcx.pforms import RawForm, TwistedForm, basis, random_form
from stratcx.rankcomb import is_admissible, poset_leq


X0 = (1, 0, 0, 0, 0, 0)
X1 = (0, 1, 0, 0, 0, 0)
X2 = (0, 0, 1, 0, 0, 0)
X3 = (0, 0, 0, 1, 0, 0)


# ---------------------------------------------------------------------------
# Fixtures
# ---------------------------------------------------------------------------

class TestFixtures:
    def test_linear_pencil(self):
        w = fixture_pencil((1, 0, 0, 0), (0, 1, 0, 0), 1, 1)
        expected = RawForm.from_terms(3, 1, [((1, 0, 0, 0), (1,), 1), ((0, 1, 0, 0), (0,), -1)])
        assert w == expected
        assert w.twist == 2

    def test_quadratic_pencil(self):
        # 2 x0^2 (x1 dx2 + x2 dx1) - 2 x1 x2 * 2 x0 dx0
        w = fixture_pencil((2, 0, 0, 0), (0, 1, 1, 0), 2, 2)
        expected = RawForm.from_terms(3, 1, [
            ((2, 1, 0, 0), (2,), 2),
            ((2, 0, 1, 0), (1,), 2),
            ((1, 1, 1, 0), (0,), -4),
        ])
        assert w == expected
        assert w.twist == 4

    def test_polynomial_pencil_is_integrable(self):
        from stratcx.pforms import integrable

        w = fixture_pencil({(1, 0, 0, 0): 1, (0, 0, 1, 0): 3}, {(0, 2, 0, 0): 1, (0, 0, 0, 2): -1}, 1, 2)
        assert integrable(w)

    def test_degree_mismatch(self):
        with pytest.raises(FormError):
            fixture_pencil((2, 0, 0, 0), (0, 1, 0, 0), 1, 1)

    def test_inhomogeneous(self):
        with pytest.raises(FormError):
            fixture_pencil({(1, 0, 0, 0): 1, (0, 2, 0, 0): 1}, (0, 1, 0, 0), 1, 1)


# ---------------------------------------------------------------------------
# Building the complexes
# ---------------------------------------------------------------------------

class TestBuildComplex:
    def test_stage_degrees(self):
        assert stage_degrees(3, "minus") == [1, 3]
        assert stage_degrees(5, "minus") == [1, 3, 5]
        assert stage_degrees(5, "plus") == [0, 2, 4]

    def test_r3_minus_has_one_map(self):
        cx = build_complex(fixture_contact(3), 2, "minus")
        assert isinstance(cx, DeltaComplex)
        assert len(cx.matrices) == 1
        assert cx.dims == (basis(3, 1, 2).dimension, basis(3, 3, 4).dimension)

    def test_r5_dimensions(self):
        w = fixture_pencil(X0, X1, 1, 1)
        assert build_complex(w, 2, "minus").dims == (15, 15, 1)
        assert build_complex(w, 2, "plus").dims == (21, 105, 35)

    def test_zero_form(self):
        cx = build_complex(TwistedForm.zero(5, 1, 2), 2, "minus")
        assert all(linalg.is_zero(M) for M in cx.matrices)
        assert cx.compositions_vanish()

    def test_needs_positive_degree(self):
        with pytest.raises(FormError):
            build_complex(TwistedForm.zero(3, 1, 0), 2)

    def test_unknown_variant(self):
        with pytest.raises(FormError):
            build_complex(fixture_contact(3), 2, "sideways")

    def test_linear_in_w(self):
        rng = np.random.default_rng(1)
        w1, w2 = random_form(5, 1, 2, rng), random_form(5, 1, 2, rng)
        total = build_complex(w1 + w2, 2).matrices
        parts = zip(build_complex(w1, 2).matrices, build_complex(w2, 2).matrices)
        assert all(linalg.equal(T, linalg.add(A, B)) for T, (A, B) in zip(total, parts))


# ---------------------------------------------------------------------------
# Integrability and complexes
# ---------------------------------------------------------------------------

class TestIntegrabilityAgainstComplexes:
    def test_pencil(self):
        assert theorem1_check(fixture_pencil(X0, X1, 1, 1), 2) == (True, True)

    def test_contact(self):
        w = fixture_contact(5)
        assert theorem1_check(w, 2) == (False, False)
        failing = [build_complex(w, 2, v).failing_stage() for v in ("minus", "plus")]
        assert any(stage is not None for stage in failing)

    def test_zero(self):
        assert theorem1_check(TwistedForm.zero(5, 1, 2), 2) == (True, True)

    def test_random_forms(self):
        rng = np.random.default_rng(7)
        for _ in range(3):
            w = random_form(5, 1, 2, rng)
            integ, membership = theorem1_check(w, 2)
            assert integ == membership


class TestRankProfile:
    def test_zero_form(self):
        profile = rank_profile(TwistedForm.zero(5, 1, 2), 2)
        assert profile.ranks.is_zero()
        assert profile.admissible
        assert profile.stratum_dim == 0

    def test_pencil(self):
        profile = rank_profile(fixture_pencil(X0, X1, 1, 1), 2)
        assert profile.variant == "minus"
        assert profile.dims.entries == (15, 15, 1)
        assert is_admissible(profile.dims, profile.ranks)
        assert profile.dominating_maximal
        assert all(poset_leq(profile.ranks, m) for m in profile.dominating_maximal)
        assert profile.tangent_dim >= profile.stratum_dim

    def test_coordinate_change(self):
        a = rank_profile(fixture_pencil(X0, X1, 1, 1), 2)
        b = rank_profile(fixture_pencil(X2, X3, 1, 1), 2)
        assert a.ranks == b.ranks

    def test_plus_variant(self):
        profile = rank_profile(fixture_pencil(X0, X1, 1, 1), 2, "plus")
        assert profile.dims.entries == (21, 105, 35)
        assert profile.admissible

    def test_rejects_non_integrable(self):
        with pytest.raises(IntegrabilityError):
            rank_profile(fixture_contact(5), 2)

    def test_single_stage(self):
        with pytest.raises(FormError):
            rank_profile(fixture_pencil((1, 0, 0), (0, 1, 0), 1, 1), 2, "minus")


# ---------------------------------------------------------------------------
# The linear section
# ---------------------------------------------------------------------------

class TestLinearSection:
    def test_dims_and_maxima(self):
        section = linear_section_dims(5, 2, 2, "minus")
        assert section["dims"] == [15, 15, 1]
        assert section["twists"] == [2, 4, 6]
        assert [14, 1] in section["maximal"]
        assert [15, 0] in section["maximal"]

    def test_delta_map_is_injective_on_forms(self):
        assert delta_linear_map_rank(3, 2, 3) == basis(3, 1, 2).dimension
