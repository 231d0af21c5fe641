"""Foliations through the variety of complexes.

A twisted 1-form w of degree d on P^r gives, for every twist e, the graded
sequences

    minus:  Omega^1(e) -> Omega^3(e+d) -> Omega^5(e+2d) -> ...
    plus:   Omega^0(e) -> Omega^2(e+d) -> Omega^4(e+2d) -> ...

with every map eta -> w * eta. They are complexes exactly when w is
integrable, and the ranks of the maps locate w in the rank stratification of
the variety of complexes on the stage dimensions.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Literal, Mapping, Optional, Sequence, Tuple, Union

from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from stratcx import cxlin, linalg
from stratcx.config import settings
from stratcx.errors import DegenerateTwistError, FormError, IntegrabilityError
from stratcx.pforms import TwistedForm, basis, delta_matrix, integrable, polynomial_ring
from stratcx.rankcomb import (
    DimVector,
    HomologyProfile,
    RankVector,
    dominating_maximal,
    is_admissible,
    maximal_elements,
    stratum_dim,
    tangent_dim,
)

logger = logging.getLogger("stratcx.folan")

Variant = Literal["minus", "plus"]
VARIANTS: Tuple[Variant, ...] = ("minus", "plus")

PolynomialData = Union[Sequence[int], Mapping[Tuple[int, ...], Any]]


def stage_degrees(r: int, variant: Variant) -> List[int]:
    """Form degrees of the stages; forms of degree > r vanish and are dropped."""
    if variant == "minus":
        return [2 * k + 1 for k in range((r - 1) // 2 + 1)]
    if variant == "plus":
        return [2 * k for k in range(r // 2 + 1)]
    raise FormError(f"unknown variant {variant!r}, expected 'minus' or 'plus'")


@dataclass(frozen=True, eq=False)
class DeltaComplex:
    variant: Variant
    r: int
    d: int
    e: int
    form_degrees: Tuple[int, ...]
    twists: Tuple[int, ...]
    dims: Tuple[int, ...]
    matrices: Tuple[DomainMatrix, ...]

    @property
    def dim_vector(self) -> DimVector:
        return DimVector(self.dims)

    def to_complex(self) -> cxlin.ComplexInstance:
        return cxlin.ComplexInstance(self.dims, self.matrices)

    def failing_stage(self) -> Optional[int]:
        """First stage i with a nonzero composition, or None."""
        for i in range(1, len(self.matrices)):
            if not linalg.is_zero(linalg.matmul(self.matrices[i], self.matrices[i - 1])):
                return i
        return None

    def compositions_vanish(self) -> bool:
        return self.failing_stage() is None


def build_complex(w: TwistedForm, e: int, variant: Variant = "minus") -> DeltaComplex:
    if w.k != 1:
        raise FormError(f"the delta complexes need a 1-form, got a {w.k}-form")
    d = w.twist
    if d < 1:
        raise FormError(f"foliation degree must be >= 1, got twist {d}")
    degrees = stage_degrees(w.r, variant)
    twists = [e + k * d for k in range(len(degrees))]
    for tw in twists[:-1]:
        if tw + d == 0:
            raise DegenerateTwistError(f"stage twist {tw} cancels the form twist {d}")
    dims = tuple(basis(w.r, k, tw).dimension for k, tw in zip(degrees, twists))
    matrices = tuple(delta_matrix(w, k, tw) for k, tw in zip(degrees[:-1], twists[:-1]))
    logger.debug(f"delta complex r={w.r} d={d} e={e} {variant}: dims {dims}")
    return DeltaComplex(variant, w.r, d, e, tuple(degrees), tuple(twists), dims, matrices)


def theorem1_check(w: TwistedForm, e: int) -> Tuple[bool, bool]:
    """(w is integrable, both delta sequences are complexes)."""
    is_integrable = integrable(w)
    membership = all(build_complex(w, e, variant).compositions_vanish() for variant in VARIANTS)
    if is_integrable != membership:
        logger.warning(f"integrability {is_integrable} disagrees with complex membership {membership} (r={w.r}, e={e})")
    return is_integrable, membership


@dataclass(frozen=True)
class RankProfile:
    r: int
    d: int
    e: int
    variant: Variant
    dims: DimVector
    ranks: RankVector
    homology: HomologyProfile
    admissible: bool
    dominating_maximal: Tuple[RankVector, ...]
    stratum_dim: int
    tangent_dim: int


def rank_profile(w: TwistedForm, e: int, variant: Optional[Variant] = None) -> RankProfile:
    """Locate an integrable w in the stratification of the complexes on the
    stage dimensions of its delta complex."""
    variant = variant or settings.DEFAULT_VARIANT
    if not integrable(w):
        raise IntegrabilityError("rank profiles are defined for integrable 1-forms only")
    cx = build_complex(w, e, variant)
    if len(cx.dims) < 2:
        raise FormError(f"the {variant} complex on P^{w.r} has a single stage; no ranks to report")
    complex_ = cx.to_complex()
    ranks = cxlin.ranks(complex_)
    dims = cx.dim_vector
    admissible = is_admissible(dims, ranks)
    homology = cxlin.homology(complex_)
    dominating = tuple(dominating_maximal(dims, ranks))
    logger.info(f"rank profile r={w.r} d={w.twist} e={e} {variant}: dims {cx.dims} ranks {ranks.entries}")
    return RankProfile(
        r=w.r,
        d=w.twist,
        e=e,
        variant=variant,
        dims=dims,
        ranks=ranks,
        homology=homology,
        admissible=admissible,
        dominating_maximal=dominating,
        stratum_dim=stratum_dim(dims, ranks),
        tangent_dim=tangent_dim(dims, ranks),
    )


# ---------------------------------------------------------------------------
# Fixtures
# ---------------------------------------------------------------------------

def _polynomial(r: int, data: PolynomialData):
    R = polynomial_ring(r)
    if isinstance(data, Mapping):
        terms = {tuple(int(x) for x in exp): linalg.qq(c) for exp, c in data.items()}
    else:
        terms = {tuple(int(x) for x in data): QQ(1)}
    for exp in terms:
        if len(exp) != r + 1:
            raise FormError(f"exponent {exp} has {len(exp)} entries, expected {r + 1}")
    return R.from_dict(terms)


def _ambient(data: PolynomialData) -> int:
    if isinstance(data, Mapping):
        if not data:
            raise FormError("empty polynomial")
        return len(next(iter(data))) - 1
    return len(data) - 1


def fixture_pencil(F: PolynomialData, G: PolynomialData, p: int, q: int) -> TwistedForm:
    """p F dG - q G dF for homogeneous F of degree p and G of degree q.

    The weights make the radial contraction pqFG - qpGF vanish; for p = q this
    is q F dG - p G dF. F and G are a single exponent vector (a monomial) or a
    mapping from exponent vectors to coefficients.
    """
    r = _ambient(F)
    if _ambient(G) != r:
        raise FormError("F and G live in different numbers of variables")
    Fp, Gp = _polynomial(r, F), _polynomial(r, G)
    for name, poly, degree in (("F", Fp, p), ("G", Gp, q)):
        found = {sum(exp) for exp in poly.keys()}
        if found != {degree}:
            raise FormError(f"{name} must be homogeneous of degree {degree}, found degrees {sorted(found)}")
    gens = polynomial_ring(r).gens
    coeffs = {}
    for i in range(r + 1):
        c = Fp * Gp.diff(gens[i]) * p - Gp * Fp.diff(gens[i]) * q
        if c:
            coeffs[(i,)] = c
    return TwistedForm(r, 1, coeffs, p + q)


def fixture_contact(r: int) -> TwistedForm:
    """sum over pairs (2i, 2i+1) of x_{2i} dx_{2i+1} - x_{2i+1} dx_{2i}; not
    integrable once two pairs fit, i.e. r >= 3."""
    if r < 1:
        raise FormError(f"contact fixture needs r >= 1, got {r}")
    R = polynomial_ring(r)
    gens = R.gens
    coeffs = {}
    for a in range(0, r, 2):
        coeffs[(a + 1,)] = gens[a]
        coeffs[(a,)] = -gens[a + 1]
    return TwistedForm(r, 1, coeffs, 2)


# ---------------------------------------------------------------------------
# The linear section
# ---------------------------------------------------------------------------

def linear_section_dims(r: int, d: int, e: int, variant: Variant = "minus") -> Dict[str, Any]:
    """Stage dimensions of the delta complexes (no form needed) and the
    maximal rank vectors of the complexes on them."""
    degrees = stage_degrees(r, variant)
    twists = [e + k * d for k in range(len(degrees))]
    dims = [basis(r, k, tw).dimension for k, tw in zip(degrees, twists)]
    maxima: List[List[int]] = []
    if len(dims) >= 2:
        maxima = [list(m.entries) for m in maximal_elements(dims)]
    return {
        "r": r,
        "d": d,
        "e": e,
        "variant": variant,
        "form_degrees": degrees,
        "twists": twists,
        "dims": dims,
        "maximal": maxima,
    }


def delta_linear_map_rank(r: int, d: int, e: int, variant: Variant = "minus") -> int:
    """Rank of w -> (delta_w at every stage) on Omega^1_r(d)."""
    forms = basis(r, 1, d)
    degrees = stage_degrees(r, variant)
    twists = [e + k * d for k in range(len(degrees))]
    stages = list(zip(degrees[:-1], twists[:-1]))
    if forms.dimension == 0 or not stages:
        return 0
    rows: Dict[int, Dict[int, Any]] = {}
    width = 0
    for idx, w in enumerate(forms.elements):
        row: Dict[int, Any] = {}
        offset = 0
        for k, tw in stages:
            M = delta_matrix(w, k, tw)
            cols = M.shape[1]
            for a, entries in linalg.nonzero_entries(M).items():
                for b, v in entries.items():
                    row[offset + a * cols + b] = v
            offset += M.shape[0] * cols
        width = offset
        rows[idx] = row
    if width == 0:
        return 0
    return linalg.rank(linalg.sparse(rows, (forms.dimension, width)))
