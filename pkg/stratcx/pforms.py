"""Twisted differential forms on P^r with exact rational coefficients.

A form is stored through its affine representative in the r+1 homogeneous
coordinates x0..xr: a map from strictly increasing index sets I to
polynomial coefficients, read as sum_I p_I dx_I. ``RawForm`` is any such
form (results of d, of wedges, ...); ``TwistedForm`` additionally has a
twist e, homogeneous coefficients of degree e - k and vanishing contraction
with the radial field R = sum x_i d/dx_i, which is what makes it a section
of Omega^k(e) on projective space.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.orderings import lex
from sympy.polys.rings import PolyElement, PolyRing, ring

from stratcx import linalg
from stratcx.config import settings
from stratcx.errors import DegenerateTwistError, FormError

logger = logging.getLogger("stratcx.pforms")

IndexSet = Tuple[int, ...]
Exponent = Tuple[int, ...]


@lru_cache(maxsize=None)
def polynomial_ring(r: int) -> PolyRing:
    """QQ[x0..xr] with lex order; one shared ring per ambient dimension."""
    if r < 0:
        raise FormError(f"ambient dimension must be nonnegative, got {r}")
    R, *_ = ring(",".join(f"x{i}" for i in range(r + 1)), QQ, lex)
    return R


def monomials(nvars: int, degree: int) -> List[Exponent]:
    """Exponent vectors of the given total degree, lexicographically ascending."""
    if degree < 0:
        return []
    if nvars == 1:
        return [(degree,)]
    out: List[Exponent] = []
    for first in range(degree + 1):
        out.extend((first,) + rest for rest in monomials(nvars - 1, degree - first))
    return out


def _merge_sign(I: IndexSet, J: IndexSet) -> int:
    inversions = sum(1 for i in I for j in J if i > j)
    return -1 if inversions % 2 else 1


def _minus_indicator(m: Exponent, I: IndexSet) -> Exponent:
    exp = list(m)
    for i in I:
        exp[i] -= 1
    return tuple(exp)


@dataclass(frozen=True, eq=False)
class RawForm:
    r: int
    k: int
    coeffs: Mapping[IndexSet, PolyElement]

    def __post_init__(self):
        R = polynomial_ring(self.r)
        if self.k < 0:
            raise FormError(f"form degree must be nonnegative, got {self.k}")
        clean: Dict[IndexSet, PolyElement] = {}
        for I, p in dict(self.coeffs).items():
            I = tuple(int(i) for i in I)
            if len(I) != self.k or any(a >= b for a, b in zip(I, I[1:])):
                raise FormError(f"index set {I} is not a strictly increasing {self.k}-tuple")
            if any(i < 0 or i > self.r for i in I):
                raise FormError(f"index set {I} out of range for r={self.r}")
            if p.ring != R:
                raise FormError(f"coefficient for {I} lives in {p.ring}, expected {R}")
            if p:
                clean[I] = p
        object.__setattr__(self, "coeffs", clean)

    @property
    def ring(self) -> PolyRing:
        return polynomial_ring(self.r)

    @classmethod
    def zero(cls, r: int, k: int) -> "RawForm":
        return cls(r, k, {})

    @classmethod
    def from_terms(cls, r: int, k: int, terms: Iterable[Tuple[Sequence[int], Sequence[int], Any]]) -> "RawForm":
        """Build from (exponent, index set, coefficient) triples."""
        R = polynomial_ring(r)
        grouped: Dict[IndexSet, Dict[Exponent, Any]] = {}
        for exp, I, c in terms:
            exp = tuple(int(x) for x in exp)
            if len(exp) != r + 1 or any(x < 0 for x in exp):
                raise FormError(f"exponent {exp} is not a monomial in {r + 1} variables")
            I = tuple(int(i) for i in I)
            if len(set(I)) != len(I):
                continue  # dx_i ^ dx_i = 0
            value = linalg.qq(c)
            if sum(1 for a in range(len(I)) for b in range(a + 1, len(I)) if I[a] > I[b]) % 2:
                value = -value
            I = tuple(sorted(I))
            bucket = grouped.setdefault(I, {})
            bucket[exp] = bucket.get(exp, QQ(0)) + value
        return cls(r, k, {I: R.from_dict(b) for I, b in grouped.items()})

    def is_zero(self) -> bool:
        return not self.coeffs

    def coefficient(self, I: IndexSet, exp: Exponent):
        p = self.coeffs.get(I)
        if p is None:
            return QQ(0)
        return p.get(exp, QQ(0))

    def terms(self) -> List[Tuple[Exponent, IndexSet, Any]]:
        """(exponent, index set, coefficient) in canonical order."""
        out = [(exp, I, c) for I, p in self.coeffs.items() for exp, c in p.items()]
        out.sort(key=lambda t: (t[0], t[1]))
        return out

    def degrees(self) -> set:
        return {sum(exp) for p in self.coeffs.values() for exp in p.keys()}

    def _combine(self, other: "RawForm", sign: int) -> "RawForm":
        _same_ambient(self, other)
        if self.k != other.k:
            raise FormError(f"cannot add a {self.k}-form and a {other.k}-form")
        out = dict(self.coeffs)
        for I, q in other.coeffs.items():
            q = q if sign > 0 else -q
            out[I] = out[I] + q if I in out else q
        return RawForm(self.r, self.k, out)

    def __add__(self, other: "RawForm") -> "RawForm":
        return self._combine(other, 1)

    def __sub__(self, other: "RawForm") -> "RawForm":
        return self._combine(other, -1)

    def __neg__(self) -> "RawForm":
        return RawForm(self.r, self.k, {I: -p for I, p in self.coeffs.items()})

    def scale(self, c: Any) -> "RawForm":
        c = linalg.qq(c)
        return RawForm(self.r, self.k, {I: p * c for I, p in self.coeffs.items()})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RawForm):
            return NotImplemented
        return self.r == other.r and self.k == other.k and self.coeffs == other.coeffs

    def __repr__(self) -> str:
        body = " + ".join(f"({p.as_expr()})*d{list(I)}" for I, p in sorted(self.coeffs.items())) or "0"
        return f"{type(self).__name__}(r={self.r}, k={self.k}: {body})"


@dataclass(frozen=True, eq=False)
class TwistedForm(RawForm):
    twist: int

    def __post_init__(self):
        super().__post_init__()
        expected = self.twist - self.k
        bad = [deg for deg in self.degrees() if deg != expected]
        if bad:
            raise FormError(
                f"coefficients of a {self.k}-form of twist {self.twist} must have degree {expected}, found {sorted(set(bad))}"
            )
        if not radial_contract(self).is_zero():
            raise FormError("form does not descend to projective space: radial contraction is nonzero")

    @classmethod
    def from_raw(cls, raw: RawForm, twist: int) -> "TwistedForm":
        return cls(raw.r, raw.k, raw.coeffs, twist)

    @classmethod
    def zero(cls, r: int, k: int, twist: int) -> "TwistedForm":  # type: ignore[override]
        return cls(r, k, {}, twist)

    def __add__(self, other: RawForm) -> RawForm:
        raw = self._combine(other, 1)
        if isinstance(other, TwistedForm) and other.twist == self.twist:
            return TwistedForm.from_raw(raw, self.twist)
        return raw

    def __neg__(self) -> "TwistedForm":
        return TwistedForm.from_raw(super().__neg__(), self.twist)

    def scale(self, c: Any) -> "TwistedForm":
        return TwistedForm.from_raw(super().scale(c), self.twist)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, TwistedForm) and other.twist != self.twist and not (self.is_zero() and other.is_zero()):
            return False
        return super().__eq__(other)


def _same_ambient(a: RawForm, b: RawForm) -> None:
    if a.r != b.r:
        raise FormError(f"forms on different ambient spaces: r={a.r} vs r={b.r}")


# ---------------------------------------------------------------------------
# Exterior algebra
# ---------------------------------------------------------------------------

def wedge(a: RawForm, b: RawForm) -> RawForm:
    _same_ambient(a, b)
    if a.k + b.k > a.r + 1:
        raise FormError(f"wedge of a {a.k}-form and a {b.k}-form exceeds degree {a.r + 1}")
    out: Dict[IndexSet, PolyElement] = {}
    for I, p in a.coeffs.items():
        for J, q in b.coeffs.items():
            if set(I) & set(J):
                continue
            K = tuple(sorted(I + J))
            term = p * q if _merge_sign(I, J) > 0 else -(p * q)
            out[K] = out[K] + term if K in out else term
    return RawForm(a.r, a.k + b.k, out)


def ext_d(a: RawForm) -> RawForm:
    """Exterior derivative of the affine representative."""
    gens = a.ring.gens
    out: Dict[IndexSet, PolyElement] = {}
    for I, p in a.coeffs.items():
        for j in range(a.r + 1):
            if j in I:
                continue
            dp = p.diff(gens[j])
            if not dp:
                continue
            position = sum(1 for i in I if i < j)
            K = tuple(sorted(I + (j,)))
            term = dp if position % 2 == 0 else -dp
            out[K] = out[K] + term if K in out else term
    return RawForm(a.r, a.k + 1, out)


def radial_contract(a: RawForm) -> RawForm:
    """Contraction with R = sum x_i d/dx_i; functions contract to zero."""
    if a.k == 0:
        return RawForm.zero(a.r, 0)
    gens = a.ring.gens
    out: Dict[IndexSet, PolyElement] = {}
    for I, p in a.coeffs.items():
        for t, i in enumerate(I):
            J = I[:t] + I[t + 1:]
            term = p * gens[i]
            if t % 2:
                term = -term
            out[J] = out[J] + term if J in out else term
    return RawForm(a.r, a.k - 1, out)


def star(a: TwistedForm, b: TwistedForm) -> TwistedForm:
    """
    Second multiplication of twisted forms:

        a * b = d1/(d1+d2) a ^ db + (-1)^((k1+1)(k2+1)) d2/(d1+d2) b ^ da

    The result lies in Omega^(k1+k2+1)(d1+d2); its radial contraction is
    checked on construction.
    """
    _same_ambient(a, b)
    d1, d2 = a.twist, b.twist
    if d1 + d2 == 0:
        raise DegenerateTwistError(f"star product undefined for twists {d1} + {d2} = 0")
    if a.k + b.k + 1 > a.r + 1:
        raise FormError(f"star of a {a.k}-form and a {b.k}-form exceeds degree {a.r + 1}")
    sign = -1 if ((a.k + 1) * (b.k + 1)) % 2 else 1
    total = d1 + d2
    raw = wedge(a, ext_d(b)).scale(QQ(d1, total)) + wedge(b, ext_d(a)).scale(QQ(sign * d2, total))
    return TwistedForm.from_raw(raw, twist=total)


def integrable(w: TwistedForm) -> bool:
    """Frobenius condition w ^ dw = 0 for a twisted 1-form."""
    if w.k != 1:
        raise FormError(f"integrability is defined for 1-forms, got a {w.k}-form")
    if w.r < 2:
        return True  # no nonzero 3-forms on P^1
    return wedge(w, ext_d(w)).is_zero()


# ---------------------------------------------------------------------------
# Bases of Omega^k_r(e)
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FormBasis:
    """
    Deterministic basis of Omega^k_r(e). Element j has coefficient 1 at the
    coordinate ``keys[j]`` = (index set, exponent) and 0 at every other key,
    so coordinates of a form are read off at the keys.
    """

    r: int
    k: int
    e: int
    elements: Tuple[TwistedForm, ...]
    keys: Tuple[Tuple[IndexSet, Exponent], ...]

    @property
    def dimension(self) -> int:
        return len(self.elements)

    def coordinates(self, form: TwistedForm, check: bool = False) -> List[Any]:
        if (form.r, form.k) != (self.r, self.k):
            raise FormError(f"a form on (r={form.r}, k={form.k}) has no coordinates in Omega^{self.k}_{self.r}({self.e})")
        if not form.is_zero() and form.twist != self.e:
            raise FormError(f"twist {form.twist} does not match basis twist {self.e}")
        coords = [form.coefficient(I, exp) for I, exp in self.keys]
        if check and self.combine(coords) != form:
            raise FormError("form is not in the span of the basis")
        return coords

    def combine(self, coeffs: Sequence[Any]) -> TwistedForm:
        if len(coeffs) != self.dimension:
            raise FormError(f"expected {self.dimension} coefficients, got {len(coeffs)}")
        out: Dict[IndexSet, PolyElement] = {}
        for c, element in zip(coeffs, self.elements):
            c = linalg.qq(c)
            if not c:
                continue
            for I, p in element.coeffs.items():
                term = p * c
                out[I] = out[I] + term if I in out else term
        return TwistedForm(self.r, self.k, out, self.e)


@lru_cache(maxsize=None)
def _koszul_kernel(size: int, k: int) -> Tuple[Tuple[IndexSet, ...], Tuple[int, ...], Tuple[Dict[int, Any], ...]]:
    """
    Kernel of the contraction on k-forms supported on ``size`` variables whose
    exponents are all shifted by the same multidegree: it only depends on the
    support size. Returns (columns, free columns, kernel vectors).
    """
    cols = tuple(combinations(range(size), k))
    rows = {J: idx for idx, J in enumerate(combinations(range(size), k - 1))}
    entries: Dict[int, Dict[int, int]] = {}
    for c, I in enumerate(cols):
        for t in range(len(I)):
            J = I[:t] + I[t + 1:]
            entries.setdefault(rows[J], {})[c] = -1 if t % 2 else 1
    A = linalg.sparse(entries, (len(rows), len(cols)))
    return cols, linalg.free_columns(A), tuple(linalg.nullspace(A))


@lru_cache(maxsize=None)
def basis(r: int, k: int, e: int) -> FormBasis:
    """
    Basis of the k-forms with coefficients of degree e - k killed by radial
    contraction, assembled block by block over the multidegree of x^a dx_I
    (a + indicator of I), which the contraction preserves.
    """
    if r < 1 or k < 0:
        raise FormError(f"basis needs r >= 1 and k >= 0, got r={r}, k={k}")
    R = polynomial_ring(r)
    elements: List[TwistedForm] = []
    keys: List[Tuple[IndexSet, Exponent]] = []
    if k > r or e - k < 0:
        return FormBasis(r, k, e, (), ())
    if k == 0:
        for m in monomials(r + 1, e):
            elements.append(TwistedForm(r, 0, {(): R.from_dict({m: QQ(1)})}, e))
            keys.append(((), m))
        return FormBasis(r, k, e, tuple(elements), tuple(keys))
    for m in monomials(r + 1, e):
        support = tuple(i for i in range(r + 1) if m[i] > 0)
        if len(support) < k:
            continue
        cols, free, kernel = _koszul_kernel(len(support), k)
        for f, vec in zip(free, kernel):
            coeffs: Dict[IndexSet, PolyElement] = {}
            for c, value in vec.items():
                I = tuple(support[t] for t in cols[c])
                coeffs[I] = R.from_dict({_minus_indicator(m, I): value})
            elements.append(TwistedForm(r, k, coeffs, e))
            I_free = tuple(support[t] for t in cols[f])
            keys.append((I_free, _minus_indicator(m, I_free)))
    logger.debug(f"basis r={r} k={k} e={e}: dimension {len(elements)}")
    return FormBasis(r, k, e, tuple(elements), tuple(keys))


def contraction_matrix(r: int, k: int, e: int) -> DomainMatrix:
    """The full radial contraction from k-forms to (k-1)-forms, one column per
    (index set, monomial) pair, both sides in lexicographic order."""
    cols = [(I, exp) for I in combinations(range(r + 1), k) for exp in monomials(r + 1, e - k)]
    rows = {key: idx for idx, key in enumerate(
        (J, exp) for J in combinations(range(r + 1), k - 1) for exp in monomials(r + 1, e - k + 1)
    )}
    entries: Dict[int, Dict[int, int]] = {}
    for c, (I, exp) in enumerate(cols):
        for t, i in enumerate(I):
            J = I[:t] + I[t + 1:]
            shifted = list(exp)
            shifted[i] += 1
            entries.setdefault(rows[(J, tuple(shifted))], {})[c] = -1 if t % 2 else 1
    return linalg.sparse(entries, (len(rows), len(cols)))


def contraction_kernel_dim(r: int, k: int, e: int) -> int:
    """Brute-force dim Omega^k_r(e): kernel of the full contraction matrix."""
    if k > r + 1 or e - k < 0:
        return 0
    columns = comb(r + 1, k) * len(monomials(r + 1, e - k))
    if k == 0:
        return columns
    return columns - linalg.rank(contraction_matrix(r, k, e))


def bott_dim(r: int, k: int, e: int) -> Optional[int]:
    """binom(e-1, k) binom(e+r-k, r-k), valid for e > k >= 1; None elsewhere."""
    if not (e > k >= 1) or k > r:
        return None
    return comb(e - 1, k) * comb(e + r - k, r - k)


def printed_formula_dim(r: int, k: int, e: int, d: int) -> int:
    """The dimension count as printed with the foliation degree d in the second
    binomial, binom(r-k+e, r-k) binom(d-1, k); kept for comparison only."""
    if k > r or d < 1:
        return 0
    return comb(r - k + e, r - k) * comb(d - 1, k)


def dimension_report(r: int, k: int, e: int, d: Optional[int] = None) -> Dict[str, Any]:
    computed = basis(r, k, e).dimension
    report: Dict[str, Any] = {
        "r": r,
        "k": k,
        "e": e,
        "computed": computed,
        "contraction_kernel": contraction_kernel_dim(r, k, e),
        "bott": bott_dim(r, k, e),
        "printed_formula": None,
        "printed_formula_matches": None,
    }
    if d is not None:
        printed = printed_formula_dim(r, k, e, d)
        report["printed_formula"] = printed
        report["printed_formula_matches"] = printed == computed
    return report


def random_form(r: int, k: int, e: int, rng: np.random.Generator, terms: Optional[int] = None) -> TwistedForm:
    """Sparse random integer combination of basis elements of Omega^k_r(e)."""
    space = basis(r, k, e)
    if space.dimension == 0:
        return TwistedForm.zero(r, k, e)
    count = min(terms or settings.RANDOM_FORM_TERMS, space.dimension)
    picks = sorted(int(i) for i in rng.choice(space.dimension, size=count, replace=False))
    bound = settings.WITNESS_ENTRY_BOUND
    coeffs = [0] * space.dimension
    for i in picks:
        value = 0
        while value == 0:
            value = int(rng.integers(-bound, bound + 1))
        coeffs[i] = value
    return space.combine(coeffs)


# ---------------------------------------------------------------------------
# delta_w = left star multiplication by a 1-form
# ---------------------------------------------------------------------------

def delta_matrix(w: TwistedForm, k: int, e: int) -> DomainMatrix:
    """Matrix of eta -> w * eta from Omega^k_r(e) to Omega^(k+2)_r(e+d)."""
    if w.k != 1:
        raise FormError(f"delta needs a 1-form, got a {w.k}-form")
    if w.twist + e == 0:
        raise DegenerateTwistError(f"delta undefined: twist {w.twist} + {e} = 0")
    source = basis(w.r, k, e)
    target = basis(w.r, k + 2, e + w.twist)
    if target.dimension == 0 or source.dimension == 0 or w.is_zero():
        return linalg.zeros((target.dimension, source.dimension))
    columns = [target.coordinates(star(w, eta)) for eta in source.elements]
    return linalg.columns_to_matrix(columns, target.dimension)


def delta_injectivity_rank(r: int, d: int, k: int, e: int) -> int:
    """Rank of w -> delta_w on Omega^1_r(d), each delta_w flattened into a row."""
    if k + 2 > r:
        raise FormError(f"injectivity needs k + 2 <= r, got k={k}, r={r}")
    forms = basis(r, 1, d)
    source, target = basis(r, k, e), basis(r, k + 2, e + d)
    if 0 in (forms.dimension, source.dimension, target.dimension):
        raise FormError(
            f"injectivity needs nonzero spaces: dim Omega^1({d})={forms.dimension}, "
            f"dim Omega^{k}({e})={source.dimension}, dim Omega^{k + 2}({e + d})={target.dimension}"
        )
    width = source.dimension
    rows: Dict[int, Dict[int, Any]] = {}
    for idx, w in enumerate(forms.elements):
        flat = linalg.nonzero_entries(delta_matrix(w, k, e))
        rows[idx] = {a * width + b: v for a, row in flat.items() for b, v in row.items()}
    A = linalg.sparse(rows, (forms.dimension, target.dimension * width))
    return linalg.rank(A)
