"""JSON shapes for complexes, forms and every report the CLI or API emits.

Rationals travel as exact strings ("p" or "p/q"). Field order is the model
order and nothing time-dependent is recorded, so the same inputs always
serialize to the same bytes.
"""

from __future__ import annotations

from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from stratcx import __version__, linalg
from stratcx.cxlin import ComplexInstance
from stratcx.errors import ShapeError
from stratcx.pforms import RawForm, TwistedForm
from stratcx.rankcomb import HomologyProfile


class _Model(BaseModel):
    model_config = ConfigDict(extra="forbid")


# ---------------------------------------------------------------------------
# Instances
# ---------------------------------------------------------------------------

class ComplexModel(_Model):
    dims: List[int]
    maps: List[List[List[str]]]

    @field_validator("maps")
    @classmethod
    def _exact_entries(cls, maps: List[List[List[str]]]) -> List[List[List[str]]]:
        for block in maps:
            for row in block:
                for entry in row:
                    linalg.qq(entry)
        return maps

    @classmethod
    def from_instance(cls, c: ComplexInstance) -> "ComplexModel":
        return cls(dims=list(c.dims), maps=[linalg.to_strings(M) for M in c.maps])

    def to_instance(self) -> ComplexInstance:
        if len(self.maps) != len(self.dims) - 1:
            raise ShapeError(f"{len(self.dims)} spaces need {len(self.dims) - 1} maps, got {len(self.maps)}")
        return ComplexInstance(
            tuple(self.dims),
            tuple(
                linalg.from_strings(rows, (self.dims[i], self.dims[i - 1]))
                for i, rows in enumerate(self.maps, start=1)
            ),
        )


class TermModel(_Model):
    exp: List[int]
    dx: List[int]
    coeff: str

    @field_validator("coeff")
    @classmethod
    def _exact_coeff(cls, coeff: str) -> str:
        linalg.qq(coeff)
        return coeff


class TwistedFormModel(_Model):
    r: int
    k: int
    twist: int
    terms: List[TermModel] = Field(default_factory=list)

    @classmethod
    def from_form(cls, form: TwistedForm) -> "TwistedFormModel":
        return cls(
            r=form.r,
            k=form.k,
            twist=form.twist,
            terms=[
                TermModel(exp=list(exp), dx=list(I), coeff=linalg.qq_str(c))
                for exp, I, c in form.terms()
            ],
        )

    def to_form(self) -> TwistedForm:
        raw = RawForm.from_terms(self.r, self.k, ((t.exp, t.dx, t.coeff) for t in self.terms))
        return TwistedForm.from_raw(raw, self.twist)


class HomologyModel(_Model):
    h: List[int]
    b: List[int]
    z: List[int]

    @classmethod
    def from_profile(cls, p: HomologyProfile) -> "HomologyModel":
        return cls(h=list(p.h), b=list(p.b), z=list(p.z))


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

class ReportHeader(_Model):
    tool: str = "stratcx"
    version: str = __version__
    command: str
    config: Dict[str, Any] = Field(default_factory=dict)
    seed: Optional[int] = None


class StrataRow(_Model):
    ranks: List[int]
    admissible: bool
    homology: List[int]
    stratum_dim: int
    tangent_dim: int
    maximal: bool


class StrataReport(_Model):
    header: ReportHeader
    dims: List[int]
    count: int
    maximal: List[List[int]]
    rows: List[StrataRow]


class DivisorModel(_Model):
    ranks: List[int]
    closure_dim: int
    codim: int


class ExactReport(_Model):
    header: ReportHeader
    dims: List[int]
    chi: List[int]
    stratum_dim: int
    half_sum_squares: int
    divisors: List[DivisorModel]


class RandomComplexReport(_Model):
    header: ReportHeader
    dims: List[int]
    ranks: List[int]
    homology: HomologyModel
    complex: ComplexModel


class AnalyzeReport(_Model):
    header: ReportHeader
    r: int
    d: int
    e: int
    variant: str
    integrable: bool
    membership: bool
    compositions_vanish: Dict[str, bool]
    dims: List[int]
    ranks: Optional[List[int]] = None
    homology: Optional[List[int]] = None
    admissible: Optional[bool] = None
    dominating_maximal: List[List[int]] = Field(default_factory=list)
    stratum_dim: Optional[int] = None
    tangent_dim: Optional[int] = None
    notes: List[str] = Field(default_factory=list)


class BasisReport(_Model):
    header: ReportHeader
    r: int
    k: int
    e: int
    dimension: int
    contraction_kernel: int
    bott: Optional[int] = None
    printed_formula: Optional[int] = None
    printed_formula_matches: Optional[bool] = None
    elements: List[TwistedFormModel] = Field(default_factory=list)


class StarReport(_Model):
    header: ReportHeader
    a: TwistedFormModel
    b: TwistedFormModel
    result: TwistedFormModel
    result_is_zero: bool


class FailureModel(_Model):
    trial: int
    seed: int
    message: str
    instance: Dict[str, Any] = Field(default_factory=dict)


class SuiteReport(_Model):
    header: ReportHeader
    suite: str
    trials: int
    checked: int
    passed: bool
    failures: List[FailureModel] = Field(default_factory=list)
    notes: List[str] = Field(default_factory=list)
