"""Seeded oracle suites behind ``stratcx verify``.

Each suite compares two independent computations of the same quantity
(closed formulas against explicit linear algebra, the star product against
its defining identities, ...). Trial t of a run with seed s draws everything
from ``default_rng([s, t])``, so any failure is reproduced by its (seed,
trial) pair alone; the failing instance is dumped next to it.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from stratcx import cxlin, folan, pforms, rankcomb
from stratcx.config import settings
from stratcx.errors import StratcxError
from stratcx.schemas import ComplexModel, FailureModel, ReportHeader, SuiteReport, TwistedFormModel

logger = logging.getLogger("stratcx.suites")

Instance = Dict[str, Any]
TrialFn = Callable[[np.random.Generator, Instance], List[str]]


@dataclass
class _Outcome:
    trial: int
    checked: int
    problems: List[str]
    instance: Instance = field(default_factory=dict)


# ---------------------------------------------------------------------------
# Random draws
# ---------------------------------------------------------------------------

def _sub_seed(rng: np.random.Generator) -> int:
    return int(rng.integers(0, 2**31 - 1))


def random_dims(rng: np.random.Generator, max_maps: int = 4, max_dim: int = 4, n: Optional[int] = None) -> List[int]:
    if n is None:
        n = int(rng.integers(1, max_maps + 1))
    return [int(x) for x in rng.integers(0, max_dim + 1, size=n + 1)]


def random_ranks(rng: np.random.Generator, dims: List[int]) -> rankcomb.RankVector:
    candidates = rankcomb.enumerate_R(dims)
    return candidates[int(rng.integers(len(candidates)))]


def _form_dump(form: pforms.TwistedForm) -> Dict[str, Any]:
    return TwistedFormModel.from_form(form).model_dump()


# ---------------------------------------------------------------------------
# Complexes
# ---------------------------------------------------------------------------

def _hom_trial(rng: np.random.Generator, instance: Instance) -> List[str]:
    dims = random_dims(rng)
    dims2 = random_dims(rng, n=len(dims) - 1)
    r, r2 = random_ranks(rng, dims), random_ranks(rng, dims2)
    instance.update(dims=dims, ranks=list(r.entries), dims2=dims2, ranks2=list(r2.entries))
    c = cxlin.construct_with_ranks(dims, r, _sub_seed(rng))
    c2 = cxlin.construct_with_ranks(dims2, r2, _sub_seed(rng))
    instance.update(complex=ComplexModel.from_instance(c).model_dump(), complex2=ComplexModel.from_instance(c2).model_dump())
    expected = rankcomb.hom_dim(dims, r, dims2, r2)
    measured = cxlin.hom_space(c, c2).dim
    problems = []
    if measured != expected:
        problems.append(f"hom_space dimension {measured} != hom_dim {expected}")
    expanded = rankcomb.hom_dim_expanded(dims, r, dims2, r2)
    if expanded != expected:
        problems.append(f"hom_dim_expanded {expanded} != hom_dim {expected}")
    return problems


def _tangent_trial(rng: np.random.Generator, instance: Instance) -> List[str]:
    dims = random_dims(rng)
    r = random_ranks(rng, dims)
    instance.update(dims=dims, ranks=list(r.entries))
    c = cxlin.construct_with_ranks(dims, r, _sub_seed(rng))
    instance["complex"] = ComplexModel.from_instance(c).model_dump()
    expected = rankcomb.tangent_dim(dims, r)
    problems = []
    direct = cxlin.tangent_space(c)
    if direct != expected:
        problems.append(f"tangent_space {direct} != tangent_dim {expected}")
    via_hom = cxlin.tangent_space_via_hom(c)
    if via_hom != direct:
        problems.append(f"Hom(c, c(1)) dimension {via_hom} != tangent_space {direct}")
    expanded = rankcomb.tangent_dim_expanded(dims, r)
    if expanded != expected:
        problems.append(f"tangent_dim_expanded {expanded} != tangent_dim {expected}")
    return problems


def _strata_trial(rng: np.random.Generator, instance: Instance) -> List[str]:
    dims = random_dims(rng, max_dim=5)
    instance["dims"] = dims
    elements = rankcomb.enumerate_R(dims)
    maxima = rankcomb.maximal_elements(dims)
    instance["maximal"] = [list(m.entries) for m in maxima]
    problems = []
    for a in maxima:
        for b in maxima:
            if a != b and rankcomb.poset_leq(a, b):
                problems.append(f"maximal elements {a.entries} <= {b.entries}")
    for r in elements:
        if not any(rankcomb.poset_leq(r, m) for m in maxima):
            problems.append(f"{r.entries} is not dominated by a maximal element")
        variants = rankcomb.stratum_dim_variants(dims, r)
        if len(set(variants.values())) != 1:
            problems.append(f"stratum dimension expressions disagree at {r.entries}: {variants}")
    return problems


def _witness_trial(rng: np.random.Generator, instance: Instance) -> List[str]:
    dims = random_dims(rng, max_dim=5)
    instance["dims"] = dims
    problems = []
    for r in rankcomb.enumerate_R(dims):
        c = cxlin.construct_with_ranks(dims, r, _sub_seed(rng))
        if not cxlin.verify_complex(c):
            problems.append(f"witness for {r.entries} is not a complex")
        elif cxlin.ranks(c) != r:
            problems.append(f"witness for {r.entries} has ranks {cxlin.ranks(c).entries}")
    return problems


def _closure_trial(rng: np.random.Generator, instance: Instance) -> List[str]:
    dims = random_dims(rng, max_maps=3, max_dim=3)
    instance["dims"] = dims
    elements = rankcomb.enumerate_R(dims)
    witnesses = {s.entries: cxlin.construct_with_ranks(dims, s, _sub_seed(rng)) for s in elements}
    problems = []
    for r in elements:
        below = {s.entries for s in rankcomb.poset_below(dims, r)}
        for s, c in witnesses.items():
            if cxlin.closure_membership(c, r) != (s in below):
                problems.append(f"witness of rank {s} vs closure of {r.entries}: membership disagrees with the poset")
    return problems


def _split_trial(rng: np.random.Generator, instance: Instance) -> List[str]:
    dims = random_dims(rng)
    r = random_ranks(rng, dims)
    instance.update(dims=dims, ranks=list(r.entries))
    c = cxlin.construct_with_ranks(dims, r, _sub_seed(rng))
    instance["complex"] = ComplexModel.from_instance(c).model_dump()
    problems = []
    dec = cxlin.split(c)
    if dec.reassemble() != c:
        problems.append("split reassembly differs from the input")
    if dec.ranks() != r:
        problems.append(f"split boundary sizes {dec.ranks().entries} != ranks {r.entries}")
    other = cxlin.group_act(cxlin.random_group_element(dims, _sub_seed(rng)), c)
    g = cxlin.orbit_witness(c, other)
    if cxlin.group_act(g, c) != other:
        problems.append("orbit witness does not carry the complex onto its translate")
    return problems


def _exact_trial(rng: np.random.Generator, instance: Instance) -> List[str]:
    # d_i = r_i + r_{i+1} is exactly the set of dims admitting exact complexes
    n = int(rng.integers(1, 5))
    chi = [int(x) for x in rng.integers(0, 4, size=n)]
    padded = [0] + chi + [0]
    dims = [padded[i] + padded[i + 1] for i in range(n + 1)]
    instance.update(dims=dims, chi=chi)
    problems = []
    found = rankcomb.exact_rank_vector(dims)
    if list(found.entries) != chi:
        problems.append(f"exact rank vector {found.entries} != {chi}")
    report = rankcomb.exact_decomposition(dims)
    if report["stratum_dim"] != report["half_sum_squares"]:
        problems.append(f"exact stratum dimension {report['stratum_dim']} != {report['half_sum_squares']}")
    for divisor in report["divisors"]:
        if divisor["codim"] != 1:
            problems.append(f"divisor {divisor['ranks']} has codimension {divisor['codim']}")
    return problems


# ---------------------------------------------------------------------------
# Forms
# ---------------------------------------------------------------------------

def _random_k_form(rng: np.random.Generator, r: int, k: int) -> pforms.TwistedForm:
    twist = int(rng.integers(k + 1, 5))
    return pforms.random_form(r, k, twist, rng)


def _star_trial(rng: np.random.Generator, instance: Instance) -> List[str]:
    r = int(rng.choice([3, 4]))
    instance["r"] = r
    problems = []
    # associativity: total degree k1 + k2 + k3 + 2 stays within r + 1
    while True:
        ks = [int(x) for x in rng.integers(0, 3, size=3)]
        if sum(ks) + 2 <= r + 1:
            break
    a, b, c = (_random_k_form(rng, r, k) for k in ks)
    instance["triple"] = [_form_dump(x) for x in (a, b, c)]
    left = pforms.star(pforms.star(a, b), c)
    right = pforms.star(a, pforms.star(b, c))
    if left != right:
        problems.append("star is not associative on the triple")
    for x in (left, right):
        if not pforms.radial_contract(x).is_zero():
            problems.append("star product does not descend")
    # graded commutativity on two pairs
    for _ in range(2):
        k1, k2 = (int(x) for x in rng.integers(0, 3, size=2))
        if k1 + k2 + 1 > r + 1:
            k2 = 0
        p, q = _random_k_form(rng, r, k1), _random_k_form(rng, r, k2)
        sign = -1 if ((k1 + 1) * (k2 + 1)) % 2 else 1
        if pforms.star(p, q) != pforms.star(q, p).scale(sign):
            problems.append(f"graded commutativity fails for degrees ({k1}, {k2})")
            instance.setdefault("pairs", []).append([_form_dump(p), _form_dump(q)])
    # w * w = w ^ dw on two 1-forms
    for _ in range(2):
        w = _random_k_form(rng, r, 1)
        lhs = pforms.star(w, w)
        rhs = pforms.wedge(w, pforms.ext_d(w))
        if lhs != rhs:
            problems.append("w * w differs from w ^ dw")
            instance.setdefault("one_forms", []).append(_form_dump(w))
        if pforms.integrable(w) != lhs.is_zero():
            problems.append("integrable() disagrees with w * w = 0")
    return problems


def _theorem1_pencils() -> List[Tuple[str, pforms.TwistedForm]]:
    return [
        ("pencil x0, x1", folan.fixture_pencil((1, 0, 0, 0, 0, 0), (0, 1, 0, 0, 0, 0), 1, 1)),
        ("pencil x2, x3 + x4", folan.fixture_pencil((0, 0, 1, 0, 0, 0), {(0, 0, 0, 1, 0, 0): 1, (0, 0, 0, 0, 1, 0): 1}, 1, 1)),
        ("pencil x0 + 2x5, x1 - x3", folan.fixture_pencil(
            {(1, 0, 0, 0, 0, 0): 1, (0, 0, 0, 0, 0, 1): 2},
            {(0, 1, 0, 0, 0, 0): 1, (0, 0, 0, 1, 0, 0): -1},
            1, 1,
        )),
        ("zero", pforms.TwistedForm.zero(5, 1, 2)),
    ]


def _theorem1_trial(rng: np.random.Generator, instance: Instance) -> List[str]:
    w = pforms.random_form(5, 1, 2, rng)
    instance["form"] = _form_dump(w)
    is_integrable, membership = folan.theorem1_check(w, 2)
    instance["integrable"] = is_integrable
    if is_integrable != membership:
        return [f"integrable={is_integrable} but both delta sequences complexes={membership}"]
    return []


# ---------------------------------------------------------------------------
# Runner
# ---------------------------------------------------------------------------

def _run_trials(seed: int, trials: int, fn: TrialFn) -> List[_Outcome]:
    def one(t: int) -> _Outcome:
        instance: Instance = {}
        rng = np.random.default_rng([seed, t])
        try:
            problems = fn(rng, instance)
        except (StratcxError, AssertionError) as exc:
            problems = [f"{type(exc).__name__}: {exc}"]
        return _Outcome(trial=t, checked=1, problems=problems, instance=instance)

    if settings.THREADS > 1:
        with ThreadPoolExecutor(max_workers=settings.THREADS) as pool:
            return list(pool.map(one, range(trials)))
    return [one(t) for t in range(trials)]


def _report(name: str, seed: int, trials: int, outcomes: List[_Outcome], header: Optional[ReportHeader], notes: List[str]) -> SuiteReport:
    failures = [
        FailureModel(trial=o.trial, seed=seed, message="; ".join(o.problems), instance=o.instance)
        for o in outcomes
        if o.problems
    ]
    checked = sum(o.checked for o in outcomes)
    report = SuiteReport(
        header=header or ReportHeader(command="verify", seed=seed),
        suite=name,
        trials=trials,
        checked=checked,
        passed=not failures,
        failures=failures,
        notes=notes,
    )
    if failures:
        logger.warning(f"suite {name}: {len(failures)} of {checked} checks failed (seed={seed})")
    else:
        logger.info(f"suite {name}: {checked} checks passed (seed={seed})")
    return report


def _bott_outcomes() -> Tuple[List[_Outcome], List[str]]:
    outcomes: List[_Outcome] = []
    printed_mismatch = 0
    index = 0
    for r in range(1, 6):
        for k in range(0, r + 1):
            for e in range(0, 6):
                instance = {"r": r, "k": k, "e": e}
                problems = []
                computed = pforms.basis(r, k, e).dimension
                kernel = pforms.contraction_kernel_dim(r, k, e)
                if computed != kernel:
                    problems.append(f"basis size {computed} != contraction kernel {kernel}")
                bott = pforms.bott_dim(r, k, e)
                if bott is not None and bott != computed:
                    problems.append(f"basis size {computed} != Bott value {bott}")
                if k >= 1 and pforms.printed_formula_dim(r, k, e, 2) != computed:
                    printed_mismatch += 1
                instance["dimension"] = computed
                outcomes.append(_Outcome(trial=index, checked=1, problems=problems, instance=instance))
                index += 1
    notes = [
        "binom(r-k+e, r-k) binom(d-1, k) only reproduces the computed dimension when the foliation "
        f"degree d equals the twist e; with d = 2 it misses {printed_mismatch} of the (r, k, e) cases "
        "with k >= 1. The contraction kernel is authoritative."
    ]
    return outcomes, notes


def _theorem1_outcomes(seed: int, trials: int) -> Tuple[List[_Outcome], List[str]]:
    outcomes: List[_Outcome] = []
    pencils = _theorem1_pencils()
    for index, (name, w) in enumerate(pencils):
        instance = {"fixture": name, "form": _form_dump(w)}
        problems = []
        is_integrable, membership = folan.theorem1_check(w, 2)
        if not (is_integrable and membership):
            problems.append(f"fixture {name}: integrable={is_integrable}, complexes={membership}")
        outcomes.append(_Outcome(trial=-(index + 1), checked=1, problems=problems, instance=instance))
    random_outcomes = _run_trials(seed, trials, _theorem1_trial)
    outcomes.extend(random_outcomes)
    non_integrable = sum(1 for o in random_outcomes if o.instance.get("integrable") is False)
    contact = folan.fixture_contact(5)
    is_integrable, membership = folan.theorem1_check(contact, 2)
    problems = [f"contact form: integrable={is_integrable}, complexes={membership}"] if (is_integrable or membership) else []
    outcomes.append(_Outcome(trial=-(len(pencils) + 1), checked=1, problems=problems, instance={"fixture": "contact", "form": _form_dump(contact)}))
    notes = [f"{non_integrable} of {trials} random forms were not integrable; fixtures have negative trial indices"]
    return outcomes, notes


INJECTIVITY_CASES: Tuple[Tuple[int, int, int, int], ...] = ((3, 2, 1, 3), (4, 2, 1, 3), (4, 3, 1, 4))


def _injectivity_outcomes() -> List[_Outcome]:
    outcomes = []
    for index, (r, d, k, e) in enumerate(INJECTIVITY_CASES):
        expected = pforms.basis(r, 1, d).dimension
        found = pforms.delta_injectivity_rank(r, d, k, e)
        problems = [] if found == expected else [f"rank {found} != dim Omega^1_{r}({d}) = {expected}"]
        outcomes.append(_Outcome(trial=index, checked=1, problems=problems, instance={"r": r, "d": d, "k": k, "e": e}))
    return outcomes


def _census_outcomes() -> List[_Outcome]:
    expected = {(1, 1, 1): {(1, 0), (0, 1)}, (2, 2, 2): {(2, 0), (0, 2), (1, 1)}}
    outcomes = []
    for index, (dims, maxima) in enumerate(expected.items()):
        found = {m.entries for m in rankcomb.maximal_elements(dims)}
        problems = [] if found == maxima else [f"maximal elements {sorted(found)} != {sorted(maxima)}"]
        outcomes.append(_Outcome(trial=-(index + 1), checked=1, problems=problems, instance={"dims": list(dims)}))
    return outcomes


SUITES: Dict[str, TrialFn] = {
    "hom": _hom_trial,
    "tangent": _tangent_trial,
    "strata": _strata_trial,
    "witness": _witness_trial,
    "closure": _closure_trial,
    "split": _split_trial,
    "exact": _exact_trial,
    "star-assoc": _star_trial,
    "theorem1": _theorem1_trial,
}

SUITE_NAMES: Tuple[str, ...] = ("hom", "tangent", "star-assoc", "bott-dims", "theorem1", "witness", "closure", "split", "strata", "exact", "injectivity")


def run_suite(name: str, seed: Optional[int] = None, trials: Optional[int] = None, header: Optional[ReportHeader] = None) -> SuiteReport:
    """Run one named suite; ``bott-dims`` and ``injectivity`` are exhaustive
    and ignore the trial count."""
    seed = settings.DEFAULT_SEED if seed is None else seed
    trials = settings.DEFAULT_TRIALS if trials is None else trials
    if name not in SUITE_NAMES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITE_NAMES)}")
    logger.info(f"running suite {name} (seed={seed}, trials={trials}, threads={settings.THREADS})")
    notes: List[str] = []
    if name == "bott-dims":
        outcomes, notes = _bott_outcomes()
    elif name == "injectivity":
        outcomes = _injectivity_outcomes()
    elif name == "theorem1":
        outcomes, notes = _theorem1_outcomes(seed, trials)
    else:
        outcomes = _run_trials(seed, trials, SUITES[name])
        if name == "strata":
            outcomes = _census_outcomes() + outcomes
    return _report(name, seed, trials, outcomes, header, notes)
