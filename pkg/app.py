from __future__ import annotations

import logging
from typing import Optional

from fastapi import FastAPI
from fastapi.responses import JSONResponse

from stratcx import __version__, pforms
from stratcx.cli import analyze_report, basis_report, exact_report, strata_report
from stratcx.config import settings
from stratcx.errors import StratcxError
from stratcx.folan import VARIANTS
from stratcx.schemas import ReportHeader, TwistedFormModel
from stratcx.suites import SUITE_NAMES, run_suite
from stratcx.utils import parse_int_list

logger = logging.getLogger("stratcx.api")
logging.basicConfig(
    level=settings.LOG_LEVEL,
    format="[%(asctime)s] [%(name)s] [%(levelname)s] %(message)s",
)


app = FastAPI(
    title="stratcx",
    version=__version__,
    description=(
        "Rank stratification of varieties of complexes and the delta complexes "
        "of twisted 1-forms on projective space. Read-only views of the CLI reports."
    ),
)


def _error(status_code: int, note: str) -> JSONResponse:
    return JSONResponse(status_code=status_code, content={"status": "error", "note": note})


def _report(model) -> JSONResponse:
    return JSONResponse(model.model_dump(mode="json"))


# ---------------------------------------------------------------------------
# Routes
# ---------------------------------------------------------------------------

@app.get("/health", response_class=JSONResponse)
def health():
    return JSONResponse({"status": "healthy", "version": __version__})


@app.get("/api/strata", response_class=JSONResponse)
def strata(dims: str):
    try:
        parsed = parse_int_list(dims)
    except ValueError as e:
        return _error(400, str(e))
    try:
        report = strata_report(parsed, ReportHeader(command="strata", config={"dims": parsed}))
    except StratcxError as e:
        return _error(422, f"{type(e).__name__}: {e}")
    return _report(report)


@app.get("/api/exact", response_class=JSONResponse)
def exact(dims: str):
    try:
        parsed = parse_int_list(dims)
    except ValueError as e:
        return _error(400, str(e))
    try:
        report = exact_report(parsed, ReportHeader(command="exact", config={"dims": parsed}))
    except StratcxError as e:
        return _error(422, f"{type(e).__name__}: {e}")
    return _report(report)


@app.get("/api/basis", response_class=JSONResponse)
def basis(r: int, k: int, e: int, d: Optional[int] = None):
    config = {"r": r, "k": k, "e": e, "d": d}
    try:
        report = basis_report(r, k, e, d, False, ReportHeader(command="basis", config=config))
    except StratcxError as exc:
        return _error(422, f"{type(exc).__name__}: {exc}")
    return _report(report)


@app.post("/api/analyze", response_class=JSONResponse)
def analyze(form: TwistedFormModel, e: Optional[int] = None, variant: str = settings.DEFAULT_VARIANT):
    """
    Integrability, complex membership of both delta sequences and, for an
    integrable form, its rank profile. A non-integrable form is a valid
    request: the report says so and carries no ranks.
    """
    if variant not in VARIANTS:
        return _error(400, f"variant must be one of {', '.join(VARIANTS)}, got {variant!r}")
    try:
        w: pforms.TwistedForm = form.to_form()
        twist = w.twist if e is None else e
        header = ReportHeader(command="analyze", config={"e": twist, "variant": variant})
        report = analyze_report(w, twist, variant, header)
    except StratcxError as exc:
        return _error(422, f"{type(exc).__name__}: {exc}")
    return _report(report)


@app.post("/api/verify/{suite}", response_class=JSONResponse)
def verify(suite: str, seed: Optional[int] = None, trials: Optional[int] = None):
    if suite not in SUITE_NAMES:
        return _error(404, f"unknown suite {suite!r}; choose from {', '.join(SUITE_NAMES)}")
    seed = settings.DEFAULT_SEED if seed is None else seed
    trials = settings.DEFAULT_TRIALS if trials is None else trials
    header = ReportHeader(command="verify", config={"suite": suite, "trials": trials}, seed=seed)
    report = run_suite(suite, seed=seed, trials=trials, header=header)
    logger.info(f"verify {suite}: passed={report.passed} checked={report.checked}")
    return _report(report)
