"""Command-line surface: ``python -m stratcx <subcommand> ...``.

Reports go to stdout (or --output) as JSON, a pandas table, or CSV; logs go
to stderr. Exit codes: 0 success, 1 usage or parse error, 2 mathematical
precondition failure (including a non-integrable form given to analyze),
3 verification-suite failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd
from pydantic import BaseModel, ValidationError

from stratcx import __version__, cxlin, folan, pforms, rankcomb
from stratcx.config import settings
from stratcx.errors import StratcxError
from stratcx.schemas import (
    AnalyzeReport,
    BasisReport,
    ComplexModel,
    DivisorModel,
    ExactReport,
    HomologyModel,
    RandomComplexReport,
    ReportHeader,
    StarReport,
    StrataReport,
    StrataRow,
    TwistedFormModel,
)
from stratcx.suites import SUITE_NAMES, run_suite
from stratcx.utils import parse_int_list

logger = logging.getLogger("stratcx.cli")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PRECONDITION = 2
EXIT_SUITE_FAILED = 3


class UsageError(Exception):
    """Bad arguments or unreadable input files."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def _int_list(value: str) -> List[int]:
    try:
        return parse_int_list(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _header(args: argparse.Namespace, seed: Optional[int] = None) -> ReportHeader:
    config = {
        key: value
        for key, value in sorted(vars(args).items())
        if key not in ("handler", "output", "command")
    }
    return ReportHeader(command=args.command, config=config, seed=seed)


def _read_form(path: str) -> pforms.TwistedForm:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read form file {path}: {exc}") from exc
    try:
        model = TwistedFormModel.model_validate_json(text)
    except ValidationError as exc:
        raise UsageError(f"malformed form file {path}: {exc.error_count()} validation error(s)\n{exc}") from exc
    return model.to_form()


def _cell(value: Any) -> Any:
    if isinstance(value, (list, dict)):
        return json.dumps(value, separators=(",", ":"))
    return value


def _frame(report: BaseModel) -> pd.DataFrame:
    data = report.model_dump(exclude={"header"})
    for key in ("rows", "divisors", "failures"):
        rows = data.get(key)
        if rows:
            return pd.DataFrame([{k: _cell(v) for k, v in row.items()} for row in rows])
    scalars = {k: _cell(v) for k, v in data.items() if k not in ("elements",)}
    return pd.DataFrame([scalars])


def _render(report: BaseModel, fmt: str) -> str:
    if fmt == "json":
        return report.model_dump_json(indent=2) + "\n"
    frame = _frame(report)
    if fmt == "csv":
        return frame.to_csv(index=False)
    return frame.to_string(index=False) + "\n"


def _emit(report: BaseModel, args: argparse.Namespace) -> None:
    text = _render(report, args.format)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
        logger.info(f"report written to {args.output}")
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def strata_report(dims: Sequence[int], header: ReportHeader) -> StrataReport:
    maxima = rankcomb.maximal_elements(dims)
    maximal_set = {m.entries for m in maxima}
    rows = [
        StrataRow(
            ranks=list(r.entries),
            admissible=rankcomb.is_admissible(dims, r),
            homology=list(rankcomb.homology_from_ranks(dims, r).h),
            stratum_dim=rankcomb.stratum_dim(dims, r),
            tangent_dim=rankcomb.tangent_dim(dims, r),
            maximal=r.entries in maximal_set,
        )
        for r in rankcomb.enumerate_R(dims)
    ]
    return StrataReport(
        header=header,
        dims=list(dims),
        count=len(rows),
        maximal=[list(m.entries) for m in maxima],
        rows=rows,
    )


def exact_report(dims: Sequence[int], header: ReportHeader) -> ExactReport:
    data = rankcomb.exact_decomposition(dims)
    return ExactReport(
        header=header,
        dims=list(dims),
        chi=data["chi"],
        stratum_dim=data["stratum_dim"],
        half_sum_squares=data["half_sum_squares"],
        divisors=[DivisorModel(**div) for div in data["divisors"]],
    )


def analyze_report(w: pforms.TwistedForm, e: int, variant: str, header: ReportHeader) -> AnalyzeReport:
    is_integrable, membership = folan.theorem1_check(w, e)
    complexes = {v: folan.build_complex(w, e, v) for v in folan.VARIANTS}
    report: Dict[str, Any] = dict(
        header=header,
        r=w.r,
        d=w.twist,
        e=e,
        variant=variant,
        integrable=is_integrable,
        membership=membership,
        compositions_vanish={v: cx.compositions_vanish() for v, cx in complexes.items()},
        dims=list(complexes[variant].dims),
        notes=[],
    )
    if is_integrable and len(complexes[variant].dims) < 2:
        report["notes"].append(
            f"the {variant} sequence on P^{w.r} has a single stage, so there are no ranks to report; try the other variant"
        )
    elif is_integrable:
        profile = folan.rank_profile(w, e, variant)
        report.update(
            ranks=list(profile.ranks.entries),
            homology=list(profile.homology.h),
            admissible=profile.admissible,
            dominating_maximal=[list(m.entries) for m in profile.dominating_maximal],
            stratum_dim=profile.stratum_dim,
            tangent_dim=profile.tangent_dim,
        )
    return AnalyzeReport(**report)


def basis_report(r: int, k: int, e: int, d: Optional[int], with_elements: bool, header: ReportHeader) -> BasisReport:
    dims = pforms.dimension_report(r, k, e, d)
    space = pforms.basis(r, k, e)
    return BasisReport(
        header=header,
        r=r,
        k=k,
        e=e,
        dimension=dims["computed"],
        contraction_kernel=dims["contraction_kernel"],
        bott=dims["bott"],
        printed_formula=dims["printed_formula"],
        printed_formula_matches=dims["printed_formula_matches"],
        elements=[TwistedFormModel.from_form(x) for x in space.elements] if with_elements else [],
    )


def cmd_strata(args: argparse.Namespace) -> int:
    _emit(strata_report(args.dims, _header(args)), args)
    return EXIT_OK


def cmd_exact(args: argparse.Namespace) -> int:
    _emit(exact_report(args.dims, _header(args)), args)
    return EXIT_OK


def cmd_random_complex(args: argparse.Namespace) -> int:
    c = cxlin.construct_with_ranks(args.dims, args.ranks, args.seed)
    report = RandomComplexReport(
        header=_header(args, seed=args.seed),
        dims=list(c.dims),
        ranks=list(cxlin.ranks(c).entries),
        homology=HomologyModel.from_profile(cxlin.homology(c)),
        complex=ComplexModel.from_instance(c),
    )
    _emit(report, args)
    return EXIT_OK


def cmd_analyze(args: argparse.Namespace) -> int:
    w = _read_form(args.form)
    e = w.twist if args.e is None else args.e
    report = analyze_report(w, e, args.variant, _header(args))
    _emit(report, args)
    for note in report.notes:
        logger.info(note)
    if not report.integrable:
        logger.warning("form is not integrable; no rank profile reported")
        return EXIT_PRECONDITION
    return EXIT_OK


def cmd_basis(args: argparse.Namespace) -> int:
    report = basis_report(args.r, args.k, args.e, args.d, args.elements, _header(args))
    _emit(report, args)
    return EXIT_OK


def cmd_star(args: argparse.Namespace) -> int:
    a, b = _read_form(args.a), _read_form(args.b)
    result = pforms.star(a, b)
    report = StarReport(
        header=_header(args),
        a=TwistedFormModel.from_form(a),
        b=TwistedFormModel.from_form(b),
        result=TwistedFormModel.from_form(result),
        result_is_zero=result.is_zero(),
    )
    _emit(report, args)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    report = run_suite(args.suite, seed=args.seed, trials=args.trials, header=_header(args, seed=args.seed))
    _emit(report, args)
    for note in report.notes:
        logger.info(note)
    return EXIT_OK if report.passed else EXIT_SUITE_FAILED


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="stratcx", description="Rank strata of complexes and foliations on projective space")
    parser.add_argument("--version", action="version", version=f"stratcx {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "table", "csv"), default=settings.DEFAULT_FORMAT)
    common.add_argument("--output", default=None, help="write the report here instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("strata", parents=[common], help="table of R(d) with dimensions and maxima")
    p.add_argument("--dims", type=_int_list, required=True)
    p.set_defaults(handler=cmd_strata)

    p = sub.add_parser("exact", parents=[common], help="the exact stratum and its divisors")
    p.add_argument("--dims", type=_int_list, required=True)
    p.set_defaults(handler=cmd_exact)

    p = sub.add_parser("random-complex", parents=[common], help="seeded complex with prescribed ranks")
    p.add_argument("--dims", type=_int_list, required=True)
    p.add_argument("--ranks", type=_int_list, required=True)
    p.add_argument("--seed", type=int, default=settings.DEFAULT_SEED)
    p.set_defaults(handler=cmd_random_complex)

    p = sub.add_parser("analyze", parents=[common], help="integrability and rank profile of a 1-form")
    p.add_argument("--form", required=True, help="TwistedForm JSON file")
    p.add_argument("--e", type=int, default=None, help="twist of the first stage (default: the form's twist)")
    p.add_argument("--variant", choices=folan.VARIANTS, default=settings.DEFAULT_VARIANT)
    p.set_defaults(handler=cmd_analyze)

    p = sub.add_parser("basis", parents=[common], help="dimension report for Omega^k_r(e)")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--e", type=int, required=True)
    p.add_argument("--d", type=int, default=None, help="foliation degree for the printed-formula comparison")
    p.add_argument("--elements", action="store_true", help="include the basis forms")
    p.set_defaults(handler=cmd_basis)

    p = sub.add_parser("star", parents=[common], help="star product of two forms")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.set_defaults(handler=cmd_star)

    p = sub.add_parser("verify", parents=[common], help="run an oracle suite")
    p.add_argument("--suite", choices=SUITE_NAMES, required=True)
    p.add_argument("--seed", type=int, default=settings.DEFAULT_SEED)
    p.add_argument("--trials", type=int, default=settings.DEFAULT_TRIALS)
    p.set_defaults(handler=cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(
        level=settings.LOG_LEVEL,
        format="[%(asctime)s] [%(name)s] [%(levelname)s] %(message)s",
        stream=sys.stderr,
    )
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except UsageError as exc:
        logger.error(str(exc))
        return EXIT_USAGE
    except StratcxError as exc:
        logger.error(f"{type(exc).__name__}: {exc}")
        return EXIT_PRECONDITION
    except (ValueError, KeyError) as exc:
        logger.error(f"invalid input: {exc}")
        return EXIT_USAGE
