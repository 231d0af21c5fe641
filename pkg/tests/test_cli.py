"""End-to-end runs of the command line through ``main``."""

from __future__ import annotations

import json

import pytest
from pydantic import ValidationError

from stratcx import cli, cxlin, suites
from stratcx.folan import fixture_contact, fixture_pencil
from stratcx.pforms import TwistedForm
from stratcx.schemas import ComplexModel, TwistedFormModel


X0 = (1, 0, 0, 0, 0, 0)
X1 = (0, 1, 0, 0, 0, 0)


def _run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr().out
    return code, out


def _write_form(tmp_path, name, form):
    path = tmp_path / f"{name}.json"
    path.write_text(TwistedFormModel.from_form(form).model_dump_json(), encoding="utf-8")
    return str(path)


# ---------------------------------------------------------------------------
# Strata and exact complexes
# ---------------------------------------------------------------------------

class TestStrata:
    def test_three_term(self, capsys):
        code, out = _run(capsys, "strata", "--dims", "1,1,1")
        report = json.loads(out)
        assert code == 0
        assert report["count"] == 3
        assert sorted(report["maximal"]) == [[0, 1], [1, 0]]
        assert sum(row["maximal"] for row in report["rows"]) == 2
        assert report["header"]["command"] == "strata"
        assert report["header"]["config"]["dims"] == [1, 1, 1]

    def test_two_term(self, capsys):
        code, out = _run(capsys, "strata", "--dims", "1,1")
        report = json.loads(out)
        assert code == 0
        assert report["count"] == 2
        assert report["maximal"] == [[1]]

    def test_repeat_runs_are_byte_identical(self, capsys):
        _, first = _run(capsys, "strata", "--dims", "2,2,2")
        _, second = _run(capsys, "strata", "--dims", "2,2,2")
        assert first == second

    def test_bad_dims(self, capsys):
        code, out = _run(capsys, "strata", "--dims", "1,x")
        assert code == 1
        assert out == ""

    def test_missing_subcommand(self, capsys):
        assert cli.main([]) == 1

    def test_csv(self, capsys):
        code, out = _run(capsys, "strata", "--dims", "1,1,1", "--format", "csv")
        lines = out.strip().splitlines()
        assert code == 0
        assert lines[0].split(",")[:2] == ["ranks", "admissible"]
        assert len(lines) == 4

    def test_table(self, capsys):
        code, out = _run(capsys, "strata", "--dims", "1,1", "--format", "table")
        assert code == 0
        assert "stratum_dim" in out.splitlines()[0]

    def test_output_file(self, capsys, tmp_path):
        target = tmp_path / "strata.json"
        code, out = _run(capsys, "strata", "--dims", "1,1", "--output", str(target))
        assert code == 0
        assert out == ""
        assert json.loads(target.read_text(encoding="utf-8"))["count"] == 2


class TestExact:
    def test_three_term(self, capsys):
        code, out = _run(capsys, "exact", "--dims", "1,2,1")
        report = json.loads(out)
        assert code == 0
        assert report["chi"] == [1, 1]
        assert report["stratum_dim"] == report["half_sum_squares"] == 3
        assert [div["ranks"] for div in report["divisors"]] == [[0, 1], [1, 0]]

    def test_negative_chi(self, capsys, caplog):
        code, out = _run(capsys, "exact", "--dims", "2,1")
        assert code == 2
        assert out == ""
        assert "chi_1" in caplog.text


class TestRandomComplex:
    def test_ranks_and_round_trip(self, capsys):
        code, out = _run(capsys, "random-complex", "--dims", "2,2,2", "--ranks", "1,1", "--seed", "3")
        report = json.loads(out)
        assert code == 0
        assert report["ranks"] == [1, 1]
        assert report["homology"]["h"] == [1, 0, 1]
        assert report["header"]["seed"] == 3
        rebuilt = ComplexModel.model_validate(report["complex"]).to_instance()
        assert rebuilt == cxlin.construct_with_ranks([2, 2, 2], [1, 1], 3)

    def test_inadmissible(self, capsys):
        code, _ = _run(capsys, "random-complex", "--dims", "1,1,1", "--ranks", "1,1")
        assert code == 2

    @pytest.mark.parametrize("entry", ["1/0", "abc", "sqrt(2)"])
    def test_complex_model_rejects_inexact_entries(self, entry):
        with pytest.raises(ValidationError):
            ComplexModel.model_validate({"dims": [1, 1], "maps": [[[entry]]]})


# ---------------------------------------------------------------------------
# Forms
# ---------------------------------------------------------------------------

class TestAnalyze:
    def test_pencil(self, capsys, tmp_path):
        path = _write_form(tmp_path, "pencil", fixture_pencil(X0, X1, 1, 1))
        code, out = _run(capsys, "analyze", "--form", path)
        report = json.loads(out)
        assert code == 0
        assert report["integrable"] and report["membership"]
        assert report["dims"] == [15, 15, 1]
        assert len(report["ranks"]) == 2
        assert report["admissible"] is True
        assert report["compositions_vanish"] == {"minus": True, "plus": True}

    def test_plus_variant(self, capsys, tmp_path):
        path = _write_form(tmp_path, "pencil", fixture_pencil(X0, X1, 1, 1))
        code, out = _run(capsys, "analyze", "--form", path, "--variant", "plus")
        assert code == 0
        assert json.loads(out)["dims"] == [21, 105, 35]

    def test_contact(self, capsys, tmp_path):
        path = _write_form(tmp_path, "contact", fixture_contact(5))
        code, out = _run(capsys, "analyze", "--form", path)
        report = json.loads(out)
        assert code == 2
        assert report["integrable"] is False
        assert report["membership"] is False
        assert report["ranks"] is None

    def test_zero_form(self, capsys, tmp_path):
        path = _write_form(tmp_path, "zero", TwistedForm.zero(5, 1, 2))
        code, out = _run(capsys, "analyze", "--form", path)
        report = json.loads(out)
        assert code == 0
        assert report["ranks"] == [0, 0]
        assert report["stratum_dim"] == 0

    def test_deterministic(self, capsys, tmp_path):
        path = _write_form(tmp_path, "pencil", fixture_pencil(X0, X1, 1, 1))
        _, first = _run(capsys, "analyze", "--form", path)
        _, second = _run(capsys, "analyze", "--form", path)
        assert first == second

    def test_missing_file(self, capsys, tmp_path):
        code, _ = _run(capsys, "analyze", "--form", str(tmp_path / "absent.json"))
        assert code == 1

    def test_malformed_file(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"r": 3, "k": 1}', encoding="utf-8")
        code, _ = _run(capsys, "analyze", "--form", str(path))
        assert code == 1

    def test_form_that_does_not_descend(self, capsys, tmp_path):
        path = tmp_path / "raw.json"
        path.write_text(
            json.dumps({"r": 3, "k": 1, "twist": 2, "terms": [{"exp": [1, 0, 0, 0], "dx": [1], "coeff": "1"}]}),
            encoding="utf-8",
        )
        code, _ = _run(capsys, "analyze", "--form", str(path))
        assert code == 2

    def test_single_stage_variant_reports_a_note(self, capsys, tmp_path):
        path = _write_form(tmp_path, "plane", fixture_pencil((1, 0, 0), (0, 1, 0), 1, 1))
        code, out = _run(capsys, "analyze", "--form", path)
        report = json.loads(out)
        assert code == 0
        assert report["integrable"] is True
        assert report["dims"] == [3]
        assert report["ranks"] is None
        assert report["notes"]

    def test_plane_plus_variant_has_ranks(self, capsys, tmp_path):
        path = _write_form(tmp_path, "plane", fixture_pencil((1, 0, 0), (0, 1, 0), 1, 1))
        code, out = _run(capsys, "analyze", "--form", path, "--variant", "plus")
        report = json.loads(out)
        assert code == 0
        assert report["dims"] == [6, 3]
        assert len(report["ranks"]) == 1
        assert report["notes"] == []

    @pytest.mark.parametrize("coeff", ["1/0", "abc"])
    def test_bad_coefficient(self, capsys, tmp_path, coeff):
        path = tmp_path / "coeff.json"
        path.write_text(
            json.dumps({"r": 3, "k": 1, "twist": 2, "terms": [{"exp": [1, 0, 0, 0], "dx": [1], "coeff": coeff}]}),
            encoding="utf-8",
        )
        code, _ = _run(capsys, "analyze", "--form", str(path))
        assert code == 1


class TestBasisAndStar:
    def test_basis(self, capsys):
        code, out = _run(capsys, "basis", "--r", "3", "--k", "1", "--e", "2")
        report = json.loads(out)
        assert code == 0
        assert report["dimension"] == report["contraction_kernel"] == 6
        assert report["elements"] == []

    def test_basis_with_elements(self, capsys):
        code, out = _run(capsys, "basis", "--r", "3", "--k", "1", "--e", "2", "--elements")
        assert code == 0
        assert len(json.loads(out)["elements"]) == 6

    def test_printed_formula_flag(self, capsys):
        code, out = _run(capsys, "basis", "--r", "3", "--k", "1", "--e", "3", "--d", "2")
        report = json.loads(out)
        assert code == 0
        assert report["dimension"] == 20
        assert report["printed_formula_matches"] is False

    def test_star_of_pencil_with_itself(self, capsys, tmp_path):
        path = _write_form(tmp_path, "pencil", fixture_pencil((1, 0, 0, 0), (0, 1, 0, 0), 1, 1))
        code, out = _run(capsys, "star", "--a", path, "--b", path)
        report = json.loads(out)
        assert code == 0
        assert report["result_is_zero"] is True
        assert report["result"]["k"] == 3

    def test_star_of_contact_with_itself(self, capsys, tmp_path):
        path = _write_form(tmp_path, "contact", fixture_contact(3))
        code, out = _run(capsys, "star", "--a", path, "--b", path)
        assert code == 0
        assert json.loads(out)["result_is_zero"] is False


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

class TestVerify:
    def test_passing_suite(self, capsys):
        code, out = _run(capsys, "verify", "--suite", "exact", "--seed", "2", "--trials", "3")
        report = json.loads(out)
        assert code == 0
        assert report["passed"] is True
        assert report["header"]["seed"] == 2

    def test_failing_suite(self, capsys, monkeypatch):
        monkeypatch.setitem(suites.SUITES, "exact", lambda rng, instance: ["forced"])
        code, out = _run(capsys, "verify", "--suite", "exact", "--trials", "2")
        report = json.loads(out)
        assert code == 3
        assert len(report["failures"]) == 2

    def test_unknown_suite(self, capsys):
        code, _ = _run(capsys, "verify", "--suite", "nope")
        assert code == 1

    @pytest.mark.parametrize("fmt", ["table", "csv"])
    def test_failure_table(self, capsys, monkeypatch, fmt):
        monkeypatch.setitem(suites.SUITES, "exact", lambda rng, instance: ["forced"])
        code, out = _run(capsys, "verify", "--suite", "exact", "--trials", "1", "--format", fmt)
        assert code == 3
        assert "forced" in out
