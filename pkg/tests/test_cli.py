import json
import subprocess
import sys
from pathlib import Path

import jsonschema
import pytest

from superint.catalog import Catalog, CatalogEntry, load_catalog
from superint.cli import UsageError, parse_params, parse_value, run
from superint.symkernel import ONE


def call(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def as_json(capsys, *argv):
    code, out, _ = call(capsys, *argv, "--format", "json")
    return code, json.loads(out)


class TestExamples:
    def test_derive_prints_painleve_one(self, capsys):
        code, out, _ = call(capsys, "derive", "--mechanics", "quantum", "--type", "b", "--order", "3")
        assert code == 0
        assert "V'' - 6*hbar^-2*V^2 - 4*I*alpha1*hbar^-3*x = 0" in out

    def test_verify_conformal_entry(self, capsys):
        assert call(capsys, "verify", "--entry", "q-c2")[0] == 0

    def test_compose_jauch_hill(self, capsys):
        code, out, _ = call(capsys, "compose", "--case", "dd", "--x", "q-d1", "--y", "q-d1",
                            "--m", "2", "--n", "1", "--check")
        assert code == 0
        assert "K =" in out


class TestSubcommands:
    def test_solve_json(self, capsys):
        code, rep = as_json(capsys, "solve", "--mechanics", "quantum", "--type", "c", "--order", "2")
        assert code == 0 and rep["branches"][0]["potential"]["variant"] == "closed"

    def test_list_filters(self, capsys):
        code, rep = as_json(capsys, "list", "--mechanics", "quantum", "--order", "5")
        assert code == 0
        assert [r["id"] for r in rep] == ["q-a5", "q-b5", "q-c5", "q-d5"]

    def test_check_family(self, capsys):
        assert call(capsys, "check", "--family", "jauch-hill", "--m", "3", "--n", "2")[0] == 0

    def test_algebra(self, capsys):
        code, rep = as_json(capsys, "algebra", "--case", "dd", "--x", "q-d1", "--y", "q-d1")
        assert code == 0 and rep["algebra"]["R_matches"] is True

    def test_painleve_entry(self, capsys):
        code, rep = as_json(capsys, "painleve", "--entry", "q-d5")
        assert code == 0 and rep["verdict"] == "passes"
        assert rep["branches"][0]["resonances"] == [-1, 1, 2, 5, 6, 8]

    def test_painleve_ode(self, capsys):
        code, rep = as_json(capsys, "painleve", "--ode", "u'' - 6*u^2 - x^2", "--unknown", "u")
        assert code == 1 and rep["verdict"] == "fails"

    def test_numcheck_painleve_four(self, capsys, tmp_path):
        path = tmp_path / "jet.csv"
        code, rep = as_json(capsys, "numcheck", "--entry", "q-d3", "--via", "V through P4",
                            "--param", "k1=0", "--param", "k2=0", "--param", "eps=1", "--csv", str(path))
        assert code == 0 and rep["residual"] <= 1e-6
        assert path.read_text().startswith("x,V0")

    def test_output_file(self, capsys, tmp_path):
        path = tmp_path / "out.json"
        code, out, _ = call(capsys, "verify", "--entry", "q-d1", "--format", "json", "--output", str(path))
        assert code == 0 and json.loads(path.read_text()) == json.loads(out)


class TestExitCodes:
    def test_unknown_parameter(self, capsys):
        code, _, err = call(capsys, "numcheck", "--entry", "q-d3", "--param", "bogus=1")
        assert code == 2 and "--param" in err

    def test_not_coprime(self, capsys):
        code, _, err = call(capsys, "compose", "--case", "dd", "--x", "q-d1", "--y", "q-d1", "--m", "2", "--n", "2")
        assert code == 2 and "--m" in err

    def test_bad_tolerance(self, capsys):
        code, _, err = call(capsys, "numcheck", "--entry", "q-d3", "--tol", "-1")
        assert code == 2 and "--tol" in err

    def test_unknown_entry(self, capsys):
        code, _, err = call(capsys, "verify", "--entry", "q-z9")
        assert code == 2 and "--entry" in err

    def test_missing_subcommand_argument(self, capsys):
        assert call(capsys, "verify")[0] == 2
        assert call(capsys, "frobnicate")[0] == 2

    def test_failed_verification(self, capsys, tmp_path):
        entry = CatalogEntry.from_json(load_catalog().entries["q-d1"].to_json())
        entry.ladder = [ONE, ONE]
        path = tmp_path / "broken.json"
        Catalog({"q-d1": entry}, {}, []).save(path)
        code, rep = as_json(capsys, "verify", "--entry", "q-d1", "--catalog", str(path))
        assert code == 1 and rep["ladder_ok"] is False


class TestReports:
    def test_round_trip(self, capsys, tmp_path):
        path = tmp_path / "all.json"
        code, _, _ = call(capsys, "verify", "--entry", "q-d3", "--entry", "c-d3", "--entry", "q-a3",
                          "--format", "json", "--output", str(path))
        assert code == 0
        code, rep = as_json(capsys, "verify", "--report", str(path))
        assert code == 0 and rep["reproduced"] is True

    def test_bit_stable(self, capsys):
        first = call(capsys, "algebra", "--case", "cb", "--x", "q-c2", "--y", "q-b1", "--format", "json")
        second = call(capsys, "algebra", "--case", "cb", "--x", "q-c2", "--y", "q-b1", "--format", "json")
        assert first == second

    def test_module_entry_point(self):
        proc = subprocess.run([sys.executable, "-m", "superint", "list", "--type", "d", "--mechanics", "classical"],
                              capture_output=True, text=True, check=False)
        assert proc.returncode == 0
        assert proc.stdout.split()[0] == "c-d1"


SCHEMA = json.loads((Path(__file__).parents[1] / "docs" / "report-schema.json").read_text())


class TestSchema:
    def test_schema_is_valid(self):
        jsonschema.Draft202012Validator.check_schema(SCHEMA)

    @pytest.mark.parametrize("argv", [
        ["verify", "--entry", "q-d1"],
        ["verify", "--entry", "q-d1", "--entry", "c-d3"],
        ["list", "--mechanics", "classical"],
        ["solve", "--mechanics", "quantum", "--type", "b", "--order", "3"],
        ["derive", "--mechanics", "classical", "--type", "c", "--order", "2"],
        ["compose", "--case", "dd", "--x", "q-d1", "--y", "q-d1", "--m", "2", "--n", "1", "--check"],
        ["compose", "--case", "ad", "--x", "q-a3", "--y", "q-d1"],
        ["algebra", "--case", "cb", "--x", "q-c2", "--y", "q-b1"],
        ["check", "--family", "caged", "--m", "2", "--n", "1"],
        ["painleve", "--entry", "q-d5"],
        ["painleve", "--ode", "u'' - u*u'^2", "--unknown", "u"],
        ["numcheck", "--entry", "c-d2", "--param", "beta=0.3"],
    ], ids=lambda a: " ".join(a[:3]))
    def test_reports_conform(self, capsys, argv):
        _, rep = as_json(capsys, *argv)
        jsonschema.validate(rep, SCHEMA, cls=jsonschema.Draft202012Validator)

    def test_replay_conforms(self, capsys, tmp_path):
        path = tmp_path / "one.json"
        call(capsys, "verify", "--entry", "q-c2", "--format", "json", "--output", str(path))
        _, rep = as_json(capsys, "verify", "--report", str(path))
        jsonschema.validate(rep, SCHEMA, cls=jsonschema.Draft202012Validator)


class TestParsing:
    def test_values(self):
        from fractions import Fraction

        assert parse_value("3/8") == Fraction(3, 8)
        assert parse_value("0.25") == 0.25

    def test_params(self):
        assert parse_params(["k1=0", "eps=-1"]) == {"k1": 0, "eps": -1}
        with pytest.raises(UsageError, match="name=value"):
            parse_params(["k1"])
