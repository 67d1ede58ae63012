import io
from fractions import Fraction
import json

import pytest

from asdeta.cli import MISMATCH, OK, USAGE, TERMS_ENV, main
from asdeta.qseries import FracSeries

H2 = "cbrt(eta(q)^8*eta(q^4)^22/eta(q^2)^12)"
FACTOR = "eta(q^2)^6/(eta(q)^4*eta(q^4)^2)"


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


class TestExpand:
    def test_h2_header(self):
        code, text = run("expand", H2, "--terms", "10")
        assert code == OK
        assert text.splitlines()[1].startswith("q - 8/3*q^2 + 32/9*q^3 - 544/81*q^4")
        assert text.rstrip().endswith("O(q^11)")

    def test_json_round_trip(self):
        code, text = run("expand", H2, "--terms", "6", "--format", "json")
        s = FracSeries.from_json(json.loads(text)["series"])
        assert s.dense(1, 3) == [1, Fraction(-8, 3)]

    def test_environment_default(self, monkeypatch):
        monkeypatch.setenv(TERMS_ENV, "3")
        assert run("expand", "eta(q)^24")[1].rstrip().endswith("O(q^4)")
        monkeypatch.setenv(TERMS_ENV, "lots")
        assert run("expand", "eta(q)^24")[0] == USAGE

    def test_parse_error_is_usage(self):
        assert run("expand", "eta(q")[0] == USAGE


class TestLigozat:
    def test_level_8_fails(self):
        code, text = run("check-ligozat", "--level", "8", FACTOR)
        assert code == MISMATCH
        assert "(2) sum r*(N/delta) = -12" in text and "FAIL" in text

    def test_level_16_json(self):
        code, text = run("check-ligozat", "--level", "16", FACTOR, "--format", "json")
        assert code == OK and json.loads(text)["verdict"] == "ModularFunctionGamma0N"

    def test_bad_modulus(self):
        with pytest.raises(SystemExit) as e:
            run("check-ligozat", "--level", "16", "--modulus", "12", FACTOR)
        assert e.value.code == USAGE


class TestAsdScan:
    def test_pairs_file(self, tmp_path):
        f = tmp_path / "pairs.txt"
        f.write_text("# worked example\nH1 | H2\n[0,0,18,0]@8\n")
        code, text = run("asd-scan", "--pairs", str(f), "--nbound", "300", "--format", "json")
        assert code == OK
        res = json.loads(text)
        assert res[0]["pattern"] == "Case 1 iff p = 1 mod 12"
        assert res[1]["pattern"] == "Case 1 at every prime"

    def test_csv(self, tmp_path):
        f = tmp_path / "pairs.txt"
        f.write_text("H1 | H2\n")
        code, text = run("asd-scan", "--pairs", str(f), "--nbound", "200", "--pmax", "13", "--format", "csv")
        lines = text.strip().splitlines()
        assert lines[0].startswith("ab,") and len(lines) == 1 + 4

    def test_missing_file(self):
        assert run("asd-scan", "--pairs", "/nonexistent/pairs.txt")[0] == USAGE


class TestSearch:
    def test_small_search_json(self, tmp_path):
        out = tmp_path / "r.json"
        code, _ = run("search", "--bound", "8", "--jobs", "1", "--quiet", "--out", str(out))
        assert code == OK
        doc = json.loads(out.read_text())
        assert doc["config"]["bound"] == 8
        assert doc["stats"]["after_filter"] == len(doc["pairs"])

    def test_deterministic_output(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        run("search", "--bound", "7", "--jobs", "1", "--quiet", "--out", str(a))
        run("search", "--bound", "7", "--jobs", "1", "--quiet", "--out", str(b))
        assert a.read_bytes() == b.read_bytes()


class TestReproduce:
    def test_figure_four_flags_mismatch(self):
        code, text = run("reproduce", "--figure", "4")
        assert code == OK
        assert "MISMATCH flagged" in text

    def test_worked_example_reports_column_swap(self):
        code, text = run("reproduce", "--worked-example", "--format", "json")
        rows = {r["p"]: r for r in json.loads(text)["rows"]}
        assert all(r["agrees_with_f"] for r in rows.values())
        assert {p for p, r in rows.items() if not r["matches_printed"]} == {5, 13, 17, 29, 37, 41}
        assert code == MISMATCH

    def test_needs_a_target(self):
        with pytest.raises(SystemExit) as e:
            run("reproduce")
        assert e.value.code == USAGE
