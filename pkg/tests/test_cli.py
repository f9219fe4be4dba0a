import json
import subprocess
import sys

import pytest

from kummer_forms.cli import main
from kummer_forms.report import SUITES, Options, list_checks, run_suite


def run(*args):
    return subprocess.run([sys.executable, "-m", "kummer_forms.cli", *args], capture_output=True, text=True)


@pytest.mark.parametrize("suite", list(SUITES))
def test_each_suite_passes(suite):
    rep = run_suite(suite)
    assert rep.ok, [r for r in rep.results if r.status == "FAIL"]
    c = rep.counts
    assert c["pass"] + c["fail"] + c["assumed"] == len(rep.results)


def test_assumed_only_for_genericity_flags():
    rep = run_suite("all")
    assumed = [r.id for r in rep.results if r.status == "ASSUMED"]
    assert assumed == ["lemma2.4/lambda_generic", "thm3.4/Q1", "thm3.4/Q2"]


def test_conjugacy_class_line():
    rep = run_suite("conjugacy")
    row = next(r for r in rep.results if r.id == "lemma3.1/classes_integer")
    assert row.status == "PASS" and row.actual == "classes: 21"


def test_list_checks():
    ids = [i for i, _ in list_checks()]
    assert "lemma2.1.3/minus2K_rigid" in ids
    assert "thm3.4/fixed_locus_selfints" in ids
    assert len(ids) == len(set(ids))


def test_json_is_byte_stable_and_exit_zero():
    a, b = run("all", "--json"), run("all", "--json")
    assert a.returncode == b.returncode == 0
    assert a.stdout == b.stdout
    data = json.loads(a.stdout)
    assert list(data) == ["suite", "toolchain", "counts", "results"]
    assert data["counts"]["fail"] == 0


def test_numbers_are_fraction_strings():
    data = json.loads(run("quotient", "--json").stdout)
    row = next(r for r in data["results"] if r["id"] == "lemma2.1.3/K_T_square")
    assert row["actual"] == "-8/1"


def test_usage_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as e:
        main(["nonsense"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        main([])
    assert e.value.code == 2


def test_fail_exit_code(monkeypatch):
    from kummer_forms import report

    def broken(opts):
        k = report._Collector()
        k.eq("broken/check", 1, 2, "deliberate failure")
        return k.rows

    monkeypatch.setitem(report.SUITES, "figure1", broken)
    assert main(["figure1"]) == 1


def test_n_max_option():
    rep = run_suite("conjugacy", Options(n_max=5))
    row = next(r for r in rep.results if r.id == "lemma3.1/classes_integer")
    assert row.actual == "classes: 6"


def test_text_and_list_output(capsys):
    assert main(["groups"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("suite: groups") and "sec4/dyadic_not_fg" in out
    assert main(["--list"]) == 0
    assert "lemma2.1.3/minus2K_rigid" in capsys.readouterr().out
