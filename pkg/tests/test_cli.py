import io
import json
from fractions import Fraction
from pathlib import Path

import pytest

from fqcover.cli import certify_published, run

DATA = Path(__file__).parent / "data"


def call(*argv):
    out = io.StringIO()
    code = run(list(argv), out)
    return code, out.getvalue()


def frac(d):
    return Fraction(d["num"], d["den"])


def test_check_cover():
    code, text = call("check-cover", str(DATA / "f2_cover3.cov"))
    assert code == 0 and json.loads(text)["covers"] is True


def test_check_cover_noncover(tmp_path):
    path = tmp_path / "one.cov"
    path.write_text("q=2\n0 % x\n")
    out = json.loads(call("check-cover", str(path))[1])
    assert out["covers"] is False and out["witness"] == "1"


def test_bound_fqx():
    code, text = call("bound", "--q", "70", "--genus", "0", "--s", "1", "--mode", "fqx")
    out = json.loads(text)
    assert code == 0 and frac(out["total_ub"]) <= Fraction(7779, 100)


def test_bound_gff_corridor():
    out = json.loads(call("bound", "--q", "70", "--genus", "0", "--s", "1", "--mode", "gff")[1])
    assert 79 <= frac(out["total_ub"]) <= Fraction(8226, 100)


def test_distort_with_trace():
    code, text = call("distort", str(DATA / "f2_cover3.cov"), "--delta", "1/2", "--trace")
    out = json.loads(text)
    assert code == 0 and out["certified_noncover"] is False and len(out["trace"]) == 3


def test_pi_table_json():
    out = json.loads(call("pi-table", "--q", "2", "--max-n", "4", "--json")[1])
    assert [r["exact"] for r in out["rows"]] == [2, 1, 2, 3]


def test_optimize_literal():
    code, text = call("optimize-t1", "--objective", "literal", "--json")
    assert code == 0 and abs(frac(json.loads(text)["t_star"]) - Fraction(1732, 10000)) <= Fraction(1, 1000)


def test_search_writes_instance(tmp_path):
    path = tmp_path / "found.cov"
    code, _ = call("search", "--q", "2", "--max-deg", "2", "--out", str(path))
    assert code == 0
    code, text = call("check-cover", str(path))
    assert json.loads(text)["covers"] is True


def test_search_absence_is_structured():
    out = json.loads(call("search", "--q", "2", "--max-deg", "1")[1])
    assert out["found"] is False


def test_certify_paper_table():
    code, text = call("certify-paper")
    assert code == 0
    assert text.strip().splitlines()[-1] == "overall: PASS"
    report = certify_published()
    names = " ".join(r.name for r in report.rows)
    for needle in ("g=0 s=1", "77.79", "q_final", "argmin"):
        assert needle in names


def test_certify_paper_json():
    out = json.loads(call("certify-paper", "--json")[1])
    assert out["overall"] == "pass"
    assert {"version", "python", "seconds"} <= set(out["metadata"])


@pytest.mark.parametrize("argv", [
    ("check-cover", "/nonexistent/file.cov"),
    ("search", "--q", "6", "--max-deg", "1"),
    ("bound", "--q", "70", "--t1", "0.9"),
    ("distort", "/nonexistent.cov", "--delta", "0"),
    ("bound", "--t1", "abc"),
    ("no-such-command",),
])
def test_errors_exit_2(argv, capsys):
    assert call(*argv)[0] == 2


def test_bad_instance_line_number(tmp_path, capsys):
    path = tmp_path / "bad.cov"
    path.write_text("q=2\n0 % x\n0 % \n")
    assert call("check-cover", str(path))[0] == 2
    assert "line 3" in capsys.readouterr().err
