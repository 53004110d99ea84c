import io
import json

import pytest

from ncdisk.atiyah import BilinearMapForm
from ncdisk.chart import Gauge, tautological_gk
from ncdisk.cli import run
from ncdisk.dga import BasePoly, dga_parse
from ncdisk.lcs import DimensionTable
from ncdisk.ncconn import ConnectionData, connection_from_gk, perturb
from ncdisk.ncseries import series_parse


def call(*argv, stdin=""):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out=out, err=err, stdin=io.StringIO(stdin))
    return code, out.getvalue(), err.getvalue()


def write_json(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


class TestLcs:
    def test_table(self):
        code, out, _ = call("lcs-dims", "--n", "2", "--kmax", "2", "--dmax", "3")
        assert code == 0
        assert out.splitlines()[2].split() == ["2", "0", "1", "4"]

    def test_json_round_trip(self):
        code, out, _ = call("lcs-dims", "--n", "2", "--kmax", "3", "--dmax", "3", "--json", "--quotient")
        assert code == 0
        table = DimensionTable.from_dict(json.loads(out))
        assert table.kind == "quotient"
        assert table.to_json() == out.strip()

    def test_missing_flag(self):
        code, _, err = call("lcs-dims", "--n", "2")
        assert code == 2
        assert "--kmax" in err

    def test_hidden_oracle_agrees(self):
        _, a, _ = call("oracle", "--n", "2", "--kmax", "3", "--dmax", "4")
        _, b, _ = call("lcs-dims", "--n", "2", "--kmax", "3", "--dmax", "4", "--quotient")
        assert a == b


class TestAut:
    def test_invert(self):
        code, out, _ = call("aut", "invert", "--n", "1", "--trunc", "4", stdin="x1 + x1^2\n")
        assert code == 0
        assert out.strip() == "x1 - x1^2 + 2*x1^3 - 5*x1^4"

    def test_compose_files(self, tmp_path):
        f = tmp_path / "g.txt"
        f.write_text("# g then its inverse\nx1 + x1^2\nx1 - x1^2 + 2*x1^3 - 5*x1^4\n")
        code, out, _ = call("aut", "compose", "--n", "1", "--trunc", "4", str(f))
        assert (code, out) == (0, "x1\n")

    def test_abelianize(self):
        code, out, _ = call("aut", "abelianize", "--n", "2", "--trunc", "3", stdin="x1 + x1*x2 - x2*x1\nx2 + x2*x1\n")
        assert code == 0
        assert len(out.splitlines()) == 2

    def test_singular(self):
        code, _, err = call("aut", "invert", "--n", "1", "--trunc", "3", stdin="x1^2\n")
        assert code == 1 and err

    def test_wrong_count(self):
        code, _, err = call("aut", "invert", "--n", "2", "--trunc", "3", stdin="x1\n")
        assert code == 2 and "expected 2" in err

    def test_output_reparses(self):
        _, out, _ = call("aut", "invert", "--n", "2", "--trunc", "4", stdin="x1 + x2^2\nx2 - 1/2*x1*x2\n")
        for line in out.splitlines():
            assert str(series_parse(line, 2, 4)) == line


class TestDer:
    def test_apply(self):
        code, out, _ = call("der", "apply", "--n", "2", "--trunc", "3", stdin="x2\n0\nx1*x1\n")
        assert (code, out) == (0, "x1*x2 + x2*x1\n")

    def test_bracket(self):
        code, out, _ = call("der", "bracket", "--n", "1", "--trunc", "3", stdin="1\nx1\n")
        assert (code, out) == (0, "1\n")

    def test_exp(self):
        code, out, _ = call("der", "exp", "--n", "1", "--trunc", "4", stdin="x1^2\n")
        assert (code, out) == (0, "x1 + x1^2 + x1^3 + x1^4\n")

    def test_exp_rejected(self):
        code, _, _ = call("der", "exp", "--n", "1", "--trunc", "3", stdin="x1\n")
        assert code == 1


class TestConnections:
    def test_taut_flat(self, tmp_path):
        code, out, _ = call("taut", "--n", "2", "--trunc", "3", "--base", "2")
        assert code == 0
        path = tmp_path / "taut.json"
        path.write_text(out)
        assert call("flat-check", "--conn", str(path)) == (0, "PASS\n", "")

    def test_corrupted(self, tmp_path):
        conn = perturb(connection_from_gk(tautological_gk(2, 3, 2)), 1, (1, 2), 1)
        path = write_json(tmp_path, "bad.json", conn.to_dict())
        code, out, _ = call("flat-check", "--conn", path)
        assert code == 1 and "FAIL" in out

    def test_gauge_from_file(self, tmp_path):
        g = Gauge.linear_lift([BasePoly.parse("b1 + b1^2", 1)], [dga_parse("x1^2", 1)])
        path = write_json(tmp_path, "g.json", g.to_dict())
        code, out, _ = call("gauge", "--n", "1", "--trunc", "4", "--base", "3", "--gauge", path)
        assert code == 0
        conn = ConnectionData.from_dict(json.loads(out))
        assert json.dumps(conn.to_dict(), sort_keys=True, indent=2) + "\n" == out

    def test_seeded_gauge_is_reproducible(self):
        a = call("gauge", "--n", "2", "--trunc", "3", "--base", "2", "--seed", "5")
        b = call("gauge", "--n", "2", "--trunc", "3", "--base", "2", "--seed", "5")
        assert a == b and a[0] == 0

    def test_flat_sections(self, tmp_path):
        _, out, _ = call("taut", "--n", "1", "--trunc", "3", "--base", "3")
        path = tmp_path / "taut.json"
        path.write_text(out)
        code, out, _ = call("flat-sections", "--conn", str(path), "--fiber-max", "1", "--base-max", "1")
        assert code == 0
        assert [dga_parse(line, 1) for line in out.splitlines()] == [dga_parse("x1 - b1", 1), dga_parse("1", 1)]

    def test_missing_file(self):
        code, _, err = call("flat-check", "--conn", "/nonexistent/conn.json")
        assert code == 2 and "input error" in err

    def test_bad_json(self, tmp_path):
        path = tmp_path / "x.json"
        path.write_text("{")
        assert call("flat-check", "--conn", str(path))[0] == 2


class TestAtiyah:
    def gauged_file(self, tmp_path):
        g = Gauge.linear_lift([BasePoly.parse("b1 + b1^2", 1)], [dga_parse("x1^2", 1)])
        gpath = write_json(tmp_path, "g.json", g.to_dict())
        _, out, _ = call("gauge", "--n", "1", "--trunc", "4", "--base", "3", "--gauge", gpath)
        path = tmp_path / "conn.json"
        path.write_text(out)
        return str(path)

    def test_extract_and_solve(self, tmp_path):
        code, out, _ = call("atiyah", "extract", self.gauged_file(tmp_path))
        assert code == 0
        w = BilinearMapForm.from_dict(json.loads(out))
        assert not w.is_zero()
        path = tmp_path / "w.json"
        path.write_text(out)
        code, out, _ = call("atiyah", "coboundary", str(path))
        assert code == 0
        assert json.loads(out)["bound"] == 4

    def test_diff(self, tmp_path):
        _, out, _ = call("atiyah", "extract", self.gauged_file(tmp_path))
        path = tmp_path / "w.json"
        path.write_text(out)
        code, out, _ = call("atiyah", "diff", str(path), str(path))
        assert code == 0
        assert BilinearMapForm.from_dict(json.loads(out)).is_zero()

    def test_no_witness(self, tmp_path):
        delta = BilinearMapForm(2, {(1, (1, 1), 1): BasePoly.parse("b2", 2)})
        path = write_json(tmp_path, "d.json", delta.to_dict())
        code, out, _ = call("atiyah", "coboundary", path, "--base-max", "3")
        assert code == 1 and "NOT A COBOUNDARY" in out

    def test_arity(self, tmp_path):
        assert call("atiyah", "diff", "a.json")[0] == 2


class TestParse:
    def test_normalizes(self):
        code, out, _ = call("parse", "--check", "--n", "2", "x2*x1 + 2*x1 - x1 + 0*x2")
        assert (code, out) == (0, "x1 + x2*x1\n")

    def test_stdin(self):
        assert call("parse", "--check", "--n", "1", stdin="x1^2 + x1\n") == (0, "x1 + x1^2\n", "")

    @pytest.mark.parametrize("text", ["x1 +", "x1^^2", "y1", ""])
    def test_rejects(self, text):
        code, _, err = call("parse", "--check", "--n", "2", text)
        assert code == 2 and err

    def test_index_out_of_range(self):
        assert call("parse", "--check", "--n", "1", "x2")[0] == 1

    def test_requires_check(self):
        assert call("parse", "--n", "1", "x1")[0] == 2
