import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest
from numpy.testing import assert_allclose

from iacopula.cli import main
from iacopula.tables import format_prob, parse_table

PROFILE = "[[0.5,0.25,0.25],[0.25,0.25,0.25,0.25]]"
PROFILE_FINE = "[[0.5,0.25,0.125,0.125],[0.25,0.25,0.25,0.25]]"
ORACLE_SCRIPT = Path(__file__).parent / "oracles" / "product_oracle.py"

TABLE_ONE = """\
   |    1     2     3     4 | p1
---+------------------------+----
 1 |  1/8   1/8   1/8   1/8 | 1/2
 2 | 1/16  1/16  1/16  1/16 | 1/4
 3 | 1/16  1/16  1/16  1/16 | 1/4
---+------------------------+----
p2 |  1/4   1/4   1/4   1/4 |
"""

FRECHET_TABLE = """\
   |   1    2    3    4 | p1
---+--------------------+----
 1 | 1/4  1/4    0    0 | 1/2
 2 |   0    0  1/4    0 | 1/4
 3 |   0    0    0  1/4 | 1/4
---+--------------------+----
p2 | 1/4  1/4  1/4  1/4 |
"""


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestBuild:
    def test_table_one(self, capsys):
        code, out, _ = run(capsys, "build", "--copula", "independence", "--profile", PROFILE)
        assert code == 0
        assert out == TABLE_ONE

    def test_frechet_table(self, capsys):
        code, out, _ = run(capsys, "build", "--copula", "frechet-upper", "--profile", PROFILE)
        assert code == 0
        assert out == FRECHET_TABLE

    def test_refined_table(self, capsys):
        _, out, _ = run(capsys, "build", "--copula", "independence", "--profile", PROFILE_FINE)
        cells, rows, cols = parse_table(out)
        assert_allclose(cells[2], [1 / 32] * 4)
        assert_allclose(cells[3], [1 / 32] * 4)

    def test_json(self, capsys):
        code, out, _ = run(capsys, "build", "--copula", "independence", "--profile", PROFILE, "--format", "json")
        assert code == 0
        assert out == '{"shape":[3,4],"mass":[' + ",".join(["0.125"] * 4 + ["0.0625"] * 8) + "]}\n"

    def test_json_byte_stable(self, capsys):
        args = ["build", "--copula", '{"family":"gaussian","sigma":[[1,0.5],[0.5,1]]}',
                "--profile", "[[0.2,0.3,0.5],[0.6,0.4]]", "--format", "json"]
        first = run(capsys, *args)[1]
        second = run(capsys, *args)[1]
        assert first == second
        assert json.loads(first)["shape"] == [3, 2]

    def test_one_marginal(self, capsys):
        code, out, _ = run(capsys, "build", "--copula", "independence", "--profile", "[[0.5,0.5]]")
        assert code == 0
        assert out.splitlines()[-2:] == ["1 | 1/2", "2 | 1/2"]

    def test_three_dims_json_and_slices(self, capsys):
        profile = "[[0.5,0.5],[0.5,0.5],[0.25,0.75]]"
        _, out, _ = run(capsys, "build", "--copula", "independence", "--profile", profile)
        assert json.loads(out)["shape"] == [2, 2, 2]
        _, out, _ = run(capsys, "build", "--copula", "independence", "--profile", profile, "--slices")
        assert "[s3=1]" in out and "[s3=2]" in out

    def test_table_round_trip(self, capsys):
        profile = "[[0.2,0.3,0.5],[0.6,0.4]]"
        _, out, _ = run(capsys, "build", "--copula", '{"family":"clayton","theta":2.0}',
                        "--profile", profile)
        cells, rows, cols = parse_table(out)
        assert_allclose(cells.sum(axis=1), rows, atol=1e-11)
        assert_allclose(cells.sum(axis=0), cols, atol=1e-11)

    def test_spec_file(self, capsys, tmp_path):
        spec = tmp_path / "spec.json"
        spec.write_text('{"family": "frechet-upper"}')
        prof = tmp_path / "p.json"
        prof.write_text(PROFILE)
        code, out, _ = run(capsys, "build", "--copula", str(spec), "--profile", str(prof))
        assert code == 0 and out == FRECHET_TABLE

    def test_out_file(self, capsys, tmp_path):
        target = tmp_path / "t.txt"
        code, out, _ = run(capsys, "build", "--copula", "independence", "--profile", PROFILE, "--out", str(target))
        assert code == 0 and out == ""
        assert target.read_text() == TABLE_ONE


class TestInputErrors:
    def test_malformed_json_reports_position(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("[[0.5, 0.5],\n [0.5 0.5]]")
        code, _, err = run(capsys, "build", "--copula", "independence", "--profile", str(bad))
        assert code == 2
        assert "line 2" in err and "column" in err

    def test_bad_marginal(self, capsys):
        code, _, err = run(capsys, "build", "--copula", "independence", "--profile", "[[0.5,0.6]]")
        assert code == 2
        assert "sum" in err

    def test_non_number(self, capsys):
        code, _, err = run(capsys, "build", "--copula", "independence", "--profile", '[[0.5,"x"]]')
        assert code == 2
        assert "profile[1][2]" in err

    def test_dimension_mismatch(self, capsys):
        code, _, _ = run(capsys, "build", "--copula", '{"family":"independence","n":3}', "--profile", PROFILE)
        assert code == 2

    def test_unsupported_gaussian(self, capsys):
        sigma = np.eye(5).tolist()
        code, _, err = run(capsys, "build", "--copula", json.dumps({"family": "gaussian", "sigma": sigma}),
                           "--profile", json.dumps([[0.5, 0.5]] * 5))
        assert code == 2
        assert "dimension" in err

    def test_unknown_family(self, capsys):
        code, _, _ = run(capsys, "build", "--copula", "student", "--profile", PROFILE)
        assert code == 2

    def test_unknown_command(self, capsys):
        assert run(capsys, "frobnicate")[0] == 2

    def test_model_and_copula(self, capsys):
        code, _, _ = run(capsys, "check-ia", "--model", "independence", "--copula", "independence")
        assert code == 2


class TestChecks:
    def test_check_ia_maximal_coupling(self, capsys):
        code, out, _ = run(capsys, "check-ia", "--model", "maximal-coupling", "--trials", "100", "--seed", "0")
        assert code == 1
        rep = json.loads(out)
        assert rep["verdict"] == "fail"
        assert rep["witness"]["cell"] == [1, 4]

    def test_check_ia_at_profile(self, capsys):
        code, out, _ = run(capsys, "check-ia", "--copula", "independence", "--profile", PROFILE_FINE,
                           "--i", "1", "--j", "3")
        assert code == 0
        assert json.loads(out)["verdict"] == "pass"

    def test_check_ia_gaussian_default_tolerance(self, capsys):
        code, _, _ = run(capsys, "check-ia", "--copula", '{"family":"gaussian","sigma":[[1,0.5],[0.5,1]]}',
                         "--trials", "20")
        assert code == 0

    def test_collapse(self, capsys):
        code, out, _ = run(capsys, "collapse", "--profile", PROFILE_FINE, "--i", "1", "--j", "3")
        assert code == 0
        assert json.loads(out) == json.loads(PROFILE)

    def test_collapse_out_of_range(self, capsys):
        assert run(capsys, "collapse", "--profile", PROFILE, "--j", "3")[0] == 2

    def test_extract_point(self, capsys):
        code, out, _ = run(capsys, "extract", "--model", "independence", "--x", "[0.5,0.25]")
        assert code == 0
        assert json.loads(out)["value"] == 0.125

    def test_extract_verify(self, capsys):
        assert run(capsys, "extract", "--model", "maximal-coupling", "--verify", "--trials", "10")[0] == 1
        assert run(capsys, "extract", "--model", "frechet-upper", "--verify", "--trials", "10")[0] == 0

    def test_extract_against(self, capsys):
        code, _, _ = run(capsys, "extract", "--copula", '{"family":"gumbel","theta":1.5}',
                         "--against", '{"family":"gumbel","theta":1.5}', "--grid-depth", "3")
        assert code == 0

    def test_neutrality(self, capsys):
        assert run(capsys, "check-neutrality", "--model", "independence", "--trials", "50")[0] == 0
        code, out, _ = run(capsys, "check-neutrality", "--copula", "frechet-upper", "--profile", PROFILE,
                           "--sigma", "[2,1,3]")
        assert code == 1
        assert json.loads(out)["witness"]["sigma"] == [2, 1, 3]

    def test_factorization(self, capsys):
        assert run(capsys, "verify-factorization", "--copula", "independence", "--M", "[1]")[0] == 0
        code, out, _ = run(capsys, "verify-factorization", "--copula", "frechet-upper", "--M", "[1]")
        assert code == 1
        assert json.loads(out)["verdict"] == "fail"

    def test_axioms(self, capsys):
        code, out, _ = run(capsys, "axioms", "--copula", '{"family":"clayton","theta":2.0}')
        assert code == 0
        assert json.loads(out)["depth"] == 6

    def test_exec_model(self, capsys):
        model = f"exec:{sys.executable} {ORACLE_SCRIPT}"
        assert run(capsys, "check-ia", "--model", model, "--trials", "10")[0] == 0

    def test_exec_not_a_model(self, capsys):
        model = f"exec:{sys.executable} {ORACLE_SCRIPT} skew"
        code, out, _ = run(capsys, "check-ia", "--model", model, "--profile", "[[0.1,0.2,0.7],[0.3,0.7]]",
                           "--j", "1")
        assert code == 1
        assert json.loads(out)["verdict"] == "not-a-model"


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "iacopula", "build", "--copula", "independence", "--profile", PROFILE],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout == TABLE_ONE


@pytest.mark.parametrize(
    "x, text",
    [(0.125, "1/8"), (1 / 32, "1/32"), (0.0, "0"), (1.0, "1"), (1 / 3, "1/3"), (0.123456789, "0.123456789")],
)
def test_format_prob(x, text):
    assert format_prob(x) == text
