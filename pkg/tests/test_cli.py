import json
import math
import subprocess
import sys
from importlib import resources

import pytest

from thetaplanes import cli

SPACES = resources.files("thetaplanes") / "data" / "spaces"


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    return code, json.loads(out)


class TestParseSpace:
    @pytest.mark.parametrize("text, name, c", [
        ("sphere", "sphere", 1.0), ("sphere(2.5)", "sphere", 2.5),
        ("fubini_study(c=1)", "fubini_study", 1.0), (" real_hyperbolic( -0.5 ) ", "real_hyperbolic", -0.5),
    ])
    def test_forms(self, text, name, c):
        chart = cli.parse_space(text)
        assert chart.name == name and chart.params["c"] == pytest.approx(c)

    def test_file(self):
        assert cli.parse_space(str(SPACES / "flat.json")).name == "flat"

    @pytest.mark.parametrize("text", ["sphere(", "sphere(x)", "nowhere", "sphere(d=1)"])
    def test_bad(self, capsys, text):
        assert run(capsys, "axiom", text, "--samples", "5")[0] == 2


class TestValidate:
    def test_flat_valid(self, capsys):
        code, doc = run_json(capsys, "validate", str(SPACES / "flat.json"))
        assert code == 0 and doc["valid"] and doc["failures"] == []

    @pytest.mark.parametrize("name", ["sphere", "fubini_study", "non_kahler_flat_J", "product_s2xs2"])
    def test_catalog_files_valid(self, capsys, name):
        code, out, _ = run(capsys, "validate", str(SPACES / f"{name}.json"), "--points", "1")
        assert code == 0 and out.rstrip().endswith("valid")

    def test_J_not_complex_structure(self, capsys, tmp_path):
        doc = json.loads((SPACES / "flat.json").read_text())
        doc["J"] = [[f"2*({e})" for e in row] for row in doc["J"]]
        path = tmp_path / "bad_J.json"
        path.write_text(json.dumps(doc))
        code, rep = run_json(capsys, "validate", str(path), "--points", "0")
        assert code == 1
        assert "J_squared" in rep["failures"] and rep["worst"]["J_squared"] == pytest.approx(3.0)

    def test_malformed(self, capsys, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{"name": "x", ')
        code, _, err = run(capsys, "validate", str(path))
        assert code == 2 and "malformed" in err

    def test_missing_file(self, capsys, tmp_path):
        assert run(capsys, "validate", str(tmp_path / "none.json"))[0] == 2


class TestAxiom:
    def test_sphere_holds(self, capsys):
        code, doc = run_json(capsys, "axiom", "sphere(1)", "--theta", "0.7853981634", "--samples", "300")
        assert code == 0
        assert doc["verdict"] == "holds" and doc["theorem"] == "confirmed"
        assert doc["defect_norm"] <= 1e-5 and doc["c_star"] == pytest.approx(1.0, abs=1e-5)
        assert doc["kahler"] is False and doc["corollary"] == "n/a"

    def test_fubini_study_fails(self, capsys):
        code, doc = run_json(capsys, "axiom", "fubini_study(4)", "--samples", "1000")
        assert code == 1
        assert doc["verdict"] == "fails" and doc["theorem"] == "contrapositive"
        assert abs(doc["worst"]["eq2"]) == pytest.approx(1.5, abs=1e-3)
        assert abs(doc["worst"]["eq4"]) == pytest.approx(3.0, abs=1e-3)

    def test_flat_zero_residuals_and_corollary(self, capsys):
        code, doc = run_json(capsys, "axiom", "flat", "--samples", "50")
        assert code == 0
        assert all(doc["worst"][f"eq{i}"] == 0 for i in range(1, 6))
        assert doc["kahler"] is True and doc["corollary"] == "confirmed"

    def test_human_output(self, capsys):
        code, out, _ = run(capsys, "axiom", "sphere", "--samples", "20")
        assert code == 0
        assert "axiom: holds" in out and "theorem: confirmed" in out and "worst record:" in out

    def test_degrees(self, capsys):
        _, doc = run_json(capsys, "axiom", "flat", "--theta", "30", "--degrees", "--samples", "5")
        assert doc["theta"] == pytest.approx(math.pi / 6)

    @pytest.mark.parametrize("theta", ["0", "1.5707963267948966", "-0.2", "2"])
    def test_theta_out_of_range(self, capsys, theta):
        code, _, err = run(capsys, "axiom", "flat", "--theta", theta, "--samples", "5")
        assert code == 2 and "theta" in err

    def test_point_option(self, capsys):
        code, doc = run_json(capsys, "axiom", "sphere", "--point", "0.1,0.2,-0.1,0", "--samples", "20")
        assert code == 0 and doc["point"] == [0.1, 0.2, -0.1, 0.0]
        assert run(capsys, "axiom", "sphere", "--point", "0.1,0.2", "--samples", "5")[0] == 2
        assert run(capsys, "axiom", "sphere", "--point", "5,0,0,0", "--samples", "5")[0] == 2

    def test_deterministic_bytes(self, capsys):
        argv = ("axiom", "complex_hyperbolic", "--samples", "200", "--seed", "7", "--json")
        first = run(capsys, *argv)[1]
        second = run(capsys, *argv)[1]
        assert first == second
        other = run(capsys, "axiom", "complex_hyperbolic", "--samples", "200", "--seed", "8", "--json")[1]
        assert other != first


class TestSchur:
    def test_sphere_constant(self, capsys):
        code, doc = run_json(capsys, "schur", "sphere(1)", "--points", "10")
        assert code == 0 and doc["constant"] and doc["spread"] <= 1e-5
        assert len(doc["points"]) == 10

    def test_flat_zero(self, capsys):
        code, doc = run_json(capsys, "schur", "flat", "--points", "3")
        assert code == 0 and all(p["c"] == 0 for p in doc["points"])

    def test_fubini_study_not_space_form(self, capsys):
        code, out, err = run(capsys, "schur", "fubini_study(4)", "--points", "3")
        assert code == 1 and "point 0" in err and "u = [" in err

    def test_json_error_payload(self, capsys):
        code, doc = run_json(capsys, "schur", "product_s2xs2", "--points", "3")
        assert code == 1 and doc["error"] == "not_a_space_form"


def test_list(capsys):
    code, out, _ = run(capsys, "list")
    assert code == 0 and "fubini_study" in out and "round_sphere_flat" in out


def test_nonpositive_samples(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["axiom", "flat", "--samples", "0"])
    assert exc.value.code == 2


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "thetaplanes", "list"], capture_output=True, text=True)
    assert proc.returncode == 0 and "sphere" in proc.stdout
