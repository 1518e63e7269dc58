import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from weitzenbock import catalog, cli, domains, report
from weitzenbock.errors import DimensionMismatch, SpecParseError
from weitzenbock.symbols import laplace_form

FAST = dict(grid_points=2**11, refine_starts=4)


@pytest.mark.parametrize("name", ["de_rham:3:1", "dolbeault:2:1", "symmetric_gradient_2d"])
def test_pair_spec_round_trip(name, tmp_path):
    p = catalog.get(name).pair
    text = report.export_pair_spec(p)
    assert report.parse_pair_spec(text) == p
    path = tmp_path / "pair.json"
    path.write_text(text)
    assert report.parse_pair_spec(str(path)) == p
    assert report.resolve_pair(str(path)) == p


def test_wrong_matrix_shape_names_the_coefficient():
    doc = json.loads(report.export_pair_spec(catalog.de_rham(3, 1).pair))
    doc["A"][1] = doc["A"][1][:-1]
    with pytest.raises(DimensionMismatch, match="A_2"):
        report.parse_pair_spec(json.dumps(doc))


def test_wrong_number_of_coefficients():
    doc = json.loads(report.export_pair_spec(catalog.de_rham(3, 1).pair))
    doc["B"] = doc["B"][:2]
    with pytest.raises(DimensionMismatch):
        report.parse_pair_spec(json.dumps(doc))


def test_malformed_json_reports_position():
    with pytest.raises(SpecParseError) as info:
        report.parse_pair_spec('{\n "n": 2,\n "dim_F": }')
    assert info.value.location == "line 3, column 11"


def test_missing_field_and_bad_entries():
    with pytest.raises(SpecParseError, match="dim_F"):
        report.parse_pair_spec('{"n": 1, "A": [], "B": []}')
    doc = json.loads(report.export_pair_spec(catalog.de_rham(2, 1).pair))
    doc["A"][0][0][0] = "x"
    with pytest.raises(SpecParseError, match=r"A\[0\]"):
        report.parse_pair_spec(json.dumps(doc))


def test_rescaling_matrices_are_applied():
    p = catalog.de_rham(2, 1).pair
    doc = json.loads(report.export_pair_spec(p, A0=0.1 * np.eye(p.dim_G)))
    q = report.parse_pair_spec(json.dumps(doc))
    assert np.allclose(q.A.coeffs, 0.1 * p.A.coeffs) and np.array_equal(q.B.coeffs, p.B.coeffs)
    assert not laplace_form(q).is_psd()


def test_domain_specs():
    assert report.parse_domain_spec("ball:2").params["radius"] == 2.0
    e = report.parse_domain_spec("ellipsoid:1,1.5,2")
    assert e.params["semi_axes"] == [1.0, 1.5, 2.0]
    s = report.parse_domain_spec('{"kind": "superellipsoid", "semi_axes": [1, 1, 1], "exponent": 4}')
    assert s.params["exponent"] == 4
    assert report.domain_for_pair("ball", 4).n == 4
    with pytest.raises(SpecParseError):
        report.parse_domain_spec("torus")
    with pytest.raises(SpecParseError):
        report.parse_domain_spec("ellipsoid")
    with pytest.raises(DimensionMismatch):
        report.domain_for_pair("ellipsoid:1,2,3", 2)


def test_de_rham_analysis_outcomes():
    rep = report.run_full_analysis(catalog.de_rham(3, 1).pair, [domains.ball()], dict(FAST, bump_fields=2,
                                                                                    projected_fields=2))
    checks = {r["name"]: r for r in rep["checks"]}
    assert checks["ellipticity"]["verdict"] and checks["laplace_identity"]["verdict"]
    assert checks["exact_complex"]["verdict"] and checks["cocanceling"]["verdict"]
    for r in rep["checks"]:
        assert "tolerance" in r and "method" in r
    dom = rep["domains"][0]
    assert dom["strong_pseudoconvexity"]["verdict"]
    assert dom["boundary_estimates"]["satisfied"]
    assert all(r["residual"] <= 1e-6 for r in dom["identity"])
    assert rep["theorems"]["interior_coercivity"]["satisfied"]
    assert rep["schema_version"] == report.SCHEMA_VERSION and rep["conclusive"]


def test_dolbeault_analysis_outcomes():
    rep = report.run_full_analysis(catalog.dolbeault(2, 1).pair, (), FAST)
    checks = {r["name"]: r for r in rep["checks"]}
    assert checks["laplace_psd"]["verdict"] and not checks["laplace_identity"]["verdict"]
    assert not checks["dm_c_ellipticity"]["verdict"]
    assert not rep["theorems"]["interior_coercivity"]["satisfied"]


def test_symplectic_analysis_notes_failure_of_estimates():
    rep = report.run_full_analysis(catalog.symplectic_de_rham(4, 2).pair, (), FAST)
    assert not rep["checks"][0]["verdict"]
    assert any("no coercive, Morrey or square-function estimate can hold" in n for n in rep["notes"])


def test_indefinite_form_is_recorded_not_raised():
    rep = report.run_full_analysis(catalog.scaled_curl_div(0.1).pair, (), FAST)
    checks = {r["name"]: r for r in rep["checks"]}
    assert checks["dm_c_ellipticity"]["verdict"] is None
    assert "NotPositiveSemiDefinite" in checks["dm_c_ellipticity"]["error"]


def test_report_json_without_timing_is_stable():
    p = catalog.cauchy_riemann().pair
    a = report.dumps_report(report.run_full_analysis(p, (), dict(FAST, seed=7)), include_timing=False)
    b = report.dumps_report(report.run_full_analysis(p, (), dict(FAST, seed=7)), include_timing=False)
    assert a == b and "timing" not in json.loads(a)


def test_cli_exit_codes(capsys):
    assert cli.main(["analyze", "--pair", "de_rham:3:1", "--grid-points", "2048", "--no-timing"]) == 0
    assert json.loads(capsys.readouterr().out)["pair"]["name"] == "de_rham:3:1"
    assert cli.main(["analyze", "--pair", "scaled_curl_div:0.0001", "--grid-points", "2048"]) == 2
    capsys.readouterr()
    assert cli.main(["analyze", "--pair", "nonsense"]) == 1
    assert "unknown catalog pair" in capsys.readouterr().err


def test_cli_seed_from_environment(monkeypatch):
    monkeypatch.setenv(cli.SEED_ENV, "11")
    args = cli.build_parser().parse_args(["levi", "--pair", "de_rham:3:1"])
    assert args.seed == 11
    monkeypatch.delenv(cli.SEED_ENV)
    assert cli.build_parser().parse_args(["levi", "--pair", "de_rham:3:1"]).seed == 0


def test_cli_levi(tmp_path):
    out = tmp_path / "levi.json"
    assert cli.main(["levi", "--pair", "de_rham:3:1", "--domain", "ellipsoid:1,1.5,2", "--resolution", "8",
                     "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc[0]["strong_pseudoconvexity"]["verdict"] and doc[0]["domain"]["kind"] == "ellipsoid"


def test_cli_verify_identity_csv(capsys):
    assert cli.main(["verify-identity", "--pair", "de_rham:3:1", "--fields", "1", "--order", "12"]) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert len(rows) == 3  # bump, projected, rotation
    assert all(float(r["residual"]) <= 1e-6 for r in rows)


def test_cli_quotients_csv(tmp_path):
    out = tmp_path / "q.csv"
    assert cli.main(["quotients", "--pair", "de_rham:3:1", "--fields", "1", "--order", "12", "--out", str(out)]) == 0
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    assert rows[-1]["field"] == "MAX" and float(rows[-1]["morrey"]) > 0 and rows[-1]["coercivity"]


def test_cli_catalog_export_parses(tmp_path):
    out = tmp_path / "p.json"
    assert cli.main(["catalog", "--pair", "dolbeault:2:1", "--out", str(out)]) == 0
    assert report.parse_pair_spec(str(out)) == catalog.dolbeault(2, 1).pair


def test_module_entry_point_lists_catalog():
    res = subprocess.run([sys.executable, "-m", "weitzenbock", "catalog"], capture_output=True, text=True, check=True)
    assert "de_rham" in res.stdout.split()
