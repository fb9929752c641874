import json

import pytest

from relroots.cli import main
from relroots.kncache import set_default_cache
from relroots.polyalg import IntPolynomial, parse_poly_text


@pytest.fixture
def cli(tmp_path, monkeypatch, shared_cache, capsys):
    monkeypatch.chdir(tmp_path)

    def run(*argv):
        code = main([*argv, "--cache-dir", str(shared_cache.directory)])
        out, err = capsys.readouterr()
        return code, out, err

    yield run
    set_default_cache(shared_cache)


def test_rel_complete_family(cli):
    code, out, _ = cli("rel", "--family", "K", "4")
    assert code == 0
    assert parse_poly_text(out) == IntPolynomial([1, 0, 0, -4, -3, 12, -6])
    manifest = json.loads(open("relroots-manifest.json").read())
    assert manifest["exit_status"] == 0
    assert manifest["checks"] == {"matches brute force": True, "matches deletion-contraction": True}
    assert "versions" in manifest and "cache_checksums" in manifest


def test_rel_cycle_and_engines(cli):
    one_minus_q = IntPolynomial([1, -1])
    expected = one_minus_q**5 + IntPolynomial([0, 5]) * one_minus_q**4
    for engine in ("auto", "brute", "dc"):
        code, out, _ = cli("rel", "--family", "cycle", "5", "--engine", engine, "--no-manifest")
        assert code == 0 and parse_poly_text(out) == expected


def test_rel_from_tree_file(cli, tmp_path):
    (tmp_path / "tree.txt").write_text("5 4\n0 1\n1 2\n1 3\n3 4\n")
    code, out, _ = cli("rel", "--file", "tree.txt", "--out", "tree.poly")
    assert code == 0 and out == ""
    assert parse_poly_text((tmp_path / "tree.poly").read_text()) == IntPolynomial([1, -1]) ** 4


def test_rel_cycle_gadget_composition_check(cli):
    code, _, _ = cli("rel", "--family", "cycle-gadget", "3", "2")
    assert code == 0
    checks = json.loads(open("relroots-manifest.json").read())["checks"]
    assert checks["matches composition"] and checks["matches brute force"]


@pytest.mark.parametrize(
    "spec,expected",
    [(["K", "3"], [0, 0, 2, -2]), (["bundle", "5"], [0, 0, 0, 0, 0, 1]), (["path", "3"], [0, 2, -2])],
)
def test_srel_families(cli, spec, expected):
    code, out, _ = cli("srel", "--family", *spec, "--no-manifest")
    assert code == 0 and parse_poly_text(out) == IntPolynomial(expected)


def test_roots_of_linear_polynomial(cli):
    code, out, _ = cli("roots", "--poly", "1,-1", "--no-manifest")
    report = json.loads(out)
    assert code == 0 and report["roots"] == 1 and report["max_residual"] <= 1e-20


def test_roots_csv_and_svg(cli, tmp_path):
    code, out, _ = cli("roots", "--family", "K", "8", "--deflate-unit", "7", "--csv", "r.csv", "--svg", "r.svg")
    assert code == 0
    report = json.loads(out)
    assert report["roots"] == 28 - 7 and report["deflated_unit_roots"] == 7
    lines = (tmp_path / "r.csv").read_text().splitlines()
    assert len(lines) == 21 and all(len(line.split(",")) == 2 for line in lines)
    assert (tmp_path / "r.svg").read_text().startswith("<svg")
    manifest = json.loads(open("relroots-manifest.json").read())
    assert sorted(manifest["outputs"]) == ["r.csv", "r.svg"]


def test_roots_bad_deflation_exits_2(cli):
    code, _, err = cli("roots", "--poly", "1,1", "--deflate-unit", "1")
    assert code == 2 and "error" in err
    assert json.loads(open("relroots-manifest.json").read())["exit_status"] == 2


def test_density_target_writes_certificate(cli, tmp_path):
    code, out, _ = cli("density", "--target", "0,0.5", "--out", "certs")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "re(z0),im(z0),n,m,re(z*),im(z*),distance,residual" and len(lines) == 2
    cert = json.loads((tmp_path / "certs" / "certificate_000.json").read_text())
    assert cert["rouche"]["holds"] and float(cert["distance"]) <= 0.05
    assert (tmp_path / "certs" / "summary.csv").read_text() == out


def test_density_invalid_target(cli):
    code, _, err = cli("density", "--target", "0,0")
    assert code == 2 and "target" in err


def test_density_real_and_bundle(cli):
    code, out, _ = cli("density", "--real", "-0.5", "--no-manifest")
    assert code == 0 and len(out.splitlines()) == 2
    code, out, _ = cli("density", "--target=-0.5,0", "--family", "bundle", "--no-manifest")
    assert code == 0


def test_density_not_found_exits_1(cli):
    code, out, _ = cli("density", "--target", "0,0.9", "--n-max", "10", "--no-manifest")
    assert code == 1 and out.splitlines() == ["re(z0),im(z0),n,m,re(z*),im(z*),distance,residual"]


def test_converge(cli):
    code, out, _ = cli("converge", "--rho", "0.5", "--n-max", "12", "--n-min", "10", "--alpha-tol", "1", "--no-manifest")
    assert code == 0
    rows = out.splitlines()
    assert rows[1] == "n,alpha,beta" and [r.split(",")[0] for r in rows[2:]] == ["10", "11", "12"]
    code, _, _ = cli("converge", "--rho", "0.5", "--n-max", "12", "--alpha-tol", "1e-300", "--no-manifest")
    assert code == 1


def test_mc_is_deterministic_and_checked(cli):
    code, out, _ = cli("mc", "--family", "K", "4", "--q", "0.5", "--trials", "20000", "--seed", "5", "--exact", "--no-manifest")
    first = json.loads(out)
    assert code == 0 and first["exact"] == 0.59375 and abs(first["z"]) <= 3
    _, out, _ = cli("mc", "--family", "K", "4", "--q", "0.5", "--trials", "20000", "--seed", "5", "--exact", "--jobs", "2", "--no-manifest")
    assert json.loads(out)["estimate"] == first["estimate"]


def test_near_minus_one(cli):
    code, out, _ = cli("near-minus-one", "--q-target", "-0.6", "--no-manifest")
    report = json.loads(out)
    assert code == 0 and report["n"] == 4 and report["width"] <= 1e-12
    assert -1 < report["lo_float"] < report["hi_float"] < -0.6


@pytest.mark.parametrize(
    "argv",
    [
        ["rel", "--family", "hypercube", "3"],
        ["rel", "--family", "K"],
        ["rel"],
        ["srel", "--family", "cycle", "4"],
        ["roots", "--poly", "1,x"],
        ["rel", "--file", "missing.txt"],
        ["density", "--grid", "three-by-eight"],
    ],
)
def test_bad_input_exits_2(cli, argv):
    code, out, err = cli(*argv, "--no-manifest")
    assert code == 2 and out == "" and err.startswith("error:")
