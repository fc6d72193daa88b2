import json
import math

import click
import pytest
from click.testing import CliRunner

from barcode_entropy.cli import main, parse_grid


@pytest.fixture
def run(tmp_path):
    runner = CliRunner()

    def go(*args):
        return runner.invoke(main, [str(a) for a in args])

    return go


def write(path, obj):
    path.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return path


def load(path):
    return json.loads(path.read_text())


# -- barcode ---------------------------------------------------------------------


def test_empty_complex(run, tmp_path):
    p = write(tmp_path / "c.json", {"generators": []})
    r = run("barcode", p, "--out", tmp_path / "o", "--no-plots")
    assert r.exit_code == 0, r.output
    assert (tmp_path / "o/barcode/barcode.csv").read_text().strip() == "start,end,multiplicity"
    assert load(tmp_path / "o/barcode/report.json")["bars"] == 0


def test_malformed_json(run, tmp_path):
    p = write(tmp_path / "c.json", "{oops")
    r = run("barcode", p, "--out", tmp_path / "o")
    assert r.exit_code == 1
    assert "c.json" in r.output
    assert not (tmp_path / "o").exists()


def test_missing_file_is_usage_error(run, tmp_path):
    assert run("barcode", tmp_path / "nope.json", "--out", tmp_path).exit_code == 1


def test_barcode_f2(run, tmp_path):
    c = {"generators": [{"id": "a", "action": 5}, {"id": "b", "action": 0}, {"id": "z", "action": 1}],
         "boundary": [{"from": "a", "to": "b"}]}
    p = write(tmp_path / "c.json", c)
    r = run("barcode", p, "--out", tmp_path, "--eps-grid", "1,2^3")
    assert r.exit_code == 0, r.output
    rep = load(tmp_path / "barcode/report.json")
    assert rep["bars"] == 2
    assert rep["b_eps"] == {"1.0": 2, "8.0": 1}
    assert (tmp_path / "barcode/barcode.png").read_bytes()[:4] == b"\x89PNG"


def test_barcode_novikov(run, tmp_path):
    c = {"coefficients": "Novikov-F2",
         "generators": [{"id": "a", "action": 3}, {"id": "b", "action": 1}, {"id": "c", "action": 0}],
         "boundary": [{"from": "a", "to": "b", "exponents": [0]}, {"from": "a", "to": "c", "exponents": [2]}]}
    p = write(tmp_path / "c.json", c)
    r = run("barcode", p, "--out", tmp_path, "--no-plots")
    assert r.exit_code == 0, r.output
    lengths = load(tmp_path / "barcode/unpinned.json")["lengths"]
    assert lengths == [2.0, "inf"]


def test_invalid_complex_exit_1(run, tmp_path):
    c = {"generators": [{"id": "a", "action": 0}, {"id": "b", "action": 1}], "boundary": [{"from": "a", "to": "b"}]}
    r = run("barcode", write(tmp_path / "c.json", c), "--out", tmp_path)
    assert r.exit_code == 1 and "raises the action" in r.output


# -- entropy ---------------------------------------------------------------------


def test_entropy_cat(run, tmp_path):
    r = run("entropy", "cat", "--out", tmp_path, "--k-max", 10, "--samples", 16384, "--eps-grid", "2^-3", "--no-plots")
    assert r.exit_code == 0, r.output
    rep = load(tmp_path / "entropy/entropy.json")
    # log2 of the larger eigenvalue (3 + √5) / 2
    assert rep["periodic_rate"] == pytest.approx(1.3885, rel=0.01)
    assert 0.5 < rep["value"] < 2.0
    assert (tmp_path / "entropy/periodic.csv").exists()


def test_entropy_growth_csv(run, tmp_path):
    rows = "k,count\n" + "".join(f"{k},{3 * 2 ** k}\n" for k in range(1, 15))
    p = write(tmp_path / "g.csv", rows)
    r = run("entropy", "--growth", p, "--out", tmp_path)
    assert r.exit_code == 0, r.output
    assert load(tmp_path / "entropy/entropy.json")["rate"] == pytest.approx(1.0, abs=1e-9)
    assert (tmp_path / "entropy/growth.png").exists()


def test_entropy_barcode_dir(run, tmp_path):
    d = tmp_path / "bars"
    d.mkdir()
    for k in range(1, 9):
        write(d / f"{k}.csv", "length\n" + "1\n" * 2 ** k)
    r = run("entropy", "--barcodes", d, "--eps-grid", "0.5", "--out", tmp_path, "--no-plots")
    assert r.exit_code == 0, r.output
    assert load(tmp_path / "entropy/entropy.json")["value"] == pytest.approx(1.0, abs=1e-9)


def test_entropy_bad_csv_names_line(run, tmp_path):
    p = write(tmp_path / "g.csv", "k,count\n1,2\n2,x\n")
    r = run("entropy", "--growth", p, "--out", tmp_path)
    assert r.exit_code == 1
    assert "g.csv:3" in r.output


def test_entropy_needs_one_source(run, tmp_path):
    assert run("entropy", "--out", tmp_path).exit_code == 1
    assert run("entropy", "cat", "--k-max", 3, "--out", tmp_path).exit_code == 1


# -- crofton ---------------------------------------------------------------------


def test_crofton_unit_segment(run, tmp_path):
    p = write(tmp_path / "t.csv", "x,y\n-0.5,0.1\n0.5,0.1\n")
    r = run("crofton", p, "--samples", 100_000, "--out", tmp_path)
    assert r.exit_code == 0, r.output
    rep = load(tmp_path / "crofton/crofton.json")
    assert rep["integral"] == pytest.approx(2.0, rel=0.03)


def test_crofton_zero_length(run, tmp_path):
    p = write(tmp_path / "t.csv", "x,y\n0.2,0.3\n0.2,0.3\n")
    r = run("crofton", p, "--samples", 10_000, "--out", tmp_path)
    assert r.exit_code == 0, r.output
    assert load(tmp_path / "crofton/crofton.json")["integral"] == 0.0


def test_crofton_non_transverse_family(run, tmp_path):
    spec = write(tmp_path / "tom.json", {"kind": "translation", "core": [[0.1, 0.5], [0.6, 0.5]], "radius": 0.1, "along": [1, 0]})
    p = write(tmp_path / "t.csv", "x,y\n0.2,0.5\n0.8,0.5\n")
    r = run("crofton", p, "--tomograph", spec, "--samples", 2000, "--out", tmp_path)
    assert r.exit_code == 1
    assert "transverse" in r.output


def test_crofton_workers_do_not_change_output(run, tmp_path):
    p = write(tmp_path / "t.csv", "x,y\n0,0\n0.3,0.4\n")
    run("crofton", p, "--samples", 20_000, "--out", tmp_path / "a")
    run("crofton", p, "--samples", 20_000, "--workers", 3, "--out", tmp_path / "b")
    assert (tmp_path / "a/crofton/crofton.json").read_bytes() == (tmp_path / "b/crofton/crofton.json").read_bytes()


# -- toric -------------------------------------------------------------------------


def test_toric_ellipsoid(run, tmp_path):
    p = write(tmp_path / "e.json", {"a": [1, math.sqrt(2)]})
    r = run("toric", p, "--s-max", 1000, "--out", tmp_path)
    assert r.exit_code == 0, r.output
    rep = load(tmp_path / "toric/report.json")
    assert rep["certificate"]["pass"] and rep["certificate"]["n"] == 1
    assert rep["slope"] == pytest.approx(1 + 1 / math.sqrt(2), rel=0.01)
    assert rep["entropy_estimate"] == pytest.approx(0.0, abs=0.02)


def test_toric_quadratic_profile(run, tmp_path):
    p = write(tmp_path / "h.json", {"kind": "power", "p": 2})
    r = run("toric", p, "--k-max", 100, "--out", tmp_path, "--no-plots")
    assert r.exit_code == 0, r.output
    rep = load(tmp_path / "toric/report.json")
    assert rep["certificate"]["pass"]
    assert rep["degree_fit"] == pytest.approx(1.0, abs=0.05)


def test_toric_certificate_failure_exit_2(run, tmp_path):
    p = write(tmp_path / "h.json", {"kind": "power", "p": 2})
    r = run("toric", p, "--k-max", 40, "--degree", 0, "--out", tmp_path)
    assert r.exit_code == 2
    # the failing report is still written
    assert not load(tmp_path / "toric/report.json")["certificate"]["pass"]


def test_toric_flat_torus(run, tmp_path):
    p = write(tmp_path / "f.json", {"kind": "flat_torus", "v1": [1, 0], "v2": [0, 1]})
    r = run("toric", p, "--s-max", 200, "--out", tmp_path, "--no-plots")
    assert r.exit_code == 0, r.output


def test_toric_missing_parameter(run, tmp_path):
    r = run("toric", write(tmp_path / "h.json", {"kind": "table"}), "--out", tmp_path)
    assert r.exit_code == 1 and "slopes" in r.output


# -- verify and plumbing ------------------------------------------------------------


def test_verify_unknown_suite(run, tmp_path):
    r = run("verify", "nope", "--out", tmp_path)
    assert r.exit_code == 1


def test_env_output_root(tmp_path, monkeypatch):
    monkeypatch.setenv("BARCODE_ENTROPY_OUT", str(tmp_path / "env"))
    p = write(tmp_path / "c.json", {"generators": [{"id": "z", "action": 1}]})
    r = CliRunner().invoke(main, ["barcode", str(p), "--no-plots"])
    assert r.exit_code == 0, r.output
    assert (tmp_path / "env/barcode/barcode.csv").exists()


def test_unknown_option_exit_1(run):
    assert run("barcode", "--bogus").exit_code == 1


def test_parse_grid():
    assert parse_grid("1, 2^-3,0.5") == [1.0, 0.125, 0.5]
    for bad in ("0", "x", "-1", "inf"):
        with pytest.raises(click.BadParameter):
            parse_grid(bad)


def test_verify_fast(run, tmp_path):
    r = run("verify", "fast", "--out", tmp_path)
    assert r.exit_code == 0, r.output
    summary = load(tmp_path / "verify/fast/summary.json")
    assert summary["passed"] and len(summary["checks"]) == 9
    assert r.output.count("PASS") == 9


def test_verify_id_list(run, tmp_path):
    r = run("verify", "1,15", "--out", tmp_path)
    assert r.exit_code == 0, r.output
    assert (tmp_path / "verify/1_15/01_sphere_morse_barcode/result.json").exists()
