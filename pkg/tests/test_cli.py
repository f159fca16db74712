import csv
import json
import subprocess
import sys
from pathlib import Path

import pytest

from pvcauchy import __version__
from pvcauchy.cli import COMMANDS, InputError, RunConfig, parse_intervals, parse_points, run

SPECS = Path(__file__).resolve().parents[1] / "demos" / "specs"


def call(capsys, *argv):
    code = run([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out.strip(), out.err


def report(path):
    return json.loads(Path(path).read_text())


# -- argument helpers -------------------------------------------------------------------


def test_parse_points_inline_and_file(tmp_path):
    assert list(parse_points("0.5, 1+2i 3j")) == [0.5, 1 + 2j, 3j]
    f = tmp_path / "pts.txt"
    f.write_text("# header\n0.5, 0.25\n1+1j\n\n")
    assert list(parse_points(str(f))) == [0.5 + 0.25j, 1 + 1j]
    with pytest.raises(InputError):
        parse_points("1, x")


def test_parse_intervals():
    assert parse_intervals("[-1,-0.3],[0.3,1]") == [(-1, -0.3), (0.3, 1)]
    for bad in ("[1,2,3]", "nonsense", "[a,b]", None):
        with pytest.raises(InputError):
            parse_intervals(bad)


def test_run_config_validation():
    with pytest.raises(InputError):
        RunConfig("eval", tol=0)
    with pytest.raises(InputError):
        RunConfig("eval", nodes=1)
    with pytest.raises(InputError):
        RunConfig("eval", eps_min=-1)


# -- subcommands ------------------------------------------------------------------------


def test_reflectionless_arcsine_passes(capsys, tmp_path):
    code, line, _ = call(capsys, "verify-reflectionless", "--spec", SPECS / "arcsine.json", "--tol", "1e-6",
                         "--out", tmp_path)
    assert code == 0 and line.startswith("verify-reflectionless: pass")
    rep = report(tmp_path / "verify-reflectionless.json")
    assert rep["verdict"] == "pass" and rep["tool"] == "pvcauchy" and rep["version"] == __version__
    assert rep["config"]["seed"] == 0 and rep["nodes"] == 64 and rep["tolerance"] == 1e-6
    rows = list(csv.reader(open(tmp_path / "verify-reflectionless.csv")))
    assert rows[0][-1] == "residual"


def test_reflectionless_uniform_fails_at_half(capsys, tmp_path):
    code, line, _ = call(capsys, "verify-reflectionless", "--spec", SPECS / "uniform.json", "--tol", "1e-6",
                         "--points", "0.5", "--out", tmp_path)
    assert code == 1 and "fail" in line and "0.549306" in line
    code, _, _ = call(capsys, "verify-reflectionless", "--spec", SPECS / "uniform.json", "--out", tmp_path)
    assert code == 1


def test_harmonic_measure_pair(capsys, tmp_path):
    code, line, _ = call(capsys, "harmonic-measure", "--intervals", "[-1,-0.3],[0.3,1]", "--out", tmp_path)
    assert code == 0 and "pass" in line
    side = report(tmp_path / "harmonic_sidecar.json")
    assert abs(side["gap_roots"][0]) < 1e-10 and side["intervals"] == [[-1, -0.3], [0.3, 1]]
    # the emitted spec file loads back as a reflectionless measure
    code, _, _ = call(capsys, "verify-reflectionless", "--spec", tmp_path / "harmonic_spec.json",
                      "--out", tmp_path / "again")
    assert code == 0


def test_quadratic_pass_and_expected_fail(capsys, tmp_path):
    code, line, _ = call(capsys, "verify-quadratic", "--spec", SPECS / "circle_current.json", "--out", tmp_path)
    assert code == 0 and "pass" in line
    code, line, _ = call(capsys, "verify-quadratic", "--spec", SPECS / "arcsine_control.json",
                         "--points", "2", "--out", tmp_path)
    assert code == 0 and "expected-fail" in line
    assert report(tmp_path / "verify-quadratic.json")["verdict"] == "expected-fail"


def test_eval_points(capsys, tmp_path):
    code, line, _ = call(capsys, "eval", "--spec", SPECS / "semicircle.json", "--points", "2, 0.5, 1+1j",
                         "--eps-min", "1e-3", "--out", tmp_path)
    assert code == 0, line
    rows = list(csv.DictReader(open(tmp_path / "eval.csv")))
    assert abs(float(rows[0]["value_re"]) - (2 - 3**0.5)) < 1e-12
    # on the support the principal value is x
    assert abs(float(rows[1]["value_re"]) - 0.5) < 1e-10 and rows[1]["method"] == "direct"


def test_eval_requires_points(capsys, tmp_path):
    code, _, err = call(capsys, "eval", "--spec", SPECS / "arcsine.json", "--out", tmp_path)
    assert code == 2 and "points" in err


def test_comb_and_widom(capsys, tmp_path):
    code, line, _ = call(capsys, "comb", "--spec", SPECS / "arcsine.json", "--out", tmp_path)
    assert code == 0 and "strip height 3.14159265" in line
    assert report(tmp_path / "comb.json")["result"]["comb_like"] is True
    code, line, _ = call(capsys, "widom", "--intervals", "[-1,-0.3],[0.3,1]", "--out", tmp_path)
    assert code == 0 and "0.309519604" in line


def test_maximal(capsys, tmp_path):
    code, line, _ = call(capsys, "maximal", "--spec", SPECS / "uniform.json", "--nodes", "4", "--out", tmp_path)
    assert code == 0 and line.startswith("maximal: summable")


def test_bench_keeps_timings_out_of_reports(capsys, tmp_path):
    args = ["bench", "--nodes", "3000", "--out", tmp_path]
    code, line, _ = call(capsys, *args)
    assert code == 0 and " s" in line
    first = (tmp_path / "bench.json").read_bytes()
    call(capsys, *args)
    assert (tmp_path / "bench.json").read_bytes() == first
    assert "seconds" not in first.decode()


def test_reports_are_byte_identical(capsys, tmp_path):
    for d in ("a", "b"):
        call(capsys, "verify-quadratic", "--spec", SPECS / "uniform.json", "--out", tmp_path / "x", "--seed", "7")
        (tmp_path / "x").rename(tmp_path / d)
    for name in ("verify-quadratic.json", "verify-quadratic.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


# -- exit codes --------------------------------------------------------------------------


@pytest.mark.parametrize(
    "argv",
    [
        ["frobnicate"],
        ["verify-reflectionless"],
        ["verify-reflectionless", "--spec", "/nonexistent.json"],
        ["verify-reflectionless", "--spec", SPECS / "arcsine.json", "--tol", "-1"],
        ["harmonic-measure", "--intervals", "[0,1],[0.5,2]"],
        ["eval", "--spec", SPECS / "arcsine.json", "--points", "abc"],
    ],
)
def test_input_errors_exit_2(capsys, tmp_path, argv):
    code, _, _ = call(capsys, *argv, *(["--out", tmp_path] if len(argv) > 1 else []))
    assert code == 2


def test_bad_spec_file_exit_2(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"components": [{"kind": "atom", "at": [0, 0], "colour": "red"}]}))
    code, _, err = call(capsys, "verify-quadratic", "--spec", bad, "--out", tmp_path)
    assert code == 2 and "colour" in err


def test_endpoint_pv_of_arcsine_does_not_converge(capsys, tmp_path):
    code, line, _ = call(capsys, "eval", "--spec", SPECS / "arcsine.json", "--points", "1", "--out", tmp_path)
    assert code == 3 and "non-converged" in line


def test_every_command_is_registered():
    assert set(COMMANDS) == {"eval", "maximal", "verify-quadratic", "verify-reflectionless",
                             "harmonic-measure", "comb", "widom", "bench"}


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "pvcauchy", "widom", "--intervals", "[-1,1]", "--out",
                           str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("widom: ok")
