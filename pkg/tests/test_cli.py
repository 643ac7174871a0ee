import os
import subprocess
import sys

import pytest

from dlseries.cli import census_from_csv, read_csv, run
from dlseries.rootdatum import builtin_datum, named_twist
from dlseries.series import series_of, series_partition

GL2 = ["--datum", "GL", "--n", "2", "--p", "3"]
SL2 = ["--datum", "SL", "--n", "2", "--p", "3"]


def ok(argv):
    code, out, err = run(argv)
    assert code == 0, err
    return out


def test_torus_examples():
    assert "Z/8, order 8" in ok(["torus", *GL2, "s1"])
    assert "T^wF = Z/2," in ok(["torus", *SL2, "1"])
    out = ok(["torus", "--datum", "PGL", "--n", "2", "--p", "3", "s1", "--cochar", "1;2"])
    assert "Z/4" in out and "N_w(1) = (3)" in out


def test_torus_csv():
    out = ok(["torus", *GL2, "s1", "--cochar", "1,0;0,1", "--format", "csv"])
    rows = read_csv(out, "torus")
    assert [r["norm"] for r in rows] == ["3", "1"]
    assert rows[0]["invariant_factors"] == "8"


def test_series_examples():
    assert ok(["series", *GL2]).startswith("datum GL2")
    assert len(read_csv(ok(["series", *GL2, "--format", "csv"]), "series")) == 6
    rows = read_csv(ok(["series", *SL2, "--format", "csv"]), "series")
    assert len(rows) == 4 and len({r["geometric_id"] for r in rows}) == 3
    assert len(read_csv(ok(["series", *SL2, "--trivial-only", "--format", "csv"]), "series")) == 1
    assert len(read_csv(ok(["series", *SL2, "--mode", "brauer", "--ell", "2", "--format", "csv"]), "series")) == 1


def test_series_csv_round_trip():
    for name, argv in (("GL2", GL2), ("SL2", SL2)):
        rd = builtin_datum(name[:-1], 2)
        tw = named_twist(rd, 3, 1)
        part = series_partition(rd, tw)
        pairs = census_from_csv(rd, tw, ok(["series", *argv, "--format", "csv"]))
        assert [series_of(rd, tw, p) for p in pairs] == part


def test_monodromy_examples():
    out = ok(["monodromy", *SL2, "s1,s1", "--format", "csv"])
    rows = read_csv(out, "monodromy")
    assert len(rows) == 4
    bottom = next(r for r in rows if r["v"] == "(1,1)")
    assert (bottom["i=0"], bottom["i=1"], bottom["i=2"]) == ("1", "2", "1")
    top = next(r for r in rows if r["v"] == "(s1,s1)")
    assert (top["i=0"], top["i=1"], top["i=2"]) == ("1", "0", "0")
    rows = read_csv(ok(["monodromy", *SL2, "s1", "--theta", "1/4", "--format", "csv"]), "monodromy")
    assert [r["v"] for r in rows if r["i=0"] != "0"] == ["(s1)"]


def test_monodromy_by_series():
    out = ok(["monodromy", *SL2, "--series", "3"])
    assert "theta = (1/4)" in out
    code, _, err = run(["monodromy", *SL2, "--series", "9"])
    assert code == 2


def test_jordan_examples():
    assert "Levi: torus (∅,1); not quasi-isolated" in ok(["jordan", *GL2, "--s", "0,1/2"])
    assert "L(s)=G; quasi-isolated" in ok(["jordan", *GL2])
    out = ok(["jordan", *SL2, "--s", "1/2"])
    assert "NotLevi: disconnected centralizer" in out and "π = {2}" in out
    rows = read_csv(ok(["jordan", *SL2, "--s", "1/2", "--format", "csv"]), "jordan")
    assert rows[0]["obstruction"] == "disconnected centralizer" and rows[0]["pi"] == "2"


@pytest.mark.parametrize("argv,code", [
    (["torus", "--datum", "GL", "--n", "2", "--p", "4", "s1"], 2),
    (["torus", "--datum", "GL", "--n", "2", "s1"], 2),
    (["torus", "--datum", "nope", "--p", "3", "1"], 2),
    (["torus", *GL2, "s7"], 2),
    (["series", *GL2, "--mode", "brauer", "--ell", "3"], 2),
    (["series", *GL2, "--mode", "brauer"], 2),
    (["monodromy", *SL2, "s1", "--theta", "1/3"], 2),
    (["jordan", *GL2, "--s", "1/3,0"], 2),
    (["jordan", "--datum", "A5-sc", "--p", "3"], 3),
    (["bogus"], 2),
])
def test_exit_codes(argv, code):
    assert run(argv)[0] == code


def test_cache_is_byte_identical(tmp_path):
    argv = ["series", *SL2, "--format", "csv", "--cache-dir", str(tmp_path)]
    cold = ok(argv)
    files = [f for f in os.listdir(tmp_path) if f.endswith(".out")]
    assert len(files) == 1 and not [f for f in os.listdir(tmp_path) if f.startswith(".tmp")]
    assert ok(argv) == cold
    # a different argument is a different key
    ok(["series", *SL2, "--cache-dir", str(tmp_path)])
    assert len(os.listdir(tmp_path)) == 2


def test_spec_file(tmp_path):
    spec = tmp_path / "gl2.spec"
    spec.write_text(
        "# GL2 written out\n"
        "name = myGL2\n"
        "rank = 2\n"
        "roots = [[1,-1],[-1,1]]\n"
        "coroots = [[1,-1],[-1,1]]\n"
        "simple = [0]\n"
        "p = 3\n"
    )
    out = ok(["torus", "--datum", str(spec), "s1"])
    assert "myGL2" in out and "Z/8" in out
    assert "Z/24" in ok(["torus", "--datum", str(spec), "--p", "5", "s1"])
    bad = tmp_path / "bad.spec"
    bad.write_text("rank = 1\nroots = [[1]]\ncoroots = [[1]]\nsimple = [0]\n")
    assert run(["torus", "--datum", str(bad), "--p", "3", "1"])[0] == 2


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "dlseries", "torus", *GL2, "s1"], capture_output=True, text=True)
    assert res.returncode == 0 and "Z/8" in res.stdout
