import json
import subprocess
import sys

import numpy as np
import pytest

from bezout.cli import InputError, RunConfig, fixture_path, load_system, main
from bezout.solve import RootSet

from systems import EX22_B1, EX22_BX1, EX22_BX2, same_multiset


def run(tmp_path, *args):
    return main([*args, "--out", str(tmp_path)])


def test_solve_example(tmp_path, capsys):
    assert run(tmp_path, "solve", "--input", str(fixture_path("example22"))) == 0
    out = capsys.readouterr().out
    assert "dim A = 3" in out and "roots: 3" in out
    worst = float(out.split("max residual:")[1])
    assert worst < 1e-4
    for name in ("roots.json", "histogram.csv", "rank.csv", "family.json"):
        assert (tmp_path / name).exists()


def test_solve_quadratic(tmp_path):
    assert run(tmp_path, "solve", "--input", str(fixture_path("quadratic"))) == 0
    rs = RootSet.from_json((tmp_path / "roots.json").read_text())
    assert same_multiset(rs.coords(), [[1], [2]], 1e-10)


def test_dump_bezout_matches_tables(tmp_path):
    assert run(tmp_path, "dump", "--stage", "bezout", "--input", str(fixture_path("example22"))) == 0
    from bezout.bezmat import load_family
    fam = load_family(json.loads((tmp_path / "family.json").read_text()))
    assert fam.row_label_strings() == ["1", "x2", "x2^2", "x1", "x1*x2", "x1*x2^2"]
    for M, ref in zip(fam.mats, (EX22_B1, EX22_BX1, EX22_BX2)):
        assert np.abs(M - ref).max() < 1e-8


def test_dump_reduce_trivial_has_no_relations(tmp_path, capsys):
    src = tmp_path / "lin.json"
    src.write_text(json.dumps({"polys": ["x1 - 2", "x2 + 1"]}))
    assert run(tmp_path, "dump", "--stage", "reduce", "--input", str(src)) == 0
    d = json.loads((tmp_path / "reduced.json").read_text())
    assert d["relations"] == [] and d["dimA"] == 1


def test_dump_companions(tmp_path):
    assert run(tmp_path, "dump", "--stage", "companions", "--input",
               str(fixture_path("example22"))) == 0
    d = json.loads((tmp_path / "companions.json").read_text())
    assert d["dimA"] == 3 and len(d["X"]) == 2


def test_term_list_input(tmp_path, capsys):
    src = tmp_path / "t.json"
    src.write_text(json.dumps({"nvars": 1, "polys": [[{"e": [2], "c": [1, 0]},
                                                      {"e": [0], "c": [-4, 0]}]]}))
    assert run(tmp_path, "solve", "--input", str(src)) == 0
    rs = RootSet.from_json((tmp_path / "roots.json").read_text())
    assert same_multiset(rs.coords(), [[2], [-2]], 1e-10)


def test_exit_parse_error(tmp_path, capsys):
    src = tmp_path / "bad.json"
    src.write_text(json.dumps({"polys": ["x1 +* 2"]}))
    assert run(tmp_path, "solve", "--input", str(src)) == 2
    assert capsys.readouterr().err.startswith("error: input:")


def test_exit_missing_file(tmp_path):
    assert run(tmp_path, "solve", "--input", str(tmp_path / "nope.json")) == 2


def test_exit_bad_tau(tmp_path):
    assert run(tmp_path, "solve", "--tau", "2", "--input", str(fixture_path("quadratic"))) == 2


def test_exit_nonzero_dimensional(tmp_path, capsys):
    src = tmp_path / "nzd.json"
    src.write_text(json.dumps({"polys": ["x1*x2 - 1", "2*x1*x2 - 2"]}))
    assert run(tmp_path, "solve", "--input", str(src)) == 3
    assert "nonzero-dimensional" in capsys.readouterr().err


def test_oracle_size_limit_is_input_error(tmp_path):
    assert run(tmp_path, "dump", "--stage", "bezout", "--oracle", "on",
               "--input", str(fixture_path("stress4"))) == 2


def test_runconfig_validation():
    with pytest.raises(InputError):
        RunConfig("x", "out", stage="nope")
    with pytest.raises(InputError):
        RunConfig("x", "out", tau=0.0)


def test_load_system_dict_and_multidegree():
    f = load_system({"polys": ["x1 + x2", "x1 - x2"], "multidegree": [2, 1]})
    assert list(f.multidegree) == [2, 1]
    with pytest.raises(InputError):
        load_system({"polys": []})


@pytest.mark.parametrize("stage", ["all", "roots"])
def test_determinism(tmp_path, stage):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert main(["dump", "--stage", stage, "--seed", "7", "--input",
                     str(fixture_path("example22")), "--out", str(d)]) == 0
    names = sorted(p.name for p in a.iterdir())
    assert names == sorted(p.name for p in b.iterdir())
    for n in names:
        assert (a / n).read_bytes() == (b / n).read_bytes()


def test_oracle_flag_same_roots(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    main(["solve", "--input", str(fixture_path("example22")), "--out", str(a)])
    main(["solve", "--oracle", "on", "--input", str(fixture_path("example22")), "--out", str(b)])
    ra = RootSet.from_json((a / "roots.json").read_text())
    rb = RootSet.from_json((b / "roots.json").read_text())
    assert same_multiset(ra.coords(), rb.coords(), 1e-8)


def test_dump_rank_stress(tmp_path):
    assert run(tmp_path, "dump", "--stage", "rank", "--input", str(fixture_path("stress4"))) == 0
    lines = (tmp_path / "rank.csv").read_text().splitlines()
    assert len(lines) == 1 + 384
    assert json.loads((tmp_path / "rank.json").read_text())["rank"] == 331


def test_console_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "bezout.cli", "solve", "--input",
                        str(fixture_path("quadratic")), "--out", str(tmp_path)],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "dim A = 2" in r.stdout
