import json
import math
import os

import pytest

from nterm.cli import _parse_n_list, main
from nterm.sequences import Sequence


@pytest.fixture
def seqfile(tmp_path):
    def make(name, entries, kind="integer"):
        path = tmp_path / name
        Sequence(entries, kind).to_csv(path)
        return str(path)

    return make


def test_parse_n_list():
    assert _parse_n_list("1,2,3") == [1, 2, 3]
    assert _parse_n_list("1..5") == [1, 2, 3, 4, 5]
    # ellipsis is geometric when the leading ratio is an exact integer >= 2
    assert _parse_n_list("2,4,...,32") == [2, 4, 8, 16, 32]
    assert _parse_n_list("2,4,...,1024") == [2**k for k in range(1, 11)]
    assert _parse_n_list("5,8,...,17") == [5, 8, 11, 14, 17]


def test_norm_lp(seqfile, capsys):
    path = seqfile("s.csv", {1: 3.0, 2: 4.0})
    assert main(["norm", "lp:2", path]) == 0
    assert float(capsys.readouterr().out.strip()) == 5.0


def test_norm_bmo_tree(tmp_path, capsys):
    from nterm.indices import interval

    tree = Sequence({interval(j, k): 1.0 for j in range(4) for k in range(2**j)},
                    "interval")
    path = tmp_path / "tree.csv"
    tree.to_csv(path)
    assert main(["norm", "bmo:2", str(path)]) == 0
    assert float(capsys.readouterr().out.strip()) == pytest.approx(2.0)


def test_norm_lorentz_seq(seqfile, capsys):
    path = seqfile("ind4.csv", {k: 1.0 for k in range(1, 5)})
    assert main(["norm", "lorentz-seq", "pow:0.5,0", "inf", path]) == 0
    assert float(capsys.readouterr().out.strip()) == 2.0


def test_profile_output(seqfile, capsys):
    path = seqfile("t.csv", {1: 3.0, 2: 2.0, 3: 1.0})
    assert main(["profile", "lp:2", path, "sigma", "3"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "N,value,exact_flag"
    values = [float(line.split(",")[1]) for line in lines[1:]]
    assert values == pytest.approx([math.sqrt(14), math.sqrt(5), 1.0, 0.0])


def test_profile_e1(seqfile, capsys):
    path = seqfile("e1.csv", {1: 1.0})
    assert main(["profile", "lp:2", path, "sigma"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert [float(l.split(",")[1]) for l in lines[1:]] == [1.0, 0.0]


def test_exit_codes(seqfile, tmp_path, capsys):
    path = seqfile("s.csv", {1: 1.0, 2: 2.0})
    assert main(["norm", "xx:2", path]) == 2
    big = seqfile("big.csv", {k: float(k) for k in range(1, 40)})
    # cap exceeded: feasibility exit code, distinct from parse errors
    assert main(["profile", "lp:2", big, "sigma", "--method", "exact"]) == 3
    assert main(["democracy", "--space", "lp:2", "--N", "10", "--strategy",
                 "exhaustive"]) == 3
    bad = tmp_path / "bad.csv"
    bad.write_text("index,coefficient\n1,abc\n")
    assert main(["norm", "lp:2", str(bad)]) == 2


def test_aspace_command(seqfile, capsys):
    path = seqfile("s.csv", {1: 1.0, 2: 1.0})
    assert main(["aspace", "lp:1", path, "--alpha", "1", "--q", "inf"]) == 0
    assert float(capsys.readouterr().out.strip()) == pytest.approx(3.0)


def test_democracy_command(capsys):
    assert main(["democracy", "--space", "lp:2", "--N", "1..4"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "N,h_ell,h_r,method,bound_direction"
    row = lines[2].split(",")
    assert float(row[1]) == pytest.approx(math.sqrt(2))


def test_outputs_and_manifest_determinism(tmp_path, capsys):
    out1, out2 = str(tmp_path / "a"), str(tmp_path / "b")
    for out in (out1, out2):
        assert main(["--out-dir", out, "--seed", "3", "democracy",
                     "--space", "lpq:2,4", "--N", "2,4,8"]) == 0
        capsys.readouterr()
    csv1 = open(os.path.join(out1, "democracy.csv")).read()
    csv2 = open(os.path.join(out2, "democracy.csv")).read()
    assert csv1 == csv2  # byte-identical rerun
    man = json.load(open(os.path.join(out1, "democracy_manifest.json")))
    assert man["seed"] == 3
    assert man["params"]["space"] == "lpq:2,4"
    assert "manifest_hash" in man
    summary = json.load(open(os.path.join(out1, "democracy_summary.json")))
    assert summary["manifest_hash"] == man["manifest_hash"]


def test_experiment_unknown_name(capsys):
    assert main(["experiment", "frobnicate"]) == 2


def test_experiment_stechkin(tmp_path, capsys):
    out = str(tmp_path / "o")
    assert main(["--out-dir", out, "experiment", "stechkin", "--alpha", "0.5",
                 "--q", "1", "--trials", "10", "--support", "16"]) == 0
    res = json.loads(capsys.readouterr().out)
    assert res["band"] <= 10.0
    assert os.path.exists(os.path.join(out, "stechkin_summary.json"))


def test_experiment_nonlinear_smoke(capsys):
    assert main(["experiment", "nonlinear", "--p", "2", "--q", "1",
                 "--alpha", "1", "--K", "5000"]) == 0
    res = json.loads(capsys.readouterr().out)
    assert res["counts_match_inequality"] is True


def test_experiment_democracy_config_file(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"space": "lp:2", "N": "1,2,4", "strategy": "structured"}))
    assert main(["experiment", "democracy", "--config", str(cfg)]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 4


def test_format_json(seqfile, capsys):
    path = seqfile("s.csv", {1: 3.0, 2: 4.0})
    assert main(["--format", "json", "norm", "lp:2", path]) == 0
    assert json.loads(capsys.readouterr().out)["value"] == 5.0
    assert main(["--format", "json", "profile", "lp:2", path, "sigma"]) == 0
    rows = json.loads(capsys.readouterr().out)
    assert rows[0]["N"] == 0 and rows[-1]["value"] == 0.0
    assert main(["--format", "json", "democracy", "--space", "lp:2",
                 "--N", "1,2"]) == 0
    rows = json.loads(capsys.readouterr().out)
    assert rows[1]["h_r"] == pytest.approx(2**0.5)
