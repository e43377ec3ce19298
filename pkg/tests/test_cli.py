import json

import pytest

from oigpac.cli import main
from oigpac.reduction import validation_size


@pytest.fixture
def files(tmp_path):
    (tmp_path / "thr.txt").write_text("4\n++++\n-+++\n--++\n---+\n----\n")
    (tmp_path / "single.txt").write_text("3\n+-+\n")
    (tmp_path / "s.txt").write_text("0 -\n1 -\n2 +\n")
    (tmp_path / "one.txt").write_text("1\n+\n-\n")
    (tmp_path / "d.csv").write_text("0,+,3,4\n0,-,1,4\n")
    return tmp_path


def run(tmp_path, *argv, out="out"):
    code = main(["--out", str(tmp_path / out), *map(str, argv)])
    summary = json.loads((tmp_path / out / "results.json").read_text()) if code != 2 else None
    return code, summary


def test_verify_lemma4(files):
    code, summary = run(files, "verify", "lemma4", "--n", 3, "--trials", 20, "--seed", 7)
    assert code == 0 and summary["pass"] is True
    assert (files / "out" / "results.csv").read_text().startswith("n,instance")


def test_missing_class_file(files, capsys):
    code, _ = run(files, "oig", "agnostic", "--class", files / "nope.txt", "--sample", files / "s.txt")
    assert code == 2
    err = capsys.readouterr().err.strip().splitlines()
    assert len(err) == 1 and json.loads(err[0])["error"] == "InputError"


def test_bad_flag_is_input_error(files, capsys):
    assert main(["verify", "nothing"]) == 2
    assert "error" in json.loads(capsys.readouterr().err)


def test_rademacher_singleton(files):
    code, summary = run(files, "rademacher", "--class", files / "single.txt", "--sample", files / "s.txt")
    assert code == 0 and summary["exact"] == "0"


def test_oig_and_density(files):
    code, summary = run(files, "oig", "realizable", "--class", files / "thr.txt", "--sample", files / "s.txt")
    assert code == 0 and summary["t_star"] == 1 and summary["transductive_error"] == "1/3"
    code, summary = run(files, "oig", "agnostic", "--class", files / "thr.txt", "--sample", files / "s.txt")
    assert code == 0 and summary["phi_full"] == "1"
    code, summary = run(files, "density", "--class", files / "thr.txt", "--sample", files / "s.txt")
    assert summary["max_phi"] == summary["phi_full"] and summary["maximum_at_full_cube"]
    code, summary = run(files, "identity", "--class", files / "thr.txt", "--sample", files / "s.txt")
    assert summary["equal"]


def test_failing_check_exits_one(files):
    code, summary = run(files, "verify", "symmetrize", "--n", 2)
    assert code == 1 and summary["pass"] is False


def test_bounds(files):
    code, summary = run(files, "bounds", "--which", "mazuma", "--mu", 3 * 0.6931471805599453, "--delta-mult", 1, "--c", 1)
    assert summary["probability_bound"] == pytest.approx(0.5)
    assert run(files, "bounds", "--which", "azuma", "--k", 3)[0] == 2


def test_config_and_flag_precedence(files):
    cfg = files / "cfg.json"
    cfg.write_text(json.dumps({"n": 2, "trials": 3, "seed": 1}))
    _, a = run(files, "--config", cfg, "verify", "lemma4", "--trials", 5)
    _, b = run(files, "verify", "lemma4", "--n", 2, "--trials", 5, "--seed", 1, out="out2")
    assert a == b
    cfg.write_text(json.dumps({"bogus": 1}))
    assert run(files, "--config", cfg, "verify", "lemma4")[0] == 2


def test_reduce_and_byte_identical(files):
    args = ("reduce", "--mode", "agnostic", "--class", files / "one.txt", "--dist", files / "d.csv",
            "--n", 1024, "--trials", 3, "--seed", 4)
    code, summary = run(files, *args)
    assert code == 0 and summary["epsilon_ag"] == 0.5
    assert summary["k"] == 384 and summary["k_val"] == validation_size(384, 0.1, 0.5)
    run(files, *args, out="again")
    for name in ("results.json", "results.csv"):
        assert (files / "out" / name).read_bytes() == (files / "again" / name).read_bytes()


def test_reduce_realizable(files):
    code, summary = run(files, "reduce", "--mode", "realizable", "--class", files / "thr.txt", "--dist", files / "d.csv",
                        "--n", 10, "--trials", 3)
    assert code == 2  # that distribution is not realizable by thresholds
    (files / "r.csv").write_text("0,-,1,2\n3,+,1,2\n")
    code, summary = run(files, "reduce", "--mode", "realizable", "--class", files / "thr.txt", "--dist", files / "r.csv",
                        "--n", 10, "--trials", 3)
    assert code == 0 and summary["k"] == 90 and summary["failure_rate"] == 0


def test_sweep(files):
    code, summary = run(files, "sweep", "--class", files / "thr.txt", "--n-max", 5, "--orient")
    assert code == 0 and summary["rows"] == 5
    assert "t_star" in (files / "out" / "results.csv").read_text().splitlines()[0]
