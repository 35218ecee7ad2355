import json

import pytest

from ktuple import cli


@pytest.fixture
def run(cache_dir, capsys):
    def go(*argv):
        code = cli.main(["--cache", str(cache_dir), *argv])
        out = capsys.readouterr()
        return code, out.out, out.err

    return go


def test_help_lists_subcommands(capsys):
    with pytest.raises(SystemExit) as e:
        cli.main(["--help"])
    assert e.value.code == 0
    text = capsys.readouterr().out
    for name in ("primes", "arith", "tuples", "singular", "gpy", "maynard", "bv", "expsum", "suite"):
        assert name in text


def test_primes(run):
    code, out, _ = run("primes", "1e5")
    assert code == 0
    assert json.loads(out)[0]["value"]["pi"] == 9592


def test_contract_error_exit_code(run):
    code, _, err = run("primes", "1")
    assert code == 2 and "error" in err


def test_tuples_check(run):
    code, out, _ = run("tuples", "check", "0,2,4")
    v = json.loads(out)[0]["value"]
    assert code == 0 and v["obstructions"] == [3] and not v["admissible"]


def test_tuples_search_with_witness_and_time_limit(run, tmp_path):
    from ktuple.tuples import TUPLE_50

    w = tmp_path / "w.txt"
    w.write_text(",".join(map(str, TUPLE_50)))
    code, out, _ = run("tuples", "search", "50", "--budget", "246", "--witness", str(w), "--time-limit", "0.5")
    item = json.loads(out)[0]
    assert code == 2
    assert item["value"]["best_width"] == 246 and item["error"]


def test_singular(run):
    code, out, _ = run("singular", "0,2")
    assert abs(json.loads(out)[0]["value"]["value"] - 1.3203236316) < 1e-9


def test_predict_csv(run):
    code, out, _ = run("--format", "csv", "predict", "0,2", "--x", "1e4,1e5")
    lines = out.strip().splitlines()
    assert lines[0] == "x,actual,pred_pow,pred_integral,ratio"
    assert lines[2].startswith("100000,1224,")


def test_gpy(run):
    code, out, _ = run("gpy", "check", str(863**2), "431", "2/863")
    assert json.loads(out)[0]["value"]["holds"] is True
    code, out, _ = run("gpy", "rho", "5", "0")
    assert json.loads(out)[0]["value"]["rho"] == "5/3"
    code, _, _ = run("gpy", "check", "5", "1", "1/2")
    assert code == 2


def test_maynard_rho(run):
    code, out, _ = run("maynard", "rho", "5", "--coeffs", "70,-49,-75,83,-34", "--basis", "P1P2,P1^2,P2,P1,1")
    assert json.loads(out)[0]["value"]["rho"] == "1417255/708216"


def test_maynard_opt_table(run):
    code, out, _ = run("--format", "table", "maynard", "opt", "5", "--degree", "3")
    assert code == 0 and "maynard.optimize_rho" in out


def test_bv_csv(run):
    code, out, _ = run("--format", "csv", "bv", "1e5", "--Q", "6")
    assert code == 0 and len(out.strip().splitlines()) == 7


def test_expsum(run):
    code, out, _ = run("expsum", "7", "--a", "0", "--c", "1")
    assert abs(complex(*json.loads(out)[0]["value"]["S"])) < 1e-12
    code, out, _ = run("expsum", "255255", "--interval", "0,142", "--split", "17")
    assert json.loads(out)[0]["value"]["path"] == "trivial"


def test_arith_check(run):
    code, out, _ = run("arith", "--check", "--check-n", "2000")
    assert code == 0 and json.loads(out)[0]["passed"] is True


def test_suite_only_and_determinism(run, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    code1, _, _ = run("suite", "--only", "singular,2", "--out", str(a))
    code2, _, _ = run("suite", "--only", "singular,2", "--out", str(b))
    assert code1 == code2 == 0
    assert a.read_bytes() == b.read_bytes()
    names = [e["name"] for e in json.loads(a.read_text())]
    assert names == ["C01_twin_prime_constant", "C02_maynard_k5_exact", "C09_circle_method"]


def test_suite_failure_exit_code(run, monkeypatch):
    from ktuple import suite

    fake = suite.Criterion(99, "always_fails", "gpy", "noop", 1, lambda ctx: (False, {}, {}))
    monkeypatch.setattr(suite, "CRITERIA", [fake])
    code, out, _ = run("suite")
    assert code == 1 and json.loads(out)[0]["passed"] is False


def test_suite_resource_error_marker(run, monkeypatch):
    from ktuple import suite
    from ktuple.errors import ResourceError

    def boom(ctx):
        raise ResourceError("too big")

    monkeypatch.setattr(suite, "CRITERIA", [suite.Criterion(98, "boom", "gpy", "noop", 1, boom)])
    code, out, _ = run("suite")
    item = json.loads(out)[0]
    assert code == 1 and item["passed"] is False and "ResourceError" in item["error"]
