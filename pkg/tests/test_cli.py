import io
import json

import pytest

from pfacomplexity.cli import run
from pfacomplexity.core import identity_pfa

from conftest import wit0110


def call(capsys, *argv):
    code = run(list(argv))
    lines = [json.loads(s) for s in capsys.readouterr().out.splitlines() if s.strip()]
    return code, lines[-1] if lines else None


@pytest.fixture
def pfa_file(tmp_path):
    p = tmp_path / "w.json"
    p.write_text(json.dumps(wit0110().to_json()))
    return str(p)


def test_gap_and_rho(capsys, pfa_file):
    assert call(capsys, "gap", "--pfa", pfa_file, "--word", "0110") == (0, {"word": "0110", "gap": "1/16"})
    code, out = call(capsys, "rho", "--pfa", pfa_file, "--word", "0110")
    assert code == 0 and out["rho"] == "1/2"


def test_gap_from_stdin(capsys, monkeypatch):
    monkeypatch.setattr("sys.stdin", io.StringIO(json.dumps(wit0110().to_json())))
    assert call(capsys, "gap", "--pfa", "-", "--word", "01110")[1]["gap"] == "1/32"


def test_classical(capsys):
    assert call(capsys, "ad", "--word", "0110")[1]["value"] == 4
    assert call(capsys, "an", "--word", "0001101")[1]["value"] == 4


def test_classify_and_witness(capsys, tmp_path):
    assert call(capsys, "classify2", "--word", "0100") == (0, {"classified": False})
    code, out = call(capsys, "classify2", "--word", "0110")
    assert code == 0 and out["classified"]
    code, bundle = call(capsys, "witness2", "--word", "0110")
    assert code == 0 and bundle["verified_up_to"] == 12
    f = tmp_path / "b.json"
    f.write_text(json.dumps(bundle))
    code, out = call(capsys, "witnessed-lang", "--ifs", str(f), "--length", "6", "--tail")
    assert code == 0 and "0110" in out["words"] and out["tail"]["status"] == "match"
    code, out = call(capsys, "trace", "--ifs", str(f), "--length", "4")
    assert code == 0 and len(out["trace"]) >= 4
    assert call(capsys, "witness2", "--word", "0100")[0] == 2


def test_ap_delta(capsys):
    assert call(capsys, "ap-delta", "--word", "000000", "--delta", "0.9")[1]["value"] == 2
    assert call(capsys, "ap-delta", "--word", "0110", "--delta", "0")[0] == 2
    code, out = call(capsys, "ap-delta", "--word", "0110", "--delta", "0.18", "--budget", "200")
    assert code == 3 and out["undetermined"]


def test_gamma_and_search(capsys):
    code, out = call(capsys, "gamma", "--k", "2", "--word", "000")
    assert code == 0 and out["lb"] == "1"
    code, out = call(capsys, "semidecide", "--word", "0100", "--k", "2", "--progress")
    assert code == 0 and out["outcome"] == "Exhausted"
    assert call(capsys, "ap-bound", "--word", "0110")[1]["k"] == 2


def test_transforms(capsys, pfa_file, tmp_path):
    # reversal needs doubly stochastic matrices, which the fixture lacks
    assert call(capsys, "reverse", "--pfa", pfa_file)[0] == 2
    ds = tmp_path / "ds.json"
    ds.write_text(json.dumps(identity_pfa(2, 2, eta=(1, 0)).to_json()))
    assert call(capsys, "reverse", "--pfa", str(ds))[0] == 0
    code, out = call(capsys, "drop-prefix", "--pfa", pfa_file, "--prefix", "0")
    assert code == 0 and out["pi"] != wit0110().to_json()["pi"]
    nfa = tmp_path / "n.json"
    code, out = call(capsys, "an", "--word", "0101")
    nfa.write_text(json.dumps(out))
    assert call(capsys, "nfa2pfa", "--nfa", str(nfa))[0] == 0


def test_blackbox(capsys, pfa_file):
    code, out = call(capsys, "blackbox", "--pfa", pfa_file, "--word", "0110", "--delta", "1/32",
                     "--margin", "1/32", "--seed", "3")
    assert code == 0 and out["verdict"] in ("GapExceeds", "NotExceeds") and out["plan"]["N"] == 13185


def test_bad_input_exit_codes(capsys, pfa_file):
    assert call(capsys, "gap", "--pfa", pfa_file, "--word", "01a0")[0] == 2
    assert call(capsys, "gap", "--pfa", pfa_file, "--word", "0110", "--budget", "3")[0] == 3


def test_store_round_trip(capsys, pfa_file, tmp_path):
    store = str(tmp_path / "s.jsonl")
    assert call(capsys, "store", "add", "--store", store, "--word", "0110", "--pfa", pfa_file)[0] == 0
    code, out = call(capsys, "store", "list", "--store", store)
    rec = out["records"][0]
    f = tmp_path / "rec.json"
    f.write_text(json.dumps(rec))
    # the stored witness piped back through gap reproduces the stored gap
    assert call(capsys, "gap", "--pfa", str(f), "--word", rec["word"])[1]["gap"] == rec["exact_gap"]
    assert call(capsys, "store", "verify", "--store", store) == (0, {"ok": True, "problems": []})
    with open(store, "a") as fh:
        fh.write("{}\n")
    assert call(capsys, "store", "verify", "--store", store)[0] == 2
