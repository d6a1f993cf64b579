import csv
import json
import os

import numpy as np

from cnkit.cli import load_sieve, main, save_sieve
from cnkit.numtheory import sieve_init


def run(args, capsys):
    code = main(args)
    out = capsys.readouterr().out
    return code, out


def test_alpha_table(capsys):
    code, out = run(["alpha", "--k-max", "4"], capsys)
    assert code == 0
    rows = list(csv.DictReader(out.splitlines()))
    table = {int(r["k"]): float(r["alpha"]) for r in rows}
    assert 0.8388 < table[1] < 0.8389
    assert abs(table[0] / table[1] - 0.5) < 1e-12


def test_verify_small(capsys):
    code, out = run(["verify", "--max-n", "2000"], capsys)
    assert code == 0
    assert out.splitlines()[0] == "n,row,sum_value,det_value,matrix"
    assert len(out.splitlines()) == 1  # no mismatches streamed


def test_verify_n1(capsys):
    code, _ = run(["verify", "--max-n", "1"], capsys)
    assert code == 0


def test_verify_unwritable_out(capsys):
    code = main(["verify", "--max-n", "100", "--out", "/nonexistent-dir/x.csv"])
    assert code == 2


def test_certify_schema(capsys):
    code, out = run(["certify", "--residue", "5", "--max-n", "40"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "n,residue,row,selmer_rank3,L_value"
    assert [line.split(",")[0] for line in lines[1:]] == ["5", "13", "21", "29", "37"]


def test_simulate_deterministic(tmp_path, capsys):
    args = ["simulate", "--row", "5a", "--r", "10", "--samples", "3000", "--seed", "7"]
    p1, p2 = str(tmp_path / "a.csv"), str(tmp_path / "b.csv")
    assert main(args + ["--out", p1]) == 0
    assert main(args + ["--workers", "3", "--out", p2]) == 0
    assert open(p1, "rb").read() == open(p2, "rb").read()
    with open(p1) as fh:
        rows = list(csv.DictReader(fh))
    assert rows[0]["corank"] == "1"
    assert sum(int(r["count"]) for r in rows) == 3000


def test_csv_json_same_values(tmp_path):
    base = ["simulate", "--row", "7a", "--r", "8", "--samples", "1000", "--seed", "3"]
    pc, pj = str(tmp_path / "x.csv"), str(tmp_path / "x.json")
    assert main(base + ["--format", "csv", "--out", pc]) == 0
    assert main(base + ["--format", "json", "--out", pj]) == 0
    with open(pc) as fh:
        crows = list(csv.DictReader(fh))
    doc = json.load(open(pj))
    assert doc["meta"]["seed"] == 3
    assert len(doc["rows"]) == len(crows)
    for cr, jr in zip(crows, doc["rows"]):
        assert int(cr["corank"]) == jr["corank"]
        assert int(cr["count"]) == jr["count"]
        assert cr["frequency"] == repr(jr["frequency"])


def test_scan_json_meta(capsys):
    code, out = run(
        ["scan", "--residue", "6", "--max-n", "2000", "--format", "json"], capsys
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["meta"]["version"]
    assert doc["meta"]["seed"] is None
    metrics = {r["metric"]: r for r in doc["rows"]}
    assert metrics["identity_mismatches"]["count"] == 0
    assert 0 <= metrics["rank3"]["frequency"] <= 1
    assert metrics["rank3"]["ci_low"] <= metrics["rank3"]["frequency"]


def test_scan_worker_byte_identity(tmp_path):
    base = ["scan", "--residue", "5", "--max-n", str(2 * (1 << 16))]
    p1, p2 = str(tmp_path / "w1.csv"), str(tmp_path / "w2.csv")
    assert main(base + ["--workers", "1", "--out", p1]) == 0
    assert main(base + ["--workers", "2", "--out", p2]) == 0
    assert open(p1, "rb").read() == open(p2, "rb").read()


def test_markov_chains(capsys):
    code, out = run(["markov", "--chain", "classrank", "--k-max", "16"], capsys)
    assert code == 0
    rows = list(csv.DictReader(out.splitlines()))
    gap = max(abs(float(r["probability"]) - float(r["closed_form"])) for r in rows[:8])
    assert gap < 1e-6
    code, out = run(["markov", "--chain", "even", "--k-max", "32"], capsys)
    assert code == 0


def test_classcheck(capsys):
    code, out = run(["classcheck", "--max-n", "300"], capsys)
    assert code == 0
    assert out.splitlines()[0] == "n,redei_g,four_rank,class_number"
    assert len(out.splitlines()) == 1


def test_verify_mismatch_exits_one(capsys, monkeypatch):
    # force a failing row to exercise the mismatch stream and exit code
    import cnkit.cli as cli
    from cnkit.lfun import RowCheck

    real = cli.verify_rows

    def sabotaged(f, cache, twist=None):
        out = real(f, cache, twist)
        if f.n == 33:
            out["1"] = RowCheck(sum_value=1, det_value=0)
        return out

    monkeypatch.setattr(cli, "verify_rows", sabotaged)
    code, out = run(["verify", "--max-n", "50"], capsys)
    assert code == 1
    lines = out.splitlines()
    assert len(lines) == 2
    assert lines[1].startswith("33,1,1,0,")  # n, row, sum, det, matrix dump


def test_classcheck_disagreement_exits_one(capsys, monkeypatch):
    import cnkit.cli as cli

    monkeypatch.setattr(cli, "redei_g", lambda f: 0)
    code, out = run(["classcheck", "--max-n", "30"], capsys)
    assert code == 1
    assert len(out.splitlines()) > 1


def test_bad_arguments(capsys):
    assert main(["nonsense"]) == 3
    assert main(["simulate", "--row", "9q", "--samples", "10"]) == 3
    assert main(["scan", "--residue", "4", "--max-n", "100"]) == 3
    assert main(["markov", "--chain", "even", "--k-max", "2"]) == 3


def test_sieve_cache_roundtrip(tmp_path, monkeypatch, capsys):
    path = str(tmp_path / "sieve.bin")
    sieve = sieve_init(5000)
    save_sieve(sieve, path)
    loaded = load_sieve(path)
    assert loaded is not None
    assert loaded.limit == 5000
    assert np.array_equal(loaded.spf, sieve.spf)
    # header versioning: corrupt magic is rejected
    with open(path, "r+b") as fh:
        fh.write(b"XX")
    assert load_sieve(path) is None
    # end-to-end through the env variable
    path2 = str(tmp_path / "cache2.bin")
    monkeypatch.setenv("CNKIT_SIEVE_CACHE", path2)
    code, _ = run(["verify", "--max-n", "500"], capsys)
    assert code == 0
    assert os.path.exists(path2)
    code, _ = run(["verify", "--max-n", "400"], capsys)  # reuses larger cache
    assert code == 0
