import json
from pathlib import Path

import pytest

from ledgerforge.cli import main

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run(capsys, "--output", "json", *argv)
    return code, json.loads(out)


def test_bench_zero_and_default_prefix(capsys):
    code, rows = run_json(capsys, "bench", "--zeros", "0,1,2")
    assert code == 0
    assert rows[0]["nonce"] == 0 and rows[0]["attempts"] == 1
    assert [r["difficulty"] for r in rows] == [0, 1, 2]


def test_bench_cap_exceeded_is_domain_error(capsys):
    code, _ = run(capsys, "bench", "--zeros", "6", "--cap", "100")
    assert code == 1


def test_chain_build_verify_corrupt(tmp_path, capsys):
    path = tmp_path / "chain.jsonl"
    code, out = run_json(capsys, "--chain-file", str(path), "chain", "build", "--blocks", "5", "--difficulty", "2")
    assert code == 0 and out["written"] is False and not path.exists()
    code, out = run_json(capsys, "--chain-file", str(path), "chain", "build", "--blocks", "5", "--difficulty", "2", "--write")
    assert code == 0 and path.exists() and out["blocks"] == 6
    code, out = run_json(capsys, "chain", "verify", "--chain-file", str(path))
    assert code == 0 and out["ok"] is True

    lines = path.read_text().splitlines()
    obj = json.loads(lines[3])
    obj["transactions"][0]["amount"] += 1
    lines[3] = json.dumps(obj)
    path.write_text("\n".join(lines) + "\n")
    code, out = run_json(capsys, "chain", "verify", "--chain-file", str(path))
    assert code == 1
    assert out["ok"] is False and out["failure_index"] == 3


def test_chain_build_is_seed_reproducible(capsys):
    _, a = run_json(capsys, "--seed", "5", "chain", "build", "--blocks", "3", "--difficulty", "1")
    _, b = run_json(capsys, "chain", "build", "--blocks", "3", "--difficulty", "1", "--seed", "5")
    _, c = run_json(capsys, "--seed", "6", "chain", "build", "--blocks", "3", "--difficulty", "1")
    assert a["tip"] == b["tip"] != c["tip"]


def test_seed_env_fallback(monkeypatch, capsys):
    _, a = run_json(capsys, "--seed", "9", "chain", "build", "--blocks", "2", "--difficulty", "1")
    monkeypatch.setenv("LEDGERFORGE_SEED", "9")
    _, b = run_json(capsys, "chain", "build", "--blocks", "2", "--difficulty", "1")
    assert a["tip"] == b["tip"]


def test_chain_inspect_table(tmp_path, capsys):
    path = tmp_path / "c.jsonl"
    run(capsys, "--chain-file", str(path), "chain", "build", "--blocks", "2", "--difficulty", "1", "--write")
    code, out = run(capsys, "--chain-file", str(path), "chain", "inspect")
    assert code == 0
    header = out.splitlines()[0]
    for field in ("height", "previous hash", "block hash", "merkle root", "timestamp", "size", "nonce", "txs"):
        assert field in header


def test_missing_chain_file(tmp_path, capsys):
    code, _ = run(capsys, "--chain-file", str(tmp_path / "nope.jsonl"), "chain", "verify")
    assert code == 1


def test_mint_demo(capsys):
    code, out = run_json(capsys, "mint", "demo")
    assert code == 0
    assert [e.get("error") for e in out["transcript"]].count("DoubleSpend") == 1


def test_pos_draw_golden(capsys):
    code, out = run_json(capsys, "pos", "draw", "--rounds", "100000")
    assert code == 0
    b = next(v for v in out["validators"] if v["validator"] == "B")
    assert b["selected"] == 75142


def test_pos_draw_from_file(tmp_path, capsys):
    p = tmp_path / "stakes.json"
    p.write_text(json.dumps([{"address": "11" * 20, "stake": 2}, {"address": "22" * 20, "stake": 0}]))
    code, out = run_json(capsys, "pos", "draw", "--stakes", str(p), "--rounds", "50")
    assert code == 0
    counts = {v["address"]: v["selected"] for v in out["validators"]}
    assert counts == {"11" * 20: 50, "22" * 20: 0}


def test_bgp_scenarios(capsys):
    code, out = run_json(capsys, "bgp", "--scenario", "b")
    assert code == 0
    assert out["accusations"] == {"1": [0], "2": [0]}
    assert out["decisions"] == {"1": "RETREAT", "2": "RETREAT"}
    code, out = run_json(capsys, "bgp", "--scenario", "a")
    assert out["accusations"]["1"] == [2]
    code, out = run_json(capsys, "bgp", "--scenario", "custom", "--n", "7", "--traitors", "0,3",
                         "--strategy", "split-orders,sign-garbage", "--guard", "classic")
    assert code == 0 and out["agreement"] is True


def test_bgp_guard_violation(capsys):
    code, _ = run(capsys, "bgp", "--scenario", "custom", "--n", "4", "--traitors", "1,2")
    assert code == 1


def test_sim_run_and_events(tmp_path, capsys):
    events = tmp_path / "events.jsonl"
    report = tmp_path / "report.json"
    code, out = run_json(capsys, "sim", "run", "--config", str(CONFIGS / "reference.json"),
                         "--events", str(events), "--report", str(report))
    assert code == 0
    assert out["incentives"]["reconciles"] is True
    assert json.loads(report.read_text())["converged"] is True
    assert all(json.loads(line) for line in events.read_text().splitlines())


def test_usage_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["bogus"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["bench", "--zeros", "x"])
    assert exc.value.code == 2
