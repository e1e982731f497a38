"""End-to-end checks of the hamlink CLI (subprocess level)."""

import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

CLI = os.environ.get("HAMLINK_CLI")

pytestmark = pytest.mark.skipif(not CLI, reason="HAMLINK_CLI not set")


def run(*args, **kw):
    return subprocess.run([CLI, *args], capture_output=True, text=False, **kw)


def test_analyze_json_fields():
    proc = run("analyze", "--format", "json")
    assert proc.returncode == 0
    report = json.loads(proc.stdout)
    assert report["schema_version"] == 1
    assert abs(report["error_probs"]["p0"] - 0.718) < 5e-4
    assert abs(report["cost_per_packet"]["protocol"] - 191.5) < 0.05
    assert abs(report["total_cost"]["protocol"] - 49049) < 50
    assert abs(report["total_cost"]["baseline"] - 140491) < 150
    assert report["xor_burden"]["ops_per_block"] == 491520
    assert report["xor_burden"]["ops_per_sec"] == 251658240.0


def test_analyze_zero_ber():
    proc = run("analyze", "--ber", "0", "--format", "json")
    assert proc.returncode == 0
    report = json.loads(proc.stdout)
    assert report["cost_per_packet"]["protocol"] == 0.0
    assert report["total_cost"]["protocol"] == 0.0


def test_usage_error_exit_code():
    proc = run("analyze", "--format", "xml")
    assert proc.returncode == 2
    proc = run("bogus-subcommand")
    assert proc.returncode == 2


def test_encode_decode_round_trip(tmp_path: Path):
    src = tmp_path / "input.bin"
    container = tmp_path / "frames.hlf"
    out = tmp_path / "output.bin"
    payload = os.urandom(20000)
    src.write_bytes(payload)

    assert run("encode", str(src), "--out", str(container)).returncode == 0
    assert run("decode", str(container), "--out", str(out)).returncode == 0
    assert out.read_bytes() == payload


def test_decode_with_flips(tmp_path: Path):
    src = tmp_path / "input.bin"
    container = tmp_path / "frames.hlf"
    out = tmp_path / "output.bin"
    payload = os.urandom(9000)
    src.write_bytes(payload)
    run("encode", str(src), "--out", str(container))

    flips = []
    frames = (container.stat().st_size - 8) // 4136
    for i in range(frames):
        flips += ["--flip", f"{i}:{320 + 17 * i}"]
    proc = run("decode", str(container), "--out", str(out), *flips)
    assert proc.returncode == 0
    assert out.read_bytes() == payload
    assert b"corrected" in proc.stderr

    proc = run("decode", str(container), "--out", str(out), "--flip", "0:400", "--flip", "0:500")
    assert proc.returncode == 3
    assert b"uncorrectable" in proc.stderr


def test_simulate_small_campaign(tmp_path: Path):
    proc = run(
        "simulate", "--bytes", "20000", "--seeds", "1,2", "--max-retries", "64",
        "--format", "json",
    )
    assert proc.returncode == 0
    report = json.loads(proc.stdout)
    assert report["schema_version"] == 1
    assert len(report["rows"]) == 2
    assert all(row["delivered_ok"] for row in report["rows"])

    proc = run("simulate", "--bytes", "5000", "--seeds", "1", "--loss", "1.0")
    assert proc.returncode == 4


def test_trace_jsonl(tmp_path: Path):
    proc = run("trace", "--bytes", "5000", "--seed", "3", "--ber", "1e-4", "--max-retries", "64")
    assert proc.returncode == 0
    lines = proc.stdout.decode().strip().splitlines()
    assert len(lines) > 4
    events = [json.loads(line) for line in lines]
    assert all("tick" in ev and "node" in ev and "event" in ev for ev in events)
    kinds = {ev.get("kind") for ev in events}
    assert "DATA" in kinds and "ACK" in kinds


def test_config_file_and_env(tmp_path: Path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"ber": 0.0, "bytes": 4321}))
    env = dict(os.environ, HAMLINK_CONFIG=str(cfg))
    proc = subprocess.run(
        [CLI, "analyze", "--format", "json"], capture_output=True, env=env
    )
    assert proc.returncode == 0
    report = json.loads(proc.stdout)
    assert report["params"]["transfer_bytes"] == 4321
    assert report["cost_per_packet"]["protocol"] == 0.0

    # explicit flag overrides the file value
    proc = subprocess.run(
        [CLI, "analyze", "--ber", "1e-5", "--format", "json"], capture_output=True, env=env
    )
    report = json.loads(proc.stdout)
    assert abs(report["cost_per_packet"]["protocol"] - 191.5) < 0.05
