"""Smoke tests for the python bindings."""

import math
import os
import random

import pytest

import hamlink


def test_block_codec_round_trip():
    assert hamlink.data_capacity(7) == 120
    assert hamlink.data_capacity(15) == 32752
    data = bytes(random.Random(1).randrange(256) for _ in range(15))
    block = hamlink.encode_block(data, 7)
    assert len(block) == 16
    outcome, repaired, decoded = hamlink.decode_block(block, 7)
    assert outcome["kind"] == "clean"
    assert decoded == data
    assert repaired == block
    s, parity, ops = hamlink.syndrome_block(block, 7)
    assert (s, parity) == (0, 0)
    assert ops == 7 * 128


def test_block_codec_corrects_one_flip():
    data = bytes(range(15))
    block = bytearray(hamlink.encode_block(data, 7))
    block[5] ^= 0x20  # wire bit 42
    outcome, repaired, decoded = hamlink.decode_block(bytes(block), 7)
    assert outcome["kind"] == "corrected"
    assert outcome["position"] == 42
    assert decoded == data


def test_pedagogical_order_is_cpp_only():
    with pytest.raises(ValueError):
        hamlink.encode_block(b"\x00", 4)


def test_frame_round_trip_with_flip():
    l2 = hamlink.L2Header()
    l2.dst = bytes.fromhex("020000000002")
    l2.src = bytes.fromhex("020000000001")
    l3 = hamlink.L3Header()
    l3.src_ip = bytes([10, 0, 0, 1])
    l3.dst_ip = bytes([10, 0, 0, 2])
    l3.id = 7
    l3.ttl = 16
    content = bytes(random.Random(2).randrange(256) for _ in range(4094))
    wire = hamlink.build_data_frame(l2, l3, content)
    assert len(wire) == 4136
    assert wire[:8] == b"\x55" * 7 + b"\xd5"

    fields, outcomes = hamlink.parse_frame(wire)
    assert fields["kind"] == "DATA"
    assert fields["content"] == content
    assert all(o["kind"] == "clean" for o in outcomes)

    damaged = bytearray(wire)
    damaged[100] ^= 0x01
    fields2, outcomes2 = hamlink.parse_frame(bytes(damaged))
    assert fields2["content"] == content
    assert any(o["kind"] == "corrected" for o in outcomes2)


def test_channel_determinism_and_exemption():
    wire = bytes(range(256)) * 4
    a = hamlink.Channel(ber=1e-3, loss=0.0, seed=5)
    b = hamlink.Channel(ber=1e-3, loss=0.0, seed=5)
    out_a = a.transmit(wire)
    out_b = b.transmit(wire)
    assert out_a == out_b
    assert out_a[:8] == wire[:8]

    lossy = hamlink.Channel(ber=0.0, loss=1.0, seed=5)
    assert lossy.transmit(wire) is None


def test_model_reference_numbers():
    p0, p1, p2 = hamlink.error_probs(33088, 1e-5)
    assert math.isclose(p0, 0.718, abs_tol=5e-4)
    assert math.isclose(p1, 0.238, abs_tol=5e-4)
    assert math.isclose(p2, 0.044, abs_tol=5e-4)

    protocol, baseline = hamlink.expected_costs(1e-5)
    assert math.isclose(protocol, 191.5, abs_tol=0.05)
    assert math.isclose(baseline, 198.3, abs_tol=0.1)

    report = hamlink.transfer_cost(ber=1e-5, transfer_bytes=1048576)
    assert math.isclose(report["protocol_total_cost"], 49049, abs_tol=50)
    assert math.isclose(report["baseline_total_cost"], 140491, abs_tol=150)
    assert math.isclose(report["cost_ratio"], 0.349, abs_tol=0.005)

    assert hamlink.xor_burden(1048576.0) == 251658240.0
    assert math.isclose(hamlink.payload_proportion("protocol"), 4094 / 4136)
    assert math.isclose(hamlink.payload_proportion("baseline"), 1480 / 1526)


def test_run_transfer_delivers():
    payload = bytes(random.Random(3).randrange(256) for _ in range(20000))
    report = hamlink.run_transfer(payload, hops=1, ber=1e-4, loss=0.0, seed=1, max_retries=64)
    assert report["delivered_ok"]
    assert report["delivered_bytes"] == len(payload)
    assert report["paper_cost_bytes"] == (
        40 * report["hash_check_exchanges"] + 4136 * report["data_retransmissions"]
    )


def test_container_round_trip():
    payload = bytes(random.Random(4).randrange(256) for _ in range(10000))
    container = hamlink.encode_container(payload)
    out, frames, bad = hamlink.decode_container(container)
    assert not bad
    assert out == payload

    out2, frames2, bad2 = hamlink.decode_container(container, [(0, 40 * 8 + 3)])
    assert not bad2
    assert out2 == payload
    assert any(o["kind"] == "corrected" for o in frames2[0]["outcomes"])

    with pytest.raises(ValueError):
        hamlink.decode_container(b"XXXX")


def test_digest():
    zeros = bytes(4094)
    assert hamlink.content_digest(zeros) == 0xFE4A9EFB2952DB9D
