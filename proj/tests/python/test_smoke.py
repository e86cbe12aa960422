import json
import math
import os
import subprocess

import pytest

import copfusion as cf


def test_geodesy():
    # One degree of longitude on the equator.
    assert cf.haversine(0, 0, 0, 1) == pytest.approx(6371000 * math.pi / 180, rel=1e-12)
    assert cf.initial_bearing(0, 0, 1, 0) == pytest.approx(0.0, abs=1e-9)
    lat, lon = cf.destination(0, 0, 90, 1000)
    assert cf.haversine(0, 0, lat, lon) == pytest.approx(1000, rel=1e-9)
    assert cf.point_in_box(37.0, -76.0, 36.9, 37.1, -76.1, -75.9)
    assert not cf.point_in_box(38.0, -76.0, 36.9, 37.1, -76.1, -75.9)


def test_decode_lines():
    body = "AIVDM,1,1,,A,15M67FC000G?ufbE`FepT@3n00Sa,0"
    line = "!" + body + "*%02X" % cf.nmea_checksum(body)
    out = cf.decode_lines([line, "!AIVDM,1,1,,A,garbage,0*00"], receipt_time=100.0)
    assert out["counters"]["lines"] == 2
    assert out["counters"]["checksum_failures"] == 1
    assert len(out["messages"]) == 1
    assert out["messages"][0]["mmsi"] == 366053209


def test_simulate_and_run_match_truth():
    sim = cf.simulate("transit")
    engine = cf.Engine(config=sim["config"])
    engine.run(sim["ais_lines"], sim["fmv_lines"])
    got = [(e["event"]["kind"], e["event"]["subjects"]) for e in engine.events()]
    want = [(e["kind"], e["subjects"]) for e in sim["truth"]["expected_events"]]
    assert got == want
    assert len(engine.tracks()) >= 1


def test_errors_carry_codes():
    engine = cf.Engine()
    with pytest.raises(cf.CopError) as info:
        engine.cue(123456789)
    assert info.value.args[0] == "UnknownMmsi"
    with pytest.raises(cf.CopError) as info:
        cf.simulate("no_such_scenario")
    assert info.value.args[0] == "InvalidScenario"


def test_engine_log_dir(tmp_path):
    sim = cf.simulate("dark")
    engine = cf.Engine(config=sim["config"], log_dir=tmp_path)
    engine.run(sim["ais_lines"], sim["fmv_lines"])
    kinds = [e["event"]["kind"] for e in engine.events()]
    assert kinds.count("DarkVessel") == 1
    assert (tmp_path / "events.ndjson").exists()
    assert (tmp_path / "inputs.ndjson").exists()


def _tool(name):
    path = os.environ.get(name)
    if not path or not os.path.exists(path):
        pytest.skip(name + " not set")
    return path


def test_cli_simulate_then_copd(tmp_path):
    simulate = _tool("COP_SIMULATE")
    copd = _tool("COP_COPD")
    subprocess.run([simulate, "--reference", "transit", "--out", str(tmp_path)], check=True)
    truth = json.loads((tmp_path / "truth.json").read_text())
    result = subprocess.run(
        [copd, "--config", str(tmp_path / "config.json"), "--ais", str(tmp_path / "ais.nmea"),
         "--fmv", str(tmp_path / "fmv.ndjson"), "--log-dir", str(tmp_path / "log"), "--once"],
        check=True, capture_output=True, text=True)
    status = json.loads(result.stdout)
    assert status["last_seq"] == len(truth["expected_events"])
    events = [json.loads(l) for l in (tmp_path / "log" / "events.ndjson").read_text().splitlines()]
    assert [e["event"]["kind"] for e in events] == [e["kind"] for e in truth["expected_events"]]
