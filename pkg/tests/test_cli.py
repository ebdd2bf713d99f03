"""End-to-end tests of the command line interface, run in process."""

import csv
import json

import numpy as np
import pytest

from grunsky_lab.cli import main


def _write(path, payload):
    path.write_text(json.dumps(payload))
    return str(path)


def _read_json(path):
    with open(path) as fh:
        return json.load(fh)


def _read_csv(path):
    with open(path) as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


@pytest.fixture
def square_json(tmp_path):
    return _write(tmp_path / "square.json",
                  {"vertices": [[1, 1], [-1, 1], [-1, -1], [1, -1]]})


@pytest.fixture
def const_json(tmp_path):
    return _write(tmp_path / "const.json",
                  {"type": "constant", "value": [0.3, 0.0]})


def test_map_command(tmp_path, square_json):
    out = tmp_path / "map.json"
    table = tmp_path / "map.csv"
    code = main(["map", "--input", square_json, "--out", str(out),
                 "--csv", str(table), "--N", "8"])
    assert code == 0
    payload = _read_json(out)
    assert payload["command"] == "map"
    for key in ("config", "results", "tolerances", "versions"):
        assert key in payload
    res = payload["results"]
    assert res["laurent"]["1"] == [1.0, 0.0]
    assert abs(res["laurent"]["-3"][0] - 1.0 / 6.0) < 1e-10
    assert res["map"]["kind"] == "polygon"
    assert len(res["map"]["prevertices"]) == 4
    assert res["map"]["max_boundary_distance"] < 1e-6
    header, rows = _read_csv(table)
    assert header == ["n", "re", "im"]
    assert int(rows[0][0]) == 1 and int(rows[-1][0]) == -8
    theader, trows = _read_csv(tmp_path / "map_trace.csv")
    assert theader == ["z_re", "z_im", "w_re", "w_im"]
    assert len(trows) == 256


def test_map_command_ellipse(tmp_path):
    inp = _write(tmp_path / "ellipse.json", {"type": "ellipse", "b": 0.3})
    out = tmp_path / "map.json"
    assert main(["map", "--input", inp, "--out", str(out), "--N", "6"]) == 0
    res = _read_json(out)["results"]
    assert res["map"]["kind"] == "ellipse"
    assert res["laurent"]["-1"] == [0.3, 0.0]


def test_grunsky_command(tmp_path, square_json):
    out = tmp_path / "grunsky.json"
    table = tmp_path / "grunsky.csv"
    code = main(["grunsky", "--input", square_json, "--out", str(out),
                 "--csv", str(table), "--N", "8"])
    assert code == 0
    res = _read_json(out)["results"]
    assert res["orders"] == [4, 8]
    assert res["kappa"][1] >= res["kappa"][0]
    assert res["monotone"] is True
    assert res["delta"][0] is None
    header, rows = _read_csv(table)
    assert header == ["N", "kappa_N", "delta"]
    assert rows[0][2] == ""
    assert float(rows[1][2]) > 0.0


def test_extremality_constant(tmp_path, const_json):
    out = tmp_path / "ex.json"
    table = tmp_path / "ex.csv"
    code = main(["extremality", "--input", const_json, "--out", str(out),
                 "--csv", str(table), "--N", "8", "--probe-points", "2",
                 "--p-max", "4"])
    assert code == 0
    res = _read_json(out)["results"]
    assert abs(res["alpha_N"] - 0.3) < 1e-8
    assert res["bracket"]["upper"] == 0.3
    assert res["bracket"]["lower"] >= 0.3 - 1e-4
    assert res["extremal_flag"] is True
    assert res["teichmuller_flag"] is True
    assert res["probe_limit"] < 0.05 * 0.3
    assert len(res["probes"]) == 2
    header, rows = _read_csv(table)
    assert header == ["p", "value"]
    assert [int(r[0]) for r in rows] == [1, 2, 3, 4]


def test_extremality_harmonic_extension_not_extremal(tmp_path):
    inp = _write(tmp_path / "aw.json",
                 {"type": "ahlfors_weill",
                  "map": {"type": "ellipse", "b": 0.3},
                  "target_bnorm": 1.2})
    out = tmp_path / "ex.json"
    code = main(["extremality", "--input", inp, "--out", str(out),
                 "--N", "6", "--probe-points", "1", "--p-max", "3"])
    assert code == 0
    res = _read_json(out)["results"]
    assert res["extremal_flag"] is False
    assert res["teichmuller_flag"] is False
    assert res["bracket"]["lower"] < res["bracket"]["upper"] - 0.05
    assert res["input"]["type"] == "ahlfors_weill"


def test_deform_constant(tmp_path, const_json):
    out = tmp_path / "df.json"
    table = tmp_path / "df.csv"
    code = main(["deform", "--input", const_json, "--out", str(out),
                 "--csv", str(table), "--N", "4", "--grid", "0.0625"])
    assert code == 0
    res = _read_json(out)["results"]
    assert res["ordered"] is True
    assert abs(res["center_values"]["lambda_kappa"] - 0.3) < 1e-4
    assert res["base_bracket"]["upper"] == 0.3
    assert res["curvature"]["n_checked"] > 0
    assert res["curvature"]["min_margin"] > -1e-2
    header, rows = _read_csv(table)
    assert header == ["t_re", "t_im", "lambda", "margin"]
    assert any(r[3] != "" for r in rows)
    for tag in ("inf", "upper"):
        sheader, srows = _read_csv(tmp_path / f"df_{tag}.csv")
        assert sheader == header
        assert all(r[3] == "" for r in srows)
        assert len(srows) == len(rows)
    lam_main = np.array([float(r[2]) for r in rows])
    lam_up = np.array([float(r[2]) for r in srows])
    assert np.all(lam_main <= lam_up + 1e-12)


def test_deform_zero_direction(tmp_path):
    inp = _write(tmp_path / "zero.json", {"type": "constant", "value": 0.0})
    out = tmp_path / "df.json"
    table = tmp_path / "df.csv"
    code = main(["deform", "--input", inp, "--out", str(out),
                 "--csv", str(table), "--grid", "0.125"])
    assert code == 0
    res = _read_json(out)["results"]
    assert res["curvature"]["min_margin"] is None
    assert res["ordered"] is True
    _, rows = _read_csv(table)
    assert all(float(r[2]) == 0.0 for r in rows)


def test_teichmuller_spec_round_trip(tmp_path):
    inp = _write(tmp_path / "teich.json",
                 {"type": "teichmuller", "k": 0.3, "x": [0, 1]})
    out = tmp_path / "ex.json"
    code = main(["extremality", "--input", inp, "--out", str(out),
                 "--N", "6", "--probe-points", "1", "--p-max", "3"])
    assert code == 0
    res = _read_json(out)["results"]
    assert res["extremal_flag"] is True
    assert abs(res["alpha_N"] - 0.3) < 1e-6


def test_usage_errors_exit_one(tmp_path, monkeypatch, const_json):
    out = str(tmp_path / "o.json")
    assert main(["map", "--input", str(tmp_path / "nope.json"),
                 "--out", out]) == 1
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["map", "--input", str(bad), "--out", out]) == 1
    unk = _write(tmp_path / "unk.json", {"type": "spiral"})
    assert main(["map", "--input", unk, "--out", out]) == 1
    assert main(["extremality", "--input", unk, "--out", out]) == 1
    aw = _write(tmp_path / "aw.json",
                {"type": "ahlfors_weill", "map": {"type": "ellipse", "b": 0.1},
                 "target_bnorm": 2.5})
    assert main(["extremality", "--input", aw, "--out", out]) == 1
    monkeypatch.setenv("GRUNSKY_LAB_THREADS", "lots")
    assert main(["extremality", "--input", const_json, "--out", out,
                 "--N", "4", "--probe-points", "1", "--p-max", "2"]) == 1
    monkeypatch.setenv("GRUNSKY_LAB_THREADS", "2")
    assert main(["extremality", "--input", const_json, "--out", out,
                 "--N", "4", "--probe-points", "1", "--p-max", "2"]) == 0
    with pytest.raises(SystemExit) as exc:
        main(["map", "--input", const_json])  # missing --out
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 1


def test_numeric_failures_exit_two(tmp_path):
    out = str(tmp_path / "o.json")
    flat = _write(tmp_path / "flat.json",
                  {"vertices": [[0, 0], [1, 0], [2, 0], [1, 1]]})
    assert main(["map", "--input", flat, "--out", out]) == 2
    big = _write(tmp_path / "big.json", {"type": "constant", "value": [1.0, 0.0]})
    assert main(["extremality", "--input", big, "--out", out]) == 2


def test_reruns_are_byte_identical(tmp_path, square_json, const_json):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for out in (a, b):
        assert main(["grunsky", "--input", square_json, "--out", str(out),
                     "--N", "8"]) == 0
    assert a.read_bytes() == b.read_bytes()
    for out in (a, b):
        assert main(["deform", "--input", const_json, "--out", str(out),
                     "--N", "4", "--grid", "0.125", "--seed", "3"]) == 0
    assert a.read_bytes() == b.read_bytes()
