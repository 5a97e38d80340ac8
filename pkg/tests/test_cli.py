"""Command-line surface: artifacts, reports, exit codes."""

import json

import pytest

from sfq_ecc.cli import (
    EXIT_NONCONVERGED,
    EXIT_OK,
    EXIT_STRUCTURAL,
    EXIT_VALIDATION,
    main,
)


def run(argv):
    return main(argv)


def test_codes_report(tmp_path, capsys):
    assert run(["codes", "hamming74", "--out", str(tmp_path)]) == EXIT_OK
    out = capsys.readouterr().out
    assert "detect_only   3     35          0        28" in out
    doc = json.loads((tmp_path / "codes_hamming74.json").read_text())
    assert doc["d_min"] == 3
    w3 = [r for r in doc["patterns"] if r["mode"] == "detect_only" and r["weight"] == 3]
    assert w3[0]["detected"] == 28 and w3[0]["total"] == 35
    assert doc["table_row"]["worst_detect"] == 1


def test_codes_hamming84_dmin(tmp_path):
    run(["codes", "hamming84", "--out", str(tmp_path)])
    doc = json.loads((tmp_path / "codes_hamming84.json").read_text())
    assert doc["d_min"] == 4


def test_codes_unknown_exits_nonzero(tmp_path):
    with pytest.raises(SystemExit) as e:
        run(["codes", "bogus", "--out", str(tmp_path)])
    assert e.value.code == EXIT_VALIDATION


def test_synth_writes_netlist_and_cost(tmp_path):
    assert run(["synth", "hamming84", "--out", str(tmp_path)]) == EXIT_OK
    cost = json.loads((tmp_path / "hamming84_cost.json").read_text())
    assert cost["jj_total"] == 278
    assert cost["cells"] == {"XOR": 6, "DFF": 8, "SPLITTER": 23, "SFQ2DC": 8}
    net = json.loads((tmp_path / "hamming84_netlist.json").read_text())
    assert net["version"] == 1
    assert len(net["outputs"]) == 8


def test_synth_rm13_splitters(tmp_path):
    run(["synth", "rm13", "--out", str(tmp_path)])
    cost = json.loads((tmp_path / "rm13_cost.json").read_text())
    assert cost["cells"]["SPLITTER"] == 26
    assert cost["jj_total"] == 305


def test_synth_hamming74(tmp_path):
    run(["synth", "hamming74", "--out", str(tmp_path)])
    cost = json.loads((tmp_path / "hamming74_cost.json").read_text())
    assert cost["cells"]["XOR"] == 5 and cost["cells"]["DFF"] == 8


def test_synth_bad_library(tmp_path):
    lib = tmp_path / "broken.cfg"
    lib.write_text("XOR.jj eleven\n")
    assert run(["synth", "hamming84", "--library", str(lib),
                "--out", str(tmp_path)]) == EXIT_VALIDATION


def test_simulate_timeline(tmp_path):
    run(["synth", "hamming84", "--out", str(tmp_path)])
    code = run(["simulate", str(tmp_path / "hamming84_netlist.json"),
                "--message", "1011", "--code", "hamming84",
                "--clock-ghz", "5", "--out", str(tmp_path)])
    assert code == EXIT_OK
    lines = (tmp_path / "timeline.csv").read_text().splitlines()
    assert lines[0] == "time_ns,net_id,value"
    cycle2 = {r.split(",")[1]: r.split(",")[2] for r in lines[1:]
              if r.startswith("0.4,")}
    assert "".join(cycle2[f"o{i}"] for i in range(8)) == "01100110"


def test_simulate_no_messages_header_only(tmp_path):
    run(["synth", "hamming74", "--out", str(tmp_path)])
    assert run(["simulate", str(tmp_path / "hamming74_netlist.json"),
                "--out", str(tmp_path)]) == EXIT_OK
    assert (tmp_path / "timeline.csv").read_text() == "time_ns,net_id,value\n"


def test_simulate_corrupt_netlist(tmp_path):
    bad = tmp_path / "broken.json"
    bad.write_text("{this is not json")
    assert run(["simulate", str(bad), "--out", str(tmp_path)]) == EXIT_STRUCTURAL


def test_mc_no_faults_all_perfect(tmp_path):
    cfg = {"spread": 0.2, "q": 0.5,
           "margins": {"XOR": 0.2, "DFF": 0.2, "SPLITTER": 0.2, "SFQ2DC": 0.2},
           "master_seed": 5, "n_chips": 30, "n_messages": 20}
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    assert run(["mc", "--config", str(path), "--out", str(tmp_path)]) == EXIT_OK
    manifest = json.loads((tmp_path / "mc_manifest.json").read_text())
    for name, rec in manifest["runs"].items():
        assert rec["zero_error_prob"] == 1.0
    first = (tmp_path / "cdf_none.csv").read_text().splitlines()
    assert first[0] == "n,cdf" and first[1] == "0,1"


def test_mc_reruns_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert run(["mc", "--seed", "42", "--chips", "40", "--messages", "25",
                    "--out", str(out)]) == EXIT_OK
    for fname in ("cdf_none.csv", "cdf_rm13.csv", "cdf_hamming74.csv",
                  "cdf_hamming84.csv", "mc_manifest.json"):
        assert (a / fname).read_bytes() == (b / fname).read_bytes()


def test_mc_rejects_bad_config(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"spread": -1}))
    assert run(["mc", "--config", str(path), "--out", str(tmp_path)]) == EXIT_VALIDATION


def test_calibrate_trivial_targets(tmp_path):
    code = run(["calibrate", "--targets", "1,1,1,1", "--chips", "60",
                "--search-chips", "40", "--refine-rounds", "0",
                "--out", str(tmp_path)])
    assert code == EXIT_OK
    doc = json.loads((tmp_path / "ppv_calibrated.json").read_text())
    assert doc["converged"]
    assert doc["max_abs_dev"] == 0.0
    # no-fault configuration: margins at the spread
    assert all(v == pytest.approx(doc["config"]["spread"])
               for v in doc["config"]["margins"].values())


def test_calibrate_unreachable_targets_flagged(tmp_path):
    code = run(["calibrate", "--targets", "0,0,0,0", "--chips", "40",
                "--search-chips", "30", "--refine-rounds", "0",
                "--out", str(tmp_path)])
    assert code == EXIT_NONCONVERGED
    doc = json.loads((tmp_path / "ppv_calibrated.json").read_text())
    assert not doc["converged"]  # config still written, with a warning


def test_calibrate_malformed_targets(tmp_path):
    assert run(["calibrate", "--targets", "0.9,0.9", "--out", str(tmp_path)]) \
        == EXIT_VALIDATION


def test_outdir_env_var(tmp_path, monkeypatch):
    monkeypatch.setenv("SFQ_ECC_OUT", str(tmp_path / "envout"))
    assert run(["codes", "rm13"]) == EXIT_OK
    assert (tmp_path / "envout" / "codes_rm13.json").exists()
