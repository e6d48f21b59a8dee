"""Command-line behavior: outputs, exit codes, determinism."""

import json

import pytest

from crsadder import cli
from crsadder.ecm import EcmParams
from crsadder.executor import params_fingerprint
from crsadder.microcode import gen_tc_adder, program_to_json


def run_cli(*argv):
    return cli.main(list(argv))


# ----------------------------------------------------------------------
# emit / compare
# ----------------------------------------------------------------------

def test_emit_writes_program_and_table(tmp_path, capsys):
    rc = run_cli("--out", str(tmp_path), "emit", "--scheme", "tc",
                 "--n", "2")
    assert rc == 0
    out = capsys.readouterr().out
    assert out.startswith("scheme=tc n=2")
    json_text = (tmp_path / "program_tc_n2.json").read_text()
    assert json_text == program_to_json(gen_tc_adder(2))
    table = (tmp_path / "program_tc_n2.txt").read_text()
    assert len(table.rstrip("\n").split("\n")) == 15


def test_emit_json_format(tmp_path, capsys):
    rc = run_cli("--out", str(tmp_path), "--format", "json", "emit",
                 "--scheme", "pc", "--n", "1")
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["scheme"] == "pc" and len(doc["steps"]) == 6


def test_compare_outputs(tmp_path, capsys):
    rc = run_cli("--out", str(tmp_path), "compare", "--n-min", "1",
                 "--n-max", "2")
    assert rc == 0
    md = (tmp_path / "comparison.md").read_text()
    assert "| TC adder | **4*** | 13 | yes |" in md
    csv = (tmp_path / "comparison.csv").read_text()
    assert csv.splitlines()[0].startswith("n,scheme,devices,cycles")


def test_compare_csv_stdout(tmp_path, capsys):
    rc = run_cli("--out", str(tmp_path), "--format", "csv", "compare",
                 "--n-max", "1")
    assert rc == 0
    assert capsys.readouterr().out.startswith("n,scheme,")


def test_compare_rejects_bad_range(tmp_path):
    assert run_cli("--out", str(tmp_path), "compare", "--n-min", "5",
                   "--n-max", "2") == 2


# ----------------------------------------------------------------------
# adder (behavioral)
# ----------------------------------------------------------------------

def test_adder_behavioral_prints_result(tmp_path, capsys):
    rc = run_cli("--out", str(tmp_path), "adder", "--scheme", "pc",
                 "--a", "01", "--b", "01")
    assert rc == 0
    assert capsys.readouterr().out.strip() == "s=010"
    assert (tmp_path / "adder_pc_states.csv").exists()
    verdicts = json.loads((tmp_path / "adder_pc_verdicts.json").read_text())
    assert len(verdicts) == 6   # three latched reads + three result reads


def test_adder_behavioral_tc_case(tmp_path, capsys):
    rc = run_cli("--out", str(tmp_path), "adder", "--scheme", "tc",
                 "--a", "11", "--b", "10")
    assert rc == 0
    assert capsys.readouterr().out.strip() == "s=101"


def test_adder_subtract(tmp_path, capsys):
    rc = run_cli("--out", str(tmp_path), "adder", "--scheme", "tc",
                 "--a", "11", "--b", "10", "--subtract")
    assert rc == 0
    assert capsys.readouterr().out.strip() == "s=001"


def test_adder_usage_errors(tmp_path):
    assert run_cli("--out", str(tmp_path), "adder", "--scheme", "pc",
                   "--a", "01x", "--b", "01") == 2
    assert run_cli("--out", str(tmp_path), "adder", "--scheme", "pc",
                   "--a", "011", "--b", "01") == 2


def test_adder_mismatch_exit_code(tmp_path, capsys, monkeypatch):
    # force the verifier to disagree so the mismatch path is exercised
    monkeypatch.setattr(cli, "add_words_reference",
                        lambda a, b, c0: [1, 1, 1])
    rc = run_cli("--out", str(tmp_path), "adder", "--scheme", "pc",
                 "--a", "01", "--b", "01")
    assert rc == 1
    captured = capsys.readouterr()
    assert "s=010" in captured.out
    assert "MISMATCH" in captured.err


def test_unknown_command_is_usage_error(capsys):
    assert run_cli("bogus") == 2


def test_help_exits_clean(capsys):
    assert run_cli("--help") == 0


# ----------------------------------------------------------------------
# sweep
# ----------------------------------------------------------------------

def test_sweep_unit_outputs(tmp_path, capsys):
    rc = run_cli("--out", str(tmp_path), "sweep", "--device", "unit",
                 "--samples", "600")
    assert rc == 0
    csv = (tmp_path / "unit_iv.csv").read_text()
    assert csv.splitlines()[0] == "v_volts,i_amps,x_meters"
    lm = json.loads((tmp_path / "landmarks.json").read_text())
    assert 1.1 <= lm["v_set"] <= 1.5
    assert -0.7 <= lm["v_reset"] <= -0.3
    assert lm["v_th1"] is None


def test_sweep_unit_subthreshold_landmarks_absent(tmp_path):
    rc = run_cli("--out", str(tmp_path), "sweep", "--device", "unit",
                 "--amplitude", "0.3", "--samples", "400")
    assert rc == 0
    lm = json.loads((tmp_path / "landmarks.json").read_text())
    assert lm["v_set"] is None and lm["v_reset"] is None


def test_sweep_crs_outputs(tmp_path):
    rc = run_cli("--out", str(tmp_path), "sweep", "--device", "crs",
                 "--samples", "900")
    assert rc == 0
    csv = (tmp_path / "crs_iv.csv").read_text()
    assert csv.splitlines()[0] \
        == "v_volts,i_amps,x_top_meters,x_bottom_meters,logic_state"
    lm = json.loads((tmp_path / "landmarks.json").read_text())
    assert 0 < lm["v_th1"] < lm["v_th2"]
    assert lm["v_th4"] < lm["v_th3"] < 0
    assert lm["v_set"] is None


def test_sweep_crs_subthreshold_is_solver_failure(tmp_path, capsys):
    rc = run_cli("--out", str(tmp_path), "sweep", "--device", "crs",
                 "--amplitude", "0.8", "--samples", "300")
    assert rc == 3
    assert "error" in capsys.readouterr().err


def test_sweep_determinism(tmp_path):
    d1, d2 = tmp_path / "one", tmp_path / "two"
    for d in (d1, d2):
        assert run_cli("--out", str(d), "sweep", "--device", "unit",
                       "--samples", "500") == 0
    assert (d1 / "unit_iv.csv").read_bytes() \
        == (d2 / "unit_iv.csv").read_bytes()
    assert (d1 / "landmarks.json").read_bytes() \
        == (d2 / "landmarks.json").read_bytes()


def test_sweep_reads_params_file(tmp_path):
    from crsadder.ecm import save_params
    pfile = tmp_path / "cell.params"
    save_params(EcmParams(), pfile)
    rc = run_cli("--params", str(pfile), "--out", str(tmp_path), "sweep",
                 "--device", "unit", "--amplitude", "0.3",
                 "--samples", "300")
    assert rc == 0


# ----------------------------------------------------------------------
# calibration sidecar and device-level adder
# ----------------------------------------------------------------------

def _write_sidecar(dirpath, pp, params):
    fp = params_fingerprint(params)
    doc = {
        "params_fingerprint": fp,
        "target_margin": 100.0,
        "v_w": pp.v_w,
        "t_pulse_s": pp.t_pulse,
        "t_gap_s": pp.t_gap,
        "samples_per_pulse": pp.samples_per_pulse,
        "i_spike_a": pp.i_spike,
    }
    path = dirpath / f"calibration-{fp}.json"
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return path


def test_calibrate_writes_and_reuses_sidecar(tmp_path, capsys, params,
                                             pulse):
    sidecar = _write_sidecar(tmp_path, pulse, params)
    rc = run_cli("--out", str(tmp_path), "calibrate")
    assert rc == 0
    out = capsys.readouterr().out
    assert "loaded" in out and sidecar.name in out


def test_calibrate_force_recalibrates(tmp_path, capsys, params, pulse):
    _write_sidecar(tmp_path, pulse, params)
    rc = run_cli("--out", str(tmp_path), "calibrate", "--force")
    assert rc == 0
    assert "wrote" in capsys.readouterr().out


def test_adder_device_uses_sidecar(tmp_path, capsys, params, pulse):
    _write_sidecar(tmp_path, pulse, params)
    rc = run_cli("--out", str(tmp_path), "adder", "--scheme", "pc",
                 "--a", "1", "--b", "1", "--level", "device")
    assert rc == 0
    assert capsys.readouterr().out.strip() == "s=10"
    trace = (tmp_path / "adder_pc_trace.csv").read_text()
    assert trace.splitlines()[0].startswith("time_s,step_index,annotation")
    verdicts = json.loads((tmp_path / "adder_pc_verdicts.json").read_text())
    assert all(v["peak_current_a"] is None or v["peak_current_a"] >= 0
               for v in verdicts)
