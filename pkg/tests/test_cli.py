import json

import pytest

from eppsim import checks, cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_run_pan_pbs(capsys):
    code, out, _ = run(capsys, "run", "pan_pbs", "--param", "F=0.75")
    rec = json.loads(out)
    assert code == 0
    assert float(rec["fidelity"]) == pytest.approx(0.9, abs=1e-12)
    assert float(rec["success"]) == pytest.approx(0.3125, abs=1e-12)


def test_run_single_copy_csv(capsys):
    code, out, _ = run(capsys, "run", "--protocol", "single_copy", "--param", "Fp=0.8", "--param", "Fs=0.7",
                       "--format", "csv")
    head, row = out.strip().splitlines()
    vals = dict(zip(head.split(","), row.split(",")))
    assert code == 0
    assert vals["fidelity"] == "0.903225806452"
    assert vals["success"] == "0.62"


@pytest.mark.parametrize("argv", [["run", "nope"], ["run", "pan_pbs", "--param", "G=1"],
                                  ["run", "pan_pbs", "--param", "F=2"], ["run"], ["sweep", "pan_pbs"],
                                  ["sweep", "pan_pbs", "--grid", "F:0.5:1:1"], ["verify", "nope"],
                                  ["frobnicate"]])
def test_usage_errors_exit_2(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 2


def test_sweep_dmepp_table(capsys, tmp_path):
    out = tmp_path / "fig.csv"
    code, _, _ = run(capsys, "sweep", "dmepp_curves", "--grid", "F:0.3:1.0:50", "--out", str(out))
    lines = out.read_text().strip().splitlines()
    assert code == 0
    assert lines[0].split(",") == ["F", "eff_a", "eff_b", "fid_conv", "fid_dmepp"]
    assert len(lines) == 51
    assert lines[-1].split(",")[1:] == ["1"] * 4


def test_sweep_two_axes_in_grid_order(capsys):
    code, out, _ = run(capsys, "sweep", "hepp_two_step", "--grid", "Fp:0.6:0.9:3", "--grid", "Fs:0.6:0.9:2")
    rows = [r.split(",")[:2] for r in out.strip().splitlines()[1:]]
    assert code == 0
    assert rows == [["0.6", "0.6"], ["0.6", "0.9"], ["0.75", "0.6"], ["0.75", "0.9"], ["0.9", "0.6"],
                    ["0.9", "0.9"]]


def test_same_seed_same_bytes(tmp_path):
    paths = []
    for k in range(2):
        p = tmp_path / f"mc{k}.csv"
        assert cli.main(["sweep", "logical_mc", "--grid", "eta:0.5:1:3", "--samples", "20000", "--seed", "7",
                         "--out", str(p)]) == 0
        paths.append(p.read_bytes())
    assert paths[0] == paths[1]


def test_every_listed_protocol_runs(capsys):
    for name in cli.protocols():
        code, out, err = run(capsys, "run", name, "--samples", "2000")
        assert code == 0, (name, err)
        assert json.loads(out)


def test_list_names_every_protocol(capsys):
    code, out, _ = run(capsys, "list")
    assert code == 0
    for name in cli.protocols():
        assert f"  {name}(" in out


def test_verify_reports_spdc_values(capsys):
    code, out, _ = run(capsys, "verify", "pan2003_spdc")
    assert code == 0
    assert "F=3/4 -> 25/26" in out and "F=2/3 -> 13/14" in out


def test_verify_negative_control(capsys, monkeypatch):
    # a corrupted map must be caught and reported with exit code 1
    real = checks.pan_pbs_round

    def corrupted(state):
        res = real(state)
        return type(res)(res.success_prob * 0.9, res.output)

    monkeypatch.setattr(checks, "pan_pbs_round", corrupted)
    code, out, _ = run(capsys, "verify", "pan2001")
    assert code == 1
    assert out.startswith("FAIL")


def test_unwritable_output(capsys, tmp_path):
    code, _, _ = run(capsys, "run", "pan_pbs", "--out", str(tmp_path / "missing" / "x.json"))
    assert code == 2
