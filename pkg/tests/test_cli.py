import csv
import io

import pytest

from antenna_pathloss import antenna as ant
from antenna_pathloss.cli import FIGURE_PRESETS, HEADER, main
from antenna_pathloss.pdp import parse_pdp, tdl_b


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.mark.slow
@pytest.mark.parametrize("fig", sorted(FIGURE_PRESETS))
def test_presets_run_without_extra_flags(capsys, fig):
    code, out, _ = run(capsys, "--fig", str(fig))
    assert code == 0
    table = rows(out)
    preset = FIGURE_PRESETS[fig]
    n = len(preset["antennas"]) * 40 * len(preset["alphas"]) * len(preset["betas"])
    assert len(table) == n
    assert {float(r["d_m"]) for r in table} == set(range(10, 401, 10))
    assert {r["antenna"] for r in table} == set(preset["antennas"])
    for r in table:
        if float(r["alpha_deg"]) == 180 and float(r["beta_deg"]) == 0:
            assert float(r["K_linear"]) == 1.0 and r["PL_db"] == r["PL0_db"]


def test_single_tuple(capsys):
    code, out, _ = run(capsys, "--d-min", "100", "--d-max", "100", "--d-steps", "1", "--alpha", "180", "--beta", "0")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == ",".join(HEADER)
    assert lines[1:] == ["CR,100,180,0,1,121.794384,121.794384,0"]


def test_row_order_and_log_spacing(capsys):
    code, out, _ = run(capsys, "--antenna", "PG", "--d-min", "10", "--d-max", "1000", "--d-steps", "3", "--log",
                       "--alpha", "180,150", "--beta", "0,30")
    assert code == 0
    keys = [(float(r["d_m"]), float(r["alpha_deg"]), float(r["beta_deg"])) for r in rows(out)]
    assert keys == [(d, a, b) for d in (10.0, 100.0, 1000.0) for a in (180.0, 150.0) for b in (0.0, 30.0)]


def test_byte_identical_and_worker_independent(tmp_path):
    args = ["--antenna", "CR,PG", "--d-min", "20", "--d-max", "200", "--d-steps", "4", "--alpha", "150,180", "--beta", "0,45"]
    paths = [tmp_path / f"{i}.csv" for i in range(3)]
    assert main(args + ["--out", str(paths[0])]) == 0
    assert main(args + ["--out", str(paths[1])]) == 0
    assert main(args + ["--out", str(paths[2]), "--workers", "2"]) == 0
    first = paths[0].read_bytes()
    assert first == paths[1].read_bytes() == paths[2].read_bytes()


def test_dump_pdp_round_trip(capsys, tmp_path):
    code, out, _ = run(capsys, "--dump-pdp")
    assert code == 0
    again = parse_pdp(out, delay_unit="ns")
    for (t1, p1), (t2, p2) in zip(tdl_b().taps, again.taps):
        assert abs(t1 - t2) <= 1e-12 * max(t1, 1e-9) and abs(p1 - p2) <= 1e-12
    path = tmp_path / "pdp.csv"
    path.write_text(out)
    redumped = parse_pdp(run(capsys, "--dump-pdp", "--pdp", str(path))[1])
    for (t1, p1), (t2, p2) in zip(again.taps, redumped.taps):
        assert t1 == t2 and abs(p1 - p2) <= 1e-12


def test_dump_catalog(capsys, tmp_path):
    code, out, _ = run(capsys, "--dump-catalog")
    assert code == 0
    cat = ant.parse_catalog(out)
    assert ant.lookup("CR", cat).path_loss_exponent == 5.28
    assert ant.lookup("PG", cat).path_loss_exponent == 7.08
    path = tmp_path / "cat.csv"
    path.write_text(out)
    assert run(capsys, "--dump-catalog", "--catalog", str(path))[1] == out


def test_catalog_env_override(capsys, tmp_path, monkeypatch):
    path = tmp_path / "cat.csv"
    path.write_text("name,n,hpbw_deg,gain_dbi\nHORN,3.0,30,\n")
    monkeypatch.setenv(ant.CATALOG_ENV, str(path))
    code, out, _ = run(capsys, "--antenna", "HORN", "--d-min", "5", "--d-max", "5", "--d-steps", "1")
    assert code == 0
    assert rows(out)[0]["PL0_db"] == "53.1"
    assert run(capsys, "--antenna", "CR", "--d-steps", "1", "--d-min", "5", "--d-max", "5")[0] == 3


def test_empty_pdp_exits_with_data_error(capsys, tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("")
    code, out, err = run(capsys, "--pdp", str(path))
    assert code == 3 and out == ""
    assert "empty.csv" in err


def test_missing_file(capsys, tmp_path):
    assert run(capsys, "--pdp", str(tmp_path / "nope.csv"))[0] == 3


@pytest.mark.parametrize("argv", [
    ["--fig", "9"],
    ["--d-min", "50", "--d-max", "10"],
    ["--d-min", "0"],
    ["--alpha", "abc"],
    ["--grid", "3600"],
    ["--kappa", "-1"],
    ["--los-fraction", "2"],
    ["--workers", "0"],
    ["--oracle"],
])
def test_usage_errors(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        code = main(argv)
        raise SystemExit(code)
    assert exc.value.code == 2


def test_oracle_mode(capsys):
    argv = ["--oracle", "--samples", "20000", "--seed", "42", "--d-min", "100", "--d-max", "100", "--d-steps", "1",
            "--alpha", "180", "--beta", "0,60"]
    code, out, _ = run(capsys, *argv)
    assert code == 0
    table = rows(out)
    assert table[0]["K_linear"] == "1" and table[0]["K_stderr"] == "0"
    assert 0 < float(table[1]["K_linear"]) < 1
    assert run(capsys, *argv)[1] == out
