import csv
import dataclasses
import io
import json

import pytest

from xychain import cli, partition


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_partition_grid_cardinality(capsys):
    code, out, _ = run(capsys, "partition", "--L", "50", "--g", "0:3:60", "--beta", "0.1:30:60")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 3600
    assert list(rows[0]) == cli.PARTITION_COLUMNS
    assert rows[0]["cancellation_flag"] in ("0", "1")


def test_output_is_byte_stable_and_thread_independent(capsys, tmp_path):
    args = ["partition", "--L", "30", "--g", "0:2:7", "--beta", "0.1:10:5", "--log-beta"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.main(args + ["--out", str(a)]) == 0
    assert cli.main(args + ["--out", str(b), "--threads", "4"]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_json_structure(capsys):
    code, out, _ = run(capsys, "distribution", "--L", "8", "--g", "0.5:1.5:2", "--beta", "1",
                       "--observable", "magnetization", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["meta"]["observable"] == "magnetization"
    assert len(doc["rows"]) == 2 * 9
    assert set(doc["rows"][0]) == {"beta", "g", "value", "probability"}
    for cell in doc["meta"]["cells"]:
        assert abs(cell["probability_sum"] - 1) < 1e-10


def test_limit_variant_uses_fixed_beta(capsys):
    code, out, _ = run(capsys, "distribution", "--L", "6", "--variant", "infinite_temperature",
                       "--beta", "0.1:5:4")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 7 and {r["beta"] for r in rows} == {"0"}


def test_cumulant_rows(capsys):
    code, out, _ = run(capsys, "cumulants", "--L", "12", "--g", "0.5", "--beta", "0.1:10:3")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["variant"] for r in rows] == ["exact", "ppa"] * 3
    assert rows[0]["rel_err_kappa1"] == "" and float(rows[1]["rel_err_kappa1"]) >= 0


@pytest.mark.parametrize("argv", [
    ["partition", "--L", "7"],
    ["partition", "--L", "8", "--g", "1:2"],
    ["partition", "--L", "8", "--g", "1:2:0"],
    ["partition", "--L", "8", "--beta", "-1"],
    ["partition", "--L", "8", "--gamma", "2"],
    ["partition", "--L", "8", "--beta", "0:1:3", "--log-beta"],
    ["distribution", "--L", "8", "--variant", "two_level"],
    ["distribution", "--L", "8", "--observable", "magnetization", "--variant", "coarse_grained_ppa"],
    ["oracle-check", "--L-max", "14"],
])
def test_configuration_errors_exit_1(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == cli.EXIT_CONFIG and "error" in err


def test_unwritable_output_exits_2(capsys, tmp_path):
    code, _, err = run(capsys, "partition", "--L", "4", "--out", str(tmp_path / "missing" / "x.csv"))
    assert code == cli.EXIT_IO


def test_parse_grid():
    assert cli.parse_grid("2.5") == (2.5,)
    assert cli.parse_grid("0:1:3") == (0.0, 0.5, 1.0)
    assert cli.parse_grid("1:100:3", log=True) == pytest.approx((1, 10, 100))
    with pytest.raises(cli.ConfigError):
        cli.parse_grid("a:b:c")


def test_oracle_check_passes_and_is_seed_deterministic(capsys):
    code, first, _ = run(capsys, "oracle-check", "--L-max", "6", "--seed", "3")
    assert code == 0 and "FAIL" not in first
    _, again, _ = run(capsys, "oracle-check", "--L-max", "6", "--seed", "3")
    assert first == again


def test_oracle_check_catches_boundary_sign_fault(capsys, monkeypatch):
    real = partition.z_exact

    def broken(params, th):
        z = real(params, th)
        return dataclasses.replace(z, z_b_minus=-z.z_b_minus)

    monkeypatch.setattr(partition, "z_exact", broken)
    code, out, _ = run(capsys, "oracle-check", "--L-max", "4")
    assert code == cli.EXIT_VERIFY
    bad = [line for line in out.splitlines() if line.startswith("FAIL")]
    assert bad and "partition-combination" in bad[0] and "L=" in bad[0]
