import pytest

from hmimos.cli import main, parse_snr_range
from hmimos.config import load_scenario, parse_keyvalues, scenario_from_keyvalues
from hmimos.errors import ConfigError

K2_SCENARIO = """\
# two users, 4 receive patches each
scenario.wavelength = 1.0
tx.layout = square
tx.nx = 4
tx.ny = 4
tx.dx = 0.4
tx.dy = 0.4
rx.nx = 2
rx.ny = 2
rx.dx = 0.4
rx.dy = 0.4
user1.z = 0.9
user1.cx = 0.5
user1.cy = 0.3
user2.z = 1.4
user2.cx = -0.6
user2.cy = 0.4
"""

K3_SCENARIO = """\
scenario.wavelength = 1.0
tx.layout = square
tx.nx = 4
tx.ny = 4
tx.dx = 0.4
tx.dy = 0.4
rx.nx = 1
rx.ny = 1
rx.dx = 0.4
user1.z = 0.8
user1.cx = 0.5
user1.cy = 0.3
user2.z = 1.2
user2.cx = -0.6
user2.cy = 0.4
user3.z = 1.6
user3.cx = 0.2
user3.cy = -0.7
"""


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return path


def read_rows(path):
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# ")
    header = lines[1].split(",")
    return header, [line.split(",") for line in lines[2:]]


def test_channel_subcommand_dimension_contract(tmp_path, capsys):
    scenario = write(tmp_path, "k2.cfg", K2_SCENARIO)
    assert main(["channel", "--scenario", str(scenario), "--out", str(tmp_path)]) == 0
    header, rows = read_rows(tmp_path / "channel.csv")
    assert header == ["rx_pol", "tx_pol", "user", "rx_patch", "tx_patch", "re", "im"]
    # 24 x 48 complex entries
    assert len(rows) == 24 * 48
    values = {(r[0], r[1], r[2], r[3], r[4]) for r in rows}
    assert len(values) == 24 * 48


def test_precode_sweep_grid_contract(tmp_path):
    scenario = write(tmp_path, "k3.cfg", K3_SCENARIO)
    code = main(
        [
            "precode-sweep",
            "--scenario",
            str(scenario),
            "--out",
            str(tmp_path),
            "--schemes",
            "uc,two-layer",
            "--pa",
            "pa1,pa2,pa3",
            "--snr",
            "-10:10:20",
        ]
    )
    assert code == 0
    header, rows = read_rows(tmp_path / "precode_sweep.csv")
    assert header == ["scheme", "pa", "snr_db", "spectral_efficiency"]
    assert len(rows) == 2 * 3 * 4
    keys = {(r[0], r[1], r[2]) for r in rows}
    assert len(keys) == 24


def test_cluster_scheme_requires_k_multiple_of_three(tmp_path, capsys):
    text = K2_SCENARIO + "user3.z = 2.0\nuser4.z = 2.4\nuser4.cx = 0.8\n"
    text = text.replace("user3.z = 2.0", "user3.z = 2.0\nuser3.cx = 0.3\nuser3.cy = 0.9")
    scenario = write(tmp_path, "k4.cfg", text)
    code = main(
        ["precode-sweep", "--scenario", str(scenario), "--out", str(tmp_path), "--schemes", "uc"]
    )
    assert code == 2
    assert "divisible by 3" in capsys.readouterr().err


def test_degenerate_scenario_exits_three(tmp_path, capsys):
    text = """\
scenario.wavelength = 1.0
tx.nx = 1
tx.ny = 1
tx.dx = 0.4
rx.nx = 1
rx.ny = 1
rx.dx = 0.4
user1.z = 1.0
"""
    scenario = write(tmp_path, "boresight.cfg", text)
    code = main(
        [
            "precode-sweep",
            "--scenario",
            str(scenario),
            "--out",
            str(tmp_path),
            "--schemes",
            "two-layer",
        ]
    )
    assert code == 3
    err = capsys.readouterr().err
    assert "H_" in err


def test_unknown_preset_exits_two(tmp_path, capsys):
    assert main(["preset", "--preset", "fig99", "--out", str(tmp_path)]) == 2
    assert "unknown preset" in capsys.readouterr().err


def test_preset_runs_and_reruns_identically(tmp_path):
    out1 = tmp_path / "a"
    out2 = tmp_path / "b"
    assert main(["preset", "--preset", "fig4", "--out", str(out1)]) == 0
    assert main(["preset", "--preset", "fig4", "--out", str(out2)]) == 0
    a = (out1 / "fig4_correlation_vs_spacing.csv").read_bytes()
    b = (out2 / "fig4_correlation_vs_spacing.csv").read_bytes()
    assert a == b


def test_capacity_subcommand(tmp_path):
    scenario = write(tmp_path, "k2.cfg", K2_SCENARIO)
    assert (
        main(["capacity", "--scenario", str(scenario), "--out", str(tmp_path), "--snr", "0:10:20"])
        == 0
    )
    header, rows = read_rows(tmp_path / "capacity.csv")
    assert header == ["snr_db", "family", "capacity"]
    assert len(rows) == 3 * 3


def test_dof_and_correlation_subcommands(tmp_path):
    scenario = write(tmp_path, "k2.cfg", K2_SCENARIO)
    assert main(["dof", "--scenario", str(scenario), "--out", str(tmp_path)]) == 0
    header, rows = read_rows(tmp_path / "dof.csv")
    assert header == ["user", "z", "dof"]
    assert len(rows) == 2
    assert main(["correlation", "--scenario", str(scenario), "--out", str(tmp_path)]) == 0
    header, rows = read_rows(tmp_path / "correlation.csv")
    assert len(rows) == 2 * 3 * 16 * 16


def test_missing_scenario_file_exits_two(tmp_path, capsys):
    assert main(["channel", "--scenario", str(tmp_path / "nope.cfg"), "--out", str(tmp_path)]) == 2


def test_parse_snr_range():
    assert parse_snr_range("-10:10:20") == [-10.0, 0.0, 10.0, 20.0]
    assert parse_snr_range("3,5") == [3.0, 5.0]
    with pytest.raises(ConfigError):
        parse_snr_range("0:0:10")
    with pytest.raises(ConfigError):
        parse_snr_range("a:b:c")


def test_config_parse_errors():
    with pytest.raises(ConfigError, match="duplicate"):
        parse_keyvalues("a.b = 1\na.b = 2\n")
    with pytest.raises(ConfigError, match="expected 'key = value'"):
        parse_keyvalues("just some text\n")
    kv = parse_keyvalues(K2_SCENARIO)
    scenario = scenario_from_keyvalues(kv)
    assert scenario.n_users == 2
    assert scenario.transmit.count == 16
    with pytest.raises(ConfigError, match="unknown configuration key"):
        scenario_from_keyvalues({**kv, "mystery.knob": "1"})
    missing = {k: v for k, v in kv.items() if not k.startswith("user2")}
    missing["user3.z"] = "2.0"
    with pytest.raises(ConfigError, match="numbered"):
        scenario_from_keyvalues(missing)


def test_load_scenario_roundtrip(tmp_path):
    path = write(tmp_path, "k3.cfg", K3_SCENARIO)
    scenario = load_scenario(path)
    assert scenario.n_users == 3
    assert scenario.users[2].surface.center == (0.2, -0.7, 1.6)


def test_preset_grid_contracts(tmp_path):
    assert main(["preset", "--preset", "fig4", "--out", str(tmp_path)]) == 0
    _, rows = read_rows(tmp_path / "fig4_correlation_vs_spacing.csv")
    assert len(rows) == 3 * 50  # three spacings, fifty patches
    assert {r[0] for r in rows} == {"0.050000000000000003", "0.20000000000000001", "0.40000000000000002"}

    assert main(["preset", "--preset", "fig10", "--out", str(tmp_path)]) == 0
    _, rows = read_rows(tmp_path / "fig10_dof_vs_antennas.csv")
    assert len(rows) == 3 * 9  # three distances, nine element counts
    assert {r[0] for r in rows} == {"5", "7", "9"}

    assert main(["preset", "--preset", "fig13", "--out", str(tmp_path)]) == 0
    _, rows = read_rows(tmp_path / "fig13_spectral_efficiency.csv")
    assert len(rows) == 2 * 3 * 16  # schemes x allocations x snr grid
