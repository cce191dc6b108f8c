import csv
import hashlib
import json

import pytest

from timeia.analytic import prob_exceeds_one
from timeia.cli import main
from timeia.config import ConfigError, build, parse_config_text


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def write(tmp_path, text, name="run.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


# --- configuration files -------------------------------------------------

def test_parse_config_text():
    v = parse_config_text("""
        # comment
        mode = satellite
        rho = 43/100
        seed = 0x10
        sat_longitudes = 24.5, 25, 25.5
        ground_lat_range = 35, 55
        T_seconds = 25e-6
    """)
    assert v["rho"] == pytest.approx(0.43)
    assert v["seed"] == 16
    assert v["sat_longitudes"] == (24.5, 25.0, 25.5)
    cfg = build(v, "satellite")
    assert cfg.scenario.slot == 25e-6
    assert cfg.trials == 10**4


@pytest.mark.parametrize("text, where", [
    ("rho 0.4", "<config>:1"),
    ("\nbogus = 1", "<config>:2"),
    ("rho = 0.4\nrho = 0.5", "<config>:2"),
    ("trials = many", "<config>:1"),
    ("ground_lat_range = 1, 2, 3", "<config>:1"),
])
def test_config_syntax_errors_name_the_line(text, where):
    with pytest.raises(ConfigError) as info:
        parse_config_text(text)
    assert info.value.where == where


@pytest.mark.parametrize("values, mode, field", [
    ({"rho": 0.7}, "uncoordinated", "rho"),
    ({"trials": 0}, "coordinated", "trials"),
    ({"grid": 4}, "coordinated", "grid"),
    ({"T_seconds": 1e-5}, "coordinated", "T_seconds"),
    ({"mode": "satellite"}, "coordinated", "mode"),
    ({"sat_longitudes": (24.0, 25.0)}, "satellite", "sat_longitudes"),
])
def test_config_semantic_errors_name_the_field(values, mode, field):
    with pytest.raises(ConfigError) as info:
        build(values, mode)
    assert info.value.where == field


def test_satellite_defaults():
    cfg = build({}, "satellite")
    assert cfg.rho == 0.43
    assert cfg.scenario.satellite_longitudes == (24.5, 25.0, 25.5)
    assert cfg.scenario.lat_range == (35.0, 55.0)
    assert cfg.scenario.lon_range == (-10.0, 20.0)


# --- analytic ------------------------------------------------------------

def test_analytic_half(tmp_path):
    assert main(["analytic", "--rho", "0.5", "--out", str(tmp_path)]) == 0
    rows = read_rows(tmp_path / "analytic_ccdf.csv")
    assert rows[0] == ["phi", "ccdf_analytic"]
    assert rows[-1] == ["1.5", "0"]
    assert len(rows) == 1502
    manifest = json.loads((tmp_path / "analytic_manifest.json").read_text())
    digest = hashlib.sha256((tmp_path / "analytic_ccdf.csv").read_bytes()).hexdigest()
    assert manifest["outputs"]["analytic_ccdf.csv"] == digest


def test_analytic_third_atoms(tmp_path):
    assert main(["analytic", "--rho", "1/3", "--out", str(tmp_path)]) == 0
    atoms = read_rows(tmp_path / "analytic_atoms.csv")
    assert atoms[0] == ["location", "weight"]
    top = [r for r in atoms[1:] if float(r[0]) == 1.0]
    assert float(top[0][1]) == pytest.approx(1 / 729, rel=1e-10)


def test_analytic_near_optimum(tmp_path):
    assert main(["analytic", "--rho", "0.4305", "--out", str(tmp_path)]) == 0
    rows = {r[0]: r[1] for r in read_rows(tmp_path / "analytic_ccdf.csv")[1:]}
    assert float(rows["1"]) == pytest.approx(7e-3, abs=1e-3)
    assert float(rows["1"]) == pytest.approx(prob_exceeds_one(0.4305), rel=1e-10)
    assert "1.2915" in rows


def test_csv_format(tmp_path):
    main(["analytic", "--rho", "0.45", "--out", str(tmp_path)])
    raw = (tmp_path / "analytic_ccdf.csv").read_bytes()
    assert b"\r" not in raw and raw.endswith(b"\n")
    for line in raw.decode().splitlines()[1:]:
        a, b = line.split(",")
        float(a), float(b)
        assert len(a.replace(".", "").replace("e-", "").lstrip("0")) <= 14


# --- experiments ---------------------------------------------------------

def test_uncoordinated_run(tmp_path):
    cfg = write(tmp_path, "mode = uncoordinated\nrho = 0.5\ntrials = 2000\nseed = 1\n")
    assert main(["uncoordinated", "--config", cfg, "--out", str(tmp_path)]) == 0
    rows = read_rows(tmp_path / "uncoordinated_ccdf.csv")
    assert rows[0] == ["phi", "ccdf_empirical"]
    phis = [float(r[0]) for r in rows[1:]]
    assert phis == sorted(set(phis))
    assert float(rows[-1][1]) == 0.0
    m = json.loads((tmp_path / "uncoordinated_manifest.json").read_text())
    assert m["config"]["trials"] == 2000 and m["master_seed"] == 1
    assert "ks_distance_analytic" in m["summary"]


def test_flags_override_config(tmp_path):
    cfg = write(tmp_path, "rho = 0.5\ntrials = 2000\nseed = 1\n")
    main(["uncoordinated", "--config", cfg, "--trials", "300", "--seed", "5", "--rho", "0.4",
          "--out", str(tmp_path)])
    m = json.loads((tmp_path / "uncoordinated_manifest.json").read_text())
    assert m["config"]["trials"] == 300
    assert m["master_seed"] == 5
    assert m["config"]["rho"] == 0.4


def test_satellite_run_with_figures(tmp_path):
    cfg = write(tmp_path, "mode = satellite\ntrials = 30\nT_seconds = 250e-6\n")
    assert main(["satellite", "--config", cfg, "--out", str(tmp_path), "--figures"]) == 0
    assert (tmp_path / "satellite_ccdf.png").stat().st_size > 0
    m = json.loads((tmp_path / "satellite_manifest.json").read_text())
    assert m["config"]["T_seconds"] == 250e-6
    assert "ccdf_at_1" in m["summary"]


def test_rho_sweep_uncoordinated(tmp_path):
    args = ["rho-sweep", "--mode", "uncoordinated", "--trials", "20000", "--step", "0.02",
            "--out", str(tmp_path)]
    assert main(args) == 0
    rows = read_rows(tmp_path / "rho_sweep_uncoordinated.csv")
    assert rows[0] == ["rho", "p_exceed_1_analytic", "p_exceed_1_empirical"]
    assert float(rows[1][0]) == pytest.approx(1 / 3)
    assert float(rows[1][1]) == 0.0
    assert float(rows[-1][0]) == 0.5
    m = json.loads((tmp_path / "rho_sweep_manifest.json").read_text())
    assert m["summary"]["argmax_analytic"]["rho"] == pytest.approx(0.4333, abs=0.011)


def test_rho_sweep_coordinated_has_no_analytic_column(tmp_path):
    args = ["rho-sweep", "--mode", "coordinated", "--trials", "20", "--rho-min", "0.4",
            "--rho-max", "0.42", "--step", "0.01", "--out", str(tmp_path)]
    assert main(args) == 0
    rows = read_rows(tmp_path / "rho_sweep_coordinated.csv")
    assert [r[1] for r in rows[1:]] == ["", "", ""]


def test_analytic_figure(tmp_path):
    assert main(["analytic", "--rho", "0.4", "--out", str(tmp_path), "--figures"]) == 0
    assert (tmp_path / "analytic_ccdf.png").exists()


# --- errors --------------------------------------------------------------

def test_config_error_exit_code(tmp_path, capsys):
    cfg = write(tmp_path, "rho = 0.9\n")
    out = tmp_path / "out"
    assert main(["uncoordinated", "--config", cfg, "--out", str(out)]) == 2
    assert "rho" in capsys.readouterr().err
    assert not out.exists()


def test_missing_config_file(tmp_path):
    assert main(["coordinated", "--config", str(tmp_path / "nope.cfg"),
                 "--out", str(tmp_path)]) == 2


def test_bad_line_reports_location(tmp_path, capsys):
    cfg = write(tmp_path, "trials = 10\nfoo = 1\n")
    assert main(["uncoordinated", "--config", cfg, "--out", str(tmp_path / "o")]) == 2
    assert "run.cfg:2" in capsys.readouterr().err


def test_invalid_rho_flag():
    with pytest.raises(SystemExit) as info:
        main(["analytic", "--rho", "abc", "--out", "x"])
    assert info.value.code == 2


def test_analytic_invalid_rho(tmp_path):
    assert main(["analytic", "--rho", "0.6", "--out", str(tmp_path / "o")]) == 2


def test_sweep_range_checked(tmp_path):
    assert main(["rho-sweep", "--rho-min", "0.2", "--out", str(tmp_path)]) == 2


def test_io_error_exit_code(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["analytic", "--out", str(blocker / "sub")]) == 3
