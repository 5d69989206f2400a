import json

import numpy as np
import pytest

from ductbarrier.cli import main
from ductbarrier.config import ConfigError, from_dict, load_config

DESK_CONFIG = {
    "geometry": {"H": 1.0, "hole": {"x0": 0.45, "delta": 0.1}, "w": 0.3, "L": 2.0},
    "truncation": {"N": 200, "M": 30},
    "band": {"kmin": 3.2, "kmax": 6.2, "points": 400},
    "oracle": {"h": 0.05, "Z": 1.0, "Nb": 12},
}


def write_config(tmp_path, data, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return path


def small_config(**over):
    cfg = json.loads(json.dumps(DESK_CONFIG))
    cfg["truncation"] = {"N": 60, "M": 10}
    cfg["band"] = {"kmin": 3.3, "kmax": 6.1, "points": 12}
    cfg.update(over)
    return cfg


class TestConfig:
    def test_round_trip(self):
        cfg = from_dict(DESK_CONFIG)
        assert from_dict(cfg.to_dict()) == cfg
        assert cfg.N == 200 and cfg.M == 30
        assert cfg.geometry.delta == 0.1
        assert cfg.oracle.Nb == 12

    def test_defaults_applied(self):
        data = {"geometry": DESK_CONFIG["geometry"], "band": DESK_CONFIG["band"]}
        cfg = from_dict(data)
        assert (cfg.N, cfg.M) == (200, 30)
        assert cfg.oracle is None

    @pytest.mark.parametrize("mutate", [
        lambda d: d.update(extra=1),
        lambda d: d["geometry"].update(unknown=2.0),
        lambda d: d["geometry"]["hole"].update(width=0.1),
        lambda d: d["band"].update(step=0.01),
        lambda d: d["oracle"].update(pml=4),
    ])
    def test_unknown_keys_rejected(self, mutate):
        data = json.loads(json.dumps(DESK_CONFIG))
        mutate(data)
        with pytest.raises(ConfigError):
            from_dict(data)

    def test_band_touching_spectral_edge_rejected(self):
        data = json.loads(json.dumps(DESK_CONFIG))
        data["band"]["kmax"] = 2.0 * np.pi
        with pytest.raises(ConfigError):
            from_dict(data)

    def test_geometry_invariants_revalidated(self):
        data = json.loads(json.dumps(DESK_CONFIG))
        data["geometry"]["hole"]["delta"] = -0.1
        with pytest.raises(ConfigError):
            from_dict(data)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "nope.json")

    def test_k_values_parsed(self):
        data = json.loads(json.dumps(DESK_CONFIG))
        data["oracle"]["k_values"] = [3.5, 4.5]
        assert from_dict(data).k_values == (3.5, 4.5)


class TestSweepCommand:
    def test_rows_and_determinism(self, tmp_path):
        cfg = write_config(tmp_path, small_config())
        out = tmp_path / "sweep.csv"
        assert main(["sweep", "--config", str(cfg), "--out", str(out)]) == 0
        text = out.read_bytes()
        lines = text.decode().splitlines()
        assert lines[0] == "k,re_r1,im_r1,re_t1,im_t1,R,T,energy_defect,h_res"
        assert len(lines) == 13
        defects = [float(l.split(",")[7]) for l in lines[1:]]
        assert max(defects) <= 1e-8
        assert b"\r" not in text
        assert main(["sweep", "--config", str(cfg), "--out", str(out)]) == 0
        assert out.read_bytes() == text  # bitwise identical rerun

    def test_output_block_supplies_default_path(self, tmp_path, monkeypatch):
        data = small_config(band={"kmin": 3.3, "kmax": 6.1, "points": 3})
        data["output"] = {"sweep": "artifacts/table.csv"}
        cfg = write_config(tmp_path, data)
        monkeypatch.chdir(tmp_path)
        assert main(["sweep", "--config", str(cfg)]) == 0
        assert (tmp_path / "artifacts" / "table.csv").exists()

    def test_empty_band_writes_header_only(self, tmp_path):
        cfg = write_config(tmp_path, small_config(band={"kmin": 3.3, "kmax": 6.1,
                                                        "points": 0}))
        out = tmp_path / "sweep.csv"
        assert main(["sweep", "--config", str(cfg), "--out", str(out)]) == 0
        assert out.read_text().splitlines() == [
            "k,re_r1,im_r1,re_t1,im_t1,R,T,energy_defect,h_res"]

    def test_malformed_json_exits_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert main(["sweep", "--config", str(bad)]) == 2
        assert "not valid JSON" in capsys.readouterr().err


class TestResonanceCommand:
    def test_desk_report(self, tmp_path):
        cfg = write_config(tmp_path, dict(DESK_CONFIG))
        out = tmp_path / "res.json"
        assert main(["resonance", "--config", str(cfg), "--out", str(out)]) == 0
        report = json.loads(out.read_text())
        by_kind = {r["kind"]: r for r in report["resonances"]}
        assert abs(by_kind["D"]["k_res"] - 4.85) < 0.1
        assert abs(by_kind["N"]["k_res"] - 3.65) < 0.1
        assert by_kind["D"]["residual"] <= 1e-10
        assert abs(complex(by_kind["D"]["re_r1"], by_kind["D"]["im_r1"])) < 0.1

    def test_absence_reported_honestly(self, tmp_path):
        # a hole this large pushes the cavity references out of this window
        data = small_config()
        data["geometry"] = {"H": 1.0, "hole": {"x0": 0.3, "delta": 0.4},
                            "w": 0.3, "L": 2.0}
        data["band"] = {"kmin": 5.4, "kmax": 6.0, "points": 50}
        cfg = write_config(tmp_path, data)
        out = tmp_path / "res.json"
        assert main(["resonance", "--config", str(cfg), "--out", str(out)]) == 0
        report = json.loads(out.read_text())
        assert report["resonances"] == []
        assert report["note"] == "none found"


class TestValidateCommand:
    def test_desk_checks_pass(self, tmp_path):
        cfg = write_config(tmp_path, small_config(truncation={"N": 200, "M": 30}))
        out = tmp_path / "validate.json"
        assert main(["validate", "--config", str(cfg), "--out", str(out)]) == 0
        report = json.loads(out.read_text())
        assert report["passed"] is True
        names = {c["name"] for c in report["checks"]}
        assert names == {"unimodularity", "energy", "dual_path", "spd",
                         "convergence", "overlap_quadrature"}

    def test_under_truncated_config_fails(self, tmp_path):
        cfg = write_config(tmp_path, small_config(truncation={"N": 60, "M": 2}))
        out = tmp_path / "validate.json"
        assert main(["validate", "--config", str(cfg), "--out", str(out)]) == 1
        report = json.loads(out.read_text())
        failed = {c["name"] for c in report["checks"] if not c["passed"]}
        assert failed == {"convergence"}


class TestCompareOracleCommand:
    def test_full_columns(self, tmp_path):
        data = small_config()
        data["oracle"] = {"h": 0.025, "Z": 1.0, "Nb": 12, "k_values": [4.0, 4.6]}
        cfg = write_config(tmp_path, data)
        out = tmp_path / "cmp.csv"
        assert main(["compare-oracle", "--config", str(cfg), "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0].startswith("k,re_r1_modal")
        assert len(lines) == 3
        for line in lines[1:]:
            assert float(line.split(",")[-2]) < 0.05  # |r1 modal - fdfd|

    def test_half_flag(self, tmp_path):
        data = small_config()
        data["oracle"] = {"h": 0.025, "Z": 1.0, "Nb": 12, "k_values": [4.0]}
        cfg = write_config(tmp_path, data)
        out = tmp_path / "cmp.csv"
        assert main(["compare-oracle", "--config", str(cfg), "--out", str(out),
                     "--half"]) == 0
        lines = out.read_text().splitlines()
        assert "r1D" in lines[0] and "r1N" in lines[0]
        cells = lines[1].split(",")
        assert float(cells[5]) < 0.05 and float(cells[10]) < 0.05

    def test_single_point_override(self, tmp_path):
        data = small_config()
        cfg = write_config(tmp_path, data)
        out = tmp_path / "cmp.csv"
        assert main(["compare-oracle", "--config", str(cfg), "--out", str(out),
                     "--k", "4.2"]) == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 2
        assert float(lines[1].split(",")[0]) == 4.2

    def test_missing_oracle_block_exits_2(self, tmp_path):
        data = small_config()
        del data["oracle"]
        cfg = write_config(tmp_path, data)
        assert main(["compare-oracle", "--config", str(cfg),
                     "--out", str(tmp_path / "x.csv")]) == 2


class TestFieldCommand:
    def test_grid_and_footer(self, tmp_path):
        cfg = write_config(tmp_path, small_config())
        out = tmp_path / "field.csv"
        assert main(["field", "--config", str(cfg), "--out", str(out),
                     "--k", "4.0"]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "x,z,re_u,im_u"
        footer = [l for l in lines if l.startswith("#")]
        assert any(l.startswith("# cavity_enhancement=") for l in footer)
        rows = np.array([[float(v) for v in l.split(",")]
                         for l in lines[1:] if not l.startswith("#")])
        on_barrier = (rows[:, 0] <= 0.45) & (rows[:, 1] >= 0.0) & (rows[:, 1] <= 0.3)
        assert np.max(np.abs(rows[on_barrier][:, 2:])) == 0.0
        # symmetric hole: |u| symmetric about x = H/2
        x = np.unique(rows[:, 0])
        mag = np.hypot(rows[:, 2], rows[:, 3]).reshape(x.size, -1)
        assert np.max(np.abs(mag - mag[::-1, :])) < 1e-10

    def test_enhancement_recorded_at_resonance(self, tmp_path):
        cfg = write_config(tmp_path, dict(DESK_CONFIG))
        res_out = tmp_path / "res.json"
        main(["resonance", "--config", str(cfg), "--out", str(res_out)])
        kd = [r["k_res"] for r in json.loads(res_out.read_text())["resonances"]
              if r["kind"] == "D"][0]
        out = tmp_path / "field.csv"
        assert main(["field", "--config", str(cfg), "--out", str(out),
                     "--k", repr(kd)]) == 0
        footer = [l for l in out.read_text().splitlines() if l.startswith("#")]
        enh = float([l for l in footer if "cavity_enhancement" in l][0].split("=")[1])
        assert enh > 5.0

    def test_missing_k_exits_2(self, tmp_path):
        cfg = write_config(tmp_path, small_config())
        assert main(["field", "--config", str(cfg),
                     "--out", str(tmp_path / "f.csv")]) == 2
