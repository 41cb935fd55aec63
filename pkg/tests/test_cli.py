import csv
import hashlib
import json

import numpy as np
import pytest

from epdyn.cli import main


def run(tmp_path, *args):
    return main(["--outdir", str(tmp_path), *args])


def read_csv(path):
    lines = path.read_text().splitlines()
    return lines[0], list(csv.DictReader(ln for ln in lines if not ln.startswith("#")))


G = 0.75
V_B = float(1 - np.sqrt(1 - G * G))


class TestCommands:
    def test_spectrum_collapses_at_ep2b(self, tmp_path):
        assert run(tmp_path, "spectrum", "--family", "hq", "--g", "0.75",
                   "--param-range", f"{V_B!r}:0.35:0.001") == 0
        header, rows = read_csv(tmp_path / "spectrum.csv")
        assert header.startswith("# epdyn spectrum manifest-sha256=")
        assert list(rows[0]) == ["param_value", "re_E", "im_E", "re_lambda", "im_lambda", "class"]
        first = [r for r in rows if float(r["param_value"]) == V_B]
        half = np.sqrt((2 - G * G) / np.sqrt(1 - G * G) - 2)
        assert len(first) == 4
        assert np.allclose(sorted(abs(float(r["im_E"])) for r in first), half, atol=1e-6)

    def test_ep_locate3(self, tmp_path):
        assert run(tmp_path, "ep", "locate3", "--family", "hn", "--n", "4") == 0
        _, rows = read_csv(tmp_path / "ep-locate3.csv")
        assert len(rows) == 1
        r = rows[0]
        assert abs(float(r["g"]) - 0.0914264) < 1e-5
        assert abs(float(r["param"]) + 1.958109) < 1e-5
        assert abs(float(r["re_E"]) + 2.030646) < 1e-5
        assert r["order"] == "3" and r["type"] == "A"

    def test_ep_locate_negative_window(self, tmp_path):
        assert run(tmp_path, "ep", "locate", "--family", "hn", "--n", "4", "--g", "0.06",
                   "--window", "-2.2:-1.9") == 0
        _, rows = read_csv(tmp_path / "ep-locate.csv")
        assert len(rows) == 2

    def test_ep_closed_form_and_puiseux(self, tmp_path):
        assert run(tmp_path, "ep", "closed-form", "--family", "hd", "--g", "0.1") == 0
        _, rows = read_csv(tmp_path / "ep-closed-form.csv")
        assert round(float(rows[0]["param"]), 6) == -1.989975
        assert run(tmp_path, "ep", "puiseux", "--family", "hd", "--g", "0.1", "--variable", "lambda") == 0
        assert (tmp_path / "ep-puiseux.csv").exists()

    def test_survival_overlay(self, tmp_path):
        assert main(["survival", "--family", "hd", "--g", "0.1", "--eps", "-1.989974", "--method", "spectral",
                     "--approximant", "ep2a-bandedge", "--tmax", "1e4", "--outdir", str(tmp_path),
                     "--plot-script"]) == 0
        _, rows = read_csv(tmp_path / "survival.csv")
        methods = {r["method"] for r in rows}
        assert methods == {"spectral", "approximant:ep2a-bandedge"}
        assert {r["model_family"] for r in rows} == {"hd"}
        script = (tmp_path / "survival.plot.py").read_text()
        assert "loglog" in script or "log" in script

    def test_fit_from_csv(self, tmp_path):
        assert run(tmp_path, "survival", "--family", "hq", "--g", "0.75", "--V", "0.3385622",
                   "--tmax", "15", "--grid", "linear") == 0
        assert run(tmp_path, "fit", "--input", str(tmp_path / "survival.csv"), "--window", "0:15") == 0
        _, rows = read_csv(tmp_path / "fit.csv")
        keys = [r["exponent"] for r in rows]
        assert keys[:6] == ["1/2", "1", "3/2", "2", "5/2", "3"]
        assert keys[6:] == ["rms", "t_min", "t_max", "condition"]

    def test_sweep(self, tmp_path):
        assert run(tmp_path, "sweep", "--n", "4", "--g-range", "0.06:0.08:0.01",
                   "--eps-window", "-2.2:-1.9", "--samples", "201") == 0
        _, rows = read_csv(tmp_path / "sweep.csv")
        assert len(rows) >= 6


class TestReproducibility:
    def test_manifest_replay_is_byte_identical(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        assert run(a, "survival", "--family", "hd", "--g", "0.3", "--eps", "-1.0", "--tmax", "20",
                   "--method", "lattice", "--approximant", "zeno-d") == 0
        assert main(["--manifest", str(a / "survival.manifest.json"), "--outdir", str(b)]) == 0
        assert (a / "survival.csv").read_bytes() == (b / "survival.csv").read_bytes()

    def test_manifest_records_checksums(self, tmp_path):
        assert run(tmp_path, "ep", "closed-form", "--family", "hq", "--g", "0.5") == 0
        manifest = json.loads((tmp_path / "ep-closed-form.manifest.json").read_text())
        data = (tmp_path / "ep-closed-form.csv").read_bytes()
        assert manifest["files"]["ep-closed-form.csv"] == hashlib.sha256(data).hexdigest()
        assert manifest["manifest_sha256"] in data.decode().splitlines()[0]


class TestPlot:
    def test_schemas(self, tmp_path):
        run(tmp_path, "spectrum", "--family", "hd", "--g", "0.5", "--param-range", "-2:2:0.5")
        run(tmp_path, "ep", "closed-form", "--family", "hd", "--g", "0.5")
        for stem in ("spectrum", "ep-closed-form"):
            assert run(tmp_path, "plot", "--input", str(tmp_path / f"{stem}.csv")) == 0
        text = (tmp_path / "spectrum.plot.py").read_text()
        assert "axhline" in text and "2.0" in text

    def test_unknown_schema(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b\n1,2\n")
        assert run(tmp_path, "plot", "--input", str(bad)) == 1
        assert capsys.readouterr().err.startswith("epdyn: error:")


class TestErrors:
    def test_invalid_flag(self):
        with pytest.raises(SystemExit) as info:
            main(["spectrum", "--family", "xx", "--g", "0.5", "--param-range", "0:1:0.1"])
        assert info.value.code != 0

    def test_inner_error_is_one_line(self, tmp_path, capsys):
        assert run(tmp_path, "ep", "closed-form", "--family", "hd", "--g", "1.5") == 1
        err = capsys.readouterr().err
        assert err.startswith("epdyn: error:") and err.count("\n") == 1

    def test_bad_range(self, tmp_path, capsys):
        assert run(tmp_path, "spectrum", "--family", "hd", "--g", "0.5", "--param-range", "2:1") == 1

    def test_missing_command(self, capsys):
        assert main([]) == 2
