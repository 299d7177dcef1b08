import csv
import io
import json

import numpy as np
import pytest

from gtheory.cli import main
from gtheory.data import to_csv_text
from gtheory.gstudy import EFFECTS
from gtheory.simulate import GeneratorSpec, generate

from conftest import make_cube


def strip_manifest_time(text):
    return "\n".join(l for l in text.splitlines() if not l.startswith("# timestamp"))


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def person_only_csv(tmp_path, person_only_cube):
    p = tmp_path / "person_only.csv"
    p.write_text(to_csv_text([person_only_cube]))
    return p


@pytest.fixture
def sim_csv(tmp_path):
    cubes = []
    for label, seed in (("a", 1), ("b", 2)):
        spec = GeneratorSpec(60, 8, 5, dict(p=.45, i=.33, o=.06, pi=.28, po=0, io=1.14, pio=1.56),
                             seed=seed, group_label=label)
        cubes.append(generate(spec))
    p = tmp_path / "sim.csv"
    p.write_text(to_csv_text(cubes))
    return p


def test_gstudy_person_only_table(capsys, person_only_csv):
    code, out, _ = run(capsys, "gstudy", "--input", str(person_only_csv))
    assert code == 0
    row = next(l for l in out.splitlines() if l.startswith("Person  "))
    assert row.split()[1] == "1.000"
    assert all(l.split()[-2] == "0.000" for l in out.splitlines()
               if l.startswith(("Item", "Occasion", "Person Item", "Person Occasion")))


def test_gstudy_json_and_csv(capsys, sim_csv, tmp_path):
    code, out, _ = run(capsys, "gstudy", "--input", str(sim_csv), "--format", "json",
                       "--group", "a", "--coding", str(_wide(tmp_path)))
    assert code == 0
    doc = json.loads(out)
    assert set(doc["result"]) == {"a"}
    assert doc["manifest"]["command"] == "gstudy"
    assert set(doc["result"]["a"]["components"]) == set(EFFECTS)
    code, out, _ = run(capsys, "gstudy", "--input", str(sim_csv), "--format", "csv",
                       "--coding", str(_wide(tmp_path)))
    rows = list(csv.DictReader(l for l in out.splitlines() if not l.startswith("#")))
    assert len(rows) == 14


def test_gstudy_missing_file(capsys, tmp_path):
    out_path = tmp_path / "out.json"
    code, out, err = run(capsys, "gstudy", "--input", str(tmp_path / "nope.csv"),
                         "--out", str(out_path))
    assert code == 2 and out == "" and "not found" in err
    assert not out_path.exists()


def test_gstudy_malformed_csv_line_number(capsys, tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("group,person,occasion,item,response\ng,1,1,1,3\ng,1,one,2,3\n")
    code, _, err = run(capsys, "gstudy", "--input", str(p))
    assert code == 2 and ":3:" in err


def test_gstudy_unknown_group(capsys, person_only_csv):
    code, _, err = run(capsys, "gstudy", "--input", str(person_only_csv), "--group", "zzz")
    assert code == 1 and "zzz" in err


def test_gstudy_unusable_group(capsys, tmp_path):
    p = tmp_path / "tiny.csv"
    p.write_text(to_csv_text([make_cube(np.ones((1, 2, 2)), "solo")]))
    code, out, err = run(capsys, "gstudy", "--input", str(p))
    assert code == 1 and "solo" in err and out == ""


def test_dstudy_published_diagonal(capsys):
    code, out, _ = run(capsys, "dstudy", "--components", "white", "--occasions", "2,3,4,5",
                       "--items", "2,3,4,5", "--paired", "--format", "json")
    assert code == 0
    g = [round(c["g_coefficient"], 3) for c in json.loads(out)["result"]["cells"]]
    assert g == [0.460, 0.629, 0.730, 0.793]


def test_dstudy_latino_csv(capsys):
    code, out, _ = run(capsys, "dstudy", "--components", "latino", "--occasions", "5",
                       "--items", "8")
    rows = list(csv.DictReader(l for l in out.splitlines() if not l.startswith("#")))
    assert code == 0 and len(rows) == 1
    assert float(rows[0]["g_coefficient"]) == pytest.approx(0.460, abs=0.005)


def test_dstudy_table_mode(capsys):
    code, out, _ = run(capsys, "dstudy", "--components", "white", "--occasions", "2,3",
                       "--items", "2,3", "--paired", "--table")
    assert code == 0
    assert "Occasion Item" in out and "0.285" in out and "0.460" in out


def test_dstudy_zero_occasions_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["dstudy", "--components", "white", "--occasions", "0", "--items", "2"])
    assert exc.value.code == 2


def test_dstudy_negative_inline(capsys):
    comps = "p=0.4,i=0.1,o=0.1,pi=-0.2,po=0,io=0.1,pio=1"
    code, _, err = run(capsys, "dstudy", "--components", comps, "--occasions", "1",
                       "--items", "1")
    assert code == 1 and "nonnegative" in err


def test_dstudy_from_gstudy_json(capsys, tmp_path, sim_csv):
    out = tmp_path / "vc.json"
    assert main(["gstudy", "--input", str(sim_csv), "--group", "a", "--format", "json",
                 "--coding", str(_wide(tmp_path)), "--out", str(out)]) == 0
    code, text, _ = run(capsys, "dstudy", "--components", str(out), "--occasions", "1,5",
                        "--items", "8", "--format", "json")
    assert code == 0 and len(json.loads(text)["result"]["cells"]) == 2


def test_ctt_parallel_items(capsys, tmp_path):
    rng = np.random.default_rng(0)
    t = rng.normal(size=(20, 1, 5))
    p = tmp_path / "parallel.csv"
    p.write_text(to_csv_text([make_cube(np.repeat(t, 4, axis=1) + 4, "par")]))
    code, out, _ = run(capsys, "ctt", "--input", str(p), "--format", "json")
    assert code == 0
    rep = json.loads(out)["result"]["par"]["scale_reliability"]
    assert all(v["rho"] == pytest.approx(1.0) for v in rep["per_wave"].values())
    assert rep["average"] == pytest.approx(1.0)
    code, out, _ = run(capsys, "ctt", "--input", str(p))
    assert "rho_w5" in out and "1.000" in out


def test_ctt_single_item_refused(capsys, tmp_path):
    p = tmp_path / "one.csv"
    p.write_text(to_csv_text([make_cube(np.random.default_rng(1).normal(size=(10, 1, 3)) + 4)]))
    code, _, err = run(capsys, "ctt", "--input", str(p), "--coding", str(_wide(tmp_path)))
    assert code == 1 and "k >= 2" in err


def _wide(tmp_path):
    c = tmp_path / "wide.cfg"
    c.write_text("scale_min = -100\nscale_max = 100\n")
    return c


def test_describe_csv(capsys, person_only_csv):
    code, out, _ = run(capsys, "describe", "--input", str(person_only_csv), "--format", "csv")
    rows = list(csv.DictReader(l for l in out.splitlines() if not l.startswith("#")))
    assert code == 0 and len(rows) == 20
    assert float(rows[0]["mean"]) == 2.0


def test_simulate_then_gstudy(capsys, tmp_path):
    data = tmp_path / "sim.csv"
    assert main(["simulate", "--seed", "3", "--out", str(data)]) == 0
    cfg = _wide(tmp_path)
    code, out, _ = run(capsys, "gstudy", "--input", str(data), "--coding", str(cfg),
                       "--format", "json")
    assert code == 0
    vc = json.loads(out)["result"]["sim"]
    assert vc["n_p"] == 172 and vc["n_i"] == 8 and vc["n_o"] == 5
    assert vc["components"]["pio"]["estimate"] == pytest.approx(1.563, abs=0.1)


def test_simulate_reproducible(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["simulate", "--seed", "5", "--n-persons", "20", "--out", str(a)])
    main(["simulate", "--seed", "5", "--n-persons", "20", "--out", str(b)])
    assert strip_manifest_time(a.read_text()) == strip_manifest_time(b.read_text())


def test_simulate_recovery_json(capsys):
    code, out, _ = run(capsys, "simulate", "--recovery", "5", "--n-persons", "30",
                       "--format", "json", "--seed", "1")
    assert code == 0
    doc = json.loads(out)
    assert doc["manifest"]["seed"] == 1 and doc["result"]["replications"] == 5


def test_bootstrap_cli(capsys, tmp_path):
    from gtheory.simulate import one_factor_wave
    p = tmp_path / "wave.csv"
    p.write_text(to_csv_text([one_factor_wave(50, 8, 0.66, seed=2)]))
    argv = ["bootstrap", "--input", str(p), "--coding", str(_wide(tmp_path)), "--k", "1,5,25",
            "--replications", "100", "--seed", "7"]
    code, out1, _ = run(capsys, *argv)
    code2, out2, _ = run(capsys, *argv)
    assert code == code2 == 0
    assert strip_manifest_time(out1) == strip_manifest_time(out2)
    body = [l for l in out1.splitlines() if not l.startswith("#")]
    assert body[0] == "k,median,q25,q75,undefined_count" and len(body) == 4


def test_out_dir_env(monkeypatch, tmp_path):
    monkeypatch.setenv("GTHEORY_OUT_DIR", str(tmp_path / "reports"))
    assert main(["dstudy", "--components", "asian", "--occasions", "1", "--items", "1"]) == 0
    assert (tmp_path / "reports" / "dstudy.csv").is_file()


def test_manifest_embedded(capsys):
    _, out, _ = run(capsys, "dstudy", "--components", "white", "--occasions", "1",
                    "--items", "1", "--format", "json")
    m = json.loads(out)["manifest"]
    assert {"command", "inputs", "config_digest", "seed", "tool_version", "timestamp"} <= set(m)
