import csv
import json
import shutil
import subprocess
from pathlib import Path

import numpy as np
import pytest

from lomaxmix import cli
from lomaxmix.distributions import MixtureParams

FIXTURES = Path(__file__).parent / "fixtures"
REF_FLAGS = ["--c", "0.55,0.45", "--v", "1.19,0.89", "--b", "2.08,7.26"]


def run(*argv):
    return cli.main([str(a) for a in argv])


@pytest.fixture(scope="module")
def ref_hist(tmp_path_factory):
    out = tmp_path_factory.mktemp("gen") / "ref.json"
    assert run("gen", *REF_FLAGS, "-n", 20_000, "--seed", 3, "-o", out) == 0
    return out


@pytest.fixture(scope="module")
def ref_fit(ref_hist, tmp_path_factory):
    out = tmp_path_factory.mktemp("fit") / "sel.json"
    assert run("fit", ref_hist, "--model", "mixture", "--max-m", 2, "-o", out) == 0
    return out


def test_ingest_two_files(tmp_path, capsys):
    (tmp_path / "a.txt").write_text("a b a")
    (tmp_path / "b.txt").write_text("b c")
    out = tmp_path / "h.json"
    assert run("ingest", tmp_path / "a.txt", tmp_path / "b.txt", "-o", out) == 0
    assert json.loads(out.read_text())["bins"] == {"1": 1, "2": 2}
    assert "types=3" in capsys.readouterr().out


def test_ingest_html_matches_text(tmp_path):
    run("ingest", "--html", FIXTURES / "page.html", "-o", tmp_path / "a.json")
    run("ingest", FIXTURES / "page.txt", "-o", tmp_path / "b.json")
    a, b = (json.loads((tmp_path / n).read_text()) for n in ("a.json", "b.json"))
    assert a["bins"] == b["bins"]


def test_ingest_errors(tmp_path, capsys):
    assert run("ingest", tmp_path / "missing.txt", "-o", tmp_path / "h.json") == 1
    err = capsys.readouterr().err
    assert "missing.txt" in err and err.count("\n") == 1
    (tmp_path / "empty.txt").write_text("123 ... !!")
    assert run("ingest", tmp_path / "empty.txt", "-o", tmp_path / "h.json") == 1
    assert "empty corpus" in capsys.readouterr().err


def test_gen_single_draw_and_bad_weights(tmp_path, capsys):
    out = tmp_path / "one.json"
    assert run("gen", *REF_FLAGS, "-n", 1, "-o", out) == 0
    data = json.loads(out.read_text())
    assert data["total_types"] == 1 and len(data["bins"]) == 1
    assert run("gen", "--c", "0.5,0.4", "--v", "1,1", "--b", "1,1", "-n", 10, "-o", out) == 1
    assert capsys.readouterr().err.startswith("error:")


def test_gen_from_params_file_and_byte_identical(tmp_path):
    pfile = tmp_path / "p.json"
    pfile.write_text(json.dumps(MixtureParams.from_arrays([0.55, 0.45], [1.19, 0.89], [2.08, 7.26]).to_dict()))
    a, b, c = tmp_path / "a.json", tmp_path / "b.json", tmp_path / "c.json"
    run("gen", "--params", pfile, "-n", 5000, "--seed", 8, "-o", a)
    run("gen", "--params", pfile, "-n", 5000, "--seed", 8, "-o", b)
    run("gen", *REF_FLAGS, "-n", 5000, "--seed", 8, "-o", c)
    assert a.read_bytes() == b.read_bytes()
    assert json.loads(a.read_text())["bins"] == json.loads(c.read_text())["bins"]


def test_fit_zipf_and_malformed(ref_hist, tmp_path, capsys):
    out = tmp_path / "z.json"
    assert run("fit", ref_hist, "--model", "zipf", "-o", out) == 0
    rep = json.loads(out.read_text())
    assert rep["model"] == "zipf" and rep["p"] < 0.001
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run("fit", bad, "-o", out) == 1
    assert "malformed" in capsys.readouterr().err


def test_fit_mixture_output(ref_fit, ref_hist, tmp_path):
    sel = json.loads(ref_fit.read_text())
    assert sel["selected_M"] in (1, 2)
    assert [r["M"] for r in sel["reports"]] == [1, 2]
    out = tmp_path / "again.json"
    run("fit", ref_hist, "--model", "mixture", "--max-m", 2, "-o", out)
    assert out.read_bytes() == ref_fit.read_bytes()


def test_fit_convergence_failure_exit_2(ref_hist, tmp_path, monkeypatch, capsys):
    from lomaxmix import fitting

    monkeypatch.setattr(fitting, "_polish", lambda ks, ns, c, v, b, opts: (c, v, b, -np.inf, False))
    monkeypatch.setattr(cli, "FitOptions", lambda **kw: fitting.FitOptions(max_iterations=1, **kw))
    out = tmp_path / "sel.json"
    code = run("fit", ref_hist, "--max-m", 2, "--alpha", 0.999, "-o", out)
    assert code == 2
    assert out.exists() and json.loads(out.read_text())["errors"]
    assert capsys.readouterr().err.startswith("error:")


def test_compare_summary(ref_hist, tmp_path, capsys):
    assert run("compare", ref_hist, "--max-m", 2, "-o", tmp_path / "c.json") == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 3 and lines[1].startswith("zipf")


def test_simulate(tmp_path, capsys):
    out = tmp_path / "sim.json"
    args = ["simulate", "--n", 10, "--samples", 500, "--burn-in", 500, "--seed", 2, "-o", out]
    assert run(*args) == 0
    res = json.loads(out.read_text())
    assert set(res) >= {"lambda_theory", "ks", "n", "samples_file"} and res["n"] == 500
    first = Path(res["samples_file"]).read_bytes()
    assert run(*args) == 0
    assert Path(res["samples_file"]).read_bytes() == first
    assert len(first.splitlines()) == 500


def test_simulate_unstable_exit_3(tmp_path, capsys):
    assert run("simulate", "--n", 10, "--dt", 0.1, "-o", tmp_path / "s.json") == 3
    assert "dt" in capsys.readouterr().err


def test_evolve(tmp_path, ref_fit):
    p = tmp_path / "p.json"
    p.write_text(json.dumps(MixtureParams.single(2, 3).to_dict()))
    out = tmp_path / "e.json"
    assert run("evolve", p, "--z-fr", 5, "-o", out) == 0
    assert json.loads(out.read_text()) == {"z_fr": 5.0, "delta_zfr": 0.0, "zbar": 3.0, "delta_zbar": 2.0}
    assert run("evolve", ref_fit, "--z-fr", 5, "--against", p, "-o", out) == 0
    assert "difference" in json.loads(out.read_text())


def test_plotdata(ref_fit, ref_hist, tmp_path):
    out = tmp_path / "plot.csv"
    assert run("plotdata", ref_fit, ref_hist, "-o", out) == 0
    rows = list(csv.DictReader(out.open()))
    hist = json.loads(ref_hist.read_text())
    assert len(rows) == len(hist["bins"])
    assert list(rows[0]) == ["k", "observed_fraction", "model_pmf", "observed_cdf", "model_cdf"]
    for col in ("observed_cdf", "model_cdf"):
        vals = [float(r[col]) for r in rows]
        assert all(b >= a for a, b in zip(vals, vals[1:])) and vals[-1] <= 1.0 + 1e-12


def test_plotdata_mismatch(ref_fit, tmp_path, capsys):
    other = tmp_path / "o.json"
    run("gen", *REF_FLAGS, "-n", 100, "-o", other)
    assert run("plotdata", ref_fit, other, "-o", tmp_path / "x.csv") == 1
    assert "word-forms" in capsys.readouterr().err


@pytest.mark.skipif(shutil.which("lomaxmix") is None, reason="console script not installed")
def test_console_script():
    res = subprocess.run(["lomaxmix", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip() == "0.1.0"
