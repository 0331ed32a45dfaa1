import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from survext import __version__
from survext.cli import main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    body = "\n".join(line for line in text.splitlines() if not line.startswith("#"))
    return list(csv.DictReader(io.StringIO(body)))


def meta(text):
    return json.loads("\n".join(line[2:] for line in text.splitlines() if line.startswith("# ")))


@pytest.fixture
def files(tmp_path):
    rng = np.random.default_rng(0)
    u = tmp_path / "u01.csv"
    u.write_text("x\n" + "\n".join(repr(float(v)) for v in rng.random(20)) + "\n")
    e = tmp_path / "e.csv"
    e.write_text("\n".join(repr(float(v)) for v in rng.exponential(1, 50)) + "\n")
    imgs = tmp_path / "imgs.csv"
    with imgs.open("w") as fh:
        for lab, (a, b) in {"A": (2, 5), "B": (2, 2), "C": (5, 2)}.items():
            for _ in range(15):
                fh.write(lab + "," + ",".join(str(int(v)) for v in np.round(255 * rng.beta(a, b, 784))) + "\n")
    life = tmp_path / "life.csv"
    with life.open("w") as fh:
        fh.write("grp,days\n")
        for g in "ABD":
            for v in rng.exponential(500, 150):
                fh.write(f"{g},{float(v)!r}\n")
        for v in 500 * rng.weibull(3, 150):
            fh.write(f"C,{float(v)!r}\n")
        fh.write("A,-5\n")
    return {"u": u, "e": e, "imgs": imgs, "life": life, "dir": tmp_path}


def test_measure_values(capsys):
    code, out, _ = run(["measure", "--f", "exp:rate=1", "--g", "exp:rate=3", "--name", "Ixi"], capsys)
    assert code == 0
    assert float(rows(out)[0]["value"]) == pytest.approx(0.5, abs=1e-12)
    m = meta(out)
    assert m["version"] == __version__
    assert set(m["conventions"]) >= {"survival_convention", "gompertz_parameterization", "cramer_von_mises", "rng"}
    _, out, _ = run(["measure", "--f", "exp:rate=1", "--g", "exp:rate=1", "--name", "SED"], capsys)
    assert float(rows(out)[0]["value"]) == 0.0
    _, out, _ = run(["measure", "--f", "exp:rate=1", "--g", "exp:rate=3", "--name", "DSED", "--t", "0.5",
                     "--format", "json"], capsys)
    assert json.loads(out)["result"]["value"] == pytest.approx(0.125, rel=1e-9)


def test_csv_uses_seventeen_digits(capsys):
    _, out, _ = run(["measure", "--f", "exp:rate=3", "--g", "exp:rate=2", "--name", "SED"], capsys)
    text = rows(out)[0]["value"]
    assert float(text) == pytest.approx(-1 / 60, rel=1e-9)
    assert len(text.lstrip("-").replace(".", "").lstrip("0")) == 17


@pytest.mark.parametrize("argv, code", [
    (["measure", "--f", "exp:rate=1", "--name", "bogus"], 2),
    (["measure", "--f", "weird:x=1", "--name", "Js"], 2),
    (["measure", "--name", "Js"], 2),
    (["nosuchcommand"], 2),
    (["estimate", "--x", "/nonexistent/file.csv", "--name", "SED"], 3),
    (["measure", "--f", "uniform:b=1", "--g", "exp:rate=1", "--name", "DSED", "--t", "2"], 4),
    (["critical-values", "--stat", "XX", "--n", "10"], 2),
    (["critical-values", "--n", "10", "--seed", "-3"], 2),
    (["test", "--input", "/nonexistent.csv"], 3),
])
def test_exit_codes(argv, code, capsys):
    got, _, err = run(argv, capsys)
    assert got == code
    assert err.startswith("survext")


def test_estimate_from_files(files, capsys):
    code, out, _ = run(["estimate", "--x", str(files["e"]), "--y", str(files["e"]), "--name", "SED"], capsys)
    assert code == 0 and float(rows(out)[0]["estimate"]) == 0.0
    code, _, _ = run(["estimate", "--x", str(files["e"]), "--name", "SED"], capsys)
    assert code == 2
    code, _, _ = run(["estimate", "--x", str(files["e"]), "--name", "J_fg"], capsys)
    assert code == 2


def test_estimate_simulation(capsys):
    code, out, _ = run(["estimate", "--f", "exp:rate=3", "--g", "exp:rate=2", "--n", "200", "--name", "SED",
                        "--reps", "10000", "--seed", "4"], capsys)
    assert code == 0
    r = rows(out)[0]
    # reference mean at n = 200 is -0.017029
    assert float(r["mean"]) == pytest.approx(-0.017029, abs=3e-4)
    assert float(r["truth"]) == pytest.approx(-1 / 60, rel=1e-9)
    assert r["seed"] == "4"


def test_seed_from_environment(monkeypatch, capsys):
    monkeypatch.setenv("SURVEXT_SEED", "31")
    _, out, _ = run(["critical-values", "--n", "10", "--reps", "1000"], capsys)
    assert meta(out)["seed"] == 31 and rows(out)[0]["seed"] == "31"


def test_critical_values_reference(capsys):
    code, out, _ = run(["critical-values", "--stat", "Tn", "--n", "10", "--alpha", "0.05", "--reps", "1000000",
                        "--seed", "7"], capsys)
    assert code == 0
    assert float(rows(out)[0]["value"]) == pytest.approx(0.0144495, abs=5e-4)


def test_power_reference(capsys):
    code, out, _ = run(["power", "--stat", "Tn", "--alt", "beta:a=0.5,b=1", "--n", "40", "--alpha", "0.05",
                        "--reps", "10000", "--crit-reps", "200000"], capsys)
    assert code == 0
    assert float(rows(out)[0]["power"]) == pytest.approx(0.981, abs=0.02)


def test_power_with_saved_table(files, capsys):
    table = files["dir"] / "cv.json"
    run(["critical-values", "--stat", "Tn,KS", "--n", "10", "--reps", "20000", "--format", "json", "--out",
         str(table)], capsys)
    code, out, _ = run(["power", "--stat", "Tn,KS", "--alt", "ck:k=2", "--alt", "ck:k=1.5", "--n", "10",
                        "--table", str(table), "--reps", "2000"], capsys)
    assert code == 0 and len(rows(out)) == 8
    code, _, _ = run(["power", "--stat", "Tn", "--alt", "ck:k=2", "--n", "20", "--table", str(table)], capsys)
    assert code == 3


def test_uniformity_test_command(files, capsys):
    code, out, _ = run(["test", "--stat", "Tn,KS,TU", "--input", str(files["u"]), "--alpha", "0.05",
                        "--crit-reps", "20000"], capsys)
    assert code == 0
    got = rows(out)
    assert [r["statistic"] for r in got] == ["Tn", "KS", "TU"]
    assert all(r["reject"] in ("true", "false") for r in got)


def test_level_of_cli_test(tmp_path, capsys):
    table = tmp_path / "cv.json"
    run(["critical-values", "--n", "25", "--alpha", "0.05", "--reps", "100000", "--format", "json",
         "--out", str(table)], capsys)
    rng = np.random.default_rng(99)
    rejects = 0
    for k in range(200):
        p = tmp_path / f"s{k}.csv"
        p.write_text("\n".join(repr(float(v)) for v in rng.random(25)))
        _, out, _ = run(["test", "--input", str(p), "--table", str(table), "--alpha", "0.05"], capsys)
        rejects += rows(out)[0]["reject"] == "true"
    assert rejects / 200 < 0.12


def test_classify_images(files, capsys):
    code, out, _ = run(["classify-images", "--train", str(files["imgs"]), "--test", str(files["imgs"]),
                        "--anchor", "A", "--pair", "B,C", "--seed", "3", "--format", "json"], capsys)
    assert code == 0
    rep = json.loads(out)["report"]
    assert rep["classification"][0]["accuracy"] >= 0.95
    code, _, _ = run(["classify-images", "--train", str(files["imgs"]), "--test", str(files["imgs"]),
                      "--anchor", "A", "--pair", "B"], capsys)
    assert code == 2
    code, _, _ = run(["classify-images", "--train", str(files["imgs"]), "--test", str(files["imgs"]),
                      "--anchor", "Z", "--pair", "B,C"], capsys)
    assert code == 3


def test_classify_images_pgm_directory(tmp_path, capsys):
    rng = np.random.default_rng(2)
    for lab, (a, b) in {"A": (2, 5), "B": (2, 2), "C": (5, 2)}.items():
        d = tmp_path / "pgm" / lab
        d.mkdir(parents=True)
        for k in range(4):
            pix = np.round(255 * rng.beta(a, b, 16)).astype(np.uint8)
            (d / f"{k}.pgm").write_bytes(b"P5\n4 4\n255\n" + pix.tobytes())
    code, out, _ = run(["classify-images", "--train", str(tmp_path / "pgm"), "--test", str(tmp_path / "pgm"),
                        "--anchor", "A", "--pair", "B,C"], capsys)
    assert code == 0 and rows(out)[0]["N"] == "8"


def test_analyze_lifetimes(files, capsys):
    out_dir = files["dir"] / "lt"
    code, _, _ = run(["analyze-lifetimes", "--input", str(files["life"]), "--group-col", "grp",
                      "--lifetime-col", "days", "--static", "--out", str(out_dir)], capsys)
    assert code == 0
    data = json.loads((out_dir / "divergence.json").read_text())
    assert data["metadata"]["dropped_rows"] == 1
    assert [s["t"] for s in data["sections"]] == [None, 50.0, 100.0, 150.0]
    assert all(s["argmax_group"] == "C" for s in data["sections"])
    text = (out_dir / "divergence.csv").read_text()
    assert text.count("argmax_group=C") == 4
    code, out, _ = run(["report", "--matrices", str(out_dir / "divergence.json")], capsys)
    assert code == 0 and out.count("argmax_group=C") == 4
    code, _, _ = run(["analyze-lifetimes", "--input", str(files["life"]), "--group-col", "nope",
                      "--lifetime-col", "days"], capsys)
    assert code == 3


def test_report_curve(capsys):
    code, out, _ = run(["report", "--lambda1", "1", "--lambda2", "0.5,3,6"], capsys)
    assert code == 0
    got = rows(out)
    assert [float(r["lambda2"]) for r in got] == [0.5, 1, 1.5, 2, 2.5, 3]
    one = got[1]
    assert float(one["J_fg"]) == pytest.approx(0, abs=1e-12) and float(one["SJ"]) == 0
    assert float(got[-1]["SJ"]) == pytest.approx(0.125, rel=1e-9)
    code, _, _ = run(["report", "--lambda2", "3,1,5"], capsys)
    assert code == 2


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("stat = Tn,KS\nn = 10\nreps = 2000\nseed = 9\n")
    _, out, _ = run(["critical-values", "--config", str(cfg)], capsys)
    got = rows(out)
    assert {r["statistic"] for r in got} == {"Tn", "KS"} and got[0]["seed"] == "9"
    # flags override the file
    _, out, _ = run(["critical-values", "--config", str(cfg), "--seed", "10"], capsys)
    assert rows(out)[0]["seed"] == "10"
    cfg.write_text("bogus = 1\n")
    assert run(["critical-values", "--config", str(cfg), "--n", "10"], capsys)[0] == 2
    cfg.write_text("rescale = maybe\n")
    assert run(["test", "--config", str(cfg), "--input", "x.csv"], capsys)[0] == 2


def test_threads_never_echoed(capsys):
    _, out, _ = run(["critical-values", "--n", "10", "--reps", "1000", "--threads", "3"], capsys)
    assert "threads" not in out


STOCHASTIC = [
    ["critical-values", "--stat", "Tn,TB,TU", "--n", "10,20", "--reps", "40000", "--seed", "5"],
    ["power", "--stat", "Tn,AD", "--alt", "ck:k=1.5", "--n", "10", "--reps", "20000", "--crit-reps", "20000",
     "--seed", "5"],
    ["estimate", "--f", "exp:rate=1", "--g", "exp:rate=3", "--n", "50", "--t", "0.5", "--name", "DSED",
     "--reps", "20000", "--seed", "5"],
]


@pytest.mark.parametrize("argv", STOCHASTIC, ids=lambda a: a[0])
@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_byte_identical_across_threads(argv, fmt, tmp_path, capsys):
    outs = []
    for threads in ("1", "2", "7"):
        p = tmp_path / f"o{threads}.{fmt}"
        assert run([*argv, "--threads", threads, "--format", fmt, "--out", str(p)], capsys)[0] == 0
        outs.append(p.read_bytes())
    assert outs[0] == outs[1] == outs[2]


def test_entry_point_subprocess():
    r = subprocess.run([sys.executable, "-m", "survext.cli", "measure", "--f", "exp:rate=3", "--g", "exp:rate=2",
                        "--name", "SEI"], capture_output=True, text=True)
    assert r.returncode == 0
    assert float(rows(r.stdout)[0]["value"]) == pytest.approx(-0.1, rel=1e-9)
    r = subprocess.run([sys.executable, "-m", "survext.cli", "measure"], capture_output=True, text=True)
    assert r.returncode == 2
