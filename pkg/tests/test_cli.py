import json
import math

import pytest

from rigidity import corpus
from rigidity.cli import main
from rigidity.geometry import dump_domain, load_domain, validate


@pytest.fixture
def files(tmp_path):
    out = {}
    for name in ("square", "disk", "lshape"):
        path = tmp_path / f"{name}.json"
        dump_domain(corpus.named(name), path)
        out[name] = str(path)
    return out


def _json(capsys):
    return json.loads(capsys.readouterr().out)


@pytest.mark.parametrize("name,convex,strict,segments", [
    ("square", True, False, 4), ("disk", True, True, 0), ("lshape", False, False, 6)])
def test_classify(files, capsys, name, convex, strict, segments):
    assert main(["classify", files[name]]) == 0
    rep = _json(capsys)
    assert (rep["convex"], rep["strictly_convex"], rep["segments"]) == (convex, strict, segments)


def test_classify_invalid_input(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["classify", str(bad)]) == 1
    assert main(["classify", str(tmp_path / "missing.json")]) == 1


def test_metric_csv(files, tmp_path):
    out = tmp_path / "m.csv"
    assert main(["metric", files["square"], "--n", "4", "--out", str(out)]) == 0
    rows = [line.split(",") for line in out.read_text().splitlines()]
    assert float(rows[1][2]) == math.sqrt(2)


def test_geodesic_with_svg(files, tmp_path, capsys):
    svg = tmp_path / "g.svg"
    assert main(["geodesic", files["lshape"], "--from", "2", "--to", "6", "--svg", str(svg)]) == 0
    assert _json(capsys)["length"] == pytest.approx(2 * math.sqrt(2), abs=1e-12)
    text = svg.read_text()
    assert text.startswith("<svg") and "polyline" in text and "circle" in text


def test_construct_step5_and_check(tmp_path, capsys):
    d = tmp_path / "s5"
    assert main(["construct", "step5", "--l", "1", "--out", str(d)]) == 0
    for name in ("U.json", "V.json", "corr.json", "preview.svg"):
        assert (d / name).exists()
    for name in ("U.json", "V.json"):
        assert validate(load_domain(d / name)).ok
    capsys.readouterr()
    assert main(["check", str(d / "U.json"), str(d / "V.json"), str(d / "corr.json"), "--eps-ladder"]) == 0
    assert _json(capsys)["passed"] is True
    assert main(["congruence", str(d / "U.json"), str(d / "V.json")]) == 0
    assert _json(capsys)["found"] is False

    corr = json.loads((d / "corr.json").read_text())
    corr["maps"][0]["offset"] = 0.35
    (d / "bad.json").write_text(json.dumps(corr))
    assert main(["check", str(d / "U.json"), str(d / "V.json"), str(d / "bad.json"), "--eps-ladder"]) == 2


def test_clip_sensitive_exit_code(tmp_path):
    d = tmp_path / "s5"
    main(["construct", "step5", "--out", str(d)])
    assert main(["metric", str(d / "U.json"), "--n", "8"]) == 3


def test_identity_check(files, tmp_path, capsys):
    corr = tmp_path / "id.json"
    corr.write_text(json.dumps({"maps": [{"source": 0, "target": 0}]}))
    assert main(["check", files["lshape"], files["lshape"], str(corr), "--eps-ladder", "0.5,0.25"]) == 0
    rep = _json(capsys)
    assert [r["epsilon"] for r in rep["local"]["rungs"]] == [0.5, 0.25]


def test_construct_lemma41(tmp_path, capsys):
    assert main(["construct", "lemma41", "--delta", "1e-2", "--out", str(tmp_path)]) == 0
    assert _json(capsys)["residual"] <= 1e-10
    sol = json.loads((tmp_path / "solution.json").read_text())
    assert len(sol["table"]["phi"]) == 2048


def test_construct_cardioid(tmp_path, capsys):
    assert main(["construct", "cardioid", "--segments", "8", "--out", str(tmp_path)]) == 0
    rep = _json(capsys)
    assert rep["junction"]["cardioid_slope"] == pytest.approx(math.sqrt(5) / 7, abs=1e-9)
    assert (tmp_path / "profile.json").exists()
    assert (tmp_path / "surface.stl").read_text().startswith("solid")


def test_construct_deform(tmp_path, capsys):
    assert main(["construct", "deform", "--domain", "smoothed_l", "--out", str(tmp_path)]) == 0
    assert validate(load_domain(tmp_path / "V.json")).ok
    assert main(["construct", "deform", "--domain", "disk", "--out", str(tmp_path)]) == 1


def test_outputs_are_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        main(["construct", "step5", "--out", str(d)])
        main(["construct", "lemma41", "--out", str(d)])
    for name in ("U.json", "V.json", "corr.json", "preview.svg", "solution.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
