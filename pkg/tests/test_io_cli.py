import json

import numpy as np
import pytest

from tracelab import io
from tracelab.cli import main
from tracelab.core import Metric, PointSet
from tracelab.errors import SchemaError
from tracelab.svg import render_svg


def write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


def cplx(z):
    return {"re": z.real, "im": z.imag}


def test_set_roundtrip_is_bit_exact(tmp_path, rng):
    z = rng.normal(size=7) + 1j * rng.normal(size=7)
    v = rng.normal(size=7) * 1e-300 + 1j * rng.normal(size=7) * 1e300
    sf = io.SetFile(PointSet(z), v, [0, 1, 0, 1, 0, 1, 0])
    io.save_set(tmp_path / "s.json", sf)
    back = io.load_set(tmp_path / "s.json")
    assert back.points.points.tobytes() == z.tobytes()
    assert back.values.tobytes() == v.tobytes()
    assert back.parts() == [[0, 2, 4, 6], [1, 3, 5]]
    assert (tmp_path / "s.json").read_text() == io.dumps(sf.to_json())


def test_dumps_nonfinite_and_numpy():
    text = io.dumps({"a": np.float64(np.inf), "b": np.arange(2), "c": 1 + 2j, "d": np.bool_(True)})
    assert json.loads(text) == {"a": None, "b": [0, 1], "c": {"re": 1.0, "im": 2.0}, "d": True}
    assert text.endswith("\n")


def test_schema_errors_carry_pointer():
    with pytest.raises(SchemaError) as exc:
        io.setfile_from_json({"schema": "trace-lab/1", "metric": "plane",
                              "points": [{"re": 0, "im": 0}, {"re": "x", "im": 0}]})
    assert exc.value.pointer == "/points/1/re"
    with pytest.raises(SchemaError) as exc:
        io.setfile_from_json({"schema": "trace-lab/1", "metric": "plane",
                              "points": [{"re": 0, "im": 0}, {"re": 0, "im": 0}]})
    assert exc.value.pointer == "/points"
    with pytest.raises(SchemaError) as exc:
        io.setfile_from_json({"schema": "trace-lab/1", "metric": "disk", "points": [{"re": 1, "im": 0}]})
    assert exc.value.pointer == "/points"
    with pytest.raises(SchemaError) as exc:
        io.setfile_from_json({"schema": "other", "metric": "plane", "points": []})
    assert exc.value.pointer == "/schema"
    with pytest.raises(SchemaError) as exc:
        io.setfile_from_json({"schema": "trace-lab/1", "metric": "plane",
                              "points": [{"re": 0, "im": 0}], "values": []})
    assert exc.value.pointer == "/values"


def test_load_weight_variants(tmp_path):
    assert io.load_weight("korenblum").metric is Metric.DISK
    w = io.load_weight("power_abs:2")
    assert w.params["a"] == 2.0
    p = tmp_path / "w.json"
    io.write_json(p, w.to_json())
    assert io.load_weight(str(p)).to_json() == w.to_json()
    with pytest.raises(SchemaError):
        io.load_weight("nosuch")
    with pytest.raises(SchemaError):
        io.read_json(tmp_path / "missing.json")


def test_svg_deterministic_and_degenerate(tmp_path):
    s = PointSet(np.array([0, 1 + 1j, -2j]))
    a = render_svg(tmp_path / "a.svg", s, [0, 1, 0], [(0j, 0.5)], {"eps": 0.5}, "t")
    b = render_svg(tmp_path / "b.svg", s, [0, 1, 0], [(0j, 0.5)], {"eps": 0.5}, "t")
    assert a == b and a.startswith("<svg") and a.count("<circle") == 1 + 3 + 2
    empty = render_svg(None, PointSet(np.empty(0, complex)))
    assert empty.strip().endswith("</svg>")
    one = render_svg(None, PointSet(np.array([0.5j]), Metric.DISK), disks=[(0.5j, 0.3)])
    assert one.count("<circle") == 3


@pytest.fixture
def files(tmp_path):
    pts = [0, 0.01, 3, 3.01, 6j, 6j + 0.01]
    vals = [1, 2, 3, -1, 0.5j, 2]
    data = {"schema": "trace-lab/1", "metric": "plane",
            "points": [cplx(complex(z)) for z in pts], "values": [cplx(complex(v)) for v in vals]}
    return tmp_path, write(tmp_path / "set.json", data)


def test_cli_pipeline(files, capsys):
    tmp, s = files
    assert main(["divdiff", "--input", s, "--order", "1", "--tuple", "0,2", "--json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["values"][0] == {"re": (3 - 1) / 3, "im": 0.0}
    assert main(["seminorm", "--input", s, "--order", "2", "--B", "1"]) == 0
    assert main(["seminorm", "--input", s, "--order", "2", "--curve", "0:2:3", "--json"]) == 0
    assert len(json.loads(capsys.readouterr().out)["curve"]) == 3
    assert main(["separation", "--input", s, "--find-eps", "--C", "0"]) == 0
    assert main(["separation", "--input", s, "--eps", "0.001", "--C", "0",
                 "--svg", str(tmp / "sep.svg")]) == 0
    assert main(["separation", "--input", s, "--eps", "5", "--C", "0"]) == 1
    parts = str(tmp / "parts.json")
    assert main(["decompose", "--input", s, "--n", "2", "--eps", "0.1", "--C", "0.5", "--out", parts]) == 0
    cover = str(tmp / "cover.json")
    assert main(["cover", "--parts", parts, "--out", cover, "--svg", str(tmp / "c.svg")]) == 0
    assert main(["verify", "--cover", cover]) == 0
    assert main(["extend", "--input", s, "--cover", cover, "--part", "1", "--out", str(tmp / "e.json")]) == 0
    assert main(["interpolate", "--input", s, "--cover", cover, "--out", str(tmp / "b.json")]) == 0
    bundle = json.loads((tmp / "b.json").read_text())
    assert bundle["ok"] and bundle["max_residual"] <= 1e-6
    assert main(["interpolate", "--input", s, "--parts", parts, "--D", "auto"]) == 0
    assert main(["render", "--cover", cover, "--out", str(tmp / "r.svg")]) == 0
    assert (tmp / "r.svg").read_text() == (tmp / "c.svg").read_text()


def test_cli_error_exit_codes(files, tmp_path, capsys):
    tmp, s = files
    assert main(["decompose", "--input", s, "--n", "1", "--eps", "0.1", "--C", "0"]) == 2
    bad = write(tmp_path / "bad.json", {"schema": "trace-lab/1", "metric": "disk",
                                        "points": [{"re": 2, "im": 0}]})
    assert main(["separation", "--input", bad, "--eps", "1"]) == 2
    assert "/points" in capsys.readouterr().err
    assert main(["divdiff", "--input", str(tmp_path / "none.json"), "--order", "1"]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["divdiff"])
    assert exc.value.code == 2


def test_cli_lab_and_counterexample(tmp_path, capsys):
    out = str(tmp_path / "g.json")
    cl = str(tmp_path / "cl.json")
    assert main(["lab", "generate", "--kind", "clustered", "--param", "n=2", "--param", "L=4",
                 "--out", out, "--clusters-out", cl]) == 0
    first = (tmp_path / "g.json").read_text()
    assert main(["lab", "generate", "--kind", "clustered", "--param", "n=2", "--param", "L=4",
                 "--out", out]) == 0
    assert (tmp_path / "g.json").read_text() == first
    assert main(["counterexample", "--clusters", cl, "--n", "2", "--B", "1", "--json"]) == 0
    assert json.loads(capsys.readouterr().out)["ok"]
    rep = str(tmp_path / "rep.json")
    assert main(["lab", "run", "--suite", "cover", "--trials", "2", "--report", rep]) == 0
    assert json.loads((tmp_path / "rep.json").read_text())["summary"]["ok"]
    assert main(["lab", "generate", "--kind", "lattice", "--param", "pitch"]) == 2
