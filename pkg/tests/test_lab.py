import numpy as np
import pytest

from tracelab.core import Metric, Weight
from tracelab.errors import PreconditionError
from tracelab.io import dumps
from tracelab.lab import Scenario, generate, run_suite
from tracelab.separation import SeparationParams, count_condition, is_weakly_separated, max_eps


def test_lattice(logw):
    g = generate(Scenario("lattice"), logw)
    assert len(g.points) == 16
    assert max_eps(g.points, logw, 0.0) >= 1
    assert is_weakly_separated(g.points, logw, SeparationParams(1.0, 0.0)).ok


def test_perturbed_lattice_deterministic(logw):
    a = generate(Scenario("perturbed_lattice", seed=3), logw).points
    b = generate(Scenario("perturbed_lattice", seed=3), logw).points
    c = generate(Scenario("perturbed_lattice", seed=4), logw).points
    assert a == b and a != c


def test_radial_disk_inside():
    g = generate(Scenario("radial_disk", {"rings": 5, "m": 3}, 1))
    assert g.points.metric is Metric.DISK
    assert np.all(np.abs(g.points.points) < 1)
    assert len(g.points) == 3 * (2 + 4 + 8 + 16 + 32)


def test_clustered_family(logw):
    g = generate(Scenario("clustered", {"n": 2, "L": 5}, 0), logw)
    fam = g.clusters
    assert len(fam) == 5 and fam.C == 1.0 * (2 * logw.D0 + 1)
    fam.validate(logw, 2)
    assert len(g.points) == 5 * 3
    s, index = fam.pointset()
    for cl, idx in zip(fam.clusters, index):
        assert count_condition(s.subset(idx), logw, SeparationParams(cl.scale, fam.C)) == 3


def test_clustered_needs_weight_and_feasible_radius(logw):
    with pytest.raises(PreconditionError):
        generate(Scenario("clustered"))
    with pytest.raises(PreconditionError):
        generate(Scenario("clustered", {"n": 4, "L": 400, "B": 60.0}), logw)


def test_union_parts_separated(logw):
    for base in ("lattice", "radial_disk"):
        w = Weight.make("korenblum") if base == "radial_disk" else logw
        g = generate(Scenario("union_of_separated", {"n": 3, "base": base}, 2), w)
        assert len(g.parts) == 3
        assert sorted(i for p in g.parts for i in p) == list(range(len(g.points)))
        for p in g.parts:
            assert max_eps(g.points.subset(p), w, 0.5) > 0.01


def test_scenario_errors():
    with pytest.raises(PreconditionError):
        Scenario("spiral")
    with pytest.raises(PreconditionError):
        Scenario("lattice", {"pitch": 2})


def test_run_suite_report_shape():
    rep = run_suite("equiv", 2, 5)
    assert rep["schema"] == "trace-lab/1" and rep["prng"] == "numpy.random.PCG64"
    assert rep["summary"]["ok"]
    assert {"suite", "trial", "invariant", "pass"} <= set(rep["records"][0])
    with pytest.raises(PreconditionError):
        run_suite("nope", 1)


def test_run_suite_deterministic():
    assert dumps(run_suite("cover", 3, 9)) == dumps(run_suite("cover", 3, 9))
    assert dumps(run_suite("cover", 3, 9)) != dumps(run_suite("cover", 3, 10))
