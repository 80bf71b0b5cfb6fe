import math

import numpy as np
import pytest

from tracelab.core import (GrowthBound, Metric, PointSet, Weight, certify_weight_axioms,
                           distance, eval_weight, grid_sample, mobius, pairwise_distances)
from tracelab.errors import DomainError, SchemaError


def test_weight_values_at_known_points(logw, korenblum):
    assert eval_weight(logw, 0) == 0.0
    assert eval_weight(korenblum, 0) == 0.0
    w = Weight.make("nonisotropic")
    assert eval_weight(w, 1j) == pytest.approx(1 + math.log(2), abs=1e-15)


def test_weight_vectorised_and_nonnegative(logw):
    z = np.array([0, 1, 1j, 3 - 4j])
    p = eval_weight(logw, z)
    assert p.shape == (4,)
    assert np.all(p >= 0)
    assert p[3] == pytest.approx(math.log(26))


def test_power_abs_weight():
    w = Weight.make("power_abs", params={"a": 2.0})
    assert eval_weight(w, 3 + 4j) == pytest.approx(25.0)
    assert w.D0 == 2.0 and w.E0 == 2.0


def test_disk_weight_rejects_boundary(korenblum):
    with pytest.raises(DomainError):
        eval_weight(korenblum, 1.0)
    with pytest.raises(DomainError):
        eval_weight(korenblum, np.array([0.2, 1.5j]))


def test_custom_radial_table():
    w = Weight.make("custom-table", params={"r": [0, 1, 2], "p": [0, 1, 4]}, K=0.1, D0=4, E0=4)
    assert eval_weight(w, 1.5) == pytest.approx(2.5)
    with pytest.raises(DomainError):
        eval_weight(w, 3.0)


def test_custom_grid_table():
    w = Weight.make("custom-table", params={"x": [-1, 1], "y": [-1, 1], "p": [[0, 2], [2, 4]]},
                    K=0.1, D0=4, E0=4)
    assert eval_weight(w, 0j) == pytest.approx(2.0)
    with pytest.raises(DomainError):
        eval_weight(w, 2 + 0j)


def test_weight_json_round_trip(logw):
    assert Weight.from_json(logw.to_json()) == logw
    with pytest.raises(SchemaError):
        Weight.from_json({"kind": "log_one_plus_sq", "K": 1})


def test_unknown_weight_kind():
    with pytest.raises(SchemaError):
        Weight.make("gaussian")


def test_distance_examples():
    assert distance(Metric.PLANE, 0, 3 + 4j) == 5.0
    zeta = 0.3 - 0.4j
    assert distance(Metric.DISK, 0, zeta) == pytest.approx(abs(zeta), abs=1e-16)
    assert distance(Metric.DISK, 0.5, 0.5) == 0.0
    with pytest.raises(DomainError):
        distance(Metric.DISK, 0, 1.0)


def test_distance_symmetry_is_bitwise(rng):
    z = 0.9 * np.sqrt(rng.random(200)) * np.exp(2j * np.pi * rng.random(200))
    w = 0.9 * np.sqrt(rng.random(200)) * np.exp(2j * np.pi * rng.random(200))
    for m in Metric:
        for a, b in zip(z, w):
            assert distance(m, a, b) == distance(m, b, a)
    d = pairwise_distances(Metric.DISK, z[:30], z[:30])
    assert np.array_equal(d, d.T)
    assert np.all(d < 1)


def test_mobius_invariance(rng):
    z = 0.95 * np.sqrt(rng.random(100)) * np.exp(2j * np.pi * rng.random(100))
    w = 0.95 * np.sqrt(rng.random(100)) * np.exp(2j * np.pi * rng.random(100))
    a = 0.6 + 0.3j
    for x, y in zip(z, w):
        assert abs(distance(Metric.DISK, mobius(a, x), mobius(a, y)) - distance(Metric.DISK, x, y)) < 1e-12


def test_pointset_validation():
    with pytest.raises(DomainError, match="0 and 2"):
        PointSet(np.array([1, 2, 1]))
    with pytest.raises(DomainError):
        PointSet(np.array([0.5, 1.0]), Metric.DISK)
    s = PointSet(np.array([1, 2j]))
    with pytest.raises(ValueError):
        s.points[0] = 5


def test_growth_bound():
    GrowthBound(0.0, 1.0)
    with pytest.raises(ValueError):
        GrowthBound(-1, 1)
    with pytest.raises(ValueError):
        GrowthBound(1, math.inf)


def test_certify_log_weight_on_grid(logw):
    # K=1, D0=2, E0=2 on the |z| <= 10 grid
    rep = certify_weight_axioms(logw, grid_sample(10, 0.5))
    assert rep.w1_ok and rep.w2_ok


def test_certify_power_abs_with_too_large_K():
    w = Weight.make("power_abs", params={"a": 1.0}, K=10.0)
    rep = certify_weight_axioms(w, PointSet(np.array([0.5, 2, 10])))
    assert not rep.w1_ok
    assert rep.witnesses["w1"] is not None


def test_certify_without_pairs_is_vacuous(logw):
    rep = certify_weight_axioms(logw, PointSet(np.array([0, 100])), pair_radius=1.0)
    assert rep.w2_ok


def test_w2_monotone_in_constants():
    w = Weight.make("log_one_plus_sq", D0=1.0, E0=0.5)
    s = grid_sample(6, 0.5)
    assert not certify_weight_axioms(w, s).w2_ok
    big = Weight.make("log_one_plus_sq", D0=2.0, E0=2.0)
    assert certify_weight_axioms(big, s).w2_ok
    assert certify_weight_axioms(Weight.make("log_one_plus_sq", D0=3.0, E0=2.5), s).w2_ok


def test_korenblum_axioms_on_disk_sample(korenblum):
    s = grid_sample(0.97, 0.05, Metric.DISK)
    rep = certify_weight_axioms(korenblum, s)
    assert rep.ok


@pytest.mark.parametrize("kind,params", [("nonisotropic", None), ("power_abs", {"a": 0.5}),
                                         ("power_abs", {"a": 1.0}), ("power_abs", {"a": 2.0})])
def test_default_constants_certify(kind, params):
    w = Weight.make(kind, params=params) if params else Weight.make(kind)
    rep = certify_weight_axioms(w, grid_sample(8, 0.25))
    assert rep.ok, rep
