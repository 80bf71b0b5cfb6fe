import math

import numpy as np
import pytest

from tracelab.core import Metric, PointSet, Weight, eval_weight
from tracelab.covering import build_covering, params_for_parts
from tracelab.divdiff import ValuedSet, divided_difference, newton_coefficients
from tracelab.errors import ConditioningError, PreconditionError, VerificationError
from tracelab.interpolate import (OracleRequest, assemble, build_F, build_G, extend_values,
                                  newton_polynomial, oracle_interpolate, resolve_D,
                                  verify_trace_theorem)
from tracelab.lab import Scenario, generate
from tracelab.separation import max_eps


def covering_for(kind_params, seed, w, C_sep=0.5):
    g = generate(Scenario("union_of_separated", kind_params, seed), w)
    eps_sep = min(1.0, min(max_eps(g.points.subset(p), w, C_sep) for p in g.parts))
    eps, C = params_for_parts(0.999 * eps_sep, C_sep, w)
    return build_covering(g.points, g.parts, w, eps, C)


@pytest.fixture(scope="module")
def plane_cov():
    return covering_for({"n": 2, "extent": 6.0}, 3, Weight.make("log_one_plus_sq"))


@pytest.fixture(scope="module")
def disk_cov():
    return covering_for({"n": 2, "base": "radial_disk", "rings": 2}, 3, Weight.make("korenblum"))


def test_oracle_trivial_cases():
    f = oracle_interpolate(OracleRequest([1 + 1j], [2.5]))
    assert f(np.array([0, 7j])).tolist() == [2.5, 2.5]
    f = oracle_interpolate(OracleRequest([0, 1], [0, 1]))
    z = np.array([0.3, -2 + 1j, 5j])
    np.testing.assert_allclose(f(z), z, atol=1e-14)


def test_oracle_request_errors():
    with pytest.raises(PreconditionError):
        OracleRequest([0, 0], [1, 2])
    with pytest.raises(PreconditionError):
        OracleRequest([], [])
    with pytest.raises(PreconditionError):
        OracleRequest([0, 1], [1, np.nan])


def test_oracle_matches_newton_basis(rng):
    z = 2 * np.sqrt(rng.random(10)) * np.exp(2j * np.pi * rng.random(10))
    v = rng.normal(size=10) + 1j * rng.normal(size=10)
    f = oracle_interpolate(OracleRequest(z, v))
    assert np.max(np.abs(f(z) - v) / (1 + np.abs(v))) <= 1e-9
    P = newton_polynomial(z, v)
    grid = (np.linspace(-2, 2, 10)[None, :] + 1j * np.linspace(-2, 2, 10)[:, None]).ravel()
    a, b = f(grid), P(grid)
    assert np.max(np.abs(a - b) / np.maximum(1, np.abs(b))) <= 1e-8


def test_oracle_conditioning_error():
    z = np.linspace(0, 1, 80)
    with pytest.raises(ConditioningError):
        oracle_interpolate(OracleRequest(z, np.ones(80)))


def test_oracle_growth_report(logw):
    from tracelab.divdiff import GrowthBound

    req = OracleRequest([0, 1, 1j], [1, 2, 3], target=GrowthBound(1.0, 2.0))
    f, rep = oracle_interpolate(req, logw, return_report=True)
    assert rep.lebesgue >= 1 and rep.growth > 0


def test_newton_polynomial_examples(rng):
    P = newton_polynomial([0.5j], [3 - 1j])
    assert P(np.array([10.0]))[0] == 3 - 1j
    P = newton_polynomial([0, 1], [0, 1])
    assert P(np.array([2.5 + 1j]))[0] == pytest.approx(2.5 + 1j)
    z = rng.normal(size=3) + 1j * rng.normal(size=3)
    v = rng.normal(size=3) + 1j * rng.normal(size=3)
    P = newton_polynomial(z, v)
    assert np.max(np.abs(P(z) - v) / np.abs(v)) <= 1e-10
    np.testing.assert_allclose(P.coeffs, newton_coefficients(z, v), rtol=0, atol=0)
    vs = ValuedSet(PointSet(z), v)
    assert P.coeffs[2] == pytest.approx(divided_difference(vs, [0, 1, 2]), rel=1e-12)
    with pytest.raises(PreconditionError):
        newton_polynomial([], [])


def test_newton_polynomial_blaschke(rng):
    z = 0.7 * np.sqrt(rng.random(3)) * np.exp(2j * np.pi * rng.random(3))
    v = rng.normal(size=3) + 0j
    P = newton_polynomial(z, v, blaschke=True)
    np.testing.assert_allclose(P(z), v, atol=1e-12)


def test_extend_values_identity_for_one_part(logw):
    s = PointSet(np.array([0, 3, 6j]))
    cov = build_covering(s, [[0, 1, 2]], logw, 1.0, 0.5)
    ext = extend_values([1, 2, 3], cov, 0)
    assert ext.values.tolist() == [1, 2, 3]
    with pytest.raises(PreconditionError):
        extend_values([1, 2], cov, 0)


def test_extend_values_disk_constancy(plane_cov):
    cov = plane_cov
    for j in range(cov.n):
        vals = np.arange(1, len(cov.parts[j]) + 1, dtype=complex)
        ext = extend_values(vals, cov, j)
        pj = set(cov.parts[j])
        for c in cov.centers:
            mem = cov.members(c)
            got = {complex(ext.values[i]) for i in mem}
            assert len(got) == 1
            if not pj & set(mem):
                assert got == {0j}
            if len(mem) >= 2:
                assert divided_difference(ext, mem[:2]) == 0


def test_extend_values_requires_assignment(logw):
    s = PointSet(np.array([0, 3]))
    cov = build_covering(s, [[0, 1]], logw, 1.0, 0.5)
    cov.assignment = np.array([0, -1])
    with pytest.raises(VerificationError):
        extend_values([1, 2], cov, 0)


@pytest.mark.parametrize("which", ["plane", "disk"])
def test_F_and_G_contracts(which, plane_cov, disk_cov):
    cov = plane_cov if which == "plane" else disk_cov
    w = Weight.make("log_one_plus_sq" if which == "plane" else "korenblum")
    z = cov.points.points
    D = 0.7
    for c in cov.centers:
        F = build_F(cov, c, w)
        own = np.asarray(cov.members(c))
        other = np.flatnonzero(cov.assignment != c)
        assert np.max(np.abs(F(z[own]) - 1)) <= 1e-8
        if len(other):
            assert np.max(np.abs(F(z[other]))) <= 1e-8
        G = build_G(cov, c, D, w)
        target = math.exp(D * float(eval_weight(w, z[c])))
        assert np.max(np.abs(G(z[own]) - target)) <= 1e-8 * target


def test_F_single_disk_expansion(logw):
    s = PointSet(np.array([0, 3, 6]))
    cov = build_covering(s, [[0, 1, 2]], logw, 1.0, 0.5)
    F = build_F(cov, 0, logw)
    # f(alpha) = 1/alpha on the other nodes, so F vanishes there
    np.testing.assert_allclose(F(np.array([3, 6])), 0, atol=1e-14)
    assert F(np.array([0j]))[0] == 1


def test_G_examples(logw):
    s = PointSet(np.array([0, 0.27]))
    cov = build_covering(s, [[0], [1]], logw, 1.0, 0.0)
    G = build_G(cov, 0, 0.0, logw)
    np.testing.assert_allclose(G(s.points), [1, 1], atol=1e-15)
    G = build_G(cov, 0, 2.0, logw)
    np.testing.assert_allclose(G(s.points), [1, 1], atol=1e-14)  # p(0) = 0
    s = PointSet(np.array([3, 3.27]))
    cov = build_covering(s, [[0], [1]], logw, 1.0, 0.0)
    G = build_G(cov, 0, 1.0, logw)
    np.testing.assert_allclose(G(s.points), [10, 10], rtol=1e-13)


def test_assemble_zero_values(plane_cov, logw):
    omega = ValuedSet(plane_cov.points, np.zeros(len(plane_cov.points)))
    b = assemble(omega, plane_cov, logw)
    assert np.all(b.f(plane_cov.points.points) == 0)


@pytest.mark.parametrize("D", [0.0, 0.5, "auto"])
def test_assemble_interpolates(D, plane_cov, logw, rng):
    from tracelab.interpolate import random_values

    omega = ValuedSet(plane_cov.points, random_values(rng, plane_cov.points, logw))
    b = assemble(omega, plane_cov, logw, D=D)
    assert b.max_residual <= 1e-6
    assert b.max_leakage <= 1e-7
    assert b.D == resolve_D(D, logw)
    js = b.to_json()
    assert js["max_residual"] == b.max_residual and len(js["centers"]) == len(plane_cov.centers)


def test_assemble_disk(disk_cov, rng):
    from tracelab.interpolate import random_values

    w = Weight.make("korenblum")
    omega = ValuedSet(disk_cov.points, random_values(rng, disk_cov.points, w))
    b = assemble(omega, disk_cov, w)
    assert b.max_residual <= 1e-6 and b.max_leakage <= 1e-7


def test_assemble_single_part_and_singleton(logw):
    s = PointSet(np.array([0, 3, 6j]))
    cov = build_covering(s, [[0, 1, 2]], logw, 1.0, 0.5)
    b = assemble(ValuedSet(s, [1, -2, 3j]), cov, logw)
    assert b.max_residual <= 1e-12
    s = PointSet(np.array([2 + 1j]))
    cov = build_covering(s, [[0]], logw, 1.0, 0.5)
    b = assemble(ValuedSet(s, [4 - 1j]), cov, logw)
    assert b.f(np.array([0, 10j])).tolist() == [4 - 1j, 4 - 1j]


def test_resolve_D(logw):
    assert resolve_D("auto", logw, 1.0) == 3.0
    with pytest.raises(PreconditionError):
        resolve_D(-1, logw)


def test_assemble_rejects_mismatched_points(plane_cov, logw):
    other = ValuedSet(PointSet(np.array([0, 1])), [0, 0])
    with pytest.raises(PreconditionError):
        assemble(other, plane_cov, logw)


def test_verify_trace_theorem(plane_cov, logw):
    rep = verify_trace_theorem(plane_cov, logw, trials=4, seed=1)
    assert rep.ok, rep.to_json()
    assert max(rep.necessity) <= 1e-6
