import numpy as np
import pytest

from kkgeom.errors import DegenerateMetricError, StructuralError
from kkgeom.liealg import (LAMBDA_PREFACTOR, LieAlgebraSpec, abelian_algebra,
                           adjoint_matrix, bracket, builtin_algebra,
                           cosmological_constant, killing_form, load_spec,
                           su2_algebra, u1_su2_algebra, validate_spec)


# ---------------------------------------------------------------------------
# brute-force oracles (plain loops, no einsum)


def jacobi_violation_loops(c):
    N = c.shape[0]
    worst = 0.0
    for e in range(N):
        for a in range(N):
            for b in range(N):
                for f in range(N):
                    total = 0.0
                    for d in range(N):
                        total += (c[e, d, a] * c[d, b, f]
                                  + c[e, d, b] * c[d, f, a]
                                  + c[e, d, f] * c[d, a, b])
                    worst = max(worst, abs(total))
    return worst


def ad_invariance_violation_loops(c, h):
    N = c.shape[0]
    worst = 0.0
    for a in range(N):
        for b in range(N):
            for e in range(N):
                total = 0.0
                for d in range(N):
                    total += c[d, a, b] * h[d, e] + c[d, a, e] * h[b, d]
                worst = max(worst, abs(total))
    return worst


def killing_form_loops(spec):
    cf = spec.fiber_c()
    r = spec.r
    K = np.zeros((r, r))
    for g in range(r):
        for e in range(r):
            for a in range(r):
                for b in range(r):
                    K[g, e] += cf[a, b, g] * cf[b, a, e]
    return K


def cosmological_constant_loops(spec):
    K = killing_form_loops(spec)
    kinv = np.linalg.inv(spec.k)
    total = 0.0
    for g in range(spec.r):
        for e in range(spec.r):
            total += K[g, e] * kinv[g, e]
    return -0.125 * total


# ---------------------------------------------------------------------------


def test_su2_passes_validation():
    for n in (2, 3, 4):
        report = validate_spec(su2_algebra(n), tol=1e-12)
        assert report.passed
        assert report.unimodular


def test_u1_su2_passes_validation():
    report = validate_spec(u1_su2_algebra(3), tol=1e-12)
    assert report.passed
    spec = u1_su2_algebra(3)
    assert spec.r == 4 and spec.N == 7


def test_builtin_specs_against_loop_oracles():
    for spec in (su2_algebra(2), u1_su2_algebra(2), abelian_algebra(3, 2)):
        assert jacobi_violation_loops(spec.c) < 1e-14
        assert ad_invariance_violation_loops(spec.c, spec.h) < 1e-14


def test_validation_matches_loop_oracles_on_random_perturbation():
    rng = np.random.default_rng(5)
    base = su2_algebra(2)
    c = base.c.copy()
    noise = 1e-3 * rng.normal(size=c.shape)
    noise = 0.5 * (noise - np.swapaxes(noise, 1, 2))  # keep antisymmetry
    spec = LieAlgebraSpec(base.n, base.r, c + noise, base.b, base.k)
    report = validate_spec(spec, tol=1e-10)
    assert not report.passed
    got = report.check("Jacobi identity").max_violation
    want = jacobi_violation_loops(spec.c)
    assert abs(got - want) < 1e-14


def test_mutated_spec_reports_offending_indices():
    base = su2_algebra(2)
    c = base.c.copy()
    # give [g1, g2] a spurious g2 component (0-based full indices 3, 4)
    c[3, 3, 4] += 0.5
    c[3, 4, 3] -= 0.5
    spec = LieAlgebraSpec(base.n, base.r, c, base.b, base.k)
    report = validate_spec(spec)
    assert not report.passed
    jac = report.check("Jacobi identity")
    assert not jac.passed
    assert abs(jac.max_violation - jacobi_violation_loops(spec.c)) < 1e-14
    # offending indices stay inside the touched fiber block (1-based 3..5)
    assert all(3 <= i <= 5 for i in jac.worst_indices)
    adinv = report.check("ad-invariance of h")
    assert not adinv.passed and all(3 <= i <= 5 for i in adinv.worst_indices)


def test_bracket_matches_structure_constants():
    spec = su2_algebra(2)
    rng = np.random.default_rng(1)
    x = rng.normal(size=5)
    y = rng.normal(size=5)
    want = np.zeros(5)
    for a in range(5):
        for b in range(5):
            for c in range(5):
                want[a] += spec.c[a, b, c] * x[b] * y[c]
    assert np.allclose(bracket(spec, x, y), want, atol=1e-14)
    # bracket with a central element vanishes
    central = np.array([1.0, -2.0, 0, 0, 0])
    assert np.abs(bracket(spec, central, y)).max() < 1e-14


def test_adjoint_matrix_is_h_antisymmetric():
    spec = su2_algebra(2)
    rng = np.random.default_rng(2)
    xi = rng.normal(size=5)
    ad = adjoint_matrix(spec, xi)
    m = spec.h @ ad
    assert np.abs(m + m.T).max() < 1e-12


def test_killing_form_su2():
    K = killing_form(su2_algebra(2))
    assert np.allclose(K, -2.0 * np.eye(3), atol=1e-14)
    assert np.allclose(K, killing_form_loops(su2_algebra(2)), atol=1e-14)


def test_cosmological_constant_su2():
    spec = su2_algebra(2)
    lam = cosmological_constant(spec)
    assert abs(lam - 0.75) < 1e-14
    assert abs(lam - cosmological_constant_loops(spec)) < 1e-14
    assert LAMBDA_PREFACTOR == -0.125


def test_cosmological_constant_scaling():
    # scaling the fiber metric k -> lambda k scales the constant by 1/lambda
    base = cosmological_constant(su2_algebra(2))
    for lam in (0.5, 2.0, 10.0):
        spec = su2_algebra(2, k=lam * np.eye(3))
        assert abs(cosmological_constant(spec) - base / lam) < 1e-14


def test_abelian_has_zero_constant():
    assert cosmological_constant(abelian_algebra(2, 3)) == 0.0
    assert np.abs(killing_form(abelian_algebra(2, 3))).max() == 0.0


def test_degenerate_metric_raises():
    base = su2_algebra(2)
    k = np.eye(3)
    k[0, 0] = 0.0
    k[1, 1] = 0.0
    bad_k = np.zeros((3, 3))
    spec = LieAlgebraSpec(base.n, base.r, base.c, base.b, bad_k)
    with pytest.raises(DegenerateMetricError):
        validate_spec(spec)


def test_structure_constants_frozen():
    spec = su2_algebra(2)
    with pytest.raises(ValueError):
        spec.c[0, 0, 0] = 1.0


def test_load_spec_wire_format():
    data = {
        "n": 1,
        "r": 3,
        "c": [[1, 2, 3, 1.0], [1, 3, 2, -1.0],
              [2, 3, 1, 1.0], [2, 1, 3, -1.0],
              [3, 1, 2, 1.0], [3, 2, 1, -1.0]],
    }
    spec = load_spec(data)
    assert spec.n == 1 and spec.r == 3
    assert validate_spec(spec).passed
    assert np.allclose(spec.fiber_c(), su2_algebra(1).fiber_c())


def test_load_spec_builtin_reference():
    spec = load_spec({"builtin": "su2", "n": 4})
    assert spec.n == 4 and spec.r == 3


def test_load_spec_bad_index():
    with pytest.raises(StructuralError):
        load_spec({"n": 1, "r": 1, "c": [[0, 1, 5, 1.0]]})


def test_builtin_unknown_name():
    with pytest.raises(StructuralError):
        builtin_algebra("so5", 2)


def test_central_block_enforced():
    # a bracket that does not stay inside the fiber block must fail
    c = np.zeros((3, 3, 3))
    c[0, 1, 2] = 1.0  # [g1, g2] has a central component
    c[0, 2, 1] = -1.0
    spec = LieAlgebraSpec(1, 2, c, np.eye(1), np.eye(2))
    report = validate_spec(spec)
    assert not report.check("central-block structure").passed
