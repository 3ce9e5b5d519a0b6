import numpy as np
import pytest
from scipy.linalg import expm

from kkgeom.basegeo import ChartSpec, CoframeField, GaugeField, geometry_at_point
from kkgeom.bundle import (GroupElement, MatrixRep, PathSpec, adjoint_of,
                           builtin_rep, lift_path, verify_deextra,
                           verify_gauge_covariance)
from kkgeom.errors import IntegratorError, StructuralError
from kkgeom.liealg import su2_algebra


def su2_setup(seed=0):
    rep = builtin_rep("su2_as_so3")
    spec = rep.spec
    chart = ChartSpec(2)
    cof = CoframeField(chart, [["1+0.1*x2^2", "0.1*x1"],
                               ["0", "1+0.2*sin(x1)"]], spec.b)
    gauge = GaugeField(spec, chart,
                       [["0.3*x2", "0.1*x1"],
                        ["0.1*x1*x2", "0.2*sin(x2)"],
                        ["0.1*x2^2", "0"]])
    geom = geometry_at_point(cof, gauge, spec, np.array([0.4, -0.3]))
    return rep, spec, geom


# ---------------------------------------------------------------------------
# representations


def test_builtin_reps_close_on_structure_constants():
    for name in ("su2_as_so3", "u1_as_so2", "product"):
        rep = builtin_rep(name)
        assert rep.closure_residual() < 1e-12


def test_su2_rep_bracket_example():
    rep = builtin_rep("su2_as_so3")
    T = rep.T
    comm = T[0] @ T[1] - T[1] @ T[0]
    assert np.allclose(comm, T[2])


def test_rep_rejects_wrong_generators():
    spec = su2_algebra(2)
    with pytest.raises(StructuralError):
        MatrixRep(spec, np.zeros((3, 3, 3)))  # zero matrices cannot close
    bad = builtin_rep("su2_as_so3").T.copy()
    bad[0] = 2.0 * bad[0]
    with pytest.raises(StructuralError):
        MatrixRep(spec, bad)


def test_unknown_rep_name():
    with pytest.raises(StructuralError):
        builtin_rep("so5_as_anything")


def test_group_element_must_be_orthogonal():
    rep = builtin_rep("su2_as_so3")
    with pytest.raises(StructuralError):
        GroupElement(rep, 1.5 * np.eye(3))


# ---------------------------------------------------------------------------
# adjoint gauge map


def test_adjoint_of_identity():
    rep = builtin_rep("su2_as_so3")
    assert np.allclose(adjoint_of(rep.identity_element()), np.eye(rep.spec.N))


def test_adjoint_fixes_central_block():
    rep = builtin_rep("su2_as_so3")
    g = rep.exp(np.array([0.7, -0.2, 1.1]))
    S = adjoint_of(g)
    n = rep.spec.n
    assert np.allclose(S[:n, :n], np.eye(n))
    assert np.abs(S[:n, n:]).max() < 1e-12
    assert np.abs(S[n:, :n]).max() < 1e-12


def test_adjoint_preserves_h_and_is_homomorphism():
    rep = builtin_rep("product")
    h = rep.spec.h
    rng = np.random.default_rng(1)
    for _ in range(10):
        g1 = rep.exp(rng.normal(size=rep.spec.r))
        g2 = rep.exp(rng.normal(size=rep.spec.r))
        S1, S2 = adjoint_of(g1), adjoint_of(g2)
        assert np.abs(S1.T @ h @ S1 - h).max() < 1e-10
        assert np.abs(adjoint_of(g1 @ g2) - S1 @ S2).max() < 1e-10


def test_adjoint_rotation_oracle():
    # Ad_{exp(t T3)} rotates the (T1, T2) plane by angle t
    rep = builtin_rep("su2_as_so3")
    t = 0.9
    S = adjoint_of(rep.exp(np.array([0.0, 0.0, t])))
    fiber = S[2:, 2:]
    want = np.array([[np.cos(t), -np.sin(t), 0],
                     [np.sin(t), np.cos(t), 0],
                     [0, 0, 1.0]])
    assert np.abs(fiber - want).max() < 1e-12


# ---------------------------------------------------------------------------
# path lifting


def test_lift_zero_velocity_is_constant():
    rep = builtin_rep("su2_as_so3")
    g0 = rep.exp(np.array([0.3, 0.1, -0.4]))
    path = PathSpec(rep, lambda t: np.zeros(3), g0)
    out = lift_path(path, 10)
    assert all(np.allclose(g.matrix, g0.matrix, atol=1e-14) for g in out)


def test_lift_constant_velocity_matches_exponential():
    rep = builtin_rep("su2_as_so3")
    xi = np.array([0.3, -0.7, 0.5])
    path = PathSpec(rep, lambda t: xi, rep.identity_element())
    out = lift_path(path, 1000)
    want = expm(rep.algebra_element(xi))
    assert np.abs(out[-1].matrix - want).max() < 1e-8


def test_lift_piecewise_constant_composes_exponentials():
    # xi1 for the first half, xi2 for the second; the integrator needs the
    # jump on a segment boundary, so each half is lifted time-rescaled
    rep = builtin_rep("su2_as_so3")
    xi1 = np.array([0.4, 0.0, -0.2])
    xi2 = np.array([-0.1, 0.6, 0.3])
    first = lift_path(PathSpec(rep, lambda t: 0.5 * xi1, rep.identity_element()), 1000)
    second = lift_path(PathSpec(rep, lambda t: 0.5 * xi2, first[-1]), 1000)
    want = expm(0.5 * rep.algebra_element(xi1)) @ expm(0.5 * rep.algebra_element(xi2))
    assert np.abs(second[-1].matrix - want).max() < 1e-8


def test_lift_convergence_order():
    rep = builtin_rep("su2_as_so3")

    def v(t):
        return np.array([np.sin(3 * t), t, np.cos(2 * t)])

    def final(steps):
        return lift_path(PathSpec(rep, v, rep.identity_element()), steps)[-1].matrix

    ref = final(4000)
    errs = [np.abs(final(s) - ref).max() for s in (50, 100, 200)]
    orders = [np.log2(errs[i] / errs[i + 1]) for i in range(2)]
    assert min(orders) >= 3.8


def test_lift_reverse_path_returns_to_start():
    rep = builtin_rep("product")
    rng = np.random.default_rng(2)
    g0 = rep.exp(rng.normal(size=4))

    def v(t):
        return np.array([np.sin(t), t ** 2, 0.3, np.cos(3 * t)])

    forward = lift_path(PathSpec(rep, v, g0), 400)
    back = lift_path(PathSpec(rep, lambda t: -v(1.0 - t), forward[-1]), 400)
    assert np.abs(back[-1].matrix - g0.matrix).max() < 1e-6


def test_lift_stays_on_manifold():
    rep = builtin_rep("su2_as_so3")
    path = PathSpec(rep, lambda t: np.array([2.0, -1.0, 3.0]), rep.identity_element())
    for g in lift_path(path, 50):
        assert g.manifold_residual() < 1e-8


def test_lift_rejects_zero_steps():
    rep = builtin_rep("su2_as_so3")
    path = PathSpec(rep, lambda t: np.zeros(3), rep.identity_element())
    with pytest.raises(StructuralError):
        lift_path(path, 0)


def test_sampled_path_interpolation():
    rep = builtin_rep("u1_as_so2")
    times = [0.0, 0.5, 1.0]
    values = [[0.0], [1.0], [0.0]]
    path = PathSpec.sampled(rep, times, values, rep.identity_element())
    assert path.v(0.25)[0] == 0.5
    out = lift_path(path, 200)
    # total rotation angle = integral of v = 1/2
    want = expm(0.5 * rep.T[0])
    assert np.abs(out[-1].matrix - want).max() < 1e-6


# ---------------------------------------------------------------------------
# structural identity checks


def test_deextra_abelian_zero_gauge():
    rep = builtin_rep("u1_as_so2")
    spec = rep.spec
    chart = ChartSpec(2)
    cof = CoframeField(chart, [["1", "0"], ["0", "1"]], spec.b)
    geom = geometry_at_point(cof, GaugeField.zero(spec, chart), spec,
                             np.array([0.1, 0.2]))
    assert verify_deextra(geom, rep.identity_element(), spec) < 1e-14


def test_deextra_su2_zero_gauge_along_fiber():
    rep, spec, _ = su2_setup()
    chart = ChartSpec(2)
    cof = CoframeField(chart, [["1", "0"], ["0", "1"]], spec.b)
    geom = geometry_at_point(cof, GaugeField.zero(spec, chart), spec,
                             np.array([0.1, 0.2]))
    g = rep.exp(np.array([0.2, -0.1, 0.3]))
    res = verify_deextra(geom, g, spec, s=np.array([0.4, -0.3, 0.2]))
    assert res < 1e-8


def test_deextra_generic_gauge():
    rep, spec, geom = su2_setup()
    g = rep.exp(np.array([0.5, 0.2, -0.4]))
    assert verify_deextra(geom, g, spec) < 1e-6
    assert verify_deextra(geom, g, spec, s=np.array([0.3, 0.1, -0.2])) < 1e-6


def test_deextra_rejects_mismatched_rep():
    _, spec, geom = su2_setup()
    rep1 = builtin_rep("u1_as_so2")
    with pytest.raises(StructuralError):
        verify_deextra(geom, rep1.identity_element(), spec)


def test_gauge_covariance_identity_element():
    rep, spec, geom = su2_setup()
    # constant gauge curve through the identity: phi = omega exactly
    assert verify_gauge_covariance(geom, rep.identity_element(), spec,
                                   vary=False) < 1e-10


def test_gauge_covariance_constant_conjugation():
    rep, spec, geom = su2_setup()
    g = rep.exp(np.array([0.8, -0.5, 0.3]))
    assert verify_gauge_covariance(geom, g, spec, vary=False) < 1e-10


def test_gauge_covariance_varying_along_fiber():
    rep, spec, geom = su2_setup()
    g = rep.exp(np.array([0.2, 0.5, -0.1]))
    assert verify_gauge_covariance(geom, g, spec) < 1e-5


def test_gauge_covariance_product_rep():
    rep = builtin_rep("product")
    spec = rep.spec
    chart = ChartSpec(2)
    cof = CoframeField(chart, [["1", "0.2*x2"], ["0", "1+0.1*x1^2"]], spec.b)
    gauge = GaugeField(spec, chart,
                       [["0.2*x2", "0"], ["0.1*x1", "0.1*x2"],
                        ["0", "0.3*x1"], ["0.05*x1*x2", "0.1*sin(x1)"]])
    geom = geometry_at_point(cof, gauge, spec, np.array([0.3, 0.6]))
    g = rep.exp(np.array([0.4, 0.1, -0.3, 0.2]))
    assert verify_gauge_covariance(geom, g, spec) < 1e-5
