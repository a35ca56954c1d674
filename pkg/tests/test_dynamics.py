"""Trajectories, transport, Jacobi boundary-value problems, variation families."""

import math

import numpy as np
import pytest

from mtwcheck.dynamics import (
    c_exp,
    cost,
    jacobi_bvp,
    jacobi_residual,
    least_action_curve,
    lemma_suite,
    parallel_transport,
    shoot_velocity,
)
from mtwcheck.errors import (
    ConjugatePointError,
    PreconditionError,
    ShootingError,
)
from mtwcheck.geometry import (
    euclidean_metric,
    harmonic_potential,
    sphere_metric,
)

EQUATOR = np.pi / 2


# ---------------------------------------------------------------------------
# Least-action curves and the endpoint map
# ---------------------------------------------------------------------------


def test_flat_curve_is_straight_line(flat2):
    v = np.array([0.3, -0.8])
    path = least_action_curve(flat2, None, [0.0, 0.0], v)
    for k in (0, 57, 200):
        assert np.allclose(path.pos[k], path.tau[k] * v, atol=1e-14)
        assert np.allclose(path.vel[k], v, atol=1e-14)


def test_mechanical_curve_matches_sinh(flat2):
    # V = -|x|^2/2 gives the covariant Newton equation gamma'' = gamma,
    # so gamma(tau) = sinh(tau) v from the origin.
    v = np.array([0.7, 0.2])
    path = least_action_curve(flat2, harmonic_potential(2), [0.0, 0.0], v)
    for k in (50, 120, 200):
        t = path.tau[k]
        assert np.allclose(path.pos[k], math.sinh(t) * v, atol=1e-10)
        assert np.allclose(path.vel[k], math.cosh(t) * v, atol=1e-10)


def test_sphere_great_circle(sphere):
    path = least_action_curve(sphere, None, [EQUATOR, 0.0], [0.0, 1.0])
    # equator is a geodesic: theta stays constant, phi moves at unit speed
    assert np.allclose(path.pos[:, 0], EQUATOR, atol=1e-12)
    assert np.allclose(path.pos[:, 1], path.tau, atol=1e-12)
    speeds = [sphere.inner(path.pos[k], path.vel[k], path.vel[k])
              for k in (0, 100, 200)]
    assert np.allclose(speeds, 1.0, atol=1e-12)


@pytest.mark.parametrize("v0", [[0.9, 0.3], [0.0, 1.4]])
def test_energy_conservation(sphere, v0):
    path = least_action_curve(sphere, None, [1.1, -0.2], v0)
    assert path.energy_drift() <= 1e-8


def test_energy_conservation_mechanical(flat2):
    path = least_action_curve(flat2, harmonic_potential(2), [0.4, 0.1],
                              [0.2, -0.5])
    assert path.energy_drift() <= 1e-8


def test_c_exp_flat(flat2):
    y = c_exp(flat2, None, [0.2, -0.1], [0.5, 0.5])
    assert np.allclose(y, [0.7, 0.4], atol=1e-14)


def test_c_exp_mechanical_sinh(flat2):
    v = np.array([0.4, -0.3])
    y = c_exp(flat2, harmonic_potential(2), [0.0, 0.0], v)
    assert np.allclose(y, math.sinh(1.0) * v, atol=1e-10)


def test_c_exp_total_at_conjugate_length(sphere):
    # the endpoint map itself is defined even at |v| = pi; only the BVP
    # downstream flags the conjugate point
    y = c_exp(sphere, None, [EQUATOR, 0.0], [0.0, np.pi])
    assert np.allclose(y, [EQUATOR, np.pi], atol=1e-10)


# ---------------------------------------------------------------------------
# Two-point cost by shooting
# ---------------------------------------------------------------------------


def test_flat_cost_half_squared_distance(flat2):
    x = np.array([0.1, 0.2])
    y = np.array([0.9, -0.4])
    res = cost(flat2, None, x, y)
    assert res.value == pytest.approx(0.5 * float((y - x) @ (y - x)), abs=1e-12)
    assert res.endpoint_error <= 1e-10


def test_mechanical_cost_matches_closed_form(flat2):
    # minimizer gamma(tau) = sinh(tau)/sinh(1) * y has action coth(1)|y|^2/2
    y = np.array([0.6, -0.2])
    res = cost(flat2, harmonic_potential(2), [0.0, 0.0], y)
    closed = 0.5 / math.tanh(1.0) * float(y @ y)
    assert res.value == pytest.approx(closed, abs=1e-7)
    # initial velocity of the closed-form curve is y / sinh(1)
    assert np.allclose(res.initial_velocity, y / math.sinh(1.0), atol=1e-9)


def test_sphere_cost_is_half_arc_squared(sphere):
    res = cost(sphere, None, [EQUATOR, 0.0], [EQUATOR, 1.2])
    assert res.value == pytest.approx(0.5 * 1.2**2, abs=1e-9)


def test_antipodal_shooting_diverges(sphere):
    x = np.array([1.0, 0.3])
    y = np.array([np.pi - 1.0, 0.3 + np.pi])  # exact antipode of x
    with pytest.raises(ShootingError):
        cost(sphere, None, x, y)


def test_shoot_velocity_flat_is_difference(flat2):
    v, iters = shoot_velocity(flat2, None, [0.2, 0.1], [-0.3, 0.8])[:2]
    assert np.allclose(v, [-0.5, 0.7], atol=1e-12)


# ---------------------------------------------------------------------------
# Parallel transport
# ---------------------------------------------------------------------------


def test_flat_transport_constant(flat2):
    path = least_action_curve(flat2, None, [0.0, 0.0], [1.0, 0.5])
    frame = parallel_transport(path, [0.3, -0.7])
    assert np.allclose(frame.vectors, [0.3, -0.7], atol=1e-14)


def test_sphere_transport_preserves_norm(sphere):
    path = least_action_curve(sphere, None, [EQUATOR, 0.0],
                              [0.0, np.pi / 2])  # quarter great circle
    frame = parallel_transport(path, [0.4, 0.6])
    assert frame.norm_drift() <= 1e-9


def test_transport_preserves_angle_with_velocity(sphere):
    path = least_action_curve(sphere, None, [1.0, 0.2], [0.5, 0.4])
    frame = parallel_transport(path, [0.3, -0.2])
    angles = [
        float(np.asarray(frame.vectors[k]) @ sphere.matrix(path.pos[k]) @ path.vel[k])
        for k in (0, 67, 133, 200)
    ]
    assert np.ptp(angles) <= 1e-8


def test_conformal_transport_norm_drift(conformal_a3):
    path = least_action_curve(conformal_a3, None, [0.1, -0.1], [0.6, 0.3])
    frame = parallel_transport(path, [1.0, 1.0])
    assert frame.norm_drift() <= 1e-8


# ---------------------------------------------------------------------------
# Jacobi boundary-value problems
# ---------------------------------------------------------------------------


def test_flat_jacobi_linear_profile(flat2):
    path = least_action_curve(flat2, None, [0.0, 0.0], [0.4, 0.1])
    u = np.array([0.8, -0.5])
    sol = jacobi_bvp(path, u)
    for k in (0, 50, 150, 200):
        assert np.allclose(sol.J[k], (1 - path.tau[k]) * u, atol=1e-12)


def test_mechanical_jacobi_sinh_profile(flat2):
    # constant curve at the potential maximum; Hessian eigenvalue -mu^2
    mu = 1.3
    path = least_action_curve(flat2, harmonic_potential(2, omega=mu),
                              [0.0, 0.0], [0.0, 0.0])
    u = np.array([1.0, 0.0])
    sol = jacobi_bvp(path, u)
    for k in (40, 100, 160):
        t = path.tau[k]
        expect = math.sinh(mu * (1 - t)) / math.sinh(mu) * u
        assert np.allclose(sol.J[k], expect, atol=1e-10)


def test_jacobi_boundary_conditions(sphere):
    path = least_action_curve(sphere, None, [1.2, 0.3], [0.3, 0.9])
    u = np.array([0.7, 0.4])
    sol = jacobi_bvp(path, u)
    assert np.allclose(sol.J[0], u, atol=1e-12)
    assert np.allclose(sol.J[-1], 0.0, atol=1e-9)


def test_jacobi_residual_small(sphere):
    path = least_action_curve(sphere, None, [1.0, -0.2], [0.5, 0.7])
    sol = jacobi_bvp(path, [0.3, 0.9])
    assert jacobi_residual(sol) <= 1e-6


def test_jacobi_linearity(sphere):
    path = least_action_curve(sphere, None, [1.3, 0.1], [0.2, 0.8])
    u1 = np.array([1.0, 0.2])
    u2 = np.array([-0.4, 0.9])
    a, b = 1.7, -0.6
    s1 = jacobi_bvp(path, u1)
    s2 = jacobi_bvp(path, u2)
    s3 = jacobi_bvp(path, a * u1 + b * u2)
    assert np.allclose(s3.J, a * s1.J + b * s2.J, atol=1e-10)
    assert np.allclose(s3.initial_derivative,
                       a * s1.initial_derivative + b * s2.initial_derivative,
                       atol=1e-10)


def test_conjugate_point_detected(sphere):
    # a length-pi great-circle arc reaches the first conjugate point; the
    # fundamental-matrix block needs a fine grid for its conditioning to
    # cross the detection threshold
    path = least_action_curve(sphere, None, [EQUATOR, 0.0], [0.0, np.pi],
                              steps=2000)
    with pytest.raises(ConjugatePointError):
        jacobi_bvp(path, [1.0, 0.0])


def test_no_false_conjugate_short_arc(sphere):
    path = least_action_curve(sphere, None, [EQUATOR, 0.0], [0.0, 2.0],
                              steps=2000)
    sol = jacobi_bvp(path, [1.0, 0.0])
    assert np.allclose(sol.J[-1], 0.0, atol=1e-9)


# ---------------------------------------------------------------------------
# Variation-identity suite (spot checks; the full tolerance sweep is in
# the acceptance tests)
# ---------------------------------------------------------------------------


def test_lemma_suite_flat_all_zero(flat2):
    checks = lemma_suite(flat2, None, [0.0, 0.0], [1.0, 0.0], [0.6, -0.3],
                         [0.2, 0.9], taus=(0.3, 0.7))
    assert checks
    for c in checks:
        assert c.error <= 1e-6, (c.name, c.tau, c.error)


def test_lemma_suite_mechanical_mode(flat2):
    checks = lemma_suite(flat2, harmonic_potential(2, omega=0.8),
                         [0.0, 0.0], [1.0, 0.0], [0.6, -0.3], [0.2, 0.9],
                         taus=(0.35, 0.65))
    names = {c.name for c in checks}
    assert "curve-first-t" in names
    for c in checks:
        assert c.error <= 1e-3, (c.name, c.tau, c.error)


def test_lemma_suite_requires_normal_coordinates(sphere):
    # centers with nonvanishing Christoffel symbols are rejected rather
    # than silently producing uncorrected coordinate derivatives
    with pytest.raises(PreconditionError):
        lemma_suite(sphere, None, [1.0, 0.3], [1.0, 0.0], [0.6, -0.3],
                    [0.2, 0.9], taus=(0.5,))
