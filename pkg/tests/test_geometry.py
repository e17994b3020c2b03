import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from omnisec import geometry as geo
from omnisec.errors import CoincidentPoints, DomainError, ZeroVector

finite = st.floats(-1e3, 1e3, allow_nan=False)
vec = st.tuples(finite, finite, finite).filter(lambda v: math.hypot(*v) > 1e-3)


def test_unit_normalizes():
    np.testing.assert_allclose(geo.unit([3.0, 0.0, 4.0]), [0.6, 0.0, 0.8])


def test_unit_zero_vector():
    with pytest.raises(ZeroVector):
        geo.unit([0.0, 0.0, 1e-13])


def test_as_vec3_rejects_bad_shapes():
    with pytest.raises(DomainError):
        geo.as_vec3([1.0, 2.0])
    with pytest.raises(DomainError):
        geo.as_vec3([1.0, float("nan"), 0.0])


def test_angle_exact_at_parallel_and_antiparallel():
    z = geo.WORLD_Z
    assert geo.angle_between(z, z) == 0.0
    assert geo.angle_between(z, (0.0, 0.0, -1.0)) == math.pi
    assert geo.angle_between(geo.WORLD_X, z) == pytest.approx(math.pi / 2, abs=1e-15)


def test_angle_small_separation_precision():
    # arccos of the dot product would lose about half the digits here.
    eps = 1e-9
    b = geo.unit([math.sin(eps), 0.0, math.cos(eps)])
    assert geo.angle_between(geo.WORLD_Z, b) == pytest.approx(eps, rel=1e-9)


@given(vec, vec)
def test_angle_matches_arccos_oracle(a, b):
    ua, ub = geo.unit(a), geo.unit(b)
    ref = math.acos(max(-1.0, min(1.0, float(np.dot(ua, ub)))))
    assert geo.angle_between(ua, ub) == pytest.approx(ref, abs=1e-7)


def test_link_direction_and_distance():
    d, dist = geo.link([0, 0, 0], [0, 3, 4])
    assert dist == 5.0
    np.testing.assert_allclose(d, [0.0, 0.6, 0.8])


def test_link_coincident():
    with pytest.raises(CoincidentPoints):
        geo.link([1, 2, 3], [1, 2, 3 + 1e-12])


def test_rotation_rejects_non_orthonormal():
    with pytest.raises(DomainError):
        geo.Rotation(np.diag([1.0, 1.0, -1.0]))
    with pytest.raises(DomainError):
        geo.Rotation(2 * np.eye(3))


def test_axis_angle_quarter_turn():
    r = geo.Rotation.from_axis_angle(geo.WORLD_X, math.pi / 2)
    np.testing.assert_allclose(r.apply(geo.WORLD_Z), [0.0, -1.0, 0.0], atol=1e-15)


@given(vec)
def test_from_antenna_axis_sets_axis(a):
    u = geo.unit(a)
    r = geo.Rotation.from_antenna_axis(u)
    np.testing.assert_allclose(r.antenna_axis, u, atol=1e-15)
    # Zero roll: body x is normal to the axis and in the plane of world x and the axis.
    bx = r.matrix[:, 0]
    assert abs(np.dot(bx, u)) < 1e-12
    if abs(u[0]) < 1 - 1e-6:
        assert abs(np.linalg.det(np.array([bx, geo.WORLD_X, u]))) < 1e-12


def test_from_antenna_axis_bit_exact_for_unit_input():
    u = tuple(geo.unit([0.3, -0.2, 0.9]).tolist())
    assert tuple(geo.Rotation.from_antenna_axis(u).antenna_axis.tolist()) == u


def test_from_antenna_axis_parallel_to_x():
    r = geo.Rotation.from_antenna_axis(geo.WORLD_X)
    np.testing.assert_allclose(r.antenna_axis, geo.WORLD_X)
    np.testing.assert_allclose(r.matrix[:, 0], geo.WORLD_Y)


def test_quaternion_round_trip():
    rng = np.random.default_rng(3)
    for r in geo.Rotation.random(rng, 50):
        back = geo.Rotation.from_quaternion(r.as_quaternion())
        assert back.allclose(r, atol=1e-12)


def test_compose_and_inverse():
    rng = np.random.default_rng(4)
    a, b = geo.Rotation.random(rng, 2)
    assert (a @ a.inverse()).allclose(geo.Rotation.identity())
    v = np.array([0.1, -2.0, 0.7])
    np.testing.assert_allclose((a @ b).apply(v), a.apply(b.apply(v)), atol=1e-12)


@settings(deadline=None)
@given(st.integers(0, 2 ** 32))
def test_random_rotations_are_proper(seed):
    for r in geo.Rotation.random(np.random.default_rng(seed), 5):
        m = r.matrix
        np.testing.assert_allclose(m.T @ m, np.eye(3), atol=1e-12)
        assert np.linalg.det(m) == pytest.approx(1.0, abs=1e-12)


def test_random_rotations_uniform_axis_mean():
    # Uniform SO(3): the antenna axis is uniform on the sphere, mean ~ 0, E[z^2] = 1/3.
    axes = np.array([r.antenna_axis for r in geo.Rotation.random(np.random.default_rng(0), 4000)])
    assert np.all(np.abs(axes.mean(axis=0)) < 0.05)
    assert np.mean(axes[:, 2] ** 2) == pytest.approx(1 / 3, abs=0.02)


def test_pose_is_read_only():
    p = geo.Pose([1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        p.position[0] = 5.0
    np.testing.assert_array_equal(p.antenna_axis, geo.WORLD_Z)
