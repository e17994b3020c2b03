import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from omnisec import actuation as act
from omnisec import geometry as geo
from omnisec.errors import DomainError, ZeroThrust

QUAD = act.planar_quad()
CUBE = act.omrav_cube()


def test_rotor_validation():
    with pytest.raises(DomainError):
        act.Rotor((0, 0, 0), thrust_bounds_n=(5.0, 1.0))
    with pytest.raises(DomainError):
        act.Rotor((0, 0, 0), spin=2)
    with pytest.raises(DomainError):
        act.RotorConfig(QUAD.rotors[:2], 1.0)
    with pytest.raises(DomainError):
        act.RotorConfig(QUAD.rotors, 0.0)


def test_thrust_direction():
    np.testing.assert_allclose(act.thrust_direction(act.Rotor((0, 0, 0))), [0, 0, 1])
    r = act.Rotor((0, 0, 0), geo.WORLD_X, math.pi / 2)
    np.testing.assert_allclose(act.thrust_direction(r), [0, -1, 0], atol=1e-15)
    a = 0.4
    r = act.Rotor((0, 0, 0), geo.WORLD_X, a)
    np.testing.assert_allclose(act.thrust_direction(r), [0, -math.sin(a), math.cos(a)], atol=1e-15)


def test_allocation_structure_planar_quad():
    a = act.allocation_matrix(QUAD)
    assert a.shape == (6, 4)
    np.testing.assert_array_equal(a[:2], 0.0)
    np.testing.assert_array_equal(a[2], 1.0)
    # Yaw row carries only the drag terms.
    np.testing.assert_allclose(a[5], [r.spin * r.drag_coeff_m for r in QUAD.rotors])
    np.testing.assert_array_equal(a @ np.zeros(4), np.zeros(6))


def test_allocation_matches_direct_summation():
    rng = np.random.default_rng(7)
    rotors = [act.Rotor(rng.uniform(-1, 1, 3), geo.unit(rng.standard_normal(3)), rng.uniform(0, math.pi),
                        int(rng.choice([-1, 1])), (-10.0, 10.0), rng.uniform(0.01, 0.05))
              for _ in range(6)]
    c = act.RotorConfig(tuple(rotors), 2.0)
    f = rng.uniform(-10, 10, 6)
    force = sum(act.thrust_direction(r) * fi for r, fi in zip(rotors, f))
    torque = sum((np.cross(r.position_m, act.thrust_direction(r))
                  + r.spin * r.drag_coeff_m * act.thrust_direction(r)) * fi for r, fi in zip(rotors, f))
    w = act.wrench(c, f)
    np.testing.assert_allclose(w.force_n, force, atol=1e-12)
    np.testing.assert_allclose(w.torque_nm, torque, atol=1e-12)


def test_gravity_alignment_at_identity():
    w = act.hover_wrench(CUBE, geo.Rotation.identity())
    assert tuple(w) == (0.0, 0.0, CUBE.mass_kg * geo.GRAVITY, 0.0, 0.0, 0.0)


def test_quad_hover_symmetric():
    f = act.hover_thrusts(QUAD)
    np.testing.assert_allclose(f, QUAD.mass_kg * geo.GRAVITY / 4, rtol=1e-9)
    assert act.efficiency(QUAD, f) == pytest.approx(1.0, abs=1e-12)


def test_quad_cannot_roll():
    roll = geo.Rotation.from_axis_angle(geo.WORLD_X, math.radians(30))
    assert act.hover_thrusts(QUAD, roll) is None


def _check_solution(c, rot, f):
    a = act.allocation_matrix(c)
    assert np.linalg.norm(a @ f - act.hover_wrench(c, rot)) <= 1e-6
    for fi, r in zip(f, c.rotors):
        assert r.thrust_bounds_n[0] - 1e-9 <= fi <= r.thrust_bounds_n[1] + 1e-9


def test_cube_hovers_at_100_random_orientations():
    for rot in act.sample_orientations(100, seed=0):
        f = act.hover_thrusts(CUBE, rot)
        assert f is not None
        _check_solution(CUBE, rot, f)


def test_cube_solution_minimizes_peak_load():
    # Any other feasible solution differs by a null-space vector; none has a smaller peak.
    a = act.allocation_matrix(CUBE)
    f = act.hover_thrusts(CUBE)
    peak = act.load_factor(CUBE, f)
    _, _, vt = np.linalg.svd(a)
    null = vt[6:]
    rng = np.random.default_rng(1)
    for _ in range(200):
        g = f + 0.05 * rng.standard_normal(null.shape[0]) @ null
        assert act.load_factor(CUBE, g) >= peak - 1e-7


def test_efficiency():
    f = act.hover_thrusts(CUBE)
    e = act.efficiency(CUBE, f)
    assert 0.0 < e < 1.0
    assert e < act.efficiency(QUAD, act.hover_thrusts(QUAD))
    opposed = act.RotorConfig((act.Rotor((0, 0, 0.1), thrust_bounds_n=(-1, 1)),
                               act.Rotor((0, 0, -0.1), geo.WORLD_X, math.pi, thrust_bounds_n=(-1, 1)),
                               act.Rotor((0.1, 0, 0), thrust_bounds_n=(-1, 1))), 1.0)
    assert act.efficiency(opposed, [1.0, 1.0, 0.0]) == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(ZeroThrust):
        act.efficiency(QUAD, np.zeros(4))


@settings(deadline=None, max_examples=30)
@given(st.lists(st.floats(0.0, 5.0), min_size=4, max_size=4))
def test_efficiency_bounded(f):
    if sum(f) == 0:
        return
    assert act.efficiency(QUAD, f) == pytest.approx(1.0, abs=1e-12)
    g = np.r_[f, f]
    assert act.efficiency(CUBE, g) <= 1.0 + 1e-12


def test_classify_quad_and_cube():
    q = act.classify(QUAD, 100, 0)
    assert q.static_hover and not q.omnidirectional_hover
    assert math.isnan(q.worst_margin)
    c = act.classify(CUBE, 100, 0)
    assert c.static_hover and c.omnidirectional_hover
    assert c.worst_margin > 0
    assert c.per_rotor_failure_hover == (True,) * 8
    assert 0 < c.mean_efficiency < 1
    assert c.max_residual <= 1e-6


def test_classify_deterministic_and_validated():
    assert act.classify(CUBE, 20, 3) == act.classify(CUBE, 20, 3)
    with pytest.raises(DomainError):
        act.classify(CUBE, 5, 0)


def test_monotone_failure():
    # Too heavy to hover at all: losing a rotor cannot help.
    heavy = act.omrav_cube(mass_kg=30.0)
    assert act.hover_thrusts(heavy) is None
    for i in range(8):
        assert act.hover_thrusts(heavy.with_failed(i)) is None


def test_omnidirectional_implies_static():
    for c in (QUAD, CUBE, act.omrav_cube(math.radians(10))):
        r = act.classify(c, 20, 0)
        assert r.static_hover or not r.omnidirectional_hover


def test_tilt_sweep():
    res = act.tilt_sweep(act.omrav_cube, (0.0, math.radians(60)), 7, 30, 0)
    assert math.isnan(res.margins[0])
    assert 0 < res.best_alpha_rad < math.pi / 2
    best = res.margins[res.alphas_rad.index(res.best_alpha_rad)]
    assert best > 0 and best == max(m for m in res.margins if not math.isnan(m))
    again = act.tilt_sweep(act.omrav_cube, (0.0, math.radians(60)), 7, 30, 0)
    assert again == res
    with pytest.raises(DomainError):
        act.tilt_sweep(act.omrav_cube, (0.0, 1.0), 1)


def test_tilt_sweep_tie_breaks_low():
    # Template that ignores the angle: every margin ties, the smallest angle wins.
    res = act.tilt_sweep(lambda a: CUBE, (0.1, 0.5), 3, 10, 0)
    assert res.best_alpha_rad == pytest.approx(0.1)


def test_config_dict_round_trip():
    back = act.RotorConfig.from_dict(CUBE.to_dict())
    np.testing.assert_allclose(act.allocation_matrix(back), act.allocation_matrix(CUBE), atol=1e-14)
    assert back.mass_kg == CUBE.mass_kg and back.name == CUBE.name
