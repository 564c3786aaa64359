"""
Test script for the map, Green function, ray tracing and rotation numbers.
"""

import math
import sys

import numpy as np
import pytest

from angles import Angle
from config import RunConfig
from dynamics import (CriticalOrbit, QuadraticMap, RayCache, RaySchedule, _warm_start, chord_side,
                      detect_rotation_number, equipotential, green, green_array, lands_at, pushforward_error,
                      trace_ray, trace_rays, winding_number)
from errors import ArgumentError, PreconditionError

RABBIT = complex(-0.122561166877, 0.744861766620)


def A(text):
    return Angle.parse(text)


def test_quadratic_map():
    f = QuadraticMap(-1)
    assert abs(f.alpha - (1 - math.sqrt(5)) / 2) < 1e-15
    assert abs(f.beta - (1 + math.sqrt(5)) / 2) < 1e-15
    assert f.alpha_prime == -f.alpha
    assert f.is_real and f.is_alpha_repelling()
    assert f.escape_radius == 4.0
    assert not QuadraticMap(0).is_alpha_repelling()
    with pytest.raises(ArgumentError):
        QuadraticMap(0, escape_radius=1.0)


def test_critical_orbit():
    orbit = CriticalOrbit(QuadraticMap(-1))
    assert orbit.period == 2
    assert orbit.canonical(5) == 1
    assert orbit[7] == -1
    with pytest.raises(PreconditionError):
        CriticalOrbit(QuadraticMap(1.0))


def test_green():
    f = QuadraticMap(0)
    assert abs(green(f, 2.0) - math.log(2.0)) < 1e-12
    assert green(f, 0.5) == 0.0
    z = np.array([2.0, 3j, 0.1])
    values = green_array(f, z)
    assert np.allclose(values, [math.log(2), math.log(3), 0.0])


def test_schedule():
    s = RaySchedule.from_config(RunConfig())
    assert float(s.level(4)) == 0.5
    assert s.index_for_level(0.5) == 4
    assert s.index_for_level(0.3) == 7
    assert s.index_for_depth(3) == 12
    with pytest.raises(ArgumentError):
        s.index_for_level(0.0)


def test_straight_radius():
    print("=" * 80)
    print("TEST: RAY OF ANGLE 0 FOR c = 0")
    print("=" * 80)
    trace = trace_ray(QuadraticMap(0), A("0"), 1e-8, cache=RayCache())
    assert np.all(np.abs(trace.points.imag) < 1e-9)
    assert np.all(trace.points.real > 1.0 - 1e-9)
    assert abs(trace.deepest - 1.0) < 1e-6
    print(f"✓ {len(trace.points)} samples on the positive real axis")


def test_basilica_rays_land_at_alpha():
    f = QuadraticMap(-1)
    config = RunConfig()
    t13, t23 = trace_rays(f, [A("1/3"), A("2/3")], config.ray_floor_level, config=config, cache=RayCache())
    for t in (t13, t23):
        assert lands_at(f, t, f.alpha, config.landing_tol, config.landing_samples, period=2)
        assert not lands_at(f, t, f.beta, config.landing_tol, config.landing_samples, period=2)
    image = trace_ray(f, A("2/3"), config.ray_floor_level, config=config)
    assert pushforward_error(f, t13, image, config.ray_substeps) < 1e-8
    print("✓ rays 1/3 and 2/3 land at alpha")


def test_rotation_numbers():
    print("\n" + "=" * 80)
    print("TEST: ROTATION NUMBER DETECTION")
    print("=" * 80)
    basilica = detect_rotation_number(QuadraticMap(-1), q_max=3, cache=RayCache())
    assert basilica.determined
    assert (basilica.p, basilica.q) == (1, 2)
    rabbit = detect_rotation_number(QuadraticMap(RABBIT), q_max=3, cache=RayCache())
    assert rabbit.determined
    assert list(rabbit.cycle) == [A("1/7"), A("2/7"), A("4/7")]
    print("✓ basilica 1/2, rabbit 1/3")

    assert not detect_rotation_number(QuadraticMap(0)).determined
    escaping = detect_rotation_number(QuadraticMap(0.3))
    assert not escaping.determined
    assert 'escapes' in escaping.reason


def test_top_level_points():
    schedule = RaySchedule.from_config(RunConfig())
    z, ok = _warm_start(QuadraticMap(0), [A("0"), A("1/4")], schedule)
    assert ok.all()
    assert abs(complex(z[0]) - math.e) < 1e-9
    assert abs(complex(z[1]) - 1j * math.e) < 1e-9
    for c, texts in ((-1, ("1/3", "2/3")), (RABBIT, ("1/7", "2/7", "4/7"))):
        f = QuadraticMap(c)
        z, ok = _warm_start(f, [A(t) for t in texts], schedule)
        assert ok.all()
        for point in z:
            assert abs(green(f, complex(point)) - schedule.top_level) < 1e-9
    print("✓ top-level points converge for c = 0, basilica and rabbit")


def test_equipotential():
    print("=" * 80)
    print("TEST: EQUIPOTENTIALS")
    print("=" * 80)
    circle = equipotential(QuadraticMap(0), 1.0, 32, cache=RayCache())
    assert len(circle.samples) == 33
    assert np.allclose(np.abs(circle.samples), math.e, atol=1e-9)
    f = QuadraticMap(-1)
    curve = equipotential(f, 0.5, 64, cache=RayCache())
    assert round(winding_number(curve.samples, 0j)) == 1
    assert round(winding_number(curve.samples, f.beta)) == 1
    assert round(winding_number(curve.samples, 10 + 0j)) == 0
    assert all(abs(green(f, complex(z)) - 0.5) < 1e-8 for z in curve.samples)
    with pytest.raises(ArgumentError):
        equipotential(f, 0.0, 64)
    with pytest.raises(ArgumentError):
        equipotential(f, 0.5, 8)
    print("✓ circle of radius e at c = 0; basilica level curve surrounds the Julia set")


def test_winding_and_chord():
    square = np.array([1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j, 1 + 1j])
    assert round(winding_number(square, 0j)) == 1
    assert round(winding_number(square, 3 + 0j)) == 0
    f = QuadraticMap(-1)
    assert chord_side(f, 0.5j) == -1
    assert chord_side(f, -0.5j) == +1
    assert chord_side(f, 0j) == 0
    with pytest.raises(PreconditionError):
        chord_side(QuadraticMap(0), 1j)


def test_cache_persistence(tmp_path):
    f = QuadraticMap(-1)
    cache = RayCache(tmp_path)
    schedule = RaySchedule.from_config(RunConfig())
    trace = trace_ray(f, A("1/3"), 1e-6, cache=cache, schedule=schedule)
    assert cache.save() >= 1
    assert (tmp_path / RayCache.INDEX_NAME).exists()
    reloaded = RayCache(tmp_path)
    assert len(reloaded) == len(cache)
    record = reloaded.get(f.c, A("1/3"), schedule)
    assert record is not None
    assert np.array_equal(record.points[:len(trace.points)], trace.points)


if __name__ == '__main__':
    sys.exit(pytest.main([__file__, '-v']))
