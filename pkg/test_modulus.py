"""
Test script for modulus arithmetic, verdicts and the grid solver.
Solver tests run on reduced grids.
"""

import math
import sys

import numpy as np
import pytest

from dynamics import winding_number
from errors import ArgumentError, NumericError
from modulus import (FAIL, INCONCLUSIVE, PASS, Modulus, annulus_modulus, check_degree_rule, check_pi_bounds, circle,
                     compare_le, covering_pair, cylinder, densify, eccentric_modulus, from_masks, harmonic_diff,
                     harmonic_sum, l_shape, log_polar_annulus, parallel_law, polygon_annulus, power_preimage,
                     quad_modulus, rectangle, root_pullback, round_annulus, round_modulus, series_law, solve_energy,
                     square, square_frame, stacked_rectangles, strip_modulus)


def test_harmonic_arithmetic():
    assert harmonic_sum(1.0, 1.0).value == 0.5
    assert harmonic_sum(0.0, 1.0).value == 0.0
    assert harmonic_sum(math.inf, 2.0).value == 2.0
    assert harmonic_diff(1.0, 1.0) == math.inf
    assert harmonic_diff(2.0, 3.0) == pytest.approx(6.0)
    assert harmonic_diff(3.0, 2.0) == pytest.approx(-6.0)
    assert harmonic_diff(0.5, 1.0) == pytest.approx(1.0)
    assert harmonic_diff(Modulus(0.0), 1.0) == 0.0
    with pytest.raises(ArgumentError):
        harmonic_diff(0.0, 0.0)
    with pytest.raises(ArgumentError):
        Modulus(-1.0)


def test_composition_laws():
    assert parallel_law([1.0, 1.0]).value == 0.5
    assert parallel_law([1.0, 2.0], mode='width').value == 3.0
    assert series_law([0.3, 0.5]).value == pytest.approx(0.8)
    with pytest.raises(ArgumentError):
        parallel_law([1.0], mode='diagonal')
    with pytest.raises(ArgumentError):
        series_law([])


def test_verdicts():
    assert compare_le('a', Modulus(1.0, 0.1), Modulus(2.0, 0.1)).status == PASS
    assert compare_le('b', Modulus(3.0, 0.1), Modulus(2.0, 0.1)).status == FAIL
    assert compare_le('c', Modulus(1.95, 0.1), Modulus(2.0, 0.1)).status == INCONCLUSIVE
    assert check_pi_bounds(0.2, 1.0, 0.15).status == PASS
    assert check_pi_bounds(0.2, 1.0, 0.25).status == FAIL
    assert check_pi_bounds(0.2, 1.0, 0.05).status == FAIL
    gate = check_pi_bounds(0.8, 1.0, 0.5)
    assert gate.status == PASS and 'not gated' in gate.note
    assert check_degree_rule(1.0, 0.5, 2).status == PASS
    assert check_degree_rule(1.0, 0.4, 2).status == FAIL


def test_exact_fixtures():
    print("=" * 80)
    print("TEST: EXACT FIXTURES")
    print("=" * 80)
    for a, h in ((1.0, 0.1), (1.0, 0.5), (1.0, 1.0), (1.0, 2.0)):
        m = quad_modulus(rectangle(a, h, cells=40))
        assert m.value == pytest.approx(h / a, rel=1e-8), (a, h)
    assert quad_modulus(rectangle(2.0, 1.0, cells=40, swap=True)).value == pytest.approx(2.0, rel=1e-8)
    for target in (0.05, 0.1, 0.25, 0.5, 1.0, 2.0):
        m = annulus_modulus(log_polar_annulus(1.0, math.exp(2 * math.pi * target), cells=48))
        assert m.value == pytest.approx(target, rel=1e-6), target
        assert m.error < 0.01 * target
    assert annulus_modulus(cylinder(0.2, 1.5, cells=48)).value == pytest.approx(0.2 / 1.5, rel=1e-6)
    stacked = quad_modulus(stacked_rectangles(1.0, (0.3, 0.5), cells=40))
    assert stacked.value == pytest.approx(series_law([0.3, 0.5]).value, rel=1e-6)
    print("✓ rectangles, log-polar annuli, cylinder and stacked rectangles")


def test_cartesian_annulus_and_frame():
    R = math.exp(2 * math.pi * 0.1)
    m = annulus_modulus(round_annulus(1.0, R, cells=128))
    assert abs(m.value - round_modulus(1.0, R)) < 0.1 * round_modulus(1.0, R)
    frame = annulus_modulus(square_frame(1.0, 3.0, cells=64))
    assert round_modulus(math.sqrt(2), 3.0) <= frame.value <= round_modulus(1.0, 3.0 * math.sqrt(2))
    print(f"✓ Cartesian annulus {m}, square frame {frame}")


def test_richardson_consistency():
    coarse = annulus_modulus(square_frame(0.5, 8.0, cells=64))
    fine = annulus_modulus(square_frame(0.5, 8.0, cells=128))
    assert abs(fine.value - coarse.value) <= coarse.error * (1 + 1e-9)
    assert fine.error < coarse.error
    rect = quad_modulus(rectangle(1.0, 0.5, cells=16))
    assert rect.error < 1e-6 * rect.value


def test_monotonicity():
    hole = circle(0.5)
    inside = annulus_modulus(polygon_annulus(square(2.0), [hole], cells=96))
    around = annulus_modulus(polygon_annulus(circle(2.0 * math.sqrt(2)), [hole], cells=96))
    assert compare_le('enlarged outer boundary', inside, around).status == PASS
    assert inside.value < round_modulus(0.5, 2.0 * math.sqrt(2))


def test_conformal_invariance():
    R = math.exp(2 * math.pi * 0.2)
    base = annulus_modulus(round_annulus(1.0, R, cells=96))
    moved = annulus_modulus(round_annulus(1.0, R, cells=96, center=0.3 - 0.2j, scale=0.7 * (1 + 1j)))
    assert abs(base.value - moved.value) <= base.error + moved.error + 0.02 * base.value
    off_center = annulus_modulus(polygon_annulus(circle(1.0), [circle(0.4, 0.5)], cells=96))
    exact = eccentric_modulus(1.0, 0.4, 0.5)
    assert abs(off_center.value - exact) <= off_center.error + 0.05 * exact
    with pytest.raises(ArgumentError):
        eccentric_modulus(1.0, 0.6, 0.5)


def test_root_pullback():
    ring = root_pullback(circle(4.0), 2)
    assert np.allclose(np.abs(ring), 2.0)
    assert round(winding_number(ring, 0j)) == 1
    frame = densify(square(1.0), per_edge=16)
    assert len(frame) == 4 * 16 + 1
    lifted = root_pullback(frame, 3)
    assert len(lifted) == 3 * 4 * 16 + 1
    images = lifted[:-1] ** 3
    assert np.allclose(np.max(np.abs(images.real)), 1.0) and np.allclose(np.max(np.abs(images.imag)), 1.0)
    with pytest.raises(ArgumentError):
        root_pullback(circle(1.0, center=3.0), 2)
    with pytest.raises(ArgumentError):
        root_pullback(np.append(circle(1.0)[:-1], circle(1.0)), 2)


def test_degree_transformation():
    print("=" * 80)
    print("TEST: SQUARE FRAME AND ITS z^N PREIMAGES")
    print("=" * 80)
    for n in (2, 3, 4):
        image, pre = covering_pair(n, cells=64)
        verdict = check_degree_rule(image, pre, n)
        assert verdict.status == PASS, verdict
        print(f"✓ N={n}: frame {image}, preimage {pre}")
    lopsided = check_degree_rule(image, pre, 3)
    assert lopsided.status == FAIL
    R = math.exp(math.pi)
    for n in (2, 3, 4):
        pre = annulus_modulus(power_preimage(circle(R), circle(1.0), n, cells=64, per_edge=1))
        verdict = check_degree_rule(round_modulus(1.0, R), pre, n)
        assert verdict.status == PASS, verdict


def test_reciprocal_l_shape():
    a = quad_modulus(l_shape(cells=32))
    b = quad_modulus(l_shape(cells=32, swap=True))
    assert a.value * b.value == pytest.approx(1.0, rel=0.05)


def test_strip_bounds():
    m = strip_modulus(0.2, 1.0, cells=128)
    verdict = check_pi_bounds(0.2, 1.0, m)
    assert verdict.status == PASS, verdict
    print(f"✓ truncated strip h/a=0.2: {m}")


def test_invalid_domains():
    with pytest.raises(ArgumentError):
        annulus_modulus(rectangle(1.0, 1.0, cells=8))
    active = np.ones((6, 6), dtype=bool)
    no_hole = from_masks(active, np.zeros((6, 6), dtype=bool), 1.0, 1.0, name='no hole')
    with pytest.raises(ArgumentError):
        solve_energy(no_hole)
    with pytest.raises(ArgumentError):
        rectangle(0.0, 1.0)
    with pytest.raises(ArgumentError):
        log_polar_annulus(2.0, 1.0)


def test_solver_budget():
    with pytest.raises(NumericError):
        solve_energy(rectangle(1.0, 1.0, cells=32), maxiter=1)


if __name__ == '__main__':
    sys.exit(pytest.main([__file__, '-v']))
