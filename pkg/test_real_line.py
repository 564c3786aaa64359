"""
Test script for the real-line sign oracle and kneading bisection.
"""

import math
import sys

import pytest

from angles import Angle
from errors import ArgumentError, PreconditionError
from real_line import (RealLineOracle, enumerate_superstable, itinerary, little_alpha, locate_superstable,
                       real_point_angle, superstable_residual, tuned_word)

AIRPLANE = -1.75487766625


def test_locate_superstable():
    print("=" * 80)
    print("TEST: KNEADING BISECTION")
    print("=" * 80)
    c = locate_superstable('LR')
    assert abs(c - AIRPLANE) < 1e-10
    assert itinerary(c, 3) == 'LRC'
    assert abs(locate_superstable('L') + 1.0) < 1e-12
    residual, _ = superstable_residual(c, 3)
    assert abs(residual) < 1e-12
    print(f"✓ airplane located at c = {c:.12g}")


def test_bad_words():
    for word in ('', 'LX'):
        with pytest.raises(ArgumentError):
            locate_superstable(word)
    with pytest.raises(ArgumentError):
        locate_superstable('LL')


def test_enumerate_small_periods():
    three = enumerate_superstable(3)
    assert [w for w, _ in three] == ['LR']
    four = enumerate_superstable(4)
    assert len(four) == 2
    assert four[0][1] < four[1][1]
    assert abs(four[1][1] + 1.3107026413) < 1e-8
    total = sum(len(enumerate_superstable(p)) for p in range(3, 10))
    assert total >= 20
    print(f"✓ {total} real superstable parameters of period 3..9")


def test_tuned_words():
    word = tuned_word('LR', 'LR')
    assert len(word) == 8
    assert word[:2] == 'LR' and word[3:5] == 'LR'
    c = locate_superstable(word)
    assert itinerary(c, 8) == word
    assert abs(c - AIRPLANE) < 0.05
    print(f"✓ twice-tuned airplane at c = {c:.12g}")


def test_real_angles():
    alpha = (1 - math.sqrt(5)) / 2
    assert real_point_angle(-1.0, alpha, 1) == Angle.parse('1/3')
    beta = (1 + math.sqrt(5)) / 2
    assert real_point_angle(-1.0, beta, 1) == Angle.parse('0')


def test_little_alpha():
    a = little_alpha(AIRPLANE, 3)
    x = a
    for _ in range(3):
        x = x * x + AIRPLANE
    assert abs(x - a) < 1e-9
    assert abs(a) < 0.5


def test_oracle_airplane():
    oracle = RealLineOracle.top_level(AIRPLANE)
    assert oracle.period == 3
    assert not oracle.same(1, 0, 0)
    assert oracle.same(2, 0, 0)
    assert not oracle.same(2, 0, 1)
    assert oracle.same(3, 0, 10)
    assert oracle.describe(2, 1) == 'I1:+'
    print("✓ sign oracle memberships on the airplane")


def test_oracle_preconditions():
    with pytest.raises(PreconditionError):
        RealLineOracle.top_level(-0.5)
    with pytest.raises(PreconditionError):
        RealLineOracle(complex(-0.1, 0.7), [0.0])


if __name__ == '__main__':
    sys.exit(pytest.main([__file__, '-v']))
