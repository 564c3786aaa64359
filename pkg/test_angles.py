"""
Test script for exact angle arithmetic and alpha-cycles.
"""

import sys
from fractions import Fraction

import pytest

from angles import (Angle, _alpha_cycle_word, alpha_cycle, arc_length, depth0_arc_lengths, doubling,
                    dyadic_label, in_arc, label_signs, landing_depth, preimages, rotation_numbers,
                    rotation_step)
from errors import ArgumentError


def A(text):
    return Angle.parse(text)


def test_parse_and_reduce():
    print("=" * 80)
    print("TEST: ANGLE PARSING")
    print("=" * 80)
    assert A("5/3") == A("2/3")
    assert str(A("2/6")) == "1/3"
    assert A("0") == Angle.of(0)
    for bad in ("1/0", "x", "1/2/3", ""):
        with pytest.raises(ArgumentError):
            Angle.parse(bad)
    print("✓ parse/str round-trip and malformed input rejected")


def test_doubling_and_preimages():
    assert doubling(A("2/3")) == A("1/3")
    assert preimages(A("1/3"), 1) == [A("1/6"), A("2/3")]
    pre = preimages(A("1/7"), 3)
    assert len(pre) == 8
    assert all(doubling(doubling(doubling(b))) == A("1/7") for b in pre)
    with pytest.raises(ArgumentError):
        preimages(A("1/3"), -1)
    print("✓ doubling and preimages are exact")


def test_arcs():
    assert arc_length(A("5/6"), A("1/6")) == Fraction(1, 3)
    assert in_arc(A("5/6"), A("1/6"), A("0"))
    assert not in_arc(A("5/6"), A("1/6"), A("1/2"))
    assert not in_arc(A("1/3"), A("2/3"), A("1/3"))
    assert in_arc(A("1/3"), A("2/3"), A("1/3"), closed=True)
    print("✓ cyclic arcs")


def test_small_alpha_cycles():
    assert list(alpha_cycle(1, 2)) == [A("1/3"), A("2/3")]
    assert list(alpha_cycle(1, 3)) == [A("1/7"), A("2/7"), A("4/7")]
    assert list(alpha_cycle(2, 3)) == [A("3/7"), A("5/7"), A("6/7")]
    assert alpha_cycle(2, 5).rotation_number == Fraction(2, 5)
    print("✓ alpha-cycles for 1/2, 1/3, 2/3")


def test_alpha_cycles_match_rotation_words():
    print("\n" + "=" * 80)
    print("TEST: EXHAUSTIVE SEARCH vs ROTATION WORD (q <= 8)")
    print("=" * 80)
    count = 0
    for p, q in rotation_numbers(8):
        cycle = alpha_cycle(p, q)
        modulus = (1 << q) - 1
        residues = tuple(a.numerator * (modulus // a.denominator) for a in cycle)
        assert residues == _alpha_cycle_word(p, q), (p, q)
        assert rotation_step(residues, modulus) == p
        assert {doubling(a) for a in cycle} == set(cycle)
        count += 1
    print(f"✓ {count} rotation numbers agree")


def test_large_period_uses_word():
    cycle = alpha_cycle(3, 20)
    assert cycle.period == 20
    assert {doubling(a) for a in cycle} == set(cycle)
    with pytest.raises(ArgumentError):
        alpha_cycle(2, 4)
    with pytest.raises(ArgumentError):
        alpha_cycle(1, 65)


def test_arc_lengths_and_landing_depth():
    assert depth0_arc_lengths(3) == [Fraction(1, 7), Fraction(2, 7), Fraction(4, 7)]
    assert sum(depth0_arc_lengths(5)) == 1
    base = set(alpha_cycle(1, 2))
    assert landing_depth(A("1/6"), base, 5) == 1
    assert landing_depth(A("1/3"), base, 5) == 0
    assert landing_depth(A("1/5"), base, 20) is None


def test_dyadic_labels():
    assert dyadic_label([]).value == 0
    assert dyadic_label([], depth=1).value == Fraction(1, 2)
    assert dyadic_label([+1]).value == Fraction(3, 4)
    assert dyadic_label([-1]).value == Fraction(1, 4)
    assert dyadic_label([+1, -1]).value == Fraction(5, 8)
    assert label_signs(Fraction(5, 8)) == ((1, -1), 3)
    assert label_signs(Fraction(1, 2)) == ((), 1)
    with pytest.raises(ArgumentError):
        dyadic_label([0])
    with pytest.raises(ArgumentError):
        dyadic_label([+1], depth=3)
    with pytest.raises(ArgumentError):
        label_signs(Fraction(1, 3))
    print("✓ dyadic vertex labels")


if __name__ == '__main__':
    sys.exit(pytest.main([__file__, '-v']))
