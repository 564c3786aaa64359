"""
Test script for the escape route, the principal nest and the tower,
driven by the real-line sign oracle.
"""

import sys

import pytest

from config import RunConfig
from errors import PreconditionError
from nest import (FINE, FIRST, STATUS_ESCAPING, STATUS_RENORMALIZABLE, _level, build_nest, build_tower,
                  compare_signatures, critical_passes, escape_route, nest_signature, nest_table, return_record)
from presets import TWICE_TUNED_WORD
from real_line import RealLineOracle, locate_superstable

AIRPLANE = -1.75487766625


class AlwaysInside:
    """Oracle whose critical orbit never leaves any critical piece."""
    q = 2
    scale = 1

    def same(self, i, j, d):
        return True

    def describe(self, i, d):
        return f"P({i},{d})"


def test_airplane_nest():
    print("=" * 80)
    print("TEST: AIRPLANE PRINCIPAL NEST")
    print("=" * 80)
    oracle = RealLineOracle.top_level(AIRPLANE)
    decoration = escape_route(oracle)
    assert (decoration.q, decoration.n) == (2, 1)
    assert not decoration.satellite_flag
    assert len(decoration.kappa) == 1
    nest = build_nest(oracle, decoration)
    assert nest.depths == [3, 6]
    assert nest.return_times == [None, 3]
    assert nest.child_kinds == ['top', FIRST]
    assert nest.renorm_status == STATUS_RENORMALIZABLE
    assert (nest.chi, nest.period) == (1, 3)
    assert nest.levels[1].degree == 2
    assert not nest.degree_flags
    print(nest_table(nest).to_string(index=False))
    print("✓ n=1, depths [3, 6], chi=1, p=3")


def test_return_record():
    oracle = RealLineOracle.top_level(AIRPLANE)
    nest = build_nest(oracle)
    record = return_record(oracle, nest, 30)
    assert record.times_l == list(range(1, 31, 3))
    assert record.times_r == list(range(2, 31, 3))
    assert record.threshold == 4
    assert record.max_gap == 3
    assert not record.gap_flag


def test_satellite_and_escaping():
    basilica = RealLineOracle.top_level(-1.0)
    decoration = escape_route(basilica)
    assert decoration.satellite_flag
    assert decoration.n is None
    with pytest.raises(PreconditionError):
        build_nest(basilica, decoration)

    chebyshev = RealLineOracle.top_level(-2.0)
    nest = build_nest(chebyshev, config=RunConfig(return_budget=200))
    assert nest.decoration.n == 1
    assert nest.renorm_status == STATUS_ESCAPING
    assert nest.depths == [3]
    with pytest.raises(PreconditionError):
        return_record(chebyshev, nest, 10)
    print("✓ satellite and escaping parameters")


def test_degree_flag():
    oracle = AlwaysInside()
    assert critical_passes(oracle, 3, 6) == 3
    level, flag = _level(oracle, 1, 9, 3, FIRST, bound=32)
    assert level.degree == 8
    assert flag is not None and 'expected 2' in flag
    level, flag = _level(oracle, 2, 12, 6, FINE, bound=32)
    assert level.degree == 64
    assert 'exceeds bound' in flag
    assert escape_route(oracle, RunConfig(satellite_budget=5)).satellite_flag


def test_twice_tuned_tower():
    c = locate_superstable(TWICE_TUNED_WORD)
    tower = build_tower(RealLineOracle.top_level(c), 2)
    assert len(tower) == 2
    assert tower[0].nest.period == 3
    assert tower[1].scale == 3
    assert tower[1].nest.renormalizable
    assert tower[1].nest.relative_period == 3
    assert tower[1].nest.period == 9
    print("✓ twice-tuned: p = 3 at both levels")


def test_signatures():
    oracle = RealLineOracle.top_level(AIRPLANE)
    nest = build_nest(oracle)
    sig = nest_signature(nest.decoration, nest)
    assert compare_signatures(sig, dict(sig)) == []
    other = dict(sig, period=5)
    assert compare_signatures(sig, other) == ["period: 3 != 5"]


if __name__ == '__main__':
    sys.exit(pytest.main([__file__, '-v']))
