"""
Test script for puzzle pieces: symbolic arcs, portraits, refinement,
point location and the geometric nest against the sign oracle.
"""

import sys
from fractions import Fraction

import pytest

from angles import Angle, alpha_cycle
from config import RunConfig
from dynamics import QuadraticMap, RayCache
from errors import OnBoundaryError
from nest import build_nest, escape_route, nest_signature
from puzzle import (Arc, Portrait, Puzzle, PuzzlePiece, check_pullback_containment, diameter, family_to_dict,
                    image_distance, q_pieces, truncate)
from real_line import RealLineOracle

AIRPLANE = -1.75487766625
RABBIT = complex(-0.122561166877, 0.744861766620)
CONFIG = RunConfig(q_max=3)


def A(text):
    return Angle.parse(text)


def arc(a, b):
    return Arc(A(a), A(b))


def test_arcs():
    assert arc("1/3", "2/3").length == Fraction(1, 3)
    assert arc("2/3", "1/3").length == Fraction(2, 3)
    assert arc("2/3", "1/3").midpoint == A("0")
    assert arc("2/3", "1/3").contains_arc(arc("5/6", "1/6"))
    assert not arc("1/3", "2/3").contains_arc(arc("1/6", "1/2"))
    assert arc("1/3", "2/3").halves() == (arc("1/6", "1/3"), arc("2/3", "5/6"))


def test_pieces():
    p = PuzzlePiece(1, 1, (arc("2/3", "5/6"), arc("1/6", "1/3")))
    assert p.arcs[0] == arc("1/6", "1/3")
    assert p.content == Fraction(1, 3)
    assert p.vertex_pairs == [(A("1/3"), A("2/3")), (A("5/6"), A("1/6"))]
    assert p.negated().arcs == (arc("1/6", "1/3"), arc("2/3", "5/6"))
    y0 = PuzzlePiece(0, 0, (arc("2/3", "1/3"),))
    assert y0.contains_piece(p)
    assert not PuzzlePiece(0, 0, (arc("1/3", "2/3"),)).contains_piece(p)
    assert truncate(p, 5).bidepth == (1, 5)
    assert truncate(p, 5) != p


def test_depth0_arcsets():
    f = QuadraticMap(-1)
    basilica = Portrait.from_cycle(f, alpha_cycle(1, 2))
    assert sorted(basilica.depth0_arcsets()) == [(arc("1/3", "2/3"),), (arc("2/3", "1/3"),)]
    rabbit = Portrait.from_cycle(f, alpha_cycle(1, 3))
    assert len(rabbit.depth0_arcsets()) == 3
    nested = Portrait(classes=((A("2/5"), A("3/5")), (A("1/5"), A("4/5"))), points=(0j, 0j), name='test')
    regions = nested.depth0_arcsets()
    assert len(regions) == 3
    assert (arc("1/5", "2/5"), arc("3/5", "4/5")) in regions
    print("✓ regions cut out by 2, 3 and nested base rays")


def test_basilica_families():
    print("=" * 80)
    print("TEST: BASILICA FAMILIES")
    print("=" * 80)
    puzzle = Puzzle.top(QuadraticMap(-1), config=CONFIG, cache=RayCache())
    fam0 = puzzle.depth0_family()
    assert len(fam0) == 2
    assert {p.label for p in fam0} == {"Y^0", "Y^0_1"}
    y0 = next(p for p in fam0 if p.label == "Y^0")
    assert y0.arcs == (arc("2/3", "1/3"),)
    fam1 = puzzle.refine(fam0)
    assert len(fam1) == 3
    assert {p.label for p in fam1} == {"Y^1", "Y^1_1", "Z^1_1"}
    assert set(fam1.containment) == {0, 1, 2}
    assert puzzle.locate(fam1, 0j).label == "Y^1"
    assert puzzle.locate(fam0, -1 + 0j).label == "Y^0_1"
    report = family_to_dict(puzzle, fam1)
    assert report['count'] == 3 and all(len(p['polyline']) > 3 for p in report['pieces'])
    print(f"✓ pieces per depth: {len(fam0)}, {len(fam1)}")


def test_on_boundary():
    f = QuadraticMap(-1)
    puzzle = Puzzle.top(f, config=CONFIG, cache=RayCache())
    y0 = next(p for p in puzzle.depth0_pieces() if p.label == "Y^0")
    with pytest.raises(OnBoundaryError):
        puzzle.contains(y0, f.alpha)
    assert puzzle.contains(y0, 0.5 + 0j)
    assert not puzzle.contains(y0, -1.2 + 0j)


def test_airplane_geometric_nest_matches_signs():
    print("\n" + "=" * 80)
    print("TEST: AIRPLANE, GEOMETRIC NEST vs SIGN ORACLE")
    print("=" * 80)
    puzzle = Puzzle.top(QuadraticMap(AIRPLANE), config=CONFIG, cache=RayCache())
    signs = RealLineOracle.top_level(AIRPLANE)
    for i in range(1, 7):
        for d in range(0, 4):
            assert puzzle.same(i, 0, d) == signs.same(i, 0, d), (i, d)
    decoration = escape_route(puzzle, CONFIG)
    nest = build_nest(puzzle, decoration, CONFIG)
    expected = nest_signature(escape_route(signs), build_nest(signs))
    assert nest_signature(decoration, nest) == expected
    assert nest.depths == [3, 6] and nest.period == 3
    print("✓ geometric and sign pipelines agree")


def test_airplane_structure():
    puzzle = Puzzle.top(QuadraticMap(AIRPLANE), config=CONFIG, cache=RayCache())
    q_left, q_right = q_pieces(puzzle)
    assert q_left.label == "Q_L" and q_right.label == "Q_R"
    assert q_left.degree == 1 and q_right.degree == 1
    y1 = puzzle.critical_piece(1)
    assert y1.contains_piece(q_left) and y1.contains_piece(q_right)
    records = check_pullback_containment(puzzle, 1)
    assert records
    assert all(r.symbolic and r.geometric for r in records)
    print(f"✓ Q_L, Q_R found; {len(records)} pullbacks compactly contained")


def test_pullback_labels_and_images():
    f = QuadraticMap(-1)
    puzzle = Puzzle.top(f, config=CONFIG, cache=RayCache())
    y0 = next(p for p in puzzle.depth0_pieces() if p.label == "Y^0")
    critical = puzzle.pullback(y0, 2, 0j)
    assert critical.label == "Y^2" and critical.degree == 2
    assert critical.key == puzzle.critical_piece(2).key
    side = puzzle.pullback(y0, 1, -1 + 0j)
    assert side.label == "f^-1(Y^0)" and side.degree == 1
    assert side.bidepth == (1, 1)
    outer = puzzle.geometry(y0)
    assert image_distance(puzzle, side, y0) < 0.01 * diameter(outer)
    print("✓ pullbacks labeled and mapped onto their images")


def test_rabbit_depth1_count():
    puzzle = Puzzle.top(QuadraticMap(RABBIT), config=CONFIG, cache=RayCache())
    fam0 = puzzle.depth0_family()
    assert len(fam0) == 3
    fam1 = puzzle.refine(fam0)
    assert len(fam1) == 2 * 3 - 1
    labels = set(fam1.labels)
    assert "Y^1" in labels
    assert sum(label.startswith("Z^1_") for label in labels) == 2
    assert puzzle.locate(fam1, 0j).label == "Y^1"


if __name__ == '__main__':
    sys.exit(pytest.main([__file__, '-v']))
