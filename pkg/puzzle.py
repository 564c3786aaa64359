"""
Yoccoz puzzle pieces: symbolic arc sets, pullbacks, geometry and point location.

A piece is stored symbolically as the set of counterclockwise angle arcs it
cuts out of the circle at infinity (its external arcs) together with its
bidepth (depth m, equipotential truncation l). Geometry is derived on demand:
the boundary polyline runs along an equipotential arc, down one ray to its
landing vertex and back out along the next ray, for every external arc.

Pieces are generated by a base portrait: the rays landing at alpha (top
level) or at the orbit of a little alpha (after a renormalization).

USAGE:
    puzzle = Puzzle.top(QuadraticMap(-1))
    family = puzzle.depth0_family()
    family1 = puzzle.refine(family)
    puzzle.locate(family1, 0j).label        # 'Y^1'
"""

import math
import threading
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from angles import (Angle, AngleCycle, DyadicVertexLabel, arc_length, doubling, dyadic_label,
                    in_arc, landing_depth)
from config import RunConfig
from dynamics import (CriticalOrbit, QuadraticMap, RaySchedule, RayCache, chord_side,
                      detect_rotation_number, green, lands_at, ray_points_at, shared_cache,
                      trace_rays, winding_number)
from errors import InternalError, OnBoundaryError, PreconditionError

HALF = Fraction(1, 2)


# =====================
# SYMBOLIC PIECES
# =====================

@dataclass(frozen=True, order=True)
class Arc:
    """Counterclockwise arc (start, end) of the circle at infinity."""

    start: Angle
    end: Angle

    @property
    def length(self) -> Fraction:
        return arc_length(self.start, self.end)

    @property
    def midpoint(self) -> Angle:
        return Angle(self.start.value + self.length / 2)

    def contains_arc(self, other: 'Arc') -> bool:
        offset = (other.start.value - self.start.value) % 1
        return offset + other.length <= self.length

    def halves(self) -> Tuple['Arc', 'Arc']:
        s = self.start.value / 2
        e = s + self.length / 2
        return Arc(Angle(s), Angle(e)), Arc(Angle(s + HALF), Angle(e + HALF))

    def shifted(self, t: Fraction) -> 'Arc':
        return Arc(self.start + t, self.end + t)

    def __str__(self) -> str:
        return f"({self.start}, {self.end})"


@dataclass(frozen=True)
class VertexTag:
    """A corner of a piece where two external rays meet."""

    angles: Tuple[Angle, Angle]
    depth: Optional[int] = None
    base: Optional[int] = None
    label: Optional[DyadicVertexLabel] = None
    point: Optional[complex] = None

    def name(self) -> str:
        if self.label is not None:
            return str(self.label)
        return f"{self.angles[0]}|{self.angles[1]}"


@dataclass(frozen=True)
class PuzzlePiece:
    """
    Symbolic puzzle piece of bidepth (depth, level).

    `arcs` are sorted by start angle; `geometry`, when attached, is the closed
    boundary polyline at equipotential truncation `level`.
    """

    depth: int
    level: int
    arcs: Tuple[Arc, ...]
    label: str = field(default='', compare=False)
    degree: int = field(default=1, compare=False)
    geometry: Optional[np.ndarray] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, 'arcs', tuple(sorted(self.arcs, key=lambda a: a.start.value)))

    @property
    def bidepth(self) -> Tuple[int, int]:
        return self.depth, self.level

    @property
    def key(self) -> Tuple[Arc, ...]:
        return self.arcs

    @property
    def bounding_angles(self) -> List[Tuple[Angle, Angle]]:
        return [(a.start, a.end) for a in self.arcs]

    @property
    def angle_set(self) -> List[Angle]:
        return sorted({a for arc in self.arcs for a in (arc.start, arc.end)})

    @property
    def vertex_pairs(self) -> List[Tuple[Angle, Angle]]:
        n = len(self.arcs)
        return [(self.arcs[k].end, self.arcs[(k + 1) % n].start) for k in range(n)]

    @property
    def content(self) -> Fraction:
        return sum((a.length for a in self.arcs), Fraction(0))

    def contains_piece(self, other: 'PuzzlePiece') -> bool:
        """Angle containment: every external arc of `other` lies in one of ours."""
        return all(any(mine.contains_arc(arc) for mine in self.arcs) for arc in other.arcs)

    def contains_angle(self, a: Angle) -> bool:
        return any(in_arc(arc.start, arc.end, a) for arc in self.arcs)

    def negated(self) -> 'PuzzlePiece':
        """The piece -P (every angle shifted by 1/2)."""
        return PuzzlePiece(self.depth, self.level, tuple(a.shifted(HALF) for a in self.arcs))

    def truncate(self, level: int) -> 'PuzzlePiece':
        """Y(k): same rays, truncated by the equipotential of index `level`."""
        return replace(self, level=level, geometry=None)

    def image_angles(self) -> List[Angle]:
        return [doubling(a) for a in self.angle_set]

    def min_arc_length(self) -> Fraction:
        return min(a.length for a in self.arcs)

    def describe(self) -> str:
        return f"{self.label or '?'} bidepth={self.bidepth} arcs=" + " ".join(str(a) for a in self.arcs)


def truncate(piece: PuzzlePiece, level: int) -> PuzzlePiece:
    return piece.truncate(level)


# =====================
# PORTRAITS
# =====================

@dataclass(frozen=True)
class Portrait:
    """
    Rays generating a puzzle: classes of angles landing at the same base point.

    `scale` is the number of f-steps of one step of the (renormalized) map
    whose puzzle this is.
    """

    classes: Tuple[Tuple[Angle, ...], ...]
    points: Tuple[complex, ...]
    scale: int = 1
    name: str = 'alpha'

    @property
    def q(self) -> int:
        return len(self.classes[0])

    @property
    def angles(self) -> List[Angle]:
        return sorted(a for cls in self.classes for a in cls)

    def class_index(self, a: Angle) -> int:
        for k, cls in enumerate(self.classes):
            if a in cls:
                return k
        raise InternalError(f"angle {a} is not a base angle of portrait {self.name}")

    def depth0_arcsets(self) -> List[Tuple[Arc, ...]]:
        """
        Regions cut out by the base rays.

        Walking a region boundary, the gap ending at angle y continues with
        the gap starting at y's cyclic predecessor in its landing class.
        """
        angles = self.angles
        n = len(angles)
        gaps = {angles[k]: Arc(angles[k], angles[(k + 1) % n]) for k in range(n)}
        seen = set()
        regions = []
        for a in angles:
            if a in seen:
                continue
            arcs, start = [], a
            while start not in seen:
                seen.add(start)
                gap = gaps[start]
                arcs.append(gap)
                cls = sorted(self.classes[self.class_index(gap.end)])
                start = cls[(cls.index(gap.end) - 1) % len(cls)]
            regions.append(tuple(arcs))
        return regions

    @classmethod
    def from_cycle(cls, qmap: QuadraticMap, cycle: AngleCycle) -> 'Portrait':
        return cls(classes=(tuple(cycle.angles),), points=(qmap.alpha,), scale=1, name='alpha')

    @classmethod
    def from_little_alpha(cls, qmap: QuadraticMap, period: int) -> 'Portrait':
        """Real parameters: the orbit of the little alpha, two conjugate rays per point."""
        from real_line import little_alpha, periodic_orbit, real_point_angle
        if not qmap.is_real:
            raise PreconditionError("little-alpha portraits are built for real parameters only")
        c = qmap.c.real
        a = little_alpha(c, period)
        classes, points = [], []
        for x in periodic_orbit(c, a, period):
            theta = real_point_angle(c, x, period)
            classes.append(tuple(sorted((theta, -theta))))
            points.append(complex(x))
        return cls(classes=tuple(classes), points=tuple(points), scale=period,
                   name=f'little-alpha-{period}')


# =====================
# FAMILIES
# =====================

@dataclass
class PieceFamily:
    """All pieces of one depth, with parent and f-image tables."""

    depth: int
    pieces: List[PuzzlePiece]
    containment: Dict[int, int] = field(default_factory=dict)
    image: Dict[int, int] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.pieces)

    def __iter__(self):
        return iter(self.pieces)

    def index(self, piece: PuzzlePiece) -> int:
        for k, p in enumerate(self.pieces):
            if p.key == piece.key:
                return k
        raise KeyError(piece.describe())

    def by_label(self, label: str) -> PuzzlePiece:
        for p in self.pieces:
            if p.label == label:
                return p
        raise KeyError(label)

    @property
    def labels(self) -> List[str]:
        return [p.label for p in self.pieces]


# =====================
# GEOMETRY HELPERS
# =====================

def segment_distance(poly: np.ndarray, z: complex) -> float:
    """Distance from z to a polyline."""
    a, b = poly[:-1], poly[1:]
    ab = b - a
    denom = np.abs(ab) ** 2
    with np.errstate(all='ignore'):
        t = np.where(denom > 0, ((z - a) * np.conj(ab)).real / denom, 0.0)
    t = np.clip(t, 0.0, 1.0)
    return float(np.min(np.abs(a + t * ab - z)))


def diameter(poly: np.ndarray) -> float:
    return float(max(np.ptp(poly.real), np.ptp(poly.imag)))


# =====================
# THE PUZZLE TOWER
# =====================

class Puzzle:
    """
    Puzzle of one map generated by one portrait.

    Holds the memoized pieces orbit_piece(j, d) (the depth-d piece around
    f^j(0)), the boundary geometry cache, and the pullback machinery. The
    pieces are immutable; the caches take a lock on write.
    """

    def __init__(self, qmap: QuadraticMap, portrait: Portrait, config: Optional[RunConfig] = None,
                 cache: Optional[RayCache] = None, verbose: bool = False):
        self.qmap = qmap
        self.portrait = portrait
        self.config = config or RunConfig()
        self.cache = cache if cache is not None else shared_cache(self.config)
        self.schedule = RaySchedule.from_config(self.config)
        self.verbose = verbose or self.config.verbose
        self.orbit = CriticalOrbit(qmap)
        self._lock = threading.RLock()
        self._orbit_pieces: Dict[Tuple[int, int], PuzzlePiece] = {}
        self._geometry: Dict[Tuple[Tuple[Arc, ...], int], np.ndarray] = {}
        self._landing: Dict[Angle, complex] = {}
        self._depth0: Optional[List[PuzzlePiece]] = None

    @classmethod
    def top(cls, qmap: QuadraticMap, config: Optional[RunConfig] = None, cache: Optional[RayCache] = None,
            cycle: Optional[AngleCycle] = None, verbose: bool = False) -> 'Puzzle':
        """Puzzle generated by the alpha-cycle (detected when not given)."""
        config = config or RunConfig()
        if cycle is None:
            result = detect_rotation_number(qmap, config=config, cache=cache, verbose=verbose)
            if not result.determined:
                raise PreconditionError(f"no alpha-cycle for {qmap.label()}: {result.reason}")
            cycle = result.cycle
        return cls(qmap, Portrait.from_cycle(qmap, cycle), config=config, cache=cache, verbose=verbose)

    @classmethod
    def renormalized(cls, qmap: QuadraticMap, period: int, config: Optional[RunConfig] = None,
                     cache: Optional[RayCache] = None, verbose: bool = False) -> 'Puzzle':
        return cls(qmap, Portrait.from_little_alpha(qmap, period), config=config, cache=cache, verbose=verbose)

    def renormalize(self, period: int) -> 'Puzzle':
        return Puzzle.renormalized(self.qmap, period, config=self.config, cache=self.cache, verbose=self.verbose)

    @property
    def q(self) -> int:
        return self.portrait.q

    @property
    def scale(self) -> int:
        return self.portrait.scale

    # ---------- rays and polygons ----------

    def landing(self, angles: Sequence[Angle]) -> Dict[Angle, complex]:
        """Landing points of the given rays (traced to the floor level)."""
        missing = [a for a in dict.fromkeys(angles) if a not in self._landing]
        if missing:
            traces = trace_rays(self.qmap, missing, self.config.ray_floor_level,
                                config=self.config, cache=self.cache, schedule=self.schedule)
            with self._lock:
                for a, t in zip(missing, traces):
                    if t.landing is None:
                        if self.verbose:
                            print(f"[WARNING] ray {a} did not land ({t.status}); using deepest sample")
                        self._landing[a] = t.deepest
                    else:
                        self._landing[a] = t.landing
        return {a: self._landing[a] for a in angles}

    def check_base_landing(self):
        """Every base ray must land at its base point."""
        for cls_angles, point in zip(self.portrait.classes, self.portrait.points):
            traces = trace_rays(self.qmap, list(cls_angles), self.config.ray_floor_level,
                                config=self.config, cache=self.cache, schedule=self.schedule)
            for a, t in zip(cls_angles, traces):
                if not lands_at(self.qmap, t, point, max(self.config.landing_tol, 1e-7),
                                self.config.landing_samples, period=_angle_period(a)):
                    raise PreconditionError(f"ray {a} does not land at base point {point:.6g}")

    def geometry(self, piece: PuzzlePiece, level: Optional[int] = None) -> np.ndarray:
        """Closed boundary polyline of `piece` truncated at equipotential index `level`."""
        level = piece.level if level is None else level
        key = (piece.key, level)
        if key in self._geometry:
            return self._geometry[key]
        index = self.schedule.index_for_depth(level)
        rays = [a for arc in piece.arcs for a in (arc.start, arc.end)]
        landings = self.landing(rays)
        ray_traces = dict(zip(rays, trace_rays(self.qmap, rays, self.config.ray_floor_level,
                                               config=self.config, cache=self.cache,
                                               schedule=self.schedule)))
        eq_angles, eq_slices = [], []
        for arc in piece.arcs:
            m = max(3, math.ceil(self.config.arc_samples * float(arc.length)))
            start = len(eq_angles)
            eq_angles.extend(Angle(arc.start.value + arc.length * k / m) for k in range(m + 1))
            eq_slices.append(slice(start, len(eq_angles)))
        eq_points = ray_points_at(self.qmap, eq_angles, index, self.schedule,
                                  config=self.config, cache=self.cache)

        def inward(a: Angle) -> List[complex]:
            pts = ray_traces[a].points
            seg = [complex(z) for z in pts[index:]] if len(pts) > index else []
            return seg + [landings[a]]

        out: List[complex] = []
        n = len(piece.arcs)
        for k, arc in enumerate(piece.arcs):
            out.extend(complex(z) for z in eq_points[eq_slices[k]])
            out.extend(inward(arc.end)[1:])
            nxt = piece.arcs[(k + 1) % n].start
            out.extend(reversed(inward(nxt)[:-1]))
        out.append(out[0])
        poly = np.array(out, dtype=complex)
        with self._lock:
            self._geometry[key] = poly
        return poly

    def geometrize(self, piece: PuzzlePiece, level: Optional[int] = None) -> PuzzlePiece:
        return replace(piece, geometry=self.geometry(piece, level))

    def contains(self, piece: PuzzlePiece, z: complex, level: int = 0, band: Optional[float] = None) -> bool:
        """Winding-number test; raises OnBoundaryError inside the tolerance band."""
        poly = self.geometry(piece, level)
        band = self.config.boundary_band if band is None else band
        if segment_distance(poly, z) <= band * diameter(poly):
            raise OnBoundaryError(f"{z:.6g} is on the boundary of {piece.label or piece.describe()}",
                                  point=z, label=piece.label)
        return abs(round(winding_number(poly, z))) == 1

    def locate(self, family: PieceFamily, z: complex) -> PuzzlePiece:
        """The unique piece of `family` around z (pieces taken at their own truncation)."""
        level = min(p.level for p in family.pieces)
        g = green(self.qmap, z, self.config.green_budget)
        if g >= self.config.top_level / 2 ** level:
            raise PreconditionError(f"{z:.6g} lies outside the equipotential of the family (G={g:.3g})")
        hits = [p for p in family.pieces if self.contains(p, z, level=level)]
        if len(hits) != 1:
            raise InternalError(f"{len(hits)} pieces of depth {family.depth} contain {z:.6g}")
        return hits[0]

    # ---------- depth 0 and refinement ----------

    def depth0_pieces(self) -> List[PuzzlePiece]:
        if self._depth0 is None:
            pieces = [PuzzlePiece(0, 0, arcs) for arcs in self.portrait.depth0_arcsets()]
            critical = [p for p in pieces if self.contains(p, 0j)]
            if len(critical) != 1:
                raise InternalError(f"{len(critical)} depth-0 pieces contain the critical point")
            self._depth0 = self._label_depth0(pieces, critical[0])
        return self._depth0

    def _label_depth0(self, pieces: List[PuzzlePiece], critical: PuzzlePiece) -> List[PuzzlePiece]:
        labeled = []
        if self.portrait.name == 'alpha':
            # Y^0_i is the i-th image of the critical arc
            arc = critical.arcs[0]
            order = {}
            for i in range(len(pieces)):
                order[arc] = i
                arc = Arc(doubling(arc.start), doubling(arc.end))
            for p in pieces:
                labeled.append(replace(p, label=f"Y^0_{order.get(p.arcs[0], '?')}" if p != critical else "Y^0"))
        else:
            others = iter(range(1, len(pieces)))
            for p in pieces:
                labeled.append(replace(p, label="Y^0" if p == critical else f"P^0_{next(others)}"))
        return labeled

    def depth0_family(self) -> PieceFamily:
        return PieceFamily(depth=0, pieces=list(self.depth0_pieces()))

    def split(self, piece: PuzzlePiece) -> List[Tuple[PuzzlePiece, int]]:
        """
        Components of f^-1(piece) with their degrees.

        A piece holding the critical value pulls back to one critical piece
        of degree 2; any other piece to two univalent pieces P and -P, split
        by the diameter through half the angle of a point of the critical
        value piece.
        """
        value = self.value_piece(piece.depth)
        halves = [h for arc in piece.arcs for h in arc.halves()]
        depth, level = piece.depth + 1, piece.level + 1
        if piece.contains_piece(value):
            return [(PuzzlePiece(depth, level, tuple(halves), degree=2), 2)]
        delta = Angle(value.arcs[0].midpoint.value / 2)
        upper = delta + HALF
        first = tuple(h for h in halves if in_arc(delta, upper, h.start))
        second = tuple(h for h in halves if not in_arc(delta, upper, h.start))
        if not first or not second:
            raise InternalError(f"diameter at {delta} does not split the preimage of {piece.describe()}")
        return [(PuzzlePiece(depth, level, first), 1), (PuzzlePiece(depth, level, second), 1)]

    def refine(self, family: PieceFamily) -> PieceFamily:
        """The family of depth m+1: preimages of every depth-m piece, labels propagated."""
        children, image = [], {}
        for k, piece in enumerate(family.pieces):
            for child, degree in self.split(piece):
                image[len(children)] = k
                children.append(replace(child, degree=degree))
        depth = family.depth + 1
        children = self._label_children(children, depth)
        containment = {}
        for i, child in enumerate(children):
            for j, parent in enumerate(family.pieces):
                if parent.contains_piece(child):
                    containment[i] = j
                    break
        return PieceFamily(depth=depth, pieces=children, containment=containment, image=image)

    def _label_children(self, children: List[PuzzlePiece], depth: int) -> List[PuzzlePiece]:
        critical = self.critical_piece(depth)
        top = self.depth0_pieces() if depth == 1 and self.portrait.name == 'alpha' else []
        labeled = []
        for child in children:
            if child.key == critical.key:
                labeled.append(replace(child, label=f"Y^{depth}"))
                continue
            label = ''
            for parent in top:
                if parent.label != 'Y^0' and parent.contains_piece(child):
                    label = "Y^1_" + parent.label.rsplit('_', 1)[1]
            if top and not label:
                mirror = child.negated()
                for parent in top:
                    if parent.label != 'Y^0' and parent.contains_piece(mirror):
                        label = "Z^1_" + parent.label.rsplit('_', 1)[1]
            labeled.append(replace(child, label=label or f"P^{depth}{child.arcs[0]}"))
        return labeled

    def family(self, depth: int) -> PieceFamily:
        if depth > self.config.max_family_depth:
            raise PreconditionError(f"family depth {depth} exceeds max_family_depth={self.config.max_family_depth}")
        fam = self.depth0_family()
        for _ in range(depth):
            fam = self.refine(fam)
        return fam

    # ---------- orbit pieces ----------

    def _depth0_containing(self, z: complex) -> PuzzlePiece:
        hits = [p for p in self.depth0_pieces() if self.contains(p, z)]
        if len(hits) != 1:
            raise InternalError(f"{len(hits)} depth-0 pieces contain {z:.6g}")
        return hits[0]

    def _pull_one(self, piece: PuzzlePiece, z: complex) -> PuzzlePiece:
        options = self.split(piece)
        if len(options) == 1:
            return replace(options[0][0], degree=2)
        first, second = options[0][0], options[1][0]
        return first if self.contains(first, z) else second

    def _build(self, j: int, d: int) -> PuzzlePiece:
        j = self.orbit.canonical(j)
        t = 0
        while t < d and (self.orbit.canonical(j + t), d - t) not in self._orbit_pieces:
            t += 1
        key = (self.orbit.canonical(j + t), d - t)
        if key in self._orbit_pieces:
            piece = self._orbit_pieces[key]
        else:
            piece = self._depth0_containing(self.orbit[j + t])
            self._orbit_pieces[key] = piece
        for s in range(t - 1, -1, -1):
            piece = self._pull_one(piece, self.orbit[j + s])
            with self._lock:
                self._orbit_pieces[(self.orbit.canonical(j + s), d - s)] = piece
        return piece

    def orbit_piece(self, j: int, d: int) -> PuzzlePiece:
        """The depth-d piece containing f^j(0)."""
        key = (self.orbit.canonical(j), d)
        if key not in self._orbit_pieces:
            for e in range(d):
                if (1, e) not in self._orbit_pieces:
                    self._build(1, e)
            self._build(j, d)
        return self._orbit_pieces[key]

    def value_piece(self, d: int) -> PuzzlePiece:
        return self.orbit_piece(1, d)

    def critical_piece(self, d: int) -> PuzzlePiece:
        return replace(self.orbit_piece(0, d), label=f"Y^{d}")

    def same(self, i: int, j: int, d: int) -> bool:
        return self.orbit_piece(i, d).key == self.orbit_piece(j, d).key

    def in_critical(self, i: int, d: int) -> bool:
        return self.same(i, 0, d)

    def describe(self, i: int, d: int) -> str:
        p = self.orbit_piece(i, d)
        return p.label or f"P^{d}{p.arcs[0]}"

    # ---------- pullbacks ----------

    def pullback(self, piece: PuzzlePiece, k: int, z: complex) -> PuzzlePiece:
        """
        Component of f^-k(piece) around z, with its degree.

        The degree is the product of the step degrees (2 at every pass
        through a piece holding the critical value).
        """
        if k < 0:
            raise PreconditionError(f"pullback length must be >= 0, got {k}")
        orbit = [complex(z)]
        for _ in range(k):
            orbit.append(self.qmap(orbit[-1]))
        if not self.contains(piece, orbit[-1]):
            raise PreconditionError(f"f^{k}({z:.6g}) is not in {piece.label or piece.describe()}")
        current, degree, critical = piece, 1, False
        for s in range(k - 1, -1, -1):
            options = self.split(current)
            critical = len(options) == 1
            if critical:
                current = options[0][0]
                degree *= 2
            else:
                current = options[0][0] if self.contains(options[0][0], orbit[s]) else options[1][0]
        if critical:
            label = f"Y^{current.depth}"
        else:
            label = f"f^-{k}({piece.label})" if piece.label and k else piece.label
        return replace(current, degree=degree, label=label)

    def pullback_components(self, piece: PuzzlePiece, k: int) -> List[PuzzlePiece]:
        """All components of f^-k(piece), each carrying its degree."""
        current = [replace(piece, degree=1)]
        for _ in range(k):
            nxt = []
            for q_piece in current:
                for child, step in self.split(q_piece):
                    nxt.append(replace(child, degree=q_piece.degree * step))
            current = nxt
        return current

    # ---------- vertices ----------

    def vertex_tags(self, piece: PuzzlePiece) -> List[VertexTag]:
        """Vertices of `piece`, labeled dyadically when they are f^(qm)-preimages of alpha."""
        base = self.portrait.angles
        pairs = piece.vertex_pairs
        landings = self.landing([a for pair in pairs for a in pair])
        tags = []
        for pair in pairs:
            depth = landing_depth(pair[0], base, piece.depth + 1)
            base_index = None
            if depth is not None:
                x = pair[0]
                for _ in range(depth):
                    x = doubling(x)
                base_index = self.portrait.class_index(x)
            point = landings[pair[0]]
            label = None
            if self.portrait.name == 'alpha' and depth is not None:
                label = self._dyadic(depth, point)
            tags.append(VertexTag(angles=pair, depth=depth, base=base_index, label=label, point=point))
        return tags

    def _dyadic(self, depth: int, point: complex) -> Optional[DyadicVertexLabel]:
        if depth == 0:
            return dyadic_label([])
        if depth == 1:
            return dyadic_label([], depth=1)
        q = self.q
        m = -(-depth // q)
        signs, z = [], point
        for _ in range(m - 1):
            side = chord_side(self.qmap, z)
            if side == 0:
                return None
            signs.append(side)
            z = self.qmap.iterate(z, q)
        return dyadic_label(signs, depth=m)


def _angle_period(a: Angle) -> Optional[int]:
    """Exact period of a periodic angle under doubling, None if preperiodic."""
    den = a.denominator
    if den % 2 == 0:
        return None
    if den == 1:
        return 1
    k, x = 1, 2 % den
    while x != 1:
        x = (2 * x) % den
        k += 1
    return k


# =====================
# STRUCTURAL CHECKS
# =====================

def depth0_pieces(qmap: QuadraticMap, cycle: AngleCycle, config: Optional[RunConfig] = None,
                  cache: Optional[RayCache] = None) -> Tuple[Puzzle, PieceFamily]:
    """The q depth-0 pieces of the alpha-cycle; every cycle ray must land at alpha."""
    config = config or RunConfig()
    if not qmap.is_alpha_repelling(config.repelling_margin):
        raise PreconditionError(f"alpha is not repelling at {qmap.label()}")
    puzzle = Puzzle(qmap, Portrait.from_cycle(qmap, cycle), config=config, cache=cache)
    puzzle.check_base_landing()
    family = puzzle.depth0_family()
    return puzzle, PieceFamily(depth=0, pieces=[puzzle.geometrize(p) for p in family.pieces])


def polygons_overlap(puzzle: Puzzle, a: PuzzlePiece, b: PuzzlePiece) -> bool:
    """Whether any boundary sample of one piece lies strictly inside the other."""
    pa, pb = puzzle.geometry(a), puzzle.geometry(b)
    for poly, other in ((pa, b), (pb, a)):
        opoly = puzzle.geometry(other)
        band = puzzle.config.boundary_band * diameter(opoly)
        for z in poly[:-1]:
            if segment_distance(opoly, z) > band and abs(round(winding_number(opoly, z))) == 1:
                return True
    return False


def separating_pieces(puzzle: Puzzle, piece: PuzzlePiece, n: int) -> List[PuzzlePiece]:
    """
    Q^v for every vertex v of P = Y^((n-1)q+1): the univalent f^(nq)-pullback
    of P inside P attached to v.
    """
    q = puzzle.q
    components = puzzle.pullback_components(piece, n * q)
    out = []
    for tag in puzzle.vertex_tags(piece):
        matches = [c for c in components
                   if c.degree == 1 and piece.contains_piece(c) and tag.angles in c.vertex_pairs]
        if not matches:
            raise InternalError(f"no univalent pullback of {piece.label} attached to vertex {tag.name()}")
        out.append(replace(matches[0], label=f"Q^{tag.name()}"))
    for i in range(len(out)):
        for j in range(i + 1, len(out)):
            if polygons_overlap(puzzle, out[i], out[j]):
                raise InternalError(f"{out[i].label} and {out[j].label} overlap: tracing tolerance too coarse")
    return out


def q_pieces(puzzle: Puzzle) -> Tuple[PuzzlePiece, PuzzlePiece]:
    """Q_L (attached to alpha) and Q_R (attached to alpha') for n = 1."""
    pieces = separating_pieces(puzzle, puzzle.critical_piece(1), 1)
    by_name = {p.label: p for p in pieces}
    return (replace(by_name["Q^0"], label="Q_L"), replace(by_name["Q^1/2"], label="Q_R"))


@dataclass
class ContainmentRecord:
    label: str
    container: str
    symbolic: bool
    geometric: bool


def check_pullback_containment(puzzle: Puzzle, n: int) -> List[ContainmentRecord]:
    """
    Every component P of f^-(qn)(Z^0), Z^0 = -Y^0 of bidepth (1, 0), must
    sit compactly inside Y^0 or inside Z^0.
    """
    y0 = next(p for p in puzzle.depth0_pieces() if p.label == "Y^0")
    z0 = replace(PuzzlePiece(1, 0, tuple(a.shifted(HALF) for a in y0.arcs)), label="Z^0")
    records = []
    for k, comp in enumerate(puzzle.pullback_components(z0, puzzle.q * n)):
        label = f"P{k}"
        container, symbolic = '', False
        for candidate in (y0, z0):
            if candidate.contains_piece(comp):
                container, symbolic = candidate.label, True
                break
        geometric = False
        if symbolic:
            host = y0 if container == "Y^0" else z0
            outer = puzzle.geometry(host, 0)
            band = puzzle.config.boundary_band * diameter(outer)
            poly = puzzle.geometry(comp)
            geometric = all(segment_distance(outer, z) > band and abs(round(winding_number(outer, z))) == 1
                            for z in poly[:-1])
        records.append(ContainmentRecord(label=label, container=container, symbolic=symbolic, geometric=geometric))
    return records


def image_distance(puzzle: Puzzle, piece: PuzzlePiece, image: PuzzlePiece) -> float:
    """Largest distance from f(boundary of piece) to the boundary of its image piece."""
    poly = puzzle.geometry(piece)
    target = puzzle.geometry(image)
    mapped = puzzle.qmap(poly)
    return max(segment_distance(target, z) for z in mapped)


def piece_to_dict(puzzle: Optional[Puzzle], piece: PuzzlePiece, with_geometry: bool = True) -> dict:
    out = {
        'label': piece.label,
        'bidepth': list(piece.bidepth),
        'degree': piece.degree,
        'arcs': [[str(a.start), str(a.end)] for a in piece.arcs],
        'vertices': [[str(x), str(y)] for x, y in piece.vertex_pairs],
    }
    if with_geometry and puzzle is not None:
        poly = puzzle.geometry(piece)
        out['polyline'] = [[float(z.real), float(z.imag)] for z in poly]
    return out


def family_to_dict(puzzle: Optional[Puzzle], family: PieceFamily, with_geometry: bool = True) -> dict:
    return {
        'depth': family.depth,
        'count': len(family),
        'pieces': [piece_to_dict(puzzle, p, with_geometry) for p in family.pieces],
        'containment': {str(k): v for k, v in sorted(family.containment.items())},
        'image': {str(k): v for k, v in sorted(family.image.items())},
    }
