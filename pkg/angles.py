"""
Exact external-angle arithmetic under the doubling map t -> 2t mod 1.

Angles are reduced rationals (fractions.Fraction) in [0, 1). No floating point
arithmetic is used on angles anywhere in the package: rays, pieces and
labels are all keyed by these exact values.

USAGE:
    from angles import Angle, alpha_cycle, preimages
    cycle = alpha_cycle(1, 3)          # {1/7, 2/7, 4/7}
    preimages(Angle.parse("1/3"), 1)   # {1/6, 2/3}
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import gcd
from typing import Iterable, List, Optional, Sequence, Tuple

from errors import ArgumentError, InternalError


# =====================
# ANGLE TYPE
# =====================

@dataclass(frozen=True, order=True)
class Angle:
    """A point of R/Z stored as a reduced fraction in [0, 1)."""

    value: Fraction

    def __post_init__(self):
        v = Fraction(self.value) % 1
        object.__setattr__(self, 'value', v)

    @classmethod
    def of(cls, numerator: int, denominator: int = 1) -> 'Angle':
        if denominator == 0:
            raise ArgumentError(f"angle {numerator}/{denominator}: zero denominator")
        return cls(Fraction(numerator, denominator))

    @classmethod
    def parse(cls, text: str) -> 'Angle':
        """Parse "num/den" (or a bare integer) into an Angle."""
        s = str(text).strip()
        try:
            if '/' in s:
                num, den = s.split('/', 1)
                return cls.of(int(num), int(den))
            return cls.of(int(s))
        except (ValueError, ZeroDivisionError) as exc:
            raise ArgumentError(f"malformed angle '{text}'") from exc

    @property
    def numerator(self) -> int:
        return self.value.numerator

    @property
    def denominator(self) -> int:
        return self.value.denominator

    def __float__(self) -> float:
        return float(self.value)

    def __str__(self) -> str:
        return f"{self.numerator}/{self.denominator}"

    def __add__(self, other) -> 'Angle':
        other = other.value if isinstance(other, Angle) else Fraction(other)
        return Angle(self.value + other)

    def __neg__(self) -> 'Angle':
        return Angle(-self.value)

    def pushed(self, n: int) -> Fraction:
        """2^n * angle mod 1, exact."""
        den = self.denominator
        return Fraction((self.numerator << n) % den, den)


def doubling(a: Angle) -> Angle:
    """The angle action of f: returns 2a mod 1."""
    return Angle(2 * a.value)


def iterate_doubling(a: Angle, n: int) -> Angle:
    return Angle(a.pushed(n))


def arc_length(start: Angle, end: Angle) -> Fraction:
    """Length of the counterclockwise arc from start to end (0 if equal)."""
    return (end.value - start.value) % 1


def in_arc(start: Angle, end: Angle, x: Angle, closed: bool = False) -> bool:
    """Whether x lies on the counterclockwise arc (start, end)."""
    length = arc_length(start, end)
    offset = (x.value - start.value) % 1
    if closed:
        return offset <= length or (length == 0 and offset == 0)
    return 0 < offset < length


# =====================
# ALPHA CYCLES
# =====================

@dataclass(frozen=True)
class AngleCycle:
    """The q angles of the rays landing at alpha, in cyclic (increasing) order."""

    angles: Tuple[Angle, ...]
    rotation_number: Fraction

    @property
    def period(self) -> int:
        return len(self.angles)

    @property
    def p(self) -> int:
        return self.rotation_number.numerator

    @property
    def q(self) -> int:
        return self.rotation_number.denominator

    def index(self, a: Angle) -> int:
        return self.angles.index(a)

    def __contains__(self, a: Angle) -> bool:
        return a in self.angles

    def __iter__(self):
        return iter(self.angles)

    def __str__(self) -> str:
        return "{" + ", ".join(str(a) for a in self.angles) + "}"


EXHAUSTIVE_LIMIT = 16
MAX_PERIOD = 64


def _check_pq(p: int, q: int):
    if not (isinstance(p, int) and isinstance(q, int)):
        raise ArgumentError(f"rotation number must be integers, got ({p}, {q})")
    if not (1 <= p < q) or gcd(p, q) != 1:
        raise ArgumentError(f"invalid rotation number {p}/{q}: need 1 <= p < q, gcd(p, q) = 1")
    if q > MAX_PERIOD:
        raise ArgumentError(f"period {q} exceeds the supported maximum {MAX_PERIOD}")


def rotation_step(residues: Sequence[int], modulus: int) -> Optional[int]:
    """Cyclic step by which doubling advances a sorted residue cycle, or None."""
    q = len(residues)
    position = {r: i for i, r in enumerate(residues)}
    step = None
    for i, r in enumerate(residues):
        image = (2 * r) % modulus
        if image not in position:
            return None
        s = (position[image] - i) % q
        if step is None:
            step = s
        elif s != step:
            return None
    return step


def doubling_cycles(q: int) -> List[Tuple[int, ...]]:
    """All cycles of exact period q of k -> 2k mod (2^q - 1), as sorted residues."""
    modulus = (1 << q) - 1
    seen = set()
    cycles = []
    for k in range(modulus):
        if k in seen:
            continue
        orbit = [k]
        x = (2 * k) % modulus
        while x != k:
            orbit.append(x)
            x = (2 * x) % modulus
        seen.update(orbit)
        if len(orbit) == q:
            cycles.append(tuple(sorted(orbit)))
    return cycles


def _alpha_cycle_exhaustive(p: int, q: int) -> Tuple[int, ...]:
    modulus = (1 << q) - 1
    hits = [c for c in doubling_cycles(q) if rotation_step(c, modulus) == p]
    if len(hits) != 1:
        raise InternalError(f"expected a unique {p}/{q} rotation cycle, found {len(hits)}")
    return hits[0]


def _alpha_cycle_word(p: int, q: int) -> Tuple[int, ...]:
    # digit k of the i-th smallest angle is 1 iff (i + k p) mod q >= q - p
    residues = []
    for i in range(q):
        n = 0
        for k in range(q):
            n = (n << 1) | (1 if (i + k * p) % q >= q - p else 0)
        residues.append(n)
    return tuple(sorted(residues))


def alpha_cycle(p: int, q: int) -> AngleCycle:
    """The unique period-q doubling cycle with combinatorial rotation number p/q."""
    _check_pq(p, q)
    if q <= EXHAUSTIVE_LIMIT:
        residues = _alpha_cycle_exhaustive(p, q)
    else:
        residues = _alpha_cycle_word(p, q)
        if rotation_step(residues, (1 << q) - 1) != p:
            raise InternalError(f"rotation word for {p}/{q} is not a rotation cycle")
    modulus = (1 << q) - 1
    angles = tuple(Angle.of(r, modulus) for r in residues)
    return AngleCycle(angles=angles, rotation_number=Fraction(p, q))


def rotation_numbers(q_max: int) -> List[Tuple[int, int]]:
    """All (p, q) with 2 <= q <= q_max and gcd(p, q) = 1, ordered by q then p."""
    return [(p, q) for q in range(2, q_max + 1) for p in range(1, q) if gcd(p, q) == 1]


# =====================
# PREIMAGES AND LENGTHS
# =====================

def preimages(a: Angle, depth: int) -> List[Angle]:
    """All 2^depth angles b with doubling^depth(b) = a, sorted."""
    if depth < 0:
        raise ArgumentError(f"depth must be >= 0, got {depth}")
    scale = 1 << depth
    return sorted(Angle((a.value + k) / scale) for k in range(scale))


def halves(a: Angle) -> Tuple[Angle, Angle]:
    """The two preimages a/2 and a/2 + 1/2."""
    h = a.value / 2
    return Angle(h), Angle(h + Fraction(1, 2))


def combinatorial_length(k: int, m: int, q: int) -> Fraction:
    """Length 2^k / ((2^q - 1) 2^m) of an external arc of a depth-m piece."""
    if not (0 <= k <= q - 1) or m < 0:
        raise ArgumentError(f"combinatorial_length needs 0 <= k <= q-1 and m >= 0, got k={k}, m={m}, q={q}")
    return Fraction(1 << k, ((1 << q) - 1) << m)


def depth0_arc_lengths(q: int) -> List[Fraction]:
    return [combinatorial_length(k, 0, q) for k in range(q)]


def landing_depth(a: Angle, base: Iterable[Angle], limit: int) -> Optional[int]:
    """Smallest k <= limit with doubling^k(a) in base, else None."""
    base = set(base)
    x = a
    for k in range(limit + 1):
        if x in base:
            return k
        x = doubling(x)
    return None


# =====================
# DYADIC VERTEX LABELS
# =====================

SIGN_TO_BIT = {+1: 1, -1: 0}  # +1 (below the chord alpha-alpha') is digit 1
BIT_TO_SIGN = {bit: sign for sign, bit in SIGN_TO_BIT.items()}


@dataclass(frozen=True)
class DyadicVertexLabel:
    """Label i/2^m of a vertex attached to alpha; alpha itself is 0."""

    value: Fraction
    signs: Tuple[int, ...] = field(default=())

    @property
    def depth(self) -> int:
        if self.value == 0:
            return 0
        return self.value.denominator.bit_length() - 1

    def __str__(self) -> str:
        return str(self.value)


def dyadic_label(signs: Sequence[int], depth: Optional[int] = None) -> DyadicVertexLabel:
    """
    Encode a sign sequence as i/2^m with binary expansion 0.e1...e_{m-1}1.

    Args:
        signs: epsilon_1, ..., epsilon_{m-1} in {+1, -1}
        depth: m; defaults to len(signs) + 1, or 0 (alpha) for empty signs.
            depth=1 with no signs is alpha'.
    Returns:
        DyadicVertexLabel
    """
    signs = tuple(signs)
    for s in signs:
        if s not in SIGN_TO_BIT:
            raise ArgumentError(f"signs must be +1 or -1, got {s}")
    if depth is None:
        depth = len(signs) + 1 if signs else 0
    if depth == 0:
        if signs:
            raise ArgumentError("alpha (depth 0) carries no signs")
        return DyadicVertexLabel(Fraction(0), ())
    if depth != len(signs) + 1:
        raise ArgumentError(f"depth {depth} needs {depth - 1} signs, got {len(signs)}")
    i = 0
    for s in signs:
        i = (i << 1) | SIGN_TO_BIT[s]
    i = (i << 1) | 1
    return DyadicVertexLabel(Fraction(i, 1 << depth), signs)


def label_signs(value: Fraction) -> Tuple[Tuple[int, ...], int]:
    """Inverse of dyadic_label: returns (signs, depth)."""
    value = Fraction(value)
    if value == 0:
        return (), 0
    den = value.denominator
    if value < 0 or value >= 1 or den & (den - 1) or value.numerator % 2 == 0:
        raise ArgumentError(f"{value} is not a dyadic label i/2^m with odd i")
    depth = den.bit_length() - 1
    bits = format(value.numerator, f'0{depth}b')
    return tuple(BIT_TO_SIGN[int(b)] for b in bits[:-1]), depth


def format_angles(angles: Iterable[Angle]) -> List[str]:
    return [str(a) for a in angles]


def unlinked(pair_a: Tuple[Angle, Angle], pair_b: Tuple[Angle, Angle]) -> bool:
    """Whether two chords of the circle do not cross."""
    a0, a1 = pair_a
    inside = [in_arc(a0, a1, x) for x in pair_b]
    return inside[0] == inside[1] or any(x in pair_a for x in pair_b)


def all_unlinked(pairs: Sequence[Tuple[Angle, Angle]]) -> bool:
    return all(unlinked(a, b) for a, b in combinations(pairs, 2))
