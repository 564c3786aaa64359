"""
Real-line combinatorics of x -> x^2 + c for real c.

For real parameters every puzzle membership used by the nest reduces to sign
conditions on the real critical orbit x_j = f^j(0):

    same(i, j, 0)  no base point lies strictly between x_i and x_j
    same(i, j, d)  same(i+1, j+1, d-1) and (x_i, x_j on the same side of 0
                   or x_(i+1) in the depth-(d-1) piece of the critical value)

where the base points are a forward-invariant real orbit (alpha at the top
level, the orbit of a little alpha after renormalization).

The module also locates superstable parameters from their kneading word by
bisection and reads off external angles of real periodic points.

USAGE:
    from real_line import locate_superstable, RealLineOracle
    c = locate_superstable("LR")           # airplane, period 3
    oracle = RealLineOracle.top_level(c)
    oracle.same(2, 0, 1)                    # is f^2(0) in Y^1 ?
"""

import math
from fractions import Fraction
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from angles import Angle
from dynamics import CriticalOrbit, QuadraticMap
from errors import ArgumentError, NumericError, OnBoundaryError, PreconditionError

PERIOD_TOL = 1e-10
BOUNDARY_TOL = 1e-13
C_MIN, C_MAX = -2.0, 0.25


# =====================
# ITINERARIES AND ANGLES
# =====================

def sign_of(x: float, tol: float = 0.0) -> int:
    if x > tol:
        return 1
    if x < -tol:
        return -1
    return 0


def itinerary(c: float, period: int, tol: float = PERIOD_TOL) -> str:
    """Symbols L / R / C of x_1 .. x_period (C for a return to 0)."""
    x, out = 0.0, []
    for _ in range(period):
        x = x * x + c
        s = sign_of(x, tol)
        out.append('C' if s == 0 else ('L' if s < 0 else 'R'))
    return ''.join(out)


def angle_digits(signs: Sequence[int], count: int) -> List[int]:
    """
    Binary digits b_1..b_count of the upper external angle of a real point.

    b_(k+1) is the parity of the number of negative points among x_0..x_(k-1).
    """
    digits, negatives = [], 0
    for k in range(count):
        digits.append(negatives & 1)
        if k < len(signs) and signs[k] < 0:
            negatives += 1
    return digits


def real_point_angle(c: float, x: float, period: int) -> Angle:
    """
    Upper external angle of a real repelling periodic point x of exact period `period`.

    The sign sequence repeats with the period, so the digit sequence repeats
    with twice the period and the angle is an exact fraction.
    """
    if period < 1:
        raise ArgumentError(f"period must be >= 1, got {period}")
    orbit = [x]
    for _ in range(period - 1):
        orbit.append(orbit[-1] ** 2 + c)
    signs = [sign_of(v, BOUNDARY_TOL) for v in orbit]
    if 0 in signs:
        raise PreconditionError(f"orbit of {x} passes through 0; real angle is ambiguous")
    length = 2 * period
    digits = angle_digits([signs[k % period] for k in range(length)], length)
    numerator = int(''.join(str(b) for b in digits), 2)
    return Angle(Fraction(numerator, (1 << length) - 1))


def kneading_prefix(c: float, count: int) -> Tuple[Tuple[int, ...], float]:
    """First `count` angle digits of the critical value, plus f^count(0)."""
    y = c
    signs = []
    for _ in range(count - 1):
        signs.append(sign_of(y))
        y = y * y + c
    return tuple(angle_digits(signs, count)), y


def word_digits(word: str) -> Tuple[int, ...]:
    signs = [-1 if s == 'L' else 1 for s in word]
    return tuple(angle_digits(signs, len(word) + 1))


# =====================
# SUPERSTABLE PARAMETERS
# =====================

def _check_word(word: str):
    if not word or any(s not in 'LR' for s in word):
        raise ArgumentError(f"kneading word must be a nonempty string over L/R, got '{word}'")


def superstable_residual(c: float, period: int) -> Tuple[float, float]:
    """f_c^period(0) and its derivative with respect to c."""
    z, dz = 0.0, 0.0
    for _ in range(period):
        dz = 2 * z * dz + 1
        z = z * z + c
    return z, dz


def locate_superstable(word: str, max_iter: int = 200, tol: float = 1e-9) -> float:
    """
    Real superstable parameter whose critical orbit has signs `word` then returns to 0.

    The upper angle of the critical value decreases as c increases on
    [-2, 1/4], so the first len(word)+1 kneading digits order the parameters.
    Ties are broken on the next digit, which depends on the sign of f^P(0).
    """
    _check_word(word)
    period = len(word) + 1
    target = word_digits(word)
    parity = word.count('L') & 1
    lo, hi = C_MIN, C_MAX
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        digits, y = kneading_prefix(mid, period)
        if digits > target:
            lo = mid
        elif digits < target:
            hi = mid
        else:
            next_digit = (parity + (1 if y < 0 else 0)) & 1
            if next_digit == 1:
                lo = mid
            else:
                hi = mid
    c = 0.5 * (lo + hi)
    for _ in range(8):
        f, df = superstable_residual(c, period)
        if df == 0:
            break
        step = f / df
        if abs(step) > 1e-6:
            break
        c -= step
        if abs(step) < 1e-17:
            break
    residual, _ = superstable_residual(c, period)
    if abs(residual) > tol or itinerary(c, period - 1) != word:
        raise ArgumentError(f"kneading word '{word}' is not admissible (residual {residual:.3g})")
    return c


def tuned_word(outer: str, inner: str) -> str:
    """
    Kneading word of the superstable parameter `outer` tuned by `inner`.

    Positions that are not multiples of n = len(outer)+1 repeat the outer
    word; position k*n carries inner's k-th symbol, flipped when f^n has a
    maximum at 0 (an odd number of L in outer).
    """
    _check_word(outer)
    _check_word(inner)
    n = len(outer) + 1
    m = len(inner) + 1
    flip = outer.count('L') & 1
    out = []
    for j in range(1, n * m):
        if j % n:
            out.append(outer[j % n - 1])
        else:
            s = inner[j // n - 1]
            out.append(('R' if s == 'L' else 'L') if flip else s)
    return ''.join(out)


def enumerate_superstable(period: int) -> List[Tuple[str, float]]:
    """All real superstable parameters of exact period `period`, sorted by c."""
    if period < 2:
        raise ArgumentError(f"period must be >= 2, got {period}")
    found: Dict[float, str] = {}
    for tail in product('LR', repeat=period - 2):
        word = 'L' + ''.join(tail)
        try:
            c = locate_superstable(word)
        except ArgumentError:
            continue
        found.setdefault(round(c, 12), word)
    return sorted(((w, c) for c, w in found.items()), key=lambda item: item[1])


# =====================
# LITTLE ALPHA
# =====================

def central_window(c: float, period: int) -> float:
    """min |x_j| over 0 < j < period: the central little interval lies inside."""
    x, best = 0.0, math.inf
    for _ in range(period - 1):
        x = x * x + c
        best = min(best, abs(x))
    return best


def little_alpha(c: float, period: int, samples: int = 20001) -> float:
    """
    The fixed point of f^period with negative multiplier nearest to 0.

    Roots of f^period(x) - x are bracketed by a sign scan of the central
    window and refined by bisection.
    """
    if period < 1:
        raise ArgumentError(f"period must be >= 1, got {period}")
    if period == 1:
        return (1 - math.sqrt(1 - 4 * c)) / 2
    w = central_window(c, period)
    xs = np.linspace(-w, w, samples)
    ys = xs.copy()
    for _ in range(period):
        ys = ys * ys + c
    h = ys - xs
    roots = []
    for k in np.nonzero(np.sign(h[:-1]) * np.sign(h[1:]) < 0)[0]:
        a, b = float(xs[k]), float(xs[k + 1])
        ha = float(h[k])
        for _ in range(200):
            mid = 0.5 * (a + b)
            if mid in (a, b):
                break
            hm = _return_map(c, mid, period) - mid
            if (hm < 0) == (ha < 0):
                a, ha = mid, hm
            else:
                b = mid
        roots.append(0.5 * (a + b))
    candidates = [x for x in roots if _multiplier(c, x, period) < 0]
    if not candidates:
        raise NumericError(f"no negative-multiplier fixed point of f^{period} near 0 (c={c})")
    return min(candidates, key=abs)


def _return_map(c: float, x: float, period: int) -> float:
    for _ in range(period):
        x = x * x + c
    return x


def _multiplier(c: float, x: float, period: int) -> float:
    d = 1.0
    for _ in range(period):
        d *= 2 * x
        x = x * x + c
    return d


def periodic_orbit(c: float, x: float, period: int) -> List[float]:
    orbit = [x]
    for _ in range(period - 1):
        orbit.append(orbit[-1] ** 2 + c)
    return orbit


# =====================
# SIGN ORACLE
# =====================

class RealLineOracle:
    """
    Puzzle-piece membership for the real critical orbit, from signs only.

    Pieces are generated by a forward-invariant set of real base points
    (their rays cut the real line at these points). Indices of the
    critical orbit are reduced modulo the numerical period when the orbit
    is superattracting.
    """

    def __init__(self, c: float, base_points: Sequence[float], q: int = 2, scale: int = 1,
                 horizon: int = 10000, label: str = 'alpha'):
        c = complex(c)
        if c.imag != 0:
            raise PreconditionError(f"sign oracle needs a real parameter, got {c}")
        self.c = c.real
        self.base = np.sort(np.array(base_points, dtype=float))
        self.q = q
        self.scale = scale
        self.label = label
        self.orbit = CriticalOrbit(QuadraticMap(self.c), horizon=horizon, period_tol=PERIOD_TOL)
        self._memo: Dict[Tuple[int, int, int], bool] = {}

    @classmethod
    def top_level(cls, c: float, **kwargs) -> 'RealLineOracle':
        alpha = (1 - math.sqrt(1 - 4 * c)) / 2
        if abs(2 * alpha) <= 1:
            raise PreconditionError(f"alpha is not repelling at c={c}")
        return cls(c, [alpha], q=2, scale=1, **kwargs)

    @classmethod
    def renormalized(cls, c: float, period: int, **kwargs) -> 'RealLineOracle':
        """Oracle whose base is the orbit of the little alpha of period `period`."""
        a = little_alpha(c, period)
        return cls(c, periodic_orbit(c, a, period), q=2, scale=period,
                   label=f'little-alpha-{period}', **kwargs)

    def renormalize(self, period: int) -> 'RealLineOracle':
        return RealLineOracle.renormalized(self.c, period)

    @property
    def period(self) -> Optional[int]:
        return self.orbit.period

    def canonical(self, i: int) -> int:
        return self.orbit.canonical(i)

    def x(self, i: int) -> float:
        return self.orbit[i].real

    def sign(self, i: int) -> int:
        return sign_of(self.x(i))

    def base_index(self, i: int) -> int:
        """Index of the depth-0 interval holding x_i."""
        x = self.x(i)
        near = np.min(np.abs(self.base - x)) if len(self.base) else math.inf
        if near <= BOUNDARY_TOL * max(1.0, abs(x)):
            raise OnBoundaryError(f"x_{i} = {x} lies on a base point", point=complex(x))
        return int(np.searchsorted(self.base, x))

    def same(self, i: int, j: int, d: int) -> bool:
        """Whether x_i and x_j lie in the same depth-d piece."""
        i, j = self.canonical(i), self.canonical(j)
        if i == j:
            return True
        key = (min(i, j), max(i, j), d)
        if key in self._memo:
            return self._memo[key]
        if d == 0:
            result = self.base_index(i) == self.base_index(j)
        else:
            result, merged = True, False
            for t in range(d):
                if self.canonical(i + t) == self.canonical(j + t):
                    merged = True
                    break
                if self.sign(i + t) != self.sign(j + t) and not self.same(i + t + 1, 1, d - t - 1):
                    result = False
                    break
            if result and not merged:
                result = self.base_index(i + d) == self.base_index(j + d)
        self._memo[key] = result
        return result

    def in_critical(self, i: int, d: int) -> bool:
        return self.same(i, 0, d)

    def describe(self, i: int, d: int) -> str:
        """Address of the depth-d piece of x_i: base interval then signs."""
        signs = ''.join('+' if self.sign(i + t) > 0 else ('-' if self.sign(i + t) < 0 else '0')
                        for t in range(d))
        return f"I{self.base_index(i + d)}:{signs}" if signs else f"I{self.base_index(i)}"
