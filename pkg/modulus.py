"""
Conformal modulus and extremal length on grids.

A domain is a set of active cells on a (possibly anisotropic, possibly
x-periodic) grid. Nodes carry boundary labels: LOW (u = 0: inner boundary
or side a), HIGH (u = 1: outer boundary or side b) or FREE. Free boundary
nodes get natural (Neumann) conditions. The discrete Dirichlet energy of
the harmonic u gives the modulus as 1 / energy, normalized so that the
round annulus r < |z| < R has modulus log(R/r) / 2pi and the a x h
rectangle between its length-a sides has modulus h/a.

Also here: the harmonic-sum calculus, the series and parallel laws, the
appendix checks (strip bounds, cylinder bound, factor 16, degree rule)
and the analytic fixtures used to test all of them.
"""

import math
from dataclasses import dataclass, field
from functools import partial
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.sparse as sps
from matplotlib.path import Path
from scipy import ndimage
from scipy.sparse.linalg import LinearOperator, cg

from errors import ArgumentError, NumericError

FREE, LOW, HIGH = 0, 1, 2

ANNULUS = 'annulus'
CONDENSER = 'condenser'
QUAD = 'quad'

PASS, FAIL, INCONCLUSIVE = 'pass', 'fail', 'inconclusive'


# =====================
# MODULUS ARITHMETIC
# =====================

@dataclass(frozen=True)
class Modulus:
    """Nonnegative extended real with an error bar."""

    value: float
    error: float = 0.0
    note: str = ''

    def __post_init__(self):
        if self.value < 0 or math.isnan(self.value):
            raise ArgumentError(f"modulus must be >= 0, got {self.value}")
        if self.error < 0:
            raise ArgumentError(f"error estimate must be >= 0, got {self.error}")

    @property
    def lower(self) -> float:
        return max(self.value - self.error, 0.0)

    @property
    def upper(self) -> float:
        return self.value + self.error

    def to_dict(self) -> dict:
        return {'value': self.value, 'error': self.error, 'note': self.note}

    def __str__(self) -> str:
        return f"{self.value:.6g} ± {self.error:.2g}"


def as_modulus(x: Union[Modulus, float]) -> Modulus:
    return x if isinstance(x, Modulus) else Modulus(float(x))


def _inv(x: float) -> float:
    if x == 0:
        return math.inf
    if math.isinf(x):
        return 0.0
    return 1.0 / x


def harmonic_sum(x: Union[Modulus, float], y: Union[Modulus, float]) -> Modulus:
    """x ⊕ y = (1/x + 1/y)^-1 with 1/0 = inf and 1/inf = 0."""
    x, y = as_modulus(x), as_modulus(y)
    s = _inv(_inv(x.value) + _inv(y.value))
    err = 0.0
    for m in (x, y):
        if 0 < m.value < math.inf and s < math.inf:
            err += (s / m.value) ** 2 * m.error
    return Modulus(s, err)


def harmonic_diff(x: Union[Modulus, float], y: Union[Modulus, float]) -> float:
    """
    x ⊖ y = (1/x - 1/y)^-1 as a signed extended real: 2 ⊖ 3 = 6, 3 ⊖ 2 = -6
    and x ⊖ x = inf.
    """
    x, y = as_modulus(x), as_modulus(y)
    d = _inv(x.value) - _inv(y.value)
    if math.isnan(d):
        raise ArgumentError("0 ⊖ 0 is undefined")
    return _inv(d)


def parallel_law(values: Sequence[Union[Modulus, float]], mode: str = 'length') -> Modulus:
    """
    Curve families side by side. Lengths combine by harmonic sum; with
    mode='width' the inputs are widths and simply add.
    """
    if not values:
        raise ArgumentError("parallel_law needs at least one value")
    values = [as_modulus(v) for v in values]
    if mode == 'width':
        return Modulus(sum(v.value for v in values), sum(v.error for v in values))
    if mode != 'length':
        raise ArgumentError(f"mode must be 'length' or 'width', got {mode!r}")
    out = values[0]
    for v in values[1:]:
        out = harmonic_sum(out, v)
    return out


def series_law(values: Sequence[Union[Modulus, float]]) -> Modulus:
    """Curve families in series: lengths add."""
    if not values:
        raise ArgumentError("series_law needs at least one value")
    values = [as_modulus(v) for v in values]
    return Modulus(sum(v.value for v in values), sum(v.error for v in values))


# =====================
# VERDICTS
# =====================

@dataclass
class InequalityVerdict:
    """lhs <= rhs (or an equality within tolerance), with error bars."""

    name: str
    lhs: float
    rhs: float
    lhs_error: float = 0.0
    rhs_error: float = 0.0
    status: str = INCONCLUSIVE
    slack: float = 0.0
    note: str = ''

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def to_dict(self) -> dict:
        return {
            'name': self.name, 'lhs': self.lhs, 'rhs': self.rhs,
            'lhs_error': self.lhs_error, 'rhs_error': self.rhs_error,
            'status': self.status, 'slack': self.slack, 'note': self.note,
        }


def compare_le(name: str, lhs: Union[Modulus, float], rhs: Union[Modulus, float], note: str = '',
               strict: bool = False) -> InequalityVerdict:
    """Pass only when the error bars clear the inequality; fail only when they clear its negation."""
    lhs, rhs = as_modulus(lhs), as_modulus(rhs)
    slack = rhs.value - lhs.value
    if lhs.upper < rhs.lower or (not strict and lhs.upper == rhs.lower):
        status = PASS
    elif lhs.lower > rhs.upper or (strict and lhs.lower == rhs.upper):
        status = FAIL
    else:
        status = INCONCLUSIVE
    return InequalityVerdict(name, lhs.value, rhs.value, lhs.error, rhs.error, status, slack, note)


def _combine(name: str, parts: List[InequalityVerdict], note: str = '') -> InequalityVerdict:
    if any(p.status == FAIL for p in parts):
        status = FAIL
    elif all(p.status == PASS for p in parts):
        status = PASS
    else:
        status = INCONCLUSIVE
    worst = min(parts, key=lambda p: p.slack)
    notes = [note] + [f"{p.name}: {p.status}" for p in parts]
    return InequalityVerdict(name, worst.lhs, worst.rhs, worst.lhs_error, worst.rhs_error, status,
                             worst.slack, '; '.join(n for n in notes if n))


def check_pi_bounds(h: float, a: float, computed: Union[Modulus, float]) -> InequalityVerdict:
    """h/2a <= mod Pi <= h/a; the lower bound is gated on h/a <= 1/2."""
    if h <= 0 or a <= 0:
        raise ArgumentError(f"strip height and base must be positive, got h={h}, a={a}")
    computed = as_modulus(computed)
    upper = compare_le('pi-upper', computed, h / a)
    if h / a > 0.5:
        return _combine('pi-bounds', [upper],
                        note=f"h/a={h / a:.3g} > 1/2: lower bound not gated (mod Pi <= 1/4 case untested)")
    lower = compare_le('pi-lower', h / (2 * a), computed)
    return _combine('pi-bounds', [lower, upper])


def check_cylinder_bound(mod_strip: Union[Modulus, float], mod_cyl: Union[Modulus, float]) -> InequalityVerdict:
    """mod Pi >= min(mod C, 0.5) / 2."""
    mod_cyl = as_modulus(mod_cyl)
    half = Modulus(0.5 * min(mod_cyl.value, 0.5), 0.5 * mod_cyl.error if mod_cyl.value < 0.5 else 0.0)
    return compare_le('cylinder-bound', half, mod_strip)


def check_groetzsch16(mod_holomorphic: Union[Modulus, float], mod_embedded: Union[Modulus, float]) -> InequalityVerdict:
    """mod of a holomorphic annulus <= 16 * the maximal embedded one."""
    e = as_modulus(mod_embedded)
    return compare_le('factor-16', mod_holomorphic, Modulus(16 * e.value, 16 * e.error))


def check_degree_rule(mod_image: Union[Modulus, float], mod_preimage: Union[Modulus, float], n: int,
                      tol: float = 0.02) -> InequalityVerdict:
    """mod(image) = N * mod(preimage) for a degree-N covering of annuli, within tol."""
    img, pre = as_modulus(mod_image), as_modulus(mod_preimage)
    scaled = Modulus(n * pre.value, n * pre.error)
    deviation = abs(img.value - scaled.value)
    allowed = tol * max(img.value, scaled.value) + img.error + scaled.error
    status = PASS if deviation <= allowed else FAIL
    return InequalityVerdict(f'degree-{n}-rule', img.value, scaled.value, img.error, scaled.error, status,
                             allowed - deviation, note=f"relative deviation {deviation / max(img.value, 1e-300):.3g}")


# =====================
# GRID DOMAINS
# =====================

@dataclass
class GridDomain:
    """
    Active cells (ny, nx) and node labels (ny+1, nx or nx+1).

    `rebuild(cells=n)` regenerates the same geometric domain at another
    resolution, for error estimates by refinement.
    """

    cells: np.ndarray
    labels: np.ndarray
    hx: float
    hy: float
    mode: str = ANNULUS
    periodic: bool = False
    origin: complex = 0j
    name: str = ''
    resolution: int = 0
    rebuild: Optional[Callable[[int], 'GridDomain']] = field(default=None, repr=False, compare=False)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.cells.shape

    @property
    def ncols(self) -> int:
        return self.cells.shape[1] if self.periodic else self.cells.shape[1] + 1

    def node_mask(self) -> np.ndarray:
        """Nodes that are corners of an active cell."""
        return _touching(self.cells, self.periodic)

    def validate(self):
        ny, nx = self.cells.shape
        if self.labels.shape != (ny + 1, self.ncols):
            raise ArgumentError(f"labels shape {self.labels.shape} does not match cells {self.cells.shape}")
        if not self.cells.any():
            raise ArgumentError(f"domain {self.name!r} has no active cells")
        nodes = self.node_mask()
        for value, what in ((LOW, 'inner/side-a'), (HIGH, 'outer/side-b')):
            if not np.any(nodes & (self.labels == value)):
                raise ArgumentError(f"domain {self.name!r} has no {what} boundary nodes")
        _, n_parts = ndimage.label(self.cells)
        if n_parts != 1 and not self.periodic:
            raise ArgumentError(f"domain {self.name!r} is disconnected ({n_parts} components)")
        if self.mode in (ANNULUS, CONDENSER) and not self.periodic:
            outside = np.pad(~self.cells, 1, constant_values=True)
            _, n_out = ndimage.label(outside)
            holes = n_out - 1
            if self.mode == ANNULUS and holes != 1:
                raise ArgumentError(f"annulus {self.name!r} must have exactly one hole, found {holes}")
            if self.mode == CONDENSER and holes < 1:
                raise ArgumentError(f"condenser {self.name!r} has no hole")

    def to_dict(self) -> dict:
        return {'name': self.name, 'mode': self.mode, 'shape': list(self.shape), 'hx': self.hx,
                'hy': self.hy, 'periodic': self.periodic, 'resolution': self.resolution}


def _touching(mask: np.ndarray, periodic: bool) -> np.ndarray:
    """Node (i, j) is set when any of the up to four cells around it is set."""
    if periodic:
        p = np.pad(mask, ((1, 1), (0, 0)), constant_values=False)
        rolled = np.roll(p, 1, axis=1)
        return p[:-1] | p[1:] | rolled[:-1] | rolled[1:]
    p = np.pad(mask, 1, constant_values=False)
    return p[:-1, :-1] | p[1:, :-1] | p[:-1, 1:] | p[1:, 1:]


def from_masks(active: np.ndarray, inner: np.ndarray, hx: float, hy: float, mode: str = ANNULUS,
               origin: complex = 0j, name: str = '') -> GridDomain:
    """Annulus/condenser: nodes next to hole cells are LOW, nodes next to outside cells are HIGH."""
    outside = ~active & ~inner
    low = _touching(inner, False)
    high = _touching(np.pad(outside, 1, constant_values=True), False)[1:-1, 1:-1]
    nodes = _touching(active, False)
    if np.any(nodes & low & high):
        raise ArgumentError(f"annulus {name!r} is thinner than one cell: inner and outer boundaries touch")
    labels = np.zeros(low.shape, dtype=np.int8)
    labels[high] = HIGH
    labels[low] = LOW
    return GridDomain(active, labels, hx, hy, mode=mode, origin=origin, name=name)


# =====================
# SOLVER
# =====================

def _edges(domain: GridDomain) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    ncols = domain.ncols
    iy, ix = np.nonzero(domain.cells)

    def nid(r, c):
        return r * ncols + (c % ncols if domain.periodic else c)

    n00, n01 = nid(iy, ix), nid(iy, ix + 1)
    n10, n11 = nid(iy + 1, ix), nid(iy + 1, ix + 1)
    wh = np.full(iy.size, 0.5 * domain.hy / domain.hx)
    wv = np.full(iy.size, 0.5 * domain.hx / domain.hy)
    i = np.concatenate([n00, n10, n00, n01])
    j = np.concatenate([n01, n11, n10, n11])
    w = np.concatenate([wh, wh, wv, wv])
    return i, j, w


def solve_energy(domain: GridDomain, rtol: float = 1e-10, maxiter: int = 20000) -> Tuple[float, float, np.ndarray]:
    """
    Solve the discrete Dirichlet problem by preconditioned conjugate gradients.

    Returns:
        (energy, relative residual, node values u on the (ny+1, ncols) grid)
    """
    domain.validate()
    i, j, w = _edges(domain)
    n = domain.labels.size
    lap = sps.coo_matrix((np.concatenate([w, w, -w, -w]),
                          (np.concatenate([i, j, i, j]), np.concatenate([i, j, j, i]))), shape=(n, n)).tocsr()
    labels = domain.labels.ravel()
    nodes = domain.node_mask().ravel()
    u = np.zeros(n)
    u[labels == HIGH] = 1.0
    free = np.nonzero(nodes & (labels == FREE))[0]
    fixed = np.nonzero(nodes & (labels != FREE))[0]
    residual = 0.0
    if free.size:
        a_ff = lap[free][:, free]
        b = -(lap[free][:, fixed] @ u[fixed])
        diag = a_ff.diagonal()
        precond = LinearOperator(a_ff.shape, matvec=lambda x: x / diag)
        norm_b = np.linalg.norm(b)
        if norm_b == 0:
            u[free] = 0.0
        else:
            sol, info = cg(a_ff, b, x0=np.full(free.size, 0.5), rtol=rtol, atol=0.0,
                           maxiter=maxiter, M=precond)
            residual = float(np.linalg.norm(a_ff @ sol - b) / norm_b)
            if info != 0:
                raise NumericError(f"conjugate gradients did not converge on {domain.name!r} "
                                   f"after {maxiter} iterations", residual=residual)
            u[free] = sol
    du = u[i] - u[j]
    energy = float(np.sum(w * du * du))
    return energy, residual, u.reshape(domain.labels.shape)


def _modulus_once(domain: GridDomain, rtol: float, maxiter: int) -> float:
    energy, _, _ = solve_energy(domain, rtol, maxiter)
    return _inv(energy)


def modulus_with_error(domain: GridDomain, rtol: float = 1e-10, maxiter: int = 20000,
                       refine: bool = True, fine_resolution: Optional[int] = None) -> Modulus:
    """
    Modulus on the finer of two grids (twice the resolution unless
    `fine_resolution` is given); the error bar is the change between them.
    """
    coarse = _modulus_once(domain, rtol, maxiter)
    if not refine or domain.rebuild is None or not domain.resolution:
        return Modulus(coarse, 0.0, note=f"{domain.name}: no refinement")
    target = fine_resolution or 2 * domain.resolution
    fine = _modulus_once(domain.rebuild(cells=target), rtol, maxiter)
    error = abs(fine - coarse) + 1e-12 * fine
    return Modulus(fine, error, note=f"{domain.name}: {domain.resolution}->{target}")


def annulus_modulus(domain: GridDomain, rtol: float = 1e-10, maxiter: int = 20000, refine: bool = True,
                    fine_resolution: Optional[int] = None) -> Modulus:
    """Extremal distance between the LOW (inner) and HIGH (outer) boundaries."""
    if domain.mode not in (ANNULUS, CONDENSER):
        raise ArgumentError(f"annulus_modulus needs an annulus domain, got mode {domain.mode!r}")
    return modulus_with_error(domain, rtol, maxiter, refine, fine_resolution)


def quad_modulus(domain: GridDomain, rtol: float = 1e-10, maxiter: int = 20000, refine: bool = True,
                 fine_resolution: Optional[int] = None) -> Modulus:
    """Extremal distance between side a (LOW) and side b (HIGH); free sides are Neumann."""
    if domain.mode != QUAD:
        raise ArgumentError(f"quad_modulus needs a quadrilateral domain, got mode {domain.mode!r}")
    return modulus_with_error(domain, rtol, maxiter, refine, fine_resolution)


# =====================
# FIXTURES
# =====================

def _fixture(domain: GridDomain, builder, resolution: int, **kwargs) -> GridDomain:
    domain.resolution = resolution
    domain.rebuild = partial(builder, **kwargs)
    return domain


def rectangle(a: float = 1.0, h: float = 1.0, cells: int = 512, swap: bool = False) -> GridDomain:
    """a x h rectangle; sides are the two length-a edges (the length-h edges if swap)."""
    if a <= 0 or h <= 0:
        raise ArgumentError(f"rectangle sides must be positive, got {a} x {h}")
    big = max(a, h)
    nx = max(1, round(cells * a / big))
    ny = max(1, round(cells * h / big))
    labels = np.zeros((ny + 1, nx + 1), dtype=np.int8)
    if swap:
        labels[:, 0], labels[:, -1] = LOW, HIGH
    else:
        labels[0, :], labels[-1, :] = LOW, HIGH
    domain = GridDomain(np.ones((ny, nx), dtype=bool), labels, a / nx, h / ny, mode=QUAD,
                        name=f"rectangle {a:g}x{h:g}{' swapped' if swap else ''}")
    return _fixture(domain, rectangle, cells, a=a, h=h, swap=swap)


def stacked_rectangles(a: float, heights: Sequence[float], cells: int = 512) -> GridDomain:
    """Rectangles of common base a stacked vertically, crossed bottom to top."""
    total = float(sum(heights))
    big = max(a, total)
    nx = max(1, round(cells * a / big))
    rows = [max(1, round(cells * h / big)) for h in heights]
    ny = sum(rows)
    labels = np.zeros((ny + 1, nx + 1), dtype=np.int8)
    labels[0, :], labels[-1, :] = LOW, HIGH
    domain = GridDomain(np.ones((ny, nx), dtype=bool), labels, a / nx, total / ny, mode=QUAD,
                        name=f"stack {a:g}x{list(heights)}")
    return _fixture(domain, stacked_rectangles, cells, a=a, heights=tuple(heights))


def log_polar_annulus(r: float, R: float, cells: int = 512) -> GridDomain:
    """Round annulus r < |z| < R as the periodic rectangle [log r, log R] x [0, 2pi)."""
    if not 0 < r < R:
        raise ArgumentError(f"need 0 < r < R, got r={r}, R={R}")
    length = math.log(R / r)
    ntheta = cells
    ns = max(2, round(cells * length / (2 * math.pi)))
    labels = np.zeros((ns + 1, ntheta), dtype=np.int8)
    labels[0, :], labels[-1, :] = LOW, HIGH
    domain = GridDomain(np.ones((ns, ntheta), dtype=bool), labels, 2 * math.pi / ntheta, length / ns,
                        mode=ANNULUS, periodic=True, name=f"log-polar annulus {r:g}<|z|<{R:g}")
    return _fixture(domain, log_polar_annulus, cells, r=r, R=R)


def cylinder(h: float, l: float, cells: int = 512) -> GridDomain:
    """Flat cylinder Pi(h)/lZ between its bottom and top circles; modulus h/l."""
    nx = cells
    ny = max(2, round(cells * h / l))
    labels = np.zeros((ny + 1, nx), dtype=np.int8)
    labels[0, :], labels[-1, :] = LOW, HIGH
    domain = GridDomain(np.ones((ny, nx), dtype=bool), labels, l / nx, h / ny, mode=ANNULUS,
                        periodic=True, name=f"cylinder h={h:g} l={l:g}")
    return _fixture(domain, cylinder, cells, h=h, l=l)


def _cell_centers(x0: float, y0: float, nx: int, ny: int, hx: float, hy: float) -> np.ndarray:
    xs = x0 + (np.arange(nx) + 0.5) * hx
    ys = y0 + (np.arange(ny) + 0.5) * hy
    gx, gy = np.meshgrid(xs, ys)
    return np.column_stack([gx.ravel(), gy.ravel()])


def _inside(poly: np.ndarray, points: np.ndarray) -> np.ndarray:
    poly = np.asarray(poly, dtype=complex)
    path = Path(np.column_stack([poly.real, poly.imag]), closed=True)
    return path.contains_points(points)


def polygon_annulus(outer: np.ndarray, inners: Sequence[np.ndarray], cells: int = 512, margin: int = 2,
                    name: str = 'polygon annulus', mode: Optional[str] = None) -> GridDomain:
    """Region inside the `outer` polyline and outside every `inners` polyline, rasterized by cell centers."""
    outer = np.asarray(outer, dtype=complex)
    inners = [np.asarray(p, dtype=complex) for p in inners]
    if not inners:
        raise ArgumentError(f"{name}: at least one inner boundary is needed")
    xmin, xmax = outer.real.min(), outer.real.max()
    ymin, ymax = outer.imag.min(), outer.imag.max()
    h = max(xmax - xmin, ymax - ymin) / cells
    if h <= 0:
        raise ArgumentError(f"{name}: outer boundary is degenerate")
    nx = int(math.ceil((xmax - xmin) / h)) + 2 * margin
    ny = int(math.ceil((ymax - ymin) / h)) + 2 * margin
    x0, y0 = xmin - margin * h, ymin - margin * h
    centers = _cell_centers(x0, y0, nx, ny, h, h)
    in_outer = _inside(outer, centers).reshape(ny, nx)
    inner = np.zeros((ny, nx), dtype=bool)
    for poly in inners:
        inner |= _inside(poly, centers).reshape(ny, nx)
    inner &= in_outer
    active = in_outer & ~inner
    mode = mode or (ANNULUS if len(inners) == 1 else CONDENSER)
    domain = from_masks(active, inner, h, h, mode=mode, origin=complex(x0, y0), name=name)
    return _fixture(domain, polygon_annulus, cells, outer=outer, inners=tuple(inners), margin=margin,
                    name=name, mode=mode)


def circle(radius: float, center: complex = 0j, samples: int = 720) -> np.ndarray:
    t = np.linspace(0.0, 2 * np.pi, samples + 1)
    return center + radius * np.exp(1j * t)


def square(half_side: float, center: complex = 0j) -> np.ndarray:
    s = half_side
    return center + np.array([-s - 1j * s, s - 1j * s, s + 1j * s, -s + 1j * s, -s - 1j * s])


def round_annulus(r: float, R: float, cells: int = 512, center: complex = 0j, scale: complex = 1.0) -> GridDomain:
    """Cartesian rasterization of scale*(r < |z| < R) + center."""
    domain = polygon_annulus(center + scale * circle(R), [center + scale * circle(r)], cells,
                             name=f"round annulus {r:g}<|z|<{R:g}")
    return _fixture(domain, round_annulus, cells, r=r, R=R, center=center, scale=scale)


def square_frame(inner_half: float = 1.0, ratio: float = 3.0, cells: int = 512) -> GridDomain:
    """Between concentric squares of half-sides inner_half and ratio*inner_half, grid-aligned."""
    n = cells if cells % 2 == 0 else cells + 1
    outer_half = ratio * inner_half
    h = 2 * outer_half / n
    k = int(round(inner_half / h))
    mid = n // 2
    inner = np.zeros((n, n), dtype=bool)
    inner[mid - k:mid + k, mid - k:mid + k] = True
    active = ~inner
    labels = np.zeros((n + 1, n + 1), dtype=np.int8)
    labels[0, :] = labels[-1, :] = labels[:, 0] = labels[:, -1] = HIGH
    labels[mid - k:mid + k + 1, mid - k:mid + k + 1] = LOW
    domain = GridDomain(active, labels, h, h, mode=ANNULUS, origin=complex(-outer_half, -outer_half),
                        name=f"square frame ratio {ratio:g}")
    return _fixture(domain, square_frame, cells, inner_half=inner_half, ratio=ratio)


def l_shape(cells: int = 512, swap: bool = False) -> GridDomain:
    """
    L = [0,2]x[0,1] U [0,1]x[1,2] as a quadrilateral.

    Sides: the right end x=2 and the top end y=2; with swap, the reentrant
    corner path and the left+bottom path.
    """
    n = cells if cells % 2 == 0 else cells + 1
    h = 2.0 / n
    half = n // 2
    active = np.zeros((n, n), dtype=bool)
    active[:half, :] = True
    active[half:, :half] = True
    labels = np.zeros((n + 1, n + 1), dtype=np.int8)
    if not swap:
        labels[:half + 1, n] = LOW
        labels[n, :half + 1] = HIGH
    else:
        labels[half, half:] = LOW
        labels[half:, half] = LOW
        labels[0, :] = HIGH
        labels[:, 0] = HIGH
    domain = GridDomain(active, labels, h, h, mode=QUAD, name=f"L-shape{' swapped' if swap else ''}")
    return _fixture(domain, l_shape, cells, swap=swap)


def truncated_strip(h: float, a: float = 1.0, cells: int = 512, margin_factor: float = 10.0,
                    min_rows: int = 16) -> GridDomain:
    """
    Strip 0 < y < h over x in [-m, a + m], m = margin_factor*h, as a
    quadrilateral with sides I = [0, a] (bottom) and the whole top line.
    """
    m = margin_factor * h
    width = a + 2 * m
    nx = cells
    hx = width / nx
    ny = max(min_rows, round(h / hx))
    hy = h / ny
    labels = np.zeros((ny + 1, nx + 1), dtype=np.int8)
    xs = -m + np.arange(nx + 1) * hx
    labels[0, (xs >= -0.5 * hx) & (xs <= a + 0.5 * hx)] = LOW
    labels[-1, :] = HIGH
    domain = GridDomain(np.ones((ny, nx), dtype=bool), labels, hx, hy, mode=QUAD, origin=complex(-m, 0),
                        name=f"strip h={h:g} a={a:g} margin={margin_factor:g}h")
    return _fixture(domain, truncated_strip, cells, h=h, a=a, margin_factor=margin_factor, min_rows=min_rows)


def strip_modulus(h: float, a: float = 1.0, cells: int = 512, margin_factor: float = 10.0,
                  rtol: float = 1e-10, maxiter: int = 20000) -> Modulus:
    """Strip modulus with the truncation error of a doubled-width control run folded into the error bar."""
    base = quad_modulus(truncated_strip(h, a, cells, margin_factor), rtol, maxiter)
    control = _modulus_once(truncated_strip(h, a, 2 * cells, 2 * margin_factor), rtol, maxiter)
    truncation = abs(base.value - control)
    return Modulus(base.value, base.error + truncation,
                   note=f"strip h/a={h / a:g}; truncation {truncation:.2g}")


def archipelago(centers: Sequence[complex], radius: float, container: float = 1.0, cells: int = 512) -> GridDomain:
    """Round container |z| < container with round islands removed (condenser)."""
    return polygon_annulus(circle(container), [circle(radius, c) for c in centers], cells,
                           name=f"archipelago {len(centers)} islands r={radius:g}", mode=CONDENSER)


def densify(poly: np.ndarray, per_edge: int = 64) -> np.ndarray:
    """Closed polyline with every edge split into `per_edge` equal pieces."""
    poly = np.asarray(poly, dtype=complex)
    if poly[0] != poly[-1]:
        poly = np.append(poly, poly[:1])
    t = np.arange(per_edge) / per_edge
    pieces = [a + (b - a) * t for a, b in zip(poly[:-1], poly[1:])]
    out = np.concatenate(pieces)
    return np.append(out, out[:1])


def root_pullback(poly: np.ndarray, n: int) -> np.ndarray:
    """
    The closed curve {z : z^n on poly} for a polyline winding once around 0,
    traced through all n branches of the n-th root with a continuous argument.
    """
    if n < 1:
        raise ArgumentError(f"degree must be >= 1, got {n}")
    poly = np.asarray(poly, dtype=complex)
    if poly[0] != poly[-1]:
        poly = np.append(poly, poly[:1])
    if np.any(poly == 0):
        raise ArgumentError("curve passes through the critical value 0")
    phi = np.unwrap(np.angle(poly))
    turns = (phi[-1] - phi[0]) / (2 * math.pi)
    if abs(abs(turns) - 1) > 1e-6:
        raise ArgumentError(f"curve must wind once around 0, winds {turns:.3g} times")
    sign = 1 if turns > 0 else -1
    radius = np.abs(poly[:-1]) ** (1.0 / n)
    branches = [radius * np.exp(1j * (phi[:-1] + 2 * math.pi * sign * m) / n) for m in range(n)]
    out = np.concatenate(branches)
    return np.append(out, out[:1])


def power_preimage(outer: np.ndarray, inner: np.ndarray, n: int, cells: int = 512,
                   per_edge: int = 64) -> GridDomain:
    """Preimage under z^n of the annulus between two polylines around 0, rasterized."""
    domain = polygon_annulus(root_pullback(densify(outer, per_edge), n),
                             [root_pullback(densify(inner, per_edge), n)], cells, name=f"z^{n} preimage")
    return _fixture(domain, power_preimage, cells, outer=outer, inner=inner, n=n, per_edge=per_edge)


def covering_pair(n: int, cells: int = 512, inner_half: float = 0.5, ratio: float = 8.0,
                  rtol: float = 1e-10, maxiter: int = 20000) -> Tuple[Modulus, Modulus]:
    """
    (mod of a square frame, mod of its preimage under z^n). The frame is
    grid-aligned; the preimage has curved boundaries.
    """
    image = annulus_modulus(square_frame(inner_half, ratio, cells), rtol, maxiter)
    pre = annulus_modulus(power_preimage(square(ratio * inner_half), square(inner_half), n, cells), rtol, maxiter)
    return image, pre


def round_modulus(r: float, R: float) -> float:
    return math.log(R / r) / (2 * math.pi)


def eccentric_modulus(R: float, r: float, d: float) -> float:
    """Modulus between |z| < R and a disk of radius r centered at distance d inside it."""
    if not (0 < r and d >= 0 and d + r < R):
        raise ArgumentError(f"disk of radius {r} at distance {d} is not inside radius {R}")
    return math.acosh((R * R + r * r - d * d) / (2 * R * r)) / (2 * math.pi)
