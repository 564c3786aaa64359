"""
Numerical dynamics of f(z) = z^2 + c.

Orbits, fixed points, the Green function, external rays, equipotentials and
landing detection. Rays are traced by the level-descent scheme: Green levels
G_j = top * 2^(-j/s) are visited in order and each sample is Newton-corrected
so that f^n(z) matches exp(2^n G_j + 2 pi i 2^n theta) with 2^n G_j beyond the
reference radius. Many rays share one level schedule and are traced together
as numpy arrays.

Traced samples are kept in a RayCache keyed by (c, angle, schedule hash); the
cache can be persisted as little-endian binary records plus a JSON index.
"""

import cmath
import hashlib
import json
import math
import os
import tempfile
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from angles import Angle, AngleCycle, alpha_cycle, rotation_numbers
from config import RunConfig
from errors import ArgumentError, PreconditionError

COMPLEX_DTYPES = {'double': np.complex128, 'extended': np.clongdouble}
TWO_PI = 2.0 * math.pi

STATUS_LANDED = 'landed'
STATUS_TRUNCATED = 'truncated'
STATUS_ESCAPED = 'escaped-precision'


# =====================
# THE MAP
# =====================

@dataclass(frozen=True)
class QuadraticMap:
    """f(z) = z^2 + c with its fixed points; beta = (1 + sqrt(1 - 4c)) / 2."""

    c: complex
    escape_radius: float = 0.0

    def __post_init__(self):
        c = complex(self.c)
        object.__setattr__(self, 'c', c)
        minimum = 2.0 + abs(c)
        if self.escape_radius == 0.0:
            object.__setattr__(self, 'escape_radius', max(minimum, 4.0))
        elif self.escape_radius < minimum:
            raise ArgumentError(f"escape radius {self.escape_radius} < 2 + |c| = {minimum}")

    @property
    def beta(self) -> complex:
        return (1 + cmath.sqrt(1 - 4 * self.c)) / 2

    @property
    def alpha(self) -> complex:
        return (1 - cmath.sqrt(1 - 4 * self.c)) / 2

    @property
    def alpha_prime(self) -> complex:
        return -self.alpha

    @property
    def alpha_multiplier(self) -> complex:
        return 2 * self.alpha

    @property
    def is_real(self) -> bool:
        return self.c.imag == 0.0

    def is_alpha_repelling(self, margin: float = 1e-3) -> bool:
        return abs(self.alpha_multiplier) > 1.0 + margin

    def __call__(self, z):
        return z * z + self.c

    def iterate(self, z, n: int):
        for _ in range(n):
            z = z * z + self.c
        return z

    def label(self) -> str:
        return f"c={self.c.real:+.12g}{self.c.imag:+.12g}i"


def critical_orbit(qmap: QuadraticMap, n: int) -> Tuple[List[complex], bool]:
    """
    [0, c, c^2 + c, ...] with n + 1 entries.

    Returns:
        (points, escaped): the list stops after the first point beyond the
        escape radius, in which case escaped is True.
    """
    if n < 0:
        raise ArgumentError(f"orbit length must be >= 0, got {n}")
    z = 0j
    points = [z]
    for _ in range(n):
        z = z * z + qmap.c
        points.append(z)
        if abs(z) > qmap.escape_radius:
            return points, True
    return points, False


def critical_orbit_array(qmap: QuadraticMap, n: int) -> np.ndarray:
    points, _ = critical_orbit(qmap, n)
    return np.array(points, dtype=complex)


class CriticalOrbit:
    """
    Lazily extended critical orbit x_j = f^j(0).

    When some x_P falls within `period_tol` of 0 the orbit is treated as
    superattracting of period P and indices are reduced mod P.
    """

    def __init__(self, qmap: QuadraticMap, horizon: int = 10000, period_tol: float = 1e-10):
        self.qmap = qmap
        self.period_tol = period_tol
        self.period: Optional[int] = None
        self._points = [0j]
        self.extend(horizon)

    def extend(self, n: int):
        z = self._points[-1]
        while len(self._points) <= n and self.period is None:
            z = z * z + self.qmap.c
            if abs(z) < self.period_tol:
                self.period = len(self._points)
                break
            if abs(z) > self.qmap.escape_radius:
                raise PreconditionError(f"critical orbit escapes at step {len(self._points)} ({self.qmap.label()})")
            self._points.append(z)

    def canonical(self, i: int) -> int:
        if i < 0:
            raise ArgumentError(f"orbit index must be >= 0, got {i}")
        if self.period is None and i >= len(self._points):
            self.extend(i)
        return i % self.period if self.period is not None else i

    def __getitem__(self, i: int) -> complex:
        return self._points[self.canonical(i)]


# =====================
# GREEN FUNCTION
# =====================

GREEN_BAILOUT = 1e8


def green(qmap: QuadraticMap, z: complex, budget: int = 10000, return_flag: bool = False):
    """
    Green function 2^-n log|f^n(z)|, iterated until |f^n(z)| > 1e8.

    Returns 0 when the orbit does not escape within `budget`; with
    return_flag=True returns (value, below_resolution).
    """
    z = complex(z)
    scale = 1.0
    for _ in range(budget + 1):
        r = abs(z)
        if r > GREEN_BAILOUT:
            value = math.log(r) * scale
            return (value, False) if return_flag else value
        z = z * z + qmap.c
        scale *= 0.5
    return (0.0, True) if return_flag else 0.0


def green_array(qmap: QuadraticMap, z: np.ndarray, budget: int = 10000) -> np.ndarray:
    """Vectorized Green function; non-escaping points get 0."""
    z = np.array(z, dtype=complex).copy()
    out = np.zeros(z.shape, dtype=float)
    alive = np.ones(z.shape, dtype=bool)
    scale = 1.0
    for _ in range(budget + 1):
        r = np.abs(z)
        done = alive & (r > GREEN_BAILOUT)
        out[done] = np.log(r[done]) * scale
        alive &= ~done
        if not alive.any():
            break
        z[alive] = z[alive] ** 2 + qmap.c
        scale *= 0.5
    return out


# =====================
# RAY SCHEDULE
# =====================

@dataclass(frozen=True)
class RaySchedule:
    """Green levels top * 2^(-j / substeps), j = 0, 1, ..."""

    top_level: float = 1.0
    substeps: int = 4
    reference_radius: float = 1e6
    newton_tol: float = 1e-12
    newton_max_iter: int = 40
    floor_level: float = 1e-60
    precision: str = 'double'

    @classmethod
    def from_config(cls, config: RunConfig, top_level: Optional[float] = None) -> 'RaySchedule':
        return cls(top_level=config.top_level if top_level is None else top_level,
                   substeps=config.ray_substeps,
                   reference_radius=config.reference_radius,
                   newton_tol=config.newton_tol,
                   newton_max_iter=config.newton_max_iter,
                   floor_level=config.ray_floor_level,
                   precision=config.precision)

    @property
    def dtype(self):
        return COMPLEX_DTYPES[self.precision]

    @property
    def hash(self) -> str:
        text = repr((self.top_level, self.substeps, self.reference_radius,
                     self.newton_tol, self.newton_max_iter, self.precision))
        return hashlib.sha1(text.encode()).hexdigest()[:12]

    def level(self, j) -> np.ndarray:
        return self.top_level * np.power(2.0, -np.asarray(j, dtype=float) / self.substeps)

    def index_for_level(self, level: float) -> int:
        """Smallest j with level(j) <= level (dyadic levels are hit exactly)."""
        if level <= 0:
            raise ArgumentError(f"target level must be > 0, got {level}")
        level = max(level, self.floor_level)
        x = self.substeps * math.log2(self.top_level / level)
        j = round(x)
        if abs(x - j) > 1e-9:
            j = math.ceil(x)
        return max(j, 0)

    def index_for_depth(self, depth: int) -> int:
        return depth * self.substeps

    @property
    def floor_index(self) -> int:
        return self.index_for_level(self.floor_level)

    def pushes(self, level: float) -> int:
        """Smallest n with 2^n level >= log(reference radius)."""
        target = math.log(self.reference_radius)
        if level >= target:
            return 0
        return math.ceil(math.log2(target / level))


# =====================
# RAY TRACES
# =====================

@dataclass
class RayTrace:
    """Samples of one external ray, ordered by decreasing Green level."""

    angle: Angle
    points: np.ndarray
    levels: np.ndarray
    landing: Optional[complex] = None
    status: str = STATUS_TRUNCATED
    tail: float = math.inf

    @property
    def deepest(self) -> complex:
        return complex(self.points[-1])

    def to_dict(self) -> dict:
        return {
            'angle': str(self.angle),
            'status': self.status,
            'landing': None if self.landing is None else [self.landing.real, self.landing.imag],
            'levels': [float(x) for x in self.levels],
            'points': [[float(z.real), float(z.imag)] for z in self.points],
        }


def _aitken(points: np.ndarray) -> Tuple[Optional[complex], float]:
    """Geometric-tail landing estimate from the last three samples."""
    if len(points) < 3:
        return None, math.inf
    z0, z1, z2 = (complex(p) for p in points[-3:])
    d1, d2 = z1 - z0, z2 - z1
    if d1 == 0:
        return z2, 0.0 if d2 == 0 else math.inf
    r = d2 / d1
    if abs(r) >= 1:
        return None, math.inf
    correction = d2 * r / (1 - r)
    return z2 + correction, abs(correction)


def _make_trace(angle: Angle, points: np.ndarray, schedule: RaySchedule,
                escaped: bool, landing_tol: float) -> RayTrace:
    levels = schedule.level(np.arange(len(points)))
    landing, tail = _aitken(points)
    if escaped:
        status = STATUS_ESCAPED
    elif landing is not None and tail <= landing_tol:
        status = STATUS_LANDED
    else:
        status = STATUS_TRUNCATED
    return RayTrace(angle=angle, points=points, levels=levels, landing=landing, status=status, tail=tail)


# =====================
# RAY CACHE
# =====================

@dataclass
class CachedRay:
    points: np.ndarray
    status: str  # open | landed | escaped-precision


class RayCache:
    """
    Shared store of traced ray samples.

    Records are keyed by (c, angle, schedule hash). Reads may happen from
    several threads; writes take the lock. With a directory the cache is
    persisted as `<key>.bin` (little-endian complex samples) plus `index.json`.
    """

    INDEX_NAME = 'index.json'

    def __init__(self, directory=None):
        self._lock = threading.RLock()
        self._rays: Dict[str, CachedRay] = {}
        self._index: Dict[str, dict] = {}
        self._dirty = set()
        self.directory = Path(directory) if directory else None
        if self.directory is not None:
            self.directory.mkdir(parents=True, exist_ok=True)
            index_path = self.directory / self.INDEX_NAME
            if index_path.exists():
                with open(index_path, 'r') as f:
                    self._index = json.load(f)

    @staticmethod
    def key(c: complex, angle: Angle, schedule: RaySchedule) -> str:
        text = f"{complex(c).real!r},{complex(c).imag!r}|{angle}|{schedule.hash}"
        return hashlib.sha1(text.encode()).hexdigest()[:20]

    def __len__(self) -> int:
        with self._lock:
            return len(set(self._rays) | set(self._index))

    def get(self, c: complex, angle: Angle, schedule: RaySchedule) -> Optional[CachedRay]:
        key = self.key(c, angle, schedule)
        with self._lock:
            ray = self._rays.get(key)
            if ray is None and key in self._index:
                ray = self._read_record(key)
                self._rays[key] = ray
            return ray

    def put(self, c: complex, angle: Angle, schedule: RaySchedule, points: np.ndarray, status: str):
        key = self.key(c, angle, schedule)
        with self._lock:
            self._rays[key] = CachedRay(points=np.array(points), status=status)
            self._index[key] = {
                'c': [complex(c).real, complex(c).imag],
                'angle': str(angle),
                'schedule': schedule.hash,
                'dtype': np.dtype(points.dtype).newbyteorder('<').str,
                'count': int(len(points)),
                'status': status,
            }
            self._dirty.add(key)

    def _read_record(self, key: str) -> CachedRay:
        meta = self._index[key]
        points = np.fromfile(self.directory / f"{key}.bin", dtype=np.dtype(meta['dtype']))
        return CachedRay(points=points.astype(points.dtype.newbyteorder('=')), status=meta['status'])

    def save(self) -> int:
        """Write dirty records and the index; returns the number of records written."""
        if self.directory is None:
            return 0
        with self._lock:
            written = 0
            for key in sorted(self._dirty):
                ray = self._rays[key]
                data = ray.points.astype(np.dtype(ray.points.dtype).newbyteorder('<'))
                _atomic_write_bytes(self.directory / f"{key}.bin", data.tobytes())
                written += 1
            payload = json.dumps(self._index, indent=2, sort_keys=True)
            _atomic_write_bytes(self.directory / self.INDEX_NAME, payload.encode())
            self._dirty.clear()
            return written


def _atomic_write_bytes(path: Path, data: bytes):
    fd, tmp = tempfile.mkstemp(dir=str(path.parent), prefix='.tmp-')
    try:
        with os.fdopen(fd, 'wb') as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise


_SHARED_CACHES: Dict[str, RayCache] = {}
_SHARED_LOCK = threading.Lock()


def shared_cache(config: Optional[RunConfig] = None) -> RayCache:
    """Process-wide cache for the configured directory (in-memory if none)."""
    directory = config.resolved_cache_dir() if config is not None else None
    name = str(directory) if directory else ''
    with _SHARED_LOCK:
        if name not in _SHARED_CACHES:
            _SHARED_CACHES[name] = RayCache(directory)
        return _SHARED_CACHES[name]


# =====================
# RAY TRACING
# =====================

def _angle_table(angles: Sequence[Angle], n_max: int, dtype) -> np.ndarray:
    """table[i, n] = 2^n theta_i mod 1, computed exactly then rounded."""
    real = np.longdouble if dtype == np.clongdouble else np.float64
    table = np.empty((len(angles), n_max + 1), dtype=real)
    for i, a in enumerate(angles):
        num, den = a.numerator, a.denominator
        for n in range(n_max + 1):
            table[i, n] = real(num % den) / real(den)
            num = (num << 1) % den
    return table


def _newton(c, z: np.ndarray, level: float, n: int, turns: np.ndarray, schedule: RaySchedule):
    """Solve log f^n(z) = 2^n level + 2 pi i turns for every ray; returns (z, ok)."""
    dtype = schedule.dtype
    target = (2.0 ** n) * level
    ok = np.zeros(len(z), dtype=bool)
    active = np.ones(len(z), dtype=bool)
    z = z.copy()
    with np.errstate(all='ignore'):
        for _ in range(schedule.newton_max_iter):
            idx = np.nonzero(active)[0]
            if len(idx) == 0:
                break
            zz = z[idx]
            w = zz.copy()
            dw = np.ones_like(zz)
            for _ in range(n):
                dw = 2 * w * dw
                w = w * w + c
            d = np.log(w) - target
            phase = d.imag - TWO_PI * turns[idx]
            phase = np.mod(phase + math.pi, TWO_PI) - math.pi
            d = d.real + 1j * phase
            step = (d * w / dw).astype(dtype)
            zz = zz - step
            finite = np.isfinite(zz)
            z[idx] = np.where(finite, zz, z[idx])
            converged = finite & (np.abs(step) <= schedule.newton_tol * (1 + np.abs(zz)))
            ok[idx[converged]] = True
            active[idx[converged | ~finite]] = False
    return z, ok


def _warm_start(qmap: QuadraticMap, angles: Sequence[Angle], schedule: RaySchedule) -> Tuple[np.ndarray, np.ndarray]:
    """
    Points at the top level. The Boettcher point exp(2^n level + 2 pi i 2^n theta)
    lies beyond the reference radius, where phi(z) ~ z; it is pulled back
    through n square roots, each branch picked by the known angle 2^k theta,
    then polished by Newton.
    """
    dtype = schedule.dtype
    level = schedule.top_level
    n = schedule.pushes(level)
    table = _angle_table(angles, n, dtype)
    c = dtype(qmap.c)
    with np.errstate(all='ignore'):
        w = (np.exp((2.0 ** n) * level) * np.exp(1j * TWO_PI * table[:, n])).astype(dtype)
        for k in range(n - 1, -1, -1):
            s = np.sqrt(w - c)
            ref = np.exp(1j * TWO_PI * table[:, k])
            w = np.where((s * np.conj(ref)).real >= 0, s, -s).astype(dtype)
    return _newton(c, w, level, n, table[:, n], schedule)


def trace_rays(qmap: QuadraticMap, angles: Sequence[Angle], target_level: float,
               config: Optional[RunConfig] = None, cache: Optional[RayCache] = None,
               schedule: Optional[RaySchedule] = None, stop_when_landed: bool = True) -> List[RayTrace]:
    """
    Trace many external rays down to `target_level` on one shared schedule.

    Rays already in the cache are extended from their deepest sample. A ray
    stops early once its geometric tail estimate falls below a tenth of the
    landing tolerance.
    """
    config = config or RunConfig()
    schedule = schedule or RaySchedule.from_config(config)
    cache = cache if cache is not None else shared_cache(config)
    if target_level <= 0:
        raise ArgumentError(f"target level must be > 0, got {target_level}")
    angles = list(angles)
    j_end = min(schedule.index_for_level(target_level), schedule.floor_index)
    stop_tail = 0.1 * config.landing_tol
    dtype = schedule.dtype

    unique = list(dict.fromkeys(angles))
    buffers: Dict[Angle, list] = {}
    finished: Dict[Angle, str] = {}
    fresh = []
    for a in unique:
        cached = cache.get(qmap.c, a, schedule)
        if cached is None:
            fresh.append(a)
            continue
        buffers[a] = list(cached.points.astype(dtype))
        if cached.status != 'open':
            finished[a] = cached.status

    if fresh:
        z0, ok = _warm_start(qmap, fresh, schedule)
        for a, z, good in zip(fresh, z0, ok):
            buffers[a] = [z]
            if not good:
                finished[a] = STATUS_ESCAPED

    work = [a for a in unique if a not in finished and len(buffers[a]) <= j_end]
    if work:
        _descend(qmap, work, buffers, finished, j_end, schedule, stop_tail if stop_when_landed else -1.0)

    for a in unique:
        status = finished.get(a, 'open')
        cached = cache.get(qmap.c, a, schedule)
        if cached is None or len(cached.points) < len(buffers[a]) or cached.status != status:
            cache.put(qmap.c, a, schedule, np.array(buffers[a], dtype=dtype), status)

    traces = {}
    for a in unique:
        points = np.array(buffers[a][:j_end + 1], dtype=dtype)
        escaped = finished.get(a) == STATUS_ESCAPED and len(buffers[a]) <= j_end + 1
        traces[a] = _make_trace(a, points, schedule, escaped, config.landing_tol)
    return [traces[a] for a in angles]


def _descend(qmap: QuadraticMap, work: List[Angle], buffers: Dict[Angle, list], finished: Dict[Angle, str],
             j_end: int, schedule: RaySchedule, stop_tail: float):
    dtype = schedule.dtype
    c = dtype(qmap.c)
    n_max = schedule.pushes(float(schedule.level(j_end)))
    table = _angle_table(work, n_max, dtype)
    lengths = np.array([len(buffers[a]) for a in work])
    z = np.array([buffers[a][-1] for a in work], dtype=dtype)
    alive = np.ones(len(work), dtype=bool)
    for j in range(int(lengths.min()), j_end + 1):
        idx = np.nonzero(alive & (lengths == j))[0]
        if len(idx) == 0:
            if not (alive & (lengths > j)).any() and not (alive & (lengths < j)).any():
                break
            continue
        level = float(schedule.level(j))
        n = schedule.pushes(level)
        z_new, ok = _newton(c, z[idx], level, n, table[idx, n], schedule)
        for k, i in enumerate(idx):
            a = work[i]
            if not ok[k]:
                finished[a] = STATUS_ESCAPED
                alive[i] = False
                continue
            buffers[a].append(z_new[k])
            z[i] = z_new[k]
            lengths[i] += 1
            if stop_tail > 0 and len(buffers[a]) >= 3:
                _, tail = _aitken(np.array(buffers[a][-3:]))
                if tail <= stop_tail:
                    finished[a] = STATUS_LANDED
                    alive[i] = False


def trace_ray(qmap: QuadraticMap, angle: Angle, target_level: float,
              config: Optional[RunConfig] = None, cache: Optional[RayCache] = None,
              schedule: Optional[RaySchedule] = None) -> RayTrace:
    """Samples of the external ray of `angle` from the top level down to `target_level`."""
    return trace_rays(qmap, [angle], target_level, config=config, cache=cache, schedule=schedule)[0]


def ray_points_at(qmap: QuadraticMap, angles: Sequence[Angle], index: int, schedule: RaySchedule,
                  config: Optional[RunConfig] = None, cache: Optional[RayCache] = None) -> np.ndarray:
    """Sample `index` of each ray (a point of the equipotential of level G_index)."""
    level = float(schedule.level(index))
    traces = trace_rays(qmap, angles, level, config=config, cache=cache, schedule=schedule,
                        stop_when_landed=False)
    out = np.empty(len(angles), dtype=complex)
    for i, t in enumerate(traces):
        out[i] = t.points[min(index, len(t.points) - 1)]
    return out


# =====================
# LANDING
# =====================

def refine_landing(qmap: QuadraticMap, z0: complex, period: int, target: Optional[complex] = None,
                   tol: float = 1e-14, max_iter: int = 60) -> Optional[complex]:
    """Newton on f^period(z) = z (or = target) from z0; None if it diverges."""
    z = complex(z0)
    for _ in range(max_iter):
        w, dw = z, 1 + 0j
        for _ in range(period):
            dw = 2 * w * dw
            w = w * w + qmap.c
        if target is None:
            f, df = w - z, dw - 1
        else:
            f, df = w - target, dw
        if df == 0 or not cmath.isfinite(f):
            return None
        step = f / df
        z -= step
        if abs(step) <= tol * (1 + abs(z)):
            return z
    return None


def lands_at(qmap: QuadraticMap, trace: RayTrace, point: complex, tol: float, samples: int = 5,
             period: Optional[int] = None) -> bool:
    """
    Whether a traced ray lands at `point`.

    The deepest `samples` points must approach `point` monotonically, and the
    landing estimate (Newton-refined when the ray is periodic) must lie within
    `tol` of it.
    """
    if trace.status == STATUS_ESCAPED or len(trace.points) < samples:
        return False
    deepest = np.abs(np.asarray(trace.points[-samples:], dtype=complex) - point)
    if np.any(np.diff(deepest) >= 0):
        return False
    landing = trace.landing if trace.status == STATUS_LANDED else None
    if period is not None:
        refined = refine_landing(qmap, trace.deepest, period)
        if refined is not None:
            landing = refined
    if landing is None:
        return False
    return abs(landing - point) <= tol


@dataclass
class RotationResult:
    """Outcome of rotation-number detection at alpha."""

    status: str  # determined | undetermined
    p: Optional[int] = None
    q: Optional[int] = None
    cycle: Optional[AngleCycle] = None
    reason: str = ''
    tried: List[Tuple[int, int]] = field(default_factory=list)

    @property
    def determined(self) -> bool:
        return self.status == 'determined'


def detect_rotation_number(qmap: QuadraticMap, q_max: Optional[int] = None,
                           config: Optional[RunConfig] = None, cache: Optional[RayCache] = None,
                           verbose: bool = False) -> RotationResult:
    """Find the p/q whose alpha-cycle rays land at alpha; 'undetermined' if none does."""
    config = config or RunConfig()
    q_max = q_max or config.q_max
    if q_max < 2:
        raise ArgumentError(f"q_max must be >= 2, got {q_max}")
    if not qmap.is_alpha_repelling(config.repelling_margin):
        return RotationResult('undetermined',
                              reason=f"alpha not repelling (|2 alpha| = {abs(qmap.alpha_multiplier):.6g})")
    _, escaped = critical_orbit(qmap, config.green_budget)
    if escaped:
        return RotationResult('undetermined', reason="critical orbit escapes (disconnected Julia set)")

    candidates = [(p, q, alpha_cycle(p, q)) for p, q in rotation_numbers(q_max)]
    angles = list(dict.fromkeys(a for _, _, cyc in candidates for a in cyc))
    traces = dict(zip(angles, trace_rays(qmap, angles, config.ray_floor_level, config=config, cache=cache)))
    hits = []
    for p, q, cyc in candidates:
        if all(lands_at(qmap, traces[a], qmap.alpha, config.landing_tol,
                        config.landing_samples, period=q) for a in cyc):
            hits.append((p, q, cyc))
    tried = [(p, q) for p, q, _ in candidates]
    if len(hits) == 1:
        p, q, cyc = hits[0]
        if verbose:
            print(f"✓ Rotation number at alpha: {p}/{q}, rays {cyc}")
        return RotationResult('determined', p=p, q=q, cycle=cyc, tried=tried)
    reason = "no candidate cycle lands at alpha" if not hits else f"{len(hits)} candidate cycles land at alpha"
    if verbose:
        print(f"[WARNING] rotation number undetermined: {reason}")
    return RotationResult('undetermined', reason=reason, tried=tried)


# =====================
# EQUIPOTENTIALS AND CHECKS
# =====================

@dataclass
class Equipotential:
    """Closed polyline of the level set G = level, parametrized by Boettcher angle."""

    level: float
    samples: np.ndarray


def equipotential(qmap: QuadraticMap, level: float, samples: int,
                  config: Optional[RunConfig] = None, cache: Optional[RayCache] = None) -> Equipotential:
    if level <= 0:
        raise ArgumentError(f"equipotential level must be > 0, got {level}")
    if samples < 16:
        raise ArgumentError(f"need at least 16 samples, got {samples}")
    config = config or RunConfig()
    schedule = RaySchedule.from_config(config, top_level=level)
    angles = [Angle.of(k, samples) for k in range(samples)]
    points = ray_points_at(qmap, angles, 0, schedule, config=config, cache=cache)
    closed = np.append(points, points[:1])
    return Equipotential(level=level, samples=closed)


def winding_number(polyline: np.ndarray, z: complex) -> float:
    """Winding number of a closed polyline about z."""
    poly = np.asarray(polyline, dtype=complex) - z
    if poly[0] != poly[-1]:
        poly = np.append(poly, poly[:1])
    with np.errstate(all='ignore'):
        turns = np.angle(poly[1:] / poly[:-1])
    return float(np.sum(turns) / TWO_PI)


def pushforward_error(qmap: QuadraticMap, trace: RayTrace, image: RayTrace, substeps: int) -> float:
    """
    Largest distance between f(sample at level g) and the image ray's sample at 2g.

    Sample j of a ray sits at level top * 2^(-j/s), so its image is sample j - s
    of the doubled ray.
    """
    errors = []
    for j in range(substeps, len(trace.points)):
        k = j - substeps
        if k >= len(image.points):
            break
        errors.append(abs(qmap(complex(trace.points[j])) - complex(image.points[k])))
    return max(errors) if errors else 0.0


def chord_side(qmap: QuadraticMap, z: complex, tol: float = 1e-9) -> int:
    """+1 below the chord alpha -> alpha', -1 above, 0 on it."""
    direction = qmap.alpha_prime - qmap.alpha
    if direction == 0:
        raise PreconditionError("alpha = alpha' (c = 0): chord undefined")
    side = ((z - qmap.alpha) / direction).imag
    if abs(side) <= tol:
        return 0
    return +1 if side < 0 else -1
