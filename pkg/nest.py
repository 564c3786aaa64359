"""
Escape route, decoration, the modified principal nest and return statistics.

Everything here is driven by a piece oracle: any object with
    q, scale                       rotation denominator and f-steps per renormalized step
    same(i, j, d)                  f^i(0), f^j(0) in the same depth-d piece
    describe(i, d)                 label of the depth-d piece around f^i(0)
    renormalize(period)            oracle of the next renormalization level
Both the geometric `puzzle.Puzzle` and the sign-only `real_line.RealLineOracle`
qualify, so the two pipelines can be compared level by level.

Depths are always counted in f-steps.
"""

from dataclasses import asdict, dataclass, field
from typing import List, Optional, Tuple

import pandas as pd

from config import RunConfig
from errors import OnBoundaryError, PreconditionError

FIRST = 'first'
FINE = 'fine'

STATUS_RENORMALIZABLE = 'renormalizable'
STATUS_ESCAPING = 'escaping'
STATUS_EXHAUSTED = 'budget-exhausted'
STATUS_SATELLITE = 'satellite'


# =====================
# DATA STRUCTURES
# =====================

@dataclass
class Decoration:
    """(q, n, kappa) of the escape route; satellite when 0 never leaves Y^1."""

    q: int
    n: Optional[int] = None
    kappa: List[str] = field(default_factory=list)
    satellite_flag: bool = False
    budget: int = 0
    scale: int = 1

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class NestLevel:
    """One level E^k of the principal nest."""

    index: int
    depth: int
    return_time: Optional[int]
    kind: str
    escape_index: Optional[int] = None
    critical_passes: int = 0
    degree: int = 2
    telescope_bound: int = 2

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class PrincipalNest:
    decoration: Decoration
    levels: List[NestLevel] = field(default_factory=list)
    chi: Optional[int] = None
    period: Optional[int] = None
    renorm_status: str = STATUS_EXHAUSTED
    renorm_checked: int = 0
    degree_flags: List[str] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    @property
    def depths(self) -> List[int]:
        return [lv.depth for lv in self.levels]

    @property
    def return_times(self) -> List[Optional[int]]:
        return [lv.return_time for lv in self.levels]

    @property
    def child_kinds(self) -> List[str]:
        return [lv.kind for lv in self.levels]

    @property
    def renormalizable(self) -> bool:
        return self.renorm_status == STATUS_RENORMALIZABLE

    @property
    def relative_period(self) -> Optional[int]:
        if self.period is None:
            return None
        return self.period // self.decoration.scale

    def to_dict(self) -> dict:
        return {
            'decoration': self.decoration.to_dict(),
            'depths': self.depths,
            'return_times': self.return_times,
            'child_kinds': self.child_kinds,
            'levels': [lv.to_dict() for lv in self.levels],
            'chi': self.chi,
            'period': self.period,
            'relative_period': self.relative_period,
            'renorm_status': self.renorm_status,
            'renorm_checked': self.renorm_checked,
            'degree_flags': list(self.degree_flags),
            'notes': list(self.notes),
        }


@dataclass
class ReturnRecord:
    """Entry times of the critical orbit into R = Y^0 minus Y^1 and into L = outside Y^0."""

    horizon: int
    times_r: List[int] = field(default_factory=list)
    times_l: List[int] = field(default_factory=list)
    threshold: int = 0
    gaps: List[int] = field(default_factory=list)

    @property
    def max_gap(self) -> int:
        return max(self.gaps) if self.gaps else 0

    @property
    def gap_flag(self) -> bool:
        return any(g > self.threshold for g in self.gaps)

    def to_dict(self) -> dict:
        return {
            'horizon': self.horizon,
            'times_r': self.times_r,
            'times_l': self.times_l,
            'threshold': self.threshold,
            'max_gap': self.max_gap,
            'gap_flag': self.gap_flag,
        }


# =====================
# ESCAPE ROUTE
# =====================

def escape_route(oracle, config: Optional[RunConfig] = None, verbose: bool = False) -> Decoration:
    """
    First m with f^(qm)(0) outside the critical depth-1 piece; kappa_m
    labels the pieces Z^(q(n-m)+1) visited on the way.
    """
    config = config or RunConfig()
    q, s = oracle.q, oracle.scale
    budget = config.satellite_budget
    for m in range(1, budget + 1):
        if not oracle.same(s * q * m, 0, s):
            kappa = [oracle.describe(s * q * k, s * (q * (m - k) + 1)) for k in range(1, m + 1)]
            if verbose:
                print(f"✓ Escape route: q={q}, n={m}, kappa={kappa}")
            return Decoration(q=q, n=m, kappa=kappa, budget=budget, scale=s)
    if verbose:
        print(f"✓ Satellite: critical orbit stays in Y^1 for {budget} q-steps")
    return Decoration(q=q, satellite_flag=True, budget=budget, scale=s)


# =====================
# CHILDREN
# =====================

def first_return(oracle, d: int, start: int, budget: int) -> Optional[int]:
    """Least t > start with f^t(0) in the critical depth-d piece."""
    for t in range(start + 1, start + budget + 1):
        if oracle.same(t, 0, d):
            return t
    return None


def critical_passes(oracle, s: int, d: int) -> int:
    """Number of j < s where f^j maps the critical depth-d piece into a critical piece."""
    return sum(1 for j in range(s) if oracle.same(j, 0, d - j))


def first_child(oracle, depth: int, config: Optional[RunConfig] = None) -> Tuple[Optional[int], Optional[int]]:
    """(depth of W, return time l) for V the critical depth-`depth` piece."""
    config = config or RunConfig()
    l = first_return(oracle, depth, 0, config.return_budget)
    if l is None:
        return None, None
    return depth + l, l


def fine_child(oracle, depth: int, l: int,
               config: Optional[RunConfig] = None) -> Tuple[Optional[int], Optional[int], Optional[int]]:
    """
    (depth of A, return time t, escape index k) for W of depth `depth` with return f^l.

    k is the least index with f^(kl)(0) outside W, t the first return after kl.
    """
    config = config or RunConfig()
    k = None
    for j in range(1, config.renorm_budget + 1):
        if not oracle.same(j * l, 0, depth):
            k = j
            break
    if k is None:
        return None, None, None
    t = first_return(oracle, depth, k * l, config.return_budget)
    if t is None:
        return None, None, k
    return depth + t, t, k


def renormalization_check(oracle, depth: int, l: int, budget: int) -> bool:
    """f^(lj)(0) stays in the critical depth-`depth` piece for j <= budget."""
    return all(oracle.same(l * j, 0, depth) for j in range(1, budget + 1))


# =====================
# PRINCIPAL NEST
# =====================

def _level(oracle, index: int, depth: int, l: Optional[int], kind: str, escape_index=None,
           bound: int = 32) -> Tuple[NestLevel, Optional[str]]:
    passes = critical_passes(oracle, l, depth) if l else 0
    degree = 2 ** passes
    level = NestLevel(index=index, depth=depth, return_time=l, kind=kind, escape_index=escape_index,
                      critical_passes=passes, degree=degree, telescope_bound=2 ** max(passes, 1))
    flag = None
    if l and degree != 2:
        flag = f"level {index}: degree of f^{l} on E^{index} is {degree}, expected 2"
    if degree > bound:
        flag = f"level {index}: degree {degree} exceeds bound {bound}"
    return level, flag


def build_nest(oracle, decoration: Optional[Decoration] = None, config: Optional[RunConfig] = None,
               verbose: bool = False) -> PrincipalNest:
    """
    E^0 = Y^(nq+1) (scaled), then first children at odd levels and fine
    children at even levels until the critical orbit stays in E^chi under
    g_chi for the verification budget.
    """
    config = config or RunConfig()
    decoration = decoration or escape_route(oracle, config, verbose)
    if decoration.satellite_flag:
        raise PreconditionError("satellite decoration: the principal nest starts after the satellite renormalization")
    nest = PrincipalNest(decoration=decoration)
    s = decoration.scale
    depth = s * (decoration.n * decoration.q + 1)
    nest.levels.append(NestLevel(index=0, depth=depth, return_time=None, kind='top', degree=1, telescope_bound=1))
    if verbose:
        print(f"  E^0 depth {depth}")

    l_prev = None
    try:
        for k in range(1, config.max_nest_levels + 1):
            if k % 2 == 1:
                new_depth, l = first_child(oracle, depth, config)
                escape_index = None
                kind = FIRST
            else:
                new_depth, l, escape_index = fine_child(oracle, depth, l_prev, config)
                kind = FINE
            if l is None:
                nest.renorm_status = STATUS_ESCAPING if kind == FIRST else STATUS_EXHAUSTED
                nest.notes.append(f"no return to E^{k - 1} within budget")
                break
            level, flag = _level(oracle, k, new_depth, l, kind, escape_index, config.degree_bound)
            nest.levels.append(level)
            if flag:
                nest.degree_flags.append(flag)
                if verbose:
                    print(f"[WARNING] {flag}")
            if verbose:
                print(f"  E^{k} ({kind} child): depth {new_depth}, return time {l}")
            depth, l_prev = new_depth, l
            if k % 2 == 1 and renormalization_check(oracle, depth, l, config.renorm_budget):
                nest.chi, nest.period = k, l
                nest.renorm_status = STATUS_RENORMALIZABLE
                nest.renorm_checked = config.renorm_budget
                break
        else:
            nest.notes.append(f"max_nest_levels={config.max_nest_levels} reached")
    except OnBoundaryError as e:
        nest.renorm_status = STATUS_EXHAUSTED
        nest.notes.append(f"on boundary: {e}")

    if verbose:
        if nest.renormalizable:
            print(f"✓ Renormalizable: chi={nest.chi}, p={nest.period} (checked {nest.renorm_checked} returns)")
        else:
            print(f"[WARNING] Nest ended with status {nest.renorm_status}")
    return nest


def return_record(oracle, nest: PrincipalNest, horizon: int, config: Optional[RunConfig] = None) -> ReturnRecord:
    """Entries of f^i(0), 1 <= i <= horizon, into R and L with gap statistics."""
    config = config or RunConfig()
    if not nest.renormalizable:
        raise PreconditionError(f"return record needs a renormalizable nest (status {nest.renorm_status})")
    s = nest.decoration.scale
    threshold = config.gap_multiplier * nest.decoration.q * nest.decoration.n
    record = ReturnRecord(horizon=horizon, threshold=threshold)
    for i in range(1, horizon + 1):
        if not oracle.same(i, 0, 0):
            record.times_l.append(i)
        elif not oracle.same(i, 0, s):
            record.times_r.append(i)
    times = record.times_r
    record.gaps = [b - a for a, b in zip(times, times[1:])]
    return record


# =====================
# RENORMALIZATION TOWER
# =====================

@dataclass
class TowerLevel:
    index: int
    scale: int
    decoration: Decoration
    nest: Optional[PrincipalNest]
    oracle: object = field(default=None, repr=False, compare=False)


def renormalize(oracle, nest: PrincipalNest):
    """Oracle for the next level: base portrait from the little alpha of period p."""
    if not nest.renormalizable:
        raise PreconditionError(f"cannot renormalize: nest status {nest.renorm_status}")
    return oracle.renormalize(nest.period)


def build_tower(oracle, levels: int, config: Optional[RunConfig] = None, verbose: bool = False) -> List[TowerLevel]:
    """Nests of successive renormalizations; stops early on a non-renormalizable level."""
    config = config or RunConfig()
    tower = []
    for index in range(levels):
        decoration = escape_route(oracle, config, verbose)
        if decoration.satellite_flag:
            tower.append(TowerLevel(index, oracle.scale, decoration, None, oracle))
            break
        nest = build_nest(oracle, decoration, config, verbose)
        tower.append(TowerLevel(index, oracle.scale, decoration, nest, oracle))
        if not nest.renormalizable or index == levels - 1:
            break
        oracle = renormalize(oracle, nest)
    return tower


# =====================
# TABLES AND COMPARISON
# =====================

def nest_table(nest: PrincipalNest) -> pd.DataFrame:
    rows = [{
        'Level': lv.index,
        'Depth': lv.depth,
        'Kind': lv.kind,
        'Return time': lv.return_time,
        'Escape index': lv.escape_index,
        'Critical passes': lv.critical_passes,
        'Degree': lv.degree,
    } for lv in nest.levels]
    return pd.DataFrame(rows)


COMPARED_FIELDS = ('q', 'n', 'satellite', 'depths', 'return_times', 'chi', 'period')


def nest_signature(decoration: Decoration, nest: Optional[PrincipalNest]) -> dict:
    """Fields compared across oracles; kappa labels are oracle-specific."""
    return {
        'q': decoration.q,
        'n': decoration.n,
        'satellite': decoration.satellite_flag,
        'depths': nest.depths if nest else [],
        'return_times': nest.return_times if nest else [],
        'chi': nest.chi if nest else None,
        'period': nest.period if nest else None,
    }


def compare_signatures(a: dict, b: dict) -> List[str]:
    return [f"{key}: {a[key]} != {b[key]}" for key in COMPARED_FIELDS if a[key] != b[key]]
