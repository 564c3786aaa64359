"""
The inequality ledger.

Geometric annulus moduli of puzzle pieces along the principal nest are
collected into a ModulusLedger and checked against the covering rules
(hard checks: they hold for geometric moduli) and the composite inequality
patterns (soft checks: reported, not claimed). Moduli here are geometric
stand-ins for the pseudo-moduli of the a priori bounds argument.

USAGE:
    builder = LedgerBuilder(QuadraticMap(-1.75487766625), config)
    report = builder.run_full_analysis()
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import pandas as pd

from config import TOOL_VERSION, RunConfig
from dynamics import QuadraticMap
from errors import ArgumentError, NumericError, OnBoundaryError, PreconditionError, YoccozError
from modulus import (FAIL, INCONCLUSIVE, PASS, InequalityVerdict, Modulus, annulus_modulus, archipelago,
                     check_cylinder_bound, check_degree_rule, check_groetzsch16, check_pi_bounds,
                     circle, compare_le, covering_pair, cylinder, l_shape, log_polar_annulus,
                     polygon_annulus, power_preimage, quad_modulus, series_law, square, square_frame,
                     stacked_rectangles, strip_modulus)
from nest import (PrincipalNest, build_nest, build_tower, compare_signatures, escape_route,
                  nest_signature)
from puzzle import Puzzle, PuzzlePiece, check_pullback_containment, separating_pieces

SCHEMA = 'yoccoz-report/1'
STAND_IN_NOTE = 'geometric annulus moduli (stand-ins for pseudo-moduli)'


# =====================
# LEDGER
# =====================

@dataclass
class LedgerEntry:
    name: str
    modulus: Optional[Modulus]
    level: Optional[int] = None
    outer: str = ''
    inner: str = ''
    note: str = ''

    def to_dict(self) -> dict:
        return {
            'name': self.name,
            'level': self.level,
            'outer': self.outer,
            'inner': self.inner,
            'value': None if self.modulus is None else self.modulus.value,
            'error': None if self.modulus is None else self.modulus.error,
            'note': self.note or (self.modulus.note if self.modulus else ''),
        }


@dataclass
class ModulusLedger:
    """Every computed modulus with the pieces and level that produced it."""

    entries: List[LedgerEntry] = field(default_factory=list)
    provenance: Dict[str, object] = field(default_factory=dict)

    def add(self, entry: LedgerEntry) -> LedgerEntry:
        self.entries.append(entry)
        return entry

    def find(self, name: str) -> Optional[LedgerEntry]:
        for e in self.entries:
            if e.name == name:
                return e
        return None

    def get(self, name: str) -> Optional[Modulus]:
        entry = self.find(name)
        return entry.modulus if entry else None

    def to_list(self) -> List[dict]:
        return [e.to_dict() for e in self.entries]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.to_list())


def provenance(config: RunConfig) -> dict:
    return {
        'grid': {'cells': config.grid_cells, 'refine': config.grid_refine, 'cg_rtol': config.cg_rtol,
                 'cg_maxiter': config.cg_maxiter},
        'tracing': {'ray_substeps': config.ray_substeps, 'newton_tol': config.newton_tol,
                    'landing_tol': config.landing_tol, 'precision': config.precision,
                    'top_level': config.top_level, 'arc_samples': config.arc_samples},
    }


def inconclusive(name: str, reason: str) -> InequalityVerdict:
    return InequalityVerdict(name, math.nan, math.nan, status=INCONCLUSIVE, slack=math.nan, note=reason)


# =====================
# PIECE ANNULI
# =====================

def piece_annulus(puzzle: Puzzle, name: str, outer, outer_level: int, inners: Sequence[Tuple[object, int]],
                  config: RunConfig, level: Optional[int] = None) -> LedgerEntry:
    """Annulus (or condenser) modulus between an outer piece and inner pieces, never raising."""
    outer_label = outer.label or outer.describe()
    inner_label = '+'.join(p.label or p.describe() for p, _ in inners)
    try:
        outer_poly = puzzle.geometry(outer, outer_level)
        inner_polys = [puzzle.geometry(p, lv) for p, lv in inners]
        domain = polygon_annulus(outer_poly, inner_polys, cells=config.grid_cells, name=name)
        value = annulus_modulus(domain, config.cg_rtol, config.cg_maxiter, fine_resolution=config.grid_refine)
        return LedgerEntry(name, value, level, outer_label, inner_label)
    except (ArgumentError, NumericError, PreconditionError) as e:
        return LedgerEntry(name, None, level, outer_label, inner_label, note=f"not computed: {e}")


def nest_moduli(puzzle: Puzzle, nest: PrincipalNest, config: RunConfig, ledger: ModulusLedger,
                prefix: str = '') -> List[LedgerEntry]:
    """mod(E^(k-1) minus E^k) for every nest level; piece truncation level is depth - d_0."""
    d0 = nest.levels[0].depth
    out = []
    for k in range(1, len(nest.levels)):
        name = f"{prefix}mod(E^{k - 1}\\E^{k})"
        known = ledger.find(name)
        if known is not None:
            out.append(known)
            continue
        outer_d, inner_d = nest.levels[k - 1].depth, nest.levels[k].depth
        outer = puzzle.critical_piece(outer_d)
        inner = puzzle.critical_piece(inner_d)
        entry = piece_annulus(puzzle, name, outer, outer_d - d0, [(inner, inner_d - d0)], config, level=k)
        out.append(ledger.add(entry))
    return out


def top_moduli(puzzle: Puzzle, config: RunConfig, ledger: ModulusLedger) -> Tuple[LedgerEntry, LedgerEntry]:
    """mod(Y^0, R) and mod(Z^0, L) with R the Z^1 pieces and L the non-critical Y^1 pieces."""
    family = puzzle.family(1)
    y0 = next(p for p in puzzle.depth0_pieces() if p.label == 'Y^0')
    r_pieces = [(p, 1) for p in family.pieces if p.label.startswith('Z^1_')]
    l_pieces = [(p, 1) for p in family.pieces if p.label.startswith('Y^1_')]
    z0 = PuzzlePiece(1, 0, y0.negated().arcs, label='Z^0')
    entry_r = piece_annulus(puzzle, 'mod(Y^0,R)', y0, 0, r_pieces, config)
    entry_l = piece_annulus(puzzle, 'mod(Z^0,L)', z0, 0, l_pieces, config)
    return ledger.add(entry_r), ledger.add(entry_l)


# =====================
# CHECKS
# =====================

def check_transformation_chain(puzzle: Puzzle, nest: PrincipalNest, config: Optional[RunConfig] = None,
                               ledger: Optional[ModulusLedger] = None) -> List[InequalityVerdict]:
    """
    Hard: each g_k = f^(l_k): E^k -> E^(k-1) is a degree-2 covering of
    E^k minus A onto E^(k-1) minus B, so mod(E^(k-1)\\B) = 2 mod(E^k\\A).
    Soft: the factor-4 chain and the 2^(n+1) pattern on nest annuli, both
    scaled by the constant C (big_c).
    """
    config = config or RunConfig()
    ledger = ledger if ledger is not None else ModulusLedger(provenance=provenance(config))
    verdicts = []
    if len(nest.levels) < 2:
        return [inconclusive('transformation-chain', 'nest has no child levels')]
    d0 = nest.levels[0].depth
    for k in range(1, len(nest.levels)):
        lv = nest.levels[k]
        d_prev, d_k, l_k = nest.levels[k - 1].depth, lv.depth, lv.return_time
        name = f'covering-level-{k}'
        try:
            e_prev, e_k = puzzle.critical_piece(d_prev), puzzle.critical_piece(d_k)
            a_piece = puzzle.critical_piece(d_k + l_k)
            b_piece = puzzle.orbit_piece(l_k, d_k)
        except (YoccozError, ValueError) as e:
            verdicts.append(inconclusive(name, f"pieces unavailable: {e}"))
            continue
        image = ledger.add(piece_annulus(puzzle, f"mod(E^{k - 1}\\B_{k})", e_prev, d_prev - d0,
                                         [(b_piece, d_k - d0)], config, level=k))
        pre = ledger.add(piece_annulus(puzzle, f"mod(E^{k}\\A_{k})", e_k, d_k - d0,
                                       [(a_piece, d_k + l_k - d0)], config, level=k))
        if image.modulus is None or pre.modulus is None:
            verdicts.append(inconclusive(name, image.note or pre.note))
            continue
        verdict = check_degree_rule(image.modulus, pre.modulus, lv.degree, config.transform_tol)
        verdict.name = name
        if lv.degree != 2:
            verdict.note += f"; recorded degree {lv.degree}"
        verdicts.append(verdict)

    annuli = {e.level: e.modulus for e in nest_moduli(puzzle, nest, config, ledger)}
    for n in range(3, len(nest.levels), 2):
        a, b = annuli.get(n - 2), annuli.get(n)
        name = f'factor-4-chain-{n}'
        if a is None or b is None:
            verdicts.append(inconclusive(name, 'missing nest modulus'))
            continue
        factor = 4 * config.big_c
        verdicts.append(compare_le(name, a, Modulus(factor * b.value, factor * b.error),
                                   note=f'soft check, C={config.big_c:g}'))

    if puzzle.portrait.name == 'alpha' and nest.decoration.n:
        name = 'top-pattern'
        known = ledger.find('mod(Y^0,R)') or top_moduli(puzzle, config, ledger)[0]
        entry_r = known.modulus
        e01 = annuli.get(1)
        if entry_r is None or e01 is None:
            verdicts.append(inconclusive(name, 'missing mod(Y^0,R) or mod(E^0\\E^1)'))
        else:
            factor = config.big_c * 2 ** (nest.decoration.n + 1)
            verdicts.append(compare_le(name, entry_r, Modulus(factor * e01.value, factor * e01.error),
                                       note=f'soft check, factor C 2^{nest.decoration.n + 1}, C={config.big_c:g}'))
    return verdicts


def check_qal_form(container_modulus, island_moduli: Sequence, collar_moduli: Sequence, eta: float,
                   m: Optional[int] = None, delta0: float = 0.1) -> InequalityVerdict:
    """
    mod(U, union of islands) < 2 delta / (eta m), delta the largest mod(U, K_i),
    given collars with mod > eta * mod(U, K_i). Conditional on delta < delta0.
    """
    islands = [m_ if isinstance(m_, Modulus) else Modulus(float(m_)) for m_ in island_moduli]
    collars = [c if isinstance(c, Modulus) else Modulus(float(c)) for c in collar_moduli]
    m = m or len(islands)
    name = 'quasi-additivity'
    if not islands or len(collars) != len(islands):
        return inconclusive(name, 'need one collar modulus per island')
    delta = max(i.value for i in islands)
    delta_err = max(i.error for i in islands)
    for k, (island, collar) in enumerate(zip(islands, collars)):
        if collar.lower <= eta * island.upper:
            return inconclusive(name, f"collar hypothesis fails for island {k}: "
                                      f"{collar.value:.4g} <= eta * {island.value:.4g}")
    if delta >= delta0:
        return inconclusive(name, f"delta={delta:.4g} is not below delta0={delta0:g}")
    bound = Modulus(2 * delta / (eta * m), 2 * delta_err / (eta * m))
    return compare_le(name, container_modulus, bound, strict=True,
                      note=f"conditional on delta < delta0={delta0:g}; m={m}, eta={eta:g}")


def check_covering_form(mod_ua, mod_vb, mod_collar, eta: float, d: int,
                        epsilon: float = 0.05) -> InequalityVerdict:
    """mod(V, B) < 2 d^2 mod(U, A) / eta under the collar assumption, conditional on mod(U, A) < epsilon."""
    mod_ua = mod_ua if isinstance(mod_ua, Modulus) else Modulus(float(mod_ua))
    mod_collar = mod_collar if isinstance(mod_collar, Modulus) else Modulus(float(mod_collar))
    name = 'covering-lemma'
    if mod_collar.lower <= eta * mod_ua.upper:
        return inconclusive(name, f"collar assumption fails: {mod_collar.value:.4g} <= eta * {mod_ua.value:.4g}")
    if mod_ua.value >= epsilon:
        return inconclusive(name, f"mod(U,A)={mod_ua.value:.4g} is not below epsilon={epsilon:g}")
    factor = 2 * d * d / eta
    bound = Modulus(factor * mod_ua.value, factor * mod_ua.error)
    return compare_le(name, mod_vb, bound, strict=True,
                      note=f"conditional on mod(U,A) < epsilon={epsilon:g}; d={d}, eta={eta:g}")


def structural_checks(puzzle: Puzzle, nest: Optional[PrincipalNest], verbose: bool = False) -> List[InequalityVerdict]:
    """Compact containment of the f^(qn)-pullbacks of Z^0, and the separating pieces Q^v."""
    verdicts = []
    n = nest.decoration.n if nest is not None and nest.decoration.n else 1
    try:
        records = check_pullback_containment(puzzle, n)
        bad = [r.label for r in records if not (r.symbolic and r.geometric)]
        status = PASS if not bad else FAIL
        verdicts.append(InequalityVerdict('pullback-containment', len(bad), 0, status=status, slack=-len(bad),
                                          note=f"{len(records)} pullbacks; violations: {bad}"))
    except (OnBoundaryError, PreconditionError, NumericError) as e:
        verdicts.append(inconclusive('pullback-containment', str(e)))
    try:
        piece = puzzle.critical_piece((n - 1) * puzzle.q + 1)
        pieces = separating_pieces(puzzle, piece, n)
        expected = 2 ** n
        status = PASS if len(pieces) == expected else FAIL
        verdicts.append(InequalityVerdict('separating-pieces', len(pieces), expected, status=status,
                                          slack=len(pieces) - expected,
                                          note=', '.join(p.label for p in pieces)))
    except YoccozError as e:
        verdicts.append(inconclusive('separating-pieces', str(e)))
    if verbose:
        for v in verdicts:
            print(f"  {'✓' if v.passed else '⚠'} {v.name}: {v.status} ({v.note})")
    return verdicts


# =====================
# A PRIORI REPORT
# =====================

def apriori_report(qmap: QuadraticMap, levels: int, config: Optional[RunConfig] = None, cache=None,
                   verbose: bool = False) -> dict:
    """
    Per renormalization level, mod(E^(chi-1) minus E^chi) with its error bar,
    and whether the minimum over levels stays above the configured floor.
    """
    config = config or RunConfig()
    if levels < 0:
        raise ArgumentError(f"levels must be >= 0, got {levels}")
    puzzle = Puzzle.top(qmap, config=config, cache=cache, verbose=verbose)
    ledger = ModulusLedger(provenance=provenance(config))
    mod_r, _ = top_moduli(puzzle, config, ledger)
    mu = None if mod_r.modulus is None else min(mod_r.modulus.value, 0.5)
    report = {
        'levels_requested': levels,
        'mu': mu,
        'mu_note': 'min(mod(Y^0,R), 1/2)' if mu is not None else mod_r.note,
        'levels': [],
        'floor': config.apriori_floor,
        'floor_met': None,
        'truncated': False,
        'stand_in': STAND_IN_NOTE,
    }
    if levels == 0:
        return report
    tower = build_tower(puzzle, levels, config, verbose)
    values = []
    for tl in tower:
        row = {'index': tl.index, 'scale': tl.scale, 'chi': None, 'period': None, 'value': None, 'error': None,
               'status': 'satellite' if tl.decoration.satellite_flag else None}
        if tl.nest is not None:
            row.update(chi=tl.nest.chi, period=tl.nest.period, status=tl.nest.renorm_status)
            if tl.nest.renormalizable and tl.nest.chi:
                chi = tl.nest.chi
                d0 = tl.nest.levels[0].depth
                outer_d, inner_d = tl.nest.levels[chi - 1].depth, tl.nest.levels[chi].depth
                entry = piece_annulus(tl.oracle, f"L{tl.index}:mod(E^{chi - 1}\\E^{chi})",
                                      tl.oracle.critical_piece(outer_d), outer_d - d0,
                                      [(tl.oracle.critical_piece(inner_d), inner_d - d0)], config, level=tl.index)
                ledger.add(entry)
                if entry.modulus is not None:
                    row.update(value=entry.modulus.value, error=entry.modulus.error)
                    values.append(entry.modulus.value)
                else:
                    row['note'] = entry.note
        report['levels'].append(row)
        if verbose:
            print(f"  level {tl.index}: status={row['status']} value={row['value']}")
    report['truncated'] = len(values) < levels
    report['floor_met'] = bool(values) and min(values) > config.apriori_floor
    report['moduli'] = ledger.to_list()
    return report


# =====================
# SWEEPS AND FIXTURES
# =====================

def _pi_row(args) -> dict:
    ratio, a, cells, margin, rtol, maxiter = args
    h = ratio * a
    value = strip_modulus(h, a, cells, margin, rtol, maxiter)
    verdict = check_pi_bounds(h, a, value)
    return {'h/a': ratio, 'modulus': value.value, 'error': value.error, 'lower': h / (2 * a),
            'upper': h / a, 'status': verdict.status, 'verdict': verdict}


def pi_bounds_sweep(ratios: Sequence[float] = (0.05, 0.1, 0.2, 0.3, 0.4, 0.5), config: Optional[RunConfig] = None,
                    a: float = 1.0, cells: Optional[int] = None) -> Tuple[pd.DataFrame, List[InequalityVerdict]]:
    """Truncated-strip moduli against [h/2a, h/a]."""
    config = config or RunConfig()
    cells = cells or config.grid_cells
    jobs = [(r, a, cells, config.strip_margin, config.cg_rtol, config.cg_maxiter) for r in ratios]
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            rows = list(pool.map(_pi_row, jobs))
    else:
        rows = [_pi_row(j) for j in jobs]
    verdicts = [row.pop('verdict') for row in rows]
    for r, v in zip(ratios, verdicts):
        v.name = f'pi-bounds h/a={r:g}'
    return pd.DataFrame(rows), verdicts


def fixture_checks(config: Optional[RunConfig] = None, cells: Optional[int] = None,
                   verbose: bool = False) -> List[InequalityVerdict]:
    """Degree rule, cylinder bound, factor 16, quasi-additivity, covering form, series law, reciprocity."""
    config = config or RunConfig()
    cells = cells or config.grid_cells
    rtol, maxiter = config.cg_rtol, config.cg_maxiter
    verdicts = []

    pairs = {}
    for n in (2, 3, 4):
        image, pre = covering_pair(n, cells, rtol=rtol, maxiter=maxiter)
        pairs[n] = (image, pre)
        verdicts.append(check_degree_rule(image, pre, n, tol=0.02))

    h, a, l = 0.2, 1.0, 1.5
    strip = strip_modulus(h, a, cells, config.strip_margin, rtol, maxiter)
    cyl = annulus_modulus(cylinder(h, l, cells), rtol, maxiter)
    verdicts.append(check_cylinder_bound(strip, cyl))

    embedded, holomorphic = pairs[2]
    v = check_groetzsch16(holomorphic, embedded)
    v.note = f"z^2 preimage over a square frame; embedded/holomorphic = {embedded.value / holomorphic.value:.3g}"
    verdicts.append(v)

    centers, radius, eta = (-0.5 + 0j, 0.5 + 0j), 0.4, 0.25
    container = annulus_modulus(archipelago(centers, radius, 1.0, cells), rtol, maxiter)
    islands = [annulus_modulus(polygon_annulus(circle(1.0), [circle(radius, c)], cells, name=f"island {k}"),
                               rtol, maxiter)
               for k, c in enumerate(centers)]
    collars = [annulus_modulus(log_polar_annulus(radius, 0.5, cells), rtol, maxiter) for _ in centers]
    verdicts.append(check_qal_form(container, islands, collars, eta=eta, delta0=config.delta0))

    # z^2 over V = square(1.6) > B' = square(1.28) > B = square(1); A = f^-1(B), U = f^-1(V)
    mod_vb = annulus_modulus(square_frame(1.0, 1.6, cells), rtol, maxiter)
    mod_ua = annulus_modulus(power_preimage(square(1.6), square(1.0), 2, cells), rtol, maxiter)
    collar = annulus_modulus(square_frame(1.0, 1.28, cells), rtol, maxiter)
    verdicts.append(check_covering_form(mod_ua, mod_vb, collar, config.eta, 2, config.epsilon))

    heights = (0.3, 0.5)
    stacked = quad_modulus(stacked_rectangles(1.0, heights, cells), rtol, maxiter)
    predicted = series_law([hh / 1.0 for hh in heights])
    v = check_degree_rule(stacked, predicted, 1, tol=0.02)
    v.name = 'series-law'
    verdicts.append(v)

    lq = quad_modulus(l_shape(cells), rtol, maxiter)
    lq_swap = quad_modulus(l_shape(cells, swap=True), rtol, maxiter)
    product = Modulus(lq.value * lq_swap.value, lq.value * lq_swap.error + lq_swap.value * lq.error)
    v = check_degree_rule(product, 1.0, 1, tol=0.02)
    v.name = 'reciprocal-L-shape'
    verdicts.append(v)

    if verbose:
        for v in verdicts:
            print(f"  {'✓' if v.passed else '⚠'} {v.name}: {v.status} (lhs={v.lhs:.6g}, rhs={v.rhs:.6g})")
    return verdicts


def oracle_equivalence(c: float, config: Optional[RunConfig] = None, cache=None, levels: int = 1) -> List[str]:
    """Mismatches between the geometric and the sign-only pipelines on a real parameter."""
    from real_line import RealLineOracle
    config = config or RunConfig()
    mismatches = []
    geometric = build_tower(Puzzle.top(QuadraticMap(complex(c)), config=config, cache=cache), levels, config)
    signs = build_tower(RealLineOracle.top_level(c), levels, config)
    if len(geometric) != len(signs):
        mismatches.append(f"tower height {len(geometric)} != {len(signs)}")
    for g, s in zip(geometric, signs):
        for m in compare_signatures(nest_signature(g.decoration, g.nest), nest_signature(s.decoration, s.nest)):
            mismatches.append(f"level {g.index}: {m}")
    return mismatches


# =====================
# STAGED ANALYSIS
# =====================

class LedgerBuilder:
    """Runs the whole pipeline on one parameter and seals a report."""

    def __init__(self, qmap: QuadraticMap, config: Optional[RunConfig] = None, cache=None, levels: int = 0,
                 name: str = '', verbose: bool = True):
        self.qmap = qmap
        self.config = config or RunConfig()
        self.cache = cache
        self.levels = levels
        self.name = name or qmap.label()
        self.verbose = verbose
        self.puzzle: Optional[Puzzle] = None
        self.decoration = None
        self.nest: Optional[PrincipalNest] = None
        self.ledger = ModulusLedger(provenance=provenance(self.config))
        self.verdicts: List[InequalityVerdict] = []
        self.apriori: Optional[dict] = None
        self.notes: List[str] = []

    def _banner(self, title: str):
        if self.verbose:
            print("\n" + "=" * 80)
            print(title)
            print("=" * 80)

    def build_puzzle(self):
        self._banner("STEP 1: ROTATION NUMBER AND TOP PUZZLE")
        self.puzzle = Puzzle.top(self.qmap, config=self.config, cache=self.cache, verbose=self.verbose)
        if self.verbose:
            labels = [p.label for p in self.puzzle.depth0_pieces()]
            print(f"✓ Depth-0 pieces: {labels}")

    def build_nest(self):
        self._banner("STEP 2: ESCAPE ROUTE AND PRINCIPAL NEST")
        self.decoration = escape_route(self.puzzle, self.config, self.verbose)
        if self.decoration.satellite_flag:
            self.notes.append('satellite: no principal nest at this level')
            return
        self.nest = build_nest(self.puzzle, self.decoration, self.config, self.verbose)

    def compute_moduli(self):
        self._banner("STEP 3: GEOMETRIC MODULI")
        top_moduli(self.puzzle, self.config, self.ledger)
        if self.nest is not None:
            nest_moduli(self.puzzle, self.nest, self.config, self.ledger)
        if self.verbose:
            for e in self.ledger.entries:
                print(f"  {e.name}: {e.modulus if e.modulus is not None else e.note}")

    def check_chain(self):
        self._banner("STEP 4: TRANSFORMATION CHAIN")
        if self.nest is None:
            self.verdicts.append(inconclusive('transformation-chain', 'no principal nest'))
            return
        chain = check_transformation_chain(self.puzzle, self.nest, self.config, self.ledger)
        self.verdicts.extend(chain)
        if self.verbose:
            for v in chain:
                print(f"  {'✓' if v.passed else '⚠'} {v.name}: {v.status} {v.note}")

    def check_structure(self):
        self._banner("STEP 5: STRUCTURAL CHECKS")
        self.verdicts.extend(structural_checks(self.puzzle, self.nest, self.verbose))

    def run_apriori(self):
        if not self.levels:
            return
        self._banner("STEP 6: A PRIORI REPORT")
        self.apriori = apriori_report(self.qmap, self.levels, self.config, self.cache, self.verbose)
        if self.verbose:
            flag = '✓ floor met' if self.apriori['floor_met'] else '[WARNING] floor not met'
            print(flag)

    def report(self) -> dict:
        return {
            'schema': SCHEMA,
            'tool_version': TOOL_VERSION,
            'parameter': {'name': self.name, 'c_re': self.qmap.c.real, 'c_im': self.qmap.c.imag},
            'decoration': self.decoration.to_dict() if self.decoration else None,
            'nest': self.nest.to_dict() if self.nest else None,
            'moduli': self.ledger.to_list(),
            'verdicts': [v.to_dict() for v in self.verdicts],
            'apriori': self.apriori,
            'notes': list(self.notes),
            'config': self.config.to_dict(),
            'provenance': self.ledger.provenance,
        }

    def run_full_analysis(self) -> dict:
        self.build_puzzle()
        self.build_nest()
        self.compute_moduli()
        self.check_chain()
        self.check_structure()
        self.run_apriori()
        counts = {s: sum(1 for v in self.verdicts if v.status == s) for s in (PASS, FAIL, INCONCLUSIVE)}
        if self.verbose:
            print("\n" + "=" * 80)
            print("✓ ANALYSIS COMPLETE")
            print("=" * 80)
            print(f"  verdicts: {counts[PASS]} pass, {counts[FAIL]} fail, {counts[INCONCLUSIVE]} inconclusive")
        return self.report()
