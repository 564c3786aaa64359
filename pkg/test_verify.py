"""
Test script for the modulus ledger, the conditional inequality forms,
fixture checks and the a priori report.
"""

import math
import sys
from dataclasses import replace

import pytest

from config import RunConfig
from dynamics import QuadraticMap, RayCache
from errors import ArgumentError
from modulus import (FAIL, INCONCLUSIVE, PASS, Modulus, annulus_modulus, circle, eccentric_modulus,
                     polygon_annulus)
from nest import build_nest, escape_route
from presets import get_preset, real_presets
from puzzle import Puzzle
from verify import (SCHEMA, STAND_IN_NOTE, LedgerBuilder, LedgerEntry, ModulusLedger, apriori_report,
                    check_covering_form, check_qal_form, check_transformation_chain, fixture_checks,
                    oracle_equivalence, pi_bounds_sweep, provenance)

AIRPLANE = -1.75487766625
SMALL = RunConfig(q_max=3, grid_cells=64, grid_refine=128)
CHAIN = RunConfig(q_max=3, grid_cells=128, grid_refine=256)


def test_ledger():
    ledger = ModulusLedger(provenance=provenance(SMALL))
    ledger.add(LedgerEntry('mod(Y^0,R)', Modulus(0.4, 0.01), level=0, outer='Y^0', inner='R'))
    ledger.add(LedgerEntry('mod(E^0\\E^1)', None, level=1, note='on boundary'))
    assert ledger.get('mod(Y^0,R)').value == 0.4
    assert ledger.get('missing') is None
    rows = ledger.to_list()
    assert rows[1]['value'] is None and rows[1]['note'] == 'on boundary'
    frame = ledger.to_frame()
    assert list(frame['name']) == ['mod(Y^0,R)', 'mod(E^0\\E^1)']
    assert ledger.provenance['grid']['cells'] == 64


def test_quasi_additivity_form():
    ok = check_qal_form(0.01, [0.02, 0.03], [1.0, 1.0], eta=0.25, delta0=0.1)
    assert ok.status == PASS
    assert ok.rhs == pytest.approx(2 * 0.03 / (0.25 * 2))
    assert check_qal_form(0.5, [0.02, 0.03], [1.0, 1.0], eta=0.25, delta0=0.1).status == FAIL
    thin = check_qal_form(0.01, [0.02, 0.03], [0.001, 1.0], eta=0.25, delta0=0.1)
    assert thin.status == INCONCLUSIVE and 'collar' in thin.note
    wide = check_qal_form(0.01, [0.2], [1.0], eta=0.25, delta0=0.1)
    assert wide.status == INCONCLUSIVE and 'delta0' in wide.note
    assert check_qal_form(0.01, [0.02], [], eta=0.25).status == INCONCLUSIVE


def test_covering_form():
    ok = check_covering_form(0.01, 0.05, 1.0, eta=0.25, d=2)
    assert ok.status == PASS
    assert ok.rhs == pytest.approx(2 * 4 * 0.01 / 0.25)
    assert check_covering_form(0.01, 0.5, 1.0, eta=0.25, d=2).status == FAIL
    assert check_covering_form(0.1, 0.05, 1.0, eta=0.25, d=2).status == INCONCLUSIVE
    assert check_covering_form(0.01, 0.05, 0.001, eta=0.25, d=2).status == INCONCLUSIVE


def test_pi_bounds_sweep():
    print("=" * 80)
    print("TEST: TRUNCATED STRIP SWEEP")
    print("=" * 80)
    df, verdicts = pi_bounds_sweep((0.1, 0.3), SMALL, cells=64)
    assert list(df.columns) == ['h/a', 'modulus', 'error', 'lower', 'upper', 'status']
    assert len(verdicts) == 2
    assert verdicts[0].name == 'pi-bounds h/a=0.1'
    assert all(v.status != FAIL for v in verdicts)
    assert (df['modulus'] <= df['upper'] * 1.01).all()
    print(df.to_string(index=False))


def test_fixture_checks():
    print("=" * 80)
    print("TEST: FIXTURE CHECKS")
    print("=" * 80)
    verdicts = fixture_checks(SMALL, cells=64, verbose=True)
    by_name = {v.name: v for v in verdicts}
    assert set(by_name) == {'degree-2-rule', 'degree-3-rule', 'degree-4-rule', 'cylinder-bound', 'factor-16',
                            'quasi-additivity', 'covering-lemma', 'series-law', 'reciprocal-L-shape'}
    for v in verdicts:
        assert v.passed, v
    assert 'z^2 preimage' in by_name['factor-16'].note
    assert 'delta0=0.1' in by_name['quasi-additivity'].note
    print(f"✓ {len(verdicts)}/{len(verdicts)} fixture checks pass")


def test_quasi_additivity_islands():
    islands = [annulus_modulus(polygon_annulus(circle(1.0), [circle(0.4, c)], cells=96)) for c in (-0.5, 0.5)]
    exact = eccentric_modulus(1.0, 0.4, 0.5)
    assert exact < SMALL.delta0
    for m in islands:
        assert abs(m.value - exact) <= m.error + 0.05 * exact


def test_transformation_chain_airplane():
    print("=" * 80)
    print("TEST: DEGREE-2 COVERINGS ALONG THE AIRPLANE NEST")
    print("=" * 80)
    puzzle = Puzzle.top(QuadraticMap(AIRPLANE), config=CHAIN, cache=RayCache())
    nest = build_nest(puzzle, escape_route(puzzle, CHAIN), CHAIN)
    ledger = ModulusLedger(provenance=provenance(CHAIN))
    by_name = {v.name: v for v in check_transformation_chain(puzzle, nest, CHAIN, ledger)}
    assert by_name['covering-level-1'].passed, by_name['covering-level-1']
    assert ledger.get('mod(E^0\\B_1)') is not None and ledger.get('mod(E^1\\A_1)') is not None

    mislabeled = replace(nest, levels=[nest.levels[0], replace(nest.levels[1], degree=3)])
    wrong = {v.name: v for v in check_transformation_chain(puzzle, mislabeled, CHAIN, ledger)}
    assert wrong['covering-level-1'].status == FAIL
    assert 'recorded degree 3' in wrong['covering-level-1'].note

    top = by_name['top-pattern']
    assert math.isfinite(top.rhs) and top.rhs > 0
    scaled = {v.name: v for v in check_transformation_chain(puzzle, nest, replace(CHAIN, big_c=10.0), ledger)}
    assert scaled['top-pattern'].rhs == pytest.approx(10 * top.rhs)
    assert 'C=10' in scaled['top-pattern'].note
    print(f"✓ level 1: {by_name['covering-level-1'].note}")


def test_apriori_report_arguments():
    with pytest.raises(ArgumentError):
        apriori_report(QuadraticMap(-1), -1, SMALL)
    report = apriori_report(QuadraticMap(-1), 0, SMALL, cache=RayCache())
    assert report['levels_requested'] == 0
    assert report['levels'] == []
    assert report['floor'] == SMALL.apriori_floor
    assert report['stand_in'] == STAND_IN_NOTE
    assert report['mu'] is None or 0 < report['mu'] <= 0.5
    assert not math.isnan(report['floor'])


def test_apriori_report_tripling():
    print("=" * 80)
    print("TEST: A PRIORI REPORT, TRIPLING3")
    print("=" * 80)
    qmap = QuadraticMap(get_preset('tripling3').c)
    cache = RayCache()
    report = apriori_report(qmap, 1, SMALL, cache=cache)
    assert report['levels_requested'] == 1 and len(report['levels']) == 1
    row = report['levels'][0]
    assert row['index'] == 0 and row['period'] == 3 and row['chi'] is not None
    assert row['value'] is not None and row['value'] > SMALL.apriori_floor
    assert report['floor_met'] is True and not report['truncated']
    assert report['moduli']
    strict = apriori_report(qmap, 1, replace(SMALL, apriori_floor=1e3), cache=cache)
    assert strict['floor_met'] is False
    assert strict['levels'][0]['value'] == pytest.approx(row['value'])
    print(f"✓ mod(E^(chi-1)\\E^chi) = {row['value']:.4g} ± {row['error']:.2g}")


def test_oracle_equivalence_real_presets():
    cache = RayCache()
    presets = real_presets(range(3, 6))
    assert len(presets) >= 5
    for p in presets:
        assert oracle_equivalence(p.c.real, SMALL, cache=cache) == [], p.name


def test_oracle_equivalence_airplane():
    assert oracle_equivalence(AIRPLANE, SMALL, cache=RayCache()) == []


def test_ledger_builder_satellite():
    builder = LedgerBuilder(QuadraticMap(-1), SMALL, cache=RayCache(), name='basilica', verbose=False)
    report = builder.run_full_analysis()
    assert report['schema'] == SCHEMA
    assert report['parameter']['name'] == 'basilica'
    assert report['nest'] is None
    assert report['decoration']['satellite_flag']
    assert any('satellite' in n for n in report['notes'])
    chain = report['verdicts'][0]
    assert chain['name'] == 'transformation-chain' and chain['status'] == INCONCLUSIVE
    assert report['apriori'] is None
    assert report['provenance']['grid']['cells'] == 64


if __name__ == '__main__':
    sys.exit(pytest.main([__file__, '-v']))
