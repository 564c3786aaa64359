"""
Command-line entry point.

Subcommands:
    rays      trace external rays of f_c and report landing points
    puzzle    build puzzle families down to a depth
    nest      escape route, principal nest and renormalization tower
    verify    modulus ledger and inequality verdicts, or a single check
    render    SVG/PNG figure of rays, pieces, a nest or the strip sweep
    presets   list presets, write the configuration reference, export xlsx

Exit codes: 0 ok, 2 usage or precondition, 3 numeric, 4 I/O.

USAGE:
    python yoccoz_app.py nest --preset airplane
    python yoccoz_app.py rays --c=-1 --angles 1/3,2/3 --level 0.01
    python yoccoz_app.py verify --preset tripling3 --levels 3 --out report.json
    python yoccoz_app.py verify --check pi-bounds --jobs 4
"""

import argparse
import contextlib
import sys
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from typing import List, Optional, Tuple

from angles import Angle
from config import TOOL_VERSION, RunConfig, build_config, export_parameters_xlsx, write_reference_page
from dynamics import QuadraticMap, detect_rotation_number, lands_at, shared_cache, trace_rays
from errors import EXIT_OK, ArgumentError, PreconditionError, YoccozError, exit_code_for
from nest import build_nest, build_tower, escape_route, nest_table, return_record
from presets import Preset, all_presets, get_preset, presets_frame
from puzzle import Puzzle, family_to_dict
from real_line import RealLineOracle
from reports import emit, plot_nest, plot_pi_bounds, plot_puzzle, plot_rays
from verify import (SCHEMA, LedgerBuilder, ModulusLedger, check_transformation_chain, fixture_checks,
                    oracle_equivalence, pi_bounds_sweep, provenance)

CHECKS = ('pi-bounds', 'fixtures', 'chain', 'oracle')
RENDER_KINDS = ('puzzle', 'nest', 'rays', 'pi-bounds')


# =====================
# ARGUMENT HELPERS
# =====================

def parse_parameter(text: str) -> complex:
    """'-1', '-0.12+0.74i' or '-0.12+0.74j'."""
    try:
        return complex(text.strip().replace(' ', '').replace('i', 'j'))
    except ValueError as exc:
        raise ArgumentError(f"cannot read parameter '{text}' as a complex number") from exc


def parse_angles(text: str) -> List[Angle]:
    items = [t for t in text.split(',') if t.strip()]
    if not items:
        raise ArgumentError("no angles given")
    return [Angle.parse(t) for t in items]


def resolve_parameter(args) -> Tuple[QuadraticMap, str, Optional[Preset]]:
    if getattr(args, 'preset', None) and getattr(args, 'c', None):
        raise ArgumentError("give either --c or --preset, not both")
    if getattr(args, 'preset', None):
        preset = get_preset(args.preset)
        return QuadraticMap(preset.c), preset.name, preset
    if getattr(args, 'c', None):
        c = parse_parameter(args.c)
        return QuadraticMap(c), QuadraticMap(c).label(), None
    raise ArgumentError("a parameter is required: --c VALUE or --preset NAME")


def make_config(args) -> RunConfig:
    return build_config(args.config, args.set or (), precision=args.precision, jobs=args.jobs,
                        verbose=True if args.verbose else None)


def envelope(kind: str, name: str, qmap: Optional[QuadraticMap], config: RunConfig, **body) -> dict:
    out = {
        'schema': f'yoccoz-{kind}/1',
        'tool_version': TOOL_VERSION,
        'parameter': None if qmap is None else {'name': name, 'c_re': qmap.c.real, 'c_im': qmap.c.imag},
        'config': config.to_dict(),
    }
    out.update(body)
    return out


@contextlib.contextmanager
def progress_to_stderr(out: Optional[str]):
    """Progress prints go to stderr while a JSON report is bound for stdout."""
    if out in (None, '', '-'):
        with contextlib.redirect_stdout(sys.stderr):
            yield
    else:
        yield


# =====================
# COMMANDS
# =====================

def cmd_rays(args, config: RunConfig) -> int:
    qmap, name, _ = resolve_parameter(args)
    angles = parse_angles(args.angles)
    level = config.ray_floor_level if args.level is None else args.level
    cache = shared_cache(config)
    with progress_to_stderr(args.out):
        traces = trace_rays(qmap, angles, level, config=config, cache=cache)
        rays = []
        for t in traces:
            row = t.to_dict()
            if t.landing is not None and qmap.is_alpha_repelling(config.repelling_margin):
                row['lands_at_alpha'] = lands_at(qmap, t, qmap.alpha, config.landing_tol,
                                                 config.landing_samples)
            rays.append(row)
        cache.save()
        if args.svg:
            plot_rays(qmap, traces, args.svg)
            print(f"✓ Figure written to {args.svg}")
    emit(envelope('rays', name, qmap, config, level=level, rays=rays), args.out)
    return EXIT_OK


def cmd_puzzle(args, config: RunConfig) -> int:
    qmap, name, _ = resolve_parameter(args)
    if args.depth < 0:
        raise ArgumentError(f"depth must be >= 0, got {args.depth}")
    with progress_to_stderr(args.out):
        puzzle = Puzzle.top(qmap, config=config, verbose=config.verbose)
        families = [puzzle.depth0_family()]
        for _ in range(args.depth):
            families.append(puzzle.refine(families[-1]))
        print(f"✓ Pieces per depth: {[len(f) for f in families]}")
        body = {
            'portrait': {'q': puzzle.q, 'classes': [[str(a) for a in cls] for cls in puzzle.portrait.classes]},
            'counts': [len(f) for f in families],
            'families': [family_to_dict(puzzle, f, with_geometry=not args.no_geometry) for f in families],
        }
        if args.svg:
            plot_puzzle(puzzle, families, args.svg)
            print(f"✓ Figure written to {args.svg}")
        puzzle.cache.save()
    emit(envelope('puzzle', name, qmap, config, **body), args.out)
    return EXIT_OK


def _oracle(qmap: QuadraticMap, config: RunConfig, kind: str):
    if kind == 'real':
        if not qmap.is_real:
            raise ArgumentError("the real-line oracle needs a real parameter")
        return RealLineOracle.top_level(qmap.c.real)
    return Puzzle.top(qmap, config=config, verbose=config.verbose)


def cmd_nest(args, config: RunConfig) -> int:
    qmap, name, _ = resolve_parameter(args)
    with progress_to_stderr(args.out):
        oracle = _oracle(qmap, config, args.oracle)
        tower = build_tower(oracle, max(1, args.levels), config, verbose=config.verbose)
        levels = []
        for tl in tower:
            row = {'index': tl.index, 'scale': tl.scale, 'decoration': tl.decoration.to_dict(),
                   'nest': tl.nest.to_dict() if tl.nest else None,
                   'status': 'satellite' if tl.decoration.satellite_flag else tl.nest.renorm_status}
            if tl.nest is not None and tl.nest.renormalizable and args.horizon:
                row['return_record'] = return_record(tl.oracle, tl.nest, args.horizon, config).to_dict()
            levels.append(row)
            if tl.nest is not None:
                print(f"\nLevel {tl.index} (scale {tl.scale}): status {row['status']}")
                print(nest_table(tl.nest).to_string(index=False))
            else:
                print(f"\nLevel {tl.index} (scale {tl.scale}): satellite, no principal nest")
    emit(envelope('nest', name, qmap, config, oracle=args.oracle, tower=levels), args.out)
    return EXIT_OK


def _run_check(args, config: RunConfig) -> dict:
    if args.check == 'pi-bounds':
        df, verdicts = pi_bounds_sweep(config=config, cells=args.cells)
        print(df.to_string(index=False))
        return {'table': df, 'verdicts': verdicts}
    if args.check == 'fixtures':
        return {'verdicts': fixture_checks(config, cells=args.cells, verbose=True)}
    if args.check == 'chain':
        qmap, _, _ = resolve_parameter(args)
        puzzle = Puzzle.top(qmap, config=config, verbose=config.verbose)
        decoration = escape_route(puzzle, config, config.verbose)
        if decoration.satellite_flag:
            raise PreconditionError(f"{qmap.label()} is satellite at the top level: no principal nest")
        nest = build_nest(puzzle, decoration, config, config.verbose)
        ledger = ModulusLedger(provenance=provenance(config))
        verdicts = check_transformation_chain(puzzle, nest, config, ledger)
        return {'moduli': ledger.to_list(), 'verdicts': verdicts}
    # oracle
    if args.c:
        targets = [(QuadraticMap(parse_parameter(args.c)).label(), parse_parameter(args.c))]
    else:
        targets = [(p.name, p.c) for p in all_presets().values() if p.name.startswith('real-')]
    if any(c.imag != 0.0 for _, c in targets):
        raise ArgumentError("the oracle check needs real parameters")
    job = partial(oracle_equivalence, config=config, levels=max(1, args.levels))
    values = [c.real for _, c in targets]
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(job, values))
    else:
        results = [job(v) for v in values]
    rows = [{'name': n, 'c': v, 'mismatches': m} for (n, _), v, m in zip(targets, values, results)]
    bad = sum(1 for r in rows if r['mismatches'])
    print(f"{'✓' if not bad else '⚠'} oracle agreement on {len(rows) - bad}/{len(rows)} parameters")
    return {'parameters': rows}


def cmd_verify(args, config: RunConfig) -> int:
    if args.check and args.preset:
        raise ArgumentError("--check runs a standalone check; it cannot be combined with --preset")
    if args.check in ('pi-bounds', 'fixtures') and args.c:
        raise ArgumentError(f"--check {args.check} takes no parameter")
    with progress_to_stderr(args.out):
        if args.check:
            qmap = QuadraticMap(parse_parameter(args.c)) if args.c else None
            body = _run_check(args, config)
            report = envelope('check', qmap.label() if qmap else '', qmap, config, check=args.check, **body)
        else:
            qmap, name, _ = resolve_parameter(args)
            builder = LedgerBuilder(qmap, config, levels=args.levels, name=name, verbose=True)
            report = builder.run_full_analysis()
            report['schema'] = SCHEMA
    emit(report, args.out)
    return EXIT_OK


def cmd_render(args, config: RunConfig) -> int:
    if args.kind == 'pi-bounds':
        df, _ = pi_bounds_sweep(config=config, cells=args.cells)
        plot_pi_bounds(df, args.out)
        print(f"✓ Figure written to {args.out}")
        return EXIT_OK
    qmap, _, _ = resolve_parameter(args)
    if args.kind == 'rays':
        angles = parse_angles(args.angles) if args.angles else None
        if angles is None:
            result = detect_rotation_number(qmap, config=config)
            if not result.determined:
                raise PreconditionError(f"no alpha-cycle for {qmap.label()}: {result.reason}")
            angles = list(result.cycle.angles)
        plot_rays(qmap, trace_rays(qmap, angles, config.ray_floor_level, config=config), args.out)
    else:
        puzzle = Puzzle.top(qmap, config=config, verbose=config.verbose)
        if args.kind == 'puzzle':
            families = [puzzle.depth0_family()]
            for _ in range(args.depth):
                families.append(puzzle.refine(families[-1]))
            plot_puzzle(puzzle, families, args.out)
        else:
            decoration = escape_route(puzzle, config, config.verbose)
            if decoration.satellite_flag:
                raise PreconditionError(f"{qmap.label()} is satellite at the top level: no principal nest")
            plot_nest(puzzle, build_nest(puzzle, decoration, config, config.verbose), args.out)
    print(f"✓ Figure written to {args.out}")
    return EXIT_OK


def cmd_presets(args, config: RunConfig) -> int:
    did = False
    if args.config_reference:
        write_reference_page(args.config_reference)
        did = True
    if args.xlsx:
        export_parameters_xlsx(args.xlsx, config)
        did = True
    if args.check_recipes:
        failures = [p.name for p in all_presets().values() if not p.reproduces()]
        if failures:
            print(f"⚠ recipes not reproducing stored digits: {failures}")
        else:
            print(f"✓ all {len(all_presets())} recipes reproduce their stored digits")
        did = True
    if args.list or not did:
        print(presets_frame(include_real=not args.named_only).to_string(index=False))
    return EXIT_OK


# =====================
# PARSER
# =====================

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help="key = value configuration file")
    common.add_argument('--set', action='append', metavar='KEY=VALUE', help="override one config key (repeatable)")
    common.add_argument('--precision', choices=('double', 'extended'))
    common.add_argument('--jobs', type=int, help="worker processes for sweeps")
    common.add_argument('-v', '--verbose', action='store_true')

    def parameter(p):
        p.add_argument('--c', help="parameter, e.g. --c=-0.12+0.74i")
        p.add_argument('--preset', help="named preset (see `presets --list`)")

    parser = argparse.ArgumentParser(prog='yoccoz_app.py', description="Yoccoz puzzles and principal nests of z^2 + c")
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('rays', parents=[common], help="trace external rays")
    parameter(p)
    p.add_argument('--angles', required=True, help="comma-separated angles, e.g. 1/3,2/3")
    p.add_argument('--level', type=float, help="target Green level (default: ray_floor_level)")
    p.add_argument('--out', help="JSON output path (default stdout)")
    p.add_argument('--svg', help="also write a figure")
    p.set_defaults(func=cmd_rays)

    p = sub.add_parser('puzzle', parents=[common], help="build puzzle families")
    parameter(p)
    p.add_argument('--depth', type=int, default=1)
    p.add_argument('--out', help="JSON output path (default stdout)")
    p.add_argument('--svg', help="also write a figure")
    p.add_argument('--no-geometry', action='store_true', help="omit boundary polylines")
    p.set_defaults(func=cmd_puzzle)

    p = sub.add_parser('nest', parents=[common], help="principal nest and renormalization tower")
    parameter(p)
    p.add_argument('--oracle', choices=('geometric', 'real'), default='geometric')
    p.add_argument('--levels', type=int, default=1, help="renormalization levels")
    p.add_argument('--horizon', type=int, default=0, help="also record returns up to this time")
    p.add_argument('--out', help="JSON output path (default stdout)")
    p.set_defaults(func=cmd_nest)

    p = sub.add_parser('verify', parents=[common], help="modulus ledger and verdicts")
    parameter(p)
    p.add_argument('--levels', type=int, default=0, help="renormalization levels for the a priori report")
    p.add_argument('--check', choices=CHECKS, help="run one standalone check")
    p.add_argument('--cells', type=int, help="grid cells for fixture checks")
    p.add_argument('--out', help="JSON output path (default stdout)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser('render', parents=[common], help="write a figure")
    parameter(p)
    p.add_argument('--kind', choices=RENDER_KINDS, default='puzzle')
    p.add_argument('--depth', type=int, default=1)
    p.add_argument('--angles')
    p.add_argument('--cells', type=int)
    p.add_argument('--out', required=True, help=".svg or .png")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser('presets', parents=[common], help="presets and configuration reference")
    p.add_argument('--list', action='store_true')
    p.add_argument('--named-only', action='store_true')
    p.add_argument('--config-reference', metavar='PATH')
    p.add_argument('--xlsx', metavar='PATH')
    p.add_argument('--check-recipes', action='store_true')
    p.set_defaults(func=cmd_presets)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = make_config(args)
        return args.func(args, config)
    except (YoccozError, OSError) as exc:
        print(f"❌ {exc}", file=sys.stderr)
        return exit_code_for(exc)


if __name__ == '__main__':
    sys.exit(main())
