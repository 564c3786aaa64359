"""
Report persistence and diagnostic figures.

JSON is deterministic: keys sorted, floats written with the shortest
round-trip representation (at most 17 significant digits), non-finite
floats as the strings "inf", "-inf", "nan". Figures go to SVG or PNG by
file suffix; they are diagnostics, not an interactive surface.
"""

import json
import math
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

from angles import Angle
from dynamics import QuadraticMap, RayTrace

# stable ids in SVG output
matplotlib.rcParams['svg.hashsalt'] = 'yoccoz'

DEPTH_COLORS = ['#1f3b73', '#2a7f62', '#c0392b', '#8e44ad', '#d68910', '#17a589', '#5d6d7e', '#a04000']


# =====================
# JSON
# =====================

def to_jsonable(x):
    """Convert numpy scalars, complex numbers, angles and report objects to plain JSON values."""
    if x is None or isinstance(x, (str, bool)):
        return x
    if isinstance(x, int):
        return x
    if isinstance(x, float):
        if math.isnan(x):
            return 'nan'
        if math.isinf(x):
            return 'inf' if x > 0 else '-inf'
        return x
    if isinstance(x, complex):
        return {'re': to_jsonable(x.real), 'im': to_jsonable(x.imag)}
    if isinstance(x, (Angle, Fraction)):
        return str(x)
    if isinstance(x, np.generic):
        if np.iscomplexobj(x):
            return to_jsonable(complex(x))
        return to_jsonable(x.item())
    if isinstance(x, np.ndarray):
        return to_jsonable(x.tolist())
    if isinstance(x, pd.DataFrame):
        return to_jsonable(x.to_dict(orient='records'))
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        items = sorted(x, key=str) if isinstance(x, (set, frozenset)) else x
        return [to_jsonable(v) for v in items]
    if hasattr(x, 'to_dict'):
        return to_jsonable(x.to_dict())
    return str(x)


def dumps(report) -> str:
    return json.dumps(to_jsonable(report), sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False) + '\n'


def write_json(report, path) -> Path:
    """Write atomically; OSError propagates to the caller."""
    path = Path(path)
    text = dumps(report)
    tmp = path.with_name(path.name + '.tmp')
    tmp.write_text(text, encoding='utf-8')
    tmp.replace(path)
    return path


def emit(report, out: Optional[str]) -> Optional[Path]:
    """Write to `out`, or to stdout when `out` is None or '-'."""
    if out in (None, '', '-'):
        print(dumps(report), end='')
        return None
    return write_json(report, out)


def write_table(df: pd.DataFrame, path) -> Path:
    path = Path(path)
    if path.suffix.lower() == '.xlsx':
        df.to_excel(path, index=False, engine='openpyxl')
    else:
        df.to_csv(path, index=False)
    return path


# =====================
# FIGURES
# =====================

def _new_axes(title: str):
    fig, ax = plt.subplots(figsize=(8, 8))
    ax.set_aspect('equal', 'box')
    ax.set_title(title)
    ax.grid(True, alpha=0.2)
    return fig, ax


def save_figure(fig, path) -> Path:
    path = Path(path)
    try:
        if path.suffix.lower() == '.png':
            fig.savefig(path, dpi=180, bbox_inches='tight')
        else:
            fig.savefig(path, format='svg', bbox_inches='tight', metadata={'Date': None})
    finally:
        plt.close(fig)
    return path


def _clip(points: np.ndarray, radius: float) -> np.ndarray:
    return points[np.abs(points) <= radius]


def plot_rays(qmap: QuadraticMap, traces: Sequence[RayTrace], path, radius: Optional[float] = None) -> Path:
    radius = radius or 2.0 + abs(qmap.c)
    fig, ax = _new_axes(f"External rays, {qmap.label()}")
    for k, trace in enumerate(traces):
        pts = _clip(np.asarray(trace.points), radius)
        color = DEPTH_COLORS[k % len(DEPTH_COLORS)]
        ax.plot(pts.real, pts.imag, '-', lw=1.0, color=color, label=f"{trace.angle} ({trace.status})")
        if trace.landing is not None:
            ax.plot([trace.landing.real], [trace.landing.imag], 'o', ms=4, color=color)
    ax.plot([qmap.alpha.real, qmap.alpha_prime.real], [qmap.alpha.imag, qmap.alpha_prime.imag], 'k+', ms=8)
    ax.legend(loc='upper right', fontsize=7)
    return save_figure(fig, path)


def _centroid(poly: np.ndarray) -> complex:
    return complex(np.mean(poly[:-1])) if len(poly) > 1 else complex(poly[0])


def plot_puzzle(puzzle, families: Sequence, path, show_labels: bool = True) -> Path:
    """Outlines of the pieces of each family, one color per depth, with rays and the top equipotential."""
    fig, ax = _new_axes(f"Puzzle pieces, {puzzle.qmap.label()}")
    for family in families:
        color = DEPTH_COLORS[family.depth % len(DEPTH_COLORS)]
        for piece in family.pieces:
            poly = puzzle.geometry(piece)
            ax.plot(poly.real, poly.imag, '-', lw=1.6 if family.depth == 0 else 0.8, color=color)
            if show_labels and piece.label:
                z = _centroid(poly)
                ax.text(z.real, z.imag, piece.label, fontsize=7, ha='center', va='center', color=color)
    orbit = [puzzle.orbit[j] for j in range(min(64, puzzle.config.max_nest_levels * 4))]
    ax.plot([z.real for z in orbit], [z.imag for z in orbit], '.', ms=3, color='#555555', label='critical orbit')
    for point in puzzle.portrait.points:
        ax.plot([point.real], [point.imag], 'k+', ms=8)
    ax.legend(loc='upper right', fontsize=7)
    return save_figure(fig, path)


def plot_nest(puzzle, nest, path) -> Path:
    """Critical pieces E^0 ⊃ E^1 ⊃ ... of a principal nest."""
    fig, ax = _new_axes(f"Principal nest, {puzzle.qmap.label()}")
    d0 = nest.levels[0].depth if nest.levels else 0
    for lv in nest.levels:
        piece = puzzle.critical_piece(lv.depth)
        poly = puzzle.geometry(piece, lv.depth - d0)
        color = DEPTH_COLORS[lv.index % len(DEPTH_COLORS)]
        ax.plot(poly.real, poly.imag, '-', lw=1.0, color=color, label=f"E^{lv.index} (depth {lv.depth}, {lv.kind})")
    ax.plot([0.0], [0.0], 'k*', ms=8)
    ax.legend(loc='upper right', fontsize=7)
    return save_figure(fig, path)


def plot_pi_bounds(df: pd.DataFrame, path) -> Path:
    """Truncated-strip moduli with their bounds [h/2a, h/a]."""
    fig, ax = plt.subplots(figsize=(8, 5))
    ax.errorbar(df['h/a'], df['modulus'], yerr=df['error'], fmt='o', color=DEPTH_COLORS[0], label='computed')
    ax.plot(df['h/a'], df['lower'], '--', color=DEPTH_COLORS[2], label='h/2a')
    ax.plot(df['h/a'], df['upper'], '--', color=DEPTH_COLORS[1], label='h/a')
    ax.set_xlabel('h/a')
    ax.set_ylabel('modulus')
    ax.set_title('Truncated strip')
    ax.grid(True, alpha=0.3)
    ax.legend()
    return save_figure(fig, path)
