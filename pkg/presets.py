"""
Named parameters and the recipes that locate them.

Every preset stores c to 12 significant digits together with the procedure
that produced it, so `relocate()` can reproduce the stored digits:

    superstable  bisection on the kneading word (real_line.locate_superstable)
    newton       Newton on f^period(0) = 0 from a complex seed
    literal      the value itself (exact parameters such as c = 0)

Real presets `real-P-k` are the k-th real superstable parameter of period P
counted from the left, for P = 3..9.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional

import pandas as pd

from errors import ArgumentError, NumericError
from real_line import enumerate_superstable, locate_superstable, superstable_residual, tuned_word

DIGITS = 12
REAL_PERIODS = range(3, 10)

AIRPLANE_WORD = 'LR'
TWICE_TUNED_WORD = tuned_word(AIRPLANE_WORD, AIRPLANE_WORD)
TRIPLING_WORD = tuned_word(TWICE_TUNED_WORD, AIRPLANE_WORD)


def round_digits(c: complex, digits: int = DIGITS) -> complex:
    c = complex(c)
    return complex(float(f"{c.real:.{digits}g}"), float(f"{c.imag:.{digits}g}"))


def newton_center(seed: complex, period: int, max_iter: int = 100, tol: float = 1e-14) -> complex:
    """Hyperbolic center of period `period` reached by Newton from `seed`."""
    c = complex(seed)
    for _ in range(max_iter):
        f, df = superstable_residual(c, period)
        if df == 0:
            break
        step = f / df
        c -= step
        if abs(step) < tol:
            return c
    residual, _ = superstable_residual(c, period)
    raise NumericError(f"Newton for the period-{period} center did not converge from {seed}", residual=abs(residual))


@dataclass(frozen=True)
class Preset:
    name: str
    c: complex
    recipe: str
    word: str = ''
    seed: complex = 0j
    period: Optional[int] = None
    q: Optional[int] = None
    n: Optional[int] = None
    satellite: bool = False
    note: str = ''
    tuning_levels: int = 0

    @property
    def is_real(self) -> bool:
        return self.c.imag == 0.0

    def relocate(self) -> complex:
        if self.recipe == 'superstable':
            return complex(locate_superstable(self.word))
        if self.recipe == 'newton':
            return newton_center(self.seed, self.period)
        return self.c

    def reproduces(self) -> bool:
        return round_digits(self.relocate()) == self.c

    def provenance(self) -> str:
        if self.recipe == 'superstable':
            return f"bisection on kneading word {self.word} (period {len(self.word) + 1})"
        if self.recipe == 'newton':
            return f"Newton on f^{self.period}(0)=0 from {self.seed}"
        return 'literal'

    def to_dict(self) -> dict:
        return {
            'name': self.name,
            'c_re': self.c.real,
            'c_im': self.c.imag,
            'recipe': self.provenance(),
            'period': self.period,
            'q': self.q,
            'n': self.n,
            'satellite': self.satellite,
            'tuning_levels': self.tuning_levels,
            'note': self.note,
        }


def _superstable(name: str, word: str, **kwargs) -> Preset:
    c = round_digits(locate_superstable(word))
    return Preset(name=name, c=c, recipe='superstable', word=word, period=len(word) + 1, **kwargs)


def _named() -> List[Preset]:
    return [
        Preset(name='airplane', c=complex(-1.75487766625), recipe='superstable', word=AIRPLANE_WORD,
               period=3, q=2, n=1, tuning_levels=1,
               note='real period-3 center; principal nest renormalizes with period 3'),
        Preset(name='basilica', c=complex(-1.0), recipe='superstable', word='L', period=2, q=2,
               satellite=True, note='critical orbit never leaves Y^1 under f^2'),
        Preset(name='rabbit', c=complex(-0.122561166877, 0.744861766620), recipe='newton',
               seed=complex(-0.12, 0.74), period=3, q=3, satellite=True,
               note='alpha has rotation number 1/3; angles 1/7, 2/7, 4/7'),
        Preset(name='center', c=0j, recipe='literal', period=1, note='alpha = 0 is attracting'),
        _superstable('twice-tuned', TWICE_TUNED_WORD, q=2, n=1, tuning_levels=2,
                     note='airplane tuned by airplane'),
        _superstable('tripling3', TRIPLING_WORD, q=2, n=1, tuning_levels=3,
                     note='airplane tuned three times'),
    ]


def real_presets(periods=REAL_PERIODS) -> List[Preset]:
    out = []
    for period in periods:
        for k, (word, c) in enumerate(enumerate_superstable(period), start=1):
            out.append(Preset(name=f'real-{period}-{k}', c=round_digits(c), recipe='superstable', word=word,
                              period=period))
    return out


@lru_cache(maxsize=1)
def all_presets() -> Dict[str, Preset]:
    table = {p.name: p for p in _named()}
    for p in real_presets():
        table.setdefault(p.name, p)
    return table


def get_preset(name: str) -> Preset:
    table = all_presets()
    if name not in table:
        known = ', '.join(sorted(n for n in table if not n.startswith('real-')))
        raise ArgumentError(f"unknown preset '{name}' (named presets: {known}; real-P-k for P in 3..9)")
    return table[name]


def presets_frame(include_real: bool = True) -> pd.DataFrame:
    rows = [p.to_dict() for p in all_presets().values() if include_real or not p.name.startswith('real-')]
    return pd.DataFrame(rows)
