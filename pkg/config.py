"""
Run configuration: one parameter table, parsed into a frozen RunConfig.

The table has the same shape as a model assumptions sheet:
    Category | Parameter | Value | Unit | Notes
All defaults live in DEFAULT_PARAMETERS. A config file is flat text with one
`key = value` per line (`#` starts a comment); `--set key=value` overrides
are applied on top. CONFIG_REFERENCE.md is generated from the same table.
"""

import os
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Dict, Iterable, Optional

import pandas as pd

from errors import ArgumentError

TOOL_VERSION = "1.0.0"
CACHE_ENV_VAR = "YOCCOZ_CACHE_DIR"


# =====================
# PARAMETER TABLE
# =====================

DEFAULT_PARAMETERS = [
    # Tracing
    {'Category': 'Tracing', 'Parameter': 'ray_substeps', 'Value': 4, 'Unit': 'steps',
     'Notes': 'Sub-steps per dyadic Green level (level factor 2^(1/s) per step)'},
    {'Category': 'Tracing', 'Parameter': 'newton_tol', 'Value': 1e-12, 'Unit': 'relative',
     'Notes': 'Newton stopping tolerance on |dz| / (1 + |z|)'},
    {'Category': 'Tracing', 'Parameter': 'newton_max_iter', 'Value': 40, 'Unit': 'iterations',
     'Notes': 'Newton iterations per ray sample before declaring escaped-precision'},
    {'Category': 'Tracing', 'Parameter': 'landing_tol', 'Value': 1e-8, 'Unit': 'distance',
     'Notes': 'Landing tolerance for rays and landing detection at alpha'},
    {'Category': 'Tracing', 'Parameter': 'landing_samples', 'Value': 5, 'Unit': 'samples',
     'Notes': 'Deepest samples that must approach the landing point monotonically'},
    {'Category': 'Tracing', 'Parameter': 'reference_radius', 'Value': 1e6, 'Unit': 'radius',
     'Notes': 'Radius where the Boettcher coordinate is replaced by the identity'},
    {'Category': 'Tracing', 'Parameter': 'ray_floor_level', 'Value': 1e-60, 'Unit': 'Green',
     'Notes': 'Deepest Green level a ray is ever traced to'},
    {'Category': 'Tracing', 'Parameter': 'green_budget', 'Value': 10000, 'Unit': 'iterations',
     'Notes': 'Iteration budget of one Green function evaluation'},
    {'Category': 'Tracing', 'Parameter': 'repelling_margin', 'Value': 1e-3, 'Unit': 'multiplier',
     'Notes': 'alpha counts as repelling when |2 alpha| > 1 + margin'},
    {'Category': 'Tracing', 'Parameter': 'q_max', 'Value': 8, 'Unit': 'period',
     'Notes': 'Largest rotation denominator tried by rotation-number detection'},
    {'Category': 'Tracing', 'Parameter': 'precision', 'Value': 'double', 'Unit': 'choice',
     'Notes': 'double (complex128) or extended (clongdouble)'},
    # Puzzle
    {'Category': 'Puzzle', 'Parameter': 'top_level', 'Value': 1.0, 'Unit': 'Green',
     'Notes': 'Green level of the depth-0 equipotential; depth l pieces use top_level / 2^l'},
    {'Category': 'Puzzle', 'Parameter': 'arc_samples', 'Value': 64, 'Unit': 'samples/turn',
     'Notes': 'Equipotential samples per full turn of Boettcher angle (at least 3 per arc)'},
    {'Category': 'Puzzle', 'Parameter': 'boundary_band', 'Value': 1e-6, 'Unit': 'relative',
     'Notes': 'On-boundary band for point location, relative to the piece diameter'},
    {'Category': 'Puzzle', 'Parameter': 'max_family_depth', 'Value': 8, 'Unit': 'depth',
     'Notes': 'Largest depth for which full piece families are enumerated'},
    # Budgets
    {'Category': 'Budgets', 'Parameter': 'satellite_budget', 'Value': 64, 'Unit': 'q-steps',
     'Notes': 'Escape-route budget M before the satellite flag is raised'},
    {'Category': 'Budgets', 'Parameter': 'return_budget', 'Value': 1000000, 'Unit': 'iterates',
     'Notes': 'Per-level budget for first returns of the critical orbit'},
    {'Category': 'Budgets', 'Parameter': 'renorm_budget', 'Value': 1000, 'Unit': 'returns',
     'Notes': 'Returns of g_chi verified before declaring renormalization'},
    {'Category': 'Budgets', 'Parameter': 'max_nest_levels', 'Value': 24, 'Unit': 'levels',
     'Notes': 'Largest nest height explored before budget-exhausted'},
    {'Category': 'Budgets', 'Parameter': 'gap_multiplier', 'Value': 2, 'Unit': 'm',
     'Notes': 'Gap threshold m in i_(k+1) - i_k > m q n'},
    {'Category': 'Budgets', 'Parameter': 'degree_bound', 'Value': 32, 'Unit': 'degree',
     'Notes': 'Observed-degree bound that is flagged (not assumed) on composed returns'},
    # Grid
    {'Category': 'Grid', 'Parameter': 'grid_cells', 'Value': 512, 'Unit': 'cells',
     'Notes': 'Cells along the longest side of a modulus grid'},
    {'Category': 'Grid', 'Parameter': 'grid_refine', 'Value': 1024, 'Unit': 'cells',
     'Notes': 'Refined grid for the Richardson error estimate'},
    {'Category': 'Grid', 'Parameter': 'cg_rtol', 'Value': 1e-10, 'Unit': 'relative',
     'Notes': 'Conjugate-gradient relative residual'},
    {'Category': 'Grid', 'Parameter': 'cg_maxiter', 'Value': 20000, 'Unit': 'iterations',
     'Notes': 'Conjugate-gradient iteration cap'},
    {'Category': 'Grid', 'Parameter': 'strip_margin', 'Value': 10.0, 'Unit': 'h',
     'Notes': 'Truncation width beyond the marked interval, in units of h'},
    # Constants
    {'Category': 'Constants', 'Parameter': 'delta0', 'Value': 0.1, 'Unit': 'modulus',
     'Notes': 'Quasi-additivity threshold delta_0 (unspecified in theory)'},
    {'Category': 'Constants', 'Parameter': 'epsilon', 'Value': 0.05, 'Unit': 'modulus',
     'Notes': 'Covering Lemma threshold epsilon(eta, T, D) (unspecified in theory)'},
    {'Category': 'Constants', 'Parameter': 'eta', 'Value': 0.5, 'Unit': 'ratio',
     'Notes': 'Collar ratio eta'},
    {'Category': 'Constants', 'Parameter': 'big_c', 'Value': 1.0, 'Unit': 'constant',
     'Notes': 'Constant C scaling the soft factor-4 and 2^(n+1) patterns'},
    {'Category': 'Constants', 'Parameter': 'transform_tol', 'Value': 0.03, 'Unit': 'relative',
     'Notes': 'Tolerance of the exact degree-2 covering check'},
    {'Category': 'Constants', 'Parameter': 'apriori_floor', 'Value': 1e-3, 'Unit': 'modulus',
     'Notes': 'Floor that per-level moduli must stay above'},
    # Run
    {'Category': 'Run', 'Parameter': 'jobs', 'Value': 1, 'Unit': 'workers',
     'Notes': 'Worker processes for parameter sweeps'},
    {'Category': 'Run', 'Parameter': 'verbose', 'Value': False, 'Unit': 'flag',
     'Notes': 'Print [DEBUG] progress lines'},
    {'Category': 'Run', 'Parameter': 'cache_dir', 'Value': '', 'Unit': 'path',
     'Notes': f'On-disk ray cache directory (falls back to ${CACHE_ENV_VAR})'},
]


@dataclass(frozen=True)
class RunConfig:
    """All tunables of a run; serialized into every report."""

    ray_substeps: int = 4
    newton_tol: float = 1e-12
    newton_max_iter: int = 40
    landing_tol: float = 1e-8
    landing_samples: int = 5
    reference_radius: float = 1e6
    ray_floor_level: float = 1e-60
    green_budget: int = 10000
    repelling_margin: float = 1e-3
    q_max: int = 8
    precision: str = 'double'
    top_level: float = 1.0
    arc_samples: int = 64
    boundary_band: float = 1e-6
    max_family_depth: int = 8
    satellite_budget: int = 64
    return_budget: int = 1000000
    renorm_budget: int = 1000
    max_nest_levels: int = 24
    gap_multiplier: int = 2
    degree_bound: int = 32
    grid_cells: int = 512
    grid_refine: int = 1024
    cg_rtol: float = 1e-10
    cg_maxiter: int = 20000
    strip_margin: float = 10.0
    delta0: float = 0.1
    epsilon: float = 0.05
    eta: float = 0.5
    big_c: float = 1.0
    transform_tol: float = 0.03
    apriori_floor: float = 1e-3
    jobs: int = 1
    verbose: bool = False
    cache_dir: str = ''

    def __post_init__(self):
        if self.precision not in ('double', 'extended'):
            raise ArgumentError(f"precision must be 'double' or 'extended', got '{self.precision}'")
        if self.ray_substeps < 1:
            raise ArgumentError("ray_substeps must be >= 1")
        if self.grid_refine <= self.grid_cells:
            raise ArgumentError("grid_refine must exceed grid_cells")
        if self.big_c <= 0:
            raise ArgumentError(f"big_c must be > 0, got {self.big_c}")

    def to_dict(self) -> dict:
        return asdict(self)

    def with_overrides(self, overrides: Dict[str, object]) -> 'RunConfig':
        return replace(self, **coerce_values(overrides))

    def resolved_cache_dir(self) -> Optional[Path]:
        path = self.cache_dir or os.environ.get(CACHE_ENV_VAR, '')
        return Path(path) if path else None


# =====================
# PARSING
# =====================

_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _coerce(name: str, raw) -> object:
    if name not in _FIELD_TYPES:
        raise ArgumentError(f"unknown config key '{name}'")
    kind = _FIELD_TYPES[name]
    kind = kind if isinstance(kind, str) else kind.__name__
    try:
        if kind == 'bool':
            if isinstance(raw, bool):
                return raw
            text = str(raw).strip().lower()
            if text in ('1', 'true', 'yes', 'on'):
                return True
            if text in ('0', 'false', 'no', 'off'):
                return False
            raise ValueError(raw)
        if kind == 'int':
            return int(float(raw)) if not isinstance(raw, int) else raw
        if kind == 'float':
            return float(raw)
        return str(raw).strip()
    except (TypeError, ValueError) as exc:
        raise ArgumentError(f"config key '{name}': cannot read '{raw}' as {kind}") from exc


def coerce_values(values: Dict[str, object]) -> Dict[str, object]:
    return {k: _coerce(k, v) for k, v in values.items()}


def parameters_frame() -> pd.DataFrame:
    """The default parameter table as a DataFrame."""
    return pd.DataFrame(DEFAULT_PARAMETERS, columns=['Category', 'Parameter', 'Value', 'Unit', 'Notes'])


def parse_parameters(df: pd.DataFrame) -> RunConfig:
    """Parse a parameter DataFrame into a RunConfig."""
    params = {}
    for _, row in df.iterrows():
        name = row['Parameter']
        if pd.notna(name) and name != '':
            params[name] = row['Value']
    return RunConfig(**coerce_values(params))


def parse_overrides(items: Iterable[str]) -> Dict[str, str]:
    """Parse `key=value` strings (from --set)."""
    out = {}
    for item in items or ():
        if '=' not in item:
            raise ArgumentError(f"--set expects key=value, got '{item}'")
        key, value = item.split('=', 1)
        out[key.strip()] = value.strip()
    return out


def load_config_file(path) -> Dict[str, str]:
    """Read a flat `key = value` file."""
    values = {}
    with open(path, 'r') as f:
        for lineno, line in enumerate(f, 1):
            line = line.split('#', 1)[0].strip()
            if not line:
                continue
            if '=' not in line:
                raise ArgumentError(f"{path}:{lineno}: expected key = value")
            key, value = line.split('=', 1)
            values[key.strip()] = value.strip()
    return values


def build_config(config_path=None, overrides: Iterable[str] = (), **explicit) -> RunConfig:
    """Defaults <- config file <- --set overrides <- explicit keyword values."""
    config = parse_parameters(parameters_frame())
    if config_path:
        config = config.with_overrides(load_config_file(config_path))
    config = config.with_overrides(parse_overrides(overrides))
    explicit = {k: v for k, v in explicit.items() if v is not None}
    if explicit:
        config = config.with_overrides(explicit)
    return config


# =====================
# REFERENCE PAGE / EXPORT
# =====================

def reference_page() -> str:
    """Markdown reference of every parameter and its default."""
    df = parameters_frame()
    lines = [
        "# Configuration reference",
        "",
        "Generated from the parameter table in `config.py`. Override any key in a",
        "`key = value` file (`--config`) or on the command line (`--set key=value`).",
        "",
    ]
    for category, group in df.groupby('Category', sort=False):
        lines.append(f"## {category}")
        lines.append("")
        lines.append("| Parameter | Default | Unit | Notes |")
        lines.append("|---|---|---|---|")
        for _, row in group.iterrows():
            lines.append(f"| `{row['Parameter']}` | {row['Value']} | {row['Unit']} | {row['Notes']} |")
        lines.append("")
    return "\n".join(lines)


def write_reference_page(path) -> Path:
    path = Path(path)
    path.write_text(reference_page())
    print(f"✓ Configuration reference written to {path}")
    return path


def export_parameters_xlsx(path, config: Optional[RunConfig] = None) -> Path:
    """Write the parameter table (with the values of `config`) to an xlsx sheet."""
    df = parameters_frame()
    if config is not None:
        values = config.to_dict()
        df['Value'] = [values[name] for name in df['Parameter']]
    path = Path(path)
    with pd.ExcelWriter(path, engine='openpyxl') as writer:
        df.to_excel(writer, sheet_name='Parameters', index=False)
        sheet = writer.sheets['Parameters']
        for column, width in zip('ABCDE', (12, 22, 14, 14, 70)):
            sheet.column_dimensions[column].width = width
    print(f"✓ Parameters exported to {path}")
    return path
