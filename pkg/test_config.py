"""
Test script for the parameter table, config files and overrides.
"""

import sys

import pandas as pd
import pytest

from config import (CACHE_ENV_VAR, RunConfig, build_config, export_parameters_xlsx, load_config_file,
                    parameters_frame, parse_overrides, parse_parameters, reference_page)
from errors import ArgumentError


def test_table_matches_defaults():
    print("=" * 80)
    print("TEST: PARAMETER TABLE")
    print("=" * 80)
    df = parameters_frame()
    assert list(df.columns) == ['Category', 'Parameter', 'Value', 'Unit', 'Notes']
    config = parse_parameters(df)
    assert config == RunConfig()
    assert set(df['Parameter']) == set(RunConfig().to_dict())
    print(f"✓ {len(df)} parameters, table and dataclass defaults agree")


def test_documented_defaults():
    c = RunConfig()
    assert c.ray_substeps == 4
    assert c.landing_tol == 1e-8
    assert c.q_max == 8
    assert c.satellite_budget == 64
    assert c.grid_cells == 512 and c.grid_refine == 1024
    assert (c.delta0, c.epsilon, c.eta, c.big_c) == (0.1, 0.05, 0.5, 1.0)
    assert c.degree_bound == 32
    assert c.gap_multiplier == 2


def test_file_and_overrides(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# tighter grid\ngrid_cells = 128\ngrid_refine = 256  # ladder\n\nverbose = yes\n")
    assert load_config_file(path) == {'grid_cells': '128', 'grid_refine': '256', 'verbose': 'yes'}
    config = build_config(path, ['eta=0.25', 'grid_cells=64'], jobs=3)
    assert config.grid_cells == 64
    assert config.grid_refine == 256
    assert config.verbose is True
    assert config.eta == 0.25
    assert config.jobs == 3
    print("✓ defaults <- file <- --set <- explicit")


def test_bad_values():
    with pytest.raises(ArgumentError):
        parse_overrides(['grid_cells'])
    with pytest.raises(ArgumentError):
        build_config(None, ['no_such_key=1'])
    with pytest.raises(ArgumentError):
        build_config(None, ['grid_cells=lots'])
    with pytest.raises(ArgumentError):
        build_config(None, ['precision=quad'])
    with pytest.raises(ArgumentError):
        build_config(None, ['grid_refine=100'])
    with pytest.raises(ArgumentError):
        build_config(None, ['big_c=0'])


def test_cache_dir_from_environment(monkeypatch, tmp_path):
    monkeypatch.setenv(CACHE_ENV_VAR, str(tmp_path))
    assert RunConfig().resolved_cache_dir() == tmp_path
    assert RunConfig(cache_dir=str(tmp_path / 'x')).resolved_cache_dir() == tmp_path / 'x'
    monkeypatch.delenv(CACHE_ENV_VAR)
    assert RunConfig().resolved_cache_dir() is None


def test_reference_page_and_xlsx(tmp_path):
    page = reference_page()
    assert page.startswith("# Configuration reference")
    for name in RunConfig().to_dict():
        assert f"`{name}`" in page
    path = export_parameters_xlsx(tmp_path / "params.xlsx", RunConfig(eta=0.3))
    df = pd.read_excel(path, sheet_name='Parameters')
    assert float(df.loc[df['Parameter'] == 'eta', 'Value'].iloc[0]) == 0.3
    print("✓ reference page and xlsx export")


if __name__ == '__main__':
    sys.exit(pytest.main([__file__, '-v']))
