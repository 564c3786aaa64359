"""
Test script for the command-line entry point, presets and JSON reports.
"""

import json
import math
import sys

import pytest

from errors import EXIT_IO, EXIT_OK, EXIT_USAGE, ArgumentError
from presets import AIRPLANE_WORD, get_preset, presets_frame
from reports import dumps
from yoccoz_app import main, parse_parameter


def test_parse_parameter():
    assert parse_parameter('-1') == complex(-1, 0)
    assert parse_parameter('-0.12+0.74i') == complex(-0.12, 0.74)
    with pytest.raises(ArgumentError):
        parse_parameter('abc')


def test_presets():
    airplane = get_preset('airplane')
    assert airplane.word == AIRPLANE_WORD
    assert airplane.is_real and (airplane.q, airplane.n) == (2, 1)
    assert airplane.reproduces()
    assert get_preset('basilica').satellite
    with pytest.raises(ArgumentError):
        get_preset('dragon')
    named = presets_frame(include_real=False)
    assert 'rabbit' in set(named['name'])


def test_presets_command(capsys):
    assert main(['presets', '--list', '--named-only']) == EXIT_OK
    assert 'airplane' in capsys.readouterr().out


def test_usage_errors(capsys):
    print("=" * 80)
    print("TEST: EXIT CODES")
    print("=" * 80)
    assert main(['rays', '--c=-1', '--angles', '1/0']) == EXIT_USAGE
    assert main(['verify', '--check', 'pi-bounds', '--preset', 'airplane']) == EXIT_USAGE
    assert main(['verify', '--check', 'fixtures', '--c=-1']) == EXIT_USAGE
    assert main(['nest', '--c=-1', '--preset', 'airplane']) == EXIT_USAGE
    assert main(['nest']) == EXIT_USAGE
    assert main(['nest', '--preset', 'nowhere']) == EXIT_USAGE
    assert main(['nest', '--preset', 'rabbit', '--oracle', 'real']) == EXIT_USAGE
    assert '❌' in capsys.readouterr().err
    print("✓ usage errors exit with 2")


def test_nest_report(tmp_path):
    out = tmp_path / 'nest.json'
    assert main(['nest', '--preset', 'airplane', '--oracle', 'real', '--horizon', '12', '--out', str(out)]) == EXIT_OK
    report = json.loads(out.read_text(encoding='utf-8'))
    assert report['schema'] == 'yoccoz-nest/1'
    assert report['parameter']['name'] == 'airplane'
    level = report['tower'][0]
    assert level['nest']['period'] == 3
    assert level['nest']['depths'] == [3, 6]
    assert level['return_record']['max_gap'] == 3
    assert not (tmp_path / 'nest.json.tmp').exists()


def test_unwritable_output(tmp_path):
    out = tmp_path / 'missing' / 'nest.json'
    assert main(['nest', '--preset', 'airplane', '--oracle', 'real', '--out', str(out)]) == EXIT_IO


def test_render_rays(tmp_path):
    out = tmp_path / 'rays.svg'
    assert main(['render', '--kind', 'rays', '--c=-1', '--angles', '1/3,2/3', '--out', str(out)]) == EXIT_OK
    text = out.read_text(encoding='utf-8')
    assert '<svg' in text
    assert main(['render', '--kind', 'rays', '--c=-1', '--angles', '1/3', '--out', str(out)]) == EXIT_OK
    assert out.read_text(encoding='utf-8') != text


def test_verify_report_is_reproducible(tmp_path, monkeypatch):
    monkeypatch.delenv('YOCCOZ_CACHE_DIR', raising=False)
    args = ['verify', '--preset', 'airplane', '--set', 'q_max=3', '--set', 'grid_cells=48',
            '--set', 'grid_refine=96']
    first, second = tmp_path / 'first.json', tmp_path / 'second.json'
    assert main(args + ['--out', str(first)]) == EXIT_OK
    assert main(args + ['--out', str(second)]) == EXIT_OK
    assert first.read_bytes() == second.read_bytes()
    report = json.loads(first.read_text(encoding='utf-8'))
    assert report['parameter']['name'] == 'airplane'
    assert any(v['name'] == 'covering-level-1' for v in report['verdicts'])


def test_json_is_deterministic():
    report = {'b': math.inf, 'a': [complex(1, -2), float('nan')], 'c': 0.1}
    text = dumps(report)
    assert text == dumps(dict(reversed(list(report.items()))))
    data = json.loads(text)
    assert list(data) == ['a', 'b', 'c']
    assert data['b'] == 'inf'
    assert data['a'] == [{'im': -2.0, 're': 1.0}, 'nan']
    assert data['c'] == 0.1


if __name__ == '__main__':
    sys.exit(pytest.main([__file__, '-v']))
