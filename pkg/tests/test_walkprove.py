#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
命令行入口测试
"""

import json

import pytest

import walkprove
from exactarith import format_poly
from walk_models import KrewerasModel


@pytest.fixture(autouse=True)
def workdir(tmp_path, monkeypatch):
    """日志与输出写到临时目录"""
    monkeypatch.chdir(tmp_path)
    return tmp_path


def test_count_end_point(capsys):
    assert walkprove.main(['count', '--steps', 'W,S,NE', '--n', '9', '--end', '0,0']) == 0
    assert capsys.readouterr().out.strip() == '192'


def test_count_sequence(capsys):
    assert walkprove.main(['count', '-s', 'E,W,NE,SW', '-n', '8', '--sequence']) == 0
    assert capsys.readouterr().out.strip() == '1,0,2,0,11,0,85,0,782'


def test_count_slice(capsys):
    assert walkprove.main(['count', '-s', 'N,S,E,W', '-n', '2']) == 0
    out = capsys.readouterr().out
    assert '长度 2' in out


def test_usage_errors(capsys):
    assert walkprove.main(['count', '--steps', 'N,XX', '--n', '3']) == 2
    assert walkprove.main(['count', '--steps', 'N', '--n', '-1']) == 2
    assert walkprove.main(['recheck', '--certificate', 'missing.json']) == 2
    assert walkprove.main(['--config', 'missing.json', 'count', '--n', '1']) == 2
    assert walkprove.main([]) == 2
    assert walkprove.main(['frobnicate']) == 2


def test_dump_config(capsys):
    assert walkprove.main(['--dump-config']) == 0
    lines = capsys.readouterr().out.splitlines()
    assert 'verify.mode=series' in lines
    assert 'walks.steps=W,S,NE' in lines
    assert 'paths.primes_file=' in lines


def test_config_file_overrides(workdir):
    (workdir / 'config.json').write_text(json.dumps({'walks': {'steps': 'NE', 'N': 7},
                                                     'verify': {'mode': 'exact'}}), encoding='utf-8')
    config = walkprove.load_config(None)
    cfg = walkprove.RunConfig.from_dict(config)
    assert (cfg.steps, cfg.N, cfg.mode) == ('NE', 7, 'exact')
    assert cfg.max_main_degree == 8
    with pytest.raises(FileNotFoundError):
        walkprove.load_config('nowhere.json')


def test_parse_primes():
    assert walkprove._parse_primes(None, [5, 7]) == [5, 7]
    assert walkprove._parse_primes('3:12', []) == [3, 5, 7, 11]
    assert walkprove._parse_primes('3, 5,7', []) == [3, 5, 7]
    assert walkprove._parse_primes('', [5]) == []


def test_pcurv(capsys):
    code = walkprove.main(['pcurv', '--operator-text', '(1-4*t)*Dt+2', '--primes', '3,5,7'])
    assert code == 0
    out = capsys.readouterr().out
    assert '非零' not in out
    assert out.count(': 零') == 3


def test_pcurv_requires_operator(capsys):
    assert walkprove.main(['pcurv', '--primes', '3']) == 2


def test_guess_excursions(workdir, capsys):
    out_file = workdir / 'guess.json'
    code = walkprove.main(['guess', '-s', 'W,S,NE', '--section', '00', '--N', '60', '-o', str(out_file)])
    assert code == 0
    data = json.loads(out_file.read_text(encoding='utf-8'))
    assert data['steps'] == 'S,W,NE'
    assert data['digits'] >= 2


KREWERAS_TEXT = format_poly(KrewerasModel().known_polynomials()['U'])


def _small_prove_config(workdir):
    settings = {'verify': {'kernel_N': 20, 'uniqueness_N': 20, 'pcurv_primes': [5, 7]}}
    (workdir / 'config.json').write_text(json.dumps(settings), encoding='utf-8')


def test_prove_with_candidate(workdir, capsys):
    _small_prove_config(workdir)
    candidate = workdir / 'candidate.txt'
    candidate.write_text(KREWERAS_TEXT, encoding='utf-8')
    cert_file = workdir / 'cert.json'
    code = walkprove.main(['prove', '-s', 'W,S,NE', '--N', '30', '--candidate', str(candidate),
                           '--certificate', str(cert_file)])
    assert code == 0
    assert (workdir / 'output' / 'certificate_summary.txt').exists()
    assert walkprove.main(['recheck', '--certificate', str(cert_file)]) == 0


def test_prove_corrupted_candidate_exits_1(workdir, capsys):
    _small_prove_config(workdir)
    candidate = workdir / 'candidate.txt'
    candidate.write_text(KREWERAS_TEXT + "+t^11", encoding='utf-8')
    code = walkprove.main(['prove', '-s', 'W,S,NE', '--N', '30', '--candidate', str(candidate),
                           '--certificate', str(workdir / 'cert.json')])
    assert code == 1
    data = json.loads((workdir / 'cert.json').read_text(encoding='utf-8'))
    assert not data['certificate']['verified']


def test_prove_rejects_malformed_unknown_candidate(workdir):
    assert walkprove.main(['prove', '-s', 'W,S,NE', '--unknown-candidate', 'U']) == 2


def test_verify_section_reaches_proof_config(workdir):
    _small_prove_config(workdir)
    cfg = walkprove.RunConfig.from_dict(walkprove.load_config(None))
    assert (cfg.kernel_N, cfg.uniqueness_N, cfg.max_verify_N) == (20, 20, 0)
    pcfg = cfg.proof_config()
    assert (pcfg.kernel_N, pcfg.uniqueness_N, pcfg.max_verify_N) == (20, 20, 0)
