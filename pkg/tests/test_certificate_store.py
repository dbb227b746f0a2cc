#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
certificate_store 测试
"""

import json

import pytest

from certificate_store import STAGE_STATUSES, CertificateStore


@pytest.fixture
def store(tmp_path):
    return CertificateStore(str(tmp_path / 'out' / 'certificate.json'))


def test_start_run_creates_file(store):
    run_id = store.start_run('S,W,NE', 'kreweras', ['count', 'kernel', 'exact'])
    assert run_id == store.run_id
    assert store.certificate_file.exists()
    data = json.loads(store.certificate_file.read_text(encoding='utf-8'))
    assert data['run']['status'] == 'running'
    assert set(data['stages']) == {'count', 'kernel', 'exact'}
    assert data['statistics']['pending'] == 3
    assert set(data['statistics']) == set(STAGE_STATUSES)


def test_stage_transitions(store):
    store.start_run('S,W,NE', 'kreweras', ['count', 'kernel', 'exact'])
    store.start_stage('count')
    assert store.data['stages']['count']['status'] == 'running'
    store.mark_completed('count', {'passed': True})
    store.mark_failed('kernel', 'residual at t^3')
    store.mark_skipped('exact', 'series mode')
    stats = store.data['statistics']
    assert (stats['completed'], stats['failed'], stats['skipped'], stats['pending']) == (1, 1, 1, 0)
    assert store.failed_stages() == ['kernel']
    # 计划外的阶段也会被记录
    store.mark_completed('side_checks')
    assert 'side_checks' in store.data['stages']


def test_save_and_load(store):
    store.start_run('E,W,NE,SW', 'gessel', ['count'])
    store.mark_completed('count', {'passed': True})
    store.set_certificate({'steps': 'E,W,NE,SW', 'verified': True, 'mode': 'series'})
    store.end_run('completed')

    again = CertificateStore.load(str(store.certificate_file))
    assert again.run_id == store.run_id
    assert again.get_certificate()['verified']
    assert again.data['run']['status'] == 'completed'
    assert again.data['run']['completed_at'] is not None


def test_load_rejects_other_json(tmp_path):
    path = tmp_path / 'other.json'
    path.write_text(json.dumps({'files': []}), encoding='utf-8')
    with pytest.raises(ValueError):
        CertificateStore.load(str(path))
    with pytest.raises(FileNotFoundError):
        CertificateStore.load(str(tmp_path / 'missing.json'))


def test_export_summary(store, tmp_path):
    store.start_run('S,W,NE', 'kreweras', ['count', 'kernel'])
    store.mark_completed('count')
    store.mark_failed('kernel', 'boom')
    store.set_certificate({
        'mode': 'series', 'mode_requested': 'exact', 'verified': False,
        'candidates': {'x0': {'gens': ['T', 't', 'x'], 'poly': 'T-1'}},
        'evidence': {'count': {'passed': True}},
        'caveats': ['downgraded'],
    })
    out = tmp_path / 'summary.txt'
    store.export_summary(str(out))
    text = out.read_text(encoding='utf-8')
    assert 'S,W,NE' in text
    assert '错误: boom' in text
    assert 'downgraded' in text
    assert 'T-1' in text


def test_print_summary(store, capsys):
    store.start_run('NE', 'diagonal', ['count'])
    store.set_certificate({'mode': 'exact', 'mode_requested': 'exact', 'verified': True, 'caveats': []})
    store.print_summary()
    out = capsys.readouterr().out
    assert '已验证' in out
    assert 'diagonal' in out
