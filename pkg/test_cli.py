"""Tests for GraphFile parsing, the qgraph command line script, reports and the fixture pack."""
# To run: pytest -s -v --tb=short test_cli.py

import json

import numpy as np
import pytest

from qgraph.algebra import make_quantum_space
from qgraph.errors import OneFormViolation, ParseError
from qgraph.graph import complete_adjacency, random_qg
from qgraph_cli import (EXIT_DISAGREEMENT, EXIT_DISCONNECTED, EXIT_INVALID, EXIT_OK, main)
from scripts.build_fixture_pack import build_pack, fixture_documents, verify_pack
from utils.graph_file import (FILE_VERSION, classical_document, dump_document, encode_matrix,
                              graph_to_document, parse_graph_document, parse_graph_file,
                              parse_graph_text)
from utils.report_manager import revalidate_report

TWO_TRIANGLES = [[0, 1, 1, 0, 0, 0], [1, 0, 1, 0, 0, 0], [1, 1, 0, 0, 0, 0],
                 [0, 0, 0, 0, 1, 1], [0, 0, 0, 1, 0, 1], [0, 0, 0, 1, 1, 0]]


def write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(dump_document(doc) if isinstance(doc, dict) else doc, encoding='utf-8')
    return path


def run(capsys, argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


# GraphFile parsing

def test_classical_document_round_trip():
    graph = parse_graph_document(classical_document(TWO_TRIANGLES))
    assert graph.space.blocks == (1,) * 6
    assert np.allclose(graph.adjacency.mat, TWO_TRIANGLES)


def test_adjacency_document_round_trip():
    graph = random_qg(3, 2, seed=7)
    parsed = parse_graph_document(graph_to_document(graph))
    assert np.allclose(parsed.adjacency.mat, graph.adjacency.mat)
    assert parsed.flags == graph.flags


def test_kraus_document():
    doc = {'version': FILE_VERSION, 'blocks': [2],
           'kraus': [{'from': 0, 'to': 0, 'operators': [encode_matrix(np.eye(2))]}]}
    graph = parse_graph_document(doc)
    assert np.allclose(graph.adjacency.mat, np.eye(4))


@pytest.mark.parametrize("doc, position", [
    ({'version': 'qgraph/0', 'blocks': [1], 'classical': [[0]]}, '/version'),
    ({'version': FILE_VERSION, 'blocks': [1]}, ''),
    ({'version': FILE_VERSION, 'blocks': [1], 'classical': [[0]], 'adjacency': [[0]]}, ''),
    ({'version': FILE_VERSION, 'blocks': [0], 'adjacency': [[0]]}, '/blocks'),
    ({'version': FILE_VERSION, 'blocks': [2], 'classical': [[0]]}, '/blocks'),
    ({'version': FILE_VERSION, 'blocks': [2], 'adjacency': [[1, 0], [0, 1]]}, '/adjacency'),
    ({'version': FILE_VERSION, 'blocks': [1], 'adjacency': [["x"]]}, '/adjacency/0/0'),
    ({'version': FILE_VERSION, 'blocks': [1], 'tolerance': -1, 'adjacency': [[1]]}, '/tolerance'),
    ({'version': FILE_VERSION, 'blocks': [1, 1],
      'kraus': [{'from': 0, 'to': 2, 'operators': []}]}, '/kraus/0/to'),
])
def test_parse_errors_carry_position(doc, position):
    with pytest.raises(ParseError) as info:
        parse_graph_document(doc)
    assert info.value.position == position


def test_syntax_error_reports_line_and_column():
    with pytest.raises(ParseError) as info:
        parse_graph_text('{\n  "version": "qgraph/1",\n  "blocks": [1\n}')
    assert info.value.position.startswith('line 4')


def test_density_must_be_a_one_form():
    doc = {'version': FILE_VERSION, 'blocks': [2], 'rho': [[[2, 0], [0, 3]]],
           'adjacency': encode_matrix(np.eye(4))}
    with pytest.raises(OneFormViolation):
        parse_graph_document(doc)
    doc['normalize'] = True
    assert not parse_graph_document(doc).flags['tracial']


# Command line script

def test_validate_classical(tmp_path, capsys):
    path = write(tmp_path, 'c4.json', classical_document(
        [[0, 1, 0, 1], [1, 0, 1, 0], [0, 1, 0, 1], [1, 0, 1, 0]]))
    code, report = run(capsys, ['validate', path])
    assert code == EXIT_OK
    assert report['verdicts'] == {'valid': True}
    assert report['flags']['undirected'] is True
    assert len(report['input_digest']) == 64


def test_validate_rejects_scaled_complete_graph(tmp_path, capsys):
    space = make_quantum_space([2])
    doc = {'version': FILE_VERSION, 'blocks': [2],
           'adjacency': encode_matrix(2 * complete_adjacency(space).mat)}
    code, report = run(capsys, ['validate', write(tmp_path, 'k2.json', doc)])
    assert code == EXIT_INVALID
    assert report['verdicts'] == {'valid': False}
    assert report['residuals']['schur_idempotence'] > 1.0


def test_invalid_inputs_exit_two(tmp_path, capsys):
    assert run(capsys, ['validate', write(tmp_path, 'bad.json', '{"version": ')])[0] == EXIT_INVALID
    assert run(capsys, ['validate', tmp_path / 'missing.json'])[0] == EXIT_INVALID
    doc = {'version': FILE_VERSION, 'blocks': [2], 'rho': [[[2, 0], [0, 3]]],
           'adjacency': encode_matrix(np.eye(4))}
    assert run(capsys, ['validate', write(tmp_path, 'rho.json', doc)])[0] == EXIT_INVALID


def test_connectivity_certificate_revalidates(tmp_path, capsys):
    path = write(tmp_path, 'two.json', classical_document(TWO_TRIANGLES))
    code, report = run(capsys, ['connectivity', path, '--cross-check'])
    assert code == EXIT_DISCONNECTED
    assert report['verdicts']['connected'] is False
    assert report['verdicts']['agreement'] is True
    assert report['certificates']['kernel_dimension'] == 2
    residuals = revalidate_report(report, parse_graph_file(path))
    assert residuals and max(residuals.values()) < 1e-8


def test_random_then_connectivity(tmp_path, capsys):
    path = tmp_path / 'qg.json'
    assert run(capsys, ['random', 3, 2, '--seed', 7, '--out', path])[0] == EXIT_OK
    graph = parse_graph_file(path)
    assert np.array_equal(graph.adjacency.mat, random_qg(3, 2, seed=7).adjacency.mat)
    assert json.loads(path.read_text())['generator'] == {'model': 'QG', 'n': 3, 'd': 2, 'seed': 7}
    code, report = run(capsys, ['connectivity', path, '--method', 'choi-support'])
    assert code == EXIT_OK
    assert report['verdicts']['method'] == 'choi_support'
    assert report['certificates']['support_full'] is True


def test_random_rejects_bad_dimension(capsys):
    assert run(capsys, ['random', 2, 4])[0] == EXIT_INVALID


def test_random_without_seed_records_a_replayable_seed(tmp_path, capsys):
    path = tmp_path / 'qg.json'
    assert run(capsys, ['random', 3, 2, '--out', path])[0] == EXIT_OK
    seed = json.loads(path.read_text())['generator']['seed']
    assert isinstance(seed, int)
    replayed = random_qg(3, 2, seed=seed)
    assert np.array_equal(parse_graph_file(path).adjacency.mat, replayed.adjacency.mat)


def test_spectrum_report(tmp_path, capsys):
    path = write(tmp_path, 'c4.json', classical_document(
        [[0, 1, 0, 1], [1, 0, 1, 0], [0, 1, 0, 1], [1, 0, 1, 0]]))
    code, report = run(capsys, ['spectrum', path])
    assert code == EXIT_OK
    vals = [complex(*v) for v in report['certificates']['eigenvalues']]
    assert np.allclose(vals, [2, 0, 0, -2])
    assert report['certificates']['regularity'] == pytest.approx(2.0)
    residuals = revalidate_report(report, parse_graph_file(path))
    assert max(residuals.values()) < 1e-8


def test_bipartite_report(tmp_path, capsys):
    even = write(tmp_path, 'c4.json', classical_document(
        [[0, 1, 0, 1], [1, 0, 1, 0], [0, 1, 0, 1], [1, 0, 1, 0]]))
    code, report = run(capsys, ['bipartite', even])
    assert code == EXIT_OK and report['verdicts'] == {'bipartite': True}
    assert report['residuals']['block_p'] < 1e-8
    assert report['residuals']['block_complement'] < 1e-8
    assert revalidate_report(report, parse_graph_file(even))['bipartition'] < 1e-8

    odd = write(tmp_path, 'c5.json', fixture_documents()['classical_c5'])
    code, report = run(capsys, ['bipartite', odd])
    assert code == EXIT_OK and report['verdicts'] == {'bipartite': False}


def test_components_report(tmp_path, capsys):
    path = write(tmp_path, 'two.json', classical_document(TWO_TRIANGLES))
    code, report = run(capsys, ['components', path])
    assert code == EXIT_OK and report['verdicts']['components'] == 2
    residuals = revalidate_report(report, parse_graph_file(path))
    assert max(residuals.values()) < 1e-8


def test_reports_are_deterministic(tmp_path, capsys):
    path = write(tmp_path, 'two.json', classical_document(TWO_TRIANGLES))
    reports = []
    for name in ('first.json', 'second.json'):
        assert main(['connectivity', str(path), '--out', str(tmp_path / name)]) == EXIT_DISCONNECTED
        report = json.loads((tmp_path / name).read_text())
        report.pop('timings')
        reports.append(report)
    assert reports[0] == reports[1]


def test_disagreement_exit_code(tmp_path, capsys, monkeypatch):
    import qgraph.connectivity as connectivity
    monkeypatch.setattr(connectivity, 'laplacian_nullity', lambda graph, rtol=None: 1)
    path = write(tmp_path, 'two.json', classical_document(TWO_TRIANGLES))
    assert run(capsys, ['connectivity', path, '--cross-check'])[0] == EXIT_DISAGREEMENT


# Fixture pack

def test_fixture_pack(tmp_path):
    build_pack(tmp_path / 'pack')
    assert verify_pack(tmp_path / 'pack') == []
    target = tmp_path / 'pack' / 'classical_c4.json'
    target.write_text(target.read_text() + " ")
    assert verify_pack(tmp_path / 'pack') == ['classical_c4.json']


@pytest.mark.parametrize("name, expected", [
    ('classical_c4', EXIT_OK), ('classical_p3', EXIT_OK),
    ('classical_two_triangles', EXIT_DISCONNECTED), ('complete_m2', EXIT_OK),
    ('trivial_m2', EXIT_DISCONNECTED), ('complete_m2_c', EXIT_OK),
    ('trivial_m2_c', EXIT_DISCONNECTED), ('qg_3_2_seed7', EXIT_OK), ('qg_4_5_seed11', EXIT_OK),
])
def test_fixtures_cross_check(tmp_path, capsys, name, expected):
    path = write(tmp_path, f'{name}.json', fixture_documents()[name])
    code, report = run(capsys, ['connectivity', path, '--cross-check'])
    assert code == expected
    residuals = revalidate_report(report, parse_graph_file(path))
    assert all(value < 1e-8 for value in residuals.values())
