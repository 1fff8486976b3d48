"""
GraphFile reading and writing.

A GraphFile is a JSON document describing one quantum graph:

    {
      "version": "qgraph/1",
      "blocks": [2, 1],
      "rho": [[[...], ...], [[...]]],          optional, per-block densities
      "normalize": false,                       optional
      "tolerance": 1e-9,                        optional
      "adjacency" | "kraus" | "classical": ...  exactly one
      "generator": {"model": "QG", ...}         optional, informational
    }

Complex entries are written as [re, im] pairs; a bare number is read as a real
entry. Structural errors are reported with a JSON pointer, syntax errors with
the line and column of the decoder.
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from qgraph.algebra import QuantumSpace, make_quantum_space
from qgraph.errors import ParseError
from qgraph.graph import QuantumGraph, adjacency_from_bimodule, from_classical, validate
from qgraph.superop import OperatorSystem

FILE_VERSION = "qgraph/1"
SOURCES = ('adjacency', 'kraus', 'classical')


def encode_scalar(value: complex) -> List[float]:
    value = complex(value)
    return [float(value.real), float(value.imag)]


def encode_matrix(mat: np.ndarray) -> List[List[List[float]]]:
    return [[encode_scalar(v) for v in row] for row in np.atleast_2d(mat)]


def encode_element(space: QuantumSpace, x: np.ndarray) -> List[List[List[List[float]]]]:
    """Element of M as its list of blocks."""
    return [encode_matrix(b) for b in space.to_blocks(x)]


def decode_scalar(value: Any, pointer: str) -> complex:
    if isinstance(value, bool):
        raise ParseError("Expected a number or an [re, im] pair", pointer)
    if isinstance(value, (int, float)):
        return complex(value)
    if (isinstance(value, list) and len(value) == 2
            and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)):
        return complex(value[0], value[1])
    raise ParseError("Expected a number or an [re, im] pair", pointer)


def decode_matrix(data: Any, pointer: str, shape: Optional[Tuple[int, int]] = None) -> np.ndarray:
    """Decode a row-major matrix, checking the shape when one is given."""
    if not isinstance(data, list) or not data or not all(isinstance(row, list) for row in data):
        raise ParseError("Expected a non-empty list of rows", pointer)
    width = len(data[0])
    for i, row in enumerate(data):
        if len(row) != width:
            raise ParseError(f"Row has {len(row)} entries, expected {width}", f"{pointer}/{i}")
    mat = np.array([[decode_scalar(v, f"{pointer}/{i}/{j}") for j, v in enumerate(row)]
                    for i, row in enumerate(data)], dtype=complex)
    if shape is not None and mat.shape != tuple(shape):
        raise ParseError(f"Matrix has shape {mat.shape}, expected {tuple(shape)}", pointer)
    return mat


def decode_element(space: QuantumSpace, data: Any, pointer: str) -> np.ndarray:
    if not isinstance(data, list) or len(data) != len(space.blocks):
        raise ParseError(f"Expected {len(space.blocks)} blocks", pointer)
    return space.from_blocks([decode_matrix(b, f"{pointer}/{a}", (n, n))
                              for a, (b, n) in enumerate(zip(data, space.blocks))])


def _decode_blocks(doc: Dict) -> List[int]:
    blocks = doc.get('blocks')
    if (not isinstance(blocks, list) or not blocks
            or not all(isinstance(n, int) and not isinstance(n, bool) and n >= 1 for n in blocks)):
        raise ParseError("Blocks must be a non-empty list of positive integers", "/blocks")
    return blocks


def _decode_kraus(space: QuantumSpace, data: Any) -> OperatorSystem:
    if not isinstance(data, list):
        raise ParseError("Expected a list of block-pair entries", "/kraus")
    count = len(space.blocks)
    blocks = {}
    for k, entry in enumerate(data):
        pointer = f"/kraus/{k}"
        if not isinstance(entry, dict) or not {'from', 'to', 'operators'} <= set(entry):
            raise ParseError("Entries need 'from', 'to' and 'operators'", pointer)
        a, b = entry['from'], entry['to']
        for key, index in (('from', a), ('to', b)):
            if not isinstance(index, int) or isinstance(index, bool) or not 0 <= index < count:
                raise ParseError(f"Block index out of range 0..{count - 1}", f"{pointer}/{key}")
        if (a, b) in blocks:
            raise ParseError(f"Duplicate block pair ({a}, {b})", pointer)
        ops = entry['operators']
        if not isinstance(ops, list):
            raise ParseError("Expected a list of operators", f"{pointer}/operators")
        shape = (space.blocks[b], space.blocks[a])
        blocks[(a, b)] = tuple(decode_matrix(op, f"{pointer}/operators/{i}", shape)
                               for i, op in enumerate(ops))
    return OperatorSystem(space, blocks)


def parse_graph_document(doc: Any, tol: float = None) -> QuantumGraph:
    """
    Build and validate the quantum graph described by a decoded GraphFile.

    Raises:
        ParseError: The document is malformed.
        QuantumGraphError: The described graph fails validation.
    """
    if not isinstance(doc, dict):
        raise ParseError("A GraphFile must be a JSON object", "")
    if doc.get('version') != FILE_VERSION:
        raise ParseError(f"Unsupported version {doc.get('version')!r}, expected {FILE_VERSION!r}",
                         "/version")
    present = [key for key in SOURCES if key in doc]
    if len(present) != 1:
        raise ParseError(f"Exactly one of {', '.join(SOURCES)} is required, found {present}", "")
    if tol is None and 'tolerance' in doc:
        tol = doc['tolerance']
        if isinstance(tol, bool) or not isinstance(tol, (int, float)) or tol <= 0:
            raise ParseError("Tolerance must be a positive number", "/tolerance")
        tol = float(tol)

    blocks = _decode_blocks(doc)
    if present[0] == 'classical':
        adj = decode_matrix(doc['classical'], "/classical")
        if blocks != [1] * adj.shape[0] or adj.shape[0] != adj.shape[1]:
            raise ParseError("Classical graphs need blocks of size 1, one per vertex", "/blocks")
        if 'rho' in doc:
            raise ParseError("Classical graphs use the counting measure", "/rho")
        if np.any(adj.imag != 0):
            raise ParseError("Classical entries must be real", "/classical")
        return from_classical(adj.real, tol)

    rho = None
    if 'rho' in doc:
        if not isinstance(doc['rho'], list) or len(doc['rho']) != len(blocks):
            raise ParseError(f"Expected {len(blocks)} densities", "/rho")
        rho = [decode_matrix(r, f"/rho/{a}", (n, n)) for a, (r, n) in enumerate(zip(doc['rho'], blocks))]
    normalize = doc.get('normalize', False)
    if not isinstance(normalize, bool):
        raise ParseError("normalize must be true or false", "/normalize")
    space = make_quantum_space(blocks, rho, normalize=normalize, tol=tol)

    if present[0] == 'adjacency':
        mat = decode_matrix(doc['adjacency'], "/adjacency", (space.dim, space.dim))
        return validate(space, mat, tol)
    system = _decode_kraus(space, doc['kraus'])
    return validate(space, adjacency_from_bimodule(space, system, tol), tol)


def parse_graph_text(text: str, tol: float = None) -> QuantumGraph:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, f"line {e.lineno}, column {e.colno}") from e
    return parse_graph_document(doc, tol)


def parse_graph_file(path: Path, tol: float = None) -> QuantumGraph:
    with open(path, 'r', encoding='utf-8') as f:
        return parse_graph_text(f.read(), tol)


def graph_to_document(graph: QuantumGraph, generator: Optional[Dict] = None) -> Dict:
    """GraphFile document carrying the adjacency matrix of a graph."""
    space = graph.space
    doc = {
        'version': FILE_VERSION,
        'blocks': list(space.blocks),
        'rho': [encode_matrix(r) for r in space.rho],
        'tolerance': graph.tol,
        'adjacency': encode_matrix(graph.adjacency.mat),
    }
    if generator is not None:
        doc['generator'] = generator
    return doc


def classical_document(adj: Sequence[Sequence[int]]) -> Dict:
    adj = [[int(v) for v in row] for row in adj]
    return {'version': FILE_VERSION, 'blocks': [1] * len(adj), 'classical': adj}


def dump_document(doc: Dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"
