#!/usr/bin/env python3
"""
Build a directory of GraphFile fixtures with a checksum manifest
"""

import json
import sys
from pathlib import Path

import numpy as np

from qgraph.algebra import make_quantum_space
from qgraph.graph import complete_graph, random_qg, trivial_graph
from utils.graph_file import classical_document, dump_document, graph_to_document
from utils.report_manager import calculate_checksum

PACK_VERSION = "1"


def _cycle(n):
    adj = np.zeros((n, n), dtype=int)
    for i in range(n):
        adj[i, (i + 1) % n] = adj[(i + 1) % n, i] = 1
    return adj


def _path(n):
    adj = np.zeros((n, n), dtype=int)
    for i in range(n - 1):
        adj[i, i + 1] = adj[i + 1, i] = 1
    return adj


def _two_triangles():
    adj = np.zeros((6, 6), dtype=int)
    adj[:3, :3] = _cycle(3)
    adj[3:, 3:] = _cycle(3)
    return adj


def fixture_documents():
    """Name -> GraphFile document for every fixture in the pack"""
    tracial_m2 = make_quantum_space([2])
    skewed = make_quantum_space([2, 1], [np.diag([2.0, 3.0]), np.eye(1)], normalize=True)
    documents = {
        'classical_c4': classical_document(_cycle(4)),
        'classical_c5': classical_document(_cycle(5)),
        'classical_p3': classical_document(_path(3)),
        'classical_two_triangles': classical_document(_two_triangles()),
        'complete_m2': graph_to_document(complete_graph(tracial_m2)),
        'trivial_m2': graph_to_document(trivial_graph(tracial_m2)),
        'complete_m2_c': graph_to_document(complete_graph(skewed)),
        'trivial_m2_c': graph_to_document(trivial_graph(skewed)),
    }
    for n, d, seed in ((3, 2, 7), (4, 5, 11)):
        generator = {'model': 'QG', 'n': n, 'd': d, 'seed': seed}
        documents[f'qg_{n}_{d}_seed{seed}'] = graph_to_document(random_qg(n, d, seed), generator)
    return documents


def build_pack(directory="fixtures"):
    """Write every fixture and manifest.json into directory"""
    pack_dir = Path(directory)
    pack_dir.mkdir(parents=True, exist_ok=True)

    print(f"📦 Building fixture pack in {pack_dir}")

    manifest = {"version": PACK_VERSION, "files": {}}
    for name, doc in fixture_documents().items():
        path = pack_dir / f"{name}.json"
        with open(path, 'w', encoding='utf-8') as f:
            f.write(dump_document(doc))
        manifest["files"][path.name] = {
            "size": path.stat().st_size,
            "checksum": calculate_checksum(path)
        }
        print(f"  ✓ Added {path.name}")

    manifest_path = pack_dir / "manifest.json"
    with open(manifest_path, 'w', encoding='utf-8') as f:
        json.dump(manifest, f, indent=2, sort_keys=True)

    print(f"\n✅ Fixture pack written: {len(manifest['files'])} files")
    return manifest_path


def verify_pack(directory="fixtures"):
    """Return the names whose checksum differs from the manifest (empty when intact)"""
    pack_dir = Path(directory)
    with open(pack_dir / "manifest.json", 'r', encoding='utf-8') as f:
        manifest = json.load(f)
    mismatched = []
    for name, entry in manifest["files"].items():
        path = pack_dir / name
        if not path.is_file() or calculate_checksum(path) != entry["checksum"]:
            mismatched.append(name)
    return mismatched


if __name__ == "__main__":
    target = sys.argv[1] if len(sys.argv) > 1 else "fixtures"
    build_pack(target)
    bad = verify_pack(target)
    if bad:
        print(f"❌ Checksum mismatch: {', '.join(bad)}")
        sys.exit(1)
