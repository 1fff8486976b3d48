"""
Report Manager Module

This module builds, writes and re-validates the machine-readable reports
produced by the qgraph command line script.

The ReportManager class handles:
- Structured JSON logging for every run
- Input checks before a graph file is parsed
- SHA-256 digests of the input bytes
- Report assembly with deterministic key order

revalidate_report() feeds every certificate of a report back through the
library and returns the residual of its defining identity.
"""

import hashlib
import json
import logging
import os
import sys
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np

from qgraph.connectivity import (kms_commutation_residual, reducibility_residuals,
                                 strong_residual)
from qgraph.algebra import Projection
from qgraph.graph import QuantumGraph
from qgraph.spectral import (bipartite_block_residuals, bipartite_residuals,
                             operator_system_residual)
from utils.graph_file import decode_element, decode_scalar, encode_matrix

REPORT_VERSION = "qgraph-report/1"


def calculate_checksum(filepath: Path) -> str:
    """Calculate SHA256 checksum of a file"""
    sha256_hash = hashlib.sha256()
    with open(filepath, "rb") as f:
        for byte_block in iter(lambda: f.read(4096), b""):
            sha256_hash.update(byte_block)
    return sha256_hash.hexdigest()


def _jsonable(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return encode_matrix(value) if value.ndim == 2 else [_jsonable(v) for v in value]
    if isinstance(value, (np.bool_, np.integer, np.floating)):
        return value.item()
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


class ReportManager:
    """Manage logging, input checks and report output for one command"""

    def __init__(self, command: str = 'run', log_dir: str = 'logs'):
        self.command = command
        self.log_dir = Path(log_dir)
        self.handler = None
        self.setup_logging()

    def setup_logging(self):
        """Configure structured logging for the library loggers"""
        self.log_dir.mkdir(exist_ok=True)

        # One log file per run
        timestamp = datetime.now().strftime('%Y%m%d_%H%M%S')
        log_file = self.log_dir / f'qgraph_{self.command}_{timestamp}.json'

        self.logger = logging.getLogger('qgraph')
        self.handler = logging.FileHandler(log_file)

        # Log format for easy parsing
        formatter = logging.Formatter(
            '{"timestamp": "%(asctime)s", "level": "%(levelname)s", '
            '"module": "%(name)s", "message": "%(message)s"}'
        )
        self.handler.setFormatter(formatter)
        self.logger.addHandler(self.handler)
        self.logger.setLevel(os.getenv('QGRAPH_LOG_LEVEL', 'INFO').upper())

    def close(self):
        if self.handler is not None:
            self.logger.removeHandler(self.handler)
            self.handler.close()
            self.handler = None

    def input_checks(self, path: Path) -> bool:
        """Perform checks on the input file before parsing"""
        checks = {
            'input_exists': path.exists(),
            'input_is_file': path.is_file(),
            'input_readable': os.access(path, os.R_OK),
        }

        for check, result in checks.items():
            if not result:
                self.logger.error("Input check failed: %s", check)
                return False

        self.logger.info("All input checks passed for %s", path)
        return True

    def build_report(self, digest: str, flags: Dict, residuals: Dict, verdicts: Dict,
                     certificates: Dict, timings: Dict) -> Dict:
        """Assemble a report; timing values stay under 'timings' only"""
        return {
            'version': REPORT_VERSION,
            'command': self.command,
            'input_digest': digest,
            'flags': flags,
            'residuals': residuals,
            'verdicts': verdicts,
            'certificates': certificates,
            'timings': timings,
        }

    def write_report(self, report: Dict, out: Optional[Path] = None) -> str:
        """Write the report to out, or to standard output"""
        text = json.dumps(report, sort_keys=True, indent=2, default=_jsonable) + "\n"
        if out is None:
            sys.stdout.write(text)
        else:
            with open(out, 'w', encoding='utf-8') as f:
                f.write(text)
            self.logger.info("Report written to %s", out)
        return text


def _projection(graph: QuantumGraph, data: Any, pointer: str) -> Projection:
    return Projection(graph.space, decode_element(graph.space, data, pointer))


def revalidate_report(report: Dict, graph: QuantumGraph) -> Dict[str, float]:
    """
    Re-check every certificate of a report against the graph it was computed for.

    Returns:
        Dict: Residual of the defining identity per certificate, e.g.
            'reducing_projection', 'witness', 'components/0', 'perron_frobenius',
            'bipartition', 'regularity'.
    """
    space = graph.space
    certificates = report.get('certificates', {})
    residuals = {}

    if 'reducing_projection' in certificates:
        p = _projection(graph, certificates['reducing_projection'], '/certificates/reducing_projection')
        residuals['reducing_projection'] = (kms_commutation_residual(graph, p) if graph.undirected
                                            else strong_residual(graph, p))
        residuals['reducing_projection/idempotent'] = p.residual()

    if 'witness' in certificates:
        p = _projection(graph, certificates['witness'], '/certificates/witness')
        residuals['witness'] = max(reducibility_residuals(graph.adjacency, p).values())

    if 'components' in certificates:
        total = np.zeros(space.dim, dtype=complex)
        for k, data in enumerate(certificates['components']):
            p = _projection(graph, data, f'/certificates/components/{k}')
            residuals[f'components/{k}'] = kms_commutation_residual(graph, p)
            total = total + p.coords
        residuals['components/sum'] = space.norm(total - space.unit())

    # connectivity reports carry the Perron-Frobenius flags without the vector
    if 'vector' in certificates.get('perron_frobenius', {}):
        data = certificates['perron_frobenius']
        x = decode_element(space, data['vector'], '/certificates/perron_frobenius/vector')
        r = float(data['r'])
        residuals['perron_frobenius'] = float(np.linalg.norm(graph.kms.mat @ x - r * x))

    if 'bipartition' in certificates:
        p = _projection(graph, certificates['bipartition'][0], '/certificates/bipartition/0')
        residuals['bipartition'] = max(max(bipartite_residuals(graph, p).values()),
                                       max(bipartite_block_residuals(graph, p).values()),
                                       operator_system_residual(graph, p))

    if certificates.get('regularity') is not None:
        d = float(certificates['regularity'])
        unit = space.unit()
        residuals['regularity'] = space.norm(graph.adjacency(unit) - d * unit)

    if 'eigenvalues' in certificates and graph.undirected:
        vals = np.array([decode_scalar(v, f'/certificates/eigenvalues/{k}')
                         for k, v in enumerate(certificates['eigenvalues'])])
        expected = np.linalg.eigvalsh((graph.kms.mat + graph.kms.mat.conj().T) / 2)[::-1]
        residuals['eigenvalues'] = float(np.max(np.abs(vals - expected)))
    return residuals
