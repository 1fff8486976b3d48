"""
Command line front end for the quantum graph toolkit.

Reads GraphFiles, runs validation, connectivity, bipartiteness, spectral and
component checks, and writes JSON reports with certificates to --out or to
standard output. Status lines go to standard error.

Exit codes: 0 success or connected, 1 disconnected (connectivity), 2 invalid
input, 3 disagreement between connectivity methods.
"""

# Standard library imports
import argparse
import logging
import os
import sys
import time
from pathlib import Path

# Third-party imports
import numpy as np
from dotenv import load_dotenv

from qgraph.connectivity import connected, connected_components
from qgraph.errors import MethodDisagreement, NotSchurIdempotent, ParseError, QuantumGraphError
from qgraph.graph import random_qg
from qgraph.spectral import (bipartite_block_residuals, bipartite_residuals,
                             gns_bipartition_residual, is_bipartite, operator_norm_gns,
                             operator_system_residual, regularity, spectrum)
from utils.graph_file import dump_document, encode_element, encode_scalar, graph_to_document, parse_graph_file
from utils.report_manager import ReportManager, calculate_checksum

# Load environment variables (from .env or system environment)
load_dotenv()

EXIT_OK, EXIT_DISCONNECTED, EXIT_INVALID, EXIT_DISAGREEMENT = 0, 1, 2, 3

METHOD_CHOICES = ('auto', 'irreducibility', 'laplacian', 'burnside', 'choi-support', 'spectral')

# Paths
LOGS_DIR = Path(os.getenv("QGRAPH_LOG_DIR", str(Path(__file__).parent / "logs")))
LOGS_DIR.mkdir(exist_ok=True)  # Create the logs dir if missing

# Configure logging
LOG_FILE = str(LOGS_DIR / "qgraph.log")

logging.basicConfig(
    filename=LOG_FILE,
    level=logging.INFO,
    format="%(asctime)s - %(levelname)s - [Graph: %(graph)s] - %(log_msg)s",
    datefmt="%Y-%m-%d %H:%M:%S"
)


class GraphContext(logging.Filter):
    """Fill the graph and log_msg fields for records from library loggers."""

    def filter(self, record: logging.LogRecord) -> bool:
        if not hasattr(record, 'graph'):
            record.graph = record.name
        if not hasattr(record, 'log_msg'):
            record.log_msg = record.getMessage()
        return True


for _handler in logging.getLogger().handlers:
    _handler.addFilter(GraphContext())


def log_message(msg, graph=None, level="info"):
    """Log messages with timestamp and the graph file they concern."""
    log_data = {"graph": graph or "-", "log_msg": msg}

    if level == "error":
        logging.error(msg, extra=log_data)
    elif level == "warning":
        logging.warning(msg, extra=log_data)
    else:
        logging.info(msg, extra=log_data)


def status(msg):
    print(msg, file=sys.stderr)


def _projection_payload(projection):
    return None if projection is None else encode_element(projection.space, projection.coords)


# Commands

def cmd_validate(args):
    graph = parse_graph_file(args.path, args.tol)
    status(f"✅ Valid quantum graph on blocks {list(graph.space.blocks)}")
    return graph, graph.flags, dict(graph.residuals), {'valid': True}, {}, EXIT_OK


def cmd_connectivity(args):
    graph = parse_graph_file(args.path, args.tol)
    method = args.method.replace('-', '_')
    report = connected(graph, method, cross_check=args.cross_check, tol=args.tol)
    certificates = {
        'reducing_projection': _projection_payload(report.projection),
        'kernel_dimension': report.kernel_dimension,
        'laplacian_nullity': report.laplacian_nullity,
        'burnside_dimension': report.burnside_dimension,
        'support_ranks': report.support_ranks,
        'support_full': report.support_full,
        'perron_frobenius': report.perron_frobenius,
    }
    if report.witness is not None:
        certificates['witness'] = _projection_payload(report.witness)
    certificates = {k: v for k, v in certificates.items() if v is not None}
    verdicts = dict(report.verdicts, connected=report.connected, method=report.method,
                    agreement=report.agreement)
    if report.connected:
        status(f"✅ Connected ({report.method})")
    else:
        status(f"❌ Disconnected ({report.method})")
    code = EXIT_OK if report.connected else EXIT_DISCONNECTED
    return graph, graph.flags, dict(report.residuals), verdicts, certificates, code


def cmd_bipartite(args):
    graph = parse_graph_file(args.path, args.tol)
    flag, parts = is_bipartite(graph, args.tol)
    residuals, certificates = {}, {}
    if flag:
        p1, p2 = parts
        certificates['bipartition'] = [_projection_payload(p1), _projection_payload(p2)]
        residuals = bipartite_residuals(graph, p1)
        residuals.update(bipartite_block_residuals(graph, p1))
        residuals['operator_system'] = operator_system_residual(graph, p1)
        if graph.gns_symmetric:
            residuals['gns_bipartition'] = gns_bipartition_residual(graph, p1)
    status(f"{'✅' if flag else 'ℹ️'} Bipartite: {flag}")
    return graph, graph.flags, residuals, {'bipartite': flag}, certificates, EXIT_OK


def cmd_spectrum(args):
    graph = parse_graph_file(args.path, args.tol)
    data = spectrum(graph)
    certificates = {
        'eigenvalues': [encode_scalar(v) for v in data.eigenvalues],
        'regularity': regularity(graph, args.tol),
        'operator_norm_gns': operator_norm_gns(graph),
    }
    if data.pf_vector is not None:
        certificates['perron_frobenius'] = {
            'r': data.top,
            'vector': encode_element(graph.space, data.pf_vector),
            'simple': data.simple,
            'strictly_positive': data.strictly_positive,
        }
    status(f"ℹ️ Top eigenvalue {data.top:.6g}, simple: {data.simple}")
    return graph, graph.flags, {'perron_frobenius': data.residual}, {}, certificates, EXIT_OK


def cmd_components(args):
    graph = parse_graph_file(args.path, args.tol)
    components = connected_components(graph, central=args.central, seed=args.seed)
    certificates = {'components': [_projection_payload(p) for p in components]}
    status(f"ℹ️ {len(components)} component(s)")
    verdicts = {'components': len(components), 'central': args.central}
    return graph, graph.flags, {}, verdicts, certificates, EXIT_OK


def draw_seed() -> int:
    """Fresh 32-bit seed from OS entropy, recorded so the sample can be replayed."""
    return int(np.random.SeedSequence().entropy % 2 ** 32)


def cmd_random(args):
    """Sample QG(n, d) and write a replayable GraphFile."""
    seed = args.seed if args.seed is not None else draw_seed()
    graph = random_qg(args.n, args.d, seed, args.tol)
    generator = {'model': 'QG', 'n': args.n, 'd': args.d, 'seed': seed}
    text = dump_document(graph_to_document(graph, generator))
    if args.out is None:
        sys.stdout.write(text)
    else:
        with open(args.out, 'w', encoding='utf-8') as f:
            f.write(text)
        status(f"✅ Wrote QG({args.n}, {args.d}) sample to {args.out}")
    log_message(f"Sampled QG({args.n}, {args.d}) with seed {seed}")
    return EXIT_OK


COMMANDS = {
    'validate': cmd_validate,
    'connectivity': cmd_connectivity,
    'bipartite': cmd_bipartite,
    'spectrum': cmd_spectrum,
    'components': cmd_components,
}


def build_parser():
    parser = argparse.ArgumentParser(prog='qgraph', description="Quantum graph checks")
    sub = parser.add_subparsers(dest='command', required=True)

    def file_command(name, help_text):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument('path', type=Path, help="GraphFile to read")
        cmd.add_argument('--tol', type=float, default=None, help="Identity tolerance")
        cmd.add_argument('--out', type=Path, default=None, help="Report path (default: stdout)")
        return cmd

    file_command('validate', "Validate a graph file and report its flags")
    conn = file_command('connectivity', "Decide connectivity with certificates")
    conn.add_argument('--method', choices=METHOD_CHOICES, default='auto')
    conn.add_argument('--cross-check', action='store_true',
                      help="Run every applicable method and require agreement")
    file_command('bipartite', "Detect -lambda and extract a bipartition")
    file_command('spectrum', "Eigenvalues, Perron-Frobenius data and regularity")
    comp = file_command('components', "Connected components as projections")
    comp.add_argument('--central', action='store_true', help="Minimal central projections")
    comp.add_argument('--seed', type=int, default=0)

    rand = sub.add_parser('random', help="Sample QG(n, d)")
    rand.add_argument('n', type=int)
    rand.add_argument('d', type=int)
    rand.add_argument('--seed', type=int, default=None, help="Seed (default: drawn and recorded)")
    rand.add_argument('--tol', type=float, default=None)
    rand.add_argument('--out', type=Path, default=None)
    return parser


def run_file_command(args):
    manager = ReportManager(args.command, LOGS_DIR)
    name = str(args.path)
    try:
        if not manager.input_checks(args.path):
            status(f"❌ Cannot read {args.path}")
            log_message("Input checks failed", graph=name, level="error")
            return EXIT_INVALID
        digest = calculate_checksum(args.path)
        status(f"⏳ Running {args.command} on {args.path}")
        start = time.perf_counter()
        try:
            _, flags, residuals, verdicts, certificates, code = COMMANDS[args.command](args)
        except NotSchurIdempotent as e:
            # still report the failing residual
            elapsed = time.perf_counter() - start
            report = manager.build_report(digest, {}, {'schur_idempotence': e.residual},
                                          {'valid': False}, {}, {'total_seconds': elapsed})
            manager.write_report(report, args.out)
            status(f"❌ {e}")
            log_message(str(e), graph=name, level="error")
            return EXIT_INVALID
        elapsed = time.perf_counter() - start
        report = manager.build_report(digest, flags, residuals, verdicts, certificates,
                                      {'total_seconds': elapsed})
        manager.write_report(report, args.out)
        log_message(f"{args.command} finished with exit code {code}", graph=name)
        return code
    finally:
        manager.close()


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == 'random':
            return cmd_random(args)
        return run_file_command(args)
    except MethodDisagreement as e:
        status(f"❌ Methods disagree: {e}")
        log_message(str(e), graph=str(getattr(args, 'path', '-')), level="error")
        return EXIT_DISAGREEMENT
    except ParseError as e:
        status(f"❌ Parse error at {e.position}: {e}")
        log_message(str(e), graph=str(getattr(args, 'path', '-')), level="error")
        return EXIT_INVALID
    except (QuantumGraphError, OSError) as e:
        status(f"❌ {type(e).__name__}: {e}")
        log_message(f"{type(e).__name__}: {e}", graph=str(getattr(args, 'path', '-')), level="error")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
