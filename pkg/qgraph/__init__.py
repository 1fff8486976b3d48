"""Quantum graphs on finite-dimensional quantum spaces: validation, connectivity and spectra."""

from qgraph.algebra import (Projection, QuantumSpace, functional, gram_gns, gram_kms,
                            make_quantum_space, modular_map, mult_adjoint,
                            multiplication_map, random_quantum_space)
from qgraph.connectivity import (ConnectivityReport, Homomorphism, HomomorphismCheck,
                                 burnside_generates, choi_support_sequence, connected,
                                 connected_components, is_irreducible, kernel_algebra,
                                 laplacian_nullity, reducibility_residuals, reducing_projection,
                                 verify_homomorphism)
from qgraph.errors import QuantumGraphError
from qgraph.graph import (QuantumGraph, adjacency_from_bimodule, complete_graph,
                          from_classical, random_graph, random_operator_system,
                          random_qg, trivial_graph, validate)
from qgraph.spectral import (bipartite_block_residuals, is_bipartite, operator_norm_gns,
                             perron_frobenius, regularity, spectrum)
from qgraph.superop import (ChoiMatrix, OperatorSystem, SuperOperator, adjoint_gns,
                            adjoint_kms, choi, choi_abstract, is_completely_positive,
                            kms_implementation, kraus_from_choi, kraus_operators,
                            schur_product, transpose)
