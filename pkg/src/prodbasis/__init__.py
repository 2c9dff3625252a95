"""Distinguishing orthogonal product bases by local operations and classical communication."""

from .basis import (BasisFormatError, NotOrthogonalError, ProductBasis, ProductState,
                    ValidationReport, load_basis, make_basis, parse_basis, product_inner,
                    product_state, serialize, validate)
from .bounds import (BoundReport, RoundOperators, binary_entropy, deficit_bound, info_ceiling,
                     max_overlap, weak_round_bound)
from .catalog import CatalogEntry, builtin, random_distinguishable
from .distinguish import (Core, Distinguishable, Leaf, Node, NotDistinguishable, OrthoGraph,
                          Outcome, decide, find_split, party_graph, simulate_protocol,
                          split_trace)
from .extension import ExtensionResult, Status, classify, find_extension
from .linalg import (DimensionError, eig_hermitian, inner, orthogonal_complement, polar_left,
                     polar_right, rank)
from .measurement import (CreatesOverlap, Eliminates, LocalOperator, PreservesOrthogonality,
                          Proportional, apply_local, check_povm, classify_action, epsilon,
                          posterior)

__version__ = "0.1.0"
