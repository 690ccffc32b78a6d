"""Generic rigidity of planar periodic frameworks from colored quotient graphs."""

from .colored_graph import (
    ClosedWalk,
    ColoredEdge,
    ColoredGraph,
    ColorVector,
    DevelopmentReport,
    EdgeSubset,
    components,
    develop_window,
    fundamental_cycles,
    rho_of_walk,
    sublattice_cover,
    z2_rank,
)
from .direction_network import (
    DirectionAssignment,
    EdgeStatus,
    FaithfulRealization,
    build_P_system,
    collapsed_realization,
    edge_status,
    faithful_realization,
    realization_kernel,
)
from .errors import (
    BudgetError,
    DomainError,
    GenericitySamplingError,
    InternalConsistencyError,
    ParseError,
    PerigidError,
    StructuralError,
)
from .fileio import parse_colored_graph, serialize_colored_graph
from .linear_rep import (
    PRIME,
    GenericAssignment,
    NaturalMatrix,
    RankReport,
    Realization,
    build_natural_matrix,
    kernel_float,
    rank_mod_p,
    sample_assignment,
    verify_determinant_formulas,
)
from .rigidity import (
    OneDVerdict,
    RigidityVerdict,
    decide_rigidity,
    generic_rigidity_rank,
    is_1d_rigid,
    rigid_realization_certificate,
    rigidity_matrix,
)
from .sparsity import (
    BruteForceReport,
    CircuitReport,
    CountReport,
    Decomposition,
    brute_force_sparsity,
    classify_11k_shape,
    count_report,
    decompose_two_11k,
    f_value,
    find_laman_circuit,
    is_11k,
    is_222_graph,
    is_222_sparse,
    is_colored_laman,
    is_colored_laman_sparse,
    is_f_independent,
    is_ross,
    max_laman_sparse_subset,
    union_independent,
)

__version__ = "0.1.0"
