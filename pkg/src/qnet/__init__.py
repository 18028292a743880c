"""Quantum walks, spectral entropies, and percolation tools for complex networks."""

from .config import DEFAULT_TOLS, Tolerances
from .errors import (
    ConvergenceError,
    DisconnectedGraphError,
    GraphFormatError,
    IntegrationInstabilityError,
    QnetError,
    SupportViolationWarning,
    SymmetryError,
)
from .graphs import (
    BipartiteResult,
    Edge,
    Graph,
    GoogleMatrix,
    OperatorBundle,
    adjacency_matrix,
    build_graph,
    build_operators,
    connected_components,
    fiedler_map,
    google_matrix,
    graph_from_json,
    graph_to_json,
    is_bipartite,
    is_connected,
    load_edge_list,
    stochastic_eigenmodes,
    to_edge_list,
)
from .linalg import (
    EigenDecomposition,
    Trajectory,
    expm_hermitian,
    hermitian_eig,
    integrate_master_equation,
    lindblad_rhs,
    matrix_function_hermitian,
)
from .walks import (
    ChiralTransportReport,
    OccupationResult,
    WalkSpec,
    chiral_transport_report,
    evolve,
    long_time_average,
    quantumness,
    uniform_superposition,
)
from .ranking import (
    RankingResult,
    adiabatic_rank,
    classical_pagerank,
    interpolated_rank,
    qsw_activity,
    rank_hamiltonian,
    szegedy_rank,
    szegedy_state_prep,
    szegedy_step_matrix,
)
from .entropy import (
    DensityMatrix,
    ErdosRenyiModel,
    LayerClustering,
    LayerStack,
    aggregate_layers,
    density_propagator,
    density_rescaled,
    js_distance,
    js_divergence,
    kl_divergence,
    layer_cluster,
    log_likelihood,
    make_density,
    vn_entropy,
)
from .communities import (
    ClosenessMatrix,
    Partition,
    agglomerate,
    closeness_fidelity,
    closeness_link_failure,
    closeness_long_time_transport,
    closeness_short_time_transport,
    magnetic_laplacian,
    magnetic_partition,
)
from .percolation import (
    CepResult,
    ClusterStats,
    EmergenceResult,
    LinkState,
    QubitState,
    bond_percolation,
    bond_percolation_curve,
    cep_lattice,
    contains_subgraph,
    estimate_spanning_crossing,
    sample_quantum_random_graph,
    singlet_conversion_probability,
    subgraph_emergence,
)
from . import toys

__version__ = "0.1.0"
