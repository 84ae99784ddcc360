"""Pair correlation functions for exclusion processes on lattices and graphs."""
from .graph import (
    GeneralLattice,
    build_distance_matrix,
    graph_pcf,
    grid_to_graph,
    lattice_from_grid,
    pair_counts_from_matrix,
)
from .lattice import (
    BoundaryKind,
    Dims,
    DistanceDomain,
    LatticeError,
    MetricKind,
    OccupancyGrid,
    TessellationKind,
    agents,
    density,
    distance_domain,
    make_grid,
    occupy,
)
from .metrics import (
    annular_bin_counts,
    count_agent_pairs,
    neighbor_list,
    pair_distance,
    rectilinear_counts,
)
from .norms import (
    expected_annular,
    expected_pairs,
    expected_rectilinear,
    site_pairs_analytic,
)
from .oracle import brute_site_pairs, verify_normalization
from .patterns import (
    gen_aggregated,
    gen_deterministic_pattern,
    gen_proliferation,
    gen_segregated,
    gen_uniform_random,
    gen_voronoi_lattice,
)
from .pcf import (
    PcfProfile,
    annular_profile,
    average_profiles,
    first_minimum,
    pcf_profile,
    rectilinear_profile,
)

__version__ = "0.1.0"
