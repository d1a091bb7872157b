"""Planar tanglegrams, disjoint triangulation pairs, and their flip graph:
exact counting, exact and MCMC uniform sampling, spectral diagnostics."""

__version__ = "0.1.0"

from .counting import (
    CountTable,
    build_count_table,
    compute_irreducible_counts,
    compute_planar_counts,
    convolution_powers,
    count_by_core,
    count_extensions,
    verify_against_bruteforce,
)
from .duality import (
    RotationResult,
    irreducible_layouts,
    layout_to_pair,
    pair_to_layout,
    rotate,
    rotation_graph_isomorphic,
    rotation_sites,
)
from .errors import (
    CacheCorrupt,
    CapExceeded,
    ConfigError,
    DiagonalAbsent,
    Disconnected,
    DivisibilityViolation,
    InvalidNode,
    NotDisjoint,
    NotIrreducible,
    NotPlanarLayout,
    OutOfRange,
    SizeMismatch,
    TablesMissing,
    TangleflipError,
    UnknownCategory,
)
from .flipgraph import (
    FlipGraph,
    InducedTriGraph,
    SpectralReport,
    build_flip_graph,
    diameter,
    find_triangle,
    induced_disjoint_graph,
    is_connected,
    path_to_fan,
    spectral_report,
)
from .polygon import (
    Diagonal,
    DisjointPair,
    FlipMove,
    Triangulation,
    count_disjoint_pairs,
    crosses,
    enumerate_disjoint_pairs,
    enumerate_triangulations,
    fan,
    flip_pair,
    flip_single,
    legal_moves,
    neighbors,
    quad_of,
)
from .sampling import (
    ChiSquareResult,
    RandomStream,
    SampleTrace,
    SamplerConfig,
    chi_square_uniformity,
    random_walk_step,
    sample_composition,
    sample_core_size,
    sample_irreducible_layout_exact,
    sample_irreducible_layout_mcmc,
    sample_planar_tanglegram,
    sample_size_two_blocks,
)
from .tanglegram import (
    Layout,
    PlaneTree,
    SubtanglegramSpan,
    Tanglegram,
    canonicalize,
    crossings,
    enumerate_tanglegrams,
    irr,
    is_planar,
    proper_subtanglegrams,
    size_two_tanglegram,
    substitute,
    unit_tanglegram,
    zero_crossing_layouts,
)
