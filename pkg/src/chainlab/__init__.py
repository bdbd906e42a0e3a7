"""Random multiparametric simplicial complexes, rigid expansions and chain patterns."""

from chainlab._backend import BACKEND
from chainlab.complex import (
    ComplexBuilder,
    SimplicialComplex,
    adj,
    exterior_faces,
    f_vector,
    flag_completion,
    full_skeleton,
    graph,
    induced_subcomplex,
    parse_complex,
    read_complex,
    write_complex,
)
from chainlab.errors import StructureError, VertexNotFoundError
from chainlab.expansion import ExpansionTrace, expand_once, expand_to_fixpoint, is_seed, uniquely_determined
from chainlab.expectation import (
    ExpectationReport,
    MCEstimate,
    log_expected_CH,
    log_expected_clique_embeddings,
    log_pattern_probability,
    mc_estimate,
    taylor_tail,
)
from chainlab.model import ConditionReport, ModelParams, check_conditions, psi, sample_complex, sandwich_probability
from chainlab.pattern import (
    DEFAULT_STAR,
    PatternPair,
    StarPattern,
    adjacency_graph,
    build_pattern,
    count_pattern_occurrences,
    exchangeable,
    intersection_one,
    intersection_zero,
    is_closed_chain,
    separates_torus,
)

__version__ = "0.1.0"
