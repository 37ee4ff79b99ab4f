"""Exact probabilities of fixed-cardinality determinantal processes on a
finite ground set, and an oracle-backed verifier for the correlation
identities of their not-superset-conditioned variants."""

from .exterior import (
    KVector,
    PluckerVector,
    compound2,
    gram_cross_inner,
    gram_norm_sq,
    inner,
    plucker_coords,
    wedge,
    wedge_columns,
)
from .process import (
    ConditioningError,
    EnumerationCapError,
    Frame,
    ProcessDistribution,
    SubsetEventSpec,
    condition_not_superset,
    condition_off_point,
    condition_on_point,
    counterexample_frame,
    elementary_prob,
    enumerate_distribution,
    inclusion_prob,
    is_rank2_determinantal_certificate,
    prob_event,
    sample,
    sample_many,
)
from .subspaces import (
    CaseClassification,
    JordanDecomposition,
    align_leading_coordinates,
    classify_case,
    jordan_angles,
    pair_containment_stats,
)
from .identities import (
    N2Certificate,
    SkipInstance,
    VerificationReport,
    build_M,
    build_matrices,
    verify_appendix,
    verify_block_diagonal,
    verify_chain_formula,
    verify_compound_identity,
    verify_degenerate,
    verify_lemma3,
    verify_n1_identity,
    verify_n2_equal,
    verify_n2_unequal,
    verify_oracle_marginals,
    verify_plucker,
    verify_reduction_step,
    verify_remark1,
    verify_restricted,
    verify_theorem1,
)
from .harness import (
    CampaignConfig,
    CampaignResult,
    canonical_n1_frame,
    complete_frame,
    identity_ids,
    instance_rng,
    random_frame,
    replay_instance,
    run_campaign,
)

__version__ = "0.1.0"
