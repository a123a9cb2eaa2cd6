"""Exact and asymptotic randomness of riffle-shuffled decks with repeated cards."""

from .asymptotics import (
    KappaResult,
    ThetaDistribution,
    c1,
    cut_sweep,
    expected_asc_minus_des,
    kappa1_approx,
    kappa1_distinct,
    kappa1_enum,
    kappabar1,
    kappabar1_enum,
    theta,
    theta_distribution,
)
from .deck import (
    BudgetExceeded,
    Composition,
    CompositionMismatch,
    Deck,
    PatternError,
    StatMatrix,
    ZMatrix,
    count_digraphs,
    count_pairs,
    cut,
    enumerate_orbit,
    lattice_path,
    make_pattern,
    parse_pattern,
    w_matrix,
    w_stat,
    z_matrix,
    z_stat,
)
from .exact import (
    descent_polynomial,
    error_bound,
    eulerian,
    shuffle_prob_distinct,
    transition_prob,
    transition_sets,
    tv_distinct,
    tv_fixed_source,
    tv_fixed_target,
)
from .simulate import ShuffleSampler, estimate_tv, gof_test, sample_a_shuffle, shuffle_deck

__version__ = "0.1.0"
