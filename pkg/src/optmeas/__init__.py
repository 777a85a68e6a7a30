"""Risk-based optimality and admissibility of quantum measurements on finite parameter grids."""
from .admissibility import (
    bregman_average_improvement,
    dominate_refineable,
    dominate_uninformative,
    find_refinability,
    is_uninformative,
    lift_estimator,
    refine_measurement,
)
from .bayes import (
    BayesSolution,
    Prior,
    average_state_moments,
    bayes_risk,
    bayes_risk_terms,
    posterior_mean_estimator,
    solve_bayes_measurement,
)
from .estimation import (
    Dominance,
    Estimator,
    LossFunction,
    RiskProfile,
    bregman_loss,
    custom_bregman,
    dominates_pair,
    kullback_leibler,
    least_squares,
    measurement_preorder_bruteforce,
    risk,
    risk_profile,
    transfer_estimator,
)
from .optimality import (
    additive_bound,
    certify,
    check_additive_risk_gap,
    local_bound,
    multiplicative_bound,
    no_go_witness,
    optimal_measurement_for_classical,
)
from .quantum import (
    Classical,
    KrausMeasurement,
    NotClassical,
    ParametrisedState,
    Povm,
    classicality_certificate,
    d_max,
    helstrom_measurement,
    outcome_distribution,
    post_measurement_state,
    trace_norm,
    validate_state,
)
from .scenarios import ScenarioSpec, build_scenario, mach_zehnder, mz_measurements
from .tolerances import DEFAULT as DEFAULT_TOLERANCES
from .tolerances import Tolerances

__version__ = "0.1.0"
