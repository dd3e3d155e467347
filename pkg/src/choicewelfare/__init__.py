"""Utilitarian welfare analysis of choice-restricting policies for
boundedly rational populations.

The package evaluates policies that restrict, mandate, or nudge the options
of a heterogeneous population whose members may fail to pick their best
option: it computes choice probabilities under several behavior models,
population welfare and regret, optimal choice sets by exhaustive search,
welfare curves and their crossings along a rationality scale, and the value
of decentralizing a binary treatment decision to imperfectly informed
agents.
"""

from ._kernels import active_backend, warm_up
from .document import (
    MCConfig,
    PopulationSection,
    ScenarioDocument,
    ScenarioError,
    SweepConfig,
    bundled_scenario_text,
    document_to_json_dict,
    load_bundled_scenario,
    parse_scenario,
    parse_scenario_text,
    serialize_scenario,
)
from .models import (
    AlphaRational,
    ChoiceModel,
    ChoiceProbabilities,
    DefaultNudge,
    ErrorSpec,
    GumbelIID,
    IndependentTable,
    Logit,
    NormalIID,
    RandomUtilityMC,
    RationalMax,
    UniformBoundedIID,
    binary_scaled_choice_prob,
    choice_probabilities,
    sample_errors,
)
from .scenario import (
    ActionSet,
    HotellingScenario,
    Population,
    UtilityType,
    build_population,
    hotelling_population,
)
from .search import (
    Crossing,
    OptimizeResult,
    SweepGrid,
    SweepResult,
    enumerate_choice_sets,
    find_crossings,
    optimize_choice_set,
    sweep_logit,
)
from .treatment import (
    GUIDELINE_RISK_THRESHOLD,
    TREATMENT_A,
    TREATMENT_B,
    BeliefModel,
    BetaBelief,
    CovariateCell,
    DecentralizedOutcome,
    EmpiricalBelief,
    InformationValue,
    MandateOutcome,
    MixtureBelief,
    OutcomeUtilities,
    PointMassBelief,
    TreatmentReport,
    TreatmentScenario,
    UniformBelief,
    XCell,
    XReport,
    aggregate_outcome_prob,
    belief_choice_prob,
    belief_q_map,
    bounded_rational_welfare_x,
    build_report,
    compare_policies_x,
    expected_outcome_utility,
    optimal_decentralized_x,
    optimal_mandate_x,
    subjective_choice,
    threshold_probability,
    value_of_information,
)
from .welfare import (
    LogitSensitivities,
    MandateResult,
    ParetoVerdict,
    PerTypeEvaluation,
    PolicyEvaluation,
    alpha_welfare_closed_form,
    bounded_error_welfare_bound,
    expected_utilities,
    idealized_optimum,
    logit_sensitivities,
    mean_utility_bound,
    optimal_mandate,
    policy_welfare,
    stochastic_pareto_compare_binary,
)

__version__ = "0.1.0"

__all__ = [
    "GUIDELINE_RISK_THRESHOLD",
    "TREATMENT_A",
    "TREATMENT_B",
    "ActionSet",
    "AlphaRational",
    "BeliefModel",
    "BetaBelief",
    "ChoiceModel",
    "ChoiceProbabilities",
    "CovariateCell",
    "Crossing",
    "DecentralizedOutcome",
    "DefaultNudge",
    "EmpiricalBelief",
    "ErrorSpec",
    "GumbelIID",
    "HotellingScenario",
    "IndependentTable",
    "InformationValue",
    "Logit",
    "LogitSensitivities",
    "MandateOutcome",
    "MandateResult",
    "MCConfig",
    "MixtureBelief",
    "NormalIID",
    "OptimizeResult",
    "OutcomeUtilities",
    "ParetoVerdict",
    "PerTypeEvaluation",
    "PointMassBelief",
    "PolicyEvaluation",
    "Population",
    "PopulationSection",
    "RandomUtilityMC",
    "RationalMax",
    "ScenarioDocument",
    "ScenarioError",
    "SweepConfig",
    "SweepGrid",
    "SweepResult",
    "TreatmentReport",
    "TreatmentScenario",
    "UniformBelief",
    "UniformBoundedIID",
    "UtilityType",
    "XCell",
    "XReport",
    "active_backend",
    "aggregate_outcome_prob",
    "alpha_welfare_closed_form",
    "belief_choice_prob",
    "belief_q_map",
    "binary_scaled_choice_prob",
    "bounded_error_welfare_bound",
    "bounded_rational_welfare_x",
    "build_population",
    "build_report",
    "bundled_scenario_text",
    "choice_probabilities",
    "compare_policies_x",
    "document_to_json_dict",
    "enumerate_choice_sets",
    "expected_outcome_utility",
    "expected_utilities",
    "find_crossings",
    "hotelling_population",
    "idealized_optimum",
    "load_bundled_scenario",
    "logit_sensitivities",
    "mean_utility_bound",
    "optimal_decentralized_x",
    "optimal_mandate",
    "optimal_mandate_x",
    "optimize_choice_set",
    "parse_scenario",
    "parse_scenario_text",
    "policy_welfare",
    "sample_errors",
    "serialize_scenario",
    "stochastic_pareto_compare_binary",
    "subjective_choice",
    "sweep_logit",
    "threshold_probability",
    "value_of_information",
    "warm_up",
]
