"""Python bindings for the zeno projector-dynamics core."""

from ._zeno import (
    HermiticityError,
    ImpossibleOutcome,
    Scenario,
    ScenarioError,
    ValidationError,
    ZenoError,
    convergence_sweep,
    expm_skew_hermitian,
    factorization_defects,
    fit_order,
    integrate,
    load_scenario,
    parse_scenario,
    run_conditional,
    run_sampled,
    verify,
)

__all__ = [
    "HermiticityError",
    "ImpossibleOutcome",
    "Scenario",
    "ScenarioError",
    "ValidationError",
    "ZenoError",
    "convergence_sweep",
    "expm_skew_hermitian",
    "factorization_defects",
    "fit_order",
    "integrate",
    "load_scenario",
    "parse_scenario",
    "run_conditional",
    "run_sampled",
    "verify",
]
