"""Classical dynamics of the dragged, parametrically driven oscillator."""

from .dynamics import (
    ClassicalTrajectory,
    ErmakovSolution,
    ForcingTerm,
    FrequencyProgram,
    SuppressionResult,
    adiabatic_rho_mu,
    constant_freq_rho,
    energy_transfer,
    fit_constant_frequency,
    general_solution,
    greens_particular,
    quanta_transferred,
    solve_ermakov,
    suppression_amplitude_first_order,
    suppression_amplitude_general,
)
from .faddeeva import erf_complex
from .suppression import (
    ErfRecipe,
    SymmetrySplit,
    analytic_erf_suppression,
    analytic_sine_suppression,
    approximate_trajectory,
    asymptotic_suppression,
    criterion_threshold,
    erf_criterion_transport,
    erf_endpoint_term,
    first_sustained,
    ht_expansion,
    ideal_transfer_integral,
    suppression_amplitude_ideal,
    symmetry_split_suppression,
)

__all__ = [
    "ClassicalTrajectory",
    "ErfRecipe",
    "ErmakovSolution",
    "ForcingTerm",
    "FrequencyProgram",
    "SuppressionResult",
    "SymmetrySplit",
    "adiabatic_rho_mu",
    "analytic_erf_suppression",
    "analytic_sine_suppression",
    "approximate_trajectory",
    "asymptotic_suppression",
    "constant_freq_rho",
    "criterion_threshold",
    "energy_transfer",
    "erf_complex",
    "erf_criterion_transport",
    "erf_endpoint_term",
    "first_sustained",
    "fit_constant_frequency",
    "general_solution",
    "greens_particular",
    "ht_expansion",
    "ideal_transfer_integral",
    "quanta_transferred",
    "solve_ermakov",
    "suppression_amplitude_first_order",
    "suppression_amplitude_general",
    "suppression_amplitude_ideal",
    "symmetry_split_suppression",
]
