"""M^X/G/1 queues with general vacation modes.

Thin bindings over the C++ core: analytic decomposition, CTMC oracle and
regenerative simulation.
"""

from ._core import (
    BatchLaw,
    DiagnosticFailure,
    RateSequence,
    ServiceLaw,
    StabilityError,
    TransferLaw,
    Vacation,
    WorkingMode,
    a_coefficients,
    analyze_scenario,
    chain_bdp_rates,
    conditional_busy_law,
    cycle_quantities,
    decomposition,
    hypergeometric_pfq,
    mm1_disaster_rho,
    normalize_scenario,
    oracle,
    recursive_working_probs,
    simulate,
    transfer_law,
    vacation_e_b0,
)

__version__ = "0.1.0"
