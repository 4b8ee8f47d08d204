"""Noisy Grover search: exact simulation, fault-ignorant schedules, bounds."""

from .analytics import (
    RatePoint,
    crossing_p_asymptotic,
    k_opt,
    lemma1_gap,
    lemma2_sandwich,
    lower_bound_exclusion,
    lower_bound_memoryless,
    p_success_depol_exact,
    p_success_lower,
    p_success_noiseless,
    rate,
    thm1_bounds,
    zalka_explicit_bound,
)
from .harness import (
    AnalyticRun,
    BoundReport,
    MCEstimate,
    SweepRow,
    analytic_run,
    mc_estimate,
    verify_appendix_c,
    verify_bounds,
    wilson_interval,
)
from .noise import NoiseKind, NoiseModel, apply_noise
from .schedulers import (
    Provenance,
    Schedule,
    schedule_alg1,
    schedule_alg2,
    schedule_classical,
    schedule_dp,
    schedule_iterative,
    schedule_known_p,
)
from .simulator import (
    DensityState,
    RoundResult,
    RunOutcome,
    SymmetricDephasingState,
    SymmetricDepolarizingState,
    grover_round_exact,
    grover_round_fastpath_dephasing,
    mc_trial,
    round_success_probability,
)

__version__ = "0.1.0"
