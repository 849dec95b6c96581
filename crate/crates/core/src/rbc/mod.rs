//! The real business cycle model and its solution by parametric policy
//! iteration.
//!
//! The value function is parameterized as `v(k, z) = x2 + x3 ln y` and the
//! policy as `k' = x1 y`. [`classical_ppi`] alternates closed-form policy
//! updates with least-squares valuation, [`combinatorial_ppi`] and
//! [`hybrid_ppi`] replace the valuation step by a search over encoded
//! parameters, and [`multi_anneal_ppi`] and [`one_shot_ppi`] anneal the
//! merged policy-plus-valuation problem built by [`MergedProblem`].

mod merged;
mod model;
mod pbo;
mod ppi;
mod quantum;
mod simulate;

pub use merged::{MergedConfig, MergedProblem, MergedQubo, PolicyCoupling};
pub use model::{
    analytic_policy_update, closed_form_step, true_parameters, CollocationGrid, RbcParams,
    DEFAULT_K_NODES,
};
pub use pbo::{
    build_gp_pbo, build_gv_pbo, build_gv_pbo_from_logs, default_log_coefficients,
    valuation_least_squares, GammaConstants, ValuationGram, ValuationModel, LOG_FIT_INTERVAL,
};
pub use ppi::{
    classical_ppi, combinatorial_ppi, combinatorial_valuation, errors_pct, hybrid_ppi,
    CombinatorialConfig, HybridConfig, IterationMode, IterationRecord, PpiState, DEFAULT_INIT,
    DEFAULT_TOL,
};
pub use quantum::{
    losses, multi_anneal_ppi, one_shot_ppi, select_by_adjusted_loss, AnnealOutcome, LossReport,
    MultiAnnealConfig, OneShotConfig, OneShotRun, QuantumRun,
};
pub use simulate::{
    default_initial_capital, negative_shock_path, simulate_consumption, ConsumptionPaths, PathRow,
};
