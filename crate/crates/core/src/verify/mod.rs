//! Sampling checks of the defining inequalities, with fitted constants and
//! replayable verdicts.

mod checks;
mod finite;
mod fit;
mod katznelson;
mod samplers;

pub use checks::{
    check_bc_condition, check_bc_implies_chain, check_chain_bound, check_restriction, check_strong_spec_inv,
    check_sum_power, check_tempered, observe, random_tuples, BoundReport, ChainOptions, RestrictionReport, Sampler,
    SumPowerReport, TemperedReport, BOUND_SLACK,
};
pub use finite::{check_finite_crossed, FiniteCrossedReport, FINITE_ORDER_CAP};
pub use fit::{
    chain_sum, covers, fit_chain, fitted_d, ChainObservation, Constants, FitCaps, FitReport, SampleDescription,
    Witness, REPLAY_SLACK,
};
pub use katznelson::{
    bessel_j, bessel_l1, katznelson_demo, katznelson_refutation, lacunary_psi, laurent_sampler,
    KatznelsonRefutation, KatznelsonRow, KatznelsonTower, Laurent, RefutationRow, EXP_TOL,
};
pub use samplers::{coeff_sampler, crossed_sampler, Tails, RADII};

#[cfg(test)]
mod tests;
