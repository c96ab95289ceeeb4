//! Limiting objects: the Poisson field of atoms, halving and doubling chains, the count
//! field `N_w(t,s)`, its scaling `X_k`, and closed-form covariances.

mod chains;
mod closed;
mod field;

pub use chains::{doubling_chain, halving_chain, run_halving, ChainTrajectory};
pub use closed::{
    bd_generator, birth_rate, cov_finite_d, cov_g, cov_u, scaled_cov_factor, tau_mgf, yule_mgf, Covariance,
};
pub use field::{
    choose_truncation, generator_cycles, naive_realization, relevance_probability, sample_chi, sample_chi_from, sample_limit_field, scaled_x,
    skeleton_count, truncation_tail, Atom, LimitError, LimitFieldPlan, LimitFieldSample, LimitRealization, TrackedAtom,
};
