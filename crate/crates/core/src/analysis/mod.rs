//! Nested Kullback–Leibler divergence and trajectory-level checks of the
//! identities and stability properties of the nested dynamics.

mod divergence;
mod extinction;
mod identities;
mod stability;

pub use divergence::{lyapunov_difference, nested_kl, DivergenceSpec};
pub use extinction::{fit_extinction_rate, linear_fit, RateFitReport, BOUND_SLACK, MIN_FIT_POINTS};
pub use identities::{check_dkl_identity, check_paydiff, potential_rate, IdentityCheck};
pub use stability::{
    check_gess_attraction, check_nash_limit, check_potential_ascent, strict_rate_smoke,
    validate_gess, GessCertificate, GessOptions, GessReport, NashLimitReport,
    PotentialAscentReport, StrictRateReport, ASCENT_TOL, DIVERGENCE_FLOOR,
};
