//! Nested logit choice, class scores, nested entropy and the score dynamics.

mod argmax;
mod entropy;
mod learning;
mod profiles;
mod scores;

pub use argmax::{regularized_argmax, regularized_argmax_in, ArgmaxReport, SolverConfig};
pub use entropy::{
    class_nested_entropy, conditional_entropy, entropy_gradient, nested_entropy, xlogx,
};
pub use learning::{new_integrate, nrl_integrate, ScoreTrajectory};
pub use profiles::{
    EntropyWeights, NklWeights, ProfileSet, TempProfile, WeightProfile, ROUND_TRIP_TOL,
};
pub use scores::{
    class_probability, class_scores, conditional_choice, nlc, nlc_log, scores_for_state,
    ClassScores,
};
