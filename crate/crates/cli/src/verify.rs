//! The invariant suite behind `verify`: each check runs the library's
//! identities on the configured game and tree and reports value against
//! tolerance.

use nested_dynamics::analysis::{
    check_dkl_identity, check_gess_attraction, check_potential_ascent, potential_rate, GessOptions,
};
use nested_dynamics::choice::{
    class_scores, new_integrate, nlc, regularized_argmax, scores_for_state, ProfileSet, TempProfile,
};
use nested_dynamics::dynamics::{
    extrinsic_switch_rates, integrate, mean_dynamics, nppi_switch_rates, nrd_extr_field, nrd_field,
    ClassPayoffs, IntegratorConfig, RateProfile,
};
use nested_dynamics::games::sample_simplex;
use nested_dynamics::Result as CoreResult;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{DynamicsKind, Experiment};
use crate::simulate::RunOutput;

pub const TANGENCY_TOL: f64 = 1e-12;
pub const PROTOCOL_TOL: f64 = 1e-12;
pub const NEW_TOL: f64 = 1e-6;
pub const DKL_TOL: f64 = 1e-6;
pub const DKL_STEP: f64 = 1e-4;
pub const DKL_MIN_RATIO: f64 = 3.5;
/// Residuals below this are rounding noise and carry no order information.
pub const DKL_NOISE_FLOOR: f64 = 1e-11;
pub const CLASS_SCORE_TOL: f64 = 1e-6;
pub const ARGMAX_TOL: f64 = 1e-7;
pub const ARGMAX_VALUE_TOL: f64 = 1e-9;
pub const DPOT_TOL: f64 = 1e-8;
pub const DEFAULT_SAMPLES: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// Worst observed value of the checked quantity.
    pub value: f64,
    pub tol: f64,
    pub detail: String,
}

fn check(name: &str, value: f64, tol: f64, passed: bool, detail: String) -> CheckResult {
    CheckResult {
        name: name.into(),
        passed,
        value,
        tol,
        detail,
    }
}

fn errored(name: &str, tol: f64, e: nested_dynamics::Error) -> CheckResult {
    check(name, f64::NAN, tol, false, format!("error: {e}"))
}

/// Interior point with all shares at least `floor`.
fn interior<R: Rng>(n: usize, floor: f64, rng: &mut R) -> Vec<f64> {
    sample_simplex(n, rng)
        .into_iter()
        .map(|v| floor + (1.0 - n as f64 * floor) * v)
        .collect()
}

fn linf(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(u, v)| (u - v).abs())
        .fold(0.0, f64::max)
}

/// Runs every check that applies to the experiment. `run` is the configured
/// run, used by the trajectory-level checks.
pub fn run_suite(exp: &Experiment, run: &RunOutput) -> Vec<CheckResult> {
    let seed = exp.seed.unwrap_or(0);
    let samples = exp.config.verify.samples.unwrap_or(DEFAULT_SAMPLES);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![
        tangency(exp, samples, &mut rng),
        protocol(exp, samples, &mut rng),
    ];
    if let Some(profiles) = &exp.dynamics.profiles {
        let rates = &profiles.rates;
        // temperatures matched to the normalized rates, so NEW runs on the same clock
        let temps = TempProfile::from_rates(rates);
        out.push(nrd_new(exp, rates, &temps));
        out.push(dkl(exp, rates, &mut rng));
        out.push(class_score_rates(exp, &temps, &mut rng));
        out.push(argmax(exp, profiles, &mut rng));
        out.push(conversions(profiles));
        if exp.game.has_potential() {
            out.push(dpot(exp, rates, samples, &mut rng));
        }
    }
    if exp.game.has_potential() {
        out.push(match check_potential_ascent(&exp.game, &run.path) {
            Ok(r) => check(
                "potential_ascent",
                r.min_delta,
                -nested_dynamics::analysis::ASCENT_TOL,
                r.passed,
                format!("Φ from {:.6} to {:.6}", r.initial, r.terminal),
            ),
            Err(e) => errored(
                "potential_ascent",
                -nested_dynamics::analysis::ASCENT_TOL,
                e,
            ),
        });
    }
    if let Some(star) = &exp.config.verify.gess_reference {
        out.push(gess(exp, run, star, &mut rng));
    }
    out
}

fn tangency<R: Rng>(exp: &Experiment, samples: usize, rng: &mut R) -> CheckResult {
    let n = exp.game.n();
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let x = interior(n, 1e-6, rng);
        let v = match field(exp, &x) {
            Ok(v) => v,
            Err(e) => return errored("tangency", TANGENCY_TOL, e),
        };
        worst = worst.max(v.iter().sum::<f64>().abs());
    }
    check(
        "tangency",
        worst,
        TANGENCY_TOL,
        worst <= TANGENCY_TOL,
        format!("{samples} states"),
    )
}

/// The velocity of the configured share dynamics; learning dynamics use the
/// nested replicator field they are equivalent to.
fn field(exp: &Experiment, x: &[f64]) -> CoreResult<Vec<f64>> {
    match exp.dynamics.kind {
        DynamicsKind::NrdExtr => {
            nrd_extr_field(&exp.game, &exp.tree, exp.dynamics.etas.as_ref().unwrap(), x)
        }
        _ => nrd_field(&exp.game, &exp.tree, exp.dynamics.rates().unwrap(), x),
    }
}

fn protocol<R: Rng>(exp: &Experiment, samples: usize, rng: &mut R) -> CheckResult {
    let name = "protocol_mean_dynamics";
    let n = exp.game.n();
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let x = interior(n, 1e-6, rng);
        let result = (|| {
            let f = exp.game.payoff(&x)?;
            let rho = match exp.dynamics.kind {
                DynamicsKind::NrdExtr => {
                    extrinsic_switch_rates(&exp.tree, exp.dynamics.etas.as_ref().unwrap(), &f, &x)?
                }
                _ => nppi_switch_rates(&exp.tree, exp.dynamics.rates().unwrap(), &f, &x)?,
            };
            Ok(linf(&mean_dynamics(&rho, &x)?, &field(exp, &x)?))
        })();
        match result {
            Ok(gap) => worst = worst.max(gap),
            Err(e) => return errored(name, PROTOCOL_TOL, e),
        }
    }
    check(
        name,
        worst,
        PROTOCOL_TOL,
        worst <= PROTOCOL_TOL,
        format!("{samples} states"),
    )
}

/// NRD and NEW from the same start over at most 10 time units.
fn nrd_new(exp: &Experiment, rates: &RateProfile, temps: &TempProfile) -> CheckResult {
    let name = "nrd_equals_new";
    let cfg = IntegratorConfig::new(exp.integrator.step, exp.integrator.t_end.min(10.0))
        .with_stride(exp.integrator.sample_stride);
    let result = (|| {
        let x0 = &exp.init.x0;
        if x0.iter().any(|&v| v <= 0.0) {
            return Ok(None);
        }
        let a = integrate(|x| nrd_field(&exp.game, &exp.tree, rates, x), x0, &cfg)?;
        let y0 = scores_for_state(&exp.tree, temps, x0)?;
        let b = new_integrate(&exp.game, &exp.tree, temps, &y0, &cfg)?;
        Ok(Some(
            a.states
                .iter()
                .zip(&b.path.states)
                .map(|(u, v)| linf(u, v))
                .fold(0.0, f64::max),
        ))
    })();
    match result {
        Ok(Some(gap)) => check(
            name,
            gap,
            NEW_TOL,
            gap <= NEW_TOL,
            format!("t in [0, {}]", cfg.t_end),
        ),
        Ok(None) => check(
            name,
            0.0,
            NEW_TOL,
            true,
            "skipped: initial state on the boundary".into(),
        ),
        Err(e) => errored(name, NEW_TOL, e),
    }
}

fn dkl<R: Rng>(exp: &Experiment, rates: &RateProfile, rng: &mut R) -> CheckResult {
    let name = "dkl_identity";
    let n = exp.game.n();
    let (mut worst, mut min_ratio) = (0.0f64, f64::INFINITY);
    for _ in 0..10 {
        let x = interior(n, 0.01, rng);
        let p = interior(n, 0.01, rng);
        let pair =
            check_dkl_identity(&exp.game, &exp.tree, rates, &x, &p, DKL_STEP).and_then(|r1| {
                check_dkl_identity(&exp.game, &exp.tree, rates, &x, &p, DKL_STEP / 2.0)
                    .map(|r2| (r1, r2))
            });
        match pair {
            Ok((r1, r2)) => {
                worst = worst.max(r1.residual);
                if r1.residual > DKL_NOISE_FLOOR {
                    min_ratio = min_ratio.min(r1.residual / r2.residual);
                }
            }
            Err(e) => return errored(name, DKL_TOL, e),
        }
    }
    let ratio_ok = !min_ratio.is_finite() || min_ratio >= DKL_MIN_RATIO;
    let ratio = if min_ratio.is_finite() {
        format!("{min_ratio:.2}")
    } else {
        "n/a (residuals at rounding level)".into()
    };
    check(
        name,
        worst,
        DKL_TOL,
        worst <= DKL_TOL && ratio_ok,
        format!("10 pairs at h={DKL_STEP:e}, min halving ratio {ratio}"),
    )
}

/// Central differences of every class score along a short NEW run.
fn class_score_rates<R: Rng>(exp: &Experiment, temps: &TempProfile, rng: &mut R) -> CheckResult {
    let name = "class_score_rates";
    let h = 1e-4;
    let cfg = IntegratorConfig::new(h, 0.1).with_stride(1);
    let n = exp.game.n();
    let result = (|| {
        let y0: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let run = new_integrate(&exp.game, &exp.tree, temps, &y0, &cfg)?;
        let scores = run
            .scores
            .iter()
            .map(|y| class_scores(&exp.tree, temps, y))
            .collect::<CoreResult<Vec<_>>>()?;
        let mut worst: f64 = 0.0;
        for k in 1..run.scores.len() - 1 {
            let x = &run.path.states[k];
            let f = exp.game.payoff(x)?;
            let cp = ClassPayoffs::compute(&exp.tree, x, &f);
            for class in exp.tree.classes() {
                let fd = (scores[k + 1].get(class) - scores[k - 1].get(class)) / (2.0 * h);
                worst = worst.max((fd - cp.means[class.level()][class.index()]).abs());
            }
        }
        Ok(worst)
    })();
    match result {
        Ok(w) => check(
            name,
            w,
            CLASS_SCORE_TOL,
            w <= CLASS_SCORE_TOL,
            format!("h={h:e}"),
        ),
        Err(e) => errored(name, CLASS_SCORE_TOL, e),
    }
}

fn argmax<R: Rng>(exp: &Experiment, profiles: &ProfileSet, rng: &mut R) -> CheckResult {
    let name = "argmax_equals_nlc";
    let n = exp.game.n();
    let (tree, temps, c) = (&exp.tree, &profiles.temps, &profiles.entropy_weights);
    let (mut worst_x, mut worst_v) = (0.0f64, 0.0f64);
    for _ in 0..20 {
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        let result = (|| {
            let r = regularized_argmax(tree, c, &y, &exp.dynamics.solver)?;
            let x = nlc(tree, temps, &y)?;
            let root = class_scores(tree, temps, &y)?.root();
            Ok((linf(&r.x, &x), (r.value - root).abs()))
        })();
        match result {
            Ok((dx, dv)) => {
                worst_x = worst_x.max(dx);
                worst_v = worst_v.max(dv);
            }
            Err(e) => return errored(name, ARGMAX_TOL, e),
        }
    }
    check(
        name,
        worst_x,
        ARGMAX_TOL,
        worst_x <= ARGMAX_TOL && worst_v <= ARGMAX_VALUE_TOL,
        format!("20 score vectors, value gap {worst_v:.2e}"),
    )
}

fn conversions(profiles: &ProfileSet) -> CheckResult {
    let name = "conversions_round_trip";
    let tol = nested_dynamics::choice::ROUND_TRIP_TOL * 16.0;
    let from_temps = ProfileSet::from_temps(profiles.temps.clone());
    match profiles.check().and(from_temps) {
        Ok(back) => {
            let gap = linf(back.rates.rates(), profiles.rates.rates());
            check(name, gap, tol, gap <= tol, "rates → temps → rates".into())
        }
        Err(e) => errored(name, tol, e),
    }
}

fn dpot<R: Rng>(exp: &Experiment, rates: &RateProfile, samples: usize, rng: &mut R) -> CheckResult {
    let name = "potential_rate";
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let x = interior(exp.game.n(), 1e-6, rng);
        match potential_rate(&exp.game, &exp.tree, rates, &x) {
            Ok(r) => worst = worst.max(r.residual),
            Err(e) => return errored(name, DPOT_TOL, e),
        }
    }
    check(
        name,
        worst,
        DPOT_TOL,
        worst <= DPOT_TOL,
        format!("{samples} states"),
    )
}

fn gess<R: Rng>(exp: &Experiment, run: &RunOutput, star: &[f64], rng: &mut R) -> CheckResult {
    let name = "gess_attraction";
    let options = GessOptions {
        terminal_tol: exp
            .config
            .verify
            .terminal_tol
            .unwrap_or(GessOptions::default().terminal_tol),
        ..GessOptions::default()
    };
    let Some(rates) = exp.dynamics.rates() else {
        return check(
            name,
            f64::NAN,
            options.terminal_tol,
            false,
            "needs a rate-based dynamics".into(),
        );
    };
    match check_gess_attraction(&exp.game, &exp.tree, rates, star, &run.path, &options, rng) {
        Ok(r) => check(
            name,
            r.terminal_l1,
            options.terminal_tol,
            r.passed,
            format!(
                "{} non-decreasing steps, divergence {:.3e} → {:.3e}",
                r.violations, r.initial_divergence, r.terminal_divergence
            ),
        ),
        Err(e) => errored(name, options.terminal_tol, e),
    }
}
