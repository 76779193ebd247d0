//! Population games, class-mean payoffs and solution-concept classifiers.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hierarchy::{ClassId, SimilarityTree};

/// Tolerance on `Σ x = 1` accepted for states handed to payoff fields.
pub const SIMPLEX_TOL: f64 = 1e-9;

/// Default tolerance used when classifying equilibria.
pub const DEFAULT_EQ_TOL: f64 = 1e-9;

/// A point of the simplex: the population's strategy shares.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct PopulationState(Vec<f64>);

impl PopulationState {
    /// Validates nonnegativity and `|Σ x - 1| ≤ 1e-12`.
    pub fn new(x: Vec<f64>) -> Result<Self> {
        check_simplex(&x, 1e-12)?;
        Ok(Self(x))
    }

    /// Rescales a nonnegative vector onto the simplex.
    pub fn normalized(mut x: Vec<f64>) -> Result<Self> {
        if x.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidState(
                "entries must be finite and nonnegative".into(),
            ));
        }
        let total: f64 = x.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidState("entries sum to zero".into()));
        }
        x.iter_mut().for_each(|v| *v /= total);
        Ok(Self(x))
    }

    pub fn uniform(n: usize) -> Self {
        Self(vec![1.0 / n as f64; n])
    }

    pub fn vertex(n: usize, action: usize) -> Self {
        let mut x = vec![0.0; n];
        x[action] = 1.0;
        Self(x)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_interior(&self) -> bool {
        self.0.iter().all(|&v| v > 0.0)
    }

    pub fn support(&self) -> Vec<usize> {
        support(&self.0)
    }
}

impl AsRef<[f64]> for PopulationState {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

pub(crate) fn support(x: &[f64]) -> Vec<usize> {
    (0..x.len()).filter(|&a| x[a] > 0.0).collect()
}

/// Checks that `x` lies on the simplex up to `tol` in the coordinate sum.
pub fn check_simplex(x: &[f64], tol: f64) -> Result<()> {
    if x.is_empty() {
        return Err(Error::InvalidState("empty state".into()));
    }
    if let Some(a) = x.iter().position(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::InvalidState(format!(
            "share of action {a} is {} (must be finite and nonnegative)",
            x[a]
        )));
    }
    let total: f64 = x.iter().sum();
    if (total - 1.0).abs() > tol {
        return Err(Error::InvalidState(format!("shares sum to {total}, not 1")));
    }
    Ok(())
}

/// Draws a point uniformly from the simplex of dimension `n`.
pub fn sample_simplex<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let mut x: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let total: f64 = x.iter().sum();
    x.iter_mut().for_each(|v| *v /= total);
    x
}

/// The representation class of a game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GameKind {
    /// `F(x) = A x`.
    Matrix,
    /// `F(x) = A x + b`.
    Affine,
    /// `F = ∇Φ` with the potential `Φ` available.
    Potential,
    /// Arbitrary payoff field.
    Custom,
}

impl GameKind {
    pub fn name(self) -> &'static str {
        match self {
            GameKind::Matrix => "matrix",
            GameKind::Affine => "affine",
            GameKind::Potential => "potential",
            GameKind::Custom => "custom",
        }
    }
}

type PayoffFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
type PotentialFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Field {
    Affine { a: Vec<f64>, b: Option<Vec<f64>> },
    Custom(PayoffFn),
}

/// A population game: a payoff field `F` on the simplex.
#[derive(Clone)]
pub struct Game {
    n: usize,
    field: Field,
    potential: Option<PotentialFn>,
    labels: Option<Vec<String>>,
}

impl fmt::Debug for Game {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = f.debug_struct("Game");
        s.field("n", &self.n).field("kind", &self.kind());
        if let Field::Affine { a, b } = &self.field {
            s.field("a", a).field("b", b);
        }
        s.finish()
    }
}

impl Game {
    /// Random-matching game `F(x) = A x`; `a` is row-major `n × n`.
    pub fn matrix(n: usize, a: Vec<f64>) -> Result<Self> {
        check_matrix(n, &a)?;
        Ok(Self {
            n,
            field: Field::Affine { a, b: None },
            potential: None,
            labels: None,
        })
    }

    /// Affine game `F(x) = A x + b`.
    pub fn affine(n: usize, a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        check_matrix(n, &a)?;
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: b.len(),
            });
        }
        if b.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidGame("offset entries must be finite".into()));
        }
        Ok(Self {
            n,
            field: Field::Affine { a, b: Some(b) },
            potential: None,
            labels: None,
        })
    }

    /// Affine game with symmetric `A`, carrying the potential `Φ(x) = x·Ax/2 + b·x`.
    pub fn symmetric_potential(n: usize, a: Vec<f64>, b: Option<Vec<f64>>) -> Result<Self> {
        check_matrix(n, &a)?;
        for i in 0..n {
            for j in 0..i {
                if (a[i * n + j] - a[j * n + i]).abs() > 1e-12 * (1.0 + a[i * n + j].abs()) {
                    return Err(Error::InvalidGame(format!(
                        "matrix is not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        let mut game = match b {
            Some(b) => Self::affine(n, a, b)?,
            None => Self::matrix(n, a)?,
        };
        let (a, b) = match &game.field {
            Field::Affine { a, b } => (a.clone(), b.clone()),
            Field::Custom(_) => unreachable!(),
        };
        game.potential = Some(Arc::new(move |x: &[f64]| {
            let mut phi = 0.0;
            for i in 0..n {
                let row: f64 = (0..n).map(|j| a[i * n + j] * x[j]).sum();
                phi += 0.5 * x[i] * row;
                if let Some(b) = &b {
                    phi += b[i] * x[i];
                }
            }
            phi
        }));
        Ok(game)
    }

    /// Potential game given by `Φ` and its gradient `F = ∇Φ`.
    pub fn potential<P, G>(n: usize, potential: P, gradient: G) -> Self
    where
        P: Fn(&[f64]) -> f64 + Send + Sync + 'static,
        G: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        Self {
            n,
            field: Field::Custom(Arc::new(gradient)),
            potential: Some(Arc::new(potential)),
            labels: None,
        }
    }

    /// Game with an arbitrary payoff field.
    pub fn custom<F>(n: usize, payoff: F) -> Self
    where
        F: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        Self {
            n,
            field: Field::Custom(Arc::new(payoff)),
            potential: None,
            labels: None,
        }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn kind(&self) -> GameKind {
        match (&self.field, &self.potential) {
            (_, Some(_)) => GameKind::Potential,
            (Field::Affine { b: None, .. }, None) => GameKind::Matrix,
            (Field::Affine { b: Some(_), .. }, None) => GameKind::Affine,
            (Field::Custom(_), None) => GameKind::Custom,
        }
    }

    /// Row-major `A` and offset `b` when the field is affine.
    pub fn affine_parts(&self) -> Option<(&[f64], Option<&[f64]>)> {
        match &self.field {
            Field::Affine { a, b } => Some((a, b.as_deref())),
            Field::Custom(_) => None,
        }
    }

    pub fn has_potential(&self) -> bool {
        self.potential.is_some()
    }

    /// `Φ(x)`, when the game carries a potential.
    pub fn potential_value(&self, x: &[f64]) -> Option<f64> {
        self.potential.as_ref().map(|phi| phi(x))
    }

    /// The payoff vector `F(x)`.
    pub fn payoff(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: x.len(),
            });
        }
        let f = self.raw_payoff(x);
        if f.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: f.len(),
            });
        }
        if let Some(action) = f.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinitePayoff { action });
        }
        Ok(f)
    }

    fn raw_payoff(&self, x: &[f64]) -> Vec<f64> {
        match &self.field {
            Field::Affine { a, b } => {
                let n = self.n;
                (0..n)
                    .map(|i| {
                        let row: f64 = (0..n).map(|j| a[i * n + j] * x[j]).sum();
                        row + b.as_ref().map_or(0.0, |b| b[i])
                    })
                    .collect()
            }
            Field::Custom(f) => f(x),
        }
    }

    /// Population mean payoff `⟨F(x), x⟩`.
    pub fn mean_payoff(&self, x: &[f64]) -> Result<f64> {
        Ok(dot(&self.payoff(x)?, x))
    }

    /// Mean payoff of a class, `Σ_{a∈K} x_{a|K} F_a(x)`.
    pub fn class_mean_payoff(
        &self,
        tree: &SimilarityTree,
        x: &[f64],
        class: ClassId,
    ) -> Result<f64> {
        let f = self.payoff(x)?;
        class_mean(tree, x, &f, class)
    }
}

/// Class mean of a payoff vector `f` under state `x`.
pub fn class_mean(tree: &SimilarityTree, x: &[f64], f: &[f64], class: ClassId) -> Result<f64> {
    let members = tree.members(class)?;
    let mass: f64 = members.iter().map(|&a| x[a]).sum();
    if mass <= 0.0 {
        return Err(Error::EmptyClassMass);
    }
    Ok(members.iter().map(|&a| x[a] * f[a]).sum::<f64>() / mass)
}

fn check_matrix(n: usize, a: &[f64]) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidGame("game needs at least one action".into()));
    }
    if a.len() != n * n {
        return Err(Error::DimensionMismatch {
            expected: n * n,
            actual: a.len(),
        });
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidGame("matrix entries must be finite".into()));
    }
    Ok(())
}

pub(crate) fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

/// Classification of a population state against the game's solution concepts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumReport {
    pub point: PopulationState,
    pub support: Vec<usize>,
    /// Supported actions all earn the same payoff (within tolerance).
    pub is_restricted_eq: bool,
    pub is_nash: bool,
    /// Pure Nash equilibrium whose action beats every other by more than the tolerance.
    pub is_strict: bool,
    /// `max_b F_b − min_{a∈supp} F_a`, clipped at 0: how far the point is from Nash.
    pub max_violation: f64,
    /// Payoff spread over the support.
    pub restricted_spread: f64,
    pub payoffs: Vec<f64>,
}

/// Classifies `x` as restricted equilibrium, Nash equilibrium, or neither.
pub fn classify_point(game: &Game, x: &PopulationState, tol: f64) -> Result<EquilibriumReport> {
    let f = game.payoff(x.as_slice())?;
    let supp = x.support();
    let best = f.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let worst_supported = supp.iter().map(|&a| f[a]).fold(f64::INFINITY, f64::min);
    let best_supported = supp.iter().map(|&a| f[a]).fold(f64::NEG_INFINITY, f64::max);
    let max_violation = (best - worst_supported).max(0.0);
    let restricted_spread = best_supported - worst_supported;
    let is_restricted_eq = restricted_spread <= tol;
    let is_nash = is_restricted_eq && max_violation <= tol;
    let is_strict = is_nash
        && supp.len() == 1
        && (0..f.len())
            .filter(|&b| b != supp[0])
            .all(|b| f[supp[0]] - f[b] > tol);
    Ok(EquilibriumReport {
        point: x.clone(),
        support: supp,
        is_restricted_eq,
        is_nash,
        is_strict,
        max_violation,
        restricted_spread,
        payoffs: f,
    })
}

/// A strict domination `dominated ≺ dominator` with margin `min_x [F_dominator − F_dominated](x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Domination {
    pub dominated: usize,
    pub dominator: usize,
    pub margin: f64,
}

/// Strictly dominated pairs of an affine game, with exact margins.
///
/// `F_b − F_a` is affine in `x`, so its minimum over the simplex sits at a vertex.
pub fn dominated_pairs(game: &Game) -> Result<Vec<Domination>> {
    let (a, b) = game
        .affine_parts()
        .ok_or(Error::UnsupportedKind(game.kind().name()))?;
    let n = game.n();
    let mut pairs = Vec::new();
    for dominated in 0..n {
        for dominator in 0..n {
            if dominated == dominator {
                continue;
            }
            let offset = b.map_or(0.0, |b| b[dominator] - b[dominated]);
            let margin = (0..n)
                .map(|j| a[dominator * n + j] - a[dominated * n + j] + offset)
                .fold(f64::INFINITY, f64::min);
            if margin > 0.0 {
                pairs.push(Domination {
                    dominated,
                    dominator,
                    margin,
                });
            }
        }
    }
    Ok(pairs)
}

/// Sampled domination scan for games without an affine form.
///
/// The margin reported is the minimum over `samples` random states plus the
/// vertices. A reported pair is only a sampled certificate: domination may fail
/// at states that were not drawn.
pub fn sampled_domination<R: Rng + ?Sized>(
    game: &Game,
    samples: usize,
    rng: &mut R,
) -> Result<Vec<Domination>> {
    let n = game.n();
    let mut points: Vec<Vec<f64>> = (0..n)
        .map(|a| PopulationState::vertex(n, a).into_vec())
        .collect();
    points.extend((0..samples).map(|_| sample_simplex(n, rng)));
    let payoffs = points
        .iter()
        .map(|x| game.payoff(x))
        .collect::<Result<Vec<_>>>()?;
    let mut pairs = Vec::new();
    for dominated in 0..n {
        for dominator in 0..n {
            if dominated == dominator {
                continue;
            }
            let margin = payoffs
                .iter()
                .map(|f| f[dominator] - f[dominated])
                .fold(f64::INFINITY, f64::min);
            if margin > 0.0 {
                pairs.push(Domination {
                    dominated,
                    dominator,
                    margin,
                });
            }
        }
    }
    Ok(pairs)
}

/// Largest deviation `max |F − ∇Φ|` over `points`, with `∇Φ` from central differences.
pub fn check_potential(game: &Game, points: &[Vec<f64>], step: f64) -> Result<f64> {
    let phi = game
        .potential
        .as_ref()
        .ok_or(Error::UnsupportedKind(game.kind().name()))?;
    let mut worst: f64 = 0.0;
    for x in points {
        let f = game.payoff(x)?;
        let mut probe = x.clone();
        for a in 0..game.n() {
            let orig = probe[a];
            probe[a] = orig + step;
            let up = phi(&probe);
            probe[a] = orig - step;
            let down = phi(&probe);
            probe[a] = orig;
            let grad = (up - down) / (2.0 * step);
            worst = worst.max((grad - f[a]).abs());
        }
    }
    Ok(worst)
}

/// Range of `⟨F(x') − F(x), x' − x⟩` over sampled pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonotoneStats {
    pub min: f64,
    pub max: f64,
}

impl MonotoneStats {
    /// `true` when every sampled pair contracted (`max < 0`).
    pub fn strictly_monotone_on_sample(&self) -> bool {
        self.max < 0.0
    }
}

pub fn check_monotone(game: &Game, pairs: &[(Vec<f64>, Vec<f64>)]) -> Result<MonotoneStats> {
    let mut stats = MonotoneStats {
        min: f64::INFINITY,
        max: f64::NEG_INFINITY,
    };
    if pairs.is_empty() {
        return Ok(MonotoneStats { min: 0.0, max: 0.0 });
    }
    for (x, xp) in pairs {
        let f = game.payoff(x)?;
        let fp = game.payoff(xp)?;
        let v: f64 = (0..game.n()).map(|a| (fp[a] - f[a]) * (xp[a] - x[a])).sum();
        stats.min = stats.min.min(v);
        stats.max = stats.max.max(v);
    }
    Ok(stats)
}

/// Named games used across the examples and presets.
pub mod presets {
    use super::Game;

    /// Two bus lines and a car, `F(x) = A x + b`.
    pub fn commuting() -> Game {
        let a = vec![-2.0, -4.0, -6.0, -3.0, 0.0, -6.0, -1.0, -4.0, -8.0];
        let b = vec![-5.0, -5.0, -2.0];
        Game::affine(3, a, b)
            .and_then(|g| g.with_labels(vec!["bus1".into(), "bus2".into(), "car".into()]))
            .expect("commuting game constants are valid")
    }

    /// Rock-paper-scissors with wins worth 2 and losses costing 1.
    pub fn good_rps() -> Game {
        let a = vec![0.0, -1.0, 2.0, 2.0, 0.0, -1.0, -1.0, 2.0, 0.0];
        Game::matrix(3, a)
            .and_then(|g| g.with_labels(vec!["R".into(), "P".into(), "S".into()]))
            .expect("rps constants are valid")
    }

    pub fn zero(n: usize) -> Game {
        Game::matrix(n, vec![0.0; n * n]).expect("zero matrix is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn commuting_payoffs_at_the_mixed_equilibrium() {
        let g = presets::commuting();
        let f = g.payoff(&[0.0, 0.5, 0.5]).unwrap();
        // Ax + b by hand: (-10, -8, -8).
        assert_eq!(f, vec![-10.0, -8.0, -8.0]);
    }

    #[test]
    fn car_vertex_is_strict() {
        let g = presets::commuting();
        let f = g.payoff(&[0.0, 0.0, 1.0]).unwrap();
        assert!(f[2] - f[0] >= 1.0);
        assert!(f[2] - f[1] > 0.0);
    }

    #[test]
    fn zero_game_pays_nothing() {
        let g = presets::zero(4);
        assert_eq!(g.payoff(&[0.25; 4]).unwrap(), vec![0.0; 4]);
        assert_eq!(g.mean_payoff(&[0.25; 4]).unwrap(), 0.0);
        assert!(dominated_pairs(&g).unwrap().is_empty());
    }

    #[test]
    fn class_means() {
        let g = presets::commuting();
        let tree = SimilarityTree::build(3, &[vec![vec![0, 1], vec![2]]]).unwrap();
        let x = [0.25, 0.25, 0.5];
        let f = g.payoff(&x).unwrap();
        let bus = tree.ancestor(0, 1).unwrap();
        let m = g.class_mean_payoff(&tree, &x, bus).unwrap();
        assert!((m - (f[0] + f[1]) / 2.0).abs() < 1e-15);
        let leaf = tree.singleton(2).unwrap();
        assert_eq!(g.class_mean_payoff(&tree, &x, leaf).unwrap(), f[2]);
        let root = g.class_mean_payoff(&tree, &x, tree.root()).unwrap();
        assert!((root - g.mean_payoff(&x).unwrap()).abs() < 1e-14);
        let err = g
            .class_mean_payoff(&tree, &[0.0, 0.0, 1.0], bus)
            .unwrap_err();
        assert_eq!(err, Error::EmptyClassMass);
    }

    #[test]
    fn classification_of_commuting_points() {
        let g = presets::commuting();
        let r = classify_point(&g, &PopulationState::vertex(3, 1), DEFAULT_EQ_TOL).unwrap();
        assert!(r.is_nash && r.is_strict);
        let r = classify_point(
            &g,
            &PopulationState::new(vec![0.0, 0.5, 0.5]).unwrap(),
            1e-9,
        )
        .unwrap();
        assert!(r.is_nash && !r.is_strict);
        let r = classify_point(&g, &PopulationState::vertex(3, 0), 1e-9).unwrap();
        assert!(r.is_restricted_eq && !r.is_nash);
        assert!(r.max_violation > 0.0);
    }

    #[test]
    fn commuting_domination() {
        let pairs = dominated_pairs(&presets::commuting()).unwrap();
        assert_eq!(
            pairs,
            vec![Domination {
                dominated: 0,
                dominator: 2,
                margin: 1.0
            }]
        );
    }

    #[test]
    fn custom_games_need_sampling() {
        let g = Game::custom(2, |x| vec![x[0], x[0] + 1.0]);
        assert!(matches!(
            dominated_pairs(&g),
            Err(Error::UnsupportedKind("custom"))
        ));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pairs = sampled_domination(&g, 200, &mut rng).unwrap();
        assert_eq!(pairs.len(), 1);
        assert_eq!((pairs[0].dominated, pairs[0].dominator), (0, 1));
        assert!((pairs[0].margin - 1.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_potential_matches_gradient() {
        let a = vec![1.0, 2.0, -1.0, 2.0, 0.5, 0.0, -1.0, 0.0, 3.0];
        let g = Game::symmetric_potential(3, a, Some(vec![0.1, -0.2, 0.3])).unwrap();
        assert_eq!(g.kind(), GameKind::Potential);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let pts: Vec<_> = (0..50).map(|_| sample_simplex(3, &mut rng)).collect();
        assert!(check_potential(&g, &pts, 1e-5).unwrap() <= 1e-6);
    }

    #[test]
    fn asymmetric_potential_is_rejected() {
        let a = vec![0.0, 1.0, 0.0, 0.0];
        assert!(Game::symmetric_potential(2, a, None).is_err());
    }

    #[test]
    fn good_rps_is_monotone_on_samples() {
        let g = presets::good_rps();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let pairs: Vec<_> = (0..1000)
            .map(|_| (sample_simplex(3, &mut rng), sample_simplex(3, &mut rng)))
            .collect();
        let stats = check_monotone(&g, &pairs).unwrap();
        assert!(stats.strictly_monotone_on_sample());
        let zero = check_monotone(&presets::zero(3), &pairs).unwrap();
        assert_eq!((zero.min, zero.max), (0.0, 0.0));
    }

    #[test]
    fn non_finite_payoff_is_reported() {
        let g = Game::custom(2, |_| vec![1.0, f64::NAN]);
        assert_eq!(
            g.payoff(&[0.5, 0.5]),
            Err(Error::NonFinitePayoff { action: 1 })
        );
    }

    #[test]
    fn state_validation() {
        assert!(PopulationState::new(vec![0.5, 0.5]).is_ok());
        assert!(PopulationState::new(vec![0.6, 0.5]).is_err());
        assert!(PopulationState::new(vec![1.5, -0.5]).is_err());
        let s = PopulationState::normalized(vec![1.0, 3.0]).unwrap();
        assert_eq!(s.as_slice(), &[0.25, 0.75]);
        assert!(s.is_interior());
        assert!(!PopulationState::vertex(3, 0).is_interior());
    }
}
