#![allow(dead_code)]

use nested_dynamics::dynamics::RateProfile;
use nested_dynamics::games::Game;
use nested_dynamics::hierarchy::SimilarityTree;
use rand::seq::SliceRandom;
use rand::Rng;

/// Commuting tree: the two buses nest together, the car stands alone.
pub fn bus_tree() -> SimilarityTree {
    SimilarityTree::build(3, &[vec![vec![0, 1], vec![2]]]).unwrap()
}

/// Rock-paper-scissors tree with paper and scissors grouped.
pub fn rps_tree() -> SimilarityTree {
    SimilarityTree::build(3, &[vec![vec![0], vec![1, 2]]]).unwrap()
}

pub fn tree8() -> SimilarityTree {
    SimilarityTree::build(
        8,
        &[
            vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7]],
            vec![vec![0, 1], vec![2, 3], vec![4, 5], vec![6, 7]],
        ],
    )
    .unwrap()
}

/// Splits `members` into between 1 and `members.len()` nonempty groups.
fn split<R: Rng>(members: &[usize], rng: &mut R) -> Vec<Vec<usize>> {
    let mut shuffled = members.to_vec();
    shuffled.shuffle(rng);
    let parts = rng.random_range(1..=members.len());
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); parts];
    for (i, a) in shuffled.into_iter().enumerate() {
        if i < parts {
            groups[i].push(a);
        } else {
            groups[rng.random_range(0..parts)].push(a);
        }
    }
    groups
}

/// Random tree with `n` actions and up to `max_depth` levels below the root.
pub fn random_tree<R: Rng>(n: usize, max_depth: usize, rng: &mut R) -> SimilarityTree {
    let interior = rng.random_range(0..max_depth);
    let mut levels: Vec<Vec<Vec<usize>>> = Vec::new();
    let mut current = vec![(0..n).collect::<Vec<_>>()];
    for _ in 0..interior {
        let next: Vec<Vec<usize>> = current.iter().flat_map(|c| split(c, rng)).collect();
        levels.push(next.clone());
        current = next;
    }
    let mut full = vec![vec![(0..n).collect::<Vec<_>>()]];
    full.extend(levels);
    full.push((0..n).map(|a| vec![a]).collect());
    // a random split can repeat a level; keep strict refinements only
    full.dedup();
    if full.len() < 2 {
        return SimilarityTree::flat(n).unwrap();
    }
    SimilarityTree::build(n, &full).unwrap()
}

/// Normalized rates, none smaller than about `0.05 / (1.05 · depth)`.
pub fn random_rates<R: Rng>(depth: usize, rng: &mut R) -> RateProfile {
    let raw: Vec<f64> = (0..depth).map(|_| 0.05 + rng.random::<f64>()).collect();
    let total: f64 = raw.iter().sum();
    let mut rates: Vec<f64> = raw.iter().map(|r| r / total).collect();
    let drift: f64 = 1.0 - rates.iter().sum::<f64>();
    rates[0] += drift;
    RateProfile::new(rates).unwrap()
}

/// Random affine game with entries in `[-1, 1]`.
pub fn random_game<R: Rng>(n: usize, rng: &mut R) -> Game {
    let a = (0..n * n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let b = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    Game::affine(n, a, b).unwrap()
}

/// Random symmetric matrix game, a potential game with `Φ = x·Ax/2`.
pub fn random_potential_game<R: Rng>(n: usize, rng: &mut R) -> Game {
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = rng.random_range(-1.0..1.0);
            a[i * n + j] = v;
            a[j * n + i] = v;
        }
    }
    Game::symmetric_potential(n, a, None).unwrap()
}

/// Interior point with every share at least `floor`.
pub fn interior_point<R: Rng>(n: usize, floor: f64, rng: &mut R) -> Vec<f64> {
    let x = nested_dynamics::games::sample_simplex(n, rng);
    x.iter()
        .map(|v| floor + (1.0 - n as f64 * floor) * v)
        .collect()
}

pub fn linf(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(u, v)| (u - v).abs())
        .fold(0.0, f64::max)
}
