#![allow(dead_code)]

use lextent::Poset;
use rand::seq::SliceRandom;
use rand::Rng;

/// Random relations `i < j` on a natural labeling, closed transitively,
/// then relabeled by a random permutation.
pub fn random_poset<R: Rng>(rng: &mut R, n: usize, density: f64) -> Poset {
    let mut relations = Vec::new();
    for j in 0..n {
        for i in 0..j {
            if rng.random_bool(density) {
                relations.push((i, j));
            }
        }
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let relabeled: Vec<(usize, usize)> = relations.iter().map(|&(i, j)| (perm[i], perm[j])).collect();
    Poset::from_cover_relations(n, &relabeled).expect("relabeled acyclic relations")
}

pub fn random_density<R: Rng>(rng: &mut R) -> f64 {
    [0.1, 0.25, 0.4, 0.6][rng.random_range(0..4)]
}

/// Pairs `(x, y)` of distinct incomparable elements.
pub fn incomparable_pairs(p: &Poset) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for x in 0..p.len() {
        for y in x + 1..p.len() {
            if !p.comparable(x, y) {
                out.push((x, y));
            }
        }
    }
    out
}
