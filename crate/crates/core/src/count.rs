//! Exact linear-extension counting.
//!
//! Three engines share one contract:
//! - [`count_extensions`]: dynamic programming over order ideals (down-sets)
//!   encoded as `u64` bitmasks; the number of linear extensions equals the
//!   number of maximal chains in the ideal lattice.
//! - [`count_extensions_width2`]: a grid walk over prefixes of two chains,
//!   usable for width-2 posets with hundreds of elements.
//! - [`count_extensions_bruteforce`]: filters all `n!` permutations. Test
//!   oracle only.
//!
//! All arithmetic is arbitrary precision.

use std::collections::HashMap;

use itertools::Itertools;
use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::poset::Poset;

/// Arbitrary-precision nonnegative count.
pub type BigCount = BigUint;

pub const BRUTEFORCE_MAX_ELEMENTS: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CountError {
    #[error("poset too large for this engine: {0}")]
    TooLarge(String),
    #[error("invalid chain cover: {0}")]
    InvalidCover(String),
}

/// Resource bounds for the ideal-lattice engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountConfig {
    pub max_elements: usize,
    /// Upper bound on the total number of ideals materialized.
    pub max_ideals: usize,
}

impl Default for CountConfig {
    fn default() -> Self {
        CountConfig {
            max_elements: 24,
            max_ideals: 1 << 21,
        }
    }
}

pub fn factorial(n: usize) -> BigCount {
    (1..=n).fold(BigCount::one(), |acc, k| acc * k)
}

pub fn binomial(n: usize, k: usize) -> BigCount {
    if k > n {
        return BigCount::zero();
    }
    let k = k.min(n - k);
    // Exact at every step: the running product is C(n - k + i, i).
    (1..=k).fold(BigCount::one(), |acc, i| acc * (n - k + i) / i)
}

/// Counts linear extensions with the default [`CountConfig`].
pub fn count_extensions(p: &Poset) -> Result<BigCount, CountError> {
    count_extensions_with(p, &CountConfig::default())
}

pub fn count_extensions_with(p: &Poset, config: &CountConfig) -> Result<BigCount, CountError> {
    let n = p.len();
    if n > config.max_elements || n > 64 {
        return Err(CountError::TooLarge(format!(
            "{n} elements exceeds the general-engine bound of {}",
            config.max_elements.min(64)
        )));
    }
    let below: Vec<u64> = (0..n).map(|i| p.below_mask(i)).collect();
    let mut level: HashMap<u64, BigCount> = HashMap::from([(0, BigCount::one())]);
    let mut materialized = 1usize;
    for _ in 0..n {
        let mut next: HashMap<u64, BigCount> = HashMap::with_capacity(level.len() * 2);
        for (ideal, ways) in &level {
            for (e, &req) in below.iter().enumerate() {
                let bit = 1u64 << e;
                if ideal & bit == 0 && req & !ideal == 0 {
                    *next.entry(ideal | bit).or_default() += ways;
                }
            }
        }
        materialized += next.len();
        if materialized > config.max_ideals {
            return Err(CountError::TooLarge(format!(
                "ideal lattice exceeds the budget of {} ideals",
                config.max_ideals
            )));
        }
        level = next;
    }
    Ok(level.into_values().next().unwrap_or_else(BigCount::one))
}

/// Counts by filtering every permutation of `0..n`. Capped at
/// [`BRUTEFORCE_MAX_ELEMENTS`].
pub fn count_extensions_bruteforce(p: &Poset) -> Result<BigCount, CountError> {
    let n = p.len();
    if n > BRUTEFORCE_MAX_ELEMENTS {
        return Err(CountError::TooLarge(format!(
            "{n} elements exceeds the brute-force cap of {BRUTEFORCE_MAX_ELEMENTS}"
        )));
    }
    let relations: Vec<(usize, usize)> = p.relations().collect();
    let mut position = vec![0usize; n];
    let mut count = 0u64;
    for perm in (0..n).permutations(n) {
        for (pos, &e) in perm.iter().enumerate() {
            position[e] = pos;
        }
        if relations.iter().all(|&(a, b)| position[a] < position[b]) {
            count += 1;
        }
    }
    Ok(BigCount::from(count))
}

fn validate_chain(p: &Poset, chain: &[usize]) -> Result<Vec<usize>, CountError> {
    let mut sorted = chain.to_vec();
    // In a chain, the number of elements below is strictly increasing.
    sorted.sort_by_key(|&e| p.below_iter(e).count());
    for w in sorted.windows(2) {
        if !p.lt(w[0], w[1]) {
            return Err(CountError::InvalidCover(format!(
                "elements {} and {} are not comparable",
                w[0], w[1]
            )));
        }
    }
    Ok(sorted)
}

/// Counts linear extensions of a poset partitioned into two chains.
///
/// The chains may be given in any order; they are sorted bottom to top and
/// checked. The walk visits pairs `(i, j)` meaning the first `i` elements of
/// one chain and `j` of the other have been placed.
pub fn count_extensions_width2(p: &Poset, cover: (&[usize], &[usize])) -> Result<BigCount, CountError> {
    let n = p.len();
    let mut seen = vec![false; n];
    for &e in cover.0.iter().chain(cover.1) {
        if e >= n {
            return Err(CountError::InvalidCover(format!("element {e} out of range")));
        }
        if std::mem::replace(&mut seen[e], true) {
            return Err(CountError::InvalidCover(format!("element {e} listed twice")));
        }
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(CountError::InvalidCover(format!("element {missing} not covered")));
    }
    let a = validate_chain(p, cover.0)?;
    let b = validate_chain(p, cover.1)?;

    // need_b[i]: how many elements of b must precede a[i]; b's elements
    // below a[i] form a prefix of b.
    let need_b: Vec<usize> = a.iter().map(|&x| b.iter().filter(|&&y| p.lt(y, x)).count()).collect();
    let need_a: Vec<usize> = b.iter().map(|&y| a.iter().filter(|&&x| p.lt(x, y)).count()).collect();

    // row[j] holds the number of ways to reach (i, j) for the current i.
    let mut row: Vec<BigCount> = vec![BigCount::zero(); b.len() + 1];
    row[0] = BigCount::one();
    for i in 0..=a.len() {
        for j in 0..=b.len() {
            if j > 0 && need_a[j - 1] <= i {
                let (left, right) = row.split_at_mut(j);
                right[0] += &left[j - 1];
            }
        }
        // Move to i + 1: only states with need_b[i] <= j can take a[i].
        let Some(&need) = need_b.get(i) else { break };
        for cell in row.iter_mut().take(need) {
            cell.set_zero();
        }
    }
    Ok(row.pop().expect("row is nonempty"))
}

/// Picks the width-2 engine when the poset has width at most two, the
/// ideal-lattice engine otherwise.
pub fn count_extensions_auto(p: &Poset) -> Result<BigCount, CountError> {
    let cover = p.chain_cover();
    match cover.len() {
        0 => Ok(BigCount::one()),
        1 => count_extensions_width2(p, (&cover[0], &[])),
        2 => count_extensions_width2(p, (&cover[0], &cover[1])),
        _ => count_extensions(p),
    }
}
