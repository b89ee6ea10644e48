//! Building posets with a prescribed number of linear extensions.
//!
//! For a prime `p` and a `d` coprime to `p`, the left-half Stern-Brocot
//! entry `d/(p + d)` has gap `t - s = p`, and its depth is
//! `s(p + d, d) = 1 + s(p, d)`. The family poset at that node therefore has
//! exactly `p` extensions on `s(p, d) + 1` elements. Composite targets are
//! assembled as direct sums of prime blocks, stacked bottom to top.

use num_bigint::BigUint;
use num_integer::Integer;
use serde::Serialize;
use thiserror::Error;

use crate::count::{count_extensions_auto, BigCount};
use crate::euclid::{best_quotient_sum, quotient_sum};
use crate::family::{build_family_poset, tree_ext, DyadicPath, Fraction};
use crate::poset::Poset;

/// Deepest stage the fallback layer search will materialize.
const FALLBACK_MAX_STAGE: usize = 22;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructError {
    #[error("{n} and {d} are not coprime")]
    NotCoprime { n: u64, d: u64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("no verified family path for ({n}, {d}) within the search bound")]
    InternalSearchFailure { n: u64, d: u64 },
    #[error("construction needs {size} elements, more than the requested {requested}")]
    Infeasible { size: usize, requested: usize },
    #[error("verification failed: expected {expected} extensions, counted {counted}")]
    Verification { expected: String, counted: String },
}

/// The path of the left-half Stern-Brocot node holding `s/t`
/// (`0 <= s < t`, coprime).
pub fn path_for_fraction(s: u64, t: u64) -> Result<DyadicPath, ConstructError> {
    if s >= t || s.gcd(&t) != 1 {
        return Err(ConstructError::Domain(format!(
            "{s}/{t} is not a reduced fraction in [0, 1)"
        )));
    }
    if s == 0 {
        return Ok(DyadicPath::zero());
    }
    let (s, t) = (s as u128, t as u128);
    let (mut lo, mut hi) = ((0u128, 1u128), (1u128, 1u128));
    let mut bits = Vec::new();
    loop {
        let cur = (lo.0 + hi.0, lo.1 + hi.1);
        let (lhs, rhs) = (s * cur.1, cur.0 * t);
        if lhs == rhs {
            bits.push(true);
            break;
        } else if lhs < rhs {
            bits.push(false);
            hi = cur;
        } else {
            bits.push(true);
            lo = cur;
        }
    }
    Ok(DyadicPath::new(bits).expect("walk ends on a 1"))
}

/// Breadth-first search over family layers for the first node with gap
/// `n`, preferring numerator `d` within a layer.
fn layer_search(n: u64, d: u64, max_stage: usize) -> Option<DyadicPath> {
    let target = BigUint::from(n);
    for stage in 2..=max_stage.min(FALLBACK_MAX_STAGE) {
        let layer = DyadicPath::layer(stage);
        let mut any = None;
        for p in layer {
            if tree_ext(&p) == target {
                if crate::family::stern_brocot_entry(&p).s == BigUint::from(d) {
                    return Some(p);
                }
                any.get_or_insert(p);
            }
        }
        if any.is_some() {
            return any;
        }
    }
    None
}

/// A family path with exactly `n` extensions and at most `s(n, d) + 1`
/// elements, verified by counting.
pub fn path_from_coprime_pair(n: u64, d: u64) -> Result<DyadicPath, ConstructError> {
    if n < 2 || d < 1 || d >= n {
        return Err(ConstructError::Domain(format!(
            "need 1 <= d < n, n >= 2; got n={n}, d={d}"
        )));
    }
    if n.gcd(&d) != 1 {
        return Err(ConstructError::NotCoprime { n, d });
    }
    let bound = quotient_sum(n, d).expect("validated") as usize + 1;
    let target = BigUint::from(n);
    let candidate = path_for_fraction(d, n + d)?;

    let mut options = vec![candidate.clone()];
    if let Ok((a, b)) = candidate.children() {
        options.extend([a, b]);
    }
    if let Some((lower, _)) = candidate.neighbors() {
        options.push(lower);
    }
    let chosen = options
        .into_iter()
        .find(|p| p.stage() <= bound && tree_ext(p) == target)
        .or_else(|| layer_search(n, d, bound))
        .ok_or(ConstructError::InternalSearchFailure { n, d })?;

    if build_family_poset(&chosen).count() != target {
        return Err(ConstructError::InternalSearchFailure { n, d });
    }
    Ok(chosen)
}

/// `n` elements with exactly `k` extensions: a chain `x₀ < … < x_{n-2}`
/// and a pendant `y` above the first `n - k` chain elements.
pub fn poset_with_ext_k_on_n(n: usize, k: usize) -> Result<Poset, ConstructError> {
    if n < 1 || k < 1 || k > n {
        return Err(ConstructError::Domain(format!("need 1 <= k <= n, got n={n}, k={k}")));
    }
    let y = n - 1;
    let mut covers: Vec<(usize, usize)> = (0..n.saturating_sub(2)).map(|i| (i, i + 1)).collect();
    if n - k >= 1 {
        covers.push((n - k - 1, y));
    }
    Ok(Poset::from_cover_relations(n, &covers).expect("acyclic by construction"))
}

/// Adds a chain of new global minima below `p` until it has `n` elements.
pub fn pad_to_size(p: &Poset, n: usize) -> Result<Poset, ConstructError> {
    if n < p.len() {
        return Err(ConstructError::Domain(format!(
            "cannot pad a {}-element poset down to {n}",
            p.len()
        )));
    }
    Ok(Poset::chain(n - p.len()).direct_sum(p))
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for p in BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let (mut d, mut r) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    'witness: for a in BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

// Pollard's rho with Floyd cycle detection; `n` odd composite.
fn pollard_rho(n: u64) -> u64 {
    for c in 1u64.. {
        let f = |x: u64| ((x as u128 * x as u128 + c as u128) % n as u128) as u64;
        let (mut x, mut y, mut g) = (2u64, 2u64, 1u64);
        while g == 1 {
            x = f(x);
            y = f(f(y));
            g = x.abs_diff(y).gcd(&n);
        }
        if g != n {
            return g;
        }
    }
    unreachable!()
}

fn split(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let f = pollard_rho(n);
    split(f, out);
    split(n / f, out);
}

/// Prime factors with multiplicity, ascending. Empty for `m < 2`.
pub fn factorize(mut m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p <= 1_000_000 && p * p <= m {
        while m.is_multiple_of(p) {
            out.push(p);
            m /= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        split(m, &mut out);
    }
    out.sort_unstable();
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrimeBlock {
    pub p: u64,
    pub d: u64,
    /// `s(p, d)`, minimal over `d`.
    pub quotient_sum: u64,
    pub path: String,
    pub entry: String,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Recipe {
    /// Target 1: a singleton, or the empty poset.
    Trivial,
    /// Chain plus pendant element.
    Pendant { n: usize, k: usize },
    /// Direct sum of prime blocks, bottom to top.
    Blocks { blocks: Vec<PrimeBlock> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructionResult {
    pub poset: Poset,
    pub target: BigCount,
    pub size: usize,
    pub recipe: Recipe,
    /// Number of global minima added to reach an exact size.
    pub padding: usize,
}

impl ConstructionResult {
    /// `Σ_j (s_min(p_j) + 1)` over the prime blocks, or the size itself for
    /// other recipes.
    pub fn block_bound(&self) -> usize {
        match &self.recipe {
            Recipe::Blocks { blocks } => blocks.iter().map(|b| b.quotient_sum as usize + 1).sum(),
            _ => self.size - self.padding,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConstructOptions {
    /// Pad to exactly this many elements; infeasible if the construction is
    /// larger.
    pub exact_size: Option<usize>,
    /// Allow the empty poset for target 1.
    pub allow_empty: bool,
}

/// A verified poset with exactly `m` linear extensions.
pub fn poset_for_target(m: u64, opts: ConstructOptions) -> Result<ConstructionResult, ConstructError> {
    if m < 1 {
        return Err(ConstructError::Domain("target must be at least 1".into()));
    }
    let (poset, recipe) = match (m, opts.exact_size) {
        (1, _) if opts.allow_empty && opts.exact_size.is_none_or(|n| n == 0) => (Poset::empty(), Recipe::Trivial),
        (1, _) => (Poset::singleton(), Recipe::Trivial),
        (m, Some(n)) if m as usize <= n => (
            poset_with_ext_k_on_n(n, m as usize)?,
            Recipe::Pendant { n, k: m as usize },
        ),
        _ => {
            let mut poset = Poset::empty();
            let mut blocks = Vec::new();
            for p in factorize(m) {
                let (d, s) = best_quotient_sum(p).expect("p >= 2");
                let path = path_from_coprime_pair(p, d)?;
                let block = build_family_poset(&path);
                blocks.push(PrimeBlock {
                    p,
                    d,
                    quotient_sum: s,
                    path: path.to_string(),
                    entry: Fraction::new(d, p + d).to_string(),
                    size: block.poset.len(),
                });
                poset = poset.direct_sum(&block.poset);
            }
            (poset, Recipe::Blocks { blocks })
        }
    };
    let built = poset.len();
    let poset = match opts.exact_size {
        Some(n) if n < built => {
            return Err(ConstructError::Infeasible {
                size: built,
                requested: n,
            })
        }
        Some(n) => pad_to_size(&poset, n)?,
        None => poset,
    };
    let target = BigCount::from(m);
    let counted = count_extensions_auto(&poset).map_err(|e| ConstructError::Verification {
        expected: m.to_string(),
        counted: e.to_string(),
    })?;
    if counted != target {
        return Err(ConstructError::Verification {
            expected: m.to_string(),
            counted: counted.to_string(),
        });
    }
    Ok(ConstructionResult {
        size: poset.len(),
        padding: poset.len() - built,
        poset,
        target,
        recipe,
    })
}
