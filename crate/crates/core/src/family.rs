//! The recursive family of width-2 posets indexed by dyadic rationals in
//! `[0, 1)`, and its left-half Stern-Brocot shadow.
//!
//! A [`DyadicPath`] holds the binary digits of `b = 0.b₂b₃…` after the
//! point. Stage `k` (posets with `k` elements) holds the `2^{k-2}` paths of
//! length `k - 1` ending in `1`; stage 1 holds only `b = 0`.
//!
//! Each stage-`k` poset has two children at stage `k + 1`, each obtained by
//! adding a new global-ish minimum `x`:
//! - `b - 2^{-k}` (digit `0` appended before the final `1`): `x` lies below
//!   everything except `L`, and becomes the new `R`.
//! - `b + 2^{-k}` (digit `1` appended): `x` lies below everything except
//!   `R`, and becomes the new `L`. When `R` is not minimal this pinned sum
//!   is undefined and `x` goes below everything.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::count::{count_extensions, count_extensions_auto, BigCount};
use crate::poset::Poset;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("path must be empty or end in 1")]
    NonCanonical,
    #[error("invalid binary digit {0:?}")]
    InvalidDigit(char),
    #[error("the stage-1 poset has no pair of children")]
    NoChildren,
}

/// Binary digits after the point of a dyadic rational in `[0, 1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct DyadicPath {
    bits: Vec<bool>,
}

/// A Stern-Brocot neighbour: either another node or the right boundary
/// `b = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Neighbor {
    Node(DyadicPath),
    One,
}

impl DyadicPath {
    pub fn zero() -> Self {
        DyadicPath { bits: Vec::new() }
    }

    pub fn new(bits: Vec<bool>) -> Result<Self, FamilyError> {
        match bits.last() {
            Some(false) => Err(FamilyError::NonCanonical),
            _ => Ok(DyadicPath { bits }),
        }
    }

    pub fn from_digits(digits: &[u8]) -> Result<Self, FamilyError> {
        Self::new(digits.iter().map(|&d| d != 0).collect())
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Number of elements of the corresponding poset.
    pub fn stage(&self) -> usize {
        self.bits.len() + 1
    }

    pub fn is_zero(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn to_f64(&self) -> f64 {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(k, _)| 0.5f64.powi(k as i32 + 1))
            .sum()
    }

    /// All canonical paths of a stage, left to right.
    pub fn layer(stage: usize) -> Vec<DyadicPath> {
        match stage {
            0 => Vec::new(),
            1 => vec![DyadicPath::zero()],
            _ => {
                let free = stage - 2;
                assert!(free < 63, "layer too large to materialize");
                (0u64..1 << free)
                    .map(|v| {
                        let mut bits: Vec<bool> = (0..free).rev().map(|k| v >> k & 1 == 1).collect();
                        bits.push(true);
                        DyadicPath { bits }
                    })
                    .collect()
            }
        }
    }

    /// `(b - 2^{-k}, b + 2^{-k})` at stage `k + 1`.
    pub fn children(&self) -> Result<(DyadicPath, DyadicPath), FamilyError> {
        if self.is_zero() {
            return Err(FamilyError::NoChildren);
        }
        let mut left = self.bits.clone();
        *left.last_mut().expect("nonempty") = false;
        left.push(true);
        let mut right = self.bits.clone();
        right.push(true);
        Ok((DyadicPath { bits: left }, DyadicPath { bits: right }))
    }

    /// `b ∓ 2^{1-k}`: the two earlier-stage nodes whose extension counts
    /// sum to this one's. `None` for `b = 0`.
    pub fn neighbors(&self) -> Option<(DyadicPath, Neighbor)> {
        if self.is_zero() {
            return None;
        }
        let prefix = &self.bits[..self.bits.len() - 1];
        let mut lower = prefix.to_vec();
        while lower.last() == Some(&false) {
            lower.pop();
        }
        let upper = match prefix.iter().rposition(|&b| !b) {
            Some(k) => {
                let mut bits = prefix[..k].to_vec();
                bits.push(true);
                Neighbor::Node(DyadicPath { bits })
            }
            None => Neighbor::One,
        };
        Some((DyadicPath { bits: lower }, upper))
    }
}

impl fmt::Display for DyadicPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        f.write_str("0.")?;
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for DyadicPath {
    type Err = FamilyError;

    /// Accepts the digits after the point (`"011"`), optionally prefixed by
    /// `"0."`. `""` and `"0"` denote `b = 0`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let digits = s.strip_prefix("0.").unwrap_or(s);
        if digits.is_empty() || digits == "0" {
            return Ok(DyadicPath::zero());
        }
        let bits = digits
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(FamilyError::InvalidDigit(other)),
            })
            .collect::<Result<Vec<_>, _>>()?;
        DyadicPath::new(bits)
    }
}

/// A reduced fraction `s/t` with `0 ≤ s ≤ t`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Fraction {
    pub s: BigUint,
    pub t: BigUint,
}

impl Fraction {
    pub fn new(s: impl Into<BigUint>, t: impl Into<BigUint>) -> Self {
        Fraction {
            s: s.into(),
            t: t.into(),
        }
    }

    pub fn zero() -> Self {
        Fraction::new(0u32, 1u32)
    }

    pub fn one() -> Self {
        Fraction::new(1u32, 1u32)
    }

    pub fn mediant(&self, other: &Fraction) -> Fraction {
        Fraction {
            s: &self.s + &other.s,
            t: &self.t + &other.t,
        }
    }

    /// `t - s`.
    pub fn gap(&self) -> BigCount {
        &self.t - &self.s
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.s, self.t)
    }
}

/// A family poset together with its two chains.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyPoset {
    pub path: DyadicPath,
    pub poset: Poset,
    /// Bottom to top. Empty only at stage 1.
    pub left_chain: Vec<usize>,
    /// Bottom to top.
    pub right_chain: Vec<usize>,
}

impl FamilyPoset {
    /// Current minimum of the left chain; undefined at stage 1.
    pub fn l(&self) -> Option<usize> {
        self.left_chain.first().copied()
    }

    pub fn r(&self) -> usize {
        self.right_chain[0]
    }

    /// Counts with the width-2 engine using the tracked chains.
    pub fn count(&self) -> BigCount {
        crate::count::count_extensions_width2(&self.poset, (&self.left_chain, &self.right_chain))
            .expect("family chains partition the poset")
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum PlainSumRule {
    // Fall back to the plain direct sum exactly when R is not minimal.
    WhenRightNotMinimal,
    // Read the fallback condition as b = 2^{1-k} (all zeros then 1).
    #[cfg(test)]
    AllZerosThenOne,
}

fn shifted(chain: &[usize]) -> Vec<usize> {
    std::iter::once(0).chain(chain.iter().map(|&e| e + 1)).collect()
}

fn build(path: &DyadicPath, rule: PlainSumRule) -> FamilyPoset {
    let zero = FamilyPoset {
        path: DyadicPath::zero(),
        poset: Poset::singleton(),
        left_chain: Vec::new(),
        right_chain: vec![0],
    };
    if path.is_zero() {
        return zero;
    }
    // Stage 2: P_{0.1} = {x} ⊕ P_0 with x = L below R.
    let mut fp = FamilyPoset {
        path: DyadicPath { bits: vec![true] },
        poset: Poset::singleton().direct_sum(&zero.poset),
        left_chain: vec![0],
        right_chain: vec![1],
    };
    let x = Poset::singleton();
    for &step in &path.bits[..path.bits.len() - 1] {
        let mut bits = fp.path.bits.clone();
        if step {
            let plain = match rule {
                PlainSumRule::WhenRightNotMinimal => !fp.poset.is_minimal(fp.r()),
                #[cfg(test)]
                PlainSumRule::AllZerosThenOne => {
                    bits[..bits.len() - 1].iter().all(|b| !b) || !fp.poset.is_minimal(fp.r())
                }
            };
            fp.poset = if plain {
                x.direct_sum(&fp.poset)
            } else {
                x.pinned_direct_sum(0, &fp.poset, fp.r()).expect("R is minimal")
            };
            fp.left_chain = shifted(&fp.left_chain);
            fp.right_chain = fp.right_chain.iter().map(|&e| e + 1).collect();
            bits.push(true);
        } else {
            let l = fp.l().expect("stage >= 2 has an L");
            fp.poset = x.pinned_direct_sum(0, &fp.poset, l).expect("L is minimal");
            fp.right_chain = shifted(&fp.right_chain);
            fp.left_chain = fp.left_chain.iter().map(|&e| e + 1).collect();
            *bits.last_mut().expect("nonempty") = false;
            bits.push(true);
        }
        fp.path = DyadicPath { bits };
    }
    debug_assert_eq!(&fp.path, path);
    fp
}

/// Builds `P_b` by replaying the construction from `P_{0.1}`.
pub fn build_family_poset(path: &DyadicPath) -> FamilyPoset {
    build(path, PlainSumRule::WhenRightNotMinimal)
}

/// The left-half Stern-Brocot entry for `b`, with boundary entries `0/1`
/// at `b = 0` and `1/1` at `b = 1`.
pub fn stern_brocot_entry(path: &DyadicPath) -> Fraction {
    if path.is_zero() {
        return Fraction::zero();
    }
    let (mut lo, mut hi) = (Fraction::zero(), Fraction::one());
    let mut cur = lo.mediant(&hi);
    for &step in &path.bits[..path.bits.len() - 1] {
        if step {
            lo = cur;
        } else {
            hi = cur;
        }
        cur = lo.mediant(&hi);
    }
    cur
}

/// `t_b - s_b`, which equals `ext(P_b)`.
pub fn tree_ext(path: &DyadicPath) -> BigCount {
    stern_brocot_entry(path).gap()
}

/// Extension count assigned to a neighbour, with `ext(P_1) = 0`.
pub fn neighbor_tree_ext(n: &Neighbor) -> BigCount {
    match n {
        Neighbor::Node(p) => tree_ext(p),
        Neighbor::One => Fraction::one().gap(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum FamilyFailureKind {
    /// Counted extensions differ from `t - s`.
    TreeMismatch { counted: String, tree: String },
    /// The neighbour recursion fails on counted values.
    Recursion {
        counted: String,
        lower: String,
        upper: String,
    },
    /// Width above 2, or tracked chains that are not chains.
    Shape(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyFailure {
    pub path: String,
    pub kind: FamilyFailureKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyReport {
    pub depth: usize,
    pub posets_checked: usize,
    pub failures: Vec<FamilyFailure>,
}

impl FamilyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn first_failure(&self) -> Option<&FamilyFailure> {
        self.failures.first()
    }
}

fn direct_count(p: &Poset) -> BigCount {
    // Chains are recomputed from the order itself, not taken from the
    // construction's bookkeeping.
    if p.len() <= 24 {
        count_extensions(p).expect("width-2 posets have few ideals")
    } else {
        count_extensions_auto(p).expect("width-2 posets count")
    }
}

fn check_shape(fp: &FamilyPoset) -> Option<String> {
    let w = fp.poset.width();
    if w > 2 {
        return Some(format!("width {w}"));
    }
    let mut all: Vec<usize> = fp.left_chain.iter().chain(&fp.right_chain).copied().collect();
    all.sort_unstable();
    if all != (0..fp.poset.len()).collect::<Vec<_>>() {
        return Some("chains do not partition the poset".into());
    }
    for chain in [&fp.left_chain, &fp.right_chain] {
        if chain.windows(2).any(|w| !fp.poset.lt(w[0], w[1])) {
            return Some("tracked chain is not increasing".into());
        }
    }
    None
}

/// Checks every path of stages `1..=depth`: counted extensions equal
/// `t - s`, the neighbour recursion holds on counted values (with
/// `ext(P_1) = 0`), and the poset has width at most 2 with valid chains.
pub fn verify_family_layer(depth: usize) -> FamilyReport {
    verify_with(depth, build_family_poset)
}

fn verify_with(depth: usize, builder: impl Fn(&DyadicPath) -> FamilyPoset + Sync) -> FamilyReport {
    let mut counted: HashMap<DyadicPath, BigCount> = HashMap::new();
    let mut failures = Vec::new();
    let mut checked = 0;
    for stage in 1..=depth {
        let layer = DyadicPath::layer(stage);
        let results: Vec<(DyadicPath, BigCount, Option<String>)> = layer
            .into_par_iter()
            .map(|path| {
                let fp = builder(&path);
                let count = direct_count(&fp.poset);
                let shape = check_shape(&fp);
                (path, count, shape)
            })
            .collect();
        for (path, count, shape) in results {
            checked += 1;
            let name = path.to_string();
            if let Some(msg) = shape {
                failures.push(FamilyFailure {
                    path: name.clone(),
                    kind: FamilyFailureKind::Shape(msg),
                });
            }
            let tree = tree_ext(&path);
            if tree != count {
                failures.push(FamilyFailure {
                    path: name.clone(),
                    kind: FamilyFailureKind::TreeMismatch {
                        counted: count.to_string(),
                        tree: tree.to_string(),
                    },
                });
            }
            if let Some((lower, upper)) = path.neighbors() {
                let lo = counted[&lower].clone();
                let up = match &upper {
                    Neighbor::Node(p) => counted[p].clone(),
                    Neighbor::One => BigCount::zero(),
                };
                if &lo + &up != count {
                    failures.push(FamilyFailure {
                        path: name,
                        kind: FamilyFailureKind::Recursion {
                            counted: count.to_string(),
                            lower: lo.to_string(),
                            upper: up.to_string(),
                        },
                    });
                }
            }
            counted.insert(path, count);
        }
    }
    FamilyReport {
        depth,
        posets_checked: checked,
        failures,
    }
}

/// The all-ones path of a stage, whose poset is a chain.
pub fn chain_path(stage: usize) -> DyadicPath {
    if stage <= 1 {
        DyadicPath::zero()
    } else {
        DyadicPath {
            bits: vec![true; stage - 1],
        }
    }
}

impl Default for DyadicPath {
    fn default() -> Self {
        DyadicPath::zero()
    }
}
