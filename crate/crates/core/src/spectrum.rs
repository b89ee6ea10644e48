//! Exhaustive linear-extension spectra `LE(n)` for small `n`, and checks of
//! the structural facts about their largest values.
//!
//! Enumeration covers naturally labeled posets only (the identity order is
//! a linear extension). Every isomorphism class has such a labeling, and
//! extension counts are label-invariant, so the value set is exact.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::count::{count_extensions, factorial, BigCount, CountError};
use crate::poset::Poset;

/// Bumped whenever the enumeration changes; invalidates cached spectra.
pub const GENERATOR_VERSION: &str = "natural-ideal-v1";

pub const DEFAULT_MAX_N: usize = 7;
pub const LARGE_MAX_N: usize = 8;

#[derive(Debug, Error)]
pub enum SpectrumError {
    #[error("n = {n} exceeds the enumeration bound {bound}")]
    TooLarge { n: usize, bound: usize },
    #[error(transparent)]
    Count(#[from] CountError),
    #[error("cache i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("cache format: {0}")]
    Format(String),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SpectrumOptions {
    /// Permit `n = 8` (several million posets).
    pub allow_large: bool,
    /// Keep only posets of width at most 2.
    pub width2_only: bool,
}

impl SpectrumOptions {
    fn bound(&self) -> usize {
        if self.allow_large {
            LARGE_MAX_N
        } else {
            DEFAULT_MAX_N
        }
    }

    fn version(&self) -> String {
        if self.width2_only {
            format!("{GENERATOR_VERSION}-width2")
        } else {
            GENERATOR_VERSION.to_string()
        }
    }
}

/// Depth-first generation: element `k` is added as a new maximal element
/// whose strict down-set is any order ideal of the poset on `0..k`.
/// `below[i]` is the strict down-set of `i` as a bitmask.
fn extend(below: &mut Vec<u64>, n: usize, visit: &mut dyn FnMut(&[u64])) {
    let k = below.len();
    if k == n {
        visit(below);
        return;
    }
    let mut ideals = Vec::new();
    collect_ideals(below, 0, 0, &mut ideals);
    for ideal in ideals {
        below.push(ideal);
        extend(below, n, visit);
        below.pop();
    }
}

fn collect_ideals(below: &[u64], i: usize, current: u64, out: &mut Vec<u64>) {
    if i == below.len() {
        out.push(current);
        return;
    }
    collect_ideals(below, i + 1, current, out);
    // Labels are natural, so everything below i was decided already.
    if below[i] & !current == 0 {
        collect_ideals(below, i + 1, current | 1 << i, out);
    }
}

fn to_poset(below: &[u64]) -> Poset {
    let covers: Vec<(usize, usize)> = below
        .iter()
        .enumerate()
        .flat_map(|(j, &mask)| {
            (0..below.len())
                .filter(move |&i| mask >> i & 1 == 1)
                .map(move |i| (i, j))
        })
        .collect();
    Poset::from_cover_relations(below.len(), &covers).expect("down-sets are acyclic")
}

/// Prefixes of the generation tree at a fixed depth, in generation order.
fn prefixes(n: usize, depth: usize) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    extend(&mut Vec::new(), depth.min(n), &mut |b| out.push(b.to_vec()));
    out
}

fn check_bound(n: usize, opts: &SpectrumOptions) -> Result<(), SpectrumError> {
    if n > opts.bound() {
        return Err(SpectrumError::TooLarge { n, bound: opts.bound() });
    }
    Ok(())
}

/// Calls `visit` on every naturally labeled poset with `n` elements.
pub fn for_each_natural_poset(n: usize, mut visit: impl FnMut(&Poset)) -> Result<(), SpectrumError> {
    check_bound(
        n,
        &SpectrumOptions {
            allow_large: true,
            ..Default::default()
        },
    )?;
    extend(&mut Vec::new(), n, &mut |b| visit(&to_poset(b)));
    Ok(())
}

/// Every poset on `0..n` whose identity order is a linear extension,
/// exactly once. Bounded by [`DEFAULT_MAX_N`].
pub fn enumerate_natural_posets(n: usize) -> Result<Vec<Poset>, SpectrumError> {
    check_bound(n, &SpectrumOptions::default())?;
    let mut out = Vec::new();
    for_each_natural_poset(n, |p| out.push(p.clone()))?;
    Ok(out)
}

/// The sorted value set `LE(n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spectrum {
    pub n: usize,
    pub values: Vec<BigCount>,
    pub generator_version: String,
    pub poset_count: u64,
}

#[derive(Debug, Serialize, Deserialize)]
struct SpectrumJson {
    n: usize,
    values: Vec<String>,
    poset_count: u64,
    missing: Vec<String>,
    generator_version: String,
}

impl Spectrum {
    pub fn contains(&self, v: &BigCount) -> bool {
        self.values.binary_search(v).is_ok()
    }

    /// Integers in `[1, n!/2]` absent from the spectrum.
    pub fn missing_up_to_half(&self) -> Vec<BigCount> {
        let half = (factorial(self.n) / 2u32).to_u64().expect("desk-scale n");
        (1..=half).map(BigCount::from).filter(|v| !self.contains(v)).collect()
    }

    pub fn to_json(&self) -> String {
        let doc = SpectrumJson {
            n: self.n,
            values: self.values.iter().map(ToString::to_string).collect(),
            poset_count: self.poset_count,
            missing: self.missing_up_to_half().iter().map(ToString::to_string).collect(),
            generator_version: self.generator_version.clone(),
        };
        serde_json::to_string_pretty(&doc).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Spectrum, SpectrumError> {
        let doc: SpectrumJson = serde_json::from_str(text).map_err(|e| SpectrumError::Format(e.to_string()))?;
        let values = doc
            .values
            .iter()
            .map(|v| v.parse::<BigCount>().map_err(|e| SpectrumError::Format(e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Spectrum {
            n: doc.n,
            values,
            generator_version: doc.generator_version,
            poset_count: doc.poset_count,
        })
    }
}

/// Computes `LE(n)` exhaustively with the default options.
pub fn spectrum(n: usize) -> Result<Spectrum, SpectrumError> {
    spectrum_with(n, &SpectrumOptions::default())
}

/// Work is split on the first few generation choices; the merge is a set
/// union, so the result does not depend on scheduling.
pub fn spectrum_with(n: usize, opts: &SpectrumOptions) -> Result<Spectrum, SpectrumError> {
    check_bound(n, opts)?;
    let parts: Vec<Result<(BTreeSet<BigCount>, u64), CountError>> = prefixes(n, 4)
        .into_par_iter()
        .map(|prefix| {
            let mut values = BTreeSet::new();
            let mut count = 0u64;
            let mut err = None;
            let mut below = prefix;
            extend(&mut below, n, &mut |b| {
                if err.is_some() {
                    return;
                }
                let p = to_poset(b);
                if opts.width2_only && p.width() > 2 {
                    return;
                }
                count += 1;
                match count_extensions(&p) {
                    Ok(v) => {
                        values.insert(v);
                    }
                    Err(e) => err = Some(e),
                }
            });
            match err {
                Some(e) => Err(e),
                None => Ok((values, count)),
            }
        })
        .collect();
    let mut values = BTreeSet::new();
    let mut poset_count = 0;
    for part in parts {
        let (v, c) = part?;
        values.extend(v);
        poset_count += c;
    }
    Ok(Spectrum {
        n,
        values: values.into_iter().collect(),
        generator_version: opts.version(),
        poset_count,
    })
}

pub fn cache_path(dir: &Path, n: usize, opts: &SpectrumOptions) -> PathBuf {
    dir.join(format!("spectrum-n{n}-{}.json", opts.version()))
}

/// Loads `LE(n)` from `dir` when a cache entry with the current generator
/// version exists; otherwise computes and stores it.
pub fn cached_spectrum(n: usize, dir: Option<&Path>, opts: &SpectrumOptions) -> Result<Spectrum, SpectrumError> {
    let Some(dir) = dir else {
        return spectrum_with(n, opts);
    };
    let path = cache_path(dir, n, opts);
    if let Ok(text) = fs::read_to_string(&path) {
        if let Ok(s) = Spectrum::from_json(&text) {
            if s.n == n && s.generator_version == opts.version() {
                return Ok(s);
            }
        }
    }
    let s = spectrum_with(n, opts)?;
    fs::create_dir_all(dir)?;
    fs::write(&path, s.to_json())?;
    Ok(s)
}

/// `M(n)`: the least positive integer absent from the spectrum.
pub fn smallest_missing(s: &Spectrum) -> BigCount {
    let mut candidate = BigCount::one();
    for v in &s.values {
        if *v == candidate {
            candidate += 1u32;
        } else if *v > candidate {
            break;
        }
    }
    candidate
}

/// `N(n) = |LE(n) ∩ ((n-1)!, n!]|`.
pub fn top_interval_count(s: &Spectrum) -> usize {
    let low = if s.n == 0 { BigCount::one() } else { factorial(s.n - 1) };
    // For n <= 1 the interval is empty.
    let high = factorial(s.n);
    s.values.iter().filter(|v| **v > low && **v <= high).count()
}

/// The recursive upper bound `N(2) = 1`, `N(k) <= ⌈(k-2)!/k⌉ + N(k-1)`.
pub fn top_interval_bound(n: usize) -> BigCount {
    assert!(n >= 2, "bound starts at n = 2");
    let mut bound = BigCount::one();
    for k in 3..=n {
        bound += factorial(k - 2).div_ceil(&BigCount::from(k));
    }
    bound
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TopIntervalReport {
    pub n: usize,
    pub r: usize,
    /// `LE(n) ∩ (n!/(r+1), n!]`.
    pub lhs: Vec<String>,
    /// `(n!/r!) · (LE(r) ∩ (r!/(r+1), r!])`.
    pub rhs: Vec<String>,
    pub equal: bool,
}

/// Compares the top of `LE(n)` with the dilated top of `LE(r)`.
pub fn verify_top_intervals(le_n: &Spectrum, le_r: &Spectrum) -> TopIntervalReport {
    let (n, r) = (le_n.n, le_r.n);
    let nf = factorial(n);
    let rf = factorial(r);
    let lhs: Vec<BigCount> = le_n.values.iter().filter(|v| *v * (r + 1) > nf).cloned().collect();
    let scale = &nf / &rf;
    let rhs: Vec<BigCount> = le_r
        .values
        .iter()
        .filter(|l| *l * (r + 1) > rf)
        .map(|l| l * &scale)
        .collect();
    TopIntervalReport {
        n,
        r,
        equal: lhs == rhs,
        lhs: lhs.iter().map(ToString::to_string).collect(),
        rhs: rhs.iter().map(ToString::to_string).collect(),
    }
}

/// One element below all others, the rest an antichain.
fn is_bottomed_antichain(p: &Poset) -> bool {
    (0..p.len()).any(|x| {
        (0..p.len()).all(|y| y == x || p.lt(x, y)) && p.remove_element(x).map(|q| q.is_antichain()).unwrap_or(false)
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConnectedBoundReport {
    pub n: usize,
    pub connected_posets: u64,
    pub max_ext: String,
    pub bound: String,
    pub violations: Vec<String>,
    pub equality_cases: u64,
    /// Equality cases that are neither a singleton below an antichain nor
    /// its dual.
    pub unexpected_equality: Vec<String>,
    pub saw_bottomed: bool,
    pub saw_topped: bool,
}

impl ConnectedBoundReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.unexpected_equality.is_empty() && self.saw_bottomed && self.saw_topped
    }
}

/// Every connected `n`-element poset has at most `(n-1)!` extensions, with
/// equality only for a singleton below (or above) an antichain.
pub fn verify_connected_bound(n: usize) -> Result<ConnectedBoundReport, SpectrumError> {
    check_bound(n, &SpectrumOptions::default())?;
    assert!(n >= 1, "needs a nonempty poset");
    let bound = factorial(n - 1);
    let mut report = ConnectedBoundReport {
        n,
        connected_posets: 0,
        max_ext: "0".into(),
        bound: bound.to_string(),
        violations: Vec::new(),
        equality_cases: 0,
        unexpected_equality: Vec::new(),
        saw_bottomed: false,
        saw_topped: false,
    };
    let mut max_ext = BigCount::default();
    let mut err = None;
    for_each_natural_poset(n, |p| {
        if !p.is_connected() || err.is_some() {
            return;
        }
        report.connected_posets += 1;
        let ext = match count_extensions(p) {
            Ok(v) => v,
            Err(e) => {
                err = Some(e);
                return;
            }
        };
        if ext > bound {
            report.violations.push(format!("{:?} has {ext}", p));
        }
        if ext == bound {
            report.equality_cases += 1;
            let bottomed = is_bottomed_antichain(p);
            let topped = is_bottomed_antichain(&p.dual());
            report.saw_bottomed |= bottomed;
            report.saw_topped |= topped;
            if !bottomed && !topped {
                report.unexpected_equality.push(format!("{p:?}"));
            }
        }
        max_ext = max_ext.clone().max(ext);
    })?;
    if let Some(e) = err {
        return Err(e.into());
    }
    report.max_ext = max_ext.to_string();
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentBoundReport {
    pub n: usize,
    pub posets_checked: u64,
    /// Posets with several largest components, each tried as `P_k`.
    pub tied_largest: u64,
    pub violations: Vec<String>,
}

impl ComponentBoundReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// `ext(P) · (n - m) <= n!`, where `m` counts singleton components other
/// than a chosen largest component. Every largest component is tried.
pub fn verify_component_bound(n: usize) -> Result<ComponentBoundReport, SpectrumError> {
    check_bound(n, &SpectrumOptions::default())?;
    let nf = factorial(n);
    let mut report = ComponentBoundReport {
        n,
        posets_checked: 0,
        tied_largest: 0,
        violations: Vec::new(),
    };
    let mut err = None;
    for_each_natural_poset(n, |p| {
        if err.is_some() {
            return;
        }
        report.posets_checked += 1;
        let ext = match count_extensions(p) {
            Ok(v) => v,
            Err(e) => {
                err = Some(e);
                return;
            }
        };
        let sizes: Vec<usize> = p.component_indices().iter().map(Vec::len).collect();
        let largest = sizes.iter().copied().max().unwrap_or(0);
        let choices: Vec<usize> = (0..sizes.len()).filter(|&j| sizes[j] == largest).collect();
        if choices.len() > 1 {
            report.tied_largest += 1;
        }
        for k in choices {
            let m = (0..sizes.len()).filter(|&j| j != k && sizes[j] == 1).count();
            if &ext * (n - m) > nf {
                report.violations.push(format!("{p:?}: ext {ext}, m {m}"));
            }
        }
    })?;
    if let Some(e) = err {
        return Err(e.into());
    }
    Ok(report)
}
