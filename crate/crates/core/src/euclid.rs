//! Euclidean-algorithm statistics: remainder and quotient sequences,
//! quotient sums `s(n, d)`, quotient multiplicities `r(n, m)`, continuants,
//! totients, and the batch searches behind the empirical reports.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EuclidError {
    #[error("domain error: {0}")]
    Domain(String),
}

fn domain(msg: impl Into<String>) -> EuclidError {
    EuclidError::Domain(msg.into())
}

/// Nonzero remainders `a₀ = n, a₁ = d, a₂, …`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EuclideanSeq {
    pub terms: Vec<u64>,
}

impl EuclideanSeq {
    /// The last nonzero term, `gcd(n, d)`.
    pub fn gcd(&self) -> u64 {
        *self.terms.last().expect("at least two terms")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuotientSeq {
    pub quotients: Vec<u64>,
    /// `s(n, d)`.
    pub sum: u64,
}

fn check_pair(n: u64, d: u64) -> Result<(), EuclidError> {
    if n < 1 || d < 1 || d > n {
        return Err(domain(format!("need 1 <= d <= n, got n={n}, d={d}")));
    }
    Ok(())
}

pub fn euclidean_sequence(n: u64, d: u64) -> Result<EuclideanSeq, EuclidError> {
    check_pair(n, d)?;
    let mut terms = vec![n, d];
    let (mut a, mut b) = (n, d);
    while a % b != 0 {
        (a, b) = (b, a % b);
        terms.push(b);
    }
    Ok(EuclideanSeq { terms })
}

pub fn quotient_sequence(n: u64, d: u64) -> Result<QuotientSeq, EuclidError> {
    let a = euclidean_sequence(n, d)?;
    let quotients: Vec<u64> = a.terms.windows(2).map(|w| w[0] / w[1]).collect();
    let sum = quotients.iter().sum();
    Ok(QuotientSeq { quotients, sum })
}

/// `s(n, d)` without allocating, stopping early once the partial sum
/// reaches `cap`. Returns `None` when `gcd(n, d) != 1`.
fn quotient_sum_capped(mut a: u64, mut b: u64, cap: u64) -> Option<u64> {
    let mut s = 0;
    while b != 0 {
        s += a / b;
        if s >= cap {
            return Some(s);
        }
        (a, b) = (b, a % b);
    }
    (a == 1).then_some(s)
}

/// `s(n, d)` for `1 <= d <= n`.
pub fn quotient_sum(n: u64, d: u64) -> Result<u64, EuclidError> {
    check_pair(n, d)?;
    let (mut a, mut b, mut s) = (n, d, 0);
    while b != 0 {
        s += a / b;
        (a, b) = (b, a % b);
    }
    Ok(s)
}

/// The continuant `X(q₁, …, q_t)` with `X() = 1` and `X(q) = q`.
pub fn continuant(quotients: &[u64]) -> Result<BigUint, EuclidError> {
    if quotients.contains(&0) {
        return Err(domain("continuant entries must be positive"));
    }
    // Evaluate from the right: X(q_k..) = q_k X(q_{k+1}..) + X(q_{k+2}..).
    let (mut next, mut after) = (BigUint::one(), BigUint::one());
    for (k, &q) in quotients.iter().enumerate().rev() {
        let value = if k + 1 == quotients.len() {
            BigUint::from(q)
        } else {
            BigUint::from(q) * &next + &after
        };
        after = std::mem::replace(&mut next, value);
    }
    Ok(next)
}

/// `χ(q) = (X(q₁…q_t), X(q₂…q_t))`.
pub fn chi(quotients: &[u64]) -> Result<(BigUint, BigUint), EuclidError> {
    let n = continuant(quotients)?;
    let d = continuant(quotients.get(1..).unwrap_or(&[]))?;
    Ok((n, d))
}

/// `χ'(q) = (X(q₁…q_t), X(q₁…q_{t-1}))`.
pub fn chi_prime(quotients: &[u64]) -> Result<(BigUint, BigUint), EuclidError> {
    let y = continuant(quotients)?;
    let x = continuant(&quotients[..quotients.len().saturating_sub(1)])?;
    Ok((y, x))
}

/// The `d` coprime to `n` minimizing `s(n, d)`, smallest `d` on ties, as
/// `(d, s_min)`. Scans every `d` with an early cutoff.
pub fn best_quotient_sum(n: u64) -> Result<(u64, u64), EuclidError> {
    if n < 2 {
        return Err(domain(format!("need n >= 2, got {n}")));
    }
    let mut best = (0, u64::MAX);
    for d in 1..n {
        if let Some(s) = quotient_sum_capped(n, d, best.1) {
            if s < best.1 {
                best = (d, s);
            }
        }
    }
    Ok(best)
}

/// `best_quotient_sum(n)` for every `2 <= n <= max_n`, indexed by `n`
/// (entries 0 and 1 are `None`).
///
/// Walks the Euclidean algorithm backwards: every coprime pair `(n, d)`
/// with `n > d` arises exactly once from a root `(q, 1)`, `q >= 2`, by
/// repeatedly mapping `(a, b)` to `(q a + b, a)`. Pairs with quotient sum
/// above a threshold are pruned; any `n` left unreached is resolved by
/// [`best_quotient_sum`].
pub fn best_quotient_sums(max_n: u64) -> Vec<Option<(u64, u64)>> {
    let len = max_n as usize + 1;
    let mut best: Vec<(u64, u64)> = vec![(u64::MAX, u64::MAX); len.max(2)];
    if max_n >= 2 {
        let threshold = 4 + (2.0 * (max_n as f64).ln()).ceil() as u64;
        let mut stack: Vec<(u64, u64, u64)> = (2..=threshold.min(max_n)).map(|q| (q, 1, q)).collect();
        while let Some((a, b, s)) = stack.pop() {
            let slot = &mut best[a as usize];
            if (s, b) < (slot.1, slot.0) {
                *slot = (b, s);
            }
            let mut q = 1;
            while s + q <= threshold && q * a + b <= max_n {
                stack.push((q * a + b, a, s + q));
                q += 1;
            }
        }
    }
    (0..len as u64)
        .map(|n| match n {
            0 | 1 => None,
            _ if best[n as usize].1 == u64::MAX => best_quotient_sum(n).ok(),
            _ => Some(best[n as usize]),
        })
        .collect()
}

/// Histogram of quotients over all `d` in `1..n` coprime to `n`:
/// entry `m` is `r(n, m)` (entry 0 unused).
pub fn quotient_histogram(n: u64) -> Vec<u64> {
    let mut hist = vec![0u64; n as usize + 1];
    let mut scratch = Vec::new();
    for d in 1..n {
        scratch.clear();
        let (mut a, mut b) = (n, d);
        while b != 0 {
            scratch.push(a / b);
            (a, b) = (b, a % b);
        }
        if a == 1 {
            for &q in &scratch {
                hist[q as usize] += 1;
            }
        }
    }
    hist
}

/// `r(n, m)`: occurrences of `m` among the quotient sequences `q(n, d)`
/// for `d` coprime to `n`.
pub fn quotient_multiplicity(n: u64, m: u64) -> Result<u64, EuclidError> {
    if m < 1 || m > n {
        return Err(domain(format!("need 1 <= m <= n, got n={n}, m={m}")));
    }
    Ok(quotient_histogram(n)[m as usize])
}

/// Euler's totient by trial factorization.
pub fn totient(n: u64) -> u64 {
    assert!(n >= 1, "totient needs n >= 1");
    let (mut rest, mut phi) = (n, n);
    let mut p = 2;
    while p * p <= rest {
        if rest % p == 0 {
            while rest % p == 0 {
                rest /= p;
            }
            phi -= phi / p;
        }
        p += 1;
    }
    if rest > 1 {
        phi -= phi / rest;
    }
    phi
}

/// `φ(k)` for every `k <= max_n` (entry 0 is 0).
pub fn totient_sieve(max_n: usize) -> Vec<u64> {
    let mut phi: Vec<u64> = (0..=max_n as u64).collect();
    for p in 2..=max_n {
        if phi[p] == p as u64 {
            for k in (p..=max_n).step_by(p) {
                phi[k] -= phi[k] / p as u64;
            }
        }
    }
    phi
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailRow {
    pub m: u64,
    /// `Σ_{k >= m} r(n, k)`.
    pub tail: u64,
    /// `tail · m / (n ln n)`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailReport {
    pub n: u64,
    pub rows: Vec<TailRow>,
    pub max_ratio: f64,
}

/// Tail sums of `r(n, ·)` and their normalized ratios, one row per cutoff.
pub fn tail_report(n: u64, cutoffs: &[u64]) -> Result<TailReport, EuclidError> {
    if n < 2 {
        return Err(domain(format!("need n >= 2, got {n}")));
    }
    if let Some(&bad) = cutoffs.iter().find(|&&m| m < 1 || m > n) {
        return Err(domain(format!("cutoff {bad} outside [1, {n}]")));
    }
    let hist = quotient_histogram(n);
    // suffix[m] = Σ_{k >= m} hist[k]
    let mut suffix = vec![0u64; hist.len() + 1];
    for m in (0..hist.len()).rev() {
        suffix[m] = suffix[m + 1] + hist[m];
    }
    let scale = n as f64 * (n as f64).ln();
    let rows: Vec<TailRow> = cutoffs
        .iter()
        .map(|&m| {
            let tail = suffix[m as usize];
            TailRow {
                m,
                tail,
                ratio: tail as f64 * m as f64 / scale,
            }
        })
        .collect();
    let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(TailReport { n, rows, max_ratio })
}

/// The cutoff set used by the tail-bound checks: `{1, 10, 100, ⌊(ln n)²⌋}`
/// restricted to `[1, n]`, sorted and deduplicated.
pub fn standard_cutoffs(n: u64) -> Vec<u64> {
    let log_sq = ((n as f64).ln().powi(2)).floor() as u64;
    let mut ms: Vec<u64> = [1, 10, 100, log_sq].into_iter().filter(|&m| m >= 1 && m <= n).collect();
    ms.sort_unstable();
    ms.dedup();
    ms
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthRow {
    pub n: u64,
    pub d: u64,
    pub s_min: u64,
    pub phi: u64,
    /// `(n/φ(n)) · ln n · ln ln n`.
    pub normalizer: f64,
    pub ratio: f64,
    pub running_max: f64,
    /// `s_min / ln n`, the quantity a logarithmic bound would control.
    pub s_over_log: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthReport {
    pub max_n: u64,
    pub rows: Vec<GrowthRow>,
    pub max_ratio: f64,
    pub argmax: u64,
    pub max_s_over_log: f64,
}

impl GrowthReport {
    pub const CSV_HEADER: &'static str = "n,d,s_min,phi,normalizer,ratio,running_max_ratio,s_over_log_n";

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.rows.len() * 64);
        out.push_str(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{:.9},{:.9},{:.9},{:.9}\n",
                r.n, r.d, r.s_min, r.phi, r.normalizer, r.ratio, r.running_max, r.s_over_log
            ));
        }
        out
    }
}

/// For each `3 <= n <= max_n`: the minimal quotient sum, its normalizer
/// and ratio, and the running maximum of the ratio.
pub fn growth_report(max_n: u64) -> Result<GrowthReport, EuclidError> {
    if max_n < 3 {
        return Err(domain(format!("need max_n >= 3, got {max_n}")));
    }
    let best = best_quotient_sums(max_n);
    let phi = totient_sieve(max_n as usize);
    let mut rows = Vec::with_capacity(max_n as usize);
    let (mut running, mut argmax, mut max_log) = (0.0f64, 3u64, 0.0f64);
    for n in 3..=max_n {
        let (d, s_min) = best[n as usize].expect("n >= 2 always has a coprime d");
        let ln = (n as f64).ln();
        let normalizer = n as f64 / phi[n as usize] as f64 * ln * ln.ln();
        let ratio = s_min as f64 / normalizer;
        if ratio > running {
            running = ratio;
            argmax = n;
        }
        let s_over_log = s_min as f64 / ln;
        max_log = max_log.max(s_over_log);
        rows.push(GrowthRow {
            n,
            d,
            s_min,
            phi: phi[n as usize],
            normalizer,
            ratio,
            running_max: running,
            s_over_log,
        });
    }
    Ok(GrowthReport {
        max_n,
        rows,
        max_ratio: running,
        argmax,
        max_s_over_log: max_log,
    })
}

/// `gcd(n, d) == 1`.
pub fn coprime(n: u64, d: u64) -> bool {
    n.gcd(&d) == 1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn euclidean_sequences() {
        assert_eq!(euclidean_sequence(8, 5).unwrap().terms, vec![8, 5, 3, 2, 1]);
        assert_eq!(euclidean_sequence(5, 1).unwrap().terms, vec![5, 1]);
        assert_eq!(euclidean_sequence(6, 3).unwrap().terms, vec![6, 3]);
        assert_eq!(euclidean_sequence(6, 4).unwrap().gcd(), 2);
        assert_eq!(euclidean_sequence(7, 7).unwrap().terms, vec![7, 7]);
        assert!(euclidean_sequence(3, 0).is_err());
        assert!(euclidean_sequence(3, 4).is_err());
        assert!(euclidean_sequence(0, 0).is_err());
    }

    #[test]
    fn quotient_sequences() {
        let q = quotient_sequence(8, 5).unwrap();
        assert_eq!((q.quotients, q.sum), (vec![1, 1, 1, 2], 5));
        let q = quotient_sequence(7, 3).unwrap();
        assert_eq!((q.quotients, q.sum), (vec![2, 3], 5));
        for n in 1..30 {
            let q = quotient_sequence(n, 1).unwrap();
            assert_eq!((q.quotients, q.sum), (vec![n], n));
            assert_eq!(quotient_sum(n, 1).unwrap(), n);
        }
        assert_eq!(quotient_sum(8, 5).unwrap(), 5);
    }

    #[test]
    fn continuants() {
        assert_eq!(continuant(&[]).unwrap(), big(1));
        assert_eq!(continuant(&[4]).unwrap(), big(4));
        assert_eq!(continuant(&[1, 1, 1, 1, 1]).unwrap(), big(8));
        assert_eq!(continuant(&[2, 3]).unwrap(), big(7));
        assert_eq!(continuant(&[3, 2]).unwrap(), big(7));
        assert!(continuant(&[1, 0, 2]).is_err());
        // Fibonacci growth: X(1^k) = F(k+1)
        assert_eq!(continuant(&[1; 90]).unwrap().to_string(), "4660046610375530309");
    }

    #[test]
    fn chi_maps() {
        assert_eq!(chi(&[]).unwrap(), (big(1), big(1)));
        assert_eq!(chi(&[1, 1, 1, 2]).unwrap(), (big(8), big(5)));
        assert_eq!(chi_prime(&[1, 1, 1, 2]).unwrap(), (big(8), big(3)));
        assert_eq!(chi(&[2, 3]).unwrap(), (big(7), big(3)));
        assert!(chi(&[0]).is_err());
    }

    #[test]
    fn best_sums() {
        assert_eq!(best_quotient_sum(2).unwrap(), (1, 2));
        assert_eq!(best_quotient_sum(3).unwrap(), (1, 3));
        assert_eq!(best_quotient_sum(8).unwrap(), (3, 5));
        assert_eq!(best_quotient_sum(10).unwrap().1, 6);
        assert_eq!(best_quotient_sum(5).unwrap(), (2, 4));
        assert!(best_quotient_sum(1).is_err());
    }

    #[test]
    fn batch_best_sums_match_scans() {
        let batch = best_quotient_sums(600);
        assert_eq!(batch[0], None);
        assert_eq!(batch[1], None);
        for n in 2..=600 {
            assert_eq!(batch[n as usize], Some(best_quotient_sum(n).unwrap()), "n={n}");
        }
        assert_eq!(best_quotient_sums(1), vec![None, None]);
    }

    #[test]
    fn multiplicities() {
        // q(5,1)=(5) q(5,2)=(2,2) q(5,3)=(1,1,2) q(5,4)=(1,4)
        assert_eq!(quotient_multiplicity(5, 2).unwrap(), 3);
        assert_eq!(quotient_multiplicity(5, 5).unwrap(), 1);
        assert_eq!(quotient_multiplicity(5, 1).unwrap(), 3);
        for n in 2..40 {
            assert_eq!(quotient_multiplicity(n, n).unwrap(), 1);
        }
        assert!(quotient_multiplicity(5, 6).is_err());
        assert!(quotient_multiplicity(5, 0).is_err());
    }

    #[test]
    fn totients() {
        assert_eq!(totient(1), 1);
        assert_eq!(totient(10), 4);
        for p in [2u64, 3, 5, 7, 11, 97, 7919] {
            assert_eq!(totient(p), p - 1);
        }
        let sieve = totient_sieve(1000);
        for n in 1..=1000u64 {
            let brute = (1..=n).filter(|&k| coprime(n, k)).count() as u64;
            assert_eq!(sieve[n as usize], brute, "n={n}");
            assert_eq!(totient(n), brute);
        }
    }

    #[test]
    fn tail_reports() {
        let r = tail_report(5, &[1, 5]).unwrap();
        // total quotients over d=1..4: 1 + 2 + 3 + 2 = 8
        assert_eq!(r.rows[0].tail, 8);
        assert_eq!(r.rows[1].tail, 1);
        assert!(r.max_ratio.is_finite());
        assert!(tail_report(5, &[6]).is_err());
        assert!(tail_report(1, &[1]).is_err());
        assert_eq!(standard_cutoffs(1000), vec![1, 10, 47, 100]);
        assert_eq!(standard_cutoffs(5), vec![1, 2]);
    }

    #[test]
    fn growth_small() {
        let r = growth_report(50).unwrap();
        assert_eq!(r.rows[0].n, 3);
        assert_eq!(r.rows[0].s_min, 3);
        assert_eq!(r.rows.len(), 48);
        for w in r.rows.windows(2) {
            assert!(w[1].running_max >= w[0].running_max);
        }
        assert_eq!(r.max_ratio, r.rows.last().unwrap().running_max);
        let csv = r.to_csv();
        assert!(csv.starts_with(GrowthReport::CSV_HEADER));
        assert_eq!(csv.lines().count(), 49);
        assert!(growth_report(2).is_err());
    }
}
