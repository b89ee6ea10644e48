//! The combined desk-scale check run by `lextent verify`.

use std::path::Path;

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::constructor::{path_from_coprime_pair, poset_for_target, ConstructOptions};
use crate::count::{count_extensions_auto, factorial, BigCount};
use crate::euclid::{coprime, quotient_sum};
use crate::family::{build_family_poset, verify_family_layer};
use crate::spectrum::{
    cached_spectrum, smallest_missing, top_interval_bound, top_interval_count, verify_component_bound,
    verify_connected_bound, verify_top_intervals, Spectrum, SpectrumError, SpectrumOptions,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckRow {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn row(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> CheckRow {
    CheckRow {
        name: name.into(),
        passed,
        detail: detail.into(),
    }
}

fn spectrum_rows(spectra: &[Spectrum]) -> Vec<CheckRow> {
    let max_n = spectra.len() - 1;
    let mut rows = Vec::new();
    let nested = (1..max_n).all(|n| spectra[n].values.iter().all(|v| spectra[n + 1].contains(v)));
    rows.push(row("LE(n) nested", nested, format!("n <= {max_n}")));

    let small = (1..=max_n).all(|n| (1..=n as u64).all(|k| spectra[n].contains(&BigCount::from(k))));
    rows.push(row("1..n in LE(n)", small, format!("n <= {max_n}")));

    let gap = (1..=max_n).all(|n| {
        let nf = factorial(n);
        !spectra[n].values.iter().any(|v| v * 2u32 > nf && *v < nf)
    });
    rows.push(row("no values in (n!/2, n!)", gap, format!("n <= {max_n}")));

    let top = (2..=max_n).all(|n| {
        let nf = factorial(n);
        let top: Vec<&BigCount> = spectra[n].values.iter().rev().take(2).collect();
        top == [&nf, &(&nf / 2u32)]
    });
    rows.push(row("top two values n!, n!/2", top, format!("2 <= n <= {max_n}")));

    let mut pairs = 0;
    let mut bad = Vec::new();
    for n in 2..=max_n {
        for r in 1..n {
            pairs += 1;
            if !verify_top_intervals(&spectra[n], &spectra[r]).equal {
                bad.push(format!("({n},{r})"));
            }
        }
    }
    rows.push(row(
        "top intervals are dilated spectra",
        bad.is_empty(),
        format!(
            "{pairs} pairs (n, r){}",
            if bad.is_empty() {
                String::new()
            } else {
                format!(", failing {}", bad.join(" "))
            }
        ),
    ));

    if max_n >= 2 {
        let counts: Vec<usize> = (2..=max_n).map(|n| top_interval_count(&spectra[n])).collect();
        let bounds: Vec<BigCount> = (2..=max_n).map(top_interval_bound).collect();
        let ok = counts[0] == 1 && counts.iter().zip(&bounds).all(|(c, b)| BigCount::from(*c as u64) <= *b);
        rows.push(row(
            "N(n) within recursive bound",
            ok,
            format!(
                "N = {counts:?}, bounds = {:?}",
                bounds
                    .iter()
                    .map(|b| b.to_u64().unwrap_or(u64::MAX))
                    .collect::<Vec<_>>()
            ),
        ));
    }

    let m: Vec<String> = (1..=max_n).map(|n| smallest_missing(&spectra[n]).to_string()).collect();
    let ok = (1..=max_n).all(|n| smallest_missing(&spectra[n]) > BigCount::from(n as u64));
    rows.push(row("M(n) > n", ok, format!("M = [{}]", m.join(", "))));
    rows
}

/// Spectrum, connected-bound and component-bound checks for `n <= max_n`,
/// plus family, coprime-path and constructor spot checks.
pub fn full_suite(max_n: usize, cache_dir: Option<&Path>) -> Result<Vec<CheckRow>, SpectrumError> {
    let opts = SpectrumOptions::default();
    let spectra = (0..=max_n)
        .map(|n| cached_spectrum(n, cache_dir, &opts))
        .collect::<Result<Vec<_>, _>>()?;
    let mut rows = spectrum_rows(&spectra);

    let mut ok61 = true;
    let mut ok62 = true;
    for n in 1..=max_n {
        ok61 &= verify_connected_bound(n)?.passed();
        ok62 &= verify_component_bound(n)?.passed();
    }
    rows.push(row(
        "connected posets: ext <= (n-1)!",
        ok61,
        format!("1 <= n <= {max_n}, equality cases checked"),
    ));
    rows.push(row(
        "component bound ext (n - m) <= n!",
        ok62,
        format!("1 <= n <= {max_n}, all largest components"),
    ));

    let family = verify_family_layer(12);
    rows.push(row(
        "family counts match tree",
        family.passed(),
        format!("{} paths through stage 12", family.posets_checked),
    ));

    let mut pair_failures = 0;
    let mut pairs = 0;
    for n in 2..=60u64 {
        for d in (1..n).filter(|&d| coprime(n, d)) {
            pairs += 1;
            let ok = path_from_coprime_pair(n, d).is_ok_and(|p| {
                p.stage() as u64 <= quotient_sum(n, d).unwrap_or(0) + 1
                    && count_extensions_auto(&build_family_poset(&p).poset).is_ok_and(|c| c == BigCount::from(n))
            });
            if !ok {
                pair_failures += 1;
            }
        }
    }
    rows.push(row(
        "coprime pair paths",
        pair_failures == 0,
        format!("{pairs} pairs with n <= 60, stage <= s(n,d) + 1"),
    ));

    let construct_failures = (1..=500u64)
        .filter(|&m| poset_for_target(m, ConstructOptions::default()).is_err())
        .count();
    rows.push(row(
        "constructor targets",
        construct_failures == 0,
        "targets 1..=500 verified by counting",
    ));
    Ok(rows)
}
