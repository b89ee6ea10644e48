//! Browser bindings for three operations: inspect a family poset, build a
//! poset for a target count, and list quotient sums for a modulus. Each
//! returns a JSON string so the page needs no generated types.

use lextent::constructor::{poset_for_target, ConstructOptions};
use lextent::count::count_extensions_auto;
use lextent::euclid::{best_quotient_sum, coprime, quotient_sum, totient};
use lextent::family::{build_family_poset, stern_brocot_entry, tree_ext, DyadicPath};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Largest modulus the scatter view accepts.
pub const EUCLID_MAX_N: u64 = 20_000;
/// Longest path the family view accepts.
pub const FAMILY_MAX_BITS: usize = 64;

pub fn family(path: &str) -> Result<String, String> {
    let path: DyadicPath = path.trim().parse().map_err(|e| format!("{e}"))?;
    if path.bits().len() > FAMILY_MAX_BITS {
        return Err(format!("paths are limited to {FAMILY_MAX_BITS} digits"));
    }
    let fp = build_family_poset(&path);
    let counted = count_extensions_auto(&fp.poset).map_err(|e| e.to_string())?;
    Ok(json!({
        "path": path.to_string(),
        "elements": fp.poset.len(),
        "entry": stern_brocot_entry(&path).to_string(),
        "tree_ext": tree_ext(&path).to_string(),
        "counted_ext": counted.to_string(),
        "left_chain": fp.left_chain,
        "right_chain": fp.right_chain,
        "edges": fp.poset.hasse_edges(),
    })
    .to_string())
}

pub fn construct(target: &str) -> Result<String, String> {
    let m: u64 = target
        .trim()
        .parse()
        .map_err(|_| format!("not a positive integer: {target:?}"))?;
    let r = poset_for_target(m, ConstructOptions::default()).map_err(|e| e.to_string())?;
    let counted = count_extensions_auto(&r.poset).map_err(|e| e.to_string())?;
    Ok(json!({
        "target": m.to_string(),
        "elements": r.size,
        "recipe": r.recipe,
        "verified_ext": counted.to_string(),
        "edges": r.poset.hasse_edges(),
        "text": r.poset.to_text(),
    })
    .to_string())
}

pub fn euclid(n: u64) -> Result<String, String> {
    if !(2..=EUCLID_MAX_N).contains(&n) {
        return Err(format!("n must lie in 2..={EUCLID_MAX_N}"));
    }
    let (best_d, s_min) = best_quotient_sum(n).map_err(|e| e.to_string())?;
    let points: Vec<[u64; 2]> = (1..n)
        .filter(|&d| coprime(n, d))
        .map(|d| [d, quotient_sum(n, d).expect("1 <= d < n")])
        .collect();
    Ok(json!({
        "n": n,
        "phi": totient(n),
        "best_d": best_d,
        "s_min": s_min,
        "points": points,
    })
    .to_string())
}

#[wasm_bindgen(js_name = familyJson)]
pub fn family_json(path: &str) -> Result<String, JsValue> {
    family(path).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = constructJson)]
pub fn construct_json(target: &str) -> Result<String, JsValue> {
    construct(target).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = euclidJson)]
pub fn euclid_json(n: u32) -> Result<String, JsValue> {
    euclid(n as u64).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    fn parse(s: String) -> Value {
        serde_json::from_str(&s).unwrap()
    }

    #[test]
    fn family_view() {
        let v = parse(family("011").unwrap());
        assert_eq!(v["path"], "0.011");
        assert_eq!(v["elements"], 4);
        assert_eq!(v["entry"], "2/5");
        assert_eq!(v["counted_ext"], "3");
        assert_eq!(v["tree_ext"], "3");
        assert!(family("010").is_err());
        assert!(family("01x").is_err());
        assert!(family(&"1".repeat(65)).is_err());
    }

    #[test]
    fn construct_view() {
        let v = parse(construct("6").unwrap());
        assert_eq!(v["verified_ext"], "6");
        assert_eq!(v["recipe"]["kind"], "blocks");
        assert!(v["text"].as_str().unwrap().starts_with("poset v1\n"));
        assert!(construct("0").is_err());
        assert!(construct("six").is_err());
    }

    #[test]
    fn euclid_view() {
        let v = parse(euclid(8).unwrap());
        assert_eq!(v["best_d"], 3);
        assert_eq!(v["s_min"], 5);
        assert_eq!(v["phi"], 4);
        assert_eq!(v["points"], serde_json::json!([[1, 8], [3, 5], [5, 5], [7, 8]]));
        assert!(euclid(1).is_err());
        assert!(euclid(EUCLID_MAX_N + 1).is_err());
    }
}
