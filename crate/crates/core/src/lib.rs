//! Exact linear-extension counting for finite posets, a width-2 poset family
//! indexed by dyadic paths, Euclid quotient statistics, target constructions
//! and small-`n` spectra.

pub mod constructor;
pub mod count;
pub mod euclid;
pub mod family;
pub mod poset;
pub mod spectrum;
pub mod suite;

pub use count::{count_extensions, count_extensions_auto, BigCount, CountError};
pub use poset::{Poset, PosetError};
