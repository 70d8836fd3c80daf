//! Two-setting Bell inequalities for many qubits.
//!
//! The central object is the extended Bell operator
//!
//! ```text
//! B = B_{N−1} ⊗ ½(A_N + A'_N) + 1 ⊗ ½(A_N − A'_N)
//! ```
//!
//! where `B_{N−1}` is a full-correlation WWZB operator generated by a sign
//! function (the MABK polynomial being the standard choice). Local realism
//! bounds `|⟨B⟩|` by 1; GHZ states reach `2^{(N−2)/2}`.
//!
//! * [`bell`] builds sign tables, term expansions and dense operators.
//! * [`lhv`] certifies the local bound by enumerating deterministic strategies.
//! * [`states`] provides GHZ, generalized GHZ, W, cluster and noisy GHZ states.
//! * [`analysis`] computes quantum values, closed forms and optimized settings.
//!
//! ```
//! use bell_core::analysis::{canonical_gghz_settings, max_violation};
//! use bell_core::bell::extended_mabk_terms;
//!
//! let terms = extended_mabk_terms(4)?;
//! let settings = canonical_gghz_settings(4, std::f64::consts::FRAC_PI_4)?;
//! assert!((max_violation(&terms, &settings)? - 2.0).abs() < 1e-8);
//! # Ok::<(), bell_core::BellError>(())
//! ```

pub mod analysis;
pub mod bell;
pub mod error;
pub mod lhv;
pub mod linalg;
pub mod observables;
pub mod optimize;
pub mod report;
pub mod states;

pub use error::{BellError, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/operators.md")]
    mod operators {}
    #[doc = include_str!("../../../book/src/lhv.md")]
    mod lhv {}
    #[doc = include_str!("../../../book/src/ghz.md")]
    mod ghz {}
    #[doc = include_str!("../../../book/src/optimization.md")]
    mod optimization {}
    #[doc = include_str!("../../../book/src/noise.md")]
    mod noise {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
