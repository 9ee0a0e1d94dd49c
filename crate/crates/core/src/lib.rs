//! Invariant-pseudometric toolkit for planar model domains and their products.
//!
//! The crate computes the Kobayashi-Royden pseudometric on the model domains
//! (disc, plane, punctured plane, punctured disc, annuli) and their two-fold
//! products, decides whether the Hahn and Kobayashi-Royden pseudometrics agree
//! on a product, constructs injective analytic discs with prescribed first-order
//! jets, and produces numeric counterexample certificates for the products on
//! which the two pseudometrics differ.
//!
//! Layers, bottom up:
//! - [`jet`], [`expr`], [`parse`]: holomorphic expression trees with exact
//!   forward-mode jets (value, first and second derivative) and a small grammar.
//! - [`aut`]: the automorphism group of the unit disc in (phase, center) normal
//!   form, Möbius distance, two-point interpolation, and the swap involution.
//! - [`domain`], [`covering`]: model domains, universal covering maps with deck
//!   generators, numerical lifting, and displacement probes.
//! - [`metrics`]: Kobayashi-Royden values, Hahn bounds, product classification.
//! - [`injectivize`]: injective discs with g(0)=f(0), g'(0)=θf'(0).
//! - [`counterexample`]: equal-displacement normalization, certificates with
//!   nonvanishing derivative determinants, transversality and persistence.
//!
//! Sampling-heavy verification loops run on rayon when the default `parallel`
//! feature is enabled; sequential twins are always compiled (see [`par`]).
//!
//! ```
//! use kh_core::{metrics, PlanarDomain, C};
//!
//! let annulus = PlanarDomain::annulus(0.3)?;
//! let pdisc = PlanarDomain::pdisc();
//!
//! // the pseudometrics differ on this product...
//! let verdict = metrics::classify_product(&annulus, &pdisc);
//! assert!(!verdict.equal());
//!
//! // ...and a numeric certificate witnesses it
//! let cert = kh_core::counterexample::certify_pair(
//!     &kh_core::covering::covering_of(&annulus)?,
//!     &kh_core::covering::covering_of(&pdisc)?,
//!     None,
//! )?;
//! assert!(cert.absdet() > 1e-6);
//!
//! // while the Kobayashi-Royden value itself is a plain number
//! let k = metrics::kappa(&pdisc, C::new(-0.5, 0.0), C::new(1.0, 0.0))?;
//! assert!((k - 1.0 / 2f64.ln()).abs() < 1e-12);
//! # Ok::<(), kh_core::Error>(())
//! ```

pub mod aut;
pub mod counterexample;
pub mod covering;
pub mod dd;
pub mod domain;
pub mod expr;
pub mod injectivize;
pub mod jet;
pub mod metrics;
pub mod par;
pub mod parse;
pub mod report;
pub mod sample;
pub mod suites;

pub use aut::DiscAut;
pub use covering::{Covering, DeckMap};
pub use domain::PlanarDomain;
pub use expr::HoloExpr;
pub use injectivize::DiscPair;
pub use jet::Jet2;
pub use metrics::{EqualityCase, EqualityVerdict, HahnBounds};
pub use report::Report;

use num_complex::Complex64;

/// Scalar type used throughout.
pub type C = Complex64;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unknown identifier `{name}` at byte {pos}")]
    UnknownIdentifier { name: String, pos: usize },
    #[error("region violation: {0}")]
    Region(String),
    #[error("nonfinite value in {0}")]
    NonFinite(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("classification mismatch: {0}")]
    CaseMismatch(String),
    #[error("numerical failure: {0}")]
    Numerics(String),
}

impl Error {
    /// Stable process exit code for the CLI: 2 input error, 3 degenerate
    /// mathematical input, 4 classification mismatch, 1 everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. }
            | Error::UnknownIdentifier { .. }
            | Error::Region(_)
            | Error::NonFinite(_)
            | Error::InvalidArgument(_) => 2,
            Error::Degenerate(_) => 3,
            Error::CaseMismatch(_) => 4,
            Error::Numerics(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite(z: C, what: &str) -> Result<C> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::NonFinite(what.to_string()))
    }
}

/// Render a complex number in the literal grammar (`a`, `bi`, `a+bi`, `a-bi`).
pub fn format_complex(z: C) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.re == 0.0 {
        format!("{}i", z.im)
    } else if z.im < 0.0 {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}
