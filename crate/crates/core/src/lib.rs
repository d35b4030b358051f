//! Recognition of 2D linear graphic symbols.
//!
//! The pipeline turns a vectorized symbol into an attributed relational graph
//! ([`arg`]), summarizes the graph as a 21-integer structural signature
//! ([`signature`]), discretizes signatures per feature ([`discretize`]) and
//! classifies them with a Bayesian network learned from labelled examples
//! ([`bayesnet`], [`classifier`]). [`datagen`] produces synthetic symbol
//! libraries with rotated, scaled, deformed and degraded variants.
//!
//! ```
//! use symrec::{arg::{build_arg, ArgConfig}, geometry::VectorSymbol, signature::compute_signature};
//!
//! let plus = VectorSymbol::from_segments(&[((0.0, 1.0), (2.0, 1.0)), ((1.0, 0.0), (1.0, 2.0))])?;
//! let sig = compute_signature(&build_arg(&plus, &ArgConfig::default()));
//! assert_eq!(sig.f(1), 2); // nodes
//! assert_eq!(sig.f(12), 1); // one crossing
//! # Ok::<(), symrec::Error>(())
//! ```

pub mod arg;
pub mod bayesnet;
pub mod classifier;
pub mod datagen;
pub mod discretize;
mod error;
pub mod geometry;
pub mod model_io;
pub mod signature;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/signatures.md")]
    mod signatures {}
    #[doc = include_str!("../../../book/src/discretization.md")]
    mod discretization {}
    #[doc = include_str!("../../../book/src/bayesian-networks.md")]
    mod bayesian_networks {}
    #[doc = include_str!("../../../book/src/recognition.md")]
    mod recognition {}
    #[doc = include_str!("../../../book/src/synthetic-data.md")]
    mod synthetic_data {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/file-formats.md")]
    mod file_formats {}
}
