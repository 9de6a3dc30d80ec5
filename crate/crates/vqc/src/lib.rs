//! Classical simulation of variational quantum classifiers.
//!
//! The crate covers quantum circuit learning ([`qcl`]), the unitary kernel
//! method ([`ukm`]) with operator unitarization, kernel ridge baselines
//! ([`kernel`]) and variational circuit realization ([`vcr`]), plus the
//! cross-validation harness that drives them ([`harness`]).
//!
//! The guide in `book/` is included under `cfg(doctest)` so that every code
//! snippet in it runs as a doc-test.

pub mod ansatz;
pub mod encode;
pub mod error;
pub mod gates;
pub mod harness;
pub mod kernel;
pub mod optim;
pub mod predict;
pub mod qcl;
pub mod qmat;
pub mod tol;
pub mod ukm;
pub mod umat;
pub mod vcr;

pub use error::{Error, Result};

#[cfg(doctest)]
pub mod guide {
    #[doc = include_str!("../../../book/src/intro.md")]
    pub struct Intro;
    #[doc = include_str!("../../../book/src/encoding.md")]
    pub struct Encoding;
    #[doc = include_str!("../../../book/src/circuits.md")]
    pub struct Circuits;
    #[doc = include_str!("../../../book/src/qcl.md")]
    pub struct Qcl;
    #[doc = include_str!("../../../book/src/ukm.md")]
    pub struct Ukm;
    #[doc = include_str!("../../../book/src/kernel.md")]
    pub struct Kernel;
    #[doc = include_str!("../../../book/src/vcr.md")]
    pub struct Vcr;
    #[doc = include_str!("../../../book/src/harness.md")]
    pub struct Harness;
    #[doc = include_str!("../../../book/src/formats.md")]
    pub struct Formats;
    #[doc = include_str!("../../../book/src/numerics.md")]
    pub struct Numerics;
}
