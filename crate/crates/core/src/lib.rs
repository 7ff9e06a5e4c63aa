//! Nonlinear discrete `(a,p)`-capacities on the dyadic tree.
//!
//! The guide in `book/` walks through each module; its code blocks run as
//! doc tests of this crate.

pub mod circle;
pub mod dobinski;
pub mod error;
pub mod exponents;
pub mod logvalue;
pub mod oracle;
pub mod phi;
mod quadrature;
pub mod tree;

pub use error::{Error, Result};
pub use exponents::{Branch, Exponents, Rational};
pub use logvalue::LogValue;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/exponents.md")]
    mod exponents {}
    #[doc = include_str!("../../../book/src/tree.md")]
    mod tree {}
    #[doc = include_str!("../../../book/src/recursion.md")]
    mod recursion {}
    #[doc = include_str!("../../../book/src/dobinski.md")]
    mod dobinski {}
    #[doc = include_str!("../../../book/src/oracle.md")]
    mod oracle {}
    #[doc = include_str!("../../../book/src/circle.md")]
    mod circle {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
