//! Runs the guide's Rust listings as doctests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/operators.md")]
pub mod operators {}
#[doc = include_str!("../../../book/src/admissibility.md")]
pub mod admissibility {}
#[doc = include_str!("../../../book/src/profiles.md")]
pub mod profiles {}
#[doc = include_str!("../../../book/src/verification.md")]
pub mod verification {}
#[doc = include_str!("../../../book/src/perron.md")]
pub mod perron {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
