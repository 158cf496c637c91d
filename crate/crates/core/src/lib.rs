//! Generalized-symmetric subsolutions of Hessian-type equations
//! `f(λ(D²u)) = 1` on exterior domains.

pub mod admissibility;
pub mod config;
pub mod error;
pub mod esym;
pub mod frame;
pub mod interp;
pub mod ode;
pub mod operator;
pub mod perron;
pub mod pipeline;
pub mod quadrature;
pub mod report;
pub mod roots;
pub mod sampling;
pub mod spectral;
pub mod subsolution;
pub mod verification;

pub use error::{Error, Result};
pub use operator::{OperatorSpec, Spectrum};
