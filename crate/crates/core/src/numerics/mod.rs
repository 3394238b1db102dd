//! Numerical kernels: adaptive quadrature, principal values, improper
//! integrals and bracketed root finding.

mod quadrature;
mod roots;

pub use quadrature::{
    integrate, integrate_semi_infinite, principal_value, Quadrature, QuadratureResult, DEFAULT_MAX_DEPTH,
    DEFAULT_REL_TOL,
};
pub use roots::{find_root, RootResult};
