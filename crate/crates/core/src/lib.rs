//! Exact-arithmetic toolkit for deciding irreducibility questions about
//! families of sparse (lacunary) integer polynomials.
//!
//! The centerpiece is a pipeline that takes a family
//! `F(x, y) = f_0(x) + f_1(x) y + ... + f_r(x) y^r` and produces a
//! machine-checkable certificate that, for every large n, the part of
//! `F(x, x^n)` left after removing irreducible reciprocal factors is
//! irreducible (or constant).  Supporting modules provide exact integer
//! polynomial arithmetic, univariate and bivariate factorization, reciprocal
//! factor analysis, and substitution-based reducibility tests.

pub mod error;
pub mod intpoly;
pub mod parse;
pub mod gcd;
pub mod bipoly;
pub mod modpoly;
pub mod unifactor;
pub mod bivar;
pub mod capelli;
pub mod lacunary;
pub mod reciprocal;
pub mod pipeline;

pub use error::{Error, Result};
pub use intpoly::{IntPoly, LaurentPoly};
pub use bipoly::BiPoly;
