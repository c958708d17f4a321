//! Exact truncated polynomial algebra over the rationals.
//!
//! Polynomials are sparse maps from exponent vectors to [`BigRational`](num_rational::BigRational)
//! coefficients. Jet spaces `J^l` and their finite products carry subspaces in exact
//! echelon form, which is all the linear algebra the tangent computations need.

mod parse;
mod poly;
mod space;
mod vars;

use thiserror::Error;

pub use parse::{infer_spec, parse_poly, scan_names};
pub use poly::{q, Monomial, Poly, Q};
pub use space::{module_span, Coeff, JetSpace, LinSubspace, ProductSpace, QuotientElem, SVec, VarSel};
pub use vars::{Role, Var, VarSpec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum JetError {
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown variable `{0}`")]
    UnknownVar(String),
    #[error("invalid variable spec: {0}")]
    Spec(String),
    #[error("spec mismatch: {0}")]
    Mismatch(String),
}

/// Partial derivative by variable name.
pub fn diff(p: &Poly, v: &str) -> Result<Poly, JetError> {
    p.diff_named(v)
}

/// Product truncated at total degree `l`.
pub fn mul_truncate(a: &Poly, b: &Poly, l: u32) -> Poly {
    a.mul_truncate(b, l)
}

/// Monomials of a jet space with `dmin <= degree <= dmax`, optionally restricted to named variables.
pub fn monomials(space: &JetSpace, dmin: u32, dmax: u32, restrict: Option<&[&str]>) -> Result<Vec<Monomial>, JetError> {
    let idx = match restrict {
        None => None,
        Some(names) => Some(
            names
                .iter()
                .map(|n| space.spec().index(n).ok_or_else(|| JetError::UnknownVar(n.to_string())))
                .collect::<Result<Vec<_>, _>>()?,
        ),
    };
    Ok(space.monomials(dmin, dmax, idx.as_deref()))
}

/// Quotient basis of `ambient / sub`, low-degree representatives first.
pub fn quotient_basis(sub: &LinSubspace) -> Vec<QuotientElem> {
    sub.quotient_basis()
}
