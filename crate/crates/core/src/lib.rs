//! Reticular contact singularities of multi-germs on corners.
//!
//! The crate computes tangent spaces, codimensions, determinacy and versality of
//! multi-germs `f = (f_1, ..., f_m)` with `f_i` defined on `H^r x R^k`, recognises the
//! simple normal forms `A_k`, `B_k`, `C_k`, `F_4`, builds versal and codimension-one
//! generating families, and traces the wavefronts those families generate.

pub mod classify;
pub mod cli;
pub mod front;
pub mod jetalg;
pub mod tangent;
pub mod unfold;
