//! Crossed products `G ⋊ A`: twisted convolution, involution, weighted
//! norms, powers and exponentials of finitely supported elements.

mod element;
mod exact;

use std::sync::Arc;

use num_complex::Complex64;

pub use element::{
    parse_element_literal, CoeffLiteral, CrossedElement, CrossedProduct, ElementTerms,
    DEFAULT_SUPPORT_BUDGET,
};
pub use exact::{exact_root, ExactElement};

use crate::error::Result;
use crate::tower::{TowerAlgebra, Unitization, Unitized};

pub type UnitizedElement = Unitized<CrossedElement>;

pub fn unitize(phi: CrossedElement, lambda: Complex64) -> UnitizedElement {
    Unitized { a: phi, lambda }
}

/// Seminorm of the unitization of `G ⋊ A` built on the tower `‖·‖_{m,m}`.
pub fn unitized_seminorm(x: &UnitizedElement, m: usize) -> Result<f64> {
    Unitization(x.a.context().clone()).seminorm(x, m)
}

pub fn unitized_mul(x: &UnitizedElement, y: &UnitizedElement) -> Result<UnitizedElement> {
    Unitization(x.a.context().clone()).mul(x, y)
}

/// Shared handle used as the algebra argument of the generic checks.
pub type CrossedHandle = Arc<CrossedProduct>;

#[cfg(test)]
mod tests;
