//! Coefficient *-algebras with seminorm towers, and group actions on them.

mod action;
mod algebra;

pub use action::{fit_tempered, make_action, tempered_constant, ActionRule, GroupAction, TemperedFit};
pub use algebra::{
    matrix_algebra, matrix_lift, scalar_algebra, scale_schwartz, schwartz_z, Coeff,
    CoefficientAlgebra,
};
