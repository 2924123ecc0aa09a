//! Algebras carrying an increasing seminorm tower, and their unitizations.

use num_complex::Complex64;
use serde::Serialize;

use crate::coeff::{Coeff, CoefficientAlgebra};
use crate::error::Result;

/// An algebra together with seminorms `‖·‖_0 ≤ ‖·‖_1 ≤ …`.
pub trait TowerAlgebra {
    type Elem: Clone;

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem>;
    /// `a + c·b`.
    fn axpy(&self, a: &Self::Elem, c: Complex64, b: &Self::Elem) -> Result<Self::Elem>;
    fn scale(&self, a: &Self::Elem, c: Complex64) -> Self::Elem;
    fn seminorm(&self, a: &Self::Elem, m: usize) -> Result<f64>;

    /// Number of stored terms, for sample descriptions.
    fn support_size(&self, _a: &Self::Elem) -> usize {
        1
    }

    /// `a₁ ⋯ a_n` for a nonempty chain.
    fn chain_product(&self, chain: &[Self::Elem]) -> Result<Self::Elem> {
        let (first, rest) = chain.split_first().expect("empty chain");
        rest.iter().try_fold(first.clone(), |acc, x| self.mul(&acc, x))
    }
}

impl TowerAlgebra for CoefficientAlgebra {
    type Elem = Coeff;

    fn mul(&self, a: &Coeff, b: &Coeff) -> Result<Coeff> {
        CoefficientAlgebra::mul(self, a, b)
    }

    fn axpy(&self, a: &Coeff, c: Complex64, b: &Coeff) -> Result<Coeff> {
        Ok(CoefficientAlgebra::axpy(self, a, c, b))
    }

    fn scale(&self, a: &Coeff, c: Complex64) -> Coeff {
        CoefficientAlgebra::scale(self, a, c)
    }

    fn seminorm(&self, a: &Coeff, m: usize) -> Result<f64> {
        Ok(CoefficientAlgebra::seminorm(self, a, m))
    }

    fn support_size(&self, a: &Coeff) -> usize {
        match a {
            Coeff::Scalar(_) => 1,
            Coeff::Func(f) => f.len(),
            Coeff::Matrix(m) => m.iter().map(|x| self.support_size(x)).sum(),
        }
    }
}

/// `a + λ1` in the unitization of a possibly non-unital algebra.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Unitized<E> {
    pub a: E,
    pub lambda: Complex64,
}

/// The unitization `Ã` with `‖a+λ1‖′_0 = ‖a‖_0 + |λ|` and
/// `‖a+λ1‖′_m = ‖a‖_m` for `m > 0`.
#[derive(Clone, Debug)]
pub struct Unitization<A>(pub A);

impl<A: TowerAlgebra> TowerAlgebra for Unitization<A> {
    type Elem = Unitized<A::Elem>;

    /// `(a, λ)(b, μ) = (ab + λb + μa, λμ)`.
    fn mul(&self, x: &Self::Elem, y: &Self::Elem) -> Result<Self::Elem> {
        let ab = self.0.mul(&x.a, &y.a)?;
        let t = self.0.axpy(&ab, x.lambda, &y.a)?;
        let a = self.0.axpy(&t, y.lambda, &x.a)?;
        Ok(Unitized { a, lambda: x.lambda * y.lambda })
    }

    fn axpy(&self, x: &Self::Elem, c: Complex64, y: &Self::Elem) -> Result<Self::Elem> {
        Ok(Unitized { a: self.0.axpy(&x.a, c, &y.a)?, lambda: x.lambda + c * y.lambda })
    }

    fn scale(&self, x: &Self::Elem, c: Complex64) -> Self::Elem {
        Unitized { a: self.0.scale(&x.a, c), lambda: x.lambda * c }
    }

    fn seminorm(&self, x: &Self::Elem, m: usize) -> Result<f64> {
        let s = self.0.seminorm(&x.a, m)?;
        Ok(if m == 0 { s + x.lambda.norm() } else { s })
    }

    fn support_size(&self, x: &Self::Elem) -> usize {
        self.0.support_size(&x.a) + 1
    }
}
