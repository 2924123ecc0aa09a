use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coeff::Coeff;
use crate::crossed::{unitize, unitized_mul, unitized_seminorm, CrossedElement, UnitizedElement};
use crate::error::{Error, Result};

/// Tail ratio and verdict for one weighted norm `‖·‖_{d,m}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailRatio {
    pub d: u32,
    pub m: usize,
    /// `(t_N / t_{N'})^{1/(N−N')}` with `t_n = ‖aⁿ‖_{d,m}` and `N' = ⌈N/2⌉`.
    pub ratio: f64,
    pub converges: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InversionCertificate {
    /// Number of nonzero powers `aⁿ`, `n ≥ 1`, in the partial sum.
    pub terms: usize,
    pub tails: Vec<TailRatio>,
    /// `‖x·inv − 1‖_0`, recomputed from the product.
    pub residual: f64,
    pub tol: f64,
    pub converged: bool,
}

/// Tail ratios below this count as geometric decay.
pub const DECAY_THRESHOLD: f64 = 0.9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NeumannOptions {
    pub tol: f64,
    pub d_max: u32,
    pub m_max: usize,
    pub max_terms: usize,
}

impl Default for NeumannOptions {
    fn default() -> Self {
        NeumannOptions { tol: 1e-10, d_max: 6, m_max: 0, max_terms: 4096 }
    }
}

/// Splits a unital element into `a + λ1` with `λ = φ(e)`, for scalar
/// coefficients.
pub fn split_unit(phi: &CrossedElement) -> Result<UnitizedElement> {
    let ctx = phi.context();
    if !ctx.is_scalar_trivial() {
        return Err(Error::Unsupported("split_unit needs scalar coefficients".into()));
    }
    let e = ctx.group().identity();
    let lambda = match phi.get(&e) {
        Some(Coeff::Scalar(c)) => *c,
        _ => Complex64::new(0.0, 0.0),
    };
    let unit = CrossedElement::identity(ctx)?;
    Ok(unitize(phi.axpy(-lambda, &unit)?, lambda))
}

/// Inverts `x = a₀ + λ1` as `λ⁻¹ Σ aⁿ` with `a = −a₀/λ`, stopping at the
/// first power with `‖aⁿ‖_{0,0} < tol`.
pub fn neumann_inverse(
    x: &UnitizedElement,
    opts: &NeumannOptions,
) -> Result<(UnitizedElement, InversionCertificate)> {
    if x.lambda.norm() == 0.0 {
        return Err(Error::Domain("unit coefficient is zero".into()));
    }
    let inv_lambda = x.lambda.inv();
    let a = x.a.scale(-inv_lambda);
    let grid: Vec<(u32, usize)> =
        (0..=opts.d_max).flat_map(|d| (0..=opts.m_max).map(move |m| (d, m))).collect();

    let mut history: Vec<Vec<f64>> = Vec::new();
    let mut sum = CrossedElement::zero(x.a.context());
    let mut power = a.clone();
    let mut n = 1usize;
    loop {
        let t = power.weighted_norm(0, 0)?;
        history.push(grid.iter().map(|&(d, m)| power.weighted_norm(d, m)).collect::<Result<_>>()?);
        if t < opts.tol {
            break;
        }
        if n >= 64 && t.powf(1.0 / n as f64) >= 1.0 {
            return Err(Error::NoDecay { terms: n, last_norm: t });
        }
        if n > opts.max_terms {
            return Err(Error::NoDecay { terms: n, last_norm: t });
        }
        sum = sum.add(&power)?;
        power = power.convolve(&a)?;
        n += 1;
    }
    let terms = n - 1;
    let inverse = unitize(sum.scale(inv_lambda), inv_lambda);

    let product = unitized_mul(x, &inverse)?;
    let residual = unitized_seminorm(&unitize(product.a, product.lambda - 1.0), 0)?;

    let last = history.len();
    let mid = last.div_ceil(2);
    let tails = grid
        .iter()
        .enumerate()
        .map(|(j, &(d, m))| {
            let t_last = history[last - 1][j];
            let ratio = if t_last == 0.0 {
                0.0
            } else if last - mid == 0 {
                t_last
            } else {
                (t_last / history[mid - 1][j]).powf(1.0 / (last - mid) as f64)
            };
            TailRatio { d, m, ratio, converges: ratio < DECAY_THRESHOLD }
        })
        .collect();
    let converged = residual <= opts.tol;
    Ok((inverse, InversionCertificate { terms, tails, residual, tol: opts.tol, converged }))
}
