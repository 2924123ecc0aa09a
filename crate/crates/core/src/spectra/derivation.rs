use std::collections::HashSet;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::crossed::CrossedElement;
use crate::error::{Error, Result};
use crate::groups::{Element, Gauge};

use super::cstar::BallOperator;

/// Largest ball, in pairs `|B_R|²`, for the explicit kernel.
const KERNEL_PAIR_CAP: usize = 25_000_000;

/// The `k`-fold commutator `δᵏ(φ)`, `δ = i[D, ·]` with `D` multiplication by
/// `τ`, applied to `δ_e ⊗ η`, next to the multiplier form
/// `iᵏ τᵏ(g) α_{g⁻¹}(φ(g)) η`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivationReport {
    pub k: u32,
    pub radius: u32,
    pub ball: Vec<Element>,
    pub operator_side: Vec<Complex64>,
    pub multiplier_side: Vec<Complex64>,
    pub max_difference: f64,
    /// Schur bound of the kernel `|τ(g)−τ(h)| ‖K(g,h)‖`, and its ceiling
    /// `‖τφ‖_{0,0}`.
    pub commutator_schur: f64,
    pub schur_ceiling: f64,
}

pub fn derivation_check(phi: &CrossedElement, k: u32, radius: u32) -> Result<DerivationReport> {
    let ctx = phi.context();
    let group = ctx.group();
    let alg = ctx.algebra();
    let dim = alg
        .hilbert_dim()
        .ok_or_else(|| Error::Unsupported(format!("{} has no finite representation", alg.name())))?;
    let ball = ctx.gauge().ball(radius)?;
    if ball.len().saturating_mul(ball.len()) > KERNEL_PAIR_CAP {
        return Err(Error::MemoryBudget { budget: KERNEL_PAIR_CAP });
    }
    let members: HashSet<&Element> = ball.iter().collect();
    if let Some(g) = phi.terms().keys().find(|g| !members.contains(g)) {
        return Err(Error::Domain(format!("window B_{radius} misses support point {g}")));
    }
    let tau: Vec<f64> = ball.iter().map(|g| ctx.gauge().length(g).map(|t| t as f64)).collect::<Result<_>>()?;
    let eta = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
    let e = group.identity();

    // explicit kernel on B_R × B_R, applied to δ_e ⊗ η by a full matvec
    let mut xi = vec![Complex64::new(0.0, 0.0); ball.len() * dim];
    let e_idx = ball.iter().position(|g| *g == e).expect("identity lies in every ball");
    for j in 0..dim {
        xi[e_idx * dim + j] = eta;
    }
    let ik = Complex64::i().powu(k);
    let mut operator_side = vec![Complex64::new(0.0, 0.0); ball.len() * dim];
    let mut row_sums = vec![0.0f64; ball.len()];
    let mut col_sums = vec![0.0f64; ball.len()];
    for (r, g) in ball.iter().enumerate() {
        let gi = group.inverse(g);
        for (c, y) in ball.iter().enumerate() {
            let h = group.multiply(g, &group.inverse(y));
            let Some(a) = phi.get(&h) else { continue };
            let kernel = ctx.action().apply(&gi, a);
            let diff = tau[r] - tau[c];
            let s = diff.abs() * alg.norm(&kernel);
            row_sums[r] += s;
            col_sums[c] += s;
            let w = ik * diff.powi(k as i32);
            let block = alg.represent(&kernel)?;
            for i in 0..dim {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..dim {
                    acc += block[i * dim + j] * xi[c * dim + j];
                }
                operator_side[r * dim + i] += w * acc;
            }
        }
    }
    let commutator_schur = row_sums.iter().chain(&col_sums).copied().fold(0.0, f64::max);

    let multiplier = phi.gauge_multiplier(k)?.scale(ik);
    let op = BallOperator::new(&multiplier, radius)?;
    let multiplier_side = op.apply(&xi);
    let max_difference = operator_side
        .iter()
        .zip(&multiplier_side)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    let schur_ceiling = phi.gauge_multiplier(1)?.weighted_norm(0, 0)?;
    Ok(DerivationReport {
        k,
        radius,
        ball,
        operator_side,
        multiplier_side,
        max_difference,
        commutator_schur,
        schur_ceiling,
    })
}
