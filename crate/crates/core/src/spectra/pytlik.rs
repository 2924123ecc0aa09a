use serde::{Deserialize, Serialize};

use crate::crossed::{CrossedElement, ExactElement};
use crate::error::{Error, Result};
use crate::groups::{ball_sizes, GrowthClass};

use super::cstar::cstar_upper_bound;

/// Self-adjointness tolerance for the ratio sequence.
pub const SELF_ADJOINT_TOL: f64 = 1e-12;

/// `a_n = ‖φ^{n+2}‖₁ / ‖φⁿ‖₁`, whose limsup is `ν(φ)²` for self-adjoint `φ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PytlikReport {
    pub ratios: Vec<(u64, f64)>,
    /// Maximum of `a_n` over the second half of the sequence.
    pub limsup: f64,
    /// Integer mode: `a_n` when the division is exact.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<Vec<Option<u128>>>,
}

fn tail_max(ratios: &[(u64, f64)]) -> f64 {
    ratios[ratios.len() / 2..].iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max)
}

pub fn pytlik_ratio(phi: &CrossedElement, n_max: u64) -> Result<PytlikReport> {
    if n_max < 1 {
        return Err(Error::Domain("n_max must be positive".into()));
    }
    let defect = phi.self_adjoint_defect();
    if defect > SELF_ADJOINT_TOL {
        return Err(Error::Domain(format!("element is not self-adjoint (defect {defect:e})")));
    }
    if phi.is_zero() {
        return Err(Error::Domain("ratio sequence of the zero element".into()));
    }
    let mut norms = vec![CrossedElement::identity(phi.context())?.l1_norm()];
    let mut power = phi.clone();
    for _ in 1..n_max + 2 {
        norms.push(power.l1_norm());
        power = power.convolve(phi)?;
    }
    norms.push(power.l1_norm());
    let ratios: Vec<(u64, f64)> =
        (0..=n_max).map(|n| (n, norms[n as usize + 2] / norms[n as usize])).collect();
    Ok(PytlikReport { limsup: tail_max(&ratios), ratios, exact: None })
}

pub fn pytlik_ratio_exact(phi: &ExactElement, n_max: u64) -> Result<PytlikReport> {
    if phi.terms().is_empty() {
        return Err(Error::Domain("ratio sequence of the zero element".into()));
    }
    // real coefficients under the trivial action: self-adjoint iff symmetric
    let group = phi.context().group();
    for (g, c) in phi.terms() {
        if phi.get(&group.inverse(g)) != *c {
            return Err(Error::Domain(format!("element is not self-adjoint at {g:?}")));
        }
    }
    let mut norms = vec![1u128];
    let mut power = phi.clone();
    for _ in 1..n_max + 2 {
        norms.push(power.weighted_norm(0)?);
        power = power.convolve(phi)?;
    }
    norms.push(power.weighted_norm(0)?);
    let mut ratios = Vec::new();
    let mut exact = Vec::new();
    for n in 0..=n_max as usize {
        let (hi, lo) = (norms[n + 2], norms[n]);
        ratios.push((n as u64, hi as f64 / lo as f64));
        exact.push((hi % lo == 0).then_some(hi / lo));
    }
    Ok(PytlikReport { limsup: tail_max(&ratios), ratios, exact: Some(exact) })
}

/// Both sides of the split estimate
/// `‖f₁*ψ*f₂‖₁ ≤ ‖ψ‖·M·mʳ + ‖ψτ^q‖₁·N·m^{−q}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitBound {
    pub m: u32,
    pub q: u32,
    pub lhs: f64,
    pub rhs: f64,
    /// Growth degree `r` and volume constant `κ` with `|B_n| ≤ κ nʳ`, `n ≤ m`.
    pub r: f64,
    pub kappa: f64,
    pub big_m: f64,
    pub big_n: f64,
    /// Certified upper bound used for the C*-norm of `ψ`.
    pub cstar: f64,
    pub holds: bool,
}

fn l2(phi: &CrossedElement) -> f64 {
    let alg = phi.context().algebra();
    phi.terms().values().map(|a| alg.norm(a).powi(2)).sum::<f64>().sqrt()
}

/// Grid for the Fourier upper bound of `‖ψ‖`.
const SPLIT_GRID: usize = 1 << 14;

pub fn pytlik_split_bound(
    psi: &CrossedElement,
    f1: &CrossedElement,
    f2: &CrossedElement,
    q: u32,
    m: u32,
) -> Result<SplitBound> {
    let ctx = psi.context();
    if !ctx.is_scalar_trivial() {
        return Err(Error::Unsupported("split bound needs scalar coefficients".into()));
    }
    if m == 0 {
        return Err(Error::Domain("m must be positive".into()));
    }
    let growth = ball_sizes(ctx.group(), m.max(8), 5_000_000);
    let r = match growth.class {
        GrowthClass::Polynomial { degree } => degree.max(growth.degree.unwrap_or(0.0)),
        GrowthClass::Exponential => {
            return Err(Error::Unsupported(format!("{} has exponential growth", growth.group)))
        }
        GrowthClass::Inconclusive => {
            return Err(Error::Unsupported(format!("growth of {} is inconclusive", growth.group)))
        }
    };
    let mut upto = growth.clone();
    upto.sizes.truncate(m as usize + 1);
    let kappa = upto.volume_constant(r);

    let lhs = f1.convolve(psi)?.convolve(f2)?.l1_norm();
    // ‖f₁*‖₂ = ‖f₁‖₂ for scalar coefficients
    let big_m = l2(f1) * l2(f2) * kappa;
    let big_n = f1.weighted_norm(q, 0)? * f2.weighted_norm(q, 0)?;
    let cstar = cstar_upper_bound(psi, SPLIT_GRID);
    let mf = m as f64;
    let rhs = cstar * big_m * mf.powf(r) + psi.weighted_norm(q, 0)? * big_n * mf.powi(-(q as i32));
    Ok(SplitBound { m, q, lhs, rhs, r, kappa, big_m, big_n, cstar, holds: lhs <= rhs })
}
