use std::collections::HashMap;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::crossed::CrossedElement;
use crate::error::{Error, Result};
use crate::groups::{Element, Gauge};
use crate::rng::stream;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum CstarMethod {
    Fourier { grid: usize },
    Compression { radius: u32 },
}

/// Estimate of the reduced C*-norm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CstarEstimate {
    #[serde(flatten)]
    pub method: CstarMethod,
    pub value: f64,
    /// Fourier: the true norm lies in `[value, value + error_bound]`.
    /// Compression: `value` is a lower bound and `error_bound` is the final
    /// relative change of the Rayleigh quotient.
    pub error_bound: f64,
    pub lower_bound_only: bool,
}

impl CstarEstimate {
    /// Certified upper bound, when the method provides one.
    pub fn upper(&self) -> Option<f64> {
        (!self.lower_bound_only).then_some(self.value + self.error_bound)
    }
}

/// Dense row-major product of two `k × k` matrices.
fn matmul(a: &[Complex64], b: &[Complex64], k: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); k * k];
    for i in 0..k {
        for l in 0..k {
            let x = a[i * k + l];
            if x == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..k {
                out[i * k + j] += x * b[l * k + j];
            }
        }
    }
    out
}

/// Largest singular value of a small dense matrix.
fn top_singular(m: &[Complex64], k: usize) -> f64 {
    if k == 1 {
        return m[0].norm();
    }
    let mh: Vec<Complex64> = (0..k * k).map(|idx| m[(idx % k) * k + idx / k].conj()).collect();
    let g = matmul(&mh, m, k);
    let mut x = vec![Complex64::new(1.0, 0.0); k];
    for (i, v) in x.iter_mut().enumerate() {
        *v += Complex64::new(0.01 * i as f64, 0.0);
    }
    let mut lambda = 0.0f64;
    for _ in 0..2000 {
        let y: Vec<Complex64> =
            (0..k).map(|i| (0..k).map(|j| g[i * k + j] * x[j]).sum()).collect();
        let ny = y.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if ny == 0.0 {
            return 0.0;
        }
        let done = (ny - lambda).abs() <= 1e-15 * ny;
        lambda = ny;
        x = y.into_iter().map(|v| v / ny).collect();
        if done {
            break;
        }
    }
    // Frobenius norm caps the estimate from above
    let fro = m.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    lambda.sqrt().min(fro)
}

/// `sup_θ ‖φ̂(θ)‖` over a uniform grid of `grid` points per axis, for
/// trivial-action elements over `ℤ^d`. The true supremum exceeds the grid
/// maximum by at most `(Σ τ(g)‖φ(g)‖_0)·(2π/grid)·d`.
pub fn cstar_fourier(phi: &CrossedElement, grid: usize) -> Result<CstarEstimate> {
    let ctx = phi.context();
    let d = ctx
        .group()
        .abelian_rank()
        .ok_or_else(|| Error::Unsupported(format!("Fourier method on {}", ctx.group().name())))?;
    if !ctx.action().is_trivial() {
        return Err(Error::Unsupported("Fourier method needs the trivial action".into()));
    }
    let alg = ctx.algebra();
    let k = alg
        .hilbert_dim()
        .ok_or_else(|| Error::Unsupported(format!("{} has no finite representation", alg.name())))?;
    if grid < 2 {
        return Err(Error::Domain("grid must have at least two points".into()));
    }
    let terms: Vec<(&Element, Vec<Complex64>)> = phi
        .terms()
        .iter()
        .map(|(g, a)| Ok((g, alg.represent(a)?)))
        .collect::<Result<_>>()?;

    let mut lip = 0.0;
    for (g, a) in phi.terms() {
        lip += ctx.gauge().length(g)? as f64 * alg.norm(a);
    }
    let error_bound = lip * (2.0 * std::f64::consts::PI / grid as f64) * d as f64;

    let value = if d == 1 {
        let width = phi.terms().keys().map(|g| g.0[0]).max().unwrap_or(0)
            - phi.terms().keys().map(|g| g.0[0]).min().unwrap_or(0);
        if width as usize >= grid {
            return Err(Error::Domain(format!("support width {width} exceeds grid {grid}")));
        }
        let fft = FftPlanner::new().plan_fft_inverse(grid);
        // one transform per matrix entry; the inverse FFT evaluates Σ c_n e^{inθ_j}
        let mut symbols = vec![vec![Complex64::new(0.0, 0.0); grid]; k * k];
        for (entry, buf) in symbols.iter_mut().enumerate() {
            for (g, m) in &terms {
                buf[g.0[0].rem_euclid(grid as i64) as usize] += m[entry];
            }
            fft.process(buf);
        }
        let mut best = 0.0f64;
        let mut m = vec![Complex64::new(0.0, 0.0); k * k];
        for j in 0..grid {
            for (entry, s) in symbols.iter().enumerate() {
                m[entry] = s[j];
            }
            best = best.max(top_singular(&m, k));
        }
        best
    } else {
        let total = (grid as u128).checked_pow(d as u32).unwrap_or(u128::MAX);
        if total > 1 << 24 {
            return Err(Error::Domain(format!("grid {grid}^{d} is too large for direct evaluation")));
        }
        let step = 2.0 * std::f64::consts::PI / grid as f64;
        let mut best = 0.0f64;
        let mut idx = vec![0usize; d];
        let mut m = vec![Complex64::new(0.0, 0.0); k * k];
        for _ in 0..total {
            m.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
            for (g, a) in &terms {
                let phase: f64 = g.0.iter().zip(&idx).map(|(n, i)| *n as f64 * *i as f64 * step).sum();
                let e = Complex64::from_polar(1.0, phase);
                for (x, y) in m.iter_mut().zip(a) {
                    *x += y * e;
                }
            }
            best = best.max(top_singular(&m, k));
            for v in idx.iter_mut() {
                *v += 1;
                if *v < grid {
                    break;
                }
                *v = 0;
            }
        }
        best
    };
    Ok(CstarEstimate { method: CstarMethod::Fourier { grid }, value, error_bound, lower_bound_only: false })
}

/// The left regular representation of `φ` compressed to the ball `B_R`,
/// `(φξ)(g) = Σ_h α_{g⁻¹}(φ(h)) ξ(h⁻¹g)` on `ℓ²(B_R, ℂ^k)`.
pub struct BallOperator {
    pub ball: Vec<Element>,
    pub index: HashMap<Element, usize>,
    /// Coefficient Hilbert-space dimension.
    pub k: usize,
    /// `(row, column, k × k block)`.
    pub entries: Vec<(usize, usize, Vec<Complex64>)>,
}

impl BallOperator {
    pub fn new(phi: &CrossedElement, radius: u32) -> Result<Self> {
        let ctx = phi.context();
        let group = ctx.group();
        let alg = ctx.algebra();
        let k = alg
            .hilbert_dim()
            .ok_or_else(|| Error::Unsupported(format!("{} has no finite representation", alg.name())))?;
        let ball = ctx.gauge().ball(radius)?;
        let index: HashMap<Element, usize> =
            ball.iter().enumerate().map(|(i, g)| (g.clone(), i)).collect();
        let trivial = ctx.action().is_trivial();
        let fixed: Vec<(Element, Vec<Complex64>)> = phi
            .terms()
            .iter()
            .map(|(h, a)| Ok((group.inverse(h), alg.represent(a)?)))
            .collect::<Result<_>>()?;
        let mut entries = Vec::new();
        for (row, g) in ball.iter().enumerate() {
            let gi = group.inverse(g);
            for ((h, a), (hi, rep)) in phi.terms().iter().zip(&fixed) {
                if let Some(&col) = index.get(&group.multiply(hi, g)) {
                    let block = if trivial {
                        rep.clone()
                    } else {
                        alg.represent(&ctx.action().apply(&gi, a))?
                    };
                    let _ = h;
                    entries.push((row, col, block));
                }
            }
        }
        Ok(BallOperator { ball, index, k, entries })
    }

    pub fn dim(&self) -> usize {
        self.ball.len() * self.k
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let k = self.k;
        let mut y = vec![Complex64::new(0.0, 0.0); x.len()];
        for (r, c, b) in &self.entries {
            for i in 0..k {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..k {
                    acc += b[i * k + j] * x[c * k + j];
                }
                y[r * k + i] += acc;
            }
        }
        y
    }

    pub fn apply_adjoint(&self, x: &[Complex64]) -> Vec<Complex64> {
        let k = self.k;
        let mut y = vec![Complex64::new(0.0, 0.0); x.len()];
        for (r, c, b) in &self.entries {
            for j in 0..k {
                let mut acc = Complex64::new(0.0, 0.0);
                for i in 0..k {
                    acc += b[i * k + j].conj() * x[r * k + i];
                }
                y[c * k + j] += acc;
            }
        }
        y
    }
}

fn normalize(x: &mut [Complex64]) -> f64 {
    let n = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    if n > 0.0 {
        x.iter_mut().for_each(|v| *v /= n);
    }
    n
}

/// Power iteration on `T*T` from a unit start vector. Returns the final
/// Rayleigh quotient `‖Tx‖²` and its last relative change.
fn power_iterate(op: &BallOperator, mut x: Vec<Complex64>, tol: f64, max_iter: usize) -> (f64, f64) {
    normalize(&mut x);
    let mut rho = 0.0f64;
    let mut change = f64::INFINITY;
    for _ in 0..max_iter {
        let tx = op.apply(&x);
        let next: f64 = tx.iter().map(|v| v.norm_sqr()).sum();
        change = if next > 0.0 { (next - rho).abs() / next } else { 0.0 };
        rho = next;
        if next == 0.0 || change <= tol {
            break;
        }
        x = op.apply_adjoint(&tx);
        normalize(&mut x);
    }
    (rho, change)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompressionOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for CompressionOptions {
    fn default() -> Self {
        CompressionOptions { tol: 1e-10, max_iter: 200_000, seed: 0 }
    }
}

/// Top singular value of `φ` compressed to `B_R`: a lower bound for the
/// reduced C*-norm, nondecreasing in `R`.
pub fn cstar_compression(phi: &CrossedElement, radius: u32) -> Result<CstarEstimate> {
    cstar_compression_with(phi, radius, &CompressionOptions::default())
}

pub fn cstar_compression_with(
    phi: &CrossedElement,
    radius: u32,
    opts: &CompressionOptions,
) -> Result<CstarEstimate> {
    let op = BallOperator::new(phi, radius)?;
    let k = op.k;
    let e = op.index[&phi.context().group().identity()];
    let mut start = vec![Complex64::new(0.0, 0.0); op.dim()];
    for j in 0..k {
        start[e * k + j] = Complex64::new(1.0 / (k as f64).sqrt(), 0.0);
    }
    let (rho1, ch1) = power_iterate(&op, start, opts.tol, opts.max_iter);
    let mut rng = stream(opts.seed, "spectra.compression");
    let random: Vec<Complex64> = (0..op.dim())
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let (rho2, ch2) = power_iterate(&op, random, opts.tol, opts.max_iter);
    let (rho, change) = if rho2 > rho1 { (rho2, ch2) } else { (rho1, ch1) };
    Ok(CstarEstimate {
        method: CstarMethod::Compression { radius },
        value: rho.sqrt(),
        error_bound: change,
        lower_bound_only: true,
    })
}

/// Certified upper bound for the reduced C*-norm: the Fourier bound on
/// free-abelian groups with trivial action, else the ℓ¹ norm.
pub fn cstar_upper_bound(phi: &CrossedElement, grid: usize) -> f64 {
    let l1 = phi.l1_norm();
    match cstar_fourier(phi, grid) {
        Ok(est) => est.upper().map_or(l1, |u| u.min(l1)),
        Err(_) => l1,
    }
}
