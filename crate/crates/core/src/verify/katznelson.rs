use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Cauchy, StandardNormal};
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::coeff::{make_action, scalar_algebra, ActionRule};
use crate::crossed::{CrossedElement, CrossedProduct};
use crate::error::{Error, Result};
use crate::groups::{make_group, Element, GroupDescriptor};
use crate::rng::LabRng;
use crate::spectra::cstar_fourier;
use crate::tower::TowerAlgebra;

use super::checks::{check_strong_spec_inv, observe, ChainOptions, Sampler};
use super::fit::{chain_sum, Constants, FitReport, REPLAY_SLACK};

/// Tolerance on exponential series.
pub const EXP_TOL: f64 = 1e-14;
const FFT_CAP: usize = 1 << 22;
const DIRECT_CUTOFF: usize = 64;

fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// `J_n(x)` by its power series. Accurate to about `1e-12` for `|x| ≤ 20`.
pub fn bessel_j(n: u32, x: f64) -> f64 {
    let half = x / 2.0;
    let mut term = half.powi(n as i32) / (1..=n).map(f64::from).product::<f64>();
    let mut sum = term;
    let mut k = 0u32;
    loop {
        k += 1;
        term *= -half * half / (k as f64 * (k + n) as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) && k as f64 > half {
            return sum;
        }
        if k > 500 {
            return sum;
        }
    }
}

/// `Σ_{n∈ℤ} |J_n(r)|`, the ℓ¹ norm of `exp(i(r/2)(δ₁+δ₋₁))`.
pub fn bessel_l1(r: f64) -> f64 {
    let mut s = bessel_j(0, r).abs();
    for n in 1..=(2.0 * r.abs() + 60.0) as u32 {
        s += 2.0 * bessel_j(n, r).abs();
    }
    s
}

/// Finitely supported sequence on `ℤ` stored densely from `offset`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Laurent {
    pub offset: i64,
    pub coeffs: Vec<Complex64>,
}

impl Laurent {
    pub fn new(offset: i64, coeffs: Vec<Complex64>) -> Self {
        Laurent { offset, coeffs }.trimmed(0.0)
    }

    pub fn delta(n: i64) -> Self {
        Laurent { offset: n, coeffs: vec![Complex64::new(1.0, 0.0)] }
    }

    pub fn width(&self) -> usize {
        self.coeffs.len()
    }

    pub fn get(&self, n: i64) -> Complex64 {
        let i = n - self.offset;
        if i < 0 {
            return czero();
        }
        self.coeffs.get(i as usize).copied().unwrap_or_default()
    }

    /// Drops edge entries of modulus at most `eps`.
    pub fn trimmed(mut self, eps: f64) -> Self {
        let Some(first) = self.coeffs.iter().position(|c| c.norm() > eps) else {
            return Laurent { offset: 0, coeffs: Vec::new() };
        };
        let last = self.coeffs.iter().rposition(|c| c.norm() > eps).unwrap_or(first);
        self.coeffs.truncate(last + 1);
        self.coeffs.drain(..first);
        self.offset += first as i64;
        self
    }

    pub fn l1(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Laurent { offset: self.offset, coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    pub fn axpy(&self, c: Complex64, other: &Self) -> Self {
        if other.coeffs.is_empty() {
            return self.clone();
        }
        if self.coeffs.is_empty() {
            return other.scale(c);
        }
        let lo = self.offset.min(other.offset);
        let hi = (self.offset + self.width() as i64).max(other.offset + other.width() as i64);
        let mut out = vec![czero(); (hi - lo) as usize];
        for (i, x) in self.coeffs.iter().enumerate() {
            out[(self.offset - lo) as usize + i] += x;
        }
        for (i, x) in other.coeffs.iter().enumerate() {
            out[(other.offset - lo) as usize + i] += c * x;
        }
        Laurent::new(lo, out)
    }

    pub fn convolve(&self, other: &Self) -> Result<Self> {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Ok(Laurent { offset: 0, coeffs: Vec::new() });
        }
        let len = self.width() + other.width() - 1;
        let offset = self.offset + other.offset;
        let nnz = |v: &[Complex64]| v.iter().filter(|c| **c != czero()).count();
        let (small, big) = if nnz(&self.coeffs) <= nnz(&other.coeffs) { (self, other) } else { (other, self) };
        if nnz(&small.coeffs) <= DIRECT_CUTOFF {
            let mut out = vec![czero(); len];
            for (i, a) in small.coeffs.iter().enumerate() {
                if *a == czero() {
                    continue;
                }
                for (j, b) in big.coeffs.iter().enumerate() {
                    out[i + j] += a * b;
                }
            }
            return Ok(Laurent::new(offset, out));
        }
        let size = len.next_power_of_two();
        if size > FFT_CAP {
            return Err(Error::MemoryBudget { budget: FFT_CAP });
        }
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(size);
        let inv = planner.plan_fft_inverse(size);
        let mut a = self.coeffs.clone();
        a.resize(size, czero());
        let mut b = other.coeffs.clone();
        b.resize(size, czero());
        fwd.process(&mut a);
        fwd.process(&mut b);
        for (x, y) in a.iter_mut().zip(&b) {
            *x *= y;
        }
        inv.process(&mut a);
        a.truncate(len);
        let s = 1.0 / size as f64;
        for x in &mut a {
            *x *= s;
        }
        Ok(Laurent::new(offset, a))
    }

    /// `Σ φᵏ/k!` truncated once the ℓ¹ tail bound drops below `tol`.
    pub fn exponential(&self, tol: f64) -> Result<Self> {
        let norm = self.l1();
        let mut sum = Laurent::delta(0);
        let mut term = sum.clone();
        let mut bound = norm.exp();
        for k in 1..=10_000u32 {
            bound *= norm / k as f64;
            if bound < tol {
                return Ok(sum.trimmed(tol * 1e-3));
            }
            term = term.convolve(self)?.scale(Complex64::new(1.0 / k as f64, 0.0)).trimmed(tol * 1e-6);
            sum = sum.axpy(Complex64::new(1.0, 0.0), &term);
        }
        Err(Error::Tolerance(format!("exponential series did not reach {tol}")))
    }

    /// Certified upper bound on `sup_θ |Σ a_n e^{inθ}|`: the grid maximum
    /// of `|a^|²` plus the second-order sampling error, capped by `ℓ¹`.
    pub fn sup_upper(&self) -> f64 {
        self.sup_bounds().1
    }

    /// Grid maximum of `|a^|`, a lower bound on the sup norm, together with
    /// the upper bound of [`Laurent::sup_upper`].
    pub fn sup_bounds(&self) -> (f64, f64) {
        let l1 = self.l1();
        let w = self.width();
        if w <= 1 {
            return (l1, l1);
        }
        let size = (64 * w).next_power_of_two().clamp(1024, FFT_CAP);
        // folding modulo the grid keeps the values at the grid points exact
        let mut buf = vec![czero(); size];
        for (i, c) in self.coeffs.iter().enumerate() {
            buf[i % size] += c;
        }
        FftPlanner::new().plan_fft_forward(size).process(&mut buf);
        let fmax = buf.iter().map(|c| c.norm_sqr()).fold(0.0, f64::max);
        let center = (w - 1) as f64 / 2.0;
        let m2: f64 = self.coeffs.iter().enumerate().map(|(i, c)| (i as f64 - center).powi(2) * c.norm()).sum();
        let h = std::f64::consts::PI / size as f64;
        (fmax.sqrt(), (fmax + 2.0 * l1 * m2 * h * h).sqrt().min(l1))
    }
}

/// `ℓ¹(ℤ)` under the tower `‖·‖₀ = C*-norm`, `‖·‖_m = ℓ¹` for `m ≥ 1`.
/// The zeroth seminorm is evaluated as a certified upper bound.
#[derive(Clone, Copy, Debug, Default)]
pub struct KatznelsonTower;

impl TowerAlgebra for KatznelsonTower {
    type Elem = Laurent;

    fn mul(&self, a: &Laurent, b: &Laurent) -> Result<Laurent> {
        a.convolve(b)
    }

    fn axpy(&self, a: &Laurent, c: Complex64, b: &Laurent) -> Result<Laurent> {
        Ok(a.axpy(c, b))
    }

    fn scale(&self, a: &Laurent, c: Complex64) -> Laurent {
        a.scale(c)
    }

    fn seminorm(&self, a: &Laurent, m: usize) -> Result<f64> {
        Ok(if m == 0 { a.sup_upper() } else { a.l1() })
    }

    fn support_size(&self, a: &Laurent) -> usize {
        a.coeffs.iter().filter(|c| **c != czero()).count()
    }
}

/// Sequences supported on `[-R, R]`, `R` uniform in `3..=6`; complex
/// Gaussian values, every other draw Cauchy.
pub fn laurent_sampler() -> impl FnMut(&mut LabRng) -> Result<Laurent> {
    let mut heavy = false;
    move |rng: &mut LabRng| {
        heavy = !heavy;
        let r: i64 = rng.random_range(3..=6);
        let coeffs = (0..2 * r + 1)
            .map(|_| {
                if heavy {
                    let d = Cauchy::new(0.0, 1.0).expect("unit Cauchy");
                    Complex64::new(rng.sample(d), rng.sample(d))
                } else {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    Complex64::new(re, im)
                }
            })
            .collect();
        Ok(Laurent::new(-r, coeffs))
    }
}

/// `ψ = (r/2N) Σ_{k<N} (δ_{3^k} + δ_{−3^k})`, `N = terms`: self-adjoint with
/// `‖ψ‖₁ = r`, and `‖exp(iψ)‖₁` grows exponentially in `r` when `N ∝ r`.
pub fn lacunary_psi(r: f64, terms: u32) -> Laurent {
    let top = 3i64.pow(terms - 1);
    let mut coeffs = vec![czero(); (2 * top + 1) as usize];
    let c = Complex64::new(r / (2.0 * terms as f64), 0.0);
    for k in 0..terms {
        let f = 3i64.pow(k);
        coeffs[(top + f) as usize] += c;
        coeffs[(top - f) as usize] += c;
    }
    Laurent::new(-top, coeffs)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KatznelsonRow {
    pub r: f64,
    /// `‖exp(iψ_r)‖₁`.
    pub l1: f64,
    pub bessel: f64,
    /// Grid maximum of the symbol, with its sampling error bound.
    pub cstar: f64,
    pub cstar_error: f64,
    /// `e^{‖ψ_r‖₁} = e^r`.
    pub bound: f64,
    /// `‖exp(iψ_r/n)ⁿ − exp(iψ_r)‖₁` for the chain length `n`.
    pub chain_n: u64,
    pub chain_defect: f64,
}

/// Growth table for `ψ_r = (r/2)(δ₁+δ₋₁)` on `ℤ`.
pub fn katznelson_demo(rs: &[f64], chain_n: u64, grid: usize) -> Result<Vec<KatznelsonRow>> {
    let group = Arc::new(make_group(&GroupDescriptor::FreeAbelian(1))?);
    let action = make_action(group, Arc::new(scalar_algebra()), ActionRule::Trivial)?;
    let ctx = CrossedProduct::new(action);
    let i = Complex64::new(0.0, 1.0);
    let mut rows = Vec::new();
    for &r in rs {
        if !(r >= 0.0) || !r.is_finite() {
            return Err(Error::Domain(format!("r = {r} must be finite and nonnegative")));
        }
        let psi = CrossedElement::from_scalars(&ctx, &[(Element::new([1]), r / 2.0), (Element::new([-1]), r / 2.0)])?;
        let e = psi.scale(i).exponential(EXP_TOL)?;
        let est = cstar_fourier(&e, grid)?;
        let part = psi.scale(i / chain_n as f64).exponential(EXP_TOL)?;
        let chain_defect = part.power(chain_n, 0.0)?.sub(&e)?.l1_norm();
        rows.push(KatznelsonRow {
            r,
            l1: e.l1_norm(),
            bessel: bessel_l1(r),
            cstar: est.value,
            cstar_error: est.error_bound,
            bound: r.exp(),
            chain_n,
            chain_defect,
        });
    }
    Ok(rows)
}

/// One chain `exp(iψ/n)ⁿ` against the fitted constants.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefutationRow {
    pub r: f64,
    pub terms: u32,
    pub n: usize,
    pub m: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub violated: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KatznelsonRefutation {
    /// Fit on random samples of the tower.
    pub training: FitReport,
    /// Constants tested: the fit, or the caps when nothing fits.
    pub constants: Constants,
    pub rows: Vec<RefutationRow>,
    pub refuted: bool,
}

/// Fits the chain constants of [`KatznelsonTower`] on random samples, then
/// evaluates them on `exp(iψ/n)ⁿ` for the lacunary `ψ` with `N = r` terms.
pub fn katznelson_refutation(opts: &ChainOptions, rs: &[u32], ns: &[usize]) -> Result<KatznelsonRefutation> {
    let tower = KatznelsonTower;
    let mut sampler = laurent_sampler();
    let training = check_strong_spec_inv(&tower, &mut sampler as &mut Sampler<'_, Laurent>, opts)?;
    let constants = training.constants.clone().unwrap_or_else(|| Constants {
        c: opts.caps.c_max,
        d: vec![opts.caps.d_max; opts.m_max + 1],
        p: (0..=opts.m_max).map(|m| m + opts.caps.p_slack).collect(),
    });
    let p_max = constants.p.iter().copied().max().unwrap_or(0);
    let i = Complex64::new(0.0, 1.0);
    let mut rows = Vec::new();
    for &r in rs {
        if r == 0 || r > 12 {
            return Err(Error::Domain(format!("lacunary family needs 1 <= r <= 12, got {r}")));
        }
        let psi = lacunary_psi(r as f64, r);
        for &n in ns {
            if n == 0 {
                return Err(Error::Domain("chain length must be positive".into()));
            }
            let factor = psi.scale(i / n as f64).exponential(EXP_TOL)?;
            let chain = vec![factor; n];
            let o = observe(&tower, &chain, opts.m_max, p_max)?;
            // certified sides: lower bound for the product, upper bounds for the factors
            let floor = tower.chain_product(&chain)?.sup_bounds().0;
            for (m, (&d, &p)) in constants.d.iter().zip(&constants.p).enumerate() {
                let rhs = d * constants.c.powi(n as i32) * chain_sum(&o.norms, p, false);
                let lhs = if m == 0 { floor } else { o.lhs[m] };
                rows.push(RefutationRow {
                    r: r as f64,
                    terms: r,
                    n,
                    m,
                    lhs,
                    rhs,
                    violated: lhs > rhs * (1.0 + REPLAY_SLACK),
                });
            }
        }
    }
    let refuted = rows.iter().any(|row| row.violated);
    Ok(KatznelsonRefutation { training, constants, rows, refuted })
}
