//! Smooth compact operators `S(ℤ², A)`: rapidly decreasing `ℤ × ℤ`
//! matrices with entries in a coefficient algebra.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coeff::{Coeff, CoefficientAlgebra};
use crate::crossed::{CoeffLiteral, CrossedElement};
use crate::error::{Error, Result};
use crate::tower::TowerAlgebra;

#[derive(Clone, Debug, PartialEq)]
pub struct SmoothCompactElement {
    alg: Arc<CoefficientAlgebra>,
    terms: BTreeMap<(i64, i64), Coeff>,
}

/// The algebra `S(ℤ², A)` over a coefficient algebra.
#[derive(Clone, Debug)]
pub struct SmoothCompacts {
    alg: Arc<CoefficientAlgebra>,
}

impl SmoothCompacts {
    pub fn new(alg: Arc<CoefficientAlgebra>) -> Self {
        SmoothCompacts { alg }
    }

    pub fn algebra(&self) -> &Arc<CoefficientAlgebra> {
        &self.alg
    }

    pub fn element(&self, terms: Vec<((i64, i64), Coeff)>) -> Result<SmoothCompactElement> {
        let mut map: BTreeMap<(i64, i64), Coeff> = BTreeMap::new();
        for (rs, a) in terms {
            self.alg.validate(&a)?;
            let v = match map.get(&rs) {
                Some(b) => self.alg.add(b, &a),
                None => a,
            };
            map.insert(rs, v);
        }
        Ok(self.from_map(map))
    }

    fn from_map(&self, mut terms: BTreeMap<(i64, i64), Coeff>) -> SmoothCompactElement {
        terms.retain(|_, a| !self.alg.is_zero(a));
        SmoothCompactElement { alg: self.alg.clone(), terms }
    }

    /// Matrix unit `e_{rs} ⊗ 1`.
    pub fn unit(&self, r: i64, s: i64) -> Result<SmoothCompactElement> {
        let one = self
            .alg
            .one()
            .ok_or_else(|| Error::Unsupported(format!("{} has no unit", self.alg.name())))?;
        self.element(vec![((r, s), one)])
    }

    pub fn zero(&self) -> SmoothCompactElement {
        self.from_map(BTreeMap::new())
    }

    /// Parses `[[r, s, coefficient], …]` with coefficients in the JSON
    /// element-literal format.
    pub fn parse_literal(&self, text: &str) -> Result<SmoothCompactElement> {
        let raw: Vec<(i64, i64, CoeffLiteral)> = serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("smooth-compact literal: {e}")))?;
        self.element(raw.into_iter().map(|(r, s, c)| ((r, s), c.to_coeff())).collect())
    }
}

impl SmoothCompactElement {
    pub fn terms(&self) -> &BTreeMap<(i64, i64), Coeff> {
        &self.terms
    }

    pub fn get(&self, r: i64, s: i64) -> Option<&Coeff> {
        self.terms.get(&(r, s))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Serialized form `[[r, s, coefficient], …]`.
    pub fn to_literal(&self) -> Vec<(i64, i64, CoeffLiteral)> {
        self.terms.iter().map(|(&(r, s), a)| (r, s, CoeffLiteral::from_coeff(a))).collect()
    }

    /// Smallest `w` with the support inside `[−w, w]²`.
    pub fn radius(&self) -> i64 {
        self.terms.keys().map(|&(r, s)| r.abs().max(s.abs())).max().unwrap_or(0)
    }
}

/// `‖φ‖_q = Σ_{r,s} (1+|r|+|s|)^q ‖φ(r,s)‖_q`.
pub fn sk_seminorm(phi: &SmoothCompactElement, q: usize) -> f64 {
    phi.terms
        .iter()
        .map(|(&(r, s), a)| {
            let w = (1.0 + r.unsigned_abs() as f64 + s.unsigned_abs() as f64).powi(q as i32);
            w * phi.alg.seminorm(a, q)
        })
        .sum()
}

/// `φ*ψ(r,t) = Σ_s φ(r,s)ψ(s,t)`.
pub fn sk_multiply(phi: &SmoothCompactElement, psi: &SmoothCompactElement) -> Result<SmoothCompactElement> {
    if phi.alg != psi.alg {
        return Err(Error::MixedContext);
    }
    let alg = &phi.alg;
    let mut rows: BTreeMap<i64, Vec<(i64, &Coeff)>> = BTreeMap::new();
    for (&(s, t), b) in &psi.terms {
        rows.entry(s).or_default().push((t, b));
    }
    let mut out: BTreeMap<(i64, i64), Coeff> = BTreeMap::new();
    for (&(r, s), a) in &phi.terms {
        if let Some(row) = rows.get(&s) {
            for &(t, b) in row {
                let p = alg.mul(a, b)?;
                let v = match out.get(&(r, t)) {
                    Some(acc) => alg.add(acc, &p),
                    None => p,
                };
                out.insert((r, t), v);
            }
        }
    }
    out.retain(|_, a| !alg.is_zero(a));
    Ok(SmoothCompactElement { alg: alg.clone(), terms: out })
}

/// Vector on the window `[lo, lo + len)` of `ℤ` with values in `ℂ^dim`,
/// stored index-major.
#[derive(Clone, Debug, PartialEq)]
pub struct WindowVector {
    pub lo: i64,
    pub dim: usize,
    pub values: Vec<Complex64>,
}

impl WindowVector {
    pub fn zeros(lo: i64, len: usize, dim: usize) -> Self {
        WindowVector { lo, dim, values: vec![Complex64::new(0.0, 0.0); len * dim] }
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.dim.max(1)
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn contains(&self, n: i64) -> bool {
        n >= self.lo && n < self.lo + self.len() as i64
    }

    pub fn at(&self, n: i64) -> &[Complex64] {
        let i = (n - self.lo) as usize * self.dim;
        &self.values[i..i + self.dim]
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// `φξ(r) = Σ_t φ(r,t)ξ(t)` on the window of `ξ`. Every support point of
/// `φ` must lie in the window.
pub fn sk_apply(phi: &SmoothCompactElement, xi: &WindowVector) -> Result<WindowVector> {
    let k = phi
        .alg
        .hilbert_dim()
        .ok_or_else(|| Error::Unsupported(format!("{} has no finite representation", phi.alg.name())))?;
    if xi.dim != k {
        return Err(Error::Dimension { expected: k, found: xi.dim });
    }
    let mut out = WindowVector::zeros(xi.lo, xi.len(), k);
    for (&(r, t), a) in &phi.terms {
        if !xi.contains(r) || !xi.contains(t) {
            return Err(Error::Domain(format!("support point ({r},{t}) outside the window")));
        }
        let m = phi.alg.represent(a)?;
        let src = xi.at(t).to_vec();
        let base = (r - xi.lo) as usize * k;
        for i in 0..k {
            let v: Complex64 = (0..k).map(|j| m[i * k + j] * src[j]).sum();
            out.values[base + i] += v;
        }
    }
    Ok(out)
}

/// Operator norm of `φ` on `ℓ²` of its support window, by power iteration
/// on `φ*φ`. Returns the estimate and a residual bound to add for a
/// certified upper bound.
pub fn sk_operator_norm(phi: &SmoothCompactElement, tol: f64) -> Result<(f64, f64)> {
    if phi.is_zero() {
        return Ok((0.0, 0.0));
    }
    let k = phi
        .alg
        .hilbert_dim()
        .ok_or_else(|| Error::Unsupported(format!("{} has no finite representation", phi.alg.name())))?;
    let w = phi.radius();
    let len = (2 * w + 1) as usize;
    let adjoint = sk_adjoint(phi);
    let mut x = WindowVector::zeros(-w, len, k);
    for (i, v) in x.values.iter_mut().enumerate() {
        *v = Complex64::new(1.0 + (i % 7) as f64 * 0.1, 0.0);
    }
    let n0 = x.norm();
    x.values.iter_mut().for_each(|v| *v /= n0);
    let mut lambda = 0.0;
    for _ in 0..10_000 {
        let y = sk_apply(&adjoint, &sk_apply(phi, &x)?)?;
        let ny = y.norm();
        if ny == 0.0 {
            return Ok((0.0, 0.0));
        }
        let next = ny;
        let converged = (next - lambda).abs() <= tol * next;
        lambda = next;
        x = WindowVector { values: y.values.iter().map(|v| v / ny).collect(), ..y };
        if converged {
            break;
        }
    }
    // inflate by the eigen-residual ‖φ*φx − λx‖ and the iteration tolerance
    let y = sk_apply(&adjoint, &sk_apply(phi, &x)?)?;
    let resid: f64 = y
        .values
        .iter()
        .zip(&x.values)
        .map(|(a, b)| (a - b * lambda).norm_sqr())
        .sum::<f64>()
        .sqrt();
    let s = lambda.sqrt();
    Ok((s, (lambda + resid).sqrt() - s + tol * s))
}

/// `φ*(r,s) = φ(s,r)*`.
pub fn sk_adjoint(phi: &SmoothCompactElement) -> SmoothCompactElement {
    SmoothCompactElement {
        alg: phi.alg.clone(),
        terms: phi.terms.iter().map(|(&(r, s), a)| ((s, r), phi.alg.star(a))).collect(),
    }
}

/// Both sides of `‖ψ₁φψ₂‖_0 ≤ c‖ψ₁‖_0‖ψ₂‖_0`, `c` a certified upper bound on
/// the operator norm of `φ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdealBound {
    pub lhs: f64,
    pub rhs: f64,
    pub operator_norm: f64,
    pub holds: bool,
}

pub fn sk_ideal_bound(
    psi1: &SmoothCompactElement,
    phi: &SmoothCompactElement,
    psi2: &SmoothCompactElement,
) -> Result<IdealBound> {
    let prod = sk_multiply(&sk_multiply(psi1, phi)?, psi2)?;
    let lhs = sk_seminorm(&prod, 0);
    let (c, resid) = sk_operator_norm(phi, 1e-10)?;
    let c = c + resid;
    let rhs = c * sk_seminorm(psi1, 0) * sk_seminorm(psi2, 0);
    Ok(IdealBound { lhs, rhs, operator_norm: c, holds: lhs <= rhs * (1.0 + 1e-9) })
}

/// Re-indexes an element of `ℤ ⋊ S(ℤ)` (translation action) as the smooth
/// compact `T_φ(r,s) = φ(r−s)(r)`, which turns twisted convolution into
/// matrix multiplication.
pub fn intertwine(phi: &CrossedElement) -> Result<SmoothCompactElement> {
    let ctx = phi.context();
    let ok = ctx.group().abelian_rank() == Some(1)
        && matches!(ctx.algebra(), CoefficientAlgebra::SchwartzZ { .. })
        && !ctx.action().is_trivial();
    if !ok {
        return Err(Error::Unsupported("intertwining needs Z translating S(Z)".into()));
    }
    let mut terms = BTreeMap::new();
    for (g, a) in phi.terms() {
        let j = g.0[0];
        if let Coeff::Func(f) = a {
            for (&r, v) in f {
                terms.insert((r, r - j), Coeff::Scalar(*v));
            }
        }
    }
    Ok(SmoothCompactElement { alg: Arc::new(CoefficientAlgebra::Scalar), terms })
}

/// Exhaustive check of `(1+|a|+|b|)^q ≤ 2^q((1+|a|)^q + (1+|b|)^q)` for
/// `q ≤ q_max`, `|a|, |b| ≤ r_max`. Returns the first violation.
pub fn split_inequality(q_max: u32, r_max: i64) -> Option<(u32, i64, i64)> {
    for q in 0..=q_max {
        for a in -r_max..=r_max {
            for b in -r_max..=r_max {
                let (x, y) = (a.unsigned_abs() as u128, b.unsigned_abs() as u128);
                let lhs = (1 + x + y).pow(q);
                let rhs = (1u128 << q) * ((1 + x).pow(q) + (1 + y).pow(q));
                if lhs > rhs {
                    return Some((q, a, b));
                }
            }
        }
    }
    None
}

impl TowerAlgebra for SmoothCompacts {
    type Elem = SmoothCompactElement;

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem> {
        sk_multiply(a, b)
    }

    fn axpy(&self, a: &Self::Elem, c: Complex64, b: &Self::Elem) -> Result<Self::Elem> {
        let mut out = a.terms.clone();
        for (rs, v) in &b.terms {
            let w = match out.get(rs) {
                Some(x) => self.alg.axpy(x, c, v),
                None => self.alg.scale(v, c),
            };
            out.insert(*rs, w);
        }
        Ok(self.from_map(out))
    }

    fn scale(&self, a: &Self::Elem, c: Complex64) -> Self::Elem {
        self.from_map(a.terms.iter().map(|(rs, v)| (*rs, self.alg.scale(v, c))).collect())
    }

    fn seminorm(&self, a: &Self::Elem, m: usize) -> Result<f64> {
        Ok(sk_seminorm(a, m))
    }

    fn support_size(&self, a: &Self::Elem) -> usize {
        a.terms.len()
    }
}
