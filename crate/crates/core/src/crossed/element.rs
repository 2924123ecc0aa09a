use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coeff::{Coeff, CoefficientAlgebra, GroupAction};
use crate::error::{Error, Result};
use crate::groups::{Element, Gauge, Group, WordGauge};
use crate::tower::TowerAlgebra;

/// Default cap on the number of support points of a computed element.
pub const DEFAULT_SUPPORT_BUDGET: usize = 2_000_000;

/// The crossed product `G ⋊ A` of an action, with the word gauge used for
/// weighted norms.
#[derive(Debug)]
pub struct CrossedProduct {
    action: GroupAction,
    gauge: WordGauge,
    support_budget: usize,
}

impl CrossedProduct {
    pub fn new(action: GroupAction) -> Arc<Self> {
        Self::with_budget(action, DEFAULT_SUPPORT_BUDGET)
    }

    pub fn with_budget(action: GroupAction, support_budget: usize) -> Arc<Self> {
        let gauge = WordGauge::new(action.group().clone());
        Arc::new(CrossedProduct { action, gauge, support_budget })
    }

    pub fn group(&self) -> &Arc<Group> {
        self.action.group()
    }

    pub fn algebra(&self) -> &CoefficientAlgebra {
        self.action.algebra()
    }

    pub fn action(&self) -> &GroupAction {
        &self.action
    }

    pub fn gauge(&self) -> &WordGauge {
        &self.gauge
    }

    pub fn support_budget(&self) -> usize {
        self.support_budget
    }

    /// Whether coefficients are complex scalars under the trivial action.
    pub fn is_scalar_trivial(&self) -> bool {
        *self.algebra() == CoefficientAlgebra::Scalar && self.action.is_trivial()
    }
}

/// Finitely supported map `G → A`; an element of the crossed product.
#[derive(Clone, Debug)]
pub struct CrossedElement {
    ctx: Arc<CrossedProduct>,
    terms: BTreeMap<Element, Coeff>,
    prune_error: f64,
}

impl PartialEq for CrossedElement {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.ctx, &other.ctx)
            && self.terms == other.terms
            && self.prune_error == other.prune_error
    }
}

/// Serialized form: `[[g, coefficient], …]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ElementTerms(pub Vec<(Element, CoeffLiteral)>);

/// JSON form of a coefficient: `[re, im]`, `{"n": [re, im], …}`, or a
/// row-major list of entries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoeffLiteral {
    Scalar([f64; 2]),
    Func(BTreeMap<i64, [f64; 2]>),
    Matrix(Vec<CoeffLiteral>),
}

impl CoeffLiteral {
    pub fn to_coeff(&self) -> Coeff {
        let c = |v: &[f64; 2]| Complex64::new(v[0], v[1]);
        match self {
            CoeffLiteral::Scalar(v) => Coeff::Scalar(c(v)),
            CoeffLiteral::Func(f) => Coeff::Func(f.iter().map(|(k, v)| (*k, c(v))).collect()),
            CoeffLiteral::Matrix(m) => Coeff::Matrix(m.iter().map(|x| x.to_coeff()).collect()),
        }
    }

    pub fn from_coeff(a: &Coeff) -> Self {
        match a {
            Coeff::Scalar(z) => CoeffLiteral::Scalar([z.re, z.im]),
            Coeff::Func(f) => CoeffLiteral::Func(f.iter().map(|(k, v)| (*k, [v.re, v.im])).collect()),
            Coeff::Matrix(m) => CoeffLiteral::Matrix(m.iter().map(Self::from_coeff).collect()),
        }
    }
}

/// Parses a JSON element literal `[[g, coefficient], …]` into terms.
pub fn parse_element_literal(text: &str) -> Result<Vec<(Element, Coeff)>> {
    let terms: ElementTerms =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("element literal: {e}")))?;
    Ok(terms.0.into_iter().map(|(g, c)| (g, c.to_coeff())).collect())
}

impl CrossedElement {
    /// Builds an element, summing repeated group elements and validating
    /// every term.
    pub fn new(ctx: &Arc<CrossedProduct>, terms: Vec<(Element, Coeff)>) -> Result<Self> {
        let alg = ctx.algebra();
        let mut map: BTreeMap<Element, Coeff> = BTreeMap::new();
        for (g, a) in terms {
            if !ctx.group().is_element(&g) {
                return Err(Error::Domain(format!("{g} is not an element of {}", ctx.group().name())));
            }
            alg.validate(&a)?;
            match map.get_mut(&g) {
                Some(b) => *b = alg.add(b, &a),
                None => {
                    map.insert(g, a);
                }
            }
        }
        Ok(Self::from_map(ctx.clone(), map, 0.0))
    }

    fn from_map(ctx: Arc<CrossedProduct>, mut terms: BTreeMap<Element, Coeff>, prune_error: f64) -> Self {
        let alg = ctx.action.algebra().clone();
        terms.retain(|_, a| !alg.is_zero(a));
        CrossedElement { ctx, terms, prune_error }
    }

    pub fn from_literal(ctx: &Arc<CrossedProduct>, text: &str) -> Result<Self> {
        Self::new(ctx, parse_element_literal(text)?)
    }

    pub fn to_literal(&self) -> ElementTerms {
        ElementTerms(
            self.terms.iter().map(|(g, a)| (g.clone(), CoeffLiteral::from_coeff(a))).collect(),
        )
    }

    pub fn zero(ctx: &Arc<CrossedProduct>) -> Self {
        Self::from_map(ctx.clone(), BTreeMap::new(), 0.0)
    }

    /// `δ_g ⊗ a`.
    pub fn delta(ctx: &Arc<CrossedProduct>, g: Element, a: Coeff) -> Result<Self> {
        Self::new(ctx, vec![(g, a)])
    }

    /// `δ_e ⊗ 1`, when the coefficient algebra is unital.
    pub fn identity(ctx: &Arc<CrossedProduct>) -> Result<Self> {
        let one = ctx
            .algebra()
            .one()
            .ok_or_else(|| Error::Unsupported(format!("{} has no unit", ctx.algebra().name())))?;
        Self::delta(ctx, ctx.group().identity(), one)
    }

    /// Scalar element `Σ c_g δ_g` on a unital coefficient algebra.
    pub fn from_scalars(ctx: &Arc<CrossedProduct>, terms: &[(Element, f64)]) -> Result<Self> {
        let alg = ctx.algebra();
        let v: Option<Vec<_>> = terms
            .iter()
            .map(|(g, c)| alg.scalar(Complex64::new(*c, 0.0)).map(|a| (g.clone(), a)))
            .collect();
        let v = v.ok_or_else(|| Error::Unsupported(format!("{} has no unit", alg.name())))?;
        Self::new(ctx, v)
    }

    pub fn context(&self) -> &Arc<CrossedProduct> {
        &self.ctx
    }

    pub fn terms(&self) -> &BTreeMap<Element, Coeff> {
        &self.terms
    }

    pub fn get(&self, g: &Element) -> Option<&Coeff> {
        self.terms.get(g)
    }

    pub fn support_len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Accumulated ℓ¹ bound on the distance to the unpruned value.
    pub fn prune_error(&self) -> f64 {
        self.prune_error
    }

    fn same_context(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.ctx, &other.ctx) {
            Ok(())
        } else {
            Err(Error::MixedContext)
        }
    }

    pub fn axpy(&self, c: Complex64, other: &Self) -> Result<Self> {
        self.same_context(other)?;
        let alg = self.ctx.algebra();
        let mut out = self.terms.clone();
        for (g, b) in &other.terms {
            let v = match out.get(g) {
                Some(a) => alg.axpy(a, c, b),
                None => alg.scale(b, c),
            };
            out.insert(g.clone(), v);
        }
        let err = self.prune_error + c.norm() * other.prune_error;
        Ok(Self::from_map(self.ctx.clone(), out, err))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.axpy(Complex64::new(1.0, 0.0), other)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.axpy(Complex64::new(-1.0, 0.0), other)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let alg = self.ctx.algebra();
        let terms = self.terms.iter().map(|(g, a)| (g.clone(), alg.scale(a, c))).collect();
        Self::from_map(self.ctx.clone(), terms, self.prune_error * c.norm())
    }

    /// `φ*ψ(g) = Σ_h φ(h) α_h(ψ(h⁻¹g))`.
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        self.same_context(other)?;
        let group = self.ctx.group();
        let alg = self.ctx.algebra();
        let action = self.ctx.action();
        let budget = self.ctx.support_budget;
        let mut out: BTreeMap<Element, Coeff> = BTreeMap::new();
        for (h, a) in &self.terms {
            for (k, b) in &other.terms {
                let p = alg.mul(a, &action.apply(h, b))?;
                let g = group.multiply(h, k);
                match out.get_mut(&g) {
                    Some(acc) => *acc = alg.add(acc, &p),
                    None => {
                        out.insert(g, p);
                        if out.len() > budget {
                            return Err(Error::SupportBudget { budget });
                        }
                    }
                }
            }
        }
        let (ea, eb) = (self.prune_error, other.prune_error);
        let err = if ea == 0.0 && eb == 0.0 {
            0.0
        } else {
            self.l1_norm() * eb + other.l1_norm() * ea + ea * eb
        };
        Ok(Self::from_map(self.ctx.clone(), out, err))
    }

    /// `φ*(g) = α_g(φ(g⁻¹)*)`.
    pub fn involution(&self) -> Self {
        let group = self.ctx.group();
        let alg = self.ctx.algebra();
        let terms = self
            .terms
            .iter()
            .map(|(h, a)| {
                let g = group.inverse(h);
                let v = self.ctx.action().apply(&g, &alg.star(a));
                (g, v)
            })
            .collect();
        Self::from_map(self.ctx.clone(), terms, self.prune_error)
    }

    /// `‖φ‖_{d,m} = Σ_g (1+τ(g))^d ‖φ(g)‖_m`.
    pub fn weighted_norm(&self, d: u32, m: usize) -> Result<f64> {
        let alg = self.ctx.algebra();
        let mut s = 0.0;
        for (g, a) in &self.terms {
            let w = (1.0 + self.ctx.gauge.length(g)? as f64).powi(d as i32);
            s += w * alg.seminorm(a, m);
        }
        Ok(s)
    }

    /// `‖φ‖_{0,0}`; never fails since no gauge values are needed.
    pub fn l1_norm(&self) -> f64 {
        let alg = self.ctx.algebra();
        self.terms.values().map(|a| alg.norm(a)).sum()
    }

    /// `g ↦ τ(g)^k φ(g)` with the raw gauge.
    pub fn gauge_multiplier(&self, k: u32) -> Result<Self> {
        let alg = self.ctx.algebra();
        let mut terms = BTreeMap::new();
        for (g, a) in &self.terms {
            let t = (self.ctx.gauge.length(g)? as f64).powi(k as i32);
            terms.insert(g.clone(), alg.scale(a, Complex64::new(t, 0.0)));
        }
        Ok(Self::from_map(self.ctx.clone(), terms, 0.0))
    }

    /// Drops terms with `‖φ(g)‖_0 < eps` and adds their mass to the error bound.
    pub fn pruned(&self, eps: f64) -> Self {
        if eps <= 0.0 {
            return self.clone();
        }
        let alg = self.ctx.algebra();
        let mut dropped = 0.0;
        let mut terms = BTreeMap::new();
        for (g, a) in &self.terms {
            let n = alg.norm(a);
            if n < eps {
                dropped += n;
            } else {
                terms.insert(g.clone(), a.clone());
            }
        }
        Self::from_map(self.ctx.clone(), terms, self.prune_error + dropped)
    }

    /// `φⁿ` by repeated squaring; `n = 0` gives the identity. With
    /// `prune_eps > 0` every intermediate product is pruned.
    pub fn power(&self, n: u64, prune_eps: f64) -> Result<Self> {
        let mut result: Option<Self> = None;
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                result = Some(match result {
                    None => base.clone(),
                    Some(r) => r.convolve(&base)?.pruned(prune_eps),
                });
            }
            k >>= 1;
            if k > 0 {
                base = base.convolve(&base)?.pruned(prune_eps);
            }
        }
        match result {
            Some(r) => Ok(r),
            None => Self::identity(&self.ctx),
        }
    }

    /// `Σ φ^k/k!`, stopping once `‖φ‖₁^{K+1} e^{‖φ‖₁}/(K+1)! < tol`.
    pub fn exponential(&self, tol: f64) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(Error::Domain(format!("tolerance {tol} must be positive")));
        }
        let norm = self.l1_norm();
        let mut sum = Self::identity(&self.ctx)?;
        let mut term = sum.clone();
        let mut k = 0u32;
        let mut bound = norm.exp();
        loop {
            // bound = ‖φ‖^{k+1} e^{‖φ‖} / (k+1)!
            bound *= norm / (k + 1) as f64;
            if bound < tol {
                return Ok(sum);
            }
            k += 1;
            term = term.convolve(self)?.scale(Complex64::new(1.0 / k as f64, 0.0));
            sum = sum.add(&term)?;
            if k > 100_000 {
                return Err(Error::Tolerance(format!("exponential series did not reach {tol}")));
            }
        }
    }

    /// Largest `‖φ(g)* − φ*(g)‖_0`-style deviation from self-adjointness.
    pub fn self_adjoint_defect(&self) -> f64 {
        self.sub(&self.involution()).map(|d| d.l1_norm()).unwrap_or(f64::INFINITY)
    }
}

impl TowerAlgebra for Arc<CrossedProduct> {
    type Elem = CrossedElement;

    fn mul(&self, a: &CrossedElement, b: &CrossedElement) -> Result<CrossedElement> {
        a.convolve(b)
    }

    fn axpy(&self, a: &CrossedElement, c: Complex64, b: &CrossedElement) -> Result<CrossedElement> {
        a.axpy(c, b)
    }

    fn scale(&self, a: &CrossedElement, c: Complex64) -> CrossedElement {
        a.scale(c)
    }

    /// The crossed-product tower `‖ψ‖′_m = ‖ψ‖_{m,m}`.
    fn seminorm(&self, a: &CrossedElement, m: usize) -> Result<f64> {
        a.weighted_norm(m as u32, m)
    }

    fn support_size(&self, a: &CrossedElement) -> usize {
        a.support_len()
    }
}
