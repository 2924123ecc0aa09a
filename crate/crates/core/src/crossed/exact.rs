use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;

use super::element::{CrossedElement, CrossedProduct};
use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::groups::{Element, Gauge};

/// Integer-coefficient element of a scalar group algebra, with overflow
/// checked arithmetic. Used where identities must hold exactly.
#[derive(Clone, Debug)]
pub struct ExactElement {
    ctx: Arc<CrossedProduct>,
    terms: BTreeMap<Element, i128>,
}

impl PartialEq for ExactElement {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.ctx, &other.ctx) && self.terms == other.terms
    }
}

fn overflow() -> Error {
    Error::Domain("integer overflow in exact arithmetic".into())
}

impl ExactElement {
    pub fn new(ctx: &Arc<CrossedProduct>, terms: &[(Element, i128)]) -> Result<Self> {
        if !ctx.is_scalar_trivial() {
            return Err(Error::Unsupported(
                "exact mode needs scalar coefficients and the trivial action".into(),
            ));
        }
        let mut map = BTreeMap::new();
        for (g, c) in terms {
            if !ctx.group().is_element(g) {
                return Err(Error::Domain(format!("{g} is not an element of {}", ctx.group().name())));
            }
            let e = map.entry(g.clone()).or_insert(0i128);
            *e = e.checked_add(*c).ok_or_else(overflow)?;
        }
        map.retain(|_, c| *c != 0);
        Ok(ExactElement { ctx: ctx.clone(), terms: map })
    }

    pub fn context(&self) -> &Arc<CrossedProduct> {
        &self.ctx
    }

    pub fn terms(&self) -> &BTreeMap<Element, i128> {
        &self.terms
    }

    pub fn get(&self, g: &Element) -> i128 {
        self.terms.get(g).copied().unwrap_or(0)
    }

    pub fn convolve(&self, other: &Self) -> Result<Self> {
        if !Arc::ptr_eq(&self.ctx, &other.ctx) {
            return Err(Error::MixedContext);
        }
        let group = self.ctx.group();
        let budget = self.ctx.support_budget();
        let mut out: BTreeMap<Element, i128> = BTreeMap::new();
        for (h, a) in &self.terms {
            for (k, b) in &other.terms {
                let p = a.checked_mul(*b).ok_or_else(overflow)?;
                let e = out.entry(group.multiply(h, k)).or_insert(0);
                *e = e.checked_add(p).ok_or_else(overflow)?;
                if out.len() > budget {
                    return Err(Error::SupportBudget { budget });
                }
            }
        }
        out.retain(|_, c| *c != 0);
        Ok(ExactElement { ctx: self.ctx.clone(), terms: out })
    }

    pub fn identity(ctx: &Arc<CrossedProduct>) -> Result<Self> {
        Self::new(ctx, &[(ctx.group().identity(), 1)])
    }

    pub fn power(&self, n: u64) -> Result<Self> {
        let mut result = Self::identity(&self.ctx)?;
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                result = result.convolve(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.convolve(&base)?;
            }
        }
        Ok(result)
    }

    /// `Σ_g (1+τ(g))^d |φ(g)|` exactly.
    pub fn weighted_norm(&self, d: u32) -> Result<u128> {
        let mut s: u128 = 0;
        for (g, c) in &self.terms {
            let w = (1 + self.ctx.gauge().length(g)? as u128).checked_pow(d).ok_or_else(overflow)?;
            let t = w.checked_mul(c.unsigned_abs()).ok_or_else(overflow)?;
            s = s.checked_add(t).ok_or_else(overflow)?;
        }
        Ok(s)
    }

    pub fn to_float(&self) -> Result<CrossedElement> {
        let terms = self
            .terms
            .iter()
            .map(|(g, c)| (g.clone(), Coeff::Scalar(Complex64::new(*c as f64, 0.0))))
            .collect();
        CrossedElement::new(&self.ctx, terms)
    }
}

/// The integer `r` with `r^n = x`, if there is one.
pub fn exact_root(x: u128, n: u32) -> Option<u128> {
    if n == 0 {
        return None;
    }
    let guess = (x as f64).powf(1.0 / n as f64).round() as u128;
    (guess.saturating_sub(1)..=guess + 1).find(|r| r.checked_pow(n) == Some(x))
}
