use std::sync::Arc;

use num_complex::Complex64;
use rand::seq::IndexedRandom;
use rand::Rng;
use rand_distr::Cauchy;

use crate::coeff::{Coeff, CoefficientAlgebra};
use crate::crossed::{CrossedElement, CrossedProduct};
use crate::error::Result;
use crate::groups::Element;
use crate::rng::LabRng;

/// Smallest and largest ball radius for crossed supports.
pub const RADII: (u32, u32) = (3, 6);
const MAX_TERMS: usize = 6;

/// Coefficient distribution: Gaussian, or Gaussian rescaled by a Cauchy
/// magnitude on every other draw.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tails {
    Gaussian,
    Mixed,
}

fn heavy_factor(rng: &mut LabRng) -> f64 {
    let d = Cauchy::new(0.0, 1.0).expect("unit Cauchy");
    let x: f64 = rng.sample(d);
    x.abs().max(1e-3)
}

/// Nonzero coefficients with support spread up to `spread`.
pub fn coeff_sampler(alg: Arc<CoefficientAlgebra>, spread: i64, tails: Tails) -> impl FnMut(&mut LabRng) -> Result<Coeff> {
    let mut toggle = false;
    move |rng: &mut LabRng| {
        toggle = !toggle;
        loop {
            let a = alg.sample(rng, spread);
            if alg.is_zero(&a) {
                continue;
            }
            return Ok(if tails == Tails::Mixed && toggle {
                let s = heavy_factor(rng);
                alg.scale(&a, Complex64::new(s, 0.0))
            } else {
                a
            });
        }
    }
}

/// Crossed-product elements supported on random points of `B_R`, `R`
/// uniform in [`RADII`], with coefficients of support spread `R`.
pub fn crossed_sampler(ctx: Arc<CrossedProduct>, tails: Tails) -> Result<impl FnMut(&mut LabRng) -> Result<CrossedElement>> {
    let balls: Vec<Vec<Element>> = (RADII.0..=RADII.1).map(|r| ctx.gauge().ball(r)).collect::<Result<_>>()?;
    let mut toggle = false;
    Ok(move |rng: &mut LabRng| {
        toggle = !toggle;
        let alg = ctx.algebra();
        loop {
            let idx = rng.random_range(0..balls.len());
            let ball = &balls[idx];
            let k = rng.random_range(1..=MAX_TERMS.min(ball.len()));
            let spread = (RADII.0 as usize + idx) as i64;
            let heavy = tails == Tails::Mixed && toggle;
            let terms = ball
                .choose_multiple(rng, k)
                .cloned()
                .collect::<Vec<_>>()
                .into_iter()
                .map(|g| {
                    let a = alg.sample(rng, spread);
                    let a = if heavy { alg.scale(&a, Complex64::new(heavy_factor(rng), 0.0)) } else { a };
                    (g, a)
                })
                .collect();
            let phi = CrossedElement::new(&ctx, terms)?;
            if !phi.is_zero() {
                return Ok(phi);
            }
        }
    })
}
