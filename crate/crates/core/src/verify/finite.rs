use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coeff::{Coeff, CoefficientAlgebra};
use crate::crossed::{CrossedElement, CrossedProduct};
use crate::error::{Error, Result};
use crate::groups::Element;
use crate::rng::stream;

/// Largest group order handled exhaustively.
pub const FINITE_ORDER_CAP: usize = 8;
const TOL: f64 = 1e-12;

/// Outcome of the finite-group embedding check `G ⋊ B → C(G × G, B)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiniteCrossedReport {
    pub order: usize,
    pub coeff_dim: usize,
    /// Basis pairs checked for `i(F₁F₂) = i(F₁)i(F₂)`.
    pub pairs: usize,
    pub homomorphism_defect: f64,
    /// Dimension of `i(G ⋊ B)`.
    pub image_dim: usize,
    /// Rank of the averaging projector onto the `θ`-fixed points.
    pub fixed_dim: usize,
    /// Whether every `i(F)` is `θ`-fixed.
    pub image_fixed: bool,
    /// Per `m`: observed range of `‖i(F)‖′_m / ‖F‖_{0,m}` and the bounds
    /// `[1/(|G|A_m), A_m]` it must lie in, `A_m` the largest distortion of
    /// `α_g` on basis elements.
    pub norm_ratios: Vec<(f64, f64)>,
    pub norm_bounds: Vec<(f64, f64)>,
    pub pass: bool,
}

/// Element of `C(G × G, B)`, indexed `g·|G| + h`.
type Kernel = Vec<Coeff>;

fn coords(alg: &CoefficientAlgebra, a: &Coeff, out: &mut Vec<Complex64>) {
    match (alg, a) {
        (_, Coeff::Scalar(z)) => out.push(*z),
        (CoefficientAlgebra::ScaleSchwartz { scale }, Coeff::Func(f)) => {
            out.extend((0..scale.len() as i64).map(|i| f.get(&i).copied().unwrap_or_default()));
        }
        (CoefficientAlgebra::Matrix { base, .. }, Coeff::Matrix(m)) => {
            for x in m {
                coords(base, x, out);
            }
        }
        _ => {}
    }
}

fn rank(rows: &mut [Vec<Complex64>]) -> usize {
    let cols = rows.first().map_or(0, |r| r.len());
    let scale = rows.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..rows.len()).max_by(|&i, &j| rows[i][c].norm().total_cmp(&rows[j][c].norm())) else {
            break;
        };
        if rows[piv][c].norm() <= 1e-9 * scale {
            continue;
        }
        rows.swap(r, piv);
        let p = rows[r][c];
        for i in 0..rows.len() {
            if i != r {
                let f = rows[i][c] / p;
                if f != Complex64::new(0.0, 0.0) {
                    for j in c..cols {
                        let v = rows[r][j];
                        rows[i][j] -= f * v;
                    }
                }
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    r
}

/// Verifies that `i(F)(g,h) = α_g(F(g⁻¹h))` is a homomorphism onto the
/// `θ`-fixed points, `θ_g(S)(k,h) = α_{g⁻¹}(S(gk, gh))`, with equivalent
/// norms on the image.
pub fn check_finite_crossed(ctx: &Arc<CrossedProduct>, m_max: usize, samples: usize, seed: u64) -> Result<FiniteCrossedReport> {
    let group = ctx.group();
    let elems = group
        .elements()
        .ok_or_else(|| Error::Domain(format!("{} is not finite", group.name())))?;
    let order = elems.len();
    if order > FINITE_ORDER_CAP {
        return Err(Error::Domain(format!("group order {order} exceeds {FINITE_ORDER_CAP}")));
    }
    let alg = ctx.algebra();
    let action = ctx.action();
    let idx = |g: &Element| group.finite_index(g).expect("finite group element");
    let basis = alg.basis();

    let embed = |f: &CrossedElement| -> Kernel {
        let mut s = vec![alg.zero(); order * order];
        for g in &elems {
            for h in &elems {
                let x = group.multiply(&group.inverse(g), h);
                if let Some(a) = f.get(&x) {
                    s[idx(g) * order + idx(h)] = action.apply(g, a);
                }
            }
        }
        s
    };
    let kernel_mul = |s: &Kernel, t: &Kernel| -> Result<Kernel> {
        let mut out = vec![alg.zero(); order * order];
        for g in 0..order {
            for h in 0..order {
                let mut acc = alg.zero();
                for k in 0..order {
                    acc = alg.add(&acc, &alg.mul(&s[g * order + k], &t[k * order + h])?);
                }
                out[g * order + h] = acc;
            }
        }
        Ok(out)
    };
    let theta = |g: &Element, s: &Kernel| -> Kernel {
        let gi = group.inverse(g);
        let mut out = vec![alg.zero(); order * order];
        for k in &elems {
            for h in &elems {
                let src = s[idx(&group.multiply(g, k)) * order + idx(&group.multiply(g, h))].clone();
                out[idx(k) * order + idx(h)] = action.apply(&gi, &src);
            }
        }
        out
    };
    let flat = |s: &Kernel| -> Vec<Complex64> {
        let mut v = Vec::new();
        for a in s {
            coords(alg, a, &mut v);
        }
        v
    };

    // crossed-product basis δ_x ⊗ b
    let mut fb = Vec::new();
    for x in &elems {
        for b in &basis {
            fb.push(CrossedElement::new(ctx, vec![(x.clone(), b.clone())])?);
        }
    }
    let images: Vec<Kernel> = fb.iter().map(&embed).collect();

    let mut defect: f64 = 0.0;
    for (f1, i1) in fb.iter().zip(&images) {
        for (f2, i2) in fb.iter().zip(&images) {
            let lhs = embed(&f1.convolve(f2)?);
            let rhs = kernel_mul(i1, i2)?;
            for (a, b) in lhs.iter().zip(&rhs) {
                defect = defect.max(alg.norm(&alg.sub(a, b)));
            }
        }
    }

    let mut image_fixed = true;
    for s in &images {
        for g in &elems {
            let t = theta(g, s);
            if s.iter().zip(&t).any(|(a, b)| alg.norm(&alg.sub(a, b)) > TOL) {
                image_fixed = false;
            }
        }
    }
    let image_dim = rank(&mut images.iter().map(&flat).collect::<Vec<_>>());

    // averaging projector applied to the standard basis of C(G × G, B)
    let mut proj_rows = Vec::new();
    for pos in 0..order * order {
        for b in &basis {
            let mut s = vec![alg.zero(); order * order];
            s[pos] = b.clone();
            let mut avg = vec![alg.zero(); order * order];
            for g in &elems {
                let t = theta(g, &s);
                for (acc, v) in avg.iter_mut().zip(&t) {
                    *acc = alg.add(acc, v);
                }
            }
            proj_rows.push(flat(&avg));
        }
    }
    let fixed_dim = rank(&mut proj_rows);

    // norm equivalence on the image
    let mut norm_ratios = Vec::new();
    let mut norm_bounds = Vec::new();
    let mut rng = stream(seed, "verify.finite");
    let mut pool = fb.clone();
    for _ in 0..samples {
        let terms = elems.iter().map(|g| (g.clone(), alg.sample(&mut rng, 2))).collect();
        pool.push(CrossedElement::new(ctx, terms)?);
    }
    let mut norms_ok = true;
    for m in 0..=m_max {
        let mut a_m: f64 = 1.0;
        for g in &elems {
            for b in &basis {
                let n = alg.seminorm(b, m);
                if n > 0.0 {
                    a_m = a_m.max(alg.seminorm(&action.apply(g, b), m) / n);
                }
            }
        }
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for f in &pool {
            let base = f.weighted_norm(0, m)?;
            if base == 0.0 {
                continue;
            }
            let img = embed(f).iter().map(|a| alg.seminorm(a, m)).fold(0.0, f64::max);
            lo = lo.min(img / base);
            hi = hi.max(img / base);
        }
        let bounds = (1.0 / (order as f64 * a_m), a_m);
        if lo < bounds.0 * (1.0 - 1e-9) || hi > bounds.1 * (1.0 + 1e-9) {
            norms_ok = false;
        }
        norm_ratios.push((lo, hi));
        norm_bounds.push(bounds);
    }

    let expected = order * basis.len();
    let pass = defect <= TOL && image_fixed && image_dim == expected && fixed_dim == expected && norms_ok;
    Ok(FiniteCrossedReport {
        order,
        coeff_dim: basis.len(),
        pairs: fb.len() * fb.len(),
        homomorphism_defect: defect,
        image_dim,
        fixed_dim,
        image_fixed,
        norm_ratios,
        norm_bounds,
        pass,
    })
}
