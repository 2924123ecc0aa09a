use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;

use super::*;
use crate::coeff::{make_action, scalar_algebra, schwartz_z, ActionRule, Coeff};
use crate::groups::{make_group, Element, GroupDescriptor};
use crate::rng::stream;

fn ctx(desc: GroupDescriptor) -> Arc<CrossedProduct> {
    let g = Arc::new(make_group(&desc).unwrap());
    CrossedProduct::new(make_action(g, Arc::new(scalar_algebra()), ActionRule::Trivial).unwrap())
}

fn z_ctx() -> Arc<CrossedProduct> {
    ctx(GroupDescriptor::FreeAbelian(1))
}

fn e1(n: i64) -> Element {
    Element(vec![n])
}

fn sc(re: f64, im: f64) -> Coeff {
    Coeff::Scalar(Complex64::new(re, im))
}

fn scalar_at(x: &CrossedElement, g: &Element) -> Complex64 {
    match x.get(g) {
        Some(Coeff::Scalar(z)) => *z,
        None => Complex64::new(0.0, 0.0),
        other => panic!("not a scalar: {other:?}"),
    }
}

fn random_z(c: &Arc<CrossedProduct>, rng: &mut impl Rng, radius: i64) -> CrossedElement {
    let mut terms = Vec::new();
    for n in -radius..=radius {
        if rng.random_bool(0.6) {
            terms.push((e1(n), sc(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))));
        }
    }
    CrossedElement::new(c, terms).unwrap()
}

fn translation_ctx() -> Arc<CrossedProduct> {
    let g = Arc::new(make_group(&GroupDescriptor::FreeAbelian(1)).unwrap());
    let alg = Arc::new(schwartz_z(16).unwrap());
    CrossedProduct::new(make_action(g, alg, ActionRule::Translation).unwrap())
}

fn random_translation(c: &Arc<CrossedProduct>, rng: &mut impl Rng) -> CrossedElement {
    let terms = (0..4)
        .map(|_| (e1(rng.random_range(-3..=3)), c.algebra().sample(rng, 3)))
        .collect();
    CrossedElement::new(c, terms).unwrap()
}

#[test]
fn product_of_deltas() {
    let c = translation_ctx();
    let alg = c.algebra();
    let mut rng = stream(1, "deltas");
    let (a, b) = (alg.sample(&mut rng, 3), alg.sample(&mut rng, 3));
    let x = CrossedElement::delta(&c, e1(2), a.clone()).unwrap();
    let y = CrossedElement::delta(&c, e1(-5), b.clone()).unwrap();
    let expect = alg.mul(&a, &c.action().apply(&e1(2), &b)).unwrap();
    let xy = x.convolve(&y).unwrap();
    assert_eq!(xy.support_len() <= 1, true);
    let got = xy.get(&e1(-3)).cloned().unwrap_or_else(|| alg.zero());
    assert!(alg.norm(&alg.sub(&got, &expect)) < 1e-15);
}

#[test]
fn convolution_is_polynomial_multiplication() {
    let c = z_ctx();
    let mut rng = stream(2, "poly");
    for _ in 0..20 {
        let (x, y) = (random_z(&c, &mut rng, 4), random_z(&c, &mut rng, 4));
        let xy = x.convolve(&y).unwrap();
        let mut dense = [Complex64::new(0.0, 0.0); 17];
        for i in -4..=4i64 {
            for j in -4..=4i64 {
                dense[(i + j + 8) as usize] += scalar_at(&x, &e1(i)) * scalar_at(&y, &e1(j));
            }
        }
        for (k, v) in dense.iter().enumerate() {
            let got = scalar_at(&xy, &e1(k as i64 - 8));
            assert!((got - v).norm() <= 1e-14 * v.norm().max(1.0));
        }
    }
}

#[test]
fn identity_is_two_sided() {
    let c = ctx(GroupDescriptor::Heisenberg);
    let id = CrossedElement::identity(&c).unwrap();
    let x = CrossedElement::new(
        &c,
        vec![(Element(vec![1, 2, 3]), sc(1.0, 2.0)), (Element(vec![0, -1, 0]), sc(-0.5, 0.0))],
    )
    .unwrap();
    assert_eq!(id.convolve(&x).unwrap(), x);
    assert_eq!(x.convolve(&id).unwrap(), x);
    assert!(matches!(
        CrossedElement::identity(&translation_ctx()),
        Err(crate::Error::Unsupported(_))
    ));
}

#[test]
fn involution_examples() {
    let c = z_ctx();
    let phi = CrossedElement::delta(&c, e1(1), sc(0.0, 1.0)).unwrap();
    let star = phi.involution();
    assert_eq!(star, CrossedElement::delta(&c, e1(-1), sc(0.0, -1.0)).unwrap());
    let sa = CrossedElement::from_scalars(&c, &[(e1(1), 1.0), (e1(-1), 1.0)]).unwrap();
    assert_eq!(sa.involution(), sa);
}

#[test]
fn involution_is_anti_multiplicative() {
    let c = translation_ctx();
    let mut rng = stream(3, "star");
    for _ in 0..20 {
        let (x, y) = (random_translation(&c, &mut rng), random_translation(&c, &mut rng));
        let lhs = x.convolve(&y).unwrap().involution();
        let rhs = y.involution().convolve(&x.involution()).unwrap();
        assert!(lhs.sub(&rhs).unwrap().l1_norm() <= 1e-12 * lhs.l1_norm().max(1.0));
        assert_eq!(x.involution().involution(), x);
        // translation only preserves ‖·‖_0, so only m = 0 is invariant here
        for d in 0..4 {
            let (a, b) = (x.weighted_norm(d, 0).unwrap(), x.involution().weighted_norm(d, 0).unwrap());
            assert!((a - b).abs() <= 1e-12 * a);
        }
    }
}

#[test]
fn weighted_norm_examples() {
    let c = z_ctx();
    let d0 = CrossedElement::from_scalars(&c, &[(e1(0), 1.0)]).unwrap();
    for d in 0..6 {
        assert_eq!(d0.weighted_norm(d, 0).unwrap(), 1.0);
    }
    let d3 = CrossedElement::from_scalars(&c, &[(e1(3), 1.0)]).unwrap();
    assert_eq!(d3.weighted_norm(2, 0).unwrap(), 16.0);
    let mut rng = stream(4, "l1");
    for _ in 0..20 {
        let (x, y) = (random_z(&c, &mut rng, 5), random_z(&c, &mut rng, 5));
        assert!(x.convolve(&y).unwrap().l1_norm() <= x.l1_norm() * y.l1_norm() * (1.0 + 1e-12));
    }
}

#[test]
fn binomial_powers() {
    let c = z_ctx();
    let phi = CrossedElement::from_scalars(&c, &[(e1(1), 1.0), (e1(-1), 1.0)]).unwrap();
    assert_eq!(phi.power(0, 0.0).unwrap(), CrossedElement::identity(&c).unwrap());
    let p = phi.power(10, 0.0).unwrap();
    let mut binom = 1.0;
    for k in 0..=10i64 {
        assert_eq!(scalar_at(&p, &e1(10 - 2 * k)).re, binom);
        binom = binom * (10 - k) as f64 / (k + 1) as f64;
    }
    assert_eq!(p.l1_norm(), 1024.0);

    let exact = ExactElement::new(&c, &[(e1(1), 1), (e1(-1), 1)]).unwrap();
    assert_eq!(exact.power(64).unwrap().weighted_norm(0).unwrap(), 1u128 << 64);
}

#[test]
fn heisenberg_mass_is_conserved() {
    let c = ctx(GroupDescriptor::Heisenberg);
    let gens: Vec<_> = c.group().generators().iter().map(|g| (g.clone(), 1.0)).collect();
    let phi = CrossedElement::from_scalars(&c, &gens).unwrap();
    for n in [1, 3, 6] {
        assert_eq!(phi.power(n, 0.0).unwrap().l1_norm(), 4f64.powi(n as i32));
    }
}

#[test]
fn pruning_tracks_error() {
    let c = z_ctx();
    let phi = CrossedElement::from_scalars(&c, &[(e1(1), 0.5), (e1(-1), 0.5)]).unwrap();
    let exact = phi.power(20, 0.0).unwrap();
    let pruned = phi.power(20, 1e-4).unwrap();
    assert_eq!(exact.prune_error(), 0.0);
    assert!(pruned.prune_error() > 0.0);
    assert!(exact.sub(&pruned).unwrap().l1_norm() <= pruned.prune_error() + 1e-12);
}

#[test]
fn mixed_contexts_are_rejected() {
    let (a, b) = (z_ctx(), z_ctx());
    let x = CrossedElement::identity(&a).unwrap();
    let y = CrossedElement::identity(&b).unwrap();
    assert_eq!(x.convolve(&y), Err(crate::Error::MixedContext));
}

/// `J_n(x)` from its power series.
fn bessel_j(n: i64, x: f64) -> f64 {
    let n_abs = n.unsigned_abs() as i32;
    let mut term = (x / 2.0).powi(n_abs) / (1..=n_abs).map(f64::from).product::<f64>();
    let mut sum = 0.0;
    for k in 0..60 {
        sum += term;
        term *= -(x / 2.0).powi(2) / ((k + 1) as f64 * (k + 1 + n_abs) as f64);
    }
    if n < 0 && n_abs % 2 == 1 {
        -sum
    } else {
        sum
    }
}

#[test]
fn exponential_matches_bessel() {
    let c = z_ctx();
    assert_eq!(
        CrossedElement::zero(&c).exponential(1e-12).unwrap(),
        CrossedElement::identity(&c).unwrap()
    );
    let psi = CrossedElement::from_scalars(&c, &[(e1(1), 1.0), (e1(-1), 1.0)]).unwrap();
    let e = psi.scale(Complex64::new(0.0, 1.0)).exponential(1e-13).unwrap();
    for n in -12..=12i64 {
        let expect = Complex64::new(0.0, 1.0).powi(n as i32) * bessel_j(n, 2.0);
        assert!((scalar_at(&e, &e1(n)) - expect).norm() < 1e-10, "n = {n}");
    }
}

#[test]
fn gauge_multiplier_examples() {
    let c = z_ctx();
    let phi = CrossedElement::from_scalars(&c, &[(e1(2), 1.0)]).unwrap();
    assert_eq!(phi.gauge_multiplier(0).unwrap(), phi);
    assert_eq!(
        phi.gauge_multiplier(3).unwrap(),
        CrossedElement::from_scalars(&c, &[(e1(2), 8.0)]).unwrap()
    );
}

#[test]
fn unitized_product_expands_bilinearly() {
    let c = translation_ctx();
    let mut rng = stream(5, "unit");
    let (a, b) = (random_translation(&c, &mut rng), random_translation(&c, &mut rng));
    let (l, m) = (Complex64::new(0.5, 1.0), Complex64::new(-2.0, 0.25));
    let xy = unitized_mul(&unitize(a.clone(), l), &unitize(b.clone(), m)).unwrap();
    let expect = a
        .convolve(&b)
        .unwrap()
        .add(&b.scale(l))
        .unwrap()
        .add(&a.scale(m))
        .unwrap();
    assert!(xy.a.sub(&expect).unwrap().l1_norm() < 1e-12);
    assert_eq!(xy.lambda, l * m);
    let one = unitize(CrossedElement::zero(&c), Complex64::new(1.0, 0.0));
    assert_eq!(unitized_seminorm(&one, 0).unwrap(), 1.0);
    assert_eq!(unitized_seminorm(&one, 2).unwrap(), 0.0);
    let x = unitize(a, l);
    assert_eq!(unitized_mul(&x, &one).unwrap(), x);
}

#[test]
fn element_literal_round_trip() {
    let c = z_ctx();
    let x = CrossedElement::from_literal(&c, "[[[1], [1.0, 0.0]], [[-1], [1.0, 0.0]]]").unwrap();
    assert_eq!(x, CrossedElement::from_scalars(&c, &[(e1(1), 1.0), (e1(-1), 1.0)]).unwrap());
    let text = serde_json::to_string(&x.to_literal()).unwrap();
    assert_eq!(CrossedElement::from_literal(&c, &text).unwrap(), x);
    assert!(CrossedElement::from_literal(&c, "[[[1, 2], [1.0, 0.0]]]").is_err());
    assert!(CrossedElement::from_literal(&c, "{").is_err());
}
