use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;

use super::*;
use crate::coeff::{make_action, matrix_algebra, scalar_algebra, scale_schwartz, ActionRule, Coeff};
use crate::crossed::{unitize, CrossedElement, CrossedProduct, ExactElement};
use crate::groups::{make_group, Element, GroupDescriptor};
use crate::rng::stream;

fn ctx(desc: GroupDescriptor) -> Arc<CrossedProduct> {
    let g = Arc::new(make_group(&desc).unwrap());
    CrossedProduct::new(make_action(g, Arc::new(scalar_algebra()), ActionRule::Trivial).unwrap())
}

fn e1(n: i64) -> Element {
    Element(vec![n])
}

fn scalar_at(x: &CrossedElement, g: &Element) -> f64 {
    match x.get(g) {
        Some(Coeff::Scalar(z)) => z.re,
        None => 0.0,
        other => panic!("not a scalar: {other:?}"),
    }
}

fn walk(c: &Arc<CrossedProduct>) -> CrossedElement {
    let gens: Vec<(Element, f64)> = c.group().generators().iter().map(|g| (g.clone(), 0.25)).collect();
    CrossedElement::from_scalars(c, &gens).unwrap()
}

fn laplace(c: &Arc<CrossedProduct>) -> CrossedElement {
    CrossedElement::from_scalars(c, &[(e1(1), 1.0), (e1(-1), 1.0)]).unwrap()
}

fn random_heisenberg(c: &Arc<CrossedProduct>, radius: u32, seed: u64) -> CrossedElement {
    let mut rng = stream(seed, "spectra.tests");
    let ball = c.gauge().ball(radius).unwrap();
    let mut terms = Vec::new();
    for g in ball {
        if rng.random_bool(0.3) {
            let z = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            terms.push((g, Coeff::Scalar(z)));
        }
    }
    CrossedElement::new(c, terms).unwrap()
}

#[test]
fn binomial_radius_is_exactly_two() {
    let c = ctx(GroupDescriptor::FreeAbelian(1));
    let phi = ExactElement::new(&c, &[(e1(1), 1), (e1(-1), 1)]).unwrap();
    let rep = spectral_radius_exact(&phi, 0, 64, Schedule::All).unwrap();
    assert_eq!(rep.sequence.len(), 64);
    assert!(rep.exact_roots.unwrap().iter().all(|r| *r == Some(2)));
    assert!(rep.sequence.iter().all(|p| p.1 == 2.0));
    assert_eq!(rep.estimate, 2.0);
}

#[test]
fn weighted_radius_decreases_toward_two() {
    let c = ctx(GroupDescriptor::FreeAbelian(1));
    let rep = spectral_radius(&laplace(&c), 2, 0, 64, Schedule::Doubling).unwrap();
    let ns: Vec<u64> = rep.sequence.iter().map(|p| p.0).collect();
    assert_eq!(ns, vec![1, 2, 4, 8, 16, 32, 64]);
    assert!(rep.nonincreasing);
    assert!(rep.last <= 2.2 && rep.last > 2.0);
    assert_eq!(rep.estimate, rep.last);
}

#[test]
fn random_walk_mass_is_conserved() {
    let c = ctx(GroupDescriptor::Free(2));
    let rep = spectral_radius(&walk(&c), 0, 0, 12, Schedule::All).unwrap();
    assert!(rep.sequence.iter().all(|p| (p.1 - 1.0).abs() < 1e-12));
}

#[test]
fn budget_overrun_gives_partial_report() {
    let g = Arc::new(make_group(&GroupDescriptor::Free(2)).unwrap());
    let action = make_action(g, Arc::new(scalar_algebra()), ActionRule::Trivial).unwrap();
    let c = CrossedProduct::with_budget(action, 200);
    let rep = spectral_radius(&walk(&c), 0, 0, 64, Schedule::All).unwrap();
    assert!(!rep.complete);
    assert!(rep.sequence.len() < 64);
}

#[test]
fn estimate_never_increases_with_depth() {
    let c = ctx(GroupDescriptor::Heisenberg);
    let phi = random_heisenberg(&c, 2, 3);
    let mut prev = f64::INFINITY;
    for n_max in [2, 4, 8] {
        let est = spectral_radius(&phi, 1, 0, n_max, Schedule::All).unwrap().estimate;
        assert!(est <= prev);
        prev = est;
    }
}

#[test]
fn fourier_of_laplacian() {
    let c = ctx(GroupDescriptor::FreeAbelian(1));
    let est = cstar_fourier(&laplace(&c), 1 << 16).unwrap();
    assert!((est.value - 2.0).abs() < 1e-12);
    assert!(est.error_bound < 1e-3);
    let delta = CrossedElement::from_scalars(&c, &[(e1(0), 1.0)]).unwrap();
    let est = cstar_fourier(&delta, 64).unwrap();
    assert_eq!(est.value, 1.0);
    assert_eq!(est.error_bound, 0.0);
}

#[test]
fn fourier_in_two_dimensions() {
    let c = ctx(GroupDescriptor::FreeAbelian(2));
    let phi = CrossedElement::from_scalars(
        &c,
        &[(Element(vec![1, 0]), 1.0), (Element(vec![0, 1]), 1.0)],
    )
    .unwrap();
    // |e^{ia} + e^{ib}| peaks at 2 on the diagonal
    let est = cstar_fourier(&phi, 64).unwrap();
    assert!((est.value - 2.0).abs() < 1e-12);
}

#[test]
fn fourier_matrix_symbol() {
    let g = Arc::new(make_group(&GroupDescriptor::FreeAbelian(1)).unwrap());
    let alg = Arc::new(matrix_algebra(2).unwrap());
    let c = CrossedProduct::new(make_action(g, alg, ActionRule::Trivial).unwrap());
    let s = |v: f64| Coeff::Scalar(Complex64::new(v, 0.0));
    // symbol diag(2cos θ, 1) has top singular value 2
    let a = Coeff::Matrix(vec![s(1.0), s(0.0), s(0.0), s(0.0)]);
    let b = Coeff::Matrix(vec![s(0.0), s(0.0), s(0.0), s(1.0)]);
    let phi = CrossedElement::new(&c, vec![(e1(1), a.clone()), (e1(-1), a), (e1(0), b)]).unwrap();
    let est = cstar_fourier(&phi, 1024).unwrap();
    assert!((est.value - 2.0).abs() < 1e-9);
}

#[test]
fn fourier_rejects_nonabelian() {
    let c = ctx(GroupDescriptor::Heisenberg);
    assert!(matches!(cstar_fourier(&walk(&c), 64), Err(crate::Error::Unsupported(_))));
}

#[test]
fn compression_of_laplacian() {
    let c = ctx(GroupDescriptor::FreeAbelian(1));
    let est = cstar_compression(&laplace(&c), 64).unwrap();
    // the ball has 129 points: Dirichlet eigenvalue 2cos(π/130)
    let oracle = 2.0 * (std::f64::consts::PI / 130.0).cos();
    assert!((est.value - oracle).abs() < 1e-6, "{}", est.value);
    assert!(est.value >= 1.99 && est.value <= 2.0);
    assert!(est.lower_bound_only);
}

#[test]
fn compression_of_delta_is_one() {
    let c = ctx(GroupDescriptor::Heisenberg);
    let delta = CrossedElement::from_scalars(&c, &[(Element(vec![0, 0, 0]), 1.0)]).unwrap();
    for r in [0, 2, 4] {
        assert_eq!(cstar_compression(&delta, r).unwrap().value, 1.0);
    }
}

#[test]
fn compression_grows_with_radius() {
    let c = ctx(GroupDescriptor::Free(2));
    let h = walk(&c);
    let mut prev = 0.0;
    for r in [1, 2, 4, 6] {
        let v = cstar_compression(&h, r).unwrap().value;
        assert!(v >= prev - 1e-9);
        assert!(v <= 0.8660254037844387);
        prev = v;
    }
}

#[test]
fn compression_matches_fourier_on_z() {
    let c = ctx(GroupDescriptor::FreeAbelian(1));
    let phi = CrossedElement::from_scalars(&c, &[(e1(0), 0.5), (e1(2), 1.0), (e1(-2), 1.0), (e1(1), -0.3), (e1(-1), -0.3)]).unwrap();
    let f = cstar_fourier(&phi, 1 << 14).unwrap();
    let lower = cstar_compression(&phi, 200).unwrap();
    assert!(lower.value <= f.upper().unwrap() + 1e-9);
    assert!(f.value - lower.value < 1e-3);
}

#[test]
fn twisted_compression_on_finite_group() {
    let g = Arc::new(make_group(&GroupDescriptor::Cyclic(2)).unwrap());
    let alg = Arc::new(scale_schwartz(vec![0.0, 0.0]).unwrap());
    let rule = ActionRule::Permutation { maps: vec![vec![0, 1], vec![1, 0]] };
    let c = CrossedProduct::new(make_action(g, alg, rule).unwrap());
    let f = |a: f64, b: f64| c.algebra().function([(0, Complex64::new(a, 0.0)), (1, Complex64::new(b, 0.0))].into()).unwrap();
    // δ_s ⊗ 1 is a unitary and δ_e ⊗ (1,0) a projection
    let u = CrossedElement::new(&c, vec![(e1(1), f(1.0, 1.0))]).unwrap();
    let p = CrossedElement::new(&c, vec![(e1(0), f(1.0, 0.0))]).unwrap();
    for x in [&u, &p] {
        assert!((cstar_compression(x, 1).unwrap().value - 1.0).abs() < 1e-12);
    }
    // (δ_e + δ_s) ⊗ (1,0) has norm √2 in M_2
    let w = p.add(&CrossedElement::new(&c, vec![(e1(1), f(1.0, 0.0))]).unwrap()).unwrap();
    let v = cstar_compression(&w, 1).unwrap().value;
    assert!((v - 2f64.sqrt()).abs() < 1e-9, "{v}");
    assert!(v <= w.l1_norm());
}

#[test]
fn neumann_trivial_inverse() {
    let c = ctx(GroupDescriptor::FreeAbelian(1));
    let x = unitize(CrossedElement::zero(&c), Complex64::new(1.0, 0.0));
    let (inv, cert) = neumann_inverse(&x, &NeumannOptions::default()).unwrap();
    assert_eq!(cert.terms, 0);
    assert!(inv.a.is_zero());
    assert_eq!(inv.lambda, Complex64::new(1.0, 0.0));
    assert_eq!(cert.residual, 0.0);
}

#[test]
fn neumann_matches_quadratic_root() {
    let c = ctx(GroupDescriptor::FreeAbelian(1));
    let phi = CrossedElement::from_scalars(&c, &[(e1(0), 1.0), (e1(1), -0.3), (e1(-1), -0.3)]).unwrap();
    let x = split_unit(&phi).unwrap();
    let opts = NeumannOptions { tol: 1e-12, ..NeumannOptions::default() };
    let (inv, cert) = neumann_inverse(&x, &opts).unwrap();
    assert!(cert.converged && cert.residual <= 1e-12);
    assert!(cert.tails.iter().all(|t| t.converges), "{:?}", cert.tails);
    for n in -20i64..=20 {
        let oracle = (1.0f64 / 3.0).powi(n.abs() as i32) / 0.8;
        let mut got = scalar_at(&inv.a, &e1(n));
        if n == 0 {
            got += inv.lambda.re;
        }
        assert!((got - oracle).abs() <= 1e-10 + 1e-6 * oracle, "n = {n}: {got} vs {oracle}");
    }
}

#[test]
fn neumann_on_heisenberg() {
    let c = ctx(GroupDescriptor::Heisenberg);
    let mut terms = vec![(Element(vec![0, 0, 0]), 1.0)];
    terms.extend(c.group().generators().iter().map(|g| (g.clone(), -0.1)));
    let phi = CrossedElement::from_scalars(&c, &terms).unwrap();
    let opts = NeumannOptions { tol: 1e-8, d_max: 4, ..NeumannOptions::default() };
    let (_, cert) = neumann_inverse(&split_unit(&phi).unwrap(), &opts).unwrap();
    assert!(cert.converged);
    assert!(cert.tails.iter().all(|t| t.converges));
}

#[test]
fn neumann_reports_missing_decay() {
    let c = ctx(GroupDescriptor::FreeAbelian(1));
    let phi = CrossedElement::from_scalars(&c, &[(e1(0), 1.0), (e1(1), -0.5), (e1(-1), -0.5)]).unwrap();
    let err = neumann_inverse(&split_unit(&phi).unwrap(), &NeumannOptions::default());
    assert!(matches!(err, Err(crate::Error::NoDecay { .. })));
}

#[test]
fn ratio_sequence_exact() {
    let c = ctx(GroupDescriptor::FreeAbelian(1));
    let phi = ExactElement::new(&c, &[(e1(1), 1), (e1(-1), 1)]).unwrap();
    let rep = pytlik_ratio_exact(&phi, 60).unwrap();
    assert!(rep.exact.unwrap().iter().all(|a| *a == Some(4)));
    assert_eq!(rep.limsup, 4.0);
    let delta = ExactElement::new(&c, &[(e1(0), 1)]).unwrap();
    assert!(pytlik_ratio_exact(&delta, 10).unwrap().ratios.iter().all(|p| p.1 == 1.0));
}

#[test]
fn ratio_sequence_free_group() {
    let c = ctx(GroupDescriptor::Free(2));
    let rep = pytlik_ratio(&walk(&c), 10).unwrap();
    assert!(rep.ratios.iter().all(|p| (p.1 - 1.0).abs() < 1e-12));
}

#[test]
fn ratio_sequence_rejects_non_selfadjoint() {
    let c = ctx(GroupDescriptor::FreeAbelian(1));
    let phi = CrossedElement::from_scalars(&c, &[(e1(1), 1.0)]).unwrap();
    assert!(matches!(pytlik_ratio(&phi, 4), Err(crate::Error::Domain(_))));
}

#[test]
fn split_bound_trivial_and_binomial() {
    let c = ctx(GroupDescriptor::FreeAbelian(1));
    let delta = CrossedElement::from_scalars(&c, &[(e1(0), 1.0)]).unwrap();
    let b = pytlik_split_bound(&delta, &delta, &delta, 1, 1).unwrap();
    assert_eq!(b.lhs, 1.0);
    assert!(b.holds);
    let psi = laplace(&c).power(8, 0.0).unwrap();
    let f1 = CrossedElement::from_scalars(&c, &[(e1(0), 1.0), (e1(1), 1.0)]).unwrap();
    let f2 = CrossedElement::from_scalars(&c, &[(e1(0), 1.0), (e1(1), -1.0)]).unwrap();
    for m in 1..=10 {
        assert!(pytlik_split_bound(&psi, &f1, &f2, 2, m).unwrap().holds);
    }
}

#[test]
fn split_bound_rejects_free_group() {
    let c = ctx(GroupDescriptor::Free(2));
    let h = walk(&c);
    assert!(matches!(pytlik_split_bound(&h, &h, &h, 1, 2), Err(crate::Error::Unsupported(_))));
}

#[test]
fn derivation_examples() {
    let c = ctx(GroupDescriptor::FreeAbelian(1));
    let phi = CrossedElement::from_scalars(&c, &[(e1(2), 1.0)]).unwrap();
    let rep = derivation_check(&phi, 2, 4).unwrap();
    assert!(rep.max_difference == 0.0);
    for (g, v) in rep.ball.iter().zip(&rep.operator_side) {
        // i² τ(2)² = −4
        let want = if *g == e1(2) { -4.0 } else { 0.0 };
        assert_eq!(*v, Complex64::new(want, 0.0));
    }
    let rep0 = derivation_check(&phi, 0, 4).unwrap();
    for (g, v) in rep0.ball.iter().zip(&rep0.operator_side) {
        assert_eq!(v.re, scalar_at(&phi, g));
    }
    assert!(matches!(derivation_check(&phi, 1, 1), Err(crate::Error::Domain(_))));
}

#[test]
fn derivation_on_heisenberg() {
    let c = ctx(GroupDescriptor::Heisenberg);
    let phi = random_heisenberg(&c, 2, 11);
    for k in 0..=3 {
        let rep = derivation_check(&phi, k, 3).unwrap();
        assert!(rep.max_difference <= 1e-12);
        assert!(rep.commutator_schur <= rep.schur_ceiling + 1e-12);
    }
}
