use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;

use super::*;
use crate::coeff::{
    make_action, matrix_lift, scalar_algebra, scale_schwartz, schwartz_z, ActionRule, Coeff, CoefficientAlgebra,
};
use crate::crossed::CrossedProduct;
use crate::error::Error;
use crate::groups::{make_group, GroupDescriptor};
use crate::rng::{stream, LabRng};
use crate::tower::{Unitization, Unitized};

fn sampler_for(alg: &CoefficientAlgebra, spread: i64) -> impl FnMut(&mut LabRng) -> crate::Result<Coeff> {
    coeff_sampler(Arc::new(alg.clone()), spread, Tails::Mixed)
}

fn crossed(desc: GroupDescriptor, alg: CoefficientAlgebra, rule: ActionRule) -> Arc<CrossedProduct> {
    let g = Arc::new(make_group(&desc).unwrap());
    CrossedProduct::new(make_action(g, Arc::new(alg), rule).unwrap())
}

#[test]
fn chain_sum_by_hand() {
    let norms = vec![vec![1.0, 2.0], vec![3.0, 4.0]];
    // k = (0,0): 3; (1,0): 6; (0,1): 4
    assert_eq!(chain_sum(&norms, 1, false), 13.0);
    assert_eq!(chain_sum(&norms, 1, true), 10.0);
    assert_eq!(chain_sum(&norms, 0, false), 3.0);
}

#[test]
fn schwartz_chains_fit_unit_constants() {
    let alg = schwartz_z(12).unwrap();
    let mut s = sampler_for(&alg, 6);
    let opts = ChainOptions::new(200, 6, 4, 1, "verify.test.schwartz");
    let rep = check_strong_spec_inv(&alg, &mut s, &opts).unwrap();
    assert!(rep.pass);
    let c = rep.constants.clone().unwrap();
    assert_eq!(c.c, 1.0);
    assert_eq!(c.d, vec![1.0; 5]);
    assert_eq!(c.p, vec![0, 1, 2, 3, 4]);
    assert!(rep.witnesses.is_empty());
    assert!(rep.replay());
}

#[test]
fn single_norm_algebra_passes() {
    let alg = scalar_algebra();
    let mut s = sampler_for(&alg, 0);
    let rep = check_strong_spec_inv(&alg, &mut s, &ChainOptions::new(50, 5, 0, 2, "verify.test.scalar")).unwrap();
    let c = rep.constants.unwrap();
    assert_eq!((c.c, c.d[0], c.p[0]), (1.0, 1.0, 0));
    let mut s = sampler_for(&alg, 0);
    let rep = check_strong_spec_inv(&alg, &mut s, &ChainOptions::new(50, 5, 3, 2, "verify.test.scalar")).unwrap();
    assert!(rep.pass);
    assert_eq!(rep.constants.unwrap().d, vec![1.0; 4]);
}

#[test]
fn blackadar_cuntz_unit_constant() {
    let algs = [schwartz_z(10).unwrap(), scale_schwartz(vec![0.0, 1.0, 3.5, 10.0]).unwrap(), scalar_algebra()];
    for alg in algs {
        let mut s = sampler_for(&alg, 5);
        let rep = check_bc_condition(&alg, &mut s, 100, 4, 3, &FitCaps::default()).unwrap();
        assert!(rep.pass, "{}", alg.name());
        assert_eq!(rep.constant, 1.0, "{}", alg.name());
    }
}

#[test]
fn blackadar_cuntz_chain_holds() {
    for alg in [schwartz_z(10).unwrap(), scalar_algebra()] {
        let mut s = sampler_for(&alg, 5);
        let rep = check_bc_implies_chain(&alg, &mut s, 1.0, &ChainOptions::new(100, 5, 4, 4, "verify.test.bcchain"))
            .unwrap();
        assert!(rep.pass, "{}: {:?}", alg.name(), rep.witnesses.first());
        assert!(rep.max_ratio <= 1.0 + BOUND_SLACK);
    }
}

#[test]
fn matrix_lift_bound_with_dimension_factor() {
    let l = 3;
    let alg = matrix_lift(schwartz_z(8).unwrap(), l).unwrap();
    let mut s = sampler_for(&alg, 4);
    let opts = ChainOptions::new(100, 4, 3, 5, "verify.test.lift");
    let rep = check_chain_bound(&alg, &mut s, &opts, "matrix-lift", &|n, m| {
        ((l as f64).powi(n as i32 - 1), m, false)
    })
    .unwrap();
    assert!(rep.pass, "{:?}", rep.witnesses.first());
    // products of all-ones matrices attain the factor
    let ones = Coeff::Matrix(vec![Coeff::Func(BTreeMap::from([(0, Complex64::new(1.0, 0.0))])); l * l]);
    let o = observe(&alg, &[ones.clone(), ones.clone(), ones], 0, 0).unwrap();
    assert_eq!(o.lhs[0], 9.0);
}

#[test]
fn unitized_chain_bound() {
    let base = schwartz_z(8).unwrap();
    let u = Unitization(base.clone());
    let mut inner = sampler_for(&base, 4);
    let mut s = move |rng: &mut LabRng| -> crate::Result<Unitized<Coeff>> {
        let a = inner(rng)?;
        let lambda = if rng.random_bool(0.25) {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))
        };
        Ok(Unitized { a, lambda })
    };
    let rep = check_chain_bound(&u, &mut s, &ChainOptions::new(100, 5, 3, 6, "verify.test.unit"), "unitization", &|n, m| {
        (2f64.powi(n as i32), m, false)
    })
    .unwrap();
    assert!(rep.pass, "{:?}", rep.witnesses.first());
}

#[test]
fn sum_power_cases() {
    let rep = check_sum_power(6, 1, &[vec![3.0]]).unwrap();
    assert!(rep.pass);
    assert_eq!(rep.max_ratio, 1.0);
    let rep = check_sum_power(2, 2, &[vec![1.0, 1.0]]).unwrap();
    assert!(rep.pass);
    assert!((rep.max_ratio - 1.0).abs() < 1e-15);
    let rep = check_sum_power(6, 5, &random_tuples(2000, 5, 7)).unwrap();
    assert!(rep.pass);
    assert_eq!(rep.checked, 2000 * 5 * 7);
    assert!(matches!(check_sum_power(1, 2, &[vec![-1.0, 1.0]]), Err(Error::Domain(_))));
}

#[test]
fn ideal_restriction_keeps_ambient_constants() {
    let alg = schwartz_z(10).unwrap();
    let opts = ChainOptions::new(120, 5, 3, 8, "verify.test.ideal");
    let ambient = check_strong_spec_inv(&alg, &mut sampler_for(&alg, 5), &opts).unwrap();
    let vanishes = |a: &Coeff| matches!(a, Coeff::Func(f) if !f.contains_key(&0));
    let rep = check_restriction(&alg, &mut sampler_for(&alg, 5), &vanishes, &ambient, &opts).unwrap();
    assert!(rep.pass && rep.ambient_covers);
    let full = check_restriction(&alg, &mut sampler_for(&alg, 5), &|_| true, &ambient, &opts).unwrap();
    assert_eq!(full.fit.constants, ambient.constants);
    assert_eq!(full.fit.observations, ambient.observations);
}

#[test]
fn diagonal_matrices_restrict() {
    let alg = matrix_lift(schwartz_z(6).unwrap(), 2).unwrap();
    let opts = ChainOptions::new(80, 4, 2, 9, "verify.test.diag");
    let ambient = check_strong_spec_inv(&alg, &mut sampler_for(&alg, 3), &opts).unwrap();
    let diag = |a: &Coeff| matches!(a, Coeff::Matrix(m) if m[1] == Coeff::Func(BTreeMap::new()) && m[2] == Coeff::Func(BTreeMap::new()));
    let base = schwartz_z(6).unwrap();
    let mut inner = sampler_for(&base, 3);
    let mut s = move |rng: &mut LabRng| -> crate::Result<Coeff> {
        Ok(Coeff::Matrix(vec![inner(rng)?, base.zero(), base.zero(), inner(rng)?]))
    };
    let rep = check_restriction(&alg, &mut s, &diag, &ambient, &opts).unwrap();
    assert!(rep.pass);
}

#[test]
fn restriction_rejects_open_predicate() {
    let tower = KatznelsonTower;
    let ambient = check_strong_spec_inv(&tower, &mut laurent_sampler(), &ChainOptions::new(20, 3, 1, 0, "k")).unwrap();
    let narrow = |a: &Laurent| a.offset >= -6 && a.offset + a.width() as i64 <= 7;
    let err = check_restriction(&tower, &mut laurent_sampler(), &narrow, &ambient, &ChainOptions::new(20, 3, 1, 0, "k"));
    assert!(matches!(err, Err(Error::Domain(_))));
}

#[test]
fn tempered_fits() {
    let z = Arc::new(make_group(&GroupDescriptor::FreeAbelian(1)).unwrap());
    let alg = Arc::new(schwartz_z(16).unwrap());
    let translation = make_action(z.clone(), alg.clone(), ActionRule::Translation).unwrap();
    let rep = check_tempered(&translation, 8, 3, 6).unwrap();
    assert!(rep.pass);
    for f in &rep.fits {
        assert_eq!((f.k, f.degree), (f.m, Some(f.m as u32)));
    }
    assert_eq!(rep.rejected_below.len(), 3);
    for f in &rep.rejected_below {
        assert!(f.degree.is_none() && f.witness.is_some());
    }

    let trivial = make_action(z, alg, ActionRule::Trivial).unwrap();
    let rep = check_tempered(&trivial, 8, 3, 6).unwrap();
    for f in &rep.fits {
        assert_eq!((f.degree, f.constant), (Some(0), 1.0));
    }
    assert!(rep.rejected_below.is_empty());

    let z2 = Arc::new(make_group(&GroupDescriptor::Cyclic(2)).unwrap());
    let swap = ActionRule::Permutation { maps: vec![vec![0, 1], vec![1, 0]] };
    let act = make_action(z2, Arc::new(scale_schwartz(vec![0.0, 0.0]).unwrap()), swap).unwrap();
    assert!(check_tempered(&act, 1, 2, 4).unwrap().fits.iter().all(|f| f.degree == Some(0)));
}

#[test]
fn failing_report_replays() {
    let tower = KatznelsonTower;
    let mut opts = ChainOptions::new(60, 5, 1, 3, "verify.test.fail");
    opts.caps = FitCaps { c_max: 1.0, d_max: 0.5, p_slack: 0 };
    let rep = check_strong_spec_inv(&tower, &mut laurent_sampler(), &opts).unwrap();
    assert!(!rep.pass);
    assert!(!rep.witnesses.is_empty());
    assert!(rep.replay());
    let json = serde_json::to_string(&rep).unwrap();
    let back: FitReport = serde_json::from_str(&json).unwrap();
    assert!(back.replay());
    assert_eq!(back, rep);

    let mut forged = rep.clone();
    forged.pass = true;
    assert!(!forged.replay());
}

#[test]
fn tampered_constants_fail_replay() {
    let alg = schwartz_z(8).unwrap();
    let mut rep = check_strong_spec_inv(&alg, &mut sampler_for(&alg, 4), &ChainOptions::new(40, 4, 2, 4, "r")).unwrap();
    assert!(rep.replay());
    if let Some(c) = rep.constants.as_mut() {
        c.d[2] = 0.5;
    }
    assert!(!rep.replay());
}

#[test]
fn verdict_monotone_under_sample_growth() {
    let tower = KatznelsonTower;
    let mut last_pass = true;
    let mut last_c = 0.0;
    for count in [10, 20, 40, 80] {
        let mut opts = ChainOptions::new(count, 6, 1, 11, "verify.test.grow");
        opts.caps = FitCaps { c_max: 2.0, d_max: 3.0, p_slack: 1 };
        let rep = check_strong_spec_inv(&tower, &mut laurent_sampler(), &opts).unwrap();
        assert!(last_pass || !rep.pass, "fail turned into pass at {count}");
        if let Some(c) = &rep.constants {
            assert!(c.c >= last_c);
            last_c = c.c;
        }
        last_pass = rep.pass;
    }
}

#[test]
fn finite_crossed_swap() {
    let swap = ActionRule::Permutation { maps: vec![vec![0, 1], vec![1, 0]] };
    let ctx = crossed(GroupDescriptor::Cyclic(2), scale_schwartz(vec![0.0, 2.0]).unwrap(), swap);
    let rep = check_finite_crossed(&ctx, 3, 20, 0).unwrap();
    assert!(rep.pass, "{rep:?}");
    assert_eq!((rep.order, rep.coeff_dim, rep.image_dim, rep.fixed_dim), (2, 2, 4, 4));
    assert!(rep.homomorphism_defect <= 1e-12);
}

#[test]
fn finite_crossed_trivial_action_is_circulant() {
    let ctx = crossed(GroupDescriptor::Cyclic(3), scalar_algebra(), ActionRule::Trivial);
    let rep = check_finite_crossed(&ctx, 2, 20, 0).unwrap();
    assert!(rep.pass);
    assert_eq!(rep.image_dim, 3);
    let lift = crossed(GroupDescriptor::Cyclic(4), matrix_lift(scalar_algebra(), 2).unwrap(), ActionRule::Trivial);
    let rep = check_finite_crossed(&lift, 1, 10, 0).unwrap();
    assert!(rep.pass);
    assert_eq!(rep.image_dim, 16);
}

#[test]
fn finite_crossed_trivial_group() {
    let ctx = crossed(GroupDescriptor::FiniteTable(vec![vec![0]]), scale_schwartz(vec![0.0, 1.0, 2.0]).unwrap(), ActionRule::Trivial);
    let rep = check_finite_crossed(&ctx, 2, 10, 0).unwrap();
    assert!(rep.pass);
    assert_eq!((rep.order, rep.image_dim, rep.fixed_dim), (1, 3, 3));
    for (lo, hi) in &rep.norm_ratios {
        assert!((lo - 1.0).abs() < 1e-15 && (hi - 1.0).abs() < 1e-15);
    }
}

#[test]
fn finite_crossed_rejects_infinite_group() {
    let ctx = crossed(GroupDescriptor::FreeAbelian(1), scalar_algebra(), ActionRule::Trivial);
    assert!(matches!(check_finite_crossed(&ctx, 1, 1, 0), Err(Error::Domain(_))));
}

#[test]
fn crossed_sampler_draws_from_balls() {
    let ctx = crossed(GroupDescriptor::Heisenberg, scalar_algebra(), ActionRule::Trivial);
    let mut s = crossed_sampler(ctx.clone(), Tails::Gaussian).unwrap();
    let mut rng = stream(0, "t");
    let ball = ctx.gauge().ball(RADII.1).unwrap();
    for _ in 0..50 {
        let phi = s(&mut rng).unwrap();
        assert!(!phi.is_zero());
        assert!(phi.terms().keys().all(|g| ball.contains(g)));
    }
}

#[test]
fn translation_crossed_product_fits() {
    let ctx = crossed(GroupDescriptor::FreeAbelian(1), schwartz_z(16).unwrap(), ActionRule::Translation);
    let mut s = crossed_sampler(ctx.clone(), Tails::Mixed).unwrap();
    let rep = check_strong_spec_inv(&ctx, &mut s, &ChainOptions::new(60, 4, 2, 0, "verify.test.crossed")).unwrap();
    assert!(rep.pass, "{:?}", rep.witnesses.first());
    assert!(rep.replay());
}

#[test]
fn bessel_values() {
    assert!((bessel_j(0, 1.0) - 0.765_197_686_557_966_6).abs() < 1e-15);
    assert!((bessel_j(1, 2.0) - 0.576_724_807_756_873_4).abs() < 1e-15);
    assert!((bessel_j(3, 10.0) - 0.058_379_379_305_186_81).abs() < 1e-13);
    assert_eq!(bessel_l1(0.0), 1.0);
}

#[test]
fn laurent_products_agree() {
    let mut rng = stream(5, "t");
    let mut s = laurent_sampler();
    let a = s(&mut rng).unwrap();
    let wide = Laurent::new(-40, (0..81).map(|_| Complex64::new(rng.random(), rng.random())).collect());
    let fft = a.convolve(&wide).unwrap();
    let wide2 = wide.convolve(&wide).unwrap();
    for n in -120..=120 {
        let direct: Complex64 = (a.offset..a.offset + a.width() as i64).map(|k| a.get(k) * wide.get(n - k)).sum();
        assert!((fft.get(n) - direct).norm() < 1e-12);
        let direct: Complex64 = (-40..=40).map(|k| wide.get(k) * wide.get(n - k)).sum();
        assert!((wide2.get(n) - direct).norm() < 1e-11);
    }
}

#[test]
fn sup_bounds_bracket_symbol() {
    let l = Laurent::new(-1, vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]);
    let (lo, hi) = l.sup_bounds();
    assert!(lo <= 2.0 && 2.0 <= hi && hi - lo < 1e-3);
    let e = lacunary_psi(4.0, 4).scale(Complex64::new(0.0, 1.0)).exponential(EXP_TOL).unwrap();
    let (lo, hi) = e.sup_bounds();
    assert!((lo - 1.0).abs() < 1e-12 && hi >= 1.0 && hi < 1.01);
    assert!(e.l1() > 2.0);
}

#[test]
fn katznelson_table() {
    let rows = katznelson_demo(&[0.0, 2.0, 5.0, 10.0], 4, 1024).unwrap();
    let zero = &rows[0];
    assert_eq!((zero.l1, zero.cstar, zero.bound), (1.0, 1.0, 1.0));
    for row in &rows {
        assert!((row.l1 - row.bessel).abs() < 1e-8, "{row:?}");
        assert!((row.cstar - 1.0).abs() < 1e-8, "{row:?}");
        assert!(row.l1 <= row.bound);
        assert!(row.chain_defect < 1e-10, "{row:?}");
    }
    assert!(rows[3].l1 > 2.0);
}

#[test]
fn lacunary_chains_break_fitted_constants() {
    let opts = ChainOptions::new(120, 6, 1, 0, "verify.katznelson");
    let rep = katznelson_refutation(&opts, &[6], &[2, 4]).unwrap();
    assert!(rep.training.pass);
    assert!(rep.refuted);
    assert!(rep.rows.iter().filter(|r| r.m == 0).all(|r| !r.violated));
    assert!(rep.rows.iter().filter(|r| r.m == 1).all(|r| r.violated));
}
