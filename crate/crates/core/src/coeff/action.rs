use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::algebra::{Coeff, CoefficientAlgebra};
use crate::error::{Error, Result};
use crate::groups::{Element, Gauge, Group, GroupKind, WordGauge};
use crate::rng::stream;

/// How a group acts on the coefficient algebra.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "lowercase")]
pub enum ActionRule {
    Trivial,
    /// `(α_j f)(n) = f(n − j)`: `ℤ` on sequences over `ℤ`, or `ℤ_n` rotating
    /// functions on `{0, …, n−1}`.
    Translation,
    /// Finite group acting through maps of the index set:
    /// `(α_g f)(i) = f(maps[g⁻¹][i])`, with `maps` indexed by group element.
    Permutation { maps: Vec<Vec<usize>> },
}

/// Outcome of fitting `‖α_g(a)‖_m ≤ C(1+τ(g))^d ‖a‖_k` for one `m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TemperedFit {
    pub m: usize,
    pub k: usize,
    /// `None` when no degree up to the cap passed.
    pub degree: Option<u32>,
    pub constant: f64,
    /// Maximizing pair `(g, sample index)` at the reported (or last tried) degree.
    pub witness: Option<(Element, usize)>,
}

/// Largest ratio of the maximal constant on the full sample to the one on
/// the half-radius subsample accepted for a degree. A too-small degree makes
/// the constant grow with the radius.
const DOUBLING_SLACK: f64 = 1.5;

#[derive(Clone, Debug)]
pub struct GroupAction {
    group: Arc<Group>,
    algebra: Arc<CoefficientAlgebra>,
    rule: ActionRule,
    certificate: Vec<TemperedFit>,
}

/// Radius of the ball used for axiom checks.
const AXIOM_RADIUS: u32 = 3;
/// Radius of the ball used for the temperedness certificate.
const CERTIFICATE_RADIUS: u32 = 8;
const CERTIFICATE_M_MAX: usize = 4;
const CERTIFICATE_D_MAX: u32 = 8;

/// Builds an action and verifies `α_e = id`, functoriality on `B_3 × B_3`
/// and isometry on `‖·‖_0`, then fits the temperedness certificate.
pub fn make_action(
    group: Arc<Group>,
    algebra: Arc<CoefficientAlgebra>,
    rule: ActionRule,
) -> Result<GroupAction> {
    check_compatible(&group, &algebra, &rule)?;
    let action = GroupAction { group, algebra, rule, certificate: Vec::new() };

    let gauge = WordGauge::new(action.group.clone());
    let axiom_ball = gauge.ball(AXIOM_RADIUS)?;
    let samples = action.default_samples();
    let alg = &action.algebra;

    let e = action.group.identity();
    for (i, a) in samples.iter().enumerate() {
        if alg.norm(&alg.sub(&action.apply(&e, a), a)) > 0.0 {
            return Err(Error::Domain(format!("identity acts nontrivially on sample {i}")));
        }
        for g in &axiom_ball {
            let ga = action.apply(g, a);
            let (n0, n1) = (alg.norm(a), alg.norm(&ga));
            if (n0 - n1).abs() > 1e-12 * n0.max(1.0) {
                return Err(Error::NonIsometric(format!(
                    "g = {g}, sample {i}: ‖a‖₀ = {n0}, ‖α_g(a)‖₀ = {n1}"
                )));
            }
        }
    }
    for g in &axiom_ball {
        for h in &axiom_ball {
            let gh = action.group.multiply(g, h);
            for (i, a) in samples.iter().enumerate().take(4) {
                let lhs = action.apply(g, &action.apply(h, a));
                let rhs = action.apply(&gh, a);
                if alg.norm(&alg.sub(&lhs, &rhs)) > 1e-12 * alg.norm(a).max(1.0) {
                    return Err(Error::Domain(format!(
                        "α_g∘α_h ≠ α_gh at g = {g}, h = {h}, sample {i}"
                    )));
                }
            }
        }
    }

    let cert_ball = gauge.ball(CERTIFICATE_RADIUS)?;
    let certificate =
        fit_tempered(&action, &gauge, &cert_ball, &samples, CERTIFICATE_M_MAX, CERTIFICATE_D_MAX)?;
    Ok(GroupAction { certificate, ..action })
}

fn check_compatible(group: &Group, algebra: &CoefficientAlgebra, rule: &ActionRule) -> Result<()> {
    let leaf = leaf_algebra(algebra);
    match rule {
        ActionRule::Trivial => Ok(()),
        ActionRule::Translation => match (group.kind(), leaf) {
            (GroupKind::FreeAbelian { rank: 1 }, CoefficientAlgebra::SchwartzZ { .. }) => Ok(()),
            (GroupKind::Cyclic { order }, CoefficientAlgebra::ScaleSchwartz { scale })
                if scale.len() as i64 == *order =>
            {
                Ok(())
            }
            _ => Err(Error::Domain(format!(
                "translation of {} is not defined on {}",
                group.name(),
                algebra.name()
            ))),
        },
        ActionRule::Permutation { maps } => {
            let order = group.order().ok_or_else(|| {
                Error::Domain("permutation actions need a finite group".into())
            })?;
            let len = match leaf {
                CoefficientAlgebra::ScaleSchwartz { scale } => scale.len(),
                _ => return Err(Error::Domain("permutation actions need a finite index set".into())),
            };
            if maps.len() != order {
                return Err(Error::Dimension { expected: order, found: maps.len() });
            }
            if let Some(bad) = maps.iter().find(|p| p.len() != len || p.iter().any(|&i| i >= len)) {
                return Err(Error::Domain(format!("index map {bad:?} does not act on 0..{len}")));
            }
            Ok(())
        }
    }
}

fn leaf_algebra(a: &CoefficientAlgebra) -> &CoefficientAlgebra {
    match a {
        CoefficientAlgebra::Matrix { base, .. } => leaf_algebra(base),
        other => other,
    }
}

impl GroupAction {
    pub fn group(&self) -> &Arc<Group> {
        &self.group
    }

    pub fn algebra(&self) -> &Arc<CoefficientAlgebra> {
        &self.algebra
    }

    pub fn rule(&self) -> &ActionRule {
        &self.rule
    }

    pub fn certificate(&self) -> &[TemperedFit] {
        &self.certificate
    }

    pub fn is_trivial(&self) -> bool {
        self.rule == ActionRule::Trivial
    }

    /// `α_g(a)`.
    pub fn apply(&self, g: &Element, a: &Coeff) -> Coeff {
        match &self.rule {
            ActionRule::Trivial => a.clone(),
            ActionRule::Translation => match self.group.kind() {
                GroupKind::Cyclic { order } => {
                    let (j, n) = (g.0[0], *order);
                    self.algebra.map_indices(a, &|k| (k + j).rem_euclid(n))
                }
                _ => {
                    let j = g.0[0];
                    self.algebra.map_indices(a, &|k| k + j)
                }
            },
            ActionRule::Permutation { maps } => {
                let gi = self.group.inverse(g);
                let map = &maps[self.group.finite_index(&gi).expect("finite group element")];
                pull_back(&self.algebra, a, map)
            }
        }
    }

    /// Axiom and certificate samples: the sixteen basis elements of least
    /// first seminorm, then Gaussian samples from a fixed stream.
    pub fn default_samples(&self) -> Vec<Coeff> {
        let alg = &self.algebra;
        let mut basis = alg.basis();
        basis.sort_by(|a, b| alg.seminorm(a, 1).total_cmp(&alg.seminorm(b, 1)));
        let mut out: Vec<Coeff> = basis.into_iter().take(16).collect();
        let mut rng = stream(0, "coeff.action");
        out.extend((0..8).map(|_| self.algebra.sample(&mut rng, 4)));
        out.retain(|a| !self.algebra.is_zero(a));
        out
    }
}

fn pull_back(alg: &CoefficientAlgebra, a: &Coeff, map: &[usize]) -> Coeff {
    match (alg, a) {
        (_, Coeff::Scalar(_)) => a.clone(),
        (_, Coeff::Func(f)) => Coeff::Func(
            map.iter()
                .enumerate()
                .filter_map(|(i, &src)| f.get(&(src as i64)).map(|v| (i as i64, *v)))
                .collect(),
        ),
        (CoefficientAlgebra::Matrix { base, .. }, Coeff::Matrix(m)) => {
            Coeff::Matrix(m.iter().map(|x| pull_back(base, x, map)).collect())
        }
        _ => a.clone(),
    }
}

/// Maximal `‖α_g(a)‖_m / ((1+τ(g))^d ‖a‖_k)` over the sample, with the
/// maximizing pair. Pairs with `‖a‖_k = 0` are skipped.
pub fn tempered_constant(
    action: &GroupAction,
    gauge: &dyn Gauge,
    group_sample: &[Element],
    coeff_sample: &[Coeff],
    m: usize,
    k: usize,
    d: u32,
) -> Result<(f64, Option<(Element, usize)>)> {
    let alg = &action.algebra;
    let mut best = (0.0, None);
    for g in group_sample {
        let w = (1.0 + gauge.length(g)? as f64).powi(d as i32);
        for (i, a) in coeff_sample.iter().enumerate() {
            let den = alg.seminorm(a, k);
            if den == 0.0 {
                continue;
            }
            let ratio = alg.seminorm(&action.apply(g, a), m) / (w * den);
            if ratio > best.0 || best.1.is_none() {
                best = (ratio, Some((g.clone(), i)));
            }
        }
    }
    Ok(best)
}

/// Temperedness certificate for `m = 0..=m_max` with `k = m`.
///
/// A degree is accepted when the constant on the whole group sample is at
/// most [`DOUBLING_SLACK`] times the constant on the elements of at most
/// half the sample's radius. Finite groups always get degree 0.
pub fn fit_tempered(
    action: &GroupAction,
    gauge: &dyn Gauge,
    group_sample: &[Element],
    coeff_sample: &[Coeff],
    m_max: usize,
    d_max: u32,
) -> Result<Vec<TemperedFit>> {
    if group_sample.is_empty() || coeff_sample.is_empty() {
        return Err(Error::Domain("empty temperedness sample".into()));
    }
    let lengths: Vec<u64> = group_sample.iter().map(|g| gauge.length(g)).collect::<Result<_>>()?;
    let radius = *lengths.iter().max().unwrap_or(&0);
    let half: Vec<Element> = group_sample
        .iter()
        .zip(&lengths)
        .filter(|(_, &l)| 2 * l <= radius)
        .map(|(g, _)| g.clone())
        .collect();
    let finite = action.group.is_finite();

    let mut out = Vec::with_capacity(m_max + 1);
    for m in 0..=m_max {
        let k = m;
        let mut fit = TemperedFit { m, k, degree: None, constant: f64::INFINITY, witness: None };
        for d in 0..=d_max {
            let (c_all, witness) =
                tempered_constant(action, gauge, group_sample, coeff_sample, m, k, d)?;
            let (c_half, _) = tempered_constant(action, gauge, &half, coeff_sample, m, k, d)?;
            fit.constant = c_all;
            fit.witness = witness;
            if finite || radius < 2 || c_all <= DOUBLING_SLACK * c_half + 1e-12 {
                fit.degree = Some(d);
                break;
            }
        }
        out.push(fit);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{scalar_algebra, scale_schwartz, schwartz_z};
    use crate::groups::{make_group, GroupDescriptor};
    use num_complex::Complex64;
    use std::collections::BTreeMap;

    fn z() -> Arc<Group> {
        Arc::new(make_group(&GroupDescriptor::FreeAbelian(1)).unwrap())
    }

    fn z2() -> Arc<Group> {
        Arc::new(make_group(&GroupDescriptor::Cyclic(2)).unwrap())
    }

    #[test]
    fn trivial_action_has_degree_zero() {
        let act = make_action(z(), Arc::new(scalar_algebra()), ActionRule::Trivial).unwrap();
        for fit in act.certificate() {
            assert_eq!(fit.degree, Some(0));
            assert_eq!(fit.k, fit.m);
            assert!((fit.constant - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn translation_degree_equals_m() {
        let act =
            make_action(z(), Arc::new(schwartz_z(32).unwrap()), ActionRule::Translation).unwrap();
        for fit in act.certificate() {
            assert_eq!(fit.degree, Some(fit.m as u32), "{fit:?}");
            assert!(fit.constant <= 1.0 + 1e-12);
        }
        let f = Coeff::Func(BTreeMap::from([(3, Complex64::new(1.0, 0.0))]));
        let g = act.apply(&Element(vec![2]), &f);
        assert_eq!(g, Coeff::Func(BTreeMap::from([(5, Complex64::new(1.0, 0.0))])));
    }

    #[test]
    fn swap_is_isometric_with_degree_zero() {
        let alg = Arc::new(scale_schwartz(vec![0.0, 0.0]).unwrap());
        let rule = ActionRule::Permutation { maps: vec![vec![0, 1], vec![1, 0]] };
        let act = make_action(z2(), alg, rule).unwrap();
        assert!(act.certificate().iter().all(|f| f.degree == Some(0)));
    }

    #[test]
    fn collapsing_map_is_rejected() {
        let alg = Arc::new(scale_schwartz(vec![0.0, 0.0]).unwrap());
        let rule = ActionRule::Permutation { maps: vec![vec![0, 1], vec![0, 0]] };
        assert!(matches!(make_action(z2(), alg, rule), Err(Error::NonIsometric(_))));
    }

    #[test]
    fn incompatible_rules_are_rejected() {
        let alg = Arc::new(scale_schwartz(vec![0.0, 1.0, 2.0]).unwrap());
        assert!(make_action(z(), alg.clone(), ActionRule::Translation).is_err());
        let rule = ActionRule::Permutation { maps: vec![vec![0, 1, 2]] };
        assert!(make_action(z(), alg, rule).is_err());
    }
}
