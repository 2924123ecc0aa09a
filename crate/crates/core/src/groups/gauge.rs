use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use serde::Serialize;

use super::group::{Element, Group, GroupKind};
use crate::error::{Error, Result};

/// A length function on a group: `τ(e) = 0`, symmetric, subadditive.
pub trait Gauge: Send + Sync {
    fn length(&self, g: &Element) -> Result<u64>;
}

pub const DEFAULT_RADIUS_CAP: u32 = 256;
pub const DEFAULT_MEMORY_BUDGET: usize = 4_000_000;

#[derive(Debug, Default)]
struct BfsState {
    dist: HashMap<Element, u32>,
    /// Elements of the outermost completed sphere.
    frontier: Vec<Element>,
    /// Every element of word length `<= radius` is in `dist`.
    radius: u32,
}

/// Word length with respect to the group's generating set.
///
/// Exact values come from breadth-first search over the Cayley graph,
/// memoized behind a lock; standard presentations of free-abelian, cyclic
/// and free groups use their closed forms instead.
#[derive(Debug)]
pub struct WordGauge {
    group: Arc<Group>,
    radius_cap: u32,
    memory_budget: usize,
    state: RwLock<BfsState>,
}

impl WordGauge {
    pub fn new(group: Arc<Group>) -> Self {
        Self::with_caps(group, DEFAULT_RADIUS_CAP, DEFAULT_MEMORY_BUDGET)
    }

    pub fn with_caps(group: Arc<Group>, radius_cap: u32, memory_budget: usize) -> Self {
        let id = group.identity();
        let mut dist = HashMap::new();
        dist.insert(id.clone(), 0);
        WordGauge {
            group,
            radius_cap,
            memory_budget,
            state: RwLock::new(BfsState { dist, frontier: vec![id], radius: 0 }),
        }
    }

    pub fn group(&self) -> &Arc<Group> {
        &self.group
    }

    pub fn radius_cap(&self) -> u32 {
        self.radius_cap
    }

    fn closed_form(&self, g: &Element) -> Option<u64> {
        if !self.group.has_standard_generators() {
            return None;
        }
        match self.group.kind() {
            GroupKind::FreeAbelian { .. } => Some(g.0.iter().map(|x| x.unsigned_abs()).sum()),
            GroupKind::Free { .. } => Some(g.0.len() as u64),
            GroupKind::Cyclic { order } => {
                let k = g.0[0].rem_euclid(*order);
                Some(k.min(order - k) as u64)
            }
            _ => None,
        }
    }

    /// Completes the BFS up to `radius` (bounded by the cap and the budget).
    fn extend_to(&self, state: &mut BfsState, radius: u32) -> Result<()> {
        while state.radius < radius {
            if state.frontier.is_empty() {
                // finite group exhausted: every ball from here on is the whole group
                state.radius = radius;
                break;
            }
            let next_r = state.radius + 1;
            let mut next = Vec::new();
            for g in &state.frontier {
                for u in self.group.generators() {
                    let h = self.group.multiply(g, u);
                    if !state.dist.contains_key(&h) {
                        state.dist.insert(h.clone(), next_r);
                        next.push(h);
                    }
                }
                if state.dist.len() > self.memory_budget {
                    return Err(Error::MemoryBudget { budget: self.memory_budget });
                }
            }
            next.sort();
            state.frontier = next;
            state.radius = next_r;
        }
        Ok(())
    }

    /// Word length computed by BFS only, bypassing closed forms.
    pub fn bfs_length(&self, g: &Element) -> Result<u64> {
        if !self.group.is_element(g) {
            return Err(Error::Domain(format!("{g} is not an element of {}", self.group.name())));
        }
        {
            let st = self.state.read().expect("gauge lock poisoned");
            if let Some(&d) = st.dist.get(g) {
                return Ok(d as u64);
            }
            if st.radius >= self.radius_cap {
                return Err(Error::GaugeOverflow { cap: self.radius_cap });
            }
        }
        let mut st = self.state.write().expect("gauge lock poisoned");
        loop {
            if let Some(&d) = st.dist.get(g) {
                return Ok(d as u64);
            }
            if st.radius >= self.radius_cap || (st.frontier.is_empty() && st.radius > 0) {
                return Err(Error::GaugeOverflow { cap: self.radius_cap });
            }
            let r = st.radius + 1;
            self.extend_to(&mut st, r)?;
        }
    }

    /// The ball `B_r`, sorted by (word length, canonical form).
    pub fn ball(&self, radius: u32) -> Result<Vec<Element>> {
        if radius > self.radius_cap {
            return Err(Error::GaugeOverflow { cap: self.radius_cap });
        }
        let mut st = self.state.write().expect("gauge lock poisoned");
        self.extend_to(&mut st, radius)?;
        let mut out: Vec<(u32, Element)> = st
            .dist
            .iter()
            .filter(|(_, &d)| d <= radius)
            .map(|(g, &d)| (d, g.clone()))
            .collect();
        out.sort();
        Ok(out.into_iter().map(|(_, g)| g).collect())
    }
}

impl Gauge for WordGauge {
    fn length(&self, g: &Element) -> Result<u64> {
        if !self.group.is_element(g) {
            return Err(Error::Domain(format!("{g} is not an element of {}", self.group.name())));
        }
        if let Some(v) = self.closed_form(g) {
            if v > self.radius_cap as u64 {
                return Err(Error::GaugeOverflow { cap: self.radius_cap });
            }
            return Ok(v);
        }
        self.bfs_length(g)
    }
}

/// `1 + τ`, so that the gauge is bounded below by one.
pub struct Normalized<G>(pub G);

impl<G: Gauge> Gauge for Normalized<G> {
    fn length(&self, g: &Element) -> Result<u64> {
        Ok(1 + self.0.length(g)?)
    }
}

impl<G: Gauge + ?Sized> Gauge for Arc<G> {
    fn length(&self, g: &Element) -> Result<u64> {
        (**self).length(g)
    }
}

/// Constant function; a bounded (non-gauge) comparison target.
pub struct ConstantGauge(pub u64);

impl Gauge for ConstantGauge {
    fn length(&self, _g: &Element) -> Result<u64> {
        Ok(self.0)
    }
}

/// Outcome of a domination fit `τ₁(g) ≤ C·τ₂(g)^d`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Domination {
    Holds { constant: f64, degree: u32 },
    Fails { max_degree: u32, witness: Element },
}

/// Smallest degree `d ∈ 1..=d_max` with a finite constant `C` such that
/// `τ₁(g) ≤ C·τ₂(g)^d` on every sample point. Points where `τ₂` vanishes
/// must have `τ₁ = 0`.
pub fn gauge_dominates(
    t1: &dyn Gauge,
    t2: &dyn Gauge,
    sample: &[Element],
    d_max: u32,
) -> Result<Domination> {
    if sample.is_empty() {
        return Err(Error::Domain("empty sample".into()));
    }
    let values: Vec<(u64, u64)> = sample
        .iter()
        .map(|g| Ok((t1.length(g)?, t2.length(g)?)))
        .collect::<Result<_>>()?;
    if d_max == 0 {
        return Err(Error::Domain("degree cap must be at least 1".into()));
    }
    if let Some(i) = values.iter().position(|&(a, b)| b == 0 && a > 0) {
        return Ok(Domination::Fails { max_degree: d_max, witness: sample[i].clone() });
    }
    // On a finite sample with τ₂ > 0 wherever τ₁ > 0 the first degree already
    // admits a finite constant; higher degrees would only shrink it.
    let degree = 1;
    let constant = values
        .iter()
        .filter(|&&(_, b)| b > 0)
        .map(|&(a, b)| a as f64 / b as f64)
        .fold(0.0, f64::max);
    Ok(Domination::Holds { constant, degree })
}

/// Outcome of checking `τ(e) = 0`, `τ(g⁻¹) = τ(g)` on `B_R` and
/// `τ(gh) ≤ τ(g) + τ(h)` on pairs from `B_R × B_R`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GaugeAxiomReport {
    pub radius: u32,
    pub ball: usize,
    pub pairs: usize,
    /// Whether every pair of the ball was checked.
    pub exhaustive: bool,
    pub violation: Option<String>,
    pub pass: bool,
}

/// Checks the gauge axioms on `B_radius`: every pair when `|B|² ≤ pairs`,
/// otherwise `pairs` uniformly drawn pairs.
pub fn gauge_axioms(gauge: &dyn Gauge, group: &Group, ball: &[Element], radius: u32, pairs: usize, seed: u64) -> Result<GaugeAxiomReport> {
    use rand::Rng;

    let mut violation = None;
    if gauge.length(&group.identity())? != 0 {
        violation = Some("τ(e) ≠ 0".to_string());
    }
    let lengths: Vec<u64> = ball.iter().map(|g| gauge.length(g)).collect::<Result<_>>()?;
    for (g, &t) in ball.iter().zip(&lengths) {
        if violation.is_none() && gauge.length(&group.inverse(g))? != t {
            violation = Some(format!("τ({g}⁻¹) ≠ τ({g})"));
        }
    }
    let n = ball.len();
    let exhaustive = n.saturating_mul(n) <= pairs;
    let mut check = |i: usize, j: usize| -> Result<()> {
        let gh = group.multiply(&ball[i], &ball[j]);
        if violation.is_none() && gauge.length(&gh)? > lengths[i] + lengths[j] {
            violation = Some(format!("τ({}·{}) > τ({}) + τ({})", ball[i], ball[j], ball[i], ball[j]));
        }
        Ok(())
    };
    let checked = if exhaustive {
        for i in 0..n {
            for j in 0..n {
                check(i, j)?;
            }
        }
        n * n
    } else {
        let mut rng = crate::rng::stream(seed, "groups.gauge_axioms");
        for _ in 0..pairs {
            let (i, j) = (rng.random_range(0..n), rng.random_range(0..n));
            check(i, j)?;
        }
        pairs
    };
    Ok(GaugeAxiomReport { radius, ball: n, pairs: checked, exhaustive, pass: violation.is_none(), violation })
}
