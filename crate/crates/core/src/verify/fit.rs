use serde::{Deserialize, Serialize};

/// `Σ_{k₁+…+k_n ≤ p} ‖a₁‖_{k₁} ⋯ ‖a_n‖_{k_n}` (or `= p` when `exact`),
/// from the table `norms[i][k] = ‖a_i‖_k`, `k ≤ p`.
pub fn chain_sum(norms: &[Vec<f64>], p: usize, exact: bool) -> f64 {
    let mut poly = vec![0.0; p + 1];
    poly[0] = 1.0;
    for row in norms {
        let mut next = vec![0.0; p + 1];
        for (s, slot) in next.iter_mut().enumerate() {
            for k in 0..=s.min(row.len().saturating_sub(1)) {
                *slot += poly[s - k] * row[k];
            }
        }
        poly = next;
    }
    if exact {
        poly[p]
    } else {
        poly.iter().sum()
    }
}

/// One sampled chain `a₁ ⋯ a_n`: the product seminorms and the factor table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainObservation {
    /// `‖a₁ ⋯ a_n‖_m` for `m = 0..=m_max`.
    pub lhs: Vec<f64>,
    /// `norms[i][k] = ‖a_i‖_k` for `k = 0..=p_cap`.
    pub norms: Vec<Vec<f64>>,
}

impl ChainObservation {
    pub fn n(&self) -> usize {
        self.norms.len()
    }

    /// `‖a₁ ⋯ a_n‖_m / (Cⁿ Σ_{k ≤ p})`.
    pub fn ratio(&self, m: usize, c: f64, p: usize) -> f64 {
        let s = c.powi(self.n() as i32) * chain_sum(&self.norms, p, false);
        if s == 0.0 {
            if self.lhs[m] == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.lhs[m] / s
        }
    }
}

/// Search caps for the constants of the chain inequality.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitCaps {
    pub c_max: f64,
    pub d_max: f64,
    /// `p_m` ranges over `[m, m + p_slack]`.
    pub p_slack: usize,
}

impl Default for FitCaps {
    fn default() -> Self {
        FitCaps { c_max: 64.0, d_max: 1e6, p_slack: 8 }
    }
}

/// Relative slack when replaying a fitted bound; absorbs rounding only.
pub const REPLAY_SLACK: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub c: f64,
    pub d: Vec<f64>,
    pub p: Vec<usize>,
}

/// Observation whose ratio exceeds the cap on `D` at the most generous
/// constants `(c_max, m + p_slack)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub m: usize,
    pub index: usize,
    pub n: usize,
    pub lhs: f64,
    pub rhs: f64,
}

/// Smallest `D ≥ 1` with `lhs ≤ D Cⁿ Σ_{k ≤ p}` on every observation;
/// ratios within [`REPLAY_SLACK`] of 1 count as 1.
pub fn fitted_d(obs: &[ChainObservation], m: usize, c: f64, p: usize) -> f64 {
    let d = obs.iter().map(|o| o.ratio(m, c, p)).fold(1.0, f64::max);
    if d <= 1.0 + REPLAY_SLACK {
        1.0
    } else {
        d
    }
}

fn fit_at(obs: &[ChainObservation], m_max: usize, c: f64, caps: &FitCaps) -> Option<(Vec<f64>, Vec<usize>)> {
    let mut ds = Vec::new();
    let mut ps = Vec::new();
    for m in 0..=m_max {
        let (p, d) = (m..=m + caps.p_slack)
            .map(|p| (p, fitted_d(obs, m, c, p)))
            .find(|(_, d)| *d <= caps.d_max)?;
        ds.push(d);
        ps.push(p);
    }
    Some((ds, ps))
}

/// Grid of `C` values `2^{j/4}` from 1 to `c_max`.
fn c_grid(c_max: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut j = 0;
    loop {
        let c = 2f64.powf(j as f64 / 4.0);
        if c > c_max * (1.0 + 1e-12) {
            break;
        }
        out.push(c);
        j += 1;
    }
    out
}

/// Fits `(C, D_m, p_m)` to the observations: the least `C` on the grid,
/// refined by bisection, for which every `m` admits some `p_m ≤ m + p_slack`
/// with `D_m ≤ d_max`; for that `C` each `p_m` is the least such `p` and
/// `D_m` the least covering value. Returns the witnesses when no constants
/// fit.
pub fn fit_chain(obs: &[ChainObservation], m_max: usize, caps: &FitCaps) -> (Option<Constants>, Vec<Witness>) {
    let grid = c_grid(caps.c_max);
    let mut lo = None;
    for &c in &grid {
        if let Some((d, p)) = fit_at(obs, m_max, c, caps) {
            let mut best = (c, d, p);
            if let Some(lo) = lo {
                let (mut a, mut b) = (lo, c);
                for _ in 0..30 {
                    let mid = 0.5 * (a + b);
                    match fit_at(obs, m_max, mid, caps) {
                        Some((d, p)) => {
                            best = (mid, d, p);
                            b = mid;
                        }
                        None => a = mid,
                    }
                }
            }
            return (Some(Constants { c: best.0, d: best.1, p: best.2 }), Vec::new());
        }
        lo = Some(c);
    }
    let mut witnesses = Vec::new();
    for m in 0..=m_max {
        let p = m + caps.p_slack;
        for (index, o) in obs.iter().enumerate() {
            let rhs = caps.d_max * caps.c_max.powi(o.n() as i32) * chain_sum(&o.norms, p, false);
            if o.lhs[m] > rhs {
                witnesses.push(Witness { m, index, n: o.n(), lhs: o.lhs[m], rhs });
            }
        }
    }
    (None, witnesses)
}

/// Whether `lhs ≤ D_m Cⁿ Σ_{k ≤ p_m}` holds on every observation.
pub fn covers(obs: &[ChainObservation], constants: &Constants) -> bool {
    obs.iter().all(|o| {
        constants.d.iter().zip(&constants.p).enumerate().all(|(m, (&d, &p))| {
            let rhs = d * constants.c.powi(o.n() as i32) * chain_sum(&o.norms, p, false);
            o.lhs[m] <= rhs * (1.0 + REPLAY_SLACK)
        })
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleDescription {
    pub count: usize,
    pub n_max: usize,
    pub m_max: usize,
    pub support_min: usize,
    pub support_max: usize,
    pub seed: u64,
    pub stream: String,
}

/// Outcome of fitting a chain inequality to sampled instances.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub inequality: String,
    pub sample: SampleDescription,
    pub caps: FitCaps,
    pub constants: Option<Constants>,
    pub witnesses: Vec<Witness>,
    pub pass: bool,
    pub observations: Vec<ChainObservation>,
}

impl FitReport {
    pub fn from_observations(
        inequality: &str,
        sample: SampleDescription,
        caps: FitCaps,
        observations: Vec<ChainObservation>,
    ) -> Self {
        let (constants, witnesses) = fit_chain(&observations, sample.m_max, &caps);
        FitReport {
            inequality: inequality.into(),
            sample,
            caps,
            pass: constants.is_some(),
            constants,
            witnesses,
            observations,
        }
    }

    /// Re-derives the verdict from the stored observations: a pass must be
    /// covered by its constants, a fail must be reproduced by its witnesses.
    pub fn replay(&self) -> bool {
        match &self.constants {
            Some(c) => self.pass && covers(&self.observations, c),
            None => {
                !self.pass
                    && !self.witnesses.is_empty()
                    && self.witnesses.iter().all(|w| {
                        let o = &self.observations[w.index];
                        let p = w.m + self.caps.p_slack;
                        let rhs = self.caps.d_max
                            * self.caps.c_max.powi(o.n() as i32)
                            * chain_sum(&o.norms, p, false);
                        o.lhs[w.m] > rhs && rhs == w.rhs
                    })
            }
        }
    }

    pub fn covers(&self, constants: &Constants) -> bool {
        covers(&self.observations, constants)
    }
}
