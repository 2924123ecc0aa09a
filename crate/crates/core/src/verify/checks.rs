use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::coeff::{fit_tempered, tempered_constant, GroupAction, TemperedFit};
use crate::error::{Error, Result};
use crate::groups::WordGauge;
use crate::rng::{stream, LabRng};
use crate::tower::TowerAlgebra;

use super::fit::{chain_sum, ChainObservation, FitCaps, FitReport, SampleDescription, Witness};

/// Draws one nonzero element.
pub type Sampler<'a, E> = dyn FnMut(&mut LabRng) -> Result<E> + 'a;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainOptions {
    pub chains: usize,
    pub n_max: usize,
    pub m_max: usize,
    pub seed: u64,
    pub stream: String,
    pub caps: FitCaps,
}

impl ChainOptions {
    pub fn new(chains: usize, n_max: usize, m_max: usize, seed: u64, stream: &str) -> Self {
        ChainOptions { chains, n_max, m_max, seed, stream: stream.into(), caps: FitCaps::default() }
    }

    fn p_max(&self) -> usize {
        self.m_max + self.caps.p_slack
    }
}

/// Samples `opts.chains` chains, the `i`-th of length `1 + i mod n_max`,
/// keeping those accepted by `keep`, and records product seminorms up to
/// `m_max` and factor seminorms up to `p_max`.
fn collect<A: TowerAlgebra>(
    alg: &A,
    sampler: &mut Sampler<'_, A::Elem>,
    opts: &ChainOptions,
    p_max: usize,
    keep: &mut dyn FnMut(&A::Elem) -> bool,
) -> Result<(Vec<ChainObservation>, SampleDescription)> {
    if opts.n_max == 0 || opts.chains == 0 {
        return Err(Error::Domain("chain sampling needs n_max >= 1 and a positive count".into()));
    }
    let mut rng = stream(opts.seed, &opts.stream);
    let mut obs = Vec::with_capacity(opts.chains);
    let (mut smin, mut smax) = (usize::MAX, 0);
    for i in 0..opts.chains {
        let n = 1 + i % opts.n_max;
        let mut chain = Vec::with_capacity(n);
        let mut attempts = 0;
        while chain.len() < n {
            attempts += 1;
            if attempts > 1000 * n {
                return Err(Error::Domain("sampler produced no admissible element in 1000 draws".into()));
            }
            let a = sampler(&mut rng)?;
            if keep(&a) {
                let s = alg.support_size(&a);
                smin = smin.min(s);
                smax = smax.max(s);
                chain.push(a);
            }
        }
        obs.push(observe(alg, &chain, opts.m_max, p_max)?);
    }
    let sample = SampleDescription {
        count: opts.chains,
        n_max: opts.n_max,
        m_max: opts.m_max,
        support_min: smin,
        support_max: smax,
        seed: opts.seed,
        stream: opts.stream.clone(),
    };
    Ok((obs, sample))
}

/// Seminorms of one chain and of its product.
pub fn observe<A: TowerAlgebra>(
    alg: &A,
    chain: &[A::Elem],
    m_max: usize,
    p_max: usize,
) -> Result<ChainObservation> {
    let prod = alg.chain_product(chain)?;
    let lhs = (0..=m_max).map(|m| alg.seminorm(&prod, m)).collect::<Result<_>>()?;
    let norms = chain
        .iter()
        .map(|a| (0..=p_max).map(|k| alg.seminorm(a, k)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    Ok(ChainObservation { lhs, norms })
}

/// Fits the strong spectral invariance constants `(C, D_m, p_m)` to sampled
/// chains.
pub fn check_strong_spec_inv<A: TowerAlgebra>(
    alg: &A,
    sampler: &mut Sampler<'_, A::Elem>,
    opts: &ChainOptions,
) -> Result<FitReport> {
    let (obs, sample) = collect(alg, sampler, opts, opts.p_max(), &mut |_| true)?;
    Ok(FitReport::from_observations("strong-spectral-invariance", sample, opts.caps, obs))
}

/// Outcome of a bound with a fixed or single fitted constant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub inequality: String,
    pub sample: SampleDescription,
    /// Fitted constant; 1 for bounds whose constants are given.
    pub constant: f64,
    /// Largest observed `lhs / rhs` at unit constant.
    pub max_ratio: f64,
    pub pass: bool,
    pub witnesses: Vec<Witness>,
}

/// Relative slack for bounds with given constants; absorbs rounding only.
pub const BOUND_SLACK: f64 = 1e-9;

/// Blackadar–Cuntz condition `‖ab‖_m ≤ C Σ_{i+j=m} ‖a‖_i ‖b‖_j`: fits the
/// least `C ≥ 1` over sampled pairs; passes when `C ≤ c_max`.
pub fn check_bc_condition<A: TowerAlgebra>(
    alg: &A,
    sampler: &mut Sampler<'_, A::Elem>,
    pairs: usize,
    m_max: usize,
    seed: u64,
    caps: &FitCaps,
) -> Result<BoundReport> {
    let opts = ChainOptions { caps: *caps, ..ChainOptions::new(pairs, 1, m_max, seed, "verify.bc") };
    let mut rng = stream(seed, "verify.bc");
    let mut obs = Vec::with_capacity(pairs);
    let (mut smin, mut smax) = (usize::MAX, 0);
    for _ in 0..pairs {
        let pair = [sampler(&mut rng)?, sampler(&mut rng)?];
        for a in &pair {
            smin = smin.min(alg.support_size(a));
            smax = smax.max(alg.support_size(a));
        }
        obs.push(observe(alg, &pair, m_max, m_max)?);
    }
    let mut max_ratio: f64 = 0.0;
    let mut worst = Vec::new();
    for (index, o) in obs.iter().enumerate() {
        for m in 0..=m_max {
            let rhs = chain_sum(&o.norms, m, true);
            let ratio = if rhs > 0.0 { o.lhs[m] / rhs } else if o.lhs[m] > 0.0 { f64::INFINITY } else { 0.0 };
            if ratio > caps.c_max {
                worst.push(Witness { m, index, n: 2, lhs: o.lhs[m], rhs });
            }
            max_ratio = max_ratio.max(ratio);
        }
    }
    let constant = if max_ratio <= 1.0 + BOUND_SLACK { 1.0 } else { max_ratio };
    let sample = SampleDescription {
        count: pairs,
        n_max: 2,
        m_max,
        support_min: smin,
        support_max: smax,
        seed,
        stream: opts.stream,
    };
    Ok(BoundReport {
        inequality: "blackadar-cuntz".into(),
        sample,
        constant,
        max_ratio,
        pass: constant <= caps.c_max,
        witnesses: worst,
    })
}

/// Checks `lhs ≤ factor(n, m) Σ_{k ≤ p(n, m)}` (or `= p` when `exact`) on
/// sampled chains, with `bound(n, m) = (factor, p, exact)`.
pub fn check_chain_bound<A: TowerAlgebra>(
    alg: &A,
    sampler: &mut Sampler<'_, A::Elem>,
    opts: &ChainOptions,
    inequality: &str,
    bound: &dyn Fn(usize, usize) -> (f64, usize, bool),
) -> Result<BoundReport> {
    let mut p_max = 0;
    for n in 1..=opts.n_max {
        for m in 0..=opts.m_max {
            p_max = p_max.max(bound(n, m).1);
        }
    }
    let (obs, sample) = collect(alg, sampler, opts, p_max, &mut |_| true)?;
    let mut max_ratio: f64 = 0.0;
    let mut witnesses = Vec::new();
    for (index, o) in obs.iter().enumerate() {
        for m in 0..=opts.m_max {
            let (factor, p, exact) = bound(o.n(), m);
            let rhs = factor * chain_sum(&o.norms, p, exact);
            let ratio = if rhs > 0.0 { o.lhs[m] / rhs } else if o.lhs[m] > 0.0 { f64::INFINITY } else { 0.0 };
            if ratio > 1.0 + BOUND_SLACK {
                witnesses.push(Witness { m, index, n: o.n(), lhs: o.lhs[m], rhs });
            }
            max_ratio = max_ratio.max(ratio);
        }
    }
    Ok(BoundReport {
        inequality: inequality.into(),
        sample,
        constant: 1.0,
        max_ratio,
        pass: witnesses.is_empty(),
        witnesses,
    })
}

/// The chain consequence of the Blackadar–Cuntz condition,
/// `‖a₁⋯a_n‖_m ≤ C^{n−1} Σ_{k₁+…+k_n = m}`.
pub fn check_bc_implies_chain<A: TowerAlgebra>(
    alg: &A,
    sampler: &mut Sampler<'_, A::Elem>,
    c: f64,
    opts: &ChainOptions,
) -> Result<BoundReport> {
    check_chain_bound(alg, sampler, opts, "blackadar-cuntz-chain", &|n, m| {
        (c.powi(n as i32 - 1), m, true)
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SumPowerReport {
    pub checked: usize,
    /// Largest `(Σa_i)^r / (2^{rn} Σ a_i^r)`.
    pub max_ratio: f64,
    /// `(r, n, tuple index)` of the first violation.
    pub violation: Option<(u32, usize, usize)>,
    pub pass: bool,
}

/// `(a₁+…+a_n)^r ≤ 2^{rn}(a₁^r+…+a_n^r)` on every prefix of length
/// `n ≤ n_max` of each tuple, for `r ≤ r_max`.
pub fn check_sum_power(r_max: u32, n_max: usize, samples: &[Vec<f64>]) -> Result<SumPowerReport> {
    let mut checked = 0;
    let mut max_ratio: f64 = 0.0;
    let mut violation = None;
    for (idx, t) in samples.iter().enumerate() {
        if let Some(bad) = t.iter().find(|x| !(**x >= 0.0) || !x.is_finite()) {
            return Err(Error::Domain(format!("sum-power sample {idx} has entry {bad}")));
        }
        for n in 1..=n_max.min(t.len()) {
            let a = &t[..n];
            let s: f64 = a.iter().sum();
            for r in 0..=r_max {
                let lhs = s.powi(r as i32);
                let rhs = 2f64.powi((r as usize * n) as i32) * a.iter().map(|x| x.powi(r as i32)).sum::<f64>();
                checked += 1;
                if rhs > 0.0 {
                    max_ratio = max_ratio.max(lhs / rhs);
                }
                if lhs > rhs * (1.0 + BOUND_SLACK) && violation.is_none() {
                    violation = Some((r, n, idx));
                }
            }
        }
    }
    Ok(SumPowerReport { checked, max_ratio, pass: violation.is_none(), violation })
}

/// Nonnegative tuples with exponential entries, a fraction of them zero.
pub fn random_tuples(count: usize, len: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = stream(seed, "verify.sum_power");
    (0..count)
        .map(|_| {
            (0..len)
                .map(|_| {
                    if rng.random_bool(0.1) {
                        0.0
                    } else {
                        -rng.random::<f64>().max(1e-300).ln() * 10f64.powi(rng.random_range(-3..=3))
                    }
                })
                .collect()
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RestrictionReport {
    pub fit: FitReport,
    /// Whether the ambient constants cover every restricted chain.
    pub ambient_covers: bool,
    pub pass: bool,
}

/// Re-runs the chain fit on samples accepted by `predicate`, which must be
/// closed under the products formed. The ambient constants must still
/// cover the restricted chains.
pub fn check_restriction<A: TowerAlgebra>(
    alg: &A,
    sampler: &mut Sampler<'_, A::Elem>,
    predicate: &dyn Fn(&A::Elem) -> bool,
    ambient: &FitReport,
    opts: &ChainOptions,
) -> Result<RestrictionReport> {
    let mut rng = stream(opts.seed, &format!("{}.closure", opts.stream));
    for trial in 0..opts.chains.min(64) {
        let (a, b) = loop {
            let a = sampler(&mut rng)?;
            let b = sampler(&mut rng)?;
            if predicate(&a) && predicate(&b) {
                break (a, b);
            }
        };
        if !predicate(&alg.mul(&a, &b)?) {
            return Err(Error::Domain(format!("predicate is not closed under products (trial {trial})")));
        }
    }
    let (obs, sample) = collect(alg, sampler, opts, opts.p_max(), &mut |a| predicate(a))?;
    let fit = FitReport::from_observations("strong-spectral-invariance/restricted", sample, opts.caps, obs);
    let ambient_covers = match &ambient.constants {
        Some(c) if c.d.len() > opts.m_max => fit.covers(&super::fit::Constants {
            c: c.c,
            d: c.d[..=opts.m_max].to_vec(),
            p: c.p[..=opts.m_max].to_vec(),
        }),
        _ => false,
    };
    Ok(RestrictionReport { pass: fit.pass && ambient_covers, fit, ambient_covers })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TemperedReport {
    pub fits: Vec<TemperedFit>,
    /// For each `m` with a positive fitted degree `d`: the rejected fit at
    /// `d − 1` with its maximizing witness.
    pub rejected_below: Vec<TemperedFit>,
    pub pass: bool,
}

/// Fits `‖α_g(a)‖_m ≤ C(1+τ(g))^d ‖a‖_m` on `B_radius` and the action's
/// default coefficient samples.
pub fn check_tempered(action: &GroupAction, radius: u32, m_max: usize, d_max: u32) -> Result<TemperedReport> {
    let gauge = WordGauge::new(action.group().clone());
    let ball = gauge.ball(radius)?;
    let samples = action.default_samples();
    let fits = fit_tempered(action, &gauge, &ball, &samples, m_max, d_max)?;
    let mut rejected_below = Vec::new();
    for f in &fits {
        if let Some(d) = f.degree.filter(|d| *d > 0) {
            let (constant, witness) = tempered_constant(action, &gauge, &ball, &samples, f.m, f.k, d - 1)?;
            rejected_below.push(TemperedFit { m: f.m, k: f.k, degree: None, constant, witness });
        }
    }
    let pass = fits.iter().all(|f| f.degree.is_some());
    Ok(TemperedReport { fits, rejected_below, pass })
}
