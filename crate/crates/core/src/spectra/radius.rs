use serde::{Deserialize, Serialize};

use crate::crossed::{exact_root, CrossedElement, ExactElement};
use crate::error::{Error, Result};

/// Which powers `φⁿ` to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Schedule {
    /// Every `n = 1..=n_max`, by repeated multiplication.
    All,
    /// `n = 1, 2, 4, …, ≤ n_max`, by repeated squaring.
    Doubling,
}

/// Power sequence `‖φⁿ‖^{1/n}` for one weighted norm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    /// The norm `‖·‖_{d,m}` used.
    pub d: u32,
    pub m: usize,
    pub sequence: Vec<(u64, f64)>,
    /// `min_n ‖φⁿ‖^{1/n}`, an upper bound for the spectral radius.
    pub estimate: f64,
    pub last: f64,
    /// Whether the recorded sequence never increases.
    pub nonincreasing: bool,
    /// False when the support budget stopped the computation.
    pub complete: bool,
    /// Exact integer `n`-th roots, in integer mode (`None` where the norm
    /// is not a perfect power).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_roots: Option<Vec<Option<u64>>>,
}

fn summarize(d: u32, m: usize, sequence: Vec<(u64, f64)>, complete: bool) -> SpectralReport {
    let estimate = sequence.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let last = sequence.last().map(|p| p.1).unwrap_or(f64::NAN);
    let nonincreasing = sequence.windows(2).all(|w| w[1].1 <= w[0].1);
    SpectralReport { d, m, sequence, estimate, last, nonincreasing, complete, exact_roots: None }
}

fn check_args(n_max: u64) -> Result<()> {
    if n_max < 2 {
        return Err(Error::Domain(format!("n_max = {n_max} must be at least 2")));
    }
    Ok(())
}

/// Records `‖φⁿ‖_{d,m}^{1/n}` for the scheduled `n`. A support-budget
/// overrun ends the sequence early and marks the report incomplete.
pub fn spectral_radius(
    phi: &CrossedElement,
    d: u32,
    m: usize,
    n_max: u64,
    schedule: Schedule,
) -> Result<SpectralReport> {
    check_args(n_max)?;
    if phi.is_zero() {
        return Err(Error::Domain("spectral radius of the zero element".into()));
    }
    let mut seq = Vec::new();
    let mut complete = true;
    let mut power = phi.clone();
    let mut n = 1u64;
    loop {
        let v = power.weighted_norm(d, m)?;
        seq.push((n, v.powf(1.0 / n as f64)));
        let next = match schedule {
            Schedule::All => n + 1,
            Schedule::Doubling => 2 * n,
        };
        if next > n_max {
            break;
        }
        let step = match schedule {
            Schedule::All => power.convolve(phi),
            Schedule::Doubling => power.convolve(&power),
        };
        match step {
            Ok(p) => power = p,
            Err(Error::SupportBudget { .. }) => {
                complete = false;
                break;
            }
            Err(e) => return Err(e),
        }
        n = next;
    }
    Ok(summarize(d, m, seq, complete))
}

/// Integer-mode variant; norms are exact and each `n`-th root is checked
/// for being an integer.
pub fn spectral_radius_exact(
    phi: &ExactElement,
    d: u32,
    n_max: u64,
    schedule: Schedule,
) -> Result<SpectralReport> {
    check_args(n_max)?;
    let mut seq = Vec::new();
    let mut roots = Vec::new();
    let mut power = phi.clone();
    let mut n = 1u64;
    loop {
        let v = power.weighted_norm(d)?;
        seq.push((n, (v as f64).powf(1.0 / n as f64)));
        roots.push(exact_root(v, n as u32).and_then(|r| u64::try_from(r).ok()));
        let next = match schedule {
            Schedule::All => n + 1,
            Schedule::Doubling => 2 * n,
        };
        if next > n_max {
            break;
        }
        power = match schedule {
            Schedule::All => power.convolve(phi)?,
            Schedule::Doubling => power.convolve(&power)?,
        };
        n = next;
    }
    let mut report = summarize(d, 0, seq, true);
    // exact roots are exact values: use them where the float root is off by rounding
    for ((_, v), r) in report.sequence.iter_mut().zip(&roots) {
        if let Some(r) = r {
            *v = *r as f64;
        }
    }
    let fixed = summarize(d, 0, report.sequence, true);
    report = SpectralReport { exact_roots: Some(roots), ..fixed };
    Ok(report)
}
