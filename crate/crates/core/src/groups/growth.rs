use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::group::Group;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "lowercase")]
pub enum GrowthClass {
    Polynomial { degree: f64 },
    Exponential,
    Inconclusive,
}

/// Ball volumes `|B_0|, …, |B_N|` and the fitted growth degree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub group: String,
    pub sizes: Vec<u64>,
    /// Least-squares slope of `ln|B_n|` against `ln n` over `[N/2, N]`.
    pub degree: Option<f64>,
    pub class: GrowthClass,
    /// False when the memory budget stopped the enumeration early.
    pub complete: bool,
}

impl GrowthReport {
    /// Smallest `κ` with `|B_n| ≤ κ·n^r` for all recorded `1 ≤ n`.
    pub fn volume_constant(&self, r: f64) -> f64 {
        self.sizes
            .iter()
            .enumerate()
            .skip(1)
            .map(|(n, &b)| b as f64 / (n as f64).powf(r))
            .fold(0.0, f64::max)
    }
}

/// Ratio of local log-log slopes at `N` and `N/2` above which growth is
/// classified exponential.
const EXPONENTIAL_SLOPE_RATIO: f64 = 1.6;

/// Exact ball sizes by breadth-first search over canonical forms.
pub fn ball_sizes(group: &Group, n_max: u32, memory_budget: usize) -> GrowthReport {
    let id = group.identity();
    let mut seen: HashSet<_> = HashSet::from([id.clone()]);
    let mut frontier = vec![id];
    let mut sizes = vec![1u64];
    let mut complete = true;
    'outer: for _ in 0..n_max {
        let mut next = Vec::new();
        for g in &frontier {
            for u in group.generators() {
                let h = group.multiply(g, u);
                if seen.insert(h.clone()) {
                    next.push(h);
                }
            }
            if seen.len() > memory_budget {
                complete = false;
                break 'outer;
            }
        }
        sizes.push(seen.len() as u64);
        frontier = next;
    }

    let n = sizes.len() - 1;
    let degree = fit_degree(&sizes);
    let class = if !complete || n < 4 {
        GrowthClass::Inconclusive
    } else {
        let local = |k: usize| {
            ((sizes[k] as f64) / (sizes[k - 1] as f64)).ln() / ((k as f64) / (k as f64 - 1.0)).ln()
        };
        let (hi, lo) = (local(n), local(n.div_ceil(2).max(2)));
        if lo > 0.0 && hi >= EXPONENTIAL_SLOPE_RATIO * lo {
            GrowthClass::Exponential
        } else {
            GrowthClass::Polynomial { degree: degree.unwrap_or(0.0) }
        }
    };
    GrowthReport { group: group.name(), sizes, degree, class, complete }
}

fn fit_degree(sizes: &[u64]) -> Option<f64> {
    let n = sizes.len() - 1;
    let lo = (n / 2).max(1);
    if n < lo + 1 {
        return None;
    }
    let pts: Vec<(f64, f64)> =
        (lo..=n).map(|k| ((k as f64).ln(), (sizes[k] as f64).ln())).collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
