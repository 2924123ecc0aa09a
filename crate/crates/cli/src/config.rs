//! Experiment configuration, read from TOML.

use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use specinv::coeff::{make_action, matrix_lift, scalar_algebra, scale_schwartz, schwartz_z, ActionRule, CoefficientAlgebra};
use specinv::crossed::{CrossedElement, CrossedProduct};
use specinv::groups::{make_group, Group, GroupDescriptor, DEFAULT_MEMORY_BUDGET};
use specinv::{Error, Result};

/// Element used when the config names none: `δ₁ + δ₋₁` on `ℤ`.
pub const DEFAULT_ELEMENT: &str = "[[[1], [1, 0]], [[-1], [1, 0]]]";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_experiment")]
    pub experiment: String,
    #[serde(default)]
    pub seed: u64,
    /// Absent means `ℤ` for group-level experiments and "coefficients only"
    /// for `verify`.
    #[serde(default)]
    pub group: Option<GroupSpec>,
    #[serde(default)]
    pub algebra: AlgebraSpec,
    #[serde(default = "default_action")]
    pub action: ActionRule,
    /// JSON element literal `[[g, coefficient], …]`.
    #[serde(default)]
    pub element: Option<String>,
    /// JSON smooth-compact literal `[[r, s, coefficient], …]`.
    #[serde(default)]
    pub smooth_element: Option<String>,
    #[serde(default)]
    pub caps: Caps,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: Output,
}

fn default_experiment() -> String {
    "experiment".into()
}

fn default_action() -> ActionRule {
    ActionRule::Trivial
}

/// A descriptor token such as `"Z^2"`, or a table form such as
/// `{ finite-table = [[0, 1], [1, 0]] }`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupSpec {
    Token(String),
    Descriptor(GroupDescriptor),
}

impl GroupSpec {
    pub fn descriptor(&self) -> Result<GroupDescriptor> {
        match self {
            GroupSpec::Token(s) => GroupDescriptor::from_str(s),
            GroupSpec::Descriptor(d) => Ok(d.clone()),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum AlgebraSpec {
    #[default]
    Scalar,
    #[serde(alias = "schwartz_z", alias = "schwartz_Z")]
    SchwartzZ {
        #[serde(default = "default_window")]
        window: i64,
    },
    ScaleSchwartz {
        scale: Vec<f64>,
    },
    Matrix {
        dim: usize,
        #[serde(default)]
        base: Option<Box<AlgebraSpec>>,
    },
}

fn default_window() -> i64 {
    16
}

impl AlgebraSpec {
    pub fn build(&self) -> Result<CoefficientAlgebra> {
        match self {
            AlgebraSpec::Scalar => Ok(scalar_algebra()),
            AlgebraSpec::SchwartzZ { window } => schwartz_z(*window),
            AlgebraSpec::ScaleSchwartz { scale } => scale_schwartz(scale.clone()),
            AlgebraSpec::Matrix { dim, base } => {
                let base = match base {
                    Some(b) => b.build()?,
                    None => scalar_algebra(),
                };
                matrix_lift(base, *dim)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Caps {
    /// Largest power, ball radius for growth, or ratio index.
    pub n_max: u64,
    /// Ball radius for gauges, compressions and derivations.
    pub radius: u32,
    /// Fourier grid size.
    pub grid: usize,
    /// Memory budget for ball enumeration, in elements.
    pub budget: usize,
    /// Weight exponent `d` and coefficient seminorm index `m`.
    pub d: u32,
    pub m: usize,
    /// Highest seminorm index in fitted towers.
    pub m_max: usize,
    pub chains: usize,
    pub chain_len: usize,
    pub q_max: u32,
    /// Gauge power for derivation checks.
    pub k: u32,
    /// Subadditivity pairs checked by `gauge`.
    pub pairs: usize,
    pub r_values: Vec<f64>,
    pub refute_r: Vec<u32>,
    pub refute_n: Vec<usize>,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            n_max: 64,
            radius: 8,
            grid: 1 << 16,
            budget: DEFAULT_MEMORY_BUDGET,
            d: 0,
            m: 0,
            m_max: 4,
            chains: 200,
            chain_len: 6,
            q_max: 4,
            k: 2,
            pairs: 100_000,
            r_values: (0..=10).map(f64::from).collect(),
            refute_r: vec![6, 8],
            refute_n: vec![2, 3, 4, 5, 6, 7],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// When set, `specrad`, `cstar` and `pytlik` compare their estimate to
    /// this value.
    pub expected: Option<f64>,
    pub abs: f64,
    /// Accepted growth degree interval.
    pub degree: Option<[f64; 2]>,
    pub neumann: f64,
    pub residual: f64,
    pub derivation: f64,
    pub bessel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            expected: None,
            abs: 1e-6,
            degree: None,
            neumann: 1e-12,
            residual: 1e-10,
            derivation: 1e-12,
            bessel: 1e-8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Output {
    pub dir: PathBuf,
}

impl Default for Output {
    fn default() -> Self {
        Output { dir: PathBuf::from("specinv-out") }
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Parse(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let c = &self.caps;
        let positive = [
            ("n_max", c.n_max as usize),
            ("radius", c.radius as usize),
            ("grid", c.grid),
            ("budget", c.budget),
            ("chains", c.chains),
            ("chain_len", c.chain_len),
            ("pairs", c.pairs),
        ];
        if let Some((name, _)) = positive.iter().find(|(_, v)| *v == 0) {
            return Err(Error::Parse(format!("caps.{name} must be positive")));
        }
        if c.refute_r.iter().any(|r| !(1..=12).contains(r)) {
            return Err(Error::Parse("caps.refute_r entries must lie in 1..=12".into()));
        }
        let t = &self.tolerances;
        for (name, v) in [("abs", t.abs), ("neumann", t.neumann), ("residual", t.residual), ("derivation", t.derivation), ("bessel", t.bessel)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Parse(format!("tolerances.{name} must be positive")));
            }
        }
        if let Some(g) = &self.group {
            g.descriptor()?;
        }
        Ok(())
    }

    /// The configured group, `ℤ` when absent.
    pub fn group_or_z(&self) -> Result<Group> {
        let desc = match &self.group {
            Some(g) => g.descriptor()?,
            None => GroupDescriptor::FreeAbelian(1),
        };
        make_group(&desc)
    }

    pub fn context(&self) -> Result<Arc<CrossedProduct>> {
        let group = Arc::new(self.group_or_z()?);
        let alg = Arc::new(self.algebra.build()?);
        Ok(CrossedProduct::new(make_action(group, alg, self.action.clone())?))
    }

    pub fn element(&self, ctx: &Arc<CrossedProduct>) -> Result<CrossedElement> {
        CrossedElement::from_literal(ctx, self.element.as_deref().unwrap_or(DEFAULT_ELEMENT))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_takes_defaults() {
        let cfg = ExperimentConfig::parse("").unwrap();
        assert_eq!(cfg.caps.n_max, 64);
        assert_eq!(cfg.algebra, AlgebraSpec::Scalar);
        assert_eq!(cfg.action, ActionRule::Trivial);
    }

    #[test]
    fn group_forms() {
        let a = ExperimentConfig::parse("group = \"heisenberg\"").unwrap();
        assert_eq!(a.group.unwrap().descriptor().unwrap(), GroupDescriptor::Heisenberg);
        let b = ExperimentConfig::parse("group = { finite-table = [[0, 1], [1, 0]] }").unwrap();
        assert_eq!(b.group.unwrap().descriptor().unwrap(), GroupDescriptor::FiniteTable(vec![vec![0, 1], vec![1, 0]]));
    }

    #[test]
    fn algebra_and_action_tables() {
        let text = "[algebra]\nkind = \"schwartz_z\"\nwindow = 12\n[action]\nrule = \"translation\"\n";
        let cfg = ExperimentConfig::parse(text).unwrap();
        assert_eq!(cfg.algebra, AlgebraSpec::SchwartzZ { window: 12 });
        assert_eq!(cfg.action, ActionRule::Translation);
        let m = ExperimentConfig::parse("[algebra]\nkind = \"matrix\"\ndim = 2\nbase = { kind = \"schwartz-z\" }\n").unwrap();
        assert!(m.algebra.build().is_ok());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(ExperimentConfig::parse("bogus = 1").is_err());
        assert!(ExperimentConfig::parse("[caps]\nn_max = 0").is_err());
        assert!(ExperimentConfig::parse("group = \"Q\"").is_err());
        assert!(ExperimentConfig::parse("[tolerances]\nabs = -1.0").is_err());
        assert!(ExperimentConfig::parse("seed = \"x\"").is_err());
    }
}
