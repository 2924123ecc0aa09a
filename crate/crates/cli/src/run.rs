//! One runner per subcommand. Each returns a verdict, summary lines, a JSON
//! report and an optional table for CSV output.

use std::sync::Arc;

use clap::ValueEnum;
use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use specinv::coeff::{Coeff, CoefficientAlgebra};
use specinv::crossed::{CrossedElement, CrossedProduct, ExactElement};
use specinv::groups::{ball_sizes, gauge_axioms, Element, WordGauge};
use specinv::rng::LabRng;
use specinv::smoothk::{sk_operator_norm, sk_seminorm, SmoothCompactElement, SmoothCompacts};
use specinv::spectra::{
    cstar_compression, cstar_fourier, derivation_check, neumann_inverse, pytlik_ratio, pytlik_ratio_exact,
    spectral_radius, spectral_radius_exact, split_unit, NeumannOptions, Schedule,
};
use specinv::verify::{
    check_chain_bound, check_strong_spec_inv, coeff_sampler, crossed_sampler, katznelson_demo, katznelson_refutation,
    ChainOptions, Tails, RADII,
};
use specinv::{Error, Result};

use crate::config::ExperimentConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Growth,
    Gauge,
    Specrad,
    Cstar,
    Wiener,
    Smoothk,
    Verify,
    Katznelson,
    Pytlik,
    Derivation,
    All,
}

impl Command {
    pub const EACH: [Command; 10] = [
        Command::Growth,
        Command::Gauge,
        Command::Specrad,
        Command::Cstar,
        Command::Wiener,
        Command::Smoothk,
        Command::Verify,
        Command::Katznelson,
        Command::Pytlik,
        Command::Derivation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Growth => "growth",
            Command::Gauge => "gauge",
            Command::Specrad => "specrad",
            Command::Cstar => "cstar",
            Command::Wiener => "wiener",
            Command::Smoothk => "smoothk",
            Command::Verify => "verify",
            Command::Katznelson => "katznelson",
            Command::Pytlik => "pytlik",
            Command::Derivation => "derivation",
            Command::All => "all",
        }
    }
}

/// Rows for a CSV table.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub command: Command,
    pub pass: bool,
    pub lines: Vec<String>,
    pub report: Value,
    pub table: Option<Table>,
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn num(x: f64) -> String {
    format!("{x}")
}

/// Largest Fourier grid, counted in points over all axes. Beyond it
/// `ℤ^d` uses compression instead.
const FOURIER_POINTS: usize = 1 << 24;

pub fn run(cmd: Command, cfg: &ExperimentConfig) -> Result<Vec<Outcome>> {
    if cmd == Command::All {
        return Command::EACH.iter().map(|c| run_one(*c, cfg)).collect();
    }
    Ok(vec![run_one(cmd, cfg)?])
}

pub fn run_one(cmd: Command, cfg: &ExperimentConfig) -> Result<Outcome> {
    let (pass, lines, report, table) = match cmd {
        Command::Growth => growth(cfg)?,
        Command::Gauge => gauge(cfg)?,
        Command::Specrad => specrad(cfg)?,
        Command::Cstar => cstar(cfg)?,
        Command::Wiener => wiener(cfg)?,
        Command::Smoothk => smoothk(cfg)?,
        Command::Verify => verify(cfg)?,
        Command::Katznelson => katznelson(cfg)?,
        Command::Pytlik => pytlik(cfg)?,
        Command::Derivation => derivation(cfg)?,
        Command::All => return Err(Error::Domain("`all` expands to the other subcommands".into())),
    };
    Ok(Outcome { command: cmd, pass, lines, report, table })
}

type Parts = (bool, Vec<String>, Value, Option<Table>);

fn expected_ok(cfg: &ExperimentConfig, value: f64) -> (bool, String) {
    match cfg.tolerances.expected {
        Some(e) => {
            let ok = (value - e).abs() <= cfg.tolerances.abs;
            (ok, format!("expected {e} within {}: {ok}", cfg.tolerances.abs))
        }
        None => (true, "no expected value".into()),
    }
}

fn growth(cfg: &ExperimentConfig) -> Result<Parts> {
    let group = cfg.group_or_z()?;
    let n = u32::try_from(cfg.caps.n_max).map_err(|_| Error::Domain("n_max exceeds u32".into()))?;
    let rep = ball_sizes(&group, n, cfg.caps.budget);
    if !rep.complete {
        return Err(Error::MemoryBudget { budget: cfg.caps.budget });
    }
    let (pass, range) = match (cfg.tolerances.degree, rep.degree) {
        (Some([lo, hi]), Some(d)) => ((lo..=hi).contains(&d), format!("degree range [{lo}, {hi}]")),
        (Some(_), None) => (false, "no degree fitted".into()),
        (None, _) => (true, "no degree range".into()),
    };
    let lines = vec![format!(
        "group {} |B_{n}| = {} degree {} class {:?} ({range})",
        rep.group,
        rep.sizes.last().copied().unwrap_or(0),
        rep.degree.map_or("none".into(), num),
        rep.class
    )];
    let table = Table {
        header: vec!["n", "ball_size"],
        rows: rep.sizes.iter().enumerate().map(|(i, s)| vec![i.to_string(), s.to_string()]).collect(),
    };
    Ok((pass, lines, to_value(&rep), Some(table)))
}

fn gauge(cfg: &ExperimentConfig) -> Result<Parts> {
    let group = Arc::new(cfg.group_or_z()?);
    let gauge = WordGauge::with_caps(group.clone(), cfg.caps.radius.max(1) * 2, cfg.caps.budget);
    let ball = gauge.ball(cfg.caps.radius)?;
    let rep = gauge_axioms(&gauge, &group, &ball, cfg.caps.radius, cfg.caps.pairs, cfg.seed)?;
    let mut sizes = Vec::new();
    for r in 0..=cfg.caps.radius {
        sizes.push(vec![r.to_string(), gauge.ball(r)?.len().to_string()]);
    }
    let lines = vec![format!(
        "group {} radius {} |B| = {} pairs {} exhaustive {} violation {}",
        group.name(),
        rep.radius,
        rep.ball,
        rep.pairs,
        rep.exhaustive,
        rep.violation.as_deref().unwrap_or("none")
    )];
    Ok((rep.pass, lines, to_value(&rep), Some(Table { header: vec!["radius", "ball_size"], rows: sizes })))
}

/// Integer version of `φ` when it has real integer scalar coefficients
/// under the trivial action.
fn exact_form(phi: &CrossedElement) -> Result<Option<ExactElement>> {
    let ctx = phi.context();
    if !ctx.is_scalar_trivial() {
        return Ok(None);
    }
    let mut terms = Vec::new();
    for (g, a) in phi.terms() {
        match a {
            Coeff::Scalar(z) if z.im == 0.0 && z.re.fract() == 0.0 && z.re.abs() < 2f64.powi(53) => {
                terms.push((g.clone(), z.re as i128));
            }
            _ => return Ok(None),
        }
    }
    ExactElement::new(ctx, &terms).map(Some)
}

fn specrad(cfg: &ExperimentConfig) -> Result<Parts> {
    let ctx = cfg.context()?;
    let phi = cfg.element(&ctx)?;
    let exact = if cfg.caps.m == 0 { exact_form(&phi)? } else { None };
    let rep = match &exact {
        Some(x) => spectral_radius_exact(x, cfg.caps.d, cfg.caps.n_max, Schedule::All)?,
        None => spectral_radius(&phi, cfg.caps.d, cfg.caps.m, cfg.caps.n_max, Schedule::All)?,
    };
    let (pass, note) = expected_ok(cfg, rep.estimate);
    let lines = vec![format!(
        "estimate {} last {} n_max {} d {} m {} mode {} nonincreasing {} ({note})",
        rep.estimate,
        rep.last,
        cfg.caps.n_max,
        rep.d,
        rep.m,
        if exact.is_some() { "exact" } else { "float" },
        rep.nonincreasing
    )];
    let table = Table {
        header: vec!["n", "value"],
        rows: rep.sequence.iter().map(|(n, v)| vec![n.to_string(), num(*v)]).collect(),
    };
    let mut report = to_value(&rep);
    report["mode"] = json!(if exact.is_some() { "exact" } else { "float" });
    Ok((pass && rep.complete, lines, report, Some(table)))
}

fn cstar(cfg: &ExperimentConfig) -> Result<Parts> {
    let ctx = cfg.context()?;
    let phi = cfg.element(&ctx)?;
    let fourier_fits = ctx.group().abelian_rank().is_some_and(|d| {
        u32::try_from(d).ok().and_then(|d| cfg.caps.grid.checked_pow(d)).is_some_and(|p| p <= FOURIER_POINTS)
    });
    let est = match fourier_fits {
        true => match cstar_fourier(&phi, cfg.caps.grid) {
            Err(Error::Unsupported(_)) => cstar_compression(&phi, cfg.caps.radius)?,
            other => other?,
        },
        false => cstar_compression(&phi, cfg.caps.radius)?,
    };
    let (pass, note) = expected_ok(cfg, est.value);
    let lines = vec![format!(
        "value {} error_bound {} lower_bound_only {} method {:?} ({note})",
        est.value, est.error_bound, est.lower_bound_only, est.method
    )];
    let table = Table {
        header: vec!["value", "error_bound", "lower_bound_only"],
        rows: vec![vec![num(est.value), num(est.error_bound), est.lower_bound_only.to_string()]],
    };
    Ok((pass, lines, to_value(&est), Some(table)))
}

fn wiener(cfg: &ExperimentConfig) -> Result<Parts> {
    let ctx = cfg.context()?;
    let phi = cfg.element(&ctx)?;
    let x = split_unit(&phi)?;
    let opts = NeumannOptions { tol: cfg.tolerances.neumann, d_max: cfg.caps.d.max(1), m_max: cfg.caps.m, ..NeumannOptions::default() };
    if x.lambda.norm() == 0.0 {
        let lines = vec!["unit coefficient is zero: no Neumann series, inversion not certified".to_string()];
        return Ok((false, lines, json!({ "certified": false, "reason": "zero unit coefficient" }), None));
    }
    match neumann_inverse(&x, &opts) {
        Ok((inv, cert)) => {
            let pass = cert.converged && cert.residual <= cfg.tolerances.residual;
            let lines = vec![format!(
                "terms {} residual {:e} converged {} max tail ratio {}",
                cert.terms,
                cert.residual,
                cert.converged,
                cert.tails.iter().map(|t| t.ratio).fold(0.0, f64::max)
            )];
            let table = Table {
                header: vec!["d", "m", "ratio", "converges"],
                rows: cert
                    .tails
                    .iter()
                    .map(|t| vec![t.d.to_string(), t.m.to_string(), num(t.ratio), t.converges.to_string()])
                    .collect(),
            };
            let report = json!({
                "certified": pass,
                "certificate": cert,
                "inverse": { "lambda": [inv.lambda.re, inv.lambda.im], "terms": inv.a.to_literal() },
            });
            Ok((pass, lines, report, Some(table)))
        }
        Err(Error::NoDecay { terms, last_norm }) => {
            let lines = vec![format!("no geometric decay after {terms} terms (last norm {last_norm:e}): evidence of non-invertibility")];
            Ok((false, lines, json!({ "certified": false, "terms": terms, "last_norm": last_norm }), None))
        }
        Err(e) => Err(e),
    }
}

fn random_sk(sk: &SmoothCompacts, rng: &mut LabRng, radius: i64) -> Result<SmoothCompactElement> {
    let alg = sk.algebra().clone();
    let terms = (0..rng.random_range(1..=12))
        .map(|_| {
            let rs = (rng.random_range(-radius..=radius), rng.random_range(-radius..=radius));
            (rs, alg.sample(rng, radius))
        })
        .collect();
    sk.element(terms)
}

const DEFAULT_SMOOTH: &str = "[[0, 0, [1, 0]], [0, 1, [0.5, 0]], [1, 0, [0.5, 0]]]";

fn smoothk(cfg: &ExperimentConfig) -> Result<Parts> {
    let alg = Arc::new(cfg.algebra.build()?);
    let sk = SmoothCompacts::new(alg.clone());
    let x = sk.parse_literal(cfg.smooth_element.as_deref().unwrap_or(DEFAULT_SMOOTH))?;
    let seminorms: Vec<f64> = (0..=cfg.caps.q_max as usize).map(|q| sk_seminorm(&x, q)).collect();
    let op = match sk_operator_norm(&x, 1e-10) {
        Ok((v, r)) => Some((v, r)),
        Err(Error::Unsupported(_)) => None,
        Err(e) => return Err(e),
    };

    // base constants from the coefficient algebra, then (D·2^q·Cⁿ, p+q)
    let mut bs = coeff_sampler(alg.clone(), RADII.0 as i64, Tails::Mixed);
    let base = check_strong_spec_inv(alg.as_ref(), &mut bs, &ChainOptions::new(cfg.caps.chains / 2 + 1, cfg.caps.chain_len, 0, cfg.seed, "cli.smoothk.base"))?;
    let Some(k) = base.constants.clone() else {
        let lines = vec!["no constants fit the coefficient algebra".to_string()];
        return Ok((false, lines, json!({ "seminorms": seminorms, "base": base }), None));
    };
    let (c, d, p) = (k.c, k.d[0], k.p[0]);
    let mut s = |rng: &mut LabRng| random_sk(&sk, rng, 4);
    let opts = ChainOptions::new(cfg.caps.chains / 2 + 1, cfg.caps.chain_len, cfg.caps.q_max as usize, cfg.seed, "cli.smoothk.chain");
    let chain = check_chain_bound(&sk, &mut s, &opts, "smooth-compacts", &|n, q| (d * 2f64.powi(q as i32) * c.powi(n as i32), p + q, false))?;
    let lines = vec![
        format!("seminorms {:?}", seminorms),
        format!(
            "operator norm {}",
            op.map_or("unavailable".into(), |(v, r)| format!("{v} (+{r:e})"))
        ),
        format!("chain bound with (C, D, p) = ({c}, {d}, {p}): max ratio {} pass {}", chain.max_ratio, chain.pass),
    ];
    let table = Table {
        header: vec!["q", "seminorm"],
        rows: seminorms.iter().enumerate().map(|(q, v)| vec![q.to_string(), num(*v)]).collect(),
    };
    let report = json!({
        "element": x.to_literal(),
        "seminorms": seminorms,
        "operator_norm": op.map(|(v, r)| json!({ "value": v, "residual": r })),
        "base": { "c": c, "d": d, "p": p },
        "chain": chain,
    });
    Ok((chain.pass, lines, report, Some(table)))
}

fn verify(cfg: &ExperimentConfig) -> Result<Parts> {
    let opts = ChainOptions::new(cfg.caps.chains, cfg.caps.chain_len, cfg.caps.m_max, cfg.seed, "cli.verify");
    let (target, rep) = match &cfg.group {
        None => {
            let alg: Arc<CoefficientAlgebra> = Arc::new(cfg.algebra.build()?);
            let mut s = coeff_sampler(alg.clone(), RADII.1 as i64, Tails::Mixed);
            (alg.name(), check_strong_spec_inv(alg.as_ref(), &mut s, &opts)?)
        }
        Some(_) => {
            let ctx: Arc<CrossedProduct> = cfg.context()?;
            let mut s = crossed_sampler(ctx.clone(), Tails::Mixed)?;
            (format!("{} x {}", ctx.group().name(), ctx.algebra().name()), check_strong_spec_inv(&ctx, &mut s, &opts)?)
        }
    };
    let mut lines = vec![format!("target {target} chains {} n_max {} m_max {}", opts.chains, opts.n_max, opts.m_max)];
    let mut rows = Vec::new();
    match &rep.constants {
        Some(k) => {
            lines.push(format!("C = {} D = {:?} p = {:?}", k.c, k.d, k.p));
            for m in 0..k.d.len() {
                rows.push(vec![m.to_string(), num(k.c), num(k.d[m]), k.p[m].to_string()]);
            }
        }
        None => {
            for w in &rep.witnesses {
                lines.push(format!("witness m {} chain {} n {} lhs {} > rhs {}", w.m, w.index, w.n, w.lhs, w.rhs));
            }
        }
    }
    let table = Table { header: vec!["m", "c", "d", "p"], rows };
    Ok((rep.pass, lines, to_value(&rep), Some(table)))
}

fn katznelson(cfg: &ExperimentConfig) -> Result<Parts> {
    let rows = katznelson_demo(&cfg.caps.r_values, cfg.caps.chain_len as u64, cfg.caps.grid)?;
    let opts = ChainOptions::new(cfg.caps.chains, cfg.caps.chain_len, 1, cfg.seed, "cli.katznelson");
    let refutation = katznelson_refutation(&opts, &cfg.caps.refute_r, &cfg.caps.refute_n)?;
    let bessel_err = rows.iter().map(|r| (r.l1 - r.bessel).abs()).fold(0.0, f64::max);
    let cstar_err = rows.iter().map(|r| (r.cstar - 1.0).abs()).fold(0.0, f64::max);
    let violated = refutation.rows.iter().filter(|r| r.violated).count();
    let pass = bessel_err <= cfg.tolerances.bessel && cstar_err <= cfg.tolerances.bessel && refutation.refuted;
    let lines = vec![
        format!("max |l1 - bessel| {bessel_err:e} max |cstar - 1| {cstar_err:e}"),
        format!(
            "fitted C = {} D = {:?} p = {:?}; {violated}/{} chains violate",
            refutation.constants.c,
            refutation.constants.d,
            refutation.constants.p,
            refutation.rows.len()
        ),
    ];
    let table = Table {
        header: vec!["r", "l1", "bessel", "cstar", "bound", "chain_defect"],
        rows: rows
            .iter()
            .map(|r| vec![num(r.r), num(r.l1), num(r.bessel), num(r.cstar), num(r.bound), num(r.chain_defect)])
            .collect(),
    };
    let refutation_rows = to_value(&refutation.rows);
    let report = json!({
        "rows": rows,
        "refutation": {
            "constants": refutation.constants,
            "rows": refutation_rows,
            "refuted": refutation.refuted,
            "training_pass": refutation.training.pass,
            "training_sample": refutation.training.sample,
        },
    });
    Ok((pass, lines, report, Some(table)))
}

fn pytlik(cfg: &ExperimentConfig) -> Result<Parts> {
    let ctx = cfg.context()?;
    let phi = cfg.element(&ctx)?;
    let exact = exact_form(&phi)?;
    let rep = match &exact {
        Some(x) => pytlik_ratio_exact(x, cfg.caps.n_max)?,
        None => pytlik_ratio(&phi, cfg.caps.n_max)?,
    };
    let (pass, note) = expected_ok(cfg, rep.limsup);
    let lines = vec![format!(
        "limsup {} over n <= {} mode {} ({note})",
        rep.limsup,
        cfg.caps.n_max,
        if exact.is_some() { "exact" } else { "float" }
    )];
    let table = Table {
        header: vec!["n", "ratio"],
        rows: rep.ratios.iter().map(|(n, v)| vec![n.to_string(), num(*v)]).collect(),
    };
    Ok((pass, lines, to_value(&rep), Some(table)))
}

fn derivation(cfg: &ExperimentConfig) -> Result<Parts> {
    let ctx = cfg.context()?;
    let phi = cfg.element(&ctx)?;
    let rep = derivation_check(&phi, cfg.caps.k, cfg.caps.radius)?;
    let pass = rep.max_difference <= cfg.tolerances.derivation;
    let lines = vec![format!(
        "k {} radius {} ball {} max difference {:e} commutator schur {} ceiling {}",
        rep.k,
        rep.radius,
        rep.ball.len(),
        rep.max_difference,
        rep.commutator_schur,
        rep.schur_ceiling
    )];
    // one row per (ball point, coefficient component)
    let dim = rep.operator_side.len() / rep.ball.len().max(1);
    let table = Table {
        header: vec!["g", "component", "operator_re", "operator_im", "multiplier_re", "multiplier_im"],
        rows: rep
            .operator_side
            .iter()
            .zip(&rep.multiplier_side)
            .enumerate()
            .map(|(i, (a, b))| {
                let g: &Element = &rep.ball[i / dim];
                vec![g.to_string(), (i % dim).to_string(), num(a.re), num(a.im), num(b.re), num(b.im)]
            })
            .collect(),
    };
    Ok((pass, lines, to_value(&rep), Some(table)))
}
