use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Value of a coefficient algebra.
///
/// Function algebras store sparse maps without zero entries; matrices are
/// row-major with entries in the base algebra.
#[derive(Clone, Debug, PartialEq)]
pub enum Coeff {
    Scalar(Complex64),
    Func(BTreeMap<i64, Complex64>),
    Matrix(Vec<Coeff>),
}

/// A normed *-algebra `B` together with the increasing seminorm tower
/// `‖·‖_m` that defines its dense subalgebra `A`.
#[derive(Clone, Debug, PartialEq)]
pub enum CoefficientAlgebra {
    /// `ℂ` with `‖λ‖_m = |λ|`.
    Scalar,
    /// Finitely supported sequences on `ℤ` under pointwise multiplication with
    /// `‖f‖_m = sup (1+|n|)^m |f(n)|`. `window` bounds the support of
    /// constructed and sampled elements.
    SchwartzZ { window: i64 },
    /// Functions on `{0, …, len-1}` with `‖f‖_d = sup (1+σ(i))^d |f(i)|`.
    ScaleSchwartz { scale: Vec<f64> },
    /// `l × l` matrices over `base` with the entrywise-max tower.
    Matrix { dim: usize, base: Box<CoefficientAlgebra> },
}

pub fn scalar_algebra() -> CoefficientAlgebra {
    CoefficientAlgebra::Scalar
}

pub fn schwartz_z(window: i64) -> Result<CoefficientAlgebra> {
    if window < 1 {
        return Err(Error::Domain(format!("truncation radius {window} must be >= 1")));
    }
    Ok(CoefficientAlgebra::SchwartzZ { window })
}

pub fn scale_schwartz(scale: Vec<f64>) -> Result<CoefficientAlgebra> {
    if scale.is_empty() {
        return Err(Error::Domain("empty index set".into()));
    }
    if let Some(bad) = scale.iter().find(|s| !(**s >= 0.0) || !s.is_finite()) {
        return Err(Error::Domain(format!("scale value {bad} is negative or not finite")));
    }
    Ok(CoefficientAlgebra::ScaleSchwartz { scale })
}

pub fn matrix_algebra(dim: usize) -> Result<CoefficientAlgebra> {
    matrix_lift(CoefficientAlgebra::Scalar, dim)
}

/// `M_l(A)` with `‖[a]‖′_m = max_ij ‖a_ij‖_m`. The zeroth seminorm is the
/// max-entry norm, equivalent to but not equal to an operator norm.
pub fn matrix_lift(base: CoefficientAlgebra, dim: usize) -> Result<CoefficientAlgebra> {
    if dim == 0 {
        return Err(Error::Domain("matrix dimension must be >= 1".into()));
    }
    Ok(CoefficientAlgebra::Matrix { dim, base: Box::new(base) })
}

fn prune(mut f: BTreeMap<i64, Complex64>) -> BTreeMap<i64, Complex64> {
    f.retain(|_, v| *v != Complex64::new(0.0, 0.0));
    f
}

fn sample_complex(rng: &mut impl Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

impl CoefficientAlgebra {
    pub fn name(&self) -> String {
        match self {
            CoefficientAlgebra::Scalar => "scalar".into(),
            CoefficientAlgebra::SchwartzZ { window } => format!("schwartz_z({window})"),
            CoefficientAlgebra::ScaleSchwartz { scale } => format!("scale_schwartz({})", scale.len()),
            CoefficientAlgebra::Matrix { dim, base } => format!("M_{dim}({})", base.name()),
        }
    }

    pub fn zero(&self) -> Coeff {
        match self {
            CoefficientAlgebra::Scalar => Coeff::Scalar(Complex64::new(0.0, 0.0)),
            CoefficientAlgebra::SchwartzZ { .. } | CoefficientAlgebra::ScaleSchwartz { .. } => {
                Coeff::Func(BTreeMap::new())
            }
            CoefficientAlgebra::Matrix { dim, base } => Coeff::Matrix(vec![base.zero(); dim * dim]),
        }
    }

    /// Unit element, when the algebra is unital.
    pub fn one(&self) -> Option<Coeff> {
        match self {
            CoefficientAlgebra::Scalar => Some(Coeff::Scalar(Complex64::new(1.0, 0.0))),
            CoefficientAlgebra::SchwartzZ { .. } => None,
            CoefficientAlgebra::ScaleSchwartz { scale } => Some(Coeff::Func(
                (0..scale.len() as i64).map(|i| (i, Complex64::new(1.0, 0.0))).collect(),
            )),
            CoefficientAlgebra::Matrix { dim, base } => {
                let one = base.one()?;
                let mut m = vec![base.zero(); dim * dim];
                for i in 0..*dim {
                    m[i * dim + i] = one.clone();
                }
                Some(Coeff::Matrix(m))
            }
        }
    }

    pub fn scalar(&self, c: Complex64) -> Option<Coeff> {
        self.one().map(|one| self.scale(&one, c))
    }

    /// Checks that `a` is a well-formed element of this algebra.
    pub fn validate(&self, a: &Coeff) -> Result<()> {
        match (self, a) {
            (CoefficientAlgebra::Scalar, Coeff::Scalar(_)) => Ok(()),
            (CoefficientAlgebra::SchwartzZ { window }, Coeff::Func(f)) => {
                match f.keys().find(|n| n.abs() > *window) {
                    Some(n) => Err(Error::Domain(format!(
                        "support point {n} outside [-{window}, {window}]"
                    ))),
                    None => Ok(()),
                }
            }
            (CoefficientAlgebra::ScaleSchwartz { scale }, Coeff::Func(f)) => {
                match f.keys().find(|&&i| i < 0 || i as usize >= scale.len()) {
                    Some(i) => Err(Error::Domain(format!("index {i} outside the index set"))),
                    None => Ok(()),
                }
            }
            (CoefficientAlgebra::Matrix { dim, base }, Coeff::Matrix(m)) => {
                if m.len() != dim * dim {
                    return Err(Error::Dimension { expected: dim * dim, found: m.len() });
                }
                m.iter().try_for_each(|x| base.validate(x))
            }
            _ => Err(Error::Domain(format!("value does not belong to {}", self.name()))),
        }
    }

    /// Function element from a sparse map, validating the support.
    pub fn function(&self, values: BTreeMap<i64, Complex64>) -> Result<Coeff> {
        let f = Coeff::Func(prune(values));
        self.validate(&f)?;
        Ok(f)
    }

    pub fn is_zero(&self, a: &Coeff) -> bool {
        match a {
            Coeff::Scalar(z) => *z == Complex64::new(0.0, 0.0),
            Coeff::Func(f) => f.values().all(|v| *v == Complex64::new(0.0, 0.0)),
            Coeff::Matrix(m) => match self {
                CoefficientAlgebra::Matrix { base, .. } => m.iter().all(|x| base.is_zero(x)),
                _ => false,
            },
        }
    }

    pub fn add(&self, a: &Coeff, b: &Coeff) -> Coeff {
        self.axpy(a, Complex64::new(1.0, 0.0), b)
    }

    pub fn sub(&self, a: &Coeff, b: &Coeff) -> Coeff {
        self.axpy(a, Complex64::new(-1.0, 0.0), b)
    }

    /// `a + c·b`.
    pub fn axpy(&self, a: &Coeff, c: Complex64, b: &Coeff) -> Coeff {
        match (a, b) {
            (Coeff::Scalar(x), Coeff::Scalar(y)) => Coeff::Scalar(x + c * y),
            (Coeff::Func(f), Coeff::Func(g)) => {
                let mut out = f.clone();
                for (k, v) in g {
                    *out.entry(*k).or_insert(Complex64::new(0.0, 0.0)) += c * v;
                }
                Coeff::Func(prune(out))
            }
            (Coeff::Matrix(x), Coeff::Matrix(y)) => {
                let base = self.base();
                Coeff::Matrix(x.iter().zip(y).map(|(p, q)| base.axpy(p, c, q)).collect())
            }
            _ => panic!("axpy on mismatched coefficient kinds"),
        }
    }

    pub fn scale(&self, a: &Coeff, c: Complex64) -> Coeff {
        match a {
            Coeff::Scalar(x) => Coeff::Scalar(x * c),
            Coeff::Func(f) => Coeff::Func(prune(f.iter().map(|(k, v)| (*k, v * c)).collect())),
            Coeff::Matrix(m) => {
                let base = self.base();
                Coeff::Matrix(m.iter().map(|x| base.scale(x, c)).collect())
            }
        }
    }

    fn base(&self) -> &CoefficientAlgebra {
        match self {
            CoefficientAlgebra::Matrix { base, .. } => base,
            other => other,
        }
    }

    pub fn mul(&self, a: &Coeff, b: &Coeff) -> Result<Coeff> {
        match (self, a, b) {
            (_, Coeff::Scalar(x), Coeff::Scalar(y)) => Ok(Coeff::Scalar(x * y)),
            (_, Coeff::Func(f), Coeff::Func(g)) => {
                let (small, large) = if f.len() <= g.len() { (f, g) } else { (g, f) };
                Ok(Coeff::Func(prune(
                    small
                        .iter()
                        .filter_map(|(k, v)| large.get(k).map(|w| (*k, v * w)))
                        .collect(),
                )))
            }
            (CoefficientAlgebra::Matrix { dim, base }, Coeff::Matrix(x), Coeff::Matrix(y)) => {
                let l = *dim;
                if x.len() != l * l || y.len() != l * l {
                    return Err(Error::Dimension { expected: l * l, found: x.len().min(y.len()) });
                }
                let mut out = Vec::with_capacity(l * l);
                for i in 0..l {
                    for j in 0..l {
                        let mut acc = base.zero();
                        for k in 0..l {
                            let p = base.mul(&x[i * l + k], &y[k * l + j])?;
                            acc = base.add(&acc, &p);
                        }
                        out.push(acc);
                    }
                }
                Ok(Coeff::Matrix(out))
            }
            _ => Err(Error::Domain("product of mismatched coefficient kinds".into())),
        }
    }

    pub fn star(&self, a: &Coeff) -> Coeff {
        match (self, a) {
            (_, Coeff::Scalar(x)) => Coeff::Scalar(x.conj()),
            (_, Coeff::Func(f)) => Coeff::Func(f.iter().map(|(k, v)| (*k, v.conj())).collect()),
            (CoefficientAlgebra::Matrix { dim, base }, Coeff::Matrix(m)) => {
                let l = *dim;
                let mut out = Vec::with_capacity(l * l);
                for i in 0..l {
                    for j in 0..l {
                        out.push(base.star(&m[j * l + i]));
                    }
                }
                Coeff::Matrix(out)
            }
            (_, Coeff::Matrix(_)) => a.clone(),
        }
    }

    /// The seminorm `‖a‖_m`; `m = 0` is the norm of `B`.
    pub fn seminorm(&self, a: &Coeff, m: usize) -> f64 {
        match (self, a) {
            (_, Coeff::Scalar(x)) => x.norm(),
            (CoefficientAlgebra::SchwartzZ { .. }, Coeff::Func(f)) => f
                .iter()
                .map(|(n, v)| (1.0 + n.unsigned_abs() as f64).powi(m as i32) * v.norm())
                .fold(0.0, f64::max),
            (CoefficientAlgebra::ScaleSchwartz { scale }, Coeff::Func(f)) => f
                .iter()
                .map(|(i, v)| {
                    let s = scale.get(*i as usize).copied().unwrap_or(0.0);
                    (1.0 + s).powi(m as i32) * v.norm()
                })
                .fold(0.0, f64::max),
            (CoefficientAlgebra::Matrix { base, .. }, Coeff::Matrix(x)) => {
                x.iter().map(|e| base.seminorm(e, m)).fold(0.0, f64::max)
            }
            _ => f64::NAN,
        }
    }

    pub fn norm(&self, a: &Coeff) -> f64 {
        self.seminorm(a, 0)
    }

    /// Dimension of the Hilbert space on which the algebra is represented,
    /// when finite.
    pub fn hilbert_dim(&self) -> Option<usize> {
        match self {
            CoefficientAlgebra::Scalar => Some(1),
            CoefficientAlgebra::SchwartzZ { .. } => None,
            CoefficientAlgebra::ScaleSchwartz { scale } => Some(scale.len()),
            CoefficientAlgebra::Matrix { dim, base } => base.hilbert_dim().map(|b| b * dim),
        }
    }

    /// Dense row-major matrix of `a` acting on `ℂ^hilbert_dim`: scalars act
    /// by multiplication, functions as diagonal operators, matrices blockwise.
    pub fn represent(&self, a: &Coeff) -> Result<Vec<Complex64>> {
        let n = self
            .hilbert_dim()
            .ok_or_else(|| Error::Unsupported(format!("{} has no finite representation", self.name())))?;
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        match (self, a) {
            (CoefficientAlgebra::Scalar, Coeff::Scalar(x)) => out[0] = *x,
            (CoefficientAlgebra::ScaleSchwartz { .. }, Coeff::Func(f)) => {
                for (i, v) in f {
                    let i = *i as usize;
                    out[i * n + i] = *v;
                }
            }
            (CoefficientAlgebra::Matrix { dim, base }, Coeff::Matrix(m)) => {
                let b = base.hilbert_dim().unwrap_or(1);
                for i in 0..*dim {
                    for j in 0..*dim {
                        let block = base.represent(&m[i * dim + j])?;
                        for r in 0..b {
                            for c in 0..b {
                                out[(i * b + r) * n + (j * b + c)] = block[r * b + c];
                            }
                        }
                    }
                }
            }
            _ => return Err(Error::Domain(format!("value does not belong to {}", self.name()))),
        }
        Ok(out)
    }

    /// A linear basis, for algebras of finite dimension (the Schwartz
    /// algebra over `ℤ` uses its truncation window).
    pub fn basis(&self) -> Vec<Coeff> {
        let delta = |i: i64| Coeff::Func(BTreeMap::from([(i, Complex64::new(1.0, 0.0))]));
        match self {
            CoefficientAlgebra::Scalar => vec![Coeff::Scalar(Complex64::new(1.0, 0.0))],
            CoefficientAlgebra::SchwartzZ { window } => (-window..=*window).map(delta).collect(),
            CoefficientAlgebra::ScaleSchwartz { scale } => {
                (0..scale.len() as i64).map(delta).collect()
            }
            CoefficientAlgebra::Matrix { dim, base } => {
                let mut out = Vec::new();
                for pos in 0..dim * dim {
                    for b in base.basis() {
                        let mut m = vec![base.zero(); dim * dim];
                        m[pos] = b;
                        out.push(Coeff::Matrix(m));
                    }
                }
                out
            }
        }
    }

    /// Random element: complex Gaussian values on a random support.
    /// `spread` limits the support radius of sequences on `ℤ`.
    pub fn sample(&self, rng: &mut impl Rng, spread: i64) -> Coeff {
        match self {
            CoefficientAlgebra::Scalar => Coeff::Scalar(sample_complex(rng)),
            CoefficientAlgebra::SchwartzZ { window } => {
                let w = spread.clamp(0, *window);
                let mut f = BTreeMap::new();
                let count = rng.random_range(1..=(2 * w + 1).min(6) as usize);
                for _ in 0..count {
                    f.insert(rng.random_range(-w..=w), sample_complex(rng));
                }
                Coeff::Func(prune(f))
            }
            CoefficientAlgebra::ScaleSchwartz { scale } => Coeff::Func(prune(
                (0..scale.len() as i64).map(|i| (i, sample_complex(rng))).collect(),
            )),
            CoefficientAlgebra::Matrix { dim, base } => {
                Coeff::Matrix((0..dim * dim).map(|_| base.sample(rng, spread)).collect())
            }
        }
    }

    /// Recursively maps function indices; used by translation and
    /// permutation actions.
    pub(crate) fn map_indices(&self, a: &Coeff, f: &dyn Fn(i64) -> i64) -> Coeff {
        match a {
            Coeff::Scalar(_) => a.clone(),
            Coeff::Func(m) => Coeff::Func(m.iter().map(|(k, v)| (f(*k), *v)).collect()),
            Coeff::Matrix(m) => {
                let base = self.base();
                Coeff::Matrix(m.iter().map(|x| base.map_indices(x, f)).collect())
            }
        }
    }
}
