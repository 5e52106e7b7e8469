//! Scalar profiles on the parameter torus and normal vector fields built
//! from them.

use std::f64::consts::TAU;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::Vector7;
use crate::g2::G2Constants;
use crate::lab::immersion::{SampledSubmanifold, SubmanifoldKind};
use crate::plane::{orthonormalize, Frame};

type V7 = Vector7<f64>;

/// Absolute bound on the tangential part of a field accepted as normal
/// (scaled by `max(1, max |V|)`).
pub const NORMAL_TOL: f64 = 1e-9;

fn one() -> f64 {
    1.0
}
fn one_i() -> i32 {
    1
}

/// One Fourier mode `cos·cos(k·θ) + sin·sin(k·θ)`, with `k·θ` scaled to the
/// grid period. `modes` has one entry per parameter axis (in axis order).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierTerm {
    pub modes: Vec<i32>,
    #[serde(default)]
    pub cos: f64,
    #[serde(default)]
    pub sin: f64,
}

/// A smooth periodic scalar function on the parameter torus with an exact
/// gradient. `axis` refers to the parameter label (e.g. `6` for `θ₆`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Profile {
    Sin {
        axis: u8,
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default = "one_i")]
        mode: i32,
        #[serde(default)]
        phase: f64,
    },
    Cos {
        axis: u8,
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default = "one_i")]
        mode: i32,
        #[serde(default)]
        phase: f64,
    },
    Constant {
        #[serde(default = "one")]
        value: f64,
    },
    Fourier {
        #[serde(default)]
        constant: f64,
        terms: Vec<FourierTerm>,
    },
}

impl Profile {
    /// Random trigonometric polynomial with `n_terms` modes in `-2..=2`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, dim: usize, n_terms: usize) -> Self {
        let terms = (0..n_terms)
            .map(|_| FourierTerm {
                modes: (0..dim).map(|_| rng.random_range(-2..=2)).collect(),
                cos: rng.sample::<f64, _>(StandardNormal),
                sin: rng.sample::<f64, _>(StandardNormal),
            })
            .collect();
        Profile::Fourier {
            constant: rng.sample::<f64, _>(StandardNormal),
            terms,
        }
    }

    /// Value and gradient (per parameter axis) at parameter point `theta`.
    pub fn eval(&self, s: &SampledSubmanifold, theta: &[f64]) -> Result<(f64, Vec<f64>)> {
        let dim = theta.len();
        let w = TAU / s.grid().period;
        let mut grad = vec![0.0; dim];
        let value = match self {
            Profile::Sin {
                axis,
                amplitude,
                mode,
                phase,
            }
            | Profile::Cos {
                axis,
                amplitude,
                mode,
                phase,
            } => {
                let a = s.axis_index(*axis)?;
                let k = *mode as f64 * w;
                let arg = k * theta[a] + phase;
                if matches!(self, Profile::Sin { .. }) {
                    grad[a] = amplitude * k * arg.cos();
                    amplitude * arg.sin()
                } else {
                    grad[a] = -amplitude * k * arg.sin();
                    amplitude * arg.cos()
                }
            }
            Profile::Constant { value } => *value,
            Profile::Fourier { constant, terms } => {
                let mut v = *constant;
                for t in terms {
                    if t.modes.len() != dim {
                        return Err(Error::Precondition(format!(
                            "fourier mode vector has length {}, expected {dim}",
                            t.modes.len()
                        )));
                    }
                    let arg: f64 = t
                        .modes
                        .iter()
                        .zip(theta)
                        .map(|(&m, x)| m as f64 * w * x)
                        .sum();
                    let (sn, cs) = arg.sin_cos();
                    v += t.cos * cs + t.sin * sn;
                    let dphase = -t.cos * sn + t.sin * cs;
                    for (g, &m) in grad.iter_mut().zip(&t.modes) {
                        *g += dphase * m as f64 * w;
                    }
                }
                v
            }
        };
        Ok((value, grad))
    }
}

/// Direction of a field component: an ambient basis vector `e1`..`e7`, the
/// pointwise `R = χ(T̂)` of an HL submanifold, or an explicit vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Direction {
    Named(String),
    Vector([f64; 7]),
}

impl Direction {
    fn resolve(&self, s: &SampledSubmanifold, p: usize) -> Result<V7> {
        match self {
            Direction::Vector(v) => Vector7::try_from_slice(v),
            Direction::Named(name) if name == "R" => {
                if s.kind() != SubmanifoldKind::HarveyLawson {
                    return Err(Error::Precondition(
                        "direction R is defined on HL submanifolds only".into(),
                    ));
                }
                let t = orthonormalize(&Frame::new(s.tangents(p))?, 1e-12)?;
                let e = t.vectors();
                Ok(G2Constants::shared().chi(&e[0], &e[1], &e[2]))
            }
            Direction::Named(name) => {
                let i = name
                    .strip_prefix('e')
                    .and_then(|d| d.parse::<usize>().ok())
                    .filter(|i| (1..=7).contains(i))
                    .ok_or_else(|| Error::Parse(format!("unknown direction {name:?}")))?;
                Ok(Vector7::basis(i))
            }
        }
    }

    /// True when the direction is the same vector at every point of `s`.
    fn is_constant_on(&self, s: &SampledSubmanifold) -> bool {
        !matches!(self, Direction::Named(n) if n == "R") || s.is_affine()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldComponent {
    pub direction: Direction,
    pub profile: Profile,
}

/// `V = Σ profile_i · direction_i`; JSON accepts one component or a list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FieldSpec {
    Single(FieldComponent),
    Sum(Vec<FieldComponent>),
}

impl FieldSpec {
    pub fn single(direction: &str, profile: Profile) -> Self {
        FieldSpec::Single(FieldComponent {
            direction: Direction::Named(direction.to_string()),
            profile,
        })
    }

    pub fn components(&self) -> &[FieldComponent] {
        match self {
            FieldSpec::Single(c) => std::slice::from_ref(c),
            FieldSpec::Sum(cs) => cs,
        }
    }

    /// Evaluates the raw vector field on the grid of `s`.
    pub fn evaluate(&self, s: &SampledSubmanifold) -> Result<Vec<V7>> {
        (0..s.grid().len())
            .map(|p| {
                let theta = s.grid().coords(p);
                let mut v = V7::zero();
                for c in self.components() {
                    let (f, _) = c.profile.eval(s, &theta)?;
                    v = v + c.direction.resolve(s, p)? * f;
                }
                Ok(v)
            })
            .collect()
    }

    /// Value and parameter derivatives `∂_a V` at point `p`, available when
    /// every direction is constant along `s`.
    pub fn jet(&self, s: &SampledSubmanifold, p: usize) -> Result<Option<(V7, Vec<V7>)>> {
        if !self
            .components()
            .iter()
            .all(|c| c.direction.is_constant_on(s))
        {
            return Ok(None);
        }
        let theta = s.grid().coords(p);
        let mut v = V7::zero();
        let mut dv = vec![V7::zero(); theta.len()];
        for c in self.components() {
            let (f, grad) = c.profile.eval(s, &theta)?;
            let dir = c.direction.resolve(s, p)?;
            v = v + dir * f;
            for (d, g) in dv.iter_mut().zip(grad) {
                *d = *d + dir * g;
            }
        }
        Ok(Some((v, dv)))
    }

    /// Builds a normal field; with `project` the tangential part is removed
    /// first, otherwise a tangential component is an error.
    pub fn normal_field(&self, s: &SampledSubmanifold, project: bool) -> Result<NormalField> {
        let mut values = self.evaluate(s)?;
        if project {
            for (p, v) in values.iter_mut().enumerate() {
                *v = *v - tangential_part(s, p, v)?;
            }
        }
        NormalField::new(s, values)
    }
}

fn tangential_part(s: &SampledSubmanifold, p: usize, v: &V7) -> Result<V7> {
    let frame = orthonormalize(&Frame::new(s.tangents(p))?, 1e-12)?;
    Ok(frame
        .vectors()
        .iter()
        .fold(V7::zero(), |acc, e| acc + *e * e.dot(v)))
}

/// A vector field along a sampled submanifold, verified normal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalField {
    values: Vec<V7>,
    pub orthogonality_residual: f64,
}

impl NormalField {
    pub fn new(s: &SampledSubmanifold, values: Vec<V7>) -> Result<Self> {
        if values.len() != s.grid().len() {
            return Err(Error::Precondition(format!(
                "field has {} samples, grid has {}",
                values.len(),
                s.grid().len()
            )));
        }
        let mut residual: f64 = 0.0;
        let mut scale: f64 = 1.0;
        for (p, v) in values.iter().enumerate() {
            if !v.0.iter().all(|x| x.is_finite()) {
                return Err(Error::NonFinite);
            }
            residual = residual.max(tangential_part(s, p, v)?.norm());
            scale = scale.max(v.max_abs());
        }
        if residual > NORMAL_TOL * scale {
            return Err(Error::NonNormalField(residual));
        }
        Ok(NormalField {
            values,
            orthogonality_residual: residual,
        })
    }

    pub fn values(&self) -> &[V7] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}
