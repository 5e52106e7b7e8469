//! Periodic immersions of 3- and 4-tori into the flat 7-torus, their
//! finite-difference tangent frames, pullbacks and normal translations.

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::exterior::{IndexTuple, KForm, Vector7};
use crate::lab::field::{FieldSpec, NormalField};
use crate::lab::grid::{Grid, SampledForm};
use crate::lab::model::{standard_relabeling, FlatModel};
use crate::plane::Frame;

type V7 = Vector7<f64>;

/// Smallest scale-invariant Jacobian independence accepted as regular.
pub const REGULARITY_TOL: f64 = 1e-8;

/// Which calibration-type condition the construction is meant to satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SubmanifoldKind {
    HarveyLawson,
    RS,
    Coassociative,
}

/// Built-in immersion constructions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "spec", rename_all = "kebab-case")]
pub enum ImmersionSpec {
    /// `(θ₄,θ₅,θ₆) ↦ θ₄e₄ + θ₅e₅ + θ₆e₆`.
    HlCoordinate,
    /// `(θ₁..θ₄) ↦ Σ θᵢeᵢ`.
    RsCoordinate,
    /// `(θ₄..θ₇) ↦ Σ θᵢeᵢ`.
    CoassociativeCoordinate,
    /// `hl-coordinate` plus a small normal perturbation.
    HlGraph { perturbation: FieldSpec },
    /// Phase-0 special Lagrangian `span{x₁,x₃,x₅}` times the circle, placed
    /// by the standard CY relabeling.
    SlCircle,
    /// Phase-π/2 special Lagrangian `span{x₁,x₃,x₆}`.
    SlPhasePi2,
}

pub const SPEC_NAMES: [&str; 6] = [
    "hl-coordinate",
    "rs-coordinate",
    "coassociative-coordinate",
    "hl-graph",
    "sl-circle",
    "sl-phase-pi2",
];

impl ImmersionSpec {
    pub fn from_name(name: &str, perturbation: Option<FieldSpec>) -> Result<Self> {
        Ok(match name {
            "hl-coordinate" => ImmersionSpec::HlCoordinate,
            "rs-coordinate" => ImmersionSpec::RsCoordinate,
            "coassociative-coordinate" => ImmersionSpec::CoassociativeCoordinate,
            "hl-graph" => ImmersionSpec::HlGraph {
                perturbation: perturbation.ok_or_else(|| {
                    Error::Precondition("hl-graph needs a perturbation field".into())
                })?,
            },
            "sl-circle" => ImmersionSpec::SlCircle,
            "sl-phase-pi2" => ImmersionSpec::SlPhasePi2,
            other => return Err(Error::UnknownSpec(other.to_string())),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            ImmersionSpec::HlCoordinate => "hl-coordinate",
            ImmersionSpec::RsCoordinate => "rs-coordinate",
            ImmersionSpec::CoassociativeCoordinate => "coassociative-coordinate",
            ImmersionSpec::HlGraph { .. } => "hl-graph",
            ImmersionSpec::SlCircle => "sl-circle",
            ImmersionSpec::SlPhasePi2 => "sl-phase-pi2",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            ImmersionSpec::RsCoordinate
            | ImmersionSpec::CoassociativeCoordinate
            | ImmersionSpec::SlCircle => 4,
            _ => 3,
        }
    }

    /// Parameter labels, their display names, ambient directions and kind.
    fn layout(&self) -> (Vec<u8>, Vec<String>, Vec<V7>, SubmanifoldKind) {
        let coord = |labels: &[u8]| {
            (
                labels.to_vec(),
                labels.iter().map(|l| format!("θ{l}")).collect(),
                labels.iter().map(|&l| V7::basis(l as usize)).collect(),
            )
        };
        // CY axes: x1..x6 are 1..6, t is 7
        let cy = |labels: &[u8]| {
            let r = standard_relabeling();
            (
                labels.to_vec(),
                labels
                    .iter()
                    .map(|&l| {
                        if l == 7 {
                            "t".to_string()
                        } else {
                            format!("x{l}")
                        }
                    })
                    .collect(),
                labels
                    .iter()
                    .map(|&l| r.apply_vector(&V7::basis(l as usize)))
                    .collect(),
            )
        };
        let ((labels, names, dirs), kind) = match self {
            ImmersionSpec::HlCoordinate | ImmersionSpec::HlGraph { .. } => {
                (coord(&[4, 5, 6]), SubmanifoldKind::HarveyLawson)
            }
            ImmersionSpec::RsCoordinate => (coord(&[1, 2, 3, 4]), SubmanifoldKind::RS),
            ImmersionSpec::CoassociativeCoordinate => {
                (coord(&[4, 5, 6, 7]), SubmanifoldKind::Coassociative)
            }
            ImmersionSpec::SlCircle => (cy(&[1, 3, 5, 7]), SubmanifoldKind::RS),
            ImmersionSpec::SlPhasePi2 => (cy(&[1, 3, 6]), SubmanifoldKind::HarveyLawson),
        };
        (labels, names, dirs, kind)
    }
}

/// A periodic grid immersed in the flat torus. The immersion extends by
/// `x(θ + period·e_a) = x(θ) + period·direction_a`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSubmanifold {
    grid: Grid,
    kind: SubmanifoldKind,
    spec: String,
    axis_labels: Vec<u8>,
    axis_names: Vec<String>,
    directions: Vec<V7>,
    points: Vec<V7>,
    affine: bool,
    metadata: serde_json::Value,
}

/// Samples a built-in construction at `resolution` points per axis.
pub fn sample_immersion(
    model: &FlatModel,
    spec: &ImmersionSpec,
    resolution: usize,
) -> Result<SampledSubmanifold> {
    let (axis_labels, axis_names, directions, kind) = spec.layout();
    let grid = Grid::new(spec.dim(), resolution, model.period)?;
    let points = (0..grid.len())
        .map(|p| {
            grid.coords(p)
                .iter()
                .zip(&directions)
                .fold(V7::zero(), |acc, (x, d)| acc + *d * *x)
        })
        .collect();
    let mut s = SampledSubmanifold {
        grid,
        kind,
        spec: spec.name().to_string(),
        axis_labels,
        axis_names,
        directions,
        points,
        affine: true,
        metadata: json!({ "spec": spec.name(), "resolution": resolution, "period": model.period }),
    };
    if let ImmersionSpec::HlGraph { perturbation } = spec {
        let bump = perturbation.normal_field(&s, false)?;
        for (x, b) in s.points.iter_mut().zip(bump.values()) {
            *x = *x + *b;
        }
        s.affine = false;
        s.metadata["perturbation"] = serde_json::to_value(perturbation).unwrap_or_default();
    }
    s.check_regular()?;
    Ok(s)
}

impl SampledSubmanifold {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.dim
    }

    pub fn kind(&self) -> SubmanifoldKind {
        self.kind
    }

    pub fn spec_name(&self) -> &str {
        &self.spec
    }

    pub fn axis_labels(&self) -> &[u8] {
        &self.axis_labels
    }

    pub fn axis_names(&self) -> &[String] {
        &self.axis_names
    }

    pub fn points(&self) -> &[V7] {
        &self.points
    }

    pub fn is_affine(&self) -> bool {
        self.affine
    }

    pub fn metadata(&self) -> &serde_json::Value {
        &self.metadata
    }

    /// Winding offset picked up along parameter axis `a` per period.
    pub fn winding_offset(&self, a: usize) -> V7 {
        self.directions[a] * self.grid.period
    }

    /// Position of a parameter label among the axes.
    pub fn axis_index(&self, label: u8) -> Result<usize> {
        self.axis_labels
            .iter()
            .position(|&l| l == label)
            .ok_or_else(|| {
                Error::Precondition(format!(
                    "axis {label} is not a parameter of {} (axes {:?})",
                    self.spec, self.axis_labels
                ))
            })
    }

    /// Central-difference tangent vectors `∂x/∂θ_a` at grid point `p`.
    pub fn tangents(&self, p: usize) -> Vec<V7> {
        let inv = 1.0 / (2.0 * self.grid.spacing());
        (0..self.dim())
            .map(|a| {
                let (f, wf) = self.grid.neighbor(p, a, true);
                let (b, wb) = self.grid.neighbor(p, a, false);
                let shift = self.winding_offset(a) * (wf - wb) as f64;
                (self.points[f] - self.points[b] + shift) * inv
            })
            .collect()
    }

    /// Smallest scale-invariant independence of the tangent frames.
    pub fn regularity(&self) -> Result<f64> {
        let mut worst = f64::INFINITY;
        for p in 0..self.grid.len() {
            worst = worst.min(Frame::new(self.tangents(p))?.independence());
        }
        Ok(worst)
    }

    fn check_regular(&self) -> Result<()> {
        let r = self.regularity()?;
        if r < REGULARITY_TOL {
            return Err(Error::DegenerateFrame { gram_det: r });
        }
        Ok(())
    }
}

/// Pulls a constant ambient form back along the finite-difference tangents.
pub fn pullback_form(form: &KForm<f64>, s: &SampledSubmanifold) -> Result<SampledForm> {
    pullback_with(s, form.degree(), |_| Ok(form.clone()))
}

/// Pulls back a pointwise ambient form `α(p)` of fixed degree.
pub fn pullback_with<F>(
    s: &SampledSubmanifold,
    degree: usize,
    mut form_at: F,
) -> Result<SampledForm>
where
    F: FnMut(usize) -> Result<KForm<f64>>,
{
    if degree > s.dim() {
        return Err(Error::DegreeMismatch {
            expected: s.dim(),
            actual: degree,
        });
    }
    let mut err = None;
    let out = SampledForm::from_fn(&s.grid, degree, |p, keys| {
        let t = s.tangents(p);
        let row = form_at(p).and_then(|alpha| {
            keys.iter()
                .map(|k: &IndexTuple| {
                    let vs: Vec<V7> = k.iter().map(|a| t[(a - 1) as usize]).collect();
                    alpha.eval(&vs)
                })
                .collect::<Result<Vec<f64>>>()
        });
        row.unwrap_or_else(|e| {
            err.get_or_insert(e);
            vec![0.0; keys.len()]
        })
    })?;
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// Normal translation `x ↦ x + t·V(x)` (the flat normal exponential map).
pub fn deform(s: &SampledSubmanifold, v: &NormalField, t: f64) -> Result<SampledSubmanifold> {
    if v.len() != s.grid.len() {
        return Err(Error::Precondition(
            "field and submanifold grids differ".into(),
        ));
    }
    if !t.is_finite() {
        return Err(Error::NonFinite);
    }
    let mut out = s.clone();
    if t != 0.0 {
        for (x, dv) in out.points.iter_mut().zip(v.values()) {
            *x = *x + *dv * t;
        }
        out.affine = false;
    }
    let history = out.metadata["deformations"]
        .as_array()
        .cloned()
        .unwrap_or_default();
    let mut history = history;
    history.push(json!({ "t": t, "orthogonality_residual": v.orthogonality_residual }));
    out.metadata["deformations"] = serde_json::Value::Array(history);
    Ok(out)
}
