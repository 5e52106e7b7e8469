//! The deformation map `F(V) = (exp_V)^*(φ|_{L_V})` on sampled submanifolds,
//! its finite-difference derivative at `V = 0`, and the two closed-form
//! predictions: the Cartan route `d(i_V φ)|` and the Hodge route `d⋆v`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::{IndexTuple, KForm, Vector7};
use crate::g2::G2Constants;
use crate::lab::field::{FieldSpec, NormalField};
use crate::lab::grid::{exterior_derivative, invert, metric_hodge_star, SampledForm};
use crate::lab::immersion::{
    deform, pullback_form, pullback_with, sample_immersion, ImmersionSpec, SampledSubmanifold,
    SubmanifoldKind,
};
use crate::lab::model::build_flat_model;
use crate::plane::{orthonormalize, rs_normal_to_tangent, Frame};
use crate::scalar::determinant;

type V7 = Vector7<f64>;

/// Required convergence order in `t` and in grid spacing.
pub const MIN_ORDER: f64 = 1.8;

/// Multiple of `ε / t` under which successive central differences are
/// indistinguishable from rounding.
const ROUNDOFF_FACTOR: f64 = 256.0;

/// The calibration form whose restriction vanishes on `s`.
pub fn model_form(s: &SampledSubmanifold) -> Result<&'static KForm<f64>> {
    let g = G2Constants::shared();
    match s.kind() {
        SubmanifoldKind::HarveyLawson => Ok(&g.phi),
        SubmanifoldKind::RS => Ok(&g.star_phi),
        SubmanifoldKind::Coassociative => Err(Error::Precondition(
            "deformation maps are defined for HL and RS submanifolds".into(),
        )),
    }
}

/// `F(tV)`: the model form pulled back along the translated immersion.
pub fn deformation_map(s: &SampledSubmanifold, v: &NormalField, t: f64) -> Result<SampledForm> {
    let form = model_form(s)?;
    pullback_form(form, &deform(s, v, t)?)
}

fn validate_ladder(ladder: &[f64]) -> Result<()> {
    if ladder.len() < 3 {
        return Err(Error::InvalidLadder(format!(
            "need at least 3 step sizes, got {}",
            ladder.len()
        )));
    }
    if ladder.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
        return Err(Error::InvalidLadder("step sizes must be positive".into()));
    }
    if ladder.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidLadder(
            "step sizes must strictly decrease".into(),
        ));
    }
    Ok(())
}

/// Solves `(a^p − b^p)/(b^p − c^p) = ratio` for `p` by bisection
/// (`a > b > c > 0`); the left side increases with `p`.
fn solve_order(a: f64, b: f64, c: f64, ratio: f64) -> f64 {
    let h = |p: f64| (a.powf(p) - b.powf(p)) / (b.powf(p) - c.powf(p));
    let (mut lo, mut hi) = (0.01, 16.0);
    if ratio <= h(lo) {
        return lo;
    }
    if ratio >= h(hi) {
        return hi;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h(mid) < ratio {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Finite-difference derivative of `t ↦ F(tV)` at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct FdLinearization {
    /// Richardson extrapolation of the two smallest central differences.
    pub estimate: SampledForm,
    /// `(F(tV) − F(−tV)) / 2t` for each ladder step.
    pub central: Vec<SampledForm>,
    /// `F(tV)` for each ladder step.
    pub forward: Vec<SampledForm>,
    pub ladder: Vec<f64>,
    /// `max |D(t_i) − D(t_{i+1})|`.
    pub successive_differences: Vec<f64>,
    /// Observed order in `t`; `None` when the central differences agree to
    /// rounding (the map is odd-polynomial of degree one in `t`).
    pub order: Option<f64>,
    pub at_roundoff: bool,
    pub roundoff_floor: f64,
}

pub fn fd_linearization(
    s: &SampledSubmanifold,
    v: &NormalField,
    ladder: &[f64],
) -> Result<FdLinearization> {
    validate_ladder(ladder)?;
    let mut central = Vec::with_capacity(ladder.len());
    let mut forward = Vec::with_capacity(ladder.len());
    for &t in ladder {
        let fp = deformation_map(s, v, t)?;
        let fm = deformation_map(s, v, -t)?;
        central.push(fp.combine(0.5 / t, &fm, -0.5 / t)?);
        forward.push(fp);
    }
    let successive_differences: Vec<f64> = central
        .windows(2)
        .map(|w| w[0].max_abs_diff(&w[1]))
        .collect::<Result<_>>()?;
    let m = ladder.len();
    let scale = 1.0 + central[m - 1].max_abs();
    let roundoff_floor = ROUNDOFF_FACTOR * f64::EPSILON * scale / ladder[m - 1];
    let e1 = successive_differences[m - 3];
    let e2 = successive_differences[m - 2];
    let at_roundoff = e2 <= roundoff_floor;
    let order = (!at_roundoff && e1 > 0.0)
        .then(|| solve_order(ladder[m - 3], ladder[m - 2], ladder[m - 1], e1 / e2));
    let r2 = (ladder[m - 2] / ladder[m - 1]).powi(2);
    let estimate = central[m - 1].combine(r2 / (r2 - 1.0), &central[m - 2], -1.0 / (r2 - 1.0))?;
    Ok(FdLinearization {
        estimate,
        central,
        forward,
        ladder: ladder.to_vec(),
        successive_differences,
        order,
        at_roundoff,
        roundoff_floor,
    })
}

/// Consistency of the codifferential with the Hodge-route chain: the
/// coordinate formula `δv = −|g|^{-1/2} ∂_a(|g|^{1/2} g^{ab} v_b)` compared
/// with `d⋆v` after applying `⋆`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CodifferentialCheck {
    /// Sign `s` with `⋆(δv) ≈ s · d⋆v`; 0 if both vanish.
    pub sign: i8,
    pub residual: f64,
    pub opposite_sign_residual: f64,
    pub relation: String,
}

/// Both closed-form predictions for `dF(0)(V)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CartanLinearization {
    /// `i_V φ` pulled back.
    pub contraction: SampledForm,
    /// `d(i_V φ)|`.
    pub cartan: SampledForm,
    /// `v`, the 1-form dual to `V` under the tangent↔normal identification.
    pub dual_form: SampledForm,
    pub star_dual: SampledForm,
    /// `d⋆v`.
    pub hodge: SampledForm,
    /// `⋆(δv)`.
    pub star_codifferential: SampledForm,
    pub codifferential: CodifferentialCheck,
}

fn tangent_image(s: &SampledSubmanifold, p: usize, normal: &V7) -> Result<V7> {
    let on = orthonormalize(&Frame::new(s.tangents(p))?, 1e-12)?;
    let e = on.vectors();
    let g = G2Constants::shared();
    match s.kind() {
        SubmanifoldKind::HarveyLawson => {
            let r = g.chi(&e[0], &e[1], &e[2]);
            let tilde = *normal - r * r.dot(normal);
            Ok(g.cross(&r, &tilde))
        }
        SubmanifoldKind::RS => Ok(rs_normal_to_tangent(&[e[0], e[1], e[2], e[3]], normal)),
        SubmanifoldKind::Coassociative => Err(Error::Precondition(
            "no tangent/normal identification on coassociative submanifolds".into(),
        )),
    }
}

fn metric_at(s: &SampledSubmanifold, p: usize) -> Vec<f64> {
    let t = s.tangents(p);
    let n = t.len();
    let mut g = vec![0.0; n * n];
    for a in 0..n {
        for b in 0..n {
            g[a * n + b] = t[a].dot(&t[b]);
        }
    }
    g
}

pub fn cartan_linearization(
    s: &SampledSubmanifold,
    v: &NormalField,
) -> Result<CartanLinearization> {
    let form = model_form(s)?;
    if v.len() != s.grid().len() {
        return Err(Error::Precondition(
            "field and submanifold grids differ".into(),
        ));
    }
    let n = s.dim();
    let grid = s.grid().clone();
    let contraction = pullback_with(s, form.degree() - 1, |p| {
        form.interior_product(&v.values()[p])
    })?;
    let cartan = exterior_derivative(&contraction)?;

    let mut images = Vec::with_capacity(grid.len());
    for (p, x) in v.values().iter().enumerate() {
        images.push(tangent_image(s, p, x)?);
    }
    let dual_form = SampledForm::from_fn(&grid, 1, |p, _| {
        s.tangents(p).iter().map(|t| t.dot(&images[p])).collect()
    })?;
    let ones = IndexTuple::all_of_degree(n, 1);
    let star_dual = SampledForm::from_fn(&grid, n - 1, |p, _| {
        metric_hodge_star(n, &metric_at(s, p), &ones, dual_form.row(p))
    })?;
    let hodge = exterior_derivative(&star_dual)?;

    // ⋆δv = −Σ_a ∂_a(√|g| g^{ab} v_b) dθ^{1..n}
    let mut flux = vec![vec![0.0; grid.len()]; n];
    for p in 0..grid.len() {
        let g = metric_at(s, p);
        let rows: Vec<Vec<f64>> = (0..n).map(|i| g[i * n..(i + 1) * n].to_vec()).collect();
        let sqrt_det = determinant(rows.clone()).abs().sqrt();
        let ginv = invert(&rows);
        let vb = dual_form.row(p);
        for (a, slot) in flux.iter_mut().enumerate() {
            slot[p] = sqrt_det * (0..n).map(|b| ginv[a][b] * vb[b]).sum::<f64>();
        }
    }
    let derivs: Vec<Vec<f64>> = (0..n)
        .map(|a| grid.central_difference(&flux[a], a))
        .collect();
    let star_codifferential = SampledForm::from_fn(&grid, n, |p, _| {
        vec![-derivs.iter().map(|d| d[p]).sum::<f64>()]
    })?;
    let plus = star_codifferential.max_abs_diff(&hodge)?;
    let minus = star_codifferential.combine(1.0, &hodge, 1.0)?.max_abs();
    let floor = 1e-12 * (1.0 + hodge.max_abs());
    let (sign, residual, other) = if plus.max(minus) <= floor {
        (0, plus, minus)
    } else if minus <= plus {
        (-1, minus, plus)
    } else {
        (1, plus, minus)
    };
    let relation = match sign {
        -1 => "⋆(δv) = −d⋆v",
        1 => "⋆(δv) = +d⋆v",
        _ => "⋆(δv) = d⋆v = 0 (sign not determined)",
    }
    .to_string();
    Ok(CartanLinearization {
        contraction,
        cartan,
        dual_form,
        star_dual,
        hodge,
        star_codifferential,
        codifferential: CodifferentialCheck {
            sign,
            residual,
            opposite_sign_residual: other,
            relation,
        },
    })
}

/// The continuum value of `d(i_V φ)|` for an affine immersion and a field
/// with constant directions, from exact profile derivatives.
pub fn continuum_cartan(s: &SampledSubmanifold, field: &FieldSpec) -> Result<Option<SampledForm>> {
    if !s.is_affine() {
        return Ok(None);
    }
    let form = model_form(s)?;
    let mut jets = Vec::with_capacity(s.grid().len());
    for p in 0..s.grid().len() {
        match field.jet(s, p)? {
            Some(j) => jets.push(j.1),
            None => return Ok(None),
        }
    }
    let mut err = None;
    let out = SampledForm::from_fn(s.grid(), form.degree(), |p, keys| {
        let t = s.tangents(p);
        keys.iter()
            .map(|key| {
                // d(α)_J = Σ_pos (−1)^pos (i_{∂_a V} φ)(T_{J∖a})
                key.iter()
                    .enumerate()
                    .map(|(pos, a)| {
                        let mut vs = vec![jets[p][(a - 1) as usize]];
                        vs.extend(key.without(a).iter().map(|b| t[(b - 1) as usize]));
                        let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
                        sign * form.eval(&vs).unwrap_or_else(|e| {
                            err.get_or_insert(e);
                            0.0
                        })
                    })
                    .sum()
            })
            .collect()
    })?;
    match err {
        Some(e) => Err(e),
        None => Ok(Some(out)),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepRow {
    pub t: f64,
    /// `max |F(tV) − t·cartan|`.
    pub remainder: f64,
    /// `max |(F(tV) − F(−tV))/2t − cartan|`.
    pub central_error: f64,
}

/// Which overall sign of the Lie-derivative term the finite differences
/// support.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignAdjudication {
    pub supported: String,
    pub error_plus: f64,
    pub error_minus: f64,
    pub statement: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointDumps {
    pub fd_derivative: SampledForm,
    pub cartan_prediction: SampledForm,
    pub hodge_prediction: SampledForm,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeformationReport {
    pub spec: String,
    pub kind: SubmanifoldKind,
    pub dim: usize,
    pub resolution: usize,
    pub degree: usize,
    pub axes: Vec<String>,
    pub t_ladder: Vec<f64>,
    pub orthogonality_residual: f64,
    /// `max |fd − cartan|`.
    pub max_abs_error: f64,
    /// Observed order in `t` (absent when the error is at rounding level).
    pub convergence_order: Option<f64>,
    pub t_error_at_roundoff: bool,
    pub roundoff_floor: f64,
    pub successive_differences: Vec<f64>,
    /// `max |cartan − hodge|`.
    pub cartan_hodge_gap: f64,
    /// `max |cartan − continuum value|` when a continuum value exists.
    pub continuum_error: Option<f64>,
    pub fd_max_abs: f64,
    pub cartan_max_abs: f64,
    pub hodge_max_abs: f64,
    pub steps: Vec<StepRow>,
    pub sign: SignAdjudication,
    pub codifferential: CodifferentialCheck,
    pub degree_bookkeeping: Vec<String>,
    pub notes: Vec<String>,
    #[serde(skip)]
    pub fd_derivative: SampledForm,
    #[serde(skip)]
    pub cartan_prediction: SampledForm,
    #[serde(skip)]
    pub hodge_prediction: SampledForm,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<PointDumps>,
}

impl DeformationReport {
    /// `order ≥ 1.8`, or no measurable `t`-error at all.
    pub fn order_ok(&self) -> bool {
        self.t_error_at_roundoff || self.convergence_order.is_some_and(|p| p >= MIN_ORDER)
    }

    pub fn passes(&self, tolerance: f64) -> bool {
        self.max_abs_error <= tolerance && self.order_ok()
    }

    pub fn attach_points(&mut self) {
        self.points = Some(PointDumps {
            fd_derivative: self.fd_derivative.clone(),
            cartan_prediction: self.cartan_prediction.clone(),
            hodge_prediction: self.hodge_prediction.clone(),
        });
    }
}

fn adjudicate(
    kind: SubmanifoldKind,
    fd: &SampledForm,
    cartan: &SampledForm,
) -> Result<SignAdjudication> {
    let error_plus = fd.max_abs_diff(cartan)?;
    let error_minus = fd.combine(1.0, cartan, 1.0)?.max_abs();
    let (lie, printed) = match kind {
        SubmanifoldKind::RS => ("L_V(⋆φ)|", "the printed leading minus in −L_V(⋆φ)|"),
        _ => ("L_V(φ)|", "the printed sign"),
    };
    let (supported, statement) = if cartan.max_abs() <= 1e-12 && fd.max_abs() <= 1e-12 {
        (
            "undetermined",
            format!("dF(0)(V) and {lie} both vanish; sign not testable on this field"),
        )
    } else if error_plus < error_minus {
        (
            "+",
            if kind == SubmanifoldKind::RS {
                format!("dF(0)(V) = +{lie} = +d(i_V ⋆φ)|; {printed} is not supported")
            } else {
                format!("dF(0)(V) = +{lie} = +d(i_V φ)|, consistent with {printed}")
            },
        )
    } else {
        ("-", format!("dF(0)(V) = −{lie}"))
    };
    Ok(SignAdjudication {
        supported: supported.into(),
        error_plus,
        error_minus,
        statement,
    })
}

fn bookkeeping(kind: SubmanifoldKind, codiff: &CodifferentialCheck) -> Vec<String> {
    let n = if kind == SubmanifoldKind::RS { 4 } else { 3 };
    vec![
        format!("F(V) and dF(0)(V) are {n}-forms on a {n}-manifold (top degree)"),
        format!("v is a 1-form, ⋆v a {}-form, d⋆v a {n}-form", n - 1),
        format!(
            "δv is a 0-form and ⋆(δv) a {n}-form; measured {}",
            codiff.relation
        ),
        if kind == SubmanifoldKind::RS {
            "the printed chain d⋆v = ⋆(d*v) is degree-consistent only with d* the codifferential on 1-forms, and then holds with a minus sign".into()
        } else {
            "the printed chain (d⋆v) = (d*v) identifies the 3-form d⋆v with the function d*v via ⋆; the measured relation carries a minus sign".into()
        },
    ]
}

fn standard_notes() -> Vec<String> {
    vec![
        "flat model: φ and ⋆φ are constant, so dφ = 0 and i_V dφ drops out".into(),
        "merely closed or merely coclosed G2 structures have no flat nontrivial instance and are not exercised".into(),
    ]
}

/// Runs all three evaluations of `dF(0)(V)` and compares them.
pub fn compare_linearizations(
    s: &SampledSubmanifold,
    v: &NormalField,
    ladder: &[f64],
) -> Result<DeformationReport> {
    let fd = fd_linearization(s, v, ladder)?;
    let cl = cartan_linearization(s, v)?;
    let steps = fd
        .ladder
        .iter()
        .zip(fd.forward.iter().zip(&fd.central))
        .map(|(&t, (f, c))| {
            Ok(StepRow {
                t,
                remainder: f.combine(1.0, &cl.cartan, -t)?.max_abs(),
                central_error: c.max_abs_diff(&cl.cartan)?,
            })
        })
        .collect::<Result<_>>()?;
    let sign = adjudicate(s.kind(), &fd.estimate, &cl.cartan)?;
    Ok(DeformationReport {
        spec: s.spec_name().to_string(),
        kind: s.kind(),
        dim: s.dim(),
        resolution: s.grid().resolution,
        degree: cl.cartan.degree,
        axes: s.axis_names().to_vec(),
        t_ladder: fd.ladder.clone(),
        orthogonality_residual: v.orthogonality_residual,
        max_abs_error: fd.estimate.max_abs_diff(&cl.cartan)?,
        convergence_order: fd.order,
        t_error_at_roundoff: fd.at_roundoff,
        roundoff_floor: fd.roundoff_floor,
        successive_differences: fd.successive_differences.clone(),
        cartan_hodge_gap: cl.cartan.max_abs_diff(&cl.hodge)?,
        continuum_error: None,
        fd_max_abs: fd.estimate.max_abs(),
        cartan_max_abs: cl.cartan.max_abs(),
        hodge_max_abs: cl.hodge.max_abs(),
        steps,
        sign,
        degree_bookkeeping: bookkeeping(s.kind(), &cl.codifferential),
        codifferential: cl.codifferential,
        notes: standard_notes(),
        fd_derivative: fd.estimate,
        cartan_prediction: cl.cartan,
        hodge_prediction: cl.hodge,
        points: None,
    })
}

fn default_ladder() -> Vec<f64> {
    vec![1e-2, 5e-3, 2.5e-3]
}

/// A deformation experiment as read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeformationSpec {
    pub spec: String,
    #[serde(default)]
    pub resolution: Option<usize>,
    pub field: FieldSpec,
    #[serde(default = "default_ladder")]
    pub t_ladder: Vec<f64>,
    #[serde(default)]
    pub period: Option<f64>,
    /// Normal perturbation for `hl-graph`.
    #[serde(default)]
    pub perturbation: Option<FieldSpec>,
    /// Remove the tangential part of `field` instead of rejecting it.
    #[serde(default)]
    pub project_normal: bool,
    #[serde(default)]
    pub tolerance: Option<f64>,
}

impl DeformationSpec {
    pub fn immersion(&self) -> Result<ImmersionSpec> {
        ImmersionSpec::from_name(&self.spec, self.perturbation.clone())
    }

    /// 32 points per axis in 3D, 12 in 4D unless given.
    pub fn resolution_or_default(&self, dim: usize) -> usize {
        self.resolution.unwrap_or(if dim == 4 { 12 } else { 32 })
    }

    pub fn sample(&self) -> Result<SampledSubmanifold> {
        let model = build_flat_model(self.period.unwrap_or(std::f64::consts::TAU))?;
        let imm = self.immersion()?;
        let res = self.resolution_or_default(imm.dim());
        sample_immersion(&model, &imm, res)
    }
}

pub fn run_deformation(spec: &DeformationSpec, dump_points: bool) -> Result<DeformationReport> {
    let s = spec.sample()?;
    let v = spec.field.normal_field(&s, spec.project_normal)?;
    let mut report = compare_linearizations(&s, &v, &spec.t_ladder)?;
    if !spec.project_normal {
        if let Some(exact) = continuum_cartan(&s, &spec.field)? {
            report.continuum_error = Some(report.cartan_prediction.max_abs_diff(&exact)?);
        }
    }
    if dump_points {
        report.attach_points();
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridLevel {
    pub resolution: usize,
    /// `max |cartan − continuum|`.
    pub discrete_error: f64,
    /// `max |cartan − hodge|`.
    pub route_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridStudy {
    pub levels: Vec<GridLevel>,
    /// Observed orders of `discrete_error` between consecutive levels.
    pub orders: Vec<f64>,
    pub min_order: f64,
    /// `route_gap ≤ discrete_error` at every level.
    pub routes_within_discrete_error: bool,
}

impl GridStudy {
    pub fn passes(&self) -> bool {
        self.min_order >= MIN_ORDER && self.routes_within_discrete_error
    }
}

/// Refines the grid and measures the discrete-operator error of the
/// Cartan route against the continuum value, and the Hodge-route gap.
pub fn grid_refinement_study(
    spec: &ImmersionSpec,
    field: &FieldSpec,
    resolutions: &[usize],
) -> Result<GridStudy> {
    if resolutions.len() < 2 {
        return Err(Error::Precondition("need at least two resolutions".into()));
    }
    let model = build_flat_model(std::f64::consts::TAU)?;
    let mut levels = Vec::new();
    for &res in resolutions {
        let s = sample_immersion(&model, spec, res)?;
        let v = field.normal_field(&s, false)?;
        let cl = cartan_linearization(&s, &v)?;
        let exact = continuum_cartan(&s, field)?.ok_or_else(|| {
            Error::Precondition(
                "grid study needs an affine immersion and constant directions".into(),
            )
        })?;
        levels.push(GridLevel {
            resolution: res,
            discrete_error: cl.cartan.max_abs_diff(&exact)?,
            route_gap: cl.cartan.max_abs_diff(&cl.hodge)?,
        });
    }
    let orders: Vec<f64> = levels
        .windows(2)
        .map(|w| {
            (w[0].discrete_error / w[1].discrete_error).ln()
                / (w[1].resolution as f64 / w[0].resolution as f64).ln()
        })
        .collect();
    let min_order = orders.iter().copied().fold(f64::INFINITY, f64::min);
    let routes_within_discrete_error = levels.iter().all(|l| l.route_gap <= l.discrete_error);
    Ok(GridStudy {
        levels,
        orders,
        min_order,
        routes_within_discrete_error,
    })
}
