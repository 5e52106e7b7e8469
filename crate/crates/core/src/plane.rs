//! Calibrated and Lagrangian-type 3- and 4-planes in R^7.
//!
//! Classification always runs on a Gram-Schmidt orthonormalized copy of the
//! input frame, so the thresholds below are scale invariant.

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::{gram_determinant, KForm, Vector7};
use crate::g2::G2Constants;

/// Zero test for restricted forms on orthonormal frames.
pub const CLASSIFY_TOL: f64 = 1e-9;

/// Default tolerance for construction preconditions and lemma checks.
pub const CHECK_TOL: f64 = 1e-9;

type V7 = Vector7<f64>;

fn g2() -> &'static G2Constants<f64> {
    G2Constants::shared()
}

/// An ordered tuple of vectors with its Gram matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    vectors: Vec<V7>,
    gram: Vec<Vec<f64>>,
}

impl Frame {
    pub fn new(vectors: Vec<V7>) -> Result<Self> {
        if vectors.is_empty() || vectors.len() > 7 {
            return Err(Error::FrameShape(vectors.len()));
        }
        if vectors.iter().any(|v| v.0.iter().any(|x| !x.is_finite())) {
            return Err(Error::NonFinite);
        }
        let gram = vectors
            .iter()
            .map(|a| vectors.iter().map(|b| a.dot(b)).collect())
            .collect();
        Ok(Frame { vectors, gram })
    }

    pub fn vectors(&self) -> &[V7] {
        &self.vectors
    }

    pub fn gram(&self) -> &[Vec<f64>] {
        &self.gram
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn gram_determinant(&self) -> f64 {
        gram_determinant(&self.vectors)
    }

    /// Gram determinant divided by the product of squared lengths; 1 for an
    /// orthogonal frame, 0 for a dependent one.
    pub fn independence(&self) -> f64 {
        let lengths: f64 = self.vectors.iter().map(|v| v.norm_sq()).product();
        if lengths == 0.0 {
            0.0
        } else {
            self.gram_determinant() / lengths
        }
    }

    /// `max |Gram - I|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, row) in self.gram.iter().enumerate() {
            for (j, g) in row.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g - target).abs());
            }
        }
        worst
    }

    pub fn is_orthonormal(&self, tol: f64) -> bool {
        self.orthonormality_defect() <= tol
    }

    pub fn volume(&self) -> f64 {
        self.gram_determinant().max(0.0).sqrt()
    }
}

/// Modified Gram-Schmidt in input order.
pub fn orthonormalize(frame: &Frame, tol: f64) -> Result<Frame> {
    if frame.independence() <= tol {
        return Err(Error::DegenerateFrame {
            gram_det: frame.gram_determinant(),
        });
    }
    let mut out: Vec<V7> = Vec::with_capacity(frame.len());
    for v in frame.vectors() {
        let mut w = *v;
        for q in &out {
            w = w - *q * q.dot(&w);
        }
        let n = w.norm();
        if n <= tol.sqrt() * v.norm() {
            return Err(Error::DegenerateFrame {
                gram_det: frame.gram_determinant(),
            });
        }
        out.push(w * (1.0 / n));
    }
    Frame::new(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PlaneKind {
    Associative,
    HarveyLawson,
    Generic3,
    Coassociative,
    RS,
    Generic4,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlaneClass {
    pub kind: PlaneKind,
    /// phi on the given 3-frame, or *phi on the given 4-frame.
    pub phi_value: f64,
    /// |chi| (3-planes) or |sigma| (4-planes) on the orthonormalized frame.
    pub chi_or_sigma_norm: f64,
    pub volume: f64,
    /// Sign of the calibration form on the orthonormalized frame (0 if it vanishes).
    pub orientation: i8,
    pub residuals: BTreeMap<String, f64>,
}

fn sign_of(x: f64) -> i8 {
    if x.abs() <= CLASSIFY_TOL {
        0
    } else if x > 0.0 {
        1
    } else {
        -1
    }
}

/// Classifies the plane spanned by a 3- or 4-frame.
pub fn classify_plane(frame: &Frame) -> Result<PlaneClass> {
    let g = g2();
    let n = frame.len();
    if n != 3 && n != 4 {
        return Err(Error::FrameShape(n));
    }
    let on = orthonormalize(frame, 1e-10)?;
    let q = on.vectors();
    let volume = frame.volume();
    let mut residuals = BTreeMap::new();
    if n == 3 {
        let p = g.phi.eval(q)?;
        let chi = g.chi(&q[0], &q[1], &q[2]).norm();
        residuals.insert("phi_restricted".into(), p.abs());
        residuals.insert("associator".into(), p * p + chi * chi - 1.0);
        let kind = if p.abs() <= CLASSIFY_TOL {
            PlaneKind::HarveyLawson
        } else if (p.abs() - 1.0).abs() <= CLASSIFY_TOL {
            PlaneKind::Associative
        } else {
            PlaneKind::Generic3
        };
        Ok(PlaneClass {
            kind,
            phi_value: g.phi.eval(frame.vectors())?,
            chi_or_sigma_norm: chi,
            volume,
            orientation: sign_of(p),
            residuals,
        })
    } else {
        let sp = g.star_phi.eval(q)?;
        let phi_max = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]]
            .iter()
            .map(|t| g.phi.eval(&[q[t[0]], q[t[1]], q[t[2]]]).map(f64::abs))
            .try_fold(0.0f64, |m, x| x.map(|x| m.max(x)))?;
        let sigma = g.sigma_table(&q[0], &q[1], &q[2], &q[3]).norm();
        residuals.insert("phi_restricted_max".into(), phi_max);
        residuals.insert("star_phi_restricted".into(), sp.abs());
        residuals.insert("coassociator".into(), sp * sp + sigma * sigma - 1.0);
        let kind = if phi_max <= CLASSIFY_TOL {
            PlaneKind::Coassociative
        } else if sp.abs() <= CLASSIFY_TOL {
            PlaneKind::RS
        } else {
            PlaneKind::Generic4
        };
        Ok(PlaneClass {
            kind,
            phi_value: g.star_phi.eval(frame.vectors())?,
            chi_or_sigma_norm: sigma,
            volume,
            orientation: sign_of(sp),
            residuals,
        })
    }
}

/// One property check with its measured residual.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub pass: bool,
}

impl Check {
    fn new(name: &str, residual: f64, tol: f64) -> Self {
        Check {
            name: name.to_string(),
            residual,
            pass: residual <= tol,
        }
    }
}

fn max_phi_on_triples(vs: &[V7]) -> f64 {
    let g = g2();
    let mut worst: f64 = 0.0;
    for i in 0..vs.len() {
        for j in i + 1..vs.len() {
            for k in j + 1..vs.len() {
                let p = g.phi.eval(&[vs[i], vs[j], vs[k]]).expect("degree 3");
                worst = worst.max(p.abs());
            }
        }
    }
    worst
}

fn max_cross_dot(a: &[V7], b: &[V7]) -> f64 {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| x.dot(y).abs()))
        .fold(0.0, f64::max)
}

fn require_orthonormal(vs: &[V7], tol: f64) -> Result<()> {
    let defect = Frame::new(vs.to_vec())?.orthonormality_defect();
    if defect > tol {
        Err(Error::NotOrthonormal(defect))
    } else {
        Ok(())
    }
}

/// The seven-vector completion `{u, v, w, R, u×v, v×w, w×u}` of an
/// orthonormal HL triple, with `R = chi(u, v, w)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HlCompletion {
    pub frame: [V7; 7],
    pub checks: Vec<Check>,
}

impl HlCompletion {
    pub fn tangent(&self) -> [V7; 3] {
        [self.frame[0], self.frame[1], self.frame[2]]
    }

    pub fn r(&self) -> V7 {
        self.frame[3]
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

pub fn hl_completion(u: &V7, v: &V7, w: &V7, tol: f64) -> Result<HlCompletion> {
    let g = g2();
    require_orthonormal(&[*u, *v, *w], tol)?;
    let p = g.phi.eval(&[*u, *v, *w])?;
    if p.abs() > tol {
        return Err(Error::NotHarveyLawson(p));
    }
    let r = g.chi(u, v, w);
    let uv = g.cross(u, v);
    let vw = g.cross(v, w);
    let wu = g.cross(w, u);
    let frame = [*u, *v, *w, r, uv, vw, wu];
    let big_v = [*u, *v, *w, r];
    let big_e = [uv, vw, wu];

    let r_alt = -g.cross(u, &g.cross(v, w));
    let assoc = (g.phi.eval(&big_e)?.abs() - 1.0).abs();
    let checks = vec![
        Check::new(
            "(a) <u,v,w,R> coassociative",
            max_phi_on_triples(&big_v),
            tol,
        ),
        Check::new("(b) <u×v,v×w,w×u> associative", assoc, tol),
        Check::new("(c) E orthogonal to V", max_cross_dot(&big_e, &big_v), tol),
        Check::new(
            "(d) seven vectors orthonormal",
            Frame::new(frame.to_vec())?.orthonormality_defect(),
            tol,
        ),
        Check::new("chi(u,v,w) = -u×(v×w)", (r - r_alt).max_abs(), tol),
    ];
    Ok(HlCompletion { frame, checks })
}

/// `S̃ = sigma(u, v, u×v, w)` and the seven-vector frame
/// `{u, v, u×v, S̃, u×S̃, v×S̃, (u×v)×S̃}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RsConstruction {
    pub s_tilde: V7,
    pub frame: [V7; 7],
    pub checks: Vec<Check>,
    /// `|S̃ + w|`, recorded as an observation.
    pub s_tilde_plus_w: f64,
    /// `|S̃ - w|`.
    pub s_tilde_minus_w: f64,
}

impl RsConstruction {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

pub fn rs_frame_construction(u: &V7, v: &V7, w: &V7, tol: f64) -> Result<RsConstruction> {
    let g = g2();
    require_orthonormal(&[*u, *v], tol)?;
    let uv = g.cross(u, v);
    let unit_defect = (w.norm_sq() - 1.0).abs();
    let orth = max_cross_dot(&[*w], &[*u, *v, uv]);
    if unit_defect > tol || orth > tol {
        return Err(Error::Precondition(format!(
            "w must be a unit vector orthogonal to u, v, u×v (|w|²-1 = {unit_defect:e}, max overlap {orth:e})"
        )));
    }
    let s = g.sigma_table(u, v, &uv, w);
    let us = g.cross(u, &s);
    let vs = g.cross(v, &s);
    let uvs = g.cross(&uv, &s);
    let frame = [*u, *v, uv, s, us, vs, uvs];
    let checks = vec![
        Check::new(
            "(a) <u,v,u×v,w> RS",
            g.star_phi.eval(&[*u, *v, uv, *w])?.abs(),
            tol,
        ),
        Check::new(
            "(b) <u,v,u×v,S̃> RS",
            g.star_phi.eval(&[*u, *v, uv, s])?.abs(),
            tol,
        ),
        Check::new(
            "(c) <S̃,u×S̃,v×S̃,(u×v)×S̃> coassociative",
            max_phi_on_triples(&[s, us, vs, uvs]),
            tol,
        ),
        Check::new(
            "(d) <u×S̃,v×S̃,(u×v)×S̃> HL",
            g.phi.eval(&[us, vs, uvs])?.abs(),
            tol,
        ),
        Check::new(
            "(e) seven vectors orthonormal",
            Frame::new(frame.to_vec())?.orthonormality_defect(),
            tol,
        ),
    ];
    Ok(RsConstruction {
        s_tilde: s,
        frame,
        checks,
        s_tilde_plus_w: (s + *w).norm(),
        s_tilde_minus_w: (s - *w).norm(),
    })
}

/// The splitting `N = Ñ ⊕ R` of an HL completion and the isometry
/// `X ↦ X × R` from the tangent 3-plane onto `Ñ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalTangentIdentification {
    pub r: V7,
    /// `[R, u×R, v×R, w×R]`.
    pub normal_frame: [V7; 4],
    pub checks: Vec<Check>,
}

impl NormalTangentIdentification {
    pub fn to_normal(&self, x: &V7) -> V7 {
        g2().cross(x, &self.r)
    }

    /// Inverse on `Ñ`: `R × N`.
    pub fn to_tangent(&self, n: &V7) -> V7 {
        g2().cross(&self.r, n)
    }
}

pub fn normal_tangent_identification(
    c: &HlCompletion,
    tol: f64,
) -> Result<NormalTangentIdentification> {
    if !c.all_pass() {
        return Err(Error::Precondition(
            "HL completion failed its checks".into(),
        ));
    }
    let g = g2();
    let [u, v, w] = c.tangent();
    let r = c.r();
    let images = [g.cross(&u, &r), g.cross(&v, &r), g.cross(&w, &r)];
    let span = [u, v, w, r];
    let image_frame = Frame::new(images.to_vec())?;
    let tangent_frame = Frame::new(vec![u, v, w])?;
    let isometry = image_frame
        .gram()
        .iter()
        .zip(tangent_frame.gram())
        .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
        .fold(0.0, f64::max);
    let checks = vec![
        Check::new(
            "Ñ orthogonal to <u,v,w,R>",
            max_cross_dot(&images, &span),
            tol,
        ),
        Check::new("X ↦ X×R isometric", isometry, tol),
        Check::new(
            "N frame orthonormal",
            Frame::new(vec![r, images[0], images[1], images[2]])?.orthonormality_defect(),
            tol,
        ),
    ];
    Ok(NormalTangentIdentification {
        r,
        normal_frame: [r, images[0], images[1], images[2]],
        checks,
    })
}

/// Tangent vector `Y` of an oriented orthonormal 4-frame `t` with
/// `*phi(V, a, b, c) = vol(Y, a, b, c)` for tangent `a, b, c`, built from
/// `<chi(a,b,c), V>`.
pub fn rs_normal_to_tangent(t: &[V7; 4], normal: &V7) -> V7 {
    let g = g2();
    let mut y = V7::zero();
    for i in 0..4 {
        let rest: Vec<V7> = (0..4).filter(|&j| j != i).map(|j| t[j]).collect();
        let c = g.chi(&rest[0], &rest[1], &rest[2]).dot(normal);
        let sign = if i % 2 == 0 { -1.0 } else { 1.0 };
        y = y + t[i] * (sign * c);
    }
    y
}

/// Analogue for an RS construction: the normal 3-plane maps isometrically
/// onto the part of the tangent 4-plane orthogonal to `S̃`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RsIdentification {
    pub tangent: [V7; 4],
    pub normal: [V7; 3],
    pub images: [V7; 3],
    pub checks: Vec<Check>,
    /// Largest tangential component of `S̃×u, S̃×v, S̃×w`.
    pub s_cross_tangential: f64,
}

pub fn rs_identification(c: &RsConstruction, w: &V7, tol: f64) -> Result<RsIdentification> {
    let g = g2();
    let [u, v, uv] = [c.frame[0], c.frame[1], c.frame[2]];
    let tangent = [u, v, uv, *w];
    let normal = [c.frame[4], c.frame[5], c.frame[6]];
    let images = normal.map(|n| rs_normal_to_tangent(&tangent, &n));
    let img_frame = Frame::new(images.to_vec())?;
    let tangential = |x: V7| tangent.iter().map(|t| t.dot(&x).abs()).fold(0.0, f64::max);
    let s = c.s_tilde;
    let s_cross_tangential = [g.cross(&s, &u), g.cross(&s, &v), g.cross(&s, w)]
        .into_iter()
        .map(tangential)
        .fold(0.0, f64::max);
    let normal_leak = images
        .iter()
        .map(|y| {
            let proj: V7 = tangent
                .iter()
                .fold(V7::zero(), |acc, t| acc + *t * t.dot(y));
            (*y - proj).norm()
        })
        .fold(0.0, f64::max);
    let checks = vec![
        Check::new("images tangent", normal_leak, tol),
        Check::new("images orthogonal to S̃", max_cross_dot(&images, &[s]), tol),
        Check::new("N → T isometric", img_frame.orthonormality_defect(), tol),
    ];
    Ok(RsIdentification {
        tangent,
        normal,
        images,
        checks,
        s_cross_tangential,
    })
}

/// Which displayed expansion of phi to assemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExpansionVariant {
    /// Built from `u, v, w, R` and `u×v, v×w, w×u`.
    HlCross,
    /// Built from `u, v, w, R` and `w×R, u×R, v×R`.
    HlR,
    /// Built from `u, v, u×v, S̃` and their cross products with `S̃`.
    RsS,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpansionTerm {
    pub label: String,
    pub sign: i8,
    pub form: KForm<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpansionReport {
    pub variant: ExpansionVariant,
    /// `|expansion - phi0|^2`.
    pub residual: f64,
    pub terms: Vec<ExpansionTerm>,
    pub difference: KForm<f64>,
}

fn one_form(v: &V7) -> KForm<f64> {
    let mut f = KForm::zero(1);
    for i in 1..=7u8 {
        let c = *v.get(i as usize);
        if c != 0.0 {
            f.add_term(crate::exterior::IndexTuple::new(&[i]).expect("valid"), c);
        }
    }
    f
}

fn triple(a: &V7, b: &V7, c: &V7) -> KForm<f64> {
    one_form(a).wedge(&one_form(b)).wedge(&one_form(c))
}

/// Assembles one of the displayed frame expansions of phi and measures its
/// distance from phi0. Nonzero residuals are findings, not errors.
pub fn frame_expansion_residual(
    frame: &[V7],
    variant: ExpansionVariant,
) -> Result<ExpansionReport> {
    let g = g2();
    if frame.len() != 7 {
        return Err(Error::FrameShape(frame.len()));
    }
    require_orthonormal(frame, CHECK_TOL)?;
    let x = |a: &V7, b: &V7| g.cross(a, b);
    let (a, b, c, d) = (frame[0], frame[1], frame[2], frame[3]);
    let spec: Vec<(&str, i8, [V7; 3])> = match variant {
        ExpansionVariant::HlCross | ExpansionVariant::HlR => {
            let (u, v, w, r) = (a, b, c, d);
            if g.phi.eval(&[u, v, w])?.abs() > CHECK_TOL
                || (g.chi(&u, &v, &w) - r).max_abs() > CHECK_TOL
            {
                return Err(Error::Precondition("frame is not an HL completion".into()));
            }
            if variant == ExpansionVariant::HlCross {
                vec![
                    ("u∧v∧(u×v)", 1, [u, v, x(&u, &v)]),
                    ("v∧w∧(v×w)", 1, [v, w, x(&v, &w)]),
                    ("w∧u∧(w×u)", 1, [w, u, x(&w, &u)]),
                    ("u∧R∧(v×w)", 1, [u, r, x(&v, &w)]),
                    ("v∧R∧(w×u)", 1, [v, r, x(&w, &u)]),
                    ("w∧R∧(u×v)", 1, [w, r, x(&u, &v)]),
                    ("(u×v)∧(v×w)∧(w×u)", -1, [x(&u, &v), x(&v, &w), x(&w, &u)]),
                ]
            } else {
                vec![
                    ("u∧v∧(w×R)", 1, [u, v, x(&w, &r)]),
                    ("v∧w∧(u×R)", 1, [v, w, x(&u, &r)]),
                    ("w∧u∧(v×R)", 1, [w, u, x(&v, &r)]),
                    ("u∧R∧(u×R)", 1, [u, r, x(&u, &r)]),
                    ("v∧R∧(v×R)", 1, [v, r, x(&v, &r)]),
                    ("w∧R∧(w×R)", 1, [w, r, x(&w, &r)]),
                    ("(w×R)∧(u×R)∧(v×R)", -1, [x(&w, &r), x(&u, &r), x(&v, &r)]),
                ]
            }
        }
        ExpansionVariant::RsS => {
            let (u, v, uv, s) = (a, b, c, d);
            if (x(&u, &v) - uv).max_abs() > CHECK_TOL {
                return Err(Error::Precondition(
                    "frame is not an RS construction".into(),
                ));
            }
            vec![
                ("u∧v∧((u×v)×S)", 1, [u, v, x(&uv, &s)]),
                ("v∧(u×v)∧(u×S)", 1, [v, uv, x(&u, &s)]),
                ("(u×v)∧u∧(v×S)", 1, [uv, u, x(&v, &s)]),
                ("u∧S∧(u×S)", 1, [u, s, x(&u, &s)]),
                ("v∧S∧(v×S)", 1, [v, s, x(&v, &s)]),
                ("(u×v)∧S∧((u×v)×S)", 1, [uv, s, x(&uv, &s)]),
                (
                    "((u×v)×S)∧(u×S)∧(v×S)",
                    -1,
                    [x(&uv, &s), x(&u, &s), x(&v, &s)],
                ),
            ]
        }
    };
    let mut total = KForm::zero(3);
    let mut terms = Vec::with_capacity(spec.len());
    for (label, sign, [p, q, r]) in spec {
        let form = triple(&p, &q, &r).scale(&(sign as f64));
        total = &total + &form;
        terms.push(ExpansionTerm {
            label: label.to_string(),
            sign,
            form: form.normalized(crate::Tolerance::default()),
        });
    }
    let difference = (&total - &g.phi).normalized(crate::Tolerance::default());
    Ok(ExpansionReport {
        variant,
        residual: difference.norm_sq(),
        terms,
        difference,
    })
}

pub fn random_unit<R: Rng + ?Sized>(rng: &mut R) -> V7 {
    loop {
        let v = Vector7(std::array::from_fn(|_| {
            rng.sample::<f64, _>(StandardNormal)
        }));
        let n = v.norm();
        if n > 1e-3 {
            return v * (1.0 / n);
        }
    }
}

fn unit_orthogonal_to<R: Rng + ?Sized>(rng: &mut R, basis: &[V7]) -> V7 {
    loop {
        let mut w = random_unit(rng);
        // two passes keep the projection accurate to rounding
        for _ in 0..2 {
            for b in basis {
                w = w - *b * b.dot(&w);
            }
        }
        let n = w.norm();
        if n > 1e-3 {
            return w * (1.0 / n);
        }
    }
}

/// Random orthonormal HL triple: `u, v` orthonormal, then `w` orthogonal to
/// `u, v, u×v`, which forces `phi(u, v, w) = <u×v, w> = 0`.
pub fn sample_hl_triple<R: Rng + ?Sized>(rng: &mut R) -> [V7; 3] {
    let u = random_unit(rng);
    let v = unit_orthogonal_to(rng, &[u]);
    let uv = g2().cross(&u, &v);
    let w = unit_orthogonal_to(rng, &[u, v, uv]);
    [u, v, w]
}

/// Random valid input for [`rs_frame_construction`]; same distribution as
/// [`sample_hl_triple`].
pub fn sample_rs_input<R: Rng + ?Sized>(rng: &mut R) -> [V7; 3] {
    sample_hl_triple(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn e(i: usize) -> V7 {
        V7::basis(i)
    }

    fn frame(vs: &[V7]) -> Frame {
        Frame::new(vs.to_vec()).unwrap()
    }

    #[test]
    fn classify_examples() {
        assert_eq!(
            classify_plane(&frame(&[e(1), e(2), e(3)])).unwrap().kind,
            PlaneKind::Associative
        );
        assert_eq!(
            classify_plane(&frame(&[e(4), e(5), e(6)])).unwrap().kind,
            PlaneKind::HarveyLawson
        );
        assert_eq!(
            classify_plane(&frame(&[e(1), e(2), e(3), e(4)]))
                .unwrap()
                .kind,
            PlaneKind::RS
        );
        assert_eq!(
            classify_plane(&frame(&[e(4), e(5), e(6), e(7)]))
                .unwrap()
                .kind,
            PlaneKind::Coassociative
        );
        let generic = frame(&[e(1), e(2), e(4) + e(3)]);
        assert_eq!(classify_plane(&generic).unwrap().kind, PlaneKind::Generic3);
    }

    #[test]
    fn associative_phi_value_tracks_volume() {
        let c = classify_plane(&frame(&[e(1) * 2.0, e(2) * 3.0, e(3)])).unwrap();
        assert_eq!(c.kind, PlaneKind::Associative);
        assert!((c.phi_value.abs() - c.volume).abs() < 1e-12);
        assert_eq!(c.orientation, 1);
        let flipped = classify_plane(&frame(&[e(2), e(1), e(3)])).unwrap();
        assert_eq!(flipped.orientation, -1);
    }

    #[test]
    fn classify_rejects_degenerate_and_wrong_length() {
        assert!(matches!(
            classify_plane(&frame(&[e(1), e(1), e(2)])),
            Err(Error::DegenerateFrame { .. })
        ));
        assert_eq!(
            classify_plane(&frame(&[e(1), e(2)])),
            Err(Error::FrameShape(2))
        );
    }

    #[test]
    fn orthonormalize_examples() {
        let f = orthonormalize(&frame(&[e(1) * 2.0, e(2)]), 1e-10).unwrap();
        assert_eq!(f.vectors(), &[e(1), e(2)]);
        let f = orthonormalize(&frame(&[e(1), e(1) + e(2)]), 1e-10).unwrap();
        assert_eq!(f.vectors(), &[e(1), e(2)]);
        assert!(orthonormalize(&frame(&[e(1), e(1)]), 1e-10).is_err());
    }

    #[test]
    fn hl_completion_of_coordinate_triple() {
        let c = hl_completion(&e(4), &e(5), &e(6), CHECK_TOL).unwrap();
        assert_eq!(c.r(), e(7));
        assert_eq!(&c.frame[4..], &[e(1), -e(3), -e(2)]);
        assert!(c.all_pass(), "{:?}", c.checks);
        let g = g2();
        assert_eq!(-g.cross(&e(4), &g.cross(&e(5), &e(6))), e(7));
    }

    #[test]
    fn hl_completion_rejects_associative_and_non_orthonormal() {
        assert!(matches!(
            hl_completion(&e(1), &e(2), &e(3), CHECK_TOL),
            Err(Error::NotHarveyLawson(p)) if p == 1.0
        ));
        assert!(matches!(
            hl_completion(&(e(4) * 2.0), &e(5), &e(6), CHECK_TOL),
            Err(Error::NotOrthonormal(_))
        ));
    }

    #[test]
    fn rs_construction_worked_example() {
        let c = rs_frame_construction(&e(1), &e(2), &e(4), CHECK_TOL).unwrap();
        assert_eq!(c.s_tilde, -e(4));
        assert_eq!(&c.frame[4..], &[-e(5), -e(6), e(7)]);
        assert!(c.all_pass(), "{:?}", c.checks);
        let coass =
            classify_plane(&frame(&[c.frame[3], c.frame[4], c.frame[5], c.frame[6]])).unwrap();
        assert_eq!(coass.kind, PlaneKind::Coassociative);
        let hl = classify_plane(&frame(&[c.frame[4], c.frame[5], c.frame[6]])).unwrap();
        assert_eq!(hl.kind, PlaneKind::HarveyLawson);
    }

    #[test]
    fn rs_construction_rejects_bad_w() {
        assert!(matches!(
            rs_frame_construction(&e(1), &e(2), &e(1), CHECK_TOL),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            rs_frame_construction(&e(1), &(e(1) + e(2)), &e(4), CHECK_TOL),
            Err(Error::NotOrthonormal(_))
        ));
    }

    #[test]
    fn normal_identification_coordinate_example() {
        let c = hl_completion(&e(4), &e(5), &e(6), CHECK_TOL).unwrap();
        let id = normal_tangent_identification(&c, CHECK_TOL).unwrap();
        assert_eq!(id.normal_frame, [e(7), -e(3), -e(2), e(1)]);
        assert!(id.checks.iter().all(|c| c.pass));
        assert_eq!(id.to_tangent(&e(1)), e(6));
        assert_eq!(id.to_normal(&e(6)), e(1));
    }

    #[test]
    fn identification_is_isometric_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let c = hl_completion(&e(4), &e(5), &e(6), CHECK_TOL).unwrap();
        let id = normal_tangent_identification(&c, CHECK_TOL).unwrap();
        for _ in 0..100 {
            let a: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
            let b: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
            let x = e(4) * a[0] + e(5) * a[1] + e(6) * a[2];
            let y = e(4) * b[0] + e(5) * b[1] + e(6) * b[2];
            let lhs = id.to_normal(&x).dot(&id.to_normal(&y));
            assert!((lhs - x.dot(&y)).abs() < 1e-12);
        }
    }

    #[test]
    fn rs_identification_worked_example() {
        let c = rs_frame_construction(&e(1), &e(2), &e(4), CHECK_TOL).unwrap();
        let id = rs_identification(&c, &e(4), CHECK_TOL).unwrap();
        assert!(id.checks.iter().all(|c| c.pass), "{:?}", id.checks);
        // S̃×u, S̃×v, S̃×w are normal, not tangent
        assert_eq!(id.s_cross_tangential, 0.0);
        assert_eq!(
            rs_normal_to_tangent(&[e(1), e(2), e(3), e(4)], &e(5)),
            -e(1)
        );
    }

    #[test]
    fn expansions_on_coordinate_frames() {
        let c = hl_completion(&e(4), &e(5), &e(6), CHECK_TOL).unwrap();
        for v in [ExpansionVariant::HlCross, ExpansionVariant::HlR] {
            let rep = frame_expansion_residual(&c.frame, v).unwrap();
            assert_eq!(rep.residual, 0.0, "{v:?}");
            assert_eq!(rep.terms.len(), 7);
        }
        let rs = rs_frame_construction(&e(1), &e(2), &e(4), CHECK_TOL).unwrap();
        let rep = frame_expansion_residual(&rs.frame, ExpansionVariant::RsS).unwrap();
        // measured, not assumed: the printed RS expansion misses phi0
        assert_eq!(rep.residual, 8.0);
    }

    #[test]
    fn expansion_rejects_mismatched_frames() {
        let rs = rs_frame_construction(&e(1), &e(2), &e(4), CHECK_TOL).unwrap();
        assert!(matches!(
            frame_expansion_residual(&rs.frame, ExpansionVariant::HlCross),
            Err(Error::Precondition(_))
        ));
        let c = hl_completion(&e(4), &e(5), &e(6), CHECK_TOL).unwrap();
        assert!(matches!(
            frame_expansion_residual(&c.frame, ExpansionVariant::RsS),
            Err(Error::Precondition(_))
        ));
        assert_eq!(
            frame_expansion_residual(&c.frame[..6], ExpansionVariant::HlR).unwrap_err(),
            Error::FrameShape(6)
        );
    }

    #[test]
    fn sampled_hl_triples_satisfy_lemma() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let [u, v, w] = sample_hl_triple(&mut rng);
            let c = hl_completion(&u, &v, &w, CHECK_TOL).unwrap();
            assert!(c.all_pass(), "{:?}", c.checks);
        }
    }
}
