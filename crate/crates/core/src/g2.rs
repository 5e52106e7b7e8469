//! The flat G2 structure on R^7: the calibration 3-form, its dual 4-form,
//! the cross product and the vector-valued forms chi, psi and sigma.
//!
//! chi and psi are computed from their defining identities
//! `<chi(u,v,w), z> = *phi(u,v,w,z)` and `<psi(u,v), w> = phi(u,v,w)`.
//! sigma has two evaluations: the four-term formula and the coordinate
//! table shipped in `fixtures/sigma.json`; the table is the default.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exterior::{gram_determinant, JsonScalar, KForm, Vector7};
use crate::fixtures;
use crate::scalar::{ratio, rational_to_string, Rational, Scalar};

/// `e^123 + e^145 + e^167 + e^246 - e^257 - e^347 - e^356`.
pub const PHI0_TERMS: [(&str, i64); 7] = [
    ("123", 1),
    ("145", 1),
    ("167", 1),
    ("246", 1),
    ("257", -1),
    ("347", -1),
    ("356", -1),
];

/// `e^4567 + e^2367 + e^2345 + e^1357 - e^1346 - e^1256 - e^1247`.
pub const STAR_PHI0_TERMS: [(&str, i64); 7] = [
    ("4567", 1),
    ("2367", 1),
    ("2345", 1),
    ("1357", 1),
    ("1346", -1),
    ("1256", -1),
    ("1247", -1),
];

/// Which evaluation of the coassociator to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SigmaSource {
    Formula,
    #[default]
    Table,
}

/// Seven k-forms, component `i` paired with `e_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentValuedForm<S> {
    degree: usize,
    components: Vec<KForm<S>>,
}

impl<S: Scalar> TangentValuedForm<S> {
    pub fn new(components: Vec<KForm<S>>) -> Result<Self> {
        if components.len() != 7 {
            return Err(Error::Parse(format!(
                "expected 7 components, got {}",
                components.len()
            )));
        }
        let degree = components[0].degree();
        if let Some(bad) = components.iter().find(|c| c.degree() != degree) {
            return Err(Error::DegreeMismatch {
                expected: degree,
                actual: bad.degree(),
            });
        }
        Ok(TangentValuedForm { degree, components })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn components(&self) -> &[KForm<S>] {
        &self.components
    }

    pub fn eval(&self, vs: &[Vector7<S>]) -> Result<Vector7<S>> {
        let mut out = Vector7::zero();
        for (slot, c) in out.0.iter_mut().zip(&self.components) {
            *slot = c.eval(vs)?;
        }
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
struct TvfRepr<T> {
    degree: usize,
    components: Vec<T>,
}

impl<S: JsonScalar> Serialize for TangentValuedForm<S> {
    fn serialize<Ser: Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        TvfRepr {
            degree: self.degree,
            components: self.components.iter().collect(),
        }
        .serialize(s)
    }
}

impl<'de, S: JsonScalar> Deserialize<'de> for TangentValuedForm<S> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr: TvfRepr<KForm<S>> = TvfRepr::deserialize(d)?;
        let out = TangentValuedForm::new(repr.components).map_err(D::Error::custom)?;
        if out.degree != repr.degree {
            return Err(D::Error::custom("component degree disagrees with header"));
        }
        Ok(out)
    }
}

/// phi0 and *phi0 together with the printed sigma table.
#[derive(Debug, Clone)]
pub struct G2Constants<S> {
    pub phi: KForm<S>,
    pub star_phi: KForm<S>,
    sigma: TangentValuedForm<S>,
}

impl<S: JsonScalar> G2Constants<S> {
    pub fn new() -> Self {
        G2Constants {
            phi: KForm::from_int_terms(3, &PHI0_TERMS).expect("phi0 terms"),
            star_phi: KForm::from_int_terms(4, &STAR_PHI0_TERMS).expect("*phi0 terms"),
            sigma: fixtures::load(fixtures::SIGMA_JSON).expect("embedded sigma table"),
        }
    }
}

impl<S: JsonScalar> Default for G2Constants<S> {
    fn default() -> Self {
        Self::new()
    }
}

impl G2Constants<f64> {
    /// Process-wide floating constants.
    pub fn shared() -> &'static G2Constants<f64> {
        static CONSTANTS: OnceLock<G2Constants<f64>> = OnceLock::new();
        CONSTANTS.get_or_init(G2Constants::new)
    }
}

impl<S: Scalar> G2Constants<S> {
    pub fn sigma_tvf(&self) -> &TangentValuedForm<S> {
        &self.sigma
    }

    /// The vector `u x v` with `<u x v, w> = phi(u, v, w)`.
    pub fn cross(&self, u: &Vector7<S>, v: &Vector7<S>) -> Vector7<S> {
        contract_to_vector(&self.phi, &[u, v])
    }

    /// `<chi(u,v,w), z> = *phi(u,v,w,z)`.
    pub fn chi(&self, u: &Vector7<S>, v: &Vector7<S>, w: &Vector7<S>) -> Vector7<S> {
        contract_to_vector(&self.star_phi, &[u, v, w])
    }

    /// `<psi(u,v), w> = phi(u,v,w)`; identical to the cross product.
    pub fn psi(&self, u: &Vector7<S>, v: &Vector7<S>) -> Vector7<S> {
        contract_to_vector(&self.phi, &[u, v])
    }

    /// `<v, w x z> u + <w, u x z> v + <u, v x z> w + <v, u x w> z`, evaluated
    /// exactly as written.
    pub fn sigma_formula(
        &self,
        u: &Vector7<S>,
        v: &Vector7<S>,
        w: &Vector7<S>,
        z: &Vector7<S>,
    ) -> Vector7<S> {
        let a = v.dot(&self.cross(w, z));
        let b = w.dot(&self.cross(u, z));
        let c = u.dot(&self.cross(v, z));
        let d = v.dot(&self.cross(u, w));
        u.scale(&a) + v.scale(&b) + w.scale(&c) + z.scale(&d)
    }

    /// Evaluates the printed coordinate table.
    pub fn sigma_table(
        &self,
        u: &Vector7<S>,
        v: &Vector7<S>,
        w: &Vector7<S>,
        z: &Vector7<S>,
    ) -> Vector7<S> {
        self.sigma
            .eval(&[u.clone(), v.clone(), w.clone(), z.clone()])
            .expect("sigma table has degree 4")
    }

    pub fn sigma(
        &self,
        source: SigmaSource,
        u: &Vector7<S>,
        v: &Vector7<S>,
        w: &Vector7<S>,
        z: &Vector7<S>,
    ) -> Vector7<S> {
        match source {
            SigmaSource::Formula => self.sigma_formula(u, v, w, z),
            SigmaSource::Table => self.sigma_table(u, v, w, z),
        }
    }

    /// `phi(u,v,w)^2 + c |chi(u,v,w)|^2 - |u ∧ v ∧ w|^2`.
    pub fn associator_residual(&self, u: &Vector7<S>, v: &Vector7<S>, w: &Vector7<S>, c: &S) -> S {
        let p = self
            .phi
            .eval(&[u.clone(), v.clone(), w.clone()])
            .expect("degree 3");
        let x = self.chi(u, v, w);
        p.clone() * p + c.clone() * x.norm_sq()
            - gram_determinant(&[u.clone(), v.clone(), w.clone()])
    }

    /// `*phi(u,v,w,z)^2 + c |sigma(u,v,w,z)|^2 - |u ∧ v ∧ w ∧ z|^2`.
    pub fn coassociator_residual(&self, args: [&Vector7<S>; 4], c: &S, source: SigmaSource) -> S {
        let [u, v, w, z] = args;
        let tuple = [u.clone(), v.clone(), w.clone(), z.clone()];
        let p = self.star_phi.eval(&tuple).expect("degree 4");
        let s = self.sigma(source, u, v, w, z);
        p.clone() * p + c.clone() * s.norm_sq() - gram_determinant(&tuple)
    }
}

/// Vector with components `form(args..., e_i)`.
fn contract_to_vector<S: Scalar>(form: &KForm<S>, args: &[&Vector7<S>]) -> Vector7<S> {
    let mut f = form.clone();
    for a in args {
        f = f.interior_product(a).expect("positive degree");
    }
    debug_assert_eq!(f.degree(), 1);
    let mut out = Vector7::zero();
    for (t, c) in f.terms() {
        let i = t.iter().next().expect("degree one") as usize;
        out.0[i - 1] = c.clone();
    }
    out
}

/// The HL normalization constant as printed next to the associator and
/// coassociator equalities.
pub fn printed_constant() -> Rational {
    ratio(1, 4)
}

/// Outcome of solving `lhs + c * rhs = vol^2` for `c` over basis tuples.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantCalibration {
    pub identity: String,
    pub tuples: usize,
    /// Distinct values of `(vol^2 - form^2) / |vector|^2` over tuples where the
    /// vector part is nonzero.
    pub candidates: Vec<Rational>,
    /// Whether tuples with vanishing vector part satisfy `form^2 = vol^2`.
    pub degenerate_tuples_consistent: bool,
    /// Single constant when all candidates agree.
    pub constant: Option<Rational>,
    pub printed: Rational,
}

impl Serialize for ConstantCalibration {
    fn serialize<Ser: Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            identity: &'a str,
            tuples: usize,
            candidates: Vec<String>,
            degenerate_tuples_consistent: bool,
            constant: Option<String>,
            printed: String,
            printed_matches: bool,
        }
        Repr {
            identity: &self.identity,
            tuples: self.tuples,
            candidates: self.candidates.iter().map(rational_to_string).collect(),
            degenerate_tuples_consistent: self.degenerate_tuples_consistent,
            constant: self.constant.as_ref().map(rational_to_string),
            printed: rational_to_string(&self.printed),
            printed_matches: self.constant.as_ref() == Some(&self.printed),
        }
        .serialize(s)
    }
}

fn calibrate(
    identity: &str,
    samples: impl Iterator<Item = (Rational, Rational, Rational)>,
) -> ConstantCalibration {
    let mut candidates = BTreeSet::new();
    let mut consistent = true;
    let mut tuples = 0;
    for (form_sq, vec_sq, vol_sq) in samples {
        tuples += 1;
        if num_traits::Zero::is_zero(&vec_sq) {
            consistent &= form_sq == vol_sq;
        } else {
            candidates.insert((vol_sq - form_sq) / vec_sq);
        }
    }
    let candidates: Vec<Rational> = candidates.into_iter().collect();
    let constant = (candidates.len() == 1 && consistent).then(|| candidates[0].clone());
    ConstantCalibration {
        identity: identity.to_string(),
        tuples,
        candidates,
        degenerate_tuples_consistent: consistent,
        constant,
        printed: printed_constant(),
    }
}

fn basis(i: usize) -> Vector7<Rational> {
    Vector7::basis(i)
}

/// Finds the constant in `phi^2 + c |chi|^2 = |u∧v∧w|^2` over all basis triples.
pub fn calibrate_associator(g2: &G2Constants<Rational>) -> ConstantCalibration {
    calibrate(
        "associator",
        basis_combinations(7, 3).into_iter().map(|t| {
            let vs: Vec<_> = t.iter().map(|&i| basis(i)).collect();
            let p = g2.phi.eval(&vs).expect("degree 3");
            let x = g2.chi(&vs[0], &vs[1], &vs[2]);
            (p.clone() * p, x.norm_sq(), gram_determinant(&vs))
        }),
    )
}

/// Finds the constant in `*phi^2 + c |sigma|^2 = |u∧v∧w∧z|^2` over all basis
/// quadruples.
pub fn calibrate_coassociator(
    g2: &G2Constants<Rational>,
    source: SigmaSource,
) -> ConstantCalibration {
    let name = match source {
        SigmaSource::Formula => "coassociator (sigma formula)",
        SigmaSource::Table => "coassociator (sigma table)",
    };
    calibrate(
        name,
        basis_combinations(7, 4).into_iter().map(|t| {
            let vs: Vec<_> = t.iter().map(|&i| basis(i)).collect();
            let p = g2.star_phi.eval(&vs).expect("degree 4");
            let s = g2.sigma(source, &vs[0], &vs[1], &vs[2], &vs[3]);
            (p.clone() * p, s.norm_sq(), gram_determinant(&vs))
        }),
    )
}

/// One basis tuple on which two evaluations disagree.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableMismatch {
    pub args: Vec<usize>,
    pub reference: Vec<String>,
    pub table: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableComparison {
    pub name: String,
    pub tuples_checked: usize,
    pub mismatches: Vec<TableMismatch>,
}

impl TableComparison {
    pub fn agrees(&self) -> bool {
        self.mismatches.is_empty()
    }
}

fn vec_strings(v: &Vector7<Rational>) -> Vec<String> {
    v.0.iter().map(rational_to_string).collect()
}

fn compare_on<F, G>(name: &str, tuples: Vec<Vec<usize>>, reference: F, table: G) -> TableComparison
where
    F: Fn(&[Vector7<Rational>]) -> Vector7<Rational>,
    G: Fn(&[Vector7<Rational>]) -> Vector7<Rational>,
{
    let mut mismatches = Vec::new();
    let n = tuples.len();
    for t in tuples {
        let vs: Vec<_> = t.iter().map(|&i| basis(i)).collect();
        let a = reference(&vs);
        let b = table(&vs);
        if a != b {
            mismatches.push(TableMismatch {
                args: t,
                reference: vec_strings(&a),
                table: vec_strings(&b),
            });
        }
    }
    TableComparison {
        name: name.to_string(),
        tuples_checked: n,
        mismatches,
    }
}

/// Identity-based chi against a printed chi table on all 35 basis triples.
pub fn compare_chi_table(
    g2: &G2Constants<Rational>,
    table: &TangentValuedForm<Rational>,
) -> TableComparison {
    compare_on(
        "chi identity vs table",
        basis_combinations(7, 3),
        |vs| g2.chi(&vs[0], &vs[1], &vs[2]),
        |vs| table.eval(vs).expect("degree 3"),
    )
}

/// Cross product against a printed psi table on all 21 basis pairs.
pub fn compare_psi_table(
    g2: &G2Constants<Rational>,
    table: &TangentValuedForm<Rational>,
) -> TableComparison {
    compare_on(
        "psi identity vs table",
        basis_combinations(7, 2),
        |vs| g2.cross(&vs[0], &vs[1]),
        |vs| table.eval(vs).expect("degree 2"),
    )
}

/// sigma formula against the sigma table on every ordered basis 4-tuple
/// (repeats included), which also decides whether the formula alternates.
pub fn compare_sigma(g2: &G2Constants<Rational>) -> TableComparison {
    let mut tuples = Vec::with_capacity(7usize.pow(4));
    for a in 1..=7 {
        for b in 1..=7 {
            for c in 1..=7 {
                for d in 1..=7 {
                    tuples.push(vec![a, b, c, d]);
                }
            }
        }
    }
    compare_on(
        "sigma formula vs table",
        tuples,
        |vs| g2.sigma_formula(&vs[0], &vs[1], &vs[2], &vs[3]),
        |vs| g2.sigma_table(&vs[0], &vs[1], &vs[2], &vs[3]),
    )
}

/// Checks `<chi(e_a,e_b,e_c), e_d> = *phi(e_a,e_b,e_c,e_d)` for a table over
/// all ordered basis 4-tuples; returns the failing tuples.
pub fn chi_table_identity_failures(
    g2: &G2Constants<Rational>,
    table: &TangentValuedForm<Rational>,
) -> Vec<Vec<usize>> {
    let mut bad = Vec::new();
    for t in basis_combinations(7, 3) {
        let vs: Vec<_> = t.iter().map(|&i| basis(i)).collect();
        let x = table.eval(&vs).expect("degree 3");
        for d in 1..=7 {
            let mut all = vs.clone();
            all.push(basis(d));
            if x.get(d) != &g2.star_phi.eval(&all).expect("degree 4") {
                let mut tuple = t.clone();
                tuple.push(d);
                bad.push(tuple);
            }
        }
    }
    bad
}

/// All strictly increasing `k`-subsets of `1..=n`.
pub fn basis_combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..=n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(1, n, k, &mut Vec::new(), &mut out);
    out
}
