//! The flat 7-torus with constant `φ₀`, and the Calabi–Yau × S¹ product
//! structure `ReΩ + ω∧dt` on `ℝ⁶ × ℝ`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{IndexTuple, KForm, Vector7};
use crate::g2::G2Constants;
use crate::lab::grid::Grid;
use crate::scalar::determinant;

/// Flat torus `ℝ⁷ / (period·ℤ)⁷` with the constant G2 structure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlatModel {
    pub period: f64,
}

pub fn build_flat_model(period: f64) -> Result<FlatModel> {
    if !(period > 0.0 && period.is_finite()) {
        return Err(Error::InvalidPeriod(period));
    }
    Ok(FlatModel { period })
}

impl Default for FlatModel {
    fn default() -> Self {
        FlatModel {
            period: std::f64::consts::TAU,
        }
    }
}

impl FlatModel {
    pub fn constants(&self) -> &'static G2Constants<f64> {
        G2Constants::shared()
    }

    pub fn phi(&self) -> &'static KForm<f64> {
        &self.constants().phi
    }

    pub fn star_phi(&self) -> &'static KForm<f64> {
        &self.constants().star_phi
    }

    /// Largest discrete partial derivative of any coefficient of `φ` or
    /// `⋆φ` sampled (as constant fields) on a `dim`-dimensional grid.
    pub fn closedness_defect(&self, dim: usize, resolution: usize) -> Result<f64> {
        let grid = Grid::new(dim, resolution, self.period)?;
        let mut worst: f64 = 0.0;
        for (_, c) in self.phi().terms().chain(self.star_phi().terms()) {
            let field = vec![*c; grid.len()];
            for a in 0..dim {
                let d = grid.central_difference(&field, a);
                worst = d.iter().fold(worst, |m, x| m.max(x.abs()));
            }
        }
        Ok(worst)
    }
}

/// Kähler form and holomorphic volume form of a Calabi–Yau 3-fold, on
/// ambient axes 1..6.
#[derive(Debug, Clone, PartialEq)]
pub struct CyData {
    pub omega: KForm<f64>,
    pub re_omega: KForm<f64>,
    pub im_omega: KForm<f64>,
}

/// Flat `ℂ³` with `z_k = x_{2k-1} + i x_{2k}`: `ω = dx¹² + dx³⁴ + dx⁵⁶`,
/// `Ω = dz₁∧dz₂∧dz₃`.
pub fn standard_cy() -> CyData {
    let f = |terms: &[(&str, i64)], k| KForm::from_int_terms(k, terms).expect("static terms");
    CyData {
        omega: f(&[("12", 1), ("34", 1), ("56", 1)], 2),
        re_omega: f(&[("135", 1), ("146", -1), ("236", -1), ("245", -1)], 3),
        im_omega: f(&[("136", 1), ("145", 1), ("235", 1), ("246", -1)], 3),
    }
}

fn check_axes(form: &KForm<f64>) -> Result<()> {
    if form.terms().any(|(t, _)| t.contains(7)) {
        return Err(Error::TouchesCircleAxis);
    }
    Ok(())
}

fn dt() -> KForm<f64> {
    KForm::basis(&[7]).expect("e7")
}

/// `ReΩ + ω∧dt`, with the circle factor on axis 7.
pub fn cy_product_form(omega: &KForm<f64>, re_omega: &KForm<f64>) -> Result<KForm<f64>> {
    check_axes(omega)?;
    check_axes(re_omega)?;
    re_omega.try_add(&omega.wedge(&dt()))
}

/// The companion 4-form `−dt∧ImΩ + ½ ω∧ω`.
pub fn cy_product_star(omega: &KForm<f64>, im_omega: &KForm<f64>) -> Result<KForm<f64>> {
    check_axes(omega)?;
    check_axes(im_omega)?;
    let a = dt().wedge(im_omega).scale(&-1.0);
    a.try_add(&omega.wedge(omega).scale(&0.5))
}

/// Axis relabeling `e_i ↦ signs[i]·e_{image[i]}` (1-based images).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SignedRelabeling {
    pub image: [u8; 7],
    pub signs: [i8; 7],
}

impl SignedRelabeling {
    pub fn identity() -> Self {
        SignedRelabeling {
            image: [1, 2, 3, 4, 5, 6, 7],
            signs: [1; 7],
        }
    }

    pub fn apply_vector(&self, v: &Vector7<f64>) -> Vector7<f64> {
        let mut out = [0.0; 7];
        for i in 0..7 {
            out[(self.image[i] - 1) as usize] = self.signs[i] as f64 * v.0[i];
        }
        Vector7(out)
    }

    /// Pushforward of a form along the relabeling.
    pub fn apply(&self, form: &KForm<f64>) -> KForm<f64> {
        let mut out = KForm::zero(form.degree());
        for (t, c) in form.terms() {
            let (key, sign) = self.map_key(t);
            out.add_term(key, sign as f64 * c);
        }
        out
    }

    fn map_key(&self, t: IndexTuple) -> (IndexTuple, i32) {
        let mapped: Vec<u8> = t.iter().map(|i| self.image[(i - 1) as usize]).collect();
        let sign: i32 = t
            .iter()
            .map(|i| self.signs[(i - 1) as usize] as i32)
            .product();
        let (key, perm) = IndexTuple::sorted(&mapped)
            .expect("indices in range")
            .expect("permutation has no repeats");
        (key, sign * perm)
    }
}

impl std::fmt::Display for SignedRelabeling {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = (0..7)
            .map(|i| {
                let s = if self.signs[i] < 0 { "-" } else { "" };
                format!("e{}->{}e{}", i + 1, s, self.image[i])
            })
            .collect();
        write!(f, "{}", parts.join(", "))
    }
}

fn next_permutation(p: &mut [u8]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len())
        .rev()
        .find(|&j| p[j] > p[i - 1])
        .expect("successor");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// All signed axis permutations carrying `from` exactly onto `to`, in
/// lexicographic order of the permutation, then of the sign pattern.
pub fn find_relabelings(from: &KForm<f64>, to: &KForm<f64>) -> Vec<SignedRelabeling> {
    let mut found = Vec::new();
    if from.degree() != to.degree() || from.len() != to.len() {
        return found;
    }
    let mut perm = [1u8, 2, 3, 4, 5, 6, 7];
    loop {
        let unsigned = SignedRelabeling {
            image: perm,
            signs: [1; 7],
        };
        let keys_match = from.terms().all(|(t, _)| {
            let (k, _) = unsigned.map_key(t);
            to.coeff(k) != 0.0
        });
        if keys_match {
            for mask in 0u8..128 {
                let signs: [i8; 7] =
                    std::array::from_fn(|i| if mask >> i & 1 == 1 { -1 } else { 1 });
                let r = SignedRelabeling { image: perm, signs };
                if r.apply(from) == *to {
                    found.push(r);
                }
            }
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    found
}

/// `B_ij = [(i_{e_i}φ)∧(i_{e_j}φ)∧φ]_{1..7} / 6`; a 3-form is a G2 form
/// (positive, up to orientation) exactly when this matrix is definite.
pub fn g2_metric_matrix(phi: &KForm<f64>) -> Result<Vec<Vec<f64>>> {
    if phi.degree() != 3 {
        return Err(Error::DegreeMismatch {
            expected: 3,
            actual: phi.degree(),
        });
    }
    let contractions: Vec<KForm<f64>> = (1..=7)
        .map(|i| phi.interior_product(&Vector7::basis(i)))
        .collect::<Result<_>>()?;
    let top = IndexTuple::new(&[1, 2, 3, 4, 5, 6, 7])?;
    Ok((0..7)
        .map(|i| {
            (0..7)
                .map(|j| {
                    contractions[i]
                        .wedge(&contractions[j])
                        .wedge(phi)
                        .coeff(top)
                        / 6.0
                })
                .collect()
        })
        .collect())
}

/// Sylvester's criterion on `B` or `−B`.
pub fn is_definite(m: &[Vec<f64>]) -> bool {
    let minors: Vec<f64> = (1..=m.len())
        .map(|k| determinant(m[..k].iter().map(|r| r[..k].to_vec()).collect()))
        .collect();
    let pos = minors.iter().all(|&d| d > 1e-12);
    let neg = minors
        .iter()
        .enumerate()
        .all(|(k, &d)| if k % 2 == 0 { d < -1e-12 } else { d > 1e-12 });
    pos || neg
}

/// The product structure built from CY data, with its comparison to `φ₀`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CyProduct {
    #[serde(skip)]
    pub phi: KForm<f64>,
    #[serde(skip)]
    pub star_phi: KForm<f64>,
    /// Whether `phi` is a nondegenerate G2 3-form.
    pub valid: bool,
    /// A signed relabeling carrying `phi` onto `φ₀`: the standard one when it
    /// works, otherwise the first found.
    pub relabeling: Option<SignedRelabeling>,
    pub relabelings_found: usize,
    /// Whether that relabeling also carries the companion 4-form onto `⋆φ₀`.
    pub star_matches: bool,
    pub phi_display: String,
    pub star_phi_display: String,
}

pub fn cy_product(data: &CyData) -> Result<CyProduct> {
    let phi = cy_product_form(&data.omega, &data.re_omega)?;
    let star_phi = cy_product_star(&data.omega, &data.im_omega)?;
    let valid = is_definite(&g2_metric_matrix(&phi)?);
    let g2 = G2Constants::shared();
    let all = find_relabelings(&phi, &g2.phi);
    // prefer the relabeling the CY-adapted immersions are placed with
    let relabeling = all
        .iter()
        .find(|r| **r == standard_relabeling())
        .or(all.first())
        .copied();
    let star_matches = relabeling.is_some_and(|r| r.apply(&star_phi) == g2.star_phi);
    Ok(CyProduct {
        phi_display: phi.to_string(),
        star_phi_display: star_phi.to_string(),
        phi,
        star_phi,
        valid,
        relabeling,
        relabelings_found: all.len(),
        star_matches,
    })
}

/// The relabeling used to place CY-adapted submanifolds in `φ₀` coordinates:
/// `t ↦ e₁`, `x_k ↦ e_{k+1}`.
pub fn standard_relabeling() -> SignedRelabeling {
    SignedRelabeling {
        image: [2, 3, 4, 5, 6, 7, 1],
        signs: [1; 7],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_model_period() {
        assert!(build_flat_model(std::f64::consts::TAU).is_ok());
        assert!(build_flat_model(1.0).is_ok());
        assert_eq!(build_flat_model(0.0), Err(Error::InvalidPeriod(0.0)));
        let m = build_flat_model(1.0).unwrap();
        assert_eq!(m.closedness_defect(3, 8).unwrap(), 0.0);
    }

    #[test]
    fn standard_cy_matches_phi0() {
        let p = cy_product(&standard_cy()).unwrap();
        assert!(p.valid);
        assert!(p.star_matches);
        assert_eq!(
            p.relabeling.unwrap().apply(&p.phi),
            G2Constants::shared().phi
        );
        assert_eq!(
            standard_relabeling().apply(&p.phi),
            G2Constants::shared().phi
        );
        // the automorphisms of phi0 among signed permutations act simply
        // transitively on the matches
        assert!(p.relabelings_found >= 1);
    }

    #[test]
    fn phi0_is_definite_and_degenerate_forms_are_not() {
        assert!(is_definite(
            &g2_metric_matrix(&G2Constants::shared().phi).unwrap()
        ));
        let cy = standard_cy();
        let zero = KForm::zero(3);
        let no_omega = cy_product_form(&cy.omega, &zero).unwrap();
        assert!(!is_definite(&g2_metric_matrix(&no_omega).unwrap()));
        let only_re = cy_product_form(&KForm::zero(2), &cy.re_omega).unwrap();
        assert_eq!(only_re, cy.re_omega);
    }

    #[test]
    fn circle_axis_rejected() {
        let bad = KForm::basis(&[1, 7]).unwrap();
        assert_eq!(
            cy_product_form(&bad, &standard_cy().re_omega),
            Err(Error::TouchesCircleAxis)
        );
    }
}
