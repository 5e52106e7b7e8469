//! Coefficient arithmetic shared by every form and vector.
//!
//! Two backends implement [`Scalar`]: `f64` for the sampled deformation work
//! and [`Rational`] (arbitrary precision) for exact identity checks.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub type Rational = BigRational;

/// Absolute tolerance used by the floating backend. Exact scalars ignore it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance(pub f64);

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance(1e-10)
    }
}

impl Tolerance {
    pub const EXACT: Tolerance = Tolerance(0.0);
}

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// True for backends with closed, rounding-free arithmetic.
    const EXACT: bool;

    fn from_i64(n: i64) -> Self;

    /// Exact conversion for rationals (binary expansion), identity for floats.
    /// `None` for non-finite input.
    fn from_f64(x: f64) -> Option<Self>;

    fn to_f64(&self) -> f64;

    fn abs(&self) -> Self;

    fn is_finite(&self) -> bool;

    /// Zero test. Exact backends compare with zero; floating backends use `tol`.
    fn is_negligible(&self, tol: Tolerance) -> bool;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_i64(n: i64) -> Self {
        n as f64
    }

    fn from_f64(x: f64) -> Option<Self> {
        x.is_finite().then_some(x)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }

    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }

    fn is_negligible(&self, tol: Tolerance) -> bool {
        f64::abs(*self) <= tol.0
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_i64(n: i64) -> Self {
        Rational::from_integer(BigInt::from(n))
    }

    fn from_f64(x: f64) -> Option<Self> {
        Rational::from_float(x)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }

    fn is_finite(&self) -> bool {
        true
    }

    fn is_negligible(&self, _tol: Tolerance) -> bool {
        self.is_zero()
    }
}

/// `n / d` as an exact rational.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Renders a rational as `"p/q"` (or `"p"` for integers).
pub fn rational_to_string(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rational::new(n, d))
            }
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

/// Determinant of a square matrix by Gaussian elimination.
///
/// Pivots on the entry of largest magnitude, which is partial pivoting for
/// floats and merely picks a nonzero pivot for rationals.
pub fn determinant<S: Scalar>(mut m: Vec<Vec<S>>) -> S {
    let n = m.len();
    let mut det = S::one();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| {
                m[a][col]
                    .to_f64()
                    .abs()
                    .partial_cmp(&m[b][col].to_f64().abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap_or(col);
        if m[pivot][col].is_zero() {
            return S::zero();
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        let p = m[col][col].clone();
        det = det * p.clone();
        for row in col + 1..n {
            if m[row][col].is_zero() {
                continue;
            }
            let factor = m[row][col].clone() / p.clone();
            let pivot = m[col].clone();
            for (x, y) in m[row].iter_mut().zip(pivot).skip(col) {
                *x = x.clone() - factor.clone() * y;
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_parse_and_print() {
        let r = parse_rational("-3/6").unwrap();
        assert_eq!(r, ratio(-1, 2));
        assert_eq!(rational_to_string(&r), "-1/2");
        assert_eq!(rational_to_string(&ratio(4, 2)), "2");
        assert!(parse_rational("1/0").is_none());
        assert!(parse_rational("x").is_none());
    }

    #[test]
    fn determinant_matches_hand_values() {
        let m = vec![vec![2.0, 0.0], vec![0.0, 3.0]];
        assert_eq!(determinant(m), 6.0);
        let m = vec![
            vec![ratio(0, 1), ratio(1, 1)],
            vec![ratio(1, 1), ratio(0, 1)],
        ];
        assert_eq!(determinant(m), ratio(-1, 1));
        let singular = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert_eq!(determinant(singular), 0.0);
    }

    #[test]
    fn tolerance_is_explicit() {
        assert!(1e-12f64.is_negligible(Tolerance::default()));
        assert!(!1e-12f64.is_negligible(Tolerance::EXACT));
        assert!(!ratio(1, 1_000_000_000).is_negligible(Tolerance(1.0)));
    }
}
