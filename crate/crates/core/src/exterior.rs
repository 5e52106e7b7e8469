//! Exterior algebra on R^7 with an orthonormal coframe `e^1..e^7`.
//!
//! Forms are sparse maps from strictly increasing index tuples to
//! coefficients. Index tuples are stored as bitmasks, so sign bookkeeping for
//! wedge, Hodge star and contraction reduces to counting inversions between
//! two masks. The orientation is `e^{1234567}`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::scalar::{determinant, parse_rational, rational_to_string, Rational, Scalar, Tolerance};

pub const DIM: usize = 7;

/// A strictly increasing tuple of indices in `1..=7`, stored as a bitmask
/// (bit `i` set means index `i` present).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct IndexTuple(u8);

impl IndexTuple {
    pub const EMPTY: IndexTuple = IndexTuple(0);

    /// Builds a tuple from indices that must already be strictly increasing.
    pub fn new(indices: &[u8]) -> Result<Self> {
        let mut mask = 0u8;
        let mut last = 0u8;
        for &i in indices {
            if !(1..=7).contains(&i) {
                return Err(Error::IndexOutOfRange(i));
            }
            if i <= last {
                return Err(Error::UnsortedIndices(indices.to_vec()));
            }
            last = i;
            mask |= 1 << i;
        }
        Ok(IndexTuple(mask))
    }

    /// Sorts arbitrary indices, returning the tuple and the permutation sign,
    /// or `None` when an index repeats.
    pub fn sorted(indices: &[u8]) -> Result<Option<(Self, i32)>> {
        let mut mask = 0u8;
        let mut sign = 1;
        for (pos, &i) in indices.iter().enumerate() {
            if !(1..=7).contains(&i) {
                return Err(Error::IndexOutOfRange(i));
            }
            if mask & (1 << i) != 0 {
                return Ok(None);
            }
            // every earlier index larger than i is one inversion
            let larger = indices[..pos].iter().filter(|&&j| j > i).count();
            if larger % 2 == 1 {
                sign = -sign;
            }
            mask |= 1 << i;
        }
        Ok(Some((IndexTuple(mask), sign)))
    }

    pub fn from_mask(mask: u8) -> Self {
        IndexTuple(mask & 0b1111_1110)
    }

    pub fn mask(self) -> u8 {
        self.0
    }

    pub fn degree(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, i: u8) -> bool {
        (1..=7).contains(&i) && self.0 & (1 << i) != 0
    }

    pub fn iter(self) -> impl Iterator<Item = u8> {
        (1u8..=7).filter(move |&i| self.0 & (1 << i) != 0)
    }

    pub fn indices(self) -> Vec<u8> {
        self.iter().collect()
    }

    /// Complement inside `1..=n`.
    pub fn complement_in(self, n: usize) -> Self {
        let full: u8 = ((1u16 << (n + 1)) - 2) as u8;
        IndexTuple(full & !self.0)
    }

    pub fn complement(self) -> Self {
        self.complement_in(DIM)
    }

    pub fn is_disjoint(self, other: Self) -> bool {
        self.0 & other.0 == 0
    }

    pub fn union(self, other: Self) -> Self {
        IndexTuple(self.0 | other.0)
    }

    pub fn without(self, i: u8) -> Self {
        IndexTuple(self.0 & !(1 << i))
    }

    /// All tuples of length `k` drawn from `1..=n`, in lexicographic order.
    pub fn all_of_degree(n: usize, k: usize) -> Vec<Self> {
        let mut out: Vec<Self> = (0u16..(1 << (n + 1)))
            .step_by(2)
            .map(|m| IndexTuple(m as u8))
            .filter(|t| t.degree() == k)
            .collect();
        out.sort();
        out
    }
}

/// Parity of the merge of two disjoint tuples: `(-1)^{#(a in A, b in B, a > b)}`.
pub fn merge_sign(a: IndexTuple, b: IndexTuple) -> i32 {
    let mut inversions = 0u32;
    for j in b.iter() {
        inversions += ((a.0 as u16) >> (j + 1)).count_ones();
    }
    if inversions.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

impl Ord for IndexTuple {
    fn cmp(&self, other: &Self) -> Ordering {
        self.iter().cmp(other.iter())
    }
}

impl PartialOrd for IndexTuple {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for IndexTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e^{{{self}}}")
    }
}

impl fmt::Display for IndexTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in self.iter() {
            write!(f, "{i}")?;
        }
        Ok(())
    }
}

/// A vector of R^7 in the frame `e_1..e_7`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vector7<S>(pub [S; 7]);

impl<S: Scalar> Vector7<S> {
    pub fn new(components: [S; 7]) -> Self {
        Vector7(components)
    }

    pub fn zero() -> Self {
        Vector7(std::array::from_fn(|_| S::zero()))
    }

    /// `e_i` for `i` in `1..=7`.
    pub fn basis(i: usize) -> Self {
        assert!((1..=7).contains(&i), "basis index {i} out of range");
        let mut v = Self::zero();
        v.0[i - 1] = S::one();
        v
    }

    /// Rejects non-finite components.
    pub fn try_from_slice(xs: &[S]) -> Result<Self> {
        if xs.len() != DIM {
            return Err(Error::Parse(format!(
                "expected 7 components, got {}",
                xs.len()
            )));
        }
        if xs.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Vector7(std::array::from_fn(|i| xs[i].clone())))
    }

    pub fn components(&self) -> &[S; 7] {
        &self.0
    }

    /// Component along `e_i`, 1-based.
    pub fn get(&self, i: usize) -> &S {
        &self.0[i - 1]
    }

    pub fn dot(&self, other: &Self) -> S {
        self.0
            .iter()
            .zip(other.0.iter())
            .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
    }

    pub fn norm_sq(&self) -> S {
        self.dot(self)
    }

    pub fn scale(&self, c: &S) -> Self {
        Vector7(std::array::from_fn(|i| self.0[i].clone() * c.clone()))
    }

    pub fn is_negligible(&self, tol: Tolerance) -> bool {
        self.0.iter().all(|x| x.is_negligible(tol))
    }

    pub fn to_f64(&self) -> Vector7<f64> {
        Vector7(std::array::from_fn(|i| self.0[i].to_f64()))
    }

    pub fn from_f64(v: &Vector7<f64>) -> Option<Self> {
        let mut out = Self::zero();
        for (slot, x) in out.0.iter_mut().zip(v.0.iter()) {
            *slot = S::from_f64(*x)?;
        }
        Some(out)
    }

    pub fn from_i64(xs: [i64; 7]) -> Self {
        Vector7(std::array::from_fn(|i| S::from_i64(xs[i])))
    }
}

impl Vector7<f64> {
    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn normalized(&self) -> Self {
        *self * (1.0 / self.norm())
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

impl<S: Scalar> Index<usize> for Vector7<S> {
    type Output = S;
    fn index(&self, i: usize) -> &S {
        &self.0[i]
    }
}

impl<S: Scalar> Add for Vector7<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let Vector7(a) = self;
        let Vector7(b) = rhs;
        let mut out = a;
        for (x, y) in out.iter_mut().zip(b) {
            *x = x.clone() + y;
        }
        Vector7(out)
    }
}

impl<S: Scalar> Sub for Vector7<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<S: Scalar> Neg for Vector7<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Vector7(self.0.map(|x| -x))
    }
}

impl<S: Scalar> Mul<S> for Vector7<S> {
    type Output = Self;
    fn mul(self, c: S) -> Self {
        Vector7(self.0.map(|x| x * c.clone()))
    }
}

/// An alternating k-form on R^7. Absent keys are zero coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct KForm<S> {
    degree: usize,
    coeffs: BTreeMap<IndexTuple, S>,
}

impl<S: Scalar> KForm<S> {
    pub fn zero(degree: usize) -> Self {
        KForm {
            degree,
            coeffs: BTreeMap::new(),
        }
    }

    /// The constant 0-form `c`.
    pub fn constant(c: S) -> Self {
        let mut f = Self::zero(0);
        f.add_term(IndexTuple::EMPTY, c);
        f
    }

    /// `e^{i_1 ... i_k}` for strictly increasing indices.
    pub fn basis(indices: &[u8]) -> Result<Self> {
        let t = IndexTuple::new(indices)?;
        let mut f = Self::zero(t.degree());
        f.add_term(t, S::one());
        Ok(f)
    }

    /// Builds a form from `(indices, coefficient)` terms in any index order;
    /// signs are normalized on insertion and repeated indices drop the term.
    pub fn from_terms<I>(degree: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u8>, S)>,
    {
        let mut f = Self::zero(degree);
        for (idx, c) in terms {
            if idx.len() != degree {
                return Err(Error::DegreeMismatch {
                    expected: degree,
                    actual: idx.len(),
                });
            }
            if let Some((t, sign)) = IndexTuple::sorted(&idx)? {
                f.add_term(t, if sign > 0 { c } else { -c });
            }
        }
        Ok(f)
    }

    /// Convenience for integer coefficients and index strings like `"257"`.
    pub fn from_int_terms(degree: usize, terms: &[(&str, i64)]) -> Result<Self> {
        Self::from_terms(
            degree,
            terms.iter().map(|(s, c)| {
                (
                    s.bytes().map(|b| b.wrapping_sub(b'0')).collect::<Vec<u8>>(),
                    S::from_i64(*c),
                )
            }),
        )
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, t: IndexTuple) -> S {
        self.coeffs.get(&t).cloned().unwrap_or_else(S::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (IndexTuple, &S)> {
        self.coeffs.iter().map(|(k, v)| (*k, v))
    }

    /// Adds `c` to the coefficient of `t`. Exact zeros are never stored.
    pub fn add_term(&mut self, t: IndexTuple, c: S) {
        debug_assert_eq!(t.degree(), self.degree);
        let updated = match self.coeffs.remove(&t) {
            Some(old) => old + c,
            None => c,
        };
        if !updated.is_zero() {
            self.coeffs.insert(t, updated);
        }
    }

    /// Drops coefficients that are negligible at `tol`.
    pub fn normalized(&self, tol: Tolerance) -> Self {
        KForm {
            degree: self.degree,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(_, c)| !c.is_negligible(tol))
                .map(|(k, c)| (*k, c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut out = Self::zero(self.degree);
        for (k, v) in &self.coeffs {
            out.add_term(*k, v.clone() * c.clone());
        }
        out
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch {
                expected: self.degree,
                actual: other.degree,
            });
        }
        let mut out = self.clone();
        for (k, v) in &other.coeffs {
            out.add_term(*k, v.clone());
        }
        Ok(out)
    }

    pub fn wedge(&self, other: &Self) -> Self {
        let degree = self.degree + other.degree;
        let mut out = Self::zero(degree);
        if degree > DIM {
            return out;
        }
        for (a, ca) in &self.coeffs {
            for (b, cb) in &other.coeffs {
                if !a.is_disjoint(*b) {
                    continue;
                }
                let c = ca.clone() * cb.clone();
                let c = if merge_sign(*a, *b) > 0 { c } else { -c };
                out.add_term(a.union(*b), c);
            }
        }
        out
    }

    /// Euclidean Hodge star for the orientation `e^{1234567}`.
    pub fn hodge_star(&self) -> Self {
        let mut out = Self::zero(DIM - self.degree);
        for (t, c) in &self.coeffs {
            let comp = t.complement();
            let c = c.clone();
            out.add_term(comp, if merge_sign(*t, comp) > 0 { c } else { -c });
        }
        out
    }

    /// Contraction `i_v` in the first slot.
    pub fn interior_product(&self, v: &Vector7<S>) -> Result<Self> {
        if self.degree == 0 {
            return Err(Error::ContractZeroForm);
        }
        let mut out = Self::zero(self.degree - 1);
        for (t, c) in &self.coeffs {
            for (pos, i) in t.iter().enumerate() {
                let vi = v.get(i as usize);
                if vi.is_zero() {
                    continue;
                }
                let term = c.clone() * vi.clone();
                out.add_term(t.without(i), if pos % 2 == 0 { term } else { -term });
            }
        }
        Ok(out)
    }

    /// Evaluates the form on `degree` vectors via the determinant expansion.
    pub fn eval(&self, vs: &[Vector7<S>]) -> Result<S> {
        if vs.len() != self.degree {
            return Err(Error::ArityMismatch {
                degree: self.degree,
                given: vs.len(),
            });
        }
        let mut total = S::zero();
        for (t, c) in &self.coeffs {
            let idx = t.indices();
            let m: Vec<Vec<S>> = vs
                .iter()
                .map(|v| idx.iter().map(|&i| v.get(i as usize).clone()).collect())
                .collect();
            total = total + c.clone() * determinant(m);
        }
        Ok(total)
    }

    /// Inner product in which the `e^I` are orthonormal.
    pub fn inner(&self, other: &Self) -> Result<S> {
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch {
                expected: self.degree,
                actual: other.degree,
            });
        }
        Ok(self
            .coeffs
            .iter()
            .filter_map(|(k, a)| other.coeffs.get(k).map(|b| a.clone() * b.clone()))
            .fold(S::zero(), |acc, x| acc + x))
    }

    pub fn norm_sq(&self) -> S {
        self.coeffs
            .values()
            .fold(S::zero(), |acc, c| acc + c.clone() * c.clone())
    }

    pub fn to_f64(&self) -> KForm<f64> {
        let mut out = KForm::zero(self.degree);
        for (k, c) in &self.coeffs {
            out.add_term(*k, c.to_f64());
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs
            .values()
            .fold(0.0, |m, c| m.max(c.to_f64().abs()))
    }
}

impl<S: Scalar> Add for &KForm<S> {
    type Output = KForm<S>;
    fn add(self, rhs: Self) -> KForm<S> {
        self.try_add(rhs).expect("adding forms of different degree")
    }
}

impl<S: Scalar> Sub for &KForm<S> {
    type Output = KForm<S>;
    fn sub(self, rhs: Self) -> KForm<S> {
        self.try_add(&(-rhs))
            .expect("subtracting forms of different degree")
    }
}

impl<S: Scalar> Neg for &KForm<S> {
    type Output = KForm<S>;
    fn neg(self) -> KForm<S> {
        self.scale(&-S::one())
    }
}

/// Evaluates an alternating form on vectors; free-function spelling of
/// [`KForm::eval`].
pub fn eval_on_vectors<S: Scalar>(form: &KForm<S>, vs: &[Vector7<S>]) -> Result<S> {
    form.eval(vs)
}

/// Gram determinant of the tuple, i.e. `|v_1 ∧ ... ∧ v_k|^2`.
pub fn gram_determinant<S: Scalar>(vs: &[Vector7<S>]) -> S {
    let m: Vec<Vec<S>> = vs
        .iter()
        .map(|a| vs.iter().map(|b| a.dot(b)).collect())
        .collect();
    determinant(m)
}

/// `|v_1 ∧ ... ∧ v_k|`, clamped at zero against rounding.
pub fn simple_volume(vs: &[Vector7<f64>]) -> f64 {
    gram_determinant(vs).max(0.0).sqrt()
}

/// Coefficient types with a JSON representation: floats as numbers,
/// rationals as `"p/q"` strings.
pub trait JsonScalar: Scalar {
    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Option<Self>;
}

impl JsonScalar for f64 {
    fn to_json(&self) -> Value {
        Value::from(*self)
    }

    fn from_json(v: &Value) -> Option<Self> {
        match v {
            Value::Number(n) => n.as_f64(),
            Value::String(s) => parse_rational(s).map(|r| r.to_f64()),
            _ => None,
        }
    }
}

impl JsonScalar for Rational {
    fn to_json(&self) -> Value {
        Value::String(rational_to_string(self))
    }

    fn from_json(v: &Value) -> Option<Self> {
        match v {
            Value::String(s) => parse_rational(s),
            Value::Number(n) => match n.as_i64() {
                Some(i) => Some(<Rational as Scalar>::from_i64(i)),
                None => n.as_f64().and_then(Rational::from_float),
            },
            _ => None,
        }
    }
}

impl<S: JsonScalar> Serialize for Vector7<S> {
    fn serialize<Ser: Serializer>(
        &self,
        serializer: Ser,
    ) -> std::result::Result<Ser::Ok, Ser::Error> {
        self.0
            .iter()
            .map(JsonScalar::to_json)
            .collect::<Vec<_>>()
            .serialize(serializer)
    }
}

impl<'de, S: JsonScalar> Deserialize<'de> for Vector7<S> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<Value>::deserialize(deserializer)?;
        let xs = raw
            .iter()
            .map(|v| S::from_json(v).ok_or_else(|| D::Error::custom(format!("bad component {v}"))))
            .collect::<std::result::Result<Vec<S>, _>>()?;
        Vector7::try_from_slice(&xs).map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    idx: Vec<u8>,
    c: Value,
}

#[derive(Serialize, Deserialize)]
struct KFormRepr {
    degree: usize,
    terms: Vec<TermRepr>,
}

impl<S: JsonScalar> Serialize for KForm<S> {
    fn serialize<Ser: Serializer>(
        &self,
        serializer: Ser,
    ) -> std::result::Result<Ser::Ok, Ser::Error> {
        KFormRepr {
            degree: self.degree,
            terms: self
                .coeffs
                .iter()
                .map(|(k, c)| TermRepr {
                    idx: k.indices(),
                    c: c.to_json(),
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de, S: JsonScalar> Deserialize<'de> for KForm<S> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = KFormRepr::deserialize(deserializer)?;
        let mut terms = Vec::with_capacity(repr.terms.len());
        for t in repr.terms {
            let c = S::from_json(&t.c)
                .ok_or_else(|| D::Error::custom(format!("bad coefficient {}", t.c)))?;
            terms.push((t.idx, c));
        }
        KForm::from_terms(repr.degree, terms).map_err(D::Error::custom)
    }
}

impl<S: Scalar + fmt::Display> fmt::Display for KForm<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (n, (k, c)) in self.coeffs.iter().enumerate() {
            let negative = c.to_f64() < 0.0;
            let mag = c.abs();
            let sep = match (n, negative) {
                (0, false) => "",
                (0, true) => "-",
                (_, false) => " + ",
                (_, true) => " - ",
            };
            if mag.is_one() {
                write!(f, "{sep}e^{k}")?;
            } else {
                write!(f, "{sep}{mag}e^{k}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;
    use num_traits::{One, Zero};

    type Q = Rational;

    fn e(idx: &str) -> KForm<Q> {
        KForm::from_int_terms(idx.len(), &[(idx, 1)]).unwrap()
    }

    #[test]
    fn wedge_examples() {
        assert_eq!(e("12").wedge(&e("3")), e("123"));
        assert_eq!(e("13").wedge(&e("2")), -&e("123"));
        assert!(e("1").wedge(&e("1")).is_zero());
        // degree overflow gives the zero form of that degree
        let big = e("1234").wedge(&e("4567"));
        assert!(big.is_zero());
        assert_eq!(big.degree(), 8);
    }

    #[test]
    fn hodge_examples() {
        assert_eq!(e("123").hodge_star(), e("4567"));
        assert_eq!(e("4567").hodge_star(), e("123"));
        assert_eq!(KForm::<Q>::constant(Q::one()).hodge_star(), e("1234567"));
    }

    #[test]
    fn interior_examples() {
        let e1 = Vector7::<Q>::basis(1);
        let e2 = Vector7::<Q>::basis(2);
        assert_eq!(e("123").interior_product(&e1).unwrap(), e("23"));
        assert_eq!(e("123").interior_product(&e2).unwrap(), -&e("13"));
        assert_eq!(
            KForm::<Q>::constant(Q::one()).interior_product(&e1),
            Err(Error::ContractZeroForm)
        );
    }

    #[test]
    fn eval_arity_and_antisymmetry() {
        let f = e("12");
        let (e1, e2) = (Vector7::<Q>::basis(1), Vector7::<Q>::basis(2));
        assert_eq!(f.eval(&[e1.clone(), e2.clone()]).unwrap(), Q::one());
        assert_eq!(f.eval(&[e2.clone(), e1.clone()]).unwrap(), -Q::one());
        assert_eq!(
            f.eval(&[e1]),
            Err(Error::ArityMismatch {
                degree: 2,
                given: 1
            })
        );
    }

    #[test]
    fn inner_product_examples() {
        assert_eq!(e("12").inner(&e("12")).unwrap(), Q::one());
        assert_eq!(e("12").inner(&e("13")).unwrap(), Q::zero());
        assert!(matches!(
            e("12").inner(&e("123")),
            Err(Error::DegreeMismatch { .. })
        ));
    }

    #[test]
    fn gram_examples() {
        let b = |i| Vector7::<Q>::basis(i);
        assert_eq!(gram_determinant(&[b(1), b(2), b(3)]), Q::one());
        assert_eq!(gram_determinant(&[b(1), b(1)]), Q::zero());
        let two_e1 = b(1).scale(&ratio(2, 1));
        assert_eq!(gram_determinant(&[two_e1, b(2)]), ratio(4, 1));
        assert_eq!(
            simple_volume(&[Vector7::basis(1) * 2.0, Vector7::basis(2)]),
            2.0
        );
    }

    #[test]
    fn index_tuple_validation() {
        assert!(IndexTuple::new(&[1, 3, 2]).is_err());
        assert!(IndexTuple::new(&[0]).is_err());
        assert!(IndexTuple::new(&[8]).is_err());
        assert_eq!(IndexTuple::sorted(&[1, 1]).unwrap(), None);
        let (t, s) = IndexTuple::sorted(&[3, 1, 2]).unwrap().unwrap();
        assert_eq!(t.indices(), vec![1, 2, 3]);
        assert_eq!(s, 1);
        assert_eq!(IndexTuple::all_of_degree(7, 3).len(), 35);
        assert_eq!(IndexTuple::all_of_degree(4, 2).len(), 6);
        let all: usize = (0..=7).map(|k| IndexTuple::all_of_degree(7, k).len()).sum();
        assert_eq!(all, 128);
    }

    #[test]
    fn non_finite_vectors_rejected() {
        let mut xs = [0.0; 7];
        xs[3] = f64::NAN;
        assert_eq!(Vector7::try_from_slice(&xs), Err(Error::NonFinite));
    }

    #[test]
    fn json_shape() {
        let f: KForm<Q> = KForm::from_terms(
            2,
            vec![(vec![1, 2], ratio(1, 2)), (vec![3, 4], ratio(-2, 1))],
        )
        .unwrap();
        let js = serde_json::to_value(&f).unwrap();
        assert_eq!(
            js,
            serde_json::json!({"degree": 2, "terms": [{"idx": [1, 2], "c": "1/2"}, {"idx": [3, 4], "c": "-2"}]})
        );
        let back: KForm<Q> = serde_json::from_value(js).unwrap();
        assert_eq!(back, f);
        let fl: KForm<f64> =
            serde_json::from_str(r#"{"degree":1,"terms":[{"idx":[5],"c":"3/4"}]}"#).unwrap();
        assert_eq!(fl.coeff(IndexTuple::new(&[5]).unwrap()), 0.75);
        assert!(serde_json::from_str::<KForm<f64>>(
            r#"{"degree":1,"terms":[{"idx":[5,6],"c":1}]}"#
        )
        .is_err());
    }

    #[test]
    fn display_is_readable() {
        let f: KForm<Q> = KForm::from_int_terms(3, &[("123", 1), ("257", -1), ("145", 2)]).unwrap();
        assert_eq!(f.to_string(), "e^123 + 2e^145 - e^257");
    }
}
