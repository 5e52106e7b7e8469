//! Periodic parameter grids, sampled forms on them, and the discrete
//! operators (central-difference exterior derivative, induced Hodge star).

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exterior::{merge_sign, IndexTuple, KForm};
use crate::scalar::determinant;

/// A uniform periodic grid on `[0, period)^dim`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Grid {
    pub dim: usize,
    pub resolution: usize,
    pub period: f64,
}

impl Grid {
    pub fn new(dim: usize, resolution: usize, period: f64) -> Result<Self> {
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::InvalidPeriod(period));
        }
        if resolution < 8 {
            return Err(Error::ResolutionTooSmall(resolution));
        }
        if !(1..=7).contains(&dim) {
            return Err(Error::Precondition(format!("grid dimension {dim}")));
        }
        Ok(Grid {
            dim,
            resolution,
            period,
        })
    }

    pub fn spacing(&self) -> f64 {
        self.period / self.resolution as f64
    }

    pub fn len(&self) -> usize {
        self.resolution.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Multi-index of a flat index; axis 0 varies slowest.
    pub fn multi_index(&self, mut p: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim];
        for slot in idx.iter_mut().rev() {
            *slot = p % self.resolution;
            p /= self.resolution;
        }
        idx
    }

    /// Parameter coordinates of a grid point.
    pub fn coords(&self, p: usize) -> Vec<f64> {
        let h = self.spacing();
        self.multi_index(p)
            .into_iter()
            .map(|i| i as f64 * h)
            .collect()
    }

    fn stride(&self, axis: usize) -> usize {
        self.resolution.pow((self.dim - 1 - axis) as u32)
    }

    /// Neighbor one step along `axis` (`forward` or backward), and the
    /// winding number picked up by wrapping around.
    pub fn neighbor(&self, p: usize, axis: usize, forward: bool) -> (usize, i32) {
        let stride = self.stride(axis);
        let i = (p / stride) % self.resolution;
        let n = self.resolution;
        if forward {
            if i + 1 == n {
                (p - i * stride, 1)
            } else {
                (p + stride, 0)
            }
        } else if i == 0 {
            (p + (n - 1) * stride, -1)
        } else {
            (p - stride, 0)
        }
    }

    /// Central difference of a periodic scalar field along `axis`.
    pub fn central_difference(&self, values: &[f64], axis: usize) -> Vec<f64> {
        let inv = 1.0 / (2.0 * self.spacing());
        (0..self.len())
            .map(|p| {
                let (f, _) = self.neighbor(p, axis, true);
                let (b, _) = self.neighbor(p, axis, false);
                (values[f] - values[b]) * inv
            })
            .collect()
    }
}

/// A k-form on the parameter grid stored densely: for each point, the
/// coefficients on the lexicographically ordered keys `dθ^I`, where `I`
/// ranges over k-subsets of `1..=dim` (parameter axes, 1-based).
#[derive(Debug, Clone, PartialEq)]
pub struct SampledForm {
    pub grid: Grid,
    pub degree: usize,
    keys: Vec<IndexTuple>,
    values: Vec<f64>,
}

impl SampledForm {
    pub fn zeros(grid: &Grid, degree: usize) -> Result<Self> {
        if degree > grid.dim {
            return Err(Error::DegreeMismatch {
                expected: grid.dim,
                actual: degree,
            });
        }
        let keys = IndexTuple::all_of_degree(grid.dim, degree);
        let values = vec![0.0; keys.len() * grid.len()];
        Ok(SampledForm {
            grid: grid.clone(),
            degree,
            keys,
            values,
        })
    }

    /// Builds a sampled form from a per-point coefficient function.
    pub fn from_fn<F>(grid: &Grid, degree: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(usize, &[IndexTuple]) -> Vec<f64>,
    {
        let mut out = Self::zeros(grid, degree)?;
        let nk = out.keys.len();
        for p in 0..grid.len() {
            let row = f(p, &out.keys);
            debug_assert_eq!(row.len(), nk);
            out.values[p * nk..(p + 1) * nk].copy_from_slice(&row);
        }
        Ok(out)
    }

    pub fn keys(&self) -> &[IndexTuple] {
        &self.keys
    }

    pub fn n_keys(&self) -> usize {
        self.keys.len()
    }

    pub fn value(&self, p: usize, key: usize) -> f64 {
        self.values[p * self.keys.len() + key]
    }

    pub fn row(&self, p: usize) -> &[f64] {
        let nk = self.keys.len();
        &self.values[p * nk..(p + 1) * nk]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Coefficient of `key` as a scalar field over the grid.
    pub fn component(&self, key: usize) -> Vec<f64> {
        (0..self.grid.len()).map(|p| self.value(p, key)).collect()
    }

    /// The form at one point as a sparse [`KForm`] over parameter indices.
    pub fn at(&self, p: usize) -> KForm<f64> {
        let mut f = KForm::zero(self.degree);
        for (k, t) in self.keys.iter().enumerate() {
            f.add_term(*t, self.value(p, k));
        }
        f
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.degree != other.degree || self.grid != other.grid {
            return Err(Error::DegreeMismatch {
                expected: self.degree,
                actual: other.degree,
            });
        }
        Ok(())
    }

    /// `max |self - other|` over points and components.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (x, y) in out.values.iter_mut().zip(&other.values) {
            *x = a * *x + b * y;
        }
        Ok(out)
    }

    pub fn scaled(&self, a: f64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|x| *x *= a);
        out
    }
}

impl Serialize for SampledForm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            degree: usize,
            resolution: usize,
            dim: usize,
            keys: Vec<Vec<u8>>,
            values: Vec<&'a [f64]>,
        }
        Repr {
            degree: self.degree,
            resolution: self.grid.resolution,
            dim: self.grid.dim,
            keys: self.keys.iter().map(|k| k.indices()).collect(),
            values: (0..self.grid.len()).map(|p| self.row(p)).collect(),
        }
        .serialize(s)
    }
}

/// Central-difference exterior derivative on the periodic grid, applied
/// coefficient-wise. Commutes with itself, so `d ∘ d = 0` exactly.
pub fn exterior_derivative(form: &SampledForm) -> Result<SampledForm> {
    let grid = &form.grid;
    let mut out = SampledForm::zeros(grid, form.degree + 1)?;
    let derivs: Vec<Vec<Vec<f64>>> = (0..form.n_keys())
        .map(|k| {
            let comp = form.component(k);
            (0..grid.dim)
                .map(|a| grid.central_difference(&comp, a))
                .collect()
        })
        .collect();
    let nk_out = out.n_keys();
    for (j, key) in out.keys.clone().iter().enumerate() {
        for (pos, a) in key.iter().enumerate() {
            let rest = key.without(a);
            let src = form
                .keys
                .iter()
                .position(|k| *k == rest)
                .expect("lower key present");
            let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
            let d = &derivs[src][(a - 1) as usize];
            for (p, dp) in d.iter().enumerate() {
                out.values[p * nk_out + j] += sign * dp;
            }
        }
    }
    Ok(out)
}

/// Hodge star on `R^n` with metric `g` (row-major `n×n`) and orientation
/// `dθ^1 ∧ ... ∧ dθ^n`, acting on a form given by coefficients on `keys`.
/// Returns coefficients on the complementary keys, in lexicographic order.
pub fn metric_hodge_star(n: usize, g: &[f64], keys: &[IndexTuple], coeffs: &[f64]) -> Vec<f64> {
    let rows: Vec<Vec<f64>> = (0..n).map(|i| g[i * n..(i + 1) * n].to_vec()).collect();
    let det = determinant(rows.clone());
    let ginv = invert(&rows);
    let k = keys.first().map_or(0, |t| t.degree());
    let out_keys = IndexTuple::all_of_degree(n, n - k);
    let mut out = vec![0.0; out_keys.len()];
    let sqrt_det = det.abs().sqrt();
    for i_key in keys {
        // raise all indices: alpha^I = sum_K det(ginv[I, K]) alpha_K
        let rows_i: Vec<usize> = i_key.iter().map(|i| (i - 1) as usize).collect();
        let mut raised = 0.0;
        for (k_key, c) in keys.iter().zip(coeffs) {
            if *c == 0.0 {
                continue;
            }
            let cols: Vec<usize> = k_key.iter().map(|i| (i - 1) as usize).collect();
            let minor: Vec<Vec<f64>> = rows_i
                .iter()
                .map(|&r| cols.iter().map(|&c| ginv[r][c]).collect())
                .collect();
            raised += determinant(minor) * c;
        }
        let comp = i_key.complement_in(n);
        let slot = out_keys
            .iter()
            .position(|t| *t == comp)
            .expect("complement key");
        out[slot] += sqrt_det * merge_sign(*i_key, comp) as f64 * raised;
    }
    out
}

pub(crate) fn invert(m: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .expect("nonempty");
        a.swap(col, piv);
        let p = a[col][col];
        for x in a[col].iter_mut() {
            *x /= p;
        }
        for r in 0..n {
            if r != col {
                let f = a[r][col];
                if f != 0.0 {
                    let pivot_row = a[col].clone();
                    for (x, y) in a[r].iter_mut().zip(pivot_row) {
                        *x -= f * y;
                    }
                }
            }
        }
    }
    a.into_iter().map(|r| r[n..].to_vec()).collect()
}
