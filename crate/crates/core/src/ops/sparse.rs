//! Compressed sparse row operator with complex entries.
//!
//! All second-quantized operators are assembled as coordinate triplets and
//! compressed here. Rectangular shapes are allowed: sector-changing maps like
//! S⁺ have different domain and codomain bases. Matrix-vector products walk
//! rows sequentially, so results never depend on thread count.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Hermiticity is asserted at this fraction of the largest entry magnitude.
pub const TAU_HERMITIAN: f64 = 1e-13;

#[derive(Clone, Debug)]
pub struct SparseOperator {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<Complex64>,
    /// Set by constructors that measured the defect; valid only when square.
    pub hermitian: bool,
}

impl SparseOperator {
    /// Compress triplets, summing duplicates and dropping exact zeros.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        mut triplets: Vec<(usize, usize, Complex64)>,
    ) -> SparseOperator {
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; nrows + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<Complex64> = Vec::with_capacity(triplets.len());
        let mut rows: Vec<usize> = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            debug_assert!(r < nrows && c < ncols);
            if let (Some(&lr), Some(&lc)) = (rows.last(), col_idx.last()) {
                if lr == r && lc == c {
                    *values.last_mut().unwrap() += v;
                    continue;
                }
            }
            rows.push(r);
            col_idx.push(c);
            values.push(v);
        }
        // prune entries that cancelled exactly
        let mut keep_col = Vec::with_capacity(col_idx.len());
        let mut keep_val = Vec::with_capacity(values.len());
        for i in 0..values.len() {
            if values[i] != Complex64::new(0.0, 0.0) {
                row_ptr[rows[i] + 1] += 1;
                keep_col.push(col_idx[i]);
                keep_val.push(values[i]);
            }
        }
        for r in 0..nrows {
            row_ptr[r + 1] += row_ptr[r];
        }
        SparseOperator {
            nrows,
            ncols,
            row_ptr,
            col_idx: keep_col,
            values: keep_val,
            hermitian: false,
        }
    }

    pub fn identity(n: usize) -> SparseOperator {
        let mut op = SparseOperator::from_triplets(
            n,
            n,
            (0..n).map(|i| (i, i, Complex64::new(1.0, 0.0))).collect(),
        );
        op.hermitian = true;
        op
    }

    pub fn from_real_diagonal(values: &[f64]) -> SparseOperator {
        let n = values.len();
        let mut op = SparseOperator::from_triplets(
            n,
            n,
            values
                .iter()
                .enumerate()
                .map(|(i, &v)| (i, i, Complex64::new(v, 0.0)))
                .collect(),
        );
        op.hermitian = true;
        op
    }

    pub fn zeros(nrows: usize, ncols: usize) -> SparseOperator {
        let mut op = SparseOperator::from_triplets(nrows, ncols, vec![]);
        op.hermitian = nrows == ncols;
        op
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn iter_entries(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.nrows).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.col_idx[k], self.values[k]))
        })
    }

    /// Largest entry magnitude (the max norm used by tolerance scales).
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Row-sum norm ‖A‖_∞, an upper bound on the spectral norm for
    /// Hermitian operators.
    pub fn inf_norm(&self) -> f64 {
        (0..self.nrows)
            .map(|r| {
                (self.row_ptr[r]..self.row_ptr[r + 1])
                    .map(|k| self.values[k].norm())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    pub fn matvec(&self, x: &DVector<Complex64>) -> DVector<Complex64> {
        assert_eq!(x.len(), self.ncols, "matvec shape mismatch");
        let mut y = DVector::from_element(self.nrows, Complex64::new(0.0, 0.0));
        for r in 0..self.nrows {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            y[r] = acc;
        }
        y
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> SparseOperator {
        let trips = self
            .iter_entries()
            .map(|(r, c, v)| (c, r, v.conj()))
            .collect();
        let mut op = SparseOperator::from_triplets(self.ncols, self.nrows, trips);
        op.hermitian = self.hermitian;
        op
    }

    /// self + alpha · other.
    pub fn add_scaled(&self, other: &SparseOperator, alpha: Complex64) -> SparseOperator {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let mut trips: Vec<(usize, usize, Complex64)> = self.iter_entries().collect();
        trips.extend(other.iter_entries().map(|(r, c, v)| (r, c, alpha * v)));
        SparseOperator::from_triplets(self.nrows, self.ncols, trips)
    }

    pub fn scaled(&self, alpha: Complex64) -> SparseOperator {
        let trips = self
            .iter_entries()
            .map(|(r, c, v)| (r, c, alpha * v))
            .collect();
        SparseOperator::from_triplets(self.nrows, self.ncols, trips)
    }

    /// Sparse-sparse product self · rhs.
    pub fn matmul(&self, rhs: &SparseOperator) -> SparseOperator {
        assert_eq!(self.ncols, rhs.nrows, "matmul shape mismatch");
        let mut trips = Vec::new();
        let mut scratch: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); rhs.ncols];
        let mut touched: Vec<usize> = Vec::new();
        for r in 0..self.nrows {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let a = self.values[k];
                let mid = self.col_idx[k];
                for k2 in rhs.row_ptr[mid]..rhs.row_ptr[mid + 1] {
                    let c = rhs.col_idx[k2];
                    if scratch[c] == Complex64::new(0.0, 0.0) {
                        touched.push(c);
                    }
                    scratch[c] += a * rhs.values[k2];
                }
            }
            for &c in &touched {
                trips.push((r, c, scratch[c]));
                scratch[c] = Complex64::new(0.0, 0.0);
            }
            touched.clear();
        }
        SparseOperator::from_triplets(self.nrows, rhs.ncols, trips)
    }

    /// max |(A - A†)_ij|, zero for an exactly hermitian operator.
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.add_scaled(&self.adjoint(), Complex64::new(-1.0, 0.0))
            .max_abs()
    }

    /// Measure the defect against [`TAU_HERMITIAN`]·max_abs and record the
    /// outcome in the `hermitian` flag.
    pub fn with_hermitian_checked(mut self) -> SparseOperator {
        let tol = TAU_HERMITIAN * self.max_abs().max(1.0);
        self.hermitian = self.is_square() && self.hermiticity_defect() <= tol;
        self
    }

    pub fn require_hermitian(&self) -> Result<()> {
        let tol = TAU_HERMITIAN * self.max_abs().max(1.0);
        let defect = self.hermiticity_defect();
        if defect <= tol {
            Ok(())
        } else {
            Err(Error::NotHermitian {
                defect,
                tolerance: tol,
            })
        }
    }

    /// Kronecker product self ⊗ rhs. Row index convention is
    /// `r_self · rhs.nrows + r_rhs`, matching the combined sector index
    /// `fermion_index · phonon_dim + phonon_index`.
    pub fn kron(&self, rhs: &SparseOperator) -> SparseOperator {
        let mut trips = Vec::with_capacity(self.nnz() * rhs.nnz());
        for (ra, ca, va) in self.iter_entries() {
            for (rb, cb, vb) in rhs.iter_entries() {
                trips.push((ra * rhs.nrows + rb, ca * rhs.ncols + cb, va * vb));
            }
        }
        SparseOperator::from_triplets(self.nrows * rhs.nrows, self.ncols * rhs.ncols, trips)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::from_element(self.nrows, self.ncols, Complex64::new(0.0, 0.0));
        for (r, c, v) in self.iter_entries() {
            m[(r, c)] = v;
        }
        m
    }

    /// Dense real part, provided every imaginary part is below
    /// `tol`·max_abs; returns None otherwise.
    pub fn to_dense_real(&self, tol: f64) -> Option<DMatrix<f64>> {
        let cut = tol * self.max_abs().max(1.0);
        let mut m = DMatrix::zeros(self.nrows, self.ncols);
        for (r, c, v) in self.iter_entries() {
            if v.im.abs() > cut {
                return None;
            }
            m[(r, c)] = v.re;
        }
        Some(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn triplets_are_summed_and_zeros_dropped() {
        let op = SparseOperator::from_triplets(
            2,
            2,
            vec![
                (0, 1, c(1.0, 0.0)),
                (0, 1, c(2.0, 0.0)),
                (1, 0, c(3.0, 0.0)),
                (1, 0, c(-3.0, 0.0)),
            ],
        );
        assert_eq!(op.nnz(), 1);
        assert_eq!(op.to_dense()[(0, 1)], c(3.0, 0.0));
    }

    #[test]
    fn matvec_matches_dense() {
        let op = SparseOperator::from_triplets(
            3,
            2,
            vec![(0, 0, c(1.0, 1.0)), (1, 1, c(2.0, 0.0)), (2, 0, c(0.0, -1.0))],
        );
        let x = DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 1.0)]);
        let y = op.matvec(&x);
        let want = op.to_dense() * x;
        assert!((y - want).norm() < 1e-15);
    }

    #[test]
    fn adjoint_conjugates_and_transposes() {
        let op = SparseOperator::from_triplets(2, 3, vec![(0, 2, c(1.0, 2.0))]);
        let adj = op.adjoint();
        assert_eq!(adj.nrows(), 3);
        assert_eq!(adj.to_dense()[(2, 0)], c(1.0, -2.0));
    }

    #[test]
    fn matmul_matches_dense_product() {
        let a = SparseOperator::from_triplets(
            2,
            3,
            vec![(0, 0, c(1.0, 0.0)), (0, 2, c(2.0, 1.0)), (1, 1, c(-1.0, 0.0))],
        );
        let b = SparseOperator::from_triplets(
            3,
            2,
            vec![(0, 1, c(3.0, 0.0)), (2, 0, c(1.0, -1.0)), (2, 1, c(0.5, 0.0))],
        );
        let ab = a.matmul(&b);
        let want = a.to_dense() * b.to_dense();
        assert!((ab.to_dense() - want).norm() < 1e-14);
    }

    #[test]
    fn hermiticity_defect_detects_asymmetry() {
        let h = SparseOperator::from_triplets(
            2,
            2,
            vec![(0, 1, c(0.0, 1.0)), (1, 0, c(0.0, -1.0))],
        );
        assert_eq!(h.hermiticity_defect(), 0.0);
        let bad = SparseOperator::from_triplets(2, 2, vec![(0, 1, c(1.0, 0.0))]);
        assert!(bad.hermiticity_defect() > 0.9);
        assert!(bad.with_hermitian_checked().hermitian == false);
    }

    #[test]
    fn kron_matches_dense_kronecker() {
        let a = SparseOperator::from_triplets(2, 2, vec![(0, 1, c(2.0, 0.0)), (1, 0, c(1.0, 0.0))]);
        let b = SparseOperator::from_triplets(2, 2, vec![(0, 0, c(1.0, 0.0)), (1, 1, c(3.0, 0.0))]);
        let k = a.kron(&b).to_dense();
        let ad = a.to_dense();
        let bd = b.to_dense();
        for ra in 0..2 {
            for ca in 0..2 {
                for rb in 0..2 {
                    for cb in 0..2 {
                        assert_eq!(k[(ra * 2 + rb, ca * 2 + cb)], ad[(ra, ca)] * bd[(rb, cb)]);
                    }
                }
            }
        }
    }

    #[test]
    fn dense_real_rejects_complex_entries() {
        let op = SparseOperator::from_triplets(1, 1, vec![(0, 0, c(1.0, 1e-3))]);
        assert!(op.to_dense_real(1e-13).is_none());
        let re = SparseOperator::from_triplets(1, 1, vec![(0, 0, c(2.0, 0.0))]);
        assert_eq!(re.to_dense_real(1e-13).unwrap()[(0, 0)], 2.0);
    }
}
