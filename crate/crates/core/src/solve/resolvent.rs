//! Deflated resolvent application.
//!
//! Solves (H - E0) x = (1 - P₀) v with x ⊥ ground space, where P₀ projects
//! onto the span of the supplied ground vectors. On that complement H - E0
//! is Hermitian positive semidefinite with its smallest eigenvalue equal to
//! the spectral gap, so plain conjugate gradients converge without any shift.
//! The projection is applied to the right-hand side, to every operator
//! output, and to the iterates, so roundoff cannot leak ground-space
//! components back in.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ops::SparseOperator;

/// Relative residual target: ‖(H-E0)x - (1-P₀)v‖ ≤ TAU_RESOLVENT·‖v‖.
pub const TAU_RESOLVENT: f64 = 1e-9;

fn deflate(v: &mut DVector<Complex64>, ground: &[DVector<Complex64>]) {
    for g in ground {
        let c = g.dotc(v);
        if c != Complex64::new(0.0, 0.0) {
            v.axpy(-c, g, Complex64::new(1.0, 0.0));
        }
    }
}

pub fn deflated_resolvent_apply(
    h: &SparseOperator,
    e0: f64,
    ground: &[DVector<Complex64>],
    v: &DVector<Complex64>,
) -> Result<DVector<Complex64>> {
    let dim = h.nrows();
    assert_eq!(v.len(), dim, "right-hand side dimension mismatch");
    let vnorm = v.norm();
    let zero = DVector::from_element(dim, Complex64::new(0.0, 0.0));
    if vnorm == 0.0 {
        return Ok(zero);
    }
    let tol = TAU_RESOLVENT * vnorm;

    let apply = |x: &DVector<Complex64>| -> DVector<Complex64> {
        let mut y = h.matvec(x);
        y.axpy(Complex64::new(-e0, 0.0), x, Complex64::new(1.0, 0.0));
        deflate(&mut y, ground);
        y
    };

    let mut b = v.clone();
    deflate(&mut b, ground);
    if b.norm() <= tol {
        return Ok(zero);
    }

    let mut x = zero;
    let mut r = b;
    let mut p = r.clone();
    let mut rho = r.norm_squared();
    let max_iter = 20 * dim;
    for _ in 0..max_iter {
        let ap = apply(&p);
        let pap = p.dotc(&ap).re;
        if pap <= 0.0 {
            // numerically exhausted search direction on the PSD complement
            break;
        }
        let alpha = Complex64::new(rho / pap, 0.0);
        x.axpy(alpha, &p, Complex64::new(1.0, 0.0));
        r.axpy(-alpha, &ap, Complex64::new(1.0, 0.0));
        deflate(&mut x, ground);
        deflate(&mut r, ground);
        let rho_next = r.norm_squared();
        if rho_next.sqrt() <= tol {
            return Ok(x);
        }
        let beta = Complex64::new(rho_next / rho, 0.0);
        rho = rho_next;
        let mut p_next = r.clone();
        p_next.axpy(Complex64::new(1.0, 0.0), &(p * beta), Complex64::new(1.0, 0.0));
        p = p_next;
    }
    let residual = r.norm();
    if residual <= tol {
        Ok(x)
    } else {
        Err(Error::NoConvergence {
            iterations: max_iter,
            residual,
            target: tol,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn ground_vector_input_maps_to_zero() {
        let h = SparseOperator::from_real_diagonal(&[0.0, 1.0, 2.0]);
        let g = DVector::from_vec(vec![c(1.0), c(0.0), c(0.0)]);
        let x = deflated_resolvent_apply(&h, 0.0, &[g.clone()], &g).unwrap();
        assert!(x.norm() < 1e-12);
    }

    #[test]
    fn diagonal_componentwise_inverse() {
        let h = SparseOperator::from_real_diagonal(&[0.0, 1.0, 2.0]);
        let g = DVector::from_vec(vec![c(1.0), c(0.0), c(0.0)]);
        let v = DVector::from_vec(vec![c(0.0), c(1.0), c(1.0)]);
        let x = deflated_resolvent_apply(&h, 0.0, &[g], &v).unwrap();
        assert!((x[0].re - 0.0).abs() < 1e-10);
        assert!((x[1].re - 1.0).abs() < 1e-10);
        assert!((x[2].re - 0.5).abs() < 1e-10);
    }

    #[test]
    fn random_hermitian_matches_pseudoinverse() {
        // deterministic dense Hermitian test matrix built from a fixed recipe
        let n = 50;
        let mut a = nalgebra::DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let v = ((i * 13 + j * 7) % 17) as f64 / 17.0 - 0.5;
                a[(i, j)] = v;
            }
        }
        let sym = (&a + a.transpose()) * 0.5;
        let mut trips: Vec<(usize, usize, Complex64)> = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                trips.push((i, j, c(sym[(i, j)])));
            }
        }
        let h = SparseOperator::from_triplets(n, n, trips).with_hermitian_checked();

        let eig = sym.clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
        let e0 = eig.eigenvalues[order[0]];
        let ground: DVector<Complex64> = eig.eigenvectors.column(order[0]).map(c);

        let v = DVector::from_fn(n, |i, _| c(((i * 3 + 1) % 11) as f64 / 11.0));
        let x = deflated_resolvent_apply(&h, e0, &[ground.clone()], &v).unwrap();

        // oracle: pseudo-inverse through the eigenbasis, ground mode dropped
        let mut want = DVector::from_element(n, c(0.0));
        for &k in order.iter().skip(1) {
            let u: DVector<Complex64> = eig.eigenvectors.column(k).map(c);
            let coef = u.dotc(&v) / c(eig.eigenvalues[k] - e0);
            want.axpy(coef, &u, c(1.0));
        }
        assert!((&x - &want).norm() < 1e-6, "error {}", (&x - &want).norm());
        assert!(ground.dotc(&x).norm() < 1e-10, "not deflated");
        // residual bound as advertised
        let mut lhs = h.matvec(&x);
        lhs.axpy(c(-e0), &x, c(1.0));
        let mut rhs = v.clone();
        deflate(&mut rhs, &[ground]);
        assert!((lhs - rhs).norm() <= TAU_RESOLVENT * v.norm() * 1.0001);
    }
}
