//! Low-lying spectra with degeneracy detection.
//!
//! Small operators are diagonalized densely; larger ones go through Lanczos
//! with full reorthogonalization and sequential deflation: the smallest
//! remaining eigenpair is extracted, projected out, and the process repeats
//! until the requested count is reached and the ground cluster is closed.
//! Every extraction runs twice, once from the deterministic all-ones start
//! and once from a seeded random start, keeping the lower eigenvalue; this
//! guards against a start vector accidentally orthogonal to the ground space.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ops::SparseOperator;

/// Absolute clustering width for calling eigenvalues degenerate.
pub const TAU_DEG: f64 = 1e-8;
/// Residual target, as a fraction of ‖H‖_max.
pub const TAU_RES_FACTOR: f64 = 1e-10;
/// Largest dimension diagonalized densely by default.
pub const DENSE_LIMIT_DEFAULT: usize = 2000;

#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    pub dense_limit: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            dense_limit: DENSE_LIMIT_DEFAULT,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Dense,
    Lanczos,
}

#[derive(Clone, Debug)]
pub struct SpectrumResult {
    /// Ascending; at least the ground cluster plus one eigenvalue beyond it
    /// (where the dimension allows).
    pub eigenvalues: Vec<f64>,
    /// Orthonormal set spanning the ground cluster.
    pub ground_vectors: Vec<DVector<Complex64>>,
    pub degeneracy: usize,
    /// E1 - E0; infinite for one-dimensional sectors.
    pub gap: f64,
    pub solver: SolverKind,
    /// ‖H v - E0 v‖ per ground vector.
    pub residual_norms: Vec<f64>,
}

impl SpectrumResult {
    pub fn e0(&self) -> f64 {
        self.eigenvalues[0]
    }
}

fn project_out(v: &mut DVector<Complex64>, basis: &[DVector<Complex64>]) {
    for b in basis {
        let c = b.dotc(v);
        if c != Complex64::new(0.0, 0.0) {
            v.axpy(-c, b, Complex64::new(1.0, 0.0));
        }
    }
}

fn residual_norm(op: &SparseOperator, lambda: f64, v: &DVector<Complex64>) -> f64 {
    let mut r = op.matvec(v);
    r.axpy(Complex64::new(-lambda, 0.0), v, Complex64::new(1.0, 0.0));
    r.norm()
}

/// Smallest eigenvalue of the tridiagonal (α, β) and its eigenvector.
fn tridiag_smallest(alphas: &[f64], betas: &[f64]) -> (f64, DVector<f64>) {
    let m = alphas.len();
    let mut t = DMatrix::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alphas[i];
        if i + 1 < m {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    let eig = t.symmetric_eigen();
    let mut best = 0;
    for i in 1..m {
        if eig.eigenvalues[i] < eig.eigenvalues[best] {
            best = i;
        }
    }
    (eig.eigenvalues[best], eig.eigenvectors.column(best).into())
}

struct Extraction {
    lambda: f64,
    vector: DVector<Complex64>,
    residual: f64,
}

/// One deflated Lanczos run converging the smallest remaining eigenpair.
fn lanczos_smallest(
    op: &SparseOperator,
    deflate: &[DVector<Complex64>],
    start: DVector<Complex64>,
    tol: f64,
    budget: &mut usize,
) -> Result<Extraction> {
    let dim = op.nrows();
    let sub_dim = dim - deflate.len();
    let max_basis = 250.min(sub_dim);
    let mut q0 = start;
    let mut last_residual = f64::INFINITY;

    loop {
        project_out(&mut q0, deflate);
        let n0 = q0.norm();
        if n0 < 1e-12 {
            return Err(Error::NoConvergence {
                iterations: 0,
                residual: f64::INFINITY,
                target: tol,
            });
        }
        q0 /= Complex64::new(n0, 0.0);

        let mut basis: Vec<DVector<Complex64>> = vec![q0.clone()];
        let mut alphas: Vec<f64> = Vec::new();
        let mut betas: Vec<f64> = Vec::new();

        for j in 0..max_basis {
            if *budget == 0 {
                return Err(Error::NoConvergence {
                    iterations: 10 * dim,
                    residual: last_residual,
                    target: tol,
                });
            }
            *budget -= 1;

            let mut w = op.matvec(&basis[j]);
            project_out(&mut w, deflate);
            let alpha = basis[j].dotc(&w).re;
            alphas.push(alpha);
            // two-pass classical Gram-Schmidt keeps the basis orthonormal
            project_out(&mut w, &basis);
            project_out(&mut w, &basis);
            project_out(&mut w, deflate);
            let beta = w.norm();

            let exhausted = beta < 1e-13 || j + 1 == max_basis || alphas.len() == sub_dim;
            if alphas.len() >= 2 || exhausted {
                let (theta, s) = tridiag_smallest(&alphas, &betas);
                let coupled = if beta < 1e-13 {
                    0.0
                } else {
                    (beta * s[s.len() - 1]).abs()
                };
                last_residual = coupled;
                if coupled <= tol || exhausted {
                    let mut v = DVector::from_element(dim, Complex64::new(0.0, 0.0));
                    for (k, b) in basis.iter().enumerate() {
                        v.axpy(Complex64::new(s[k], 0.0), b, Complex64::new(1.0, 0.0));
                    }
                    project_out(&mut v, deflate);
                    let nv = v.norm();
                    v /= Complex64::new(nv, 0.0);
                    let true_res = residual_norm(op, theta, &v);
                    if true_res <= tol || beta < 1e-13 || alphas.len() == sub_dim {
                        return Ok(Extraction {
                            lambda: theta,
                            vector: v,
                            residual: true_res,
                        });
                    }
                    if exhausted {
                        // restart from the best Ritz vector
                        q0 = v;
                        break;
                    }
                }
            }
            if beta < 1e-13 {
                unreachable!("exhausted branch returns above");
            }
            betas.push(beta);
            basis.push(w / Complex64::new(beta, 0.0));
        }
    }
}

fn random_start(dim: usize, seed: u64) -> DVector<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DVector::from_fn(dim, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), 0.0))
}

fn dense_spectrum(op: &SparseOperator, n_eigenvalues: usize) -> Result<SpectrumResult> {
    let dim = op.nrows();
    let (eigenvalues, vectors): (Vec<f64>, Vec<DVector<Complex64>>) =
        if let Some(real) = op.to_dense_real(1e-13) {
            let eig = real.symmetric_eigen();
            let mut order: Vec<usize> = (0..dim).collect();
            order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
            (
                order.iter().map(|&i| eig.eigenvalues[i]).collect(),
                order
                    .iter()
                    .map(|&i| eig.eigenvectors.column(i).map(|x| Complex64::new(x, 0.0)))
                    .collect(),
            )
        } else {
            let eig = op.to_dense().symmetric_eigen();
            let mut order: Vec<usize> = (0..dim).collect();
            order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
            (
                order.iter().map(|&i| eig.eigenvalues[i]).collect(),
                order.iter().map(|&i| eig.eigenvectors.column(i).into()).collect(),
            )
        };
    let e0 = eigenvalues[0];
    let degeneracy = eigenvalues.iter().take_while(|&&e| e - e0 <= TAU_DEG).count();
    let gap = if dim > 1 {
        eigenvalues[1] - e0
    } else {
        f64::INFINITY
    };
    let ground_vectors: Vec<DVector<Complex64>> = vectors[..degeneracy].to_vec();
    let residual_norms = ground_vectors
        .iter()
        .map(|v| residual_norm(op, e0, v))
        .collect();
    let keep = n_eigenvalues.max(degeneracy + 1).min(dim);
    Ok(SpectrumResult {
        eigenvalues: eigenvalues[..keep].to_vec(),
        ground_vectors,
        degeneracy,
        gap,
        solver: SolverKind::Dense,
        residual_norms,
    })
}

fn lanczos_spectrum(op: &SparseOperator, n_eigenvalues: usize) -> Result<SpectrumResult> {
    let dim = op.nrows();
    let hscale = op.max_abs().max(1e-300);
    let tol = TAU_RES_FACTOR * hscale;
    let mut budget = 10 * dim;
    let wanted = n_eigenvalues.max(2).min(dim);

    let mut found: Vec<Extraction> = Vec::new();
    loop {
        let deflate: Vec<DVector<Complex64>> =
            found.iter().map(|e| e.vector.clone()).collect();
        let ones = DVector::from_element(dim, Complex64::new(1.0, 0.0));
        let first = lanczos_smallest(op, &deflate, ones, tol, &mut budget);
        let second = lanczos_smallest(
            op,
            &deflate,
            random_start(dim, 7919 + 31 * found.len() as u64),
            tol,
            &mut budget,
        );
        let ext = match (first, second) {
            (Ok(a), Ok(b)) => {
                if b.lambda < a.lambda - TAU_DEG {
                    b
                } else {
                    a
                }
            }
            (Ok(a), Err(_)) => a,
            (Err(_), Ok(b)) => b,
            (Err(e), Err(_)) => return Err(e),
        };
        let mut v = ext.vector;
        project_out(&mut v, &deflate);
        let nv = v.norm();
        if nv < 1e-8 {
            return Err(Error::NoConvergence {
                iterations: 10 * dim - budget,
                residual: ext.residual,
                target: tol,
            });
        }
        v /= Complex64::new(nv, 0.0);
        found.push(Extraction {
            lambda: ext.lambda,
            vector: v,
            residual: ext.residual,
        });

        let e0 = found[0].lambda;
        let last = found.last().unwrap().lambda;
        let cluster_closed = last > e0 + TAU_DEG;
        if (found.len() >= wanted && cluster_closed) || found.len() == dim {
            break;
        }
    }

    found.sort_by(|a, b| a.lambda.partial_cmp(&b.lambda).unwrap());
    let eigenvalues: Vec<f64> = found.iter().map(|e| e.lambda).collect();
    let e0 = eigenvalues[0];
    let degeneracy = eigenvalues.iter().take_while(|&&e| e - e0 <= TAU_DEG).count();
    let gap = if eigenvalues.len() > 1 {
        eigenvalues[1] - e0
    } else {
        f64::INFINITY
    };
    let ground: Vec<&Extraction> = found.iter().take(degeneracy).collect();
    Ok(SpectrumResult {
        eigenvalues,
        ground_vectors: ground.iter().map(|e| e.vector.clone()).collect(),
        degeneracy,
        gap,
        solver: SolverKind::Lanczos,
        residual_norms: ground.iter().map(|e| e.residual).collect(),
    })
}

/// Smallest eigenvalues of a Hermitian operator, with the ground cluster
/// resolved. `n_eigenvalues` counts multiplicity; the result always includes
/// one eigenvalue beyond the ground cluster when the dimension allows, so the
/// gap is meaningful.
pub fn ground_spectrum(op: &SparseOperator, n_eigenvalues: usize) -> Result<SpectrumResult> {
    ground_spectrum_opts(op, n_eigenvalues, &SolveOptions::default())
}

pub fn ground_spectrum_opts(
    op: &SparseOperator,
    n_eigenvalues: usize,
    opts: &SolveOptions,
) -> Result<SpectrumResult> {
    if !op.is_square() {
        return Err(Error::NotHermitian {
            defect: f64::INFINITY,
            tolerance: 0.0,
        });
    }
    if !op.hermitian {
        op.require_hermitian()?;
    }
    let dim = op.nrows();
    assert!(dim > 0, "empty sector has no spectrum");
    if dim <= opts.dense_limit {
        dense_spectrum(op, n_eigenvalues)
    } else {
        lanczos_spectrum(op, n_eigenvalues)
    }
}
