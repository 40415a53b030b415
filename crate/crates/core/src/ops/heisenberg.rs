//! Antiferromagnetic Heisenberg model on the 2^n spin space.
//!
//! Basis words have bit x set when the spin at site x points up. The coupling
//! enters as h = Σ_{x,y} J_xy (S_x·S_y - ¼) over ordered pairs, so each bond
//! contributes twice; with J = 2t² a single bond at |t| = 1 gives singlet
//! energy -4 and a gap of 4.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

use super::sparse::SparseOperator;

/// J_xy = 2 t_xy², the strong-coupling exchange of the hopping matrix.
pub fn j_from_t(t: &DMatrix<f64>) -> DMatrix<f64> {
    t.map(|v| 2.0 * v * v)
}

pub fn assemble_heisenberg(j: &DMatrix<f64>) -> Result<SparseOperator> {
    let n = j.nrows();
    if j.ncols() != n {
        return Err(Error::SectorMismatch(format!(
            "exchange matrix must be square, got {}x{}",
            j.nrows(),
            j.ncols()
        )));
    }
    for x in 0..n {
        for y in 0..n {
            if j[(x, y)] != j[(y, x)] || j[(x, y)] < 0.0 {
                return Err(Error::PreconditionFailed(
                    "exchange matrix must be symmetric with nonnegative entries".into(),
                ));
            }
        }
    }
    assert!(n <= 20, "spin space 2^n exceeds intended desk scale");
    let dim = 1usize << n;
    let mut trips = Vec::new();
    for w in 0..dim {
        let mut diag = 0.0;
        for x in 0..n {
            for y in 0..n {
                let jxy = j[(x, y)];
                if jxy == 0.0 {
                    continue;
                }
                if x == y {
                    // S_x·S_x - ¼ = ½ on spin-½
                    diag += 0.5 * jxy;
                    continue;
                }
                let (bx, by) = ((w >> x) & 1, (w >> y) & 1);
                if bx == by {
                    continue; // SzSz cancels the -¼
                }
                diag -= 0.5 * jxy;
                if bx == 0 && by == 1 {
                    // the up spin moves from y to x; the ordered pairs (x,y)
                    // and (y,x) each feed this element ½·J, totalling J_xy
                    let flipped = w ^ (1 << x) ^ (1 << y);
                    trips.push((flipped, w, Complex64::new(jxy, 0.0)));
                }
            }
        }
        if diag != 0.0 {
            trips.push((w, w, Complex64::new(diag, 0.0)));
        }
    }
    Ok(SparseOperator::from_triplets(dim, dim, trips).with_hermitian_checked())
}

/// S_tot² on the 2^n spin space, as Sz² + ½(S⁺S⁻ + S⁻S⁺).
pub fn spin_square_spin_space(n: usize) -> SparseOperator {
    assert!(n <= 20);
    let dim = 1usize << n;
    let mut raise_trips = Vec::new();
    let mut sz_diag = vec![0.0; dim];
    for w in 0..dim {
        let ups = (w as u32).count_ones() as f64;
        sz_diag[w] = ups - n as f64 / 2.0;
        for x in 0..n {
            if (w >> x) & 1 == 0 {
                raise_trips.push((w | (1 << x), w, Complex64::new(1.0, 0.0)));
            }
        }
    }
    let raise = SparseOperator::from_triplets(dim, dim, raise_trips);
    let lower = raise.adjoint();
    let sz2 = SparseOperator::from_real_diagonal(
        &sz_diag.iter().map(|z| z * z).collect::<Vec<_>>(),
    );
    let mut s2 = sz2.add_scaled(&raise.matmul(&lower), Complex64::new(0.5, 0.0));
    s2 = s2.add_scaled(&lower.matmul(&raise), Complex64::new(0.5, 0.0));
    s2.hermitian = true;
    s2
}
