//! Small dense complex linear-algebra helpers shared by the
//! representation, irreducibility, and transporter modules. Backed by
//! nalgebra; everything here is desk-scale (dimensions in the tens).

use crate::error::{FrepError, Result};
use crate::C64;
use nalgebra::{DMatrix, DVector};

pub fn identity(d: usize) -> DMatrix<C64> {
    DMatrix::identity(d, d)
}

/// Frobenius norm.
pub fn frobenius(m: &DMatrix<C64>) -> f64 {
    m.norm()
}

/// Operator (spectral) norm: the largest singular value.
pub fn operator_norm(m: &DMatrix<C64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .singular_values()
        .iter()
        .fold(0.0f64, |a, &s| a.max(s))
}

/// `|| U^H U - I ||_F`, the unitarity defect.
pub fn unitarity_defect(m: &DMatrix<C64>) -> f64 {
    let d = m.nrows();
    frobenius(&(m.adjoint() * m - identity(d)))
}

/// Orthonormal basis of the nullspace of `m`, decided by singular values
/// below `tol` times the largest singular value. Returns the basis
/// vectors, the smallest singular value kept as nonzero (0 if none),
/// and the largest singular value.
///
/// A matrix that is exactly zero has everything in its nullspace.
pub fn nullspace_basis(m: &DMatrix<C64>, tol: f64) -> (Vec<DVector<C64>>, f64, f64) {
    let n = m.ncols();
    // Pad wide matrices with zero rows so the SVD carries a full set of
    // right singular vectors.
    let square = if m.nrows() < n {
        let mut padded = DMatrix::zeros(n, n);
        padded.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
        padded
    } else {
        m.clone()
    };
    let svd = square.svd(false, true);
    let v_t = svd.v_t.expect("svd with v requested");
    let sigma_max = svd.singular_values.iter().fold(0.0f64, |a, &s| a.max(s));
    if sigma_max == 0.0 {
        let basis = (0..n)
            .map(|i| DVector::from_fn(n, |r, _| if r == i { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }))
            .collect();
        return (basis, 0.0, 0.0);
    }
    let thresh = tol * sigma_max;
    let mut basis = Vec::new();
    let mut smallest_kept = 0.0f64;
    // Singular values come back in descending order; rows of v_t beyond
    // the stored count correspond to exact-zero singular values.
    let stored = svd.singular_values.len();
    for i in 0..n {
        let s = if i < stored { svd.singular_values[i] } else { 0.0 };
        if s < thresh {
            basis.push(v_t.row(i).transpose().map(|z| z.conj()));
        } else {
            smallest_kept = s;
        }
    }
    (basis, smallest_kept, sigma_max)
}

/// Rank of `m` with the same relative singular-value threshold.
pub fn rank_with_tol(m: &DMatrix<C64>, tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.clone().singular_values();
    let sigma_max = sv.iter().fold(0.0f64, |a, &s| a.max(s));
    if sigma_max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s >= tol * sigma_max).count()
}

/// Minimum-norm least-squares solution of `A x ~ b` for a wide matrix
/// `A` (rows <= cols): `x = A^H (A A^H)^+ b`, with the pseudo-inverse
/// thresholded relative to the largest eigenvalue.
pub fn min_norm_lstsq(a: &DMatrix<C64>, b: &DVector<C64>, tol: f64) -> Result<DVector<C64>> {
    if a.nrows() != b.len() {
        return Err(FrepError::DimensionMismatch {
            expected: a.nrows(),
            got: b.len(),
        });
    }
    let gram = a * a.adjoint();
    let eig = nalgebra::SymmetricEigen::new(gram);
    let lam_max = eig.eigenvalues.iter().fold(0.0f64, |m, &l| m.max(l));
    let thresh = if lam_max > 0.0 { tol * tol * lam_max } else { f64::INFINITY };
    // y = (A A^H)^+ b via the eigenbasis.
    let proj = eig.eigenvectors.adjoint() * b;
    let scaled = DVector::from_fn(proj.len(), |i, _| {
        let l = eig.eigenvalues[i];
        if l > thresh {
            proj[i] / C64::new(l, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let y = &eig.eigenvectors * scaled;
    Ok(a.adjoint() * y)
}

/// Closest unitary in Frobenius norm: the unitary polar factor, via SVD.
/// Matrices that are already unitary within `keep_tol` are returned
/// unchanged, bit for bit.
pub fn polar_unitary(m: &DMatrix<C64>, keep_tol: f64) -> DMatrix<C64> {
    if unitarity_defect(m) <= keep_tol {
        return m.clone();
    }
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("svd with u requested");
    let v_t = svd.v_t.expect("svd with v requested");
    u * v_t
}

/// Flattens a matrix column-major into a vector of length rows*cols.
pub fn vectorize(m: &DMatrix<C64>) -> DVector<C64> {
    DVector::from_column_slice(m.as_slice())
}

/// Maintains an orthonormal basis of a growing span. Candidates are
/// stacked with the current basis and re-decided by one SVD so that
/// rank decisions use the same relative singular-value threshold as the
/// nullspace computation. Returns the number of dimensions added.
pub fn grow_span(basis: &mut Vec<DVector<C64>>, candidates: &[DVector<C64>], tol: f64) -> usize {
    if candidates.is_empty() {
        return 0;
    }
    let dim = candidates[0].len();
    let before = basis.len();
    let cols: Vec<&DVector<C64>> = basis.iter().chain(candidates.iter()).collect();
    let stacked = DMatrix::from_fn(dim, cols.len(), |r, c| cols[c][r]);
    let svd = stacked.clone().svd(true, false);
    let u = svd.u.expect("svd with u requested");
    let sigma_max = svd.singular_values.iter().fold(0.0f64, |a, &s| a.max(s));
    if sigma_max == 0.0 {
        return 0;
    }
    let rank = svd
        .singular_values
        .iter()
        .filter(|&&s| s >= tol * sigma_max)
        .count();
    *basis = (0..rank).map(|i| u.column(i).into_owned()).collect();
    basis.len().saturating_sub(before)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn nullspace_of_zero_matrix_is_everything() {
        let z = DMatrix::<C64>::zeros(3, 2);
        let (basis, kept, smax) = nullspace_basis(&z, 1e-8);
        assert_eq!(basis.len(), 2);
        assert_eq!(kept, 0.0);
        assert_eq!(smax, 0.0);
    }

    #[test]
    fn nullspace_matches_hand_example() {
        // Rank-1 matrix [[1, i], [-i, 1]] has nullspace spanned by (i, 1)... wait,
        // row space spanned by (1, i); null vector x satisfies x1 + i x2 = 0.
        let m = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(1.0, 0.0)]);
        let (basis, kept, smax) = nullspace_basis(&m, 1e-10);
        assert_eq!(basis.len(), 1);
        assert!(kept > 0.0 && smax >= kept);
        let v = &basis[0];
        let residual = (&m * v).norm();
        assert!(residual < 1e-12, "residual {residual}");
        assert!((v.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn min_norm_lstsq_exact_and_minimal() {
        // A = [e1 | e2 | e2 | e1 | e1] as columns, b = e2.
        let a = DMatrix::from_row_slice(
            2,
            5,
            &[
                c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0),
                c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0),
            ],
        );
        let b = DVector::from_column_slice(&[c(0.0, 0.0), c(1.0, 0.0)]);
        let x = min_norm_lstsq(&a, &b, 1e-12).unwrap();
        let residual = (&a * &x - &b).norm();
        assert!(residual < 1e-12);
        // Minimum-norm solution spreads over the two e2 columns.
        assert!((x[1].re - 0.5).abs() < 1e-12 && (x[2].re - 0.5).abs() < 1e-12);
        assert!(x[0].norm() < 1e-12 && x[3].norm() < 1e-12 && x[4].norm() < 1e-12);
    }

    #[test]
    fn polar_factor_is_unitary_and_close() {
        let m = DMatrix::from_row_slice(2, 2, &[c(1.1, 0.0), c(0.1, 0.2), c(0.0, -0.1), c(0.9, 0.0)]);
        let u = polar_unitary(&m, 1e-12);
        assert!(unitarity_defect(&u) < 1e-12);
        let id = identity(2);
        assert_eq!(polar_unitary(&id, 1e-12), id);
    }

    #[test]
    fn grow_span_counts_new_directions() {
        let e1 = DVector::from_column_slice(&[c(1.0, 0.0), c(0.0, 0.0)]);
        let e1_scaled = DVector::from_column_slice(&[c(2.0, 0.0), c(0.0, 0.0)]);
        let e2 = DVector::from_column_slice(&[c(0.0, 0.0), c(0.0, 1.0)]);
        let mut basis = Vec::new();
        assert_eq!(grow_span(&mut basis, &[e1], 1e-10), 1);
        assert_eq!(grow_span(&mut basis, &[e1_scaled], 1e-10), 0);
        assert_eq!(grow_span(&mut basis, &[e2], 1e-10), 1);
        assert_eq!(basis.len(), 2);
    }

    #[test]
    fn operator_norm_of_diagonal() {
        let m = DMatrix::from_row_slice(2, 2, &[c(3.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -4.0)]);
        assert!((operator_norm(&m) - 4.0).abs() < 1e-12);
    }
}
