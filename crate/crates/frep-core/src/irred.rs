//! Irreducibility decisions for finite-dimensional representations.
//!
//! Two independent routes are kept side by side: the commutant
//! (operators commuting with every generator image, computed as a
//! nullspace) and the dimension of the matrix algebra spanned by word
//! images (which saturates at `d^2` exactly for irreducibles). Schur's
//! lemma makes commutant dimension one the definition of irreducible;
//! the algebra dimension is the consistency cross-check.

use crate::error::{FrepError, Result};
use crate::linalg;
use crate::rep::Representation;
use crate::word::Letter;
use crate::C64;
use nalgebra::{DMatrix, DVector};

/// Default relative singular-value threshold for rank and nullspace
/// decisions. Generators are unitary, so the problem is unit scale and
/// a relative threshold is well conditioned.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

/// Default word-length budget for the generated-algebra dimension:
/// twice the dimension, which empirically saturates at desk scale.
pub fn default_burnside_budget(d: usize) -> usize {
    2 * d
}

#[derive(Clone, Debug, PartialEq)]
pub struct IrreducibilityReport {
    pub commutant_dim: usize,
    pub algebra_dim: usize,
    pub is_irreducible: bool,
    pub smallest_retained_singular_value: f64,
    pub tolerance_used: f64,
}

/// Orthonormal basis (Frobenius inner product) of the commutant
/// `{X : X pi(s) = pi(s) X for all generators s}`.
///
/// Computed as the nullspace of the stacked linear maps
/// `X -> X pi(s) - pi(s) X`; in vectorized form each map is
/// `pi(s)^T (x) I - I (x) pi(s)` acting on `vec(X)` (column-major).
pub fn commutant_basis(rep: &Representation, tol: f64) -> Vec<DMatrix<C64>> {
    let (basis, _, _) = commutant_nullspace(rep, tol);
    basis
        .into_iter()
        .map(|v| devectorize(&v, rep.dim()))
        .collect()
}

fn commutant_nullspace(rep: &Representation, tol: f64) -> (Vec<DVector<C64>>, f64, f64) {
    let d = rep.dim();
    let dd = d * d;
    let id = linalg::identity(d);
    let mut stacked = DMatrix::<C64>::zeros(rep.k() * dd, dd);
    for (g, pi_s) in rep.generators().iter().enumerate() {
        let block = pi_s.transpose().kronecker(&id) - id.kronecker(pi_s);
        stacked.view_mut((g * dd, 0), (dd, dd)).copy_from(&block);
    }
    linalg::nullspace_basis(&stacked, tol)
}

fn devectorize(v: &DVector<C64>, d: usize) -> DMatrix<C64> {
    DMatrix::from_fn(d, d, |r, c| v[c * d + r])
}

/// Full irreducibility report: commutant dimension, generated-algebra
/// dimension at the default budget, and the audit fields.
pub fn is_irreducible(rep: &Representation, tol: f64) -> IrreducibilityReport {
    let (null_basis, smallest_kept, _sigma_max) = commutant_nullspace(rep, tol);
    let commutant_dim = null_basis.len();
    let algebra_dim = generated_algebra_dim(rep, default_burnside_budget(rep.dim()), tol);
    IrreducibilityReport {
        commutant_dim,
        algebra_dim,
        is_irreducible: commutant_dim == 1,
        smallest_retained_singular_value: smallest_kept,
        tolerance_used: tol,
    }
}

/// Dimension of `span{pi(w) : |w| <= max_len}`.
///
/// The span is grown level by level: the images of words of length
/// `n + 1` are the generator letters applied to the images at length
/// `n`, so each level multiplies the current basis by every letter
/// matrix and re-decides the rank by SVD with the relative threshold.
/// Once a level adds nothing the span is closed under all letters and
/// no later level can grow, so iteration stops early. Nondecreasing in
/// `max_len`; equals `d^2` at saturation iff the representation is
/// irreducible.
pub fn generated_algebra_dim(rep: &Representation, max_len: usize, tol: f64) -> usize {
    let d = rep.dim();
    let letters: Vec<DMatrix<C64>> = (0..2 * rep.k())
        .map(|code| rep.letter_matrix(Letter::from_code(code)))
        .collect();
    let mut basis: Vec<DVector<C64>> = Vec::new();
    linalg::grow_span(&mut basis, &[linalg::vectorize(&linalg::identity(d))], tol);
    let mut frontier: Vec<DMatrix<C64>> = vec![linalg::identity(d)];
    for _ in 1..=max_len {
        let mut next = Vec::with_capacity(frontier.len() * letters.len());
        let mut candidates = Vec::with_capacity(frontier.len() * letters.len());
        for m in &frontier {
            for l in &letters {
                let prod = l * m;
                candidates.push(linalg::vectorize(&prod));
                next.push(prod);
            }
        }
        let added = linalg::grow_span(&mut basis, &candidates, tol);
        if added == 0 {
            break;
        }
        frontier = next;
        if basis.len() == d * d {
            break;
        }
    }
    basis.len()
}

/// `d - dim span{pi(w) v : |w| <= max_len}`; zero means `v` is cyclic
/// within the word budget. Same level-by-level growth with early stop.
pub fn cyclic_defect(
    rep: &Representation,
    v: &DVector<C64>,
    max_len: usize,
    tol: f64,
) -> Result<usize> {
    if v.norm() == 0.0 {
        return Err(FrepError::ZeroVector);
    }
    if v.len() != rep.dim() {
        return Err(FrepError::DimensionMismatch {
            expected: rep.dim(),
            got: v.len(),
        });
    }
    let letters: Vec<DMatrix<C64>> = (0..2 * rep.k())
        .map(|code| rep.letter_matrix(Letter::from_code(code)))
        .collect();
    let mut basis: Vec<DVector<C64>> = Vec::new();
    linalg::grow_span(&mut basis, std::slice::from_ref(v), tol);
    let mut frontier = vec![v.clone()];
    for _ in 1..=max_len {
        let candidates: Vec<DVector<C64>> = frontier
            .iter()
            .flat_map(|x| letters.iter().map(move |l| l * x))
            .collect();
        let added = linalg::grow_span(&mut basis, &candidates, tol);
        if added == 0 || basis.len() == rep.dim() {
            break;
        }
        frontier = candidates;
    }
    Ok(rep.dim() - basis.len())
}

/// Deterministic mixed sample for agreement sweeps: Haar
/// representations, direct sums, tensor products, and trivial
/// representations with dimensions in 1..=4, keyed by a trial index.
pub fn mixed_sample_representation(trial: u64) -> Representation {
    use crate::seed::{derive_seed, rng_from_seed};
    use rand::Rng;
    let mut rng = rng_from_seed(derive_seed(0x6D69_7865, trial));
    match rng.random_range(0..4) {
        0 => {
            let d = rng.random_range(1..=4);
            crate::rep::random_haar_rep(2, d, derive_seed(1, trial)).unwrap()
        }
        1 => {
            let d1 = rng.random_range(1..=2);
            let d2 = rng.random_range(1..=2);
            crate::rep::random_haar_rep(2, d1, derive_seed(2, trial))
                .unwrap()
                .direct_sum(&crate::rep::random_haar_rep(2, d2, derive_seed(3, trial)).unwrap())
                .unwrap()
        }
        2 => {
            let d1 = rng.random_range(1..=2);
            let d2 = rng.random_range(1..=2);
            crate::rep::random_haar_rep(2, d1, derive_seed(4, trial))
                .unwrap()
                .tensor(&crate::rep::random_haar_rep(2, d2, derive_seed(5, trial)).unwrap())
                .unwrap()
        }
        _ => Representation::trivial(2, rng.random_range(1..=4)).unwrap(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rep::{random_haar_rep, Representation};
    use crate::seed::{derive_seed, rng_from_seed};
    use crate::word::enumerate_words;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// Independent rank oracle: Gaussian elimination with partial
    /// pivoting over the complex field, no SVD involved.
    fn elimination_rank(m: &DMatrix<C64>, tol: f64) -> usize {
        let mut a = m.clone();
        let (rows, cols) = a.shape();
        let scale = a.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
        if scale == 0.0 {
            return 0;
        }
        let mut rank = 0;
        let mut row = 0;
        for col in 0..cols {
            let (mut pivot_row, mut pivot_val) = (row, 0.0);
            for r in row..rows {
                if a[(r, col)].norm() > pivot_val {
                    pivot_val = a[(r, col)].norm();
                    pivot_row = r;
                }
            }
            if pivot_val <= tol * scale {
                continue;
            }
            a.swap_rows(row, pivot_row);
            let pivot = a[(row, col)];
            for r in (row + 1)..rows {
                let factor = a[(r, col)] / pivot;
                for cc in col..cols {
                    let sub = factor * a[(row, cc)];
                    a[(r, cc)] -= sub;
                }
            }
            rank += 1;
            row += 1;
            if row == rows {
                break;
            }
        }
        rank
    }

    fn commutant_dim_oracle(rep: &Representation) -> usize {
        let d = rep.dim();
        let dd = d * d;
        let id = linalg::identity(d);
        let mut stacked = DMatrix::<C64>::zeros(rep.k() * dd, dd);
        for (g, pi_s) in rep.generators().iter().enumerate() {
            let block = pi_s.transpose().kronecker(&id) - id.kronecker(pi_s);
            stacked.view_mut((g * dd, 0), (dd, dd)).copy_from(&block);
        }
        dd - elimination_rank(&stacked, 1e-8)
    }

    #[test]
    fn commutant_examples() {
        let pauli = Representation::pauli();
        let basis = commutant_basis(&pauli, DEFAULT_RANK_TOL);
        assert_eq!(basis.len(), 1);
        // The single commutant direction is a multiple of the identity.
        let m = &basis[0];
        assert!((m - linalg::identity(2) * m[(0, 0)]).norm() < 1e-10);
        assert!((m.norm() - 1.0).abs() < 1e-12);

        let trivial2 = Representation::trivial(2, 2).unwrap();
        assert_eq!(commutant_basis(&trivial2, DEFAULT_RANK_TOL).len(), 4);

        let pp = pauli.tensor(&pauli).unwrap();
        assert_eq!(commutant_basis(&pp, DEFAULT_RANK_TOL).len(), 4);
        assert_eq!(commutant_dim_oracle(&pp), 4);
    }

    #[test]
    fn commutant_basis_actually_commutes() {
        let rep = Representation::pauli()
            .direct_sum(&Representation::pauli())
            .unwrap();
        let basis = commutant_basis(&rep, DEFAULT_RANK_TOL);
        assert_eq!(basis.len(), 4);
        for x in &basis {
            for g in rep.generators() {
                assert!((x * g - g * x).norm() < 1e-8);
            }
        }
        // Orthonormal under the Frobenius inner product.
        for (i, x) in basis.iter().enumerate() {
            for (j, y) in basis.iter().enumerate() {
                let ip: C64 = x.iter().zip(y.iter()).map(|(a, b)| a.conj() * b).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((ip - c(expect, 0.0)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn is_irreducible_examples() {
        let pauli = Representation::pauli();
        let r = is_irreducible(&pauli, DEFAULT_RANK_TOL);
        assert!(r.is_irreducible);
        assert_eq!(r.commutant_dim, 1);
        assert_eq!(r.algebra_dim, 4);
        assert!(r.smallest_retained_singular_value > 0.0);

        let ds = pauli.direct_sum(&pauli).unwrap();
        let r = is_irreducible(&ds, DEFAULT_RANK_TOL);
        assert!(!r.is_irreducible);
        assert_eq!(r.commutant_dim, 4);

        let tp = pauli.tensor(&random_haar_rep(2, 3, 1).unwrap()).unwrap();
        let r = is_irreducible(&tp, DEFAULT_RANK_TOL);
        assert!(r.is_irreducible);
        assert_eq!(r.algebra_dim, 36);
    }

    #[test]
    fn one_dimensional_is_irreducible() {
        let t = Representation::trivial(2, 1).unwrap();
        let r = is_irreducible(&t, DEFAULT_RANK_TOL);
        assert!(r.is_irreducible);
        assert_eq!(r.commutant_dim, 1);
        assert_eq!(r.algebra_dim, 1);
    }

    #[test]
    fn generated_algebra_examples() {
        let pauli = Representation::pauli();
        // I, X, Z, XZ are linearly independent, so length 2 saturates.
        assert_eq!(generated_algebra_dim(&pauli, 2, DEFAULT_RANK_TOL), 4);
        assert_eq!(generated_algebra_dim(&pauli, 1, DEFAULT_RANK_TOL), 3);

        let t1 = Representation::trivial(2, 1).unwrap();
        assert_eq!(generated_algebra_dim(&t1, 5, DEFAULT_RANK_TOL), 1);
        let t2 = Representation::trivial(2, 2).unwrap();
        assert_eq!(generated_algebra_dim(&t2, 5, DEFAULT_RANK_TOL), 1);
    }

    #[test]
    fn generated_algebra_matches_literal_enumeration() {
        // Independent oracle: stack every vectorized word image up to the
        // budget and take the rank by elimination.
        for (seed, d, budget) in [(1u64, 2usize, 3usize), (2, 3, 4), (3, 2, 2)] {
            let rep = random_haar_rep(2, d, seed).unwrap();
            let words = enumerate_words(2, budget).unwrap();
            let stacked = DMatrix::from_fn(d * d, words.len(), |r, wi| {
                linalg::vectorize(&rep.evaluate_word(&words[wi]))[r]
            });
            let oracle = elimination_rank(&stacked, 1e-10);
            assert_eq!(
                generated_algebra_dim(&rep, budget, DEFAULT_RANK_TOL),
                oracle,
                "seed {seed} d {d} budget {budget}"
            );
        }
    }

    #[test]
    fn cyclic_defect_examples() {
        let pauli = Representation::pauli();
        let e1 = DVector::from_column_slice(&[c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(cyclic_defect(&pauli, &e1, 1, DEFAULT_RANK_TOL).unwrap(), 0);

        let t2 = Representation::trivial(2, 2).unwrap();
        assert_eq!(cyclic_defect(&t2, &e1, 6, DEFAULT_RANK_TOL).unwrap(), 1);

        let zero = DVector::from_column_slice(&[c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(cyclic_defect(&pauli, &zero, 1, DEFAULT_RANK_TOL).is_err());
    }

    #[test]
    fn cyclic_defect_monte_carlo() {
        let eta = Representation::pauli();
        let mut hits = 0;
        for trial in 0..100 {
            let pi = random_haar_rep(2, 3, derive_seed(500, trial)).unwrap();
            let rep = eta.tensor(&pi).unwrap();
            let mut rng = rng_from_seed(derive_seed(501, trial));
            let v = crate::rep::gaussian_vector(6, &mut rng);
            if cyclic_defect(&rep, &v, 4, DEFAULT_RANK_TOL).unwrap() == 0 {
                hits += 1;
            }
        }
        assert!(hits >= 99, "cyclic in {hits}/100 trials");
    }

    #[test]
    fn unitary_conjugation_preserves_commutant_dim() {
        let mut rng = rng_from_seed(9);
        for trial in 0..10 {
            let d = 2 + (trial % 3);
            let rep = random_haar_rep(2, d, derive_seed(33, trial as u64)).unwrap();
            let rep = if trial % 2 == 0 {
                rep.direct_sum(&Representation::trivial(2, 1).unwrap()).unwrap()
            } else {
                rep
            };
            let u = crate::rep::haar_unitary(rep.dim(), &mut rng);
            let conj = Representation::new_with_tol(
                2,
                rep.generators().iter().map(|g| &u * g * u.adjoint()).collect(),
                1e-10,
            )
            .unwrap();
            assert_eq!(
                is_irreducible(&rep, DEFAULT_RANK_TOL).commutant_dim,
                is_irreducible(&conj, DEFAULT_RANK_TOL).commutant_dim
            );
        }
    }

    #[test]
    fn inequivalent_irreducibles_have_commutant_two() {
        let pauli = Representation::pauli();
        let chi = Representation::character(&[c(1.0, 0.0), c(-1.0, 0.0)]).unwrap();
        let ds = pauli.direct_sum(&chi).unwrap();
        let r = is_irreducible(&ds, DEFAULT_RANK_TOL);
        assert_eq!(r.commutant_dim, 2);
        assert!(!r.is_irreducible);
    }

    #[test]
    fn irreducible_probe_vectors_are_cyclic_within_budget() {
        for d in 1..=4usize {
            let rep = if d == 2 {
                Representation::pauli()
            } else {
                random_haar_rep(2, d, 900 + d as u64).unwrap()
            };
            if !is_irreducible(&rep, DEFAULT_RANK_TOL).is_irreducible {
                continue;
            }
            let mut rng = rng_from_seed(40 + d as u64);
            for _ in 0..5 {
                let v = crate::rep::gaussian_vector(d, &mut rng);
                let defect = cyclic_defect(&rep, &v, 2 * d, DEFAULT_RANK_TOL).unwrap();
                assert_eq!(defect, 0);
            }
        }
    }

    #[test]
    fn agreement_of_the_two_routes() {
        // Mixed bag of 60 representations, d <= 4 (the full 200-case run
        // lives in the acceptance suite).
        let mut disagreements = 0;
        for trial in 0..60u64 {
            let rep = mixed_sample_representation(trial);
            let report = is_irreducible(&rep, DEFAULT_RANK_TOL);
            let d = rep.dim();
            let burnside = generated_algebra_dim(&rep, 2 * d, DEFAULT_RANK_TOL);
            if report.is_irreducible != (burnside == d * d) {
                disagreements += 1;
            }
        }
        assert_eq!(disagreements, 0);
    }
}
