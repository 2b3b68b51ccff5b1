//! Finite-dimensional unitary representations of the free group as
//! tuples of generator matrices, together with the probe sequences and
//! the strong-operator-topology metric surrogate used by the
//! experiment harnesses.
//!
//! The ambient spaces here are finite-dimensional throughout; growing
//! the dimension is the approximation axis. The metric below is one
//! admissible complete metric for strong operator convergence on
//! unitaries in finite dimension; it is artifact-defined, not canonical.

use crate::algebra::GroupAlgebraElement;
use crate::error::{FrepError, Result};
use crate::linalg;
use crate::seed::rng_from_seed;
use crate::word::{Letter, Word};
use crate::C64;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

/// Default unitarity tolerance for validating loaded matrices.
pub const DEFAULT_UNITARITY_TOL: f64 = 1e-8;

/// A unitary representation given by one matrix per generator.
/// Immutable after construction.
#[derive(Clone, Debug, PartialEq)]
pub struct Representation {
    k: usize,
    d: usize,
    gens: Vec<DMatrix<C64>>,
}

impl Representation {
    /// Validates generator count, shapes, and unitarity (defect in
    /// Frobenius norm at most `tol`).
    pub fn new_with_tol(k: usize, gens: Vec<DMatrix<C64>>, tol: f64) -> Result<Self> {
        if !(2..=26).contains(&k) {
            return Err(FrepError::BadGeneratorCount(k));
        }
        if gens.len() != k {
            return Err(FrepError::DimensionMismatch {
                expected: k,
                got: gens.len(),
            });
        }
        let d = gens[0].nrows();
        if d == 0 {
            return Err(FrepError::DimensionMismatch { expected: 1, got: 0 });
        }
        for (i, g) in gens.iter().enumerate() {
            if g.nrows() != d || g.ncols() != d {
                return Err(FrepError::BadMatrixShape {
                    index: i,
                    rows: g.nrows(),
                    cols: g.ncols(),
                    expected: d,
                });
            }
            let defect = linalg::unitarity_defect(g);
            if defect > tol {
                return Err(FrepError::NonUnitary {
                    index: i,
                    defect,
                    tol,
                });
            }
        }
        Ok(Representation { k, d, gens })
    }

    /// Validates with the default tolerance.
    pub fn new(k: usize, gens: Vec<DMatrix<C64>>) -> Result<Self> {
        Representation::new_with_tol(k, gens, DEFAULT_UNITARITY_TOL)
    }

    /// Internal constructor for matrices produced by operations that
    /// preserve unitarity.
    fn from_parts(k: usize, gens: Vec<DMatrix<C64>>) -> Self {
        let d = gens[0].nrows();
        debug_assert!(gens
            .iter()
            .all(|g| linalg::unitarity_defect(g) <= 1e-10 * d as f64));
        Representation { k, d, gens }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Dimension of the representation space.
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn generators(&self) -> &[DMatrix<C64>] {
        &self.gens
    }

    /// Matrix assigned to one letter: the generator or its adjoint.
    pub fn letter_matrix(&self, l: Letter) -> DMatrix<C64> {
        let g = &self.gens[l.generator()];
        if l.is_inverse() {
            g.adjoint()
        } else {
            g.clone()
        }
    }

    /// Image of a reduced word: the product of letter matrices, the
    /// identity for the empty word.
    pub fn evaluate_word(&self, w: &Word) -> DMatrix<C64> {
        let mut m = linalg::identity(self.d);
        for &l in w.letters() {
            m *= self.letter_matrix(l);
        }
        m
    }

    /// Image of an algebra element: the coefficient-weighted sum of
    /// word images. Linear in `f`, multiplicative over convolution,
    /// and bounded in operator norm by the l1 norm of `f`.
    pub fn evaluate(&self, f: &GroupAlgebraElement) -> Result<DMatrix<C64>> {
        if f.k() != self.k {
            return Err(FrepError::GeneratorCountMismatch(f.k(), self.k));
        }
        let mut out = DMatrix::<C64>::zeros(self.d, self.d);
        for (w, c) in f.terms() {
            out += self.evaluate_word(w) * c;
        }
        Ok(out)
    }

    /// Applies the image of `f` to a vector without forming all word
    /// images at once.
    pub fn evaluate_apply(&self, f: &GroupAlgebraElement, x: &DVector<C64>) -> Result<DVector<C64>> {
        if f.k() != self.k {
            return Err(FrepError::GeneratorCountMismatch(f.k(), self.k));
        }
        if x.len() != self.d {
            return Err(FrepError::DimensionMismatch {
                expected: self.d,
                got: x.len(),
            });
        }
        let mut out = DVector::<C64>::zeros(self.d);
        for (w, c) in f.terms() {
            let mut v = x.clone();
            for &l in w.letters().iter().rev() {
                v = self.letter_matrix(l) * v;
            }
            out += v * c;
        }
        Ok(out)
    }

    /// Tensor product: generator-wise Kronecker product, dimension
    /// `d1 * d2`.
    pub fn tensor(&self, rhs: &Representation) -> Result<Representation> {
        if self.k != rhs.k {
            return Err(FrepError::GeneratorCountMismatch(self.k, rhs.k));
        }
        let gens = self
            .gens
            .iter()
            .zip(&rhs.gens)
            .map(|(a, b)| a.kronecker(b))
            .collect();
        Ok(Representation::from_parts(self.k, gens))
    }

    /// Direct sum: block-diagonal generators, dimension `d1 + d2`.
    pub fn direct_sum(&self, rhs: &Representation) -> Result<Representation> {
        if self.k != rhs.k {
            return Err(FrepError::GeneratorCountMismatch(self.k, rhs.k));
        }
        let d = self.d + rhs.d;
        let gens = self
            .gens
            .iter()
            .zip(&rhs.gens)
            .map(|(a, b)| {
                let mut m = DMatrix::<C64>::zeros(d, d);
                m.view_mut((0, 0), (self.d, self.d)).copy_from(a);
                m.view_mut((self.d, self.d), (rhs.d, rhs.d)).copy_from(b);
                m
            })
            .collect();
        Ok(Representation::from_parts(self.k, gens))
    }

    /// Extends to dimension `total_dim` by acting as the identity on the
    /// orthogonal complement of the first `dim()` coordinates.
    pub fn extend_with_identity(&self, total_dim: usize) -> Result<Representation> {
        if total_dim < self.d {
            return Err(FrepError::DimensionMismatch {
                expected: self.d,
                got: total_dim,
            });
        }
        if total_dim == self.d {
            return Ok(self.clone());
        }
        let gens = self
            .gens
            .iter()
            .map(|a| {
                let mut m = linalg::identity(total_dim);
                m.view_mut((0, 0), (self.d, self.d)).copy_from(a);
                m
            })
            .collect();
        Ok(Representation::from_parts(self.k, gens))
    }

    /// The trivial representation: every generator acts as the identity.
    pub fn trivial(k: usize, d: usize) -> Result<Representation> {
        if !(2..=26).contains(&k) {
            return Err(FrepError::BadGeneratorCount(k));
        }
        if d == 0 {
            return Err(FrepError::DimensionMismatch { expected: 1, got: 0 });
        }
        Ok(Representation {
            k,
            d,
            gens: vec![linalg::identity(d); k],
        })
    }

    /// The 2x2 example pair X = [[0,1],[1,0]], Z = [[1,0],[0,-1]] on two
    /// generators. A convenient known-irreducible fixture.
    pub fn pauli() -> Representation {
        let x = DMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(0.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
            ],
        );
        let z = DMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(-1.0, 0.0),
            ],
        );
        Representation::from_parts(2, vec![x, z])
    }

    /// One-dimensional character with the given unit-modulus values.
    pub fn character(values: &[C64]) -> Result<Representation> {
        let gens = values
            .iter()
            .map(|&v| DMatrix::from_row_slice(1, 1, &[v]))
            .collect();
        Representation::new_with_tol(values.len(), gens, 1e-12)
    }
}

/// Samples one Haar-distributed unitary: QR of a complex Ginibre matrix
/// with the R-diagonal phase correction, which removes the bias of the
/// bare QR factorization.
pub fn haar_unitary<R: Rng>(d: usize, rng: &mut R) -> DMatrix<C64> {
    let g = DMatrix::from_fn(d, d, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im)
    });
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            rjj / rjj.norm()
        };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Representation with `k` independent Haar-distributed generators,
/// deterministic per seed.
pub fn random_haar_rep(k: usize, d: usize, seed: u64) -> Result<Representation> {
    if !(2..=26).contains(&k) {
        return Err(FrepError::BadGeneratorCount(k));
    }
    if d == 0 {
        return Err(FrepError::DimensionMismatch { expected: 1, got: 0 });
    }
    let mut rng = rng_from_seed(seed);
    let gens = (0..k).map(|_| haar_unitary(d, &mut rng)).collect();
    Ok(Representation { k, d, gens })
}

/// Standard complex Gaussian vector.
pub fn gaussian_vector<R: Rng>(dim: usize, rng: &mut R) -> DVector<C64> {
    DVector::from_fn(dim, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im)
    })
}

/// Minimum norm accepted for a probe vector.
pub const PROBE_MIN_NORM: f64 = 1e-9;

/// A fixed sequence of nonzero random vectors standing in for a dense
/// sequence in the representation space. Deterministic given
/// `(seed, dim, count)`.
#[derive(Clone, Debug)]
pub struct ProbeSequence {
    seed: u64,
    dim: usize,
    vectors: Vec<DVector<C64>>,
}

impl ProbeSequence {
    pub fn generate(seed: u64, dim: usize, count: usize) -> Result<Self> {
        if dim == 0 {
            return Err(FrepError::DimensionMismatch { expected: 1, got: 0 });
        }
        let mut rng = rng_from_seed(seed);
        let mut vectors = Vec::with_capacity(count);
        while vectors.len() < count {
            let v = gaussian_vector(dim, &mut rng);
            // A Gaussian draw below the floor is a measure-zero accident,
            // but the invariant is explicit, so enforce it.
            if v.norm() >= PROBE_MIN_NORM {
                vectors.push(v);
            }
        }
        Ok(ProbeSequence { seed, dim, vectors })
    }

    /// Builds a sequence from explicit vectors (all nonzero, equal
    /// dimension).
    pub fn from_vectors(vectors: Vec<DVector<C64>>) -> Result<Self> {
        let dim = vectors.first().map(|v| v.len()).unwrap_or(0);
        if dim == 0 {
            return Err(FrepError::DimensionMismatch { expected: 1, got: 0 });
        }
        for v in &vectors {
            if v.len() != dim {
                return Err(FrepError::DimensionMismatch {
                    expected: dim,
                    got: v.len(),
                });
            }
            if v.norm() < PROBE_MIN_NORM {
                return Err(FrepError::ZeroVector);
            }
        }
        Ok(ProbeSequence {
            seed: 0,
            dim,
            vectors,
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vector(&self, index: usize) -> Result<&DVector<C64>> {
        self.vectors.get(index).ok_or(FrepError::ProbeOutOfRange {
            index,
            len: self.vectors.len(),
        })
    }

    pub fn vectors(&self) -> &[DVector<C64>] {
        &self.vectors
    }
}

/// Metric surrogate for strong operator convergence:
///
/// `sum_s sum_{n<=N} 2^-n min(1, ||(p1(s)-p2(s)) x_n|| + ||(p1(s)^-1 - p2(s)^-1) x_n||)`
///
/// over normalized probes. The inverse-image term keeps the metric
/// complete on the unitary tuples. Symmetric; zero iff the tuples agree
/// on the span of the probes.
pub fn rep_distance(a: &Representation, b: &Representation, probes: &ProbeSequence) -> Result<f64> {
    if a.k() != b.k() {
        return Err(FrepError::GeneratorCountMismatch(a.k(), b.k()));
    }
    if a.dim() != b.dim() {
        return Err(FrepError::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    if probes.dim() != a.dim() {
        return Err(FrepError::DimensionMismatch {
            expected: a.dim(),
            got: probes.dim(),
        });
    }
    let mut total = 0.0;
    for g in 0..a.k() {
        let ga = &a.gens[g];
        let gb = &b.gens[g];
        let diff = ga - gb;
        let diff_inv = ga.adjoint() - gb.adjoint();
        let mut weight = 0.5;
        for x in probes.vectors() {
            let xn = x / C64::new(x.norm(), 0.0);
            let move_norm = (&diff * &xn).norm() + (&diff_inv * &xn).norm();
            total += weight * move_norm.min(1.0);
            weight *= 0.5;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::random_element;
    use crate::word::enumerate_words;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn parse(s: &str) -> Word {
        Word::parse(s, 2).unwrap()
    }

    #[test]
    fn make_representation_validates() {
        assert!(Representation::trivial(2, 1).is_ok());
        assert!(Representation::new(2, Representation::pauli().gens.clone()).is_ok());

        let shear = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let err = Representation::new(2, vec![shear, linalg::identity(2)]);
        assert!(matches!(err, Err(FrepError::NonUnitary { index: 0, .. })));

        let mismatch = Representation::new(2, vec![linalg::identity(2), linalg::identity(3)]);
        assert!(matches!(mismatch, Err(FrepError::BadMatrixShape { .. })));
    }

    #[test]
    fn evaluate_word_examples() {
        let p = Representation::pauli();
        assert_eq!(p.evaluate_word(&parse("a")), p.gens[0]);
        assert_eq!(p.evaluate_word(&parse("aA")), linalg::identity(2));
        let xz = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(p.evaluate_word(&parse("ab")), xz);
    }

    #[test]
    fn evaluate_examples() {
        let t = Representation::trivial(2, 1).unwrap();
        let f = GroupAlgebraElement::unit(2)
            .scale(c(3.0, 0.0))
            .add(&GroupAlgebraElement::delta(2, parse("a")).scale(c(-1.0, 0.0)))
            .unwrap();
        assert_eq!(t.evaluate(&f).unwrap()[(0, 0)], c(2.0, 0.0));

        let p = Representation::pauli();
        let sym = GroupAlgebraElement::from_terms(
            2,
            [("a", 1.0), ("A", 1.0)]
                .iter()
                .map(|(s, v)| (parse(s), c(*v, 0.0))),
        );
        let img = p.evaluate(&sym).unwrap();
        assert_eq!(img, &p.gens[0] * c(2.0, 0.0));
    }

    #[test]
    fn evaluate_is_multiplicative() {
        let rep = random_haar_rep(2, 3, 99).unwrap();
        let mut rng = rng_from_seed(5);
        for _ in 0..20 {
            let f = random_element(2, 2, 4, &mut rng);
            let g = random_element(2, 2, 4, &mut rng);
            let lhs = rep.evaluate(&f.convolve(&g).unwrap()).unwrap();
            let rhs = rep.evaluate(&f).unwrap() * rep.evaluate(&g).unwrap();
            assert!((lhs - rhs).norm() < 1e-9);
        }
    }

    #[test]
    fn word_multiplicativity_invariant() {
        let rep = random_haar_rep(2, 4, 123).unwrap();
        let mut rng = rng_from_seed(77);
        for _ in 0..50 {
            let u = crate::algebra::random_word(2, rng.random_range(0..=3), &mut rng);
            let v = crate::algebra::random_word(2, rng.random_range(0..=3), &mut rng);
            let lhs = rep.evaluate_word(&u.multiply(&v));
            let rhs = rep.evaluate_word(&u) * rep.evaluate_word(&v);
            assert!((lhs - rhs).norm() <= 1e-9 * rep.dim() as f64);
        }
    }

    #[test]
    fn tensor_examples() {
        let p = Representation::pauli();
        let t1 = Representation::trivial(2, 1).unwrap();
        let same = p.tensor(&t1).unwrap();
        assert_eq!(same.dim(), 2);
        assert_eq!(same.generators(), p.generators());

        let pp = p.tensor(&p).unwrap();
        assert_eq!(pp.dim(), 4);
        assert_eq!(pp.gens[0], p.gens[0].kronecker(&p.gens[0]));

        let a = random_haar_rep(2, 2, 1).unwrap();
        let b = random_haar_rep(2, 3, 2).unwrap();
        let ab = a.tensor(&b).unwrap();
        let w = parse("ab");
        let direct = a.evaluate_word(&w).kronecker(&b.evaluate_word(&w));
        assert!((ab.evaluate_word(&w) - direct).norm() < 1e-10);
    }

    #[test]
    fn direct_sum_examples() {
        let t1 = Representation::trivial(2, 1).unwrap();
        let two = t1.direct_sum(&t1).unwrap();
        assert_eq!(two.generators(), Representation::trivial(2, 2).unwrap().generators());

        let p = Representation::pauli();
        let ext = p.direct_sum(&t1).unwrap();
        assert_eq!(ext.dim(), 3);
        assert_eq!(ext.gens[0][(2, 2)], c(1.0, 0.0));
        assert_eq!(ext.gens[0][(0, 1)], c(1.0, 0.0));
        assert_eq!(ext.gens[0][(2, 0)], c(0.0, 0.0));
    }

    #[test]
    fn extend_with_identity_examples() {
        let p = Representation::pauli();
        assert_eq!(p.extend_with_identity(2).unwrap(), p);
        let e5 = p.extend_with_identity(5).unwrap();
        assert_eq!(e5.dim(), 5);
        for i in 2..5 {
            assert_eq!(e5.gens[0][(i, i)], c(1.0, 0.0));
            assert_eq!(e5.gens[1][(i, i)], c(1.0, 0.0));
        }
        assert!(p.extend_with_identity(1).is_err());

        // The complement sees the sum of coefficients.
        let mut rng = rng_from_seed(4);
        let f = random_element(2, 2, 5, &mut rng);
        let total: C64 = f.terms().map(|(_, c)| c).sum();
        let img = e5.evaluate(&f).unwrap();
        let block = p.evaluate(&f).unwrap();
        assert!((img.view((0, 0), (2, 2)) - &block).norm() < 1e-12);
        for i in 2..5 {
            for j in 0..5 {
                let expect = if i == j { total } else { c(0.0, 0.0) };
                assert!((img[(i, j)] - expect).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn haar_sampling_is_unitary_and_deterministic() {
        let r1 = random_haar_rep(2, 5, 42).unwrap();
        let r2 = random_haar_rep(2, 5, 42).unwrap();
        assert_eq!(r1.generators(), r2.generators());
        for g in r1.generators() {
            assert!(linalg::unitarity_defect(g) < 1e-12);
        }
        let r3 = random_haar_rep(2, 5, 43).unwrap();
        assert_ne!(r1.generators(), r3.generators());
    }

    #[test]
    fn haar_trace_moment() {
        // E |tr U|^2 = 1 for Haar unitaries in any dimension.
        let mut rng = rng_from_seed(2024);
        let mut acc = 0.0;
        let n = 2000;
        for _ in 0..n {
            let u = haar_unitary(3, &mut rng);
            acc += u.trace().norm_sqr();
        }
        let mean = acc / n as f64;
        assert!((0.85..=1.15).contains(&mean), "mean {mean}");
    }

    #[test]
    fn star_compatibility_and_l1_contraction() {
        let rep = random_haar_rep(2, 3, 8).unwrap();
        let mut rng = rng_from_seed(21);
        for _ in 0..30 {
            let f = random_element(2, 3, 6, &mut rng);
            let lhs = rep.evaluate(&f.involution()).unwrap();
            let rhs = rep.evaluate(&f).unwrap().adjoint();
            assert!((lhs - rhs).norm() <= 1e-9 * f.l1_norm().max(1.0) * rep.dim() as f64);
            assert!(linalg::operator_norm(&rep.evaluate(&f).unwrap()) <= f.l1_norm() + 1e-9);
        }
    }

    #[test]
    fn probes_are_nonzero_and_deterministic() {
        let p1 = ProbeSequence::generate(9, 6, 40).unwrap();
        let p2 = ProbeSequence::generate(9, 6, 40).unwrap();
        assert_eq!(p1.len(), 40);
        for (a, b) in p1.vectors().iter().zip(p2.vectors()) {
            assert_eq!(a, b);
            assert!(a.norm() >= PROBE_MIN_NORM);
        }
        assert!(p1.vector(40).is_err());
    }

    #[test]
    fn rep_distance_metric_properties() {
        let p = Representation::pauli();
        let probes = ProbeSequence::generate(1, 2, 32).unwrap();
        assert_eq!(rep_distance(&p, &p, &probes).unwrap(), 0.0);

        // Perturb X by a 1e-3 rotation.
        let th: f64 = 1e-3;
        let rot = DMatrix::from_row_slice(
            2,
            2,
            &[
                c(th.cos(), 0.0), c(-th.sin(), 0.0),
                c(th.sin(), 0.0), c(th.cos(), 0.0),
            ],
        );
        let perturbed =
            Representation::new_with_tol(2, vec![&rot * &p.gens[0], p.gens[1].clone()], 1e-10).unwrap();
        let d1 = rep_distance(&p, &perturbed, &probes).unwrap();
        let d2 = rep_distance(&perturbed, &p, &probes).unwrap();
        assert_eq!(d1, d2);
        assert!(d1 > 0.0 && d1 < 1e-2, "d1 = {d1}");
    }

    #[test]
    fn rep_distance_tracks_entrywise_convergence() {
        let p = Representation::pauli();
        let probes = ProbeSequence::generate(1, 2, 32).unwrap();
        let mut last = f64::INFINITY;
        for &th in &[1e-1, 1e-2, 1e-3, 1e-4] {
            let rot = DMatrix::from_row_slice(
                2,
                2,
                &[
                    c(f64::cos(th), 0.0), c(-f64::sin(th), 0.0),
                    c(f64::sin(th), 0.0), c(f64::cos(th), 0.0),
                ],
            );
            let q = Representation::new_with_tol(
                2,
                vec![&rot * &p.gens[0], &rot * &p.gens[1]],
                1e-10,
            )
            .unwrap();
            let d = rep_distance(&p, &q, &probes).unwrap();
            assert!(d < last);
            last = d;
        }
        assert!(last < 1e-3);
    }

    #[test]
    fn evaluate_word_agrees_with_enumeration_products() {
        // Multiplicativity across a whole enumeration level.
        let rep = random_haar_rep(2, 2, 3).unwrap();
        for w in enumerate_words(2, 3).unwrap() {
            let direct = rep.evaluate_word(&w);
            let split = w.letters().iter().fold(linalg::identity(2), |acc, &l| {
                acc * rep.letter_matrix(l)
            });
            assert!((direct - split).norm() < 1e-12);
        }
    }
}
