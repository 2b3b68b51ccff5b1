//! Certified two-sided estimates of the regular-representation norm.
//!
//! The lower bound compresses the positive operator `λ(f* ⋆ f)` to the
//! ball of radius `R` in the Cayley graph and power-iterates ([`crate::ball`]);
//! any Rayleigh quotient of a compression of a positive operator sits
//! below the full operator norm, and enlarging the ball can only raise
//! the top eigenvalue, so the bound is certified and nondecreasing in
//! `R`. The upper bound is the word-length-weighted l2 bound
//! `sum_n (n+1) ||f_n||_2` (with `f_n` the restriction to words of
//! length `n`), capped by the l1 norm; both are exact arithmetic over
//! the finite support.

use crate::algebra::GroupAlgebraElement;
use crate::ball::{compression_rayleigh, CompressionEstimate};
use crate::error::{FrepError, Result};
use crate::linalg;
use crate::rep::Representation;
use crate::seed::derive_seed;

/// Default power-iteration budget.
pub const DEFAULT_POWER_ITERS: usize = 60;

/// Certified enclosure of the regular-representation norm.
#[derive(Clone, Debug, PartialEq)]
pub struct NormInterval {
    pub lower: f64,
    pub upper: f64,
    pub ball_radius: usize,
    pub iterations: usize,
    /// Storage scalar the ball engine ran with ("f64", "f32", ...).
    pub scalar: &'static str,
}

/// Word-length-weighted upper bound `sum_n (n+1) ||f_n||_2`.
pub fn haagerup_upper(f: &GroupAlgebraElement) -> f64 {
    let radius = f.radius();
    let mut by_len = vec![0.0f64; radius + 1];
    for (w, c) in f.terms() {
        by_len[w.len()] += c.norm_sqr();
    }
    by_len
        .iter()
        .enumerate()
        .map(|(n, s)| (n as f64 + 1.0) * s.sqrt())
        .sum()
}

/// Lower bound on `||λ(f)||` from the ball compression of `λ(f* ⋆ f)`:
/// the square root of the last Rayleigh quotient of a seeded power
/// iteration. Deterministic per seed.
///
/// `||λ(f*)|| = ||λ(f)||`, but the two ball compressions need not share
/// their top eigenvalue at finite radius, so the estimate is run for
/// both `f` and `f*` (same seed) and the larger kept; that makes the
/// bound involution-invariant by construction. Self-adjoint elements
/// skip the second run.
pub fn ball_lower(f: &GroupAlgebraElement, radius: usize, iters: usize, seed: u64) -> Result<f64> {
    Ok(ball_lower_detail(f, radius, iters, seed)?.0)
}

pub(crate) fn ball_lower_detail(
    f: &GroupAlgebraElement,
    radius: usize,
    iters: usize,
    seed: u64,
) -> Result<(f64, CompressionEstimate)> {
    if f.is_zero() {
        return Ok((
            0.0,
            CompressionEstimate {
                rayleigh: 0.0,
                iterations: 0,
                ball_words: 0,
                scalar: "f64",
            },
        ));
    }
    let mut est = compression_rayleigh(f, radius, iters, seed)?;
    let f_star = f.involution();
    if f_star != *f {
        let mirror = compression_rayleigh(&f_star, radius, iters, seed)?;
        if mirror.rayleigh > est.rayleigh {
            est = mirror;
        }
    }
    Ok((est.rayleigh.max(0.0).sqrt(), est))
}

/// Two-sided enclosure `[ball lower, min(haagerup upper, l1)]`.
///
/// The endpoints sandwich the true norm, so `lower <= upper` must hold;
/// a violation beyond rounding is reported as a hard failure. Exact
/// equality cases (single words) may cross by a few ulps and are
/// clamped.
pub fn lambda_norm_interval(
    f: &GroupAlgebraElement,
    radius: usize,
    iters: usize,
    seed: u64,
) -> Result<NormInterval> {
    let (mut lower, est) = ball_lower_detail(f, radius, iters, seed)?;
    let upper = haagerup_upper(f).min(f.l1_norm());
    if lower > upper {
        if lower <= upper * (1.0 + 1e-9) {
            lower = upper;
        } else {
            return Err(FrepError::Internal(format!(
                "norm sandwich violated: lower {lower} > upper {upper}"
            )));
        }
    }
    Ok(NormInterval {
        lower,
        upper,
        ball_radius: radius,
        iterations: est.iterations,
        scalar: est.scalar,
    })
}

/// One sampled element in a weak-containment comparison.
#[derive(Clone, Debug)]
pub struct DeficitRow {
    pub index: usize,
    pub l1: f64,
    pub op_norm: f64,
    pub lambda_lower: f64,
    pub lambda_upper: f64,
    /// `||rep(f)|| - upper`: positive means the representation norm
    /// provably exceeds the regular-representation norm on this element.
    pub deficit_vs_upper: f64,
    /// `||rep(f)|| - lower`: positive already witnesses a gap whenever
    /// the lower bound is tight.
    pub deficit_vs_lower: f64,
}

#[derive(Clone, Debug)]
pub struct DeficitReport {
    pub rows: Vec<DeficitRow>,
    /// Max of `deficit_vs_upper` over the sample; at or below zero means
    /// no violation was detected on this sample.
    pub max_deficit: f64,
    pub ball_radius: usize,
    pub iterations: usize,
}

/// Measures how far `rep` is from being dominated by the regular
/// representation on the sampled elements: for each `f`, compares the
/// operator norm of `rep(f)` with the certified enclosure of
/// `||λ(f)||`. Lower-bound runs are seeded per row from `seed`.
pub fn weak_containment_deficit(
    rep: &Representation,
    fs: &[GroupAlgebraElement],
    radius: usize,
    iters: usize,
    seed: u64,
) -> Result<DeficitReport> {
    if fs.is_empty() {
        return Err(FrepError::BadArgument(
            "deficit needs at least one sample element".into(),
        ));
    }
    let mut rows = Vec::with_capacity(fs.len());
    let mut max_deficit = f64::NEG_INFINITY;
    for (i, f) in fs.iter().enumerate() {
        let interval = lambda_norm_interval(f, radius, iters, derive_seed(seed, i as u64))?;
        let op_norm = linalg::operator_norm(&rep.evaluate(f)?);
        let row = DeficitRow {
            index: i,
            l1: f.l1_norm(),
            op_norm,
            lambda_lower: interval.lower,
            lambda_upper: interval.upper,
            deficit_vs_upper: op_norm - interval.upper,
            deficit_vs_lower: op_norm - interval.lower,
        };
        max_deficit = max_deficit.max(row.deficit_vs_upper);
        rows.push(row);
    }
    Ok(DeficitReport {
        rows,
        max_deficit,
        ball_radius: radius,
        iterations: iters,
    })
}

/// `2 sqrt(2k - 1)`: the closed-form regular-representation norm of the
/// symmetric generator element, used as the test oracle.
pub fn kesten_norm(k: usize) -> f64 {
    2.0 * (2.0 * k as f64 - 1.0).sqrt()
}

/// The symmetric generator element `sum over s in S and S^-1 of delta_s`.
pub fn symmetric_generator_element(k: usize) -> GroupAlgebraElement {
    GroupAlgebraElement::from_terms(
        k,
        (0..2 * k).map(|code| {
            (
                crate::word::Word::letter(crate::word::Letter::from_code(code)),
                crate::C64::new(1.0, 0.0),
            )
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::random_element;
    use crate::seed::rng_from_seed;
    use crate::word::Word;
    use crate::C64;
    use nalgebra::DMatrix;

    fn d(s: &str) -> GroupAlgebraElement {
        GroupAlgebraElement::delta(2, Word::parse(s, 2).unwrap())
    }

    #[test]
    fn haagerup_examples() {
        assert_eq!(haagerup_upper(&d("aba")), 4.0);
        assert_eq!(haagerup_upper(&symmetric_generator_element(2)), 4.0);
        let f = GroupAlgebraElement::unit(2)
            .scale(C64::new(3.0, 0.0))
            .add(&d("ab").scale(C64::new(-4.0, 0.0)))
            .unwrap();
        assert_eq!(haagerup_upper(&f), 15.0);
    }

    #[test]
    fn ball_lower_examples() {
        for w in ["a", "aB"] {
            let lower = ball_lower(&d(w), 5, 40, 3).unwrap();
            assert!((lower - 1.0).abs() < 1e-9, "word {w}: {lower}");
        }
        assert_eq!(ball_lower(&GroupAlgebraElement::zero(2), 5, 40, 3).unwrap(), 0.0);
    }

    #[test]
    fn interval_examples() {
        let iv = lambda_norm_interval(&d("a"), 4, 40, 1).unwrap();
        assert!((iv.lower - 1.0).abs() < 1e-9);
        assert_eq!(iv.upper, 1.0);
        assert!(iv.lower <= iv.upper);
    }

    #[test]
    fn single_point_ball_reports_l2_norm() {
        // Radius zero compresses to the single point at the identity,
        // where the quadratic form is the squared l2 norm.
        let f = d("a").add(&d("b")).unwrap();
        let iv = lambda_norm_interval(&f, 0, 10, 1).unwrap();
        assert!((iv.lower - 2f64.sqrt()).abs() < 1e-12, "lower {}", iv.lower);
        assert_eq!(iv.upper, 2.0);

        let scalar = GroupAlgebraElement::unit(2).scale(C64::new(0.0, -2.5));
        let iv = lambda_norm_interval(&scalar, 3, 20, 1).unwrap();
        assert!((iv.lower - 2.5).abs() < 1e-12);
        assert_eq!(iv.upper, 2.5);
    }

    /// Radial reduction oracle for the symmetric generator element: on
    /// sphere-averaged vectors the ball compression of `λ(f)` is the
    /// Jacobi matrix with couplings `sqrt(2k)` then `sqrt(2k-1)`, and
    /// the compression of `λ(f ⋆ f)` to radius R is the Gram matrix of
    /// the rectangular Jacobi map into radius R + 1. Its top eigenvalue
    /// is what the ball estimate converges to, because the top
    /// eigenvector of the compression is radial.
    fn radial_oracle(k: usize, radius: usize) -> f64 {
        let q = (2 * k - 1) as f64;
        let rows = radius + 2;
        let cols = radius + 1;
        let mut j = DMatrix::<f64>::zeros(rows, cols);
        for c in 0..cols {
            let up = if c == 0 { (2 * k) as f64 } else { q };
            j[(c + 1, c)] = up.sqrt();
            if c > 0 {
                j[(c - 1, c)] = if c == 1 { (2.0 * k as f64).sqrt() } else { q.sqrt() };
            }
        }
        let gram = j.transpose() * &j;
        let top = nalgebra::SymmetricEigen::new(gram)
            .eigenvalues
            .iter()
            .fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        top.sqrt()
    }

    #[test]
    fn symmetric_element_matches_radial_oracle() {
        for (k, radius) in [(2usize, 4usize), (2, 6), (3, 4)] {
            let f = symmetric_generator_element(k);
            let lower = ball_lower(&f, radius, 400, 17).unwrap();
            let oracle = radial_oracle(k, radius);
            assert!(
                (lower - oracle).abs() < 1e-8 * oracle,
                "k {k} R {radius}: estimate {lower} oracle {oracle}"
            );
            assert!(lower <= kesten_norm(k));
        }
    }

    #[test]
    fn lower_bounds_monotone_in_radius() {
        let mut rng = rng_from_seed(31);
        for trial in 0..10u64 {
            let f = random_element(2, 2, 5, &mut rng);
            if f.is_zero() {
                continue;
            }
            let mut prev = -1.0;
            for radius in [4usize, 6, 8] {
                let lower = ball_lower(&f, radius, 300, 100 + trial).unwrap();
                assert!(
                    lower >= prev - 1e-7 * lower.abs().max(1.0),
                    "trial {trial} radius {radius}: {lower} < {prev}"
                );
                prev = lower;
            }
        }
    }

    #[test]
    fn involution_leaves_interval_endpoints() {
        let mut rng = rng_from_seed(5);
        for trial in 0..6u64 {
            let f = random_element(2, 2, 4, &mut rng);
            if f.is_zero() {
                continue;
            }
            let a = lambda_norm_interval(&f, 4, 400, 50 + trial).unwrap();
            let b = lambda_norm_interval(&f.involution(), 4, 400, 50 + trial).unwrap();
            assert!((a.lower - b.lower).abs() < 1e-6 * a.lower.max(1.0), "lower {} vs {}", a.lower, b.lower);
            assert!((a.upper - b.upper).abs() < 1e-9 * a.upper.max(1.0));
        }
    }

    #[test]
    fn scaling_equivariance() {
        let mut rng = rng_from_seed(8);
        for trial in 0..5u64 {
            let f = random_element(2, 2, 4, &mut rng);
            if f.is_zero() {
                continue;
            }
            let c = C64::new(-1.25, 2.5);
            let scaled = f.scale(c);
            let a = lambda_norm_interval(&f, 4, 80, 60 + trial).unwrap();
            let b = lambda_norm_interval(&scaled, 4, 80, 60 + trial).unwrap();
            assert!((b.lower - c.norm() * a.lower).abs() <= 1e-9 * b.lower.max(1e-9));
            assert!((b.upper - c.norm() * a.upper).abs() <= 1e-9 * b.upper.max(1e-9));
        }
    }

    #[test]
    fn deficit_examples() {
        // The trivial representation sends the symmetric element to 4,
        // above the true regular-representation norm 2 sqrt(3).
        let t = Representation::trivial(2, 1).unwrap();
        let f = symmetric_generator_element(2);
        let report = weak_containment_deficit(&t, std::slice::from_ref(&f), 8, 60, 3).unwrap();
        let row = &report.rows[0];
        assert!((row.op_norm - 4.0).abs() < 1e-12);
        assert!((row.lambda_upper - 4.0).abs() < 1e-12);
        assert!(report.max_deficit.abs() < 1e-9);
        assert!(row.lambda_lower > 3.2, "lower {}", row.lambda_lower);
        assert!(row.deficit_vs_lower > 0.5);

        // Single words never show a deficit: both sides are 1.
        let rep = crate::rep::random_haar_rep(2, 3, 2).unwrap();
        let report =
            weak_containment_deficit(&rep, &[d("ab")], 5, 40, 4).unwrap();
        assert!(report.max_deficit <= 1e-9);
    }

    #[test]
    fn deficit_smoke_on_haar_sample() {
        let rep = crate::rep::random_haar_rep(2, 8, 77).unwrap();
        let mut rng = rng_from_seed(78);
        let fs: Vec<_> = (0..20).map(|_| random_element(2, 2, 5, &mut rng)).collect();
        let report = weak_containment_deficit(&rep, &fs, 4, 40, 9).unwrap();
        assert_eq!(report.rows.len(), 20);
        for row in &report.rows {
            assert!(row.lambda_lower <= row.lambda_upper + 1e-12);
            assert!(row.op_norm <= row.l1 + 1e-9);
        }
    }
}
