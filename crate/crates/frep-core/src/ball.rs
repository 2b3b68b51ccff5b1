//! Matrix-free compression of left-convolution operators to the ball of
//! radius `R` in the Cayley graph of the free group.
//!
//! Words of length at most `R` are indexed length-first, then
//! lexicographically (the [`crate::word::enumerate_words`] order), which
//! gives every sphere a digit structure: the first letter is a base-`2k`
//! digit and each following letter a base-`(2k-1)` digit relative to the
//! letters allowed after its predecessor. Left multiplication by a fixed
//! word then maps each digit-aligned subblock of a sphere onto one
//! contiguous index range, so applying a convolution operator is a short
//! list of scaled block copies instead of per-word index lookups. Words
//! pushed past radius `R` are dropped, which is exactly the compression
//! `P λ(h) P`.
//!
//! For elements supported on words of length at most one, the positive
//! operator `λ(f* ⋆ f)` compressed to the ball equals two truncated
//! half-steps (by `λ(f)`, then `λ(f*)`) plus an explicit diagonal on the
//! outermost sphere: a word on sphere `R` leaves the ball under one
//! letter and comes straight back under the adjoint letter, and that
//! round trip contributes `sum over non-cancelling s of |f_s|^2`. The
//! two-buffer half-step route streams several times less memory than the
//! general per-term route, which matters for balls with hundreds of
//! millions of words.

use crate::algebra::GroupAlgebraElement;
use crate::error::{FrepError, Result};
use crate::word::{Letter, Word};
use crate::C64;
use rand::Rng;

/// Hard cap on ball sizes; beyond this the vectors no longer fit in
/// desk-scale memory.
pub const MAX_BALL_WORDS: u64 = 1_000_000_000;

/// Largest ball kept in double precision for real coefficients; larger
/// balls switch to single-precision storage (accumulations stay f64).
const MAX_F64_WORDS: u64 = 100_000_000;
/// Same switch point for complex coefficients.
const MAX_C64_WORDS: u64 = 50_000_000;

/// Length-first lexicographic indexing of the ball of radius `radius`
/// on `k` generators.
#[derive(Clone, Debug)]
pub struct BallIndexer {
    k: usize,
    radius: usize,
    q: u64,
    /// `offsets[n]` = index of the first word of length `n`;
    /// `offsets[radius + 1]` = total word count.
    offsets: Vec<u64>,
    /// `pow_q[i] = q^i`.
    pow_q: Vec<u64>,
}

impl BallIndexer {
    pub fn new(k: usize, radius: usize) -> Result<Self> {
        if !(2..=26).contains(&k) {
            return Err(FrepError::BadGeneratorCount(k));
        }
        let q = 2 * k as u64 - 1;
        let mut offsets = Vec::with_capacity(radius + 2);
        let mut pow_q = Vec::with_capacity(radius + 1);
        offsets.push(0);
        pow_q.push(1);
        let mut total: u64 = 1;
        for n in 1..=radius {
            offsets.push(total);
            let sphere = 2 * k as u64 * pow_q[n - 1];
            total = total
                .checked_add(sphere)
                .filter(|&t| t <= MAX_BALL_WORDS)
                .ok_or(FrepError::BallTooLarge {
                    k,
                    radius,
                    words: u64::MAX,
                    max: MAX_BALL_WORDS,
                })?;
            pow_q.push(pow_q[n - 1] * q);
        }
        offsets.push(total);
        if total > MAX_BALL_WORDS {
            return Err(FrepError::BallTooLarge {
                k,
                radius,
                words: total,
                max: MAX_BALL_WORDS,
            });
        }
        Ok(BallIndexer {
            k,
            radius,
            q,
            offsets,
            pow_q,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn total(&self) -> u64 {
        self.offsets[self.radius + 1]
    }

    pub fn sphere_start(&self, n: usize) -> u64 {
        self.offsets[n]
    }

    pub fn sphere_len(&self, n: usize) -> u64 {
        self.offsets[n + 1] - self.offsets[n]
    }

    /// Digit of `letter` relative to the letters allowed after `prev`.
    #[inline]
    fn digit_after(prev: Letter, letter: Letter) -> u64 {
        let x = prev.inverse().code();
        let c = letter.code();
        debug_assert_ne!(c, x, "unreduced adjacent pair");
        (c - usize::from(c > x)) as u64
    }

    /// Inverse of [`Self::digit_after`].
    #[inline]
    fn letter_from_digit(prev: Letter, digit: u64) -> Letter {
        let x = prev.inverse().code() as u64;
        let c = if digit >= x { digit + 1 } else { digit };
        Letter::from_code(c as usize)
    }

    /// Index of the first word of length `n` whose letters start with
    /// `prefix` (which must be reduced, with `prefix.len() <= n`).
    fn prefix_start(&self, prefix: &[Letter], n: usize) -> u64 {
        debug_assert!(prefix.len() <= n && n <= self.radius);
        let mut rank = 0u64;
        for (i, &l) in prefix.iter().enumerate() {
            let digit = if i == 0 {
                l.code() as u64
            } else {
                Self::digit_after(prefix[i - 1], l)
            };
            rank += digit * self.pow_q[n - 1 - i];
        }
        self.offsets[n] + rank
    }

    /// Index of a reduced word, or `None` outside the ball.
    pub fn index_of(&self, w: &Word) -> Option<u64> {
        let n = w.len();
        if n > self.radius {
            return None;
        }
        Some(self.prefix_start(w.letters(), n))
    }

    /// Word at a ball index.
    pub fn word_at(&self, index: u64) -> Word {
        assert!(index < self.total());
        let n = match self.offsets.binary_search(&index) {
            Ok(n) => n.min(self.radius),
            Err(n) => n - 1,
        };
        let mut rank = index - self.offsets[n];
        let mut letters = Vec::with_capacity(n);
        for i in 0..n {
            let p = self.pow_q[n - 1 - i];
            let digit = rank / p;
            rank %= p;
            let l = if i == 0 {
                Letter::from_code(digit as usize)
            } else {
                Self::letter_from_digit(letters[i - 1], digit)
            };
            letters.push(l);
        }
        Word::reduce(&letters, self.k).expect("decoded word is reduced")
    }
}

/// Storage scalar for ball vectors. Accumulations are always f64.
pub trait BallScalar: Copy + Send + Sync + 'static {
    const NAME: &'static str;
    /// Relative slack allowed in the Rayleigh-quotient monotonicity
    /// check, sized to the storage rounding noise.
    const RQ_SLACK: f64;
    fn from_c64(z: C64) -> Self;
    fn zero() -> Self;
    fn add(self, o: Self) -> Self;
    fn mul(self, o: Self) -> Self;
    fn norm_sqr_f64(self) -> f64;
    fn is_zero(self) -> bool;
    /// `Re(conj(self) * o)` in f64.
    fn dot_re_f64(self, o: Self) -> f64;
    /// Nonnegative uniform sample in [0, 1). Aligns the start vector
    /// with the entrywise-nonnegative top eigenvector when there is
    /// one, and is an ordinary random start otherwise.
    fn sample_start<R: Rng>(rng: &mut R) -> Self;
}

macro_rules! real_scalar {
    ($t:ty, $name:literal, $slack:expr) => {
        impl BallScalar for $t {
            const NAME: &'static str = $name;
            const RQ_SLACK: f64 = $slack;
            #[inline]
            fn from_c64(z: C64) -> Self {
                debug_assert_eq!(z.im, 0.0);
                z.re as $t
            }
            #[inline]
            fn zero() -> Self {
                0.0
            }
            #[inline]
            fn add(self, o: Self) -> Self {
                self + o
            }
            #[inline]
            fn mul(self, o: Self) -> Self {
                self * o
            }
            #[inline]
            fn norm_sqr_f64(self) -> f64 {
                let v = self as f64;
                v * v
            }
            #[inline]
            fn is_zero(self) -> bool {
                self == 0.0
            }
            #[inline]
            fn dot_re_f64(self, o: Self) -> f64 {
                self as f64 * o as f64
            }
            fn sample_start<R: Rng>(rng: &mut R) -> Self {
                rng.random::<f64>() as $t
            }
        }
    };
}

real_scalar!(f64, "f64", 1e-9);
real_scalar!(f32, "f32", 1e-4);

macro_rules! complex_scalar {
    ($t:ty, $re:ty, $name:literal, $slack:expr) => {
        impl BallScalar for $t {
            const NAME: &'static str = $name;
            const RQ_SLACK: f64 = $slack;
            #[inline]
            fn from_c64(z: C64) -> Self {
                <$t>::new(z.re as $re, z.im as $re)
            }
            #[inline]
            fn zero() -> Self {
                <$t>::new(0.0, 0.0)
            }
            #[inline]
            fn add(self, o: Self) -> Self {
                self + o
            }
            #[inline]
            fn mul(self, o: Self) -> Self {
                self * o
            }
            #[inline]
            fn norm_sqr_f64(self) -> f64 {
                let re = self.re as f64;
                let im = self.im as f64;
                re * re + im * im
            }
            #[inline]
            fn is_zero(self) -> bool {
                self.re == 0.0 && self.im == 0.0
            }
            #[inline]
            fn dot_re_f64(self, o: Self) -> f64 {
                self.re as f64 * o.re as f64 + self.im as f64 * o.im as f64
            }
            fn sample_start<R: Rng>(rng: &mut R) -> Self {
                <$t>::new(rng.random::<f64>() as $re, 0.0)
            }
        }
    };
}

complex_scalar!(num_complex::Complex<f64>, f64, "complex64", 1e-9);
complex_scalar!(num_complex::Complex<f32>, f32, "complex32", 1e-4);

/// Result of one compression power iteration run.
#[derive(Clone, Debug)]
pub struct CompressionEstimate {
    /// Last Rayleigh quotient: a lower bound on the largest eigenvalue
    /// of the compressed positive operator.
    pub rayleigh: f64,
    pub iterations: usize,
    pub ball_words: u64,
    pub scalar: &'static str,
}

/// Squared norm of a slice, accumulated over eight independent f64
/// lanes in a fixed order (a serial accumulator chain would bottleneck
/// the whole engine on add latency).
fn norm_sqr_slice<S: BallScalar>(xs: &[S]) -> f64 {
    let mut lanes = [0.0f64; 8];
    let mut chunks = xs.chunks_exact(8);
    for chunk in &mut chunks {
        for j in 0..8 {
            lanes[j] += chunk[j].norm_sqr_f64();
        }
    }
    let mut tail = 0.0f64;
    for &v in chunks.remainder() {
        tail += v.norm_sqr_f64();
    }
    lanes.iter().sum::<f64>() + tail
}

/// `Re <a, b>` with the same fixed eight-lane accumulation.
fn dot_re_slice<S: BallScalar>(a: &[S], b: &[S]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut lanes = [0.0f64; 8];
    let mut ca = a.chunks_exact(8);
    let mut cb = b.chunks_exact(8);
    for (xa, xb) in (&mut ca).zip(&mut cb) {
        for j in 0..8 {
            lanes[j] += xa[j].dot_re_f64(xb[j]);
        }
    }
    let mut tail = 0.0f64;
    for (&va, &vb) in ca.remainder().iter().zip(cb.remainder()) {
        tail += va.dot_re_f64(vb);
    }
    lanes.iter().sum::<f64>() + tail
}

/// Largest-eigenvalue estimate of `P λ(f* ⋆ f) P` on the ball of the
/// given radius, by power iteration from a seeded nonnegative start.
/// The square root of the returned Rayleigh quotient is a certified
/// lower bound for the regular-representation norm of `f`.
pub fn compression_rayleigh(
    f: &GroupAlgebraElement,
    radius: usize,
    iters: usize,
    seed: u64,
) -> Result<CompressionEstimate> {
    if iters == 0 {
        return Err(FrepError::BadArgument("power iteration needs iters >= 1".into()));
    }
    let idx = BallIndexer::new(f.k(), radius)?;
    let total = idx.total();
    let real = f.terms().all(|(_, c)| c.im == 0.0);
    let fast = f.radius() <= 1 && radius >= 1;
    let est = if real {
        if total <= MAX_F64_WORDS {
            run_power_iteration::<f64>(f, &idx, iters, seed, fast)?
        } else {
            run_power_iteration::<f32>(f, &idx, iters, seed, fast)?
        }
    } else if total <= MAX_C64_WORDS {
        run_power_iteration::<C64>(f, &idx, iters, seed, fast)?
    } else {
        run_power_iteration::<num_complex::Complex<f32>>(f, &idx, iters, seed, fast)?
    };
    Ok(est)
}

/// Length-class coefficients of a radial element (one whose
/// coefficients depend only on word length, with every length class
/// fully present), or `None`. Radial Hermitian elements have real
/// coefficients.
fn radial_coefficients(h: &GroupAlgebraElement) -> Option<Vec<f64>> {
    if h.is_zero() {
        return None;
    }
    let radius = h.radius();
    let k = h.k();
    let mut per_len: Vec<Option<C64>> = vec![None; radius + 1];
    let mut counts = vec![0u64; radius + 1];
    for (w, c) in h.terms() {
        let n = w.len();
        match per_len[n] {
            None => per_len[n] = Some(c),
            Some(prev) if prev == c => {}
            Some(_) => return None,
        }
        counts[n] += 1;
    }
    let mut out = Vec::with_capacity(radius + 1);
    for n in 0..=radius {
        match per_len[n] {
            None => out.push(0.0),
            Some(c) => {
                if c.im != 0.0 {
                    return None;
                }
                // Every word of the length class must carry the
                // coefficient, otherwise the element is not radial.
                if counts[n] != crate::word::words_of_length(k, n) {
                    return None;
                }
                out.push(c.re);
            }
        }
    }
    Some(out)
}

/// Number of reduced words `u` of length `len` whose product with a
/// fixed reduced word of length `n` cancels exactly `depth` letters.
/// Independent of the fixed word. The counts over all depths sum to
/// the sphere size.
fn cancellation_count(k: usize, len: usize, n: usize, depth: usize) -> u64 {
    debug_assert!(depth <= len.min(n));
    let q = 2 * k as u64 - 1;
    if len == 0 {
        return u64::from(depth == 0);
    }
    if n == 0 {
        // Empty fixed word: nothing can cancel and nothing constrains u.
        return crate::word::words_of_length(k, len);
    }
    if depth == len {
        // u is the inverse of the fixed word's prefix.
        1
    } else if depth == n {
        // The fixed word is fully consumed; the remaining prefix of u
        // avoids one letter at the junction.
        q.pow((len - n) as u32)
    } else if depth == 0 {
        // No cancellation: the last letter of u avoids one letter.
        q.pow(len as u32)
    } else {
        // Forced suffix of `depth` letters; the letter before it avoids
        // two distinct letters (reducedness and the cancellation stop).
        (2 * k as u64 - 2) * q.pow((len - depth - 1) as u32)
    }
}

/// Sphere-averaged transfer matrix of the ball compression of a radial
/// element: entry `(m, n)` is the coupling between the normalized
/// indicator vectors of spheres `n` and `m`. The compression commutes
/// with the symmetries fixing the identity, so its top eigenvector is
/// radial and solving this `(R+1)`-dimensional problem gives it
/// exactly.
fn radial_transfer_matrix(coeffs: &[f64], k: usize, radius: usize) -> nalgebra::DMatrix<f64> {
    let sphere = |n: usize| crate::word::words_of_length(k, n) as f64;
    let mut t = nalgebra::DMatrix::<f64>::zeros(radius + 1, radius + 1);
    for n in 0..=radius {
        for (len, &c) in coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            for depth in 0..=len.min(n) {
                let m = len + n - 2 * depth;
                if m > radius {
                    continue;
                }
                let pairs = cancellation_count(k, len, n, depth) as f64 * sphere(n);
                t[(m, n)] += c * pairs / (sphere(m) * sphere(n)).sqrt();
            }
        }
    }
    t
}

/// Top eigenpair of the radial transfer matrix.
fn radial_top_profile(t: &nalgebra::DMatrix<f64>) -> Vec<f64> {
    let eig = nalgebra::SymmetricEigen::new(t.clone());
    let mut best = 0;
    for i in 1..eig.eigenvalues.len() {
        if eig.eigenvalues[i] > eig.eigenvalues[best] {
            best = i;
        }
    }
    let v = eig.eigenvectors.column(best);
    // The Perron eigenvector of a nonnegative transfer matrix can be
    // taken entrywise nonnegative; fix the overall sign by the largest
    // component.
    let mut lead = 0;
    for i in 1..v.len() {
        if v[i].abs() > v[lead].abs() {
            lead = i;
        }
    }
    let sign = if v[lead] < 0.0 { -1.0 } else { 1.0 };
    v.iter().map(|&x| x * sign).collect()
}

/// The iteration climbs a ladder of nested radii `1, 2, ..., R`,
/// warm-starting each radius from the zero-padded final iterate of the
/// previous one. Smaller balls occupy a prefix of the larger ball's
/// index range, so padding is free, and a padded iterate has the same
/// Rayleigh quotient against the larger compression as against the
/// smaller (couplings that leave the small ball see only zeros). The
/// reported bounds are therefore nondecreasing in the radius by
/// construction, not merely in the converged limit. When the squared
/// element is radial the ladder is skipped: the exact sphere-profile
/// start already sits at the top eigenvector.
fn run_power_iteration<S: BallScalar>(
    f: &GroupAlgebraElement,
    idx: &BallIndexer,
    iters: usize,
    seed: u64,
    fast: bool,
) -> Result<CompressionEstimate> {
    let radius = idx.radius();
    let total = idx.total() as usize;
    let h = f.involution().convolve(f)?;
    let letter_info = fast.then(|| LetterCoeffs::from_element(f, idx.k()));

    let mut rng = crate::seed::rng_from_seed(seed);
    let radial = radial_coefficients(&h);
    let rungs: Vec<usize> = if radial.is_some() || radius <= 1 {
        vec![radius]
    } else {
        (1..=radius).collect()
    };

    let mut x: Vec<S> = vec![S::zero(); total];
    match &radial {
        // The squared element is radial, so the top eigenvector of the
        // compression is a sphere profile known from a small exact
        // eigenproblem; start there (with seeded jitter) instead of
        // fighting the near-degenerate radial spectrum from a flat
        // start.
        Some(coeffs) => {
            let t = radial_transfer_matrix(coeffs, idx.k(), radius);
            let profile = radial_top_profile(&t);
            let mut pos = 0usize;
            for (n, p) in profile.iter().enumerate() {
                let base = p / (crate::word::words_of_length(idx.k(), n) as f64).sqrt();
                for _ in 0..idx.sphere_len(n) {
                    let jitter = 1.0 + 1e-3 * (rng.random::<f64>() - 0.5);
                    x[pos] = S::from_c64(C64::new(base * jitter, 0.0));
                    pos += 1;
                }
            }
        }
        None => {
            let first = BallIndexer::new(idx.k(), rungs[0])?.total() as usize;
            for slot in x.iter_mut().take(first) {
                *slot = S::sample_start(&mut rng);
            }
        }
    }

    let mut work: Vec<S> = vec![S::zero(); total];
    let h = (!fast).then_some(h);

    let mut rayleigh = 0.0f64;
    let mut best = 0.0f64;
    let mut done = 0;
    let mut xn2 = f64::NAN;
    'ladder: for &rung in &rungs {
        let idx_r;
        let idx_rung = if rung == radius {
            idx
        } else {
            idx_r = BallIndexer::new(idx.k(), rung)?;
            &idx_r
        };
        let n_r = idx_rung.total() as usize;
        if xn2.is_nan() {
            xn2 = norm_sqr_slice(&x[..n_r]);
            if xn2 == 0.0 {
                return Err(FrepError::Internal("start vector vanished".into()));
            }
        }
        for it in 0..iters {
            let xn = xn2.sqrt();
            if xn == 0.0 {
                // The iterate fell into the kernel of the compression.
                rayleigh = 0.0;
                break 'ladder;
            }
            let (rq, new_n2) = if let Some(info) = &letter_info {
                fast_step(idx_rung, &mut x[..n_r], &mut work[..n_r], info, xn)
            } else {
                general_step(idx_rung, &mut x, &mut work, h.as_ref().unwrap(), xn)
            };
            xn2 = new_n2;
            done += 1;
            // Rayleigh quotients of power iterates of a positive
            // operator are nondecreasing, and a zero-padded iterate
            // carries its quotient to the next rung unchanged; a drop
            // beyond storage noise means a bug.
            if rq + S::RQ_SLACK * best.abs().max(1.0) < best {
                return Err(FrepError::Internal(format!(
                    "Rayleigh quotient decreased: {rq} after {best} at iteration {it} of rung {rung}"
                )));
            }
            best = best.max(rq);
            rayleigh = rq;
        }
    }

    Ok(CompressionEstimate {
        rayleigh,
        iterations: done,
        ball_words: idx.total(),
        scalar: S::NAME,
    })
}

/// Letter-indexed coefficients of a radius-<=1 element.
struct LetterCoeffs {
    ge: C64,
    /// Per letter code, length 2k.
    g: Vec<C64>,
    /// Outer-sphere boundary diagonal: `diag_excl[c]` sums `|f_s|^2`
    /// over the letters that do not cancel against first letter `c`.
    diag_excl: Vec<f64>,
}

impl LetterCoeffs {
    fn from_element(f: &GroupAlgebraElement, k: usize) -> Self {
        let mut ge = C64::new(0.0, 0.0);
        let mut g = vec![C64::new(0.0, 0.0); 2 * k];
        for (w, c) in f.terms() {
            match w.letters() {
                [] => ge = c,
                [l] => g[l.code()] = c,
                _ => unreachable!("fast path requires radius <= 1"),
            }
        }
        let sum_all: f64 = g.iter().map(|z| z.norm_sqr()).sum();
        let diag_excl = (0..2 * k)
            .map(|c| sum_all - g[c ^ 1].norm_sqr())
            .collect();
        LetterCoeffs { ge, g, diag_excl }
    }

    fn adjoint_coeffs(&self) -> (C64, Vec<C64>) {
        let ge = self.ge.conj();
        let g = (0..self.g.len()).map(|c| self.g[c ^ 1].conj()).collect();
        (ge, g)
    }
}

/// One power-iteration step on the two-half-step route. Consumes `x`
/// (length-normalized through the coefficients), leaves the new iterate
/// in `x`, and returns `(rayleigh quotient, squared norm of new x)`.
fn fast_step<S: BallScalar>(
    idx: &BallIndexer,
    x: &mut [S],
    z: &mut [S],
    info: &LetterCoeffs,
    xn: f64,
) -> (f64, f64) {
    let inv = 1.0 / xn;
    let ge1 = S::from_c64(info.ge * inv);
    let g1: Vec<S> = info.g.iter().map(|&c| S::from_c64(c * inv)).collect();
    let (zn2, _) = half_step(idx, z, x, ge1, &g1, None);

    let (ge2, g2c) = info.adjoint_coeffs();
    let ge2 = S::from_c64(ge2);
    let g2: Vec<S> = g2c.iter().map(|&c| S::from_c64(c)).collect();
    // The in-place half-step sees the pre-update x, so it also collects
    // the boundary-diagonal quadratic form of the current iterate.
    let diag = DiagSpec {
        update: info
            .diag_excl
            .iter()
            .map(|&d| S::from_c64(C64::new(d * inv, 0.0)))
            .collect(),
        quad_weight: info.diag_excl.iter().map(|&d| d * inv * inv).collect(),
    };
    let (new_n2, diag_quad) = half_step(idx, x, z, ge2, &g2, Some(&diag));
    let rq = zn2 + diag_quad;
    (rq, new_n2)
}

/// Truncated half-step `out = P λ(g) P input` with `g` supported on the
/// identity and single letters, written target-centric so every output
/// element is assigned exactly once. With `diag` present, additionally
/// adds `diag[first letter] * old out` on the outermost sphere (the
/// in-place boundary correction). Returns the squared norm of `out`.
fn half_step<S: BallScalar>(
    idx: &BallIndexer,
    out: &mut [S],
    input: &[S],
    ge: S,
    g: &[S],
    diag: Option<&DiagSpec<S>>,
) -> (f64, f64) {
    debug_assert!(idx.radius() >= 1, "half-step route requires radius >= 1");
    let k2 = g.len();
    let q = idx.q as usize;
    let radius = idx.radius();
    let mut norm2 = 0.0f64;
    let mut old_quad = 0.0f64;

    // Sphere 0: the identity word.
    {
        let mut acc = ge.mul(input[0]);
        let o1 = idx.sphere_start(1) as usize;
        for (code, &gs) in g.iter().enumerate() {
            // source word: the inverse letter of s.
            acc = acc.add(gs.mul(input[o1 + (code ^ 1)]));
        }
        out[0] = acc;
        norm2 += acc.norm_sqr_f64();
    }

    // Sphere 1: single-letter words.
    if radius >= 1 {
        let o1 = idx.sphere_start(1) as usize;
        let o2 = if radius >= 2 { idx.sphere_start(2) as usize } else { 0 };
        for t in 0..k2 {
            let mut acc = ge.mul(input[o1 + t]).add(g[t].mul(input[0]));
            if radius >= 2 {
                for (s, &gs) in g.iter().enumerate() {
                    if s == t {
                        continue;
                    }
                    // source word s^-1 t: digits (s^1, t relative to s).
                    let d2 = t - usize::from(t > s);
                    acc = acc.add(gs.mul(input[o2 + (s ^ 1) * q + d2]));
                }
            }
            if radius == 1 {
                if let Some(d) = diag {
                    old_quad += d.quad_weight[t] * out[o1 + t].norm_sqr_f64();
                    acc = acc.add(d.update[t].mul(out[o1 + t]));
                }
            }
            out[o1 + t] = acc;
            norm2 += acc.norm_sqr_f64();
        }
    }

    // Spheres 2..=R, one digit-aligned subblock at a time. Streams with
    // an exactly-zero coefficient are dropped up front.
    let ge_zero = ge.is_zero();
    let g_zero: Vec<bool> = g.iter().map(|c| c.is_zero()).collect();
    let mut coeffs: Vec<S> = Vec::with_capacity(k2 + 1);
    let mut starts: Vec<usize> = Vec::with_capacity(k2 + 1);
    for ell in 2..=radius {
        let len = idx.pow_q[ell - 2] as usize;
        let o_ell = idx.sphere_start(ell) as usize;
        let o_below = idx.sphere_start(ell - 1) as usize;
        let o_above = if ell < radius {
            idx.sphere_start(ell + 1) as usize
        } else {
            0
        };
        let q_ell1 = idx.pow_q[ell - 1] as usize;
        for t in 0..k2 {
            let t_letter = Letter::from_code(t);
            for c in 0..q {
                let dst0 = o_ell + t * q_ell1 + c * len;
                coeffs.clear();
                starts.clear();
                // Identity (skipped when the element has no identity part).
                if !ge_zero {
                    coeffs.push(ge);
                    starts.push(dst0);
                }
                // From below: drop the first letter.
                let second = BallIndexer::letter_from_digit(t_letter, c as u64);
                if !g_zero[t] {
                    coeffs.push(g[t]);
                    starts.push(o_below + second.code() * len);
                }
                // From above: prepend s^-1, only inside the ball.
                if ell < radius {
                    let q_above1 = idx.pow_q[ell] as usize;
                    for (s, &gs) in g.iter().enumerate() {
                        if s == t || g_zero[s] {
                            continue;
                        }
                        let d2 = t - usize::from(t > s);
                        starts.push(o_above + (s ^ 1) * q_above1 + d2 * q_ell1 + c * len);
                        coeffs.push(gs);
                    }
                }
                let dcoef = if ell == radius {
                    diag.map(|d| (d.update[t], d.quad_weight[t]))
                } else {
                    None
                };
                let (n2, oq) = fused_block(out, dst0, len, input, &coeffs, &starts, dcoef);
                norm2 += n2;
                old_quad += oq;
            }
        }
    }
    (norm2, old_quad)
}

/// Outer-sphere diagonal passed to the in-place half-step: `update`
/// scales the old values into the new ones, `quad_weight` accumulates
/// the quadratic form of the boundary diagonal against the old vector.
struct DiagSpec<S> {
    update: Vec<S>,
    quad_weight: Vec<f64>,
}

/// Writes `out[dst0 + i] = sum_j coeffs[j] * input[starts[j] + i]`
/// (plus `dcoef * old out` when given) and returns the squared norm of
/// the written block. The source list is small; arities up to seven are
/// unrolled because this loop carries nearly all the memory traffic.
#[inline]
fn fused_block<S: BallScalar>(
    out: &mut [S],
    dst0: usize,
    len: usize,
    input: &[S],
    coeffs: &[S],
    starts: &[usize],
    dcoef: Option<(S, f64)>,
) -> (f64, f64) {
    // Per chunk, the destination block is computed in a pure
    // storage-precision loop (which vectorizes) and the squared norms
    // (of the old chunk for the boundary quadratic form, of the new
    // chunk for the iterate norm) come from passes over the
    // cache-resident chunk with fixed-lane f64 accumulation.
    const CHUNK: usize = 4096;
    macro_rules! run {
        ($($j:tt),*) => {{
            let mut n2 = 0.0f64;
            let mut old_quad = 0.0f64;
            let mut base = 0usize;
            while base < len {
                let take = CHUNK.min(len - base);
                let srcs = ($(&input[starts[$j] + base..starts[$j] + base + take],)*);
                let cs = ($(coeffs[$j],)*);
                let dst = &mut out[dst0 + base..dst0 + base + take];
                match dcoef {
                    None => {
                        for i in 0..take {
                            let mut v = S::zero();
                            $(v = v.add(cs.$j.mul(srcs.$j[i]));)*
                            dst[i] = v;
                        }
                    }
                    Some((d, w)) => {
                        old_quad += w * norm_sqr_slice(dst);
                        for i in 0..take {
                            let mut v = d.mul(dst[i]);
                            $(v = v.add(cs.$j.mul(srcs.$j[i]));)*
                            dst[i] = v;
                        }
                    }
                }
                n2 += norm_sqr_slice(dst);
                base += take;
            }
            (n2, old_quad)
        }};
    }
    match coeffs.len() {
        1 => run!(0),
        2 => run!(0, 1),
        3 => run!(0, 1, 2),
        4 => run!(0, 1, 2, 3),
        5 => run!(0, 1, 2, 3, 4),
        6 => run!(0, 1, 2, 3, 4, 5),
        7 => run!(0, 1, 2, 3, 4, 5, 6),
        _ => {
            let mut old_quad = 0.0f64;
            if let Some((_, w)) = dcoef {
                old_quad = w * norm_sqr_slice(&out[dst0..dst0 + len]);
            }
            let dst = &mut out[dst0..dst0 + len];
            let mut n2 = 0.0f64;
            for i in 0..len {
                let mut v = match dcoef {
                    Some((d, _)) => d.mul(dst[i]),
                    None => S::zero(),
                };
                for (j, &c) in coeffs.iter().enumerate() {
                    v = v.add(c.mul(input[starts[j] + i]));
                }
                dst[i] = v;
                n2 += v.norm_sqr_f64();
            }
            (n2, old_quad)
        }
    }
}

/// One power-iteration step on the general per-term route:
/// `work = P λ(h) P (x / xn)` accumulated term by term on the current
/// rung prefix, copied back into `x`. Returns `(rayleigh quotient,
/// squared norm of the new iterate)`.
fn general_step<S: BallScalar>(
    idx: &BallIndexer,
    x: &mut [S],
    work: &mut [S],
    h: &GroupAlgebraElement,
    xn: f64,
) -> (f64, f64) {
    let n = idx.total() as usize;
    let (x, work) = (&mut x[..n], &mut work[..n]);
    work.fill(S::zero());
    let inv = 1.0 / xn;
    for (u, c) in h.terms() {
        apply_term(idx, work, x, S::from_c64(c * inv), u);
    }
    let rq = dot_re_slice(x, work);
    let n2 = norm_sqr_slice(work);
    x.copy_from_slice(work);
    (rq * inv, n2)
}

/// Accumulates `out += coeff * (left translation by u of input)`,
/// truncated to the ball: the exact subblock decomposition of
/// multiplying every ball word by the fixed reduced word `u` on the
/// left.
fn apply_term<S: BallScalar>(
    idx: &BallIndexer,
    out: &mut [S],
    input: &[S],
    coeff: S,
    u: &Word,
) {
    let m = u.len();
    let radius = idx.radius();
    if m == 0 {
        fused_accumulate(out, 0, input.len(), input, coeff, 0);
        return;
    }
    let ul = u.letters();
    let k2 = 2 * idx.k();
    for n in 0..=radius {
        let max_cd = m.min(n);
        for cd in 0..=max_cd {
            let l = m + n - 2 * cd;
            if l > radius {
                continue;
            }
            if cd == n {
                // Source word fully consumed: single pair.
                let w: Vec<Letter> = ul[m - n..].iter().rev().map(|x| x.inverse()).collect();
                let src = idx.prefix_start(&w, n) as usize;
                let dst = idx.prefix_start(&ul[..m - n], l) as usize;
                out[dst] = out[dst].add(coeff.mul(input[src]));
            } else if cd == m {
                // u fully consumed: targets are plain suffixes.
                let forced: Vec<Letter> = ul.iter().rev().map(|x| x.inverse()).collect();
                let len = idx.pow_q[n - m - 1] as usize;
                for t in 0..k2 {
                    let tl = Letter::from_code(t);
                    if tl == ul[0] {
                        continue;
                    }
                    let mut src_prefix = forced.clone();
                    src_prefix.push(tl);
                    let src = idx.prefix_start(&src_prefix, n) as usize;
                    let dst = (idx.sphere_start(l) + t as u64 * idx.pow_q[l - 1]) as usize;
                    fused_accumulate(out, dst, len, input, coeff, src);
                }
            } else {
                // Partial cancellation: cd < m and cd < n.
                let forced: Vec<Letter> = ul[m - cd..].iter().rev().map(|x| x.inverse()).collect();
                let keep = &ul[..m - cd];
                let stop = keep[keep.len() - 1].inverse();
                let len = idx.pow_q[n - cd - 1] as usize;
                for t in 0..k2 {
                    let tl = Letter::from_code(t);
                    if tl == stop {
                        continue;
                    }
                    if cd >= 1 && tl == ul[m - cd] {
                        continue;
                    }
                    let mut src_prefix = forced.clone();
                    src_prefix.push(tl);
                    let src = idx.prefix_start(&src_prefix, n) as usize;
                    let mut dst_prefix = keep.to_vec();
                    dst_prefix.push(tl);
                    let dst = idx.prefix_start(&dst_prefix, l) as usize;
                    fused_accumulate(out, dst, len, input, coeff, src);
                }
            }
        }
    }
}

#[inline]
fn fused_accumulate<S: BallScalar>(
    out: &mut [S],
    dst0: usize,
    len: usize,
    input: &[S],
    coeff: S,
    src0: usize,
) {
    let src = &input[src0..src0 + len];
    let dst = &mut out[dst0..dst0 + len];
    for i in 0..len {
        dst[i] = dst[i].add(coeff.mul(src[i]));
    }
}
