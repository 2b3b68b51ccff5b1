//! Experiment harness: transporter searches under operator-norm caps,
//! the three-term transport chain for block-extended representations,
//! the cyclicity chain, Monte Carlo genericity runs for tensor
//! products, and density probes.
//!
//! Conventions. Probe indices are zero-based positions into a
//! [`ProbeSequence`]. A "transport query" asks whether some algebra
//! element `f` moves probe `j` to within `delta` of probe `k` under the
//! tensor representation, with the norm of the witness capped by
//! `4 ||x_k|| / ||x_j||`. The cap can be judged against the operator
//! norm on the finite surrogate (the default) or against the certified
//! upper bound for the regular-representation norm; the second mode
//! additionally keeps the surrogate operator norm under the cap so that
//! every returned certificate satisfies the cap-soundness invariant.

use crate::algebra::GroupAlgebraElement;
use crate::error::{FrepError, Result};
use crate::irred::{is_irreducible, IrreducibilityReport};
use crate::lambda;
use crate::linalg;
use crate::rep::{rep_distance, ProbeSequence, Representation};
use crate::seed::derive_seed;
use crate::word::enumerate_words;
use crate::C64;
use nalgebra::{DMatrix, DVector};

/// Relative rank tolerance shared with the irreducibility module.
pub use crate::irred::DEFAULT_RANK_TOL;

/// Which norm the transporter cap is enforced against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum NormSource {
    /// Operator norm of the image on the surrogate representation.
    #[default]
    RepNorm,
    /// Certified upper bound for the regular-representation norm
    /// (min of the word-length-weighted bound and the l1 norm). The
    /// surrogate operator norm is kept under the cap as well.
    LambdaIntervalUpper,
}

/// A membership question about probes `j`, `k` at accuracy `delta`.
/// `f` is present for direct checks and absent for witness searches.
#[derive(Clone, Debug)]
pub struct MembershipQuery {
    pub j: usize,
    pub k: usize,
    pub delta: f64,
    pub f: Option<GroupAlgebraElement>,
}

impl MembershipQuery {
    fn validate(&self, probes: &ProbeSequence) -> Result<()> {
        if self.delta <= 0.0 {
            return Err(FrepError::NonPositiveDelta(self.delta));
        }
        probes.vector(self.j)?;
        probes.vector(self.k)?;
        Ok(())
    }
}

/// A capped least-squares transporter together with its certificate.
#[derive(Clone, Debug)]
pub struct TransporterSolution {
    pub f: GroupAlgebraElement,
    pub residual: f64,
    pub op_norm_on_rep: f64,
    pub norm_cap: f64,
    pub word_budget: usize,
    pub capped: bool,
}

/// Least-squares transport of `x_from` toward `x_to` over elements
/// supported on words of length at most `word_budget`.
///
/// The columns are the word images applied to `x_from` in enumeration
/// order; the minimum-norm solution makes the answer unique and
/// deterministic. If the image's operator norm exceeds `norm_cap`, the
/// element is rescaled onto the cap and the residual recomputed.
pub fn solve_transporter(
    rep: &Representation,
    x_from: &DVector<C64>,
    x_to: &DVector<C64>,
    word_budget: usize,
    norm_cap: f64,
) -> Result<TransporterSolution> {
    solve_transporter_with(rep, x_from, x_to, word_budget, norm_cap, NormSource::RepNorm)
}

pub fn solve_transporter_with(
    rep: &Representation,
    x_from: &DVector<C64>,
    x_to: &DVector<C64>,
    word_budget: usize,
    norm_cap: f64,
    source: NormSource,
) -> Result<TransporterSolution> {
    if x_from.norm() == 0.0 {
        return Err(FrepError::ZeroVector);
    }
    if x_from.len() != rep.dim() || x_to.len() != rep.dim() {
        return Err(FrepError::DimensionMismatch {
            expected: rep.dim(),
            got: x_from.len().max(x_to.len()),
        });
    }
    if !norm_cap.is_finite() || norm_cap <= 0.0 {
        return Err(FrepError::BadArgument(format!(
            "norm cap must be positive and finite, got {norm_cap}"
        )));
    }
    let words = enumerate_words(rep.k(), word_budget)?;
    let columns: Vec<DVector<C64>> = words
        .iter()
        .map(|w| rep.evaluate_word(w) * x_from)
        .collect();
    let a = DMatrix::from_fn(rep.dim(), columns.len(), |r, c| columns[c][r]);
    let coeffs = linalg::min_norm_lstsq(&a, x_to, 1e-12)?;
    let mut f = GroupAlgebraElement::from_terms(
        rep.k(),
        words.iter().cloned().zip(coeffs.iter().copied()),
    );

    let mut op_norm = linalg::operator_norm(&rep.evaluate(&f)?);
    let capped_norm = match source {
        NormSource::RepNorm => op_norm,
        NormSource::LambdaIntervalUpper => {
            let upper = lambda::haagerup_upper(&f).min(f.l1_norm());
            upper.max(op_norm)
        }
    };
    let mut capped = false;
    if capped_norm > norm_cap {
        let scale = norm_cap / capped_norm;
        f = f.scale(C64::new(scale, 0.0));
        op_norm = linalg::operator_norm(&rep.evaluate(&f)?);
        capped = true;
    }
    let residual = (rep.evaluate_apply(&f, x_from)? - x_to).norm();
    Ok(TransporterSolution {
        f,
        residual,
        op_norm_on_rep: op_norm,
        norm_cap,
        word_budget,
        capped,
    })
}

/// Literal evaluation of the transport inequality
/// `||(eta ⊗ pi)(f) x_j - x_k|| < delta`.
pub fn check_transport(
    eta: &Representation,
    pi: &Representation,
    query: &MembershipQuery,
    probes: &ProbeSequence,
) -> Result<bool> {
    query.validate(probes)?;
    let f = query.f.as_ref().ok_or(FrepError::MissingElement)?;
    let rep = eta.tensor(pi)?;
    if probes.dim() != rep.dim() {
        return Err(FrepError::DimensionMismatch {
            expected: rep.dim(),
            got: probes.dim(),
        });
    }
    let moved = rep.evaluate_apply(f, probes.vector(query.j)?)?;
    Ok((moved - probes.vector(query.k)?).norm() < query.delta)
}

/// Searches for a transport witness under the cap
/// `4 ||x_k|| / ||x_j||`. Absence of a witness is a value, not an
/// error; a returned witness always satisfies the literal inequality.
pub fn find_transport_witness(
    eta: &Representation,
    pi: &Representation,
    query: &MembershipQuery,
    probes: &ProbeSequence,
    word_budget: usize,
    source: NormSource,
) -> Result<Option<TransporterSolution>> {
    query.validate(probes)?;
    let rep = eta.tensor(pi)?;
    if probes.dim() != rep.dim() {
        return Err(FrepError::DimensionMismatch {
            expected: rep.dim(),
            got: probes.dim(),
        });
    }
    let x_j = probes.vector(query.j)?;
    let x_k = probes.vector(query.k)?;
    let cap = 4.0 * x_k.norm() / x_j.norm();
    let solution = solve_transporter_with(&rep, x_j, x_k, word_budget, cap, source)?;
    if solution.residual < query.delta {
        Ok(Some(solution))
    } else {
        Ok(None)
    }
}

/// Verification record for the three-term transport chain on a
/// block-extended representation.
#[derive(Clone, Debug)]
pub struct ChainReport {
    pub delta: f64,
    /// Block transport error `||(eta ⊗ pi_n)(f) x_j' - x_k'||`.
    pub term1: f64,
    /// Operator-norm bound through the complement:
    /// `||eta(f)|| * ||x_j - x_j'||`.
    pub term2: f64,
    /// `||x_k - x_k'||`.
    pub term3: f64,
    pub x_j_proj_err: f64,
    pub x_k_proj_err: f64,
    pub x_j_norm: f64,
    pub x_k_norm: f64,
    /// `||x_k'|| / ||x_j'|| < 2 ||x_k|| / ||x_j||`.
    pub ratio_ok: bool,
    /// `||x_k - x_k'|| < delta / 3`.
    pub proj_cond_k_ok: bool,
    /// `||x_j - x_j'|| < delta ||x_j|| / (12 ||x_k||)`.
    pub proj_cond_j_ok: bool,
    /// Transport error of the extended representation on the full
    /// vectors.
    pub total: f64,
    pub passed: bool,
    pub solution: TransporterSolution,
}

/// Splits a tensor-space vector into its `H (x) M_n` block (as a vector
/// of the block space) and the norm of the dropped complement part.
fn project_to_block(
    x: &DVector<C64>,
    eta_dim: usize,
    total_dim: usize,
    block_dim: usize,
) -> (DVector<C64>, f64) {
    let mut block = DVector::<C64>::zeros(eta_dim * block_dim);
    let mut dropped = 0.0f64;
    for ih in 0..eta_dim {
        for im in 0..total_dim {
            let v = x[ih * total_dim + im];
            if im < block_dim {
                block[ih * block_dim + im] = v;
            } else {
                dropped += v.norm_sqr();
            }
        }
    }
    (block, dropped.sqrt())
}

/// Runs the transport chain: project the probes onto the
/// `eta (x) pi_n` block, solve the capped transporter there, extend
/// `pi_n` by the identity, and check each term of the triangle
/// decomposition against `delta / 3` and the total against `delta`.
///
/// Unsatisfied projection conditions are reported, not raised; the
/// caller's remedy is a larger block. Reducible `pi_n` or a reducible
/// tensor block are precondition failures and are raised.
#[allow(clippy::too_many_arguments)]
pub fn verify_transport_chain(
    eta: &Representation,
    pi_n: &Representation,
    total_dim: usize,
    x_j: &DVector<C64>,
    x_k: &DVector<C64>,
    delta: f64,
    word_budget: usize,
    tol: f64,
) -> Result<ChainReport> {
    if delta <= 0.0 {
        return Err(FrepError::NonPositiveDelta(delta));
    }
    if total_dim < pi_n.dim() {
        return Err(FrepError::DimensionMismatch {
            expected: pi_n.dim(),
            got: total_dim,
        });
    }
    let full_dim = eta.dim() * total_dim;
    if x_j.len() != full_dim || x_k.len() != full_dim {
        return Err(FrepError::DimensionMismatch {
            expected: full_dim,
            got: x_j.len().max(x_k.len()),
        });
    }

    let pi_report = is_irreducible(pi_n, tol);
    if !pi_report.is_irreducible {
        return Err(FrepError::ReducibleInput {
            context: "transport chain block representation",
            commutant_dim: pi_report.commutant_dim,
        });
    }
    let block_rep = eta.tensor(pi_n)?;
    let block_report = is_irreducible(&block_rep, tol);
    if !block_report.is_irreducible {
        return Err(FrepError::ReducibleInput {
            context: "transport chain tensor block",
            commutant_dim: block_report.commutant_dim,
        });
    }

    let (xj_block, xj_err) = project_to_block(x_j, eta.dim(), total_dim, pi_n.dim());
    let (xk_block, xk_err) = project_to_block(x_k, eta.dim(), total_dim, pi_n.dim());
    let xj_norm = x_j.norm();
    let xk_norm = x_k.norm();
    if xj_block.norm() <= 1e-12 * xj_norm {
        return Err(FrepError::BadArgument(
            "projection of x_j onto the block vanishes; transport from the block is impossible"
                .into(),
        ));
    }

    let cap = 2.0 * xk_block.norm() / xj_block.norm();
    let solution = solve_transporter(&block_rep, &xj_block, &xk_block, word_budget, cap)?;

    // Recompute every term from scratch rather than trusting the solver.
    let term1 = (block_rep.evaluate_apply(&solution.f, &xj_block)? - &xk_block).norm();
    let eta_image_norm = linalg::operator_norm(&eta.evaluate(&solution.f)?);
    let term2 = eta_image_norm * xj_err;
    let term3 = xk_err;

    let extended = eta.tensor(&pi_n.extend_with_identity(total_dim)?)?;
    let total = (extended.evaluate_apply(&solution.f, x_j)? - x_k).norm();

    let third = delta / 3.0;
    let passed = term1 < third && term2 < third && term3 < third && total < delta;
    Ok(ChainReport {
        delta,
        term1,
        term2,
        term3,
        x_j_proj_err: xj_err,
        x_k_proj_err: xk_err,
        x_j_norm: xj_norm,
        x_k_norm: xk_norm,
        ratio_ok: xk_block.norm() / xj_block.norm() < 2.0 * xk_norm / xj_norm,
        proj_cond_k_ok: xk_err < third,
        proj_cond_j_ok: xj_err < delta * xj_norm / (12.0 * xk_norm),
        total,
        passed,
        solution,
    })
}

/// Verification record for the cyclicity chain.
#[derive(Clone, Debug)]
pub struct CyclicityReport {
    pub epsilon: f64,
    pub v: DVector<C64>,
    pub y: DVector<C64>,
    pub delta1: f64,
    pub delta2: f64,
    /// Dyadic accuracy actually used for the witness search.
    pub delta_used: f64,
    pub chosen_j: Option<usize>,
    pub chosen_k: Option<usize>,
    pub f: GroupAlgebraElement,
    pub op_norm: f64,
    /// `op_norm * delta1`, which stays at or below `epsilon / 3` when
    /// the witness respects the cap.
    pub bound_product: f64,
    pub final_error: f64,
    pub passed: bool,
}

/// Why a cyclicity trial produced no report.
#[derive(Clone, Debug)]
pub enum CyclicityFailure {
    /// No probe within `delta1` of `v`; carries the best distance seen.
    ProbeTooCoarseForV { needed: f64, achieved: f64 },
    /// No probe within `min(delta2, ||y||/2)` of `y`.
    ProbeTooCoarseForY { needed: f64, achieved: f64 },
    /// The capped transporter could not reach accuracy `delta`.
    NoWitness { delta: f64, cap: f64, residual: f64 },
}

#[derive(Clone, Debug)]
pub enum CyclicityOutcome {
    Report(Box<CyclicityReport>),
    Failure(CyclicityFailure),
}

/// Largest dyadic `2^-m <= x` (m >= 1), the rational accuracy grid.
pub fn dyadic_below(x: f64) -> f64 {
    assert!(x > 0.0, "dyadic grid needs a positive bound");
    let mut d = 0.5;
    while d > x {
        d *= 0.5;
    }
    d
}

/// Runs the cyclicity chain for target accuracy `epsilon`:
/// `delta1 = min(eps ||v|| / (48 ||y||), ||v|| / 2)`, `delta2 = eps / 3`,
/// nearest-probe selection for `v` and `y` (first index in sequence
/// order meeting the bound), a capped witness search between the chosen
/// probes at a dyadic accuracy below `delta2`, and the final evaluation
/// `||(eta ⊗ pi)(f) v - y|| < epsilon`.
///
/// A zero `y` falls outside the chain's arithmetic (`delta1` would
/// divide by zero); it is answered exactly by `f = 0`.
#[allow(clippy::too_many_arguments)]
pub fn verify_cyclicity_chain(
    eta: &Representation,
    pi: &Representation,
    v: &DVector<C64>,
    y: &DVector<C64>,
    epsilon: f64,
    probes: &ProbeSequence,
    word_budget: usize,
    source: NormSource,
) -> Result<CyclicityOutcome> {
    if epsilon <= 0.0 {
        return Err(FrepError::BadArgument(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    if v.norm() == 0.0 {
        return Err(FrepError::ZeroVector);
    }
    let rep = eta.tensor(pi)?;
    if v.len() != rep.dim() || y.len() != rep.dim() || probes.dim() != rep.dim() {
        return Err(FrepError::DimensionMismatch {
            expected: rep.dim(),
            got: v.len().max(y.len()).max(probes.dim()),
        });
    }

    if y.norm() == 0.0 {
        let f = GroupAlgebraElement::zero(rep.k());
        return Ok(CyclicityOutcome::Report(Box::new(CyclicityReport {
            epsilon,
            v: v.clone(),
            y: y.clone(),
            delta1: v.norm() / 2.0,
            delta2: epsilon / 3.0,
            delta_used: 0.0,
            chosen_j: None,
            chosen_k: None,
            f,
            op_norm: 0.0,
            bound_product: 0.0,
            final_error: 0.0,
            passed: true,
        })));
    }

    let delta1 = (epsilon * v.norm() / (48.0 * y.norm())).min(v.norm() / 2.0);
    let delta2 = epsilon / 3.0;

    let pick = |target: &DVector<C64>, needed: f64| -> (Option<usize>, f64) {
        let mut best = f64::INFINITY;
        for (i, x) in probes.vectors().iter().enumerate() {
            let dist = (target - x).norm();
            if dist < needed {
                return (Some(i), dist);
            }
            best = best.min(dist);
        }
        (None, best)
    };

    let (j, j_best) = pick(v, delta1);
    let Some(j) = j else {
        return Ok(CyclicityOutcome::Failure(
            CyclicityFailure::ProbeTooCoarseForV {
                needed: delta1,
                achieved: j_best,
            },
        ));
    };
    let y_needed = delta2.min(y.norm() / 2.0);
    let (kk, k_best) = pick(y, y_needed);
    let Some(kk) = kk else {
        return Ok(CyclicityOutcome::Failure(
            CyclicityFailure::ProbeTooCoarseForY {
                needed: y_needed,
                achieved: k_best,
            },
        ));
    };

    let delta_used = dyadic_below(delta2);
    let x_j = probes.vector(j)?;
    let x_k = probes.vector(kk)?;
    let cap = 4.0 * x_k.norm() / x_j.norm();
    let solution = solve_transporter_with(&rep, x_j, x_k, word_budget, cap, source)?;
    if solution.residual >= delta_used {
        return Ok(CyclicityOutcome::Failure(CyclicityFailure::NoWitness {
            delta: delta_used,
            cap,
            residual: solution.residual,
        }));
    }

    let final_error = (rep.evaluate_apply(&solution.f, v)? - y).norm();
    Ok(CyclicityOutcome::Report(Box::new(CyclicityReport {
        epsilon,
        v: v.clone(),
        y: y.clone(),
        delta1,
        delta2,
        delta_used,
        chosen_j: Some(j),
        chosen_k: Some(kk),
        op_norm: solution.op_norm_on_rep,
        bound_product: solution.op_norm_on_rep * delta1,
        f: solution.f,
        final_error,
        passed: final_error < epsilon,
    })))
}

/// One Monte Carlo genericity trial.
#[derive(Clone, Debug)]
pub struct GenericityRow {
    pub trial: u64,
    pub pi_seed: u64,
    pub commutant_dim: usize,
    pub algebra_dim: usize,
    pub is_irreducible: bool,
}

#[derive(Clone, Debug)]
pub struct GenericitySummary {
    pub pi_dim: usize,
    pub trials: usize,
    pub irreducible: usize,
    pub rows: Vec<GenericityRow>,
}

/// Tests irreducibility of `eta ⊗ pi` for Haar-random `pi` of dimension
/// `pi_dim`, one report row per trial. Per-trial seeds are derived from
/// the master seed, so trials are order-independent.
pub fn genericity_experiment(
    eta: &Representation,
    pi_dim: usize,
    trials: usize,
    seed: u64,
    tol: f64,
) -> Result<GenericitySummary> {
    if trials == 0 {
        return Err(FrepError::BadArgument("need at least one trial".into()));
    }
    let mut rows = Vec::with_capacity(trials);
    let mut irreducible = 0;
    for trial in 0..trials as u64 {
        let pi_seed = derive_seed(seed, trial);
        let pi = crate::rep::random_haar_rep(eta.k(), pi_dim, pi_seed)?;
        let report = is_irreducible(&eta.tensor(&pi)?, tol);
        if report.is_irreducible {
            irreducible += 1;
        }
        rows.push(GenericityRow {
            trial,
            pi_seed,
            commutant_dim: report.commutant_dim,
            algebra_dim: report.algebra_dim,
            is_irreducible: report.is_irreducible,
        });
    }
    Ok(GenericitySummary {
        pi_dim,
        trials,
        irreducible,
        rows,
    })
}

/// The two reducible control companions for a genericity run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ControlKind {
    /// `pi` = trivial two-dimensional representation.
    TrivialPi,
    /// `pi` = the same representation as `eta`.
    SamePi,
}

/// Runs one control: builds the designated non-generic `pi` and reports
/// on `eta ⊗ pi`. Both controls must come out reducible.
pub fn genericity_control(
    eta: &Representation,
    kind: ControlKind,
    tol: f64,
) -> Result<IrreducibilityReport> {
    let pi = match kind {
        ControlKind::TrivialPi => Representation::trivial(eta.k(), 2)?,
        ControlKind::SamePi => eta.clone(),
    };
    Ok(is_irreducible(&eta.tensor(&pi)?, tol))
}

/// One block size in a density probe.
#[derive(Clone, Debug)]
pub struct DensityProbeRow {
    pub block_dim: usize,
    /// Metric distance from `pi` to its block-diagonal truncation.
    pub distance: f64,
    pub witness_found: bool,
    pub residual: Option<f64>,
    pub capped: Option<bool>,
}

/// For each block size `n`, re-unitarizes the leading `n x n` corner of
/// every generator of `pi` (polar correction; blocks already unitary are
/// kept bit-exact), extends by the identity, measures the metric
/// distance to `pi`, and searches for a transport witness on the
/// modified representation.
#[allow(clippy::too_many_arguments)]
pub fn density_probe(
    pi: &Representation,
    eta: &Representation,
    query: &MembershipQuery,
    dims_to_try: &[usize],
    word_budget: usize,
    source: NormSource,
    metric_probes: &ProbeSequence,
    tensor_probes: &ProbeSequence,
) -> Result<Vec<DensityProbeRow>> {
    let mut rows = Vec::with_capacity(dims_to_try.len());
    for &n in dims_to_try {
        if n == 0 || n > pi.dim() {
            return Err(FrepError::DimensionMismatch {
                expected: pi.dim(),
                got: n,
            });
        }
        let gens: Vec<DMatrix<C64>> = pi
            .generators()
            .iter()
            .map(|g| {
                let block = g.view((0, 0), (n, n)).into_owned();
                let unitary = linalg::polar_unitary(&block, 1e-12);
                let mut m = linalg::identity(pi.dim());
                m.view_mut((0, 0), (n, n)).copy_from(&unitary);
                m
            })
            .collect();
        let modified = Representation::new_with_tol(pi.k(), gens, 1e-8)?;
        let distance = rep_distance(pi, &modified, metric_probes)?;
        let witness =
            find_transport_witness(eta, &modified, query, tensor_probes, word_budget, source)?;
        rows.push(DensityProbeRow {
            block_dim: n,
            distance,
            witness_found: witness.is_some(),
            residual: witness.as_ref().map(|s| s.residual),
            capped: witness.as_ref().map(|s| s.capped),
        });
    }
    Ok(rows)
}

/// Probe pair concentrated on the leading tensor block: complement
/// components are scaled by `eps_j`, `eps_k` so the projection
/// conditions of the transport chain are satisfiable at the chosen
/// block size. Deterministic per seed.
pub fn block_heavy_pair(
    eta_dim: usize,
    total_dim: usize,
    block_dim: usize,
    eps_j: f64,
    eps_k: f64,
    seed: u64,
) -> (DVector<C64>, DVector<C64>) {
    let mut rng = crate::seed::rng_from_seed(seed);
    let mut make = |eps: f64| {
        let mut x = crate::rep::gaussian_vector(eta_dim * total_dim, &mut rng);
        for ih in 0..eta_dim {
            for im in block_dim..total_dim {
                x[ih * total_dim + im] *= C64::new(eps, 0.0);
            }
        }
        x
    };
    let xj = make(eps_j);
    let xk = make(eps_k);
    (xj, xk)
}

/// Generates one cyclicity trial: a vector within `v_offset * delta1`
/// of a random probe and a target within `y_offset` of the probe
/// tolerance around another random probe. Mirrors the chain's
/// hypothesis that the probe sequence is dense around the data.
pub fn cyclicity_trial_vectors(
    probes: &ProbeSequence,
    epsilon: f64,
    v_offset: f64,
    y_offset: f64,
    seed: u64,
) -> (DVector<C64>, DVector<C64>) {
    use rand::Rng;
    let mut rng = crate::seed::rng_from_seed(seed);
    let dim = probes.dim();
    let j0 = rng.random_range(0..probes.len());
    let k0 = rng.random_range(0..probes.len());
    let x_j = probes.vector(j0).expect("index in range");
    let x_k = probes.vector(k0).expect("index in range");
    // Target first: its norm fixes delta1.
    let y_tol = (epsilon / 3.0).min(x_k.norm() / 2.0);
    let dir = crate::rep::gaussian_vector(dim, &mut rng);
    let scale = y_offset * y_tol / dir.norm();
    let y = x_k + dir * C64::new(scale, 0.0);
    let delta1 = (epsilon * x_j.norm() / (48.0 * y.norm())).min(x_j.norm() / 2.0);
    let dir = crate::rep::gaussian_vector(dim, &mut rng);
    let scale = v_offset * delta1 / dir.norm();
    let v = x_j + dir * C64::new(scale, 0.0);
    (v, y)
}

/// One cell of a finite conjunction of witness searches over a
/// `(j, k, delta)` grid.
#[derive(Clone, Debug)]
pub struct GridCell {
    pub j: usize,
    pub k: usize,
    pub delta: f64,
    pub witness_found: bool,
    pub residual: f64,
    pub op_norm: f64,
    pub capped: bool,
}

#[derive(Clone, Debug)]
pub struct GridReport {
    pub cells: Vec<GridCell>,
    /// True when every cell admitted a witness.
    pub all_found: bool,
}

/// Evaluates witness searches over the full grid
/// `js x ks x {2^-m : m in dyadic_exponents}`. Cells are visited in
/// a fixed order and reported individually.
#[allow(clippy::too_many_arguments)]
pub fn membership_grid(
    eta: &Representation,
    pi: &Representation,
    js: &[usize],
    ks: &[usize],
    dyadic_exponents: &[u32],
    probes: &ProbeSequence,
    word_budget: usize,
    source: NormSource,
) -> Result<GridReport> {
    let mut cells = Vec::new();
    let mut all_found = true;
    for &j in js {
        for &k in ks {
            for &m in dyadic_exponents {
                if m == 0 {
                    return Err(FrepError::BadArgument(
                        "dyadic exponents start at 1 (delta = 1/2)".into(),
                    ));
                }
                let delta = 0.5f64.powi(m as i32);
                let query = MembershipQuery {
                    j,
                    k,
                    delta,
                    f: None,
                };
                let witness =
                    find_transport_witness(eta, pi, &query, probes, word_budget, source)?;
                let (found, residual, op_norm, capped) = match &witness {
                    Some(s) => (true, s.residual, s.op_norm_on_rep, s.capped),
                    None => (false, f64::NAN, f64::NAN, false),
                };
                all_found &= found;
                cells.push(GridCell {
                    j,
                    k,
                    delta,
                    witness_found: found,
                    residual,
                    op_norm,
                    capped,
                });
            }
        }
    }
    Ok(GridReport { cells, all_found })
}
