//! Radon-type analysis of trained separators.
//!
//! Projecting the support vectors of each class onto the separating
//! hyperplane gives two point sets whose convex hulls always meet, and the
//! dual multipliers name a common point explicitly: with
//! `C = Σ_{y_i = +1} α_i`, the weights `α_i / C` are convex combinations on
//! either side whose projections coincide. Under strong general position the
//! meeting point is unique and there are at most `n + 1` support vectors.
//! This module computes that point, classifies configurations, audits the
//! genericity conditions and turns a violated bound into a diagnosis.

use rayon::prelude::*;
use serde::Serialize;

use crate::geometry::{self, ParallelFlats, PointSet, AUDIT_RANK_TOL};
use crate::numerics::{self, Matrix};
use crate::sampling;
use crate::svm::{
    self, kkt_check, support_vectors, Label, LabeledPointSet, SvmSolution, TrainParams,
};
use crate::{Error, Result, Verdict};

/// KKT tolerance a solution must meet before its duals are trusted.
pub const KKT_TOL: f64 = 1e-8;
/// Agreement required between the two sides of the dual Radon point and
/// between it and any hull witness.
pub const RADON_POINT_TOL: f64 = 1e-8;
/// Largest point set [`shatter_check`] enumerates labelings for.
pub const SHATTER_MAX_POINTS: usize = 20;

/// Margin threshold matched to the accuracy of the solver that produced
/// `sol`: points closer to the margin than the solver tolerance cannot be
/// told apart from margin points.
pub fn effective_tau(sol: &SvmSolution) -> f64 {
    svm::DEFAULT_TAU.max(sol.tol)
}

/// Projection of the dual convex combinations onto the separating
/// hyperplane.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualRadonPoint {
    pub point: Vec<f64>,
    /// `C = Σ_{y_i = +1} α_i = Σ_{y_i = −1} α_i`
    pub weight_total: f64,
    /// `α_i / C` for every training point.
    pub weights: Vec<f64>,
    /// Distance between the projected positive and negative combinations.
    pub side_gap: f64,
    /// Largest `‖Σ_i weight_i ρ(x_i) − point‖` over the two classes, with
    /// the sum taken over projected support vectors of that class.
    pub witness_residual: f64,
    /// The projected support-vector hulls intersect per the LP test.
    pub in_projected_hulls: bool,
}

fn project_all(sol: &SvmSolution, pts: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    pts.iter()
        .map(|p| numerics::project_onto_hyperplane(p, &sol.w, sol.b))
        .collect()
}

/// Projections of the positive and negative points among `support`.
pub fn projected_support_hulls(
    sol: &SvmSolution,
    data: &LabeledPointSet,
    support: &[usize],
) -> Result<(PointSet, PointSet)> {
    let pos = data.class_points(Label::Positive, Some(support));
    let neg = data.class_points(Label::Negative, Some(support));
    Ok((
        PointSet::with_dim(data.dim(), project_all(sol, pos.points())?)?,
        PointSet::with_dim(data.dim(), project_all(sol, neg.points())?)?,
    ))
}

/// The Radon point named by the dual multipliers.
///
/// Fails with [`Error::NotAnSvmSolution`] when `sol` does not satisfy the
/// KKT conditions at [`KKT_TOL`]: a claimed separator whose projected
/// support hulls miss each other cannot be optimal.
pub fn radon_point_from_duals(sol: &SvmSolution, data: &LabeledPointSet) -> Result<DualRadonPoint> {
    let report = kkt_check(sol, data);
    if !report.passes(KKT_TOL) {
        return Err(Error::NotAnSvmSolution {
            residual: report.max_residual(),
            tol: KKT_TOL,
        });
    }
    let n = data.dim();
    let class_total = |label| -> f64 {
        data.indices_of(label).iter().map(|&i| sol.alphas[i]).sum()
    };
    let c = class_total(Label::Positive);
    if c <= 0.0 {
        return Err(Error::NotAnSvmSolution {
            residual: f64::INFINITY,
            tol: KKT_TOL,
        });
    }
    let weights: Vec<f64> = sol.alphas.iter().map(|a| a / c).collect();
    let combination = |label| {
        let mut v = vec![0.0; n];
        for i in data.indices_of(label) {
            numerics::axpy(weights[i], data.point(i), &mut v);
        }
        v
    };
    let pos_point = numerics::project_onto_hyperplane(&combination(Label::Positive), &sol.w, sol.b)?;
    let neg_point = numerics::project_onto_hyperplane(&combination(Label::Negative), &sol.w, sol.b)?;
    let side_gap = numerics::norm(&numerics::sub(&pos_point, &neg_point));
    if side_gap > RADON_POINT_TOL {
        return Err(Error::NotAnSvmSolution {
            residual: side_gap,
            tol: RADON_POINT_TOL,
        });
    }

    // Reproduce the point from projected support vectors with the same
    // weights, class by class.
    let support = support_vectors(sol, data, effective_tau(sol));
    let mut witness_residual: f64 = 0.0;
    for label in [Label::Positive, Label::Negative] {
        let mut v = vec![0.0; n];
        let mut mass = 0.0;
        for &i in &support.by_margin {
            if data.label(i) == label {
                let p = numerics::project_onto_hyperplane(data.point(i), &sol.w, sol.b)?;
                numerics::axpy(weights[i], &p, &mut v);
                mass += weights[i];
            }
        }
        // weight outside the margin set shows up as missing mass
        let miss = (1.0 - mass).abs() * numerics::norm(&pos_point).max(1.0);
        witness_residual = witness_residual
            .max(numerics::norm(&numerics::sub(&v, &pos_point)))
            .max(miss);
    }
    let (ppos, pneg) = projected_support_hulls(sol, data, &support.by_margin)?;
    let in_projected_hulls = !ppos.is_empty()
        && !pneg.is_empty()
        && geometry::hulls_intersect(&ppos, &pneg)?.intersects;

    Ok(DualRadonPoint {
        point: pos_point,
        weight_total: c,
        weights,
        side_gap,
        witness_residual,
        in_projected_hulls,
    })
}

/// True when the projected positive and negative support flats share no
/// direction, so the projected hulls meet in a single point.
pub fn verify_unique_radon_point(sol: &SvmSolution, data: &LabeledPointSet) -> Result<bool> {
    let support = support_vectors(sol, data, effective_tau(sol));
    let (ppos, pneg) = projected_support_hulls(sol, data, &support.by_margin)?;
    Ok(geometry::direction_spans_independent(&ppos, &pneg, AUDIT_RANK_TOL))
}

/// Condition (ii) certificate: the vectors `(y_i x_i, y_i)` over `indices`
/// are linearly independent, so the nonnegative dual representation of `w`
/// on them is unique.
pub fn duals_independent(data: &LabeledPointSet, indices: &[usize]) -> bool {
    if indices.is_empty() {
        return true;
    }
    if indices.len() > data.dim() + 1 {
        return false;
    }
    // Translating and scaling x acts on (y x, y) by an invertible map, so
    // normalizing first does not change the rank.
    let n = data.dim();
    let mut center = vec![0.0; n];
    for &i in indices {
        numerics::axpy(1.0 / indices.len() as f64, data.point(i), &mut center);
    }
    let scale = indices
        .iter()
        .flat_map(|&i| data.point(i).iter().zip(&center).map(|(x, c)| (x - c).abs()))
        .fold(0.0, f64::max);
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let rows: Vec<Vec<f64>> = indices
        .iter()
        .map(|&i| {
            let y = data.y(i);
            let mut r: Vec<f64> = data
                .point(i)
                .iter()
                .zip(&center)
                .map(|(x, c)| y * (x - c) / scale)
                .collect();
            r.push(y);
            r
        })
        .collect();
    let m = Matrix::from_rows(&rows).expect("uniform rows");
    numerics::rank(&m, AUDIT_RANK_TOL) == indices.len()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Finding {
    /// Margin and dual criteria name different support sets.
    SupportSetMismatch,
    /// The solution does not pass the KKT check.
    KktFailure,
    /// Flats spanned by support vectors contain parallel directions.
    ParallelFlats,
    /// The active multipliers do not determine `w` uniquely.
    DependentDuals,
    /// More than `n + 1` support vectors.
    ExceedsBound,
    /// Too many subset pairs to audit for parallel flats.
    AuditTooLarge,
    /// Projected support hulls were found disjoint.
    ProjectedHullsDisjoint,
    /// A unique Radon point was expected but the hull witness differs from
    /// the dual point.
    WitnessMismatch,
}

/// Support-vector configuration of a trained separator.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigurationReport {
    pub n_pos_sv: usize,
    pub n_neg_sv: usize,
    pub support_indices: Vec<usize>,
    pub dual_support: Vec<usize>,
    pub radon_point: Option<Vec<f64>>,
    pub hulls_intersect: bool,
    pub unique_point: bool,
    pub strong_gp_condition_i: bool,
    pub strong_gp_condition_ii: bool,
    pub exceeds_bound: bool,
    pub degeneracy_flags: Vec<Finding>,
    pub tau: f64,
}

impl ConfigurationReport {
    pub fn total_sv(&self) -> usize {
        self.n_pos_sv + self.n_neg_sv
    }

    pub fn strong_general_position(&self) -> bool {
        self.strong_gp_condition_i && self.strong_gp_condition_ii
    }
}

/// Fills a [`ConfigurationReport`]. Degeneracies are reported as findings.
pub fn classify_configuration(sol: &SvmSolution, data: &LabeledPointSet) -> ConfigurationReport {
    classify_configuration_with_tau(sol, data, effective_tau(sol))
}

/// [`classify_configuration`] with an explicit margin threshold.
pub fn classify_configuration_with_tau(
    sol: &SvmSolution,
    data: &LabeledPointSet,
    tau: f64,
) -> ConfigurationReport {
    let sets = support_vectors(sol, data, tau);
    let mut flags = Vec::new();
    if sets.degenerate {
        flags.push(Finding::SupportSetMismatch);
    }
    let support = &sets.by_margin;
    let pos = data.class_points(Label::Positive, Some(support));
    let neg = data.class_points(Label::Negative, Some(support));

    let kkt_ok = kkt_check(sol, data).passes(KKT_TOL);
    if !kkt_ok {
        flags.push(Finding::KktFailure);
    }
    let dual_point = if kkt_ok {
        radon_point_from_duals(sol, data).ok()
    } else {
        None
    };

    let projected = projected_support_hulls(sol, data, support).ok();
    let hull_witness = projected.as_ref().and_then(|(pp, pn)| {
        if pp.is_empty() || pn.is_empty() {
            None
        } else {
            geometry::hulls_intersect(pp, pn).ok()
        }
    });
    let hulls_intersect = hull_witness.as_ref().is_some_and(|h| h.intersects);
    if !hulls_intersect {
        flags.push(Finding::ProjectedHullsDisjoint);
    }
    let unique_point = projected
        .as_ref()
        .is_some_and(|(pp, pn)| geometry::direction_spans_independent(pp, pn, AUDIT_RANK_TOL));
    if let (true, Some(dp), Some(w)) = (
        unique_point,
        dual_point.as_ref(),
        hull_witness.as_ref().and_then(|h| h.witness.as_ref()),
    ) {
        if numerics::norm(&numerics::sub(&dp.point, w)) > RADON_POINT_TOL {
            flags.push(Finding::WitnessMismatch);
        }
    }

    let strong_gp_condition_i = match geometry::flats_parallel_free(&pos, &neg) {
        Ok(v) => v.holds(),
        Err(_) => {
            flags.push(Finding::AuditTooLarge);
            false
        }
    };
    if !strong_gp_condition_i && !flags.contains(&Finding::AuditTooLarge) {
        flags.push(Finding::ParallelFlats);
    }
    let strong_gp_condition_ii = duals_independent(data, &sets.by_dual);
    if !strong_gp_condition_ii {
        flags.push(Finding::DependentDuals);
    }
    let exceeds_bound = support.len() > data.dim() + 1;
    if exceeds_bound {
        flags.push(Finding::ExceedsBound);
    }

    ConfigurationReport {
        n_pos_sv: pos.len(),
        n_neg_sv: neg.len(),
        support_indices: support.clone(),
        dual_support: sets.by_dual,
        radon_point: dual_point.map(|d| d.point),
        hulls_intersect,
        unique_point,
        strong_gp_condition_i,
        strong_gp_condition_ii,
        exceeds_bound,
        degeneracy_flags: flags,
        tau,
    }
}

/// Why a perturbed instance broke support-set stability.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum InstabilityReason {
    SupportSetChanged { before: Vec<usize>, after: Vec<usize> },
    NotSeparable,
    TrainingFailed { message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbationCounterexample {
    pub trial: u64,
    #[serde(flatten)]
    pub reason: InstabilityReason,
}

fn perturb(data: &LabeledPointSet, eps: f64, seed: u64, trial: u64) -> Result<LabeledPointSet> {
    // trial streams are keyed by seed XOR trial index
    let mut rng = sampling::stream_rng(seed ^ trial, 0);
    let points = data
        .points()
        .iter()
        .map(|p| {
            let shift = sampling::uniform_in_ball(&mut rng, p.len(), eps);
            p.iter().zip(&shift).map(|(x, s)| x + s).collect()
        })
        .collect();
    LabeledPointSet::new(points, data.labels().to_vec())
}

/// Retrains on `trials` independent perturbations of size at most `eps` and
/// checks that the support-vector index set never changes. Reports the
/// lowest-index failing trial.
pub fn perturbation_stability(
    data: &LabeledPointSet,
    eps: f64,
    trials: u64,
    seed: u64,
) -> Result<Verdict<PerturbationCounterexample>> {
    perturbation_stability_with(data, eps, trials, seed, TrainParams::default())
}

pub fn perturbation_stability_with(
    data: &LabeledPointSet,
    eps: f64,
    trials: u64,
    seed: u64,
    params: TrainParams,
) -> Result<Verdict<PerturbationCounterexample>> {
    if eps < 0.0 || !eps.is_finite() {
        return Err(Error::InvalidInput(format!("perturbation size {eps} must be >= 0")));
    }
    if eps == 0.0 {
        return Ok(Verdict::Holds);
    }
    let baseline = svm::train_hard_margin(data, params)?.support_indices;
    let failures: Vec<PerturbationCounterexample> = (0..trials)
        .into_par_iter()
        .filter_map(|trial| {
            let reason = match perturb(data, eps, seed, trial) {
                Err(e) => InstabilityReason::TrainingFailed { message: e.to_string() },
                Ok(moved) => match svm::train_hard_margin(&moved, params) {
                    Ok(sol) if sol.support_indices == baseline => return None,
                    Ok(sol) => InstabilityReason::SupportSetChanged {
                        before: baseline.clone(),
                        after: sol.support_indices,
                    },
                    Err(Error::NotLinearlySeparable) => InstabilityReason::NotSeparable,
                    Err(e) => InstabilityReason::TrainingFailed { message: e.to_string() },
                },
            };
            Some(PerturbationCounterexample { trial, reason })
        })
        .collect();
    Ok(match failures.into_iter().min_by_key(|c| c.trial) {
        Some(c) => Verdict::Violated(c),
        None => Verdict::Holds,
    })
}

/// Smallest `y_i (w·x_i + b) − 1` over points outside the support set, or
/// `None` when every point is a support vector.
pub fn min_nonsupport_slack(sol: &SvmSolution, data: &LabeledPointSet) -> Option<f64> {
    (0..data.len())
        .filter(|i| !sol.support_indices.contains(i))
        .map(|i| data.y(i) * sol.decision(data.point(i)) - 1.0)
        .min_by(f64::total_cmp)
}

fn labeled(points: &PointSet, labels: &[Label]) -> Result<LabeledPointSet> {
    LabeledPointSet::new(points.points().to_vec(), labels.to_vec())
}

fn realizable(points: &PointSet, labels: &[Label]) -> Result<bool> {
    let pos = labels.iter().filter(|l| **l == Label::Positive).count();
    if pos == 0 || pos == labels.len() {
        return Ok(true);
    }
    svm::is_linearly_separable(&labeled(points, labels)?)
}

/// Checks whether affine separators realize every labeling of `points`.
/// For `m >= n + 2` the Radon labeling is tried first; otherwise labelings
/// are enumerated in Gray-code order with the first point fixed positive
/// (a labeling and its complement are realized together).
pub fn shatter_check(points: &PointSet) -> Result<Verdict<Vec<Label>>> {
    let m = points.len();
    if m > SHATTER_MAX_POINTS {
        return Err(Error::GuardExceeded(format!(
            "shattering is limited to {SHATTER_MAX_POINTS} points, got {m}"
        )));
    }
    if m == 0 {
        return Ok(Verdict::Holds);
    }
    if m >= points.dim() + 2 {
        let cert = geometry::radon_partition(points)?;
        let mut labels = vec![Label::Positive; m];
        for &i in &cert.part_two {
            labels[i] = Label::Negative;
        }
        if !realizable(points, &labels)? {
            return Ok(Verdict::Violated(labels));
        }
    }
    for k in 0u64..(1u64 << (m - 1)) {
        let gray = k ^ (k >> 1);
        let labels: Vec<Label> = (0..m)
            .map(|i| {
                if i > 0 && gray >> (i - 1) & 1 == 1 {
                    Label::Negative
                } else {
                    Label::Positive
                }
            })
            .collect();
        if !realizable(points, &labels)? {
            return Ok(Verdict::Violated(labels));
        }
    }
    Ok(Verdict::Holds)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PrecisionCause {
    /// Support vectors span flats with parallel directions.
    ParallelFlats,
    /// The active dual vectors are linearly dependent.
    DependentDuals,
    /// The data look generic; the solver was not run precisely enough.
    InsufficientPrecision,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrecisionAudit {
    pub support_count: usize,
    pub bound: usize,
    pub exceeds_bound: bool,
    pub tau: f64,
    pub solver_tol: f64,
    pub cause: Option<PrecisionCause>,
    pub parallel_witness: Option<ParallelFlats>,
    /// Suggested solver tolerance when the cause is insufficient precision.
    pub recommended_tol: Option<f64>,
}

/// Explains a support count above `n + 1`. Generic data cannot produce one,
/// so either a genericity condition fails or the solver tolerance is too
/// loose to tell near-margin points from margin points.
pub fn precision_audit(sol: &SvmSolution, data: &LabeledPointSet) -> PrecisionAudit {
    precision_audit_with_tau(sol, data, effective_tau(sol))
}

pub fn precision_audit_with_tau(sol: &SvmSolution, data: &LabeledPointSet, tau: f64) -> PrecisionAudit {
    let sets = support_vectors(sol, data, tau);
    let bound = data.dim() + 1;
    let count = sets.by_margin.len();
    let mut audit = PrecisionAudit {
        support_count: count,
        bound,
        exceeds_bound: count > bound,
        tau,
        solver_tol: sol.tol,
        cause: None,
        parallel_witness: None,
        recommended_tol: None,
    };
    if !audit.exceeds_bound {
        return audit;
    }
    let pos = data.class_points(Label::Positive, Some(&sets.by_margin));
    let neg = data.class_points(Label::Negative, Some(&sets.by_margin));
    // an audit too large to run cannot clear condition (i)
    let flats = geometry::flats_parallel_free(&pos, &neg);
    match flats {
        Ok(Verdict::Holds) => {}
        Ok(Verdict::Violated(w)) => {
            audit.cause = Some(PrecisionCause::ParallelFlats);
            // report indices into the training set
            let idx: Vec<usize> = sets
                .by_margin
                .iter()
                .copied()
                .filter(|&i| data.label(i) == Label::Positive)
                .chain(sets.by_margin.iter().copied().filter(|&i| data.label(i) == Label::Negative))
                .collect();
            audit.parallel_witness = Some(ParallelFlats {
                first: w.first.iter().map(|&k| idx[k]).collect(),
                second: w.second.iter().map(|&k| idx[k]).collect(),
            });
            return audit;
        }
        Err(_) => {
            audit.cause = Some(PrecisionCause::ParallelFlats);
            return audit;
        }
    }
    if !duals_independent(data, &sets.by_dual) {
        audit.cause = Some(PrecisionCause::DependentDuals);
        return audit;
    }
    audit.cause = Some(PrecisionCause::InsufficientPrecision);
    audit.recommended_tol = Some((sol.tol * 1e-4).clamp(1e-14, svm::DEFAULT_TOL));
    audit
}

/// Regular simplex with `i` positive and `k − i` negative vertices in
/// `R^n`. For `k <= n` the vertices are `e_1, …, e_k` padded with zeros;
/// for `k = n + 1` they are the same simplex written in `R^n` coordinates
/// of its own hyperplane.
pub fn simplex_instance(n: usize, k: usize, i: usize) -> Result<LabeledPointSet> {
    if k < 2 || k > n + 1 || i == 0 || i >= k {
        return Err(Error::InvalidInput(format!(
            "simplex instance needs 2 <= k <= n + 1 and 1 <= i <= k - 1, got n={n} k={k} i={i}"
        )));
    }
    let base = if k <= n {
        geometry::simplex_vertices(k)?
    } else {
        geometry::flattened_simplex(k)?
    };
    let points = base
        .points()
        .iter()
        .map(|p| {
            let mut v = p.clone();
            v.resize(n, 0.0);
            v
        })
        .collect();
    let labels = (0..k)
        .map(|j| if j < i { Label::Positive } else { Label::Negative })
        .collect();
    LabeledPointSet::new(points, labels)
}

/// Distance from each vertex of [`simplex_instance`] to its maximal-margin
/// hyperplane: `½ √(k / (i (k − i)))`.
pub fn simplex_margin_distance(k: usize, i: usize) -> f64 {
    0.5 * (k as f64 / (i * (k - i)) as f64).sqrt()
}
