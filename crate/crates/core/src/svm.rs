//! Hard-margin SVM training.
//!
//! The dual `max Σα − ½ Σ α_i α_j y_i y_j <x_i, x_j>` subject to `α >= 0`,
//! `Σ α_i y_i = 0` is maximised by pairwise coordinate ascent on the
//! maximal violating pair. Once the active set is right, an exact solve of
//! its stationarity system finishes the job. [`brute_force_train`] is an
//! independent oracle that enumerates candidate active sets directly.

use itertools::Itertools;
use serde::{Serialize, Serializer};

use crate::geometry::PointSet;
use crate::lp;
use crate::numerics::{self, Matrix};
use crate::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 1_000_000;
/// Default threshold for "lies on the margin", in functional-margin units.
pub const DEFAULT_TAU: f64 = 1e-8;
/// Largest training set the brute-force oracle accepts.
pub const BRUTE_FORCE_MAX_POINTS: usize = 25;

/// Pair updates between attempts to finish with an exact active-set solve.
const POLISH_EVERY: usize = 16;
/// Pair updates between full recomputations of `w` from `α`.
const REFRESH_EVERY: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Negative,
    Positive,
}

impl Label {
    pub fn sign(self) -> f64 {
        match self {
            Label::Positive => 1.0,
            Label::Negative => -1.0,
        }
    }

    pub fn from_sign(v: f64) -> Option<Label> {
        if v == 1.0 {
            Some(Label::Positive)
        } else if v == -1.0 {
            Some(Label::Negative)
        } else {
            None
        }
    }

    pub fn flipped(self) -> Label {
        match self {
            Label::Positive => Label::Negative,
            Label::Negative => Label::Positive,
        }
    }
}

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i8(self.sign() as i8)
    }
}

/// Training data: points in `R^n` with labels in `{−1, +1}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabeledPointSet {
    dim: usize,
    points: Vec<Vec<f64>>,
    labels: Vec<Label>,
}

impl LabeledPointSet {
    pub fn new(points: Vec<Vec<f64>>, labels: Vec<Label>) -> Result<Self> {
        if points.len() != labels.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} points but {} labels",
                points.len(),
                labels.len()
            )));
        }
        let set = PointSet::new(points)?;
        Ok(LabeledPointSet {
            dim: set.dim(),
            points: set.into_points(),
            labels,
        })
    }

    /// Builds a set from negatives and positives, negatives first.
    pub fn from_classes(neg: Vec<Vec<f64>>, pos: Vec<Vec<f64>>) -> Result<Self> {
        let labels = std::iter::repeat(Label::Negative)
            .take(neg.len())
            .chain(std::iter::repeat(Label::Positive).take(pos.len()))
            .collect();
        LabeledPointSet::new(neg.into_iter().chain(pos).collect(), labels)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> Label {
        self.labels[i]
    }

    pub fn y(&self, i: usize) -> f64 {
        self.labels[i].sign()
    }

    pub fn indices_of(&self, label: Label) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.labels[i] == label).collect()
    }

    /// Points of one class, restricted to `among` when given.
    pub fn class_points(&self, label: Label, among: Option<&[usize]>) -> PointSet {
        let idx: Vec<usize> = match among {
            Some(sel) => sel.iter().copied().filter(|&i| self.labels[i] == label).collect(),
            None => self.indices_of(label),
        };
        let pts = idx.iter().map(|&i| self.points[i].clone()).collect();
        PointSet::with_dim(self.dim, pts).expect("points already validated")
    }

    pub fn map_points(&self, f: impl Fn(&[f64]) -> Vec<f64>) -> Result<Self> {
        LabeledPointSet::new(self.points.iter().map(|p| f(p)).collect(), self.labels.clone())
    }

    fn check_classes(&self) -> Result<()> {
        let pos = self.labels.iter().filter(|l| **l == Label::Positive).count();
        if pos == 0 || pos == self.len() {
            return Err(Error::EmptyClass);
        }
        Ok(())
    }
}

/// A trained hard-margin separator in canonical form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SvmSolution {
    pub w: Vec<f64>,
    pub b: f64,
    pub alphas: Vec<f64>,
    /// Points with `|y_i (w·x_i + b) − 1| <= max(DEFAULT_TAU, tol)`.
    pub support_indices: Vec<usize>,
    /// `2 / ‖w‖`.
    pub margin: f64,
    /// Solver tolerance the solution was produced with.
    pub tol: f64,
    pub iterations: usize,
}

impl SvmSolution {
    pub fn decision(&self, x: &[f64]) -> f64 {
        numerics::dot(&self.w, x) + self.b
    }

    /// `½‖w‖²`
    pub fn primal_value(&self) -> f64 {
        0.5 * numerics::dot(&self.w, &self.w)
    }

    /// `Σα − ½‖Σ α_i y_i x_i‖²`
    pub fn dual_value(&self, data: &LabeledPointSet) -> f64 {
        let w = expand_w(data, &self.alphas);
        self.alphas.iter().sum::<f64>() - 0.5 * numerics::dot(&w, &w)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainParams {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for TrainParams {
    fn default() -> Self {
        TrainParams {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

/// Residuals of the KKT conditions for a claimed solution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KktReport {
    /// `‖w − Σ α_i y_i x_i‖`
    pub stationarity_residual: f64,
    /// `|Σ α_i y_i|`
    pub balance_residual: f64,
    /// `max(0, max_i g_i)`
    pub worst_primal_violation: f64,
    /// `max(0, −min_i α_i)`
    pub worst_dual_violation: f64,
    /// `max_i α_i |g_i|`
    pub complementary_slackness_worst: f64,
    /// `g_i = 1 − y_i (w·x_i + b)`, nonpositive when feasible.
    pub constraint_values: Vec<f64>,
}

impl KktReport {
    pub fn max_residual(&self) -> f64 {
        [
            self.stationarity_residual,
            self.balance_residual,
            self.worst_primal_violation,
            self.worst_dual_violation,
            self.complementary_slackness_worst,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_residual() <= tol
    }
}

/// Margin-based and dual-based support sets.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupportSets {
    pub by_margin: Vec<usize>,
    pub by_dual: Vec<usize>,
    /// The two criteria disagree: some margin point carries no weight or
    /// some weighted point is off the margin.
    pub degenerate: bool,
}

fn expand_w(data: &LabeledPointSet, alphas: &[f64]) -> Vec<f64> {
    let mut w = vec![0.0; data.dim()];
    for (i, &a) in alphas.iter().enumerate() {
        if a != 0.0 {
            numerics::axpy(a * data.y(i), data.point(i), &mut w);
        }
    }
    w
}

/// Decides strict separability `y_i (w·x_i + b) >= 1` by phase-one simplex,
/// with `w` and `b` split into nonnegative parts and a surplus per point.
pub fn is_linearly_separable(data: &LabeledPointSet) -> Result<bool> {
    data.check_classes()?;
    let (m, n) = (data.len(), data.dim());
    // Center and scale; separability is affine invariant.
    let mut center = vec![0.0; n];
    for p in data.points() {
        numerics::axpy(1.0 / m as f64, p, &mut center);
    }
    let scale = data
        .points()
        .iter()
        .flat_map(|p| p.iter().zip(&center).map(|(x, c)| (x - c).abs()))
        .fold(0.0, f64::max);
    let scale = if scale > 0.0 { scale } else { 1.0 };

    let cols = 2 * n + 2 + m;
    let mut a = Matrix::zeros(m, cols);
    for i in 0..m {
        let y = data.y(i);
        for d in 0..n {
            let v = y * (data.point(i)[d] - center[d]) / scale;
            a[(i, d)] = v;
            a[(i, n + d)] = -v;
        }
        a[(i, 2 * n)] = y;
        a[(i, 2 * n + 1)] = -y;
        a[(i, 2 * n + 2 + i)] = -1.0;
    }
    // An infeasible system has minimal infeasibility of at least 2, so the
    // default tolerance leaves plenty of room.
    Ok(lp::phase_one(&a, &vec![1.0; m])?.feasible)
}

/// Working state of the pairwise dual ascent.
struct DualAscent<'a> {
    data: &'a LabeledPointSet,
    alphas: Vec<f64>,
    w: Vec<f64>,
}

impl<'a> DualAscent<'a> {
    fn new(data: &'a LabeledPointSet) -> Self {
        DualAscent {
            data,
            alphas: vec![0.0; data.len()],
            w: vec![0.0; data.dim()],
        }
    }

    /// `y_t − w·x_t`, the negated scaled gradient of the dual objective.
    fn score(&self, t: usize) -> f64 {
        self.data.y(t) - numerics::dot(&self.w, self.data.point(t))
    }

    /// Maximal violating pair `(i, j)` and its violation `s_i − s_j`.
    fn violating_pair(&self) -> (usize, usize, f64) {
        let mut up: Option<(usize, f64)> = None;
        let mut low: Option<(usize, f64)> = None;
        for t in 0..self.data.len() {
            let s = self.score(t);
            let positive = self.data.label(t) == Label::Positive;
            let active = self.alphas[t] > 0.0;
            if (positive || active) && up.is_none_or(|(_, best)| s > best) {
                up = Some((t, s));
            }
            if (!positive || active) && low.is_none_or(|(_, best)| s < best) {
                low = Some((t, s));
            }
        }
        let (i, si) = up.expect("positive class is nonempty");
        let (j, sj) = low.expect("negative class is nonempty");
        (i, j, si - sj)
    }

    fn step(&mut self, i: usize, j: usize, violation: f64) {
        let diff = numerics::sub(self.data.point(i), self.data.point(j));
        let curvature = numerics::dot(&diff, &diff).max(1e-12);
        let mut delta = violation / curvature;
        if self.data.label(i) == Label::Negative {
            delta = delta.min(self.alphas[i]);
        }
        if self.data.label(j) == Label::Positive {
            delta = delta.min(self.alphas[j]);
        }
        self.alphas[i] += self.data.y(i) * delta;
        self.alphas[j] -= self.data.y(j) * delta;
        // clamp exact-bound hits so the index sets stay clean
        for t in [i, j] {
            if self.alphas[t] < 1e-300 {
                self.alphas[t] = 0.0;
            }
        }
        numerics::axpy(delta, &diff, &mut self.w);
    }

    fn refresh(&mut self) {
        self.w = expand_w(self.data, &self.alphas);
    }

    /// Solves the stationarity system on the current active set exactly,
    /// dropping the most negative multiplier and re-solving until the
    /// result is dual feasible. Accepts it only if it meets `tol`.
    fn try_polish(&mut self, tol: f64) -> bool {
        let mut active: Vec<usize> = (0..self.data.len()).filter(|&t| self.alphas[t] > 0.0).collect();
        let alpha_s = loop {
            let Ok((alpha_s, _)) = solve_active_set(self.data, &active) else {
                return false;
            };
            let worst = (0..active.len()).min_by(|&p, &q| alpha_s[p].total_cmp(&alpha_s[q]));
            match worst {
                Some(k) if alpha_s[k] < 0.0 => {
                    active.remove(k);
                }
                _ => break alpha_s,
            }
        };
        let saved = (self.alphas.clone(), self.w.clone());
        self.alphas.iter_mut().for_each(|a| *a = 0.0);
        for (&t, &a) in active.iter().zip(&alpha_s) {
            self.alphas[t] = a;
        }
        self.refresh();
        if self.violating_pair().2 <= tol {
            return true;
        }
        (self.alphas, self.w) = saved;
        false
    }
}

/// Solves `Σ_j Q_ij α_j + y_i b = 1 (i ∈ S)`, `Σ y_j α_j = 0` for the
/// multipliers on `S` and the offset. Points are centered first, which only
/// shifts the offset, and the solve is refined once against its residual.
fn solve_active_set(data: &LabeledPointSet, active: &[usize]) -> Result<(Vec<f64>, f64)> {
    let s = active.len();
    let mut center = vec![0.0; data.dim()];
    for &i in active {
        numerics::axpy(1.0 / s.max(1) as f64, data.point(i), &mut center);
    }
    let centered: Vec<Vec<f64>> = active
        .iter()
        .map(|&i| numerics::sub(data.point(i), &center))
        .collect();
    let mut sys = Matrix::zeros(s + 1, s + 1);
    let mut rhs = vec![1.0; s + 1];
    rhs[s] = 0.0;
    for (r, &i) in active.iter().enumerate() {
        for (c, &j) in active.iter().enumerate() {
            sys[(r, c)] = data.y(i) * data.y(j) * numerics::dot(&centered[r], &centered[c]);
        }
        sys[(r, s)] = data.y(i);
        sys[(s, r)] = data.y(i);
    }
    let mut sol = numerics::solve_linear(&sys, &rhs)?;
    let residual = numerics::sub(&rhs, &sys.mul_vec(&sol));
    if let Ok(correction) = numerics::solve_linear(&sys, &residual) {
        numerics::axpy(1.0, &correction, &mut sol);
    }
    // w·(x − c) + b_c = w·x + (b_c − w·c)
    let w = expand_active(data, active, &sol[..s]);
    Ok((sol[..s].to_vec(), sol[s] - numerics::dot(&w, &center)))
}

fn expand_active(data: &LabeledPointSet, active: &[usize], alphas: &[f64]) -> Vec<f64> {
    let mut w = vec![0.0; data.dim()];
    for (&i, &a) in active.iter().zip(alphas) {
        numerics::axpy(a * data.y(i), data.point(i), &mut w);
    }
    w
}

fn support_by_margin(data: &LabeledPointSet, w: &[f64], b: f64, tau: f64) -> Vec<usize> {
    (0..data.len())
        .filter(|&i| {
            let f = data.y(i) * (numerics::dot(w, data.point(i)) + b);
            (f - 1.0).abs() <= tau
        })
        .collect()
}

/// Builds a canonical solution from multipliers, with `b` at the midpoint of
/// the extreme functional margins.
fn solution_from_alphas(
    data: &LabeledPointSet,
    alphas: Vec<f64>,
    tol: f64,
    iterations: usize,
) -> SvmSolution {
    let w = expand_w(data, &alphas);
    let projections = |label| {
        data.indices_of(label)
            .into_iter()
            .map(|i| numerics::dot(&w, data.point(i)))
    };
    let max_neg = projections(Label::Negative).fold(f64::NEG_INFINITY, f64::max);
    let min_pos = projections(Label::Positive).fold(f64::INFINITY, f64::min);
    let b = -(max_neg + min_pos) / 2.0;
    let margin = 2.0 / numerics::norm(&w);
    let support_indices = support_by_margin(data, &w, b, DEFAULT_TAU.max(tol));
    SvmSolution {
        w,
        b,
        alphas,
        support_indices,
        margin,
        tol,
        iterations,
    }
}

/// Trains the maximal-margin separator.
pub fn train_hard_margin(data: &LabeledPointSet, params: TrainParams) -> Result<SvmSolution> {
    if !is_linearly_separable(data)? {
        return Err(Error::NotLinearlySeparable);
    }
    let mut state = DualAscent::new(data);
    let mut iterations = 0;
    loop {
        let (i, j, violation) = state.violating_pair();
        if violation <= params.tol {
            break;
        }
        if iterations >= params.max_iter {
            let best = solution_from_alphas(data, state.alphas, params.tol, iterations);
            let report = kkt_check(&best, data);
            return Err(Error::IterationLimit {
                max_iter: params.max_iter,
                violation,
                best: Box::new(best),
                report: Box::new(report),
            });
        }
        state.step(i, j, violation);
        iterations += 1;
        if iterations % REFRESH_EVERY == 0 {
            state.refresh();
        }
        if iterations % POLISH_EVERY == 0 && state.try_polish(params.tol) {
            break;
        }
    }
    Ok(solution_from_alphas(data, state.alphas, params.tol, iterations))
}

/// Oracle trainer: tries every candidate support set of size `2..=n+1` that
/// contains both classes, keeping KKT-feasible ones, and returns the widest
/// margin found.
pub fn brute_force_train(data: &LabeledPointSet) -> Result<SvmSolution> {
    if data.len() > BRUTE_FORCE_MAX_POINTS {
        return Err(Error::GuardExceeded(format!(
            "brute-force training is limited to {BRUTE_FORCE_MAX_POINTS} points, got {}",
            data.len()
        )));
    }
    if !is_linearly_separable(data)? {
        return Err(Error::NotLinearlySeparable);
    }
    let m = data.len();
    let mut best: Option<(f64, Vec<f64>, Vec<f64>, f64)> = None;
    for size in 2..=(data.dim() + 1).min(m) {
        for subset in (0..m).combinations(size) {
            let has_pos = subset.iter().any(|&i| data.label(i) == Label::Positive);
            let has_neg = subset.iter().any(|&i| data.label(i) == Label::Negative);
            if !(has_pos && has_neg) {
                continue;
            }
            let Ok((alpha_s, b)) = solve_active_set(data, &subset) else {
                continue;
            };
            if alpha_s.iter().any(|&a| a < -1e-12) {
                continue;
            }
            let mut alphas = vec![0.0; m];
            for (&i, &a) in subset.iter().zip(&alpha_s) {
                alphas[i] = a.max(0.0);
            }
            let w = expand_w(data, &alphas);
            let feasible = (0..m)
                .all(|i| data.y(i) * (numerics::dot(&w, data.point(i)) + b) >= 1.0 - 1e-9);
            if !feasible {
                continue;
            }
            let norm = numerics::norm(&w);
            if best.as_ref().is_none_or(|(n, ..)| norm < *n) {
                best = Some((norm, w, alphas, b));
            }
        }
    }
    let (norm, w, alphas, b) = best.ok_or(Error::SingularSystem)?;
    let support_indices = support_by_margin(data, &w, b, DEFAULT_TAU);
    Ok(SvmSolution {
        w,
        b,
        alphas,
        support_indices,
        margin: 2.0 / norm,
        tol: 0.0,
        iterations: 0,
    })
}

/// Both support-vector criteria at threshold `tau`.
pub fn support_vectors(sol: &SvmSolution, data: &LabeledPointSet, tau: f64) -> SupportSets {
    let by_margin = support_by_margin(data, &sol.w, sol.b, tau);
    let max_alpha = sol.alphas.iter().fold(0.0, |m: f64, a| m.max(*a));
    let by_dual: Vec<usize> = (0..data.len())
        .filter(|&i| max_alpha > 0.0 && sol.alphas[i] > tau * max_alpha)
        .collect();
    let degenerate = by_margin != by_dual;
    SupportSets {
        by_margin,
        by_dual,
        degenerate,
    }
}

pub fn kkt_check(sol: &SvmSolution, data: &LabeledPointSet) -> KktReport {
    let expanded = expand_w(data, &sol.alphas);
    let stationarity_residual = numerics::norm(&numerics::sub(&sol.w, &expanded));
    let balance_residual = (0..data.len())
        .map(|i| sol.alphas[i] * data.y(i))
        .sum::<f64>()
        .abs();
    let constraint_values: Vec<f64> = (0..data.len())
        .map(|i| 1.0 - data.y(i) * sol.decision(data.point(i)))
        .collect();
    let worst_primal_violation = constraint_values.iter().fold(0.0, |m: f64, g| m.max(*g));
    let worst_dual_violation = sol.alphas.iter().fold(0.0, |m: f64, a| m.max(-a));
    let complementary_slackness_worst = sol
        .alphas
        .iter()
        .zip(&constraint_values)
        .fold(0.0, |m: f64, (a, g)| m.max((a * g).abs()));
    KktReport {
        stationarity_residual,
        balance_residual,
        worst_primal_violation,
        worst_dual_violation,
        complementary_slackness_worst,
        constraint_values,
    }
}
