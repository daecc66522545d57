//! Radon partitions, convex-hull intersection and general-position
//! predicates.

use itertools::Itertools;
use serde::Serialize;

use crate::lp;
use crate::numerics::{self, Matrix};
use crate::{Error, Result, Verdict};

/// Rank tolerance used by the flat-parallelism audit.
pub const AUDIT_RANK_TOL: f64 = 1e-8;

/// Default cap on subset pairs examined by [`flats_parallel_free`].
pub const DEFAULT_MAX_PAIR_CHECKS: u128 = 1_000_000;

/// Coefficients with magnitude below this fraction of the largest are
/// treated as exact zeros in a Radon certificate.
const RADON_ZERO_TOL: f64 = 1e-12;

/// Points in `R^n`, all of the same dimension.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointSet {
    dim: usize,
    points: Vec<Vec<f64>>,
}

impl PointSet {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let dim = points.first().map_or(0, Vec::len);
        Self::with_dim(dim, points)
    }

    pub fn with_dim(dim: usize, points: Vec<Vec<f64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("ambient dimension must be positive".into()));
        }
        for p in &points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "point of dim {} in a set of dim {dim}",
                    p.len()
                )));
            }
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput("coordinates must be finite".into()));
            }
        }
        Ok(PointSet { dim, points })
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

    pub fn subset(&self, indices: &[usize]) -> PointSet {
        PointSet {
            dim: self.dim,
            points: indices.iter().map(|&i| self.points[i].clone()).collect(),
        }
    }

    pub fn into_points(self) -> Vec<Vec<f64>> {
        self.points
    }
}

/// Coefficients of an affine dependence together with the partition and
/// intersection point they certify.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadonCertificate {
    /// Affine dependence `a` with `Σ a_i = 0` and `Σ a_i x_i = 0`.
    pub coefficients: Vec<f64>,
    /// Indices with `a_i > 0`.
    pub part_one: Vec<usize>,
    /// Indices with `a_i <= 0`.
    pub part_two: Vec<usize>,
    pub radon_point: Vec<f64>,
    /// `A = Σ_{a_i > 0} a_i`.
    pub scale: f64,
    /// Dimension of the space of affine dependences. Anything above one means
    /// the points are not in general position and the partition is not
    /// unique.
    pub dependence_dim: usize,
}

impl RadonCertificate {
    pub fn is_degenerate(&self) -> bool {
        self.dependence_dim > 1
    }
}

/// Result of a convex-hull intersection test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HullWitness {
    pub intersects: bool,
    pub witness: Option<Vec<f64>>,
    pub barycentric_a: Option<Vec<f64>>,
    pub barycentric_b: Option<Vec<f64>>,
}

/// Translates and scales a group of points so that coordinates are O(1).
/// Affine maps preserve every incidence question asked in this module.
struct Normalizer {
    center: Vec<f64>,
    scale: f64,
}

impl Normalizer {
    fn fit<'a>(points: impl Iterator<Item = &'a [f64]> + Clone, dim: usize) -> Self {
        let mut center = vec![0.0; dim];
        let mut count = 0usize;
        for p in points.clone() {
            numerics::axpy(1.0, p, &mut center);
            count += 1;
        }
        if count > 0 {
            center.iter_mut().for_each(|c| *c /= count as f64);
        }
        let scale = points
            .flat_map(|p| p.iter().zip(&center).map(|(x, c)| (x - c).abs()))
            .fold(0.0, f64::max);
        Normalizer {
            center,
            scale: if scale > 0.0 { scale } else { 1.0 },
        }
    }

    /// Never scale up by more than the distance of the group from the
    /// origin, so points that agree to working precision stay together.
    fn with_magnitude_floor(mut self) -> Self {
        let offset = self.center.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
        self.scale = self.scale.max(offset);
        self
    }

    fn apply(&self, p: &[f64]) -> Vec<f64> {
        p.iter()
            .zip(&self.center)
            .map(|(x, c)| (x - c) / self.scale)
            .collect()
    }
}

fn convex_combination(points: &[Vec<f64>], weights: &[f64], dim: usize) -> Vec<f64> {
    let mut out = vec![0.0; dim];
    for (p, &w) in points.iter().zip(weights) {
        numerics::axpy(w, p, &mut out);
    }
    out
}

/// Finds an affine dependence among the first `n + 2` points and the Radon
/// partition it induces.
pub fn radon_partition(t: &PointSet) -> Result<RadonCertificate> {
    let n = t.dim();
    if t.len() < n + 2 {
        return Err(Error::TooFewPoints {
            needed: n + 2,
            got: t.len(),
        });
    }
    let pts = &t.points()[..n + 2];
    let norm = Normalizer::fit(pts.iter().map(Vec::as_slice), n);
    let scaled: Vec<Vec<f64>> = pts.iter().map(|p| norm.apply(p)).collect();

    // One row per coordinate plus the all-ones row.
    let mut system = Matrix::zeros(n + 1, n + 2);
    for (j, p) in scaled.iter().enumerate() {
        for d in 0..n {
            system[(d, j)] = p[d];
        }
        system[(n, j)] = 1.0;
    }
    let basis = numerics::null_space(&system, numerics::DEFAULT_RANK_TOL);
    let dependence_dim = basis.len();
    // n + 1 equations in n + 2 unknowns always leave a nontrivial solution.
    let mut a = basis
        .into_iter()
        .next()
        .expect("homogeneous system with more unknowns than equations");

    let largest = a.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    for v in a.iter_mut() {
        if v.abs() <= RADON_ZERO_TOL * largest {
            *v = 0.0;
        }
    }
    // Make the first nonzero coefficient positive so output is canonical.
    if let Some(first) = a.iter().find(|v| **v != 0.0) {
        if *first < 0.0 {
            a.iter_mut().for_each(|v| *v = -*v);
        }
    }

    let part_one: Vec<usize> = (0..n + 2).filter(|&i| a[i] > 0.0).collect();
    let part_two: Vec<usize> = (0..n + 2).filter(|&i| a[i] <= 0.0).collect();
    let scale: f64 = part_one.iter().map(|&i| a[i]).sum();
    let mut radon_point = vec![0.0; n];
    for &i in &part_one {
        numerics::axpy(a[i] / scale, &pts[i], &mut radon_point);
    }
    Ok(RadonCertificate {
        coefficients: a,
        part_one,
        part_two,
        radon_point,
        scale,
        dependence_dim,
    })
}

/// Decides whether `conv(a)` and `conv(b)` meet, by phase-one feasibility of
/// `Σ λ_i a_i = Σ μ_j b_j`, `Σ λ = Σ μ = 1`, `λ, μ >= 0`.
pub fn hulls_intersect(a: &PointSet, b: &PointSet) -> Result<HullWitness> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidInput("hull intersection needs nonempty sets".into()));
    }
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "hulls in dimensions {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    let n = a.dim();
    let (p, q) = (a.len(), b.len());
    let norm = Normalizer::fit(
        a.points().iter().chain(b.points()).map(Vec::as_slice),
        n,
    )
    .with_magnitude_floor();

    let mut lhs = Matrix::zeros(n + 2, p + q);
    for (j, pt) in a.points().iter().enumerate() {
        for (d, v) in norm.apply(pt).into_iter().enumerate() {
            lhs[(d, j)] = v;
        }
        lhs[(n, j)] = 1.0;
    }
    for (j, pt) in b.points().iter().enumerate() {
        for (d, v) in norm.apply(pt).into_iter().enumerate() {
            lhs[(d, p + j)] = -v;
        }
        lhs[(n + 1, p + j)] = 1.0;
    }
    let mut rhs = vec![0.0; n + 2];
    rhs[n] = 1.0;
    rhs[n + 1] = 1.0;

    let sol = lp::phase_one(&lhs, &rhs)?;
    if !sol.feasible {
        return Ok(HullWitness {
            intersects: false,
            witness: None,
            barycentric_a: None,
            barycentric_b: None,
        });
    }
    let normalize = |w: &[f64]| -> Vec<f64> {
        let s: f64 = w.iter().sum();
        w.iter().map(|v| v / s).collect()
    };
    let lambda = normalize(&sol.x[..p]);
    let mu = normalize(&sol.x[p..]);
    let witness = convex_combination(a.points(), &lambda, n);
    Ok(HullWitness {
        intersects: true,
        witness: Some(witness),
        barycentric_a: Some(lambda),
        barycentric_b: Some(mu),
    })
}

/// Rows `x_i - x_base` for the given indices; empty for fewer than two.
fn direction_rows(points: &[Vec<f64>], indices: &[usize]) -> Vec<Vec<f64>> {
    match indices.split_first() {
        Some((&base, rest)) => rest
            .iter()
            .map(|&i| numerics::sub(&points[i], &points[base]))
            .collect(),
        None => Vec::new(),
    }
}

fn rows_rank(rows: &[Vec<f64>], tol: f64) -> usize {
    if rows.is_empty() {
        return 0;
    }
    // rows come from one point set, so construction cannot fail
    numerics::rank(&Matrix::from_rows(rows).expect("uniform rows"), tol)
}

/// Checks that no `k + 2` points lie in a `k`-flat for any `k < n`. On
/// failure the offending subset is returned.
pub fn in_general_position(x: &PointSet) -> Verdict<Vec<usize>> {
    general_position_with_tol(x, numerics::DEFAULT_RANK_TOL)
}

pub fn general_position_with_tol(x: &PointSet, tol: f64) -> Verdict<Vec<usize>> {
    let n = x.dim();
    let pts = Normalizer::fit(x.points().iter().map(Vec::as_slice), n);
    let scaled: Vec<Vec<f64>> = x.points().iter().map(|p| pts.apply(p)).collect();
    let largest = (n + 1).min(x.len());
    for size in 2..=largest {
        for subset in (0..x.len()).combinations(size) {
            if rows_rank(&direction_rows(&scaled, &subset), tol) < size - 1 {
                return Verdict::Violated(subset);
            }
        }
    }
    Verdict::Holds
}

/// Two disjoint index sets (into the concatenation positives ++ negatives)
/// whose affine hulls share a direction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParallelFlats {
    pub first: Vec<usize>,
    pub second: Vec<usize>,
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Number of unordered pairs of disjoint subsets, each of size at least two,
/// with `(|A| - 1) + (|B| - 1) <= n`.
fn flat_pair_count(m: usize, n: usize) -> u128 {
    let mut total = 0u128;
    for sa in 2..=m {
        for sb in sa..=m {
            if sa + sb > n + 2 || sa + sb > m {
                continue;
            }
            let ordered = binomial(m, sa) * binomial(m - sa, sb);
            total += if sa == sb { ordered / 2 } else { ordered };
        }
    }
    total
}

/// Condition (i) of strong general position, restricted to flats spanned by
/// the data: for disjoint subsets `A`, `B` with `(|A|-1) + (|B|-1) <= n`,
/// the direction spaces of their affine hulls meet only at zero.
pub fn flats_parallel_free(pos: &PointSet, neg: &PointSet) -> Result<Verdict<ParallelFlats>> {
    flats_parallel_free_with(pos, neg, DEFAULT_MAX_PAIR_CHECKS, AUDIT_RANK_TOL)
}

pub fn flats_parallel_free_with(
    pos: &PointSet,
    neg: &PointSet,
    max_pair_checks: u128,
    tol: f64,
) -> Result<Verdict<ParallelFlats>> {
    if !pos.is_empty() && !neg.is_empty() && pos.dim() != neg.dim() {
        return Err(Error::DimensionMismatch("class dimensions differ".into()));
    }
    let n = if pos.is_empty() { neg.dim() } else { pos.dim() };
    let all: Vec<Vec<f64>> = pos.points().iter().chain(neg.points()).cloned().collect();
    let m = all.len();
    let pairs = flat_pair_count(m, n);
    if pairs > max_pair_checks {
        return Err(Error::AuditTooLarge {
            pairs,
            budget: max_pair_checks,
        });
    }
    let norm = Normalizer::fit(all.iter().map(Vec::as_slice), n);
    let scaled: Vec<Vec<f64>> = all.iter().map(|p| norm.apply(p)).collect();

    for sa in 2..=m {
        for a in (0..m).combinations(sa) {
            let da = direction_rows(&scaled, &a);
            let ra = rows_rank(&da, tol);
            let rest: Vec<usize> = (0..m).filter(|i| !a.contains(i)).collect();
            for sb in sa..=m {
                if sa + sb > n + 2 || sa + sb > m {
                    continue;
                }
                for b in rest.iter().copied().combinations(sb) {
                    if sa == sb && b[0] < a[0] {
                        continue;
                    }
                    let db = direction_rows(&scaled, &b);
                    let rb = rows_rank(&db, tol);
                    let stacked: Vec<Vec<f64>> = da.iter().chain(&db).cloned().collect();
                    if rows_rank(&stacked, tol) < ra + rb {
                        return Ok(Verdict::Violated(ParallelFlats {
                            first: a,
                            second: b,
                        }));
                    }
                }
            }
        }
    }
    Ok(Verdict::Holds)
}

/// True when the direction spaces of `aff(a)` and `aff(b)` meet only at
/// zero, i.e. `rank(D_a) + rank(D_b) = rank([D_a; D_b])`.
pub fn direction_spans_independent(a: &PointSet, b: &PointSet, tol: f64) -> bool {
    let n = a.dim();
    let norm = Normalizer::fit(a.points().iter().chain(b.points()).map(Vec::as_slice), n);
    let sa: Vec<Vec<f64>> = a.points().iter().map(|p| norm.apply(p)).collect();
    let sb: Vec<Vec<f64>> = b.points().iter().map(|p| norm.apply(p)).collect();
    let da = direction_rows(&sa, &(0..sa.len()).collect::<Vec<_>>());
    let db = direction_rows(&sb, &(0..sb.len()).collect::<Vec<_>>());
    let stacked: Vec<Vec<f64>> = da.iter().chain(&db).cloned().collect();
    rows_rank(&stacked, tol) == rows_rank(&da, tol) + rows_rank(&db, tol)
}

/// Enumerates every bipartition of exactly `n + 2` points and reports whether
/// exactly one of them has intersecting hulls.
pub fn unique_radon_partition(t: &PointSet) -> Result<bool> {
    Ok(intersecting_bipartitions(t)?.len() == 1)
}

/// All unordered bipartitions `(T1, T2)` of `n + 2` points whose hulls meet.
/// Index 0 is always placed in `T1`.
pub fn intersecting_bipartitions(t: &PointSet) -> Result<Vec<(Vec<usize>, Vec<usize>)>> {
    let k = t.dim() + 2;
    if t.len() != k {
        return Err(Error::InvalidInput(format!(
            "unique Radon partition needs exactly {k} points, got {}",
            t.len()
        )));
    }
    let full = (1u64 << k) - 1;
    let mut found = Vec::new();
    for mask in (1..full).filter(|m| m & 1 == 1) {
        let one: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).collect();
        let two: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 0).collect();
        if hulls_intersect(&t.subset(&one), &t.subset(&two))?.intersects {
            found.push((one, two));
        }
    }
    Ok(found)
}

/// The standard basis `e_1, …, e_k` of `R^k`, a regular simplex inside the
/// flat `x_1 + … + x_k = 1`.
pub fn simplex_vertices(k: usize) -> Result<PointSet> {
    if k < 2 {
        return Err(Error::InvalidInput(format!("simplex needs k >= 2, got {k}")));
    }
    let points = (0..k)
        .map(|i| {
            let mut e = vec![0.0; k];
            e[i] = 1.0;
            e
        })
        .collect();
    PointSet::with_dim(k, points)
}

/// The `k` vertices of [`simplex_vertices`] expressed isometrically in
/// `R^(k-1)`, using an orthonormal basis of the flat's direction space.
pub fn flattened_simplex(k: usize) -> Result<PointSet> {
    let raw = simplex_vertices(k)?;
    let ones = Matrix::from_vec(1, k, vec![1.0; k])?;
    let basis = numerics::null_space(&ones, numerics::DEFAULT_RANK_TOL);
    debug_assert_eq!(basis.len(), k - 1);
    let centroid = vec![1.0 / k as f64; k];
    let points = raw
        .points()
        .iter()
        .map(|e| {
            let rel = numerics::sub(e, &centroid);
            basis.iter().map(|u| numerics::dot(u, &rel)).collect()
        })
        .collect();
    PointSet::with_dim(k - 1, points)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(points: &[&[f64]]) -> PointSet {
        PointSet::new(points.iter().map(|p| p.to_vec()).collect()).unwrap()
    }

    fn sorted(mut v: Vec<usize>) -> Vec<usize> {
        v.sort_unstable();
        v
    }

    fn assert_partition(cert: &RadonCertificate, one: &[usize], two: &[usize]) {
        let got = [sorted(cert.part_one.clone()), sorted(cert.part_two.clone())];
        assert!(
            (got[0] == one && got[1] == two) || (got[0] == two && got[1] == one),
            "unexpected partition {got:?}"
        );
    }

    #[test]
    fn radon_square_diagonals() {
        let t = ps(&[&[0.0, 0.0], &[2.0, 0.0], &[0.0, 2.0], &[2.0, 2.0]]);
        let c = radon_partition(&t).unwrap();
        assert_partition(&c, &[0, 3], &[1, 2]);
        assert!((c.radon_point[0] - 1.0).abs() < 1e-12);
        assert!((c.radon_point[1] - 1.0).abs() < 1e-12);
        assert!(!c.is_degenerate());
    }

    #[test]
    fn radon_interior_point() {
        let t = ps(&[&[0.0, 0.0], &[4.0, 0.0], &[0.0, 4.0], &[1.0, 1.0]]);
        let c = radon_partition(&t).unwrap();
        assert_partition(&c, &[3], &[0, 1, 2]);
        assert!((c.radon_point[0] - 1.0).abs() < 1e-12);
        assert!((c.radon_point[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn radon_on_the_line() {
        let t = ps(&[&[0.0], &[1.0], &[2.0]]);
        let c = radon_partition(&t).unwrap();
        assert_partition(&c, &[1], &[0, 2]);
        assert!((c.radon_point[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn radon_needs_n_plus_two() {
        let t = ps(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        assert!(matches!(
            radon_partition(&t),
            Err(Error::TooFewPoints { needed: 4, got: 3 })
        ));
    }

    #[test]
    fn radon_flags_repeated_points() {
        let t = ps(&[&[0.0, 0.0], &[0.0, 0.0], &[0.0, 0.0], &[1.0, 1.0]]);
        let c = radon_partition(&t).unwrap();
        assert!(c.is_degenerate());
    }

    #[test]
    fn hull_examples() {
        let origin = ps(&[&[0.0, 0.0]]);
        let h = hulls_intersect(&origin, &origin).unwrap();
        assert!(h.intersects);
        assert_eq!(h.witness.unwrap(), vec![0.0, 0.0]);

        let a = ps(&[&[0.0, 0.0], &[1.0, 0.0]]);
        let b = ps(&[&[2.0, 0.0], &[3.0, 0.0]]);
        assert!(!hulls_intersect(&a, &b).unwrap().intersects);

        // opposite corners of the square at (±3, ±3)
        let a = ps(&[&[3.0, 3.0], &[-3.0, -3.0]]);
        let b = ps(&[&[-3.0, 3.0], &[3.0, -3.0]]);
        let h = hulls_intersect(&a, &b).unwrap();
        assert!(h.intersects);
        let w = h.witness.unwrap();
        assert!(w[0].abs() < 1e-12 && w[1].abs() < 1e-12);

        let c = ps(&[&[0.0, 0.0, 0.0]]);
        assert!(matches!(hulls_intersect(&a, &c), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn points_equal_to_rounding_meet() {
        let a = ps(&[&[0.31368798957798005, 0.15272173739524186]]);
        let b = ps(&[&[0.31368798957797983, 0.1527217373952423]]);
        assert!(hulls_intersect(&a, &b).unwrap().intersects);
        let far = ps(&[&[0.3136879, 0.1527217]]);
        assert!(!hulls_intersect(&a, &far).unwrap().intersects);
    }

    #[test]
    fn crossing_segments_in_five_dimensions() {
        // projected support vectors of a trained instance; elimination leaves
        // ~1e-11 noise in redundant rows that must not be pivoted on
        let a = ps(&[
            &[0.8728991839389928, -0.9467866001797935, 0.05096319037869318, -1.7110334261510756, 0.3227474728109573],
            &[-0.21024937709366132, 0.9507391026695101, 0.3058603328425951, 1.0715784768169994, -0.5933116347915033],
        ]);
        let b = ps(&[
            &[-0.7483036166581623, 1.892949568017594, -0.7177586125820964, 1.4386628082619164, 0.689142214384297],
            &[0.4253369196627692, -0.1623873978722472, 1.147214960890231, 0.3133282321146508, -1.5526283201665245],
        ]);
        let h = hulls_intersect(&a, &b).unwrap();
        assert!(h.intersects);
        let w = h.witness.unwrap();
        let mu = h.barycentric_b.unwrap();
        let other = convex_combination(b.points(), &mu, 5);
        assert!(numerics::norm(&numerics::sub(&w, &other)) < 1e-9);
    }

    #[test]
    fn general_position_examples() {
        let collinear = ps(&[&[0.0, 0.0], &[1.0, 1.0], &[2.0, 2.0]]);
        assert_eq!(in_general_position(&collinear), Verdict::Violated(vec![0, 1, 2]));

        let generic = ps(&[&[0.0, 0.0], &[4.0, 0.0], &[0.0, 3.0], &[1.3, 0.9]]);
        assert!(in_general_position(&generic).holds());

        let in_space = ps(&[
            &[0.0, 0.0, 0.0],
            &[1.0, 2.0, 3.0],
            &[2.0, 4.0, 6.0],
            &[0.0, 1.0, 0.0],
        ]);
        assert_eq!(in_general_position(&in_space), Verdict::Violated(vec![0, 1, 2]));

        let repeated = ps(&[&[1.0, 1.0], &[1.0, 1.0], &[0.0, 3.0]]);
        assert_eq!(in_general_position(&repeated), Verdict::Violated(vec![0, 1]));
    }

    #[test]
    fn parallel_segments_detected() {
        let pos = ps(&[&[-3.0, 3.0], &[-3.0, -3.0]]);
        let neg = ps(&[&[3.0, 1.0], &[3.0, -2.0]]);
        let v = flats_parallel_free(&pos, &neg).unwrap();
        assert_eq!(
            v,
            Verdict::Violated(ParallelFlats {
                first: vec![0, 1],
                second: vec![2, 3]
            })
        );
    }

    #[test]
    fn zero_flats_never_parallel() {
        let pos = ps(&[&[0.0, 0.0]]);
        let neg = ps(&[&[1.0, 1.0]]);
        assert!(flats_parallel_free(&pos, &neg).unwrap().holds());
    }

    #[test]
    fn generic_quadruple_is_parallel_free() {
        let pos = ps(&[&[0.13, 0.71], &[-1.9, 0.35]]);
        let neg = ps(&[&[2.21, -0.4], &[1.05, 1.77]]);
        assert!(flats_parallel_free(&pos, &neg).unwrap().holds());
        // independent check: no pair of disjoint segments is parallel
        let all: [[f64; 2]; 4] = [[0.13, 0.71], [-1.9, 0.35], [2.21, -0.4], [1.05, 1.77]];
        for (a, b) in [((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2))] {
            let u = [all[a.1][0] - all[a.0][0], all[a.1][1] - all[a.0][1]];
            let v = [all[b.1][0] - all[b.0][0], all[b.1][1] - all[b.0][1]];
            assert!((u[0] * v[1] - u[1] * v[0]).abs() > 1e-3);
        }
    }

    #[test]
    fn pair_budget_is_enforced() {
        let pts: Vec<Vec<f64>> = (0..30).map(|i| vec![i as f64, (i * i) as f64]).collect();
        let set = PointSet::new(pts).unwrap();
        let empty = PointSet::with_dim(2, vec![]).unwrap();
        let r = flats_parallel_free_with(&set, &empty, 10, AUDIT_RANK_TOL);
        assert!(matches!(r, Err(Error::AuditTooLarge { .. })));
    }

    #[test]
    fn pair_count_matches_enumeration() {
        // m = 4 in the plane: only the three ways to split into two segments
        assert_eq!(flat_pair_count(4, 2), 3);
        // m = 5 in R^3: 2+2 splits (15) and 2+3 splits (10)
        assert_eq!(flat_pair_count(5, 3), 25);
    }

    #[test]
    fn unique_partition_examples() {
        let square = ps(&[&[0.0, 0.0], &[2.0, 0.0], &[0.0, 2.0], &[2.0, 2.0]]);
        let found = intersecting_bipartitions(&square).unwrap();
        assert_eq!(found, vec![(vec![0, 3], vec![1, 2])]);
        assert!(unique_radon_partition(&square).unwrap());

        let three_on_line = ps(&[&[0.0, 0.0], &[1.0, 0.0], &[2.0, 0.0], &[0.0, 1.0]]);
        assert!(intersecting_bipartitions(&three_on_line).unwrap().len() >= 2);
        assert!(!unique_radon_partition(&three_on_line).unwrap());

        let line = ps(&[&[0.0], &[1.0], &[2.0]]);
        assert!(unique_radon_partition(&line).unwrap());

        assert!(unique_radon_partition(&ps(&[&[0.0], &[1.0]])).is_err());
    }

    #[test]
    fn flattened_simplex_keeps_distances() {
        for k in 2..=6 {
            let s = flattened_simplex(k).unwrap();
            assert_eq!(s.dim(), k - 1);
            for (i, j) in (0..k).tuple_combinations() {
                let d = numerics::norm(&numerics::sub(s.point(i), s.point(j)));
                assert!((d - 2f64.sqrt()).abs() < 1e-12);
            }
            assert!(in_general_position(&s).holds());
        }
    }

    #[test]
    fn simplex_vertices_are_equidistant_from_split_flat() {
        // distance from every vertex to {x_1 + … + x_i = 1/2} ∩ {Σx = 1},
        // computed from the in-flat normal (1..1, 0..0) − (i/k)(1, …, 1)
        for k in 2..=6 {
            let s = simplex_vertices(k).unwrap();
            for i in 1..k {
                let normal: Vec<f64> = (0..k)
                    .map(|j| if j < i { 1.0 } else { 0.0 } - i as f64 / k as f64)
                    .collect();
                let expected = 0.5 * (k as f64 / (i * (k - i)) as f64).sqrt();
                for p in s.points() {
                    let lhs: f64 = p[..i].iter().sum::<f64>() - 0.5;
                    let d = lhs.abs() / numerics::norm(&normal);
                    assert!((d - expected).abs() < 1e-12);
                }
                if k == 2 {
                    assert!((expected - 2f64.sqrt() / 2.0).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn simplex_examples() {
        assert!(simplex_vertices(1).is_err());
        let s2 = simplex_vertices(2).unwrap();
        assert_eq!(s2.points(), &[vec![1.0, 0.0], vec![0.0, 1.0]]);
        for k in [3, 4] {
            let s = simplex_vertices(k).unwrap();
            assert_eq!(s.len(), k);
            for (i, j) in (0..k).tuple_combinations() {
                let d = numerics::norm(&numerics::sub(s.point(i), s.point(j)));
                assert!((d - 2f64.sqrt()).abs() < 1e-15);
            }
        }
    }
}
