use proptest::prelude::*;

use radon_svm::analysis;
use radon_svm::geometry::{self, PointSet};
use radon_svm::numerics::{self, Matrix};
use radon_svm::svm::{self, Label, LabeledPointSet, TrainParams};

fn matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = Matrix> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| {
        prop::collection::vec(-10.0..10.0f64, r * c).prop_map(move |data| Matrix::from_vec(r, c, data).unwrap())
    })
}

/// Product of random `r × k` and `k × c` factors, rank at most `k`.
fn low_rank() -> impl Strategy<Value = (Matrix, usize)> {
    (2..=6usize, 2..=6usize, 1..=3usize).prop_flat_map(|(r, c, k)| {
        (
            prop::collection::vec(-3.0..3.0f64, r * k),
            prop::collection::vec(-3.0..3.0f64, k * c),
        )
            .prop_map(move |(a, b)| {
                let mut data = vec![0.0; r * c];
                for i in 0..r {
                    for j in 0..c {
                        data[i * c + j] = (0..k).map(|t| a[i * k + t] * b[t * c + j]).sum();
                    }
                }
                (Matrix::from_vec(r, c, data).unwrap(), k.min(r).min(c))
            })
    })
}

/// Two clouds offset along the first axis, guaranteed separable.
fn separable(dim: usize) -> impl Strategy<Value = LabeledPointSet> {
    (1..=5usize, 1..=5usize).prop_flat_map(move |(p, q)| {
        (
            prop::collection::vec(prop::collection::vec(-1.0..1.0f64, dim), p),
            prop::collection::vec(prop::collection::vec(-1.0..1.0f64, dim), q),
            0.5..4.0f64,
        )
            .prop_map(|(pos, neg, gap)| {
                let shift = |mut v: Vec<f64>, s: f64| {
                    v[0] += s;
                    v
                };
                let pos = pos.into_iter().map(|v| shift(v, 1.0 + gap)).collect();
                let neg = neg.into_iter().map(|v| shift(v, -1.0)).collect();
                LabeledPointSet::from_classes(neg, pos).unwrap()
            })
    })
}

fn train(d: &LabeledPointSet) -> svm::SvmSolution {
    svm::train_hard_margin(d, TrainParams::default()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_nullity(m in matrix(6, 6)) {
        let r = numerics::rank(&m, numerics::DEFAULT_RANK_TOL);
        let basis = numerics::null_space(&m, numerics::DEFAULT_RANK_TOL);
        prop_assert_eq!(r + basis.len(), m.cols());
        for v in &basis {
            prop_assert!((numerics::norm(v) - 1.0).abs() < 1e-10);
            prop_assert!(numerics::norm(&m.mul_vec(v)) < 1e-8 * m.norm().max(1.0));
        }
    }

    #[test]
    fn rank_of_products((m, k) in low_rank()) {
        prop_assert!(numerics::rank(&m, 1e-9) <= k);
        prop_assert_eq!(numerics::rank(&m.transpose(), 1e-9), numerics::rank(&m, 1e-9));
    }

    #[test]
    fn projection_is_idempotent(
        x in prop::collection::vec(-50.0..50.0f64, 3),
        w in prop::collection::vec(-5.0..5.0f64, 3),
        b in -10.0..10.0f64,
    ) {
        prop_assume!(numerics::norm(&w) > 1e-3);
        let p = numerics::project_onto_hyperplane(&x, &w, b).unwrap();
        let pp = numerics::project_onto_hyperplane(&p, &w, b).unwrap();
        prop_assert!(numerics::norm(&numerics::sub(&p, &pp)) < 1e-9);
        prop_assert!((numerics::dot(&w, &p) + b).abs() < 1e-9 * numerics::norm(&w) * (1.0 + numerics::norm(&x)));
    }

    #[test]
    fn trained_solutions_pass_kkt(d in separable(2)) {
        let sol = train(&d);
        prop_assert!(svm::kkt_check(&sol, &d).passes(1e-8));
        prop_assert!(sol.support_indices.len() >= 2);
        prop_assert!((sol.primal_value() - sol.dual_value(&d)).abs() < 1e-7 * sol.primal_value().max(1.0));
    }

    #[test]
    fn scaling_and_translation_invariance(
        d in separable(3),
        c in 0.1..10.0f64,
        t in prop::collection::vec(-20.0..20.0f64, 3),
    ) {
        let sol = train(&d);
        let moved = d.map_points(|p| p.iter().zip(&t).map(|(x, s)| c * x + s).collect()).unwrap();
        let sol2 = train(&moved);
        prop_assert!((sol2.margin - c * sol.margin).abs() < 1e-6 * c * sol.margin);
        for (a, b) in sol.w.iter().zip(&sol2.w) {
            prop_assert!((a / c - b).abs() < 1e-6 * numerics::norm(&sol.w) / c);
        }
        let r1 = analysis::classify_configuration(&sol, &d);
        let r2 = analysis::classify_configuration(&sol2, &moved);
        if r1.degeneracy_flags.is_empty() && r2.degeneracy_flags.is_empty() {
            prop_assert_eq!(sol.support_indices, sol2.support_indices);
        }
    }

    #[test]
    fn flipping_labels_flips_the_separator(d in separable(2)) {
        let flipped = LabeledPointSet::new(
            d.points().to_vec(),
            d.labels().iter().map(|l| l.flipped()).collect(),
        ).unwrap();
        let a = train(&d);
        let b = train(&flipped);
        prop_assert!(numerics::norm(&numerics::sub(&a.w, &b.w.iter().map(|v| -v).collect::<Vec<_>>())) < 1e-6);
        prop_assert!((a.b + b.b).abs() < 1e-6);
    }

    #[test]
    fn dual_radon_point_lies_on_the_hyperplane(d in separable(3)) {
        let sol = train(&d);
        let r = analysis::radon_point_from_duals(&sol, &d).unwrap();
        prop_assert!(sol.decision(&r.point).abs() < 1e-8 * (1.0 + numerics::norm(&sol.w)));
        prop_assert!(r.in_projected_hulls);
        prop_assert!(r.witness_residual < 1e-8);
        let pos_mass: f64 = d.indices_of(Label::Positive).iter().map(|&i| r.weights[i]).sum();
        prop_assert!((pos_mass - 1.0).abs() < 1e-12);
    }

    #[test]
    fn radon_certificates(pts in prop::collection::vec(prop::collection::vec(-5.0..5.0f64, 3), 5)) {
        let set = PointSet::new(pts.clone()).unwrap();
        let c = geometry::radon_partition(&set).unwrap();
        prop_assert!(c.coefficients.iter().sum::<f64>().abs() < 1e-10);
        let mut comb = vec![0.0; 3];
        for (p, a) in pts.iter().zip(&c.coefficients) {
            numerics::axpy(*a, p, &mut comb);
        }
        prop_assert!(numerics::norm(&comb) < 1e-9);
        prop_assert_eq!(c.part_one.len() + c.part_two.len(), 5);
        let h = geometry::hulls_intersect(&set.subset(&c.part_one), &set.subset(&c.part_two)).unwrap();
        prop_assert!(h.intersects);
    }

    #[test]
    fn hull_witness_is_in_both_hulls(
        a in prop::collection::vec(prop::collection::vec(-3.0..3.0f64, 2), 1..5),
        b in prop::collection::vec(prop::collection::vec(-3.0..3.0f64, 2), 1..5),
    ) {
        let (sa, sb) = (PointSet::new(a.clone()).unwrap(), PointSet::new(b.clone()).unwrap());
        let h = geometry::hulls_intersect(&sa, &sb).unwrap();
        if h.intersects {
            let w = h.witness.unwrap();
            let lam = h.barycentric_a.unwrap();
            let mu = h.barycentric_b.unwrap();
            prop_assert!(lam.iter().chain(&mu).all(|v| *v >= 0.0));
            let mut other = vec![0.0; 2];
            for (p, m) in b.iter().zip(&mu) {
                numerics::axpy(*m, p, &mut other);
            }
            prop_assert!(numerics::norm(&numerics::sub(&w, &other)) < 1e-8);
        } else {
            // disjoint hulls of labeled points are linearly separable
            let d = LabeledPointSet::from_classes(b, a).unwrap();
            prop_assert!(svm::is_linearly_separable(&d).unwrap());
        }
    }
}
