//! The greedy partitioners against exhaustive enumeration with explicit
//! tensors.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tverberg_core::colorful::{colorful_objective, partition_colorful, ColorInstance, ShiftAssignment};
use tverberg_core::geom::{axpy, diameter_exact, dist, norm_sq, DiameterPolicy, PointSet};
use tverberg_core::lifting::LiftingGraph;
use tverberg_core::oracle::{
    enumerate_colorful, enumerate_traversals, explicit_q_vectors, explicit_tensor, ExplicitLift,
};
use tverberg_core::tverberg::{
    partition_balanced, partition_general, partition_nearly_balanced, traversal_bound_delta,
    traversal_bound_gamma, AugmentedTree, PartitionOptions, SelectionRule, SizeSpec,
    StepCoefficients,
};

fn cloud(rng: &mut ChaCha8Rng, n: usize, d: usize) -> PointSet {
    PointSet::new(d, (0..n * d).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap()
}

fn random_sizes(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<usize> {
    let mut sizes = vec![1; k];
    for _ in k..n {
        sizes[rng.random_range(0..k)] += 1;
    }
    sizes
}

/// `‖c(X)‖²` of a labelled partition with explicit tensors on centered points.
fn explicit_sq_norm(set: &PointSet, parts: &[Vec<usize>], lift: &ExplicitLift) -> f64 {
    let n = set.len() as f64;
    let d = set.dim();
    let mut c = vec![0.0; d];
    for p in set.iter() {
        axpy(1.0 / n, p, &mut c);
    }
    let mut sum = vec![0.0; d * lift.edges.len()];
    for (i, part) in parts.iter().enumerate() {
        for &a in part {
            let p: Vec<f64> = set.point(a).iter().zip(&c).map(|(x, y)| x - y).collect();
            axpy(1.0 / n, &explicit_tensor(&p, &lift.q_f64(i)), &mut sum);
        }
    }
    norm_sq(&sum)
}

fn within(value: f64, bound: f64) -> bool {
    value <= bound + 1e-9 * bound.abs().max(1e-12)
}

#[test]
fn regular_dominance() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let opts = PartitionOptions::default();
    for trial in 0..200 {
        let n = rng.random_range(2..=8);
        let k = rng.random_range(1..=3.min(n));
        let d = rng.random_range(1..=3);
        let set = cloud(&mut rng, n, d);
        let (cert, graph) = match trial % 3 {
            0 => {
                let sizes = SizeSpec::new(random_sizes(&mut rng, n, k)).unwrap();
                (partition_general(&set, &sizes, &opts).unwrap(), LiftingGraph::balanced_ary(4, k).unwrap())
            }
            1 => {
                let n0 = k * (n / k);
                let set = set.prefix(n0);
                let cert = partition_balanced(&set, k, &opts).unwrap();
                let rep = enumerate_traversals(&set, &cert.sizes, &LiftingGraph::star(k).unwrap()).unwrap();
                let got = cert.traversal_centroid_norm.powi(2);
                assert!(within(got, rep.mean_sq_norm), "balanced trial {trial}: {got} > {}", rep.mean_sq_norm);
                continue;
            }
            _ => {
                let cert = partition_nearly_balanced(&set, k, &opts).unwrap();
                // The guarantee concerns the evenly split core.
                let n0 = k * (n / k);
                let core = set.prefix(n0);
                let parts: Vec<Vec<usize>> =
                    cert.parts.iter().zip(&cert.core_sizes).map(|(p, &c)| p[..c].to_vec()).collect();
                let star = LiftingGraph::star(k).unwrap();
                let got = explicit_sq_norm(&core, &parts, &explicit_q_vectors(&star));
                let rep = enumerate_traversals(&core, &cert.core_sizes, &star).unwrap();
                assert!(within(got, rep.mean_sq_norm), "nearly balanced trial {trial}");
                continue;
            }
        };
        let rep = enumerate_traversals(&set, &cert.sizes, &graph).unwrap();
        let got = explicit_sq_norm(&set, &cert.parts, &explicit_q_vectors(&graph));
        assert!(within(got, rep.mean_sq_norm), "general trial {trial}: {got} > {}", rep.mean_sq_norm);
        let implicit = cert.traversal_centroid_norm.powi(2);
        assert!((implicit - got).abs() <= 1e-9 * got.max(1e-12));
    }
}

#[test]
fn seeded_example_with_sizes_3_2_1() {
    let mut rng = ChaCha8Rng::seed_from_u64(47);
    let set = cloud(&mut rng, 6, 2);
    let sizes = SizeSpec::new(vec![3, 2, 1]).unwrap();
    let cert = partition_general(&set, &sizes, &PartitionOptions::default()).unwrap();
    let graph = LiftingGraph::balanced_ary(4, 3).unwrap();
    let rep = enumerate_traversals(&set, &[3, 2, 1], &graph).unwrap();
    assert_eq!(rep.count, 60);
    assert!(within(cert.traversal_centroid_norm.powi(2), rep.mean_sq_norm));
    assert!(cert.radius_achieved <= cert.radius_guaranteed);
    assert!(cert.traversal_centroid_norm <= cert.traversal_bound);
    for (part, &r) in cert.parts.iter().zip(&[3, 2, 1]) {
        assert_eq!(part.len(), r);
    }
}

#[test]
fn enumeration_means_respect_averaging_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..100 {
        let n = rng.random_range(2..=8);
        let k = rng.random_range(1..=3.min(n));
        let d = rng.random_range(1..=3);
        let set = cloud(&mut rng, n, d);
        let diam = diameter_exact(&set).unwrap();
        let graph = LiftingGraph::balanced_ary(4, k).unwrap();
        let sizes = random_sizes(&mut rng, n, k);
        let rep = enumerate_traversals(&set, &sizes, &graph).unwrap();
        let delta = traversal_bound_delta(n, graph.stats().max_degree, diam);
        assert!(within(rep.mean_sq_norm, delta * delta));
        let n0 = k * (n / k);
        let core = set.prefix(n0);
        let star = LiftingGraph::star(k).unwrap();
        let rep = enumerate_traversals(&core, &vec![n0 / k; k], &star).unwrap();
        let gamma = traversal_bound_gamma(n0, k, k - 1, diameter_exact(&core).unwrap());
        assert!(within(rep.mean_sq_norm, gamma * gamma));
    }
}

/// Mean of `‖F + Σ_{a ≤ last} p_a ⊗ q_{class(a)}‖²` over all completions that
/// use exactly `quota[i]` of the points `0..=last` for class `i`.
fn completion_mean(
    pts: &[Vec<f64>],
    last: usize,
    quota: &mut [usize],
    fixed: &[f64],
    lift: &ExplicitLift,
) -> (f64, u64) {
    let mut total = 0.0;
    let mut count = 0;
    let mut acc = fixed.to_vec();
    fn go(
        a: usize,
        pts: &[Vec<f64>],
        last: usize,
        quota: &mut [usize],
        acc: &mut Vec<f64>,
        lift: &ExplicitLift,
        total: &mut f64,
        count: &mut u64,
    ) {
        if a > last {
            *total += norm_sq(acc);
            *count += 1;
            return;
        }
        for i in 0..quota.len() {
            if quota[i] > 0 {
                quota[i] -= 1;
                let t = explicit_tensor(&pts[a], &lift.q_f64(i));
                axpy(1.0, &t, acc);
                go(a + 1, pts, last, quota, acc, lift, total, count);
                axpy(-1.0, &t, acc);
                quota[i] += 1;
            }
        }
    }
    go(0, pts, last, quota, &mut acc, lift, &mut total, &mut count);
    (total / count as f64, count)
}

#[test]
fn exact_step_objective_tracks_conditional_expectation() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..60 {
        let n = rng.random_range(2..=7);
        let k = rng.random_range(1..=3.min(n));
        let d = rng.random_range(1..=3);
        let set = cloud(&mut rng, n, d);
        let graph = if rng.random_bool(0.5) {
            LiftingGraph::star(k).unwrap()
        } else {
            LiftingGraph::path(k).unwrap()
        };
        let lift = explicit_q_vectors(&graph);
        let sizes = random_sizes(&mut rng, n, k);
        let mut c = vec![0.0; d];
        for p in set.iter() {
            axpy(1.0 / n as f64, p, &mut c);
        }
        let pts: Vec<Vec<f64>> = set.iter().map(|p| p.iter().zip(&c).map(|(x, y)| x - y).collect()).collect();
        let mut tree = AugmentedTree::new(&graph, &graph, &sizes, d).unwrap();
        let mut quota = sizes.clone();
        let mut fixed = vec![0.0; d * lift.edges.len()];
        for s in (0..n).rev() {
            let mut sum = vec![0.0; d];
            let mut sq = 0.0;
            for p in &pts[..s] {
                axpy(1.0, p, &mut sum);
                sq += norm_sq(p);
            }
            let coef = StepCoefficients::exact(&pts[s], &sum, sq, s);
            let (before, _) = completion_mean(&pts, s, &mut quota, &fixed, &lift);
            let mut offsets = Vec::new();
            let mut expectations = vec![f64::NAN; k];
            let feasible: Vec<usize> = (0..k).filter(|&i| quota[i] > 0).collect();
            for i in feasible {
                quota[i] -= 1;
                let mut f = fixed.clone();
                axpy(1.0, &explicit_tensor(&pts[s], &lift.q_f64(i)), &mut f);
                let e = if s == 0 {
                    norm_sq(&f)
                } else {
                    completion_mean(&pts, s - 1, &mut quota, &f, &lift).0
                };
                quota[i] += 1;
                expectations[i] = e;
                offsets.push(e - tree.objective(i, &coef));
            }
            let spread = offsets.iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x))
                - offsets.iter().fold(f64::INFINITY, |m, &x| m.min(x));
            assert!(spread <= 1e-9 * before.max(1.0), "offset spread {spread}");
            let chosen = tree.select(&coef).unwrap();
            assert!(quota[chosen] > 0);
            assert!(within(expectations[chosen], before), "step increased the conditional mean");
            tree.assign(chosen, &pts[s]).unwrap();
            quota[chosen] -= 1;
            axpy(1.0, &explicit_tensor(&pts[s], &lift.q_f64(chosen)), &mut fixed);
        }
    }
}

#[test]
fn uniform_rule_keeps_sizes_and_reports_its_norm() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let opts = PartitionOptions { rule: SelectionRule::UniformAverage, ..Default::default() };
    for _ in 0..50 {
        let n = rng.random_range(3..=8);
        let k = rng.random_range(1..=3.min(n));
        let set = cloud(&mut rng, n, 2);
        let sizes = random_sizes(&mut rng, n, k);
        let cert = partition_general(&set, &SizeSpec::new(sizes.clone()).unwrap(), &opts).unwrap();
        for (p, r) in cert.parts.iter().zip(&sizes) {
            assert_eq!(p.len(), *r);
        }
        let graph = LiftingGraph::balanced_ary(4, k).unwrap();
        let got = explicit_sq_norm(&set, &cert.parts, &explicit_q_vectors(&graph));
        assert!((cert.traversal_centroid_norm.powi(2) - got).abs() <= 1e-9 * got.max(1e-12));
    }
}

fn color_instance(rng: &mut ChaCha8Rng, n: usize, k: usize, d: usize) -> ColorInstance {
    ColorInstance::new((0..n).map(|_| cloud(rng, k, d)).collect()).unwrap()
}

fn colorful_sq_norm(inst: &ColorInstance, shifts: &[usize]) -> f64 {
    let k = inst.k();
    let lift = explicit_q_vectors(&LiftingGraph::star(k).unwrap());
    let mut c = vec![0.0; inst.dim() * lift.edges.len()];
    for (class, &j) in inst.classes().iter().zip(shifts) {
        for i in 0..k {
            let q = lift.q_f64(ShiftAssignment::node(k, j, i));
            axpy(1.0 / inst.n() as f64, &explicit_tensor(class.point(i), &q), &mut c);
        }
    }
    norm_sq(&c)
}

#[test]
fn colorful_dominance() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for trial in 0..200 {
        let n = rng.random_range(1..=6);
        let k = rng.random_range(1..=3);
        let d = rng.random_range(1..=3);
        let inst = color_instance(&mut rng, n, k, d);
        let cert = partition_colorful(&inst, &DiameterPolicy::default()).unwrap();
        let rep = enumerate_colorful(&inst).unwrap();
        assert_eq!(rep.count, (k as u64).pow(n as u32));
        let got = colorful_sq_norm(&inst, &cert.assignment.0);
        assert!(within(got, rep.mean_sq_norm), "trial {trial}: {got} > {}", rep.mean_sq_norm);
        assert!((cert.traversal_centroid_norm.powi(2) - got).abs() <= 1e-9 * got.max(1e-12));
        assert!(cert.radius_achieved <= cert.traversal_centroid_norm + 1e-12);
    }
}

#[test]
fn colorful_two_by_two_line() {
    let p = PointSet::new(1, vec![0.0, 1.0]).unwrap();
    let inst = ColorInstance::new(vec![p.clone(), p]).unwrap();
    let cert = partition_colorful(&inst, &DiameterPolicy::default()).unwrap();
    let rep = enumerate_colorful(&inst).unwrap();
    assert_eq!(rep.count, 4);
    assert_eq!(colorful_sq_norm(&inst, &cert.assignment.0), rep.min_sq_norm);
    assert_eq!(cert.radius_achieved, 0.0);
}

#[test]
fn colorful_objective_matches_explicit_lift() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..200 {
        let k = rng.random_range(1..=4);
        let d = rng.random_range(1..=3);
        let class = cloud(&mut rng, k, d);
        let lift = explicit_q_vectors(&LiftingGraph::star(k).unwrap());
        let sums: Vec<Vec<f64>> = (0..k).map(|_| (0..d).map(|_| rng.random_range(-4.0..4.0)).collect()).collect();
        let mut later = vec![0.0; d * lift.edges.len()];
        for (m, s) in sums.iter().enumerate() {
            axpy(1.0, &explicit_tensor(s, &lift.q_f64(m)), &mut later);
        }
        for j in 0..k {
            let mut y = vec![0.0; d * lift.edges.len()];
            for i in 0..k {
                let q = lift.q_f64(ShiftAssignment::node(k, j, i));
                axpy(1.0, &explicit_tensor(class.point(i), &q), &mut y);
            }
            let expected = norm_sq(&y) + 2.0 * tverberg_core::geom::dot(&y, &later);
            let got = colorful_objective(&class, j, &sums);
            assert!((got - expected).abs() <= 1e-9 * (1.0 + expected.abs()));
        }
    }
}

#[test]
fn lifted_class_diameter_and_centroid() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let k = rng.random_range(1..=4);
        let d = rng.random_range(1..=3);
        let class = cloud(&mut rng, k, d);
        let lift = explicit_q_vectors(&LiftingGraph::star(k).unwrap());
        let lifted: Vec<Vec<f64>> = (0..k)
            .map(|j| {
                let mut y = vec![0.0; d * lift.edges.len()];
                for i in 0..k {
                    let q = lift.q_f64(ShiftAssignment::node(k, j, i));
                    axpy(1.0, &explicit_tensor(class.point(i), &q), &mut y);
                }
                y
            })
            .collect();
        let mut total = vec![0.0; d * lift.edges.len()];
        for y in &lifted {
            axpy(1.0, y, &mut total);
        }
        assert!(norm_sq(&total).sqrt() <= 1e-12);
        let diam = diameter_exact(&class).unwrap();
        for a in &lifted {
            for b in &lifted {
                assert!(dist(a, b) <= 2.0 * ((k - 1) as f64).sqrt() * diam + 1e-12);
            }
        }
    }
}
