//! Brute-force references for tests and certificate verification. Nothing
//! here uses the implicit lifting identities of [`crate::lifting`].

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::colorful::{ColorInstance, ShiftAssignment};
use crate::error::{Error, Result};
use crate::geom::{axpy, diameter_exact, dist, dot, norm_sq, PointSet};
use crate::lifting::LiftingGraph;

/// Largest number of assignments the enumerators will visit.
pub const ENUMERATION_LIMIT: f64 = 1e6;
pub const HULL_MAX_ITERATIONS: usize = 100_000;
/// Default hull-distance tolerance relative to the diameter of the hull.
pub const HULL_RELATIVE_TOL: f64 = 1e-7;
/// Critical angles closer than this are merged by the depth sweep.
pub const ANGLE_EPS: f64 = 1e-12;

/// `x ⊗ y` with component `(i, j)` at index `i·|y| + j`.
pub fn explicit_tensor(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().flat_map(|&a| y.iter().map(move |&b| a * b)).collect()
}

/// The lifting vectors as explicit integer rows: coordinate `e` belongs to
/// edge `e = (i, j)` with `i < j`, where `q_i` has `+1` and `q_j` has `−1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplicitLift {
    pub edges: Vec<(usize, usize)>,
    pub q: Vec<Vec<i64>>,
}

impl ExplicitLift {
    pub fn k(&self) -> usize {
        self.q.len()
    }

    pub fn q_f64(&self, i: usize) -> Vec<f64> {
        self.q[i].iter().map(|&v| v as f64).collect()
    }

    pub fn dot(&self, i: usize, j: usize) -> i64 {
        self.q[i].iter().zip(&self.q[j]).map(|(a, b)| a * b).sum()
    }

    /// Rank of the `k × |E|` matrix with rows `q_i`, by exact fraction-free
    /// elimination.
    pub fn rank(&self) -> usize {
        let mut m: Vec<Vec<i128>> = self
            .q
            .iter()
            .map(|r| r.iter().map(|&v| v as i128).collect())
            .collect();
        let cols = self.edges.len();
        let mut rank = 0;
        for c in 0..cols {
            let Some(p) = (rank..m.len()).find(|&r| m[r][c] != 0) else {
                continue;
            };
            m.swap(rank, p);
            for r in 0..m.len() {
                if r != rank && m[r][c] != 0 {
                    let (a, b) = (m[rank][c], m[r][c]);
                    for t in 0..cols {
                        m[r][t] = m[r][t] * a - m[rank][t] * b;
                    }
                    let g = m[r].iter().fold(0i128, |g, &v| gcd(g, v.abs()));
                    if g > 1 {
                        m[r].iter_mut().for_each(|v| *v /= g);
                    }
                }
            }
            rank += 1;
        }
        rank
    }
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn explicit_q_vectors(graph: &LiftingGraph) -> ExplicitLift {
    let edges: Vec<(usize, usize)> = graph.edges().collect();
    let mut q = vec![vec![0i64; edges.len()]; graph.k()];
    for (e, &(i, j)) in edges.iter().enumerate() {
        let (lo, hi) = (i.min(j), i.max(j));
        q[lo][e] = 1;
        q[hi][e] = -1;
    }
    ExplicitLift { edges, q }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnumerationReport {
    pub count: u64,
    pub mean_sq_norm: f64,
    pub min_sq_norm: f64,
    /// Lexicographically first minimizer: a class per point, or a shift per
    /// color class.
    pub argmin: Vec<usize>,
}

/// `n! / Π r_i!` as a float.
pub fn multinomial(sizes: &[usize]) -> f64 {
    let mut value = 1.0;
    let mut total = 0usize;
    for &r in sizes {
        for t in 1..=r {
            total += 1;
            value *= total as f64 / t as f64;
        }
    }
    value
}

struct Accumulator {
    count: u64,
    sum: f64,
    min: f64,
    argmin: Vec<usize>,
}

impl Accumulator {
    fn new() -> Self {
        Accumulator {
            count: 0,
            sum: 0.0,
            min: f64::INFINITY,
            argmin: Vec::new(),
        }
    }

    fn push(&mut self, value: f64, labels: &[usize]) {
        self.count += 1;
        self.sum += value;
        if value < self.min {
            self.min = value;
            self.argmin = labels.to_vec();
        }
    }

    fn report(self) -> EnumerationReport {
        EnumerationReport {
            count: self.count,
            mean_sq_norm: self.sum / self.count as f64,
            min_sq_norm: self.min,
            argmin: self.argmin,
        }
    }
}

fn centered_rows(set: &PointSet) -> Vec<Vec<f64>> {
    let n = set.len() as f64;
    let mut c = vec![0.0; set.dim()];
    for p in set.iter() {
        axpy(1.0 / n, p, &mut c);
    }
    set.iter()
        .map(|p| p.iter().zip(&c).map(|(a, b)| a - b).collect())
        .collect()
}

/// Mean and minimum of `‖c(X)‖²` over every assignment of the centered
/// points to classes with class `i` receiving exactly `sizes[i]` points,
/// where `X` lifts point `p` of class `i` to the explicit tensor `p ⊗ q_i`.
pub fn enumerate_traversals(
    set: &PointSet,
    sizes: &[usize],
    graph: &LiftingGraph,
) -> Result<EnumerationReport> {
    if set.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    if sizes.len() != graph.k() || sizes.iter().sum::<usize>() != set.len() {
        return Err(Error::InvalidSizes(format!(
            "sizes {sizes:?} do not fit {} points and {} classes",
            set.len(),
            graph.k()
        )));
    }
    let count = multinomial(sizes);
    if count > ENUMERATION_LIMIT {
        return Err(Error::OracleTooLarge {
            count,
            limit: ENUMERATION_LIMIT,
        });
    }
    let lift = explicit_q_vectors(graph);
    let rows = centered_rows(set);
    let n = rows.len();
    let lifted: Vec<Vec<Vec<f64>>> = rows
        .iter()
        .map(|p| (0..graph.k()).map(|i| explicit_tensor(p, &lift.q_f64(i))).collect())
        .collect();

    let mut acc = Accumulator::new();
    let mut labels = vec![0; n];
    let mut remaining = sizes.to_vec();
    fn recurse(
        a: usize,
        labels: &mut Vec<usize>,
        remaining: &mut [usize],
        lifted: &[Vec<Vec<f64>>],
        acc: &mut Accumulator,
    ) {
        let n = lifted.len();
        if a == n {
            let mut c = vec![0.0; lifted[0][0].len()];
            for (b, &i) in labels.iter().enumerate() {
                axpy(1.0 / n as f64, &lifted[b][i], &mut c);
            }
            acc.push(norm_sq(&c), labels);
            return;
        }
        for i in 0..remaining.len() {
            if remaining[i] > 0 {
                remaining[i] -= 1;
                labels[a] = i;
                recurse(a + 1, labels, remaining, lifted, acc);
                remaining[i] += 1;
            }
        }
    }
    recurse(0, &mut labels, &mut remaining, &lifted, &mut acc);
    Ok(acc.report())
}

/// Mean and minimum of `‖c(X)‖²` over all `kⁿ` shift assignments, each
/// class lifted explicitly with the star on `k` nodes rooted at 0.
pub fn enumerate_colorful(instance: &ColorInstance) -> Result<EnumerationReport> {
    let (n, k) = (instance.n(), instance.k());
    let count = (k as f64).powi(n as i32);
    if count > ENUMERATION_LIMIT {
        return Err(Error::OracleTooLarge {
            count,
            limit: ENUMERATION_LIMIT,
        });
    }
    let lift = explicit_q_vectors(&LiftingGraph::star(k)?);
    // lifted[a][j] = Σ_i p_{a,i} ⊗ q_{node(i)} under shift j
    let lifted: Vec<Vec<Vec<f64>>> = instance
        .classes()
        .iter()
        .map(|class| {
            (0..k)
                .map(|j| {
                    let mut y = vec![0.0; class.dim() * lift.edges.len()];
                    for i in 0..k {
                        let q = lift.q_f64(ShiftAssignment::node(k, j, i));
                        axpy(1.0, &explicit_tensor(class.point(i), &q), &mut y);
                    }
                    y
                })
                .collect()
        })
        .collect();
    let mut acc = Accumulator::new();
    let mut shifts = vec![0; n];
    loop {
        let mut c = vec![0.0; lifted[0][0].len()];
        for (a, &j) in shifts.iter().enumerate() {
            axpy(1.0 / n as f64, &lifted[a][j], &mut c);
        }
        acc.push(norm_sq(&c), &shifts);
        // next assignment in lexicographic order
        let mut a = n;
        loop {
            if a == 0 {
                return Ok(acc.report());
            }
            a -= 1;
            shifts[a] += 1;
            if shifts[a] < k {
                break;
            }
            shifts[a] = 0;
        }
    }
}

/// Lower and upper bounds on the distance from `x` to `conv(set)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HullDistance {
    pub lower: f64,
    pub upper: f64,
    pub iterations: usize,
}

/// Distance from `x` to `conv(set)` within `tol`, as a sound upper bound
/// (the distance to an explicit convex combination). Uses pairwise
/// Frank–Wolfe over the vertex weights; the lower bound comes from the
/// hyperplane through the best vertex orthogonal to the current residual.
pub fn dist_to_hull(x: &[f64], set: &PointSet, tol: f64) -> Result<f64> {
    Ok(hull_distance_bounds(x, set, tol)?.upper)
}

/// [`dist_to_hull`] with tolerance `1e−7 · diam(set)` (absolute floor 1e−300).
pub fn dist_to_hull_default(x: &[f64], set: &PointSet) -> Result<f64> {
    let tol = (HULL_RELATIVE_TOL * diameter_exact(set)?).max(1e-300);
    dist_to_hull(x, set, tol)
}

pub fn hull_distance_bounds(x: &[f64], set: &PointSet, tol: f64) -> Result<HullDistance> {
    if set.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    if x.len() != set.dim() {
        return Err(Error::DimensionMismatch {
            expected: set.dim(),
            found: x.len(),
        });
    }
    let m = set.len();
    let d = set.dim();
    let start = (0..m)
        .min_by(|&a, &b| dist(set.point(a), x).total_cmp(&dist(set.point(b), x)))
        .expect("nonempty");
    let mut weights = vec![0.0; m];
    weights[start] = 1.0;
    let mut y = set.point(start).to_vec();
    let mut residual = vec![0.0; d];
    let mut step = vec![0.0; d];
    let mut lower = 0.0f64;
    for it in 0..HULL_MAX_ITERATIONS {
        residual.iter_mut().zip(&y).zip(x).for_each(|((r, a), b)| *r = a - b);
        let upper = norm_sq(&residual).sqrt();
        if upper <= tol {
            return Ok(HullDistance { lower, upper, iterations: it });
        }
        // toward: vertex minimizing ⟨r, s⟩; away: active vertex maximizing it
        let scores: Vec<f64> = set.iter().map(|s| dot(&residual, s)).collect();
        let toward = (0..m)
            .min_by(|&a, &b| scores[a].total_cmp(&scores[b]))
            .expect("nonempty");
        let away = (0..m)
            .filter(|&a| weights[a] > 0.0)
            .max_by(|&a, &b| scores[a].total_cmp(&scores[b]))
            .expect("some weight is positive");
        lower = lower.max((scores[toward] - dot(&residual, x)) / upper);
        if upper - lower <= tol {
            return Ok(HullDistance { lower, upper, iterations: it });
        }
        step.iter_mut()
            .zip(set.point(toward))
            .zip(set.point(away))
            .for_each(|((s, a), b)| *s = a - b);
        let len = norm_sq(&step);
        if len == 0.0 {
            return Err(Error::NonConvergence { lower, upper });
        }
        let gamma = (-dot(&residual, &step) / len).clamp(0.0, weights[away]);
        if gamma == 0.0 {
            return Err(Error::NonConvergence { lower, upper });
        }
        weights[toward] += gamma;
        weights[away] -= gamma;
        if weights[away] < 1e-15 {
            weights[away] = 0.0;
        }
        axpy(gamma, &step, &mut y);
    }
    residual.iter_mut().zip(&y).zip(x).for_each(|((r, a), b)| *r = a - b);
    Err(Error::NonConvergence {
        lower,
        upper: norm_sq(&residual).sqrt(),
    })
}

fn require_planar(set: &PointSet, x: &[f64]) -> Result<()> {
    if set.dim() != 2 {
        return Err(Error::NotPlanar(set.dim()));
    }
    if x.len() != 2 {
        return Err(Error::NotPlanar(x.len()));
    }
    Ok(())
}

/// Tukey depth of the point `x` in the plane.
pub fn depth_2d_exact(x: &[f64], set: &PointSet) -> Result<usize> {
    ball_depth_2d(x, 0.0, set)
}

/// Minimum number of points of `set` in a closed halfplane containing the
/// disk of radius `r` around `center`.
///
/// A halfplane with inward normal at angle `θ` contains point `s` iff
/// `ρ cos(φ − θ) ≥ −r`, where `(ρ, φ)` are the polar coordinates of
/// `s − center`; the count is piecewise constant in `θ` and smallest on the
/// open arcs between critical angles `φ ± acos(−r/ρ)`, so it is evaluated
/// once per arc.
pub fn ball_depth_2d(center: &[f64], r: f64, set: &PointSet) -> Result<usize> {
    require_planar(set, center)?;
    let mut always = 0usize;
    let mut arcs: Vec<(f64, f64)> = Vec::new();
    for s in set.iter() {
        let (dx, dy) = (s[0] - center[0], s[1] - center[1]);
        let rho = dx.hypot(dy);
        if rho <= r {
            always += 1;
            continue;
        }
        let phi = dy.atan2(dx);
        let half = (-r / rho).acos();
        arcs.push((phi, half));
    }
    if arcs.is_empty() {
        return Ok(always);
    }
    let mut critical: Vec<f64> = arcs
        .iter()
        .flat_map(|&(phi, h)| [(phi - h).rem_euclid(TAU), (phi + h).rem_euclid(TAU)])
        .collect();
    critical.sort_by(f64::total_cmp);
    critical.dedup_by(|b, a| *b - *a <= ANGLE_EPS);
    let mut best = usize::MAX;
    for (t, &a) in critical.iter().enumerate() {
        let b = if t + 1 < critical.len() {
            critical[t + 1]
        } else {
            critical[0] + TAU
        };
        if b - a <= ANGLE_EPS && critical.len() > 1 {
            continue;
        }
        let theta = 0.5 * (a + b);
        let inside = arcs
            .iter()
            .filter(|&&(phi, h)| angle_gap(phi, theta) <= h)
            .count();
        best = best.min(inside);
    }
    Ok(always + best)
}

/// Absolute angular distance in `[0, π]`.
fn angle_gap(a: f64, b: f64) -> f64 {
    let g = (a - b).rem_euclid(TAU);
    if g > PI {
        TAU - g
    } else {
        g
    }
}

/// Depth of the closed interval `[lo, hi]` among `values`: the smaller of
/// the counts at or above `lo` and at or below `hi`.
pub fn interval_depth(lo: f64, hi: f64, values: &[f64]) -> usize {
    let above = values.iter().filter(|&&v| v >= lo).count();
    let below = values.iter().filter(|&&v| v <= hi).count();
    above.min(below)
}

/// Depth of the slab `{y : |⟨y − origin, normal⟩| ≤ half_width}` for a unit
/// `normal`: only halfspaces with normal `±normal` contain it.
pub fn slab_depth(origin: &[f64], normal: &[f64], half_width: f64, set: &PointSet) -> usize {
    let values: Vec<f64> = set
        .iter()
        .map(|p| {
            p.iter()
                .zip(origin)
                .zip(normal)
                .map(|((a, o), n)| (a - o) * n)
                .sum()
        })
        .collect();
    interval_depth(-half_width, half_width, &values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn set(d: usize, xs: &[f64]) -> PointSet {
        PointSet::new(d, xs.to_vec()).unwrap()
    }

    #[test]
    fn tensor_examples() {
        assert_eq!(explicit_tensor(&[1.0, 2.0], &[3.0]), vec![3.0, 6.0]);
        assert_eq!(explicit_tensor(&[1.0, -2.0], &[0.0, 0.0]), vec![0.0; 4]);
        let t = explicit_tensor(&[1.0, 2.0], &[3.0, 4.0, 5.0]);
        assert_eq!(t, vec![3.0, 4.0, 5.0, 6.0, 8.0, 10.0]);
    }

    #[test]
    fn q_vector_examples() {
        let path = explicit_q_vectors(&LiftingGraph::path(2).unwrap());
        assert_eq!(path.q, vec![vec![1], vec![-1]]);
        let binary = explicit_q_vectors(&LiftingGraph::balanced_ary(2, 7).unwrap());
        let norms: Vec<i64> = (0..7).map(|i| binary.dot(i, i)).collect();
        assert_eq!(norms, vec![2, 3, 3, 1, 1, 1, 1]);
        assert_eq!(binary.rank(), 6);
        assert_eq!(explicit_q_vectors(&LiftingGraph::star(4).unwrap()).rank(), 3);
        let cyc = LiftingGraph::custom(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        assert_eq!(explicit_q_vectors(&cyc).rank(), 4);
    }

    #[test]
    fn multinomial_counts() {
        assert_eq!(multinomial(&[2, 1]), 3.0);
        assert_eq!(multinomial(&[2, 2]), 6.0);
        assert_eq!(multinomial(&[3, 2, 1]), 60.0);
    }

    #[test]
    fn traversal_enumeration_on_a_line() {
        let p = set(1, &[-3.0, -1.0, 1.0, 3.0]);
        let g = LiftingGraph::star(2).unwrap();
        let rep = enumerate_traversals(&p, &[2, 2], &g).unwrap();
        assert_eq!(rep.count, 6);
        assert_eq!(rep.min_sq_norm, 0.0);
        assert_abs_diff_eq!(rep.mean_sq_norm, 10.0 / 6.0, epsilon = 1e-15);
        assert_eq!(rep.argmin, vec![0, 1, 1, 0]);
        let three = set(1, &[0.0, 1.0, 5.0]);
        assert_eq!(enumerate_traversals(&three, &[2, 1], &g).unwrap().count, 3);
    }

    #[test]
    fn enumeration_guard() {
        let p = PointSet::new(1, (0..20).map(f64::from).collect()).unwrap();
        let g = LiftingGraph::star(4).unwrap();
        assert!(matches!(
            enumerate_traversals(&p, &[5, 5, 5, 5], &g),
            Err(Error::OracleTooLarge { .. })
        ));
    }

    #[test]
    fn colorful_enumeration_counts() {
        let one = ColorInstance::new(vec![set(1, &[2.0]), set(1, &[3.0])]).unwrap();
        assert_eq!(enumerate_colorful(&one).unwrap().count, 1);
        let two = ColorInstance::new(vec![set(1, &[0.0, 1.0]), set(1, &[0.0, 1.0])]).unwrap();
        let rep = enumerate_colorful(&two).unwrap();
        assert_eq!(rep.count, 4);
        // opposite shifts cancel
        assert_eq!(rep.min_sq_norm, 0.0);
        assert_eq!(rep.argmin, vec![0, 1]);
    }

    #[test]
    fn hull_distance_examples() {
        let seg = set(2, &[0.0, -1.0, 0.0, 1.0]);
        assert_abs_diff_eq!(dist_to_hull(&[2.0, 0.0], &seg, 1e-9).unwrap(), 2.0, epsilon = 1e-9);
        assert_eq!(dist_to_hull(&[0.0, 1.0], &seg, 1e-9).unwrap(), 0.0);
        let square = set(2, &[0.0, 0.0, 2.0, 0.0, 0.0, 2.0, 2.0, 2.0]);
        assert!(dist_to_hull(&[1.0, 1.0], &square, 1e-9).unwrap() <= 1e-9);
        assert_abs_diff_eq!(dist_to_hull(&[3.0, 3.0], &square, 1e-9).unwrap(), 2.0f64.sqrt(), epsilon = 1e-8);
        let b = hull_distance_bounds(&[1.0, 5.0], &square, 1e-9).unwrap();
        assert!(b.lower <= 3.0 + 1e-12 && b.upper >= 3.0 - 1e-12);
    }

    #[test]
    fn depth_examples() {
        let diamond = set(2, &[1.0, 0.0, -1.0, 0.0, 0.0, 1.0, 0.0, -1.0]);
        assert_eq!(depth_2d_exact(&[0.0, 0.0], &diamond).unwrap(), 2);
        assert_eq!(depth_2d_exact(&[5.0, 0.0], &diamond).unwrap(), 0);
        assert_eq!(depth_2d_exact(&[1.0, 0.0], &diamond).unwrap(), 1);
        let single = set(2, &[0.5, 0.5]);
        assert_eq!(depth_2d_exact(&[0.5, 0.5], &single).unwrap(), 1);
        assert_eq!(ball_depth_2d(&[3.0, 0.0], 3.0, &diamond).unwrap(), 2);
        assert_eq!(ball_depth_2d(&[3.0, 0.0], 2.5, &diamond).unwrap(), 1);
        assert_eq!(ball_depth_2d(&[0.0, 0.0], 2.0, &diamond).unwrap(), 4);
        assert!(matches!(depth_2d_exact(&[0.0], &set(1, &[0.0])), Err(Error::NotPlanar(1))));
    }

    #[test]
    fn slab_and_interval() {
        assert_eq!(interval_depth(-0.5, 0.5, &[-2.0, -1.0, 0.0, 1.0, 2.0]), 3);
        let pts = set(2, &[0.0, 5.0, 1.0, -3.0, -1.0, 0.0, 0.0, 0.0]);
        assert_eq!(slab_depth(&[0.0, 0.0], &[1.0, 0.0], 0.1, &pts), 3);
    }
}
