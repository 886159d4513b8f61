//! Deterministic no-dimensional Tverberg partitions.
//!
//! Points are centered, then processed in reverse input order. Each point is
//! given to a class chosen by the conditional-expectations greedy over the
//! implicit lifting `p ↦ p ⊗ q_i`, using an [`AugmentedTree`] to find a good
//! class in `O(d · arity · height)` time.

mod tree;

pub use tree::{step_objective, AugmentedTree, StepCoefficients, TIE_EPS};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{axpy, dist, norm_sq, Ball, Diameter, DiameterPolicy, Point, PointSet};
use crate::lifting::LiftingGraph;

pub const DEFAULT_ARITY: usize = 4;

/// Part sizes `r_1..r_k`, each at least one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SizeSpec(Vec<usize>);

impl SizeSpec {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::InvalidSizes("no parts requested".into()));
        }
        if let Some(i) = sizes.iter().position(|&r| r == 0) {
            return Err(Error::InvalidSizes(format!("part {i} has size 0")));
        }
        Ok(SizeSpec(sizes))
    }

    /// `k` parts of size `n / k`.
    pub fn balanced(n: usize, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidSizes("no parts requested".into()));
        }
        if k > n {
            return Err(Error::TooManyParts { n, k });
        }
        if !n.is_multiple_of(k) {
            return Err(Error::NotDivisible { n, k });
        }
        SizeSpec::new(vec![n / k; k])
    }

    /// Sizes `⌊n/k⌋ + 1` for the first `n mod k` parts, `⌊n/k⌋` for the rest.
    pub fn nearly_balanced(n: usize, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidSizes("no parts requested".into()));
        }
        if k > n {
            return Err(Error::TooManyParts { n, k });
        }
        let (q, l) = (n / k, n % k);
        SizeSpec::new((0..k).map(|i| q + usize::from(i < l)).collect())
    }

    pub fn k(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn min(&self) -> usize {
        self.0.iter().copied().min().unwrap_or(0)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    fn check_total(&self, n: usize) -> Result<()> {
        if self.k() > n {
            return Err(Error::TooManyParts { n, k: self.k() });
        }
        if self.total() != n {
            return Err(Error::InvalidSizes(format!(
                "sizes sum to {}, point set has {n} points",
                self.total()
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    General,
    Balanced,
    NearlyBalanced,
}

/// How a class is chosen at each step.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionRule {
    /// Exact conditional expectation with quota-weighted averages, found by
    /// tree descent. Never increases the conditional mean of `‖c(X)‖²`.
    #[default]
    ConditionalExpectation,
    /// Objective `α N + β R + ⟨p, U⟩` compared against its unweighted mean
    /// over all classes, by linear scan with a feasible-minimum fallback.
    UniformAverage,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PartitionOptions {
    pub arity: usize,
    pub rule: SelectionRule,
    pub diameter: DiameterPolicy,
}

impl Default for PartitionOptions {
    fn default() -> Self {
        PartitionOptions {
            arity: DEFAULT_ARITY,
            rule: SelectionRule::default(),
            diameter: DiameterPolicy::default(),
        }
    }
}

/// Closed-form radius guarantee attached to a certificate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "formula")]
pub enum BoundFormula {
    /// `(n / min r) · √(10⌈log₄ k⌉ / (n−1)) · diam`
    GeneralLog4,
    /// `(n / min r) · √(2 h (a+1) / (n−1)) · diam` for an `a`-ary lifting tree of height `h`
    GeneralAry { arity: usize, height: usize },
    /// `√(k(k−1) / (n−1)) · diam`
    Balanced,
    /// `max(√((k+2)(k−1)/(n−1)), √(k(k−1)/(n₀−1))) · diam` with `n₀ = k⌊n/k⌋`
    NearlyBalanced,
}

impl BoundFormula {
    pub fn radius(&self, n: usize, sizes: &[usize], diam: f64) -> f64 {
        let k = sizes.len();
        if n <= 1 || k <= 1 {
            return 0.0;
        }
        let nm1 = (n - 1) as f64;
        let kf = k as f64;
        let min_r = sizes.iter().copied().min().unwrap_or(1).max(1) as f64;
        let scale = n as f64 / min_r;
        match *self {
            BoundFormula::GeneralLog4 => {
                scale * (10.0 * ceil_log(4, k) as f64 / nm1).sqrt() * diam
            }
            BoundFormula::GeneralAry { arity, height } => {
                scale * (2.0 * height as f64 * (arity as f64 + 1.0) / nm1).sqrt() * diam
            }
            BoundFormula::Balanced => (kf * (kf - 1.0) / nm1).sqrt() * diam,
            BoundFormula::NearlyBalanced => {
                let n0 = k * (n / k);
                let loose = ((kf + 2.0) * (kf - 1.0) / nm1).sqrt();
                let core = if n0 > 1 {
                    (kf * (kf - 1.0) / (n0 - 1) as f64).sqrt()
                } else {
                    0.0
                };
                loose.max(core) * diam
            }
        }
    }
}

/// Smallest `e` with `base^e ≥ k`.
pub fn ceil_log(base: usize, k: usize) -> usize {
    let mut e = 0;
    let mut p = 1usize;
    while p < k {
        p = p.saturating_mul(base);
        e += 1;
    }
    e
}

/// Radius guarantee for `mode` with default arity; see [`BoundFormula`].
pub fn radius_bound(mode: Mode, n: usize, sizes: &[usize], diam: f64) -> f64 {
    let formula = match mode {
        Mode::General => BoundFormula::GeneralLog4,
        Mode::Balanced => BoundFormula::Balanced,
        Mode::NearlyBalanced => BoundFormula::NearlyBalanced,
    };
    formula.radius(n, sizes, diam)
}

/// `δ = √(Δ / (2(n−1))) · diam` for a lifting graph of maximum degree `Δ`.
pub fn traversal_bound_delta(n: usize, max_degree: usize, diam: f64) -> f64 {
    if n <= 1 {
        return 0.0;
    }
    (max_degree as f64 / (2.0 * (n - 1) as f64)).sqrt() * diam
}

/// `γ = √(‖G‖ / (k(n−1))) · diam` for a lifting graph with `‖G‖` edges.
pub fn traversal_bound_gamma(n: usize, k: usize, edges: usize, diam: f64) -> f64 {
    if n <= 1 || k == 0 {
        return 0.0;
    }
    (edges as f64 / (k as f64 * (n - 1) as f64)).sqrt() * diam
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TverbergCertificate {
    pub mode: Mode,
    /// Arity of the lifting tree (general mode only).
    pub arity: Option<usize>,
    pub sizes: Vec<usize>,
    /// Point indices of each part, ascending, except that in nearly
    /// balanced mode the core members come first.
    pub parts: Vec<Vec<usize>>,
    /// Number of leading members of each part whose centroid is the witness.
    pub core_sizes: Vec<usize>,
    /// One point in the convex hull of each part: the centroid of its core.
    pub witnesses: Vec<Point>,
    pub ball: Ball,
    pub radius_guaranteed: f64,
    pub radius_achieved: f64,
    /// `‖c(T)‖` of the lifted traversal, computed on the (core) instance.
    pub traversal_centroid_norm: f64,
    pub traversal_bound: f64,
    pub diameter: Diameter,
    pub bound: BoundFormula,
}

struct Centered {
    coords: Vec<f64>,
    centroid: Vec<f64>,
    dim: usize,
}

impl Centered {
    fn new(set: &PointSet) -> Self {
        let d = set.dim();
        let n = set.len();
        let mut c = vec![0.0; d];
        for p in set.iter() {
            axpy(1.0, p, &mut c);
        }
        c.iter_mut().for_each(|x| *x /= n as f64);
        let mut coords = set.coords().to_vec();
        for row in coords.chunks_exact_mut(d) {
            axpy(-1.0, &c, row);
        }
        Centered { coords, centroid: c, dim: d }
    }

    fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }
}

/// Runs the greedy on centered points and returns the members of each
/// class (ascending) together with the centered class sums.
fn run_greedy(
    pts: &Centered,
    n: usize,
    sizes: &[usize],
    lifting: &LiftingGraph,
    search: &LiftingGraph,
    rule: SelectionRule,
) -> Result<(Vec<Vec<usize>>, Vec<Vec<f64>>)> {
    let d = pts.dim;
    let k = sizes.len();
    // prefix[m] = Σ_{a<m} p_a and prefix_sq[m] = Σ_{a<m} ‖p_a‖²
    let mut prefix = vec![0.0; (n + 1) * d];
    let mut prefix_sq = vec![0.0; n + 1];
    for a in 0..n {
        let (done, rest) = prefix.split_at_mut((a + 1) * d);
        rest[..d].copy_from_slice(&done[a * d..]);
        axpy(1.0, pts.point(a), &mut rest[..d]);
        prefix_sq[a + 1] = prefix_sq[a] + norm_sq(pts.point(a));
    }

    let mut tree = AugmentedTree::new(lifting, search, sizes, d)?;
    let mut parts = vec![Vec::new(); k];
    let mut pending_centroid = vec![0.0; d];
    for s in (0..n).rev() {
        let p = pts.point(s);
        let sum = &prefix[s * d..(s + 1) * d];
        let class = match rule {
            SelectionRule::ConditionalExpectation => {
                tree.select(&StepCoefficients::exact(p, sum, prefix_sq[s], s))?
            }
            SelectionRule::UniformAverage => {
                let inv = if s > 0 { 1.0 / s as f64 } else { 0.0 };
                pending_centroid
                    .iter_mut()
                    .zip(sum)
                    .for_each(|(c, x)| *c = x * inv);
                tree.select_uniform(&StepCoefficients::surrogate(p, &pending_centroid))?
            }
        };
        tree.assign(class, p)?;
        parts[class].push(s);
    }
    for part in &mut parts {
        part.reverse();
    }
    let sums = (0..k).map(|i| tree.part_sum(i).to_vec()).collect();
    Ok((parts, sums))
}

/// `‖c(T)‖ = √(Σ_edges ‖u_i − u_j‖²) / n` for centered class sums `u_i`.
fn traversal_norm(lifting: &LiftingGraph, sums: &[Vec<f64>], n: usize) -> Result<f64> {
    Ok(lifting.quadratic_form(sums)?.max(0.0).sqrt() / n as f64)
}

fn part_centroid(set: &PointSet, members: &[usize]) -> Point {
    let mut c = vec![0.0; set.dim()];
    for &a in members {
        axpy(1.0, set.point(a), &mut c);
    }
    c.iter_mut().for_each(|x| *x /= members.len() as f64);
    Point::from_vec_unchecked(c)
}

fn check_input(set: &PointSet, k: usize) -> Result<()> {
    if set.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    if k == 0 {
        return Err(Error::InvalidSizes("no parts requested".into()));
    }
    if k > set.len() {
        return Err(Error::TooManyParts { n: set.len(), k });
    }
    Ok(())
}

/// Partition into parts of prescribed sizes, lifting along a balanced
/// `options.arity`-ary tree. The ball is centered at `c(P)`.
pub fn partition_general(
    set: &PointSet,
    sizes: &SizeSpec,
    options: &PartitionOptions,
) -> Result<TverbergCertificate> {
    check_input(set, sizes.k())?;
    sizes.check_total(set.len())?;
    let n = set.len();
    let k = sizes.k();
    let graph = LiftingGraph::balanced_ary(options.arity, k)?;
    let pts = Centered::new(set);
    let (parts, sums) = run_greedy(&pts, n, sizes.as_slice(), &graph, &graph, options.rule)?;
    let diameter = options.diameter.measure(set)?;

    let bound = if options.arity == 4 {
        BoundFormula::GeneralLog4
    } else {
        BoundFormula::GeneralAry {
            arity: options.arity,
            height: graph.height(),
        }
    };
    let witnesses: Vec<Point> = parts.iter().map(|m| part_centroid(set, m)).collect();
    let center = Point::from_vec_unchecked(pts.centroid.clone());
    let stats = graph.stats();
    Ok(finish(
        Mode::General,
        Some(options.arity),
        sizes.as_slice().to_vec(),
        parts,
        sizes.as_slice().to_vec(),
        witnesses,
        center,
        bound.radius(n, sizes.as_slice(), diameter.value),
        traversal_norm(&graph, &sums, n)?,
        traversal_bound_delta(n, stats.max_degree, diameter.value),
        diameter,
        bound,
    ))
}

/// Partition into `k` parts of size `n / k`, lifting along a star and
/// searching a ternary tree. The ball is centered at the centroid of the
/// first part.
pub fn partition_balanced(
    set: &PointSet,
    k: usize,
    options: &PartitionOptions,
) -> Result<TverbergCertificate> {
    check_input(set, k)?;
    let sizes = SizeSpec::balanced(set.len(), k)?;
    let diameter = options.diameter.measure(set)?;
    let core = balanced_core(set, k, options.rule)?;
    let n = set.len();
    let center = core.witnesses[0].clone();
    Ok(finish(
        Mode::Balanced,
        None,
        sizes.as_slice().to_vec(),
        core.parts,
        sizes.as_slice().to_vec(),
        core.witnesses,
        center,
        BoundFormula::Balanced.radius(n, sizes.as_slice(), diameter.value),
        core.traversal_norm,
        traversal_bound_gamma(n, k, k - 1, diameter.value),
        diameter,
        BoundFormula::Balanced,
    ))
}

/// Sizes `⌊n/k⌋` or `⌊n/k⌋ + 1`: the first `k⌊n/k⌋` points are split
/// evenly, then the leftover points are appended one each to parts
/// `0, 1, …`. Each witness is the centroid of the evenly split core of its
/// part, so the radius guarantee is that of the core instance.
pub fn partition_nearly_balanced(
    set: &PointSet,
    k: usize,
    options: &PartitionOptions,
) -> Result<TverbergCertificate> {
    check_input(set, k)?;
    let n = set.len();
    let n0 = k * (n / k);
    let sizes = SizeSpec::nearly_balanced(n, k)?;
    let diameter = options.diameter.measure(set)?;
    let core_set = set.prefix(n0);
    let core = balanced_core(&core_set, k, options.rule)?;
    let mut parts = core.parts;
    for (j, a) in (n0..n).enumerate() {
        parts[j].push(a);
    }
    let center = core.witnesses[0].clone();
    Ok(finish(
        Mode::NearlyBalanced,
        None,
        sizes.as_slice().to_vec(),
        parts,
        vec![n0 / k; k],
        core.witnesses,
        center,
        BoundFormula::NearlyBalanced.radius(n, sizes.as_slice(), diameter.value),
        core.traversal_norm,
        traversal_bound_gamma(n0, k, k - 1, diameter.value),
        diameter,
        BoundFormula::NearlyBalanced,
    ))
}

struct Core {
    parts: Vec<Vec<usize>>,
    witnesses: Vec<Point>,
    traversal_norm: f64,
}

fn balanced_core(set: &PointSet, k: usize, rule: SelectionRule) -> Result<Core> {
    let n = set.len();
    let sizes = SizeSpec::balanced(n, k)?;
    let star = LiftingGraph::star(k)?;
    let search = LiftingGraph::balanced_ary(3, k)?;
    let pts = Centered::new(set);
    let (parts, sums) = run_greedy(&pts, n, sizes.as_slice(), &star, &search, rule)?;
    let witnesses = parts.iter().map(|m| part_centroid(set, m)).collect();
    Ok(Core {
        parts,
        witnesses,
        traversal_norm: traversal_norm(&star, &sums, n)?,
    })
}

#[allow(clippy::too_many_arguments)]
fn finish(
    mode: Mode,
    arity: Option<usize>,
    sizes: Vec<usize>,
    parts: Vec<Vec<usize>>,
    core_sizes: Vec<usize>,
    witnesses: Vec<Point>,
    center: Point,
    radius_guaranteed: f64,
    traversal_centroid_norm: f64,
    traversal_bound: f64,
    diameter: Diameter,
    bound: BoundFormula,
) -> TverbergCertificate {
    let radius_achieved = witnesses
        .iter()
        .map(|w| dist(w, &center))
        .fold(0.0, f64::max);
    TverbergCertificate {
        mode,
        arity,
        sizes,
        parts,
        core_sizes,
        witnesses,
        ball: Ball {
            center,
            radius: radius_achieved,
        },
        radius_guaranteed,
        radius_achieved,
        traversal_centroid_norm,
        traversal_bound,
        diameter,
        bound,
    }
}
