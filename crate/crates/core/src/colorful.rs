//! No-dimensional colorful Tverberg partitions.
//!
//! Each of the `n` color classes has exactly `k` points. Class members are
//! lifted with the star lifting (root 0): shift `j` sends member `i` to node
//! `(i + j) mod k`, and the points sent to node `l` across all classes form
//! the colorful set `A_l`. Classes are processed in reverse order, each
//! taking the shift that minimizes the conditional expectation of
//! `‖c(X)‖²` given the shifts already fixed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{axpy, dist, dist_sq, dot, Ball, DiameterPolicy, Point, PointSet};
use crate::lifting::LiftingGraph;

/// Relative gap, with respect to the magnitude of the objective's terms,
/// below which two shift objectives count as tied.
pub const SHIFT_TIE_EPS: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct ColorInstance {
    classes: Vec<PointSet>,
    k: usize,
}

impl ColorInstance {
    pub fn new(classes: Vec<PointSet>) -> Result<Self> {
        let first = classes
            .first()
            .ok_or_else(|| Error::InvalidColorInstance("no color classes".into()))?;
        let (k, d) = (first.len(), first.dim());
        if k == 0 {
            return Err(Error::InvalidColorInstance("class 0 is empty".into()));
        }
        for (a, class) in classes.iter().enumerate() {
            if class.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: class.dim(),
                });
            }
            if class.len() != k {
                return Err(Error::InvalidColorInstance(format!(
                    "class {a} has {} points, expected {k}",
                    class.len()
                )));
            }
        }
        Ok(ColorInstance { classes, k })
    }

    pub fn classes(&self) -> &[PointSet] {
        &self.classes
    }

    /// Number of color classes.
    pub fn n(&self) -> usize {
        self.classes.len()
    }

    /// Points per class, and number of colorful sets.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.classes[0].dim()
    }

    /// Total number of points `N = nk`.
    pub fn total(&self) -> usize {
        self.n() * self.k
    }

    /// Same instance with every point moved by `shift`.
    pub fn translated(&self, shift: &[f64]) -> Result<Self> {
        let classes = self
            .classes
            .iter()
            .map(|c| crate::geom::translate(c, shift))
            .collect::<Result<_>>()?;
        ColorInstance::new(classes)
    }
}

/// Shift `j_a ∈ [0, k)` of every class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ShiftAssignment(pub Vec<usize>);

impl ShiftAssignment {
    /// Lifting node of member `i` under shift `j`.
    pub fn node(k: usize, shift: usize, member: usize) -> usize {
        (member + shift) % k
    }

    /// Member sent to node `l` under shift `j`.
    pub fn member(k: usize, shift: usize, node: usize) -> usize {
        (node + k - shift % k) % k
    }

    /// `A_l` as `(class, member)` pairs, one per class.
    pub fn colorful_sets(&self, k: usize) -> Vec<Vec<(usize, usize)>> {
        (0..k)
            .map(|l| {
                self.0
                    .iter()
                    .enumerate()
                    .map(|(a, &j)| (a, Self::member(k, j, l)))
                    .collect()
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColorfulCertificate {
    pub assignment: ShiftAssignment,
    pub colorful_sets: Vec<Vec<(usize, usize)>>,
    pub centroids: Vec<Point>,
    pub ball: Ball,
    pub radius_guaranteed: f64,
    pub radius_achieved: f64,
    pub traversal_centroid_norm: f64,
    pub max_class_diameter: f64,
    pub diameter_exact: bool,
}

/// `‖y‖² + 2⟨y, Σ_m S_m ⊗ q_m⟩` for the lift `y` of `class` under `shift`,
/// with `sums[m]` the running sum `S_m` at node `m` of the star. O(kd).
pub fn colorful_objective(class: &PointSet, shift: usize, sums: &[Vec<f64>]) -> f64 {
    objective_scaled(class, shift, sums).0
}

/// Objective and the sum of the absolute values of its terms.
fn objective_scaled(class: &PointSet, shift: usize, sums: &[Vec<f64>]) -> (f64, f64) {
    let k = class.len();
    let x = |l: usize| class.point(ShiftAssignment::member(k, shift, l));
    let x0 = x(0);
    let mut value = 0.0;
    let mut cross = 0.0;
    let mut magnitude = 0.0;
    // w_0 = (k−1)x_0 − Σ_{l≥1} x_l, w_m = x_m − x_0
    let mut w0 = vec![0.0; class.dim()];
    for l in 1..k {
        let xl = x(l);
        value += dist_sq(x0, xl);
        axpy(1.0, x0, &mut w0);
        axpy(-1.0, xl, &mut w0);
        let (a, b) = (dot(xl, &sums[l]), dot(x0, &sums[l]));
        cross += a - b;
        magnitude += a.abs() + b.abs();
    }
    let c0 = dot(&w0, &sums[0]);
    cross += c0;
    magnitude += c0.abs();
    (value + 2.0 * cross, value + 2.0 * magnitude)
}

/// `√(2k(k−1) / N) · max_diam` with `N = nk`.
pub fn colorful_radius_bound(n: usize, k: usize, max_diam: f64) -> f64 {
    if n == 0 || k <= 1 {
        return 0.0;
    }
    let kf = k as f64;
    (2.0 * kf * (kf - 1.0) / (n as f64 * kf)).sqrt() * max_diam
}

pub fn partition_colorful(
    instance: &ColorInstance,
    diameter: &DiameterPolicy,
) -> Result<ColorfulCertificate> {
    let (n, k, d) = (instance.n(), instance.k(), instance.dim());
    // Shifting a class by its own centroid leaves its lift unchanged, since
    // the lifting vectors sum to zero.
    let centered: Vec<PointSet> = instance
        .classes()
        .iter()
        .map(|c| {
            let m = crate::geom::centroid(c)?;
            crate::geom::translate(c, &m.iter().map(|x| -x).collect::<Vec<_>>())
        })
        .collect::<Result<_>>()?;

    let mut sums = vec![vec![0.0; d]; k];
    let mut shifts = vec![0; n];
    let mut values = vec![(0.0, 0.0); k];
    for a in (0..n).rev() {
        let class = &centered[a];
        for (j, v) in values.iter_mut().enumerate() {
            *v = objective_scaled(class, j, &sums);
        }
        let best = values.iter().map(|v| v.0).fold(f64::INFINITY, f64::min);
        let scale = values.iter().map(|v| v.1).fold(0.0, f64::max);
        let j = values
            .iter()
            .position(|v| v.0 <= best + SHIFT_TIE_EPS * scale)
            .unwrap_or(0);
        shifts[a] = j;
        for (l, s) in sums.iter_mut().enumerate() {
            axpy(1.0, class.point(ShiftAssignment::member(k, j, l)), s);
        }
    }

    let assignment = ShiftAssignment(shifts);
    let colorful_sets = assignment.colorful_sets(k);
    let centroids: Vec<Point> = colorful_sets
        .iter()
        .map(|set| {
            let mut c = vec![0.0; d];
            for &(a, i) in set {
                axpy(1.0, instance.classes()[a].point(i), &mut c);
            }
            c.iter_mut().for_each(|x| *x /= n as f64);
            Point::from_vec_unchecked(c)
        })
        .collect();

    let mut max_diam = 0.0f64;
    let mut exact = true;
    for class in instance.classes() {
        let m = diameter.measure(class)?;
        max_diam = max_diam.max(m.value);
        exact &= m.exact;
    }
    let star = LiftingGraph::star(k)?;
    let traversal = star.quadratic_form(&sums)?.max(0.0).sqrt() / n as f64;
    let center = centroids[0].clone();
    let radius_achieved = centroids
        .iter()
        .map(|c| dist(c, &center))
        .fold(0.0, f64::max);
    Ok(ColorfulCertificate {
        assignment,
        colorful_sets,
        ball: Ball {
            center,
            radius: radius_achieved,
        },
        centroids,
        radius_guaranteed: colorful_radius_bound(n, k, max_diam),
        radius_achieved,
        traversal_centroid_norm: traversal,
        max_class_diameter: max_diam,
        diameter_exact: exact,
    })
}
