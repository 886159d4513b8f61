//! No-dimensional generalized ham-sandwich certificates.
//!
//! Given sets `P_1..P_k` in `ℝ^d` with `k ≤ d`, everything is translated so
//! that `c(P_1) = 0`. Then, for `i = 1..k−1`, the current centroid of
//! `P_{i+1}` becomes axis `v_i` and every set is projected onto the
//! orthogonal complement of `v_i`. Projection is linear, so after the chain
//! all `k` centroids sit at the origin of a `(d−k+1)`-dimensional subspace.
//! There each projected set is split into `⌈|P_i|/m_i⌉` parts whose witness
//! points all lie in a ball around the origin: every halfspace containing
//! the ball then holds at least one point of each part. The ball times the
//! lines along the axes has the same depth with respect to the original sets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{
    axpy, centroid, dot, norm, Ball, DiameterPolicy, LineThroughOrigin, Point, PointSet,
    DEGENERATE_DIRECTION_EPS,
};
use crate::tverberg::{partition_nearly_balanced, PartitionOptions, TverbergCertificate};

/// The translation and orthonormal axes that bring all centroids together.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectionChain {
    /// `c(P_1)`, subtracted before projecting.
    pub origin: Point,
    /// Unit axes `v_1..v_{k−1}`, pairwise orthogonal.
    pub axes: Vec<Point>,
    /// Norm of the projected centroid each axis came from (0 if it was a fallback).
    pub axis_norms: Vec<f64>,
    /// Whether the projected centroid was too short and a canonical
    /// direction orthogonal to the earlier axes was used instead.
    pub fallback: Vec<bool>,
}

impl ProjectionChain {
    pub fn dim(&self) -> usize {
        self.origin.dim()
    }

    /// Dimension `d − (k−1)` of the subspace the projected sets live in.
    pub fn subspace_dim(&self) -> usize {
        self.dim() - self.axes.len()
    }

    pub fn lines(&self) -> Vec<LineThroughOrigin> {
        self.axes
            .iter()
            .map(|a| LineThroughOrigin::through(a).expect("axes are unit vectors"))
            .collect()
    }

    /// Removes the components of `x` along every axis.
    pub fn project(&self, x: &[f64]) -> Point {
        let mut y = x.to_vec();
        for a in &self.axes {
            let t = dot(&y, a);
            axpy(-t, a, &mut y);
        }
        Point::from_vec_unchecked(y)
    }

    /// `project(x − origin)`.
    pub fn reduce(&self, x: &[f64]) -> Point {
        let mut y = x.to_vec();
        axpy(-1.0, &self.origin, &mut y);
        self.project(&y)
    }

    pub fn reduce_set(&self, set: &PointSet) -> PointSet {
        let coords = set.iter().flat_map(|p| self.reduce(p).into_vec()).collect();
        PointSet::new(set.dim(), coords).expect("projection keeps coordinates finite")
    }
}

fn check_sets(sets: &[PointSet]) -> Result<usize> {
    let first = sets.first().ok_or(Error::EmptyPointSet)?;
    let d = first.dim();
    for s in sets {
        if s.is_empty() {
            return Err(Error::EmptyPointSet);
        }
        if s.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: s.dim(),
            });
        }
    }
    if sets.len() > d {
        return Err(Error::TooManySets { k: sets.len(), d });
    }
    Ok(d)
}

/// Builds the projection chain and returns the reduced sets.
pub fn align_centroids(sets: &[PointSet]) -> Result<(ProjectionChain, Vec<PointSet>)> {
    let d = check_sets(sets)?;
    let centroids: Vec<Point> = sets.iter().map(centroid).collect::<Result<_>>()?;
    let origin = centroids[0].clone();
    let mut chain = ProjectionChain {
        origin,
        axes: Vec::new(),
        axis_norms: Vec::new(),
        fallback: Vec::new(),
    };
    let scale = centroids
        .iter()
        .map(|c| crate::geom::dist(c, &chain.origin))
        .chain(sets.iter().map(|s| crate::geom::diameter_upper(s).unwrap_or(0.0)))
        .fold(0.0, f64::max);
    for c in &centroids[1..] {
        let v = chain.reduce(c);
        let len = norm(&v);
        if len > DEGENERATE_DIRECTION_EPS * scale && len > 0.0 {
            chain.axes.push(Point::from_vec_unchecked(v.iter().map(|x| x / len).collect()));
            chain.axis_norms.push(len);
            chain.fallback.push(false);
        } else {
            chain.axes.push(fallback_axis(&chain, d));
            chain.axis_norms.push(0.0);
            chain.fallback.push(true);
        }
    }
    let reduced = sets.iter().map(|s| chain.reduce_set(s)).collect();
    Ok((chain, reduced))
}

/// The canonical basis vector with the longest residual after projecting out
/// the current axes (first one on ties), normalized.
fn fallback_axis(chain: &ProjectionChain, d: usize) -> Point {
    let mut best: Option<Point> = None;
    let mut best_len = 0.0;
    for t in 0..d {
        let mut e = vec![0.0; d];
        e[t] = 1.0;
        let r = chain.project(&e);
        let len = norm(&r);
        if len > best_len + 1e-12 {
            best_len = len;
            best = Some(r);
        }
    }
    let r = best.expect("fewer axes than dimensions");
    Point::from_vec_unchecked(r.iter().map(|x| x / best_len).collect())
}

/// Depth ball around the origin for sets whose centroids are (nearly) the
/// origin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointBall {
    pub radius: f64,
    pub radius_achieved: f64,
    /// `⌈|P_i| / m_i⌉`
    pub depth_lower_bounds: Vec<usize>,
    /// Per set: `2R_i + (L_i / |P_i|) · diam_i`, with `R_i` the partition's
    /// guaranteed radius and `L_i` its number of leftover points.
    pub set_radii: Vec<f64>,
    pub per_set: Vec<TverbergCertificate>,
}

/// Splits every set into `⌈|P_i| / m_i⌉` nearly balanced parts.
///
/// The witnesses of a set lie within `R_i` of the first witness and their
/// mean is the centroid of the core, which is within `(L_i/|P_i|)·diam_i`
/// of the set centroid (the origin). So all witnesses lie within
/// `2R_i + (L_i/|P_i|)·diam_i` of the origin.
pub fn joint_depth_ball(sets: &[PointSet], m: &[usize], diameter: &DiameterPolicy) -> Result<JointBall> {
    if m.len() != sets.len() {
        return Err(Error::InvalidSizes(format!(
            "{} depth parameters for {} sets",
            m.len(),
            sets.len()
        )));
    }
    let options = PartitionOptions {
        diameter: *diameter,
        ..Default::default()
    };
    let mut out = JointBall {
        radius: 0.0,
        radius_achieved: 0.0,
        depth_lower_bounds: Vec::new(),
        set_radii: Vec::new(),
        per_set: Vec::new(),
    };
    for (i, (set, &mi)) in sets.iter().zip(m).enumerate() {
        let len = set.len();
        if mi < 2 || mi > len {
            return Err(Error::DepthParameterOutOfRange { set: i, m: mi, len });
        }
        let parts = len.div_ceil(mi);
        let cert = partition_nearly_balanced(set, parts, &options)?;
        let leftover = len % parts;
        let r = 2.0 * cert.radius_guaranteed
            + leftover as f64 / len as f64 * cert.diameter.value;
        let achieved = cert.witnesses.iter().map(|w| w.norm()).fold(0.0, f64::max);
        out.radius = out.radius.max(r);
        out.radius_achieved = out.radius_achieved.max(achieved);
        out.depth_lower_bounds.push(parts);
        out.set_radii.push(r);
        out.per_set.push(cert);
    }
    Ok(out)
}

/// `B × ℓ_{k−1} × … × ℓ_1`: points whose reduction lands in the ball.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductSet {
    /// Ball in original coordinates; its center is the chain origin.
    pub ball: Ball,
    pub chain: ProjectionChain,
}

impl ProductSet {
    pub fn new(chain: ProjectionChain, radius: f64) -> Result<Self> {
        Ok(ProductSet {
            ball: Ball::new(chain.origin.clone(), radius)?,
            chain,
        })
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.chain.reduce(x).norm() <= self.ball.radius + tol
    }

    /// Orthonormal basis of the line factor.
    pub fn line_basis(&self) -> &[Point] {
        &self.chain.axes
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DepthCertificate {
    pub product: ProductSet,
    pub subspace_dim: usize,
    pub m: Vec<usize>,
    pub depth_lower_bounds: Vec<usize>,
    pub radius_achieved: f64,
    pub set_radii: Vec<f64>,
    /// `max_i (2 + 2√2) · diam(P_i) / √m_i`, the radius of the existential
    /// statement; not achieved by this construction.
    pub existential_radius: f64,
    /// Partitions of the reduced sets; witnesses are in reduced coordinates.
    pub per_set: Vec<TverbergCertificate>,
}

impl DepthCertificate {
    pub fn chain(&self) -> &ProjectionChain {
        &self.product.chain
    }

    pub fn ball(&self) -> &Ball {
        &self.product.ball
    }
}

pub fn generalized_ham_sandwich(
    sets: &[PointSet],
    m: &[usize],
    diameter: &DiameterPolicy,
) -> Result<DepthCertificate> {
    let (chain, reduced) = align_centroids(sets)?;
    let joint = joint_depth_ball(&reduced, m, diameter)?;
    let mut existential = 0.0f64;
    for (s, &mi) in sets.iter().zip(m) {
        let diam = diameter.measure(s)?.value;
        existential = existential.max((2.0 + 2.0 * 2.0f64.sqrt()) * diam / (mi as f64).sqrt());
    }
    let subspace_dim = chain.subspace_dim();
    Ok(DepthCertificate {
        product: ProductSet::new(chain, joint.radius)?,
        subspace_dim,
        m: m.to_vec(),
        depth_lower_bounds: joint.depth_lower_bounds,
        radius_achieved: joint.radius_achieved,
        set_radii: joint.set_radii,
        existential_radius: existential,
        per_set: joint.per_set,
    })
}
