//! Points, point sets, balls and the handful of vector operations the
//! partitioners share.
//!
//! A [`PointSet`] stores its coordinates in one flat row-major buffer; the
//! index of a point in that buffer is the identity used by every partition
//! and certificate in this crate.

use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Point sets with at most this many points get an exact O(n²d) diameter.
pub const DEFAULT_EXACT_DIAMETER_LIMIT: usize = 4096;

/// Relative tolerance below which a projection direction counts as zero.
pub const DEGENERATE_DIRECTION_EPS: f64 = 1e-12;

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    norm_sq(a).sqrt()
}

#[inline]
pub fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[inline]
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    dist_sq(a, b).sqrt()
}

/// `y += alpha * x`
#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// A point in ℝ^d with finite coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::ZeroDimension);
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite { index: 0 });
        }
        Ok(Point(coords))
    }

    pub fn zeros(dim: usize) -> Self {
        Point(vec![0.0; dim])
    }

    /// Wraps coordinates without validation; callers guarantee finiteness.
    pub(crate) fn from_vec_unchecked(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }
}

impl Deref for Point {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl AsRef<[f64]> for Point {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Ordered list of points of a common dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
}

impl PointSet {
    /// Builds a set from a flat row-major coordinate buffer.
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: coords.len() % dim,
            });
        }
        if let Some(pos) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite { index: pos / dim });
        }
        Ok(PointSet { dim, coords })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.first().map(|r| r.as_ref().len()).ok_or(Error::EmptyPointSet)?;
        let mut coords = Vec::with_capacity(dim * rows.len());
        for row in rows {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            coords.extend_from_slice(row);
        }
        PointSet::new(dim, coords)
    }

    pub fn empty(dim: usize) -> Result<Self> {
        PointSet::new(dim, Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// The points at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> PointSet {
        let mut coords = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            coords.extend_from_slice(self.point(i));
        }
        PointSet {
            dim: self.dim,
            coords,
        }
    }

    /// The first `count` points.
    pub fn prefix(&self, count: usize) -> PointSet {
        PointSet {
            dim: self.dim,
            coords: self.coords[..count * self.dim].to_vec(),
        }
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.iter().map(<[f64]>::to_vec).collect()
    }
}

/// Summation strategy for centroids.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Summation {
    /// Plain left-to-right accumulation in input order.
    #[default]
    Plain,
    /// Kahan–Babuška (Neumaier) compensated accumulation.
    Compensated,
}

pub fn centroid(set: &PointSet) -> Result<Point> {
    centroid_with(set, Summation::Plain)
}

pub fn centroid_with(set: &PointSet, mode: Summation) -> Result<Point> {
    if set.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let d = set.dim();
    let mut sum = vec![0.0; d];
    match mode {
        Summation::Plain => {
            for p in set.iter() {
                axpy(1.0, p, &mut sum);
            }
        }
        Summation::Compensated => {
            let mut comp = vec![0.0; d];
            for p in set.iter() {
                for j in 0..d {
                    let t = sum[j] + p[j];
                    if sum[j].abs() >= p[j].abs() {
                        comp[j] += (sum[j] - t) + p[j];
                    } else {
                        comp[j] += (p[j] - t) + sum[j];
                    }
                    sum[j] = t;
                }
            }
            for (s, c) in sum.iter_mut().zip(&comp) {
                *s += c;
            }
        }
    }
    let inv = 1.0 / set.len() as f64;
    sum.iter_mut().for_each(|s| *s *= inv);
    Ok(Point(sum))
}

/// Largest pairwise Euclidean distance, O(n²d).
pub fn diameter_exact(set: &PointSet) -> Result<f64> {
    if set.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let mut best = 0.0f64;
    for i in 0..set.len() {
        let p = set.point(i);
        for j in i + 1..set.len() {
            best = best.max(dist_sq(p, set.point(j)));
        }
    }
    Ok(best.sqrt())
}

/// `2 · max_p ‖p − c(S)‖`, which lies in `[diam(S), 2·diam(S)]`.
pub fn diameter_upper(set: &PointSet) -> Result<f64> {
    let c = centroid(set)?;
    let far = set.iter().map(|p| dist_sq(p, &c)).fold(0.0f64, f64::max);
    Ok(2.0 * far.sqrt())
}

/// A diameter value together with whether it is exact or an upper bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diameter {
    pub value: f64,
    pub exact: bool,
}

/// Exact diameter for small sets, certified upper bound above the limit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DiameterPolicy {
    pub exact_limit: usize,
}

impl Default for DiameterPolicy {
    fn default() -> Self {
        DiameterPolicy {
            exact_limit: DEFAULT_EXACT_DIAMETER_LIMIT,
        }
    }
}

impl DiameterPolicy {
    pub fn measure(&self, set: &PointSet) -> Result<Diameter> {
        if set.len() <= self.exact_limit {
            Ok(Diameter {
                value: diameter_exact(set)?,
                exact: true,
            })
        } else {
            Ok(Diameter {
                value: diameter_upper(set)?,
                exact: false,
            })
        }
    }
}

pub fn translate(set: &PointSet, shift: &[f64]) -> Result<PointSet> {
    if shift.len() != set.dim() {
        return Err(Error::DimensionMismatch {
            expected: set.dim(),
            found: shift.len(),
        });
    }
    let mut coords = set.coords.clone();
    for chunk in coords.chunks_exact_mut(set.dim) {
        for (c, s) in chunk.iter_mut().zip(shift) {
            *c += s;
        }
    }
    Ok(PointSet {
        dim: set.dim,
        coords,
    })
}

/// Projects `p` onto the hyperplane through the origin with normal `v`:
/// `p − ⟨p,v⟩/‖v‖² · v`.
pub fn project_orthogonal(p: &[f64], v: &[f64]) -> Result<Point> {
    let tol = DEGENERATE_DIRECTION_EPS * norm(p);
    project_orthogonal_with_tol(p, v, tol)
}

/// As [`project_orthogonal`], failing when `‖v‖ ≤ tol` (or `v = 0`).
pub fn project_orthogonal_with_tol(p: &[f64], v: &[f64], tol: f64) -> Result<Point> {
    if p.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            found: v.len(),
        });
    }
    let vv = norm_sq(v);
    let vn = vv.sqrt();
    if vv == 0.0 || vn <= tol {
        return Err(Error::DegenerateDirection { norm: vn });
    }
    let scale = dot(p, v) / vv;
    let mut out = p.to_vec();
    axpy(-scale, v, &mut out);
    Ok(Point(out))
}

/// Closed Euclidean ball.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !radius.is_finite() || radius < 0.0 {
            return Err(Error::NonFinite { index: 0 });
        }
        Ok(Ball { center, radius })
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        dist(&self.center, x) <= self.radius + tol
    }
}

/// A line through the origin, stored by its unit direction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineThroughOrigin {
    direction: Point,
}

impl LineThroughOrigin {
    /// Normalizes `v`; fails on a zero vector.
    pub fn through(v: &[f64]) -> Result<Self> {
        let n = norm(v);
        if n == 0.0 || !n.is_finite() {
            return Err(Error::DegenerateDirection { norm: n });
        }
        Ok(LineThroughOrigin {
            direction: Point(v.iter().map(|x| x / n).collect()),
        })
    }

    pub fn direction(&self) -> &Point {
        &self.direction
    }
}
