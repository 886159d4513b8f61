//! Augmented search tree for the conditional-expectations greedy.
//!
//! Class `i` carries the lifting-graph quantities
//!
//! * `N_i = ‖q_i‖²` (its degree in the lifting graph),
//! * `r'_i`, the number of members it still has to receive,
//! * `R_i = 2(r'_i N_i − Σ_{j~i} r'_j)`,
//! * `u_i`, the sum of the points assigned so far, and
//! * `U_i = 2(N_i u_i − Σ_{j~i} u_j)`,
//!
//! where `j~i` ranges over lifting-graph neighbours. Per step the objective
//! of every class is `a·N_i + b·R_i + ⟨w, U_i⟩` for step coefficients
//! `(a, b, w)`. Each search-tree node also stores the `r'`-weighted sums of
//! `N`, `R` and `U` over its search subtree, so the weighted average of the
//! objective over any subtree costs O(d) and the descent only ever enters
//! subtrees that still have quota.
//!
//! The search tree and the lifting graph may differ (balanced partitions
//! lift with a star but search a ternary tree); quantities are always
//! updated along lifting-graph adjacency.

use crate::error::{Error, Result};
use crate::geom::{axpy, dot, norm_sq};
use crate::lifting::LiftingGraph;

/// Relative tolerance under which an objective counts as equal to an average.
pub const TIE_EPS: f64 = 1e-10;

/// Coefficients `(a, b, w)` of the per-step objective `a·N + b·R + ⟨w, U⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct StepCoefficients {
    pub degree: f64,
    pub quota: f64,
    pub direction: Vec<f64>,
}

impl StepCoefficients {
    /// `α_s N_i + β_s R_i + ⟨p_s, U_i⟩` with `α_s = ‖p_s‖²` and
    /// `β_s = ⟨p_s, c_{s−1}⟩`: the objective with every class-independent
    /// term dropped, where `c_{s−1}` is the centroid of the points not yet
    /// processed (zero when there are none).
    pub fn surrogate(point: &[f64], pending_centroid: &[f64]) -> Self {
        StepCoefficients {
            degree: norm_sq(point),
            quota: dot(point, pending_centroid),
            direction: point.to_vec(),
        }
    }

    /// Exact change of the conditional expectation `E‖Σ_a x_a‖²` when the
    /// current point is given class `i`, up to a class-independent constant.
    ///
    /// `pending_sum` and `pending_sq` are `Σ p_a` and `Σ ‖p_a‖²` over the
    /// `pending` points that are still unassigned after this one. Assigning
    /// class `i` also removes one unit of quota from the distribution of
    /// those points, which contributes the extra terms over
    /// [`StepCoefficients::surrogate`].
    pub fn exact(point: &[f64], pending_sum: &[f64], pending_sq: f64, pending: usize) -> Self {
        let alpha = norm_sq(point);
        if pending == 0 {
            return StepCoefficients {
                degree: alpha,
                quota: 0.0,
                direction: point.to_vec(),
            };
        }
        let m = pending as f64;
        let inv_m = 1.0 / m;
        let beta = dot(point, pending_sum) * inv_m;
        let mean_sq = pending_sq * inv_m;
        let cross = if pending >= 2 {
            (norm_sq(pending_sum) - pending_sq) / (m * (m - 1.0))
        } else {
            0.0
        };
        let mut direction = point.to_vec();
        axpy(-inv_m, pending_sum, &mut direction);
        StepCoefficients {
            degree: alpha - 2.0 * beta - mean_sq + 2.0 * cross,
            quota: beta - cross,
            direction,
        }
    }
}

/// `a·N + b·R + ⟨w, U⟩`.
#[inline]
pub fn step_objective(coef: &StepCoefficients, degree: f64, r_term: f64, u_term: &[f64]) -> f64 {
    coef.degree * degree + coef.quota * r_term + dot(&coef.direction, u_term)
}

#[derive(Clone, Debug)]
pub struct AugmentedTree<'g> {
    lifting: &'g LiftingGraph,
    search: &'g LiftingGraph,
    dim: usize,
    degree: Vec<f64>,
    remaining: Vec<usize>,
    r_term: Vec<f64>,
    part_sum: Vec<f64>,
    u_term: Vec<f64>,
    sub_weight: Vec<f64>,
    sub_degree: Vec<f64>,
    sub_r: Vec<f64>,
    sub_u: Vec<f64>,
    path_cost: usize,
    scratch: Vec<f64>,
}

impl<'g> AugmentedTree<'g> {
    pub fn new(
        lifting: &'g LiftingGraph,
        search: &'g LiftingGraph,
        sizes: &[usize],
        dim: usize,
    ) -> Result<Self> {
        let k = lifting.k();
        if search.k() != k || sizes.len() != k {
            return Err(Error::InvalidSizes(format!(
                "lifting graph has {k} nodes, search tree {}, sizes {}",
                search.k(),
                sizes.len()
            )));
        }
        if !search.is_tree() {
            return Err(Error::InvalidGraph("search structure must be a tree".into()));
        }
        let degree: Vec<f64> = (0..k).map(|i| lifting.degree(i) as f64).collect();
        let r_term = (0..k)
            .map(|i| {
                let nb: usize = lifting.neighbors(i).iter().map(|&j| sizes[j]).sum();
                2.0 * (sizes[i] as f64 * degree[i] - nb as f64)
            })
            .collect();
        let mut tree = AugmentedTree {
            lifting,
            search,
            dim,
            degree,
            remaining: sizes.to_vec(),
            r_term,
            part_sum: vec![0.0; k * dim],
            u_term: vec![0.0; k * dim],
            sub_weight: vec![0.0; k],
            sub_degree: vec![0.0; k],
            sub_r: vec![0.0; k],
            sub_u: vec![0.0; k * dim],
            path_cost: search.height() + 1,
            scratch: vec![0.0; dim],
        };
        tree.rebuild_aggregates();
        Ok(tree)
    }

    pub fn k(&self) -> usize {
        self.degree.len()
    }

    pub fn degree(&self, i: usize) -> f64 {
        self.degree[i]
    }

    pub fn remaining(&self, i: usize) -> usize {
        self.remaining[i]
    }

    pub fn r_term(&self, i: usize) -> f64 {
        self.r_term[i]
    }

    pub fn part_sum(&self, i: usize) -> &[f64] {
        &self.part_sum[i * self.dim..(i + 1) * self.dim]
    }

    pub fn u_term(&self, i: usize) -> &[f64] {
        &self.u_term[i * self.dim..(i + 1) * self.dim]
    }

    /// `(Σ r', Σ r'N, Σ r'R, Σ r'U)` over the search subtree of `i`.
    pub fn subtree_sums(&self, i: usize) -> (f64, f64, f64, &[f64]) {
        (
            self.sub_weight[i],
            self.sub_degree[i],
            self.sub_r[i],
            &self.sub_u[i * self.dim..(i + 1) * self.dim],
        )
    }

    pub fn objective(&self, i: usize, coef: &StepCoefficients) -> f64 {
        step_objective(coef, self.degree[i], self.r_term[i], self.u_term(i))
    }

    /// `r'`-weighted mean objective over the search subtree of `i`, or
    /// `None` when that subtree has no quota left.
    pub fn subtree_average(&self, i: usize, coef: &StepCoefficients) -> Option<f64> {
        let (w, n, r, u) = self.subtree_sums(i);
        (w > 0.0).then(|| (coef.degree * n + coef.quota * r + dot(&coef.direction, u)) / w)
    }

    /// Objective of class `i` and the magnitude of its terms.
    fn objective_scaled(&self, i: usize, coef: &StepCoefficients, w_norm: f64) -> (f64, f64) {
        let u = self.u_term(i);
        let value = step_objective(coef, self.degree[i], self.r_term[i], u);
        let scale = (coef.degree * self.degree[i]).abs()
            + (coef.quota * self.r_term[i]).abs()
            + w_norm * norm_sq(u).sqrt();
        (value, scale)
    }

    /// Weighted subtree average and the magnitude of its terms.
    fn average_scaled(&self, i: usize, coef: &StepCoefficients, w_norm: f64) -> Option<(f64, f64)> {
        let (w, n, r, u) = self.subtree_sums(i);
        if w <= 0.0 {
            return None;
        }
        let value = (coef.degree * n + coef.quota * r + dot(&coef.direction, u)) / w;
        let scale = ((coef.degree * n).abs() + (coef.quota * r).abs() + w_norm * norm_sq(u).sqrt()) / w;
        Some((value, scale))
    }

    /// Descends from the search root to a class with remaining quota whose
    /// objective is at most the `r'`-weighted average over all classes.
    ///
    /// At each node: take the node if it has quota and its objective does not
    /// exceed its subtree average; otherwise move to the first child (left to
    /// right) whose subtree average does not exceed the current one. Such a
    /// child exists whenever the node is rejected; if rounding hides it, the
    /// child with the smallest average is taken. Comparisons treat values
    /// within [`TIE_EPS`] of the term magnitudes as equal, so exact ties are
    /// resolved toward the earlier node regardless of rounding.
    pub fn select(&self, coef: &StepCoefficients) -> Result<usize> {
        let w_norm = norm_sq(&coef.direction).sqrt();
        let mut v = self.search.root();
        let (mut avg, mut avg_scale) = self
            .average_scaled(v, coef, w_norm)
            .ok_or(Error::QuotaExhausted)?;
        loop {
            if self.remaining[v] > 0 {
                let (f, scale) = self.objective_scaled(v, coef, w_norm);
                if f <= avg + TIE_EPS * scale.max(avg_scale) {
                    return Ok(v);
                }
            }
            let mut pick: Option<(usize, f64, f64)> = None;
            let mut fallback: Option<(usize, f64, f64)> = None;
            for &c in self.search.children(v) {
                if let Some((a, scale)) = self.average_scaled(c, coef, w_norm) {
                    if a <= avg + TIE_EPS * scale.max(avg_scale) {
                        pick = Some((c, a, scale));
                        break;
                    }
                    if fallback.is_none_or(|(_, b, _)| a < b) {
                        fallback = Some((c, a, scale));
                    }
                }
            }
            match pick.or(fallback) {
                Some((c, a, scale)) => {
                    v = c;
                    avg = a;
                    avg_scale = scale;
                }
                // Only `v` itself carries weight here, so its objective equals
                // the average up to rounding.
                None => return Ok(v),
            }
        }
    }

    /// Reference rule: the uniform average `A_s` of the objective over all
    /// `k` classes; returns the first class in search order with quota left
    /// and objective at most `A_s`, else the feasible minimum (ties to the
    /// lowest index). O(kd) per call.
    pub fn select_uniform(&self, coef: &StepCoefficients) -> Result<usize> {
        let w_norm = norm_sq(&coef.direction).sqrt();
        let scored: Vec<(f64, f64)> = (0..self.k())
            .map(|i| self.objective_scaled(i, coef, w_norm))
            .collect();
        let k = self.k() as f64;
        let avg = scored.iter().map(|x| x.0).sum::<f64>() / k;
        let avg_scale = scored.iter().map(|x| x.1).sum::<f64>() / k;
        let feasible = |i: &usize| self.remaining[*i] > 0;
        if let Some(&i) = self
            .search
            .bfs_order()
            .iter()
            .filter(|i| feasible(i))
            .find(|&&i| scored[i].0 <= avg + TIE_EPS * scored[i].1.max(avg_scale))
        {
            return Ok(i);
        }
        (0..self.k())
            .filter(feasible)
            .min_by(|&a, &b| scored[a].0.total_cmp(&scored[b].0).then(a.cmp(&b)))
            .ok_or(Error::QuotaExhausted)
    }

    /// Gives `point` to class `i` and updates `r'`, `R`, `u`, `U` of `i` and
    /// its lifting-graph neighbours, then the subtree sums above them.
    pub fn assign(&mut self, i: usize, point: &[f64]) -> Result<()> {
        if i >= self.k() {
            return Err(Error::NodeOutOfRange { index: i, k: self.k() });
        }
        if self.remaining[i] == 0 {
            return Err(Error::QuotaExhausted);
        }
        if point.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: point.len(),
            });
        }
        let d = self.dim;
        let lifting = self.lifting;
        let n_i = self.degree[i];
        let heavy = (lifting.degree(i) + 1) * self.path_cost > self.k();

        if heavy {
            self.apply_local(i, point);
            self.rebuild_aggregates();
            return Ok(());
        }

        let mut delta = std::mem::take(&mut self.scratch);
        let r = self.remaining[i] as f64;
        let old_r = self.r_term[i];
        // ΔU·r' for class i: (r'−1)(U + 2Np) − r'U = −U + 2N(r'−1)p
        delta.copy_from_slice(&self.u_term[i * d..(i + 1) * d]);
        delta.iter_mut().for_each(|x| *x = -*x);
        axpy(2.0 * n_i * (r - 1.0), point, &mut delta);
        let d_r = (r - 1.0) * (old_r - 2.0 * n_i) - r * old_r;
        self.propagate(i, -1.0, -n_i, d_r, &delta);

        for &j in lifting.neighbors(i) {
            let rj = self.remaining[j] as f64;
            if rj == 0.0 {
                continue;
            }
            delta.iter_mut().zip(point).for_each(|(x, p)| *x = -2.0 * rj * p);
            self.propagate(j, 0.0, 0.0, 2.0 * rj, &delta);
        }
        self.scratch = delta;
        self.apply_local(i, point);
        Ok(())
    }

    fn apply_local(&mut self, i: usize, point: &[f64]) {
        let d = self.dim;
        let n_i = self.degree[i];
        self.remaining[i] -= 1;
        self.r_term[i] -= 2.0 * n_i;
        axpy(1.0, point, &mut self.part_sum[i * d..(i + 1) * d]);
        axpy(2.0 * n_i, point, &mut self.u_term[i * d..(i + 1) * d]);
        for &j in self.lifting.neighbors(i) {
            self.r_term[j] += 2.0;
            axpy(-2.0, point, &mut self.u_term[j * d..(j + 1) * d]);
        }
    }

    fn propagate(&mut self, from: usize, dw: f64, dn: f64, dr: f64, du: &[f64]) {
        let d = self.dim;
        let mut v = Some(from);
        while let Some(x) = v {
            self.sub_weight[x] += dw;
            self.sub_degree[x] += dn;
            self.sub_r[x] += dr;
            axpy(1.0, du, &mut self.sub_u[x * d..(x + 1) * d]);
            v = self.search.parent(x);
        }
    }

    /// Recomputes every subtree sum bottom-up in O(kd).
    pub fn rebuild_aggregates(&mut self) {
        let d = self.dim;
        for i in 0..self.k() {
            let w = self.remaining[i] as f64;
            self.sub_weight[i] = w;
            self.sub_degree[i] = w * self.degree[i];
            self.sub_r[i] = w * self.r_term[i];
            for t in 0..d {
                self.sub_u[i * d + t] = w * self.u_term[i * d + t];
            }
        }
        for &v in self.search.bfs_order().iter().rev() {
            if let Some(p) = self.search.parent(v) {
                self.sub_weight[p] += self.sub_weight[v];
                self.sub_degree[p] += self.sub_degree[v];
                self.sub_r[p] += self.sub_r[v];
                let (lo, hi) = self.sub_u.split_at_mut(v * d);
                axpy(1.0, &hi[..d], &mut lo[p * d..(p + 1) * d]);
            }
        }
    }

    /// Largest relative deviation between the maintained `R`, `U` and subtree
    /// sums and their values recomputed from `r'` and `u`.
    pub fn from_scratch_drift(&self) -> f64 {
        let d = self.dim;
        let k = self.k();
        let mut fresh = self.clone();
        for i in 0..k {
            let nb: usize = self.lifting.neighbors(i).iter().map(|&j| self.remaining[j]).sum();
            fresh.r_term[i] = 2.0 * (self.remaining[i] as f64 * self.degree[i] - nb as f64);
            for t in 0..d {
                let nb_sum: f64 = self
                    .lifting
                    .neighbors(i)
                    .iter()
                    .map(|&j| self.part_sum[j * d + t])
                    .sum();
                fresh.u_term[i * d + t] = 2.0 * (self.degree[i] * self.part_sum[i * d + t] - nb_sum);
            }
        }
        fresh.rebuild_aggregates();
        let rel = |a: &[f64], b: &[f64]| {
            let scale = a.iter().chain(b).fold(1.0f64, |m, x| m.max(x.abs()));
            a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())) / scale
        };
        [
            rel(&self.r_term, &fresh.r_term),
            rel(&self.u_term, &fresh.u_term),
            rel(&self.sub_weight, &fresh.sub_weight),
            rel(&self.sub_degree, &fresh.sub_degree),
            rel(&self.sub_r, &fresh.sub_r),
            rel(&self.sub_u, &fresh.sub_u),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}
