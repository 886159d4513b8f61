//! Independent re-derivation of every certificate invariant from the input
//! data. Only the geometric primitives and oracles of the core crate are
//! reused; partitions are never recomputed and trusted.

use tverberg_core::colorful::{colorful_radius_bound, ColorInstance, ColorfulCertificate, ShiftAssignment};
use tverberg_core::geom::{axpy, centroid, dist, dot, norm, DiameterPolicy, PointSet};
use tverberg_core::hamsandwich::{align_centroids, DepthCertificate};
use tverberg_core::lifting::LiftingGraph;
use tverberg_core::oracle::{ball_depth_2d, dist_to_hull, slab_depth};
use tverberg_core::tverberg::{
    traversal_bound_delta, traversal_bound_gamma, BoundFormula, Mode, SizeSpec, TverbergCertificate,
};

use crate::document::{Certificate, CertificateDocument, SCHEMA_VERSION};

/// Slack, relative to the relevant diameter, allowed in every comparison.
pub const RELATIVE_SLACK: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

#[derive(Default)]
struct Report {
    checks: Vec<Check>,
}

impl Report {
    fn flag(&mut self, name: &str, pass: bool, detail: impl Into<String>) -> bool {
        self.checks.push(Check {
            name: name.to_string(),
            pass,
            detail: detail.into(),
        });
        pass
    }

    /// `measured ≤ bound + slack`.
    fn at_most(&mut self, name: &str, measured: f64, bound: f64, slack: f64) -> bool {
        self.flag(
            name,
            measured <= bound + slack,
            format!("measured {measured:e} <= bound {bound:e}"),
        )
    }

    /// `|measured − stored| ≤ slack`.
    fn close(&mut self, name: &str, measured: f64, stored: f64, slack: f64) -> bool {
        self.flag(
            name,
            (measured - stored).abs() <= slack,
            format!("recomputed {measured:e}, stored {stored:e}"),
        )
    }
}

pub enum VerifyInput {
    Points(PointSet),
    Classes(ColorInstance),
    Sets(Vec<PointSet>),
}

#[derive(Default)]
pub struct VerifyOptions {
    pub oracle: bool,
    pub diameter: DiameterPolicy,
}

pub fn verify(doc: &CertificateDocument, input: &VerifyInput, options: &VerifyOptions) -> Vec<Check> {
    let mut r = Report::default();
    r.flag(
        "schema",
        doc.schema_version == SCHEMA_VERSION,
        format!("{} (expected {SCHEMA_VERSION})", doc.schema_version),
    );
    match (&doc.certificate, input) {
        (Certificate::Tverberg(c), VerifyInput::Points(p)) => verify_tverberg(&mut r, doc, c, p, options),
        (Certificate::Colorful(c), VerifyInput::Classes(inst)) => verify_colorful(&mut r, c, inst, options),
        (Certificate::HamSandwich(c), VerifyInput::Sets(sets)) => verify_ham_sandwich(&mut r, doc, c, sets, options),
        _ => {
            r.flag("input kind", false, "input does not match certificate kind");
        }
    }
    r.checks
}

fn mean_of(set: &PointSet, members: &[usize]) -> Vec<f64> {
    let mut c = vec![0.0; set.dim()];
    for &a in members {
        axpy(1.0 / members.len() as f64, set.point(a), &mut c);
    }
    c
}

/// Every index in `0..n` exactly once.
fn check_cover(r: &mut Report, name: &str, parts: &[Vec<usize>], n: usize) -> bool {
    let mut seen = vec![false; n];
    for part in parts {
        for &a in part {
            if a >= n {
                return r.flag(name, false, format!("index {a} out of range for {n} points"));
            }
            if seen[a] {
                return r.flag(name, false, format!("index {a} appears twice"));
            }
            seen[a] = true;
        }
    }
    let missing = seen.iter().filter(|&&s| !s).count();
    r.flag(name, missing == 0, format!("{n} points, {missing} unassigned"))
}

/// Checks a partition certificate against `set`. Returns false if the
/// structure is too broken to continue.
fn check_partition(r: &mut Report, c: &TverbergCertificate, set: &PointSet, prefix: &str) -> bool {
    let n = set.len();
    let k = c.parts.len();
    let name = |s: &str| format!("{prefix}{s}");
    let shapes_ok = c.sizes.len() == k && c.core_sizes.len() == k && c.witnesses.len() == k && k > 0;
    if !r.flag(
        &name("part count"),
        shapes_ok,
        format!("{k} parts, {} sizes, {} cores, {} witnesses", c.sizes.len(), c.core_sizes.len(), c.witnesses.len()),
    ) {
        return false;
    }
    let bad = c.parts.iter().zip(&c.sizes).position(|(p, &s)| p.len() != s);
    r.flag(
        &name("sizes"),
        bad.is_none() && c.sizes.iter().sum::<usize>() == n,
        match bad {
            Some(i) => format!("part {i} has {} points, size says {}", c.parts[i].len(), c.sizes[i]),
            None => format!("sizes {:?} sum to {n}", c.sizes),
        },
    );
    let mode_sizes = match c.mode {
        Mode::General => Ok(SizeSpec::new(c.sizes.clone())),
        Mode::Balanced => SizeSpec::balanced(n, k).map(Ok),
        Mode::NearlyBalanced => SizeSpec::nearly_balanced(n, k).map(Ok),
    };
    let expected_sizes = mode_sizes.and_then(|s| s).map(|s| s.as_slice().to_vec());
    r.flag(
        &name("sizes match mode"),
        expected_sizes.as_ref().is_ok_and(|s| *s == c.sizes),
        format!("{:?} mode", c.mode),
    );
    if !check_cover(r, &name("disjoint cover"), &c.parts, n) {
        return false;
    }
    let fits = c.core_sizes.iter().zip(&c.parts).all(|(&s, p)| s >= 1 && s <= p.len());
    let core_ok = fits
        && match c.mode {
            Mode::General | Mode::Balanced => c.core_sizes == c.sizes,
            Mode::NearlyBalanced => {
                let n0 = k * (n / k);
                c.parts.iter().zip(&c.core_sizes).enumerate().all(|(i, (p, &s))| {
                    let leftover: Vec<usize> = (n0 + i < n).then_some(n0 + i).into_iter().collect();
                    s == n / k && p[..s].iter().all(|&a| a < n0) && p[s..] == leftover[..]
                })
            }
        };
    r.flag(&name("core members"), core_ok, format!("core sizes {:?}", c.core_sizes));
    core_ok
}

fn verify_tverberg(
    r: &mut Report,
    doc: &CertificateDocument,
    c: &TverbergCertificate,
    set: &PointSet,
    options: &VerifyOptions,
) {
    if let Some(k) = doc.parameters.k {
        r.flag("k", k == c.parts.len(), format!("parameter {k}, certificate {}", c.parts.len()));
    }
    if let Some(sizes) = &doc.parameters.sizes {
        r.flag("requested sizes", *sizes == c.sizes, format!("{sizes:?}"));
    }
    if !check_partition(r, c, set, "") {
        return;
    }
    let n = set.len();
    let k = c.parts.len();
    let diameter = match options.diameter.measure(set) {
        Ok(d) => d,
        Err(e) => {
            r.flag("diameter", false, e.to_string());
            return;
        }
    };
    let diam = diameter.value;
    let slack = RELATIVE_SLACK * diam;
    r.flag(
        "diameter",
        diameter.exact == c.diameter.exact && (diameter.value - c.diameter.value).abs() <= 1e-12 * diam,
        format!("recomputed {:e} (exact: {}), stored {:e}", diam, diameter.exact, c.diameter.value),
    );

    let witnesses: Vec<Vec<f64>> =
        c.parts.iter().zip(&c.core_sizes).map(|(p, &s)| mean_of(set, &p[..s])).collect();
    let drift = witnesses
        .iter()
        .zip(&c.witnesses)
        .map(|(a, b)| if a.len() == b.dim() { dist(a, b) } else { f64::INFINITY })
        .fold(0.0, f64::max);
    r.at_most("witnesses are core centroids", drift, 0.0, slack);

    let center = match c.mode {
        Mode::General => centroid(set).map(|p| p.into_vec()).unwrap_or_default(),
        Mode::Balanced | Mode::NearlyBalanced => witnesses[0].clone(),
    };
    r.at_most("ball center", dist(&center, &c.ball.center), 0.0, slack);
    let achieved = witnesses.iter().map(|w| dist(w, &center)).fold(0.0, f64::max);
    r.close("radius achieved", achieved, c.radius_achieved, slack);
    r.at_most("ball covers witnesses", achieved, c.ball.radius, slack);

    let expected_formula = match (c.mode, c.arity) {
        (Mode::General, Some(4)) => Some(BoundFormula::GeneralLog4),
        (Mode::General, Some(a)) => LiftingGraph::balanced_ary(a, k)
            .ok()
            .map(|g| BoundFormula::GeneralAry { arity: a, height: g.height() }),
        (Mode::Balanced, None) => Some(BoundFormula::Balanced),
        (Mode::NearlyBalanced, None) => Some(BoundFormula::NearlyBalanced),
        _ => None,
    };
    if !r.flag(
        "bound formula",
        expected_formula == Some(c.bound),
        format!("{:?} for {:?} mode", c.bound, c.mode),
    ) {
        return;
    }
    let guaranteed = c.bound.radius(n, &c.sizes, diam);
    r.close("radius guaranteed", guaranteed, c.radius_guaranteed, 1e-12 * guaranteed.max(diam));
    r.at_most("radius achieved <= guaranteed", achieved, guaranteed, slack);

    // ‖c(T)‖ on the (core) instance, from centered part sums
    let (graph, core_n) = match c.mode {
        Mode::General => (LiftingGraph::balanced_ary(c.arity.unwrap_or(4), k), n),
        _ => (LiftingGraph::star(k), k * (n / k)),
    };
    let Ok(graph) = graph else {
        r.flag("traversal", false, "cannot rebuild lifting graph");
        return;
    };
    let core_members: Vec<usize> = c.parts.iter().zip(&c.core_sizes).flat_map(|(p, &s)| p[..s].to_vec()).collect();
    let core_center = mean_of(set, &core_members);
    let sums: Vec<Vec<f64>> = c
        .parts
        .iter()
        .zip(&c.core_sizes)
        .map(|(p, &s)| {
            let mut u = vec![0.0; set.dim()];
            for &a in &p[..s] {
                axpy(1.0, set.point(a), &mut u);
            }
            axpy(-(s as f64), &core_center, &mut u);
            u
        })
        .collect();
    let traversal = graph.quadratic_form(&sums).unwrap_or(f64::INFINITY).max(0.0).sqrt() / core_n as f64;
    r.close("traversal centroid norm", traversal, c.traversal_centroid_norm, slack);
    let core_diam = if core_n == n {
        diam
    } else {
        options.diameter.measure(&set.prefix(core_n)).map(|d| d.value).unwrap_or(diam)
    };
    let bound = match c.mode {
        Mode::General => traversal_bound_delta(n, graph.stats().max_degree, diam),
        _ => traversal_bound_gamma(core_n, k, k - 1, diam),
    };
    r.at_most("traversal bound", traversal, bound, slack);
    // the core of the nearly balanced case has its own, smaller diameter
    if core_n != n {
        let tight = traversal_bound_gamma(core_n, k, k - 1, core_diam);
        r.at_most("core traversal bound", traversal, tight, RELATIVE_SLACK * core_diam);
    }
    r.close("traversal bound value", bound, c.traversal_bound, 1e-12 * bound.max(diam));

    if options.oracle {
        let tol = 1e-7 * diam.max(1e-300);
        let worst = c
            .parts
            .iter()
            .zip(&c.witnesses)
            .map(|(p, w)| dist_to_hull(w, &set.select(p), tol).unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max);
        r.at_most("oracle: witnesses in part hulls", worst, 0.0, tol);
        if set.dim() == 2 && n <= 1000 {
            let depth = ball_depth_2d(&c.ball.center, c.ball.radius + slack, set).unwrap_or(0);
            r.flag("oracle: ball depth", depth >= k, format!("depth {depth} >= {k}"));
        }
    }
}

fn verify_colorful(r: &mut Report, c: &ColorfulCertificate, inst: &ColorInstance, options: &VerifyOptions) {
    let (n, k) = (inst.n(), inst.k());
    let shape = c.assignment.0.len() == n && c.assignment.0.iter().all(|&j| j < k);
    if !r.flag("assignment", shape, format!("{} shifts for {n} classes of {k}", c.assignment.0.len())) {
        return;
    }
    let sets_ok = c.colorful_sets == c.assignment.colorful_sets(k);
    r.flag("colorful sets follow shifts", sets_ok, format!("{k} sets"));
    let mut seen = vec![vec![false; k]; n];
    let mut colorful = c.colorful_sets.len() == k;
    for set in &c.colorful_sets {
        colorful &= set.len() == n;
        for (a, &(class, i)) in set.iter().enumerate() {
            if class != a || i >= k || seen[class][i] {
                colorful = false;
                break;
            }
            seen[class][i] = true;
        }
    }
    if !r.flag("one point per class", colorful, format!("{k} sets of {n}")) {
        return;
    }
    let mut max_diam = 0.0f64;
    for class in inst.classes() {
        max_diam = max_diam.max(options.diameter.measure(class).map(|d| d.value).unwrap_or(f64::INFINITY));
    }
    let slack = RELATIVE_SLACK * max_diam;
    r.close("max class diameter", max_diam, c.max_class_diameter, 1e-12 * max_diam);
    let centroids: Vec<Vec<f64>> = c
        .colorful_sets
        .iter()
        .map(|set| {
            let mut m = vec![0.0; inst.dim()];
            for &(a, i) in set {
                axpy(1.0 / n as f64, inst.classes()[a].point(i), &mut m);
            }
            m
        })
        .collect();
    let drift = centroids
        .iter()
        .zip(&c.centroids)
        .map(|(a, b)| if a.len() == b.dim() { dist(a, b) } else { f64::INFINITY })
        .fold(0.0, f64::max);
    r.at_most("centroids", drift, 0.0, slack);
    r.at_most("ball center", dist(&centroids[0], &c.ball.center), 0.0, slack);
    let achieved = centroids.iter().map(|m| dist(m, &centroids[0])).fold(0.0, f64::max);
    r.close("radius achieved", achieved, c.radius_achieved, slack);
    r.at_most("ball covers centroids", achieved, c.ball.radius, slack);
    let guaranteed = colorful_radius_bound(n, k, max_diam);
    r.close("radius guaranteed", guaranteed, c.radius_guaranteed, 1e-12 * guaranteed.max(max_diam));
    r.at_most("radius achieved <= guaranteed", achieved, guaranteed, slack);

    let d = inst.dim();
    let mut sums = vec![vec![0.0; d]; k];
    for (class, &j) in inst.classes().iter().zip(&c.assignment.0) {
        let Ok(m) = centroid(class) else { continue };
        for (l, s) in sums.iter_mut().enumerate() {
            axpy(1.0, class.point(ShiftAssignment::member(k, j, l)), s);
            axpy(-1.0, &m, s);
        }
    }
    let traversal = LiftingGraph::star(k)
        .and_then(|g| g.quadratic_form(&sums))
        .unwrap_or(f64::INFINITY)
        .max(0.0)
        .sqrt()
        / n as f64;
    r.close("traversal centroid norm", traversal, c.traversal_centroid_norm, slack);
    r.at_most("traversal bound", traversal, guaranteed, slack);

    if options.oracle && d == 2 && inst.total() <= 1000 {
        let all = PointSet::from_rows(
            &inst.classes().iter().flat_map(|s| s.to_rows()).collect::<Vec<_>>(),
        );
        if let Ok(all) = all {
            let depth = ball_depth_2d(&c.ball.center, c.ball.radius + slack, &all).unwrap_or(0);
            r.flag("oracle: ball depth", depth >= k, format!("depth {depth} >= {k}"));
        }
    }
}

fn verify_ham_sandwich(
    r: &mut Report,
    doc: &CertificateDocument,
    c: &DepthCertificate,
    sets: &[PointSet],
    options: &VerifyOptions,
) {
    let k = sets.len();
    let d = sets[0].dim();
    if !r.flag("set count", c.m.len() == k && c.per_set.len() == k && k <= d, format!("{k} sets in dimension {d}")) {
        return;
    }
    if let Some(m) = &doc.parameters.m {
        r.flag("requested m", *m == c.m, format!("{m:?}"));
    }
    let m_ok = c.m.iter().zip(sets).all(|(&m, s)| m >= 2 && m <= s.len());
    if !r.flag("m in range", m_ok, format!("{:?}", c.m)) {
        return;
    }
    let bounds: Vec<usize> = sets.iter().zip(&c.m).map(|(s, &m)| s.len().div_ceil(m)).collect();
    r.flag("depth lower bounds", bounds == c.depth_lower_bounds, format!("{bounds:?}"));

    let Ok((chain, reduced)) = align_centroids(sets) else {
        r.flag("projection chain", false, "cannot align input");
        return;
    };
    let stored = c.chain();
    let mut scale = 0.0f64;
    for s in sets {
        scale = scale.max(options.diameter.measure(s).map(|x| x.value).unwrap_or(0.0));
    }
    let slack = RELATIVE_SLACK * scale;
    r.at_most("chain origin", dist(&chain.origin, &stored.origin), 0.0, slack);
    let same_axes = chain.axes.len() == stored.axes.len()
        && chain.axes.iter().zip(&stored.axes).all(|(a, b)| dist(a, b) <= 1e-9);
    r.flag("chain axes", same_axes, format!("{} axes", stored.axes.len()));
    let mut orth = 0.0f64;
    for (i, a) in stored.axes.iter().enumerate() {
        orth = orth.max((norm(a) - 1.0).abs());
        for b in &stored.axes[..i] {
            orth = orth.max(dot(a, b).abs());
        }
    }
    r.at_most("axes orthonormal", orth, 0.0, 1e-9);
    r.flag(
        "subspace dimension",
        c.subspace_dim + k - 1 == d,
        format!("{} = {d} - {}", c.subspace_dim, k - 1),
    );
    let worst_centroid = reduced
        .iter()
        .map(|s| centroid(s).map(|p| p.norm()).unwrap_or(f64::INFINITY))
        .fold(0.0, f64::max);
    r.at_most("aligned centroids", worst_centroid, 0.0, slack);

    let mut radius = 0.0f64;
    let mut achieved = 0.0f64;
    for (i, (set, cert)) in reduced.iter().zip(&c.per_set).enumerate() {
        let prefix = format!("set {i}: ");
        r.flag(
            &format!("{prefix}requested parts"),
            cert.parts.len() == bounds[i] && cert.mode != Mode::General,
            format!("{} parts, expected {}", cert.parts.len(), bounds[i]),
        );
        if !check_partition(r, cert, set, &prefix) {
            return;
        }
        let Ok(diameter) = options.diameter.measure(set) else { return };
        let parts = cert.parts.len();
        let guaranteed = BoundFormula::NearlyBalanced.radius(set.len(), &cert.sizes, diameter.value);
        let leftover = set.len() % parts;
        let ri = 2.0 * guaranteed + leftover as f64 / set.len() as f64 * diameter.value;
        r.close(&format!("{prefix}radius"), ri, c.set_radii[i], 1e-12 * ri.max(scale));
        radius = radius.max(ri);
        for (p, &s) in cert.parts.iter().zip(&cert.core_sizes) {
            let w = mean_of(set, &p[..s]);
            achieved = achieved.max(norm(&w));
        }
        let witness_drift = cert
            .parts
            .iter()
            .zip(&cert.core_sizes)
            .zip(&cert.witnesses)
            .map(|((p, &s), w)| dist(&mean_of(set, &p[..s]), w))
            .fold(0.0, f64::max);
        r.at_most(&format!("{prefix}witnesses"), witness_drift, 0.0, slack);
    }
    r.close("ball radius", radius, c.ball().radius, 1e-12 * radius.max(scale));
    r.close("radius achieved", achieved, c.radius_achieved, slack);
    r.at_most("witnesses inside ball", achieved, c.ball().radius, slack);

    if options.oracle && d == 2 {
        for (i, (set, &bound)) in sets.iter().zip(&bounds).enumerate() {
            let depth = match k {
                1 => ball_depth_2d(&stored.origin, c.ball().radius + slack, set).unwrap_or(0),
                _ => {
                    let v = &stored.axes[0];
                    slab_depth(&stored.origin, &[-v[1], v[0]], c.ball().radius + slack, set)
                }
            };
            r.flag(&format!("oracle: set {i} depth"), depth >= bound, format!("depth {depth} >= {bound}"));
        }
    }
}
