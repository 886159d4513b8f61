//! Planar drawings: points as small ellipses colored by part, part
//! witnesses as squares, and the certificate ball as the single circle.

use std::fmt::Write;

use tverberg_core::colorful::{ColorInstance, ColorfulCertificate};
use tverberg_core::geom::Ball;
use tverberg_core::tverberg::TverbergCertificate;
use tverberg_core::{Error, PointSet};

pub const PALETTE: [&str; 12] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf", "#393b79", "#ad494a",
];

const PANEL: f64 = 480.0;
const MARGIN: f64 = 0.1;

struct Frame {
    min: [f64; 2],
    scale: f64,
    offset_x: f64,
}

impl Frame {
    fn fit<'a>(points: impl Iterator<Item = &'a [f64]>, offset_x: f64) -> Frame {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in points {
            for t in 0..2 {
                lo[t] = lo[t].min(p[t]);
                hi[t] = hi[t].max(p[t]);
            }
        }
        let span = (hi[0] - lo[0]).max(hi[1] - lo[1]);
        let span = if span > 0.0 { span } else { 1.0 };
        let pad = MARGIN * span;
        let cx = 0.5 * (lo[0] + hi[0]);
        let cy = 0.5 * (lo[1] + hi[1]);
        let half = 0.5 * span + pad;
        Frame {
            min: [cx - half, cy - half],
            scale: PANEL / (2.0 * half),
            offset_x,
        }
    }

    fn x(&self, v: f64) -> f64 {
        self.offset_x + (v - self.min[0]) * self.scale
    }

    fn y(&self, v: f64) -> f64 {
        PANEL - (v - self.min[1]) * self.scale
    }
}

fn header(width: f64) -> String {
    format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{width:.0}\" height=\"{PANEL:.0}\" viewBox=\"0 0 {width:.0} {PANEL:.0}\">\n"
    )
}

fn point(out: &mut String, f: &Frame, p: &[f64], color: &str) {
    let _ = writeln!(
        out,
        "<ellipse class=\"point\" cx=\"{:.3}\" cy=\"{:.3}\" rx=\"3\" ry=\"3\" fill=\"{color}\"/>",
        f.x(p[0]),
        f.y(p[1])
    );
}

fn square(out: &mut String, f: &Frame, p: &[f64], color: &str) {
    let _ = writeln!(
        out,
        "<rect class=\"centroid\" x=\"{:.3}\" y=\"{:.3}\" width=\"8\" height=\"8\" fill=\"{color}\" stroke=\"black\"/>",
        f.x(p[0]) - 4.0,
        f.y(p[1]) - 4.0
    );
}

fn circle(out: &mut String, f: &Frame, ball: &Ball) {
    let _ = writeln!(
        out,
        "<circle class=\"ball\" cx=\"{:.3}\" cy=\"{:.3}\" r=\"{:.3}\" fill=\"none\" stroke=\"black\"/>",
        f.x(ball.center[0]),
        f.y(ball.center[1]),
        ball.radius * f.scale
    );
}

fn planar(dim: usize) -> Result<(), Error> {
    if dim == 2 {
        Ok(())
    } else {
        Err(Error::NotPlanar(dim))
    }
}

pub fn render_tverberg(set: &PointSet, cert: &TverbergCertificate) -> Result<String, Error> {
    planar(set.dim())?;
    let frame = Frame::fit(set.iter(), 0.0);
    let mut out = header(PANEL);
    for (i, part) in cert.parts.iter().enumerate() {
        for &a in part {
            point(&mut out, &frame, set.point(a), PALETTE[i % PALETTE.len()]);
        }
    }
    circle(&mut out, &frame, &cert.ball);
    for (i, w) in cert.witnesses.iter().enumerate() {
        square(&mut out, &frame, w, PALETTE[i % PALETTE.len()]);
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Left panel: points colored by class. Right panel: colored by colorful
/// set, with set centroids and the ball.
pub fn render_colorful(inst: &ColorInstance, cert: &ColorfulCertificate) -> Result<String, Error> {
    planar(inst.dim())?;
    let all = || inst.classes().iter().flat_map(|c| c.iter());
    let left = Frame::fit(all(), 0.0);
    let right = Frame::fit(all(), PANEL);
    let mut out = header(2.0 * PANEL);
    for (a, class) in inst.classes().iter().enumerate() {
        for p in class.iter() {
            point(&mut out, &left, p, PALETTE[a % PALETTE.len()]);
        }
    }
    let _ = writeln!(
        out,
        "<line class=\"divider\" x1=\"{PANEL:.0}\" y1=\"0\" x2=\"{PANEL:.0}\" y2=\"{PANEL:.0}\" stroke=\"#cccccc\"/>"
    );
    for (l, set) in cert.colorful_sets.iter().enumerate() {
        for &(a, i) in set {
            point(&mut out, &right, inst.classes()[a].point(i), PALETTE[l % PALETTE.len()]);
        }
    }
    circle(&mut out, &right, &cert.ball);
    for (l, c) in cert.centroids.iter().enumerate() {
        square(&mut out, &right, c, PALETTE[l % PALETTE.len()]);
    }
    out.push_str("</svg>\n");
    Ok(out)
}
