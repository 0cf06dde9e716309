//! Integration contours for a weight: loops and rays attached to its finite
//! singularities, loops joining consecutive sectors at infinity, and
//! polylines traced elsewhere (steepest descent).
//!
//! Every piece carries the logarithms `log(x - X_j)` at a reference point so
//! that algebraic factors `(x - X_j)^lambda` are continued along the contour
//! instead of being evaluated on a fixed principal branch.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::Result;
use crate::serde_complex::Pair;
use crate::weight::{sectors_at, Anchor, Sector, WeightSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContourKind {
    /// Loop from infinity around a branch point or pole.
    #[serde(rename = "loop_1a")]
    Loop1a,
    /// Path from a finite point to infinity.
    #[serde(rename = "ray_1b")]
    Ray1b,
    /// Loop at an essential singularity joining two of its sectors.
    #[serde(rename = "essential_loop_2")]
    EssentialLoop2,
    /// Loop joining two consecutive sectors at infinity.
    #[serde(rename = "infinity_loop_3")]
    InfinityLoop3,
    Sdc,
}

/// Geometry of one piece.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Shape {
    Segment { a: C64, b: C64 },
    /// Counter-clockwise when `to > from`.
    Arc { center: C64, radius: f64, from: f64, to: f64 },
    /// `origin + t e^{i angle}`, `t >= 0`; traversed towards the origin when `inward`.
    Ray { origin: C64, angle: f64, inward: bool, sector: Option<usize> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Piece {
    pub shape: Shape,
    ref_point: C64,
    ref_logs: Vec<C64>,
}

impl Piece {
    /// Point at parameter `t` (`[0, 1]` for bounded pieces, `[0, inf)` for rays
    /// measured from the origin).
    pub fn point(&self, t: f64) -> C64 {
        match self.shape {
            Shape::Segment { a, b } => a + (b - a) * t,
            Shape::Arc { center, radius, from, to } => center + C64::from_polar(radius, from + (to - from) * t),
            Shape::Ray { origin, angle, .. } => origin + C64::from_polar(t, angle),
        }
    }

    /// `dx/dt` at `t`.
    pub fn tangent(&self, t: f64) -> C64 {
        match self.shape {
            Shape::Segment { a, b } => b - a,
            Shape::Arc { radius, from, to, .. } => {
                let th = from + (to - from) * t;
                C64::new(0.0, to - from) * C64::from_polar(radius, th)
            }
            Shape::Ray { angle, .. } => C64::from_polar(1.0, angle),
        }
    }

    /// `-1` for inward rays (the parameter runs against the traversal), else `1`.
    pub fn orientation(&self) -> f64 {
        match self.shape {
            Shape::Ray { inward: true, .. } => -1.0,
            _ => 1.0,
        }
    }

    pub fn is_ray(&self) -> bool {
        matches!(self.shape, Shape::Ray { .. })
    }

    /// `log(x - X_j)` continued from the reference point along the piece.
    pub fn logs_at(&self, x: C64, sing: &[C64]) -> Vec<C64> {
        sing.iter()
            .zip(&self.ref_logs)
            .map(|(&s, &l)| l + ((x - s) / (self.ref_point - s)).ln())
            .collect()
    }
}

/// A contour: ordered pieces plus bookkeeping.
#[derive(Clone, Debug, PartialEq)]
pub struct Contour {
    pub kind: ContourKind,
    pub pieces: Vec<Piece>,
    /// Finite singularity the contour is attached to.
    pub anchor: Option<usize>,
    /// Closed (on the sphere) around a singularity or around infinity.
    pub p_flag: bool,
}

impl Contour {
    pub fn is_bounded(&self) -> bool {
        !self.pieces.iter().any(Piece::is_ray)
    }

    /// Directions of the rays (in traversal order).
    pub fn ray_angles(&self) -> Vec<f64> {
        self.pieces
            .iter()
            .filter_map(|p| match p.shape {
                Shape::Ray { angle, .. } => Some(angle),
                _ => None,
            })
            .collect()
    }

    /// Polyline through the contour with rays cut at radius `far` from their origin.
    pub fn polyline(&self, far: f64) -> Vec<C64> {
        let mut pts: Vec<C64> = Vec::new();
        let push = |z: C64, pts: &mut Vec<C64>| {
            if pts.last().is_none_or(|l| (*l - z).norm() > 1e-14) {
                pts.push(z);
            }
        };
        for p in &self.pieces {
            match p.shape {
                Shape::Segment { a, b } => {
                    push(a, &mut pts);
                    push(b, &mut pts);
                }
                Shape::Arc { .. } => {
                    for i in 0..=8 {
                        push(p.point(i as f64 / 8.0), &mut pts);
                    }
                }
                Shape::Ray { origin, angle, inward, .. } => {
                    let tip = origin + C64::from_polar(far, angle);
                    if inward {
                        push(tip, &mut pts);
                        push(origin, &mut pts);
                    } else {
                        push(origin, &mut pts);
                        push(tip, &mut pts);
                    }
                }
            }
        }
        pts
    }
}

/// Accumulates pieces while continuing the logarithms from piece to piece.
pub(crate) struct Builder {
    sing: Vec<C64>,
    pieces: Vec<Piece>,
    at: Option<C64>,
    logs: Vec<Option<C64>>,
}

impl Builder {
    pub(crate) fn new(sing: Vec<C64>) -> Self {
        let n = sing.len();
        Self { sing, pieces: Vec::new(), at: None, logs: vec![None; n] }
    }

    fn push(&mut self, shape: Shape, ref_point: C64, end: Option<C64>) {
        let ref_logs: Vec<C64> = self
            .sing
            .iter()
            .enumerate()
            .map(|(j, &s)| match (self.at, self.logs[j]) {
                (Some(at), Some(l)) => l + ((ref_point - s) / (at - s)).ln(),
                _ => (ref_point - s).ln(),
            })
            .collect();
        let piece = Piece { shape, ref_point, ref_logs };
        if let Some(e) = end {
            let logs = piece.logs_at(e, &self.sing);
            self.logs = self
                .sing
                .iter()
                .zip(logs)
                .map(|(&s, l)| if (e - s).norm() < 1e-14 { None } else { Some(l) })
                .collect();
        }
        self.at = end;
        self.pieces.push(piece);
    }

    pub(crate) fn segment(&mut self, a: C64, b: C64) {
        if (b - a).norm() < 1e-15 {
            return;
        }
        self.push(Shape::Segment { a, b }, (a + b) * 0.5, Some(b));
    }

    /// Arc around `center`, split so no piece sweeps more than 45 degrees.
    pub(crate) fn arc(&mut self, center: C64, radius: f64, from: f64, to: f64) {
        let n = ((to - from).abs() / (PI / 4.0)).ceil().max(1.0) as usize;
        for i in 0..n {
            let t0 = from + (to - from) * i as f64 / n as f64;
            let t1 = from + (to - from) * (i + 1) as f64 / n as f64;
            let start = center + C64::from_polar(radius, t0);
            self.push(Shape::Arc { center, radius, from: t0, to: t1 }, start, Some(center + C64::from_polar(radius, t1)));
        }
    }

    /// Ray from infinity in direction `angle` ending at `origin`.
    pub(crate) fn ray_in(&mut self, origin: C64, angle: f64, sector: Option<usize>) {
        self.at = None;
        let reference = origin + C64::from_polar(1.0, angle);
        self.push(Shape::Ray { origin, angle, inward: true, sector }, reference, Some(origin));
    }

    /// Ray from `origin` to infinity in direction `angle`.
    pub(crate) fn ray_out(&mut self, origin: C64, angle: f64, sector: Option<usize>) {
        let reference = origin + C64::from_polar(1.0, angle);
        self.push(Shape::Ray { origin, angle, inward: false, sector }, reference, None);
    }

    pub(crate) fn finish(self, kind: ContourKind, anchor: Option<usize>, p_flag: bool) -> Contour {
        Contour { kind, pieces: self.pieces, anchor, p_flag }
    }
}

/// Distance from `p` to the segment `[a, b]`.
fn seg_dist(p: C64, a: C64, b: C64) -> f64 {
    let ab = b - a;
    let t = if ab.norm_sqr() == 0.0 { 0.0 } else { ((p - a) * ab.conj()).re / ab.norm_sqr() };
    (p - (a + ab * t.clamp(0.0, 1.0))).norm()
}

/// Per-weight layout shared by all contours.
#[derive(Clone, Debug)]
pub struct Layout {
    /// Unwrapped centres of the `d + 1` sectors at infinity.
    pub centers: Vec<f64>,
    pub infinity_sectors: Vec<Sector>,
    /// Radius of the disk containing every finite singularity (0 if none).
    pub hub_radius: f64,
    /// Exit angle of the ray attached to each finite singularity.
    pub exit_angles: Vec<f64>,
}

fn layout(spec: &WeightSpec, eps: f64) -> Result<Layout> {
    let infinity_sectors = sectors_at(spec, Anchor::Infinity, eps)?;
    let n = spec.d + 1;
    let phase = spec.leading().arg();
    let centers: Vec<f64> = (0..n).map(|k| (2.0 * PI * k as f64 - phase) / n as f64).collect();
    let xs: Vec<C64> = spec.singularities.iter().map(|s| s.x).collect();
    let hub_radius = if xs.is_empty() {
        0.0
    } else {
        xs.iter().map(|x| x.norm()).fold(0.0, f64::max) + 1.0 + essential_radius_bound(spec)
    };
    let hw = infinity_sectors[0].half_width;
    let mut exit_angles: Vec<f64> = Vec::new();
    for (j, &x) in xs.iter().enumerate() {
        let mut best: Option<(f64, f64)> = None;
        for i in 0..=32 {
            let delta = -0.8 * hw + 1.6 * hw * i as f64 / 32.0;
            let beta = centers[0] - delta;
            if exit_angles.iter().any(|&b| (b - beta).abs() < 1e-3) {
                continue;
            }
            let e = C64::from_polar(hub_radius, beta);
            let clearance = xs
                .iter()
                .enumerate()
                .filter(|&(l, _)| l != j)
                .map(|(_, &y)| seg_dist(y, x, e))
                .fold(f64::INFINITY, f64::min);
            let score = clearance.min(1.0) - 1e-3 * delta.abs();
            if best.is_none_or(|(s, _)| score > s) {
                best = Some((score, beta));
            }
        }
        exit_angles.push(best.map(|b| b.1).unwrap_or(centers[0]));
    }
    Ok(Layout { centers, infinity_sectors, hub_radius, exit_angles })
}

fn nearest_other(xs: &[C64], j: usize) -> f64 {
    xs.iter()
        .enumerate()
        .filter(|&(l, _)| l != j)
        .map(|(_, &y)| (y - xs[j]).norm())
        .fold(f64::INFINITY, f64::min)
}

fn essential_radius(spec: &WeightSpec, j: usize) -> f64 {
    let xs: Vec<C64> = spec.singularities.iter().map(|s| s.x).collect();
    let s = &spec.singularities[j];
    let natural = s.essential[s.g - 1].norm().powf(1.0 / s.g as f64).max(0.05);
    natural.min(0.4 * nearest_other(&xs, j)).min(1.0)
}

fn essential_radius_bound(spec: &WeightSpec) -> f64 {
    (0..spec.singularities.len())
        .filter(|&j| spec.singularities[j].g > 0)
        .map(|j| essential_radius(spec, j))
        .fold(0.0, f64::max)
}

/// The sector layout used by [`build_contours`].
pub fn contour_layout(spec: &WeightSpec) -> Result<Layout> {
    layout(spec, Tolerances::default().sector_margin)
}

/// The `s` contours of a weight.
///
/// Order: the `d` infinity loops (loop `k` comes in from sector `k + 1` and
/// leaves through sector `k`), then, per finite singularity, a loop (1a) or
/// a ray (1b), or for an essential singularity its `g` loops followed by a
/// connector to infinity. All one-sided contours leave through sector 0.
pub fn build_contours(spec: &WeightSpec) -> Result<Vec<Contour>> {
    build_contours_with(spec, Tolerances::default().sector_margin)
}

pub fn build_contours_with(spec: &WeightSpec, eps: f64) -> Result<Vec<Contour>> {
    let lay = layout(spec, eps)?;
    let xs: Vec<C64> = spec.singularities.iter().map(|s| s.x).collect();
    let r = lay.hub_radius;
    let mut out = Vec::with_capacity(spec.class);
    for k in 0..spec.d {
        let (phi_in, phi_out) = (lay.centers[k + 1], lay.centers[k]);
        let mut b = Builder::new(xs.clone());
        b.ray_in(C64::from_polar(r, phi_in), phi_in, Some(k + 1));
        if r > 0.0 {
            b.arc(C64::new(0.0, 0.0), r, phi_in, phi_out);
        }
        b.ray_out(C64::from_polar(r, phi_out), phi_out, Some(k));
        out.push(b.finish(ContourKind::InfinityLoop3, None, true));
    }
    for (j, s) in spec.singularities.iter().enumerate() {
        let beta = lay.exit_angles[j];
        let e = C64::from_polar(r, beta);
        if s.g == 0 {
            let mut b = Builder::new(xs.clone());
            if s.lambda_is_natural() {
                b.segment(s.x, e);
                b.ray_out(e, beta, Some(0));
                out.push(b.finish(ContourKind::Ray1b, Some(j), false));
            } else {
                let rho = 1e-2 * nearest_other(&xs, j).min(1.0);
                let dir = (e - s.x) / (e - s.x).norm();
                let p = s.x + dir * rho;
                let a0 = dir.arg();
                b.ray_in(e, beta, Some(0));
                b.segment(e, p);
                b.arc(s.x, rho, a0, a0 + 2.0 * PI);
                b.segment(p, e);
                b.ray_out(e, beta, Some(0));
                out.push(b.finish(ContourKind::Loop1a, Some(j), true));
            }
        } else {
            let g = s.g;
            let re = essential_radius(spec, j);
            let phase = s.essential[g - 1].arg();
            let theta = |k: usize| (2.0 * PI * k as f64 + phase) / g as f64;
            for k in 0..g {
                let mut b = Builder::new(xs.clone());
                let (t_out, t_back) = (theta(k + 1), theta(k));
                b.segment(s.x, s.x + C64::from_polar(re, t_out));
                b.arc(s.x, re, t_out, t_back);
                b.segment(s.x + C64::from_polar(re, t_back), s.x);
                out.push(b.finish(ContourKind::EssentialLoop2, Some(j), true));
            }
            let mut b = Builder::new(xs.clone());
            let q = s.x + C64::from_polar(re, theta(0));
            b.segment(s.x, q);
            b.segment(q, e);
            b.ray_out(e, beta, Some(0));
            out.push(b.finish(ContourKind::Ray1b, Some(j), false));
        }
    }
    Ok(out)
}

/// Sector metadata in the contour dump.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SectorWire {
    pub anchor: String,
    pub k: usize,
    pub center: f64,
    pub half_width: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RayWire {
    pub angle: f64,
    pub sector: Option<usize>,
}

/// One contour in the plotting dump.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ContourWire {
    pub kind: ContourKind,
    pub points: Vec<Pair>,
    pub p_flag: bool,
    pub anchor: Option<usize>,
    pub rays: Vec<RayWire>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ContourDump {
    pub sectors: Vec<SectorWire>,
    pub contours: Vec<ContourWire>,
}

/// JSON-ready dump of contours and the sectors at infinity.
pub fn contour_dump(spec: &WeightSpec, contours: &[Contour]) -> Result<ContourDump> {
    let lay = contour_layout(spec)?;
    let far = (2.0 * lay.hub_radius).max(6.0);
    let sectors = lay
        .infinity_sectors
        .iter()
        .map(|s| SectorWire { anchor: "infinity".into(), k: s.k, center: s.center, half_width: s.half_width })
        .collect();
    let contours = contours
        .iter()
        .map(|c| ContourWire {
            kind: c.kind,
            points: c.polyline(far).into_iter().map(Pair::from_c).collect(),
            p_flag: c.p_flag,
            anchor: c.anchor,
            rays: c
                .pieces
                .iter()
                .filter_map(|p| match p.shape {
                    Shape::Ray { angle, sector, .. } => Some(RayWire { angle, sector }),
                    _ => None,
                })
                .collect(),
        })
        .collect();
    Ok(ContourDump { sectors, contours })
}
