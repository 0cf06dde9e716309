//! Steepest-descent contours of `phi(x) = V+(x) - xz` through its saddles.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::contour::{Builder, Contour, ContourKind};
use crate::error::{Error, Result};
use crate::weight::{wrap_angle, WeightSpec};

/// Angular margin around the Stokes lines `arg z = pi k / (d + 1)`.
pub const STOKES_MARGIN: f64 = 1e-3;

/// Stop tracing once `Re phi` exceeds its saddle value by this much.
const ESCAPE: f64 = 50.0;

/// A saddle of `phi` with its critical value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Saddle {
    pub x: C64,
    pub value: C64,
    /// `phi''(x)`.
    pub curvature: C64,
}

fn phi(spec: &WeightSpec, z: C64, x: C64) -> C64 {
    spec.vplus.eval(x) - x * z
}

/// Distance of `arg z` from the nearest Stokes line.
pub fn stokes_distance(d: usize, z: C64) -> f64 {
    let step = PI / (d + 1) as f64;
    let a = z.arg();
    let r = wrap_angle(a - step * (a / step).round());
    r.abs()
}

/// The `d` saddles `phi'(x) = 0`, the `k`-th refined from `z^{1/d} omega^k`.
pub fn saddles(spec: &WeightSpec, z: C64) -> Vec<Saddle> {
    let d = spec.d;
    let dv = spec.vplus.derivative();
    let ddv = dv.derivative();
    let scale = spec.leading() * (d + 1) as f64;
    let root = (z / scale).powf(1.0 / d as f64);
    (0..d)
        .map(|k| {
            let mut x = root * C64::from_polar(1.0, 2.0 * PI * k as f64 / d as f64);
            for _ in 0..60 {
                let f = dv.eval(x) - z;
                let fp = ddv.eval(x);
                if fp.norm() == 0.0 {
                    break;
                }
                let dx = f / fp;
                x -= dx;
                if dx.norm() <= 1e-15 * (1.0 + x.norm()) {
                    break;
                }
            }
            Saddle { x, value: phi(spec, z, x), curvature: ddv.eval(x) }
        })
        .collect()
}

/// One branch from the saddle, leaving in direction `dir`.
fn branch(spec: &WeightSpec, z: C64, s: &Saddle, dir: C64) -> Result<Vec<C64>> {
    let dv = spec.vplus.derivative();
    let target = s.value.im;
    let width = 1.0 / s.curvature.norm().sqrt();
    let mut x = s.x + dir * (0.25 * width);
    let correct = |mut x: C64| {
        for _ in 0..8 {
            let g = dv.eval(x) - z;
            let c = phi(spec, z, x).im - target;
            if c.abs() <= 1e-14 * (1.0 + s.value.norm()) || g.norm() == 0.0 {
                break;
            }
            x += C64::new(0.0, -c) * g.conj() / g.norm_sqr();
        }
        x
    };
    x = correct(x);
    let mut pts = vec![x];
    for _ in 0..20_000 {
        if phi(spec, z, x).re - s.value.re > ESCAPE {
            return Ok(pts);
        }
        let g = dv.eval(x) - z;
        if g.norm() == 0.0 {
            return Err(Error::SaddleCollision);
        }
        let h = 0.25 * width + 0.1 * (x - s.x).norm();
        let mut next = correct(x + g.conj() / g.norm() * h);
        // halve the step if the corrector wandered
        let mut tries = 0;
        while (next - x).norm() > 2.0 * h && tries < 20 {
            next = correct(x + g.conj() / g.norm() * (h * 0.5f64.powi(tries + 1)));
            tries += 1;
        }
        x = next;
        pts.push(x);
    }
    Err(Error::Invalid("steepest-descent path did not escape".into()))
}

/// The steepest-descent contour through saddle `k` of `V+(x) - xz`,
/// as a polyline truncated where the integrand has dropped by `e^{-50}`.
/// Oriented so that it leaves the saddle along `+1 / sqrt(phi'')`, with the
/// square root closest to `sqrt(d) z^{(d-1)/(2d)} e^{i pi k / d}`.
pub fn trace_sdc(spec: &WeightSpec, z: C64, k: usize) -> Result<Contour> {
    let d = spec.d;
    if k >= d {
        return Err(Error::OutOfRange { index: k, limit: d });
    }
    let dist = stokes_distance(d, z);
    if dist < STOKES_MARGIN {
        return Err(Error::StokesProximity(dist));
    }
    let all = saddles(spec, z);
    let s = all[k];
    for (l, o) in all.iter().enumerate() {
        if l != k && ((o.value.im - s.value.im).abs() <= 1e-10 * (1.0 + s.value.norm()) || (o.x - s.x).norm() <= 1e-10) {
            return Err(Error::SaddleCollision);
        }
    }
    let reference = (d as f64).sqrt() * z.powf((d as f64 - 1.0) / (2.0 * d as f64)) * C64::from_polar(1.0, PI * k as f64 / d as f64);
    let mut sq = s.curvature.sqrt();
    if (-sq - reference).norm() < (sq - reference).norm() {
        sq = -sq;
    }
    let dir = sq.inv() / sq.inv().norm();
    let back = branch(spec, z, &s, -dir)?;
    let fwd = branch(spec, z, &s, dir)?;
    let pts: Vec<C64> = back.into_iter().rev().chain(std::iter::once(s.x)).chain(fwd).collect();
    let mut b = Builder::new(spec.singularities.iter().map(|s| s.x).collect());
    for w in pts.windows(2) {
        b.segment(w[0], w[1]);
    }
    Ok(b.finish(ContourKind::Sdc, None, true))
}

/// Vertices of a polyline contour.
pub fn vertices(c: &Contour) -> Vec<C64> {
    c.polyline(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::CPoly;
    use crate::weight::build_weight;

    fn airy() -> WeightSpec {
        build_weight(&CPoly::from_f64(&[0.0, 0.0, 1.0]), &CPoly::one()).unwrap()
    }

    #[test]
    fn phase_is_constant_along_path() {
        let w = airy();
        let z = C64::from_polar(25.0, -0.01);
        let c = trace_sdc(&w, z, 0).unwrap();
        let s = saddles(&w, z)[0];
        assert!((s.x - C64::new(5.0, 0.0)).norm() < 0.1);
        for x in vertices(&c) {
            let dev = (phi(&w, z, x).im - s.value.im).abs();
            assert!(dev <= 1e-6 * (1.0 + s.value.norm()), "{dev}");
        }
    }

    #[test]
    fn gaussian_path_is_horizontal() {
        let w = build_weight(&CPoly::from_f64(&[0.0, 1.0]), &CPoly::one()).unwrap();
        let z = C64::from_polar(1.5, 0.2);
        let pts = vertices(&trace_sdc(&w, z, 0).unwrap());
        assert!(pts.len() > 10);
        assert!(pts.first().unwrap().re < z.re && pts.last().unwrap().re > z.re);
        for p in pts {
            assert!((p.im - z.im).abs() < 1e-9);
        }
    }

    #[test]
    fn stokes_line_is_rejected() {
        let w = airy();
        let r = trace_sdc(&w, C64::from_polar(10.0, PI / 3.0 + 1e-4), 0);
        assert!(matches!(r, Err(Error::StokesProximity(_))));
    }
}
