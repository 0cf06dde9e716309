//! Quadrature results checked against closed forms and independent evaluations.

mod common;

use std::f64::consts::PI;

use bimoment::bimoment::{extract_recurrence, monic_bops};
use bimoment::contour::build_contours;
use bimoment::poly::CPoly;
use bimoment::quadrature::{laplace, laplace_moments, laplace_moments_with, FunctionalHandle, QuadOptions};
use bimoment::sdc::trace_sdc;
use bimoment::semiclassical::{validate_spec, SemiclassicalSpec};
use bimoment::weight::{build_weight, normalize_potential, WeightSpec};
use common::airy_ai;
use num_complex::Complex64 as C64;

type P = CPoly<f64>;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn airy_weight() -> WeightSpec {
    build_weight(&P::from_f64(&[0.0, 0.0, 1.0]), &P::one()).unwrap()
}

fn gaussian() -> SemiclassicalSpec<f64> {
    let a = P::from_f64(&[0.0, 2.0]);
    validate_spec(&a, &P::one(), &a, &P::one()).unwrap()
}

fn quartic() -> SemiclassicalSpec<f64> {
    let a = P::from_f64(&[0.0, 0.0, 0.0, 1.0]);
    validate_spec(&a, &P::one(), &a, &P::one()).unwrap()
}

#[test]
fn airy_loop_matches_series() {
    let w = airy_weight();
    let g = build_contours(&w).unwrap();
    for z in [c(0.0, 0.0), c(0.5, 0.0), c(-1.0, 0.5), c(1.2, -0.7)] {
        let v = laplace(&g[1], &w, z, 0).unwrap();
        let want = c(0.0, 2.0 * PI) * airy_ai(z);
        assert!((v - want).norm() <= 1e-10 * want.norm(), "z = {z}: {v} vs {want}");
    }
}

#[test]
fn airy_derivative_from_first_moment() {
    // d/dz int e^{-x^3/3 + xz} = int x e^{...}, and Ai'(0) = -1 / (3^{1/3} Gamma(1/3))
    let w = airy_weight();
    let g = build_contours(&w).unwrap();
    let v = laplace(&g[1], &w, c(0.0, 0.0), 1).unwrap();
    let want = c(0.0, 2.0 * PI) * (-1.0 / (3f64.powf(1.0 / 3.0) * common::gamma(1.0 / 3.0)));
    assert!((v - want).norm() <= 1e-10 * want.norm());
}

#[test]
fn steepest_descent_path_reproduces_loop_integral() {
    let w = airy_weight();
    let g = build_contours(&w).unwrap();
    let z = C64::from_polar(25.0, -0.01);
    let sdc = laplace(&trace_sdc(&w, z, 0).unwrap(), &w, z, 0).unwrap();
    // the path through x ~ 5 comes in from the sector at 4 pi / 3 and leaves along the positive axis
    let loops = laplace(&g[0], &w, z, 0).unwrap() + laplace(&g[1], &w, z, 0).unwrap();
    assert!((sdc - loops).norm() <= 1e-8 * loops.norm(), "{sdc} vs {loops}");
}

#[test]
fn gaussian_generating_function() {
    let h = FunctionalHandle::new(&gaussian(), 0, 0).unwrap();
    let mu00 = 2.0 * PI / 3f64.sqrt();
    // completing the square with Q^{-1} = [[2, 1], [1, 2]] / 3
    for (z, w) in [(c(1.0, 0.0), c(0.0, 0.0)), (c(0.3, -0.2), c(-0.5, 0.1))] {
        let want = mu00 * ((z * z + z * w + w * w) / 3.0).exp();
        let got = h.generating_eval(z, w).unwrap();
        assert!((got - want).norm() <= 1e-10 * want.norm());
    }
    let t = h.bimoment_table(1).unwrap();
    assert!((h.generating_eval(c(0.0, 0.0), c(0.0, 0.0)).unwrap() - t.get(0, 0)).norm() < 1e-12);
    let e = 1e-3;
    let f = |z: f64, w: f64| h.generating_eval(c(z, 0.0), c(w, 0.0)).unwrap();
    let mixed = (f(e, e) - f(e, -e) - f(-e, e) + f(-e, -e)) / (4.0 * e * e);
    assert!((mixed - t.get(1, 1)).norm() <= 1e-5 * t.get(1, 1).norm());
}

#[test]
fn gaussian_parity_and_band() {
    let h = FunctionalHandle::new(&gaussian(), 0, 0).unwrap();
    let t = h.bimoment_table(4).unwrap();
    for n in 0..=4 {
        for m in 0..=4 {
            if (n + m) % 2 == 1 {
                assert!(t.get(n, m).norm() <= 1e-12 * t.get(0, 0).norm());
            }
        }
    }
    let bops = monic_bops(&t, 4).unwrap();
    let res = bops.biorthogonality_residual(&t).unwrap();
    assert!(res < 1e-8);
    let rec = extract_recurrence(&t, &bops).unwrap();
    for row in rec.a.iter().chain(rec.b.iter()) {
        for v in row.iter().skip(2) {
            assert!(v.norm() < 1e-8);
        }
    }
}

#[test]
fn taylor_sum_matches_generating_function() {
    let h = FunctionalHandle::new(&quartic(), 1, 2).unwrap();
    let n = 12;
    let t = h.bimoment_table(n).unwrap();
    let fact: Vec<f64> = (0..=n).scan(1.0, |f, k| {
        let v = *f;
        *f *= (k + 1) as f64;
        Some(v)
    }).collect();
    for (z, w) in [(c(0.5, 0.0), c(-0.3, 0.2)), (c(0.0, -0.5), c(0.4, 0.0))] {
        let mut sum = c(0.0, 0.0);
        for a in 0..=n {
            for b in 0..=n {
                sum += t.get(a, b) * z.powu(a as u32) * w.powu(b as u32) / (fact[a] * fact[b]);
            }
        }
        let f = h.generating_eval(z, w).unwrap();
        assert!((f - sum).norm() <= 1e-6 * f.norm(), "{f} vs {sum}");
    }
}

#[test]
fn normalization_change_of_variable() {
    let w = build_weight(&P::from_f64(&[0.0, 0.0, 2.0]), &P::one()).unwrap();
    let (nw, map) = normalize_potential(&w);
    let g = build_contours(&w).unwrap();
    let ng = build_contours(&nw).unwrap();
    let orig = laplace_moments(&g[1], &w, c(0.0, 0.0), 3).unwrap();
    let norm = laplace_moments(&ng[1], &nw, c(0.0, 0.0), 3).unwrap();
    // the second moment vanishes on these loops, so compare against the largest moment
    let back: Vec<C64> = (0..=3).map(|k| map.to_original(k, norm.value[k])).collect();
    assert!(common::scaled_gap(&back, &orig.value) <= 1e-10);
}

#[test]
fn tighter_tolerance_stays_within_error_estimate() {
    let w = build_weight(&P::from_f64(&[-1.7, 0.0, 0.0, 0.0, 1.0]), &P::from_f64(&[0.0, 1.0])).unwrap();
    let g = build_contours(&w).unwrap();
    let loose = QuadOptions { rel: 1e-8, max_panels: 1 << 14 };
    let tight = QuadOptions { rel: 1e-14, max_panels: 1 << 14 };
    for con in &g {
        let a = laplace_moments_with(con, &w, c(0.3, 0.1), 4, &loose).unwrap();
        let b = laplace_moments_with(con, &w, c(0.3, 0.1), 4, &tight).unwrap();
        for k in 0..=4 {
            assert!((a.value[k] - b.value[k]).norm() <= a.error[k] + b.error[k] + 1e-15);
        }
    }
}
