//! Property tests over random recurrence systems, tables and weights.

use std::f64::consts::PI;

use bimoment::bimoment::{delta, extract_recurrence, monic_bops, RecurrenceSystem};
use bimoment::contour::{build_contours, Shape};
use bimoment::favard::{favard_reconstruct, favard_verify};
use bimoment::poly::CPoly;
use bimoment::semiclassical::{propagate_moments, recurrence_residual, validate_spec};
use bimoment::weight::{build_weight, sectors_at, Anchor};
use num_complex::Complex64 as C64;
use proptest::prelude::*;

type P = CPoly<f64>;

fn polar(r: f64, t: f64) -> C64 {
    C64::from_polar(r, t)
}

prop_compose! {
    fn system(len: usize)(
        g in prop::collection::vec((0.5..1.5f64, -PI..PI), 2 * len + 2),
        ab in prop::collection::vec((0.0..0.5f64, -PI..PI), len * (len + 1)),
    ) -> RecurrenceSystem<f64> {
        let mut r = RecurrenceSystem::<f64>::shift(len);
        for n in 0..len {
            r.gamma[n] = polar(g[2 * n].0, g[2 * n].1);
            r.gamma_t[n] = polar(g[2 * n + 1].0, g[2 * n + 1].1);
        }
        r.pi0 = polar(g[2 * len].0, g[2 * len].1);
        r.sigma0 = polar(g[2 * len + 1].0, g[2 * len + 1].1);
        let mut k = 0;
        for n in 0..len {
            for j in 0..=n {
                r.a[n][j] = polar(ab[k].0, ab[k].1);
                r.b[n][j] = polar(ab[k + 1].0, ab[k + 1].1);
                k += 2;
            }
        }
        r
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn favard_round_trip(r in system(6)) {
        let t = favard_reconstruct(&r, 6).unwrap();
        prop_assert!(favard_verify(&r, &t).unwrap() < 1e-9);
        let back = extract_recurrence(&t, &monic_bops(&t, 6).unwrap()).unwrap();
        prop_assert!(back.max_abs_diff(&r.canonical().unwrap()) < 1e-8);
        let mut prod = C64::new(1.0, 0.0) / (r.pi0 * r.sigma0);
        for n in 1..=7 {
            if n >= 2 {
                prod *= r.gamma[n - 2] * r.gamma_t[n - 2];
            }
            prop_assert!((delta(&t, n).unwrap() - prod).norm() <= 1e-8 * prod.norm());
        }
    }

    #[test]
    fn minors_scale_with_the_table(r in system(4), s in 0.2..3.0f64, t in -PI..PI) {
        let table = favard_reconstruct(&r, 4).unwrap();
        let k = polar(s, t);
        let scaled = table.scaled(k);
        for n in 0..=5 {
            let want = delta(&table, n).unwrap() * k.powu(n as u32);
            prop_assert!((delta(&scaled, n).unwrap() - want).norm() <= 1e-10 * want.norm().max(1e-300));
        }
    }

    #[test]
    fn recurrences_are_homogeneous(lam in 0.1..5.0f64, phase in -PI..PI, seed in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 9)) {
        let x3 = P::from_f64(&[0.0, 0.0, 0.0, 1.0]);
        let spec = validate_spec(&x3, &P::one(), &x3, &P::one()).unwrap();
        let l = polar(lam, phase);
        let scaled = validate_spec(&x3.scale(l), &P::one().scale(l), &x3, &P::one()).unwrap();
        let block: Vec<Vec<C64>> = (0..3).map(|n| (0..3).map(|m| C64::new(seed[3 * n + m].0, seed[3 * n + m].1)).collect()).collect();
        let a = propagate_moments(&spec, &block, 6).unwrap();
        let b = propagate_moments(&scaled, &block, 6).unwrap();
        let scale = a.max_abs();
        for (x, y) in a.entries().iter().zip(b.entries()) {
            prop_assert!((x - y).norm() <= 1e-10 * scale);
        }
        prop_assert!(recurrence_residual(&scaled, &a) < 1e-10);
    }

    #[test]
    fn contour_count_is_the_class(
        lead in (0.3..2.0f64, -PI..PI),
        extra in 0usize..3,
        roots in prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), 0..3),
        lam in -0.9..0.9f64,
    ) {
        let b = roots.iter().fold(P::one(), |acc, &(re, im)| &acc * &P::linear(C64::new(re, im)));
        let deg_b = roots.len();
        // A = lead x^{deg B + 1 + extra} + lam x^{deg B}: a generic potential with a polynomial part of degree >= 2
        let mut coeffs = vec![C64::new(0.0, 0.0); deg_b + 2 + extra];
        coeffs[deg_b + 1 + extra] = polar(lead.0, lead.1);
        coeffs[deg_b] += C64::new(lam, 0.3);
        let a = P::new(coeffs);
        let w = match build_weight(&a, &b) {
            Ok(w) => w,
            Err(_) => return Ok(()),
        };
        let cs = build_contours(&w).unwrap();
        prop_assert_eq!(cs.len(), w.class);
        let sectors = sectors_at(&w, Anchor::Infinity, 0.05).unwrap();
        for con in &cs {
            for p in &con.pieces {
                if let Shape::Ray { angle, sector: Some(k), .. } = p.shape {
                    prop_assert!(sectors[k].contains(angle));
                    // decay certificate: Re V+ increases along the ray far out
                    let r0 = 10.0 + p.point(0.0).norm();
                    let f = |r: f64| w.vplus.eval(p.point(r)).re;
                    prop_assert!(f(2.0 * r0) > f(r0));
                }
            }
        }
    }
}
