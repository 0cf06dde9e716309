//! Independent reference values shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

/// Lanczos approximation (g = 7, 9 terms) of the Gamma function for real `x > 0`.
pub fn gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    let x = x - 1.0;
    let mut a = COEF[0];
    let t = x + G + 0.5;
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
}

/// Airy function from its Maclaurin series.
pub fn airy_ai(z: C64) -> C64 {
    let c1 = 1.0 / (3f64.powf(2.0 / 3.0) * gamma(2.0 / 3.0));
    let c2 = 1.0 / (3f64.powf(1.0 / 3.0) * gamma(1.0 / 3.0));
    let z3 = z * z * z;
    // f = sum z^{3k} / (2*3)(5*6)...((3k-1)(3k)), g = sum z^{3k+1} / (3*4)(6*7)...((3k)(3k+1))
    let (mut f, mut g) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
    let (mut tf, mut tg) = (C64::new(1.0, 0.0), z);
    for k in 1..200 {
        f += tf;
        g += tg;
        let k = k as f64;
        tf = tf * z3 / ((3.0 * k - 1.0) * (3.0 * k));
        tg = tg * z3 / ((3.0 * k) * (3.0 * k + 1.0));
        if tf.norm() < 1e-18 * f.norm() && tg.norm() < 1e-18 * (g.norm() + 1e-300) {
            break;
        }
    }
    f * c1 - g * c2
}

/// Raw moments `E[Y^k]`, `k = 0..=n`, of a normal variable with mean `mu` and variance `var`.
pub fn normal_moments(mu: f64, var: f64, n: usize) -> Vec<f64> {
    let mut m = vec![1.0; n + 1];
    if n >= 1 {
        m[1] = mu;
    }
    for k in 1..n {
        m[k + 1] = mu * m[k] + var * k as f64 * m[k - 1];
    }
    m
}

/// Largest entrywise gap between two square arrays, relative to the largest entry of `want`.
pub fn scaled_gap(got: &[C64], want: &[C64]) -> f64 {
    let scale = want.iter().map(|v| v.norm()).fold(0.0, f64::max);
    got.iter().zip(want).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / scale
}
