//! Marginal weights `W = exp(-V)` with `V' = (A + B')/B`, and the sectors in
//! which they decay.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::poly::{partial_fractions_with_roots, CPoly};

type P = CPoly<f64>;

/// A root `X` of `B`: `W ~ (x - X)^lambda * exp(-sum_q e_q / (x - X)^q)` near `X`.
#[derive(Clone, Debug, PartialEq)]
pub struct Singularity {
    pub x: C64,
    /// Order of the essential part (`multiplicity - 1`).
    pub g: usize,
    pub lambda: C64,
    /// `essential[q - 1] = e_q`, the coefficient of `1/(x - X)^q` in `V`.
    pub essential: Vec<C64>,
}

impl Singularity {
    /// `lambda` is a nonnegative integer, so the weight is regular at `X` when `g = 0`.
    pub fn lambda_is_natural(&self) -> bool {
        let r = self.lambda.re.round();
        r >= 0.0 && (self.lambda - C64::new(r, 0.0)).norm() <= 1e-10
    }
}

/// `V = V+(x) - sum_j lambda_j log(x - X_j) + sum_j sum_q e_jq / (x - X_j)^q`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightSpec {
    pub vplus: P,
    /// `deg V+ - 1`.
    pub d: usize,
    pub singularities: Vec<Singularity>,
    /// `s = d + sum_j (g_j + 1)`.
    pub class: usize,
}

impl WeightSpec {
    /// Leading coefficient `v_{d+1}` of `V+`.
    pub fn leading(&self) -> C64 {
        self.vplus.leading()
    }

    /// `A = sum_j lambda_j`.
    pub fn a_total(&self) -> C64 {
        self.singularities.iter().map(|s| s.lambda).sum()
    }

    /// `-V(x)` with the logarithms `log(x - X_j)` supplied by the caller
    /// (branch tracking is the contour's job).
    pub fn log_weight(&self, x: C64, logs: &[C64]) -> C64 {
        let mut v = -self.vplus.eval(x);
        for (s, &l) in self.singularities.iter().zip(logs) {
            v += s.lambda * l;
            if s.g > 0 {
                let inv = (x - s.x).inv();
                let mut p = inv;
                for &e in &s.essential {
                    v -= e * p;
                    p *= inv;
                }
            }
        }
        v
    }

    /// Principal-branch logarithms `log(x - X_j)`.
    pub fn principal_logs(&self, x: C64) -> Vec<C64> {
        self.singularities.iter().map(|s| (x - s.x).ln()).collect()
    }

    /// `W(x)` on the principal branch.
    pub fn eval_principal(&self, x: C64) -> C64 {
        self.log_weight(x, &self.principal_logs(x)).exp()
    }

    /// `V'(x) = -W'/W`, reassembled from the decomposition.
    pub fn log_derivative(&self, x: C64) -> C64 {
        let mut v = self.vplus.derivative().eval(x);
        for s in &self.singularities {
            let inv = (x - s.x).inv();
            v -= s.lambda * inv;
            let mut p = inv * inv;
            for (q, &e) in s.essential.iter().enumerate() {
                v -= e * (q as f64 + 1.0) * p;
                p *= inv;
            }
        }
        v
    }
}

/// Decompose `(A + B')/B` into the potential data of the weight.
pub fn build_weight(a: &P, b: &P) -> Result<WeightSpec> {
    if b.is_zero() {
        return Err(Error::ZeroB);
    }
    let num = a + &b.derivative();
    let roots = b.roots()?;
    let pf = partial_fractions_with_roots(&num, b, &roots)?;
    let vplus = pf.polynomial_part.antiderivative();
    let deg = vplus.degree().unwrap_or(0);
    if deg < 2 {
        return Err(Error::AssumptionAViolated { which: 0 });
    }
    let d = deg - 1;
    let tol = 1e-9;
    let mut singularities = Vec::new();
    for &(x, mult) in &roots.roots {
        let lambda = -pf.coefficient(x, 1, tol);
        let g = mult - 1;
        let essential = (1..=g).map(|q| -pf.coefficient(x, q + 1, tol) / q as f64).collect();
        singularities.push(Singularity { x, g, lambda, essential });
    }
    let class = d + singularities.iter().map(|s| s.g + 1).sum::<usize>();
    Ok(WeightSpec { vplus, d, singularities, class })
}

/// Where a sector is anchored.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Anchor {
    Infinity,
    Finite(usize),
}

/// Angular sector `|arg(x - anchor) - center| < half_width` in which `Re V -> +inf`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sector {
    pub anchor: Anchor,
    pub k: usize,
    pub center: f64,
    pub half_width: f64,
}

/// Wrap an angle to `(-pi, pi]`.
pub fn wrap_angle(t: f64) -> f64 {
    let mut r = t.rem_euclid(2.0 * PI);
    if r > PI {
        r -= 2.0 * PI;
    }
    r
}

impl Sector {
    pub fn contains(&self, angle: f64) -> bool {
        wrap_angle(angle - self.center).abs() < self.half_width
    }
}

/// Sectors at `anchor` with angular margin `eps`: `d + 1` at infinity,
/// `g_j` at a finite essential singularity.
pub fn sectors_at(spec: &WeightSpec, anchor: Anchor, eps: f64) -> Result<Vec<Sector>> {
    match anchor {
        Anchor::Infinity => {
            let n = spec.d + 1;
            let phase = spec.leading().arg();
            Ok((0..n)
                .map(|k| Sector {
                    anchor,
                    k,
                    center: wrap_angle((2.0 * PI * k as f64 - phase) / n as f64),
                    half_width: (PI / 2.0 - eps) / n as f64,
                })
                .collect())
        }
        Anchor::Finite(j) => {
            let s = spec.singularities.get(j).ok_or(Error::OutOfRange { index: j, limit: spec.singularities.len() })?;
            if s.g == 0 {
                return Err(Error::NotEssential);
            }
            // Re(e_g / (x - X)^g) -> +inf along arg(x - X) = (arg e_g + 2k pi)/g
            let phase = s.essential[s.g - 1].arg();
            let n = s.g;
            Ok((0..n)
                .map(|k| Sector {
                    anchor,
                    k,
                    center: wrap_angle((2.0 * PI * k as f64 + phase) / n as f64),
                    half_width: (PI / 2.0 - eps) / n as f64,
                })
                .collect())
        }
    }
}

/// Change of variable `x = c t` used by [`normalize_potential`].
///
/// Moments transform as `mu_n = weight_factor * c^{n+1} * mu'_n`, where
/// `weight_factor = prod_j c^{lambda_j}` (principal powers) accounts for the
/// algebraic factors of the weight.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineMap {
    pub scale: C64,
    pub weight_factor: C64,
}

impl AffineMap {
    pub fn identity() -> Self {
        Self { scale: C64::new(1.0, 0.0), weight_factor: C64::new(1.0, 0.0) }
    }

    /// Original moment `mu_n` from the normalized one.
    pub fn to_original(&self, n: usize, normalized: C64) -> C64 {
        normalized * self.weight_factor * self.scale.powi(n as i32 + 1)
    }

    /// Normalized moment `mu'_n` from the original one.
    pub fn to_normalized(&self, n: usize, original: C64) -> C64 {
        original / (self.weight_factor * self.scale.powi(n as i32 + 1))
    }
}

/// Rescale `x = c t` so the leading term of `V+` becomes `t^{d+1}/(d+1)`,
/// with `c` the principal root of `c^{d+1} = 1/((d+1) v_{d+1})`.
pub fn normalize_potential(spec: &WeightSpec) -> (WeightSpec, AffineMap) {
    let n = (spec.d + 1) as f64;
    let target = (C64::new(n, 0.0) * spec.leading()).inv();
    let c = target.powf(1.0 / n);
    let already = (spec.leading() - 1.0 / n).norm() <= 1e-15;
    let c = if already { C64::new(1.0, 0.0) } else { c };
    let mut weight_factor = C64::new(1.0, 0.0);
    let singularities = spec
        .singularities
        .iter()
        .map(|s| {
            weight_factor *= if s.lambda.is_zero() { C64::new(1.0, 0.0) } else { (s.lambda * c.ln()).exp() };
            Singularity {
                x: s.x / c,
                g: s.g,
                lambda: s.lambda,
                essential: s.essential.iter().enumerate().map(|(q, &e)| e / c.powi(q as i32 + 1)).collect(),
            }
        })
        .collect();
    let mut vplus = spec.vplus.scale_arg(c);
    if !already {
        // pin the leading coefficient exactly
        let mut co = vplus.coeffs().to_vec();
        *co.last_mut().unwrap() = C64::new(1.0 / n, 0.0);
        vplus = P::new(co);
    }
    (
        WeightSpec { vplus, d: spec.d, singularities, class: spec.class },
        AffineMap { scale: c, weight_factor },
    )
}
