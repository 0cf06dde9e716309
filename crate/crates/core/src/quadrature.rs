//! Contour quadrature: Laplace transforms of a weight along its contours,
//! the fundamental functionals `L_ij` as iterated integrals, and the checks
//! built on them.

use std::cell::RefCell;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::bimoment::{BimomentTable, Provenance};
use crate::config::Tolerances;
use crate::contour::{build_contours, Contour, Shape};
use crate::error::{Error, Result};
use crate::gk;
use crate::sdc::trace_sdc;
use crate::semiclassical::{delta_table, SemiclassicalSpec};
use crate::weight::{build_weight, WeightSpec};

/// Adaptive-quadrature controls.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadOptions {
    /// Relative target per component.
    pub rel: f64,
    /// Panel budget per contour piece.
    pub max_panels: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self::from_tolerances(&Tolerances::from_env())
    }
}

impl QuadOptions {
    pub fn from_tolerances(t: &Tolerances) -> Self {
        Self { rel: t.quad_rel, max_panels: 1 << 14 }
    }
}

/// Values with per-component absolute error estimates.
#[derive(Clone, Debug, PartialEq)]
pub struct Estimate {
    pub value: Vec<C64>,
    pub error: Vec<f64>,
}

struct Panel {
    a: f64,
    b: f64,
    val: Vec<C64>,
    err: Vec<f64>,
    abs: Vec<f64>,
}

fn gk_panel<F>(f: &mut F, a: f64, b: f64, dim: usize) -> Result<Panel>
where
    F: FnMut(f64) -> Result<Vec<C64>>,
{
    let (c, h) = ((a + b) * 0.5, (b - a) * 0.5);
    let mut k = vec![C64::new(0.0, 0.0); dim];
    let mut g = vec![C64::new(0.0, 0.0); dim];
    let mut abs = vec![0.0; dim];
    for (x, wk, wg) in gk::nodes() {
        let v = f(c + h * x)?;
        for m in 0..dim {
            if !v[m].is_finite() {
                return Err(Error::QuadratureStall(f64::INFINITY));
            }
            k[m] += v[m] * wk;
            g[m] += v[m] * wg;
            abs[m] += v[m].norm() * wk;
        }
    }
    let err = (0..dim).map(|m| ((k[m] - g[m]) * h).norm()).collect();
    Ok(Panel { a, b, val: k.into_iter().map(|v| v * h).collect(), err, abs: abs.into_iter().map(|v| v * h.abs()).collect() })
}

/// Adaptive vector Gauss-Kronrod on `[a, b]`. Only the first `control`
/// components drive refinement; the rest ride along.
fn adapt<F>(mut f: F, a: f64, b: f64, dim: usize, control: usize, opts: &QuadOptions) -> Result<Estimate>
where
    F: FnMut(f64) -> Result<Vec<C64>>,
{
    let init = 4;
    let mut panels = Vec::new();
    for i in 0..init {
        let t0 = a + (b - a) * i as f64 / init as f64;
        let t1 = a + (b - a) * (i + 1) as f64 / init as f64;
        panels.push(gk_panel(&mut f, t0, t1, dim)?);
    }
    let min_width = (b - a).abs() * 1e-13;
    loop {
        let mut val = vec![C64::new(0.0, 0.0); dim];
        let mut err = vec![0.0; dim];
        let mut abs = vec![0.0; dim];
        for p in &panels {
            for m in 0..dim {
                val[m] += p.val[m];
                err[m] += p.err[m];
                abs[m] += p.abs[m];
            }
        }
        let target: Vec<f64> = (0..control).map(|m| (opts.rel * val[m].norm()).max(50.0 * f64::EPSILON * abs[m])).collect();
        let ratio = |e: &[f64]| (0..control).map(|m| if e[m] == 0.0 { 0.0 } else { e[m] / target[m] }).fold(0.0, f64::max);
        let worst = ratio(&err);
        if worst <= 1.0 {
            return Ok(Estimate { value: val, error: err });
        }
        if panels.len() >= opts.max_panels {
            return Err(Error::QuadratureStall(worst));
        }
        let pick = panels
            .iter()
            .enumerate()
            .filter(|(_, p)| (p.b - p.a).abs() > min_width)
            .map(|(i, p)| (i, ratio(&p.err)))
            .max_by(|x, y| x.1.total_cmp(&y.1));
        let Some((i, _)) = pick else {
            return Err(Error::QuadratureStall(worst));
        };
        let p = panels.swap_remove(i);
        let mid = (p.a + p.b) * 0.5;
        panels.push(gk_panel(&mut f, p.a, mid, dim)?);
        panels.push(gk_panel(&mut f, mid, p.b, dim)?);
    }
}

/// Length of a ray after which the integrand is negligible: the log-magnitude
/// is sampled on a geometric grid until it has fallen 46 units below its
/// running maximum and is still decreasing.
fn ray_extent<L>(mut lmag: L) -> Result<f64>
where
    L: FnMut(f64) -> Result<f64>,
{
    let (mut t, mut best, mut prev) = (0.0, f64::NEG_INFINITY, f64::INFINITY);
    loop {
        let v = lmag(t)?;
        if v.is_nan() || v == f64::INFINITY {
            return Err(Error::DivergentTail);
        }
        best = best.max(v);
        if t > 0.0 && v < best - 46.0 && v < prev {
            return Ok(t);
        }
        prev = v;
        t = 1.25 * t + 0.25;
        if t > 1e4 {
            return Err(Error::DivergentTail);
        }
    }
}

/// Integrate a vector integrand `f(x, logs)` along a contour, where `logs`
/// are the continued `log(x - X_j)`. `lmag(x, logs)` bounds `log max|f|`
/// and is used to truncate rays.
pub(crate) fn integrate_contour<F, L>(
    contour: &Contour,
    sing: &[C64],
    dim: usize,
    control: usize,
    f: F,
    lmag: L,
    opts: &QuadOptions,
) -> Result<Estimate>
where
    F: Fn(C64, &[C64]) -> Result<Vec<C64>>,
    L: Fn(C64, &[C64]) -> Result<f64>,
{
    let mut total = Estimate { value: vec![C64::new(0.0, 0.0); dim], error: vec![0.0; dim] };
    for piece in &contour.pieces {
        let upper = match piece.shape {
            Shape::Ray { .. } => ray_extent(|t| {
                let x = piece.point(t);
                lmag(x, &piece.logs_at(x, sing))
            })?,
            _ => 1.0,
        };
        let sign = piece.orientation();
        let est = adapt(
            |t| {
                let x = piece.point(t);
                let jac = piece.tangent(t) * sign;
                let mut v = f(x, &piece.logs_at(x, sing))?;
                for c in v.iter_mut().take(control) {
                    *c *= jac;
                }
                for c in v.iter_mut().skip(control) {
                    *c *= jac.norm();
                }
                Ok(v)
            },
            0.0,
            upper,
            dim,
            control,
            opts,
        )?;
        for m in 0..dim {
            total.value[m] += est.value[m];
            total.error[m] += est.error[m];
        }
    }
    Ok(total)
}

fn singular_points(spec: &WeightSpec) -> Vec<C64> {
    spec.singularities.iter().map(|s| s.x).collect()
}

fn log_abs_floor1(x: C64) -> f64 {
    x.norm().max(1.0).ln()
}

/// `int_Gamma x^m W(x) e^{xz} dx` for `m = 0..=m_max`.
pub fn laplace_moments_with(contour: &Contour, spec: &WeightSpec, z: C64, m_max: usize, opts: &QuadOptions) -> Result<Estimate> {
    let sing = singular_points(spec);
    integrate_contour(
        contour,
        &sing,
        m_max + 1,
        m_max + 1,
        |x, logs| {
            let base = (spec.log_weight(x, logs) + x * z).exp();
            let mut out = Vec::with_capacity(m_max + 1);
            let mut p = base;
            for _ in 0..=m_max {
                out.push(p);
                p *= x;
            }
            Ok(out)
        },
        |x, logs| Ok((spec.log_weight(x, logs) + x * z).re + m_max as f64 * log_abs_floor1(x)),
        opts,
    )
}

pub fn laplace_moments(contour: &Contour, spec: &WeightSpec, z: C64, m_max: usize) -> Result<Estimate> {
    laplace_moments_with(contour, spec, z, m_max, &QuadOptions::default())
}

/// `int_Gamma x^m W(x) e^{xz} dx`.
pub fn laplace(contour: &Contour, spec: &WeightSpec, z: C64, m: usize) -> Result<C64> {
    Ok(laplace_moments(contour, spec, z, m)?.value[m])
}

/// Reject `d1 = d2 = 1` products of unbounded contours on which
/// `-V1+(x) - V2+(y) + xy` is not negative definite at infinity.
fn coupling_guard(wx: &WeightSpec, wy: &WeightSpec, gx: &Contour, gy: &Contour) -> Result<()> {
    if wx.d != 1 || wy.d != 1 || gx.is_bounded() || gy.is_bounded() {
        return Ok(());
    }
    let delta = wx.vplus.coeff(2) * 2.0;
    let sigma = wy.vplus.coeff(2) * 2.0;
    if (delta * sigma).norm() <= 1.0 {
        return Err(Error::DivergentCoupling);
    }
    for t1 in gx.ray_angles() {
        for t2 in gy.ray_angles() {
            let a = (delta * C64::from_polar(1.0, 2.0 * t1)).re / 2.0;
            let b = (sigma * C64::from_polar(1.0, 2.0 * t2)).re / 2.0;
            let c = C64::from_polar(1.0, t1 + t2).re;
            if a <= 0.0 || b <= 0.0 || c * c >= 4.0 * a * b {
                return Err(Error::DivergentCoupling);
            }
        }
    }
    Ok(())
}

/// The functional `L_ij(x^n | y^m) = int_{Gamma_i} int_{Gamma_j} x^n y^m W1(x) W2(y) e^{xy} dy dx`.
#[derive(Debug)]
pub struct FunctionalHandle {
    /// Contour index in `x` (0-based).
    pub i: usize,
    /// Contour index in `y` (0-based).
    pub j: usize,
    pub wx: WeightSpec,
    pub wy: WeightSpec,
    pub gx: Contour,
    pub gy: Contour,
    opts: QuadOptions,
    cache: RefCell<Option<BimomentTable<f64>>>,
}

impl FunctionalHandle {
    pub fn new(spec: &SemiclassicalSpec<f64>, i: usize, j: usize) -> Result<Self> {
        let wx = build_weight(spec.a1(), spec.b1())?;
        let wy = build_weight(spec.a2(), spec.b2())?;
        let mut cx = build_contours(&wx)?;
        let mut cy = build_contours(&wy)?;
        if i >= cx.len() {
            return Err(Error::OutOfRange { index: i, limit: cx.len() });
        }
        if j >= cy.len() {
            return Err(Error::OutOfRange { index: j, limit: cy.len() });
        }
        let (gx, gy) = (cx.swap_remove(i), cy.swap_remove(j));
        Self::from_parts(wx, wy, gx, gy, i, j)
    }

    pub fn from_parts(wx: WeightSpec, wy: WeightSpec, gx: Contour, gy: Contour, i: usize, j: usize) -> Result<Self> {
        coupling_guard(&wx, &wy, &gx, &gy)?;
        Ok(Self { i, j, wx, wy, gx, gy, opts: QuadOptions::default(), cache: RefCell::new(None) })
    }

    /// All `s1 * s2` functionals, `i` major.
    pub fn all(spec: &SemiclassicalSpec<f64>) -> Result<Vec<Self>> {
        let (s1, s2) = spec.bi_class();
        let mut out = Vec::with_capacity(s1 * s2);
        for i in 0..s1 {
            for j in 0..s2 {
                out.push(Self::new(spec, i, j)?);
            }
        }
        Ok(out)
    }

    pub fn with_options(mut self, opts: QuadOptions) -> Self {
        self.opts = opts;
        self.cache = RefCell::new(None);
        self
    }

    pub fn options(&self) -> &QuadOptions {
        &self.opts
    }

    /// `Xi_i(z) = int_{Gamma_i} W1(x) e^{xz} dx`.
    pub fn xi(&self, z: C64) -> Result<C64> {
        Ok(laplace_moments_with(&self.gx, &self.wx, z, 0, &self.opts)?.value[0])
    }

    /// `Psi_j(w) = int_{Gamma_j} W2(y) e^{yw} dy`.
    pub fn psi(&self, w: C64) -> Result<C64> {
        Ok(laplace_moments_with(&self.gy, &self.wy, w, 0, &self.opts)?.value[0])
    }

    /// `int_{Gamma_i} W1(x) e^{xz} Psi_j(w + rho x) dx`.
    pub fn coupled_eval(&self, z: C64, w: C64, rho: f64) -> Result<C64> {
        let sing = singular_points(&self.wx);
        let inner = |x: C64| laplace_moments_with(&self.gy, &self.wy, w + x * rho, 0, &self.opts).map(|e| e.value[0]);
        let est = integrate_contour(
            &self.gx,
            &sing,
            1,
            1,
            |x, logs| Ok(vec![(self.wx.log_weight(x, logs) + x * z).exp() * inner(x)?]),
            |x, logs| Ok((self.wx.log_weight(x, logs) + x * z).re + inner(x)?.norm().ln()),
            &self.opts,
        )?;
        Ok(est.value[0])
    }

    /// `F_ij(z, w) = int_{Gamma_i} W1(x) e^{xz} Psi_j(w + x) dx`.
    pub fn generating_eval(&self, z: C64, w: C64) -> Result<C64> {
        self.coupled_eval(z, w, 1.0)
    }

    /// Largest relative gap between the iterated integral at `rho = 0` and
    /// `Xi_i(z) Psi_j(w)` over `z, w in {-0.5, 0, 0.5}`.
    pub fn rho_factorization_check(&self) -> Result<f64> {
        let grid = [-0.5, 0.0, 0.5];
        let mut worst: f64 = 0.0;
        for &z in &grid {
            let xi = self.xi(C64::new(z, 0.0))?;
            for &w in &grid {
                let w = C64::new(w, 0.0);
                let direct = self.coupled_eval(C64::new(z, 0.0), w, 0.0)?;
                let product = xi * self.psi(w)?;
                worst = worst.max((direct - product).norm() / product.norm().max(f64::MIN_POSITIVE));
            }
        }
        Ok(worst)
    }

    /// Bimoments `mu_nm` for `n, m <= n_max`, with per-entry error estimates.
    pub fn bimoment_table(&self, n_max: usize) -> Result<BimomentTable<f64>> {
        if let Some(t) = self.cache.borrow().as_ref() {
            if t.size() >= n_max {
                return Ok(t.truncate(n_max));
            }
        }
        let t = self.compute_table(n_max)?;
        *self.cache.borrow_mut() = Some(t.clone());
        Ok(t)
    }

    fn compute_table(&self, n_max: usize) -> Result<BimomentTable<f64>> {
        let k = n_max + 1;
        let cells = k * k;
        let sing = singular_points(&self.wx);
        let inner = |x: C64| laplace_moments_with(&self.gy, &self.wy, x, n_max, &self.opts);
        let est = integrate_contour(
            &self.gx,
            &sing,
            2 * cells,
            cells,
            |x, logs| {
                let psi = inner(x)?;
                let w = self.wx.log_weight(x, logs).exp();
                let mut out = vec![C64::new(0.0, 0.0); 2 * cells];
                let mut p = w;
                for n in 0..k {
                    for m in 0..k {
                        out[n * k + m] = p * psi.value[m];
                        out[cells + n * k + m] = C64::new(p.norm() * psi.error[m], 0.0);
                    }
                    p *= x;
                }
                Ok(out)
            },
            |x, logs| {
                let psi = inner(x)?;
                let big = psi.value.iter().map(|v| v.norm()).fold(0.0, f64::max);
                Ok(self.wx.log_weight(x, logs).re + n_max as f64 * log_abs_floor1(x) + big.ln())
            },
            &self.opts,
        )?;
        let mut t = BimomentTable::from_fn(n_max, Provenance::Quadrature, |n, m| est.value[n * k + m]);
        for n in 0..k {
            for m in 0..k {
                t.set_error(n, m, est.error[n * k + m] + est.value[cells + n * k + m].re);
            }
        }
        Ok(t)
    }
}

/// Leading asymptotic term of `int W(x) e^{xz} dx` along the steepest-descent
/// contour through saddle `k`, for `V+ = x^{d+1}/(d+1) + v_0`:
/// `K sqrt(2 pi / d) z^{(2A+1-d)/(2d)} omega^{k(A-1/2)} exp(d/(d+1) z^{(d+1)/d} omega^k)`
/// with `omega = e^{2 i pi / d}` and `K = e^{-v_0}`.
pub fn predicted_leading(spec: &WeightSpec, z: C64, k: usize) -> Result<C64> {
    let d = spec.d;
    let df = d as f64;
    let c = spec.vplus.coeffs();
    let lead_ok = (c[d + 1] - C64::new(1.0 / (df + 1.0), 0.0)).norm() <= 1e-12;
    if !lead_ok || c[1..=d].iter().any(|v| v.norm() > 1e-12) {
        return Err(Error::NotNormalized);
    }
    let a = spec.a_total();
    let omega = |p: C64| (C64::new(0.0, 2.0 * PI * k as f64 / df) * p).exp();
    let zp = |p: C64| (z.ln() * p).exp();
    let half = C64::new(0.5, 0.0);
    Ok((-c[0]).exp()
        * (2.0 * PI / df).sqrt()
        * zp((a * 2.0 + 1.0 - df) / (2.0 * df))
        * omega(a - half)
        * (zp(C64::new((df + 1.0) / df, 0.0)) * omega(C64::new(1.0, 0.0)) * (df / (df + 1.0))).exp())
}

/// One sample of [`asymptotic_check`].
#[derive(Clone, Debug, PartialEq)]
pub struct AsymptoticPoint {
    pub z: C64,
    pub value: C64,
    pub predicted: C64,
    /// `|value| / |predicted|`.
    pub ratio: f64,
    /// `arg(value / predicted)`.
    pub phase_error: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AsymptoticReport {
    pub points: Vec<AsymptoticPoint>,
    /// Least-squares slope of `log|ratio - 1|` against `log|z|`.
    pub slope: Option<f64>,
    /// Last ratio within 5% of 1, and the correction decays at least like `|z|^{-0.7}`.
    pub pass: bool,
}

/// Compare the steepest-descent integral with its leading asymptotic term
/// along a sequence of `z` values.
pub fn asymptotic_check(spec: &WeightSpec, k: usize, zs: &[C64]) -> Result<AsymptoticReport> {
    let mut points = Vec::with_capacity(zs.len());
    for &z in zs {
        let path = trace_sdc(spec, z, k)?;
        let value = laplace(&path, spec, z, 0)?;
        let predicted = predicted_leading(spec, z, k)?;
        let q = value / predicted;
        points.push(AsymptoticPoint { z, value, predicted, ratio: q.norm(), phase_error: q.arg() });
    }
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.ratio != 1.0)
        .map(|p| (p.z.norm().ln(), (p.ratio - 1.0).abs().ln()))
        .collect();
    let slope = (logs.len() >= 2).then(|| {
        let n = logs.len() as f64;
        let (mx, my) = (logs.iter().map(|p| p.0).sum::<f64>() / n, logs.iter().map(|p| p.1).sum::<f64>() / n);
        let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    });
    let last_ok = points.last().is_some_and(|p| (p.ratio - 1.0).abs() <= 0.05);
    let pass = last_ok && slope.is_none_or(|s| s <= -0.7);
    Ok(AsymptoticReport { points, slope, pass })
}

/// Outcome of the linear-independence test.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub rank: usize,
    pub rows: usize,
    /// `sigma_min / sigma_max`.
    pub ratio: f64,
    pub singular_values: Vec<f64>,
}

impl Certificate {
    pub fn passes(&self) -> bool {
        self.rank == self.rows
    }
}

/// Numerical rank of the row-normalized, vectorized tables.
pub fn rank_certificate(tables: &[BimomentTable<f64>], rank_tol: f64) -> Certificate {
    let rows = tables.len();
    let cols = tables.first().map_or(0, |t| t.entries().len());
    let mut a = DMatrix::<C64>::zeros(rows, cols);
    for (r, t) in tables.iter().enumerate() {
        let norm = t.entries().iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        let norm = if norm > 0.0 { norm } else { 1.0 };
        for (c, v) in t.entries().iter().enumerate() {
            a[(r, c)] = *v / norm;
        }
    }
    let mut sv: Vec<f64> = if rows == 0 || cols == 0 { Vec::new() } else { a.singular_values().iter().copied().collect() };
    sv.sort_by(|x, y| y.total_cmp(x));
    let smax = sv.first().copied().unwrap_or(0.0);
    let rank = sv.iter().filter(|&&s| s > rank_tol * smax).count();
    let ratio = if smax > 0.0 && sv.len() >= rows { sv[rows - 1] / smax } else { 0.0 };
    Certificate { rank, rows, ratio, singular_values: sv }
}

/// Rank certificate for a family of functionals on tables of order `n_max`.
pub fn independence_certificate(handles: &[FunctionalHandle], n_max: usize) -> Result<Certificate> {
    let tables = handles.iter().map(|h| h.bimoment_table(n_max)).collect::<Result<Vec<_>>>()?;
    Ok(rank_certificate(&tables, Tolerances::from_env().rank))
}

/// Bimoment table of the delta-supported solution at `c` with index `j`,
/// paired with the contour `gy` of the second weight.
pub fn delta_solutions(c: C64, j: usize, wy: &WeightSpec, gy: &Contour, n_max: usize) -> Result<BimomentTable<f64>> {
    let y = laplace_moments(gy, wy, c, n_max + j)?;
    delta_table(c, j, &y.value, n_max)
}

/// `F(z, w) = e^{cz} int (y + z)^j e^{y (w + c)} W2(y) dy` for the delta-supported solution.
pub fn delta_generating(c: C64, j: usize, wy: &WeightSpec, gy: &Contour, z: C64, w: C64) -> Result<C64> {
    let y = laplace_moments(gy, wy, w + c, j)?;
    let mut binom = 1.0;
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..=j {
        acc += y.value[i] * z.powi((j - i) as i32) * binom;
        binom = binom * (j - i) as f64 / (i + 1) as f64;
    }
    Ok((c * z).exp() * acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contour::{Builder, ContourKind};
    use crate::poly::CPoly;

    type P = CPoly<f64>;

    fn weight(a: &[f64], b: &[f64]) -> WeightSpec {
        build_weight(&P::from_f64(a), &P::from_f64(b)).unwrap()
    }

    #[test]
    fn gaussian_line() {
        let w = weight(&[0.0, 2.0], &[1.0]);
        let g = build_contours(&w).unwrap();
        let v = laplace(&g[0], &w, C64::new(0.0, 0.0), 0).unwrap();
        assert!((v - C64::new(PI.sqrt(), 0.0)).norm() < 1e-13);
        // int x^2 e^{-x^2 + x} = sqrt(pi) e^{1/4} (1/2 + 1/4)
        let v = laplace(&g[0], &w, C64::new(1.0, 0.0), 2).unwrap();
        assert!((v.re / (PI.sqrt() * 0.25f64.exp() * 0.75) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn airy_loop_at_origin() {
        let w = weight(&[0.0, 0.0, 1.0], &[1.0]);
        let g = build_contours(&w).unwrap();
        let v = laplace(&g[1], &w, C64::new(0.0, 0.0), 0).unwrap();
        let want = C64::new(0.0, 2.0 * PI * 0.355_028_053_887_817_2);
        assert!((v - want).norm() / want.norm() < 1e-12, "{v}");
    }

    #[test]
    fn closed_loop_without_singularity_vanishes() {
        let w = weight(&[0.0, 0.0, 1.0], &[1.0]);
        let mut b = Builder::new(Vec::new());
        b.arc(C64::new(0.3, 0.1), 0.5, 0.0, 2.0 * PI);
        let lp = b.finish(ContourKind::Sdc, None, false);
        let v = laplace(&lp, &w, C64::new(0.2, 0.0), 1).unwrap();
        assert!(v.norm() < 1e-14);
    }

    #[test]
    fn pole_loop_gives_residue() {
        // W = e^{-x^2/2} / x: the loop picks up the residue 2 pi i at 0
        // on top of the real-line principal value (0 by parity).
        let w = weight(&[0.0, 1.0, 1.0], &[0.0, 1.0]);
        assert_eq!(w.singularities[0].lambda, C64::new(-1.0, 0.0));
        let g = build_contours(&w).unwrap();
        let lp = g.iter().find(|c| c.kind == ContourKind::Loop1a).unwrap();
        let v = laplace(lp, &w, C64::new(0.0, 0.0), 0).unwrap();
        assert!((v.norm() - 2.0 * PI).abs() < 1e-10, "{v}");
    }

    #[test]
    fn gaussian_bimoments() {
        let spec = crate::semiclassical::validate_spec(&P::from_f64(&[0.0, 2.0]), &P::one(), &P::from_f64(&[0.0, 2.0]), &P::one()).unwrap();
        let h = FunctionalHandle::new(&spec, 0, 0).unwrap();
        let t = h.bimoment_table(2).unwrap();
        let mu00 = 2.0 * PI / 3f64.sqrt();
        assert!((t.get(0, 0).re / mu00 - 1.0).abs() < 1e-11);
        assert!((t.get(1, 1).re / (mu00 / 3.0) - 1.0).abs() < 1e-11);
        assert!(t.get(1, 0).norm() < 1e-12);
        assert!(t.error(0, 0) < 1e-9);
        let f = h.generating_eval(C64::new(1.0, 0.0), C64::new(0.0, 0.0)).unwrap();
        assert!((f.re / (mu00 * (1.0f64 / 3.0).exp()) - 1.0).abs() < 1e-11);
        assert!(h.rho_factorization_check().unwrap() < 1e-10);
    }

    #[test]
    fn coupling_guard_trips() {
        let w = weight(&[0.0, 0.5], &[1.0]);
        let g = build_contours(&w).unwrap();
        let r = FunctionalHandle::from_parts(w.clone(), w.clone(), g[0].clone(), g[0].clone(), 0, 0);
        assert_eq!(r.unwrap_err(), Error::DivergentCoupling);
    }

    #[test]
    fn airy_asymptotics() {
        let w = weight(&[0.0, 0.0, 1.0], &[1.0]);
        let zs: Vec<C64> = [20.0, 30.0, 40.0].iter().map(|&r| C64::from_polar(r, -PI / 12.0)).collect();
        let rep = asymptotic_check(&w, 0, &zs).unwrap();
        for p in &rep.points {
            assert!((p.ratio - 1.0).abs() < 0.05, "{p:?}");
            assert!(p.phase_error.abs() < 0.05);
        }
        assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn gaussian_asymptotics_are_exact() {
        let w = weight(&[0.0, 1.0], &[1.0]);
        let p = predicted_leading(&w, C64::new(2.0, 0.3), 0).unwrap();
        let line = &build_contours(&w).unwrap()[0];
        let v = laplace(line, &w, C64::new(2.0, 0.3), 0).unwrap();
        assert!((v / p - 1.0).norm() < 1e-12);
    }

    #[test]
    fn duplicated_rows_lose_rank() {
        let a = BimomentTable::from_fn(2, Provenance::Input, |n, m| C64::new((n + 2 * m) as f64, 1.0));
        let b = BimomentTable::from_fn(2, Provenance::Input, |n, m| C64::new((n * m) as f64, 0.0));
        let c = rank_certificate(&[a.clone(), b.clone()], 1e-8);
        assert_eq!(c.rank, 2);
        let c = rank_certificate(&[a.clone(), b, a], 1e-8);
        assert_eq!(c.rank, 2);
        assert!(!c.passes());
    }
}
