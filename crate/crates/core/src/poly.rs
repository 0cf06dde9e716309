//! Complex polynomials: arithmetic, roots with multiplicities, partial
//! fractions and numerical common factors.

use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{cr, Real, C};

/// Polynomial with complex coefficients in ascending degree order.
///
/// Always stored in canonical form: no trailing exact zeros, and the zero
/// polynomial has an empty coefficient vector.
#[derive(Clone, Debug, PartialEq)]
pub struct CPoly<T: Real> {
    coeffs: Vec<C<T>>,
}

impl<T: Real> CPoly<T> {
    pub fn new(mut coeffs: Vec<C<T>>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[T]) -> Self {
        Self::new(coeffs.iter().map(|&x| cr(x)).collect())
    }

    pub fn from_f64(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&x| cr(T::lit(x))).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: C<T>) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(C::one())
    }

    /// The monomial `c * x^k`.
    pub fn monomial(c: C<T>, k: usize) -> Self {
        let mut v = vec![C::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    /// `x - root`.
    pub fn linear(root: C<T>) -> Self {
        Self::new(vec![-root, C::one()])
    }

    /// `lead * prod (x - r)^m`.
    pub fn from_roots(lead: C<T>, roots: &RootMultiset<T>) -> Self {
        let mut p = Self::constant(lead);
        for &(r, m) in &roots.roots {
            for _ in 0..m {
                p = &p * &Self::linear(r);
            }
        }
        p
    }

    pub fn coeffs(&self) -> &[C<T>] {
        &self.coeffs
    }

    /// Coefficient of `x^k` (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> C<T> {
        self.coeffs.get(k).copied().unwrap_or_else(C::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the convention `deg 0 = -1`.
    pub fn degree_i(&self) -> isize {
        self.coeffs.len() as isize - 1
    }

    pub fn leading(&self) -> C<T> {
        self.coeffs.last().copied().unwrap_or_else(C::zero)
    }

    pub fn max_abs_coeff(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |m, c| m.max(c.norm()))
    }

    /// Horner evaluation.
    pub fn eval(&self, x: C<T>) -> C<T> {
        self.coeffs.iter().rev().fold(C::zero(), |acc, &c| acc * x + c)
    }

    /// Value of the polynomial with coefficients replaced by their moduli at `r`.
    pub fn eval_abs(&self, r: T) -> T {
        self.coeffs.iter().rev().fold(T::zero(), |acc, c| acc * r + c.norm())
    }

    /// `p(x), p'(x), ..., p^(k)(x) / k!` (normalized Taylor coefficients at `x`).
    pub fn taylor_at(&self, x: C<T>, k: usize) -> Vec<C<T>> {
        let mut work = self.coeffs.clone();
        let mut out = Vec::with_capacity(k + 1);
        for _ in 0..=k {
            // one synthetic division by (t - x): remainder is the next Taylor coefficient
            let n = work.len();
            if n == 0 {
                out.push(C::zero());
                continue;
            }
            let mut carry = C::zero();
            let mut quotient = vec![C::zero(); n.saturating_sub(1)];
            for i in (0..n).rev() {
                carry = carry * x + work[i];
                if i > 0 {
                    quotient[i - 1] = carry;
                }
            }
            out.push(carry);
            work = quotient;
        }
        out
    }

    /// Coefficients of `p(x + c)` in powers of `x`.
    pub fn taylor_shift(&self, c: C<T>) -> Self {
        match self.degree() {
            None => Self::zero(),
            Some(d) => Self::new(self.taylor_at(c, d)),
        }
    }

    /// `p(c x)`.
    pub fn scale_arg(&self, c: C<T>) -> Self {
        let mut pow = C::one();
        let mut v = Vec::with_capacity(self.coeffs.len());
        for &a in &self.coeffs {
            v.push(a * pow);
            pow = pow * c;
        }
        Self::new(v)
    }

    pub fn scale(&self, c: C<T>) -> Self {
        Self::new(self.coeffs.iter().map(|&a| a * c).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &a)| a * T::from_usize(k).unwrap())
                .collect(),
        )
    }

    /// Antiderivative with zero constant term.
    pub fn antiderivative(&self) -> Self {
        let mut v = vec![C::zero()];
        v.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, &a)| a / T::from_usize(k + 1).unwrap()),
        );
        Self::new(v)
    }

    /// Euclidean division `self = q * d + r`, `deg r < deg d`.
    pub fn div_rem(&self, d: &Self) -> Result<(Self, Self)> {
        let dd = d.degree().ok_or(Error::ZeroPolynomial)?;
        let Some(nd) = self.degree() else {
            return Ok((Self::zero(), Self::zero()));
        };
        if nd < dd {
            return Ok((Self::zero(), self.clone()));
        }
        let lead = d.leading();
        let mut r = self.coeffs.clone();
        let mut q = vec![C::zero(); nd - dd + 1];
        for k in (0..=nd - dd).rev() {
            let f = r[k + dd] / lead;
            q[k] = f;
            for (j, &dj) in d.coeffs.iter().enumerate() {
                r[k + j] = r[k + j] - f * dj;
            }
            r[k + dd] = C::zero();
        }
        r.truncate(dd);
        Ok((Self::new(q), Self::new(r)))
    }

    /// Divide by `(x - c)^k`, discarding the (numerically small) remainder.
    pub fn deflate(&self, c: C<T>, k: usize) -> Self {
        let mut p = self.clone();
        for _ in 0..k {
            let (q, _) = p.div_rem(&Self::linear(c)).expect("linear divisor");
            p = q;
        }
        p
    }

    /// Zero out coefficients below `tol * max|coeff|` and re-canonicalize.
    pub fn chop(&self, tol: T) -> Self {
        let cut = tol * self.max_abs_coeff();
        Self::new(
            self.coeffs
                .iter()
                .map(|&a| if a.norm() <= cut { C::zero() } else { a })
                .collect(),
        )
    }

    pub fn pow(&self, k: usize) -> Self {
        (0..k).fold(Self::one(), |acc, _| &acc * self)
    }

    /// All roots with multiplicities, using default tolerances for `T`.
    pub fn roots(&self) -> Result<RootMultiset<T>> {
        poly_roots(self, &RootOptions::default())
    }
}

impl<T: Real> Add for &CPoly<T> {
    type Output = CPoly<T>;
    fn add(self, rhs: Self) -> CPoly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        CPoly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl<T: Real> Sub for &CPoly<T> {
    type Output = CPoly<T>;
    fn sub(self, rhs: Self) -> CPoly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        CPoly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl<T: Real> Mul for &CPoly<T> {
    type Output = CPoly<T>;
    fn mul(self, rhs: Self) -> CPoly<T> {
        if self.is_zero() || rhs.is_zero() {
            return CPoly::zero();
        }
        let mut v = vec![C::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                v[i + j] = v[i + j] + a * b;
            }
        }
        CPoly::new(v)
    }
}

impl<T: Real> Neg for &CPoly<T> {
    type Output = CPoly<T>;
    fn neg(self) -> CPoly<T> {
        CPoly::new(self.coeffs.iter().map(|&a| -a).collect())
    }
}

/// Distinct roots with their multiplicities.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct RootMultiset<T: Real> {
    pub roots: Vec<(C<T>, usize)>,
}

impl<T: Real> RootMultiset<T> {
    pub fn total_multiplicity(&self) -> usize {
        self.roots.iter().map(|r| r.1).sum()
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// Multiplicity of the root nearest to `z`, if one lies within `tol`.
    pub fn multiplicity_near(&self, z: C<T>, tol: T) -> Option<usize> {
        self.roots
            .iter()
            .filter(|(r, _)| (*r - z).norm() <= tol * T::one().max(z.norm()))
            .map(|r| r.1)
            .next()
    }
}

/// Tolerances for [`poly_roots`].
#[derive(Clone, Copy, Debug)]
pub struct RootOptions<T: Real> {
    /// Roots closer than this (relative to `max(1,|root|)`) are always merged.
    pub cluster_tol: T,
    /// Wider radius inside which a cluster is merged if the derivative test passes.
    pub probe_radius: T,
    /// Derivative test threshold for accepting a multiple root.
    pub multiplicity_tol: T,
    /// Residual acceptance `|p(r)| <= residual_tol * max|coeff| * max(1,|r|)^deg`.
    pub residual_tol: T,
    pub max_iter: usize,
}

impl<T: Real> Default for RootOptions<T> {
    fn default() -> Self {
        Self {
            cluster_tol: T::tol(1e-8, 0.5),
            probe_radius: T::tol(1e-3, 0.25),
            multiplicity_tol: T::tol(1e-10, 0.5),
            residual_tol: T::tol(1e-10, 1.0),
            max_iter: 500,
        }
    }
}

fn aberth<T: Real>(p: &CPoly<T>, opts: &RootOptions<T>) -> Vec<C<T>> {
    let n = p.degree().unwrap_or(0);
    if n == 0 {
        return Vec::new();
    }
    let dp = p.derivative();
    let lead = p.leading();
    // Initial guesses on a circle around the root centroid, radius from the
    // Fujiwara-type bound of the shifted polynomial.
    let center = -p.coeff(n - 1) / (lead * T::from_usize(n).unwrap());
    let shifted = p.taylor_shift(center);
    let mut radius = T::zero();
    for k in 0..n {
        let ratio = (shifted.coeff(k) / lead).norm();
        if ratio > T::zero() {
            radius = radius.max(ratio.powf(T::one() / T::from_usize(n - k).unwrap()));
        }
    }
    if radius == T::zero() {
        return vec![center; n];
    }
    let two_pi = T::PI() + T::PI();
    let mut z: Vec<C<T>> = (0..n)
        .map(|k| {
            let th = two_pi * T::from_usize(k).unwrap() / T::from_usize(n).unwrap() + T::lit(0.4);
            center + C::from_polar(radius, th)
        })
        .collect();
    let eps = T::epsilon();
    for _ in 0..opts.max_iter {
        let mut max_step = T::zero();
        for i in 0..n {
            let pv = p.eval(z[i]);
            if pv.is_zero() {
                continue;
            }
            let ratio = pv / dp.eval(z[i]);
            let mut s = C::<T>::zero();
            for j in 0..n {
                if j != i {
                    let diff = z[i] - z[j];
                    if !diff.is_zero() {
                        s = s + C::<T>::one() / diff;
                    }
                }
            }
            let w: C<T> = ratio / (C::<T>::one() - ratio * s);
            if w.re.is_finite() && w.im.is_finite() {
                z[i] = z[i] - w;
                max_step = max_step.max(w.norm() / T::one().max(z[i].norm()));
            }
        }
        if max_step <= eps * T::lit(4.0) {
            break;
        }
    }
    z
}

/// Newton refinement of a simple root of `q`; keeps the best iterate.
fn newton_polish<T: Real>(q: &CPoly<T>, mut z: C<T>, steps: usize) -> C<T> {
    let dq = q.derivative();
    let mut best = (q.eval(z).norm(), z);
    for _ in 0..steps {
        let d = dq.eval(z);
        if d.is_zero() {
            break;
        }
        z = z - q.eval(z) / d;
        let r = q.eval(z).norm();
        if !(r.is_finite()) {
            break;
        }
        if r < best.0 {
            best = (r, z);
        }
        if r.is_zero() {
            break;
        }
    }
    best.1
}

/// Check that `p^(j)(c) / j!` is negligible for `j < m`.
fn multiplicity_ok<T: Real>(p: &CPoly<T>, c: C<T>, m: usize, tol: T) -> bool {
    let tay = p.taylor_at(c, m);
    let absp: CPoly<T> = CPoly::new(p.coeffs().iter().map(|a| cr(a.norm())).collect());
    let bounds = absp.taylor_at(cr(c.norm()), m);
    // the m-th coefficient must be significant for the root to have exactly
    // multiplicity m at the scale we can resolve
    (0..m).all(|j| tay[j].norm() <= tol * bounds[j].norm().max(T::min_positive_value()))
}

/// All complex roots of `p` with multiplicities.
///
/// Aberth–Ehrlich simultaneous iteration, cluster merging (always below
/// `cluster_tol`, and up to `probe_radius` when the derivative test confirms a
/// multiple root), and Newton polishing on `p^(m-1)` at each cluster centroid.
pub fn poly_roots<T: Real>(p: &CPoly<T>, opts: &RootOptions<T>) -> Result<RootMultiset<T>> {
    let deg = p.degree().ok_or(Error::ZeroPolynomial)?;
    if deg == 0 {
        return Ok(RootMultiset::default());
    }
    // exact zeros at the origin are peeled off first
    let lowest = p.coeffs().iter().position(|c| !c.is_zero()).unwrap();
    let reduced = CPoly::new(p.coeffs()[lowest..].to_vec());
    // no per-root polishing here: Newton on a multiple root would move the
    // cluster centroid, which is the accurate quantity
    let mut raw: Vec<C<T>> = aberth(&reduced, opts);
    raw.extend(std::iter::repeat(C::zero()).take(lowest));
    raw.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal))
    });

    // greedy clustering: seed with the first unassigned root, absorb neighbours
    let mut used = vec![false; raw.len()];
    let mut out: Vec<(C<T>, usize)> = Vec::new();
    for i in 0..raw.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let mut members = vec![raw[i]];
        let scale = T::one().max(raw[i].norm());
        // hard merge
        for j in i + 1..raw.len() {
            if !used[j] && (raw[j] - raw[i]).norm() <= opts.cluster_tol * scale {
                used[j] = true;
                members.push(raw[j]);
            }
        }
        // probe wider neighbourhood
        let mut candidates: Vec<usize> = (i + 1..raw.len())
            .filter(|&j| !used[j] && (raw[j] - raw[i]).norm() <= opts.probe_radius * scale)
            .collect();
        candidates.sort_by(|&a, &b| {
            (raw[a] - raw[i]).norm().partial_cmp(&(raw[b] - raw[i]).norm()).unwrap()
        });
        let mut trial = members.clone();
        let mut accepted = members.len();
        for (k, &j) in candidates.iter().enumerate() {
            trial.push(raw[j]);
            let cen = newton_polish(&nth_derivative(p, trial.len() - 1), centroid(&trial), 8);
            if multiplicity_ok(p, cen, trial.len(), opts.multiplicity_tol) {
                accepted = members.len() + k + 1;
            }
        }
        for &j in candidates.iter().take(accepted - members.len()) {
            used[j] = true;
            members.push(raw[j]);
        }
        let m = members.len();
        let mut root = centroid(&members);
        if lowest > 0 && root.norm() <= opts.cluster_tol && m <= lowest {
            root = C::zero();
        } else {
            root = newton_polish(&nth_derivative(p, m - 1), root, 8);
        }
        out.push((root, m));
    }

    let bound = opts.residual_tol * p.max_abs_coeff();
    for &(r, _) in &out {
        let lim = bound * T::one().max(r.norm()).powi(deg as i32);
        let res = p.eval(r).norm();
        if !(res <= lim) {
            return Err(Error::Invalid(format!(
                "root polishing failed: residual {res:?} exceeds {lim:?}"
            )));
        }
    }
    Ok(RootMultiset { roots: out })
}

fn nth_derivative<T: Real>(p: &CPoly<T>, k: usize) -> CPoly<T> {
    (0..k).fold(p.clone(), |q, _| q.derivative())
}

fn centroid<T: Real>(zs: &[C<T>]) -> C<T> {
    let s = zs.iter().fold(C::zero(), |a, &b| a + b);
    s / T::from_usize(zs.len()).unwrap()
}

/// Decomposition `num/den = polynomial_part + sum coefficient / (x - pole)^order`.
#[derive(Clone, Debug)]
pub struct PartialFraction<T: Real> {
    pub polynomial_part: CPoly<T>,
    /// `(pole, order, coefficient)`; zero coefficients are omitted.
    pub terms: Vec<(C<T>, usize, C<T>)>,
}

impl<T: Real> PartialFraction<T> {
    pub fn eval(&self, x: C<T>) -> C<T> {
        let mut v = self.polynomial_part.eval(x);
        for &(pole, order, coeff) in &self.terms {
            v = v + coeff / (x - pole).powi(order as i32);
        }
        v
    }

    /// Coefficient of `1/(x - pole)^order` for the pole nearest to `z`.
    pub fn coefficient(&self, z: C<T>, order: usize, tol: T) -> C<T> {
        self.terms
            .iter()
            .filter(|t| t.1 == order && (t.0 - z).norm() <= tol * T::one().max(z.norm()))
            .map(|t| t.2)
            .next()
            .unwrap_or_else(C::zero)
    }

    /// Residue (order-1 coefficient) at the pole nearest `z`.
    pub fn residue(&self, z: C<T>, tol: T) -> C<T> {
        self.coefficient(z, 1, tol)
    }
}

/// Partial-fraction decomposition of `num/den` over the numerical roots of `den`.
pub fn partial_fractions<T: Real>(num: &CPoly<T>, den: &CPoly<T>) -> Result<PartialFraction<T>> {
    partial_fractions_with_roots(num, den, &den.roots()?)
}

/// As [`partial_fractions`], reusing a precomputed root multiset of `den`.
pub fn partial_fractions_with_roots<T: Real>(
    num: &CPoly<T>,
    den: &CPoly<T>,
    den_roots: &RootMultiset<T>,
) -> Result<PartialFraction<T>> {
    let (q, r) = num.div_rem(den)?;
    let lead = den.leading();
    let mut terms = Vec::new();
    if !r.is_zero() {
        for (idx, &(pole, m)) in den_roots.roots.iter().enumerate() {
            // cofactor: den / (x - pole)^m rebuilt from the remaining roots
            let mut cof = CPoly::constant(lead);
            for (jdx, &(other, k)) in den_roots.roots.iter().enumerate() {
                if jdx != idx {
                    cof = &cof * &CPoly::linear(other).pow(k);
                }
            }
            let rn = r.taylor_at(pole, m - 1);
            let dn = cof.taylor_at(pole, m - 1);
            let mut g: Vec<C<T>> = Vec::with_capacity(m);
            for k in 0..m {
                let mut acc = rn[k];
                for i in 1..=k {
                    acc = acc - dn[i] * g[k - i];
                }
                g.push(acc / dn[0]);
            }
            for (k, &gk) in g.iter().enumerate() {
                terms.push((pole, m - k, gk));
            }
        }
    }
    let max_all = terms.iter().fold(T::zero(), |a, t| a.max(t.2.norm()));
    let cut = T::tol(1e-13, 1.0) * max_all;
    terms.retain(|t| t.2.norm() > cut);
    Ok(PartialFraction { polynomial_part: q, terms })
}

/// Shared roots of `p` and `q` with the smaller multiplicity.
pub fn common_factor<T: Real>(p: &CPoly<T>, q: &CPoly<T>) -> Result<RootMultiset<T>> {
    match (p.is_zero(), q.is_zero()) {
        (true, true) => Err(Error::ZeroPolynomial),
        (true, false) => q.roots(),
        (false, true) => p.roots(),
        (false, false) => {
            let rp = p.roots()?;
            let rq = q.roots()?;
            let tol = RootOptions::<T>::default().cluster_tol;
            let mut out = Vec::new();
            for &(a, ma) in &rp.roots {
                if let Some(&(b, mb)) = rq
                    .roots
                    .iter()
                    .find(|(b, _)| (*b - a).norm() <= tol * T::one().max(a.norm()))
                {
                    let _ = b;
                    out.push((a, ma.min(mb)));
                }
            }
            Ok(RootMultiset { roots: out })
        }
    }
}
