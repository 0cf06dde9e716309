//! Bimoment tables, leading minors, monic biorthogonal polynomials and the
//! recurrences they satisfy.

use std::fmt::Write as _;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{determinant, solve, Determinant, Matrix};
use crate::poly::CPoly;
use crate::scalar::{Real, C};
use crate::serde_complex::{vec_from_wire, vec_to_wire, Pair};

/// Where a table entry came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Quadrature,
    Recurrence,
    Input,
}

/// Dense `(N+1) x (N+1)` table of bimoments `mu_{nm} = L(x^n | y^m)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BimomentTable<T: Real> {
    size: usize,
    entries: Vec<C<T>>,
    provenance: Vec<Provenance>,
    errors: Vec<T>,
}

impl<T: Real> BimomentTable<T> {
    pub fn from_fn(size: usize, prov: Provenance, f: impl Fn(usize, usize) -> C<T>) -> Self {
        let w = size + 1;
        let mut entries = Vec::with_capacity(w * w);
        for n in 0..w {
            for m in 0..w {
                entries.push(f(n, m));
            }
        }
        Self { size, entries, provenance: vec![prov; w * w], errors: vec![T::zero(); w * w] }
    }

    pub fn zeros(size: usize) -> Self {
        Self::from_fn(size, Provenance::Input, |_, _| C::zero())
    }

    pub fn identity(size: usize) -> Self {
        Self::from_fn(size, Provenance::Input, |n, m| if n == m { C::one() } else { C::zero() })
    }

    /// Largest index `N`; entries run over `0..=N` in both directions.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, n: usize, m: usize) -> C<T> {
        self.entries[n * (self.size + 1) + m]
    }

    pub fn set(&mut self, n: usize, m: usize, v: C<T>, prov: Provenance) {
        let k = n * (self.size + 1) + m;
        self.entries[k] = v;
        self.provenance[k] = prov;
    }

    pub fn provenance(&self, n: usize, m: usize) -> Provenance {
        self.provenance[n * (self.size + 1) + m]
    }

    pub fn error(&self, n: usize, m: usize) -> T {
        self.errors[n * (self.size + 1) + m]
    }

    pub fn set_error(&mut self, n: usize, m: usize, e: T) {
        self.errors[n * (self.size + 1) + m] = e;
    }

    pub fn entries(&self) -> &[C<T>] {
        &self.entries
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn max_abs(&self) -> T {
        self.entries.iter().fold(T::zero(), |a, z| a.max(z.norm()))
    }

    /// Sub-table of the leading `(n+1) x (n+1)` block.
    pub fn truncate(&self, n: usize) -> Self {
        let mut t = Self::from_fn(n, Provenance::Input, |i, j| self.get(i, j));
        for i in 0..=n {
            for j in 0..=n {
                let k = i * (n + 1) + j;
                t.provenance[k] = self.provenance(i, j);
                t.errors[k] = self.error(i, j);
            }
        }
        t
    }

    pub fn scaled(&self, c: C<T>) -> Self {
        let mut t = self.clone();
        for z in &mut t.entries {
            *z = *z * c;
        }
        t
    }

    /// The `n x n` leading block as a matrix.
    pub fn leading_block(&self, n: usize) -> Matrix<T> {
        Matrix::from_fn(n, n, |i, j| self.get(i, j))
    }

    /// CSV with header `n,m,re,im` and 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,m,re,im\n");
        for n in 0..=self.size {
            for m in 0..=self.size {
                let z = self.get(n, m);
                let _ = writeln!(
                    s,
                    "{n},{m},{:.16e},{:.16e}",
                    z.re.to_f64().unwrap(),
                    z.im.to_f64().unwrap()
                );
            }
        }
        s
    }

    /// Parse the CSV form of [`to_csv`](Self::to_csv). Lines starting with `#`
    /// and any columns after `im` are ignored.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rows: Vec<(usize, usize, C<T>)> = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with("n,") {
                continue;
            }
            let f: Vec<&str> = line.split(',').collect();
            if f.len() < 4 {
                return Err(Error::Invalid(format!("bad CSV row: {line}")));
            }
            let parse_u = |s: &str| s.trim().parse::<usize>().map_err(|e| Error::Invalid(e.to_string()));
            let parse_f = |s: &str| s.trim().parse::<f64>().map_err(|e| Error::Invalid(e.to_string()));
            rows.push((parse_u(f[0])?, parse_u(f[1])?, C::new(T::lit(parse_f(f[2])?), T::lit(parse_f(f[3])?))));
        }
        let size = rows.iter().map(|r| r.0.max(r.1)).max().ok_or_else(|| Error::Invalid("empty table".into()))?;
        if rows.len() != (size + 1) * (size + 1) {
            return Err(Error::Invalid("table is not fully populated".into()));
        }
        let mut t = Self::zeros(size);
        for (n, m, z) in rows {
            t.set(n, m, z, Provenance::Input);
        }
        Ok(t)
    }
}

/// Leading principal minor `Delta_n` (with `Delta_0 = 1`).
pub fn delta<T: Real>(table: &BimomentTable<T>, n: usize) -> Result<C<T>> {
    Ok(delta_full(table, n)?.value)
}

/// `Delta_n` with its log-magnitude and row scale.
pub fn delta_full<T: Real>(table: &BimomentTable<T>, n: usize) -> Result<Determinant<T>> {
    if n > table.size() + 1 {
        return Err(Error::OutOfRange { index: n, limit: table.size() + 1 });
    }
    Ok(determinant(&table.leading_block(n)))
}

/// `L(p | s) = sum_{i,j} p_i s_j mu_{ij}`.
pub fn pair_apply<T: Real>(table: &BimomentTable<T>, p: &CPoly<T>, s: &CPoly<T>) -> Result<C<T>> {
    let lim = table.size();
    for d in [p.degree(), s.degree()].into_iter().flatten() {
        if d > lim {
            return Err(Error::OutOfRange { index: d, limit: lim });
        }
    }
    let mut acc = C::zero();
    for (i, &pi) in p.coeffs().iter().enumerate() {
        if pi.is_zero() {
            continue;
        }
        let row = s.coeffs().iter().enumerate().fold(C::zero(), |a, (j, &sj)| a + sj * table.get(i, j));
        acc = acc + pi * row;
    }
    Ok(acc)
}

/// Monic biorthogonal pair `p_n(x), s_n(y)` with `L(p_n | s_m) = h_n delta_nm`.
#[derive(Clone, Debug, PartialEq)]
pub struct BopPair<T: Real> {
    pub p: Vec<CPoly<T>>,
    pub s: Vec<CPoly<T>>,
    pub h: Vec<C<T>>,
}

impl<T: Real> BopPair<T> {
    /// Highest degree present.
    pub fn degree(&self) -> usize {
        self.p.len() - 1
    }

    /// `max_{n != m} |L(p_n|s_m)| / |h_0|`.
    pub fn biorthogonality_residual(&self, table: &BimomentTable<T>) -> Result<T> {
        let mut worst = T::zero();
        let h0 = self.h[0].norm();
        for (n, p) in self.p.iter().enumerate() {
            for (m, s) in self.s.iter().enumerate() {
                if n != m {
                    worst = worst.max(pair_apply(table, p, s)?.norm() / h0);
                }
            }
        }
        Ok(worst)
    }
}

/// `|Delta_n| <= rel * prod(row norms)`.
pub fn minor_is_degenerate<T: Real>(d: &Determinant<T>, rel: T) -> bool {
    !(d.log_abs > rel.ln() + d.log_row_scale)
}

/// Monic BOPs up to degree `n_max` from the bordered-determinant conditions,
/// realized as linear solves for the non-leading coefficients.
///
/// `rel` is the degeneracy threshold on `|Delta_n|` relative to the product of
/// the row norms of the leading block (`1e-12` by default).
pub fn monic_bops_with<T: Real>(table: &BimomentTable<T>, n_max: usize, rel: T) -> Result<BopPair<T>> {
    if n_max > table.size() {
        return Err(Error::OutOfRange { index: n_max, limit: table.size() });
    }
    for n in 1..=n_max + 1 {
        if minor_is_degenerate(&delta_full(table, n)?, rel) {
            return Err(Error::DegenerateMinor(n));
        }
    }
    let mut p = vec![CPoly::one()];
    let mut s = vec![CPoly::one()];
    for n in 1..=n_max {
        // p_n: sum_{i<n} c_i mu_{ij} = -mu_{nj},  j < n
        let a_t = Matrix::from_fn(n, n, |j, i| table.get(i, j));
        let rhs: Vec<C<T>> = (0..n).map(|j| -table.get(n, j)).collect();
        let mut cp = solve(&a_t, &rhs).map_err(|_| Error::DegenerateMinor(n))?;
        cp.push(C::one());
        p.push(CPoly::new(cp));
        // s_n: sum_{j<n} d_j mu_{ij} = -mu_{in},  i < n
        let a = table.leading_block(n);
        let rhs: Vec<C<T>> = (0..n).map(|i| -table.get(i, n)).collect();
        let mut cs = solve(&a, &rhs).map_err(|_| Error::DegenerateMinor(n))?;
        cs.push(C::one());
        s.push(CPoly::new(cs));
    }
    let h = p
        .iter()
        .zip(&s)
        .map(|(pn, sn)| pair_apply(table, pn, sn))
        .collect::<Result<Vec<_>>>()?;
    Ok(BopPair { p, s, h })
}

pub fn monic_bops<T: Real>(table: &BimomentTable<T>, n_max: usize) -> Result<BopPair<T>> {
    monic_bops_with(table, n_max, T::tol(1e-12, 1.0))
}

/// Coefficients of the (generally full-band) recurrences
/// `x pi_n = gamma_n pi_{n+1} + sum_j a_j(n) pi_{n-j}` and
/// `y sigma_n = gamma~_n sigma_{n+1} + sum_j b_j(n) sigma_{n-j}`,
/// with `pi_0`, `sigma_0` the constant initial polynomials.
#[derive(Clone, Debug, PartialEq)]
pub struct RecurrenceSystem<T: Real> {
    pub gamma: Vec<C<T>>,
    pub gamma_t: Vec<C<T>>,
    /// `a[n][j]`, `0 <= j <= n`.
    pub a: Vec<Vec<C<T>>>,
    pub b: Vec<Vec<C<T>>>,
    pub pi0: C<T>,
    pub sigma0: C<T>,
}

/// Gauge-free content of a recurrence system: monic recurrence coefficients
/// and the diagonal pairings `h_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct MonicData<T: Real> {
    /// `x p_n = p_{n+1} + sum_j a[n][j] p_{n-j}`.
    pub a: Vec<Vec<C<T>>>,
    pub b: Vec<Vec<C<T>>>,
    /// `h[n] = L(p_n | s_n)`, one longer than `a`.
    pub h: Vec<C<T>>,
}

impl<T: Real> MonicData<T> {
    /// Monic polynomials `p_0..=p_n` and `s_0..=s_n`.
    pub fn polynomials(&self, n: usize) -> (Vec<CPoly<T>>, Vec<CPoly<T>>) {
        (grow(&self.a, n), grow(&self.b, n))
    }
}

fn grow<T: Real>(coef: &[Vec<C<T>>], n: usize) -> Vec<CPoly<T>> {
    let x = CPoly::monomial(C::one(), 1);
    let mut out = vec![CPoly::one()];
    for k in 0..n {
        let mut next = &x * &out[k];
        for (j, &c) in coef[k].iter().enumerate() {
            next = &next - &out[k - j].scale(c);
        }
        out.push(next);
    }
    out
}

impl<T: Real> RecurrenceSystem<T> {
    /// Number of recurrence steps stored.
    pub fn len(&self) -> usize {
        self.gamma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gamma.is_empty()
    }

    /// Pure shift `x pi_n = pi_{n+1}` of the given length.
    pub fn shift(len: usize) -> Self {
        Self {
            gamma: vec![C::one(); len],
            gamma_t: vec![C::one(); len],
            a: (0..len).map(|n| vec![C::zero(); n + 1]).collect(),
            b: (0..len).map(|n| vec![C::zero(); n + 1]).collect(),
            pi0: C::one(),
            sigma0: C::one(),
        }
    }

    pub fn check_shape(&self) -> Result<()> {
        let n = self.len();
        if self.gamma_t.len() != n || self.a.len() != n || self.b.len() != n {
            return Err(Error::Invalid("recurrence arrays have different lengths".into()));
        }
        for k in 0..n {
            if self.a[k].len() != k + 1 || self.b[k].len() != k + 1 {
                return Err(Error::Invalid(format!("row {k} of a/b must have {} entries", k + 1)));
            }
        }
        Ok(())
    }

    /// Monic coefficients and pairings determined by this system.
    ///
    /// With `G_n = prod_{k<n} gamma_k` the monic `p_n = pi_n G_n / pi_0`, so
    /// `a'_j(n) = a_j(n) prod_{k=n-j}^{n-1} gamma_k`. The pairings follow the
    /// leading-minor rule `Delta_{n+1} = (pi_0 sigma_0)^{-1} prod_{k<n} gamma_k gamma~_k`,
    /// i.e. `h_0 = 1/(pi_0 sigma_0)` and `h_n = gamma_{n-1} gamma~_{n-1}`.
    pub fn monic_data(&self) -> Result<MonicData<T>> {
        self.check_shape()?;
        for k in 0..self.len() {
            if self.gamma[k].is_zero() || self.gamma_t[k].is_zero() {
                return Err(Error::ZeroGamma(k));
            }
        }
        if self.pi0.is_zero() || self.sigma0.is_zero() {
            return Err(Error::Invalid("pi0 and sigma0 must be nonzero".into()));
        }
        let rescale = |coef: &[Vec<C<T>>], g: &[C<T>]| -> Vec<Vec<C<T>>> {
            coef.iter()
                .enumerate()
                .map(|(n, row)| {
                    row.iter()
                        .enumerate()
                        .map(|(j, &c)| (n - j..n).fold(c, |acc, k| acc * g[k]))
                        .collect()
                })
                .collect()
        };
        let mut h = vec![C::<T>::one() / (self.pi0 * self.sigma0)];
        h.extend((0..self.len()).map(|k| self.gamma[k] * self.gamma_t[k]));
        Ok(MonicData { a: rescale(&self.a, &self.gamma), b: rescale(&self.b, &self.gamma_t), h })
    }

    /// Canonical representative: `gamma = 1`, `pi_0 = 1`, `gamma~_n = h_{n+1}`,
    /// `sigma_0 = 1/h_0`.
    pub fn from_monic(md: &MonicData<T>) -> Self {
        let len = md.a.len();
        let gamma_t: Vec<C<T>> = (0..len).map(|n| md.h[n + 1]).collect();
        let b = md
            .b
            .iter()
            .enumerate()
            .map(|(n, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j, &c)| (n - j..n).fold(c, |acc, k| acc / gamma_t[k]))
                    .collect()
            })
            .collect();
        Self {
            gamma: vec![C::one(); len],
            gamma_t,
            a: md.a.clone(),
            b,
            pi0: C::one(),
            sigma0: C::<T>::one() / md.h[0],
        }
    }

    /// The canonical representative of this system's equivalence class.
    pub fn canonical(&self) -> Result<Self> {
        Ok(Self::from_monic(&self.monic_data()?))
    }

    /// Largest entrywise difference to another system of the same length.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        let mut d = (self.pi0 - other.pi0).norm().max((self.sigma0 - other.sigma0).norm());
        for k in 0..self.len().min(other.len()) {
            d = d.max((self.gamma[k] - other.gamma[k]).norm());
            d = d.max((self.gamma_t[k] - other.gamma_t[k]).norm());
            for j in 0..=k {
                d = d.max((self.a[k][j] - other.a[k][j]).norm());
                d = d.max((self.b[k][j] - other.b[k][j]).norm());
            }
        }
        d
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&RecurrenceWire::from_system(self)).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let w: RecurrenceWire = serde_json::from_str(text).map_err(|e| Error::Invalid(e.to_string()))?;
        let sys = w.into_system();
        sys.check_shape()?;
        Ok(sys)
    }
}

#[derive(Serialize, Deserialize)]
struct RecurrenceWire {
    gamma: Vec<Pair>,
    gamma_t: Vec<Pair>,
    a: Vec<Vec<Pair>>,
    b: Vec<Vec<Pair>>,
    pi0: Pair,
    sigma0: Pair,
}

impl RecurrenceWire {
    fn from_system<T: Real>(s: &RecurrenceSystem<T>) -> Self {
        Self {
            gamma: vec_to_wire(&s.gamma),
            gamma_t: vec_to_wire(&s.gamma_t),
            a: s.a.iter().map(|r| vec_to_wire(r)).collect(),
            b: s.b.iter().map(|r| vec_to_wire(r)).collect(),
            pi0: Pair::from_c(s.pi0),
            sigma0: Pair::from_c(s.sigma0),
        }
    }

    fn into_system<T: Real>(self) -> RecurrenceSystem<T> {
        RecurrenceSystem {
            gamma: vec_from_wire(&self.gamma),
            gamma_t: vec_from_wire(&self.gamma_t),
            a: self.a.iter().map(|r| vec_from_wire(r)).collect(),
            b: self.b.iter().map(|r| vec_from_wire(r)).collect(),
            pi0: self.pi0.to_c(),
            sigma0: self.sigma0.to_c(),
        }
    }
}

/// Recover the recurrence coefficients of a table's monic BOPs, returned in
/// the canonical gauge (`gamma_n = 1`).
///
/// `a'_j(n) = L(x p_n | s_{n-j}) / h_{n-j}` and `b'_j(n) = L(p_{n-j} | y s_n) / h_{n-j}`
/// for every `n` with `n + 1 <= min(table.size, bops.degree)`.
pub fn extract_recurrence<T: Real>(table: &BimomentTable<T>, bops: &BopPair<T>) -> Result<RecurrenceSystem<T>> {
    let top = bops.degree().min(table.size());
    if top == 0 {
        return Err(Error::OutOfRange { index: 1, limit: 0 });
    }
    let x = CPoly::monomial(C::one(), 1);
    for (n, h) in bops.h.iter().enumerate().take(top + 1) {
        if h.is_zero() {
            return Err(Error::DegenerateMinor(n + 1));
        }
    }
    let mut a = Vec::with_capacity(top);
    let mut b = Vec::with_capacity(top);
    for n in 0..top {
        let xp = &x * &bops.p[n];
        let ys = &x * &bops.s[n];
        let mut ra = Vec::with_capacity(n + 1);
        let mut rb = Vec::with_capacity(n + 1);
        for j in 0..=n {
            let k = n - j;
            ra.push(pair_apply(table, &xp, &bops.s[k])? / bops.h[k]);
            rb.push(pair_apply(table, &bops.p[k], &ys)? / bops.h[k]);
        }
        a.push(ra);
        b.push(rb);
    }
    let md = MonicData { a, b, h: bops.h[..=top].to_vec() };
    Ok(RecurrenceSystem::from_monic(&md))
}
