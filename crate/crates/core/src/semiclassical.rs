//! Semiclassical data `(A1, B1, A2, B2)`: validation, bi-class, the moment
//! recurrences, their propagation from a seed block, and the reductions.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::bimoment::{BimomentTable, Provenance};
use crate::error::{Error, Result};
use crate::linalg::{least_squares, Matrix};
use crate::poly::{common_factor, CPoly};
use crate::scalar::{cr, Real, C};
use crate::serde_complex::{poly_from_wire, poly_to_wire, Pair};

/// Degree configuration of the two pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BbCase {
    /// `a_i >= b_i + 2` for both pairs.
    BB1,
    /// Exactly one pair has `a_i = b_i + 1`.
    BB2,
    /// `a_i = b_i + 1` for both pairs.
    BB3,
}

/// Validated semiclassical data.
///
/// Degrees follow `deg A_i = a_i + 1`, `deg B_i = b_i + 1`, so a constant
/// `B_i` has `b_i = -1`.
#[derive(Clone, Debug, PartialEq)]
pub struct SemiclassicalSpec<T: Real> {
    a_poly: [CPoly<T>; 2],
    b_poly: [CPoly<T>; 2],
    a: [usize; 2],
    b: [isize; 2],
    case: BbCase,
    /// Leading-coefficient determinant, present in case BB3.
    determinant: Option<C<T>>,
    /// `(which, root)` for each pair `A_i, B_i` sharing a single root.
    reducible: Vec<(usize, C<T>)>,
}

impl<T: Real> SemiclassicalSpec<T> {
    pub fn a1(&self) -> &CPoly<T> {
        &self.a_poly[0]
    }
    pub fn b1(&self) -> &CPoly<T> {
        &self.b_poly[0]
    }
    pub fn a2(&self) -> &CPoly<T> {
        &self.a_poly[1]
    }
    pub fn b2(&self) -> &CPoly<T> {
        &self.b_poly[1]
    }

    /// `(A_i, B_i)` for `i` in `{1, 2}`.
    pub fn pair(&self, i: usize) -> (&CPoly<T>, &CPoly<T>) {
        (&self.a_poly[i - 1], &self.b_poly[i - 1])
    }

    /// `(a_1, a_2)`.
    pub fn a_degrees(&self) -> [usize; 2] {
        self.a
    }

    /// `(b_1, b_2)`.
    pub fn b_degrees(&self) -> [isize; 2] {
        self.b
    }

    /// Bi-class `(s_1, s_2)`, `s_i = max(a_i, b_i) + 1`.
    pub fn bi_class(&self) -> (usize, usize) {
        let s = |i: usize| (self.a[i] as isize).max(self.b[i]) as usize + 1;
        (s(0), s(1))
    }

    /// Dimension `M = s_1 s_2` of the solution space of the recurrences.
    pub fn dimension(&self) -> usize {
        let (s1, s2) = self.bi_class();
        s1 * s2
    }

    /// Shape `(a_1 + 1, a_2 + 1)` of the seed block.
    pub fn seed_shape(&self) -> (usize, usize) {
        (self.a[0] + 1, self.a[1] + 1)
    }

    pub fn case(&self) -> BbCase {
        self.case
    }

    pub fn determinant(&self) -> Option<C<T>> {
        self.determinant
    }

    pub fn reducible(&self) -> &[(usize, C<T>)] {
        &self.reducible
    }

    pub fn is_reducible(&self) -> bool {
        !self.reducible.is_empty()
    }

    /// Terms `(p, q, coeff)` of one recurrence instance, written as
    /// `sum coeff * mu_{pq} = 0`.
    ///
    /// `which = 1`: `sum b1_j mu_{n+j,m+1} + n sum b1_j mu_{n-1+j,m} - sum a1_j mu_{n+j,m}`;
    /// `which = 2` is the same with the roles of the indices exchanged.
    pub fn recurrence_terms(&self, which: usize, n: usize, m: usize) -> Vec<(usize, usize, C<T>)> {
        let (a, b) = self.pair(which);
        let (own, other) = if which == 1 { (n, m) } else { (m, n) };
        let mut terms: Vec<(usize, usize, C<T>)> = Vec::new();
        let f = cr(T::from_usize(own).unwrap());
        for (j, &bj) in b.coeffs().iter().enumerate() {
            if bj.is_zero() {
                continue;
            }
            terms.push((own + j, other + 1, bj));
            if own > 0 {
                terms.push((own - 1 + j, other, bj * f));
            }
        }
        for (j, &aj) in a.coeffs().iter().enumerate() {
            if !aj.is_zero() {
                terms.push((own + j, other, -aj));
            }
        }
        if which == 2 {
            for t in &mut terms {
                std::mem::swap(&mut t.0, &mut t.1);
            }
        }
        terms
    }

    /// Highest antidiagonal `p + q` touched by instance `(which, n, m)`.
    fn instance_level(&self, which: usize, n: usize, m: usize) -> usize {
        n + m + self.a[which - 1] + 1
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&SpecWire {
            a1: poly_to_wire(self.a1()),
            b1: poly_to_wire(self.b1()),
            a2: poly_to_wire(self.a2()),
            b2: poly_to_wire(self.b2()),
        })
        .expect("serializable")
    }

    /// Parse and validate the JSON form `{"A1": [[re, im], ...], "B1": ..., "A2": ..., "B2": ...}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let w: SpecWire = serde_json::from_str(text).map_err(|e| Error::Invalid(e.to_string()))?;
        validate_spec(&poly_from_wire(&w.a1), &poly_from_wire(&w.b1), &poly_from_wire(&w.a2), &poly_from_wire(&w.b2))
    }
}

#[derive(Serialize, Deserialize)]
pub(crate) struct SpecWire {
    #[serde(rename = "A1")]
    pub a1: Vec<Pair>,
    #[serde(rename = "B1")]
    pub b1: Vec<Pair>,
    #[serde(rename = "A2")]
    pub a2: Vec<Pair>,
    #[serde(rename = "B2")]
    pub b2: Vec<Pair>,
}

/// Check the degree assumptions, classify the case, evaluate the BB3
/// determinant and look for shared roots of `A_i`, `B_i`.
pub fn validate_spec<T: Real>(a1: &CPoly<T>, b1: &CPoly<T>, a2: &CPoly<T>, b2: &CPoly<T>) -> Result<SemiclassicalSpec<T>> {
    let mut a = [0usize; 2];
    let mut b = [0isize; 2];
    for (i, (ap, bp)) in [(a1, b1), (a2, b2)].into_iter().enumerate() {
        let db = bp.degree().ok_or(Error::ZeroB)? as isize;
        let da = ap.degree().ok_or(Error::AssumptionAViolated { which: i + 1 })? as isize;
        if db + 1 > da {
            return Err(Error::AssumptionAViolated { which: i + 1 });
        }
        a[i] = (da - 1) as usize;
        b[i] = db - 1;
    }
    let tight = |i: usize| a[i] as isize == b[i] + 1;
    let case = match (tight(0), tight(1)) {
        (true, true) => BbCase::BB3,
        (false, false) => BbCase::BB1,
        _ => BbCase::BB2,
    };
    let determinant = if case == BbCase::BB3 {
        let d = a1.leading() * a2.leading() - b1.leading() * b2.leading();
        let scale = (a1.leading() * a2.leading()).norm() + (b1.leading() * b2.leading()).norm();
        if d.norm() <= T::tol(1e-12, 1.0) * scale {
            return Err(Error::DegenerateQuadratic);
        }
        Some(d)
    } else {
        None
    };
    let mut reducible = Vec::new();
    for (i, (ap, bp)) in [(a1, b1), (a2, b2)].into_iter().enumerate() {
        if bp.degree() == Some(0) {
            continue;
        }
        let shared = common_factor(ap, bp)?;
        match shared.len() {
            0 => {}
            1 => reducible.push((i + 1, shared.roots[0].0)),
            _ => return Err(Error::AssumptionBViolated { which: i + 1 }),
        }
    }
    Ok(SemiclassicalSpec {
        a_poly: [a1.clone(), a2.clone()],
        b_poly: [b1.clone(), b2.clone()],
        a,
        b,
        case,
        determinant,
        reducible,
    })
}

/// Largest relative residual `|sum c mu| / sum |c mu|` over every recurrence
/// instance whose entries all lie inside the table. Instances made of
/// rounding-level entries are measured against `64 eps sum|c| max|mu|` instead.
pub fn recurrence_residual<T: Real>(spec: &SemiclassicalSpec<T>, table: &BimomentTable<T>) -> T {
    let n_max = table.size();
    let floor = T::epsilon() * T::lit(64.0) * table.max_abs();
    let mut worst = T::zero();
    for which in 1..=2 {
        for n in 0..=n_max {
            for m in 0..=n_max {
                let terms = spec.recurrence_terms(which, n, m);
                if terms.iter().any(|t| t.0 > n_max || t.1 > n_max) {
                    continue;
                }
                let (sum, mag, weight) = terms.iter().fold((C::<T>::zero(), T::zero(), T::zero()), |(s, g, w), &(p, q, c)| {
                    let v = c * table.get(p, q);
                    (s + v, g + v.norm(), w + c.norm())
                });
                let mag = mag.max(floor * weight);
                if mag > T::zero() {
                    worst = worst.max(sum.norm() / mag);
                }
            }
        }
    }
    worst
}

/// Extend a seed block `mu_{nm}`, `n <= a1`, `m <= a2`, to a table of size `n_max`
/// by solving the recurrences jointly one antidiagonal at a time.
///
/// Every instance is assigned to the highest antidiagonal it touches; the
/// non-seed entries of that antidiagonal are the unknowns. Overdetermined
/// frontiers are solved in the least-squares sense and must be consistent
/// to relative `tol` per instance.
pub fn propagate_moments_with<T: Real>(
    spec: &SemiclassicalSpec<T>,
    seed: &[Vec<C<T>>],
    n_max: usize,
    tol: T,
) -> Result<BimomentTable<T>> {
    let (r0, c0) = spec.seed_shape();
    let got = (seed.len(), seed.first().map_or(0, |r| r.len()));
    if got != (r0, c0) || seed.iter().any(|r| r.len() != c0) {
        return Err(Error::SeedShape { got, expected: (r0, c0) });
    }
    let top = (2 * n_max).max(r0 + c0 - 2);
    let w = top + 1;
    let mut mu: Vec<Option<C<T>>> = vec![None; w * w];
    for (i, row) in seed.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            mu[i * w + j] = Some(v);
        }
    }
    let is_seed = |p: usize, q: usize| p < r0 && q < c0;
    let rank_tol = T::tol(1e-10, 1.0);

    for k in 0..=top {
        let unknowns: Vec<(usize, usize)> = (0..=k).map(|p| (p, k - p)).filter(|&(p, q)| !is_seed(p, q)).collect();
        let mut instances = Vec::new();
        for which in 1..=2 {
            let base = spec.instance_level(which, 0, 0);
            if k < base {
                continue;
            }
            let s = k - base;
            for n in 0..=s {
                instances.push(spec.recurrence_terms(which, n, s - n));
            }
        }
        if unknowns.is_empty() && instances.is_empty() {
            continue;
        }
        if instances.len() < unknowns.len() {
            return Err(Error::SingularFrontier(k));
        }
        let col = |p: usize, q: usize| unknowns.iter().position(|&u| u == (p, q));
        let mut mat = Matrix::zeros(instances.len(), unknowns.len());
        let mut rhs = vec![C::zero(); instances.len()];
        for (r, terms) in instances.iter().enumerate() {
            for &(p, q, c) in terms {
                match col(p, q) {
                    Some(j) => mat[(r, j)] = mat[(r, j)] + c,
                    None => {
                        let v = mu[p * w + q].expect("lower antidiagonals are filled");
                        rhs[r] = rhs[r] - c * v;
                    }
                }
            }
        }
        let x = if unknowns.is_empty() {
            Vec::new()
        } else {
            least_squares(&mat, &rhs, rank_tol).map_err(|_| Error::SingularFrontier(k))?.x
        };
        for (&(p, q), &v) in unknowns.iter().zip(&x) {
            mu[p * w + q] = Some(v);
        }
        // per-instance consistency
        let mut worst = T::zero();
        for terms in &instances {
            let (sum, mag) = terms.iter().fold((C::<T>::zero(), T::zero()), |(s, g), &(p, q, c)| {
                let v = c * mu[p * w + q].unwrap();
                (s + v, g + v.norm())
            });
            if mag > T::zero() {
                worst = worst.max(sum.norm() / mag);
            }
        }
        if !(worst <= tol) {
            return Err(Error::InconsistentSeed { antidiagonal: k, residual: worst.to_f64().unwrap_or(f64::NAN) });
        }
    }

    let mut table = BimomentTable::from_fn(n_max, Provenance::Recurrence, |p, q| mu[p * w + q].unwrap());
    for p in 0..=n_max.min(r0 - 1) {
        for q in 0..=n_max.min(c0 - 1) {
            table.set(p, q, table.get(p, q), Provenance::Input);
        }
    }
    Ok(table)
}

/// [`propagate_moments_with`] at relative tolerance `1e-8` (scaled for `T`).
pub fn propagate_moments<T: Real>(spec: &SemiclassicalSpec<T>, seed: &[Vec<C<T>>], n_max: usize) -> Result<BimomentTable<T>> {
    propagate_moments_with(spec, seed, n_max, T::tol(1e-8, 0.5))
}

fn near_zero<T: Real>(z: C<T>, scale: T) -> bool {
    z.norm() <= T::tol(1e-13, 1.0) * scale.max(T::one())
}

/// Data `(A, B) = (A1 - x B1 / a, B1)` of the marginal functional `L(. | 1)`
/// when `A2 = a y` and `B2 = 1`.
pub fn reduce_to_linear<T: Real>(spec: &SemiclassicalSpec<T>) -> Result<(CPoly<T>, CPoly<T>)> {
    let (a2, b2) = (spec.a2(), spec.b2());
    if a2.degree() != Some(1) || b2.degree() != Some(0) {
        return Err(Error::NotReducible);
    }
    let a = a2.coeff(1);
    if !near_zero(a2.coeff(0), a.norm()) || !near_zero(b2.coeff(0) - C::one(), T::one()) {
        return Err(Error::NotReducible);
    }
    let x_over_a = CPoly::monomial(C::<T>::one() / a, 1);
    let reduced = spec.a1() - &(&x_over_a * spec.b1());
    Ok((reduced, spec.b1().clone()))
}

/// Result of removing a shared root from `(A, B)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CommonFactorReduction<T: Real> {
    pub a: CPoly<T>,
    pub b: CPoly<T>,
    /// `min(l, r)` for `A = (x-c)^l A~`, `B = (x-c)^r B~`.
    pub k: usize,
    pub c: C<T>,
    pub l: usize,
    pub r: usize,
    /// Number of delta-supported solutions (per partner solution) to recover.
    pub delta_count: usize,
}

/// Rewrite `(A, B)` sharing the single root `c` so that at most one factor
/// `(x - c)` remains in common.
///
/// With `A = (x-c)^l A~`, `B = (x-c)^r B~`:
/// if `l >= r - 1`, `A_ = (x-c)^{l-r+1} A~ + (r-1) B~`, `B_ = (x-c) B~`;
/// otherwise `A_ = A~ + l (x-c)^{r-1-l} B~`, `B_ = (x-c)^{r-l} B~`.
pub fn reduce_common_factor<T: Real>(a: &CPoly<T>, b: &CPoly<T>) -> Result<CommonFactorReduction<T>> {
    let shared = common_factor(a, b)?;
    let c = match shared.len() {
        0 => return Err(Error::NoCommonFactor),
        1 => shared.roots[0].0,
        _ => return Err(Error::MultipleSharedRoots),
    };
    let tol = T::tol(1e-6, 0.5);
    let l = a.roots()?.multiplicity_near(c, tol).unwrap_or(0);
    let r = b.roots()?.multiplicity_near(c, tol).unwrap_or(0);
    if l == 0 || r == 0 {
        return Err(Error::NoCommonFactor);
    }
    let at = a.deflate(c, l);
    let bt = b.deflate(c, r);
    let lin = CPoly::linear(c);
    let k = l.min(r);
    let (na, nb, delta_count) = if l + 1 >= r {
        let na = &(&lin.pow(l + 1 - r) * &at) + &bt.scale(cr(T::from_usize(r - 1).unwrap()));
        let count = if l + 1 == r { k } else { k - 1 };
        (na, &lin * &bt, count)
    } else {
        let na = &at + &(&lin.pow(r - 1 - l) * &bt).scale(cr(T::from_usize(l).unwrap()));
        (na, &lin.pow(r - l) * &bt, k)
    };
    Ok(CommonFactorReduction { a: na, b: nb, k, c, l, r, delta_count })
}

/// Bimoments of the delta-supported solution
/// `F(z, w) = e^{cz} * int (y + z)^j e^{y (w + c)} W2(y) dy`:
/// `mu_{nm} = sum_i C(n, i) c^{n-i} j!/(j-i)! Y_{m+j-i}`,
/// where `Y_k = int y^k e^{c y} W2(y) dy` are supplied by the caller.
pub fn delta_table<T: Real>(c: C<T>, j: usize, y_moments: &[C<T>], n_max: usize) -> Result<BimomentTable<T>> {
    if y_moments.len() < n_max + j + 1 {
        return Err(Error::OutOfRange { index: n_max + j, limit: y_moments.len().saturating_sub(1) });
    }
    let binom = |n: usize, i: usize| (0..i).fold(T::one(), |acc, t| acc * T::from_usize(n - t).unwrap() / T::from_usize(t + 1).unwrap());
    let falling = |j: usize, i: usize| (0..i).fold(T::one(), |acc, t| acc * T::from_usize(j - t).unwrap());
    Ok(BimomentTable::from_fn(n_max, Provenance::Quadrature, |n, m| {
        (0..=n.min(j)).fold(C::zero(), |acc, i| {
            acc + c.powi((n - i) as i32) * cr(binom(n, i) * falling(j, i)) * y_moments[m + j - i]
        })
    }))
}
