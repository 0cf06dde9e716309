//! Reconstruction of a bimoment table from recurrence coefficients.

use num_traits::{One, Zero};

use crate::bimoment::{pair_apply, BimomentTable, Provenance, RecurrenceSystem};
use crate::error::{Error, Result};
use crate::poly::CPoly;
use crate::scalar::{Real, C};

/// Inverse of the unit lower-triangular matrix whose row `n` holds the
/// coefficients of the monic polynomial `q_n`.
fn unit_lower_inverse<T: Real>(q: &[CPoly<T>]) -> Vec<Vec<C<T>>> {
    let n = q.len();
    let mut inv = vec![vec![C::<T>::zero(); n]; n];
    for col in 0..n {
        inv[col][col] = C::one();
        for row in col + 1..n {
            let mut acc = C::<T>::zero();
            for k in col..row {
                acc = acc + q[row].coeff(k) * inv[k][col];
            }
            inv[row][col] = -acc;
        }
    }
    inv
}

/// The `(N+1) x (N+1)` table whose monic biorthogonal polynomials obey the
/// first `N` steps of `rec`.
///
/// With `P`, `S` the unit lower-triangular coefficient matrices of the monic
/// families and `H = diag(h_n)`, the table is `P^{-1} H S^{-T}`.
pub fn favard_reconstruct<T: Real>(rec: &RecurrenceSystem<T>, n: usize) -> Result<BimomentTable<T>> {
    if n > rec.len() {
        return Err(Error::OutOfRange { index: n, limit: rec.len() });
    }
    let md = rec.monic_data()?;
    let (p, s) = md.polynomials(n);
    let pinv = unit_lower_inverse(&p);
    let sinv = unit_lower_inverse(&s);
    Ok(BimomentTable::from_fn(n, Provenance::Recurrence, |i, j| {
        (0..=i.min(j)).fold(C::zero(), |acc, k| acc + pinv[i][k] * md.h[k] * sinv[j][k])
    }))
}

/// `max_{n,m <= N} |L(p_n | s_m) / h_m - delta_nm|` for the monic families
/// generated by `rec` and paired against `table`, with
/// `N = min(rec.len(), table.size())`.
pub fn favard_verify<T: Real>(rec: &RecurrenceSystem<T>, table: &BimomentTable<T>) -> Result<T> {
    let md = rec.monic_data()?;
    let n = rec.len().min(table.size());
    let (p, s) = md.polynomials(n);
    let mut worst = T::zero();
    for (i, pi) in p.iter().enumerate() {
        for (j, sj) in s.iter().enumerate() {
            let v = pair_apply(table, pi, sj)? / md.h[j];
            let target = if i == j { C::one() } else { C::zero() };
            worst = worst.max((v - target).norm());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bimoment::{delta, extract_recurrence, monic_bops};
    use crate::scalar::c;

    #[test]
    fn shift_gives_identity() {
        let t = favard_reconstruct(&RecurrenceSystem::<f64>::shift(4), 4).unwrap();
        assert_eq!(t, BimomentTable::from_fn(4, Provenance::Recurrence, |i, j| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) }));
    }

    #[test]
    fn scaled_gamma_scales_diagonal() {
        let mut r = RecurrenceSystem::<f64>::shift(1);
        r.gamma[0] = c(2.0, 0.0);
        let t = favard_reconstruct(&r, 1).unwrap();
        assert!((t.get(1, 1) - c(2.0, 0.0)).norm() < 1e-15);
        assert!((t.get(0, 0) - c(1.0, 0.0)).norm() < 1e-15);
        assert!(t.get(0, 1).norm() < 1e-15 && t.get(1, 0).norm() < 1e-15);
    }

    #[test]
    fn reconstruction_is_deterministic() {
        let mut r = RecurrenceSystem::<f64>::shift(3);
        r.a[2][2] = c(0.4, -0.3);
        assert_eq!(favard_reconstruct(&r, 3).unwrap().entries(), favard_reconstruct(&r, 3).unwrap().entries());
        assert!(favard_verify(&RecurrenceSystem::<f64>::shift(3), &BimomentTable::identity(3)).unwrap() < 1e-14);
    }

    #[test]
    fn zero_gamma_is_rejected() {
        let mut r = RecurrenceSystem::<f64>::shift(3);
        r.gamma_t[1] = c(0.0, 0.0);
        assert_eq!(favard_reconstruct(&r, 3), Err(Error::ZeroGamma(1)));
    }

    #[test]
    fn round_trip_with_band() {
        let mut r = RecurrenceSystem::<f64>::shift(4);
        for n in 0..4 {
            r.gamma[n] = c(1.0 + 0.1 * n as f64, 0.2);
            r.gamma_t[n] = c(0.7, -0.1 * n as f64);
            for j in 0..=n {
                r.a[n][j] = c(0.3 / (j + 1) as f64, 0.1);
                r.b[n][j] = c(-0.2, 0.05 * j as f64);
            }
        }
        r.pi0 = c(2.0, 0.0);
        r.sigma0 = c(0.5, 0.5);
        let t = favard_reconstruct(&r, 4).unwrap();
        assert!(favard_verify(&r, &t).unwrap() < 1e-12);
        let mut bad = t.clone();
        bad.set(2, 1, t.get(2, 1) + c(1e-3, 0.0), Provenance::Input);
        assert!(favard_verify(&r, &bad).unwrap() >= 1e-4);
        let back = extract_recurrence(&t, &monic_bops(&t, 4).unwrap()).unwrap();
        assert!(back.max_abs_diff(&r.canonical().unwrap()) < 1e-11);
        // leading minors
        let mut prod = c::<f64>(1.0, 0.0) / (r.pi0 * r.sigma0);
        for n in 1..=5 {
            if n >= 2 {
                prod = prod * r.gamma[n - 2] * r.gamma_t[n - 2];
            }
            let d = delta(&t, n).unwrap();
            assert!((d - prod).norm() < 1e-12 * prod.norm(), "n={n}");
        }
    }
}
