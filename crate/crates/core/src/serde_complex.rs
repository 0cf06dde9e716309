//! JSON wire forms: complex numbers as `[re, im]` pairs.

use serde::{Deserialize, Serialize};

use crate::poly::CPoly;
use crate::scalar::{Real, C};

/// A complex number on the wire.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pair(pub f64, pub f64);

impl Pair {
    pub fn from_c<T: Real>(z: C<T>) -> Self {
        Pair(z.re.to_f64().unwrap(), z.im.to_f64().unwrap())
    }

    pub fn to_c<T: Real>(self) -> C<T> {
        C::new(T::lit(self.0), T::lit(self.1))
    }
}

pub fn poly_to_wire<T: Real>(p: &CPoly<T>) -> Vec<Pair> {
    p.coeffs().iter().map(|&z| Pair::from_c(z)).collect()
}

pub fn poly_from_wire<T: Real>(v: &[Pair]) -> CPoly<T> {
    CPoly::new(v.iter().map(|p| p.to_c()).collect())
}

pub fn vec_to_wire<T: Real>(v: &[C<T>]) -> Vec<Pair> {
    v.iter().map(|&z| Pair::from_c(z)).collect()
}

pub fn vec_from_wire<T: Real>(v: &[Pair]) -> Vec<C<T>> {
    v.iter().map(|p| p.to_c()).collect()
}
