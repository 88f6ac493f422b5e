//! Serialization of complex 3-vectors as six reals `[re0, im0, re1, im1, re2, im2]`.

use nalgebra::Vector3;
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::ambient::C3;

pub fn to_reals(v: &C3) -> [f64; 6] {
    [v[0].re, v[0].im, v[1].re, v[1].im, v[2].re, v[2].im]
}

pub fn from_reals(r: &[f64; 6]) -> C3 {
    Vector3::new(
        Complex64::new(r[0], r[1]),
        Complex64::new(r[2], r[3]),
        Complex64::new(r[4], r[5]),
    )
}

pub fn serialize<S: Serializer>(v: &C3, s: S) -> Result<S::Ok, S::Error> {
    to_reals(v).serialize(s)
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<C3, D::Error> {
    let r = <[f64; 6]>::deserialize(d)?;
    Ok(from_reals(&r))
}

/// Same encoding for fixed-size arrays of vectors.
pub mod array2 {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[C3; 2], s: S) -> Result<S::Ok, S::Error> {
        [to_reals(&v[0]), to_reals(&v[1])].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[C3; 2], D::Error> {
        let r = <[[f64; 6]; 2]>::deserialize(d)?;
        Ok([from_reals(&r[0]), from_reals(&r[1])])
    }
}
