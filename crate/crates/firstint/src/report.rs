//! JSON report schema and serialization helpers.

use num_complex::Complex64 as C64;
use serde::ser::{SerializeSeq, Serializer};

pub const SCHEMA_VERSION: u32 = 1;

pub fn c64_pair(z: C64) -> [f64; 2] {
    [clean(z.re), clean(z.im)]
}

// keep -0.0 out of reports
fn clean(v: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v
    }
}

pub fn ser_c64<S: Serializer>(z: &C64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_some(&c64_pair(*z))
}

pub fn ser_cvec<S: Serializer>(v: &[C64], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for z in v {
        seq.serialize_element(&c64_pair(*z))?;
    }
    seq.end()
}

pub fn cvec_pairs(v: &[C64]) -> Vec<[f64; 2]> {
    v.iter().map(|z| c64_pair(*z)).collect()
}

pub fn ser_chains<S: Serializer>(v: &[Vec<Vec<Vec<C64>>>], s: S) -> Result<S::Ok, S::Error> {
    let conv: Vec<Vec<Vec<Vec<[f64; 2]>>>> =
        v.iter().map(|cs| cs.iter().map(|ch| ch.iter().map(|x| cvec_pairs(x)).collect()).collect()).collect();
    s.serialize_some(&conv)
}
