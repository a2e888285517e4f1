//! JSON has no infinities; they are written as the strings `"inf"` / `"-inf"`.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Num {
    F(f64),
    S(String),
}

impl Num {
    fn of(v: f64) -> Num {
        if v.is_finite() {
            Num::F(v)
        } else if v.is_nan() {
            Num::S("nan".into())
        } else if v > 0.0 {
            Num::S("inf".into())
        } else {
            Num::S("-inf".into())
        }
    }

    fn value<E: serde::de::Error>(self) -> Result<f64, E> {
        match self {
            Num::F(v) => Ok(v),
            Num::S(s) => match s.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                _ => Err(E::custom(format!("expected a number or \"inf\", got {s:?}"))),
            },
        }
    }
}

pub mod f64_or_inf {
    use super::*;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        Num::of(*v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Num::deserialize(d)?.value()
    }
}

pub mod f64_pair_or_inf {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[f64; 2], s: S) -> Result<S::Ok, S::Error> {
        [Num::of(v[0]), Num::of(v[1])].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[f64; 2], D::Error> {
        let [a, b] = <[Num; 2]>::deserialize(d)?;
        Ok([a.value()?, b.value()?])
    }
}

pub mod complex_pair {
    use super::*;
    use num_complex::Complex64;

    pub fn serialize<S: Serializer>(z: &[Complex64; 2], s: S) -> Result<S::Ok, S::Error> {
        [[z[0].re, z[0].im], [z[1].re, z[1].im]].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[Complex64; 2], D::Error> {
        let v = <[[f64; 2]; 2]>::deserialize(d)?;
        Ok([Complex64::new(v[0][0], v[0][1]), Complex64::new(v[1][0], v[1][1])])
    }
}
