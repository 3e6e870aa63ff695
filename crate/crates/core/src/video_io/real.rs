use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// An f64 carried through JSON as a decimal string. Rust's shortest
/// round-trip formatting is platform-independent, which keeps manifests
/// byte-stable; parsing the string restores the exact bit pattern.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Real(pub f64);

impl Real {
    pub fn get(self) -> f64 {
        self.0
    }
}

impl From<f64> for Real {
    fn from(v: f64) -> Self {
        Real(v)
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse::<f64>()
            .map(Real)
            .map_err(|e| serde::de::Error::custom(format!("bad decimal {s:?}: {e}")))
    }
}

/// serde adapter: an f64 field stored as a decimal string.
pub mod real_f64 {
    use super::Real;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        Real(*v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Real::deserialize(d)?.0)
    }
}

/// serde adapter: Vec<Point2> stored as [x, y] decimal-string pairs.
pub mod real_points {
    use super::Real;
    use crate::geom::Point2;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Point2], s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<[Real; 2]> = v.iter().map(|p| [Real(p.x), Real(p.y)]).collect();
        pairs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Point2>, D::Error> {
        let pairs: Vec<[Real; 2]> = Vec::deserialize(d)?;
        Ok(pairs.iter().map(|[x, y]| Point2::new(x.0, y.0)).collect())
    }
}
