use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{invalid, Error, Result};
use crate::models::PointSet;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq)]
enum Kind {
    L1,
    L2,
    Max,
    Integer(i32),
    Real(f64),
}

/// An `l^q` norm with `q ∈ [1, ∞]`.
///
/// Distances are compared through a monotone "key" (`Σ|x_k|^q`, or the max for
/// `q = ∞`) so every algorithm takes the root at the very end and identical
/// inputs produce identical values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormSpec {
    q: f64,
    kind: Kind,
}

impl Default for NormSpec {
    fn default() -> Self {
        Self::euclidean()
    }
}

impl NormSpec {
    pub fn new(q: f64) -> Result<Self> {
        if q.is_nan() || q < 1.0 {
            return Err(invalid(format!("norm exponent must satisfy q >= 1, got {q}")));
        }
        let kind = if q == 1.0 {
            Kind::L1
        } else if q == 2.0 {
            Kind::L2
        } else if q.is_infinite() {
            Kind::Max
        } else if q.fract() == 0.0 && q <= 64.0 {
            Kind::Integer(q as i32)
        } else {
            Kind::Real(q)
        };
        Ok(Self { q, kind })
    }

    pub fn euclidean() -> Self {
        Self { q: 2.0, kind: Kind::L2 }
    }

    pub fn max_norm() -> Self {
        Self { q: f64::INFINITY, kind: Kind::Max }
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn is_euclidean(&self) -> bool {
        self.kind == Kind::L2
    }

    /// Monotone transform of the norm of `x`.
    #[inline]
    pub fn key<S: Scalar>(&self, x: &[S]) -> S {
        match self.kind {
            Kind::L1 => x.iter().fold(S::zero(), |acc, &c| acc + c.abs()),
            Kind::L2 => x.iter().fold(S::zero(), |acc, &c| acc + c * c),
            Kind::Max => x.iter().fold(S::zero(), |acc, &c| acc.max(c.abs())),
            Kind::Integer(p) => x.iter().fold(S::zero(), |acc, &c| acc + c.abs().powi(p)),
            Kind::Real(q) => {
                let q = S::of(q);
                x.iter().fold(S::zero(), |acc, &c| acc + c.abs().powf(q))
            }
        }
    }

    /// Key of the difference `x - y`.
    #[inline]
    pub fn distance_key<S: Scalar>(&self, x: &[S], y: &[S]) -> S {
        let diffs = x.iter().zip(y).map(|(&a, &b)| (a - b).abs());
        match self.kind {
            Kind::L1 => diffs.fold(S::zero(), |acc, c| acc + c),
            Kind::L2 => diffs.fold(S::zero(), |acc, c| acc + c * c),
            Kind::Max => diffs.fold(S::zero(), |acc, c| acc.max(c)),
            Kind::Integer(p) => diffs.fold(S::zero(), |acc, c| acc + c.powi(p)),
            Kind::Real(q) => {
                let q = S::of(q);
                diffs.fold(S::zero(), |acc, c| acc + c.powf(q))
            }
        }
    }

    /// Maps a key back to the norm value.
    #[inline]
    pub fn from_key<S: Scalar>(&self, key: S) -> S {
        match self.kind {
            Kind::L1 | Kind::Max => key,
            Kind::L2 => key.sqrt(),
            Kind::Integer(p) => key.powf(S::one() / S::of(p as f64)),
            Kind::Real(q) => key.powf(S::one() / S::of(q)),
        }
    }

    pub fn distance<S: Scalar>(&self, x: &[S], y: &[S]) -> S {
        self.from_key(self.distance_key(x, y))
    }
}

impl fmt::Display for NormSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.q)
        }
    }
}

impl FromStr for NormSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let q = match s.to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "max" => f64::INFINITY,
            other => other
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("norm exponent '{s}' is not a number or 'inf'")))?,
        };
        Self::new(q)
    }
}

impl Serialize for NormSpec {
    fn serialize<Z: Serializer>(&self, serializer: Z) -> std::result::Result<Z::Ok, Z::Error> {
        if self.q.is_infinite() {
            serializer.serialize_str("inf")
        } else {
            serializer.serialize_f64(self.q)
        }
    }
}

/// `‖x‖_q`.
pub fn norm<S: Scalar>(x: &[S], spec: &NormSpec) -> S {
    spec.from_key(spec.key(x))
}

/// Largest norm in the set and the first row achieving it.
pub fn max_norm<S: Scalar>(ps: &PointSet<S>, spec: &NormSpec) -> Result<(S, usize)> {
    if ps.is_empty() {
        return Err(Error::EmptyInput("point set"));
    }
    let mut best = (spec.key(ps.row(0)), 0);
    for (i, row) in ps.rows().enumerate().skip(1) {
        let k = spec.key(row);
        if k > best.0 {
            best = (k, i);
        }
    }
    Ok((spec.from_key(best.0), best.1))
}
