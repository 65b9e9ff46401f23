use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point on a torus, coordinates reduced into [0, 1).
#[derive(Clone, Debug, PartialEq)]
pub struct TorusPoint(Vec<f64>);

impl TorusPoint {
    pub fn new(coords: impl Into<Vec<f64>>) -> Self {
        let mut v: Vec<f64> = coords.into();
        for c in &mut v {
            *c = super::wrap_unit(*c);
        }
        Self(v)
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

/// A point of a one-sided sequence space over `{1, .., M}` with a finite
/// certified horizon.
///
/// The symbols are materialized once when the point is built; shifting only
/// moves the offset, so all shifts of a point share one buffer.
#[derive(Clone, Debug)]
pub struct SymbolicPoint {
    data: Arc<[u8]>,
    offset: usize,
}

impl SymbolicPoint {
    pub fn from_word(word: impl Into<Vec<u8>>) -> Self {
        let v: Vec<u8> = word.into();
        Self {
            data: v.into(),
            offset: 0,
        }
    }

    /// Builds the certified prefix `oracle(0), .., oracle(horizon - 1)`.
    pub fn from_fn(horizon: usize, oracle: impl FnMut(usize) -> u8) -> Self {
        Self::from_word((0..horizon).map(oracle).collect::<Vec<_>>())
    }

    /// Number of certified symbols from the current position.
    pub fn horizon(&self) -> usize {
        self.data.len() - self.offset
    }

    /// Symbol at 0-based index `i`, if within the horizon.
    pub fn symbol(&self, i: usize) -> Option<u8> {
        self.data.get(self.offset + i).copied()
    }

    pub fn symbols(&self) -> &[u8] {
        &self.data[self.offset..]
    }

    /// Left shift by `k`.
    pub fn shifted(&self, k: usize) -> Result<Self> {
        if k > self.horizon() {
            return Err(Error::Horizon {
                needed: k,
                available: self.horizon(),
            });
        }
        Ok(Self {
            data: Arc::clone(&self.data),
            offset: self.offset + k,
        })
    }

    pub fn require(&self, needed: usize) -> Result<()> {
        if self.horizon() < needed {
            Err(Error::Horizon {
                needed,
                available: self.horizon(),
            })
        } else {
            Ok(())
        }
    }
}

impl PartialEq for SymbolicPoint {
    fn eq(&self, other: &Self) -> bool {
        self.symbols() == other.symbols()
    }
}

/// A point of a [`DynSystem`](super::DynSystem)'s phase space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "PointRepr", into = "PointRepr")]
pub enum Point {
    Torus(TorusPoint),
    Symbolic(SymbolicPoint),
}

impl Point {
    pub fn torus(coords: impl Into<Vec<f64>>) -> Self {
        Point::Torus(TorusPoint::new(coords))
    }

    pub fn circle(x: f64) -> Self {
        Point::torus(vec![x])
    }

    pub fn word(symbols: impl Into<Vec<u8>>) -> Self {
        Point::Symbolic(SymbolicPoint::from_word(symbols))
    }

    pub fn as_torus(&self) -> Option<&TorusPoint> {
        match self {
            Point::Torus(t) => Some(t),
            Point::Symbolic(_) => None,
        }
    }

    pub fn as_symbolic(&self) -> Option<&SymbolicPoint> {
        match self {
            Point::Symbolic(s) => Some(s),
            Point::Torus(_) => None,
        }
    }

    pub fn variant_name(&self) -> &'static str {
        match self {
            Point::Torus(_) => "torus",
            Point::Symbolic(_) => "symbolic",
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum PointRepr {
    Torus(Vec<f64>),
    Symbolic(Vec<u8>),
}

impl From<PointRepr> for Point {
    fn from(r: PointRepr) -> Self {
        match r {
            PointRepr::Torus(c) => Point::torus(c),
            PointRepr::Symbolic(s) => Point::word(s),
        }
    }
}

impl From<Point> for PointRepr {
    fn from(p: Point) -> Self {
        match p {
            Point::Torus(t) => PointRepr::Torus(t.0),
            Point::Symbolic(s) => PointRepr::Symbolic(s.symbols().to_vec()),
        }
    }
}
