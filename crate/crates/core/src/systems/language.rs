//! Exact language operations for the symbolic systems.

use super::sturmian::{cylinder_point, sturmian_factors, sturmian_symbol};
use super::{DynSystem, Point, SymbolicPoint, SystemKind};
use crate::error::{Error, Result};

impl DynSystem {
    fn unsupported(&self, op: &'static str) -> Error {
        Error::Unsupported {
            op,
            kind: self.name(),
        }
    }

    /// All admissible words of length `len`, lexicographic.
    pub fn admissible_words(&self, len: usize) -> Result<Vec<Vec<u8>>> {
        match &self.kind {
            SystemKind::FullShift(m) => {
                let mut out = vec![Vec::new()];
                for _ in 0..len {
                    out = out
                        .into_iter()
                        .flat_map(|w: Vec<u8>| {
                            (1..=*m).map(move |a| {
                                let mut v = w.clone();
                                v.push(a);
                                v
                            })
                        })
                        .collect();
                }
                Ok(out)
            }
            SystemKind::Sft(s) => Ok(s.enumerate(len)),
            SystemKind::Sturmian(a) => Ok(sturmian_factors(a, len)),
            _ => Err(self.unsupported("admissible_words")),
        }
    }

    /// Number of admissible words of length `len` (saturating).
    pub fn count_words(&self, len: usize) -> Result<u128> {
        match &self.kind {
            SystemKind::FullShift(m) => Ok((*m as u128).checked_pow(len as u32).unwrap_or(u128::MAX)),
            SystemKind::Sft(s) => Ok(s.word_counts(len)[len]),
            SystemKind::Sturmian(a) => Ok(sturmian_factors(a, len).len() as u128),
            _ => Err(self.unsupported("count_words")),
        }
    }

    pub fn is_admissible(&self, word: &[u8]) -> Result<bool> {
        match &self.kind {
            SystemKind::FullShift(m) => Ok(word.iter().all(|&s| (1..=*m).contains(&s))),
            SystemKind::Sft(s) => Ok(s.is_admissible(word)),
            SystemKind::Sturmian(a) => Ok(cylinder_point(a, word).is_some()),
            _ => Err(self.unsupported("is_admissible")),
        }
    }

    /// Lexicographically least admissible word matching `pattern` on its
    /// fixed positions, or `None` if the language has no such word.
    pub fn complete_pattern(&self, pattern: &[Option<u8>]) -> Result<Option<Vec<u8>>> {
        match &self.kind {
            SystemKind::FullShift(m) => {
                if pattern.iter().flatten().any(|&s| s == 0 || s > *m) {
                    return Ok(None);
                }
                Ok(Some(pattern.iter().map(|p| p.unwrap_or(1)).collect()))
            }
            SystemKind::Sft(s) => Ok(s.complete(pattern)),
            SystemKind::Sturmian(a) => Ok(sturmian_factors(a, pattern.len())
                .into_iter()
                .find(|w| w.iter().zip(pattern).all(|(&s, p)| p.is_none_or(|p| p == s)))),
            _ => Err(self.unsupported("complete_pattern")),
        }
    }

    /// Continues an admissible word to a point with the system's certified
    /// horizon (or the word's length, if longer). Shifts append the least
    /// admissible symbol; Sturmian words are continued by coding a point of
    /// their cylinder.
    pub fn point_from_word(&self, word: &[u8]) -> Result<Point> {
        let len = self.horizon.max(word.len());
        let bad = || Error::VariantMismatch(format!("{word:?} is not admissible in {}", self.name()));
        match &self.kind {
            SystemKind::FullShift(m) => {
                if !word.iter().all(|&s| (1..=*m).contains(&s)) {
                    return Err(bad());
                }
                let mut w = word.to_vec();
                w.resize(len, 1);
                Ok(Point::word(w))
            }
            SystemKind::Sft(s) => s.extend(word, len).map(Point::word).ok_or_else(bad),
            SystemKind::Sturmian(a) => {
                let x0 = cylinder_point(a, word).ok_or_else(bad)?;
                Ok(Point::Symbolic(SymbolicPoint::from_fn(len, |n| {
                    sturmian_symbol(a, x0, n as u64)
                })))
            }
            _ => Err(self.unsupported("point_from_word")),
        }
    }
}
