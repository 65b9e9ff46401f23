//! Flat `key = value` system descriptors.
//!
//! ```text
//! # golden-mean shift
//! kind = sft
//! symbols = 2
//! forbidden_words = 11
//! net_cap = 65536
//! ```
//!
//! Keys: `kind`, `alpha`, `precision_digits`, `symbols`, `forbidden_words`,
//! `net_cap`, `horizon`, `factors`. Blank lines and `#` comments are
//! ignored; unknown or repeated keys are errors.
//!
//! * `kind`: `circle-rotation`, `torus-rotation`, `skew-product`,
//!   `full-shift`, `sft`, `sturmian`, `product`.
//! * `alpha`: `golden`, `p/q` or a decimal; whitespace-separated list for
//!   `torus-rotation`.
//! * `forbidden_words`: comma-separated words. A word is a run of digits
//!   (`121`) or, for alphabets past 9, dot-separated symbols (`10.2`).
//! * `factors`: for `product`, two factor descriptors separated by `;`,
//!   each a comma-separated list of `key:value`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Alpha, DynSystem, Sft, SystemKind};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SystemDescriptor {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub alpha: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision_digits: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symbols: Option<u8>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub forbidden_words: Vec<Vec<u8>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub net_cap: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub factors: Vec<SystemDescriptor>,
}

const KINDS: &[&str] = &[
    "circle-rotation",
    "torus-rotation",
    "skew-product",
    "full-shift",
    "sft",
    "sturmian",
    "product",
];

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

impl SystemDescriptor {
    pub fn parse(text: &str) -> Result<Self> {
        let mut d = SystemDescriptor::default();
        let mut seen: Vec<String> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (k, v) = body
                .split_once('=')
                .ok_or_else(|| perr(line, format!("expected `key = value`, got `{body}`")))?;
            let (k, v) = (k.trim(), v.trim());
            if seen.iter().any(|s| s == k) {
                return Err(perr(line, format!("duplicate key `{k}`")));
            }
            seen.push(k.to_string());
            d.set(k, v, line)?;
        }
        if d.kind.is_empty() {
            return Err(perr(0, "missing required key `kind`"));
        }
        Ok(d)
    }

    fn set(&mut self, key: &str, value: &str, line: usize) -> Result<()> {
        let num = |what: &str| perr(line, format!("`{key}` expects {what}, got `{value}`"));
        match key {
            "kind" => {
                if !KINDS.contains(&value) {
                    return Err(perr(
                        line,
                        format!("unknown kind `{value}`; expected one of {}", KINDS.join(", ")),
                    ));
                }
                self.kind = value.to_string();
            }
            "alpha" => {
                self.alpha = value.split_whitespace().map(str::to_string).collect();
                for a in &self.alpha {
                    Alpha::parse(a).map_err(|e| perr(line, e.to_string()))?;
                }
            }
            "precision_digits" => {
                self.precision_digits = Some(value.parse().map_err(|_| num("an integer"))?)
            }
            "symbols" => self.symbols = Some(value.parse().map_err(|_| num("an integer 1..=255"))?),
            "net_cap" => self.net_cap = Some(value.parse().map_err(|_| num("an integer"))?),
            "horizon" => self.horizon = Some(value.parse().map_err(|_| num("an integer"))?),
            "forbidden_words" => {
                self.forbidden_words = value
                    .split(',')
                    .map(str::trim)
                    .filter(|w| !w.is_empty())
                    .map(|w| parse_word(w).ok_or_else(|| num("digit words")))
                    .collect::<Result<_>>()?
            }
            "factors" => {
                self.factors = value
                    .split(';')
                    .map(|f| parse_factor(f.trim(), line))
                    .collect::<Result<_>>()?
            }
            _ => return Err(perr(line, format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    fn alpha_at(&self, i: usize) -> Result<Alpha> {
        let text = self
            .alpha
            .get(i)
            .ok_or_else(|| perr(0, format!("kind `{}` requires `alpha`", self.kind)))?;
        let a = Alpha::parse(text)?;
        match self.precision_digits {
            Some(p) => a.with_precision(p),
            None => Ok(a),
        }
    }

    pub fn make_system(&self) -> Result<DynSystem> {
        let kind = match self.kind.as_str() {
            "circle-rotation" => SystemKind::CircleRotation(self.alpha_at(0)?),
            "skew-product" => SystemKind::SkewProduct(self.alpha_at(0)?),
            "sturmian" => SystemKind::Sturmian(self.alpha_at(0)?),
            "torus-rotation" => {
                let v = (0..self.alpha.len())
                    .map(|i| self.alpha_at(i))
                    .collect::<Result<Vec<_>>>()?;
                SystemKind::TorusRotation(v)
            }
            "full-shift" => SystemKind::FullShift(
                self.symbols
                    .ok_or_else(|| perr(0, "kind `full-shift` requires `symbols`"))?,
            ),
            "sft" => {
                let m = self
                    .symbols
                    .ok_or_else(|| perr(0, "kind `sft` requires `symbols`"))?;
                SystemKind::Sft(Sft::new(m, self.forbidden_words.clone())?)
            }
            "product" => {
                if self.factors.len() != 2 {
                    return Err(perr(0, "kind `product` requires exactly two `factors`"));
                }
                SystemKind::Product(
                    Box::new(self.factors[0].make_system()?),
                    Box::new(self.factors[1].make_system()?),
                )
            }
            other => return Err(perr(0, format!("unknown kind `{other}`"))),
        };
        let mut sys = DynSystem::new(kind)?;
        if let Some(h) = self.horizon {
            sys = sys.with_horizon(h);
        }
        if let Some(c) = self.net_cap {
            sys = sys.with_net_cap(c);
        }
        Ok(sys)
    }

    fn fields(&self) -> Vec<(&'static str, String)> {
        let mut out = vec![("kind", self.kind.clone())];
        if !self.alpha.is_empty() {
            out.push(("alpha", self.alpha.join(" ")));
        }
        if let Some(p) = self.precision_digits {
            out.push(("precision_digits", p.to_string()));
        }
        if let Some(s) = self.symbols {
            out.push(("symbols", s.to_string()));
        }
        if !self.forbidden_words.is_empty() {
            let ws: Vec<String> = self.forbidden_words.iter().map(|w| format_word(w)).collect();
            out.push(("forbidden_words", ws.join(", ")));
        }
        if let Some(c) = self.net_cap {
            out.push(("net_cap", c.to_string()));
        }
        if let Some(h) = self.horizon {
            out.push(("horizon", h.to_string()));
        }
        if !self.factors.is_empty() {
            let fs: Vec<String> = self
                .factors
                .iter()
                .map(|f| {
                    f.fields()
                        .into_iter()
                        .map(|(k, v)| format!("{k}:{v}"))
                        .collect::<Vec<_>>()
                        .join(",")
                })
                .collect();
            out.push(("factors", fs.join("; ")));
        }
        out
    }
}

fn parse_factor(text: &str, line: usize) -> Result<SystemDescriptor> {
    let mut d = SystemDescriptor::default();
    for field in text.split(',').map(str::trim).filter(|f| !f.is_empty()) {
        let (k, v) = field
            .split_once(':')
            .ok_or_else(|| perr(line, format!("factor field `{field}` is not `key:value`")))?;
        if matches!(k.trim(), "factors" | "forbidden_words") {
            return Err(perr(line, format!("`{}` is not allowed inside a factor", k.trim())));
        }
        d.set(k.trim(), v.trim(), line)?;
    }
    if d.kind.is_empty() {
        return Err(perr(line, "factor is missing `kind`"));
    }
    Ok(d)
}

fn parse_word(w: &str) -> Option<Vec<u8>> {
    if w.contains('.') {
        w.split('.').map(|s| s.parse().ok()).collect()
    } else {
        w.chars()
            .map(|c| c.to_digit(10).map(|d| d as u8))
            .collect()
    }
}

fn format_word(w: &[u8]) -> String {
    if w.iter().all(|&s| s <= 9) {
        w.iter().map(|s| s.to_string()).collect()
    } else {
        w.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(".")
    }
}

impl fmt::Display for SystemDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.fields() {
            writeln!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}

impl FromStr for SystemDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

/// Builds the system a descriptor names.
pub fn make_system(descriptor: &SystemDescriptor) -> Result<DynSystem> {
    descriptor.make_system()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::Exactness;

    #[test]
    fn golden_mean_from_text() {
        let d = SystemDescriptor::parse("kind = sft\nsymbols = 2\nforbidden_words = 11 # no 11\n")
            .unwrap();
        let sys = d.make_system().unwrap();
        let words = sys.admissible_words(3).unwrap();
        assert_eq!(words.len(), 5);
        assert!(words.iter().all(|w| !w.windows(2).any(|p| p == [1, 1])));
    }

    #[test]
    fn golden_rotation_thirty_digits() {
        let d = SystemDescriptor::parse("kind = circle-rotation\nalpha = golden\nprecision_digits = 30")
            .unwrap();
        let sys = d.make_system().unwrap();
        assert_eq!(sys.exactness(), Exactness::Numeric);
        let full = make_system(&SystemDescriptor::parse("kind = full-shift\nsymbols = 2").unwrap())
            .unwrap();
        assert_eq!(full.exactness(), Exactness::SymbolicExact);
    }

    #[test]
    fn round_trip() {
        let texts = [
            "kind = sft\nsymbols = 12\nforbidden_words = 11, 10.12, 2\nnet_cap = 99\n",
            "kind = torus-rotation\nalpha = golden 1/3 0.125\nprecision_digits = 20\nhorizon = 64\n",
            "kind = product\nfactors = kind:circle-rotation,alpha:golden; kind:skew-product,alpha:1/5\n",
        ];
        for t in texts {
            let d = SystemDescriptor::parse(t).unwrap();
            let again = SystemDescriptor::parse(&d.to_string()).unwrap();
            assert_eq!(d, again);
            let json = serde_json::to_string(&d).unwrap();
            assert_eq!(serde_json::from_str::<SystemDescriptor>(&json).unwrap(), d);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let bad = [
            "kind = full-shift\ncolour = red",
            "kind = moebius",
            "symbols = 2",
            "kind = sft\nkind = sft",
            "kind = full-shift\nsymbols = many",
            "just words",
        ];
        for t in bad {
            assert!(matches!(SystemDescriptor::parse(t), Err(Error::Parse { .. })), "{t}");
        }
        let err = SystemDescriptor::parse("kind = colour");
        assert!(err.unwrap_err().to_string().contains("unknown kind"));
    }

    #[test]
    fn dead_symbol_is_a_validation_error() {
        let d = SystemDescriptor::parse("kind = sft\nsymbols = 2\nforbidden_words = 21, 22").unwrap();
        assert!(matches!(d.make_system(), Err(Error::Validation(_))));
    }
}
