//! Dynamical systems: the map, the metric, finite nets and the concrete
//! example families.
//!
//! Torus systems use the sup metric over coordinates,
//! `max_i min(|x_i - y_i|, 1 - |x_i - y_i|)`. Sequence spaces use
//! `2^{-k}` where `k` is the 1-based index of the first disagreement, so
//! their diameter is 1/2.

mod alpha;
mod descriptor;
mod point;
mod sft;
mod language;
mod sturmian;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use alpha::{Alpha, GOLDEN_DIGITS};
pub use descriptor::{make_system, SystemDescriptor};
pub use point::{Point, SymbolicPoint, TorusPoint};
pub use sft::Sft;
pub use sturmian::{sturmian_factors, sturmian_symbol};

/// Default certified horizon for generated symbolic points.
pub const DEFAULT_HORIZON: usize = 512;
/// Default cap on the size of a generated net.
pub const DEFAULT_NET_CAP: usize = 1 << 18;

/// Default tolerance for floating-point comparisons on torus systems.
pub const NUMERIC_TOL: f64 = 1e-9;

/// Reduces `x` into [0, 1).
pub fn wrap_unit(x: f64) -> f64 {
    let r = x - x.floor();
    if r >= 1.0 || r.is_nan() {
        0.0
    } else {
        r
    }
}

/// Distance on the circle ℝ/ℤ.
pub fn circle_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    let d = d - d.floor();
    d.min(1.0 - d)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Exactness {
    /// Symbolic system whose language is decided exactly.
    SymbolicExact,
    /// Floating-point torus system; comparisons carry a tolerance.
    Numeric,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SystemKind {
    CircleRotation(Alpha),
    TorusRotation(Vec<Alpha>),
    /// `(x, y) ↦ (x + α, y + x)` on the 2-torus.
    SkewProduct(Alpha),
    FullShift(u8),
    Sft(Sft),
    /// Orbit closure of the rotation coding: symbol at `n` is 1 if
    /// `x₀ + nα mod 1 ∈ [0, 1 − α)`, else 2.
    Sturmian(Alpha),
    /// Product of two torus systems, coordinates concatenated.
    Product(Box<DynSystem>, Box<DynSystem>),
}

/// Outcome of a metric evaluation. `at_horizon` is set when two symbolic
/// points agree on every certified symbol, in which case `value` is 0 and
/// only says the points are indistinguishable at the available horizon.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Distance {
    pub value: f64,
    pub at_horizon: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DynSystem {
    kind: SystemKind,
    horizon: usize,
    net_cap: usize,
}

impl DynSystem {
    pub fn new(kind: SystemKind) -> Result<Self> {
        match &kind {
            SystemKind::FullShift(0) => {
                return Err(Error::Validation("full shift needs at least one symbol".into()))
            }
            SystemKind::TorusRotation(a) if a.is_empty() => {
                return Err(Error::Validation("torus rotation needs a dimension".into()))
            }
            SystemKind::Product(a, b) if a.is_symbolic() || b.is_symbolic() => {
                return Err(Error::Validation(
                    "products are supported for torus factors only".into(),
                ))
            }
            _ => {}
        }
        Ok(Self {
            kind,
            horizon: DEFAULT_HORIZON,
            net_cap: DEFAULT_NET_CAP,
        })
    }

    pub fn circle_rotation(alpha: Alpha) -> Self {
        Self::new(SystemKind::CircleRotation(alpha)).expect("valid")
    }

    pub fn golden_rotation() -> Self {
        Self::circle_rotation(Alpha::golden())
    }

    pub fn skew_product(alpha: Alpha) -> Self {
        Self::new(SystemKind::SkewProduct(alpha)).expect("valid")
    }

    pub fn full_shift(symbols: u8) -> Self {
        Self::new(SystemKind::FullShift(symbols)).expect("symbols > 0")
    }

    pub fn sft(sft: Sft) -> Self {
        Self::new(SystemKind::Sft(sft)).expect("valid")
    }

    pub fn golden_mean_shift() -> Self {
        Self::sft(Sft::golden_mean())
    }

    pub fn sturmian(alpha: Alpha) -> Self {
        Self::new(SystemKind::Sturmian(alpha)).expect("valid")
    }

    pub fn with_horizon(mut self, horizon: usize) -> Self {
        self.horizon = horizon;
        self
    }

    pub fn with_net_cap(mut self, cap: usize) -> Self {
        self.net_cap = cap;
        self
    }

    pub fn kind(&self) -> &SystemKind {
        &self.kind
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn net_cap(&self) -> usize {
        self.net_cap
    }

    pub fn name(&self) -> String {
        match &self.kind {
            SystemKind::CircleRotation(a) => format!("circle-rotation(alpha={a})"),
            SystemKind::TorusRotation(a) => {
                let v: Vec<String> = a.iter().map(ToString::to_string).collect();
                format!("torus-rotation(alpha=[{}])", v.join(","))
            }
            SystemKind::SkewProduct(a) => format!("skew-product(alpha={a})"),
            SystemKind::FullShift(m) => format!("full-shift({m})"),
            SystemKind::Sft(s) => format!(
                "sft({}, forbidden={:?})",
                s.symbols(),
                s.forbidden()
            ),
            SystemKind::Sturmian(a) => format!("sturmian(alpha={a})"),
            SystemKind::Product(a, b) => format!("product({}, {})", a.name(), b.name()),
        }
    }

    pub fn exactness(&self) -> Exactness {
        if self.is_symbolic() {
            Exactness::SymbolicExact
        } else {
            Exactness::Numeric
        }
    }

    pub fn is_symbolic(&self) -> bool {
        matches!(
            self.kind,
            SystemKind::FullShift(_) | SystemKind::Sft(_) | SystemKind::Sturmian(_)
        )
    }

    /// Whether `f` preserves distances.
    pub fn is_isometry(&self) -> bool {
        match &self.kind {
            SystemKind::CircleRotation(_) | SystemKind::TorusRotation(_) => true,
            SystemKind::Product(a, b) => a.is_isometry() && b.is_isometry(),
            _ => false,
        }
    }

    /// Torus dimension (0 for symbolic systems).
    pub fn dimension(&self) -> usize {
        match &self.kind {
            SystemKind::CircleRotation(_) => 1,
            SystemKind::TorusRotation(a) => a.len(),
            SystemKind::SkewProduct(_) => 2,
            SystemKind::Product(a, b) => a.dimension() + b.dimension(),
            _ => 0,
        }
    }

    pub fn alphabet_size(&self) -> Option<u8> {
        match &self.kind {
            SystemKind::FullShift(m) => Some(*m),
            SystemKind::Sft(s) => Some(s.symbols()),
            SystemKind::Sturmian(_) => Some(2),
            _ => None,
        }
    }

    pub fn diameter(&self) -> f64 {
        0.5
    }

    /// Full membership check: variant, dimension and alphabet.
    pub fn validate_point(&self, x: &Point) -> Result<()> {
        self.check(x)?;
        if let (Point::Symbolic(s), Some(m)) = (x, self.alphabet_size()) {
            if let Some(a) = s.symbols().iter().find(|&&a| a == 0 || a > m) {
                return Err(Error::VariantMismatch(format!(
                    "symbol {a} outside alphabet 1..={m}"
                )));
            }
        }
        Ok(())
    }

    fn check(&self, x: &Point) -> Result<()> {
        match (x, self.is_symbolic()) {
            (Point::Torus(t), false) if t.dim() == self.dimension() => Ok(()),
            (Point::Torus(t), false) => Err(Error::VariantMismatch(format!(
                "torus point of dimension {} for a {}-dimensional system",
                t.dim(),
                self.dimension()
            ))),
            (Point::Symbolic(_), true) => Ok(()),
            (p, _) => Err(Error::VariantMismatch(format!(
                "{} point for {}",
                p.variant_name(),
                self.name()
            ))),
        }
    }

    pub fn apply(&self, x: &Point) -> Result<Point> {
        self.iterate(x, 1)
    }

    /// `fⁿ(x)`. Rotations and the skew product use closed forms so that
    /// rounding error does not accumulate with `n`.
    pub fn iterate(&self, x: &Point, n: u64) -> Result<Point> {
        self.check(x)?;
        match x {
            Point::Torus(t) => Ok(Point::Torus(TorusPoint::new(
                self.iterate_coords(t.coords(), n),
            ))),
            Point::Symbolic(s) => {
                let k = usize::try_from(n).map_err(|_| Error::Horizon {
                    needed: usize::MAX,
                    available: s.horizon(),
                })?;
                if k > 0 && s.horizon() < k {
                    return Err(Error::Horizon {
                        needed: k,
                        available: s.horizon(),
                    });
                }
                Ok(Point::Symbolic(s.shifted(k)?))
            }
        }
    }

    pub(crate) fn iterate_coords(&self, c: &[f64], n: u64) -> Vec<f64> {
        match &self.kind {
            SystemKind::CircleRotation(a) => vec![wrap_unit(c[0] + a.frac_mul(n))],
            SystemKind::TorusRotation(a) => c
                .iter()
                .zip(a)
                .map(|(&x, a)| wrap_unit(x + a.frac_mul(n)))
                .collect(),
            SystemKind::SkewProduct(a) => {
                let (x, y) = (c[0], c[1]);
                let nx = alpha::frac_mul_split(x, 0.0, n);
                // n(n-1)/2 without overflowing the intermediate product
                let t = if n.is_multiple_of(2) {
                    (n / 2) * n.saturating_sub(1)
                } else {
                    n * ((n - 1) / 2)
                };
                vec![
                    wrap_unit(x + a.frac_mul(n)),
                    wrap_unit(y + nx + a.frac_mul(t)),
                ]
            }
            SystemKind::Product(a, b) => {
                let d = a.dimension();
                let mut out = a.iterate_coords(&c[..d], n);
                out.extend(b.iterate_coords(&c[d..], n));
                out
            }
            _ => unreachable!("symbolic systems have no coordinates"),
        }
    }

    pub fn distance(&self, x: &Point, y: &Point) -> Result<f64> {
        self.distance_checked(x, y).map(|d| d.value)
    }

    pub fn distance_checked(&self, x: &Point, y: &Point) -> Result<Distance> {
        self.check(x)?;
        self.check(y)?;
        match (x, y) {
            (Point::Torus(a), Point::Torus(b)) => Ok(Distance {
                value: torus_dist(a.coords(), b.coords()),
                at_horizon: false,
            }),
            (Point::Symbolic(a), Point::Symbolic(b)) => Ok(symbolic_dist(a.symbols(), b.symbols())),
            _ => Err(Error::VariantMismatch("mixed point variants".into())),
        }
    }

    /// Number of leading symbols that must agree for two sequences to be
    /// within `eps`, i.e. `d ≤ eps ⇔` the first `w` symbols agree, and
    /// `d > eps ⇔` they differ somewhere in the first `w`.
    pub fn symbol_window(eps: f64) -> Result<usize> {
        if !(eps > 0.0) {
            return Err(Error::Domain(format!(
                "symbolic scale needs eps > 0, got {eps}"
            )));
        }
        let j = (1.0 / eps).log2().ceil();
        // Guard against log2 rounding at exact powers of two.
        let mut j = j.max(0.0) as usize;
        while j > 0 && 2f64.powi(-(j as i32 - 1)) <= eps {
            j -= 1;
        }
        while 2f64.powi(-(j as i32)) > eps {
            j += 1;
        }
        Ok(j.saturating_sub(1))
    }

    /// The canonical ε realizing a `w`-symbol window: `2^{-(w+1)}`.
    pub fn window_eps(window: usize) -> f64 {
        2f64.powi(-(window as i32 + 1))
    }

    /// Per-coordinate bound on `|fⁿ(z)_i − fⁿ(c)_i|` when
    /// `|z_i − c_i| ≤ half_widths[i]`.
    pub fn spread_bound(&self, n: u64, half_widths: &[f64]) -> Vec<f64> {
        match &self.kind {
            SystemKind::CircleRotation(_) | SystemKind::TorusRotation(_) => half_widths.to_vec(),
            SystemKind::SkewProduct(_) => {
                vec![half_widths[0], half_widths[1] + n as f64 * half_widths[0]]
            }
            SystemKind::Product(a, b) => {
                let d = a.dimension();
                let mut out = a.spread_bound(n, &half_widths[..d]);
                out.extend(b.spread_bound(n, &half_widths[d..]));
                out
            }
            _ => Vec::new(),
        }
    }

    /// A finite δ-dense subset. Torus: uniform grid with spacing ≤ δ.
    /// Symbolic: every admissible word of length ⌈log₂(1/δ)⌉, continued
    /// deterministically to the certified horizon.
    pub fn build_net(&self, delta: f64) -> Result<Vec<Point>> {
        if !(delta > 0.0) {
            return Err(Error::Domain(format!("net spacing must be positive, got {delta}")));
        }
        if self.is_symbolic() {
            let len = (1.0 / delta).log2().ceil().max(0.0) as usize;
            return self.word_net(len);
        }
        let per = (1.0 / delta - 1e-12).ceil().max(1.0) as usize;
        let d = self.dimension() as u32;
        let total = (per as u128).pow(d);
        if total > self.net_cap as u128 {
            return Err(Error::Budget {
                what: format!("net of {total} points at delta {delta}"),
                cap: self.net_cap,
                cursor: None,
            });
        }
        Ok(grid(per, d as usize))
    }

    /// Net of all admissible words of length `len`, continued to points.
    pub fn word_net(&self, len: usize) -> Result<Vec<Point>> {
        let count = self.count_words(len)?;
        if count > self.net_cap as u128 {
            return Err(Error::Budget {
                what: format!("{count} admissible words of length {len}"),
                cap: self.net_cap,
                cursor: None,
            });
        }
        self.admissible_words(len)?
            .iter()
            .map(|w| self.point_from_word(w))
            .collect()
    }

    /// Grid with `per` points per axis (spacing 1/per).
    pub fn grid_net(&self, per: usize) -> Result<Vec<Point>> {
        let d = self.dimension();
        if d == 0 {
            return Err(Error::Unsupported {
                op: "grid_net",
                kind: self.name(),
            });
        }
        Ok(grid(per, d))
    }

    /// Deterministic transitive base point: the concatenation of all
    /// admissible words for shifts, the coding of 0 for Sturmian shifts,
    /// and the origin for torus systems.
    pub fn transitive_point(&self) -> Result<Point> {
        match &self.kind {
            SystemKind::FullShift(_) | SystemKind::Sft(_) => {
                let mut seq: Vec<u8> = Vec::new();
                let mut len = 1;
                while seq.len() < self.horizon {
                    for w in self.admissible_words(len)? {
                        if seq.is_empty() {
                            seq.extend_from_slice(&w);
                        } else {
                            let c = self.connector(&seq, &w)?;
                            seq.extend_from_slice(&c);
                            seq.extend_from_slice(&w);
                        }
                        if seq.len() >= self.horizon {
                            break;
                        }
                    }
                    len += 1;
                }
                seq.truncate(self.horizon);
                Ok(Point::word(seq))
            }
            SystemKind::Sturmian(a) => Ok(Point::Symbolic(SymbolicPoint::from_fn(
                self.horizon,
                |n| sturmian_symbol(a, 0.0, n as u64),
            ))),
            _ => Ok(Point::torus(vec![0.0; self.dimension()])),
        }
    }

    fn connector(&self, prefix: &[u8], next: &[u8]) -> Result<Vec<u8>> {
        match &self.kind {
            SystemKind::FullShift(_) => Ok(Vec::new()),
            SystemKind::Sft(s) => {
                let tail = &prefix[prefix.len().saturating_sub(s.memory().max(1))..];
                s.connector(tail, next, 4 * (s.memory() + 1) * s.symbols() as usize)
                    .ok_or_else(|| {
                        Error::Validation("SFT is not irreducible: no connecting word".into())
                    })
            }
            _ => Err(Error::Unsupported {
                op: "connector",
                kind: self.name(),
            }),
        }
    }
}

pub fn torus_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| circle_dist(x, y))
        .fold(0.0, f64::max)
}

pub fn symbolic_dist(a: &[u8], b: &[u8]) -> Distance {
    match a.iter().zip(b).position(|(x, y)| x != y) {
        Some(i) => Distance {
            value: 2f64.powi(-(i as i32 + 1)),
            at_horizon: false,
        },
        None => Distance {
            value: 0.0,
            at_horizon: true,
        },
    }
}

fn grid(per: usize, d: usize) -> Vec<Point> {
    let total = per.pow(d as u32);
    (0..total)
        .map(|mut i| {
            let mut c = vec![0.0; d];
            for k in (0..d).rev() {
                c[k] = (i % per) as f64 / per as f64;
                i /= per;
            }
            Point::torus(c)
        })
        .collect()
}
