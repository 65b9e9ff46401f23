use super::{wrap_unit, Alpha};

/// Symbol `n` of the rotation coding of `x0`: 1 on `[0, 1 − α)`, 2 on
/// `[1 − α, 1)`.
pub fn sturmian_symbol(alpha: &Alpha, x0: f64, n: u64) -> u8 {
    let x = wrap_unit(x0 + alpha.frac_mul(n));
    if x < 1.0 - alpha.value() {
        1
    } else {
        2
    }
}

/// Cut points of the circle that determine the length-`len` coding:
/// `{ −kα mod 1 : k = 0..=len }`, sorted and deduplicated.
fn cut_points(alpha: &Alpha, len: usize) -> Vec<f64> {
    let mut cuts: Vec<f64> = (0..=len as u64)
        .map(|k| wrap_unit(-alpha.frac_mul(k)))
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    cuts
}

/// Midpoints of the arcs between consecutive cut points. Each arc is the
/// set of `x0` sharing one length-`len` coding.
pub(crate) fn arc_midpoints(alpha: &Alpha, len: usize) -> Vec<f64> {
    let cuts = cut_points(alpha, len);
    let n = cuts.len();
    (0..n)
        .map(|i| {
            let a = cuts[i];
            let b = if i + 1 < n { cuts[i + 1] } else { cuts[0] + 1.0 };
            wrap_unit((a + b) / 2.0)
        })
        .collect()
}

/// All factors of length `len` of the Sturmian coding, in lexicographic
/// order. For irrational α there are exactly `len + 1`.
pub fn sturmian_factors(alpha: &Alpha, len: usize) -> Vec<Vec<u8>> {
    if len == 0 {
        return vec![Vec::new()];
    }
    let mut words: Vec<Vec<u8>> = arc_midpoints(alpha, len)
        .into_iter()
        .map(|x0| (0..len as u64).map(|n| sturmian_symbol(alpha, x0, n)).collect())
        .collect();
    words.sort();
    words.dedup();
    words
}

/// An `x0` whose coding starts with `word`, if `word` is a factor.
pub(crate) fn cylinder_point(alpha: &Alpha, word: &[u8]) -> Option<f64> {
    arc_midpoints(alpha, word.len()).into_iter().find(|&x0| {
        word.iter()
            .enumerate()
            .all(|(n, &s)| sturmian_symbol(alpha, x0, n as u64) == s)
    })
}
