//! Shared benchmark fixtures.

use gluedyn::gluing::OrbitSequence;
use gluedyn::systems::{Alpha, DynSystem, Point};

pub fn rotation() -> DynSystem {
    DynSystem::golden_rotation()
}

pub fn skew() -> DynSystem {
    DynSystem::skew_product(Alpha::golden())
}

pub fn sturmian() -> DynSystem {
    DynSystem::sturmian(Alpha::golden())
}

/// Two circle segments far apart, so the search needs a long gap.
pub fn rotation_pair(len: usize) -> OrbitSequence {
    OrbitSequence::from_pairs([(Point::circle(0.1), len), (Point::circle(0.6), len)]).expect("valid sequence")
}

/// `segments` blocks of the word `12`, `21`, `11`, `22` repeated.
pub fn word_sequence(sys: &DynSystem, segments: usize, len: usize) -> OrbitSequence {
    let words: [&[u8]; 4] = [&[1, 2], &[2, 1], &[1, 1], &[2, 2]];
    OrbitSequence::from_pairs((0..segments).map(|j| {
        let w: Vec<u8> = words[j % 4].iter().copied().cycle().take(len).collect();
        (sys.point_from_word(&w).expect("admissible"), len)
    }))
    .expect("valid sequence")
}
