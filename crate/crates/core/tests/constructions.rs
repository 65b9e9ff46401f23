use std::collections::HashSet;

use gluedyn::constructions::*;
use gluedyn::gluing::SearchLimits;
use gluedyn::properties::{Verdict, Witness};
use gluedyn::systems::{Alpha, DynSystem, Point};
use proptest::prelude::*;

fn golden() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}

fn norm(x: f64) -> f64 {
    let f = x.rem_euclid(1.0);
    f.min(1.0 - f)
}

fn symbols(p: &Point) -> &[u8] {
    p.as_symbolic().unwrap().symbols()
}

fn limits() -> SearchLimits {
    SearchLimits::default()
}

/// Least `τ` with `p[τ] ≠ p[τ+k]`: the first-symbol reading of `γ ∈ [1/4, 1/2)`.
fn first_symbol_taus(p: &[u8], k_max: usize) -> Vec<u64> {
    (1..=k_max).map(|k| (0..).find(|&t| p[t] != p[t + k]).unwrap() as u64).collect()
}

#[test]
fn follow_defect_examples() {
    let rot = DynSystem::golden_rotation();
    for m in [1u64, 2, 5, 13] {
        let d = follow_defect(&rot, &Point::circle(0.3), m, 40).unwrap();
        assert!((d - norm(m as f64 * golden())).abs() < 1e-9, "m = {m}");
    }
    let full = DynSystem::full_shift(2);
    let p = Point::word([1, 2].repeat(20));
    assert_eq!(follow_defect(&full, &p, 2, 10).unwrap(), 0.0);
    assert_eq!(follow_defect(&full, &p, 1, 10).unwrap(), 0.5);
    assert!(follow_defect(&full, &p, 1, 0).is_err());

    // x = σ³y, so the defect at m = 3 vanishes
    let y = full.transitive_point().unwrap();
    let x = full.iterate(&y, 3).unwrap();
    assert_eq!(orbit_shift_defect(&full, &x, &y, 3, 50).unwrap(), 0.0);
    assert_eq!(shift_closeness_search(&full, &x, &y, 0.0, 5, 50).unwrap(), Some(3));
    assert_eq!(shift_closeness_search(&full, &x, &y, 0.0, 3, 50).unwrap(), None);

    let x = rot.iterate(&Point::circle(0.1), 2).unwrap();
    assert_eq!(shift_closeness_search(&rot, &x, &Point::circle(0.1), 1e-9, 4, 30).unwrap(), Some(2));
}

#[test]
fn witnesses_full_shift_first_symbol() {
    let sys = DynSystem::full_shift(2);
    let p = sys.transitive_point().unwrap();
    let w = non_rigidity_witnesses(&sys, &p, 0.3, 3, 100).unwrap();
    assert_eq!(w.taus, first_symbol_taus(symbols(&p), 3));
    assert!(w.defects.iter().all(|&d| d == 0.5));
    assert!(w.verify(&sys).unwrap());
    assert_eq!(w.max_tau(2), w.taus[..2].iter().copied().max().unwrap());
    assert_eq!(w.max_tau(0), 0);
}

#[test]
fn witnesses_skew_match_closed_form() {
    let a = golden();
    let sys = DynSystem::skew_product(Alpha::golden());
    let p = sys.transitive_point().unwrap();
    let w = non_rigidity_witnesses(&sys, &p, 0.2, 5, 2000).unwrap();
    for k in 1..=5u64 {
        // orbit of the origin: (nα, α n(n−1)/2)
        let defect = |t: u64| {
            let dy = (k * t + k * (k - 1) / 2) as f64 * a;
            norm(k as f64 * a).max(norm(dy))
        };
        let tau = (0..).find(|&t| defect(t) > 0.2).unwrap();
        assert_eq!(w.taus[k as usize - 1], tau, "k = {k}");
        assert!((w.defects[k as usize - 1] - defect(tau)).abs() < 1e-9);
    }
    assert!(w.verify(&sys).unwrap());
}

#[test]
fn rotation_has_no_witness_above_its_displacement() {
    let rot = DynSystem::golden_rotation();
    // every defect at k = 1 equals ‖α‖ ≈ 0.382
    match non_rigidity_witnesses(&rot, &Point::circle(0.0), 0.4, 1, 500) {
        Err(gluedyn::Error::WitnessNotFound { k, max_defect }) => {
            assert_eq!(k, 1);
            assert!((max_defect - norm(golden())).abs() < 1e-9);
        }
        other => panic!("expected a missing witness, got {other:?}"),
    }
    assert!(non_rigidity_witnesses(&rot, &Point::circle(0.0), 0.0, 1, 5).is_err());
}

#[test]
fn family_full_shift_quarter() {
    let sys = DynSystem::full_shift(2);
    let p = sys.transitive_point().unwrap();
    let w = non_rigidity_witnesses(&sys, &p, 0.25, 1, 100).unwrap();
    let f = build_separated_family(&sys, &w, 0.25, 6, 1, None, &limits()).unwrap();
    assert_eq!((f.t_big, f.m1, f.m2, f.window), (2, 3, 2, 28));
    assert_eq!(f.members.len(), 64);
    assert_eq!(f.pairs.len(), 64 * 63 / 2);
    assert!(f.certified && f.violations.is_empty());
    assert!(f.pairs.iter().all(|p| p.separated && (p.time as usize) < f.window));
    assert!(f.lower_bound > 0.0 && f.lower_bound <= std::f64::consts::LN_2);
    assert!((f.lower_bound - std::f64::consts::LN_2 / 4.0).abs() < 1e-15);

    // independent check: the 64 points are pairwise (28, 1/4)-separated
    let words: Vec<&[u8]> = f.members.iter().map(|m| &symbols(&m.z)[..29]).collect();
    for i in 0..words.len() {
        for j in i + 1..words.len() {
            // distance > 1/4 at some k < 28 iff the words differ before index 29
            assert!((0..28).any(|k| words[i][k] != words[j][k]), "{i} {j}");
        }
    }
    assert_eq!(words.iter().collect::<HashSet<_>>().len(), 64);
    assert!(f.verify(&sys).unwrap());
    assert!(f.certificate.as_ref().unwrap().verify(&sys).unwrap());
}

#[test]
fn family_edge_cases() {
    let sys = DynSystem::full_shift(2);
    let p = sys.transitive_point().unwrap();
    let w = non_rigidity_witnesses(&sys, &p, 0.25, 1, 100).unwrap();
    let f = build_separated_family(&sys, &w, 0.25, 0, 1, None, &limits()).unwrap();
    assert_eq!(f.members.len(), 1);
    assert!(f.pairs.is_empty() && f.certified);
    // too few witnesses for M = 2
    assert!(build_separated_family(&sys, &w, 0.25, 2, 2, None, &limits()).is_err());
    // ε above γ
    assert!(build_separated_family(&sys, &w, 0.3, 2, 1, None, &limits()).is_err());
}

#[test]
fn family_golden_mean() {
    let sys = DynSystem::golden_mean_shift();
    let p = sys.transitive_point().unwrap();
    let w = non_rigidity_witnesses(&sys, &p, 0.25, 3, 200).unwrap();
    let f = build_separated_family(&sys, &w, 0.25, 4, 2, None, &limits()).unwrap();
    assert_eq!(f.members.len(), 16);
    assert!(f.certified, "violations {:?}", f.violations);
    assert!(f.lower_bound <= ((1.0 + 5f64.sqrt()) / 2.0).ln());
    assert!(f.verify(&sys).unwrap());
    for m in &f.members {
        assert!(sys.is_admissible(&symbols(&m.z)[..f.window]).unwrap());
    }
}

#[test]
fn uap_examples() {
    let rot = DynSystem::golden_rotation();
    let base = Point::circle(0.0);
    let eps = 0.1;
    let n = 60u64;
    // oracle: least m with ‖(k+m)α‖ ≤ ε, worst case over k
    let need = (1..=n).map(|k| (0..).find(|&m| norm((k + m) as f64 * golden()) <= eps).unwrap()).max().unwrap();
    let v = uap_certificate(&rot, &base, eps, need + 1, n).unwrap();
    assert_eq!(v.verdict, Verdict::HoldsAtScale);
    assert!(v.reverify(&rot).unwrap());
    match &v.witness {
        Some(Witness::ShiftTable { shifts, .. }) => assert_eq!(shifts.len(), n as usize),
        other => panic!("{other:?}"),
    }
    let v = uap_certificate(&rot, &base, eps, need, n).unwrap();
    assert_eq!(v.verdict, Verdict::FailsWithWitness);
    assert!(v.reverify(&rot).unwrap());

    let quarter = DynSystem::circle_rotation(Alpha::rational(1, 4).unwrap());
    assert_eq!(uap_certificate(&quarter, &base, 0.0, 4, 20).unwrap().verdict, Verdict::HoldsAtScale);
    assert_eq!(uap_certificate(&quarter, &base, 0.0, 3, 20).unwrap().verdict, Verdict::FailsWithWitness);

    let full = DynSystem::full_shift(2);
    let v = uap_certificate(&full, &full.transitive_point().unwrap(), 0.25, 5, 50).unwrap();
    assert_eq!(v.verdict, Verdict::FailsWithWitness);
    match v.witness {
        Some(Witness::NoShift { k, min_defect, .. }) => {
            assert_eq!(k, 1);
            assert!(min_defect > 0.25);
        }
        other => panic!("{other:?}"),
    }
}

/// Brute force: gap words in `{1..M}^k` whose blocks fit together under
/// some admissible filling of the free positions.
fn oracle_counts(sys: &DynSystem, p: &[u8], tau: usize, window: usize, m: u32, depth: usize) -> Vec<u64> {
    let block = &p[..tau + window];
    let alphabet = sys.alphabet_size().unwrap();
    let mut out = Vec::new();
    for k in 1..=depth {
        let mut count = 0;
        for code in 0..(m as usize).pow(k as u32) {
            let gaps: Vec<usize> = (0..k).map(|i| code / (m as usize).pow(i as u32) % m as usize + 1).collect();
            let mut pattern: Vec<Option<u8>> = Vec::new();
            let mut s = 0;
            let mut ok = true;
            for j in 0..=k {
                if j > 0 {
                    s += tau + gaps[j - 1];
                }
                if pattern.len() < s + block.len() {
                    pattern.resize(s + block.len(), None);
                }
                for (i, &b) in block.iter().enumerate() {
                    match pattern[s + i] {
                        Some(c) if c != b => ok = false,
                        _ => pattern[s + i] = Some(b),
                    }
                }
            }
            if ok {
                let free: Vec<usize> = (0..pattern.len()).filter(|&i| pattern[i].is_none()).collect();
                ok = (0..(alphabet as usize).pow(free.len() as u32)).any(|fill| {
                    let mut w: Vec<u8> = pattern.iter().map(|c| c.unwrap_or(0)).collect();
                    for (n, &i) in free.iter().enumerate() {
                        w[i] = (fill / (alphabet as usize).pow(n as u32) % alphabet as usize) as u8 + 1;
                    }
                    sys.is_admissible(&w).unwrap()
                });
            }
            count += ok as u64;
        }
        out.push(count);
    }
    out
}

#[test]
fn induced_shift_counts_match_brute_force() {
    for (sys, eps, m) in [
        (DynSystem::full_shift(2), 0.125, 2u32),
        (DynSystem::golden_mean_shift(), 0.25, 2),
        (DynSystem::golden_mean_shift(), 0.125, 3),
        (DynSystem::full_shift(3), 0.125, 2),
    ] {
        let p = sys.transitive_point().unwrap();
        let w = non_rigidity_witnesses(&sys, &p, eps, m as usize - 1, 200).unwrap();
        let tau = m as u64 + w.max_tau(m as usize - 1) + 3;
        let ind = induced_shift_approx(&sys, &w, tau, eps, m, 5, None, &limits()).unwrap();
        let window = DynSystem::symbol_window(eps).unwrap();
        assert_eq!(ind.counts, oracle_counts(&sys, symbols(&p), tau as usize, window, m, 5), "{}", sys.name());
        for k in 1..=5 {
            let c = ind.count(k).unwrap();
            assert!(c <= (m as u64).pow(k as u32));
            assert!(c <= m as u64 * ind.count(k - 1).unwrap());
        }
        assert!(ind.uniqueness_checked && ind.uniqueness_violations.is_empty());
        assert!(ind.verify(&sys).unwrap());
    }
}

#[test]
fn induced_shift_single_gap() {
    let sys = DynSystem::full_shift(2);
    let p = sys.transitive_point().unwrap();
    let w = non_rigidity_witnesses(&sys, &p, 0.25, 1, 100).unwrap();
    let ind = induced_shift_approx(&sys, &w, 10, 0.25, 1, 6, None, &limits()).unwrap();
    assert_eq!(ind.counts, vec![1; 6]);
    assert_eq!(ind.entropy, 0.0);
    // τ must exceed M + max τ_k
    let w2 = non_rigidity_witnesses(&sys, &p, 0.25, 2, 100).unwrap();
    let bound = 3 + w2.max_tau(2);
    assert!(induced_shift_approx(&sys, &w2, bound, 0.25, 3, 2, None, &limits()).is_err());
    assert!(induced_shift_approx(&sys, &w2, bound + 1, 0.25, 3, 2, None, &limits()).is_ok());
}

#[test]
fn induced_shift_on_the_torus_filters_the_net() {
    let sys = DynSystem::skew_product(Alpha::golden());
    let p = sys.transitive_point().unwrap();
    let w = non_rigidity_witnesses(&sys, &p, 0.3, 1, 200).unwrap();
    let net = sys.grid_net(60).unwrap();
    let tau = 2 + w.max_tau(1) + 1;
    let ind = induced_shift_approx(&sys, &w, tau, 0.09, 2, 3, Some(&net), &limits()).unwrap();
    assert!(!ind.exact);
    assert!(ind.verify(&sys).unwrap());
    assert!(induced_shift_approx(&sys, &w, tau, 0.09, 2, 3, None, &limits()).is_err());
}

#[test]
fn lambda_single_gap_is_one_orbit() {
    let sys = DynSystem::full_shift(2);
    let p = sys.transitive_point().unwrap();
    let w = non_rigidity_witnesses(&sys, &p, 0.25, 1, 100).unwrap();
    for tau in [10u64, 20] {
        let ind = induced_shift_approx(&sys, &w, tau, 0.25, 1, 4, None, &limits()).unwrap();
        let l = lambda_build(&sys, &ind, &[], 1..=3).unwrap();
        assert_eq!(l.e_size, 1);
        assert_eq!(l.rate_bound, 0.0);
        assert_eq!(l.sample_count, tau as usize + 1);
        assert!(l.rows.iter().all(|r| r.measured == 1 && r.holds));
        assert!(l.rate_holds && l.invariance_holds);
    }
}

#[test]
fn lambda_counts_respect_the_bound() {
    let sys = DynSystem::full_shift(2);
    let p = sys.transitive_point().unwrap();
    let w = non_rigidity_witnesses(&sys, &p, 0.125, 1, 100).unwrap();
    let tau = 12;
    let ind = induced_shift_approx(&sys, &w, tau, 0.125, 2, 5, None, &limits()).unwrap();
    let e = sys.word_net(2).unwrap();
    let l = lambda_build(&sys, &ind, &e, 1..=3).unwrap();
    // (1, 1/8)-separated: distinct 2-words
    assert_eq!(l.e_size, 4);
    assert!(l.rows.iter().all(|r| r.holds && r.exact_cylinders));
    assert!((l.rate_bound - (2f64.ln() + 4f64.ln()) / 12.0).abs() < 1e-15);
    assert!(l.rate_holds);
    // independent recount of the last row at 2ε = 1/4: distinct words of length nτ
    let n = l.rows.last().unwrap().time;
    let distinct: HashSet<&[u8]> = l.samples.iter().map(|s| &symbols(s)[..n]).collect();
    assert_eq!(l.rows.last().unwrap().measured, distinct.len());
    assert!(lambda_build(&sys, &ind, &e, 0..=2).is_err());
}

#[test]
fn proper_subsystem_full_shift() {
    let sys = DynSystem::full_shift(2);
    let r = proper_subsystem_demo(&sys, 0.3, 0.25, &limits()).unwrap();
    assert!(r.completed, "{:?}", r.stages);
    assert_eq!(r.eta_prime, Some(1.0 / 16.0));
    assert_eq!(r.bigm, Some(3));
    assert_eq!(r.e_size, Some(16));
    assert_eq!(r.tau, Some(13));
    assert!(r.rate_bound.unwrap() < 0.3);
    assert!(r.measured_rate.unwrap() < 0.3);
    let word = r.witness_word.clone().unwrap();
    assert_eq!(word, vec![2, 2, 2]);
    let l = r.lambda.as_ref().unwrap();
    assert!(l.samples.iter().all(|s| &symbols(s)[..3] != word.as_slice()));
    assert!(r.witness_distance.unwrap() >= 0.125);

    let torus = DynSystem::golden_rotation();
    let r = proper_subsystem_demo(&torus, 0.3, 0.25, &limits()).unwrap();
    assert!(!r.completed && !r.stages[0].ok);
    assert!(proper_subsystem_demo(&sys, 0.0, 0.25, &limits()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn family_pairs_separate(levels in 0usize..=4, fine in any::<bool>()) {
        let sys = DynSystem::full_shift(2);
        let p = sys.transitive_point().unwrap();
        let (eps, m) = if fine { (0.125, 2u32) } else { (0.25, 1) };
        let w = non_rigidity_witnesses(&sys, &p, eps, 2 * m as usize - 1, 200).unwrap();
        let f = build_separated_family(&sys, &w, eps, levels, m, None, &limits()).unwrap();
        prop_assert_eq!(f.members.len(), 1 << levels);
        prop_assert!(f.certified);
        for pair in &f.pairs {
            let a = sys.iterate(&f.members[pair.i].z, pair.time).unwrap();
            let b = sys.iterate(&f.members[pair.j].z, pair.time).unwrap();
            prop_assert!(sys.distance(&a, &b).unwrap() > eps);
        }
    }

    #[test]
    fn closeness_is_least(x in 0.0f64..1.0, m in 0u64..6) {
        let rot = DynSystem::golden_rotation();
        let y = Point::circle(x);
        let shifted = rot.iterate(&y, m).unwrap();
        let found = shift_closeness_search(&rot, &shifted, &y, 1e-9, 8, 20).unwrap();
        prop_assert_eq!(found, Some(m));
        // an isometry moves every point by the same amount
        let d0 = follow_defect(&rot, &y, m + 1, 10).unwrap();
        let d1 = follow_defect(&rot, &Point::circle(0.0), m + 1, 10).unwrap();
        prop_assert!((d0 - d1).abs() < 1e-9);
    }
}
