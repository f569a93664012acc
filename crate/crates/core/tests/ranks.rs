use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use multirank::catalog;
use multirank::odometer::column_number;
use multirank::ranks::*;
use multirank::toeplitz::check_toeplitz_property;
use multirank::words::{Symbol, Word};
use multirank::{LanguageTable, Substitution, System};

fn sub(images: &[&str]) -> Substitution {
    Substitution::from_images(images).unwrap()
}

fn report(name: &str) -> RankReport {
    let spec = catalog::get(name).unwrap();
    rank_report(&spec.name, &spec.system, &RankConfig::default()).unwrap()
}

#[test]
fn coincidence_ranks() {
    assert_eq!(coincidence_rank(&sub(&["01", "10"])).unwrap().value, RankValue::Finite(2));
    assert_eq!(coincidence_rank(&sub(&["01", "00"])).unwrap().value, RankValue::Finite(1));
    assert_eq!(coincidence_rank(&sub(&["00"])).unwrap().value, RankValue::Finite(1));
    let e = coincidence_rank(&sub(&["01", "10"])).unwrap();
    assert_eq!(e.kind, EstimateKind::Exact);
    assert_eq!(e.evidence.method, "pair-graph");
    // outside the exact regime: only a bound
    assert_eq!(coincidence_rank(&sub(&["0", "1"])).unwrap().kind, EstimateKind::LowerBound);
}

#[test]
fn thue_morse_ranks() {
    let r = report("thue-morse");
    assert_eq!(r.r_c.value, RankValue::Finite(2));
    assert_eq!(r.r_m.value, RankValue::Finite(2));
    assert_eq!(r.r_max.value, RankValue::Finite(4));
    assert_eq!(r.r_m.kind, EstimateKind::Stabilized);
    assert_eq!(r.r_max.kind, EstimateKind::Stabilized);
    assert!(r.chain_holds());
    assert!(!r.almost_automorphic);
}

#[test]
fn small_systems() {
    let t = report("trivial-1");
    assert_eq!([t.r_c.value, t.r_m.value, t.r_max.value], [RankValue::Finite(1); 3]);
    let ternary = report("ternary-morse");
    assert_eq!(ternary.r_m.value, RankValue::Finite(3));
    let pd = report("period-doubling");
    assert_eq!(pd.r_c.value, RankValue::Finite(1));
    assert!(pd.almost_automorphic);
}

#[test]
fn every_golden_is_reproduced() {
    let cat = catalog::Catalog::builtin();
    for sel in cat.selectors() {
        let spec = cat.get_selector(&sel).unwrap();
        if spec.goldens.is_empty() {
            continue;
        }
        let r = rank_report(&spec.name, &spec.system, &RankConfig::default()).unwrap();
        assert!(r.chain_holds(), "{sel}");
        for g in &spec.goldens {
            let e = match g.rank.as_str() {
                "r_c" => &r.r_c,
                "r_m" => &r.r_m,
                "r_M" => &r.r_max,
                other => panic!("{other}"),
            };
            assert_eq!(e.value, RankValue::Finite(g.value), "{sel} {}", g.rank);
            assert_ne!(e.kind, EstimateKind::LowerBound, "{sel} {}", g.rank);
        }
    }
    for r in [2, 4] {
        let spec = catalog::get(&format!("toeplitz-rank:r={r}")).unwrap();
        let rep = rank_report(&spec.name, &spec.system, &RankConfig::default()).unwrap();
        assert_eq!(rep.r_max.value, RankValue::Finite(r));
        assert_eq!(rep.r_m.value, RankValue::Finite(1));
    }
}

#[test]
fn catalog_substitutions_are_primitive_and_aperiodic() {
    let cat = catalog::Catalog::builtin();
    for sel in cat.selectors() {
        let spec = cat.get_selector(&sel).unwrap();
        let Some(s) = spec.system.as_substitution() else { continue };
        let regime = s.regime();
        assert!(regime.primitive, "{sel}");
        assert_eq!(regime.aperiodic, sel != "trivial-1", "{sel}");
        assert_eq!(regime.is_exact(), spec.exact, "{sel}");
    }
}

#[test]
fn profiles() {
    let p = predict_profile(&report("thue-morse"), 5);
    for m in 2..=4 {
        assert!(p.row(m).unwrap().sensitive);
    }
    assert!(p.row(5).unwrap().equicontinuous);
    assert!(p.row(2).unwrap().compactly_sensitive);
    for m in 3..=5 {
        assert!(p.row(m).unwrap().cover_equicontinuous);
    }
    let one = predict_profile(&RankReport::equicontinuous("odometer"), 6);
    assert!(one.rows.iter().all(|r| r.equicontinuous && r.cover_equicontinuous));
    for row in &p.rows {
        assert_eq!(row.sensitive, !row.equicontinuous);
        assert_eq!(row.compactly_sensitive, !row.cover_equicontinuous);
    }
}

#[test]
fn extension_inequality() {
    let tm = report("thue-morse");
    assert!(check_extension_inequality(&tm, &tm, true).unwrap());
    let toeplitz = report("toeplitz-pd");
    let odometer = RankReport::equicontinuous("odometer");
    assert!(check_extension_inequality(&toeplitz, &odometer, true).unwrap());
    let x = RankReport::synthetic("x", RankValue::Finite(1), RankValue::Finite(1), RankValue::Finite(1));
    let y = RankReport::synthetic("y", RankValue::Finite(2), RankValue::Finite(2), RankValue::Finite(2));
    assert!(!check_extension_inequality(&x, &y, true).unwrap());
    assert!(check_extension_inequality(&x, &y, false).is_err());
    let inf = RankReport::synthetic("gw", RankValue::Finite(2), RankValue::Infinite, RankValue::Infinite);
    assert!(check_extension_inequality(&inf, &inf, true).unwrap());
}

/// Complexity `p(1..=12)` of the ternary Morse system summed over windows of three.
const TERNARY_FACTOR_COMPLEXITY: [usize; 12] = [3, 7, 10, 13, 15, 17, 19, 21, 24, 27, 30, 33];

#[test]
fn ternary_sum_factor_is_toeplitz() {
    let ternary = System::Substitution(sub(&["012", "120", "201"]));
    let image = sliding_block_factor(ternary.clone(), 3, LocalRule::SumMod(3), 12).unwrap();
    assert!(image.is_factor_closed());
    let complexity: Vec<usize> = (1..=12).map(|n| image.complexity(n)).collect();
    assert_eq!(complexity, TERNARY_FACTOR_COMPLEXITY);
    let source = LanguageTable::build(&ternary, 12).unwrap();
    for n in 1..=12 {
        assert!(image.complexity(n) <= source.complexity(n));
    }

    // one-sided fixed point, summed in threes
    let s = ternary.as_substitution().unwrap();
    let u = s.apply_power(&[Symbol(0)], 8);
    let y: Vec<Symbol> = u
        .windows(3)
        .take(1 << 12)
        .map(|w| Symbol((w.iter().map(|c| c.0).sum::<u8>()) % 3))
        .collect();
    let periods: Vec<u64> = (1..=8).map(|j| 3u64.pow(j)).collect();
    let check = check_toeplitz_property(&y, &periods);
    assert!(check.holds(), "failures at {:?}", &check.failures[..check.failures.len().min(8)]);
    assert_eq!(check.positions, 1 << 12);
}

#[test]
fn thue_morse_xor_factor_matches_a_substitution() {
    let tm = catalog::get("tm-factor").unwrap().system;
    let other = LanguageTable::build(&sub(&["11", "10"]), 12).unwrap();
    assert_eq!(LanguageTable::build(&tm, 12).unwrap(), other);
}

fn random_exact(rng: &mut ChaCha8Rng) -> Substitution {
    loop {
        let n = rng.gen_range(2..=3usize);
        let q = rng.gen_range(2..=4usize);
        let rules: Vec<Word> = (0..n)
            .map(|_| Word((0..q).map(|_| Symbol(rng.gen_range(0..n) as u8)).collect()))
            .collect();
        if let Ok(s) = Substitution::new(rules) {
            if s.regime().is_exact() {
                return s;
            }
        }
    }
}

#[test]
fn pair_graph_census_and_columns_agree_on_random_substitutions() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let cfg = RankConfig {
        depth: 3,
        radius: 32,
        random_samples: 4,
        ..RankConfig::default()
    };
    for _ in 0..40 {
        let s = random_exact(&mut rng);
        let c = column_number(&s, 8).unwrap().c as u64;
        assert_eq!(coincidence_rank(&s).unwrap().value, RankValue::Finite(c), "{s}");
        let sys = System::Substitution(s.clone());
        assert_eq!(minimal_rank(&sys, &cfg).unwrap().value, RankValue::Finite(c), "{s}");
    }
}
