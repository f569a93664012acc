use proptest::prelude::*;

use multirank::oracles::*;
use multirank::toeplitz::{Pattern, ToeplitzSkeleton};
use multirank::words::{scale_of_difference, shift_window, Alphabet, CenteredWord, DistanceScale, Symbol};
use multirank::{catalog, LanguageTable, Substitution, System};

fn bin() -> Alphabet {
    Alphabet::new(2).unwrap()
}

fn window(radius: i64) -> impl Strategy<Value = CenteredWord> {
    prop::collection::vec(0u8..2, (2 * radius + 1) as usize)
        .prop_map(move |v| CenteredWord::new(v.into_iter().map(Symbol).collect(), -radius).unwrap())
}

proptest! {
    #[test]
    fn scale_is_symmetric(a in window(6), b in window(6)) {
        prop_assert_eq!(
            scale_of_difference(&a, &b, bin()).unwrap(),
            scale_of_difference(&b, &a, bin()).unwrap()
        );
    }

    #[test]
    fn metric_is_an_ultrametric(a in window(5), b in window(5), c in window(5)) {
        let d = |x: &CenteredWord, y: &CenteredWord| scale_of_difference(x, y, bin()).unwrap().scale.metric::<f64>();
        prop_assert!(d(&a, &c) <= d(&a, &b).max(d(&b, &c)));
        prop_assert_eq!(d(&a, &a), 0.0);
    }

    #[test]
    fn shifts_compose(a in window(8), g in -8i64..8, h in -8i64..8) {
        prop_assume!((g + h).abs() <= 8);
        let twice = shift_window(&shift_window(&a, g).unwrap(), h).unwrap();
        prop_assert_eq!(twice, shift_window(&a, g + h).unwrap());
    }

    #[test]
    fn shifting_both_windows_shifts_the_comparison(a in window(8), b in window(8), g in -3i64..3) {
        // agreement on [g-k, g+k] of the originals is agreement on [-k, k] of the shifts
        let (sa, sb) = (shift_window(&a, g).unwrap(), shift_window(&b, g).unwrap());
        for k in 0..4i64 {
            prop_assert_eq!(a.slice(g - k, g + k) == b.slice(g - k, g + k), sa.slice(-k, k) == sb.slice(-k, k));
        }
    }

    #[test]
    fn expansion_composes(seed in 0usize..4, j in 0u32..3, k in 0u32..3, cut_seed in 0u64..1024) {
        let s = Substitution::from_images(&["01", "10"]).unwrap();
        let words = ["0110", "1001", "0100", "1101"];
        let w = CenteredWord::new(words[seed].parse::<multirank::Word>().unwrap().0, -2).unwrap();
        let qk = 1u64 << k;
        let cut = cut_seed % (1u64 << (j + k));
        let direct = s.expand(&w, j + k, cut).unwrap();
        let staged = s.expand(&s.expand(&w, j, cut / qk).unwrap(), k, cut % qk).unwrap();
        prop_assert_eq!(direct, staged);
    }

    #[test]
    fn random_skeletons_are_toeplitz(
        ratio in 2usize..4,
        stages in prop::collection::vec((0usize..4, prop::collection::vec(0u8..3, 4)), 1..4),
    ) {
        let patterns: Vec<Pattern> = stages
            .iter()
            .map(|(hole, syms)| {
                Pattern((0..ratio).map(|i| if i == hole % ratio { None } else { Some(Symbol(syms[i])) }).collect())
            })
            .collect();
        let t = ToeplitzSkeleton::new(patterns).unwrap();
        prop_assert!(t.check_toeplitz(1 << 12).holds());
    }

    #[test]
    fn budget_text_round_trips(l in 1u64..9, n in 1u64..999, k in 1u64..6, b in 1u64..20, m in 1usize..7) {
        let budget = SearchBudget { cylinder_radius: l, horizon: n, scale: k, block: b, arity: m, ladder: vec![1, 3, 9] };
        prop_assert_eq!(budget.to_string().parse::<SearchBudget>().unwrap(), budget);
    }
}

#[test]
fn languages_are_factor_closed() {
    for sel in catalog::Catalog::builtin().selectors() {
        let spec = catalog::get(&sel).unwrap();
        let t = LanguageTable::build(&spec.system, 8).unwrap();
        assert!(t.is_factor_closed(), "{sel}");
    }
}

fn budget(s: &str) -> SearchBudget {
    s.parse().unwrap()
}

#[test]
fn dropping_a_point_keeps_a_certificate() {
    let tm = catalog::get("thue-morse").unwrap().system;
    let rep = m_sensitivity_test("thue-morse", &tm, &budget("m=4,N=64")).unwrap();
    let mut cert = rep.verdict.certificate().unwrap().clone();
    replay_against(&cert, &tm).unwrap();
    if let Witness::Sensitivity { arity, tuples, .. } = &mut cert.witness {
        *arity -= 1;
        for t in tuples {
            t.points.pop();
            t.scales.pop();
            for row in &mut t.scales {
                row.pop();
            }
        }
    }
    cert.budget.arity -= 1;
    replay_against(&cert, &tm).unwrap();
}

#[test]
fn verdicts_are_monotone_in_m_and_horizon() {
    for sel in ["thue-morse", "period-doubling", "ternary-morse", "toeplitz-rank:r=3"] {
        let sys = catalog::get(sel).unwrap().system;
        let mut prev = true;
        for m in 2..=6 {
            let w = m_sensitivity_test(sel, &sys, &budget(&format!("m={m},N=128"))).unwrap().verdict.is_witnessed();
            assert!(prev || !w, "{sel}: witnessed at m={m} but not at m-1");
            prev = w;
            if w {
                let wider = m_sensitivity_test(sel, &sys, &budget(&format!("m={m},N=256"))).unwrap();
                assert!(wider.verdict.is_witnessed(), "{sel} m={m}");
            }
        }
    }
}

#[test]
fn block_witnesses_are_plain_witnesses_along_the_block() {
    let tm = catalog::get("thue-morse").unwrap().system;
    let b = budget("m=2,K=2,B=8");
    let rep = block_m_sensitivity_test("thue-morse", &tm, &b).unwrap();
    let Some(Certificate { witness: Witness::Block { tuples, .. }, .. }) = rep.verdict.certificate() else {
        panic!("no block witness");
    };
    for t in tuples {
        let half = t.block.unwrap() as i64;
        // strict separation: a difference already inside [-(K-1), K-1]
        for g in t.shift - half..=t.shift + half {
            let a = shift_window(&t.points[0], g).unwrap().truncate(b.scale - 1).unwrap();
            let c = shift_window(&t.points[1], g).unwrap().truncate(b.scale - 1).unwrap();
            let s = scale_of_difference(&a, &c, bin()).unwrap().scale;
            assert!(s.at_least(b.scale - 1), "g={g}: {s}");
            assert!(s != DistanceScale::Beyond);
        }
    }
}

#[test]
fn sensitivity_and_equicontinuity_points_exclude_each_other() {
    for sel in ["thue-morse", "period-doubling", "ternary-morse", "gen-morse", "trivial-1"] {
        let spec = catalog::get(sel).unwrap();
        for m in 2..=6 {
            let b = budget(&format!("m={m},L=4,ladder=4,N=128"));
            let agg = m_sensitivity_test(sel, &spec.system, &b).unwrap().verdict;
            let x = spec.system.seed_point(None, 8).unwrap();
            let point = m_equicontinuity_point_test(sel, &spec.system, &x, &b).unwrap();
            assert!(
                !(agg.is_witnessed() && point.class() == "ConsistentUpTo"),
                "{sel} m={m}"
            );
        }
    }
}

#[test]
fn census_counts_over_thue_morse_residues() {
    let tm = catalog::get("thue-morse").unwrap().system;
    let System::Substitution(s) = &tm else { unreachable!() };
    for d in 1..=5u32 {
        for v in 0..(1u64 << d) {
            let r = multirank::odometer::OdometerResidue::new(2, d, v).unwrap();
            let c = multirank::odometer::fiber_census(s, r, 32).unwrap().count();
            let expect = if r.extends_to_orbit_of_zero() { 4 } else { 2 };
            assert_eq!(c, expect, "{r}");
        }
    }
}
