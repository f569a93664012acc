use multirank::odometer::{fiber_census, OdometerResidue};
use multirank::oracles::*;
use multirank::words::{CenteredWord, Symbol, Word};
use multirank::{Substitution, System};

fn sub(images: &[&str]) -> System {
    System::Substitution(Substitution::from_images(images).unwrap())
}

fn tm() -> System {
    sub(&["01", "10"])
}

fn pd() -> System {
    sub(&["01", "00"])
}

fn trivial() -> System {
    sub(&["00"])
}

fn budget(spec: &str) -> SearchBudget {
    spec.parse().unwrap()
}

fn seed_point(s: &System, k: u32) -> CenteredWord {
    let s = s.as_substitution().unwrap();
    let seed = s.seed_pairs().unwrap()[0];
    s.seed_window(seed, k).unwrap()
}

#[test]
fn pair_graph() {
    let tm = Substitution::from_images(&["01", "10"]).unwrap();
    let pd = Substitution::from_images(&["01", "00"]).unwrap();
    assert_eq!(proximal_pair_exact(&tm, Symbol(0), Symbol(0)).unwrap(), Proximity::Proximal);
    assert_eq!(proximal_pair_exact(&tm, Symbol(0), Symbol(1)).unwrap(), Proximity::Distal);
    assert_eq!(proximal_pair_exact(&pd, Symbol(0), Symbol(1)).unwrap(), Proximity::Proximal);
    let not_primitive = Substitution::from_images(&["00", "11"]).unwrap();
    assert!(proximal_pair_exact(&not_primitive, Symbol(0), Symbol(1)).is_err());
}

#[test]
fn proximal_search_agrees_with_pair_graph() {
    let b = budget("K=4,N=64");
    for (sys, expect) in [(tm(), false), (pd(), true)] {
        let s = sys.as_substitution().unwrap();
        let (x, y) = aligned_pair(s, Symbol(0), Symbol(1), 7).unwrap();
        let v = proximal_pair_search("t", &sys, &x, &y, &b).unwrap();
        assert_eq!(v.is_witnessed(), expect, "{}", sys.describe_short());
        if let Some(c) = v.certificate() {
            replay_against(c, &sys).unwrap();
        }
        let same = proximal_pair_search("t", &sys, &x, &x, &b).unwrap();
        match &same.certificate().unwrap().witness {
            Witness::Proximal { shift, .. } => assert_eq!(*shift, 0),
            w => panic!("{w:?}"),
        }
    }
}

trait Short {
    fn describe_short(&self) -> String;
}

impl Short for System {
    fn describe_short(&self) -> String {
        use multirank::Subshift;
        self.describe()
    }
}

#[test]
fn regional_proximality() {
    let sys = tm();
    let s = sys.as_substitution().unwrap();
    let x = seed_point(&sys, 8);
    let b = budget("K=3,N=64");
    let v = regional_proximal_search("t", &sys, &[x.clone(), x.clone()], &b).unwrap();
    replay_against(v.certificate().unwrap(), &sys).unwrap();

    // two representatives of one fiber
    let r = OdometerResidue::new(2, 4, 5).unwrap();
    let fiber = fiber_census(s, r, 64).unwrap();
    let v = regional_proximal_search("t", &sys, &fiber.classes[..2], &b).unwrap();
    replay_against(v.certificate().expect("fiber pair is regionally proximal"), &sys).unwrap();

    // different residues mod 4
    let other = fiber_census(s, OdometerResidue::new(2, 4, 6).unwrap(), 64).unwrap();
    let b = budget("K=5,N=128");
    let tuple = [fiber.classes[0].truncate(40).unwrap(), other.classes[0].truncate(40).unwrap()];
    match regional_proximal_search("t", &sys, &tuple, &b).unwrap() {
        Verdict::Exhausted { note, .. } => assert!(note.unwrap().contains("residue mismatch")),
        v => panic!("{}", v.class()),
    }
}

#[test]
fn sensitivity_examples() {
    let v = m_sensitivity_test("tm", &tm(), &budget("m=2,K=1,L=2,N=64")).unwrap();
    assert!(v.verdict.is_witnessed());
    replay_against(v.verdict.certificate().unwrap(), &tm()).unwrap();

    let v = m_sensitivity_test("tm", &tm(), &budget("m=5,K=1,L=2,N=256")).unwrap();
    assert_eq!(v.verdict.class(), "Exhausted");
    assert_eq!(v.witness_free().len(), v.per_cylinder.len());

    let v = m_sensitivity_test("t", &trivial(), &budget("m=2")).unwrap();
    assert_eq!(v.verdict.class(), "Exhausted");
}

#[test]
fn block_examples() {
    let v = block_m_sensitivity_test("tm", &tm(), &budget("m=2,K=1,B=8")).unwrap();
    replay_against(v.verdict.certificate().expect("TM is block 2-sensitive"), &tm()).unwrap();
    let v = block_m_sensitivity_test("tm", &tm(), &budget("m=3,K=1,B=8,N=512")).unwrap();
    assert_eq!(v.verdict.class(), "Exhausted");
    let v = block_m_sensitivity_test("pd", &pd(), &budget("m=2,K=1,B=8")).unwrap();
    assert_eq!(v.verdict.class(), "Exhausted");
}

#[test]
fn point_tests() {
    let x = seed_point(&tm(), 6);
    let v = m_equicontinuity_point_test("tm", &tm(), &x, &budget("m=4,K=2,N=256,ladder=2:4:8")).unwrap();
    match &v {
        PointVerdict::CounterexampleFound(c) => replay_against(c, &tm()).unwrap(),
        v => panic!("{v:?}"),
    }
    let v = m_equicontinuity_point_test("tm", &tm(), &x, &budget("m=5,K=2,N=256,ladder=8")).unwrap();
    assert_eq!(v.class(), "ConsistentUpTo");
    let t = seed_point(&trivial(), 4);
    let v = m_equicontinuity_point_test("t", &trivial(), &t, &budget("m=2,ladder=2:4:8")).unwrap();
    assert_eq!(v.class(), "ConsistentUpTo");
}

#[test]
fn cover_tests() {
    let x = seed_point(&tm(), 6);
    match cover_m_equicontinuity_test("tm", &tm(), &x, &budget("m=3,K=2,N=512")).unwrap() {
        CoverVerdict::Witnessed { block, .. } => assert!(block <= 8),
        v => panic!("{v:?}"),
    }
    match cover_m_equicontinuity_test("tm", &tm(), &x, &budget("m=2,K=2")).unwrap() {
        CoverVerdict::FalsifiedUpTo(c) => replay_against(&c, &tm()).unwrap(),
        v => panic!("{v:?}"),
    }
    let t = seed_point(&trivial(), 4);
    assert_eq!(
        cover_m_equicontinuity_test("t", &trivial(), &t, &budget("m=2")).unwrap(),
        CoverVerdict::Witnessed { radius: 2, block: 0 }
    );
}

#[test]
fn return_sets() {
    use multirank::Subshift;
    let sys = tm();
    let u: Word = "01".parse().unwrap();
    let v: Word = "10".parse().unwrap();
    let got = return_set(&sys, &u, &v, 8).unwrap();
    // brute force over admissible words of length 2·8 + 2 + 2
    let mut want = std::collections::BTreeSet::new();
    for w in sys.language(20).unwrap() {
        let w = w.as_slice();
        for g in -8i64..=8 {
            // u at index 8, v at 8 - g
            let (pu, pv) = (8usize, (8 - g) as usize);
            if w[pu..pu + 2] == *u.as_slice() && w[pv..pv + 2] == *v.as_slice() {
                want.insert(g);
            }
        }
    }
    assert_eq!(got, want);
    assert!(!got.is_empty());
    assert!(return_set(&sys, &u, &u, 4).unwrap().contains(&0));
    let gap = max_gap(&return_set(&sys, &u, &u, 256).unwrap(), 256);
    assert!(gap > 0 && gap < 16, "gap {gap}");
    assert!(return_set(&sys, &"000".parse().unwrap(), &u, 4).is_err());
}

#[test]
fn certificates_round_trip_and_tampering_is_caught() {
    let v = m_sensitivity_test("tm", &tm(), &budget("m=2,K=1,N=64")).unwrap();
    let c = v.verdict.certificate().unwrap();
    let back = Certificate::from_json(&c.to_json().unwrap()).unwrap();
    assert_eq!(&back, c);
    replay(&back).unwrap();
    let mut bad = back.clone();
    if let Witness::Sensitivity { tuples, .. } = &mut bad.witness {
        tuples[0].shift += 1;
    }
    assert!(replay(&bad).is_err());
    assert!(replay_against(&back, &pd()).is_err());
}
