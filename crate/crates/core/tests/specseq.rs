use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use cubepsc_core::specseq::{build_filtration_couple, random_filtered_complex, summarize, summarize_group_couple, CoupleFile};

fn fixture(name: &str) -> String {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn fixtures_pass_every_check() {
    for name in ["times_two.json", "square_filtered.json", "s3_couple.json", "monoid.json"] {
        let file: CoupleFile = serde_json::from_str(&fixture(name)).unwrap();
        let s = summarize(&file, 3).unwrap();
        let failed: Vec<_> = s.checks.iter().filter(|c| !c.report.passed()).map(|c| &c.name).collect();
        assert!(s.passed, "{}: {:?}", name, failed);
    }
}

#[test]
fn multiplication_by_two_leaves_torsion() {
    let file: CoupleFile = serde_json::from_str(&fixture("times_two.json")).unwrap();
    let s = summarize(&file, 3).unwrap();
    let first: Vec<_> = s.pages[0].nodes.iter().map(|n| (n.p, n.q, n.group.as_str())).collect();
    assert_eq!(first, vec![(0, 0, "Z"), (1, 0, "Z/2")]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]
    #[test]
    fn random_filtrations_converge_to_graded_homology(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fc = random_filtered_complex(&mut rng, 3, 3, 5);
        let couple = build_filtration_couple(&fc, 4).unwrap();
        let s = summarize_group_couple(&couple, 3, Some(&fc)).unwrap();
        let failed: Vec<_> = s.checks.iter().filter(|c| !c.report.passed()).map(|c| c.name.clone()).collect();
        prop_assert!(s.passed, "{:?}", failed);
    }
}
