use proptest::prelude::*;
use rwre_core::{
    event_g, event_g_bruteforce, first_hit, g_witness, reachable_erasures, Cmp, Direction, JumpLaw, Site, WalkPath,
};

const JUMPS: [[i64; 2]; 3] = [[0, 1], [1, -1], [-2, 0]];

fn law() -> JumpLaw {
    JumpLaw::from_pairs(&[(JUMPS[0], 1), (JUMPS[1], 1), (JUMPS[2], 1)]).unwrap()
}

fn path_from(steps: &[usize]) -> WalkPath {
    let mut x = Site::origin(2);
    let mut sites = vec![x.clone()];
    for &k in steps {
        x = x.add(&Site::from(JUMPS[k]));
        sites.push(x.clone());
    }
    WalkPath(sites)
}

fn direction() -> impl Strategy<Value = Direction> {
    (0.0..std::f64::consts::TAU).prop_map(|t| Direction::new(&[t.cos(), t.sin()]).unwrap())
}

fn thresholds() -> impl Strategy<Value = (f64, f64)> {
    (-3i32..=3, -3i32..=3)
        .prop_filter("a != b", |(a, b)| a != b)
        .prop_map(|(a, b)| (a as f64, b as f64))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn dp_matches_oracle(steps in prop::collection::vec(0usize..3, 0..12), dir in direction(), (a, b) in thresholds()) {
        let path = path_from(&steps);
        prop_assert_eq!(event_g(&path, &dir, a, b).unwrap(), event_g_bruteforce(&path, &dir, a, b).unwrap());
    }

    #[test]
    fn closure_elements_are_valid_paths(steps in prop::collection::vec(0usize..3, 0..12)) {
        let path = path_from(&steps);
        let all = reachable_erasures(&path).unwrap();
        prop_assert!(all.contains(&path));
        for y in &all {
            y.validate(&law()).unwrap();
            prop_assert_eq!(&y.sites()[0], &path.sites()[0]);
            prop_assert_eq!(y.last(), path.last());
        }
    }

    #[test]
    fn event_survives_any_suffix(
        steps in prop::collection::vec(0usize..3, 0..12),
        suffix in prop::collection::vec(0usize..3, 0..8),
        dir in direction(),
        (a, b) in thresholds(),
    ) {
        let short = path_from(&steps);
        let mut all = steps.clone();
        all.extend(&suffix);
        let long = path_from(&all);
        if event_g(&short, &dir, a, b).unwrap() {
            prop_assert!(event_g(&long, &dir, a, b).unwrap());
        }
    }

    #[test]
    fn witness_reaches_target_before_bad_side(
        steps in prop::collection::vec(0usize..3, 0..40),
        dir in direction(),
        (a, b) in thresholds(),
    ) {
        let path = path_from(&steps);
        if let Some(fam) = g_witness(&path, &dir, a, b).unwrap() {
            let (target, bad) = if a < b { (Cmp::Ge, Cmp::Lt) } else { (Cmp::Le, Cmp::Gt) };
            let t = first_hit(&path, &dir, target, b).unwrap();
            let y = fam.apply(&path.prefix(t)).unwrap();
            let hit = first_hit(&y, &dir, target, b).unwrap();
            prop_assert_eq!(hit, y.len() - 1);
            prop_assert!(first_hit(&y, &dir, bad, a).is_none());
        }
    }
}
