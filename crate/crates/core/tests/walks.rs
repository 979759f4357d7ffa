use rwre_core::walk::{run_two_walks_with_ids, step_probabilities};
use rwre_core::{
    first_hit, run_two_walks, run_walk, Cmp, Direction, DirichletLaw, EnvSeed, JumpLaw, Site, StopReason, StopRule,
};

fn fig3() -> DirichletLaw {
    DirichletLaw::new(JumpLaw::from_pairs(&[([0, 1], 2), ([1, -1], 2), ([-2, 0], 1)]).unwrap()).unwrap()
}

fn e1() -> Direction {
    Direction::new(&[1.0, 0.0]).unwrap()
}

fn rule() -> StopRule {
    StopRule::horizon(500).with_half_space(e1(), Cmp::Ge, 3.0).with_half_space(e1(), Cmp::Lt, -2.0)
}

fn right_first(reason: StopReason) -> bool {
    reason == StopReason::HalfSpace(0)
}

/// Two proportions over `n` trials agree within 4 standard errors of their
/// difference.
fn close(k1: usize, k2: usize, n: usize) -> bool {
    let (p1, p2) = (k1 as f64 / n as f64, k2 as f64 / n as f64);
    let p = (p1 + p2) / 2.0;
    let se = (2.0 * p * (1.0 - p) / n as f64).sqrt();
    (p1 - p2).abs() <= 4.0 * se.max(1e-9)
}

#[test]
fn second_walk_has_the_single_walk_marginal() {
    let dlaw = fig3();
    let origin = Site::origin(2);
    let n = 10_000;
    let master = EnvSeed::new(11);
    let (mut single, mut second) = (0, 0);
    for t in 0..n as u64 {
        // distinct environments for the two estimators
        let s1 = run_walk(&dlaw, master.for_trial(2 * t), t, &origin, &rule()).unwrap();
        let (_, w2) = run_two_walks(&dlaw, master.for_trial(2 * t + 1), t, &origin, &origin, &rule(), &rule()).unwrap();
        single += right_first(s1.stop_reason) as usize;
        second += right_first(w2.stop_reason) as usize;
    }
    assert!(close(single, second, n), "{single} vs {second}");
}

#[test]
fn swapping_walk_ids_keeps_marginals() {
    let dlaw = fig3();
    let origin = Site::origin(2);
    let n = 10_000;
    let master = EnvSeed::new(12);
    let (mut a, mut b) = (0, 0);
    for t in 0..n as u64 {
        let (x, _) = run_two_walks_with_ids(&dlaw, master.for_trial(t), t, [0, 1], &origin, &origin, &rule(), &rule())
            .unwrap();
        let (y, _) = run_two_walks_with_ids(&dlaw, master.for_trial(t), t, [1, 0], &origin, &origin, &rule(), &rule())
            .unwrap();
        a += right_first(x.stop_reason) as usize;
        b += right_first(y.stop_reason) as usize;
    }
    assert!(close(a, b, n), "{a} vs {b}");
}

#[test]
fn records_replay_and_recompute() {
    let dlaw = fig3();
    for t in 0..300u64 {
        let seed = EnvSeed::new(5).for_trial(t);
        let rec = run_walk(&dlaw, seed, t, &Site::origin(2), &rule()).unwrap();
        rec.path.validate(dlaw.law()).unwrap();
        assert!(rec.path.len() <= 501);
        assert!(step_probabilities(&dlaw, seed, &rec.path).unwrap().iter().all(|&p| p > 0.0));
        assert_eq!(rec.hit_indices.half_space[0], first_hit(&rec.path, &e1(), Cmp::Ge, 3.0));
        assert_eq!(rec.hit_indices.half_space[1], first_hit(&rec.path, &e1(), Cmp::Lt, -2.0));
    }
}

#[test]
fn deterministic_law_walks_in_lockstep() {
    let dlaw = DirichletLaw::new(JumpLaw::from_pairs(&[([1, 0], 1)]).unwrap()).unwrap();
    let rule = StopRule::horizon(7);
    let (a, b) =
        run_two_walks(&dlaw, EnvSeed::new(0), 0, &Site::origin(2), &Site::from([0, 3]), &rule, &rule).unwrap();
    for (k, (x, y)) in a.path.sites().iter().zip(b.path.sites()).enumerate() {
        assert_eq!(x.coords(), &[k as i64, 0]);
        assert_eq!(y.coords(), &[k as i64, 3]);
    }
}
