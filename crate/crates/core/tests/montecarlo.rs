use tipsy_core::graph::{cycle, petersen, torus};
use tipsy_core::montecarlo::{run, SimConfig, Start};
use tipsy_core::{SpinnerFour, SpinnerThree};

#[test]
fn six_cycle_mean_matches_exact_value() {
    let g = cycle(6).unwrap();
    let s = SpinnerFour::new(0.0, 0.5, 0.25, 0.25).unwrap();
    let mut cfg = SimConfig::new(&g, s, Start::Distance(1));
    cfg.trials = 1_000_000;
    cfg.max_rounds = 20_000;
    cfg.seed = 11;
    let rep = run(&cfg).unwrap();
    assert!(!rep.mean_is_lower_bound);
    assert!(
        rep.mean_rounds.z_score(34.0) <= 3.0,
        "{:?}",
        rep.mean_rounds
    );
}

#[test]
fn petersen_survival_matches_exact_value() {
    let g = petersen().unwrap();
    let s = SpinnerThree::new(0.5, 0.0, 0.5).unwrap().to_four();
    let mut cfg = SimConfig::new(&g, s, Start::Distance(1));
    cfg.trials = 1_000_000;
    cfg.seed = 12;
    let rep = run(&cfg).unwrap();
    assert!(
        rep.survival[7].z_score(85.0 / 2187.0) <= 3.0,
        "{:?}",
        rep.survival[7]
    );
}

#[test]
fn sober_cop_needs_exactly_d_rounds() {
    let g = torus(7, 7).unwrap();
    let s = SpinnerFour::new(1.0, 0.0, 0.0, 0.0).unwrap();
    for d in 1..=6 {
        let mut cfg = SimConfig::new(&g, s, Start::Distance(d));
        cfg.trials = 500;
        let rep = run(&cfg).unwrap();
        assert_eq!(rep.mean_rounds.mean, f64::from(d));
        assert_eq!(rep.mean_rounds.std_error, 0.0);
    }
}

#[test]
fn report_invariants_and_determinism() {
    let g = petersen().unwrap();
    let s = SpinnerFour::new(0.1, 0.6, 0.15, 0.15).unwrap();
    let mut cfg = SimConfig::new(&g, s, Start::Positions { cop: 0, robber: 7 });
    cfg.trials = 5_000;
    cfg.max_rounds = 15;
    cfg.seed = 99;
    let a = run(&cfg).unwrap();
    let b = run(&cfg).unwrap();
    assert_eq!(a, b);
    assert!(a.survival.windows(2).all(|w| w[1].mean <= w[0].mean));
    assert!(a.survival.iter().all(|e| (0.0..=1.0).contains(&e.mean)));
    assert_eq!(
        a.survival[cfg.max_rounds as usize].mean,
        a.censored_fraction
    );
    assert!(a.censored_fraction > 0.0 && a.mean_is_lower_bound);

    cfg.seed = 100;
    assert_ne!(run(&cfg).unwrap(), a);
}
