use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, TAU};

use spiral_erw_core::angle::{AngleLaw, Regime};
use spiral_erw_core::branching::{embedded_walk, simulate_branching};
use spiral_erw_core::oracle::{enumerate_exact, MomentTable};
use spiral_erw_core::stats::{verify, CampaignConfig, Sequential};
use spiral_erw_core::walk::simulate_path;
use spiral_erw_core::Error;

#[test]
fn regimes_of_the_reference_laws() {
    let cases = [
        (AngleLaw::uniform(0.0, TAU).unwrap(), Regime::Diffusive),
        (AngleLaw::constant(FRAC_PI_3).unwrap(), Regime::Critical),
        (AngleLaw::constant(FRAC_PI_4).unwrap(), Regime::Superdiffusive),
    ];
    for (law, regime) in cases {
        assert_eq!(law.classify_regime().unwrap().regime, regime);
    }
    let coin = AngleLaw::discrete(vec![(0.0, 0.5), (std::f64::consts::PI, 0.5)]).unwrap();
    assert!(matches!(coin.classify_regime(), Err(Error::Degenerate { .. })));
}

#[test]
fn simulation_is_a_pure_function_of_seed_and_index() {
    let law = AngleLaw::quarter_turns(0.4, 0.3, 0.2, 0.1).unwrap();
    let a = simulate_path(&law, 500, 42, 7).unwrap();
    let b = simulate_path(&law, 500, 42, 7).unwrap();
    let c = simulate_path(&law, 500, 42, 8).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.positions(), c.positions());
    let run = simulate_branching(&law, 500, 42, 7).unwrap();
    assert_eq!(run, simulate_branching(&law, 500, 42, 7).unwrap());
    assert!(embedded_walk(&run, 500).is_ok());
}

#[test]
fn enumeration_agrees_with_the_moment_table() {
    let law = AngleLaw::quarter_turns(0.1, 0.2, 0.3, 0.4).unwrap();
    let table = MomentTable::build(law.phi(1), law.phi(2), 5).unwrap();
    let d = enumerate_exact(&law, 5).unwrap();
    assert!((d.mean() - table.a_seq[4]).norm() < 1e-12);
    assert!((d.abs_second() - table.u_seq[4]).abs() < 1e-12);
    assert!((d.second() - table.q_seq[4]).norm() < 1e-12);
}

#[test]
fn small_diffusive_verification_runs_sequentially() {
    let config = CampaignConfig::new(AngleLaw::uniform(0.0, TAU).unwrap(), 256, 20_000, 1);
    let report = verify(&config, &Sequential).unwrap();
    assert_eq!(report.regime.unwrap().regime, Regime::Diffusive);
    assert!(report.passed, "{:?}", report.failures().collect::<Vec<_>>());
}
