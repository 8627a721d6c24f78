use dkdv::evolution::{read_snapshot, solve_ivp, write_snapshot};
use dkdv::harness::random_field;
use dkdv::spectral::{sobolev_norm, Grid1D, ModelParams};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn flow_dissipates_and_conserves_mean(seed in 0u64..10_000, alpha in 0.05f64..1.0, shift in -1.0f64..1.0) {
        let grid = Grid1D::new(128, 8.0 * std::f64::consts::PI).unwrap();
        let mut u0 = random_field(grid, 0.0, 1.0, -1.0, seed);
        for v in &mut u0.values {
            *v += shift;
        }
        let params = ModelParams::new(alpha, -0.5).unwrap();
        let traj = solve_ivp(&u0, 0.05, 1e-3, &params, 5).unwrap();
        let m0 = traj.states[0].mean();
        for w in traj.states.windows(2) {
            prop_assert!(sobolev_norm(&w[1], 0.0) <= sobolev_norm(&w[0], 0.0) * (1.0 + 1e-9));
            prop_assert!((w[1].mean() - m0).abs() <= 1e-12);
        }
    }

    #[test]
    fn snapshot_round_trips_through_a_file(seed in 0u64..10_000, alpha in 0.05f64..1.0) {
        let grid = Grid1D::new(64, 10.0).unwrap();
        let u = random_field(grid, -0.5, 2.0, -0.5, seed);
        let tmp = tempfile::NamedTempFile::new().unwrap();
        write_snapshot(&u, alpha, std::fs::File::create(tmp.path()).unwrap()).unwrap();
        let (header, back) = read_snapshot(std::fs::File::open(tmp.path()).unwrap()).unwrap();
        prop_assert_eq!(back, u);
        prop_assert_eq!(header.alpha, alpha);
    }
}
