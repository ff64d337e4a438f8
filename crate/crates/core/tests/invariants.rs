use kissbound_core::asymptotics::{self, euclid_exponent, large_p_exponents, max_g};
use kissbound_core::pnorm::PNorm;
use kissbound_core::shellsys::entropy;
use kissbound_core::ShellSystem;
use proptest::prelude::*;

/// Candidates for `floor(log_{2^p} m)`, computed in floating point and
/// widened by one on either side of a near-tie.
fn log_floor_candidates(p: f64, m: u64) -> (i64, i64) {
    let x = (m as f64).log2() / p;
    ((x - 1e-9).floor() as i64, (x + 1e-9).floor() as i64)
}

fn check_structure(sys: &ShellSystem) {
    let levels = sys.levels();
    let two_pow_p = 2f64.powf(sys.p());
    assert_eq!(levels[0], sys.m());
    assert!(levels.windows(2).all(|w| w[0] > w[1]), "{levels:?}");
    assert!(levels.iter().all(|&l| l >= 1));
    let last = *levels.last().unwrap() as f64;
    assert!(last < two_pow_p * (1.0 + 1e-12), "p={} {levels:?}", sys.p());
    if levels.len() >= 2 {
        assert!(levels[levels.len() - 2] as f64 >= two_pow_p * (1.0 - 1e-12));
    }
    let r = levels.len() as i64;
    let (k_lo, k_hi) = log_floor_candidates(sys.p(), sys.m());
    assert!(
        (k_lo..=k_hi + 1).contains(&r),
        "p={} m={} r={r}",
        sys.p(),
        sys.m()
    );
}

#[test]
fn level_sequence_structure_on_grid() {
    for step in 0..=50 {
        let p = 1.0 + step as f64 * 0.1;
        let pnorm = PNorm::new(p).unwrap();
        for m in 1..=200u64 {
            for &n in &[m, 200] {
                let sys = ShellSystem::build(pnorm.clone(), n, m).unwrap();
                check_structure(&sys);
            }
        }
    }
}

#[test]
fn geometric_weight_gives_k_plus_one_shells() {
    for &p in &[1.0, 1.3, 1.5, 2.0, 2.1, 2.5, 3.0] {
        for k in 1..=4i32 {
            let sum: f64 = (1..=k).map(|j| 2f64.powf(p * j as f64)).sum();
            let m = (sum - 1e-9).ceil() as u64;
            if m > 5000 {
                continue;
            }
            let sys = ShellSystem::new(p, m, m).unwrap();
            assert_eq!(
                sys.shell_count(),
                k as usize + 1,
                "p={p} k={k} levels {:?}",
                sys.levels()
            );
        }
    }
}

#[test]
fn entropy_symmetric_and_concave() {
    let grid: Vec<f64> = (0..=1000).map(|k| k as f64 / 1000.0).collect();
    let h: Vec<f64> = grid.iter().map(|&s| entropy(s).unwrap()).collect();
    for (k, &s) in grid.iter().enumerate() {
        assert!((h[k] - entropy(1.0 - s).unwrap()).abs() < 1e-12);
    }
    for w in h.windows(3) {
        assert!(w[0] - 2.0 * w[1] + w[2] <= 1e-15);
    }
    assert_eq!(h[0], 0.0);
    assert_eq!(h[1000], 0.0);
    assert!((h[500] - 1.0).abs() < 1e-15);
}

#[test]
fn euclid_identity() {
    for k in 1..=100 {
        let p = 1.0 + k as f64 / 100.0;
        let direct = -((1.0 - p / 2.0).exp2() * (1.0 - (-p).exp2()).sqrt()).log2();
        assert!(
            (euclid_exponent(p).unwrap() - direct).abs() < 1e-12,
            "p={p}"
        );
    }
}

#[test]
fn large_p_lead_is_binary_rate() {
    for &p in &[1.0, 2.0, 2.2, 3.0, 4.0, 5.5] {
        let lead = large_p_exponents(p).unwrap()[0];
        assert_eq!(lead, 1.0 - entropy(2f64.powf(-p)).unwrap());
    }
}

#[test]
fn inner_minimum_stable_under_grid_halving() {
    for &p in &[1.0, 1.5, 2.0, 2.1, 3.0] {
        for &s in &[0.05, 0.26, 0.39, 0.6, 0.95] {
            let coarse = asymptotics::g_with_grid(p, s, 1000).unwrap();
            let fine = asymptotics::g_with_grid(p, s, 2000).unwrap();
            assert!((coarse.value - fine.value).abs() < 1e-8, "p={p} s={s}");
        }
    }
}

const PS: [f64; 7] = [1.0, 1.5, 2.0, 2.1, 2.2, 3.0, 4.0];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn g_is_a_lower_envelope(pi in 0..PS.len(), sigma in 1e-4f64..0.9999, frac in 0.0f64..=1.0) {
        let p = PS[pi];
        let y = frac * (sigma / 2.0).min(1.0 - sigma);
        let g = asymptotics::g(p, sigma).unwrap();
        prop_assert!(g.value <= asymptotics::f(p, sigma, y).unwrap() + 1e-12);
        prop_assert!(g.y_star >= 0.0 && g.y_star <= (sigma / 2.0).min(1.0 - sigma) + 1e-15);
    }

    #[test]
    fn ceiling_property_of_floor_div(p in 1.0f64..6.0, value in 0u64..1_000_000) {
        let pnorm = PNorm::new(p).unwrap();
        let q = pnorm.floor_div_2p(value);
        let two_pow_p = 2f64.powf(p);
        prop_assert!(q as f64 * two_pow_p <= value as f64 * (1.0 + 1e-12));
        prop_assert!((q + 1) as f64 * two_pow_p > value as f64 * (1.0 - 1e-12));
    }

    #[test]
    fn random_systems_are_well_formed(p in 1.0f64..6.0, m in 1u64..=200, extra in 0u64..100) {
        check_structure(&ShellSystem::new(p, m + extra, m).unwrap());
    }
}

#[test]
fn max_g_dominates_random_samples() {
    use proptest::strategy::ValueTree;
    use proptest::test_runner::TestRunner;
    let mut runner = TestRunner::deterministic();
    for &p in &PS {
        let best = max_g(p).unwrap();
        for _ in 0..200 {
            let sigma = (1e-4f64..0.9999).new_tree(&mut runner).unwrap().current();
            let g = asymptotics::g(p, sigma).unwrap().value;
            assert!(best.g_value >= g - 1e-12, "p={p} sigma={sigma}");
        }
    }
}
