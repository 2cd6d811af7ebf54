use proptest::prelude::*;

use steep::coding::{select_pairs, standard_rates, CodeRate};
use steep::feasibility::{is_feasible, p2_threshold_best_c1};
use steep::model::{c1_sq_upper_bound, db_to_linear, mse_eve, mse_user, secrecy_rate};
use steep::montecarlo::{empirical_mse_eve, empirical_mse_eve_sample_cov, simulate};
use steep::optimizer::{averaged_rate_with_weight, optimize_c1, optimize_p1_c1, P1Window};
use steep::privacy::{amplify, Direction, HashSeed, SessionPayload, ToeplitzHash};
use steep::{secrecy_report, SystemParams};

fn params() -> impl Strategy<Value = SystemParams> {
    (-10.0..30.0f64, -10.0..40.0f64, -1.0..2.0f64, -1.0..2.0f64, 0.01..0.99f64).prop_map(|(p1_db, p2_db, l1, l2, f)| {
        let p1 = db_to_linear(p1_db);
        SystemParams::new(p1, db_to_linear(p2_db), 10f64.powf(l1), 10f64.powf(l2), f * c1_sq_upper_bound(p1)).unwrap()
    })
}

fn rs(p: &SystemParams) -> f64 {
    secrecy_rate(p).unwrap()
}

proptest! {
    #[test]
    fn rate_decreases_with_eve_advantage(p in params(), k in 1.01..10.0f64) {
        let r0 = rs(&p);
        prop_assert!(rs(&p.with_alphas(p.alpha1() * k, p.alpha2()).unwrap()) < r0);
        prop_assert!(rs(&p.with_alphas(p.alpha1(), p.alpha2() * k).unwrap()) < r0);
    }

    #[test]
    fn positive_rate_increases_with_phase2_snr(p in params(), k in 1.01..10.0f64) {
        let p = p.with_alphas(p.alpha1(), p.alpha2().max(1.0)).unwrap();
        let lo = secrecy_report(&p).unwrap();
        let hi = secrecy_report(&p.with_p2(p.p2() * k).unwrap()).unwrap();
        prop_assert!(hi.rs_plus >= lo.rs_plus);
        if lo.rs > 0.0 {
            prop_assert!(hi.rs > lo.rs);
        }
    }

    #[test]
    fn power_identity_holds(p in params()) {
        let total = p.c1_sq() * (1.0 + p.sigma1_sq()) + p.c2_sq();
        prop_assert!((total - 1.0).abs() <= 4.0 * f64::EPSILON);
        prop_assert!((p.transmit_power() - 1.0).abs() <= 4.0 * f64::EPSILON);
    }

    #[test]
    fn capacity_is_log_of_mse(p in params()) {
        let r = secrecy_report(&p).unwrap();
        prop_assert!((r.cap_user + mse_user(&p).log2()).abs() < 1e-12);
        prop_assert!((r.cap_eve + mse_eve(&p).unwrap().log2()).abs() < 1e-12);
        prop_assert!(r.mse_user > 0.0 && r.mse_user <= 1.0);
        prop_assert!(r.mse_eve > 0.0 && r.mse_eve <= 1.0);
        prop_assert_eq!(r.rs_plus, r.rs.max(0.0));
    }

    #[test]
    fn noiseless_eve_leaves_no_secrecy(p in params()) {
        prop_assert!(rs(&p.with_alphas(f64::INFINITY, f64::INFINITY).unwrap()) <= 0.0);
    }

    #[test]
    fn averaged_rate_is_mirror_symmetric(
        p1_db in -10.0..30.0f64,
        p2_db in -10.0..40.0f64,
        f in 0.05..0.95f64,
        d in 0.01..0.99f64,
        ple in 1.0..=2.0f64,
        eta in 0.05..=1.0f64,
    ) {
        let (p1, p2) = (db_to_linear(p1_db), db_to_linear(p2_db));
        let c1 = f * c1_sq_upper_bound(p1);
        let a = averaged_rate_with_weight(c1, d, p1, p2, ple, eta).unwrap();
        let b = averaged_rate_with_weight(c1, 1.0 - d, p1, p2, ple, eta).unwrap();
        prop_assert!((a.rs_bar - b.rs_bar).abs() <= 1e-12);
    }

    #[test]
    fn feasibility_agrees_with_optimizer(
        p1_db in -10.0..30.0f64,
        p2_db in -10.0..40.0f64,
        l1 in -1.0..2.0f64,
        l2 in -1.0..2.0f64,
    ) {
        let (p1, p2, a1, a2) = (db_to_linear(p1_db), db_to_linear(p2_db), 10f64.powf(l1), 10f64.powf(l2));
        let t = p2_threshold_best_c1(p1, a1, a2);
        prop_assume!((p2 - t).abs() > 1e-3 * t.max(1.0));
        let best = optimize_c1(p1, p2, a1, a2).unwrap().rs_star;
        prop_assert_eq!(is_feasible(p1, p2, a1, a2), best > 0.0, "threshold {} rs* {}", t, best);
    }

    #[test]
    fn selector_matches_enumeration(cap_eve in 0.0..6.0f64, gap in 0.001..3.0f64, m_max_log in 1u32..=12) {
        let cap_user = cap_eve + gap;
        let m_max = 1u64 << m_max_log;
        let rates = standard_rates();
        let got = select_pairs(cap_user, cap_eve, &rates, m_max).unwrap();
        let mut want = Vec::new();
        for r in &rates {
            for b in 1..=m_max_log {
                let bits = b as f64;
                if r.divide(cap_eve) < bits && bits < r.divide(cap_user) {
                    want.push((*r, 1u64 << b));
                }
            }
        }
        let mut got_set: Vec<(CodeRate, u64)> = got.iter().map(|p| (p.rate, p.m)).collect();
        got_set.sort_by(|a, b| (a.0.value(), a.1).partial_cmp(&(b.0.value(), b.1)).unwrap());
        want.sort_by(|a, b| (a.0.value(), a.1).partial_cmp(&(b.0.value(), b.1)).unwrap());
        prop_assert_eq!(got_set, want);
        for w in got.windows(2) {
            prop_assert!(w[0].min_margin() >= w[1].min_margin());
        }
    }

    #[test]
    fn selector_ignores_rate_order(cap_eve in 0.0..6.0f64, gap in 0.001..3.0f64, rot in 0usize..11, rev in any::<bool>()) {
        let base = select_pairs(cap_eve + gap, cap_eve, &standard_rates(), 1024).unwrap();
        let mut rates = standard_rates();
        rates.rotate_left(rot);
        if rev {
            rates.reverse();
        }
        rates.push(rates[0]);
        prop_assert_eq!(select_pairs(cap_eve + gap, cap_eve, &rates, 1024).unwrap(), base);
    }

    #[test]
    fn toeplitz_hash_is_linear(
        seed in any::<u64>(),
        a in prop::collection::vec(any::<bool>(), 1..400),
        mask in prop::collection::vec(any::<bool>(), 400),
        rows in 1usize..200,
    ) {
        let b: Vec<bool> = mask[..a.len()].to_vec();
        let h = ToeplitzHash::from_seed(&HashSeed::from_u64(seed), rows, a.len());
        let x: Vec<bool> = a.iter().zip(&b).map(|(p, q)| p ^ q).collect();
        let ha = h.apply(&a).unwrap();
        let hb = h.apply(&b).unwrap();
        let hx = h.apply(&x).unwrap();
        let sum: Vec<bool> = ha.iter().zip(&hb).map(|(p, q)| p ^ q).collect();
        prop_assert_eq!(hx, sum);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn joint_optimum_beats_dense_grid(p2_db in 0.0..40.0f64, l1 in -1.0..1.5f64, l2 in -1.0..1.5f64) {
        let (p2, a1, a2) = (db_to_linear(p2_db), 10f64.powf(l1), 10f64.powf(l2));
        let window = P1Window::default();
        let opt = optimize_p1_c1(p2, a1, a2, window).unwrap();
        let mut grid_max = f64::NEG_INFINITY;
        for i in 0..400 {
            let p1 = db_to_linear(window.lo_db + (window.hi_db - window.lo_db) * i as f64 / 399.0);
            let ub = c1_sq_upper_bound(p1);
            for j in 1..=400 {
                let c1 = ub * j as f64 / 401.0;
                grid_max = grid_max.max(rs(&SystemParams::new(p1, p2, a1, a2, c1).unwrap()));
            }
        }
        prop_assert!(opt.rs_star >= grid_max - 1e-6, "optimizer {} grid {}", opt.rs_star, grid_max);
    }

    #[test]
    fn sample_covariance_estimator_agrees(p in params(), seed in any::<u64>()) {
        let k = 20_000;
        let t = simulate(&p, k, seed).unwrap();
        let model = empirical_mse_eve(&t).unwrap().mse;
        let sample = empirical_mse_eve_sample_cov(&t).unwrap().mse;
        prop_assert!((model - sample).abs() < 10.0 / (k as f64).sqrt(), "{} vs {}", model, sample);
    }

    #[test]
    fn transcript_signals_have_unit_power(p in params(), seed in any::<u64>()) {
        let k = 20_000;
        let t = simulate(&p, k, seed).unwrap();
        let tol = 5.0 / (k as f64).sqrt();
        let power = |v: &[num_complex::Complex64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>() / k as f64;
        prop_assert!((power(&t.x1) - 1.0).abs() < tol);
        prop_assert!((power(&t.s2) - 1.0).abs() < tol);
        prop_assert!((power(&t.x2) - 1.0).abs() < tol);
    }
}

#[test]
fn toeplitz_family_has_no_collisions_on_fixed_inputs() {
    let len = 256;
    let a: Vec<bool> = (0..len).map(|i| (i * 7 + 3) % 5 == 0).collect();
    let mut b = a.clone();
    b[17] = !b[17];
    b[200] = !b[200];
    let pay = |bits: &[bool]| {
        (
            SessionPayload::new(bits[..len / 2].to_vec(), Direction::AliceFirst).unwrap(),
            SessionPayload::new(bits[len / 2..].to_vec(), Direction::BobFirst).unwrap(),
        )
    };
    let (a1, a2) = pay(&a);
    let (b1, b2) = pay(&b);
    let mut collisions = 0;
    for s in 0..1000u64 {
        let seed = HashSeed::from_u64(s);
        let ka = amplify(&a1, &a2, 32, &seed).unwrap();
        let kb = amplify(&b1, &b2, 32, &seed).unwrap();
        if ka.bits == kb.bits {
            collisions += 1;
        }
    }
    assert_eq!(collisions, 0);
}
