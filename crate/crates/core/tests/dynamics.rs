use chua_core::diagnostics::{
    analyze_run, classify_attractor, dominant_frequency, lyapunov_spectrum, lyapunov_spectrum_with_frame,
    AttractorClass, ClassifyThresholds, LyapunovResult,
};
use chua_core::model::{equilibria, equilibrium_eigenvalues};
use chua_core::ode::Method;
use chua_core::sim::{integrate, poincare_crossings, Direction, IntegratorSettings, PoincareCrossing};
use chua_core::{ChuaParams, State};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn st(x: f64, y: f64, z: f64) -> State {
    State::new(x, y, z).unwrap()
}

fn omega2_cycle() -> ChuaParams {
    ChuaParams::from_slope(10.0, 20.0, -0.75, -0.7875).unwrap()
}

fn double_scroll() -> ChuaParams {
    ChuaParams::from_slope(10.0, 13.3, -1.07, 3e-4).unwrap()
}

fn classify(s0: State, p: &ChuaParams, cfg: &IntegratorSettings) -> AttractorClass {
    let run = analyze_run(&s0, p, cfg, None).unwrap();
    classify_attractor(&run, p, &ClassifyThresholds::default())
}

fn random_frame(seed: u64) -> [[f64; 3]; 3] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = [[0.0; 3]; 3];
    for v in f.iter_mut() {
        for c in v.iter_mut() {
            *c = rng.gen_range(-1.0..1.0);
        }
    }
    f
}

fn up_xs(c: &[PoincareCrossing]) -> Vec<f64> {
    c.iter().filter(|c| c.direction == Direction::NegToPos).map(|c| c.state.x()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn integration_is_reflection_equivariant(
        x in -2.0..2.0f64, y in -1.0..1.0f64, z in -2.0..2.0f64, rk4 in any::<bool>(),
    ) {
        let p = double_scroll();
        let mut cfg = IntegratorSettings::default().with_times(0.0, 5.0);
        if rk4 {
            cfg.method = Method::Rk4 { step: 1e-3 };
        }
        let a = integrate(&st(x, y, z), &p, &cfg).unwrap();
        let b = integrate(&st(-x, -y, -z), &p, &cfg).unwrap();
        prop_assert_eq!(a.len(), b.len());
        for (sa, sb) in a.states.iter().zip(&b.states) {
            let (u, v) = (sa.to_array(), sb.to_array());
            for i in 0..3 {
                prop_assert!((u[i] + v[i]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn globally_stable_regime_settles_at_origin(
        x in -0.57..0.57f64, y in -0.57..0.57f64, z in -0.57..0.57f64, m in 0.05..1.0f64, i0 in 1e-4..0.5f64,
    ) {
        let p = ChuaParams::from_slope(10.0, 20.0, m, i0).unwrap();
        let cfg = IntegratorSettings::default().with_times(0.0, 400.0);
        let end = integrate(&st(x, y, z), &p, &cfg).unwrap().last().unwrap();
        prop_assert!(end.norm() < 1e-6, "ended at {:?}", end);
    }

    #[test]
    fn lyapunov_sum_matches_mean_trace(m in -1.15..-1.02f64, x0 in 0.05..0.5f64) {
        let p = ChuaParams::from_slope(10.0, 13.3, m, 3e-4).unwrap();
        let cfg = IntegratorSettings::default().with_times(50.0, 200.0);
        let l = lyapunov_spectrum(&st(x0, 0.0, 0.0), &p, &cfg).unwrap();
        prop_assert!((l.sum() - l.mean_trace).abs() < 0.02, "{:?}", l);
        prop_assert!(l.exponents[0] >= l.exponents[1] && l.exponents[1] >= l.exponents[2]);
    }
}

#[test]
fn refined_crossings_sit_on_the_section() {
    let cfg = IntegratorSettings::default().with_times(0.0, 50.0);
    let set = poincare_crossings(&st(0.1, 0.0, 0.0), &double_scroll(), &cfg, None).unwrap();
    assert!(set.crossings.len() > 10);
    for c in &set.crossings {
        assert!(c.state.y().abs() < 1e-10);
    }
    assert!(set.crossings.windows(2).all(|w| w[0].t < w[1].t));
}

#[test]
fn truncation_flag() {
    let p = ChuaParams::from_slope(10.0, 20.0, 0.5, 0.2).unwrap();
    let cfg = IntegratorSettings::default().with_times(0.0, 20.0);
    let rest = poincare_crossings(&State::ORIGIN, &p, &cfg, Some(3)).unwrap();
    assert!(rest.crossings.is_empty() && rest.truncated);
    let ds = poincare_crossings(&st(0.1, 0.0, 0.0), &double_scroll(), &cfg, Some(3)).unwrap();
    assert_eq!(ds.crossings.len(), 3);
    assert!(!ds.truncated);
}

#[test]
fn converges_to_p1_from_nearby() {
    let p = ChuaParams::from_slope(10.0, 13.3, -1.005, 3e-4).unwrap();
    let p1 = equilibria(&p).into_iter().find(|e| e.x() > 0.0).unwrap();
    let s0 = st(p1.x() + 0.01, p1.y(), p1.z());
    let end = integrate(&s0, &p, &IntegratorSettings::default()).unwrap().last().unwrap();
    assert!(end.distance(&p1) < 1e-6);
}

#[test]
fn unstable_regime_escapes() {
    let p = ChuaParams::from_slope(10.0, 20.0, -0.5, -0.7875).unwrap();
    for method in [Method::Rk4 { step: 1e-3 }, Method::Rk4 { step: 5e-4 }, IntegratorSettings::default().method] {
        let cfg = IntegratorSettings::default().with_method(method);
        assert!(matches!(
            integrate(&st(0.01, 0.0, 0.0), &p, &cfg),
            Err(chua_core::ChuaError::Diverged { .. })
        ));
    }
}

#[test]
fn omega2_cycle_section_and_frequency() {
    let p = omega2_cycle();
    let cfg = IntegratorSettings::default().with_times(500.0, 100.0);
    let c = poincare_crossings(&st(0.1, 0.0, 0.0), &p, &cfg, None).unwrap().crossings;
    assert!(c.windows(2).all(|w| w[0].direction != w[1].direction));
    let ups = up_xs(&c);
    let spread = ups.iter().fold(0.0_f64, |m, x| m.max((x - ups[0]).abs()));
    assert!(spread < 1e-6);
    let w = dominant_frequency(&c).unwrap();
    assert!((w / 3.3612 - 1.0).abs() < 0.05, "omega {w}");
}

#[test]
fn periodic_crossings_stable_under_tighter_tolerance() {
    let p = omega2_cycle();
    let loose = IntegratorSettings::default().with_times(500.0, 20.0);
    let tight = loose.with_method(Method::Rk45 { rtol: 1e-10, atol: 1e-13 });
    let a = up_xs(&poincare_crossings(&st(0.1, 0.0, 0.0), &p, &loose, None).unwrap().crossings);
    let b = up_xs(&poincare_crossings(&st(0.1, 0.0, 0.0), &p, &tight, None).unwrap().crossings);
    assert!((a[0] - b[0]).abs() < 1e-6, "{} vs {}", a[0], b[0]);
}

#[test]
fn double_scroll_crossings_are_sign_symmetric() {
    let cfg = IntegratorSettings::default().with_times(200.0, 500.0);
    let c = poincare_crossings(&st(0.1, 0.0, 0.0), &double_scroll(), &cfg, None).unwrap().crossings;
    let xs: Vec<f64> = c.iter().map(|c| c.state.x()).collect();
    let pos = xs.iter().filter(|x| **x > 0.0).count();
    let neg = xs.len() - pos;
    assert!(pos > 20 && neg > 20);
    let hi = xs.iter().cloned().fold(f64::MIN, f64::max);
    let lo = xs.iter().cloned().fold(f64::MAX, f64::min);
    assert!((hi + lo).abs() < 0.1 * hi, "range [{lo}, {hi}]");
}

#[test]
fn lyapunov_at_stable_equilibrium_matches_eigenvalues() {
    let p = ChuaParams::from_slope(10.0, 13.3, -1.005, 3e-4).unwrap();
    let p1 = equilibria(&p).into_iter().find(|e| e.x() > 0.0).unwrap();
    let l = lyapunov_spectrum(&p1, &p, &IntegratorSettings::default()).unwrap();
    let ev = equilibrium_eigenvalues(&p1, &p).unwrap();
    for (lam, e) in l.exponents.iter().zip(ev.eigenvalues) {
        assert!(*lam < 0.0);
        assert!((lam - e.re).abs() < 0.01, "{lam} vs {}", e.re);
    }
}

fn check_frame_invariance(s0: State, p: &ChuaParams) -> LyapunovResult {
    let cfg = IntegratorSettings::default();
    let base = lyapunov_spectrum(&s0, p, &cfg).unwrap();
    for seed in [1, 2] {
        let other = lyapunov_spectrum_with_frame(&s0, p, &cfg, Some(random_frame(seed))).unwrap();
        for (a, b) in base.exponents.iter().zip(other.exponents) {
            assert!((a - b).abs() < 0.01, "{:?} vs {:?}", base.exponents, other.exponents);
        }
    }
    assert!((base.sum() - base.mean_trace).abs() < 0.02);
    assert!(base.exponents.iter().any(|l| l.abs() < 0.01), "no flow exponent in {:?}", base.exponents);
    base
}

#[test]
fn lyapunov_on_omega2_cycle() {
    let l = check_frame_invariance(st(0.1, 0.0, 0.0), &omega2_cycle());
    assert!(l.exponents[0].abs() < 0.01);
    assert!(l.exponents[1] < 0.0 && l.exponents[2] < 0.0);
    assert!(l.converged);
}

#[test]
fn lyapunov_on_double_scroll() {
    let l = check_frame_invariance(st(0.1, 0.0, 0.0), &double_scroll());
    assert!(l.exponents[0] > 0.02);
    assert!(l.exponents[1].abs() < 0.01);
}

#[test]
fn cascade_examples() {
    // -0.687 sits close to a doubling point and settles slowly.
    let cfg = IntegratorSettings::default().with_times(1000.0, 500.0);
    let at = |m| ChuaParams::from_slope(10.0, 20.0, m, -0.7875).unwrap();
    assert_eq!(classify(st(0.1, 0.0, 0.0), &at(-0.687), &cfg), AttractorClass::Periodic { n: 2 });
    assert_eq!(classify(st(0.1, 0.0, 0.0), &at(-0.676), &cfg), AttractorClass::Chaotic);
}

#[test]
fn periodic_label_survives_halved_step() {
    let p = omega2_cycle();
    let a = classify(st(0.1, 0.0, 0.0), &p, &IntegratorSettings::fixed_rk4());
    let b = classify(st(0.1, 0.0, 0.0), &p, &IntegratorSettings::default().with_method(Method::Rk4 { step: 5e-4 }));
    assert_eq!(a, AttractorClass::Periodic { n: 1 });
    assert_eq!(a, b);
}
