use chua_core::circuitmap::{dimensionless_from_circuit, predicted_frequencies_hz, CircuitSpec, DiodeSpec};
use chua_core::dfan::{
    classify_region, describing_function, describing_function_bessel, df_series, interception_points,
    predicted_limit_cycles, transfer_function, RegionLabel,
};
use chua_core::model::{
    equilibria, equilibrium_eigenvalues, jacobian, jacobian_trace, nonlinearity_slope, nonlinearity_u, vector_field,
};
use chua_core::{ChuaParams, State};
use proptest::prelude::*;

mod common;
use common::df_quadrature;

/// Parameters inside `alpha < beta < gamma^2`.
fn main_range() -> impl Strategy<Value = ChuaParams> {
    (6.0..14.0f64, 0.05..0.95f64, -1.5..0.5f64, prop_oneof![-1.0..-1e-4f64, 1e-4..1.0f64]).prop_map(
        |(alpha, frac, m, i0)| {
            let g = (1.0 + alpha) / 2.0;
            let beta = alpha + frac * (g * g - alpha);
            ChuaParams::from_slope(alpha, beta, m, i0).unwrap()
        },
    )
}

fn state(r: f64) -> impl Strategy<Value = State> {
    (-r..r, -r..r, -r..r).prop_map(|(x, y, z)| State::new(x, y, z).unwrap())
}

fn neg(s: &State) -> State {
    State::new(-s.x(), -s.y(), -s.z()).unwrap()
}

proptest! {
    #[test]
    fn reflection_equivariance(p in main_range(), s in state(8.0)) {
        let f = vector_field(&s, &p).unwrap();
        let g = vector_field(&neg(&s), &p).unwrap();
        for i in 0..3 {
            prop_assert_eq!(g[i], -f[i]);
        }
    }

    #[test]
    fn jacobian_matches_finite_differences(p in main_range(), s in state(5.0)) {
        let j = jacobian(&s, &p).unwrap();
        let a = s.to_array();
        for c in 0..3 {
            let h = 1e-6 * a[c].abs().max(1.0);
            let mut up = a;
            let mut dn = a;
            up[c] += h;
            dn[c] -= h;
            let fu = vector_field(&State::new(up[0], up[1], up[2]).unwrap(), &p).unwrap();
            let fd = vector_field(&State::new(dn[0], dn[1], dn[2]).unwrap(), &p).unwrap();
            for r in 0..3 {
                let fdiff = (fu[r] - fd[r]) / (2.0 * h);
                let scale = j[(r, c)].abs().max(1.0);
                prop_assert!((fdiff - j[(r, c)]).abs() < 1e-6 * scale, "J[{r}][{c}] {} vs {}", j[(r, c)], fdiff);
            }
        }
    }

    #[test]
    fn trace_identity(p in main_range(), s in state(5.0)) {
        let j = jacobian(&s, &p).unwrap();
        let want = p.alpha() * (-1.0 - nonlinearity_slope(s.x(), &p).unwrap()) - 1.0;
        prop_assert!((j.trace() - want).abs() < 1e-12 * want.abs().max(1.0));
        prop_assert!((jacobian_trace(s.x(), &p).unwrap() - want).abs() < 1e-12 * want.abs().max(1.0));
    }

    #[test]
    fn origin_slope_is_df_limit(p in main_range()) {
        prop_assert_eq!(nonlinearity_u(0.0, &p).unwrap(), 0.0);
        let slope = nonlinearity_slope(0.0, &p).unwrap();
        prop_assert!((slope - p.slope_at_origin()).abs() < 1e-15);
        prop_assert!((slope + describing_function(0.0, &p).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn equilibria_are_residual_free_and_symmetric(p in main_range()) {
        let eq = equilibria(&p);
        prop_assert!(eq.contains(&State::ORIGIN));
        for e in &eq {
            let f = vector_field(e, &p).unwrap();
            prop_assert!(f.iter().all(|v| v.abs() < 1e-9));
            prop_assert!(eq.iter().any(|o| o.distance(&neg(e)) < 1e-12));
        }
        prop_assert!(eq.len() == 1 || eq.len() == 3);
    }

    #[test]
    fn nyquist_conjugate_symmetry(p in main_range(), w in 1e-3..1e3f64) {
        let a = transfer_function(w, &p).unwrap();
        let b = transfer_function(-w, &p).unwrap();
        prop_assert_eq!(a.re, b.re);
        prop_assert_eq!(a.im, -b.im);
    }

    #[test]
    fn interceptions_lie_on_the_response(p in main_range()) {
        let set = interception_points(&p);
        for (w, pi) in [(set.omega2(), set.p2()), (set.omega3(), set.p3())] {
            let (w, pi) = (w.unwrap(), pi.unwrap());
            let g = transfer_function(w, &p).unwrap();
            prop_assert!(g.im.abs() < 1e-9, "im {}", g.im);
            prop_assert!((g.re - pi).abs() < 1e-9, "{} vs {}", g.re, pi);
        }
        // -1 < 1/p2 < 1/p3 < 0
        let (a, b) = (set.inv_p2().unwrap(), set.inv_p3().unwrap());
        prop_assert!(-1.0 < a && a < b && b < 0.0);
    }

    #[test]
    fn df_series_bessel_quadrature_agree(p in main_range(), x in 1e-3..30.0f64) {
        let s = describing_function(x, &p).unwrap();
        let b = describing_function_bessel(x, &p).unwrap();
        let q = df_quadrature(x, &p);
        for (u, v) in [(s, b), (s, q), (b, q)] {
            prop_assert!((u - v).abs() <= 1e-10 * u.abs().max(v.abs()), "{u} vs {v} at X={x}");
        }
    }

    #[test]
    fn df_monotone_with_sign_of_i0(p in main_range(), x in 0.0..29.0f64, dx in 1e-3..1.0f64) {
        let a = describing_function(x, &p).unwrap();
        let b = describing_function(x + dx, &p).unwrap();
        // -I0 * S(X) with S increasing.
        if p.i0() < 0.0 {
            prop_assert!(b > a);
        } else {
            prop_assert!(b < a);
        }
    }

    #[test]
    fn region_depends_on_slope_and_sign_only(p in main_range(), k in 0.1..3.0f64) {
        let q = ChuaParams::from_slope(p.alpha(), p.beta(), p.slope_at_origin(), p.i0() * k).unwrap();
        prop_assert_eq!(classify_region(&p), classify_region(&q));
        prop_assert!(!matches!(classify_region(&p), RegionLabel::OutOfRange));
    }

    #[test]
    fn harmonic_balance_residuals(p in main_range()) {
        let set = interception_points(&p);
        for c in predicted_limit_cycles(&p) {
            let inv = if c.index == 2 { set.inv_p2() } else { set.inv_p3() }.unwrap();
            let n = describing_function(c.amplitude, &p).unwrap();
            prop_assert!((n + inv).abs() < 1e-10, "X={} N={} 1/p={}", c.amplitude, n, inv);
        }
    }

    #[test]
    fn circuit_scale_invariance(k in -3i32..4) {
        let d = DiodeSpec::new(7.061e-9, 1.808, 1, 1).unwrap();
        let base = CircuitSpec { r: 1e3, c1: 100e-9, c2: 1e-6, l: 75e-3, g_p: -1.005e-3, kappa: 1.0, diode: d };
        let s = 2f64.powi(k);
        let scaled = CircuitSpec { c1: base.c1 * s, c2: base.c2 * s, l: base.l * s, ..base };
        let a = dimensionless_from_circuit(&base).unwrap();
        let b = dimensionless_from_circuit(&scaled).unwrap();
        prop_assert_eq!(a.params, b.params);
        prop_assert_eq!(b.tau, a.tau * s);
        let fa = predicted_frequencies_hz(&a.params, a.tau).unwrap();
        let fb = predicted_frequencies_hz(&b.params, b.tau).unwrap();
        prop_assert_eq!(fb.f2.unwrap(), fa.f2.unwrap() / s);
    }
}

#[test]
fn df_series_at_tabulated_points() {
    // 2 I1(X)/X from mpmath at 30 digits.
    for (x, want) in [(0.1, 1.0012505209418538), (1.0, 1.1303182079849701), (10.0, 534.1976607402509)] {
        let got = df_series(x).unwrap();
        assert!((got / want - 1.0).abs() < 1e-12, "X={x}: {got} vs {want}");
    }
}

#[test]
fn origin_stability_examples() {
    let p = ChuaParams::from_slope(10.0, 20.0, 0.3, 0.2).unwrap();
    assert!(equilibrium_eigenvalues(&State::ORIGIN, &p).unwrap().stable);
    let inv_p2 = interception_points(&p).inv_p2().unwrap();
    let at = ChuaParams::from_slope(10.0, 20.0, inv_p2, -0.7875).unwrap();
    let spec = equilibrium_eigenvalues(&State::ORIGIN, &at).unwrap();
    let w2 = interception_points(&at).omega2().unwrap();
    assert!(spec.max_real().abs() < 1e-6);
    assert!((spec.eigenvalues[0].im.abs() - w2).abs() < 1e-6);
}

#[test]
fn characteristic_polynomial_matches_loop() {
    // det(sI - J) at the origin is s^3 + (2 gamma + alpha m) s^2 + (beta + alpha m) s + alpha beta (1 + m).
    let p = ChuaParams::from_slope(10.0, 13.3, -0.5, 3e-4).unwrap();
    let m = p.slope_at_origin();
    let j = jacobian(&State::ORIGIN, &p).unwrap();
    let c2 = -j.trace();
    let c1 = j[(0, 0)] * j[(1, 1)] - j[(0, 1)] * j[(1, 0)] + j[(0, 0)] * j[(2, 2)] - j[(0, 2)] * j[(2, 0)]
        + j[(1, 1)] * j[(2, 2)]
        - j[(1, 2)] * j[(2, 1)];
    let c0 = -j.determinant();
    let (a, b, g) = (p.alpha(), p.beta(), p.gamma());
    assert!((c2 - (2.0 * g + a * m)).abs() < 1e-12);
    assert!((c1 - (b + a * m)).abs() < 1e-12);
    assert!((c0 - a * b * (1.0 + m)).abs() < 1e-10);
}
