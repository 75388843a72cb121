use chua_core::ChuaParams;
use std::f64::consts::PI;

/// Describing function by direct quadrature,
/// `-(1/(pi X)) * integral over one period of u(X sin t) sin t`.
///
/// Trapezoid rule on the periodic integrand (spectrally accurate), with the
/// node count doubled until successive estimates agree to 1e-15.
pub fn df_quadrature(x: f64, p: &ChuaParams) -> f64 {
    let estimate = |m: usize| {
        let h = 2.0 * PI / m as f64;
        let s: f64 = (0..m)
            .map(|k| {
                let t = k as f64 * h;
                let v = x * t.sin();
                (p.g0() * v + p.i0() * v.sinh()) * t.sin()
            })
            .sum();
        s * h / (PI * x)
    };
    let mut m = 16;
    let mut prev = estimate(m);
    loop {
        m *= 2;
        let next = estimate(m);
        if (next - prev).abs() <= 1e-15 * next.abs() || m > 1 << 16 {
            return -next;
        }
        prev = next;
    }
}
