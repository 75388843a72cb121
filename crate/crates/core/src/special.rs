//! Modified Bessel function of the first kind, order one.

use std::f64::consts::PI;

const ASYMPTOTIC_FROM: f64 = 17.0;

/// `I1(x)` for real `x`.
///
/// Power series for `|x| < 17`, Hankel asymptotic expansion above. Both
/// branches are accurate to a few ulps at the crossover (the smallest
/// asymptotic term there is ~ e^-34).
pub fn bessel_i1(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax < ASYMPTOTIC_FROM { i1_series(ax) } else { i1_asymptotic(ax) };
    if x < 0.0 {
        -v
    } else {
        v
    }
}

/// `2 I1(x) / x`, continuous at the origin with value 1.
pub fn bessel_ratio(x: f64) -> f64 {
    let ax = x.abs();
    if ax == 0.0 {
        return 1.0;
    }
    if ax < ASYMPTOTIC_FROM {
        ratio_series(ax)
    } else {
        2.0 * i1_asymptotic(ax) / ax
    }
}

/// sum_k (x/2)^(2k) / (k! (k+1)!)
fn ratio_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= q / (k * (k + 1.0));
        sum += term;
        if term < 1e-17 * sum {
            return sum;
        }
    }
}

fn i1_series(x: f64) -> f64 {
    0.5 * x * ratio_series(x)
}

fn i1_asymptotic(x: f64) -> f64 {
    // I_nu(x) ~ e^x / sqrt(2 pi x) * sum_k (-1)^k a_k(nu) / x^k,
    // a_k = prod_{j=1..k} (4 nu^2 - (2j-1)^2) / (k! 8^k), nu = 1.
    if x > 709.0 {
        return f64::INFINITY;
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..60 {
        let kk = k as f64;
        let odd = 2.0 * kk - 1.0;
        let next = -term * (4.0 - odd * odd) / (kk * 8.0 * x);
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    // Split e^x to delay overflow near the top of the range.
    let half = (0.5 * x).exp();
    half * (half / (2.0 * PI * x).sqrt()) * sum
}
