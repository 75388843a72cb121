//! Describing-function analysis of the Chua loop.
//!
//! The linear part is the transfer function from the diode current `u` to
//! the voltage `x`,
//!
//! ```text
//! G(s) = -alpha (s^2 + s + beta) / (s^3 + 2 gamma s^2 + beta s + alpha beta)
//! ```
//!
//! and the nonlinearity is replaced by its fundamental-harmonic gain `N(X)`.
//! A harmonic-balance solution (a limit cycle of amplitude `X` and frequency
//! `w`) requires `G(jw) = -1/N(X)`. Because `N` is real, only the real-axis
//! crossings of the Nyquist diagram matter: `p0 = 0` (w = inf), `p1 = -1`
//! (w = 0), and `p2`, `p3` at the two finite crossing frequencies.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{ChuaError, Result};
use crate::model::ChuaParams;

/// Maximum number of series terms summed for `N(X)`.
pub const SERIES_MAX_TERMS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexPoint {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexPoint {
    fn from(c: Complex64) -> Self {
        ComplexPoint { re: c.re, im: c.im }
    }
}

/// Evaluates `G(jw)`.
///
/// Non-finite `omega` returns the limit at infinity, `0`.
pub fn transfer_function(omega: f64, p: &ChuaParams) -> Result<ComplexPoint> {
    if !omega.is_finite() || omega.abs() > 1e100 {
        return Ok(ComplexPoint { re: 0.0, im: 0.0 });
    }
    let (a, b, g) = (p.alpha(), p.beta(), p.gamma());
    let w2 = omega * omega;
    let num = Complex64::new(b - w2, omega);
    let den = Complex64::new(a * b - 2.0 * g * w2, b * omega - w2 * omega);
    let scale = (a * b).abs() + 2.0 * g * w2 + b * omega.abs() + w2 * omega.abs();
    if den.norm() <= f64::EPSILON * scale {
        return Err(ChuaError::PoleOnAxis { omega });
    }
    Ok((-a * num / den).into())
}

/// Frequency of an interception point. `w0` is the point at infinity and
/// never takes part in arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Omega {
    Infinite,
    Finite(f64),
}

impl Omega {
    pub fn finite(&self) -> Option<f64> {
        match *self {
            Omega::Finite(w) => Some(w),
            Omega::Infinite => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interception {
    pub omega: Omega,
    pub p: f64,
    pub exists: bool,
}

/// The four real-axis crossings `{w_i, p_i}` of the Nyquist diagram.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterceptionSet {
    pub points: [Interception; 4],
}

impl InterceptionSet {
    pub fn omega2(&self) -> Option<f64> {
        self.get(2).and_then(|i| i.omega.finite())
    }

    pub fn omega3(&self) -> Option<f64> {
        self.get(3).and_then(|i| i.omega.finite())
    }

    pub fn p2(&self) -> Option<f64> {
        self.get(2).map(|i| i.p)
    }

    pub fn p3(&self) -> Option<f64> {
        self.get(3).map(|i| i.p)
    }

    pub fn inv_p2(&self) -> Option<f64> {
        self.p2().map(f64::recip)
    }

    pub fn inv_p3(&self) -> Option<f64> {
        self.p3().map(f64::recip)
    }

    fn get(&self, i: usize) -> Option<&Interception> {
        let pt = &self.points[i];
        pt.exists.then_some(pt)
    }
}

/// Closed-form crossings:
/// `w2,3 = sqrt(beta - gamma -+ sqrt(gamma^2 - beta))`,
/// `p2,3 = -alpha / (gamma +- sqrt(gamma^2 - beta))`.
pub fn interception_points(p: &ChuaParams) -> InterceptionSet {
    let (a, b, g) = (p.alpha(), p.beta(), p.gamma());
    let disc = g * g - b;
    let p0 = Interception { omega: Omega::Infinite, p: 0.0, exists: true };
    let p1 = Interception { omega: Omega::Finite(0.0), p: -1.0, exists: true };
    let missing = Interception { omega: Omega::Finite(f64::NAN), p: f64::NAN, exists: false };
    if disc < 0.0 {
        return InterceptionSet { points: [p0, p1, missing, missing] };
    }
    let root = disc.sqrt();
    let make = |sq: f64, denom: f64| {
        let w2 = b - g + sq;
        if w2 >= 0.0 && denom != 0.0 {
            Interception { omega: Omega::Finite(w2.sqrt()), p: -a / denom, exists: true }
        } else {
            missing
        }
    };
    InterceptionSet { points: [p0, p1, make(-root, g + root), make(root, g - root)] }
}

/// The bracketed series of the describing function,
/// `1 + sum_j prod_{i<=j} (2i+1)/(2i+2) * X^(2j) / (2j+1)!`,
/// which equals `2 I1(X) / X`.
pub fn df_series(amplitude: f64) -> Result<f64> {
    if !(amplitude >= 0.0) {
        return Err(ChuaError::InvalidParameter(format!(
            "describing function amplitude must be >= 0, got {amplitude}"
        )));
    }
    let x2 = amplitude * amplitude;
    let mut sum = 1.0_f64;
    let mut prod = 1.0_f64;
    // X^(2j) / (2j+1)! built incrementally.
    let mut power_over_fact = 1.0_f64;
    for j in 1..=SERIES_MAX_TERMS {
        let jf = j as f64;
        prod *= (2.0 * jf + 1.0) / (2.0 * jf + 2.0);
        power_over_fact *= x2 / ((2.0 * jf) * (2.0 * jf + 1.0));
        let term = prod * power_over_fact;
        sum += term;
        if !sum.is_finite() {
            return Err(ChuaError::Diverged { t: f64::NAN });
        }
        if term <= 1e-16 * sum && (j as f64) > 0.5 * amplitude {
            break;
        }
    }
    Ok(sum)
}

/// `N(X) = -g0 - I0 * series(X)`.
pub fn describing_function(amplitude: f64, p: &ChuaParams) -> Result<f64> {
    Ok(-p.g0() - p.i0() * df_series(amplitude)?)
}

/// `N(X)` through the Bessel closed form `-g0 - I0 * 2 I1(X) / X`.
pub fn describing_function_bessel(amplitude: f64, p: &ChuaParams) -> Result<f64> {
    if !(amplitude >= 0.0) {
        return Err(ChuaError::InvalidParameter(format!(
            "describing function amplitude must be >= 0, got {amplitude}"
        )));
    }
    let r = crate::special::bessel_ratio(amplitude);
    if !r.is_finite() {
        return Err(ChuaError::Diverged { t: f64::NAN });
    }
    Ok(-p.g0() - p.i0() * r)
}

/// The geometric locus `-1/N(X)`. Starts at `1/(g0 + I0)` and tends to 0.
pub fn locus_inverse(amplitude: f64, p: &ChuaParams) -> Result<f64> {
    let n = describing_function(amplitude, p)?;
    if n == 0.0 {
        return Err(ChuaError::LocusDiscontinuity { amplitude });
    }
    Ok(-1.0 / n)
}

/// Root of `N(X) = 0` (the jump of the locus), present when `(g0 + I0) I0 < 0`.
pub fn locus_discontinuity(p: &ChuaParams) -> Option<f64> {
    if p.i0() == 0.0 {
        return None;
    }
    solve_series(-p.g0() / p.i0())
}

/// Stability of the linear loop closed through a real gain `k`, i.e. of
/// `x' = alpha (-x + y - k x)`. Routh-Hurwitz on
/// `s^3 + (2 gamma + alpha k) s^2 + (beta + alpha k) s + alpha beta (1 + k)`.
pub fn linear_loop_stable(gain: f64, p: &ChuaParams) -> bool {
    let (a, b, g) = (p.alpha(), p.beta(), p.gamma());
    let a2 = 2.0 * g + a * gain;
    let a1 = b + a * gain;
    let a0 = a * b * (1.0 + gain);
    a2 > 0.0 && a1 > 0.0 && a0 > 0.0 && a2 * a1 > a0
}

/// A harmonic-balance limit cycle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictedCycle {
    pub amplitude: f64,
    pub omega: f64,
    /// Which crossing, 2 or 3.
    pub index: u8,
    pub stable: bool,
}

/// Limit cycles where the locus meets `p2` or `p3`.
///
/// Solves `N(X) = -1/p_i` for `X > 0`. A cycle is stable when amplitudes just
/// above it map into the region where the loop is stable (the locus leaves
/// the encircled zone as `X` grows).
pub fn predicted_limit_cycles(p: &ChuaParams) -> Vec<PredictedCycle> {
    let g = p.gamma();
    if !(g * g > p.beta()) || p.i0() == 0.0 {
        return Vec::new();
    }
    let set = interception_points(p);
    let mut out = Vec::new();
    for (index, pt) in [(2u8, set.points[2]), (3u8, set.points[3])] {
        if !pt.exists {
            continue;
        }
        let Some(omega) = pt.omega.finite() else { continue };
        // -1/N(X) = p_i  <=>  g0 + I0 S(X) = 1/p_i
        let target = (1.0 / pt.p - p.g0()) / p.i0();
        let Some(amplitude) = solve_series(target) else { continue };
        if amplitude <= 0.0 {
            continue;
        }
        // Equivalent gain k(X) = -N(X) moves with sign(I0) as X grows.
        let k = 1.0 / pt.p;
        let nudge = 1e-6 * k.abs().max(1.0) * p.i0().signum();
        let stable = linear_loop_stable(k + nudge, p);
        out.push(PredictedCycle { amplitude, omega, index, stable });
    }
    out
}

/// Solves `series(X) = target` for `X > 0`; the series is increasing from 1.
fn solve_series(target: f64) -> Option<f64> {
    if !(target > 1.0) || !target.is_finite() {
        return None;
    }
    let f = |x: f64| crate::special::bessel_ratio(x) - target;
    let mut lo = 0.0;
    let mut hi = 1.0;
    while f(hi) < 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > 1400.0 {
            return None;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Newton polish on the series itself so residuals are measured on N.
    let mut x = 0.5 * (lo + hi);
    for _ in 0..3 {
        let (Ok(s), Ok(sp)) = (df_series(x), df_series_derivative(x)) else { break };
        if sp <= 0.0 {
            break;
        }
        let next = x - (s - target) / sp;
        if !(next > 0.0) || (next - x).abs() > 1e-6 * x.max(1.0) {
            break;
        }
        x = next;
    }
    Some(x)
}

/// d/dX of `2 I1(X)/X`, which is `2 I2(X)/X` = `X/4 * sum_k (X/2)^(2k) / (k! (k+2)!) * 2`.
fn df_series_derivative(x: f64) -> Result<f64> {
    // d/dX sum_k (X/2)^{2k} / (k!(k+1)!) = sum_{k>=1} k X^{2k-1} / (2^{2k-1} k! (k+1)!)
    let q = 0.25 * x * x;
    let mut term = 0.5 * x * 0.5; // k = 1: X / (2 * 1 * 2)
    let mut sum = term;
    for k in 2..400 {
        let kf = k as f64;
        term *= q / ((kf - 1.0) * (kf + 1.0));
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    if sum.is_finite() {
        Ok(sum)
    } else {
        Err(ChuaError::Diverged { t: f64::NAN })
    }
}

/// One qualitative behavior predicted for a parameter region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Behavior {
    Origin,
    EquilibriaPm,
    CycleOmega2ToChaos,
    CycleOmega3,
    Unstable,
}

impl Behavior {
    pub const ALL: [Behavior; 5] = [
        Behavior::Origin,
        Behavior::EquilibriaPm,
        Behavior::CycleOmega2ToChaos,
        Behavior::CycleOmega3,
        Behavior::Unstable,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Behavior::Origin => "origin",
            Behavior::EquilibriaPm => "pm_p1",
            Behavior::CycleOmega2ToChaos => "w2_chaos",
            Behavior::CycleOmega3 => "w3",
            Behavior::Unstable => "unstable",
        }
    }
}

/// Non-empty set of coexisting behaviors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct BehaviorSet(u8);

impl BehaviorSet {
    pub fn of(items: &[Behavior]) -> Self {
        BehaviorSet(items.iter().fold(0, |m, b| m | (1 << *b as u8)))
    }

    pub fn contains(&self, b: Behavior) -> bool {
        self.0 & (1 << b as u8) != 0
    }

    pub fn insert(&mut self, b: Behavior) {
        self.0 |= 1 << b as u8;
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = Behavior> + '_ {
        Behavior::ALL.into_iter().filter(|b| self.contains(*b))
    }
}

impl fmt::Display for BehaviorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<_> = self.iter().map(|b| b.name()).collect();
        f.write_str(&names.join("+"))
    }
}

/// Which analytic boundary a parameter point sits on exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionBoundary {
    MinusOne,
    InvP2,
    InvP3,
    Zero,
    /// `I0 = 0`: neither sign regime applies.
    NoNonlinearity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegionLabel {
    Region(BehaviorSet),
    Boundary(RegionBoundary),
    /// Outside `alpha < beta < gamma^2`.
    OutOfRange,
}

impl fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegionLabel::Region(set) => write!(f, "{set}"),
            RegionLabel::Boundary(b) => write!(f, "boundary:{}", b.name()),
            RegionLabel::OutOfRange => f.write_str("out_of_range"),
        }
    }
}

impl RegionBoundary {
    pub fn name(&self) -> &'static str {
        match self {
            RegionBoundary::MinusOne => "minus_one",
            RegionBoundary::InvP2 => "inv_p2",
            RegionBoundary::InvP3 => "inv_p3",
            RegionBoundary::Zero => "zero",
            RegionBoundary::NoNonlinearity => "no_nonlinearity",
        }
    }
}

impl Serialize for RegionLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Analytic region map in terms of `g0 + I0`, `sign(I0)`, `1/p2` and `1/p3`.
pub fn classify_region(p: &ChuaParams) -> RegionLabel {
    if !p.in_main_range() {
        return RegionLabel::OutOfRange;
    }
    let set = interception_points(p);
    let (Some(ip2), Some(ip3)) = (set.inv_p2(), set.inv_p3()) else {
        return RegionLabel::OutOfRange;
    };
    if p.i0() == 0.0 {
        return RegionLabel::Boundary(RegionBoundary::NoNonlinearity);
    }
    let m = p.slope_at_origin();
    let edges = [
        (-1.0, RegionBoundary::MinusOne),
        (ip2, RegionBoundary::InvP2),
        (ip3, RegionBoundary::InvP3),
        (0.0, RegionBoundary::Zero),
    ];
    if let Some((_, b)) = edges.iter().find(|(v, _)| m == *v) {
        return RegionLabel::Boundary(*b);
    }
    // -1 < 1/p2 < 1/p3 < 0 throughout the main range.
    let band = edges.iter().filter(|(v, _)| m > *v).count();
    use Behavior::*;
    let same_sign = m * p.i0() > 0.0;
    let items: &[Behavior] = if same_sign {
        match band {
            0 => &[Unstable],
            1 => &[Origin, Unstable],
            2 => &[CycleOmega2ToChaos, Unstable],
            3 => &[Origin, CycleOmega2ToChaos, Unstable],
            _ => &[Origin],
        }
    } else {
        match band {
            0 => &[EquilibriaPm, CycleOmega3, CycleOmega2ToChaos],
            1 => &[Origin, CycleOmega3],
            2 => &[CycleOmega3],
            3 => &[Origin],
            _ => &[Origin, CycleOmega2ToChaos, Unstable],
        }
    };
    RegionLabel::Region(BehaviorSet::of(items))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(alpha: f64, beta: f64, g0: f64, i0: f64) -> ChuaParams {
        ChuaParams::new(alpha, beta, g0, i0).unwrap()
    }

    #[test]
    fn transfer_function_limits() {
        let p = params(10.0, 20.0, 0.0, 0.0);
        let g0 = transfer_function(0.0, &p).unwrap();
        assert_eq!((g0.re, g0.im), (-1.0, 0.0));
        let inf = transfer_function(f64::INFINITY, &p).unwrap();
        assert_eq!((inf.re, inf.im), (0.0, 0.0));
        let big = transfer_function(1e8, &p).unwrap();
        assert!(big.re.hypot(big.im) < 1e-6);
    }

    #[test]
    fn transfer_function_at_omega2() {
        // w2 = sqrt(20 - 5.5 - sqrt(10.25)), p2 = -10 / (5.5 + sqrt(10.25)); mpmath, 20 digits
        let p = params(10.0, 20.0, 0.0, 0.0);
        let w2 = 3.361314903617865;
        let g = transfer_function(w2, &p).unwrap();
        assert!((g.re + 1.1492189406417878).abs() < 1e-9);
        assert!(g.im.abs() < 1e-9);
    }

    #[test]
    fn interception_values() {
        let s = interception_points(&params(10.0, 20.0, 0.0, 0.0));
        assert!((s.inv_p2().unwrap() + 0.87).abs() < 0.005);
        assert!((s.inv_p3().unwrap() + 0.23).abs() < 0.005);
        let s = interception_points(&params(10.0, 13.3, 0.0, 0.0));
        assert!((s.inv_p2().unwrap() + 0.96).abs() < 0.005);
        assert!((s.inv_p3().unwrap() + 0.14).abs() < 0.005);
        assert!((s.omega3().unwrap() - 3.4521).abs() < 1e-4);
        assert_eq!(s.points[0].omega, Omega::Infinite);
        assert_eq!(s.points[1].p, -1.0);
    }

    #[test]
    fn degenerate_discriminant() {
        let p = params(10.0, 30.25, 0.0, 0.0);
        let s = interception_points(&p);
        let w = (30.25_f64 - 5.5).sqrt();
        assert!((s.omega2().unwrap() - w).abs() < 1e-12);
        assert!((s.omega3().unwrap() - w).abs() < 1e-12);
        assert!((s.p2().unwrap() + 10.0 / 5.5).abs() < 1e-12);
        assert_eq!(s.p2(), s.p3());
        let s = interception_points(&params(10.0, 31.0, 0.0, 0.0));
        assert!(s.p2().is_none() && s.omega3().is_none());
    }

    #[test]
    fn df_at_zero_and_negative_amplitude() {
        let p = params(10.0, 20.0, 0.3, 0.2);
        assert_eq!(describing_function(0.0, &p).unwrap(), -0.5);
        assert!(describing_function(-1.0, &p).is_err());
        assert!(matches!(describing_function(1e4, &p), Err(ChuaError::Diverged { .. })));
    }

    #[test]
    fn locus_endpoints() {
        let p = params(10.0, 20.0, 0.3, 0.2);
        assert!((locus_inverse(0.0, &p).unwrap() - 2.0).abs() < 1e-15);
        assert!(locus_inverse(600.0, &p).unwrap().abs() < 1e-200);
    }

    #[test]
    fn locus_root_regime() {
        let p = params(10.0, 13.3, -1.005, 0.0003);
        let x = locus_discontinuity(&p).unwrap();
        // bisection on the increasing ratio 2 I1(X)/X = 3350
        let (mut lo, mut hi) = (1.0_f64, 30.0_f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if crate::special::bessel_ratio(mid) < 1.005 / 0.0003 {
                lo = mid
            } else {
                hi = mid
            }
        }
        assert!((x - lo).abs() < 1e-10);
        assert!(describing_function(x, &p).unwrap().abs() < 1e-9);
        assert!(locus_discontinuity(&params(10.0, 20.0, 0.3, 0.2)).is_none());
    }

    #[test]
    fn cycles_omega2_regime() {
        let p = ChuaParams::from_slope(10.0, 20.0, -0.75, -0.7875).unwrap();
        let cycles = predicted_limit_cycles(&p);
        assert_eq!(cycles.len(), 1);
        let c = cycles[0];
        assert_eq!(c.index, 2);
        assert!(c.stable);
        let p2 = interception_points(&p).p2().unwrap();
        assert!((describing_function(c.amplitude, &p).unwrap() + 1.0 / p2).abs() < 1e-10);
    }

    #[test]
    fn cycles_omega3_regime() {
        let p = ChuaParams::from_slope(10.0, 13.3, -0.5, 0.0003).unwrap();
        let cycles = predicted_limit_cycles(&p);
        assert_eq!(cycles.len(), 1);
        assert_eq!(cycles[0].index, 3);
        assert!(cycles[0].stable);
    }

    #[test]
    fn no_cycles_when_locus_outside() {
        let p = ChuaParams::from_slope(10.0, 20.0, 0.4, 0.2).unwrap();
        assert!(predicted_limit_cycles(&p).is_empty());
    }

    #[test]
    fn two_cycles_below_minus_one() {
        // (g0+I0) I0 < 0 and g0 + I0 < -1: unstable w2 cycle and stable w3 cycle.
        let p = ChuaParams::from_slope(10.0, 13.3, -1.07, 0.0003).unwrap();
        let cycles = predicted_limit_cycles(&p);
        assert_eq!(cycles.len(), 2);
        assert!(!cycles.iter().find(|c| c.index == 2).unwrap().stable);
        assert!(cycles.iter().find(|c| c.index == 3).unwrap().stable);
    }

    #[test]
    fn region_examples() {
        use Behavior::*;
        let label = |a, b, m, i0| classify_region(&ChuaParams::from_slope(a, b, m, i0).unwrap());
        assert_eq!(
            label(10.0, 20.0, -0.75, -0.7875),
            RegionLabel::Region(BehaviorSet::of(&[CycleOmega2ToChaos, Unstable]))
        );
        assert_eq!(label(10.0, 13.3, -0.98, 0.0003), RegionLabel::Region(BehaviorSet::of(&[Origin, CycleOmega3])));
        assert_eq!(label(10.0, 13.3, -0.5, 0.0003), RegionLabel::Region(BehaviorSet::of(&[CycleOmega3])));
        assert_eq!(
            label(10.0, 13.3, -1.07, 0.0003),
            RegionLabel::Region(BehaviorSet::of(&[EquilibriaPm, CycleOmega3, CycleOmega2ToChaos]))
        );
        assert_eq!(label(10.0, 40.0, -0.5, 0.1), RegionLabel::OutOfRange);
        assert_eq!(
            classify_region(&params(10.0, 20.0, -1.1, 0.1)),
            RegionLabel::Boundary(RegionBoundary::MinusOne)
        );
        assert_eq!(
            classify_region(&params(10.0, 20.0, -0.5, 0.0)),
            RegionLabel::Boundary(RegionBoundary::NoNonlinearity)
        );
    }

    #[test]
    fn routh_matches_origin_hopf() {
        // The linear loop with gain k = g0 + I0 loses stability at k = 1/p2 and regains it at 1/p3.
        let p = params(10.0, 20.0, 0.0, 0.0);
        let s = interception_points(&p);
        let (ip2, ip3) = (s.inv_p2().unwrap(), s.inv_p3().unwrap());
        assert!(linear_loop_stable(ip2 - 1e-6, &p));
        assert!(!linear_loop_stable(ip2 + 1e-6, &p));
        assert!(!linear_loop_stable(ip3 - 1e-6, &p));
        assert!(linear_loop_stable(ip3 + 1e-6, &p));
        assert!(!linear_loop_stable(-1.0 - 1e-6, &p));
        assert!(linear_loop_stable(-1.0 + 1e-6, &p));
    }
}
