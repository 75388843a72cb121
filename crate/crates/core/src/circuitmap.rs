//! Physical circuit values to dimensionless parameters.
//!
//! Voltages scale by the breakpoint `B = m eta v_T`, time by `tau = R C2`:
//!
//! ```text
//! alpha = C2 / C1     beta = R^2 C2 / L     g0 = R g_p     I0 = 2 kappa R l i_s / B
//! x = v1 / B          y = v2 / B            z = R i_L / B
//! ```

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::dfan;
use crate::error::{ChuaError, Result};
use crate::model::ChuaParams;

pub const DEFAULT_THERMAL_VOLTAGE: f64 = 0.026;

fn default_vt() -> f64 {
    DEFAULT_THERMAL_VOLTAGE
}

/// A bank of `l` parallel strings of `m` series junctions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiodeSpec {
    /// Reverse saturation current, amperes.
    pub i_s: f64,
    /// Emission coefficient.
    pub eta: f64,
    pub m: u32,
    pub l: u32,
    /// Thermal voltage, volts.
    #[serde(default = "default_vt")]
    pub v_t: f64,
}

impl DiodeSpec {
    pub fn new(i_s: f64, eta: f64, m: u32, l: u32) -> Result<Self> {
        let d = Self { i_s, eta, m, l, v_t: DEFAULT_THERMAL_VOLTAGE };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(ChuaError::InvalidParameter(what.into()));
        if !(self.i_s > 0.0 && self.i_s.is_finite()) {
            return bad("i_s must be > 0");
        }
        if !(self.eta >= 1.0 && self.eta.is_finite()) {
            return bad("eta must be >= 1");
        }
        if self.m < 1 || self.l < 1 {
            return bad("m and l must be >= 1");
        }
        if !(self.v_t > 0.0 && self.v_t.is_finite()) {
            return bad("v_t must be > 0");
        }
        Ok(())
    }

    /// Breakpoint voltage `m eta v_T`.
    pub fn breakpoint(&self) -> f64 {
        self.m as f64 * self.eta * self.v_t
    }
}

/// Circuit element values in SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitSpec {
    pub r: f64,
    pub c1: f64,
    pub c2: f64,
    pub l: f64,
    /// Parallel conductance; negative when realized by a converter.
    pub g_p: f64,
    /// Gain applied to the diode-pair current; its sign is the converter
    /// orientation and 1 means a plain passive pair.
    pub kappa: f64,
    pub diode: DiodeSpec,
}

impl CircuitSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("r", self.r), ("c1", self.c1), ("c2", self.c2), ("l", self.l)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ChuaError::InvalidParameter(format!("{name} must be > 0")));
            }
        }
        if !self.g_p.is_finite() || !self.kappa.is_finite() {
            return Err(ChuaError::InvalidParameter("g_p and kappa must be finite".into()));
        }
        self.diode.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionlessMap {
    pub params: ChuaParams,
    /// Breakpoint voltage, volts.
    pub b: f64,
    /// Time unit, seconds.
    pub tau: f64,
    /// Volts per unit of `x` and `y`.
    pub voltage_scale: f64,
    /// Amperes per unit of `z`.
    pub current_scale: f64,
}

/// Shockley current of the bank at junction-string voltage `v_d`.
pub fn shockley_current(v_d: f64, d: &DiodeSpec) -> Result<f64> {
    if !v_d.is_finite() {
        return Err(ChuaError::InvalidParameter("v_d must be finite".into()));
    }
    let e = (v_d / d.breakpoint()).exp_m1();
    if !e.is_finite() {
        return Err(ChuaError::Diverged { t: f64::NAN });
    }
    Ok(d.l as f64 * d.i_s * e)
}

/// Odd part of an antiparallel pair of banks, `2 l i_s sinh(v / B)`.
pub fn pair_current(v: f64, d: &DiodeSpec) -> Result<f64> {
    let s = (v / d.breakpoint()).sinh();
    if !s.is_finite() {
        return Err(ChuaError::Diverged { t: f64::NAN });
    }
    Ok(2.0 * d.l as f64 * d.i_s * s)
}

pub fn dimensionless_from_circuit(c: &CircuitSpec) -> Result<DimensionlessMap> {
    c.validate()?;
    let b = c.diode.breakpoint();
    let alpha = c.c2 / c.c1;
    let beta = c.r * c.r * c.c2 / c.l;
    let g0 = c.r * c.g_p;
    let i0 = 2.0 * c.kappa * c.r * c.diode.l as f64 * c.diode.i_s / b;
    Ok(DimensionlessMap {
        params: ChuaParams::new(alpha, beta, g0, i0)?,
        b,
        tau: c.r * c.c2,
        voltage_scale: b,
        current_scale: b / c.r,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictedFrequencies {
    /// `None` when the interception does not exist.
    pub f2: Option<f64>,
    pub f3: Option<f64>,
}

/// `f_i = omega_i / (2 pi tau)` in hertz.
pub fn predicted_frequencies_hz(p: &ChuaParams, tau: f64) -> Result<PredictedFrequencies> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(ChuaError::InvalidParameter("tau must be > 0".into()));
    }
    let set = dfan::interception_points(p);
    let hz = |w: Option<f64>| w.map(|w| w / (2.0 * PI * tau));
    Ok(PredictedFrequencies { f2: hz(set.omega2()), f3: hz(set.omega3()) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::nonlinearity_u;

    fn n4007() -> DiodeSpec {
        DiodeSpec::new(7.061e-9, 1.808, 1, 1).unwrap()
    }

    fn circuit2() -> CircuitSpec {
        CircuitSpec { r: 1e3, c1: 100e-9, c2: 1e-6, l: 75e-3, g_p: -1.005e-3, kappa: 1.0, diode: n4007() }
    }

    #[test]
    fn shockley_limits() {
        let d = n4007();
        assert_eq!(shockley_current(0.0, &d).unwrap(), 0.0);
        let sat = shockley_current(-50.0, &d).unwrap();
        assert!((sat + d.i_s).abs() < 1e-25);
        // i_s (e^{0.5/0.047008} - 1) at 50 digits
        let want = 0.00029391622812551009;
        assert!((shockley_current(0.5, &d).unwrap() / want - 1.0).abs() < 1e-12);
        assert!(matches!(shockley_current(1e3, &d), Err(ChuaError::Diverged { .. })));
    }

    #[test]
    fn circuit_two() {
        let m = dimensionless_from_circuit(&circuit2()).unwrap();
        assert!((m.params.alpha() - 10.0).abs() < 1e-12);
        assert!((m.params.beta() - 13.333333333333334).abs() < 1e-12);
        assert!((m.tau - 1e-3).abs() < 1e-18);
        assert!((m.params.i0() - 3.004169503063308e-4).abs() < 1e-16);
    }

    #[test]
    fn kappa_zero_removes_nonlinearity() {
        let mut c = circuit2();
        c.kappa = 0.0;
        assert_eq!(dimensionless_from_circuit(&c).unwrap().params.i0(), 0.0);
    }

    #[test]
    fn round_trip_nonlinearity() {
        let c = circuit2();
        let m = dimensionless_from_circuit(&c).unwrap();
        for x in [-6.0, -1.3, -0.01, 0.0, 0.2, 2.5, 7.0] {
            let v = m.b * x;
            let i = c.g_p * v + c.kappa * pair_current(v, &c.diode).unwrap();
            let want = c.r / m.b * i;
            let got = nonlinearity_u(x, &m.params).unwrap();
            assert!((got - want).abs() <= 1e-12 * want.abs().max(1e-300), "x={x}: {got} vs {want}");
        }
    }

    #[test]
    fn frequencies_scale_with_tau() {
        let p = ChuaParams::new(10.0, 13.3, 0.0, 3e-4).unwrap();
        let a = predicted_frequencies_hz(&p, 1e-3).unwrap();
        let b = predicted_frequencies_hz(&p, 0.5e-3).unwrap();
        assert_eq!(b.f2.unwrap(), 2.0 * a.f2.unwrap());
        assert_eq!(b.f3.unwrap(), 2.0 * a.f3.unwrap());
    }
}
