//! Explicit Runge-Kutta stepping with dense output on fixed-size states.

use serde::{Deserialize, Serialize};

use crate::error::{ChuaError, Result};

/// Autonomous first-order system `y' = f(y)`.
pub trait System<const N: usize> {
    /// Leading components that enter adaptive error control.
    const CONTROLLED: usize = N;
    /// Upper bound on adaptive steps.
    const MAX_STEP: f64 = f64::INFINITY;

    fn eval(&self, y: &[f64; N]) -> Result<[f64; N]>;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Method {
    /// Classic fourth-order Runge-Kutta with a constant step.
    Rk4 { step: f64 },
    /// Dormand-Prince 5(4) with error control.
    Rk45 { rtol: f64, atol: f64 },
}

impl Method {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Method::Rk4 { step } if !(step > 0.0 && step.is_finite()) => {
                Err(ChuaError::InvalidParameter(format!("step must be > 0, got {step}")))
            }
            Method::Rk45 { rtol, atol } if !(rtol > 0.0 && rtol <= 1e-2 && atol > 0.0 && atol <= 1e-2) => {
                Err(ChuaError::InvalidParameter(format!(
                    "tolerances must lie in (0, 1e-2], got rtol={rtol} atol={atol}"
                )))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone)]
enum Dense<const N: usize> {
    /// Cubic Hermite through the endpoint values and slopes.
    Hermite { f0: [f64; N], f1: [f64; N] },
    /// Continuous extension of DOPRI5 (order 4).
    Dopri([[f64; N]; 5]),
}

/// One accepted step with its interpolant.
#[derive(Debug, Clone)]
pub struct Segment<const N: usize> {
    pub t0: f64,
    pub t1: f64,
    pub y0: [f64; N],
    pub y1: [f64; N],
    dense: Dense<N>,
}

impl<const N: usize> Segment<N> {
    pub fn h(&self) -> f64 {
        self.t1 - self.t0
    }

    /// Interpolated state at `t` in `[t0, t1]`.
    pub fn eval(&self, t: f64) -> [f64; N] {
        let h = self.h();
        let theta = if h > 0.0 { ((t - self.t0) / h).clamp(0.0, 1.0) } else { 0.0 };
        self.eval_theta(theta)
    }

    pub fn eval_component(&self, t: f64, i: usize) -> f64 {
        let h = self.h();
        let s = if h > 0.0 { ((t - self.t0) / h).clamp(0.0, 1.0) } else { 0.0 };
        let s1 = 1.0 - s;
        match &self.dense {
            Dense::Hermite { f0, f1 } => hermite(self.y0[i], self.y1[i], h * f0[i], h * f1[i], s),
            Dense::Dopri(r) => r[0][i] + s * (r[1][i] + s1 * (r[2][i] + s * (r[3][i] + s1 * r[4][i]))),
        }
    }

    fn eval_theta(&self, s: f64) -> [f64; N] {
        let h = self.h();
        let s1 = 1.0 - s;
        let mut out = [0.0; N];
        match &self.dense {
            Dense::Hermite { f0, f1 } => {
                for i in 0..N {
                    out[i] = hermite(self.y0[i], self.y1[i], h * f0[i], h * f1[i], s);
                }
            }
            Dense::Dopri(r) => {
                for i in 0..N {
                    out[i] = r[0][i] + s * (r[1][i] + s1 * (r[2][i] + s * (r[3][i] + s1 * r[4][i])));
                }
            }
        }
        out
    }
}

#[inline]
fn hermite(y0: f64, y1: f64, m0: f64, m1: f64, s: f64) -> f64 {
    let s2 = s * s;
    let s3 = s2 * s;
    (2.0 * s3 - 3.0 * s2 + 1.0) * y0 + (s3 - 2.0 * s2 + s) * m0 + (-2.0 * s3 + 3.0 * s2) * y1 + (s3 - s2) * m1
}

// Dormand-Prince 5(4) tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Growth rate (1/time) above which a step-size collapse is reported as divergence.
pub const BLOWUP_RATE: f64 = 1e6;

#[inline]
fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        let hc = h * c;
        for i in 0..N {
            out[i] += hc * k[i];
        }
    }
    out
}

/// Stepper holding the current point of an integration.
pub struct Integrator<'a, S: System<N>, const N: usize> {
    sys: &'a S,
    method: Method,
    t: f64,
    y: [f64; N],
    f: [f64; N],
    h: f64,
}

impl<'a, S: System<N>, const N: usize> Integrator<'a, S, N> {
    pub fn new(sys: &'a S, method: Method, t0: f64, y0: [f64; N]) -> Result<Self> {
        method.validate()?;
        let f = sys.eval(&y0).map_err(|e| at_time(e, t0))?;
        let h = match method {
            Method::Rk4 { step } => step,
            Method::Rk45 { rtol, atol } => initial_step(&y0[..S::CONTROLLED], &f[..S::CONTROLLED], rtol, atol).min(S::MAX_STEP),
        };
        Ok(Self { sys, method, t: t0, y: y0, f, h })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> &[f64; N] {
        &self.y
    }

    /// Replaces the current state (e.g. after re-orthonormalising a tangent frame).
    pub fn reset_state(&mut self, y: [f64; N]) -> Result<()> {
        self.f = self.sys.eval(&y).map_err(|e| at_time(e, self.t))?;
        self.y = y;
        Ok(())
    }

    /// Takes one accepted step that does not pass `t_stop`.
    pub fn step(&mut self, t_stop: f64) -> Result<Segment<N>> {
        match self.method {
            Method::Rk4 { step } => self.step_rk4(step, t_stop),
            Method::Rk45 { rtol, atol } => self.step_dopri(rtol, atol, t_stop),
        }
    }

    fn eval(&self, y: &[f64; N], t: f64) -> Result<[f64; N]> {
        self.sys.eval(y).map_err(|e| at_time(e, t))
    }

    fn step_rk4(&mut self, step: f64, t_stop: f64) -> Result<Segment<N>> {
        let remaining = t_stop - self.t;
        // Avoid a sliver step from accumulated rounding at the end.
        let h = if remaining <= step * (1.0 + 1e-9) { remaining } else { step };
        let (t, y0) = (self.t, self.y);
        let k1 = self.f;
        let k2 = self.eval(&axpy(&y0, 0.5 * h, &[(1.0, &k1)]), t)?;
        let k3 = self.eval(&axpy(&y0, 0.5 * h, &[(1.0, &k2)]), t)?;
        let k4 = self.eval(&axpy(&y0, h, &[(1.0, &k3)]), t)?;
        let y1 = axpy(&y0, h / 6.0, &[(1.0, &k1), (2.0, &k2), (2.0, &k3), (1.0, &k4)]);
        let t1 = if h == remaining { t_stop } else { t + h };
        let f1 = self.eval(&y1, t1)?;
        self.t = t1;
        self.y = y1;
        self.f = f1;
        Ok(Segment { t0: t, t1, y0, y1, dense: Dense::Hermite { f0: k1, f1 } })
    }

    fn step_dopri(&mut self, rtol: f64, atol: f64, t_stop: f64) -> Result<Segment<N>> {
        let (t, y0, k1) = (self.t, self.y, self.f);
        let min_h = 1e-14 * t.abs().max(1.0);
        let mut h = self.h;
        let mut rejected = false;
        loop {
            let remaining = t_stop - t;
            let last = h >= remaining;
            if last {
                h = remaining;
            }
            if h < min_h && !last {
                // An e-folding time far below any time scale of the model is a
                // finite-time blow-up, not stiffness.
                let norm = |v: &[f64; N]| v.iter().map(|a| a * a).sum::<f64>().sqrt();
                if norm(&k1) > BLOWUP_RATE * norm(&y0).max(1.0) {
                    return Err(ChuaError::Diverged { t });
                }
                let mut state = [0.0; 3];
                for (i, s) in state.iter_mut().enumerate().take(N.min(3)) {
                    *s = y0[i];
                }
                return Err(ChuaError::StepUnderflow { t, state });
            }
            let k2 = self.eval(&axpy(&y0, h, &[(A21, &k1)]), t)?;
            let k3 = self.eval(&axpy(&y0, h, &[(A31, &k1), (A32, &k2)]), t)?;
            let k4 = self.eval(&axpy(&y0, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]), t)?;
            let k5 = self.eval(&axpy(&y0, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]), t)?;
            let y6 = axpy(&y0, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]);
            let k6 = self.eval(&y6, t)?;
            let y1 = axpy(&y0, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
            let k7 = self.eval(&y1, t)?;

            let mut err = 0.0;
            for i in 0..S::CONTROLLED {
                let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sc = atol + rtol * y0[i].abs().max(y1[i].abs());
                err += (e / sc) * (e / sc);
            }
            let err = (err / S::CONTROLLED as f64).sqrt();
            if !err.is_finite() {
                rejected = true;
                h *= 0.2;
                continue;
            }
            let factor = if err == 0.0 { 10.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 10.0) };
            if err <= 1.0 {
                let mut r = [[0.0; N]; 5];
                for i in 0..N {
                    let dy = y1[i] - y0[i];
                    let bspl = h * k1[i] - dy;
                    r[0][i] = y0[i];
                    r[1][i] = dy;
                    r[2][i] = bspl;
                    r[3][i] = dy - h * k7[i] - bspl;
                    r[4][i] = h
                        * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
                }
                let t1 = if last { t_stop } else { t + h };
                self.t = t1;
                self.y = y1;
                self.f = k7;
                let proposal = h * factor.min(5.0);
                // A step clipped to t_stop must not shrink the next one.
                self.h = if last && !rejected { self.h.max(proposal) } else { proposal }.min(S::MAX_STEP);
                return Ok(Segment { t0: t, t1, y0, y1, dense: Dense::Dopri(r) });
            }
            rejected = true;
            h *= factor.min(1.0);
        }
    }
}

fn at_time(e: ChuaError, t: f64) -> ChuaError {
    match e {
        ChuaError::Diverged { .. } => ChuaError::Diverged { t },
        other => other,
    }
}

fn initial_step(y: &[f64], f: &[f64], rtol: f64, atol: f64) -> f64 {
    let n = y.len() as f64;
    let mut d0 = 0.0;
    let mut d1 = 0.0;
    for i in 0..y.len() {
        let sc = atol + rtol * y[i].abs();
        d0 += (y[i] / sc).powi(2);
        d1 += (f[i] / sc).powi(2);
    }
    let (d0, d1) = ((d0 / n).sqrt(), (d1 / n).sqrt());
    let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h.clamp(1e-8, 0.1)
}
