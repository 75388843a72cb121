//! The dimensionless Chua system with an antiparallel-diode nonlinearity.
//!
//! ```text
//! x' = alpha * (-x + y - u(x))
//! y' = x - y + z
//! z' = -beta * y
//! u(x) = g0 * x + I0 * sinh(x)
//! ```
//!
//! `u` is the dimensionless current drawn by the diode pair and its parallel
//! conductance. A negative `g0` (negative impedance converter) or a negative
//! `I0` (active diode stage) supplies energy to the LC network.

use nalgebra::Matrix3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::ops::Neg;

use crate::error::{ChuaError, Result};

/// Largest |x| for which `sinh`/`cosh` are evaluated. Beyond it the model is
/// treated as diverged rather than overflowing to infinity.
pub const OVERFLOW_GUARD: f64 = 700.0;

/// Residual below which a point is accepted as an equilibrium.
pub const EQUILIBRIUM_RESIDUAL: f64 = 1e-9;

/// Dimensionless parameters (alpha, beta, g0, I0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct ChuaParams {
    alpha: f64,
    beta: f64,
    g0: f64,
    #[serde(rename = "i0")]
    i0: f64,
}

#[derive(Deserialize)]
struct RawParams {
    alpha: f64,
    beta: f64,
    g0: f64,
    #[serde(alias = "I0")]
    i0: f64,
}

impl TryFrom<RawParams> for ChuaParams {
    type Error = ChuaError;

    fn try_from(raw: RawParams) -> Result<Self> {
        ChuaParams::new(raw.alpha, raw.beta, raw.g0, raw.i0)
    }
}

impl ChuaParams {
    pub fn new(alpha: f64, beta: f64, g0: f64, i0: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(ChuaError::InvalidParameter(format!("alpha must be > 0, got {alpha}")));
        }
        if !(beta.is_finite() && beta > 0.0) {
            return Err(ChuaError::InvalidParameter(format!("beta must be > 0, got {beta}")));
        }
        if !g0.is_finite() || !i0.is_finite() {
            return Err(ChuaError::InvalidParameter("g0 and I0 must be finite".into()));
        }
        Ok(Self { alpha, beta, g0, i0 })
    }

    /// Builds the parameter set from the total slope at the origin,
    /// `g0 + I0`, which is the quantity the stability analysis is phrased in.
    pub fn from_slope(alpha: f64, beta: f64, g0_plus_i0: f64, i0: f64) -> Result<Self> {
        Self::new(alpha, beta, g0_plus_i0 - i0, i0)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn g0(&self) -> f64 {
        self.g0
    }

    pub fn i0(&self) -> f64 {
        self.i0
    }

    /// `gamma = (1 + alpha) / 2`, always recomputed from alpha.
    pub fn gamma(&self) -> f64 {
        0.5 * (1.0 + self.alpha)
    }

    /// `g0 + I0`, the slope of `u` at the origin.
    pub fn slope_at_origin(&self) -> f64 {
        self.g0 + self.i0
    }

    /// Whether `alpha < beta < gamma^2`, the range where the Nyquist diagram
    /// has the two real-axis crossings p2, p3.
    pub fn in_main_range(&self) -> bool {
        let g = self.gamma();
        self.alpha < self.beta && self.beta < g * g
    }

    pub fn with_g0(self, g0: f64) -> Result<Self> {
        Self::new(self.alpha, self.beta, g0, self.i0)
    }

    pub fn with_beta(self, beta: f64) -> Result<Self> {
        Self::new(self.alpha, beta, self.g0, self.i0)
    }

    pub fn with_alpha(self, alpha: f64) -> Result<Self> {
        Self::new(alpha, self.beta, self.g0, self.i0)
    }

    pub fn with_i0(self, i0: f64) -> Result<Self> {
        Self::new(self.alpha, self.beta, self.g0, i0)
    }
}

/// A point of the dimensionless phase space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct State {
    pub(crate) x: f64,
    pub(crate) y: f64,
    pub(crate) z: f64,
}

impl State {
    pub const ORIGIN: State = State { x: 0.0, y: 0.0, z: 0.0 };

    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        if x.is_finite() && y.is_finite() && z.is_finite() {
            Ok(Self { x, y, z })
        } else {
            Err(ChuaError::NonFiniteState)
        }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn distance(&self, other: &State) -> f64 {
        let (dx, dy, dz) = (self.x - other.x, self.y - other.y, self.z - other.z);
        (dx * dx + dy * dy + dz * dz).sqrt()
    }
}

impl TryFrom<[f64; 3]> for State {
    type Error = ChuaError;

    fn try_from(v: [f64; 3]) -> Result<Self> {
        State::new(v[0], v[1], v[2])
    }
}

impl From<State> for [f64; 3] {
    fn from(s: State) -> Self {
        s.to_array()
    }
}

impl Neg for State {
    type Output = State;

    fn neg(self) -> State {
        State { x: -self.x, y: -self.y, z: -self.z }
    }
}

#[inline]
fn guard(x: f64) -> Result<()> {
    if x.abs() > OVERFLOW_GUARD || !x.is_finite() {
        Err(ChuaError::Diverged { t: f64::NAN })
    } else {
        Ok(())
    }
}

/// Dimensionless diode current `u(x) = g0 x + I0 sinh x`. Exactly odd in x.
pub fn nonlinearity_u(x: f64, p: &ChuaParams) -> Result<f64> {
    guard(x)?;
    Ok(p.g0 * x + p.i0 * x.sinh())
}

/// `du/dx = g0 + I0 cosh x`.
pub fn nonlinearity_slope(x: f64, p: &ChuaParams) -> Result<f64> {
    guard(x)?;
    Ok(p.g0 + p.i0 * x.cosh())
}

/// Right-hand side on raw arrays; the hot path of every integration.
#[inline]
pub(crate) fn rhs(s: &[f64; 3], p: &ChuaParams) -> Result<[f64; 3]> {
    let [x, y, z] = *s;
    let u = nonlinearity_u(x, p)?;
    Ok([p.alpha * (-x + y - u), x - y + z, -p.beta * y])
}

pub fn vector_field(s: &State, p: &ChuaParams) -> Result<[f64; 3]> {
    rhs(&s.to_array(), p)
}

#[inline]
pub(crate) fn jacobian_raw(x: f64, p: &ChuaParams) -> Result<[[f64; 3]; 3]> {
    let du = nonlinearity_slope(x, p)?;
    Ok([[p.alpha * (-1.0 - du), p.alpha, 0.0], [1.0, -1.0, 1.0], [0.0, -p.beta, 0.0]])
}

/// Analytic Jacobian of [`vector_field`]. Only the (1,1) entry depends on the state.
pub fn jacobian(s: &State, p: &ChuaParams) -> Result<Matrix3<f64>> {
    let j = jacobian_raw(s.x, p)?;
    Ok(Matrix3::from_fn(|r, c| j[r][c]))
}

/// Trace of the Jacobian, `alpha (-1 - u'(x)) - 1`.
pub fn jacobian_trace(x: f64, p: &ChuaParams) -> Result<f64> {
    Ok(p.alpha * (-1.0 - nonlinearity_slope(x, p)?) - 1.0)
}

/// All equilibria. The origin is always first; the symmetric pair
/// `±(x*, 0, -x*)` follows when `sinh(x)/x = -(1 + g0)/I0` has a positive root.
pub fn equilibria(p: &ChuaParams) -> Vec<State> {
    let mut out = vec![State::ORIGIN];
    if let Some(xs) = nonzero_equilibrium_x(p) {
        out.push(State { x: xs, y: 0.0, z: -xs });
        out.push(State { x: -xs, y: 0.0, z: xs });
    }
    out
}

fn nonzero_equilibrium_x(p: &ChuaParams) -> Option<f64> {
    if p.i0 == 0.0 {
        return None;
    }
    let target = -(1.0 + p.g0) / p.i0;
    if !(target > 1.0) {
        return None;
    }
    let f = |x: f64| x.sinh() / x - target;
    let mut lo = 1e-8;
    let mut hi = 50.0;
    // sinh(x)/x is increasing on x > 0; widen only for extreme ratios.
    while f(hi) < 0.0 {
        if hi >= OVERFLOW_GUARD {
            return None;
        }
        lo = hi;
        hi = (2.0 * hi).min(OVERFLOW_GUARD);
    }
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut x = 0.5 * (lo + hi);
    // Newton polish on g(x) = sinh(x) - target * x.
    let g = x.sinh() - target * x;
    let dg = x.cosh() - target;
    if dg != 0.0 {
        let polished = x - g / dg;
        if (polished - x).abs() < 1e-9 {
            x = polished;
        }
    }
    Some(x)
}

/// Eigenvalues of the linearization at an equilibrium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumSpectrum {
    /// Sorted by decreasing real part.
    pub eigenvalues: [Complex64; 3],
    pub stable: bool,
}

impl EquilibriumSpectrum {
    pub fn max_real(&self) -> f64 {
        self.eigenvalues[0].re
    }
}

pub fn equilibrium_eigenvalues(s: &State, p: &ChuaParams) -> Result<EquilibriumSpectrum> {
    let f = vector_field(s, p)?;
    let residual = f.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if residual > EQUILIBRIUM_RESIDUAL {
        return Err(ChuaError::ContractViolation(format!(
            "not an equilibrium: residual {residual:e}"
        )));
    }
    let ev = jacobian(s, p)?.complex_eigenvalues();
    let mut eigenvalues = [ev[0], ev[1], ev[2]];
    eigenvalues.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
    let stable = eigenvalues.iter().all(|l| l.re < 0.0);
    Ok(EquilibriumSpectrum { eigenvalues, stable })
}
