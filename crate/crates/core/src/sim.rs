//! Trajectories of the Chua flow and their Poincaré section at `y = 0`.

use serde::{Deserialize, Serialize};

use crate::error::{ChuaError, Result};
use crate::model::{self, ChuaParams, State};
use crate::ode::{Integrator, Method, Segment, System};

/// Time resolution of the crossing bisection.
pub const CROSSING_TIME_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSettings {
    pub method: Method,
    /// Time discarded before recording.
    pub t_transient: f64,
    /// Time recorded after the transient.
    pub t_sample: f64,
    /// State norm above which the run is declared divergent.
    pub divergence_radius: f64,
}

impl Default for IntegratorSettings {
    fn default() -> Self {
        Self {
            method: Method::Rk45 { rtol: 1e-9, atol: 1e-12 },
            t_transient: 500.0,
            t_sample: 500.0,
            divergence_radius: 1e6,
        }
    }
}

impl IntegratorSettings {
    /// Fixed-step RK4 at `h = 1e-3`, used for reproducible reference output.
    pub fn fixed_rk4() -> Self {
        Self { method: Method::Rk4 { step: 1e-3 }, ..Self::default() }
    }

    pub fn with_times(mut self, t_transient: f64, t_sample: f64) -> Self {
        self.t_transient = t_transient;
        self.t_sample = t_sample;
        self
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.method.validate()?;
        if !(self.t_transient >= 0.0 && self.t_sample >= 0.0)
            || !self.t_transient.is_finite()
            || !self.t_sample.is_finite()
        {
            return Err(ChuaError::InvalidParameter("t_transient and t_sample must be >= 0".into()));
        }
        if !(self.divergence_radius > 0.0) {
            return Err(ChuaError::InvalidParameter("divergence_radius must be > 0".into()));
        }
        Ok(())
    }

    pub fn t_end(&self) -> f64 {
        self.t_transient + self.t_sample
    }
}

/// The Chua vector field as an ODE system.
pub(crate) struct Flow<'a>(pub &'a ChuaParams);

impl System<3> for Flow<'_> {
    #[inline]
    fn eval(&self, y: &[f64; 3]) -> Result<[f64; 3]> {
        model::rhs(y, self.0)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<State>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<State> {
        self.states.last().copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    NegToPos,
    PosToNeg,
}

impl Direction {
    pub fn name(&self) -> &'static str {
        match self {
            Direction::NegToPos => "up",
            Direction::PosToNeg => "down",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoincareCrossing {
    pub t: f64,
    /// Refined state; `y` is exactly zero.
    pub state: State,
    pub direction: Direction,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CrossingSet {
    pub crossings: Vec<PoincareCrossing>,
    /// Fewer crossings than requested were found before the time budget ran out.
    pub truncated: bool,
}

fn check_radius(y: &[f64], radius: f64, t: f64) -> Result<()> {
    let r2: f64 = y[..3].iter().map(|v| v * v).sum();
    if !(r2.sqrt() <= radius) {
        return Err(ChuaError::Diverged { t });
    }
    Ok(())
}

/// Drives an integration from `t = 0` to `t_end`, calling `on_step` for every
/// accepted step once the transient is over. `on_step` returns `false` to stop.
pub(crate) fn drive<S: System<N>, const N: usize>(
    sys: &S,
    y0: [f64; N],
    cfg: &IntegratorSettings,
    mut on_step: impl FnMut(&Segment<N>) -> Result<bool>,
) -> Result<[f64; N]> {
    let mut it = Integrator::new(sys, cfg.method, 0.0, y0)?;
    check_radius(&y0, cfg.divergence_radius, 0.0)?;
    while it.t() < cfg.t_transient {
        let seg = it.step(cfg.t_transient)?;
        check_radius(&seg.y1, cfg.divergence_radius, seg.t1)?;
    }
    let t_end = cfg.t_end();
    while it.t() < t_end {
        let seg = it.step(t_end)?;
        check_radius(&seg.y1, cfg.divergence_radius, seg.t1)?;
        if !on_step(&seg)? {
            break;
        }
    }
    Ok(*it.y())
}

/// Integrates from `s0` over `[0, t_transient + t_sample]`, recording every
/// accepted step after the transient (the first sample is at `t_transient`).
pub fn integrate(s0: &State, p: &ChuaParams, cfg: &IntegratorSettings) -> Result<Trajectory> {
    cfg.validate()?;
    let mut traj = Trajectory::default();
    let mut first = true;
    drive(&Flow(p), s0.to_array(), cfg, |seg| {
        if first {
            traj.times.push(seg.t0);
            traj.states.push(State::try_from(seg.y0)?);
            first = false;
        }
        traj.times.push(seg.t1);
        traj.states.push(State::try_from(seg.y1)?);
        Ok(true)
    })
    .map(|last| {
        if traj.is_empty() {
            traj.times.push(cfg.t_end());
            traj.states.push(State { x: last[0], y: last[1], z: last[2] });
        }
        traj
    })
}

/// Detects and refines a sign change of `y` (component 1) inside one step.
pub(crate) fn refine_crossing<const N: usize>(seg: &Segment<N>) -> Option<(f64, [f64; N], Direction)> {
    let (ya, yb) = (seg.y0[1], seg.y1[1]);
    let direction = if ya < 0.0 && yb >= 0.0 {
        Direction::NegToPos
    } else if ya > 0.0 && yb <= 0.0 {
        Direction::PosToNeg
    } else {
        return None;
    };
    let (mut lo, mut hi) = (seg.t0, seg.t1);
    let sign_lo = ya.signum();
    while hi - lo > CROSSING_TIME_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = seg.eval_component(mid, 1);
        if v == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if v.signum() == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Pick whichever bracket end has the smaller |y|.
    let (ylo, yhi) = (seg.eval_component(lo, 1).abs(), seg.eval_component(hi, 1).abs());
    let t = if ylo <= yhi { lo } else { hi };
    let mut state = seg.eval(t);
    state[1] = 0.0;
    Some((t, state, direction))
}

/// Section crossings at `y = 0` in both directions after the transient.
///
/// With `max_crossings = Some(n)` the run stops after `n` crossings and
/// `truncated` reports whether fewer were found in the time budget.
pub fn poincare_crossings(
    s0: &State,
    p: &ChuaParams,
    cfg: &IntegratorSettings,
    max_crossings: Option<usize>,
) -> Result<CrossingSet> {
    cfg.validate()?;
    let mut out = Vec::new();
    let limit = max_crossings.unwrap_or(usize::MAX);
    if limit == 0 {
        return Ok(CrossingSet::default());
    }
    drive(&Flow(p), s0.to_array(), cfg, |seg| {
        if let Some((t, s, direction)) = refine_crossing(seg) {
            out.push(PoincareCrossing { t, state: State::try_from(s)?, direction });
        }
        Ok(out.len() < limit)
    })?;
    let truncated = max_crossings.is_some_and(|n| out.len() < n);
    Ok(CrossingSet { crossings: out, truncated })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn short() -> IntegratorSettings {
        IntegratorSettings::default().with_times(0.0, 20.0)
    }

    #[test]
    fn origin_is_constant() {
        let p = ChuaParams::new(10.0, 20.0, -0.2, -0.5).unwrap();
        let tr = integrate(&State::ORIGIN, &p, &short()).unwrap();
        assert!(tr.states.iter().all(|s| *s == State::ORIGIN));
        let cs = poincare_crossings(&State::ORIGIN, &p, &short(), None).unwrap();
        assert!(cs.crossings.is_empty());
        let cs = poincare_crossings(&State::ORIGIN, &p, &short(), Some(3)).unwrap();
        assert!(cs.truncated);
    }

    #[test]
    fn times_strictly_increase_and_start_at_transient() {
        let p = ChuaParams::from_slope(10.0, 13.3, -0.5, 0.0003).unwrap();
        let cfg = IntegratorSettings::default().with_times(5.0, 10.0);
        let tr = integrate(&State::new(0.1, 0.0, 0.0).unwrap(), &p, &cfg).unwrap();
        assert_eq!(tr.times[0], 5.0);
        assert_eq!(*tr.times.last().unwrap(), 15.0);
        assert!(tr.times.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn invalid_settings_rejected() {
        let p = ChuaParams::new(10.0, 20.0, 0.0, 0.0).unwrap();
        let mut cfg = short();
        cfg.t_sample = -1.0;
        assert!(integrate(&State::ORIGIN, &p, &cfg).is_err());
    }

    #[test]
    fn divergence_reports_escape_time() {
        // Sinh term with I0 < 0 pumps energy at large |x|.
        let p = ChuaParams::from_slope(10.0, 20.0, -0.5, -0.7875).unwrap();
        let cfg = IntegratorSettings::default().with_times(0.0, 200.0);
        match integrate(&State::new(3.0, 0.0, 0.0).unwrap(), &p, &cfg) {
            Err(ChuaError::Diverged { t }) => assert!(t.is_finite() && t < 200.0),
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn crossings_are_refined() {
        let p = ChuaParams::from_slope(10.0, 20.0, -0.75, -0.7875).unwrap();
        let cfg = IntegratorSettings::default().with_times(50.0, 20.0);
        let cs = poincare_crossings(&State::new(0.01, 0.0, 0.0).unwrap(), &p, &cfg, None).unwrap();
        assert!(cs.crossings.len() > 10);
        for c in &cs.crossings {
            assert_eq!(c.state.y(), 0.0);
            assert!(c.t >= 50.0 && c.t <= 70.0);
        }
        // directions alternate
        assert!(cs.crossings.windows(2).all(|w| w[0].direction != w[1].direction));
    }
}
