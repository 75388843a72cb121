//! Lyapunov spectra, dominant frequencies and attractor classification.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{ChuaError, Result};
use crate::model::{self, ChuaParams, State};
use crate::ode::{Integrator, Segment, System};
use crate::sim::{self, Direction, Flow, IntegratorSettings, PoincareCrossing};

/// Interval between Gram-Schmidt re-orthonormalisations.
pub const REORTHO_INTERVAL: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LyapunovResult {
    /// Sorted in decreasing order.
    pub exponents: [f64; 3],
    pub converged: bool,
    pub t_used: f64,
    /// Time average of the Jacobian trace along the same trajectory.
    pub mean_trace: f64,
}

impl LyapunovResult {
    pub fn max(&self) -> f64 {
        self.exponents[0]
    }

    pub fn sum(&self) -> f64 {
        self.exponents.iter().sum()
    }
}

/// State plus three tangent vectors, `[x, y, z, v1.., v2.., v3..]`.
struct Tangent<'a>(&'a ChuaParams);

impl System<12> for Tangent<'_> {
    // Step control follows the state alone, so the base trajectory does not
    // depend on the tangent frame; the cap keeps the tangent flow resolved
    // when the state comes to rest.
    const CONTROLLED: usize = 3;
    const MAX_STEP: f64 = 0.02;

    #[inline]
    fn eval(&self, w: &[f64; 12]) -> Result<[f64; 12]> {
        let s = [w[0], w[1], w[2]];
        let f = model::rhs(&s, self.0)?;
        let j = model::jacobian_raw(w[0], self.0)?;
        let mut out = [0.0; 12];
        out[..3].copy_from_slice(&f);
        for k in 0..3 {
            let v = &w[3 + 3 * k..6 + 3 * k];
            for r in 0..3 {
                out[3 + 3 * k + r] = j[r][0] * v[0] + j[r][1] * v[1] + j[r][2] * v[2];
            }
        }
        Ok(out)
    }
}

/// True when the tangent frame is close to losing rank or its scale drifts
/// far from one, so it must be re-orthonormalised before the interval ends.
fn frame_degenerate(w: &[f64; 12]) -> bool {
    let v = |k: usize| [w[3 + 3 * k], w[4 + 3 * k], w[5 + 3 * k]];
    let (a, b, c) = (v(0), v(1), v(2));
    let norm = |u: [f64; 3]| (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
    let det = a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) + a[2] * (b[0] * c[1] - b[1] * c[0]);
    let (na, nb, nc) = (norm(a), norm(b), norm(c));
    let scale_ok = |n: f64| n > 1e-8 && n < 1e8;
    !(scale_ok(na) && scale_ok(nb) && scale_ok(nc)) || det.abs() < 1e-3 * na * nb * nc
}

/// Modified Gram-Schmidt on the three tangent vectors; returns the log norms.
fn orthonormalize(w: &mut [f64; 12]) -> [f64; 3] {
    let mut logs = [0.0; 3];
    for k in 0..3 {
        for m in 0..k {
            let dot: f64 = (0..3).map(|r| w[3 + 3 * k + r] * w[3 + 3 * m + r]).sum();
            for r in 0..3 {
                w[3 + 3 * k + r] -= dot * w[3 + 3 * m + r];
            }
        }
        let norm = (0..3).map(|r| w[3 + 3 * k + r].powi(2)).sum::<f64>().sqrt();
        logs[k] = norm.ln();
        for r in 0..3 {
            w[3 + 3 * k + r] /= norm;
        }
    }
    logs
}

/// Everything measured in one post-transient run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunAnalysis {
    pub crossings: Vec<PoincareCrossing>,
    pub lyapunov: Option<LyapunovResult>,
    pub final_state: Option<State>,
    /// Escape time when the run diverged.
    pub diverged_at: Option<f64>,
}

/// Integrates the state with a tangent frame after discarding the transient,
/// collecting section crossings along the way.
///
/// `frame` holds the initial tangent vectors (orthonormalised before use).
pub fn analyze_run(
    s0: &State,
    p: &ChuaParams,
    cfg: &IntegratorSettings,
    frame: Option<[[f64; 3]; 3]>,
) -> Result<RunAnalysis> {
    cfg.validate()?;
    let diverged = |t| RunAnalysis { crossings: Vec::new(), lyapunov: None, final_state: None, diverged_at: Some(t) };

    let transient_cfg = IntegratorSettings { t_sample: 0.0, ..*cfg };
    let start = match sim::drive(&Flow(p), s0.to_array(), &transient_cfg, |_| Ok(true)) {
        Ok(y) => y,
        Err(ChuaError::Diverged { t }) => return Ok(diverged(t)),
        Err(e) => return Err(e),
    };

    let mut w = [0.0; 12];
    w[..3].copy_from_slice(&start);
    let frame = frame.unwrap_or([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
    for k in 0..3 {
        w[3 + 3 * k..6 + 3 * k].copy_from_slice(&frame[k]);
    }
    orthonormalize(&mut w);

    let sys = Tangent(p);
    let t0 = cfg.t_transient;
    let t_end = cfg.t_end();
    let mut it = Integrator::new(&sys, cfg.method, t0, w)?;
    let mut sums = [0.0; 3];
    let mut half_estimate: Option<[f64; 3]> = None;
    let mut trace_integral = 0.0;
    let mut crossings = Vec::new();
    let mut next_ortho = t0 + REORTHO_INTERVAL;

    let result: Result<()> = (|| {
        while it.t() < t_end {
            let stop = next_ortho.min(t_end);
            let seg: Segment<12> = it.step(stop)?;
            let r2 = seg.y1[0].powi(2) + seg.y1[1].powi(2) + seg.y1[2].powi(2);
            if !(r2.sqrt() <= cfg.divergence_radius) {
                return Err(ChuaError::Diverged { t: seg.t1 });
            }
            trace_integral += trace_simpson(&seg, p)?;
            if let Some((t, s, direction)) = sim::refine_crossing(&seg) {
                crossings.push(PoincareCrossing { t, state: State::new(s[0], s[1], s[2])?, direction });
            }
            if it.t() >= stop || frame_degenerate(it.y()) {
                let mut y = *it.y();
                let logs = orthonormalize(&mut y);
                for k in 0..3 {
                    sums[k] += logs[k];
                }
                it.reset_state(y)?;
                if it.t() >= stop {
                    next_ortho = stop + REORTHO_INTERVAL;
                }
                if half_estimate.is_none() && it.t() - t0 >= 0.5 * cfg.t_sample {
                    let el = it.t() - t0;
                    half_estimate = Some(sums.map(|s| s / el));
                }
            }
        }
        Ok(())
    })();
    match result {
        Ok(()) => {}
        Err(ChuaError::Diverged { t }) => return Ok(diverged(t)),
        Err(e) => return Err(e),
    }

    let y = *it.y();
    let final_state = State::new(y[0], y[1], y[2])?;
    let elapsed = t_end - t0;
    let lyapunov = if elapsed > 0.0 {
        let mut exponents = sums.map(|s| s / elapsed);
        exponents.sort_by(|a, b| b.total_cmp(a));
        let settled = half_estimate.is_some_and(|mut h| {
            h.sort_by(|a, b| b.total_cmp(a));
            h.iter().zip(&exponents).all(|(a, b)| (a - b).abs() < 0.01)
        });
        let at_equilibrium = near_equilibrium(&final_state, p, FIXED_POINT_RADIUS).is_some();
        let has_flow_exponent = exponents.iter().any(|l| l.abs() < 0.01);
        Some(LyapunovResult {
            exponents,
            converged: settled && (at_equilibrium || has_flow_exponent),
            t_used: elapsed,
            mean_trace: trace_integral / elapsed,
        })
    } else {
        None
    };
    Ok(RunAnalysis { crossings, lyapunov, final_state: Some(final_state), diverged_at: None })
}

fn trace_simpson(seg: &Segment<12>, p: &ChuaParams) -> Result<f64> {
    let tm = 0.5 * (seg.t0 + seg.t1);
    let xm = seg.eval_component(tm, 0);
    let a = model::jacobian_trace(seg.y0[0], p)?;
    let m = model::jacobian_trace(xm, p)?;
    let b = model::jacobian_trace(seg.y1[0], p)?;
    Ok(seg.h() / 6.0 * (a + 4.0 * m + b))
}

/// Lyapunov spectrum by the tangent-flow (Benettin) method.
///
/// Fails with [`ChuaError::Diverged`] when the trajectory escapes.
pub fn lyapunov_spectrum(s0: &State, p: &ChuaParams, cfg: &IntegratorSettings) -> Result<LyapunovResult> {
    lyapunov_spectrum_with_frame(s0, p, cfg, None)
}

pub fn lyapunov_spectrum_with_frame(
    s0: &State,
    p: &ChuaParams,
    cfg: &IntegratorSettings,
    frame: Option<[[f64; 3]; 3]>,
) -> Result<LyapunovResult> {
    let run = analyze_run(s0, p, cfg, frame)?;
    if let Some(t) = run.diverged_at {
        return Err(ChuaError::Diverged { t });
    }
    run.lyapunov
        .ok_or_else(|| ChuaError::InsufficientData("t_sample must be > 0 for a Lyapunov spectrum".into()))
}

/// Qualitative attractor label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum AttractorClass {
    FixedPoint,
    /// `n` crossings per period in each direction.
    Periodic { n: u32 },
    Chaotic,
    Diverged,
    Undecided,
}

impl std::fmt::Display for AttractorClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AttractorClass::FixedPoint => f.write_str("fixed_point"),
            AttractorClass::Periodic { n } => write!(f, "periodic_{n}"),
            AttractorClass::Chaotic => f.write_str("chaotic"),
            AttractorClass::Diverged => f.write_str("diverged"),
            AttractorClass::Undecided => f.write_str("undecided"),
        }
    }
}

pub const FIXED_POINT_RADIUS: f64 = 1e-6;

/// Thresholds for [`classify_attractor`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassifyThresholds {
    /// `lambda_1` above this is chaos.
    pub chaos: f64,
    /// `lambda_1` at or below this allows a periodic label.
    pub periodic: f64,
    /// Single-linkage radius for grouping crossing x-values.
    pub cluster_radius: f64,
    /// Distance to an equilibrium that counts as having converged.
    pub fixed_point_radius: f64,
    /// Largest period (crossings per direction) reported as periodic.
    pub max_period: u32,
    /// A quiet run whose distance to an equilibrium shrinks below this
    /// fraction between the first and last quarter of the sample is
    /// converging to it.
    pub decay_ratio: f64,
}

impl Default for ClassifyThresholds {
    fn default() -> Self {
        Self { chaos: 0.01, periodic: 0.005, cluster_radius: 1e-3, fixed_point_radius: FIXED_POINT_RADIUS, max_period: 64, decay_ratio: 0.9 }
    }
}

/// Index of the equilibrium within `radius` of `s`, if any.
pub fn near_equilibrium(s: &State, p: &ChuaParams, radius: f64) -> Option<usize> {
    model::equilibria(p).iter().position(|e| e.distance(s) <= radius)
}

/// Number of single-linkage clusters of `values` at `radius`.
pub fn count_clusters(values: &mut [f64], radius: f64) -> usize {
    if values.is_empty() {
        return 0;
    }
    values.sort_by(f64::total_cmp);
    1 + values.windows(2).filter(|w| w[1] - w[0] > radius).count()
}

/// Labels a run.
///
/// Order of tests: divergence, convergence to an equilibrium (the final
/// state within `fixed_point_radius` of one, or no crossings at all with a
/// negative leading exponent), chaos (`lambda_1 > chaos`), then for
/// `lambda_1 <= periodic` either a decaying spiral (fixed point) or a cycle
/// whose crossing x-values form `n <= max_period` clusters per direction
/// and repeat every `n` crossings. Anything else is undecided.
pub fn classify_attractor(run: &RunAnalysis, p: &ChuaParams, th: &ClassifyThresholds) -> AttractorClass {
    if run.diverged_at.is_some() {
        return AttractorClass::Diverged;
    }
    let Some(lyap) = run.lyapunov else {
        return AttractorClass::Undecided;
    };
    if let Some(s) = run.final_state {
        if near_equilibrium(&s, p, th.fixed_point_radius).is_some() {
            return AttractorClass::FixedPoint;
        }
    }
    let l1 = lyap.max();
    if run.crossings.is_empty() && l1 < -th.periodic {
        return AttractorClass::FixedPoint;
    }
    if l1 > th.chaos {
        return AttractorClass::Chaotic;
    }
    if l1 <= th.periodic && !run.crossings.is_empty() {
        if decaying_to_equilibrium(&run.crossings, p, th.decay_ratio) {
            return AttractorClass::FixedPoint;
        }
        let n = period_from_crossings(&run.crossings, th.cluster_radius);
        if n >= 1 && n <= th.max_period as usize && recurs_with_lag(&run.crossings, n, th.cluster_radius) {
            return AttractorClass::Periodic { n: n as u32 };
        }
    }
    AttractorClass::Undecided
}

fn crossings_in(crossings: &[PoincareCrossing], d: Direction) -> Vec<State> {
    crossings.iter().filter(|c| c.direction == d).map(|c| c.state).collect()
}

/// True when the mean distance to the nearest equilibrium over the last
/// quarter of the crossings is below `ratio` times that of the first quarter.
fn decaying_to_equilibrium(crossings: &[PoincareCrossing], p: &ChuaParams, ratio: f64) -> bool {
    let up = crossings_in(crossings, Direction::NegToPos);
    let down = crossings_in(crossings, Direction::PosToNeg);
    let seq = if up.len() >= down.len() { up } else { down };
    let q = seq.len() / 4;
    if q == 0 {
        return false;
    }
    let eqs = model::equilibria(p);
    let last = seq[seq.len() - 1];
    let Some(target) = eqs.iter().min_by(|a, b| a.distance(&last).total_cmp(&b.distance(&last))) else {
        return false;
    };
    let mean = |s: &[State]| s.iter().map(|c| c.distance(target)).sum::<f64>() / s.len() as f64;
    mean(&seq[seq.len() - q..]) < ratio * mean(&seq[..q])
}

/// Whether x-values repeat after `n` crossings, within `radius`, in both
/// directions.
fn recurs_with_lag(crossings: &[PoincareCrossing], n: usize, radius: f64) -> bool {
    [Direction::NegToPos, Direction::PosToNeg].iter().all(|d| {
        let xs: Vec<f64> = crossings.iter().filter(|c| c.direction == *d).map(|c| c.state.x()).collect();
        xs.len() <= n || xs.windows(n + 1).all(|w| (w[n] - w[0]).abs() <= radius)
    })
}

/// Max over both directions of the number of distinct crossing x-values.
pub fn period_from_crossings(crossings: &[PoincareCrossing], radius: f64) -> usize {
    [Direction::NegToPos, Direction::PosToNeg]
        .iter()
        .map(|d| {
            let mut xs: Vec<f64> = crossings.iter().filter(|c| c.direction == *d).map(|c| c.state.x()).collect();
            count_clusters(&mut xs, radius)
        })
        .max()
        .unwrap_or(0)
}

/// Angular frequency from same-direction crossing times.
///
/// Uses the direction with more crossings; needs at least four of them.
pub fn dominant_frequency(crossings: &[PoincareCrossing]) -> Result<f64> {
    let times = |d: Direction| -> Vec<f64> { crossings.iter().filter(|c| c.direction == d).map(|c| c.t).collect() };
    let (up, down) = (times(Direction::NegToPos), times(Direction::PosToNeg));
    let ts = if up.len() >= down.len() { up } else { down };
    if ts.len() < 4 {
        return Err(ChuaError::InsufficientData(format!(
            "need at least 4 same-direction crossings, got {}",
            ts.len()
        )));
    }
    let span = ts[ts.len() - 1] - ts[0];
    Ok(2.0 * PI * (ts.len() - 1) as f64 / span)
}

/// Frequency of a periodic orbit whose crossings repeat every `n` passes:
/// `2 pi n / (sum of n consecutive intervals)`, averaged over whole periods.
pub fn orbit_frequency(crossings: &[PoincareCrossing], n: usize) -> Result<f64> {
    let ts: Vec<f64> = crossings.iter().filter(|c| c.direction == Direction::NegToPos).map(|c| c.t).collect();
    if n == 0 || ts.len() < n + 1 {
        return Err(ChuaError::InsufficientData("not enough crossings for one period".into()));
    }
    let periods = (ts.len() - 1) / n;
    let span = ts[periods * n] - ts[0];
    Ok(2.0 * PI * (periods * n) as f64 / span)
}
