//! JSON configs and their merge with command-line flags. Flags win.

use chua_core::ode::Method;
use chua_core::sim::IntegratorSettings;
use chua_core::{ChuaParams, State};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::output::{usage, CliResult};
use crate::{InitialArgs, IntegratorArgs, ParamArgs};

pub const DEFAULT_ALPHA: f64 = 10.0;

pub fn default_initial() -> State {
    State::new(0.1, 0.0, 0.0).expect("finite")
}

/// Config for `simulate`, `poincare` and `lyapunov`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryConfig {
    pub params: ChuaParams,
    #[serde(default = "default_initial")]
    pub initial: State,
    #[serde(default)]
    pub integrator: Option<IntegratorSettings>,
    #[serde(default)]
    pub max_crossings: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    pub params: ChuaParams,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NyquistConfig {
    pub params: ChuaParams,
    #[serde(default = "default_omega_max")]
    pub omega_max: f64,
    #[serde(default = "default_nyquist_points")]
    pub n_points: usize,
}

fn default_omega_max() -> f64 {
    100.0
}

fn default_nyquist_points() -> usize {
    1000
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DfConfig {
    pub g0: f64,
    pub i0: f64,
    #[serde(default = "default_xmax")]
    pub x_max: f64,
    #[serde(default = "default_df_points")]
    pub n_points: usize,
}

fn default_xmax() -> f64 {
    10.0
}

fn default_df_points() -> usize {
    201
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterceptsConfig {
    pub alpha: f64,
    pub beta: f64,
}

pub fn load<T: DeserializeOwned>(path: Option<&std::path::Path>) -> CliResult<Option<T>> {
    path.map(crate::output::read_json).transpose()
}

/// Parses a snake_case enum name the same way config files do.
pub fn parse_name<T: DeserializeOwned>(s: &str, what: &str) -> CliResult<T> {
    serde_json::from_value(serde_json::Value::String(s.trim().to_string()))
        .map_err(|_| usage(format!("unknown {what} '{s}'")))
}

pub fn params(base: Option<ChuaParams>, a: &ParamArgs) -> CliResult<ChuaParams> {
    let alpha = a.alpha.or(base.map(|p| p.alpha())).unwrap_or(DEFAULT_ALPHA);
    let beta = a.beta.or(base.map(|p| p.beta())).ok_or_else(|| usage("missing --beta"))?;
    let i0 = a.i0.or(base.map(|p| p.i0())).ok_or_else(|| usage("missing --i0"))?;
    let g0 = match (a.g0, a.g0_plus_i0) {
        (Some(g0), _) => g0,
        (None, Some(m)) => m - i0,
        (None, None) => base.map(|p| p.g0()).ok_or_else(|| usage("missing --g0 or --g0-plus-i0"))?,
    };
    Ok(ChuaParams::new(alpha, beta, g0, i0)?)
}

pub fn initial(base: State, a: &InitialArgs) -> CliResult<State> {
    Ok(State::new(a.x0.unwrap_or(base.x()), a.y0.unwrap_or(base.y()), a.z0.unwrap_or(base.z()))?)
}

pub fn integrator(base: IntegratorSettings, a: &IntegratorArgs) -> CliResult<IntegratorSettings> {
    let mut cfg = base;
    let kind = match a.method.as_deref() {
        None => match cfg.method {
            Method::Rk4 { .. } => "rk4",
            Method::Rk45 { .. } => "rk45",
        },
        Some(m) => m,
    };
    cfg.method = match (kind, cfg.method) {
        ("rk4", old) => {
            if a.rtol.is_some() || a.atol.is_some() {
                return Err(usage("--rtol/--atol apply to rk45 only"));
            }
            let keep = match old {
                Method::Rk4 { step } => step,
                _ => 1e-3,
            };
            Method::Rk4 { step: a.step.unwrap_or(keep) }
        }
        ("rk45", old) => {
            if a.step.is_some() {
                return Err(usage("--step applies to rk4 only"));
            }
            let (r, t) = match old {
                Method::Rk45 { rtol, atol } => (rtol, atol),
                _ => (1e-9, 1e-12),
            };
            Method::Rk45 { rtol: a.rtol.unwrap_or(r), atol: a.atol.unwrap_or(t) }
        }
        (other, _) => return Err(usage(format!("unknown method '{other}' (rk45 or rk4)"))),
    };
    if let Some(t) = a.transient {
        cfg.t_transient = t;
    }
    if let Some(t) = a.t_sample {
        cfg.t_sample = t;
    }
    if let Some(r) = a.radius {
        cfg.divergence_radius = r;
    }
    cfg.validate()?;
    Ok(cfg)
}
