//! Bifurcation diagrams by continuation and parameter-plane maps.
//!
//! Work is split into contiguous blocks, one per worker, and results are
//! reassembled in index order, so the output never depends on the worker
//! count.

use serde::{Deserialize, Serialize};

use crate::dfan::{self, RegionLabel};
use crate::diagnostics::{self, AttractorClass, ClassifyThresholds};
use crate::error::{ChuaError, Result};
use crate::model::{self, ChuaParams, State};
use crate::sim::{Direction, IntegratorSettings};

/// Offset added to `x` of an inherited state before the next point.
pub const INHERIT_KICK: f64 = 1e-6;

/// A scalar that a sweep or map axis can vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parameter {
    Alpha,
    Beta,
    #[default]
    G0,
    I0,
    /// `g0 + I0` with `I0` held fixed.
    G0PlusI0,
}

impl Parameter {
    pub fn name(&self) -> &'static str {
        match self {
            Parameter::Alpha => "alpha",
            Parameter::Beta => "beta",
            Parameter::G0 => "g0",
            Parameter::I0 => "i0",
            Parameter::G0PlusI0 => "g0_plus_i0",
        }
    }

    pub fn get(&self, p: &ChuaParams) -> f64 {
        match self {
            Parameter::Alpha => p.alpha(),
            Parameter::Beta => p.beta(),
            Parameter::G0 => p.g0(),
            Parameter::I0 => p.i0(),
            Parameter::G0PlusI0 => p.slope_at_origin(),
        }
    }

    pub fn set(&self, p: ChuaParams, v: f64) -> Result<ChuaParams> {
        match self {
            Parameter::Alpha => p.with_alpha(v),
            Parameter::Beta => p.with_beta(v),
            Parameter::G0 => p.with_g0(v),
            Parameter::I0 => p.with_i0(v),
            Parameter::G0PlusI0 => p.with_g0(v - p.i0()),
        }
    }
}

/// `n` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| if i == n - 1 { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 }).collect(),
    }
}

/// Worker count with `0` meaning all available cores.
pub fn resolve_workers(workers: usize) -> usize {
    if workers > 0 {
        workers
    } else {
        std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
    }
}

/// Maps `f` over `items` on up to `workers` threads, one contiguous block each.
pub(crate) fn block_map<T: Sync, R: Send>(items: &[T], workers: usize, f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let workers = resolve_workers(workers).min(items.len()).max(1);
    if workers == 1 {
        return items.iter().map(f).collect();
    }
    let block = items.len().div_ceil(workers);
    let f = &f;
    std::thread::scope(|s| {
        let handles: Vec<_> =
            items.chunks(block).map(|chunk| s.spawn(move || chunk.iter().map(f).collect::<Vec<R>>())).collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().unwrap_or_else(|e| std::panic::resume_unwind(e)))
            .collect()
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    /// Increasing swept value, each point starting from the previous end state.
    ForwardInherit,
    /// Decreasing swept value, each point starting from the previous end state.
    BackwardInherit,
    /// Every point starts from `ic_cold`.
    ColdStart,
}

impl SweepMode {
    pub fn name(&self) -> &'static str {
        match self {
            SweepMode::ForwardInherit => "forward",
            SweepMode::BackwardInherit => "backward",
            SweepMode::ColdStart => "cold",
        }
    }
}

fn default_modes() -> Vec<SweepMode> {
    vec![SweepMode::ForwardInherit, SweepMode::BackwardInherit]
}

fn default_ic() -> State {
    State { x: 0.1, y: 0.0, z: 0.0 }
}

fn default_max_recorded() -> usize {
    256
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BifurcationSpec {
    pub p_base: ChuaParams,
    #[serde(default)]
    pub swept: Parameter,
    pub range: [f64; 2],
    pub n_points: usize,
    #[serde(default = "default_modes")]
    pub directions: Vec<SweepMode>,
    #[serde(default = "default_ic")]
    pub ic_cold: State,
    #[serde(default)]
    pub integrator: IntegratorSettings,
    #[serde(default)]
    pub thresholds: ClassifyThresholds,
    /// Only the last this-many crossings of each point are kept.
    #[serde(default = "default_max_recorded")]
    pub max_recorded: usize,
}

impl BifurcationSpec {
    pub fn new(p_base: ChuaParams, swept: Parameter, range: [f64; 2], n_points: usize) -> Self {
        Self {
            p_base,
            swept,
            range,
            n_points,
            directions: default_modes(),
            ic_cold: default_ic(),
            integrator: IntegratorSettings::default(),
            thresholds: ClassifyThresholds::default(),
            max_recorded: default_max_recorded(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let [lo, hi] = self.range;
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(ChuaError::InvalidParameter(format!("range must satisfy lo < hi, got [{lo}, {hi}]")));
        }
        if self.n_points < 2 {
            return Err(ChuaError::InvalidParameter("n_points must be >= 2".into()));
        }
        if self.directions.is_empty() {
            return Err(ChuaError::InvalidParameter("directions must not be empty".into()));
        }
        self.integrator.validate()?;
        for v in [lo, hi] {
            self.swept.set(self.p_base, v)?;
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        linspace(self.range[0], self.range[1], self.n_points)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionPoint {
    pub x: f64,
    pub direction: Direction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationRecord {
    pub swept_value: f64,
    pub mode: SweepMode,
    /// Position of the producing pass in `BifurcationSpec::directions`.
    pub branch: usize,
    pub crossings: Vec<SectionPoint>,
    pub class: AttractorClass,
    pub lyapunov_max: Option<f64>,
    pub final_state: Option<State>,
    /// Numerical failure other than divergence.
    pub error: Option<String>,
}

/// Linear stability of the origin at one swept value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OriginStability {
    pub swept_value: f64,
    pub stable: bool,
    pub max_real: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationDiagram {
    pub records: Vec<BifurcationRecord>,
    pub origin: Vec<OriginStability>,
}

impl BifurcationDiagram {
    pub fn pass(&self, branch: usize) -> impl Iterator<Item = &BifurcationRecord> {
        self.records.iter().filter(move |r| r.branch == branch)
    }
}

fn analyze_point(spec: &BifurcationSpec, v: f64, s0: &State, mode: SweepMode, branch: usize) -> BifurcationRecord {
    let mut rec = BifurcationRecord {
        swept_value: v,
        mode,
        branch,
        crossings: Vec::new(),
        class: AttractorClass::Undecided,
        lyapunov_max: None,
        final_state: None,
        error: None,
    };
    let p = match spec.swept.set(spec.p_base, v) {
        Ok(p) => p,
        Err(e) => {
            rec.error = Some(e.to_string());
            return rec;
        }
    };
    match diagnostics::analyze_run(s0, &p, &spec.integrator, None) {
        Ok(run) => {
            rec.class = diagnostics::classify_attractor(&run, &p, &spec.thresholds);
            let skip = run.crossings.len().saturating_sub(spec.max_recorded);
            rec.crossings = run.crossings[skip..]
                .iter()
                .map(|c| SectionPoint { x: c.state.x(), direction: c.direction })
                .collect();
            rec.lyapunov_max = run.lyapunov.map(|l| l.max());
            rec.final_state = run.final_state;
        }
        Err(e) => rec.error = Some(e.to_string()),
    }
    rec
}

enum Job {
    Pass { mode: SweepMode, branch: usize },
    Point { index: usize, branch: usize },
}

/// Runs every pass in `spec.directions`.
///
/// Inheriting passes are sequential along the parameter and run concurrently
/// with each other; cold-start points are independent. A point whose run
/// diverges is labelled [`AttractorClass::Diverged`] and the next inheriting
/// point restarts from `ic_cold`. `workers = 0` uses all cores.
pub fn bifurcation_diagram(spec: &BifurcationSpec, workers: usize) -> Result<BifurcationDiagram> {
    spec.validate()?;
    let values = spec.values();
    let mut jobs = Vec::new();
    for (branch, mode) in spec.directions.iter().enumerate() {
        match mode {
            SweepMode::ColdStart => jobs.extend((0..values.len()).map(|index| Job::Point { index, branch })),
            _ => jobs.push(Job::Pass { mode: *mode, branch }),
        }
    }
    let chunks = block_map(&jobs, workers, |job| match *job {
        Job::Point { index, branch } => {
            vec![analyze_point(spec, values[index], &spec.ic_cold, SweepMode::ColdStart, branch)]
        }
        Job::Pass { mode, branch } => {
            let order: Vec<f64> = match mode {
                SweepMode::BackwardInherit => values.iter().rev().copied().collect(),
                _ => values.clone(),
            };
            let mut s0 = spec.ic_cold;
            let mut out = Vec::with_capacity(order.len());
            for v in order {
                let rec = analyze_point(spec, v, &s0, mode, branch);
                s0 = match rec.final_state {
                    Some(s) if rec.class != AttractorClass::Diverged => {
                        State::new(s.x() + INHERIT_KICK, s.y(), s.z()).unwrap_or(spec.ic_cold)
                    }
                    _ => spec.ic_cold,
                };
                out.push(rec);
            }
            out
        }
    });
    let records = chunks.into_iter().flatten().collect();

    let mut origin = Vec::with_capacity(values.len());
    for v in &values {
        let p = spec.swept.set(spec.p_base, *v)?;
        let spec = model::equilibrium_eigenvalues(&State::ORIGIN, &p)?;
        origin.push(OriginStability { swept_value: *v, stable: spec.stable, max_real: spec.max_real() });
    }
    Ok(BifurcationDiagram { records, origin })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub param: Parameter,
    pub range: [f64; 2],
    pub n: usize,
}

impl Axis {
    pub fn new(param: Parameter, range: [f64; 2], n: usize) -> Self {
        Self { param, range, n }
    }

    pub fn values(&self) -> Vec<f64> {
        linspace(self.range[0], self.range[1], self.n)
    }

    fn validate(&self) -> Result<()> {
        let [lo, hi] = self.range;
        let ok = lo.is_finite() && hi.is_finite() && self.n >= 1 && (lo < hi || (self.n == 1 && lo <= hi));
        if !ok {
            return Err(ChuaError::InvalidParameter(format!(
                "axis {} needs n >= 1 and lo < hi (lo <= hi when n = 1)",
                self.param.name()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    Analytic,
    Numeric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub p_base: ChuaParams,
    /// Columns.
    pub x: Axis,
    /// Rows.
    pub y: Axis,
    pub backend: Backend,
    #[serde(default)]
    pub integrator: IntegratorSettings,
    #[serde(default)]
    pub thresholds: ClassifyThresholds,
    /// Initial conditions for the numeric backend; `None` uses
    /// [`default_probe_states`] per cell.
    #[serde(default)]
    pub initial_conditions: Option<Vec<State>>,
}

impl GridSpec {
    pub fn new(p_base: ChuaParams, x: Axis, y: Axis, backend: Backend) -> Self {
        Self {
            p_base,
            x,
            y,
            backend,
            integrator: IntegratorSettings::default(),
            thresholds: ClassifyThresholds::default(),
            initial_conditions: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.x.validate()?;
        self.y.validate()?;
        if self.x.param == self.y.param {
            return Err(ChuaError::InvalidParameter("grid axes must differ".into()));
        }
        if self.backend == Backend::Numeric {
            self.integrator.validate()?;
            if self.initial_conditions.as_ref().is_some_and(|v| v.is_empty()) {
                return Err(ChuaError::InvalidParameter("initial_conditions must not be empty".into()));
            }
        }
        Ok(())
    }

    /// Parameters of one cell. `I0` is applied before `g0 + I0` so the
    /// latter is honored exactly.
    pub fn params_at(&self, xv: f64, yv: f64) -> Result<ChuaParams> {
        let mut axes = [(self.x.param, xv), (self.y.param, yv)];
        axes.sort_by_key(|(a, _)| *a == Parameter::G0PlusI0);
        axes.iter().try_fold(self.p_base, |p, (a, v)| a.set(p, *v))
    }
}

/// `(0.1, 0, 0)`, its mirror, and `P1 + (0.01, 0, 0)` with its mirror when
/// the nonzero equilibria exist.
pub fn default_probe_states(p: &ChuaParams) -> Vec<State> {
    let near = State { x: 0.1, y: 0.0, z: 0.0 };
    let mut out = vec![near, -near];
    if let Some(e) = model::equilibria(p).get(1) {
        let s = State { x: e.x() + 0.01, ..*e };
        out.push(s);
        out.push(-s);
    }
    out
}

/// Outcome of one initial condition in a numeric cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub ic: State,
    pub class: Option<AttractorClass>,
    /// Index into [`model::equilibria`] when the run settled on one.
    pub equilibrium: Option<usize>,
    pub error: Option<String>,
}

impl Probe {
    /// Short label: `origin`, `pm_p1`, an attractor class name, or `error`.
    pub fn label(&self) -> String {
        match (self.class, self.equilibrium) {
            (Some(AttractorClass::FixedPoint), Some(0)) => "origin".into(),
            (Some(AttractorClass::FixedPoint), Some(_)) => "pm_p1".into(),
            (Some(c), _) => c.to_string(),
            (None, _) => "error".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum CellLabel {
    Region(RegionLabel),
    Numeric(Vec<Probe>),
    /// The cell's parameters could not be built.
    Failed(String),
}

impl CellLabel {
    /// Single string key: region name, or the sorted distinct probe labels
    /// joined by `+`.
    pub fn summary(&self) -> String {
        match self {
            CellLabel::Region(r) => r.to_string(),
            CellLabel::Numeric(probes) => {
                let mut names: Vec<String> = probes.iter().map(Probe::label).collect();
                names.sort();
                names.dedup();
                names.join("+")
            }
            CellLabel::Failed(_) => "error".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cell {
    pub x: f64,
    pub y: f64,
    pub label: CellLabel,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationGrid {
    pub x: Axis,
    pub y: Axis,
    pub backend: Backend,
    /// Row-major: `cells[row * x.n + col]`, row index along `y`.
    pub cells: Vec<Cell>,
}

impl ClassificationGrid {
    pub fn at(&self, row: usize, col: usize) -> &Cell {
        &self.cells[row * self.x.n + col]
    }
}

fn numeric_cell(spec: &GridSpec, p: &ChuaParams) -> Vec<Probe> {
    let ics = spec.initial_conditions.clone().unwrap_or_else(|| default_probe_states(p));
    ics.into_iter()
        .map(|ic| match diagnostics::analyze_run(&ic, p, &spec.integrator, None) {
            Ok(run) => {
                let class = diagnostics::classify_attractor(&run, p, &spec.thresholds);
                let equilibrium = match class {
                    AttractorClass::FixedPoint => run.final_state.and_then(|s| {
                        model::equilibria(p)
                            .iter()
                            .enumerate()
                            .min_by(|a, b| a.1.distance(&s).total_cmp(&b.1.distance(&s)))
                            .map(|(i, _)| i)
                    }),
                    _ => None,
                };
                Probe { ic, class: Some(class), equilibrium, error: None }
            }
            Err(e) => Probe { ic, class: None, equilibrium: None, error: Some(e.to_string()) },
        })
        .collect()
}

/// Labels every cell of the grid. Rows are split into contiguous blocks,
/// one per worker; `workers = 0` uses all cores.
pub fn parameter_plane_map(spec: &GridSpec, workers: usize) -> Result<ClassificationGrid> {
    spec.validate()?;
    let xs = spec.x.values();
    let rows = spec.y.values();
    let blocks = block_map(&rows, workers, |&yv| {
        xs.iter()
            .map(|&xv| {
                let label = match spec.params_at(xv, yv) {
                    Err(e) => CellLabel::Failed(e.to_string()),
                    Ok(p) => match spec.backend {
                        Backend::Analytic => CellLabel::Region(dfan::classify_region(&p)),
                        Backend::Numeric => CellLabel::Numeric(numeric_cell(spec, &p)),
                    },
                };
                Cell { x: xv, y: yv, label }
            })
            .collect::<Vec<_>>()
    });
    Ok(ClassificationGrid { x: spec.x, y: spec.y, backend: spec.backend, cells: blocks.into_iter().flatten().collect() })
}
