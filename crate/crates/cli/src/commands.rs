use chua_core::circuitmap::{self, CircuitSpec};
use chua_core::dfan::{self, Omega};
use chua_core::diagnostics::{self, AttractorClass};
use chua_core::sim::{self, IntegratorSettings};
use chua_core::sweep::{self, Axis, Backend, BifurcationSpec, CellLabel, GridSpec, Parameter, SweepMode};
use chua_core::ChuaParams;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::config::{self, DfConfig, InterceptsConfig, NyquistConfig, ParamsConfig, TrajectoryConfig};
use crate::output::{usage, CliResult, Csv, Opt, Session};
use crate::svg::{Figure, PALETTE};
use crate::*;

pub fn run(cmd: &Command, s: &Session) -> CliResult {
    match cmd {
        Command::Simulate(a) => simulate(a, s),
        Command::Poincare(a) => poincare(a, s),
        Command::Lyapunov(a) => lyapunov(a, s),
        Command::Bifurcate(a) => bifurcate(a, s),
        Command::Map(a) => map(a, s),
        Command::Nyquist(a) => nyquist(a, s),
        Command::Df(a) => df(a, s),
        Command::Intercepts(a) => intercepts(a, s),
        Command::Cycles(a) => cycles(a, s),
        Command::Fromcircuit(a) => fromcircuit(a, s),
        Command::Regions(a) => regions(a, s),
    }
}

fn trajectory_config(a: &TrajectoryArgs, default: IntegratorSettings) -> CliResult<TrajectoryConfig> {
    let file: Option<TrajectoryConfig> = config::load(a.config.as_deref())?;
    let params = config::params(file.as_ref().map(|f| f.params), &a.params)?;
    let initial = config::initial(file.as_ref().map_or_else(config::default_initial, |f| f.initial), &a.initial)?;
    let base = file.as_ref().and_then(|f| f.integrator).unwrap_or(default);
    let integrator = config::integrator(base, &a.integrator)?;
    Ok(TrajectoryConfig {
        params,
        initial,
        integrator: Some(integrator),
        max_crossings: file.as_ref().and_then(|f| f.max_crossings),
        seed: file.and_then(|f| f.seed),
    })
}

fn simulate(a: &TrajectoryArgs, s: &Session) -> CliResult {
    let default = IntegratorSettings::default().with_times(0.0, 100.0);
    let cfg = trajectory_config(a, default)?;
    if s.dry_run {
        return s.dry_run("simulate", &cfg, &["simulate.csv", "simulate.svg"]);
    }
    let traj = sim::integrate(&cfg.initial, &cfg.params, cfg.integrator.as_ref().expect("resolved"))?;
    let mut csv = Csv::new(&["t", "x", "y", "z"]);
    for (t, st) in traj.times.iter().zip(&traj.states) {
        csv.row(&[t, &st.x(), &st.y(), &st.z()]);
    }
    s.write("simulate.csv", &csv.finish())?;
    if s.svg {
        let mut f = Figure::new("trajectory, x-y projection", "x", "y");
        f.line(traj.states.iter().map(|st| (st.x(), st.y())).collect(), PALETTE[0]);
        s.write("simulate.svg", &f.render())?;
    }
    Ok(())
}

fn poincare(a: &PoincareArgs, s: &Session) -> CliResult {
    let mut cfg = trajectory_config(&a.run, IntegratorSettings::default())?;
    cfg.max_crossings = a.max_crossings.or(cfg.max_crossings);
    if s.dry_run {
        return s.dry_run("poincare", &cfg, &["poincare.csv", "poincare.svg"]);
    }
    let set = sim::poincare_crossings(&cfg.initial, &cfg.params, cfg.integrator.as_ref().expect("resolved"), cfg.max_crossings)?;
    let mut csv = Csv::new(&["t", "x", "y", "z", "direction"]);
    for c in &set.crossings {
        csv.row(&[&c.t, &c.state.x(), &c.state.y(), &c.state.z(), &c.direction.name()]);
    }
    s.write("poincare.csv", &csv.finish())?;
    if set.truncated {
        eprintln!("note: {} crossings found before the time budget ran out", set.crossings.len());
    }
    if s.svg {
        let mut f = Figure::new("section y = 0", "x", "z");
        for (dir, color) in [(sim::Direction::NegToPos, PALETTE[0]), (sim::Direction::PosToNeg, PALETTE[1])] {
            let pts = set.crossings.iter().filter(|c| c.direction == dir).map(|c| (c.state.x(), c.state.z())).collect();
            f.dots(pts, color, 1.5).legend(dir.name(), color);
        }
        s.write("poincare.svg", &f.render())?;
    }
    Ok(())
}

fn lyapunov(a: &LyapunovArgs, s: &Session) -> CliResult {
    let mut cfg = trajectory_config(&a.run, IntegratorSettings::default())?;
    cfg.seed = a.seed.or(cfg.seed);
    if s.dry_run {
        return s.dry_run("lyapunov", &cfg, &["lyapunov.json"]);
    }
    let settings = cfg.integrator.expect("resolved");
    let result = match cfg.seed {
        None => diagnostics::lyapunov_spectrum(&cfg.initial, &cfg.params, &settings)?,
        Some(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut frame = [[0.0; 3]; 3];
            frame.iter_mut().flatten().for_each(|v| *v = rng.gen_range(-1.0..1.0));
            diagnostics::lyapunov_spectrum_with_frame(&cfg.initial, &cfg.params, &settings, Some(frame))?
        }
    };
    s.write_json("lyapunov.json", &result)?;
    Ok(())
}

fn bifurcate(a: &BifurcateArgs, s: &Session) -> CliResult {
    let file: Option<BifurcationSpec> = config::load(a.config.as_deref())?;
    let base = file.as_ref().map(|f| f.p_base);
    let swept = match &a.swept {
        Some(p) => config::parse_name(p, "parameter")?,
        None => file.as_ref().map_or(Parameter::G0, |f| f.swept),
    };
    let p_base = config::params(base, &fill_swept(&a.params, swept, a.lo))?;
    let mut spec = match file {
        Some(f) => BifurcationSpec { p_base, ..f },
        None => {
            let (Some(lo), Some(hi)) = (a.lo, a.hi) else {
                return Err(usage("bifurcate needs --lo and --hi (or --config)"));
            };
            BifurcationSpec::new(p_base, Parameter::G0, [lo, hi], a.n_points.unwrap_or(200))
        }
    };
    spec.swept = swept;
    spec.range = [a.lo.unwrap_or(spec.range[0]), a.hi.unwrap_or(spec.range[1])];
    spec.n_points = a.n_points.unwrap_or(spec.n_points);
    if let Some(m) = &a.modes {
        spec.directions = m.split(',').map(|x| config::parse_name::<SweepMode>(x, "mode")).collect::<CliResult<_>>()?;
    }
    spec.ic_cold = config::initial(spec.ic_cold, &a.initial)?;
    spec.integrator = config::integrator(spec.integrator, &a.integrator)?;
    spec.validate()?;
    if s.dry_run {
        return s.dry_run("bifurcate", &spec, &["bifurcate.csv", "bifurcate_origin.csv", "bifurcate.svg"]);
    }
    let diagram = sweep::bifurcation_diagram(&spec, s.workers)?;

    let mut csv = Csv::new(&["swept_value", "direction", "x_crossing", "branch", "class"]);
    for r in &diagram.records {
        if r.crossings.is_empty() {
            // Equilibria and escapes have no crossings; keep one row per point.
            let x = match r.class {
                AttractorClass::FixedPoint => Opt(r.final_state.map(|st| st.x())),
                _ => Opt(None),
            };
            csv.row(&[&r.swept_value, &"none", &x, &r.branch, &r.class]);
        }
        for c in &r.crossings {
            csv.row(&[&r.swept_value, &c.direction.name(), &c.x, &r.branch, &r.class]);
        }
    }
    s.write("bifurcate.csv", &csv.finish())?;
    let mut origin = Csv::new(&["swept_value", "stable", "max_real"]);
    for o in &diagram.origin {
        origin.row(&[&o.swept_value, &o.stable, &o.max_real]);
    }
    s.write("bifurcate_origin.csv", &origin.finish())?;

    if s.svg {
        let mut f = Figure::new("bifurcation diagram", spec.swept.name(), "x at y = 0");
        for (b, mode) in spec.directions.iter().enumerate() {
            let color = PALETTE[b % PALETTE.len()];
            let pts = diagram
                .pass(b)
                .flat_map(|r| r.crossings.iter().map(move |c| (r.swept_value, c.x)))
                .collect();
            f.dots(pts, color, 0.6).legend(mode.name(), color);
        }
        s.write("bifurcate.svg", &f.render())?;
    }
    Ok(())
}

/// A swept parameter needs no base value of its own: take it from the
/// start of the range when the flag is absent.
fn fill_swept(a: &ParamArgs, swept: Parameter, lo: Option<f64>) -> ParamArgs {
    let mut a = a.clone();
    let given = |v: Option<f64>| v.or(lo);
    match swept {
        Parameter::Alpha => a.alpha = a.alpha.or(lo),
        Parameter::Beta => a.beta = given(a.beta),
        Parameter::I0 => a.i0 = given(a.i0),
        Parameter::G0 if a.g0_plus_i0.is_none() => a.g0 = given(a.g0),
        Parameter::G0PlusI0 if a.g0.is_none() => a.g0_plus_i0 = given(a.g0_plus_i0),
        _ => {}
    }
    a
}

fn map(a: &MapArgs, s: &Session) -> CliResult {
    let file: Option<GridSpec> = config::load(a.config.as_deref())?;
    let mut pa = a.params.clone();
    for (param, lo) in [(&a.x_param, a.x_lo), (&a.y_param, a.y_lo)] {
        if let Some(name) = param {
            pa = fill_swept(&pa, config::parse_name(name, "parameter")?, lo);
        }
    }
    let p_base = config::params(file.as_ref().map(|f| f.p_base), &pa)?;
    let axis = |base: Option<Axis>, param: &Option<String>, lo: Option<f64>, hi: Option<f64>, n: Option<usize>, name: &str| -> CliResult<Axis> {
        let param = match param {
            Some(p) => config::parse_name(p, "parameter")?,
            None => base.map(|b| b.param).ok_or_else(|| usage(format!("missing --{name}-param")))?,
        };
        let lo = lo.or(base.map(|b| b.range[0])).ok_or_else(|| usage(format!("missing --{name}-lo")))?;
        let hi = hi.or(base.map(|b| b.range[1])).ok_or_else(|| usage(format!("missing --{name}-hi")))?;
        let n = n.or(base.map(|b| b.n)).unwrap_or(50);
        Ok(Axis::new(param, [lo, hi], n))
    };
    let x = axis(file.as_ref().map(|f| f.x), &a.x_param, a.x_lo, a.x_hi, a.nx, "x")?;
    let y = axis(file.as_ref().map(|f| f.y), &a.y_param, a.y_lo, a.y_hi, a.ny, "y")?;
    let backend = match &a.backend {
        Some(b) => config::parse_name(b, "backend")?,
        None => file.as_ref().map_or(Backend::Analytic, |f| f.backend),
    };
    let mut spec = match file {
        Some(f) => GridSpec { p_base, x, y, backend, ..f },
        None => GridSpec::new(p_base, x, y, backend),
    };
    spec.integrator = config::integrator(spec.integrator, &a.integrator)?;
    spec.validate()?;
    if s.dry_run {
        return s.dry_run("map", &spec, &["map.csv", "map_probes.csv", "map.svg"]);
    }
    let grid = sweep::parameter_plane_map(&spec, s.workers)?;

    let mut csv = Csv::new(&[spec.x.param.name(), spec.y.param.name(), "label"]);
    for c in &grid.cells {
        csv.row(&[&c.x, &c.y, &c.label.summary()]);
    }
    s.write("map.csv", &csv.finish())?;
    if backend == Backend::Numeric {
        let mut probes = Csv::new(&[spec.x.param.name(), spec.y.param.name(), "probe", "x0", "y0", "z0", "label", "error"]);
        for c in &grid.cells {
            if let CellLabel::Numeric(list) = &c.label {
                for (i, p) in list.iter().enumerate() {
                    let err = p.error.clone().unwrap_or_default().replace(',', ";");
                    probes.row(&[&c.x, &c.y, &i, &p.ic.x(), &p.ic.y(), &p.ic.z(), &p.label(), &err]);
                }
            }
        }
        s.write("map_probes.csv", &probes.finish())?;
    }

    if s.svg {
        let xs = spec.x.values();
        let ys = spec.y.values();
        let half = |v: &[f64], i: usize| -> (f64, f64) {
            if v.len() < 2 {
                return (v[i] - 0.5, v[i] + 0.5);
            }
            let d = (v[1] - v[0]) / 2.0;
            (v[i] - d, v[i] + d)
        };
        let mut keys: Vec<String> = Vec::new();
        let mut rects = Vec::with_capacity(grid.cells.len());
        for (k, c) in grid.cells.iter().enumerate() {
            let label = c.label.summary();
            let idx = keys.iter().position(|l| *l == label).unwrap_or_else(|| {
                keys.push(label);
                keys.len() - 1
            });
            let (row, col) = (k / xs.len(), k % xs.len());
            let (x0, x1) = half(&xs, col);
            let (y0, y1) = half(&ys, row);
            rects.push((x0, y0, x1, y1, PALETTE[idx % PALETTE.len()]));
        }
        let mut f = Figure::new("parameter plane", spec.x.param.name(), spec.y.param.name());
        f.cells(rects);
        for (i, k) in keys.iter().enumerate() {
            f.legend(k, PALETTE[i % PALETTE.len()]);
        }
        s.write("map.svg", &f.render())?;
    }
    Ok(())
}

fn nyquist(a: &NyquistArgs, s: &Session) -> CliResult {
    let file: Option<NyquistConfig> = config::load(a.config.as_deref())?;
    let params = config::params(file.as_ref().map(|f| f.params), &a.params)?;
    let cfg = NyquistConfig {
        params,
        omega_max: a.omega_max.or(file.as_ref().map(|f| f.omega_max)).unwrap_or(100.0),
        n_points: a.n_points.or(file.as_ref().map(|f| f.n_points)).unwrap_or(1000),
    };
    if !(cfg.omega_max > 1e-3 && cfg.omega_max.is_finite()) || cfg.n_points < 2 {
        return Err(usage("need --omega-max > 1e-3 and --n >= 2"));
    }
    if s.dry_run {
        return s.dry_run("nyquist", &cfg, &["nyquist.csv", "nyquist.svg"]);
    }
    // Log-spaced positive frequencies, mirrored, with omega = 0 in the middle.
    let lo: f64 = 1e-3;
    let pos: Vec<f64> = (0..cfg.n_points)
        .map(|k| lo * (cfg.omega_max / lo).powf(k as f64 / (cfg.n_points - 1) as f64))
        .collect();
    let omegas: Vec<f64> = pos.iter().rev().map(|w| -w).chain(std::iter::once(0.0)).chain(pos.iter().copied()).collect();
    let mut csv = Csv::new(&["omega", "re", "im"]);
    let mut pts = Vec::with_capacity(omegas.len());
    for w in &omegas {
        let g = dfan::transfer_function(*w, &params)?;
        csv.row(&[w, &g.re, &g.im]);
        pts.push((g.re, g.im));
    }
    s.write("nyquist.csv", &csv.finish())?;
    if s.svg {
        let set = dfan::interception_points(&params);
        let marks = set.points.iter().filter(|p| p.exists).map(|p| (p.p, 0.0)).collect();
        let mut f = Figure::new("frequency response G(jw)", "Re", "Im");
        f.line(pts, PALETTE[0]).dots(marks, PALETTE[1], 3.0).legend("G(jw)", PALETTE[0]).legend("p_i", PALETTE[1]);
        s.write("nyquist.svg", &f.render())?;
    }
    Ok(())
}

fn df(a: &DfArgs, s: &Session) -> CliResult {
    let file: Option<DfConfig> = config::load(a.config.as_deref())?;
    let g0 = a.g0.or(file.as_ref().map(|f| f.g0)).ok_or_else(|| usage("missing --g0"))?;
    let i0 = a.i0.or(file.as_ref().map(|f| f.i0)).ok_or_else(|| usage("missing --i0"))?;
    let cfg = DfConfig {
        g0,
        i0,
        x_max: a.xmax.or(file.as_ref().map(|f| f.x_max)).unwrap_or(10.0),
        n_points: a.n_points.or(file.as_ref().map(|f| f.n_points)).unwrap_or(201),
    };
    if !(cfg.x_max > 0.0 && cfg.x_max.is_finite()) || cfg.n_points < 2 {
        return Err(usage("need --xmax > 0 and --n >= 2"));
    }
    // N(X) does not involve alpha or beta; any valid pair will do.
    let p = ChuaParams::new(config::DEFAULT_ALPHA, 13.3, g0, i0)?;
    if s.dry_run {
        return s.dry_run("df", &cfg, &["df.csv", "df.svg"]);
    }
    let mut csv = Csv::new(&["amplitude", "n_series", "n_bessel", "locus"]);
    let mut curve = Vec::with_capacity(cfg.n_points);
    for x in sweep::linspace(0.0, cfg.x_max, cfg.n_points) {
        let n = dfan::describing_function(x, &p)?;
        let nb = dfan::describing_function_bessel(x, &p)?;
        let locus = dfan::locus_inverse(x, &p).ok();
        csv.row(&[&x, &n, &nb, &Opt(locus)]);
        curve.push((x, n));
    }
    s.write("df.csv", &csv.finish())?;
    if s.svg {
        let mut f = Figure::new("describing function", "X", "N(X)");
        f.line(curve, PALETTE[0]);
        s.write("df.svg", &f.render())?;
    }
    Ok(())
}

fn intercepts(a: &InterceptsArgs, s: &Session) -> CliResult {
    let file: Option<InterceptsConfig> = config::load(a.config.as_deref())?;
    let cfg = InterceptsConfig {
        alpha: a.alpha.or(file.as_ref().map(|f| f.alpha)).unwrap_or(config::DEFAULT_ALPHA),
        beta: a.beta.or(file.as_ref().map(|f| f.beta)).ok_or_else(|| usage("missing --beta"))?,
    };
    let p = ChuaParams::new(cfg.alpha, cfg.beta, 0.0, 0.0)?;
    if s.dry_run {
        return s.dry_run("intercepts", &cfg, &["intercepts.json"]);
    }
    let set = dfan::interception_points(&p);
    let points: Vec<_> = set
        .points
        .iter()
        .enumerate()
        .map(|(i, pt)| {
            let omega = match pt.omega {
                Omega::Infinite => json!("inf"),
                Omega::Finite(w) => json!(w),
            };
            json!({ "index": i, "omega": omega, "p": pt.p, "exists": pt.exists })
        })
        .collect();
    let doc = json!({
        "alpha": cfg.alpha,
        "beta": cfg.beta,
        "in_main_range": p.in_main_range(),
        "omega2": set.omega2(),
        "omega3": set.omega3(),
        "p2": set.p2(),
        "p3": set.p3(),
        "inv_p2": set.inv_p2(),
        "inv_p3": set.inv_p3(),
        "points": points,
    });
    s.write_json("intercepts.json", &doc)?;
    Ok(())
}

fn params_only(a: &ParamsOnlyArgs) -> CliResult<ChuaParams> {
    let file: Option<ParamsConfig> = config::load(a.config.as_deref())?;
    config::params(file.map(|f| f.params), &a.params)
}

fn cycles(a: &ParamsOnlyArgs, s: &Session) -> CliResult {
    let p = params_only(a)?;
    if s.dry_run {
        return s.dry_run("cycles", &ParamsConfig { params: p }, &["cycles.json"]);
    }
    let doc = json!({ "params": p, "cycles": dfan::predicted_limit_cycles(&p) });
    s.write_json("cycles.json", &doc)?;
    Ok(())
}

fn regions(a: &ParamsOnlyArgs, s: &Session) -> CliResult {
    let p = params_only(a)?;
    if s.dry_run {
        return s.dry_run("regions", &ParamsConfig { params: p }, &["regions.json"]);
    }
    let set = dfan::interception_points(&p);
    let doc = json!({
        "params": p,
        "g0_plus_i0": p.slope_at_origin(),
        "label": dfan::classify_region(&p),
        "boundaries": { "minus_one": -1.0, "inv_p2": set.inv_p2(), "inv_p3": set.inv_p3(), "zero": 0.0 },
    });
    s.write_json("regions.json", &doc)?;
    Ok(())
}

fn fromcircuit(a: &FromCircuitArgs, s: &Session) -> CliResult {
    let c: CircuitSpec = crate::output::read_json(&a.config)?;
    c.validate()?;
    if s.dry_run {
        return s.dry_run("fromcircuit", &c, &["fromcircuit.json"]);
    }
    let m = circuitmap::dimensionless_from_circuit(&c)?;
    let f = circuitmap::predicted_frequencies_hz(&m.params, m.tau)?;
    let doc = json!({ "map": m, "frequencies_hz": f });
    s.write_json("fromcircuit.json", &doc)?;
    Ok(())
}
