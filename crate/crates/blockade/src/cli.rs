//! Command-line front end: scenario configuration, dataset assembly and
//! deterministic serialization.
//!
//! Datasets are plot-ready tables. CSV output uses '#'-prefixed metadata
//! lines, ',' separators, '.' decimals and 17 significant digits, so a
//! fixed configuration always produces byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use rayon::prelude::*;
use serde::Serialize;

use crate::correlations::{g2, g2_zero_analytic};
use crate::entanglement::{concurrence, entanglement_window, steady_concurrence_analytic};
use crate::evolution::{evolve, IntegratorConfig};
use crate::linalg::frobenius_distance;
use crate::liouville::stationarity_defect;
use crate::model::{pure_state, Basis, DensityMatrix, DetectorGeometry, SystemParams};
use crate::observables::{
    blockade_ratio_analytic, blockade_ratio_from_state, dicke_populations,
    double_excitation_probability, excitation_probability,
};
use crate::steady::{steady_state_analytic, steady_state_numeric};
use crate::{Error, Result};

/// The three drive/shift pairs used by the bundled figures.
pub const FIGURE_PRESETS: [(&str, f64, f64); 3] =
    [("a", 5.0, 5.0), ("b", 5.0, 30.0), ("c", 15.0, 30.0)];

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SweepQuantity {
    /// steady-state P_ee / P_e^2
    Ratio,
    /// steady-state concurrence
    Concurrence,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    /// excitation probabilities along the transient, presets a, b, c
    Fig1,
    /// concurrence along the transient, presets a, b, c
    Fig2,
    /// ratio against drive for integer shifts 0..10, with crossings
    Fig3,
    /// steady concurrence against drive for integer shifts 1..10
    Fig4,
    /// photon-photon correlation against delay, presets a, b, c
    Fig5,
}

/// Everything a run needs, merged from defaults, an optional preset file
/// and command-line flags, in that order.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub omega: f64,
    pub delta: f64,
    pub gamma_s_frac: f64,
    pub initial_state: String,
    pub t_end: f64,
    pub samples: usize,
    pub phi1: f64,
    pub phi2: f64,
    pub tau_max: f64,
    pub tau_points: usize,
    pub quantity: SweepQuantity,
    pub omega_min: f64,
    pub omega_max: f64,
    pub delta_min: u32,
    pub delta_max: u32,
    pub format: OutputFormat,
    pub jobs: Option<usize>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            omega: 5.0,
            delta: 30.0,
            gamma_s_frac: 1.0,
            initial_state: "gg".into(),
            t_end: 10.0,
            samples: 400,
            phi1: 0.0,
            phi2: 0.0,
            tau_max: 10.0,
            tau_points: 200,
            quantity: SweepQuantity::Ratio,
            omega_min: 0.1,
            omega_max: 10.0,
            delta_min: 0,
            delta_max: 10,
            format: OutputFormat::Csv,
            jobs: None,
        }
    }
}

impl ScenarioConfig {
    pub fn params(&self) -> Result<SystemParams> {
        SystemParams::dimensionless(self.omega, self.delta, self.gamma_s_frac)
    }

    pub fn geometry(&self) -> Result<DetectorGeometry> {
        DetectorGeometry::new(self.phi1, self.phi2)
    }

    fn validate(&self) -> Result<()> {
        self.params()?;
        self.geometry()?;
        if self.samples < 2 {
            return Err(Error::InvalidConfig("samples must be at least 2".into()));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidConfig("t_end must be positive".into()));
        }
        if self.tau_points < 2 {
            return Err(Error::InvalidConfig("tau_points must be at least 2".into()));
        }
        if !(self.tau_max > 0.0 && self.tau_max.is_finite()) {
            return Err(Error::InvalidConfig("tau_max must be positive".into()));
        }
        if !(self.omega_min > 0.0 && self.omega_min.is_finite()) {
            return Err(Error::InvalidConfig("omega_min must be positive".into()));
        }
        if !self.omega_max.is_finite() || self.omega_max <= self.omega_min {
            return Err(Error::InvalidConfig("omega_max must exceed omega_min".into()));
        }
        if self.delta_max < self.delta_min {
            return Err(Error::InvalidConfig("delta_max must be at least delta_min".into()));
        }
        Ok(())
    }

    /// Assigns one configuration key from its text form. Keys are the flag
    /// names; dashes and underscores are interchangeable.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> std::result::Result<T, String>
        where
            T::Err: std::fmt::Display,
        {
            value.parse().map_err(|e| format!("bad value `{value}` for {key}: {e}"))
        }
        match key.to_ascii_lowercase().replace('-', "_").as_str() {
            "omega" => self.omega = num("omega", value)?,
            "delta" => self.delta = num("delta", value)?,
            "gamma_s_frac" => self.gamma_s_frac = num("gamma_s_frac", value)?,
            "initial_state" => self.initial_state = value.to_string(),
            "t_end" => self.t_end = num("t_end", value)?,
            "samples" => self.samples = num("samples", value)?,
            "phi1" => self.phi1 = num("phi1", value)?,
            "phi2" => self.phi2 = num("phi2", value)?,
            "tau_max" => self.tau_max = num("tau_max", value)?,
            "tau_points" => self.tau_points = num("tau_points", value)?,
            "quantity" => {
                self.quantity = match value {
                    "ratio" => SweepQuantity::Ratio,
                    "concurrence" => SweepQuantity::Concurrence,
                    other => return Err(format!("unknown quantity `{other}`")),
                }
            }
            "omega_min" => self.omega_min = num("omega_min", value)?,
            "omega_max" => self.omega_max = num("omega_max", value)?,
            "delta_min" => self.delta_min = num("delta_min", value)?,
            "delta_max" => self.delta_max = num("delta_max", value)?,
            "format" => {
                self.format = match value {
                    "csv" => OutputFormat::Csv,
                    "json" => OutputFormat::Json,
                    other => return Err(format!("unknown format `{other}`")),
                }
            }
            "jobs" => self.jobs = Some(num("jobs", value)?),
            unknown => return Err(format!("unknown config key `{unknown}`")),
        }
        Ok(())
    }
}

/// Applies a flat `key = value` preset file. '#' lines and blank lines are
/// ignored. Flags are applied after this, so they win.
pub fn apply_config_file(cfg: &mut ScenarioConfig, path: &Path) -> Result<()> {
    let text = fs::read_to_string(path)
        .map_err(|source| Error::Io { path: path.display().to_string(), source })?;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::InvalidConfig(format!("{}:{}: expected key = value", path.display(), idx + 1))
        })?;
        cfg.set(key.trim(), value.trim()).map_err(|msg| {
            Error::InvalidConfig(format!("{}:{}: {msg}", path.display(), idx + 1))
        })?;
    }
    Ok(())
}

/// One table value: almost always a number, text only for marker columns.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

/// Fixed 17-significant-digit form used everywhere a float is serialized.
pub fn format_float(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

/// A metadata block plus a rectangular table.
#[derive(Clone, Debug, Default)]
pub struct Dataset {
    meta: Vec<(String, String)>,
    columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl Dataset {
    pub fn new<S: Into<String>>(columns: Vec<S>) -> Self {
        Self {
            meta: Vec::new(),
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_meta(&mut self, key: &str, value: impl Into<String>) {
        self.meta.push((key.to_string(), value.into()));
    }

    pub fn push_meta_float(&mut self, key: &str, value: f64) {
        self.push_meta(key, format_float(value));
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn meta(&self) -> &[(String, String)] {
        &self.meta
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric values of one column; `None` if the name is unknown or any
    /// cell in it is text.
    pub fn column_values(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.column_index(name)?;
        self.rows
            .iter()
            .map(|r| match &r[k] {
                Cell::Num(x) => Some(*x),
                Cell::Text(_) => None,
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (key, value) in &self.meta {
            let _ = writeln!(out, "# {key} = {value}");
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let line: Vec<String> = row
                .iter()
                .map(|cell| match cell {
                    Cell::Num(x) => format_float(*x),
                    Cell::Text(s) => {
                        debug_assert!(!s.contains([',', '\n']));
                        s.clone()
                    }
                })
                .collect();
            let _ = writeln!(out, "{}", line.join(","));
        }
        out
    }

    pub fn to_json(&self) -> String {
        let meta: serde_json::Map<String, serde_json::Value> = self
            .meta
            .iter()
            .map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone())))
            .collect();
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|cell| match cell {
                        Cell::Num(x) => serde_json::Number::from_f64(*x)
                            .map(serde_json::Value::Number)
                            .unwrap_or(serde_json::Value::Null),
                        Cell::Text(s) => serde_json::Value::String(s.clone()),
                    })
                    .collect::<Vec<_>>()
                    .into()
            })
            .collect();
        let value = serde_json::json!({
            "meta": meta,
            "columns": self.columns,
            "rows": rows,
        });
        let mut text = serde_json::to_string_pretty(&value).expect("plain data serializes");
        text.push('\n');
        text
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        }
    }
}

/// Writes to the given path, or to stdout when no path is set.
pub fn write_output(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|source| Error::Io { path: path.display().to_string(), source }),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|()| stdout.flush())
                .map_err(|source| Error::Io { path: "<stdout>".into(), source })
        }
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| a + (b - a) * (k as f64 / (n - 1) as f64)).collect()
}

/// Delay grid for correlation runs: zero, then log-spaced points covering
/// three decades up to `tau_max`.
fn tau_grid(tau_max: f64, points: usize) -> Vec<f64> {
    if points == 2 {
        return vec![0.0, tau_max];
    }
    let start = tau_max * 1e-3;
    let span = (points - 2) as f64;
    let mut grid = vec![0.0];
    for k in 1..points {
        if k == points - 1 {
            grid.push(tau_max);
        } else {
            grid.push(start * 1000f64.powf((k - 1) as f64 / span));
        }
    }
    grid
}

fn initial_state(label: &str) -> Result<DensityMatrix> {
    match label {
        "ee" | "s" | "a" | "gg" => pure_state(label, Basis::Dicke),
        other => Err(Error::InvalidConfig(format!(
            "initial_state must be one of ee, s, a, gg, got `{other}`"
        ))),
    }
}

fn in_pool<T: Send>(jobs: Option<usize>, work: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        None => Ok(work()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidConfig(format!("cannot build worker pool: {e}")))?;
            Ok(pool.install(work))
        }
    }
}

fn push_params_meta(ds: &mut Dataset, cfg: &ScenarioConfig) {
    ds.push_meta_float("omega", cfg.omega);
    ds.push_meta_float("delta", cfg.delta);
    ds.push_meta_float("gamma_s_frac", cfg.gamma_s_frac);
}

/// Transient observables on a uniform time grid from the configured
/// initial state.
pub fn cmd_evolve(cfg: &ScenarioConfig) -> Result<Dataset> {
    cfg.validate()?;
    let params = cfg.params()?;
    let rho0 = initial_state(&cfg.initial_state)?;
    let times = linspace(0.0, cfg.t_end, cfg.samples);
    let traj = evolve(&params, &rho0, cfg.t_end, &times, &IntegratorConfig::default())?;

    let mut ds = Dataset::new(vec![
        "t_gamma",
        "P_e",
        "P_e_squared",
        "P_ee",
        "C",
        "pop_ee",
        "pop_s",
        "pop_a",
        "pop_gg",
    ]);
    push_params_meta(&mut ds, cfg);
    ds.push_meta("initial_state", cfg.initial_state.clone());
    ds.push_meta_float("t_end", cfg.t_end);
    ds.push_meta("samples", cfg.samples.to_string());
    for (t, state) in traj.iter() {
        let pe = excitation_probability(state)?;
        let pee = double_excitation_probability(state);
        let c = concurrence(state)?;
        let pops = dicke_populations(state);
        ds.push_row(vec![
            Cell::Num(t),
            Cell::Num(pe),
            Cell::Num(pe * pe),
            Cell::Num(pee),
            Cell::Num(c),
            Cell::Num(pops[0]),
            Cell::Num(pops[1]),
            Cell::Num(pops[2]),
            Cell::Num(pops[3]),
        ]);
    }
    Ok(ds)
}

#[derive(Serialize)]
struct MatrixReport {
    basis: &'static str,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl MatrixReport {
    fn from_state(state: &DensityMatrix) -> Self {
        let m = state.entries();
        let re = (0..4).map(|i| (0..4).map(|j| m[[i, j]].re).collect()).collect();
        let im = (0..4).map(|i| (0..4).map(|j| m[[i, j]].im).collect()).collect();
        Self { basis: "dicke", re, im }
    }
}

#[derive(Serialize)]
struct SteadyReport {
    omega: f64,
    delta: f64,
    gamma_s_frac: f64,
    omega_max: f64,
    blockade_ratio_analytic: Option<f64>,
    blockade_ratio_numeric: Option<f64>,
    concurrence_analytic: f64,
    concurrence_numeric: f64,
    frobenius_distance: f64,
    stationarity_defect_analytic: f64,
    stationarity_defect_numeric: f64,
    analytic: MatrixReport,
    numeric: MatrixReport,
}

/// Steady-state report: both solvers, their distance, and the derived
/// diagnostics. Always JSON; the matrices do not fit a flat table.
pub fn cmd_steady(cfg: &ScenarioConfig) -> Result<String> {
    cfg.validate()?;
    let params = cfg.params()?;
    let analytic = steady_state_analytic(&params);
    let numeric = steady_state_numeric(&params)?;
    let ratio_analytic = match blockade_ratio_analytic(&params) {
        Ok(r) => Some(r),
        Err(Error::UndefinedRatio) => None,
        Err(e) => return Err(e),
    };
    let ratio_numeric = match blockade_ratio_from_state(&numeric) {
        Ok(r) => Some(r),
        Err(Error::UndefinedRatio) => None,
        Err(e) => return Err(e),
    };
    let report = SteadyReport {
        omega: cfg.omega,
        delta: cfg.delta,
        gamma_s_frac: cfg.gamma_s_frac,
        omega_max: entanglement_window(params.delta(), params.gamma()),
        blockade_ratio_analytic: ratio_analytic,
        blockade_ratio_numeric: ratio_numeric,
        concurrence_analytic: steady_concurrence_analytic(&params),
        concurrence_numeric: concurrence(&numeric)?,
        frobenius_distance: frobenius_distance(analytic.entries(), numeric.entries()),
        stationarity_defect_analytic: stationarity_defect(&params, &analytic),
        stationarity_defect_numeric: stationarity_defect(&params, &numeric),
        analytic: MatrixReport::from_state(&analytic),
        numeric: MatrixReport::from_state(&numeric.to_basis(Basis::Dicke)),
    };
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    Ok(text)
}

/// Steady-state quantity against drive strength, one column per integer
/// shift, plus a marker column for window crossings.
pub fn cmd_sweep(cfg: &ScenarioConfig) -> Result<Dataset> {
    cfg.validate()?;
    let omegas = linspace(cfg.omega_min, cfg.omega_max, cfg.samples);
    let deltas: Vec<u32> = (cfg.delta_min..=cfg.delta_max).collect();
    let quantity = cfg.quantity;
    let gamma_s_frac = cfg.gamma_s_frac;

    let values: Vec<Vec<f64>> = in_pool(cfg.jobs, || {
        omegas
            .par_iter()
            .map(|&om| {
                deltas
                    .iter()
                    .map(|&de| {
                        let p = SystemParams::dimensionless(om, de as f64, gamma_s_frac)?;
                        match quantity {
                            SweepQuantity::Ratio => blockade_ratio_analytic(&p),
                            SweepQuantity::Concurrence => Ok(steady_concurrence_analytic(&p)),
                        }
                    })
                    .collect()
            })
            .collect::<Result<_>>()
    })??;

    let mut columns = vec!["omega".to_string()];
    columns.extend(deltas.iter().map(|d| format!("delta_{d}")));
    columns.push("crossings".into());
    let mut ds = Dataset::new(columns);
    ds.push_meta(
        "quantity",
        match quantity {
            SweepQuantity::Ratio => "ratio",
            SweepQuantity::Concurrence => "concurrence",
        },
    );
    ds.push_meta_float("gamma_s_frac", cfg.gamma_s_frac);
    ds.push_meta_float("omega_min", cfg.omega_min);
    ds.push_meta_float("omega_max", cfg.omega_max);
    ds.push_meta("samples", cfg.samples.to_string());
    let windows: Vec<f64> =
        deltas.iter().map(|&d| entanglement_window(d as f64, 1.0)).collect();
    for (d, w) in deltas.iter().zip(&windows) {
        ds.push_meta_float(&format!("cross_delta_{d}"), *w);
    }

    for (i, (&om, row)) in omegas.iter().zip(&values).enumerate() {
        let mut cells = Vec::with_capacity(deltas.len() + 2);
        cells.push(Cell::Num(om));
        cells.extend(row.iter().map(|&v| Cell::Num(v)));
        // mark each shift whose separability threshold was just passed
        let crossed: Vec<String> = deltas
            .iter()
            .zip(&windows)
            .filter(|&(_, &w)| {
                let above = w <= om;
                let below_prev = i > 0 && w <= omegas[i - 1];
                above && !below_prev && w >= cfg.omega_min
            })
            .map(|(d, _)| d.to_string())
            .collect();
        cells.push(Cell::Text(crossed.join(";")));
        ds.push_row(cells);
    }
    Ok(ds)
}

/// Photon-photon cross correlation against delay for the configured
/// detector geometry.
pub fn cmd_g2(cfg: &ScenarioConfig) -> Result<Dataset> {
    cfg.validate()?;
    let params = cfg.params()?;
    let geometry = cfg.geometry()?;
    let taus = tau_grid(cfg.tau_max, cfg.tau_points);
    let values = g2(&params, &geometry, &taus, &IntegratorConfig::default())?;

    let mut ds = Dataset::new(vec!["tau_gamma", "g2"]);
    push_params_meta(&mut ds, cfg);
    ds.push_meta_float("phi1", cfg.phi1);
    ds.push_meta_float("phi2", cfg.phi2);
    ds.push_meta_float("g2_zero_analytic", g2_zero_analytic(&params, &geometry)?);
    for (t, v) in taus.iter().zip(&values) {
        ds.push_row(vec![Cell::Num(*t), Cell::Num(*v)]);
    }
    Ok(ds)
}

fn preset_config(omega: f64, delta: f64, jobs: Option<usize>) -> ScenarioConfig {
    ScenarioConfig { omega, delta, jobs, ..ScenarioConfig::default() }
}

/// Builds the dataset files behind one bundled figure and writes them as
/// CSV under `out_dir`. Returns the written paths in panel order.
pub fn cmd_figures(figure: Figure, out_dir: &Path, jobs: Option<usize>) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir)
        .map_err(|source| Error::Io { path: out_dir.display().to_string(), source })?;

    let panels: Vec<(String, Dataset)> = match figure {
        Figure::Fig1 => in_pool(jobs, || {
            FIGURE_PRESETS
                .par_iter()
                .map(|&(tag, om, de)| {
                    Ok((format!("fig1{tag}.csv"), cmd_evolve(&preset_config(om, de, None))?))
                })
                .collect::<Result<_>>()
        })??,
        Figure::Fig2 => in_pool(jobs, || {
            FIGURE_PRESETS
                .par_iter()
                .map(|&(tag, om, de)| {
                    let full = cmd_evolve(&preset_config(om, de, None))?;
                    let mut ds = Dataset::new(vec!["t_gamma", "C"]);
                    for (key, value) in full.meta() {
                        ds.push_meta(key, value.clone());
                    }
                    let t = full.column_index("t_gamma").expect("present");
                    let c = full.column_index("C").expect("present");
                    for row in full.rows() {
                        ds.push_row(vec![row[t].clone(), row[c].clone()]);
                    }
                    Ok((format!("fig2{tag}.csv"), ds))
                })
                .collect::<Result<_>>()
        })??,
        Figure::Fig3 => {
            let cfg = ScenarioConfig {
                quantity: SweepQuantity::Ratio,
                delta_min: 0,
                delta_max: 10,
                samples: 200,
                jobs,
                ..ScenarioConfig::default()
            };
            vec![("fig3.csv".to_string(), cmd_sweep(&cfg)?)]
        }
        Figure::Fig4 => {
            let cfg = ScenarioConfig {
                quantity: SweepQuantity::Concurrence,
                delta_min: 1,
                delta_max: 10,
                samples: 200,
                jobs,
                ..ScenarioConfig::default()
            };
            vec![("fig4.csv".to_string(), cmd_sweep(&cfg)?)]
        }
        Figure::Fig5 => in_pool(jobs, || {
            FIGURE_PRESETS
                .par_iter()
                .map(|&(tag, om, de)| {
                    Ok((format!("fig5{tag}.csv"), cmd_g2(&preset_config(om, de, None))?))
                })
                .collect::<Result<_>>()
        })??,
    };

    let mut written = Vec::with_capacity(panels.len());
    for (name, ds) in panels {
        let path = out_dir.join(name);
        write_output(&ds.to_csv(), Some(&path))?;
        written.push(path);
    }
    Ok(written)
}
