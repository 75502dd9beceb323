//! Tabular sweeps and the figure recipes behind the `figure` and `sweep` commands.
//!
//! Points are evaluated in parallel and written in input order. Cells whose
//! computation fails are left empty and reported as warnings. Data files carry
//! no timestamps; run metadata goes to a `<file>.meta.json` sidecar.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{domain, Error, Result};
use crate::exact::LSumControl;
use crate::observables::{integrated_peak_fraction, peak_report, profile, DensityProfile};
use crate::thermo::{
    solve_fugacity_with, tau_critical, threshold_state_with, transition_temperature_with, ModelKind, Tau, TrapSpec,
};

/// Fixed version string written into metadata.
pub const TOOL_VERSION: &str = concat!("trapbose ", env!("CARGO_PKG_VERSION"));

/// Rows of named numeric columns; `None` is an empty cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    columns: Vec<String>,
    rows: Vec<Vec<Option<f64>>>,
    metadata: BTreeMap<String, Value>,
    warnings: Vec<String>,
}

impl SweepTable {
    pub fn new(columns: &[&str]) -> Result<Self> {
        for (i, c) in columns.iter().enumerate() {
            if columns[..i].contains(c) {
                return domain(format!("duplicate column name '{c}'"));
            }
        }
        let mut metadata = BTreeMap::new();
        metadata.insert("version".to_string(), json!(TOOL_VERSION));
        Ok(SweepTable {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            metadata,
            warnings: Vec::new(),
        })
    }

    pub fn push_row(&mut self, row: Vec<Option<f64>>) -> Result<()> {
        if row.len() != self.columns.len() {
            return domain(format!("row has {} cells, table has {} columns", row.len(), self.columns.len()));
        }
        self.rows.push(row);
        Ok(())
    }

    /// Appends a row built from per-cell results; failures become empty cells.
    pub fn push_results(&mut self, label: &str, cells: Vec<Result<f64>>) -> Result<()> {
        let mut row = Vec::with_capacity(cells.len());
        for (name, cell) in self.columns.clone().iter().zip(cells) {
            match cell {
                Ok(v) => row.push(Some(v)),
                Err(e) => {
                    self.warnings.push(format!("{label}, column {name}: {e}"));
                    row.push(None);
                }
            }
        }
        self.push_row(row)
    }

    pub fn set_meta(&mut self, key: &str, value: Value) {
        self.metadata.insert(key.to_string(), value);
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Option<f64>>] {
        &self.rows
    }

    pub fn metadata(&self) -> &BTreeMap<String, Value> {
        &self.metadata
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    /// CSV with one header line; numbers in scientific notation, 9 significant digits.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.map_or_else(String::new, format_cell)))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))
    }

    /// Writes `path` and its metadata sidecar `path.meta.json`.
    pub fn write_files(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_csv_string()?)?;
        let meta = serde_json::to_string_pretty(&self.metadata).map_err(|e| Error::Io(e.to_string()))?;
        fs::write(sidecar_path(path), meta + "\n")?;
        Ok(())
    }
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".meta.json");
    path.with_file_name(name)
}

pub fn format_cell(v: f64) -> String {
    format!("{v:.8e}")
}

/// `n` evenly spaced points over `[lo, hi]`, both ends included.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// Log-spaced points from `10^lo_exp` to `10^hi_exp` with `per_decade` steps per decade.
pub fn logspace(lo_exp: i32, hi_exp: i32, per_decade: usize) -> Vec<f64> {
    let steps = (hi_exp - lo_exp) as usize * per_decade;
    (0..=steps)
        .map(|i| 10f64.powf(f64::from(lo_exp) + i as f64 / per_decade as f64))
        .collect()
}

/// Temperature sweep range in `ħω/k_B`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TempRange {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl TempRange {
    pub fn new(min: f64, max: f64, steps: usize) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && min > 0.0 && max > min) {
            return domain(format!("temperature range [{min}, {max}] is empty or not positive"));
        }
        if steps < 2 {
            return domain(format!("a sweep needs at least 2 steps, got {steps}"));
        }
        Ok(TempRange { min, max, steps })
    }

    /// `steps` points over `[0.5, 1.5] T*`.
    pub fn around(t_star: f64, steps: usize) -> Result<Self> {
        Self::new(0.5 * t_star, 1.5 * t_star, steps)
    }

    pub fn points(&self) -> Vec<f64> {
        linspace(self.min, self.max, self.steps)
    }
}

/// Default number of temperatures in a sweep.
pub const DEFAULT_TEMP_STEPS: usize = 200;

/// Settings shared by the sweep and figure commands.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub models: Vec<ModelKind>,
    pub atoms: f64,
    /// `None` selects `[0.5, 1.5] T*` of the first model.
    pub temperatures: Option<TempRange>,
    pub steps: usize,
    pub rmax: f64,
    pub points: usize,
    pub dims: u8,
    pub trap: TrapSpec,
    pub control: LSumControl,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            models: ModelKind::ALL.to_vec(),
            atoms: 1e6,
            temperatures: None,
            steps: DEFAULT_TEMP_STEPS,
            rmax: 30.0,
            points: 301,
            dims: 0,
            trap: TrapSpec::isotropic(),
            control: LSumControl::default(),
            out: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.models.is_empty() {
            return domain("no model selected");
        }
        if !(self.atoms.is_finite() && self.atoms > 0.0) {
            return domain(format!("atom number must be positive, got {}", self.atoms));
        }
        if self.steps < 2 {
            return domain(format!("a sweep needs at least 2 steps, got {}", self.steps));
        }
        if !(self.rmax.is_finite() && self.rmax > 0.0) || self.points < 2 {
            return domain("profile grid needs rmax > 0 and at least 2 points");
        }
        if self.dims > 2 {
            return domain(format!("dims must be 0, 1 or 2, got {}", self.dims));
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        linspace(0.0, self.rmax, self.points)
    }

    fn temperature_range(&self) -> Result<TempRange> {
        match self.temperatures {
            Some(r) => Ok(r),
            None => {
                let t = transition_temperature_with(self.models[0], self.atoms, &self.trap, &self.control)?;
                TempRange::around(t.temperature(), self.steps)
            }
        }
    }

    fn describe(&self, table: &mut SweepTable) {
        table.set_meta("models", json!(self.models.iter().map(|m| m.label()).collect::<Vec<_>>()));
        table.set_meta("atoms", json!(self.atoms));
        table.set_meta(
            "trap",
            json!({ "omega": self.trap.omega, "anisotropy": self.trap.anisotropy, "aniso_ratio": self.trap.aniso_ratio() }),
        );
        table.set_meta("lsum_rel_tol", json!(self.control.rel_tol));
        table.set_meta("lsum_max_terms", json!(self.control.max_terms));
    }
}

fn condensate_fraction(model: ModelKind, atoms: f64, t: f64, cfg: &RunConfig) -> Result<f64> {
    let tau = Tau::from_temperature(t)?;
    Ok(solve_fugacity_with(model, atoms, tau, &cfg.trap, &cfg.control)?.condensate_fraction())
}

fn peak_fraction(model: ModelKind, atoms: f64, t: f64, cfg: &RunConfig) -> Result<f64> {
    let tau = Tau::from_temperature(t)?;
    let state = solve_fugacity_with(model, atoms, tau, &cfg.trap, &cfg.control)?;
    Ok(peak_report(&state)?.peak_fraction)
}

fn collect_rows<P, F>(table: &mut SweepTable, points: &[P], label: impl Fn(&P) -> String, eval: F) -> Result<()>
where
    P: Sync,
    F: Fn(&P) -> Vec<Result<f64>> + Sync,
{
    let rows: Vec<Vec<Result<f64>>> = points.par_iter().map(&eval).collect();
    for (p, row) in points.iter().zip(rows) {
        table.push_results(&label(p), row)?;
    }
    Ok(())
}

/// Temperature sweep: `T`, `N0_frac_<model>` for every model, and
/// `peak_frac_<model>` for models with a ground-state density.
pub fn temperature_sweep(cfg: &RunConfig) -> Result<SweepTable> {
    cfg.validate()?;
    let range = cfg.temperature_range()?;
    let mut names = vec!["T".to_string()];
    names.extend(cfg.models.iter().map(|m| format!("N0_frac_{m}")));
    let with_peak: Vec<ModelKind> = cfg.models.iter().copied().filter(|m| m.has_ground_state()).collect();
    names.extend(with_peak.iter().map(|m| format!("peak_frac_{m}")));
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut table = SweepTable::new(&refs)?;
    cfg.describe(&mut table);
    table.set_meta("temperature_range", json!([range.min, range.max, range.steps]));
    collect_rows(&mut table, &range.points(), |t| format!("T = {t}"), |&t| {
        let mut row = vec![Ok(t)];
        row.extend(cfg.models.iter().map(|&m| condensate_fraction(m, cfg.atoms, t, cfg)));
        row.extend(with_peak.iter().map(|&m| peak_fraction(m, cfg.atoms, t, cfg)));
        row
    })?;
    Ok(table)
}

/// Decomposed density profile as a table.
pub fn profile_table(p: &DensityProfile) -> Result<SweepTable> {
    let mut table = SweepTable::new(&["r_over_sigma", "total", "ground", "first_excited", "other_excited"])?;
    for i in 0..p.grid.len() {
        table.push_row(vec![
            Some(p.grid[i]),
            Some(p.total[i]),
            Some(p.ground[i]),
            Some(p.first_excited[i]),
            Some(p.other_excited[i]),
        ])?;
    }
    table.set_meta("model", json!(p.state.model.label()));
    table.set_meta("atoms", json!(p.state.atoms));
    table.set_meta("temperature", json!(p.state.temperature()));
    table.set_meta("z", json!(p.state.z()));
    table.set_meta("dims_integrated", json!(p.dims));
    Ok(table)
}

/// Figure ids with a recipe.
pub const FIGURES: [u8; 7] = [1, 2, 3, 4, 5, 6, 7];

/// Atom number of the profile figure's threshold cloud and its temperature.
pub const PROFILE_FIGURE_TEMPERATURE: f64 = 93.37;

/// Default settings of one figure; callers may override fields before [`figure`].
pub fn figure_config(id: u8) -> Result<RunConfig> {
    let base = RunConfig::default();
    let atoms = match id {
        1 | 5 => 1e3,
        4 | 6 => 1e6,
        2 | 3 | 7 => base.atoms,
        _ => return domain(format!("no figure {id} (expected 1 to 7)")),
    };
    Ok(RunConfig { atoms, ..base })
}

/// Builds the table behind figure `id`.
pub fn figure(id: u8, cfg: &RunConfig) -> Result<SweepTable> {
    let mut table = match id {
        1 => fraction_figure(cfg)?,
        2 => shift_figure(cfg)?,
        3 => degeneracy_figure(cfg)?,
        4 | 5 => peak_fraction_figure(cfg)?,
        6 => profile_figure(cfg)?,
        7 => integrated_figure(cfg)?,
        _ => return domain(format!("no figure {id} (expected 1 to 7)")),
    };
    table.set_meta("figure", json!(id));
    Ok(table)
}

fn exact_threshold_range(cfg: &RunConfig) -> Result<TempRange> {
    match cfg.temperatures {
        Some(r) => Ok(r),
        None => {
            let t = transition_temperature_with(ModelKind::Ex, cfg.atoms, &TrapSpec::isotropic(), &cfg.control)?;
            TempRange::around(t.temperature(), cfg.steps)
        }
    }
}

fn fraction_figure(cfg: &RunConfig) -> Result<SweepTable> {
    let models = ModelKind::ALL;
    let range = exact_threshold_range(cfg)?;
    let mut table = SweepTable::new(&["T", "N0_frac_ex", "N0_frac_sc", "N0_frac_sc0", "N0_frac_scinf"])?;
    table.set_meta("atoms", json!(cfg.atoms));
    table.set_meta("temperature_range", json!([range.min, range.max, range.steps]));
    collect_rows(&mut table, &range.points(), |t| format!("T = {t}"), |&t| {
        let mut row = vec![Ok(t)];
        row.extend(models.iter().map(|&m| condensate_fraction(m, cfg.atoms, t, cfg)));
        row
    })?;
    Ok(table)
}

fn transition(model: ModelKind, atoms: f64, cfg: &RunConfig) -> Result<f64> {
    Ok(transition_temperature_with(model, atoms, &TrapSpec::isotropic(), &cfg.control)?.temperature())
}

fn shift_figure(cfg: &RunConfig) -> Result<SweepTable> {
    let mut table = SweepTable::new(&["N", "rel_shift_Tc", "rel_shift_Tsc"])?;
    collect_rows(&mut table, &logspace(2, 7, 10), |n| format!("N = {n}"), |&n| {
        let ex = transition(ModelKind::Ex, n, cfg);
        let tc = 1.0 / tau_critical(n);
        let shift = |t: Result<f64>| -> Result<f64> {
            let e = ex.clone()?;
            Ok((t? - e) / e)
        };
        vec![Ok(n), shift(Ok(tc)), shift(transition(ModelKind::Sc, n, cfg))]
    })?;
    Ok(table)
}

fn degeneracy_at_threshold(model: ModelKind, atoms: f64, cfg: &RunConfig) -> Result<f64> {
    let state = threshold_state_with(model, atoms, &TrapSpec::isotropic(), &cfg.control)?;
    Ok(peak_report(&state)?.degeneracy_parameter)
}

fn degeneracy_figure(cfg: &RunConfig) -> Result<SweepTable> {
    let mut table = SweepTable::new(&["N", "deg_param_sc", "deg_param_ex"])?;
    collect_rows(&mut table, &logspace(2, 8, 10), |n| format!("N = {n}"), |&n| {
        vec![
            Ok(n),
            degeneracy_at_threshold(ModelKind::Sc, n, cfg),
            degeneracy_at_threshold(ModelKind::Ex, n, cfg),
        ]
    })?;
    Ok(table)
}

fn peak_fraction_figure(cfg: &RunConfig) -> Result<SweepTable> {
    let range = exact_threshold_range(cfg)?;
    let mut table = SweepTable::new(&["T", "N0_frac_ex", "peak_frac_ex", "N0_frac_sc", "peak_frac_sc"])?;
    table.set_meta("atoms", json!(cfg.atoms));
    table.set_meta("temperature_range", json!([range.min, range.max, range.steps]));
    collect_rows(&mut table, &range.points(), |t| format!("T = {t}"), |&t| {
        let mut row = vec![Ok(t)];
        for m in [ModelKind::Ex, ModelKind::Sc] {
            match Tau::from_temperature(t).and_then(|tau| solve_fugacity_with(m, cfg.atoms, tau, &cfg.trap, &cfg.control)) {
                Ok(state) => {
                    row.push(Ok(state.condensate_fraction()));
                    row.push(peak_report(&state).map(|p| p.peak_fraction));
                }
                Err(e) => {
                    row.push(Err(e.clone()));
                    row.push(Err(e));
                }
            }
        }
        row
    })?;
    Ok(table)
}

/// Atom numbers of the profile figure: 0.990e6 to 1.004e6 in steps of 2000.
pub fn profile_figure_atoms() -> Vec<f64> {
    (0..8).map(|i| 990_000.0 + 2000.0 * f64::from(i)).collect()
}

fn profile_figure(cfg: &RunConfig) -> Result<SweepTable> {
    let tau = Tau::from_temperature(PROFILE_FIGURE_TEMPERATURE)?;
    let grid = cfg.grid();
    let mut table = SweepTable::new(&["N", "r_over_sigma", "total", "ground", "first_excited", "other_excited"])?;
    table.set_meta("temperature", json!(PROFILE_FIGURE_TEMPERATURE));
    table.set_meta("grid", json!({ "rmax": cfg.rmax, "points": cfg.points }));
    let atoms = profile_figure_atoms();
    let profiles: Vec<Result<DensityProfile>> = atoms
        .par_iter()
        .map(|&n| {
            let state = solve_fugacity_with(ModelKind::Ex, n, tau, &TrapSpec::isotropic(), &cfg.control)?;
            profile(&state, &grid, 0)
        })
        .collect();
    for (n, p) in atoms.iter().zip(profiles) {
        match p {
            Ok(p) => {
                for i in 0..grid.len() {
                    table.push_row(vec![
                        Some(*n),
                        Some(grid[i]),
                        Some(p.total[i]),
                        Some(p.ground[i]),
                        Some(p.first_excited[i]),
                        Some(p.other_excited[i]),
                    ])?;
                }
            }
            Err(e) => {
                table.warnings.push(format!("N = {n}: {e}"));
                for &r in &grid {
                    table.push_row(vec![Some(*n), Some(r), None, None, None, None])?;
                }
            }
        }
    }
    Ok(table)
}

fn integrated_figure(cfg: &RunConfig) -> Result<SweepTable> {
    let mut table = SweepTable::new(&["N", "ground_frac_int2", "ground_frac_int1", "ground_frac_3d"])?;
    collect_rows(&mut table, &logspace(2, 8, 10), |n| format!("N = {n}"), |&n| {
        match threshold_state_with(ModelKind::Ex, n, &TrapSpec::isotropic(), &cfg.control) {
            Ok(state) => vec![
                Ok(n),
                integrated_peak_fraction(&state, 2),
                integrated_peak_fraction(&state, 1),
                integrated_peak_fraction(&state, 0),
            ],
            Err(e) => vec![Ok(n), Err(e.clone()), Err(e.clone()), Err(e)],
        }
    })?;
    Ok(table)
}
