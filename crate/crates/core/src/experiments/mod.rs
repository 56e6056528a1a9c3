//! Config-driven scenarios.
//!
//! A scenario evaluates everything in memory, then writes its CSVs and a
//! `summary.txt` with one line per assertion. The process exit status is the
//! conjunction of those assertions.

pub mod config;

use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};

use log::info;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{charge, make_grid, make_state, shifted, DataSpec, FieldState, GridSpec};
use crate::par;
use crate::probes::{
    self, besov_product_probe_at, bilinear_probe, dilation_probe, dilation_spread, energy_ensemble, member_seed,
    product_ratio_at, q90_growth, ForcingKind, Pairing, ProbeReport,
};
use crate::solver::{
    self, constraint_residual, evolve_delgado, evolve_with, gauge_bound_report, picard_distance, picard_iterate,
    step_count, DelgadoOptions, EvolveOptions, Scheme, StepDiagnostics,
};
use crate::spaces::{self, complex_gaussians, Sign, SpaceTimeBlock};

pub use config::{parse_config, ExperimentConfig, Params, Scenario, Tolerances};

/// First line of every CSV the scenarios write.
pub const SCHEMA_LINE: &str = "# schema=1";

pub const DIAGNOSTICS_HEADER: &str =
    "t,charge,constraint_residual,source_l2,sup_uN_plus,sup_uN_minus,A_plus_Hr,A_minus_Hr";

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    AtMost(f64),
    AtLeast(f64),
    Within(f64, f64),
}

impl Bound {
    pub fn holds(&self, x: f64) -> bool {
        match *self {
            Bound::AtMost(t) => x <= t,
            Bound::AtLeast(t) => x >= t,
            Bound::Within(lo, hi) => x >= lo && x <= hi,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::AtMost(t) => write!(f, "<= {t:e}"),
            Bound::AtLeast(t) => write!(f, ">= {t}"),
            Bound::Within(lo, hi) => write!(f, "in [{lo}, {hi}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Assertion {
    pub name: String,
    pub observed: f64,
    pub bound: Bound,
}

impl Assertion {
    pub fn new(name: impl Into<String>, observed: f64, bound: Bound) -> Self {
        Assertion {
            name: name.into(),
            observed,
            bound,
        }
    }

    /// NaN never passes.
    pub fn passed(&self) -> bool {
        self.bound.holds(self.observed)
    }
}

impl fmt::Display for Assertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}\t{:.6e}\t{}\t{}",
            self.name,
            self.observed,
            self.bound,
            if self.passed() { "PASS" } else { "FAIL" }
        )
    }
}

/// Everything a scenario produced.
#[derive(Debug, Clone)]
pub struct ScenarioOutcome {
    pub scenario: Scenario,
    pub assertions: Vec<Assertion>,
    /// `(file name, contents)` in write order.
    pub files: Vec<(String, String)>,
}

impl ScenarioOutcome {
    fn new(scenario: Scenario) -> Self {
        ScenarioOutcome {
            scenario,
            assertions: Vec::new(),
            files: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.assertions.iter().all(Assertion::passed)
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        for a in &self.assertions {
            writeln!(s, "{a}").unwrap();
        }
        s
    }

    pub fn file(&self, name: &str) -> Option<&str> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, c)| c.as_str())
    }

    pub fn assertion(&self, name: &str) -> Option<&Assertion> {
        self.assertions.iter().find(|a| a.name == name)
    }

    fn check(&mut self, name: impl Into<String>, observed: f64, bound: Bound) {
        self.assertions.push(Assertion::new(name, observed, bound));
    }

    fn csv(&mut self, name: &str, header: &str, body: String) {
        self.files.push((name.to_string(), format!("{SCHEMA_LINE}\n{header}\n{body}")));
    }

    /// Write every file plus `summary.txt` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut written = Vec::new();
        for (name, contents) in self.files.iter().map(|(n, c)| (n.as_str(), c.as_str())).chain([("summary.txt", self.summary().as_str())]) {
            let path = dir.join(name);
            std::fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
            written.push(path);
        }
        Ok(written)
    }
}

/// Evaluate the scenario, then write its files to the configured output directory.
pub fn run_scenario(config: &ExperimentConfig) -> Result<ScenarioOutcome> {
    let outcome = evaluate(config)?;
    outcome.write(&config.output_dir)?;
    Ok(outcome)
}

/// Evaluate the scenario without touching the filesystem (data files aside).
pub fn evaluate(c: &ExperimentConfig) -> Result<ScenarioOutcome> {
    info!("scenario {} on L = {}, N = {}", c.scenario.name(), c.grid.half_width(), c.grid.len());
    match c.scenario {
        Scenario::Run => run(c),
        Scenario::Convergence => convergence(c),
        Scenario::Charge => charge_study(c),
        Scenario::Constraint => constraint_study(c),
        Scenario::Scaling => scaling_study(c),
        Scenario::Delgado => delgado(c),
        Scenario::GlobalBound => global_bound_scenario(c),
        Scenario::Picard => picard(c),
        Scenario::ProbeProduct => probe_product(c),
        Scenario::ProbeBesov => probe_besov(c),
        Scenario::ProbeDilation => probe_dilation(c),
        Scenario::ProbeBilinear => probe_bilinear(c),
        Scenario::ProbeEnergy => probe_energy(c),
        Scenario::NormOracles => norm_oracles(c),
        Scenario::YEmbed => y_embed(c),
    }
}

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn diagnostics_csv(rows: &[StepDiagnostics]) -> String {
    let mut s = format!("{SCHEMA_LINE}\n{DIAGNOSTICS_HEADER}\n");
    for d in rows {
        writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            d.t,
            d.charge,
            opt(d.constraint_residual),
            d.source_l2,
            opt(d.sup_un_plus),
            opt(d.sup_un_minus),
            opt(d.a_plus_hr),
            opt(d.a_minus_hr)
        )
        .unwrap();
    }
    s
}

/// `log2(e_i / e_{i+1})` for consecutive errors.
pub fn observed_orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

fn pair_label(a: usize, b: usize) -> String {
    format!("{a}->{b}")
}

impl ExperimentConfig {
    fn specs(&self) -> [&DataSpec; 4] {
        [&self.f_plus, &self.f_minus, &self.a_plus, &self.a_minus]
    }

    /// Factor applied to all four data fields; computed once on the configured grid
    /// so that every resolution of a study sees the same data.
    pub fn data_scale(&self) -> Result<f64> {
        let Some(target) = self.data_norm else {
            return Ok(1.0);
        };
        let raw = self.raw_state(self.grid, 1.0)?;
        let g = &raw.grid;
        let total = spaces::l2_norm(g, &raw.u_plus)
            + spaces::l2_norm(g, &raw.u_minus)
            + spaces::l2_norm_real(g, &raw.a_plus)
            + spaces::l2_norm_real(g, &raw.a_minus);
        if total == 0.0 {
            return Err(Error::Scenario("data.norm set but the data vanish".into()));
        }
        Ok(target / total)
    }

    fn raw_state(&self, grid: GridSpec, scale: f64) -> Result<FieldState> {
        let [fp, fm, ap, am] = self.specs();
        let mut s = make_state(grid, fp, fm, ap, am, self.mass)?;
        if scale != 1.0 {
            s.u_plus.iter_mut().chain(s.u_minus.iter_mut()).for_each(|z| *z *= scale);
            s.a_plus.iter_mut().chain(s.a_minus.iter_mut()).for_each(|v| *v *= scale);
        }
        Ok(s)
    }

    /// Configured data sampled on `grid`.
    pub fn initial_state(&self, grid: GridSpec) -> Result<FieldState> {
        self.raw_state(grid, self.data_scale()?)
    }

    fn evolve_options(&self) -> EvolveOptions {
        EvolveOptions {
            scheme: self.scheme,
            record_every: self.record_every,
            gauge_sobolev: None,
        }
    }

    /// `study.N` if given, else `default`, each on the configured interval.
    fn study_grids(&self, default: &[usize]) -> Result<Vec<GridSpec>> {
        let ns = if self.study_n.is_empty() { default } else { &self.study_n };
        ns.iter().map(|&n| make_grid(self.grid.half_width(), n)).collect()
    }

    fn rough_data(&self) -> bool {
        self.specs()
            .iter()
            .any(|s| matches!(s, DataSpec::RandomSobolev { .. } | DataSpec::File { .. }))
    }
}

/// Final state only: `record_every` larger than the run.
fn final_state(state: &FieldState, t: f64, scheme: Scheme) -> Result<FieldState> {
    let steps = step_count(t, state.grid.dt())?;
    let traj = evolve_with(
        state,
        t,
        &EvolveOptions {
            scheme,
            record_every: steps.max(1),
            gauge_sobolev: None,
        },
    )?;
    Ok(traj.last().clone())
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn max_diff_real(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

// ---------------------------------------------------------------------------
// Solver scenarios
// ---------------------------------------------------------------------------

/// Source-free: no mass, no gauge, and one spinor component vanishing, so the
/// gauge source `Re(u+ conj u-)` stays zero.
fn source_free(s: &FieldState) -> bool {
    let zero = |v: &[Complex64]| v.iter().all(|z| z.norm() == 0.0);
    s.mass == 0.0
        && s.a_plus.iter().chain(&s.a_minus).all(|a| *a == 0.0)
        && (zero(&s.u_plus) || zero(&s.u_minus))
}

fn run(c: &ExperimentConfig) -> Result<ScenarioOutcome> {
    let mut out = ScenarioOutcome::new(c.scenario);
    let state = c.initial_state(c.grid)?;
    let opts = EvolveOptions {
        gauge_sobolev: Some(c.params.gauge_r),
        ..c.evolve_options()
    };
    let traj = evolve_with(&state, c.t_final, &opts)?;
    out.files.push(("diagnostics.csv".into(), diagnostics_csv(&traj.diagnostics)));
    if source_free(&state) {
        let n = traj.total_steps() as isize;
        let fin = traj.last();
        let err = max_diff(&fin.u_plus, &shifted(&state.u_plus, n))
            .max(max_diff(&fin.u_minus, &shifted(&state.u_minus, -n)))
            .max(fin.sup_gauge());
        out.check("transport_error", err, Bound::AtMost(c.tol.transport));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub n_coarse: usize,
    pub n_fine: usize,
    pub sup_diff: f64,
    pub l2_diff: f64,
    /// Against the previous row; `None` on the first row or when either difference is zero.
    pub order_sup: Option<f64>,
    pub order_l2: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub const HEADER: &'static str = "N_coarse,N_fine,sup_diff,l2_diff,order_sup,order_l2";

    pub fn max_sup_diff(&self) -> f64 {
        self.rows.iter().map(|r| r.sup_diff).fold(0.0, f64::max)
    }

    fn body(&self) -> String {
        let order = |o: Option<f64>, diff: f64| match o {
            Some(v) => v.to_string(),
            None if diff == 0.0 => "exact".into(),
            None => String::new(),
        };
        let mut s = String::new();
        for r in &self.rows {
            writeln!(
                s,
                "{},{},{},{},{},{}",
                r.n_coarse,
                r.n_fine,
                r.sup_diff,
                r.l2_diff,
                order(r.order_sup, r.sup_diff),
                order(r.order_l2, r.l2_diff)
            )
            .unwrap();
        }
        s
    }
}

/// Coarse solution against the fine one restricted to the coarse nodes
/// (fine node `2j` is coarse node `j`), at the final time, for each adjacent pair.
pub fn convergence_study(c: &ExperimentConfig, n_list: &[usize]) -> Result<ConvergenceTable> {
    if n_list.len() < 3 {
        return Err(Error::Scenario(format!("convergence study needs at least 3 resolutions, got {}", n_list.len())));
    }
    if let Some(w) = n_list.windows(2).find(|w| w[1] != 2 * w[0]) {
        return Err(Error::Scenario(format!(
            "convergence study needs successive doublings, got {} then {}",
            w[0], w[1]
        )));
    }
    let grids: Vec<GridSpec> = n_list.iter().map(|&n| make_grid(c.grid.half_width(), n)).collect::<Result<_>>()?;
    let scale = c.data_scale()?;
    let finals = par::try_map_indexed(grids.len(), |i| {
        info!("convergence: N = {}", grids[i].len());
        final_state(&c.raw_state(grids[i], scale)?, c.t_final, c.scheme)
    })?;
    let mut rows: Vec<ConvergenceRow> = Vec::new();
    for w in finals.windows(2) {
        let (coarse, fine) = (&w[0], &w[1]);
        let h = coarse.grid.spacing();
        let mut sup = 0.0f64;
        let mut sq = 0.0;
        for j in 0..coarse.grid.len() {
            let d = [
                (coarse.u_plus[j] - fine.u_plus[2 * j]).norm(),
                (coarse.u_minus[j] - fine.u_minus[2 * j]).norm(),
                (coarse.a_plus[j] - fine.a_plus[2 * j]).abs(),
                (coarse.a_minus[j] - fine.a_minus[2 * j]).abs(),
            ];
            for v in d {
                sup = sup.max(v);
                sq += v * v;
            }
        }
        let l2 = (h * sq).sqrt();
        let order = |prev: Option<f64>, cur: f64| match prev {
            Some(p) if p > 0.0 && cur > 0.0 => Some((p / cur).log2()),
            _ => None,
        };
        let prev = rows.last();
        rows.push(ConvergenceRow {
            n_coarse: coarse.grid.len(),
            n_fine: fine.grid.len(),
            sup_diff: sup,
            l2_diff: l2,
            order_sup: order(prev.map(|r| r.sup_diff), sup),
            order_l2: order(prev.map(|r| r.l2_diff), l2),
        });
    }
    Ok(ConvergenceTable { rows })
}

fn convergence(c: &ExperimentConfig) -> Result<ScenarioOutcome> {
    let mut out = ScenarioOutcome::new(c.scenario);
    let n = c.grid.len();
    let default = [n, 2 * n, 4 * n];
    let ns = if c.study_n.is_empty() { &default[..] } else { &c.study_n[..] };
    let table = convergence_study(c, ns)?;
    out.csv("convergence.csv", ConvergenceTable::HEADER, table.body());
    if table.max_sup_diff() <= c.tol.transport {
        out.check("convergence_max_difference", table.max_sup_diff(), Bound::AtMost(c.tol.transport));
    } else if !c.rough_data() {
        for r in &table.rows {
            if let Some(p) = r.order_sup {
                out.check(
                    format!("convergence_order[{}]", pair_label(r.n_coarse, r.n_fine)),
                    p,
                    Bound::Within(c.tol.order_min, c.tol.order_max),
                );
            }
        }
    }
    Ok(out)
}

fn charge_study(c: &ExperimentConfig) -> Result<ScenarioOutcome> {
    let mut out = ScenarioOutcome::new(c.scenario);
    let n = c.grid.len();
    let grids = c.study_grids(&[n, 2 * n, 4 * n])?;
    let scale = c.data_scale()?;
    let rows = par::try_map_indexed(grids.len(), |i| {
        let s = c.raw_state(grids[i], scale)?;
        let q0 = charge(&s);
        let q1 = charge(&final_state(&s, c.t_final, c.scheme)?);
        Ok::<_, Error>((q0, q1))
    })?;
    let drifts: Vec<f64> = rows
        .iter()
        .map(|(q0, q1)| if *q0 > 0.0 { (q1 - q0).abs() / q0 } else { (q1 - q0).abs() })
        .collect();
    let orders = observed_orders(&drifts);
    let mut body = String::new();
    for (i, g) in grids.iter().enumerate() {
        let order = if i == 0 { String::new() } else { orders[i - 1].to_string() };
        let (q0, q1) = rows[i];
        writeln!(body, "{},{},{},{},{},{}", g.len(), q0, q1, (q1 - q0).abs(), drifts[i], order).unwrap();
    }
    out.csv("charge.csv", "N,charge_0,charge_T,abs_drift,rel_drift,order", body);
    for (i, p) in orders.iter().enumerate() {
        out.check(
            format!("charge_order[{}]", pair_label(grids[i].len(), grids[i + 1].len())),
            *p,
            Bound::Within(c.tol.order_min, c.tol.order_max),
        );
    }
    let last = grids.len() - 1;
    let (q0, q1) = rows[last];
    out.check(format!("charge_abs_drift[N={}]", grids[last].len()), (q1 - q0).abs(), Bound::AtMost(c.tol.drift));
    Ok(out)
}

fn constraint_study(c: &ExperimentConfig) -> Result<ScenarioOutcome> {
    let mut out = ScenarioOutcome::new(c.scenario);
    let n = c.grid.len();
    let grids = c.study_grids(&[n, 2 * n])?;
    let scale = c.data_scale()?;
    let t = c.params.constraint_t;
    let residuals = par::try_map_indexed(grids.len(), |i| {
        let s = c.raw_state(grids[i], scale)?;
        let dt = s.grid.dt();
        let k = step_count(t, dt)?;
        let opts = EvolveOptions {
            record_every: 1,
            ..c.evolve_options()
        };
        let traj = evolve_with(&s, (k + 1) as f64 * dt, &opts)?;
        constraint_residual(&traj, k)
    })?;
    let orders = observed_orders(&residuals);
    let mut body = String::new();
    for (i, g) in grids.iter().enumerate() {
        let order = if i == 0 { String::new() } else { orders[i - 1].to_string() };
        writeln!(body, "{},{},{},{}", g.len(), t, residuals[i], order).unwrap();
    }
    out.csv("constraint.csv", "N,t,residual,order", body);
    for (i, p) in orders.iter().enumerate() {
        out.check(
            format!("constraint_order[{}]", pair_label(grids[i].len(), grids[i + 1].len())),
            *p,
            Bound::AtLeast(c.tol.order_min),
        );
    }
    let last = grids.len() - 1;
    out.check(format!("constraint_residual[N={}]", grids[last].len()), residuals[last], Bound::AtMost(c.tol.constraint));
    Ok(out)
}

/// `max_j |u(T, x_j) - 2 u_2(2T, 2 x_j)|` over all four fields, where `u_2`
/// evolves the data `(1/2)(f, a)(x/2)` on the doubled interval. With equal
/// spacing, `2 x_j` is node `2j` of the doubled grid.
pub fn scaling_error(c: &ExperimentConfig, grid: GridSpec, scale: f64) -> Result<f64> {
    if c.mass != 0.0 {
        return Err(Error::Scenario(format!("scaling symmetry needs m = 0, got m = {}", c.mass)));
    }
    let base = c.raw_state(grid, scale)?;
    let wide = grid.dilated(2)?;
    let [fp, fm, ap, am] = c.specs();
    let mut scaled = make_state(wide, &fp.rescaled(2.0)?, &fm.rescaled(2.0)?, &ap.rescaled(2.0)?, &am.rescaled(2.0)?, 0.0)?;
    scaled.u_plus.iter_mut().chain(scaled.u_minus.iter_mut()).for_each(|z| *z *= scale);
    scaled.a_plus.iter_mut().chain(scaled.a_minus.iter_mut()).for_each(|v| *v *= scale);
    let b = final_state(&base, c.t_final, c.scheme)?;
    let s = final_state(&scaled, 2.0 * c.t_final, c.scheme)?;
    let pick = |v: &[Complex64]| -> Vec<Complex64> { (0..grid.len()).map(|j| 2.0 * v[2 * j]).collect() };
    let pick_re = |v: &[f64]| -> Vec<f64> { (0..grid.len()).map(|j| 2.0 * v[2 * j]).collect() };
    Ok(max_diff(&b.u_plus, &pick(&s.u_plus))
        .max(max_diff(&b.u_minus, &pick(&s.u_minus)))
        .max(max_diff_real(&b.a_plus, &pick_re(&s.a_plus)))
        .max(max_diff_real(&b.a_minus, &pick_re(&s.a_minus))))
}

fn scaling_study(c: &ExperimentConfig) -> Result<ScenarioOutcome> {
    let mut out = ScenarioOutcome::new(c.scenario);
    let n = c.grid.len();
    let grids = c.study_grids(&[n, 2 * n, 4 * n])?;
    let scale = c.data_scale()?;
    let errors = par::try_map_indexed(grids.len(), |i| scaling_error(c, grids[i], scale))?;
    let orders = observed_orders(&errors);
    let mut body = String::new();
    for (i, g) in grids.iter().enumerate() {
        let order = if i == 0 { String::new() } else { orders[i - 1].to_string() };
        writeln!(body, "{},{},{}", g.len(), errors[i], order).unwrap();
    }
    out.csv("scaling.csv", "N,error,order", body);
    for (i, p) in orders.iter().enumerate() {
        out.check(
            format!("scaling_order[{}]", pair_label(grids[i].len(), grids[i + 1].len())),
            *p,
            Bound::AtLeast(c.tol.order_min),
        );
    }
    Ok(out)
}

fn data_l2(s: &FieldState) -> f64 {
    spaces::l2_norm(&s.grid, &s.u_plus) + spaces::l2_norm(&s.grid, &s.u_minus)
}

fn delgado(c: &ExperimentConfig) -> Result<ScenarioOutcome> {
    let mut out = ScenarioOutcome::new(c.scenario);
    let scale = c.data_scale()?;
    let state = c.raw_state(c.grid, scale)?;
    let opts = DelgadoOptions {
        linear_scheme: c.params.delgado_scheme,
        record_every: c.record_every,
    };
    let run = evolve_delgado(&state, c.t_final, &opts)?;
    let mut body = String::new();
    for s in &run.steps {
        writeln!(
            body,
            "{},{},{},{},{}",
            s.t, s.sup_un_plus, s.sup_un_minus, s.superposition_error, s.modulus_deviation
        )
        .unwrap();
    }
    out.csv("delgado.csv", "t,sup_uN_plus,sup_uN_minus,superposition_error,modulus_deviation", body);
    let diags: Vec<StepDiagnostics> = run
        .states
        .iter()
        .map(|d| StepDiagnostics {
            t: d.base.t,
            charge: charge(&d.base),
            constraint_residual: None,
            source_l2: solver::source_l2(&d.base),
            sup_un_plus: Some(d.un_plus.iter().map(|z| z.norm()).fold(0.0, f64::max)),
            sup_un_minus: Some(d.un_minus.iter().map(|z| z.norm()).fold(0.0, f64::max)),
            a_plus_hr: None,
            a_minus_hr: None,
        })
        .collect();
    out.files.push(("diagnostics.csv".into(), diagnostics_csv(&diags)));

    match c.params.delgado_scheme {
        Scheme::Pc2 => out.check("superposition_error", run.max_superposition_error(), Bound::AtMost(c.tol.superposition)),
        Scheme::ExactPhase => out.check("modulus_deviation", run.max_modulus_deviation(), Bound::AtMost(c.tol.modulus)),
    }

    if !c.study_n.is_empty() {
        let grids = c.study_grids(&[])?;
        let pc2 = DelgadoOptions {
            linear_scheme: Scheme::Pc2,
            record_every: c.record_every,
        };
        let per_grid = par::try_map_indexed(grids.len(), |i| {
            let s = c.raw_state(grids[i], scale)?;
            let r = evolve_delgado(&s, c.t_final, &pc2)?;
            Ok::<_, Error>((r.max_modulus_deviation(), r.sup_un() / data_l2(&s)))
        })?;
        let mut body = String::new();
        for (g, (dev, cst)) in grids.iter().zip(&per_grid) {
            writeln!(body, "{},{},{}", g.len(), dev, cst).unwrap();
        }
        out.csv("delgado_refinement.csv", "N,pc2_modulus_deviation,remainder_constant", body);
        if c.mass == 0.0 {
            let devs: Vec<f64> = per_grid.iter().map(|p| p.0).collect();
            for (i, p) in observed_orders(&devs).iter().enumerate() {
                out.check(
                    format!("pc2_modulus_order[{}]", pair_label(grids[i].len(), grids[i + 1].len())),
                    *p,
                    Bound::AtLeast(c.tol.order_min),
                );
            }
        } else {
            let c_ref = per_grid[0].1;
            for (g, (_, cst)) in grids.iter().zip(&per_grid).skip(1) {
                out.check(
                    format!("remainder_constant_change[N={}]", g.len()),
                    ((cst - c_ref) / c_ref).abs(),
                    Bound::AtMost(c.tol.remainder),
                );
            }
        }
    }
    Ok(out)
}

fn global_bound_scenario(c: &ExperimentConfig) -> Result<ScenarioOutcome> {
    let mut out = ScenarioOutcome::new(c.scenario);
    let scale = c.data_scale()?;
    let state = c.raw_state(c.grid, scale)?;
    let r = c.params.gauge_r;
    let opts = EvolveOptions {
        gauge_sobolev: Some(r),
        ..c.evolve_options()
    };
    let traj = evolve_with(&state, c.t_final, &opts)?;
    let records = gauge_bound_report(&traj, r)?;
    out.files.push(("diagnostics.csv".into(), diagnostics_csv(&traj.diagnostics)));
    let mut body = String::new();
    for g in &records {
        writeln!(
            body,
            "{},{},{},{},{},{}",
            g.t,
            g.a_plus_hr,
            g.a_minus_hr,
            g.source_integral,
            g.data_term,
            opt(g.ratio)
        )
        .unwrap();
    }
    out.csv("gauge_bound.csv", "t,A_plus_Hr,A_minus_Hr,source_integral,data_term,ratio", body);
    let max_ratio = records.iter().filter_map(|g| g.ratio).fold(0.0, f64::max);
    out.check("gauge_bound_ratio", max_ratio, Bound::AtMost(c.tol.gauge_ratio));

    let q0 = traj.diagnostics[0].charge;
    if q0 > 0.0 {
        let coarse = make_grid(c.grid.half_width(), c.grid.len() / 2)?;
        let drift = |s: &FieldState, q: f64| -> Result<f64> { Ok((charge(&final_state(s, c.t_final, c.scheme)?) - q).abs() / q) };
        let fine = (traj.diagnostics.last().unwrap().charge - q0).abs() / q0;
        let cs = c.raw_state(coarse, scale)?;
        let coarse_drift = drift(&cs, charge(&cs))?;
        out.check(
            format!("charge_order[{}]", pair_label(coarse.len(), c.grid.len())),
            (coarse_drift / fine).log2(),
            Bound::AtLeast(c.tol.order_min),
        );
    }
    Ok(out)
}

fn picard(c: &ExperimentConfig) -> Result<ScenarioOutcome> {
    let mut out = ScenarioOutcome::new(c.scenario);
    let state = c.initial_state(c.grid)?;
    let k = c.params.picard_iterations;
    let run = picard_iterate(&state, k, c.t_final)?;
    let traj = evolve_with(
        &state,
        c.t_final,
        &EvolveOptions {
            scheme: Scheme::Pc2,
            record_every: 1,
            gauge_sobolev: None,
        },
    )?;
    let d = picard_distance(run.iterates.last().unwrap(), &traj.states);
    let mut body = String::new();
    for (i, dist) in run.distances.iter().enumerate() {
        let factor = if i == 0 { String::new() } else { opt(run.factors.get(i - 1).copied()) };
        writeln!(body, "{},{},{}", i + 1, dist, factor).unwrap();
    }
    out.csv("picard.csv", "k,distance,factor", body);
    let worst = run.factors.iter().cloned().fold(0.0, f64::max);
    out.check("picard_max_factor", worst, Bound::AtMost(c.tol.picard_factor));
    out.check(format!("picard_iterate{k}_vs_evolve"), d, Bound::AtMost(c.tol.picard_distance));
    Ok(out)
}

// ---------------------------------------------------------------------------
// Probe scenarios
// ---------------------------------------------------------------------------

fn add_reports(out: &mut ScenarioOutcome, reports: &[ProbeReport]) {
    let mut body = String::new();
    let mut text = String::new();
    for r in reports {
        body.push_str(&r.csv_rows());
        writeln!(text, "{r}").unwrap();
    }
    out.csv("probe.csv", ProbeReport::CSV_HEADER, body);
    out.files.push(("probe.txt".into(), text));
}

fn probe_grids(c: &ExperimentConfig) -> Result<Vec<GridSpec>> {
    c.study_grids(&[c.grid.len(), 2 * c.grid.len()])
}

fn probe_product(c: &ExperimentConfig) -> Result<ScenarioOutcome> {
    let mut out = ScenarioOutcome::new(c.scenario);
    let p = &c.params;
    if p.product_stable.is_none() && p.product_witness.is_none() {
        return Err(Error::Scenario("probe_product needs product.stable and/or product.witness".into()));
    }
    let grids = probe_grids(c)?;
    let mut reports = Vec::new();
    let label = |g: &[GridSpec], i: usize| pair_label(g[i].len(), g[i + 1].len());
    if let Some([a, b, cc]) = p.product_stable {
        let r = product_ratio_at(a, b, cc, &grids, p.ensemble, c.seed, p.product_family)?;
        for (i, g) in q90_growth(&r, "ratio").iter().enumerate() {
            out.check(
                format!("product_stable_growth[{}]", label(&grids, i)),
                *g,
                Bound::Within(1.0 - c.tol.stable, 1.0 + c.tol.stable),
            );
        }
        reports.push(r);
    }
    if let Some([a, b, cc]) = p.product_witness {
        let r = product_ratio_at(a, b, cc, &grids, p.ensemble, c.seed, p.product_family)?;
        for (i, g) in q90_growth(&r, "ratio").iter().enumerate() {
            out.check(
                format!("product_witness_growth[{}]", label(&grids, i)),
                *g,
                Bound::AtLeast(1.0 + c.tol.growth),
            );
        }
        reports.push(r);
    }
    let besov = besov_product_probe_at(p.besov_s, &grids, p.ensemble, c.seed)?;
    let recon = besov.rows_for("reconstruction").map(|r| r.max).fold(0.0, f64::max);
    out.check("trichotomy_reconstruction", recon, Bound::AtMost(c.tol.reconstruction));
    reports.push(besov);
    add_reports(&mut out, &reports);
    Ok(out)
}

fn probe_besov(c: &ExperimentConfig) -> Result<ScenarioOutcome> {
    let mut out = ScenarioOutcome::new(c.scenario);
    let grids = probe_grids(c)?;
    let r = besov_product_probe_at(c.params.besov_s, &grids, c.params.ensemble, c.seed)?;
    let recon = r.rows_for("reconstruction").map(|r| r.max).fold(0.0, f64::max);
    out.check("trichotomy_reconstruction", recon, Bound::AtMost(c.tol.reconstruction));
    add_reports(&mut out, &[r]);
    Ok(out)
}

fn probe_dilation(c: &ExperimentConfig) -> Result<ScenarioOutcome> {
    let mut out = ScenarioOutcome::new(c.scenario);
    let p = &c.params;
    let mut reports = Vec::new();
    for &s in &p.dilation_s {
        let r = dilation_probe(s, &p.dilation_t, &c.grid, p.ensemble, c.seed)?;
        out.check(format!("dilation_spread[s={s}]"), dilation_spread(&r), Bound::AtMost(c.tol.spread));
        reports.push(r);
    }
    add_reports(&mut out, &reports);
    Ok(out)
}

fn probe_bilinear(c: &ExperimentConfig) -> Result<ScenarioOutcome> {
    let mut out = ScenarioOutcome::new(c.scenario);
    let p = &c.params;
    let grids = probe_grids(c)?;
    let run = |pairing| {
        bilinear_probe(
            p.bilinear_kind,
            &p.bilinear_exponents,
            p.bilinear_sign,
            pairing,
            p.bilinear_max_frequency,
            &grids,
            p.ensemble,
            c.seed,
        )
    };
    let opposite = run(Pairing::Opposite)?;
    let same = run(Pairing::Same)?;
    for (o, s) in opposite.rows.iter().zip(&same.rows) {
        out.check(format!("null_contrast[N={}]", o.n), s.q90 / o.q90, Bound::AtLeast(c.tol.contrast));
    }
    add_reports(&mut out, &[opposite, same]);
    Ok(out)
}

fn probe_energy(c: &ExperimentConfig) -> Result<ScenarioOutcome> {
    let mut out = ScenarioOutcome::new(c.scenario);
    let p = &c.params;
    let grids = probe_grids(c)?;
    let reports = [ForcingKind::Random, ForcingKind::Resonant, ForcingKind::NonResonant]
        .iter()
        .map(|&kind| energy_ensemble(p.energy_s, p.energy_b, p.energy_sign, kind, &grids, p.ensemble, c.seed))
        .collect::<Result<Vec<_>>>()?;
    add_reports(&mut out, &reports);
    let mut text = String::new();
    for (res, non) in reports[1].rows.iter().zip(&reports[2].rows) {
        writeln!(text, "N={} resonant/non-resonant q90 = {:.4}", res.n, res.q90 / non.q90).unwrap();
    }
    out.files.push(("resonance.txt".into(), text));
    Ok(out)
}

// ---------------------------------------------------------------------------
// Norm checks
// ---------------------------------------------------------------------------

const ORACLE_S: [f64; 4] = [-0.4, 0.0, 0.3, 0.7];
const ORACLE_B: [f64; 4] = [0.6, -1.0, 0.0, 0.4];

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs().max(a.abs())
    }
}

fn random_block(grid: GridSpec, seed: u64) -> Result<SpaceTimeBlock> {
    let m = grid.len();
    SpaceTimeBlock::with_default_window(grid, 0.0, m, complex_gaussians(m * m, seed))
}

fn norm_oracles(c: &ExperimentConfig) -> Result<ScenarioOutcome> {
    let mut out = ScenarioOutcome::new(c.scenario);
    let p = &c.params;
    let line = make_grid(c.grid.half_width(), p.oracle_n)?;
    let plane = make_grid(c.grid.half_width(), p.oracle_block)?;
    // (family, sample, exponents, fast, reference)
    let rows = par::try_map_indexed(p.oracle_samples, |i| {
        let s = ORACLE_S[i % 4];
        let b = ORACLE_B[i % 4];
        let sign = if i % 2 == 0 { Sign::Plus } else { Sign::Minus };
        let f = complex_gaussians(line.len(), member_seed(c.seed, i as u64, 0));
        let block = random_block(plane, member_seed(c.seed, i as u64, 1))?;
        let st = format!("s={s},b={b},sign={}", sign.value());
        Ok::<_, Error>(vec![
            ("Hs", i, format!("s={s}"), spaces::sobolev_norm(&line, &f, s), spaces::reference::sobolev_norm(&line, &f, s)),
            ("Besov_half", i, String::new(), spaces::besov_half_norm(&line, &f), spaces::reference::besov_half_norm(&line, &f)),
            ("Z", i, st.clone(), spaces::z_norm(&block, s, b, sign), spaces::reference::z_norm(&block, s, b, sign)),
            ("Y", i, st, spaces::y_norm(&block, s, b, sign), spaces::reference::y_norm(&block, s, b, sign)),
        ])
    })?;
    let mut body = String::new();
    let mut worst = [0.0f64; 4];
    for (fam, i, ex, fast, slow) in rows.into_iter().flatten() {
        let e = rel(fast, slow);
        let slot = ["Hs", "Besov_half", "Z", "Y"].iter().position(|f| *f == fam).unwrap();
        worst[slot] = worst[slot].max(e);
        writeln!(body, "{fam},{i},\"{ex}\",{fast},{slow},{e}").unwrap();
    }
    out.csv("oracles.csv", "norm,sample,exponents,fast,reference,rel_error", body);
    for (fam, w) in ["Hs", "Besov_half", "Z", "Y"].iter().zip(worst) {
        out.check(format!("oracle_rel_error[{fam}]"), w, Bound::AtMost(c.tol.oracle));
    }
    Ok(out)
}

fn y_embed(c: &ExperimentConfig) -> Result<ScenarioOutcome> {
    let mut out = ScenarioOutcome::new(c.scenario);
    let rows = par::try_map_indexed(c.params.embed_samples, |i| {
        let s = ORACLE_S[i % 4];
        let sign = if i % 2 == 0 { Sign::Plus } else { Sign::Minus };
        // Noise spreads over τ; packets riding a characteristic concentrate near one τ per ξ.
        let seed = member_seed(c.seed, i as u64, 2);
        let block = if i % 4 < 2 {
            random_block(c.grid, seed)?
        } else {
            probes::packet_block(&c.grid, sign.value(), 4.0, seed)?
        };
        let sup = spaces::sup_time_sobolev(&block, s);
        let y = spaces::y_norm(&block, s, 0.0, sign);
        Ok::<_, Error>((s, sign, sup, y))
    })?;
    let mut body = String::new();
    let mut worst = 0.0f64;
    for (i, (s, sign, sup, y)) in rows.iter().enumerate() {
        worst = worst.max(sup / y);
        writeln!(body, "{i},{s},{},{sup},{y},{}", sign.value(), sup / y).unwrap();
    }
    out.csv("y_embed.csv", "sample,s,sign,sup_t_Hs,Y_norm,factor", body);
    out.check("y_embedding_factor", worst, Bound::AtMost(1.0 + c.tol.embed));
    Ok(out)
}
