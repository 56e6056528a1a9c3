//! Time stepping along lattice characteristics.
//!
//! The null system is
//!
//! ```text
//! (∂t + ∂x) u+ = -i (m u- - A- u+)      (∂t + ∂x) A+ = -Re(u+ conj(u-))
//! (∂t - ∂x) u- = -i (m u+ - A+ u-)      (∂t - ∂x) A- = +Re(u+ conj(u-))
//! ```
//!
//! With `dt = h` the `+` fields at `(t + dt, x_j)` sit on the characteristic
//! through `(t, x_{j-1})` and the `-` fields on the one through `(t, x_{j+1})`,
//! so transport is an exact index shift. The `pc2` step integrates sources
//! along those diagonals:
//!
//! 1. predictor: explicit Euler for the spinor from the upstream node;
//! 2. gauge corrector: trapezoid with the predicted spinor (the gauge source
//!    does not involve `A`, so no gauge predictor is needed);
//! 3. spinor corrector: trapezoid with the predicted spinor and corrected gauge;
//! 4. one more spinor sweep with the corrected spinor.
//!
//! Changing the gauge/spinor ordering only changes results at `O(h³)` per step.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{charge, FieldState, GridSpec};
use crate::spaces;

/// Sup-norm threshold on `|u|` or `|A|` that aborts a run.
pub const BLOW_UP_GUARD: f64 = 1e8;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Spinor integrator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Predictor–corrector, second order, any mass.
    Pc2,
    /// Phase rotation along characteristics; mass-free only. Moduli are transported exactly.
    ExactPhase,
}

impl Scheme {
    pub fn parse(s: &str) -> Option<Scheme> {
        match s {
            "pc2" => Some(Scheme::Pc2),
            "exact_phase" => Some(Scheme::ExactPhase),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Pc2 => "pc2",
            Scheme::ExactPhase => "exact_phase",
        }
    }
}

#[inline]
fn upstream_plus(j: usize, n: usize) -> usize {
    if j == 0 {
        n - 1
    } else {
        j - 1
    }
}

#[inline]
fn upstream_minus(j: usize, n: usize) -> usize {
    if j + 1 == n {
        0
    } else {
        j + 1
    }
}

type Pair = (Vec<Complex64>, Vec<Complex64>);

/// `S+ = -i(m p- - A- o+)`, `S- = -i(m p+ - A+ o-)` for own field `o` and mass partner `p`.
fn spinor_sources(
    own: (&[Complex64], &[Complex64]),
    partner: (&[Complex64], &[Complex64]),
    a_plus: &[f64],
    a_minus: &[f64],
    mass: f64,
) -> Pair {
    let plus = (0..own.0.len())
        .map(|i| -I * (partner.1[i] * mass - own.0[i] * a_minus[i]))
        .collect();
    let minus = (0..own.1.len())
        .map(|i| -I * (partner.0[i] * mass - own.1[i] * a_plus[i]))
        .collect();
    (plus, minus)
}

fn euler(old: (&[Complex64], &[Complex64]), src: &Pair, dt: f64) -> Pair {
    let n = old.0.len();
    let plus = (0..n)
        .map(|j| {
            let k = upstream_plus(j, n);
            old.0[k] + src.0[k] * dt
        })
        .collect();
    let minus = (0..n)
        .map(|j| {
            let k = upstream_minus(j, n);
            old.1[k] + src.1[k] * dt
        })
        .collect();
    (plus, minus)
}

fn trapezoid(old: (&[Complex64], &[Complex64]), src_old: &Pair, src_new: &Pair, dt: f64) -> Pair {
    let n = old.0.len();
    let half = 0.5 * dt;
    let plus = (0..n)
        .map(|j| {
            let k = upstream_plus(j, n);
            old.0[k] + (src_old.0[k] + src_new.0[j]) * half
        })
        .collect();
    let minus = (0..n)
        .map(|j| {
            let k = upstream_minus(j, n);
            old.1[k] + (src_old.1[k] + src_new.1[j]) * half
        })
        .collect();
    (plus, minus)
}

/// Phase transport: `o±(j) ← o±(j∓1) exp(i dt/2 (A∓_old(j∓1) + A∓_new(j)))`.
fn phase_rotate(
    old: (&[Complex64], &[Complex64]),
    a_old: (&[f64], &[f64]),
    a_new: (&[f64], &[f64]),
    dt: f64,
) -> Pair {
    let n = old.0.len();
    let half = 0.5 * dt;
    let plus = (0..n)
        .map(|j| {
            let k = upstream_plus(j, n);
            old.0[k] * Complex64::from_polar(1.0, half * (a_old.1[k] + a_new.1[j]))
        })
        .collect();
    let minus = (0..n)
        .map(|j| {
            let k = upstream_minus(j, n);
            old.1[k] * Complex64::from_polar(1.0, half * (a_old.0[k] + a_new.0[j]))
        })
        .collect();
    (plus, minus)
}

/// `Re(u+ conj(u-))` pointwise.
fn gauge_source(up: &[Complex64], um: &[Complex64]) -> Vec<f64> {
    up.iter().zip(um).map(|(p, m)| p.re * m.re + p.im * m.im).collect()
}

fn gauge_corrector(state: &FieldState, g_old: &[f64], g_new: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = state.grid.len();
    let half = 0.5 * state.grid.dt();
    let plus = (0..n)
        .map(|j| {
            let k = upstream_plus(j, n);
            state.a_plus[k] - half * (g_old[k] + g_new[j])
        })
        .collect();
    let minus = (0..n)
        .map(|j| {
            let k = upstream_minus(j, n);
            state.a_minus[k] + half * (g_old[k] + g_new[j])
        })
        .collect();
    (plus, minus)
}

/// Intermediate arrays of one step, kept so linear companions (the Delgado
/// split) can be advanced with exactly the same gauge and partner values.
struct Stages {
    a_plus: Vec<f64>,
    a_minus: Vec<f64>,
    predicted: Pair,
    sweep: Pair,
    out: Pair,
}

fn advance(state: &FieldState, scheme: Scheme) -> Result<(FieldState, Stages)> {
    let dt = state.grid.dt();
    let own = (state.u_plus.as_slice(), state.u_minus.as_slice());
    let g_old = gauge_source(&state.u_plus, &state.u_minus);
    let stages = match scheme {
        Scheme::Pc2 => {
            let src_old = spinor_sources(own, own, &state.a_plus, &state.a_minus, state.mass);
            let predicted = euler(own, &src_old, dt);
            let g_pred = gauge_source(&predicted.0, &predicted.1);
            let (a_plus, a_minus) = gauge_corrector(state, &g_old, &g_pred);
            let p = (predicted.0.as_slice(), predicted.1.as_slice());
            let src_pred = spinor_sources(p, p, &a_plus, &a_minus, state.mass);
            let sweep = trapezoid(own, &src_old, &src_pred, dt);
            let s = (sweep.0.as_slice(), sweep.1.as_slice());
            let src_sweep = spinor_sources(s, s, &a_plus, &a_minus, state.mass);
            let out = trapezoid(own, &src_old, &src_sweep, dt);
            Stages {
                a_plus,
                a_minus,
                predicted,
                sweep,
                out,
            }
        }
        Scheme::ExactPhase => {
            if state.mass != 0.0 {
                return Err(Error::Solver(format!(
                    "exact-phase integration needs m = 0, got m = {}",
                    state.mass
                )));
            }
            let a_old = (state.a_plus.as_slice(), state.a_minus.as_slice());
            // Predictor: phase from the upstream gauge only (both ends frozen at t).
            let n = state.grid.len();
            let frozen_p: Vec<f64> = (0..n).map(|j| state.a_plus[upstream_minus(j, n)]).collect();
            let frozen_m: Vec<f64> = (0..n).map(|j| state.a_minus[upstream_plus(j, n)]).collect();
            let predicted = phase_rotate(own, a_old, (&frozen_p, &frozen_m), dt);
            let g_pred = gauge_source(&predicted.0, &predicted.1);
            let (a_plus, a_minus) = gauge_corrector(state, &g_old, &g_pred);
            let out = phase_rotate(own, a_old, (&a_plus, &a_minus), dt);
            Stages {
                a_plus,
                a_minus,
                sweep: out.clone(),
                predicted,
                out,
            }
        }
    };
    let next = FieldState {
        grid: state.grid,
        t: state.t + dt,
        u_plus: stages.out.0.clone(),
        u_minus: stages.out.1.clone(),
        a_plus: stages.a_plus.clone(),
        a_minus: stages.a_minus.clone(),
        mass: state.mass,
    };
    guard(&next)?;
    Ok((next, stages))
}

fn guard(state: &FieldState) -> Result<()> {
    state.check_finite()?;
    let su = state.sup_spinor();
    if su > BLOW_UP_GUARD {
        return Err(Error::BlowUp {
            field: "u",
            value: su,
            t: state.t,
        });
    }
    let sa = state.sup_gauge();
    if sa > BLOW_UP_GUARD {
        return Err(Error::BlowUp {
            field: "A",
            value: sa,
            t: state.t,
        });
    }
    Ok(())
}

/// One `pc2` step of length `dt = h`.
pub fn step(state: &FieldState) -> Result<FieldState> {
    step_with(state, Scheme::Pc2)
}

pub fn step_with(state: &FieldState, scheme: Scheme) -> Result<FieldState> {
    state.check_finite()?;
    advance(state, scheme).map(|(s, _)| s)
}

/// Number of unit-CFL steps to reach `t_final`.
pub fn step_count(t_final: f64, dt: f64) -> Result<usize> {
    if !(t_final.is_finite() && t_final >= 0.0) {
        return Err(Error::Solver(format!("final time must be >= 0, got {t_final}")));
    }
    let n = (t_final / dt).round();
    if (n * dt - t_final).abs() > 1e-9 {
        return Err(Error::Incommensurate { t_final, dt });
    }
    Ok(n as usize)
}

/// `‖u+ conj(u-)‖_{L²}` on the grid.
pub fn source_l2(state: &FieldState) -> f64 {
    let sum: f64 = state
        .u_plus
        .iter()
        .zip(&state.u_minus)
        .map(|(p, m)| p.norm_sqr() * m.norm_sqr())
        .sum();
    (state.grid.spacing() * sum).sqrt()
}

/// Per-step diagnostics record.
#[derive(Debug, Clone, PartialEq)]
pub struct StepDiagnostics {
    pub t: f64,
    pub charge: f64,
    pub constraint_residual: Option<f64>,
    pub source_l2: f64,
    pub sup_un_plus: Option<f64>,
    pub sup_un_minus: Option<f64>,
    pub a_plus_hr: Option<f64>,
    pub a_minus_hr: Option<f64>,
}

impl StepDiagnostics {
    fn of(state: &FieldState, gauge_sobolev: Option<f64>) -> Self {
        let (a_plus_hr, a_minus_hr) = match gauge_sobolev {
            Some(r) => (
                Some(spaces::sobolev_norm_real(&state.grid, &state.a_plus, r)),
                Some(spaces::sobolev_norm_real(&state.grid, &state.a_minus, r)),
            ),
            None => (None, None),
        };
        StepDiagnostics {
            t: state.t,
            charge: charge(state),
            constraint_residual: None,
            source_l2: source_l2(state),
            sup_un_plus: None,
            sup_un_minus: None,
            a_plus_hr,
            a_minus_hr,
        }
    }
}

/// Stored states of a run plus a diagnostics record for every step.
#[derive(Debug, Clone)]
pub struct Trajectory {
    /// States at steps `0, k, 2k, ...` and always the final step.
    pub states: Vec<FieldState>,
    /// Step index of each stored state.
    pub steps: Vec<usize>,
    /// One record per step, including step 0.
    pub diagnostics: Vec<StepDiagnostics>,
    pub record_every: usize,
}

impl Trajectory {
    pub fn initial(&self) -> &FieldState {
        &self.states[0]
    }

    pub fn last(&self) -> &FieldState {
        self.states.last().expect("trajectory is never empty")
    }

    pub fn total_steps(&self) -> usize {
        self.diagnostics.len() - 1
    }

    /// Stored state at step `n`, if it was recorded.
    pub fn state_at_step(&self, n: usize) -> Option<&FieldState> {
        self.steps.binary_search(&n).ok().map(|i| &self.states[i])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    pub scheme: Scheme,
    pub record_every: usize,
    /// Record `‖A±‖_{H^r}` at every step for this `r`.
    pub gauge_sobolev: Option<f64>,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            scheme: Scheme::Pc2,
            record_every: 1,
            gauge_sobolev: None,
        }
    }
}

/// Evolve to `t_final` with the `pc2` scheme.
pub fn evolve(state: &FieldState, t_final: f64, record_every: usize) -> Result<Trajectory> {
    evolve_with(
        state,
        t_final,
        &EvolveOptions {
            record_every,
            ..EvolveOptions::default()
        },
    )
}

/// Mass-free evolution with exact phase transport of the spinor.
pub fn exact_phase_evolve(state: &FieldState, t_final: f64) -> Result<Trajectory> {
    if state.mass != 0.0 {
        return Err(Error::Solver(format!(
            "exact-phase integration needs m = 0, got m = {}",
            state.mass
        )));
    }
    evolve_with(
        state,
        t_final,
        &EvolveOptions {
            scheme: Scheme::ExactPhase,
            ..EvolveOptions::default()
        },
    )
}

pub fn evolve_with(state: &FieldState, t_final: f64, opts: &EvolveOptions) -> Result<Trajectory> {
    if opts.record_every == 0 {
        return Err(Error::Solver("record_every must be at least 1".into()));
    }
    if opts.scheme == Scheme::ExactPhase && state.mass != 0.0 {
        return Err(Error::Solver(format!(
            "exact-phase integration needs m = 0, got m = {}",
            state.mass
        )));
    }
    let grid = state.grid;
    let total = step_count(t_final, grid.dt())?;
    guard(state)?;

    let mut states = vec![state.clone()];
    let mut steps = vec![0];
    let mut diagnostics = vec![StepDiagnostics::of(state, opts.gauge_sobolev)];
    let mut prev_gauge: Option<(Vec<f64>, Vec<f64>)> = None;
    let mut current = state.clone();
    for n in 1..=total {
        let (next, _) = advance(&current, opts.scheme)?;
        if let Some((pp, pm)) = &prev_gauge {
            let r = residual_from_levels(
                &grid,
                (pp, pm),
                (&current.a_plus, &current.a_minus),
                (&next.a_plus, &next.a_minus),
            );
            diagnostics[n - 1].constraint_residual = Some(r);
        }
        prev_gauge = Some((current.a_plus.clone(), current.a_minus.clone()));
        diagnostics.push(StepDiagnostics::of(&next, opts.gauge_sobolev));
        if n % opts.record_every == 0 || n == total {
            states.push(next.clone());
            steps.push(n);
        }
        current = next;
    }
    Ok(Trajectory {
        states,
        steps,
        diagnostics,
        record_every: opts.record_every,
    })
}

/// `max_j |D_t A0 - D_x A1|` at the middle level, centered in `t` and `x`.
fn residual_from_levels(
    grid: &GridSpec,
    prev: (&[f64], &[f64]),
    cur: (&[f64], &[f64]),
    next: (&[f64], &[f64]),
) -> f64 {
    let n = grid.len();
    let dt = grid.dt();
    let h = grid.spacing();
    let a0 = |lvl: (&[f64], &[f64]), j: usize| 0.5 * (lvl.0[j] + lvl.1[j]);
    let a1 = |lvl: (&[f64], &[f64]), j: usize| 0.5 * (lvl.1[j] - lvl.0[j]);
    (0..n)
        .map(|j| {
            let dt_a0 = (a0(next, j) - a0(prev, j)) / (2.0 * dt);
            let dx_a1 = (a1(cur, (j + 1) % n) - a1(cur, (j + n - 1) % n)) / (2.0 * h);
            (dt_a0 - dx_a1).abs()
        })
        .fold(0.0, f64::max)
}

/// Residual of `∂t A0 - ∂x A1 = 0` at stored state `index`, using its neighbours.
///
/// Needs consecutive stored states one step apart (`record_every = 1`).
pub fn constraint_residual(traj: &Trajectory, index: usize) -> Result<f64> {
    let last = traj.states.len().saturating_sub(1);
    if index < 1 || index + 1 > last {
        return Err(Error::Solver(format!(
            "constraint residual needs 1 <= index <= {}, got {index}",
            last.saturating_sub(1)
        )));
    }
    if traj.steps[index] - traj.steps[index - 1] != 1 || traj.steps[index + 1] - traj.steps[index] != 1 {
        return Err(Error::Solver(
            "constraint residual needs states recorded at every step".into(),
        ));
    }
    let (p, c, n) = (&traj.states[index - 1], &traj.states[index], &traj.states[index + 1]);
    Ok(residual_from_levels(
        &c.grid,
        (&p.a_plus, &p.a_minus),
        (&c.a_plus, &c.a_minus),
        (&n.a_plus, &n.a_minus),
    ))
}

/// Time reversal of the null system.
///
/// If `(u+, u-, A+, A-)(t, x)` solves the system then so does
/// `(conj u-, conj u+, A-, A+)(-t, x)`: conjugation undoes `t → -t` in the
/// Dirac part and swapping the `±` labels restores the direction of each
/// characteristic family. Applying this map, evolving forward, and mapping
/// back integrates the original system backwards in time.
pub fn time_reversed(state: &FieldState) -> FieldState {
    FieldState {
        grid: state.grid,
        t: -state.t,
        u_plus: state.u_minus.iter().map(|z| z.conj()).collect(),
        u_minus: state.u_plus.iter().map(|z| z.conj()).collect(),
        a_plus: state.a_minus.clone(),
        a_minus: state.a_plus.clone(),
        mass: state.mass,
    }
}

// ---------------------------------------------------------------------------
// Delgado split
// ---------------------------------------------------------------------------

/// Full solution together with its split `u = u^L + u^N`.
#[derive(Debug, Clone)]
pub struct DelgadoState {
    pub base: FieldState,
    pub ul_plus: Vec<Complex64>,
    pub ul_minus: Vec<Complex64>,
    pub un_plus: Vec<Complex64>,
    pub un_minus: Vec<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelgadoOptions {
    /// Integrator for the mass-free part. `Pc2` reproduces the full run's
    /// arithmetic (exact superposition); `ExactPhase` transports `|u^L|` exactly.
    pub linear_scheme: Scheme,
    pub record_every: usize,
}

impl Default for DelgadoOptions {
    fn default() -> Self {
        DelgadoOptions {
            linear_scheme: Scheme::Pc2,
            record_every: 1,
        }
    }
}

/// Per-step measurements of a split run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelgadoStep {
    pub t: f64,
    pub sup_un_plus: f64,
    pub sup_un_minus: f64,
    /// `max_j |u^L + u^N - u|` over both components.
    pub superposition_error: f64,
    /// `max_j ||u^L±(t, x_j)| - |f±(x_j ∓ t)||` over both components.
    pub modulus_deviation: f64,
}

#[derive(Debug, Clone)]
pub struct DelgadoRun {
    pub states: Vec<DelgadoState>,
    pub steps: Vec<DelgadoStep>,
}

impl DelgadoRun {
    pub fn max_superposition_error(&self) -> f64 {
        self.steps.iter().map(|s| s.superposition_error).fold(0.0, f64::max)
    }

    pub fn max_modulus_deviation(&self) -> f64 {
        self.steps.iter().map(|s| s.modulus_deviation).fold(0.0, f64::max)
    }

    /// `sup_t (‖u^N+‖_∞ + ‖u^N-‖_∞)`.
    pub fn sup_un(&self) -> f64 {
        self.steps
            .iter()
            .map(|s| s.sup_un_plus + s.sup_un_minus)
            .fold(0.0, f64::max)
    }
}

/// Co-evolve the mass-free part `u^L` (data `f`) and the remainder `u^N`
/// (zero data, forced by `m u∓` of the full solution) with the gauge of the
/// full `pc2` run.
pub fn evolve_delgado(state: &FieldState, t_final: f64, opts: &DelgadoOptions) -> Result<DelgadoRun> {
    if opts.record_every == 0 {
        return Err(Error::Solver("record_every must be at least 1".into()));
    }
    let grid = state.grid;
    let n = grid.len();
    let dt = grid.dt();
    let total = step_count(t_final, dt)?;
    guard(state)?;

    let zero = vec![Complex64::new(0.0, 0.0); n];
    let mut ul = (state.u_plus.clone(), state.u_minus.clone());
    let mut un = (zero.clone(), zero);
    let mod_plus: Vec<f64> = state.u_plus.iter().map(|z| z.norm()).collect();
    let mod_minus: Vec<f64> = state.u_minus.iter().map(|z| z.norm()).collect();

    let measure = |base: &FieldState, ul: &Pair, un: &Pair, step: usize| -> DelgadoStep {
        let sup = |v: &[Complex64]| v.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let mut sup_err = 0.0f64;
        let mut mod_dev = 0.0f64;
        let shift = step % n;
        for j in 0..n {
            sup_err = sup_err
                .max((ul.0[j] + un.0[j] - base.u_plus[j]).norm())
                .max((ul.1[j] + un.1[j] - base.u_minus[j]).norm());
            let src_p = (j + n - shift) % n;
            let src_m = (j + shift) % n;
            mod_dev = mod_dev
                .max((ul.0[j].norm() - mod_plus[src_p]).abs())
                .max((ul.1[j].norm() - mod_minus[src_m]).abs());
        }
        DelgadoStep {
            t: base.t,
            sup_un_plus: sup(&un.0),
            sup_un_minus: sup(&un.1),
            superposition_error: sup_err,
            modulus_deviation: mod_dev,
        }
    };

    let mut steps = vec![measure(state, &ul, &un, 0)];
    let mut states = vec![DelgadoState {
        base: state.clone(),
        ul_plus: ul.0.clone(),
        ul_minus: ul.1.clone(),
        un_plus: un.0.clone(),
        un_minus: un.1.clone(),
    }];
    let mut current = state.clone();
    for step_idx in 1..=total {
        let (next, st) = advance(&current, Scheme::Pc2)?;
        let full_old = (current.u_plus.as_slice(), current.u_minus.as_slice());
        let a_old = (current.a_plus.as_slice(), current.a_minus.as_slice());
        let a_new = (st.a_plus.as_slice(), st.a_minus.as_slice());

        let new_ul = match opts.linear_scheme {
            Scheme::Pc2 => linear_pc2(
                (&ul.0, &ul.1),
                full_old,
                &st,
                a_old,
                a_new,
                0.0,
                dt,
            ),
            Scheme::ExactPhase => phase_rotate((&ul.0, &ul.1), a_old, a_new, dt),
        };
        let new_un = linear_pc2((&un.0, &un.1), full_old, &st, a_old, a_new, current.mass, dt);
        ul = new_ul;
        un = new_un;

        steps.push(measure(&next, &ul, &un, step_idx));
        if step_idx % opts.record_every == 0 || step_idx == total {
            states.push(DelgadoState {
                base: next.clone(),
                ul_plus: ul.0.clone(),
                ul_minus: ul.1.clone(),
                un_plus: un.0.clone(),
                un_minus: un.1.clone(),
            });
        }
        current = next;
    }
    Ok(DelgadoRun { states, steps })
}

/// `pc2` for a spinor part `o` solving `(∂t ± ∂x) o± = -i(m p∓ - A∓ o±)`, with
/// the partner `p` taken from the full run's own stages.
fn linear_pc2(
    own: (&[Complex64], &[Complex64]),
    partner_old: (&[Complex64], &[Complex64]),
    full: &Stages,
    a_old: (&[f64], &[f64]),
    a_new: (&[f64], &[f64]),
    mass: f64,
    dt: f64,
) -> Pair {
    let src_old = spinor_sources(own, partner_old, a_old.0, a_old.1, mass);
    let pred = euler(own, &src_old, dt);
    let fp = (full.predicted.0.as_slice(), full.predicted.1.as_slice());
    let src_pred = spinor_sources((&pred.0, &pred.1), fp, a_new.0, a_new.1, mass);
    let sweep = trapezoid(own, &src_old, &src_pred, dt);
    let fs = (full.sweep.0.as_slice(), full.sweep.1.as_slice());
    let src_sweep = spinor_sources((&sweep.0, &sweep.1), fs, a_new.0, a_new.1, mass);
    trapezoid(own, &src_old, &src_sweep, dt)
}

// ---------------------------------------------------------------------------
// Picard iteration
// ---------------------------------------------------------------------------

/// Result of the fixed-point iteration `(u, A) ↦ (v, B)`.
#[derive(Debug, Clone)]
pub struct PicardRun {
    /// `iterates[k][n]` is iterate `k` at time level `n`.
    pub iterates: Vec<Vec<FieldState>>,
    /// `distances[k-1] = d(iterate k, iterate k-1)` for `k = 1..=K`.
    pub distances: Vec<f64>,
    /// `ρ_k = d_{k+1} / d_k`; stops once `d_k` reaches the rounding floor.
    pub factors: Vec<f64>,
}

/// Divergence threshold on a single contraction factor.
pub const PICARD_DIVERGENCE: f64 = 10.0;

/// Distances below this multiple of the data scale are treated as converged
/// to rounding and no longer produce contraction factors.
pub const PICARD_ROUNDING_FLOOR: f64 = 1e-12;

/// Sup over time levels of the grid `L²` distance of all four arrays.
pub fn picard_distance(a: &[FieldState], b: &[FieldState]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let mut sum = 0.0;
            for j in 0..x.grid.len() {
                sum += (x.u_plus[j] - y.u_plus[j]).norm_sqr()
                    + (x.u_minus[j] - y.u_minus[j]).norm_sqr()
                    + (x.a_plus[j] - y.a_plus[j]).powi(2)
                    + (x.a_minus[j] - y.a_minus[j]).powi(2);
            }
            (x.grid.spacing() * sum).sqrt()
        })
        .fold(0.0, f64::max)
}

fn free_levels(data: &FieldState, levels: usize) -> Vec<FieldState> {
    let dt = data.grid.dt();
    (0..levels)
        .map(|n| {
            let s = n as isize;
            FieldState {
                grid: data.grid,
                t: data.t + n as f64 * dt,
                u_plus: crate::lattice::shifted(&data.u_plus, s),
                u_minus: crate::lattice::shifted(&data.u_minus, -s),
                a_plus: crate::lattice::shifted(&data.a_plus, s),
                a_minus: crate::lattice::shifted(&data.a_minus, -s),
                mass: data.mass,
            }
        })
        .collect()
}

/// One application of the map: solve the linear characteristic problem with
/// sources built from `prev` at every level (trapezoid along characteristics).
#[allow(clippy::needless_range_loop)]
fn picard_map(data: &FieldState, prev: &[FieldState]) -> Vec<FieldState> {
    let n = data.grid.len();
    let dt = data.grid.dt();
    let half = 0.5 * dt;
    let sources: Vec<(Pair, Vec<f64>)> = prev
        .iter()
        .map(|s| {
            let own = (s.u_plus.as_slice(), s.u_minus.as_slice());
            (
                spinor_sources(own, own, &s.a_plus, &s.a_minus, s.mass),
                gauge_source(&s.u_plus, &s.u_minus),
            )
        })
        .collect();
    let mut out = Vec::with_capacity(prev.len());
    out.push(data.clone());
    for lvl in 1..prev.len() {
        let last = out.last().unwrap();
        let (so, go) = &sources[lvl - 1];
        let (sn, gn) = &sources[lvl];
        let mut next = last.clone();
        next.t = data.t + lvl as f64 * dt;
        for j in 0..n {
            let kp = upstream_plus(j, n);
            let km = upstream_minus(j, n);
            next.u_plus[j] = last.u_plus[kp] + (so.0[kp] + sn.0[j]) * half;
            next.u_minus[j] = last.u_minus[km] + (so.1[km] + sn.1[j]) * half;
            next.a_plus[j] = last.a_plus[kp] - half * (go[kp] + gn[j]);
            next.a_minus[j] = last.a_minus[km] + half * (go[km] + gn[j]);
        }
        out.push(next);
    }
    out
}

/// Run `iterations` Picard steps on `[0, t_final]`.
pub fn picard_iterate(data: &FieldState, iterations: usize, t_final: f64) -> Result<PicardRun> {
    if iterations < 2 {
        return Err(Error::Solver(format!(
            "Picard iteration needs at least 2 iterations, got {iterations}"
        )));
    }
    guard(data)?;
    let levels = step_count(t_final, data.grid.dt())? + 1;
    let scale = picard_distance(std::slice::from_ref(data), &[FieldState::zeros(data.grid, data.mass)]);
    let floor = PICARD_ROUNDING_FLOOR * scale;

    let mut iterates = vec![free_levels(data, levels)];
    let mut distances = Vec::with_capacity(iterations);
    let mut factors = Vec::new();
    let mut converged = scale == 0.0;
    for k in 1..=iterations {
        let next = picard_map(data, iterates.last().unwrap());
        for s in &next {
            guard(s)?;
        }
        let d = picard_distance(&next, iterates.last().unwrap());
        if let Some(&prev_d) = distances.last() {
            if !converged && prev_d > floor {
                let rho = d / prev_d;
                if rho > PICARD_DIVERGENCE {
                    return Err(Error::Divergence {
                        iterate: k,
                        factor: rho,
                    });
                }
                factors.push(rho);
            } else {
                converged = true;
            }
        }
        distances.push(d);
        iterates.push(next);
    }
    Ok(PicardRun {
        iterates,
        distances,
        factors,
    })
}

// ---------------------------------------------------------------------------
// Gauge growth
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaugeBoundRecord {
    pub t: f64,
    pub a_plus_hr: f64,
    pub a_minus_hr: f64,
    /// Trapezoid of `‖u+ conj(u-)‖_{L²}` over `[0, t]`.
    pub source_integral: f64,
    /// `‖a+‖_{H^r} + ‖a-‖_{H^r}`.
    pub data_term: f64,
    /// `(‖A+‖ + ‖A-‖) / (data_term + source_integral)`; `None` when both vanish.
    pub ratio: Option<f64>,
}

/// `‖A±(t)‖_{H^r}` against the data and the integrated bilinear source, at each stored step.
pub fn gauge_bound_report(traj: &Trajectory, r: f64) -> Result<Vec<GaugeBoundRecord>> {
    if !(r > -0.5 && r <= 0.0) {
        return Err(Error::Solver(format!("gauge exponent must lie in (-1/2, 0], got {r}")));
    }
    let dt = traj.initial().grid.dt();
    let mut cumulative = Vec::with_capacity(traj.diagnostics.len());
    let mut acc = 0.0;
    cumulative.push(0.0);
    for w in traj.diagnostics.windows(2) {
        acc += 0.5 * dt * (w[0].source_l2 + w[1].source_l2);
        cumulative.push(acc);
    }
    let norms = |s: &FieldState| {
        (
            spaces::sobolev_norm_real(&s.grid, &s.a_plus, r),
            spaces::sobolev_norm_real(&s.grid, &s.a_minus, r),
        )
    };
    let (d0p, d0m) = norms(traj.initial());
    let data_term = d0p + d0m;
    Ok(traj
        .states
        .iter()
        .zip(&traj.steps)
        .map(|(s, &n)| {
            let (ap, am) = norms(s);
            let denom = data_term + cumulative[n];
            GaugeBoundRecord {
                t: s.t,
                a_plus_hr: ap,
                a_minus_hr: am,
                source_integral: cumulative[n],
                data_term,
                ratio: if denom > 0.0 { Some((ap + am) / denom) } else { None },
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{make_grid, make_state, shifted, DataSpec};

    fn c0() -> Complex64 {
        Complex64::new(0.0, 0.0)
    }

    fn gaussian_state(n: usize, mass: f64) -> FieldState {
        let g = make_grid(16.0, n).unwrap();
        make_state(
            g,
            &DataSpec::gaussian(-2.0, 1.5, 1.0),
            &DataSpec::gaussian(2.0, 1.5, 0.8),
            &DataSpec::gaussian(0.0, 2.0, 0.5),
            &DataSpec::gaussian(1.0, 2.0, -0.3),
            mass,
        )
        .unwrap()
    }

    fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn free_step_is_a_shift() {
        let g = make_grid(8.0, 128).unwrap();
        let s = make_state(
            g,
            &DataSpec::gaussian(-1.0, 1.0, 1.0),
            &DataSpec::zero(),
            &DataSpec::zero(),
            &DataSpec::zero(),
            0.0,
        )
        .unwrap();
        let next = step(&s).unwrap();
        assert_eq!(next.u_plus, shifted(&s.u_plus, 1));
        assert!(next.a_plus.iter().all(|a| *a == 0.0));

        // opposite movers with no overlap in their supports shift independently
        let mut s2 = s.clone();
        s2.u_plus = vec![c0(); 128];
        s2.u_minus = s.u_plus.clone();
        let next = step(&s2).unwrap();
        assert_eq!(next.u_minus, shifted(&s.u_plus, -1));
    }

    #[test]
    fn zero_is_a_fixed_point() {
        let g = make_grid(4.0, 32).unwrap();
        let z = FieldState::zeros(g, 1.0);
        let traj = evolve(&z, 2.0, 1).unwrap();
        for s in &traj.states {
            assert!(s.u_plus.iter().chain(&s.u_minus).all(|v| v.norm() == 0.0));
            assert!(s.a_plus.iter().chain(&s.a_minus).all(|v| *v == 0.0));
        }
        assert!(traj.diagnostics.iter().all(|d| d.charge == 0.0));
    }

    #[test]
    fn evolve_bookkeeping() {
        let s = gaussian_state(64, 1.0);
        let t0 = evolve(&s, 0.0, 1).unwrap();
        assert_eq!(t0.states.len(), 1);
        assert_eq!(t0.diagnostics.len(), 1);

        let dt = s.grid.dt();
        let traj = evolve(&s, 10.0 * dt, 3).unwrap();
        assert_eq!(traj.steps, vec![0, 3, 6, 9, 10]);
        assert_eq!(traj.diagnostics.len(), 11);
        assert!((traj.last().t - 10.0 * dt).abs() < 1e-12);
        assert!(traj.diagnostics[0].constraint_residual.is_none());
        assert!(traj.diagnostics[5].constraint_residual.is_some());
        assert!(traj.diagnostics[10].constraint_residual.is_none());

        assert!(matches!(evolve(&s, 0.3 * dt, 1), Err(Error::Incommensurate { .. })));
        assert!(evolve(&s, dt, 0).is_err());
    }

    #[test]
    fn free_evolution_is_exact() {
        let g = make_grid(16.0, 512).unwrap();
        let s = make_state(
            g,
            &DataSpec::gaussian(-4.0, 1.0, 1.0),
            &DataSpec::zero(),
            &DataSpec::zero(),
            &DataSpec::zero(),
            0.0,
        )
        .unwrap();
        let traj = evolve(&s, 2.0, 1000).unwrap();
        let steps = (2.0 / g.dt()) as isize;
        assert_eq!(traj.last().u_plus, shifted(&s.u_plus, steps));
    }

    #[test]
    fn non_finite_input_is_reported() {
        let mut s = gaussian_state(32, 1.0);
        s.u_minus[7] = Complex64::new(f64::INFINITY, 0.0);
        match step(&s) {
            Err(Error::NonFinite { field, index, .. }) => {
                assert_eq!(field, "u_minus");
                assert_eq!(index, 7);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn blow_up_guard() {
        let mut s = gaussian_state(32, 0.0);
        s.a_plus[3] = 2e8;
        assert!(matches!(evolve(&s, s.grid.dt(), 1), Err(Error::BlowUp { .. })));
    }

    fn self_convergence_order(mass: f64, t_final: f64) -> f64 {
        let runs: Vec<FieldState> = [256usize, 512, 1024]
            .iter()
            .map(|&n| evolve(&gaussian_state(n, mass), t_final, 100000).unwrap().last().clone())
            .collect();
        let err = |c: &FieldState, f: &FieldState| {
            (0..c.grid.len())
                .map(|j| {
                    (c.u_plus[j] - f.u_plus[2 * j])
                        .norm()
                        .max((c.u_minus[j] - f.u_minus[2 * j]).norm())
                        .max((c.a_plus[j] - f.a_plus[2 * j]).abs())
                        .max((c.a_minus[j] - f.a_minus[2 * j]).abs())
                })
                .fold(0.0, f64::max)
        };
        let e1 = err(&runs[0], &runs[1]);
        let e2 = err(&runs[1], &runs[2]);
        (e1 / e2).log2()
    }

    #[test]
    fn second_order_self_convergence() {
        let p = self_convergence_order(1.0, 1.0);
        assert!((1.8..=2.2).contains(&p), "order {p}");
    }

    #[test]
    fn charge_drift_refines_quadratically() {
        let drift = |n: usize| {
            let s = gaussian_state(n, 1.0);
            let traj = evolve(&s, 4.0, 100000).unwrap();
            let q0 = traj.diagnostics[0].charge;
            (traj.diagnostics.last().unwrap().charge - q0).abs() / q0
        };
        // The trapezoid sweeps conserve charge better than the solution error
        // suggests: the leading defect is the m⁴ T dt³ / 4 rotation residue.
        let (d1, d2) = (drift(256), drift(512));
        let ratio = d1 / d2;
        assert!(ratio >= 2f64.powf(1.8), "drift ratio {ratio} ({d1:e}, {d2:e})");
    }

    #[test]
    fn exact_phase_matches_free_evolve_without_gauge() {
        let g = make_grid(8.0, 128).unwrap();
        let s = make_state(
            g,
            &DataSpec::gaussian(0.0, 1.0, 1.0),
            &DataSpec::zero(),
            &DataSpec::zero(),
            &DataSpec::zero(),
            0.0,
        )
        .unwrap();
        let a = exact_phase_evolve(&s, 1.0).unwrap();
        let b = evolve(&s, 1.0, 1).unwrap();
        assert_eq!(a.last().u_plus, b.last().u_plus);
        assert_eq!(a.last().a_minus, b.last().a_minus);
    }

    #[test]
    fn exact_phase_requires_massless() {
        let s = gaussian_state(32, 0.5);
        assert!(exact_phase_evolve(&s, 1.0).is_err());
    }

    #[test]
    fn exact_phase_transports_modulus() {
        let s = gaussian_state(256, 0.0);
        let t = 3.0;
        let traj = exact_phase_evolve(&s, t).unwrap();
        let n = (t / s.grid.dt()).round() as isize;
        let want_p = shifted(&s.u_plus, n);
        let want_m = shifted(&s.u_minus, -n);
        let fin = traj.last();
        for j in 0..256 {
            assert!((fin.u_plus[j].norm() - want_p[j].norm()).abs() <= 1e-12);
            assert!((fin.u_minus[j].norm() - want_m[j].norm()).abs() <= 1e-12);
        }
        let q0 = traj.diagnostics[0].charge;
        let q1 = traj.diagnostics.last().unwrap().charge;
        assert!(((q1 - q0) / q0).abs() <= 1e-12);
    }

    #[test]
    fn constant_gauge_gives_closed_form_phase() {
        let g = make_grid(8.0, 128).unwrap();
        let cst = 0.7;
        let s = make_state(
            g,
            &DataSpec::gaussian(-1.0, 1.0, 1.0),
            &DataSpec::zero(),
            &DataSpec::zero(),
            &DataSpec::gaussian(0.0, 1e6, cst),
            0.0,
        )
        .unwrap();
        let t = 2.0;
        let traj = exact_phase_evolve(&s, t).unwrap();
        let steps = (t / g.dt()).round() as isize;
        let moved = shifted(&s.u_plus, steps);
        let fin = traj.last();
        for (got, m) in fin.u_plus.iter().zip(&moved) {
            // A- is constant up to the 1e-12-level curvature of the very wide Gaussian.
            let want = m * Complex64::from_polar(1.0, s.a_minus[0] * t);
            assert!((got - want).norm() < 1e-10);
        }
        assert!((s.a_minus[0] - cst).abs() < 1e-9);
    }

    #[test]
    fn constraint_residual_cases() {
        let g = make_grid(4.0, 32).unwrap();
        let z = FieldState::zeros(g, 1.0);
        let traj = evolve(&z, 10.0 * g.dt(), 1).unwrap();
        assert_eq!(constraint_residual(&traj, 5).unwrap(), 0.0);
        assert!(constraint_residual(&traj, 0).is_err());
        assert!(constraint_residual(&traj, 10).is_err());

        let mut s = FieldState::zeros(g, 1.0);
        s.a_plus = vec![0.4; 32];
        s.a_minus = vec![0.4; 32];
        let traj = evolve(&s, 10.0 * g.dt(), 1).unwrap();
        assert_eq!(constraint_residual(&traj, 3).unwrap(), 0.0);

        let sparse = evolve(&s, 10.0 * g.dt(), 2).unwrap();
        assert!(constraint_residual(&sparse, 2).is_err());
    }

    #[test]
    fn constraint_residual_refines() {
        let res = |n: usize| {
            let s = gaussian_state(n, 1.0);
            let dt = s.grid.dt();
            let k = (1.0 / dt).round() as usize;
            let traj = evolve(&s, (k + 1) as f64 * dt, 1).unwrap();
            constraint_residual(&traj, k).unwrap()
        };
        let ratio = res(256) / res(512);
        assert!(ratio >= 2f64.powf(1.8), "ratio {ratio}");
    }

    #[test]
    fn delgado_massless_has_no_remainder() {
        let s = gaussian_state(128, 0.0);
        let run = evolve_delgado(&s, 2.0, &DelgadoOptions::default()).unwrap();
        for st in &run.states {
            assert!(st.un_plus.iter().chain(&st.un_minus).all(|z| z.norm() == 0.0));
            assert_eq!(st.ul_plus, st.base.u_plus);
            assert_eq!(st.ul_minus, st.base.u_minus);
        }
    }

    #[test]
    fn delgado_superposition_is_exact() {
        let s = gaussian_state(256, 1.0);
        let run = evolve_delgado(&s, 2.0, &DelgadoOptions::default()).unwrap();
        assert!(run.max_superposition_error() <= 1e-12);
        assert!(run.sup_un() > 0.0);
    }

    #[test]
    fn delgado_exact_phase_modulus() {
        let s = gaussian_state(256, 1.0);
        let opts = DelgadoOptions {
            linear_scheme: Scheme::ExactPhase,
            record_every: 1,
        };
        let run = evolve_delgado(&s, 2.0, &opts).unwrap();
        assert!(run.max_modulus_deviation() <= 1e-12);
    }

    #[test]
    fn remainder_constant_is_stable_under_refinement() {
        let constant = |n: usize, amp: f64| {
            let g = make_grid(16.0, n).unwrap();
            let s = make_state(
                g,
                &DataSpec::gaussian(-2.0, 1.5, amp),
                &DataSpec::gaussian(2.0, 1.5, amp),
                &DataSpec::gaussian(0.0, 2.0, 0.5),
                &DataSpec::gaussian(1.0, 2.0, -0.3),
                1.0,
            )
            .unwrap();
            let run = evolve_delgado(&s, 2.0, &DelgadoOptions::default()).unwrap();
            let data = spaces::l2_norm(&g, &s.u_plus) + spaces::l2_norm(&g, &s.u_minus);
            run.sup_un() / data
        };
        let c_ref = constant(256, 0.5);
        let c_fine = constant(512, 0.5);
        let c_big = constant(256, 1.0);
        assert!(((c_fine - c_ref) / c_ref).abs() <= 0.1, "{c_ref} vs {c_fine}");
        assert!(((c_big - c_ref) / c_ref).abs() <= 0.1, "{c_ref} vs {c_big}");
    }

    fn small_state(n: usize) -> FieldState {
        let g = make_grid(16.0, n).unwrap();
        let raw = make_state(
            g,
            &DataSpec::gaussian(-1.0, 1.0, 1.0),
            &DataSpec::gaussian(1.0, 1.0, 1.0),
            &DataSpec::gaussian(0.0, 1.5, 1.0),
            &DataSpec::gaussian(0.5, 1.5, 1.0),
            0.01,
        )
        .unwrap();
        let f = (2.0 * charge(&raw)).sqrt();
        let a = spaces::l2_norm_real(&g, &raw.a_plus) + spaces::l2_norm_real(&g, &raw.a_minus);
        let scale = 0.01 / (f + a);
        let mut s = raw;
        s.u_plus.iter_mut().chain(s.u_minus.iter_mut()).for_each(|z| *z *= scale);
        s.a_plus.iter_mut().chain(s.a_minus.iter_mut()).for_each(|v| *v *= scale);
        s
    }

    #[test]
    fn picard_zero_data() {
        let g = make_grid(4.0, 32).unwrap();
        let run = picard_iterate(&FieldState::zeros(g, 0.1), 4, 1.0).unwrap();
        assert!(run.factors.is_empty());
        assert!(run.distances.iter().all(|d| *d == 0.0));
        assert!(picard_iterate(&FieldState::zeros(g, 0.1), 1, 1.0).is_err());
    }

    #[test]
    fn picard_contracts_for_small_data() {
        let s = small_state(512);
        let run = picard_iterate(&s, 6, 1.0).unwrap();
        assert!(!run.factors.is_empty());
        assert!(run.factors.iter().all(|r| *r <= 0.5), "{:?}", run.factors);
        let traj = evolve(&s, 1.0, 1).unwrap();
        let d = picard_distance(run.iterates.last().unwrap(), &traj.states);
        assert!(d <= 1e-4, "distance to evolve {d}");
    }

    #[test]
    fn picard_detects_divergence() {
        let g = make_grid(16.0, 64).unwrap();
        let s = make_state(
            g,
            &DataSpec::gaussian(0.0, 2.0, 30.0),
            &DataSpec::gaussian(0.0, 2.0, 30.0),
            &DataSpec::gaussian(0.0, 2.0, 30.0),
            &DataSpec::gaussian(0.0, 2.0, 30.0),
            30.0,
        )
        .unwrap();
        match picard_iterate(&s, 8, 4.0) {
            Err(Error::Divergence { .. }) | Err(Error::BlowUp { .. }) => {}
            other => panic!("expected divergence, got {:?}", other.map(|r| r.factors)),
        }
    }

    #[test]
    fn gauge_bound_without_spinor_is_flat() {
        let g = make_grid(8.0, 128).unwrap();
        let s = make_state(
            g,
            &DataSpec::zero(),
            &DataSpec::zero(),
            &DataSpec::gaussian(0.0, 1.0, 1.0),
            &DataSpec::gaussian(2.0, 0.7, -0.4),
            1.0,
        )
        .unwrap();
        let traj = evolve(&s, 3.0, 4).unwrap();
        let rep = gauge_bound_report(&traj, -0.25).unwrap();
        for r in &rep {
            assert!(r.ratio.unwrap() <= 1.0 + 1e-9);
            assert_eq!(r.source_integral, 0.0);
        }
        assert!(gauge_bound_report(&traj, -0.5).is_err());
        assert!(gauge_bound_report(&traj, 0.1).is_err());
    }

    #[test]
    fn gauge_bound_ratio_and_bilinear_scaling() {
        let s = gaussian_state(512, 1.0);
        let traj = evolve(&s, 4.0, 8).unwrap();
        let rep = gauge_bound_report(&traj, -0.25).unwrap();
        let worst = rep.iter().filter_map(|r| r.ratio).fold(0.0, f64::max);
        assert!(worst <= 3.0, "ratio {worst}");

        let mut doubled = s.clone();
        doubled.u_plus.iter_mut().chain(doubled.u_minus.iter_mut()).for_each(|z| *z *= 2.0);
        let dt = s.grid.dt();
        let t_small = 4.0 * dt;
        let a = gauge_bound_report(&evolve(&s, t_small, 1).unwrap(), -0.25).unwrap();
        let b = gauge_bound_report(&evolve(&doubled, t_small, 1).unwrap(), -0.25).unwrap();
        let ratio = b.last().unwrap().source_integral / a.last().unwrap().source_integral;
        assert!((ratio - 4.0).abs() < 0.2, "ratio {ratio}");
    }

    #[test]
    fn time_reversal_returns_to_data() {
        let err_for = |n: usize| {
            let s = gaussian_state(n, 1.0);
            let fwd = evolve(&s, 2.0, 100000).unwrap();
            let back = evolve(&time_reversed(fwd.last()), 2.0, 100000).unwrap();
            let r = time_reversed(back.last());
            max_diff(&r.u_plus, &s.u_plus).max(max_diff(&r.u_minus, &s.u_minus))
        };
        let (e1, e2) = (err_for(256), err_for(512));
        let order = (e1 / e2).log2();
        assert!(e1 < 1e-2);
        assert!(order >= 1.8, "order {order}");
    }

    #[test]
    fn reversal_is_an_involution() {
        let s = gaussian_state(64, 1.0);
        let rr = time_reversed(&time_reversed(&s));
        assert_eq!(rr.u_plus, s.u_plus);
        assert_eq!(rr.a_minus, s.a_minus);
    }
}
