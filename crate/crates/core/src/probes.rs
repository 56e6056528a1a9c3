//! Randomized ratio probes for the product, dilation, energy and bilinear estimates.
//!
//! Each probe draws a seeded ensemble, evaluates a ratio `LHS / RHS` per
//! member and aggregates quantiles per resolution. Members are evaluated in
//! parallel but collected in seed order, so reports do not depend on the
//! thread count.

use std::fmt::{self, Write as _};
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lattice::GridSpec;
use crate::par;
use crate::spaces::{
    self, bracket, dealiased_product, frequency, from_coefficients, bin_mode, fourier_coefficients,
    lp_block_coefficients, prec_condition, GridFunction, Sign, SpaceTimeBlock, RANDOM_DATA_DELTA,
};

/// Smallest ensemble a report accepts.
pub const MIN_ENSEMBLE: usize = 30;

/// Trichotomy threshold: `M ≪ K` means `M ≤ K / 8`.
pub const TRICHOTOMY_FACTOR: u64 = 8;

/// Whether a probe's hypotheses hold, so that its numbers may back an assertion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeMode {
    Asserting,
    Exploratory,
}

impl ProbeMode {
    pub fn name(&self) -> &'static str {
        match self {
            ProbeMode::Asserting => "asserting",
            ProbeMode::Exploratory => "exploratory",
        }
    }

    fn gate(ok: bool) -> Self {
        if ok {
            ProbeMode::Asserting
        } else {
            ProbeMode::Exploratory
        }
    }
}

/// Ensemble statistics of one quantity at one resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeRow {
    pub exponents: String,
    pub quantity: String,
    pub n: usize,
    pub ensemble: usize,
    pub q50: f64,
    pub q90: f64,
    pub max: f64,
    pub seed: u64,
    /// Optional extra figure, e.g. an operator-norm estimate.
    pub estimate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    pub probe: String,
    pub mode: ProbeMode,
    pub rows: Vec<ProbeRow>,
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

impl ProbeRow {
    /// Summarize `values`; rejects non-finite or negative entries and small ensembles.
    pub fn from_values(
        exponents: impl Into<String>,
        quantity: impl Into<String>,
        n: usize,
        seed: u64,
        values: &[f64],
    ) -> Result<Self> {
        let quantity = quantity.into();
        if values.len() < MIN_ENSEMBLE {
            return Err(Error::Probe(format!(
                "{quantity}: ensemble of {} is below the minimum {MIN_ENSEMBLE}",
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::Probe(format!("{quantity}: invalid ratio {bad}")));
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(|a, b| a.total_cmp(b));
        Ok(ProbeRow {
            exponents: exponents.into(),
            quantity,
            n,
            ensemble: values.len(),
            q50: quantile(&sorted, 0.5),
            q90: quantile(&sorted, 0.9),
            max: *sorted.last().unwrap(),
            seed,
            estimate: None,
        })
    }
}

impl ProbeReport {
    pub fn rows_for<'a>(&'a self, quantity: &'a str) -> impl Iterator<Item = &'a ProbeRow> + 'a {
        self.rows.iter().filter(move |r| r.quantity == quantity)
    }

    pub fn row(&self, quantity: &str, n: usize) -> Option<&ProbeRow> {
        self.rows.iter().find(|r| r.quantity == quantity && r.n == n)
    }

    pub const CSV_HEADER: &'static str = "probe,mode,exponents,quantity,N,ensemble,q50,q90,max,seed,estimate";

    pub fn csv_rows(&self) -> String {
        let mut out = String::new();
        for r in &self.rows {
            let est = r.estimate.map(|e| format!("{e:.12e}")).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},\"{}\",{},{},{},{:.12e},{:.12e},{:.12e},{},{}",
                self.probe,
                self.mode.name(),
                r.exponents,
                r.quantity,
                r.n,
                r.ensemble,
                r.q50,
                r.q90,
                r.max,
                r.seed,
                est
            );
        }
        out
    }

    pub fn to_csv(&self) -> String {
        format!("# schema=1\n{}\n{}", Self::CSV_HEADER, self.csv_rows())
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        f.write_all(self.to_csv().as_bytes()).map_err(|e| Error::io(path, e))
    }
}

/// Write several reports into one CSV.
pub fn write_reports_csv(path: &Path, reports: &[ProbeReport]) -> Result<()> {
    let mut body = format!("# schema=1\n{}\n", ProbeReport::CSV_HEADER);
    for r in reports {
        body.push_str(&r.csv_rows());
    }
    std::fs::write(path, body).map_err(|e| Error::io(path, e))
}

impl fmt::Display for ProbeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} ({})", self.probe, self.mode.name())?;
        writeln!(
            f,
            "  {:<24} {:<18} {:>6} {:>5} {:>12} {:>12} {:>12} {:>12}",
            "exponents", "quantity", "N", "ens", "q50", "q90", "max", "estimate"
        )?;
        for r in &self.rows {
            let est = r.estimate.map(|e| format!("{e:12.5e}")).unwrap_or_else(|| format!("{:>12}", "-"));
            writeln!(
                f,
                "  {:<24} {:<18} {:>6} {:>5} {:12.5e} {:12.5e} {:12.5e} {}",
                r.exponents, r.quantity, r.n, r.ensemble, r.q50, r.q90, r.max, est
            )?;
        }
        Ok(())
    }
}

/// Seed of stream `stream` for ensemble member `member` (splitmix64 finalizer).
pub fn member_seed(base: u64, member: u64, stream: u64) -> u64 {
    let mut z = base
        .wrapping_add(member.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(stream.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

// ---------------------------------------------------------------------------
// Random functions and the product probe
// ---------------------------------------------------------------------------

/// Random series with `⟨ξ⟩^{-(s+1/2+δ)}` decay normalized to `‖·‖_{H^s} = 1`.
pub fn random_function(grid: &GridSpec, s: f64, seed: u64) -> GridFunction {
    let values = spaces::random_sobolev_samples(grid, s, seed, 1.0, false);
    GridFunction { grid: *grid, values }
}

/// Same decay, but with all phases aligned at `center` so the partial sums
/// concentrate there. Normalized to `‖·‖_{H^s} = 1`.
pub fn coherent_function(grid: &GridSpec, s: f64, seed: u64, center: f64) -> GridFunction {
    let n = grid.len();
    let r = spaces::gaussians_by_mode(n, seed);
    let coeffs: Vec<Complex64> = (0..n)
        .map(|i| {
            let xi = frequency(grid, bin_mode(i, n));
            let w = bracket(xi).powf(-(s + 0.5 + RANDOM_DATA_DELTA));
            Complex64::from_polar(r[i].norm() * w, -xi * center)
        })
        .collect();
    let f = GridFunction {
        grid: *grid,
        values: from_coefficients(grid, &coeffs),
    };
    let norm = f.sobolev_norm(s);
    f.scaled(1.0 / norm)
}

/// How the two factors of a product pair are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairFamily {
    /// Independent random phases: both factors are spread over the whole domain.
    Independent,
    /// Aligned phases at a shared random point: both factors peak together,
    /// which is what a product estimate has to survive.
    Coherent,
}

impl PairFamily {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "independent" => Some(PairFamily::Independent),
            "coherent" => Some(PairFamily::Coherent),
            _ => None,
        }
    }
}

/// Pair number `member` of a seeded ensemble.
pub fn product_pair(
    grid: &GridSpec,
    a: f64,
    b: f64,
    family: PairFamily,
    seed: u64,
    member: u64,
) -> (GridFunction, GridFunction) {
    let sf = member_seed(seed, member, 0);
    let sg = member_seed(seed, member, 1);
    match family {
        PairFamily::Independent => (random_function(grid, a, sf), random_function(grid, b, sg)),
        PairFamily::Coherent => {
            let mut rng = ChaCha8Rng::seed_from_u64(member_seed(seed, member, 2));
            let l = grid.half_width();
            let center = rng.random_range(-l..l);
            (
                coherent_function(grid, a, sf, center),
                coherent_function(grid, b, sg, center),
            )
        }
    }
}

/// `‖fg‖_{H^c} / (‖f‖_{H^a} ‖g‖_{H^b})` with the exact (dealiased) product.
pub fn pair_ratio(f: &GridFunction, g: &GridFunction, a: f64, b: f64, c: f64) -> f64 {
    let fg = dealiased_product(&f.grid, &f.values, &g.values);
    fg.sobolev_norm(c) / (f.sobolev_norm(a) * g.sobolev_norm(b))
}

fn exps3(a: f64, b: f64, c: f64) -> String {
    format!("a={a},b={b},c={c}")
}

/// Product ratios at `grid` and its refinement, coherent pairs.
pub fn product_ratio(a: f64, b: f64, c: f64, grid: &GridSpec, ensemble: usize, seed: u64) -> Result<ProbeReport> {
    product_ratio_at(a, b, c, &[*grid, grid.refined()], ensemble, seed, PairFamily::Coherent)
}

/// Product ratios on each grid in `grids`.
pub fn product_ratio_at(
    a: f64,
    b: f64,
    c: f64,
    grids: &[GridSpec],
    ensemble: usize,
    seed: u64,
    family: PairFamily,
) -> Result<ProbeReport> {
    let mut rows = Vec::new();
    for grid in grids {
        let ratios = par::map_indexed(ensemble, |i| {
            let (f, g) = product_pair(grid, a, b, family, seed, i as u64);
            pair_ratio(&f, &g, a, b, c)
        });
        rows.push(ProbeRow::from_values(exps3(a, b, c), "ratio", grid.len(), seed, &ratios)?);
    }
    Ok(ProbeReport {
        probe: "product".into(),
        mode: ProbeMode::gate(prec_condition(a, b, c)),
        rows,
    })
}

/// `q90(N_{i+1}) / q90(N_i)` for consecutive rows of `quantity`.
pub fn q90_growth(report: &ProbeReport, quantity: &str) -> Vec<f64> {
    let rows: Vec<&ProbeRow> = report.rows_for(quantity).collect();
    rows.windows(2).map(|w| w[1].q90 / w[0].q90).collect()
}

// ---------------------------------------------------------------------------
// Besov product and trichotomy
// ---------------------------------------------------------------------------

/// The three pieces of `fg` on the refined grid, as coefficient arrays.
#[derive(Debug, Clone)]
pub struct Trichotomy {
    pub grid: GridSpec,
    pub product: Vec<Complex64>,
    pub low_high: Vec<Complex64>,
    pub high_low: Vec<Complex64>,
    pub high_high: Vec<Complex64>,
}

impl Trichotomy {
    /// `max_k |LH + HL + HH - fg|_k / max_k |fg|_k`.
    pub fn reconstruction_error(&self) -> f64 {
        let scale = self.product.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let err = (0..self.product.len())
            .map(|k| (self.low_high[k] + self.high_low[k] + self.high_high[k] - self.product[k]).norm())
            .fold(0.0, f64::max);
        if scale > 0.0 {
            err / scale
        } else {
            err
        }
    }
}

fn block_pieces(grid: &GridSpec, values: &[Complex64]) -> Vec<(u64, Vec<Complex64>)> {
    let coeffs = fourier_coefficients(grid, values);
    spaces::dyadic_blocks(grid)
        .into_iter()
        .map(|b| (b, from_coefficients(grid, &lp_block_coefficients(grid, &coeffs, b))))
        .collect()
}

/// Split `fg` by the dyadic blocks `(M, K)` of `(f, g)`: low-high when
/// `M ≤ K/8`, high-low when `K ≤ M/8`, high-high otherwise.
pub fn trichotomy(f: &GridFunction, g: &GridFunction) -> Trichotomy {
    let grid = f.grid;
    let fine = grid.refined();
    let n = fine.len();
    let fb = block_pieces(&grid, &f.values);
    let gb = block_pieces(&grid, &g.values);
    let zero = vec![Complex64::new(0.0, 0.0); grid.len()];
    let mut lh = vec![Complex64::new(0.0, 0.0); n];
    let mut hl = lh.clone();
    let mut hh = lh.clone();
    let add = |acc: &mut Vec<Complex64>, x: &[Complex64], y: &[Complex64]| {
        let p = dealiased_product(&grid, x, y);
        for (a, v) in acc.iter_mut().zip(fourier_coefficients(&fine, &p.values)) {
            *a += v;
        }
    };
    // Group f-blocks by class for each g-block to keep the product count linear.
    for (kb, gk) in &gb {
        let mut low = zero.clone();
        let mut high = zero.clone();
        let mut mid = zero.clone();
        for (mb, fm) in &fb {
            let target = if mb * TRICHOTOMY_FACTOR <= *kb {
                &mut low
            } else if kb * TRICHOTOMY_FACTOR <= *mb {
                &mut high
            } else {
                &mut mid
            };
            for (t, v) in target.iter_mut().zip(fm) {
                *t += v;
            }
        }
        add(&mut lh, &low, gk);
        add(&mut hl, &high, gk);
        add(&mut hh, &mid, gk);
    }
    let product = fourier_coefficients(&fine, &dealiased_product(&grid, &f.values, &g.values).values);
    Trichotomy {
        grid: fine,
        product,
        low_high: lh,
        high_low: hl,
        high_high: hh,
    }
}

fn coeff_sobolev_sq(grid: &GridSpec, coeffs: &[Complex64], s: f64) -> f64 {
    let n = grid.len();
    coeffs
        .iter()
        .enumerate()
        .map(|(i, z)| bracket(frequency(grid, bin_mode(i, n))).powf(2.0 * s) * z.norm_sqr())
        .sum::<f64>()
        / grid.period()
}

/// `‖fg‖_{H^s} / (‖f‖_{B^{1/2}_{2,1}} ‖g‖_{H^s})` with the trichotomy shares
/// `‖piece‖²_{H^s} / ‖fg‖²_{H^s}` and the reconstruction error, at `grid` and its refinement.
pub fn besov_product_probe(s: f64, grid: &GridSpec, ensemble: usize, seed: u64) -> Result<ProbeReport> {
    besov_product_probe_at(s, &[*grid, grid.refined()], ensemble, seed)
}

pub fn besov_product_probe_at(s: f64, grids: &[GridSpec], ensemble: usize, seed: u64) -> Result<ProbeReport> {
    if !(s > -0.5 && s < 0.5) {
        return Err(Error::Probe(format!("Besov product probe needs -1/2 < s < 1/2, got {s}")));
    }
    let exps = format!("s={s}");
    let mut rows = Vec::new();
    for grid in grids {
        let members = par::map_indexed(ensemble, |i| {
            let (f, g) = product_pair(grid, 0.5, s, PairFamily::Coherent, seed, i as u64);
            let tri = trichotomy(&f, &g);
            let total = coeff_sobolev_sq(&tri.grid, &tri.product, s);
            let ratio = total.sqrt() / (f.besov_half_norm() * g.sobolev_norm(s));
            [
                ratio,
                coeff_sobolev_sq(&tri.grid, &tri.low_high, s) / total,
                coeff_sobolev_sq(&tri.grid, &tri.high_low, s) / total,
                coeff_sobolev_sq(&tri.grid, &tri.high_high, s) / total,
                tri.reconstruction_error(),
            ]
        });
        let names = ["ratio", "low_high_share", "high_low_share", "high_high_share", "reconstruction"];
        for (q, name) in names.iter().enumerate() {
            let vals: Vec<f64> = members.iter().map(|m| m[q]).collect();
            rows.push(ProbeRow::from_values(exps.clone(), *name, grid.len(), seed, &vals)?);
        }
    }
    Ok(ProbeReport {
        probe: "besov_product".into(),
        mode: ProbeMode::Asserting,
        rows,
    })
}

// ---------------------------------------------------------------------------
// Dilation
// ---------------------------------------------------------------------------

/// Multiply by `⟨ξ⟩^p` in Fourier space.
fn sobolev_weight(grid: &GridSpec, values: &[Complex64], p: f64) -> Vec<Complex64> {
    let n = grid.len();
    let coeffs: Vec<Complex64> = fourier_coefficients(grid, values)
        .into_iter()
        .enumerate()
        .map(|(i, z)| z * bracket(frequency(grid, bin_mode(i, n))).powf(p))
        .collect();
    from_coefficients(grid, &coeffs)
}

/// Cutoff `ρ_T(t) = ρ(t/T)` sampled on the grid (the grid coordinate plays the role of time).
pub fn dilated_cutoff(grid: &GridSpec, t_scale: f64) -> Vec<f64> {
    grid.nodes().iter().map(|&t| spaces::dilated_taper(t, 0.0, t_scale)).collect()
}

/// `‖ρ_T f‖_{H^s} / ‖f‖_{H^s}` with the pointwise grid product.
pub fn dilation_ratio(grid: &GridSpec, f: &[Complex64], cutoff: &[f64], s: f64) -> f64 {
    let prod: Vec<Complex64> = f.iter().zip(cutoff).map(|(z, r)| z * r).collect();
    spaces::sobolev_norm(grid, &prod, s) / spaces::sobolev_norm(grid, f, s)
}

/// Lower estimate of the `H^s → H^s` norm of multiplication by `cutoff`:
/// power iteration on `B*B` with `B = W_s M W_{-s}`, started from `start`.
/// Each iterate's ratio is a valid lower bound and the sequence is non-decreasing.
pub fn multiplier_norm_estimate(grid: &GridSpec, cutoff: &[f64], s: f64, start: &[Complex64], iterations: usize) -> f64 {
    let apply = |v: &[Complex64], p: f64| -> Vec<Complex64> {
        let w = sobolev_weight(grid, v, -p);
        let m: Vec<Complex64> = w.iter().zip(cutoff).map(|(z, r)| z * r).collect();
        sobolev_weight(grid, &m, p)
    };
    let norm = |v: &[Complex64]| spaces::l2_norm(grid, v);
    let mut v = sobolev_weight(grid, start, s);
    let mut best = 0.0f64;
    for _ in 0..iterations {
        let nv = norm(&v);
        if nv == 0.0 {
            break;
        }
        v.iter_mut().for_each(|z| *z /= nv);
        let bv = apply(&v, s);
        best = best.max(norm(&bv));
        v = apply(&bv, -s);
    }
    best
}

/// Ratio statistics for each `T` at a fixed resolution, with an operator-norm
/// estimate seeded from the best member. Functions of `t` live on `grid`.
pub fn dilation_probe(s: f64, t_list: &[f64], grid: &GridSpec, ensemble: usize, seed: u64) -> Result<ProbeReport> {
    if !(s > -0.5 && s < 0.5) {
        return Err(Error::Probe(format!("dilation probe needs -1/2 < s < 1/2, got {s}")));
    }
    if t_list.is_empty() {
        return Err(Error::Probe("dilation probe needs at least one T".into()));
    }
    if let Some(t) = t_list.iter().find(|t| !(**t > 0.0 && **t <= 1.0)) {
        return Err(Error::Probe(format!("dilation scales must lie in (0, 1], got {t}")));
    }
    let members: Vec<GridFunction> = par::map_indexed(ensemble, |i| random_function(grid, s, member_seed(seed, i as u64, 0)));
    let mut rows = Vec::new();
    for &t in t_list {
        let cutoff = dilated_cutoff(grid, t);
        let ratios = par::map_slice(&members, |f| dilation_ratio(grid, &f.values, &cutoff, s));
        let best = (0..ratios.len()).max_by(|&a, &b| ratios[a].total_cmp(&ratios[b])).unwrap_or(0);
        let estimate = multiplier_norm_estimate(grid, &cutoff, s, &members[best].values, 60);
        let mut row = ProbeRow::from_values(format!("s={s},T={t}"), "ratio", grid.len(), seed, &ratios)?;
        row.estimate = Some(estimate.max(row.max));
        rows.push(row);
    }
    Ok(ProbeReport {
        probe: "dilation".into(),
        mode: ProbeMode::Asserting,
        rows,
    })
}

/// `max/min - 1` of the per-`T` maximal ratios (estimate when present).
pub fn dilation_spread(report: &ProbeReport) -> f64 {
    let vals: Vec<f64> = report.rows.iter().map(|r| r.estimate.unwrap_or(r.max)).collect();
    let hi = vals.iter().cloned().fold(f64::MIN, f64::max);
    let lo = vals.iter().cloned().fold(f64::MAX, f64::min);
    hi / lo - 1.0
}

// ---------------------------------------------------------------------------
// Energy inequality (trend only)
// ---------------------------------------------------------------------------

/// Solve `∂t u ± ∂x u = F` on the lattice times of `forcing` with `u(0) = f`,
/// trapezoid along characteristics forwards and backwards from `t = 0`.
pub fn characteristic_solve(f: &[Complex64], forcing: &SpaceTimeBlock, sign: Sign) -> Result<SpaceTimeBlock> {
    let grid = forcing.grid;
    let n = grid.len();
    let m = forcing.times();
    let dt = grid.dt();
    if f.len() != n {
        return Err(Error::Probe(format!("data has {} values for {n} nodes", f.len())));
    }
    let zero_row = (0..m).find(|&p| forcing.time(p).abs() < 1e-9 * dt.max(1.0)).ok_or_else(|| {
        Error::Probe("forcing block does not contain t = 0 on its lattice".into())
    })?;
    let shift: isize = match sign {
        Sign::Plus => 1,
        Sign::Minus => -1,
    };
    let idx = |j: usize, d: isize| ((j as isize + d).rem_euclid(n as isize)) as usize;
    let mut rows = vec![vec![Complex64::new(0.0, 0.0); n]; m];
    rows[zero_row] = f.to_vec();
    for p in zero_row + 1..m {
        let (prev, cur) = (forcing.row(p - 1), forcing.row(p));
        let mut next = vec![Complex64::new(0.0, 0.0); n];
        for (j, v) in next.iter_mut().enumerate() {
            let k = idx(j, -shift);
            *v = rows[p - 1][k] + (prev[k] + cur[j]) * (0.5 * dt);
        }
        rows[p] = next;
    }
    for p in (0..zero_row).rev() {
        let (later, cur) = (forcing.row(p + 1), forcing.row(p));
        let mut next = vec![Complex64::new(0.0, 0.0); n];
        for (j, v) in next.iter_mut().enumerate() {
            let k = idx(j, shift);
            *v = rows[p + 1][k] - (later[k] + cur[j]) * (0.5 * dt);
        }
        rows[p] = next;
    }
    SpaceTimeBlock::new(grid, forcing.t0, m, rows.concat(), forcing.window().to_vec())
}

/// Both sides of the energy inequality for one `(f, F)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyRecord {
    pub z_u: f64,
    pub y_u: f64,
    pub data: f64,
    pub z_forcing: f64,
    pub y_forcing: f64,
    pub ratio: f64,
}

/// `(‖u‖_{Z^{s,b}} + ‖u‖_{Y^{s,0}}) / (‖f‖_{H^s} + ‖F‖_{Z^{s,b-1}} + ‖F‖_{Y^{s,-1}})`
/// with the windowed forcing standing in for the optimal extension.
pub fn energy_probe(f: &[Complex64], forcing: &SpaceTimeBlock, s: f64, b: f64, sign: Sign) -> Result<EnergyRecord> {
    if !(b > 0.5 && b < 1.0) {
        return Err(Error::Probe(format!("energy probe needs 1/2 < b < 1, got {b}")));
    }
    let u = characteristic_solve(f, forcing, sign)?;
    let z_u = spaces::z_norm(&u, s, b, sign);
    let y_u = spaces::y_norm(&u, s, 0.0, sign);
    let data = spaces::sobolev_norm(&forcing.grid, f, s);
    let z_forcing = spaces::z_norm(forcing, s, b - 1.0, sign);
    let y_forcing = spaces::y_norm(forcing, s, -1.0, sign);
    let rhs = data + z_forcing + y_forcing;
    if rhs == 0.0 {
        return Err(Error::Probe("energy probe with zero data and zero forcing".into()));
    }
    Ok(EnergyRecord {
        z_u,
        y_u,
        data,
        z_forcing,
        y_forcing,
        ratio: (z_u + y_u) / rhs,
    })
}

/// Forcing shapes for the energy ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForcingKind {
    /// Random spatial profiles with random temporal oscillation.
    Random,
    /// Profiles riding the operator's own characteristic (`τ ± ξ ≈ 0`).
    Resonant,
    /// Profiles riding the opposite characteristic.
    NonResonant,
}

impl ForcingKind {
    pub fn name(&self) -> &'static str {
        match self {
            ForcingKind::Random => "random",
            ForcingKind::Resonant => "resonant",
            ForcingKind::NonResonant => "non_resonant",
        }
    }
}

/// Lattice of `t ∈ [-1, 1]` for the energy probe; needs `1/dt` integral.
fn unit_time_rows(grid: &GridSpec) -> Result<usize> {
    let k = (1.0 / grid.dt()).round();
    if ((k * grid.dt()) - 1.0).abs() > 1e-9 {
        return Err(Error::Probe(format!("dt = {} does not divide 1", grid.dt())));
    }
    Ok(2 * k as usize + 1)
}

fn shifted_profile(grid: &GridSpec, g: &[Complex64], t: f64, dir: f64) -> Vec<Complex64> {
    // g(x - dir t) through the Fourier series, exact for band-limited g
    let n = grid.len();
    let coeffs: Vec<Complex64> = fourier_coefficients(grid, g)
        .into_iter()
        .enumerate()
        .map(|(i, z)| z * Complex64::from_polar(1.0, -frequency(grid, bin_mode(i, n)) * dir * t))
        .collect();
    from_coefficients(grid, &coeffs)
}

/// Forcing block on `[-1, 1]` for ensemble member `member`.
pub fn energy_forcing(grid: &GridSpec, s: f64, sign: Sign, kind: ForcingKind, seed: u64, member: u64) -> Result<SpaceTimeBlock> {
    let m = unit_time_rows(grid)?;
    let g = random_function(grid, s, member_seed(seed, member, 1));
    let mut rng = ChaCha8Rng::seed_from_u64(member_seed(seed, member, 2));
    let omega: f64 = rng.random_range(-4.0..4.0);
    let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let mut samples = Vec::with_capacity(m * grid.len());
    for p in 0..m {
        let t = -1.0 + p as f64 * grid.dt();
        let row = match kind {
            ForcingKind::Random => {
                let c = Complex64::from_polar(1.0, omega * t + phase);
                g.values.iter().map(|z| z * c).collect()
            }
            ForcingKind::Resonant => shifted_profile(grid, &g.values, t, sign.value()),
            ForcingKind::NonResonant => shifted_profile(grid, &g.values, t, -sign.value()),
        };
        samples.extend(row);
    }
    SpaceTimeBlock::with_default_window(*grid, -1.0, m, samples)
}

/// Energy ratios over an ensemble at each grid. Never asserting.
pub fn energy_ensemble(
    s: f64,
    b: f64,
    sign: Sign,
    kind: ForcingKind,
    grids: &[GridSpec],
    ensemble: usize,
    seed: u64,
) -> Result<ProbeReport> {
    let mut rows = Vec::new();
    for grid in grids {
        let ratios = par::try_map_indexed(ensemble, |i| {
            let f = random_function(grid, s, member_seed(seed, i as u64, 0));
            let forcing = energy_forcing(grid, s, sign, kind, seed, i as u64)?;
            energy_probe(&f.values, &forcing, s, b, sign).map(|r| r.ratio)
        })?;
        rows.push(ProbeRow::from_values(
            format!("s={s},b={b},sign={}", sign.value()),
            kind.name(),
            grid.len(),
            seed,
            &ratios,
        )?);
    }
    Ok(ProbeReport {
        probe: "energy".into(),
        mode: ProbeMode::Exploratory,
        rows,
    })
}

// ---------------------------------------------------------------------------
// Bilinear null-structure estimates
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BilinearKind {
    /// `‖uv‖_{Y^{s,-1}_±} ≲ ‖u‖_{Z^{s1,b1}_±} ‖v‖_{Z^{s2,b2}_∓}`.
    YEst,
    /// `‖uv‖_{Z^{s,b}_±} ≲ ‖u‖_{Z^{s1,b1}_±} ‖v‖_{Z^{s2,b2}_∓}`.
    ZEst,
}

impl BilinearKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "y_est" => Some(BilinearKind::YEst),
            "z_est" => Some(BilinearKind::ZEst),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            BilinearKind::YEst => "y_est",
            BilinearKind::ZEst => "z_est",
        }
    }
}

/// Which characteristic the second factor rides.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pairing {
    Opposite,
    Same,
}

impl Pairing {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "opposite" => Some(Pairing::Opposite),
            "same" => Some(Pairing::Same),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Pairing::Opposite => "opposite",
            Pairing::Same => "same",
        }
    }
}

/// Exponents of the bilinear estimates. `a0, b0` are the intermediate
/// exponents of the `Y` estimate; `b` is the output modulation exponent of the `Z` estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BilinearExponents {
    pub s: f64,
    pub b: f64,
    pub s1: f64,
    pub b1: f64,
    pub s2: f64,
    pub b2: f64,
    pub a0: f64,
    pub b0: f64,
}

impl BilinearExponents {
    pub fn label(&self, kind: BilinearKind) -> String {
        match kind {
            BilinearKind::YEst => format!(
                "s={},s1={},b1={},s2={},b2={},a0={},b0={}",
                self.s, self.s1, self.b1, self.s2, self.b2, self.a0, self.b0
            ),
            BilinearKind::ZEst => format!(
                "s={},b={},s1={},b1={},s2={},b2={}",
                self.s, self.b, self.s1, self.b1, self.s2, self.b2
            ),
        }
    }
}

/// Whether the estimate's hypotheses hold for these exponents.
pub fn bilinear_hypotheses(kind: BilinearKind, e: &BilinearExponents) -> bool {
    match kind {
        BilinearKind::YEst => {
            prec_condition(e.s1, e.b2, e.a0)
                && prec_condition(e.s2, e.b1, e.b0)
                && prec_condition(e.a0, e.b0 + 1.0, e.s)
                && e.s1 + e.b1 > -0.5
                && e.s2 + e.b2 > -0.5
        }
        BilinearKind::ZEst => prec_condition(e.s1, e.b2, e.s) && prec_condition(e.b1, e.s2, e.b),
    }
}

/// A few modulated Gaussian packets riding `x - dir·t`, sampled on an `N × N` block.
/// Carrier frequencies are uniform in `[-max_frequency, max_frequency)`.
pub fn packet_block(grid: &GridSpec, dir: f64, max_frequency: f64, seed: u64) -> Result<SpaceTimeBlock> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let l = grid.half_width();
    // Frequencies and widths are drawn in physical units, independent of N.
    let packets: Vec<(Complex64, f64, f64, f64)> = (0..3)
        .map(|_| {
            let amp = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let kappa = rng.random_range(-max_frequency..max_frequency);
            let center = rng.random_range(-l / 2.0..l / 2.0);
            let width = rng.random_range(0.4..1.2);
            (amp, kappa, center, width)
        })
        .collect();
    let m = grid.len();
    let t0 = -0.5 * m as f64 * grid.dt();
    SpaceTimeBlock::from_fn(*grid, t0, m, |t, x| {
        let y = x - dir * t;
        packets
            .iter()
            .map(|&(amp, kappa, center, width)| {
                let d = grid.periodic_offset(y, center);
                amp * Complex64::from_polar((-0.5 * d * d / (width * width)).exp(), kappa * d)
            })
            .sum()
    })
}

/// Ratio for one pair of blocks. `u` rides `sign`; `v` is measured in the
/// norm of the family it rides (`∓` for opposite pairing, `±` for same).
pub fn bilinear_ratio(
    kind: BilinearKind,
    e: &BilinearExponents,
    sign: Sign,
    pairing: Pairing,
    u: &SpaceTimeBlock,
    v: &SpaceTimeBlock,
) -> Result<f64> {
    let uv = u.product(v)?;
    let lhs = match kind {
        BilinearKind::YEst => spaces::y_norm(&uv, e.s, -1.0, sign),
        BilinearKind::ZEst => spaces::z_norm(&uv, e.s, e.b, sign),
    };
    let v_sign = match pairing {
        Pairing::Opposite => sign.flip(),
        Pairing::Same => sign,
    };
    let rhs = spaces::z_norm(u, e.s1, e.b1, sign) * spaces::z_norm(v, e.s2, e.b2, v_sign);
    Ok(lhs / rhs)
}

/// Bilinear ratios over packet ensembles at each grid (`M = N` time samples).
#[allow(clippy::too_many_arguments)]
pub fn bilinear_probe(
    kind: BilinearKind,
    e: &BilinearExponents,
    sign: Sign,
    pairing: Pairing,
    max_frequency: f64,
    grids: &[GridSpec],
    ensemble: usize,
    seed: u64,
) -> Result<ProbeReport> {
    let dir_u = sign.value();
    let dir_v = match pairing {
        Pairing::Opposite => -dir_u,
        Pairing::Same => dir_u,
    };
    let mut rows = Vec::new();
    for grid in grids {
        let ratios = par::try_map_indexed(ensemble, |i| {
            let u = packet_block(grid, dir_u, max_frequency, member_seed(seed, i as u64, 0))?;
            let v = packet_block(grid, dir_v, max_frequency, member_seed(seed, i as u64, 1))?;
            bilinear_ratio(kind, e, sign, pairing, &u, &v)
        })?;
        rows.push(ProbeRow::from_values(
            e.label(kind),
            format!("{}_{}", kind.name(), pairing.name()),
            grid.len(),
            seed,
            &ratios,
        )?);
    }
    Ok(ProbeReport {
        probe: "bilinear".into(),
        mode: ProbeMode::gate(bilinear_hypotheses(kind, e)),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::make_grid;
    use std::f64::consts::PI;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn quantiles_interpolate() {
        let v = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(quantile(&v, 0.5), 3.0);
        assert_eq!(quantile(&v, 0.9), 4.6);
        assert_eq!(quantile(&v, 1.0), 5.0);
        assert_eq!(quantile(&[7.0], 0.9), 7.0);
    }

    #[test]
    fn rows_reject_bad_ensembles() {
        assert!(ProbeRow::from_values("", "r", 8, 0, &[1.0; 10]).is_err());
        let mut v = vec![1.0; 40];
        v[3] = f64::NAN;
        assert!(ProbeRow::from_values("", "r", 8, 0, &v).is_err());
        v[3] = -1.0;
        assert!(ProbeRow::from_values("", "r", 8, 0, &v).is_err());
    }

    #[test]
    fn random_function_is_normalized_and_deterministic() {
        let g = make_grid(16.0, 256).unwrap();
        let f = random_function(&g, 0.3, 11);
        assert!(rel(f.sobolev_norm(0.3), 1.0) < 1e-10);
        assert_eq!(f, random_function(&g, 0.3, 11));
        let c = coherent_function(&g, 0.3, 11, 2.0);
        assert!(rel(c.sobolev_norm(0.3), 1.0) < 1e-10);
    }

    #[test]
    fn random_function_is_rough() {
        // medians of ‖f‖_{H^{s+1/2}} grow by ≥ 20% per doubling
        let s = 0.2;
        let median = |n: usize| {
            let g = make_grid(16.0, n).unwrap();
            let mut v: Vec<f64> = (0..41).map(|i| random_function(&g, s, i).sobolev_norm(s + 0.5)).collect();
            v.sort_by(|a, b| a.total_cmp(b));
            v[20]
        };
        let (m1, m2, m3) = (median(256), median(512), median(1024));
        assert!(m2 / m1 >= 1.2 && m3 / m2 >= 1.2, "{m1} {m2} {m3}");
    }

    #[test]
    fn single_mode_product_closed_form() {
        let g = make_grid(4.0, 64).unwrap();
        let k = 5;
        let xi = PI * k as f64 / 4.0;
        let f = GridFunction::from_fn(g, |x| Complex64::from_polar(1.0, xi * x));
        let (a, b, c) = (0.7, -0.2, 0.4);
        let want = bracket(2.0 * xi).powf(c) / (bracket(xi).powf(a + b) * (2.0 * 4.0f64).sqrt());
        assert!(rel(pair_ratio(&f, &f, a, b, c), want) < 1e-10);
    }

    #[test]
    fn product_gate_follows_prec() {
        let g = make_grid(8.0, 64).unwrap();
        let rep = product_ratio(1.0, 1.0, 1.0, &g, 30, 1).unwrap();
        assert_eq!(rep.mode, ProbeMode::Asserting);
        assert_eq!(rep.rows.len(), 2);
        assert_eq!(rep.rows[1].n, 128);
        assert_eq!(product_ratio(0.0, 0.0, 0.0, &g, 30, 1).unwrap().mode, ProbeMode::Exploratory);
        assert_eq!(product_ratio(1.0, -0.4, -0.4, &g, 30, 1).unwrap().mode, ProbeMode::Asserting);
    }

    #[test]
    fn reports_are_deterministic() {
        let g = make_grid(8.0, 64).unwrap();
        let a = product_ratio(1.0, 1.0, 1.0, &g, 30, 5).unwrap();
        let b = product_ratio(1.0, 1.0, 1.0, &g, 30, 5).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_csv(), b.to_csv());
        assert!(a.to_csv().starts_with("# schema=1\nprobe,"));
        let seq: Vec<f64> = par::map_indexed_seq(30, |i| {
            let (f, g2) = product_pair(&g, 1.0, 1.0, PairFamily::Coherent, 5, i as u64);
            pair_ratio(&f, &g2, 1.0, 1.0, 1.0)
        });
        let row = ProbeRow::from_values("a=1,b=1,c=1", "ratio", 64, 5, &seq).unwrap();
        assert_eq!(row, a.rows[0]);
    }

    #[test]
    fn trichotomy_reconstructs() {
        let g = make_grid(16.0, 256).unwrap();
        let (f, h) = product_pair(&g, 0.5, 0.3, PairFamily::Independent, 3, 0);
        let tri = trichotomy(&f, &h);
        assert!(tri.reconstruction_error() <= 1e-10);
        let (f, h) = product_pair(&g, 0.5, 0.3, PairFamily::Coherent, 3, 1);
        assert!(trichotomy(&f, &h).reconstruction_error() <= 1e-10);
    }

    #[test]
    fn trichotomy_classes() {
        // f at |ξ| ≤ 1 and g at a high mode: everything is low-high
        let g = make_grid(PI, 64).unwrap();
        let f = GridFunction::from_fn(g, |_| Complex64::new(1.0, 0.0));
        let h = GridFunction::from_fn(g, |x| Complex64::from_polar(1.0, 20.0 * x));
        let tri = trichotomy(&f, &h);
        let mass = |c: &[Complex64]| c.iter().map(|z| z.norm_sqr()).sum::<f64>();
        // FFT rounding leaves ~1e-30 relative mass in the empty classes
        let tiny = |c: &[Complex64], t: &Trichotomy| mass(c) <= 1e-24 * mass(&t.product);
        assert!(tiny(&tri.high_low, &tri) && tiny(&tri.high_high, &tri));
        assert!(!tiny(&tri.low_high, &tri));
        let swapped = trichotomy(&h, &f);
        assert!(tiny(&swapped.low_high, &swapped) && !tiny(&swapped.high_low, &swapped));
        let both = trichotomy(&h, &h);
        assert!(tiny(&both.low_high, &both) && !tiny(&both.high_high, &both));
    }

    #[test]
    fn besov_probe_with_constant_factor() {
        let g = make_grid(8.0, 128).unwrap();
        let c = Complex64::new(0.6, 0.8);
        let f = GridFunction::from_fn(g, |_| c);
        let h = random_function(&g, 0.3, 2);
        let fg = dealiased_product(&g, &f.values, &h.values);
        assert!(rel(fg.sobolev_norm(0.3), c.norm() * h.sobolev_norm(0.3)) < 1e-10);
        // only block 1 contributes, so ‖c‖_B = |c| ‖1‖_{L²}
        assert!(rel(f.besov_half_norm(), c.norm() * g.period().sqrt()) < 1e-12);
        assert!(besov_product_probe(0.5, &g, 30, 1).is_err());
        assert!(besov_product_probe(-0.5, &g, 30, 1).is_err());
    }

    #[test]
    fn besov_probe_reports_all_terms() {
        let g = make_grid(16.0, 128).unwrap();
        let rep = besov_product_probe(0.3, &g, 30, 4).unwrap();
        assert_eq!(rep.rows.len(), 10);
        assert!(rep.rows_for("reconstruction").all(|r| r.max <= 1e-10));
    }

    #[test]
    fn dilation_l2_bounds() {
        let g = make_grid(1.0, 256).unwrap();
        let f = random_function(&g, 0.0, 3);
        for t in [1.0, 0.5, 0.125] {
            let cutoff = dilated_cutoff(&g, t);
            let maxr = cutoff.iter().cloned().fold(0.0, f64::max);
            assert!(dilation_ratio(&g, &f.values, &cutoff, 0.0) <= maxr + 1e-9);
        }
        // f supported where ρ₁ = 1
        let cutoff = dilated_cutoff(&g, 1.0);
        let inner: Vec<Complex64> = g
            .nodes()
            .iter()
            .map(|&x| if x.abs() <= 0.45 { Complex64::new(1.0, x) } else { Complex64::new(0.0, 0.0) })
            .collect();
        assert!(dilation_ratio(&g, &inner, &cutoff, 0.0) >= 1.0 - 1e-6);
    }

    #[test]
    fn dilation_validates_inputs() {
        let g = make_grid(1.0, 64).unwrap();
        assert!(dilation_probe(0.5, &[1.0], &g, 30, 0).is_err());
        assert!(dilation_probe(0.0, &[1.5], &g, 30, 0).is_err());
        assert!(dilation_probe(0.0, &[0.0], &g, 30, 0).is_err());
        assert!(dilation_probe(0.0, &[], &g, 30, 0).is_err());
    }

    #[test]
    fn multiplier_estimate_for_l2_is_sup() {
        let g = make_grid(1.0, 128).unwrap();
        let cutoff = dilated_cutoff(&g, 0.25);
        let f = random_function(&g, 0.0, 1);
        let est = multiplier_norm_estimate(&g, &cutoff, 0.0, &f.values, 200);
        assert!(est <= 1.0 + 1e-12);
        assert!(est >= 0.95, "{est}");
    }

    #[test]
    fn characteristic_solve_free_and_forced() {
        let g = make_grid(4.0, 64).unwrap();
        let m = unit_time_rows(&g).unwrap();
        let zero = SpaceTimeBlock::with_default_window(g, -1.0, m, vec![Complex64::new(0.0, 0.0); m * 64]).unwrap();
        let f = random_function(&g, 0.0, 1).values;
        let u = characteristic_solve(&f, &zero, Sign::Plus).unwrap();
        let mid = (m - 1) / 2;
        assert_eq!(u.row(mid), &f[..]);
        assert_eq!(u.row(mid + 3), &crate::lattice::shifted(&f, 3)[..]);
        assert_eq!(u.row(mid - 2), &crate::lattice::shifted(&f, -2)[..]);

        // constant forcing F = 1 gives u = f + t exactly
        let one = SpaceTimeBlock::with_default_window(g, -1.0, m, vec![Complex64::new(1.0, 0.0); m * 64]).unwrap();
        let zero_data = vec![Complex64::new(0.0, 0.0); 64];
        let u = characteristic_solve(&zero_data, &one, Sign::Minus).unwrap();
        for p in 0..m {
            let t = u.time(p);
            assert!(u.row(p).iter().all(|z| (z.re - t).abs() < 1e-12));
        }
    }

    #[test]
    fn energy_probe_free_case_is_finite() {
        let g = make_grid(4.0, 64).unwrap();
        let m = unit_time_rows(&g).unwrap();
        let zero = SpaceTimeBlock::with_default_window(g, -1.0, m, vec![Complex64::new(0.0, 0.0); m * 64]).unwrap();
        let f: Vec<Complex64> = g.nodes().iter().map(|&x| Complex64::from_polar(1.0, PI / 4.0 * 3.0 * x)).collect();
        let rec = energy_probe(&f, &zero, 0.0, 0.6, Sign::Plus).unwrap();
        assert!(rec.ratio.is_finite() && rec.ratio > 0.0);
        assert_eq!(rec.z_forcing, 0.0);
        assert!(energy_probe(&f, &zero, 0.0, 0.5, Sign::Plus).is_err());
        assert!(energy_probe(&f, &zero, 0.0, 1.0, Sign::Plus).is_err());
    }

    #[test]
    fn bilinear_gating_examples() {
        let base = BilinearExponents {
            s: 0.0,
            b: 0.0,
            s1: 0.0,
            b1: 0.6,
            s2: 0.0,
            b2: 0.6,
            a0: 0.0,
            b0: 0.0,
        };
        assert!(bilinear_hypotheses(BilinearKind::YEst, &base));
        let bad_side = BilinearExponents { s1: -0.7, b1: 0.1, ..base };
        assert!(!bilinear_hypotheses(BilinearKind::YEst, &bad_side));
        // Z estimate: s ≺ {s1, b2} and b ≺ {b1, s2}, using the prec examples
        let z_ok = BilinearExponents { s: 1.0, s1: 1.0, b2: 1.0, b: -0.4, b1: 1.0, s2: -0.4, ..base };
        assert!(bilinear_hypotheses(BilinearKind::ZEst, &z_ok));
        let z_bad = BilinearExponents { s: 0.0, s1: 0.0, b2: 0.0, ..z_ok };
        assert!(!bilinear_hypotheses(BilinearKind::ZEst, &z_bad));
    }

    /// Direct window transform `dt Σ_q w_q e^{-iτ t_q}` (block origin phase dropped).
    fn window_transform(w: &[f64], dt: f64, tau: f64) -> Complex64 {
        w.iter()
            .enumerate()
            .map(|(q, &wq)| Complex64::from_polar(wq * dt, -tau * q as f64 * dt))
            .sum()
    }

    #[test]
    fn two_mode_bilinear_oracle() {
        let g = make_grid(4.0, 32).unwrap();
        let l = 4.0;
        let (ka, kb) = (3i64, -5i64);
        let (xa, xb) = (PI * ka as f64 / l, PI * kb as f64 / l);
        let m = 32;
        let u = SpaceTimeBlock::from_fn(g, 0.0, m, |t, x| Complex64::from_polar(1.0, xa * (x - t))).unwrap();
        let v = SpaceTimeBlock::from_fn(g, 0.0, m, |t, x| Complex64::from_polar(1.0, xb * (x + t))).unwrap();
        let e = BilinearExponents { s: 0.2, b: 0.0, s1: 0.1, b1: 0.6, s2: 0.3, b2: 0.55, a0: 0.0, b0: 0.0 };

        // Oracle: each block is one spatial mode with temporal frequency ω,
        // so |ũ(τ_p, ξ)| = 2L |Ŵ(τ_p - ω)|.
        let w = spaces::default_window(m);
        let dt = g.dt();
        let span = m as f64 * dt;
        let taus: Vec<f64> = (0..m).map(|i| 2.0 * PI * bin_mode(i, m) as f64 / span).collect();
        let mag = |tau: f64, omega: f64| 2.0 * l * window_transform(&w, dt, tau - omega).norm();
        let z = |xi: f64, omega: f64, s: f64, b: f64, sg: f64| {
            let sum: f64 = taus
                .iter()
                .map(|&tau| (bracket(tau - sg * xi).powf(s) * bracket(tau + sg * xi).powf(b) * mag(tau, omega)).powi(2))
                .sum();
            (sum / (2.0 * l * span)).sqrt()
        };
        let y = |xi: f64, omega: f64, s: f64, b: f64, sg: f64| {
            let l1: f64 = taus.iter().map(|&tau| bracket(tau + sg * xi).powf(b) * mag(tau, omega)).sum::<f64>() / span;
            (bracket(xi).powf(2.0 * s) * l1 * l1 / (2.0 * l)).sqrt()
        };
        let want = y(xa + xb, xb - xa, e.s, -1.0, 1.0) / (z(xa, -xa, e.s1, e.b1, 1.0) * z(xb, xb, e.s2, e.b2, -1.0));
        let got = bilinear_ratio(BilinearKind::YEst, &e, Sign::Plus, Pairing::Opposite, &u, &v).unwrap();
        assert!(rel(got, want) < 1e-8, "{got} vs {want}");

        let want_z = z(xa + xb, xb - xa, e.s, e.b, 1.0) / (z(xa, -xa, e.s1, e.b1, 1.0) * z(xb, xb, e.s2, e.b2, -1.0));
        let got_z = bilinear_ratio(BilinearKind::ZEst, &e, Sign::Plus, Pairing::Opposite, &u, &v).unwrap();
        assert!(rel(got_z, want_z) < 1e-8, "{got_z} vs {want_z}");
    }

    #[test]
    fn packets_ride_their_characteristic() {
        let g = make_grid(8.0, 64).unwrap();
        let u = packet_block(&g, 1.0, 4.0, 3).unwrap();
        let n = 64;
        // row p is row 0 shifted by p nodes
        assert!((0..n).all(|j| (u.row(5)[(j + 5) % n] - u.row(0)[j]).norm() < 1e-12));
        let v = packet_block(&g, -1.0, 4.0, 3).unwrap();
        assert!((0..n).all(|j| (v.row(5)[j] - v.row(0)[(j + 5) % n]).norm() < 1e-12));
    }
}
