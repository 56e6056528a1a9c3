//! Spectral norms on the periodic lattice.
//!
//! Fourier convention, fixed for the whole crate: with `ξ_k = π k / L` for
//! `k ∈ [-N/2, N/2)`,
//!
//! ```text
//! f̂_k = h Σ_j f(x_j) e^{-i ξ_k x_j},        ‖f‖²_{H^s} = (1/2L) Σ_k ⟨ξ_k⟩^{2s} |f̂_k|²,
//! ```
//!
//! so `s = 0` reproduces the grid norm `h Σ_j |f_j|²` exactly. Space-time
//! blocks use the same scaling in time with `τ_p = 2π p / (M dt)` and the
//! measure `1/(M dt)` per `τ` bin. `⟨x⟩ = (1 + x²)^{1/2}` throughout.
//!
//! Coefficient arrays are stored in FFT bin order: bin `i < N/2` holds
//! `k = i`, bin `i ≥ N/2` holds `k = i - N`.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::lattice::GridSpec;

/// Regularity margin of random Sobolev data: coefficients decay like `⟨ξ⟩^{-(s+1/2+δ)}`.
pub const RANDOM_DATA_DELTA: f64 = 0.05;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(n)
        } else {
            p.plan_fft_forward(n)
        }
    })
}

/// `⟨x⟩ = sqrt(1 + x²)`.
#[inline]
pub fn bracket(x: f64) -> f64 {
    (1.0 + x * x).sqrt()
}

/// Integer mode held in FFT bin `i` of a length-`n` transform.
#[inline]
pub fn bin_mode(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// FFT bin holding integer mode `k`.
#[inline]
pub fn mode_bin(k: i64, n: usize) -> usize {
    k.rem_euclid(n as i64) as usize
}

/// `ξ_k = π k / L`.
#[inline]
pub fn frequency(grid: &GridSpec, k: i64) -> f64 {
    PI * k as f64 / grid.half_width()
}

/// Frequencies `ξ` in bin order.
pub fn frequencies(grid: &GridSpec) -> Vec<f64> {
    let n = grid.len();
    (0..n).map(|i| frequency(grid, bin_mode(i, n))).collect()
}

/// Largest `|ξ_k|` on the grid (the Nyquist mode `k = -N/2`).
pub fn max_frequency(grid: &GridSpec) -> f64 {
    PI * (grid.len() / 2) as f64 / grid.half_width()
}

/// Fourier coefficients `f̂_k` in bin order.
pub fn fourier_coefficients(grid: &GridSpec, values: &[Complex64]) -> Vec<Complex64> {
    let n = grid.len();
    assert_eq!(values.len(), n, "sample count does not match grid");
    let mut buf = values.to_vec();
    plan(n, false).process(&mut buf);
    // e^{-i ξ_k x_j} = (-1)^k e^{-2πi kj/N} because x_0 = -L.
    let h = grid.spacing();
    for (i, z) in buf.iter_mut().enumerate() {
        let sign = if bin_mode(i, n) % 2 == 0 { h } else { -h };
        *z *= sign;
    }
    buf
}

/// Inverse of [`fourier_coefficients`]: `f_j = (1/2L) Σ_k f̂_k e^{i ξ_k x_j}`.
pub fn from_coefficients(grid: &GridSpec, coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = grid.len();
    assert_eq!(coeffs.len(), n, "coefficient count does not match grid");
    let scale = 1.0 / grid.period();
    let mut buf: Vec<Complex64> = coeffs
        .iter()
        .enumerate()
        .map(|(i, z)| if bin_mode(i, n) % 2 == 0 { *z * scale } else { -*z * scale })
        .collect();
    plan(n, true).process(&mut buf);
    buf
}

/// A function on the lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub grid: GridSpec,
    pub values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Spaces(format!(
                "{} samples for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        Ok(GridFunction { grid, values })
    }

    pub fn from_real(grid: GridSpec, values: &[f64]) -> Result<Self> {
        GridFunction::new(grid, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(f64) -> Complex64) -> Self {
        let values = (0..grid.len()).map(|j| f(grid.x(j))).collect();
        GridFunction { grid, values }
    }

    pub fn spectrum(&self) -> SpectralFunction {
        SpectralFunction {
            grid: self.grid,
            coefficients: fourier_coefficients(&self.grid, &self.values),
        }
    }

    pub fn l2_norm(&self) -> f64 {
        l2_norm(&self.grid, &self.values)
    }

    pub fn sobolev_norm(&self, s: f64) -> f64 {
        sobolev_norm(&self.grid, &self.values, s)
    }

    pub fn besov_half_norm(&self) -> f64 {
        besov_half_norm(&self.grid, &self.values)
    }

    pub fn scaled(mut self, c: f64) -> Self {
        self.values.iter_mut().for_each(|z| *z *= c);
        self
    }
}

/// Fourier side of a [`GridFunction`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFunction {
    pub grid: GridSpec,
    pub coefficients: Vec<Complex64>,
}

impl SpectralFunction {
    pub fn to_grid(&self) -> GridFunction {
        GridFunction {
            grid: self.grid,
            values: from_coefficients(&self.grid, &self.coefficients),
        }
    }

    /// `(1/2L) Σ_k ⟨ξ_k⟩^{2s} |f̂_k|²`, square-rooted.
    pub fn sobolev_norm(&self, s: f64) -> f64 {
        weighted_coefficient_norm(&self.grid, &self.coefficients, s)
    }

    /// Same function on `grid.refined()`; the Nyquist coefficient stays at `k = -N/2`.
    pub fn zero_padded(&self) -> SpectralFunction {
        let n = self.grid.len();
        let fine = self.grid.refined();
        let mut out = vec![Complex64::new(0.0, 0.0); 2 * n];
        for (i, z) in self.coefficients.iter().enumerate() {
            out[mode_bin(bin_mode(i, n), 2 * n)] = *z;
        }
        SpectralFunction {
            grid: fine,
            coefficients: out,
        }
    }
}

fn weighted_coefficient_norm(grid: &GridSpec, coeffs: &[Complex64], s: f64) -> f64 {
    let n = grid.len();
    let sum: f64 = coeffs
        .iter()
        .enumerate()
        .map(|(i, z)| {
            let w = if s == 0.0 {
                1.0
            } else {
                bracket(frequency(grid, bin_mode(i, n))).powf(2.0 * s)
            };
            w * z.norm_sqr()
        })
        .sum();
    (sum / grid.period()).sqrt()
}

/// Grid `L²` norm `(h Σ_j |f_j|²)^{1/2}`.
pub fn l2_norm(grid: &GridSpec, values: &[Complex64]) -> f64 {
    (grid.spacing() * values.iter().map(|z| z.norm_sqr()).sum::<f64>()).sqrt()
}

/// Grid `L²` norm of a real array.
pub fn l2_norm_real(grid: &GridSpec, values: &[f64]) -> f64 {
    (grid.spacing() * values.iter().map(|v| v * v).sum::<f64>()).sqrt()
}

/// `‖f‖_{H^s} = ‖⟨ξ⟩^s f̂‖` under the crate convention.
pub fn sobolev_norm(grid: &GridSpec, values: &[Complex64], s: f64) -> f64 {
    weighted_coefficient_norm(grid, &fourier_coefficients(grid, values), s)
}

/// `H^s` norm of a real array.
pub fn sobolev_norm_real(grid: &GridSpec, values: &[f64], s: f64) -> f64 {
    let z: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    sobolev_norm(grid, &z, s)
}

// ---------------------------------------------------------------------------
// Littlewood–Paley
// ---------------------------------------------------------------------------

/// Dyadic block containing frequency `ξ`: `1` for `|ξ| ≤ 1`, else the `N` with `N/2 < |ξ| ≤ N`.
pub fn dyadic_block(xi: f64) -> u64 {
    let a = xi.abs();
    if a <= 1.0 {
        return 1;
    }
    let mut n: u64 = 2;
    while (n as f64) < a {
        n *= 2;
    }
    n
}

/// All dyadic blocks up to the one containing the Nyquist frequency.
pub fn dyadic_blocks(grid: &GridSpec) -> Vec<u64> {
    let top = dyadic_block(max_frequency(grid));
    let mut out = vec![1u64];
    while *out.last().unwrap() < top {
        out.push(out.last().unwrap() * 2);
    }
    out
}

fn check_block(grid: &GridSpec, n_block: u64) -> Result<()> {
    if n_block == 0 || !n_block.is_power_of_two() {
        return Err(Error::Spaces(format!("block {n_block} is not dyadic")));
    }
    let top = dyadic_block(max_frequency(grid));
    if n_block > top {
        return Err(Error::Spaces(format!(
            "block {n_block} lies above the Nyquist block {top}"
        )));
    }
    Ok(())
}

/// Coefficients restricted to one dyadic block (bin order, zeros elsewhere).
pub fn lp_block_coefficients(grid: &GridSpec, coeffs: &[Complex64], n_block: u64) -> Vec<Complex64> {
    let n = grid.len();
    coeffs
        .iter()
        .enumerate()
        .map(|(i, z)| {
            if dyadic_block(frequency(grid, bin_mode(i, n))) == n_block {
                *z
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect()
}

/// Littlewood–Paley projection `P_N f`.
pub fn lp_project(grid: &GridSpec, values: &[Complex64], n_block: u64) -> Result<Vec<Complex64>> {
    check_block(grid, n_block)?;
    let coeffs = fourier_coefficients(grid, values);
    Ok(from_coefficients(grid, &lp_block_coefficients(grid, &coeffs, n_block)))
}

/// `‖P_N f‖_{L²}` for every block of [`dyadic_blocks`], computed from one transform.
pub fn lp_block_norms(grid: &GridSpec, values: &[Complex64]) -> Vec<(u64, f64)> {
    let n = grid.len();
    let coeffs = fourier_coefficients(grid, values);
    let blocks = dyadic_blocks(grid);
    let mut sums = vec![0.0; blocks.len()];
    for (i, z) in coeffs.iter().enumerate() {
        let b = dyadic_block(frequency(grid, bin_mode(i, n)));
        let idx = b.trailing_zeros() as usize;
        sums[idx] += z.norm_sqr();
    }
    blocks
        .into_iter()
        .zip(sums)
        .map(|(b, s)| (b, (s / grid.period()).sqrt()))
        .collect()
}

/// `Σ_N N^{1/2} ‖P_N f‖_{L²}`.
pub fn besov_half_norm(grid: &GridSpec, values: &[Complex64]) -> f64 {
    lp_block_norms(grid, values)
        .into_iter()
        .map(|(b, norm)| (b as f64).sqrt() * norm)
        .sum()
}

/// Exact product of the trigonometric interpolants of `f` and `g`, sampled on
/// `grid.refined()` (twice the nodes, so no aliasing).
pub fn dealiased_product(grid: &GridSpec, f: &[Complex64], g: &[Complex64]) -> GridFunction {
    let fp = SpectralFunction {
        grid: *grid,
        coefficients: fourier_coefficients(grid, f),
    }
    .zero_padded()
    .to_grid();
    let gp = SpectralFunction {
        grid: *grid,
        coefficients: fourier_coefficients(grid, g),
    }
    .zero_padded()
    .to_grid();
    let values = fp.values.iter().zip(&gp.values).map(|(a, b)| a * b).collect();
    GridFunction {
        grid: fp.grid,
        values,
    }
}

// ---------------------------------------------------------------------------
// Random data
// ---------------------------------------------------------------------------

/// Unit complex Gaussians `(a + ib)/√2`, one per bin, from a seeded ChaCha8 stream.
pub fn complex_gaussians(n: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    (0..n)
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(re * scale, im * scale)
        })
        .collect()
}

/// Complex Gaussians in bin order, drawn in the mode order `0, 1, -1, 2, -2, ...`
/// so that a seed fixes the same low modes at every resolution.
pub fn gaussians_by_mode(n: usize, seed: u64) -> Vec<Complex64> {
    let draws = complex_gaussians(n, seed);
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (d, z) in draws.into_iter().enumerate() {
        let k = if d == 0 {
            0
        } else if d % 2 == 1 {
            (d as i64 + 1) / 2
        } else {
            -(d as i64) / 2
        };
        out[mode_bin(k, n)] = z;
    }
    out
}

/// Random Fourier series with coefficients `⟨ξ_k⟩^{-(s+1/2+δ)} r_k`, rescaled to
/// `‖·‖_{H^s} = norm`. With `hermitian` the real part is kept (equivalently the
/// coefficients are symmetrized) before rescaling.
pub fn random_sobolev_samples(
    grid: &GridSpec,
    s: f64,
    seed: u64,
    norm: f64,
    hermitian: bool,
) -> Vec<Complex64> {
    let n = grid.len();
    let r = gaussians_by_mode(n, seed);
    let coeffs: Vec<Complex64> = r
        .iter()
        .enumerate()
        .map(|(i, z)| {
            let w = bracket(frequency(grid, bin_mode(i, n))).powf(-(s + 0.5 + RANDOM_DATA_DELTA));
            z * w
        })
        .collect();
    let mut values = from_coefficients(grid, &coeffs);
    if hermitian {
        values.iter_mut().for_each(|z| z.im = 0.0);
    }
    let current = sobolev_norm(grid, &values, s);
    if current > 0.0 {
        let c = norm / current;
        values.iter_mut().for_each(|z| *z *= c);
    }
    values
}

// ---------------------------------------------------------------------------
// Space-time blocks
// ---------------------------------------------------------------------------

/// `+1` or `-1` selecting the characteristic family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn parse(s: &str) -> Option<Sign> {
        match s.trim() {
            "+" | "+1" | "1" | "plus" => Some(Sign::Plus),
            "-" | "-1" | "minus" => Some(Sign::Minus),
            _ => None,
        }
    }
}

/// The fixed cutoff `ρ`: 1 on `|r| ≤ 1/2`, `cos²(π(|r| - 1/2))` on `1/2 < |r| < 1`, 0 beyond.
pub fn taper(r: f64) -> f64 {
    let a = r.abs();
    if a <= 0.5 {
        1.0
    } else if a < 1.0 {
        let c = (PI * (a - 0.5)).cos();
        c * c
    } else {
        0.0
    }
}

/// Dilated cutoff `ρ_T(t) = ρ((t - center) / T)`.
pub fn dilated_taper(t: f64, center: f64, scale: f64) -> f64 {
    taper((t - center) / scale)
}

/// Default window for `m` samples: `ρ` stretched over the block, so the outer
/// quarter on each side is the cosine-squared taper and the middle half is 1.
pub fn default_window(m: usize) -> Vec<f64> {
    let half = (m as f64 - 1.0) / 2.0;
    (0..m).map(|i| taper((i as f64 - half) / half)).collect()
}

/// Windowed `(t, x)` samples on `M` consecutive lattice times `t0 + p dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeBlock {
    pub grid: GridSpec,
    pub t0: f64,
    m: usize,
    samples: Vec<Complex64>,
    window: Vec<f64>,
}

impl SpaceTimeBlock {
    /// `samples` is row-major with one row of `N` values per time.
    pub fn new(grid: GridSpec, t0: f64, m: usize, samples: Vec<Complex64>, window: Vec<f64>) -> Result<Self> {
        if m < 8 {
            return Err(Error::Spaces(format!("block needs at least 8 times, got {m}")));
        }
        if samples.len() != m * grid.len() {
            return Err(Error::Spaces(format!(
                "block has {} samples, expected {m} x {}",
                samples.len(),
                grid.len()
            )));
        }
        if window.len() != m {
            return Err(Error::Spaces(format!(
                "window has {} entries for {m} times",
                window.len()
            )));
        }
        let wmax = window.iter().fold(0.0f64, |a, w| a.max(w.abs()));
        if window[0].abs() > 1e-8 * wmax || window[m - 1].abs() > 1e-8 * wmax {
            return Err(Error::Spaces("window must vanish at both ends of the block".into()));
        }
        Ok(SpaceTimeBlock {
            grid,
            t0,
            m,
            samples,
            window,
        })
    }

    pub fn with_default_window(grid: GridSpec, t0: f64, m: usize, samples: Vec<Complex64>) -> Result<Self> {
        SpaceTimeBlock::new(grid, t0, m, samples, default_window(m))
    }

    /// Sample `u(t, x)` on the block lattice with the default window.
    pub fn from_fn(grid: GridSpec, t0: f64, m: usize, u: impl Fn(f64, f64) -> Complex64) -> Result<Self> {
        let dt = grid.dt();
        let mut samples = Vec::with_capacity(m * grid.len());
        for p in 0..m {
            let t = t0 + p as f64 * dt;
            for j in 0..grid.len() {
                samples.push(u(t, grid.x(j)));
            }
        }
        SpaceTimeBlock::with_default_window(grid, t0, m, samples)
    }

    pub fn times(&self) -> usize {
        self.m
    }

    pub fn time(&self, p: usize) -> f64 {
        self.t0 + p as f64 * self.grid.dt()
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn window(&self) -> &[f64] {
        &self.window
    }

    pub fn row(&self, p: usize) -> &[Complex64] {
        let n = self.grid.len();
        &self.samples[p * n..(p + 1) * n]
    }

    pub fn with_window(&self, window: Vec<f64>) -> Result<Self> {
        SpaceTimeBlock::new(self.grid, self.t0, self.m, self.samples.clone(), window)
    }

    /// Pointwise product of two blocks on the same lattice; keeps `self`'s window.
    pub fn product(&self, other: &SpaceTimeBlock) -> Result<Self> {
        if self.grid != other.grid || self.m != other.m {
            return Err(Error::Spaces("blocks live on different lattices".into()));
        }
        let samples = self.samples.iter().zip(&other.samples).map(|(a, b)| a * b).collect();
        SpaceTimeBlock::new(self.grid, self.t0, self.m, samples, self.window.clone())
    }

    /// `τ_p = 2π p / (M dt)` in bin order.
    pub fn tau_frequencies(&self) -> Vec<f64> {
        let span = self.m as f64 * self.grid.dt();
        (0..self.m).map(|i| 2.0 * PI * bin_mode(i, self.m) as f64 / span).collect()
    }

    /// Windowed space-time transform magnitudes `|ũ(τ_p, ξ_k)|`, row-major in `(p, k)` bin order.
    ///
    /// Phase factors from the origin of the block are dropped; every norm here
    /// depends on moduli only.
    pub fn spectrum_magnitudes(&self) -> Vec<f64> {
        let n = self.grid.len();
        let m = self.m;
        let mut buf: Vec<Complex64> = self
            .samples
            .chunks(n)
            .zip(&self.window)
            .flat_map(|(row, &w)| row.iter().map(move |z| z * w))
            .collect();
        let row_fft = plan(n, false);
        for row in buf.chunks_mut(n) {
            row_fft.process(row);
        }
        let col_fft = plan(m, false);
        let mut col = vec![Complex64::new(0.0, 0.0); m];
        for k in 0..n {
            for p in 0..m {
                col[p] = buf[p * n + k];
            }
            col_fft.process(&mut col);
            for p in 0..m {
                buf[p * n + k] = col[p];
            }
        }
        let scale = self.grid.dt() * self.grid.spacing();
        buf.iter().map(|z| z.norm() * scale).collect()
    }

    /// Windowed space-time `L²` norm `(dt h Σ |w u|²)^{1/2}`.
    pub fn windowed_l2(&self) -> f64 {
        let n = self.grid.len();
        let sum: f64 = self
            .samples
            .chunks(n)
            .zip(&self.window)
            .map(|(row, w)| w * w * row.iter().map(|z| z.norm_sqr()).sum::<f64>())
            .sum();
        (self.grid.dt() * self.grid.spacing() * sum).sqrt()
    }
}

/// Z and Y norms from precomputed magnitudes; shared by the FFT path and the
/// reference path so both apply identical weights.
pub(crate) fn z_from_magnitudes(
    grid: &GridSpec,
    taus: &[f64],
    mags: &[f64],
    s: f64,
    b: f64,
    sign: Sign,
) -> f64 {
    let n = grid.len();
    let xis = frequencies(grid);
    let sg = sign.value();
    let mut sum = 0.0;
    for (p, &tau) in taus.iter().enumerate() {
        for (k, &xi) in xis.iter().enumerate() {
            let a = mags[p * n + k];
            if a == 0.0 {
                continue;
            }
            let w = bracket(tau - sg * xi).powf(s) * bracket(tau + sg * xi).powf(b);
            sum += (w * a).powi(2);
        }
    }
    let span = taus.len() as f64 * grid.dt();
    (sum / (grid.period() * span)).sqrt()
}

pub(crate) fn y_from_magnitudes(
    grid: &GridSpec,
    taus: &[f64],
    mags: &[f64],
    s: f64,
    b: f64,
    sign: Sign,
) -> f64 {
    let n = grid.len();
    let xis = frequencies(grid);
    let sg = sign.value();
    let span = taus.len() as f64 * grid.dt();
    let mut sum = 0.0;
    for (k, &xi) in xis.iter().enumerate() {
        let l1: f64 = taus
            .iter()
            .enumerate()
            .map(|(p, &tau)| bracket(tau + sg * xi).powf(b) * mags[p * n + k])
            .sum::<f64>()
            / span;
        sum += bracket(xi).powf(2.0 * s) * l1 * l1;
    }
    (sum / grid.period()).sqrt()
}

/// `‖⟨τ ∓ ξ⟩^s ⟨τ ± ξ⟩^b ũ‖_{L²_{τ,ξ}}` of the windowed block.
pub fn z_norm(block: &SpaceTimeBlock, s: f64, b: f64, sign: Sign) -> f64 {
    let mags = block.spectrum_magnitudes();
    z_from_magnitudes(&block.grid, &block.tau_frequencies(), &mags, s, b, sign)
}

/// `‖⟨ξ⟩^s ⟨τ ± ξ⟩^b ũ‖_{L²_ξ L¹_τ}` of the windowed block.
pub fn y_norm(block: &SpaceTimeBlock, s: f64, b: f64, sign: Sign) -> f64 {
    let mags = block.spectrum_magnitudes();
    y_from_magnitudes(&block.grid, &block.tau_frequencies(), &mags, s, b, sign)
}

/// `sup_p ‖u(t_p)‖_{H^s}` over rows where the window equals one.
pub fn sup_time_sobolev(block: &SpaceTimeBlock, s: f64) -> f64 {
    (0..block.times())
        .filter(|&p| block.window()[p] == 1.0)
        .map(|p| sobolev_norm(&block.grid, block.row(p), s))
        .fold(0.0, f64::max)
}

/// A norm family together with its exponents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormSpec {
    Hs { s: f64 },
    BesovHalf,
    Z { s: f64, b: f64, sign: Sign },
    Y { s: f64, b: f64, sign: Sign },
}

impl NormSpec {
    pub fn is_space_time(&self) -> bool {
        matches!(self, NormSpec::Z { .. } | NormSpec::Y { .. })
    }

    pub fn of_function(&self, f: &GridFunction) -> Result<f64> {
        match *self {
            NormSpec::Hs { s } => Ok(f.sobolev_norm(s)),
            NormSpec::BesovHalf => Ok(f.besov_half_norm()),
            _ => Err(Error::Spaces("space-time norm applied to a function of x".into())),
        }
    }

    pub fn of_block(&self, block: &SpaceTimeBlock) -> Result<f64> {
        match *self {
            NormSpec::Z { s, b, sign } => Ok(z_norm(block, s, b, sign)),
            NormSpec::Y { s, b, sign } => Ok(y_norm(block, s, b, sign)),
            _ => Err(Error::Spaces("spatial norm applied to a space-time block".into())),
        }
    }
}

/// `c ≺ {a, b}`: either `a+b ≥ 0, c ≤ min(a,b), c < a+b-1/2` or
/// `a+b > 0, c < min(a,b), c ≤ a+b-1/2`.
pub fn prec_condition(a: f64, b: f64, c: f64) -> bool {
    let sum = a + b;
    let lo = a.min(b);
    let first = sum >= 0.0 && c <= lo && c < sum - 0.5;
    let second = sum > 0.0 && c < lo && c <= sum - 0.5;
    first || second
}

/// Direct-summation transforms and norms, `O(N²)` per spatial transform.
///
/// These never touch the FFT and evaluate every exponential explicitly; they
/// exist to cross-check the fast path.
pub mod reference {
    use super::*;

    /// `f̂_k = h Σ_j f(x_j) e^{-i ξ_k x_j}` by explicit summation, bin order.
    pub fn coefficients(grid: &GridSpec, values: &[Complex64]) -> Vec<Complex64> {
        let n = grid.len();
        let h = grid.spacing();
        (0..n)
            .map(|i| {
                let xi = frequency(grid, bin_mode(i, n));
                values
                    .iter()
                    .enumerate()
                    .map(|(j, f)| f * Complex64::from_polar(1.0, -xi * grid.x(j)))
                    .sum::<Complex64>()
                    * h
            })
            .collect()
    }

    pub fn sobolev_norm(grid: &GridSpec, values: &[Complex64], s: f64) -> f64 {
        let n = grid.len();
        let c = coefficients(grid, values);
        let sum: f64 = (0..n)
            .map(|i| bracket(frequency(grid, bin_mode(i, n))).powf(2.0 * s) * c[i].norm_sqr())
            .sum();
        (sum / grid.period()).sqrt()
    }

    /// Dyadic sum with block membership tested directly on `|ξ|`.
    pub fn besov_half_norm(grid: &GridSpec, values: &[Complex64]) -> f64 {
        let n = grid.len();
        let c = coefficients(grid, values);
        let xi_max = max_frequency(grid);
        let mut total = 0.0;
        let mut block = 1.0f64;
        loop {
            let lo = if block == 1.0 { -1.0 } else { block / 2.0 };
            let sum: f64 = (0..n)
                .filter(|&i| {
                    let a = frequency(grid, bin_mode(i, n)).abs();
                    a > lo && a <= block
                })
                .map(|i| c[i].norm_sqr())
                .sum();
            total += block.sqrt() * (sum / grid.period()).sqrt();
            if block >= xi_max {
                break;
            }
            block *= 2.0;
        }
        total
    }

    /// `|ũ(τ_p, ξ_k)|` by separable direct summation.
    pub fn block_magnitudes(block: &SpaceTimeBlock) -> Vec<f64> {
        let grid = block.grid;
        let n = grid.len();
        let m = block.times();
        let dt = grid.dt();
        let span = m as f64 * dt;
        let rows: Vec<Vec<Complex64>> = (0..m)
            .map(|p| {
                let w = block.window()[p];
                let windowed: Vec<Complex64> = block.row(p).iter().map(|z| z * w).collect();
                coefficients(&grid, &windowed)
            })
            .collect();
        let mut out = vec![0.0; m * n];
        for q in 0..m {
            let tau = 2.0 * PI * bin_mode(q, m) as f64 / span;
            for k in 0..n {
                let acc: Complex64 = (0..m)
                    .map(|p| rows[p][k] * Complex64::from_polar(1.0, -tau * (p as f64 * dt)))
                    .sum();
                out[q * n + k] = acc.norm() * dt;
            }
        }
        out
    }

    pub fn z_norm(block: &SpaceTimeBlock, s: f64, b: f64, sign: Sign) -> f64 {
        let mags = block_magnitudes(block);
        z_from_magnitudes(&block.grid, &block.tau_frequencies(), &mags, s, b, sign)
    }

    pub fn y_norm(block: &SpaceTimeBlock, s: f64, b: f64, sign: Sign) -> f64 {
        let mags = block_magnitudes(block);
        y_from_magnitudes(&block.grid, &block.tau_frequencies(), &mags, s, b, sign)
    }
}
