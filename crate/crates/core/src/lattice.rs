//! Periodic light-cone lattice, field containers and initial data.
//!
//! The whole line is replaced by the periodic interval `[-L, L)`. Every field
//! moves with speed exactly one, so a run with compactly supported data and
//! final time `T < L - R` (with `R` the support radius) never feels the
//! wrap-around and coincides with the whole-line problem. Choose `L` with this
//! in mind; nothing here enforces it.

use std::fmt;
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spaces;

/// Periodic lattice on `[-L, L)` with `N` nodes and unit CFL time step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    half_width: f64,
    points: usize,
    spacing: f64,
}

impl GridSpec {
    pub fn new(half_width: f64, points: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::Grid(format!(
                "half width must be positive and finite, got {half_width}"
            )));
        }
        if points < 8 || !points.is_multiple_of(2) {
            return Err(Error::Grid(format!(
                "point count must be even and at least 8, got {points}"
            )));
        }
        Ok(GridSpec {
            half_width,
            points,
            spacing: 2.0 * half_width / points as f64,
        })
    }

    /// `L` of the periodic interval `[-L, L)`.
    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn len(&self) -> usize {
        self.points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Always equal to the spacing.
    pub fn dt(&self) -> f64 {
        self.spacing
    }

    pub fn period(&self) -> f64 {
        2.0 * self.half_width
    }

    pub fn x(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.spacing
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.points).map(|j| self.x(j)).collect()
    }

    /// Same interval, twice the nodes. Node `j` of `self` is node `2j` of the result.
    pub fn refined(&self) -> GridSpec {
        GridSpec {
            half_width: self.half_width,
            points: 2 * self.points,
            spacing: self.spacing / 2.0,
        }
    }

    /// Interval and node count both multiplied by `factor`; spacing unchanged.
    pub fn dilated(&self, factor: usize) -> Result<GridSpec> {
        GridSpec::new(self.half_width * factor as f64, self.points * factor)
    }

    /// Signed distance `x - c` folded into `[-L, L)`.
    pub fn periodic_offset(&self, x: f64, c: f64) -> f64 {
        let p = self.period();
        let d = (x - c + self.half_width).rem_euclid(p);
        d - self.half_width
    }
}

/// Validating constructor for a [`GridSpec`].
pub fn make_grid(half_width: f64, points: usize) -> Result<GridSpec> {
    GridSpec::new(half_width, points)
}

/// Initial data for one field component.
#[derive(Debug, Clone, PartialEq)]
pub enum DataSpec {
    /// `amplitude * exp(-(x - center)^2 / (2 width^2))`, distance taken periodically.
    Gaussian {
        center: f64,
        width: f64,
        amplitude: f64,
    },
    /// `amplitude * exp(i pi k x / L)`.
    PlaneWave { k: i64, amplitude: f64 },
    /// Random Fourier series at regularity `s`, rescaled to `‖·‖_{H^s} = norm`.
    RandomSobolev {
        s: f64,
        seed: u64,
        norm: f64,
        hermitian: bool,
    },
    /// Plain text, one node per line: `re im` or `val`.
    File { path: PathBuf },
}

impl DataSpec {
    pub fn zero() -> Self {
        DataSpec::Gaussian {
            center: 0.0,
            width: 1.0,
            amplitude: 0.0,
        }
    }

    pub fn gaussian(center: f64, width: f64, amplitude: f64) -> Self {
        DataSpec::Gaussian {
            center,
            width,
            amplitude,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            DataSpec::Gaussian { .. } => "gaussian",
            DataSpec::PlaneWave { .. } => "plane_wave",
            DataSpec::RandomSobolev { .. } => "random_sobolev",
            DataSpec::File { .. } => "file",
        }
    }

    pub fn validate(&self, grid: &GridSpec) -> Result<()> {
        match *self {
            DataSpec::Gaussian {
                center,
                width,
                amplitude,
            } => {
                if !(width > 0.0 && width.is_finite()) {
                    return Err(Error::Data(format!("gaussian width must be > 0, got {width}")));
                }
                if !center.is_finite() || !amplitude.is_finite() {
                    return Err(Error::Data("gaussian parameters must be finite".into()));
                }
            }
            DataSpec::PlaneWave { k, amplitude } => {
                let kmax = (grid.len() / 2 - 1) as i64;
                if k.abs() > kmax {
                    return Err(Error::Data(format!(
                        "plane wave mode |{k}| exceeds N/2 - 1 = {kmax}"
                    )));
                }
                if !amplitude.is_finite() {
                    return Err(Error::Data("plane wave amplitude must be finite".into()));
                }
            }
            DataSpec::RandomSobolev { s, norm, .. } => {
                if !(norm > 0.0 && norm.is_finite()) {
                    return Err(Error::Data(format!("target norm must be > 0, got {norm}")));
                }
                if !s.is_finite() {
                    return Err(Error::Data("regularity exponent must be finite".into()));
                }
            }
            DataSpec::File { .. } => {}
        }
        Ok(())
    }

    /// Sample at the lattice nodes.
    pub fn sample(&self, grid: &GridSpec) -> Result<Vec<Complex64>> {
        self.validate(grid)?;
        match self {
            DataSpec::Gaussian {
                center,
                width,
                amplitude,
            } => Ok((0..grid.len())
                .map(|j| {
                    let d = grid.periodic_offset(grid.x(j), *center);
                    Complex64::new(amplitude * (-0.5 * (d / width).powi(2)).exp(), 0.0)
                })
                .collect()),
            DataSpec::PlaneWave { k, amplitude } => {
                let xi = spaces::frequency(grid, *k);
                Ok((0..grid.len())
                    .map(|j| Complex64::from_polar(*amplitude, xi * grid.x(j)))
                    .collect())
            }
            DataSpec::RandomSobolev {
                s,
                seed,
                norm,
                hermitian,
            } => Ok(spaces::random_sobolev_samples(grid, *s, *seed, *norm, *hermitian)),
            DataSpec::File { path } => read_data_file(path, grid.len()),
        }
    }

    /// Data for the dilated problem `(1/λ) g(x/λ)` on the grid dilated by `λ`.
    pub fn rescaled(&self, lambda: f64) -> Result<DataSpec> {
        match *self {
            DataSpec::Gaussian {
                center,
                width,
                amplitude,
            } => Ok(DataSpec::Gaussian {
                center: center * lambda,
                width: width * lambda,
                amplitude: amplitude / lambda,
            }),
            // exp(i pi k (x/λ) / L) = exp(i pi k x / (λ L)): same mode index on the dilated grid.
            DataSpec::PlaneWave { k, amplitude } => Ok(DataSpec::PlaneWave {
                k,
                amplitude: amplitude / lambda,
            }),
            _ => Err(Error::Data(format!(
                "{} data cannot be rescaled analytically",
                self.kind()
            ))),
        }
    }
}

impl fmt::Display for DataSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DataSpec::Gaussian {
                center,
                width,
                amplitude,
            } => write!(f, "gaussian(center={center}, width={width}, amplitude={amplitude})"),
            DataSpec::PlaneWave { k, amplitude } => {
                write!(f, "plane_wave(k={k}, amplitude={amplitude})")
            }
            DataSpec::RandomSobolev {
                s,
                seed,
                norm,
                hermitian,
            } => write!(
                f,
                "random_sobolev(s={s}, seed={seed}, norm={norm}, hermitian={hermitian})"
            ),
            DataSpec::File { path } => write!(f, "file({})", path.display()),
        }
    }
}

fn read_data_file(path: &Path, n: usize) -> Result<Vec<Complex64>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::with_capacity(n);
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let parse = |tok: &str| {
            tok.parse::<f64>().map_err(|_| {
                Error::Data(format!(
                    "{}:{}: cannot parse `{tok}` as a number",
                    path.display(),
                    lineno + 1
                ))
            })
        };
        let toks: Vec<&str> = line.split_whitespace().collect();
        let z = match toks.as_slice() {
            [v] => Complex64::new(parse(v)?, 0.0),
            [re, im] => Complex64::new(parse(re)?, parse(im)?),
            _ => {
                return Err(Error::Data(format!(
                    "{}:{}: expected `re im` or `val`",
                    path.display(),
                    lineno + 1
                )))
            }
        };
        out.push(z);
    }
    if out.len() != n {
        return Err(Error::Data(format!(
            "{}: expected {n} lines, found {}",
            path.display(),
            out.len()
        )));
    }
    Ok(out)
}

/// Write samples in the data-file format (`re im` per line).
pub fn write_data_file(path: &Path, values: &[Complex64]) -> Result<()> {
    let mut text = String::with_capacity(values.len() * 48);
    for z in values {
        text.push_str(&format!("{:.17e} {:.17e}\n", z.re, z.im));
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Null-coordinate fields at one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub grid: GridSpec,
    pub t: f64,
    pub u_plus: Vec<Complex64>,
    pub u_minus: Vec<Complex64>,
    pub a_plus: Vec<f64>,
    pub a_minus: Vec<f64>,
    pub mass: f64,
}

/// Physical fields `(ψ1, ψ2, A0, A1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalFields {
    pub psi1: Vec<Complex64>,
    pub psi2: Vec<Complex64>,
    pub a0: Vec<f64>,
    pub a1: Vec<f64>,
}

impl FieldState {
    pub fn from_arrays(
        grid: GridSpec,
        t: f64,
        u_plus: Vec<Complex64>,
        u_minus: Vec<Complex64>,
        a_plus: Vec<f64>,
        a_minus: Vec<f64>,
        mass: f64,
    ) -> Result<Self> {
        let n = grid.len();
        for (name, len) in [
            ("u_plus", u_plus.len()),
            ("u_minus", u_minus.len()),
            ("a_plus", a_plus.len()),
            ("a_minus", a_minus.len()),
        ] {
            if len != n {
                return Err(Error::Data(format!("{name} has length {len}, grid has {n}")));
            }
        }
        Ok(FieldState {
            grid,
            t,
            u_plus,
            u_minus,
            a_plus,
            a_minus,
            mass,
        })
    }

    pub fn zeros(grid: GridSpec, mass: f64) -> Self {
        let n = grid.len();
        FieldState {
            grid,
            t: 0.0,
            u_plus: vec![Complex64::new(0.0, 0.0); n],
            u_minus: vec![Complex64::new(0.0, 0.0); n],
            a_plus: vec![0.0; n],
            a_minus: vec![0.0; n],
            mass,
        }
    }

    pub fn to_physical(&self) -> PhysicalFields {
        let psi1 = self
            .u_plus
            .iter()
            .zip(&self.u_minus)
            .map(|(p, m)| (p + m) * 0.5)
            .collect();
        let psi2 = self
            .u_plus
            .iter()
            .zip(&self.u_minus)
            .map(|(p, m)| (p - m) * 0.5)
            .collect();
        let a0 = self
            .a_plus
            .iter()
            .zip(&self.a_minus)
            .map(|(p, m)| 0.5 * (p + m))
            .collect();
        let a1 = self
            .a_plus
            .iter()
            .zip(&self.a_minus)
            .map(|(p, m)| 0.5 * (m - p))
            .collect();
        PhysicalFields { psi1, psi2, a0, a1 }
    }

    pub fn from_physical(grid: GridSpec, t: f64, mass: f64, phys: &PhysicalFields) -> Result<Self> {
        let u_plus = phys.psi1.iter().zip(&phys.psi2).map(|(a, b)| a + b).collect();
        let u_minus = phys.psi1.iter().zip(&phys.psi2).map(|(a, b)| a - b).collect();
        let a_plus = phys.a0.iter().zip(&phys.a1).map(|(a, b)| a - b).collect();
        let a_minus = phys.a0.iter().zip(&phys.a1).map(|(a, b)| a + b).collect();
        FieldState::from_arrays(grid, t, u_plus, u_minus, a_plus, a_minus, mass)
    }

    /// First non-finite entry, scanning `u+`, `u-`, `A+`, `A-` in that order.
    pub fn check_finite(&self) -> Result<()> {
        let bad = |field: &'static str, index: usize| Error::NonFinite {
            field,
            index,
            t: self.t,
        };
        if let Some(i) = self.u_plus.iter().position(|z| !z.is_finite()) {
            return Err(bad("u_plus", i));
        }
        if let Some(i) = self.u_minus.iter().position(|z| !z.is_finite()) {
            return Err(bad("u_minus", i));
        }
        if let Some(i) = self.a_plus.iter().position(|a| !a.is_finite()) {
            return Err(bad("a_plus", i));
        }
        if let Some(i) = self.a_minus.iter().position(|a| !a.is_finite()) {
            return Err(bad("a_minus", i));
        }
        Ok(())
    }

    pub fn sup_spinor(&self) -> f64 {
        self.u_plus
            .iter()
            .chain(&self.u_minus)
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn sup_gauge(&self) -> f64 {
        self.a_plus
            .iter()
            .chain(&self.a_minus)
            .map(|a| a.abs())
            .fold(0.0, f64::max)
    }
}

/// Sample the four data specs at the lattice nodes at `t = 0`.
pub fn make_state(
    grid: GridSpec,
    f_plus: &DataSpec,
    f_minus: &DataSpec,
    a_plus: &DataSpec,
    a_minus: &DataSpec,
    mass: f64,
) -> Result<FieldState> {
    if !mass.is_finite() {
        return Err(Error::Data(format!("mass must be finite, got {mass}")));
    }
    let u_plus = f_plus.sample(&grid)?;
    let u_minus = f_minus.sample(&grid)?;
    let a_plus = real_part(a_plus.sample(&grid)?, "a_plus");
    let a_minus = real_part(a_minus.sample(&grid)?, "a_minus");
    FieldState::from_arrays(grid, 0.0, u_plus, u_minus, a_plus, a_minus, mass)
}

fn real_part(values: Vec<Complex64>, name: &str) -> Vec<f64> {
    let residue = values.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if residue > 1e-12 {
        log::warn!("{name}: dropping imaginary part of gauge data (max |Im| = {residue:.3e})");
    }
    values.into_iter().map(|z| z.re).collect()
}

/// Discrete `‖ψ‖²_{L²} = (h/2) Σ_j (|u+_j|² + |u-_j|²)`.
pub fn charge(state: &FieldState) -> f64 {
    let sum: f64 = state
        .u_plus
        .iter()
        .chain(&state.u_minus)
        .map(|z| z.norm_sqr())
        .sum();
    0.5 * state.grid.spacing() * sum
}

/// Circular shift used by exact transport: `out[j] = v[j - shift]` (indices mod N).
pub fn shifted<T: Copy>(v: &[T], shift: isize) -> Vec<T> {
    let n = v.len() as isize;
    (0..n)
        .map(|j| v[(j - shift).rem_euclid(n) as usize])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn grid_arithmetic() {
        let g = make_grid(16.0, 1024).unwrap();
        assert_eq!(g.spacing(), 0.03125);
        assert_eq!(g.dt(), 0.03125);
        let g = make_grid(1.0, 8).unwrap();
        let want = [-1.0, -0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75];
        assert_eq!(g.nodes(), want);
    }

    #[test]
    fn grid_rejects_bad_input() {
        assert!(make_grid(16.0, 1023).is_err());
        assert!(make_grid(16.0, 6).is_err());
        assert!(make_grid(0.0, 64).is_err());
        assert!(make_grid(-1.0, 64).is_err());
        assert!(make_grid(f64::NAN, 64).is_err());
    }

    #[test]
    fn zero_data_has_zero_charge() {
        let g = make_grid(4.0, 64).unwrap();
        let z = DataSpec::zero();
        let s = make_state(g, &z, &z, &z, &z, 1.0).unwrap();
        assert!(s.u_plus.iter().all(|v| *v == c(0.0, 0.0)));
        assert!(s.a_minus.iter().all(|v| *v == 0.0));
        assert_eq!(charge(&s), 0.0);
    }

    #[test]
    fn plane_wave_samples() {
        let g = make_grid(4.0, 64).unwrap();
        let pw = DataSpec::PlaneWave {
            k: 3,
            amplitude: 1.0,
        };
        let z = DataSpec::zero();
        let s = make_state(g, &pw, &z, &z, &z, 0.0).unwrap();
        let xi = 3.0 * std::f64::consts::PI / 4.0;
        for j in 0..64 {
            let want = Complex64::from_polar(1.0, xi * g.x(j));
            assert!((s.u_plus[j] - want).norm() < 1e-15);
        }
        assert!(DataSpec::PlaneWave { k: 32, amplitude: 1.0 }.sample(&g).is_err());
        assert!(DataSpec::PlaneWave { k: -31, amplitude: 1.0 }.sample(&g).is_ok());
    }

    #[test]
    fn gaussian_matches_direct_evaluation() {
        let g = make_grid(16.0, 1024).unwrap();
        let v = DataSpec::gaussian(0.0, 1.0, 1.0).sample(&g).unwrap();
        for (j, z) in v.iter().enumerate() {
            let x = -16.0 + j as f64 / 32.0;
            let want = (-x * x / 2.0).exp();
            assert!((z.re - want).abs() <= 1e-16 * want.max(1e-300) + 1e-300);
            assert_eq!(z.im, 0.0);
        }
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let g = make_grid(4.0, 64).unwrap();
        assert!(DataSpec::gaussian(0.0, 0.0, 1.0).sample(&g).is_err());
        let bad = DataSpec::RandomSobolev {
            s: 0.0,
            seed: 1,
            norm: 0.0,
            hermitian: false,
        };
        assert!(bad.sample(&g).is_err());
    }

    #[test]
    fn physical_variables() {
        let g = make_grid(4.0, 16).unwrap();
        let gvals: Vec<_> = (0..16).map(|j| c(j as f64, -(j as f64))).collect();
        let s = FieldState::from_arrays(
            g,
            0.0,
            gvals.clone(),
            gvals.clone(),
            vec![2.5; 16],
            vec![2.5; 16],
            0.0,
        )
        .unwrap();
        let p = s.to_physical();
        assert!(p.psi2.iter().all(|z| *z == c(0.0, 0.0)));
        assert_eq!(p.psi1, gvals);
        assert!(p.a1.iter().all(|a| *a == 0.0));
        assert!(p.a0.iter().all(|a| *a == 2.5));
    }

    fn random_state(seed: u64, n: usize) -> FieldState {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = make_grid(3.0, n).unwrap();
        let mut cv = || {
            (0..n)
                .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect::<Vec<_>>()
        };
        let up = cv();
        let um = cv();
        let ap = cv().into_iter().map(|z| z.re).collect();
        let am = cv().into_iter().map(|z| z.im).collect();
        FieldState::from_arrays(g, 0.0, up, um, ap, am, 1.0).unwrap()
    }

    #[test]
    fn pointwise_density_identity() {
        let s = random_state(7, 64);
        let p = s.to_physical();
        for j in 0..64 {
            let lhs = p.psi1[j].norm_sqr() + p.psi2[j].norm_sqr();
            let rhs = 0.5 * (s.u_plus[j].norm_sqr() + s.u_minus[j].norm_sqr());
            assert!((lhs - rhs).abs() <= 1e-15 * rhs.max(1.0));
        }
    }

    #[test]
    fn physical_round_trip() {
        // Exact for dyadic rationals; otherwise limited by one rounding per add.
        let g = make_grid(3.0, 8).unwrap();
        let up: Vec<_> = (0..8).map(|j| c(j as f64 * 0.25, 1.5)).collect();
        let um: Vec<_> = (0..8).map(|j| c(-0.5, j as f64)).collect();
        let s = FieldState::from_arrays(g, 0.0, up, um, vec![0.75; 8], vec![-3.0; 8], 1.0).unwrap();
        let back = FieldState::from_physical(g, 0.0, 1.0, &s.to_physical()).unwrap();
        assert_eq!(back, s);

        let s = random_state(11, 128);
        let back = FieldState::from_physical(s.grid, s.t, s.mass, &s.to_physical()).unwrap();
        for j in 0..128 {
            assert!((back.u_plus[j] - s.u_plus[j]).norm() <= 4.0 * f64::EPSILON);
            assert!((back.a_minus[j] - s.a_minus[j]).abs() <= 4.0 * f64::EPSILON);
        }
    }

    #[test]
    fn charge_of_constant() {
        let g = make_grid(5.0, 40).unwrap();
        let n = g.len();
        let cst = c(0.6, -0.8);
        let s = FieldState::from_arrays(
            g,
            0.0,
            vec![cst; n],
            vec![c(0.0, 0.0); n],
            vec![0.0; n],
            vec![0.0; n],
            0.0,
        )
        .unwrap();
        assert!((charge(&s) - cst.norm_sqr() * 5.0).abs() < 1e-13);
    }

    #[test]
    fn gaussian_charge_against_quadrature() {
        // ∫ exp(-x^2/σ^2) dx = σ sqrt(pi) for each Gaussian, halved by the charge normalization.
        let g = make_grid(16.0, 4096).unwrap();
        let f = DataSpec::gaussian(-1.0, 1.3, 0.7);
        let h = DataSpec::gaussian(2.0, 0.8, 1.1);
        let z = DataSpec::zero();
        let s = make_state(g, &f, &h, &z, &z, 0.0).unwrap();
        let pi_sqrt = std::f64::consts::PI.sqrt();
        let want = 0.5 * (0.49 * 1.3 * pi_sqrt + 1.21 * 0.8 * pi_sqrt);
        assert!(((charge(&s) - want) / want).abs() < 1e-10);
    }

    #[test]
    fn data_file_round_trip_and_errors() {
        let dir = tempfile::tempdir().unwrap();
        let g = make_grid(2.0, 8).unwrap();
        let vals: Vec<_> = (0..8).map(|j| c(j as f64 / 3.0, -1.0 / (j as f64 + 1.0))).collect();
        let path = dir.path().join("f.txt");
        write_data_file(&path, &vals).unwrap();
        let back = DataSpec::File { path: path.clone() }.sample(&g).unwrap();
        assert_eq!(back, vals);

        let real = dir.path().join("a.txt");
        std::fs::write(&real, "1\n2\n3\n4\n5\n6\n7\n8\n").unwrap();
        let back = DataSpec::File { path: real }.sample(&g).unwrap();
        assert_eq!(back[3], c(4.0, 0.0));

        let short = dir.path().join("short.txt");
        std::fs::write(&short, "1 0\n2 0\n").unwrap();
        assert!(DataSpec::File { path: short }.sample(&g).is_err());
    }

    #[test]
    fn gauge_imaginary_part_is_dropped() {
        let g = make_grid(4.0, 32).unwrap();
        let pw = DataSpec::PlaneWave { k: 1, amplitude: 1.0 };
        let z = DataSpec::zero();
        let s = make_state(g, &z, &z, &pw, &z, 0.0).unwrap();
        let xi = std::f64::consts::PI / 4.0;
        for j in 0..32 {
            assert!((s.a_plus[j] - (xi * g.x(j)).cos()).abs() < 1e-15);
        }
    }

    #[test]
    fn periodic_offset_folds() {
        let g = make_grid(2.0, 16).unwrap();
        assert!((g.periodic_offset(1.9, -1.9) - (-0.2)).abs() < 1e-12);
        assert!((g.periodic_offset(-1.5, 1.5) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn non_finite_is_located() {
        let mut s = random_state(3, 16);
        s.a_plus[5] = f64::NAN;
        match s.check_finite() {
            Err(Error::NonFinite { field, index, .. }) => {
                assert_eq!(field, "a_plus");
                assert_eq!(index, 5);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
