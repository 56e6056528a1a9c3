//! Strict `key=value` config files.
//!
//! One entry per line, `#` starts a comment line, keys are dotted
//! (`grid.L=16`). Every key is checked against a closed list before any value
//! is interpreted, so a typo never silently falls back to a default.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::lattice::{make_grid, DataSpec, GridSpec};
use crate::probes::{BilinearExponents, BilinearKind, PairFamily};
use crate::solver::Scheme;
use crate::spaces::Sign;

/// Every accepted key.
pub const KEYS: &[&str] = &[
    "scenario",
    "seed",
    "output.dir",
    "grid.L",
    "grid.N",
    "physics.m",
    "data.f_plus",
    "data.f_minus",
    "data.a_plus",
    "data.a_minus",
    "data.norm",
    "run.T",
    "run.scheme",
    "run.record_every",
    "study.N",
    "bound.r",
    "constraint.t",
    "delgado.scheme",
    "picard.K",
    "probe.ensemble",
    "product.stable",
    "product.witness",
    "product.family",
    "besov.s",
    "dilation.s",
    "dilation.T",
    "bilinear.kind",
    "bilinear.exponents",
    "bilinear.sign",
    "bilinear.max_frequency",
    "energy.s",
    "energy.b",
    "energy.sign",
    "oracles.samples",
    "oracles.N",
    "oracles.block",
    "embed.samples",
    "tol.transport",
    "tol.drift",
    "tol.order_min",
    "tol.order_max",
    "tol.modulus",
    "tol.superposition",
    "tol.remainder",
    "tol.constraint",
    "tol.picard_factor",
    "tol.picard_distance",
    "tol.oracle",
    "tol.embed",
    "tol.stable",
    "tol.growth",
    "tol.reconstruction",
    "tol.spread",
    "tol.contrast",
    "tol.gauge_ratio",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Run,
    Convergence,
    Charge,
    Constraint,
    Scaling,
    Delgado,
    GlobalBound,
    Picard,
    ProbeProduct,
    ProbeBesov,
    ProbeDilation,
    ProbeBilinear,
    ProbeEnergy,
    NormOracles,
    YEmbed,
}

impl Scenario {
    pub const ALL: [Scenario; 15] = [
        Scenario::Run,
        Scenario::Convergence,
        Scenario::Charge,
        Scenario::Constraint,
        Scenario::Scaling,
        Scenario::Delgado,
        Scenario::GlobalBound,
        Scenario::Picard,
        Scenario::ProbeProduct,
        Scenario::ProbeBesov,
        Scenario::ProbeDilation,
        Scenario::ProbeBilinear,
        Scenario::ProbeEnergy,
        Scenario::NormOracles,
        Scenario::YEmbed,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Scenario::Run => "run",
            Scenario::Convergence => "convergence",
            Scenario::Charge => "charge",
            Scenario::Constraint => "constraint",
            Scenario::Scaling => "scaling",
            Scenario::Delgado => "delgado",
            Scenario::GlobalBound => "global_bound",
            Scenario::Picard => "picard",
            Scenario::ProbeProduct => "probe_product",
            Scenario::ProbeBesov => "probe_besov",
            Scenario::ProbeDilation => "probe_dilation",
            Scenario::ProbeBilinear => "probe_bilinear",
            Scenario::ProbeEnergy => "probe_energy",
            Scenario::NormOracles => "norm_oracles",
            Scenario::YEmbed => "y_embed",
        }
    }

    pub fn description(&self) -> &'static str {
        match self {
            Scenario::Run => "single evolution, diagnostics CSV; exact-transport check when source-free",
            Scenario::Convergence => "self-convergence table over study.N",
            Scenario::Charge => "relative charge drift and its refinement order",
            Scenario::Constraint => "centered constraint residual and its refinement order",
            Scenario::Scaling => "m = 0 scaling symmetry, lambda = 2, refinement order",
            Scenario::Delgado => "u = u^L + u^N split: superposition, modulus transport, remainder constant",
            Scenario::GlobalBound => "long run: charge, gauge H^r norms against the integrated source",
            Scenario::Picard => "Picard iteration contraction factors",
            Scenario::ProbeProduct => "Sobolev product ratios and trichotomy reconstruction",
            Scenario::ProbeBesov => "Besov product ratios and trichotomy shares",
            Scenario::ProbeDilation => "cutoff multiplier ratios across time scales",
            Scenario::ProbeBilinear => "bilinear null-structure ratios, opposite vs same pairing",
            Scenario::ProbeEnergy => "energy inequality ratios (exploratory)",
            Scenario::NormOracles => "FFT norms against direct-summation oracles",
            Scenario::YEmbed => "sup_t H^s against the Y^{s,0} norm",
        }
    }

    pub fn parse(s: &str) -> Option<Scenario> {
        Scenario::ALL.iter().copied().find(|sc| sc.name() == s)
    }

    /// Probe scenario reachable as `csd probe <name>`.
    pub fn probe(name: &str) -> Option<Scenario> {
        Scenario::parse(&format!("probe_{name}"))
    }
}

/// Assertion thresholds. Defaults are the acceptance values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub transport: f64,
    pub drift: f64,
    pub order_min: f64,
    pub order_max: f64,
    pub modulus: f64,
    pub superposition: f64,
    pub remainder: f64,
    pub constraint: f64,
    pub picard_factor: f64,
    pub picard_distance: f64,
    pub oracle: f64,
    pub embed: f64,
    pub stable: f64,
    pub growth: f64,
    pub reconstruction: f64,
    pub spread: f64,
    pub contrast: f64,
    pub gauge_ratio: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            transport: 1e-12,
            drift: 1e-5,
            order_min: 1.8,
            order_max: 2.2,
            modulus: 1e-12,
            superposition: 1e-12,
            remainder: 0.1,
            constraint: 1e-3,
            picard_factor: 0.5,
            picard_distance: 1e-4,
            oracle: 1e-10,
            embed: 1e-8,
            stable: 0.1,
            growth: 0.3,
            reconstruction: 1e-10,
            spread: 0.2,
            contrast: 2.0,
            gauge_ratio: 3.0,
        }
    }
}

/// Scenario-specific parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    pub gauge_r: f64,
    pub constraint_t: f64,
    pub delgado_scheme: Scheme,
    pub picard_iterations: usize,
    pub ensemble: usize,
    pub product_stable: Option<[f64; 3]>,
    pub product_witness: Option<[f64; 3]>,
    pub product_family: PairFamily,
    pub besov_s: f64,
    pub dilation_s: Vec<f64>,
    pub dilation_t: Vec<f64>,
    pub bilinear_kind: BilinearKind,
    pub bilinear_exponents: BilinearExponents,
    pub bilinear_sign: Sign,
    pub bilinear_max_frequency: f64,
    pub energy_s: f64,
    pub energy_b: f64,
    pub energy_sign: Sign,
    pub oracle_samples: usize,
    pub oracle_n: usize,
    pub oracle_block: usize,
    pub embed_samples: usize,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            gauge_r: -0.25,
            constraint_t: 1.0,
            delgado_scheme: Scheme::Pc2,
            picard_iterations: 6,
            ensemble: 100,
            product_stable: None,
            product_witness: None,
            product_family: PairFamily::Coherent,
            besov_s: 0.25,
            dilation_s: vec![-0.4, 0.0, 0.4],
            dilation_t: vec![1.0, 0.5, 0.25, 0.125, 0.0625],
            bilinear_kind: BilinearKind::YEst,
            bilinear_exponents: BilinearExponents {
                s: 0.0,
                b: 0.0,
                s1: 0.0,
                b1: 0.6,
                s2: 0.0,
                b2: 0.6,
                a0: 0.0,
                b0: 0.0,
            },
            bilinear_sign: Sign::Plus,
            bilinear_max_frequency: 4.0,
            energy_s: 0.0,
            energy_b: 0.6,
            energy_sign: Sign::Plus,
            oracle_samples: 20,
            oracle_n: 128,
            oracle_block: 64,
            embed_samples: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub grid: GridSpec,
    pub mass: f64,
    pub f_plus: DataSpec,
    pub f_minus: DataSpec,
    pub a_plus: DataSpec,
    pub a_minus: DataSpec,
    /// Rescale all four data fields so that `‖f+‖ + ‖f-‖ + ‖a+‖ + ‖a-‖` (grid `L²`) equals this.
    pub data_norm: Option<f64>,
    pub t_final: f64,
    pub scheme: Scheme,
    pub record_every: usize,
    pub study_n: Vec<usize>,
    pub params: Params,
    pub tol: Tolerances,
}

impl ExperimentConfig {
    /// Defaults for everything but the scenario: `L = 16`, `N = 256`, zero data, `T = 1`.
    pub fn new(scenario: Scenario) -> Self {
        ExperimentConfig {
            scenario,
            seed: 0,
            output_dir: PathBuf::from("out"),
            grid: make_grid(16.0, 256).expect("default grid is valid"),
            mass: 0.0,
            f_plus: DataSpec::zero(),
            f_minus: DataSpec::zero(),
            a_plus: DataSpec::zero(),
            a_minus: DataSpec::zero(),
            data_norm: None,
            t_final: 1.0,
            scheme: Scheme::Pc2,
            record_every: 1,
            study_n: Vec::new(),
            params: Params::default(),
            tol: Tolerances::default(),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        parse_config(&text, base)
    }
}

struct Entry {
    line: usize,
    value: String,
}

/// Parse config text; relative data-file paths resolve against `base`.
pub fn parse_config(text: &str, base: &Path) -> Result<ExperimentConfig> {
    let mut entries: BTreeMap<&'static str, Entry> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let Some((k, v)) = trimmed.split_once('=') else {
            return Err(Error::Config {
                line,
                key: trimmed.to_string(),
                message: "expected `key=value`".into(),
            });
        };
        let k = k.trim();
        let Some(&known) = KEYS.iter().find(|&&key| key == k) else {
            return Err(Error::Config {
                line,
                key: k.to_string(),
                message: "unknown key".into(),
            });
        };
        if let Some(prev) = entries.get(known) {
            return Err(Error::Config {
                line,
                key: k.to_string(),
                message: format!("duplicate key (first set on line {})", prev.line),
            });
        }
        entries.insert(
            known,
            Entry {
                line,
                value: v.trim().to_string(),
            },
        );
    }
    build(&entries, base)
}

fn bad(key: &str, e: &Entry, message: impl Into<String>) -> Error {
    Error::Config {
        line: e.line,
        key: key.to_string(),
        message: message.into(),
    }
}

struct Reader<'a> {
    entries: &'a BTreeMap<&'static str, Entry>,
}

impl Reader<'_> {
    fn get<T>(&self, key: &str, parse: impl Fn(&str) -> std::result::Result<T, String>) -> Result<Option<T>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(e) => parse(&e.value).map(Some).map_err(|m| bad(key, e, m)),
        }
    }

    fn f64(&self, key: &str) -> Result<Option<f64>> {
        self.get(key, parse_f64)
    }

    fn usize(&self, key: &str) -> Result<Option<usize>> {
        self.get(key, |s| s.parse::<usize>().map_err(|_| format!("expected a non-negative integer, got `{s}`")))
    }

    fn list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        self.get(key, parse_list)
    }

    fn check(&self, key: &str, ok: bool, message: &str) -> Result<()> {
        match self.entries.get(key) {
            Some(e) if !ok => Err(bad(key, e, message)),
            _ => Ok(()),
        }
    }
}

fn parse_f64(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(format!("expected a finite number, got `{s}`")),
    }
}

fn parse_list(s: &str) -> std::result::Result<Vec<f64>, String> {
    s.split(',').map(|t| parse_f64(t.trim())).collect()
}

fn parse_sign(s: &str) -> std::result::Result<Sign, String> {
    Sign::parse(s).ok_or_else(|| format!("expected `+` or `-`, got `{s}`"))
}

fn parse_scheme(s: &str) -> std::result::Result<Scheme, String> {
    Scheme::parse(s).ok_or_else(|| format!("expected `pc2` or `exact_phase`, got `{s}`"))
}

fn triple(s: &str) -> std::result::Result<[f64; 3], String> {
    let v = parse_list(s)?;
    <[f64; 3]>::try_from(v.as_slice()).map_err(|_| format!("expected three numbers `a,b,c`, got `{s}`"))
}

/// Data spec syntax: `zero`, `gaussian(center=.., width=.., amplitude=..)`,
/// `plane_wave(k=.., amplitude=..)`, `random_sobolev(s=.., seed=.., norm=.., hermitian=..)`, `file(path)`.
pub fn parse_data_spec(s: &str, base: &Path) -> std::result::Result<DataSpec, String> {
    let s = s.trim();
    if s == "zero" {
        return Ok(DataSpec::zero());
    }
    let (kind, rest) = s.split_once('(').ok_or_else(|| format!("expected `kind(...)`, got `{s}`"))?;
    let body = rest
        .strip_suffix(')')
        .ok_or_else(|| format!("missing closing parenthesis in `{s}`"))?;
    let kind = kind.trim();
    if kind == "file" {
        let p = PathBuf::from(body.trim());
        return Ok(DataSpec::File {
            path: if p.is_absolute() { p } else { base.join(p) },
        });
    }
    let mut args = BTreeMap::new();
    for part in body.split(',').filter(|p| !p.trim().is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| format!("expected `name=value` in `{part}`"))?;
        if args.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
            return Err(format!("repeated argument `{}`", k.trim()));
        }
    }
    let allowed: &[&str] = match kind {
        "gaussian" => &["center", "width", "amplitude"],
        "plane_wave" => &["k", "amplitude"],
        "random_sobolev" => &["s", "seed", "norm", "hermitian"],
        _ => return Err(format!("unknown data kind `{kind}`")),
    };
    if let Some(k) = args.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(format!("unknown argument `{k}` for {kind}"));
    }
    let num = |name: &str| -> std::result::Result<f64, String> {
        let v = args.get(name).ok_or_else(|| format!("{kind} needs `{name}`"))?;
        parse_f64(v)
    };
    match kind {
        "gaussian" => Ok(DataSpec::gaussian(num("center")?, num("width")?, num("amplitude")?)),
        "plane_wave" => {
            let k = args.get("k").ok_or("plane_wave needs `k`")?;
            let k = k.parse::<i64>().map_err(|_| format!("`k` must be an integer, got `{k}`"))?;
            Ok(DataSpec::PlaneWave {
                k,
                amplitude: num("amplitude")?,
            })
        }
        _ => {
            let seed = args.get("seed").ok_or("random_sobolev needs `seed`")?;
            let seed = seed.parse::<u64>().map_err(|_| format!("`seed` must be an integer, got `{seed}`"))?;
            let hermitian = match args.get("hermitian").map(String::as_str) {
                None | Some("false") => false,
                Some("true") => true,
                Some(other) => return Err(format!("`hermitian` must be true or false, got `{other}`")),
            };
            Ok(DataSpec::RandomSobolev {
                s: num("s")?,
                seed,
                norm: num("norm")?,
                hermitian,
            })
        }
    }
}

fn build(entries: &BTreeMap<&'static str, Entry>, base: &Path) -> Result<ExperimentConfig> {
    let r = Reader { entries };
    let scenario = match entries.get("scenario") {
        Some(e) => Scenario::parse(&e.value).ok_or_else(|| bad("scenario", e, format!("unknown scenario `{}`", e.value)))?,
        None => {
            return Err(Error::Config {
                line: 0,
                key: "scenario".into(),
                message: "missing".into(),
            })
        }
    };
    let mut c = ExperimentConfig::new(scenario);
    if let Some(seed) = r.get("seed", |s| s.parse::<u64>().map_err(|_| format!("expected an unsigned integer, got `{s}`")))? {
        c.seed = seed;
    }
    if let Some(dir) = r.get("output.dir", |s| Ok(PathBuf::from(s)))? {
        c.output_dir = dir;
    }

    let l = r.f64("grid.L")?.unwrap_or(c.grid.half_width());
    let n = r.usize("grid.N")?.unwrap_or(c.grid.len());
    c.grid = match make_grid(l, n) {
        Ok(g) => g,
        Err(err) => {
            let key = if entries.contains_key("grid.N") { "grid.N" } else { "grid.L" };
            return Err(match entries.get(key) {
                Some(e) => bad(key, e, err.to_string()),
                None => Error::Config {
                    line: 0,
                    key: key.into(),
                    message: err.to_string(),
                },
            });
        }
    };

    c.mass = r.f64("physics.m")?.unwrap_or(0.0);
    for (key, slot) in [
        ("data.f_plus", &mut c.f_plus),
        ("data.f_minus", &mut c.f_minus),
        ("data.a_plus", &mut c.a_plus),
        ("data.a_minus", &mut c.a_minus),
    ] {
        if let Some(spec) = r.get(key, |s| parse_data_spec(s, base))? {
            *slot = spec;
        }
    }
    c.data_norm = r.f64("data.norm")?;
    r.check("data.norm", c.data_norm.is_none_or(|v| v > 0.0), "must be positive")?;

    c.t_final = r.f64("run.T")?.unwrap_or(c.t_final);
    r.check("run.T", c.t_final > 0.0, "must be positive")?;
    c.scheme = r.get("run.scheme", parse_scheme)?.unwrap_or(Scheme::Pc2);
    r.check(
        "run.scheme",
        c.scheme != Scheme::ExactPhase || c.mass == 0.0,
        "exact_phase requires physics.m = 0",
    )?;
    c.record_every = r.usize("run.record_every")?.unwrap_or(1);
    r.check("run.record_every", c.record_every >= 1, "must be at least 1")?;

    if let Some(list) = r.get("study.N", |s| {
        s.split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|_| format!("expected integers, got `{t}`")))
            .collect::<std::result::Result<Vec<_>, _>>()
    })? {
        let increasing = list.windows(2).all(|w| w[1] > w[0]);
        r.check("study.N", !list.is_empty() && increasing, "must be a strictly increasing list")?;
        c.study_n = list;
    }

    let p = &mut c.params;
    p.gauge_r = r.f64("bound.r")?.unwrap_or(p.gauge_r);
    r.check("bound.r", p.gauge_r > -0.5 && p.gauge_r <= 0.0, "must lie in (-1/2, 0]")?;
    p.constraint_t = r.f64("constraint.t")?.unwrap_or(p.constraint_t);
    r.check("constraint.t", p.constraint_t > 0.0, "must be positive")?;
    p.delgado_scheme = r.get("delgado.scheme", parse_scheme)?.unwrap_or(p.delgado_scheme);
    p.picard_iterations = r.usize("picard.K")?.unwrap_or(p.picard_iterations);
    r.check("picard.K", p.picard_iterations >= 2, "must be at least 2")?;
    p.ensemble = r.usize("probe.ensemble")?.unwrap_or(p.ensemble);
    r.check(
        "probe.ensemble",
        p.ensemble >= crate::probes::MIN_ENSEMBLE,
        &format!("must be at least {}", crate::probes::MIN_ENSEMBLE),
    )?;
    p.product_stable = r.get("product.stable", triple)?;
    p.product_witness = r.get("product.witness", triple)?;
    if let Some([a, b, cc]) = p.product_stable {
        r.check("product.stable", crate::spaces::prec_condition(a, b, cc), "exponents must satisfy c ≺ {a, b}")?;
    }
    if let Some([a, b, cc]) = p.product_witness {
        r.check("product.witness", !crate::spaces::prec_condition(a, b, cc), "witness exponents must violate c ≺ {a, b}")?;
    }
    p.product_family = r
        .get("product.family", |s| PairFamily::parse(s).ok_or_else(|| format!("expected `independent` or `coherent`, got `{s}`")))?
        .unwrap_or(p.product_family);
    p.besov_s = r.f64("besov.s")?.unwrap_or(p.besov_s);
    r.check("besov.s", p.besov_s > -0.5 && p.besov_s < 0.5, "must lie in (-1/2, 1/2)")?;
    p.dilation_s = r.list("dilation.s")?.unwrap_or(p.dilation_s.clone());
    r.check(
        "dilation.s",
        p.dilation_s.iter().all(|s| *s > -0.5 && *s < 0.5),
        "each s must lie in (-1/2, 1/2)",
    )?;
    p.dilation_t = r.list("dilation.T")?.unwrap_or(p.dilation_t.clone());
    r.check(
        "dilation.T",
        p.dilation_t.iter().all(|t| *t > 0.0 && *t <= 1.0),
        "each T must lie in (0, 1]",
    )?;
    p.bilinear_kind = r
        .get("bilinear.kind", |s| BilinearKind::parse(s).ok_or_else(|| format!("expected `y_est` or `z_est`, got `{s}`")))?
        .unwrap_or(p.bilinear_kind);
    if let Some(v) = r.list("bilinear.exponents")? {
        r.check("bilinear.exponents", v.len() == 8, "expected eight numbers `s,b,s1,b1,s2,b2,a0,b0`")?;
        p.bilinear_exponents = BilinearExponents {
            s: v[0],
            b: v[1],
            s1: v[2],
            b1: v[3],
            s2: v[4],
            b2: v[5],
            a0: v[6],
            b0: v[7],
        };
    }
    p.bilinear_sign = r.get("bilinear.sign", parse_sign)?.unwrap_or(p.bilinear_sign);
    p.bilinear_max_frequency = r.f64("bilinear.max_frequency")?.unwrap_or(p.bilinear_max_frequency);
    r.check("bilinear.max_frequency", p.bilinear_max_frequency > 0.0, "must be positive")?;
    p.energy_s = r.f64("energy.s")?.unwrap_or(p.energy_s);
    p.energy_b = r.f64("energy.b")?.unwrap_or(p.energy_b);
    r.check("energy.b", p.energy_b > 0.5 && p.energy_b < 1.0, "must lie in (1/2, 1)")?;
    p.energy_sign = r.get("energy.sign", parse_sign)?.unwrap_or(p.energy_sign);
    p.oracle_samples = r.usize("oracles.samples")?.unwrap_or(p.oracle_samples);
    p.oracle_n = r.usize("oracles.N")?.unwrap_or(p.oracle_n);
    p.oracle_block = r.usize("oracles.block")?.unwrap_or(p.oracle_block);
    r.check("oracles.block", p.oracle_block >= 8, "must be at least 8")?;
    p.embed_samples = r.usize("embed.samples")?.unwrap_or(p.embed_samples);

    let t = &mut c.tol;
    for (key, slot) in [
        ("tol.transport", &mut t.transport),
        ("tol.drift", &mut t.drift),
        ("tol.order_min", &mut t.order_min),
        ("tol.order_max", &mut t.order_max),
        ("tol.modulus", &mut t.modulus),
        ("tol.superposition", &mut t.superposition),
        ("tol.remainder", &mut t.remainder),
        ("tol.constraint", &mut t.constraint),
        ("tol.picard_factor", &mut t.picard_factor),
        ("tol.picard_distance", &mut t.picard_distance),
        ("tol.oracle", &mut t.oracle),
        ("tol.embed", &mut t.embed),
        ("tol.stable", &mut t.stable),
        ("tol.growth", &mut t.growth),
        ("tol.reconstruction", &mut t.reconstruction),
        ("tol.spread", &mut t.spread),
        ("tol.contrast", &mut t.contrast),
        ("tol.gauge_ratio", &mut t.gauge_ratio),
    ] {
        if let Some(v) = r.f64(key)? {
            *slot = v;
        }
    }
    Ok(c)
}
