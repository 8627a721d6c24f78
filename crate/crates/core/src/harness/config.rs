//! Experiment configuration: a JSON document with one section per concern,
//! every field optional, unknown keys rejected.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::bourgain::{LemmaOptions, SpaceTimeGrid};
use crate::error::{Error, Result};
use crate::evolution::PicardConfig;
use crate::spectral::{bracket, sobolev_norm, Field, Grid1D, ModelParams, SpectralField};

/// Defaults, as shown by `dkdv --help`.
pub const DEFAULTS_HELP: &str = "\
Config defaults (JSON, every key optional, unknown keys rejected):
  model   alpha=1 s=-0.9 b=0.5 delta=0.01 nu_probe=0.1 coupling=1
  grid    n_points=512 L=64π n_time=512 T_box=4
  run     dt=1e-3 T=1 record_every=10 s_probe=-0.5
  initial kind=gaussian amplitude=0.5 width=2 (also sech2, random with exponent)
  picard  T=0.5 n_quad=257 max_iters=30 s_c_plus=-0.5 t_box=4
  sweep   s=[-0.9,-0.7] alpha=[0.25] n1_list=[16,32,64,128,256]
  blocks  n_low=[1,2,4] n_high_max=128
  verify  trials=10 (lemma options: theta=0.125 rho=0.4 ...)
  io      out=\"out\" seed=7 svg_timestamp=false";

fn default_n_points() -> usize {
    512
}
fn default_length() -> f64 {
    64.0 * PI
}
fn default_n_time() -> usize {
    512
}
fn default_t_box() -> f64 {
    4.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(default = "default_n_points")]
    pub n_points: usize,
    #[serde(default = "default_length", rename = "L")]
    pub length: f64,
    #[serde(default = "default_n_time")]
    pub n_time: usize,
    #[serde(default = "default_t_box", rename = "T_box")]
    pub t_box: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            n_points: default_n_points(),
            length: default_length(),
            n_time: default_n_time(),
            t_box: default_t_box(),
        }
    }
}

impl GridSection {
    pub fn grid_x(&self) -> Result<Grid1D> {
        Grid1D::new(self.n_points, self.length)
    }

    pub fn space_time(&self) -> Result<SpaceTimeGrid> {
        SpaceTimeGrid::new(self.grid_x()?, self.n_time, self.t_box)
    }
}

fn default_dt() -> f64 {
    1e-3
}
fn default_t_final() -> f64 {
    1.0
}
fn default_record_every() -> usize {
    10
}
fn default_s_probe() -> f64 {
    -0.5
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_t_final", rename = "T")]
    pub t_final: f64,
    #[serde(default = "default_record_every")]
    pub record_every: usize,
    /// Sobolev index of the decay diagnostic.
    #[serde(default = "default_s_probe")]
    pub s_probe: f64,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            dt: default_dt(),
            t_final: default_t_final(),
            record_every: default_record_every(),
            s_probe: default_s_probe(),
        }
    }
}

/// Initial datum `u₀`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    /// `a e^{-x²/w²}`.
    Gaussian { amplitude: f64, width: f64 },
    /// `a sech²(x/w)`.
    Sech2 { amplitude: f64, width: f64 },
    /// Real Gaussian coefficients times `⟨ξ⟩^{exponent}` on the kept modes,
    /// scaled to `‖u₀‖_{H^s} = amplitude` with `s` the model index.
    Random { amplitude: f64, exponent: f64 },
}

impl Default for InitialData {
    fn default() -> Self {
        InitialData::Gaussian {
            amplitude: 0.5,
            width: 2.0,
        }
    }
}

impl InitialData {
    pub fn validate(&self) -> Result<()> {
        let (amp, width) = match *self {
            InitialData::Gaussian { amplitude, width }
            | InitialData::Sech2 { amplitude, width } => (amplitude, width),
            InitialData::Random {
                amplitude,
                exponent,
            } => {
                if !exponent.is_finite() {
                    return Err(Error::param("initial.exponent", "must be finite"));
                }
                (amplitude, 1.0)
            }
        };
        if !amp.is_finite() {
            return Err(Error::param("initial.amplitude", "must be finite"));
        }
        if !(width > 0.0) || !width.is_finite() {
            return Err(Error::param("initial.width", "must be positive"));
        }
        Ok(())
    }

    pub fn build(&self, grid: Grid1D, s: f64, seed: u64) -> Field {
        match *self {
            InitialData::Gaussian { amplitude, width } => {
                Field::from_fn(grid, |x| amplitude * (-(x / width).powi(2)).exp())
            }
            InitialData::Sech2 { amplitude, width } => {
                Field::from_fn(grid, |x| amplitude / (x / width).cosh().powi(2))
            }
            InitialData::Random {
                amplitude,
                exponent,
            } => random_field(grid, s, amplitude, exponent, seed),
        }
    }
}

/// Real field with independent Gaussian coefficients of size `⟨ξ⟩^{exponent}`
/// on the dealiased modes, normalized to `‖·‖_{H^s} = amplitude`.
pub fn random_field(grid: Grid1D, s: f64, amplitude: f64, exponent: f64, seed: u64) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = grid.n_points();
    let mut spec = SpectralField::zeros(grid);
    let cutoff = grid.dealias_cutoff();
    for k in 1..=cutoff {
        let xi = k as f64 * grid.dxi();
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        let c = Complex64::new(re, im) * bracket(xi).powf(exponent);
        if let Some(slot) = spec.at_mut(k) {
            *slot = c;
        }
        if let Some(slot) = spec.at_mut(-k) {
            *slot = c.conj();
        }
    }
    debug_assert!(cutoff < (n / 2) as i64);
    let norm = sobolev_norm(&spec, s);
    if norm > 0.0 {
        for c in &mut spec.coeffs {
            *c *= amplitude / norm;
        }
    }
    spec.inverse()
}

fn default_sweep_s() -> Vec<f64> {
    vec![-0.9, -0.7]
}
fn default_sweep_alpha() -> Vec<f64> {
    vec![0.25]
}
fn default_n1_list() -> Vec<f64> {
    vec![16.0, 32.0, 64.0, 128.0, 256.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default = "default_sweep_s")]
    pub s: Vec<f64>,
    #[serde(default = "default_sweep_alpha")]
    pub alpha: Vec<f64>,
    #[serde(default = "default_n1_list")]
    pub n1_list: Vec<f64>,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            s: default_sweep_s(),
            alpha: default_sweep_alpha(),
            n1_list: default_n1_list(),
        }
    }
}

fn default_n_low() -> Vec<f64> {
    vec![1.0, 2.0, 4.0]
}
fn default_n_high_max() -> f64 {
    128.0
}

/// The `(+−)` block family: low frequency `N₁ ∈ n_low`, `N₂ = N₃` from
/// `4N₁` to `n_high_max`, `L₁ = 2N₁N₂²`, `L₂ ∈ {N₁N₂, N₁²N₂}`, `L₃ ∈ {1, L₂}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlocksSection {
    #[serde(default = "default_n_low")]
    pub n_low: Vec<f64>,
    #[serde(default = "default_n_high_max")]
    pub n_high_max: f64,
}

impl Default for BlocksSection {
    fn default() -> Self {
        Self {
            n_low: default_n_low(),
            n_high_max: default_n_high_max(),
        }
    }
}

fn default_trials() -> usize {
    10
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub lemma: LemmaOptions,
}

impl Default for VerifySection {
    fn default() -> Self {
        Self {
            trials: default_trials(),
            lemma: LemmaOptions::default(),
        }
    }
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}
fn default_seed() -> u64 {
    7
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IoSection {
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Stamp SVG files with the wall-clock time of writing.
    #[serde(default)]
    pub svg_timestamp: bool,
}

impl Default for IoSection {
    fn default() -> Self {
        Self {
            out: default_out(),
            seed: default_seed(),
            svg_timestamp: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub model: ModelParams,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub initial: InitialData,
    #[serde(default)]
    pub picard: PicardConfig,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub blocks: BlocksSection,
    #[serde(default)]
    pub verify: VerifySection,
    #[serde(default)]
    pub io: IoSection,
}

fn at(path: &str, e: Error) -> Error {
    match e {
        Error::InvalidParameter { name, reason } => Error::Config {
            path: if name.contains('.') {
                name
            } else {
                format!("{path}.{name}")
            },
            reason,
        },
        other => Error::Config {
            path: path.into(),
            reason: other.to_string(),
        },
    }
}

fn dyadic_list(path: &str, values: &[f64]) -> Result<()> {
    for v in values {
        if !(*v > 0.0) || v.log2().fract() != 0.0 {
            return Err(Error::Config {
                path: path.into(),
                reason: format!("{v} is not a power of two"),
            });
        }
    }
    Ok(())
}

impl ExperimentConfig {
    /// Re-validates every section against the constraints of the modules it feeds.
    pub fn validate(&self) -> Result<()> {
        self.model.validate().map_err(|e| at("model", e))?;
        self.grid.space_time().map_err(|e| at("grid", e))?;
        let r = &self.run;
        if !(r.dt > 0.0) || !r.dt.is_finite() {
            return Err(at(
                "run",
                Error::param("dt", format!("must be positive, got {}", r.dt)),
            ));
        }
        if !(r.t_final > 0.0) || !r.t_final.is_finite() {
            return Err(at(
                "run",
                Error::param("T", format!("must be positive, got {}", r.t_final)),
            ));
        }
        if r.record_every == 0 {
            return Err(at(
                "run",
                Error::param("record_every", "must be at least 1"),
            ));
        }
        self.initial.validate().map_err(|e| at("initial", e))?;
        self.picard
            .validate(&self.model)
            .map_err(|e| at("picard", e))?;
        for &a in &self.sweep.alpha {
            crate::bilinear::s_alpha(a).map_err(|e| at("sweep.alpha", e))?;
        }
        dyadic_list("sweep.n1_list", &self.sweep.n1_list)?;
        dyadic_list("blocks.n_low", &self.blocks.n_low)?;
        dyadic_list("blocks.n_high_max", &[self.blocks.n_high_max])?;
        if self.verify.trials < 10 {
            return Err(at("verify", Error::param("trials", "need at least 10")));
        }
        for kind in crate::bourgain::LemmaKind::ALL {
            self.verify
                .lemma
                .validate(kind)
                .map_err(|e| at("verify.lemma", e))?;
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| Error::Config {
            path: e.path().to_string(),
            reason: e.inner().to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Reads, parses and validates a configuration file. An empty file is the default configuration.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)?;
    if text.trim().is_empty() {
        return ExperimentConfig::from_json("{}");
    }
    ExperimentConfig::from_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_defaults() {
        let c = ExperimentConfig::from_json("{}").unwrap();
        assert_eq!(c.model.alpha, 1.0);
        assert_eq!(c.model.s, -0.9);
        assert_eq!(c.grid.n_points, 512);
        assert_eq!(c.grid.length, 64.0 * PI);
        assert_eq!(c.grid.n_time, 512);
        assert_eq!(c.grid.t_box, 4.0);
        assert_eq!(c, ExperimentConfig::default());
    }

    #[test]
    fn violations_report_key_paths() {
        let e = ExperimentConfig::from_json(r#"{"model": {"alpha": 1.5}}"#).unwrap_err();
        assert!(
            matches!(&e, Error::Config { path, .. } if path == "model.alpha"),
            "{e}"
        );
        let e = ExperimentConfig::from_json(r#"{"model": {"delta": 0.6}}"#).unwrap_err();
        assert!(
            matches!(&e, Error::Config { path, .. } if path == "model.delta"),
            "{e}"
        );
        let e = ExperimentConfig::from_json(r#"{"run": {"dt": 0}}"#).unwrap_err();
        assert!(
            matches!(&e, Error::Config { path, .. } if path == "run.dt"),
            "{e}"
        );
        let e =
            ExperimentConfig::from_json(r#"{"grid": {"n_points": 512, "bogus": 1}}"#).unwrap_err();
        assert!(
            matches!(&e, Error::Config { path, .. } if path.starts_with("grid")),
            "{e}"
        );
        let e = ExperimentConfig::from_json(r#"{"sweep": {"n1_list": [16, 24]}}"#).unwrap_err();
        assert!(e.to_string().contains("sweep.n1_list"), "{e}");
    }

    #[test]
    fn random_data_is_real_and_normalized() {
        let g = Grid1D::new(128, 32.0 * PI).unwrap();
        let u = random_field(g, -0.7, 0.3, 0.2, 5);
        let spec = u.forward();
        assert!((sobolev_norm(&spec, -0.7) - 0.3).abs() < 1e-12);
        assert!(spec.mean().abs() < 1e-14);
        assert_eq!(u, random_field(g, -0.7, 0.3, 0.2, 5));
    }

    #[test]
    fn initial_kinds_parse() {
        let c = ExperimentConfig::from_json(
            r#"{"initial": {"kind": "random", "amplitude": 0.1, "exponent": -1}}"#,
        )
        .unwrap();
        assert!(matches!(c.initial, InitialData::Random { .. }));
        assert!(ExperimentConfig::from_json(
            r#"{"initial": {"kind": "sech2", "amplitude": 1, "width": 0}}"#
        )
        .is_err());
    }
}
