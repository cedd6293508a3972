//! Experiment configuration: one TOML (or JSON) file with a schema tag,
//! a device block, one optional block per subcommand and an output block.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::gain::{linspace, SearchSettings, Side};
use crate::model::{critical_params, DeviceParams, SquidGeometry};

pub const SCHEMA: &str = "jpa-config/1";

/// Environment variable holding the default config path.
pub const CONFIG_ENV: &str = "JPA_CONFIG";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("invalid config: {0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
    #[default]
    Both,
}

impl Format {
    pub fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }

    pub fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }
}

/// Pump-side selector for points of an iso-gain contour.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchChoice {
    Below,
    #[default]
    Above,
}

impl BranchChoice {
    pub fn side(self) -> Side {
        match self {
            BranchChoice::Below => Side::BelowLmg,
            BranchChoice::Above => Side::AboveLmg,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SquidConfig {
    pub n_squids: u32,
    pub critical_current_ua: f64,
    #[serde(default)]
    pub capacitance_ff: f64,
    #[serde(default)]
    pub coupling_capacitance_ff: f64,
}

/// Device block. Give at most one of `f0_hz` / `f_c_hz` (default: Q = 65)
/// and at most one of `kerr_over_gamma` / `squid` (default: K/γ = −8.3e-4).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DeviceConfig {
    pub gamma_hz: f64,
    pub f0_hz: Option<f64>,
    pub f_c_hz: Option<f64>,
    pub kerr_over_gamma: Option<f64>,
    pub squid: Option<SquidConfig>,
}

impl Default for DeviceConfig {
    fn default() -> Self {
        DeviceConfig {
            gamma_hz: 54.5e6,
            f0_hz: None,
            f_c_hz: None,
            kerr_over_gamma: None,
            squid: None,
        }
    }
}

const DEFAULT_Q: f64 = 65.0;
const DEFAULT_KERR_OVER_GAMMA: f64 = -8.3e-4;

impl DeviceConfig {
    pub fn build(&self) -> Result<DeviceParams, ConfigError> {
        let gamma = 2.0 * std::f64::consts::PI * self.gamma_hz;
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(invalid("device.gamma_hz must be positive"));
        }
        let kerr_sign = match (&self.kerr_over_gamma, &self.squid) {
            (Some(_), Some(_)) => {
                return Err(invalid("device: give either kerr_over_gamma or squid, not both"))
            }
            (Some(k), None) => k.signum(),
            _ => -1.0,
        };
        let omega0 = match (self.f0_hz, self.f_c_hz) {
            (Some(_), Some(_)) => return Err(invalid("device: give either f0_hz or f_c_hz, not both")),
            (Some(f0), None) => 2.0 * std::f64::consts::PI * f0,
            // ω_c = ω₀ + sgn(K)·√3γ
            (None, Some(fc)) => 2.0 * std::f64::consts::PI * fc - kerr_sign * 3f64.sqrt() * gamma,
            (None, None) => 2.0 * DEFAULT_Q * gamma,
        };
        let res = match &self.squid {
            Some(s) => DeviceParams::from_geometry(
                omega0,
                gamma,
                SquidGeometry {
                    n_squids: s.n_squids,
                    critical_current: s.critical_current_ua * 1e-6,
                    capacitance: s.capacitance_ff * 1e-15,
                    coupling_capacitance: s.coupling_capacitance_ff * 1e-15,
                },
            ),
            None => DeviceParams::new(
                omega0,
                gamma,
                self.kerr_over_gamma.unwrap_or(DEFAULT_KERR_OVER_GAMMA) * gamma,
            ),
        };
        res.map_err(|e| invalid(format!("device: {e}")))
    }
}

/// Knobs of the LMG and contour searches.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SearchConfig {
    /// Probe amplitude for gain evaluation, relative to b_c.
    pub probe_rel: f64,
    pub n_theta: usize,
    pub p_db_window: [f64; 2],
    pub coarse_points: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            probe_rel: 1e-4,
            n_theta: 360,
            p_db_window: [-12.0, 6.0],
            coarse_points: 73,
        }
    }
}

impl SearchConfig {
    pub fn settings(&self, device: &DeviceParams) -> SearchSettings {
        SearchSettings {
            probe_amp: self.probe_rel * critical_params(device).b_c,
            n_theta: self.n_theta,
            p_db_window: (self.p_db_window[0], self.p_db_window[1]),
            coarse_points: self.coarse_points,
            ..SearchSettings::default_for(device)
        }
    }
}

/// Uniform grid of pump frequencies as f_p/f_c.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FreqGrid {
    pub f_ratio: [f64; 2],
    pub n: usize,
}

impl FreqGrid {
    pub fn points(&self) -> Vec<f64> {
        linspace(self.f_ratio[0], self.f_ratio[1], self.n)
    }
}

fn above_critical_grid() -> FreqGrid {
    FreqGrid {
        f_ratio: [1.0003, 1.004],
        n: 38,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GainMapConfig {
    pub f_ratio: [f64; 2],
    pub p_db: [f64; 2],
    pub n_f: usize,
    pub n_p: usize,
    pub probe_rel: f64,
    pub n_theta: usize,
}

impl Default for GainMapConfig {
    fn default() -> Self {
        GainMapConfig {
            f_ratio: [0.999, 1.004],
            p_db: [-6.0, 3.0],
            n_f: 201,
            n_p: 201,
            probe_rel: 1e-4,
            n_theta: 360,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LmgConfig {
    pub grid: FreqGrid,
}

impl Default for LmgConfig {
    fn default() -> Self {
        LmgConfig {
            grid: FreqGrid {
                f_ratio: [1.0002, 1.004],
                n: 39,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ContourConfig {
    pub target_gain_db: f64,
    pub grid: FreqGrid,
}

impl Default for ContourConfig {
    fn default() -> Self {
        ContourConfig {
            target_gain_db: 8.0,
            grid: above_critical_grid(),
        }
    }
}

/// Probe used by the distortion commands: absolute amplitude (√(photons/s))
/// or, when absent, half a photon over the bandwidth γ/π.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DistortConfig {
    pub f_ratio: f64,
    pub gains_db: Vec<f64>,
    pub side: BranchChoice,
    pub probe_amp: Option<f64>,
    pub n_theta: usize,
}

impl Default for DistortConfig {
    fn default() -> Self {
        DistortConfig {
            f_ratio: 1.0015,
            gains_db: vec![6.0, 9.5, 13.0],
            side: BranchChoice::Above,
            probe_amp: None,
            n_theta: 360,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DeampScanConfig {
    pub target_gain_db: f64,
    pub grid: FreqGrid,
    pub probe_amp: Option<f64>,
    pub n_theta: usize,
}

impl Default for DeampScanConfig {
    fn default() -> Self {
        DeampScanConfig {
            target_gain_db: 8.0,
            grid: above_critical_grid(),
            probe_amp: None,
            n_theta: 360,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimalPointConfig {
    pub gain_targets_db: Vec<f64>,
    pub grid: FreqGrid,
    pub probe_amp: Option<f64>,
    pub n_theta: usize,
}

impl Default for OptimalPointConfig {
    fn default() -> Self {
        OptimalPointConfig {
            gain_targets_db: (6..=13).map(f64::from).collect(),
            grid: above_critical_grid(),
            probe_amp: None,
            n_theta: 360,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SqueezerKind {
    #[default]
    Jpa,
    Linearized,
    Ideal,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmpKindConfig {
    #[default]
    Ideal,
    FullJpa,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AmpConfig {
    pub kind: AmpKindConfig,
    /// Gain of the ideal AMP, dB.
    pub gain_db: f64,
    /// Operating point of the full-JPA AMP.
    pub f_ratio: f64,
    pub p_db: f64,
    pub phase_offset: f64,
    pub hemt_noise_quanta: f64,
}

impl Default for AmpConfig {
    fn default() -> Self {
        AmpConfig {
            kind: AmpKindConfig::Ideal,
            gain_db: crate::squeezing::DEFAULT_AMP_GAIN_DB,
            f_ratio: 1.0015,
            p_db: 0.0,
            phase_offset: 0.0,
            hemt_noise_quanta: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HistogramConfig {
    pub n_theta: usize,
    pub bins: usize,
    /// Half-width of the bin range in off-state standard deviations.
    pub span: f64,
}

impl Default for HistogramConfig {
    fn default() -> Self {
        HistogramConfig {
            n_theta: 16,
            bins: 60,
            span: 6.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SqueezeConfig {
    pub squeezer: SqueezerKind,
    pub f_ratio: f64,
    /// Target SQ gain; the operating point is the contour crossing on `side`.
    pub gain_db: f64,
    pub side: BranchChoice,
    /// Explicit pump power re P_c; overrides `gain_db`/`side` when set.
    pub p_db: Option<f64>,
    /// Squeezing gain of the `ideal` squeezer, dB.
    pub ideal_gain_db: f64,
    pub loss_db: f64,
    pub amp: AmpConfig,
    pub n_samples: usize,
    pub n_theta: usize,
    pub histogram: Option<HistogramConfig>,
}

impl Default for SqueezeConfig {
    fn default() -> Self {
        SqueezeConfig {
            squeezer: SqueezerKind::Jpa,
            f_ratio: 1.0015,
            gain_db: 8.0,
            side: BranchChoice::Above,
            p_db: None,
            ideal_gain_db: 8.0,
            loss_db: 1.2,
            amp: AmpConfig::default(),
            n_samples: crate::squeezing::DEFAULT_SAMPLES,
            n_theta: crate::squeezing::DEFAULT_N_THETA,
            histogram: Some(HistogramConfig::default()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanMode {
    #[default]
    PowerCut,
    Contour,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SqueezeScanConfig {
    pub mode: ScanMode,
    /// Power cut: pump frequency and the matched gains sampled on each side.
    pub f_ratio: f64,
    pub gains_db: Vec<f64>,
    /// Contour mode: target gain and frequency grid.
    pub target_gain_db: f64,
    pub contour: FreqGrid,
    pub loss_db: f64,
    pub amp: AmpConfig,
    pub n_samples: usize,
    pub n_theta: usize,
}

impl Default for SqueezeScanConfig {
    fn default() -> Self {
        SqueezeScanConfig {
            mode: ScanMode::PowerCut,
            f_ratio: 1.0015,
            gains_db: vec![9.0, 11.0, 13.0, 15.0, 17.0],
            target_gain_db: 8.0,
            contour: FreqGrid {
                f_ratio: [1.0005, 1.004],
                n: 8,
            },
            loss_db: 1.2,
            amp: AmpConfig::default(),
            n_samples: crate::squeezing::DEFAULT_SAMPLES,
            n_theta: crate::squeezing::DEFAULT_N_THETA,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseFitConfig {
    /// Noise CSV, relative to the config file's directory.
    pub data: Option<PathBuf>,
    /// Measurement frequency; defaults to the device critical frequency.
    pub freq_hz: Option<f64>,
    pub max_iter: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LineBudgetConfig {
    pub g_a_out_db: f64,
    pub g_a_out_sigma_db: f64,
    pub g_s_out_db: f64,
    pub g_s_out_sigma_db: f64,
    pub a_in_db: f64,
    pub a_in_sigma_db: f64,
}

impl Default for LineBudgetConfig {
    fn default() -> Self {
        LineBudgetConfig {
            g_a_out_db: 76.5,
            g_a_out_sigma_db: 0.1,
            g_s_out_db: 75.3,
            g_s_out_sigma_db: 0.1,
            a_in_db: -81.4,
            a_in_sigma_db: 0.2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SynthNoiseConfig {
    pub chain_gain_db: f64,
    pub lambda: f64,
    pub n_add: f64,
    pub t_fridge_k: Vec<f64>,
    pub t_vts_k: [f64; 2],
    pub n_vts: usize,
    pub noise_frac: f64,
    pub freq_hz: Option<f64>,
}

impl Default for SynthNoiseConfig {
    fn default() -> Self {
        SynthNoiseConfig {
            chain_gain_db: 75.3,
            lambda: 0.79,
            n_add: 0.045,
            t_fridge_k: crate::calibration::REFERENCE_FRIDGE_TEMPS.to_vec(),
            t_vts_k: [0.03, 1.0],
            n_vts: 400,
            noise_frac: 0.005,
            freq_hz: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub format: Format,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: PathBuf::from("out"),
            format: Format::Both,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub device: DeviceConfig,
    #[serde(default)]
    pub search: SearchConfig,
    #[serde(default)]
    pub gain_map: GainMapConfig,
    #[serde(default)]
    pub lmg: LmgConfig,
    #[serde(default)]
    pub contour: ContourConfig,
    #[serde(default)]
    pub distort: DistortConfig,
    #[serde(default)]
    pub deamp_scan: DeampScanConfig,
    #[serde(default)]
    pub optimal_point: OptimalPointConfig,
    #[serde(default)]
    pub squeeze: SqueezeConfig,
    #[serde(default)]
    pub squeeze_scan: SqueezeScanConfig,
    #[serde(default)]
    pub noise_fit: NoiseFitConfig,
    #[serde(default)]
    pub line_budget: LineBudgetConfig,
    #[serde(default)]
    pub synth_noise: SynthNoiseConfig,
    #[serde(default)]
    pub output: OutputConfig,
    /// Directory relative paths in the config resolve against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            schema: SCHEMA.to_string(),
            seed: 0,
            device: DeviceConfig::default(),
            search: SearchConfig::default(),
            gain_map: GainMapConfig::default(),
            lmg: LmgConfig::default(),
            contour: ContourConfig::default(),
            distort: DistortConfig::default(),
            deamp_scan: DeampScanConfig::default(),
            optimal_point: OptimalPointConfig::default(),
            squeeze: SqueezeConfig::default(),
            squeeze_scan: SqueezeScanConfig::default(),
            noise_fit: NoiseFitConfig::default(),
            line_budget: LineBudgetConfig::default(),
            synth_noise: SynthNoiseConfig::default(),
            output: OutputConfig::default(),
            base_dir: PathBuf::from("."),
        }
    }
}

impl ExperimentConfig {
    /// Parses TOML, or JSON when the text starts with `{`.
    pub fn parse(text: &str, origin: &Path) -> Result<Self, ConfigError> {
        let parsed: Result<ExperimentConfig, String> = if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| e.to_string())
        } else {
            toml::from_str(text).map_err(|e| e.to_string())
        };
        let mut cfg = parsed.map_err(|message| ConfigError::Parse {
            path: origin.to_path_buf(),
            message,
        })?;
        if cfg.schema != SCHEMA {
            return Err(ConfigError::Parse {
                path: origin.to_path_buf(),
                message: format!("schema must be \"{SCHEMA}\", got \"{}\"", cfg.schema),
            });
        }
        cfg.base_dir = origin
            .parent()
            .map(Path::to_path_buf)
            .filter(|p| !p.as_os_str().is_empty())
            .unwrap_or_else(|| PathBuf::from("."));
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, path)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    /// SHA-256 of everything that can change numerical results; the output
    /// block is excluded so moving the output directory keeps the hash.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output = OutputConfig::default();
        let bytes = serde_json::to_vec(&c).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))
    }
}
