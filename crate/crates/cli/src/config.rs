//! Sweep configuration files (TOML).
//!
//! Every table rejects unknown keys. [`SweepConfig::plan`] checks the
//! whole file and produces a [`Plan`] before anything is computed.

use std::path::{Path, PathBuf};

use lambshift_core::dephasing::DecoherenceParams;
use lambshift_core::floquet::{FourierOptions, TrackOptions};
use lambshift_core::model::{
    DeviceSpec, HamiltonianVariant, DEFAULT_N_Q, DEFAULT_N_R, REFERENCE_COUPLING,
    REFERENCE_RESONATOR, REFERENCE_TRANSITIONS,
};
use lambshift_core::renorm::{StarkOptions, SweepOptions};
use serde::{Deserialize, Serialize};

use crate::columns::{Group, GROUPS};
use crate::CliError;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Label written into the outputs; also the default file stem.
    pub name: Option<String>,
    #[serde(default)]
    pub device: DeviceConfig,
    pub drive: DriveConfig,
    #[serde(default = "default_variants")]
    pub variants: Vec<HamiltonianVariant>,
    /// Column groups to emit; all of them when absent.
    pub observables: Option<Vec<String>>,
    /// Stark ratios at every drive frequency when present.
    pub eta: Option<EtaConfig>,
    #[serde(default)]
    pub solver: SolverConfig,
    pub decoherence: Option<DecoherenceParams>,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_variants() -> Vec<HamiltonianVariant> {
    vec![HamiltonianVariant::Full]
}

/// Device parameters. At most one of `transitions`, `levels` and
/// `duffing` may be given; the reference transitions are used otherwise.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceConfig {
    /// Successive transition frequencies ω_ge, ω_ef, ... (GHz).
    pub transitions: Option<Vec<f64>>,
    /// Absolute level energies starting at 0 (GHz).
    pub levels: Option<Vec<f64>>,
    pub duffing: Option<DuffingConfig>,
    pub resonator_freq: Option<f64>,
    pub coupling_g: Option<f64>,
    pub n_q: Option<usize>,
    pub n_r: Option<usize>,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DuffingConfig {
    pub omega_ge: f64,
    pub anharmonicity: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveConfig {
    /// Drive frequencies f_d (GHz).
    pub frequencies: Vec<f64>,
    pub amplitudes: AmplitudeGrid,
}

/// Ω_d/2π values (GHz), as an explicit list or a linear grid.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum AmplitudeGrid {
    List(Vec<f64>),
    Linear(LinearGrid),
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearGrid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl AmplitudeGrid {
    pub fn values(&self) -> Result<Vec<f64>, CliError> {
        let values = match self {
            AmplitudeGrid::List(v) => v.clone(),
            AmplitudeGrid::Linear(LinearGrid {
                start,
                stop,
                points,
            }) => match points {
                0 => Vec::new(),
                1 => vec![*start],
                n => (0..*n)
                    .map(|i| start + (stop - start) * i as f64 / (n - 1) as f64)
                    .collect(),
            },
        };
        if values.is_empty() {
            return Err(CliError::config("the amplitude grid is empty"));
        }
        if let Some(a) = values.iter().find(|a| !(a.is_finite() && **a >= 0.0)) {
            return Err(CliError::config(format!(
                "amplitude {a} must be finite and non-negative"
            )));
        }
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CliError::config("amplitudes must be strictly increasing"));
        }
        Ok(values)
    }
}

#[derive(Clone, Copy, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EtaConfig {
    /// Largest |δω_ge| on the automatic grid (GHz).
    pub max_shift: Option<f64>,
    pub points: Option<usize>,
    pub residual_tol: Option<f64>,
}

#[derive(Clone, Copy, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub tol: Option<f64>,
    pub overlap_threshold: Option<f64>,
    pub min_step: Option<f64>,
    pub tie_margin: Option<f64>,
    pub steps: Option<usize>,
    pub k_max: Option<usize>,
    pub samples: Option<usize>,
    pub max_samples: Option<usize>,
    pub fourier_steps: Option<usize>,
    pub normalization_tol: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    pub stem: Option<String>,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: default_dir(),
            stem: None,
            formats: default_formats(),
        }
    }
}

fn default_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_formats() -> Vec<Format> {
    vec![Format::Csv, Format::Json]
}

/// A checked configuration, ready to run.
#[derive(Clone, Debug)]
pub struct Plan {
    pub name: String,
    pub spec: DeviceSpec,
    pub frequencies: Vec<f64>,
    pub amplitudes: Vec<f64>,
    pub variants: Vec<HamiltonianVariant>,
    pub groups: Vec<Group>,
    pub eta: Option<StarkOptions>,
    pub sweep: SweepOptions,
    pub decoherence: DecoherenceParams,
    pub output: OutputPlan,
}

#[derive(Clone, Debug)]
pub struct OutputPlan {
    pub dir: PathBuf,
    pub stem: String,
    pub formats: Vec<Format>,
}

impl SweepConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            e => e,
        })
    }

    pub fn plan(&self) -> Result<Plan, CliError> {
        let spec = self.device.spec()?;
        let frequencies = self.drive.frequencies.clone();
        if frequencies.is_empty() {
            return Err(CliError::config("no drive frequencies"));
        }
        if let Some(f) = frequencies.iter().find(|f| !(f.is_finite() && **f > 0.0)) {
            return Err(CliError::config(format!(
                "drive frequency {f} must be positive"
            )));
        }
        let mut sorted = frequencies.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(CliError::config("duplicate drive frequency"));
        }
        let amplitudes = self.drive.amplitudes.values()?;

        if self.variants.is_empty() {
            return Err(CliError::config("no Hamiltonian variants selected"));
        }
        let mut variants = self.variants.clone();
        variants.sort();
        variants.dedup();
        if variants.len() != self.variants.len() {
            return Err(CliError::config("a variant is listed twice"));
        }
        if spec.n_r < 2 && variants.iter().any(|v| v.needs_resonator()) {
            return Err(CliError::config("variants with a resonator need n_r >= 2"));
        }

        let groups = match &self.observables {
            None => GROUPS.to_vec(),
            Some(names) => {
                let mut groups = names
                    .iter()
                    .map(|n| n.parse())
                    .collect::<Result<Vec<Group>, _>>()?;
                groups.sort();
                groups.dedup();
                groups
            }
        };

        let eta = self.eta.map(|e| e.options()).transpose()?;
        if eta.is_some() && spec.n_q < 3 {
            return Err(CliError::config("η needs at least three transmon levels"));
        }
        let decoherence = self.decoherence.unwrap_or_default();
        decoherence.validate().map_err(CliError::from_core_config)?;

        let name = self.name.clone().unwrap_or_else(|| "sweep".into());
        let stem = self.output.stem.clone().unwrap_or_else(|| name.clone());
        if stem.is_empty() || stem.contains(['/', '\\']) {
            return Err(CliError::config(format!(
                "output stem '{stem}' is not a plain file name"
            )));
        }
        if self.output.formats.is_empty() {
            return Err(CliError::config("no output formats"));
        }
        let mut formats = self.output.formats.clone();
        formats.dedup();

        Ok(Plan {
            name,
            spec,
            frequencies: sorted,
            amplitudes,
            variants,
            groups,
            eta,
            sweep: self.solver.options()?,
            decoherence,
            output: OutputPlan {
                dir: self.output.dir.clone(),
                stem,
                formats,
            },
        })
    }
}

impl DeviceConfig {
    pub fn spec(&self) -> Result<DeviceSpec, CliError> {
        let given = [
            self.transitions.is_some(),
            self.levels.is_some(),
            self.duffing.is_some(),
        ];
        if given.iter().filter(|&&g| g).count() > 1 {
            return Err(CliError::config(
                "give only one of device.transitions, device.levels, device.duffing",
            ));
        }
        let omega_r = self.resonator_freq.unwrap_or(REFERENCE_RESONATOR);
        let g = self.coupling_g.unwrap_or(REFERENCE_COUPLING);
        let n_r = self.n_r.unwrap_or(DEFAULT_N_R);
        let spec = if let Some(levels) = &self.levels {
            if self.n_q.is_some_and(|n| n != levels.len()) {
                return Err(CliError::config(
                    "device.n_q disagrees with the number of levels",
                ));
            }
            DeviceSpec::new(levels.clone(), omega_r, g, n_r)
        } else if let Some(d) = self.duffing {
            DeviceSpec::duffing(
                d.omega_ge,
                d.anharmonicity,
                self.n_q.unwrap_or(DEFAULT_N_Q),
                omega_r,
                g,
                n_r,
            )
        } else {
            let t = self
                .transitions
                .as_deref()
                .unwrap_or(&REFERENCE_TRANSITIONS);
            DeviceSpec::from_transitions(t, self.n_q.unwrap_or(DEFAULT_N_Q), omega_r, g, n_r)
        };
        spec.map_err(CliError::from_core_config)
    }
}

impl EtaConfig {
    pub fn options(&self) -> Result<StarkOptions, CliError> {
        let d = StarkOptions::default();
        let opts = StarkOptions {
            max_shift: self.max_shift.unwrap_or(d.max_shift),
            points: self.points.unwrap_or(d.points),
            residual_tol: self.residual_tol.unwrap_or(d.residual_tol),
        };
        if !(opts.max_shift > 0.0 && opts.max_shift.is_finite()) {
            return Err(CliError::config("eta.max_shift must be positive"));
        }
        if opts.points < 8 {
            return Err(CliError::config("eta.points must be at least 8"));
        }
        if !(opts.residual_tol > 0.0 && opts.residual_tol < 1.0) {
            return Err(CliError::config("eta.residual_tol must lie in (0, 1)"));
        }
        Ok(opts)
    }
}

impl SolverConfig {
    pub fn options(&self) -> Result<SweepOptions, CliError> {
        let (t, f) = (TrackOptions::default(), FourierOptions::default());
        let track = TrackOptions {
            tol: self.tol.unwrap_or(t.tol),
            overlap_threshold: self.overlap_threshold.unwrap_or(t.overlap_threshold),
            min_step: self.min_step.unwrap_or(t.min_step),
            tie_margin: self.tie_margin.unwrap_or(t.tie_margin),
            steps: self.steps.or(t.steps),
        };
        let fourier = FourierOptions {
            k_max: self.k_max.unwrap_or(f.k_max),
            samples: self.samples.unwrap_or(f.samples),
            max_samples: self.max_samples.unwrap_or(f.max_samples),
            steps: self.fourier_steps.unwrap_or(f.steps),
            normalization_tol: self.normalization_tol.unwrap_or(f.normalization_tol),
        };
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(track.tol) || track.tol > 1e-3 {
            return Err(CliError::config("solver.tol must lie in (0, 1e-3]"));
        }
        if !(track.overlap_threshold > 0.0 && track.overlap_threshold <= 1.0) {
            return Err(CliError::config(
                "solver.overlap_threshold must lie in (0, 1]",
            ));
        }
        if !positive(track.min_step) {
            return Err(CliError::config("solver.min_step must be positive"));
        }
        if !(track.tie_margin >= 0.0 && track.tie_margin < 1.0) {
            return Err(CliError::config("solver.tie_margin must lie in [0, 1)"));
        }
        if track.steps == Some(0) {
            return Err(CliError::config("solver.steps must be positive"));
        }
        if fourier.k_max == 0 {
            return Err(CliError::config("solver.k_max must be at least 1"));
        }
        if fourier.max_samples < fourier.samples || fourier.steps == 0 {
            return Err(CliError::config(
                "solver.max_samples must be >= samples and fourier_steps positive",
            ));
        }
        if !positive(fourier.normalization_tol) {
            return Err(CliError::config(
                "solver.normalization_tol must be positive",
            ));
        }
        Ok(SweepOptions { track, fourier })
    }
}
