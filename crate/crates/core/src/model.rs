//! Device and drive descriptions, and the Hamiltonian builders.
//!
//! Matrix entries are linear frequencies in GHz. The joint space is
//! ordered transmon-major: basis state `|n⟩_q|m⟩_r` has index `n * n_r + m`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::linalg::{
    self, annihilation, diagonal, identity, kron, real, sqrt_ladder, CMatrix, C64, I,
};
use crate::{Error, Result};

/// Hermiticity tolerance for every constructed matrix.
pub const HERMITIAN_TOL: f64 = 1e-12;

pub const DEFAULT_N_Q: usize = 6;
pub const DEFAULT_N_R: usize = 6;

/// Bare transitions of the reference device (first cooldown), GHz.
pub const REFERENCE_TRANSITIONS: [f64; 3] = [5.869, 5.708, 5.539];
pub const REFERENCE_RESONATOR: f64 = 4.335;
pub const REFERENCE_COUPLING: f64 = 0.248;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviceSpec {
    /// Bare transmon levels, `transmon_levels[0] == 0`.
    pub transmon_levels: Vec<f64>,
    pub resonator_freq: f64,
    pub coupling_g: f64,
    pub n_q: usize,
    pub n_r: usize,
    /// How many of the top levels were extrapolated rather than supplied.
    #[serde(default)]
    pub extrapolated_levels: usize,
}

impl DeviceSpec {
    pub fn new(levels: Vec<f64>, resonator_freq: f64, coupling_g: f64, n_r: usize) -> Result<Self> {
        let spec = DeviceSpec {
            n_q: levels.len(),
            transmon_levels: levels,
            resonator_freq,
            coupling_g,
            n_r,
            extrapolated_levels: 0,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Levels from successive transition frequencies `ω_{n+1} - ω_n`.
    ///
    /// When `n_q - 1` exceeds the number of supplied transitions, the
    /// missing ones repeat the last gap decrement (or the single gap when
    /// only one transition is given).
    pub fn from_transitions(
        transitions: &[f64],
        n_q: usize,
        resonator_freq: f64,
        coupling_g: f64,
        n_r: usize,
    ) -> Result<Self> {
        if transitions.is_empty() {
            return Err(Error::config(
                "at least one transition frequency is required",
            ));
        }
        if n_q < 2 {
            return Err(Error::config(format!("n_q must be at least 2, got {n_q}")));
        }
        let mut gaps: Vec<f64> = transitions.iter().copied().take(n_q - 1).collect();
        let supplied = gaps.len();
        let decrement = match transitions {
            [.., a, b] => a - b,
            _ => 0.0,
        };
        while gaps.len() < n_q - 1 {
            let last = *gaps.last().unwrap();
            gaps.push(last - decrement);
        }
        let mut levels = Vec::with_capacity(n_q);
        levels.push(0.0);
        for gap in &gaps {
            levels.push(levels.last().unwrap() + gap);
        }
        let mut spec = DeviceSpec::new(levels, resonator_freq, coupling_g, n_r)?;
        spec.extrapolated_levels = n_q - 1 - supplied;
        Ok(spec)
    }

    /// `ω_n = n ω_ge - A n (n - 1) / 2`
    pub fn duffing(
        omega_ge: f64,
        anharmonicity: f64,
        n_q: usize,
        resonator_freq: f64,
        coupling_g: f64,
        n_r: usize,
    ) -> Result<Self> {
        let levels = (0..n_q)
            .map(|n| {
                let n = n as f64;
                n * omega_ge - anharmonicity * n * (n - 1.0) / 2.0
            })
            .collect();
        DeviceSpec::new(levels, resonator_freq, coupling_g, n_r)
    }

    /// Bare parameters of the measured device with default truncations.
    pub fn reference() -> Self {
        DeviceSpec::from_transitions(
            &REFERENCE_TRANSITIONS,
            DEFAULT_N_Q,
            REFERENCE_RESONATOR,
            REFERENCE_COUPLING,
            DEFAULT_N_R,
        )
        .expect("reference device is valid")
    }

    /// Same device with a different truncation. Levels are regenerated
    /// from the current transitions.
    pub fn truncated(&self, n_q: usize, n_r: usize) -> Result<Self> {
        let measured = self.n_q - 1 - self.extrapolated_levels;
        let transitions: Vec<f64> = self
            .transitions()
            .into_iter()
            .take(measured.max(1))
            .collect();
        DeviceSpec::from_transitions(&transitions, n_q, self.resonator_freq, self.coupling_g, n_r)
    }

    pub fn with_resonator(&self, resonator_freq: f64) -> Result<Self> {
        let mut spec = self.clone();
        spec.resonator_freq = resonator_freq;
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_coupling(&self, coupling_g: f64) -> Result<Self> {
        let mut spec = self.clone();
        spec.coupling_g = coupling_g;
        spec.validate()?;
        Ok(spec)
    }

    pub fn transitions(&self) -> Vec<f64> {
        self.transmon_levels
            .windows(2)
            .map(|w| w[1] - w[0])
            .collect()
    }

    pub fn omega_ge(&self) -> f64 {
        self.transmon_levels[1]
    }

    /// `ω_ge - ω_ef`, when an f level exists.
    pub fn anharmonicity(&self) -> Option<f64> {
        let t = self.transitions();
        (t.len() >= 2).then(|| t[0] - t[1])
    }

    pub fn joint_dim(&self) -> usize {
        self.n_q * self.n_r
    }

    pub fn joint_index(&self, transmon: usize, photons: usize) -> usize {
        transmon * self.n_r + photons
    }

    pub fn validate(&self) -> Result<()> {
        let levels = &self.transmon_levels;
        if self.n_q != levels.len() {
            return Err(Error::config(format!(
                "n_q = {} does not match {} transmon levels",
                self.n_q,
                levels.len()
            )));
        }
        if self.n_q < 2 {
            return Err(Error::config("at least two transmon levels are required"));
        }
        if levels[0] != 0.0 {
            return Err(Error::config(format!(
                "ground level must be exactly 0, got {}",
                levels[0]
            )));
        }
        if levels.iter().any(|x| !x.is_finite()) {
            return Err(Error::config("transmon levels must be finite"));
        }
        let gaps = self.transitions();
        if gaps.iter().any(|&g| g <= 0.0) {
            return Err(Error::config("transmon levels must be strictly increasing"));
        }
        if gaps.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::config(
                "transition frequencies must strictly decrease (negative anharmonicity)",
            ));
        }
        if !(self.resonator_freq.is_finite() && self.resonator_freq > 0.0) {
            return Err(Error::config("resonator frequency must be positive"));
        }
        if !(self.coupling_g.is_finite() && self.coupling_g >= 0.0) {
            return Err(Error::config("coupling g must be non-negative"));
        }
        if self.n_r < 1 {
            return Err(Error::config("n_r must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriveSpec {
    pub omega_d: f64,
    pub amplitude: f64,
}

impl DriveSpec {
    pub fn new(omega_d: f64, amplitude: f64) -> Result<Self> {
        let drive = DriveSpec { omega_d, amplitude };
        drive.validate()?;
        Ok(drive)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_d.is_finite() && self.omega_d > 0.0) {
            return Err(Error::config(format!(
                "drive frequency must be positive, got {}",
                self.omega_d
            )));
        }
        if !(self.amplitude.is_finite() && self.amplitude >= 0.0) {
            return Err(Error::config(format!(
                "drive amplitude must be non-negative, got {}",
                self.amplitude
            )));
        }
        Ok(())
    }

    /// Smallest `|ω_{n+1} - ω_n - ω_d| / Ω_d` over the transmon ladder.
    /// Infinite for an undriven system.
    pub fn dispersive_margin(&self, spec: &DeviceSpec) -> f64 {
        if self.amplitude == 0.0 {
            return f64::INFINITY;
        }
        spec.transitions()
            .iter()
            .map(|t| (t - self.omega_d).abs() / self.amplitude)
            .fold(f64::INFINITY, f64::min)
    }

    /// Reported, never enforced.
    pub fn is_dispersive(&self, spec: &DeviceSpec) -> bool {
        self.dispersive_margin(spec) >= 10.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HamiltonianVariant {
    /// Transmon, resonator and every coupling term.
    Full,
    /// Driven transmon alone.
    NoResonator,
    /// Effective model keeping only the static transverse coupling and the
    /// drive-induced longitudinal (diagonal) terms.
    StaticPlusDlcOnly,
}

impl HamiltonianVariant {
    pub const ALL: [HamiltonianVariant; 3] = [
        HamiltonianVariant::Full,
        HamiltonianVariant::NoResonator,
        HamiltonianVariant::StaticPlusDlcOnly,
    ];

    pub fn name(self) -> &'static str {
        match self {
            HamiltonianVariant::Full => "full",
            HamiltonianVariant::NoResonator => "no_resonator",
            HamiltonianVariant::StaticPlusDlcOnly => "static_plus_dlc_only",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            HamiltonianVariant::Full => "transmon and resonator with the complete coupling",
            HamiltonianVariant::NoResonator => "driven transmon only, resonator removed",
            HamiltonianVariant::StaticPlusDlcOnly => {
                "renormalized model keeping static coupling and drive-induced longitudinal terms"
            }
        }
    }

    pub fn needs_resonator(self) -> bool {
        !matches!(self, HamiltonianVariant::NoResonator)
    }
}

impl fmt::Display for HamiltonianVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for HamiltonianVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        HamiltonianVariant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::config(format!("unknown Hamiltonian variant '{s}'")))
    }
}

/// `H(t) = H_0 + Σ_{p≥1} (H_p e^{2πi p f_d t} + h.c.)`.
///
/// A cosine drive `D cos(2π f_d t)` is stored as `H_1 = D / 2`.
#[derive(Clone, Debug)]
pub struct TimePeriodicHamiltonian {
    static_part: CMatrix,
    harmonics: Vec<CMatrix>,
    omega_d: f64,
}

impl TimePeriodicHamiltonian {
    pub fn from_cosine(static_part: CMatrix, drive_part: CMatrix, omega_d: f64) -> Result<Self> {
        if !linalg::is_hermitian(&drive_part, HERMITIAN_TOL) {
            return Err(Error::config("drive part is not Hermitian"));
        }
        let half = drive_part * real(0.5);
        Self::from_harmonics(static_part, vec![half], omega_d)
    }

    pub fn from_harmonics(
        static_part: CMatrix,
        harmonics: Vec<CMatrix>,
        omega_d: f64,
    ) -> Result<Self> {
        if !(omega_d.is_finite() && omega_d > 0.0) {
            return Err(Error::config("drive frequency must be positive"));
        }
        if !linalg::is_hermitian(&static_part, HERMITIAN_TOL) {
            return Err(Error::config("static part is not Hermitian"));
        }
        let n = static_part.nrows();
        if harmonics.iter().any(|h| h.nrows() != n || h.ncols() != n) {
            return Err(Error::config("harmonic dimension mismatch"));
        }
        let mut harmonics = harmonics;
        while harmonics.last().is_some_and(|h| linalg::max_abs(h) == 0.0) {
            harmonics.pop();
        }
        Ok(TimePeriodicHamiltonian {
            static_part,
            harmonics,
            omega_d,
        })
    }

    pub fn undriven(static_part: CMatrix, omega_d: f64) -> Result<Self> {
        Self::from_harmonics(static_part, Vec::new(), omega_d)
    }

    pub fn dimension(&self) -> usize {
        self.static_part.nrows()
    }

    pub fn omega_d(&self) -> f64 {
        self.omega_d
    }

    pub fn period(&self) -> f64 {
        1.0 / self.omega_d
    }

    pub fn static_part(&self) -> &CMatrix {
        &self.static_part
    }

    pub fn is_static(&self) -> bool {
        self.harmonics.is_empty()
    }

    pub fn max_harmonic(&self) -> usize {
        self.harmonics.len()
    }

    /// Cosine amplitude matrix when the drive is a single Hermitian cosine.
    pub fn drive_part(&self) -> Option<CMatrix> {
        match self.harmonics.as_slice() {
            [] => Some(CMatrix::zeros(self.dimension(), self.dimension())),
            [h1] if linalg::is_hermitian(h1, HERMITIAN_TOL) => Some(h1 * real(2.0)),
            _ => None,
        }
    }

    /// Fourier coefficient `H_p` for any integer `p`.
    pub fn harmonic(&self, p: i64) -> CMatrix {
        let n = self.dimension();
        match p {
            0 => self.static_part.clone(),
            p if p > 0 => self
                .harmonics
                .get(p as usize - 1)
                .cloned()
                .unwrap_or_else(|| CMatrix::zeros(n, n)),
            p => self
                .harmonics
                .get((-p) as usize - 1)
                .map(|h| h.adjoint())
                .unwrap_or_else(|| CMatrix::zeros(n, n)),
        }
    }

    pub fn at(&self, t: f64) -> CMatrix {
        let mut h = self.static_part.clone();
        let w = 2.0 * std::f64::consts::PI * self.omega_d * t;
        for (k, hp) in self.harmonics.iter().enumerate() {
            let phase = C64::from_polar(1.0, (k + 1) as f64 * w);
            let term = hp * phase;
            h += &term;
            h += term.adjoint();
        }
        h
    }

    /// Upper bound on the spectral radius of `H(t)` over a period.
    pub fn norm_bound(&self) -> f64 {
        self.static_part.norm() + 2.0 * self.harmonics.iter().map(|h| h.norm()).sum::<f64>()
    }

    /// Same Hamiltonian with the constant `shift` removed from the diagonal.
    pub fn shifted(&self, shift: f64) -> Self {
        let n = self.dimension();
        TimePeriodicHamiltonian {
            static_part: &self.static_part - identity(n) * real(shift),
            harmonics: self.harmonics.clone(),
            omega_d: self.omega_d,
        }
    }
}

/// A joint Hamiltonian together with the variant that requested it.
#[derive(Clone, Debug)]
pub struct TaggedHamiltonian {
    pub variant: HamiltonianVariant,
    pub hamiltonian: TimePeriodicHamiltonian,
}

/// Diagonal bare transmon Hamiltonian.
pub fn build_transmon(spec: &DeviceSpec) -> Result<CMatrix> {
    spec.validate()?;
    Ok(diagonal(&spec.transmon_levels))
}

/// `g_{n,n+1} = g sqrt(n + 1)`, zero elsewhere.
pub fn coupling_matrix(g: f64, n_q: usize) -> CMatrix {
    sqrt_ladder(n_q, g)
}

/// `Ω_{n,n+1} = Ω_d sqrt(n + 1)`, zero elsewhere.
pub fn drive_matrix(amplitude: f64, n_q: usize) -> CMatrix {
    sqrt_ladder(n_q, amplitude)
}

pub fn build_transmon_driven(
    spec: &DeviceSpec,
    drive: &DriveSpec,
) -> Result<TimePeriodicHamiltonian> {
    drive.validate()?;
    let h0 = build_transmon(spec)?;
    TimePeriodicHamiltonian::from_cosine(h0, drive_matrix(drive.amplitude, spec.n_q), drive.omega_d)
}

/// `i e^{-iφ} a - i e^{iφ} a†` on the resonator; `φ = 0` gives `i(a - a†)`.
fn coupling_quadrature(n_r: usize, phase: f64) -> CMatrix {
    let a = annihilation(n_r);
    let e = C64::from_polar(1.0, -phase);
    &a * (I * e) - a.adjoint() * (I * e.conj())
}

/// Undriven joint Hamiltonian with coupling `i g_nm |n⟩⟨m| (a - a†)`.
pub fn joint_static(spec: &DeviceSpec) -> Result<CMatrix> {
    joint_static_phased(spec, 0.0)
}

/// Joint Hamiltonian with the coupling quadrature rotated by `phase`.
/// The spectrum does not depend on `phase`.
pub fn joint_static_phased(spec: &DeviceSpec, phase: f64) -> Result<CMatrix> {
    spec.validate()?;
    if spec.n_r < 2 {
        return Err(Error::config(format!(
            "resonator truncation n_r = {} is below 2",
            spec.n_r
        )));
    }
    let hq = diagonal(&spec.transmon_levels);
    let number: Vec<f64> = (0..spec.n_r)
        .map(|m| m as f64 * spec.resonator_freq)
        .collect();
    let hr = diagonal(&number);
    let g = coupling_matrix(spec.coupling_g, spec.n_q);
    Ok(kron(&hq, &identity(spec.n_r))
        + kron(&identity(spec.n_q), &hr)
        + kron(&g, &coupling_quadrature(spec.n_r, phase)))
}

/// Transmon operator lifted to the joint space.
pub fn lift_transmon(op: &CMatrix, n_r: usize) -> CMatrix {
    kron(op, &identity(n_r))
}

/// Joint interaction `i X ⊗ (a - a†)` for a transmon operator `X`.
pub fn joint_interaction(x: &CMatrix, n_r: usize) -> CMatrix {
    kron(x, &coupling_quadrature(n_r, 0.0))
}

/// Driven Hamiltonian for a variant.
///
/// `StaticPlusDlcOnly` is realized downstream on the renormalized
/// interaction, so here it yields the full joint Hamiltonian tagged with
/// the variant.
pub fn build_joint(
    spec: &DeviceSpec,
    drive: &DriveSpec,
    variant: HamiltonianVariant,
) -> Result<TaggedHamiltonian> {
    drive.validate()?;
    let hamiltonian = match variant {
        HamiltonianVariant::NoResonator => build_transmon_driven(spec, drive)?,
        HamiltonianVariant::Full | HamiltonianVariant::StaticPlusDlcOnly => {
            let h0 = joint_static(spec)?;
            let d = lift_transmon(&drive_matrix(drive.amplitude, spec.n_q), spec.n_r);
            TimePeriodicHamiltonian::from_cosine(h0, d, drive.omega_d)?
        }
    };
    Ok(TaggedHamiltonian {
        variant,
        hamiltonian,
    })
}

/// Bare product energy `ω_n + m ω_r`.
pub fn bare_energy(spec: &DeviceSpec, transmon: usize, photons: usize) -> f64 {
    spec.transmon_levels[transmon] + photons as f64 * spec.resonator_freq
}
