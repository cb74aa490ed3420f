//! Physical observables from dressed energies.

use serde::Serialize;

use crate::floquet::{StateLabel, TrackResult};
use crate::model::DeviceSpec;
use crate::{Error, Result};

/// Transmon levels that enter the observables (g, e, f, d).
pub const OBSERVED_LEVELS: usize = 4;

/// Joint branches needed by [`observables`].
pub fn joint_labels(n_q: usize) -> Vec<StateLabel> {
    let mut labels: Vec<StateLabel> = (0..n_q.min(OBSERVED_LEVELS))
        .map(|n| StateLabel::joint(n, 0))
        .collect();
    labels.push(StateLabel::joint(0, 1));
    labels.push(StateLabel::joint(1, 1));
    labels
}

/// Transmon-only branches needed by [`observables`].
pub fn transmon_labels(n_q: usize) -> Vec<StateLabel> {
    (0..n_q.min(OBSERVED_LEVELS))
        .map(StateLabel::transmon)
        .collect()
}

/// Dressed energies at one drive point (GHz). Absent entries belong to
/// broken or untracked branches.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct DressedLevels {
    pub amplitude: f64,
    /// Transmon-only `ω̃_n` for g, e, f, d.
    pub transmon: Vec<Option<f64>>,
    /// Joint `E(n, 0)` for g, e, f, d.
    pub vacuum: Vec<Option<f64>>,
    /// Joint `E(g, 1)` and `E(e, 1)`.
    pub one_photon: [Option<f64>; 2],
}

impl DressedLevels {
    /// Collect the energies at grid index `index` from branch tracks.
    pub fn from_tracks(
        amplitude: f64,
        transmon: Option<&TrackResult>,
        joint: Option<&TrackResult>,
        index: usize,
    ) -> Self {
        let pick = |t: Option<&TrackResult>, label: StateLabel| {
            t.and_then(|t| t.branch(label))
                .and_then(|b| b.energy_at(index))
        };
        DressedLevels {
            amplitude,
            transmon: (0..OBSERVED_LEVELS)
                .map(|n| pick(transmon, StateLabel::transmon(n)))
                .collect(),
            vacuum: (0..OBSERVED_LEVELS)
                .map(|n| pick(joint, StateLabel::joint(n, 0)))
                .collect(),
            one_photon: [
                pick(joint, StateLabel::joint(0, 1)),
                pick(joint, StateLabel::joint(1, 1)),
            ],
        }
    }

    fn transmon_at(&self, n: usize) -> Option<f64> {
        self.transmon.get(n).copied().flatten()
    }

    fn vacuum_at(&self, n: usize) -> Option<f64> {
        self.vacuum.get(n).copied().flatten()
    }

    /// Transmon-only transition `ω̃_nm`.
    pub fn transmon_transition(&self, n: usize, m: usize) -> Option<f64> {
        Some(self.transmon_at(m)? - self.transmon_at(n)?)
    }

    /// Joint transition with the resonator in vacuum, `ω̃⁰_nm`.
    pub fn vacuum_transition(&self, n: usize, m: usize) -> Option<f64> {
        Some(self.vacuum_at(m)? - self.vacuum_at(n)?)
    }

    /// Resonator frequency with the transmon in g (0) or e (1).
    pub fn resonator(&self, n: usize) -> Option<f64> {
        Some(self.one_photon[n]? - self.vacuum_at(n)?)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct LambShifts {
    pub ge: Option<f64>,
    pub gf: Option<f64>,
    pub gd: Option<f64>,
    pub ef: Option<f64>,
}

/// Renormalized quantities at one drive point (GHz unless noted).
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ObservableSet {
    pub amplitude: f64,
    pub omega_tilde: Vec<Option<f64>>,
    pub omega_tilde0: Vec<Option<f64>>,
    pub lamb: LambShifts,
    /// Transmon-only `ω̃_ge`.
    pub omega_ge: Option<f64>,
    /// `ω̃⁰_ge`.
    pub omega_ge0: Option<f64>,
    /// `ω̃_r^g`, the resonator frequency with the transmon in g.
    pub resonator_g: Option<f64>,
    /// `ω̃_r^g - ω_r`.
    pub pull: Option<f64>,
    /// `ω̃_r^g - ω̃_r^e`.
    pub chi: Option<f64>,
    /// `ω̃⁰_ge - ω̃⁰_ef`.
    pub anharm: Option<f64>,
    /// `Ã / (ω̃_ge - ω_r - Ã)`, dimensionless.
    pub zeta: Option<f64>,
    pub zeta_ratio: Option<f64>,
    /// `χ⁰ ζ/ζ₀`, the constant-coupling estimate of `χ̃`.
    pub chi_scaled: Option<f64>,
}

impl ObservableSet {
    /// Every field the joint and transmon branches can provide is present.
    pub fn is_complete(&self) -> bool {
        self.lamb.ge.is_some() && self.pull.is_some() && self.chi.is_some() && self.anharm.is_some()
    }
}

/// Denominators of `ζ` smaller than this (GHz) are treated as singular.
pub const ZETA_SINGULAR: f64 = 1e-9;

fn zeta(levels: &DressedLevels, spec: &DeviceSpec) -> Result<f64> {
    let missing = || Error::MissingBranch("g, e, f (transmon-only and vacuum)".into());
    let a = levels
        .vacuum_transition(0, 1)
        .zip(levels.vacuum_transition(1, 2))
        .map(|(ge, ef)| ge - ef);
    let a = a.ok_or_else(missing)?;
    let wge = levels.transmon_transition(0, 1).ok_or_else(missing)?;
    let denom = wge - spec.resonator_freq - a;
    if denom.abs() < ZETA_SINGULAR {
        return Err(Error::Singular(format!("ω̃_ge - ω_r - Ã = {denom:e} GHz")));
    }
    Ok(a / denom)
}

/// Observables at one point; `baseline` holds the undriven energies.
pub fn observables(
    levels: &DressedLevels,
    baseline: &DressedLevels,
    spec: &DeviceSpec,
) -> ObservableSet {
    let lamb = |n: usize, m: usize| {
        Some(levels.vacuum_transition(n, m)? - levels.transmon_transition(n, m)?)
    };
    let rg = levels.resonator(0);
    let re = levels.resonator(1);
    let anharm = levels
        .vacuum_transition(0, 1)
        .zip(levels.vacuum_transition(1, 2))
        .map(|(a, b)| a - b);
    let chi = rg.zip(re).map(|(g, e)| g - e);
    let z = zeta(levels, spec).ok();
    let z0 = zeta(baseline, spec).ok();
    let zeta_ratio = z.zip(z0).map(|(z, z0)| z / z0);
    let chi0 = baseline
        .resonator(0)
        .zip(baseline.resonator(1))
        .map(|(g, e)| g - e);
    ObservableSet {
        amplitude: levels.amplitude,
        omega_tilde: levels.transmon.clone(),
        omega_tilde0: levels.vacuum.clone(),
        lamb: LambShifts {
            ge: lamb(0, 1),
            gf: lamb(0, 2),
            gd: lamb(0, 3),
            ef: lamb(1, 2),
        },
        omega_ge: levels.transmon_transition(0, 1),
        omega_ge0: levels.vacuum_transition(0, 1),
        resonator_g: rg,
        pull: rg.map(|r| r - spec.resonator_freq),
        chi,
        anharm,
        zeta: z,
        zeta_ratio,
        chi_scaled: chi0.zip(zeta_ratio).map(|(c, r)| c * r),
    }
}

/// `χ⁰ ζ/ζ₀`: the cross-nonlinearity predicted from the renormalized
/// anharmonicity and qubit frequency with the coupling held constant.
pub fn chi_scaling(obs: &ObservableSet, baseline: &ObservableSet) -> Result<f64> {
    let chi0 = baseline
        .chi
        .ok_or_else(|| Error::MissingBranch("(g,1), (e,1) at zero drive".into()))?;
    let (Some(z), Some(z0)) = (obs.zeta, baseline.zeta) else {
        return Err(Error::Singular(
            "ζ undefined (straddling detuning or missing branches)".into(),
        ));
    };
    if z0 == 0.0 {
        return Err(Error::Singular("ζ₀ = 0".into()));
    }
    Ok(chi0 * z / z0)
}
