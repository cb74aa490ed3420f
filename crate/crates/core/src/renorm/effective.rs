//! Joint Hamiltonian in the transmon Floquet frame.
//!
//! `H_eff(t) = Σ_n ω̃_n |n⟩⟨n| + ω_r a†a + G̃(t) ⊗ i(a - a†)`
//!
//! With every harmonic of `G̃(t)` kept this is unitarily equivalent to the
//! full driven joint Hamiltonian, so its quasi-energies coincide. The
//! restricted selections drop parts of the renormalized interaction.

use serde::{Deserialize, Serialize};

use super::RenormalizedCoupling;
use crate::floquet::{track, StateLabel, TrackOptions, TrackResult};
use crate::linalg::{diagonal, identity, kron, real, CMatrix};
use crate::model::{joint_interaction, TimePeriodicHamiltonian};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingSelection {
    /// Every harmonic class.
    All,
    /// Static off-diagonal coupling plus the diagonal first-harmonic
    /// (drive-induced longitudinal) terms.
    StaticPlusDlc,
    /// Static off-diagonal coupling only.
    StaticOnly,
}

/// Coupling-strength continuation grid used to connect the effective
/// model to its uncoupled limit.
pub const COUPLING_RAMP: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

/// Interaction matrices `X^{(p)}`, `p = 0..`, for a selection.
fn selected_harmonics(
    coupling: &RenormalizedCoupling,
    selection: CouplingSelection,
) -> Vec<CMatrix> {
    let n = coupling.dimension();
    let off_diagonal =
        |m: CMatrix| CMatrix::from_fn(n, n, |i, j| if i == j { real(0.0) } else { m[(i, j)] });
    let x0 = coupling.harmonic(0);
    let x0 = (&x0 + x0.adjoint()) * real(0.5);
    match selection {
        CouplingSelection::All => {
            let mut out = vec![x0];
            out.extend((1..=coupling.p_max).map(|p| coupling.harmonic(p)));
            out
        }
        CouplingSelection::StaticPlusDlc => {
            let x1 = coupling.harmonic(1);
            let dlc = CMatrix::from_fn(n, n, |i, j| if i == j { x1[(i, j)] } else { real(0.0) });
            vec![off_diagonal(x0), dlc]
        }
        CouplingSelection::StaticOnly => vec![off_diagonal(x0)],
    }
}

/// Effective joint Hamiltonian with the interaction scaled by `scale`.
pub fn effective_hamiltonian(
    levels: &[f64],
    coupling: &RenormalizedCoupling,
    resonator_freq: f64,
    n_r: usize,
    selection: CouplingSelection,
    scale: f64,
) -> Result<TimePeriodicHamiltonian> {
    let n_q = coupling.dimension();
    if levels.len() != n_q {
        return Err(Error::config(format!(
            "{} dressed levels for a {n_q}-level coupling",
            levels.len()
        )));
    }
    if n_r < 2 {
        return Err(Error::config(format!(
            "resonator truncation n_r = {n_r} is below 2"
        )));
    }
    let number: Vec<f64> = (0..n_r).map(|m| m as f64 * resonator_freq).collect();
    let bare = kron(&diagonal(levels), &identity(n_r)) + kron(&identity(n_q), &diagonal(&number));
    let mut xs = selected_harmonics(coupling, selection).into_iter();
    let x0 = xs.next().expect("static harmonic");
    let h0 = bare + joint_interaction(&x0, n_r) * real(scale);
    let harmonics = xs
        .map(|x| joint_interaction(&x, n_r) * real(scale))
        .collect();
    TimePeriodicHamiltonian::from_harmonics(h0, harmonics, coupling.omega_d)
}

/// Joint branches of the effective model.
///
/// The branches are continued in the interaction strength from the
/// uncoupled product states `|n⟩|m⟩` with energies `ω̃_n + m ω_r`, so the
/// returned energies are unfolded consistently with `levels`.
pub fn effective_branches(
    levels: &[f64],
    coupling: &RenormalizedCoupling,
    resonator_freq: f64,
    n_r: usize,
    selection: CouplingSelection,
    labels: &[StateLabel],
    opts: &TrackOptions,
) -> Result<TrackResult> {
    let family =
        |s: f64| effective_hamiltonian(levels, coupling, resonator_freq, n_r, selection, s);
    track(family, &COUPLING_RAMP, labels, n_r, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::floquet::FourierOptions;
    use crate::model::{
        build_joint, build_transmon_driven, coupling_matrix, DeviceSpec, DriveSpec,
        HamiltonianVariant,
    };
    use crate::renorm::{renormalized_coupling, transmon_frame};

    fn frame(
        spec: &DeviceSpec,
        omega_d: f64,
        amplitude: f64,
        points: usize,
    ) -> (Vec<f64>, RenormalizedCoupling) {
        let family = |a: f64| build_transmon_driven(spec, &DriveSpec::new(omega_d, a)?);
        let grid: Vec<f64> = (0..=points)
            .map(|k| k as f64 * amplitude / points.max(1) as f64)
            .collect();
        let labels: Vec<_> = (0..spec.n_q).map(StateLabel::transmon).collect();
        let res = track(family, &grid, &labels, 1, &TrackOptions::default()).unwrap();
        let (levels, c) = transmon_frame(
            &family(amplitude).unwrap(),
            &res,
            points,
            &FourierOptions::default(),
        )
        .unwrap();
        (
            levels,
            renormalized_coupling(&c, &coupling_matrix(spec.coupling_g, spec.n_q)).unwrap(),
        )
    }

    fn joint_labels() -> Vec<StateLabel> {
        vec![
            StateLabel::joint(0, 0),
            StateLabel::joint(1, 0),
            StateLabel::joint(2, 0),
            StateLabel::joint(0, 1),
            StateLabel::joint(1, 1),
        ]
    }

    #[test]
    fn all_harmonics_reproduce_full_joint_model() {
        let spec = DeviceSpec::reference();
        let (wd, a) = (4.2, 0.3);
        let (levels, coupling) = frame(&spec, wd, a, 6);
        let opts = TrackOptions::default();
        let eff = effective_branches(
            &levels,
            &coupling,
            spec.resonator_freq,
            spec.n_r,
            CouplingSelection::All,
            &joint_labels(),
            &opts,
        )
        .unwrap();
        let family = |x: f64| {
            Ok(build_joint(&spec, &DriveSpec::new(wd, x)?, HamiltonianVariant::Full)?.hamiltonian)
        };
        let grid: Vec<f64> = (0..=6).map(|k| k as f64 * a / 6.0).collect();
        let full = track(family, &grid, &joint_labels(), spec.n_r, &opts).unwrap();
        for label in joint_labels() {
            let e = eff.branch(label).unwrap().energies.last().copied().unwrap();
            let f = full
                .branch(label)
                .unwrap()
                .energies
                .last()
                .copied()
                .unwrap();
            assert!((e - f).abs() < 1e-6, "{label}: effective {e} vs full {f}");
        }
    }

    #[test]
    fn undriven_static_selection_is_joint_static() {
        let spec = DeviceSpec::reference();
        let (levels, coupling) = frame(&spec, 4.2, 0.0, 0);
        for sel in [
            CouplingSelection::All,
            CouplingSelection::StaticPlusDlc,
            CouplingSelection::StaticOnly,
        ] {
            let h =
                effective_hamiltonian(&levels, &coupling, spec.resonator_freq, spec.n_r, sel, 1.0)
                    .unwrap();
            let direct = crate::model::joint_static(&spec).unwrap();
            assert!(crate::linalg::max_abs_diff(h.static_part(), &direct) < 1e-12);
            let p_max = h.max_harmonic() as i64;
            assert!((1..=p_max).all(|p| crate::linalg::max_abs(&h.harmonic(p)) < 1e-12));
        }
    }

    #[test]
    fn selections_keep_the_right_terms() {
        let spec = DeviceSpec::reference();
        let (levels, coupling) = frame(&spec, 4.2, 0.3, 4);
        let dlc = effective_hamiltonian(
            &levels,
            &coupling,
            spec.resonator_freq,
            spec.n_r,
            CouplingSelection::StaticPlusDlc,
            1.0,
        )
        .unwrap();
        assert_eq!(dlc.max_harmonic(), 1);
        let static_only = effective_hamiltonian(
            &levels,
            &coupling,
            spec.resonator_freq,
            spec.n_r,
            CouplingSelection::StaticOnly,
            1.0,
        )
        .unwrap();
        assert!(static_only.is_static());
        assert!(crate::linalg::max_abs_diff(dlc.static_part(), static_only.static_part()) < 1e-15);
    }

    #[test]
    fn rejects_mismatched_levels() {
        let spec = DeviceSpec::reference();
        let (levels, coupling) = frame(&spec, 4.2, 0.0, 0);
        let r = effective_hamiltonian(
            &levels[..3],
            &coupling,
            4.335,
            6,
            CouplingSelection::All,
            1.0,
        );
        assert!(r.is_err());
        let r = effective_hamiltonian(&levels, &coupling, 4.335, 1, CouplingSelection::All, 1.0);
        assert!(r.is_err());
    }
}
