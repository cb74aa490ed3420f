//! Amplitude sweeps of one Hamiltonian variant at a fixed drive frequency.

use serde::Serialize;

use super::{
    effective_branches, joint_labels, observables, renormalized_coupling, transmon_frame,
    CouplingSelection, CouplingSummary, DressedLevels, ObservableSet,
};
use crate::floquet::{track, BranchStatus, FourierOptions, StateLabel, TrackOptions, TrackResult};
use crate::model::{
    build_joint, build_transmon_driven, coupling_matrix, DeviceSpec, DriveSpec, HamiltonianVariant,
};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Default)]
pub struct SweepOptions {
    pub track: TrackOptions,
    pub fourier: FourierOptions,
}

#[derive(Clone, Debug, Serialize)]
pub struct BranchHealth {
    pub label: String,
    #[serde(flatten)]
    pub status: BranchStatus,
    pub min_overlap: f64,
}

#[derive(Clone, Debug)]
pub struct SweepPoint {
    pub levels: DressedLevels,
    pub observables: ObservableSet,
    /// Renormalized coupling summary when every transmon branch is intact.
    pub coupling: Option<CouplingSummary>,
    /// Per-point failure that left fields absent.
    pub error: Option<String>,
}

#[derive(Clone, Debug)]
pub struct AmplitudeSweep {
    pub variant: HamiltonianVariant,
    pub omega_d: f64,
    pub points: Vec<SweepPoint>,
    pub baseline: DressedLevels,
    pub steps: usize,
    pub refinements: usize,
    pub ties: usize,
    pub ambiguous_start: bool,
    pub health: Vec<BranchHealth>,
}

fn health(track: &TrackResult) -> impl Iterator<Item = BranchHealth> + '_ {
    track.branches.iter().map(|b| BranchHealth {
        label: b.label.to_string(),
        status: b.status,
        min_overlap: b.min_overlap,
    })
}

/// Sweep `amplitudes` at drive frequency `omega_d` for one variant.
///
/// The branches are tracked from zero drive; a zero amplitude is added to
/// the tracking grid when absent. Per-point failures are recorded in the
/// point and do not abort the sweep.
pub fn amplitude_sweep(
    spec: &DeviceSpec,
    omega_d: f64,
    amplitudes: &[f64],
    variant: HamiltonianVariant,
    opts: &SweepOptions,
) -> Result<AmplitudeSweep> {
    spec.validate()?;
    DriveSpec::new(omega_d, 0.0)?;
    if amplitudes.is_empty() {
        return Err(Error::config("amplitude grid is empty"));
    }
    let offset = usize::from(amplitudes[0] != 0.0);
    let mut grid = Vec::with_capacity(amplitudes.len() + offset);
    if offset == 1 {
        grid.push(0.0);
    }
    grid.extend_from_slice(amplitudes);

    let transmon_family = |a: f64| build_transmon_driven(spec, &DriveSpec::new(omega_d, a)?);
    let all_levels: Vec<StateLabel> = (0..spec.n_q).map(StateLabel::transmon).collect();
    let transmon = track(transmon_family, &grid, &all_levels, 1, &opts.track)?;
    let mut health_rows: Vec<BranchHealth> = health(&transmon).collect();
    let (mut steps, mut refinements, mut ties) =
        (transmon.steps, transmon.refinements, transmon.ties.len());
    let mut ambiguous = transmon.ambiguous_start;

    let labels = joint_labels(spec.n_q);
    let g = coupling_matrix(spec.coupling_g, spec.n_q);
    let frame_at = |i: usize| -> Result<_> {
        let (levels, comps) =
            transmon_frame(&transmon_family(grid[i])?, &transmon, i, &opts.fourier)?;
        Ok((levels, renormalized_coupling(&comps, &g)?))
    };

    let mut per_point: Vec<(DressedLevels, Option<CouplingSummary>, Option<String>)> =
        Vec::with_capacity(grid.len());
    match variant {
        HamiltonianVariant::NoResonator => {
            for (i, &a) in grid.iter().enumerate() {
                let coupling = frame_at(i).ok().map(|(_, c)| CouplingSummary::from(&c));
                per_point.push((
                    DressedLevels::from_tracks(a, Some(&transmon), None, i),
                    coupling,
                    None,
                ));
            }
        }
        HamiltonianVariant::Full => {
            if spec.n_r < 2 {
                return Err(Error::config("the full variant needs n_r >= 2"));
            }
            let family =
                |a: f64| Ok(build_joint(spec, &DriveSpec::new(omega_d, a)?, variant)?.hamiltonian);
            let joint = track(family, &grid, &labels, spec.n_r, &opts.track)?;
            steps = steps.max(joint.steps);
            refinements += joint.refinements;
            ties += joint.ties.len();
            ambiguous |= joint.ambiguous_start;
            health_rows.extend(health(&joint));
            for (i, &a) in grid.iter().enumerate() {
                let coupling = frame_at(i).ok().map(|(_, c)| CouplingSummary::from(&c));
                per_point.push((
                    DressedLevels::from_tracks(a, Some(&transmon), Some(&joint), i),
                    coupling,
                    None,
                ));
            }
        }
        HamiltonianVariant::StaticPlusDlcOnly => {
            if spec.n_r < 2 {
                return Err(Error::config("the static-plus-DLC variant needs n_r >= 2"));
            }
            for (i, &a) in grid.iter().enumerate() {
                let mut levels = DressedLevels::from_tracks(a, Some(&transmon), None, i);
                let outcome = frame_at(i).and_then(|(dressed, coupling)| {
                    let eff = effective_branches(
                        &dressed,
                        &coupling,
                        spec.resonator_freq,
                        spec.n_r,
                        CouplingSelection::StaticPlusDlc,
                        &labels,
                        &opts.track,
                    )?;
                    Ok((eff, CouplingSummary::from(&coupling)))
                });
                match outcome {
                    Ok((eff, summary)) => {
                        let last = super::effective::COUPLING_RAMP.len() - 1;
                        let joint = DressedLevels::from_tracks(a, None, Some(&eff), last);
                        levels.vacuum = joint.vacuum;
                        levels.one_photon = joint.one_photon;
                        steps = steps.max(eff.steps);
                        refinements += eff.refinements;
                        ties += eff.ties.len();
                        per_point.push((levels, Some(summary), None));
                    }
                    Err(e) => per_point.push((levels, None, Some(e.to_string()))),
                }
            }
        }
    }

    let baseline = per_point[0].0.clone();
    let points = per_point
        .into_iter()
        .skip(offset)
        .map(|(levels, coupling, error)| SweepPoint {
            observables: observables(&levels, &baseline, spec),
            levels,
            coupling,
            error,
        })
        .collect();
    Ok(AmplitudeSweep {
        variant,
        omega_d,
        points,
        baseline,
        steps,
        refinements,
        ties,
        ambiguous_start: ambiguous,
        health: health_rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn undriven_point_of_every_variant_agrees() {
        let spec = DeviceSpec::reference();
        let opts = SweepOptions::default();
        let full = amplitude_sweep(&spec, 4.2, &[0.0], HamiltonianVariant::Full, &opts).unwrap();
        let dlc = amplitude_sweep(
            &spec,
            4.2,
            &[0.0],
            HamiltonianVariant::StaticPlusDlcOnly,
            &opts,
        )
        .unwrap();
        let (a, b) = (&full.points[0].observables, &dlc.points[0].observables);
        assert!((a.lamb.ge.unwrap() - b.lamb.ge.unwrap()).abs() < 1e-9);
        assert!((a.chi.unwrap() - b.chi.unwrap()).abs() < 1e-9);
        let none =
            amplitude_sweep(&spec, 4.2, &[0.0], HamiltonianVariant::NoResonator, &opts).unwrap();
        assert!(none.points[0].observables.lamb.ge.is_none());
        assert_eq!(
            none.points[0].levels.transmon[1],
            Some(spec.transmon_levels[1])
        );
    }

    #[test]
    fn zero_is_prepended_and_hidden() {
        let spec = DeviceSpec::reference().truncated(4, 4).unwrap();
        let opts = SweepOptions::default();
        let s = amplitude_sweep(&spec, 4.2, &[0.05, 0.1], HamiltonianVariant::Full, &opts).unwrap();
        assert_eq!(s.points.len(), 2);
        assert_eq!(s.points[0].levels.amplitude, 0.05);
        assert_eq!(s.baseline.amplitude, 0.0);
        assert!(s.health.iter().all(|h| h.status == BranchStatus::Intact));
    }

    #[test]
    fn empty_grid_is_rejected() {
        let spec = DeviceSpec::reference();
        assert!(amplitude_sweep(
            &spec,
            4.2,
            &[],
            HamiltonianVariant::Full,
            &SweepOptions::default()
        )
        .is_err());
    }
}
