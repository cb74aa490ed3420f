//! Floquet quasi-energies and modes of time-periodic Hamiltonians.
//!
//! Quasi-energies are folded into the Brillouin zone `[-f_d/2, f_d/2)`.
//! Modes are returned at `t = 0` with the largest component made real and
//! positive.

mod fourier;
mod monodromy;
mod track;

use std::f64::consts::PI;

pub use fourier::{
    fourier_components, sample_propagators, selection_rule_violation, FourierComponents,
    FourierOptions, ModeFourier, SelectionViolation,
};
pub use monodromy::{
    initial_steps, monodromy, monodromy_adaptive, monodromy_from, propagate, Monodromy, MAX_STEPS,
};
pub use track::{
    track, track_from, BranchStart, BranchStatus, FloquetBranch, StateLabel, TieRecord,
    TrackOptions, TrackResult,
};

use crate::linalg::{self, eigh, fix_phase, unitary_eigen, CMatrix, CVector};
use crate::model::TimePeriodicHamiltonian;
use crate::Result;

/// Eigenphases closer than this are treated as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct FloquetSolution {
    /// Ascending, inside `[-f_d/2, f_d/2)`.
    pub quasi_energies: Vec<f64>,
    /// Columns are the Floquet modes at `t = 0`, ordered like `quasi_energies`.
    pub modes_t0: CMatrix,
    pub omega_d: f64,
    pub steps: usize,
    pub error_estimate: f64,
    /// Number of degenerate clusters whose basis was fixed by the tie-break.
    pub degenerate_clusters: usize,
}

impl FloquetSolution {
    pub fn mode(&self, k: usize) -> CVector {
        self.modes_t0.column(k).into_owned()
    }

    pub fn len(&self) -> usize {
        self.quasi_energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quasi_energies.is_empty()
    }
}

/// Fold `e` into `[-f/2, f/2)`.
pub fn fold(e: f64, omega_d: f64) -> f64 {
    let mut x = e - omega_d * (e / omega_d).round();
    if x >= omega_d / 2.0 {
        x -= omega_d;
    }
    if x < -omega_d / 2.0 {
        x += omega_d;
    }
    x
}

/// Shortest distance between two quasi-energies on the zone circle.
pub fn zone_distance(a: f64, b: f64, omega_d: f64) -> f64 {
    fold(a - b, omega_d).abs()
}

/// Representative of `folded + α f_d` nearest to `reference`.
pub fn unfold_near(folded: f64, reference: f64, omega_d: f64) -> f64 {
    folded + omega_d * ((reference - folded) / omega_d).round()
}

/// Floquet solution with an adaptive step count.
pub fn solve(h: &TimePeriodicHamiltonian, tol: f64) -> Result<FloquetSolution> {
    let m = monodromy(h, tol)?;
    decompose(h, &m.propagator, m.steps, m.error_estimate)
}

/// Floquet solution with a fixed number of Magnus steps per period.
pub fn solve_with_steps(h: &TimePeriodicHamiltonian, steps: usize) -> Result<FloquetSolution> {
    let u = monodromy_from(h, 0.0, steps);
    decompose(h, &u, steps, f64::NAN)
}

/// Quasi-energies and modes from a one-period propagator.
///
/// Inside a degenerate cluster the basis is the one diagonalizing the
/// period-averaged Hamiltonian projected onto the cluster, ties broken by
/// index order.
pub fn decompose(
    h: &TimePeriodicHamiltonian,
    propagator: &CMatrix,
    steps: usize,
    error_estimate: f64,
) -> Result<FloquetSolution> {
    let omega_d = h.omega_d();
    let (values, vectors) = unitary_eigen(propagator)?;
    let n = values.len();
    let energies: Vec<f64> = values
        .iter()
        .map(|l| fold(-l.arg() * omega_d / (2.0 * PI), omega_d))
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| energies[a].total_cmp(&energies[b]).then(a.cmp(&b)));
    let quasi_energies: Vec<f64> = order.iter().map(|&k| energies[k]).collect();
    let mut modes = CMatrix::from_fn(n, n, |i, j| vectors[(i, order[j])]);

    // Clusters of adjacent sorted quasi-energies; a pair straddling the
    // zone edge keeps the Schur basis.
    let phase_tol = DEGENERACY_TOL * omega_d;
    let mut clusters = 0;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && quasi_energies[end] - quasi_energies[end - 1] < phase_tol {
            end += 1;
        }
        if end - start > 1 {
            clusters += 1;
            rotate_cluster(&mut modes, start..end, h.static_part());
        }
        start = end;
    }

    for j in 0..n {
        let mut v = modes.column(j).into_owned();
        fix_phase(&mut v);
        modes.set_column(j, &v);
    }
    Ok(FloquetSolution {
        quasi_energies,
        modes_t0: modes,
        omega_d,
        steps,
        error_estimate,
        degenerate_clusters: clusters,
    })
}

fn rotate_cluster(modes: &mut CMatrix, range: std::ops::Range<usize>, averaged: &CMatrix) {
    let q = modes.columns(range.start, range.len()).into_owned();
    let projected = q.adjoint() * averaged * &q;
    let (_, rotation) = eigh(&projected);
    let rotated = q * rotation;
    for (j, col) in range.enumerate() {
        modes.set_column(col, &rotated.column(j));
    }
}

/// `|⟨mode|c_j⟩|` for every column `c_j` of `candidates`.
pub(crate) fn best_overlaps(mode: &CVector, candidates: &CMatrix) -> Vec<f64> {
    (0..candidates.ncols())
        .map(|j| linalg::overlap(mode, &candidates.column(j).into_owned()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{diagonal, real};
    use crate::model::{
        build_joint, build_transmon_driven, DeviceSpec, DriveSpec, HamiltonianVariant,
    };

    #[test]
    fn folding_into_zone() {
        assert!((fold(5.869, 4.2) - 1.669).abs() < 1e-12);
        assert_eq!(fold(2.1, 4.2), -2.1);
        assert_eq!(fold(-2.1, 4.2), -2.1);
        assert!((fold(-2.2, 4.2) - 2.0).abs() < 1e-12);
        assert!((unfold_near(1.669, 6.0, 4.2) - 5.869).abs() < 1e-12);
    }

    #[test]
    fn undriven_two_level_quasi_energies() {
        let h = TimePeriodicHamiltonian::undriven(diagonal(&[0.0, 5.869]), 4.2).unwrap();
        let sol = solve(&h, 1e-9).unwrap();
        assert!((sol.quasi_energies[0] - 0.0).abs() < 1e-12);
        assert!((sol.quasi_energies[1] - 1.669).abs() < 1e-12);
    }

    #[test]
    fn undriven_is_folded_spectrum() {
        let spec = DeviceSpec::reference();
        let h0 = crate::model::joint_static(&spec).unwrap();
        let (values, _) = eigh(&h0);
        let h = TimePeriodicHamiltonian::undriven(h0, 4.2).unwrap();
        let sol = solve(&h, 1e-9).unwrap();
        let mut folded: Vec<f64> = values.iter().map(|&e| fold(e, 4.2)).collect();
        folded.sort_by(f64::total_cmp);
        for (a, b) in sol.quasi_energies.iter().zip(&folded) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn quasi_energies_inside_zone_and_modes_orthonormal() {
        let spec = DeviceSpec::reference();
        let drive = DriveSpec::new(4.2, 0.4).unwrap();
        let h = build_joint(&spec, &drive, HamiltonianVariant::Full)
            .unwrap()
            .hamiltonian;
        let sol = solve(&h, 1e-8).unwrap();
        assert!(sol.quasi_energies.iter().all(|&e| (-2.1..2.1).contains(&e)));
        assert!(linalg::unitarity_defect(&sol.modes_t0) < 1e-10);
    }

    #[test]
    fn degenerate_tie_break_uses_averaged_hamiltonian() {
        // levels 0 and 4.2 fold onto each other
        let h0 = CMatrix::from_row_slice(
            3,
            3,
            &[
                real(0.0),
                real(0.0),
                real(0.0),
                real(0.0),
                real(4.2),
                real(0.0),
                real(0.0),
                real(0.0),
                real(1.0),
            ],
        );
        let h = TimePeriodicHamiltonian::undriven(h0, 4.2).unwrap();
        let sol = solve(&h, 1e-9).unwrap();
        assert_eq!(sol.degenerate_clusters, 1);
        for j in 0..3 {
            let v = sol.mode(j);
            let largest = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!((largest - 1.0).abs() < 1e-10, "mode {j} not a basis vector");
        }
    }

    #[test]
    fn gauge_independence_of_start_time() {
        let spec = DeviceSpec::reference();
        let drive = DriveSpec::new(4.2, 0.3).unwrap();
        let h = build_transmon_driven(&spec, &drive).unwrap();
        let steps = 512;
        let a = decompose(&h, &monodromy_from(&h, 0.0, steps), steps, 0.0).unwrap();
        let b = decompose(&h, &monodromy_from(&h, h.period() / 3.0, steps), steps, 0.0).unwrap();
        for (x, y) in a.quasi_energies.iter().zip(&b.quasi_energies) {
            assert!(zone_distance(*x, *y, 4.2) < 1e-6, "{x} vs {y}");
        }
    }
}
