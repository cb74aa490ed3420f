//! Exact diagonalization of the undriven joint Hamiltonian.

use faer::{Mat, Side};
use serde::Serialize;

use crate::linalg::C64;
use crate::model::{joint_static, DeviceSpec};
use crate::{Error, Result};

/// Dressed-state weights below this on the assigned bare state mark the
/// assignment as ambiguous.
pub const ASSIGNMENT_WEIGHT: f64 = 0.5;

/// Undriven dispersive quantities (GHz).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StaticDispersive {
    /// `ω⁰_ge - ω_ge`.
    pub lamb_ge: f64,
    /// `ω_r^g - ω_r^e`.
    pub chi: f64,
    /// `ω_r^g - ω_r`.
    pub pull: f64,
    pub omega_ge0: f64,
    pub resonator_g: f64,
    /// Smallest weight of a dressed state on its bare label.
    pub min_weight: f64,
    /// Two labels claimed the same eigenvector or a weight fell below
    /// [`ASSIGNMENT_WEIGHT`].
    pub ambiguous: bool,
}

/// Ascending spectrum of the undriven joint Hamiltonian.
pub fn static_spectrum(spec: &DeviceSpec) -> Result<Vec<f64>> {
    let h = joint_static(spec)?;
    let dim = h.nrows();
    Mat::<C64>::from_fn(dim, dim, |i, j| h[(i, j)])
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Eigen(format!("joint spectrum: {e:?}")))
}

/// Dressed energies of the bare product states `(n, m)` by maximum overlap.
pub fn dressed_energies(
    spec: &DeviceSpec,
    labels: &[(usize, usize)],
) -> Result<(Vec<f64>, Vec<f64>, bool)> {
    let h = joint_static(spec)?;
    let dim = h.nrows();
    let m = Mat::<C64>::from_fn(dim, dim, |i, j| h[(i, j)]);
    let eig = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Eigen(format!("joint spectrum: {e:?}")))?;
    let (u, s) = (eig.U(), eig.S());
    let mut energies = Vec::with_capacity(labels.len());
    let mut weights = Vec::with_capacity(labels.len());
    let mut claimed = Vec::with_capacity(labels.len());
    for &(n, photons) in labels {
        if n >= spec.n_q || photons >= spec.n_r {
            return Err(Error::config(format!(
                "state ({n}, {photons}) outside the truncation"
            )));
        }
        let row = spec.joint_index(n, photons);
        let (best, weight) = (0..dim)
            .map(|j| (j, u[(row, j)].norm_sqr()))
            .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        energies.push(s[best].re);
        weights.push(weight);
        claimed.push(best);
    }
    let mut sorted = claimed.clone();
    sorted.sort_unstable();
    sorted.dedup();
    let ambiguous = sorted.len() != claimed.len() || weights.iter().any(|&w| w < ASSIGNMENT_WEIGHT);
    Ok((energies, weights, ambiguous))
}

/// Static Lamb shift, cross-nonlinearity and pull.
pub fn static_dispersive(spec: &DeviceSpec) -> Result<StaticDispersive> {
    spec.validate()?;
    if spec.n_q < 2 || spec.n_r < 2 {
        return Err(Error::config(
            "static dispersive shifts need at least two transmon and two resonator levels",
        ));
    }
    let labels = [(0, 0), (1, 0), (0, 1), (1, 1)];
    let (e, weights, ambiguous) = dressed_energies(spec, &labels)?;
    let omega_ge0 = e[1] - e[0];
    let resonator_g = e[2] - e[0];
    Ok(StaticDispersive {
        lamb_ge: omega_ge0 - spec.omega_ge(),
        // grouped so that uncoupled levels cancel exactly
        chi: (e[2] + e[1]) - (e[0] + e[3]),
        pull: resonator_g - spec.resonator_freq,
        omega_ge0,
        resonator_g,
        min_weight: weights.iter().copied().fold(1.0, f64::min),
        ambiguous,
    })
}
