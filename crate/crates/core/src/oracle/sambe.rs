//! Extended-space (Sambe) Floquet diagonalization.
//!
//! The quasi-energy operator `H(t) - i∂_t` in the basis `|j⟩ e^{ikωt}`,
//! `|k| ≤ k_max`, has blocks `H_{k-k'} + k f δ_{kk'}`. Its eigenvalues
//! near the center of the photon ladder are the quasi-energies; the
//! truncation error grows toward the edges.

use faer::{Mat, Side};

use crate::floquet::{fold, zone_distance};
use crate::linalg::C64;
use crate::model::TimePeriodicHamiltonian;
use crate::{Error, Result};

pub const SAMBE_K_MAX: usize = 20;
pub const SAMBE_MIN_K_MAX: usize = 5;
/// Largest shift (GHz) allowed between `k_max` and `k_max + 2`.
pub const SAMBE_CONVERGENCE: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct SambeSpectrum {
    /// Ascending, folded.
    pub quasi_energies: Vec<f64>,
    pub k_max: usize,
    /// Largest shift when `k_max` grows by 2 (GHz).
    pub convergence: f64,
    pub converged: bool,
}

/// Largest distance from any member of one folded spectrum to the nearest
/// member of the other.
pub fn spectrum_deviation(a: &[f64], b: &[f64], omega_d: f64) -> f64 {
    let one_way = |x: &[f64], y: &[f64]| {
        x.iter()
            .map(|&p| {
                y.iter()
                    .map(|&q| zone_distance(p, q, omega_d))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    one_way(a, b).max(one_way(b, a))
}

fn window(h: &TimePeriodicHamiltonian, k_max: usize) -> Result<Vec<f64>> {
    let n = h.dimension();
    let f = h.omega_d();
    let h0 = h.static_part();
    let center = (0..n).map(|i| h0[(i, i)].re).sum::<f64>() / n as f64;
    let blocks = 2 * k_max + 1;
    let harmonics: Vec<_> = (0..=h.max_harmonic() as i64)
        .map(|p| h.harmonic(p))
        .collect();
    let entry = |i: usize, j: usize| -> C64 {
        let (bi, bj) = (i / n, j / n);
        let (r, c) = (i % n, j % n);
        let p = bi as i64 - bj as i64;
        let value = match harmonics.get(p.unsigned_abs() as usize) {
            Some(m) if p >= 0 => m[(r, c)],
            Some(m) => m[(c, r)].conj(),
            None => C64::new(0.0, 0.0),
        };
        if i == j {
            value + (bi as f64 - k_max as f64) * f - center
        } else {
            value
        }
    };
    let big = Mat::<C64>::from_fn(blocks * n, blocks * n, entry);
    let mut values = big
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Eigen(format!("extended-space eigenvalues: {e:?}")))?;
    values.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    let mut out: Vec<f64> = values
        .into_iter()
        .take(n)
        .map(|e| fold(e + center, f))
        .collect();
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// Folded quasi-energies from the extended space with photon cutoff
/// `k_max`, with a convergence check against `k_max + 2`.
pub fn sambe_quasi_energies(h: &TimePeriodicHamiltonian, k_max: usize) -> Result<SambeSpectrum> {
    if k_max < SAMBE_MIN_K_MAX {
        return Err(Error::config(format!(
            "k_max = {k_max} is below {SAMBE_MIN_K_MAX}"
        )));
    }
    let quasi_energies = window(h, k_max)?;
    let wider = window(h, k_max + 2)?;
    let convergence = spectrum_deviation(&quasi_energies, &wider, h.omega_d());
    Ok(SambeSpectrum {
        quasi_energies,
        k_max,
        convergence,
        converged: convergence <= SAMBE_CONVERGENCE,
    })
}
