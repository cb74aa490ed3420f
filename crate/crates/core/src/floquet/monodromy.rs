//! One-period propagator by fourth-order Magnus stepping.
//!
//! Each step exponentiates the two-point Gauss–Legendre Magnus generator
//! `Ω = -iπh(H₁ + H₂) + (√3 π² h² / 3)[H₁, H₂]` exactly through a Hermitian
//! eigen-decomposition, so the result is unitary to machine precision and
//! exact for a time-independent Hamiltonian.

use std::f64::consts::PI;

use crate::linalg::{self, commutator, expm_hermitian, identity, CMatrix, I};
use crate::model::TimePeriodicHamiltonian;
use crate::{Error, Result};

/// Largest step count the adaptive driver will try.
pub const MAX_STEPS: usize = 1 << 16;

#[derive(Clone, Debug)]
pub struct Monodromy {
    pub propagator: CMatrix,
    pub steps: usize,
    /// Richardson estimate of the largest entry error.
    pub error_estimate: f64,
}

const GAUSS_OFFSET: f64 = 0.288_675_134_594_812_9; // √3 / 6

/// Propagator from `t0` to `t1` using `steps` uniform Magnus steps.
pub fn propagate(h: &TimePeriodicHamiltonian, t0: f64, t1: f64, steps: usize) -> CMatrix {
    let n = h.dimension();
    if h.is_static() {
        return expm_hermitian(h.static_part(), 2.0 * PI * (t1 - t0));
    }
    let steps = steps.max(1);
    let dt = (t1 - t0) / steps as f64;
    let comm_scale = 3f64.sqrt() * PI * PI * dt * dt / 3.0;
    let mut u = identity(n);
    for s in 0..steps {
        let t = t0 + s as f64 * dt;
        let h1 = h.at(t + (0.5 - GAUSS_OFFSET) * dt);
        let h2 = h.at(t + (0.5 + GAUSS_OFFSET) * dt);
        // exp(Ω) = exp(-i K), K Hermitian
        let k = (&h1 + &h2) * linalg::real(PI * dt) + commutator(&h1, &h2) * (I * comm_scale);
        u = expm_hermitian(&k, 1.0) * u;
    }
    u
}

/// Initial step count: about half a radian of the fastest phase per step.
pub fn initial_steps(h: &TimePeriodicHamiltonian) -> usize {
    let span = spectral_span(h);
    let phase = 2.0 * PI * span * h.period();
    ((phase / 0.5).ceil() as usize).clamp(8, MAX_STEPS)
}

/// Spread of the Hamiltonian's spectrum bounded via Gershgorin discs of
/// the static part plus the harmonic norms.
fn spectral_span(h: &TimePeriodicHamiltonian) -> f64 {
    let h0 = h.static_part();
    let n = h0.nrows();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..n {
        let radius: f64 = (0..n).filter(|&j| j != i).map(|j| h0[(i, j)].norm()).sum();
        lo = lo.min(h0[(i, i)].re - radius);
        hi = hi.max(h0[(i, i)].re + radius);
    }
    let drive: f64 = (1..=h.max_harmonic() as i64)
        .map(|p| 2.0 * h.harmonic(p).norm())
        .sum();
    (hi - lo) + 2.0 * drive
}

/// One-period propagator with a fixed step count, starting at `t0`.
pub fn monodromy_from(h: &TimePeriodicHamiltonian, t0: f64, steps: usize) -> CMatrix {
    propagate(h, t0, t0 + h.period(), steps)
}

/// Adaptive one-period propagator.
///
/// Doubles the step count until the difference between successive
/// propagators, scaled for a fourth-order method, is at most `tol`.
pub fn monodromy(h: &TimePeriodicHamiltonian, tol: f64) -> Result<Monodromy> {
    monodromy_adaptive(h, tol, initial_steps(h))
}

pub fn monodromy_adaptive(
    h: &TimePeriodicHamiltonian,
    tol: f64,
    start_steps: usize,
) -> Result<Monodromy> {
    if !(tol > 0.0 && tol <= 1e-6) {
        return Err(Error::config(format!(
            "tolerance must lie in (0, 1e-6], got {tol:e}"
        )));
    }
    if h.is_static() {
        return Ok(Monodromy {
            propagator: monodromy_from(h, 0.0, 1),
            steps: 1,
            error_estimate: 0.0,
        });
    }
    let mut steps = start_steps.max(1);
    let mut coarse = monodromy_from(h, 0.0, steps);
    loop {
        let fine = monodromy_from(h, 0.0, 2 * steps);
        let error_estimate = linalg::max_abs_diff(&coarse, &fine) / 15.0;
        if error_estimate <= tol {
            let defect = linalg::unitarity_defect(&fine);
            if defect > 10.0 * tol {
                return Err(Error::NonConvergence {
                    requested: tol,
                    achieved: defect,
                    steps: 2 * steps,
                });
            }
            return Ok(Monodromy {
                propagator: fine,
                steps: 2 * steps,
                error_estimate,
            });
        }
        steps *= 2;
        if 2 * steps > MAX_STEPS {
            return Err(Error::NonConvergence {
                requested: tol,
                achieved: error_estimate,
                steps,
            });
        }
        coarse = fine;
    }
}
