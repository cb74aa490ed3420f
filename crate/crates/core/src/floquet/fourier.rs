//! Fourier components of Floquet modes.
//!
//! With unfolded quasi-energy `ε` the Floquet state is
//! `ψ(t) = e^{-2πiεt} u(t)`, and the periodic mode is expanded as
//! `u(t) = Σ_k Σ_j c[j][k] e^{+2πi k f_d t} |j⟩`.
//! At zero drive `c[j][k] = δ_{nj} δ_{k0}` for the branch of state `n`.

use std::f64::consts::PI;

use super::propagate;
use crate::linalg::{identity, CMatrix, CVector, C64, ZERO};
use crate::model::TimePeriodicHamiltonian;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct FourierOptions {
    pub k_max: usize,
    /// Initial number of samples per period.
    pub samples: usize,
    /// Sample count cap for the normalization retry loop.
    pub max_samples: usize,
    /// Magnus steps per period for the sample propagators.
    pub steps: usize,
    pub normalization_tol: f64,
}

impl Default for FourierOptions {
    fn default() -> Self {
        FourierOptions {
            k_max: 10,
            samples: 64,
            max_samples: 1024,
            steps: 1024,
            normalization_tol: 1e-6,
        }
    }
}

/// Fourier coefficients of one mode: rows are basis states, columns are
/// harmonics `-k_max..=k_max`.
#[derive(Clone, Debug)]
pub struct ModeFourier {
    pub k_max: usize,
    pub coefficients: CMatrix,
}

impl ModeFourier {
    pub fn c(&self, j: usize, k: i64) -> C64 {
        if k.unsigned_abs() as usize > self.k_max {
            return ZERO;
        }
        self.coefficients[(j, (k + self.k_max as i64) as usize)]
    }

    /// Column of harmonic `k` (zero outside the stored range).
    pub fn harmonic(&self, k: i64) -> CVector {
        if k.unsigned_abs() as usize > self.k_max {
            return CVector::zeros(self.coefficients.nrows());
        }
        self.coefficients
            .column((k + self.k_max as i64) as usize)
            .into_owned()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coefficients.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// `c[n][j][k]` for a set of branches.
#[derive(Clone, Debug)]
pub struct FourierComponents {
    pub modes: Vec<ModeFourier>,
    pub samples: usize,
    pub omega_d: f64,
}

impl FourierComponents {
    pub fn c(&self, n: usize, j: usize, k: i64) -> C64 {
        self.modes[n].c(j, k)
    }

    pub fn k_max(&self) -> usize {
        self.modes.first().map_or(0, |m| m.k_max)
    }

    /// Largest `|Σ |c|² - 1|` over the branches.
    pub fn normalization_defect(&self) -> f64 {
        self.modes
            .iter()
            .map(|m| (m.norm_sqr() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Largest Fourier component outside the transmon selection rule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SelectionViolation {
    pub magnitude: f64,
    /// Transmon level of the mode.
    pub level: usize,
    pub component: usize,
    /// Harmonic in this module's convention.
    pub harmonic: i64,
}

/// Worst `|c[n][j][k]|` with `k ± n ≠ j`, where `levels[i]` is the
/// transmon level `n` of mode `i`.
///
/// The rule is written for `u(t) = Σ_k c_k e^{-ikωt}`, so the harmonic
/// `k` here enters as `-k`.
pub fn selection_rule_violation(c: &FourierComponents, levels: &[usize]) -> SelectionViolation {
    let k_max = c.k_max() as i64;
    let mut worst = SelectionViolation {
        magnitude: 0.0,
        level: 0,
        component: 0,
        harmonic: 0,
    };
    for (mode, &n) in c.modes.iter().zip(levels) {
        for j in 0..mode.coefficients.nrows() {
            for k in -k_max..=k_max {
                let (kp, n, j) = (-k, n as i64, j as i64);
                if kp + n == j || kp - n == j {
                    continue;
                }
                let v = mode.c(j as usize, k).norm();
                if v > worst.magnitude {
                    worst = SelectionViolation {
                        magnitude: v,
                        level: n as usize,
                        component: j as usize,
                        harmonic: k,
                    };
                }
            }
        }
    }
    worst
}

/// `U(t_s, 0)` at `t_s = s T / M`, `s = 0..M`.
pub fn sample_propagators(
    h: &TimePeriodicHamiltonian,
    samples: usize,
    steps_per_period: usize,
) -> Vec<CMatrix> {
    let period = h.period();
    let per_sample = steps_per_period.div_ceil(samples).max(1);
    let mut out = Vec::with_capacity(samples);
    let mut u = identity(h.dimension());
    out.push(u.clone());
    for s in 1..samples {
        let t0 = (s - 1) as f64 * period / samples as f64;
        let t1 = s as f64 * period / samples as f64;
        u = propagate(h, t0, t1, per_sample) * u;
        out.push(u.clone());
    }
    out
}

/// Fourier components of modes given at `t = 0` with their unfolded
/// quasi-energies.
///
/// If the retained harmonics miss more than `normalization_tol` of the
/// norm, the sampling is doubled up to `max_samples`.
pub fn fourier_components(
    h: &TimePeriodicHamiltonian,
    modes: &[(CVector, f64)],
    opts: &FourierOptions,
) -> Result<FourierComponents> {
    if opts.k_max < 1 {
        return Err(Error::config("k_max must be at least 1"));
    }
    let mut samples = opts.samples.max(2 * opts.k_max + 2);
    loop {
        let comps = components_at(h, modes, opts.k_max, samples, opts.steps);
        let defect = comps.normalization_defect();
        if defect <= opts.normalization_tol {
            return Ok(comps);
        }
        if 2 * samples > opts.max_samples {
            return Err(Error::Normalization {
                defect,
                limit: opts.normalization_tol,
                samples,
            });
        }
        samples *= 2;
    }
}

fn components_at(
    h: &TimePeriodicHamiltonian,
    modes: &[(CVector, f64)],
    k_max: usize,
    samples: usize,
    steps: usize,
) -> FourierComponents {
    let props = sample_propagators(h, samples, steps);
    let period = h.period();
    let dim = h.dimension();
    let width = 2 * k_max + 1;
    let out = modes
        .iter()
        .map(|(mode, energy)| {
            let mut coefficients = CMatrix::zeros(dim, width);
            for (s, u) in props.iter().enumerate() {
                let t = s as f64 * period / samples as f64;
                let psi = u * mode;
                let strip = C64::from_polar(1.0, 2.0 * PI * energy * t);
                for (col, k) in (-(k_max as i64)..=k_max as i64).enumerate() {
                    let twiddle =
                        C64::from_polar(1.0, -2.0 * PI * (k as f64) * (s as f64) / samples as f64);
                    let w = strip * twiddle / samples as f64;
                    for j in 0..dim {
                        coefficients[(j, col)] += psi[j] * w;
                    }
                }
            }
            ModeFourier {
                k_max,
                coefficients,
            }
        })
        .collect();
    FourierComponents {
        modes: out,
        samples,
        omega_d: h.omega_d(),
    }
}
