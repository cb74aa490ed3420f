//! Renormalized transmon–resonator coupling in the transmon Floquet frame.
//!
//! With the transmon Floquet modes `u_n(t) = Σ_k c_n[k] e^{2πi k f_d t}` as
//! a time-dependent basis, the bare coupling `G` becomes
//!
//! `G̃_nm(t) = Σ_p G̃^{(p)}_nm e^{2πi p f_d t}`,
//! `G̃^{(p)}_nm = Σ_k Σ_{jj'} c_n[j][k]* G_{jj'} c_m[j'][k+p]`.
//!
//! For a weakly driven ladder `c_n[j][k]` is dominated by `j = n - k`, so
//! the classes `p = m - n ± 1` carry most of each element; their sum is the
//! time-independent scalar `g̃_nm`.

use serde::Serialize;

use crate::floquet::{fourier_components, FourierComponents, FourierOptions, TrackResult};
use crate::linalg::{CMatrix, C64, ZERO};
use crate::model::TimePeriodicHamiltonian;
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct RenormalizedCoupling {
    /// Largest harmonic class stored; `harmonics[p + p_max]` is `G̃^{(p)}`.
    pub p_max: i64,
    pub harmonics: Vec<CMatrix>,
    pub omega_d: f64,
}

impl RenormalizedCoupling {
    pub fn dimension(&self) -> usize {
        self.harmonics[0].nrows()
    }

    /// `G̃^{(p)}`, zero outside the stored range.
    pub fn harmonic(&self, p: i64) -> CMatrix {
        if p.abs() > self.p_max {
            let n = self.dimension();
            return CMatrix::zeros(n, n);
        }
        self.harmonics[(p + self.p_max) as usize].clone()
    }

    pub fn element(&self, n: usize, m: usize, p: i64) -> C64 {
        if p.abs() > self.p_max {
            return ZERO;
        }
        self.harmonics[(p + self.p_max) as usize][(n, m)]
    }

    /// The two dominant harmonic classes of element `(n, m)`.
    pub fn dominant_classes(n: usize, m: usize) -> [i64; 2] {
        let d = m as i64 - n as i64;
        [d + 1, d - 1]
    }

    /// Time-independent `g̃_nm`: the dominant classes summed.
    pub fn scalar(&self, n: usize, m: usize) -> C64 {
        Self::dominant_classes(n, m)
            .iter()
            .map(|&p| self.element(n, m, p))
            .sum()
    }

    /// Matrix of `g̃_nm`.
    pub fn scalar_matrix(&self) -> CMatrix {
        let n = self.dimension();
        CMatrix::from_fn(n, n, |i, j| self.scalar(i, j))
    }

    /// Norm of element `(n, m)` outside the dominant classes.
    pub fn residual(&self, n: usize, m: usize) -> f64 {
        let dominant = Self::dominant_classes(n, m);
        (-self.p_max..=self.p_max)
            .filter(|p| !dominant.contains(p))
            .map(|p| self.element(n, m, p).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest non-dominant residual over all elements.
    pub fn max_residual(&self) -> f64 {
        let n = self.dimension();
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| self.residual(i, j))
            .fold(0.0, f64::max)
    }

    /// `G̃(t)`.
    pub fn at(&self, t: f64) -> CMatrix {
        let n = self.dimension();
        let w = 2.0 * std::f64::consts::PI * self.omega_d * t;
        let mut out = CMatrix::zeros(n, n);
        for p in -self.p_max..=self.p_max {
            out += self.harmonic(p) * C64::from_polar(1.0, p as f64 * w);
        }
        out
    }
}

/// Summary of `g̃` for output.
#[derive(Clone, Debug, Serialize)]
pub struct CouplingSummary {
    pub g_gg: f64,
    pub g_ee: f64,
    pub g_ge: f64,
    /// Largest non-dominant harmonic residual (GHz).
    pub residual: f64,
}

impl From<&RenormalizedCoupling> for CouplingSummary {
    fn from(c: &RenormalizedCoupling) -> Self {
        CouplingSummary {
            g_gg: c.scalar(0, 0).norm(),
            g_ee: c.scalar(1, 1).norm(),
            g_ge: c.scalar(0, 1).norm(),
            residual: c.max_residual(),
        }
    }
}

/// Renormalized coupling from the Fourier components of a complete set of
/// transmon branches.
pub fn renormalized_coupling(c: &FourierComponents, g: &CMatrix) -> Result<RenormalizedCoupling> {
    let n = g.nrows();
    if c.modes.len() < n {
        return Err(Error::MissingBranch(
            crate::floquet::StateLabel::transmon(c.modes.len()).to_string(),
        ));
    }
    if c.modes.iter().any(|m| m.coefficients.nrows() != n) {
        return Err(Error::config(
            "Fourier components and coupling matrix differ in dimension",
        ));
    }
    let k_max = c.k_max() as i64;
    // column n of blocks[k + k_max] is c_n[·][k]
    let blocks: Vec<CMatrix> = (-k_max..=k_max)
        .map(|k| CMatrix::from_fn(n, n, |j, col| c.modes[col].c(j, k)))
        .collect();
    let p_max = 2 * k_max;
    let harmonics = (-p_max..=p_max)
        .map(|p| {
            let mut acc = CMatrix::zeros(n, n);
            for k in -k_max..=k_max {
                let kp = k + p;
                if kp.abs() > k_max {
                    continue;
                }
                acc += blocks[(k + k_max) as usize].adjoint() * g * &blocks[(kp + k_max) as usize];
            }
            acc
        })
        .collect();
    Ok(RenormalizedCoupling {
        p_max,
        harmonics,
        omega_d: c.omega_d,
    })
}

/// Dressed transmon energies and Fourier components of every transmon
/// branch at grid index `index`.
pub fn transmon_frame(
    h: &TimePeriodicHamiltonian,
    track: &TrackResult,
    index: usize,
    opts: &FourierOptions,
) -> Result<(Vec<f64>, FourierComponents)> {
    let mut modes = Vec::with_capacity(track.branches.len());
    for b in &track.branches {
        match (b.energy_at(index), b.mode_at(index)) {
            (Some(e), Some(v)) => modes.push((v.clone(), e)),
            _ => {
                let last_good = match b.status {
                    crate::floquet::BranchStatus::Broken { last_good } => last_good,
                    crate::floquet::BranchStatus::Intact => f64::NAN,
                };
                return Err(Error::BrokenBranch {
                    label: b.label.to_string(),
                    last_good,
                });
            }
        }
    }
    let energies = modes.iter().map(|(_, e)| *e).collect();
    let comps = fourier_components(h, &modes, opts)?;
    Ok((energies, comps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::floquet::{track, StateLabel, TrackOptions};
    use crate::model::{build_transmon_driven, coupling_matrix, DeviceSpec, DriveSpec};

    fn coupling_at(spec: &DeviceSpec, omega_d: f64, amplitude: f64) -> RenormalizedCoupling {
        let family = |a: f64| build_transmon_driven(spec, &DriveSpec::new(omega_d, a)?);
        let grid: Vec<f64> = if amplitude == 0.0 {
            vec![0.0]
        } else {
            (0..=4).map(|k| k as f64 * amplitude / 4.0).collect()
        };
        let labels: Vec<_> = (0..spec.n_q).map(StateLabel::transmon).collect();
        let res = track(family, &grid, &labels, 1, &TrackOptions::default()).unwrap();
        let h = family(amplitude).unwrap();
        let (_, c) = transmon_frame(&h, &res, grid.len() - 1, &FourierOptions::default()).unwrap();
        renormalized_coupling(&c, &coupling_matrix(spec.coupling_g, spec.n_q)).unwrap()
    }

    #[test]
    fn undriven_coupling_is_bare() {
        let spec = DeviceSpec::reference();
        let c = coupling_at(&spec, 4.2, 0.0);
        let g = coupling_matrix(spec.coupling_g, spec.n_q);
        assert!(crate::linalg::max_abs_diff(&c.scalar_matrix(), &g) < 1e-12);
        assert!(crate::linalg::max_abs_diff(&c.harmonic(0), &g) < 1e-12);
        assert!(c.max_residual() < 1e-12);
    }

    #[test]
    fn hermitian_pair_symmetry() {
        let spec = DeviceSpec::reference();
        let c = coupling_at(&spec, 4.2, 0.4);
        for n in 0..4 {
            for m in 0..4 {
                assert!((c.scalar(n, m).norm() - c.scalar(m, n).norm()).abs() < 1e-8);
            }
        }
        // G̃(t) stays Hermitian
        let gt = c.at(0.1);
        assert!(crate::linalg::hermiticity_defect(&gt) < 1e-10);
    }

    #[test]
    fn two_level_longitudinal_terms_are_opposite() {
        let spec = DeviceSpec::reference().truncated(2, 6).unwrap();
        for &(wd, a) in &[(4.2, 0.3), (4.6, 0.2), (3.6, 0.5)] {
            let c = coupling_at(&spec, wd, a);
            let diff = (c.scalar(0, 0).norm() - c.scalar(1, 1).norm()).abs();
            assert!(diff < 1e-8 * spec.coupling_g, "f_d={wd} Ω={a}: {diff:e}");
            assert!(c.scalar(0, 0).norm() > 1e-4);
        }
    }

    #[test]
    fn transmon_longitudinal_terms_differ() {
        let spec = DeviceSpec::reference();
        let c = coupling_at(&spec, 4.2, 0.4);
        let (gg, ee) = (c.scalar(0, 0).norm(), c.scalar(1, 1).norm());
        assert!((gg - ee).abs() > 0.05 * gg, "|g̃_gg|={gg} |g̃_ee|={ee}");
    }

    #[test]
    fn far_detuned_drive_barely_renormalizes_g_ge() {
        let spec = DeviceSpec::reference();
        let delta = spec.omega_ge() - 4.2;
        let c = coupling_at(&spec, 4.2, 0.2 * delta);
        let ratio = c.scalar(0, 1).norm() / spec.coupling_g;
        assert!((ratio - 1.0).abs() < 0.05, "g̃_ge/g = {ratio}");
    }

    #[test]
    fn missing_branch_is_named() {
        let spec = DeviceSpec::reference().truncated(4, 6).unwrap();
        let h = build_transmon_driven(&spec, &DriveSpec::new(4.2, 0.0).unwrap()).unwrap();
        let modes: Vec<_> = (0..2)
            .map(|n| {
                let mut v = crate::CVector::zeros(4);
                v[n] = C64::new(1.0, 0.0);
                (v, spec.transmon_levels[n])
            })
            .collect();
        let c = fourier_components(&h, &modes, &FourierOptions::default()).unwrap();
        let err = renormalized_coupling(&c, &coupling_matrix(spec.coupling_g, 4)).unwrap_err();
        assert!(
            matches!(err, Error::MissingBranch(ref l) if l == "f"),
            "{err}"
        );
    }
}
