//! Adaptive Dormand–Prince 5(4) integration of the propagator.
//!
//! The matrix equation `dU/dt = -2πi (H(t) - c) U` is integrated entry by
//! entry with embedded error control; the mean diagonal `c` of the static
//! part is removed first and restored as a scalar phase at the end.

use std::f64::consts::PI;

use crate::linalg::{identity, unitarity_defect, CMatrix, C64};
use crate::model::TimePeriodicHamiltonian;
use crate::{Error, Result};

const C: [f64; 6] = [0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];

const A: [&[f64]; 6] = [
    &[0.2],
    &[3.0 / 40.0, 9.0 / 40.0],
    &[44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0],
    &[
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
    ],
    &[
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
    ],
    &[
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];

/// Fifth-order weights minus the embedded fourth-order ones.
const E: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];

/// Local tolerance refinements tried before giving up on unitarity.
const REFINEMENTS: i32 = 4;

/// Adaptive integration statistics.
#[derive(Clone, Debug)]
pub struct Evolution {
    pub propagator: CMatrix,
    pub accepted: usize,
    pub rejected: usize,
    pub unitarity_defect: f64,
}

fn mean_diagonal(h: &TimePeriodicHamiltonian) -> f64 {
    let h0 = h.static_part();
    (0..h0.nrows()).map(|i| h0[(i, i)].re).sum::<f64>() / h0.nrows() as f64
}

fn rhs(h: &TimePeriodicHamiltonian, shift: f64, t: f64, u: &CMatrix) -> CMatrix {
    let mut m = h.at(t);
    for i in 0..m.nrows() {
        m[(i, i)] -= shift;
    }
    m * u * C64::new(0.0, -2.0 * PI)
}

fn integrate(h: &TimePeriodicHamiltonian, t0: f64, t1: f64, local_tol: f64) -> Result<Evolution> {
    let n = h.dimension();
    let shift = mean_diagonal(h);
    let span = t1 - t0;
    let mut u = identity(n);
    let mut t = t0;
    let scale = 2.0 * PI * h.norm_bound().max(1e-12);
    let mut step = (0.1 / scale).min(span);
    let min_step = 1e-13 * span.abs().max(1e-300);
    let (mut accepted, mut rejected) = (0, 0);
    let mut k1 = rhs(h, shift, t, &u);
    while t < t1 {
        if t + step > t1 {
            step = t1 - t;
        }
        let mut ks: Vec<CMatrix> = Vec::with_capacity(7);
        ks.push(k1.clone());
        let mut y5 = u.clone();
        for (stage, row) in A.iter().enumerate() {
            let mut y = u.clone();
            for (j, a) in row.iter().enumerate() {
                if *a != 0.0 {
                    y += &ks[j] * C64::new(a * step, 0.0);
                }
            }
            if stage == 5 {
                y5 = y.clone();
            }
            ks.push(rhs(h, shift, t + C[stage] * step, &y));
        }
        let mut err = CMatrix::zeros(n, n);
        for (j, e) in E.iter().enumerate() {
            if *e != 0.0 {
                err += &ks[j] * C64::new(e * step, 0.0);
            }
        }
        let ratio = err.iter().fold(0.0_f64, |m, z| m.max(z.norm())) / local_tol;
        if ratio <= 1.0 {
            t += step;
            u = y5;
            k1 = ks.pop().expect("seven stages");
            accepted += 1;
        } else {
            rejected += 1;
        }
        let factor = if ratio == 0.0 {
            5.0
        } else {
            (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0)
        };
        step *= factor;
        if t < t1 && step < min_step {
            return Err(Error::StepUnderflow { t, h: step });
        }
    }
    let u = u * C64::from_polar(1.0, -2.0 * PI * shift * span);
    let unitarity_defect = unitarity_defect(&u);
    Ok(Evolution {
        propagator: u,
        accepted,
        rejected,
        unitarity_defect,
    })
}

/// Propagator from `t0` to `t1` with unitarity defect at most `10 tol`.
///
/// The local error target starts at `tol / 10` and is tightened until the
/// defect bound holds.
pub fn evolve_between(
    h: &TimePeriodicHamiltonian,
    t0: f64,
    t1: f64,
    tol: f64,
) -> Result<Evolution> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::config(format!(
            "tolerance must be positive, got {tol:e}"
        )));
    }
    if !(t1 >= t0 && t0.is_finite() && t1.is_finite()) {
        return Err(Error::config(format!("invalid time interval [{t0}, {t1}]")));
    }
    if t1 == t0 {
        let n = h.dimension();
        return Ok(Evolution {
            propagator: identity(n),
            accepted: 0,
            rejected: 0,
            unitarity_defect: 0.0,
        });
    }
    let mut last = f64::NAN;
    for r in 0..REFINEMENTS {
        let ev = integrate(h, t0, t1, tol * 10f64.powi(-1 - r))?;
        if ev.unitarity_defect <= 10.0 * tol {
            return Ok(ev);
        }
        last = ev.unitarity_defect;
    }
    Err(Error::NonConvergence {
        requested: tol,
        achieved: last,
        steps: 0,
    })
}

/// Propagator `U(t_final, 0)`.
pub fn evolve(h: &TimePeriodicHamiltonian, t_final: f64, tol: f64) -> Result<CMatrix> {
    Ok(evolve_between(h, 0.0, t_final, tol)?.propagator)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::floquet::monodromy;
    use crate::linalg::{expm_hermitian, max_abs_diff};
    use crate::model::{
        build_joint, build_transmon_driven, DeviceSpec, DriveSpec, HamiltonianVariant,
    };

    #[test]
    fn drive_off_matches_exponential() {
        let spec = DeviceSpec::reference().truncated(4, 3).unwrap();
        let h = build_joint(
            &spec,
            &DriveSpec::new(4.2, 0.0).unwrap(),
            HamiltonianVariant::Full,
        )
        .unwrap()
        .hamiltonian;
        let t = 0.37;
        let u = evolve(&h, t, 1e-12).unwrap();
        let exact = expm_hermitian(h.static_part(), 2.0 * PI * t);
        assert!(
            max_abs_diff(&u, &exact) < 1e-10,
            "{}",
            max_abs_diff(&u, &exact)
        );
    }

    #[test]
    fn period_doubling_is_group_property() {
        let spec = DeviceSpec::reference();
        let h = build_transmon_driven(&spec, &DriveSpec::new(4.2, 0.3).unwrap()).unwrap();
        let t = h.period();
        let one = evolve(&h, t, 1e-11).unwrap();
        let two = evolve(&h, 2.0 * t, 1e-11).unwrap();
        assert!(max_abs_diff(&two, &(&one * &one)) < 1e-8);
    }

    #[test]
    fn agrees_with_magnus_monodromy() {
        let spec = DeviceSpec::reference();
        let h = build_transmon_driven(&spec, &DriveSpec::new(4.2, 0.3).unwrap()).unwrap();
        let u = evolve(&h, h.period(), 1e-11).unwrap();
        let m = monodromy(&h, 1e-10).unwrap();
        assert!(max_abs_diff(&u, &m.propagator) < 1e-7);
    }

    #[test]
    fn unitarity_within_bound_and_bad_input() {
        let spec = DeviceSpec::reference().truncated(3, 2).unwrap();
        let h = build_transmon_driven(&spec, &DriveSpec::new(4.0, 0.2).unwrap()).unwrap();
        let ev = evolve_between(&h, 0.1, 0.6, 1e-9).unwrap();
        assert!(ev.unitarity_defect <= 1e-8);
        assert!(ev.accepted > 0);
        assert!(evolve(&h, 1.0, 0.0).is_err());
        assert!(evolve(&h, -1.0, 1e-9).is_err());
        assert_eq!(evolve(&h, 0.0, 1e-9).unwrap(), identity(3));
    }
}
