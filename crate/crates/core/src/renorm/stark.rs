//! Stark-shift ratios `η_ef = δω_gf / (2 δω_ge)` and
//! `η_ed = δω_gd / (3 δω_ge)` in the small-amplitude limit.
//!
//! The ratios are slopes through the origin of one shift against another,
//! so they do not depend on how the amplitude axis is calibrated.

use serde::Serialize;

use super::{amplitude_sweep, DressedLevels, SweepOptions};
use crate::floquet::{track, StateLabel};
use crate::model::{build_transmon_driven, DeviceSpec, DriveSpec, HamiltonianVariant};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct StarkOptions {
    /// Largest `|δω_ge|` (GHz) allowed on the automatic grid.
    pub max_shift: f64,
    /// Nonzero amplitudes on the automatic grid.
    pub points: usize,
    /// Largest quadratic-fit residual as a fraction of the largest shift.
    pub residual_tol: f64,
}

impl Default for StarkOptions {
    fn default() -> Self {
        StarkOptions {
            max_shift: 1e-3,
            points: 8,
            residual_tol: 0.01,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StarkRatios {
    pub variant: HamiltonianVariant,
    pub omega_d: f64,
    pub amplitudes: Vec<f64>,
    pub shift_ge: Vec<f64>,
    pub shift_gf: Vec<f64>,
    pub shift_gd: Option<Vec<f64>>,
    pub eta_ef: f64,
    pub eta_ed: Option<f64>,
    /// Residual of `δω_ge = c Ω²` relative to the largest shift.
    pub quadratic_residual: f64,
}

/// Least-squares slope of `y = s x` through the origin.
pub fn slope_through_origin(x: &[f64], y: &[f64]) -> f64 {
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let sxx: f64 = x.iter().map(|a| a * a).sum();
    sxy / sxx
}

/// Coefficient `c` of `y = c Ω²` and the largest residual relative to
/// `max |y|`.
pub fn quadratic_fit(amplitudes: &[f64], y: &[f64]) -> (f64, f64) {
    let x2: Vec<f64> = amplitudes.iter().map(|a| a * a).collect();
    let c = slope_through_origin(&x2, y);
    let scale = y.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let worst = x2
        .iter()
        .zip(y)
        .map(|(x, v)| (v - c * x).abs())
        .fold(0.0, f64::max);
    (c, if scale > 0.0 { worst / scale } else { 0.0 })
}

/// Fit the ratios from shifts measured on `amplitudes` (no zero entry).
pub fn fit_stark_ratios(
    variant: HamiltonianVariant,
    omega_d: f64,
    amplitudes: &[f64],
    shift_ge: Vec<f64>,
    shift_gf: Vec<f64>,
    shift_gd: Option<Vec<f64>>,
    opts: &StarkOptions,
) -> Result<StarkRatios> {
    if amplitudes.len() < 2
        || shift_ge.len() != amplitudes.len()
        || shift_gf.len() != amplitudes.len()
    {
        return Err(Error::config(
            "Stark fit needs at least two amplitudes with matching shifts",
        ));
    }
    let (_, residual) = quadratic_fit(amplitudes, &shift_ge);
    if residual > opts.residual_tol {
        return Err(Error::NotQuadratic(format!(
            "δω_ge deviates from c Ω² by {:.2}% of its largest value; use smaller amplitudes",
            100.0 * residual
        )));
    }
    let eta_ef = slope_through_origin(&shift_ge, &shift_gf) / 2.0;
    let eta_ed = shift_gd
        .as_ref()
        .map(|gd| slope_through_origin(&shift_ge, gd) / 3.0);
    Ok(StarkRatios {
        variant,
        omega_d,
        amplitudes: amplitudes.to_vec(),
        shift_ge,
        shift_gf,
        shift_gd,
        eta_ef,
        eta_ed,
        quadratic_residual: residual,
    })
}

/// Automatic amplitude grid keeping the transmon `|δω_ge|` near
/// `0.8 max_shift` at the top, from a quadratic probe.
pub fn stark_grid(
    spec: &DeviceSpec,
    omega_d: f64,
    opts: &StarkOptions,
    sweep: &SweepOptions,
) -> Result<Vec<f64>> {
    if opts.points < 8 {
        return Err(Error::config("a Stark fit needs at least 8 amplitudes"));
    }
    let detuning = (spec.omega_ge() - omega_d).abs().max(1e-3);
    let probe = 0.01 * detuning;
    let family = |a: f64| build_transmon_driven(spec, &DriveSpec::new(omega_d, a)?);
    let labels = [StateLabel::transmon(0), StateLabel::transmon(1)];
    let res = track(family, &[0.0, probe], &labels, 1, &sweep.track)?;
    let shift = |r: &crate::floquet::TrackResult, i| -> Option<f64> {
        Some(r.branches[1].energy_at(i)? - r.branches[0].energy_at(i)?)
    };
    let d = shift(&res, 1)
        .zip(shift(&res, 0))
        .map(|(a, b)| (a - b).abs())
        .ok_or_else(|| Error::MissingBranch("g or e during the Stark probe".into()))?;
    let top = if d > 0.0 {
        probe * (0.8 * opts.max_shift / d).sqrt()
    } else {
        probe
    };
    Ok((1..=opts.points)
        .map(|k| top * k as f64 / opts.points as f64)
        .collect())
}

fn shifts(
    levels: &[&DressedLevels],
    baseline: &DressedLevels,
    variant: HamiltonianVariant,
    m: usize,
) -> Option<Vec<f64>> {
    let transition = |l: &DressedLevels| match variant {
        HamiltonianVariant::NoResonator => l.transmon_transition(0, m),
        _ => l.vacuum_transition(0, m),
    };
    let base = transition(baseline)?;
    levels.iter().map(|l| Some(transition(l)? - base)).collect()
}

/// Stark ratios of a variant. `NoResonator` gives the transmon-only `η`;
/// the joint variants give the vacuum `η⁰`.
pub fn stark_ratios(
    spec: &DeviceSpec,
    omega_d: f64,
    variant: HamiltonianVariant,
    grid: Option<&[f64]>,
    opts: &StarkOptions,
    sweep: &SweepOptions,
) -> Result<StarkRatios> {
    if spec.n_q < 3 {
        return Err(Error::Unsupported(format!(
            "η needs an f level; the transmon has {} levels",
            spec.n_q
        )));
    }
    let mut amplitudes = match grid {
        Some(g) => g.iter().copied().filter(|&a| a > 0.0).collect(),
        None => stark_grid(spec, omega_d, opts, sweep)?,
    };
    for attempt in 0..2 {
        let s = amplitude_sweep(spec, omega_d, &amplitudes, variant, sweep)?;
        let levels: Vec<&DressedLevels> = s.points.iter().map(|p| &p.levels).collect();
        let missing =
            |what: &str| Error::MissingBranch(format!("{what} in the Stark sweep of {variant}"));
        let ge = shifts(&levels, &s.baseline, variant, 1).ok_or_else(|| missing("g or e"))?;
        let gf = shifts(&levels, &s.baseline, variant, 2).ok_or_else(|| missing("f"))?;
        let gd = if spec.n_q >= 4 {
            shifts(&levels, &s.baseline, variant, 3)
        } else {
            None
        };
        let largest = ge.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if grid.is_none() && attempt == 0 && largest >= opts.max_shift {
            let factor = 0.9 * (opts.max_shift / largest).sqrt();
            amplitudes.iter_mut().for_each(|a| *a *= factor);
            continue;
        }
        return fit_stark_ratios(variant, omega_d, &amplitudes, ge, gf, gd, opts);
    }
    unreachable!("second attempt always returns")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_and_quadratic_fit() {
        assert!((slope_through_origin(&[1.0, 2.0], &[3.0, 6.0]) - 3.0).abs() < 1e-15);
        let a = [0.1, 0.2, 0.3];
        let y: Vec<f64> = a.iter().map(|x| 2.0 * x * x).collect();
        let (c, r) = quadratic_fit(&a, &y);
        assert!((c - 2.0).abs() < 1e-12 && r < 1e-12);
    }

    #[test]
    fn non_quadratic_shifts_are_rejected() {
        let a = [0.1_f64, 0.2, 0.3, 0.4];
        let ge: Vec<f64> = a.iter().map(|x| x * x + x.powi(4) * 10.0).collect();
        let err = fit_stark_ratios(
            HamiltonianVariant::Full,
            4.2,
            &a,
            ge.clone(),
            ge,
            None,
            &StarkOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::NotQuadratic(_)));
    }

    #[test]
    fn two_level_is_unsupported() {
        let spec = DeviceSpec::reference().truncated(2, 6).unwrap();
        let err = stark_ratios(
            &spec,
            4.2,
            HamiltonianVariant::NoResonator,
            None,
            &StarkOptions::default(),
            &SweepOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Unsupported(_)));
    }

    #[test]
    fn automatic_grid_stays_below_one_megahertz() {
        let spec = DeviceSpec::reference();
        let opts = StarkOptions::default();
        let r = stark_ratios(
            &spec,
            4.2,
            HamiltonianVariant::NoResonator,
            None,
            &opts,
            &SweepOptions::default(),
        )
        .unwrap();
        assert!(r.amplitudes.len() >= 8);
        assert!(r.shift_ge.iter().all(|s| s.abs() < 1e-3));
        assert!(r.quadratic_residual < 0.01);
        // the transmon ladder pushes f harder than e
        assert!(r.eta_ef > 0.5 && r.eta_ef < 3.0, "η_ef = {}", r.eta_ef);
    }

    #[test]
    fn ratios_ignore_amplitude_calibration() {
        let spec = DeviceSpec::reference();
        let opts = StarkOptions::default();
        let sweep = SweepOptions::default();
        let r = stark_ratios(
            &spec,
            4.14,
            HamiltonianVariant::NoResonator,
            None,
            &opts,
            &sweep,
        )
        .unwrap();
        // relabel the amplitude axis by an arbitrary factor
        let relabeled: Vec<f64> = r.amplitudes.iter().map(|a| 1.7 * a).collect();
        let again = fit_stark_ratios(
            r.variant,
            r.omega_d,
            &relabeled,
            r.shift_ge.clone(),
            r.shift_gf.clone(),
            r.shift_gd.clone(),
            &opts,
        )
        .unwrap();
        assert_eq!(again.eta_ef, r.eta_ef);
        assert_eq!(again.eta_ed, r.eta_ed);
        // a physically different grid inside the quadratic regime
        let smaller: Vec<f64> = r.amplitudes.iter().map(|a| 0.6 * a).collect();
        let other = stark_ratios(
            &spec,
            4.14,
            HamiltonianVariant::NoResonator,
            Some(&smaller),
            &opts,
            &sweep,
        )
        .unwrap();
        assert!((other.eta_ef / r.eta_ef - 1.0).abs() < 0.01);
    }
}
