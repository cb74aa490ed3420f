//! Drive-induced dephasing and the qubit linewidth.
//!
//! `Γ_DID = √(Ã⁰ χ̃) / (2 Δ̃_rd) · Ω_d / (2 Δ̃_qd) · Γ₁^r(ω_d)` with
//! `Δ̃_qd = ω̃⁰_ge - f_d` and `Δ̃_rd = ω̃_r^g - f_d`. Frequencies enter in GHz
//! and only as ratios, so the rate carries the unit of `Γ₁^r` (MHz).
//! Rates are decay rates; a rate `Γ` corresponds to a linewidth `Γ/2π`.

use serde::{Deserialize, Serialize};

use crate::model::DriveSpec;
use crate::renorm::ObservableSet;
use crate::{Error, Result};

/// Zero-drive linewidth quoted for the reference device (MHz).
pub const LINEWIDTH_ANCHOR: f64 = 0.83;

/// FWHM per unit of `Γ₁/2 + Γ_φ + Γ_DID`, fixed so the reference rates
/// reproduce [`LINEWIDTH_ANCHOR`].
pub const LINEWIDTH_CALIBRATION: f64 = LINEWIDTH_ANCHOR / (1.0 / 2.0 + 2.0);

/// Resonator detunings below this many linewidths `Γ₁^r(ω_r⁰)/2π` put
/// the resonator in the excitation regime where the formula does not apply.
pub const EXCITATION_MARGIN: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecoherenceParams {
    /// `Γ₁^q` (MHz).
    pub gamma1_q: f64,
    /// `Γ_φ^q` (MHz).
    pub gamma_phi_q: f64,
    /// `Γ₁^r(ω_r⁰)` (MHz).
    pub gamma1_r_at_res: f64,
    /// `Γ₁^r(ω_d) / Γ₁^r(ω_r⁰)`.
    pub gamma1_r_scale: f64,
}

impl Default for DecoherenceParams {
    fn default() -> Self {
        DecoherenceParams {
            gamma1_q: 1.0,
            gamma_phi_q: 2.0,
            gamma1_r_at_res: 13.47,
            gamma1_r_scale: 0.83,
        }
    }
}

impl DecoherenceParams {
    pub fn validate(&self) -> Result<()> {
        let rates = [self.gamma1_q, self.gamma_phi_q, self.gamma1_r_at_res];
        if rates.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
            return Err(Error::config(
                "decoherence rates must be finite and non-negative",
            ));
        }
        if !(self.gamma1_r_scale > 0.0 && self.gamma1_r_scale <= 2.0) {
            return Err(Error::config(format!(
                "gamma1_r_scale {} outside (0, 2]",
                self.gamma1_r_scale
            )));
        }
        Ok(())
    }

    /// `Γ₁^r(ω_d)` (MHz).
    pub fn gamma1_r_at_drive(&self) -> f64 {
        self.gamma1_r_scale * self.gamma1_r_at_res
    }

    /// Resonator linewidth `Γ₁^r(ω_r⁰)/2π` (MHz).
    pub fn resonator_linewidth(&self) -> f64 {
        self.gamma1_r_at_res / (2.0 * std::f64::consts::PI)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DidRate {
    /// MHz.
    pub rate: f64,
    /// Drive close enough to the resonator to excite it.
    pub resonator_warning: bool,
}

/// Dressed inputs of the dephasing formula (GHz).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DidInputs {
    pub anharm: f64,
    pub chi: f64,
    pub delta_qd: f64,
    pub delta_rd: f64,
}

impl DidInputs {
    pub fn from_observables(obs: &ObservableSet, omega_d: f64) -> Result<Self> {
        let need = |v: Option<f64>, what: &str| {
            v.ok_or_else(|| Error::MissingBranch(format!("{what} for the dephasing rate")))
        };
        Ok(DidInputs {
            anharm: need(obs.anharm, "Ã⁰")?,
            chi: need(obs.chi, "χ̃")?,
            delta_qd: need(obs.omega_ge0, "ω̃⁰_ge")? - omega_d,
            delta_rd: need(obs.resonator_g, "ω̃_r^g")? - omega_d,
        })
    }
}

/// `Γ_DID` from explicit inputs. A sign mismatch between the detunings
/// yields the magnitude.
pub fn did_rate_from(
    inputs: &DidInputs,
    amplitude: f64,
    dec: &DecoherenceParams,
) -> Result<DidRate> {
    dec.validate()?;
    let DidInputs {
        anharm,
        chi,
        delta_qd,
        delta_rd,
    } = *inputs;
    if delta_qd == 0.0 || delta_rd == 0.0 {
        return Err(Error::Domain(format!(
            "zero detuning: Δ̃_qd = {delta_qd}, Δ̃_rd = {delta_rd}"
        )));
    }
    let product = anharm * chi;
    if product < 0.0 {
        return Err(Error::Domain(format!(
            "Ã⁰ χ̃ < 0 (Ã⁰ = {anharm:e}, χ̃ = {chi:e})"
        )));
    }
    let rate =
        product.sqrt() / (2.0 * delta_rd) * amplitude / (2.0 * delta_qd) * dec.gamma1_r_at_drive();
    Ok(DidRate {
        rate: rate.abs(),
        resonator_warning: delta_rd.abs() * 1e3 < EXCITATION_MARGIN * dec.resonator_linewidth(),
    })
}

/// `Γ_DID` at the drive point of `obs`, using the dressed quantities there.
pub fn did_rate(
    obs: &ObservableSet,
    drive: &DriveSpec,
    dec: &DecoherenceParams,
) -> Result<DidRate> {
    drive.validate()?;
    did_rate_from(
        &DidInputs::from_observables(obs, drive.omega_d)?,
        drive.amplitude,
        dec,
    )
}

/// Full width at half maximum of the qubit line (MHz).
pub fn linewidth(dec: &DecoherenceParams, did: f64) -> Result<f64> {
    dec.validate()?;
    if !(did.is_finite() && did >= 0.0) {
        return Err(Error::config(
            "dephasing rate must be finite and non-negative",
        ));
    }
    Ok(LINEWIDTH_CALIBRATION * (dec.gamma1_q / 2.0 + dec.gamma_phi_q + did))
}
