//! Low-order perturbative estimates (GHz).
//!
//! Drive conventions follow the model: `Ω cos(ω_d t)(|0⟩⟨1| + h.c.)` for a
//! two-level system, so the rotating-frame coupling is `Ω/2`.

/// Dispersive cross-nonlinearity `g² A / (Δ (Δ - A))`.
pub fn dispersive_chi(g: f64, detuning: f64, anharm: f64) -> f64 {
    g * g * anharm / (detuning * (detuning - anharm))
}

/// Level shift of a far-detuned two-level system, `Ω² / (4Δ)` with
/// `Δ = ω_q - ω_d`; the excited level moves up for `Δ > 0`.
pub fn two_level_stark(amplitude: f64, detuning: f64) -> f64 {
    amplitude * amplitude / (4.0 * detuning)
}

/// [`two_level_stark`] with the counter-rotating (Bloch–Siegert) term
/// `Ω²/(4(ω_q + ω_d))` added.
pub fn two_level_stark_full(amplitude: f64, omega_q: f64, omega_d: f64) -> f64 {
    amplitude * amplitude / 4.0 * (1.0 / (omega_q - omega_d) + 1.0 / (omega_q + omega_d))
}

/// Displacement of each level on resonance, `Ω/2`.
pub fn rabi_level_shift(amplitude: f64) -> f64 {
    amplitude / 2.0
}

/// Amplitude of the first sideband admixed into a level, `(Ω/2)/Δ`.
pub fn dressed_admixture(amplitude: f64, detuning: f64) -> f64 {
    amplitude / 2.0 / detuning
}
