use lambshift_core::floquet::{track, FourierOptions, StateLabel, TrackOptions};
use lambshift_core::model::{
    build_transmon_driven, coupling_matrix, DeviceSpec, DriveSpec, HamiltonianVariant,
};
use lambshift_core::renorm::{
    amplitude_sweep, effective_branches, joint_labels, quadratic_fit, renormalized_coupling,
    stark_grid, transmon_frame, CouplingSelection, StarkOptions, SweepOptions,
};

/// `ω̃_r^g` and `ω̃⁰_ge` of the effective model at one drive point.
fn effective_point(
    spec: &DeviceSpec,
    omega_d: f64,
    amplitude: f64,
    selection: CouplingSelection,
) -> (f64, f64) {
    let family = |a: f64| build_transmon_driven(spec, &DriveSpec::new(omega_d, a)?);
    let n = 8;
    let grid: Vec<f64> = (0..=n).map(|k| amplitude * k as f64 / n as f64).collect();
    let labels: Vec<_> = (0..spec.n_q).map(StateLabel::transmon).collect();
    let opts = TrackOptions::default();
    let tr = track(family, &grid, &labels, 1, &opts).unwrap();
    let (levels, c) = transmon_frame(
        &family(amplitude).unwrap(),
        &tr,
        n,
        &FourierOptions::default(),
    )
    .unwrap();
    let g = renormalized_coupling(&c, &coupling_matrix(spec.coupling_g, spec.n_q)).unwrap();
    let eff = effective_branches(
        &levels,
        &g,
        spec.resonator_freq,
        spec.n_r,
        selection,
        &joint_labels(spec.n_q),
        &opts,
    )
    .unwrap();
    let e = |n, m| {
        eff.branch(StateLabel::joint(n, m))
            .unwrap()
            .energies
            .last()
            .copied()
            .unwrap()
    };
    (e(0, 1) - e(0, 0), e(1, 0) - e(0, 0))
}

#[test]
fn longitudinal_terms_leave_resonator_alone_in_stark_regime() {
    let spec = DeviceSpec::reference();
    for f in [3.55, 4.14, 4.24] {
        let grid =
            stark_grid(&spec, f, &StarkOptions::default(), &SweepOptions::default()).unwrap();
        let top = *grid.last().unwrap();
        let (r_dlc, ge_dlc) = effective_point(&spec, f, top, CouplingSelection::StaticPlusDlc);
        let (r_static, ge_static) = effective_point(&spec, f, top, CouplingSelection::StaticOnly);
        assert!(
            (r_dlc - r_static).abs() < 1e-4,
            "f_d = {f}: Δω̃_r^g = {} MHz",
            (r_dlc - r_static) * 1e3
        );
        // the same terms do move the transmon
        assert!((ge_dlc - ge_static).abs() > (r_dlc - r_static).abs());
    }
}

#[test]
fn lamb_shift_change_is_quadratic_at_small_drive() {
    let spec = DeviceSpec::reference();
    let f = 4.2;
    let top = (spec.omega_ge() - f).abs() / 20.0;
    let amps: Vec<f64> = (1..=8).map(|k| top * k as f64 / 8.0).collect();
    let sw = amplitude_sweep(
        &spec,
        f,
        &amps,
        HamiltonianVariant::Full,
        &SweepOptions::default(),
    )
    .unwrap();
    let l0 = lambshift_core::renorm::observables(&sw.baseline, &sw.baseline, &spec)
        .lamb
        .ge
        .unwrap();
    let dl: Vec<f64> = sw
        .points
        .iter()
        .map(|p| p.observables.lamb.ge.unwrap() - l0)
        .collect();
    let (c, residual) = quadratic_fit(&amps, &dl);
    assert!(c < 0.0);
    assert!(residual < 0.05, "residual {residual}");
}

#[test]
fn stark_shift_is_quadratic_below_a_twentieth_of_detuning() {
    let spec = DeviceSpec::reference();
    let f = 4.2;
    let top = (spec.omega_ge() - f).abs() / 20.0;
    let amps: Vec<f64> = (1..=8).map(|k| top * k as f64 / 8.0).collect();
    let sw = amplitude_sweep(
        &spec,
        f,
        &amps,
        HamiltonianVariant::Full,
        &SweepOptions::default(),
    )
    .unwrap();
    let w0 = sw.baseline.vacuum_transition(0, 1).unwrap();
    let shifts: Vec<f64> = sw
        .points
        .iter()
        .map(|p| p.levels.vacuum_transition(0, 1).unwrap() - w0)
        .collect();
    let (_, residual) = quadratic_fit(&amps, &shifts);
    assert!(residual < 0.01, "residual {residual}");
}
