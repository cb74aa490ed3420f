use lambshift_core::floquet::{solve, zone_distance};
use lambshift_core::model::{bare_energy, build_joint, DeviceSpec, DriveSpec, HamiltonianVariant};
use lambshift_core::oracle::{dressed_energies, static_dispersive, static_spectrum};
use lambshift_core::renorm::{amplitude_sweep, joint_labels, observables, SweepOptions};

#[test]
fn dressed_reference_frequencies() {
    let s = static_dispersive(&DeviceSpec::reference()).unwrap();
    assert!(
        (s.omega_ge0 - 5.901).abs() < 5e-3,
        "ω_ge⁰ = {}",
        s.omega_ge0
    );
    assert!(
        (s.resonator_g - 4.290).abs() < 5e-3,
        "ω_r⁰ = {}",
        s.resonator_g
    );
}

#[test]
fn decoupled_spectrum_is_sum_of_parts() {
    let spec = DeviceSpec::reference().with_coupling(0.0).unwrap();
    let got = static_spectrum(&spec).unwrap();
    let mut want: Vec<f64> = (0..spec.n_q)
        .flat_map(|n| (0..spec.n_r).map(move |m| (n, m)))
        .map(|(n, m)| bare_energy(&spec, n, m))
        .collect();
    want.sort_by(f64::total_cmp);
    for (a, b) in got.iter().zip(&want) {
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }
}

#[test]
fn truncation_stability_static() {
    let spec = DeviceSpec::reference();
    let bigger = spec.truncated(spec.n_q + 1, spec.n_r + 2).unwrap();
    let a = static_dispersive(&spec).unwrap().omega_ge0;
    let b = static_dispersive(&bigger).unwrap().omega_ge0;
    assert!((a - b).abs() < 1e-4, "Δω_ge⁰ = {} MHz", (a - b) * 1e3);
}

#[test]
fn truncation_stability_driven() {
    let spec = DeviceSpec::reference();
    let bigger = spec.truncated(spec.n_q + 1, spec.n_r + 2).unwrap();
    let opts = SweepOptions::default();
    let ge = |s: &DeviceSpec| {
        let sw =
            amplitude_sweep(s, 4.2, &[0.1, 0.2, 0.3], HamiltonianVariant::Full, &opts).unwrap();
        sw.points
            .iter()
            .map(|p| p.observables.omega_ge0.unwrap())
            .collect::<Vec<_>>()
    };
    for (a, b) in ge(&spec).iter().zip(ge(&bigger)) {
        assert!((a - b).abs() < 1e-4, "Δω̃_ge⁰ = {} MHz", (a - b) * 1e3);
    }
}

#[test]
fn floquet_baseline_matches_exact_diagonalization() {
    let spec = DeviceSpec::reference();
    let exact = static_dispersive(&spec).unwrap();
    let sw = amplitude_sweep(
        &spec,
        4.2,
        &[0.0],
        HamiltonianVariant::Full,
        &SweepOptions::default(),
    )
    .unwrap();
    let o = observables(&sw.baseline, &sw.baseline, &spec);
    assert!((o.lamb.ge.unwrap() - exact.lamb_ge).abs() < 1e-4);
    assert!((o.chi.unwrap() - exact.chi).abs() < 1e-4);
    assert!((o.pull.unwrap() - exact.pull).abs() < 1e-4);
    assert_eq!(o.zeta_ratio, Some(1.0));
}

#[test]
fn weak_drive_is_continuous_with_undriven_spectrum() {
    let spec = DeviceSpec::reference();
    let h = build_joint(
        &spec,
        &DriveSpec::new(4.2, 1e-3).unwrap(),
        HamiltonianVariant::Full,
    )
    .unwrap()
    .hamiltonian;
    let sol = solve(&h, 1e-10).unwrap();
    let labels = joint_labels(spec.n_q);
    let pairs: Vec<(usize, usize)> = labels
        .iter()
        .map(|l| (l.transmon, l.photons.unwrap_or(0)))
        .collect();
    let (energies, _, _) = dressed_energies(&spec, &pairs).unwrap();
    for (label, e) in labels.iter().zip(energies) {
        let d = sol
            .quasi_energies
            .iter()
            .map(|&q| zone_distance(q, e, 4.2))
            .fold(f64::INFINITY, f64::min);
        assert!(d < 1e-6, "{label}: {} kHz", d * 1e6);
    }
}
