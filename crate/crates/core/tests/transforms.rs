use qbt_core::boostlet::{admissibility_delta, admissibility_substituted, classify_cone, BoostletSystem, Cone, SystemConfig, DEFAULT_PROBES};
use qbt_core::field::{field_norm_sq, Grid, QField2D};
use qbt_core::io::{export_coefficients, import_coefficients};
use qbt_core::qbt::{componentwise_scalar_bt, forward_qbt, inverse_qbt, max_rel_diff, plancherel_ratio, QbtEngine};
use qbt_core::qfourier::qft_forward;
use qbt_core::quat::{cd_join, ComplexPair, Quaternion};
use qbt_core::signals::{make_gaussian_packet, random_band_limited, PacketSpec};
use qbt_core::uncertainty::{check_pitt, check_power_uncertainty, weighted_omega_energy, UncertaintyInputs, Weight};

fn wide_system() -> BoostletSystem {
    BoostletSystem::admissible(SystemConfig::with_lattice(0.2, 5.0, 40, 3.0, 40)).unwrap()
}

#[test]
fn packet_spectrum_splits_between_two_peaks() {
    // the i-side kernel meets g, the j-side kernel meets the j of (1 + j):
    // |F̂| is the Gaussian at (k0, −ω0) and again at (k0, +ω0)
    let g = Grid::centered(128, 4.0).unwrap();
    for omega in [2.0, 1.8] {
        let spec = PacketSpec { omega, ..PacketSpec::single_packet() };
        let s = qft_forward(&make_gaussian_packet(&spec, g));
        let peak = s.at(s.peak_bin().0, s.peak_bin().1).norm();
        for sign in [-1.0, 1.0] {
            let (p, q) = s.nearest_bin(2.0, sign * omega);
            let (w1, w2) = s.freq(p, q);
            let expect = (-std::f64::consts::PI * ((w1 - 2.0).powi(2) + (w2 - sign * omega).powi(2))).exp();
            assert!((s.at(p, q).norm() - expect).abs() < 1e-9);
            assert!((s.at(p, q).norm() - peak).abs() < 1e-9);
        }
        let (p, q) = s.nearest_bin(-2.0, omega);
        assert!(s.at(p, q).norm() < 1e-12);
    }
}

#[test]
fn admissibility_is_one_everywhere() {
    let sys = BoostletSystem::new(SystemConfig::default()).unwrap();
    let adm = admissibility_delta(&sys, &DEFAULT_PROBES).unwrap();
    assert!((adm.delta - 1.0).abs() < 0.02);
    assert!(adm.spread < 0.02);
    assert!(DEFAULT_PROBES.iter().any(|&(a, b)| classify_cone(a, b).cone == Cone::FarField));
    assert!((admissibility_substituted(&sys) - 1.0).abs() < 1e-6);
}

#[test]
fn atoms_vanish_off_support() {
    let g = Grid::centered(128, 4.0).unwrap();
    let sys = BoostletSystem::new(SystemConfig::default()).unwrap();
    let (c, a) = (0.9, -0.7);
    for p in 0..g.ns {
        for q in 0..g.nt {
            let (w1, w2) = (g.w1(p), g.w2(q));
            let cc = classify_cone(w1, w2);
            for cone in [Cone::NearField, Cone::FarField] {
                let v = sys.atom_value(c, a, cone, w1, w2).unwrap();
                let inside = cc.cone == cone && (0.5..=2.0).contains(&(c * cc.rho)) && (cc.eta - a).abs() < 0.25;
                if !inside {
                    assert_eq!(v, 0.0, "({w1}, {w2})");
                }
            }
        }
    }
}

#[test]
fn plancherel_under_coverage() {
    let g = Grid::centered(64, 4.0).unwrap();
    let sys = wide_system();
    let f = random_band_limited(g, 11, (0.6, 2.5), 1.5);
    let r = plancherel_ratio(&f, &sys).unwrap();
    assert!((r - 1.0).abs() < 0.03, "{r}");
    let engine = QbtEngine::new(&f, &sys).unwrap();
    assert!(engine.coverage() > 0.999);

    // energy beyond the boost range is lost
    let outside = random_band_limited(g, 12, (0.6, 2.5), 3.6);
    let narrow = BoostletSystem::admissible(SystemConfig::with_lattice(0.2, 5.0, 20, 1.0, 14)).unwrap();
    assert!(plancherel_ratio(&outside, &narrow).unwrap() < 0.9);
    assert!(plancherel_ratio(&QField2D::zeros(g), &sys).is_err());
}

#[test]
fn round_trip_through_stored_coefficients() {
    let g = Grid::centered(64, 4.0).unwrap();
    let sys = wide_system();
    let f = random_band_limited(g, 5, (0.6, 2.5), 1.5);
    let coef = forward_qbt(&f, &sys).unwrap();
    let dir = tempfile::tempdir().unwrap();
    export_coefficients(&coef, dir.path(), None).unwrap();
    let back = import_coefficients(dir.path()).unwrap();
    assert_eq!(max_rel_diff(&coef, &back), 0.0);
    let rec = inverse_qbt(&back, &sys).unwrap();
    assert!(rec.rel_error(&f) < 0.01, "{}", rec.rel_error(&f));
    let other = BoostletSystem::admissible(SystemConfig::default()).unwrap();
    assert!(inverse_qbt(&back, &other).is_err());
    let zero = forward_qbt(&QField2D::zeros(g), &sys).unwrap();
    assert_eq!(inverse_qbt(&zero, &sys).unwrap().max_abs(), 0.0);
}

#[test]
fn componentwise_transform_of_complex_signal() {
    let g = Grid::centered(32, 4.0).unwrap();
    let sys = BoostletSystem::admissible(SystemConfig::with_lattice(0.3, 3.0, 4, 1.5, 5)).unwrap();
    let f = random_band_limited(g, 2, (0.5, 3.0), 2.0).map(|q| Quaternion::new(q.a, q.b, 0.0, 0.0));
    let coef = forward_qbt(&f, &sys).unwrap();
    let bt = componentwise_scalar_bt(&f, &sys).unwrap();
    assert_eq!(bt.count(), 4 * sys.n_cells() * g.len());
    for k in 0..sys.n_cells() {
        assert!(bt.f2.near[k].iter().all(|z| z.norm() < 1e-14));
        let (near, far) = bt.joined(k);
        assert!(near.sub(&coef.c1[k]).unwrap().max_abs() <= 1e-8 * coef.c1[k].max_abs().max(1e-300));
        assert!(far.sub(&coef.c2[k]).unwrap().max_abs() <= 1e-8 * coef.c2[k].max_abs().max(1e-300));
        let v = cd_join(ComplexPair { z1: bt.f1.near[k][3], z2: bt.f2.near[k][3] });
        assert_eq!(v, near.values[3]);
    }
}

#[test]
fn dilation_moves_energy_along_the_scale_lattice() {
    // F_a(μ) = F(μ/a) gives ∫|QB F_a(c, α, τ)|²dτ = a⁴∫|QB F(c/a, α, τ)|²dτ
    let g = Grid::centered(128, 8.0).unwrap();
    let a: f64 = 1.5;
    let sys = BoostletSystem::admissible(SystemConfig::with_lattice(0.2, 0.2 * a.powi(4), 9, 2.0, 9)).unwrap();
    let base = PacketSpec { sigma: 0.8, k: 1.2, omega: 0.6, ..PacketSpec::single_packet() };
    let wide = PacketSpec { sigma: 0.8 * a, k: 1.2 / a, omega: 0.6 / a, ..base };
    let per_cell = |f: &QField2D| {
        let c = forward_qbt(f, &sys).unwrap();
        (0..c.n_cells()).map(|k| c.c1[k].norm_sq() + c.c2[k].norm_sq()).collect::<Vec<f64>>()
    };
    let e = per_cell(&make_gaussian_packet(&base, g));
    let ea = per_cell(&make_gaussian_packet(&wide, g));
    let top = e.iter().cloned().fold(0.0, f64::max);
    let n_alpha = sys.alphas.len();
    for i in 2..sys.scales.len() {
        for j in 0..n_alpha {
            let (x, y) = (ea[i * n_alpha + j], a.powi(4) * e[(i - 2) * n_alpha + j]);
            if y > 0.05 * top * a.powi(4) {
                assert!((x / y - 1.0).abs() < 0.02, "cell ({i}, {j}): {}", x / y);
            }
        }
    }
}

#[test]
fn uncertainty_edge_cases() {
    let g = Grid::centered(64, 4.0).unwrap();
    let sys = wide_system();
    let f = random_band_limited(g, 21, (0.6, 2.5), 1.5);
    // λ = 0 is Plancherel
    let r = check_pitt(&f, &sys, 0.0).unwrap();
    assert!((r.ratio - 1.0).abs() < 0.03, "{}", r.ratio);
    assert!(r.pass || r.ratio < 1.03);
    assert!(check_pitt(&f, &sys, 2.0).is_err());
    assert!(check_power_uncertainty(&f, &sys, 0.5, 1.0).is_err());

    // translation leaves the spectral side alone
    let packet = make_gaussian_packet(&PacketSpec { sigma: 0.7, ..PacketSpec::single_packet() }, g);
    let moved = packet.circular_shift(6, -4);
    let p0 = check_pitt(&packet, &sys, 0.5).unwrap();
    let p1 = check_pitt(&moved, &sys, 0.5).unwrap();
    assert!((p0.lhs - p1.lhs).abs() < 1e-9 * p0.lhs);
    assert!(p1.rhs > p0.rhs && p0.pass && p1.pass);
}

#[test]
fn wider_packets_trade_frequency_moment_for_position_moment() {
    // the atoms add a spread of their own, growing with scale; a high
    // carrier keeps the active scales small
    let g = Grid::centered(128, 8.0).unwrap();
    let sys = BoostletSystem::admissible(SystemConfig::with_lattice(0.1, 1.5, 24, 2.0, 24)).unwrap();
    let mut last: Option<(f64, f64)> = None;
    for sigma in [0.8, 1.2, 1.6, 2.0] {
        let spec = PacketSpec { sigma, amplitude: 1.0 / sigma, k: 3.0, omega: 1.5, ..PacketSpec::single_packet() };
        let f = make_gaussian_packet(&spec, g);
        let inputs = UncertaintyInputs::new(&f, &sys).unwrap();
        let tau = qbt_core::uncertainty::streamed_tau_energies(&inputs.engine, &[Weight::Power(2.0)])[1] / inputs.norm_sq;
        let omega = weighted_omega_energy(&inputs.engine.spectrum, Weight::Power(2.0)).unwrap() / field_norm_sq(&f);
        if let Some((t0, w0)) = last {
            assert!(tau > t0 && omega < w0, "σ = {sigma}: {t0} -> {tau}, {w0} -> {omega}");
        }
        last = Some((tau, omega));
    }
}
