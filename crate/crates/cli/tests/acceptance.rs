//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! (run with `--nocapture` to see every line).
//!
//! Criterion 7's L1 bar is known to be unattainable for the stated beam
//! focus: the full Muga-Leavens density differs from the paraxial Gaussian
//! at first order in sigma_p/p0 (about 0.8/ratio, so ~4% at ratio 20). The
//! test implements the criterion as stated and reports the honest number.

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::process::Command;
use tqm_core::classical::{classical_trajectory, TrajectoryPoint};
use tqm_core::grid::{
    grid_propagate, propagate_observed, AxisGrid, GridWave, ScalarPotential, TimeAxisSign,
};
use tqm_core::kernels::{coordinate_kernel_axis, single_step_propagate, suggested_step_grid};
use tqm_core::maxent;
use tqm_core::multiparticle::{
    absorption_final, absorption_rescale, absorption_residual, exchange_kinematics,
    loop_clock_frequency, loop_tau, symmetrize_two_particle, AbcCouplings, Emission,
    ExchangeGeometry, ExchangeSide, ReducedMomentum, VertexSchedule,
};
use tqm_core::packets::{free_full_solution, rest_mass_phase, AxisKind, AxisPacket, PlaneWave};
use tqm_core::quad;
use tqm_core::slits::{
    double_gate_density_sqm, double_gate_density_tqm, gate_width_sweep, sqm_gate,
    tqm_gate_delta_tau, tqm_gate_rescale, BeamGeometry, DoubleGate, GateSpec,
};
use tqm_core::toa::{toa_grid_click_density, toa_muga_leavens, toa_sqm, toa_tqm, DetectorSpec};
use tqm_core::units;
use tqm_core::wavelets::{
    admissibility_constant, forward_transform, gaussian_components, inverse_transform,
    morlet_mother, relative_l2_error, AtomGrids, WaveletAtom,
};

fn report(id: &str, detail: &str, pass: bool) {
    println!(
        "[acceptance] {id} {}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "{id} failed: {detail}");
}

#[test]
fn c01_hydrogen_bound_state() {
    let est = maxent::bound_state_estimate(0.511e6, -13.6).unwrap();
    let dt_as = units::seconds_to_as(est.delta_t);
    let ok = (est.delta_e - 3728.0).abs() < 1.0 && (dt_as - 0.1766).abs() < 0.001;
    report(
        "C01",
        &format!("dE1 = {:.1} eV (3728 +- 1), dt = {dt_as:.4} as (0.1766 +- 0.001)", est.delta_e),
        ok,
    );
}

#[test]
fn c02_bohr_radius_in_time() {
    let t_as = units::seconds_to_as(maxent::bohr_time_scale());
    report(
        "C02",
        &format!("bohr time = {t_as:.4} as (0.177 +- 0.002)"),
        (t_as - 0.177).abs() < 0.002,
    );
}

#[test]
fn c03_clock_frequency_scale() {
    let scale = maxent::clock_frequency_scale(1.0, 1.0e6);
    let time_as = units::seconds_to_as(scale.time_scale_s);
    let ok = (scale.f_ev - 1e-6).abs() < 1e-12 && time_as >= 1e5 * 0.177;
    report(
        "C03",
        &format!("f = {:.3e} eV (1e-6), time scale = {time_as:.3e} as (>= 1.77e4)", scale.f_ev),
        ok,
    );
}

#[test]
fn c04_oracle_equivalence_free_gaussian() {
    let t_packet = AxisPacket::time(0.0, 1.0, 1.0, 1.0).unwrap();
    let x_packet = AxisPacket::space(0.0, 0.5, 1.0, 1.0).unwrap();
    let axes = vec![
        AxisGrid::new(-35.0, 41.5, 1024, AxisKind::Time).unwrap(),
        AxisGrid::new(-31.0, 35.0, 1024, AxisKind::Space).unwrap(),
    ];
    let wave = GridWave::sample_packets(axes, &[t_packet, x_packet]).unwrap();
    let packets = [t_packet, x_packet];
    let mut worst: f64 = 0.0;
    propagate_observed(
        &wave,
        1.0,
        0.0,
        &ScalarPotential::free(),
        5.0,
        5,
        TimeAxisSign::Physical,
        |_, tau, w| {
            let dims = w.dims();
            let mut peak: f64 = 0.0;
            let mut dev: f64 = 0.0;
            for (flat, v) in w.values().iter().enumerate() {
                let point = [
                    w.axes()[0].point(flat / dims[1]),
                    w.axes()[1].point(flat % dims[1]),
                ];
                let reference = free_full_solution(&packets, tau, &point);
                peak = peak.max(reference.norm());
                dev = dev.max((*v - reference).norm());
            }
            worst = worst.max(dev / peak);
        },
    )
    .unwrap();
    report(
        "C04",
        &format!("max pointwise deviation over tau in [0,5] on 1024^2 = {worst:.2e} (<= 1e-6)"),
        worst <= 1e-6,
    );
}

#[test]
fn c05_unitarity_and_negative_control() {
    let t_packet = AxisPacket::time(0.0, 1.0, 1.0, 1.0).unwrap();
    let x_packet = AxisPacket::space(0.0, 0.3, 1.0, 1.0).unwrap();
    let axes = || {
        vec![
            AxisGrid::new(-9.0, 9.5, 160, AxisKind::Time).unwrap(),
            AxisGrid::new(-9.0, 9.5, 160, AxisKind::Space).unwrap(),
        ]
    };
    let wave = GridWave::sample_packets(axes(), &[t_packet, x_packet]).unwrap();

    let free_drift = tqm_core::grid::verify_unitarity(
        &wave,
        1.0,
        0.0,
        &ScalarPotential::free(),
        0.5,
        1000,
        TimeAxisSign::Physical,
    )
    .unwrap();

    let bump = ScalarPotential::gaussian_bump(0.5, 1.0, vec![0.0]);
    let potential_drift = tqm_core::grid::verify_unitarity(
        &wave,
        1.0,
        0.2,
        &bump,
        0.5,
        1000,
        TimeAxisSign::Physical,
    )
    .unwrap();

    // Negative control: a flipped time-axis kinetic sign leaves every split
    // factor unit-modulus (norm drift stays at rounding), so the regression
    // guard is the pointwise departure from the closed form, which a sign
    // error makes macroscopic immediately.
    let mut flipped_norm_drift: f64 = 0.0;
    let flipped = propagate_observed(
        &wave,
        1.0,
        0.0,
        &ScalarPotential::free(),
        0.5,
        100,
        TimeAxisSign::Flipped,
        |_, _, w| flipped_norm_drift = flipped_norm_drift.max((w.norm() - 1.0).abs()),
    )
    .unwrap();
    let packets = [t_packet, x_packet];
    let dims = flipped.dims();
    let mut peak: f64 = 0.0;
    let mut flipped_dev: f64 = 0.0;
    for (flat, v) in flipped.values().iter().enumerate() {
        let point = [
            flipped.axes()[0].point(flat / dims[1]),
            flipped.axes()[1].point(flat % dims[1]),
        ];
        let reference = free_full_solution(&packets, 0.5, &point);
        peak = peak.max(reference.norm());
        flipped_dev = flipped_dev.max((*v - reference).norm());
    }
    flipped_dev /= peak;

    let ok = free_drift < 1e-10 && potential_drift < 1e-8 && flipped_dev > 1e-3;
    report(
        "C05",
        &format!(
            "free drift = {free_drift:.2e} (< 1e-10), potential drift = {potential_drift:.2e} \
             (< 1e-8), flipped-sign deviation = {flipped_dev:.2e} (> 1e-3; its norm drift stays \
             {flipped_norm_drift:.2e})"
        ),
        ok,
    );
}

#[test]
fn c06_momentum_density_invariance() {
    let packet = AxisPacket::space(0.2, 0.9, 1.1, 1.3).unwrap();
    let ks = quad::linspace(-15.0, 17.0, 4096);
    let mut max_dev: f64 = 0.0;
    for &k in &ks {
        let d0 = packet.evaluate_momentum(0.0, k).norm_sqr();
        let d1 = packet.evaluate_momentum(37.0, k).norm_sqr();
        max_dev = max_dev.max((d0 - d1).abs());
    }
    report(
        "C06",
        &format!("max |rho_tau - rho_0| over 4096 modes = {max_dev:.2e} (< 1e-12)"),
        max_dev < 1e-12,
    );
}

#[test]
fn c07_muga_leavens_vs_closed_form() {
    // As stated: p0/sigma_p = 20, v = 0.1, detector in the far field.
    let (mass, p0) = (1.0, 0.1);
    let sigma_p = p0 / 20.0;
    let packet = AxisPacket::space(0.0, p0, 1.0 / sigma_p, mass).unwrap();
    let tau_bar = 12.0 * mass * (1.0 / sigma_p) * (1.0 / sigma_p);
    let det = DetectorSpec::for_packet(&packet, tau_bar * p0 / mass).unwrap();
    let closed = toa_sqm(&packet, &det);
    let p_grid = quad::linspace(p0 - 8.0 * sigma_p, p0 + 8.0 * sigma_p, 8001);
    let phi: Vec<Complex64> = p_grid
        .iter()
        .map(|&p| packet.evaluate_momentum(0.0, p))
        .collect();
    let (oracle, _) =
        toa_muga_leavens(&p_grid, &phi, &det, closed.density.tau_samples()).unwrap();
    let l1 = oracle.l1_distance(&closed.density);
    let mean_err = (oracle.mean() - det.mean_arrival()).abs() / det.mean_arrival();
    let ok = l1 < 0.01 && mean_err < 0.005;
    report(
        "C07",
        &format!(
            "L1 = {l1:.4} (< 0.01: the full sqrt(p/m) density differs from the paraxial \
             Gaussian at first order in sigma_p/p0, so this bar is not reachable at ratio 20), \
             mean error = {mean_err:.5} (< 0.005)"
        ),
        ok,
    );
}

#[test]
fn c08_variance_additivity() {
    // Exact in closed form.
    let mass = 10.0;
    let v = 0.6;
    let sigma_t = 3.2;
    let sigma_x = sigma_t / v;
    let tau_bar = 16.0 * mass * sigma_x * sigma_x;
    let time_packet = AxisPacket::time(0.0, mass, sigma_t, mass).unwrap();
    let space_packet = AxisPacket::space(0.0, mass * v, sigma_x, mass).unwrap();
    let det = DetectorSpec::new(v * tau_bar, mass, v).unwrap();
    let closed = toa_tqm(&time_packet, &space_packet, &det);
    let closed_identity = (closed.sigma_total.powi(2)
        - (closed.sigma_tilde.powi(2) + closed.sigma_bar.powi(2)))
    .abs();

    let window = (
        tau_bar - 3.5 * closed.sigma_total,
        tau_bar + 3.5 * closed.sigma_total,
    );
    let axes = (
        AxisGrid::new(-30.0, 6300.0, 28672, AxisKind::Time).unwrap(),
        AxisGrid::new(-35.0, 3790.0, 10240, AxisKind::Space).unwrap(),
    );
    let density =
        toa_grid_click_density(&time_packet, &space_packet, &det, axes, window, 352).unwrap();
    let measured_var = density.std_dev().powi(2);
    let predicted_var = 0.5 * (closed.sigma_tilde.powi(2) + closed.sigma_bar.powi(2));
    let rel = (measured_var - predicted_var).abs() / predicted_var;
    let ok = closed_identity < 1e-9 && rel < 0.01;
    report(
        "C08",
        &format!(
            "closed-form identity residual = {closed_identity:.2e}, grid experiment \
             deviation = {rel:.4} (< 0.01)"
        ),
        ok,
    );
}

#[test]
fn c09_single_slit_limits() {
    // SQM limits at W = 100x and 0.01x the beam width in time.
    let sigma_p = 1.0;
    let beam_width = |beam: &BeamGeometry| beam.gate.center_a * sigma_p / beam.p0;
    let wide_beam = BeamGeometry::from_times(100.0, 1000.0, 100.0, 100.0, 200.0).unwrap();
    let sigma_g = beam_width(&wide_beam);
    assert!((sigma_g - 1.0).abs() < 1e-12);
    let wide = sqm_gate(&wide_beam, sigma_p);
    let wide_err =
        (wide.sigma_g_prime / wide_beam.detector_t / (sigma_p / wide_beam.p0) - 1.0).abs();
    let narrow_beam = BeamGeometry::from_times(100.0, 1000.0, 100.0, 0.01, 200.0).unwrap();
    let narrow = sqm_gate(&narrow_beam, sigma_p);
    let narrow_expected = narrow_beam.gate.width_w / narrow_beam.gate.center_a;
    let narrow_err =
        (narrow.sigma_g_prime / narrow_beam.detector_t / narrow_expected - 1.0).abs();

    // TQM rescaling limits.
    let (sigma_t, a, m) = (1.0, 10.0, 1.0);
    let wide_r = tqm_gate_rescale(sigma_t, a, 100.0 * sigma_t, m);
    let wide_sigma_err = (wide_r.sigma_star_sq.sqrt() - sigma_t).abs() / sigma_t;
    let wide_tau_err = (wide_r.tau_star - a).abs() / a;
    let narrow_w = 0.01 * sigma_t;
    let narrow_r = tqm_gate_rescale(sigma_t, a, narrow_w, m);
    let narrow_sigma_err = (narrow_r.sigma_star_sq.sqrt() - narrow_w).abs() / narrow_w;
    let narrow_tau_frac = narrow_r.tau_star / a;

    // Defining-identity residual across a 50-point sweep.
    let mut max_residual: f64 = 0.0;
    for k in 0..50 {
        let w = 1e-3 * 10.0_f64.powf(5.0 * k as f64 / 49.0);
        let r = tqm_gate_rescale(sigma_t, a, w, m);
        max_residual = max_residual.max(r.gate_residual(sigma_t, a, w, m));
    }

    let ok = wide_err < 0.01
        && narrow_err < 0.01
        && wide_sigma_err < 0.01
        && wide_tau_err < 0.01
        && narrow_sigma_err < 0.01
        && narrow_tau_frac < 0.01
        && max_residual < 1e-12;
    report(
        "C09",
        &format!(
            "SQM wide/narrow errors = {wide_err:.2e}/{narrow_err:.2e} (< 0.01), TQM limits \
             errors = {wide_sigma_err:.2e}/{wide_tau_err:.2e}/{narrow_sigma_err:.2e}/\
             {narrow_tau_frac:.2e} (< 0.01), sweep residual = {max_residual:.2e} (< 1e-12)"
        ),
        ok,
    );
}

#[test]
fn c10_falsifiability_signature() {
    let widths: Vec<f64> = (0..50)
        .map(|k| 1e-3 * 10.0_f64.powf(5.0 * k as f64 / 49.0))
        .collect();
    let rows = gate_width_sweep(100.0, 1000.0, 1.0, 100.0, 200.0, &widths).unwrap();
    let sqm_monotone = rows
        .windows(2)
        .all(|p| p[1].delta_tau_sqm >= p[0].delta_tau_sqm - 1e-15);
    let tqm_monotone = rows
        .windows(2)
        .all(|p| p[1].delta_tau_tqm <= p[0].delta_tau_tqm + 1e-15);

    // Log-log slope in the narrow decade W/sigma_t in [1e-3, 1e-2].
    let narrow: Vec<&tqm_core::slits::SweepRow> =
        rows.iter().filter(|r| r.w <= 1e-2).collect();
    let xs: Vec<f64> = narrow.iter().map(|r| r.w.ln()).collect();
    let ys: Vec<f64> = narrow.iter().map(|r| r.delta_tau_tqm.ln()).collect();
    let n = xs.len() as f64;
    let (sx, sy): (f64, f64) = (xs.iter().sum(), ys.iter().sum());
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);

    // Contrast at W = sigma_t / 100 for the default beam (v = 0.1).
    let w_contrast = 0.01;
    let beam = BeamGeometry::from_times(100.0, 1000.0, 100.0, w_contrast, 200.0).unwrap();
    let sqm = sqm_gate(&beam, 1.0).delta_tau;
    let tqm = tqm_gate_delta_tau(w_contrast, 0.1, 1.0, 1000.0, 200.0);
    let ratio = tqm / sqm;

    let ok = sqm_monotone && tqm_monotone && (slope + 1.0).abs() < 0.05 && ratio > 10.0;
    report(
        "C10",
        &format!(
            "SQM nondecreasing = {sqm_monotone}, TQM nonincreasing = {tqm_monotone}, \
             narrow-decade slope = {slope:.4} (-1 +- 0.05), contrast ratio = {ratio:.1} (> 10)"
        ),
        ok,
    );
}

#[test]
fn c11_double_gate_fringes() {
    let time_packet = AxisPacket::time(0.0, 10.0, 1.0, 10.0).unwrap();
    let delta_t = 25.0;
    let gates = DoubleGate {
        gate1: GateSpec::new(1.0, 40.0, 1.0).unwrap(),
        gate2: GateSpec::new(1.0, 40.0 + delta_t, 1.0).unwrap(),
        amp1: 1.0,
        amp2: 1.0,
    };
    let e_grid = quad::linspace(6.0, 14.0, 16001);
    let tqm = double_gate_density_tqm(&time_packet, &gates, &e_grid).unwrap();
    let expected_tqm = 2.0 * std::f64::consts::PI / delta_t;
    let tqm_spacing = tqm.fringe_spacing.unwrap_or(f64::NAN);
    let tqm_err = (tqm_spacing - expected_tqm).abs() / expected_tqm;

    let delta_t_sqm: f64 = 40.0;
    let beam = BeamGeometry::from_times(100.0, 1000.0, 40.0, 3.2, 200.0).unwrap();
    let gates_sqm = DoubleGate {
        gate1: GateSpec::new(4.0, 40.0, 3.2).unwrap(),
        gate2: GateSpec::new(4.0, 40.0 + delta_t_sqm, 3.2).unwrap(),
        amp1: 1.0,
        amp2: 1.0,
    };
    let w_grid = quad::linspace(2.0, 8.0, 16001);
    let sqm = double_gate_density_sqm(&beam, 8.0, &gates_sqm, &w_grid).unwrap();
    let expected_sqm = 2.0 * std::f64::consts::PI / delta_t_sqm;
    let sqm_spacing = sqm.fringe_spacing.unwrap_or(f64::NAN);
    let sqm_err = (sqm_spacing - expected_sqm).abs() / expected_sqm;

    let ok = tqm_err < 0.02 && sqm_err < 0.02;
    report(
        "C11",
        &format!(
            "TQM spacing error = {tqm_err:.4}, SQM spacing error = {sqm_err:.4} (< 0.02, \
             both at 2 pi / dT)"
        ),
        ok,
    );
}

#[test]
fn c12_wavelet_round_trip() {
    let mother_mean = quad::integrate_c(-12.0, 12.0, 4001, morlet_mother).norm();

    let mut split_residual: f64 = 0.0;
    for &(s, l) in &[(1.0, 0.0), (0.5, 2.0), (-2.0, -1.0), (3.7, 1.1)] {
        let atom = WaveletAtom::new(s, l).unwrap();
        let [carrier, correction] = gaussian_components(&atom);
        for k in 0..50 {
            let t = l - 5.0 * s.abs() + 0.2 * s.abs() * k as f64;
            let sum = carrier.evaluate(t) + correction.evaluate(t);
            split_residual = split_residual.max((sum - atom.evaluate(t)).norm());
        }
    }

    // Ten-function corpus: Gaussians, chirped Gaussians, two-bump
    // superpositions.
    type TestFn = Box<dyn Fn(f64) -> Complex64>;
    let corpus: Vec<(&str, TestFn)> = vec![
        ("gauss", Box::new(|t: f64| Complex64::new((-0.5 * t * t).exp(), 0.0))),
        ("gauss-wide", Box::new(|t: f64| Complex64::new((-t * t / 8.0).exp(), 0.0))),
        ("gauss-narrow", Box::new(|t: f64| Complex64::new((-t * t / 0.72).exp(), 0.0))),
        ("gauss-offset", Box::new(|t: f64| {
            Complex64::new((-(t - 2.0) * (t - 2.0) / 2.0).exp(), 0.0)
        })),
        ("chirp", Box::new(|t: f64| {
            Complex64::new(0.0, -t).exp() * (-(t - 3.0) * (t - 3.0) / 8.0).exp()
        })),
        ("chirp-up", Box::new(|t: f64| {
            Complex64::new(0.0, 1.2 * t).exp() * (-(t + 1.0) * (t + 1.0) / 3.0).exp()
        })),
        ("chirp-slow", Box::new(|t: f64| {
            Complex64::new(0.0, -0.5 * t).exp() * (-t * t / 5.0).exp()
        })),
        ("two-bump", Box::new(|t: f64| {
            Complex64::new(0.0, 1.0 * t).exp() * (-(t + 2.0) * (t + 2.0) / 2.0).exp()
                + 0.6 * Complex64::new(0.0, -0.4 * t).exp()
                    * (-(t - 2.5) * (t - 2.5) / 4.5).exp()
        })),
        ("two-bump-close", Box::new(|t: f64| {
            (-(t + 1.0) * (t + 1.0) / 1.5).exp() * Complex64::new(1.0, 0.0)
                - 0.8 * (-(t - 1.0) * (t - 1.0) / 1.5).exp() * Complex64::new(0.0, 1.0)
        })),
        ("bump-chirp-mix", Box::new(|t: f64| {
            Complex64::new(0.0, 0.8 * t).exp() * (-(t - 1.0) * (t - 1.0) / 2.5).exp()
                + 0.4 * Complex64::new((-(t + 3.0) * (t + 3.0) / 1.8).exp(), 0.0)
        })),
    ];
    let c = admissibility_constant(40.0, 8000).unwrap();
    let support = (-9.0, 9.0);
    let ts = quad::linspace(support.0 - 2.0, support.1 + 2.0, 16385);
    let eval_ts = quad::linspace(support.0, support.1, 721);
    let grids = AtomGrids::standard(support);
    let mut worst: f64 = 0.0;
    let mut worst_name = "";
    for (name, f) in &corpus {
        let samples: Vec<Complex64> = ts.iter().map(|&t| f(t)).collect();
        let coefficients = forward_transform(&ts, &samples, &grids).unwrap();
        let reconstructed = inverse_transform(&coefficients, c, &eval_ts);
        let reference: Vec<Complex64> = eval_ts.iter().map(|&t| f(t)).collect();
        let error = relative_l2_error(&reference, &reconstructed);
        if error > worst {
            worst = error;
            worst_name = name;
        }
    }

    let ok = worst < 1e-3 && mother_mean < 1e-10 && split_residual < 1e-14;
    report(
        "C12",
        &format!(
            "worst round trip = {worst:.2e} on {worst_name} over {} functions (< 1e-3), \
             mother mean = {mother_mean:.2e} (< 1e-10), split identity = {split_residual:.2e} \
             (< 1e-14)",
            corpus.len()
        ),
        ok,
    );
}

#[test]
fn c13_loop_correction() {
    let (mass, mu, tau) = (1.0, 0.2, 0.9);
    let big_m = mass + mu;
    let axes = [
        AxisPacket::time(0.0, mass, 1.0, mass).unwrap(),
        AxisPacket::space(0.1, 0.3, 0.9, mass).unwrap(),
        AxisPacket::space(-0.2, 0.0, 1.1, mass).unwrap(),
        AxisPacket::space(0.0, 0.2, 1.0, mass).unwrap(),
    ];
    let axis_integral = |axis: &AxisPacket, u1: f64, half: f64, nodes: usize| -> Complex64 {
        quad::integrate_c(axis.center - half, axis.center + half, nodes, |u0| {
            coordinate_kernel_axis(axis.axis_kind, u1 - u0, tau, mass)
                * coordinate_kernel_axis(axis.axis_kind, u1 - u0, tau, mu)
                * axis.evaluate_position(0.0, u0)
        })
    };
    let point = [0.2, 0.3, -0.1, 0.4];
    let mut quadrature = Complex64::new(
        4.0 * std::f64::consts::PI.powi(2),
        0.0,
    ) * rest_mass_phase(mass, tau)
        * rest_mass_phase(mu, tau);
    for (axis, &u1) in axes.iter().zip(&point) {
        quadrature *= axis_integral(axis, u1, 12.0, 24001);
    }
    let evolved_m: Complex64 = axes
        .iter()
        .zip(&point)
        .map(|(a, &u)| {
            AxisPacket::new(a.axis_kind, a.center, a.carrier, a.sigma, big_m)
                .unwrap()
                .evaluate_position(tau, u)
        })
        .product::<Complex64>()
        * rest_mass_phase(big_m, tau);
    let scalar = quadrature / evolved_m;
    let expected = Complex64::new(0.0, -mass * mass * mu * mu / (big_m * big_m * tau * tau));
    let closed_err = (scalar - expected).norm() / expected.norm();

    // Absolute convergence: doubling the range.
    let narrow = axis_integral(&axes[0], point[0], 12.0, 24001);
    let wide = axis_integral(&axes[0], point[0], 24.0, 48001);
    let range_change = (narrow - wide).norm() / wide.norm();

    // Regularized FT slope vs |omega - F_p|.
    let p = PlaneWave::new([1.05, 0.2, 0.0, 0.0]).unwrap();
    let f_p = loop_clock_frequency(&p, mass, mu);
    let (eps, t0): (f64, f64) = (0.05, 400.0);
    let transform_mag = |omega: f64| -> f64 {
        let delta: f64 = omega - f_p;
        let nodes = 400_000;
        let (log_lo, log_hi) = (eps.ln(), t0.ln());
        let dl = (log_hi - log_lo) / nodes as f64;
        let mut sum = 0.0;
        for i in 0..nodes {
            let t = (log_lo + (i as f64 + 0.5) * dl).exp();
            sum += (delta * t).cos() / t * dl; // 1/t^2 * t (log measure)
        }
        (mass * mass * mu * mu / (big_m * big_m)) * 2.0 * sum
            / (2.0 * std::f64::consts::PI).sqrt()
    };
    let (w1, w2) = (f_p + 0.6, f_p + 1.4);
    let measured_slope = ((transform_mag(w2) - transform_mag(w1)) / (w2 - w1)).abs();
    let closed_slope =
        mass * mass * mu * mu / (big_m * big_m) * (std::f64::consts::PI / 2.0).sqrt();
    let slope_err = (measured_slope - closed_slope).abs() / closed_slope;

    // Closed form at (p, tau) rebuilt from the quadrature scalar.
    let closed = loop_tau(&p, tau, mass, mu).unwrap();
    let rebuilt = expected * Complex64::new(0.0, -f_p * tau).exp();
    let value_err = (closed - rebuilt).norm() / closed.norm();

    let ok = closed_err < 1e-6 && range_change < 1e-8 && slope_err < 0.05 && value_err < 1e-12;
    report(
        "C13",
        &format!(
            "quadrature vs closed = {closed_err:.2e} (< 1e-6), range doubling = \
             {range_change:.2e} (< 1e-8), FT slope error = {slope_err:.4} (< 0.05)"
        ),
        ok,
    );
}

#[test]
fn c14_emission() {
    let couplings = AbcCouplings::new(0.25, 0.1, 1.0, 0.05, 10.0).unwrap();
    let sigma_t = 1.3;
    let a_time = AxisPacket::time(0.0, 1.0, sigma_t, 1.0).unwrap();
    let a_space = AxisPacket::space(0.0, 0.2, 1.0, 1.0).unwrap();
    let emission = Emission::new(
        couplings,
        a_time,
        a_space,
        VertexSchedule::single(0.5, 2.0).unwrap(),
    )
    .unwrap();

    let p = ReducedMomentum { e: 1.1, px: 0.3 };
    let k = ReducedMomentum { e: 0.2, px: -0.1 };
    let base = emission.amplitude(p, k).norm();
    let mut invariance: f64 = 0.0;
    for &(de, dpx) in &[(0.05, -0.2), (-0.3, 0.12), (0.5, 0.5)] {
        let shifted = emission
            .amplitude(
                ReducedMomentum {
                    e: p.e + de,
                    px: p.px + dpx,
                },
                ReducedMomentum {
                    e: k.e - de,
                    px: k.px - dpx,
                },
            )
            .norm();
        invariance = invariance.max((shifted - base).abs() / base);
    }

    let sigma_e = a_time.momentum_sigma();
    let s_grid = quad::linspace(1.0 - 8.0 * sigma_e, 1.0 + 8.0 * sigma_e, 4001);
    let density: Vec<f64> = s_grid
        .iter()
        .map(|&s| {
            emission
                .amplitude(
                    ReducedMomentum { e: 0.6 * s, px: 0.25 },
                    ReducedMomentum { e: 0.4 * s, px: -0.05 },
                )
                .norm_sqr()
        })
        .collect();
    let (mean, std) = quad::density_moments(&s_grid, &density);
    let mean_err = (mean - 1.0).abs();
    let disp_err = (std * 2.0_f64.sqrt() - sigma_e).abs();

    let ok = invariance < 1e-12 && mean_err < 1e-9 && disp_err < 1e-9;
    report(
        "C14",
        &format!(
            "modulus shift-invariance = {invariance:.2e} (< 1e-12), marginal mean error = \
             {mean_err:.2e}, dispersion error = {disp_err:.2e} (< 1e-9)"
        ),
        ok,
    );
}

#[test]
fn c15_absorption() {
    // Narrow heavy limit: s/sigma = 0.01, mu/m = 1000.
    let (sigma_sq, s_sq) = (1.0, 1e-4);
    let (mass, mu) = (1.0, 1000.0);
    let r = absorption_rescale(sigma_sq, s_sq, 0.7, mass, mu, AxisKind::Time);
    let sigma_limit_err = (r.sigma_star_sq - s_sq).abs() / s_sq;
    let tau_limit_frac = r.tau_star.abs() / 0.7;
    let identity = absorption_residual(&r, sigma_sq, s_sq, 0.7, mass, mu, AxisKind::Time);

    // delta E from a narrow heavy gate in time: sigma_E* = 1/s_t.
    let couplings = AbcCouplings::new(0.2, 0.1, 1.0, 1000.0, 10.0).unwrap();
    let s_t = 0.01;
    let a = tqm_core::packets::Packet4::new([
        AxisPacket::time(0.0, 1.0, 1.0, 1.0).unwrap(),
        AxisPacket::space(-2.0, 0.1, 1.0, 1.0).unwrap(),
        AxisPacket::space(0.0, 0.0, 1.0, 1.0).unwrap(),
        AxisPacket::space(0.0, 0.0, 1.0, 1.0).unwrap(),
    ])
    .unwrap();
    let b = tqm_core::packets::Packet4::new([
        AxisPacket::time(0.0, 1000.0, s_t, 1000.0).unwrap(),
        AxisPacket::space(2.0, -100.0, 0.7, 1000.0).unwrap(),
        AxisPacket::space(0.0, 0.0, 1.0, 1000.0).unwrap(),
        AxisPacket::space(0.0, 0.0, 1.0, 1000.0).unwrap(),
    ])
    .unwrap();
    let result = absorption_final(&a, &b, &couplings, None).unwrap();
    let sigma_e_star = 1.0 / result.rescales[0].sigma_star_sq.sqrt();
    let delta_e_err = (sigma_e_star * s_t - 1.0).abs();
    let delta_e_consistent =
        (result.delta_e - sigma_e_star / 2.0_f64.sqrt()).abs() / result.delta_e;

    // Grid-oracle moments on the time axis.
    let couplings2 = AbcCouplings::new(0.2, 0.1, 1.0, 0.5, 10.0).unwrap();
    let a2 = tqm_core::packets::Packet4::new([
        AxisPacket::time(0.0, 1.0, 1.0, 1.0).unwrap(),
        AxisPacket::space(-2.0, 0.1, 1.0, 1.0).unwrap(),
        AxisPacket::space(0.0, 0.0, 1.0, 1.0).unwrap(),
        AxisPacket::space(0.0, 0.0, 1.0, 1.0).unwrap(),
    ])
    .unwrap();
    let b2 = tqm_core::packets::Packet4::new([
        AxisPacket::time(0.0, 0.5, 0.8, 0.5).unwrap(),
        AxisPacket::space(2.0, -0.05, 0.7, 0.5).unwrap(),
        AxisPacket::space(0.0, 0.0, 1.0, 0.5).unwrap(),
        AxisPacket::space(0.0, 0.0, 1.0, 0.5).unwrap(),
    ])
    .unwrap();
    let result2 = absorption_final(&a2, &b2, &couplings2, None).unwrap();
    let tau_x = result2.tau_x;
    let a_time = a2.axes[0];
    let b_time = b2.axes[0];
    let axis = AxisGrid::new(tau_x - 80.0, tau_x + 80.0, 1024, AxisKind::Time).unwrap();
    let product = GridWave::sample(vec![axis], |coords| {
        a_time.evaluate_position(tau_x, coords[0]) * b_time.evaluate_position(tau_x, coords[0])
    })
    .unwrap();
    let tau_after = 3.0;
    let evolved =
        grid_propagate(&product, 1.0, 0.0, &ScalarPotential::free(), tau_after, 4).unwrap();
    let (ts, rho) = evolved.axis_marginal(0);
    let (grid_mean, grid_std) = quad::density_moments(&ts, &rho);
    let starred = result2.outgoing.axes[0];
    let elapsed = result2.rescales[0].tau_star + tau_after;
    let spread = elapsed / (starred.sigma * starred.sigma);
    let predicted_std = (0.5 * starred.sigma * starred.sigma * (1.0 + spread * spread)).sqrt();
    let predicted_mean = starred.center + starred.carrier * tau_after;
    let width_err = (grid_std - predicted_std).abs() / predicted_std;
    let mean_off = (grid_mean - predicted_mean).abs() / predicted_std;

    let ok = sigma_limit_err < 0.01
        && tau_limit_frac < 0.01
        && identity < 1e-12
        && delta_e_err < 0.01
        && delta_e_consistent < 1e-12
        && width_err < 0.05
        && mean_off < 0.05;
    report(
        "C15",
        &format!(
            "narrow-heavy sigma*^2 error = {sigma_limit_err:.2e}, tau* fraction = \
             {tau_limit_frac:.2e} (< 0.01), identity = {identity:.2e} (< 1e-12), \
             sigma_E* s_t error = {delta_e_err:.2e} (< 0.01), grid width error = \
             {width_err:.4}, mean offset = {mean_off:.4} (< 0.05)"
        ),
        ok,
    );
}

#[test]
fn c16_exchange() {
    let geom = ExchangeGeometry {
        x_a: -2.0,
        p_a: 0.5,
        mass_a: 1.0,
        x_c: 2.0,
        q_c: -0.25,
        mass_c: 10.0,
        mass_b: 0.0625,
        side: ExchangeSide::Left,
        schedule: VertexSchedule::pair(2.0, 3.0, 5.0).unwrap(),
    };
    let result = exchange_kinematics(&geom).unwrap();
    let conservation =
        ((result.p_prime_mean + result.q_prime_mean) - (geom.p_a + geom.q_c)).abs();

    let (tau, x) = tqm_core::multiparticle::classical_crossing(-2.0, 0.5, 2.0, 0.5).unwrap();
    let symmetric_ok = x == 0.0 && (tau - 4.0).abs() < 1e-15;

    let ok = conservation == 0.0 && symmetric_ok;
    report(
        "C16",
        &format!(
            "momentum conservation residual = {conservation:.1e} (exact), symmetric crossing \
             x_X = {x:.1e}, tau_X = {tau}"
        ),
        ok,
    );
}

#[test]
fn c17_classical_equations_of_motion() {
    let at_rest = TrajectoryPoint {
        tau: 0.0,
        t: 0.0,
        x: [0.0; 3],
        tdot: 1.0,
        xdot: [0.0; 3],
    };
    // Straight line.
    let drifting = TrajectoryPoint {
        xdot: [0.3, -0.1, 0.2],
        ..at_rest
    };
    let free =
        classical_trajectory(&drifting, [0.0; 3], [0.0; 3], 1.0, 1.0, (0.0, 4.0), 256).unwrap();
    let end = free.last();
    let line_err = (0..3)
        .map(|j| (end.x[j] - drifting.xdot[j] * 4.0).abs())
        .fold((end.t - 4.0).abs(), f64::max);

    // Hyperbolic motion.
    let (q, m, e) = (1.0, 1.0, 0.5);
    let tau_max = 2.0 * m / (q * e);
    let hyper = classical_trajectory(
        &at_rest,
        [e, 0.0, 0.0],
        [0.0; 3],
        q,
        m,
        (0.0, tau_max),
        8192,
    )
    .unwrap();
    let phi = q * e * tau_max / m;
    let end = hyper.last();
    let hyper_err = ((end.tdot - phi.cosh()).abs() / phi.cosh())
        .max((end.xdot[0] - phi.sinh()).abs() / phi.sinh());

    // Minkowski speed under a pure magnetic field.
    let moving = TrajectoryPoint {
        tdot: 1.2,
        xdot: [0.4, 0.0, 0.1],
        ..at_rest
    };
    let magnetic = classical_trajectory(
        &moving,
        [0.0; 3],
        [0.0, 0.0, 0.8],
        1.0,
        1.0,
        (0.0, 20.0),
        8192,
    )
    .unwrap();
    let initial = moving.minkowski_speed_sq();
    let speed_drift = magnetic
        .samples
        .iter()
        .map(|p| (p.minkowski_speed_sq() - initial).abs())
        .fold(0.0, f64::max);

    let ok = line_err < 1e-12 && hyper_err < 1e-6 && speed_drift < 1e-8;
    report(
        "C17",
        &format!(
            "straight line = {line_err:.2e} (< 1e-12), hyperbolic = {hyper_err:.2e} (< 1e-6), \
             speed drift = {speed_drift:.2e} (< 1e-8)"
        ),
        ok,
    );
}

#[test]
fn c18_single_step_normalization() {
    let packet = AxisPacket::time(0.0, 1.0, 1.0, 1.0).unwrap();
    let eps = 0.5;
    let grid = suggested_step_grid(&packet, eps, 1);
    let stepped = single_step_propagate(&packet, eps, grid).unwrap();
    let norm_err = (stepped.norm() - 1.0).abs();
    let mut peak: f64 = 0.0;
    let mut dev: f64 = 0.0;
    for (&u, &v) in stepped.coords.iter().zip(&stepped.values) {
        let reference = packet.evaluate_position(eps, u);
        peak = peak.max(reference.norm());
        dev = dev.max((v - reference).norm());
    }
    let ok = norm_err < 1e-8 && dev / peak < 1e-6;
    report(
        "C18",
        &format!(
            "one-step norm error = {norm_err:.2e} (< 1e-8), closed-form deviation = {:.2e} \
             (< 1e-6)",
            dev / peak
        ),
        ok,
    );
}

#[test]
fn c19_two_particle_symmetrization() {
    let wide_t = |t: f64| Complex64::new(0.0, -0.5 * t).exp() * (-t * t / 8.0).exp();
    let wide_x = |x: f64| Complex64::new(0.0, 0.3 * x).exp() * (-x * x / 18.0).exp();
    let narrow_t = |t: f64| Complex64::new(0.0, -1.2 * t).exp() * (-t * t / 0.5).exp();
    let narrow_x = |x: f64| Complex64::new(0.0, 0.8 * x).exp() * (-x * x / 0.72).exp();
    let mut rng = StdRng::seed_from_u64(0x7137);
    let samples: Vec<[f64; 4]> = (0..1000)
        .map(|_| {
            [
                rng.gen_range(-4.0..4.0),
                rng.gen_range(-4.0..4.0),
                rng.gen_range(-4.0..4.0),
                rng.gen_range(-4.0..4.0),
            ]
        })
        .collect();
    let residual = symmetrize_two_particle(&wide_t, &wide_x, &narrow_t, &narrow_x, &samples);
    report(
        "C19",
        &format!("identity residual at 1000 random points = {residual:.2e} (< 1e-12)"),
        residual < 1e-12,
    );
}

#[test]
fn c20_cli_determinism_and_schema() {
    let dir = tempfile::tempdir().unwrap();
    let experiments = [
        "maxent",
        "classical",
        "evolve",
        "toa",
        "slit-sweep",
        "double-gate",
        "emit",
        "absorb",
        "exchange",
        "loop",
        "wavelet-roundtrip",
    ];
    let strip = |text: &str| -> String {
        text.lines()
            .filter(|l| !l.contains("timestamp"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    let mut all_ok = true;
    for experiment in experiments {
        let run = |path: &std::path::Path| {
            let status = Command::new(env!("CARGO_BIN_EXE_tqm"))
                .arg(experiment)
                .args(["--format", "json", "--seed", "11"])
                .arg("--out")
                .arg(path)
                .status()
                .expect("binary runs");
            assert!(status.success(), "{experiment} run failed");
        };
        let a = dir.path().join(format!("{experiment}_a.json"));
        let b = dir.path().join(format!("{experiment}_b.json"));
        run(&a);
        run(&b);
        let text_a = std::fs::read_to_string(&a).unwrap();
        let text_b = std::fs::read_to_string(&b).unwrap();
        if strip(&text_a) != strip(&text_b) {
            all_ok = false;
            println!("[acceptance] C20: {experiment} output not byte-identical");
        }
        let parsed: Result<serde_json::Value, _> = serde_json::from_str(&text_a);
        match parsed {
            Ok(value) => {
                if value["meta"]["experiment"] != experiment
                    || !value["meta"]["params"].is_object()
                    || !value["results"].is_object()
                {
                    all_ok = false;
                    println!("[acceptance] C20: {experiment} schema invalid");
                }
            }
            Err(e) => {
                all_ok = false;
                println!("[acceptance] C20: {experiment} output is not JSON: {e}");
            }
        }
    }
    report(
        "C20",
        "byte-identical outputs (timestamp excluded) and valid schemas for all 11 experiments",
        all_ok,
    );
}
