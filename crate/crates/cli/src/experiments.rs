//! The named experiments: resolve parameters, run the library, and collect
//! deterministic outputs.

use crate::config::{CliError, Params};
use crate::output::{ExperimentOutput, Table};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::path::Path;
use tqm_core::classical::{classical_trajectory, TrajectoryPoint};
use tqm_core::grid::{AxisGrid, GridError, GridWave, ScalarPotential};
use tqm_core::maxent;
use tqm_core::multiparticle::{
    absorption_final, exchange_kinematics, loop_clock_frequency, loop_omega, loop_tau,
    AbcCouplings, Emission, ExchangeGeometry, ExchangeSide, ReducedMomentum, VertexSchedule,
};
use tqm_core::packets::{free_full_solution, AxisKind, AxisPacket, Packet4, PlaneWave};
use tqm_core::quad;
use tqm_core::slits::{
    double_gate_density_sqm, double_gate_density_tqm, gate_width_sweep, sqm_gate,
    tqm_gate_delta_tau, tqm_gate_rescale, BeamGeometry, DoubleGate, GateSpec,
};
use tqm_core::toa::{toa_muga_leavens, toa_sqm, toa_tqm, DetectorSpec, ToaWarning};
use tqm_core::units;
use tqm_core::wavelets::{
    admissibility_constant, forward_transform, inverse_transform, morlet_mother,
    relative_l2_error, AtomGrids,
};

fn numerical(e: GridError) -> CliError {
    CliError::Numerical(e.to_string())
}

pub fn run(
    experiment: &str,
    config: Option<&Path>,
    overrides: &[(String, f64)],
    seed: u64,
    out_path: Option<&Path>,
) -> Result<ExperimentOutput, CliError> {
    match experiment {
        "maxent" => run_maxent(config, overrides, seed),
        "classical" => run_classical(config, overrides, seed),
        "evolve" => run_evolve(config, overrides, seed, out_path),
        "toa" => run_toa(config, overrides, seed),
        "slit-sweep" => run_slit_sweep(config, overrides, seed),
        "double-gate" => run_double_gate(config, overrides, seed),
        "emit" => run_emit(config, overrides, seed),
        "absorb" => run_absorb(config, overrides, seed),
        "exchange" => run_exchange(config, overrides, seed),
        "loop" => run_loop(config, overrides, seed),
        "wavelet-roundtrip" => run_wavelet(config, overrides, seed),
        other => Err(CliError::Config(format!("unknown experiment `{other}`"))),
    }
}

fn run_maxent(
    config: Option<&Path>,
    overrides: &[(String, f64)],
    seed: u64,
) -> Result<ExperimentOutput, CliError> {
    let defaults = [
        ("mass_ev", 0.511e6),
        ("binding_ev", -13.6),
        ("kinetic_ev", 1.0),
        ("scale_mass_ev", 1.0e6),
    ];
    let params = Params::resolve(&defaults, config, overrides)?;
    let estimate = maxent::bound_state_estimate(params.get("mass_ev"), params.get("binding_ev"))
        .map_err(|e| CliError::Config(e.to_string()))?;
    let scale = maxent::clock_frequency_scale(params.get("kinetic_ev"), params.get("scale_mass_ev"));

    let mut output = ExperimentOutput::new("maxent", seed, &params.entries());
    output.scalar("delta_e_ev", estimate.delta_e);
    output.scalar("delta_t_as", units::seconds_to_as(estimate.delta_t));
    output.scalar("bohr_time_as", units::seconds_to_as(maxent::bohr_time_scale()));
    output.scalar(
        "bohr_planck_ratio",
        maxent::bohr_time_scale() / units::PLANCK_TIME_S,
    );
    output.scalar("clock_f_ev", scale.f_ev);
    output.scalar("clock_time_scale_as", units::seconds_to_as(scale.time_scale_s));
    Ok(output)
}

fn run_classical(
    config: Option<&Path>,
    overrides: &[(String, f64)],
    seed: u64,
) -> Result<ExperimentOutput, CliError> {
    let defaults = [
        ("q", 1.0),
        ("mass", 1.0),
        ("e_x", 0.5),
        ("e_y", 0.0),
        ("e_z", 0.0),
        ("b_x", 0.0),
        ("b_y", 0.0),
        ("b_z", 0.0),
        ("t0", 0.0),
        ("x0", 0.0),
        ("y0", 0.0),
        ("z0", 0.0),
        ("tdot0", 1.0),
        ("xdot0", 0.0),
        ("ydot0", 0.0),
        ("zdot0", 0.0),
        ("tau_max", 4.0),
        ("steps", 512.0),
        ("sample_every", 8.0),
    ];
    let params = Params::resolve(&defaults, config, overrides)?;
    let init = TrajectoryPoint {
        tau: 0.0,
        t: params.get("t0"),
        x: [params.get("x0"), params.get("y0"), params.get("z0")],
        tdot: params.get("tdot0"),
        xdot: [params.get("xdot0"), params.get("ydot0"), params.get("zdot0")],
    };
    let trajectory = classical_trajectory(
        &init,
        [params.get("e_x"), params.get("e_y"), params.get("e_z")],
        [params.get("b_x"), params.get("b_y"), params.get("b_z")],
        params.get("q"),
        params.get("mass"),
        (0.0, params.get("tau_max")),
        params.get_usize("steps")?,
    )
    .map_err(|e| CliError::Config(e.to_string()))?;

    let every = params.get_usize("sample_every")?.max(1);
    let initial_speed = init.minkowski_speed_sq();
    let mut drift: f64 = 0.0;
    let rows: Vec<Vec<f64>> = trajectory
        .samples
        .iter()
        .enumerate()
        .filter(|(i, _)| i % every == 0 || *i == trajectory.samples.len() - 1)
        .map(|(_, p)| {
            drift = drift.max((p.minkowski_speed_sq() - initial_speed).abs());
            vec![
                p.tau, p.t, p.x[0], p.x[1], p.x[2], p.tdot, p.xdot[0], p.xdot[1], p.xdot[2],
            ]
        })
        .collect();

    let mut output = ExperimentOutput::new("classical", seed, &params.entries());
    output.scalar("minkowski_speed_drift", drift);
    let last = trajectory.last();
    output.scalar("final_t", last.t);
    output.scalar("final_tdot", last.tdot);
    output.scalar("final_xdot", last.xdot[0]);
    output.table = Some(Table {
        header: ["tau", "t", "x", "y", "z", "tdot", "xdot", "ydot", "zdot"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        rows,
    });
    Ok(output)
}

fn run_evolve(
    config: Option<&Path>,
    overrides: &[(String, f64)],
    seed: u64,
    out_path: Option<&Path>,
) -> Result<ExperimentOutput, CliError> {
    let defaults = [
        ("mass", 1.0),
        ("e0", 1.0),
        ("p0", 0.5),
        ("sigma_t", 1.0),
        ("sigma_x", 1.0),
        ("t_min", -17.0),
        ("t_max", 24.0),
        ("x_min", -17.0),
        ("x_max", 22.0),
        ("nt", 384.0),
        ("nx", 384.0),
        ("tau_total", 3.0),
        ("steps", 6.0),
        ("q", 0.0),
        ("v0", 0.0),
        ("potential_width", 1.0),
        ("dump_wave", 0.0),
    ];
    let params = Params::resolve(&defaults, config, overrides)?;
    let mass = params.get("mass");
    let time_packet = AxisPacket::time(0.0, params.get("e0"), params.get("sigma_t"), mass)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let space_packet = AxisPacket::space(0.0, params.get("p0"), params.get("sigma_x"), mass)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let axes = vec![
        AxisGrid::new(
            params.get("t_min"),
            params.get("t_max"),
            params.get_usize("nt")?,
            AxisKind::Time,
        )
        .map_err(numerical)?,
        AxisGrid::new(
            params.get("x_min"),
            params.get("x_max"),
            params.get_usize("nx")?,
            AxisKind::Space,
        )
        .map_err(numerical)?,
    ];
    let wave = GridWave::sample_packets(axes, &[time_packet, space_packet]).map_err(numerical)?;

    let q = params.get("q");
    let v0 = params.get("v0");
    let potential = if v0 != 0.0 {
        ScalarPotential::gaussian_bump(v0, params.get("potential_width"), vec![0.0])
    } else {
        ScalarPotential::free()
    };
    let tau_total = params.get("tau_total");
    let steps = params.get_usize("steps")?;

    let mut norms = Vec::new();
    let final_wave = tqm_core::grid::propagate_observed(
        &wave,
        mass,
        q,
        &potential,
        tau_total,
        steps,
        tqm_core::grid::TimeAxisSign::Physical,
        |_, tau, w| norms.push(vec![tau, w.norm()]),
    )
    .map_err(numerical)?;

    let mut output = ExperimentOutput::new("evolve", seed, &params.entries());
    output.scalar("norm_initial", wave.norm());
    output.scalar("norm_final", final_wave.norm());
    let drift = norms
        .iter()
        .map(|row| (row[1] - 1.0).abs())
        .fold(0.0, f64::max);
    output.scalar("norm_drift", drift);
    let (ts, rho_t) = final_wave.axis_marginal(0);
    let (mean_t, width_t) = quad::density_moments(&ts, &rho_t);
    let (xs, rho_x) = final_wave.axis_marginal(1);
    let (mean_x, width_x) = quad::density_moments(&xs, &rho_x);
    output.scalar("mean_t", mean_t);
    output.scalar("width_t", width_t);
    output.scalar("mean_x", mean_x);
    output.scalar("width_x", width_x);

    if q == 0.0 || v0 == 0.0 {
        // Free case: pointwise deviation from the closed form.
        let packets = [time_packet, space_packet];
        let dims = final_wave.dims();
        let mut peak: f64 = 0.0;
        let mut dev: f64 = 0.0;
        for (flat, v) in final_wave.values().iter().enumerate() {
            let it = flat / dims[1];
            let ix = flat % dims[1];
            let point = [
                final_wave.axes()[0].point(it),
                final_wave.axes()[1].point(ix),
            ];
            let reference = free_full_solution(&packets, tau_total, &point);
            peak = peak.max(reference.norm());
            dev = dev.max((*v - reference).norm());
        }
        output.scalar("closed_form_max_dev", dev / peak);
    }

    if params.get("dump_wave") != 0.0 {
        if let Some(path) = out_path {
            let wave_path = path.with_extension("gw");
            final_wave.save(&wave_path).map_err(numerical)?;
            output.flag("wave_file", &wave_path.display().to_string());
        }
    }
    output.table = Some(Table {
        header: vec!["tau".into(), "norm".into()],
        rows: norms,
    });
    Ok(output)
}

fn run_toa(
    config: Option<&Path>,
    overrides: &[(String, f64)],
    seed: u64,
) -> Result<ExperimentOutput, CliError> {
    let defaults = [
        ("mass", 1.0),
        ("p0", 0.1),
        ("sigma_x", 200.0),
        ("sigma_t", 0.0), // 0: SQM only
        ("detector_l", 0.0), // 0: far-field default 12 m sigma_x^2 v
        ("muga_leavens", 1.0),
    ];
    let params = Params::resolve(&defaults, config, overrides)?;
    let mass = params.get("mass");
    let sigma_x = params.get("sigma_x");
    let space_packet = AxisPacket::space(0.0, params.get("p0"), sigma_x, mass)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let v = params.get("p0") / mass;
    let l = if params.get("detector_l") == 0.0 {
        12.0 * mass * sigma_x * sigma_x * v
    } else {
        params.get("detector_l")
    };
    let det = DetectorSpec::new(l, mass, v).map_err(|e| CliError::Config(e.to_string()))?;

    let sigma_t = params.get("sigma_t");
    let result = if sigma_t > 0.0 {
        let time_packet = AxisPacket::time(0.0, mass, sigma_t, mass)
            .map_err(|e| CliError::Config(e.to_string()))?;
        toa_tqm(&time_packet, &space_packet, &det)
    } else {
        toa_sqm(&space_packet, &det)
    };
    for warning in &result.warnings {
        if let ToaWarning::ParaxialViolation { ratio } = warning {
            return Err(CliError::Numerical(format!(
                "paraxial validity violated: p0/sigma_p = {ratio:.3} < 10"
            )));
        }
    }

    let mut output = ExperimentOutput::new("toa", seed, &params.entries());
    output.scalar("mean", result.mean);
    output.scalar("delta_tau", result.delta_tau);
    output.scalar("sigma_bar", result.sigma_bar);
    output.scalar("sigma_tilde", result.sigma_tilde);

    if params.get("muga_leavens") != 0.0 {
        let sigma_p = space_packet.momentum_sigma();
        let p_grid = quad::linspace(
            space_packet.carrier - 8.0 * sigma_p,
            space_packet.carrier + 8.0 * sigma_p,
            4001,
        );
        let phi: Vec<Complex64> = p_grid
            .iter()
            .map(|&p| space_packet.evaluate_momentum(0.0, p))
            .collect();
        let (oracle, _) =
            toa_muga_leavens(&p_grid, &phi, &det, result.density.tau_samples())
                .map_err(|e| CliError::Numerical(e.to_string()))?;
        output.scalar("muga_leavens_l1", oracle.l1_distance(&result.density));
        output.scalar("muga_leavens_mean", oracle.mean());
    }

    let rows: Vec<Vec<f64>> = result
        .density
        .tau_samples()
        .iter()
        .zip(result.density.rho())
        .map(|(&tau, &rho)| vec![tau, rho])
        .collect();
    output.table = Some(Table {
        header: vec!["tau".into(), "rho".into()],
        rows,
    });
    Ok(output)
}

fn run_slit_sweep(
    config: Option<&Path>,
    overrides: &[(String, f64)],
    seed: u64,
) -> Result<ExperimentOutput, CliError> {
    let defaults = [
        ("p0", 100.0),
        ("mass", 1000.0),
        ("sigma_x", 1.0),
        ("center_a", 100.0),
        ("detector_t", 200.0),
        ("w_min", 1e-3),
        ("w_max", 1e2),
        ("n_w", 50.0),
    ];
    let params = Params::resolve(&defaults, config, overrides)?;
    let n_w = params.get_usize("n_w")?.max(2);
    let (w_min, w_max) = (params.get("w_min"), params.get("w_max"));
    if !(w_min > 0.0 && w_max > w_min) {
        return Err(CliError::Config("need 0 < w_min < w_max".into()));
    }
    let widths: Vec<f64> = (0..n_w)
        .map(|k| w_min * (w_max / w_min).powf(k as f64 / (n_w - 1) as f64))
        .collect();
    let rows = gate_width_sweep(
        params.get("p0"),
        params.get("mass"),
        params.get("sigma_x"),
        params.get("center_a"),
        params.get("detector_t"),
        &widths,
    )
    .map_err(|e| CliError::Config(e.to_string()))?;

    let mut output = ExperimentOutput::new("slit-sweep", seed, &params.entries());
    output.scalar(
        "ratio_at_narrowest",
        rows[0].delta_tau_tqm / rows[0].delta_tau_sqm,
    );
    let sqm_monotone = rows
        .windows(2)
        .all(|p| p[1].delta_tau_sqm >= p[0].delta_tau_sqm - 1e-15);
    let tqm_monotone = rows
        .windows(2)
        .all(|p| p[1].delta_tau_tqm <= p[0].delta_tau_tqm + 1e-15);
    output.scalar("sqm_monotone_nondecreasing", sqm_monotone as u8 as f64);
    output.scalar("tqm_monotone_nonincreasing", tqm_monotone as u8 as f64);
    output.table = Some(Table {
        header: vec!["W".into(), "delta_tau_sqm".into(), "delta_tau_tqm".into()],
        rows: rows
            .iter()
            .map(|r| vec![r.w, r.delta_tau_sqm, r.delta_tau_tqm])
            .collect(),
    });
    Ok(output)
}

fn run_double_gate(
    config: Option<&Path>,
    overrides: &[(String, f64)],
    seed: u64,
) -> Result<ExperimentOutput, CliError> {
    let defaults = [
        ("mass", 10.0),
        ("e0", 10.0),
        ("sigma_t", 1.0),
        ("a1", 40.0),
        ("separation", 25.0),
        ("width", 1.0),
        ("amp1", 1.0),
        ("amp2", 1.0),
        ("n_e", 16001.0),
        ("e_span", 4.0),
        // SQM comparison beam (clipped, same-spacing check).
        ("sqm_p0", 100.0),
        ("sqm_mass", 1000.0),
        ("sqm_sigma_p", 8.0),
        ("sqm_a1", 40.0),
        ("sqm_separation", 40.0),
        ("sqm_width", 3.2),
        ("sqm_detector_t", 200.0),
        // Beam for the single-gate summary numbers.
        ("beam_v", 0.1),
        ("beam_sigma_x", 1.0),
    ];
    let params = Params::resolve(&defaults, config, overrides)?;
    let mass = params.get("mass");
    let time_packet = AxisPacket::time(0.0, params.get("e0"), params.get("sigma_t"), mass)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let a1 = params.get("a1");
    let separation = params.get("separation");
    let width = params.get("width");
    let gates = DoubleGate {
        gate1: GateSpec::new(1.0, a1, width).map_err(|e| CliError::Config(e.to_string()))?,
        gate2: GateSpec::new(1.0, a1 + separation, width)
            .map_err(|e| CliError::Config(e.to_string()))?,
        amp1: params.get("amp1"),
        amp2: params.get("amp2"),
    };
    let e0 = params.get("e0");
    let e_grid = quad::linspace(
        e0 - params.get("e_span"),
        e0 + params.get("e_span"),
        params.get_usize("n_e")?,
    );
    let tqm = double_gate_density_tqm(&time_packet, &gates, &e_grid)
        .map_err(|e| CliError::Config(e.to_string()))?;

    let sqm_mass = params.get("sqm_mass");
    let sqm_p0 = params.get("sqm_p0");
    let beam = BeamGeometry::from_times(
        sqm_p0,
        sqm_mass,
        params.get("sqm_a1"),
        params.get("sqm_width"),
        params.get("sqm_detector_t"),
    )
    .map_err(|e| CliError::Config(e.to_string()))?;
    let gates_sqm = DoubleGate {
        gate1: GateSpec::new(beam.gate.position_b, params.get("sqm_a1"), params.get("sqm_width"))
            .map_err(|e| CliError::Config(e.to_string()))?,
        gate2: GateSpec::new(
            beam.gate.position_b,
            params.get("sqm_a1") + params.get("sqm_separation"),
            params.get("sqm_width"),
        )
        .map_err(|e| CliError::Config(e.to_string()))?,
        amp1: 1.0,
        amp2: 1.0,
    };
    let w0 = sqm_p0 * sqm_p0 / (2.0 * sqm_mass);
    let w_grid = quad::linspace(w0 - 3.0, w0 + 3.0, 16001);
    let sqm = double_gate_density_sqm(&beam, params.get("sqm_sigma_p"), &gates_sqm, &w_grid)
        .map_err(|e| CliError::Config(e.to_string()))?;

    let mut output = ExperimentOutput::new("double-gate", seed, &params.entries());
    output.flag("flavor", "tqm");
    output.flag("sqm_well_focused_approx", "true");
    output.scalar(
        "sqm_focus_prefactor",
        tqm_core::kernels::sqm_focus_prefactor([sqm_p0, 0.0, 0.0], sqm_mass),
    );
    output.scalar("expected_spacing_tqm", 2.0 * std::f64::consts::PI / separation);
    output.scalar("fringe_spacing_tqm", tqm.fringe_spacing.unwrap_or(f64::NAN));
    output.scalar(
        "expected_spacing_sqm",
        2.0 * std::f64::consts::PI / params.get("sqm_separation"),
    );
    output.scalar("fringe_spacing_sqm", sqm.fringe_spacing.unwrap_or(f64::NAN));

    // Single-gate summary for gate 1 against both branches.
    let rescale = tqm_gate_rescale(time_packet.sigma, a1, width, mass);
    output.scalar("w", width);
    output.scalar("sigma_t", time_packet.sigma);
    output.scalar("sigma_star_sq", rescale.sigma_star_sq);
    output.scalar("tau_star", rescale.tau_star);
    let v = params.get("beam_v");
    let sigma_x = params.get("beam_sigma_x");
    output.scalar(
        "delta_tau",
        tqm_gate_delta_tau(width, v, sigma_x, mass, params.get("sqm_detector_t")),
    );
    output.scalar(
        "transmission",
        sqm_gate(&beam, params.get("sqm_sigma_p")).transmission,
    );

    output.table = Some(Table {
        header: vec!["e".into(), "density_tqm".into()],
        rows: e_grid
            .iter()
            .zip(&tqm.density)
            .map(|(&e, &d)| vec![e, d])
            .collect(),
    });
    Ok(output)
}

fn run_emit(
    config: Option<&Path>,
    overrides: &[(String, f64)],
    seed: u64,
) -> Result<ExperimentOutput, CliError> {
    let defaults = [
        ("lambda", 0.25),
        ("lambda_c", 0.1),
        ("mass_a", 1.0),
        ("mass_b", 0.05),
        ("mass_c", 10.0),
        ("e_a", 1.0),
        ("p_a", 0.2),
        ("sigma_t", 1.0),
        ("sigma_x", 1.0),
        ("tau_x", 0.5),
        ("tau_end", 2.0),
        ("n_grid", 41.0),
    ];
    let params = Params::resolve(&defaults, config, overrides)?;
    let couplings = AbcCouplings::new(
        params.get("lambda"),
        params.get("lambda_c"),
        params.get("mass_a"),
        params.get("mass_b"),
        params.get("mass_c"),
    )
    .map_err(|e| CliError::Config(e.to_string()))?;
    let a_time = AxisPacket::time(0.0, params.get("e_a"), params.get("sigma_t"), couplings.mass_a)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let a_space =
        AxisPacket::space(0.0, params.get("p_a"), params.get("sigma_x"), couplings.mass_a)
            .map_err(|e| CliError::Config(e.to_string()))?;
    let sched = VertexSchedule::single(params.get("tau_x"), params.get("tau_end"))
        .map_err(|e| CliError::Config(e.to_string()))?;
    let emission = Emission::new(couplings, a_time, a_space, sched)
        .map_err(|e| CliError::Config(e.to_string()))?;

    let e_a = params.get("e_a");
    let mean_point = (
        ReducedMomentum {
            e: 0.6 * e_a,
            px: 0.15,
        },
        ReducedMomentum {
            e: 0.4 * e_a,
            px: 0.05,
        },
    );
    let mut output = ExperimentOutput::new("emit", seed, &params.entries());
    output.flag("sqm_well_focused_approx", "true");
    output.scalar("f_0", emission.f0(mean_point.0, mean_point.1));
    output.scalar("f_x", emission.fx(mean_point.0, mean_point.1));

    // Conserved-sum marginal moments.
    let sigma_e = a_time.momentum_sigma();
    let s_grid = quad::linspace(e_a - 8.0 * sigma_e, e_a + 8.0 * sigma_e, 2001);
    let density: Vec<f64> = s_grid
        .iter()
        .map(|&s| {
            emission
                .amplitude(
                    ReducedMomentum { e: 0.6 * s, px: 0.15 },
                    ReducedMomentum { e: 0.4 * s, px: 0.05 },
                )
                .norm_sqr()
        })
        .collect();
    let (mean, std) = quad::density_moments(&s_grid, &density);
    output.scalar("marginal_mean", mean);
    output.scalar("marginal_dispersion", std * 2.0_f64.sqrt());

    // Modulus invariance under an opposite shift of the two momenta.
    let base = emission.amplitude(mean_point.0, mean_point.1).norm();
    let shifted = emission
        .amplitude(
            ReducedMomentum {
                e: mean_point.0.e + 0.3,
                px: mean_point.0.px - 0.1,
            },
            ReducedMomentum {
                e: mean_point.1.e - 0.3,
                px: mean_point.1.px + 0.1,
            },
        )
        .norm();
    output.scalar("shift_invariance_residual", (shifted - base).abs() / base);

    let n = params.get_usize("n_grid")?;
    let e_values = quad::linspace(e_a * 0.6 - 2.0 * sigma_e, e_a * 0.6 + 2.0 * sigma_e, n);
    let w_values = quad::linspace(e_a * 0.4 - 2.0 * sigma_e, e_a * 0.4 + 2.0 * sigma_e, n);
    let joint = emission.grid(e_values, w_values, 0.15, 0.05);
    let mut rows = Vec::with_capacity(n * n);
    for (i, &e) in joint.e_values.iter().enumerate() {
        for (j, &w) in joint.w_values.iter().enumerate() {
            let v = joint.values[i * joint.w_values.len() + j];
            rows.push(vec![e, w, v.re, v.im]);
        }
    }
    output.table = Some(Table {
        header: vec!["e_prime".into(), "w".into(), "re".into(), "im".into()],
        rows,
    });
    Ok(output)
}

fn run_absorb(
    config: Option<&Path>,
    overrides: &[(String, f64)],
    seed: u64,
) -> Result<ExperimentOutput, CliError> {
    let defaults = [
        ("lambda", 0.2),
        ("lambda_c", 0.1),
        ("mass_a", 1.0),
        ("mass_b", 0.5),
        ("mass_c", 10.0),
        ("x_a", -2.0),
        ("v", 0.1),
        ("x_b", 2.0),
        ("u", 0.1),
        ("sigma_t_a", 1.0),
        ("sigma_x_a", 1.0),
        ("sigma_t_b", 0.8),
        ("sigma_x_b", 0.7),
        ("sigma_yz", 1.0),
    ];
    let params = Params::resolve(&defaults, config, overrides)?;
    let couplings = AbcCouplings::new(
        params.get("lambda"),
        params.get("lambda_c"),
        params.get("mass_a"),
        params.get("mass_b"),
        params.get("mass_c"),
    )
    .map_err(|e| CliError::Config(e.to_string()))?;
    let (mass, mu) = (couplings.mass_a, couplings.mass_b);
    let syz = params.get("sigma_yz");
    let build = |center: f64, carrier: f64, st: f64, sx: f64, m: f64| -> Result<Packet4, CliError> {
        Packet4::new([
            AxisPacket::time(0.0, m, st, m).map_err(|e| CliError::Config(e.to_string()))?,
            AxisPacket::space(center, carrier, sx, m)
                .map_err(|e| CliError::Config(e.to_string()))?,
            AxisPacket::space(0.0, 0.0, syz, m).map_err(|e| CliError::Config(e.to_string()))?,
            AxisPacket::space(0.0, 0.0, syz, m).map_err(|e| CliError::Config(e.to_string()))?,
        ])
        .map_err(|e| CliError::Config(e.to_string()))
    };
    let a = build(
        params.get("x_a"),
        params.get("v") * mass,
        params.get("sigma_t_a"),
        params.get("sigma_x_a"),
        mass,
    )?;
    let b = build(
        params.get("x_b"),
        -params.get("u") * mu,
        params.get("sigma_t_b"),
        params.get("sigma_x_b"),
        mu,
    )?;
    let result = absorption_final(&a, &b, &couplings, None)
        .map_err(|e| CliError::Config(e.to_string()))?;

    let mut output = ExperimentOutput::new("absorb", seed, &params.entries());
    output.scalar("tau_x", result.tau_x);
    output.scalar("x_x", result.x_x);
    output.scalar("sigma_star_sq_t", result.rescales[0].sigma_star_sq);
    output.scalar("tau_star_t", result.rescales[0].tau_star);
    output.scalar("sigma_star_sq_x", result.rescales[1].sigma_star_sq);
    output.scalar("tau_star_x", result.rescales[1].tau_star);
    output.scalar("delta_e", result.delta_e);
    output.scalar("outgoing_e", result.outgoing.axes[0].carrier);
    output.scalar("outgoing_px", result.outgoing.axes[1].carrier);
    output.scalar("geometry_warnings", result.warnings.len() as f64);
    Ok(output)
}

fn run_exchange(
    config: Option<&Path>,
    overrides: &[(String, f64)],
    seed: u64,
) -> Result<ExperimentOutput, CliError> {
    let defaults = [
        ("x_a", -2.0),
        ("p_a", 0.5),
        ("mass_a", 1.0),
        ("x_c", 2.0),
        ("q_c", -0.25),
        ("mass_c", 10.0),
        ("mass_b", 0.0625),
        ("side", 0.0),
        ("tau_x", 2.0),
        ("tau_y", 3.0),
        ("tau_end", 5.0),
    ];
    let params = Params::resolve(&defaults, config, overrides)?;
    let side = match params.get("side") as i64 {
        0 => ExchangeSide::Left,
        1 => ExchangeSide::Right,
        other => {
            return Err(CliError::Config(format!(
                "side must be 0 (left) or 1 (right), got {other}"
            )))
        }
    };
    let geom = ExchangeGeometry {
        x_a: params.get("x_a"),
        p_a: params.get("p_a"),
        mass_a: params.get("mass_a"),
        x_c: params.get("x_c"),
        q_c: params.get("q_c"),
        mass_c: params.get("mass_c"),
        mass_b: params.get("mass_b"),
        side,
        schedule: VertexSchedule::pair(params.get("tau_x"), params.get("tau_y"), params.get("tau_end"))
            .map_err(|e| CliError::Config(e.to_string()))?,
    };
    let result = exchange_kinematics(&geom).map_err(|e| CliError::Config(e.to_string()))?;

    let mut output = ExperimentOutput::new("exchange", seed, &params.entries());
    output.scalar("x_x", result.x_x);
    output.scalar("x_y", result.x_y);
    output.scalar("k_exchange", result.k_exchange);
    output.scalar("p_prime_mean", result.p_prime_mean);
    output.scalar("q_prime_mean", result.q_prime_mean);
    output.scalar("f_k", result.f_k);
    output.scalar(
        "momentum_conservation_residual",
        ((result.p_prime_mean + result.q_prime_mean) - (geom.p_a + geom.q_c)).abs(),
    );
    Ok(output)
}

fn run_loop(
    config: Option<&Path>,
    overrides: &[(String, f64)],
    seed: u64,
) -> Result<ExperimentOutput, CliError> {
    let defaults = [
        ("mass", 1.0),
        ("mu", 0.2),
        ("tau", 0.9),
        ("e", 1.1),
        ("px", 0.4),
        ("py", 0.0),
        ("pz", -0.2),
        ("omega_span", 3.0),
        ("n_omega", 241.0),
    ];
    let params = Params::resolve(&defaults, config, overrides)?;
    let p = PlaneWave::new([
        params.get("e"),
        params.get("px"),
        params.get("py"),
        params.get("pz"),
    ])
    .map_err(|e| CliError::Config(e.to_string()))?;
    let (mass, mu) = (params.get("mass"), params.get("mu"));
    let value = loop_tau(&p, params.get("tau"), mass, mu)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let f_p = loop_clock_frequency(&p, mass, mu);

    let mut output = ExperimentOutput::new("loop", seed, &params.entries());
    output.scalar("l_tau_re", value.re);
    output.scalar("l_tau_im", value.im);
    output.scalar("l_tau_abs", value.norm());
    output.scalar("f_p", f_p);
    let span = params.get("omega_span");
    let omegas = quad::linspace(f_p - span, f_p + span, params.get_usize("n_omega")?);
    output.table = Some(Table {
        header: vec!["omega".into(), "l_omega_abs".into()],
        rows: omegas
            .iter()
            .map(|&w| vec![w, loop_omega(&p, w, mass, mu).norm()])
            .collect(),
    });
    Ok(output)
}

fn run_wavelet(
    config: Option<&Path>,
    overrides: &[(String, f64)],
    seed: u64,
) -> Result<ExperimentOutput, CliError> {
    let defaults = [
        ("support_min", -8.0),
        ("support_max", 8.0),
        ("min_octave", -5.0),
        ("max_octave", 12.0),
        ("voices", 8.0),
        ("dl_divisor", 4.0),
        ("n_samples", 8193.0),
        ("n_eval", 481.0),
        ("corpus", 1.0),
        ("export_threshold", 1e-4),
    ];
    let params = Params::resolve(&defaults, config, overrides)?;
    let support = (params.get("support_min"), params.get("support_max"));
    if !(support.1 > support.0) {
        return Err(CliError::Config("support_max must exceed support_min".into()));
    }
    let grids = AtomGrids::with_params(
        support,
        params.get("min_octave") as i32,
        params.get("max_octave") as i32,
        params.get_usize("voices")?.max(1),
        params.get("dl_divisor"),
    );
    let c = admissibility_constant(40.0, 8000)
        .map_err(|e| CliError::Numerical(e.to_string()))?;

    // Corpus: a chirped Gaussian plus seeded random chirps.
    let mut corpus: Vec<Box<dyn Fn(f64) -> Complex64>> = vec![Box::new(|t: f64| {
        Complex64::new(0.0, -t).exp() * (-(t - 3.0) * (t - 3.0) / 8.0).exp()
    })];
    let mut rng = StdRng::seed_from_u64(seed);
    for _ in 1..params.get_usize("corpus")?.max(1) {
        let carrier = rng.gen_range(-1.2..1.2);
        let sigma: f64 = rng.gen_range(0.8..2.0);
        let center = rng.gen_range(-2.0..2.0);
        corpus.push(Box::new(move |t: f64| {
            Complex64::new(0.0, carrier * t).exp()
                * (-(t - center) * (t - center) / (2.0 * sigma * sigma)).exp()
        }));
    }

    let ts = quad::linspace(support.0 - 2.0, support.1 + 2.0, params.get_usize("n_samples")?);
    let eval_ts = quad::linspace(support.0, support.1, params.get_usize("n_eval")?);
    let mut max_error: f64 = 0.0;
    let mut last_coefficients = None;
    for f in &corpus {
        let samples: Vec<Complex64> = ts.iter().map(|&t| f(t)).collect();
        let coefficients = forward_transform(&ts, &samples, &grids)
            .map_err(|e| CliError::Numerical(e.to_string()))?;
        let reconstructed = inverse_transform(&coefficients, c, &eval_ts);
        let reference: Vec<Complex64> = eval_ts.iter().map(|&t| f(t)).collect();
        max_error = max_error.max(relative_l2_error(&reference, &reconstructed));
        last_coefficients = Some(coefficients);
    }

    let zero_mean = quad::integrate_c(-12.0, 12.0, 4001, morlet_mother).norm();

    let mut output = ExperimentOutput::new("wavelet-roundtrip", seed, &params.entries());
    output.scalar("c_admissibility", c);
    output.scalar("mother_zero_mean", zero_mean);
    output.scalar("max_rel_l2_error", max_error);
    output.scalar("corpus_size", corpus.len() as f64);

    if let Some(coefficients) = last_coefficients {
        let peak = coefficients
            .rows()
            .map(|(_, _, v)| v.norm())
            .fold(0.0, f64::max);
        let threshold = params.get("export_threshold") * peak;
        let rows: Vec<Vec<f64>> = coefficients
            .rows()
            .filter(|(_, _, v)| v.norm() >= threshold)
            .map(|(s, l, v)| vec![s, l, v.re, v.im])
            .collect();
        output.table = Some(Table {
            header: vec!["s".into(), "l".into(), "re".into(), "im".into()],
            rows,
        });
    }
    Ok(output)
}
