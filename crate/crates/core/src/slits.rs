//! The gate-in-time experiments: a Gaussian camera shutter applied to a
//! moving packet. The SQM branch clips the beam; the TQM branch diffracts
//! it. Includes the double gate (interference in time).
//!
//! Gates are always Gaussian; a hard-edged shutter is out of scope.
//! Transmission is tracked separately from the dispersions and never folded
//! into `delta_tau`.

use crate::grid::{grid_propagate, AxisGrid, GridError, GridWave, ScalarPotential};
use crate::packets::AxisPacket;
use crate::quad;
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GateError {
    #[error("gate width must be positive, got {0}")]
    BadWidth(f64),
    #[error("beam geometry violates v = B/A = L/T (B/A = {ba}, L/T = {lt})")]
    InconsistentGeometry { ba: f64, lt: f64 },
    #[error("gates overlap: separation {separation} <= 3 (W1 + W2) = {bound}")]
    GateOverlap { separation: f64, bound: f64 },
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Non-fatal validity notices for the gate analysis.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub enum GateWarning {
    /// Time packet carrier more than 10% off `E0/m = 1`.
    RelativisticInput { gamma: f64 },
}

/// Gaussian gate at `x = B`, centered on passage time `A`, width `W`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct GateSpec {
    pub position_b: f64,
    pub center_a: f64,
    pub width_w: f64,
}

impl GateSpec {
    pub fn new(position_b: f64, center_a: f64, width_w: f64) -> Result<Self, GateError> {
        if !(width_w > 0.0 && width_w.is_finite()) {
            return Err(GateError::BadWidth(width_w));
        }
        Ok(Self {
            position_b,
            center_a,
            width_w,
        })
    }

    /// Gate amplitude mask `exp(-(u - A)^2 / 2 W^2)` (in clock or coordinate
    /// time, depending on the branch).
    pub fn mask(&self, u: f64) -> f64 {
        let z = (u - self.center_a) / self.width_w;
        (-0.5 * z * z).exp()
    }
}

/// Beam from the origin through a gate to a detector; consistency
/// `v = B/A = L/T` is enforced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamGeometry {
    pub p0: f64,
    pub mass: f64,
    pub gate: GateSpec,
    pub detector_l: f64,
    pub detector_t: f64,
}

impl BeamGeometry {
    pub fn new(
        p0: f64,
        mass: f64,
        gate: GateSpec,
        detector_l: f64,
        detector_t: f64,
    ) -> Result<Self, GateError> {
        let v = p0 / mass;
        let ba = gate.position_b / gate.center_a;
        let lt = detector_l / detector_t;
        if ((ba - v) / v).abs() > 1e-9 || ((lt - v) / v).abs() > 1e-9 {
            return Err(GateError::InconsistentGeometry { ba, lt });
        }
        Ok(Self {
            p0,
            mass,
            gate,
            detector_l,
            detector_t,
        })
    }

    /// Build a consistent geometry from the passage and detection times.
    pub fn from_times(
        p0: f64,
        mass: f64,
        center_a: f64,
        width_w: f64,
        detector_t: f64,
    ) -> Result<Self, GateError> {
        let v = p0 / mass;
        let gate = GateSpec::new(v * center_a, center_a, width_w)?;
        Self::new(p0, mass, gate, v * detector_t, detector_t)
    }

    pub fn velocity(&self) -> f64 {
        self.p0 / self.mass
    }

    /// Angular width of the beam in momentum, `sigma_p / p0`.
    pub fn theta_p(&self, sigma_p: f64) -> f64 {
        sigma_p / self.p0
    }

    /// Angular width of the gate in time, `W / A`.
    pub fn theta_g(&self) -> f64 {
        self.gate.width_w / self.gate.center_a
    }
}

/// SQM branch: the clipped beam at the detector.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SqmGateResult {
    /// Primed momentum dispersion `1/sigma_p'^2 = 1/sigma_p^2 + A^2/(W^2 p0^2)`.
    pub sigma_p_prime: f64,
    /// Arrival-time dispersion at the detector, `T sigma_p' / p0`.
    pub sigma_g_prime: f64,
    /// `sigma_g' / sqrt(2)`.
    pub delta_tau: f64,
    /// Fraction of the beam through the gate, `(sigma_p'/sigma_p)^2`.
    pub transmission: f64,
}

/// Clipping in clock time: the gate narrows the momentum spread.
pub fn sqm_gate(beam: &BeamGeometry, sigma_p: f64) -> SqmGateResult {
    let a = beam.gate.center_a;
    let w = beam.gate.width_w;
    let inv_sq = 1.0 / (sigma_p * sigma_p) + a * a / (w * w * beam.p0 * beam.p0);
    let sigma_p_prime = inv_sq.sqrt().recip();
    let sigma_g_prime = beam.detector_t * sigma_p_prime / beam.p0;
    SqmGateResult {
        sigma_p_prime,
        sigma_g_prime,
        delta_tau: sigma_g_prime / 2.0_f64.sqrt(),
        transmission: (sigma_p_prime / sigma_p) * (sigma_p_prime / sigma_p),
    }
}

/// Post-gate rescaling constants solving the complex identity
/// `1/W^2 + 1/(sigma^2 - iA/m) = 1/(sigma*^2 - i tau*/m)`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct RescaleResult {
    pub sigma_star_sq: f64,
    pub tau_star: f64,
    pub determinant: f64,
}

impl RescaleResult {
    /// Relative residual of the defining identity for the gate case,
    /// `|1/W^2 + 1/(sigma^2 - iA/m) - 1/(sigma*^2 - i tau*/m)| / |lhs|`
    /// (relative, since the terms grow like 1/W^2 for narrow gates).
    pub fn gate_residual(&self, sigma_t: f64, a: f64, w: f64, mass: f64) -> f64 {
        let lhs = Complex64::new(1.0 / (w * w), 0.0)
            + 1.0 / Complex64::new(sigma_t * sigma_t, -a / mass);
        let rhs = 1.0 / Complex64::new(self.sigma_star_sq, -self.tau_star / mass);
        (lhs - rhs).norm() / lhs.norm()
    }
}

/// Closed-form solution of the gate rescaling:
/// `D = (sigma^2 + W^2)^2 + A^2/m^2`,
/// `sigma*^2 = (W^2/D) ((sigma^2 + W^2) sigma^2 + A^2/m^2)`,
/// `tau* = A W^4 / D`.
pub fn tqm_gate_rescale(sigma_t: f64, a: f64, w: f64, mass: f64) -> RescaleResult {
    let s_sq = sigma_t * sigma_t;
    let w_sq = w * w;
    let am = a / mass;
    let determinant = (s_sq + w_sq) * (s_sq + w_sq) + am * am;
    let sigma_star_sq = w_sq / determinant * ((s_sq + w_sq) * s_sq + am * am);
    let tau_star = a * w_sq * w_sq / determinant;
    RescaleResult {
        sigma_star_sq,
        tau_star,
        determinant,
    }
}

/// TQM branch: the gate resets the time packet.
#[derive(Debug, Clone)]
pub struct PostGatePacket {
    /// The reset packet: width `sigma_t*`, centered on the gate.
    pub packet: AxisPacket,
    pub rescale: RescaleResult,
    /// Effective elapsed time at the gate; the packet looks as if it had
    /// started at clock time `A - tau*`.
    pub tau_offset: f64,
    /// Complex normalization `(sigma*^2/sigma^2)^{1/4} sqrt(f'_G / f_G)`;
    /// drops out of every dispersion.
    pub normalization: Complex64,
    pub warnings: Vec<GateWarning>,
}

impl PostGatePacket {
    /// Dispersion factor at detection clock time `T`:
    /// `1 - i (tau* + (T - A)) / (m sigma*^2)`.
    pub fn dispersion_factor_at(&self, detector_t: f64, gate_a: f64) -> Complex64 {
        let elapsed = self.tau_offset + (detector_t - gate_a);
        Complex64::new(
            1.0,
            -elapsed / (self.packet.mass * self.rescale.sigma_star_sq),
        )
    }

    /// Width of the time marginal at detection clock time `T`.
    pub fn width_at(&self, detector_t: f64, gate_a: f64) -> f64 {
        let s_sq = self.rescale.sigma_star_sq;
        let elapsed = self.tau_offset + (detector_t - gate_a);
        let spread = elapsed / (self.packet.mass * s_sq);
        (0.5 * s_sq * (1.0 + spread * spread)).sqrt()
    }
}

/// Apply the gate to a time packet: the output packet has `sigma -> sigma*`
/// and an effective elapsed-time offset `tau*`; no other memory survives.
pub fn tqm_post_gate_packet(
    time_packet: &AxisPacket,
    gate: &GateSpec,
) -> Result<PostGatePacket, GateError> {
    let rescale = tqm_gate_rescale(
        time_packet.sigma,
        gate.center_a,
        gate.width_w,
        time_packet.mass,
    );
    let gamma = time_packet.carrier / time_packet.mass;
    let warnings = ((gamma - 1.0).abs() > 0.1)
        .then_some(GateWarning::RelativisticInput { gamma })
        .into_iter()
        .collect();

    let packet = AxisPacket::time(
        gate.center_a,
        time_packet.carrier,
        rescale.sigma_star_sq.sqrt(),
        time_packet.mass,
    )
    .expect("rescaled packet parameters are positive");

    let f_gate = time_packet.dispersion_factor(gate.center_a).value();
    let f_star = Complex64::new(
        1.0,
        -rescale.tau_star / (time_packet.mass * rescale.sigma_star_sq),
    );
    let normalization = (rescale.sigma_star_sq / (time_packet.sigma * time_packet.sigma))
        .powf(0.25)
        * (f_star / f_gate).sqrt();

    Ok(PostGatePacket {
        packet,
        rescale,
        tau_offset: rescale.tau_star,
        normalization,
        warnings,
    })
}

/// Far-field arrival-time uncertainty after a TQM gate:
/// `delta_tau = (T / m sqrt(2)) sqrt(1/W^2 + 1/(v^2 sigma_x^2))`.
pub fn tqm_gate_delta_tau(w: f64, v: f64, sigma_x: f64, mass: f64, detector_t: f64) -> f64 {
    (detector_t / mass) * (1.0 / (w * w) + 1.0 / (v * v * sigma_x * sigma_x)).sqrt()
        / 2.0_f64.sqrt()
}

/// One row of the falsifiability sweep.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct SweepRow {
    pub w: f64,
    pub delta_tau_sqm: f64,
    pub delta_tau_tqm: f64,
}

/// Sweep the gate width for a fixed beam; SQM narrows, TQM broadens. The
/// incoming time width does not appear: the gate resets it.
pub fn gate_width_sweep(
    p0: f64,
    mass: f64,
    sigma_x: f64,
    center_a: f64,
    detector_t: f64,
    widths: &[f64],
) -> Result<Vec<SweepRow>, GateError> {
    let sigma_p = 1.0 / sigma_x;
    let v = p0 / mass;
    widths
        .iter()
        .map(|&w| {
            let beam = BeamGeometry::from_times(p0, mass, center_a, w, detector_t)?;
            Ok(SweepRow {
                w,
                delta_tau_sqm: sqm_gate(&beam, sigma_p).delta_tau,
                delta_tau_tqm: tqm_gate_delta_tau(w, v, sigma_x, mass, detector_t),
            })
        })
        .collect()
}

/// Grid-oracle gated propagation: propagate the time axis to the gate,
/// multiply by the coordinate-time mask, propagate to detection, and return
/// the measured width of the time marginal. The space factor is a spectator
/// for this marginal, so a single time axis captures the experiment.
pub fn tqm_gate_grid_width(
    time_packet: &AxisPacket,
    gate: &GateSpec,
    detector_t: f64,
    axis: AxisGrid,
) -> Result<f64, GateError> {
    let wave = GridWave::sample_packets(vec![axis], &[*time_packet])?;
    let mass = time_packet.mass;
    let free = ScalarPotential::free();
    let mut at_gate = grid_propagate(&wave, mass, 0.0, &free, gate.center_a, 2)?;
    at_gate.apply_axis_mask(0, |t| gate.mask(t));
    let at_detector =
        grid_propagate(&at_gate, mass, 0.0, &free, detector_t - gate.center_a, 2)?;
    let (ts, rho) = at_detector.axis_marginal(0);
    Ok(quad::density_moments(&ts, &rho).1)
}

/// Two gates for the interference-in-time experiment.
#[derive(Debug, Clone, Copy)]
pub struct DoubleGate {
    pub gate1: GateSpec,
    pub gate2: GateSpec,
    pub amp1: f64,
    pub amp2: f64,
}

impl DoubleGate {
    pub fn separation(&self) -> f64 {
        self.gate2.center_a - self.gate1.center_a
    }

    fn check_overlap(&self) -> Result<(), GateError> {
        let bound = 3.0 * (self.gate1.width_w + self.gate2.width_w);
        if self.separation().abs() <= bound {
            return Err(GateError::GateOverlap {
                separation: self.separation(),
                bound,
            });
        }
        Ok(())
    }
}

/// An energy-domain density with the extracted fringe spacing.
#[derive(Debug, Clone)]
pub struct FringeDensity {
    pub energy_grid: Vec<f64>,
    pub density: Vec<f64>,
    /// Mean spacing of the central fringes; `None` when the density is
    /// unimodal.
    pub fringe_spacing: Option<f64>,
}

/// TQM double gate: the two reset packets, displaced in coordinate time by
/// the gate separation, superpose coherently; the conserved energy density
/// `|psi_hat(E)|^2` carries the fringes.
pub fn double_gate_density_tqm(
    time_packet: &AxisPacket,
    gates: &DoubleGate,
    energy_grid: &[f64],
) -> Result<FringeDensity, GateError> {
    gates.check_overlap()?;
    let post1 = tqm_post_gate_packet(time_packet, &gates.gate1)?;
    let post2 = tqm_post_gate_packet(time_packet, &gates.gate2)?;
    let density: Vec<f64> = energy_grid
        .iter()
        .map(|&e| {
            let a1 = gates.amp1 * post1.packet.evaluate_momentum(0.0, e);
            let a2 = gates.amp2 * post2.packet.evaluate_momentum(0.0, e);
            (a1 + a2).norm_sqr()
        })
        .collect();
    let fringe_spacing = extract_fringe_spacing(energy_grid, &density);
    Ok(FringeDensity {
        energy_grid: energy_grid.to_vec(),
        density,
        fringe_spacing,
    })
}

/// SQM double gate: two clipped components relabeled to kinetic energy
/// `ww = p^2/2m`; the clock-time translation between the passages leaves the
/// first-order phase `e^{i ww dT}` and the same fringe spacing.
pub fn double_gate_density_sqm(
    beam: &BeamGeometry,
    sigma_p: f64,
    gates: &DoubleGate,
    kinetic_grid: &[f64],
) -> Result<FringeDensity, GateError> {
    gates.check_overlap()?;
    let v = beam.velocity();
    let w0 = beam.p0 * beam.p0 / (2.0 * beam.mass);
    let widths: Vec<f64> = [&gates.gate1, &gates.gate2]
        .iter()
        .map(|gate| {
            let inv_sq = 1.0 / (sigma_p * sigma_p)
                + gate.center_a * gate.center_a / (gate.width_w * gate.width_w * beam.p0 * beam.p0);
            // dW = v dp maps the clipped momentum width to kinetic energy.
            v * inv_sq.sqrt().recip()
        })
        .collect();
    let amps = [gates.amp1, gates.amp2];
    let centers = [gates.gate1.center_a, gates.gate2.center_a];
    let density: Vec<f64> = kinetic_grid
        .iter()
        .map(|&ww| {
            let mut total = Complex64::new(0.0, 0.0);
            for j in 0..2 {
                let z = (ww - w0) / widths[j];
                let envelope = (-0.5 * z * z).exp() / widths[j].sqrt();
                total += amps[j] * envelope * Complex64::new(0.0, ww * centers[j]).exp();
            }
            total.norm_sqr()
        })
        .collect();
    let fringe_spacing = extract_fringe_spacing(kinetic_grid, &density);
    Ok(FringeDensity {
        energy_grid: kinetic_grid.to_vec(),
        density,
        fringe_spacing,
    })
}

/// Mean spacing of up to the five local maxima nearest the density's center
/// of mass; robust to envelope modulation.
fn extract_fringe_spacing(grid: &[f64], density: &[f64]) -> Option<f64> {
    let peak = density.iter().cloned().fold(0.0, f64::max);
    if peak <= 0.0 {
        return None;
    }
    let threshold = 1e-6 * peak;
    let mut maxima = Vec::new();
    for i in 1..density.len() - 1 {
        if density[i] > threshold && density[i] > density[i - 1] && density[i] >= density[i + 1] {
            maxima.push(grid[i]);
        }
    }
    if maxima.len() < 2 {
        return None;
    }
    let center = quad::density_moments(grid, density).0;
    maxima.sort_by(|a, b| {
        (a - center)
            .abs()
            .partial_cmp(&(b - center).abs())
            .expect("finite")
    });
    let central: &mut Vec<f64> = &mut maxima[..maxima.len().min(5)].to_vec();
    central.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let spacings: Vec<f64> = central.windows(2).map(|w| w[1] - w[0]).collect();
    Some(spacings.iter().sum::<f64>() / spacings.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn default_beam(w: f64) -> BeamGeometry {
        // v = 0.1 with a well-focused beam: m = 1000, p0 = 100, sigma_p = 1.
        BeamGeometry::from_times(100.0, 1000.0, 100.0, w, 200.0).unwrap()
    }

    #[test]
    fn geometry_consistency_is_enforced() {
        let gate = GateSpec::new(5.0, 10.0, 1.0).unwrap();
        // v = 0.1 but B/A = 0.5.
        assert!(matches!(
            BeamGeometry::new(0.1, 1.0, gate, 2.0, 20.0),
            Err(GateError::InconsistentGeometry { .. })
        ));
    }

    #[test]
    fn sqm_wide_gate_limit() {
        let beam = default_beam(1e8);
        let result = sqm_gate(&beam, 1.0);
        let no_gate = 1.0 / beam.p0;
        let ratio = result.sigma_g_prime / beam.detector_t / no_gate;
        assert!((ratio - 1.0).abs() < 1e-6, "ratio = {ratio}");
        assert!((result.transmission - 1.0).abs() < 1e-6);
    }

    #[test]
    fn sqm_narrow_gate_limit() {
        let beam = default_beam(1e-4);
        let result = sqm_gate(&beam, 1.0);
        let expected = beam.gate.width_w / beam.gate.center_a;
        let ratio = result.sigma_g_prime / beam.detector_t / expected;
        assert!((ratio - 1.0).abs() < 1e-6, "ratio = {ratio}");
    }

    #[test]
    fn sqm_matched_angles() {
        // theta_p = theta_G gives (sigma_G'/T)^2 = theta_p^2 / 2.
        let sigma_p = 1.0;
        let beam = default_beam(1.0); // W/A = 0.01 = sigma_p/p0
        assert_abs_diff_eq!(beam.theta_p(sigma_p), beam.theta_g(), epsilon = 1e-15);
        let result = sqm_gate(&beam, sigma_p);
        let lhs = (result.sigma_g_prime / beam.detector_t).powi(2);
        let rhs = beam.theta_p(sigma_p).powi(2) / 2.0;
        assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-12);
    }

    #[test]
    fn rescale_unit_case() {
        // sigma = A = W = m = 1: D = 5, sigma*^2 = 0.6, tau* = 0.2.
        let r = tqm_gate_rescale(1.0, 1.0, 1.0, 1.0);
        assert_abs_diff_eq!(r.determinant, 5.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.sigma_star_sq, 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(r.tau_star, 0.2, epsilon = 1e-15);
        assert!(r.gate_residual(1.0, 1.0, 1.0, 1.0) < 1e-12);
    }

    #[test]
    fn rescale_wide_gate_limit() {
        let (sigma, a, m) = (1.0, 10.0, 1.0);
        let r = tqm_gate_rescale(sigma, a, 100.0 * sigma, m);
        assert!((r.sigma_star_sq.sqrt() - sigma).abs() / sigma < 0.01);
        assert!((r.tau_star - a).abs() / a < 0.01);
    }

    #[test]
    fn rescale_narrow_gate_limit() {
        let (sigma, a, m) = (1.0, 10.0, 1.0);
        let w = 0.01 * sigma;
        let r = tqm_gate_rescale(sigma, a, w, m);
        assert!((r.sigma_star_sq.sqrt() - w).abs() / w < 0.01);
        assert!(r.tau_star < 0.01 * a);
    }

    #[test]
    fn rescale_residual_across_a_sweep() {
        for k in 0..50 {
            let w = 10.0_f64.powf(-3.0 + 5.0 * k as f64 / 49.0);
            let r = tqm_gate_rescale(1.0, 7.0, w, 2.0);
            assert!(
                r.gate_residual(1.0, 7.0, w, 2.0) < 1e-12,
                "w = {w}: residual {}",
                r.gate_residual(1.0, 7.0, w, 2.0)
            );
        }
    }

    #[test]
    fn post_gate_wide_gate_passes_through() {
        let packet = AxisPacket::time(0.0, 1.0, 1.0, 1.0).unwrap();
        let gate = GateSpec::new(1.0, 10.0, 1e6).unwrap();
        let post = tqm_post_gate_packet(&packet, &gate).unwrap();
        assert!((post.packet.sigma - packet.sigma).abs() < 1e-10);
        assert!((post.tau_offset - gate.center_a).abs() < 1e-9);
        assert!(post.warnings.is_empty());
    }

    #[test]
    fn post_gate_narrow_gate_sets_the_energy_width() {
        let packet = AxisPacket::time(0.0, 1.0, 1.0, 1.0).unwrap();
        let w = packet.sigma / 100.0;
        let gate = GateSpec::new(1.0, 10.0, w).unwrap();
        let post = tqm_post_gate_packet(&packet, &gate).unwrap();
        let sigma_e = post.packet.momentum_sigma();
        assert!((sigma_e - 1.0 / w).abs() / (1.0 / w) < 0.01, "sigma_E = {sigma_e}");
    }

    #[test]
    fn post_gate_flags_relativistic_carriers() {
        let packet = AxisPacket::time(0.0, 2.0, 1.0, 1.0).unwrap();
        let gate = GateSpec::new(1.0, 10.0, 1.0).unwrap();
        let post = tqm_post_gate_packet(&packet, &gate).unwrap();
        assert!(matches!(
            post.warnings[0],
            GateWarning::RelativisticInput { .. }
        ));
    }

    #[test]
    fn tqm_wide_gate_matches_the_no_gate_arrival_width() {
        let (v, sigma_x, m, t) = (0.1, 1.0, 1000.0, 200.0);
        let wide = tqm_gate_delta_tau(1e9, v, sigma_x, m, t);
        let expected = t / (m * v * sigma_x) / 2.0_f64.sqrt();
        assert!((wide - expected).abs() / expected < 1e-12);
    }

    #[test]
    fn tqm_narrow_gate_scaling() {
        // Halving W doubles delta tau in the narrow-gate regime.
        let (v, sigma_x, m, t) = (0.1, 1.0, 1000.0, 200.0);
        let d1 = tqm_gate_delta_tau(1e-4, v, sigma_x, m, t);
        let d2 = tqm_gate_delta_tau(5e-5, v, sigma_x, m, t);
        assert!((d2 / d1 - 2.0).abs() < 0.01, "ratio = {}", d2 / d1);
    }

    #[test]
    fn sweep_monotonicity() {
        let widths: Vec<f64> = (0..50)
            .map(|k| 10.0_f64.powf(-3.0 + 5.0 * k as f64 / 49.0))
            .collect();
        let rows = gate_width_sweep(100.0, 1000.0, 1.0, 100.0, 200.0, &widths).unwrap();
        for pair in rows.windows(2) {
            assert!(pair[1].delta_tau_sqm >= pair[0].delta_tau_sqm - 1e-15);
            assert!(pair[1].delta_tau_tqm <= pair[0].delta_tau_tqm + 1e-15);
        }
    }

    #[test]
    fn double_gate_requires_separation() {
        let gate1 = GateSpec::new(1.0, 10.0, 1.0).unwrap();
        let gate2 = GateSpec::new(1.0, 12.0, 1.0).unwrap();
        let gates = DoubleGate {
            gate1,
            gate2,
            amp1: 1.0,
            amp2: 1.0,
        };
        let packet = AxisPacket::time(0.0, 1.0, 1.0, 1.0).unwrap();
        let grid = quad::linspace(-5.0, 7.0, 100);
        assert!(matches!(
            double_gate_density_tqm(&packet, &gates, &grid),
            Err(GateError::GateOverlap { .. })
        ));
    }

    #[test]
    fn single_gate_density_has_no_fringes() {
        let gate1 = GateSpec::new(1.0, 10.0, 0.5).unwrap();
        let gate2 = GateSpec::new(1.0, 30.0, 0.5).unwrap();
        let gates = DoubleGate {
            gate1,
            gate2,
            amp1: 1.0,
            amp2: 0.0,
        };
        let packet = AxisPacket::time(0.0, 1.0, 1.0, 1.0).unwrap();
        let grid = quad::linspace(-6.0, 8.0, 4001);
        let result = double_gate_density_tqm(&packet, &gates, &grid).unwrap();
        assert!(result.fringe_spacing.is_none());
    }
}
