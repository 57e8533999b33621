//! Time-of-arrival densities and uncertainties at a fixed detector position,
//! for both theories, with the Muga-Leavens operator density as the
//! independent oracle.
//!
//! `delta_tau` always denotes the standard deviation of the arrival density.
//! For the Gaussian closed forms this equals `sigma / sqrt(2)` where `sigma`
//! is the density's dispersion parameter; both numbers are exposed.

use crate::grid::{
    grid_propagate, AxisGrid, GridError, GridWave, Propagator, ScalarPotential, TimeAxisSign,
};
use crate::packets::AxisPacket;
use crate::quad;
use num_complex::Complex64;
use thiserror::Error;

/// Validity threshold for the paraxial treatment: `p0 / sigma_p >= 10`.
pub const PARAXIAL_MIN_RATIO: f64 = 10.0;

#[derive(Debug, Error)]
pub enum ToaError {
    #[error("detector velocity must be positive, got {0}")]
    BadVelocity(f64),
    #[error("density needs at least two samples")]
    TooFewSamples,
    #[error("density has negative entries (min {0})")]
    NegativeDensity(f64),
    #[error("density integrates to zero")]
    ZeroNorm,
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Non-fatal validity notices.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub enum ToaWarning {
    /// Beam focus `p0 / sigma_p` below [`PARAXIAL_MIN_RATIO`].
    ParaxialViolation { ratio: f64 },
    /// Weight of the wave function at negative momentum exceeds 1e-6.
    NegativeMomentumMass { mass: f64 },
}

/// Detector at `x = L` for a beam of the given mass and mean velocity.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct DetectorSpec {
    pub position_l: f64,
    pub mass: f64,
    pub velocity: f64,
}

impl DetectorSpec {
    pub fn new(position_l: f64, mass: f64, velocity: f64) -> Result<Self, ToaError> {
        if !(velocity > 0.0 && velocity.is_finite()) {
            return Err(ToaError::BadVelocity(velocity));
        }
        Ok(Self {
            position_l,
            mass,
            velocity,
        })
    }

    /// Detector matched to a space packet: `v = p0 / m`.
    pub fn for_packet(packet: &AxisPacket, position_l: f64) -> Result<Self, ToaError> {
        Self::new(position_l, packet.mass, packet.carrier / packet.mass)
    }

    /// Mean arrival clock time `m L / p0`.
    pub fn mean_arrival(&self) -> f64 {
        self.position_l / self.velocity
    }
}

/// Sampled probability density over arrival clock time; normalized and
/// non-negative by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionDensity {
    tau: Vec<f64>,
    rho: Vec<f64>,
}

impl DetectionDensity {
    /// Normalizes the samples; rejects negative values and empty input.
    pub fn new(tau: Vec<f64>, rho: Vec<f64>) -> Result<Self, ToaError> {
        if tau.len() < 2 || tau.len() != rho.len() {
            return Err(ToaError::TooFewSamples);
        }
        let min = rho.iter().cloned().fold(f64::INFINITY, f64::min);
        if min < -1e-14 {
            return Err(ToaError::NegativeDensity(min));
        }
        let mut rho: Vec<f64> = rho.iter().map(|&r| r.max(0.0)).collect();
        let dx = tau[1] - tau[0];
        let norm = quad::trapezoid(&rho, dx);
        if !(norm > 0.0) {
            return Err(ToaError::ZeroNorm);
        }
        for r in &mut rho {
            *r /= norm;
        }
        Ok(Self { tau, rho })
    }

    pub fn tau_samples(&self) -> &[f64] {
        &self.tau
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    pub fn norm(&self) -> f64 {
        quad::trapezoid(&self.rho, self.tau[1] - self.tau[0])
    }

    pub fn mean(&self) -> f64 {
        quad::density_moments(&self.tau, &self.rho).0
    }

    /// Standard deviation of the density.
    pub fn std_dev(&self) -> f64 {
        quad::density_moments(&self.tau, &self.rho).1
    }

    /// L1 distance to another density on the same grid.
    pub fn l1_distance(&self, other: &DetectionDensity) -> f64 {
        assert_eq!(self.tau.len(), other.tau.len());
        let diff: Vec<f64> = self
            .rho
            .iter()
            .zip(&other.rho)
            .map(|(a, b)| (a - b).abs())
            .collect();
        quad::trapezoid(&diff, self.tau[1] - self.tau[0])
    }
}

/// Mean and standard deviation of a detection density, by quadrature.
pub fn density_stats(d: &DetectionDensity) -> (f64, f64) {
    (d.mean(), d.std_dev())
}

/// Closed-form arrival statistics.
#[derive(Debug, Clone)]
pub struct ToaResult {
    pub density: DetectionDensity,
    pub mean: f64,
    /// Space contribution `tau_bar / (m v sigma_x)`.
    pub sigma_bar: f64,
    /// Time contribution `tau_bar / (m sigma_t)`; zero on the SQM side.
    pub sigma_tilde: f64,
    /// Combined dispersion `sqrt(sigma_tilde^2 + sigma_bar^2)`.
    pub sigma_total: f64,
    /// `sigma_total / sqrt(2)`; the standard deviation of the density.
    pub delta_tau: f64,
    pub warnings: Vec<ToaWarning>,
}

fn gaussian_density(center: f64, sigma: f64, half_width: f64, count: usize) -> DetectionDensity {
    let tau = quad::linspace(center - half_width, center + half_width, count);
    let rho: Vec<f64> = tau
        .iter()
        .map(|&t| {
            let z = (t - center) / sigma;
            (-z * z).exp() / (std::f64::consts::PI.sqrt() * sigma)
        })
        .collect();
    DetectionDensity::new(tau, rho).expect("gaussian density is valid")
}

fn paraxial_warning(space_packet: &AxisPacket) -> Option<ToaWarning> {
    let ratio = space_packet.carrier * space_packet.sigma; // p0 / sigma_p
    (ratio < PARAXIAL_MIN_RATIO).then_some(ToaWarning::ParaxialViolation { ratio })
}

/// SQM closed form: Gaussian in arrival time with dispersion
/// `sigma_bar = tau_bar / (m v sigma_x)`.
pub fn toa_sqm(space_packet: &AxisPacket, det: &DetectorSpec) -> ToaResult {
    let tau_bar = det.mean_arrival();
    let sigma_bar = tau_bar / (det.mass * det.velocity * space_packet.sigma);
    let density = gaussian_density(tau_bar, sigma_bar, 8.0 * sigma_bar, 1601);
    ToaResult {
        density,
        mean: tau_bar,
        sigma_bar,
        sigma_tilde: 0.0,
        sigma_total: sigma_bar,
        delta_tau: sigma_bar / 2.0_f64.sqrt(),
        warnings: paraxial_warning(space_packet).into_iter().collect(),
    }
}

/// TQM closed form: the time-axis dispersion `sigma_tilde = tau_bar / (m
/// sigma_t)` adds in quadrature to the SQM contribution.
pub fn toa_tqm(
    time_packet: &AxisPacket,
    space_packet: &AxisPacket,
    det: &DetectorSpec,
) -> ToaResult {
    let tau_bar = det.mean_arrival();
    let sigma_bar = tau_bar / (det.mass * det.velocity * space_packet.sigma);
    let sigma_tilde = tau_bar / (det.mass * time_packet.sigma);
    let sigma_total = (sigma_tilde * sigma_tilde + sigma_bar * sigma_bar).sqrt();
    let density = gaussian_density(tau_bar, sigma_total, 8.0 * sigma_total, 1601);
    ToaResult {
        density,
        mean: tau_bar,
        sigma_bar,
        sigma_tilde,
        sigma_total,
        delta_tau: sigma_total / 2.0_f64.sqrt(),
        warnings: paraxial_warning(space_packet).into_iter().collect(),
    }
}

/// Muga-Leavens operator density, evaluated numerically from a sampled
/// momentum-space wave function: both momentum branches with the
/// `sqrt(|p|/m)` weight. Serves as the oracle for the closed forms.
pub fn toa_muga_leavens(
    p_grid: &[f64],
    phi: &[Complex64],
    det: &DetectorSpec,
    tau_grid: &[f64],
) -> Result<(DetectionDensity, Vec<ToaWarning>), ToaError> {
    assert_eq!(p_grid.len(), phi.len());
    let dp = p_grid[1] - p_grid[0];
    let m = det.mass;
    let l = det.position_l;

    let negative_mass: f64 = p_grid
        .iter()
        .zip(phi)
        .filter(|(&p, _)| p < 0.0)
        .map(|(_, v)| v.norm_sqr())
        .sum::<f64>()
        * dp;
    let warnings = (negative_mass > 1e-6)
        .then_some(ToaWarning::NegativeMomentumMass {
            mass: negative_mass,
        })
        .into_iter()
        .collect();

    let rho: Vec<f64> = tau_grid
        .iter()
        .map(|&tau| {
            let mut plus = Complex64::new(0.0, 0.0);
            let mut minus = Complex64::new(0.0, 0.0);
            for (&p, &v) in p_grid.iter().zip(phi) {
                let kinetic = Complex64::new(0.0, -p * p / (2.0 * m) * tau).exp();
                if p > 0.0 {
                    let w = (p / m).sqrt();
                    plus += w * kinetic * v * Complex64::new(0.0, p * l).exp();
                } else if p < 0.0 {
                    let w = (-p / m).sqrt();
                    minus += w * kinetic * v * Complex64::new(0.0, -p * l).exp();
                }
            }
            (plus * dp).norm_sqr() + (minus * dp).norm_sqr()
        })
        .collect();

    Ok((DetectionDensity::new(tau_grid.to_vec(), rho)?, warnings))
}

/// Grid-oracle arrival experiment.
///
/// A detector at `x = L` stamps each click with the laboratory time, and the
/// wave's position in coordinate time is the stamp: the recorded density is
/// the accumulation of `|psi_tau(t, L)|^2` over the clock sweep,
/// `rho(t) = int dtau |psi_tau(t, L)|^2`, up to the constant flux factor
/// that drops out in normalization. Returns the density over the stamp `t`.
///
/// The initial state is a product and the free split-step propagator is
/// separable, so the 1+1D evolution factorizes exactly (the 2D FFT of a
/// product is the product of the 1D FFTs and the kinetic phases add);
/// each factor is propagated on its own grid and the click integrand is
/// their product at `x = L`.
pub fn toa_grid_click_density(
    time_packet: &AxisPacket,
    space_packet: &AxisPacket,
    det: &DetectorSpec,
    axes: (AxisGrid, AxisGrid),
    tau_window: (f64, f64),
    n_tau: usize,
) -> Result<DetectionDensity, ToaError> {
    let mass = det.mass;
    let (t_axis, x_axis) = axes;
    let wave_t = GridWave::sample_packets(vec![t_axis], &[*time_packet])?;
    let wave_x = GridWave::sample_packets(vec![x_axis], &[*space_packet])?;
    let x_index = x_axis.nearest_index(det.position_l);
    let n_t = t_axis.count;

    let (tau_min, tau_max) = tau_window;
    let free = ScalarPotential::free();
    let at_window_t = grid_propagate(&wave_t, mass, 0.0, &free, tau_min, 2)?;
    let at_window_x = grid_propagate(&wave_x, mass, 0.0, &free, tau_min, 2)?;

    // Step the two factors in lockstep, trapezoid-accumulating the click
    // integrand |psi_t(t_i)|^2 |psi_x(L)|^2.
    let dtau = (tau_max - tau_min) / n_tau as f64;
    let prop_t = Propagator::new(&at_window_t, mass, 0.0, &free, dtau, TimeAxisSign::Physical)?;
    let prop_x = Propagator::new(&at_window_x, mass, 0.0, &free, dtau, TimeAxisSign::Physical)?;
    let mut values_t = at_window_t.values().to_vec();
    let mut values_x = at_window_x.values().to_vec();
    let mut rho = vec![0.0; n_t];
    for step in 0..=n_tau {
        if step > 0 {
            prop_t.step(&mut values_t);
            prop_x.step(&mut values_x);
        }
        let weight = if step == 0 || step == n_tau { 0.5 } else { 1.0 };
        let gate_weight = weight * values_x[x_index].norm_sqr();
        for (r, v) in rho.iter_mut().zip(&values_t) {
            *r += gate_weight * v.norm_sqr();
        }
    }
    DetectionDensity::new(t_axis.points(), rho)
}
