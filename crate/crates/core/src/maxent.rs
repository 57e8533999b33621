//! Maximum-entropy estimate of the time/energy part of an initial wave
//! function from its space/momentum part, plus the bound-state and
//! characteristic-scale estimates.

use crate::packets::{AxisKind, AxisPacket, PacketError};
use crate::units;
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MaxentError {
    #[error("constraint requires a positive energy width, got {0}")]
    InvalidConstraint(f64),
    #[error("bound-state estimate requires E_n < 0, got {0}")]
    NotBound(f64),
    #[error(transparent)]
    Packet(#[from] PacketError),
}

/// Gaussian energy density fixed by the norm, mean, and second-moment
/// constraints; the entropy maximizer for those constraints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxentDensity {
    pub mean_energy: f64,
    pub delta_e: f64,
}

impl MaxentDensity {
    pub fn evaluate(&self, energy: f64) -> f64 {
        let z = (energy - self.mean_energy) / self.delta_e;
        (-0.5 * z * z).exp() / (self.delta_e * (2.0 * std::f64::consts::PI).sqrt())
    }
}

/// `rho(E) = exp(-(E - mean)^2 / 2 dE^2) / sqrt(2 pi dE^2)`.
pub fn maxent_energy_density(mean_e: f64, delta_e: f64) -> Result<MaxentDensity, MaxentError> {
    if !(delta_e > 0.0 && delta_e.is_finite()) {
        return Err(MaxentError::InvalidConstraint(delta_e));
    }
    Ok(MaxentDensity {
        mean_energy: mean_e,
        delta_e,
    })
}

/// Mean energy, energy width, and the reciprocal time width inferred for the
/// time axis.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct EnergyEstimate {
    pub mean_energy: f64,
    pub sigma_e: f64,
    pub sigma_t: f64,
}

/// Estimate the time-axis packet from the three space-axis packets: carrier
/// on-shell from the mean momentum, energy variance equal to the summed
/// momentum variances, center at t0 = 0 (rest-frame estimate).
pub fn estimate_time_axis(space_axes: &[AxisPacket; 3], mass: f64) -> Result<AxisPacket, MaxentError> {
    let p_sq: f64 = space_axes.iter().map(|a| a.carrier * a.carrier).sum();
    let e0 = (mass * mass + p_sq).sqrt();
    let sigma_e_sq: f64 = space_axes
        .iter()
        .map(|a| {
            let s = a.momentum_sigma();
            s * s
        })
        .sum();
    let sigma_e = sigma_e_sq.sqrt();
    Ok(AxisPacket::new(
        AxisKind::Time,
        0.0,
        e0,
        1.0 / sigma_e,
        mass,
    )?)
}

/// Energy estimate carried alongside the packet, for reporting.
pub fn energy_estimate(space_axes: &[AxisPacket; 3], mass: f64) -> Result<EnergyEstimate, MaxentError> {
    let packet = estimate_time_axis(space_axes, mass)?;
    Ok(EnergyEstimate {
        mean_energy: packet.carrier,
        sigma_e: packet.momentum_sigma(),
        sigma_t: packet.sigma,
    })
}

/// Virial-theorem estimate for a Coulomb bound state.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct BoundStateEstimate {
    /// Binding energy E_n in eV (negative).
    pub binding_energy: f64,
    /// Energy width `sqrt(-2 m E_n)` in eV.
    pub delta_e: f64,
    /// Time width hbar / delta_e in seconds.
    pub delta_t: f64,
}

/// `dE = sqrt(-2 m E_n)`, `dt = hbar / dE`; errors unless E_n < 0.
pub fn bound_state_estimate(mass_ev: f64, e_n_ev: f64) -> Result<BoundStateEstimate, MaxentError> {
    if !(e_n_ev < 0.0) {
        return Err(MaxentError::NotBound(e_n_ev));
    }
    let delta_e = (-2.0 * mass_ev * e_n_ev).sqrt();
    Ok(BoundStateEstimate {
        binding_energy: e_n_ev,
        delta_e,
        delta_t: units::HBAR_EV_S / delta_e,
    })
}

/// Light-crossing time of the Bohr radius, in seconds.
pub fn bohr_time_scale() -> f64 {
    units::BOHR_RADIUS_M / units::C_M_PER_S
}

/// Separable time factor `(2 pi)^{-1/2} exp(-i E_n t)` bolted onto an SQM
/// eigenfunction; technically a solution, physically a limit case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryTimeFactor {
    pub energy: f64,
}

pub fn stationary_time_factor(e_n: f64) -> StationaryTimeFactor {
    StationaryTimeFactor { energy: e_n }
}

impl StationaryTimeFactor {
    pub fn evaluate(&self, t: f64) -> Complex64 {
        Complex64::new(0.0, -self.energy * t).exp() / (2.0 * std::f64::consts::PI).sqrt()
    }
}

/// Clock-frequency scale `f = kinetic^2 / mass` and its period in seconds.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ClockFrequencyScale {
    pub f_ev: f64,
    pub time_scale_s: f64,
}

pub fn clock_frequency_scale(kinetic_ev: f64, mass_ev: f64) -> ClockFrequencyScale {
    let f_ev = kinetic_ev * kinetic_ev / mass_ev;
    ClockFrequencyScale {
        f_ev,
        time_scale_s: units::HBAR_EV_S / f_ev,
    }
}
