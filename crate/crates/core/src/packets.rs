//! Closed-form Gaussian test functions, plane waves, dispersion factors, and
//! the covariant four-dimensional packet.
//!
//! Sign conventions (fixed once, used everywhere):
//!
//! * time axis:  position carrier `exp(-i E0 (t - t0))`, clock phase
//!   `exp(+i E0^2 tau / 2m)`, dispersion factor `1 - i tau/(m sigma^2)`,
//!   momentum transform `psi_hat(E) = (2 pi)^{-1/2} int dt e^{+iEt} psi(t)`.
//! * space axis: all four signs flipped.
//!
//! The product of the four axis evolutions times `exp(+i m tau / 2)` is the
//! factorized four-dimensional packet ([`Packet4::evaluate`]). The solution of
//! the four-dimensional Schroedinger equation instead carries
//! [`rest_mass_phase`] = `exp(-i m tau / 2)`; only the split of the constant
//! clock phase differs, and every density, moment, and ratio used in tests is
//! independent of that split.

use num_complex::Complex64;
use thiserror::Error;

/// Which of the four axes a one-dimensional packet lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum AxisKind {
    /// Coordinate time t; carrier is an energy.
    Time,
    /// A space coordinate; carrier is a momentum component.
    Space,
}

impl AxisKind {
    /// +1 for space, -1 for time. Multiplies every convention-dependent sign.
    #[inline]
    pub fn sign(self) -> f64 {
        match self {
            AxisKind::Time => -1.0,
            AxisKind::Space => 1.0,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum PacketError {
    #[error("sigma must be positive and finite, got {0}")]
    InvalidSigma(f64),
    #[error("mass must be positive and finite, got {0}")]
    InvalidMass(f64),
    #[error("non-finite parameter {name}: {value}")]
    NonFinite { name: &'static str, value: f64 },
    #[error("all four axes of a Packet4 must share one mass")]
    MassMismatch,
    #[error("Packet4 axes must be (time, space, space, space)")]
    AxisKindMismatch,
}

/// One-dimensional Gaussian test function on a time-like or space-like axis.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AxisPacket {
    pub axis_kind: AxisKind,
    /// Center t0 or x0 at clock time zero.
    pub center: f64,
    /// Carrier E0 (time axis) or p0 (space axis).
    pub carrier: f64,
    /// Position-space dispersion sigma_t or sigma_x.
    pub sigma: f64,
    /// Rest mass m.
    pub mass: f64,
}

/// Complex dispersion factor `f_tau = 1 -/+ i tau / (m sigma^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionFactor(pub Complex64);

impl DispersionFactor {
    #[inline]
    pub fn value(self) -> Complex64 {
        self.0
    }
}

/// First two moments of the position-space density at fixed clock time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean: f64,
    pub uncertainty: f64,
}

impl AxisPacket {
    pub fn new(
        axis_kind: AxisKind,
        center: f64,
        carrier: f64,
        sigma: f64,
        mass: f64,
    ) -> Result<Self, PacketError> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(PacketError::InvalidSigma(sigma));
        }
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(PacketError::InvalidMass(mass));
        }
        for (name, value) in [("center", center), ("carrier", carrier)] {
            if !value.is_finite() {
                return Err(PacketError::NonFinite { name, value });
            }
        }
        Ok(Self {
            axis_kind,
            center,
            carrier,
            sigma,
            mass,
        })
    }

    pub fn time(center: f64, carrier: f64, sigma: f64, mass: f64) -> Result<Self, PacketError> {
        Self::new(AxisKind::Time, center, carrier, sigma, mass)
    }

    pub fn space(center: f64, carrier: f64, sigma: f64, mass: f64) -> Result<Self, PacketError> {
        Self::new(AxisKind::Space, center, carrier, sigma, mass)
    }

    /// Momentum-space dispersion; exact reciprocal of the position dispersion.
    #[inline]
    pub fn momentum_sigma(&self) -> f64 {
        1.0 / self.sigma
    }

    /// `f_tau = 1 + sign * i tau / (m sigma^2)`; sign is -1 on the time axis.
    pub fn dispersion_factor(&self, tau: f64) -> DispersionFactor {
        let im = self.axis_kind.sign() * tau / (self.mass * self.sigma * self.sigma);
        DispersionFactor(Complex64::new(1.0, im))
    }

    /// Drifted packet center `center + (carrier/m) tau`.
    #[inline]
    pub fn drifted_center(&self, tau: f64) -> f64 {
        self.center + self.carrier / self.mass * tau
    }

    /// Closed-form position-space amplitude at clock time `tau`.
    pub fn evaluate_position(&self, tau: f64, coord: f64) -> Complex64 {
        let s = self.axis_kind.sign();
        let f = self.dispersion_factor(tau).value();
        let sigma_sq = self.sigma * self.sigma;
        let norm = (1.0 / (std::f64::consts::PI * sigma_sq)).powf(0.25) * (1.0 / f).sqrt();
        let carrier_phase = Complex64::new(0.0, s * self.carrier * (coord - self.center));
        let clock_phase = Complex64::new(
            0.0,
            -s * self.carrier * self.carrier / (2.0 * self.mass) * tau,
        );
        let dx = coord - self.drifted_center(tau);
        let gauss = -(dx * dx) / (2.0 * sigma_sq * f);
        norm * (carrier_phase + clock_phase + gauss).exp()
    }

    /// Closed-form momentum-space amplitude at clock time `tau`.
    pub fn evaluate_momentum(&self, tau: f64, k: f64) -> Complex64 {
        let s = self.axis_kind.sign();
        let sig_k = self.momentum_sigma();
        let norm = (1.0 / (std::f64::consts::PI * sig_k * sig_k)).powf(0.25);
        let dk = k - self.carrier;
        let center_phase = -s * k * self.center;
        let clock_phase = -s * k * k / (2.0 * self.mass) * tau;
        let gauss = -(dk * dk) / (2.0 * sig_k * sig_k);
        norm * Complex64::new(gauss, center_phase + clock_phase).exp()
    }

    /// Mean and uncertainty of the position density at clock time `tau`.
    pub fn moments(&self, tau: f64) -> Moments {
        let sigma_sq = self.sigma * self.sigma;
        let spread = tau / (self.mass * sigma_sq);
        let var = 0.5 * sigma_sq * (1.0 + spread * spread).abs();
        Moments {
            mean: self.drifted_center(tau),
            uncertainty: var.sqrt(),
        }
    }
}

/// Four-momentum (E, px, py, pz).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PlaneWave {
    pub four_momentum: [f64; 4],
}

impl PlaneWave {
    pub fn new(four_momentum: [f64; 4]) -> Result<Self, PacketError> {
        for value in four_momentum {
            if !value.is_finite() {
                return Err(PacketError::NonFinite {
                    name: "four_momentum",
                    value,
                });
            }
        }
        Ok(Self { four_momentum })
    }

    #[inline]
    pub fn energy(&self) -> f64 {
        self.four_momentum[0]
    }

    #[inline]
    pub fn momentum_sq(&self) -> f64 {
        let [_, px, py, pz] = self.four_momentum;
        px * px + py * py + pz * pz
    }

    /// Minkowski square E^2 - p.p.
    #[inline]
    pub fn mass_sq(&self) -> f64 {
        self.energy() * self.energy() - self.momentum_sq()
    }
}

/// Clock frequency `f_p = -(E^2 - p.p - m^2) / 2m`; zero on-shell.
pub fn clock_frequency(p: &PlaneWave, mass: f64) -> f64 {
    -(p.mass_sq() - mass * mass) / (2.0 * mass)
}

/// Rest-mass clock phase `exp(-i m tau / 2)`.
///
/// Completes a product of per-axis evolutions into the solution of the full
/// four-dimensional equation; the momentum kernel `exp(-i f_p tau)` contains
/// exactly this factor on top of the axis phases.
pub fn rest_mass_phase(mass: f64, tau: f64) -> Complex64 {
    Complex64::new(0.0, -0.5 * mass * tau).exp()
}

/// Closed-form solution of the free reduced equation over any subset of axes:
/// product of the axis evolutions times [`rest_mass_phase`]. This is the
/// reference the grid propagator is checked against, since the grid equation
/// carries the `-m^2` term for every axis count.
pub fn free_full_solution(axes: &[AxisPacket], tau: f64, point: &[f64]) -> Complex64 {
    debug_assert_eq!(axes.len(), point.len());
    let product: Complex64 = axes
        .iter()
        .zip(point)
        .map(|(axis, &coord)| axis.evaluate_position(tau, coord))
        .product();
    product * rest_mass_phase(axes[0].mass, tau)
}

/// Product/covariant Gaussian over all four axes with a diagonal dispersion
/// matrix.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Packet4 {
    /// Axes in (t, x, y, z) order.
    pub axes: [AxisPacket; 4],
}

impl Packet4 {
    pub fn new(axes: [AxisPacket; 4]) -> Result<Self, PacketError> {
        let mass = axes[0].mass;
        if axes.iter().any(|a| a.mass != mass) {
            return Err(PacketError::MassMismatch);
        }
        let kinds_ok = axes[0].axis_kind == AxisKind::Time
            && axes[1..].iter().all(|a| a.axis_kind == AxisKind::Space);
        if !kinds_ok {
            return Err(PacketError::AxisKindMismatch);
        }
        Ok(Self { axes })
    }

    #[inline]
    pub fn mass(&self) -> f64 {
        self.axes[0].mass
    }

    /// Carrier four-momentum (E0, p0).
    pub fn carrier(&self) -> PlaneWave {
        PlaneWave {
            four_momentum: [
                self.axes[0].carrier,
                self.axes[1].carrier,
                self.axes[2].carrier,
                self.axes[3].carrier,
            ],
        }
    }

    /// Determinant of the clock-time-zero dispersion matrix,
    /// `sigma_t^2 sigma_x^2 sigma_y^2 sigma_z^2`.
    pub fn sigma0_det(&self) -> f64 {
        self.axes.iter().map(|a| a.sigma * a.sigma).product()
    }

    /// Factorized form: product of the four axis evaluations times
    /// `exp(+i m tau / 2)`.
    pub fn evaluate(&self, tau: f64, point: [f64; 4]) -> Complex64 {
        let product: Complex64 = self
            .axes
            .iter()
            .zip(point)
            .map(|(axis, coord)| axis.evaluate_position(tau, coord))
            .product();
        product * Complex64::new(0.0, 0.5 * self.mass() * tau).exp()
    }

    /// Covariant form: normalization from det(Sigma_0)/det^2(Sigma_tau),
    /// carrier `-i p0.(x - x0)`, quadratic form through the inverse of the
    /// complex dispersion matrix, clock phase `-i f0 tau + i m tau`.
    ///
    /// Evaluates the same number as [`Packet4::evaluate`] through independent
    /// matrix algebra. Branches of the quartic root are fixed entry by entry
    /// (each diagonal entry of Sigma_tau has argument in (-pi/2, pi/2)).
    pub fn evaluate_covariant(&self, tau: f64, point: [f64; 4]) -> Complex64 {
        let mass = self.mass();
        // log of det(Sigma_0) / (pi^4 det^2(Sigma_tau)), accumulated entrywise.
        let mut log_ratio = Complex64::new(-4.0 * std::f64::consts::PI.ln(), 0.0);
        for axis in &self.axes {
            let sigma_sq = axis.sigma * axis.sigma;
            let entry = axis.dispersion_factor(tau).value() * sigma_sq;
            log_ratio += Complex64::new(sigma_sq.ln(), 0.0) - 2.0 * entry.ln();
        }
        let prefactor = (0.25 * log_ratio).exp();

        // Carrier: -i p0^mu (x - x0)_mu with metric (+,-,-,-).
        let carrier = self.carrier().four_momentum;
        let mut minkowski_dot = carrier[0] * (point[0] - self.axes[0].center);
        for j in 1..4 {
            minkowski_dot -= carrier[j] * (point[j] - self.axes[j].center);
        }

        // Quadratic form through Sigma_tau^{-1}, center drifted by v = p/m.
        let mut quad = Complex64::new(0.0, 0.0);
        for (axis, coord) in self.axes.iter().zip(point) {
            let entry = axis.dispersion_factor(tau).value() * axis.sigma * axis.sigma;
            let dx = coord - axis.drifted_center(tau);
            quad += Complex64::new(dx * dx, 0.0) / entry;
        }

        let f0 = clock_frequency(&self.carrier(), mass);
        let clock = -f0 * tau + mass * tau;

        prefactor * (Complex64::new(0.0, -minkowski_dot + clock) - 0.5 * quad).exp()
    }
}
