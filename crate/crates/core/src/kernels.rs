//! Free propagators in momentum and coordinate space, the SQM comparison
//! phases, and the normalized single-step path-integral kernel.

use crate::packets::{clock_frequency, AxisKind, AxisPacket, PlaneWave};
use crate::quad;
use num_complex::Complex64;
use thiserror::Error;

/// Which theory a kernel belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum KernelFlavor {
    Sqm,
    Tqm,
}

/// Kernel selector; `expansion_order` counts the kinetic terms kept in the
/// omega_k series on the SQM side (0: rest mass, 1: + k^2/2m, 2: - k^4/8m^3).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    pub flavor: KernelFlavor,
    pub mass: f64,
    pub expansion_order: u8,
}

impl KernelSpec {
    pub fn sqm(mass: f64, expansion_order: u8) -> Self {
        Self {
            flavor: KernelFlavor::Sqm,
            mass,
            expansion_order: expansion_order.min(2),
        }
    }

    pub fn tqm(mass: f64) -> Self {
        Self {
            flavor: KernelFlavor::Tqm,
            mass,
            expansion_order: 0,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum KernelError {
    #[error("step grid resolves the stationary-phase width {width:.3e} with only {points:.1} points (need >= 16)")]
    UnderResolved { width: f64, points: f64 },
    #[error("step grid [{min}, {max}] does not contain the packet bulk")]
    GridTooNarrow { min: f64, max: f64 },
}

/// Momentum-space propagator `exp(-i f_p tau)`; the delta function is
/// implicit, application is pointwise multiplication.
pub fn tqm_kernel_momentum(p: &PlaneWave, tau: f64, mass: f64) -> Complex64 {
    Complex64::new(0.0, -clock_frequency(p, mass) * tau).exp()
}

/// One-dimensional coordinate kernel factor for a single axis.
///
/// Time axis: `sqrt(i m / 2 pi tau) exp(-i m d^2 / 2 tau)`; space axis has
/// both signs flipped. Valid for `tau > 0`.
pub fn coordinate_kernel_axis(kind: AxisKind, delta: f64, tau: f64, mass: f64) -> Complex64 {
    let s = kind.sign();
    let prefactor = Complex64::new(0.0, -s * mass / (2.0 * std::f64::consts::PI * tau)).sqrt();
    prefactor * Complex64::new(0.0, s * mass * delta * delta / (2.0 * tau)).exp()
}

/// Retarded four-dimensional coordinate kernel
/// `-i m^2/(4 pi^2 tau^2) exp(-i m dt^2/2tau + i m dx^2/2tau - i m tau/2)`,
/// zero for `tau <= 0`.
pub fn tqm_kernel_coordinate(x1: [f64; 4], x0: [f64; 4], tau: f64, mass: f64) -> Complex64 {
    if tau <= 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let dt = x1[0] - x0[0];
    let dr_sq: f64 = (1..4).map(|j| (x1[j] - x0[j]) * (x1[j] - x0[j])).sum();
    let amplitude = mass * mass / (4.0 * std::f64::consts::PI.powi(2) * tau * tau);
    let phase = mass * (-dt * dt + dr_sq) / (2.0 * tau) - 0.5 * mass * tau;
    Complex64::new(0.0, -amplitude) * Complex64::new(0.0, phase).exp()
}

/// SQM evolution phase `exp(-i omega_approx(k) tau)` with the kinetic series
/// truncated per `spec.expansion_order`.
pub fn sqm_relativistic_phase(k: [f64; 3], tau: f64, spec: &KernelSpec) -> Complex64 {
    debug_assert_eq!(spec.flavor, KernelFlavor::Sqm);
    let m = spec.mass;
    let k_sq = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    let mut omega = m;
    if spec.expansion_order >= 1 {
        omega += k_sq / (2.0 * m);
    }
    if spec.expansion_order >= 2 {
        omega -= k_sq * k_sq / (8.0 * m * m * m);
    }
    Complex64::new(0.0, -omega * tau).exp()
}

/// Exact relativistic frequency `sqrt(m^2 + k^2)` for series comparisons.
pub fn sqm_omega_exact(k: [f64; 3], mass: f64) -> f64 {
    let k_sq = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    (mass * mass + k_sq).sqrt()
}

/// Well-focused amplitude prefactor `1/sqrt(2 omega_{k0})` used on the SQM
/// comparison path.
pub fn sqm_focus_prefactor(k0: [f64; 3], mass: f64) -> f64 {
    1.0 / (2.0 * sqm_omega_exact(k0, mass)).sqrt()
}

/// Samples of a wave function on a uniform one-dimensional grid, the output
/// of the discrete single-step kernel.
#[derive(Debug, Clone)]
pub struct SteppedWave {
    pub axis_kind: AxisKind,
    pub coords: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl SteppedWave {
    pub fn dx(&self) -> f64 {
        self.coords[1] - self.coords[0]
    }

    pub fn norm(&self) -> f64 {
        let density: Vec<f64> = self.values.iter().map(|v| v.norm_sqr()).collect();
        quad::trapezoid(&density, self.dx())
    }
}

/// Uniform grid for the single-step quadrature: centered on the packet,
/// covering its bulk plus the one-step drift, resolving carrier oscillations
/// and the kernel's stationary-phase width.
pub fn suggested_step_grid(packet: &AxisPacket, eps: f64, steps: usize) -> (f64, f64, usize) {
    let drift = packet.carrier.abs() / packet.mass * eps * steps as f64 + 1.0;
    let spread = packet.moments(eps * steps as f64).uncertainty * 2.0;
    let half = 8.0 * packet.sigma + drift + spread;
    let stationary = (2.0 * std::f64::consts::PI * eps / packet.mass).sqrt();
    let carrier_wavelength = if packet.carrier.abs() > 1e-12 {
        2.0 * std::f64::consts::PI / packet.carrier.abs()
    } else {
        f64::INFINITY
    };
    let h = (stationary / 24.0)
        .min(carrier_wavelength / 24.0)
        .min(packet.sigma / 24.0);
    let count = (2.0 * half / h).ceil() as usize + 1;
    let count = if count % 2 == 0 { count + 1 } else { count };
    (packet.center - half, packet.center + half, count)
}

/// One normalized discrete kernel step of length `eps`, by direct quadrature
/// of `sqrt(-s i m / 2 pi eps) exp(s i m (u - u')^2 / 2 eps)` against the
/// packet. The normalization makes the output norm 1 by construction.
pub fn single_step_propagate(
    packet: &AxisPacket,
    eps: f64,
    grid: (f64, f64, usize),
) -> Result<SteppedWave, KernelError> {
    let (min, max, count) = grid;
    let coords = quad::linspace(min, max, count);
    let h = coords[1] - coords[0];
    let stationary = (2.0 * std::f64::consts::PI * eps / packet.mass).sqrt();
    if stationary / h < 16.0 {
        return Err(KernelError::UnderResolved {
            width: stationary,
            points: stationary / h,
        });
    }
    if packet.center - 6.0 * packet.sigma < min || packet.center + 6.0 * packet.sigma > max {
        return Err(KernelError::GridTooNarrow { min, max });
    }
    let initial: Vec<Complex64> = coords
        .iter()
        .map(|&u| packet.evaluate_position(0.0, u))
        .collect();
    let values = apply_step_kernel(packet.axis_kind, &coords, &initial, eps, packet.mass);
    Ok(SteppedWave {
        axis_kind: packet.axis_kind,
        coords,
        values,
    })
}

/// Apply one normalized kernel step to already-sampled values (for composing
/// N steps).
pub fn apply_step_kernel(
    kind: AxisKind,
    coords: &[f64],
    values: &[Complex64],
    eps: f64,
    mass: f64,
) -> Vec<Complex64> {
    let h = coords[1] - coords[0];
    coords
        .iter()
        .map(|&u1| {
            let integrand: Vec<Complex64> = coords
                .iter()
                .zip(values)
                .map(|(&u0, &v)| coordinate_kernel_axis(kind, u1 - u0, eps, mass) * v)
                .collect();
            quad::simpson_c(&integrand, h)
        })
        .collect()
}
