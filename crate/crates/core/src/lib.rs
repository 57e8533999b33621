//! Numerical laboratory for quantum mechanics with coordinate time promoted to
//! a full wave-function argument (TQM), computed side by side with the standard
//! theory (SQM).
//!
//! The crate is organized around closed-form Gaussian wave packets
//! ([`packets`]), free kernels and a split-step spectral grid propagator that
//! serves as the independent numerical oracle ([`kernels`], [`grid`]), Morlet
//! wavelet analysis justifying the Gaussian-only basis ([`wavelets`]),
//! time-of-arrival statistics ([`toa`]), the gate-in-time experiments
//! ([`slits`]), and the ABC-model multiparticle amplitude calculus
//! ([`multiparticle`]).
//!
//! All internal quantities are in natural units (hbar = c = 1, energies in eV,
//! times and lengths in 1/eV). Conversion to laboratory units happens only at
//! the boundaries; the constants live in [`units`].

pub mod classical;
pub mod grid;
pub mod kernels;
pub mod maxent;
pub mod multiparticle;
pub mod packets;
pub mod quad;
pub mod slits;
pub mod toa;
pub mod units;
pub mod wavelets;

pub use grid::{AxisGrid, GridError, GridWave, ScalarPotential, TimeAxisSign};
pub use kernels::{KernelFlavor, KernelSpec};
pub use packets::{AxisKind, AxisPacket, DispersionFactor, Packet4, PacketError, PlaneWave};
pub use toa::{DetectionDensity, DetectorSpec};

/// Complex scalar used throughout.
pub type Complex = num_complex::Complex64;
