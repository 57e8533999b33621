//! ABC-model Gaussian amplitude calculus: three spinless massive species
//! where A emits and absorbs B with amplitude lambda and C does the same
//! with amplitude Lambda.
//!
//! Vertex clock times are fixed inputs throughout; emission and absorption
//! default to the reduced (t, x) axes with y, z as spectators since every
//! formula factorizes. Rest-mass phases are dropped where they are
//! independent of the interaction; disconnected diagrams and
//! normal-ordering constants never appear.

use crate::packets::{clock_frequency, AxisKind, AxisPacket, Packet4, PlaneWave};
use crate::slits::RescaleResult;
use crate::toa::{DetectionDensity, ToaError};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum VertexError {
    #[error("masses must be positive")]
    BadMass,
    #[error("vertex schedule must satisfy 0 <= tau_X <= tau_end (tau_X = {tau_x}, tau_end = {tau_end})")]
    ScheduleViolation { tau_x: f64, tau_end: f64 },
    #[error("exchange vertices degenerate: tau_Y = tau_X")]
    DegenerateSchedule,
    #[error("loop correction is singular at tau = 0")]
    TauSingularity,
    #[error("no classical crossing: closing speed {0} must be positive")]
    NoCrossing(f64),
    #[error(transparent)]
    Density(#[from] ToaError),
}

/// Non-fatal notices from the amplitude geometry.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub enum VertexWarning {
    /// Scheduled vertex lies outside the packets' overlap envelope.
    GeometryInconsistent { separation: f64, envelope: f64 },
}

/// Couplings and masses of the toy model: lambda for A-B, Lambda for C-B.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct AbcCouplings {
    pub lambda: f64,
    pub lambda_c: f64,
    /// Mass of A.
    pub mass_a: f64,
    /// Mass of B (may be small but positive).
    pub mass_b: f64,
    /// Mass of C.
    pub mass_c: f64,
}

impl AbcCouplings {
    pub fn new(
        lambda: f64,
        lambda_c: f64,
        mass_a: f64,
        mass_b: f64,
        mass_c: f64,
    ) -> Result<Self, VertexError> {
        if !(mass_a > 0.0 && mass_b > 0.0 && mass_c > 0.0) {
            return Err(VertexError::BadMass);
        }
        Ok(Self {
            lambda,
            lambda_c,
            mass_a,
            mass_b,
            mass_c,
        })
    }
}

/// Fixed vertex clock times.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct VertexSchedule {
    pub tau_x: f64,
    /// Second vertex, for exchange diagrams.
    pub tau_y: Option<f64>,
    /// Final clock time (tau_2 or tau_3).
    pub tau_end: f64,
}

impl VertexSchedule {
    pub fn single(tau_x: f64, tau_end: f64) -> Result<Self, VertexError> {
        if !(0.0..=tau_end).contains(&tau_x) {
            return Err(VertexError::ScheduleViolation { tau_x, tau_end });
        }
        Ok(Self {
            tau_x,
            tau_y: None,
            tau_end,
        })
    }

    pub fn pair(tau_x: f64, tau_y: f64, tau_end: f64) -> Result<Self, VertexError> {
        if !(0.0..=tau_end).contains(&tau_x) || !(0.0..=tau_end).contains(&tau_y) {
            return Err(VertexError::ScheduleViolation { tau_x, tau_end });
        }
        Ok(Self {
            tau_x,
            tau_y: Some(tau_y),
            tau_end,
        })
    }
}

/// Zero-dimensional Fock kernel: `exp(-i (m/2) l tau)`; `l` particles
/// oscillate `l` times as quickly as one.
pub fn zero_d_kernel(occupation: u32, tau: f64, mass: f64) -> Complex64 {
    Complex64::new(0.0, -0.5 * mass * occupation as f64 * tau).exp()
}

/// Reduced two-axis four-momentum (E, px); y and z are spectators.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ReducedMomentum {
    pub e: f64,
    pub px: f64,
}

impl ReducedMomentum {
    pub fn mass_sq(&self) -> f64 {
        self.e * self.e - self.px * self.px
    }

    /// Reduced clock frequency `-(E^2 - px^2 - m^2)/2m`.
    pub fn clock_frequency(&self, mass: f64) -> f64 {
        -(self.mass_sq() - mass * mass) / (2.0 * mass)
    }
}

/// First-order emission `A -> A' + B` at a fixed vertex clock time.
#[derive(Debug, Clone)]
pub struct Emission {
    pub couplings: AbcCouplings,
    /// Incoming A, reduced to its time and x axes.
    pub a0_time: AxisPacket,
    pub a0_space: AxisPacket,
    pub sched: VertexSchedule,
}

impl Emission {
    pub fn new(
        couplings: AbcCouplings,
        a0_time: AxisPacket,
        a0_space: AxisPacket,
        sched: VertexSchedule,
    ) -> Result<Self, VertexError> {
        if !(0.0..=sched.tau_end).contains(&sched.tau_x) {
            return Err(VertexError::ScheduleViolation {
                tau_x: sched.tau_x,
                tau_end: sched.tau_end,
            });
        }
        Ok(Self {
            couplings,
            a0_time,
            a0_space,
            sched,
        })
    }

    /// Clock frequency of the initial A at the conserved total momentum.
    pub fn f0(&self, p_prime: ReducedMomentum, k: ReducedMomentum) -> f64 {
        ReducedMomentum {
            e: p_prime.e + k.e,
            px: p_prime.px + k.px,
        }
        .clock_frequency(self.couplings.mass_a)
    }

    /// Sum of the outgoing clock frequencies.
    pub fn fx(&self, p_prime: ReducedMomentum, k: ReducedMomentum) -> f64 {
        p_prime.clock_frequency(self.couplings.mass_a) + k.clock_frequency(self.couplings.mass_b)
    }

    /// Joint amplitude `-i lambda A0(p' + k) exp(-i F_X tau_2X - i F_0 tau_X)`
    /// with the rest-mass phases dropped.
    pub fn amplitude(&self, p_prime: ReducedMomentum, k: ReducedMomentum) -> Complex64 {
        let total_e = p_prime.e + k.e;
        let total_px = p_prime.px + k.px;
        let a0 = self.a0_time.evaluate_momentum(0.0, total_e)
            * self.a0_space.evaluate_momentum(0.0, total_px);
        let tau_2x = self.sched.tau_end - self.sched.tau_x;
        let phase = -self.fx(p_prime, k) * tau_2x - self.f0(p_prime, k) * self.sched.tau_x;
        Complex64::new(0.0, -self.couplings.lambda) * a0 * Complex64::new(0.0, phase).exp()
    }

    /// Density along the conserved energy sum `s = E' + w`, scanned with a
    /// fixed split between the outgoing energies and fixed space momenta.
    /// The unconstrained direction is not normalizable and is never
    /// integrated.
    pub fn conserved_sum_density(
        &self,
        s_values: &[f64],
        split: f64,
        px_prime: f64,
        kx: f64,
    ) -> Vec<f64> {
        s_values
            .iter()
            .map(|&s| {
                let p_prime = ReducedMomentum {
                    e: split * s,
                    px: px_prime,
                };
                let k = ReducedMomentum {
                    e: (1.0 - split) * s,
                    px: kx,
                };
                self.amplitude(p_prime, k).norm_sqr()
            })
            .collect()
    }
}

/// Joint amplitude sampled on an (E', w) grid at fixed space momenta.
#[derive(Debug, Clone)]
pub struct JointAmplitude {
    pub e_values: Vec<f64>,
    pub w_values: Vec<f64>,
    /// Row-major over (E', w).
    pub values: Vec<Complex64>,
    pub px_prime: f64,
    pub kx: f64,
}

impl Emission {
    pub fn grid(
        &self,
        e_values: Vec<f64>,
        w_values: Vec<f64>,
        px_prime: f64,
        kx: f64,
    ) -> JointAmplitude {
        let mut values = Vec::with_capacity(e_values.len() * w_values.len());
        for &e in &e_values {
            for &w in &w_values {
                values.push(self.amplitude(
                    ReducedMomentum { e, px: px_prime },
                    ReducedMomentum { e: w, px: kx },
                ));
            }
        }
        JointAmplitude {
            e_values,
            w_values,
            values,
            px_prime,
            kx,
        }
    }
}

/// Absorption rescaling: two Gaussians with dispersion factors at the
/// crossing time merge into a starred Gaussian,
/// `1/(sigma^2 +/- i tau_X/m) + 1/(s^2 +/- i tau_X/mu) = 1/(sigma*^2 +/- i tau*/m)`
/// (upper signs space, lower signs time).
pub fn absorption_rescale(
    sigma_sq: f64,
    s_sq: f64,
    tau_x: f64,
    mass: f64,
    mu: f64,
    _axis_kind: AxisKind,
) -> RescaleResult {
    // The 2x2 solution is real and shared by both axis kinds; the kind only
    // fixes the sign of i in the defining identity.
    let t_sum = tau_x / mass + tau_x / mu;
    let d = (sigma_sq + s_sq) * (sigma_sq + s_sq) + t_sum * t_sum;
    let real_rhs = sigma_sq * s_sq - tau_x * tau_x / (mass * mu);
    let imag_rhs = sigma_sq * tau_x / mu + s_sq * tau_x / mass;
    let sigma_star_sq = ((sigma_sq + s_sq) * real_rhs + t_sum * imag_rhs) / d;
    let tau_star = mass * (-t_sum * real_rhs + (sigma_sq + s_sq) * imag_rhs) / d;
    RescaleResult {
        sigma_star_sq,
        tau_star,
        determinant: d,
    }
}

/// Relative residual of the defining identity for the absorption rescaling.
pub fn absorption_residual(
    result: &RescaleResult,
    sigma_sq: f64,
    s_sq: f64,
    tau_x: f64,
    mass: f64,
    mu: f64,
    axis_kind: AxisKind,
) -> f64 {
    let sign = axis_kind.sign();
    let lhs = 1.0 / Complex64::new(sigma_sq, sign * tau_x / mass)
        + 1.0 / Complex64::new(s_sq, sign * tau_x / mu);
    let rhs = 1.0 / Complex64::new(result.sigma_star_sq, sign * result.tau_star / mass);
    (lhs - rhs).norm() / lhs.norm()
}

/// Classical head-on crossing of two packets moving with velocities `+v` and
/// `-u` from `x_a` and `x_c`.
pub fn classical_crossing(x_a: f64, v: f64, x_c: f64, u: f64) -> Result<(f64, f64), VertexError> {
    let closing = v + u;
    if closing <= 0.0 {
        return Err(VertexError::NoCrossing(closing));
    }
    let tau = (x_c - x_a) / closing;
    Ok((tau, x_a + v * tau))
}

/// Outcome of `A + B -> A'` with every axis rescaled at the crossing.
#[derive(Debug, Clone)]
pub struct AbsorptionResult {
    pub outgoing: Packet4,
    pub rescales: [RescaleResult; 4],
    pub tau_x: f64,
    pub x_x: f64,
    /// `sqrt(sigma_E*^2 / 2)` with `sigma_E*^2 = 1/sigma_t*^2`.
    pub delta_e: f64,
    pub warnings: Vec<VertexWarning>,
}

/// Absorb a B packet into an A packet at the scheduled (or classical
/// crossing) clock time; non-relativistic time parts.
pub fn absorption_final(
    a: &Packet4,
    b: &Packet4,
    couplings: &AbcCouplings,
    sched: Option<VertexSchedule>,
) -> Result<AbsorptionResult, VertexError> {
    let mass = couplings.mass_a;
    let mu = couplings.mass_b;
    let v = a.axes[1].carrier / mass;
    let u = -b.axes[1].carrier / mu;
    let (tau_x, x_x) = match sched {
        // A fixed schedule pins the vertex on A's classical path.
        Some(s) => (s.tau_x, a.axes[1].center + v * s.tau_x),
        None => classical_crossing(a.axes[1].center, v, b.axes[1].center, u)?,
    };

    // Geometry check: the two packet centers should coincide at tau_X.
    let a_center = a.axes[1].drifted_center(tau_x);
    let b_center = b.axes[1].drifted_center(tau_x);
    let envelope = 3.0
        * (a.axes[1].moments(tau_x).uncertainty + b.axes[1].moments(tau_x).uncertainty);
    let separation = (a_center - b_center).abs();
    let warnings = (separation > envelope)
        .then_some(VertexWarning::GeometryInconsistent {
            separation,
            envelope,
        })
        .into_iter()
        .collect();

    let mut rescales = [RescaleResult {
        sigma_star_sq: 0.0,
        tau_star: 0.0,
        determinant: 0.0,
    }; 4];
    let mut axes = [a.axes[0]; 4];
    for i in 0..4 {
        let rescale = absorption_rescale(
            a.axes[i].sigma * a.axes[i].sigma,
            b.axes[i].sigma * b.axes[i].sigma,
            tau_x,
            mass,
            mu,
            a.axes[i].axis_kind,
        );
        let center = match i {
            0 => tau_x, // t_X = tau_X for non-relativistic time parts
            1 => x_x,
            _ => a.axes[i].drifted_center(tau_x),
        };
        axes[i] = AxisPacket::new(
            a.axes[i].axis_kind,
            center,
            a.axes[i].carrier + b.axes[i].carrier,
            rescale.sigma_star_sq.sqrt(),
            mass,
        )
        .expect("starred dispersions are positive");
        rescales[i] = rescale;
    }

    let sigma_e_star_sq = 1.0 / rescales[0].sigma_star_sq;
    Ok(AbsorptionResult {
        outgoing: Packet4::new(axes).expect("axis layout preserved"),
        rescales,
        tau_x,
        x_x,
        delta_e: (sigma_e_star_sq / 2.0).sqrt(),
        warnings,
    })
}

/// Which particle emits first in the exchange diagram.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum ExchangeSide {
    /// A emits at X, C absorbs at Y.
    Left,
    /// C emits at Y's role, A absorbs.
    Right,
}

/// Head-on exchange geometry: A from the left, C from the right.
#[derive(Debug, Clone, Copy)]
pub struct ExchangeGeometry {
    pub x_a: f64,
    pub p_a: f64,
    pub mass_a: f64,
    pub x_c: f64,
    pub q_c: f64,
    pub mass_c: f64,
    pub mass_b: f64,
    pub side: ExchangeSide,
    pub schedule: VertexSchedule,
}

/// Kinematics of the exchanged particle and the outgoing expectations.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct ExchangeResult {
    pub x_x: f64,
    pub x_y: f64,
    pub k_exchange: f64,
    pub p_prime_mean: f64,
    pub q_prime_mean: f64,
    /// Off-shellness of the exchanged B.
    pub f_k: f64,
}

/// Fix the vertex clock times, read off the crossing points, and conserve
/// momentum at each vertex: `k = mu dx / dtau`.
pub fn exchange_kinematics(geom: &ExchangeGeometry) -> Result<ExchangeResult, VertexError> {
    let tau_y = geom.schedule.tau_y.ok_or(VertexError::DegenerateSchedule)?;
    let tau_x = geom.schedule.tau_x;
    let dtau = tau_y - tau_x;
    if dtau == 0.0 {
        return Err(VertexError::DegenerateSchedule);
    }
    let v = geom.p_a / geom.mass_a;
    let w = geom.q_c / geom.mass_c;
    let (x_x, x_y) = match geom.side {
        ExchangeSide::Left => (geom.x_a + v * tau_x, geom.x_c + w * tau_y),
        ExchangeSide::Right => (geom.x_c + w * tau_y, geom.x_a + v * tau_x),
    };
    let k = geom.mass_b * (x_y - x_x) / dtau;
    let (p_prime_mean, q_prime_mean) = match geom.side {
        ExchangeSide::Left => (geom.p_a - k, geom.q_c + k),
        ExchangeSide::Right => (geom.p_a + k, geom.q_c - k),
    };
    // Energy transfer from the on-shell expectations fixes the reported
    // off-shellness of B.
    let e_a = (geom.mass_a * geom.mass_a + geom.p_a * geom.p_a).sqrt();
    let e_a_prime = (geom.mass_a * geom.mass_a + p_prime_mean * p_prime_mean).sqrt();
    let w_b = e_a - e_a_prime;
    let f_k = ReducedMomentum { e: w_b, px: k }.clock_frequency(geom.mass_b);
    Ok(ExchangeResult {
        x_x,
        x_y,
        k_exchange: k,
        p_prime_mean,
        q_prime_mean,
        f_k,
    })
}

/// Loop correction for fixed clock time:
/// `L_tau(p) = -i (m^2 mu^2 / M^2 tau^2) exp(i (p^2 - M^2) tau / 2M)` with
/// `M = m + mu`.
pub fn loop_tau(p: &PlaneWave, tau: f64, mass: f64, mu: f64) -> Result<Complex64, VertexError> {
    if tau == 0.0 {
        return Err(VertexError::TauSingularity);
    }
    let big_m = mass + mu;
    let amplitude = mass * mass * mu * mu / (big_m * big_m * tau * tau);
    let phase = (p.mass_sq() - big_m * big_m) / (2.0 * big_m) * tau;
    Ok(Complex64::new(0.0, -amplitude) * Complex64::new(0.0, phase).exp())
}

/// Clock frequency of the combined mass `M = m + mu`:
/// `F_p = -(p^2 - M^2)/2M`.
pub fn loop_clock_frequency(p: &PlaneWave, mass: f64, mu: f64) -> f64 {
    clock_frequency(p, mass + mu)
}

/// Fourier transform of the loop over clock time:
/// `L_hat_omega(p) = i (m^2 mu^2 / M^2) sqrt(pi/2) |omega - F_p|`; finite,
/// no regularization needed.
pub fn loop_omega(p: &PlaneWave, omega: f64, mass: f64, mu: f64) -> Complex64 {
    let big_m = mass + mu;
    let f_p = loop_clock_frequency(p, mass, mu);
    let magnitude = mass * mass * mu * mu / (big_m * big_m)
        * (std::f64::consts::PI / 2.0).sqrt()
        * (omega - f_p).abs();
    Complex64::new(0.0, magnitude)
}

/// Max residual of the two-particle symmetrization identity
/// `phi_sym = (phi~_sym phi-_sym + phi~_anti phi-_anti) / sqrt(2)` over the
/// sample points `(t1, x1, t2, x2)`.
pub fn symmetrize_two_particle(
    wide_t: &dyn Fn(f64) -> Complex64,
    wide_x: &dyn Fn(f64) -> Complex64,
    narrow_t: &dyn Fn(f64) -> Complex64,
    narrow_x: &dyn Fn(f64) -> Complex64,
    samples: &[[f64; 4]],
) -> f64 {
    let inv_sqrt2 = 1.0 / 2.0_f64.sqrt();
    let mut max_residual: f64 = 0.0;
    for &[t1, x1, t2, x2] in samples {
        let target = inv_sqrt2
            * (wide_t(t1) * wide_x(x1) * narrow_t(t2) * narrow_x(x2)
                + wide_t(t2) * wide_x(x2) * narrow_t(t1) * narrow_x(x1));
        let time_sym = inv_sqrt2 * (wide_t(t1) * narrow_t(t2) + wide_t(t2) * narrow_t(t1));
        let space_sym = inv_sqrt2 * (wide_x(x1) * narrow_x(x2) + wide_x(x2) * narrow_x(x1));
        let time_anti = inv_sqrt2 * (wide_t(t1) * narrow_t(t2) - wide_t(t2) * narrow_t(t1));
        let space_anti = inv_sqrt2 * (wide_x(x1) * narrow_x(x2) - wide_x(x2) * narrow_x(x1));
        let rebuilt = inv_sqrt2 * (time_sym * space_sym + time_anti * space_anti);
        max_residual = max_residual.max((target - rebuilt).norm());
    }
    max_residual
}

/// Linear bend `y = intercept + slope * p` from a spectrometer magnet.
#[derive(Debug, Clone, Copy)]
pub struct LinearBend {
    pub intercept: f64,
    pub slope: f64,
}

impl LinearBend {
    pub fn y(&self, p: f64) -> f64 {
        self.intercept + self.slope * p
    }
}

/// Two-dimensional trace over (bend position, arrival time).
#[derive(Debug, Clone)]
pub struct BendTrace {
    pub y_grid: Vec<f64>,
    pub tau_grid: Vec<f64>,
    /// Row-major over (y, tau).
    pub density: Vec<f64>,
    weight: Vec<f64>,
    moment1: Vec<f64>,
    moment2: Vec<f64>,
}

impl BendTrace {
    pub fn conditional_tau_mean(&self, iy: usize) -> Option<f64> {
        (self.weight[iy] > 0.0).then(|| self.moment1[iy] / self.weight[iy])
    }

    /// Exact conditional variance of tau at fixed bend position, from the
    /// accumulated moments (not the binned histogram).
    pub fn conditional_tau_variance(&self, iy: usize) -> Option<f64> {
        if self.weight[iy] <= 0.0 {
            return None;
        }
        let mean = self.moment1[iy] / self.weight[iy];
        Some(self.moment2[iy] / self.weight[iy] - mean * mean)
    }

    /// Export as CSV with columns y,tau,rho.
    pub fn write_csv(&self, mut out: impl std::io::Write) -> std::io::Result<()> {
        writeln!(out, "y,tau,rho")?;
        let n_tau = self.tau_grid.len();
        for (iy, &y) in self.y_grid.iter().enumerate() {
            for (j, &tau) in self.tau_grid.iter().enumerate() {
                writeln!(out, "{y:.16e},{tau:.16e},{:.16e}", self.density[iy * n_tau + j])?;
            }
        }
        Ok(())
    }

    /// Arrival-time density marginalized over the bend position.
    pub fn marginal_tau(&self) -> Result<DetectionDensity, ToaError> {
        let n_tau = self.tau_grid.len();
        let mut rho = vec![0.0; n_tau];
        for row in self.density.chunks(n_tau) {
            for (r, d) in rho.iter_mut().zip(row) {
                *r += d;
            }
        }
        DetectionDensity::new(self.tau_grid.clone(), rho)
    }
}

/// Build the magnetic-bend discriminator trace: SQM concentrates on the
/// curve `tau(y)` with width from the momentum resolution alone;
/// `time_sigma > 0` convolves every column with an independent Gaussian of
/// that standard deviation.
pub fn bend_trace_density(
    p_packet: &AxisPacket,
    time_sigma: f64,
    bend: &LinearBend,
    arrival: &dyn Fn(f64) -> f64,
    y_grid: Vec<f64>,
    tau_grid: Vec<f64>,
) -> BendTrace {
    let n_y = y_grid.len();
    let n_tau = tau_grid.len();
    let dy = y_grid[1] - y_grid[0];
    let dtau = tau_grid[1] - tau_grid[0];
    let mut density = vec![0.0; n_y * n_tau];
    let mut weight = vec![0.0; n_y];
    let mut moment1 = vec![0.0; n_y];
    let mut moment2 = vec![0.0; n_y];

    let sigma_p = p_packet.momentum_sigma();
    let p_lo = p_packet.carrier - 8.0 * sigma_p;
    let p_hi = p_packet.carrier + 8.0 * sigma_p;
    let n_p = 8001;
    let dp = (p_hi - p_lo) / (n_p - 1) as f64;
    let erf_cell = |z: f64| libm_erf(z / 2.0_f64.sqrt());

    for ip in 0..n_p {
        let p = p_lo + dp * ip as f64;
        let w = p_packet.evaluate_momentum(0.0, p).norm_sqr() * dp;
        let y = bend.y(p);
        let iy = ((y - y_grid[0]) / dy).round();
        if iy < 0.0 || iy >= n_y as f64 {
            continue;
        }
        let iy = iy as usize;
        let tau_bar = arrival(p);

        weight[iy] += w;
        moment1[iy] += w * tau_bar;
        // Exact second moment of the deposited kernel.
        moment2[iy] += w * (tau_bar * tau_bar + time_sigma * time_sigma);

        if time_sigma > 0.0 {
            // Bin-integrated Gaussian deposit.
            for j in 0..n_tau {
                let lo = tau_grid[j] - 0.5 * dtau;
                let hi = tau_grid[j] + 0.5 * dtau;
                let mass_in_bin = 0.5
                    * (erf_cell((hi - tau_bar) / time_sigma)
                        - erf_cell((lo - tau_bar) / time_sigma));
                if mass_in_bin > 0.0 {
                    density[iy * n_tau + j] += w * mass_in_bin / dtau;
                }
            }
        } else {
            let j = ((tau_bar - tau_grid[0]) / dtau).round();
            if (0.0..n_tau as f64).contains(&j) {
                density[iy * n_tau + j as usize] += w / dtau;
            }
        }
    }

    BendTrace {
        y_grid,
        tau_grid,
        density,
        weight,
        moment1,
        moment2,
    }
}

// erf via Abramowitz-Stegun 7.1.26; 1.5e-7 absolute accuracy is ample for
// depositing probability mass into bins.
fn libm_erf(x: f64) -> f64 {
    let sign = if x < 0.0 { -1.0 } else { 1.0 };
    let x = x.abs();
    let t = 1.0 / (1.0 + 0.3275911 * x);
    let poly = t
        * (0.254829592 + t * (-0.284496736 + t * (1.421413741 + t * (-1.453152027 + t * 1.061405429))));
    sign * (1.0 - poly * (-x * x).exp())
}
