//! Sampled wave functions on uniform rectangular grids and the split-step
//! spectral propagator that serves as the independent numerical oracle.
//!
//! The propagator integrates
//! `i d/dtau psi = -(1/2m) ((i d_t - q Phi)^2 + d_x^2 + ... - m^2) psi`
//! with a static scalar potential `Phi(x)`. The kinetic symbol is diagonal in
//! four-momentum; the potential cross term `q Phi E / m` is diagonal in the
//! mixed (E, x) representation, so one Strang step is
//! `V/2 -> kinetic -> V/2` with the state carried through the representations
//! by per-axis FFTs. Every factor has unit modulus, so the discrete norm is
//! preserved to rounding.
//!
//! Grids are periodic: an axis covers `[min, max)` with `count` samples and
//! the packet is required to stay well away from the edges.

use crate::packets::{AxisKind, AxisPacket};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use std::io::{Read as _, Write as _};
use std::path::Path;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GridError {
    #[error("axis {axis} needs at least 2 points, got {count}")]
    TooFewPoints { axis: usize, count: usize },
    #[error("axis {axis} extent [{min}, {max}) is empty or not finite")]
    BadExtent { axis: usize, min: f64, max: f64 },
    #[error("value buffer has {got} entries, grid needs {need}")]
    ShapeMismatch { got: usize, need: usize },
    #[error("axis {axis} resolves sigma = {sigma:.3e} with only {points:.1} points per sigma (need >= 8)")]
    UnderResolved { axis: usize, sigma: f64, points: f64 },
    #[error("packet bulk closer than 5 sigma to the edge of axis {axis}")]
    EdgeProximity { axis: usize },
    #[error("probability mass {mass:.3e} sits in the edge guard band")]
    EdgeLeakage { mass: f64 },
    #[error("a potential requires exactly one time axis on the grid")]
    TimeAxisRequired,
    #[error("need at least one propagation step")]
    NoSteps,
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("sidecar: {0}")]
    Sidecar(#[from] serde_json::Error),
    #[error("corrupt wave file: {0}")]
    Corrupt(String),
}

/// Uniform periodic sampling of one axis: `count` points over `[min, max)`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AxisGrid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub kind: AxisKind,
}

impl AxisGrid {
    pub fn new(min: f64, max: f64, count: usize, kind: AxisKind) -> Result<Self, GridError> {
        if count < 2 {
            return Err(GridError::TooFewPoints { axis: 0, count });
        }
        if !(min.is_finite() && max.is_finite() && max > min) {
            return Err(GridError::BadExtent { axis: 0, min, max });
        }
        Ok(Self {
            min,
            max,
            count,
            kind,
        })
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        (self.max - self.min) / self.count as f64
    }

    #[inline]
    pub fn point(&self, i: usize) -> f64 {
        self.min + self.dx() * i as f64
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.point(i)).collect()
    }

    /// FFT-ordered angular frequencies `2 pi k / (count dx)`, wrapped to the
    /// symmetric band.
    pub fn frequencies(&self) -> Vec<f64> {
        let n = self.count;
        let base = 2.0 * std::f64::consts::PI / (n as f64 * self.dx());
        (0..n)
            .map(|k| {
                let k_signed = if k <= n / 2 {
                    k as f64
                } else {
                    k as f64 - n as f64
                };
                base * k_signed
            })
            .collect()
    }

    /// Index of the sample closest to `coord`.
    pub fn nearest_index(&self, coord: f64) -> usize {
        let i = ((coord - self.min) / self.dx()).round() as isize;
        i.clamp(0, self.count as isize - 1) as usize
    }
}

/// Sampled complex wave function on up to four uniform axes, row-major with
/// axis 0 slowest.
#[derive(Debug, Clone)]
pub struct GridWave {
    axes: Vec<AxisGrid>,
    values: Vec<Complex64>,
}

impl GridWave {
    pub fn new(axes: Vec<AxisGrid>, values: Vec<Complex64>) -> Result<Self, GridError> {
        for (i, axis) in axes.iter().enumerate() {
            if axis.count < 2 {
                return Err(GridError::TooFewPoints {
                    axis: i,
                    count: axis.count,
                });
            }
            if !(axis.max > axis.min) {
                return Err(GridError::BadExtent {
                    axis: i,
                    min: axis.min,
                    max: axis.max,
                });
            }
        }
        let need: usize = axes.iter().map(|a| a.count).product();
        if values.len() != need {
            return Err(GridError::ShapeMismatch {
                got: values.len(),
                need,
            });
        }
        Ok(Self { axes, values })
    }

    /// Sample an arbitrary function of the grid coordinates.
    pub fn sample(
        axes: Vec<AxisGrid>,
        f: impl Fn(&[f64]) -> Complex64 + Sync,
    ) -> Result<Self, GridError> {
        let total: usize = axes.iter().map(|a| a.count).product();
        let dims: Vec<usize> = axes.iter().map(|a| a.count).collect();
        let values: Vec<Complex64> = (0..total)
            .into_par_iter()
            .map(|flat| {
                let mut coords = [0.0; 4];
                let mut rem = flat;
                for (a, &dim) in dims.iter().enumerate().rev() {
                    coords[a] = axes[a].point(rem % dim);
                    rem /= dim;
                }
                f(&coords[..axes.len()])
            })
            .collect();
        Self::new(axes, values)
    }

    /// Sample a product of axis packets at clock time zero, enforcing the
    /// resolution (>= 8 points per sigma) and edge (>= 5 sigma margin)
    /// guards.
    pub fn sample_packets(axes: Vec<AxisGrid>, packets: &[AxisPacket]) -> Result<Self, GridError> {
        assert_eq!(axes.len(), packets.len());
        for (i, (axis, packet)) in axes.iter().zip(packets).enumerate() {
            if axis.dx() > packet.sigma / 8.0 {
                return Err(GridError::UnderResolved {
                    axis: i,
                    sigma: packet.sigma,
                    points: packet.sigma / axis.dx(),
                });
            }
            // The Nyquist band must also hold the carrier and the momentum
            // spread, or the evolution phases alias.
            let band = packet.carrier.abs() + 6.0 * packet.momentum_sigma();
            if axis.dx() * band > std::f64::consts::PI {
                return Err(GridError::UnderResolved {
                    axis: i,
                    sigma: 1.0 / band,
                    points: std::f64::consts::PI / (axis.dx() * band) * 8.0,
                });
            }
            let lo = packet.center - 5.0 * packet.sigma;
            let hi = packet.center + 5.0 * packet.sigma;
            if lo < axis.min || hi > axis.max {
                return Err(GridError::EdgeProximity { axis: i });
            }
        }
        let packets = packets.to_vec();
        Self::sample(axes, move |coords| {
            packets
                .iter()
                .zip(coords)
                .map(|(p, &c)| p.evaluate_position(0.0, c))
                .product()
        })
    }

    pub fn axes(&self) -> &[AxisGrid] {
        &self.axes
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn dims(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.count).collect()
    }

    pub fn cell_volume(&self) -> f64 {
        self.axes.iter().map(|a| a.dx()).product()
    }

    /// Flat row-major index for per-axis indices.
    pub fn flat_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.axes.len());
        let mut flat = 0;
        for (a, &i) in idx.iter().enumerate() {
            flat = flat * self.axes[a].count + i;
        }
        flat
    }

    /// Quadrature norm `sum |psi|^2 dV` (periodic rectangle rule).
    pub fn norm(&self) -> f64 {
        let sum: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        sum * self.cell_volume()
    }

    /// Probability density marginalized onto one axis.
    pub fn axis_marginal(&self, axis: usize) -> (Vec<f64>, Vec<f64>) {
        let dims = self.dims();
        let stride: usize = dims[axis + 1..].iter().product();
        let len = dims[axis];
        let other_volume = self.cell_volume() / self.axes[axis].dx();
        let mut rho = vec![0.0; len];
        for (flat, v) in self.values.iter().enumerate() {
            let i = (flat / stride) % len;
            rho[i] += v.norm_sqr();
        }
        for r in &mut rho {
            *r *= other_volume;
        }
        (self.axes[axis].points(), rho)
    }

    /// Multiply the values by a real mask of the coordinate along one axis
    /// (a gate acting on that axis).
    pub fn apply_axis_mask(&mut self, axis: usize, mask: impl Fn(f64) -> f64) {
        let dims = self.dims();
        let stride: usize = dims[axis + 1..].iter().product();
        let len = dims[axis];
        let gains: Vec<f64> = self.axes[axis].points().iter().map(|&u| mask(u)).collect();
        for (flat, v) in self.values.iter_mut().enumerate() {
            let i = (flat / stride) % len;
            *v *= gains[i];
        }
    }

    /// Fraction of the norm in the outermost guard band of each axis.
    pub fn edge_mass_fraction(&self) -> f64 {
        let dims = self.dims();
        let total_norm = self.norm().max(f64::MIN_POSITIVE);
        let mut edge = 0.0;
        for (flat, v) in self.values.iter().enumerate() {
            let mut rem = flat;
            let mut on_edge = false;
            for &dim in dims.iter().rev() {
                let i = rem % dim;
                rem /= dim;
                let guard = 2.min(dim / 2);
                if i < guard || i >= dim - guard {
                    on_edge = true;
                }
            }
            if on_edge {
                edge += v.norm_sqr();
            }
        }
        edge * self.cell_volume() / total_norm
    }
}

/// Static scalar potential over the space axes.
pub struct ScalarPotential {
    f: Box<dyn Fn(&[f64]) -> f64 + Sync + Send>,
}

impl ScalarPotential {
    pub fn free() -> Self {
        Self {
            f: Box::new(|_| 0.0),
        }
    }

    pub fn constant(v0: f64) -> Self {
        Self {
            f: Box::new(move |_| v0),
        }
    }

    /// Gaussian bump `v0 exp(-|x - c|^2 / 2 w^2)` over the space coordinates.
    pub fn gaussian_bump(v0: f64, width: f64, center: Vec<f64>) -> Self {
        Self {
            f: Box::new(move |x| {
                let r_sq: f64 = x
                    .iter()
                    .zip(&center)
                    .map(|(&xi, &ci)| (xi - ci) * (xi - ci))
                    .sum();
                v0 * (-r_sq / (2.0 * width * width)).exp()
            }),
        }
    }

    pub fn from_fn(f: impl Fn(&[f64]) -> f64 + Sync + Send + 'static) -> Self {
        Self { f: Box::new(f) }
    }

    pub fn evaluate(&self, space_coords: &[f64]) -> f64 {
        (self.f)(space_coords)
    }

    pub fn is_free(&self, probe: &[f64]) -> bool {
        self.evaluate(probe) == 0.0
    }
}

/// Sign of the time-axis kinetic term. `Flipped` is the deliberate
/// sign-error used as a negative control against the closed form; it stays
/// exactly unitary (all split factors keep unit modulus) but propagates the
/// wrong equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeAxisSign {
    Physical,
    Flipped,
}

struct AxisTransform {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    len: usize,
    stride: usize,
}

/// Split-step spectral propagator for one grid layout. Precomputes the FFT
/// plans and the kinetic/potential phase tables for a fixed step size.
pub struct Propagator {
    axes: Vec<AxisGrid>,
    dims: Vec<usize>,
    transforms: Vec<AxisTransform>,
    kinetic_phase: Vec<Complex64>,
    /// Half-step potential phase in the (E, x) representation, if any.
    potential_phase: Option<Vec<Complex64>>,
    time_axes: Vec<usize>,
    space_axes: Vec<usize>,
    dtau: f64,
}

impl Propagator {
    pub fn new(
        wave: &GridWave,
        mass: f64,
        charge: f64,
        potential: &ScalarPotential,
        dtau: f64,
        sign: TimeAxisSign,
    ) -> Result<Self, GridError> {
        let axes = wave.axes().to_vec();
        let dims: Vec<usize> = axes.iter().map(|a| a.count).collect();
        let time_axes: Vec<usize> = axes
            .iter()
            .enumerate()
            .filter(|(_, a)| a.kind == AxisKind::Time)
            .map(|(i, _)| i)
            .collect();
        let space_axes: Vec<usize> = axes
            .iter()
            .enumerate()
            .filter(|(_, a)| a.kind == AxisKind::Space)
            .map(|(i, _)| i)
            .collect();

        let mut planner = FftPlanner::<f64>::new();
        let transforms: Vec<AxisTransform> = axes
            .iter()
            .enumerate()
            .map(|(a, axis)| AxisTransform {
                forward: planner.plan_fft_forward(axis.count),
                inverse: planner.plan_fft_inverse(axis.count),
                len: axis.count,
                stride: dims[a + 1..].iter().product(),
            })
            .collect();

        // Kinetic symbol f = -(sum_t s E^2 - sum_s p^2 - m^2)/2m over the full
        // grid, with s = -1 under the flipped negative control.
        let total: usize = dims.iter().product();
        let freq: Vec<Vec<f64>> = axes.iter().map(|a| a.frequencies()).collect();
        let time_sign = match sign {
            TimeAxisSign::Physical => 1.0,
            TimeAxisSign::Flipped => -1.0,
        };
        let kinetic_phase: Vec<Complex64> = (0..total)
            .into_par_iter()
            .map(|flat| {
                let mut rem = flat;
                let mut e_sq = 0.0;
                let mut p_sq = 0.0;
                for (a, &dim) in dims.iter().enumerate().rev() {
                    let k = rem % dim;
                    rem /= dim;
                    let w = freq[a][k];
                    match axes[a].kind {
                        AxisKind::Time => e_sq += w * w, // E = -omega; squares agree
                        AxisKind::Space => p_sq += w * w,
                    }
                }
                let f = -(time_sign * e_sq - p_sq - mass * mass) / (2.0 * mass);
                Complex64::new(0.0, -f * dtau).exp()
            })
            .collect();

        let has_potential = {
            let probe = vec![0.123; space_axes.len().max(1)];
            charge != 0.0 && !potential.is_free(&probe[..space_axes.len()])
        };
        let potential_phase = if has_potential {
            if time_axes.len() != 1 {
                return Err(GridError::TimeAxisRequired);
            }
            let t_axis = time_axes[0];
            let phase: Vec<Complex64> = (0..total)
                .into_par_iter()
                .map(|flat| {
                    let mut rem = flat;
                    let mut coords = vec![0.0; axes.len()];
                    let mut e_value = 0.0;
                    for (a, &dim) in dims.iter().enumerate().rev() {
                        let k = rem % dim;
                        rem /= dim;
                        if a == t_axis {
                            e_value = -freq[a][k]; // grid mode e^{+i w t} = e^{-iEt}
                        } else {
                            coords[a] = axes[a].point(k);
                        }
                    }
                    let space_coords: Vec<f64> =
                        space_axes.iter().map(|&a| coords[a]).collect();
                    let phi = potential.evaluate(&space_coords);
                    let v = charge * phi * e_value / mass
                        - charge * charge * phi * phi / (2.0 * mass);
                    Complex64::new(0.0, -v * dtau / 2.0).exp()
                })
                .collect();
            Some(phase)
        } else {
            None
        };

        Ok(Self {
            axes,
            dims,
            transforms,
            kinetic_phase,
            potential_phase,
            time_axes,
            space_axes,
            dtau,
        })
    }

    pub fn dtau(&self) -> f64 {
        self.dtau
    }

    fn fft_axis(&self, values: &mut [Complex64], axis: usize, inverse: bool) {
        let tr = &self.transforms[axis];
        let fft = if inverse { &tr.inverse } else { &tr.forward };
        let scale = if inverse { 1.0 / tr.len as f64 } else { 1.0 };
        if tr.stride == 1 {
            // Lines are contiguous rows.
            values
                .par_chunks_exact_mut(tr.len)
                .for_each(|row| {
                    fft.process(row);
                    if inverse {
                        for v in row.iter_mut() {
                            *v *= scale;
                        }
                    }
                });
        } else if self.dims.len() == 2 && axis == 0 {
            // Transpose, transform rows, transpose back.
            let (n0, n1) = (self.dims[0], self.dims[1]);
            let mut scratch = vec![Complex64::new(0.0, 0.0); values.len()];
            transpose::transpose(values, &mut scratch, n1, n0);
            scratch.par_chunks_exact_mut(n0).for_each(|row| {
                fft.process(row);
                if inverse {
                    for v in row.iter_mut() {
                        *v *= scale;
                    }
                }
            });
            transpose::transpose(&scratch, values, n0, n1);
        } else {
            // Generic gather/scatter along a strided axis.
            let lines = values.len() / tr.len;
            let mut line = vec![Complex64::new(0.0, 0.0); tr.len];
            for l in 0..lines {
                let outer = l / tr.stride;
                let inner = l % tr.stride;
                let base = outer * tr.len * tr.stride + inner;
                for k in 0..tr.len {
                    line[k] = values[base + k * tr.stride];
                }
                fft.process(&mut line);
                for k in 0..tr.len {
                    let v = if inverse { line[k] * scale } else { line[k] };
                    values[base + k * tr.stride] = v;
                }
            }
        }
    }

    fn apply_table(values: &mut [Complex64], table: &[Complex64]) {
        values
            .par_iter_mut()
            .zip(table.par_iter())
            .for_each(|(v, p)| *v *= p);
    }

    /// One Strang step `V/2 -> kinetic -> V/2` on position-space values.
    pub fn step(&self, values: &mut [Complex64]) {
        match &self.potential_phase {
            Some(phase) => {
                for &a in &self.time_axes {
                    self.fft_axis(values, a, false);
                }
                Self::apply_table(values, phase);
                for &a in &self.space_axes {
                    self.fft_axis(values, a, false);
                }
                Self::apply_table(values, &self.kinetic_phase);
                for &a in &self.space_axes {
                    self.fft_axis(values, a, true);
                }
                Self::apply_table(values, phase);
                for &a in &self.time_axes {
                    self.fft_axis(values, a, true);
                }
            }
            None => {
                for a in 0..self.axes.len() {
                    self.fft_axis(values, a, false);
                }
                Self::apply_table(values, &self.kinetic_phase);
                for a in 0..self.axes.len() {
                    self.fft_axis(values, a, true);
                }
            }
        }
    }
}

/// Propagate `wave` over `tau_total` in `steps` Strang steps, calling
/// `observer(step, tau, wave)` after every step.
#[allow(clippy::too_many_arguments)]
pub fn propagate_observed(
    wave: &GridWave,
    mass: f64,
    charge: f64,
    potential: &ScalarPotential,
    tau_total: f64,
    steps: usize,
    sign: TimeAxisSign,
    mut observer: impl FnMut(usize, f64, &GridWave),
) -> Result<GridWave, GridError> {
    if steps == 0 {
        return Err(GridError::NoSteps);
    }
    let edge = wave.edge_mass_fraction();
    if edge > 1e-9 {
        return Err(GridError::EdgeLeakage { mass: edge });
    }
    let dtau = tau_total / steps as f64;
    let propagator = Propagator::new(wave, mass, charge, potential, dtau, sign)?;
    let mut current = wave.clone();
    for step in 1..=steps {
        propagator.step(&mut current.values);
        observer(step, dtau * step as f64, &current);
    }
    Ok(current)
}

/// Split-step spectral integration; deterministic for fixed inputs.
pub fn grid_propagate(
    wave: &GridWave,
    mass: f64,
    charge: f64,
    potential: &ScalarPotential,
    tau_total: f64,
    steps: usize,
) -> Result<GridWave, GridError> {
    propagate_observed(
        wave,
        mass,
        charge,
        potential,
        tau_total,
        steps,
        TimeAxisSign::Physical,
        |_, _, _| {},
    )
}

/// Run the propagation sampling the norm after every step; returns the
/// maximum deviation `|norm - 1|`.
#[allow(clippy::too_many_arguments)]
pub fn verify_unitarity(
    wave: &GridWave,
    mass: f64,
    charge: f64,
    potential: &ScalarPotential,
    tau_total: f64,
    steps: usize,
    sign: TimeAxisSign,
) -> Result<f64, GridError> {
    let mut max_drift: f64 = 0.0;
    propagate_observed(
        wave,
        mass,
        charge,
        potential,
        tau_total,
        steps,
        sign,
        |_, _, w| {
            max_drift = max_drift.max((w.norm() - 1.0).abs());
        },
    )?;
    Ok(max_drift)
}

// Flat binary layout: header of little-endian 64-bit values (axis count,
// then per axis min/max/count/kind), payload of interleaved re/im f64,
// row-major. A JSON sidecar `<path>.json` repeats the header for tooling.

#[derive(serde::Serialize, serde::Deserialize)]
struct Sidecar {
    axis_count: usize,
    axes: Vec<AxisGrid>,
}

impl GridWave {
    pub fn save(&self, path: &Path) -> Result<(), GridError> {
        let mut buf: Vec<u8> = Vec::with_capacity(16 * self.values.len() + 64);
        buf.extend_from_slice(&(self.axes.len() as u64).to_le_bytes());
        for axis in &self.axes {
            buf.extend_from_slice(&axis.min.to_le_bytes());
            buf.extend_from_slice(&axis.max.to_le_bytes());
            buf.extend_from_slice(&(axis.count as u64).to_le_bytes());
            let kind: u64 = match axis.kind {
                AxisKind::Time => 0,
                AxisKind::Space => 1,
            };
            buf.extend_from_slice(&kind.to_le_bytes());
        }
        for v in &self.values {
            buf.extend_from_slice(&v.re.to_le_bytes());
            buf.extend_from_slice(&v.im.to_le_bytes());
        }
        std::fs::File::create(path)?.write_all(&buf)?;

        let sidecar = Sidecar {
            axis_count: self.axes.len(),
            axes: self.axes.clone(),
        };
        let sidecar_path = path.with_extension(format!(
            "{}json",
            path.extension()
                .map(|e| format!("{}.", e.to_string_lossy()))
                .unwrap_or_default()
        ));
        std::fs::write(&sidecar_path, serde_json::to_string_pretty(&sidecar)?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, GridError> {
        let mut bytes = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut bytes)?;
        let mut cursor = 0usize;
        let mut take = |n: usize| -> Result<&[u8], GridError> {
            if cursor + n > bytes.len() {
                return Err(GridError::Corrupt("truncated header".into()));
            }
            let slice = &bytes[cursor..cursor + n];
            cursor += n;
            Ok(slice)
        };
        let read_u64 =
            |b: &[u8]| u64::from_le_bytes(b.try_into().expect("eight bytes"));
        let read_f64 =
            |b: &[u8]| f64::from_le_bytes(b.try_into().expect("eight bytes"));

        let axis_count = read_u64(take(8)?) as usize;
        if axis_count == 0 || axis_count > 4 {
            return Err(GridError::Corrupt(format!("axis count {axis_count}")));
        }
        let mut axes = Vec::with_capacity(axis_count);
        for _ in 0..axis_count {
            let min = read_f64(take(8)?);
            let max = read_f64(take(8)?);
            let count = read_u64(take(8)?) as usize;
            let kind = match read_u64(take(8)?) {
                0 => AxisKind::Time,
                1 => AxisKind::Space,
                other => return Err(GridError::Corrupt(format!("axis kind {other}"))),
            };
            axes.push(AxisGrid {
                min,
                max,
                count,
                kind,
            });
        }
        let total: usize = axes.iter().map(|a| a.count).product();
        let mut values = Vec::with_capacity(total);
        for _ in 0..total {
            let re = read_f64(take(8)?);
            let im = read_f64(take(8)?);
            values.push(Complex64::new(re, im));
        }
        Self::new(axes, values)
    }
}
