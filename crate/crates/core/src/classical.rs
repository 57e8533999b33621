//! Classical equations of motion from the four-dimensional Lagrangian:
//! `m t''  = q E . x'` and `m x'' = q t' E + q x' x B`, integrated with a
//! fixed-step fourth-order Runge-Kutta scheme in clock time.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum TrajectoryError {
    #[error("need at least one integration step")]
    NoSteps,
    #[error("tau range must be increasing")]
    BadRange,
}

/// Phase-space point: coordinates (t, x) and their clock-time derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    pub tau: f64,
    pub t: f64,
    pub x: [f64; 3],
    pub tdot: f64,
    pub xdot: [f64; 3],
}

impl TrajectoryPoint {
    /// Conserved Minkowski speed `t'^2 - x'.x'` (for pure magnetic fields).
    pub fn minkowski_speed_sq(&self) -> f64 {
        self.tdot * self.tdot - self.xdot.iter().map(|v| v * v).sum::<f64>()
    }
}

/// Sampled solution of the Euler-Lagrange system; `tau` strictly increasing.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<TrajectoryPoint>,
}

impl Trajectory {
    pub fn last(&self) -> &TrajectoryPoint {
        self.samples.last().expect("trajectory is never empty")
    }
}

#[derive(Debug, Clone, Copy)]
struct Fields {
    e: [f64; 3],
    b: [f64; 3],
    q_over_m: f64,
}

type State = [f64; 8]; // t, x, y, z, tdot, xdot, ydot, zdot

fn derivative(y: &State, f: &Fields) -> State {
    let xdot = [y[5], y[6], y[7]];
    let e_dot_v = f.e[0] * xdot[0] + f.e[1] * xdot[1] + f.e[2] * xdot[2];
    let v_cross_b = [
        xdot[1] * f.b[2] - xdot[2] * f.b[1],
        xdot[2] * f.b[0] - xdot[0] * f.b[2],
        xdot[0] * f.b[1] - xdot[1] * f.b[0],
    ];
    [
        y[4],
        y[5],
        y[6],
        y[7],
        f.q_over_m * e_dot_v,
        f.q_over_m * (y[4] * f.e[0] + v_cross_b[0]),
        f.q_over_m * (y[4] * f.e[1] + v_cross_b[1]),
        f.q_over_m * (y[4] * f.e[2] + v_cross_b[2]),
    ]
}

fn rk4_step(y: &State, h: f64, f: &Fields) -> State {
    let k1 = derivative(y, f);
    let k2 = derivative(&advance(y, h / 2.0, &k1), f);
    let k3 = derivative(&advance(y, h / 2.0, &k2), f);
    let k4 = derivative(&advance(y, h, &k3), f);
    let mut out = *y;
    for i in 0..8 {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

fn advance(y: &State, h: f64, k: &State) -> State {
    let mut out = *y;
    for i in 0..8 {
        out[i] += h * k[i];
    }
    out
}

/// Integrate the classical system over `tau_range` with `steps` fixed RK4
/// steps in constant electric and magnetic fields.
#[allow(clippy::too_many_arguments)]
pub fn classical_trajectory(
    init: &TrajectoryPoint,
    e_field: [f64; 3],
    b_field: [f64; 3],
    q: f64,
    mass: f64,
    tau_range: (f64, f64),
    steps: usize,
) -> Result<Trajectory, TrajectoryError> {
    if steps == 0 {
        return Err(TrajectoryError::NoSteps);
    }
    if !(tau_range.1 > tau_range.0) {
        return Err(TrajectoryError::BadRange);
    }
    let fields = Fields {
        e: e_field,
        b: b_field,
        q_over_m: q / mass,
    };
    let h = (tau_range.1 - tau_range.0) / steps as f64;
    let mut state: State = [
        init.t,
        init.x[0],
        init.x[1],
        init.x[2],
        init.tdot,
        init.xdot[0],
        init.xdot[1],
        init.xdot[2],
    ];
    let mut samples = Vec::with_capacity(steps + 1);
    let to_point = |tau: f64, y: &State| TrajectoryPoint {
        tau,
        t: y[0],
        x: [y[1], y[2], y[3]],
        tdot: y[4],
        xdot: [y[5], y[6], y[7]],
    };
    samples.push(to_point(tau_range.0, &state));
    for i in 1..=steps {
        state = rk4_step(&state, h, &fields);
        samples.push(to_point(tau_range.0 + h * i as f64, &state));
    }
    Ok(Trajectory { samples })
}
