//! Method-of-lines integration of the evolution form on a periodic grid.
//!
//! Space is discretized with fourth-order central differences and time with
//! classical RK4. Explicit RK4 with the second-difference operator is
//! stable roughly for `dt ≤ 0.2·dx²/|γ|`; this is not enforced.

mod initial;
mod quantities;

use thiserror::Error;

use crate::expr::ExprError;
use crate::reduction::{NumericParams, ReductionError};

pub use initial::{
    candidate_state, gaussian_packet, plane_wave, plane_wave_semidiscrete, random_modes, residual_on_grid,
    InitialCondition,
};
pub use quantities::{conserved_quantity, run, QuantityMonitor, QuantitySeries, SimConfig};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("N must be >= 16 and a power of two, got {0}")]
    GridSize(usize),
    #[error("domain length must be positive and finite, got {0}")]
    GridLength(f64),
    #[error("field has {got} points, the grid has {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("non-finite field value")]
    NonFinite,
    #[error("integration blew up at step {step} (t = {time})")]
    Blowup { step: usize, time: f64 },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("density term `{0}` cannot be evaluated on the grid")]
    UnsupportedDensity(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Reduction(#[from] ReductionError),
}

/// `N` equispaced points `x_i = i·L/N` on a periodic interval of length `L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    length: f64,
    n: usize,
}

impl Grid {
    pub fn new(length: f64, n: usize) -> Result<Self, NumericsError> {
        if n < 16 || !n.is_power_of_two() {
            return Err(NumericsError::GridSize(n));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(NumericsError::GridLength(length));
        }
        Ok(Self { length, n })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| i as f64 * self.dx())
    }
}

/// Coefficients of `i q_t + iβ q_x + γ q_xx + δ q|q|² = 0` in real form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NlseParams {
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl NlseParams {
    pub fn new(beta: f64, gamma: f64, delta: f64) -> Self {
        Self { beta, gamma, delta }
    }

    /// Reads `beta`, `gamma` and `delta`.
    pub fn from_numeric(p: &NumericParams) -> Result<Self, NumericsError> {
        let get = |n: &str| {
            p.get(n)
                .copied()
                .ok_or_else(|| NumericsError::Reduction(ReductionError::MissingParam(n.into())))
        };
        Ok(Self::new(get("beta")?, get("gamma")?, get("delta")?))
    }

    pub fn to_numeric(self) -> NumericParams {
        NumericParams::from([
            ("beta".to_string(), self.beta),
            ("gamma".to_string(), self.gamma),
            ("delta".to_string(), self.delta),
        ])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub time: f64,
}

impl FieldState {
    pub fn new(grid: &Grid, u: Vec<f64>, v: Vec<f64>, time: f64) -> Result<Self, NumericsError> {
        for f in [&u, &v] {
            if f.len() != grid.n() {
                return Err(NumericsError::LengthMismatch {
                    expected: grid.n(),
                    got: f.len(),
                });
            }
        }
        let state = Self { u, v, time };
        if !state.is_finite() {
            return Err(NumericsError::NonFinite);
        }
        Ok(state)
    }

    pub fn zero(grid: &Grid) -> Self {
        Self {
            u: vec![0.0; grid.n()],
            v: vec![0.0; grid.n()],
            time: 0.0,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.u.iter().chain(&self.v).all(|x| x.is_finite()) && self.time.is_finite()
    }

    /// Max-norm distance between the fields of two states.
    pub fn max_diff(&self, other: &FieldState) -> f64 {
        self.u
            .iter()
            .zip(&other.u)
            .chain(self.v.iter().zip(&other.v))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// The state rotated by `θ` in the `(u, v)` plane.
    pub fn rotated(&self, theta: f64) -> FieldState {
        let (s, c) = theta.sin_cos();
        FieldState {
            u: self.u.iter().zip(&self.v).map(|(u, v)| u * c - v * s).collect(),
            v: self.u.iter().zip(&self.v).map(|(u, v)| u * s + v * c).collect(),
            time: self.time,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Derivative {
    First,
    Second,
}

/// Fourth-order periodic central difference.
pub fn spatial_derivative(f: &[f64], grid: &Grid, order: Derivative) -> Vec<f64> {
    let n = f.len();
    let dx = grid.dx();
    let at = |i: usize, k: isize| f[(i as isize + k).rem_euclid(n as isize) as usize];
    (0..n)
        .map(|i| match order {
            Derivative::First => (-at(i, 2) + 8.0 * at(i, 1) - 8.0 * at(i, -1) + at(i, -2)) / (12.0 * dx),
            Derivative::Second => {
                (-at(i, 2) + 16.0 * at(i, 1) - 30.0 * f[i] + 16.0 * at(i, -1) - at(i, -2)) / (12.0 * dx * dx)
            }
        })
        .collect()
}

/// `(u_t, v_t)` from `u_t = −βu_x + γv_xx − δv(u²+v²)`,
/// `v_t = −βv_x − γu_xx + δu(u²+v²)`.
pub fn rhs(state: &FieldState, grid: &Grid, p: &NlseParams) -> (Vec<f64>, Vec<f64>) {
    let ux = spatial_derivative(&state.u, grid, Derivative::First);
    let vx = spatial_derivative(&state.v, grid, Derivative::First);
    let uxx = spatial_derivative(&state.u, grid, Derivative::Second);
    let vxx = spatial_derivative(&state.v, grid, Derivative::Second);
    let n = state.u.len();
    let mut du = Vec::with_capacity(n);
    let mut dv = Vec::with_capacity(n);
    for i in 0..n {
        let (u, v) = (state.u[i], state.v[i]);
        let m = u * u + v * v;
        du.push(-p.beta * ux[i] + p.gamma * vxx[i] - p.delta * v * m);
        dv.push(-p.beta * vx[i] - p.gamma * uxx[i] + p.delta * u * m);
    }
    (du, dv)
}

fn shifted(state: &FieldState, k: &(Vec<f64>, Vec<f64>), h: f64) -> FieldState {
    FieldState {
        u: state.u.iter().zip(&k.0).map(|(a, b)| a + h * b).collect(),
        v: state.v.iter().zip(&k.1).map(|(a, b)| a + h * b).collect(),
        time: state.time + h,
    }
}

fn rk4(state: &FieldState, grid: &Grid, p: &NlseParams, dt: f64) -> FieldState {
    let k1 = rhs(state, grid, p);
    let k2 = rhs(&shifted(state, &k1, dt / 2.0), grid, p);
    let k3 = rhs(&shifted(state, &k2, dt / 2.0), grid, p);
    let k4 = rhs(&shifted(state, &k3, dt), grid, p);
    let combine = |f: &[f64], a: &[f64], b: &[f64], c: &[f64], d: &[f64]| -> Vec<f64> {
        (0..f.len())
            .map(|i| f[i] + dt / 6.0 * (a[i] + 2.0 * b[i] + 2.0 * c[i] + d[i]))
            .collect()
    };
    FieldState {
        u: combine(&state.u, &k1.0, &k2.0, &k3.0, &k4.0),
        v: combine(&state.v, &k1.1, &k2.1, &k3.1, &k4.1),
        time: state.time + dt,
    }
}

/// One classical RK4 step. A non-finite result is reported as a blow-up at
/// step 1; [`run`] reports the actual step number.
pub fn step_rk4(state: &FieldState, grid: &Grid, p: &NlseParams, dt: f64) -> Result<FieldState, NumericsError> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(NumericsError::Config(format!("dt must be positive, got {dt}")));
    }
    let next = rk4(state, grid, p, dt);
    if !next.is_finite() {
        return Err(NumericsError::Blowup {
            step: 1,
            time: next.time,
        });
    }
    Ok(next)
}
