use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::expr::{CompiledExpr, Expr, Symbol};
use crate::reduction::{candidate_residuals, NumericParams, SolutionCandidate};

use super::{FieldState, Grid, NlseParams, NumericsError};

/// Initial data for a run.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    /// `a·e^{ikx}`.
    PlaneWave { a: f64, k: f64 },
    /// Three seeded Fourier modes with `|q| ≤ amplitude`.
    RandomModes { seed: u64, amplitude: f64 },
    /// `a·exp(−(x−x₀)²/(2σ²))·e^{ikx}`.
    Gaussian { a: f64, sigma: f64, k: f64, center: f64 },
    /// A closed-form candidate at `t = 0`.
    Candidate {
        candidate: Box<SolutionCandidate>,
        params: NumericParams,
    },
}

impl InitialCondition {
    pub fn state(&self, grid: &Grid, params: &NlseParams) -> Result<FieldState, NumericsError> {
        match self {
            Self::PlaneWave { a, k } => Ok(plane_wave(grid, params, *a, *k, 0.0)),
            Self::RandomModes { seed, amplitude } => Ok(random_modes(grid, *seed, *amplitude)),
            Self::Gaussian { a, sigma, k, center } => Ok(gaussian_packet(grid, *a, *sigma, *k, *center)),
            Self::Candidate { candidate, params } => candidate_state(candidate, params, grid, 0.0),
        }
    }
}

fn from_phase(grid: &Grid, a: f64, phase: impl Fn(f64) -> f64, time: f64) -> FieldState {
    let (u, v) = grid
        .points()
        .map(|x| {
            let (s, c) = phase(x).sin_cos();
            (a * c, a * s)
        })
        .unzip();
    FieldState { u, v, time }
}

/// Exact solution `a·e^{i(kx−ωt)}` with `ω = βk − γk² − δa²`.
pub fn plane_wave(grid: &Grid, p: &NlseParams, a: f64, k: f64, t: f64) -> FieldState {
    let omega = p.beta * k - p.gamma * k * k - p.delta * a * a;
    from_phase(grid, a, |x| k * x - omega * t, t)
}

/// The plane wave solving the spatially discretized system exactly: the
/// difference operators act on `e^{ikx}` as multiplication by `iκ₁` and
/// `−κ₂²`, so `ω = βκ₁ − γκ₂² − δa²`.
pub fn plane_wave_semidiscrete(grid: &Grid, p: &NlseParams, a: f64, k: f64, t: f64) -> FieldState {
    let h = grid.dx();
    let kappa1 = (8.0 * (k * h).sin() - (2.0 * k * h).sin()) / (6.0 * h);
    let kappa2 = (30.0 - 32.0 * (k * h).cos() + 2.0 * (2.0 * k * h).cos()) / (12.0 * h * h);
    let omega = p.beta * kappa1 - p.gamma * kappa2 - p.delta * a * a;
    from_phase(grid, a, |x| k * x - omega * t, t)
}

/// `u`, `v` each a sum of the three lowest periodic modes with seeded
/// amplitudes and phases, scaled so that `|q| ≤ amplitude`.
pub fn random_modes(grid: &Grid, seed: u64, amplitude: f64) -> FieldState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = 2.0 * PI / grid.length();
    let mut field = || {
        let modes: Vec<(f64, f64)> = (0..3)
            .map(|_| (rng.gen_range(0.2..1.0), rng.gen_range(0.0..2.0 * PI)))
            .collect();
        let total: f64 = modes.iter().map(|(c, _)| c).sum();
        let scale = amplitude / (2f64.sqrt() * total);
        grid.points()
            .map(|x| {
                modes
                    .iter()
                    .enumerate()
                    .map(|(m, (c, phi))| scale * c * ((m + 1) as f64 * base * x + phi).cos())
                    .sum()
            })
            .collect::<Vec<f64>>()
    };
    let u = field();
    let v = field();
    FieldState { u, v, time: 0.0 }
}

pub fn gaussian_packet(grid: &Grid, a: f64, sigma: f64, k: f64, center: f64) -> FieldState {
    let (u, v) = grid
        .points()
        .map(|x| {
            let env = a * (-(x - center).powi(2) / (2.0 * sigma * sigma)).exp();
            let (s, c) = (k * x).sin_cos();
            (env * c, env * s)
        })
        .unzip();
    FieldState { u, v, time: 0.0 }
}

fn slots(params: &NumericParams) -> Vec<Symbol> {
    let mut s = vec![Symbol::indep("x"), Symbol::indep("t")];
    s.extend(params.keys().map(|n| Symbol::param(n)));
    s
}

fn values(params: &NumericParams) -> Vec<f64> {
    let mut v = vec![0.0, 0.0];
    v.extend(params.values());
    v
}

fn compile(e: &Expr, params: &NumericParams) -> Result<CompiledExpr, NumericsError> {
    Ok(CompiledExpr::compile(e, &slots(params))?)
}

/// The candidate's fields on the grid at time `t`.
pub fn candidate_state(
    cand: &SolutionCandidate,
    params: &NumericParams,
    grid: &Grid,
    t: f64,
) -> Result<FieldState, NumericsError> {
    cand.check_constraints(params)?;
    let u = compile(&cand.u, params)?;
    let v = compile(&cand.v, params)?;
    let mut vals = values(params);
    vals[1] = t;
    let (mut us, mut vs) = (Vec::with_capacity(grid.n()), Vec::with_capacity(grid.n()));
    for x in grid.points() {
        vals[0] = x;
        us.push(u.eval(&vals));
        vs.push(v.eval(&vals));
    }
    FieldState::new(grid, us, vs, t)
}

/// `(max|G¹|, max|G²|)` of the candidate over the grid × `times` lattice,
/// from symbolic derivatives of its closed form.
pub fn residual_on_grid(
    cand: &SolutionCandidate,
    equations: &[Expr],
    grid: &Grid,
    times: &[f64],
    params: &NumericParams,
) -> Result<(f64, f64), NumericsError> {
    cand.check_constraints(params)?;
    let [g1, g2, _] = candidate_residuals(cand, equations)?;
    let g1 = compile(&g1, params)?;
    let g2 = compile(&g2, params)?;
    let mut vals = values(params);
    let (mut m1, mut m2) = (0f64, 0f64);
    for &t in times {
        vals[1] = t;
        for x in grid.points() {
            vals[0] = x;
            let (a, b) = (g1.eval(&vals), g2.eval(&vals));
            if !(a.is_finite() && b.is_finite()) {
                return Err(NumericsError::NonFinite);
            }
            m1 = m1.max(a.abs());
            m2 = m2.max(b.abs());
        }
    }
    Ok((m1, m2))
}
