use std::io::{self, Write};

use crate::expr::{CompiledExpr, Symbol};
use crate::jet::ConservedVector;

use super::{rhs, rk4, spatial_derivative, Derivative, FieldState, Grid, NlseParams, NumericsError};

/// Grid quantities a density may read, in slot order after `x` and `t`.
const FIELD_SLOTS: [(&str, &[(&str, u32)]); 8] = [
    ("u", &[]),
    ("u", &[("x", 1)]),
    ("u", &[("x", 2)]),
    ("v", &[]),
    ("v", &[("x", 1)]),
    ("v", &[("x", 2)]),
    ("u", &[("t", 1)]),
    ("v", &[("t", 1)]),
];

/// Compiled densities `Tᵗ` of several conserved vectors, integrated by the
/// rectangle rule. Explicit `x` and `t` are bound to the grid points and
/// the state time; `u_t`, `v_t` are taken from the evolution form.
#[derive(Debug, Clone)]
pub struct QuantityMonitor {
    densities: Vec<CompiledExpr>,
    params: NlseParams,
    needs_time_derivative: bool,
}

impl QuantityMonitor {
    pub fn new(vectors: &[ConservedVector], params: &NlseParams) -> Result<Self, NumericsError> {
        let mut slots = vec![Symbol::indep("x"), Symbol::indep("t")];
        slots.extend(FIELD_SLOTS.iter().map(|(d, o)| Symbol::jet(d, o)));
        let numeric = params.to_numeric();
        slots.extend(numeric.keys().map(|n| Symbol::param(n)));
        let mut needs_time_derivative = false;
        let mut densities = Vec::with_capacity(vectors.len());
        for t in vectors {
            let density = t.density();
            for s in density.symbols() {
                if let Some(j) = s.as_jet() {
                    if !slots.contains(&s) {
                        return Err(NumericsError::UnsupportedDensity(j.to_string()));
                    }
                    needs_time_derivative |= j.order_in("t") > 0;
                }
            }
            densities.push(CompiledExpr::compile(density, &slots)?);
        }
        Ok(Self {
            densities,
            params: *params,
            needs_time_derivative,
        })
    }

    pub fn len(&self) -> usize {
        self.densities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.densities.is_empty()
    }

    pub fn evaluate(&self, state: &FieldState, grid: &Grid) -> Vec<f64> {
        let d = |f: &[f64], o| spatial_derivative(f, grid, o);
        let fields = [
            state.u.clone(),
            d(&state.u, Derivative::First),
            d(&state.u, Derivative::Second),
            state.v.clone(),
            d(&state.v, Derivative::First),
            d(&state.v, Derivative::Second),
        ];
        let (ut, vt) = if self.needs_time_derivative {
            rhs(state, grid, &self.params)
        } else {
            (vec![0.0; grid.n()], vec![0.0; grid.n()])
        };
        let param_values: Vec<f64> = self.params.to_numeric().into_values().collect();
        let mut slot = vec![0.0; 2 + FIELD_SLOTS.len() + param_values.len()];
        slot[1] = state.time;
        slot[2 + FIELD_SLOTS.len()..].copy_from_slice(&param_values);
        let mut sums = vec![0.0; self.densities.len()];
        for (i, x) in grid.points().enumerate() {
            slot[0] = x;
            for (k, f) in fields.iter().enumerate() {
                slot[2 + k] = f[i];
            }
            slot[8] = ut[i];
            slot[9] = vt[i];
            for (sum, c) in sums.iter_mut().zip(&self.densities) {
                *sum += c.eval(&slot);
            }
        }
        sums.iter().map(|s| s * grid.dx()).collect()
    }
}

/// `Σᵢ Tᵗ(xᵢ) dx` for one conserved vector.
pub fn conserved_quantity(
    t: &ConservedVector,
    state: &FieldState,
    grid: &Grid,
    params: &NlseParams,
) -> Result<f64, NumericsError> {
    Ok(QuantityMonitor::new(std::slice::from_ref(t), params)?.evaluate(state, grid)[0])
}

/// Samples of the monitored quantities over time.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct QuantitySeries {
    times: Vec<f64>,
    /// `values[q][k]` is quantity `q` at `times[k]`.
    values: Vec<Vec<f64>>,
}

impl QuantitySeries {
    pub fn new(quantities: usize) -> Self {
        Self {
            times: Vec::new(),
            values: vec![Vec::new(); quantities],
        }
    }

    /// Appends a sample; times must increase strictly.
    pub fn push(&mut self, time: f64, values: &[f64]) -> Result<(), NumericsError> {
        if values.len() != self.values.len() {
            return Err(NumericsError::Config(format!(
                "sample has {} values, series tracks {}",
                values.len(),
                self.values.len()
            )));
        }
        if self.times.last().is_some_and(|last| time <= *last) {
            return Err(NumericsError::Config(format!("sample time {time} does not increase")));
        }
        self.times.push(time);
        for (series, v) in self.values.iter_mut().zip(values) {
            series.push(*v);
        }
        Ok(())
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self, quantity: usize) -> &[f64] {
        &self.values[quantity]
    }

    pub fn quantities(&self) -> usize {
        self.values.len()
    }

    /// `max_k |Q(t_k) − Q(t_0)| / max(1, |Q(t_0)|)`.
    pub fn drift(&self, quantity: usize) -> f64 {
        let v = &self.values[quantity];
        let Some(first) = v.first() else { return 0.0 };
        let worst = v.iter().map(|x| (x - first).abs()).fold(0.0, f64::max);
        worst / first.abs().max(1.0)
    }

    pub fn drifts(&self) -> Vec<f64> {
        (0..self.values.len()).map(|q| self.drift(q)).collect()
    }

    /// `time,Q1,...,Qn` with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        write!(w, "time")?;
        for q in 1..=self.values.len() {
            write!(w, ",Q{q}")?;
        }
        writeln!(w)?;
        for (k, t) in self.times.iter().enumerate() {
            write!(w, "{t:.16e}")?;
            for series in &self.values {
                write!(w, ",{:.16e}", series[k])?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub grid: Grid,
    pub params: NlseParams,
    pub t_end: f64,
    pub dt: f64,
    /// Steps between samples; the first and last states are always sampled.
    pub sample_every: usize,
}

/// Integrates from `init` over `t_end` with `round(t_end/dt)` equal steps,
/// sampling the densities of `vectors`.
pub fn run(
    config: &SimConfig,
    init: &FieldState,
    vectors: &[ConservedVector],
) -> Result<(QuantitySeries, FieldState), NumericsError> {
    let SimConfig {
        grid,
        params,
        t_end,
        dt,
        sample_every,
    } = *config;
    if !(t_end.is_finite() && t_end > 0.0 && dt.is_finite() && dt > 0.0) {
        return Err(NumericsError::Config(format!(
            "need positive T and dt, got T = {t_end}, dt = {dt}"
        )));
    }
    if sample_every == 0 {
        return Err(NumericsError::Config(
            "sample interval must be at least one step".into(),
        ));
    }
    if init.u.len() != grid.n() {
        return Err(NumericsError::LengthMismatch {
            expected: grid.n(),
            got: init.u.len(),
        });
    }
    let steps = (t_end / dt).round() as usize;
    if steps == 0 {
        return Err(NumericsError::Config(format!("dt = {dt} exceeds T = {t_end}")));
    }
    let h = t_end / steps as f64;
    let monitor = QuantityMonitor::new(vectors, &params)?;
    let mut series = QuantitySeries::new(monitor.len());
    let mut state = init.clone();
    series.push(state.time, &monitor.evaluate(&state, &grid))?;
    for step in 1..=steps {
        state = rk4(&state, &grid, &params, h);
        state.time = init.time + step as f64 * h;
        if !state.is_finite() {
            return Err(NumericsError::Blowup { step, time: state.time });
        }
        if step % sample_every == 0 || step == steps {
            series.push(state.time, &monitor.evaluate(&state, &grid))?;
        }
    }
    Ok((series, state))
}
