//! Parameter extraction from measured I-V traces.
//!
//! The objective is the normalized RMSE between a recorded trace and the
//! model replayed over the recorded drive. It is minimized with BFGS in a
//! transformed space: positive magnitudes (resistances, exponents, rates)
//! are optimized as logarithms, thresholds linearly.

mod bfgs;
mod trace;

pub use bfgs::{central_gradient, minimize, BfgsOptions, BfgsReport};
pub use trace::{IvSample, IvTrace, IV_HEADER};

use crate::device::{self, DeviceParams, DeviceState};
use crate::error::{invalid, Error, Result};

/// Number of fitted parameters (`w_on`/`w_off` are held fixed).
pub const N_FIT_PARAMS: usize = 8;

/// Objective values at or below this count as an exact reproduction.
pub const EXACT_FIT_RMSE: f64 = 1e-12;

/// Names of the fitted parameters in vector order.
pub const FIT_PARAM_NAMES: [&str; N_FIT_PARAMS] =
    ["r_on", "r_off", "alpha_on", "alpha_off", "k_on", "k_off", "v_on", "v_off"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulateOptions {
    /// Initial state; `None` means `w_on`.
    pub initial_w: Option<f64>,
    /// Source resistance in series with the device.
    pub series_ohm: f64,
}

impl Default for SimulateOptions {
    fn default() -> Self {
        SimulateOptions { initial_w: None, series_ohm: 0.0 }
    }
}

/// Replay the recorded drive through the model, starting from `w_on`.
pub fn simulate_current(params: &DeviceParams, drive: &IvTrace) -> Result<IvTrace> {
    simulate_current_with(params, drive, &SimulateOptions::default())
}

/// Replay with explicit options.
///
/// Sample `k` reports the current through the state reached after integrating
/// the drive over all earlier intervals.
pub fn simulate_current_with(params: &DeviceParams, drive: &IvTrace, opts: &SimulateOptions) -> Result<IvTrace> {
    params.validate()?;
    if !(opts.series_ohm >= 0.0) {
        return invalid("series resistance must be non-negative");
    }
    let mut state = DeviceState::new(opts.initial_w.unwrap_or(params.w_on));
    let samples = drive.samples();
    let mut out = Vec::with_capacity(samples.len());
    for (k, s) in samples.iter().enumerate() {
        if k > 0 {
            let prev = &samples[k - 1];
            let r = device::resistance(params, state.w);
            let v_dev = prev.v * r / (r + opts.series_ohm);
            state = device::step(params, state, v_dev, s.t - prev.t)?;
        }
        let r = device::resistance(params, state.w);
        let i = s.v / (r + opts.series_ohm);
        out.push(IvSample { t: s.t, v: i * r, i });
    }
    IvTrace::new(out)
}

/// Normalized RMSE between a model and a reference trace:
/// `sqrt((sum dv^2 / sum v_real^2 + sum di^2 / sum i_real^2) / N)`.
pub fn rmse(model: &IvTrace, real: &IvTrace) -> Result<f64> {
    let (m, r) = (model.samples(), real.samples());
    if m.len() != r.len() {
        return invalid(format!("trace length mismatch: {} vs {}", m.len(), r.len()));
    }
    let v_energy: f64 = r.iter().map(|s| s.v * s.v).sum();
    let i_energy: f64 = r.iter().map(|s| s.i * s.i).sum();
    if !(v_energy > 0.0) || !(i_energy > 0.0) {
        return invalid("reference trace has zero voltage or current energy");
    }
    let dv: f64 = m.iter().zip(r).map(|(a, b)| (a.v - b.v).powi(2)).sum();
    let di: f64 = m.iter().zip(r).map(|(a, b)| (a.i - b.i).powi(2)).sum();
    Ok(((dv / v_energy + di / i_energy) / m.len() as f64).sqrt())
}

/// Parameters as the fitted vector, in [`FIT_PARAM_NAMES`] order.
pub fn params_to_vec(p: &DeviceParams) -> [f64; N_FIT_PARAMS] {
    [p.r_on, p.r_off, p.alpha_on, p.alpha_off, p.k_on, p.k_off, p.v_on, p.v_off]
}

/// Inverse of [`params_to_vec`]; `w_on`/`w_off` are taken from `base`.
pub fn params_from_vec(v: &[f64], base: &DeviceParams) -> DeviceParams {
    DeviceParams {
        r_on: v[0],
        r_off: v[1],
        alpha_on: v[2],
        alpha_off: v[3],
        k_on: v[4],
        k_off: v[5],
        v_on: v[6],
        v_off: v[7],
        w_on: base.w_on,
        w_off: base.w_off,
    }
}

/// Map a physical parameter vector into optimizer space.
pub fn to_search_space(p: &[f64]) -> [f64; N_FIT_PARAMS] {
    [p[0].ln(), p[1].ln(), p[2].ln(), p[3].ln(), p[4].ln(), (-p[5]).ln(), p[6], p[7]]
}

pub fn from_search_space(u: &[f64]) -> [f64; N_FIT_PARAMS] {
    [u[0].exp(), u[1].exp(), u[2].exp(), u[3].exp(), u[4].exp(), -u[5].exp(), u[6], u[7]]
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitConfig {
    pub initial: DeviceParams,
    /// Per-parameter lower bounds; `w_on`/`w_off` are ignored.
    pub lower: DeviceParams,
    pub upper: DeviceParams,
    pub grad_step: f64,
    pub max_iters: usize,
    pub tol: f64,
    pub simulate: SimulateOptions,
}

impl FitConfig {
    /// Bounds a factor `ratio` either side of every initial parameter.
    pub fn around(initial: DeviceParams, ratio: f64) -> Self {
        // scaling by ratio keeps the sign, so k_off / v_off bounds swap ends
        let x = params_to_vec(&initial);
        let lower = params_from_vec(&x.map(|v| if v > 0.0 { v / ratio } else { v * ratio }), &initial);
        let upper = params_from_vec(&x.map(|v| if v > 0.0 { v * ratio } else { v / ratio }), &initial);
        FitConfig {
            initial,
            lower,
            upper,
            grad_step: 1e-6,
            max_iters: 500,
            tol: 1e-14,
            simulate: SimulateOptions::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.initial.validate()?;
        if !(self.grad_step > 0.0) {
            return Err(Error::InvalidParams("grad_step must be positive".into()));
        }
        if self.max_iters < 1 {
            return Err(Error::InvalidParams("max_iters must be at least 1".into()));
        }
        if !(self.tol >= 0.0) {
            return Err(Error::InvalidParams("tol must be non-negative".into()));
        }
        let (x, lo, hi) = (params_to_vec(&self.initial), params_to_vec(&self.lower), params_to_vec(&self.upper));
        for i in 0..N_FIT_PARAMS {
            let name = FIT_PARAM_NAMES[i];
            if !(lo[i] <= x[i] && x[i] <= hi[i]) {
                return Err(Error::InvalidParams(format!("bounds for {name} do not bracket the initial value")));
            }
            // bounds may not cross the sign each parameter requires
            if (x[i] > 0.0 && lo[i] <= 0.0) || (x[i] < 0.0 && hi[i] >= 0.0) {
                return Err(Error::InvalidParams(format!("bounds for {name} cross zero")));
            }
        }
        Ok(())
    }

    fn search_bounds(&self) -> (Vec<f64>, Vec<f64>) {
        let a = to_search_space(&params_to_vec(&self.lower));
        let b = to_search_space(&params_to_vec(&self.upper));
        a.iter().zip(&b).map(|(x, y)| (x.min(*y), x.max(*y))).unzip()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub params: DeviceParams,
    pub rmse: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Accepted objective values, starting with the initial point.
    pub history: Vec<f64>,
}

/// Objective over search-space coordinates; invalid parameter sets give +inf.
pub fn objective(u: &[f64], real: &IvTrace, base: &DeviceParams, sim: &SimulateOptions) -> f64 {
    let params = params_from_vec(&from_search_space(u), base);
    match simulate_current_with(&params, real, sim).and_then(|m| rmse(&m, real)) {
        Ok(v) if v.is_finite() => v,
        _ => f64::INFINITY,
    }
}

/// Fit device parameters to `real` by projected BFGS.
pub fn fit(real: &IvTrace, config: &FitConfig) -> Result<FitResult> {
    config.validate()?;
    let base = config.initial;
    let u0 = to_search_space(&params_to_vec(&config.initial));
    let (lo, hi) = config.search_bounds();
    let opts = BfgsOptions {
        grad_step: config.grad_step,
        max_iters: config.max_iters,
        tol: config.tol,
        f_target: EXACT_FIT_RMSE,
        ..BfgsOptions::default()
    };
    let report = minimize(|u: &[f64]| objective(u, real, &base, &config.simulate), &u0, &lo, &hi, &opts)
        .ok_or(Error::InvalidStart)?;
    Ok(FitResult {
        params: params_from_vec(&from_search_space(&report.x), &base),
        rmse: report.f,
        iterations: report.iterations,
        converged: report.converged,
        history: report.history,
    })
}
