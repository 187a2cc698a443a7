//! Fixed-step simulation of an N-order associative chain.

use std::fmt::Write as _;

use crate::circuit::modulation::Scheme;
use crate::circuit::schedule::{sample_signal, SignalRole, StimulusSchedule};
use crate::circuit::stage::{adjust_learning_voltage, logic_level, state_signal, synaptic_output, StageConfig};
use crate::device::{self, DeviceState, DEFAULT_DT};
use crate::error::{invalid, Error, Result};

pub const DEFAULT_LOGIC_THRESHOLD_V: f64 = 0.5;
/// Sub-threshold read amplitude for the response path.
pub const DEFAULT_READOUT_V: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct ChainConfig {
    pub stages: Vec<StageConfig>,
    pub schedule: StimulusSchedule,
    pub dt: f64,
    pub duration: f64,
    pub logic_threshold: f64,
    pub readout_amplitude: f64,
}

impl ChainConfig {
    pub fn new(stages: Vec<StageConfig>, schedule: StimulusSchedule, duration: f64) -> Self {
        ChainConfig {
            stages,
            schedule,
            dt: DEFAULT_DT,
            duration,
            logic_threshold: DEFAULT_LOGIC_THRESHOLD_V,
            readout_amplitude: DEFAULT_READOUT_V,
        }
    }

    pub fn order(&self) -> usize {
        self.stages.len()
    }

    pub fn n_steps(&self) -> usize {
        (self.duration / self.dt).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParams(m));
        if self.stages.is_empty() {
            return bad("a chain needs at least one stage".into());
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.duration > 0.0) || !self.duration.is_finite() {
            return bad(format!("duration must be positive, got {}", self.duration));
        }
        if !(self.logic_threshold > 0.0) {
            return bad("logic threshold must be positive".into());
        }
        if !self.readout_amplitude.is_finite() {
            return bad("readout amplitude must be finite".into());
        }
        if self.schedule.n_rings() != self.stages.len() {
            return bad(format!(
                "schedule defines {} ring signals but the chain has {} stages",
                self.schedule.n_rings(),
                self.stages.len()
            ));
        }
        for (k, stage) in self.stages.iter().enumerate() {
            stage.validate().map_err(|e| Error::InvalidParams(format!("stage {}: {e}", k + 1)))?;
            if (k == 0) != stage.is_first_order() {
                return bad(format!(
                    "stage {} must use the {} truth table",
                    k + 1,
                    if k == 0 { "first-order" } else { "higher-order" }
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageSample {
    pub modulation_v: f64,
    pub scheme: Scheme,
    pub resistance: f64,
    pub state_signal: f64,
    pub response_v: f64,
    pub power_w: f64,
}

/// Per-stage constants needed to interpret a trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageInfo {
    pub r_on: f64,
    /// Resistance at which the state signal reads as logic 1.
    pub threshold_ohm: f64,
}

/// One row per time step: signals sampled at `t`, stage quantities after
/// the device has been driven over `[t, t + dt]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimTrace {
    pub dt: f64,
    pub logic_threshold: f64,
    pub stage_info: Vec<StageInfo>,
    pub times: Vec<f64>,
    /// Food then ring 1..N.
    pub signals: Vec<Vec<f64>>,
    pub stages: Vec<Vec<StageSample>>,
}

impl SimTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn order(&self) -> usize {
        self.stage_info.len()
    }

    pub fn header(&self) -> String {
        let mut h = String::from("t_s,food_v");
        for k in 1..=self.order() {
            let _ = write!(h, ",ring{k}_v");
        }
        for k in 1..=self.order() {
            let _ = write!(h, ",mod{k}_v,scheme{k},r{k}_ohm,s{k}_v,resp{k}_v,p{k}_w");
        }
        h
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.len() * (40 + 100 * self.order()));
        out.push_str(&self.header());
        out.push('\n');
        for row in 0..self.len() {
            let _ = write!(out, "{}", self.times[row]);
            for v in &self.signals[row] {
                let _ = write!(out, ",{v}");
            }
            for s in &self.stages[row] {
                let _ = write!(
                    out,
                    ",{},{},{},{},{},{}",
                    s.modulation_v, s.scheme, s.resistance, s.state_signal, s.response_v, s.power_w
                );
            }
            out.push('\n');
        }
        out
    }

    /// Index of the last row in which any stimulus reads as logic 1.
    pub fn last_stimulus_row(&self) -> Option<usize> {
        self.signals.iter().rposition(|row| row.iter().any(|&v| logic_level(v, self.logic_threshold)))
    }
}

/// Quantize a grid time so CSV timestamps print cleanly.
fn grid_time(k: usize, dt: f64) -> f64 {
    (k as f64 * dt * 1e12).round() / 1e12
}

/// Advance the chain over the configured duration.
pub fn run_chain(config: &ChainConfig) -> Result<SimTrace> {
    config.validate()?;
    let n = config.order();
    let steps = config.n_steps();
    if steps == 0 {
        return invalid("duration is shorter than one time step");
    }
    let roles: Vec<SignalRole> = config.schedule.roles().collect();
    let mut states: Vec<DeviceState> = config.stages.iter().map(|s| DeviceState::new(s.initial_w)).collect();

    let mut trace = SimTrace {
        dt: config.dt,
        logic_threshold: config.logic_threshold,
        stage_info: config
            .stages
            .iter()
            .map(|s| StageInfo { r_on: s.device.r_on, threshold_ohm: s.threshold_resistance() })
            .collect(),
        times: Vec::with_capacity(steps),
        signals: Vec::with_capacity(steps),
        stages: Vec::with_capacity(steps),
    };

    let mut bits = vec![false; n + 1];
    for k in 0..steps {
        let t = grid_time(k, config.dt);
        let sig = roles.iter().map(|&r| sample_signal(&config.schedule, r, t)).collect::<Result<Vec<f64>>>()?;
        for (b, v) in bits.iter_mut().zip(&sig) {
            *b = logic_level(*v, config.logic_threshold);
        }

        let mut row = Vec::with_capacity(n);
        let mut prev_state_signal = 0.0;
        let mut prev_state_bit = false;
        for (idx, stage) in config.stages.iter().enumerate() {
            let modulation = if idx == 0 {
                stage.rules.select(&[bits[0], bits[1]], 0.0)?
            } else {
                let v_adj = adjust_learning_voltage(prev_state_signal, stage.gain, stage.v_learn_max);
                stage.rules.select(&[prev_state_bit, bits[idx], bits[idx + 1]], v_adj)?
            };
            states[idx] = device::step(&stage.device, states[idx], modulation.voltage, config.dt)?;
            let m = device::resistance(&stage.device, states[idx].w);
            let s = state_signal(stage.r_f, m)?;
            let read = if bits[idx + 1] { config.readout_amplitude } else { 0.0 };
            row.push(StageSample {
                modulation_v: modulation.voltage,
                scheme: modulation.scheme,
                resistance: m,
                state_signal: s,
                response_v: synaptic_output(read, stage.r_f, m)?,
                power_w: device::power(modulation.voltage, m)?,
            });
            prev_state_signal = s;
            prev_state_bit = logic_level(s, stage.state_threshold_v);
        }

        trace.times.push(t);
        trace.signals.push(sig);
        trace.stages.push(row);
    }
    Ok(trace)
}
