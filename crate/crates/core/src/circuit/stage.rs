//! Synaptic stage (inverting amplifier around the memristor) and the state
//! calculation that feeds the next order.

use crate::circuit::modulation::{
    RuleTable, FIRST_ORDER_FORGET_V, FIRST_ORDER_LEARN_V, FIRST_ORDER_NATURAL_V, HIGHER_ORDER_FORGET_V,
    HIGHER_ORDER_NATURAL_V,
};
use crate::device::DeviceParams;
use crate::error::{invalid, Error, Result};

/// Feedback resistance that puts the 0.1 V state threshold at 50 kOhm.
pub const DEFAULT_R_F: f64 = 5e3;
pub const DEFAULT_STATE_THRESHOLD_V: f64 = 0.1;

/// Gain-adjustment profiles for higher-order learning voltages.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GainProfile {
    /// g = 1.8, clamp 0.47 V; peak memristor power stays near 10 uW.
    LowPower,
    /// g = 2.5, clamp 0.65 V; about 2.3x faster than first order.
    HighGain,
}

impl GainProfile {
    pub fn gain_and_clamp(self) -> (f64, f64) {
        match self {
            GainProfile::LowPower => (1.8, 0.47),
            GainProfile::HighGain => (2.5, 0.65),
        }
    }
}

/// `1` iff `v >= threshold`.
pub fn logic_level(v: f64, threshold: f64) -> bool {
    v >= threshold
}

/// Inverting amplifier output `-v_i * r_f / m`.
pub fn synaptic_output(v_i: f64, r_f: f64, m: f64) -> Result<f64> {
    if !(m > 0.0) || !(r_f > 0.0) {
        return invalid(format!("synaptic stage needs positive resistances (r_f = {r_f}, m = {m})"));
    }
    Ok(-v_i * r_f / m)
}

/// Divider output `r_f / m`, reported in volts.
pub fn state_signal(r_f: f64, m: f64) -> Result<f64> {
    if !(m > 0.0) {
        return invalid(format!("memristance must be positive, got {m}"));
    }
    Ok(r_f / m)
}

/// `clamp(g * s, 0, v_max)`.
pub fn adjust_learning_voltage(s: f64, g: f64, v_max: f64) -> f64 {
    (g * s).clamp(0.0, v_max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageConfig {
    pub device: DeviceParams,
    pub rules: RuleTable,
    pub r_f: f64,
    pub gain: f64,
    pub v_learn_max: f64,
    /// Level above which this stage's state signal reads as logic 1.
    pub state_threshold_v: f64,
    pub initial_w: f64,
}

impl StageConfig {
    /// First-order stage with the default voltages, starting OFF.
    pub fn first_order(device: DeviceParams) -> Self {
        StageConfig {
            device,
            rules: RuleTable::first_order(FIRST_ORDER_LEARN_V, FIRST_ORDER_FORGET_V, FIRST_ORDER_NATURAL_V),
            r_f: DEFAULT_R_F,
            gain: 1.0,
            v_learn_max: FIRST_ORDER_LEARN_V,
            state_threshold_v: DEFAULT_STATE_THRESHOLD_V,
            initial_w: device.w_on,
        }
    }

    pub fn higher_order(device: DeviceParams, gain: f64, v_learn_max: f64) -> Self {
        StageConfig {
            device,
            rules: RuleTable::higher_order(HIGHER_ORDER_FORGET_V, HIGHER_ORDER_NATURAL_V),
            r_f: DEFAULT_R_F,
            gain,
            v_learn_max,
            state_threshold_v: DEFAULT_STATE_THRESHOLD_V,
            initial_w: device.w_on,
        }
    }

    pub fn with_profile(device: DeviceParams, profile: GainProfile) -> Self {
        let (g, v) = profile.gain_and_clamp();
        StageConfig::higher_order(device, g, v)
    }

    pub fn is_first_order(&self) -> bool {
        self.rules.arity() == 2
    }

    /// Resistance at which the state signal crosses its logic threshold.
    pub fn threshold_resistance(&self) -> f64 {
        self.r_f / self.state_threshold_v
    }

    pub fn validate(&self) -> Result<()> {
        self.device.validate()?;
        self.rules.check_total()?;
        let bad = |m: &str| Err(Error::InvalidParams(m.to_string()));
        if !(self.r_f > 0.0) {
            return bad("r_f must be positive");
        }
        if !(self.gain > 0.0) {
            return bad("gain must be positive");
        }
        if !(self.v_learn_max > 0.0) {
            return bad("v_learn_max must be positive");
        }
        if !(self.state_threshold_v > 0.0) {
            return bad("state_threshold_v must be positive");
        }
        if !(self.initial_w >= self.device.w_on && self.initial_w <= self.device.w_off) {
            return bad("initial_w must lie within [w_on, w_off]");
        }
        Ok(())
    }
}
