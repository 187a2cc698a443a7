//! Voltage-controlled threshold memristor (VTEAM) behavioral model.
//!
//! The state variable `w` drifts only when the applied voltage leaves the
//! dead zone `(v_off, v_on)`. Positive overdrive pushes `w` toward `w_off`,
//! which maps to the low-resistance ON state; negative overdrive pushes it
//! toward `w_on` (high resistance). Windows are rectangular and applied as a
//! post-step clamp.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Default integration step (0.1 ms).
pub const DEFAULT_DT: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviceParams {
    pub r_on: f64,
    pub r_off: f64,
    pub alpha_on: f64,
    pub alpha_off: f64,
    pub k_on: f64,
    pub k_off: f64,
    pub v_on: f64,
    pub v_off: f64,
    pub w_on: f64,
    pub w_off: f64,
}

impl Default for DeviceParams {
    /// Parameters extracted for the self-directed channel device.
    fn default() -> Self {
        DeviceParams {
            r_on: 20e3,
            r_off: 190e3,
            alpha_on: 1.0,
            alpha_off: 1.0,
            k_on: 2.82,
            k_off: -18.33,
            v_on: 0.14,
            v_off: -0.16,
            w_on: 0.0,
            w_off: 1.0,
        }
    }
}

impl DeviceParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("r_on", self.r_on),
            ("r_off", self.r_off),
            ("alpha_on", self.alpha_on),
            ("alpha_off", self.alpha_off),
            ("k_on", self.k_on),
            ("k_off", self.k_off),
            ("v_on", self.v_on),
            ("v_off", self.v_off),
            ("w_on", self.w_on),
            ("w_off", self.w_off),
        ];
        for (name, value) in fields {
            if !value.is_finite() {
                return Err(Error::InvalidParams(format!("{name} must be finite")));
            }
        }
        let check = |ok: bool, msg: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidParams(msg.to_string()))
            }
        };
        check(self.r_on > 0.0, "r_on must be positive")?;
        check(self.r_on < self.r_off, "r_on must be below r_off")?;
        check(self.v_on > 0.0, "v_on must be positive")?;
        check(self.v_off < 0.0, "v_off must be negative")?;
        check(self.k_on > 0.0, "k_on must be positive")?;
        check(self.k_off < 0.0, "k_off must be negative")?;
        check(self.alpha_on > 0.0, "alpha_on must be positive")?;
        check(self.alpha_off > 0.0, "alpha_off must be positive")?;
        check(self.w_on < self.w_off, "w_on must be below w_off")
    }

    /// Full state span `w_off - w_on`.
    #[inline]
    pub fn span(&self) -> f64 {
        self.w_off - self.w_on
    }

    /// State that corresponds to resistance `r` (inverse of [`resistance`]).
    pub fn state_for_resistance(&self, r: f64) -> f64 {
        let n = (r / self.r_on).ln() / (self.r_off / self.r_on).ln();
        (self.w_off - n * self.span()).clamp(self.w_on, self.w_off)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviceState {
    pub w: f64,
}

impl DeviceState {
    pub fn new(w: f64) -> Self {
        DeviceState { w }
    }

    /// High-resistance state.
    pub fn off(params: &DeviceParams) -> Self {
        DeviceState { w: params.w_on }
    }

    /// Low-resistance state.
    pub fn on(params: &DeviceParams) -> Self {
        DeviceState { w: params.w_off }
    }
}

/// State derivative dw/dt for voltage `v` at state `w`.
///
/// Exactly at a threshold the power-law branch is evaluated, which gives 0.
pub fn drift_rate(params: &DeviceParams, w: f64, v: f64) -> Result<f64> {
    if !v.is_finite() || !w.is_finite() {
        return invalid(format!("non-finite drive (w = {w}, v = {v})"));
    }
    let rate = if v >= params.v_on {
        if w >= params.w_off {
            0.0
        } else {
            params.k_on * (v / params.v_on - 1.0).powf(params.alpha_on)
        }
    } else if v <= params.v_off {
        if w <= params.w_on {
            0.0
        } else {
            params.k_off * (v / params.v_off - 1.0).powf(params.alpha_off)
        }
    } else {
        0.0
    };
    Ok(rate)
}

/// Memristance for state `w`; `w_off` maps to `r_on`, `w_on` to `r_off`.
pub fn resistance(params: &DeviceParams, w: f64) -> f64 {
    let x = (params.w_off - w) / params.span();
    params.r_on * (params.r_off / params.r_on).powf(x)
}

/// Log-resistance position in [0, 1]: 0 at `r_on`, 1 at `r_off`.
pub fn normalized_state(params: &DeviceParams, w: f64) -> f64 {
    ((params.w_off - w) / params.span()).clamp(0.0, 1.0)
}

/// Same as [`normalized_state`] but starting from a resistance value.
pub fn normalized_resistance(params: &DeviceParams, r: f64) -> f64 {
    (r / params.r_on).ln() / (params.r_off / params.r_on).ln()
}

/// One forward-Euler step followed by the window clamp.
pub fn step(params: &DeviceParams, state: DeviceState, v: f64, dt: f64) -> Result<DeviceState> {
    if !(dt > 0.0) || !dt.is_finite() {
        return invalid(format!("time step must be positive and finite, got {dt}"));
    }
    let rate = drift_rate(params, state.w, v)?;
    let w = (state.w + dt * rate).clamp(params.w_on, params.w_off);
    Ok(DeviceState { w })
}

/// Instantaneous dissipation `v^2 / r`.
pub fn power(v: f64, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return invalid(format!("resistance must be positive, got {r}"));
    }
    Ok(v * v / r)
}

/// Thin stateful wrapper used by the circuit and array code.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Memristor {
    pub params: DeviceParams,
    pub state: DeviceState,
}

impl Memristor {
    pub fn new(params: DeviceParams, state: DeviceState) -> Self {
        Memristor { params, state }
    }

    pub fn resistance(&self) -> f64 {
        resistance(&self.params, self.state.w)
    }

    pub fn normalized_state(&self) -> f64 {
        normalized_state(&self.params, self.state.w)
    }

    pub fn apply(&mut self, v: f64, dt: f64) -> Result<()> {
        self.state = step(&self.params, self.state, v, dt)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn p() -> DeviceParams {
        DeviceParams::default()
    }

    #[test]
    fn drift_rate_examples() {
        assert_relative_eq!(drift_rate(&p(), 0.5, 0.35).unwrap(), 4.23, epsilon = 1e-12);
        assert_eq!(drift_rate(&p(), 0.3, 0.10).unwrap(), 0.0);
        assert_relative_eq!(drift_rate(&p(), 0.5, -0.32).unwrap(), -18.33, epsilon = 1e-12);
        assert_eq!(drift_rate(&p(), 1.0, 0.35).unwrap(), 0.0);
        assert_eq!(drift_rate(&p(), 0.0, -0.32).unwrap(), 0.0);
    }

    #[test]
    fn drift_rate_at_threshold_is_zero() {
        assert_eq!(drift_rate(&p(), 0.5, 0.14).unwrap(), 0.0);
        assert_eq!(drift_rate(&p(), 0.5, -0.16).unwrap(), 0.0);
    }

    #[test]
    fn drift_rate_rejects_non_finite() {
        assert!(drift_rate(&p(), 0.5, f64::NAN).is_err());
        assert!(drift_rate(&p(), f64::INFINITY, 0.2).is_err());
    }

    #[test]
    fn resistance_examples() {
        assert_relative_eq!(resistance(&p(), 1.0), 20e3, max_relative = 1e-12);
        assert_relative_eq!(resistance(&p(), 0.0), 190e3, max_relative = 1e-12);
        assert_relative_eq!(resistance(&p(), 0.5), (20e3f64 * 190e3).sqrt(), max_relative = 1e-12);
        assert_relative_eq!(resistance(&p(), 0.5), 61_644.14, max_relative = 1e-6);
    }

    #[test]
    fn normalized_state_examples() {
        assert_eq!(normalized_state(&p(), 1.0), 0.0);
        assert_eq!(normalized_state(&p(), 0.0), 1.0);
        assert_relative_eq!(normalized_resistance(&p(), 50e3), 0.4070, epsilon = 1e-4);
        let w = p().state_for_resistance(50e3);
        assert_relative_eq!(resistance(&p(), w), 50e3, max_relative = 1e-12);
    }

    #[test]
    fn step_examples() {
        let s = step(&p(), DeviceState::new(0.0), 0.35, 1e-3).unwrap();
        assert_relative_eq!(s.w, 0.00423, epsilon = 1e-12);
        let s = step(&p(), DeviceState::new(0.37), 0.0, 0.5).unwrap();
        assert_eq!(s.w, 0.37);
        assert!(step(&p(), DeviceState::new(0.3), 0.2, 0.0).is_err());
        assert!(step(&p(), DeviceState::new(0.3), 0.2, -1e-3).is_err());
    }

    #[test]
    fn power_examples() {
        assert_relative_eq!(power(0.35, 20e3).unwrap(), 6.125e-6, max_relative = 1e-12);
        assert_eq!(power(0.0, 1234.0).unwrap(), 0.0);
        assert_relative_eq!(power(0.45, 20e3).unwrap(), 10.125e-6, max_relative = 1e-12);
        assert!(power(0.1, 0.0).is_err());
    }

    #[test]
    fn validation_names_violated_invariant() {
        let mut bad = p();
        bad.v_on = -0.1;
        let err = bad.validate().unwrap_err().to_string();
        assert!(err.contains("v_on must be positive"), "{err}");
        let mut bad = p();
        bad.r_off = 10e3;
        assert!(bad.validate().is_err());
        assert!(p().validate().is_ok());
    }
}
