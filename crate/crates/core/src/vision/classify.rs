//! Similarity read-out and semantic labeling through a second-order label device.

use crate::device::{self, DeviceParams, DeviceState};
use crate::error::{invalid, Error, Result};
use crate::vision::grid::{array_state, binarize, ArrayState, ImageGrid};

/// Mean squared difference between the array state and the state an ideal
/// prototype would leave behind (`1 - intensity`, since learned cells sit
/// at normalized state 0). Lower means more similar.
pub fn similarity(state: &ImageGrid, img: &ImageGrid) -> Result<f64> {
    if state.dims() != img.dims() {
        return invalid(format!("state is {:?} but image is {:?}", state.dims(), img.dims()));
    }
    let sum: f64 = state.values().iter().zip(img.values()).map(|(s, x)| (s - (1.0 - x)).powi(2)).sum();
    Ok(sum / state.len() as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct InferConfig {
    pub similarity_threshold: f64,
    pub binarize_threshold: f64,
    pub label_device: DeviceParams,
    pub label_learn_v: f64,
    pub label_forget_v: f64,
    pub label_pulse_s: f64,
    pub dt: f64,
    pub positive_label: String,
    pub negative_label: String,
}

impl Default for InferConfig {
    fn default() -> Self {
        InferConfig {
            similarity_threshold: 0.25,
            binarize_threshold: 0.5,
            label_device: DeviceParams::default(),
            label_learn_v: 0.35,
            label_forget_v: -0.175,
            label_pulse_s: 0.3,
            dt: device::DEFAULT_DT,
            positive_label: "cat".into(),
            negative_label: "non-cat".into(),
        }
    }
}

impl InferConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParams(m.to_string()));
        self.label_device.validate()?;
        if !(self.similarity_threshold > 0.0 && self.similarity_threshold < 1.0) {
            return bad("similarity_threshold must lie in (0, 1)");
        }
        if !(self.binarize_threshold > 0.0 && self.binarize_threshold < 1.0) {
            return bad("binarize_threshold must lie in (0, 1)");
        }
        if !(self.label_learn_v > self.label_device.v_on) {
            return bad("label_learn_v must exceed the label device's v_on");
        }
        if !(self.label_forget_v < self.label_device.v_off) {
            return bad("label_forget_v must be below the label device's v_off");
        }
        if !(self.label_pulse_s > 0.0) || !(self.dt > 0.0) {
            return bad("label_pulse_s and dt must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub similarity: f64,
    pub positive: bool,
    pub label: String,
    pub label_resistance: f64,
}

/// Score `img` against the learned array and drive a fresh (OFF) label
/// device: learning pulse when similar enough, forgetting pulse otherwise.
/// The label is read back from the device resistance against 50 kOhm.
pub fn classify(array: &ArrayState, img: &ImageGrid, cfg: &InferConfig) -> Result<Classification> {
    cfg.validate()?;
    let s = similarity(&array_state(array), &binarize(img, cfg.binarize_threshold))?;
    let v = if s < cfg.similarity_threshold { cfg.label_learn_v } else { cfg.label_forget_v };
    let p = &cfg.label_device;
    let mut state = DeviceState::off(p);
    let steps = ((cfg.label_pulse_s / cfg.dt).round() as usize).max(1);
    for _ in 0..steps {
        state = device::step(p, state, v, cfg.dt)?;
    }
    let r = device::resistance(p, state.w);
    let positive = r < LABEL_THRESHOLD_OHM;
    Ok(Classification {
        similarity: s,
        positive,
        label: if positive { cfg.positive_label.clone() } else { cfg.negative_label.clone() },
        label_resistance: r,
    })
}

/// Resistance separating the two label states.
pub const LABEL_THRESHOLD_OHM: f64 = 50e3;

/// Midpoint between the means of two similarity clusters.
pub fn calibrate_threshold(positive: &[f64], negative: &[f64]) -> Result<f64> {
    if positive.is_empty() || negative.is_empty() {
        return invalid("calibration needs at least one sample per class");
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    Ok(0.5 * (mean(positive) + mean(negative)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn proto() -> ImageGrid {
        ImageGrid::from_fn(20, 20, |r, c| if (r * 7 + c * 3) % 5 < 3 { 1.0 } else { 0.0 }).unwrap()
    }

    #[test]
    fn similarity_examples() {
        let p = proto();
        assert_eq!(similarity(&p.inverted(), &p).unwrap(), 0.0);
        let zero_state = ImageGrid::filled(20, 20, 0.0).unwrap();
        let all_bright = ImageGrid::filled(20, 20, 1.0).unwrap();
        assert_eq!(similarity(&zero_state, &all_bright).unwrap(), 0.0);
        assert_eq!(similarity(&zero_state, &all_bright.inverted()).unwrap(), 1.0);
        let half = ImageGrid::from_fn(20, 20, |r, _| if r < 10 { 1.0 } else { 0.0 }).unwrap();
        assert_eq!(similarity(&zero_state, &half).unwrap(), 0.5);
    }

    #[test]
    fn similarity_is_symmetric_in_the_compared_patterns() {
        let a = proto().inverted();
        let b = ImageGrid::from_fn(20, 20, |r, c| ((r + c) % 2) as f64).unwrap();
        let ab = similarity(&a, &b).unwrap();
        let ba = similarity(&b.inverted(), &a.inverted()).unwrap();
        assert_eq!(ab, ba);
    }

    #[test]
    fn classify_prototype_and_complement() {
        let p = proto();
        let array = ArrayState::from_normalized(DeviceParams::default(), &p.inverted());
        let cfg = InferConfig::default();
        let yes = classify(&array, &p, &cfg).unwrap();
        assert_eq!(yes.similarity, 0.0);
        assert!(yes.positive);
        assert_eq!(yes.label, "cat");
        assert!(yes.label_resistance < 25e3);
        let no = classify(&array, &p.inverted(), &cfg).unwrap();
        assert_eq!(no.similarity, 1.0);
        assert!(!no.positive);
        assert_eq!(no.label, "non-cat");
        assert_eq!(no.label_resistance, 190e3);
    }

    #[test]
    fn calibration_midpoint() {
        assert_eq!(calibrate_threshold(&[0.1, 0.1], &[0.5]).unwrap(), 0.3);
        assert!(calibrate_threshold(&[], &[0.5]).is_err());
    }

    #[test]
    fn config_invariants() {
        let cfg = InferConfig { label_forget_v: -0.1, ..Default::default() };
        assert!(cfg.validate().is_err());
        let cfg = InferConfig { similarity_threshold: 1.0, ..Default::default() };
        assert!(cfg.validate().is_err());
    }
}
