//! Counter-based array training: every teacher pixel is compared with the
//! input vector, and the match count sets the pulse amplitude applied to the
//! device at that pixel.

use std::fmt;
use std::str::FromStr;

use crate::device;
use crate::error::{invalid, Error, Result};
use crate::vision::grid::{binarize, ArrayState, ImageGrid};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MatchPredicate {
    /// Equal after binarization.
    EqualBinary,
    /// Raw intensities within `tau`.
    AbsDiff { tau: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchScope {
    /// Each teacher pixel against every input entry.
    AllVector,
    /// Each teacher pixel against the input pixel at the same position.
    Corresponding,
}

impl fmt::Display for MatchScope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MatchScope::AllVector => "all-vector",
            MatchScope::Corresponding => "corresponding",
        })
    }
}

impl FromStr for MatchScope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all-vector" => Ok(MatchScope::AllVector),
            "corresponding" => Ok(MatchScope::Corresponding),
            _ => invalid(format!("unknown match scope `{s}` (expected all-vector or corresponding)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub binarize_threshold: f64,
    pub predicate: MatchPredicate,
    pub scope: MatchScope,
    pub v_min: f64,
    pub v_max: f64,
    pub pulse_dt: f64,
    pub dt: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            binarize_threshold: 0.5,
            predicate: MatchPredicate::EqualBinary,
            scope: MatchScope::AllVector,
            v_min: 0.0,
            v_max: 0.35,
            pulse_dt: 0.05,
            dt: device::DEFAULT_DT,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self, params: &device::DeviceParams) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParams(m.to_string()));
        if !(self.binarize_threshold > 0.0 && self.binarize_threshold < 1.0) {
            return bad("binarize_threshold must lie in (0, 1)");
        }
        if let MatchPredicate::AbsDiff { tau } = self.predicate {
            if !(tau >= 0.0) {
                return bad("tau must be non-negative");
            }
        }
        if !(self.v_min < self.v_max) {
            return bad("v_min must be below v_max");
        }
        if !(self.v_max > params.v_on) {
            return bad("v_max must exceed the device's v_on");
        }
        if !(self.pulse_dt > 0.0) || !(self.dt > 0.0) {
            return bad("pulse_dt and dt must be positive");
        }
        Ok(())
    }

    /// Integration steps per training pulse.
    pub fn steps_per_pulse(&self) -> usize {
        ((self.pulse_dt / self.dt).round() as usize).max(1)
    }
}

/// Match count for every teacher pixel, and the count that means "all matched".
pub fn match_counts(input: &ImageGrid, teacher: &ImageGrid, cfg: &TrainConfig) -> Result<(Vec<usize>, usize)> {
    if input.dims() != teacher.dims() {
        return invalid(format!("input is {:?} but teacher is {:?}", input.dims(), teacher.dims()));
    }
    let (a, b) = match cfg.predicate {
        MatchPredicate::EqualBinary => {
            (binarize(input, cfg.binarize_threshold), binarize(teacher, cfg.binarize_threshold))
        }
        MatchPredicate::AbsDiff { .. } => (input.clone(), teacher.clone()),
    };
    let hit = |x: f64, y: f64| match cfg.predicate {
        MatchPredicate::EqualBinary => x == y,
        MatchPredicate::AbsDiff { tau } => (x - y).abs() <= tau,
    };
    let (inp, tch) = (a.values(), b.values());
    let counts = match cfg.scope {
        MatchScope::AllVector => tch.iter().map(|&t| inp.iter().filter(|&&x| hit(x, t)).count()).collect(),
        MatchScope::Corresponding => tch.iter().zip(inp).map(|(&t, &x)| usize::from(hit(x, t))).collect(),
    };
    let full = match cfg.scope {
        MatchScope::AllVector => inp.len(),
        MatchScope::Corresponding => 1,
    };
    Ok((counts, full))
}

/// Pulse amplitude for a count: `v_min + (v_max - v_min) * count / full`.
pub fn count_voltage(count: usize, full: usize, cfg: &TrainConfig) -> f64 {
    cfg.v_min + (cfg.v_max - cfg.v_min) * count as f64 / full as f64
}

/// Per-pixel training voltages for one (input, teacher) pair.
pub fn training_voltages(input: &ImageGrid, teacher: &ImageGrid, cfg: &TrainConfig) -> Result<Vec<f64>> {
    let (counts, full) = match_counts(input, teacher, cfg)?;
    Ok(counts.into_iter().map(|c| count_voltage(c, full, cfg)).collect())
}

/// Apply one training pulse per cell.
pub fn train_pair(array: &ArrayState, input: &ImageGrid, teacher: &ImageGrid, cfg: &TrainConfig) -> Result<ArrayState> {
    cfg.validate(&array.params)?;
    if teacher.dims() != array.dims() {
        return invalid(format!("teacher is {:?} but the array is {:?}", teacher.dims(), array.dims()));
    }
    let volts = training_voltages(input, teacher, cfg)?;
    let steps = cfg.steps_per_pulse();
    let mut next = array.clone();
    let params = array.params;
    for (cell, v) in next.cells_mut().iter_mut().zip(volts) {
        for _ in 0..steps {
            *cell = device::step(&params, *cell, v, cfg.dt)?;
        }
    }
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::device::DeviceParams;
    use crate::vision::array_state;

    #[test]
    fn extreme_counts() {
        let cfg = TrainConfig::default();
        let ones = ImageGrid::filled(20, 20, 1.0).unwrap();
        let zeros = ImageGrid::filled(20, 20, 0.0).unwrap();
        let (c, full) = match_counts(&ones, &ones, &cfg).unwrap();
        assert!(c.iter().all(|&n| n == 400));
        assert_eq!(full, 400);
        assert_eq!(count_voltage(400, 400, &cfg), cfg.v_max);
        let (c, _) = match_counts(&zeros, &ones, &cfg).unwrap();
        assert!(c.iter().all(|&n| n == 0));
        assert_eq!(count_voltage(0, 400, &cfg), cfg.v_min);
    }

    /// Brute-force enumeration of all 4x4 comparisons on the 2x2 case.
    #[test]
    fn two_by_two_all_vector_counts() {
        let cfg = TrainConfig::default();
        let teacher = ImageGrid::new(2, 2, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        let input = ImageGrid::new(2, 2, vec![1.0, 1.0, 0.0, 0.0]).unwrap();
        let mut expected = vec![0usize; 4];
        for (p, e) in expected.iter_mut().enumerate() {
            for j in 0..4 {
                if teacher.values()[p] == input.values()[j] {
                    *e += 1;
                }
            }
        }
        let (counts, full) = match_counts(&input, &teacher, &cfg).unwrap();
        assert_eq!(counts, expected);
        assert_eq!(counts, vec![2, 2, 2, 2]);
        let v = training_voltages(&input, &teacher, &cfg).unwrap();
        let mid = cfg.v_min + 0.5 * (cfg.v_max - cfg.v_min);
        assert!(v.iter().all(|&x| (x - mid).abs() < 1e-15));
        assert_eq!(full, 4);
    }

    #[test]
    fn corresponding_scope_counts_positions() {
        let cfg = TrainConfig { scope: MatchScope::Corresponding, ..Default::default() };
        let teacher = ImageGrid::new(2, 2, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        let input = ImageGrid::new(2, 2, vec![1.0, 1.0, 0.0, 0.0]).unwrap();
        let (counts, full) = match_counts(&input, &teacher, &cfg).unwrap();
        assert_eq!(counts, vec![1, 0, 1, 0]);
        assert_eq!(full, 1);
    }

    #[test]
    fn abs_diff_predicate() {
        let cfg = TrainConfig { predicate: MatchPredicate::AbsDiff { tau: 0.1 }, ..Default::default() };
        let teacher = ImageGrid::new(1, 2, vec![0.5, 0.9]).unwrap();
        let input = ImageGrid::new(1, 2, vec![0.45, 0.62]).unwrap();
        let (counts, _) = match_counts(&input, &teacher, &cfg).unwrap();
        assert_eq!(counts, vec![1, 0]);
    }

    #[test]
    fn full_count_pulse_moves_toward_on() {
        let p = DeviceParams::default();
        let ones = ImageGrid::filled(20, 20, 1.0).unwrap();
        let mut array = ArrayState::standard(p);
        for _ in 0..3 {
            array = train_pair(&array, &ones, &ones, &TrainConfig::default()).unwrap();
        }
        // 3 pulses of 50 ms at 0.35 V: w = 3 * 0.05 * 4.23
        let expected = 1.0 - 3.0 * 0.05 * 4.23;
        for &n in array_state(&array).values() {
            assert!((n - expected).abs() < 1e-9, "{n}");
        }
    }

    #[test]
    fn rejects_bad_config_and_dims() {
        let p = DeviceParams::default();
        let a = ArrayState::standard(p);
        let img = ImageGrid::filled(20, 20, 1.0).unwrap();
        let small = ImageGrid::filled(2, 2, 1.0).unwrap();
        let cfg = TrainConfig { v_max: 0.1, ..Default::default() };
        assert!(train_pair(&a, &img, &img, &cfg).is_err());
        assert!(train_pair(&a, &small, &img, &TrainConfig::default()).is_err());
        assert!(train_pair(&a, &small, &small, &TrainConfig::default()).is_err());
    }
}
