//! Associative learning circuits: stimulus encoding, truth-table modulation,
//! synaptic/state stages, the chain engine and its metrics.

mod engine;
mod metrics;
mod modulation;
mod schedule;
mod stage;

pub use engine::{
    run_chain, ChainConfig, SimTrace, StageInfo, StageSample, DEFAULT_LOGIC_THRESHOLD_V, DEFAULT_READOUT_V,
};
pub use metrics::{metrics, parse_kv, MetricsReport, StageMetrics, SWITCH_TOLERANCE};
pub use modulation::{
    bits_of, select_modulation_first, select_modulation_higher, Drive, Modulation, ModulationRule, RuleTable, Scheme,
    FIRST_ORDER_FORGET_V, FIRST_ORDER_LEARN_V, FIRST_ORDER_NATURAL_V, HIGHER_ORDER_FORGET_V, HIGHER_ORDER_NATURAL_V,
};
pub use schedule::{sample_signal, PavlovTiming, Ripple, Segment, SignalRole, StimulusSchedule};
pub use stage::{
    adjust_learning_voltage, logic_level, state_signal, synaptic_output, GainProfile, StageConfig, DEFAULT_R_F,
    DEFAULT_STATE_THRESHOLD_V,
};

use crate::device::DeviceParams;

/// Gains for orders 2 and 3 of the shipped third-order chain.
pub const THIRD_ORDER_GAINS: [(f64, f64); 2] = [(2.5, 0.65), (3.0, 0.8)];

/// Chain with the given `(gain, clamp)` for every order above the first,
/// driven by the default conditioning protocol.
pub fn pavlov_chain(device: DeviceParams, higher: &[(f64, f64)], timing: &PavlovTiming) -> ChainConfig {
    let mut stages = vec![StageConfig::first_order(device)];
    stages.extend(higher.iter().map(|&(g, v)| StageConfig::higher_order(device, g, v)));
    let order = stages.len();
    ChainConfig::new(stages, StimulusSchedule::pavlov(order, timing), timing.duration(order))
}

/// Second-order conditioning with one of the two gain profiles.
pub fn pavlov2(profile: GainProfile) -> ChainConfig {
    pavlov_chain(DeviceParams::default(), &[profile.gain_and_clamp()], &PavlovTiming::default())
}

pub fn pavlov3() -> ChainConfig {
    pavlov_chain(DeviceParams::default(), &THIRD_ORDER_GAINS, &PavlovTiming::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::device::DeviceState;

    #[test]
    fn continuous_pairing_switches_in_closed_form_time() {
        let device = DeviceParams::default();
        let mut schedule = StimulusSchedule::new(1);
        schedule.set_segments(SignalRole::Food, vec![Segment::new(0.0, 0.4, 1.0)]).unwrap();
        schedule.set_segments(SignalRole::Ring(1), vec![Segment::new(0.0, 0.4, 1.0)]).unwrap();
        let cfg = ChainConfig::new(vec![StageConfig::first_order(device)], schedule, 0.4);
        let trace = run_chain(&cfg).unwrap();
        // first row at (or within one step of) R_on
        let row = trace.stages.iter().position(|r| r[0].resistance <= 20e3 * (1.0 + 1e-12)).unwrap();
        let t = (row + 1) as f64 * cfg.dt;
        assert!((t - 1.0 / 4.23).abs() <= cfg.dt, "{t}");
    }

    #[test]
    fn empty_schedule_decays_everything() {
        let device = DeviceParams::default();
        let mut stages =
            vec![StageConfig::first_order(device), StageConfig::with_profile(device, GainProfile::LowPower)];
        for s in &mut stages {
            s.initial_w = DeviceState::on(&device).w;
        }
        let cfg = ChainConfig::new(stages, StimulusSchedule::new(2), 0.3);
        let trace = run_chain(&cfg).unwrap();
        for row in &trace.stages {
            for s in row {
                assert_eq!(s.scheme, Scheme::NaturalForgetting);
            }
        }
        for k in 0..2 {
            let col: Vec<f64> = trace.stages.iter().map(|r| r[k].resistance).collect();
            assert!(col.windows(2).all(|w| w[1] >= w[0]));
            assert!(col.last().unwrap() > &col[0]);
        }
    }

    #[test]
    fn mismatched_schedule_is_rejected() {
        let cfg =
            ChainConfig::new(vec![StageConfig::first_order(DeviceParams::default())], StimulusSchedule::new(2), 1.0);
        assert!(run_chain(&cfg).is_err());
        let mut cfg = pavlov2(GainProfile::LowPower);
        cfg.stages.swap(0, 1);
        assert!(run_chain(&cfg).is_err());
    }

    #[test]
    fn csv_shape() {
        let mut cfg = pavlov2(GainProfile::LowPower);
        cfg.duration = 0.01;
        let trace = run_chain(&cfg).unwrap();
        let csv = trace.to_csv();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "t_s,food_v,ring1_v,ring2_v,mod1_v,scheme1,r1_ohm,s1_v,resp1_v,p1_w,mod2_v,scheme2,r2_ohm,s2_v,resp2_v,p2_w"
        );
        let rows: Vec<&str> = lines.collect();
        assert_eq!(rows.len(), 100);
        assert!(rows.iter().all(|r| r.split(',').count() == 16));
        assert!(rows[1].starts_with("0.0001,"));
    }
}
