use std::fmt::Write as _;

use crate::circuit::engine::SimTrace;
use crate::circuit::modulation::Scheme;
use crate::error::{invalid, Result};

/// A stage counts as switched once within this factor of `r_on`.
pub const SWITCH_TOLERANCE: f64 = 1.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageMetrics {
    /// Accumulated learning-scheme time until the first switch.
    pub switch_time: Option<f64>,
    pub peak_power: f64,
    /// Time from the end of the last stimulus until the resistance climbs
    /// back to the state threshold; only for stages below it at that moment.
    pub reset_time: Option<f64>,
    pub final_resistance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub stages: Vec<StageMetrics>,
    /// `switch_time(k) / switch_time(k + 1)` for k = 1..N-1.
    pub speedups: Vec<Option<f64>>,
}

pub fn metrics(trace: &SimTrace) -> Result<MetricsReport> {
    if trace.is_empty() {
        return invalid("cannot compute metrics of an empty trace");
    }
    let dt = trace.dt;
    let stim_end = trace.last_stimulus_row().map(|r| r + 1);
    let mut stages = Vec::with_capacity(trace.order());
    for (k, info) in trace.stage_info.iter().enumerate() {
        let col = || trace.stages.iter().map(move |row| &row[k]);

        let mut learning_rows = 0usize;
        let mut switch_time = None;
        for s in col() {
            if s.scheme == Scheme::Learning {
                learning_rows += 1;
            }
            if s.resistance <= info.r_on * SWITCH_TOLERANCE {
                switch_time = Some(learning_rows as f64 * dt);
                break;
            }
        }

        let peak_power = col().map(|s| s.power_w).fold(0.0, f64::max);

        let reset_time = stim_end.filter(|&e| e > 0 && e < trace.len()).and_then(|e| {
            let before = trace.stages[e - 1][k].resistance;
            if before >= info.threshold_ohm {
                return None;
            }
            (e..trace.len())
                .find(|&row| trace.stages[row][k].resistance >= info.threshold_ohm)
                .map(|row| (row - e + 1) as f64 * dt)
        });

        stages.push(StageMetrics {
            switch_time,
            peak_power,
            reset_time,
            final_resistance: trace.stages[trace.len() - 1][k].resistance,
        });
    }
    let speedups = stages
        .windows(2)
        .map(|w| match (w[0].switch_time, w[1].switch_time) {
            (Some(a), Some(b)) if b > 0.0 => Some(a / b),
            _ => None,
        })
        .collect();
    Ok(MetricsReport { stages, speedups })
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "none".to_string(), |x| x.to_string())
}

impl MetricsReport {
    /// Flat `key=value` lines.
    pub fn to_kv(&self) -> String {
        let mut out = String::new();
        for (i, s) in self.stages.iter().enumerate() {
            let k = i + 1;
            let _ = writeln!(out, "stage{k}.switch_time_s={}", opt(s.switch_time));
            let _ = writeln!(out, "stage{k}.peak_power_w={}", s.peak_power);
            let _ = writeln!(out, "stage{k}.reset_time_s={}", opt(s.reset_time));
            let _ = writeln!(out, "stage{k}.final_resistance_ohm={}", s.final_resistance);
        }
        for (i, s) in self.speedups.iter().enumerate() {
            let _ = writeln!(out, "chain.speedup_{}_{}={}", i + 1, i + 2, opt(*s));
        }
        out
    }
}

/// Parse a `key=value` report back into pairs; `none` values map to `None`.
pub fn parse_kv(text: &str) -> Vec<(String, Option<f64>)> {
    text.lines()
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.trim().to_string(), v.trim().parse::<f64>().ok()))
        .collect()
}
