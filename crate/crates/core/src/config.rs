//! Declarative experiment files.
//!
//! A config is a TOML document with the sections `[device]`, `[stage.K]`,
//! `[schedule]`, `[sim]`, `[fit]` and `[vision]`. Every numeric key carries
//! its unit as a suffix (`_v`, `_ohm`, `_s`, `_per_s`, `_hz`). Missing keys
//! take the built-in defaults; unknown keys are rejected.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use toml::{Table, Value};

use crate::circuit::{
    ChainConfig, PavlovTiming, Ripple, RuleTable, Segment, SignalRole, StageConfig, StimulusSchedule,
    DEFAULT_LOGIC_THRESHOLD_V, DEFAULT_READOUT_V, DEFAULT_R_F, DEFAULT_STATE_THRESHOLD_V, FIRST_ORDER_FORGET_V,
    FIRST_ORDER_LEARN_V, FIRST_ORDER_NATURAL_V, HIGHER_ORDER_FORGET_V, HIGHER_ORDER_NATURAL_V,
};
use crate::device::{DeviceParams, DEFAULT_DT};
use crate::error::{Error, Result};
use crate::fit::{FitConfig, SimulateOptions};
use crate::vision::{InferConfig, MatchPredicate, MatchScope, TrainConfig};

fn cfg_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageSection {
    pub r_f_ohm: f64,
    pub gain: f64,
    pub v_learn_max_v: f64,
    pub state_threshold_v: f64,
    /// Fixed learning voltage; first order only.
    pub learn_v: Option<f64>,
    pub forget_v: f64,
    pub natural_forget_v: f64,
    pub initial_w: f64,
}

impl StageSection {
    /// Defaults for order `k` (1-based): the low-power gain profile above
    /// the first order.
    pub fn default_for(k: usize, device: &DeviceParams) -> Self {
        let first = k == 1;
        StageSection {
            r_f_ohm: DEFAULT_R_F,
            gain: if first { 1.0 } else { 1.8 },
            v_learn_max_v: if first { FIRST_ORDER_LEARN_V } else { 0.47 },
            state_threshold_v: DEFAULT_STATE_THRESHOLD_V,
            learn_v: first.then_some(FIRST_ORDER_LEARN_V),
            forget_v: if first { FIRST_ORDER_FORGET_V } else { HIGHER_ORDER_FORGET_V },
            natural_forget_v: if first { FIRST_ORDER_NATURAL_V } else { HIGHER_ORDER_NATURAL_V },
            initial_w: device.w_on,
        }
    }

    pub fn to_stage(&self, device: DeviceParams) -> StageConfig {
        let rules = match self.learn_v {
            Some(v) => RuleTable::first_order(v, self.forget_v, self.natural_forget_v),
            None => RuleTable::higher_order(self.forget_v, self.natural_forget_v),
        };
        StageConfig {
            device,
            rules,
            r_f: self.r_f_ohm,
            gain: self.gain,
            v_learn_max: self.v_learn_max_v,
            state_threshold_v: self.state_threshold_v,
            initial_w: self.initial_w,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SchedulePreset {
    /// The built-in conditioning protocol.
    Pavlov(PavlovTiming),
    /// Explicit `[start, end]` windows per signal.
    Custom(BTreeMap<SignalRole, Vec<(f64, f64)>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleSection {
    pub preset: SchedulePreset,
    pub high_level_v: f64,
    pub ripple_amplitude_v: f64,
    pub ripple_frequency_hz: f64,
    pub logic_threshold_v: f64,
    pub readout_v: f64,
}

impl ScheduleSection {
    fn ripple(&self) -> Ripple {
        if self.ripple_amplitude_v > 0.0 {
            Ripple::Zigzag { amplitude: self.ripple_amplitude_v, frequency: self.ripple_frequency_hz }
        } else {
            Ripple::None
        }
    }

    pub fn build(&self, order: usize) -> Result<StimulusSchedule> {
        match &self.preset {
            SchedulePreset::Pavlov(t) => {
                let timing = PavlovTiming { high_level: self.high_level_v, ring_ripple: self.ripple(), ..*t };
                Ok(StimulusSchedule::pavlov(order, &timing))
            }
            SchedulePreset::Custom(map) => {
                let mut s = StimulusSchedule::new(order);
                for (role, windows) in map {
                    let ripple = if *role == SignalRole::Food { Ripple::None } else { self.ripple() };
                    let segs = windows
                        .iter()
                        .map(|&(a, b)| Segment::new(a, b, self.high_level_v).with_ripple(ripple))
                        .collect();
                    s.set_segments(*role, segs).map_err(|e| Error::Config(format!("[schedule] {e}")))?;
                }
                Ok(s)
            }
        }
    }

    fn default_duration(&self, order: usize) -> Result<f64> {
        Ok(match &self.preset {
            SchedulePreset::Pavlov(t) => t.duration(order),
            SchedulePreset::Custom(_) => self.build(order)?.last_end() + PavlovTiming::default().rest,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimSection {
    pub dt_s: f64,
    pub duration_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitSection {
    pub grad_step: f64,
    pub max_iters: usize,
    pub tol: f64,
    /// Bounds are `[p / ratio, p * ratio]` around the `[device]` values.
    pub bound_ratio: f64,
    pub initial_w: f64,
    pub series_ohm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VisionSection {
    pub binarize_threshold: f64,
    pub predicate: MatchPredicate,
    pub scope: MatchScope,
    pub v_min_v: f64,
    pub v_max_v: f64,
    pub pulse_s: f64,
    pub dt_s: f64,
    pub similarity_threshold: f64,
    pub label_learn_v: f64,
    pub label_forget_v: f64,
    pub label_pulse_s: f64,
    pub allow_resize: bool,
    pub positive_label: String,
    pub negative_label: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub device: DeviceParams,
    pub stages: Vec<StageSection>,
    pub schedule: ScheduleSection,
    pub sim: SimSection,
    pub fit: FitSection,
    pub vision: VisionSection,
}

/// Tracks which keys of one table were read.
struct Section<'a> {
    name: String,
    table: Option<&'a Table>,
    used: BTreeSet<String>,
}

impl<'a> Section<'a> {
    fn new(name: impl Into<String>, value: Option<&'a Value>) -> Result<Self> {
        let name = name.into();
        let table = match value {
            None => None,
            Some(Value::Table(t)) => Some(t),
            Some(_) => return cfg_err(format!("[{name}] must be a table")),
        };
        Ok(Section { name, table, used: BTreeSet::new() })
    }

    fn raw(&mut self, key: &str) -> Option<&'a Value> {
        let v = self.table?.get(key)?;
        self.used.insert(key.to_string());
        Some(v)
    }

    fn has(&self, key: &str) -> bool {
        self.table.is_some_and(|t| t.contains_key(key))
    }

    fn f64(&mut self, key: &str, default: f64) -> Result<f64> {
        match self.raw(key) {
            None => Ok(default),
            Some(Value::Float(x)) if x.is_finite() => Ok(*x),
            Some(Value::Integer(i)) => Ok(*i as f64),
            Some(other) => cfg_err(format!("[{}] {key} must be a finite number, got {other}", self.name)),
        }
    }

    fn usize(&mut self, key: &str, default: usize) -> Result<usize> {
        match self.raw(key) {
            None => Ok(default),
            Some(Value::Integer(i)) if *i >= 0 => Ok(*i as usize),
            Some(other) => cfg_err(format!("[{}] {key} must be a non-negative integer, got {other}", self.name)),
        }
    }

    fn bool(&mut self, key: &str, default: bool) -> Result<bool> {
        match self.raw(key) {
            None => Ok(default),
            Some(Value::Boolean(b)) => Ok(*b),
            Some(other) => cfg_err(format!("[{}] {key} must be true or false, got {other}", self.name)),
        }
    }

    fn string(&mut self, key: &str, default: &str) -> Result<String> {
        match self.raw(key) {
            None => Ok(default.to_string()),
            Some(Value::String(s)) => Ok(s.clone()),
            Some(other) => cfg_err(format!("[{}] {key} must be a string, got {other}", self.name)),
        }
    }

    fn windows(&mut self, key: &str) -> Result<Vec<(f64, f64)>> {
        let name = self.name.clone();
        let bad = || cfg_err(format!("[{name}] {key} must be a list of [start, end] pairs"));
        let Some(Value::Array(items)) = self.raw(key) else {
            return bad();
        };
        let num = |v: &Value| match v {
            Value::Float(x) => Some(*x),
            Value::Integer(i) => Some(*i as f64),
            _ => None,
        };
        let mut out = Vec::with_capacity(items.len());
        for item in items {
            match item {
                Value::Array(pair) if pair.len() == 2 => match (num(&pair[0]), num(&pair[1])) {
                    (Some(a), Some(b)) => out.push((a, b)),
                    _ => return bad(),
                },
                _ => return bad(),
            }
        }
        Ok(out)
    }

    fn finish(self) -> Result<()> {
        if let Some(t) = self.table {
            if let Some(k) = t.keys().find(|k| !self.used.contains(*k)) {
                return cfg_err(format!("unknown key `{k}` in [{}]", self.name));
            }
        }
        Ok(())
    }
}

fn check(ok: bool, msg: impl Into<String>) -> Result<()> {
    if ok {
        Ok(())
    } else {
        cfg_err(msg)
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Parse and validate a config, filling every default.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let doc: Table = text.parse().map_err(|e: toml::de::Error| Error::ConfigSyntax {
        line: e.span().map_or(0, |s| line_of(text, s.start)),
        msg: e.message().to_string(),
    })?;
    const SECTIONS: [&str; 6] = ["device", "stage", "schedule", "sim", "fit", "vision"];
    if let Some(k) = doc.keys().find(|k| !SECTIONS.contains(&k.as_str())) {
        return cfg_err(format!("unknown section or key `{k}` at top level"));
    }

    let device = parse_device(Section::new("device", doc.get("device"))?)?;
    let stages = parse_stages(doc.get("stage"), &device)?;
    let order = stages.len();
    let schedule = parse_schedule(Section::new("schedule", doc.get("schedule"))?, order)?;
    let sim = parse_sim(Section::new("sim", doc.get("sim"))?, &schedule, order)?;
    let fit = parse_fit(Section::new("fit", doc.get("fit"))?, &device)?;
    let vision = parse_vision(Section::new("vision", doc.get("vision"))?, &device)?;

    let cfg = ExperimentConfig { device, stages, schedule, sim, fit, vision };
    cfg.chain_config()?.validate().map_err(|e| Error::Config(e.to_string()))?;
    Ok(cfg)
}

fn parse_device(mut s: Section) -> Result<DeviceParams> {
    let d = DeviceParams::default();
    let p = DeviceParams {
        r_on: s.f64("r_on_ohm", d.r_on)?,
        r_off: s.f64("r_off_ohm", d.r_off)?,
        alpha_on: s.f64("alpha_on", d.alpha_on)?,
        alpha_off: s.f64("alpha_off", d.alpha_off)?,
        k_on: s.f64("k_on_per_s", d.k_on)?,
        k_off: s.f64("k_off_per_s", d.k_off)?,
        v_on: s.f64("v_on_v", d.v_on)?,
        v_off: s.f64("v_off_v", d.v_off)?,
        w_on: s.f64("w_on", d.w_on)?,
        w_off: s.f64("w_off", d.w_off)?,
    };
    s.finish()?;
    p.validate().map_err(|e| Error::Config(format!("[device] {e}")))?;
    Ok(p)
}

fn parse_stages(value: Option<&Value>, device: &DeviceParams) -> Result<Vec<StageSection>> {
    let Some(value) = value else {
        return Ok((1..=2).map(|k| StageSection::default_for(k, device)).collect());
    };
    let Value::Table(t) = value else {
        return cfg_err("`stage` must be a set of [stage.K] tables");
    };
    let mut by_k = BTreeMap::new();
    for (key, v) in t {
        let k: usize = key.parse().ok().filter(|k| *k >= 1).ok_or_else(|| {
            Error::Config(format!("stage sections must be named [stage.K] with K >= 1, got [stage.{key}]"))
        })?;
        by_k.insert(k, v);
    }
    if by_k.is_empty() {
        return cfg_err("at least one [stage.K] section is required when `stage` is present");
    }
    for (expected, k) in (1..).zip(by_k.keys()) {
        if *k != expected {
            return cfg_err(format!("non-contiguous stages: [stage.{k}] present without [stage.{expected}]"));
        }
    }
    by_k.into_iter().map(|(k, v)| parse_stage(k, Section::new(format!("stage.{k}"), Some(v))?, device)).collect()
}

fn parse_stage(k: usize, mut s: Section, device: &DeviceParams) -> Result<StageSection> {
    let d = StageSection::default_for(k, device);
    let name = s.name.clone();
    if k > 1 && s.has("learn_v") {
        return cfg_err(format!("[{name}] learn_v applies to the first order only; higher orders use gain"));
    }
    let out = StageSection {
        r_f_ohm: s.f64("r_f_ohm", d.r_f_ohm)?,
        gain: s.f64("gain", d.gain)?,
        v_learn_max_v: s.f64("v_learn_max_v", d.v_learn_max_v)?,
        state_threshold_v: s.f64("state_threshold_v", d.state_threshold_v)?,
        learn_v: match d.learn_v {
            Some(v) => Some(s.f64("learn_v", v)?),
            None => None,
        },
        forget_v: s.f64("forget_v", d.forget_v)?,
        natural_forget_v: s.f64("natural_forget_v", d.natural_forget_v)?,
        initial_w: s.f64("initial_w", d.initial_w)?,
    };
    s.finish()?;
    check(out.r_f_ohm > 0.0, format!("[{name}] r_f must be positive"))?;
    check(out.gain > 0.0, format!("[{name}] gain must be positive"))?;
    check(out.v_learn_max_v > 0.0, format!("[{name}] v_learn_max must be positive"))?;
    check(out.state_threshold_v > 0.0, format!("[{name}] state_threshold must be positive"))?;
    if let Some(v) = out.learn_v {
        check(v > device.v_on, format!("[{name}] learn_v must exceed v_on"))?;
    }
    check(out.forget_v < 0.0, format!("[{name}] forget_v must be negative"))?;
    check(out.natural_forget_v < 0.0, format!("[{name}] natural_forget_v must be negative"))?;
    check(
        out.initial_w >= device.w_on && out.initial_w <= device.w_off,
        format!("[{name}] initial_w must lie within [w_on, w_off]"),
    )?;
    Ok(out)
}

fn parse_schedule(mut s: Section, order: usize) -> Result<ScheduleSection> {
    let preset_name = s.string("preset", "pavlov")?;
    let t = PavlovTiming::default();
    let preset = match preset_name.as_str() {
        "pavlov" => {
            let timing = PavlovTiming {
                forget_window: (s.f64("forget_start_s", t.forget_window.0)?, s.f64("forget_end_s", t.forget_window.1)?),
                second_order_start: s.f64("second_order_start_s", t.second_order_start)?,
                order_spacing: s.f64("order_spacing_s", t.order_spacing)?,
                final_pairing: s.f64("final_pairing_s", t.final_pairing)?,
                rest: s.f64("rest_s", t.rest)?,
                ..t
            };
            let (f0, f1) = timing.forget_window;
            check(0.0 < f0 && f0 < f1, "[schedule] forgetting window must satisfy 0 < start < end")?;
            check(
                f1 < timing.second_order_start || order == 1,
                "[schedule] forgetting window must end before the second-order pairing",
            )?;
            check(
                timing.order_spacing > 0.0 && timing.final_pairing > 0.0,
                "[schedule] pairing lengths must be positive",
            )?;
            check(timing.rest >= 0.0, "[schedule] rest_s must be non-negative")?;
            SchedulePreset::Pavlov(timing)
        }
        "custom" => {
            let mut map = BTreeMap::new();
            let keys: Vec<String> = s.table.map(|t| t.keys().cloned().collect()).unwrap_or_default();
            for key in keys {
                let Some(role) = key.strip_suffix("_segments_s") else { continue };
                let role: SignalRole =
                    role.parse().map_err(|_| Error::Config(format!("unknown key `{key}` in [schedule]")))?;
                if let SignalRole::Ring(k) = role {
                    check(k <= order, format!("[schedule] {key} refers to ring {k} but the chain has {order} stages"))?;
                }
                map.insert(role, s.windows(&key)?);
            }
            SchedulePreset::Custom(map)
        }
        other => return cfg_err(format!("[schedule] unknown preset `{other}` (expected pavlov or custom)")),
    };
    let out = ScheduleSection {
        preset,
        high_level_v: s.f64("high_level_v", t.high_level)?,
        ripple_amplitude_v: s.f64("ripple_amplitude_v", 0.1)?,
        ripple_frequency_hz: s.f64("ripple_frequency_hz", 100.0)?,
        logic_threshold_v: s.f64("logic_threshold_v", DEFAULT_LOGIC_THRESHOLD_V)?,
        readout_v: s.f64("readout_v", DEFAULT_READOUT_V)?,
    };
    s.finish()?;
    check(out.logic_threshold_v > 0.0, "[schedule] logic threshold must be positive")?;
    check(out.ripple_amplitude_v >= 0.0, "[schedule] ripple amplitude must be non-negative")?;
    check(out.ripple_frequency_hz > 0.0, "[schedule] ripple frequency must be positive")?;
    check(
        out.high_level_v - out.ripple_amplitude_v >= out.logic_threshold_v,
        "[schedule] ripple would pull the high level below the logic threshold",
    )?;
    out.build(order)?;
    Ok(out)
}

fn parse_sim(mut s: Section, schedule: &ScheduleSection, order: usize) -> Result<SimSection> {
    let out = SimSection {
        dt_s: s.f64("dt_s", DEFAULT_DT)?,
        duration_s: s.f64("duration_s", schedule.default_duration(order)?)?,
    };
    s.finish()?;
    check(out.dt_s > 0.0, "[sim] dt must be positive")?;
    check(out.duration_s > 0.0, "[sim] duration must be positive")?;
    check(out.duration_s >= out.dt_s, "[sim] duration must cover at least one step")?;
    Ok(out)
}

fn parse_fit(mut s: Section, device: &DeviceParams) -> Result<FitSection> {
    let out = FitSection {
        grad_step: s.f64("grad_step", 1e-6)?,
        max_iters: s.usize("max_iters", 500)?,
        tol: s.f64("tol", 1e-14)?,
        bound_ratio: s.f64("bound_ratio", 4.0)?,
        initial_w: s.f64("initial_w", device.w_on)?,
        series_ohm: s.f64("series_ohm", 0.0)?,
    };
    s.finish()?;
    check(out.grad_step > 0.0, "[fit] grad_step must be positive")?;
    check(out.max_iters >= 1, "[fit] max_iters must be at least 1")?;
    check(out.tol >= 0.0, "[fit] tol must be non-negative")?;
    check(out.bound_ratio >= 1.0, "[fit] bound_ratio must be at least 1")?;
    check(out.series_ohm >= 0.0, "[fit] series_ohm must be non-negative")?;
    check(
        out.initial_w >= device.w_on && out.initial_w <= device.w_off,
        "[fit] initial_w must lie within [w_on, w_off]",
    )?;
    Ok(out)
}

fn parse_vision(mut s: Section, device: &DeviceParams) -> Result<VisionSection> {
    let (t, i) = (TrainConfig::default(), InferConfig::default());
    let predicate = match s.string("match", "equal-binary")?.as_str() {
        "equal-binary" => {
            check(!s.has("tau"), "[vision] tau only applies to match = \"abs-diff\"")?;
            MatchPredicate::EqualBinary
        }
        "abs-diff" => MatchPredicate::AbsDiff { tau: s.f64("tau", 0.1)? },
        other => return cfg_err(format!("[vision] unknown match `{other}` (expected equal-binary or abs-diff)")),
    };
    let scope: MatchScope =
        s.string("scope", "all-vector")?.parse().map_err(|e: Error| Error::Config(format!("[vision] {e}")))?;
    let out = VisionSection {
        binarize_threshold: s.f64("binarize_threshold", t.binarize_threshold)?,
        predicate,
        scope,
        v_min_v: s.f64("v_min_v", t.v_min)?,
        v_max_v: s.f64("v_max_v", t.v_max)?,
        pulse_s: s.f64("pulse_s", t.pulse_dt)?,
        dt_s: s.f64("dt_s", t.dt)?,
        similarity_threshold: s.f64("similarity_threshold", i.similarity_threshold)?,
        label_learn_v: s.f64("label_learn_v", i.label_learn_v)?,
        label_forget_v: s.f64("label_forget_v", i.label_forget_v)?,
        label_pulse_s: s.f64("label_pulse_s", i.label_pulse_s)?,
        allow_resize: s.bool("allow_resize", false)?,
        positive_label: s.string("positive_label", &i.positive_label)?,
        negative_label: s.string("negative_label", &i.negative_label)?,
    };
    s.finish()?;
    let cfg = ExperimentConfig::vision_configs(&out, device);
    cfg.0.validate(device).map_err(|e| Error::Config(format!("[vision] {e}")))?;
    cfg.1.validate().map_err(|e| Error::Config(format!("[vision] {e}")))?;
    Ok(out)
}

fn fmt_windows(w: &[(f64, f64)]) -> String {
    let items: Vec<String> = w.iter().map(|(a, b)| format!("[{}, {}]", num(*a), num(*b))).collect();
    format!("[{}]", items.join(", "))
}

/// Float literal that TOML reads back as the same value.
fn num(x: f64) -> String {
    let s = format!("{x:?}");
    if s.contains(['.', 'e', 'E']) || s.contains("inf") || s.contains("NaN") {
        s
    } else {
        format!("{s}.0")
    }
}

fn quoted(s: &str) -> String {
    Value::String(s.to_string()).to_string()
}

impl ExperimentConfig {
    pub fn order(&self) -> usize {
        self.stages.len()
    }

    pub fn chain_config(&self) -> Result<ChainConfig> {
        let schedule = self.schedule.build(self.order())?;
        Ok(ChainConfig {
            stages: self.stages.iter().map(|s| s.to_stage(self.device)).collect(),
            schedule,
            dt: self.sim.dt_s,
            duration: self.sim.duration_s,
            logic_threshold: self.schedule.logic_threshold_v,
            readout_amplitude: self.schedule.readout_v,
        })
    }

    pub fn fit_config(&self) -> FitConfig {
        let mut cfg = FitConfig::around(self.device, self.fit.bound_ratio);
        cfg.grad_step = self.fit.grad_step;
        cfg.max_iters = self.fit.max_iters;
        cfg.tol = self.fit.tol;
        cfg.simulate = SimulateOptions { initial_w: Some(self.fit.initial_w), series_ohm: self.fit.series_ohm };
        cfg
    }

    fn vision_configs(v: &VisionSection, device: &DeviceParams) -> (TrainConfig, InferConfig) {
        let train = TrainConfig {
            binarize_threshold: v.binarize_threshold,
            predicate: v.predicate,
            scope: v.scope,
            v_min: v.v_min_v,
            v_max: v.v_max_v,
            pulse_dt: v.pulse_s,
            dt: v.dt_s,
        };
        let infer = InferConfig {
            similarity_threshold: v.similarity_threshold,
            binarize_threshold: v.binarize_threshold,
            label_device: *device,
            label_learn_v: v.label_learn_v,
            label_forget_v: v.label_forget_v,
            label_pulse_s: v.label_pulse_s,
            dt: v.dt_s,
            positive_label: v.positive_label.clone(),
            negative_label: v.negative_label.clone(),
        };
        (train, infer)
    }

    pub fn train_config(&self) -> TrainConfig {
        Self::vision_configs(&self.vision, &self.device).0
    }

    pub fn infer_config(&self) -> InferConfig {
        Self::vision_configs(&self.vision, &self.device).1
    }

    /// Replace every integration step (circuit and vision) with `dt`.
    pub fn override_dt(&mut self, dt: f64) -> Result<()> {
        check(dt > 0.0 && dt.is_finite(), format!("dt override must be positive, got {dt}"))?;
        self.sim.dt_s = dt;
        self.vision.dt_s = dt;
        Ok(())
    }

    /// Only the `[device]` section.
    pub fn device_fragment(device: &DeviceParams) -> String {
        let mut out = String::from("[device]\n");
        let d = device;
        for (k, v) in [
            ("r_on_ohm", d.r_on),
            ("r_off_ohm", d.r_off),
            ("alpha_on", d.alpha_on),
            ("alpha_off", d.alpha_off),
            ("k_on_per_s", d.k_on),
            ("k_off_per_s", d.k_off),
            ("v_on_v", d.v_on),
            ("v_off_v", d.v_off),
            ("w_on", d.w_on),
            ("w_off", d.w_off),
        ] {
            let _ = writeln!(out, "{k} = {}", num(v));
        }
        out
    }

    /// Fully resolved config; `parse_config` reads it back unchanged.
    pub fn to_toml(&self) -> String {
        let mut out = Self::device_fragment(&self.device);
        for (i, s) in self.stages.iter().enumerate() {
            let _ = writeln!(out, "\n[stage.{}]", i + 1);
            let _ = writeln!(out, "r_f_ohm = {}", num(s.r_f_ohm));
            let _ = writeln!(out, "gain = {}", num(s.gain));
            let _ = writeln!(out, "v_learn_max_v = {}", num(s.v_learn_max_v));
            let _ = writeln!(out, "state_threshold_v = {}", num(s.state_threshold_v));
            if let Some(v) = s.learn_v {
                let _ = writeln!(out, "learn_v = {}", num(v));
            }
            let _ = writeln!(out, "forget_v = {}", num(s.forget_v));
            let _ = writeln!(out, "natural_forget_v = {}", num(s.natural_forget_v));
            let _ = writeln!(out, "initial_w = {}", num(s.initial_w));
        }

        let sc = &self.schedule;
        out.push_str("\n[schedule]\n");
        match &sc.preset {
            SchedulePreset::Pavlov(t) => {
                out.push_str("preset = \"pavlov\"\n");
                let _ = writeln!(out, "forget_start_s = {}", num(t.forget_window.0));
                let _ = writeln!(out, "forget_end_s = {}", num(t.forget_window.1));
                let _ = writeln!(out, "second_order_start_s = {}", num(t.second_order_start));
                let _ = writeln!(out, "order_spacing_s = {}", num(t.order_spacing));
                let _ = writeln!(out, "final_pairing_s = {}", num(t.final_pairing));
                let _ = writeln!(out, "rest_s = {}", num(t.rest));
            }
            SchedulePreset::Custom(map) => {
                out.push_str("preset = \"custom\"\n");
                for (role, w) in map {
                    let _ = writeln!(out, "{role}_segments_s = {}", fmt_windows(w));
                }
            }
        }
        let _ = writeln!(out, "high_level_v = {}", num(sc.high_level_v));
        let _ = writeln!(out, "ripple_amplitude_v = {}", num(sc.ripple_amplitude_v));
        let _ = writeln!(out, "ripple_frequency_hz = {}", num(sc.ripple_frequency_hz));
        let _ = writeln!(out, "logic_threshold_v = {}", num(sc.logic_threshold_v));
        let _ = writeln!(out, "readout_v = {}", num(sc.readout_v));

        let _ = write!(out, "\n[sim]\ndt_s = {}\nduration_s = {}\n", num(self.sim.dt_s), num(self.sim.duration_s));

        let f = &self.fit;
        let _ = write!(
            out,
            "\n[fit]\ngrad_step = {}\nmax_iters = {}\ntol = {}\nbound_ratio = {}\ninitial_w = {}\nseries_ohm = {}\n",
            num(f.grad_step),
            f.max_iters,
            num(f.tol),
            num(f.bound_ratio),
            num(f.initial_w),
            num(f.series_ohm)
        );

        let v = &self.vision;
        out.push_str("\n[vision]\n");
        let _ = writeln!(out, "binarize_threshold = {}", num(v.binarize_threshold));
        match v.predicate {
            MatchPredicate::EqualBinary => out.push_str("match = \"equal-binary\"\n"),
            MatchPredicate::AbsDiff { tau } => {
                let _ = writeln!(out, "match = \"abs-diff\"\ntau = {}", num(tau));
            }
        }
        let _ = writeln!(out, "scope = \"{}\"", v.scope);
        for (k, x) in [
            ("v_min_v", v.v_min_v),
            ("v_max_v", v.v_max_v),
            ("pulse_s", v.pulse_s),
            ("dt_s", v.dt_s),
            ("similarity_threshold", v.similarity_threshold),
            ("label_learn_v", v.label_learn_v),
            ("label_forget_v", v.label_forget_v),
            ("label_pulse_s", v.label_pulse_s),
        ] {
            let _ = writeln!(out, "{k} = {}", num(x));
        }
        let _ = writeln!(out, "allow_resize = {}", v.allow_resize);
        let _ = writeln!(out, "positive_label = {}", quoted(&v.positive_label));
        let _ = writeln!(out, "negative_label = {}", quoted(&v.negative_label));
        out
    }
}
