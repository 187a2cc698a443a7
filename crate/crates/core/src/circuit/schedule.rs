//! Square-wave stimulus encoding.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};

/// Boundary slack so that segment edges land on the intended grid sample.
const EDGE_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SignalRole {
    Food,
    /// Ring signal `k`, 1-based.
    Ring(usize),
}

impl fmt::Display for SignalRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SignalRole::Food => write!(f, "food"),
            SignalRole::Ring(k) => write!(f, "ring{k}"),
        }
    }
}

impl FromStr for SignalRole {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "food" {
            return Ok(SignalRole::Food);
        }
        match s.strip_prefix("ring").and_then(|k| k.parse::<usize>().ok()) {
            Some(k) if k >= 1 => Ok(SignalRole::Ring(k)),
            _ => invalid(format!("unknown signal `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ripple {
    None,
    /// Triangular ripple of peak `amplitude` riding on the high level.
    Zigzag {
        amplitude: f64,
        frequency: f64,
    },
}

/// Active on `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub start: f64,
    pub end: f64,
    pub level: f64,
    pub ripple: Ripple,
}

impl Segment {
    pub fn new(start: f64, end: f64, level: f64) -> Self {
        Segment { start, end, level, ripple: Ripple::None }
    }

    pub fn with_ripple(mut self, ripple: Ripple) -> Self {
        self.ripple = ripple;
        self
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.start - EDGE_EPS && t < self.end - EDGE_EPS
    }

    fn value(&self, t: f64) -> f64 {
        match self.ripple {
            Ripple::None => self.level,
            Ripple::Zigzag { amplitude, frequency } => {
                let phase = ((t - self.start) * frequency).rem_euclid(1.0);
                // -1 at phase 0, +1 at phase 1/2
                let tri = 1.0 - 4.0 * (phase - 0.5).abs();
                self.level + amplitude * tri
            }
        }
    }
}

/// Timing knobs for the built-in conditioning protocol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PavlovTiming {
    pub high_level: f64,
    pub ring_ripple: Ripple,
    /// Window in which ring 1 is presented without food.
    pub forget_window: (f64, f64),
    /// Start of the ring 1 / ring 2 pairing.
    pub second_order_start: f64,
    /// Offset between successive higher-order pairings.
    pub order_spacing: f64,
    /// How long the last pairing is held.
    pub final_pairing: f64,
    /// Stimulus-free tail used to observe reset.
    pub rest: f64,
}

impl Default for PavlovTiming {
    fn default() -> Self {
        PavlovTiming {
            high_level: 1.0,
            ring_ripple: Ripple::Zigzag { amplitude: 0.1, frequency: 100.0 },
            forget_window: (0.62, 0.67),
            second_order_start: 0.92,
            order_spacing: 0.25,
            final_pairing: 0.2,
            rest: 1.0,
        }
    }
}

impl PavlovTiming {
    pub fn ring_start(&self, k: usize) -> f64 {
        if k <= 1 {
            0.0
        } else {
            self.second_order_start + self.order_spacing * (k - 2) as f64
        }
    }

    /// Time at which every stimulus switches off.
    pub fn stimulus_end(&self, order: usize) -> f64 {
        if order <= 1 {
            self.second_order_start
        } else {
            self.ring_start(order) + self.final_pairing
        }
    }

    pub fn duration(&self, order: usize) -> f64 {
        self.stimulus_end(order) + self.rest
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StimulusSchedule {
    n_rings: usize,
    /// Index 0 is food, index k is ring k.
    segments: Vec<Vec<Segment>>,
}

impl StimulusSchedule {
    /// Empty schedule with food and `n_rings` ring signals.
    pub fn new(n_rings: usize) -> Self {
        StimulusSchedule { n_rings, segments: vec![Vec::new(); n_rings + 1] }
    }

    /// Food and ring 1 paired (with ring 1 alone inside the forgetting
    /// window), then ring k paired with ring k-1 from `ring_start(k)`; all
    /// stimuli held until `stimulus_end(order)`.
    pub fn pavlov(order: usize, timing: &PavlovTiming) -> Self {
        let mut s = StimulusSchedule::new(order);
        let end = timing.stimulus_end(order);
        let (f0, f1) = timing.forget_window;
        let food = |a, b| Segment::new(a, b, timing.high_level);
        let ring = |a, b| Segment::new(a, b, timing.high_level).with_ripple(timing.ring_ripple);
        s.segments[0] = vec![food(0.0, f0), food(f1, end)];
        for k in 1..=order {
            s.segments[k] = vec![ring(timing.ring_start(k), end)];
        }
        s
    }

    pub fn n_rings(&self) -> usize {
        self.n_rings
    }

    pub fn roles(&self) -> impl Iterator<Item = SignalRole> {
        std::iter::once(SignalRole::Food).chain((1..=self.n_rings).map(SignalRole::Ring))
    }

    fn index(&self, role: SignalRole) -> Result<usize> {
        match role {
            SignalRole::Food => Ok(0),
            SignalRole::Ring(k) if k >= 1 && k <= self.n_rings => Ok(k),
            other => invalid(format!("unknown signal {other} (schedule has {} rings)", self.n_rings)),
        }
    }

    pub fn segments(&self, role: SignalRole) -> Result<&[Segment]> {
        Ok(&self.segments[self.index(role)?])
    }

    /// Replace the segments of one signal, keeping them sorted and disjoint.
    pub fn set_segments(&mut self, role: SignalRole, mut segs: Vec<Segment>) -> Result<()> {
        let idx = self.index(role)?;
        for s in &segs {
            let finite = s.start.is_finite() && s.end.is_finite() && s.level.is_finite();
            if !finite || s.start < 0.0 || s.end <= s.start {
                return invalid(format!("{role}: segment [{}, {}] is not a valid time window", s.start, s.end));
            }
            if let Ripple::Zigzag { amplitude, frequency } = s.ripple {
                if !(amplitude >= 0.0) || !(frequency > 0.0) {
                    return invalid(format!("{role}: ripple needs amplitude >= 0 and frequency > 0"));
                }
            }
        }
        segs.sort_by(|a, b| a.start.total_cmp(&b.start));
        if segs.windows(2).any(|w| w[1].start < w[0].end) {
            return invalid(format!("{role}: segments overlap"));
        }
        self.segments[idx] = segs;
        Ok(())
    }

    /// Time after which every signal is zero.
    pub fn last_end(&self) -> f64 {
        self.segments.iter().flatten().map(|s| s.end).fold(0.0, f64::max)
    }
}

/// Voltage of `role` at time `t`; 0 outside every segment.
pub fn sample_signal(schedule: &StimulusSchedule, role: SignalRole, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return invalid(format!("sample time must be non-negative, got {t}"));
    }
    let segs = schedule.segments(role)?;
    Ok(segs.iter().find(|s| s.contains(t)).map_or(0.0, |s| s.value(t)))
}
