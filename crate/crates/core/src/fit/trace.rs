use std::fmt::Write as _;
use std::path::Path;

use crate::error::{invalid, Error, Result};

pub const IV_HEADER: &str = "t_s,v_v,i_a";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IvSample {
    pub t: f64,
    pub v: f64,
    pub i: f64,
}

/// Time-ordered voltage/current record.
#[derive(Debug, Clone, PartialEq)]
pub struct IvTrace {
    samples: Vec<IvSample>,
}

impl IvTrace {
    pub fn new(samples: Vec<IvSample>) -> Result<Self> {
        if samples.len() < 2 {
            return invalid(format!("an I-V trace needs at least 2 samples, got {}", samples.len()));
        }
        for (k, s) in samples.iter().enumerate() {
            if !(s.t.is_finite() && s.v.is_finite() && s.i.is_finite()) {
                return invalid(format!("sample {k} has a non-finite value"));
            }
        }
        if let Some(k) = samples.windows(2).position(|w| w[1].t <= w[0].t) {
            return invalid(format!("timestamps must be strictly increasing (sample {})", k + 1));
        }
        Ok(IvTrace { samples })
    }

    /// Voltage-only drive sampled at `dt`; currents are zero.
    pub fn from_voltage_fn(dt: f64, n: usize, v: impl Fn(f64) -> f64) -> Result<Self> {
        let samples = (0..n)
            .map(|k| {
                let t = k as f64 * dt;
                IvSample { t, v: v(t), i: 0.0 }
            })
            .collect();
        IvTrace::new(samples)
    }

    /// `amplitude * sin(2 pi f t)` for `duration` seconds at step `dt`.
    pub fn sinusoid(amplitude: f64, frequency: f64, duration: f64, dt: f64) -> Result<Self> {
        let n = (duration / dt).round() as usize + 1;
        IvTrace::from_voltage_fn(dt, n, |t| amplitude * (2.0 * std::f64::consts::PI * frequency * t).sin())
    }

    pub fn samples(&self) -> &[IvSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.samples.len() * 40);
        out.push_str(IV_HEADER);
        out.push('\n');
        for s in &self.samples {
            let _ = writeln!(out, "{},{},{}", s.t, s.v, s.i);
        }
        out
    }

    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        match lines.next() {
            Some((_, h)) if h.trim() == IV_HEADER => {}
            Some((_, h)) => return invalid(format!("expected header `{IV_HEADER}`, found `{}`", h.trim())),
            None => return invalid("empty trace file"),
        }
        let mut samples = Vec::new();
        for (idx, line) in lines {
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            if cols.len() != 3 {
                return invalid(format!("line {}: expected 3 columns, found {}", idx + 1, cols.len()));
            }
            let num = |s: &str| {
                s.parse::<f64>().map_err(|_| Error::InvalidInput(format!("line {}: `{s}` is not a number", idx + 1)))
            };
            samples.push(IvSample { t: num(cols[0])?, v: num(cols[1])?, i: num(cols[2])? });
        }
        IvTrace::new(samples)
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        IvTrace::parse_csv(&text).map_err(|e| Error::Data { path: path.display().to_string(), msg: e.to_string() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_short_and_unordered() {
        let s = |t| IvSample { t, v: 0.0, i: 0.0 };
        assert!(IvTrace::new(vec![s(0.0)]).is_err());
        assert!(IvTrace::new(vec![s(0.0), s(0.0)]).is_err());
        assert!(IvTrace::new(vec![s(0.0), s(1.0), s(0.5)]).is_err());
        assert!(IvTrace::new(vec![s(0.0), s(1.0)]).is_ok());
    }

    #[test]
    fn csv_parse_errors() {
        assert!(IvTrace::parse_csv("t,v,i\n0,0,0\n1,0,0\n").is_err());
        assert!(IvTrace::parse_csv("t_s,v_v,i_a\n0,0,0\n").is_err());
        assert!(IvTrace::parse_csv("t_s,v_v,i_a\n0,0,0\n1,x,0\n").is_err());
        let tr = IvTrace::parse_csv("t_s,v_v,i_a\n0,0.1,1e-6\n0.001,0.2,2e-6\n").unwrap();
        assert_eq!(tr.len(), 2);
        assert_eq!(IvTrace::parse_csv(&tr.to_csv()).unwrap(), tr);
    }
}
