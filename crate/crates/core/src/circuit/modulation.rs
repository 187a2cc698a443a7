//! Truth-table modulation selection (the logic + analog multiplexer stage).

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};

pub const FIRST_ORDER_LEARN_V: f64 = 0.35;
pub const FIRST_ORDER_FORGET_V: f64 = -0.175;
pub const FIRST_ORDER_NATURAL_V: f64 = -0.165;
pub const HIGHER_ORDER_FORGET_V: f64 = -0.19;
pub const HIGHER_ORDER_NATURAL_V: f64 = -0.18;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Learning,
    Forgetting,
    NaturalForgetting,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Learning => "learning",
            Scheme::Forgetting => "forgetting",
            Scheme::NaturalForgetting => "natural_forgetting",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "learning" => Ok(Scheme::Learning),
            "forgetting" => Ok(Scheme::Forgetting),
            "natural_forgetting" => Ok(Scheme::NaturalForgetting),
            _ => invalid(format!("unknown scheme `{s}`")),
        }
    }
}

/// Voltage source attached to a rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Drive {
    Fixed(f64),
    /// The state signal of the previous order after gain adjustment.
    Adjusted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModulationRule {
    /// One entry per input bit; `None` matches either level.
    pub pattern: Vec<Option<bool>>,
    pub scheme: Scheme,
    pub drive: Drive,
}

impl ModulationRule {
    fn new(pattern: &[Option<bool>], scheme: Scheme, drive: Drive) -> Self {
        ModulationRule { pattern: pattern.to_vec(), scheme, drive }
    }

    pub fn matches(&self, bits: &[bool]) -> bool {
        self.pattern.len() == bits.len() && self.pattern.iter().zip(bits).all(|(p, b)| p.is_none_or(|p| p == *b))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Modulation {
    pub scheme: Scheme,
    pub voltage: f64,
}

/// Ordered rule set over a fixed number of logic inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleTable {
    arity: usize,
    rules: Vec<ModulationRule>,
}

const H: Option<bool> = Some(true);
const L: Option<bool> = Some(false);
const X: Option<bool> = None;

impl RuleTable {
    pub fn new(arity: usize, rules: Vec<ModulationRule>) -> Result<Self> {
        if rules.iter().any(|r| r.pattern.len() != arity) {
            return invalid("rule pattern width does not match table arity");
        }
        let table = RuleTable { arity, rules };
        table.check_total()?;
        Ok(table)
    }

    /// Inputs (food, ring 1). Food without ring falls back to natural forgetting.
    pub fn first_order(learn_v: f64, forget_v: f64, natural_v: f64) -> Self {
        use Scheme::*;
        let rules = vec![
            ModulationRule::new(&[H, H], Learning, Drive::Fixed(learn_v)),
            ModulationRule::new(&[L, H], Forgetting, Drive::Fixed(forget_v)),
            ModulationRule::new(&[L, L], NaturalForgetting, Drive::Fixed(natural_v)),
            ModulationRule::new(&[H, L], NaturalForgetting, Drive::Fixed(natural_v)),
        ];
        RuleTable { arity: 2, rules }
    }

    /// Inputs (previous state bit, previous ring, new ring). Rows without a
    /// complete association cue fall back to natural forgetting.
    pub fn higher_order(forget_v: f64, natural_v: f64) -> Self {
        use Scheme::*;
        let rules = vec![
            ModulationRule::new(&[H, H, H], Learning, Drive::Adjusted),
            ModulationRule::new(&[X, L, H], Forgetting, Drive::Fixed(forget_v)),
            ModulationRule::new(&[X, L, L], NaturalForgetting, Drive::Fixed(natural_v)),
            ModulationRule::new(&[L, H, H], NaturalForgetting, Drive::Fixed(natural_v)),
            ModulationRule::new(&[X, H, L], NaturalForgetting, Drive::Fixed(natural_v)),
        ];
        RuleTable { arity: 3, rules }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn rules(&self) -> &[ModulationRule] {
        &self.rules
    }

    /// Fixed voltage of the first rule with `scheme`, if any.
    pub fn fixed_voltage(&self, scheme: Scheme) -> Option<f64> {
        self.rules.iter().find_map(|r| match (r.scheme == scheme, r.drive) {
            (true, Drive::Fixed(v)) => Some(v),
            _ => None,
        })
    }

    /// Exactly one rule must match every input combination.
    pub fn check_total(&self) -> Result<()> {
        for code in 0..(1usize << self.arity) {
            let bits = bits_of(code, self.arity);
            let n = self.rules.iter().filter(|r| r.matches(&bits)).count();
            if n != 1 {
                return invalid(format!("{n} rules match inputs {bits:?}; exactly one required"));
            }
        }
        Ok(())
    }

    pub fn select(&self, bits: &[bool], v_adj: f64) -> Result<Modulation> {
        if bits.len() != self.arity {
            return invalid(format!("expected {} logic inputs, got {}", self.arity, bits.len()));
        }
        let rule = self
            .rules
            .iter()
            .find(|r| r.matches(bits))
            .ok_or_else(|| Error::InvalidInput(format!("no rule for inputs {bits:?}")))?;
        let voltage = match rule.drive {
            Drive::Fixed(v) => v,
            Drive::Adjusted => v_adj,
        };
        Ok(Modulation { scheme: rule.scheme, voltage })
    }
}

/// Bits of `code`, most significant first.
pub fn bits_of(code: usize, width: usize) -> Vec<bool> {
    (0..width).rev().map(|i| code >> i & 1 == 1).collect()
}

/// Default first-order selection.
pub fn select_modulation_first(food: bool, ring1: bool) -> f64 {
    let table = RuleTable::first_order(FIRST_ORDER_LEARN_V, FIRST_ORDER_FORGET_V, FIRST_ORDER_NATURAL_V);
    table.select(&[food, ring1], 0.0).expect("first-order table is total").voltage
}

/// Default higher-order selection; `v_adj` is the gain-adjusted state signal.
pub fn select_modulation_higher(state_prev: bool, ring_prev: bool, ring_new: bool, v_adj: f64) -> f64 {
    let table = RuleTable::higher_order(HIGHER_ORDER_FORGET_V, HIGHER_ORDER_NATURAL_V);
    table.select(&[state_prev, ring_prev, ring_new], v_adj).expect("higher-order table is total").voltage
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_order_rows() {
        assert_eq!(select_modulation_first(true, true), 0.35);
        assert_eq!(select_modulation_first(false, true), -0.175);
        assert_eq!(select_modulation_first(false, false), -0.165);
        assert_eq!(select_modulation_first(true, false), -0.165);
    }

    #[test]
    fn higher_order_rows() {
        assert_eq!(select_modulation_higher(true, true, true, 0.45), 0.45);
        for s in [false, true] {
            assert_eq!(select_modulation_higher(s, false, true, 0.45), -0.19);
            assert_eq!(select_modulation_higher(s, false, false, 0.45), -0.18);
            assert_eq!(select_modulation_higher(s, true, false, 0.45), -0.18);
        }
        assert_eq!(select_modulation_higher(false, true, true, 0.45), -0.18);
    }

    #[test]
    fn default_tables_are_total() {
        RuleTable::first_order(0.35, -0.175, -0.165).check_total().unwrap();
        RuleTable::higher_order(-0.19, -0.18).check_total().unwrap();
    }

    #[test]
    fn ambiguous_or_partial_tables_rejected() {
        let r = |p: &[Option<bool>]| ModulationRule::new(p, Scheme::Learning, Drive::Fixed(0.3));
        assert!(RuleTable::new(1, vec![r(&[X]), r(&[H])]).is_err());
        assert!(RuleTable::new(1, vec![r(&[H])]).is_err());
        assert!(RuleTable::new(1, vec![r(&[H]), r(&[L])]).is_ok());
        assert!(RuleTable::new(2, vec![r(&[H])]).is_err());
    }

    #[test]
    fn select_checks_width() {
        let t = RuleTable::first_order(0.35, -0.175, -0.165);
        assert!(t.select(&[true], 0.0).is_err());
        assert_eq!(t.fixed_voltage(Scheme::Forgetting), Some(-0.175));
    }

    #[test]
    fn scheme_names_round_trip() {
        for s in [Scheme::Learning, Scheme::Forgetting, Scheme::NaturalForgetting] {
            assert_eq!(s.as_str().parse::<Scheme>().unwrap(), s);
        }
    }
}
