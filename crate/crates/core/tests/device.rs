use approx::assert_relative_eq;
use memassoc::device::{self, normalized_resistance, normalized_state, resistance, step, DEFAULT_DT};
use memassoc::fit::{simulate_current, IvTrace};
use memassoc::{DeviceParams, DeviceState};
use proptest::prelude::*;

fn p() -> DeviceParams {
    DeviceParams::default()
}

/// Closed-form traversal time of the full state range at constant `v`
/// (alpha = 1, rectangular window).
fn traverse_time(p: &DeviceParams, v: f64) -> f64 {
    let (k, th) = if v > 0.0 { (p.k_on, p.v_on) } else { (p.k_off, p.v_off) };
    p.span() / (k * (v / th - 1.0)).abs()
}

fn time_to_switch(p: &DeviceParams, v: f64, dt: f64) -> f64 {
    let mut s = if v > 0.0 { DeviceState::off(p) } else { DeviceState::on(p) };
    let target = if v > 0.0 { p.w_off } else { p.w_on };
    let mut n = 0usize;
    while s.w != target {
        s = step(p, s, v, dt).unwrap();
        n += 1;
        assert!(n < 10_000_000, "never switched");
    }
    n as f64 * dt
}

fn run_constant(p: &DeviceParams, w0: f64, v: f64, duration: f64, dt: f64) -> f64 {
    let n = (duration / dt).round() as usize;
    let mut s = DeviceState::new(w0);
    for _ in 0..n {
        s = step(p, s, v, dt).unwrap();
    }
    s.w
}

#[test]
fn set_time_matches_closed_form() {
    let p = p();
    let oracle = traverse_time(&p, 0.35);
    assert_relative_eq!(oracle, 0.23641, max_relative = 1e-4);
    let sim = time_to_switch(&p, 0.35, DEFAULT_DT);
    assert_relative_eq!(sim, oracle, max_relative = 0.01);
}

#[test]
fn reset_time_matches_closed_form() {
    let p = p();
    for v in [-0.2, -0.3, -0.5] {
        let sim = time_to_switch(&p, v, DEFAULT_DT);
        assert_relative_eq!(sim, traverse_time(&p, v), max_relative = 0.01);
    }
}

#[test]
fn pulse_trains_move_resistance_monotonically() {
    let p = p();
    let pulse = |s: DeviceState, v: f64| {
        let mut s = s;
        for _ in 0..100 {
            s = step(&p, s, v, DEFAULT_DT).unwrap();
        }
        s
    };
    let mut s = DeviceState::off(&p);
    let mut last = resistance(&p, s.w);
    for _ in 0..30 {
        s = pulse(s, 0.35);
        s = pulse(s, 0.0);
        let r = resistance(&p, s.w);
        assert!(r <= last);
        last = r;
    }
    assert_eq!(last, p.r_on);
    for _ in 0..30 {
        s = pulse(s, -0.2);
        let r = resistance(&p, s.w);
        assert!(r >= last);
        last = r;
    }
    assert_eq!(last, p.r_off);
}

#[test]
fn sinusoid_loop_is_pinched_and_bounded() {
    let p = p();
    let drive = IvTrace::sinusoid(0.5, 10.0, 0.3, DEFAULT_DT).unwrap();
    let out = simulate_current(&p, &drive).unwrap();
    let mut area = 0.0;
    for w in out.samples().windows(2) {
        let (a, b) = (w[0], w[1]);
        if a.v.abs() < 1e-6 {
            assert!(a.i.abs() < 1e-9);
        }
        let r = a.v / a.i;
        if a.v.abs() > 1e-6 {
            assert!((p.r_on * (1.0 - 1e-9)..=p.r_off * (1.0 + 1e-9)).contains(&r), "{r}");
        }
        area += 0.5 * (a.i + b.i) * (b.v - a.v);
    }
    assert!(area.abs() > 1e-8, "loop area {area}");
}

proptest! {
    #[test]
    fn state_stays_in_window(
        volts in prop::collection::vec(-2.0f64..2.0, 1..200),
        dt in 1e-6f64..0.5,
        w0 in 0.0f64..=1.0,
    ) {
        let p = p();
        let mut s = DeviceState::new(w0);
        for v in volts {
            s = step(&p, s, v, dt).unwrap();
            prop_assert!(s.w >= p.w_on && s.w <= p.w_off);
        }
    }

    #[test]
    fn dead_zone_has_zero_drift(w in 0.0f64..=1.0, frac in 0.0f64..1.0) {
        let p = p();
        let v = p.v_off + frac * (p.v_on - p.v_off);
        prop_assume!(v > p.v_off && v < p.v_on);
        prop_assert_eq!(device::drift_rate(&p, w, v).unwrap(), 0.0);
    }

    #[test]
    fn resistance_decreases_in_state(a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        prop_assume!(a < b);
        let p = p();
        prop_assert!(resistance(&p, a) > resistance(&p, b));
        prop_assert!(normalized_state(&p, a) > normalized_state(&p, b));
        let (ra, rb) = (resistance(&p, a), resistance(&p, b));
        prop_assert!(normalized_resistance(&p, rb) < normalized_resistance(&p, ra));
    }

    #[test]
    fn halving_dt_barely_moves_final_state(v in -1.0f64..1.0, w0 in 0.0f64..=1.0) {
        let p = p();
        let a = run_constant(&p, w0, v, 1.0, DEFAULT_DT);
        let b = run_constant(&p, w0, v, 1.0, DEFAULT_DT / 2.0);
        prop_assert!((a - b).abs() < 1e-3, "{} vs {}", a, b);
    }
}
