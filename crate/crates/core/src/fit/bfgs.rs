//! Box-constrained BFGS with central-difference gradients.
//!
//! Bounds are handled by projection: coordinates pinned at a bound with the
//! gradient pointing outward are frozen for the step, and every trial point
//! is clamped back into the box before evaluation.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BfgsOptions {
    /// Central-difference step, relative to `max(|x_i|, 1)`.
    pub grad_step: f64,
    pub max_iters: usize,
    /// Stop once an accepted step improves the objective by less than this.
    pub tol: f64,
    /// Stop when the projected gradient's max-norm drops below this.
    pub gtol: f64,
    /// Stop as soon as the objective is at or below this value.
    pub f_target: f64,
    pub armijo_c1: f64,
    pub backtrack: f64,
    pub max_backtracks: usize,
}

impl Default for BfgsOptions {
    fn default() -> Self {
        BfgsOptions {
            grad_step: 1e-6,
            max_iters: 500,
            tol: 1e-14,
            gtol: 1e-12,
            f_target: 0.0,
            armijo_c1: 1e-4,
            backtrack: 0.5,
            max_backtracks: 60,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BfgsReport {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Objective at the start point and after every accepted step.
    pub history: Vec<f64>,
}

/// Central-difference gradient with per-coordinate step `h * max(|x_i|, 1)`.
pub fn central_gradient<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64], h: f64) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            let step = h * x[i].abs().max(1.0);
            probe[i] = x[i] + step;
            let fp = f(&probe);
            probe[i] = x[i] - step;
            let fm = f(&probe);
            probe[i] = x[i];
            (fp - fm) / (2.0 * step)
        })
        .collect()
}

fn project(x: &mut [f64], lower: &[f64], upper: &[f64]) {
    for ((xi, lo), hi) in x.iter_mut().zip(lower).zip(upper) {
        *xi = xi.clamp(*lo, *hi);
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn identity(n: usize) -> Vec<Vec<f64>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect()
}

/// Zero the gradient where a coordinate sits on a bound and descent would leave the box.
fn active_mask(x: &[f64], g: &[f64], lower: &[f64], upper: &[f64]) -> Vec<bool> {
    (0..x.len()).map(|i| (x[i] <= lower[i] && g[i] > 0.0) || (x[i] >= upper[i] && g[i] < 0.0)).collect()
}

/// Minimize `f` over the box `[lower, upper]` from `x0`.
///
/// Returns `None` if `f(x0)` is not finite. Non-finite values at trial points
/// are treated as failed line-search probes.
pub fn minimize<F: Fn(&[f64]) -> f64>(
    f: F,
    x0: &[f64],
    lower: &[f64],
    upper: &[f64],
    opts: &BfgsOptions,
) -> Option<BfgsReport> {
    let n = x0.len();
    assert!(lower.len() == n && upper.len() == n, "bound dimension mismatch");

    let mut x = x0.to_vec();
    project(&mut x, lower, upper);
    let mut fx = f(&x);
    if !fx.is_finite() {
        return None;
    }
    let mut history = vec![fx];
    let mut h_inv = identity(n);
    let mut g = central_gradient(&f, &x, opts.grad_step);
    let mut fresh_hessian = true;
    let mut iterations = 0;

    loop {
        if fx <= opts.f_target {
            return Some(BfgsReport { x, f: fx, iterations, converged: true, history });
        }
        let active = active_mask(&x, &g, lower, upper);
        let pg: Vec<f64> = g.iter().zip(&active).map(|(gi, a)| if *a { 0.0 } else { *gi }).collect();
        if pg.iter().all(|v| v.abs() <= opts.gtol) {
            return Some(BfgsReport { x, f: fx, iterations, converged: true, history });
        }
        if iterations >= opts.max_iters {
            return Some(BfgsReport { x, f: fx, iterations, converged: false, history });
        }

        let mut d: Vec<f64> = (0..n).map(|i| -dot(&h_inv[i], &pg)).collect();
        for i in 0..n {
            if active[i] {
                d[i] = 0.0;
            }
        }
        if dot(&d, &pg) >= 0.0 {
            // not a descent direction; fall back to steepest descent
            h_inv = identity(n);
            fresh_hessian = true;
            d = pg.iter().map(|v| -v).collect();
        }

        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..opts.max_backtracks {
            let mut trial: Vec<f64> = x.iter().zip(&d).map(|(xi, di)| xi + alpha * di).collect();
            project(&mut trial, lower, upper);
            let s: Vec<f64> = trial.iter().zip(&x).map(|(a, b)| a - b).collect();
            let decrease = dot(&g, &s);
            let ft = f(&trial);
            if ft.is_finite() && decrease < 0.0 && ft <= fx + opts.armijo_c1 * decrease {
                accepted = Some((trial, ft, s));
                break;
            }
            alpha *= opts.backtrack;
        }

        let Some((x_new, f_new, s)) = accepted else {
            if fresh_hessian {
                // no descent even along the projected gradient
                return Some(BfgsReport { x, f: fx, iterations, converged: true, history });
            }
            h_inv = identity(n);
            fresh_hessian = true;
            continue;
        };

        iterations += 1;
        let improvement = fx - f_new;
        let g_new = central_gradient(&f, &x_new, opts.grad_step);
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() && sy > 0.0 {
            if fresh_hessian {
                // Shanno-Phua scaling of the initial inverse Hessian
                let scale = sy / dot(&y, &y);
                for (i, row) in h_inv.iter_mut().enumerate() {
                    for (j, v) in row.iter_mut().enumerate() {
                        *v = if i == j { scale } else { 0.0 };
                    }
                }
            }
            bfgs_update(&mut h_inv, &s, &y, sy);
            fresh_hessian = false;
        }

        x = x_new;
        fx = f_new;
        g = g_new;
        history.push(fx);

        if improvement <= opts.tol {
            return Some(BfgsReport { x, f: fx, iterations, converged: true, history });
        }
    }
}

/// H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T
fn bfgs_update(h: &mut [Vec<f64>], s: &[f64], y: &[f64], sy: f64) {
    let n = s.len();
    let rho = 1.0 / sy;
    let hy: Vec<f64> = (0..n).map(|i| dot(&h[i], y)).collect();
    let yhy = dot(y, &hy);
    for i in 0..n {
        for j in 0..n {
            h[i][j] += -rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rosenbrock(x: &[f64]) -> f64 {
        (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2)
    }

    #[test]
    fn solves_rosenbrock() {
        let opts = BfgsOptions { max_iters: 2000, ..Default::default() };
        let r = minimize(rosenbrock, &[-1.2, 1.0], &[-5.0, -5.0], &[5.0, 5.0], &opts).unwrap();
        assert!(r.f < 1e-8, "f = {}", r.f);
        assert!((r.x[0] - 1.0).abs() < 1e-3 && (r.x[1] - 1.0).abs() < 1e-3);
    }

    #[test]
    fn respects_bounds() {
        // unconstrained minimum at (1, 1) lies outside the box
        let r = minimize(rosenbrock, &[0.0, 0.0], &[-1.0, -1.0], &[0.5, 0.5], &BfgsOptions::default()).unwrap();
        assert!(r.x[0] <= 0.5 && r.x[1] <= 0.5);
        assert!((r.x[0] - 0.5).abs() < 1e-6, "{:?}", r.x);
        assert!((r.x[1] - 0.25).abs() < 1e-4, "{:?}", r.x);
    }

    #[test]
    fn history_is_non_increasing() {
        let r = minimize(rosenbrock, &[-1.2, 1.0], &[-5.0, -5.0], &[5.0, 5.0], &BfgsOptions::default()).unwrap();
        assert!(r.history.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(r.history.len(), r.iterations + 1);
    }

    #[test]
    fn non_finite_start() {
        let r = minimize(|_: &[f64]| f64::NAN, &[0.0], &[-1.0], &[1.0], &BfgsOptions::default());
        assert!(r.is_none());
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let opts = BfgsOptions { max_iters: 2, ..Default::default() };
        let r = minimize(rosenbrock, &[-1.2, 1.0], &[-5.0, -5.0], &[5.0, 5.0], &opts).unwrap();
        assert!(!r.converged);
        assert_eq!(r.iterations, 2);
    }
}
