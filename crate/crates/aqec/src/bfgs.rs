//! Quasi-Newton minimization with numerically estimated gradients.
//!
//! Implements inverse-Hessian BFGS with a strong-Wolfe line search and a
//! backtracking fallback. Gradients come from central finite differences, so
//! the objective only needs to provide function values. Everything is pure
//! floating-point arithmetic: identical inputs produce bit-identical runs.

use ndarray::{Array1, Array2};

/// Sufficient-decrease constant of the Wolfe conditions.
const WOLFE_C1: f64 = 1e-4;
/// Curvature constant of the strong Wolfe conditions.
const WOLFE_C2: f64 = 0.9;
/// Maximum bracketing/zoom iterations before falling back to backtracking.
const LINE_SEARCH_STEPS: usize = 40;
/// Smallest step the backtracking fallback will try.
const MIN_STEP: f64 = 1e-16;

/// Tunables for [`minimize`].
#[derive(Debug, Clone, Copy)]
pub struct MinimizeOptions {
    /// Hard cap on accepted iterations.
    pub max_steps: usize,
    /// Stop once the gradient 2-norm falls below this.
    pub grad_tol: f64,
    /// Central-difference step for gradient estimates.
    pub fd_step: f64,
    /// Stop once the objective value falls below this, if set.
    pub value_tol: Option<f64>,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        MinimizeOptions {
            max_steps: 20_000,
            grad_tol: 1e-8,
            fd_step: 1e-6,
            value_tol: None,
        }
    }
}

/// Why the optimizer stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// Gradient norm fell below `grad_tol`.
    GradientNorm,
    /// Objective value fell below `value_tol`.
    ValueTol,
    /// Iteration budget exhausted.
    MaxSteps,
    /// No step with sufficient decrease could be found.
    LineSearchStall,
}

/// Outcome of a [`minimize`] run.
#[derive(Debug, Clone)]
pub struct MinimizeResult {
    pub x: Vec<f64>,
    pub value: f64,
    /// Objective value at the start point followed by every accepted iterate;
    /// non-increasing by the sufficient-decrease condition.
    pub trace: Vec<f64>,
    pub steps: usize,
    pub grad_norm: f64,
    pub stop: StopReason,
}

impl MinimizeResult {
    pub fn converged(&self) -> bool {
        self.stop == StopReason::GradientNorm
    }
}

fn gradient<F: FnMut(&[f64]) -> f64>(f: &mut F, x: &Array1<f64>, h: f64) -> Array1<f64> {
    let mut g = Array1::zeros(x.len());
    let mut probe = x.clone();
    for i in 0..x.len() {
        probe[i] = x[i] + h;
        let fp = f(probe.as_slice().expect("contiguous"));
        probe[i] = x[i] - h;
        let fm = f(probe.as_slice().expect("contiguous"));
        probe[i] = x[i];
        g[i] = (fp - fm) / (2.0 * h);
    }
    g
}

struct LineEval {
    alpha: f64,
    value: f64,
}

/// Directional derivative of `f` along `d` at `x + alpha d` by central
/// differences in the scalar line parameter.
fn dphi_at<F: FnMut(&[f64]) -> f64>(
    f: &mut F,
    x: &Array1<f64>,
    d: &Array1<f64>,
    alpha: f64,
    h: f64,
) -> f64 {
    let xp = x + &(d * (alpha + h));
    let xm = x + &(d * (alpha - h));
    let fp = f(xp.as_slice().expect("contiguous"));
    let fm = f(xm.as_slice().expect("contiguous"));
    (fp - fm) / (2.0 * h)
}

/// Strong-Wolfe line search (bracket then zoom). Returns the accepted
/// evaluation, or `None` when no acceptable step exists within the budget.
fn strong_wolfe<F: FnMut(&[f64]) -> f64>(
    f: &mut F,
    x: &Array1<f64>,
    d: &Array1<f64>,
    f0: f64,
    dphi0: f64,
    fd_step: f64,
) -> Option<LineEval> {
    let phi = |f: &mut F, a: f64| {
        let xt = x + &(d * a);
        f(xt.as_slice().expect("contiguous"))
    };
    // Scale the derivative probe so it stays small relative to the step.
    let h = fd_step / (1.0 + d.dot(d).sqrt());

    let mut alpha_prev = 0.0;
    let mut phi_prev = f0;
    let mut alpha = 1.0;
    let mut bracket: Option<(f64, f64, f64)> = None; // (lo, phi_lo, hi)
    for i in 0..LINE_SEARCH_STEPS {
        let phi_a = phi(f, alpha);
        if phi_a > f0 + WOLFE_C1 * alpha * dphi0 || (i > 0 && phi_a >= phi_prev) {
            bracket = Some((alpha_prev, phi_prev, alpha));
            break;
        }
        let dphi_a = dphi_at(f, x, d, alpha, h);
        if dphi_a.abs() <= -WOLFE_C2 * dphi0 {
            return Some(LineEval {
                alpha,
                value: phi_a,
            });
        }
        if dphi_a >= 0.0 {
            bracket = Some((alpha, phi_a, alpha_prev));
            break;
        }
        alpha_prev = alpha;
        phi_prev = phi_a;
        alpha *= 2.0;
    }
    let (mut lo, mut phi_lo, mut hi) = bracket?;
    for _ in 0..LINE_SEARCH_STEPS {
        let mid = 0.5 * (lo + hi);
        let phi_mid = phi(f, mid);
        if phi_mid > f0 + WOLFE_C1 * mid * dphi0 || phi_mid >= phi_lo {
            hi = mid;
        } else {
            let dphi_mid = dphi_at(f, x, d, mid, h);
            if dphi_mid.abs() <= -WOLFE_C2 * dphi0 {
                return Some(LineEval {
                    alpha: mid,
                    value: phi_mid,
                });
            }
            if dphi_mid * (hi - lo) >= 0.0 {
                hi = lo;
            }
            lo = mid;
            phi_lo = phi_mid;
        }
        if (hi - lo).abs() * d.dot(d).sqrt() < MIN_STEP {
            break;
        }
    }
    None
}

/// Backtracking Armijo fallback: halve the step until sufficient decrease.
fn backtrack<F: FnMut(&[f64]) -> f64>(
    f: &mut F,
    x: &Array1<f64>,
    d: &Array1<f64>,
    f0: f64,
    dphi0: f64,
) -> Option<(f64, f64)> {
    let mut alpha = 1.0;
    while alpha >= MIN_STEP {
        let xt = x + &(d * alpha);
        let ft = f(xt.as_slice().expect("contiguous"));
        if ft <= f0 + WOLFE_C1 * alpha * dphi0 {
            return Some((alpha, ft));
        }
        alpha *= 0.5;
    }
    None
}

/// Minimize `f` from `x0` by BFGS with finite-difference gradients.
///
/// The inverse-Hessian estimate is updated only when the curvature condition
/// `s . y > 0` holds safely; a non-descent direction resets it to the
/// identity. Accepted iterates always satisfy sufficient decrease, so the
/// returned trace is non-increasing.
pub fn minimize<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    opts: &MinimizeOptions,
) -> MinimizeResult {
    let n = x0.len();
    let mut x = Array1::from(x0.to_vec());
    let mut fx = f(x.as_slice().expect("contiguous"));
    let mut g = gradient(&mut f, &x, opts.fd_step);
    let mut h_inv: Array2<f64> = Array2::eye(n);
    let mut trace = vec![fx];
    let mut first_update = true;

    for step in 0..opts.max_steps {
        let grad_norm = g.dot(&g).sqrt();
        if let Some(tol) = opts.value_tol {
            if fx < tol {
                return MinimizeResult {
                    x: x.to_vec(),
                    value: fx,
                    trace,
                    steps: step,
                    grad_norm,
                    stop: StopReason::ValueTol,
                };
            }
        }
        if grad_norm < opts.grad_tol {
            return MinimizeResult {
                x: x.to_vec(),
                value: fx,
                trace,
                steps: step,
                grad_norm,
                stop: StopReason::GradientNorm,
            };
        }

        let mut d = -h_inv.dot(&g);
        let mut dphi0 = g.dot(&d);
        if !(dphi0 < 0.0) {
            // Curvature estimate went bad; restart from steepest descent.
            h_inv = Array2::eye(n);
            first_update = true;
            d = -&g;
            dphi0 = g.dot(&d);
            if !(dphi0 < 0.0) {
                return MinimizeResult {
                    x: x.to_vec(),
                    value: fx,
                    trace,
                    steps: step,
                    grad_norm,
                    stop: StopReason::LineSearchStall,
                };
            }
        }

        let (alpha, f_new) = match strong_wolfe(&mut f, &x, &d, fx, dphi0, opts.fd_step) {
            Some(ev) => (ev.alpha, ev.value),
            None => match backtrack(&mut f, &x, &d, fx, dphi0) {
                Some(pair) => pair,
                None => {
                    return MinimizeResult {
                        x: x.to_vec(),
                        value: fx,
                        trace,
                        steps: step,
                        grad_norm,
                        stop: StopReason::LineSearchStall,
                    };
                }
            },
        };

        let x_new = &x + &(&d * alpha);
        let g_new = gradient(&mut f, &x_new, opts.fd_step);
        let s = &x_new - &x;
        let y = &g_new - &g;
        let sy = s.dot(&y);
        let ss = s.dot(&s).sqrt();
        let yy = y.dot(&y).sqrt();
        if sy > 1e-10 * ss * yy && sy > 0.0 {
            if first_update {
                // Scale the initial inverse Hessian to the first curvature
                // pair before applying the update.
                h_inv = Array2::eye(n) * (sy / y.dot(&y));
                first_update = false;
            }
            let rho = 1.0 / sy;
            // H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T
            let hy = h_inv.dot(&y);
            let yhy = y.dot(&hy);
            let s_col = s.view().insert_axis(ndarray::Axis(1));
            let hy_col = hy.view().insert_axis(ndarray::Axis(1));
            let outer_s_hy = s_col.dot(&hy_col.t());
            let outer_hy_s = hy_col.dot(&s_col.t());
            let outer_s_s = s_col.dot(&s_col.t());
            h_inv = &h_inv - &(&outer_s_hy * rho) - &(&outer_hy_s * rho)
                + &(&outer_s_s * (rho * rho * yhy + rho));
        }
        // Skipped updates keep the previous estimate; the curvature pair is
        // too ill-conditioned to be informative.

        x = x_new;
        fx = f_new;
        g = g_new;
        trace.push(fx);
    }

    let grad_norm = g.dot(&g).sqrt();
    MinimizeResult {
        x: x.to_vec(),
        value: fx,
        trace,
        steps: opts.max_steps,
        grad_norm,
        stop: StopReason::MaxSteps,
    }
}
