//! Full-batch gradient descent with an Armijo backtracking line search.
//!
//! Every trainable component in this crate (ranking weights, the intensity
//! extractor and classifier, the variational net) is optimized through this
//! one routine, so the contracts live here: the objective value is
//! non-increasing across accepted steps, iteration stops at the gradient
//! tolerance or the iteration cap, and the whole loop is deterministic.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum OptimizeError {
    #[error("non-finite objective at iteration {iteration}")]
    NonFinite { iteration: usize },
}

/// A smooth (almost everywhere) objective with an analytic gradient.
pub trait Objective {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn value_and_grad(&self, x: &[f64]) -> (f64, Vec<f64>);
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepRule {
    /// Start every line search at the given step. Steps that fail the
    /// simple-decrease test are still halved, keeping descent monotone.
    Fixed(f64),
    /// Armijo backtracking with an adaptive initial step.
    Backtracking,
}

#[derive(Debug, Clone)]
pub struct GdOptions {
    pub max_iterations: usize,
    pub gradient_tolerance: f64,
    pub step_rule: StepRule,
}

impl Default for GdOptions {
    fn default() -> Self {
        Self { max_iterations: 5000, gradient_tolerance: 1e-8, step_rule: StepRule::Backtracking }
    }
}

#[derive(Debug, Clone)]
pub struct GdResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub grad_norm: f64,
    /// Accepted descent steps taken.
    pub iterations: usize,
    /// True when the gradient tolerance was reached.
    pub converged: bool,
}

const ARMIJO_C1: f64 = 1e-4;
const SHRINK: f64 = 0.5;
const MIN_STEP: f64 = 1e-20;
const MAX_STEP: f64 = 1e8;

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Minimize `obj` from `x0`.
///
/// Returns an error if the objective or gradient turns non-finite at an
/// accepted iterate. Non-finite *trial* values during the line search are
/// treated as rejections (the step just shrinks).
pub fn minimize<O: Objective>(obj: &O, x0: Vec<f64>, opts: &GdOptions) -> Result<GdResult, OptimizeError> {
    assert_eq!(x0.len(), obj.dim(), "initial point dimension mismatch");
    let mut x = x0;
    let (mut fx, mut grad) = obj.value_and_grad(&x);
    if !fx.is_finite() || grad.iter().any(|g| !g.is_finite()) {
        return Err(OptimizeError::NonFinite { iteration: 0 });
    }

    let (mut step, sufficient_decrease, adaptive) = match opts.step_rule {
        StepRule::Fixed(s) => (s, 0.0, false),
        StepRule::Backtracking => (1.0, ARMIJO_C1, true),
    };

    let mut iterations = 0;
    let mut converged = false;
    let mut trial = vec![0.0; x.len()];

    for iter in 1..=opts.max_iterations {
        let gnorm = norm(&grad);
        if gnorm <= opts.gradient_tolerance {
            converged = true;
            break;
        }

        let mut t = if adaptive { (step * 2.0).min(MAX_STEP) } else { step };
        let accepted = loop {
            for (ti, (xi, gi)) in trial.iter_mut().zip(x.iter().zip(&grad)) {
                *ti = xi - t * gi;
            }
            let ft = obj.value(&trial);
            if ft.is_finite() && ft <= fx - sufficient_decrease * t * gnorm * gnorm {
                break true;
            }
            t *= SHRINK;
            if t < MIN_STEP {
                break false;
            }
        };
        if !accepted {
            // no representable step decreases the objective; numerical floor
            break;
        }
        step = t;
        std::mem::swap(&mut x, &mut trial);
        let (f_new, g_new) = obj.value_and_grad(&x);
        if !f_new.is_finite() || g_new.iter().any(|g| !g.is_finite()) {
            return Err(OptimizeError::NonFinite { iteration: iter });
        }
        fx = f_new;
        grad = g_new;
        iterations = iter;
    }

    let grad_norm = norm(&grad);
    if grad_norm <= opts.gradient_tolerance {
        converged = true;
    }
    Ok(GdResult { x, value: fx, grad_norm, iterations, converged })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// f(x) = 1/2 (x - c)' A (x - c) with diagonal A.
    struct Quadratic {
        diag: Vec<f64>,
        center: Vec<f64>,
    }

    impl Objective for Quadratic {
        fn dim(&self) -> usize {
            self.diag.len()
        }
        fn value(&self, x: &[f64]) -> f64 {
            x.iter()
                .zip(&self.center)
                .zip(&self.diag)
                .map(|((xi, ci), a)| 0.5 * a * (xi - ci) * (xi - ci))
                .sum()
        }
        fn value_and_grad(&self, x: &[f64]) -> (f64, Vec<f64>) {
            let g = x
                .iter()
                .zip(&self.center)
                .zip(&self.diag)
                .map(|((xi, ci), a)| a * (xi - ci))
                .collect();
            (self.value(x), g)
        }
    }

    #[test]
    fn quadratic_converges_to_center() {
        let obj = Quadratic { diag: vec![1.0, 10.0, 0.5], center: vec![2.0, -1.0, 0.25] };
        let res = minimize(&obj, vec![0.0; 3], &GdOptions::default()).unwrap();
        assert!(res.converged);
        for (xi, ci) in res.x.iter().zip(&obj.center) {
            assert_abs_diff_eq!(xi, ci, epsilon = 1e-7);
        }
    }

    #[test]
    fn objective_monotone_under_fixed_rule() {
        struct Tracker<'a> {
            inner: &'a Quadratic,
            seen: std::cell::RefCell<Vec<f64>>,
        }
        impl Objective for Tracker<'_> {
            fn dim(&self) -> usize {
                self.inner.dim()
            }
            fn value(&self, x: &[f64]) -> f64 {
                self.inner.value(x)
            }
            fn value_and_grad(&self, x: &[f64]) -> (f64, Vec<f64>) {
                let (f, g) = self.inner.value_and_grad(x);
                self.seen.borrow_mut().push(f);
                (f, g)
            }
        }
        let q = Quadratic { diag: vec![4.0, 1.0], center: vec![1.0, 1.0] };
        let t = Tracker { inner: &q, seen: Default::default() };
        // deliberately too-large fixed step; halving keeps descent monotone
        let opts = GdOptions { max_iterations: 200, gradient_tolerance: 1e-10, step_rule: StepRule::Fixed(5.0) };
        let res = minimize(&t, vec![6.0, -3.0], &opts).unwrap();
        assert!(res.converged);
        let seen = t.seen.borrow();
        for w in seen.windows(2) {
            assert!(w[1] <= w[0] + 1e-15, "objective increased: {} -> {}", w[0], w[1]);
        }
    }

    #[test]
    fn non_finite_objective_is_reported() {
        struct Bad;
        impl Objective for Bad {
            fn dim(&self) -> usize {
                1
            }
            fn value(&self, x: &[f64]) -> f64 {
                -x[0]
            }
            fn value_and_grad(&self, x: &[f64]) -> (f64, Vec<f64>) {
                if x[0] > 0.5 {
                    (f64::NAN, vec![f64::NAN])
                } else {
                    (-x[0], vec![-1.0])
                }
            }
        }
        // descent drives the iterate past 0.5 where the gradient blows up;
        // the accepted-point check must report it
        let err = minimize(&Bad, vec![0.0], &GdOptions::default());
        assert!(matches!(err, Err(OptimizeError::NonFinite { .. })));
    }

    #[test]
    fn iteration_cap_respected() {
        let obj = Quadratic { diag: vec![1.0], center: vec![100.0] };
        let opts = GdOptions { max_iterations: 3, gradient_tolerance: 1e-16, step_rule: StepRule::Fixed(1e-3) };
        let res = minimize(&obj, vec![0.0], &opts).unwrap();
        assert_eq!(res.iterations, 3);
        assert!(!res.converged);
    }
}
