//! Equality-constrained Newton's method with a backtracking line search.
//!
//! Each iteration solves the KKT block system for the Newton step `Δx`
//! (which satisfies `AΔx = 0`), backtracks until the trial point is inside
//! the domain and gives sufficient decrease, and stops once two consecutive
//! decreases in the objective are at most `eps_inner`.

use thiserror::Error;

use crate::linalg::{self, DenseMatrix, KktSystem, LinalgError};
use crate::model::ScalarField;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NewtonError {
    #[error("direction is not a descent direction (gradᵀdx = {slope:e})")]
    NoDescent { slope: f64 },
    #[error("line search stalled after {halvings} step reductions")]
    LineSearchStall { halvings: usize },
    #[error("starting point violates Ax = b (residual {residual:e})")]
    InfeasibleStart { residual: f64 },
    #[error("point is outside the domain of the objective")]
    OutOfDomain,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Kkt(#[from] LinalgError),
}

/// Backtracking parameters: accept the first `s ∈ {1, β, β², …}` with
/// `f(x + s·dx) ≤ f(x) + α·s·gradᵀdx`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSearchParams {
    pub alpha: f64,
    pub beta: f64,
    pub max_halvings: usize,
}

impl Default for LineSearchParams {
    fn default() -> Self {
        Self {
            alpha: 0.25,
            beta: 0.5,
            max_halvings: 60,
        }
    }
}

impl LineSearchParams {
    pub fn validate(&self) -> Result<(), NewtonError> {
        if !(self.alpha > 0.0 && self.alpha < 0.5) {
            return Err(NewtonError::InvalidParams(format!(
                "alpha must lie in (0, 0.5), got {}",
                self.alpha
            )));
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(NewtonError::InvalidParams(format!(
                "beta must lie in (0, 1), got {}",
                self.beta
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineStep {
    pub step: f64,
    /// Objective value at the accepted point.
    pub value: f64,
}

/// Backtracking line search along a descent direction. Candidates outside
/// the (open) domain are rejected before the decrease test is evaluated.
pub fn line_search(
    f: &dyn ScalarField,
    x: &[f64],
    dx: &[f64],
    grad: &[f64],
    params: &LineSearchParams,
) -> Result<LineStep, NewtonError> {
    params.validate()?;
    if !f.in_domain(x) {
        return Err(NewtonError::OutOfDomain);
    }
    let slope = linalg::dot(grad, dx);
    if !(slope < 0.0) {
        return Err(NewtonError::NoDescent { slope });
    }
    let f0 = f.value(x);
    let mut step = 1.0;
    let mut trial = vec![0.0; x.len()];
    for _ in 0..=params.max_halvings {
        for ((t, xi), di) in trial.iter_mut().zip(x).zip(dx) {
            *t = xi + step * di;
        }
        if f.in_domain(&trial) {
            let value = f.value(&trial);
            if value <= f0 + params.alpha * step * slope {
                return Ok(LineStep { step, value });
            }
        }
        step *= params.beta;
    }
    Err(NewtonError::LineSearchStall {
        halvings: params.max_halvings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    pub line_search: LineSearchParams,
    /// Decrease threshold for the stopping rule; `None` means
    /// `1e-10 · (1 + |f(x0)|)`.
    pub eps_inner: Option<f64>,
    pub max_iter: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            line_search: LineSearchParams::default(),
            eps_inner: None,
            max_iter: 200,
        }
    }
}

/// One accepted Newton step.
#[derive(Debug, Clone, PartialEq)]
pub struct NewtonRecord {
    /// Objective after the step.
    pub value: f64,
    pub step: f64,
    /// `‖∇f‖∞` at the point the step was taken from.
    pub grad_norm: f64,
    /// `‖Ax − b‖∞` after the step.
    pub eq_residual: f64,
    pub x: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Converged,
    MaxIterations,
    /// The step observer asked to stop.
    Interrupted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonTrace {
    pub records: Vec<NewtonRecord>,
    /// KKT solves performed, including the final one that confirmed
    /// convergence.
    pub kkt_solves: usize,
    pub termination: Termination,
}

impl NewtonTrace {
    /// Accepted Newton steps.
    pub fn iterations(&self) -> usize {
        self.records.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonOutcome {
    pub x: Vec<f64>,
    /// Multiplier `w` from the last KKT solve.
    pub vhat: Vec<f64>,
    pub value: f64,
    pub trace: NewtonTrace,
}

pub fn minimize_eq_newton(
    f: &dyn ScalarField,
    eq_a: &DenseMatrix,
    eq_b: &[f64],
    x0: &[f64],
    opts: &NewtonOptions,
) -> Result<NewtonOutcome, NewtonError> {
    minimize_eq_newton_observed(f, eq_a, eq_b, x0, opts, &mut |_| false)
}

fn equality_residual(eq_a: &DenseMatrix, eq_b: &[f64], x: &[f64]) -> f64 {
    if eq_a.rows() == 0 {
        0.0
    } else {
        linalg::norm_inf(&linalg::sub(&eq_a.mul_vec(x), eq_b))
    }
}

/// As [`minimize_eq_newton`], calling `observer` with every accepted iterate;
/// a `true` return ends the run with [`Termination::Interrupted`].
pub fn minimize_eq_newton_observed(
    f: &dyn ScalarField,
    eq_a: &DenseMatrix,
    eq_b: &[f64],
    x0: &[f64],
    opts: &NewtonOptions,
    observer: &mut dyn FnMut(&[f64]) -> bool,
) -> Result<NewtonOutcome, NewtonError> {
    opts.line_search.validate()?;
    let n = f.dim();
    let p = eq_a.rows();
    if x0.len() != n || (p > 0 && eq_a.cols() != n) || eq_b.len() != p {
        return Err(NewtonError::InvalidParams(format!(
            "dimensions disagree: x0 has {}, field {n}, A is {}x{}, b has {}",
            x0.len(),
            eq_a.rows(),
            eq_a.cols(),
            eq_b.len()
        )));
    }
    let eq_tol = 1e-8 * (1.0 + linalg::norm_inf(eq_b));
    let residual = equality_residual(eq_a, eq_b, x0);
    if !(residual <= eq_tol) {
        return Err(NewtonError::InfeasibleStart { residual });
    }
    if !f.in_domain(x0) {
        return Err(NewtonError::OutOfDomain);
    }
    let eq_a = if p == 0 { DenseMatrix::zeros(0, n) } else { eq_a.clone() };

    let mut x = x0.to_vec();
    let mut value = f.value(&x);
    let eps = opts.eps_inner.unwrap_or(1e-10 * (1.0 + value.abs()));
    let mut records = Vec::new();
    let mut kkt_solves = 0;
    let mut small_decreases = 0;
    let mut vhat = vec![0.0; p];

    let newton_step = |x: &[f64], kkt_solves: &mut usize| -> Result<_, NewtonError> {
        let grad = f.gradient(x);
        let sys = KktSystem::new(f.hessian(x), eq_a.clone(), grad);
        let sol = linalg::solve_kkt(&sys)?;
        *kkt_solves += 1;
        Ok((sys.g, sol))
    };

    for _ in 0..opts.max_iter {
        let (grad, sol) = newton_step(&x, &mut kkt_solves)?;
        vhat = sol.w;
        let slope = linalg::dot(&grad, &sol.dx);
        // Predicted decrease λ²/2: once it is below eps, every remaining
        // difference in the stopping rule is too.
        if -slope / 2.0 <= eps {
            return Ok(NewtonOutcome {
                x,
                vhat,
                value,
                trace: NewtonTrace {
                    records,
                    kkt_solves,
                    termination: Termination::Converged,
                },
            });
        }
        let ls = line_search(f, &x, &sol.dx, &grad, &opts.line_search)?;
        linalg::axpy(ls.step, &sol.dx, &mut x);
        let decrease = value - ls.value;
        value = ls.value;
        records.push(NewtonRecord {
            value,
            step: ls.step,
            grad_norm: linalg::norm_inf(&grad),
            eq_residual: equality_residual(&eq_a, eq_b, &x),
            x: x.clone(),
        });
        if observer(&x) {
            return Ok(NewtonOutcome {
                x,
                vhat,
                value,
                trace: NewtonTrace {
                    records,
                    kkt_solves,
                    termination: Termination::Interrupted,
                },
            });
        }
        if decrease <= eps {
            small_decreases += 1;
        } else {
            small_decreases = 0;
        }
        if small_decreases >= 2 {
            let (_, sol) = newton_step(&x, &mut kkt_solves)?;
            return Ok(NewtonOutcome {
                x,
                vhat: sol.w,
                value,
                trace: NewtonTrace {
                    records,
                    kkt_solves,
                    termination: Termination::Converged,
                },
            });
        }
    }
    Ok(NewtonOutcome {
        x,
        vhat,
        value,
        trace: NewtonTrace {
            records,
            kkt_solves,
            termination: Termination::MaxIterations,
        },
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::barrier::BarrierSubproblem;
    use crate::model::{self, FnField, Quadratic};

    fn quad(diag: &[f64]) -> Quadratic {
        Quadratic::new(DenseMatrix::diagonal(diag), vec![0.0; diag.len()], 0.0).unwrap()
    }

    #[test]
    fn full_step_accepted_on_square() {
        // f(0) = 0 ≤ 1 + 0.25·1·(−2) = 0.5
        let f = quad(&[2.0]);
        let ls = line_search(&f, &[1.0], &[-1.0], &[2.0], &LineSearchParams::default()).unwrap();
        assert_eq!(ls.step, 1.0);
        assert_eq!(ls.value, 0.0);
    }

    #[test]
    fn domain_guard_halves_past_boundary() {
        // f(x) = −x on x < 1: from 0.5 along +1, the steps 1 and 0.5 leave
        // the open domain, 0.25 is the first admissible candidate.
        let f = FnField::new(1, |x| -x[0], |_| vec![-1.0], |_| DenseMatrix::zeros(1, 1))
            .with_domain(|x| x[0] < 1.0);
        let ls = line_search(&f, &[0.5], &[1.0], &[-1.0], &LineSearchParams::default()).unwrap();
        assert_eq!(ls.step, 0.25);
    }

    #[test]
    fn non_descent_rejected() {
        let f = quad(&[2.0]);
        assert!(matches!(
            line_search(&f, &[1.0], &[1.0], &[2.0], &LineSearchParams::default()),
            Err(NewtonError::NoDescent { .. })
        ));
        assert!(matches!(
            line_search(&f, &[0.0], &[1.0], &[0.0], &LineSearchParams::default()),
            Err(NewtonError::NoDescent { .. })
        ));
    }

    #[test]
    fn stall_reported() {
        // Domain is empty except the start, so every candidate is rejected.
        let f = FnField::new(1, |x| -x[0], |_| vec![-1.0], |_| DenseMatrix::zeros(1, 1))
            .with_domain(|x| x[0] <= 0.0);
        let params = LineSearchParams {
            max_halvings: 10,
            ..Default::default()
        };
        assert_eq!(
            line_search(&f, &[0.0], &[1.0], &[-1.0], &params),
            Err(NewtonError::LineSearchStall { halvings: 10 })
        );
    }

    #[test]
    fn bad_params_rejected() {
        let f = quad(&[2.0]);
        let params = LineSearchParams {
            alpha: 0.5,
            ..Default::default()
        };
        assert!(matches!(
            line_search(&f, &[1.0], &[-1.0], &[2.0], &params),
            Err(NewtonError::InvalidParams(_))
        ));
    }

    #[test]
    fn equality_constrained_quadratic_one_step() {
        let f = quad(&[2.0, 2.0]);
        let a = DenseMatrix::from_rows(&[[1.0, 1.0]]).unwrap();
        let out = minimize_eq_newton(&f, &a, &[2.0], &[2.0, 0.0], &NewtonOptions::default())
            .unwrap();
        assert_eq!(out.trace.termination, Termination::Converged);
        assert_eq!(out.trace.iterations(), 1);
        assert_eq!(out.trace.records[0].step, 1.0);
        assert!((out.x[0] - 1.0).abs() < 1e-14 && (out.x[1] - 1.0).abs() < 1e-14);
        assert!((out.vhat[0] + 2.0).abs() < 1e-12, "{:?}", out.vhat);
    }

    #[test]
    fn unconstrained_quadratic_one_step() {
        let f = quad(&[2.0]);
        let out = minimize_eq_newton(&f, &DenseMatrix::zeros(0, 1), &[], &[5.0], &NewtonOptions::default())
            .unwrap();
        assert_eq!(out.x, vec![0.0]);
        assert_eq!(out.trace.iterations(), 1);
        assert!(out.vhat.is_empty());
    }

    #[test]
    fn infeasible_start_rejected() {
        let f = quad(&[2.0, 2.0]);
        let a = DenseMatrix::from_rows(&[[1.0, 1.0]]).unwrap();
        assert!(matches!(
            minimize_eq_newton(&f, &a, &[2.0], &[2.0, 1.0], &NewtonOptions::default()),
            Err(NewtonError::InfeasibleStart { .. })
        ));
    }

    #[test]
    fn singular_kkt_propagates() {
        let f = Quadratic::linear(vec![1.0, 0.0], 0.0);
        let a = DenseMatrix::from_rows(&[[0.0, 1.0]]).unwrap();
        assert!(matches!(
            minimize_eq_newton(&f, &a, &[0.0], &[0.0, 0.0], &NewtonOptions::default()),
            Err(NewtonError::Kkt(LinalgError::SingularKkt { .. }))
        ));
    }

    #[test]
    fn max_iterations_flagged() {
        let prob = model::example6();
        let sub = BarrierSubproblem::new(&prob, 10.0).unwrap();
        let opts = NewtonOptions {
            max_iter: 2,
            ..Default::default()
        };
        let out = minimize_eq_newton(&sub, prob.eq_a(), prob.eq_b(), &[100.0, 50.0, 300.0], &opts)
            .unwrap();
        assert_eq!(out.trace.termination, Termination::MaxIterations);
        assert_eq!(out.trace.iterations(), 2);
    }

    #[test]
    fn example6_centering_at_t10() {
        let prob = model::example6();
        let sub = BarrierSubproblem::new(&prob, 10.0).unwrap();
        let out = minimize_eq_newton(
            &sub,
            prob.eq_a(),
            prob.eq_b(),
            &[100.0, 50.0, 300.0],
            &NewtonOptions::default(),
        )
        .unwrap();
        assert_eq!(out.trace.termination, Termination::Converged);
        assert!(prob.equality_residual(&out.x) <= 1e-8);
        assert!(prob.is_strictly_feasible(&out.x));
        let its = out.trace.iterations();
        assert!((3..=60).contains(&its), "{its} iterations");
        for w in out.trace.records.windows(2) {
            assert!(w[1].value < w[0].value);
        }
    }

    #[test]
    fn observer_interrupts() {
        let prob = model::example6();
        let sub = BarrierSubproblem::new(&prob, 10.0).unwrap();
        let mut seen = 0;
        let out = minimize_eq_newton_observed(
            &sub,
            prob.eq_a(),
            prob.eq_b(),
            &[100.0, 50.0, 300.0],
            &NewtonOptions::default(),
            &mut |_| {
                seen += 1;
                seen == 3
            },
        )
        .unwrap();
        assert_eq!(out.trace.termination, Termination::Interrupted);
        assert_eq!(out.trace.iterations(), 3);
    }

    #[test]
    fn objective_out_of_domain_at_start() {
        let f = Arc::new(
            FnField::new(1, |x| -x[0].ln(), |x| vec![-1.0 / x[0]], |x| {
                DenseMatrix::from_rows(&[[1.0 / (x[0] * x[0])]]).unwrap()
            })
            .with_domain(|x| x[0] > 0.0),
        );
        assert_eq!(
            minimize_eq_newton(f.as_ref(), &DenseMatrix::zeros(0, 1), &[], &[-1.0], &NewtonOptions::default()),
            Err(NewtonError::OutOfDomain)
        );
    }
}
