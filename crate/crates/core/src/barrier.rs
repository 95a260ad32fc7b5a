//! The logarithmic barrier `φ(x) = −Σ log(−fᵢ(x))`, the centering
//! subproblem `minimize t·f0(x) + φ(x) s.t. Ax = b`, and recovery of a dual
//! point from an (approximate) central point.

use thiserror::Error;

use crate::linalg::{self, DenseMatrix};
use crate::model::{ConvexProblem, Evaluation, ScalarField};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BarrierError {
    #[error("barrier parameter t must be positive and finite, got {0}")]
    InvalidT(f64),
    #[error("point is not strictly feasible: inequality {index} is violated")]
    NotStrictlyFeasible { index: usize },
    #[error("point is outside the objective's domain")]
    OutOfDomain,
    #[error("equality residual {residual:e} exceeds tolerance")]
    EqualityViolated { residual: f64 },
    #[error("centering residual {residual:e} exceeds tolerance {tol:e}")]
    NotCentered { residual: f64, tol: f64 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// Barrier subproblem for a fixed accuracy parameter `t > 0`.
#[derive(Debug, Clone, Copy)]
pub struct BarrierSubproblem<'a> {
    base: &'a ConvexProblem,
    t: f64,
}

/// Dual point recovered from a central point, with the `m/t` gap bound.
#[derive(Debug, Clone, PartialEq)]
pub struct DualPoint {
    pub lambda: Vec<f64>,
    pub v: Vec<f64>,
    pub gap_bound: f64,
    /// Lower bound on the optimal value: `f0(x) − m/t`.
    pub dual_value: f64,
}

impl DualPoint {
    /// The trivial certificate for a problem without inequalities, where the
    /// equality-constrained minimizer is itself optimal.
    pub fn exact(v: Vec<f64>, f0: f64) -> Self {
        Self {
            lambda: Vec::new(),
            v,
            gap_bound: 0.0,
            dual_value: f0,
        }
    }
}

impl<'a> BarrierSubproblem<'a> {
    pub fn new(base: &'a ConvexProblem, t: f64) -> Result<Self, BarrierError> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(BarrierError::InvalidT(t));
        }
        Ok(Self { base, t })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn base(&self) -> &'a ConvexProblem {
        self.base
    }

    pub fn gap_bound(&self) -> f64 {
        self.base.m() as f64 / self.t
    }

    /// Slacks `−fᵢ(x) > 0`, or the first index where strict feasibility
    /// fails.
    fn slacks(&self, x: &[f64]) -> Result<Vec<f64>, BarrierError> {
        if x.len() != self.base.n() {
            return Err(BarrierError::Dimension(format!(
                "point has length {}, problem has {} variables",
                x.len(),
                self.base.n()
            )));
        }
        let mut slacks = Vec::with_capacity(self.base.m());
        for (index, f) in self.base.inequalities().iter().enumerate() {
            if !f.in_domain(x) {
                return Err(BarrierError::NotStrictlyFeasible { index });
            }
            let s = -f.value(x);
            if !(s > 0.0) {
                return Err(BarrierError::NotStrictlyFeasible { index });
            }
            slacks.push(s);
        }
        if !self.base.objective().in_domain(x) {
            return Err(BarrierError::OutOfDomain);
        }
        Ok(slacks)
    }

    /// Value, gradient and Hessian of `t·f0 + φ`:
    ///
    /// ```text
    /// ∇  = t∇f0 + Σ ∇fᵢ / (−fᵢ)
    /// ∇² = t∇²f0 + Σ ∇fᵢ∇fᵢᵀ / fᵢ² + Σ ∇²fᵢ / (−fᵢ)
    /// ```
    pub fn eval(&self, x: &[f64]) -> Result<Evaluation, BarrierError> {
        let slacks = self.slacks(x)?;
        let f0 = self.base.objective();
        let mut value = self.t * f0.value(x);
        let mut gradient = f0.gradient(x);
        gradient.iter_mut().for_each(|g| *g *= self.t);
        let mut hessian = f0.hessian(x);
        hessian.scale(self.t);
        for (f, s) in self.base.inequalities().iter().zip(&slacks) {
            value -= s.ln();
            let g = f.gradient(x);
            linalg::axpy(1.0 / s, &g, &mut gradient);
            hessian.rank_one_update(1.0 / (s * s), &g);
            hessian.add_scaled(1.0 / s, &f.hessian(x));
        }
        Ok(Evaluation {
            value,
            gradient,
            hessian,
        })
    }

    /// `t∇f0(x) + ∇φ(x) + Aᵀv̂`; vanishes at the central point `x*(t)`.
    pub fn centering_residual(&self, x: &[f64], vhat: &[f64]) -> Result<Vec<f64>, BarrierError> {
        if vhat.len() != self.base.p() {
            return Err(BarrierError::Dimension(format!(
                "v̂ has length {}, problem has {} equalities",
                vhat.len(),
                self.base.p()
            )));
        }
        let residual = self.base.equality_residual(x);
        if residual > self.base.equality_tol() {
            return Err(BarrierError::EqualityViolated { residual });
        }
        let slacks = self.slacks(x)?;
        let mut r = self.base.objective().gradient(x);
        r.iter_mut().for_each(|g| *g *= self.t);
        for (f, s) in self.base.inequalities().iter().zip(&slacks) {
            linalg::axpy(1.0 / s, &f.gradient(x), &mut r);
        }
        if !vhat.is_empty() {
            linalg::axpy(1.0, &self.base.eq_a().transpose_mul_vec(vhat), &mut r);
        }
        Ok(r)
    }

    /// Recovers `λᵢ = −1/(t fᵢ(x))`, `v = v̂/t` from a point whose centering
    /// residual is within `tol` (infinity norm).
    pub fn dual_point(&self, x: &[f64], vhat: &[f64], tol: f64) -> Result<DualPoint, BarrierError> {
        let r = self.centering_residual(x, vhat)?;
        let residual = linalg::norm_inf(&r);
        if !(residual <= tol) {
            return Err(BarrierError::NotCentered { residual, tol });
        }
        let slacks = self.slacks(x)?;
        let lambda = slacks.iter().map(|s| 1.0 / (self.t * s)).collect();
        let v = vhat.iter().map(|w| w / self.t).collect();
        let gap_bound = self.gap_bound();
        Ok(DualPoint {
            lambda,
            v,
            gap_bound,
            dual_value: self.base.objective().value(x) - gap_bound,
        })
    }

    /// Scale of the terms that cancel in the centering residual; used to
    /// turn a relative centering tolerance into an absolute one.
    pub fn residual_scale(&self, x: &[f64]) -> Result<f64, BarrierError> {
        let slacks = self.slacks(x)?;
        let mut scale = self.t * linalg::norm_inf(&self.base.objective().gradient(x));
        for (f, s) in self.base.inequalities().iter().zip(&slacks) {
            scale = scale.max(linalg::norm_inf(&f.gradient(x)) / s);
        }
        Ok(1.0 + scale)
    }
}

impl ScalarField for BarrierSubproblem<'_> {
    fn dim(&self) -> usize {
        self.base.n()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.eval(x).map_or(f64::INFINITY, |e| e.value)
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.eval(x).expect("gradient queried outside the barrier domain").gradient
    }

    fn hessian(&self, x: &[f64]) -> DenseMatrix {
        self.eval(x).expect("hessian queried outside the barrier domain").hessian
    }

    fn in_domain(&self, x: &[f64]) -> bool {
        x.len() == self.base.n() && x.iter().all(|v| v.is_finite()) && self.slacks(x).is_ok()
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::model::{self, check_derivatives, Affine, Field, Quadratic};

    fn single_upper_bound(bound: f64, objective: Quadratic) -> ConvexProblem {
        let c: Field = Arc::new(Affine::le(vec![1.0], bound));
        ConvexProblem::new(Arc::new(objective), vec![c], DenseMatrix::zeros(0, 1), vec![])
            .unwrap()
    }

    fn square() -> Quadratic {
        Quadratic::new(DenseMatrix::from_rows(&[[2.0]]).unwrap(), vec![0.0], 0.0).unwrap()
    }

    #[test]
    fn single_constraint_values() {
        let prob = single_upper_bound(200.0, Quadratic::linear(vec![0.0], 0.0));
        let sub = BarrierSubproblem::new(&prob, 1.0).unwrap();
        let e = sub.eval(&[100.0]).unwrap();
        assert!((e.value + 100f64.ln()).abs() < 1e-15);
        assert!((e.value - -4.605170).abs() < 1e-6);
        assert!((e.gradient[0] - 0.01).abs() < 1e-18);
        assert!((e.hessian[(0, 0)] - 1e-4).abs() < 1e-18);
    }

    #[test]
    fn no_inequalities_is_scaled_objective() {
        let prob = ConvexProblem::unconstrained(Arc::new(square()));
        let sub = BarrierSubproblem::new(&prob, 7.0).unwrap();
        let e = sub.eval(&[3.0]).unwrap();
        assert_eq!(e.value, 63.0);
        assert_eq!(e.gradient, vec![42.0]);
        assert_eq!(sub.gap_bound(), 0.0);
    }

    #[test]
    fn example6_barrier_value() {
        let prob = model::example6();
        let sub = BarrierSubproblem::new(&prob, 10.0).unwrap();
        let x = [100.0, 50.0, 300.0];
        let e = sub.eval(&x).unwrap();
        let want = 10.0 * 82500.0 - 50f64.ln() - 4650f64.ln() - 5800f64.ln();
        assert!((e.value - want).abs() <= 1e-12 * want.abs());
        let r = check_derivatives(&sub, &x, model::default_fd_step(&x)).unwrap();
        assert!(r.within(1e-5), "{r:?}");
    }

    #[test]
    fn log_barrier_gradient_matches_fd() {
        let prob = single_upper_bound(200.0, Quadratic::linear(vec![0.0], 0.0));
        let sub = BarrierSubproblem::new(&prob, 1.0).unwrap();
        let r = check_derivatives(&sub, &[100.0], 1e-6).unwrap();
        assert!(r.gradient_error <= 1e-5, "{r:?}");
    }

    #[test]
    fn infeasible_point_reports_index() {
        let prob = model::example6();
        let sub = BarrierSubproblem::new(&prob, 1.0).unwrap();
        // f1 = 100 > 0, the others are strictly satisfied.
        assert_eq!(
            sub.eval(&[300.0, 0.0, 100.0]),
            Err(BarrierError::NotStrictlyFeasible { index: 0 })
        );
        // On the boundary counts as violated.
        assert_eq!(
            sub.eval(&[150.0, 50.0, 250.0]),
            Err(BarrierError::NotStrictlyFeasible { index: 0 })
        );
        assert!(!sub.in_domain(&[150.0, 50.0, 250.0]));
    }

    #[test]
    fn invalid_t() {
        let prob = model::example6();
        assert!(BarrierSubproblem::new(&prob, 0.0).is_err());
        assert!(BarrierSubproblem::new(&prob, f64::NAN).is_err());
    }

    #[test]
    fn residual_unconstrained_optimum() {
        let prob = ConvexProblem::unconstrained(Arc::new(square()));
        let sub = BarrierSubproblem::new(&prob, 1.0).unwrap();
        assert_eq!(sub.centering_residual(&[0.0], &[]).unwrap(), vec![0.0]);
    }

    #[test]
    fn residual_and_dual_point_at_center() {
        // minimize x² s.t. x ≤ 1 at t = 1: 2x + 1/(1−x) = 0 ⇒ 2x² − 2x − 1 = 0,
        // root in (−1, 1) is (1 − √3)/2.
        let prob = single_upper_bound(1.0, square());
        let sub = BarrierSubproblem::new(&prob, 1.0).unwrap();
        let x = (1.0 - 3f64.sqrt()) / 2.0;
        let r = sub.centering_residual(&[x], &[]).unwrap();
        assert!(r[0].abs() < 1e-14, "{r:?}");
        let dual = sub.dual_point(&[x], &[], 1e-10).unwrap();
        assert!((dual.lambda[0] - 1.0 / (1.0 - x)).abs() < 1e-14);
        assert_eq!(dual.gap_bound, 1.0);
        // Weak duality against p* = 0.
        assert!(dual.dual_value <= 0.0);
        assert!((dual.dual_value - (x * x - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn residual_is_affine_in_vhat() {
        let prob = model::example6();
        let sub = BarrierSubproblem::new(&prob, 10.0).unwrap();
        let x = [100.0, 50.0, 300.0];
        let r0 = sub.centering_residual(&x, &[0.0]).unwrap();
        let r1 = sub.centering_residual(&x, &[2.5]).unwrap();
        let want = [2.5, 0.0, 2.5];
        for i in 0..3 {
            assert!((r1[i] - r0[i] - want[i]).abs() <= 1e-9 * r0[i].abs().max(1.0));
        }
    }

    #[test]
    fn dual_point_off_center_is_rejected() {
        let prob = single_upper_bound(1.0, square());
        let sub = BarrierSubproblem::new(&prob, 1.0).unwrap();
        assert!(matches!(
            sub.dual_point(&[0.5], &[], 1e-8),
            Err(BarrierError::NotCentered { .. })
        ));
    }

    #[test]
    fn dual_point_without_inequalities() {
        let prob = ConvexProblem::unconstrained(Arc::new(square()));
        let sub = BarrierSubproblem::new(&prob, 3.0).unwrap();
        let d = sub.dual_point(&[0.0], &[], 1e-12).unwrap();
        assert!(d.lambda.is_empty());
        assert_eq!(d.gap_bound, 0.0);
    }

    #[test]
    fn example6_gap_bound_at_final_t() {
        let prob = model::example6();
        let sub = BarrierSubproblem::new(&prob, 1e11).unwrap();
        assert_eq!(sub.gap_bound(), 3.0 / 1e11);
        assert!((sub.gap_bound() - 3e-11).abs() < 1e-25);
    }

    #[test]
    fn equality_violation_rejected() {
        let prob = model::example6();
        let sub = BarrierSubproblem::new(&prob, 1.0).unwrap();
        assert!(matches!(
            sub.centering_residual(&[100.0, 50.0, 301.0], &[0.0]),
            Err(BarrierError::EqualityViolated { .. })
        ));
    }
}
