//! Barrier methods and phase I.
//!
//! The full barrier method centers at `t = t0, u·t0, u²·t0, …`, warm
//! starting each centering at the previous center, and quits after the
//! first centering with `m/t < eps`. The preliminary method is a single
//! centering at `t = m/eps`.

use std::sync::Arc;

use thiserror::Error;

use crate::barrier::{BarrierError, BarrierSubproblem, DualPoint};
use crate::linalg::{self, DenseMatrix};
use crate::model::{ConvexProblem, Field, ModelError, Quadratic, ScalarField};
use crate::newton::{self, NewtonError, NewtonOptions, NewtonTrace, Termination};

/// Default inner stopping threshold for centering steps. The barrier
/// objective `t·f0 + φ` grows with `t`, so the threshold is absolute rather
/// than relative to its value.
pub const CENTERING_EPS: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("starting point is not strictly feasible: inequality {index} is violated")]
    NotStrictlyFeasible { index: usize },
    #[error("starting point violates Ax = b (residual {residual:e})")]
    InfeasibleStart { residual: f64 },
    #[error("starting point is outside the domain of a problem function")]
    OutOfDomain,
    #[error("centering at t = {t:e} failed: {source}")]
    Centering {
        t: f64,
        source: NewtonError,
        /// Everything completed before the failing centering.
        partial: Box<SolveReport>,
    },
    #[error(transparent)]
    Barrier(#[from] BarrierError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierConfig {
    pub t0: f64,
    /// Update factor `u > 1`.
    pub mu: f64,
    pub eps: f64,
    pub newton: NewtonOptions,
    /// Safeguard on the number of centerings.
    pub max_outer: usize,
}

impl Default for BarrierConfig {
    fn default() -> Self {
        Self {
            t0: 10.0,
            mu: 10.0,
            eps: 1e-6,
            newton: NewtonOptions::default(),
            max_outer: 100,
        }
    }
}

impl BarrierConfig {
    pub fn with_eps(eps: f64) -> Self {
        Self {
            eps,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), SolveError> {
        if !(self.t0 > 0.0 && self.t0.is_finite()) {
            return Err(SolveError::InvalidConfig(format!("t0 must be positive, got {}", self.t0)));
        }
        if !(self.mu > 1.0 && self.mu.is_finite()) {
            return Err(SolveError::InvalidConfig(format!("mu must exceed 1, got {}", self.mu)));
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(SolveError::InvalidConfig(format!("eps must be positive, got {}", self.eps)));
        }
        self.newton
            .line_search
            .validate()
            .map_err(|e| SolveError::InvalidConfig(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    MaxIterations,
    Infeasible,
}

/// One centering step.
#[derive(Debug, Clone, PartialEq)]
pub struct OuterRecord {
    pub t: f64,
    pub newton_iterations: usize,
    pub f0: f64,
    pub gap_bound: f64,
    /// The center reached.
    pub x: Vec<f64>,
    pub trace: NewtonTrace,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub x: Vec<f64>,
    pub f0: f64,
    pub dual: DualPoint,
    /// `‖t∇f0 + ∇φ + Aᵀv̂‖∞` at the returned point, relative to the size of
    /// the cancelling terms.
    pub centering_residual: f64,
    pub outer: Vec<OuterRecord>,
}

impl SolveReport {
    pub fn centerings(&self) -> usize {
        self.outer.len()
    }

    pub fn total_newton_iterations(&self) -> usize {
        self.outer.iter().map(|r| r.newton_iterations).sum()
    }

    pub fn gap_bound(&self) -> f64 {
        self.dual.gap_bound
    }

    fn empty(x: Vec<f64>, f0: f64) -> Self {
        Self {
            status: SolveStatus::MaxIterations,
            x,
            f0,
            dual: DualPoint::exact(Vec::new(), f0),
            centering_residual: f64::INFINITY,
            outer: Vec::new(),
        }
    }
}

/// Number of centerings after the initial one needed to reach `m/t < eps`:
/// `⌈log(m/(eps·t0)) / log u⌉`, or 0 when `m/t0 < eps` already.
pub fn predict_outer_iterations(m: usize, eps: f64, t0: f64, u: f64) -> usize {
    let ratio = m as f64 / (eps * t0);
    if ratio < 1.0 {
        return 0;
    }
    (ratio.ln() / u.ln()).ceil() as usize
}

fn check_start(prob: &ConvexProblem, x0: &[f64]) -> Result<(), SolveError> {
    if x0.len() != prob.n() {
        return Err(SolveError::Model(ModelError::Dimension(format!(
            "start has length {}, problem has {} variables",
            x0.len(),
            prob.n()
        ))));
    }
    let residual = prob.equality_residual(x0);
    if !(residual <= prob.equality_tol()) {
        return Err(SolveError::InfeasibleStart { residual });
    }
    if !prob.objective().in_domain(x0) {
        return Err(SolveError::OutOfDomain);
    }
    if let Some(index) = prob.first_violation(x0) {
        return Err(SolveError::NotStrictlyFeasible { index });
    }
    Ok(())
}

/// Relative centering residual of `x` for the subproblem.
fn relative_residual(sub: &BarrierSubproblem<'_>, x: &[f64], vhat: &[f64]) -> f64 {
    match (sub.centering_residual(x, vhat), sub.residual_scale(x)) {
        (Ok(r), Ok(scale)) => linalg::norm_inf(&r) / scale,
        _ => f64::INFINITY,
    }
}

struct Centered {
    x: Vec<f64>,
    vhat: Vec<f64>,
    trace: NewtonTrace,
}

fn center(
    prob: &ConvexProblem,
    t: f64,
    x: &[f64],
    opts: &NewtonOptions,
    observer: &mut dyn FnMut(&[f64]) -> bool,
) -> Result<Centered, NewtonError> {
    let sub = BarrierSubproblem::new(prob, t).expect("t validated by caller");
    let opts = NewtonOptions {
        eps_inner: Some(opts.eps_inner.unwrap_or(CENTERING_EPS)),
        ..*opts
    };
    let out =
        newton::minimize_eq_newton_observed(&sub, prob.eq_a(), prob.eq_b(), x, &opts, observer)?;
    Ok(Centered {
        x: out.x,
        vhat: out.vhat,
        trace: out.trace,
    })
}

/// Single equality-constrained Newton solve of `f0` for problems without
/// inequalities.
fn solve_without_inequalities(
    prob: &ConvexProblem,
    x0: &[f64],
    opts: &NewtonOptions,
) -> Result<SolveReport, SolveError> {
    let f0 = prob.objective();
    let out = newton::minimize_eq_newton(f0.as_ref(), prob.eq_a(), prob.eq_b(), x0, opts)
        .map_err(|source| SolveError::Centering {
            t: 1.0,
            source,
            partial: Box::new(SolveReport::empty(x0.to_vec(), f0.value(x0))),
        })?;
    let value = f0.value(&out.x);
    let status = match out.trace.termination {
        Termination::Converged | Termination::Interrupted => SolveStatus::Optimal,
        Termination::MaxIterations => SolveStatus::MaxIterations,
    };
    let sub = BarrierSubproblem::new(prob, 1.0)?;
    let centering_residual = relative_residual(&sub, &out.x, &out.vhat);
    Ok(SolveReport {
        status,
        x: out.x.clone(),
        f0: value,
        dual: DualPoint::exact(out.vhat, value),
        centering_residual,
        outer: vec![OuterRecord {
            t: 1.0,
            newton_iterations: out.trace.iterations(),
            f0: value,
            gap_bound: 0.0,
            x: out.x,
            trace: out.trace,
        }],
    })
}

fn finish(
    prob: &ConvexProblem,
    status: SolveStatus,
    t: f64,
    x: Vec<f64>,
    vhat: &[f64],
    outer: Vec<OuterRecord>,
) -> Result<SolveReport, SolveError> {
    let sub = BarrierSubproblem::new(prob, t)?;
    let centering_residual = relative_residual(&sub, &x, vhat);
    // The residual is reported alongside; recovery itself is unconditional.
    let dual = sub.dual_point(&x, vhat, f64::INFINITY)?;
    Ok(SolveReport {
        status,
        f0: prob.objective().value(&x),
        x,
        dual,
        centering_residual,
        outer,
    })
}

/// One centering at `t = m/eps`.
pub fn solve_preliminary(
    prob: &ConvexProblem,
    x0: &[f64],
    eps: f64,
    opts: &NewtonOptions,
) -> Result<SolveReport, SolveError> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(SolveError::InvalidConfig(format!("eps must be positive, got {eps}")));
    }
    opts.line_search
        .validate()
        .map_err(|e| SolveError::InvalidConfig(e.to_string()))?;
    check_start(prob, x0)?;
    if prob.m() == 0 {
        return solve_without_inequalities(prob, x0, opts);
    }
    let t = prob.m() as f64 / eps;
    let c = center(prob, t, x0, opts, &mut |_| false).map_err(|source| SolveError::Centering {
        t,
        source,
        partial: Box::new(SolveReport::empty(x0.to_vec(), prob.objective().value(x0))),
    })?;
    let status = match c.trace.termination {
        Termination::MaxIterations => SolveStatus::MaxIterations,
        _ => SolveStatus::Optimal,
    };
    let f0 = prob.objective().value(&c.x);
    let record = OuterRecord {
        t,
        newton_iterations: c.trace.iterations(),
        f0,
        gap_bound: prob.m() as f64 / t,
        x: c.x.clone(),
        trace: c.trace,
    };
    finish(prob, status, t, c.x, &c.vhat, vec![record])
}

/// The barrier method from a strictly feasible start.
pub fn solve_barrier(
    prob: &ConvexProblem,
    x0: &[f64],
    cfg: &BarrierConfig,
) -> Result<SolveReport, SolveError> {
    solve_barrier_observed(prob, x0, cfg, &mut |_| false).map(|(report, _)| report)
}

/// Runs the barrier method, handing every accepted Newton iterate to
/// `observer`. Returns the report and whether the observer stopped the run.
fn solve_barrier_observed(
    prob: &ConvexProblem,
    x0: &[f64],
    cfg: &BarrierConfig,
    observer: &mut dyn FnMut(&[f64]) -> bool,
) -> Result<(SolveReport, bool), SolveError> {
    cfg.validate()?;
    check_start(prob, x0)?;
    if prob.m() == 0 {
        return solve_without_inequalities(prob, x0, &cfg.newton).map(|r| (r, false));
    }
    let m = prob.m() as f64;
    let mut x = x0.to_vec();
    let mut vhat = vec![0.0; prob.p()];
    let mut t = cfg.t0;
    let mut outer: Vec<OuterRecord> = Vec::new();
    loop {
        let c = match center(prob, t, &x, &cfg.newton, observer) {
            Ok(c) => c,
            Err(source) => {
                let partial = if outer.is_empty() {
                    SolveReport::empty(x.clone(), prob.objective().value(&x))
                } else {
                    let prev_t = outer.last().map_or(t, |r| r.t);
                    finish(prob, SolveStatus::MaxIterations, prev_t, x, &vhat, outer)?
                };
                return Err(SolveError::Centering {
                    t,
                    source,
                    partial: Box::new(partial),
                });
            }
        };
        x = c.x;
        vhat = c.vhat;
        let f0 = prob.objective().value(&x);
        let termination = c.trace.termination;
        outer.push(OuterRecord {
            t,
            newton_iterations: c.trace.iterations(),
            f0,
            gap_bound: m / t,
            x: x.clone(),
            trace: c.trace,
        });
        match termination {
            Termination::Interrupted => {
                let report = finish(prob, SolveStatus::MaxIterations, t, x, &vhat, outer)?;
                return Ok((report, true));
            }
            Termination::MaxIterations => {
                let report = finish(prob, SolveStatus::MaxIterations, t, x, &vhat, outer)?;
                return Ok((report, false));
            }
            Termination::Converged => {}
        }
        if m / t < cfg.eps {
            return finish(prob, SolveStatus::Optimal, t, x, &vhat, outer).map(|r| (r, false));
        }
        if outer.len() >= cfg.max_outer {
            return finish(prob, SolveStatus::MaxIterations, t, x, &vhat, outer).map(|r| (r, false));
        }
        t *= cfg.mu;
    }
}

/// `f(x) − s` over the stacked variable `(x, s)`.
#[derive(Debug)]
struct SlackLifted {
    inner: Field,
}

impl ScalarField for SlackLifted {
    fn dim(&self) -> usize {
        self.inner.dim() + 1
    }

    fn value(&self, z: &[f64]) -> f64 {
        let n = self.inner.dim();
        self.inner.value(&z[..n]) - z[n]
    }

    fn gradient(&self, z: &[f64]) -> Vec<f64> {
        let n = self.inner.dim();
        let mut g = self.inner.gradient(&z[..n]);
        g.push(-1.0);
        g
    }

    fn hessian(&self, z: &[f64]) -> DenseMatrix {
        let n = self.inner.dim();
        let inner = self.inner.hessian(&z[..n]);
        let mut h = DenseMatrix::zeros(n + 1, n + 1);
        for i in 0..n {
            for j in 0..n {
                h[(i, j)] = inner[(i, j)];
            }
        }
        h
    }

    fn in_domain(&self, z: &[f64]) -> bool {
        let n = self.inner.dim();
        z.len() == n + 1 && z[n].is_finite() && self.inner.in_domain(&z[..n])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PhaseOneResult {
    Feasible(Vec<f64>),
    /// No strictly feasible point exists: the phase I optimum is at least
    /// `lower_bound` (`best_s − m/t`), which is at least `−eps`.
    Infeasible { lower_bound: f64, best_s: f64 },
}

/// Builds the phase I problem `minimize s s.t. fᵢ(x) ≤ s, Ax = b` over
/// `(x, s)`.
pub fn phase1_problem(prob: &ConvexProblem) -> Result<ConvexProblem, SolveError> {
    let n = prob.n();
    let mut obj = vec![0.0; n + 1];
    obj[n] = 1.0;
    let inequalities: Vec<Field> = prob
        .inequalities()
        .iter()
        .map(|f| Arc::new(SlackLifted { inner: f.clone() }) as Field)
        .collect();
    let p = prob.p();
    let mut a = DenseMatrix::zeros(p, n + 1);
    for r in 0..p {
        for c in 0..n {
            a[(r, c)] = prob.eq_a()[(r, c)];
        }
    }
    Ok(ConvexProblem::new(
        Arc::new(Quadratic::linear(obj, 0.0)),
        inequalities,
        a,
        prob.eq_b().to_vec(),
    )?)
}

/// Finds a strictly feasible point or certifies that none exists, starting
/// from an equality-feasible `x0` inside every constraint's domain.
pub fn phase1(
    prob: &ConvexProblem,
    x0: &[f64],
    cfg: &BarrierConfig,
) -> Result<PhaseOneResult, SolveError> {
    cfg.validate()?;
    let n = prob.n();
    if x0.len() != n {
        return Err(SolveError::Model(ModelError::Dimension(format!(
            "start has length {}, problem has {n} variables",
            x0.len()
        ))));
    }
    if !prob.in_all_domains(x0) {
        return Err(SolveError::OutOfDomain);
    }
    let residual = prob.equality_residual(x0);
    if !(residual <= prob.equality_tol()) {
        return Err(SolveError::InfeasibleStart { residual });
    }
    let worst = prob.max_inequality(x0);
    if prob.m() == 0 || worst < 0.0 {
        return Ok(PhaseOneResult::Feasible(x0.to_vec()));
    }

    let lifted = phase1_problem(prob)?;
    let mut z0 = x0.to_vec();
    z0.push(worst + 1.0);
    let mut found: Option<Vec<f64>> = None;
    let mut observer = |z: &[f64]| {
        if z[n] < 0.0 {
            let x = &z[..n];
            if prob.max_inequality(x) < 0.0 {
                found = Some(x.to_vec());
                return true;
            }
        }
        false
    };
    let outcome = solve_barrier_observed(&lifted, &z0, cfg, &mut observer);
    if let Some(x) = found {
        return Ok(PhaseOneResult::Feasible(x));
    }
    let (report, _) = outcome?;
    match report.status {
        SolveStatus::Optimal => {
            let best_s = report.x[n];
            Ok(PhaseOneResult::Infeasible {
                lower_bound: best_s - report.dual.gap_bound,
                best_s,
            })
        }
        _ => Err(SolveError::Centering {
            t: report.outer.last().map_or(cfg.t0, |r| r.t),
            source: NewtonError::InvalidParams("phase I did not reach its certified optimum".into()),
            partial: Box::new(report),
        }),
    }
}
