//! Problem representation in standard form:
//!
//! ```text
//! minimize   f0(x)
//! subject to fi(x) <= 0,  i = 1..m
//!            A x = b
//! ```
//!
//! plus a central-difference derivative checker and the catalog of named
//! problems used by the tests and the CLI.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::linalg::{self, DenseMatrix, LinalgError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("point lies outside the domain of the function")]
    OutOfDomain,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("equality matrix has rank {rank} but {rows} rows")]
    RankDeficient { rank: usize, rows: usize },
    #[error("{p} equality constraints require more than {p} variables, got {n}")]
    TooManyEqualities { p: usize, n: usize },
    #[error("unknown catalog problem `{0}`")]
    UnknownName(String),
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A twice-differentiable function `ℝⁿ → ℝ` with an open domain.
///
/// `gradient` and `hessian` are only called at points where `in_domain`
/// holds; callers go through [`evaluate`] when they need that checked.
pub trait ScalarField: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64]) -> Vec<f64>;
    fn hessian(&self, x: &[f64]) -> DenseMatrix;

    fn in_domain(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && x.iter().all(|v| v.is_finite())
    }
}

pub type Field = Arc<dyn ScalarField>;

/// `½ xᵀQx + qᵀx + c`, with `Q` stored as the Hessian.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadratic {
    q: DenseMatrix,
    lin: Vec<f64>,
    c: f64,
}

impl Quadratic {
    pub fn new(q: DenseMatrix, lin: Vec<f64>, c: f64) -> Result<Self, ModelError> {
        if !q.is_square() || q.rows() != lin.len() {
            return Err(ModelError::Dimension(format!(
                "Q is {}x{} but q has length {}",
                q.rows(),
                q.cols(),
                lin.len()
            )));
        }
        q.check_symmetric()?;
        Ok(Self { q, lin, c })
    }

    /// Linear function `qᵀx + c`.
    pub fn linear(lin: Vec<f64>, c: f64) -> Self {
        let n = lin.len();
        Self {
            q: DenseMatrix::zeros(n, n),
            lin,
            c,
        }
    }

    pub fn q(&self) -> &DenseMatrix {
        &self.q
    }

    pub fn lin(&self) -> &[f64] {
        &self.lin
    }

    pub fn constant(&self) -> f64 {
        self.c
    }
}

impl ScalarField for Quadratic {
    fn dim(&self) -> usize {
        self.lin.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        0.5 * linalg::dot(x, &self.q.mul_vec(x)) + linalg::dot(&self.lin, x) + self.c
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = self.q.mul_vec(x);
        linalg::axpy(1.0, &self.lin, &mut g);
        g
    }

    fn hessian(&self, _x: &[f64]) -> DenseMatrix {
        self.q.clone()
    }
}

/// Affine constraint `gᵀx − h`, i.e. the halfspace `gᵀx ≤ h` in `f ≤ 0` form.
#[derive(Debug, Clone, PartialEq)]
pub struct Affine {
    g: Vec<f64>,
    h: f64,
}

impl Affine {
    pub fn le(g: Vec<f64>, h: f64) -> Self {
        Self { g, h }
    }

    pub fn normal(&self) -> &[f64] {
        &self.g
    }

    pub fn rhs(&self) -> f64 {
        self.h
    }
}

impl ScalarField for Affine {
    fn dim(&self) -> usize {
        self.g.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        linalg::dot(&self.g, x) - self.h
    }

    fn gradient(&self, _x: &[f64]) -> Vec<f64> {
        self.g.clone()
    }

    fn hessian(&self, _x: &[f64]) -> DenseMatrix {
        DenseMatrix::zeros(self.g.len(), self.g.len())
    }
}

/// `‖a − x‖₂ − r` over the stacked variable `(x, r) ∈ ℝⁿ⁺¹`.
///
/// Undefined (for our purposes) at `x = a`, where the norm has a kink.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMinusRadius {
    anchor: Vec<f64>,
}

impl DistanceMinusRadius {
    pub fn new(anchor: Vec<f64>) -> Self {
        Self { anchor }
    }

    fn offset(&self, z: &[f64]) -> (Vec<f64>, f64) {
        let n = self.anchor.len();
        let d: Vec<f64> = z[..n].iter().zip(&self.anchor).map(|(x, a)| x - a).collect();
        let norm = linalg::norm2(&d);
        (d, norm)
    }
}

impl ScalarField for DistanceMinusRadius {
    fn dim(&self) -> usize {
        self.anchor.len() + 1
    }

    fn value(&self, z: &[f64]) -> f64 {
        let (_, norm) = self.offset(z);
        norm - z[self.anchor.len()]
    }

    fn gradient(&self, z: &[f64]) -> Vec<f64> {
        let (d, norm) = self.offset(z);
        let mut g: Vec<f64> = d.iter().map(|v| v / norm).collect();
        g.push(-1.0);
        g
    }

    fn hessian(&self, z: &[f64]) -> DenseMatrix {
        let n = self.anchor.len();
        let (d, norm) = self.offset(z);
        let mut h = DenseMatrix::zeros(n + 1, n + 1);
        for i in 0..n {
            for j in 0..n {
                let id = if i == j { 1.0 } else { 0.0 };
                h[(i, j)] = (id - d[i] * d[j] / (norm * norm)) / norm;
            }
        }
        h
    }

    fn in_domain(&self, z: &[f64]) -> bool {
        z.len() == self.dim()
            && z.iter().all(|v| v.is_finite())
            && self.offset(z).1 > 0.0
    }
}

type ValueFn = dyn Fn(&[f64]) -> f64 + Send + Sync;
type GradFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;
type HessFn = dyn Fn(&[f64]) -> DenseMatrix + Send + Sync;
type DomainFn = dyn Fn(&[f64]) -> bool + Send + Sync;

/// A field assembled from closures.
pub struct FnField {
    dim: usize,
    value: Box<ValueFn>,
    gradient: Box<GradFn>,
    hessian: Box<HessFn>,
    domain: Option<Box<DomainFn>>,
}

impl FnField {
    pub fn new(
        dim: usize,
        value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
        hessian: impl Fn(&[f64]) -> DenseMatrix + Send + Sync + 'static,
    ) -> Self {
        Self {
            dim,
            value: Box::new(value),
            gradient: Box::new(gradient),
            hessian: Box::new(hessian),
            domain: None,
        }
    }

    pub fn with_domain(mut self, domain: impl Fn(&[f64]) -> bool + Send + Sync + 'static) -> Self {
        self.domain = Some(Box::new(domain));
        self
    }
}

impl fmt::Debug for FnField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnField").field("dim", &self.dim).finish_non_exhaustive()
    }
}

impl ScalarField for FnField {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        (self.value)(x)
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        (self.gradient)(x)
    }

    fn hessian(&self, x: &[f64]) -> DenseMatrix {
        (self.hessian)(x)
    }

    fn in_domain(&self, x: &[f64]) -> bool {
        x.len() == self.dim
            && x.iter().all(|v| v.is_finite())
            && self.domain.as_ref().is_none_or(|d| d(x))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    pub gradient: Vec<f64>,
    pub hessian: DenseMatrix,
}

pub fn evaluate(f: &dyn ScalarField, x: &[f64]) -> Result<Evaluation, ModelError> {
    if x.len() != f.dim() {
        return Err(ModelError::Dimension(format!(
            "point has length {}, field has dimension {}",
            x.len(),
            f.dim()
        )));
    }
    if !f.in_domain(x) {
        return Err(ModelError::OutOfDomain);
    }
    Ok(Evaluation {
        value: f.value(x),
        gradient: f.gradient(x),
        hessian: f.hessian(x),
    })
}

/// Worst-case mismatch between analytic and finite-difference derivatives.
///
/// Errors are `‖analytic − fd‖∞ / max(1, ‖analytic‖∞)`, per gradient and per
/// Hessian column, maximized over probes.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DerivativeReport {
    pub gradient_error: f64,
    pub hessian_error: f64,
    pub probes: usize,
}

impl DerivativeReport {
    pub fn merge(self, other: DerivativeReport) -> DerivativeReport {
        DerivativeReport {
            gradient_error: self.gradient_error.max(other.gradient_error),
            hessian_error: self.hessian_error.max(other.hessian_error),
            probes: self.probes + other.probes,
        }
    }

    pub fn within(&self, tol: f64) -> bool {
        self.gradient_error <= tol && self.hessian_error <= tol
    }
}

/// `1e-5 · (1 + ‖x‖∞)`.
pub fn default_fd_step(x: &[f64]) -> f64 {
    1e-5 * (1.0 + linalg::norm_inf(x))
}

fn scaled_error(analytic: &[f64], approx: &[f64]) -> f64 {
    let diff = linalg::norm_inf(&linalg::sub(analytic, approx));
    diff / linalg::norm_inf(analytic).max(1.0)
}

/// Compares the analytic gradient and Hessian against central differences
/// with step `h`.
pub fn check_derivatives(
    f: &dyn ScalarField,
    x: &[f64],
    h: f64,
) -> Result<DerivativeReport, ModelError> {
    let base = evaluate(f, x)?;
    let n = x.len();
    let mut fd_grad = vec![0.0; n];
    let mut hess_err: f64 = 0.0;
    let mut probes = 1;
    for j in 0..n {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[j] += h;
        xm[j] -= h;
        if !f.in_domain(&xp) || !f.in_domain(&xm) {
            return Err(ModelError::OutOfDomain);
        }
        probes += 2;
        fd_grad[j] = (f.value(&xp) - f.value(&xm)) / (2.0 * h);
        let gp = f.gradient(&xp);
        let gm = f.gradient(&xm);
        let fd_col: Vec<f64> = gp.iter().zip(&gm).map(|(a, b)| (a - b) / (2.0 * h)).collect();
        let col: Vec<f64> = (0..n).map(|i| base.hessian[(i, j)]).collect();
        hess_err = hess_err.max(scaled_error(&col, &fd_col));
    }
    if base.hessian.symmetry_violation().is_some() {
        hess_err = f64::INFINITY;
    }
    Ok(DerivativeReport {
        gradient_error: scaled_error(&base.gradient, &fd_grad),
        hessian_error: hess_err,
        probes,
    })
}

/// A convex problem in standard form.
#[derive(Debug, Clone)]
pub struct ConvexProblem {
    objective: Field,
    inequalities: Vec<Field>,
    eq_a: DenseMatrix,
    eq_b: Vec<f64>,
}

impl ConvexProblem {
    /// Validates dimensions and that `eq_a` has full row rank with fewer rows
    /// than variables. Pass `DenseMatrix::zeros(0, n)` and an empty `eq_b`
    /// for a problem without equalities.
    pub fn new(
        objective: Field,
        inequalities: Vec<Field>,
        eq_a: DenseMatrix,
        eq_b: Vec<f64>,
    ) -> Result<Self, ModelError> {
        let n = objective.dim();
        for (i, f) in inequalities.iter().enumerate() {
            if f.dim() != n {
                return Err(ModelError::Dimension(format!(
                    "inequality {i} has dimension {}, objective has {n}",
                    f.dim()
                )));
            }
        }
        let p = eq_a.rows();
        if p > 0 && eq_a.cols() != n {
            return Err(ModelError::Dimension(format!(
                "equality matrix has {} columns, expected {n}",
                eq_a.cols()
            )));
        }
        if eq_b.len() != p {
            return Err(ModelError::Dimension(format!(
                "equality right-hand side has length {}, expected {p}",
                eq_b.len()
            )));
        }
        if p > 0 && p >= n {
            return Err(ModelError::TooManyEqualities { p, n });
        }
        let rank = linalg::row_rank(&eq_a);
        if rank < p {
            return Err(ModelError::RankDeficient { rank, rows: p });
        }
        let eq_a = if p == 0 { DenseMatrix::zeros(0, n) } else { eq_a };
        Ok(Self {
            objective,
            inequalities,
            eq_a,
            eq_b,
        })
    }

    pub fn unconstrained(objective: Field) -> Self {
        let n = objective.dim();
        Self {
            objective,
            inequalities: Vec::new(),
            eq_a: DenseMatrix::zeros(0, n),
            eq_b: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.objective.dim()
    }

    pub fn m(&self) -> usize {
        self.inequalities.len()
    }

    pub fn p(&self) -> usize {
        self.eq_a.rows()
    }

    pub fn objective(&self) -> &Field {
        &self.objective
    }

    pub fn inequalities(&self) -> &[Field] {
        &self.inequalities
    }

    pub fn eq_a(&self) -> &DenseMatrix {
        &self.eq_a
    }

    pub fn eq_b(&self) -> &[f64] {
        &self.eq_b
    }

    /// `‖Ax − b‖∞`
    pub fn equality_residual(&self, x: &[f64]) -> f64 {
        if self.p() == 0 {
            return 0.0;
        }
        linalg::norm_inf(&linalg::sub(&self.eq_a.mul_vec(x), &self.eq_b))
    }

    /// The `1e-8 · (1 + ‖b‖∞)` equality tolerance used throughout.
    pub fn equality_tol(&self) -> f64 {
        1e-8 * (1.0 + linalg::norm_inf(&self.eq_b))
    }

    pub fn in_all_domains(&self, x: &[f64]) -> bool {
        x.len() == self.n()
            && self.objective.in_domain(x)
            && self.inequalities.iter().all(|f| f.in_domain(x))
    }

    /// Index of the first inequality that is not strictly satisfied (or
    /// whose domain excludes `x`).
    pub fn first_violation(&self, x: &[f64]) -> Option<usize> {
        self.inequalities
            .iter()
            .position(|f| !f.in_domain(x) || !(f.value(x) < 0.0))
    }

    pub fn is_strictly_feasible(&self, x: &[f64]) -> bool {
        self.in_all_domains(x)
            && self.first_violation(x).is_none()
            && self.equality_residual(x) <= self.equality_tol()
    }

    /// Feasible in the closed sense: `fi(x) ≤ tol`, equalities within the
    /// standard tolerance.
    pub fn is_feasible(&self, x: &[f64], tol: f64) -> bool {
        self.in_all_domains(x)
            && self.inequalities.iter().all(|f| f.value(x) <= tol)
            && self.equality_residual(x) <= self.equality_tol()
    }

    pub fn max_inequality(&self, x: &[f64]) -> f64 {
        self.inequalities
            .iter()
            .map(|f| f.value(x))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Parameters for [`catalog_problem`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CatalogParams {
    pub points: Vec<Vec<f64>>,
}

pub const CATALOG_NAMES: [&str; 2] = ["example6", "chebyshev"];

pub fn catalog_problem(name: &str, params: &CatalogParams) -> Result<ConvexProblem, ModelError> {
    match name {
        "example6" => Ok(example6()),
        "chebyshev" => chebyshev_problem(&params.points),
        other => Err(ModelError::UnknownName(other.to_string())),
    }
}

/// Objective of the three-variable quadratic test problem,
/// `x1² + x2² + x3² − x1x2 − x2x3`.
pub fn example6_objective() -> Quadratic {
    let q = DenseMatrix::from_rows(&[[2.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 2.0]])
        .expect("static shape");
    Quadratic::new(q, vec![0.0; 3], 0.0).expect("static data is symmetric")
}

/// The quadratic test problem with three halfspaces and one equality:
///
/// ```text
/// minimize   x1² + x2² + x3² − x1x2 − x2x3
/// subject to x1 + x2 ≤ 200
///            x1 + 5x2 + 10x3 ≤ 8000
///            −10x2 − x3 ≤ 5000
///            x1 + x3 = 400
/// ```
pub fn example6() -> ConvexProblem {
    let inequalities: Vec<Field> = vec![
        Arc::new(Affine::le(vec![1.0, 1.0, 0.0], 200.0)),
        Arc::new(Affine::le(vec![1.0, 5.0, 10.0], 8000.0)),
        Arc::new(Affine::le(vec![0.0, -10.0, -1.0], 5000.0)),
    ];
    let a = DenseMatrix::from_rows(&[[1.0, 0.0, 1.0]]).expect("static shape");
    ConvexProblem::new(Arc::new(example6_objective()), inequalities, a, vec![400.0])
        .expect("static problem is well-formed")
}

/// Minimum enclosing ball: variables `(x, r)`, minimize `r` subject to
/// `‖aᵢ − x‖₂ ≤ r` for each point.
pub fn chebyshev_problem(points: &[Vec<f64>]) -> Result<ConvexProblem, ModelError> {
    let first = points
        .first()
        .ok_or_else(|| ModelError::BadParams("chebyshev needs at least one point".into()))?;
    let n = first.len();
    if n == 0 {
        return Err(ModelError::BadParams("points must have at least one coordinate".into()));
    }
    if let Some(bad) = points.iter().position(|p| p.len() != n) {
        return Err(ModelError::BadParams(format!(
            "point {bad} has {} coordinates, expected {n}",
            points[bad].len()
        )));
    }
    if points.iter().flatten().any(|v| !v.is_finite()) {
        return Err(ModelError::BadParams("non-finite coordinate".into()));
    }
    let mut obj = vec![0.0; n + 1];
    obj[n] = 1.0;
    let inequalities: Vec<Field> = points
        .iter()
        .map(|p| Arc::new(DistanceMinusRadius::new(p.clone())) as Field)
        .collect();
    ConvexProblem::new(
        Arc::new(Quadratic::linear(obj, 0.0)),
        inequalities,
        DenseMatrix::zeros(0, n + 1),
        Vec::new(),
    )
}
