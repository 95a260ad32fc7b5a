//! Convex-geometry utilities built on the solver: Voronoi cells as
//! halfspace intersections, separating hyperplanes between finite point
//! sets, Chebyshev centers, and sampled convexity/optimality diagnostics.
//!
//! The sampled checks are falsification tools. An empty violation list is
//! consistent with convexity (or optimality); it does not prove it.

use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

use crate::linalg::{self, DenseMatrix};
use crate::model::{self, Affine, ConvexProblem, Field, ModelError, Quadratic, ScalarField};
use crate::solver::{self, BarrierConfig, SolveError, SolveStatus};

/// Minimal distance below which two hulls are treated as touching.
pub const SEPARATION_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("empty point set")]
    Empty,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("point {index} coincides with the cell's site")]
    DegeneratePoint { index: usize },
    #[error("convex hulls are not separated (distance {distance:e})")]
    NotSeparable { distance: f64 },
    #[error("computed hyperplane misclassifies point {index} of set {set}")]
    SignContract { set: char, index: usize },
    #[error("solver stopped before reaching the requested accuracy")]
    Inaccurate,
    #[error("candidate point is infeasible")]
    InfeasibleCandidate,
    #[error("reference point is not strictly feasible")]
    NoInteriorPoint,
    #[error("sampled point lies outside the function's domain")]
    OutOfDomain,
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// `{x : Gx ≤ h}`
#[derive(Debug, Clone, PartialEq)]
pub struct Polyhedron {
    pub g: DenseMatrix,
    pub h: Vec<f64>,
}

impl Polyhedron {
    pub fn contains(&self, x: &[f64]) -> bool {
        self.g.mul_vec(x).iter().zip(&self.h).all(|(gx, h)| gx <= h)
    }

    /// `h − Gx`; nonnegative componentwise inside.
    pub fn slacks(&self, x: &[f64]) -> Vec<f64> {
        self.g.mul_vec(x).iter().zip(&self.h).map(|(gx, h)| h - gx).collect()
    }
}

/// `{x : aᵀx = b}`, oriented so that `aᵀx − b` is the signed side.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperplane {
    pub a: Vec<f64>,
    pub b: f64,
}

impl Hyperplane {
    pub fn eval(&self, x: &[f64]) -> f64 {
        linalg::dot(&self.a, x) - self.b
    }
}

fn check_points(points: &[Vec<f64>], n: usize) -> Result<(), GeometryError> {
    if let Some((i, p)) = points.iter().enumerate().find(|(_, p)| p.len() != n) {
        return Err(GeometryError::Dimension(format!(
            "point {i} has {} coordinates, expected {n}",
            p.len()
        )));
    }
    Ok(())
}

/// The Voronoi cell of `x0` against `others`: row `i` is
/// `2(xᵢ − x0)ᵀ x ≤ xᵢᵀxᵢ − x0ᵀx0`.
pub fn voronoi_polyhedron(x0: &[f64], others: &[Vec<f64>]) -> Result<Polyhedron, GeometryError> {
    let n = x0.len();
    check_points(others, n)?;
    let mut rows = Vec::with_capacity(others.len());
    let mut h = Vec::with_capacity(others.len());
    let x0_sq = linalg::dot(x0, x0);
    for (index, xi) in others.iter().enumerate() {
        let row: Vec<f64> = xi.iter().zip(x0).map(|(a, b)| 2.0 * (a - b)).collect();
        if row.iter().all(|v| *v == 0.0) {
            return Err(GeometryError::DegeneratePoint { index });
        }
        rows.push(row);
        h.push(linalg::dot(xi, xi) - x0_sq);
    }
    let g = if rows.is_empty() {
        DenseMatrix::zeros(0, n)
    } else {
        DenseMatrix::from_rows(&rows).expect("rows share a length")
    };
    Ok(Polyhedron { g, h })
}

fn combination(points: &[Vec<f64>], weights: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; points[0].len()];
    for (p, w) in points.iter().zip(weights) {
        linalg::axpy(*w, p, &mut out);
    }
    out
}

/// Closest points `(c*, d*)` of the convex hulls of `c` and `d`, with a
/// certified lower bound on the squared distance between the hulls.
fn closest_pair(
    c: &[Vec<f64>],
    d: &[Vec<f64>],
    cfg: &BarrierConfig,
) -> Result<(Vec<f64>, Vec<f64>, f64), GeometryError> {
    let (kc, kd) = (c.len(), d.len());
    if kc == 1 && kd == 1 {
        let diff = linalg::sub(&d[0], &c[0]);
        return Ok((c[0].clone(), d[0].clone(), linalg::dot(&diff, &diff)));
    }
    let n = c[0].len();
    let k = kc + kd;
    // M = [C, −D] with points as columns; objective ‖M w‖² = ½ wᵀ(2MᵀM)w.
    let mut m = DenseMatrix::zeros(n, k);
    for (j, p) in c.iter().enumerate() {
        for i in 0..n {
            m[(i, j)] = p[i];
        }
    }
    for (j, p) in d.iter().enumerate() {
        for i in 0..n {
            m[(i, kc + j)] = -p[i];
        }
    }
    let mut q = m.transpose().matmul(&m);
    q.scale(2.0);
    // Exact symmetry for the Hessian check.
    for i in 0..k {
        for j in (i + 1)..k {
            let v = 0.5 * (q[(i, j)] + q[(j, i)]);
            q[(i, j)] = v;
            q[(j, i)] = v;
        }
    }
    let objective: Field = Arc::new(Quadratic::new(q, vec![0.0; k], 0.0)?);
    let inequalities: Vec<Field> = (0..k)
        .map(|i| {
            let mut g = vec![0.0; k];
            g[i] = -1.0;
            Arc::new(Affine::le(g, 0.0)) as Field
        })
        .collect();
    let mut a = DenseMatrix::zeros(2, k);
    (0..kc).for_each(|j| a[(0, j)] = 1.0);
    (kc..k).for_each(|j| a[(1, j)] = 1.0);
    let prob = ConvexProblem::new(objective, inequalities, a, vec![1.0, 1.0])?;

    let mut w0 = vec![1.0 / kc as f64; kc];
    w0.extend(std::iter::repeat_n(1.0 / kd as f64, kd));
    let report = solver::solve_barrier(&prob, &w0, cfg)?;
    if report.status != SolveStatus::Optimal {
        return Err(GeometryError::Inaccurate);
    }
    let lower = report.f0 - report.gap_bound();
    Ok((
        combination(c, &report.x[..kc]),
        combination(d, &report.x[kc..]),
        lower,
    ))
}

/// A hyperplane with `aᵀx − b ≤ 0` on every point of `c` and `≥ 0` on every
/// point of `d`, through the midpoint of the closest pair of the two hulls.
///
/// Fails with `NotSeparable` unless the solver certifies a hull distance
/// above `SEPARATION_TOL`.
pub fn separating_hyperplane(
    c: &[Vec<f64>],
    d: &[Vec<f64>],
    cfg: &BarrierConfig,
) -> Result<Hyperplane, GeometryError> {
    if c.is_empty() || d.is_empty() {
        return Err(GeometryError::Empty);
    }
    let n = c[0].len();
    check_points(c, n)?;
    check_points(d, n)?;
    let (cs, ds, lower_sq) = closest_pair(c, d, cfg)?;
    let a = linalg::sub(&ds, &cs);
    let distance = linalg::norm2(&a);
    // Touching hulls leave a residual distance of order sqrt(eps), so the
    // decision uses the certified lower bound as well.
    if distance <= SEPARATION_TOL || lower_sq <= SEPARATION_TOL * SEPARATION_TOL {
        return Err(GeometryError::NotSeparable { distance });
    }
    let b = 0.5 * (linalg::dot(&a, &cs) + linalg::dot(&a, &ds));
    let plane = Hyperplane { a, b };
    if let Some(index) = c.iter().position(|x| plane.eval(x) > 0.0) {
        return Err(GeometryError::SignContract { set: 'C', index });
    }
    if let Some(index) = d.iter().position(|x| plane.eval(x) < 0.0) {
        return Err(GeometryError::SignContract { set: 'D', index });
    }
    Ok(plane)
}

/// Center and radius of the smallest ball containing `points`.
pub fn chebyshev_center(
    points: &[Vec<f64>],
    cfg: &BarrierConfig,
) -> Result<(Vec<f64>, f64), GeometryError> {
    let first = points.first().ok_or(GeometryError::Empty)?;
    let n = first.len();
    check_points(points, n)?;
    let k = points.len() as f64;
    let mut centroid = vec![0.0; n];
    for p in points {
        linalg::axpy(1.0 / k, p, &mut centroid);
    }
    let spread = points
        .iter()
        .map(|p| linalg::norm2(&linalg::sub(p, &centroid)))
        .fold(0.0, f64::max);
    // A single (possibly repeated) point: the optimum r = 0 is on the
    // boundary of the barrier domain, so answer directly.
    if spread == 0.0 {
        return Ok((first.clone(), 0.0));
    }
    // The distance constraints are undefined at the points themselves, so
    // nudge the start off any point it coincides with.
    let mut start = centroid;
    let mut nudge = 1e-3 * spread;
    while points.iter().any(|p| p == &start) {
        start[0] += nudge;
        nudge *= 1.5;
    }
    let radius0 = points
        .iter()
        .map(|p| linalg::norm2(&linalg::sub(p, &start)))
        .fold(0.0, f64::max)
        + 1.0;
    let prob = model::chebyshev_problem(points)?;
    start.push(radius0);
    let report = solver::solve_barrier(&prob, &start, cfg)?;
    if report.status != SolveStatus::Optimal {
        return Err(GeometryError::Inaccurate);
    }
    let mut z = report.x;
    let radius = z.pop().expect("stacked variable has a radius");
    Ok((z, radius))
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConvexityViolation {
    /// `f(y) < f(x) + ∇f(x)ᵀ(y − x)` beyond tolerance; `gap` is the (negative)
    /// difference.
    FirstOrder { x: Vec<f64>, y: Vec<f64>, gap: f64 },
    /// The Hessian at `x` has an eigenvalue below `−tol`.
    Hessian { x: Vec<f64>, min_eigenvalue: f64 },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConvexityReport {
    pub trials: usize,
    pub violations: Vec<ConvexityViolation>,
}

impl ConvexityReport {
    pub fn is_consistent(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Samples `trials` pairs from `sampler` and tests the first-order
/// condition on each pair and positive semidefiniteness of the Hessian at
/// each sample.
pub fn check_convexity_sampled(
    f: &dyn ScalarField,
    sampler: &mut dyn FnMut() -> Vec<f64>,
    trials: usize,
) -> Result<ConvexityReport, GeometryError> {
    let mut violations = Vec::new();
    for _ in 0..trials {
        let x = sampler();
        let y = sampler();
        let ex = model::evaluate(f, &x).map_err(|_| GeometryError::OutOfDomain)?;
        let ey = model::evaluate(f, &y).map_err(|_| GeometryError::OutOfDomain)?;
        let gap = ey.value - ex.value - linalg::dot(&ex.gradient, &linalg::sub(&y, &x));
        if gap < -1e-8 * (1.0 + ey.value.abs()) {
            violations.push(ConvexityViolation::FirstOrder {
                x: x.clone(),
                y: y.clone(),
                gap,
            });
        }
        for (point, hess) in [(x, ex.hessian), (y, ey.hessian)] {
            let tol = linalg::default_psd_tol(&hess);
            let eig = linalg::symmetric_eigenvalues(&hess).map_err(ModelError::from)?;
            let lo = eig.first().copied().unwrap_or(0.0);
            if lo < -tol {
                violations.push(ConvexityViolation::Hessian {
                    x: point,
                    min_eigenvalue: lo,
                });
            }
        }
    }
    Ok(ConvexityReport { trials, violations })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimalityReport {
    pub passed: bool,
    /// Smallest `∇f0(x)ᵀ(y − x)` seen over the sampled feasible `y`.
    pub min_inner_product: f64,
    pub worst_point: Option<Vec<f64>>,
    pub samples: usize,
}

/// Orthonormal basis of the null space of `a` (columns returned as rows).
fn null_space_basis(a: &DenseMatrix, n: usize) -> Vec<Vec<f64>> {
    let rows: Vec<Vec<f64>> = (0..a.rows()).map(|i| a.row(i).to_vec()).collect();
    let mut range: Vec<Vec<f64>> = Vec::new();
    for r in rows {
        let mut v = r;
        for u in &range {
            let c = linalg::dot(&v, u);
            linalg::axpy(-c, u, &mut v);
        }
        let norm = linalg::norm2(&v);
        if norm > 1e-12 {
            v.iter_mut().for_each(|x| *x /= norm);
            range.push(v);
        }
    }
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for i in 0..n {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        for u in range.iter().chain(basis.iter()) {
            let c = linalg::dot(&v, u);
            linalg::axpy(-c, u, &mut v);
        }
        let norm = linalg::norm2(&v);
        if norm > 1e-8 {
            v.iter_mut().for_each(|x| *x /= norm);
            basis.push(v);
        }
    }
    basis
}

/// Tests `∇f0(x)ᵀ(y − x) ≥ −1e-6·(1 + ‖∇f0(x)‖)` for `samples` random
/// feasible `y`. Feasible points are drawn around the strictly feasible
/// `interior` point along directions in the null space of `A`, pulled back
/// toward `interior` until feasible, and half of them are then blended with
/// the candidate to probe its neighbourhood.
pub fn verify_optimality_sampled<R: Rng + ?Sized>(
    prob: &ConvexProblem,
    x_cand: &[f64],
    interior: &[f64],
    samples: usize,
    rng: &mut R,
) -> Result<OptimalityReport, GeometryError> {
    let n = prob.n();
    if x_cand.len() != n || interior.len() != n {
        return Err(GeometryError::Dimension(format!(
            "points must have {n} coordinates"
        )));
    }
    let feas_tol = 1e-9 * (1.0 + linalg::norm_inf(x_cand));
    if !prob.is_feasible(x_cand, feas_tol) {
        return Err(GeometryError::InfeasibleCandidate);
    }
    if !prob.is_strictly_feasible(interior) {
        return Err(GeometryError::NoInteriorPoint);
    }
    let grad = prob.objective().gradient(x_cand);
    let tol = 1e-6 * (1.0 + linalg::norm2(&grad));
    let basis = null_space_basis(prob.eq_a(), n);
    let radius = 1.0 + linalg::norm2(&linalg::sub(interior, x_cand)) + linalg::norm_inf(interior);

    let mut min_inner = f64::INFINITY;
    let mut worst = None;
    for i in 0..samples {
        let mut dir = vec![0.0; n];
        for b in &basis {
            linalg::axpy(rng.random_range(-1.0..1.0), b, &mut dir);
        }
        let scale = radius * rng.random::<f64>();
        let mut y: Vec<f64> = interior.iter().zip(&dir).map(|(p, d)| p + scale * d).collect();
        let mut shrink = 1.0;
        while !prob.is_strictly_feasible(&y) && shrink > 1e-12 {
            shrink *= 0.5;
            y = interior.iter().zip(&dir).map(|(p, d)| p + shrink * scale * d).collect();
        }
        if !prob.is_strictly_feasible(&y) {
            y = interior.to_vec();
        }
        if i % 2 == 1 {
            let theta: f64 = rng.random();
            y = x_cand.iter().zip(&y).map(|(c, p)| c + theta * (p - c)).collect();
        }
        let inner = linalg::dot(&grad, &linalg::sub(&y, x_cand));
        if inner < min_inner {
            min_inner = inner;
            worst = Some(y);
        }
    }
    if samples == 0 {
        min_inner = 0.0;
    }
    Ok(OptimalityReport {
        passed: min_inner >= -tol,
        min_inner_product: min_inner,
        worst_point: worst,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    use super::*;
    use crate::model::FnField;

    fn pts(p: &[[f64; 2]]) -> Vec<Vec<f64>> {
        p.iter().map(|q| q.to_vec()).collect()
    }

    #[test]
    fn voronoi_single_bisector() {
        let cell = voronoi_polyhedron(&[0.0, 0.0], &pts(&[[2.0, 0.0]])).unwrap();
        assert_eq!(cell.g, DenseMatrix::from_rows(&[[4.0, 0.0]]).unwrap());
        assert_eq!(cell.h, vec![4.0]);
        assert!(cell.contains(&[1.0, 5.0]));
        assert!(!cell.contains(&[1.0 + 1e-9, 0.0]));
    }

    #[test]
    fn voronoi_two_bisectors() {
        let cell = voronoi_polyhedron(&[0.0, 0.0], &pts(&[[2.0, 0.0], [0.0, 2.0]])).unwrap();
        assert_eq!(cell.g.to_rows(), vec![vec![4.0, 0.0], vec![0.0, 4.0]]);
        assert_eq!(cell.h, vec![4.0, 4.0]);
    }

    #[test]
    fn voronoi_degenerate() {
        assert_eq!(
            voronoi_polyhedron(&[1.0, 1.0], &pts(&[[2.0, 0.0], [1.0, 1.0]])),
            Err(GeometryError::DegeneratePoint { index: 1 })
        );
        assert!(matches!(
            voronoi_polyhedron(&[1.0, 1.0], &[vec![1.0]]),
            Err(GeometryError::Dimension(_))
        ));
    }

    #[test]
    fn separate_two_points() {
        let cfg = BarrierConfig::with_eps(1e-10);
        let h = separating_hyperplane(&pts(&[[0.0, 0.0]]), &pts(&[[2.0, 0.0]]), &cfg).unwrap();
        assert_eq!(h.a, vec![2.0, 0.0]);
        assert_eq!(h.b, 2.0);
        assert_eq!(h.eval(&[0.0, 0.0]), -2.0);
        assert_eq!(h.eval(&[2.0, 0.0]), 2.0);
    }

    #[test]
    fn separate_facing_edges() {
        let cfg = BarrierConfig::with_eps(1e-10);
        let c = pts(&[[0.0, 0.0], [0.0, 1.0]]);
        let d = pts(&[[2.0, 0.0], [2.0, 1.0]]);
        let h = separating_hyperplane(&c, &d, &cfg).unwrap();
        assert!((h.a[0] - 2.0).abs() < 1e-6 && h.a[1].abs() < 1e-6, "{h:?}");
        assert!((h.b - 2.0).abs() < 1e-6);
    }

    #[test]
    fn shared_point_not_separable() {
        let cfg = BarrierConfig::with_eps(1e-10);
        let c = pts(&[[0.0, 0.0], [1.0, 1.0]]);
        let d = pts(&[[1.0, 1.0], [2.0, 0.0]]);
        assert!(matches!(
            separating_hyperplane(&c, &d, &cfg),
            Err(GeometryError::NotSeparable { .. })
        ));
        assert_eq!(
            separating_hyperplane(&[], &d, &cfg),
            Err(GeometryError::Empty)
        );
    }

    #[test]
    fn chebyshev_two_points() {
        let (c, r) = chebyshev_center(&pts(&[[0.0, 0.0], [2.0, 0.0]]), &BarrierConfig::with_eps(1e-10))
            .unwrap();
        assert!((c[0] - 1.0).abs() < 1e-6 && c[1].abs() < 1e-6, "{c:?}");
        assert!((r - 1.0).abs() < 1e-6, "{r}");
    }

    #[test]
    fn chebyshev_equilateral() {
        let s3 = 3f64.sqrt();
        let (c, r) = chebyshev_center(
            &pts(&[[0.0, 0.0], [2.0, 0.0], [1.0, s3]]),
            &BarrierConfig::with_eps(1e-10),
        )
        .unwrap();
        assert!((r - 2.0 / s3).abs() < 1e-4, "{r}");
        assert!((c[0] - 1.0).abs() < 1e-4 && (c[1] - 1.0 / s3).abs() < 1e-4);
    }

    #[test]
    fn chebyshev_single_and_repeated() {
        let cfg = BarrierConfig::default();
        assert_eq!(
            chebyshev_center(&pts(&[[5.0, 5.0]]), &cfg).unwrap(),
            (vec![5.0, 5.0], 0.0)
        );
        assert_eq!(
            chebyshev_center(&pts(&[[5.0, 5.0], [5.0, 5.0]]), &cfg).unwrap(),
            (vec![5.0, 5.0], 0.0)
        );
        assert_eq!(chebyshev_center(&[], &cfg), Err(GeometryError::Empty));
    }

    #[test]
    fn chebyshev_centroid_on_a_point() {
        // Centroid of three collinear points is the middle one.
        let (c, r) = chebyshev_center(
            &pts(&[[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]),
            &BarrierConfig::with_eps(1e-10),
        )
        .unwrap();
        assert!((r - 1.0).abs() < 1e-6 && (c[0] - 1.0).abs() < 1e-5 && c[1].abs() < 1e-5);
    }

    fn cube() -> FnField {
        FnField::new(1, |x| x[0].powi(3), |x| vec![3.0 * x[0] * x[0]], |x| {
            DenseMatrix::from_rows(&[[6.0 * x[0]]]).unwrap()
        })
    }

    #[test]
    fn convexity_samples() {
        let mut rng = StdRng::seed_from_u64(7);
        let sq = Quadratic::new(DenseMatrix::from_rows(&[[2.0]]).unwrap(), vec![0.0], 0.0).unwrap();
        let rep = check_convexity_sampled(&sq, &mut || vec![rng.random_range(-10.0..10.0)], 100)
            .unwrap();
        assert!(rep.is_consistent());

        let neglog = FnField::new(1, |x| -x[0].ln(), |x| vec![-1.0 / x[0]], |x| {
            DenseMatrix::from_rows(&[[1.0 / (x[0] * x[0])]]).unwrap()
        })
        .with_domain(|x| x[0] > 0.0);
        let rep = check_convexity_sampled(&neglog, &mut || vec![rng.random_range(0.1..10.0)], 100)
            .unwrap();
        assert!(rep.is_consistent(), "{rep:?}");

        let rep = check_convexity_sampled(&cube(), &mut || vec![rng.random_range(-2.0..2.0)], 100)
            .unwrap();
        assert!(!rep.is_consistent());
        assert!(rep
            .violations
            .iter()
            .any(|v| matches!(v, ConvexityViolation::Hessian { min_eigenvalue, .. } if *min_eigenvalue < 0.0)));
    }

    #[test]
    fn convexity_sampler_out_of_domain() {
        let neglog = FnField::new(1, |x| -x[0].ln(), |x| vec![-1.0 / x[0]], |x| {
            DenseMatrix::from_rows(&[[1.0 / (x[0] * x[0])]]).unwrap()
        })
        .with_domain(|x| x[0] > 0.0);
        assert_eq!(
            check_convexity_sampled(&neglog, &mut || vec![-1.0], 1),
            Err(GeometryError::OutOfDomain)
        );
    }

    #[test]
    fn optimality_example6() {
        let mut rng = StdRng::seed_from_u64(11);
        let prob = model::example6();
        let opt = [400.0 / 3.0, 200.0 / 3.0, 800.0 / 3.0];
        let interior = [100.0, 50.0, 300.0];
        let rep = verify_optimality_sampled(&prob, &opt, &interior, 500, &mut rng).unwrap();
        assert!(rep.passed, "{rep:?}");

        let rep = verify_optimality_sampled(&prob, &interior, &interior, 500, &mut rng).unwrap();
        assert!(!rep.passed);
        assert!(rep.min_inner_product < 0.0);
    }

    #[test]
    fn optimality_certified_by_multipliers() {
        // ∇f0 + λ∇f1 + νa = 0 at the optimum with λ = 800/3, ν = −1400/3.
        let opt = [400.0 / 3.0, 200.0 / 3.0, 800.0 / 3.0];
        let g = model::example6_objective().gradient(&opt);
        let want = [200.0, -800.0 / 3.0, 1400.0 / 3.0];
        for i in 0..3 {
            assert!((g[i] - want[i]).abs() < 1e-10);
        }
        let (lambda, nu) = (800.0 / 3.0, -1400.0 / 3.0);
        let kkt = [g[0] + lambda + nu, g[1] + lambda, g[2] + nu];
        assert!(kkt.iter().all(|v| v.abs() < 1e-10), "{kkt:?}");
    }

    #[test]
    fn optimality_unconstrained_minimum() {
        let mut rng = StdRng::seed_from_u64(3);
        let sq = Quadratic::new(DenseMatrix::from_rows(&[[2.0]]).unwrap(), vec![0.0], 0.0).unwrap();
        let prob = ConvexProblem::unconstrained(Arc::new(sq));
        let rep = verify_optimality_sampled(&prob, &[0.0], &[0.0], 50, &mut rng).unwrap();
        assert!(rep.passed);
        assert!(rep.min_inner_product >= 0.0);
    }

    #[test]
    fn optimality_infeasible_candidate() {
        let mut rng = StdRng::seed_from_u64(3);
        let prob = model::example6();
        assert_eq!(
            verify_optimality_sampled(&prob, &[300.0, 0.0, 100.0], &[100.0, 50.0, 300.0], 5, &mut rng),
            Err(GeometryError::InfeasibleCandidate)
        );
    }
}
