//! Dense linear algebra for small problems.
//!
//! Everything here is sized for desk-scale problems (a few dozen variables at
//! most): row-major storage, LU with partial pivoting for the KKT block
//! system, and cyclic Jacobi for symmetric eigenvalues.

use std::fmt;
use std::ops::{Index, IndexMut};

use thiserror::Error;

/// Relative pivot threshold used by the LU factorization.
pub const PIVOT_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("matrix is not symmetric: |M[{row},{col}] - M[{col},{row}]| exceeds tolerance")]
    NotSymmetric { row: usize, col: usize },
    #[error("KKT matrix is singular: pivot {pivot:e} at step {step} is below threshold {threshold:e}")]
    SingularKkt {
        step: usize,
        pivot: f64,
        threshold: f64,
    },
}

/// Row-major dense matrix.
#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::Shape(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from a list of rows. An empty list yields a `0 x cols`
    /// matrix, so callers that need a zero-row matrix with a known width
    /// should use [`DenseMatrix::zeros`].
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self, LinalgError> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(LinalgError::Shape(format!(
                    "row {i} has {} entries, expected {cols}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = *d;
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    /// `M x`
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "mul_vec: dimension mismatch");
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// `Mᵀ y`
    pub fn transpose_mul_vec(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.rows, "transpose_mul_vec: dimension mismatch");
        let mut out = vec![0.0; self.cols];
        for (i, yi) in y.iter().enumerate() {
            axpy(*yi, self.row(i), &mut out);
        }
        out
    }

    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.rows, "matmul: dimension mismatch");
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn scale(&mut self, alpha: f64) {
        self.data.iter_mut().for_each(|v| *v *= alpha);
    }

    /// `self += alpha * other`
    pub fn add_scaled(&mut self, alpha: f64, other: &DenseMatrix) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        axpy(alpha, &other.data, &mut self.data);
    }

    /// `self += alpha * v vᵀ`
    pub fn rank_one_update(&mut self, alpha: f64, v: &[f64]) {
        assert!(self.is_square() && v.len() == self.rows);
        for i in 0..self.rows {
            let s = alpha * v[i];
            if s == 0.0 {
                continue;
            }
            for j in 0..self.cols {
                self[(i, j)] += s * v[j];
            }
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// First index pair violating `|M[i,j] − M[j,i]| ≤ 1e−12·(1 + |M[i,j]|)`.
    pub fn symmetry_violation(&self) -> Option<(usize, usize)> {
        if !self.is_square() {
            return Some((0, 0));
        }
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                let (a, b) = (self[(i, j)], self[(j, i)]);
                if (a - b).abs() > 1e-12 * (1.0 + a.abs()) || a.is_nan() || b.is_nan() {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetry_violation().is_none()
    }

    pub fn check_symmetric(&self) -> Result<(), LinalgError> {
        match self.symmetry_violation() {
            None => Ok(()),
            Some((row, col)) => Err(LinalgError::NotSymmetric { row, col }),
        }
    }

    /// `P M Pᵀ` for the permutation sending index `i` to `perm[i]`.
    pub fn permute_symmetric(&self, perm: &[usize]) -> DenseMatrix {
        assert!(self.is_square() && perm.len() == self.rows);
        let mut out = DenseMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(perm[i], perm[j])] = self[(i, j)];
            }
        }
        out
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DenseMatrix {}x{} ", self.rows, self.cols)?;
        f.debug_list().entries(self.to_rows()).finish()
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `y += alpha * x`
#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn norm_inf(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

pub fn norm2(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// LU factorization `P M = L U` with partial pivoting.
///
/// A pivot is accepted only if its magnitude exceeds `PIVOT_RTOL` times the
/// largest entry of its row in the active (reduced) submatrix. Barrier
/// Hessians at large `t` make the KKT matrix very ill-conditioned without
/// being singular, so the comparison is against the reduced row rather than
/// the original one.
#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl Lu {
    pub fn factor(m: &DenseMatrix) -> Result<Self, LinalgError> {
        if !m.is_square() {
            return Err(LinalgError::Shape(format!(
                "LU needs a square matrix, got {}x{}",
                m.rows, m.cols
            )));
        }
        let n = m.rows;
        let mut lu = m.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();

        for k in 0..n {
            let best = (k..n)
                .max_by(|&a, &b| lu[a * n + k].abs().total_cmp(&lu[b * n + k].abs()))
                .unwrap_or(k);
            if best != k {
                for c in 0..n {
                    lu.swap(k * n + c, best * n + c);
                }
                perm.swap(k, best);
            }
            let pivot = lu[k * n + k];
            let row_max = norm_inf(&lu[k * n + k..(k + 1) * n]);
            let threshold = PIVOT_RTOL * row_max;
            if !(pivot.abs() > threshold) || !pivot.is_finite() {
                return Err(LinalgError::SingularKkt {
                    step: k,
                    pivot,
                    threshold,
                });
            }
            for r in (k + 1)..n {
                let factor = lu[r * n + k] / pivot;
                lu[r * n + k] = factor;
                if factor != 0.0 {
                    for c in (k + 1)..n {
                        lu[r * n + c] -= factor * lu[k * n + c];
                    }
                }
            }
        }
        Ok(Self { n, lu, perm })
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.n;
        assert_eq!(rhs.len(), n);
        let mut x: Vec<f64> = self.perm.iter().map(|&p| rhs[p]).collect();
        for i in 0..n {
            let s: f64 = (0..i).map(|j| self.lu[i * n + j] * x[j]).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s: f64 = ((i + 1)..n).map(|j| self.lu[i * n + j] * x[j]).sum();
            x[i] = (x[i] - s) / self.lu[i * n + i];
        }
        x
    }
}

/// Solves `M x = rhs` with one step of iterative refinement.
pub fn solve_dense(m: &DenseMatrix, rhs: &[f64]) -> Result<Vec<f64>, LinalgError> {
    let lu = Lu::factor(m)?;
    let mut x = lu.solve(rhs);
    let r = sub(rhs, &m.mul_vec(&x));
    let dx = lu.solve(&r);
    axpy(1.0, &dx, &mut x);
    Ok(x)
}

/// The Newton KKT block system
///
/// ```text
/// [ H  Aᵀ ] [dx]   [-g]
/// [ A  0  ] [w ] = [ 0]
/// ```
#[derive(Debug, Clone)]
pub struct KktSystem {
    pub h: DenseMatrix,
    pub a: DenseMatrix,
    pub g: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KktSolution {
    pub dx: Vec<f64>,
    pub w: Vec<f64>,
}

impl KktSystem {
    pub fn new(h: DenseMatrix, a: DenseMatrix, g: Vec<f64>) -> Self {
        Self { h, a, g }
    }

    pub fn n(&self) -> usize {
        self.h.rows()
    }

    pub fn p(&self) -> usize {
        self.a.rows()
    }

    fn validate(&self) -> Result<(), LinalgError> {
        let n = self.h.rows();
        if !self.h.is_square() {
            return Err(LinalgError::Shape(format!(
                "Hessian is {}x{}",
                self.h.rows(),
                self.h.cols()
            )));
        }
        if self.a.cols() != n && self.a.rows() > 0 {
            return Err(LinalgError::Shape(format!(
                "equality matrix has {} columns, Hessian has {n}",
                self.a.cols()
            )));
        }
        if self.a.rows() > n {
            return Err(LinalgError::Shape(format!(
                "{} equality rows exceed {n} variables",
                self.a.rows()
            )));
        }
        if self.g.len() != n {
            return Err(LinalgError::Shape(format!(
                "gradient has length {}, expected {n}",
                self.g.len()
            )));
        }
        self.h.check_symmetric()
    }

    /// The assembled `(n+p) x (n+p)` augmented matrix.
    pub fn augmented(&self) -> DenseMatrix {
        let (n, p) = (self.n(), self.p());
        let mut k = DenseMatrix::zeros(n + p, n + p);
        for i in 0..n {
            for j in 0..n {
                k[(i, j)] = self.h[(i, j)];
            }
        }
        for r in 0..p {
            for j in 0..n {
                let v = self.a[(r, j)];
                k[(n + r, j)] = v;
                k[(j, n + r)] = v;
            }
        }
        k
    }

    pub fn rhs(&self) -> Vec<f64> {
        let mut rhs: Vec<f64> = self.g.iter().map(|v| -v).collect();
        rhs.resize(self.n() + self.p(), 0.0);
        rhs
    }
}

/// Symmetric Ruiz equilibration: returns `d` such that `diag(d) M diag(d)`
/// has every row's largest magnitude within a factor of about 4 of 1.
/// Entries of `d` are powers of two, so scaling introduces no rounding.
/// Zero rows keep scale 1.
pub fn ruiz_scaling(m: &DenseMatrix) -> Vec<f64> {
    let n = m.rows();
    let mut d = vec![1.0; n];
    for _ in 0..20 {
        let mut worst: f64 = 0.0;
        let mut row_max = vec![0.0f64; n];
        for i in 0..n {
            for j in 0..n {
                row_max[i] = row_max[i].max((d[i] * m[(i, j)] * d[j]).abs());
            }
        }
        for i in 0..n {
            if row_max[i] > 0.0 && row_max[i].is_finite() {
                d[i] /= row_max[i].sqrt();
                worst = worst.max((1.0 - row_max[i]).abs());
            }
        }
        if worst < 1e-2 {
            break;
        }
    }
    d.iter().map(|v| v.log2().round().exp2()).collect()
}

/// Solves the KKT block system by factoring the equilibrated augmented
/// matrix.
pub fn solve_kkt(sys: &KktSystem) -> Result<KktSolution, LinalgError> {
    sys.validate()?;
    let n = sys.n();
    let mut k = sys.augmented();
    let d = ruiz_scaling(&k);
    let size = k.rows();
    for i in 0..size {
        for j in 0..size {
            k[(i, j)] *= d[i] * d[j];
        }
    }
    let rhs: Vec<f64> = sys.rhs().iter().zip(&d).map(|(r, s)| r * s).collect();
    let y = solve_dense(&k, &rhs)?;
    let mut sol: Vec<f64> = y.iter().zip(&d).map(|(v, s)| v * s).collect();
    let w = sol.split_off(n);
    Ok(KktSolution { dx: sol, w })
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn symmetric_eigenvalues(m: &DenseMatrix) -> Result<Vec<f64>, LinalgError> {
    m.check_symmetric()?;
    let n = m.rows();
    let mut a = m.clone();
    // Symmetrize exactly so rotations act on a truly symmetric matrix.
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum();
        let diag: f64 = (0..n).map(|i| a[(i, i)] * a[(i, i)]).sum();
        if off <= f64::EPSILON * f64::EPSILON * diag || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    eig.sort_by(|x, y| x.total_cmp(y));
    Ok(eig)
}

/// Scale-aware default tolerance for [`is_positive_semidefinite`]:
/// `1e-9 · Σ|M_ii| / n`. Zero for the zero matrix.
pub fn default_psd_tol(m: &DenseMatrix) -> f64 {
    let n = m.rows().max(1);
    let mag: f64 = (0..m.rows()).map(|i| m[(i, i)].abs()).sum();
    1e-9 * mag / n as f64
}

/// True iff every eigenvalue of the symmetric matrix is at least `-tol`.
pub fn is_positive_semidefinite(m: &DenseMatrix, tol: f64) -> Result<bool, LinalgError> {
    let eig = symmetric_eigenvalues(m)?;
    Ok(eig.first().is_none_or(|&lo| lo >= -tol))
}

/// Numerical row rank by Gaussian elimination with partial pivoting.
pub fn row_rank(m: &DenseMatrix) -> usize {
    let (rows, cols) = (m.rows(), m.cols());
    let tol = PIVOT_RTOL * m.max_abs() * rows.max(cols).max(1) as f64;
    let mut a = m.clone();
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let (best, val) = (rank..rows)
            .map(|r| (r, a[(r, c)].abs()))
            .fold((rank, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if val <= tol {
            continue;
        }
        for j in 0..cols {
            let tmp = a[(rank, j)];
            a[(rank, j)] = a[(best, j)];
            a[(best, j)] = tmp;
        }
        for r in (rank + 1)..rows {
            let f = a[(r, c)] / a[(rank, c)];
            for j in c..cols {
                a[(r, j)] -= f * a[(rank, j)];
            }
        }
        rank += 1;
    }
    rank
}

/// Minimum-norm solution `Aᵀ(AAᵀ)⁻¹b` of a full-row-rank system `Ax = b`.
pub fn least_norm_solution(a: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
    if b.len() != a.rows() {
        return Err(LinalgError::Shape(format!(
            "right-hand side has length {}, matrix has {} rows",
            b.len(),
            a.rows()
        )));
    }
    if a.rows() == 0 {
        return Ok(vec![0.0; a.cols()]);
    }
    let gram = a.matmul(&a.transpose());
    let y = solve_dense(&gram, b)?;
    Ok(a.transpose_mul_vec(&y))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(sys: &KktSystem, sol: &KktSolution) -> f64 {
        let mut x = sol.dx.clone();
        x.extend_from_slice(&sol.w);
        let r = sub(&sys.augmented().mul_vec(&x), &sys.rhs());
        norm_inf(&r)
    }

    #[test]
    fn kkt_unconstrained_scalar() {
        let sys = KktSystem::new(
            DenseMatrix::from_rows(&[[1.0]]).unwrap(),
            DenseMatrix::zeros(0, 1),
            vec![3.0],
        );
        let sol = solve_kkt(&sys).unwrap();
        assert_eq!(sol.dx, vec![-3.0]);
        assert!(sol.w.is_empty());
    }

    #[test]
    fn kkt_one_equality() {
        // Oracle: substitution into [[2,0,1],[0,2,1],[1,1,0]] (dx, w) = (-2, 0, 0).
        let h = DenseMatrix::from_rows(&[[2.0, 0.0], [0.0, 2.0]]).unwrap();
        let a = DenseMatrix::from_rows(&[[1.0, 1.0]]).unwrap();
        let sol = solve_kkt(&KktSystem::new(h.clone(), a.clone(), vec![2.0, 0.0])).unwrap();
        assert!((sol.dx[0] + 0.5).abs() < 1e-14 && (sol.dx[1] - 0.5).abs() < 1e-14);
        assert!((sol.w[0] + 1.0).abs() < 1e-14);

        let sys = KktSystem::new(h, a, vec![4.0, 0.0]);
        let sol = solve_kkt(&sys).unwrap();
        assert!((sol.dx[0] + 1.0).abs() < 1e-14 && (sol.dx[1] - 1.0).abs() < 1e-14);
        assert!((sol.w[0] + 2.0).abs() < 1e-14);
        assert!(residual(&sys, &sol) < 1e-12);
        // Feasible direction.
        assert!(dot(sys.a.row(0), &sol.dx).abs() < 1e-14);
    }

    #[test]
    fn kkt_singular_detected() {
        // H = 0 on the nullspace of A makes the block matrix singular.
        let h = DenseMatrix::zeros(2, 2);
        let a = DenseMatrix::from_rows(&[[1.0, 1.0]]).unwrap();
        let err = solve_kkt(&KktSystem::new(h, a, vec![1.0, 0.0])).unwrap_err();
        assert!(matches!(err, LinalgError::SingularKkt { .. }));
    }

    #[test]
    fn kkt_singular_hessian_on_range_of_a_is_fine() {
        // H is singular, but nonsingular on null(A) = span{(1,-1)}.
        let h = DenseMatrix::from_rows(&[[1.0, -1.0], [-1.0, 1.0]]).unwrap();
        let a = DenseMatrix::from_rows(&[[1.0, 1.0]]).unwrap();
        let sys = KktSystem::new(h, a, vec![1.0, -1.0]);
        let sol = solve_kkt(&sys).unwrap();
        assert!(residual(&sys, &sol) < 1e-12);
    }

    #[test]
    fn kkt_rejects_asymmetric_hessian() {
        let h = DenseMatrix::from_rows(&[[1.0, 1.0], [0.0, 1.0]]).unwrap();
        let sys = KktSystem::new(h, DenseMatrix::zeros(0, 2), vec![0.0, 0.0]);
        assert!(matches!(
            solve_kkt(&sys),
            Err(LinalgError::NotSymmetric { row: 0, col: 1 })
        ));
    }

    #[test]
    fn psd_examples() {
        let tri =
            DenseMatrix::from_rows(&[[2.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 2.0]])
                .unwrap();
        assert!(is_positive_semidefinite(&tri, default_psd_tol(&tri)).unwrap());
        let id = DenseMatrix::identity(3);
        assert!(is_positive_semidefinite(&id, default_psd_tol(&id)).unwrap());
        let neg = DenseMatrix::from_rows(&[[-1.0]]).unwrap();
        assert!(!is_positive_semidefinite(&neg, default_psd_tol(&neg)).unwrap());
        let zero = DenseMatrix::zeros(3, 3);
        assert_eq!(default_psd_tol(&zero), 0.0);
        assert!(is_positive_semidefinite(&zero, 0.0).unwrap());
    }

    #[test]
    fn psd_rejects_asymmetric() {
        let m = DenseMatrix::from_rows(&[[0.0, 1.0], [0.0, 0.0]]).unwrap();
        assert!(matches!(
            is_positive_semidefinite(&m, 0.0),
            Err(LinalgError::NotSymmetric { .. })
        ));
    }

    #[test]
    fn psd_indefinite_with_zero_diagonal() {
        let m = DenseMatrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        assert!(!is_positive_semidefinite(&m, 1e-9).unwrap());
    }

    #[test]
    fn jacobi_eigenvalues_of_tridiagonal() {
        // Eigenvalues of the 3x3 second-difference matrix: 2 - sqrt(2), 2, 2 + sqrt(2).
        let tri =
            DenseMatrix::from_rows(&[[2.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 2.0]])
                .unwrap();
        let eig = symmetric_eigenvalues(&tri).unwrap();
        let s = 2f64.sqrt();
        for (e, want) in eig.iter().zip([2.0 - s, 2.0, 2.0 + s]) {
            assert!((e - want).abs() < 1e-13, "{e} vs {want}");
        }
    }

    #[test]
    fn rank_and_least_norm() {
        let a = DenseMatrix::from_rows(&[[1.0, 0.0, 1.0]]).unwrap();
        assert_eq!(row_rank(&a), 1);
        let x = least_norm_solution(&a, &[400.0]).unwrap();
        assert!((x[0] - 200.0).abs() < 1e-12 && x[1] == 0.0 && (x[2] - 200.0).abs() < 1e-12);

        let dup = DenseMatrix::from_rows(&[[1.0, 2.0], [2.0, 4.0]]).unwrap();
        assert_eq!(row_rank(&dup), 1);
        assert_eq!(row_rank(&DenseMatrix::zeros(2, 3)), 0);
    }

    #[test]
    fn from_rows_shape_errors() {
        assert!(DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![1.0]]).is_err());
        assert!(DenseMatrix::from_row_major(2, 2, vec![1.0; 3]).is_err());
    }
}
