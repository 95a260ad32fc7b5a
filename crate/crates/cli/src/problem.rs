//! Problem files: the quadratic-objective, affine-constraint case of the
//! standard form, serialized as JSON.

use std::sync::Arc;

use convexopt::linalg::{self, DenseMatrix};
use convexopt::model::{Affine, ConvexProblem, Field, Quadratic};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectiveSpec {
    #[serde(rename = "Q")]
    pub hessian: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InequalitySpec {
    #[serde(rename = "G")]
    pub g: Vec<Vec<f64>>,
    pub h: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EqualitySpec {
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
}

/// `minimize ½xᵀQx + qᵀx + c  s.t.  Gx ≤ h,  Ax = b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub n: usize,
    pub objective: ObjectiveSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inequalities: Option<InequalitySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equalities: Option<EqualitySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct LoadedProblem {
    pub file: ProblemFile,
    pub problem: ConvexProblem,
}

impl LoadedProblem {
    pub fn start(&self) -> Option<&[f64]> {
        self.file.start.as_deref()
    }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

fn matrix(field: &str, rows: &[Vec<f64>], cols: usize) -> Result<DenseMatrix, CliError> {
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != cols) {
        return Err(invalid(format!(
            "{field}: row {i} has {} entries, expected {cols}",
            r.len()
        )));
    }
    if rows.is_empty() {
        return Ok(DenseMatrix::zeros(0, cols));
    }
    DenseMatrix::from_rows(rows).map_err(|e| invalid(format!("{field}: {e}")))
}

fn vector(field: &str, v: &[f64], len: usize) -> Result<(), CliError> {
    if v.len() != len {
        return Err(invalid(format!(
            "{field}: has {} entries, expected {len}",
            v.len()
        )));
    }
    Ok(())
}

impl ProblemFile {
    pub fn to_problem(&self) -> Result<ConvexProblem, CliError> {
        let n = self.n;
        if n == 0 {
            return Err(invalid("n: must be positive"));
        }
        let q = matrix("objective.Q", &self.objective.hessian, n)?;
        if q.rows() != n {
            return Err(invalid(format!(
                "objective.Q: has {} rows, expected {n}",
                q.rows()
            )));
        }
        if let Some((i, j)) = q.symmetry_violation() {
            return Err(invalid(format!(
                "objective.Q: not symmetric (entries ({i},{j}) and ({j},{i}) differ)"
            )));
        }
        let psd = linalg::is_positive_semidefinite(&q, linalg::default_psd_tol(&q))
            .map_err(|e| invalid(format!("objective.Q: {e}")))?;
        if !psd {
            return Err(invalid("objective.Q: not positive semidefinite"));
        }
        let lin = match &self.objective.q {
            Some(v) => {
                vector("objective.q", v, n)?;
                v.clone()
            }
            None => vec![0.0; n],
        };
        let objective: Field = Arc::new(
            Quadratic::new(q, lin, self.objective.c.unwrap_or(0.0))
                .map_err(|e| invalid(format!("objective: {e}")))?,
        );

        let mut inequalities: Vec<Field> = Vec::new();
        if let Some(ineq) = &self.inequalities {
            matrix("inequalities.G", &ineq.g, n)?;
            vector("inequalities.h", &ineq.h, ineq.g.len())?;
            for (row, h) in ineq.g.iter().zip(&ineq.h) {
                inequalities.push(Arc::new(Affine::le(row.clone(), *h)));
            }
        }

        let (a, b) = match &self.equalities {
            Some(eq) => {
                let a = matrix("equalities.A", &eq.a, n)?;
                vector("equalities.b", &eq.b, eq.a.len())?;
                (a, eq.b.clone())
            }
            None => (DenseMatrix::zeros(0, n), Vec::new()),
        };
        if let Some(s) = &self.start {
            vector("start", s, n)?;
        }
        ConvexProblem::new(objective, inequalities, a, b).map_err(|e| invalid(e.to_string()))
    }
}

pub fn parse_problem(text: &str) -> Result<LoadedProblem, CliError> {
    let file: ProblemFile = serde_json::from_str(text).map_err(|e| CliError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let problem = file.to_problem()?;
    Ok(LoadedProblem { file, problem })
}

pub fn serialize_problem(file: &ProblemFile) -> String {
    let mut s = serde_json::to_string_pretty(file).expect("problem files always serialize");
    s.push('\n');
    s
}
