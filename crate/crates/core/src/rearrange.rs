//! Diagonal rearrangements of singular values and the layer-cake decomposition.
//!
//! Arrow convention (read this before using the operators):
//!
//! | operator | diagonal position 1 | diagonal position n |
//! |----------|---------------------|---------------------|
//! | `Σ↑(A)` ([`sigma_up`])   | largest singular value `σ₁`  | smallest `σ_n` |
//! | `Σ↓(A)` ([`sigma_down`]) | smallest singular value `σ_n` | largest `σ₁` |
//!
//! The up-arrow carries the *nonincreasing* order. The naming looks
//! backwards but it is the convention the inequalities are stated in.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{abs_matrix, eig_hermitian, singular_values, ComplexMatrix, PsdMatrix};
use crate::report::{params, Claim, Direction, InequalityReport, Witness};
use crate::tolerances::PRECONDITION_TOL;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Arrow {
    /// Largest value first.
    Up,
    /// Smallest value first.
    Down,
}

/// Singular values laid out along a diagonal in one of the two orders.
#[derive(Clone, Debug, PartialEq)]
pub struct RearrangedDiagonal {
    values: Vec<f64>,
    arrow: Arrow,
}

impl RearrangedDiagonal {
    pub fn of(a: &ComplexMatrix, arrow: Arrow) -> Result<Self> {
        let mut values = singular_values(a)?;
        if arrow == Arrow::Down {
            values.reverse();
        }
        Ok(Self { values, arrow })
    }

    /// Diagonal entries in position order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn arrow(&self) -> Arrow {
        self.arrow
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::diag(&self.values)
    }
}

/// `Σ↑(A)`: singular values on the diagonal, largest first.
pub fn sigma_up(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(RearrangedDiagonal::of(a, Arrow::Up)?.to_matrix())
}

/// `Σ↓(A)`: singular values on the diagonal, smallest first.
pub fn sigma_down(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(RearrangedDiagonal::of(a, Arrow::Down)?.to_matrix())
}

/// Nested spectral projections `P_1 ⊂ … ⊂ P_n` with weights `c_j ≥ 0`, `C = Σ c_j P_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct LayerCake {
    pub coefficients: Vec<f64>,
    /// `projections[j]` has rank `j + 1`.
    pub projections: Vec<ComplexMatrix>,
}

impl LayerCake {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.projections[0].dim();
        self.coefficients
            .iter()
            .zip(&self.projections)
            .fold(ComplexMatrix::zeros(n), |acc, (&c, p)| &acc + &p.scale(c))
    }

    /// Equals the largest eigenvalue of the decomposed matrix.
    pub fn coefficient_sum(&self) -> f64 {
        self.coefficients.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }
}

/// Layer-cake decomposition `c_j = λ_j − λ_{j+1}`, `c_n = λ_n`, `P_j` onto the top-`j` eigenvectors.
///
/// No normalisation is applied: for a contraction with `λ₁ = 1` the
/// coefficients sum to one and the decomposition is a convex combination.
pub fn layer_cake(c: &PsdMatrix) -> LayerCake {
    let lambda = c.eigenvalues();
    let vectors = c.spectral().eigenvectors.as_dmatrix();
    let n = lambda.len();
    let coefficients = (0..n)
        .map(|j| {
            if j + 1 < n {
                lambda[j] - lambda[j + 1]
            } else {
                lambda[j]
            }
        })
        .collect();
    let mut projections = Vec::with_capacity(n);
    let mut running = nalgebra::DMatrix::zeros(n, n);
    for j in 0..n {
        let u = vectors.column(j);
        running += u * u.adjoint();
        projections.push(ComplexMatrix::wrap(running.clone()));
    }
    LayerCake {
        coefficients,
        projections,
    }
}

/// Checks `A ≥ |B| ⇒ σ_i(A) ≥ σ_i(B)` for every `i`; slack is the smallest gap.
pub fn weyl_monotone_check(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<InequalityReport> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    eig_hermitian(b)?;
    let gap = a - abs_matrix(b)?.matrix();
    let lowest = *eig_hermitian(&gap)?.eigenvalues.last().expect("dim >= 1");
    if lowest < -PRECONDITION_TOL * a.frobenius_norm().max(1.0) {
        return Err(Error::PreconditionViolated(format!(
            "A - |B| has eigenvalue {lowest:.3e}"
        )));
    }
    let sa = singular_values(a)?;
    let sb = singular_values(b)?;
    let (index, _) = sa
        .iter()
        .zip(&sb)
        .map(|(x, y)| x - y)
        .enumerate()
        .min_by(|(_, x), (_, y)| x.total_cmp(y))
        .expect("dim >= 1");
    Ok(InequalityReport::new(
        "weyl_monotone",
        params(&[("index", index as f64)]),
        sa[index],
        sb[index],
        Direction::LhsGeRhs,
        Claim::Proved,
        Witness::matrices(&[("A", a), ("B", b)]),
    ))
}
