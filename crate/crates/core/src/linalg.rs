//! Dense complex matrices and the spectral machinery every checker is built on.
//!
//! Eigen- and singular-value decompositions are delegated to `nalgebra`;
//! this module owns the conventions layered on top of them: Hermitian
//! symmetrization with a hard failure threshold, nonincreasing eigenvalue
//! order with stable tie-breaking, eigenvalue clamping for positive
//! semidefinite matrices, and the `0^0 = 0` kernel convention for powers.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, SymmetricEigen, SVD};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::tolerances::{CLAMP_RELATIVE, HERMITIAN_INPUT_TOL, PSD_HERMITIAN_TOL};

pub type C64 = Complex64;

const EIG_MAX_ITERATIONS: usize = 10_000;

/// Dense square complex matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    inner: DMatrix<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix{}", self.inner)
    }
}

impl ComplexMatrix {
    /// Wraps an `nalgebra` matrix after checking it is square, nonempty and finite.
    pub fn from_dmatrix(inner: DMatrix<C64>) -> Result<Self> {
        if inner.nrows() == 0 || inner.nrows() != inner.ncols() {
            return Err(Error::MalformedMatrix(format!(
                "matrix must be square and nonempty, got {}x{}",
                inner.nrows(),
                inner.ncols()
            )));
        }
        if let Some((idx, _)) = inner
            .iter()
            .enumerate()
            .find(|(_, z)| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::MalformedMatrix(format!(
                "non-finite entry at flat index {idx}"
            )));
        }
        Ok(Self { inner })
    }

    // Internal constructor for results of arithmetic on already-valid matrices.
    pub(crate) fn wrap(inner: DMatrix<C64>) -> Self {
        debug_assert!(inner.is_square());
        Self { inner }
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Result<Self> {
        Self::from_dmatrix(DMatrix::from_fn(dim, dim, f))
    }

    /// Builds a matrix from complex rows; rejects ragged or non-square input.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().position(|r| r.len() != n) {
            return Err(Error::MalformedMatrix(format!(
                "row {bad} has length {}, expected {n}",
                rows[bad].len()
            )));
        }
        Self::from_fn(n, |i, j| rows[i][j])
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn identity(dim: usize) -> Self {
        Self::wrap(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self::wrap(DMatrix::zeros(dim, dim))
    }

    /// Real diagonal matrix. Panics on an empty slice.
    pub fn diag(values: &[f64]) -> Self {
        assert!(!values.is_empty(), "diagonal matrix needs at least one entry");
        let n = values.len();
        Self::wrap(DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(values[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        }))
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.inner[(row, col)]
    }

    pub fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.inner
    }

    pub fn into_dmatrix(self) -> DMatrix<C64> {
        self.inner
    }

    pub fn adjoint(&self) -> Self {
        Self::wrap(self.inner.adjoint())
    }

    pub fn trace(&self) -> C64 {
        self.inner.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner.norm()
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::wrap(self.inner.map(|z| z * c))
    }

    pub fn scale_complex(&self, c: C64) -> Self {
        Self::wrap(self.inner.map(|z| z * c))
    }

    /// `‖M − M*‖_F`.
    pub fn hermitian_deviation(&self) -> f64 {
        (&self.inner - self.inner.adjoint()).norm()
    }

    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        self.hermitian_deviation() <= rel_tol * (1.0 + self.frobenius_norm())
    }

    /// `(M + M*) / 2`.
    pub fn symmetrized(&self) -> Self {
        Self::wrap((&self.inner + self.inner.adjoint()).map(|z| z * 0.5))
    }

    /// Diagonal entries' real parts.
    pub fn real_diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.inner[(i, i)].re).collect()
    }

    /// `J M J` for the flip permutation `J`.
    pub fn flipped(&self) -> Self {
        let n = self.dim();
        Self::wrap(DMatrix::from_fn(n, n, |i, j| self.inner[(n - 1 - i, n - 1 - j)]))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.inner
            .iter()
            .zip(other.inner.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `‖self − other‖_F / max(‖other‖_F, 1)`.
    pub fn relative_distance(&self, other: &Self) -> f64 {
        (&self.inner - &other.inner).norm() / other.frobenius_norm().max(1.0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("matrix serialization is infallible")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::MalformedMatrix(e.to_string()))
    }
}

/// `Tr(A B)` without forming the product.
pub fn trace_of_product(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    let n = a.dim();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += a.inner[(i, j)] * b.inner[(j, i)];
        }
    }
    acc
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: Self) -> ComplexMatrix {
        ComplexMatrix::wrap(&self.inner + &rhs.inner)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: Self) -> ComplexMatrix {
        ComplexMatrix::wrap(&self.inner - &rhs.inner)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: Self) -> ComplexMatrix {
        ComplexMatrix::wrap(&self.inner * &rhs.inner)
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixFile {
    dim: usize,
    entries: Vec<Vec<[f64; 2]>>,
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let n = self.dim();
        let entries = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let z = self.inner[(i, j)];
                        [z.re, z.im]
                    })
                    .collect()
            })
            .collect();
        MatrixFile { dim: n, entries }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let file = MatrixFile::deserialize(deserializer)?;
        if file.dim == 0 {
            return Err(D::Error::custom("dim must be positive"));
        }
        if file.entries.len() != file.dim {
            return Err(D::Error::custom(format!(
                "entries has {} rows but dim is {}",
                file.entries.len(),
                file.dim
            )));
        }
        let rows: Vec<Vec<C64>> = file
            .entries
            .iter()
            .map(|r| r.iter().map(|&[re, im]| C64::new(re, im)).collect())
            .collect();
        ComplexMatrix::from_rows(&rows).map_err(D::Error::custom)
    }
}

/// Eigenvalues (nonincreasing) and orthonormal eigenvectors of a Hermitian matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the eigenvector for `eigenvalues[k]`.
    pub eigenvectors: ComplexMatrix,
}

impl SpectralDecomposition {
    /// `V diag(λ) V*`.
    pub fn recompose(&self) -> ComplexMatrix {
        compose(&self.eigenvalues, &self.eigenvectors)
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }
}

/// `V diag(values) V*`, symmetrized so the result is exactly Hermitian.
pub(crate) fn compose(values: &[f64], vectors: &ComplexMatrix) -> ComplexMatrix {
    let mut scaled = vectors.inner.clone();
    for (k, &lambda) in values.iter().enumerate() {
        scaled.column_mut(k).scale_mut(lambda);
    }
    let product = &scaled * vectors.inner.adjoint();
    ComplexMatrix::wrap((&product + product.adjoint()).map(|z| z * 0.5))
}

/// Sorts eigenpairs nonincreasing; ties keep their original relative order.
fn sort_eigenpairs(values: &[f64], vectors: &DMatrix<C64>) -> (Vec<f64>, ComplexMatrix) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let sorted_values = order.iter().map(|&k| values[k]).collect();
    let n = vectors.nrows();
    let sorted_vectors = DMatrix::from_fn(n, n, |i, j| vectors[(i, order[j])]);
    (sorted_values, ComplexMatrix::wrap(sorted_vectors))
}

/// Hermitian eigendecomposition with eigenvalues sorted nonincreasing.
///
/// The input is symmetrized first; if that correction exceeds the
/// relative tolerance the matrix is rejected as non-Hermitian.
pub fn eig_hermitian(h: &ComplexMatrix) -> Result<SpectralDecomposition> {
    let correction = 0.5 * h.hermitian_deviation();
    let tolerance = HERMITIAN_INPUT_TOL * (1.0 + h.frobenius_norm());
    if correction > tolerance {
        return Err(Error::NotHermitian {
            deviation: correction,
            tolerance,
        });
    }
    eig_symmetrized(&h.symmetrized())
}

fn eig_symmetrized(sym: &ComplexMatrix) -> Result<SpectralDecomposition> {
    let eig = SymmetricEigen::try_new(sym.inner.clone(), f64::EPSILON, EIG_MAX_ITERATIONS).ok_or(
        Error::ConvergenceFailure("Hermitian eigensolver did not converge"),
    )?;
    let values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let (eigenvalues, eigenvectors) = sort_eigenpairs(&values, &eig.eigenvectors);
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Positive semidefinite matrix with its cached spectral decomposition.
#[derive(Clone, Debug, PartialEq)]
pub struct PsdMatrix {
    matrix: ComplexMatrix,
    spectral: SpectralDecomposition,
}

/// Clamp threshold `1e-12 · max(λ_max, 1)`.
pub fn clamp_threshold(lambda_max: f64) -> f64 {
    CLAMP_RELATIVE * lambda_max.max(1.0)
}

impl PsdMatrix {
    /// Validates Hermitian symmetry and nonnegativity, clamping roundoff-negative eigenvalues.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let deviation = m.hermitian_deviation();
        let tolerance = PSD_HERMITIAN_TOL * (1.0 + m.frobenius_norm());
        if deviation > tolerance {
            return Err(Error::NotHermitian { deviation, tolerance });
        }
        let sym = m.symmetrized();
        let mut spectral = eig_symmetrized(&sym)?;
        clamp_spectrum(&mut spectral.eigenvalues)?;
        Ok(Self {
            matrix: sym,
            spectral,
        })
    }

    /// Builds `V diag(values) V*` from an already-orthonormal basis; values need not be sorted.
    pub(crate) fn from_spectrum(values: &[f64], vectors: &ComplexMatrix) -> Result<Self> {
        let (mut eigenvalues, eigenvectors) = sort_eigenpairs(values, &vectors.inner);
        clamp_spectrum(&mut eigenvalues)?;
        let matrix = compose(&eigenvalues, &eigenvectors);
        Ok(Self {
            matrix,
            spectral: SpectralDecomposition {
                eigenvalues,
                eigenvectors,
            },
        })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn spectral(&self) -> &SpectralDecomposition {
        &self.spectral
    }

    /// Nonincreasing, all `>= 0`.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.spectral.eigenvalues
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn lambda_max(&self) -> f64 {
        self.spectral.eigenvalues[0]
    }

    pub fn lambda_min(&self) -> f64 {
        *self.spectral.eigenvalues.last().expect("dim >= 1")
    }

    /// `Tr(M^q)` from the spectrum, with `0^q = 0`.
    pub fn trace_power(&self, q: f64) -> f64 {
        self.eigenvalues().iter().map(|&l| spectral_pow(l, q)).sum()
    }

    pub fn power(&self, q: f64) -> Result<PsdMatrix> {
        matrix_power(self, q)
    }

    /// Wraps a computed quantity that is positive semidefinite in exact arithmetic
    /// (`B^{1/2} A B^{1/2}`, `A − B` for `A ≥ B`, ...).
    ///
    /// The input is symmetrized without a Hermitian check; negative
    /// eigenvalues down to `−1e-12 · max(scale, λ_max, 1)` are clamped, where
    /// `scale` bounds the magnitude of the operands the value was computed from.
    pub fn from_computed(m: &ComplexMatrix, scale: f64) -> Result<Self> {
        let matrix = m.symmetrized();
        let mut spectral = eig_symmetrized(&matrix)?;
        let threshold = clamp_threshold(spectral.eigenvalues[0].max(scale));
        for v in spectral.eigenvalues.iter_mut() {
            if *v < 0.0 {
                if *v < -threshold {
                    return Err(Error::NegativeEigenvalue { value: *v, threshold });
                }
                *v = 0.0;
            }
        }
        Ok(Self { matrix, spectral })
    }
}

fn clamp_spectrum(values: &mut [f64]) -> Result<()> {
    let threshold = clamp_threshold(values.first().copied().unwrap_or(0.0));
    for v in values.iter_mut() {
        if *v < 0.0 {
            if *v < -threshold {
                return Err(Error::NegativeEigenvalue { value: *v, threshold });
            }
            *v = 0.0;
        }
    }
    Ok(())
}

/// Scalar functional calculus used for matrix powers: `0^q = 0` for every `q >= 0`.
pub(crate) fn spectral_pow(lambda: f64, q: f64) -> f64 {
    if lambda == 0.0 {
        0.0
    } else if q == 1.0 {
        lambda
    } else {
        lambda.powf(q)
    }
}

/// `|A| = √(A*A)`, computed from the singular value decomposition `A = U Σ V*` as `V Σ V*`.
pub fn abs_matrix(a: &ComplexMatrix) -> Result<PsdMatrix> {
    let (sigma, v) = svd_right(a)?;
    PsdMatrix::from_spectrum(&sigma, &v)
}

fn svd_right(a: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    let svd = SVD::try_new(a.inner.clone(), false, true, f64::EPSILON, EIG_MAX_ITERATIONS).ok_or(
        Error::ConvergenceFailure("singular value decomposition did not converge"),
    )?;
    let v_t = svd
        .v_t
        .ok_or(Error::ConvergenceFailure("right singular vectors unavailable"))?;
    let sigma = svd.singular_values.iter().copied().collect();
    Ok((sigma, ComplexMatrix::wrap(v_t.adjoint())))
}

/// Singular values, nonincreasing and nonnegative.
///
/// These are the eigenvalues of [`abs_matrix`]; both go through the same
/// decomposition so the two always agree bit for bit.
pub fn singular_values(a: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(abs_matrix(a)?.spectral.eigenvalues)
}

/// `M^q = V diag(λ^q) V*` for `q >= 0`, with `0^0 = 0` on the kernel.
pub fn matrix_power(m: &PsdMatrix, q: f64) -> Result<PsdMatrix> {
    if !(q.is_finite() && q >= 0.0) {
        return Err(Error::BadExponent {
            name: "q",
            value: q,
            expected: "finite q >= 0",
        });
    }
    if q == 1.0 {
        return Ok(m.clone());
    }
    let values: Vec<f64> = m.eigenvalues().iter().map(|&l| spectral_pow(l, q)).collect();
    PsdMatrix::from_spectrum(&values, &m.spectral.eigenvectors)
}

fn check_norm_exponent(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::BadExponent {
            name: "p",
            value: p,
            expected: "p >= 1 or p = inf",
        });
    }
    Ok(())
}

/// `(Σ σ_i^p)^{1/p}` from precomputed singular values; `p = ∞` gives the largest.
pub fn norm_from_singular_values(sigma: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        sigma.iter().copied().fold(0.0, f64::max)
    } else {
        power_sum(sigma, p).powf(1.0 / p)
    }
}

/// `Σ σ_i^p`, i.e. `‖A‖_p^p` without the final root.
pub fn power_sum(sigma: &[f64], p: f64) -> f64 {
    sigma.iter().map(|&s| spectral_pow(s, p)).sum()
}

/// Schatten p-norm `(Tr |A|^p)^{1/p}`; `p = f64::INFINITY` is the operator norm.
pub fn schatten_norm(a: &ComplexMatrix, p: f64) -> Result<f64> {
    check_norm_exponent(p)?;
    Ok(norm_from_singular_values(&singular_values(a)?, p))
}

/// `‖A‖_p^p` for finite `p >= 1`.
pub fn schatten_norm_pow(a: &ComplexMatrix, p: f64) -> Result<f64> {
    check_norm_exponent(p)?;
    if p.is_infinite() {
        return Err(Error::BadExponent {
            name: "p",
            value: p,
            expected: "finite p >= 1",
        });
    }
    Ok(power_sum(&singular_values(a)?, p))
}

/// Positive and negative parts `B = X − Y`, `|B| = X + Y`, `XY = 0`.
pub fn positive_negative_parts(b: &ComplexMatrix) -> Result<(PsdMatrix, PsdMatrix)> {
    let spectral = eig_hermitian(b)?;
    let positive: Vec<f64> = spectral.eigenvalues.iter().map(|&l| l.max(0.0)).collect();
    let negative: Vec<f64> = spectral.eigenvalues.iter().map(|&l| (-l).max(0.0)).collect();
    Ok((
        PsdMatrix::from_spectrum(&positive, &spectral.eigenvectors)?,
        PsdMatrix::from_spectrum(&negative, &spectral.eigenvectors)?,
    ))
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(h: &ComplexMatrix) -> Result<f64> {
    Ok(*eig_hermitian(h)?.eigenvalues.last().expect("dim >= 1"))
}

/// `true` when `h` is Hermitian and its spectrum is `>= −tol · max(‖h‖_F, 1)`.
pub fn is_psd_within(h: &ComplexMatrix, tol: f64) -> Result<bool> {
    Ok(min_eigenvalue(h)? >= -tol * h.frobenius_norm().max(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{sample, EnsembleKind, EnsembleSpec};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn draw(kind: EnsembleKind, dim: usize, seed: u64) -> ComplexMatrix {
        sample(&EnsembleSpec::new(kind, dim, seed)).unwrap().matrices[0].clone()
    }

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0), "{a} vs {b}");
    }

    #[test]
    fn eig_of_diagonal() {
        let d = eig_hermitian(&ComplexMatrix::diag(&[3.0, 1.0])).unwrap();
        assert_eq!(d.eigenvalues, vec![3.0, 1.0]);
        assert!(d.eigenvectors.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn eig_of_pauli_x() {
        let x = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let d = eig_hermitian(&x).unwrap();
        assert_close(d.eigenvalues[0], 1.0, 1e-14);
        assert_close(d.eigenvalues[1], -1.0, 1e-14);
    }

    #[test]
    fn eig_reconstructs_seed_42() {
        let h = draw(EnsembleKind::Hermitian, 5, 42);
        let d = eig_hermitian(&h).unwrap();
        // Oracle: explicit V diag(λ) V* product, written out independently of `compose`.
        let v = d.eigenvectors.as_dmatrix();
        let lam = DMatrix::from_fn(5, 5, |i, j| {
            if i == j {
                c(d.eigenvalues[i], 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        let rebuilt = v * lam * v.adjoint();
        let err = (&rebuilt - h.as_dmatrix()).norm() / h.frobenius_norm();
        assert!(err <= 1e-10, "reconstruction error {err}");
        let gram = v.adjoint() * v;
        let dev = (gram - DMatrix::identity(5, 5)).camax();
        assert!(dev <= 1e-10);
        assert!(d.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(eig_hermitian(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn eig_is_deterministic() {
        let h = draw(EnsembleKind::Hermitian, 6, 3);
        assert_eq!(eig_hermitian(&h).unwrap(), eig_hermitian(&h).unwrap());
    }

    #[test]
    fn abs_of_nilpotent() {
        let a = ComplexMatrix::from_real_rows(&[&[0.0, -2.0], &[0.0, 0.0]]).unwrap();
        let abs = abs_matrix(&a).unwrap();
        assert!(abs.matrix().max_abs_diff(&ComplexMatrix::diag(&[0.0, 2.0])) < 1e-14);
        assert_eq!(abs.eigenvalues().len(), 2);
        assert_close(abs.eigenvalues()[0], 2.0, 1e-14);
        assert!(abs.eigenvalues()[1].abs() < 1e-14);
    }

    #[test]
    fn abs_is_idempotent_on_psd() {
        let m = draw(EnsembleKind::Psd, 4, 5);
        let abs = abs_matrix(&m).unwrap();
        assert!(abs.matrix().relative_distance(&m) <= 1e-10);
    }

    #[test]
    fn abs_of_signature_matrix_is_identity() {
        let abs = abs_matrix(&ComplexMatrix::diag(&[1.0, -1.0])).unwrap();
        assert!(abs.matrix().max_abs_diff(&ComplexMatrix::identity(2)) < 1e-14);
    }

    #[test]
    fn abs_squared_is_gram_matrix() {
        let a = draw(EnsembleKind::GeneralComplex, 5, 8);
        let abs = abs_matrix(&a).unwrap();
        let sq = abs.matrix() * abs.matrix();
        assert!(sq.relative_distance(&(&a.adjoint() * &a)) < 1e-12);
    }

    #[test]
    fn singular_values_examples() {
        let a = ComplexMatrix::from_real_rows(&[&[0.0, 2.0], &[0.0, 0.0]]).unwrap();
        let s = singular_values(&a).unwrap();
        assert_close(s[0], 2.0, 1e-14);
        assert!(s[1].abs() < 1e-14);

        let u = draw(EnsembleKind::Unitary, 4, 2);
        for s in singular_values(&u).unwrap() {
            assert_close(s, 1.0, 1e-12);
        }
    }

    #[test]
    fn singular_values_match_gram_eigenvalues_seed_7() {
        let a = draw(EnsembleKind::GeneralComplex, 4, 7);
        let s = singular_values(&a).unwrap();
        // Oracle: square roots of the eigenvalues of A*A.
        let gram = eig_hermitian(&(&a.adjoint() * &a)).unwrap();
        for (x, l) in s.iter().zip(&gram.eigenvalues) {
            assert_close(*x, l.max(0.0).sqrt(), 1e-10);
        }
        assert!(s.windows(2).all(|w| w[0] >= w[1]));
        assert!(s.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn power_examples() {
        let m = PsdMatrix::new(ComplexMatrix::diag(&[4.0, 9.0])).unwrap();
        let r = matrix_power(&m, 0.5).unwrap();
        assert!(r.matrix().max_abs_diff(&ComplexMatrix::diag(&[2.0, 3.0])) < 1e-14);
        assert_eq!(matrix_power(&m, 1.0).unwrap(), m);

        let m = PsdMatrix::new(draw(EnsembleKind::Psd, 4, 3)).unwrap();
        let sq = matrix_power(&m, 2.0).unwrap();
        let direct = m.matrix() * m.matrix();
        assert!(sq.matrix().relative_distance(&direct) <= 1e-9);
    }

    #[test]
    fn power_zero_is_support_projection() {
        let m = PsdMatrix::new(ComplexMatrix::diag(&[2.0, 0.0])).unwrap();
        let p = matrix_power(&m, 0.0).unwrap();
        assert!(p.matrix().max_abs_diff(&ComplexMatrix::diag(&[1.0, 0.0])) < 1e-15);
    }

    #[test]
    fn power_rejects_negative_exponent() {
        let m = PsdMatrix::new(ComplexMatrix::identity(2)).unwrap();
        assert!(matches!(matrix_power(&m, -0.5), Err(Error::BadExponent { .. })));
    }

    #[test]
    fn psd_rejects_negative_spectrum() {
        let err = PsdMatrix::new(ComplexMatrix::diag(&[1.0, -1e-3])).unwrap_err();
        assert!(matches!(err, Error::NegativeEigenvalue { .. }));
        // Roundoff-size negatives are clamped.
        let ok = PsdMatrix::new(ComplexMatrix::diag(&[1.0, -1e-14])).unwrap();
        assert_eq!(ok.eigenvalues()[1], 0.0);
    }

    #[test]
    fn schatten_examples() {
        for &p in &[1.0, 1.5, 2.0, 3.0] {
            let n = 4.0_f64;
            assert_close(
                schatten_norm(&ComplexMatrix::identity(4), p).unwrap(),
                n.powf(1.0 / p),
                1e-14,
            );
        }
        assert_close(
            schatten_norm(&ComplexMatrix::diag(&[3.0, 4.0]), 2.0).unwrap(),
            5.0,
            1e-14,
        );
        assert_close(
            schatten_norm(&ComplexMatrix::diag(&[3.0, -4.0]), f64::INFINITY).unwrap(),
            4.0,
            1e-14,
        );
        assert!(matches!(
            schatten_norm(&ComplexMatrix::identity(2), 0.5),
            Err(Error::BadExponent { .. })
        ));
    }

    #[test]
    fn schatten_seed_11_against_singular_values() {
        let a = draw(EnsembleKind::GeneralComplex, 4, 11);
        let sigma = singular_values(&a).unwrap();
        let direct: f64 = sigma.iter().map(|s| s.powf(1.5)).sum::<f64>().powf(2.0 / 3.0);
        assert_close(schatten_norm(&a, 1.5).unwrap(), direct, 1e-14);
        let hs = trace_of_product(&a.adjoint(), &a).re;
        assert_close(schatten_norm(&a, 2.0).unwrap().powi(2), hs, 1e-10);
        assert_close(
            schatten_norm(&a.scale(-2.5), 1.5).unwrap(),
            2.5 * schatten_norm(&a, 1.5).unwrap(),
            1e-12,
        );
    }

    #[test]
    fn positive_negative_parts_examples() {
        let (x, y) = positive_negative_parts(&ComplexMatrix::diag(&[2.0, -3.0])).unwrap();
        assert!(x.matrix().max_abs_diff(&ComplexMatrix::diag(&[2.0, 0.0])) < 1e-15);
        assert!(y.matrix().max_abs_diff(&ComplexMatrix::diag(&[0.0, 3.0])) < 1e-15);

        let psd = draw(EnsembleKind::Psd, 3, 4);
        let (_, y) = positive_negative_parts(&psd).unwrap();
        assert!(y.matrix().frobenius_norm() < 1e-12 * psd.frobenius_norm());

        let b = draw(EnsembleKind::Hermitian, 5, 9);
        let (x, y) = positive_negative_parts(&b).unwrap();
        assert!((x.matrix() - y.matrix()).relative_distance(&b) <= 1e-10);
        let abs = abs_matrix(&b).unwrap();
        assert!((x.matrix() + y.matrix()).relative_distance(abs.matrix()) <= 1e-10);
        let xy = x.matrix() * y.matrix();
        assert!(xy.frobenius_norm() <= 1e-10 * b.frobenius_norm().max(1.0));
    }

    #[test]
    fn json_rejects_bad_shapes() {
        assert!(ComplexMatrix::from_json(r#"{"dim":2,"entries":[[[1,0],[0,0]]]}"#).is_err());
        assert!(ComplexMatrix::from_json(r#"{"dim":2,"entries":[[[1,0]],[[0,0],[1,0]]]}"#).is_err());
        assert!(ComplexMatrix::from_json(r#"{"dim":1,"entries":[[[1e999,0]]]}"#).is_err());
        let m = ComplexMatrix::from_json(r#"{"dim":1,"entries":[[[1.5,-2]]]}"#).unwrap();
        assert_eq!(m.get(0, 0), c(1.5, -2.0));
    }

    #[test]
    fn flipped_matches_explicit_permutation() {
        let a = draw(EnsembleKind::GeneralComplex, 3, 1);
        let j =
            ComplexMatrix::from_real_rows(&[&[0.0, 0.0, 1.0], &[0.0, 1.0, 0.0], &[1.0, 0.0, 0.0]]).unwrap();
        assert_eq!(a.flipped(), &(&j * &a) * &j);
    }
}
