//! Seeded random matrices for each hypothesis class.
//!
//! Constrained classes are generated in factor space: a sample keeps the
//! Gaussian factors it was built from, and both construction and
//! perturbation act on those factors, so `A ≥ B ≥ 0` or `A ≥ |B|` hold by
//! construction rather than by projection.
//!
//! Randomness is pinned for cross-platform reproducibility:
//!
//! * generator: ChaCha20 (`rand_chacha`), keyed by `seed_from_u64(seed)`,
//!   with `set_stream(stream)` as the stream-split function;
//! * uniforms: `u1 = ((x >> 11) + 1) · 2^-53 ∈ (0, 1]`, `u2 = (y >> 11) · 2^-53`;
//! * normals: Box–Muller `(r cos θ, r sin θ)`, `r = √(−2 ln u1)`, `θ = 2π u2`,
//!   evaluated with the `libm` implementations of `log`, `sin`, `cos`;
//! * complex normal: `(x + iy) / √2` from one Box–Muller pair;
//! * matrices are filled row-major.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{abs_matrix, ComplexMatrix, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleKind {
    GeneralComplex,
    Hermitian,
    Psd,
    OrderedPair,
    DominatedPair,
    DiagonalPsd,
    Unitary,
}

impl EnsembleKind {
    pub const ALL: [EnsembleKind; 7] = [
        EnsembleKind::GeneralComplex,
        EnsembleKind::Hermitian,
        EnsembleKind::Psd,
        EnsembleKind::OrderedPair,
        EnsembleKind::DominatedPair,
        EnsembleKind::DiagonalPsd,
        EnsembleKind::Unitary,
    ];

    /// Matrices produced by one draw of a pair kind; single kinds produce `count`.
    pub fn is_pair(self) -> bool {
        matches!(self, EnsembleKind::OrderedPair | EnsembleKind::DominatedPair)
    }

    pub fn name(self) -> &'static str {
        match self {
            EnsembleKind::GeneralComplex => "general_complex",
            EnsembleKind::Hermitian => "hermitian",
            EnsembleKind::Psd => "psd",
            EnsembleKind::OrderedPair => "ordered_pair",
            EnsembleKind::DominatedPair => "dominated_pair",
            EnsembleKind::DiagonalPsd => "diagonal_psd",
            EnsembleKind::Unitary => "unitary",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == name)
            .ok_or_else(|| Error::BadSpec(format!("unknown ensemble kind `{name}`")))
    }
}

fn one() -> f64 {
    1.0
}

fn one_count() -> usize {
    1
}

fn is_zero(v: &u64) -> bool {
    *v == 0
}

fn is_one_count(v: &usize) -> bool {
    *v == 1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub dim: usize,
    pub seed: u64,
    /// Substream index; `(seed, stream)` identifies an independent generator.
    #[serde(default, skip_serializing_if = "is_zero")]
    pub stream: u64,
    /// Standard deviation of the Gaussian factor entries.
    #[serde(default = "one")]
    pub scale: f64,
    /// Number of independent matrices drawn for single kinds; pair kinds ignore it.
    #[serde(default = "one_count", skip_serializing_if = "is_one_count")]
    pub count: usize,
}

impl EnsembleSpec {
    pub fn new(kind: EnsembleKind, dim: usize, seed: u64) -> Self {
        Self {
            kind,
            dim,
            seed,
            stream: 0,
            scale: 1.0,
            count: 1,
        }
    }

    pub fn with_stream(mut self, stream: u64) -> Self {
        self.stream = stream;
        self
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn with_count(mut self, count: usize) -> Self {
        self.count = count;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::BadSpec("dim must be >= 1".into()));
        }
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(Error::BadSpec(format!(
                "scale must be positive, got {}",
                self.scale
            )));
        }
        if self.count == 0 {
            return Err(Error::BadSpec("count must be >= 1".into()));
        }
        Ok(())
    }

    /// Matrices per draw.
    pub fn arity(&self) -> usize {
        if self.kind.is_pair() {
            2
        } else {
            self.count
        }
    }
}

/// Pinned Gaussian source over one ChaCha20 substream.
#[derive(Clone, Debug)]
pub struct GaussianStream {
    rng: ChaCha20Rng,
}

const TWO_POW_NEG_53: f64 = 1.0 / 9_007_199_254_740_992.0;

impl GaussianStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { rng }
    }

    /// One Box–Muller pair of independent standard normals.
    pub fn normal_pair(&mut self) -> (f64, f64) {
        let u1 = ((self.rng.next_u64() >> 11) + 1) as f64 * TWO_POW_NEG_53;
        let u2 = (self.rng.next_u64() >> 11) as f64 * TWO_POW_NEG_53;
        let r = libm::sqrt(-2.0 * libm::log(u1));
        let theta = 2.0 * std::f64::consts::PI * u2;
        (r * libm::cos(theta), r * libm::sin(theta))
    }

    /// `(x + iy) / √2`, unit variance.
    pub fn complex_normal(&mut self) -> C64 {
        let (x, y) = self.normal_pair();
        C64::new(x, y) * std::f64::consts::FRAC_1_SQRT_2
    }

    /// `n` real standard normals; the second value of an odd final pair is discarded.
    pub fn real_normals(&mut self, n: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(n + 1);
        while out.len() < n {
            let (x, y) = self.normal_pair();
            out.push(x);
            out.push(y);
        }
        out.truncate(n);
        out
    }

    /// `n×n` matrix of i.i.d. complex normals with standard deviation `scale`, row-major.
    pub fn gaussian_matrix(&mut self, n: usize, scale: f64) -> ComplexMatrix {
        let mut entries = Vec::with_capacity(n * n);
        for _ in 0..n * n {
            entries.push(self.complex_normal() * scale);
        }
        ComplexMatrix::wrap(nalgebra::DMatrix::from_row_slice(n, n, &entries))
    }

    fn real_diagonal_factor(&mut self, n: usize, scale: f64) -> ComplexMatrix {
        let values: Vec<f64> = self.real_normals(n).into_iter().map(|x| x * scale).collect();
        ComplexMatrix::diag(&values)
    }
}

/// One draw: the Gaussian factors and the matrices derived from them.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub spec: EnsembleSpec,
    pub factors: Vec<ComplexMatrix>,
    pub matrices: Vec<ComplexMatrix>,
}

impl Sample {
    pub fn pair(&self) -> (&ComplexMatrix, &ComplexMatrix) {
        (&self.matrices[0], &self.matrices[1])
    }
}

/// Draws from a fresh generator at `(spec.seed, spec.stream)`.
pub fn sample(spec: &EnsembleSpec) -> Result<Sample> {
    let mut stream = GaussianStream::new(spec.seed, spec.stream);
    sample_from(spec, &mut stream)
}

/// Draws using an existing generator (the hunter keeps one stream per restart).
pub fn sample_from(spec: &EnsembleSpec, stream: &mut GaussianStream) -> Result<Sample> {
    spec.validate()?;
    let n = spec.dim;
    let factor_count = if spec.kind.is_pair() { 2 } else { spec.count };
    let factors: Vec<ComplexMatrix> = (0..factor_count)
        .map(|_| match spec.kind {
            EnsembleKind::DiagonalPsd => stream.real_diagonal_factor(n, spec.scale),
            _ => stream.gaussian_matrix(n, spec.scale),
        })
        .collect();
    let matrices = derive(spec.kind, &factors)?;
    Ok(Sample {
        spec: spec.clone(),
        factors,
        matrices,
    })
}

/// Moves every factor by `magnitude · scale` times a fresh Gaussian and re-derives the matrices.
///
/// The result stays in the sample's hypothesis class exactly. A zero
/// magnitude returns the input unchanged and consumes no randomness.
pub fn perturb(sample: &Sample, magnitude: f64, stream: &mut GaussianStream) -> Result<Sample> {
    if !(magnitude.is_finite() && magnitude >= 0.0) {
        return Err(Error::BadSpec(format!(
            "perturbation magnitude must be >= 0, got {magnitude}"
        )));
    }
    if magnitude == 0.0 {
        return Ok(sample.clone());
    }
    let n = sample.spec.dim;
    let step = magnitude * sample.spec.scale;
    let factors: Vec<ComplexMatrix> = sample
        .factors
        .iter()
        .map(|f| {
            let noise = match sample.spec.kind {
                EnsembleKind::DiagonalPsd => stream.real_diagonal_factor(n, step),
                _ => stream.gaussian_matrix(n, step),
            };
            f + &noise
        })
        .collect();
    let matrices = derive(sample.spec.kind, &factors)?;
    Ok(Sample {
        spec: sample.spec.clone(),
        factors,
        matrices,
    })
}

fn gram(g: &ComplexMatrix) -> ComplexMatrix {
    (&g.adjoint() * g).symmetrized()
}

fn derive(kind: EnsembleKind, factors: &[ComplexMatrix]) -> Result<Vec<ComplexMatrix>> {
    Ok(match kind {
        EnsembleKind::GeneralComplex => factors.to_vec(),
        EnsembleKind::Hermitian => factors.iter().map(|g| g.symmetrized()).collect(),
        EnsembleKind::Psd => factors.iter().map(gram).collect(),
        EnsembleKind::Unitary => factors.iter().map(orthonormalize).collect::<Result<_>>()?,
        EnsembleKind::DiagonalPsd => factors
            .iter()
            .map(|d| {
                let mut values: Vec<f64> = d.real_diagonal().iter().map(|x| x.abs()).collect();
                values.sort_by(|a, b| b.total_cmp(a));
                ComplexMatrix::diag(&values)
            })
            .collect(),
        EnsembleKind::OrderedPair => {
            let b = gram(&factors[0]);
            let a = &b + &gram(&factors[1]);
            vec![a, b]
        }
        EnsembleKind::DominatedPair => {
            let b = factors[0].symmetrized();
            let a = abs_matrix(&b)?.matrix() + &gram(&factors[1]);
            vec![a, b]
        }
    })
}

/// Modified Gram–Schmidt on the columns; each column's first nonzero entry is made real positive.
fn orthonormalize(g: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = g.dim();
    let mut q = g.as_dmatrix().clone();
    for j in 0..n {
        for k in 0..j {
            let proj = q.column(k).dotc(&q.column(j));
            let qk = q.column(k).clone_owned();
            q.column_mut(j).axpy(-proj, &qk, C64::new(1.0, 0.0));
        }
        let norm = q.column(j).norm();
        if !(norm > 1e-300) {
            return Err(Error::BadSpec("rank-deficient Gaussian factor".into()));
        }
        q.column_mut(j).unscale_mut(norm);
        if let Some(i) = q.column(j).iter().position(|z| z.norm() != 0.0) {
            let first = q[(i, j)];
            let phase = first.conj() / first.norm();
            for z in q.column_mut(j).iter_mut() {
                *z *= phase;
            }
            q[(i, j)] = C64::new(first.norm(), 0.0);
        }
    }
    ComplexMatrix::from_dmatrix(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eig_hermitian, min_eigenvalue};

    #[test]
    fn psd_sample_is_psd() {
        let s = sample(&EnsembleSpec::new(EnsembleKind::Psd, 4, 7)).unwrap();
        assert!(min_eigenvalue(&s.matrices[0]).unwrap() >= 0.0 - 1e-12);
    }

    #[test]
    fn ordered_pair_is_ordered() {
        let s = sample(&EnsembleSpec::new(EnsembleKind::OrderedPair, 5, 11)).unwrap();
        let (a, b) = s.pair();
        let scale = a.frobenius_norm();
        assert!(min_eigenvalue(&(a - b)).unwrap() >= -1e-12 * scale);
        assert!(min_eigenvalue(b).unwrap() >= -1e-12 * scale);
    }

    #[test]
    fn dominated_pair_is_dominated() {
        let s = sample(&EnsembleSpec::new(EnsembleKind::DominatedPair, 4, 13)).unwrap();
        let (a, b) = s.pair();
        let abs_b = abs_matrix(b).unwrap();
        let gap = min_eigenvalue(&(a - abs_b.matrix())).unwrap();
        assert!(gap >= -1e-12 * a.frobenius_norm(), "gap {gap}");
    }

    #[test]
    fn unitary_is_unitary_with_phase_convention() {
        let s = sample(&EnsembleSpec::new(EnsembleKind::Unitary, 5, 3)).unwrap();
        let u = &s.matrices[0];
        let gram = &u.adjoint() * u;
        assert!(gram.max_abs_diff(&ComplexMatrix::identity(5)) < 1e-13);
        for j in 0..5 {
            let z = u.get(0, j);
            assert!(z.im == 0.0 && z.re > 0.0, "column {j} phase {z}");
        }
    }

    #[test]
    fn diagonal_psd_is_sorted_nonnegative() {
        let s = sample(&EnsembleSpec::new(EnsembleKind::DiagonalPsd, 6, 1)).unwrap();
        let d = s.matrices[0].real_diagonal();
        assert!(d.windows(2).all(|w| w[0] >= w[1]));
        assert!(d.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn identical_specs_give_identical_bytes() {
        for kind in EnsembleKind::ALL {
            let spec = EnsembleSpec::new(kind, 4, 99).with_stream(5);
            let a = sample(&spec).unwrap();
            let b = sample(&spec).unwrap();
            let ja: Vec<String> = a.matrices.iter().map(|m| m.to_json()).collect();
            let jb: Vec<String> = b.matrices.iter().map(|m| m.to_json()).collect();
            assert_eq!(ja, jb);
        }
    }

    #[test]
    fn streams_are_independent() {
        let a = sample(&EnsembleSpec::new(EnsembleKind::GeneralComplex, 3, 1)).unwrap();
        let b = sample(&EnsembleSpec::new(EnsembleKind::GeneralComplex, 3, 1).with_stream(1)).unwrap();
        assert_ne!(a.matrices[0], b.matrices[0]);
    }

    #[test]
    fn scale_covariance() {
        let c = 2.5;
        for kind in [EnsembleKind::GeneralComplex, EnsembleKind::Hermitian] {
            let base = sample(&EnsembleSpec::new(kind, 4, 21)).unwrap();
            let scaled = sample(&EnsembleSpec::new(kind, 4, 21).with_scale(c)).unwrap();
            let expected = base.matrices[0].scale(c);
            assert!(scaled.matrices[0].max_abs_diff(&expected) <= 1e-15 * expected.frobenius_norm());
        }
        let base = sample(&EnsembleSpec::new(EnsembleKind::Psd, 4, 21)).unwrap();
        let scaled = sample(&EnsembleSpec::new(EnsembleKind::Psd, 4, 21).with_scale(c)).unwrap();
        let expected = base.matrices[0].scale(c * c);
        assert!(scaled.matrices[0].max_abs_diff(&expected) <= 1e-14 * expected.frobenius_norm());
    }

    #[test]
    fn zero_perturbation_is_identity() {
        let s = sample(&EnsembleSpec::new(EnsembleKind::DominatedPair, 4, 2)).unwrap();
        let mut stream = GaussianStream::new(0, 0);
        let p = perturb(&s, 0.0, &mut stream).unwrap();
        assert_eq!(p, s);
    }

    #[test]
    fn psd_perturbation_stays_psd() {
        let s = sample(&EnsembleSpec::new(EnsembleKind::Psd, 5, 4)).unwrap();
        let mut stream = GaussianStream::new(4, 1);
        for mag in [0.01, 0.5, 3.0] {
            let p = perturb(&s, mag, &mut stream).unwrap();
            let l = eig_hermitian(&p.matrices[0]).unwrap();
            assert!(*l.eigenvalues.last().unwrap() >= -1e-12 * l.eigenvalues[0]);
        }
    }

    #[test]
    fn dominated_pair_perturbation_stays_dominated() {
        let s = sample(&EnsembleSpec::new(EnsembleKind::DominatedPair, 4, 17)).unwrap();
        let mut stream = GaussianStream::new(17, 9);
        let p = perturb(&s, 0.1, &mut stream).unwrap();
        let (a, b) = p.pair();
        let gap = min_eigenvalue(&(a - abs_matrix(b).unwrap().matrix())).unwrap();
        assert!(gap >= -1e-12 * a.frobenius_norm());
        assert_ne!(p.matrices, s.matrices);
    }

    #[test]
    fn bad_specs_rejected() {
        assert!(sample(&EnsembleSpec::new(EnsembleKind::Psd, 0, 1)).is_err());
        assert!(sample(&EnsembleSpec::new(EnsembleKind::Psd, 2, 1).with_scale(0.0)).is_err());
        assert!(sample(&EnsembleSpec::new(EnsembleKind::Psd, 2, 1).with_count(0)).is_err());
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = EnsembleSpec::new(EnsembleKind::OrderedPair, 3, u64::MAX).with_stream(7);
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<EnsembleSpec>(&text).unwrap(), spec);
        assert!(text.contains("\"ordered_pair\""));
    }
}
