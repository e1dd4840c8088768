//! Quadrature realisation of `C^p = k_p ∫₀^∞ (C/t² − I/t + (t+C)^{-1}) t^p dt` for `1 < p < 2`.
//!
//! The integrand is evaluated in the algebraically equivalent form
//! `t^{p−2} C² (t+C)^{-1}`, which avoids the cancellation between the three
//! terms for small and large `t`. After `t = e^u` the integrand on the `u`
//! axis is `e^{u(p−1)} C² (e^u + C)^{-1}`, which decays exponentially at both
//! ends. The resolvent is obtained by an LU solve, independent of any
//! eigendecomposition.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, PsdMatrix, C64};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureConfig {
    /// Gauss–Legendre panels on `[u_min, u_max]`.
    pub panels: usize,
    pub u_min: f64,
    pub u_max: f64,
    pub target_rel_error: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            panels: 256,
            u_min: -100.0,
            u_max: 100.0,
            target_rel_error: 1e-8,
        }
    }
}

/// Points per panel.
pub const GAUSS_ORDER: usize = 8;

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.u_min.is_finite() && self.u_max.is_finite() && self.u_min < self.u_max) {
            return Err(Error::BadSpec(format!(
                "quadrature range [{}, {}] is empty",
                self.u_min, self.u_max
            )));
        }
        if self.panels < 4 {
            return Err(Error::BadSpec(format!(
                "panels must be >= 4, got {}",
                self.panels
            )));
        }
        if !(self.target_rel_error > 0.0) {
            return Err(Error::BadSpec(format!(
                "target_rel_error must be > 0, got {}",
                self.target_rel_error
            )));
        }
        Ok(())
    }

    /// All quadrature nodes on the `u` axis with their weights, in summation order.
    fn nodes(&self) -> Vec<(f64, f64)> {
        let (x, w) = gauss_legendre(GAUSS_ORDER);
        let h = (self.u_max - self.u_min) / self.panels as f64;
        let mut out = Vec::with_capacity(self.panels * GAUSS_ORDER);
        for k in 0..self.panels {
            let mid = self.u_min + (k as f64 + 0.5) * h;
            for (xi, wi) in x.iter().zip(&w) {
                out.push((mid + 0.5 * h * xi, 0.5 * h * wi));
            }
        }
        out
    }
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`, by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let dp = legendre(n, x).1;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn check_open_p(p: f64) -> Result<()> {
    if !(p > 1.0 && p < 2.0) {
        return Err(Error::BadExponent {
            name: "p",
            value: p,
            expected: "1 < p < 2",
        });
    }
    Ok(())
}

/// `∫ e^{u(p−1)} c² / (e^u + c) du` over the configured range.
fn scalar_integral(c: f64, p: f64, cfg: &QuadratureConfig) -> f64 {
    cfg.nodes()
        .into_iter()
        .map(|(u, w)| {
            let t = u.exp();
            w * (u * (p - 1.0)).exp() * c * c / (t + c)
        })
        .sum()
}

/// `k_p` by quadrature of the `c = 1` integrand with the default configuration.
pub fn kp_constant(p: f64) -> Result<f64> {
    kp_constant_with(p, &QuadratureConfig::default())
}

/// `k_p` by quadrature of the `c = 1` integrand with `cfg`.
pub fn kp_constant_with(p: f64, cfg: &QuadratureConfig) -> Result<f64> {
    check_open_p(p)?;
    cfg.validate()?;
    Ok(1.0 / scalar_integral(1.0, p, cfg))
}

/// Closed form `sin((p−1)π)/π`, used only as a cross-check.
pub fn kp_closed_form(p: f64) -> f64 {
    ((p - 1.0) * std::f64::consts::PI).sin() / std::f64::consts::PI
}

/// Scalar version: `k_p ∫ …` at eigenvalue `c > 0`, approximating `c^p`.
pub fn scalar_power_via_integral(c: f64, p: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::SingularMatrix(c));
    }
    Ok(kp_constant_with(p, cfg)? * scalar_integral(c, p, cfg))
}

/// Estimated mass outside `[u_min, u_max]`, scaled by `k_p`, for a matrix of Frobenius norm `norm`.
pub fn tail_estimate(norm: f64, p: f64, cfg: &QuadratureConfig, kp: f64) -> f64 {
    let lower = norm * (cfg.u_min * (p - 1.0)).exp() / (p - 1.0);
    let upper = norm * norm * (cfg.u_max * (p - 2.0)).exp() / (2.0 - p);
    kp * (lower + upper)
}

/// `C^p` by quadrature of the integral representation.
///
/// The result is returned as computed (no symmetrization).
pub fn matrix_power_via_integral(c: &PsdMatrix, p: f64, cfg: &QuadratureConfig) -> Result<ComplexMatrix> {
    check_open_p(p)?;
    cfg.validate()?;
    let lambda_min = c.lambda_min();
    if !(lambda_min > 0.0) {
        return Err(Error::SingularMatrix(lambda_min));
    }
    let kp = kp_constant_with(p, cfg)?;
    let m = c.matrix().as_dmatrix();
    let n = m.nrows();
    let c2 = m * m;
    let mut total = DMatrix::<C64>::zeros(n, n);
    for (u, w) in cfg.nodes() {
        let t = u.exp();
        let shifted = m + DMatrix::<C64>::identity(n, n).scale(t);
        let solved = shifted
            .lu()
            .solve(&c2)
            .ok_or(Error::SingularMatrix(t + lambda_min))?;
        total += solved * C64::new(w * (u * (p - 1.0)).exp(), 0.0);
    }
    let result = total * C64::new(kp, 0.0);
    let norm = result.norm();
    let tail = tail_estimate(m.norm(), p, cfg, kp) / norm.max(f64::MIN_POSITIVE);
    if tail > cfg.target_rel_error {
        return Err(Error::TruncationError {
            tail,
            target: cfg.target_rel_error,
        });
    }
    ComplexMatrix::from_dmatrix(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{sample, EnsembleKind, EnsembleSpec};
    use crate::linalg::matrix_power;

    fn positive_definite(dim: usize, seed: u64) -> PsdMatrix {
        let g = sample(&EnsembleSpec::new(EnsembleKind::Psd, dim, seed))
            .unwrap()
            .matrices[0]
            .clone();
        PsdMatrix::new(&g + &ComplexMatrix::identity(dim).scale(0.1)).unwrap()
    }

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(GAUSS_ORDER);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        for deg in 0..(2 * GAUSS_ORDER) {
            let exact = if deg % 2 == 1 {
                0.0
            } else {
                2.0 / (deg as f64 + 1.0)
            };
            let q: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(deg as i32)).sum();
            assert!((q - exact).abs() < 1e-14, "deg {deg}: {q} vs {exact}");
        }
        assert!(x.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn kp_matches_closed_form() {
        for p in [1.25, 1.5, 1.75] {
            let kp = kp_constant(p).unwrap();
            assert!((kp - kp_closed_form(p)).abs() < 1e-10, "p={p}: {kp}");
        }
        assert!((kp_constant(1.5).unwrap() - 1.0 / std::f64::consts::PI).abs() < 1e-10);
        assert!((kp_constant(1.2).unwrap() - kp_constant(1.8).unwrap()).abs() < 1e-8);
        for p in [1.0, 2.0, 0.5, f64::NAN] {
            assert!(matches!(kp_constant(p), Err(Error::BadExponent { .. })));
        }
    }

    #[test]
    fn scalar_consistency_at_c_4() {
        let cfg = QuadratureConfig::default();
        for p in [1.25, 1.75] {
            let v = scalar_power_via_integral(4.0, p, &cfg).unwrap();
            let exact = 4f64.powf(p);
            assert!(
                (v - exact).abs() <= cfg.target_rel_error * exact,
                "p={p}: {v} vs {exact}"
            );
        }
    }

    #[test]
    fn identity_maps_to_identity() {
        let id = PsdMatrix::new(ComplexMatrix::identity(3)).unwrap();
        let r = matrix_power_via_integral(&id, 1.5, &QuadratureConfig::default()).unwrap();
        assert!(r.max_abs_diff(&ComplexMatrix::identity(3)) < 1e-12);
    }

    #[test]
    fn diag_4_1_to_the_three_halves() {
        let c = PsdMatrix::new(ComplexMatrix::diag(&[4.0, 1.0])).unwrap();
        let r = matrix_power_via_integral(&c, 1.5, &QuadratureConfig::default()).unwrap();
        assert!(r.relative_distance(&ComplexMatrix::diag(&[8.0, 1.0])) < 1e-6);
    }

    #[test]
    fn random_seed_73_matches_spectral_power() {
        let c = positive_definite(4, 73);
        let r = matrix_power_via_integral(&c, 1.25, &QuadratureConfig::default()).unwrap();
        let oracle = matrix_power(&c, 1.25).unwrap();
        assert!(r.relative_distance(oracle.matrix()) < 1e-6);
        assert!(r.hermitian_deviation() <= 1e-10 * r.frobenius_norm());
    }

    #[test]
    fn refinement_reduces_error() {
        for seed in [1, 2, 3] {
            let c = positive_definite(3, seed);
            let oracle = matrix_power(&c, 1.5).unwrap();
            let errors: Vec<f64> = [8, 16, 32]
                .iter()
                .map(|&panels| {
                    let cfg = QuadratureConfig {
                        panels,
                        ..QuadratureConfig::default()
                    };
                    matrix_power_via_integral(&c, 1.5, &cfg)
                        .unwrap()
                        .relative_distance(oracle.matrix())
                })
                .collect();
            assert!(
                errors[0] > errors[1] && errors[1] > errors[2],
                "seed {seed}: {errors:?}"
            );
        }
    }

    #[test]
    fn rejects_singular_and_truncated() {
        let c = PsdMatrix::new(ComplexMatrix::diag(&[1.0, 0.0])).unwrap();
        assert!(matches!(
            matrix_power_via_integral(&c, 1.5, &QuadratureConfig::default()),
            Err(Error::SingularMatrix(_))
        ));
        let narrow = QuadratureConfig {
            u_min: -5.0,
            u_max: 5.0,
            ..QuadratureConfig::default()
        };
        let c = positive_definite(2, 4);
        assert!(matches!(
            matrix_power_via_integral(&c, 1.5, &narrow),
            Err(Error::TruncationError { .. })
        ));
        let bad = QuadratureConfig {
            panels: 2,
            ..QuadratureConfig::default()
        };
        assert!(matches!(
            matrix_power_via_integral(&c, 1.5, &bad),
            Err(Error::BadSpec(_))
        ));
    }
}
