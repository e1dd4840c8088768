//! Commutative checkers: complex vectors standing in for functions (or diagonal matrices).

use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::report::{params, Claim, Direction, InequalityReport, Witness};

use super::{check_finite_p, p_direction};

fn lp_pow(v: impl Iterator<Item = f64>, p: f64) -> f64 {
    v.map(|x| x.powf(p)).sum()
}

fn check_pair(f: &[C64], g: &[C64]) -> Result<()> {
    if f.len() != g.len() {
        return Err(Error::LengthMismatch {
            left: f.len(),
            right: g.len(),
        });
    }
    if f.is_empty() {
        return Err(Error::DomainError("vectors must be nonempty".into()));
    }
    Ok(())
}

/// `‖f+g‖_p^p + ‖f−g‖_p^p`.
fn sum_difference_pow(f: &[C64], g: &[C64], p: f64) -> f64 {
    let plus = lp_pow(f.iter().zip(g).map(|(a, b)| (a + b).norm()), p);
    let minus = lp_pow(f.iter().zip(g).map(|(a, b)| (a - b).norm()), p);
    plus + minus
}

/// Moduli sorted nonincreasing: the discrete symmetric-decreasing rearrangement.
pub fn decreasing_rearrangement(f: &[C64]) -> Vec<C64> {
    let mut moduli: Vec<f64> = f.iter().map(|z| z.norm()).collect();
    moduli.sort_by(|a, b| b.total_cmp(a));
    moduli.into_iter().map(|x| C64::new(x, 0.0)).collect()
}

fn report(
    id: &str,
    f: &[C64],
    g: &[C64],
    p: f64,
    lhs: f64,
    rhs: f64,
    direction: Direction,
) -> InequalityReport {
    InequalityReport::new(
        id,
        params(&[("p", p)]),
        lhs,
        rhs,
        direction,
        Claim::Proved,
        Witness::vectors(&[("f", f), ("g", g)]),
    )
}

/// Hanner: `‖f+g‖^p + ‖f−g‖^p` vs `(‖f‖+‖g‖)^p + |‖f‖−‖g‖|^p`, `≥` for `p ≤ 2`, reversed above.
pub fn hanner_vector(f: &[C64], g: &[C64], p: f64) -> Result<InequalityReport> {
    check_pair(f, g)?;
    check_finite_p(p)?;
    let nf = lp_pow(f.iter().map(|z| z.norm()), p).powf(1.0 / p);
    let ng = lp_pow(g.iter().map(|z| z.norm()), p).powf(1.0 / p);
    let lhs = sum_difference_pow(f, g, p);
    let rhs = (nf + ng).powf(p) + (nf - ng).abs().powf(p);
    Ok(report("hanner_vector", f, g, p, lhs, rhs, p_direction(p)))
}

/// Replacing `f, g` by their decreasing rearrangements lowers the sum for `p ≤ 2`, raises it above.
pub fn rearrangement_vector(f: &[C64], g: &[C64], p: f64) -> Result<InequalityReport> {
    check_pair(f, g)?;
    check_finite_p(p)?;
    let lhs = sum_difference_pow(f, g, p);
    let rhs = sum_difference_pow(&decreasing_rearrangement(f), &decreasing_rearrangement(g), p);
    Ok(report("rearrangement_vector", f, g, p, lhs, rhs, p_direction(p)))
}

/// `‖f+g‖^p + ‖f−g‖^p ≤ 2‖f‖^p + 2‖g‖^p` for `p ≤ 2`, reversed above.
pub fn parallelogram_bound_vector(f: &[C64], g: &[C64], p: f64) -> Result<InequalityReport> {
    check_pair(f, g)?;
    check_finite_p(p)?;
    let lhs = sum_difference_pow(f, g, p);
    let rhs = 2.0 * lp_pow(f.iter().map(|z| z.norm()), p) + 2.0 * lp_pow(g.iter().map(|z| z.norm()), p);
    let direction = match p_direction(p) {
        Direction::LhsGeRhs => Direction::LhsLeRhs,
        Direction::LhsLeRhs => Direction::LhsGeRhs,
    };
    Ok(report("parallelogram_bound_vector", f, g, p, lhs, rhs, direction))
}

/// `c(t) = (a² + b² + 2abt)^{p/2} + (a² + b² − 2abt)^{p/2}` on `t ∈ [−1, 1]`.
pub fn scalar_curve(a: f64, b: f64, p: f64, t: f64) -> Result<f64> {
    if !(a >= 0.0 && b >= 0.0 && a.is_finite() && b.is_finite()) {
        return Err(Error::DomainError(format!(
            "a, b must be finite and >= 0, got {a}, {b}"
        )));
    }
    if !(-1.0..=1.0).contains(&t) {
        return Err(Error::DomainError(format!("t = {t} outside [-1, 1]")));
    }
    if !(p.is_finite() && p > 0.0) {
        return Err(Error::BadExponent {
            name: "p",
            value: p,
            expected: "finite p > 0",
        });
    }
    let base = a * a + b * b;
    let cross = 2.0 * a * b * t;
    let roundoff = 4.0 * f64::EPSILON * base;
    let term = |x: f64| -> Result<f64> {
        if x < -roundoff {
            return Err(Error::DomainError(format!("negative base {x:.3e}")));
        }
        Ok(x.max(0.0).powf(p / 2.0))
    };
    Ok(term(base + cross)? + term(base - cross)?)
}

/// Margin of the pointwise extremum property: `c(t) − c(1)` for `p < 2`, `c(1) − c(t)` for `p > 2`.
///
/// Nonnegative whenever the endpoints minimise (`p < 2`) or maximise (`p > 2`) the curve.
pub fn pointwise_margin(a: f64, b: f64, p: f64, t: f64) -> Result<f64> {
    let at_t = scalar_curve(a, b, p, t)?;
    let at_end = scalar_curve(a, b, p, 1.0)?;
    Ok(if p < 2.0 {
        at_t - at_end
    } else if p > 2.0 {
        at_end - at_t
    } else {
        0.0
    })
}
