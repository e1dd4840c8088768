//! Trace inequalities for pairs of positive semidefinite matrices: the
//! rearrangement bounds for `Tr(B^r (B^{1/2} A B^{1/2})^s)`, Lieb–Thirring, its
//! reverse at `s = 1/2`, and probes of the open cases.

use crate::error::{Error, Result};
use crate::linalg::{matrix_power, trace_of_product, ComplexMatrix, PsdMatrix};
use crate::report::{params, Claim, Direction, InequalityReport, Witness};

use super::same_dim;

fn check_r(r: f64, strictly_positive: bool) -> Result<()> {
    let ok = r.is_finite() && if strictly_positive { r > 0.0 } else { r >= 0.0 };
    if !ok {
        return Err(Error::BadExponent {
            name: "r",
            value: r,
            expected: if strictly_positive {
                "finite r > 0"
            } else {
                "finite r >= 0"
            },
        });
    }
    Ok(())
}

fn check_s_at_least_one(s: f64) -> Result<()> {
    if !(s.is_finite() && s >= 1.0) {
        return Err(Error::BadExponent {
            name: "s",
            value: s,
            expected: "finite s >= 1",
        });
    }
    Ok(())
}

fn scale_of(a: &PsdMatrix, b: &PsdMatrix) -> f64 {
    a.lambda_max().max(1.0) * b.lambda_max().max(1.0)
}

/// `B^{1/2} A B^{1/2}`.
pub fn sandwich(a: &PsdMatrix, b: &PsdMatrix) -> Result<PsdMatrix> {
    let half = matrix_power(b, 0.5)?;
    let product = &(half.matrix() * a.matrix()) * half.matrix();
    PsdMatrix::from_computed(&product, scale_of(a, b))
}

/// `Tr(B^r (B^{1/2} A B^{1/2})^s)`.
fn weighted_sandwich_trace(a: &PsdMatrix, b: &PsdMatrix, r: f64, s: f64) -> Result<f64> {
    let inner = matrix_power(&sandwich(a, b)?, s)?;
    if r == 0.0 {
        // B^0 is the support projection of B, which fixes the range of the sandwich.
        return Ok(inner.trace_power(1.0));
    }
    let weight = matrix_power(b, r)?;
    Ok(trace_of_product(weight.matrix(), inner.matrix()).re)
}

/// `Tr(X^s Y^t)`.
fn power_product_trace(x: &PsdMatrix, y: &PsdMatrix, s: f64, t: f64) -> Result<f64> {
    Ok(trace_of_product(matrix_power(x, s)?.matrix(), matrix_power(y, t)?.matrix()).re)
}

/// `Σ a_i^s b_i^{s+r}` with `a` nonincreasing and `b` taken in the given order.
fn rearranged_trace(a: &[f64], b: impl Iterator<Item = f64>, r: f64, s: f64) -> f64 {
    a.iter().zip(b).map(|(&x, y)| pow0(x, s) * pow0(y, s + r)).sum()
}

fn pow0(x: f64, q: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.powf(q)
    }
}

fn psd_witness(names: [&str; 2], a: &PsdMatrix, b: &PsdMatrix) -> Witness {
    Witness::matrices(&[(names[0], a.matrix()), (names[1], b.matrix())])
}

/// `Tr(B^r (B^{1/2} A B^{1/2})^s) ≥ Tr(Σ↑(A)^s Σ↓(B)^{s+r})` for `r ≥ 0`, real `s ≥ 1`.
pub fn updown1(a: &PsdMatrix, b: &PsdMatrix, r: f64, s: f64) -> Result<InequalityReport> {
    same_dim(a.matrix(), b.matrix())?;
    check_r(r, false)?;
    check_s_at_least_one(s)?;
    let lhs = weighted_sandwich_trace(a, b, r, s)?;
    let rhs = rearranged_trace(a.eigenvalues(), b.eigenvalues().iter().rev().copied(), r, s);
    Ok(InequalityReport::new(
        "updown1",
        params(&[("r", r), ("s", s)]),
        lhs,
        rhs,
        Direction::LhsGeRhs,
        Claim::Proved,
        psd_witness(["A", "B"], a, b),
    ))
}

/// `Tr(Σ↑(A)^s Σ↑(B)^{s+r}) ≥ Tr(B^r (B^{1/2} A B^{1/2})^s)` for `r ≥ 0` and integer `s ≥ 1`.
pub fn updown2(a: &PsdMatrix, b: &PsdMatrix, r: f64, s: f64) -> Result<InequalityReport> {
    same_dim(a.matrix(), b.matrix())?;
    check_r(r, false)?;
    if !s.is_finite() {
        return Err(Error::BadExponent {
            name: "s",
            value: s,
            expected: "integer s >= 1",
        });
    }
    if s < 1.0 || s.fract() != 0.0 {
        return Err(Error::NonIntegerS(s));
    }
    let lhs = rearranged_trace(a.eigenvalues(), b.eigenvalues().iter().copied(), r, s);
    let rhs = weighted_sandwich_trace(a, b, r, s)?;
    Ok(InequalityReport::new(
        "updown2",
        params(&[("r", r), ("s", s)]),
        lhs,
        rhs,
        Direction::LhsGeRhs,
        Claim::Proved,
        psd_witness(["A", "B"], a, b),
    ))
}

/// Lieb–Thirring: `Tr(X^s Y^s) ≥ Tr((Y^{1/2} X Y^{1/2})^s)` for `s ≥ 1`.
pub fn lieb_thirring(x: &PsdMatrix, y: &PsdMatrix, s: f64) -> Result<InequalityReport> {
    same_dim(x.matrix(), y.matrix())?;
    check_s_at_least_one(s)?;
    let lhs = power_product_trace(x, y, s, s)?;
    let rhs = sandwich(x, y)?.trace_power(s);
    Ok(InequalityReport::new(
        "lieb_thirring",
        params(&[("s", s)]),
        lhs,
        rhs,
        Direction::LhsGeRhs,
        Claim::Proved,
        psd_witness(["X", "Y"], x, y),
    ))
}

/// `Tr((B^{1/2} A B^{1/2})^s)` against `Tr(A^s B^s)`, without validating `s`.
fn reverse_lt_sides(a: &PsdMatrix, b: &PsdMatrix, s: f64) -> Result<(f64, f64)> {
    same_dim(a.matrix(), b.matrix())?;
    Ok((sandwich(a, b)?.trace_power(s), power_product_trace(a, b, s, s)?))
}

/// `Tr((B^{1/2} A B^{1/2})^{1/2}) ≥ Tr(A^{1/2} B^{1/2})`.
pub fn reverse_lt_half(a: &PsdMatrix, b: &PsdMatrix) -> Result<InequalityReport> {
    let (lhs, rhs) = reverse_lt_sides(a, b, 0.5)?;
    Ok(InequalityReport::new(
        "reverse_lt_half",
        params(&[("s", 0.5)]),
        lhs,
        rhs,
        Direction::LhsGeRhs,
        Claim::Proved,
        psd_witness(["A", "B"], a, b),
    ))
}

/// Open case `1/2 < s < 1` of the reversed Lieb–Thirring inequality.
pub fn rev_probe(a: &PsdMatrix, b: &PsdMatrix, s: f64) -> Result<InequalityReport> {
    if !(s > 0.5 && s < 1.0) {
        return Err(Error::BadExponent {
            name: "s",
            value: s,
            expected: "1/2 < s < 1",
        });
    }
    let (lhs, rhs) = reverse_lt_sides(a, b, s)?;
    Ok(InequalityReport::new(
        "rev_probe",
        params(&[("s", s)]),
        lhs,
        rhs,
        Direction::LhsGeRhs,
        Claim::Conjecture,
        psd_witness(["A", "B"], a, b),
    ))
}

/// Id of the deliberately false hunting target used to validate the hunter.
pub const PLANTED_REVERSE_ID: &str = "planted_reverse_lt";

/// The reversed Lieb–Thirring orientation evaluated at any `s > 0`.
///
/// For `s > 1` this is generically false (Lieb–Thirring forces the
/// opposite), which makes it a planted target for the hunter.
pub fn planted_reverse_lt(a: &PsdMatrix, b: &PsdMatrix, s: f64) -> Result<InequalityReport> {
    if !(s.is_finite() && s > 0.0) {
        return Err(Error::BadExponent {
            name: "s",
            value: s,
            expected: "finite s > 0",
        });
    }
    let (lhs, rhs) = reverse_lt_sides(a, b, s)?;
    Ok(InequalityReport::new(
        PLANTED_REVERSE_ID,
        params(&[("s", s)]),
        lhs,
        rhs,
        Direction::LhsGeRhs,
        Claim::Conjecture,
        psd_witness(["A", "B"], a, b),
    ))
}

/// Open generalisation `Tr(X^s Y^{s+r}) ≥ Tr(Y^r (Y^{1/2} X Y^{1/2})^s)`, `r > 0`, `s ≥ 1`.
pub fn liebth2_probe(x: &PsdMatrix, y: &PsdMatrix, r: f64, s: f64) -> Result<InequalityReport> {
    same_dim(x.matrix(), y.matrix())?;
    check_r(r, true)?;
    check_s_at_least_one(s)?;
    let lhs = power_product_trace(x, y, s, s + r)?;
    let rhs = weighted_sandwich_trace(x, y, r, s)?;
    Ok(InequalityReport::new(
        "liebth2_probe",
        params(&[("r", r), ("s", s)]),
        lhs,
        rhs,
        Direction::LhsGeRhs,
        Claim::Conjecture,
        psd_witness(["X", "Y"], x, y),
    )
    .with_flag("integer_s", s.fract() == 0.0))
}

/// `f_s(A) = Tr((B^{1/2} A^{1/s} B^{1/2})^s)`.
pub fn epstein_function(b: &PsdMatrix, a: &PsdMatrix, s: f64) -> Result<f64> {
    if !(s.is_finite() && s > 0.0) {
        return Err(Error::BadExponent {
            name: "s",
            value: s,
            expected: "finite s > 0",
        });
    }
    Ok(sandwich(&matrix_power(a, 1.0 / s)?, b)?.trace_power(s))
}

/// Midpoint test of `f_s` along the segment `λA1 + (1−λ)A2`.
///
/// Concavity mode for `s ≥ 1` (`f(mix) ≥ λf(A1) + (1−λ)f(A2)`), convexity
/// mode for `1/2 ≤ s < 1` (reversed). Proved at `s ≥ 1` and `s = 1/2`; the
/// open interval `1/2 < s < 1` is reported as a conjecture.
pub fn epstein_probe(
    b: &PsdMatrix,
    s: f64,
    a1: &PsdMatrix,
    a2: &PsdMatrix,
    lambda: f64,
) -> Result<InequalityReport> {
    same_dim(b.matrix(), a1.matrix())?;
    same_dim(b.matrix(), a2.matrix())?;
    if !(s.is_finite() && s >= 0.5) {
        return Err(Error::BadExponent {
            name: "s",
            value: s,
            expected: "finite s >= 1/2",
        });
    }
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::DomainError(format!("lambda = {lambda} outside [0, 1]")));
    }
    let mix_matrix = &a1.matrix().scale(lambda) + &a2.matrix().scale(1.0 - lambda);
    let mix = PsdMatrix::from_computed(&mix_matrix, a1.lambda_max().max(a2.lambda_max()))?;
    let lhs = epstein_function(b, &mix, s)?;
    let rhs = lambda * epstein_function(b, a1, s)? + (1.0 - lambda) * epstein_function(b, a2, s)?;
    let concave = s >= 1.0;
    let claim = if concave || s == 0.5 {
        Claim::Proved
    } else {
        Claim::Conjecture
    };
    Ok(InequalityReport::new(
        "epstein_probe",
        params(&[("s", s), ("lambda", lambda)]),
        lhs,
        rhs,
        if concave {
            Direction::LhsGeRhs
        } else {
            Direction::LhsLeRhs
        },
        claim,
        Witness::matrices(&[("B", b.matrix()), ("A1", a1.matrix()), ("A2", a2.matrix())]),
    )
    .with_flag("concavity_mode", concave))
}

/// Convenience for callers holding plain matrices.
pub fn psd(m: &ComplexMatrix) -> Result<PsdMatrix> {
    PsdMatrix::new(m.clone())
}
