//! Schatten-norm checkers: Hanner's inequality for matrices, the two rearrangement
//! conjectures with their proved special cases, the positivity-reversal lemma,
//! the matrix Chiti–Tartar analogue and the resolvent reduction.

use crate::error::{Error, Result};
use crate::linalg::{
    abs_matrix, eig_hermitian, norm_from_singular_values, power_sum, singular_values, ComplexMatrix,
};
use crate::report::{params, Claim, Direction, InequalityReport, Witness};

use super::{
    check_finite_p, check_p_allow_inf, dominates, is_psd_hermitian, p_direction, require_hermitian, same_dim,
};

const FOUR_THIRDS: f64 = 4.0 / 3.0;

/// `Σ (x_i + y_i)^p + |x_i − y_i|^p` for real diagonal entries.
fn diagonal_sum_difference(x: &[f64], y: &[f64], p: f64) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a + b).abs().powf(p) + (a - b).abs().powf(p))
        .sum()
}

fn sum_difference_pow(a: &ComplexMatrix, b: &ComplexMatrix, p: f64) -> Result<f64> {
    Ok(power_sum(&singular_values(&(a + b))?, p) + power_sum(&singular_values(&(a - b))?, p))
}

fn pair_witness(a: &ComplexMatrix, b: &ComplexMatrix) -> Witness {
    Witness::matrices(&[("A", a), ("B", b)])
}

/// Whether `p` lies where Hanner's matrix inequality is known for every pair.
pub fn hanner_known_for_all_pairs(p: f64) -> bool {
    (1.0..=FOUR_THIRDS).contains(&p) || p >= 4.0 || p == 2.0
}

/// `‖A+B‖^p + ‖A−B‖^p` vs `(‖A‖+‖B‖)^p + |‖A‖−‖B‖|^p`; `≥` for `p ≤ 2`, reversed above.
///
/// At `p = ∞` both sides are compared after taking `p`-th roots, which
/// reduces to `max(‖A+B‖_∞, ‖A−B‖_∞) ≤ ‖A‖_∞ + ‖B‖_∞`.
///
/// Flags: `psd_sum` when `A ± B` are both positive semidefinite;
/// `known_region` when the parameters are in a proved case (the PSD-sum case
/// is only credited for `p ≤ 2`).
pub fn hanner_matrix(a: &ComplexMatrix, b: &ComplexMatrix, p: f64) -> Result<InequalityReport> {
    same_dim(a, b)?;
    check_p_allow_inf(p)?;
    let sum = a + b;
    let diff = a - b;
    let psd_sum = is_psd_hermitian(&sum)? && is_psd_hermitian(&diff)?;
    let known = hanner_known_for_all_pairs(p) || (psd_sum && p <= 2.0);
    let sa = singular_values(a)?;
    let sb = singular_values(b)?;
    let s_sum = singular_values(&sum)?;
    let s_diff = singular_values(&diff)?;
    let (lhs, rhs) = if p.is_infinite() {
        let na = norm_from_singular_values(&sa, p);
        let nb = norm_from_singular_values(&sb, p);
        (
            norm_from_singular_values(&s_sum, p).max(norm_from_singular_values(&s_diff, p)),
            na + nb,
        )
    } else {
        let na = norm_from_singular_values(&sa, p);
        let nb = norm_from_singular_values(&sb, p);
        (
            power_sum(&s_sum, p) + power_sum(&s_diff, p),
            (na + nb).powf(p) + (na - nb).abs().powf(p),
        )
    };
    let claim = if known { Claim::Proved } else { Claim::Conjecture };
    Ok(InequalityReport::new(
        "hanner_matrix",
        params(&[("p", p)]),
        lhs,
        rhs,
        p_direction(p),
        claim,
        pair_witness(a, b),
    )
    .with_flag("known_region", known)
    .with_flag("psd_sum", psd_sum))
}

/// `‖A+B‖^p + ‖A−B‖^p` vs the same with `Σ↑(A), Σ↑(B)`; `≥` for `p ≤ 2`, reversed above.
///
/// Flags: `theorem1_applies` (Hermitian `A ≥ B ≥ 0`, proved for `p ≤ 2`);
/// `even_p_reverse` (even integer `p > 2`, where the reversed form holds for all pairs).
pub fn conjecture1(a: &ComplexMatrix, b: &ComplexMatrix, p: f64) -> Result<InequalityReport> {
    same_dim(a, b)?;
    check_finite_p(p)?;
    let lhs = sum_difference_pow(a, b, p)?;
    let rhs = diagonal_sum_difference(&singular_values(a)?, &singular_values(b)?, p);
    let ordered = a.is_hermitian(crate::tolerances::HERMITIAN_INPUT_TOL)
        && b.is_hermitian(crate::tolerances::HERMITIAN_INPUT_TOL)
        && is_psd_hermitian(b)?
        && dominates(a, b)?;
    let even_p = p > 2.0 && p.fract() == 0.0 && (p as u64).is_multiple_of(2);
    let proved = p == 2.0 || (ordered && p <= 2.0) || even_p;
    Ok(InequalityReport::new(
        "conjecture1",
        params(&[("p", p)]),
        lhs,
        rhs,
        p_direction(p),
        if proved { Claim::Proved } else { Claim::Conjecture },
        pair_witness(a, b),
    )
    .with_flag("theorem1_applies", ordered)
    .with_flag("even_p_reverse", even_p))
}

/// `‖A+B‖^p + ‖A−B‖^p` vs the same with `Σ↑(A), Σ↓(B)`; `≤` for `p ≤ 2`, reversed above.
///
/// Flag `theorem2_applies`: Hermitian `A ≥ |B|`, proved for `p ≤ 2`.
pub fn conjecture2(a: &ComplexMatrix, b: &ComplexMatrix, p: f64) -> Result<InequalityReport> {
    same_dim(a, b)?;
    check_finite_p(p)?;
    let lhs = sum_difference_pow(a, b, p)?;
    let mut b_up = singular_values(b)?;
    b_up.reverse();
    let rhs = diagonal_sum_difference(&singular_values(a)?, &b_up, p);
    let dominated = a.is_hermitian(crate::tolerances::HERMITIAN_INPUT_TOL)
        && b.is_hermitian(crate::tolerances::HERMITIAN_INPUT_TOL)
        && dominates(a, abs_matrix(b)?.matrix())?;
    let proved = p == 2.0 || (dominated && p <= 2.0);
    let direction = match p_direction(p) {
        Direction::LhsGeRhs => Direction::LhsLeRhs,
        Direction::LhsLeRhs => Direction::LhsGeRhs,
    };
    Ok(InequalityReport::new(
        "conjecture2",
        params(&[("p", p)]),
        lhs,
        rhs,
        direction,
        if proved { Claim::Proved } else { Claim::Conjecture },
        pair_witness(a, b),
    )
    .with_flag("theorem2_applies", dominated))
}

/// `Tr(M^p)` for a Hermitian `M` known to be positive semidefinite; roundoff negatives count as zero.
fn psd_trace_power(m: &ComplexMatrix, p: f64) -> Result<f64> {
    Ok(eig_hermitian(m)?
        .eigenvalues
        .iter()
        .map(|&l| if l > 0.0 { l.powf(p) } else { 0.0 })
        .sum())
}

/// `Tr((A+B)^p + (A−B)^p) ≤ Tr((A+|B|)^p + (A−|B|)^p)` for `A ≥ |B|`, `1 ≤ p ≤ 2`.
pub fn lemma_otherway(a: &ComplexMatrix, b: &ComplexMatrix, p: f64) -> Result<InequalityReport> {
    same_dim(a, b)?;
    if !(1.0..=2.0).contains(&p) {
        return Err(Error::BadExponent {
            name: "p",
            value: p,
            expected: "1 <= p <= 2",
        });
    }
    require_hermitian(a)?;
    require_hermitian(b)?;
    let abs_b = abs_matrix(b)?.into_matrix();
    if !dominates(a, &abs_b)? {
        return Err(Error::PreconditionViolated(
            "A - |B| is not positive semidefinite".into(),
        ));
    }
    let lhs = psd_trace_power(&(a + b), p)? + psd_trace_power(&(a - b), p)?;
    let rhs = psd_trace_power(&(a + &abs_b), p)? + psd_trace_power(&(a - &abs_b), p)?;
    Ok(InequalityReport::new(
        "lemma_otherway",
        params(&[("p", p)]),
        lhs,
        rhs,
        Direction::LhsLeRhs,
        Claim::Proved,
        pair_witness(a, b),
    ))
}

/// `‖A − B‖_p ≥ ‖Σ↓(A) − Σ↓(B)‖_p`, including `p = ∞`.
pub fn chiti_tartar_matrix(a: &ComplexMatrix, b: &ComplexMatrix, p: f64) -> Result<InequalityReport> {
    same_dim(a, b)?;
    check_p_allow_inf(p)?;
    let lhs = norm_from_singular_values(&singular_values(&(a - b))?, p);
    let sa = singular_values(a)?;
    let sb = singular_values(b)?;
    // Σ↓(A) − Σ↓(B) is diagonal with entries σ_{n+1−i}(A) − σ_{n+1−i}(B).
    let gaps: Vec<f64> = sa
        .iter()
        .rev()
        .zip(sb.iter().rev())
        .map(|(x, y)| (x - y).abs())
        .collect();
    let rhs = norm_from_singular_values(&gaps, p);
    Ok(InequalityReport::new(
        "chiti_tartar_matrix",
        params(&[("p", p)]),
        lhs,
        rhs,
        Direction::LhsGeRhs,
        Claim::Proved,
        pair_witness(a, b),
    ))
}

fn resolvent_trace(eigenvalues: impl Iterator<Item = f64>, t: f64) -> Result<f64> {
    let mut total = 0.0;
    for lambda in eigenvalues {
        let shifted = t + lambda;
        if !(shifted > 0.0) {
            return Err(Error::SingularShift(shifted));
        }
        total += 1.0 / shifted;
    }
    Ok(total)
}

/// `Tr((t+A+B)^{-1} + (t+A−B)^{-1}) ≥` the same with `Σ↑(A), Σ↑(B)`, for `A ≥ B ≥ 0`, `t > 0`.
pub fn resolvent_suffice(a: &ComplexMatrix, b: &ComplexMatrix, t: f64) -> Result<InequalityReport> {
    same_dim(a, b)?;
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::DomainError(format!("t must be finite and > 0, got {t}")));
    }
    require_hermitian(a)?;
    require_hermitian(b)?;
    if !is_psd_hermitian(b)? || !dominates(a, b)? {
        return Err(Error::PreconditionViolated("requires A >= B >= 0".into()));
    }
    let plus = eig_hermitian(&(a + b))?.eigenvalues;
    let minus = eig_hermitian(&(a - b))?.eigenvalues;
    let lhs = resolvent_trace(plus.into_iter().chain(minus), t)?;
    let sa = singular_values(a)?;
    let sb = singular_values(b)?;
    let rearranged = sa.iter().zip(&sb).flat_map(|(x, y)| [x + y, x - y]);
    let rhs = resolvent_trace(rearranged, t)?;
    Ok(InequalityReport::new(
        "resolvent_suffice",
        params(&[("t", t)]),
        lhs,
        rhs,
        Direction::LhsGeRhs,
        Claim::Proved,
        pair_witness(a, b),
    ))
}
