//! One checker per inequality and the machine-readable registry keyed by stable ids.
//!
//! Every checker returns an [`InequalityReport`] whose slack is oriented so
//! that `slack >= 0` means the stated inequality holds.

pub mod norms;
pub mod traces;
pub mod vector;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::ensembles::{EnsembleKind, EnsembleSpec, Sample};
use crate::error::{Error, Result};
use crate::linalg::{min_eigenvalue, ComplexMatrix, PsdMatrix, C64};
use crate::report::{Direction, InequalityReport, Operand, Witness};
use crate::tolerances::{HERMITIAN_INPUT_TOL, PRECONDITION_TOL};

pub use traces::PLANTED_REVERSE_ID;

pub(crate) fn check_finite_p(p: f64) -> Result<()> {
    if !(p.is_finite() && p >= 1.0) {
        return Err(Error::BadExponent {
            name: "p",
            value: p,
            expected: "finite p >= 1",
        });
    }
    Ok(())
}

pub(crate) fn check_p_allow_inf(p: f64) -> Result<()> {
    if !(p >= 1.0) {
        return Err(Error::BadExponent {
            name: "p",
            value: p,
            expected: "p >= 1 or p = inf",
        });
    }
    Ok(())
}

/// `lhs >= rhs` for `p <= 2`, reversed above.
pub(crate) fn p_direction(p: f64) -> Direction {
    if p <= 2.0 {
        Direction::LhsGeRhs
    } else {
        Direction::LhsLeRhs
    }
}

pub(crate) fn same_dim(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(())
}

pub(crate) fn require_hermitian(m: &ComplexMatrix) -> Result<()> {
    let deviation = 0.5 * m.hermitian_deviation();
    let tolerance = HERMITIAN_INPUT_TOL * (1.0 + m.frobenius_norm());
    if deviation > tolerance {
        return Err(Error::NotHermitian { deviation, tolerance });
    }
    Ok(())
}

/// Hermitian with spectrum `>= −1e-9 · max(‖m‖_F, 1)`; `false` (not an error) for non-Hermitian input.
pub(crate) fn is_psd_hermitian(m: &ComplexMatrix) -> Result<bool> {
    if !m.is_hermitian(HERMITIAN_INPUT_TOL) {
        return Ok(false);
    }
    Ok(min_eigenvalue(m)? >= -PRECONDITION_TOL * m.frobenius_norm().max(1.0))
}

/// `upper − lower` is positive semidefinite, up to `1e-9 · max(‖upper‖_F, 1)`.
pub(crate) fn dominates(upper: &ComplexMatrix, lower: &ComplexMatrix) -> Result<bool> {
    let gap = upper - lower;
    if !gap.is_hermitian(HERMITIAN_INPUT_TOL) {
        return Ok(false);
    }
    Ok(min_eigenvalue(&gap)? >= -PRECONDITION_TOL * upper.frobenius_norm().max(1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Proved,
    Conjecture,
    KnownRegion,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OperandKind {
    Vector,
    Matrix,
    Psd,
}

#[derive(Clone, Debug, Serialize)]
pub struct RegistryEntry {
    pub inequality_id: &'static str,
    pub statement_ref: &'static str,
    pub orientation: &'static str,
    pub param_domains: BTreeMap<&'static str, &'static str>,
    pub status: Status,
    #[serde(skip)]
    pub operands: &'static [&'static str],
    #[serde(skip)]
    pub operand_kind: OperandKind,
    #[serde(skip)]
    pub compatible: &'static [EnsembleKind],
}

impl RegistryEntry {
    pub fn param_names(&self) -> Vec<&'static str> {
        self.param_domains.keys().copied().collect()
    }

    pub fn accepts(&self, kind: EnsembleKind) -> bool {
        self.compatible.contains(&kind)
    }

    pub fn evidence_only(&self) -> bool {
        self.status == Status::Conjecture
    }
}

use EnsembleKind::*;

const ANY_MATRIX: &[EnsembleKind] = &[
    GeneralComplex,
    Hermitian,
    Psd,
    OrderedPair,
    DominatedPair,
    DiagonalPsd,
    Unitary,
];
const PSD_PAIRS: &[EnsembleKind] = &[Psd, OrderedPair, DiagonalPsd];
const PSD_ONLY: &[EnsembleKind] = &[Psd, DiagonalPsd];
const VECTORS: &[EnsembleKind] = &[GeneralComplex, DiagonalPsd];

const FG: &[&str] = &["f", "g"];
const AB: &[&str] = &["A", "B"];
const XY: &[&str] = &["X", "Y"];
const EPSTEIN: &[&str] = &["B", "A1", "A2"];

struct Row {
    id: &'static str,
    statement: &'static str,
    orientation: &'static str,
    domains: &'static [(&'static str, &'static str)],
    status: Status,
    operands: &'static [&'static str],
    kind: OperandKind,
    compatible: &'static [EnsembleKind],
}

const P_ORIENT: &str = "lhs>=rhs for p<=2, lhs<=rhs for p>2";
const P_ORIENT_REV: &str = "lhs<=rhs for p<=2, lhs>=rhs for p>2";

const ROWS: &[Row] = &[
    Row {
        id: "hanner_vector",
        statement: "||f+g||_p^p + ||f-g||_p^p vs (||f||_p+||g||_p)^p + | ||f||_p-||g||_p |^p",
        orientation: P_ORIENT,
        domains: &[("p", "[1, inf)")],
        status: Status::Proved,
        operands: FG,
        kind: OperandKind::Vector,
        compatible: VECTORS,
    },
    Row {
        id: "rearrangement_vector",
        statement: "||f+g||_p^p + ||f-g||_p^p vs the same with f*, g* (decreasing rearrangements)",
        orientation: P_ORIENT,
        domains: &[("p", "[1, inf)")],
        status: Status::Proved,
        operands: FG,
        kind: OperandKind::Vector,
        compatible: VECTORS,
    },
    Row {
        id: "parallelogram_bound_vector",
        statement: "||f+g||_p^p + ||f-g||_p^p vs 2||f||_p^p + 2||g||_p^p",
        orientation: P_ORIENT_REV,
        domains: &[("p", "[1, inf)")],
        status: Status::Proved,
        operands: FG,
        kind: OperandKind::Vector,
        compatible: VECTORS,
    },
    Row {
        id: "hanner_matrix",
        statement: "||A+B||_p^p + ||A-B||_p^p vs (||A||_p+||B||_p)^p + | ||A||_p-||B||_p |^p",
        orientation: P_ORIENT,
        domains: &[(
            "p",
            "[1, 4/3] or [4, inf] for all pairs; [1, 2] when A+B, A-B >= 0",
        )],
        status: Status::KnownRegion,
        operands: AB,
        kind: OperandKind::Matrix,
        compatible: ANY_MATRIX,
    },
    Row {
        id: "conjecture1",
        statement: "||A+B||_p^p + ||A-B||_p^p vs ||Sup(A)+Sup(B)||_p^p + ||Sup(A)-Sup(B)||_p^p",
        orientation: P_ORIENT,
        domains: &[(
            "p",
            "[1, inf); proved for A >= B >= 0 with p <= 2, and for even p",
        )],
        status: Status::Conjecture,
        operands: AB,
        kind: OperandKind::Matrix,
        compatible: ANY_MATRIX,
    },
    Row {
        id: "conjecture2",
        statement: "||A+B||_p^p + ||A-B||_p^p vs ||Sup(A)+Sdown(B)||_p^p + ||Sup(A)-Sdown(B)||_p^p",
        orientation: P_ORIENT_REV,
        domains: &[("p", "[1, inf); proved for A >= |B| with p <= 2")],
        status: Status::Conjecture,
        operands: AB,
        kind: OperandKind::Matrix,
        compatible: ANY_MATRIX,
    },
    Row {
        id: "lemma_otherway",
        statement: "Tr(A+B)^p + Tr(A-B)^p <= Tr(A+|B|)^p + Tr(A-|B|)^p for A >= |B|",
        orientation: "lhs<=rhs",
        domains: &[("p", "[1, 2]")],
        status: Status::Proved,
        operands: AB,
        kind: OperandKind::Matrix,
        compatible: &[OrderedPair, DominatedPair],
    },
    Row {
        id: "updown1",
        statement: "Tr(B^r (B^1/2 A B^1/2)^s) >= Tr(Sup(A)^s Sdown(B)^(s+r))",
        orientation: "lhs>=rhs",
        domains: &[("r", "[0, inf)"), ("s", "[1, inf)")],
        status: Status::Proved,
        operands: AB,
        kind: OperandKind::Psd,
        compatible: PSD_PAIRS,
    },
    Row {
        id: "updown2",
        statement: "Tr(Sup(A)^s Sup(B)^(s+r)) >= Tr(B^r (B^1/2 A B^1/2)^s)",
        orientation: "lhs>=rhs",
        domains: &[("r", "[0, inf)"), ("s", "integers >= 1")],
        status: Status::Proved,
        operands: AB,
        kind: OperandKind::Psd,
        compatible: PSD_PAIRS,
    },
    Row {
        id: "lieb_thirring",
        statement: "Tr(X^s Y^s) >= Tr((Y^1/2 X Y^1/2)^s)",
        orientation: "lhs>=rhs",
        domains: &[("s", "[1, inf)")],
        status: Status::Proved,
        operands: XY,
        kind: OperandKind::Psd,
        compatible: PSD_PAIRS,
    },
    Row {
        id: "reverse_lt_half",
        statement: "Tr((B^1/2 A B^1/2)^1/2) >= Tr(A^1/2 B^1/2)",
        orientation: "lhs>=rhs",
        domains: &[],
        status: Status::Proved,
        operands: AB,
        kind: OperandKind::Psd,
        compatible: PSD_PAIRS,
    },
    Row {
        id: "rev_probe",
        statement: "Tr((B^1/2 A B^1/2)^s) >= Tr(A^s B^s)",
        orientation: "lhs>=rhs",
        domains: &[("s", "(1/2, 1)")],
        status: Status::Conjecture,
        operands: AB,
        kind: OperandKind::Psd,
        compatible: PSD_PAIRS,
    },
    Row {
        id: "liebth2_probe",
        statement: "Tr(X^s Y^(s+r)) >= Tr(Y^r (Y^1/2 X Y^1/2)^s)",
        orientation: "lhs>=rhs",
        domains: &[("r", "(0, inf)"), ("s", "[1, inf)")],
        status: Status::Conjecture,
        operands: XY,
        kind: OperandKind::Psd,
        compatible: PSD_PAIRS,
    },
    Row {
        id: "epstein_probe",
        statement: "f_s(A) = Tr((B^1/2 A^(1/s) B^1/2)^s) along lambda A1 + (1-lambda) A2",
        orientation: "concave (lhs>=rhs) for s>=1, convex (lhs<=rhs) for 1/2<=s<1",
        domains: &[
            ("lambda", "[0, 1]"),
            ("s", "[1, inf) and 1/2 proved; (1/2, 1) conjectural"),
        ],
        status: Status::KnownRegion,
        operands: EPSTEIN,
        kind: OperandKind::Psd,
        compatible: PSD_ONLY,
    },
    Row {
        id: "chiti_tartar_matrix",
        statement: "||A-B||_p >= ||Sdown(A)-Sdown(B)||_p",
        orientation: "lhs>=rhs",
        domains: &[("p", "[1, inf]")],
        status: Status::Proved,
        operands: AB,
        kind: OperandKind::Matrix,
        compatible: ANY_MATRIX,
    },
    Row {
        id: "resolvent_suffice",
        statement: "Tr((t+A+B)^-1 + (t+A-B)^-1) >= the same with Sup(A), Sup(B), for A >= B >= 0",
        orientation: "lhs>=rhs",
        domains: &[("t", "(0, inf)")],
        status: Status::Proved,
        operands: AB,
        kind: OperandKind::Matrix,
        compatible: &[OrderedPair],
    },
];

const PLANTED: Row = Row {
    id: PLANTED_REVERSE_ID,
    statement: "Tr((B^1/2 A B^1/2)^s) >= Tr(A^s B^s) evaluated without a domain check (false for s > 1)",
    orientation: "lhs>=rhs",
    domains: &[("s", "(0, inf)")],
    status: Status::Conjecture,
    operands: AB,
    kind: OperandKind::Psd,
    compatible: PSD_PAIRS,
};

fn entry(row: &Row) -> RegistryEntry {
    RegistryEntry {
        inequality_id: row.id,
        statement_ref: row.statement,
        orientation: row.orientation,
        param_domains: row.domains.iter().copied().collect(),
        status: row.status,
        operands: row.operands,
        operand_kind: row.kind,
        compatible: row.compatible,
    }
}

/// The catalog, in a fixed order.
pub fn registry() -> Vec<RegistryEntry> {
    ROWS.iter().map(entry).collect()
}

/// Finds a registry entry, or the planted hunting target.
pub fn lookup(id: &str) -> Result<RegistryEntry> {
    ROWS.iter()
        .chain(std::iter::once(&PLANTED))
        .find(|row| row.id == id)
        .map(entry)
        .ok_or_else(|| Error::UnknownInequality(id.to_string()))
}

fn param(params: &BTreeMap<String, f64>, name: &str, id: &str) -> Result<f64> {
    params
        .get(name)
        .copied()
        .ok_or_else(|| Error::DomainError(format!("{id} requires parameter `{name}`")))
}

fn psd_operand(witness: &Witness, name: &str) -> Result<PsdMatrix> {
    PsdMatrix::new(witness.matrix(name)?.clone())
}

/// Evaluates a registered checker on a witness.
///
/// The witness's ensemble spec, if any, is carried over to the report.
pub fn evaluate(id: &str, witness: &Witness, params: &BTreeMap<String, f64>) -> Result<InequalityReport> {
    let entry = lookup(id)?;
    witness.check_structure()?;
    for name in params.keys() {
        if !entry.param_domains.contains_key(name.as_str()) {
            return Err(Error::DomainError(format!("{id} takes no parameter `{name}`")));
        }
    }
    let p = |name| param(params, name, id);
    let ops = entry.operands;
    let report = match entry.operand_kind {
        OperandKind::Vector => {
            let f = witness.vector(ops[0])?;
            let g = witness.vector(ops[1])?;
            let checker = match id {
                "hanner_vector" => vector::hanner_vector,
                "rearrangement_vector" => vector::rearrangement_vector,
                _ => vector::parallelogram_bound_vector,
            };
            checker(&f, &g, p("p")?)?
        }
        OperandKind::Matrix => {
            let a = witness.matrix(ops[0])?;
            let b = witness.matrix(ops[1])?;
            match id {
                "hanner_matrix" => norms::hanner_matrix(a, b, p("p")?)?,
                "conjecture1" => norms::conjecture1(a, b, p("p")?)?,
                "conjecture2" => norms::conjecture2(a, b, p("p")?)?,
                "lemma_otherway" => norms::lemma_otherway(a, b, p("p")?)?,
                "chiti_tartar_matrix" => norms::chiti_tartar_matrix(a, b, p("p")?)?,
                _ => norms::resolvent_suffice(a, b, p("t")?)?,
            }
        }
        OperandKind::Psd if id == "epstein_probe" => {
            let b = psd_operand(witness, "B")?;
            let a1 = psd_operand(witness, "A1")?;
            let a2 = psd_operand(witness, "A2")?;
            traces::epstein_probe(&b, p("s")?, &a1, &a2, p("lambda")?)?
        }
        OperandKind::Psd => {
            let a = psd_operand(witness, ops[0])?;
            let b = psd_operand(witness, ops[1])?;
            match id {
                "updown1" => traces::updown1(&a, &b, p("r")?, p("s")?)?,
                "updown2" => traces::updown2(&a, &b, p("r")?, p("s")?)?,
                "lieb_thirring" => traces::lieb_thirring(&a, &b, p("s")?)?,
                "reverse_lt_half" => traces::reverse_lt_half(&a, &b)?,
                "rev_probe" => traces::rev_probe(&a, &b, p("s")?)?,
                "liebth2_probe" => traces::liebth2_probe(&a, &b, p("r")?, p("s")?)?,
                _ => traces::planted_reverse_lt(&a, &b, p("s")?)?,
            }
        }
    };
    Ok(report.with_ensemble(witness.ensemble.clone()))
}

/// Number of matrices a sample must supply for this entry.
pub fn required_matrices(entry: &RegistryEntry) -> usize {
    entry.operands.len()
}

/// Ensemble spec that draws operands for `entry` from `kind`.
pub fn spec_for(entry: &RegistryEntry, kind: EnsembleKind, dim: usize, seed: u64) -> Result<EnsembleSpec> {
    if !entry.accepts(kind) {
        return Err(Error::IncompatibleEnsemble(format!(
            "{} cannot be drawn from `{}`",
            entry.inequality_id,
            kind.name()
        )));
    }
    let n = required_matrices(entry);
    if kind.is_pair() && n != 2 {
        return Err(Error::IncompatibleEnsemble(format!(
            "{} needs {n} operands, `{}` yields pairs",
            entry.inequality_id,
            kind.name()
        )));
    }
    Ok(EnsembleSpec::new(kind, dim, seed).with_count(if kind.is_pair() { 1 } else { n }))
}

/// Packs a sample's matrices into a witness with the entry's operand names.
///
/// Vector entries take the diagonal of each matrix.
pub fn witness_from_sample(entry: &RegistryEntry, sample: &Sample) -> Result<Witness> {
    let n = required_matrices(entry);
    if sample.matrices.len() != n {
        return Err(Error::IncompatibleEnsemble(format!(
            "{} needs {n} operands, sample has {}",
            entry.inequality_id,
            sample.matrices.len()
        )));
    }
    let operands = entry
        .operands
        .iter()
        .zip(&sample.matrices)
        .map(|(&name, m)| {
            let op = match entry.operand_kind {
                OperandKind::Vector => {
                    let diag: Vec<C64> = (0..m.dim()).map(|i| m.get(i, i)).collect();
                    Operand::vector(&diag)
                }
                _ => Operand::Matrix(m.clone()),
            };
            (name.to_string(), op)
        })
        .collect();
    let mut witness = Witness::new(operands);
    witness.ensemble = Some(sample.spec.clone());
    Ok(witness)
}
