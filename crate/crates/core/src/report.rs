//! Checker output: both sides of an inequality, oriented slack, verdict and witness.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::ensembles::EnsembleSpec;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};
use crate::tolerances::DEFAULT_VERDICT_TOL;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    EqualityWithinTol,
    Violated,
}

impl Verdict {
    /// `violated` iff `relative_slack < −tol`; `equality_within_tol` iff `|relative_slack| ≤ tol`.
    pub fn classify(relative_slack: f64, tol: f64) -> Self {
        if relative_slack.is_nan() || relative_slack < -tol {
            Verdict::Violated
        } else if relative_slack.abs() <= tol {
            Verdict::EqualityWithinTol
        } else {
            Verdict::Holds
        }
    }
}

/// Which side is expected to be larger.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "lhs>=rhs")]
    LhsGeRhs,
    #[serde(rename = "lhs<=rhs")]
    LhsLeRhs,
}

/// Whether the evaluated statement is a theorem at these parameters or only a conjecture.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Claim {
    Proved,
    Conjecture,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Operand {
    Matrix(ComplexMatrix),
    /// Complex vector as `[re, im]` pairs.
    Vector(Vec<[f64; 2]>),
}

impl Operand {
    pub fn vector(values: &[C64]) -> Self {
        Operand::Vector(values.iter().map(|z| [z.re, z.im]).collect())
    }

    fn shape(&self) -> String {
        match self {
            Operand::Matrix(m) => format!("m{}", m.dim()),
            Operand::Vector(v) => format!("v{}", v.len()),
        }
    }
}

/// Serialized checker inputs, sufficient to replay the evaluation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub operands: BTreeMap<String, Operand>,
    /// Structural fingerprint (operand names and shapes); replay rejects a mismatch.
    pub shape: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<EnsembleSpec>,
}

impl Witness {
    pub fn new(operands: BTreeMap<String, Operand>) -> Self {
        let shape = fingerprint(&operands);
        Self {
            operands,
            shape,
            ensemble: None,
        }
    }

    pub fn matrices(named: &[(&str, &ComplexMatrix)]) -> Self {
        Self::new(
            named
                .iter()
                .map(|(name, m)| (name.to_string(), Operand::Matrix((*m).clone())))
                .collect(),
        )
    }

    pub fn vectors(named: &[(&str, &[C64])]) -> Self {
        Self::new(
            named
                .iter()
                .map(|(name, v)| (name.to_string(), Operand::vector(v)))
                .collect(),
        )
    }

    pub fn check_structure(&self) -> Result<()> {
        let actual = fingerprint(&self.operands);
        if actual != self.shape {
            return Err(Error::CorruptWitness(format!(
                "shape fingerprint `{}` does not match operands `{actual}`",
                self.shape
            )));
        }
        Ok(())
    }

    pub fn matrix(&self, name: &str) -> Result<&ComplexMatrix> {
        match self.operands.get(name) {
            Some(Operand::Matrix(m)) => Ok(m),
            Some(_) => Err(Error::CorruptWitness(format!("operand `{name}` is not a matrix"))),
            None => Err(Error::CorruptWitness(format!("missing matrix operand `{name}`"))),
        }
    }

    pub fn vector(&self, name: &str) -> Result<Vec<C64>> {
        match self.operands.get(name) {
            Some(Operand::Vector(v)) => Ok(v.iter().map(|&[re, im]| C64::new(re, im)).collect()),
            Some(_) => Err(Error::CorruptWitness(format!("operand `{name}` is not a vector"))),
            None => Err(Error::CorruptWitness(format!("missing vector operand `{name}`"))),
        }
    }
}

fn fingerprint(operands: &BTreeMap<String, Operand>) -> String {
    operands
        .iter()
        .map(|(name, op)| format!("{name}:{}", op.shape()))
        .collect::<Vec<_>>()
        .join(",")
}

/// JSON has no infinity, so `p = ∞` is written as the string `"inf"`.
mod params_serde {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Value {
        Number(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(
        params: &BTreeMap<String, f64>,
        serializer: S,
    ) -> Result<S::Ok, S::Error> {
        params
            .iter()
            .map(|(k, &v)| {
                let value = if v.is_finite() {
                    Value::Number(v)
                } else if v > 0.0 {
                    Value::Text("inf".into())
                } else if v < 0.0 {
                    Value::Text("-inf".into())
                } else {
                    Value::Text("nan".into())
                };
                (k.clone(), value)
            })
            .collect::<BTreeMap<_, _>>()
            .serialize(serializer)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        deserializer: D,
    ) -> Result<BTreeMap<String, f64>, D::Error> {
        use serde::de::Error;
        BTreeMap::<String, Value>::deserialize(deserializer)?
            .into_iter()
            .map(|(k, v)| {
                let x = match v {
                    Value::Number(x) => x,
                    Value::Text(t) => super::parse_real(&t).map_err(D::Error::custom)?,
                };
                Ok((k, x))
            })
            .collect()
    }
}

/// Parses a real parameter, accepting `inf`/`infinity` for `p = ∞`.
pub fn parse_real(text: &str) -> std::result::Result<f64, String> {
    match text.trim().to_ascii_lowercase().as_str() {
        "inf" | "+inf" | "infinity" | "∞" => Ok(f64::INFINITY),
        "-inf" | "-infinity" => Ok(f64::NEG_INFINITY),
        "nan" => Ok(f64::NAN),
        other => other
            .parse::<f64>()
            .map_err(|e| format!("invalid real `{text}`: {e}")),
    }
}

/// One checker evaluation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub inequality_id: String,
    #[serde(with = "params_serde")]
    pub params: BTreeMap<String, f64>,
    pub lhs: f64,
    pub rhs: f64,
    /// Oriented so that `slack >= 0` means the inequality holds.
    pub slack: f64,
    /// `slack / max(|lhs|, |rhs|, 1)`.
    pub relative_slack: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub direction: Direction,
    pub claim: Claim,
    /// Set for conjecture-status evaluations: a non-violated verdict is evidence, not a proof.
    pub evidence_only: bool,
    #[serde(default)]
    pub flags: BTreeMap<String, bool>,
    pub witness: Witness,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl InequalityReport {
    pub fn new(
        inequality_id: &str,
        params: BTreeMap<String, f64>,
        lhs: f64,
        rhs: f64,
        direction: Direction,
        claim: Claim,
        witness: Witness,
    ) -> Self {
        let slack = match direction {
            Direction::LhsGeRhs => lhs - rhs,
            Direction::LhsLeRhs => rhs - lhs,
        };
        let relative_slack = slack / lhs.abs().max(rhs.abs()).max(1.0);
        Self {
            inequality_id: inequality_id.to_string(),
            params,
            lhs,
            rhs,
            slack,
            relative_slack,
            tolerance: DEFAULT_VERDICT_TOL,
            verdict: Verdict::classify(relative_slack, DEFAULT_VERDICT_TOL),
            direction,
            claim,
            evidence_only: claim == Claim::Conjecture,
            flags: BTreeMap::new(),
            witness,
            seed: None,
        }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self.verdict = Verdict::classify(self.relative_slack, tolerance);
        self
    }

    pub fn with_flag(mut self, name: &str, value: bool) -> Self {
        self.flags.insert(name.to_string(), value);
        self
    }

    pub fn with_seed(mut self, seed: Option<u64>) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_ensemble(mut self, spec: Option<EnsembleSpec>) -> Self {
        self.witness.ensemble = spec;
        self
    }

    pub fn flag(&self, name: &str) -> bool {
        self.flags.get(name).copied().unwrap_or(false)
    }

    pub fn is_violated(&self) -> bool {
        self.verdict == Verdict::Violated
    }

    /// A violated verdict on a proved statement indicts the numerics.
    pub fn is_proved_violation(&self) -> bool {
        self.is_violated() && self.claim == Claim::Proved
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.get(name).copied()
    }
}

/// Builds a parameter map from `(name, value)` pairs.
pub fn params(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(lhs: f64, rhs: f64) -> InequalityReport {
        InequalityReport::new(
            "demo",
            params(&[("p", f64::INFINITY), ("r", 0.5)]),
            lhs,
            rhs,
            Direction::LhsGeRhs,
            Claim::Proved,
            Witness::matrices(&[("A", &ComplexMatrix::diag(&[0.1, 1.0 / 3.0]))]),
        )
    }

    #[test]
    fn verdict_bands() {
        assert_eq!(report(2.0, 1.0).verdict, Verdict::Holds);
        assert_eq!(report(1.0, 1.0 + 1e-12).verdict, Verdict::EqualityWithinTol);
        assert_eq!(report(1.0, 1.5).verdict, Verdict::Violated);
        assert_eq!(report(f64::NAN, 1.0).verdict, Verdict::Violated);
        let r = report(1.0, 1.0 + 1e-6);
        assert_eq!(r.verdict, Verdict::Violated);
        assert_eq!(r.with_tolerance(1e-5).verdict, Verdict::EqualityWithinTol);
    }

    #[test]
    fn reversed_direction_flips_slack() {
        let r = InequalityReport::new(
            "demo",
            BTreeMap::new(),
            1.0,
            3.0,
            Direction::LhsLeRhs,
            Claim::Conjecture,
            Witness::new(BTreeMap::new()),
        );
        assert_eq!(r.slack, 2.0);
        assert!(r.evidence_only);
    }

    #[test]
    fn json_round_trip_is_exact() {
        let r = report(std::f64::consts::PI, 1.0 / 7.0).with_seed(Some(u64::MAX));
        let text = serde_json::to_string(&r).unwrap();
        assert!(text.contains("\"inf\""));
        let back: InequalityReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }

    #[test]
    fn structure_check_catches_tampering() {
        let mut w = Witness::matrices(&[("A", &ComplexMatrix::identity(2))]);
        assert!(w.check_structure().is_ok());
        w.operands
            .insert("A".into(), Operand::Matrix(ComplexMatrix::identity(3)));
        assert!(matches!(w.check_structure(), Err(Error::CorruptWitness(_))));
    }
}
