//! Random-restart counterexample search over a registry inequality.
//!
//! Each restart draws a fresh sample on substream `(seed, restart)` and runs
//! an accept-only descent in factor space: a perturbed candidate replaces the
//! current sample only if its minimum relative slack over the whole parameter
//! grid is strictly smaller. After every streak of ten rejections the
//! perturbation magnitude shrinks by `shrink_factor`.
//!
//! Restarts are independent. The overall winner is the minimum of
//! `(relative_slack, restart, step)`, so the record does not depend on how
//! restarts were scheduled.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::catalog::{evaluate, lookup, spec_for, witness_from_sample, RegistryEntry};
use crate::ensembles::{perturb, sample_from, EnsembleKind, GaussianStream, Sample};
use crate::error::{Error, Result};
use crate::report::{InequalityReport, Operand, Verdict, Witness};
use crate::tolerances::{CONFIRM_TOL, DEFAULT_VERDICT_TOL};

/// Rejections in a row before the step size shrinks.
pub const REJECTION_STREAK: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HuntConfig {
    pub inequality_id: String,
    #[serde(with = "grid_serde", default)]
    pub param_grid: BTreeMap<String, Vec<f64>>,
    pub dims: Vec<usize>,
    #[serde(default = "defaults::restarts")]
    pub restarts: usize,
    #[serde(default = "defaults::steps")]
    pub steps_per_restart: usize,
    #[serde(default = "defaults::magnitude")]
    pub initial_magnitude: f64,
    #[serde(default = "defaults::shrink")]
    pub shrink_factor: f64,
    #[serde(default = "defaults::seed")]
    pub seed: u64,
    pub ensemble_kind: EnsembleKind,
    #[serde(default = "defaults::tolerance")]
    pub tolerance: f64,
}

mod defaults {
    pub fn restarts() -> usize {
        50
    }
    pub fn steps() -> usize {
        40
    }
    pub fn magnitude() -> f64 {
        0.3
    }
    pub fn shrink() -> f64 {
        0.5
    }
    pub fn seed() -> u64 {
        1
    }
    pub fn tolerance() -> f64 {
        super::DEFAULT_VERDICT_TOL
    }
}

/// Grid values may be `inf` (written as a string in JSON).
mod grid_serde {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Value {
        Number(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(
        grid: &BTreeMap<String, Vec<f64>>,
        serializer: S,
    ) -> Result<S::Ok, S::Error> {
        grid.iter()
            .map(|(k, values)| {
                let values: Vec<Value> = values
                    .iter()
                    .map(|&v| {
                        if v.is_finite() {
                            Value::Number(v)
                        } else {
                            Value::Text(format!("{v}"))
                        }
                    })
                    .collect();
                (k.clone(), values)
            })
            .collect::<BTreeMap<_, _>>()
            .serialize(serializer)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        deserializer: D,
    ) -> Result<BTreeMap<String, Vec<f64>>, D::Error> {
        use serde::de::Error;
        BTreeMap::<String, Vec<Value>>::deserialize(deserializer)?
            .into_iter()
            .map(|(k, values)| {
                let values = values
                    .into_iter()
                    .map(|v| match v {
                        Value::Number(x) => Ok(x),
                        Value::Text(t) => crate::report::parse_real(&t).map_err(D::Error::custom),
                    })
                    .collect::<Result<Vec<f64>, _>>()?;
                Ok((k, values))
            })
            .collect()
    }
}

impl HuntConfig {
    pub fn new(id: &str, kind: EnsembleKind, dims: Vec<usize>) -> Self {
        Self {
            inequality_id: id.to_string(),
            param_grid: BTreeMap::new(),
            dims,
            restarts: defaults::restarts(),
            steps_per_restart: defaults::steps(),
            initial_magnitude: defaults::magnitude(),
            shrink_factor: defaults::shrink(),
            seed: defaults::seed(),
            ensemble_kind: kind,
            tolerance: defaults::tolerance(),
        }
    }

    pub fn with_grid(mut self, name: &str, values: &[f64]) -> Self {
        self.param_grid.insert(name.to_string(), values.to_vec());
        self
    }

    /// Checks the config against the registry and returns the target entry.
    pub fn validate(&self) -> Result<RegistryEntry> {
        let entry = lookup(&self.inequality_id)?;
        if self.dims.is_empty() || self.dims.contains(&0) {
            return Err(Error::BadSpec(
                "dims must be a nonempty list of positive integers".into(),
            ));
        }
        if self.restarts == 0 || self.steps_per_restart == 0 {
            return Err(Error::BadSpec(
                "restarts and steps_per_restart must be >= 1".into(),
            ));
        }
        if !(self.initial_magnitude.is_finite() && self.initial_magnitude > 0.0) {
            return Err(Error::BadSpec(format!(
                "initial_magnitude must be > 0, got {}",
                self.initial_magnitude
            )));
        }
        if !(self.shrink_factor > 0.0 && self.shrink_factor < 1.0) {
            return Err(Error::BadSpec(format!(
                "shrink_factor must lie in (0, 1), got {}",
                self.shrink_factor
            )));
        }
        if !(self.tolerance >= 0.0) {
            return Err(Error::BadSpec(format!(
                "tolerance must be >= 0, got {}",
                self.tolerance
            )));
        }
        let expected = entry.param_names();
        let given: Vec<&str> = self.param_grid.keys().map(String::as_str).collect();
        if expected != given {
            return Err(Error::BadSpec(format!(
                "{} needs a grid for exactly {:?}, got {:?}",
                entry.inequality_id, expected, given
            )));
        }
        if self.param_grid.values().any(Vec::is_empty) {
            return Err(Error::BadSpec("parameter grids must be nonempty".into()));
        }
        for &dim in &self.dims {
            spec_for(&entry, self.ensemble_kind, dim, self.seed)?;
        }
        Ok(entry)
    }

    /// Cartesian product of the grid in key order, last key varying fastest.
    pub fn grid_points(&self) -> Vec<BTreeMap<String, f64>> {
        let mut points = vec![BTreeMap::new()];
        for (name, values) in &self.param_grid {
            points = points
                .into_iter()
                .flat_map(|point| {
                    values.iter().map(move |&v| {
                        let mut next = point.clone();
                        next.insert(name.clone(), v);
                        next
                    })
                })
                .collect();
        }
        points
    }
}

/// Where the best witness came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub restart: usize,
    /// 0 for the initial draw, `k` for the `k`-th perturbation step.
    pub step: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RestartSummary {
    pub restart: usize,
    pub dim: usize,
    pub best_relative_slack: f64,
    pub best_step: usize,
    pub accepted: usize,
    pub trials: usize,
    pub violations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HuntRecord {
    pub config: HuntConfig,
    pub best_report: InequalityReport,
    pub trials: usize,
    pub violations: usize,
    pub provenance: Provenance,
    pub restarts: Vec<RestartSummary>,
    pub wall_time: f64,
}

impl HuntRecord {
    /// Whether a confirmed violation was found.
    pub fn found_violation(&self) -> bool {
        self.violations > 0
    }

    /// A confirmed violation whose best witness lies in a proved case.
    pub fn proved_violation(&self) -> bool {
        self.found_violation() && self.best_report.is_proved_violation()
    }
}

/// Result of one restart, including its accepted-slack trajectory.
#[derive(Clone, Debug)]
pub struct RestartOutcome {
    pub best: InequalityReport,
    pub summary: RestartSummary,
    /// Best relative slack after the initial draw and after each step.
    pub history: Vec<f64>,
}

struct GridEval {
    best: InequalityReport,
    violations: usize,
}

fn evaluate_grid(cfg: &HuntConfig, witness: &Witness, points: &[BTreeMap<String, f64>]) -> Result<GridEval> {
    let mut best: Option<InequalityReport> = None;
    let mut violations = 0;
    for point in points {
        let report = evaluate(&cfg.inequality_id, witness, point)?
            .with_tolerance(cfg.tolerance)
            .with_seed(Some(cfg.seed));
        if report.verdict == Verdict::Violated && confirm(&cfg.inequality_id, &report, point)? {
            violations += 1;
        }
        if best
            .as_ref()
            .is_none_or(|b| report.relative_slack.total_cmp(&b.relative_slack).is_lt())
        {
            best = Some(report);
        }
    }
    Ok(GridEval {
        best: best.expect("grid has at least one point"),
        violations,
    })
}

/// Re-evaluates a violation on a witness whose near-Hermitian operands are re-symmetrized.
///
/// A matrix counts as near-Hermitian when `‖M − M*‖_F ≤ 1e-10 (1 + ‖M‖_F)`;
/// other operands are kept as they are.
pub fn confirm(id: &str, report: &InequalityReport, params: &BTreeMap<String, f64>) -> Result<bool> {
    let mut witness = report.witness.clone();
    for op in witness.operands.values_mut() {
        if let Operand::Matrix(m) = op {
            if m.is_hermitian(CONFIRM_TOL) {
                *m = m.symmetrized();
            }
        }
    }
    let again = evaluate(id, &witness, params)?.with_tolerance(report.tolerance);
    Ok(again.verdict == Verdict::Violated)
}

/// Runs restart `restart` of the hunt.
pub fn run_restart(cfg: &HuntConfig, entry: &RegistryEntry, restart: usize) -> Result<RestartOutcome> {
    let points = cfg.grid_points();
    let dim = cfg.dims[restart % cfg.dims.len()];
    let spec = spec_for(entry, cfg.ensemble_kind, dim, cfg.seed)?.with_stream(restart as u64);
    let mut stream = GaussianStream::new(cfg.seed, restart as u64);
    let mut current: Sample = sample_from(&spec, &mut stream)?;
    let first = evaluate_grid(cfg, &witness_from_sample(entry, &current)?, &points)?;
    let mut best = first.best;
    let mut violations = first.violations;
    let mut trials = points.len();
    let mut best_step = 0;
    let mut accepted = 0;
    let mut history = vec![best.relative_slack];
    let mut magnitude = cfg.initial_magnitude;
    let mut streak = 0;
    for step in 1..=cfg.steps_per_restart {
        let candidate = perturb(&current, magnitude, &mut stream)?;
        let evaluated = witness_from_sample(entry, &candidate).and_then(|w| evaluate_grid(cfg, &w, &points));
        trials += points.len();
        // A candidate the checker cannot evaluate (roundoff pushing a
        // precondition over its tolerance) is treated as a rejection.
        let improved = match evaluated {
            Ok(eval) => {
                violations += eval.violations;
                if eval.best.relative_slack < best.relative_slack {
                    best = eval.best;
                    Some(())
                } else {
                    None
                }
            }
            Err(_) => None,
        };
        if improved.is_some() {
            current = candidate;
            best_step = step;
            accepted += 1;
            streak = 0;
        } else {
            streak += 1;
            if streak == REJECTION_STREAK {
                magnitude *= cfg.shrink_factor;
                streak = 0;
            }
        }
        history.push(best.relative_slack);
    }
    Ok(RestartOutcome {
        summary: RestartSummary {
            restart,
            dim,
            best_relative_slack: best.relative_slack,
            best_step,
            accepted,
            trials,
            violations,
        },
        best,
        history,
    })
}

fn run_all(
    cfg: &HuntConfig,
    entry: &RegistryEntry,
    on_restart: &(dyn Fn(&RestartSummary) + Sync),
) -> Result<Vec<RestartOutcome>> {
    let one = |r: usize| {
        let outcome = run_restart(cfg, entry, r)?;
        on_restart(&outcome.summary);
        Ok(outcome)
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..cfg.restarts).into_par_iter().map(one).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..cfg.restarts).map(one).collect()
    }
}

/// Runs the whole hunt; the result is independent of the number of worker threads.
pub fn hunt(cfg: &HuntConfig) -> Result<HuntRecord> {
    hunt_with_progress(cfg, &|_| {})
}

/// [`hunt`], calling `on_restart` as each restart finishes (in completion order).
pub fn hunt_with_progress(
    cfg: &HuntConfig,
    on_restart: &(dyn Fn(&RestartSummary) + Sync),
) -> Result<HuntRecord> {
    let started = Instant::now();
    let entry = cfg.validate()?;
    let outcomes = run_all(cfg, &entry, on_restart)?;
    let winner = outcomes
        .iter()
        .min_by(|a, b| {
            a.best
                .relative_slack
                .total_cmp(&b.best.relative_slack)
                .then(a.summary.restart.cmp(&b.summary.restart))
                .then(a.summary.best_step.cmp(&b.summary.best_step))
        })
        .expect("restarts >= 1");
    Ok(HuntRecord {
        config: cfg.clone(),
        best_report: winner.best.clone(),
        trials: outcomes.iter().map(|o| o.summary.trials).sum(),
        violations: outcomes.iter().map(|o| o.summary.violations).sum(),
        provenance: Provenance {
            seed: cfg.seed,
            restart: winner.summary.restart,
            step: winner.summary.best_step,
        },
        restarts: outcomes.into_iter().map(|o| o.summary).collect(),
        wall_time: started.elapsed().as_secs_f64(),
    })
}

/// Re-evaluates the checker on the record's stored witness and parameters.
pub fn replay(record: &HuntRecord) -> Result<InequalityReport> {
    replay_report(&record.best_report)
}

/// Re-evaluates any report from its own witness; parameters the checker fixes internally are dropped.
pub fn replay_report(report: &InequalityReport) -> Result<InequalityReport> {
    let entry = lookup(&report.inequality_id)?;
    let params: BTreeMap<String, f64> = report
        .params
        .iter()
        .filter(|(k, _)| entry.param_domains.contains_key(k.as_str()))
        .map(|(k, &v)| (k.clone(), v))
        .collect();
    Ok(evaluate(&report.inequality_id, &report.witness, &params)?
        .with_tolerance(report.tolerance)
        .with_seed(report.seed))
}

/// `true` when replay reproduces the stored sides to `1e-12` relative.
pub fn verify_replay(record: &HuntRecord) -> Result<bool> {
    let again = replay(record)?;
    let stored = &record.best_report;
    let close = |x: f64, y: f64| (x - y).abs() <= 1e-12 * x.abs().max(y.abs()).max(1.0);
    Ok(close(again.lhs, stored.lhs) && close(again.rhs, stored.rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::PLANTED_REVERSE_ID;

    fn small(id: &str, kind: EnsembleKind) -> HuntConfig {
        let mut cfg = HuntConfig::new(id, kind, vec![2, 3]);
        cfg.restarts = 6;
        cfg.steps_per_restart = 15;
        cfg
    }

    #[test]
    fn planted_target_is_found_and_replays() {
        let mut cfg = small(PLANTED_REVERSE_ID, EnsembleKind::Psd).with_grid("s", &[2.0]);
        cfg.dims = vec![3];
        let record = hunt(&cfg).unwrap();
        assert!(record.violations > 0);
        assert!(record.best_report.is_violated());
        assert!(!record.proved_violation());
        assert!(verify_replay(&record).unwrap());
        assert!(replay(&record).unwrap().is_violated());
    }

    #[test]
    fn proved_target_has_no_violations() {
        let cfg = small("updown1", EnsembleKind::Psd)
            .with_grid("r", &[0.0, 1.0])
            .with_grid("s", &[1.0, 2.5]);
        let record = hunt(&cfg).unwrap();
        assert_eq!(record.violations, 0);
        assert_eq!(record.trials, 6 * 16 * 4);
        assert!(verify_replay(&record).unwrap());
    }

    #[test]
    fn hunt_is_deterministic_and_merge_is_minimal() {
        let cfg = small("conjecture1", EnsembleKind::GeneralComplex).with_grid("p", &[1.1, 1.9]);
        let mut a = hunt(&cfg).unwrap();
        let mut b = hunt(&cfg).unwrap();
        a.wall_time = 0.0;
        b.wall_time = 0.0;
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        let min = a
            .restarts
            .iter()
            .map(|r| r.best_relative_slack)
            .fold(f64::INFINITY, f64::min);
        assert_eq!(a.best_report.relative_slack, min);
        assert_eq!(a.restarts[a.provenance.restart].best_step, a.provenance.step);
    }

    #[test]
    fn descent_is_monotone() {
        let cfg = small("rev_probe", EnsembleKind::Psd).with_grid("s", &[0.6, 0.9]);
        let entry = cfg.validate().unwrap();
        for r in 0..3 {
            let out = run_restart(&cfg, &entry, r).unwrap();
            assert!(out.history.windows(2).all(|w| w[1] <= w[0]));
            assert_eq!(out.history.len(), cfg.steps_per_restart + 1);
        }
    }

    #[test]
    fn record_json_round_trip_replays_identically() {
        let cfg = small("conjecture2", EnsembleKind::GeneralComplex).with_grid("p", &[1.5]);
        let record = hunt(&cfg).unwrap();
        let text = serde_json::to_string(&record).unwrap();
        let back: HuntRecord = serde_json::from_str(&text).unwrap();
        assert_eq!(back, record);
        let again = replay(&back).unwrap();
        assert!((again.slack - record.best_report.slack).abs() <= 1e-12 * again.lhs.abs().max(1.0));
    }

    #[test]
    fn tampered_entry_changes_slack_but_not_structure() {
        let cfg = small("conjecture1", EnsembleKind::GeneralComplex).with_grid("p", &[1.5]);
        let mut record = hunt(&cfg).unwrap();
        if let Some(Operand::Matrix(m)) = record.best_report.witness.operands.get_mut("A") {
            *m = &*m + &crate::linalg::ComplexMatrix::identity(m.dim()).scale(0.25);
        }
        let again = replay(&record).unwrap();
        assert!((again.slack - record.best_report.slack).abs() > 1e-9);

        record.best_report.witness.operands.remove("B");
        assert!(matches!(replay(&record), Err(Error::CorruptWitness(_))));
    }

    #[test]
    fn config_errors() {
        let cfg = small("lemma_otherway", EnsembleKind::GeneralComplex).with_grid("p", &[1.5]);
        assert!(matches!(hunt(&cfg), Err(Error::IncompatibleEnsemble(_))));
        let cfg = small("nope", EnsembleKind::Psd);
        assert!(matches!(hunt(&cfg), Err(Error::UnknownInequality(_))));
        let cfg = small("updown1", EnsembleKind::Psd).with_grid("s", &[1.0]);
        assert!(matches!(hunt(&cfg), Err(Error::BadSpec(_))));
        let mut cfg = small("hanner_matrix", EnsembleKind::GeneralComplex).with_grid("p", &[2.0]);
        cfg.shrink_factor = 1.0;
        assert!(matches!(hunt(&cfg), Err(Error::BadSpec(_))));
    }

    #[test]
    fn config_json_accepts_inf() {
        let text = r#"{"inequality_id":"chiti_tartar_matrix","param_grid":{"p":[1,"inf"]},
            "dims":[3],"ensemble_kind":"general_complex"}"#;
        let cfg: HuntConfig = serde_json::from_str(text).unwrap();
        assert_eq!(cfg.param_grid["p"], vec![1.0, f64::INFINITY]);
        assert_eq!(cfg.restarts, 50);
        let back: HuntConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
    }
}
