//! Seeded verification suites over the proved statements.
//!
//! Sample `i` of suite `k` draws dimension `dims[i % dims.len()]` from
//! substream `(k << 32) | (part << 24) | i` of the run seed, so every sample is
//! reproducible on its own and the suite can be evaluated in parallel. Results
//! are merged in sample order.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::catalog::{norms, traces};
use crate::ensembles::{sample, EnsembleKind, EnsembleSpec, Sample};
use crate::error::{Error, Result};
use crate::integral::{kp_closed_form, kp_constant_with, matrix_power_via_integral, QuadratureConfig};
use crate::linalg::{matrix_power, ComplexMatrix, PsdMatrix};
use crate::rearrange::weyl_monotone_check;
use crate::report::{Claim, InequalityReport, Verdict};
use crate::tolerances::DEFAULT_VERDICT_TOL;

pub const SUITES: [&str; 12] = [
    "theorem1",
    "theorem2",
    "updown1",
    "updown2",
    "lemma-otherway",
    "weyl-monotone",
    "lieb-thirring",
    "reverse-half",
    "integral-rep",
    "resolvent",
    "hanner-matrix",
    "chiti-tartar",
];

/// `|relative_slack|` bound for statements that collapse to an identity at `p = 2`.
pub const P2_COLLAPSE_TOL: f64 = 1e-10;

/// Relative Frobenius bound for the quadrature against the spectral power.
pub const INTEGRAL_REL_TOL: f64 = 1e-6;

/// Bound for the quadrature `k_p` against `sin((p−1)π)/π`.
pub const KP_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub dims: Vec<usize>,
    pub samples: usize,
    pub seed: u64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<Vec<f64>>,
    pub quadrature: QuadratureConfig,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            dims: (2..=6).collect(),
            samples: 500,
            seed: 1,
            tolerance: DEFAULT_VERDICT_TOL,
            p: None,
            r: None,
            s: None,
            t: None,
            quadrature: QuadratureConfig::default(),
        }
    }
}

impl VerifyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dims.is_empty() || self.dims.contains(&0) {
            return Err(Error::BadSpec(
                "dims must be a nonempty list of positive integers".into(),
            ));
        }
        if self.samples == 0 {
            return Err(Error::BadSpec("samples must be >= 1".into()));
        }
        if !(self.tolerance >= 0.0) {
            return Err(Error::BadSpec(format!(
                "tolerance must be >= 0, got {}",
                self.tolerance
            )));
        }
        for (name, grid) in [("p", &self.p), ("r", &self.r), ("s", &self.s), ("t", &self.t)] {
            if grid.as_ref().is_some_and(Vec::is_empty) {
                return Err(Error::BadSpec(format!("--{name} list is empty")));
            }
        }
        self.quadrature.validate()
    }

    fn grid(&self, name: &str, default: &[f64]) -> Vec<f64> {
        let given = match name {
            "p" => &self.p,
            "r" => &self.r,
            "s" => &self.s,
            _ => &self.t,
        };
        given.clone().unwrap_or_else(|| default.to_vec())
    }
}

/// Running minimum of one check (one statement at one parameter point).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckStats {
    pub evaluations: usize,
    pub violations: usize,
    /// Smallest margin seen: relative slack, or bound minus error for equality and accuracy checks.
    pub min_margin: f64,
    pub argmin_sample: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteSection {
    pub suite: String,
    pub samples: usize,
    pub evaluations: usize,
    /// Violations of statements reported as proved.
    pub violations: usize,
    /// Violations at parameters where the statement is only conjectured.
    pub evidence_violations: usize,
    pub errors: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_error: Option<String>,
    pub checks: BTreeMap<String, CheckStats>,
}

impl SuiteSection {
    /// A proved statement failed or a computation errored.
    pub fn is_defect(&self) -> bool {
        self.violations > 0 || self.errors > 0
    }

    /// Smallest margin over all checks whose key starts with `prefix`.
    pub fn min_margin(&self, prefix: &str) -> Option<f64> {
        self.checks
            .iter()
            .filter(|(k, _)| k.starts_with(prefix))
            .map(|(_, s)| s.min_margin)
            .min_by(f64::total_cmp)
    }
}

/// One evaluated check.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub key: String,
    pub margin: f64,
    pub violated: bool,
    pub proved: bool,
}

impl Outcome {
    fn from_report(report: &InequalityReport) -> Self {
        Self {
            key: key(&report.inequality_id, &report.params),
            margin: report.relative_slack,
            violated: report.verdict == Verdict::Violated,
            proved: report.claim == Claim::Proved,
        }
    }

    /// `|relative_slack| <= bound`, recorded under `<key> equality`.
    fn equality(report: &InequalityReport, bound: f64) -> Self {
        let margin = bound - report.relative_slack.abs();
        Self {
            key: format!("{} equality", key(&report.inequality_id, &report.params)),
            margin,
            violated: !(margin >= 0.0),
            proved: true,
        }
    }

    fn bound(key: String, bound: f64, error: f64) -> Self {
        let margin = bound - error;
        Self {
            key,
            margin,
            violated: !(margin >= 0.0),
            proved: true,
        }
    }
}

fn key(id: &str, params: &BTreeMap<String, f64>) -> String {
    let mut out = id.to_string();
    for (k, v) in params {
        out.push_str(&format!(" {k}={v}"));
    }
    out
}

type TraceChecker = fn(&PsdMatrix, &PsdMatrix, f64, f64) -> Result<InequalityReport>;

type Evaluator = Box<dyn Fn(usize, &Sample, f64) -> Vec<Result<Outcome>> + Send + Sync>;

struct Part {
    kind: EnsembleKind,
    count: usize,
    eval: Evaluator,
}

fn part(
    kind: EnsembleKind,
    count: usize,
    eval: impl Fn(usize, &Sample, f64) -> Vec<Result<Outcome>> + Send + Sync + 'static,
) -> Part {
    Part {
        kind,
        count,
        eval: Box::new(eval),
    }
}

fn with_tol(report: Result<InequalityReport>, tol: f64) -> Result<InequalityReport> {
    report.map(|r| r.with_tolerance(tol))
}

fn psd_pair(s: &Sample) -> Result<(PsdMatrix, PsdMatrix)> {
    Ok((
        PsdMatrix::new(s.matrices[0].clone())?,
        PsdMatrix::new(s.matrices[1].clone())?,
    ))
}

fn psd_all(s: &Sample) -> Result<Vec<PsdMatrix>> {
    s.matrices.iter().map(|m| PsdMatrix::new(m.clone())).collect()
}

/// Grid of a `p`-family check on a matrix pair.
fn p_family(
    grid: Vec<f64>,
    checker: fn(&ComplexMatrix, &ComplexMatrix, f64) -> Result<InequalityReport>,
    collapse_at_2: Option<f64>,
) -> impl Fn(usize, &Sample, f64) -> Vec<Result<Outcome>> + Send + Sync + 'static {
    move |_, s, tol| {
        let (a, b) = s.pair();
        let mut out = Vec::new();
        for &p in &grid {
            match with_tol(checker(a, b, p), tol) {
                Ok(rep) => {
                    out.push(Ok(Outcome::from_report(&rep)));
                    if let (Some(bound), true) = (collapse_at_2, p == 2.0) {
                        out.push(Ok(Outcome::equality(&rep, bound)));
                    }
                }
                Err(e) => out.push(Err(e)),
            }
        }
        out
    }
}

fn epstein_part(s_grid: Vec<f64>) -> Part {
    part(EnsembleKind::Psd, 3, move |_, s, tol| {
        let ops = match psd_all(s) {
            Ok(ops) => ops,
            Err(e) => return vec![Err(e)],
        };
        let mut out = Vec::new();
        for &sv in &s_grid {
            for lambda in [0.25, 0.5, 0.75] {
                out.push(
                    with_tol(traces::epstein_probe(&ops[0], sv, &ops[1], &ops[2], lambda), tol)
                        .map(|r| Outcome::from_report(&r)),
                );
            }
        }
        out
    })
}

fn build(name: &str, cfg: &VerifyConfig) -> Result<Vec<Part>> {
    use EnsembleKind::*;
    let p1 = [1.0, 1.1, 1.25, 1.5, 1.75, 1.9, 2.0];
    Ok(match name {
        "theorem1" => {
            let even: Vec<f64> = match &cfg.p {
                None => vec![4.0, 6.0],
                Some(ps) => ps
                    .iter()
                    .copied()
                    .filter(|&p| p >= 4.0 && p.fract() == 0.0 && (p as u64).is_multiple_of(2))
                    .collect(),
            };
            let mut parts = vec![part(
                OrderedPair,
                1,
                p_family(cfg.grid("p", &p1), norms::conjecture1, Some(P2_COLLAPSE_TOL)),
            )];
            if !even.is_empty() {
                parts.push(part(GeneralComplex, 2, p_family(even, norms::conjecture1, None)));
            }
            parts
        }
        "theorem2" => vec![part(
            DominatedPair,
            1,
            p_family(cfg.grid("p", &p1), norms::conjecture2, Some(P2_COLLAPSE_TOL)),
        )],
        "lemma-otherway" => vec![part(
            DominatedPair,
            1,
            p_family(
                cfg.grid("p", &[1.0, 1.5, 2.0]),
                norms::lemma_otherway,
                Some(cfg.tolerance),
            ),
        )],
        "chiti-tartar" => vec![part(
            GeneralComplex,
            2,
            p_family(
                cfg.grid("p", &[1.0, 2.0, f64::INFINITY]),
                norms::chiti_tartar_matrix,
                None,
            ),
        )],
        "hanner-matrix" => {
            let unrestricted = cfg.grid("p", &[1.0, 1.25, 4.0 / 3.0, 2.0, 4.0, 6.0]);
            let psd_sum = cfg.grid("p", &[1.0, 1.5, 2.0]);
            vec![
                part(
                    GeneralComplex,
                    2,
                    p_family(unrestricted, norms::hanner_matrix, Some(P2_COLLAPSE_TOL)),
                ),
                part(
                    DominatedPair,
                    1,
                    p_family(psd_sum, norms::hanner_matrix, Some(P2_COLLAPSE_TOL)),
                ),
            ]
        }
        "updown1" | "updown2" => {
            let r_grid = cfg.grid("r", &[0.0, 0.5, 1.0, 2.0]);
            let (s_grid, checker): (Vec<f64>, TraceChecker) = if name == "updown1" {
                (cfg.grid("s", &[1.0, 1.5, 2.0, 3.5]), traces::updown1)
            } else {
                (cfg.grid("s", &[1.0, 2.0, 3.0]), traces::updown2)
            };
            vec![part(Psd, 2, move |_, s, tol| {
                let (a, b) = match psd_pair(s) {
                    Ok(pair) => pair,
                    Err(e) => return vec![Err(e)],
                };
                let mut out = Vec::new();
                for &r in &r_grid {
                    for &sv in &s_grid {
                        out.push(with_tol(checker(&a, &b, r, sv), tol).map(|x| Outcome::from_report(&x)));
                    }
                }
                out
            })]
        }
        "weyl-monotone" => vec![part(DominatedPair, 1, |_, s, tol| {
            let (a, b) = s.pair();
            vec![with_tol(weyl_monotone_check(a, b), tol).map(|r| {
                let mut o = Outcome::from_report(&r);
                o.key = "weyl_monotone".into();
                o
            })]
        })],
        "lieb-thirring" => {
            let s_grid = cfg.grid("s", &[1.0, 1.5, 2.0, 3.0]);
            vec![
                part(Psd, 2, move |_, s, tol| {
                    let (x, y) = match psd_pair(s) {
                        Ok(pair) => pair,
                        Err(e) => return vec![Err(e)],
                    };
                    s_grid
                        .iter()
                        .map(|&sv| {
                            with_tol(traces::lieb_thirring(&x, &y, sv), tol).map(|r| Outcome::from_report(&r))
                        })
                        .collect()
                }),
                epstein_part(vec![1.0, 1.5, 2.0]),
            ]
        }
        "reverse-half" => vec![
            part(Psd, 2, |_, s, tol| {
                vec![psd_pair(s)
                    .and_then(|(a, b)| with_tol(traces::reverse_lt_half(&a, &b), tol))
                    .map(|r| Outcome::from_report(&r))]
            }),
            epstein_part(vec![0.5]),
        ],
        "resolvent" => {
            let t_grid = cfg.grid("t", &[0.1, 1.0, 10.0]);
            vec![part(
                OrderedPair,
                1,
                p_family(t_grid, norms::resolvent_suffice, None),
            )]
        }
        "integral-rep" => {
            let p_grid = cfg.grid("p", &[1.25, 1.5, 1.75]);
            let quad = cfg.quadrature.clone();
            let bound = INTEGRAL_REL_TOL.max(quad.target_rel_error);
            vec![part(Psd, 1, move |index, s, _| {
                let mut out = Vec::new();
                if index == 0 {
                    for &p in &p_grid {
                        out.push(kp_constant_with(p, &quad).map(|kp| {
                            Outcome::bound(
                                format!("kp_constant p={p}"),
                                KP_TOL,
                                (kp - kp_closed_form(p)).abs(),
                            )
                        }));
                    }
                }
                let c = match PsdMatrix::new(s.matrices[0].clone()) {
                    Ok(c) => c,
                    Err(e) => {
                        out.push(Err(e));
                        return out;
                    }
                };
                for &p in &p_grid {
                    let result = matrix_power_via_integral(&c, p, &quad).and_then(|m| {
                        let oracle = matrix_power(&c, p)?;
                        Ok(m.relative_distance(oracle.matrix()))
                    });
                    out.push(result.map(|err| Outcome::bound(format!("integral_rep p={p}"), bound, err)));
                }
                out
            })]
        }
        other => return Err(Error::BadSpec(format!("unknown suite `{other}`"))),
    })
}

fn suite_index(name: &str) -> Result<u64> {
    SUITES
        .iter()
        .position(|&s| s == name)
        .map(|i| i as u64)
        .ok_or_else(|| Error::BadSpec(format!("unknown suite `{name}`")))
}

/// Substream for sample `index` of `part` in suite `suite`.
pub fn stream_index(suite: u64, part: u64, index: usize) -> u64 {
    (suite << 32) | (part << 24) | index as u64
}

fn draw(cfg: &VerifyConfig, suite: u64, part_idx: usize, p: &Part, index: usize) -> Result<Sample> {
    let dim = cfg.dims[index % cfg.dims.len()];
    let spec = EnsembleSpec::new(p.kind, dim, cfg.seed)
        .with_stream(stream_index(suite, part_idx as u64, index))
        .with_count(p.count);
    sample(&spec)
}

fn is_usage_error(e: &Error) -> bool {
    matches!(
        e,
        Error::BadExponent { .. } | Error::NonIntegerS(_) | Error::DomainError(_) | Error::BadSpec(_)
    )
}

/// Rejects parameter grids the checkers refuse, before any sampling.
fn probe(cfg: &VerifyConfig, suite: u64, parts: &[Part]) -> Result<()> {
    for (k, p) in parts.iter().enumerate() {
        let spec = EnsembleSpec::new(p.kind, 2, cfg.seed)
            .with_stream(stream_index(suite, k as u64, (1 << 24) - 1))
            .with_count(p.count);
        let s = sample(&spec)?;
        for result in (p.eval)(0, &s, cfg.tolerance) {
            if let Err(e) = result {
                if is_usage_error(&e) {
                    return Err(e);
                }
            }
        }
    }
    Ok(())
}

fn map_samples<T: Send>(n: usize, f: impl Fn(usize) -> T + Send + Sync) -> Vec<T> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Validates the configuration for one suite without running it.
pub fn check_suite(name: &str, cfg: &VerifyConfig) -> Result<()> {
    cfg.validate()?;
    let suite = suite_index(name)?;
    probe(cfg, suite, &build(name, cfg)?)
}

/// Runs one suite. `Err` means the configuration is unusable; numerical failures are counted in the section.
pub fn run_suite(name: &str, cfg: &VerifyConfig) -> Result<SuiteSection> {
    cfg.validate()?;
    let suite = suite_index(name)?;
    let parts = build(name, cfg)?;
    probe(cfg, suite, &parts)?;
    let mut section = SuiteSection {
        suite: name.to_string(),
        samples: cfg.samples,
        evaluations: 0,
        violations: 0,
        evidence_violations: 0,
        errors: 0,
        first_error: None,
        checks: BTreeMap::new(),
    };
    for (k, p) in parts.iter().enumerate() {
        let results = map_samples(cfg.samples, |i| match draw(cfg, suite, k, p, i) {
            Ok(s) => (p.eval)(i, &s, cfg.tolerance),
            Err(e) => vec![Err(e)],
        });
        for (i, outcomes) in results.into_iter().enumerate() {
            for outcome in outcomes {
                match outcome {
                    Ok(o) => record(&mut section, o, i),
                    Err(e) => {
                        section.errors += 1;
                        if section.first_error.is_none() {
                            section.first_error = Some(format!("sample {i}: {e}"));
                        }
                    }
                }
            }
        }
    }
    Ok(section)
}

fn record(section: &mut SuiteSection, o: Outcome, sample: usize) {
    section.evaluations += 1;
    if o.violated {
        if o.proved {
            section.violations += 1;
        } else {
            section.evidence_violations += 1;
        }
    }
    let stats = section.checks.entry(o.key).or_insert(CheckStats {
        evaluations: 0,
        violations: 0,
        min_margin: f64::INFINITY,
        argmin_sample: sample,
    });
    stats.evaluations += 1;
    if o.violated && o.proved {
        stats.violations += 1;
    }
    if o.margin < stats.min_margin || o.margin.is_nan() {
        stats.min_margin = o.margin;
        stats.argmin_sample = sample;
    }
}

/// Expands `"all"` to every suite.
pub fn resolve(name: &str) -> Result<Vec<&'static str>> {
    if name == "all" {
        return Ok(SUITES.to_vec());
    }
    SUITES
        .iter()
        .find(|&&s| s == name)
        .map(|&s| vec![s])
        .ok_or_else(|| Error::BadSpec(format!("unknown suite `{name}`")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> VerifyConfig {
        VerifyConfig {
            samples: 12,
            dims: vec![2, 3],
            ..VerifyConfig::default()
        }
    }

    #[test]
    fn every_suite_runs_clean_on_a_small_batch() {
        for name in SUITES {
            let section = run_suite(name, &quick()).unwrap();
            assert!(!section.is_defect(), "{name}: {section:?}");
            assert!(section.evaluations >= 12, "{name}");
        }
    }

    #[test]
    fn suite_is_deterministic() {
        let a = run_suite("theorem2", &quick()).unwrap();
        let b = run_suite("theorem2", &quick()).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn updown2_rejects_fractional_s() {
        let cfg = VerifyConfig {
            s: Some(vec![1.5]),
            ..quick()
        };
        assert!(matches!(run_suite("updown2", &cfg), Err(Error::NonIntegerS(_))));
    }

    #[test]
    fn hanner_p2_collapse() {
        let cfg = VerifyConfig {
            p: Some(vec![2.0]),
            ..quick()
        };
        let section = run_suite("hanner-matrix", &cfg).unwrap();
        for (k, stats) in &section.checks {
            if !k.ends_with("equality") {
                assert!(
                    stats.min_margin.abs() <= 1e-10 || stats.min_margin > -1e-10,
                    "{k}"
                );
            }
        }
        assert!(section.min_margin("hanner_matrix p=2 equality").unwrap() >= 0.0);
    }

    #[test]
    fn unknown_suite_and_bad_config() {
        assert!(resolve("nope").is_err());
        assert_eq!(resolve("all").unwrap().len(), 12);
        let cfg = VerifyConfig {
            samples: 0,
            ..quick()
        };
        assert!(run_suite("theorem1", &cfg).is_err());
        let cfg = VerifyConfig {
            t: Some(vec![-1.0]),
            ..quick()
        };
        assert!(matches!(run_suite("resolvent", &cfg), Err(Error::DomainError(_))));
    }
}
