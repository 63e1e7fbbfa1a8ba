//! Command-layer glue: machine-readable run reports and the entry points
//! behind the `quatnorm` binary's subcommands.
//!
//! JSON output is deterministic: identical invocations produce identical
//! bytes. Timings are kept out of the JSON payload (they go to stderr, and
//! to the elapsed_ms column in CSV scans). Rationals are serialized as exact
//! numerator and denominator, never as floats.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::algebra::{parse_algebra_spec, GateVerdict, QuaternionAlgebra};
use crate::arith::{isqrt, primes_up_to, SquareClass};
use crate::density::{
    empirical_density, exact_density, outlier_condition, parse_condition, ConditionExpr,
    DensityResult, EmpiricalDensity,
};
use crate::error::Error;
use crate::outliers::{
    enumerate_with_band, is_norm_of_integer, supersingular_report, NormWitness,
    OutlierClassification, QuadraticWitness,
};
use crate::padic::{CertReason, LocalSquareCertificate, Place};

pub const SCHEMA_VERSION: u32 = 1;

/// One complete command run, serializable and reparsable.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub command: String,
    pub algebra: Option<AlgebraSummary>,
    pub results: Payload,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct AlgebraSummary {
    pub finite_ramified: Vec<u64>,
    pub infinite_ramified: bool,
    pub symbol: Option<(i64, i64)>,
}

impl From<&QuaternionAlgebra> for AlgebraSummary {
    fn from(a: &QuaternionAlgebra) -> AlgebraSummary {
        AlgebraSummary {
            finite_ramified: a.finite_ramified().to_vec(),
            infinite_ramified: a.infinite_ramified(),
            symbol: a.symbol(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Payload {
    Check(CheckResult),
    Enumerate(EnumerateResult),
    Density(DensityReport),
    Scan(ScanReport),
    Supersingular(SupersingularResult),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckResult {
    pub m: u64,
    pub outlier: bool,
    /// Largest b tried; a missing witness means the whole range failed.
    pub searched_b_max: u64,
    pub witness: Option<WitnessJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum WitnessJson {
    RationalSquare {
        root: u64,
    },
    Quadratic {
        b: u64,
        d: i64,
        local_certificates: Vec<CertJson>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertJson {
    pub place: String,
    pub value: i64,
    pub valuation: u32,
    pub is_square: bool,
    pub reason: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unit_residue: Option<i64>,
}

impl From<&LocalSquareCertificate> for CertJson {
    fn from(c: &LocalSquareCertificate) -> CertJson {
        let (reason, unit_residue) = match c.reason {
            CertReason::Square => ("square", None),
            CertReason::OddValuation => ("odd valuation", None),
            CertReason::UnitNonResidue { residue } => ("unit non-residue", Some(residue)),
            CertReason::NegativeAtReal => ("negative at the real place", None),
        };
        CertJson {
            place: match c.place {
                Place::Real => "real".to_string(),
                Place::Finite(p) => p.to_string(),
            },
            value: c.value,
            valuation: c.valuation,
            is_square: c.is_square,
            reason: reason.to_string(),
            unit_residue,
        }
    }
}

impl From<&NormWitness> for WitnessJson {
    fn from(w: &NormWitness) -> WitnessJson {
        match w {
            NormWitness::RationalSquare { root, .. } => {
                WitnessJson::RationalSquare { root: *root }
            }
            NormWitness::Quadratic(q) => WitnessJson::from(q),
        }
    }
}

impl From<&QuadraticWitness> for WitnessJson {
    fn from(q: &QuadraticWitness) -> WitnessJson {
        let mut local_certificates: Vec<CertJson> =
            q.local_certs.iter().map(CertJson::from).collect();
        local_certificates.push(CertJson::from(&q.real_cert));
        WitnessJson::Quadratic {
            b: q.b,
            d: q.d,
            local_certificates,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnumerateResult {
    pub c: u64,
    pub m_bound: u64,
    pub gate: String,
    pub base_outliers: Vec<u64>,
    pub closure_rule: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verified_band: Option<u64>,
}

fn gate_string(gate: GateVerdict) -> String {
    match gate {
        GateVerdict::PossiblyHasOutliers => "possibly_has_outliers".to_string(),
        GateVerdict::NoOutliers(reason) => format!("no_outliers: {reason}"),
    }
}

impl From<&OutlierClassification> for EnumerateResult {
    fn from(c: &OutlierClassification) -> EnumerateResult {
        EnumerateResult {
            c: c.c,
            m_bound: c.m_bound,
            gate: gate_string(c.gate),
            base_outliers: c.base_outliers.clone(),
            closure_rule: c.closure_rule.to_string(),
            verified_band: c.verified_band,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct RatioJson {
    pub numerator: u64,
    pub denominator: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityReport {
    pub condition: String,
    pub satisfying: u64,
    pub rank: u32,
    pub basis: Vec<i64>,
    pub density: RatioJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub empirical: Option<EmpiricalJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmpiricalJson {
    pub prime_bound: u64,
    pub satisfied: u64,
    pub sample: u64,
    pub excluded: u64,
    pub fraction: RatioJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanReport {
    pub mode: String,
    pub max_prime: u64,
    pub rows: Vec<ScanRow>,
    pub summary: ScanSummary,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanRow {
    pub r: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outlier: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base_outliers: Option<Vec<u64>>,
    pub m_bound: u64,
    #[serde(skip)]
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanSummary {
    pub satisfied: u64,
    pub total: u64,
    pub fraction: RatioJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SupersingularResult {
    pub m: u64,
    pub p: u64,
    pub outlier: bool,
    pub text: String,
    pub witness: Option<WitnessJson>,
}

fn reduced_ratio(num: u64, den: u64) -> RatioJson {
    fn gcd(mut a: u64, mut b: u64) -> u64 {
        while b != 0 {
            let t = b;
            b = a % b;
            a = t;
        }
        a
    }
    let g = gcd(num, den).max(1);
    RatioJson {
        numerator: num / g,
        denominator: den / g,
    }
}

fn finish(
    command: String,
    algebra: Option<AlgebraSummary>,
    results: Payload,
    started: Instant,
) -> RunReport {
    RunReport {
        schema_version: SCHEMA_VERSION,
        command,
        algebra,
        results,
        elapsed: started.elapsed(),
    }
}

/// `check <m> --algebra <spec>`: outlier or norm, with a full witness.
pub fn cmd_check(m: u64, algebra_spec: &str) -> Result<RunReport, Error> {
    let started = Instant::now();
    let algebra = parse_algebra_spec(algebra_spec)?;
    let (norm, witness) = is_norm_of_integer(m, &algebra)?;
    let results = Payload::Check(CheckResult {
        m,
        outlier: !norm,
        searched_b_max: isqrt(4 * m),
        witness: witness.as_ref().map(WitnessJson::from),
    });
    Ok(finish(
        format!("check {m} --algebra {algebra_spec}"),
        Some(AlgebraSummary::from(&algebra)),
        results,
        started,
    ))
}

/// `enumerate --algebra <spec> [--verify-band k]`: complete outlier set.
pub fn cmd_enumerate(algebra_spec: &str, verify_band: Option<u64>) -> Result<RunReport, Error> {
    let started = Instant::now();
    let algebra = parse_algebra_spec(algebra_spec)?;
    let classification = enumerate_with_band(&algebra, verify_band)?;
    let command = match verify_band {
        Some(k) => format!("enumerate --algebra {algebra_spec} --verify-band {k}"),
        None => format!("enumerate --algebra {algebra_spec}"),
    };
    Ok(finish(
        command,
        Some(AlgebraSummary::from(&algebra)),
        Payload::Enumerate(EnumerateResult::from(&classification)),
        started,
    ))
}

/// Query for `density`: a landmark integer or a condition expression.
#[derive(Debug, Clone)]
pub enum DensityQuery {
    OutlierOf(u64),
    Expr(String),
}

fn condition_text(expr: &ConditionExpr) -> String {
    fn rec(e: &ConditionExpr, out: &mut String) {
        match e {
            ConditionExpr::True => out.push_str("true"),
            ConditionExpr::False => out.push_str("false"),
            ConditionExpr::Sym { class, target } => {
                let _ = write!(out, "sym({})={}", class.representative(), target);
            }
            ConditionExpr::Not(inner) => {
                out.push('!');
                out.push('(');
                rec(inner, out);
                out.push(')');
            }
            ConditionExpr::And(a, b) => {
                out.push('(');
                rec(a, out);
                out.push_str(" & ");
                rec(b, out);
                out.push(')');
            }
            ConditionExpr::Or(a, b) => {
                out.push('(');
                rec(a, out);
                out.push_str(" | ");
                rec(b, out);
                out.push(')');
            }
        }
    }
    let mut out = String::new();
    rec(expr, &mut out);
    out
}

/// `density --m <m> | --expr <text> [--empirical <bound>]`.
pub fn cmd_density(query: &DensityQuery, empirical: Option<u64>) -> Result<RunReport, Error> {
    let started = Instant::now();
    if let Some(bound) = empirical {
        if bound < 100 {
            return Err(Error::Usage(
                "--empirical bound must be at least 100".to_string(),
            ));
        }
    }
    let (expr, command_core) = match query {
        DensityQuery::OutlierOf(m) => (outlier_condition(*m)?, format!("density --m {m}")),
        DensityQuery::Expr(text) => (parse_condition(text)?, format!("density --expr {text}")),
    };
    let exact: DensityResult = exact_density(&expr)?;
    let (num, den) = exact.density();
    let empirical_json = empirical.map(|bound| {
        let e: EmpiricalDensity = empirical_density(&expr, bound);
        EmpiricalJson {
            prime_bound: bound,
            satisfied: e.satisfied,
            sample: e.sample,
            excluded: e.excluded,
            fraction: reduced_ratio(e.satisfied, e.sample.max(1)),
        }
    });
    let command = match empirical {
        Some(bound) => format!("{command_core} --empirical {bound}"),
        None => command_core,
    };
    let results = Payload::Density(DensityReport {
        condition: condition_text(&expr),
        satisfying: exact.satisfying,
        rank: exact.rank,
        basis: exact.basis.iter().map(SquareClass::representative).collect(),
        density: RatioJson {
            numerator: num,
            denominator: den,
        },
        empirical: empirical_json,
    });
    Ok(finish(command, None, results, started))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScanMode {
    FixedM(u64),
    NoOutliers,
    BaseSets,
}

impl std::str::FromStr for ScanMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<ScanMode, Error> {
        if let Some(rest) = s.strip_prefix("fixed-m:") {
            let m: u64 = rest
                .parse()
                .map_err(|_| Error::Usage(format!("bad fixed-m value `{rest}`")))?;
            Ok(ScanMode::FixedM(m))
        } else if s == "no-outliers" {
            Ok(ScanMode::NoOutliers)
        } else if s == "base-sets" {
            Ok(ScanMode::BaseSets)
        } else {
            Err(Error::Usage(format!(
                "unknown scan mode `{s}` (expected fixed-m:<m>, no-outliers, or base-sets)"
            )))
        }
    }
}

impl std::fmt::Display for ScanMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ScanMode::FixedM(m) => write!(f, "fixed-m:{m}"),
            ScanMode::NoOutliers => write!(f, "no-outliers"),
            ScanMode::BaseSets => write!(f, "base-sets"),
        }
    }
}

/// `scan --max-prime <N> --mode <mode>`: per-prime verdicts across r <= N.
pub fn cmd_scan(max_prime: u64, mode: ScanMode) -> Result<RunReport, Error> {
    let started = Instant::now();
    if max_prime < 10 {
        return Err(Error::Usage("--max-prime must be at least 10".to_string()));
    }
    if !matches!(mode, ScanMode::FixedM(_)) && max_prime > 1000 {
        return Err(Error::Usage(
            "enumeration scans are capped at --max-prime 1000".to_string(),
        ));
    }
    if max_prime > 100_000_000 {
        return Err(Error::Usage(
            "fixed-m scans are capped at --max-prime 100000000".to_string(),
        ));
    }
    let primes = primes_up_to(max_prime);
    let mut rows = Vec::with_capacity(primes.len());
    let mut satisfied = 0u64;
    for &r in &primes {
        let row_start = Instant::now();
        let algebra = QuaternionAlgebra::a_r(r)?;
        let row = match mode {
            ScanMode::FixedM(m) => {
                let (norm, _) = is_norm_of_integer(m, &algebra)?;
                if !norm {
                    satisfied += 1;
                }
                ScanRow {
                    r,
                    outlier: Some(!norm),
                    base_outliers: None,
                    m_bound: r * r / 16,
                    elapsed_ms: row_start.elapsed().as_millis() as u64,
                }
            }
            ScanMode::NoOutliers | ScanMode::BaseSets => {
                let classification = enumerate_with_band(&algebra, None)?;
                if !classification.has_outliers() {
                    satisfied += 1;
                }
                ScanRow {
                    r,
                    outlier: None,
                    base_outliers: Some(classification.base_outliers),
                    m_bound: classification.m_bound,
                    elapsed_ms: row_start.elapsed().as_millis() as u64,
                }
            }
        };
        rows.push(row);
    }
    let total = primes.len() as u64;
    let results = Payload::Scan(ScanReport {
        mode: mode.to_string(),
        max_prime,
        rows,
        summary: ScanSummary {
            satisfied,
            total,
            fraction: reduced_ratio(satisfied, total.max(1)),
        },
    });
    Ok(finish(
        format!("scan --max-prime {max_prime} --mode {mode}"),
        None,
        results,
        started,
    ))
}

/// `report <m> <p>`: the supersingular-endomorphism reading of the verdict.
pub fn cmd_report(m: u64, p: u64) -> Result<RunReport, Error> {
    let started = Instant::now();
    let rep = supersingular_report(m, p)?;
    let algebra = QuaternionAlgebra::a_r(p)?;
    let results = Payload::Supersingular(SupersingularResult {
        m: rep.m,
        p: rep.p,
        outlier: rep.outlier,
        text: rep.text,
        witness: rep.witness.as_ref().map(WitnessJson::from),
    });
    Ok(finish(
        format!("report {m} {p}"),
        Some(AlgebraSummary::from(&algebra)),
        results,
        started,
    ))
}

/// Deterministic pretty JSON with a trailing newline.
pub fn to_json(report: &RunReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

/// CSV for scans: fixed columns r, verdict_or_set, M, elapsed_ms.
/// For enumerations: one row per base outlier with columns m0, M, C.
pub fn to_csv(report: &RunReport) -> Result<String, Error> {
    let mut out = String::new();
    match &report.results {
        Payload::Scan(scan) => {
            out.push_str("r,verdict_or_set,M,elapsed_ms\n");
            for row in &scan.rows {
                let verdict = match (&row.outlier, &row.base_outliers) {
                    (Some(true), _) => "outlier".to_string(),
                    (Some(false), _) => "norm".to_string(),
                    (None, Some(set)) => {
                        let inner: Vec<String> =
                            set.iter().map(|m| m.to_string()).collect();
                        format!("{{{}}}", inner.join(";"))
                    }
                    (None, None) => String::new(),
                };
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    row.r, verdict, row.m_bound, row.elapsed_ms
                );
            }
            Ok(out)
        }
        Payload::Enumerate(e) => {
            out.push_str("m0,M,C\n");
            for m0 in &e.base_outliers {
                let _ = writeln!(out, "{},{},{}", m0, e.m_bound, e.c);
            }
            Ok(out)
        }
        _ => Err(Error::Usage(
            "--csv is only available for scan and enumerate".to_string(),
        )),
    }
}

fn fmt_ratio(r: &RatioJson) -> String {
    format!(
        "{}/{} = {:.6}",
        r.numerator,
        r.denominator,
        r.numerator as f64 / r.denominator as f64
    )
}

/// Plain-text rendering for terminals.
pub fn to_human(report: &RunReport) -> String {
    let mut out = String::new();
    if let Some(alg) = &report.algebra {
        let mut places: Vec<String> =
            alg.finite_ramified.iter().map(|p| p.to_string()).collect();
        if alg.infinite_ramified {
            places.push("inf".to_string());
        }
        let _ = writeln!(out, "algebra: ramified at {{{}}}", places.join(", "));
    }
    match &report.results {
        Payload::Check(c) => {
            if c.outlier {
                let _ = writeln!(
                    out,
                    "{} is an outlier: no b in [0, {}] makes t^2 + bt + {} irreducible at every ramified place",
                    c.m, c.searched_b_max, c.m
                );
            } else {
                match &c.witness {
                    Some(WitnessJson::RationalSquare { root }) => {
                        let _ = writeln!(
                            out,
                            "{} is the norm of the rational integer {root}",
                            c.m
                        );
                    }
                    Some(WitnessJson::Quadratic { b, d, .. }) => {
                        let _ = writeln!(
                            out,
                            "{} is the norm of an integer: {} (d = {d})",
                            c.m,
                            crate::outliers::witness_polynomial(*b, c.m)
                        );
                    }
                    None => {}
                }
            }
        }
        Payload::Enumerate(e) => {
            let _ = writeln!(out, "gate: {}", e.gate);
            let _ = writeln!(out, "C = {}, M = {}", e.c, e.m_bound);
            let base: Vec<String> = e.base_outliers.iter().map(|m| m.to_string()).collect();
            let _ = writeln!(out, "base outliers: {{{}}}", base.join(", "));
            let _ = writeln!(out, "full outlier set: {}", e.closure_rule);
            if let Some(hi) = e.verified_band {
                let _ = writeln!(out, "band (M, {hi}] verified: no further reduced outliers");
            }
        }
        Payload::Density(d) => {
            let _ = writeln!(out, "condition: {}", d.condition);
            let _ = writeln!(
                out,
                "exact density: {} (satisfying {} of 2^{})",
                fmt_ratio(&d.density),
                d.satisfying,
                d.rank
            );
            let basis: Vec<String> = d.basis.iter().map(|b| b.to_string()).collect();
            let _ = writeln!(out, "basis: [{}]", basis.join(", "));
            if let Some(e) = &d.empirical {
                let _ = writeln!(
                    out,
                    "empirical to {}: {} of {} primes ({:.6}), {} excluded",
                    e.prime_bound,
                    e.satisfied,
                    e.sample,
                    e.satisfied as f64 / e.sample.max(1) as f64,
                    e.excluded
                );
            }
        }
        Payload::Scan(s) => {
            for row in &s.rows {
                match (&row.outlier, &row.base_outliers) {
                    (Some(v), _) => {
                        let _ = writeln!(
                            out,
                            "r = {}: {}",
                            row.r,
                            if *v { "outlier" } else { "norm" }
                        );
                    }
                    (None, Some(set)) => {
                        let inner: Vec<String> = set.iter().map(|m| m.to_string()).collect();
                        let _ = writeln!(
                            out,
                            "r = {}: base {{{}}} (M = {})",
                            row.r,
                            inner.join(", "),
                            row.m_bound
                        );
                    }
                    _ => {}
                }
            }
            let _ = writeln!(
                out,
                "summary: {} of {} primes ({})",
                s.summary.satisfied,
                s.summary.total,
                fmt_ratio(&s.summary.fraction)
            );
        }
        Payload::Supersingular(r) => {
            let _ = writeln!(out, "{}", r.text);
        }
    }
    out
}

/// Exit code policy: 1 for usage/parse problems, 2 for domain errors.
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Parse { .. } | Error::AlgebraSpec(_) | Error::Usage(_) => 1,
        _ => 2,
    }
}
