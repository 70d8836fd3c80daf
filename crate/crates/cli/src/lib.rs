//! Implementation of the `bellkit` command-line tool.
//!
//! [`run`] executes a parsed [`Cli`] and writes the report to the given
//! sink; the binary only adds thread-pool setup and exit-code mapping.

pub mod args;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::fs;
use std::io::{self, Write};

use bell_core::analysis::{
    canonical_gghz_settings, gghz_violation_closed, mabk_threshold_visibility, max_violation, optimize_settings,
    quantum_value, threshold_visibility, Method, OptimizerConfig, ViolationReport,
};
use bell_core::bell::{extended_terms, mabk_sign_table, term_count, wwzb_terms, SignTable, TermMap, MAX_PARTIES};
use bell_core::lhv::{verify_bound, verify_bound_sharded, BoundReport, EXHAUSTIVE_MAX_PARTIES};
use bell_core::observables::ObserverSettings;
use bell_core::report::{format_g17, G17};
use bell_core::states::{cluster4, generalized_ghz, ghz, noisy_ghz, w_state, QuantumState};
use bell_core::BellError;
use serde::Serialize;
use thiserror::Error;

pub use args::{Cli, Command, Format, SignSource, THREADS_ENV};
use args::{LhvArgs, MaxEigArgs, OperatorArgs, SweepArgs, TermsArgs, ViolationArgs, VisibilityArgs};

/// Tolerance above the local bound that counts as a violation.
pub const VIOLATION_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Bell(#[from] BellError),
    #[error("validation error: {0}")]
    Invalid(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 2 for invalid input, 3 for exceeded size limits, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Bell(e) if e.is_capacity() => 3,
            CliError::Bell(_) | CliError::Invalid(_) => 2,
            _ => 1,
        }
    }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Invalid(msg.into())
}

/// Builds the global rayon pool when a thread count is given.
pub fn configure_threads(threads: Option<usize>) -> Result<(), CliError> {
    match threads {
        None => Ok(()),
        Some(0) => Err(invalid("thread count must be positive")),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| invalid(format!("cannot configure thread pool: {e}"))),
    }
}

/// Runs one subcommand, writing its report to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Violation(a) => violation(a, out),
        Command::SweepAlpha(a) => sweep_alpha(a, out),
        Command::LhvBound(a) => lhv_bound(a, out),
        Command::MaxEig(a) => max_eig(a, out),
        Command::Visibility(a) => visibility(a, out),
        Command::Terms(a) => terms(a, out),
    }
}

fn check_parties(n: usize) -> Result<(), CliError> {
    if n < 3 {
        return Err(invalid(format!("n must be at least 3, got {n}")));
    }
    if n > MAX_PARTIES {
        return Err(BellError::Capacity {
            what: "number of parties",
            requested: n,
            limit: MAX_PARTIES,
            hint: "",
        }
        .into());
    }
    Ok(())
}

/// Sign table of the inner `(n − 1)`-party operator.
fn inner_sign_table(n: usize, source: &SignSource) -> Result<SignTable, CliError> {
    check_parties(n)?;
    match source {
        SignSource::Mabk => Ok(mabk_sign_table(n - 1)?),
        SignSource::File(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| invalid(format!("cannot read sign table {}: {e}", path.display())))?;
            let table = SignTable::parse(&text)?;
            if table.num_parties() != n - 1 {
                return Err(invalid(format!(
                    "sign table {} has {} entries, an {n}-party operator needs 2^{} = {}",
                    path.display(),
                    table.values().len(),
                    n - 1,
                    1usize << (n - 1)
                )));
            }
            Ok(table)
        }
    }
}

fn operator_terms(n: usize, source: &SignSource) -> Result<TermMap, CliError> {
    let inner = wwzb_terms(&inner_sign_table(n, source)?);
    Ok(extended_terms(&inner)?)
}

fn bound_report(terms: &TermMap) -> Result<BoundReport, CliError> {
    if terms.num_parties() > EXHAUSTIVE_MAX_PARTIES {
        Ok(verify_bound_sharded(terms)?)
    } else {
        Ok(verify_bound(terms)?)
    }
}

/// The local bound: 1 for MABK, enumerated otherwise.
fn local_bound(source: &SignSource, terms: &TermMap) -> Result<f64, CliError> {
    match source {
        SignSource::Mabk => Ok(1.0),
        SignSource::File(_) => Ok(bound_report(terms)?.max_value),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum StateKind {
    Ghz,
    Gghz,
    W,
    Cluster4,
    NoisyGhz,
}

impl StateKind {
    fn name(self) -> &'static str {
        match self {
            StateKind::Ghz => "ghz",
            StateKind::Gghz => "gghz",
            StateKind::W => "w",
            StateKind::Cluster4 => "cluster4",
            StateKind::NoisyGhz => "noisy-ghz",
        }
    }
}

/// Parses `name` or `name(parameter)`.
fn parse_state(spec: &str) -> Result<(StateKind, Option<f64>), CliError> {
    let spec = spec.trim();
    let (name, param) = match spec.split_once('(') {
        Some((name, rest)) => {
            let inner = rest
                .strip_suffix(')')
                .ok_or_else(|| invalid(format!("unbalanced parentheses in state {spec:?}")))?;
            let value: f64 = inner
                .trim()
                .parse()
                .map_err(|_| invalid(format!("bad state parameter {inner:?}")))?;
            (name.trim(), Some(value))
        }
        None => (spec, None),
    };
    let kind = match name.to_ascii_lowercase().as_str() {
        "ghz" => StateKind::Ghz,
        "gghz" => StateKind::Gghz,
        "w" => StateKind::W,
        "cluster4" => StateKind::Cluster4,
        "noisy-ghz" => StateKind::NoisyGhz,
        _ => {
            return Err(invalid(format!(
                "unknown state {name:?}; expected ghz, gghz, w, cluster4 or noisy-ghz"
            )))
        }
    };
    Ok((kind, param))
}

fn merge_param(inline: Option<f64>, flag: Option<f64>, what: &str) -> Result<Option<f64>, CliError> {
    match (inline, flag) {
        (Some(a), Some(b)) if a != b => Err(invalid(format!("conflicting {what} values {a} and {b}"))),
        (a, b) => Ok(a.or(b)),
    }
}

fn violation(a: &ViolationArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let (kind, inline) = parse_state(&a.state)?;
    let (alpha, vis) = match kind {
        StateKind::Gghz => (merge_param(inline, a.alpha, "alpha")?, a.visibility),
        StateKind::NoisyGhz => (a.alpha, merge_param(inline, a.visibility, "visibility")?),
        _ if inline.is_some() => return Err(invalid(format!("state {} takes no parameter", kind.name()))),
        _ => (a.alpha, a.visibility),
    };
    if kind != StateKind::Gghz && alpha.is_some() {
        return Err(invalid("--alpha applies only to gghz"));
    }
    if kind != StateKind::NoisyGhz && vis.is_some() {
        return Err(invalid("--visibility applies only to noisy-ghz"));
    }

    let n = match (kind, a.n) {
        (StateKind::Cluster4, None | Some(4)) => 4,
        (StateKind::Cluster4, Some(n)) => return Err(invalid(format!("cluster4 has 4 qubits, got n = {n}"))),
        (_, Some(n)) => n,
        (_, None) => return Err(invalid("--n is required")),
    };
    check_parties(n)?;

    let (state, report_alpha): (QuantumState, Option<f64>) = match kind {
        StateKind::Ghz => (ghz(n)?.into(), Some(FRAC_PI_4)),
        StateKind::Gghz => {
            let alpha = alpha.ok_or_else(|| invalid("gghz needs --alpha or gghz(<alpha>)"))?;
            (generalized_ghz(n, alpha)?.into(), Some(alpha))
        }
        StateKind::NoisyGhz => {
            let v = vis.ok_or_else(|| invalid("noisy-ghz needs --visibility or noisy-ghz(<v>)"))?;
            (noisy_ghz(n, v)?.into(), Some(FRAC_PI_4))
        }
        StateKind::W => (w_state(n)?.into(), None),
        StateKind::Cluster4 => (cluster4().into(), None),
    };

    let terms = operator_terms(n, &a.sign_table)?;
    let lhv = local_bound(&a.sign_table, &terms)?;
    let optimize = a.optimize || report_alpha.is_none();
    let report = if optimize {
        let config = OptimizerConfig {
            starts: a.optimizer.starts,
            max_iterations: a.optimizer.max_iterations,
            tolerance: a.optimizer.tolerance,
            seed: a.optimizer.seed,
        };
        let best = optimize_settings(&state, &terms, &config)?;
        ViolationReport::new(kind.name(), n, best.value, lhv, best.settings, Method::Optimized).with_seed(config.seed)
    } else {
        let settings = canonical_gghz_settings(n, report_alpha.expect("ghz family"))?;
        let value = quantum_value(&state, &terms, &settings)?;
        ViolationReport::new(kind.name(), n, value, lhv, settings, Method::ClosedForm)
    };
    let report = match report_alpha {
        Some(alpha) => report.with_alpha(alpha),
        None => report,
    };
    write_report(&report, a.format, out)
}

fn settings_cell(settings: &[ObserverSettings]) -> String {
    settings
        .iter()
        .map(|s| s.to_angles().iter().map(|&x| format_g17(x)).collect::<Vec<_>>().join(" "))
        .collect::<Vec<_>>()
        .join(";")
}

fn opt_g17(x: Option<f64>) -> String {
    x.map(format_g17).unwrap_or_default()
}

fn write_json(value: &impl Serialize, out: &mut dyn Write) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn write_report(report: &ViolationReport, format: Format, out: &mut dyn Write) -> Result<(), CliError> {
    match format {
        Format::Json => write_json(report, out),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record([
                "state",
                "n",
                "alpha",
                "quantum_value",
                "lhv_bound",
                "violation_factor",
                "method",
                "seed",
                "settings",
            ])?;
            w.write_record([
                report.state_name.clone(),
                report.n.to_string(),
                opt_g17(report.alpha),
                format_g17(report.quantum_value),
                format_g17(report.lhv_bound),
                format_g17(report.violation_factor),
                report.method.as_str().to_owned(),
                report.seed.map(|s| s.to_string()).unwrap_or_default(),
                settings_cell(&report.settings),
            ])?;
            w.flush()?;
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct SweepRow {
    alpha: G17,
    closed_form: G17,
    matrix_value: G17,
    violates: bool,
}

#[derive(Serialize)]
struct SweepJson {
    n: usize,
    rows: Vec<SweepRow>,
}

fn sweep_alpha(a: &SweepArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if a.steps < 2 {
        return Err(invalid(format!("steps must be at least 2, got {}", a.steps)));
    }
    let terms = operator_terms(a.n, &SignSource::Mabk)?;
    let mut rows = Vec::with_capacity(a.steps);
    for i in 0..a.steps {
        let alpha = i as f64 * FRAC_PI_2 / (a.steps - 1) as f64;
        let state: QuantumState = generalized_ghz(a.n, alpha)?.into();
        let settings = canonical_gghz_settings(a.n, alpha)?;
        let value = quantum_value(&state, &terms, &settings)?;
        rows.push(SweepRow {
            alpha: G17(alpha),
            closed_form: G17(gghz_violation_closed(a.n, alpha)),
            matrix_value: G17(value),
            violates: value > 1.0 + VIOLATION_TOL,
        });
    }
    match a.format {
        Format::Json => write_json(&SweepJson { n: a.n, rows }, out),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["alpha", "closed_form", "matrix_value", "violates"])?;
            for r in &rows {
                w.write_record([
                    format_g17(r.alpha.0),
                    format_g17(r.closed_form.0),
                    format_g17(r.matrix_value.0),
                    r.violates.to_string(),
                ])?;
            }
            w.flush()?;
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct BoundJson {
    n: usize,
    term_count: usize,
    max_value: G17,
    holds: bool,
    witness: Vec<[i8; 2]>,
    shards: usize,
}

fn lhv_bound(a: &LhvArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let OperatorArgs { n, sign_table } = &a.operator;
    let terms = operator_terms(*n, sign_table)?;
    let report = if a.sharded { verify_bound_sharded(&terms)? } else { verify_bound(&terms)? };
    let json = BoundJson {
        n: *n,
        term_count: term_count(&terms),
        max_value: G17(report.max_value),
        holds: report.holds,
        witness: report.witness.assignments().iter().map(|&(x, y)| [x, y]).collect(),
        shards: report.shards,
    };
    match a.format {
        Format::Json => write_json(&json, out),
        Format::Csv => {
            let witness = json
                .witness
                .iter()
                .map(|[x, y]| format!("{x} {y}"))
                .collect::<Vec<_>>()
                .join(";");
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["n", "term_count", "max_value", "holds", "witness", "shards"])?;
            w.write_record([
                json.n.to_string(),
                json.term_count.to_string(),
                format_g17(report.max_value),
                json.holds.to_string(),
                witness,
                json.shards.to_string(),
            ])?;
            w.flush()?;
            Ok(())
        }
    }
}

fn max_eig(a: &MaxEigArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let OperatorArgs { n, sign_table } = &a.operator;
    let terms = operator_terms(*n, sign_table)?;
    let settings = canonical_gghz_settings(*n, a.alpha)?;
    let value = max_violation(&terms, &settings)?;
    let lhv = local_bound(sign_table, &terms)?;
    let report = ViolationReport::new("top-eigenvector", *n, value, lhv, settings, Method::Eigen).with_alpha(a.alpha);
    write_report(&report, a.format, out)
}

#[derive(Serialize)]
struct VisibilityJson {
    n: usize,
    v_thr: G17,
    v_thr_mabk: G17,
}

fn visibility(a: &VisibilityArgs, out: &mut dyn Write) -> Result<(), CliError> {
    check_parties(a.n)?;
    let json = VisibilityJson {
        n: a.n,
        v_thr: G17(threshold_visibility(a.n)),
        v_thr_mabk: G17(mabk_threshold_visibility(a.n)),
    };
    match a.format {
        Format::Json => write_json(&json, out),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["n", "v_thr", "v_thr_mabk"])?;
            w.write_record([json.n.to_string(), format_g17(json.v_thr.0), format_g17(json.v_thr_mabk.0)])?;
            w.flush()?;
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct TermJson {
    key: Vec<u8>,
    coeff: G17,
}

#[derive(Serialize)]
struct TermsJson {
    n: usize,
    term_count: usize,
    terms: Vec<TermJson>,
}

fn terms(a: &TermsArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let OperatorArgs { n, sign_table } = &a.operator;
    let map = if a.inner {
        wwzb_terms(&inner_sign_table(*n, sign_table)?)
    } else {
        operator_terms(*n, sign_table)?
    };
    let json = TermsJson {
        n: map.num_parties(),
        term_count: term_count(&map),
        terms: map
            .iter()
            .map(|(k, c)| TermJson {
                key: k.choices().to_vec(),
                coeff: G17(c),
            })
            .collect(),
    };
    match a.format {
        Format::Json => write_json(&json, out),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["key", "coeff"])?;
            for t in &json.terms {
                let key = t.key.iter().map(u8::to_string).collect::<Vec<_>>().join(" ");
                w.write_record([key, format_g17(t.coeff.0)])?;
            }
            w.flush()?;
            Ok(())
        }
    }
}
