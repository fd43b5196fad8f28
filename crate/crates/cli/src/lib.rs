//! Batch front end for `specshift`: file formats, the `verify` suite and the
//! subcommand dispatcher behind the `specshift` binary.

// `!(a < b)` rejects NaN along with out-of-order input.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod csv;
mod error;
pub mod manifest;
pub mod mtx;
pub mod spec;
pub mod suite;

use std::io::Write as _;
use std::path::Path;

use specshift::decomposition::ssf_part;
use specshift::engines::{ssf_averaging, ssf_counting, ssf_krein};
use specshift::flow::spectral_flow;
use specshift::{
    EngineChoice, Family, HermitianOperator, KreinSchedule, Label, LabeledPath, PerturbationPath,
    TestFunction,
};

pub use config::{Cli, JobConfig, Subcommand};
pub use error::CliError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

/// Output text plus whether every verification row passed.
struct Outcome {
    text: String,
    passed: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Self { text, passed: true }
    }
}

pub(crate) fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io {
        input: path.display().to_string(),
        msg: e.to_string(),
    })
}

pub fn load_operator(path: &Path) -> Result<HermitianOperator, CliError> {
    let text = read_text(path)?;
    mtx::parse(&text).map_err(|e| match e {
        mtx::MtxError::Syntax { .. } => CliError::Parse {
            input: path.display().to_string(),
            msg: e.to_string(),
        },
        mtx::MtxError::Operator(source) => CliError::module("load", path, source),
    })
}

fn inputs(config: &JobConfig) -> String {
    [&config.h0, &config.h1, &config.v]
        .iter()
        .filter_map(|p| p.as_ref().map(|p| p.display().to_string()))
        .collect::<Vec<_>>()
        .join(", ")
}

fn module<'a>(
    op: &'static str,
    config: &'a JobConfig,
) -> impl Fn(specshift::Error) -> CliError + 'a {
    move |source| CliError::Module {
        op,
        input: inputs(config),
        source,
    }
}

fn load_path(config: &JobConfig, op: &'static str) -> Result<PerturbationPath, CliError> {
    let h0 = load_operator(config.h0.as_deref().expect("validated"))?;
    let path = match (&config.h1, &config.v) {
        (Some(h1), None) => PerturbationPath::between(&h0, &load_operator(h1)?),
        (None, Some(v)) => PerturbationPath::new(h0, load_operator(v)?),
        _ => unreachable!("validated"),
    };
    path.map_err(module(op, config))
}

fn ssf(config: &JobConfig) -> Result<Outcome, CliError> {
    let path = load_path(config, "ssf")?;
    let err = module("ssf", config);
    let text = match config.engine {
        EngineChoice::Counting => {
            csv::write_step(&ssf_counting(path.h0(), &path.endpoint()).map_err(&err)?)
        }
        EngineChoice::Averaging => {
            let phi = config.phi.as_ref().expect("validated");
            let value = ssf_averaging(&path, phi, config.tol).map_err(&err)?;
            csv::write_table(
                "engine,xi_phi",
                vec![vec!["averaging".into(), csv::real(value)]],
            )
        }
        EngineChoice::Krein => {
            let grid = config.grid.clone().expect("validated");
            let sched = KreinSchedule::for_path(&path, grid).map_err(&err)?;
            let rows = ssf_krein(&path, &sched)
                .map_err(&err)?
                .into_iter()
                .map(|(lambda, xi)| vec![csv::real(lambda), csv::real(xi)])
                .collect();
            csv::write_table("lambda,xi", rows)
        }
    };
    Ok(Outcome::ok(text))
}

fn flow(config: &JobConfig) -> Result<Outcome, CliError> {
    let path = load_path(config, "flow")?;
    let lambda = config.lambda.expect("validated");
    let n = spectral_flow(&path, lambda, config.max_step).map_err(module("flow", config))?;
    Ok(Outcome::ok(csv::write_table(
        "lambda,flow",
        vec![vec![csv::real(lambda), n.to_string()]],
    )))
}

fn decompose(config: &JobConfig) -> Result<Outcome, CliError> {
    let err = module("decompose", config);
    let h0 = manifest::load(config.h0.as_deref().expect("validated"))?;
    let path = match (&config.h1, &config.v) {
        (Some(h1), None) => {
            let h1 = manifest::load(h1)?;
            LabeledPath::new(h0.clone(), h1.checked_sub(&h0).map_err(&err)?)
        }
        (None, Some(v)) if read_text(v)?.trim_start().starts_with("%%MatrixMarket") => {
            LabeledPath::from_full_perturbation(h0, &load_operator(v)?)
        }
        (None, Some(v)) => LabeledPath::new(h0, manifest::load(v)?),
        _ => unreachable!("validated"),
    }
    .map_err(&err)?;
    let phi = config.phi.as_ref().expect("validated");
    let ac = ssf_part(&path, Label::Ac, phi, config.tol).map_err(&err)?;
    let sing = ssf_part(&path, Label::Sing, phi, config.tol).map_err(&err)?;
    let total = ssf_averaging(&path.flattened(), phi, config.tol).map_err(&err)?;
    let rows = [("AC", ac), ("SING", sing), ("total", total)]
        .iter()
        .map(|&(part, x)| vec![part.to_string(), csv::real(x)])
        .collect();
    Ok(Outcome::ok(csv::write_table("part,xi_phi", rows)))
}

fn verify(config: &JobConfig) -> Result<Outcome, CliError> {
    let rows =
        suite::run_suite(config.seed, config.tol).map_err(|(check, source)| CliError::Module {
            op: "verify",
            input: format!("check {check}, seed {}", config.seed),
            source,
        })?;
    Ok(Outcome {
        passed: rows.iter().all(|r| r.pass),
        text: csv::write_report(&rows),
    })
}

/// Bump centred at `lambda` whose support avoids every eigenvalue.
fn probe(lambda: f64, eigen: &[f64]) -> Option<TestFunction> {
    let gap = eigen
        .iter()
        .map(|e| (lambda - e).abs())
        .fold(f64::INFINITY, f64::min);
    let half = (0.5 * gap).min(0.25);
    TestFunction::new(Family::SmoothBump, lambda - half, lambda + half, 1.0).ok()
}

fn compare_engines(config: &JobConfig) -> Result<Outcome, CliError> {
    const AVERAGING_BOUND: f64 = 1e-6;
    const KREIN_BOUND: f64 = 1e-3;
    let path = load_path(config, "compare-engines")?;
    let err = module("compare-engines", config);
    let h1 = path.endpoint();
    let xi = ssf_counting(path.h0(), &h1).map_err(&err)?;
    let grid = config.grid.clone().expect("validated");
    let sched = KreinSchedule::for_path(&path, grid.clone()).map_err(&err)?;
    let krein = ssf_krein(&path, &sched).map_err(&err)?;
    let eigen: Vec<f64> = path
        .h0()
        .eigenvalues()
        .iter()
        .chain(h1.eigenvalues())
        .copied()
        .collect();

    let mut passed = true;
    let mut rows = Vec::with_capacity(grid.len());
    for (&lambda, &(_, k)) in grid.iter().zip(&krein) {
        let count = xi.evaluate(lambda);
        let phi = probe(lambda, &eigen).ok_or_else(|| {
            err(specshift::Error::InvalidArgument(format!(
                "no eigenvalue-free window around lambda {lambda}"
            )))
        })?;
        let mass = phi.integral(1e-3 * config.tol).map_err(&err)?;
        let avg = ssf_averaging(&path, &phi, config.tol * mass).map_err(&err)? / mass;
        let ok = (avg - count as f64).abs() <= AVERAGING_BOUND.max(config.tol)
            && (k - count as f64).abs() <= KREIN_BOUND;
        passed &= ok;
        rows.push(vec![
            csv::real(lambda),
            count.to_string(),
            csv::real(avg),
            csv::real(k),
            ok.to_string(),
        ]);
    }
    Ok(Outcome {
        text: csv::write_table("lambda,counting,averaging,krein,pass", rows),
        passed,
    })
}

fn execute(config: &JobConfig) -> Result<Outcome, CliError> {
    config.validate()?;
    match config.subcommand {
        Subcommand::Ssf => ssf(config),
        Subcommand::Flow => flow(config),
        Subcommand::Decompose => decompose(config),
        Subcommand::Verify => verify(config),
        Subcommand::CompareEngines => compare_engines(config),
    }
}

fn emit(config: &JobConfig, text: &str) -> Result<(), CliError> {
    match &config.out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io {
            input: path.display().to_string(),
            msg: e.to_string(),
        }),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io {
                input: "stdout".into(),
                msg: e.to_string(),
            }),
    }
}

/// Runs one job and returns the process exit code: 0 on success, 1 when a
/// verification row fails (the output is still written), 2 on input or
/// module errors (one diagnostic line on stderr).
pub fn run(config: &JobConfig) -> i32 {
    finish(config, execute(config))
}

fn finish(config: &JobConfig, result: Result<Outcome, CliError>) -> i32 {
    let result = result.and_then(|outcome| {
        emit(config, &outcome.text)?;
        Ok(outcome.passed)
    });
    match result {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_VERIFICATION,
        Err(e) => {
            eprintln!("specshift {}: {e}", config.subcommand.as_str());
            EXIT_INPUT
        }
    }
}
