//! CSV encodings for step functions and residual reports.
//!
//! Reals are written with `{:.16e}` (17 significant digits), which
//! round-trips every finite `f64` exactly.

use specshift::StepFunction;

pub const STEP_HEADER: &str = "breakpoint,value";
pub const REPORT_HEADER: &str = "check,engine,residual,bound,pass";

pub fn real(x: f64) -> String {
    format!("{x:.16e}")
}

fn render<I, R>(header: &str, rows: I) -> String
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = ::csv::Writer::from_writer(Vec::new());
    w.write_record(header.split(',')).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

pub fn write_step(xi: &StepFunction) -> String {
    render(
        STEP_HEADER,
        xi.breakpoints().iter().enumerate().map(|(k, &b)| {
            let v = xi.values().get(k).copied().unwrap_or(0);
            [real(b), v.to_string()]
        }),
    )
}

pub fn read_step(text: &str) -> Result<StepFunction, String> {
    let mut r = ::csv::ReaderBuilder::new()
        .trim(::csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = r.headers().map_err(|e| e.to_string())?;
    if header.iter().collect::<Vec<_>>().join(",") != STEP_HEADER {
        return Err(format!("missing header '{STEP_HEADER}'"));
    }
    let mut breakpoints = Vec::new();
    let mut values: Vec<i64> = Vec::new();
    for (k, record) in r.records().enumerate() {
        let record = record.map_err(|e| e.to_string())?;
        let line = k + 2;
        let (b, v) = (&record[0], &record[1]);
        breakpoints.push(
            b.parse::<f64>()
                .map_err(|_| format!("line {line}: bad breakpoint '{b}'"))?,
        );
        values.push(
            v.parse::<i64>()
                .map_err(|_| format!("line {line}: bad value '{v}'"))?,
        );
    }
    match values.pop() {
        None => Ok(StepFunction::zero()),
        Some(0) => StepFunction::new(breakpoints, values).map_err(|e| e.to_string()),
        Some(v) => Err(format!("final row must carry value 0, found {v}")),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub check: String,
    pub engine: String,
    pub residual: f64,
    pub bound: f64,
    pub pass: bool,
}

impl ReportRow {
    /// Row that passes when `residual ≤ bound`.
    pub fn against(check: &str, engine: &str, residual: f64, bound: f64) -> Self {
        Self {
            check: check.into(),
            engine: engine.into(),
            residual,
            bound,
            pass: residual <= bound,
        }
    }
}

pub fn write_report(rows: &[ReportRow]) -> String {
    render(
        REPORT_HEADER,
        rows.iter().map(|r| {
            [
                r.check.clone(),
                r.engine.clone(),
                real(r.residual),
                real(r.bound),
                r.pass.to_string(),
            ]
        }),
    )
}

/// Header plus pre-formatted rows, for the ad hoc tables of `ssf`, `flow`,
/// `decompose` and `compare-engines`.
pub fn write_table(header: &str, rows: Vec<Vec<String>>) -> String {
    render(header, rows)
}
