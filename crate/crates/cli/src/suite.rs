//! Built-in seeded invariant suite behind `verify`.
//!
//! Every check draws its cases from `Generator::for_case(seed, stream)` with
//! a stream id unique to the check, so checks are independent of each other
//! and of scheduling. Checks run concurrently; rows come back in the fixed
//! order of [`CHECKS`].

use rayon::prelude::*;
use specshift::decomposition::{part_additivity_residual, ssf_part, weak_continuity_table};
use specshift::engines::{
    additivity_residual, guard_distance, ssf_averaging, ssf_counting, ssf_krein, trace_difference,
};
use specshift::flow::spectral_flow;
use specshift::random::Generator;
use specshift::testfn::{pair_density, pair_derivative};
use specshift::{
    EngineChoice, Family, HermitianOperator, KreinSchedule, Label, LabeledOperator, LabeledPath,
    PerturbationPath, Result,
};

use crate::csv::{self, ReportRow};

pub const LAYOUT: [(usize, Label); 2] = [(3, Label::Ac), (2, Label::Sing)];
const FAMILIES: [Family; 3] = [
    Family::SmoothBump,
    Family::RaisedCosine,
    Family::CubicSplineHat,
];

type Check = fn(&Ctx) -> Result<ReportRow>;

pub struct Ctx {
    seed: u64,
    tol: f64,
    stream: u64,
}

impl Ctx {
    fn case(&self, k: u64) -> Generator {
        Generator::for_case(self.seed, (self.stream << 32) | k)
    }
}

pub const CHECKS: &[(&str, Check)] = &[
    ("trace_formula", trace_formula),
    ("averaging_formula", averaging_formula),
    ("additivity_counting", additivity_counting),
    ("additivity_averaging", additivity_averaging),
    ("additivity_krein", additivity_krein),
    ("antisymmetry", antisymmetry),
    ("mass_identity", mass_identity),
    ("part_additivity_ac", part_additivity_ac),
    ("part_additivity_sing", part_additivity_sing),
    ("decomposition_sum", decomposition_sum),
    ("weak_continuity_bound", weak_continuity_bound),
    ("averaging_bound", averaging_bound),
    ("flow_identity", flow_identity),
    ("krein_engine", krein_engine),
    ("step_csv_roundtrip", step_csv_roundtrip),
];

fn worst(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

fn pair(g: &mut Generator, max_dim: usize) -> (HermitianOperator, HermitianOperator) {
    let n = g.integer(1, max_dim);
    (g.hermitian(n), g.hermitian(n))
}

fn trace_formula(c: &Ctx) -> Result<ReportRow> {
    let mut r = Vec::new();
    for k in 0..200 {
        let mut g = c.case(k);
        let (h0, v) = pair(&mut g, 8);
        let h1 = h0.checked_add(&v)?;
        let xi = ssf_counting(&h0, &h1)?;
        for f in FAMILIES {
            let phi = g.test_function(f);
            r.push((trace_difference(&h0, &h1, &phi)? - pair_derivative(&xi, &phi)).abs());
        }
    }
    Ok(ReportRow::against(
        "trace_formula",
        "counting",
        worst(r),
        1e-10,
    ))
}

fn averaging_formula(c: &Ctx) -> Result<ReportRow> {
    let mut r = Vec::new();
    for k in 0..50 {
        let mut g = c.case(k);
        let (h0, v) = pair(&mut g, 6);
        let phi = g.test_function(FAMILIES[k as usize % 3]);
        let xi = ssf_counting(&h0, &h0.checked_add(&v)?)?;
        let path = PerturbationPath::new(h0, v)?;
        r.push((ssf_averaging(&path, &phi, c.tol)? - pair_density(&xi, &phi, c.tol)?).abs());
    }
    let bound = 1e-6_f64.max(3.0 * c.tol);
    Ok(ReportRow::against(
        "averaging_formula",
        "averaging",
        worst(r),
        bound,
    ))
}

fn triple_residual(c: &Ctx, count: u64, max_dim: usize, engine: EngineChoice) -> Result<f64> {
    let mut r = Vec::new();
    for k in 0..count {
        let mut g = c.case(k);
        let n = g.integer(1, max_dim);
        let (h0, v1, v2) = (g.hermitian(n), g.hermitian(n), g.hermitian(n));
        let phi = g.test_function(Family::SmoothBump);
        r.push(additivity_residual(&h0, &v1, &v2, &phi, engine, c.tol)?);
    }
    Ok(worst(r))
}

fn additivity_counting(c: &Ctx) -> Result<ReportRow> {
    let r = triple_residual(c, 100, 6, EngineChoice::Counting)?;
    Ok(ReportRow::against("additivity", "counting", r, 0.0))
}

fn additivity_averaging(c: &Ctx) -> Result<ReportRow> {
    let r = triple_residual(c, 20, 5, EngineChoice::Averaging)?;
    Ok(ReportRow::against(
        "additivity",
        "averaging",
        r,
        3.0 * c.tol,
    ))
}

fn additivity_krein(c: &Ctx) -> Result<ReportRow> {
    let r = triple_residual(c, 5, 3, EngineChoice::Krein)?;
    Ok(ReportRow::against("additivity", "krein", r, 3e-3))
}

fn antisymmetry(c: &Ctx) -> Result<ReportRow> {
    let mut r = Vec::new();
    for k in 0..100 {
        let (h0, v) = pair(&mut c.case(k), 8);
        let h1 = h0.checked_add(&v)?;
        let sum = &ssf_counting(&h0, &h1)? + &ssf_counting(&h1, &h0)?;
        r.push(if sum.is_zero() {
            0.0
        } else {
            sum.l1_norm().max(f64::MIN_POSITIVE)
        });
    }
    Ok(ReportRow::against(
        "antisymmetry",
        "counting",
        worst(r),
        0.0,
    ))
}

fn mass_identity(c: &Ctx) -> Result<ReportRow> {
    let mut r = Vec::new();
    for k in 0..100 {
        let (h0, v) = pair(&mut c.case(k), 8);
        let xi = ssf_counting(&h0, &h0.checked_add(&v)?)?;
        r.push((xi.integral() - v.trace()).abs());
    }
    Ok(ReportRow::against(
        "mass_identity",
        "counting",
        worst(r),
        1e-10,
    ))
}

fn labeled_triple(g: &mut Generator) -> (LabeledOperator, LabeledOperator, LabeledOperator) {
    (g.labeled(&LAYOUT), g.labeled(&LAYOUT), g.labeled(&LAYOUT))
}

fn part_additivity(c: &Ctx, label: Label, name: &str) -> Result<ReportRow> {
    let mut r = Vec::new();
    for k in 0..10 {
        let mut g = c.case(k);
        let (h0, v1, v2) = labeled_triple(&mut g);
        let phi = g.test_function(Family::SmoothBump);
        r.push(part_additivity_residual(&h0, &v1, &v2, label, &phi, c.tol)?);
    }
    Ok(ReportRow::against(name, "averaging", worst(r), 3.0 * c.tol))
}

fn part_additivity_ac(c: &Ctx) -> Result<ReportRow> {
    part_additivity(c, Label::Ac, "part_additivity_ac")
}

fn part_additivity_sing(c: &Ctx) -> Result<ReportRow> {
    part_additivity(c, Label::Sing, "part_additivity_sing")
}

fn decomposition_sum(c: &Ctx) -> Result<ReportRow> {
    let mut r = Vec::new();
    for k in 0..10 {
        let mut g = c.case(k);
        let path = LabeledPath::new(g.labeled(&LAYOUT), g.labeled(&LAYOUT))?;
        let phi = g.test_function(Family::RaisedCosine);
        let parts =
            ssf_part(&path, Label::Ac, &phi, c.tol)? + ssf_part(&path, Label::Sing, &phi, c.tol)?;
        r.push((parts - ssf_averaging(&path.flattened(), &phi, c.tol)?).abs());
    }
    Ok(ReportRow::against(
        "decomposition_sum",
        "averaging",
        worst(r),
        3.0 * c.tol,
    ))
}

fn weak_continuity_bound(c: &Ctx) -> Result<ReportRow> {
    let mut r = Vec::new();
    for k in 0..5 {
        let mut g = c.case(k);
        let (h0, v) = (g.labeled(&LAYOUT), g.labeled(&LAYOUT));
        let phi = g.test_function(Family::SmoothBump);
        let vseq: Vec<_> = (2..=6).map(|n| v.scaled(1.0 - 1.0 / n as f64)).collect();
        for row in weak_continuity_table(&h0, &v, &vseq, &phi, c.tol)? {
            r.push(row.ssf_gap / row.bound(&phi, c.tol));
        }
    }
    Ok(ReportRow::against(
        "weak_continuity_bound",
        "averaging",
        worst(r),
        1.0,
    ))
}

fn averaging_bound(c: &Ctx) -> Result<ReportRow> {
    let mut r = Vec::new();
    for k in 0..20 {
        let mut g = c.case(k);
        let (h0, v) = pair(&mut g, 6);
        let phi = g.test_function(FAMILIES[k as usize % 3]);
        let bound = v.trace_norm() * phi.sup_norm() + c.tol;
        let path = PerturbationPath::new(h0, v)?;
        r.push(ssf_averaging(&path, &phi, c.tol)?.abs() / bound);
    }
    Ok(ReportRow::against(
        "averaging_bound",
        "averaging",
        worst(r),
        1.0,
    ))
}

/// Level in `[lo, hi]` at least `gap` away from every listed eigenvalue.
pub fn regular_level(g: &mut Generator, eigen: &[f64], lo: f64, hi: f64, gap: f64) -> f64 {
    loop {
        let x = g.uniform(lo, hi);
        if eigen.iter().all(|e| (x - e).abs() >= gap) {
            return x;
        }
    }
}

fn flow_identity(c: &Ctx) -> Result<ReportRow> {
    let mut mismatches = 0usize;
    for k in 0..100 {
        let mut g = c.case(k);
        let (h0, v) = pair(&mut g, 6);
        let path = PerturbationPath::new(h0, v)?;
        let h1 = path.endpoint();
        let xi = ssf_counting(path.h0(), &h1)?;
        let eigen: Vec<f64> = path
            .h0()
            .eigenvalues()
            .iter()
            .chain(h1.eigenvalues())
            .copied()
            .collect();
        for _ in 0..5 {
            let lambda = regular_level(&mut g, &eigen, -3.0, 3.0, 1e-6);
            if spectral_flow(&path, lambda, 0.01)? != xi.evaluate(lambda) {
                mismatches += 1;
            }
        }
    }
    Ok(ReportRow::against(
        "flow_identity",
        "counting",
        mismatches as f64,
        0.0,
    ))
}

fn krein_engine(c: &Ctx) -> Result<ReportRow> {
    let mut r = Vec::new();
    for k in 0..30 {
        let (h0, v) = pair(&mut c.case(k), 4);
        let path = PerturbationPath::new(h0, v)?;
        let h1 = path.endpoint();
        let xi = ssf_counting(path.h0(), &h1)?;
        let guard = 2.0 * guard_distance(path.h0(), &h1);
        let eigen: Vec<f64> = path
            .h0()
            .eigenvalues()
            .iter()
            .chain(h1.eigenvalues())
            .copied()
            .collect();
        let grid: Vec<f64> = (0..16)
            .map(|j| -3.0 + 6.0 * (j as f64 + 0.5) / 16.0)
            .filter(|x| eigen.iter().all(|e| (x - e).abs() >= guard))
            .collect();
        let sched = KreinSchedule::for_path(&path, grid)?;
        for (lambda, est) in ssf_krein(&path, &sched)? {
            r.push((est - xi.evaluate(lambda) as f64).abs());
        }
    }
    Ok(ReportRow::against("krein_engine", "krein", worst(r), 1e-3))
}

fn step_csv_roundtrip(c: &Ctx) -> Result<ReportRow> {
    let mut mismatches = 0usize;
    for k in 0..50 {
        let (h0, v) = pair(&mut c.case(k), 8);
        let xi = ssf_counting(&h0, &h0.checked_add(&v)?)?;
        if csv::read_step(&csv::write_step(&xi)).as_ref() != Ok(&xi) {
            mismatches += 1;
        }
    }
    Ok(ReportRow::against(
        "step_csv_roundtrip",
        "counting",
        mismatches as f64,
        0.0,
    ))
}

/// Worker count: `SPECSHIFT_THREADS` when set to a positive integer.
pub fn thread_cap() -> Option<usize> {
    std::env::var("SPECSHIFT_THREADS")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

/// Runs every check; the first module error (in check order) wins.
pub fn run_suite(
    seed: u64,
    tol: f64,
) -> std::result::Result<Vec<ReportRow>, (&'static str, specshift::Error)> {
    let work = || {
        CHECKS
            .par_iter()
            .enumerate()
            .map(|(i, &(name, check))| {
                let ctx = Ctx {
                    seed,
                    tol,
                    stream: i as u64 + 1,
                };
                check(&ctx).map_err(|e| (name, e))
            })
            .collect::<Vec<_>>()
    };
    let results = match thread_cap() {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(work),
            Err(_) => work(),
        },
        None => work(),
    };
    results.into_iter().collect()
}
