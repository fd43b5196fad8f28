//! Adaptive Gauss–Legendre quadrature with recursive bisection.
//!
//! Each interval carries the 15-point Gauss–Legendre value over each of its
//! halves; the difference between their sum and the whole-interval rule is
//! its error estimate. The interval with the largest estimate is bisected
//! until the summed estimates fall below the absolute tolerance (globally
//! adaptive refinement, so isolated kinks and jumps need no special care).

use std::sync::OnceLock;

use crate::{Error, Result};

pub const GAUSS_ORDER: usize = 15;

/// Default cap on integrand evaluations per call.
pub const DEFAULT_MAX_EVALUATIONS: usize = 2_000_000;

/// Nodes on `[-1, 1]` and weights of the `n`-point Gauss–Legendre rule,
/// via Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// `(P_n(x), P_n'(x))`.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(GAUSS_ORDER))
}

/// Fixed 15-point rule on `[a, b]`.
pub fn gauss15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> f64 {
    let (nodes, weights) = rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = 0.0;
    for (x, w) in nodes.iter().zip(weights) {
        acc += w * f(mid + half * x);
    }
    acc * half
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error_bound: f64,
    pub evaluations: usize,
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<Estimate> {
    integrate_with_budget(f, a, b, tol, DEFAULT_MAX_EVALUATIONS)
}

pub fn integrate_with_budget<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    tol: f64,
    max_evaluations: usize,
) -> Result<Estimate> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "non-finite interval [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok(Estimate {
            value: 0.0,
            error_bound: 0.0,
            evaluations: 0,
        });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };

    let mut evaluations = GAUSS_ORDER;
    let whole = gauss15(&mut f, lo, hi);
    let mut pieces = vec![Piece::split(&mut f, lo, hi, whole, &mut evaluations)];
    loop {
        let total_error: f64 = pieces.iter().map(|p| p.error).sum();
        if total_error <= tol {
            // left-to-right summation keeps the result independent of refinement order
            pieces.sort_by(|p, q| p.lo.total_cmp(&q.lo));
            let value = pieces.iter().map(|p| p.left + p.right).sum::<f64>();
            return Ok(Estimate {
                value: sign * value,
                error_bound: total_error,
                evaluations,
            });
        }
        let worst = pieces
            .iter()
            .enumerate()
            .max_by(|(i, p), (j, q)| p.error.total_cmp(&q.error).then(j.cmp(i)))
            .map(|(i, _)| i)
            .expect("at least one piece");
        let piece = pieces.swap_remove(worst);
        let mid = 0.5 * (piece.lo + piece.hi);
        if !(mid > piece.lo && mid < piece.hi) || evaluations + 4 * GAUSS_ORDER > max_evaluations {
            return Err(Error::QuadratureFailure {
                tol,
                lo,
                hi,
                evaluations,
            });
        }
        pieces.push(Piece::split(
            &mut f,
            piece.lo,
            mid,
            piece.left,
            &mut evaluations,
        ));
        pieces.push(Piece::split(
            &mut f,
            mid,
            piece.hi,
            piece.right,
            &mut evaluations,
        ));
    }
}

/// An interval with its two half-interval rule values and the
/// coarse-versus-fine error estimate.
struct Piece {
    lo: f64,
    hi: f64,
    left: f64,
    right: f64,
    error: f64,
}

impl Piece {
    fn split<F: FnMut(f64) -> f64>(
        f: &mut F,
        lo: f64,
        hi: f64,
        coarse: f64,
        evaluations: &mut usize,
    ) -> Piece {
        let mid = 0.5 * (lo + hi);
        let left = gauss15(f, lo, mid);
        let right = gauss15(f, mid, hi);
        *evaluations += 2 * GAUSS_ORDER;
        Piece {
            lo,
            hi,
            left,
            right,
            error: (left + right - coarse).abs(),
        }
    }
}
