//! Perturbation-determinant engine.
//!
//! `D(z) = det(H1 − z) / det(H0 − z)` is analytic and zero-free in the open
//! upper half-plane, so its argument has a continuous branch there. The branch
//! is fixed to the principal value at an anchor far below the joint spectrum,
//! continued horizontally at height `ε_start` to each grid point, then
//! vertically down through `ε_start · q^k`. At every height the estimate is
//! `arg D(λ + iε) / π`; refinement stops once two consecutive refinements
//! each change it by less than `1e-3`.
//!
//! Step sizes come from a priori derivative bounds: each of the `2n` linear
//! factors contributes at most `1/ε` to `|∂_λ arg D|` and at most `1/2` to
//! `|∂_{ln ε} arg D|`, so steps of `πε/(4n)` horizontally and `π/(4n)` in
//! `ln ε` keep every increment below `π/4`. Increments are still checked
//! against `π/2` and the step halved when the check fails.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::{Error, HermitianOperator, PerturbationPath, Result, C64};

const CONVERGENCE: f64 = 1e-3;
/// Consecutive refinements that must each move the estimate by less than
/// `CONVERGENCE`. A single small change can occur while nearby eigenvalues of
/// `H0` and `H1` still cancel at the current height.
const SETTLED_REFINEMENTS: u32 = 2;
const GUARD_RELATIVE: f64 = 1e-6;
const MAX_HALVINGS: u32 = 40;

/// Evaluation grid and `ε` refinement schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct KreinSchedule {
    pub lambda_grid: Vec<f64>,
    pub epsilon_start: f64,
    pub epsilon_min: f64,
    pub refinement_factor: f64,
}

impl KreinSchedule {
    pub fn new(
        lambda_grid: Vec<f64>,
        epsilon_start: f64,
        epsilon_min: f64,
        refinement_factor: f64,
    ) -> Result<Self> {
        if !(epsilon_min > 0.0 && epsilon_min <= epsilon_start && epsilon_start.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "need 0 < epsilon_min ({epsilon_min}) <= epsilon_start ({epsilon_start})"
            )));
        }
        if !(refinement_factor > 0.0 && refinement_factor < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "refinement factor {refinement_factor} must lie in (0, 1)"
            )));
        }
        if lambda_grid.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("grid points must be finite".into()));
        }
        if lambda_grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidArgument(
                "grid must be strictly ascending".into(),
            ));
        }
        Ok(Self {
            lambda_grid,
            epsilon_start,
            epsilon_min,
            refinement_factor,
        })
    }

    /// Defaults scaled to the path: `ε` from `0.1·s` down to `1e-12·s` by
    /// factors of 10, with `s = max(1, spectral diameter)`.
    pub fn for_path(path: &PerturbationPath, lambda_grid: Vec<f64>) -> Result<Self> {
        let (lo, hi) = joint_bounds(path.h0(), &path.endpoint());
        let scale = (hi - lo).max(1.0);
        Self::new(lambda_grid, 0.1 * scale, 1e-12 * scale, 0.1)
    }
}

fn joint_bounds(h0: &HermitianOperator, h1: &HermitianOperator) -> (f64, f64) {
    let (a0, b0) = h0.spectral_bounds();
    let (a1, b1) = h1.spectral_bounds();
    (a0.min(a1), b0.max(b1))
}

pub(crate) fn guard_for_diameter(diameter: f64) -> f64 {
    GUARD_RELATIVE * if diameter > 0.0 { diameter } else { 1.0 }
}

/// Minimum admissible distance from a grid point to `spec(H0) ∪ spec(H1)`.
pub fn guard_distance(h0: &HermitianOperator, h1: &HermitianOperator) -> f64 {
    let (lo, hi) = joint_bounds(h0, h1);
    guard_for_diameter(hi - lo)
}

/// `Im log det(a − z)` (defined modulo 2π) via LU pivots.
fn arg_det(a: &DMatrix<C64>, z: C64) -> f64 {
    let n = a.nrows();
    let mut shifted = a.clone();
    for i in 0..n {
        shifted[(i, i)] -= z;
    }
    let lu = shifted.lu();
    let u = lu.u();
    let mut arg: f64 = (0..n).map(|i| u[(i, i)].arg()).sum();
    if lu.p().determinant::<f64>() < 0.0 {
        arg += PI;
    }
    arg
}

/// Wraps into `(−π, π]`.
fn wrap(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

struct Determinant<'a> {
    h0: &'a DMatrix<C64>,
    h1: &'a DMatrix<C64>,
}

impl Determinant<'_> {
    /// `arg D(z)` modulo 2π.
    fn raw_arg(&self, z: C64) -> f64 {
        arg_det(self.h1, z) - arg_det(self.h0, z)
    }
}

/// Continuous argument tracked along a polygonal path.
#[derive(Clone, Copy)]
struct Branch {
    z: C64,
    raw: f64,
    unwound: f64,
}

impl Branch {
    /// Follows `s ↦ point(s)` from `from` to `to` in steps of at most
    /// `max_step`, halving whenever an increment reaches `π/2`. `report`
    /// is the `(λ, ε)` named in a `BranchAmbiguity`.
    fn advance<Z: Fn(f64) -> C64>(
        &mut self,
        det: &Determinant<'_>,
        from: f64,
        to: f64,
        max_step: f64,
        point: Z,
        report: (f64, f64),
    ) -> Result<()> {
        let mut s = from;
        let dir = if to >= from { 1.0 } else { -1.0 };
        while (to - s) * dir > 0.0 {
            let mut step = max_step.min((to - s) * dir);
            let mut halvings = 0;
            loop {
                let next = if step >= (to - s) * dir {
                    to
                } else {
                    s + dir * step
                };
                let z = point(next);
                let raw = det.raw_arg(z);
                let inc = wrap(raw - self.raw);
                if inc.abs() < 0.5 * PI {
                    self.z = z;
                    self.raw = raw;
                    self.unwound += inc;
                    s = next;
                    break;
                }
                halvings += 1;
                if halvings > MAX_HALVINGS {
                    return Err(Error::BranchAmbiguity {
                        lambda: report.0,
                        epsilon: report.1,
                    });
                }
                step *= 0.5;
            }
        }
        Ok(())
    }
}

/// `ξ(λ)` estimates at each grid point of `sched`.
pub fn ssf_krein(path: &PerturbationPath, sched: &KreinSchedule) -> Result<Vec<(f64, f64)>> {
    let h0 = path.h0();
    let h1 = path.endpoint();
    let (lo, hi) = joint_bounds(h0, &h1);
    let guard = guard_for_diameter(hi - lo);
    for &lambda in &sched.lambda_grid {
        for &e in h0.eigenvalues().iter().chain(h1.eigenvalues()) {
            if (lambda - e).abs() < guard {
                return Err(Error::GuardViolation {
                    lambda,
                    eigenvalue: e,
                    guard,
                });
            }
        }
    }
    if sched.lambda_grid.is_empty() {
        return Ok(Vec::new());
    }

    let n = path.dim() as f64;
    let det = Determinant {
        h0: h0.matrix(),
        h1: h1.matrix(),
    };
    let eps0 = sched.epsilon_start;
    let margin = (hi - lo).max(1.0);
    let anchor = lo - path.v().trace_norm() - margin;
    let z_anchor = C64::new(anchor, eps0);
    let raw = det.raw_arg(z_anchor);
    let mut horizontal = Branch {
        z: z_anchor,
        raw,
        unwound: wrap(raw),
    };
    let h_step = PI * eps0 / (4.0 * n);
    let log_step = PI / (4.0 * n);
    let q = sched.refinement_factor;

    let mut out = Vec::with_capacity(sched.lambda_grid.len());
    for &lambda in &sched.lambda_grid {
        let start = horizontal.z.re;
        horizontal.advance(
            &det,
            start,
            lambda,
            h_step,
            |x| C64::new(x, eps0),
            (lambda, eps0),
        )?;

        let mut vertical = horizontal;
        let mut eps = eps0;
        let mut previous = vertical.unwound / PI;
        let mut change = f64::INFINITY;
        let mut settled = 0;
        loop {
            let next_eps = eps * q;
            if next_eps < sched.epsilon_min {
                return Err(Error::KreinNotConverged {
                    lambda,
                    change,
                    epsilon_min: sched.epsilon_min,
                });
            }
            vertical.advance(
                &det,
                eps.ln(),
                next_eps.ln(),
                log_step,
                |s| C64::new(lambda, s.exp()),
                (lambda, next_eps),
            )?;
            let estimate = vertical.unwound / PI;
            eps = next_eps;
            change = (estimate - previous).abs();
            settled = if change < CONVERGENCE { settled + 1 } else { 0 };
            if settled == SETTLED_REFINEMENTS {
                out.push((lambda, estimate));
                break;
            }
            previous = estimate;
        }
    }
    Ok(out)
}
