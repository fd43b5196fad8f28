//! Eigenvalue tracking along `H_r = H0 + rV` and signed level crossings.
//!
//! Curves are the sorted eigenvalues of `H_r`, which are continuous and
//! `‖V‖`-Lipschitz in `r`. Analytic branches through exact degeneracies are
//! not resolved; the signed count through a level only depends on the
//! counting functions at the endpoints, so sorted order is sufficient. Two
//! crossings of one curve inside a single sample interval cancel and are not
//! reported.

use crate::{Error, PerturbationPath, Result};

/// Lipschitz slack factor accepted between adjacent samples.
pub const LIPSCHITZ_FACTOR: f64 = 1.01;
/// Resolution in `r` of each bracketed crossing.
pub const CROSSING_RESOLUTION: f64 = 1e-10;
const MIN_SLOPE: f64 = 1e-12;
const ENDPOINT_RELATIVE: f64 = 1e-9;
const MAX_REFINEMENTS: u32 = 40;

/// Sorted eigenvalues of `H_r` sampled on an ascending grid in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPath {
    pub parameters: Vec<f64>,
    /// `curves[k][i]`: the `i`-th smallest eigenvalue at `parameters[k]`.
    pub curves: Vec<Vec<f64>>,
}

impl EigenPath {
    pub fn curve(&self, index: usize) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.parameters
            .iter()
            .zip(&self.curves)
            .map(move |(&r, ev)| (r, ev[index]))
    }

    /// Largest `|λ_i(r′) − λ_i(r)| / |r′ − r|` over adjacent samples.
    pub fn max_slope(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 1..self.parameters.len() {
            let dr = self.parameters[k] - self.parameters[k - 1];
            for (a, b) in self.curves[k - 1].iter().zip(&self.curves[k]) {
                worst = worst.max((b - a).abs() / dr);
            }
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingEvent {
    pub r_star: f64,
    pub curve_index: usize,
    /// `+1` upward through the level, `−1` downward.
    pub direction: i8,
}

fn sorted_eigenvalues(path: &PerturbationPath, r: f64) -> Vec<f64> {
    path.at(r).eigenvalues().to_vec()
}

/// Samples the sorted curves with steps at most `max_step`, bisecting any
/// interval whose per-curve jump exceeds `1.01·‖V‖·Δr`.
pub fn track_eigenvalues(path: &PerturbationPath, max_step: f64) -> Result<EigenPath> {
    if !(max_step > 0.0 && max_step.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "max_step must be positive, got {max_step}"
        )));
    }
    let pieces = (1.0 / max_step).ceil().max(1.0) as usize;
    let norm = path.v().operator_norm();
    let (lo, hi) = path.h0().spectral_bounds();
    let slack = 1e-12 * (hi - lo).abs().max(lo.abs()).max(hi.abs()).max(1.0);

    let mut parameters = Vec::with_capacity(pieces + 1);
    let mut curves = Vec::with_capacity(pieces + 1);
    let mut r0 = 0.0;
    let mut e0 = sorted_eigenvalues(path, r0);
    parameters.push(r0);
    curves.push(e0.clone());
    for k in 1..=pieces {
        let r1 = if k == pieces {
            1.0
        } else {
            k as f64 / pieces as f64
        };
        let e1 = sorted_eigenvalues(path, r1);
        // depth-first refinement of [r0, r1], emitting samples left to right
        let mut stack = vec![(r1, e1, 0u32)];
        while let Some((rb, eb, depth)) = stack.pop() {
            let jump = e0
                .iter()
                .zip(&eb)
                .map(|(a, b)| (b - a).abs())
                .fold(0.0, f64::max);
            let allowed = LIPSCHITZ_FACTOR * norm * (rb - r0) + slack;
            if jump > allowed && depth < MAX_REFINEMENTS {
                let rm = 0.5 * (r0 + rb);
                let em = sorted_eigenvalues(path, rm);
                stack.push((rb, eb, depth + 1));
                stack.push((rm, em, depth + 1));
                continue;
            }
            parameters.push(rb);
            curves.push(eb.clone());
            r0 = rb;
            e0 = eb;
        }
    }
    Ok(EigenPath { parameters, curves })
}

fn check_endpoints(path: &PerturbationPath, lambda: f64) -> Result<()> {
    let h0 = path.h0();
    let h1 = path.endpoint();
    let (a0, b0) = h0.spectral_bounds();
    let (a1, b1) = h1.spectral_bounds();
    let diameter = b0.max(b1) - a0.min(a1);
    let guard = ENDPOINT_RELATIVE * if diameter > 0.0 { diameter } else { 1.0 };
    for &e in h0.eigenvalues().iter().chain(h1.eigenvalues()) {
        if (e - lambda).abs() < guard {
            return Err(Error::EndpointDegeneracy {
                lambda,
                eigenvalue: e,
                guard,
            });
        }
    }
    Ok(())
}

/// Every bracketed crossing of the level `lambda`, refined by bisection.
pub fn crossings(
    path: &PerturbationPath,
    lambda: f64,
    max_step: f64,
) -> Result<Vec<CrossingEvent>> {
    if !lambda.is_finite() {
        return Err(Error::InvalidArgument("level must be finite".into()));
    }
    check_endpoints(path, lambda)?;
    let track = track_eigenvalues(path, max_step)?;
    let above = |x: f64| x > lambda;
    let dim = path.dim();
    let mut events = Vec::new();
    for k in 1..track.parameters.len() {
        for i in 0..dim {
            let (mut lo, mut hi) = (track.parameters[k - 1], track.parameters[k]);
            let (mut e_lo, mut e_hi) = (track.curves[k - 1][i], track.curves[k][i]);
            let start = above(e_lo);
            if start == above(e_hi) {
                continue;
            }
            while hi - lo > CROSSING_RESOLUTION {
                let mid = 0.5 * (lo + hi);
                if !(mid > lo && mid < hi) {
                    break;
                }
                let e_mid = sorted_eigenvalues(path, mid)[i];
                if above(e_mid) == start {
                    lo = mid;
                    e_lo = e_mid;
                } else {
                    hi = mid;
                    e_hi = e_mid;
                }
            }
            let slope = (e_hi - e_lo) / (hi - lo);
            if slope.abs() < MIN_SLOPE {
                return Err(Error::TangentialCrossing { r: 0.5 * (lo + hi) });
            }
            events.push(CrossingEvent {
                r_star: 0.5 * (lo + hi),
                curve_index: i,
                direction: if slope > 0.0 { 1 } else { -1 },
            });
        }
    }
    Ok(events)
}

/// Net signed number of eigenvalue crossings through `lambda` for `r ∈ [0, 1]`.
pub fn spectral_flow(path: &PerturbationPath, lambda: f64, max_step: f64) -> Result<i64> {
    Ok(crossings(path, lambda, max_step)?
        .iter()
        .map(|e| e.direction as i64)
        .sum())
}
