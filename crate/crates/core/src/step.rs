//! Integer-valued, compactly supported, right-open step functions.

use std::ops::{Add, Neg, Sub};

use crate::{Error, Result};

/// `values[k]` holds on `[breakpoints[k], breakpoints[k + 1])`; zero outside
/// `[breakpoints[0], breakpoints[m])`.
///
/// Always canonical: adjacent values differ, and the first and last values
/// are nonzero. The zero function has no breakpoints.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StepFunction {
    breakpoints: Vec<f64>,
    values: Vec<i64>,
}

impl StepFunction {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Builds and canonicalizes from explicit breakpoints and interval values.
    pub fn new(breakpoints: Vec<f64>, values: Vec<i64>) -> Result<Self> {
        if breakpoints.is_empty() && values.is_empty() {
            return Ok(Self::zero());
        }
        if values.len() + 1 != breakpoints.len() {
            return Err(Error::InvalidArgument(format!(
                "{} breakpoints need {} values, got {}",
                breakpoints.len(),
                breakpoints.len().saturating_sub(1),
                values.len()
            )));
        }
        if breakpoints.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidArgument("breakpoints must be finite".into()));
        }
        if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidArgument(
                "breakpoints must be strictly ascending".into(),
            ));
        }
        let mut jumps = Vec::with_capacity(breakpoints.len());
        let mut previous = 0i64;
        for (k, &b) in breakpoints.iter().enumerate() {
            let next = values.get(k).copied().unwrap_or(0);
            jumps.push((b, next - previous));
            previous = next;
        }
        Self::from_jumps(jumps)
    }

    /// `value` on `[lo, hi)`.
    pub fn indicator(lo: f64, hi: f64, value: i64) -> Result<Self> {
        Self::new(vec![lo, hi], vec![value])
    }

    /// Sums the jumps `(point, delta)` into a canonical step function; the
    /// deltas must total zero.
    pub fn from_jumps<I: IntoIterator<Item = (f64, i64)>>(jumps: I) -> Result<Self> {
        let mut jumps: Vec<(f64, i64)> = jumps.into_iter().collect();
        if jumps.iter().any(|(b, _)| !b.is_finite()) {
            return Err(Error::InvalidArgument("jump points must be finite".into()));
        }
        jumps.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, i64)> = Vec::with_capacity(jumps.len());
        for (b, d) in jumps {
            match merged.last_mut() {
                // -0.0 and 0.0 are the same point
                Some(last) if last.0 == b => last.1 += d,
                _ => merged.push((b, d)),
            }
        }
        merged.retain(|&(_, d)| d != 0);
        let total: i64 = merged.iter().map(|&(_, d)| d).sum();
        if total != 0 {
            return Err(Error::InvalidArgument(format!(
                "jumps sum to {total}; a compactly supported step function needs 0"
            )));
        }
        let mut breakpoints = Vec::with_capacity(merged.len());
        let mut values = Vec::with_capacity(merged.len().saturating_sub(1));
        let mut acc = 0i64;
        for (i, &(b, d)) in merged.iter().enumerate() {
            breakpoints.push(b);
            acc += d;
            if i + 1 < merged.len() {
                values.push(acc);
            }
        }
        Ok(Self {
            breakpoints,
            values,
        })
    }

    /// Jumps `(b_k, v_{k+1} − v_k)` with `v_0 = v_{m+1} = 0`.
    pub fn jumps(&self) -> impl Iterator<Item = (f64, i64)> + '_ {
        let m = self.breakpoints.len();
        (0..m).map(move |k| {
            let before = if k == 0 { 0 } else { self.values[k - 1] };
            let after = self.values.get(k).copied().unwrap_or(0);
            (self.breakpoints[k], after - before)
        })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.breakpoints.is_empty()
    }

    /// Closure of the support, `None` for the zero function.
    pub fn support(&self) -> Option<(f64, f64)> {
        Some((*self.breakpoints.first()?, *self.breakpoints.last()?))
    }

    pub fn evaluate(&self, x: f64) -> i64 {
        let k = self.breakpoints.partition_point(|&b| b <= x);
        if k == 0 || k == self.breakpoints.len() {
            0
        } else {
            self.values[k - 1]
        }
    }

    /// `(lo, hi, value)` for each interval of the support.
    pub fn pieces(&self) -> impl Iterator<Item = (f64, f64, i64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(k, &v)| (self.breakpoints[k], self.breakpoints[k + 1], v))
    }

    /// `∫ ξ dλ`.
    pub fn integral(&self) -> f64 {
        self.pieces().map(|(lo, hi, v)| v as f64 * (hi - lo)).sum()
    }

    /// `∫ |ξ| dλ`.
    pub fn l1_norm(&self) -> f64 {
        self.pieces()
            .map(|(lo, hi, v)| v.unsigned_abs() as f64 * (hi - lo))
            .sum()
    }

    /// `x ↦ ξ(x − c)`.
    pub fn translated(&self, c: f64) -> Self {
        Self::from_jumps(self.jumps().map(|(b, d)| (b + c, d)))
            .expect("translation preserves zero total jump")
    }
}

impl Add for &StepFunction {
    type Output = StepFunction;

    fn add(self, rhs: &StepFunction) -> StepFunction {
        StepFunction::from_jumps(self.jumps().chain(rhs.jumps()))
            .expect("sum of compactly supported steps")
    }
}

impl Neg for &StepFunction {
    type Output = StepFunction;

    fn neg(self) -> StepFunction {
        StepFunction {
            breakpoints: self.breakpoints.clone(),
            values: self.values.iter().map(|v| -v).collect(),
        }
    }
}

impl Sub for &StepFunction {
    type Output = StepFunction;

    fn sub(self, rhs: &StepFunction) -> StepFunction {
        StepFunction::from_jumps(self.jumps().chain(rhs.jumps().map(|(b, d)| (b, -d))))
            .expect("difference of compactly supported steps")
    }
}
