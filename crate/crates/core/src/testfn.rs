//! Compactly supported test functions and their pairings with step densities.

use crate::quadrature;
use crate::step::StepFunction;
use crate::{Error, Result};

/// Closed-form profile of a [`TestFunction`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// `exp(−1/(1 − t²))` on the rescaled support `t ∈ (−1, 1)`; peak `e⁻¹`.
    SmoothBump,
    /// `(1 + cos πt)/2`; peak 1. Continuously differentiable only.
    RaisedCosine,
    /// Cardinal cubic B-spline rescaled to peak 1; twice differentiable.
    CubicSplineHat,
    /// Identically 1 on `[inner_lo, inner_hi]`, with `C^∞` transitions to 0
    /// at the support ends.
    Plateau { inner_lo: f64, inner_hi: f64 },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::SmoothBump => "bump",
            Family::RaisedCosine => "cosine",
            Family::CubicSplineHat => "spline",
            Family::Plateau { .. } => "plateau",
        }
    }

    /// Maximum of the unit-amplitude profile.
    pub fn peak(&self) -> f64 {
        match self {
            Family::SmoothBump => (-1.0f64).exp(),
            _ => 1.0,
        }
    }
}

/// `amplitude · profile` supported on `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestFunction {
    family: Family,
    lo: f64,
    hi: f64,
    amplitude: f64,
}

impl TestFunction {
    pub fn new(family: Family, lo: f64, hi: f64, amplitude: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && amplitude.is_finite()) {
            return Err(Error::InvalidArgument(
                "test function parameters must be finite".into(),
            ));
        }
        if !(lo < hi) {
            return Err(Error::InvalidArgument(format!(
                "support [{lo}, {hi}] must satisfy lo < hi"
            )));
        }
        if let Family::Plateau { inner_lo, inner_hi } = family {
            if !(lo < inner_lo && inner_lo <= inner_hi && inner_hi < hi) {
                return Err(Error::InvalidArgument(format!(
                    "plateau [{inner_lo}, {inner_hi}] must lie strictly inside ({lo}, {hi})"
                )));
            }
        }
        Ok(Self {
            family,
            lo,
            hi,
            amplitude,
        })
    }

    pub fn plateau(lo: f64, hi: f64, inner_lo: f64, inner_hi: f64, amplitude: f64) -> Result<Self> {
        Self::new(Family::Plateau { inner_lo, inner_hi }, lo, hi, amplitude)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    /// `‖φ‖∞`, in closed form.
    pub fn sup_norm(&self) -> f64 {
        self.amplitude.abs() * self.family.peak()
    }

    /// Support ends plus interior points where the profile changes formula.
    pub fn knots(&self) -> Vec<f64> {
        let (lo, hi) = (self.lo, self.hi);
        match self.family {
            Family::SmoothBump | Family::RaisedCosine => vec![lo, hi],
            Family::CubicSplineHat => {
                let mid = 0.5 * (lo + hi);
                let q = 0.25 * (hi - lo);
                vec![lo, mid - q, mid, mid + q, hi]
            }
            Family::Plateau { inner_lo, inner_hi } => {
                let mut k = vec![lo, inner_lo, inner_hi, hi];
                k.dedup();
                k
            }
        }
    }

    /// `φ(x)` (order 0) or `φ′(x)` (order 1).
    pub fn evaluate(&self, x: f64, order: u8) -> Result<f64> {
        match order {
            0 => Ok(self.value(x)),
            1 => Ok(self.derivative(x)),
            _ => Err(Error::InvalidArgument(format!(
                "derivative order must be 0 or 1, got {order}"
            ))),
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        if !(x > self.lo && x < self.hi) {
            return 0.0;
        }
        self.amplitude * self.profile(x).0
    }

    pub fn derivative(&self, x: f64) -> f64 {
        if !(x > self.lo && x < self.hi) {
            return 0.0;
        }
        self.amplitude * self.profile(x).1
    }

    /// `∫ φ dλ` by adaptive quadrature between knots.
    pub fn integral(&self, tol: f64) -> Result<f64> {
        integrate_between_knots(self, self.lo, self.hi, tol)
    }

    /// Unit-amplitude profile and its `x`-derivative, for `x` strictly
    /// inside the support.
    fn profile(&self, x: f64) -> (f64, f64) {
        let mid = 0.5 * (self.lo + self.hi);
        let half = 0.5 * (self.hi - self.lo);
        let t = (x - mid) / half;
        let dt = 1.0 / half;
        match self.family {
            Family::SmoothBump => {
                let s = 1.0 - t * t;
                if s <= 0.0 {
                    return (0.0, 0.0);
                }
                let g = (-1.0 / s).exp();
                if g == 0.0 {
                    return (0.0, 0.0);
                }
                (g, g * (-2.0 * t / (s * s)) * dt)
            }
            Family::RaisedCosine => {
                let pt = std::f64::consts::PI * t;
                (
                    0.5 * (1.0 + pt.cos()),
                    -0.5 * std::f64::consts::PI * pt.sin() * dt,
                )
            }
            Family::CubicSplineHat => {
                let u = t.abs();
                let (v, dv) = if u <= 0.5 {
                    (
                        1.0 - 6.0 * u * u + 6.0 * u * u * u,
                        -12.0 * u + 18.0 * u * u,
                    )
                } else if u < 1.0 {
                    let w = 1.0 - u;
                    (2.0 * w * w * w, -6.0 * w * w)
                } else {
                    (0.0, 0.0)
                };
                (v, dv * t.signum() * dt)
            }
            Family::Plateau { inner_lo, inner_hi } => {
                if x < inner_lo {
                    let width = inner_lo - self.lo;
                    let (s, ds) = smooth_step((x - self.lo) / width);
                    (s, ds / width)
                } else if x > inner_hi {
                    let width = self.hi - inner_hi;
                    let (s, ds) = smooth_step((self.hi - x) / width);
                    (s, -ds / width)
                } else {
                    (1.0, 0.0)
                }
            }
        }
    }
}

/// `exp(−1/y)` for `y > 0`, else 0, with its derivative.
fn edge(y: f64) -> (f64, f64) {
    if y <= 0.0 {
        return (0.0, 0.0);
    }
    let e = (-1.0 / y).exp();
    if e == 0.0 {
        (0.0, 0.0)
    } else {
        (e, e / (y * y))
    }
}

/// `C^∞` transition from 0 at `y ≤ 0` to 1 at `y ≥ 1`.
fn smooth_step(y: f64) -> (f64, f64) {
    if y <= 0.0 {
        return (0.0, 0.0);
    }
    if y >= 1.0 {
        return (1.0, 0.0);
    }
    let (a, da) = edge(y);
    let (b, db) = edge(1.0 - y);
    let denom = a + b;
    (a / denom, (da * b + a * db) / (denom * denom))
}

/// `∫_lo^hi φ` split at the knots of `φ` inside `[lo, hi]`.
fn integrate_between_knots(phi: &TestFunction, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let (slo, shi) = phi.support();
    let lo = lo.max(slo);
    let hi = hi.min(shi);
    if !(lo < hi) {
        return Ok(0.0);
    }
    let mut cuts = vec![lo];
    cuts.extend(phi.knots().into_iter().filter(|&k| k > lo && k < hi));
    cuts.push(hi);
    let share = tol / (cuts.len() - 1) as f64;
    let mut total = 0.0;
    for w in cuts.windows(2) {
        total += quadrature::integrate(|x| phi.value(x), w[0], w[1], share)?.value;
    }
    Ok(total)
}

/// `ξ(φ) = ∫ ξ(λ) φ(λ) dλ` to absolute error `tol`.
pub fn pair_density(xi: &StepFunction, phi: &TestFunction, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let (slo, shi) = phi.support();
    let active: Vec<_> = xi
        .pieces()
        .filter(|&(lo, hi, v)| v != 0 && hi > slo && lo < shi)
        .collect();
    if active.is_empty() {
        return Ok(0.0);
    }
    let count = active.len() as f64;
    let mut total = 0.0;
    for (lo, hi, v) in active {
        let share = tol / (count * v.unsigned_abs() as f64);
        total += v as f64 * integrate_between_knots(phi, lo, hi, share)?;
    }
    Ok(total)
}

/// `∫ ξ(λ) φ′(λ) dλ = Σ_k v_k (φ(b_k) − φ(b_{k−1}))`, exactly telescoped.
pub fn pair_derivative(xi: &StepFunction, phi: &TestFunction) -> f64 {
    xi.pieces()
        .map(|(lo, hi, v)| v as f64 * (phi.value(hi) - phi.value(lo)))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::Generator;

    fn all_families(lo: f64, hi: f64) -> Vec<TestFunction> {
        let w = hi - lo;
        vec![
            TestFunction::new(Family::SmoothBump, lo, hi, 1.3).unwrap(),
            TestFunction::new(Family::RaisedCosine, lo, hi, -0.7).unwrap(),
            TestFunction::new(Family::CubicSplineHat, lo, hi, 2.0).unwrap(),
            TestFunction::plateau(lo, hi, lo + 0.3 * w, hi - 0.2 * w, 1.0).unwrap(),
        ]
    }

    #[test]
    fn bump_peak() {
        let phi = TestFunction::new(Family::SmoothBump, -1.0, 1.0, 1.0).unwrap();
        assert_eq!(phi.value(0.0), (-1.0f64).exp());
        assert_eq!(phi.sup_norm(), (-1.0f64).exp());
    }

    #[test]
    fn zero_outside_support() {
        for phi in all_families(-1.0, 2.0) {
            for x in [-5.0, -1.0, 2.0, 2.0000001, 10.0] {
                assert_eq!(phi.value(x), 0.0);
                assert_eq!(phi.derivative(x), 0.0);
            }
        }
    }

    #[test]
    fn derivative_vanishes_at_midpoint() {
        for phi in all_families(-1.5, 2.5).into_iter().take(3) {
            assert_eq!(phi.evaluate(0.5, 1).unwrap(), 0.0);
        }
    }

    #[test]
    fn bad_order_rejected() {
        let phi = TestFunction::new(Family::SmoothBump, 0.0, 1.0, 1.0).unwrap();
        assert!(phi.evaluate(0.5, 2).is_err());
    }

    #[test]
    fn bad_supports_rejected() {
        assert!(TestFunction::new(Family::SmoothBump, 1.0, 1.0, 1.0).is_err());
        assert!(TestFunction::new(Family::RaisedCosine, 2.0, 1.0, 1.0).is_err());
        assert!(TestFunction::plateau(0.0, 1.0, 0.0, 0.5, 1.0).is_err());
        assert!(TestFunction::new(Family::SmoothBump, 0.0, f64::NAN, 1.0).is_err());
    }

    #[test]
    fn sup_norm_matches_sampled_maximum() {
        for phi in all_families(-1.0, 3.0) {
            let sampled = (0..=4000)
                .map(|k| phi.value(-1.0 + 4.0 * k as f64 / 4000.0).abs())
                .fold(0.0, f64::max);
            assert!(sampled <= phi.sup_norm() + 1e-15);
            assert!(sampled >= phi.sup_norm() * (1.0 - 1e-6));
        }
    }

    #[test]
    fn derivative_matches_central_differences() {
        let mut g = Generator::new(99);
        let h = 1e-5;
        for phi in all_families(-1.0, 2.0) {
            let (lo, hi) = phi.support();
            for _ in 0..100 {
                let x = g.uniform(lo + h, hi - h);
                let fd = (phi.value(x + h) - phi.value(x - h)) / (2.0 * h);
                assert!(
                    (fd - phi.derivative(x)).abs() <= 1e-6,
                    "{:?} at {x}: fd {fd} vs {}",
                    phi.family(),
                    phi.derivative(x)
                );
            }
        }
    }

    #[test]
    fn spline_and_cosine_integrals() {
        // unit-peak spline hat on width w integrates to 3w/8, raised cosine to w/2
        let spline = TestFunction::new(Family::CubicSplineHat, 0.0, 4.0, 1.0).unwrap();
        assert!((spline.integral(1e-12).unwrap() - 1.5).abs() <= 1e-12);
        let cosine = TestFunction::new(Family::RaisedCosine, -1.0, 1.0, 1.0).unwrap();
        assert!((cosine.integral(1e-12).unwrap() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn pairing_against_indicator_with_plateau() {
        let xi = StepFunction::indicator(0.0, 1.0, 1).unwrap();
        let phi = TestFunction::plateau(-1.0, 2.0, 0.0, 1.0, 1.0).unwrap();
        let tol = 1e-10;
        assert!((pair_density(&xi, &phi, tol).unwrap() - 1.0).abs() <= tol);
    }

    #[test]
    fn pairing_zero_is_exact() {
        let phi = TestFunction::new(Family::SmoothBump, -1.0, 1.0, 1.0).unwrap();
        assert_eq!(
            pair_density(&StepFunction::zero(), &phi, 1e-8).unwrap(),
            0.0
        );
        assert_eq!(pair_derivative(&StepFunction::zero(), &phi), 0.0);
    }

    #[test]
    fn pair_derivative_fundamental_theorem() {
        let xi = StepFunction::indicator(0.0, 1.0, 1).unwrap();
        let phi = TestFunction::new(Family::RaisedCosine, -0.5, 1.5, 1.0).unwrap();
        assert_eq!(pair_derivative(&xi, &phi), phi.value(1.0) - phi.value(0.0));
    }
}
