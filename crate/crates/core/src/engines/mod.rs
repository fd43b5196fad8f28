//! Spectral shift function engines and identity residuals.
//!
//! Three independent routes to `ξ_{H1,H0}`:
//!
//! - [`ssf_counting`]: the step function `N_{H0} − N_{H1}` of eigenvalue
//!   counting functions, exact in integer arithmetic;
//! - [`ssf_averaging`]: `ξ(φ) = ∫₀¹ Tr(V φ(H0 + rV)) dr` by adaptive
//!   Gauss–Legendre quadrature in `r`;
//! - [`ssf_krein`]: the unwound argument of the perturbation determinant
//!   `det((H1 − z)(H0 − z)⁻¹)` as `z = λ + iε` approaches the real axis.

mod krein;

use std::fmt;
use std::str::FromStr;

pub use krein::{guard_distance, ssf_krein, KreinSchedule};

use crate::quadrature;
use crate::step::StepFunction;
use crate::testfn::{pair_density, TestFunction};
use crate::{Error, HermitianOperator, PerturbationPath, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EngineChoice {
    Counting,
    Averaging,
    Krein,
}

impl EngineChoice {
    pub const ALL: [EngineChoice; 3] = [
        EngineChoice::Counting,
        EngineChoice::Averaging,
        EngineChoice::Krein,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            EngineChoice::Counting => "counting",
            EngineChoice::Averaging => "averaging",
            EngineChoice::Krein => "krein",
        }
    }
}

impl fmt::Display for EngineChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EngineChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "counting" => Ok(EngineChoice::Counting),
            "averaging" => Ok(EngineChoice::Averaging),
            "krein" => Ok(EngineChoice::Krein),
            other => Err(Error::InvalidArgument(format!("unknown engine '{other}'"))),
        }
    }
}

/// `ξ_{H1,H0} = N_{H0} − N_{H1}` with the closed `≤` counting convention.
pub fn ssf_counting(h0: &HermitianOperator, h1: &HermitianOperator) -> Result<StepFunction> {
    h0.check_dim(h1)?;
    let up = h0.eigenvalues().iter().map(|&e| (e, 1i64));
    let down = h1.eigenvalues().iter().map(|&e| (e, -1i64));
    StepFunction::from_jumps(up.chain(down))
}

/// `r ↦ Tr(V φ(H0 + rV))`.
pub fn averaging_integrand(path: &PerturbationPath, phi: &TestFunction, r: f64) -> f64 {
    let f = path.at(r).apply_function(phi);
    path.v()
        .trace_product(&f)
        .expect("path operators share a dimension")
}

/// `ξ(φ) = ∫₀¹ Tr(V φ(H_r)) dr` to absolute error `tol`.
pub fn ssf_averaging(path: &PerturbationPath, phi: &TestFunction, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if path.v().matrix().iter().all(|z| z.re == 0.0 && z.im == 0.0) {
        return Ok(0.0);
    }
    let est = quadrature::integrate(|r| averaging_integrand(path, phi, r), 0.0, 1.0, tol)?;
    Ok(est.value)
}

/// `Tr(φ(H1) − φ(H0))`.
pub fn trace_difference(
    h0: &HermitianOperator,
    h1: &HermitianOperator,
    phi: &TestFunction,
) -> Result<f64> {
    h0.check_dim(h1)?;
    Ok(h1.apply_function(phi).trace() - h0.apply_function(phi).trace())
}

/// `|ξ_{H2,H0}(φ) − ξ_{H2,H1}(φ) − ξ_{H1,H0}(φ)|` with `H1 = H0 + V1`,
/// `H2 = H0 + V2`.
///
/// The counting engine combines the three step functions exactly before
/// pairing. The Krein engine has no pairing of its own; its residual is the
/// largest pointwise residual over a 65-point grid spanning `supp φ`,
/// skipping points within twice the guard distance of any eigenvalue of the
/// three operators.
pub fn additivity_residual(
    h0: &HermitianOperator,
    v1: &HermitianOperator,
    v2: &HermitianOperator,
    phi: &TestFunction,
    engine: EngineChoice,
    tol: f64,
) -> Result<f64> {
    h0.check_dim(v1)?;
    h0.check_dim(v2)?;
    let h1 = h0.checked_add(v1)?;
    let h2 = h0.checked_add(v2)?;
    match engine {
        EngineChoice::Counting => {
            let xi20 = ssf_counting(h0, &h2)?;
            let xi21 = ssf_counting(&h1, &h2)?;
            let xi10 = ssf_counting(h0, &h1)?;
            let combined = &(&xi20 - &xi21) - &xi10;
            Ok(pair_density(&combined, phi, tol)?.abs())
        }
        EngineChoice::Averaging => {
            let p20 = PerturbationPath::new(h0.clone(), v2.clone())?;
            let p21 = PerturbationPath::new(h1.clone(), v2.checked_sub(v1)?)?;
            let p10 = PerturbationPath::new(h0.clone(), v1.clone())?;
            let a = ssf_averaging(&p20, phi, tol)?;
            let b = ssf_averaging(&p21, phi, tol)?;
            let c = ssf_averaging(&p10, phi, tol)?;
            Ok((a - b - c).abs())
        }
        EngineChoice::Krein => {
            let p20 = PerturbationPath::new(h0.clone(), v2.clone())?;
            let p21 = PerturbationPath::new(h1.clone(), v2.checked_sub(v1)?)?;
            let p10 = PerturbationPath::new(h0.clone(), v1.clone())?;
            let grid = guarded_grid(phi, &[h0, &h1, &h2, &p21.endpoint()], 65);
            if grid.is_empty() {
                return Ok(0.0);
            }
            let run = |p: &PerturbationPath| -> Result<Vec<f64>> {
                let sched = KreinSchedule::for_path(p, grid.clone())?;
                Ok(ssf_krein(p, &sched)?.into_iter().map(|(_, x)| x).collect())
            };
            let (a, b, c) = (run(&p20)?, run(&p21)?, run(&p10)?);
            Ok(a.iter()
                .zip(&b)
                .zip(&c)
                .map(|((a, b), c)| (a - b - c).abs())
                .fold(0.0, f64::max))
        }
    }
}

/// Interior grid of `supp φ` with points near any listed spectrum removed.
fn guarded_grid(phi: &TestFunction, ops: &[&HermitianOperator], n: usize) -> Vec<f64> {
    let (lo, hi) = phi.support();
    let eigen: Vec<f64> = ops
        .iter()
        .flat_map(|h| h.eigenvalues().iter().copied())
        .collect();
    let min = eigen.iter().copied().fold(f64::INFINITY, f64::min);
    let max = eigen.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let guard = 2.0 * krein::guard_for_diameter(max - min);
    (1..=n)
        .map(|k| lo + (hi - lo) * k as f64 / (n + 1) as f64)
        .filter(|&x| eigen.iter().all(|&e| (x - e).abs() >= guard))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::Generator;
    use crate::testfn::{pair_derivative, Family};

    fn diag(d: &[f64]) -> HermitianOperator {
        HermitianOperator::from_real_diagonal(d)
    }

    #[test]
    fn counting_scalar_move() {
        let xi = ssf_counting(&diag(&[0.0]), &diag(&[1.0])).unwrap();
        assert_eq!(xi.breakpoints(), &[0.0, 1.0]);
        assert_eq!(xi.values(), &[1]);
    }

    #[test]
    fn counting_equal_pair_is_zero() {
        let h = Generator::new(2).hermitian(4);
        assert!(ssf_counting(&h, &h).unwrap().is_zero());
    }

    #[test]
    fn counting_shifted_diagonal() {
        let h0 = diag(&[-1.0, 1.0]);
        let h1 = h0
            .checked_add(&HermitianOperator::identity(2).scaled(0.5))
            .unwrap();
        let xi = ssf_counting(&h0, &h1).unwrap();
        assert_eq!(xi.breakpoints(), &[-1.0, -0.5, 1.0, 1.5]);
        assert_eq!(xi.values(), &[1, 0, 1]);
    }

    #[test]
    fn counting_dimension_mismatch() {
        let err = ssf_counting(&diag(&[0.0]), &diag(&[0.0, 1.0])).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn trace_difference_scalar() {
        let phi = TestFunction::new(Family::SmoothBump, -1.0, 2.0, 1.0).unwrap();
        let d = trace_difference(&diag(&[0.0]), &diag(&[1.0]), &phi).unwrap();
        assert!((d - (phi.value(1.0) - phi.value(0.0))).abs() <= 1e-15);
        let h = Generator::new(1).hermitian(3);
        assert!(trace_difference(&h, &h, &phi).unwrap().abs() <= 1e-12);
    }

    #[test]
    fn trace_formula_seeded_6x6() {
        let mut g = Generator::new(6);
        let h0 = g.hermitian(6);
        let h1 = h0.checked_add(&g.hermitian(6)).unwrap();
        for fam in [
            Family::SmoothBump,
            Family::RaisedCosine,
            Family::CubicSplineHat,
        ] {
            let phi = g.test_function(fam);
            let lhs = trace_difference(&h0, &h1, &phi).unwrap();
            let rhs = pair_derivative(&ssf_counting(&h0, &h1).unwrap(), &phi);
            assert!((lhs - rhs).abs() <= 1e-10, "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn averaging_scalar_matches_integral_of_phi() {
        let phi = TestFunction::new(Family::SmoothBump, -0.5, 1.2, 1.0).unwrap();
        let path = PerturbationPath::new(diag(&[0.0]), diag(&[1.0])).unwrap();
        let tol = 1e-10;
        let avg = ssf_averaging(&path, &phi, tol).unwrap();
        let xi = StepFunction::indicator(0.0, 1.0, 1).unwrap();
        let paired = pair_density(&xi, &phi, tol).unwrap();
        assert!((avg - paired).abs() <= tol + 1e-8);
    }

    #[test]
    fn averaging_zero_perturbation_is_exact_zero() {
        let phi = TestFunction::new(Family::RaisedCosine, -2.0, 2.0, 1.0).unwrap();
        let path =
            PerturbationPath::new(Generator::new(3).hermitian(3), HermitianOperator::zeros(3))
                .unwrap();
        assert_eq!(ssf_averaging(&path, &phi, 1e-8).unwrap(), 0.0);
    }

    #[test]
    fn averaging_matches_counting_seeded_4x4() {
        let mut g = Generator::new(44);
        let path = PerturbationPath::new(g.hermitian(4), g.hermitian(4)).unwrap();
        let phi = g.test_function(Family::CubicSplineHat);
        let avg = ssf_averaging(&path, &phi, 1e-8).unwrap();
        let xi = ssf_counting(path.h0(), &path.endpoint()).unwrap();
        let paired = pair_density(&xi, &phi, 1e-10).unwrap();
        assert!((avg - paired).abs() <= 1e-6, "{avg} vs {paired}");
    }

    #[test]
    fn additivity_zero_v1_is_exact() {
        let mut g = Generator::new(17);
        let h0 = g.hermitian(3);
        let v2 = g.hermitian(3);
        let v1 = HermitianOperator::zeros(3);
        let phi = g.test_function(Family::SmoothBump);
        for engine in EngineChoice::ALL {
            let r = additivity_residual(&h0, &v1, &v2, &phi, engine, 1e-8).unwrap();
            assert_eq!(r, 0.0, "{engine}");
        }
    }

    #[test]
    fn additivity_counting_and_averaging_seeded_5x5() {
        let mut g = Generator::new(55);
        let (h0, v1, v2) = (g.hermitian(5), g.hermitian(5), g.hermitian(5));
        let phi = g.test_function(Family::SmoothBump);
        let exact = additivity_residual(&h0, &v1, &v2, &phi, EngineChoice::Counting, 1e-8).unwrap();
        assert_eq!(exact, 0.0);
        let avg = additivity_residual(&h0, &v1, &v2, &phi, EngineChoice::Averaging, 1e-8).unwrap();
        assert!(avg <= 3e-8, "{avg}");
    }

    #[test]
    fn engine_names_round_trip() {
        for e in EngineChoice::ALL {
            assert_eq!(e.as_str().parse::<EngineChoice>().unwrap(), e);
        }
        assert!("spline".parse::<EngineChoice>().is_err());
    }
}
