//! Block-labeled surrogate for the absolutely continuous / singular split.
//!
//! Finite matrices have no absolutely continuous spectrum, so the split is
//! supplied explicitly: an operator is a direct sum of blocks, each tagged
//! [`Label::Ac`] or [`Label::Sing`], and perturbations must preserve the
//! blocks. The part `φ(H_r^{(label)})` is the functional calculus of the
//! labeled blocks, embedded by zero on the rest. That equals
//! `φ(H_r) E^{(label)}` for block-diagonal `H_r` and never picks up a `φ(0)`
//! contribution from the complementary blocks.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::engines::{ssf_averaging, ssf_counting};
use crate::step::StepFunction;
use crate::testfn::TestFunction;
use crate::{Error, HermitianOperator, PerturbationPath, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    /// Stands in for the absolutely continuous part.
    Ac,
    /// Stands in for the singular part.
    Sing,
}

impl Label {
    pub fn as_str(&self) -> &'static str {
        match self {
            Label::Ac => "AC",
            Label::Sing => "SING",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "AC" => Ok(Label::Ac),
            "SING" => Ok(Label::Sing),
            other => Err(Error::InvalidArgument(format!(
                "label must be AC or SING, got '{other}'"
            ))),
        }
    }
}

/// Direct sum of labeled Hermitian blocks, in the order given.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledOperator {
    blocks: Vec<(HermitianOperator, Label)>,
}

impl LabeledOperator {
    pub fn new(blocks: Vec<(HermitianOperator, Label)>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidArgument(
                "labeled operator needs at least one block".into(),
            ));
        }
        Ok(Self { blocks })
    }

    pub fn blocks(&self) -> &[(HermitianOperator, Label)] {
        &self.blocks
    }

    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|(h, _)| h.dim()).sum()
    }

    /// `(dim, label)` per block.
    pub fn layout(&self) -> Vec<(usize, Label)> {
        self.blocks.iter().map(|(h, l)| (h.dim(), *l)).collect()
    }

    /// Block-diagonal matrix on the full space.
    pub fn assemble(&self) -> HermitianOperator {
        let n = self.dim();
        let mut m = DMatrix::<C64>::zeros(n, n);
        let mut offset = 0;
        for (h, _) in &self.blocks {
            let d = h.dim();
            m.view_mut((offset, offset), (d, d)).copy_from(h.matrix());
            offset += d;
        }
        HermitianOperator::from_hermitian_entries(m)
    }

    /// Direct sum of the blocks carrying `label`, or `None` if there are none.
    pub fn restrict(&self, label: Label) -> Option<HermitianOperator> {
        let parts: Vec<_> = self
            .blocks
            .iter()
            .filter(|(_, l)| *l == label)
            .map(|(h, _)| (h.clone(), label))
            .collect();
        if parts.is_empty() {
            return None;
        }
        Some(LabeledOperator { blocks: parts }.assemble())
    }

    /// Splits a full matrix into blocks conforming to `layout`, rejecting
    /// any nonzero entry outside the diagonal blocks.
    pub fn from_conformal(full: &HermitianOperator, layout: &[(usize, Label)]) -> Result<Self> {
        let total: usize = layout.iter().map(|(d, _)| d).sum();
        if full.dim() != total {
            return Err(Error::DimensionMismatch {
                expected: total,
                found: full.dim(),
            });
        }
        let mut owner = Vec::with_capacity(total);
        for (b, &(d, _)) in layout.iter().enumerate() {
            owner.extend(std::iter::repeat_n(b, d));
        }
        let m = full.matrix();
        for j in 0..total {
            for i in 0..total {
                if owner[i] != owner[j] && m[(i, j)] != C64::new(0.0, 0.0) {
                    return Err(Error::LabelStructureViolation(format!(
                        "entry ({i}, {j}) couples blocks {} and {}",
                        owner[i], owner[j]
                    )));
                }
            }
        }
        let mut blocks = Vec::with_capacity(layout.len());
        let mut offset = 0;
        for &(d, label) in layout {
            let sub = m.view((offset, offset), (d, d)).clone_owned();
            blocks.push((HermitianOperator::from_hermitian_entries(sub), label));
            offset += d;
        }
        Self::new(blocks)
    }

    fn zip_blocks<F>(&self, other: &LabeledOperator, f: F) -> Result<LabeledOperator>
    where
        F: Fn(&HermitianOperator, &HermitianOperator) -> Result<HermitianOperator>,
    {
        check_conformal(self, other)?;
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|((a, l), (b, _))| Ok((f(a, b)?, *l)))
            .collect::<Result<Vec<_>>>()?;
        Ok(LabeledOperator { blocks })
    }

    pub fn checked_add(&self, other: &LabeledOperator) -> Result<LabeledOperator> {
        self.zip_blocks(other, |a, b| a.checked_add(b))
    }

    pub fn checked_sub(&self, other: &LabeledOperator) -> Result<LabeledOperator> {
        self.zip_blocks(other, |a, b| a.checked_sub(b))
    }

    pub fn scaled(&self, r: f64) -> LabeledOperator {
        LabeledOperator {
            blocks: self.blocks.iter().map(|(h, l)| (h.scaled(r), *l)).collect(),
        }
    }

    pub fn trace_norm(&self) -> f64 {
        self.blocks.iter().map(|(h, _)| h.trace_norm()).sum()
    }
}

fn check_conformal(a: &LabeledOperator, b: &LabeledOperator) -> Result<()> {
    if a.layout() != b.layout() {
        return Err(Error::LabelStructureViolation(format!(
            "block layouts differ: {:?} vs {:?}",
            a.layout(),
            b.layout()
        )));
    }
    Ok(())
}

/// `E^{(label)}`: orthogonal projector onto the basis indices of the
/// blocks carrying `label`.
pub fn part_projector(h: &LabeledOperator, label: Label) -> HermitianOperator {
    let diag: Vec<f64> = h
        .blocks
        .iter()
        .flat_map(|(b, l)| std::iter::repeat_n(if *l == label { 1.0 } else { 0.0 }, b.dim()))
        .collect();
    HermitianOperator::from_real_diagonal(&diag)
}

/// Block-conformal path `H_r = H0 + rV` with matching labels.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledPath {
    h0: LabeledOperator,
    v: LabeledOperator,
}

impl LabeledPath {
    pub fn new(h0: LabeledOperator, v: LabeledOperator) -> Result<Self> {
        check_conformal(&h0, &v)?;
        Ok(Self { h0, v })
    }

    /// Accepts `V` as a full matrix, which must be block diagonal
    /// conformally with `h0`.
    pub fn from_full_perturbation(h0: LabeledOperator, v: &HermitianOperator) -> Result<Self> {
        let layout = h0.layout();
        let v = LabeledOperator::from_conformal(v, &layout)?;
        Ok(Self { h0, v })
    }

    pub fn h0(&self) -> &LabeledOperator {
        &self.h0
    }

    pub fn v(&self) -> &LabeledOperator {
        &self.v
    }

    pub fn endpoint(&self) -> LabeledOperator {
        self.h0
            .checked_add(&self.v)
            .expect("conformal by construction")
    }

    pub fn reversed(&self) -> LabeledPath {
        LabeledPath {
            h0: self.endpoint(),
            v: self.v.scaled(-1.0),
        }
    }

    /// Unlabeled path on the full space.
    pub fn flattened(&self) -> PerturbationPath {
        PerturbationPath::new(self.h0.assemble(), self.v.assemble())
            .expect("conformal blocks share dimensions")
    }

    /// The path restricted to the blocks carrying `label`.
    pub fn restrict(&self, label: Label) -> Option<PerturbationPath> {
        let h0 = self.h0.restrict(label)?;
        let v = self.v.restrict(label)?;
        Some(PerturbationPath::new(h0, v).expect("conformal blocks share dimensions"))
    }

    /// `ξ^{(label)}` step function: exact counting on the labeled sub-pair.
    pub fn part_counting(&self, label: Label) -> Result<StepFunction> {
        match self.restrict(label) {
            Some(p) => ssf_counting(p.h0(), &p.endpoint()),
            None => Ok(StepFunction::zero()),
        }
    }
}

/// `r ↦ Tr(V φ(H_r) E^{(label)})` computed on the full space.
pub fn projected_integrand(path: &LabeledPath, label: Label, phi: &TestFunction, r: f64) -> f64 {
    let flat = path.flattened();
    let e = part_projector(path.h0(), label);
    let f = flat.at(r).apply_function(phi);
    let fe = f.matrix() * e.matrix();
    let v = flat.v().matrix();
    (v * fe).trace().re
}

/// `ξ^{(label)}(φ) = ∫₀¹ Tr(V φ(H_r^{(label)})) dr` to absolute error `tol`.
pub fn ssf_part(path: &LabeledPath, label: Label, phi: &TestFunction, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    match path.restrict(label) {
        Some(sub) => ssf_averaging(&sub, phi, tol),
        None => Ok(0.0),
    }
}

/// `|ξ^{(label)}_{H0+V2,H0}(φ) − ξ^{(label)}_{H0+V2,H0+V1}(φ) − ξ^{(label)}_{H0+V1,H0}(φ)|`.
pub fn part_additivity_residual(
    h0: &LabeledOperator,
    v1: &LabeledOperator,
    v2: &LabeledOperator,
    label: Label,
    phi: &TestFunction,
    tol: f64,
) -> Result<f64> {
    let p20 = LabeledPath::new(h0.clone(), v2.clone())?;
    let h1 = h0.checked_add(v1)?;
    let p21 = LabeledPath::new(h1, v2.checked_sub(v1)?)?;
    let p10 = LabeledPath::new(h0.clone(), v1.clone())?;
    let a = ssf_part(&p20, label, phi, tol)?;
    let b = ssf_part(&p21, label, phi, tol)?;
    let c = ssf_part(&p10, label, phi, tol)?;
    Ok((a - b - c).abs())
}

/// One row of [`weak_continuity_table`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuityRow {
    /// `‖V − Vₙ‖₁`.
    pub trace_norm_gap: f64,
    /// `|ξ^(a)_{H0+Vₙ,H0}(φ) − ξ^(a)_{H0+V,H0}(φ)|`.
    pub ssf_gap: f64,
}

impl ContinuityRow {
    /// `2‖V − Vₙ‖₁‖φ‖∞ + 2·tol`.
    pub fn bound(&self, phi: &TestFunction, tol: f64) -> f64 {
        2.0 * self.trace_norm_gap * phi.sup_norm() + 2.0 * tol
    }
}

pub fn weak_continuity_table(
    h0: &LabeledOperator,
    v: &LabeledOperator,
    vseq: &[LabeledOperator],
    phi: &TestFunction,
    tol: f64,
) -> Result<Vec<ContinuityRow>> {
    let limit = ssf_part(
        &LabeledPath::new(h0.clone(), v.clone())?,
        Label::Ac,
        phi,
        tol,
    )?;
    vseq.iter()
        .map(|vn| {
            let gap = v.checked_sub(vn)?.trace_norm();
            let value = ssf_part(
                &LabeledPath::new(h0.clone(), vn.clone())?,
                Label::Ac,
                phi,
                tol,
            )?;
            Ok(ContinuityRow {
                trace_norm_gap: gap,
                ssf_gap: (value - limit).abs(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::Generator;
    use crate::testfn::{pair_density, Family};

    const LAYOUT: [(usize, Label); 2] = [(3, Label::Ac), (2, Label::Sing)];

    fn seeded(seed: u64) -> (LabeledPath, TestFunction) {
        let mut g = Generator::new(seed);
        let h0 = g.labeled(&LAYOUT);
        let v = g.labeled(&LAYOUT);
        let phi = g.test_function(Family::SmoothBump);
        (LabeledPath::new(h0, v).unwrap(), phi)
    }

    #[test]
    fn projector_examples() {
        let mut g = Generator::new(1);
        let all_ac = g.labeled(&[(2, Label::Ac), (1, Label::Ac)]);
        assert_eq!(
            part_projector(&all_ac, Label::Ac),
            HermitianOperator::identity(3)
        );
        assert_eq!(
            part_projector(&all_ac, Label::Sing),
            HermitianOperator::zeros(3)
        );
        let mixed = g.labeled(&[(2, Label::Ac), (3, Label::Sing)]);
        assert_eq!(
            part_projector(&mixed, Label::Ac),
            HermitianOperator::from_real_diagonal(&[1.0, 1.0, 0.0, 0.0, 0.0])
        );
        let p = part_projector(&mixed, Label::Sing);
        assert_eq!(p.matrix() * p.matrix(), *p.matrix());
    }

    #[test]
    fn assemble_is_block_diagonal() {
        let (path, _) = seeded(2);
        let full = path.h0().assemble();
        assert_eq!(full.dim(), 5);
        assert_eq!(full.matrix()[(0, 4)], C64::new(0.0, 0.0));
        assert_eq!(
            full.matrix()[(3, 4)],
            path.h0().blocks()[1].0.matrix()[(0, 1)]
        );
        let round = LabeledOperator::from_conformal(&full, &LAYOUT).unwrap();
        assert_eq!(&round, path.h0());
    }

    #[test]
    fn non_conformal_perturbation_rejected() {
        let mut g = Generator::new(3);
        let h0 = g.labeled(&LAYOUT);
        let coupled = g.hermitian(5);
        assert!(matches!(
            LabeledPath::from_full_perturbation(h0.clone(), &coupled),
            Err(Error::LabelStructureViolation(_))
        ));
        let other = g.labeled(&[(2, Label::Ac), (3, Label::Sing)]);
        assert!(matches!(
            LabeledPath::new(h0.clone(), other),
            Err(Error::LabelStructureViolation(_))
        ));
        let relabeled = g.labeled(&[(3, Label::Sing), (2, Label::Sing)]);
        assert!(LabeledPath::new(h0, relabeled).is_err());
    }

    #[test]
    fn empty_part_is_exact_zero() {
        let mut g = Generator::new(4);
        let h0 = g.labeled(&[(3, Label::Ac)]);
        let v = g.labeled(&[(3, Label::Ac)]);
        let phi = g.test_function(Family::RaisedCosine);
        let path = LabeledPath::new(h0, v).unwrap();
        assert_eq!(ssf_part(&path, Label::Sing, &phi, 1e-8).unwrap(), 0.0);
    }

    #[test]
    fn parts_sum_to_whole() {
        let (path, phi) = seeded(5);
        let tol = 1e-8;
        let ac = ssf_part(&path, Label::Ac, &phi, tol).unwrap();
        let sing = ssf_part(&path, Label::Sing, &phi, tol).unwrap();
        let whole = ssf_averaging(&path.flattened(), &phi, tol).unwrap();
        assert!((ac + sing - whole).abs() <= 2.0 * tol);
    }

    #[test]
    fn singular_part_matches_block_counting() {
        let (path, phi) = seeded(6);
        let sing = ssf_part(&path, Label::Sing, &phi, 1e-8).unwrap();
        let paired = pair_density(&path.part_counting(Label::Sing).unwrap(), &phi, 1e-10).unwrap();
        assert!((sing - paired).abs() <= 1e-6);
    }

    #[test]
    fn projected_integrand_matches_restricted_route() {
        let (path, phi) = seeded(7);
        for label in [Label::Ac, Label::Sing] {
            let sub = path.restrict(label).unwrap();
            for r in [0.0, 0.37, 1.0] {
                let a = projected_integrand(&path, label, &phi, r);
                let b = crate::engines::averaging_integrand(&sub, &phi, r);
                assert!((a - b).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn part_antisymmetry_and_locality() {
        let (path, phi) = seeded(8);
        let tol = 1e-8;
        for label in [Label::Ac, Label::Sing] {
            let fwd = ssf_part(&path, label, &phi, tol).unwrap();
            let back = ssf_part(&path.reversed(), label, &phi, tol).unwrap();
            assert!((fwd + back).abs() <= 2.0 * tol);
        }
        // perturb only the AC block
        let mut blocks = path.v().blocks().to_vec();
        blocks[1].0 = HermitianOperator::zeros(2);
        let v = LabeledOperator::new(blocks).unwrap();
        let local = LabeledPath::new(path.h0().clone(), v).unwrap();
        assert!(ssf_part(&local, Label::Sing, &phi, tol).unwrap().abs() <= tol);
    }

    #[test]
    fn part_additivity_seeded() {
        let mut g = Generator::new(10);
        let h0 = g.labeled(&LAYOUT);
        let v1 = g.labeled(&LAYOUT);
        let v2 = g.labeled(&LAYOUT);
        let phi = g.test_function(Family::CubicSplineHat);
        let zero = h0.scaled(0.0);
        for label in [Label::Ac, Label::Sing] {
            let r = part_additivity_residual(&h0, &v1, &v2, label, &phi, 1e-8).unwrap();
            assert!(r <= 3e-8, "{label}: {r}");
            let r0 = part_additivity_residual(&h0, &zero, &v2, label, &phi, 1e-8).unwrap();
            assert!(r0 <= 2e-8);
        }
    }

    #[test]
    fn continuity_table_respects_bound() {
        let (path, phi) = seeded(11);
        let tol = 1e-8;
        let v = path.v();
        let vseq: Vec<_> = (2..=6).map(|n| v.scaled(1.0 - 1.0 / n as f64)).collect();
        let rows = weak_continuity_table(path.h0(), v, &vseq, &phi, tol).unwrap();
        for (k, row) in rows.iter().enumerate() {
            let n = (k + 2) as f64;
            assert!((row.trace_norm_gap - v.trace_norm() / n).abs() <= 1e-12);
            assert!(row.ssf_gap <= row.bound(&phi, tol));
        }
        let same = weak_continuity_table(path.h0(), v, std::slice::from_ref(v), &phi, tol).unwrap();
        assert_eq!(same[0].trace_norm_gap, 0.0);
        assert!(same[0].ssf_gap <= 2.0 * tol);
    }
}
