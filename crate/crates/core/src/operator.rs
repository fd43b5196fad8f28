//! Dense finite-dimensional self-adjoint operators.
//!
//! A [`HermitianOperator`] owns its complex entries and a write-once cache of
//! its ascending eigensystem. Everything downstream (functional calculus,
//! traces, counting functions) goes through that cached spectral resolution.

use std::sync::OnceLock;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::testfn::TestFunction;
use crate::{Error, Result, C64};

/// Relative asymmetry accepted (and then averaged away) on construction.
pub const SYMMETRIZATION_TOL: f64 = 1e-12;

/// Ascending eigenvalues with an orthonormal family of eigenvectors (columns).
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<C64>,
}

impl EigenSystem {
    /// `U Λ U*`.
    pub fn reconstruct(&self) -> DMatrix<C64> {
        let mut scaled = self.eigenvectors.clone();
        for (j, &lambda) in self.eigenvalues.iter().enumerate() {
            scaled.column_mut(j).scale_mut(lambda);
        }
        scaled * self.eigenvectors.adjoint()
    }

    /// `‖U*U − I‖_F`.
    pub fn orthonormality_defect(&self) -> f64 {
        let n = self.eigenvalues.len();
        let gram = self.eigenvectors.adjoint() * &self.eigenvectors;
        (gram - DMatrix::<C64>::identity(n, n)).norm()
    }
}

/// A finite self-adjoint operator.
#[derive(Debug)]
pub struct HermitianOperator {
    entries: DMatrix<C64>,
    eigen: OnceLock<EigenSystem>,
}

impl Clone for HermitianOperator {
    fn clone(&self) -> Self {
        let eigen = OnceLock::new();
        if let Some(es) = self.eigen.get() {
            let _ = eigen.set(es.clone());
        }
        Self {
            entries: self.entries.clone(),
            eigen,
        }
    }
}

impl PartialEq for HermitianOperator {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries
    }
}

impl HermitianOperator {
    /// Validates and symmetrizes `entries`.
    ///
    /// Entries within `1e-12 · max(1, ‖H‖_F)` of Hermitian (Frobenius norm of
    /// `H − H*`) are replaced by `(H + H*)/2`; anything farther is rejected.
    pub fn new(entries: DMatrix<C64>) -> Result<Self> {
        let (rows, cols) = entries.shape();
        if rows != cols {
            return Err(Error::DimensionMismatch {
                expected: rows,
                found: cols,
            });
        }
        if rows == 0 {
            return Err(Error::InvalidArgument(
                "operator dimension must be at least 1".into(),
            ));
        }
        for j in 0..cols {
            for i in 0..rows {
                let z = entries[(i, j)];
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::NonFiniteEntry { row: i, col: j });
                }
            }
        }
        let asymmetry = (&entries - entries.adjoint()).norm();
        let bound = SYMMETRIZATION_TOL * entries.norm().max(1.0);
        if asymmetry > bound {
            return Err(Error::NonHermitianInput { asymmetry, bound });
        }
        Ok(Self::symmetrized(entries))
    }

    /// Real symmetric input in row-major order.
    pub fn from_real_rows(dim: usize, rows: &[f64]) -> Result<Self> {
        if rows.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: rows.len(),
            });
        }
        Self::new(DMatrix::from_row_iterator(
            dim,
            dim,
            rows.iter().map(|&x| C64::new(x, 0.0)),
        ))
    }

    /// Diagonal operator. Panics on an empty slice.
    pub fn from_real_diagonal(diagonal: &[f64]) -> Self {
        assert!(
            !diagonal.is_empty(),
            "operator dimension must be at least 1"
        );
        let n = diagonal.len();
        let mut m = DMatrix::<C64>::zeros(n, n);
        for (i, &d) in diagonal.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        Self::from_hermitian_entries(m)
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_real_diagonal(&vec![1.0; dim])
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_real_diagonal(&vec![0.0; dim])
    }

    /// Rank-one projection-like operator `v v*`.
    pub fn outer(vector: &[C64]) -> Self {
        let n = vector.len();
        let m = DMatrix::from_fn(n, n, |i, j| vector[i] * vector[j].conj());
        Self::symmetrized(m)
    }

    /// Caller guarantees exact conjugate symmetry.
    pub(crate) fn from_hermitian_entries(entries: DMatrix<C64>) -> Self {
        Self {
            entries,
            eigen: OnceLock::new(),
        }
    }

    fn symmetrized(entries: DMatrix<C64>) -> Self {
        let n = entries.nrows();
        let m = DMatrix::from_fn(n, n, |i, j| {
            (entries[(i, j)] + entries[(j, i)].conj()) * 0.5
        });
        Self::from_hermitian_entries(m)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.entries
    }

    /// Cached ascending eigensystem, computed on first use.
    pub fn eigensystem(&self) -> &EigenSystem {
        self.eigen
            .get_or_init(|| compute_eigensystem(&self.entries))
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigensystem().eigenvalues
    }

    /// Smallest and largest eigenvalue.
    pub fn spectral_bounds(&self) -> (f64, f64) {
        let ev = self.eigenvalues();
        (ev[0], ev[ev.len() - 1])
    }

    /// Functional calculus `U f(Λ) U*` for an arbitrary real function.
    pub fn apply_fn<F: Fn(f64) -> f64>(&self, f: F) -> HermitianOperator {
        let es = self.eigensystem();
        let mut scaled = es.eigenvectors.clone();
        for (j, &lambda) in es.eigenvalues.iter().enumerate() {
            scaled.column_mut(j).scale_mut(f(lambda));
        }
        Self::symmetrized(scaled * es.eigenvectors.adjoint())
    }

    /// `φ(H)` for a test function.
    pub fn apply_function(&self, phi: &TestFunction) -> HermitianOperator {
        self.apply_fn(|x| phi.value(x))
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.entries[(i, i)].re).sum()
    }

    /// `Re Tr(A B)` without forming the product.
    pub fn trace_product(&self, other: &HermitianOperator) -> Result<f64> {
        self.check_dim(other)?;
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                let p = self.entries[(i, j)] * other.entries[(j, i)];
                acc += p.re;
            }
        }
        Ok(acc)
    }

    /// Sum of absolute eigenvalues.
    pub fn trace_norm(&self) -> f64 {
        self.eigenvalues().iter().map(|x| x.abs()).sum()
    }

    /// Largest absolute eigenvalue.
    pub fn operator_norm(&self) -> f64 {
        let (lo, hi) = self.spectral_bounds();
        lo.abs().max(hi.abs())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.norm()
    }

    /// `N_H(λ) = #{i : λ_i ≤ λ}`.
    pub fn counting_function(&self, lambda: f64) -> usize {
        self.eigenvalues().partition_point(|&e| e <= lambda)
    }

    pub fn checked_add(&self, other: &HermitianOperator) -> Result<HermitianOperator> {
        self.check_dim(other)?;
        Ok(Self::from_hermitian_entries(&self.entries + &other.entries))
    }

    pub fn checked_sub(&self, other: &HermitianOperator) -> Result<HermitianOperator> {
        self.check_dim(other)?;
        Ok(Self::from_hermitian_entries(&self.entries - &other.entries))
    }

    /// `self + r·other`, entrywise.
    pub fn add_scaled(&self, r: f64, other: &HermitianOperator) -> Result<HermitianOperator> {
        self.check_dim(other)?;
        let m = self.entries.zip_map(&other.entries, |a, b| a + b * r);
        Ok(Self::from_hermitian_entries(m))
    }

    pub fn scaled(&self, r: f64) -> HermitianOperator {
        Self::from_hermitian_entries(self.entries.map(|z| z * r))
    }

    /// `self + c·I`.
    pub fn shifted(&self, c: f64) -> HermitianOperator {
        let mut m = self.entries.clone();
        for i in 0..self.dim() {
            m[(i, i)] += C64::new(c, 0.0);
        }
        Self::from_hermitian_entries(m)
    }

    /// `U H U*`, re-symmetrized.
    pub fn conjugated_by(&self, unitary: &DMatrix<C64>) -> Result<HermitianOperator> {
        if unitary.shape() != self.entries.shape() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: unitary.nrows(),
            });
        }
        Ok(Self::symmetrized(
            unitary * &self.entries * unitary.adjoint(),
        ))
    }

    pub(crate) fn check_dim(&self, other: &HermitianOperator) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }
}

fn is_diagonal(m: &DMatrix<C64>) -> bool {
    let n = m.nrows();
    (0..n).all(|j| (0..n).all(|i| i == j || m[(i, j)] == C64::new(0.0, 0.0)))
}

fn compute_eigensystem(m: &DMatrix<C64>) -> EigenSystem {
    let n = m.nrows();
    let (values, vectors): (Vec<f64>, DMatrix<C64>) = if is_diagonal(m) {
        (
            (0..n).map(|i| m[(i, i)].re).collect(),
            DMatrix::identity(n, n),
        )
    } else {
        let se = SymmetricEigen::new(m.clone());
        (se.eigenvalues.iter().copied().collect(), se.eigenvectors)
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let eigenvalues = order.iter().map(|&k| values[k]).collect();
    let eigenvectors = DMatrix::from_fn(n, n, |i, j| vectors[(i, order[j])]);
    EigenSystem {
        eigenvalues,
        eigenvectors,
    }
}

/// The linear path `H_r = H0 + r·V`, `r ∈ [0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationPath {
    h0: HermitianOperator,
    v: HermitianOperator,
}

impl PerturbationPath {
    pub fn new(h0: HermitianOperator, v: HermitianOperator) -> Result<Self> {
        h0.check_dim(&v)?;
        Ok(Self { h0, v })
    }

    /// Path from `h0` to `h1` with `V = h1 − h0`.
    pub fn between(h0: &HermitianOperator, h1: &HermitianOperator) -> Result<Self> {
        let v = h1.checked_sub(h0)?;
        Ok(Self { h0: h0.clone(), v })
    }

    pub fn h0(&self) -> &HermitianOperator {
        &self.h0
    }

    pub fn v(&self) -> &HermitianOperator {
        &self.v
    }

    pub fn dim(&self) -> usize {
        self.h0.dim()
    }

    pub fn at(&self, r: f64) -> HermitianOperator {
        self.h0
            .add_scaled(r, &self.v)
            .expect("path dimensions checked on construction")
    }

    pub fn endpoint(&self) -> HermitianOperator {
        self.at(1.0)
    }

    /// The path from `H0 + V` back to `H0`.
    pub fn reversed(&self) -> PerturbationPath {
        PerturbationPath {
            h0: self.endpoint(),
            v: self.v.scaled(-1.0),
        }
    }

    /// Re-parametrized piece `r ∈ [s, t]` of this path.
    pub fn sub_path(&self, s: f64, t: f64) -> PerturbationPath {
        PerturbationPath {
            h0: self.at(s),
            v: self.v.scaled(t - s),
        }
    }
}
