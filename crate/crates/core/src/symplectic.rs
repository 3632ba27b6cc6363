//! Metric, symplectic form and complex unit of a (naturally complex)
//! symplectic space, with canonical brackets and the complexification.
//!
//! All structures act on `ℝ²ⁿ` with the `(p; q)` ordering. The metric is
//! `(x, y) = xᵀ G y` and the form is `ω²(x, y) = xᵀ W y`; the complex unit is
//! the automorphism `J = G⁻¹ W`, so that `ω²(x, y) = (x, J y)`.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use num_complex::Complex64;

use crate::error::{Result, SegalError};
use crate::linalg::{
    antisymmetric_part_residual, block_diagonal, block_off_diagonal, condition_number,
    symmetric_part_residual,
};
use crate::model::PhaseSpacePoint;

/// Symmetry tolerance for metric and form matrices (relative, Frobenius).
pub const SYMMETRY_TOL: f64 = 1e-13;
/// Forms with a larger 2-norm condition number are treated as degenerate.
pub const MAX_FORM_CONDITION: f64 = 1e12;
/// Default tolerance for axiom residuals.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Positive-definite scalar product `(x, y) = xᵀ G y`.
#[derive(Debug, Clone)]
pub struct Metric {
    g: DMatrix<f64>,
    chol: Cholesky<f64, Dyn>,
    weights: Option<Vec<f64>>,
}

impl Metric {
    pub fn new(g: DMatrix<f64>) -> Result<Self> {
        Self::build(g, None)
    }

    /// Metric whose entries already include the quadrature weights listed in `weights`.
    pub fn with_weights(g: DMatrix<f64>, weights: Vec<f64>) -> Result<Self> {
        Self::build(g, Some(weights))
    }

    fn build(g: DMatrix<f64>, weights: Option<Vec<f64>>) -> Result<Self> {
        if !g.is_square() || !g.nrows().is_multiple_of(2) {
            return Err(SegalError::Metric(format!(
                "expected an even square matrix, got {}x{}",
                g.nrows(),
                g.ncols()
            )));
        }
        let asym = symmetric_part_residual(&g);
        if asym > SYMMETRY_TOL {
            return Err(SegalError::Metric(format!(
                "not symmetric (relative residual {asym:.3e})"
            )));
        }
        let chol = Cholesky::new(g.clone()).ok_or_else(|| {
            SegalError::Metric("Cholesky factorization failed (not positive definite)".into())
        })?;
        Ok(Self { g, chol, weights })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.g
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    /// Phase-space dimension `2n`.
    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    pub fn inner(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        x.dot(&(&self.g * y))
    }

    pub fn norm(&self, x: &DVector<f64>) -> f64 {
        self.inner(x, x).max(0.0).sqrt()
    }

    /// `G⁻¹ m` through the Cholesky factor.
    pub fn solve(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        self.chol.solve(m)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        crate::linalg::min_eigenvalue(&self.g)
    }
}

/// Nondegenerate antisymmetric bilinear form `ω²(x, y) = xᵀ W y`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticFormMatrix {
    w: DMatrix<f64>,
    condition: f64,
}

impl SymplecticFormMatrix {
    pub fn new(w: DMatrix<f64>) -> Result<Self> {
        if !w.is_square() || !w.nrows().is_multiple_of(2) {
            return Err(SegalError::InvalidInput(format!(
                "symplectic form must be an even square matrix, got {}x{}",
                w.nrows(),
                w.ncols()
            )));
        }
        let condition = condition_number(&w);
        if !(condition <= MAX_FORM_CONDITION) {
            return Err(SegalError::DegenerateForm { condition });
        }
        let sym = antisymmetric_part_residual(&w);
        if sym > SYMMETRY_TOL {
            return Err(SegalError::InvalidInput(format!(
                "symplectic form is not antisymmetric (relative residual {sym:.3e})"
            )));
        }
        Ok(Self { w, condition })
    }

    /// `dp ∧ dq` on `n` modes: `[[0, I], [−I, 0]]`.
    pub fn standard(n: usize) -> Self {
        Self::weighted(&vec![1.0; n])
    }

    /// `dp ∧ dq` integrated against the measure weights: `[[0, D], [−D, 0]]`.
    pub fn weighted(weights: &[f64]) -> Self {
        let neg: Vec<f64> = weights.iter().map(|w| -w).collect();
        let w = block_off_diagonal(weights, &neg);
        let condition = condition_number(&w);
        Self { w, condition }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.w
    }

    pub fn condition(&self) -> f64 {
        self.condition
    }

    pub fn dim(&self) -> usize {
        self.w.nrows()
    }

    pub fn eval(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        x.dot(&(&self.w * y))
    }
}

/// The automorphism `J = G⁻¹W`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexUnit(DMatrix<f64>);

impl ComplexUnit {
    pub fn from_matrix(j: DMatrix<f64>) -> Result<Self> {
        if !j.is_square() || !j.nrows().is_multiple_of(2) {
            return Err(SegalError::InvalidInput(format!(
                "complex unit must be an even square matrix, got {}x{}",
                j.nrows(),
                j.ncols()
            )));
        }
        Ok(Self(j))
    }

    /// `J_S = [[0, I], [−I, 0]]`.
    pub fn standard(n: usize) -> Self {
        Self(SymplecticFormMatrix::standard(n).w)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    /// `‖J² + I‖_F`
    pub fn square_residual(&self) -> f64 {
        let n = self.dim();
        (&self.0 * &self.0 + DMatrix::<f64>::identity(n, n)).norm()
    }

    /// `‖GJ + JᵀG‖_F / ‖GJ‖_F`
    pub fn antiselfadjoint_residual(&self, metric: &Metric) -> f64 {
        let gj = metric.matrix() * &self.0;
        crate::linalg::relative_residual(&(&gj + gj.transpose()), &gj)
    }

    /// Diagonal `D` when `J = [[0, D], [−D⁻¹, 0]]` with `D > 0` diagonal.
    fn block_scales(&self) -> Result<Vec<f64>> {
        let n = self.dim() / 2;
        let j = &self.0;
        let scale = j.norm().max(1.0);
        let mut d = Vec::with_capacity(n);
        for i in 0..n {
            let di = j[(i, n + i)];
            if !(di > 0.0) {
                return Err(SegalError::Unsupported(format!(
                    "complex unit block entry ({i}, {}) = {di} is not positive",
                    n + i
                )));
            }
            d.push(di);
        }
        let expected = block_off_diagonal(&d, &d.iter().map(|x| -1.0 / x).collect::<Vec<_>>());
        let off = (j - expected).norm() / scale;
        if off > DEFAULT_TOL {
            return Err(SegalError::Unsupported(format!(
                "complexification needs J = [[0, D], [-D^-1, 0]] with D diagonal (deviation {off:.3e})"
            )));
        }
        Ok(d)
    }
}

/// `J = G⁻¹ W`, so that `(x, J y)_G = ω²(x, y)`. The result need not satisfy `J² = −I`.
pub fn complex_unit_from(metric: &Metric, form: &SymplecticFormMatrix) -> Result<ComplexUnit> {
    if metric.dim() != form.dim() {
        return Err(SegalError::DimensionMismatch {
            expected: metric.dim(),
            found: form.dim(),
        });
    }
    if !(form.condition() <= MAX_FORM_CONDITION) {
        return Err(SegalError::DegenerateForm {
            condition: form.condition(),
        });
    }
    Ok(ComplexUnit(metric.solve(form.matrix())))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NaturallyComplexCheck {
    pub naturally_complex: bool,
    pub residual: f64,
}

pub fn is_naturally_complex(j: &ComplexUnit, tol: f64) -> NaturallyComplexCheck {
    let residual = j.square_residual();
    NaturallyComplexCheck {
        naturally_complex: residual <= tol,
        residual,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BracketKind {
    /// `ω²((e_i, 0), (e_j, 0))`
    PP,
    /// `ω²((0, e_i), (0, e_j))`
    QQ,
    /// `ω²((e_i, 0), (0, e_j))`
    QP,
}

/// The form evaluated on a pair of coordinate basis vectors.
pub fn poisson_bracket_canonical(
    form: &SymplecticFormMatrix,
    i: usize,
    j: usize,
    kind: BracketKind,
) -> Result<f64> {
    let n = form.dim() / 2;
    for index in [i, j] {
        if index >= n {
            return Err(SegalError::IndexOutOfRange { index, modes: n });
        }
    }
    let w = form.matrix();
    Ok(match kind {
        BracketKind::PP => w[(i, j)],
        BracketKind::QQ => w[(n + i, n + j)],
        BracketKind::QP => w[(i, n + j)],
    })
}

/// Complex coordinates `z = p_s − i q_s`, where `(p_s, q_s)` is the point in
/// the frame where `J` becomes `J_S` (the inverse of the canonical transform at
/// angle zero). Satisfies `complexify(Jx) = i · complexify(x)`.
pub fn complexify(j: &ComplexUnit, x: &PhaseSpacePoint) -> Result<DVector<Complex64>> {
    let n = j.dim() / 2;
    if x.dim() != n {
        return Err(SegalError::DimensionMismatch {
            expected: n,
            found: x.dim(),
        });
    }
    let check = is_naturally_complex(j, DEFAULT_TOL);
    if !check.naturally_complex {
        return Err(SegalError::NotNaturallyComplex {
            residual: check.residual,
        });
    }
    let d = j.block_scales()?;
    Ok(DVector::from_fn(n, |i, _| {
        let s = d[i].sqrt();
        Complex64::new(x.p[i] / s, -x.q[i] * s)
    }))
}

/// Inverse of [`complexify`].
pub fn decomplexify(j: &ComplexUnit, z: &DVector<Complex64>) -> Result<PhaseSpacePoint> {
    let n = j.dim() / 2;
    if z.len() != n {
        return Err(SegalError::DimensionMismatch {
            expected: n,
            found: z.len(),
        });
    }
    let d = j.block_scales()?;
    let p = DVector::from_fn(n, |i, _| z[i].re * d[i].sqrt());
    let q = DVector::from_fn(n, |i, _| -z[i].im / d[i].sqrt());
    PhaseSpacePoint::new(p, q)
}

/// `Σ μ_i |z_i|²`, the complex norm matching `‖x‖²_G` under [`complexify`].
pub fn weighted_complex_norm_sq(z: &DVector<Complex64>, weights: Option<&[f64]>) -> f64 {
    z.iter()
        .enumerate()
        .map(|(i, zi)| weights.map_or(1.0, |w| w[i]) * zi.norm_sqr())
        .sum()
}

/// `(x, y)_G + i ω²(x, y)`; complex-linear in the first argument.
pub fn complex_pairing(
    metric: &Metric,
    form: &SymplecticFormMatrix,
    x: &PhaseSpacePoint,
    y: &PhaseSpacePoint,
) -> Result<Complex64> {
    let n = metric.dim() / 2;
    for d in [x.dim(), y.dim(), form.dim() / 2] {
        if d != n {
            return Err(SegalError::DimensionMismatch {
                expected: n,
                found: d,
            });
        }
    }
    let (xs, ys) = (x.to_stacked(), y.to_stacked());
    Ok(Complex64::new(metric.inner(&xs, &ys), form.eval(&xs, &ys)))
}

/// Euclidean metric with the measure weights on both blocks: `diag(μ, μ)`.
pub fn standard_metric(weights: &[f64]) -> Metric {
    let g = block_diagonal(weights, weights);
    Metric::with_weights(g, weights.to_vec()).expect("positive weights give a positive metric")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn m2(a: f64, b: f64, c: f64, d: f64) -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[a, b, c, d])
    }

    #[test]
    fn complex_unit_examples() {
        let w = SymplecticFormMatrix::standard(1);

        let g = Metric::new(m2(0.5, 0.0, 0.0, 2.0)).unwrap();
        let j = complex_unit_from(&g, &w).unwrap();
        assert_abs_diff_eq!(j.matrix(), &m2(0.0, 2.0, -0.5, 0.0), epsilon = 1e-15);

        let g = Metric::new(DMatrix::identity(2, 2)).unwrap();
        let j = complex_unit_from(&g, &w).unwrap();
        assert_eq!(j.matrix(), &m2(0.0, 1.0, -1.0, 0.0));

        let g = Metric::new(m2(1.0, 0.0, 0.0, 4.0)).unwrap();
        let j = complex_unit_from(&g, &w).unwrap();
        assert_abs_diff_eq!(j.matrix(), &m2(0.0, 1.0, -0.25, 0.0), epsilon = 1e-15);
        let sq = j.matrix() * j.matrix();
        assert_abs_diff_eq!(sq, DMatrix::identity(2, 2) * -0.25, epsilon = 1e-15);
    }

    #[test]
    fn naturally_complex_examples() {
        let check = is_naturally_complex(&ComplexUnit(m2(0.0, 2.0, -0.5, 0.0)), 1e-10);
        assert!(check.naturally_complex);
        assert_eq!(check.residual, 0.0);

        let check = is_naturally_complex(&ComplexUnit(m2(0.0, 1.0, -0.25, 0.0)), 1e-10);
        assert!(!check.naturally_complex);
        let expected = (DMatrix::<f64>::identity(2, 2) * 0.75).norm();
        assert_abs_diff_eq!(check.residual, expected, epsilon = 1e-15);

        for n in 1..6 {
            assert!(is_naturally_complex(&ComplexUnit::standard(n), 0.0).naturally_complex);
        }
    }

    #[test]
    fn metric_errors() {
        assert!(matches!(
            Metric::new(m2(1.0, 0.0, 0.0, -1.0)),
            Err(SegalError::Metric(_))
        ));
        assert!(matches!(
            Metric::new(m2(1.0, 0.5, 0.0, 1.0)),
            Err(SegalError::Metric(_))
        ));
        let w = SymplecticFormMatrix::new(m2(0.0, 1.0, -1.0, 0.0)).unwrap();
        assert_abs_diff_eq!(w.condition(), 1.0, epsilon = 1e-14);
        assert!(matches!(
            SymplecticFormMatrix::new(DMatrix::zeros(2, 2)),
            Err(SegalError::DegenerateForm { .. })
        ));
        assert!(matches!(
            SymplecticFormMatrix::new(m2(0.0, 1.0, -1e-13, 0.0)),
            Err(SegalError::DegenerateForm { .. })
        ));
        assert!(SymplecticFormMatrix::new(m2(0.0, 1.0, 1.0, 0.0)).is_err());
    }

    #[test]
    fn canonical_brackets() {
        let w = SymplecticFormMatrix::standard(1);
        assert_eq!(poisson_bracket_canonical(&w, 0, 0, BracketKind::QP).unwrap(), 1.0);
        assert_eq!(poisson_bracket_canonical(&w, 0, 0, BracketKind::PP).unwrap(), 0.0);
        assert_eq!(poisson_bracket_canonical(&w, 0, 0, BracketKind::QQ).unwrap(), 0.0);
        let w = SymplecticFormMatrix::standard(2);
        assert_eq!(poisson_bracket_canonical(&w, 0, 1, BracketKind::QP).unwrap(), 0.0);
        assert_eq!(poisson_bracket_canonical(&w, 1, 1, BracketKind::QP).unwrap(), 1.0);
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(poisson_bracket_canonical(&w, i, j, BracketKind::PP).unwrap(), 0.0);
            }
        }
        assert_eq!(
            poisson_bracket_canonical(&w, 2, 0, BracketKind::QP).unwrap_err(),
            SegalError::IndexOutOfRange { index: 2, modes: 2 }
        );
    }

    #[test]
    fn complexify_standard_examples() {
        let j = ComplexUnit::standard(1);
        let z = complexify(&j, &PhaseSpacePoint::from_slices(&[1.0], &[0.0]).unwrap()).unwrap();
        assert_eq!(z[0], Complex64::new(1.0, 0.0));
        let z = complexify(&j, &PhaseSpacePoint::from_slices(&[0.0], &[1.0]).unwrap()).unwrap();
        assert_eq!(z[0], Complex64::new(0.0, -1.0));
    }

    #[test]
    fn complexify_rejects_non_complex_unit() {
        let j = ComplexUnit(m2(0.0, 1.0, -0.25, 0.0));
        let x = PhaseSpacePoint::from_slices(&[1.0], &[0.0]).unwrap();
        assert!(matches!(
            complexify(&j, &x),
            Err(SegalError::NotNaturallyComplex { .. })
        ));
        // naturally complex but not of the diagonal block family
        let j = ComplexUnit(m2(0.0, -1.0, 1.0, 0.0));
        assert!(matches!(complexify(&j, &x), Err(SegalError::Unsupported(_))));
    }

    #[test]
    fn pairing_examples() {
        let g = standard_metric(&[1.0]);
        let w = SymplecticFormMatrix::standard(1);
        let x = PhaseSpacePoint::from_slices(&[1.0], &[0.0]).unwrap();
        let y = PhaseSpacePoint::from_slices(&[0.0], &[1.0]).unwrap();
        assert_eq!(complex_pairing(&g, &w, &x, &y).unwrap(), Complex64::new(0.0, 1.0));
        let xx = complex_pairing(&g, &w, &x, &x).unwrap();
        assert_eq!(xx, Complex64::new(1.0, 0.0));
    }
}
