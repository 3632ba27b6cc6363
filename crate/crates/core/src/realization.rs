//! The unitary realization `(G, W, J, H)` of an oscillator system and the
//! canonical transforms `U(α)` from the standard space onto it.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, SegalError};
use crate::linalg::{block_diagonal, block_off_diagonal, relative_residual};
use crate::model::{build_generator, FrequencySpec, GeneratorMatrix};
use crate::symplectic::{ComplexUnit, Metric, SymplecticFormMatrix, DEFAULT_TOL};

/// Metric `diag(μΩ⁻¹, μΩ)`, form `μ dp∧dq`, unit `[[0, Ω], [−Ω⁻¹, 0]]` and
/// one-particle Hamiltonian `diag(Ω, Ω)` for a given spectrum.
#[derive(Debug, Clone)]
pub struct Realization {
    spec: FrequencySpec,
    metric: Metric,
    form: SymplecticFormMatrix,
    unit: ComplexUnit,
    hamiltonian: DMatrix<f64>,
    generator: GeneratorMatrix,
}

impl Realization {
    pub fn spec(&self) -> &FrequencySpec {
        &self.spec
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn form(&self) -> &SymplecticFormMatrix {
        &self.form
    }

    pub fn unit(&self) -> &ComplexUnit {
        &self.unit
    }

    pub fn hamiltonian(&self) -> &DMatrix<f64> {
        &self.hamiltonian
    }

    pub fn generator(&self) -> &GeneratorMatrix {
        &self.generator
    }

    /// `½ (x, Hx)_G`
    pub fn energy(&self, x: &DVector<f64>) -> f64 {
        0.5 * self.metric.inner(x, &(&self.hamiltonian * x))
    }
}

pub fn construct_unique_realization(spec: &FrequencySpec) -> Realization {
    let omegas = spec.frequencies();
    let weights = spec.weights();

    let g_top: Vec<f64> = omegas.iter().zip(weights).map(|(w, mu)| mu / w).collect();
    let g_bottom: Vec<f64> = omegas.iter().zip(weights).map(|(w, mu)| mu * w).collect();
    let metric = Metric::with_weights(block_diagonal(&g_top, &g_bottom), weights.to_vec())
        .expect("validated frequencies give a positive definite metric");

    let form = SymplecticFormMatrix::weighted(weights);

    let inv: Vec<f64> = omegas.iter().map(|w| -1.0 / w).collect();
    let unit = ComplexUnit::from_matrix(block_off_diagonal(omegas, &inv))
        .expect("block matrix is square");

    let hamiltonian = block_diagonal(omegas, omegas);

    Realization {
        spec: spec.clone(),
        metric,
        form,
        unit,
        hamiltonian,
        generator: build_generator(spec),
    }
}

/// `U(α) = [[Ω^{1/2} cos α, −Ω^{1/2} sin α], [Ω^{−1/2} sin α, Ω^{−1/2} cos α]]`,
/// mapping standard coordinates onto the realization.
#[derive(Debug, Clone)]
pub struct CanonicalTransform {
    pub alpha: f64,
    matrix: DMatrix<f64>,
}

impl CanonicalTransform {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// `U(α)⁻¹ = R(−α) · U(0)⁻¹`, assembled in closed form.
    pub fn inverse(&self) -> DMatrix<f64> {
        let n = self.matrix.nrows() / 2;
        let (s, c) = self.alpha.sin_cos();
        let mut inv = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            // entries of U are (a c, -a s; b s, b c) with a = Ω^{1/2}, b = Ω^{-1/2}
            let a = self.matrix[(i, i)].hypot(self.matrix[(i, n + i)]);
            let b = self.matrix[(n + i, i)].hypot(self.matrix[(n + i, n + i)]);
            inv[(i, i)] = c / a;
            inv[(i, n + i)] = s / b;
            inv[(n + i, i)] = -s / a;
            inv[(n + i, n + i)] = c / b;
        }
        inv
    }
}

pub fn canonical_transform(spec: &FrequencySpec, alpha: f64) -> CanonicalTransform {
    let n = spec.dim();
    let (s, c) = alpha.sin_cos();
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for (i, w) in spec.frequencies().iter().enumerate() {
        let up = w.sqrt();
        let down = 1.0 / up;
        m[(i, i)] = up * c;
        m[(i, n + i)] = -up * s;
        m[(n + i, i)] = down * s;
        m[(n + i, n + i)] = down * c;
    }
    CanonicalTransform { alpha, matrix: m }
}

/// Rotation `R(β) = [[cos β, −sin β], [sin β, cos β]]` of the standard space.
pub fn standard_rotation(n: usize, beta: f64) -> DMatrix<f64> {
    let (s, c) = beta.sin_cos();
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        m[(i, i)] = c;
        m[(i, n + i)] = -s;
        m[(n + i, i)] = s;
        m[(n + i, n + i)] = c;
    }
    m
}

/// `H = J A`, checked for symmetry and for `A x = −J H x` on random probes.
pub fn hamiltonian_from_generator(
    realization: &Realization,
    a: &GeneratorMatrix,
) -> Result<DMatrix<f64>> {
    let j = realization.unit().matrix();
    if a.dim() != j.nrows() {
        return Err(SegalError::DimensionMismatch {
            expected: j.nrows() / 2,
            found: a.dim() / 2,
        });
    }
    let h = j * a.matrix();
    let asym = relative_residual(&(&h - h.transpose()), &h);
    if asym > DEFAULT_TOL {
        return Err(SegalError::Inconsistent(format!(
            "J·A is not symmetric (relative residual {asym:.3e})"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let dim = a.dim();
    for _ in 0..8 {
        let x = DVector::from_fn(dim, |_, _| rng.gen_range(-1.0..1.0));
        let ax = a.matrix() * &x;
        let rebuilt = -(j * (&h * &x));
        let err = (&ax - &rebuilt).norm() / ax.norm().max(f64::MIN_POSITIVE);
        if err > DEFAULT_TOL {
            return Err(SegalError::Inconsistent(format!(
                "A x differs from -J H x by relative {err:.3e}"
            )));
        }
    }
    Ok(h)
}
