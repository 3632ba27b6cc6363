//! The oscillator flow `φ_t = e^{At}`: closed form, matrix-exponential
//! oracle, trajectories with invariant monitoring, the complex picture, and
//! the boundedness conditions for weighted state spaces.

mod expm;

pub use expm::expm;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Result, SegalError};
use crate::model::{classical_hamiltonian, FrequencySpec, GeneratorMatrix, PhaseSpacePoint};
use crate::realization::{canonical_transform, Realization};

/// Propagator at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowOperator {
    pub t: f64,
    matrix: DMatrix<f64>,
}

impl FlowOperator {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn apply(&self, x: &PhaseSpacePoint) -> Result<PhaseSpacePoint> {
        if 2 * x.dim() != self.matrix.nrows() {
            return Err(SegalError::DimensionMismatch {
                expected: self.matrix.nrows() / 2,
                found: x.dim(),
            });
        }
        PhaseSpacePoint::from_stacked(&(&self.matrix * x.to_stacked()))
    }

    /// `φ_s ∘ φ_t`
    pub fn then(&self, other: &FlowOperator) -> FlowOperator {
        FlowOperator {
            t: self.t + other.t,
            matrix: &other.matrix * &self.matrix,
        }
    }
}

/// `sin(ωt)/ω`, with a series branch where `ωt` is small.
pub fn sin_over_frequency(omega: f64, t: f64) -> f64 {
    let x = omega * t;
    if x.abs() < 1e-4 {
        let x2 = x * x;
        t * (1.0 - x2 / 6.0 * (1.0 - x2 / 20.0))
    } else {
        x.sin() / omega
    }
}

/// Per-frequency blocks `[[cos ωt, −ω sin ωt], [sin(ωt)/ω, cos ωt]]`.
pub fn flow_closed_form(spec: &FrequencySpec, t: f64) -> FlowOperator {
    let n = spec.dim();
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for (i, &w) in spec.frequencies().iter().enumerate() {
        let (s, c) = (w * t).sin_cos();
        m[(i, i)] = c;
        m[(i, n + i)] = -w * s;
        m[(n + i, i)] = sin_over_frequency(w, t);
        m[(n + i, n + i)] = c;
    }
    FlowOperator { t, matrix: m }
}

/// `e^{At}` by scaling and squaring, balanced by the diagonal similarity
/// that makes each oscillator block normal when `A` has the oscillator shape.
pub fn flow_expm(a: &GeneratorMatrix, t: f64) -> Result<FlowOperator> {
    if !t.is_finite() {
        return Err(SegalError::Range(format!("time {t} is not finite")));
    }
    let am = a.matrix() * t;
    let d = balancing_scales(&am);
    let balanced = DMatrix::from_fn(am.nrows(), am.ncols(), |i, j| am[(i, j)] * d[j] / d[i]);
    let e = expm(&balanced)?;
    let matrix = DMatrix::from_fn(e.nrows(), e.ncols(), |i, j| e[(i, j)] * d[i] / d[j]);
    Ok(FlowOperator { t, matrix })
}

/// Power-of-two diagonal scaling (Parlett–Reinsch) reducing row/column norm imbalance.
fn balancing_scales(a: &DMatrix<f64>) -> Vec<f64> {
    let n = a.nrows();
    let mut d = vec![1.0f64; n];
    let mut converged = false;
    let mut sweeps = 0;
    while !converged && sweeps < 64 {
        converged = true;
        sweeps += 1;
        for i in 0..n {
            let mut col = 0.0;
            let mut row = 0.0;
            for j in 0..n {
                if j != i {
                    col += (a[(j, i)] * d[i] / d[j]).abs();
                    row += (a[(i, j)] * d[j] / d[i]).abs();
                }
            }
            if col == 0.0 || row == 0.0 {
                continue;
            }
            let total = col + row;
            let mut f = 1.0;
            let (mut c, mut r) = (col, row);
            while c < r / 2.0 {
                c *= 2.0;
                r /= 2.0;
                f *= 2.0;
            }
            while c >= r * 2.0 {
                c /= 2.0;
                r *= 2.0;
                f /= 2.0;
            }
            if (c + r) < 0.95 * total {
                d[i] *= f;
                converged = false;
            }
        }
    }
    d
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InvariantSample {
    pub t: f64,
    /// `|‖x(t)‖_G − ‖x₀‖_G| / max(1, ‖x₀‖_G)`
    pub norm_drift: f64,
    /// `|ω²(x(t), y(t)) − ω²(x₀, y₀)| / max(1, ‖x₀‖_G ‖y₀‖_G)`
    pub symplectic_drift: f64,
    /// `|𝐊(x(t)) − 𝐊(x₀)| / max(1, 𝐊(x₀))`
    pub energy_drift: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct InvariantLog {
    pub samples: Vec<InvariantSample>,
}

impl InvariantLog {
    fn max_of(&self, f: impl Fn(&InvariantSample) -> f64) -> f64 {
        self.samples.iter().map(f).fold(0.0, f64::max)
    }

    pub fn max_norm_drift(&self) -> f64 {
        self.max_of(|s| s.norm_drift)
    }

    pub fn max_symplectic_drift(&self) -> f64 {
        self.max_of(|s| s.symplectic_drift)
    }

    pub fn max_energy_drift(&self) -> f64 {
        self.max_of(|s| s.energy_drift)
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<PhaseSpacePoint>,
    pub log: InvariantLog,
}

/// Evolves `x0` over `t_grid`, probing symplecticity with `y0 = J x0`.
pub fn evolve(
    realization: &Realization,
    x0: &PhaseSpacePoint,
    t_grid: &[f64],
) -> Result<Trajectory> {
    if 2 * x0.dim() != realization.unit().dim() {
        return Err(SegalError::DimensionMismatch {
            expected: realization.spec().dim(),
            found: x0.dim(),
        });
    }
    let probe = PhaseSpacePoint::from_stacked(&(realization.unit().matrix() * x0.to_stacked()))?;
    evolve_with_probe(realization, x0, &probe, t_grid)
}

pub fn evolve_with_probe(
    realization: &Realization,
    x0: &PhaseSpacePoint,
    y0: &PhaseSpacePoint,
    t_grid: &[f64],
) -> Result<Trajectory> {
    let spec = realization.spec();
    for d in [x0.dim(), y0.dim()] {
        if d != spec.dim() {
            return Err(SegalError::DimensionMismatch {
                expected: spec.dim(),
                found: d,
            });
        }
    }
    let metric = realization.metric();
    let form = realization.form();
    let (xs0, ys0) = (x0.to_stacked(), y0.to_stacked());
    let norm0 = metric.norm(&xs0);
    let pair0 = form.eval(&xs0, &ys0);
    let pair_scale = (norm0 * metric.norm(&ys0)).max(1.0);
    let energy0 = classical_hamiltonian(spec, x0)?;

    let rows: Vec<(PhaseSpacePoint, InvariantSample)> = t_grid
        .par_iter()
        .map(|&t| {
            let phi = flow_closed_form(spec, t);
            let xt = &phi.matrix * &xs0;
            let yt = &phi.matrix * &ys0;
            let point = PhaseSpacePoint::from_stacked(&xt)?;
            let sample = InvariantSample {
                t,
                norm_drift: (metric.norm(&xt) - norm0).abs() / norm0.max(1.0),
                symplectic_drift: (form.eval(&xt, &yt) - pair0).abs() / pair_scale,
                energy_drift: (classical_hamiltonian(spec, &point)? - energy0).abs()
                    / energy0.max(1.0),
            };
            Ok((point, sample))
        })
        .collect::<Result<_>>()?;

    let (states, samples) = rows.into_iter().unzip();
    Ok(Trajectory {
        times: t_grid.to_vec(),
        states,
        log: InvariantLog { samples },
    })
}

/// Standard-frame complex coordinates `z = p − i q` of a point.
pub fn standard_complex_coordinates(x: &PhaseSpacePoint) -> DVector<Complex64> {
    DVector::from_fn(x.dim(), |i, _| Complex64::new(x.p[i], -x.q[i]))
}

/// Maps `x0` to the standard frame with `U(0)⁻¹`, complexifies and applies
/// `e^{−iωt}` to each coordinate.
pub fn complex_evolution(
    realization: &Realization,
    x0: &PhaseSpacePoint,
    t: f64,
) -> Result<DVector<Complex64>> {
    let spec = realization.spec();
    if x0.dim() != spec.dim() {
        return Err(SegalError::DimensionMismatch {
            expected: spec.dim(),
            found: x0.dim(),
        });
    }
    let u0 = canonical_transform(spec, 0.0);
    let standard = PhaseSpacePoint::from_stacked(&(u0.inverse() * x0.to_stacked()))?;
    let z0 = standard_complex_coordinates(&standard);
    Ok(DVector::from_fn(z0.len(), |i, _| {
        z0[i] * Complex64::from_polar(1.0, -spec.frequencies()[i] * t)
    }))
}

/// Positive function on the spectral grid: explicit samples or `Ω^exponent`.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightFunction {
    Samples(Vec<f64>),
    OmegaPower(f64),
}

impl WeightFunction {
    pub fn evaluate(&self, nodes: &[f64]) -> Result<Vec<f64>> {
        let values = match self {
            WeightFunction::Samples(v) => {
                if v.len() != nodes.len() {
                    return Err(SegalError::DimensionMismatch {
                        expected: nodes.len(),
                        found: v.len(),
                    });
                }
                v.clone()
            }
            WeightFunction::OmegaPower(e) => nodes.iter().map(|k| k.powf(*e)).collect(),
        };
        if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(SegalError::InvalidInput(format!(
                "weight function must be positive on every node, found {bad}"
            )));
        }
        Ok(values)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowDomainCheck {
    /// `sup |k sin(kt) ρ/σ|`
    pub sup1: f64,
    pub sup1_node: f64,
    pub sup1_t: f64,
    /// `sup |sin(kt)/k · σ/ρ|`
    pub sup2: f64,
    pub sup2_node: f64,
    pub sup2_t: f64,
    pub grid: Vec<f64>,
}

/// Sups over `nodes × t_grid` of the two multipliers that must stay bounded
/// for the flow to map `M_ρ × M_σ` into itself.
pub fn check_flow_domain(
    rho: &WeightFunction,
    sigma: &WeightFunction,
    spec: &FrequencySpec,
    t_grid: &[f64],
) -> Result<FlowDomainCheck> {
    if t_grid.is_empty() {
        return Err(SegalError::InvalidInput("empty time grid".into()));
    }
    let nodes = spec.frequencies();
    let rho_v = rho.evaluate(nodes)?;
    let sigma_v = sigma.evaluate(nodes)?;

    let mut check = FlowDomainCheck {
        sup1: 0.0,
        sup1_node: nodes[0],
        sup1_t: t_grid[0],
        sup2: 0.0,
        sup2_node: nodes[0],
        sup2_t: t_grid[0],
        grid: nodes.to_vec(),
    };
    for (i, &k) in nodes.iter().enumerate() {
        let ratio = rho_v[i] / sigma_v[i];
        for &t in t_grid {
            let m1 = (k * (k * t).sin() * ratio).abs();
            let m2 = (sin_over_frequency(k, t) / ratio).abs();
            if m1 > check.sup1 {
                (check.sup1, check.sup1_node, check.sup1_t) = (m1, k, t);
            }
            if m2 > check.sup2 {
                (check.sup2, check.sup2_node, check.sup2_t) = (m2, k, t);
            }
        }
    }
    Ok(check)
}
