//! The oscillator system: frequency spectrum, phase-space points, the
//! classical generator and the classical Hamiltonian.
//!
//! Coordinates are ordered `(p_1, …, p_n, q_1, …, q_n)`. A discrete frequency
//! of multiplicity `m` expands into `m` consecutive coordinates; quadrature
//! nodes of a continuous band follow the discrete part in increasing order.
//! Every coordinate carries a measure weight: 1 for discrete modes, the
//! quadrature weight for nodes.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SegalError};
use crate::quadrature::gauss_legendre;

/// Frequencies below this are rejected: `diag(Ω⁻¹, Ω)` is numerically singular there.
pub const MIN_FREQUENCY: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscreteMode {
    pub omega: f64,
    pub mult: usize,
}

/// Quadrature discretization of the absolutely continuous part of the spectral measure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Quadrature {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Quadrature {
    /// Gauss–Legendre rule with `count` nodes on `[a, b]`.
    pub fn gauss_legendre(a: f64, b: f64, count: usize) -> Result<Self> {
        let (nodes, weights) = gauss_legendre(a, b, count)?;
        Ok(Self { nodes, weights })
    }
}

/// Positive spectrum of a system of decoupled oscillators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpecDocument")]
pub struct FrequencySpec {
    discrete: Vec<DiscreteMode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    continuous: Option<Quadrature>,
    #[serde(skip)]
    omegas: Vec<f64>,
    #[serde(skip)]
    weights: Vec<f64>,
}

impl FrequencySpec {
    pub fn new(discrete: Vec<DiscreteMode>, continuous: Option<Quadrature>) -> Result<Self> {
        validate(&discrete, continuous.as_ref())?;
        let mut omegas = Vec::new();
        let mut weights = Vec::new();
        for mode in &discrete {
            omegas.extend(std::iter::repeat_n(mode.omega, mode.mult));
            weights.extend(std::iter::repeat_n(1.0, mode.mult));
        }
        if let Some(quad) = &continuous {
            let mut order: Vec<usize> = (0..quad.nodes.len()).collect();
            order.sort_by(|&a, &b| quad.nodes[a].total_cmp(&quad.nodes[b]));
            omegas.extend(order.iter().map(|&i| quad.nodes[i]));
            weights.extend(order.iter().map(|&i| quad.weights[i]));
        }
        if omegas.is_empty() {
            return Err(SegalError::InvalidSpec("spectrum is empty".into()));
        }
        Ok(Self {
            discrete,
            continuous,
            omegas,
            weights,
        })
    }

    /// Discrete spectrum from `(omega, multiplicity)` pairs.
    pub fn discrete(modes: &[(f64, usize)]) -> Result<Self> {
        Self::new(
            modes
                .iter()
                .map(|&(omega, mult)| DiscreteMode { omega, mult })
                .collect(),
            None,
        )
    }

    /// One simple mode per listed frequency. Equal entries are merged into
    /// a single mode with the corresponding multiplicity.
    pub fn from_frequencies(omegas: &[f64]) -> Result<Self> {
        let mut modes: Vec<(f64, usize)> = Vec::new();
        for &w in omegas {
            match modes.iter_mut().find(|(o, _)| *o == w) {
                Some(entry) => entry.1 += 1,
                None => modes.push((w, 1)),
            }
        }
        Self::discrete(&modes)
    }

    pub fn discrete_modes(&self) -> &[DiscreteMode] {
        &self.discrete
    }

    pub fn continuous(&self) -> Option<&Quadrature> {
        self.continuous.as_ref()
    }

    /// Number of oscillator coordinates `n` (phase space is `2n`-dimensional).
    pub fn dim(&self) -> usize {
        self.omegas.len()
    }

    /// Frequency attached to each coordinate.
    pub fn frequencies(&self) -> &[f64] {
        &self.omegas
    }

    /// Measure weight attached to each coordinate.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn is_weighted(&self) -> bool {
        self.weights.iter().any(|&w| w != 1.0)
    }

    /// Groups of coordinates sharing the same frequency, as `(omega, size)`
    /// in order of first appearance.
    pub fn multiplicity_blocks(&self) -> Vec<(f64, usize)> {
        let mut blocks: Vec<(f64, usize)> = Vec::new();
        for &w in &self.omegas {
            match blocks.iter_mut().find(|(o, _)| *o == w) {
                Some(b) => b.1 += 1,
                None => blocks.push((w, 1)),
            }
        }
        blocks
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(SegalError::DimensionMismatch {
                expected: self.dim(),
                found: len,
            });
        }
        Ok(())
    }
}

fn validate(discrete: &[DiscreteMode], continuous: Option<&Quadrature>) -> Result<()> {
    fn check_frequency(what: &str, w: f64) -> Result<()> {
        if !w.is_finite() || w <= 0.0 {
            return Err(SegalError::InvalidSpec(format!(
                "nonpositive frequency: {what} = {w}"
            )));
        }
        if w < MIN_FREQUENCY {
            return Err(SegalError::InvalidSpec(format!(
                "frequency {what} = {w} is below {MIN_FREQUENCY:e}"
            )));
        }
        Ok(())
    }

    for (i, mode) in discrete.iter().enumerate() {
        check_frequency("discrete omega", mode.omega)?;
        if mode.mult == 0 {
            return Err(SegalError::InvalidSpec(format!(
                "discrete mode {i} has zero multiplicity"
            )));
        }
        if discrete[..i].iter().any(|m| m.omega == mode.omega) {
            return Err(SegalError::InvalidSpec(format!(
                "discrete frequency {} listed twice; use the multiplicity field",
                mode.omega
            )));
        }
    }

    if let Some(quad) = continuous {
        if quad.nodes.len() != quad.weights.len() {
            return Err(SegalError::InvalidSpec(format!(
                "{} quadrature nodes but {} weights",
                quad.nodes.len(),
                quad.weights.len()
            )));
        }
        for &k in &quad.nodes {
            check_frequency("quadrature node", k)?;
        }
        if let Some(&w) = quad.weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(SegalError::InvalidSpec(format!(
                "quadrature weight {w} is not strictly positive"
            )));
        }
        let mut sorted = quad.nodes.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).any(|p| p[0] == p[1]) {
            return Err(SegalError::InvalidSpec(
                "quadrature nodes must be pairwise distinct".into(),
            ));
        }
    }
    Ok(())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecDocument {
    #[serde(default)]
    discrete: Vec<DiscreteMode>,
    #[serde(default)]
    continuous: Option<ContinuousDocument>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ContinuousDocument {
    Generated(GeneratedBand),
    Explicit(ExplicitBand),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GeneratedBand {
    interval: [f64; 2],
    nodes: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExplicitBand {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl TryFrom<SpecDocument> for FrequencySpec {
    type Error = SegalError;

    fn try_from(doc: SpecDocument) -> Result<Self> {
        let continuous = match doc.continuous {
            None => None,
            Some(ContinuousDocument::Generated(g)) => Some(Quadrature::gauss_legendre(
                g.interval[0],
                g.interval[1],
                g.nodes,
            )?),
            Some(ContinuousDocument::Explicit(e)) => Some(Quadrature {
                nodes: e.nodes,
                weights: e.weights,
            }),
        };
        FrequencySpec::new(doc.discrete, continuous)
    }
}

/// A point `(p, q)` of the `2n`-dimensional phase space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PointDocument", into = "PointDocument")]
pub struct PhaseSpacePoint {
    pub p: DVector<f64>,
    pub q: DVector<f64>,
}

impl PhaseSpacePoint {
    pub fn new(p: DVector<f64>, q: DVector<f64>) -> Result<Self> {
        if p.len() != q.len() {
            return Err(SegalError::DimensionMismatch {
                expected: p.len(),
                found: q.len(),
            });
        }
        Ok(Self { p, q })
    }

    pub fn from_slices(p: &[f64], q: &[f64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(p), DVector::from_column_slice(q))
    }

    /// Splits a stacked `(p; q)` vector of even length.
    pub fn from_stacked(x: &DVector<f64>) -> Result<Self> {
        if !x.len().is_multiple_of(2) {
            return Err(SegalError::InvalidInput(format!(
                "stacked phase-space vector has odd length {}",
                x.len()
            )));
        }
        let n = x.len() / 2;
        Ok(Self {
            p: x.rows(0, n).into_owned(),
            q: x.rows(n, n).into_owned(),
        })
    }

    pub fn to_stacked(&self) -> DVector<f64> {
        crate::linalg::concat(&self.p, &self.q)
    }

    pub fn dim(&self) -> usize {
        self.p.len()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PointDocument {
    p: Vec<f64>,
    q: Vec<f64>,
}

impl TryFrom<PointDocument> for PhaseSpacePoint {
    type Error = SegalError;
    fn try_from(doc: PointDocument) -> Result<Self> {
        PhaseSpacePoint::from_slices(&doc.p, &doc.q)
    }
}

impl From<PhaseSpacePoint> for PointDocument {
    fn from(x: PhaseSpacePoint) -> Self {
        PointDocument {
            p: x.p.iter().copied().collect(),
            q: x.q.iter().copied().collect(),
        }
    }
}

/// The linear vector field `A = [[0, −Ω²], [I, 0]]` of `ẋ = Ax`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorMatrix(DMatrix<f64>);

impl GeneratorMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    /// Wraps an arbitrary square matrix, for flows of non-oscillator generators.
    pub fn from_matrix(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(SegalError::InvalidInput(format!(
                "generator must be square, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(Self(m))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn apply(&self, x: &PhaseSpacePoint) -> Result<PhaseSpacePoint> {
        if 2 * x.dim() != self.dim() {
            return Err(SegalError::DimensionMismatch {
                expected: self.dim() / 2,
                found: x.dim(),
            });
        }
        PhaseSpacePoint::from_stacked(&(&self.0 * x.to_stacked()))
    }
}

/// Componentwise multiplication by the frequency of each coordinate.
pub fn omega_apply(spec: &FrequencySpec, v: &DVector<f64>) -> Result<DVector<f64>> {
    spec.check_len(v.len())?;
    Ok(DVector::from_iterator(
        v.len(),
        spec.frequencies().iter().zip(v.iter()).map(|(w, x)| w * x),
    ))
}

pub fn build_generator(spec: &FrequencySpec) -> GeneratorMatrix {
    let omega_sq: Vec<f64> = spec.frequencies().iter().map(|w| -w * w).collect();
    let ones = vec![1.0; spec.dim()];
    GeneratorMatrix(crate::linalg::block_off_diagonal(&omega_sq, &ones))
}

/// `½ (‖p‖² + ‖Ωq‖²)` in the spectral measure (unit weight on discrete modes).
pub fn classical_hamiltonian(spec: &FrequencySpec, x: &PhaseSpacePoint) -> Result<f64> {
    spec.check_len(x.dim())?;
    let sum: f64 = spec
        .frequencies()
        .iter()
        .zip(spec.weights())
        .zip(x.p.iter().zip(x.q.iter()))
        .map(|((w, mu), (p, q))| mu * (p * p + w * w * q * q))
        .sum();
    Ok(0.5 * sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_apply_examples() {
        let s = FrequencySpec::discrete(&[(2.0, 1)]).unwrap();
        assert_eq!(omega_apply(&s, &DVector::from_vec(vec![3.0])).unwrap()[0], 6.0);

        let s = FrequencySpec::discrete(&[(1.0, 2)]).unwrap();
        let v = omega_apply(&s, &DVector::from_vec(vec![1.0, 5.0])).unwrap();
        assert_eq!(v.as_slice(), &[1.0, 5.0]);

        let s = FrequencySpec::discrete(&[(1.0, 1), (2.0, 1)]).unwrap();
        let v = omega_apply(&s, &DVector::from_vec(vec![1.0, 1.0])).unwrap();
        assert_eq!(v.as_slice(), &[1.0, 2.0]);
    }

    #[test]
    fn omega_apply_rejects_wrong_length() {
        let s = FrequencySpec::discrete(&[(2.0, 1)]).unwrap();
        let err = omega_apply(&s, &DVector::from_vec(vec![1.0, 2.0])).unwrap_err();
        assert_eq!(err, SegalError::DimensionMismatch { expected: 1, found: 2 });
    }

    #[test]
    fn generator_examples() {
        let a = build_generator(&FrequencySpec::discrete(&[(2.0, 1)]).unwrap());
        assert_eq!(a.matrix(), &DMatrix::from_row_slice(2, 2, &[0.0, -4.0, 1.0, 0.0]));

        let a = build_generator(&FrequencySpec::discrete(&[(1.0, 1)]).unwrap());
        assert_eq!(a.matrix(), &DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]));

        let a = build_generator(&FrequencySpec::discrete(&[(1.0, 1), (3.0, 1)]).unwrap());
        let m = a.matrix();
        assert_eq!(m[(0, 2)], -1.0);
        assert_eq!(m[(1, 3)], -9.0);
        assert_eq!(m[(0, 3)], 0.0);
        assert_eq!(m[(2, 0)], 1.0);
        assert_eq!(m[(3, 1)], 1.0);
        assert_eq!(m.view((0, 0), (2, 2)).norm(), 0.0);
        assert_eq!(m.view((2, 2), (2, 2)).norm(), 0.0);
    }

    #[test]
    fn hamiltonian_examples() {
        let s = FrequencySpec::discrete(&[(2.0, 1)]).unwrap();
        let x = PhaseSpacePoint::from_slices(&[2.0], &[0.0]).unwrap();
        assert_eq!(classical_hamiltonian(&s, &x).unwrap(), 2.0);
        let x = PhaseSpacePoint::from_slices(&[0.0], &[1.0]).unwrap();
        assert_eq!(classical_hamiltonian(&s, &x).unwrap(), 2.0);

        let s = FrequencySpec::discrete(&[(1.0, 1), (2.0, 1)]).unwrap();
        let x = PhaseSpacePoint::from_slices(&[1.0, 1.0], &[1.0, 1.0]).unwrap();
        assert_eq!(classical_hamiltonian(&s, &x).unwrap(), 3.5);
    }

    #[test]
    fn multiplicities_expand_into_consecutive_coordinates() {
        let s = FrequencySpec::discrete(&[(3.0, 2), (1.0, 1)]).unwrap();
        assert_eq!(s.frequencies(), &[3.0, 3.0, 1.0]);
        assert_eq!(s.multiplicity_blocks(), vec![(3.0, 2), (1.0, 1)]);
        assert!(!s.is_weighted());
    }

    #[test]
    fn validation_errors() {
        let msg = FrequencySpec::discrete(&[(0.0, 1)]).unwrap_err().to_string();
        assert!(msg.contains("nonpositive frequency"), "{msg}");
        assert!(FrequencySpec::discrete(&[(-1.0, 1)]).is_err());
        assert!(FrequencySpec::discrete(&[(1e-9, 1)]).is_err());
        assert!(FrequencySpec::discrete(&[(1.0, 0)]).is_err());
        assert!(FrequencySpec::discrete(&[(1.0, 1), (1.0, 2)]).is_err());
        assert!(FrequencySpec::discrete(&[]).is_err());
        let dup = Quadrature {
            nodes: vec![1.0, 1.0],
            weights: vec![0.5, 0.5],
        };
        assert!(FrequencySpec::new(vec![], Some(dup)).is_err());
        let neg = Quadrature {
            nodes: vec![1.0, 2.0],
            weights: vec![0.5, -0.5],
        };
        assert!(FrequencySpec::new(vec![], Some(neg)).is_err());
    }

    #[test]
    fn json_documents() {
        let s: FrequencySpec =
            serde_json::from_str(r#"{"discrete": [{"omega": 2.0, "mult": 1}]}"#).unwrap();
        assert_eq!(s.frequencies(), &[2.0]);

        let s: FrequencySpec = serde_json::from_str(
            r#"{"discrete": [{"omega": 2.0, "mult": 2}], "continuous": {"interval": [1.0, 3.0], "nodes": 4}}"#,
        )
        .unwrap();
        assert_eq!(s.dim(), 6);
        assert!(s.is_weighted());
        let total: f64 = s.weights()[2..].iter().sum();
        assert!((total - 2.0).abs() < 1e-13);

        let s: FrequencySpec = serde_json::from_str(
            r#"{"continuous": {"nodes": [2.0, 1.0], "weights": [0.25, 0.75]}}"#,
        )
        .unwrap();
        assert_eq!(s.frequencies(), &[1.0, 2.0]);
        assert_eq!(s.weights(), &[0.75, 0.25]);

        let back: FrequencySpec = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);

        assert!(serde_json::from_str::<FrequencySpec>(r#"{"discrete": [], "extra": 1}"#).is_err());
        assert!(
            serde_json::from_str::<FrequencySpec>(r#"{"discrete": [{"omega": 0.0, "mult": 1}]}"#)
                .is_err()
        );
    }

    #[test]
    fn generator_apply_matches_definition() {
        let s = FrequencySpec::discrete(&[(1.5, 1), (0.5, 2)]).unwrap();
        let x = PhaseSpacePoint::from_slices(&[1.0, -2.0, 0.5], &[0.3, 0.7, -1.1]).unwrap();
        let ax = build_generator(&s).apply(&x).unwrap();
        let squared = FrequencySpec::discrete(&[(2.25, 1), (0.25, 2)]).unwrap();
        let sq = omega_apply(&squared, &x.q).unwrap();
        assert_eq!(ax.p, -sq);
        assert_eq!(ax.q, x.p);
    }
}
