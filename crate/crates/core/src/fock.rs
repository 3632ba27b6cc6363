//! Truncated bosonic Fock space over the complexified one-particle space.
//!
//! States are occupation vectors with total occupation at most `N_max`,
//! ordered by total occupation and then lexicographically (ascending). In that
//! basis the ladder operators are real, `dΓ(H)` is diagonal and `Γ(U_t)` is a
//! diagonal phase.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Result, SegalError};
use crate::model::FrequencySpec;

/// Default ceiling for the dense ladder matrices, 1 GiB.
pub const DEFAULT_MEMORY_BUDGET: u128 = 1 << 30;

#[derive(Debug, Clone)]
pub struct FockBasis {
    modes: usize,
    cutoff: usize,
    states: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
}

impl FockBasis {
    pub fn new(modes: usize, cutoff: usize) -> Result<Self> {
        if modes == 0 {
            return Err(SegalError::InvalidInput("Fock space needs at least one mode".into()));
        }
        if cutoff == 0 {
            return Err(SegalError::InvalidInput("occupation cutoff must be at least 1".into()));
        }
        let mut states = Vec::new();
        for total in 0..=cutoff {
            let mut current = vec![0; modes];
            compositions(total, 0, &mut current, &mut states);
        }
        let index = states.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        Ok(Self {
            modes,
            cutoff,
            states,
            index,
        })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[Vec<usize>] {
        &self.states
    }

    pub fn index_of(&self, occupation: &[usize]) -> Option<usize> {
        self.index.get(occupation).copied()
    }

    pub fn total(&self, k: usize) -> usize {
        self.states[k].iter().sum()
    }

    /// Index of the single-particle state `e_i` for each mode `i`.
    pub fn one_particle_indices(&self) -> Vec<usize> {
        (0..self.modes)
            .map(|i| {
                let mut e = vec![0; self.modes];
                e[i] = 1;
                self.index[&e]
            })
            .collect()
    }
}

/// Appends all occupation vectors with the given total, slots from `pos` on,
/// in ascending lexicographic order.
fn compositions(remaining: usize, pos: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        out.push(current.clone());
        current[pos] = 0;
        return;
    }
    for k in 0..=remaining {
        current[pos] = k;
        compositions(remaining - k, pos + 1, current, out);
    }
    current[pos] = 0;
}

/// `C(modes + cutoff, modes)`, saturating.
pub fn fock_dimension(modes: usize, cutoff: usize) -> u128 {
    let k = modes.min(cutoff) as u128;
    let n = (modes + cutoff) as u128;
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

#[derive(Debug, Clone)]
pub struct LadderPair {
    pub a: DMatrix<f64>,
    pub adag: DMatrix<f64>,
}

#[derive(Debug, Clone)]
pub struct FockSpace {
    pub basis: FockBasis,
    pub ladders: Vec<LadderPair>,
}

pub fn build_fock(spec: &FrequencySpec, cutoff: usize) -> Result<FockSpace> {
    build_fock_with_budget(spec, cutoff, DEFAULT_MEMORY_BUDGET)
}

/// As [`build_fock`], failing up front when the `2n` dense ladder matrices
/// would exceed `budget_bytes`.
pub fn build_fock_with_budget(
    spec: &FrequencySpec,
    cutoff: usize,
    budget_bytes: u128,
) -> Result<FockSpace> {
    let modes = spec.dim();
    let dimension = fock_dimension(modes, cutoff);
    let needed = dimension
        .saturating_mul(dimension)
        .saturating_mul(16 * modes as u128);
    if needed > budget_bytes {
        return Err(SegalError::Resource {
            dimension,
            budget_bytes,
        });
    }
    let basis = FockBasis::new(modes, cutoff)?;
    let d = basis.len();
    let ladders = (0..modes)
        .map(|i| {
            let mut a = DMatrix::zeros(d, d);
            for (col, state) in basis.states().iter().enumerate() {
                if state[i] == 0 {
                    continue;
                }
                let mut lowered = state.clone();
                lowered[i] -= 1;
                let row = basis.index_of(&lowered).expect("lowered state lies below the cutoff");
                a[(row, col)] = (state[i] as f64).sqrt();
            }
            let adag = a.transpose();
            LadderPair { a, adag }
        })
        .collect();
    Ok(FockSpace { basis, ladders })
}

fn check_modes(spec: &FrequencySpec, basis: &FockBasis) -> Result<()> {
    if spec.dim() != basis.modes() {
        return Err(SegalError::DimensionMismatch {
            expected: basis.modes(),
            found: spec.dim(),
        });
    }
    Ok(())
}

/// `Σ nᵢωᵢ` for every basis state, in basis order.
pub fn second_quantized_spectrum(spec: &FrequencySpec, basis: &FockBasis) -> Result<Vec<f64>> {
    check_modes(spec, basis)?;
    let omegas = spec.frequencies();
    Ok(basis
        .states()
        .iter()
        .map(|s| s.iter().zip(omegas).map(|(&n, &w)| n as f64 * w).sum())
        .collect())
}

/// `dΓ(H)`; no zero-point offset, so the vacuum has energy 0.
pub fn second_quantized_hamiltonian(spec: &FrequencySpec, basis: &FockBasis) -> Result<DMatrix<f64>> {
    let energies = second_quantized_spectrum(spec, basis)?;
    Ok(DMatrix::from_diagonal(&energies.into()))
}

/// Diagonal of `Γ(U_t) = e^{−it dΓ(H)}`.
pub fn evolution_phases(spec: &FrequencySpec, basis: &FockBasis, t: f64) -> Result<Vec<Complex64>> {
    Ok(second_quantized_spectrum(spec, basis)?
        .into_iter()
        .map(|e| Complex64::from_polar(1.0, -e * t))
        .collect())
}

pub fn evolution_group(spec: &FrequencySpec, basis: &FockBasis, t: f64) -> Result<DMatrix<Complex64>> {
    let phases = evolution_phases(spec, basis, t)?;
    Ok(DMatrix::from_diagonal(&phases.into()))
}

/// Restriction of a Fock-space operator to the single-particle states.
pub fn one_particle_block(op: &DMatrix<Complex64>, basis: &FockBasis) -> DMatrix<Complex64> {
    let idx = basis.one_particle_indices();
    DMatrix::from_fn(idx.len(), idx.len(), |r, c| op[(idx[r], idx[c])])
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CcrDeviation {
    /// Largest `‖([a_i, adag_j] − δ_ij I) P‖_F`, `P` projecting below the top shell.
    pub below_top_shell: f64,
    /// Same quantity restricted to the top shell, where truncation breaks the relation.
    pub top_shell: f64,
}

pub fn ccr_deviation(space: &FockSpace) -> CcrDeviation {
    let basis = &space.basis;
    let d = basis.len();
    let top: Vec<bool> = (0..d).map(|k| basis.total(k) == basis.cutoff()).collect();
    let mut out = CcrDeviation {
        below_top_shell: 0.0,
        top_shell: 0.0,
    };
    for (i, li) in space.ladders.iter().enumerate() {
        for (j, lj) in space.ladders.iter().enumerate() {
            let mut c = &li.a * &lj.adag - &lj.adag * &li.a;
            if i == j {
                for k in 0..d {
                    c[(k, k)] -= 1.0;
                }
            }
            let (mut safe, mut edge) = (0.0, 0.0);
            for (col, &on_top) in c.column_iter().zip(&top) {
                let s = col.norm_squared();
                if on_top {
                    edge += s;
                } else {
                    safe += s;
                }
            }
            out.below_top_shell = out.below_top_shell.max(f64::sqrt(safe));
            out.top_shell = out.top_shell.max(f64::sqrt(edge));
        }
    }
    out
}
