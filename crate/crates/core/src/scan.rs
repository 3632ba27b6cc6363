//! Independent re-derivation of the realization by solving its constraint
//! system numerically.
//!
//! The metric is searched in the linear space of symmetric `S` with
//! `SA + AᵀS = 0` (the flow is antisymmetric, hence unitary, in that metric).
//! The form is pinned to `dp ∧ dq` by the canonical brackets, which fixes
//! `J = G⁻¹W`; the remaining condition `J² = −I` is solved by multi-start
//! Levenberg–Marquardt over the positive-definite part of the space. Converged
//! points are clustered, and a single cluster is the numerical statement of
//! uniqueness.

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Result, SegalError};
use crate::linalg::{
    antisymmetric_part_residual, commutator, condition_number, min_eigenvalue, relative_residual,
    symmetric_part_residual,
};
use crate::model::{build_generator, FrequencySpec, GeneratorMatrix};
use crate::realization::Realization;
use crate::symplectic::{SymplecticFormMatrix, MAX_FORM_CONDITION};

/// Orthonormal (Frobenius) basis of `{S = Sᵀ : SA + AᵀS = 0}`.
#[derive(Debug, Clone)]
pub struct MetricConstraintSpace {
    pub basis: Vec<DMatrix<f64>>,
}

impl MetricConstraintSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn combine(&self, coeffs: &[f64]) -> DMatrix<f64> {
        let n = self.basis[0].nrows();
        let mut g = DMatrix::zeros(n, n);
        for (b, c) in self.basis.iter().zip(coeffs) {
            g += b * *c;
        }
        g
    }

    /// Frobenius projection coefficients of `m` onto the basis.
    pub fn project(&self, m: &DMatrix<f64>) -> Vec<f64> {
        self.basis.iter().map(|b| b.dot(m)).collect()
    }
}

/// Symmetric unit matrices `E_ii` and `(E_ij + E_ji)/√2`, orthonormal under the Frobenius product.
fn symmetric_unit_basis(dim: usize) -> Vec<DMatrix<f64>> {
    let mut out = Vec::with_capacity(dim * (dim + 1) / 2);
    for i in 0..dim {
        for j in i..dim {
            let mut e = DMatrix::zeros(dim, dim);
            if i == j {
                e[(i, i)] = 1.0;
            } else {
                e[(i, j)] = std::f64::consts::FRAC_1_SQRT_2;
                e[(j, i)] = std::f64::consts::FRAC_1_SQRT_2;
            }
            out.push(e);
        }
    }
    out
}

/// Nullspace of `S ↦ SA + AᵀS` on symmetric matrices; singular values at or
/// below `rel_tol · σ_max` count as zero.
pub fn solve_metric_constraint_with_tol(
    a: &GeneratorMatrix,
    rel_tol: f64,
) -> Result<MetricConstraintSpace> {
    let dim = a.dim();
    let am = a.matrix();
    let units = symmetric_unit_basis(dim);
    let mut map = DMatrix::zeros(dim * dim, units.len());
    for (k, e) in units.iter().enumerate() {
        let image = e * am + am.transpose() * e;
        map.column_mut(k).copy_from_slice(image.as_slice());
    }

    // the map is tall (dim² rows), so Vᵀ holds every right singular vector
    let svd = map.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let max_sv = svd.singular_values.max().max(0.0);
    let threshold = rel_tol * max_sv;

    let mut basis = Vec::new();
    for (idx, &sv) in svd.singular_values.iter().enumerate() {
        if sv <= threshold {
            let v = v_t.row(idx);
            let mut s = DMatrix::zeros(dim, dim);
            for (k, e) in units.iter().enumerate() {
                s += e * v[k];
            }
            basis.push(s);
        }
    }
    if basis.is_empty() {
        return Err(SegalError::EmptySolutionSpace);
    }
    Ok(MetricConstraintSpace { basis })
}

pub fn solve_metric_constraint(a: &GeneratorMatrix) -> Result<MetricConstraintSpace> {
    solve_metric_constraint_with_tol(a, ScanTolerances::default().linear)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanTolerances {
    /// Relative singular-value cutoff for the linear constraint space.
    pub linear: f64,
    /// Bound on `‖J² + I‖_F` for a start to count as converged.
    pub nonlinear: f64,
}

impl Default for ScanTolerances {
    fn default() -> Self {
        Self {
            linear: 1e-9,
            nonlinear: 1e-10,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ConstraintProblem {
    pub generator: GeneratorMatrix,
    pub ccr_target: SymplecticFormMatrix,
    pub tolerances: ScanTolerances,
    pub restarts: usize,
    pub seed: u64,
    pub cluster_radius: f64,
}

impl ConstraintProblem {
    /// Problem for `spec` with 64 restarts, seed 0 and clustering radius 1e-6.
    pub fn for_spec(spec: &FrequencySpec) -> Self {
        Self {
            generator: build_generator(spec),
            ccr_target: SymplecticFormMatrix::weighted(spec.weights()),
            tolerances: ScanTolerances::default(),
            restarts: 64,
            seed: 0,
            cluster_radius: 1e-6,
        }
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_cluster_radius(mut self, radius: f64) -> Self {
        self.cluster_radius = radius;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(SegalError::InvalidInput("restarts must be at least 1".into()));
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("linear tolerance", t.linear),
            ("nonlinear tolerance", t.nonlinear),
            ("cluster radius", self.cluster_radius),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(SegalError::InvalidInput(format!("{name} must be positive, got {v}")));
            }
        }
        if self.generator.dim() != self.ccr_target.dim() {
            return Err(SegalError::DimensionMismatch {
                expected: self.generator.dim() / 2,
                found: self.ccr_target.dim() / 2,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AxiomEntry {
    pub name: &'static str,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AxiomReport {
    pub entries: Vec<AxiomEntry>,
}

impl AxiomReport {
    pub fn pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn get(&self, name: &str) -> Option<&AxiomEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    /// Largest residual among the upper-bounded entries.
    pub fn max_residual(&self) -> f64 {
        self.entries
            .iter()
            .filter(|e| !matches!(e.name, "g_min_eigenvalue" | "w_condition"))
            .map(|e| e.residual)
            .fold(0.0, f64::max)
    }
}

/// Residuals of every structural condition on `(G, W, A)`, with `J = G⁻¹W`
/// and `H = JA`. Relative residuals are normalized by the Frobenius norm of
/// the reference matrix; `j_square` is absolute.
pub fn verify_axioms(
    g: &DMatrix<f64>,
    w: &DMatrix<f64>,
    a: &GeneratorMatrix,
    ccr_target: &SymplecticFormMatrix,
    tol: f64,
) -> Result<AxiomReport> {
    let dim = g.nrows();
    for (what, m) in [("G", g), ("W", w), ("A", a.matrix()), ("ccr target", ccr_target.matrix())] {
        if m.nrows() != dim || m.ncols() != dim {
            return Err(SegalError::InvalidInput(format!(
                "{what} is {}x{}, expected {dim}x{dim}",
                m.nrows(),
                m.ncols()
            )));
        }
    }
    let am = a.matrix();
    let upper = |name, residual: f64| AxiomEntry {
        name,
        residual,
        tolerance: tol,
        pass: residual <= tol,
    };

    let mut entries = Vec::with_capacity(9);
    entries.push(upper("g_symmetry", symmetric_part_residual(g)));
    let min_ev = min_eigenvalue(g);
    entries.push(AxiomEntry {
        name: "g_min_eigenvalue",
        residual: min_ev,
        tolerance: 0.0,
        pass: min_ev > 0.0,
    });
    let ga = g * am;
    entries.push(upper(
        "a_antisymmetry",
        relative_residual(&(&ga + am.transpose() * g), &ga),
    ));
    entries.push(upper("w_antisymmetry", antisymmetric_part_residual(w)));
    let cond = condition_number(w);
    entries.push(AxiomEntry {
        name: "w_condition",
        residual: cond,
        tolerance: MAX_FORM_CONDITION,
        pass: cond <= MAX_FORM_CONDITION,
    });
    entries.push(upper(
        "ccr",
        relative_residual(&(w - ccr_target.matrix()), ccr_target.matrix()),
    ));

    let j = g.clone().lu().solve(w);
    match j {
        Some(j) if j.iter().all(|x| x.is_finite()) => {
            let id = DMatrix::<f64>::identity(dim, dim);
            entries.push(upper("j_square", (&j * &j + &id).norm()));
            entries.push(upper("gj_minus_w", relative_residual(&(g * &j - w), w)));
            let h = &j * am;
            let scale = j.norm() * h.norm();
            let comm = commutator(&j, &h).norm();
            entries.push(upper(
                "j_h_commutator",
                if scale > 0.0 { comm / scale } else { comm },
            ));
        }
        _ => {
            for name in ["j_square", "gj_minus_w", "j_h_commutator"] {
                entries.push(upper(name, f64::INFINITY));
            }
        }
    }
    Ok(AxiomReport { entries })
}

/// One cluster of converged starts.
#[derive(Debug, Clone, Serialize)]
pub struct ScanSolution {
    #[serde(serialize_with = "serialize_rows")]
    pub metric: DMatrix<f64>,
    #[serde(serialize_with = "serialize_rows")]
    pub unit: DMatrix<f64>,
    /// `‖J² + I‖_F` of the representative.
    pub residual: f64,
    /// Converged starts that landed in this cluster.
    pub hits: usize,
    /// Largest Frobenius distance of a member from the representative.
    pub spread: f64,
    pub axioms: AxiomReport,
}

impl ScanSolution {
    /// `max(‖ΔG‖_F, ‖ΔJ‖_F)` against a realization.
    pub fn distance_to(&self, realization: &Realization) -> f64 {
        let dg = (&self.metric - realization.metric().matrix()).norm();
        let dj = (&self.unit - realization.unit().matrix()).norm();
        dg.max(dj)
    }
}

fn serialize_rows<S: serde::Serializer>(m: &DMatrix<f64>, s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(crate::linalg::to_rows(m))
}

#[derive(Debug, Clone, Serialize)]
pub struct SolutionSet {
    pub solutions: Vec<ScanSolution>,
    pub cluster_radius: f64,
    pub constraint_dim: usize,
    pub restarts: usize,
    pub converged: usize,
}

impl SolutionSet {
    pub fn is_unique(&self) -> bool {
        self.solutions.len() == 1
    }
}

#[derive(Debug, Clone)]
struct StartOutcome {
    coeffs: Vec<f64>,
    residual: f64,
}

const MAX_ITERATIONS: usize = 500;
const MAX_DAMPING: f64 = 1e14;
const MAX_START_ATTEMPTS: usize = 1000;

pub fn uniqueness_scan(problem: &ConstraintProblem) -> Result<SolutionSet> {
    problem.validate()?;
    let space = solve_metric_constraint_with_tol(&problem.generator, problem.tolerances.linear)?;
    let w = problem.ccr_target.matrix();

    let mut rng = ChaCha8Rng::seed_from_u64(problem.seed);
    let starts: Vec<Vec<f64>> = (0..problem.restarts)
        .map(|_| random_start(&space, &mut rng))
        .collect::<Result<_>>()?;

    let outcomes: Vec<StartOutcome> = starts
        .into_par_iter()
        .map(|c| levenberg_marquardt(&space, w, c))
        .collect();

    let converged: Vec<&StartOutcome> = outcomes
        .iter()
        .filter(|o| o.residual <= problem.tolerances.nonlinear)
        .collect();
    if converged.is_empty() {
        let best = outcomes.iter().map(|o| o.residual).fold(f64::INFINITY, f64::min);
        return Err(SegalError::ScanFailure(format!(
            "none of {} starts reached ||J^2 + I||_F <= {:.1e}; best residual {best:.3e}",
            problem.restarts, problem.tolerances.nonlinear
        )));
    }

    let clusters = cluster(&space, &converged, problem.cluster_radius);
    let solutions = clusters
        .into_iter()
        .map(|c| {
            let g = space.combine(&c.representative.coeffs);
            let unit = Cholesky::new(g.clone())
                .expect("converged iterates are positive definite")
                .solve(w);
            let axioms = verify_axioms(
                &g,
                w,
                &problem.generator,
                &problem.ccr_target,
                problem.tolerances.nonlinear,
            )?;
            Ok(ScanSolution {
                metric: g,
                unit,
                residual: c.representative.residual,
                hits: c.hits,
                spread: c.spread,
                axioms,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(SolutionSet {
        solutions,
        cluster_radius: problem.cluster_radius,
        constraint_dim: space.dim(),
        restarts: problem.restarts,
        converged: converged.len(),
    })
}

/// Projection of a random SPD matrix (log-uniform spectrum, random
/// orientation), resampled until the projection is positive definite.
fn random_start(space: &MetricConstraintSpace, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    let dim = space.basis[0].nrows();
    for _ in 0..MAX_START_ATTEMPTS {
        let raw = DMatrix::from_fn(dim, dim, |_, _| rng.gen_range(-1.0..1.0));
        let q = raw.qr().q();
        let spectrum = DVector::from_fn(dim, |_, _| rng.gen_range((0.05f64).ln()..(20.0f64).ln()).exp());
        let r = &q * DMatrix::from_diagonal(&spectrum) * q.transpose();
        let coeffs = space.project(&r);
        if Cholesky::new(space.combine(&coeffs)).is_some() {
            return Ok(coeffs);
        }
    }
    Err(SegalError::ScanFailure(format!(
        "no positive-definite start found in {MAX_START_ATTEMPTS} draws"
    )))
}

struct Evaluation {
    residual: DVector<f64>,
    jacobian: DMatrix<f64>,
}

/// `vec(J² + I)` and its derivative in the coefficients, or `None` when `G`
/// is not positive definite.
fn evaluate(space: &MetricConstraintSpace, w: &DMatrix<f64>, coeffs: &[f64]) -> Option<Evaluation> {
    let g = space.combine(coeffs);
    let chol = Cholesky::new(g)?;
    let j = chol.solve(w);
    let dim = j.nrows();
    let mut r = &j * &j;
    for i in 0..dim {
        r[(i, i)] += 1.0;
    }
    let residual = DVector::from_column_slice(r.as_slice());

    let mut jacobian = DMatrix::zeros(dim * dim, coeffs.len());
    for (k, b) in space.basis.iter().enumerate() {
        let dj = -chol.solve(&(b * &j));
        let dr = &dj * &j + &j * &dj;
        jacobian.column_mut(k).copy_from_slice(dr.as_slice());
    }
    Some(Evaluation { residual, jacobian })
}

fn residual_norm(space: &MetricConstraintSpace, w: &DMatrix<f64>, coeffs: &[f64]) -> Option<f64> {
    let g = space.combine(coeffs);
    let chol = Cholesky::new(g)?;
    let j = chol.solve(w);
    let dim = j.nrows();
    let mut r = &j * &j;
    for i in 0..dim {
        r[(i, i)] += 1.0;
    }
    Some(r.norm())
}

/// Damped Gauss–Newton on `‖J² + I‖²`; steps leaving the positive-definite
/// cone are rejected and the damping raised.
fn levenberg_marquardt(
    space: &MetricConstraintSpace,
    w: &DMatrix<f64>,
    mut coeffs: Vec<f64>,
) -> StartOutcome {
    let Some(mut eval) = evaluate(space, w, &coeffs) else {
        return StartOutcome {
            coeffs,
            residual: f64::INFINITY,
        };
    };
    let mut norm = eval.residual.norm();
    let mut damping = 1e-3;

    for _ in 0..MAX_ITERATIONS {
        if norm == 0.0 || damping > MAX_DAMPING {
            break;
        }
        let jt = eval.jacobian.transpose();
        let jtj = &jt * &eval.jacobian;
        let grad = &jt * &eval.residual;
        let mut lhs = jtj.clone();
        for i in 0..lhs.nrows() {
            lhs[(i, i)] += damping * jtj[(i, i)].max(1e-12);
        }
        let step = match lhs.cholesky() {
            Some(c) => -c.solve(&grad),
            None => {
                damping *= 4.0;
                continue;
            }
        };
        let trial: Vec<f64> = coeffs.iter().zip(step.iter()).map(|(c, s)| c + s).collect();
        match residual_norm(space, w, &trial) {
            Some(trial_norm) if trial_norm < norm => {
                coeffs = trial;
                norm = trial_norm;
                eval = evaluate(space, w, &coeffs).expect("accepted iterate is positive definite");
                damping = (damping / 3.0).max(1e-15);
            }
            _ => damping *= 4.0,
        }
    }
    StartOutcome {
        coeffs,
        residual: norm,
    }
}

struct Cluster<'a> {
    representative: &'a StartOutcome,
    members: Vec<DMatrix<f64>>,
    hits: usize,
    spread: f64,
}

/// Greedy clustering by Frobenius distance of the metrics, followed by
/// merging of clusters whose representatives lie within ten radii.
fn cluster<'a>(
    space: &MetricConstraintSpace,
    points: &[&'a StartOutcome],
    radius: f64,
) -> Vec<Cluster<'a>> {
    let mut clusters: Vec<Cluster<'a>> = Vec::new();
    for &p in points {
        let g = space.combine(&p.coeffs);
        let home = clusters
            .iter_mut()
            .find(|c| (space.combine(&c.representative.coeffs) - &g).norm() <= radius);
        match home {
            Some(c) => {
                c.hits += 1;
                if p.residual < c.representative.residual {
                    c.representative = p;
                }
                c.members.push(g);
            }
            None => clusters.push(Cluster {
                representative: p,
                members: vec![g],
                hits: 1,
                spread: 0.0,
            }),
        }
    }

    let mut merged: Vec<Cluster<'a>> = Vec::new();
    for c in clusters {
        let g = space.combine(&c.representative.coeffs);
        match merged
            .iter_mut()
            .find(|m| (space.combine(&m.representative.coeffs) - &g).norm() <= 10.0 * radius)
        {
            Some(m) => {
                m.hits += c.hits;
                if c.representative.residual < m.representative.residual {
                    m.representative = c.representative;
                }
                m.members.extend(c.members);
            }
            None => merged.push(c),
        }
    }

    for c in &mut merged {
        let rep = space.combine(&c.representative.coeffs);
        c.spread = c
            .members
            .iter()
            .map(|m| (m - &rep).norm())
            .fold(0.0, f64::max);
    }
    merged
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::realization::construct_unique_realization;

    fn spec(freqs: &[f64]) -> FrequencySpec {
        FrequencySpec::from_frequencies(freqs).unwrap()
    }

    /// Free parameters of the constraint counted entry by entry: the entries
    /// `(L_ij, M_ij, M_ji, N_ij)` of `G = [[L, M], [Mᵀ, N]]` only couple
    /// among themselves, so each index pair contributes the nullity of a
    /// small linear system, computed here by exact Gaussian elimination.
    fn nullity_oracle(omegas: &[f64]) -> usize {
        let n = omegas.len();
        let mut total = 0;
        for i in 0..n {
            for j in i..n {
                let (wi, wj) = (omegas[i] * omegas[i], omegas[j] * omegas[j]);
                // unknowns: L_ij, M_ij, M_ji, N_ij (for i == j, M_ii is one unknown
                // shared by both slots)
                let rows: Vec<Vec<f64>> = vec![
                    // (M + Mᵀ)_ij = 0
                    vec![0.0, 1.0, 1.0, 0.0],
                    // (N − L Ω²)_ij = 0
                    vec![-wj, 0.0, 0.0, 1.0],
                    // (N − Ω² L)_ij = 0
                    vec![-wi, 0.0, 0.0, 1.0],
                    // (Ω² M − M Ω²)_ij = 0
                    vec![0.0, wi - wj, 0.0, 0.0],
                    // (Ω² M − M Ω²)_ji = 0
                    vec![0.0, 0.0, wj - wi, 0.0],
                ];
                let unknowns = if i == j { 3 } else { 4 };
                let rows: Vec<Vec<f64>> = if i == j {
                    rows.iter().map(|r| vec![r[0], r[1] + r[2], r[3]]).collect()
                } else {
                    rows
                };
                total += unknowns - rank(rows);
            }
        }
        total
    }

    fn rank(mut rows: Vec<Vec<f64>>) -> usize {
        let cols = rows[0].len();
        let mut r = 0;
        for c in 0..cols {
            let Some(pivot) = (r..rows.len()).find(|&k| rows[k][c] != 0.0) else {
                continue;
            };
            rows.swap(r, pivot);
            for k in 0..rows.len() {
                if k != r && rows[k][c] != 0.0 {
                    let f = rows[k][c] / rows[r][c];
                    for cc in 0..cols {
                        rows[k][cc] -= f * rows[r][cc];
                    }
                }
            }
            r += 1;
        }
        r
    }

    #[test]
    fn constraint_space_single_mode() {
        let space = solve_metric_constraint(&build_generator(&spec(&[2.0]))).unwrap();
        assert_eq!(space.dim(), 1);
        let b = &space.basis[0];
        let s = if b[(0, 0)] < 0.0 { -1.0 } else { 1.0 };
        let want = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 4.0]) / 17f64.sqrt();
        assert!((b * s - want).norm() <= 1e-12);
    }

    #[test]
    fn constraint_space_dimensions_match_oracle() {
        for freqs in [
            vec![1.0, 2.0],
            vec![2.0, 2.0],
            vec![3.0, 3.0, 3.0],
            vec![1.0, 2.0, 2.0],
            vec![0.5, 0.7, 0.5, 4.0],
        ] {
            let space = solve_metric_constraint(&build_generator(&spec(&freqs))).unwrap();
            assert_eq!(space.dim(), nullity_oracle(&freqs), "{freqs:?}");
        }
        // frozen oracle values
        assert_eq!(nullity_oracle(&[1.0, 2.0]), 2);
        assert_eq!(nullity_oracle(&[2.0, 2.0]), 4);
        assert_eq!(nullity_oracle(&[3.0, 3.0, 3.0]), 9);
    }

    #[test]
    fn constraint_basis_is_orthonormal_and_admissible() {
        let a = build_generator(&spec(&[0.4, 1.5, 1.5]));
        let space = solve_metric_constraint(&a).unwrap();
        for (i, b) in space.basis.iter().enumerate() {
            assert!((b - b.transpose()).norm() <= 1e-13);
            let res = b * a.matrix() + a.matrix().transpose() * b;
            assert!(res.norm() <= 1e-12);
            for (j, c) in space.basis.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((b.dot(c) - want).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn empty_constraint_space_is_an_error() {
        // A = I: SA + AᵀS = 2S = 0 only for S = 0
        let a = GeneratorMatrix::from_matrix(DMatrix::identity(2, 2)).unwrap();
        assert_eq!(
            solve_metric_constraint(&a).unwrap_err(),
            SegalError::EmptySolutionSpace
        );
    }

    #[test]
    fn scan_examples() {
        let set = uniqueness_scan(&ConstraintProblem::for_spec(&spec(&[2.0]))).unwrap();
        assert!(set.is_unique());
        let want = DMatrix::from_row_slice(2, 2, &[0.5, 0.0, 0.0, 2.0]);
        assert!((&set.solutions[0].metric - want).norm() <= 1e-8);

        let s = spec(&[1.0, 2.0]);
        let set = uniqueness_scan(&ConstraintProblem::for_spec(&s)).unwrap();
        assert!(set.is_unique());
        let r = construct_unique_realization(&s);
        assert!(set.solutions[0].distance_to(&r) <= 1e-8);
        assert!(set.solutions[0].axioms.pass());

        let s = spec(&[3.0, 3.0]);
        let set = uniqueness_scan(&ConstraintProblem::for_spec(&s)).unwrap();
        assert!(set.is_unique(), "{} clusters", set.solutions.len());
        let want = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0 / 3.0, 1.0 / 3.0, 3.0, 3.0]));
        assert!((&set.solutions[0].metric - want).norm() <= 1e-8);
    }

    #[test]
    fn scan_is_deterministic_for_fixed_seed() {
        let s = spec(&[0.3, 1.1, 1.1]);
        let p = ConstraintProblem::for_spec(&s).with_restarts(16).with_seed(42);
        let a = uniqueness_scan(&p).unwrap();
        let b = uniqueness_scan(&p).unwrap();
        assert_eq!(a.converged, b.converged);
        assert_eq!(a.solutions.len(), b.solutions.len());
        assert_eq!(a.solutions[0].metric, b.solutions[0].metric);
        assert_eq!(a.solutions[0].hits, b.solutions[0].hits);
    }

    #[test]
    fn invalid_problem_parameters() {
        let s = spec(&[1.0]);
        assert!(uniqueness_scan(&ConstraintProblem::for_spec(&s).with_restarts(0)).is_err());
        assert!(uniqueness_scan(&ConstraintProblem::for_spec(&s).with_cluster_radius(0.0)).is_err());
    }

    #[test]
    fn scan_failure_is_reported() {
        // with a tolerance below round-off nothing can converge
        let mut p = ConstraintProblem::for_spec(&spec(&[1.3])).with_restarts(2);
        p.tolerances.nonlinear = 1e-300;
        match uniqueness_scan(&p) {
            Err(SegalError::ScanFailure(msg)) => assert!(msg.contains("best residual"), "{msg}"),
            // a root that happens to be exact in floating point is fine too
            Ok(set) => assert_eq!(set.solutions[0].residual, 0.0),
            Err(e) => panic!("unexpected error {e:?}"),
        }
    }

    #[test]
    fn axioms_for_realization_pass() {
        let s = spec(&[1.0, 2.0]);
        let r = construct_unique_realization(&s);
        let report = verify_axioms(
            r.metric().matrix(),
            r.form().matrix(),
            r.generator(),
            r.form(),
            1e-12,
        )
        .unwrap();
        assert!(report.pass(), "{report:?}");
        assert!(report.max_residual() < 1e-12);
        assert_eq!(report.entries.len(), 9);
    }

    #[test]
    fn axioms_detect_euclidean_metric() {
        let s = spec(&[2.0]);
        let a = build_generator(&s);
        let w = SymplecticFormMatrix::standard(1);
        let report = verify_axioms(&DMatrix::identity(2, 2), w.matrix(), &a, &w, 1e-10).unwrap();
        assert!(!report.get("a_antisymmetry").unwrap().pass);
        assert!(!report.pass());
    }

    #[test]
    fn axioms_detect_degenerate_form() {
        let s = spec(&[2.0]);
        let r = construct_unique_realization(&s);
        let report = verify_axioms(
            r.metric().matrix(),
            &DMatrix::zeros(2, 2),
            r.generator(),
            r.form(),
            1e-10,
        )
        .unwrap();
        assert!(!report.get("w_condition").unwrap().pass);
        assert!(!report.get("ccr").unwrap().pass);
        assert!(!report.get("j_square").unwrap().pass);
    }
}
