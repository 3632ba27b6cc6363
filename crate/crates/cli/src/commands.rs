use std::time::Instant;

use nalgebra::DVector;
use serde::Serialize;

use segal_core::fock::{ccr_deviation, evolution_phases, one_particle_block, second_quantized_spectrum};
use segal_core::linalg::{from_rows, relative_residual};
use segal_core::scan::ConstraintProblem;
use segal_core::{
    build_fock, check_flow_domain, complex_evolution, construct_unique_realization, evolution_group,
    evolve, flow_closed_form, second_quantized_hamiltonian, uniqueness_scan, verify_axioms,
    PhaseSpacePoint, Realization, SegalError,
};

use crate::config::{RunConfig, TimeGrid};
use crate::report::{Entry, Report};
use crate::{CliError, Options};

/// Distance within which a scanned solution counts as the constructed one.
pub const FORMULA_MATCH_TOL: f64 = 1e-8;

fn tolerance(config: &RunConfig, opts: &Options) -> Result<f64, CliError> {
    let tol = config.tolerance.unwrap_or(opts.default_tolerance);
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(CliError::Input(format!("tolerance must be positive, got {tol}")));
    }
    Ok(tol)
}

fn t_grid(config: &RunConfig) -> Result<Vec<f64>, CliError> {
    config.t_grid.clone().unwrap_or_default().values()
}

fn initial_state(config: &RunConfig) -> Result<PhaseSpacePoint, CliError> {
    let n = config.spec.dim();
    let x0 = match &config.x0 {
        Some(x) => x.clone(),
        None => PhaseSpacePoint::new(DVector::from_element(n, 1.0), DVector::zeros(n))?,
    };
    if x0.dim() != n {
        return Err(SegalError::DimensionMismatch {
            expected: n,
            found: x0.dim(),
        }
        .into());
    }
    Ok(x0)
}

fn structure_matrices(report: &mut Report, r: &Realization) {
    report.matrix("G", r.metric().matrix());
    report.matrix("W", r.form().matrix());
    report.matrix("J", r.unit().matrix());
    report.matrix("H", r.hamiltonian());
    report.matrix("A", r.generator().matrix());
}

pub fn cmd_verify(config: &RunConfig, opts: &Options, report: &mut Report) -> Result<(), CliError> {
    let tol = tolerance(config, opts)?;
    let grid = t_grid(config)?;
    let start = Instant::now();
    let r = construct_unique_realization(&config.spec);
    let dim = 2 * config.spec.dim();
    let g = match &config.metric_override {
        Some(rows) => {
            let g = from_rows(rows)
                .filter(|g| g.nrows() == dim && g.ncols() == dim)
                .ok_or_else(|| {
                    CliError::Input(format!("metric_override must be a {dim}x{dim} matrix"))
                })?;
            if g.iter().any(|x| !x.is_finite()) {
                return Err(CliError::Input("metric_override has non-finite entries".into()));
            }
            g
        }
        None => r.metric().matrix().clone(),
    };
    report.timing("construct", start.elapsed().as_secs_f64());

    let start = Instant::now();
    let axioms = verify_axioms(&g, r.form().matrix(), r.generator(), r.form(), tol)?;
    for e in &axioms.entries {
        report.entry(Entry {
            name: e.name.to_string(),
            residual: e.residual,
            tolerance: e.tolerance,
            pass: e.pass,
        });
    }

    let w = r.form().matrix();
    let (mut metric_drift, mut form_drift) = (0.0f64, 0.0f64);
    for &t in &grid {
        let phi = flow_closed_form(&config.spec, t);
        let m = phi.matrix();
        metric_drift = metric_drift.max(relative_residual(&(m.transpose() * &g * m - &g), &g));
        form_drift = form_drift.max(relative_residual(&(m.transpose() * w * m - w), w));
    }
    report.entry(Entry::at_most("flow_metric_invariance", metric_drift, tol));
    report.entry(Entry::at_most("flow_form_invariance", form_drift, tol));
    report.timing("verify", start.elapsed().as_secs_f64());

    structure_matrices(report, &r);
    if config.metric_override.is_some() {
        report.matrix("G_override", &g);
    }
    Ok(())
}

#[derive(Serialize)]
struct ClusterRow {
    hits: usize,
    residual: f64,
    spread: f64,
    formula_distance: f64,
}

pub fn cmd_uniqueness(config: &RunConfig, opts: &Options, report: &mut Report) -> Result<(), CliError> {
    tolerance(config, opts)?;
    let block = config.scan.clone().unwrap_or_default();
    let mut problem = ConstraintProblem::for_spec(&config.spec);
    if let Some(r) = block.restarts {
        problem.restarts = r;
    }
    if let Some(s) = opts.seed.or(block.seed) {
        problem.seed = s;
    }
    if let Some(c) = block.cluster_radius {
        problem.cluster_radius = c;
    }
    report.table(
        "scan",
        serde_json::json!({
            "restarts": problem.restarts,
            "seed": problem.seed,
            "cluster_radius": problem.cluster_radius,
            "tolerances": problem.tolerances,
        }),
    );

    let start = Instant::now();
    let outcome = uniqueness_scan(&problem);
    report.timing("scan", start.elapsed().as_secs_f64());
    let set = match outcome {
        Ok(set) => set,
        Err(SegalError::ScanFailure(msg)) => {
            report.entry(Entry::at_most("scan_converged", f64::INFINITY, 0.0));
            report.table("scan_failure", msg);
            return Ok(());
        }
        Err(e) => return Err(e.into()),
    };

    let r = construct_unique_realization(&config.spec);
    report.entry(Entry::at_most(
        "extra_clusters",
        set.solutions.len().saturating_sub(1) as f64,
        0.0,
    ));
    let best = set
        .solutions
        .iter()
        .max_by_key(|s| s.hits)
        .expect("a successful scan has at least one cluster");
    report.entry(Entry::at_most(
        "formula_distance",
        best.distance_to(&r),
        FORMULA_MATCH_TOL,
    ));
    // the scan checks its solutions at its own convergence tolerance
    for e in &best.axioms.entries {
        report.entry(Entry {
            name: format!("solution_{}", e.name),
            residual: e.residual,
            tolerance: e.tolerance,
            pass: e.pass,
        });
    }

    let rows: Vec<ClusterRow> = set
        .solutions
        .iter()
        .map(|s| ClusterRow {
            hits: s.hits,
            residual: s.residual,
            spread: s.spread,
            formula_distance: s.distance_to(&r),
        })
        .collect();
    report.table("clusters", rows);
    report.table(
        "constraint",
        serde_json::json!({
            "dimension": set.constraint_dim,
            "converged_starts": set.converged,
        }),
    );
    report.matrix("G_scan", &best.metric);
    report.matrix("J_scan", &best.unit);
    report.matrix("G_formula", r.metric().matrix());
    Ok(())
}

#[derive(Serialize)]
struct TrajectoryRow {
    t: f64,
    p: Vec<f64>,
    q: Vec<f64>,
    norm_drift: f64,
    symplectic_drift: f64,
    energy_drift: f64,
}

pub fn cmd_evolve(config: &RunConfig, opts: &Options, report: &mut Report) -> Result<(), CliError> {
    let tol = tolerance(config, opts)?;
    let grid = t_grid(config)?;
    let x0 = initial_state(config)?;
    let r = construct_unique_realization(&config.spec);

    let start = Instant::now();
    let traj = evolve(&r, &x0, &grid)?;
    report.timing("evolve", start.elapsed().as_secs_f64());

    report.entry(Entry::at_most("norm_drift", traj.log.max_norm_drift(), tol));
    report.entry(Entry::at_most("symplectic_drift", traj.log.max_symplectic_drift(), tol));
    report.entry(Entry::at_most("energy_drift", traj.log.max_energy_drift(), tol));

    let rows: Vec<TrajectoryRow> = traj
        .states
        .iter()
        .zip(&traj.log.samples)
        .map(|(x, s)| TrajectoryRow {
            t: s.t,
            p: x.p.iter().copied().collect(),
            q: x.q.iter().copied().collect(),
            norm_drift: s.norm_drift,
            symplectic_drift: s.symplectic_drift,
            energy_drift: s.energy_drift,
        })
        .collect();
    report.table("trajectory", rows);
    Ok(())
}

pub fn cmd_fock(config: &RunConfig, opts: &Options, report: &mut Report) -> Result<(), CliError> {
    let tol = tolerance(config, opts)?;
    let block = config
        .fock
        .as_ref()
        .ok_or_else(|| CliError::Input("the fock command needs a \"fock\" block".into()))?;
    let spec = &config.spec;

    let start = Instant::now();
    let space = build_fock(spec, block.n_max)?;
    report.timing("build", start.elapsed().as_secs_f64());

    let start = Instant::now();
    let dev = ccr_deviation(&space);
    report.entry(Entry::at_most("ccr_below_top_shell", dev.below_top_shell, tol));

    let r = construct_unique_realization(spec);
    let x0 = initial_state(config)?;
    let u = evolution_group(spec, &space.basis, block.t)?;
    let lifted = one_particle_block(&u, &space.basis) * complex_evolution(&r, &x0, 0.0)?;
    let direct = complex_evolution(&r, &x0, block.t)?;
    report.entry(Entry::at_most(
        "one_particle_block",
        (lifted - &direct).norm() / direct.norm().max(1.0),
        tol,
    ));
    report.timing("checks", start.elapsed().as_secs_f64());

    let spectrum = second_quantized_spectrum(spec, &space.basis)?;
    let phases: Vec<[f64; 2]> = evolution_phases(spec, &space.basis, block.t)?
        .iter()
        .map(|c| [c.re, c.im])
        .collect();
    report.table("states", space.basis.states());
    report.table("spectrum", &spectrum);
    report.table("phases", phases);
    report.table(
        "truncation",
        serde_json::json!({
            "dimension": space.basis.len(),
            "n_max": block.n_max,
            "top_shell_ccr_deviation": dev.top_shell,
        }),
    );
    let h = second_quantized_hamiltonian(spec, &space.basis)?;
    report.matrix("dGamma_H", &h);
    Ok(())
}

pub fn cmd_domain_check(config: &RunConfig, opts: &Options, report: &mut Report) -> Result<(), CliError> {
    let tol = tolerance(config, opts)?;
    let block = config.domain_check.as_ref().ok_or_else(|| {
        CliError::Input("the domain-check command needs a \"domain_check\" block".into())
    })?;
    if !(block.bound > 0.0 && block.bound.is_finite()) {
        return Err(CliError::Input(format!("bound must be positive, got {}", block.bound)));
    }
    let grid = match &block.t_grid {
        Some(g) => g.values()?,
        None => match &config.t_grid {
            Some(g) => g.values()?,
            None => TimeGrid::Explicit(default_domain_grid()).values()?,
        },
    };
    let rho = block.rho.to_weight()?;
    let sigma = block.sigma.to_weight()?;

    let start = Instant::now();
    let check = check_flow_domain(&rho, &sigma, &config.spec, &grid)?;
    report.timing("domain_check", start.elapsed().as_secs_f64());

    let limit = block.bound * (1.0 + tol);
    report.entry(Entry::at_most("sup_k_sin_kt", check.sup1, limit));
    report.entry(Entry::at_most("sup_sin_kt_over_k", check.sup2, limit));
    report.table(
        "domain",
        serde_json::json!({
            "sup1": {"value": check.sup1, "node": check.sup1_node, "t": check.sup1_t},
            "sup2": {"value": check.sup2, "node": check.sup2_node, "t": check.sup2_t},
            "nodes": check.grid.len(),
            "times": grid.len(),
        }),
    );
    Ok(())
}

/// One period of the unit frequency, 256 samples.
fn default_domain_grid() -> Vec<f64> {
    (0..256)
        .map(|i| std::f64::consts::TAU * i as f64 / 255.0)
        .collect()
}
