//! Unitary realizations of systems of decoupled harmonic oscillators.
//!
//! Given a positive spectrum, [`realization::construct_unique_realization`]
//! builds the metric, symplectic form, complex unit and one-particle
//! Hamiltonian under which the oscillator flow is simultaneously Hamiltonian,
//! symplectic and unitary with canonical brackets. [`scan`] re-derives that
//! structure by solving the constraint system numerically and checks that the
//! solution is unique; [`dynamics`] and [`fock`] evolve states classically and
//! in the truncated symmetric Fock space.

pub mod dynamics;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod model;
pub mod quadrature;
pub mod realization;
pub mod scan;
pub mod symplectic;

pub use error::{Result, SegalError};
pub use model::{
    build_generator, classical_hamiltonian, omega_apply, DiscreteMode, FrequencySpec,
    GeneratorMatrix, PhaseSpacePoint, Quadrature,
};
pub use realization::{
    canonical_transform, construct_unique_realization, hamiltonian_from_generator,
    CanonicalTransform, Realization,
};
pub use symplectic::{
    complex_pairing, complex_unit_from, complexify, is_naturally_complex,
    poisson_bracket_canonical, BracketKind, ComplexUnit, Metric, SymplecticFormMatrix,
};
pub use dynamics::{
    check_flow_domain, complex_evolution, evolve, flow_closed_form, flow_expm, FlowOperator,
    Trajectory, WeightFunction,
};
pub use fock::{
    build_fock, evolution_group, second_quantized_hamiltonian, FockBasis, FockSpace, LadderPair,
};
pub use scan::{
    solve_metric_constraint, uniqueness_scan, verify_axioms, AxiomReport, ConstraintProblem,
    SolutionSet,
};
