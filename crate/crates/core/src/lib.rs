//! Mean-field BCS plates joined by a Josephson contact: equilibrium gap
//! equation, the nonequilibrium steady state of the coupled plates, the
//! currents it carries, and an exact finite-lattice reference.

pub mod equilibrium;
pub mod error;
pub mod lattice;
pub mod ness;
pub mod spin;
pub mod transport;

pub use equilibrium::{
    critical_beta, equilibrium_state, gap_residual, solve_gap, EquilibriumState, OrderField,
    PlateParams,
};
pub use error::{Error, Result};
pub use lattice::{
    build_hamiltonian, cesaro_average, evolve, initial_state, Dynamics, LatticeSpec,
    ManyBodyOperator, Plate, Trajectory,
};
pub use ness::{
    effective_field, solve_ness, steady_residual, surface_map, surface_via_projection,
    JunctionParams, NessSolver, NessState, Region,
};
pub use spin::{dephase, eig2, expect, gibbs, Density2, Hermitian2, Mat2, Spectral2};
pub use transport::{
    current_density, current_report, entropy_production_e1, heat_flux, josephson_current,
    CurrentReport, HeatFlux,
};
