//! Nonequilibrium steady state of two plates coupled through a contact row.
//!
//! The state is a product over four permutation-invariant regions: the two
//! bulks (`Ia`, `IIa`), which keep their equilibrium one-site states, and the
//! two contact rows (`Ib`, `IIb`), whose one-site states are the bulk
//! equilibrium states dephased in the eigenbasis of the surface effective
//! Hamiltonian. The surface order fields are fixed by the coupled
//! self-consistency
//!
//! ```text
//! c̃_I  = S_I (c_I  + γ c̃_II)
//! c̃_II = S_II(c_II + γ c̃_I)
//! ```
//!
//! where `S` is [`surface_map`].

use num_complex::Complex64;

use crate::equilibrium::{canonical_phase, equilibrium_state, OrderField, PlateParams};
use crate::error::{domain, Error, Result};
use crate::spin::{commutator, dephase, frobenius, gibbs, order_parameter, Density2, Hermitian2};

/// Two plates, their tunnelling coupling and their bulk phases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JunctionParams {
    pub plate_i: PlateParams,
    pub plate_ii: PlateParams,
    gamma: f64,
    phi_i: f64,
    phi_ii: f64,
}

impl JunctionParams {
    pub fn new(
        plate_i: PlateParams,
        plate_ii: PlateParams,
        gamma: f64,
        phi_i: f64,
        phi_ii: f64,
    ) -> Result<Self> {
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(domain(format!(
                "gamma must be finite and >= 0, got {gamma}"
            )));
        }
        if !(phi_i.is_finite() && phi_ii.is_finite()) {
            return Err(domain("bulk phases must be finite"));
        }
        Ok(Self {
            plate_i,
            plate_ii,
            gamma,
            phi_i: canonical_phase(phi_i),
            phi_ii: canonical_phase(phi_ii),
        })
    }

    /// Identical plates with `φ_I = 0` and `φ_II = Δφ`.
    pub fn symmetric(plate: PlateParams, gamma: f64, delta_phi: f64) -> Result<Self> {
        Self::new(plate, plate, gamma, 0.0, delta_phi)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn phi_i(&self) -> f64 {
        self.phi_i
    }

    pub fn phi_ii(&self) -> f64 {
        self.phi_ii
    }

    /// `φ_II − φ_I`, in `[0, 2π)`.
    pub fn delta_phi(&self) -> f64 {
        canonical_phase(self.phi_ii - self.phi_i)
    }

    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        Self::new(self.plate_i, self.plate_ii, gamma, self.phi_i, self.phi_ii)
    }

    pub fn with_phases(&self, phi_i: f64, phi_ii: f64) -> Result<Self> {
        Self::new(self.plate_i, self.plate_ii, self.gamma, phi_i, phi_ii)
    }
}

/// Total off-diagonal field `Δ = c_bulk + γ c̃_other` felt on a contact site.
pub fn effective_field(bulk: &OrderField, gamma: f64, other_surface: &OrderField) -> Complex64 {
    bulk.c() + gamma * other_surface.c()
}

/// `tanh(βk)/(2k)` evaluated at the bulk field: exactly one on a
/// superconducting gap solution, `tanh(βε)/(2ε)` in the normal phase.
fn gap_factor(plate: &PlateParams, bulk: &OrderField) -> f64 {
    if bulk.lambda() > 0.0 {
        1.0
    } else {
        let e = plate.epsilon();
        (plate.beta() * e).tanh() / (2.0 * e)
    }
}

/// Closed-form surface order field induced by the field `delta`:
///
/// ```text
/// Δ · (ε² + λ|Δ| cos(arg Δ − φ)) / (ε² + |Δ|²)
/// ```
///
/// with `(λ, φ)` the bulk field. The cosine is evaluated at `arg Δ`, which is
/// the phase of the output whenever the bracket is positive, so the
/// expression coincides with the self-consistent one at every fixed point.
/// For a normal bulk the result carries the extra factor `tanh(βε)/(2ε)`
/// from the bulk Gibbs state (see [`surface_via_projection`]).
pub fn surface_map(plate: &PlateParams, bulk: &OrderField, delta: Complex64) -> Complex64 {
    let e2 = plate.epsilon() * plate.epsilon();
    // λ|Δ|cos(arg Δ − φ) = Re(Δ c̄)
    let overlap = e2 + (delta * bulk.c().conj()).re;
    gap_factor(plate, bulk) * delta * overlap / (e2 + delta.norm_sqr())
}

/// Surface order field computed by direct projection: dephase the bulk Gibbs
/// state in the eigenbasis of `ε σᶻ − conj(Δ)σ⁻ − Δσ⁺` and read off
/// `tr(ρ̃ σ⁻)`. Independent route to [`surface_map`].
pub fn surface_via_projection(
    plate: &PlateParams,
    bulk: &OrderField,
    delta: Complex64,
) -> Complex64 {
    let rho0 = gibbs(
        &Hermitian2::pairing(plate.epsilon(), bulk.c()),
        plate.beta(),
    );
    let h = Hermitian2::pairing(plate.epsilon(), delta);
    order_parameter(&dephase(&rho0, &h))
}

/// Fully assembled steady state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NessState {
    pub params: JunctionParams,
    pub bulk_i: OrderField,
    pub bulk_ii: OrderField,
    pub surf_i: OrderField,
    pub surf_ii: OrderField,
    pub rho_ia: Density2,
    pub rho_ib: Density2,
    pub rho_iib: Density2,
    pub rho_iia: Density2,
    pub iterations: usize,
    /// Damping weight of the successful attempt.
    pub damping: f64,
    pub residual: f64,
}

/// The four permutation-invariant regions, ordered from plate I's bulk to
/// plate II's bulk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    Ia,
    Ib,
    IIb,
    IIa,
}

impl Region {
    pub const ALL: [Region; 4] = [Region::Ia, Region::Ib, Region::IIb, Region::IIa];

    pub fn label(&self) -> &'static str {
        match self {
            Region::Ia => "Ia",
            Region::Ib => "Ib",
            Region::IIb => "IIb",
            Region::IIa => "IIa",
        }
    }
}

impl NessState {
    pub fn delta_i(&self) -> Complex64 {
        effective_field(&self.bulk_i, self.params.gamma, &self.surf_ii)
    }

    pub fn delta_ii(&self) -> Complex64 {
        effective_field(&self.bulk_ii, self.params.gamma, &self.surf_i)
    }

    /// Effective one-site Hamiltonian of a region, built from the state's
    /// current order fields.
    pub fn region_hamiltonian(&self, region: Region) -> Hermitian2 {
        let (ei, eii) = (
            self.params.plate_i.epsilon(),
            self.params.plate_ii.epsilon(),
        );
        match region {
            Region::Ia => Hermitian2::pairing(ei, self.bulk_i.c()),
            Region::Ib => Hermitian2::pairing(ei, self.delta_i()),
            Region::IIb => Hermitian2::pairing(eii, self.delta_ii()),
            Region::IIa => Hermitian2::pairing(eii, self.bulk_ii.c()),
        }
    }

    pub fn region_density(&self, region: Region) -> &Density2 {
        match region {
            Region::Ia => &self.rho_ia,
            Region::Ib => &self.rho_ib,
            Region::IIb => &self.rho_iib,
            Region::IIa => &self.rho_iia,
        }
    }

    /// Largest move of a surface field under one more application of the
    /// coupled map.
    pub fn map_residual(&self) -> f64 {
        let p = &self.params;
        let next_i = surface_map(&p.plate_i, &self.bulk_i, self.delta_i());
        let next_ii = surface_map(&p.plate_ii, &self.bulk_ii, self.delta_ii());
        (next_i - self.surf_i.c())
            .norm()
            .max((next_ii - self.surf_ii.c()).norm())
    }
}

/// Max over regions of `‖[h̃, ρ̃]‖_F`, with `h̃` rebuilt from the state's
/// order fields.
pub fn steady_residual(state: &NessState) -> f64 {
    Region::ALL
        .iter()
        .map(|&r| {
            let h = state.region_hamiltonian(r).matrix();
            frobenius(&commutator(&h, &state.region_density(r).matrix()))
        })
        .fold(0.0, f64::max)
}

/// Damped alternating fixed-point iteration for the surface fields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NessSolver {
    /// Weight of the new map image in each update.
    pub damping: f64,
    /// After an exhausted budget the damping is halved and the iteration
    /// restarted, down to this weight.
    pub min_damping: f64,
    /// Convergence threshold on the largest complex-field change per sweep.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for NessSolver {
    fn default() -> Self {
        Self {
            damping: 0.5,
            min_damping: 0.5 / 16.0,
            tolerance: 1e-12,
            max_iterations: 100_000,
        }
    }
}

impl NessSolver {
    pub fn solve(&self, params: &JunctionParams) -> Result<NessState> {
        self.solve_from(params, None)
    }

    /// Solves starting from `guess = (c̃_I, c̃_II)`; without a guess the
    /// iteration starts at the bulk fields (the decoupled solution).
    pub fn solve_from(
        &self,
        params: &JunctionParams,
        guess: Option<(Complex64, Complex64)>,
    ) -> Result<NessState> {
        let eq_i = equilibrium_state(&params.plate_i, params.phi_i);
        let eq_ii = equilibrium_state(&params.plate_ii, params.phi_ii);
        let (bulk_i, bulk_ii) = (eq_i.order, eq_ii.order);
        let start = guess.unwrap_or((bulk_i.c(), bulk_ii.c()));
        let mut a = self.damping;
        let (mut si, mut sii, mut iterations, mut change) =
            self.iterate(params, &bulk_i, &bulk_ii, a, start);
        let converged = |c: f64| c < self.tolerance;
        while !converged(change) && a / 2.0 >= self.min_damping {
            a /= 2.0;
            (si, sii, iterations, change) = self.iterate(params, &bulk_i, &bulk_ii, a, start);
        }

        let mut state = NessState {
            params: *params,
            bulk_i,
            bulk_ii,
            surf_i: OrderField::new(si),
            surf_ii: OrderField::new(sii),
            rho_ia: eq_i.rho,
            rho_ib: eq_i.rho,
            rho_iib: eq_ii.rho,
            rho_iia: eq_ii.rho,
            iterations,
            damping: a,
            residual: f64::NAN,
        };
        state.residual = state.map_residual();
        let settled = change < self.tolerance && state.residual < 1e-10;
        if !settled {
            return Err(Error::NonConvergence {
                iterations,
                residual: if state.residual.is_finite() {
                    state.residual
                } else {
                    change
                },
                surf_i: si,
                surf_ii: sii,
            });
        }
        state.rho_ib = dephase(&eq_i.rho, &state.region_hamiltonian(Region::Ib));
        state.rho_iib = dephase(&eq_ii.rho, &state.region_hamiltonian(Region::IIb));
        Ok(state)
    }

    fn iterate(
        &self,
        params: &JunctionParams,
        bulk_i: &OrderField,
        bulk_ii: &OrderField,
        a: f64,
        (mut si, mut sii): (Complex64, Complex64),
    ) -> (Complex64, Complex64, usize, f64) {
        let g = params.gamma;
        let mut iterations = 0;
        let mut change = f64::INFINITY;
        while iterations < self.max_iterations {
            iterations += 1;
            let img_i = surface_map(&params.plate_i, bulk_i, bulk_i.c() + g * sii);
            let next_i = (1.0 - a) * si + a * img_i;
            let img_ii = surface_map(&params.plate_ii, bulk_ii, bulk_ii.c() + g * next_i);
            let next_ii = (1.0 - a) * sii + a * img_ii;
            change = (next_i - si).norm().max((next_ii - sii).norm());
            si = next_i;
            sii = next_ii;
            if !change.is_finite() || change < self.tolerance {
                break;
            }
        }
        (si, sii, iterations, change)
    }

    /// Follows the equilibrium-connected branch through a sequence of
    /// couplings, seeding each solve with the previous solution.
    pub fn continue_in_gamma(
        &self,
        params: &JunctionParams,
        gammas: &[f64],
    ) -> Vec<Result<NessState>> {
        let mut guess = None;
        gammas
            .iter()
            .map(|&g| {
                let res = params
                    .with_gamma(g)
                    .and_then(|p| self.solve_from(&p, guess));
                if let Ok(s) = &res {
                    guess = Some((s.surf_i.c(), s.surf_ii.c()));
                }
                res
            })
            .collect()
    }
}

/// [`NessSolver::solve`] with the default scheme.
pub fn solve_ness(params: &JunctionParams) -> Result<NessState> {
    NessSolver::default().solve(params)
}
