//! Current densities in the steady state.
//!
//! For an extensive observable `Q_N` built from one-site copies `q_I` on plate
//! I and `q_II` on plate II, invariance of the steady state under the
//! effective dynamics leaves only the bulk mismatch between the exact and
//! effective mean fields:
//!
//! ```text
//! j(Q) = i tr(ρ_Ia [−X_I, q_I]) + i tr(ρ_IIa [−X_II, q_II])
//! X    = σ⁺ (c̃ − c) + σ⁻ conj(c̃ − c)
//! ```

use num_complex::Complex64;

use crate::error::Result;
use crate::ness::{NessState, Region};
use crate::spin::{
    commutator, expect, number, sigma_minus, sigma_plus, sigma_z, trace, Hermitian2, Mat2,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurrentReport {
    /// Pair-current density `j(C)`.
    pub josephson: f64,
    /// Heat-flux density in the infinite-volume limit (identically zero).
    pub heat_limit: f64,
    /// Coefficient of the `O(1/N)` heat-flux fluctuation.
    pub heat_amplitude: f64,
    pub entropy_e1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatFlux {
    pub limit: f64,
    pub amplitude: f64,
}

/// `λ λ̃ sin(φ − φ̃) = Im(c · conj(c̃))`.
fn pair_term(bulk: Complex64, surf: Complex64) -> f64 {
    (bulk * surf.conj()).im
}

/// `j(C) = 2(λ_I λ̃_I sin(φ_I − φ̃_I) − λ_II λ̃_II sin(φ_II − φ̃_II))`.
pub fn josephson_current(state: &NessState) -> f64 {
    2.0 * pair_term(state.bulk_i.c(), state.surf_i.c())
        - 2.0 * pair_term(state.bulk_ii.c(), state.surf_ii.c())
}

fn mismatch(bulk: Complex64, surf: Complex64) -> Mat2 {
    let d = surf - bulk;
    sigma_plus() * d + sigma_minus() * d.conj()
}

/// Infinite-volume current density of the extensive observable with one-site
/// copies `q_i` (plate I) and `q_ii` (plate II). Both must be Hermitian.
pub fn current_density(state: &NessState, q_i: &Mat2, q_ii: &Mat2) -> Result<f64> {
    Hermitian2::from_matrix(q_i)?;
    Hermitian2::from_matrix(q_ii)?;
    let x_i = mismatch(state.bulk_i.c(), state.surf_i.c());
    let x_ii = mismatch(state.bulk_ii.c(), state.surf_ii.c());
    let i = Complex64::i();
    let j = i * expect(&state.rho_ia, &commutator(&-x_i, q_i))
        + i * expect(&state.rho_iia, &commutator(&-x_ii, q_ii));
    Ok(j.re)
}

/// Current of the relative pair number `C_N = N_I − N_II`; agrees with
/// [`josephson_current`].
pub fn relative_number_current(state: &NessState) -> f64 {
    current_density(state, &number(), &-number()).expect("number operator is Hermitian")
}

/// Heat flux for `Q_N = β_I H_I + β_II H_II`: the limit vanishes, and the
/// `O(1/N)` coefficient is
/// `2 Σ β (⟨σᶻ⟩_surface + 2ε) λ λ̃ sin(φ − φ̃)`.
pub fn heat_flux(state: &NessState) -> HeatFlux {
    let p = &state.params;
    let side = |beta: f64, eps: f64, rho, bulk: Complex64, surf: Complex64| {
        2.0 * beta * (expect(rho, &sigma_z()).re + 2.0 * eps) * pair_term(bulk, surf)
    };
    let amplitude = side(
        p.plate_i.beta(),
        p.plate_i.epsilon(),
        &state.rho_ib,
        state.bulk_i.c(),
        state.surf_i.c(),
    ) + side(
        p.plate_ii.beta(),
        p.plate_ii.epsilon(),
        &state.rho_iib,
        state.bulk_ii.c(),
        state.surf_ii.c(),
    );
    HeatFlux {
        limit: 0.0,
        amplitude,
    }
}

/// Per-site rate `−i tr(ρ [h, log ρ])` of one region.
pub fn region_partition_rate(rho: &crate::spin::Density2, h: &Hermitian2) -> f64 {
    let l = rho.log().matrix();
    let c = commutator(&h.matrix(), &l);
    (-Complex64::i() * trace(&(rho.matrix() * c))).re
}

/// Entropy production from partitioning into the two plates. For a product
/// state the restriction logarithms are sums of one-site logarithms, and the
/// mean-field commutator splits into the four region terms.
pub fn entropy_production_e1(state: &NessState) -> f64 {
    Region::ALL
        .iter()
        .map(|&r| region_partition_rate(state.region_density(r), &state.region_hamiltonian(r)))
        .sum()
}

pub fn current_report(state: &NessState) -> CurrentReport {
    let heat = heat_flux(state);
    CurrentReport {
        josephson: josephson_current(state),
        heat_limit: heat.limit,
        heat_amplitude: heat.amplitude,
        entropy_e1: entropy_production_e1(state),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::{OrderField, PlateParams};
    use crate::ness::{solve_ness, JunctionParams};
    use crate::spin::identity;
    use std::f64::consts::{FRAC_PI_2, PI, TAU};

    fn reference_junction(delta_phi: f64) -> NessState {
        let p = PlateParams::new(0.25, 4.0).unwrap();
        solve_ness(&JunctionParams::symmetric(p, 0.5, delta_phi).unwrap()).unwrap()
    }

    #[test]
    fn closed_form_matches_complex_form() {
        let st = reference_junction(1.1);
        let (li, lti) = (st.bulk_i.lambda(), st.surf_i.lambda());
        let (lii, ltii) = (st.bulk_ii.lambda(), st.surf_ii.lambda());
        let polar = 2.0
            * (li * lti * (st.bulk_i.phi() - st.surf_i.phi()).sin()
                - lii * ltii * (st.bulk_ii.phi() - st.surf_ii.phi()).sin());
        assert!((josephson_current(&st) - polar).abs() < 1e-14);
    }

    #[test]
    fn zero_current_at_zero_and_pi() {
        assert!(josephson_current(&reference_junction(0.0)).abs() < 1e-10);
        assert!(josephson_current(&reference_junction(PI)).abs() < 1e-10);
    }

    #[test]
    fn current_reverses_with_phase_difference() {
        for d in [0.3, 1.0, FRAC_PI_2, 2.5] {
            let a = josephson_current(&reference_junction(d));
            let b = josephson_current(&reference_junction(TAU - d));
            assert!((a + b).abs() < 1e-10, "d={d}: {a} vs {b}");
            assert!(a.abs() > 1e-3);
        }
    }

    #[test]
    fn transport_functional_reproduces_josephson() {
        for d in [0.2, 1.3, 2.9, 4.0] {
            let st = reference_junction(d);
            assert!((relative_number_current(&st) - josephson_current(&st)).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_carries_no_current() {
        let st = reference_junction(1.0);
        assert_eq!(current_density(&st, &identity(), &identity()).unwrap(), 0.0);
    }

    #[test]
    fn sigma_z_is_twice_number() {
        let st = reference_junction(1.0);
        let zero = Mat2::zeros();
        let jz = current_density(&st, &sigma_z(), &zero).unwrap();
        let jn = current_density(&st, &number(), &zero).unwrap();
        assert!((jz - 2.0 * jn).abs() < 1e-14);
        let expected = 2.0 * pair_term(st.bulk_i.c(), st.surf_i.c());
        assert!((jn - expected).abs() < 1e-14);
    }

    #[test]
    fn non_hermitian_observable_rejected() {
        let st = reference_junction(1.0);
        assert!(current_density(&st, &sigma_plus(), &number()).is_err());
        assert!(current_density(&st, &number(), &sigma_minus()).is_err());
    }

    #[test]
    fn current_density_is_linear() {
        let st = reference_junction(2.0);
        let a = (number(), sigma_z());
        let b = (
            Hermitian2::new(0.3, -0.7, Complex64::new(0.2, 0.4)).matrix(),
            Hermitian2::new(1.0, 0.1, Complex64::new(-0.5, 0.1)).matrix(),
        );
        let (s, t) = (0.7, -1.9);
        let combo = current_density(
            &st,
            &(a.0 * Complex64::new(s, 0.0) + b.0 * Complex64::new(t, 0.0)),
            &(a.1 * Complex64::new(s, 0.0) + b.1 * Complex64::new(t, 0.0)),
        )
        .unwrap();
        let sep = s * current_density(&st, &a.0, &a.1).unwrap()
            + t * current_density(&st, &b.0, &b.1).unwrap();
        assert!((combo - sep).abs() < 1e-14);
    }

    fn asymmetric(delta_phi: f64) -> NessState {
        let pi = PlateParams::new(0.25, 4.0).unwrap();
        let pii = PlateParams::new(0.2, 6.0).unwrap();
        solve_ness(&JunctionParams::new(pi, pii, 0.5, 0.3, 0.3 + delta_phi).unwrap()).unwrap()
    }

    #[test]
    fn heat_flux_properties() {
        let zero = heat_flux(&reference_junction(0.0));
        assert_eq!(zero.limit, 0.0);
        assert!(zero.amplitude.abs() < 1e-10);
        // identical plates: the two contact terms cancel for every phase
        assert!(heat_flux(&reference_junction(FRAC_PI_2)).amplitude.abs() < 1e-10);

        let a = heat_flux(&asymmetric(FRAC_PI_2));
        let b = heat_flux(&asymmetric(-FRAC_PI_2));
        assert_eq!(a.limit, 0.0);
        assert!(a.amplitude.abs() > 1e-3, "amplitude {}", a.amplitude);
        assert!((a.amplitude + b.amplitude).abs() < 1e-9);
    }

    #[test]
    fn entropy_production_vanishes() {
        for d in [0.0, 0.9, PI, 5.0] {
            assert!(entropy_production_e1(&reference_junction(d)).abs() < 1e-12);
        }
        let p = PlateParams::new(0.25, 4.0).unwrap();
        let eq = solve_ness(&JunctionParams::symmetric(p, 0.0, 1.0).unwrap()).unwrap();
        assert!(entropy_production_e1(&eq).abs() < 1e-12);
    }

    #[test]
    fn decoupled_junction_carries_nothing() {
        let p = PlateParams::new(0.25, 4.0).unwrap();
        let st = solve_ness(&JunctionParams::symmetric(p, 0.0, 1.0).unwrap()).unwrap();
        let r = current_report(&st);
        assert_eq!(r.josephson, 0.0);
        assert_eq!(r.heat_amplitude, 0.0);
        assert_eq!(st.surf_i, OrderField::new(st.bulk_i.c()));
    }
}
