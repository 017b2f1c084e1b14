//! Gap equation and pure-phase equilibrium states of a single plate.
//!
//! In the superconducting phase the modulus `λ` of the order field solves
//! `2k = tanh(βk)` with `k = sqrt(ε² + λ²)`; the phase is free.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::spin::{gibbs, order_parameter, Density2, Hermitian2};

/// Kinetic energy and inverse temperature of one plate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlateParams {
    epsilon: f64,
    beta: f64,
}

impl PlateParams {
    pub fn new(epsilon: f64, beta: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(domain(format!(
                "epsilon must be finite and > 0, got {epsilon}"
            )));
        }
        if !(beta.is_finite() && beta > 0.0) {
            return Err(domain(format!("beta must be finite and > 0, got {beta}")));
        }
        Ok(Self { epsilon, beta })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// Maps an angle onto `[0, 2π)`.
pub fn canonical_phase(phi: f64) -> f64 {
    let p = phi.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if p >= TAU {
        0.0
    } else {
        p
    }
}

/// Complex order field `c = λ e^{iφ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderField {
    c: Complex64,
}

impl OrderField {
    pub const ZERO: OrderField = OrderField {
        c: Complex64::new(0.0, 0.0),
    };

    pub fn new(c: Complex64) -> Self {
        Self { c }
    }

    pub fn from_polar(lambda: f64, phi: f64) -> Self {
        Self {
            c: Complex64::from_polar(lambda, canonical_phase(phi)),
        }
    }

    pub fn c(&self) -> Complex64 {
        self.c
    }

    pub fn lambda(&self) -> f64 {
        self.c.norm()
    }

    /// Phase in `[0, 2π)`; zero for a vanishing field.
    pub fn phi(&self) -> f64 {
        if self.c == Complex64::new(0.0, 0.0) {
            0.0
        } else {
            canonical_phase(self.c.arg())
        }
    }
}

/// Critical inverse temperature `β_c = ln((1+2ε)/(1−2ε)) / (2ε)`, or `None`
/// when `ε ≥ 1/2` and no superconducting phase exists.
pub fn critical_beta(epsilon: f64) -> Result<Option<f64>> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(domain(format!(
            "epsilon must be finite and > 0, got {epsilon}"
        )));
    }
    if epsilon >= 0.5 {
        return Ok(None);
    }
    // ln((1+x)/(1-x)) = 2 atanh(x), accurate as ε → 0
    Ok(Some((2.0 * epsilon).atanh() / epsilon))
}

/// `g(k) = tanh(βk) − 2k`; the nonzero gap solutions are its roots.
fn gap_function(beta: f64, k: f64) -> f64 {
    (beta * k).tanh() - 2.0 * k
}

const BISECTION_WIDTH: f64 = 1e-14;
const NEWTON_STEPS: usize = 3;

/// Bisection for the root of `g` on `[ε(1+1e-15), 1/2]`.
///
/// Requires `g(lo) > 0`, which holds exactly when `β > β_c`; `g(1/2) ≤ 0`
/// always holds.
pub(crate) fn bisect_gap_root(epsilon: f64, beta: f64) -> f64 {
    let mut lo = epsilon * (1.0 + 1e-15);
    let mut hi = 0.5;
    if gap_function(beta, hi) >= 0.0 {
        return hi;
    }
    while hi - lo > BISECTION_WIDTH {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if gap_function(beta, mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Newton polish of a bracketed root, rejecting steps that leave `[ε, 1/2]`.
pub(crate) fn polish_gap_root(epsilon: f64, beta: f64, mut k: f64) -> f64 {
    for _ in 0..NEWTON_STEPS {
        let sech = 1.0 / (beta * k).cosh();
        let slope = beta * sech * sech - 2.0;
        if slope == 0.0 || !slope.is_finite() {
            break;
        }
        let next = k - gap_function(beta, k) / slope;
        if !(next > epsilon && next <= 0.5) {
            break;
        }
        k = next;
    }
    k
}

/// Modulus of the equilibrium order field; zero in the normal phase
/// (including exactly at `β = β_c`).
pub fn solve_gap(params: &PlateParams) -> f64 {
    let (eps, beta) = (params.epsilon, params.beta);
    match critical_beta(eps) {
        Ok(Some(bc)) if beta > bc => {}
        _ => return 0.0,
    }
    let k = polish_gap_root(eps, beta, bisect_gap_root(eps, beta));
    ((k - eps) * (k + eps)).max(0.0).sqrt()
}

/// `|1 − tanh(βk)/(2k)|` at `k = sqrt(ε² + λ²)`.
pub fn gap_residual(params: &PlateParams, lambda: f64) -> f64 {
    let k = params.epsilon.hypot(lambda);
    (1.0 - (params.beta * k).tanh() / (2.0 * k)).abs()
}

/// Quasiparticle energy `k = sqrt(ε² + λ²)`.
pub fn quasiparticle_energy(epsilon: f64, lambda: f64) -> f64 {
    epsilon.hypot(lambda)
}

/// Equilibrium pure-phase state of one plate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumState {
    pub params: PlateParams,
    pub order: OrderField,
    pub k: f64,
    pub rho: Density2,
}

impl EquilibriumState {
    pub fn hamiltonian(&self) -> Hermitian2 {
        Hermitian2::pairing(self.params.epsilon, self.order.c())
    }

    /// Order field measured on the state, `tr(ρ σ⁻)`.
    pub fn measured_order(&self) -> Complex64 {
        order_parameter(&self.rho)
    }
}

pub fn equilibrium_state(params: &PlateParams, phi: f64) -> EquilibriumState {
    let lambda = solve_gap(params);
    let order = OrderField::from_polar(lambda, phi);
    let h = Hermitian2::pairing(params.epsilon, order.c());
    EquilibriumState {
        params: *params,
        order,
        k: quasiparticle_energy(params.epsilon, lambda),
        rho: gibbs(&h, params.beta),
    }
}
