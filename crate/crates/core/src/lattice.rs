//! Exact dynamics of the full many-body model on tiny lattices.
//!
//! Each plate is an `n x n` array of quasi-spin sites; site `(k, l)` of plate
//! I is bit `l·n + k` of a basis index, plate II follows at offset `n²`. Bit
//! value 0 is the occupied (first) one-site basis vector. Row `l = 0` is the
//! contact row.
//!
//! ```text
//! H_N = Σ_P [ ε_P Σ σᶻ − (1/N²) Σ_{s,t ∈ P} σ⁺_s σ⁻_t ]
//!       − (γ/N) Σ_{s ∈ row0(I), t ∈ row0(II)} (σ⁺_s σ⁻_t + σ⁻_s σ⁺_t)
//! ```
//!
//! `H_N` conserves the total pair number, so it is diagonalized block by
//! block and expectations are propagated exactly on the spectrum.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::equilibrium::equilibrium_state;
use crate::error::{domain, Error, Result};
use crate::ness::{JunctionParams, Region};
use crate::spin::{number, sigma_minus, sigma_plus, sigma_z, Density2, Mat2};

const MAX_N: usize = 2;

/// Eigenvalues closer than this are treated as one degenerate level.
const LEVEL_TOL: f64 = 1e-10;

/// Minimum trajectory length accepted by [`cesaro_average`].
pub const MIN_AVERAGING_TIME: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Plate {
    I,
    II,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeSpec {
    n: usize,
    pub params: JunctionParams,
}

impl LatticeSpec {
    pub fn new(n: usize, params: JunctionParams) -> Result<Self> {
        if n == 0 {
            return Err(domain("lattice size n must be >= 1"));
        }
        if n > MAX_N {
            return Err(Error::DimensionGuard(n));
        }
        Ok(Self { n, params })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sites_per_plate(&self) -> usize {
        self.n * self.n
    }

    pub fn num_sites(&self) -> usize {
        2 * self.sites_per_plate()
    }

    pub fn dim(&self) -> usize {
        1 << self.num_sites()
    }

    pub fn site(&self, plate: Plate, k: usize, l: usize) -> usize {
        let base = match plate {
            Plate::I => 0,
            Plate::II => self.sites_per_plate(),
        };
        base + l * self.n + k
    }

    pub fn plate_sites(&self, plate: Plate) -> Vec<usize> {
        (0..self.n)
            .flat_map(|l| (0..self.n).map(move |k| (k, l)))
            .map(|(k, l)| self.site(plate, k, l))
            .collect()
    }

    pub fn contact_sites(&self, plate: Plate) -> Vec<usize> {
        (0..self.n).map(|k| self.site(plate, k, 0)).collect()
    }

    pub fn region_of(&self, site: usize) -> Region {
        let per = self.sites_per_plate();
        let (local, plate_i) = if site < per {
            (site, true)
        } else {
            (site - per, false)
        };
        match (plate_i, local < self.n) {
            (true, false) => Region::Ia,
            (true, true) => Region::Ib,
            (false, true) => Region::IIb,
            (false, false) => Region::IIa,
        }
    }

    pub fn region_sites(&self, region: Region) -> Vec<usize> {
        (0..self.num_sites())
            .filter(|&s| self.region_of(s) == region)
            .collect()
    }

    /// Largest `|eigenvalue|` of `C_N`, i.e. `N²`.
    pub fn max_relative_number(&self) -> f64 {
        self.sites_per_plate() as f64
    }
}

/// Dense `4^{n²}`-dimensional operator.
#[derive(Debug, Clone, PartialEq)]
pub struct ManyBodyOperator {
    matrix: DMatrix<Complex64>,
}

impl ManyBodyOperator {
    pub fn zeros(dim: usize) -> Self {
        Self {
            matrix: DMatrix::zeros(dim, dim),
        }
    }

    pub fn from_matrix(matrix: DMatrix<Complex64>) -> Self {
        Self { matrix }
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Largest entry of `|A − A†|`.
    pub fn hermiticity_residual(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in i..d {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// `tr(self · a)` for a density matrix `self`.
    pub fn expect(&self, a: &ManyBodyOperator) -> Complex64 {
        let d = self.dim();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..d {
            for j in 0..d {
                acc += self.matrix[(i, j)] * a.matrix[(j, i)];
            }
        }
        acc
    }

    /// Frobenius norm of `[self, other]`.
    pub fn commutator_norm(&self, other: &ManyBodyOperator) -> f64 {
        (&self.matrix * &other.matrix - &other.matrix * &self.matrix).norm()
    }

    fn add_site(&mut self, coeff: f64, s: usize, m: &Mat2) {
        let d = self.dim();
        let mask = 1usize << s;
        for j in 0..d {
            let cb = (j >> s) & 1;
            for r in 0..2 {
                let v = m[(r, cb)];
                if v != Complex64::new(0.0, 0.0) {
                    let i = (j & !mask) | (r << s);
                    self.matrix[(i, j)] += v * coeff;
                }
            }
        }
    }

    fn add_pair(&mut self, coeff: f64, s: usize, ms: &Mat2, t: usize, mt: &Mat2) {
        if s == t {
            self.add_site(coeff, s, &(ms * mt));
            return;
        }
        let d = self.dim();
        let mask = (1usize << s) | (1usize << t);
        for j in 0..d {
            let (cs, ct) = ((j >> s) & 1, (j >> t) & 1);
            for rs in 0..2 {
                let vs = ms[(rs, cs)];
                if vs == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for rt in 0..2 {
                    let vt = mt[(rt, ct)];
                    if vt != Complex64::new(0.0, 0.0) {
                        let i = (j & !mask) | (rs << s) | (rt << t);
                        self.matrix[(i, j)] += vs * vt * coeff;
                    }
                }
            }
        }
    }
}

/// BCS Hamiltonian `H_{P,N}` of one plate.
pub fn plate_hamiltonian(spec: &LatticeSpec, plate: Plate) -> ManyBodyOperator {
    let eps = match plate {
        Plate::I => spec.params.plate_i.epsilon(),
        Plate::II => spec.params.plate_ii.epsilon(),
    };
    let pair = 1.0 / spec.sites_per_plate() as f64;
    let sites = spec.plate_sites(plate);
    let mut h = ManyBodyOperator::zeros(spec.dim());
    for &s in &sites {
        h.add_site(eps, s, &sigma_z());
        for &t in &sites {
            h.add_pair(-pair, s, &sigma_plus(), t, &sigma_minus());
        }
    }
    h
}

/// Tunnelling term `V_N` across the contact rows.
pub fn coupling(spec: &LatticeSpec) -> ManyBodyOperator {
    let g = spec.params.gamma() / spec.n as f64;
    let mut v = ManyBodyOperator::zeros(spec.dim());
    for &s in &spec.contact_sites(Plate::I) {
        for &t in &spec.contact_sites(Plate::II) {
            v.add_pair(-g, s, &sigma_plus(), t, &sigma_minus());
            v.add_pair(-g, s, &sigma_minus(), t, &sigma_plus());
        }
    }
    v
}

/// `H_N = H_I + H_II + V_N`.
pub fn build_hamiltonian(spec: &LatticeSpec) -> Result<ManyBodyOperator> {
    let mut h = plate_hamiltonian(spec, Plate::I).matrix;
    h += plate_hamiltonian(spec, Plate::II).matrix;
    h += coupling(spec).matrix;
    Ok(ManyBodyOperator::from_matrix(h))
}

/// Relative pair number `C_N = N_I − N_II`.
pub fn relative_number(spec: &LatticeSpec) -> ManyBodyOperator {
    let mut c = ManyBodyOperator::zeros(spec.dim());
    for &s in &spec.plate_sites(Plate::I) {
        c.add_site(1.0, s, &number());
    }
    for &s in &spec.plate_sites(Plate::II) {
        c.add_site(-1.0, s, &number());
    }
    c
}

/// Average over the sites of `region` of a one-site operator.
pub fn region_average(spec: &LatticeSpec, region: Region, m: &Mat2) -> Option<ManyBodyOperator> {
    let sites = spec.region_sites(region);
    if sites.is_empty() {
        return None;
    }
    let w = 1.0 / sites.len() as f64;
    let mut op = ManyBodyOperator::zeros(spec.dim());
    for &s in &sites {
        op.add_site(w, s, m);
    }
    Some(op)
}

/// Permutation operator exchanging sites `s` and `t`.
pub fn site_swap(spec: &LatticeSpec, s: usize, t: usize) -> ManyBodyOperator {
    let d = spec.dim();
    let mut p = ManyBodyOperator::zeros(d);
    for j in 0..d {
        let (bs, bt) = ((j >> s) & 1, (j >> t) & 1);
        let i = (j & !((1 << s) | (1 << t))) | (bt << s) | (bs << t);
        p.matrix[(i, j)] = Complex64::new(1.0, 0.0);
    }
    p
}

/// Tensor product of a one-site density per site.
pub fn product_state(
    spec: &LatticeSpec,
    site_state: impl Fn(usize) -> Density2,
) -> ManyBodyOperator {
    let d = spec.dim();
    let local: Vec<Mat2> = (0..spec.num_sites())
        .map(|s| site_state(s).matrix())
        .collect();
    let mut rho = ManyBodyOperator::zeros(d);
    for i in 0..d {
        for j in 0..d {
            let mut v = Complex64::new(1.0, 0.0);
            for (s, m) in local.iter().enumerate() {
                v *= m[((i >> s) & 1, (j >> s) & 1)];
                if v == Complex64::new(0.0, 0.0) {
                    break;
                }
            }
            rho.matrix[(i, j)] = v;
        }
    }
    rho
}

/// Product of the two plates' equilibrium one-site states.
pub fn initial_state(spec: &LatticeSpec) -> ManyBodyOperator {
    let p = &spec.params;
    let rho_i = equilibrium_state(&p.plate_i, p.phi_i()).rho;
    let rho_ii = equilibrium_state(&p.plate_ii, p.phi_ii()).rho;
    let per = spec.sites_per_plate();
    product_state(spec, |s| if s < per { rho_i } else { rho_ii })
}

fn real_part(m: &DMatrix<Complex64>) -> DMatrix<f64> {
    m.map(|z| z.re)
}

fn imag_part(m: &DMatrix<Complex64>) -> DMatrix<f64> {
    m.map(|z| z.im)
}

fn combine(re: DMatrix<f64>, im: DMatrix<f64>) -> DMatrix<Complex64> {
    re.zip_map(&im, Complex64::new)
}

/// Spectral data of `H_N` with a block-diagonal real eigenbasis.
#[derive(Debug, Clone)]
struct Eigenbasis {
    energies: Vec<f64>,
    vectors: DMatrix<f64>,
    /// Distinct levels (cluster means) and the level of each eigenvector.
    levels: Vec<f64>,
    level_of: Vec<u32>,
}

impl Eigenbasis {
    fn new(h: &ManyBodyOperator) -> Result<Self> {
        let d = h.dim();
        if h.matrix.iter().any(|z| z.im != 0.0) {
            return Err(domain("lattice Hamiltonian must be real"));
        }
        let hr = real_part(&h.matrix);
        let mut energies = vec![0.0; d];
        let mut vectors = DMatrix::zeros(d, d);
        let max_pop = d.trailing_zeros() as usize;
        let mut col = 0;
        for pop in 0..=max_pop {
            let idx: Vec<usize> = (0..d).filter(|i| i.count_ones() as usize == pop).collect();
            let m = idx.len();
            let block = DMatrix::from_fn(m, m, |a, b| hr[(idx[a], idx[b])]);
            let eig = block.symmetric_eigen();
            for c in 0..m {
                energies[col + c] = eig.eigenvalues[c];
                for (r, &i) in idx.iter().enumerate() {
                    vectors[(i, col + c)] = eig.eigenvectors[(r, c)];
                }
            }
            col += m;
        }
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| energies[a].total_cmp(&energies[b]));
        let mut level_of = vec![0u32; d];
        let mut members: Vec<Vec<usize>> = Vec::new();
        for (k, &a) in order.iter().enumerate() {
            if k == 0 || energies[a] - energies[order[k - 1]] > LEVEL_TOL {
                members.push(Vec::new());
            }
            level_of[a] = (members.len() - 1) as u32;
            members.last_mut().expect("pushed above").push(a);
        }
        let levels = members
            .iter()
            .map(|m| m.iter().map(|&a| energies[a]).sum::<f64>() / m.len() as f64)
            .collect();
        Ok(Self {
            energies,
            vectors,
            levels,
            level_of,
        })
    }

    /// `Uᵀ A U`.
    fn transform(&self, a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let u = &self.vectors;
        let ut = u.transpose();
        combine(&ut * real_part(a) * u, &ut * imag_part(a) * u)
    }

    /// `U A Uᵀ`.
    fn untransform(&self, a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let u = &self.vectors;
        let ut = u.transpose();
        combine(u * real_part(a) * &ut, u * imag_part(a) * &ut)
    }
}

/// `tr(ρ(t) A) = Σ_ab ρ̂_ab Â_ba e^{−i(E_a − E_b)t}`, with the terms summed
/// per pair of levels.
#[derive(Debug, Clone)]
struct Tracker {
    terms: Vec<(u32, u32, Complex64)>,
}

impl Tracker {
    fn new(basis: &Eigenbasis, rho_hat: &DMatrix<Complex64>, a_hat: &DMatrix<Complex64>) -> Self {
        let d = rho_hat.nrows();
        let nl = basis.levels.len();
        let mut grid = vec![Complex64::new(0.0, 0.0); nl * nl];
        let mut used = vec![false; nl * nl];
        for a in 0..d {
            for b in 0..d {
                let m = rho_hat[(a, b)] * a_hat[(b, a)];
                if m != Complex64::new(0.0, 0.0) {
                    let k = basis.level_of[a] as usize * nl + basis.level_of[b] as usize;
                    grid[k] += m;
                    used[k] = true;
                }
            }
        }
        let terms = (0..nl * nl)
            .filter(|&k| used[k])
            .map(|k| ((k / nl) as u32, (k % nl) as u32, grid[k]))
            .collect();
        Self { terms }
    }

    fn eval(&self, phases: &[Complex64]) -> Complex64 {
        self.terms
            .iter()
            .map(|&(a, b, m)| m * phases[a as usize] * phases[b as usize].conj())
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Part {
    Re,
    Im,
}

/// Exact propagation of a fixed observable set from an initial density.
///
/// Columns: per non-empty region `order_re_*`, `order_im_*` (the region
/// average of `σ⁻`, i.e. the order field) and `sz_*`; then `C` (relative pair
/// number), `current` (`i[H_N, C_N]`), `H_I`, `H_II` and `H`.
#[derive(Debug, Clone)]
pub struct Dynamics {
    basis: Eigenbasis,
    rho_hat: DMatrix<Complex64>,
    names: Vec<String>,
    columns: Vec<(usize, Part)>,
    trackers: Vec<Tracker>,
}

impl Dynamics {
    pub fn new(spec: &LatticeSpec, rho0: &ManyBodyOperator) -> Result<Self> {
        if rho0.dim() != spec.dim() {
            return Err(domain(format!(
                "initial state has dimension {}, expected {}",
                rho0.dim(),
                spec.dim()
            )));
        }
        let h_i = plate_hamiltonian(spec, Plate::I);
        let h_ii = plate_hamiltonian(spec, Plate::II);
        let h = build_hamiltonian(spec)?;
        let c = relative_number(spec);
        let hr = real_part(h.matrix());
        let cr = real_part(c.matrix());
        // i[H, C] with H and C real is purely imaginary
        let comm = &hr * &cr - &cr * &hr;
        let current = DMatrix::from_fn(spec.dim(), spec.dim(), |i, j| {
            Complex64::new(0.0, comm[(i, j)])
        });

        let basis = Eigenbasis::new(&h)?;
        let rho_hat = basis.transform(rho0.matrix());

        let mut ops: Vec<DMatrix<Complex64>> = Vec::new();
        let mut names = Vec::new();
        let mut columns = Vec::new();
        for region in Region::ALL {
            if let Some(op) = region_average(spec, region, &sigma_minus()) {
                ops.push(op.matrix);
                names.push(format!("order_re_{}", region.label()));
                columns.push((ops.len() - 1, Part::Re));
                names.push(format!("order_im_{}", region.label()));
                columns.push((ops.len() - 1, Part::Im));
            }
            if let Some(op) = region_average(spec, region, &sigma_z()) {
                ops.push(op.matrix);
                names.push(format!("sz_{}", region.label()));
                columns.push((ops.len() - 1, Part::Re));
            }
        }
        for (name, op) in [
            ("C", c.matrix),
            ("current", current),
            ("H_I", h_i.matrix),
            ("H_II", h_ii.matrix),
            ("H", h.matrix),
        ] {
            ops.push(op);
            names.push(name.to_string());
            columns.push((ops.len() - 1, Part::Re));
        }

        let trackers = ops
            .iter()
            .map(|op| Tracker::new(&basis, &rho_hat, &basis.transform(op)))
            .collect();
        Ok(Self {
            basis,
            rho_hat,
            names,
            columns,
            trackers,
        })
    }

    pub fn observable_names(&self) -> &[String] {
        &self.names
    }

    pub fn energies(&self) -> &[f64] {
        &self.basis.energies
    }

    fn phases(energies: &[f64], t: f64) -> Vec<Complex64> {
        energies
            .iter()
            .map(|&e| Complex64::from_polar(1.0, -e * t))
            .collect()
    }

    /// All observables at time `t`, in [`Self::observable_names`] order.
    pub fn expectations(&self, t: f64) -> Vec<f64> {
        let p = Self::phases(&self.basis.levels, t);
        let vals: Vec<Complex64> = self.trackers.iter().map(|tr| tr.eval(&p)).collect();
        self.columns
            .iter()
            .map(|&(k, part)| match part {
                Part::Re => vals[k].re,
                Part::Im => vals[k].im,
            })
            .collect()
    }

    pub fn value(&self, name: &str, t: f64) -> Option<f64> {
        let idx = self.names.iter().position(|n| n == name)?;
        Some(self.expectations(t)[idx])
    }

    /// `ρ(t) = e^{−iHt} ρ₀ e^{iHt}`.
    pub fn state_at(&self, t: f64) -> ManyBodyOperator {
        let p = Self::phases(&self.basis.energies, t);
        let d = p.len();
        let evolved = DMatrix::from_fn(d, d, |a, b| self.rho_hat[(a, b)] * p[a] * p[b].conj());
        ManyBodyOperator::from_matrix(self.basis.untransform(&evolved))
    }

    /// Samples on the uniform grid `t_k = k·t_max/steps`, `k = 0..=steps`.
    pub fn trajectory(&self, t_max: f64, steps: usize) -> Result<Trajectory> {
        if !(t_max.is_finite() && t_max > 0.0) {
            return Err(domain(format!("t_max must be finite and > 0, got {t_max}")));
        }
        if steps == 0 {
            return Err(domain("steps must be >= 1"));
        }
        let dt = t_max / steps as f64;
        let times: Vec<f64> = (0..=steps).map(|k| k as f64 * dt).collect();
        let mut columns = vec![Vec::with_capacity(times.len()); self.names.len()];
        for &t in &times {
            for (col, v) in columns.iter_mut().zip(self.expectations(t)) {
                col.push(v);
            }
        }
        Ok(Trajectory {
            times,
            names: self.names.clone(),
            columns,
        })
    }
}

/// Observable expectations on a uniform time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub names: Vec<String>,
    /// One column per name, aligned with `times`.
    pub columns: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn column(&self, name: &str) -> Option<&[f64]> {
        let idx = self.names.iter().position(|n| n == name)?;
        Some(&self.columns[idx])
    }

    pub fn t_max(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0)
    }

    /// `max_t |⟨H⟩(t) − ⟨H⟩(0)|`.
    pub fn energy_drift(&self) -> f64 {
        let h = self.column("H").unwrap_or(&[]);
        h.iter().map(|&e| (e - h[0]).abs()).fold(0.0, f64::max)
    }
}

/// Evolves `rho0` under `H_N` and samples the observable set.
pub fn evolve(
    spec: &LatticeSpec,
    rho0: &ManyBodyOperator,
    t_max: f64,
    steps: usize,
) -> Result<Trajectory> {
    Dynamics::new(spec, rho0)?.trajectory(t_max, steps)
}

/// Trapezoidal time averages `(1/T)∫₀ᵀ ⟨A⟩ dt`, one per trajectory column.
pub fn cesaro_average(traj: &Trajectory) -> Result<Vec<(String, f64)>> {
    let t_max = traj.t_max();
    if t_max < MIN_AVERAGING_TIME || traj.times.len() < 2 {
        return Err(Error::InsufficientTrajectory {
            t_max,
            required: MIN_AVERAGING_TIME,
        });
    }
    Ok(traj
        .names
        .iter()
        .zip(&traj.columns)
        .map(|(name, col)| {
            let integral: f64 = traj
                .times
                .windows(2)
                .zip(col.windows(2))
                .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1]))
                .sum();
            (name.clone(), integral / t_max)
        })
        .collect())
}

fn hermitian_log(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let eig = m.clone().symmetric_eigen();
    let logs = eig
        .eigenvalues
        .map(|p| Complex64::new(p.max(f64::MIN_POSITIVE).ln(), 0.0));
    let v = &eig.eigenvectors;
    v * DMatrix::from_diagonal(&logs) * v.adjoint()
}

/// `−i tr(ρ [H_N, log ρ_I ⊗ 1 + 1 ⊗ log ρ_II])` with `ρ_I`, `ρ_II` the
/// plate restrictions of `rho`. Vanishes whenever `rho` is a product over
/// the two plates.
pub fn partition_entropy_rate(
    spec: &LatticeSpec,
    h: &ManyBodyOperator,
    rho: &ManyBodyOperator,
) -> f64 {
    let half = 1usize << spec.sites_per_plate();
    let r = rho.matrix();
    let rho_i = DMatrix::from_fn(half, half, |a, b| {
        (0..half)
            .map(|c| r[(a + c * half, b + c * half)])
            .sum::<Complex64>()
    });
    let rho_ii = DMatrix::from_fn(half, half, |a, b| {
        (0..half)
            .map(|c| r[(c + a * half, c + b * half)])
            .sum::<Complex64>()
    });
    let (li, lii) = (hermitian_log(&rho_i), hermitian_log(&rho_ii));
    let d = spec.dim();
    let l = DMatrix::from_fn(d, d, |i, j| {
        let (ai, ci) = (i % half, i / half);
        let (aj, cj) = (j % half, j / half);
        let mut v = Complex64::new(0.0, 0.0);
        if ci == cj {
            v += li[(ai, aj)];
        }
        if ai == aj {
            v += lii[(ci, cj)];
        }
        v
    });
    let hm = h.matrix();
    let comm = hm * &l - &l * hm;
    (-Complex64::i() * (r * comm).trace()).re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::PlateParams;
    use crate::spin::Hermitian2;

    fn spec(n: usize, gamma: f64) -> LatticeSpec {
        let p = PlateParams::new(0.25, 4.0).unwrap();
        LatticeSpec::new(n, JunctionParams::new(p, p, gamma, 0.0, 1.2).unwrap()).unwrap()
    }

    fn max_abs(m: &DMatrix<Complex64>) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn dimension_guard() {
        let p = PlateParams::new(0.25, 4.0).unwrap();
        let j = JunctionParams::symmetric(p, 0.5, 0.0).unwrap();
        assert!(matches!(
            LatticeSpec::new(3, j),
            Err(Error::DimensionGuard(3))
        ));
        assert!(LatticeSpec::new(0, j).is_err());
        assert_eq!(LatticeSpec::new(2, j).unwrap().dim(), 256);
    }

    #[test]
    fn regions_follow_contact_rows() {
        let s = spec(2, 0.5);
        assert_eq!(s.region_sites(Region::Ib), vec![0, 1]);
        assert_eq!(s.region_sites(Region::Ia), vec![2, 3]);
        assert_eq!(s.region_sites(Region::IIb), vec![4, 5]);
        assert_eq!(s.region_sites(Region::IIa), vec![6, 7]);
        let one = spec(1, 0.5);
        assert!(one.region_sites(Region::Ia).is_empty());
        assert_eq!(one.region_sites(Region::IIb), vec![1]);
    }

    #[test]
    fn single_site_plates() {
        let s = spec(1, 0.5);
        let h = build_hamiltonian(&s).unwrap();
        assert_eq!(h.dim(), 4);
        // V_1 = −γ(σ⁺_I σ⁻_II + σ⁻_I σ⁺_II): |occ, empty⟩ ↔ |empty, occ⟩
        // bit 0 = plate I, value 0 = occupied: |occ_I, empty_II⟩ = index 2
        let v = coupling(&s);
        assert_eq!(v.matrix()[(2, 1)], Complex64::new(-0.5, 0.0));
        assert_eq!(v.matrix()[(1, 2)], Complex64::new(-0.5, 0.0));
        assert_eq!(max_abs(&(v.matrix() - &v.matrix().adjoint())), 0.0);
        // plate term at N = 1: εσᶻ − σ⁺σ⁻
        let hi = plate_hamiltonian(&s, Plate::I);
        assert_eq!(hi.matrix()[(0, 0)], Complex64::new(0.25 - 1.0, 0.0));
        assert_eq!(hi.matrix()[(1, 1)], Complex64::new(-0.25, 0.0));
    }

    #[test]
    fn decoupled_spectrum_is_sum_of_plate_spectra() {
        let s = spec(1, 0.0);
        let basis = Eigenbasis::new(&build_hamiltonian(&s).unwrap()).unwrap();
        let mut e = basis.energies.clone();
        e.sort_by(f64::total_cmp);
        // each plate: εσᶻ − n has levels ε − 1 (occupied) and −ε (empty)
        let levels = [0.25 - 1.0, -0.25];
        let mut expected: Vec<f64> = levels
            .iter()
            .flat_map(|a| levels.iter().map(move |b| a + b))
            .collect();
        expected.sort_by(f64::total_cmp);
        for (a, b) in e.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn hamiltonian_hermitian_and_row_symmetric() {
        let s = spec(2, 0.5);
        let h = build_hamiltonian(&s).unwrap();
        assert!(h.hermiticity_residual() < 1e-13);
        let swap = site_swap(&s, s.site(Plate::I, 0, 0), s.site(Plate::I, 1, 0));
        assert!(swap.commutator_norm(&h) < 1e-12);
        // contact and bulk sites are not interchangeable once γ > 0
        let mixed = site_swap(&s, s.site(Plate::I, 0, 0), s.site(Plate::I, 0, 1));
        assert!(mixed.commutator_norm(&h) > 1e-3);
    }

    #[test]
    fn eigenbasis_diagonalizes() {
        let s = spec(2, 0.5);
        let h = build_hamiltonian(&s).unwrap();
        let basis = Eigenbasis::new(&h).unwrap();
        let hd = basis.transform(h.matrix());
        for a in 0..hd.nrows() {
            assert!((hd[(a, a)].re - basis.energies[a]).abs() < 1e-12);
        }
        let off = hd.clone() - DMatrix::from_diagonal(&hd.diagonal());
        assert!(max_abs(&off) < 1e-12);
    }

    #[test]
    fn initial_state_is_product() {
        let s = spec(1, 0.5);
        let rho = initial_state(&s);
        assert!((rho.trace() - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        let eq = equilibrium_state(&s.params.plate_i, 0.0).rho;
        let eq2 = equilibrium_state(&s.params.plate_ii, 1.2).rho;
        let purity = rho.expect(&rho).re;
        assert!((purity - eq.purity() * eq2.purity()).abs() < 1e-14);
        // coherence ⟨occ_I empty_II | ρ | empty_I empty_II⟩ = ρ_I[0][1] ρ_II[1][1]
        let v = rho.matrix()[(2, 3)];
        let expected = eq.matrix()[(0, 1)] * eq2.matrix()[(1, 1)];
        assert!((v - expected).norm() < 1e-15);
        let eig = rho.matrix().clone().symmetric_eigen();
        assert!(eig.eigenvalues.iter().all(|&p| p > -1e-14));
    }

    #[test]
    fn normal_initial_state_is_diagonal() {
        let p = PlateParams::new(0.25, 1.0).unwrap();
        let s = LatticeSpec::new(2, JunctionParams::symmetric(p, 0.5, 0.4).unwrap()).unwrap();
        let rho = initial_state(&s);
        let off = rho.matrix().clone() - DMatrix::from_diagonal(&rho.matrix().diagonal());
        assert_eq!(max_abs(&off), 0.0);
    }

    #[test]
    fn evolved_state_stays_unitary() {
        let s = spec(1, 0.5);
        let dyn_ = Dynamics::new(&s, &initial_state(&s)).unwrap();
        let spectrum = |m: &ManyBodyOperator| {
            let mut e: Vec<f64> = m
                .matrix()
                .clone()
                .symmetric_eigen()
                .eigenvalues
                .iter()
                .copied()
                .collect();
            e.sort_by(f64::total_cmp);
            e
        };
        let e0 = spectrum(&dyn_.state_at(0.0));
        for t in [1.0, 17.3, 250.0] {
            let rt = dyn_.state_at(t);
            assert!((rt.trace() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
            for (a, b) in spectrum(&rt).iter().zip(&e0) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn decoupled_plates_evolve_independently() {
        let p = PlateParams::new(0.25, 4.0).unwrap();
        let q = PlateParams::new(0.1, 7.0).unwrap();
        let a = LatticeSpec::new(1, JunctionParams::new(p, p, 0.0, 0.0, 1.0).unwrap()).unwrap();
        let b = LatticeSpec::new(1, JunctionParams::new(p, q, 0.0, 0.0, 2.0).unwrap()).unwrap();
        let ta = evolve(&a, &initial_state(&a), 50.0, 200).unwrap();
        let tb = evolve(&b, &initial_state(&b), 50.0, 200).unwrap();
        for name in ["order_re_Ib", "order_im_Ib", "sz_Ib", "H_I"] {
            let (ca, cb) = (ta.column(name).unwrap(), tb.column(name).unwrap());
            for (x, y) in ca.iter().zip(cb) {
                assert!((x - y).abs() < 1e-12, "{name}");
            }
        }
    }

    #[test]
    fn expectations_match_dense_trace() {
        let s = spec(1, 0.7);
        let dyn_ = Dynamics::new(&s, &initial_state(&s)).unwrap();
        let t = 3.7;
        let rho_t = dyn_.state_at(t);
        let c = relative_number(&s);
        assert!((rho_t.expect(&c).re - dyn_.value("C", t).unwrap()).abs() < 1e-12);
        let sz = region_average(&s, Region::IIb, &sigma_z()).unwrap();
        assert!((rho_t.expect(&sz).re - dyn_.value("sz_IIb", t).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn short_trajectory_rejected() {
        let s = spec(1, 0.5);
        let traj = evolve(&s, &initial_state(&s), 50.0, 100).unwrap();
        assert!(matches!(
            cesaro_average(&traj),
            Err(Error::InsufficientTrajectory { .. })
        ));
        assert!(evolve(&s, &initial_state(&s), 0.0, 10).is_err());
        assert!(evolve(&s, &initial_state(&s), 10.0, 0).is_err());
    }

    #[test]
    fn partition_rate_vanishes_on_product_states() {
        let s = spec(1, 0.5);
        let h = build_hamiltonian(&s).unwrap();
        let rho0 = initial_state(&s);
        assert!(partition_entropy_rate(&s, &h, &rho0).abs() < 1e-12);
        // the evolved state correlates the plates and the rate is generally nonzero
        let dyn_ = Dynamics::new(&s, &rho0).unwrap();
        let rate = partition_entropy_rate(&s, &h, &dyn_.state_at(2.0));
        assert!(rate.abs() > 1e-6, "rate {rate}");
    }

    #[test]
    fn product_state_from_arbitrary_sites() {
        let s = spec(1, 0.5);
        let a = crate::spin::Density2::new(Hermitian2::new(0.3, 0.7, Complex64::new(0.1, -0.2)))
            .unwrap();
        let rho = product_state(&s, |_| a);
        assert!((rho.trace().re - 1.0).abs() < 1e-15);
        assert!(rho.hermiticity_residual() < 1e-16);
    }
}
