//! Harmonically confined 1D crystal.
//!
//! Lengths are in a₀, energies in U_dd, frequencies in U_dd/ħ, the mass is γ.
//! A trap of stiffness k = γν̃² holds N molecules; [`TrappedCrystal::natural`]
//! picks k so that the analytic center density is exactly 1/a₀.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::homogeneous::{f_1d, zigzag_constant, ZIGZAG_CONSTANT_PUBLISHED};
use crate::lifetime::thermal_factor;
use crate::linalg::sym_eigen;
use crate::specfun::{composite_rule, lambda_trap, zeta3, zeta5};
use crate::{Error, Result};

/// Largest crystal accepted by the dense solvers.
pub const MAX_N: usize = 2000;

/// Gradient tolerance of the equilibrium solver.
pub const FORCE_TOLERANCE: f64 = 1e-10;

const MAX_NEWTON: usize = 100;

/// Debye constant α_D = √(93ζ(5)/2) of the homogeneous chain.
pub fn alpha_debye() -> f64 {
    (46.5 * zeta5()).sqrt()
}

/// Prefactor (27/(62ζ(5)))^{1/4} of the coupling tensor.
pub fn coupling_prefactor() -> f64 {
    (27.0 / (62.0 * zeta5())).powf(0.25)
}

/// Analytic density n(x) = n(0)(1 − 4x²/L²)^{1/3}.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DensityProfile {
    pub n: usize,
    /// Trap stiffness k = γν̃² [U_dd/a₀²].
    pub k: f64,
    pub n0: f64,
    pub length: f64,
}

impl DensityProfile {
    pub fn new(n: usize, k: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain("need at least two molecules"));
        }
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::domain("trap stiffness must be positive"));
        }
        let lam = lambda_trap();
        let nf = n as f64;
        let n0 = lam.powf(0.4) * nf.powf(0.4) * k.powf(0.2) / (2.0 * zeta3().powf(0.2));
        Ok(Self { n, k, n0, length: lam * nf / n0 })
    }

    pub fn density(&self, x: f64) -> f64 {
        let u = 2.0 * x / self.length;
        if u.abs() >= 1.0 {
            0.0
        } else {
            self.n0 * (1.0 - u * u).cbrt()
        }
    }

    /// Number of molecules left of `x`, ∫_{−L/2}^{x} n.
    pub fn cumulative(&self, x: f64) -> f64 {
        let t = (0.5 + x / self.length).clamp(0.0, 1.0);
        self.n as f64 * statrs::function::beta::beta_reg(4.0 / 3.0, 4.0 / 3.0, t)
    }

    /// Position where the cumulative count equals `count`.
    pub fn inverse_cumulative(&self, count: f64) -> f64 {
        let (mut a, mut b) = (-0.5 * self.length, 0.5 * self.length);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if self.cumulative(m) < count {
                a = m;
            } else {
                b = m;
            }
            if b - a < 1e-14 * self.length {
                break;
            }
        }
        0.5 * (a + b)
    }
}

/// Center density in SI [1/m] for mass [kg], angular trap frequency [rad/s]
/// and C3 = μ²/(4πε₀) [J m³].
pub fn center_density_si(n: usize, mass: f64, nu: f64, c3: f64) -> f64 {
    let lam = lambda_trap();
    lam.powf(0.4) * (n as f64).powf(0.4) * (mass * nu * nu / c3).powf(0.2) / (2.0 * zeta3().powf(0.2))
}

#[derive(Debug, Clone, Serialize)]
pub struct TrappedCrystal {
    pub n: usize,
    pub nu_tilde: f64,
    pub gamma: f64,
    /// Equilibrium positions, ascending.
    pub positions: Vec<f64>,
    /// Analytic length L.
    pub length: f64,
    /// Analytic center density n(0).
    pub n0: f64,
    /// Max force on any molecule after symmetrization.
    pub residual: f64,
    pub iterations: usize,
}

fn energy(x: &[f64], k: f64) -> f64 {
    let mut e = 0.5 * k * x.iter().map(|v| v * v).sum::<f64>();
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            e += 1.0 / (x[j] - x[i]).powi(3);
        }
    }
    e
}

fn gradient(x: &[f64], k: f64) -> Vec<f64> {
    let n = x.len();
    crate::par::map_range(n, |i| {
        let mut g = k * x[i];
        for j in 0..n {
            if j != i {
                let d = x[i] - x[j];
                g -= 3.0 * d.signum() / d.powi(4);
            }
        }
        g
    })
}

/// Hessian of the potential energy; this is also γ times the longitudinal
/// dynamical matrix.
fn hessian(x: &[f64], k: f64) -> DMatrix<f64> {
    let n = x.len();
    let mut h = DMatrix::zeros(n, n);
    for i in 0..n {
        let mut diag = k;
        for j in 0..n {
            if j != i {
                let c = 12.0 / (x[i] - x[j]).abs().powi(5);
                h[(i, j)] = -c;
                diag += c;
            }
        }
        h[(i, i)] = diag;
    }
    h
}

/// Laplacian-like matrix Σ_l 1/|d|⁵ on the diagonal, −1/|d|⁵ off it.
fn transverse_laplacian(x: &[f64]) -> DMatrix<f64> {
    let n = x.len();
    let mut h = DMatrix::zeros(n, n);
    for i in 0..n {
        let mut diag = 0.0;
        for j in 0..n {
            if j != i {
                let c = 1.0 / (x[i] - x[j]).abs().powi(5);
                h[(i, j)] = -c;
                diag += c;
            }
        }
        h[(i, i)] = diag;
    }
    h
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Minimizes ½γν̃²Σx² + Σ_{i<j}|x_i − x_j|⁻³ by damped Newton starting from
/// the inverted analytic density.
pub fn equilibrium_positions(n: usize, nu_tilde: f64, gamma: f64) -> Result<TrappedCrystal> {
    if n < 2 {
        return Err(Error::domain("need at least two molecules"));
    }
    if n > MAX_N {
        return Err(Error::domain(format!("N = {n} exceeds the dense-solver cap {MAX_N}")));
    }
    if !(nu_tilde > 0.0 && nu_tilde.is_finite()) {
        return Err(Error::domain("nu_tilde must be positive"));
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::domain("gamma must be positive"));
    }
    let k = gamma * nu_tilde * nu_tilde;
    let profile = DensityProfile::new(n, k)?;
    let mut x: Vec<f64> = (0..n).map(|i| profile.inverse_cumulative(i as f64 + 0.5)).collect();
    symmetrize(&mut x);
    let mut e = energy(&x, k);
    let mut g = gradient(&x, k);
    let mut iterations = 0;
    while max_abs(&g) >= 0.1 * FORCE_TOLERANCE {
        if iterations >= MAX_NEWTON {
            return Err(Error::Convergence {
                what: "equilibrium positions",
                detail: format!("max force {:.3e} after {iterations} Newton steps", max_abs(&g)),
            });
        }
        iterations += 1;
        let h = hessian(&x, k);
        let rhs = DVector::from_iterator(n, g.iter().map(|v| -v));
        let step = match h.cholesky() {
            Some(ch) => ch.solve(&rhs),
            None => rhs,
        };
        let mut t = 1.0;
        loop {
            let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, b)| a + t * b).collect();
            let ordered = trial.windows(2).all(|w| w[1] > w[0]);
            if ordered {
                let et = energy(&trial, k);
                if et <= e + 1e-12 * e.abs() || t < 1e-3 {
                    x = trial;
                    e = et;
                    break;
                }
            }
            t *= 0.5;
            if t < 1e-12 {
                return Err(Error::Convergence { what: "equilibrium positions", detail: "line search failed".into() });
            }
        }
        g = gradient(&x, k);
    }
    symmetrize(&mut x);
    let residual = max_abs(&gradient(&x, k));
    if residual >= FORCE_TOLERANCE {
        return Err(Error::Convergence {
            what: "equilibrium positions",
            detail: format!("residual {residual:.3e} after symmetrization"),
        });
    }
    Ok(TrappedCrystal {
        n,
        nu_tilde,
        gamma,
        positions: x,
        length: profile.length,
        n0: profile.n0,
        residual,
        iterations,
    })
}

fn symmetrize(x: &mut [f64]) {
    let n = x.len();
    let y: Vec<f64> = (0..n).map(|i| 0.5 * (x[i] - x[n - 1 - i])).collect();
    x.copy_from_slice(&y);
}

impl TrappedCrystal {
    /// Crystal whose analytic center density is 1/a₀ for the given γ.
    pub fn natural(n: usize, gamma: f64) -> Result<Self> {
        let nu = crate::scales::trap_frequency_relation(gamma, n)?;
        equilibrium_positions(n, nu, gamma)
    }

    pub fn stiffness(&self) -> f64 {
        self.gamma * self.nu_tilde * self.nu_tilde
    }

    pub fn profile(&self) -> DensityProfile {
        DensityProfile { n: self.n, k: self.stiffness(), n0: self.n0, length: self.length }
    }

    /// Potential-energy Hessian at equilibrium.
    pub fn hessian(&self) -> DMatrix<f64> {
        hessian(&self.positions, self.stiffness())
    }

    /// Largest deviation of the positions from the inverted analytic
    /// cumulative density, in units of the local spacing.
    pub fn profile_deviation(&self) -> Vec<f64> {
        let p = self.profile();
        let x = &self.positions;
        (0..self.n)
            .map(|i| {
                let target = p.inverse_cumulative(i as f64 + 0.5);
                let spacing = if i + 1 < self.n { x[i + 1] - x[i] } else { x[i] - x[i - 1] };
                (x[i] - target).abs() / spacing
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeKind {
    Exciton,
    PhononLong,
    PhononY,
    PhononZ,
}

impl ModeKind {
    /// Prefactor α of the transverse couplings (1 for y, 3 for z).
    fn transverse_alpha(self) -> Option<f64> {
        match self {
            ModeKind::PhononY => Some(1.0),
            ModeKind::PhononZ => Some(3.0),
            _ => None,
        }
    }
}

/// Long- and short-wavelength asymptotic spectra aligned with the
/// eigenvalues of a [`ModeBasis`].
#[derive(Debug, Clone, Serialize)]
pub struct Overlay {
    pub long_wavelength: Vec<f64>,
    pub short_wavelength: Vec<f64>,
    /// Short-wavelength slope constant fitted to the lowest modes of a
    /// transverse branch.
    pub sw_constant_fit: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModeBasis {
    pub kind: ModeKind,
    /// Exciton energies in κU_dd, or phonon ω in U_dd/ħ. An unstable
    /// phonon mode with ω² < 0 is reported as −√|ω²|.
    pub eigenvalues: Vec<f64>,
    /// Phonon ω² (empty for excitons).
    pub omega2: Vec<f64>,
    /// Column `m` holds the mode function of eigenvalue `m`.
    #[serde(skip)]
    pub modes: DMatrix<f64>,
    pub unstable: bool,
    pub overlay: Overlay,
}

fn signed_sqrt(v: f64) -> f64 {
    if v >= 0.0 {
        v.sqrt()
    } else {
        -(-v).sqrt()
    }
}

impl ModeBasis {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn mode(&self, idx: usize) -> Vec<f64> {
        self.modes.column(idx).iter().copied().collect()
    }

    /// Max deviation of CᵀC from the identity.
    pub fn orthonormality_error(&self) -> f64 {
        let g = self.modes.transpose() * &self.modes;
        let n = g.nrows();
        let mut e: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let t = if i == j { 1.0 } else { 0.0 };
                e = e.max((g[(i, j)] - t).abs());
            }
        }
        e
    }
}

/// Dense solve of the exciton hopping matrix 1/|x_i − x_j|³ (zero diagonal).
/// Energies are in units of κU_dd.
pub fn exciton_modes_trapped(crystal: &TrappedCrystal) -> ModeBasis {
    let x = &crystal.positions;
    let n = x.len();
    let m = DMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { 1.0 / (x[i] - x[j]).abs().powi(3) });
    let eig = sym_eigen(m);
    let nf = n as f64;
    let lam = lambda_trap();
    let z3 = zeta3();
    let a = 4.0 * z3.sqrt() / lam;
    let b_n = 3.0 + (lam * ((nf / 2.0).ln() / (32.0 * z3)).sqrt()).ln();
    let sw_slope = (24.0 * z3 * 2f64.ln()).sqrt() / lam;
    let long_wavelength = (0..n)
        .map(|idx| {
            let nn = (n - idx) as f64 - 0.5;
            2.0 * z3 - a * (b_n + (nf / nn).ln()).sqrt() * nn / nf
        })
        .collect();
    let short_wavelength = (0..n).map(|idx| -1.5 * z3 + sw_slope * (idx as f64 + 0.5) / nf).collect();
    ModeBasis {
        kind: ModeKind::Exciton,
        eigenvalues: eig.values,
        omega2: Vec::new(),
        modes: eig.vectors,
        unstable: false,
        overlay: Overlay { long_wavelength, short_wavelength, sw_constant_fit: None },
    }
}

/// Published short-wavelength constant of the transverse branches.
pub const TRANSVERSE_SW_CONSTANT_PUBLISHED: f64 = 2.055;

/// Phonon normal modes. `nu_perp_tilde` is ignored for the longitudinal
/// branch.
pub fn phonon_modes_trapped(crystal: &TrappedCrystal, kind: ModeKind, nu_perp_tilde: f64) -> Result<ModeBasis> {
    let gamma = crystal.gamma;
    let n = crystal.n;
    let nf = n as f64;
    let x = &crystal.positions;
    let (eig, overlay) = match kind {
        ModeKind::Exciton => return Err(Error::domain("exciton modes are not a phonon branch")),
        ModeKind::PhononLong => {
            let eig = sym_eigen(crystal.hessian() / gamma);
            let nu = crystal.nu_tilde;
            let lam = lambda_trap();
            let beta = 31.0 * zeta5() * lam * lam / (24.0 * zeta3());
            let omega_d = nu * nf * (9.0 * beta / 8.0).sqrt();
            let slope = (5.0 / (3.0 * beta)).sqrt();
            let lw = (0..n)
                .map(|idx| {
                    let m = (idx + 1) as f64;
                    nu * (1.0 + (3.0 * m * m - m - 2.0) / 2.0).sqrt()
                })
                .collect();
            let sw = (0..n)
                .map(|idx| {
                    let mbar = (n - 1 - idx) as f64;
                    omega_d * (1.0 - slope * (mbar + 0.5) / nf)
                })
                .collect();
            (eig, Overlay { long_wavelength: lw, short_wavelength: sw, sw_constant_fit: None })
        }
        ModeKind::PhononY | ModeKind::PhononZ => {
            if !(nu_perp_tilde >= 0.0 && nu_perp_tilde.is_finite()) {
                return Err(Error::domain("nu_perp_tilde must be non-negative"));
            }
            let alpha = kind.transverse_alpha().expect("transverse kind");
            let nu2 = nu_perp_tilde * nu_perp_tilde;
            let lap = transverse_laplacian(x);
            let m = DMatrix::identity(n, n) * nu2 - lap * (3.0 * alpha / gamma);
            let eig = sym_eigen(m);
            let a = 93.0 * zeta5() / 8.0;
            let lw = (0..n)
                .map(|idx| {
                    let m = (n - idx) as f64;
                    signed_sqrt(nu2 - alpha * (4.0 * zeta3() / gamma) * (3.0 * m * m - m - 2.0) / (nf * nf))
                })
                .collect();
            let sw = (0..n)
                .map(|idx| {
                    let s = (idx as f64 + 0.5) / nf;
                    signed_sqrt(nu2 - a * alpha / gamma * (1.0 - TRANSVERSE_SW_CONSTANT_PUBLISHED * s))
                })
                .collect();
            // Least squares for B in (ν⊥² − ω²)γ/(Aα) = 1 − B s over the
            // lowest 5% of the band.
            let cnt = (n / 20).max(2).min(n);
            let (mut num, mut den) = (0.0, 0.0);
            for idx in 0..cnt {
                let s = (idx as f64 + 0.5) / nf;
                let y = 1.0 - (nu2 - eig.values[idx]) * gamma / (a * alpha);
                num += s * y;
                den += s * s;
            }
            (eig, Overlay { long_wavelength: lw, short_wavelength: sw, sw_constant_fit: Some(num / den) })
        }
    };
    let unstable = eig.values.iter().any(|&w2| w2 < 0.0);
    Ok(ModeBasis {
        kind,
        eigenvalues: eig.values.iter().map(|&w2| signed_sqrt(w2)).collect(),
        omega2: eig.values,
        modes: eig.vectors,
        unstable,
        overlay,
    })
}

/// K_ij = sign(x_i − x_j)/|x_i − x_j|⁴, zero diagonal.
fn coupling_kernel(x: &[f64]) -> DMatrix<f64> {
    let n = x.len();
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            0.0
        } else {
            let d = x[i] - x[j];
            d.signum() / d.powi(4)
        }
    })
}

/// A^m_ij = K_ij (c_m(i) − c_m(j)).
fn kernel_for_mode(k: &DMatrix<f64>, c: &[f64]) -> DMatrix<f64> {
    let n = c.len();
    DMatrix::from_fn(n, n, |i, j| k[(i, j)] * (c[i] - c[j]))
}

/// Slices 𝓜(m, ·, ·) of the exciton-phonon coupling tensor for selected
/// longitudinal modes m (1-based, m = 1 is the center-of-mass mode).
#[derive(Debug, Clone)]
pub struct CouplingTensor {
    pub m: Vec<usize>,
    pub slices: Vec<DMatrix<f64>>,
}

impl CouplingTensor {
    pub fn get(&self, m: usize, n: usize, n_prime: usize) -> Option<f64> {
        let pos = self.m.iter().position(|&v| v == m)?;
        Some(self.slices[pos][(n, n_prime)])
    }
}

/// 𝓜(m,n,n′) = c₀√(N/m) Σ_{i≠j} K_ij (c_m(i) − c_m(j)) C_n(i) C_{n′}(j),
/// with c₀ = (27/(62ζ(5)))^{1/4}. The physical matrix element is
/// −κU_dd γ^{-1/4} 𝓜.
pub fn coupling_matrix_trapped(
    crystal: &TrappedCrystal,
    excitons: &ModeBasis,
    phonons: &ModeBasis,
    modes: &[usize],
) -> Result<CouplingTensor> {
    if excitons.kind != ModeKind::Exciton || phonons.kind != ModeKind::PhononLong {
        return Err(Error::domain("need an exciton basis and a longitudinal phonon basis"));
    }
    let n = crystal.n;
    if excitons.len() != n || phonons.len() != n {
        return Err(Error::domain("bases do not match the crystal"));
    }
    if let Some(&bad) = modes.iter().find(|&&m| m == 0 || m > n) {
        return Err(Error::domain(format!("phonon index {bad} outside 1..={n}")));
    }
    let k = coupling_kernel(&crystal.positions);
    let c0 = coupling_prefactor();
    let cx = &excitons.modes;
    let slices = crate::par::map_slice(modes, |&m| {
        let a = kernel_for_mode(&k, &phonons.mode(m - 1));
        (cx.transpose() * a * cx) * (c0 * (n as f64 / m as f64).sqrt())
    });
    Ok(CouplingTensor { m: modes.to_vec(), slices })
}

/// Normalizes a mode shape sampled at the molecules.
pub fn normalized_overlap(u: &[f64]) -> Result<Vec<f64>> {
    let norm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(norm > 0.0) {
        return Err(Error::domain("mode shape vanishes on every molecule"));
    }
    Ok(u.iter().map(|v| v / norm).collect())
}

/// Variance of the exciton spectrum (units of κ) in the state Σ_i u_i|i⟩.
pub fn exciton_integral(excitons: &ModeBasis, u: &[f64]) -> Result<f64> {
    let u = normalized_overlap(u)?;
    let z = excitons.modes.transpose() * DVector::from_vec(u);
    let (mut m1, mut m2) = (0.0, 0.0);
    for (e, zn) in excitons.eigenvalues.iter().zip(z.iter()) {
        let w = zn * zn;
        m1 += e * w;
        m2 += e * e * w;
    }
    Ok((m2 - m1 * m1).max(0.0))
}

/// Phonon spectrum entering thermal factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PhononSpectrum {
    /// Dense-solve frequencies.
    Exact,
    /// ω(m) = ω_D m/N.
    SoundWave,
}

/// Phonon contribution to the inhomogeneous width,
/// Σ_m ‖𝓜_m z‖² (2N(ω_m) + 1), with z the exciton amplitudes of u.
///
/// ‖𝓜_m z‖² = c₀²(N/m)‖A^m u‖², so no exciton transform is needed. With
/// [`PhononSpectrum::Exact`] the sound-wave zero-point amplitude inside 𝓜
/// is replaced by the exact one.
pub fn phonon_integral(
    crystal: &TrappedCrystal,
    phonons: &ModeBasis,
    u: &[f64],
    tau: f64,
    spectrum: PhononSpectrum,
) -> Result<f64> {
    if phonons.kind != ModeKind::PhononLong || phonons.len() != crystal.n {
        return Err(Error::domain("need the longitudinal basis of this crystal"));
    }
    if !(tau >= 0.0) {
        return Err(Error::domain("tau must be non-negative"));
    }
    let norms = coupling_norms(crystal, phonons, u)?;
    let nf = crystal.n as f64;
    let c0sq = coupling_prefactor().powi(2);
    let sg = crystal.gamma.sqrt();
    let ad = alpha_debye();
    let mut total = 0.0;
    for (idx, norm2) in norms.iter().enumerate().skip(1) {
        let m = (idx + 1) as f64;
        let f_sw = ad * m / nf;
        let weight = match spectrum {
            PhononSpectrum::SoundWave => thermal_factor(f_sw, tau),
            PhononSpectrum::Exact => {
                let f = sg * phonons.eigenvalues[idx];
                f_sw / f * thermal_factor(f, tau)
            }
        };
        total += c0sq * nf / m * norm2 * weight;
    }
    Ok(total)
}

/// ‖A^m u‖² for every longitudinal mode, with A^m u = c_m∘(Ku) − K(c_m∘u)
/// and u normalized.
pub fn coupling_norms(crystal: &TrappedCrystal, phonons: &ModeBasis, u: &[f64]) -> Result<Vec<f64>> {
    let n = crystal.n;
    if u.len() != n {
        return Err(Error::domain("mode shape length differs from N"));
    }
    let u = DVector::from_vec(normalized_overlap(u)?);
    let k = coupling_kernel(&crystal.positions);
    let ku = &k * &u;
    let mut cu = phonons.modes.clone();
    for (i, mut row) in cu.row_iter_mut().enumerate() {
        row *= u[i];
    }
    let kcu = &k * cu;
    Ok((0..n).map(|m| (0..n).map(|i| (phonons.modes[(i, m)] * ku[i] - kcu[(i, m)]).powi(2)).sum()).collect())
}

/// F(ξ, τ) sampled at bond midpoints; Γ_L = γ^{-1/4} F.
#[derive(Debug, Clone, Serialize)]
pub struct LindemannProfile {
    pub tau: f64,
    pub gamma: f64,
    pub spectrum: PhononSpectrum,
    /// ξ = 2x/L of each bond midpoint.
    pub xi: Vec<f64>,
    pub f: Vec<f64>,
    pub gamma_l: Vec<f64>,
}

impl LindemannProfile {
    /// Value at the bond closest to the trap center.
    pub fn center(&self) -> f64 {
        let i = (0..self.xi.len()).min_by(|&a, &b| self.xi[a].abs().total_cmp(&self.xi[b].abs())).unwrap_or(0);
        self.f[i]
    }
}

/// Local Lindemann parameter from the longitudinal normal modes:
/// F² = n² Σ_m (c_m(i+1) − c_m(i))²/(2f_m) · coth(f_m/2τ), f = √γ ω.
pub fn lindemann(
    crystal: &TrappedCrystal,
    phonons: &ModeBasis,
    tau: f64,
    spectrum: PhononSpectrum,
) -> Result<LindemannProfile> {
    if phonons.kind != ModeKind::PhononLong || phonons.len() != crystal.n {
        return Err(Error::domain("need the longitudinal basis of this crystal"));
    }
    if !(tau >= 0.0) {
        return Err(Error::domain("tau must be non-negative"));
    }
    let x = &crystal.positions;
    let n = crystal.n;
    let sg = crystal.gamma.sqrt();
    let ad = alpha_debye();
    let freqs: Vec<f64> = (0..n)
        .map(|idx| match spectrum {
            PhononSpectrum::Exact => sg * phonons.eigenvalues[idx],
            PhononSpectrum::SoundWave => ad * (idx + 1) as f64 / n as f64,
        })
        .collect();
    let f = crate::par::map_range(n - 1, |i| {
        let dens = 1.0 / (x[i + 1] - x[i]);
        let mut s = 0.0;
        // Mode 0 is the rigid translation with Δc = 0.
        for (idx, &fm) in freqs.iter().enumerate().skip(1) {
            let dc = phonons.modes[(i + 1, idx)] - phonons.modes[(i, idx)];
            s += dc * dc / (2.0 * fm) * thermal_factor(fm, tau);
        }
        dens * s.sqrt()
    });
    let xi = (0..n - 1).map(|i| (x[i] + x[i + 1]) / crystal.length).collect();
    let scale = crystal.gamma.powf(-0.25);
    let gamma_l = f.iter().map(|v| v * scale).collect();
    Ok(LindemannProfile { tau, gamma: crystal.gamma, spectrum, xi, f, gamma_l })
}

/// Homogeneous-chain value F_h(τ), with
/// F_h² = (2/π)∫₀^π sin²(k/2)/f(k) · coth(f/2τ) dk.
pub fn lindemann_homogeneous(tau: f64) -> f64 {
    let mut s = 0.0;
    let mut hi = PI / 8.0;
    let mut panels = Vec::new();
    for _ in 0..40 {
        panels.push((0.5 * hi, hi, 1));
        hi *= 0.5;
    }
    panels.push((PI / 8.0, PI, 14));
    for (a, b, p) in panels {
        let (xs, ws) = composite_rule(a, b, p, 16);
        for (k, w) in xs.iter().zip(&ws) {
            let f = f_1d(*k);
            s += w * (0.5 * k).sin().powi(2) / f * thermal_factor(f, tau);
        }
    }
    (2.0 / PI * s).sqrt()
}

/// Lindemann threshold for local melting.
pub const LINDEMANN_THRESHOLD: f64 = 0.42;

/// Tunneling constant c in Γ_tun = ω_D exp(−c(γ³ν̃⊥/8)^{1/5}).
pub const TUNNELING_CONSTANT: f64 = 5.8;

#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    pub gamma: f64,
    pub tau: f64,
    pub nu_perp_tilde: f64,
    /// ν̃⊥ must exceed this for a linear chain (from the zone-edge z mode).
    pub zigzag_threshold: f64,
    pub zigzag_threshold_published: f64,
    pub zigzag_ok: bool,
    pub zigzag_ok_published: bool,
    /// √γ ν̃⊥ / √(279ζ(5)/8) − 1.
    pub zigzag_margin: f64,
    /// Γ_tun in units of ω_D.
    pub tunneling_rate: f64,
    /// max[1/γ, 0.42 τ/√γ], must be below 1.
    pub lower_bound: f64,
    /// √γ ν̃⊥ / 6.08, must be above 1.
    pub upper_bound: f64,
    pub inequality_ok: bool,
    /// k_BT ≤ 5U_dd/√γ, i.e. τ ≤ 5.
    pub temperature_ok: bool,
    pub lindemann_center: f64,
    /// (ξ, Γ_L) samples when a trapped crystal was supplied.
    pub lindemann_profile: Vec<(f64, f64)>,
    /// ξ of the bonds with Γ_L above the threshold.
    pub lindemann_violations: Vec<f64>,
    pub lindemann_ok: bool,
}

impl StabilityReport {
    pub fn all_ok(&self) -> bool {
        self.zigzag_ok && self.inequality_ok && self.temperature_ok && self.lindemann_ok
    }
}

/// Checks the self-consistency conditions of the crystal. When a Lindemann
/// profile is supplied its values replace the homogeneous estimate.
pub fn stability_report(
    gamma: f64,
    tau: f64,
    nu_perp_tilde: f64,
    profile: Option<&LindemannProfile>,
) -> Result<StabilityReport> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::domain("gamma must be positive"));
    }
    if !(tau >= 0.0) || !(nu_perp_tilde >= 0.0) {
        return Err(Error::domain("tau and nu_perp must be non-negative"));
    }
    let sg = gamma.sqrt();
    let zz = zigzag_constant();
    let zigzag_threshold = zz / sg;
    let zigzag_threshold_published = ZIGZAG_CONSTANT_PUBLISHED / sg;
    let tunneling_rate = (-TUNNELING_CONSTANT * (gamma.powi(3) * nu_perp_tilde / 8.0).powf(0.2)).exp();
    let lower_bound = (1.0 / gamma).max(LINDEMANN_THRESHOLD * tau / sg);
    let upper_bound = sg * nu_perp_tilde / ZIGZAG_CONSTANT_PUBLISHED;
    let (lindemann_center, lindemann_profile) = match profile {
        Some(p) => {
            let scale = gamma.powf(-0.25);
            (p.center() * scale, p.xi.iter().zip(&p.f).map(|(&x, &f)| (x, f * scale)).collect::<Vec<_>>())
        }
        None => (lindemann_homogeneous(tau) * gamma.powf(-0.25), Vec::new()),
    };
    let lindemann_violations: Vec<f64> =
        lindemann_profile.iter().filter(|(_, g)| *g > LINDEMANN_THRESHOLD).map(|(x, _)| *x).collect();
    let lindemann_ok = lindemann_center <= LINDEMANN_THRESHOLD && lindemann_violations.is_empty();
    Ok(StabilityReport {
        gamma,
        tau,
        nu_perp_tilde,
        zigzag_threshold,
        zigzag_threshold_published,
        zigzag_ok: nu_perp_tilde > zigzag_threshold,
        zigzag_ok_published: nu_perp_tilde > zigzag_threshold_published,
        zigzag_margin: sg * nu_perp_tilde / zz - 1.0,
        tunneling_rate,
        lower_bound,
        upper_bound,
        inequality_ok: lower_bound < 1.0 && upper_bound > 1.0,
        temperature_ok: tau <= 5.0,
        lindemann_center,
        lindemann_profile,
        lindemann_violations,
        lindemann_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn two_body() {
        // k d/2 = 3/d⁴ for the pair at ±d/2.
        let c = equilibrium_positions(2, 0.7, 3.0).unwrap();
        let k: f64 = 3.0 * 0.49;
        let d = (6.0 / k).powf(0.2);
        assert_relative_eq!(c.positions[1] - c.positions[0], d, max_relative = 1e-12);
        assert_relative_eq!(c.positions[0], -c.positions[1], epsilon = 1e-14);
    }

    #[test]
    fn natural_units() {
        let c = TrappedCrystal::natural(200, 20.0).unwrap();
        assert_relative_eq!(c.n0, 1.0, max_relative = 1e-12);
        assert!(c.residual < FORCE_TOLERANCE);
        let mid = c.n / 2;
        let spacing = c.positions[mid] - c.positions[mid - 1];
        assert!((spacing - 1.0).abs() < 0.03, "{spacing}");
    }

    #[test]
    fn density_normalization() {
        let p = DensityProfile::new(300, 0.01).unwrap();
        let (xs, ws) = composite_rule(-0.5 * p.length, 0.5 * p.length, 200, 16);
        let total: f64 = xs.iter().zip(&ws).map(|(x, w)| w * p.density(*x)).sum();
        assert!((total - 300.0).abs() < 1e-4, "{total}");
        assert_relative_eq!(p.cumulative(0.5 * p.length), 300.0, max_relative = 1e-12);
        assert_eq!(p.density(0.5 * p.length), 0.0);
    }

    #[test]
    fn density_exponents() {
        let a = DensityProfile::new(100, 1.0).unwrap().n0;
        let b = DensityProfile::new(1000, 1.0).unwrap().n0;
        assert_relative_eq!((b / a).log10(), 0.4, max_relative = 1e-12);
        let c = DensityProfile::new(100, 100.0).unwrap().n0;
        // k ∝ ν², so n0 ∝ ν^{2/5}.
        assert_relative_eq!((c / a).log10(), 0.4, max_relative = 1e-12);
        let si = center_density_si(100, 2e-25, 2.0 * PI * 1e4, 1e-48);
        let si2 = center_density_si(100, 2e-25, 2.0 * PI * 1e5, 1e-48);
        assert_relative_eq!((si2 / si).log10(), 0.4, max_relative = 1e-12);
    }

    #[test]
    fn bases_small() {
        let c = TrappedCrystal::natural(60, 25.0).unwrap();
        let e = exciton_modes_trapped(&c);
        assert!(e.orthonormality_error() < 1e-10);
        assert!(e.eigenvalues.iter().sum::<f64>().abs() < 1e-10);
        let l = phonon_modes_trapped(&c, ModeKind::PhononLong, 0.0).unwrap();
        assert!(!l.unstable);
        assert_relative_eq!(l.eigenvalues[0], c.nu_tilde, max_relative = 1e-8);
        assert_relative_eq!(l.eigenvalues[1], 5f64.sqrt() * c.nu_tilde, max_relative = 1e-6);
        let com = l.mode(0);
        for v in &com {
            assert!((v - 1.0 / (60f64).sqrt()).abs() < 1e-8);
        }
        // Parity alternates along the spectrum.
        for idx in 0..6 {
            let v = l.mode(idx);
            let sign = if idx % 2 == 0 { 1.0 } else { -1.0 };
            for i in 0..30 {
                assert!((v[i] - sign * v[59 - i]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn coupling_symmetry() {
        let c = TrappedCrystal::natural(40, 25.0).unwrap();
        let e = exciton_modes_trapped(&c);
        let l = phonon_modes_trapped(&c, ModeKind::PhononLong, 0.0).unwrap();
        let t = coupling_matrix_trapped(&c, &e, &l, &[1, 2, 7]).unwrap();
        for s in &t.slices {
            assert!((s - s.transpose()).abs().max() < 1e-12);
        }
        // Rigid translation does not couple.
        assert!(t.slices[0].abs().max() < 1e-10);
        assert!(coupling_matrix_trapped(&c, &e, &l, &[41]).is_err());
    }

    #[test]
    fn phonon_integral_matches_tensor() {
        // Σ_m ‖𝓜_m z‖² weights from the explicit tensor.
        let c = TrappedCrystal::natural(30, 25.0).unwrap();
        let e = exciton_modes_trapped(&c);
        let l = phonon_modes_trapped(&c, ModeKind::PhononLong, 0.0).unwrap();
        let u: Vec<f64> = c.positions.iter().map(|x| (0.05 * x).cos()).collect();
        let un = DVector::from_vec(normalized_overlap(&u).unwrap());
        let z = e.modes.transpose() * un;
        let all: Vec<usize> = (1..=30).collect();
        let t = coupling_matrix_trapped(&c, &e, &l, &all).unwrap();
        let tau = 2.0;
        let mut oracle = 0.0;
        for (idx, slice) in t.slices.iter().enumerate().skip(1) {
            let f_sw = alpha_debye() * (idx + 1) as f64 / 30.0;
            let v = slice * &z;
            oracle += v.norm_squared() * thermal_factor(f_sw, tau);
        }
        let got = phonon_integral(&c, &l, &u, tau, PhononSpectrum::SoundWave).unwrap();
        assert_relative_eq!(got, oracle, max_relative = 1e-10);
    }

    #[test]
    fn homogeneous_lindemann() {
        assert!((lindemann_homogeneous(0.0) - 0.4236).abs() < 1e-3);
        let hi = lindemann_homogeneous(100.0) / 10.0;
        assert!((hi - 0.278).abs() < 0.01, "{hi}");
    }

    #[test]
    fn zigzag_onset() {
        let c = TrappedCrystal::natural(120, 16.0).unwrap();
        let crit = zigzag_constant() / 4.0;
        let above = phonon_modes_trapped(&c, ModeKind::PhononZ, 1.01 * crit).unwrap();
        let below = phonon_modes_trapped(&c, ModeKind::PhononZ, 0.99 * crit).unwrap();
        assert!(!above.unstable);
        assert!(below.unstable);
        assert!(below.eigenvalues[0] < 0.0);
    }

    #[test]
    fn stability_bounds() {
        let r = stability_report(1.0, 0.0, 10.0, None).unwrap();
        assert!((r.lindemann_center - 0.424).abs() < 0.01);
        // A marginal CaBr-like point: the formula threshold passes, the
        // published one does not.
        let nu = 1.674;
        let r = stability_report(13.0, 1.0, nu, None).unwrap();
        assert!(r.zigzag_ok && !r.zigzag_ok_published);
        assert!(r.zigzag_margin < 0.01);
        for gamma in [5.0, 20.0, 80.0] {
            let r = stability_report(gamma, 0.0, zigzag_constant() / f64::sqrt(gamma), None).unwrap();
            let bound = (-TUNNELING_CONSTANT * (zigzag_constant() / 8.0).powf(0.2) * f64::sqrt(gamma)).exp();
            assert!(r.tunneling_rate <= bound * (1.0 + 1e-12));
        }
    }
}
