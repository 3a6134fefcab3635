//! SI constants and the map between physical parameters and crystal units
//! (a0 = 1, U_dd = 1, ħ = 1, mass = γ).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::specfun::{lambda_trap, zeta3};
use crate::{Error, Result};

/// CODATA 2018 values (exact where the SI defines them).
pub mod consts {
    /// Planck constant [J s].
    pub const H: f64 = 6.626_070_15e-34;
    /// Reduced Planck constant [J s].
    pub const HBAR: f64 = H / (2.0 * std::f64::consts::PI);
    /// Vacuum permittivity [F/m].
    pub const EPS0: f64 = 8.854_187_812_8e-12;
    /// Boltzmann constant [J/K].
    pub const KB: f64 = 1.380_649e-23;
    /// Atomic mass unit [kg].
    pub const AMU: f64 = 1.660_539_066_60e-27;
    /// Speed of light [m/s].
    pub const C: f64 = 299_792_458.0;
    /// One Debye [C m] = 1e-21 / c.
    pub const DEBYE: f64 = 1e-21 / C;
}

/// One molecular species.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MoleculeParams {
    /// Body-fixed dipole moment [D].
    pub mu0: f64,
    /// Rotational constant B/h [Hz].
    pub b: f64,
    /// Mass [amu].
    pub mass: f64,
    /// Spin-rotation constant γ_sr/h [Hz]; zero for closed-shell species.
    pub gamma_sr: f64,
}

impl MoleculeParams {
    pub fn new(mu0: f64, b: f64, mass: f64, gamma_sr: f64) -> Result<Self> {
        let m = MoleculeParams { mu0, b, mass, gamma_sr };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.mu0, self.b, self.mass, self.gamma_sr].iter().all(|v| v.is_finite());
        if !finite || self.mu0 <= 0.0 || self.b <= 0.0 || self.mass <= 0.0 || self.gamma_sr < 0.0 {
            return Err(Error::domain(format!("invalid molecule parameters {self:?}")));
        }
        Ok(())
    }

    /// CaBr-like ²Σ molecule: μ0 = 4.3 D, B/h = 2.8 GHz, 120 amu, γ_sr = 0.03 B.
    pub fn cabr() -> Self {
        MoleculeParams { mu0: 4.3, b: 2.8e9, mass: 120.0, gamma_sr: 0.03 * 2.8e9 }
    }

    pub fn mass_kg(&self) -> f64 {
        self.mass * consts::AMU
    }

    /// Dipole moment in C m.
    pub fn mu0_si(&self) -> f64 {
        self.mu0 * consts::DEBYE
    }

    /// Rotational constant as an energy [J].
    pub fn b_joule(&self) -> f64 {
        self.b * consts::H
    }

    /// Converts a field in units of B/μ0 to V/m.
    pub fn field_si(&self, e_b: f64) -> f64 {
        e_b * self.b_joule() / self.mu0_si()
    }

    /// γ_sr / B.
    pub fn spin_rotation_ratio(&self) -> f64 {
        self.gamma_sr / self.b
    }
}

/// Dimensionless frame of one crystal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrystalScales {
    /// Lattice spacing [m].
    pub a0: f64,
    /// Dipole-dipole energy μ_g²/(4πε0 a0³) [J].
    pub u_dd: f64,
    /// U_dd / (ħ²/m a0²).
    pub gamma: f64,
    pub dimension: u8,
    /// Temperature [K].
    pub temperature: f64,
    /// √γ k_B T / U_dd.
    pub tau: f64,
    /// Molecular mass [kg].
    pub mass: f64,
    /// Induced dipole |μ_g| [D].
    pub mu_g: f64,
}

/// Builds the crystal frame from SI inputs. The sign of `mu_g` is ignored
/// since only μ_g² enters U_dd.
pub fn derive_scales(mol: &MoleculeParams, mu_g: f64, a0: f64, temperature: f64, dim: u8) -> Result<CrystalScales> {
    mol.validate()?;
    if !(mu_g.is_finite() && mu_g != 0.0) {
        return Err(Error::domain("induced dipole must be nonzero"));
    }
    if !(a0.is_finite() && a0 > 0.0) {
        return Err(Error::domain("a0 must be positive"));
    }
    if !(temperature.is_finite() && temperature >= 0.0) {
        return Err(Error::domain("temperature must be non-negative"));
    }
    if dim != 1 && dim != 2 {
        return Err(Error::domain(format!("dimension must be 1 or 2, got {dim}")));
    }
    let mu_g = mu_g.abs();
    let u_dd = u_dd_si(mu_g, a0);
    let mass = mol.mass_kg();
    let gamma = u_dd * mass * a0 * a0 / (consts::HBAR * consts::HBAR);
    let tau = gamma.sqrt() * consts::KB * temperature / u_dd;
    Ok(CrystalScales { a0, u_dd, gamma, dimension: dim, temperature, tau, mass, mu_g })
}

/// μ²/(4πε0 a0³) in J for μ in Debye and a0 in m.
pub fn u_dd_si(mu_debye: f64, a0: f64) -> f64 {
    let mu = mu_debye * consts::DEBYE;
    mu * mu / (4.0 * PI * consts::EPS0 * a0.powi(3))
}

/// C3 = μ²/(4πε0) [J m³].
pub fn c3_si(mu_debye: f64) -> f64 {
    u_dd_si(mu_debye, 1.0)
}

impl CrystalScales {
    /// U_dd/h [Hz].
    pub fn u_dd_hz(&self) -> f64 {
        self.u_dd / consts::H
    }

    /// U_dd/ħ [rad/s]: converts a dimensionless rate to SI.
    pub fn rate_unit(&self) -> f64 {
        self.u_dd / consts::HBAR
    }

    /// ħ/U_dd [s]: converts a dimensionless time to SI.
    pub fn time_unit(&self) -> f64 {
        consts::HBAR / self.u_dd
    }

    pub fn energy_to_si(&self, e: f64) -> f64 {
        e * self.u_dd
    }

    pub fn energy_from_si(&self, e: f64) -> f64 {
        e / self.u_dd
    }

    pub fn length_to_si(&self, x: f64) -> f64 {
        x * self.a0
    }

    pub fn length_from_si(&self, x: f64) -> f64 {
        x / self.a0
    }

    /// Dimensionless temperature τ for a temperature in K.
    pub fn tau_of(&self, temperature: f64) -> f64 {
        self.gamma.sqrt() * consts::KB * temperature / self.u_dd
    }

    /// Temperature [K] for a dimensionless τ.
    pub fn temperature_of(&self, tau: f64) -> f64 {
        tau * self.u_dd / (self.gamma.sqrt() * consts::KB)
    }

    /// ħν⊥/U_dd for a transverse trap frequency ν⊥/2π in Hz.
    pub fn nu_tilde_of(&self, nu_hz: f64) -> f64 {
        consts::H * nu_hz / self.u_dd
    }

    /// Frequency in Hz (ν = ω/2π) for a dimensionless angular frequency.
    pub fn freq_hz_of(&self, omega: f64) -> f64 {
        omega * self.u_dd / consts::H
    }
}

/// ħν/U_dd of a trap holding N molecules with center spacing a0 = 1/n(0):
/// (1/N) 2^{5/2} / √(γΛ²/ζ(3)).
pub fn trap_frequency_relation(gamma: f64, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain("need at least two molecules"));
    }
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::domain("gamma must be positive"));
    }
    let lam = lambda_trap();
    Ok(2f64.powf(2.5) / (n as f64 * (gamma * lam * lam / zeta3()).sqrt()))
}

/// Smallest U_dd/h [Hz] compatible with a crystal of interaction strength at
/// least `gamma_c` for a given induced dipole [D] and mass [amu]:
/// U_dd = γ_c³ ħ⁶ / (C3² m³).
pub fn min_u_dd_hz(mu_g: f64, mass_amu: f64, gamma_c: f64) -> f64 {
    let c3 = c3_si(mu_g);
    let m = mass_amu * consts::AMU;
    gamma_c.powi(3) * consts::HBAR.powi(6) / (c3 * c3 * m.powi(3)) / consts::H
}
