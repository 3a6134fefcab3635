//! Cavity-coupled ensemble qubit: collective coupling, inhomogeneous width W
//! and the optimal state-transfer fidelity.
//!
//! Rates passed to [`gate_fidelity`] are angular frequencies [rad/s]. Report
//! fields ending in `_hz` are ordinary frequencies ω/2π.

use std::f64::consts::PI;

use serde::Serialize;

use crate::rotor::{qubit_pair_params, StateLabel};
use crate::scales::{consts, derive_scales, CrystalScales, MoleculeParams};
use crate::trapped::{
    exciton_integral, exciton_modes_trapped, phonon_integral, phonon_modes_trapped, ModeKind, PhononSpectrum,
    TrappedCrystal,
};
use crate::{Error, Result};

/// Single-molecule coupling g/2π at 1 µm from the electrode [Hz]; scales as
/// 1/d.
pub const G1_AT_ONE_MICRON: f64 = 40e3;

/// Cavity mode profile along the crystal axis.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ModeShape {
    /// Standing wave cos(2πx/λ_c) with an antinode at the trap center.
    Cosine,
    /// u ≡ 1.
    Flat,
    /// Linear interpolation of (x [m], u) samples; zero outside.
    Tabulated { x: Vec<f64>, u: Vec<f64> },
}

#[derive(Debug, Clone, Serialize)]
pub struct CavityParams {
    /// g/2π at 1 µm [Hz].
    pub g1_at_ref: f64,
    /// Trap-electrode distance [m].
    pub d: f64,
    /// Cavity decay Γ_c/2π [Hz].
    pub gamma_c: f64,
    /// Cavity wavelength [m].
    pub lambda_c: f64,
    pub mode: ModeShape,
}

impl CavityParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.g1_at_ref > 0.0 && self.d > 0.0 && self.lambda_c > 0.0) {
            return Err(Error::domain("coupling scale, distance and wavelength must be positive"));
        }
        if !(self.gamma_c >= 0.0) {
            return Err(Error::domain("cavity decay must be non-negative"));
        }
        if let ModeShape::Tabulated { x, u } = &self.mode {
            if x.len() != u.len() || x.len() < 2 {
                return Err(Error::domain("tabulated mode needs matching x and u with at least two points"));
            }
            if x.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::domain("tabulated mode x must increase"));
            }
            if u.iter().any(|v| !(0.0..=1.0).contains(v)) {
                return Err(Error::domain("mode function must lie in [0, 1]"));
            }
        }
        Ok(())
    }

    /// u(x) at a position in meters.
    pub fn u(&self, x: f64) -> f64 {
        match &self.mode {
            ModeShape::Cosine => (2.0 * PI * x / self.lambda_c).cos().abs(),
            ModeShape::Flat => 1.0,
            ModeShape::Tabulated { x: xs, u } => {
                if x < xs[0] || x > xs[xs.len() - 1] {
                    return 0.0;
                }
                let i = xs.partition_point(|&v| v <= x).clamp(1, xs.len() - 1);
                let t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
                u[i - 1] + t * (u[i] - u[i - 1])
            }
        }
    }

    /// Single-molecule g/2π [Hz] at the configured distance.
    pub fn single_coupling_hz(&self) -> f64 {
        self.g1_at_ref * 1e-6 / self.d
    }
}

/// g_N/2π [Hz] for an effective molecule number at distance d [m].
pub fn collective_coupling_hz(g1_at_ref: f64, d: f64, n_eff: f64) -> f64 {
    g1_at_ref * 1e-6 / d * n_eff.sqrt()
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CollectiveCoupling {
    pub g_n_hz: f64,
    pub n_eff: f64,
    /// False when the crystal is longer than λ_c/2.
    pub fits_half_wave: bool,
}

/// Mode shape sampled at the molecules; `a0` converts positions to meters.
pub fn mode_samples(cavity: &CavityParams, crystal: &TrappedCrystal, a0: f64) -> Vec<f64> {
    crystal.positions.iter().map(|&x| cavity.u(x * a0)).collect()
}

/// N_eff = Σ_i u(x_i)² and g_N = g √N_eff.
pub fn collective_coupling(cavity: &CavityParams, crystal: &TrappedCrystal, a0: f64) -> Result<CollectiveCoupling> {
    cavity.validate()?;
    let n_eff: f64 = mode_samples(cavity, crystal, a0).iter().map(|u| u * u).sum();
    Ok(CollectiveCoupling {
        g_n_hz: collective_coupling_hz(cavity.g1_at_ref, cavity.d, n_eff),
        n_eff,
        fits_half_wave: crystal.length * a0 <= 0.5 * cavity.lambda_c,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct InhomogeneousWidth {
    pub i_exc: f64,
    pub i_phon: f64,
    /// W in κ-free units: W/(|κ|U_dd/ħ) = √(I_exc + I_phon/√γ).
    pub w_over_kappa: f64,
    /// W [U_dd/ħ].
    pub w: f64,
}

/// W² = (κU_dd/ħ)²(I_exc + I_phon/√γ) for the ensemble state with profile u.
pub fn inhomogeneous_w(crystal: &TrappedCrystal, kappa: f64, tau: f64, u: &[f64]) -> Result<InhomogeneousWidth> {
    let exc = exciton_modes_trapped(crystal);
    let phon = phonon_modes_trapped(crystal, ModeKind::PhononLong, 0.0)?;
    let i_exc = exciton_integral(&exc, u)?;
    let i_phon = phonon_integral(crystal, &phon, u, tau, PhononSpectrum::Exact)?;
    let w_over_kappa = (i_exc + i_phon / crystal.gamma.sqrt()).sqrt();
    Ok(InhomogeneousWidth { i_exc, i_phon, w_over_kappa, w: kappa.abs() * w_over_kappa })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct GateResult {
    /// Inputs [rad/s].
    pub g_n: f64,
    pub w: f64,
    pub gamma_c: f64,
    /// Optimal detuning (πg²W²/(2Γ_c))^{1/3} [rad/s].
    pub delta_star: f64,
    pub f_star: f64,
    /// πΔ*/(2g²) [s].
    pub t_g: f64,
    /// (πg²W²/Γ_c)^{1/3} and its gate time, for comparison.
    pub delta_alt: f64,
    pub t_g_alt: f64,
    /// Δ* ≥ 10W, so the crystal dynamics is off-resonant.
    pub detuning_valid: bool,
    /// W = 0 or Γ_c = 0: no finite optimum.
    pub degenerate: bool,
    /// F* < 0.
    pub failure: bool,
}

/// F(Δ) = 1 − (πW/4Δ)² − πΓ_cΔ/(4g²).
pub fn fidelity_at(g_n: f64, w: f64, gamma_c: f64, delta: f64) -> f64 {
    1.0 - (PI * w / (4.0 * delta)).powi(2) - PI * gamma_c * delta / (4.0 * g_n * g_n)
}

/// Maximizes F(Δ). All rates are angular frequencies.
pub fn gate_fidelity(g_n: f64, w: f64, gamma_c: f64) -> Result<GateResult> {
    if !(g_n > 0.0 && g_n.is_finite()) {
        return Err(Error::domain("g_N must be positive"));
    }
    if !(w >= 0.0 && gamma_c >= 0.0 && w.is_finite() && gamma_c.is_finite()) {
        return Err(Error::domain("W and Gamma_c must be non-negative"));
    }
    let g2 = g_n * g_n;
    if w == 0.0 || gamma_c == 0.0 {
        // Each loss term can be driven to zero alone; Δ* is 0 or ∞.
        let delta_star = if w == 0.0 { 0.0 } else { f64::INFINITY };
        return Ok(GateResult {
            g_n,
            w,
            gamma_c,
            delta_star,
            f_star: 1.0,
            t_g: PI * delta_star / (2.0 * g2),
            delta_alt: delta_star,
            t_g_alt: PI * delta_star / (2.0 * g2),
            detuning_valid: w == 0.0,
            degenerate: true,
            failure: false,
        });
    }
    let delta_star = (PI * g2 * w * w / (2.0 * gamma_c)).cbrt();
    let delta_alt = (PI * g2 * w * w / gamma_c).cbrt();
    let f_star = 1.0 - 0.75 * (PI / 2.0).powf(4.0 / 3.0) * (gamma_c * w / g2).powf(2.0 / 3.0);
    Ok(GateResult {
        g_n,
        w,
        gamma_c,
        delta_star,
        f_star,
        t_g: PI * delta_star / (2.0 * g2),
        delta_alt,
        t_g_alt: PI * delta_alt / (2.0 * g2),
        detuning_valid: delta_star >= 10.0 * w,
        degenerate: false,
        failure: f_star < 0.0,
    })
}

/// Fixed inputs of a case study.
#[derive(Debug, Clone, Serialize)]
pub struct CaseStudyInputs {
    pub molecule: MoleculeParams,
    /// Bias field E_b [B/μ₀] of the qubit states.
    pub e_b: f64,
    pub g_state: StateLabel,
    pub e_state: StateLabel,
    /// Induced dipole [D] and κ used downstream.
    pub mu_g_debye: f64,
    pub kappa: f64,
    pub a0: f64,
    pub tau: f64,
    pub n_eff: f64,
    pub d: f64,
    pub gamma_c_hz: f64,
    /// Molecules in the dense trapped solve used for I_exc and I_phon.
    pub n_crystal: usize,
    /// L/λ_c of the modeled crystal.
    pub length_over_lambda: f64,
    /// Fixed g_N/2π [Hz] instead of the value from N_eff and d.
    pub g_n_hz_override: Option<f64>,
    pub mode: ModeShape,
}

#[derive(Debug, Clone, Serialize)]
pub struct RotorSummary {
    pub mu_g_debye: f64,
    pub kappa: f64,
    pub epsilon: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CaseStudyReport {
    pub schema_version: &'static str,
    pub name: String,
    pub inputs: CaseStudyInputs,
    /// Computed from the rotor model at the input field.
    pub rotor: RotorSummary,
    pub scales: CrystalScales,
    pub u_dd_hz: f64,
    pub gamma: f64,
    pub temperature_uk: f64,
    /// 2U_dd/k_B [µK].
    pub temperature_bound_uk: f64,
    /// U_dd/(0.42 k_B) [µK].
    pub temperature_bound_lindemann_uk: f64,
    /// Smallest ν⊥/2π [Hz] with the published zig-zag constant.
    pub nu_perp_min_hz: f64,
    /// Same with √(279ζ(5)/8).
    pub nu_perp_min_formula_hz: f64,
    pub i_exc: f64,
    pub i_phon: f64,
    pub w_hz: f64,
    pub g_n_hz: f64,
    pub gamma_c_hz: f64,
    pub delta_star_hz: f64,
    pub f_star: f64,
    pub gate_error: f64,
    pub t_g_us: f64,
    pub t_g_alt_us: f64,
    pub detuning_valid: bool,
}

/// Runs scales, rotor, trapped crystal, W and the gate optimum for one
/// parameter set.
pub fn case_study(name: &str, inputs: CaseStudyInputs) -> Result<CaseStudyReport> {
    let mol = inputs.molecule;
    let pair = qubit_pair_params(inputs.g_state, inputs.e_state, inputs.e_b, None)?;
    let rotor = RotorSummary { mu_g_debye: pair.mu_g * mol.mu0, kappa: pair.kappa, epsilon: pair.epsilon };
    // Temperature from τ once γ is known; U_dd does not depend on T.
    let probe = derive_scales(&mol, inputs.mu_g_debye, inputs.a0, 0.0, 1)?;
    let temperature = inputs.tau * probe.u_dd / (probe.gamma.sqrt() * consts::KB);
    let scales = derive_scales(&mol, inputs.mu_g_debye, inputs.a0, temperature, 1)?;
    let u_dd_hz = scales.u_dd_hz();
    let gamma = scales.gamma;

    let crystal = TrappedCrystal::natural(inputs.n_crystal, gamma)?;
    let cavity = CavityParams {
        g1_at_ref: G1_AT_ONE_MICRON,
        d: inputs.d,
        gamma_c: inputs.gamma_c_hz,
        lambda_c: crystal.length * inputs.a0 / inputs.length_over_lambda,
        mode: inputs.mode.clone(),
    };
    let u = mode_samples(&cavity, &crystal, inputs.a0);
    let width = inhomogeneous_w(&crystal, inputs.kappa, inputs.tau, &u)?;
    let w_hz = width.w * u_dd_hz;
    let g_n_hz =
        inputs.g_n_hz_override.unwrap_or_else(|| collective_coupling_hz(G1_AT_ONE_MICRON, inputs.d, inputs.n_eff));
    let two_pi = 2.0 * PI;
    let gate = gate_fidelity(two_pi * g_n_hz, two_pi * w_hz, two_pi * inputs.gamma_c_hz)?;
    let nu_min = |c: f64| c / gamma.sqrt() * u_dd_hz;
    let uk = |t: f64| t * 1e6;
    Ok(CaseStudyReport {
        schema_version: crate::SCHEMA_VERSION,
        name: name.to_string(),
        rotor,
        u_dd_hz,
        gamma,
        temperature_uk: uk(temperature),
        temperature_bound_uk: uk(2.0 * scales.u_dd / consts::KB),
        temperature_bound_lindemann_uk: uk(scales.u_dd / (0.42 * consts::KB)),
        nu_perp_min_hz: nu_min(crate::homogeneous::ZIGZAG_CONSTANT_PUBLISHED),
        nu_perp_min_formula_hz: nu_min(crate::homogeneous::zigzag_constant()),
        i_exc: width.i_exc,
        i_phon: width.i_phon,
        w_hz,
        g_n_hz,
        gamma_c_hz: inputs.gamma_c_hz,
        delta_star_hz: gate.delta_star / two_pi,
        f_star: gate.f_star,
        gate_error: 1.0 - gate.f_star,
        t_g_us: gate.t_g * 1e6,
        t_g_alt_us: gate.t_g_alt * 1e6,
        detuning_valid: gate.detuning_valid,
        scales,
        inputs,
    })
}

/// CaBr at a₀ = 70 nm with N_eff = 10⁴ molecules 0.5 µm from the electrode.
pub fn cabr_inputs() -> CaseStudyInputs {
    CaseStudyInputs {
        molecule: MoleculeParams::cabr(),
        e_b: 3.05,
        g_state: StateLabel { n: 1, m: 0 },
        e_state: StateLabel { n: 2, m: 0 },
        mu_g_debye: 0.7,
        kappa: 10.5,
        a0: 70e-9,
        tau: 1.0,
        n_eff: 1e4,
        d: 0.5e-6,
        gamma_c_hz: 10e3,
        n_crystal: 400,
        length_over_lambda: 0.01,
        g_n_hz_override: None,
        mode: ModeShape::Cosine,
    }
}

/// The denser-coupling variant: a₀ = 100 nm and g_N/2π = 25 MHz.
pub fn cabr_strong_coupling_inputs() -> CaseStudyInputs {
    CaseStudyInputs { a0: 100e-9, g_n_hz_override: Some(25e6), n_eff: 1e5, ..cabr_inputs() }
}

/// Both CaBr parameter sets.
pub fn case_study_cabr() -> Result<Vec<CaseStudyReport>> {
    Ok(vec![case_study("cabr", cabr_inputs())?, case_study("cabr_strong_coupling", cabr_strong_coupling_inputs())?])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn collective_scaling() {
        assert_relative_eq!(collective_coupling_hz(G1_AT_ONE_MICRON, 0.5e-6, 1e4), 8e6, max_relative = 1e-12);
        let g = collective_coupling_hz(G1_AT_ONE_MICRON, 0.5e-6, 1e5);
        assert!((g / 25e6 - 1.0).abs() < 0.02);
        let crystal = TrappedCrystal::natural(30, 20.0).unwrap();
        let flat =
            CavityParams { g1_at_ref: G1_AT_ONE_MICRON, d: 1e-6, gamma_c: 0.0, lambda_c: 1e-3, mode: ModeShape::Flat };
        let c = collective_coupling(&flat, &crystal, 50e-9).unwrap();
        assert_eq!(c.n_eff, 30.0);
        assert!(c.fits_half_wave);
    }

    #[test]
    fn optimum_is_stationary() {
        let tp = 2.0 * PI;
        let (g, w, gc) = (tp * 8e6, tp * 2e6, tp * 10e3);
        let r = gate_fidelity(g, w, gc).unwrap();
        let h = r.delta_star * 1e-5;
        let d = (fidelity_at(g, w, gc, r.delta_star + h) - fidelity_at(g, w, gc, r.delta_star - h)) / (2.0 * h);
        assert!(d.abs() * r.delta_star < 1e-8);
        assert_relative_eq!(fidelity_at(g, w, gc, r.delta_star), r.f_star, max_relative = 1e-12);
        assert!((r.f_star - 0.994).abs() < 0.002);
        assert!(r.t_g > 0.1e-6 && r.t_g < 0.2e-6);
        assert!(r.detuning_valid);
    }

    #[test]
    fn monotone() {
        let base = gate_fidelity(10.0, 1.0, 0.1).unwrap().f_star;
        assert!(gate_fidelity(12.0, 1.0, 0.1).unwrap().f_star > base);
        assert!(gate_fidelity(10.0, 1.2, 0.1).unwrap().f_star < base);
        assert!(gate_fidelity(10.0, 1.0, 0.12).unwrap().f_star < base);
        assert!(gate_fidelity(1.0, 10.0, 10.0).unwrap().failure);
    }

    #[test]
    fn degenerate_cases() {
        let r = gate_fidelity(10.0, 0.0, 0.1).unwrap();
        assert!(r.degenerate && r.f_star == 1.0 && r.delta_star == 0.0);
        // With W = 0 only the cavity term remains at a finite detuning.
        assert_relative_eq!(fidelity_at(10.0, 0.0, 0.1, 2.0), 1.0 - PI * 0.1 * 2.0 / 400.0, max_relative = 1e-12);
        assert!(gate_fidelity(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn cosine_mode() {
        let c =
            CavityParams { g1_at_ref: G1_AT_ONE_MICRON, d: 1e-6, gamma_c: 0.0, lambda_c: 1.0, mode: ModeShape::Cosine };
        assert_eq!(c.u(0.0), 1.0);
        assert!(c.u(0.25).abs() < 1e-15);
        let t = CavityParams { mode: ModeShape::Tabulated { x: vec![-1.0, 1.0], u: vec![0.0, 1.0] }, ..c };
        assert_relative_eq!(t.u(0.0), 0.5);
        assert_eq!(t.u(2.0), 0.0);
    }
}
