//! TOML run configuration. Every key is optional; unknown keys are rejected.

use std::path::Path;

use anyhow::{Context as _, Result};
use serde::Deserialize;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub molecule: MoleculeBlock,
    #[serde(default)]
    pub states: StatesBlock,
    #[serde(default)]
    pub crystal: CrystalBlock,
    #[serde(default)]
    pub cavity: CavityBlock,
    #[serde(default)]
    pub numerics: NumericsBlock,
}

/// Defaults to CaBr.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MoleculeBlock {
    pub mu0_debye: Option<f64>,
    #[serde(rename = "B_GHz")]
    pub b_ghz: Option<f64>,
    pub mass_amu: Option<f64>,
    #[serde(rename = "gamma_sr_MHz")]
    pub gamma_sr_mhz: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatesBlock {
    /// (N, M_N) of the ground state.
    pub g: Option<(u32, i32)>,
    pub e: Option<(u32, i32)>,
    #[serde(rename = "E_b")]
    pub e_b: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrystalBlock {
    pub dimension: Option<u8>,
    /// Center spacing. Alternatively give `N` and `nu_kHz`.
    pub a0_nm: Option<f64>,
    #[serde(rename = "N")]
    pub n: Option<usize>,
    #[serde(rename = "nu_kHz")]
    pub nu_khz: Option<f64>,
    #[serde(rename = "temperature_uK")]
    pub temperature_uk: Option<f64>,
    #[serde(rename = "nu_perp_kHz")]
    pub nu_perp_khz: Option<f64>,
    /// Overrides for the induced dipole and the pair parameters that are
    /// otherwise computed from the rotor model.
    pub mu_g_debye: Option<f64>,
    pub kappa: Option<f64>,
    pub epsilon: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavityBlock {
    pub d_um: Option<f64>,
    #[serde(rename = "Gamma_c_kHz")]
    pub gamma_c_khz: Option<f64>,
    pub lambda_c_mm: Option<f64>,
    pub mode: Option<ModeName>,
    #[serde(rename = "N_eff")]
    pub n_eff: Option<f64>,
    /// Fixed g_N/2π, bypassing N_eff and d.
    #[serde(rename = "g_N_MHz")]
    pub g_n_mhz: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModeName {
    Cosine,
    Flat,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericsBlock {
    /// Rotor basis cutoff.
    #[serde(rename = "N_max")]
    pub n_max: Option<u32>,
    /// Zone grid per axis for 2D integrals and P_e(t).
    pub grid: Option<usize>,
    /// Samples per curve.
    pub points: Option<usize>,
    /// 2D lattice-sum radius.
    pub cutoff: Option<f64>,
    /// P_c threshold separating weak and strong coupling.
    pub threshold: Option<f64>,
    /// Molecules in the dense trapped solve of the fidelity pipeline.
    #[serde(rename = "N_crystal")]
    pub n_crystal: Option<usize>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }
}
